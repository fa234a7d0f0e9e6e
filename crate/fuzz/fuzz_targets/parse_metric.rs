#![no_main]

use libfuzzer_sys::fuzz_target;
use super_einstein::curvature::parse_metric;
use super_einstein::scalars::int;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if let Ok(m) = parse_metric(s) {
        assert!(m.x.iter().all(|v| *v != int(0)));
    }
});
