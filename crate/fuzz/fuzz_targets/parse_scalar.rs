#![no_main]

use libfuzzer_sys::fuzz_target;
use super_einstein::scalars::{fmt_rational, parse_rational, Scalar};

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if let Ok(r) = parse_rational(s) {
        assert_eq!(parse_rational(&fmt_rational(&r)).unwrap(), r);
    }
    if let Ok(z) = s.parse::<Scalar>() {
        assert_eq!(z.to_string().parse::<Scalar>().unwrap(), z);
    }
});
