#![no_main]

use libfuzzer_sys::fuzz_target;
use super_einstein::flag::{parse_circle, CircledDiagram};

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if let Ok(nodes) = parse_circle(s) {
        // only validation, never decomposition: that is not cheap
        let _ = CircledDiagram::su(3, 2, &nodes);
        let _ = CircledDiagram::osp(3, nodes.first().copied().unwrap_or(0));
    }
});
