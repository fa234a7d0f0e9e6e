#![no_main]

use libfuzzer_sys::fuzz_target;
use super_einstein::curvature::RicciReport;
use super_einstein::einstein::ClassificationReport;
use super_einstein::flag::{FlagInvariants, StructureTable};

fuzz_target!(|data: &[u8]| {
    if let Ok(r) = serde_json::from_slice::<ClassificationReport>(data) {
        let again: ClassificationReport = serde_json::from_str(&serde_json::to_string(&r).unwrap()).unwrap();
        assert_eq!(again, r);
    }
    let _ = serde_json::from_slice::<FlagInvariants>(data);
    let _ = serde_json::from_slice::<StructureTable>(data);
    let _ = serde_json::from_slice::<RicciReport>(data);
});
