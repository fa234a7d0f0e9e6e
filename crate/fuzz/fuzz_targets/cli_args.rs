#![no_main]

use libfuzzer_sys::fuzz_target;

// Arguments are NUL-separated. Verification suites and large algebras are
// skipped so each input stays fast.
fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    let args: Vec<&str> = std::iter::once("super-einstein").chain(s.split('\0')).collect();
    if args.iter().any(|a| *a == "verify" || a.parse::<u64>().is_ok_and(|v| v > 6)) {
        return;
    }
    let out = super_einstein_cli::run(args);
    assert!(matches!(out.code, 0..=2));
});
