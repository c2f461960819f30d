#![no_main]
use dwd_core::ingest::parse_libsvm;
use dwd_core::Error;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    match parse_libsvm(data, "fuzz") {
        Ok(raw) => {
            assert!(raw.x.values().iter().all(|v| v.is_finite()));
            if let Some(y) = &raw.labels {
                assert_eq!(y.len(), raw.n());
            }
        }
        Err(Error::Parse { line, .. }) => assert!(line >= 1),
        Err(_) => {}
    }
});
