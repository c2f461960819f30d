#![no_main]
use dwd_core::ingest::ModelFile;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(model) = ModelFile::from_toml_str(text) {
        let again = ModelFile::from_toml_str(&model.to_toml_string().unwrap()).unwrap();
        assert_eq!(again, model);
    }
});
