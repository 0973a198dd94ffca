#![no_main]
use kmerlin::config::RunConfig;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &str| {
    if let Ok(cfg) = RunConfig::from_json(data) {
        let _ = cfg.to_grid().validate();
        let _ = cfg.digest();
    }
});
