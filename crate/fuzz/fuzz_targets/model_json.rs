#![no_main]
use kmerlin::ModelContainer;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &str| {
    if let Ok(container) = ModelContainer::from_json(data) {
        let text = container.to_json().unwrap();
        assert_eq!(ModelContainer::from_json(&text).unwrap(), container);
    }
});
