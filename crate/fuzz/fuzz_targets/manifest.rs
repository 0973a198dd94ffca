#![no_main]
use kmerlin::seq_io::{parse_manifest, ManifestOptions};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &str| {
    for has_header in [false, true] {
        for delimiter in [b'\t', b','] {
            let opts = ManifestOptions {
                delimiter,
                has_header,
                ..ManifestOptions::default()
            };
            let _ = parse_manifest(data, &opts);
        }
    }
});
