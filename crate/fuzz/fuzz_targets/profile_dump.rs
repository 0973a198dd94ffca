#![no_main]
use kmerlin::kmer::{format_dump_line, parse_profile_dump};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &str| {
    if let Ok(rows) = parse_profile_dump(data) {
        let text: String = rows.iter().map(|(id, p)| format_dump_line(id, p)).collect();
        let again = parse_profile_dump(&text).unwrap();
        assert_eq!(rows.len(), again.len());
        for ((a, p), (b, q)) in rows.iter().zip(&again) {
            assert_eq!(a, b);
            assert_eq!(p.counts(), q.counts());
        }
    }
});
