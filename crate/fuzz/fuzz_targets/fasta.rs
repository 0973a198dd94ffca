#![no_main]
use kmerlin::seq_io::{parse_fasta_bytes, write_fasta};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(seqs) = parse_fasta_bytes(data) {
        let mut out = Vec::new();
        write_fasta(&mut out, &seqs, 60).unwrap();
        assert_eq!(parse_fasta_bytes(&out).unwrap(), seqs);
    }
});
