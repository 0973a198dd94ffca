#![no_main]
use kmerlin::kmer::{build_profile_with, Accumulator, DENSE_MAX_K};
use kmerlin::KmerSpec;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Some((&first, residues)) = data.split_first() else {
        return;
    };
    let spec = KmerSpec::new(1 + first as usize % 31).unwrap();
    let Ok(p) = build_profile_with(residues, spec, Accumulator::Sparse) else {
        assert!(residues.len() < spec.k());
        return;
    };
    assert_eq!(p.total() + p.skipped(), (residues.len() + 1 - spec.k()) as u64);
    assert!(p.counts().windows(2).all(|w| w[0].0 < w[1].0));
    if spec.k() <= DENSE_MAX_K {
        let d = build_profile_with(residues, spec, Accumulator::Dense).unwrap();
        assert_eq!(d.counts(), p.counts());
    }
});
