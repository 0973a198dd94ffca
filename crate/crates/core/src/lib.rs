//! Alignment-free classification of nucleotide sequences from k-mer profiles.
//!
//! The crate covers FASTA and label input, k-mer counting, generative
//! (multinomial Bayes, Markov chain) and discriminative (one-vs-rest logistic
//! regression and linear SVM) classifiers, and cross-validated evaluation on
//! complete sequences and sampled fragments.

pub mod config;
pub mod error;
pub mod evaluation;
pub mod generative;
pub mod kmer;
pub mod linear;
pub mod model;
pub mod rng;
pub mod seq_io;
pub mod synthetic;

pub use error::{Error, Result};
pub use generative::{MarkovChainModel, MultinomialBayesModel, SmoothingPolicy};
pub use kmer::{build_matrix, build_paired_profile, build_profile, KmerProfile, KmerSpec, PairedProfile, ProfileMatrix};
pub use linear::{Loss, OneVsRestModel, Penalty, PenaltyKind, Stopping};
pub use model::{ClassifierConfig, ModelContainer, Prediction, TrainedModel};
pub use evaluation::{run_grid, ExperimentReport, GridConfig};
pub use seq_io::{LabeledDataset, Sequence};
