use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use kmerlin::seq_io::write_fasta;
use kmerlin::synthetic::{generate, SyntheticConfig};
use kmerlin::LabeledDataset;

fn kmerlin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kmerlin")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn write_dataset(dir: &Path, ds: &LabeledDataset) -> (PathBuf, PathBuf) {
    let fa = dir.join("data.fa");
    let tsv = dir.join("labels.tsv");
    let mut buf = Vec::new();
    write_fasta(&mut buf, ds.sequences(), 70).unwrap();
    fs::write(&fa, buf).unwrap();
    let manifest: String = ds
        .sequences()
        .iter()
        .zip(ds.labels())
        .map(|(s, &l)| format!("{}\t{}\n", s.id(), ds.classes()[l]))
        .collect();
    fs::write(&tsv, manifest).unwrap();
    (fa, tsv)
}

fn toy(per_class: usize, n_classes: usize) -> LabeledDataset {
    generate(&SyntheticConfig {
        n_classes,
        per_class,
        length: 300,
        substitution_rate: 0.02,
        ..Default::default()
    })
    .unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn profile_one_record() {
    let dir = tempfile::tempdir().unwrap();
    let fa = dir.path().join("one.fa");
    fs::write(&fa, ">seq1 demo\nACGTTGCA\n").unwrap();
    let o = kmerlin(&["profile", "--fasta", s(&fa), "--k", "2"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(stdout(&o), "seq1\t2\t1:1,4:1,6:1,9:1,11:1,14:1,15:1\n");
}

#[test]
fn profile_usage_errors() {
    let o = kmerlin(&["profile", "--fasta", "/nonexistent/x.fa", "--k", "2"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("/nonexistent/x.fa"));
    let o = kmerlin(&["profile", "--fasta", "x.fa", "--k", "0"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn train_then_predict_reproduces_labels() {
    let dir = tempfile::tempdir().unwrap();
    let ds = toy(4, 2);
    let (fa, tsv) = write_dataset(dir.path(), &ds);
    let model = dir.path().join("mb.json");
    let o = kmerlin(&[
        "train", "--fasta", s(&fa), "--labels", s(&tsv), "--k", "4", "--model", "MB", "--alpha", "1", "--out", s(&model),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).contains("model: MB_alpha=1"));

    let run = || kmerlin(&["predict", "--model", s(&model), "--fasta", s(&fa), "--scores"]);
    let first = run();
    assert!(first.status.success(), "{}", stderr(&first));
    assert_eq!(stdout(&first), stdout(&run()));
    let out = stdout(&first);
    let lines: Vec<&str> = out.lines().skip(1).collect();
    assert_eq!(lines.len(), ds.len());
    for (line, (seq, &label)) in lines.iter().zip(ds.sequences().iter().zip(ds.labels())) {
        let cols: Vec<&str> = line.split('\t').collect();
        assert_eq!(cols[0], seq.id());
        assert_eq!(cols[1], ds.classes()[label]);
        assert_eq!(cols.len(), 2 + ds.classes().len());
    }
}

#[test]
fn train_single_class_fails() {
    let dir = tempfile::tempdir().unwrap();
    let fa = dir.path().join("x.fa");
    let tsv = dir.path().join("x.tsv");
    fs::write(&fa, ">a\nACGTACGTAC\n>b\nACGTTTGTAC\n").unwrap();
    fs::write(&tsv, "a\tone\nb\tone\n").unwrap();
    let o = kmerlin(&[
        "train", "--fasta", s(&fa), "--labels", s(&tsv), "--k", "3", "--model", "LR_L1", "--out",
        s(&dir.path().join("m.json")),
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("requires ≥ 2 classes"), "{}", stderr(&o));
}

#[test]
fn train_svm_reports_convergence() {
    let dir = tempfile::tempdir().unwrap();
    let (fa, tsv) = write_dataset(dir.path(), &toy(4, 3));
    let o = kmerlin(&[
        "train", "--fasta", s(&fa), "--labels", s(&tsv), "--k", "3", "--model", "LSVM_L2", "--out",
        s(&dir.path().join("svm.json")),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).contains("converged=true"), "{}", stdout(&o));
}

#[test]
fn train_ambiguous_family_is_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let (fa, tsv) = write_dataset(dir.path(), &toy(3, 2));
    let o = kmerlin(&[
        "train", "--fasta", s(&fa), "--labels", s(&tsv), "--k", "3", "--model", "Markov", "--out",
        s(&dir.path().join("m.json")),
    ]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn predict_edge_cases() {
    let dir = tempfile::tempdir().unwrap();
    let (fa, tsv) = write_dataset(dir.path(), &toy(3, 2));
    let model = dir.path().join("m.json");
    let o = kmerlin(&[
        "train", "--fasta", s(&fa), "--labels", s(&tsv), "--k", "5", "--model", "Markov_alpha=1e-2", "--out", s(&model),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));

    let empty = dir.path().join("empty.fa");
    fs::write(&empty, "").unwrap();
    let o = kmerlin(&["predict", "--model", s(&model), "--fasta", s(&empty)]);
    assert!(o.status.success());
    assert!(o.stdout.is_empty());

    let short = dir.path().join("short.fa");
    fs::write(&short, ">ok\nACGTACGTACGT\n>tiny\nACG\n").unwrap();
    let o = kmerlin(&["predict", "--model", s(&model), "--fasta", s(&short)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("tiny\tNA"));
    assert!(stderr(&o).contains("tiny"));
    let o = kmerlin(&["predict", "--model", s(&model), "--fasta", s(&short), "--lenient"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).lines().any(|l| l.starts_with("ok\t")));
}

#[test]
fn evaluate_toy_config() {
    let dir = tempfile::tempdir().unwrap();
    let (fa, tsv) = write_dataset(dir.path(), &toy(5, 2));
    let cfg = dir.path().join("run.json");
    fs::write(
        &cfg,
        r#"{"fasta": "data.fa", "labels": "labels.tsv", "k_min": 4, "k_max": 5,
            "models": [{"family": "multinomial_bayes", "alpha": 1.0}, {"family": "linear_svm", "penalty": "l2"}],
            "fragment_lengths": [0], "formats": ["csv", "json", "svg"], "out": "out1"}"#,
    )
    .unwrap();
    let o = kmerlin(&["evaluate", "--config", s(&cfg)]);
    assert!(o.status.success(), "{}", stderr(&o));
    let out1 = dir.path().join("out1");
    let agg = fs::read_to_string(out1.join("aggregate.csv")).unwrap();
    let rows: Vec<&str> = agg.lines().collect();
    assert_eq!(rows[0], "model,loss,penalty,alpha,C,lambda,k,fragment_length,f_mean,f_std,n_folds");
    assert_eq!(rows.len(), 5);
    let folds = fs::read_to_string(out1.join("folds.csv")).unwrap();
    assert!(folds.starts_with(
        "model,loss,penalty,alpha,C,lambda,k,fragment_length,fold,weighted_precision,weighted_recall,weighted_f,seed\n"
    ));
    assert_eq!(folds.lines().count(), 1 + 2 * 2 * 5);
    assert!(out1.join("report.json").exists());
    assert!(fs::read_to_string(out1.join("f_vs_k_complete.svg")).unwrap().contains("<polyline"));
    let meta: serde_json::Value = serde_json::from_str(&fs::read_to_string(out1.join("run_meta.json")).unwrap()).unwrap();
    for key in ["config_digest", "dataset_digest", "seed", "version"] {
        assert!(meta.get(key).is_some(), "{key}");
    }
    assert!(stdout(&o).contains("MB_alpha=1"));

    // flags override the file; same digests give identical aggregates
    let out2 = dir.path().join("out2");
    let o = kmerlin(&["evaluate", "--config", s(&cfg), "--out", s(&out2), "--workers", "1", "--format", "csv"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(agg, fs::read_to_string(out2.join("aggregate.csv")).unwrap());
    assert!(!out2.join("report.json").exists());

    let out3 = dir.path().join("out3");
    let o = kmerlin(&[
        "evaluate", "--fasta", s(&fa), "--labels", s(&tsv), "--k", "3", "--model", "LR", "--penalty", "l1",
        "--fragment-lengths", "0,50", "--max-per-class", "5", "--out", s(&out3),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(fs::read_to_string(out3.join("aggregate.csv")).unwrap().lines().count(), 3);
}

#[test]
fn evaluate_too_many_folds_hints() {
    let dir = tempfile::tempdir().unwrap();
    let ds = generate(&SyntheticConfig {
        n_classes: 2,
        per_class: 4,
        length: 200,
        ..Default::default()
    })
    .unwrap();
    let (fa, tsv) = write_dataset(dir.path(), &ds);
    let o = kmerlin(&[
        "evaluate", "--fasta", s(&fa), "--labels", s(&tsv), "--k", "4", "--model", "MB_MLE", "--folds", "5",
        "--fragment-lengths", "0", "--out", s(&dir.path().join("o")),
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("use 4 folds"), "{}", stderr(&o));
}

#[test]
fn evaluate_without_inputs_is_usage_error() {
    let o = kmerlin(&["evaluate", "--k", "4"]);
    assert_eq!(o.status.code(), Some(2));
}
