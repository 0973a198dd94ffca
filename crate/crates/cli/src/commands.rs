use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;

use kmerlin::config::{OutputFormat, RunConfig};
use kmerlin::evaluation::report::{aggregate_csv, folds_csv, render_svg, report_json, summary_table};
use kmerlin::kmer::{build_paired_profile, build_profile, format_dump_line};
use kmerlin::seq_io::{load_labels, parse_fasta, read_fasta_allow_empty, ManifestOptions};
use kmerlin::{run_grid, ClassifierConfig, Error, KmerSpec, LabeledDataset, ModelContainer, PenaltyKind, TrainedModel};

use crate::args::{EvaluateArgs, FormatArg, PenaltyArg, PredictArgs, ProfileArgs, TrainArgs};
use crate::select::{expand, expand_list, parse_alphas, Overrides};

/// Exit status 2 for usage and configuration problems, 1 for everything
/// that goes wrong while running.
#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Runtime(String),
}

impl Failure {
    pub fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Runtime(_) => 1,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Runtime(m) => m,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Io { .. } | Error::InvalidParameter(_) | Error::InvalidK(_) | Error::ClassTooSmallForFolds { .. } => {
                Failure::Usage(e.to_string())
            }
            _ => Failure::Runtime(e.to_string()),
        }
    }
}

fn runtime(e: impl std::fmt::Display) -> Failure {
    Failure::Runtime(e.to_string())
}

type CmdResult = Result<(), Failure>;

fn create(path: &Path) -> Result<BufWriter<fs::File>, Failure> {
    fs::File::create(path)
        .map(BufWriter::new)
        .map_err(|e| Failure::Runtime(format!("{}: {e}", path.display())))
}

fn output(path: Option<&Path>) -> Result<Box<dyn Write>, Failure> {
    Ok(match path {
        Some(p) => Box::new(create(p)?),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn write_file(path: &Path, text: &str) -> CmdResult {
    fs::write(path, text).map_err(|e| Failure::Runtime(format!("{}: {e}", path.display())))
}

fn load_dataset(fasta: &Path, labels: &Path, lenient: bool) -> Result<LabeledDataset, Failure> {
    let seqs = parse_fasta(fasta)?;
    let opts = ManifestOptions {
        strict: !lenient,
        ..Default::default()
    };
    let (ds, warnings) = load_labels(labels, seqs, &opts)?;
    for w in warnings {
        eprintln!("warning: {w}");
    }
    Ok(ds)
}

fn penalty(p: PenaltyArg) -> PenaltyKind {
    match p {
        PenaltyArg::L1 => PenaltyKind::L1,
        PenaltyArg::L2 => PenaltyKind::L2,
    }
}

pub fn profile(args: ProfileArgs) -> CmdResult {
    let spec = KmerSpec::new(args.k as usize)?;
    let seqs = parse_fasta(&args.fasta)?;
    let mut out = output(args.out.as_deref())?;
    for s in &seqs {
        let p = build_profile(s.residues(), spec).map_err(|e| runtime(e.for_item(s.id())))?;
        out.write_all(format_dump_line(s.id(), &p).as_bytes()).map_err(runtime)?;
    }
    out.flush().map_err(runtime)
}

pub fn train(args: TrainArgs) -> CmdResult {
    let spec = KmerSpec::new(args.k as usize)?;
    let o = Overrides {
        alphas: args.alpha.as_deref().map(parse_alphas).transpose().map_err(Failure::Usage)?,
        penalties: args.penalty.map(|p| vec![penalty(p)]),
        cost: Some(args.cost),
        lambda: Some(args.lambda),
        penalize_intercept: args.penalize_intercept,
    };
    let configs = expand(&args.model, &o).map_err(Failure::Usage)?;
    let [config] = configs[..] else {
        let ids: Vec<String> = configs.iter().map(ClassifierConfig::id).collect();
        return Err(Failure::Usage(format!(
            "{:?} selects {} models ({}); pass --alpha or --penalty to pick one",
            args.model,
            ids.len(),
            ids.join(", ")
        )));
    };
    config.validate()?;

    let ds = load_dataset(&args.fasta, &args.labels, args.lenient)?;
    let matrix = kmerlin::build_matrix(&ds, spec, config.needs_paired()).map_err(runtime)?;
    let model = config.fit(&matrix).map_err(runtime)?;
    ModelContainer::new(config, model.clone()).save(&args.out).map_err(runtime)?;

    println!("model: {}", config.id());
    println!("k: {}", spec.k());
    println!("classes: {} ({})", ds.classes().len(), ds.classes().join(", "));
    println!("sequences: {}", ds.len());
    match &model {
        TrainedModel::OneVsRest(m) => {
            println!("features: {}", m.features().len());
            let iters: Vec<String> = m.models().iter().map(|b| b.iterations.to_string()).collect();
            println!("converged={} (iterations per class: {})", m.all_converged(), iters.join(", "));
        }
        TrainedModel::MultinomialBayes(m) => {
            let seen: Vec<String> = (0..m.classes().len()).map(|c| m.density(c).seen_words().to_string()).collect();
            println!("features: {} (seen words per class)", seen.join(", "));
        }
        TrainedModel::Markov(m) => {
            let seen: Vec<String> = (0..m.classes().len())
                .map(|c| m.upper_density(c).seen_words().to_string())
                .collect();
            println!("features: {} (seen words per class)", seen.join(", "));
        }
    }
    println!("saved: {}", args.out.display());
    Ok(())
}

pub fn predict(args: PredictArgs) -> CmdResult {
    let container = ModelContainer::load(&args.model).map_err(|e| match e {
        Error::Io { .. } => Failure::from(e),
        other => runtime(other),
    })?;
    let model = &container.model;
    let spec = model.spec();
    let file = fs::File::open(&args.fasta).map_err(|e| Failure::from(Error::Io {
        path: args.fasta.clone(),
        source: e,
    }))?;
    let seqs = read_fasta_allow_empty(io::BufReader::new(file)).map_err(runtime)?;

    let mut out = output(args.out.as_deref())?;
    let w = |out: &mut Box<dyn Write>, line: String| out.write_all(line.as_bytes()).map_err(runtime);
    if !seqs.is_empty() {
        let mut header = "#id\tpredicted_class".to_string();
        if args.scores {
            for c in model.classes() {
                header.push('\t');
                header.push_str(c);
            }
        }
        w(&mut out, header + "\n")?;
    }
    let (mut failed, mut fallbacks) = (0usize, 0usize);
    for s in &seqs {
        let scored = if model.needs_paired() {
            build_paired_profile(s.residues(), spec).and_then(|p| model.scores(&p.upper, Some(&p.lower)))
        } else {
            build_profile(s.residues(), spec).and_then(|p| model.scores(&p, None))
        };
        match scored {
            Ok(scores) => {
                let p = model.predict_scores(&scores);
                fallbacks += p.fallback as usize;
                let mut line = format!("{}\t{}", s.id(), model.classes()[p.class]);
                if args.scores {
                    for v in &scores {
                        line.push('\t');
                        line.push_str(&v.to_string());
                    }
                }
                w(&mut out, line + "\n")?;
            }
            Err(e) => {
                failed += 1;
                w(&mut out, format!("{}\tNA\n", s.id()))?;
                eprintln!("error: record {:?}: {e}", s.id());
            }
        }
    }
    out.flush().map_err(runtime)?;
    if fallbacks > 0 {
        eprintln!("note: {fallbacks} record(s) scored -inf for every class and fell back to the prior");
    }
    if failed > 0 && !args.lenient {
        return Err(Failure::Runtime(format!("{failed} record(s) could not be scored")));
    }
    Ok(())
}

fn resolve(base: Option<&Path>, p: PathBuf) -> PathBuf {
    match base {
        Some(b) if p.is_relative() => b.join(p),
        _ => p,
    }
}

fn parse_k_range(s: &str) -> Result<(usize, usize), Failure> {
    let bad = || Failure::Usage(format!("invalid --k {s:?}: expected K or KMIN-KMAX"));
    let (a, b) = s.split_once('-').unwrap_or((s, s));
    let a = a.trim().parse().map_err(|_| bad())?;
    let b = b.trim().parse().map_err(|_| bad())?;
    Ok((a, b))
}

/// Builds the run configuration from an optional file and flag overrides.
/// Relative paths in a configuration file are taken relative to the file.
pub fn merge_config(args: &EvaluateArgs) -> Result<RunConfig, Failure> {
    let mut cfg = match &args.config {
        Some(path) => {
            let mut c = RunConfig::load(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
            let base = path.parent();
            c.fasta = resolve(base, c.fasta);
            c.labels = resolve(base, c.labels);
            c.out = resolve(base, c.out);
            c
        }
        None => match (&args.fasta, &args.labels) {
            (Some(f), Some(l)) => RunConfig::new(f, l),
            _ => return Err(Failure::Usage("evaluate needs --config or both --fasta and --labels".into())),
        },
    };
    if let Some(f) = &args.fasta {
        cfg.fasta = f.clone();
    }
    if let Some(l) = &args.labels {
        cfg.labels = l.clone();
    }
    if let Some(t) = &args.task {
        cfg.task = t.clone();
    }
    if let Some(k) = &args.k {
        (cfg.k_min, cfg.k_max) = parse_k_range(k)?;
    }
    let o = Overrides {
        alphas: args.alpha.as_deref().map(parse_alphas).transpose().map_err(Failure::Usage)?,
        penalties: args.penalty.as_ref().map(|ps| ps.iter().map(|&p| penalty(p)).collect()),
        penalize_intercept: args.penalize_intercept,
        ..Default::default()
    };
    if args.model.is_some() || o.alphas.is_some() || o.penalties.is_some() || o.penalize_intercept {
        let names = args.model.as_deref().unwrap_or("MB,Markov,LR,LSVM");
        cfg.models = expand_list(names, &o).map_err(Failure::Usage)?;
    }
    if let Some(n) = args.folds {
        cfg.n_folds = n;
    }
    if let Some(l) = &args.fragment_lengths {
        cfg.fragment_lengths = l.clone();
    }
    if let Some(m) = args.max_per_class {
        cfg.max_per_class = m;
    }
    if let Some(s) = args.seed {
        cfg.seed = s;
    }
    if let Some(o) = &args.out {
        cfg.out = o.clone();
    }
    if let Some(f) = &args.format {
        cfg.formats = f
            .iter()
            .map(|f| match f {
                FormatArg::Csv => OutputFormat::Csv,
                FormatArg::Json => OutputFormat::Json,
                FormatArg::Svg => OutputFormat::Svg,
            })
            .collect();
    }
    if args.workers.is_some() {
        cfg.workers = args.workers;
    }
    cfg.lenient |= args.lenient;
    cfg.validate()?;
    Ok(cfg)
}

#[derive(Serialize)]
struct RunMeta<'a> {
    version: &'a str,
    task: &'a str,
    seed: u64,
    config_digest: String,
    dataset_digest: String,
    n_sequences: usize,
    classes: &'a [String],
    class_sizes: Vec<usize>,
}

fn setting_name(len: usize) -> String {
    if len == 0 {
        "complete".into()
    } else {
        format!("{len}bp")
    }
}

pub fn evaluate(args: EvaluateArgs) -> CmdResult {
    let cfg = merge_config(&args)?;
    let ds = load_dataset(&cfg.fasta, &cfg.labels, cfg.lenient)?;
    let grid = cfg.to_grid();
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = cfg.workers {
        pool = pool.num_threads(n);
    }
    let pool = pool.build().map_err(runtime)?;
    let report = pool.install(|| run_grid(&ds, &grid))?;

    fs::create_dir_all(&cfg.out).map_err(|e| Failure::Runtime(format!("{}: {e}", cfg.out.display())))?;
    let meta = RunMeta {
        version: env!("CARGO_PKG_VERSION"),
        task: &cfg.task,
        seed: cfg.seed,
        config_digest: cfg.digest(),
        dataset_digest: ds.digest(),
        n_sequences: ds.len(),
        classes: ds.classes(),
        class_sizes: ds.class_sizes(),
    };
    let meta_json = serde_json::to_string_pretty(&meta).map_err(runtime)? + "\n";
    write_file(&cfg.out.join("run_meta.json"), &meta_json)?;
    for f in &cfg.formats {
        match f {
            OutputFormat::Csv => {
                write_file(&cfg.out.join("folds.csv"), &folds_csv(&report).map_err(runtime)?)?;
                write_file(&cfg.out.join("aggregate.csv"), &aggregate_csv(&report).map_err(runtime)?)?;
            }
            OutputFormat::Json => write_file(&cfg.out.join("report.json"), &report_json(&report).map_err(runtime)?)?,
            OutputFormat::Svg => {
                for &len in &cfg.fragment_lengths {
                    let path = cfg.out.join(format!("f_vs_k_{}.svg", setting_name(len)));
                    write_file(&path, &render_svg(&report, len))?;
                }
            }
        }
    }

    for &len in &cfg.fragment_lengths {
        let what = if len == 0 {
            "complete sequences".to_string()
        } else {
            format!("{len} bp fragments")
        };
        println!("{}: {what}", cfg.task);
        print!("{}", summary_table(&report, len));
        println!();
    }
    let errors = report.records.iter().filter(|r| r.error.is_some()).count();
    if errors > 0 {
        eprintln!("warning: {errors} fold cell(s) failed; see report.json for details");
    }
    println!("results written to {}", cfg.out.display());
    Ok(())
}
