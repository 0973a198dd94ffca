//! Model names on the command line: families (`MB`, `Markov`, `LR`, `LSVM`)
//! or full ids (`MB_MLE`, `Markov_alpha=1e-2`, `LSVM_L2`).

use kmerlin::model::{LinearConfig, ALPHA_GRID};
use kmerlin::{ClassifierConfig, PenaltyKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Family {
    Mb,
    Markov,
    Lr,
    Lsvm,
}

fn family(s: &str) -> Option<Family> {
    match s.to_ascii_lowercase().as_str() {
        "mb" | "multinomial" | "multinomial_bayes" => Some(Family::Mb),
        "markov" => Some(Family::Markov),
        "lr" | "logistic" | "logistic_regression" => Some(Family::Lr),
        "lsvm" | "svm" | "linear_svm" => Some(Family::Lsvm),
        _ => None,
    }
}

pub fn parse_alpha(s: &str) -> Result<Option<f64>, String> {
    if s.eq_ignore_ascii_case("mle") {
        return Ok(None);
    }
    match s.parse::<f64>() {
        Ok(a) if a > 0.0 && a.is_finite() => Ok(Some(a)),
        _ => Err(format!("invalid alpha {s:?}: expected a positive number or `mle`")),
    }
}

pub fn parse_alphas(s: &str) -> Result<Vec<Option<f64>>, String> {
    s.split(',').map(|a| parse_alpha(a.trim())).collect()
}

fn parse_penalty(s: &str) -> Option<PenaltyKind> {
    match s.to_ascii_lowercase().as_str() {
        "l1" => Some(PenaltyKind::L1),
        "l2" => Some(PenaltyKind::L2),
        _ => None,
    }
}

/// Options shared by every model a name expands to.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub alphas: Option<Vec<Option<f64>>>,
    pub penalties: Option<Vec<PenaltyKind>>,
    pub cost: Option<f64>,
    pub lambda: Option<f64>,
    pub penalize_intercept: bool,
}

fn build(fam: Family, alpha: Option<f64>, penalty: PenaltyKind, o: &Overrides) -> ClassifierConfig {
    let mut lin = LinearConfig::new(penalty);
    if let Some(c) = o.cost {
        lin.cost = c;
    }
    if let Some(l) = o.lambda {
        lin.lambda = l;
    }
    lin.penalize_intercept = o.penalize_intercept;
    match fam {
        Family::Mb => ClassifierConfig::multinomial(alpha),
        Family::Markov => ClassifierConfig::markov(alpha),
        Family::Lr => ClassifierConfig::LogisticRegression(lin),
        Family::Lsvm => ClassifierConfig::LinearSvm(lin),
    }
}

/// Expands one name into configurations. A bare family takes the α or
/// penalty lists from `o`, falling back to the full study grid.
pub fn expand(name: &str, o: &Overrides) -> Result<Vec<ClassifierConfig>, String> {
    let name = name.trim();
    let (fam, tail) = match family(name) {
        Some(f) => (f, None),
        None => {
            let (head, tail) = name.split_once('_').unwrap_or((name, ""));
            let f = family(head).ok_or_else(|| {
                format!("unknown model {name:?}: expected MB, Markov, LR, LSVM or an id such as LSVM_L2")
            })?;
            (f, Some(tail))
        }
    };
    let generative = matches!(fam, Family::Mb | Family::Markov);
    match (generative, tail) {
        (true, None) => {
            let alphas = o
                .alphas
                .clone()
                .unwrap_or_else(|| std::iter::once(None).chain(ALPHA_GRID.iter().map(|&a| Some(a))).collect());
            Ok(alphas.into_iter().map(|a| build(fam, a, PenaltyKind::L2, o)).collect())
        }
        (true, Some(t)) => {
            let a = if t.eq_ignore_ascii_case("mle") {
                None
            } else {
                let v = t
                    .strip_prefix("alpha=")
                    .ok_or_else(|| format!("invalid model id {name:?}: expected _MLE or _alpha=<value>"))?;
                parse_alpha(v)?
            };
            Ok(vec![build(fam, a, PenaltyKind::L2, o)])
        }
        (false, None) => {
            let ps = o.penalties.clone().unwrap_or(vec![PenaltyKind::L1, PenaltyKind::L2]);
            Ok(ps.into_iter().map(|p| build(fam, None, p, o)).collect())
        }
        (false, Some(t)) => {
            let p = parse_penalty(t).ok_or_else(|| format!("invalid model id {name:?}: expected _L1 or _L2"))?;
            Ok(vec![build(fam, None, p, o)])
        }
    }
}

pub fn expand_list(names: &str, o: &Overrides) -> Result<Vec<ClassifierConfig>, String> {
    let mut out: Vec<ClassifierConfig> = Vec::new();
    for n in names.split(',').filter(|n| !n.trim().is_empty()) {
        for c in expand(n, o)? {
            if !out.contains(&c) {
                out.push(c);
            }
        }
    }
    if out.is_empty() {
        return Err("no models selected".into());
    }
    Ok(out)
}
