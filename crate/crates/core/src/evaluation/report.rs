//! CSV, JSON and SVG renderings of an [`ExperimentReport`], and the
//! best/worst summary per model.

use std::fmt::Write as _;

use serde::Serialize;

use super::grid::ExperimentReport;
use crate::error::{Error, Result};
use crate::model::ClassifierConfig;

pub const FOLD_COLUMNS: [&str; 13] = [
    "model",
    "loss",
    "penalty",
    "alpha",
    "C",
    "lambda",
    "k",
    "fragment_length",
    "fold",
    "weighted_precision",
    "weighted_recall",
    "weighted_f",
    "seed",
];

pub const AGGREGATE_COLUMNS: [&str; 11] = [
    "model",
    "loss",
    "penalty",
    "alpha",
    "C",
    "lambda",
    "k",
    "fragment_length",
    "f_mean",
    "f_std",
    "n_folds",
];

fn opt(x: Option<f64>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

/// `model,loss,penalty,alpha,C,lambda` cells of a configuration.
pub fn config_columns(cfg: &ClassifierConfig) -> [String; 6] {
    let loss = cfg
        .loss()
        .map(|l| match l {
            crate::linear::Loss::Logistic => "logistic",
            crate::linear::Loss::SquaredHinge => "squared_hinge",
        })
        .unwrap_or_default()
        .to_string();
    let alpha = match cfg.alpha() {
        Some(None) => "MLE".to_string(),
        Some(Some(a)) => a.to_string(),
        None => String::new(),
    };
    let lin = cfg.linear();
    [
        cfg.id(),
        loss,
        lin.map(|c| c.penalty.short_name().to_string()).unwrap_or_default(),
        alpha,
        opt(lin.map(|c| c.cost)),
        opt(lin.map(|c| c.lambda)),
    ]
}

fn csv_err(e: csv::Error) -> Error {
    Error::InvalidParameter(format!("CSV output: {e}"))
}

fn finish(w: csv::Writer<Vec<u8>>) -> Result<String> {
    let bytes = w.into_inner().map_err(|e| Error::InvalidParameter(format!("CSV output: {e}")))?;
    Ok(String::from_utf8(bytes).expect("CSV output is UTF-8"))
}

/// One row per fold; failed cells leave the metric columns empty.
pub fn folds_csv(report: &ExperimentReport) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(FOLD_COLUMNS).map_err(csv_err)?;
    for r in &report.records {
        let m = r.metrics.as_ref();
        let mut row = config_columns(&report.models[r.model]).to_vec();
        row.extend([
            r.k.to_string(),
            r.fragment_length.to_string(),
            r.fold.to_string(),
            opt(m.map(|m| m.weighted_precision)),
            opt(m.map(|m| m.weighted_recall)),
            opt(m.map(|m| m.weighted_f)),
            report.meta.grid.seed.to_string(),
        ]);
        w.write_record(&row).map_err(csv_err)?;
    }
    finish(w)
}

pub fn aggregate_csv(report: &ExperimentReport) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(AGGREGATE_COLUMNS).map_err(csv_err)?;
    for a in &report.aggregates {
        let mut row = config_columns(&report.models[a.model]).to_vec();
        row.extend([
            a.k.to_string(),
            a.fragment_length.to_string(),
            opt(a.f_mean),
            opt(a.f_std),
            a.n_folds.to_string(),
        ]);
        w.write_record(&row).map_err(csv_err)?;
    }
    finish(w)
}

pub fn report_json(report: &ExperimentReport) -> Result<String> {
    Ok(serde_json::to_string_pretty(report)?)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Extreme {
    pub f_mean: f64,
    pub f_std: Option<f64>,
    /// Every k whose mean rounds to the same three decimals.
    pub ks: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModelSummary {
    pub model: String,
    pub best: Option<Extreme>,
    pub worst: Option<Extreme>,
}

fn extreme(points: &[(usize, f64, Option<f64>)], best: bool) -> Option<Extreme> {
    let key = |f: f64| (f * 1000.0).round() as i64;
    let target = if best {
        points.iter().map(|p| key(p.1)).max()?
    } else {
        points.iter().map(|p| key(p.1)).min()?
    };
    let hits: Vec<_> = points.iter().filter(|p| key(p.1) == target).collect();
    let first = hits[0];
    Some(Extreme {
        f_mean: first.1,
        f_std: first.2,
        ks: hits.iter().map(|p| p.0).collect(),
    })
}

/// Best and worst mean F over k for every model at one fragment setting.
pub fn summarize(report: &ExperimentReport, fragment_length: usize) -> Vec<ModelSummary> {
    (0..report.models.len())
        .map(|mi| {
            let points: Vec<(usize, f64, Option<f64>)> = report
                .aggregates
                .iter()
                .filter(|a| a.model == mi && a.fragment_length == fragment_length)
                .filter_map(|a| a.f_mean.map(|m| (a.k, m, a.f_std)))
                .collect();
            ModelSummary {
                model: report.models[mi].id(),
                best: extreme(&points, true),
                worst: extreme(&points, false),
            }
        })
        .collect()
}

fn k_list(ks: &[usize]) -> String {
    // compress consecutive runs: 4,5,6,9 -> 4-6,9
    let mut parts = Vec::new();
    let mut i = 0;
    while i < ks.len() {
        let mut j = i;
        while j + 1 < ks.len() && ks[j + 1] == ks[j] + 1 {
            j += 1;
        }
        parts.push(if i == j {
            ks[i].to_string()
        } else {
            format!("{}-{}", ks[i], ks[j])
        });
        i = j + 1;
    }
    parts.join(",")
}

fn fmt_extreme(e: &Option<Extreme>) -> (String, String) {
    match e {
        None => ("n/a".into(), String::new()),
        Some(e) => (
            match e.f_std {
                Some(s) => format!("{:.3} ± {:.3}", e.f_mean, s),
                None => format!("{:.3}", e.f_mean),
            },
            k_list(&e.ks),
        ),
    }
}

/// Plain-text table: model, best F and its k lengths, worst F and its k
/// lengths.
pub fn summary_table(report: &ExperimentReport, fragment_length: usize) -> String {
    let rows: Vec<[String; 5]> = summarize(report, fragment_length)
        .into_iter()
        .map(|s| {
            let (bf, bk) = fmt_extreme(&s.best);
            let (wf, wk) = fmt_extreme(&s.worst);
            [s.model, bf, bk, wf, wk]
        })
        .collect();
    let header = ["Model", "Best F", "k", "Worst F", "k"];
    let mut widths: Vec<usize> = header.iter().map(|h| h.chars().count()).collect();
    for r in &rows {
        for (w, c) in widths.iter_mut().zip(r) {
            *w = (*w).max(c.chars().count());
        }
    }
    let line = |cells: &[&str]| {
        let mut s = String::new();
        for (i, (c, w)) in cells.iter().zip(&widths).enumerate() {
            if i > 0 {
                s.push_str("  ");
            }
            s.push_str(c);
            s.extend(std::iter::repeat_n(' ', w - c.chars().count()));
        }
        s.trim_end().to_string() + "\n"
    };
    let mut out = line(&header);
    for r in &rows {
        out += &line(&r.iter().map(String::as_str).collect::<Vec<_>>());
    }
    out
}

const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf",
];

/// Line chart of mean F against k, one polyline per model with a shaded
/// ±std band.
pub fn render_svg(report: &ExperimentReport, fragment_length: usize) -> String {
    let (w, h) = (720.0, 420.0);
    let (left, right, top, bottom) = (60.0, 200.0, 30.0, 50.0);
    let pw = w - left - right;
    let ph = h - top - bottom;
    let grid = &report.meta.grid;
    let span = (grid.k_max - grid.k_min).max(1) as f64;
    let x = |k: usize| left + (k - grid.k_min) as f64 / span * pw;
    let y = |f: f64| top + (1.0 - f.clamp(0.0, 1.0)) * ph;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}" font-family="sans-serif" font-size="11">"#
    );
    let title = if fragment_length == 0 {
        "complete sequences".to_string()
    } else {
        format!("{fragment_length} bp fragments")
    };
    let _ = writeln!(s, r#"<text x="{left}" y="18" font-size="13">Weighted F-measure, {title}</text>"#);
    let _ = writeln!(
        s,
        r##"<rect x="{left}" y="{top}" width="{pw}" height="{ph}" fill="none" stroke="#444"/>"##
    );
    for i in 0..=5 {
        let f = i as f64 / 5.0;
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="end">{f:.1}</text>"#,
            left - 6.0,
            y(f) + 4.0
        );
    }
    for k in grid.ks() {
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{k}</text>"#,
            x(k),
            top + ph + 16.0
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">k</text>"#,
        left + pw / 2.0,
        h - 10.0
    );

    for (mi, cfg) in report.models.iter().enumerate() {
        let color = PALETTE[mi % PALETTE.len()];
        let pts: Vec<(usize, f64, f64)> = report
            .aggregates
            .iter()
            .filter(|a| a.model == mi && a.fragment_length == fragment_length)
            .filter_map(|a| a.f_mean.map(|m| (a.k, m, a.f_std.unwrap_or(0.0))))
            .collect();
        if pts.is_empty() {
            continue;
        }
        let upper = pts.iter().map(|p| format!("{:.1},{:.1}", x(p.0), y(p.1 + p.2)));
        let lower = pts.iter().rev().map(|p| format!("{:.1},{:.1}", x(p.0), y(p.1 - p.2)));
        let band: Vec<String> = upper.chain(lower).collect();
        let _ = writeln!(
            s,
            r#"<polygon points="{}" fill="{color}" fill-opacity="0.15" stroke="none"/>"#,
            band.join(" ")
        );
        let line: Vec<String> = pts.iter().map(|p| format!("{:.1},{:.1}", x(p.0), y(p.1))).collect();
        let _ = writeln!(
            s,
            r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="1.5"/>"#,
            line.join(" ")
        );
        let ly = top + 12.0 + 16.0 * mi as f64;
        let _ = writeln!(
            s,
            r#"<line x1="{:.1}" y1="{ly:.1}" x2="{:.1}" y2="{ly:.1}" stroke="{color}" stroke-width="2"/><text x="{:.1}" y="{:.1}">{}</text>"#,
            left + pw + 12.0,
            left + pw + 30.0,
            left + pw + 36.0,
            ly + 4.0,
            xml_escape(&cfg.id())
        );
    }
    s.push_str("</svg>\n");
    s
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
