//! On-disk output. Every file is a pure function of the result value, so a
//! rerun with the same config and seed reproduces it byte for byte.

use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde_json::json;

use super::classify::ClassifyResult;
use super::scaling::{BiasResult, ScalingResult};
use super::search::{Arm, SearchResult};
use crate::error::{Error, Result};

pub const SCHEMA_VERSION: u32 = 1;
pub const TRACE_HEADER: [&str; 6] = ["trial", "shot", "strategy", "observable_index", "outcome", "p_value"];

fn csv_writer<W: Write>(w: W) -> csv::Writer<W> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(w)
}

fn csv_err(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::io("<csv>", io),
        other => Error::Input(format!("csv: {other:?}")),
    }
}

/// One row per shot of every trace: `trial,shot,strategy,observable_index,outcome,p_value`.
/// With no traces only the header is written.
pub fn write_traces<W: Write>(w: W, arms: &[&Arm]) -> Result<()> {
    let mut out = csv_writer(w);
    out.write_record(TRACE_HEADER).map_err(csv_err)?;
    let trials = arms.iter().map(|a| a.traces.len()).max().unwrap_or(0);
    for trial in 0..trials {
        for arm in arms {
            let Some(trace) = arm.traces.get(trial) else { continue };
            for r in &trace.records {
                out.write_record([
                    trial.to_string(),
                    r.shot.to_string(),
                    arm.label.clone(),
                    r.observable.to_string(),
                    r.outcome.to_string(),
                    r.p_value.to_string(),
                ])
                .map_err(csv_err)?;
            }
        }
    }
    out.flush().map_err(|e| Error::io("<csv>", e))
}

/// Median and interquartile p-value per shot index and arm.
pub fn write_quantiles<W: Write>(w: W, arms: &[&Arm]) -> Result<()> {
    let mut out = csv_writer(w);
    out.write_record(["shot", "strategy", "median", "q25", "q75"]).map_err(csv_err)?;
    for arm in arms {
        let s = &arm.series;
        for k in 0..s.len() {
            out.write_record([
                k.to_string(),
                arm.label.clone(),
                s.median[k].to_string(),
                s.q25[k].to_string(),
                s.q75[k].to_string(),
            ])
            .map_err(csv_err)?;
        }
    }
    out.flush().map_err(|e| Error::io("<csv>", e))
}

pub fn write_scaling<W: Write>(w: W, result: &ScalingResult) -> Result<()> {
    let mut out = csv_writer(w);
    out.write_record(["n_qubits", "mean_exact_gain", "mean_approx_gain", "predicted_gain"])
        .map_err(csv_err)?;
    for p in &result.points {
        out.write_record([
            p.n_qubits.to_string(),
            p.mean_exact_gain.to_string(),
            p.mean_approx_gain.to_string(),
            p.predicted_gain.to_string(),
        ])
        .map_err(csv_err)?;
    }
    out.flush().map_err(|e| Error::io("<csv>", e))
}

pub fn write_bias<W: Write>(w: W, result: &BiasResult) -> Result<()> {
    let mut out = csv_writer(w);
    out.write_record(["n_candidates", "mean_exact_gain", "ratio_to_plateau", "expected_ratio"])
        .map_err(csv_err)?;
    for p in &result.points {
        out.write_record([
            p.n_candidates.to_string(),
            p.mean_exact_gain.to_string(),
            p.ratio_to_plateau.to_string(),
            p.expected_ratio.to_string(),
        ])
        .map_err(csv_err)?;
    }
    out.flush().map_err(|e| Error::io("<csv>", e))
}

/// Per test state and arm: true and predicted family, shots, convergence.
pub fn write_predictions<W: Write>(w: W, result: &ClassifyResult) -> Result<()> {
    let mut out = csv_writer(w);
    out.write_record(["test_index", "true_family", "arm", "predicted_family", "shots", "converged"])
        .map_err(csv_err)?;
    for (t, &label) in result.test_labels.iter().enumerate() {
        for a in &result.arms {
            let trace = &a.arm.traces[t];
            out.write_record([
                t.to_string(),
                result.families[label].to_string(),
                a.arm.label.clone(),
                result.families[a.predictions[t]].to_string(),
                trace.records.len().to_string(),
                trace.converged.to_string(),
            ])
            .map_err(csv_err)?;
        }
    }
    out.flush().map_err(|e| Error::io("<csv>", e))
}

fn arm_summary(a: &Arm) -> serde_json::Value {
    json!({
        "label": a.label,
        "median_shots": a.median_shots,
        "converged": a.n_converged,
        "failed": a.n_failed,
        "runs": a.traces.len(),
        "final_median_p_value": a.final_median_p_value(),
    })
}

/// A finished experiment, ready to be written.
pub enum Report<'a> {
    Search(&'a SearchResult),
    Scaling(&'a ScalingResult),
    Bias(&'a BiasResult),
    Classify(&'a ClassifyResult),
}

impl Report<'_> {
    pub fn summary(&self) -> serde_json::Value {
        let (config, results) = match self {
            Report::Search(r) => (
                &r.config,
                json!({
                    "true_indices": r.true_indices,
                    "arms": r.arms.iter().map(arm_summary).collect::<Vec<_>>(),
                }),
            ),
            Report::Scaling(r) => (
                &r.config,
                json!({
                    "slope_log2_gain_per_qubit": r.slope,
                    "points": r.points,
                }),
            ),
            Report::Bias(r) => (
                &r.config,
                json!({
                    "plateau_variance": r.plateau_variance,
                    "plateau_gain": r.plateau_gain,
                    "analytic_plateau_gain": r.analytic_plateau_gain,
                    "points": r.points,
                }),
            ),
            Report::Classify(r) => (
                &r.config,
                json!({
                    "families": r.families,
                    "grids": r.grids,
                    "split": {
                        "train_per_class": r.config.train_per_class,
                        "n_train": r.n_train,
                        "n_test": r.test_labels.len(),
                        "rule": "first train_per_class entries of each grid train, the rest test",
                    },
                    "hamiltonian_observables": r.hamiltonian_observables,
                    "random_observables": r.random_observables,
                    "arms": r.arms.iter().map(|a| {
                        let mut v = arm_summary(&a.arm);
                        v["observable_set"] = json!(a.observable_set);
                        v["sigma"] = json!(a.sigma);
                        v["accuracy"] = json!(a.accuracy);
                        v["correct"] = json!(a.correct);
                        v["chance_p_value"] = json!(a.chance_p_value);
                        v
                    }).collect::<Vec<_>>(),
                }),
            ),
        };
        json!({
            "schema_version": SCHEMA_VERSION,
            "experiment": config.experiment,
            "master_seed": config.master_seed,
            "config": config,
            "results": results,
        })
    }

    fn arms(&self) -> Vec<&Arm> {
        match self {
            Report::Search(r) => r.arms.iter().collect(),
            Report::Classify(r) => r.arms.iter().map(|a| &a.arm).collect(),
            _ => Vec::new(),
        }
    }

    /// Writes every output file into `dir` and returns their paths.
    pub fn write_to_dir(&self, dir: &Path, svg: bool) -> Result<Vec<PathBuf>> {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let mut files: Vec<(&str, Vec<u8>)> = Vec::new();
        let arms = self.arms();
        match self {
            Report::Search(_) | Report::Classify(_) => {
                let mut buf = Vec::new();
                write_traces(&mut buf, &arms)?;
                files.push(("traces.csv", buf));
                let mut buf = Vec::new();
                write_quantiles(&mut buf, &arms)?;
                files.push(("quantiles.csv", buf));
                if let Report::Classify(r) = self {
                    let mut buf = Vec::new();
                    write_predictions(&mut buf, r)?;
                    files.push(("predictions.csv", buf));
                }
                if svg {
                    files.push(("p_values.svg", p_value_svg(&arms).into_bytes()));
                }
            }
            Report::Scaling(r) => {
                let mut buf = Vec::new();
                write_scaling(&mut buf, r)?;
                files.push(("scaling.csv", buf));
                if svg {
                    let series = [
                        ("exact", r.points.iter().map(|p| (p.n_qubits as f64, p.mean_exact_gain.log2())).collect()),
                        ("approx", r.points.iter().map(|p| (p.n_qubits as f64, p.mean_approx_gain.log2())).collect()),
                        ("predicted", r.points.iter().map(|p| (p.n_qubits as f64, p.predicted_gain.log2())).collect()),
                    ];
                    files.push(("scaling.svg", line_svg("qubits", "log2 mean gain", &series).into_bytes()));
                }
            }
            Report::Bias(r) => {
                let mut buf = Vec::new();
                write_bias(&mut buf, r)?;
                files.push(("bias.csv", buf));
                if svg {
                    let series = [
                        ("measured", r.points.iter().map(|p| (p.n_candidates as f64, p.ratio_to_plateau)).collect()),
                        ("1 - 1/N", r.points.iter().map(|p| (p.n_candidates as f64, p.expected_ratio)).collect()),
                    ];
                    files.push(("bias.svg", line_svg("candidates", "gain / plateau", &series).into_bytes()));
                }
            }
        }
        let mut summary = serde_json::to_string_pretty(&self.summary()).expect("summary serializes");
        summary.push('\n');
        files.push(("summary.json", summary.into_bytes()));

        let mut paths = Vec::with_capacity(files.len());
        for (name, bytes) in files {
            let path = dir.join(name);
            fs::write(&path, bytes).map_err(|e| Error::io(&path, e))?;
            paths.push(path);
        }
        Ok(paths)
    }
}

const W: f64 = 640.0;
const H: f64 = 400.0;
const PAD: f64 = 50.0;
const COLORS: [&str; 4] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"];

struct Frame {
    x: (f64, f64),
    y: (f64, f64),
}

impl Frame {
    fn px(&self, x: f64) -> f64 {
        PAD + (x - self.x.0) / (self.x.1 - self.x.0).max(f64::MIN_POSITIVE) * (W - 2.0 * PAD)
    }

    fn py(&self, y: f64) -> f64 {
        H - PAD - (y - self.y.0) / (self.y.1 - self.y.0).max(f64::MIN_POSITIVE) * (H - 2.0 * PAD)
    }
}

fn svg_open(out: &mut String, frame: &Frame, xlabel: &str, ylabel: &str) {
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(out, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let (x0, x1, y0, y1) = (PAD, W - PAD, PAD, H - PAD);
    let _ = writeln!(out, r#"<path d="M{x0} {y0}V{y1}H{x1}" fill="none" stroke="black"/>"#);
    let _ = writeln!(out, r#"<text x="{}" y="{}" text-anchor="middle">{xlabel}</text>"#, W / 2.0, H - 12.0);
    let _ = writeln!(
        out,
        r#"<text x="14" y="{}" text-anchor="middle" transform="rotate(-90 14 {})">{ylabel}</text>"#,
        H / 2.0,
        H / 2.0
    );
    for (v, anchor, x, y) in [
        (frame.x.0, "start", x0, y1 + 16.0),
        (frame.x.1, "end", x1, y1 + 16.0),
    ] {
        let _ = writeln!(out, r#"<text x="{x}" y="{y}" text-anchor="{anchor}">{v:.3}</text>"#);
    }
    for (v, y) in [(frame.y.0, y1), (frame.y.1, y0)] {
        let _ = writeln!(out, r#"<text x="{}" y="{y}" text-anchor="end">{v:.3}</text>"#, x0 - 4.0);
    }
}

fn polyline(frame: &Frame, pts: &[(f64, f64)]) -> String {
    pts.iter()
        .map(|&(x, y)| format!("{:.2},{:.2}", frame.px(x), frame.py(y)))
        .collect::<Vec<_>>()
        .join(" ")
}

fn legend(out: &mut String, i: usize, label: &str) {
    let y = PAD + 16.0 * i as f64;
    let c = COLORS[i % COLORS.len()];
    let _ = writeln!(out, r#"<rect x="{}" y="{}" width="10" height="10" fill="{c}"/>"#, W - PAD - 120.0, y - 9.0);
    let _ = writeln!(out, r#"<text x="{}" y="{y}">{label}</text>"#, W - PAD - 105.0);
}

fn finite_bounds(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values
        .filter(|v| v.is_finite())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
    if lo.is_finite() {
        (lo, hi)
    } else {
        (0.0, 1.0)
    }
}

/// Median p-value (log10 scale) with its interquartile band, one colour per arm.
pub fn p_value_svg(arms: &[&Arm]) -> String {
    let floor = 1e-4_f64;
    let lg = |p: f64| p.max(floor).log10();
    let max_shot = arms.iter().map(|a| a.series.len()).max().unwrap_or(1).saturating_sub(1);
    let frame = Frame {
        x: (0.0, max_shot.max(1) as f64),
        y: (floor.log10(), 0.0),
    };
    let mut out = String::new();
    svg_open(&mut out, &frame, "shots", "log10 p-value");
    for (i, arm) in arms.iter().enumerate() {
        let s = &arm.series;
        let c = COLORS[i % COLORS.len()];
        let upper: Vec<(f64, f64)> = (0..s.len()).map(|k| (k as f64, lg(s.q75[k]))).collect();
        let lower: Vec<(f64, f64)> = (0..s.len()).rev().map(|k| (k as f64, lg(s.q25[k]))).collect();
        let band: Vec<(f64, f64)> = upper.into_iter().chain(lower).collect();
        let _ = writeln!(out, r#"<polygon points="{}" fill="{c}" fill-opacity="0.2" stroke="none"/>"#, polyline(&frame, &band));
        let median: Vec<(f64, f64)> = (0..s.len()).map(|k| (k as f64, lg(s.median[k]))).collect();
        let _ = writeln!(out, r#"<polyline points="{}" fill="none" stroke="{c}" stroke-width="1.5"/>"#, polyline(&frame, &median));
        legend(&mut out, i, &arm.label);
    }
    let y = frame.py(0.01_f64.log10());
    let _ = writeln!(out, r#"<line x1="{PAD}" y1="{y:.2}" x2="{}" y2="{y:.2}" stroke="gray" stroke-dasharray="4 3"/>"#, W - PAD);
    out.push_str("</svg>\n");
    out
}

/// Simple multi-series line chart.
pub fn line_svg(xlabel: &str, ylabel: &str, series: &[(&str, Vec<(f64, f64)>)]) -> String {
    let all = || series.iter().flat_map(|(_, pts)| pts.iter().copied());
    let frame = Frame {
        x: finite_bounds(all().map(|p| p.0)),
        y: finite_bounds(all().map(|p| p.1)),
    };
    let mut out = String::new();
    svg_open(&mut out, &frame, xlabel, ylabel);
    for (i, (label, pts)) in series.iter().enumerate() {
        let c = COLORS[i % COLORS.len()];
        let pts: Vec<(f64, f64)> = pts.iter().copied().filter(|p| p.1.is_finite()).collect();
        let _ = writeln!(out, r#"<polyline points="{}" fill="none" stroke="{c}" stroke-width="1.5"/>"#, polyline(&frame, &pts));
        for &(x, y) in &pts {
            let _ = writeln!(out, r#"<circle cx="{:.2}" cy="{:.2}" r="2.5" fill="{c}"/>"#, frame.px(x), frame.py(y));
        }
        legend(&mut out, i, label);
    }
    out.push_str("</svg>\n");
    out
}
