use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use infoshot::harness::{
    run_bias_experiment, run_classify_experiment, run_classify_with_banks, run_scaling_experiment,
    run_search_experiment, Experiment, ExperimentConfig, Report,
};
use infoshot::zoo::{ground_state_bank, Family, GroundStateBank};

#[derive(Parser)]
#[command(name = "infoshot", version, about = "Information-optimized single-shot quantum state identification")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Race the three observable-selection strategies on Haar-random candidates.
    Search(Common),
    /// Mean first-shot information gain against register size.
    Scaling(Common),
    /// Mean first-shot information gain against candidate count.
    Bias(Common),
    /// Classify Hamiltonian ground states by family.
    Classify {
        #[command(flatten)]
        common: Common,
        /// Directory of banks written by `gen-bank`; missing banks are computed.
        #[arg(long)]
        banks: Option<PathBuf>,
    },
    /// Compute and save ground-state banks.
    GenBank {
        /// Family to generate; all four when omitted.
        #[arg(long)]
        family: Option<Family>,
        #[arg(long, default_value_t = 8)]
        qubits: usize,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
}

#[derive(Args)]
struct Common {
    /// JSON file with config overrides.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Master seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Register size; for `scaling`, the upper end of the qubit range.
    #[arg(long)]
    qubits: Option<usize>,
    /// Trials (search) or candidate-set repeats per N (bias).
    #[arg(long)]
    trials: Option<usize>,
    /// Standard deviation of Gaussian noise on classification expectations.
    #[arg(long)]
    noise_sigma: Option<f64>,
    /// Output directory; results are only printed when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write SVG plots.
    #[arg(long)]
    svg: bool,
}

impl Common {
    fn resolve(&self, experiment: Experiment) -> Result<ExperimentConfig> {
        let mut cfg = match &self.config {
            Some(path) => ExperimentConfig::load(experiment, path)?,
            None => ExperimentConfig::defaults(experiment),
        };
        if let Some(seed) = self.seed {
            cfg.master_seed = seed;
        }
        if let Some(q) = self.qubits {
            match experiment {
                Experiment::Scaling => cfg.qubit_range[1] = q,
                _ => cfg.n_qubits = q,
            }
        }
        if let Some(t) = self.trials {
            cfg.n_trials = t;
        }
        if let Some(s) = self.noise_sigma {
            cfg.noise_sigma = s;
        }
        if self.out.is_some() {
            cfg.out_dir = self.out.clone();
        }
        cfg.svg |= self.svg;
        cfg.validate()?;
        Ok(cfg)
    }
}

fn median(m: Option<f64>) -> String {
    m.map_or_else(|| "censored".to_string(), |x| x.to_string())
}

fn emit(report: Report<'_>, cfg: &ExperimentConfig) -> Result<()> {
    if let Some(dir) = &cfg.out_dir {
        for path in report.write_to_dir(dir, cfg.svg)? {
            eprintln!("wrote {}", path.display());
        }
    }
    Ok(())
}

fn bank_path(dir: &Path, family: Family, n: usize) -> PathBuf {
    dir.join(format!("{family}_n{n}.bank"))
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Search(common) => {
            let cfg = common.resolve(Experiment::Search)?;
            let r = run_search_experiment(&cfg)?;
            println!("strategy        median_shots  converged  median_final_p");
            for a in &r.arms {
                println!(
                    "{:<15} {:>12}  {:>5}/{:<4} {:.4}",
                    a.label,
                    median(a.median_shots),
                    a.n_converged,
                    a.traces.len(),
                    a.final_median_p_value().unwrap_or(f64::NAN)
                );
            }
            emit(Report::Search(&r), &cfg)
        }
        Command::Scaling(common) => {
            let cfg = common.resolve(Experiment::Scaling)?;
            let r = run_scaling_experiment(&cfg)?;
            println!("n   exact_gain    approx_gain   predicted");
            for p in &r.points {
                println!(
                    "{:<3} {:<13.6e} {:<13.6e} {:.6e}",
                    p.n_qubits, p.mean_exact_gain, p.mean_approx_gain, p.predicted_gain
                );
            }
            println!("slope of log2 gain per qubit: {:.4}", r.slope);
            emit(Report::Scaling(&r), &cfg)
        }
        Command::Bias(common) => {
            let cfg = common.resolve(Experiment::Bias)?;
            let r = run_bias_experiment(&cfg)?;
            println!(
                "plateau gain {:.6e} (analytic {:.6e})",
                r.plateau_gain, r.analytic_plateau_gain
            );
            println!("N   ratio    1-1/N");
            for p in &r.points {
                println!("{:<3} {:.4}   {:.4}", p.n_candidates, p.ratio_to_plateau, p.expected_ratio);
            }
            emit(Report::Bias(&r), &cfg)
        }
        Command::Classify { common, banks } => {
            let cfg = common.resolve(Experiment::Classify)?;
            let r = match banks {
                None => run_classify_experiment(&cfg)?,
                Some(dir) => {
                    let banks = Family::ALL
                        .iter()
                        .map(|&f| {
                            let path = bank_path(&dir, f, cfg.n_qubits);
                            if path.exists() {
                                Ok(GroundStateBank::load(&path)?)
                            } else {
                                Ok(ground_state_bank(f, cfg.n_qubits)?)
                            }
                        })
                        .collect::<Result<Vec<_>>>()?;
                    run_classify_with_banks(&cfg, &banks)?
                }
            };
            println!("arm                median_shots  converged  accuracy  p(chance)");
            for a in &r.arms {
                println!(
                    "{:<18} {:>12}  {:>5}/{:<4} {:<9.3} {:.3e}",
                    a.arm.label,
                    median(a.arm.median_shots),
                    a.arm.n_converged,
                    a.arm.traces.len(),
                    a.accuracy,
                    a.chance_p_value
                );
            }
            emit(Report::Classify(&r), &cfg)
        }
        Command::GenBank { family, qubits, out } => {
            if qubits < 3 {
                bail!("banks need at least 3 qubits, got {qubits}");
            }
            std::fs::create_dir_all(&out).with_context(|| format!("creating {}", out.display()))?;
            let families = family.map_or_else(|| Family::ALL.to_vec(), |f| vec![f]);
            for f in families {
                let bank = ground_state_bank(f, qubits)?;
                let path = bank_path(&out, f, qubits);
                bank.save(&path)?;
                println!("{} ({} states)", path.display(), bank.entries.len());
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
