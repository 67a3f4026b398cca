use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use tempfile::tempdir;

use infoshot::analysis::sample_moments;
use infoshot::belief::Strategy;
use infoshot::harness::{
    run_bias_experiment, run_classify_experiment, run_scaling_experiment, run_search_experiment, Experiment,
    ExperimentConfig, Report,
};
use infoshot::kernel::{haar_random_state, pauli_expectation, PauliString};

/// Exact variance of `<P>` for a non-identity Pauli over Haar states in
/// dimension `d`: `<P>` is a difference of two Dirichlet block sums, giving
/// `1 / (d + 1)`.
fn exact_haar_variance(n: usize) -> f64 {
    1.0 / ((1usize << n) as f64 + 1.0)
}

#[test]
fn haar_expectations_have_zero_mean_and_exact_variance() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for (n, word) in [(1, "Y"), (2, "XZ"), (3, "ZIY"), (4, "XXYZ")] {
        let p: PauliString = word.parse().unwrap();
        let values: Vec<f64> = (0..20_000)
            .map(|_| pauli_expectation(&haar_random_state(n, &mut rng).unwrap(), &p).unwrap())
            .collect();
        let s = sample_moments(&values).unwrap();
        let v = exact_haar_variance(n);
        assert!(s.mean_unbiased.abs() < 4.0 * (v / 20_000.0).sqrt(), "{word}: mean {}", s.mean_unbiased);
        assert!((s.var_unbiased / v - 1.0).abs() < 0.05, "{word}: {} vs {v}", s.var_unbiased);
    }
}

#[test]
fn haar_amplitudes_are_uniform_in_magnitude() {
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    let d = 8;
    let mut mean = vec![0.0; d];
    let trials = 20_000;
    for _ in 0..trials {
        let psi = haar_random_state(3, &mut rng).unwrap();
        for (m, a) in mean.iter_mut().zip(psi.amplitudes()) {
            *m += a.norm_sqr() / trials as f64;
        }
    }
    // |a_k|^2 ~ Beta(1, d - 1): mean 1/d, std 0.0077 per sample at d = 8
    for m in mean {
        assert!((m - 1.0 / d as f64).abs() < 0.002, "{m}");
    }
}

fn outputs(report: Report<'_>) -> Vec<(String, Vec<u8>)> {
    let dir = tempdir().unwrap();
    let mut files: Vec<(String, Vec<u8>)> = report
        .write_to_dir(dir.path(), true)
        .unwrap()
        .into_iter()
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), std::fs::read(&p).unwrap()))
        .collect();
    files.sort();
    files
}

fn search_cfg(seed: u64) -> ExperimentConfig {
    ExperimentConfig {
        n_qubits: 4,
        n_candidates: 6,
        n_observables: 8,
        n_trials: 12,
        max_shots: 80,
        master_seed: seed,
        ..ExperimentConfig::defaults(Experiment::Search)
    }
}

#[test]
fn search_output_is_byte_stable() {
    let a = run_search_experiment(&search_cfg(5)).unwrap();
    let b = run_search_experiment(&search_cfg(5)).unwrap();
    let c = run_search_experiment(&search_cfg(6)).unwrap();
    let (fa, fb, fc) = (outputs(Report::Search(&a)), outputs(Report::Search(&b)), outputs(Report::Search(&c)));
    assert_eq!(fa, fb);
    let traces = |f: &[(String, Vec<u8>)]| f.iter().find(|(n, _)| n == "traces.csv").unwrap().1.clone();
    assert_ne!(traces(&fa), traces(&fc));
}

#[test]
fn strategy_subsets_do_not_change_shared_draws() {
    // each strategy has its own shot stream, so dropping one leaves the others intact
    let all = run_search_experiment(&search_cfg(7)).unwrap();
    let only = run_search_experiment(&ExperimentConfig {
        strategies: vec![Strategy::Random],
        ..search_cfg(7)
    })
    .unwrap();
    assert_eq!(all.true_indices, only.true_indices);
    assert_eq!(all.arm("random").unwrap().traces, only.arms[0].traces);
}

#[test]
fn gain_experiments_are_byte_stable() {
    let cfg = ExperimentConfig {
        qubit_range: [2, 4],
        n_candidates: 10,
        n_observables: 10,
        ..ExperimentConfig::defaults(Experiment::Scaling)
    };
    let a = outputs(Report::Scaling(&run_scaling_experiment(&cfg).unwrap()));
    assert_eq!(a, outputs(Report::Scaling(&run_scaling_experiment(&cfg).unwrap())));

    let cfg = ExperimentConfig {
        n_qubits: 3,
        n_observables: 10,
        n_trials: 3,
        candidate_range: [2, 6],
        plateau_states: 100,
        ..ExperimentConfig::defaults(Experiment::Bias)
    };
    let a = outputs(Report::Bias(&run_bias_experiment(&cfg).unwrap()));
    assert_eq!(a, outputs(Report::Bias(&run_bias_experiment(&cfg).unwrap())));
}

#[test]
fn classify_output_is_byte_stable() {
    let cfg = ExperimentConfig {
        n_qubits: 4,
        max_shots: 60,
        ..ExperimentConfig::defaults(Experiment::Classify)
    };
    let a = run_classify_experiment(&cfg).unwrap();
    let fa = outputs(Report::Classify(&a));
    assert_eq!(fa, outputs(Report::Classify(&run_classify_experiment(&cfg).unwrap())));
    let names: Vec<&str> = fa.iter().map(|(n, _)| n.as_str()).collect();
    assert_eq!(names, ["p_values.svg", "predictions.csv", "quantiles.csv", "summary.json", "traces.csv"]);
    let summary: serde_json::Value = serde_json::from_slice(&fa[3].1).unwrap();
    assert_eq!(summary["schema_version"], 1);
    assert_eq!(summary["results"]["split"]["n_test"], 100);
}
