//! Built-in invariant suite. Every randomized check draws from its own
//! ChaCha8 stream, so a fixed seed reproduces the report byte for byte.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use subwave_core::coupling::{determinant_closed_form, lu_closed_form, nearest_multiple_of_pi};
use subwave_core::dynamics::{evolve_eigen, evolve_ode, QubitState};
use subwave_core::linalg::determinant;
use subwave_core::spectral::{perturbative_superradiant, subspace_dimensions};
use subwave_core::storage::{compare_strategies, named_state, superradiant_overlap, NamedState};
use subwave_core::{
    build_coupling_matrix, build_mirror_matrix, decompose_config, ChainConfig, Symmetry, C64,
};

use super::Globals;
use crate::args::{Format, VerifyArgs};
use crate::error::CliError;
use crate::manifest::emit_with_manifest;
use crate::output::{fmt_f64, to_csv, to_json};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    /// Worst observed value of the check's residual; a check passes when
    /// this is strictly below `tolerance`.
    pub worst_residual: f64,
    pub tolerance: f64,
    pub cases: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub seed: u64,
    pub n_max: usize,
    pub trials: usize,
    pub checks: Vec<CheckResult>,
    pub all_passed: bool,
}

#[derive(Debug, Clone, Copy)]
pub struct VerifyOptions {
    pub n_max: usize,
    pub trials: usize,
    pub seed: u64,
}

type Outcome = subwave_core::Result<(f64, usize)>;

struct Tally {
    worst: f64,
    cases: usize,
}

impl Tally {
    fn new() -> Self {
        Self {
            worst: f64::NEG_INFINITY,
            cases: 0,
        }
    }

    fn push(&mut self, residual: f64) {
        // NaN must count as a failure.
        self.worst = if residual.is_nan() {
            f64::INFINITY
        } else {
            self.worst.max(residual)
        };
        self.cases += 1;
    }

    fn done(self) -> Outcome {
        Ok((if self.cases == 0 { 0.0 } else { self.worst }, self.cases))
    }
}

fn cfg(n: usize, theta: f64) -> subwave_core::Result<ChainConfig> {
    ChainConfig::new(n, theta, 1.0)
}

fn random_theta(rng: &mut ChaCha8Rng, margin: f64) -> f64 {
    loop {
        let theta = rng.random_range(0.0..2.0 * PI);
        if nearest_multiple_of_pi(theta).1.abs() > margin {
            return theta;
        }
    }
}

fn random_parity_state(
    rng: &mut ChaCha8Rng,
    n: usize,
    parity: f64,
) -> subwave_core::Result<QubitState> {
    let p = build_mirror_matrix(n);
    loop {
        let raw: Vec<C64> = (0..n)
            .map(|_| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect();
        let projected = p.project(&raw, parity);
        if projected.iter().map(|z| z.norm_sqr()).sum::<f64>() > 1e-3 {
            return QubitState::normalized(projected);
        }
    }
}

fn stream(seed: u64, id: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(id);
    rng
}

fn determinant_identity(o: &VerifyOptions) -> Outcome {
    let mut rng = stream(o.seed, 1);
    let mut t = Tally::new();
    for n in 1..=o.n_max {
        for _ in 0..o.trials {
            let config = cfg(n, random_theta(&mut rng, 0.01))?;
            let exact = determinant_closed_form(&config);
            let numeric = determinant(build_coupling_matrix(&config).as_matrix());
            t.push((numeric - exact).norm() / exact.norm());
        }
    }
    t.done()
}

fn lu_reconstruction(o: &VerifyOptions) -> Outcome {
    let mut rng = stream(o.seed, 2);
    let mut t = Tally::new();
    for n in 1..=o.n_max {
        for _ in 0..o.trials {
            let config = cfg(n, random_theta(&mut rng, 0.01))?;
            let (l, u) = lu_closed_form(&config);
            t.push(
                l.matmul(&u)
                    .max_abs_diff(build_coupling_matrix(&config).as_matrix()),
            );
        }
    }
    t.done()
}

fn commutation(o: &VerifyOptions) -> Outcome {
    let mut rng = stream(o.seed, 3);
    let mut t = Tally::new();
    for n in 1..=o.n_max {
        let p = build_mirror_matrix(n).to_dense();
        for _ in 0..o.trials {
            let j = build_coupling_matrix(&cfg(n, rng.random_range(0.0..2.0 * PI))?);
            t.push(
                j.as_matrix()
                    .matmul(&p)
                    .max_abs_diff(&p.matmul(j.as_matrix())),
            );
        }
    }
    t.done()
}

/// Residual is the number of miscounted modes.
fn subspace_dimension_counts(o: &VerifyOptions) -> Outcome {
    let mut rng = stream(o.seed, 4);
    let mut t = Tally::new();
    for n in 2..=o.n_max {
        for _ in 0..o.trials {
            let d = decompose_config(&cfg(n, random_theta(&mut rng, 0.05))?)?;
            let (s, a, _) = d.symmetry_counts();
            let (es, ea) = subspace_dimensions(n);
            t.push((s.abs_diff(es) + a.abs_diff(ea)) as f64);
        }
    }
    t.done()
}

fn symmetry_preservation(o: &VerifyOptions) -> Outcome {
    let mut rng = stream(o.seed, 5);
    let mut t = Tally::new();
    let times: Vec<f64> = (0..100).map(|i| 10.0 * i as f64 / 99.0).collect();
    for n in 2..=o.n_max.min(8) {
        let p = build_mirror_matrix(n);
        for _ in 0..o.trials.min(10) {
            for parity in [1.0, -1.0] {
                let config = cfg(n, random_theta(&mut rng, 0.05))?;
                let state = random_parity_state(&mut rng, n, parity)?;
                let j = build_coupling_matrix(&config);
                let traces = [
                    evolve_ode(&state, &j, &config, &times)?,
                    evolve_eigen(&state, &decompose_config(&config)?, &times)?,
                ];
                for trace in &traces {
                    for amps in &trace.amplitudes {
                        let mirrored = p.apply(amps);
                        let defect = mirrored
                            .iter()
                            .zip(amps)
                            .map(|(m, a)| (m - a * parity).norm_sqr())
                            .sum::<f64>()
                            .sqrt();
                        t.push(defect);
                    }
                }
            }
        }
    }
    t.done()
}

fn three_qubit_modes(delta: f64) -> subwave_core::Result<(C64, C64, C64)> {
    let d = decompose_config(&cfg(3, 2.0 * PI + delta)?)?;
    let sup = d.superradiant().eigenvalue;
    let rest = &d.modes()[1..];
    let pick = |s: Symmetry| rest.iter().find(|m| m.symmetry == s).map(|m| m.eigenvalue);
    let missing = || subwave_core::Error::NoSuchState("three-qubit subradiant mode".into());
    Ok((
        sup,
        pick(Symmetry::Symmetric).ok_or_else(missing)?,
        pick(Symmetry::AntiSymmetric).ok_or_else(missing)?,
    ))
}

/// Residual is the error divided by its bound (5δ³ or 5δ²).
fn three_qubit_decay_expansions() -> Outcome {
    let mut t = Tally::new();
    for delta in [1e-2, 1e-3] {
        let (sup, plus, minus) = three_qubit_modes(delta)?;
        let i = C64::new(0.0, 1.0);
        let plus_expected = -i * (2.0 / 3.0) * delta + 2.0 / 27.0 * delta * delta;
        let minus_expected = -i * 2.0 * delta + 2.0 * delta * delta;
        t.push((plus - plus_expected).norm() / (5.0 * delta.powi(3)));
        t.push((minus - minus_expected).norm() / (5.0 * delta.powi(3)));
        t.push((sup.re - 3.0).abs() / (5.0 * delta * delta));
    }
    t.done()
}

fn symmetric_subradiant_overlap() -> Outcome {
    let delta = 0.01;
    let d = decompose_config(&cfg(3, 2.0 * PI + delta)?)?;
    let state = QubitState::normalized([1.0, -2.0, 1.0].map(|x| C64::new(x, 0.0)).to_vec())?;
    let expected = 2.0 * delta / (9.0 * 2f64.sqrt());
    Ok((
        (superradiant_overlap(&state, &d)? / expected - 1.0).abs(),
        1,
    ))
}

fn antisymmetric_overlap() -> Outcome {
    let d = decompose_config(&cfg(3, 2.0 * PI + 0.01)?)?;
    let state = QubitState::normalized([1.0, 0.0, -1.0].map(|x| C64::new(x, 0.0)).to_vec())?;
    Ok((superradiant_overlap(&state, &d)?, 1))
}

fn subradiant_rate_ratio() -> Outcome {
    let (_, plus, minus) = three_qubit_modes(0.02)?;
    Ok(((minus.re / plus.re / 27.0 - 1.0).abs(), 1))
}

/// Residual is |ratio − 27|; the accepted window is [20, 34].
fn storage_time_ratio() -> Outcome {
    let report = compare_strategies(&cfg(3, 2.0 * PI)?, (-1f64).exp(), 0.1 * PI)?;
    Ok(((report.storage_time_ratio() - 27.0).abs(), 1))
}

/// Residual is the largest ordering violation at t = 5 (negative when the
/// ordering holds with margin), including the 0.9 floor for sym-sub.
fn storage_ordering() -> Outcome {
    let config = cfg(3, 2.1 * PI)?;
    let d = decompose_config(&config)?;
    let mut p = Vec::new();
    for name in [
        NamedState::SymmetricSubradiant,
        NamedState::AntiSymmetricSubradiant,
        NamedState::Single(1),
        NamedState::Dicke,
    ] {
        let trace = evolve_eigen(&named_state(name, &config)?, &d, &[5.0])?;
        p.push(trace.total_probability[0]);
    }
    let worst = p.windows(2).map(|w| w[1] - w[0]).fold(0.9 - p[0], f64::max);
    Ok((worst, p.len()))
}

fn perturbative_convergence(o: &VerifyOptions) -> Outcome {
    let deltas = [0.04, 0.02, 0.01];
    let mut t = Tally::new();
    for n in 2..=o.n_max.min(6) {
        for k in [2i64, 3] {
            let mut errors = Vec::new();
            for delta in deltas {
                let config = cfg(n, k as f64 * PI + delta)?;
                let exact = decompose_config(&config)?.superradiant().eigenvalue;
                errors.push((exact - perturbative_superradiant(&config)?.eigenvalue).norm());
            }
            t.push((loglog_slope(&deltas, &errors) - 2.0).abs());
        }
    }
    t.done()
}

fn loglog_slope(x: &[f64], y: &[f64]) -> f64 {
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let mx = lx.iter().sum::<f64>() / lx.len() as f64;
    let my = ly.iter().sum::<f64>() / ly.len() as f64;
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx).powi(2)).sum();
    sxy / sxx
}

fn bound_state_at_singular_point() -> Outcome {
    let config = cfg(3, PI)?;
    let d = decompose_config(&config)?;
    let j = build_coupling_matrix(&config);
    let times: Vec<f64> = (0..=200).map(|i| 20.0 * i as f64 / 200.0).collect();
    let mut t = Tally::new();
    for mode in d.modes().iter().filter(|m| m.eigenvalue.norm() < 1e-10) {
        let trace = evolve_ode(
            &QubitState::normalized(mode.eigenvector.clone())?,
            &j,
            &config,
            &times,
        )?;
        let floor = trace
            .total_probability
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min);
        t.push(1.0 - floor);
    }
    if t.cases == 0 {
        return Err(subwave_core::Error::NoSuchState(
            "no null mode at θ = π".into(),
        ));
    }
    t.done()
}

fn oracle_equivalence(o: &VerifyOptions) -> Outcome {
    let mut rng = stream(o.seed, 10);
    let mut t = Tally::new();
    let times: Vec<f64> = (0..=200).map(|i| 10.0 * i as f64 / 200.0).collect();
    let n_top = o.n_max.min(6);
    for _ in 0..o.trials.min(20) {
        let n = rng.random_range(1..=n_top);
        let config = cfg(n, random_theta(&mut rng, 0.01))?;
        let raw: Vec<C64> = (0..n)
            .map(|_| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect();
        let state = QubitState::normalized(raw)?;
        let modal = evolve_eigen(&state, &decompose_config(&config)?, &times)?;
        let ode = evolve_ode(&state, &build_coupling_matrix(&config), &config, &times)?;
        t.push(modal.max_amplitude_deviation(&ode));
    }
    t.done()
}

fn finish(name: &str, tolerance: f64, outcome: Outcome) -> CheckResult {
    let (worst_residual, cases) = outcome.unwrap_or((f64::INFINITY, 0));
    CheckResult {
        name: name.to_string(),
        passed: worst_residual < tolerance,
        worst_residual,
        tolerance,
        cases,
    }
}

pub fn run_checks(o: &VerifyOptions) -> VerifyReport {
    let checks = vec![
        finish("determinant_identity", 1e-8, determinant_identity(o)),
        finish("lu_reconstruction", 1e-10, lu_reconstruction(o)),
        finish("mirror_commutation", 1e-12, commutation(o)),
        finish("subspace_dimensions", 0.5, subspace_dimension_counts(o)),
        finish("symmetry_preservation", 1e-8, symmetry_preservation(o)),
        finish(
            "three_qubit_decay_expansions",
            1.0,
            three_qubit_decay_expansions(),
        ),
        finish(
            "symmetric_subradiant_overlap",
            0.1,
            symmetric_subradiant_overlap(),
        ),
        finish("antisymmetric_overlap", 1e-10, antisymmetric_overlap()),
        finish("subradiant_rate_ratio", 0.15, subradiant_rate_ratio()),
        finish("storage_time_ratio", 7.0, storage_time_ratio()),
        finish("storage_ordering", 0.0, storage_ordering()),
        finish("eigen_ode_equivalence", 1e-6, oracle_equivalence(o)),
        finish("perturbative_convergence", 0.1, perturbative_convergence(o)),
        finish(
            "bound_state_at_singular_point",
            1e-6,
            bound_state_at_singular_point(),
        ),
    ];
    VerifyReport {
        seed: o.seed,
        n_max: o.n_max,
        trials: o.trials,
        all_passed: checks.iter().all(|c| c.passed),
        checks,
    }
}

pub fn run(args: &VerifyArgs, globals: &Globals) -> Result<(), CliError> {
    if args.n_max == 0 {
        return Err(CliError::Usage("--n-max must be at least 1".into()));
    }
    let options = VerifyOptions {
        n_max: args.n_max,
        trials: args.trials,
        seed: args.seed,
    };
    let report = run_checks(&options);
    for c in &report.checks {
        let mark = if c.passed { "ok  " } else { "FAIL" };
        globals.note(&format!(
            "{mark} {:<32} worst {:.3e} (tol {:.0e}, {} cases)",
            c.name, c.worst_residual, c.tolerance, c.cases
        ));
    }

    let format = globals.format.unwrap_or(Format::Json);
    let bytes = match format {
        Format::Json => to_json(&report)?,
        Format::Csv => {
            let header: Vec<String> = ["name", "passed", "worst_residual", "tolerance", "cases"]
                .iter()
                .map(|s| s.to_string())
                .collect();
            let rows: Vec<Vec<String>> = report
                .checks
                .iter()
                .map(|c| {
                    vec![
                        c.name.clone(),
                        c.passed.to_string(),
                        fmt_f64(c.worst_residual),
                        fmt_f64(c.tolerance),
                        c.cases.to_string(),
                    ]
                })
                .collect();
            to_csv(&header, &rows)?
        }
    };
    let manifest_options = BTreeMap::from([
        ("format".to_string(), format!("{format:?}").to_lowercase()),
        ("n_max".to_string(), args.n_max.to_string()),
        ("seed".to_string(), args.seed.to_string()),
        ("trials".to_string(), args.trials.to_string()),
    ]);
    emit_with_manifest(
        globals.out.as_deref(),
        &bytes,
        "verify",
        None,
        manifest_options,
    )?;

    if report.all_passed {
        Ok(())
    } else {
        Err(CliError::VerificationFailed {
            failed: report
                .checks
                .iter()
                .filter(|c| !c.passed)
                .map(|c| c.name.clone())
                .collect(),
        })
    }
}
