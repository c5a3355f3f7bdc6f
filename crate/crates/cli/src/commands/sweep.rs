use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;
use subwave_core::linalg::determinant;
use subwave_core::spectral::check_symmetry_protection;
use subwave_core::{build_coupling_matrix, decompose_config, ChainConfig};

use super::Globals;
use crate::angle::Angle;
use crate::args::{Format, SweepArgs};
use crate::error::CliError;
use crate::manifest::{emit_with_manifest, ConfigRecord};
use crate::output::{fmt_f64, to_csv, to_json};

/// Grid points this close to kπ are evaluated at exactly kπ.
pub const SNAP_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub theta: f64,
    pub min_decay_rate: f64,
    pub max_decay_rate: f64,
    pub det_abs: f64,
    /// Largest decay rate in the protected parity class; absent when θ is
    /// too far from any kπ or the class is empty.
    pub protected_max_rate: Option<f64>,
}

pub fn grid(min: &Angle, max: &Angle, steps: usize) -> Vec<Angle> {
    match steps {
        0 => Vec::new(),
        1 => vec![*min],
        _ => (0..steps)
            .map(|i| min.lerp(max, i as f64 / (steps - 1) as f64))
            .collect(),
    }
}

pub fn evaluate(n: usize, gamma0: f64, theta: &Angle) -> Result<SweepRow, CliError> {
    let config = ChainConfig::new(n, theta.snapped(SNAP_TOL), gamma0)?;
    let decomposition = decompose_config(&config)?;
    let rates = decomposition.modes().iter().map(|m| m.decay_rate);
    let min_decay_rate = rates.clone().fold(f64::INFINITY, f64::min);
    let max_decay_rate = rates.fold(f64::NEG_INFINITY, f64::max);
    let det_abs = determinant(build_coupling_matrix(&config).as_matrix()).norm();
    let protected_max_rate = check_symmetry_protection(&config)
        .ok()
        .and_then(|r| r.max_protected_decay_rate);
    Ok(SweepRow {
        theta: theta.radians(),
        min_decay_rate,
        max_decay_rate,
        det_abs,
        protected_max_rate,
    })
}

/// Evaluates every grid point; with `threads` the points are spread over a
/// dedicated pool. Row order follows the grid either way.
pub fn sweep(
    n: usize,
    gamma0: f64,
    points: &[Angle],
    threads: Option<usize>,
) -> Result<Vec<SweepRow>, CliError> {
    match threads {
        None => points.iter().map(|t| evaluate(n, gamma0, t)).collect(),
        Some(0) => Err(CliError::Usage(
            "--parallel needs at least one thread".into(),
        )),
        Some(k) => {
            let pool = rayon::ThreadPoolBuilder::new().num_threads(k).build()?;
            pool.install(|| points.par_iter().map(|t| evaluate(n, gamma0, t)).collect())
        }
    }
}

pub fn run(args: &SweepArgs, globals: &Globals) -> Result<(), CliError> {
    // Validates n and γ₀ before any work is scheduled.
    ChainConfig::new(args.n, args.theta_min.radians(), args.gamma0)?;
    if args.steps == 0 {
        return Err(CliError::Usage("--steps must be at least 1".into()));
    }
    let points = grid(&args.theta_min, &args.theta_max, args.steps);
    let rows = sweep(args.n, args.gamma0, &points, args.parallel)?;

    let format = globals.format.unwrap_or(Format::Csv);
    let bytes = match format {
        Format::Json => to_json(&rows)?,
        Format::Csv => {
            let header: Vec<String> = [
                "theta",
                "min_decay_rate",
                "max_decay_rate",
                "det_abs",
                "protected_max_rate",
            ]
            .iter()
            .map(|s| s.to_string())
            .collect();
            let table: Vec<Vec<String>> = rows
                .iter()
                .map(|r| {
                    vec![
                        fmt_f64(r.theta),
                        fmt_f64(r.min_decay_rate),
                        fmt_f64(r.max_decay_rate),
                        fmt_f64(r.det_abs),
                        r.protected_max_rate.map(fmt_f64).unwrap_or_default(),
                    ]
                })
                .collect();
            to_csv(&header, &table)?
        }
    };

    let record = ConfigRecord {
        n: args.n,
        theta: args.theta_min.radians(),
        theta_input: args.theta_min.to_string(),
        gamma0: args.gamma0,
    };
    let mut options = BTreeMap::from([
        ("format".to_string(), format!("{format:?}").to_lowercase()),
        ("steps".to_string(), args.steps.to_string()),
        ("theta_max".to_string(), args.theta_max.to_string()),
        ("theta_min".to_string(), args.theta_min.to_string()),
    ]);
    if let Some(k) = args.parallel {
        options.insert("parallel".to_string(), k.to_string());
    }
    emit_with_manifest(
        globals.out.as_deref(),
        &bytes,
        "sweep",
        Some(record),
        options,
    )
}
