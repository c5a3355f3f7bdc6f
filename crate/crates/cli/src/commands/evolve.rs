use std::collections::BTreeMap;

use serde::Serialize;
use subwave_core::coupling::build_coupling_matrix;
use subwave_core::dynamics::{evolve_eigen, evolve_ode, EvolutionTrace};
use subwave_core::storage::named_state;
use subwave_core::{decompose_config, ChainConfig, QubitState};

use super::Globals;
use crate::args::{EvolveArgs, Format, Method, StateSpec};
use crate::error::CliError;
use crate::manifest::emit_with_manifest;
use crate::output::{fmt_f64, to_csv, to_json};

/// Largest tolerated amplitude deviation between the two propagators.
pub const METHOD_TOLERANCE: f64 = 1e-5;

/// `samples` evenly spaced points on [0, tmax], both ends included.
pub fn time_grid(tmax: f64, samples: usize) -> Result<Vec<f64>, CliError> {
    if !(tmax.is_finite() && tmax >= 0.0) {
        return Err(CliError::Usage(format!(
            "--tmax must be finite and non-negative, got {tmax}"
        )));
    }
    match samples {
        0 => Err(CliError::Usage("--samples must be at least 1".into())),
        1 => Ok(vec![0.0]),
        _ => Ok((0..samples)
            .map(|i| tmax * i as f64 / (samples - 1) as f64)
            .collect()),
    }
}

pub fn build_state(
    spec: &StateSpec,
    config: &ChainConfig,
    globals: &Globals,
) -> Result<QubitState, CliError> {
    match spec {
        StateSpec::Named(name) => Ok(named_state(*name, config)?),
        StateSpec::Custom(amplitudes) => {
            if amplitudes.len() != config.n() {
                return Err(CliError::Usage(format!(
                    "custom state has {} amplitudes, chain has {}",
                    amplitudes.len(),
                    config.n()
                )));
            }
            let norm = amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            if (norm - 1.0).abs() > 1e-12 {
                globals.note(&format!(
                    "warning: custom state has norm {norm}; normalizing"
                ));
            }
            Ok(QubitState::normalized(amplitudes.clone())?)
        }
    }
}

#[derive(Debug, Serialize)]
struct JsonTrace<'a> {
    t: &'a [f64],
    p_total: &'a [f64],
    p: &'a [Vec<f64>],
}

fn render(trace: &EvolutionTrace, n: usize, format: Format) -> Result<Vec<u8>, CliError> {
    match format {
        Format::Csv => {
            let mut header = vec!["t".to_string(), "p_total".to_string()];
            header.extend((1..=n).map(|j| format!("p_{j}")));
            let rows: Vec<Vec<String>> = trace
                .times
                .iter()
                .enumerate()
                .map(|(i, &t)| {
                    let mut row = vec![fmt_f64(t), fmt_f64(trace.total_probability[i])];
                    row.extend(trace.per_qubit_probability[i].iter().map(|&p| fmt_f64(p)));
                    row
                })
                .collect();
            to_csv(&header, &rows)
        }
        Format::Json => to_json(&JsonTrace {
            t: &trace.times,
            p_total: &trace.total_probability,
            p: &trace.per_qubit_probability,
        }),
    }
}

/// Runs the requested propagator(s). With `Method::Both` the modal result is
/// returned after checking it against RK4.
pub fn compute(
    state: &QubitState,
    config: &ChainConfig,
    times: &[f64],
    method: Method,
    globals: &Globals,
) -> Result<EvolutionTrace, CliError> {
    let ode = || evolve_ode(state, &build_coupling_matrix(config), config, times);
    let eigen = || -> Result<EvolutionTrace, CliError> {
        let decomposition = decompose_config(config)?;
        Ok(evolve_eigen(state, &decomposition, times)?)
    };
    match method {
        Method::Ode => Ok(ode()?),
        Method::Eigen => eigen(),
        Method::Both => {
            let modal = eigen()?;
            let deviation = modal.max_amplitude_deviation(&ode()?);
            globals.note(&format!(
                "max amplitude deviation eigen vs ode: {deviation:.3e}"
            ));
            if deviation > METHOD_TOLERANCE {
                return Err(CliError::MethodMismatch {
                    deviation,
                    tolerance: METHOD_TOLERANCE,
                });
            }
            Ok(modal)
        }
    }
}

pub fn run(args: &EvolveArgs, globals: &Globals) -> Result<(), CliError> {
    let config = args.chain.config()?;
    let times = time_grid(args.tmax, args.samples)?;
    let state = build_state(&args.state, &config, globals)?;
    let trace = compute(&state, &config, &times, args.method, globals)?;
    let format = globals.format.unwrap_or(Format::Csv);
    let bytes = render(&trace, config.n(), format)?;

    let options = BTreeMap::from([
        ("format".to_string(), format!("{format:?}").to_lowercase()),
        (
            "method".to_string(),
            format!("{:?}", args.method).to_lowercase(),
        ),
        ("samples".to_string(), args.samples.to_string()),
        ("state".to_string(), state_label(&args.state)),
        ("tmax".to_string(), args.tmax.to_string()),
    ]);
    emit_with_manifest(
        globals.out.as_deref(),
        &bytes,
        "evolve",
        Some(args.chain.record()),
        options,
    )
}

fn state_label(spec: &StateSpec) -> String {
    use subwave_core::storage::NamedState as N;
    match spec {
        StateSpec::Named(N::Dicke) => "dicke".into(),
        StateSpec::Named(N::Alternating) => "alternating".into(),
        StateSpec::Named(N::SymmetricSubradiant) => "sym-sub".into(),
        StateSpec::Named(N::AntiSymmetricSubradiant) => "antisym-sub".into(),
        StateSpec::Named(N::Single(j)) => format!("single:{j}"),
        StateSpec::Custom(v) => {
            let pairs: Vec<String> = v.iter().map(|z| format!("{}:{}", z.re, z.im)).collect();
            format!("custom:{}", pairs.join(","))
        }
    }
}
