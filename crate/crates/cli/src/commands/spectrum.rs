use std::collections::BTreeMap;

use serde::Serialize;
use subwave_core::{decompose_config, SpectralDecomposition};

use super::Globals;
use crate::args::{Format, SpectrumArgs};
use crate::error::CliError;
use crate::manifest::{emit_with_manifest, ConfigRecord};
use crate::output::{fmt_f64, to_csv, to_json, Complex};

#[derive(Debug, Serialize)]
pub struct SpectrumReport {
    pub config: ConfigRecord,
    pub eigenvector_condition: f64,
    pub modes: Vec<ModeRecord>,
}

#[derive(Debug, Serialize)]
pub struct ModeRecord {
    pub index: usize,
    pub eigenvalue: Complex,
    pub decay_rate: f64,
    pub frequency_shift: f64,
    pub symmetry: &'static str,
    pub eigenvector: Vec<Complex>,
}

pub fn report(record: ConfigRecord, d: &SpectralDecomposition) -> SpectrumReport {
    let modes = d
        .modes()
        .iter()
        .enumerate()
        .map(|(i, m)| ModeRecord {
            index: i + 1,
            eigenvalue: m.eigenvalue.into(),
            decay_rate: m.decay_rate,
            frequency_shift: m.frequency_shift,
            symmetry: m.symmetry.label(),
            eigenvector: m.eigenvector.iter().map(|&z| z.into()).collect(),
        })
        .collect();
    SpectrumReport {
        config: record,
        eigenvector_condition: d.eigenvector_condition(),
        modes,
    }
}

fn csv_table(report: &SpectrumReport) -> (Vec<String>, Vec<Vec<String>>) {
    let n = report.config.n;
    let mut header: Vec<String> = [
        "index",
        "eigenvalue_re",
        "eigenvalue_im",
        "decay_rate",
        "frequency_shift",
        "symmetry",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    for j in 1..=n {
        header.push(format!("v{j}_re"));
        header.push(format!("v{j}_im"));
    }
    let rows = report
        .modes
        .iter()
        .map(|m| {
            let mut row = vec![
                m.index.to_string(),
                fmt_f64(m.eigenvalue.re),
                fmt_f64(m.eigenvalue.im),
                fmt_f64(m.decay_rate),
                fmt_f64(m.frequency_shift),
                m.symmetry.to_string(),
            ];
            for z in &m.eigenvector {
                row.push(fmt_f64(z.re));
                row.push(fmt_f64(z.im));
            }
            row
        })
        .collect();
    (header, rows)
}

pub fn run(args: &SpectrumArgs, globals: &Globals) -> Result<(), CliError> {
    let config = args.chain.config()?;
    let decomposition = decompose_config(&config)?;
    let report = report(args.chain.record(), &decomposition);
    let format = globals.format.unwrap_or(Format::Json);
    let bytes = match format {
        Format::Json => to_json(&report)?,
        Format::Csv => {
            let (header, rows) = csv_table(&report);
            to_csv(&header, &rows)?
        }
    };
    let options = BTreeMap::from([("format".to_string(), format!("{format:?}").to_lowercase())]);
    emit_with_manifest(
        globals.out.as_deref(),
        &bytes,
        "spectrum",
        Some(report.config),
        options,
    )
}
