use std::f64::consts::FRAC_PI_4;
use std::path::Path;

use qss_core::attack::{attack_sweep, security_crossing, AttackScenario};
use qss_core::bell::{correlation_tensor, crossover_scan, maximize_plane_sum, MAX_TENSOR_QUBITS};
use qss_core::export::{
    self, bell_report, default_coalitions, protocol_summary, SweepSummary, SCHEMA_VERSION,
};
use qss_core::protocol::{run_protocol as simulate, ProtocolConfig};
use qss_core::qsim::DensityMatrix;
use qss_core::rdm::{g_uniqueness_check_with, MarginalChoice};
use qss_core::states::{add_white_noise, carrier_state, CarrierFamily};

use crate::error::{CliError, CliResult};
use crate::output::Outputs;
use crate::{FrameMode, Marginals};

/// Crossing tolerance reported by the sweep.
const CROSSING_TOL: f64 = 1e-12;
/// Grid points this close to the crossing are not compared by sign.
const CROSSING_GUARD: f64 = 1e-3;
/// Largest register for the Gram analysis.
const MAX_RDM_QUBITS: usize = 12;

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn parse_coalition(text: &str, n_bobs: usize) -> CliResult<Vec<usize>> {
    text.split(',')
        .map(|s| {
            let b: usize = s
                .trim()
                .trim_start_matches(['B', 'b'])
                .parse()
                .map_err(|_| usage(format!("bad Bob number in coalition '{text}'")))?;
            if b == 0 || b > n_bobs {
                return Err(usage(format!("Bob {b} outside 1..={n_bobs}")));
            }
            Ok(b - 1)
        })
        .collect()
}

pub fn run_protocol(
    m: usize,
    rounds: usize,
    phi: f64,
    carrier: CarrierFamily,
    seed: u64,
    coalitions: &[String],
    out: &Path,
) -> CliResult<Outputs> {
    if m < 2 {
        return Err(usage(format!("--m must be at least 2, got {m}")));
    }
    if rounds == 0 {
        return Err(usage("--rounds must be positive"));
    }
    let config = ProtocolConfig::new(AttackScenario::new(carrier, m, phi)?, rounds, seed)?;
    let subsets = if coalitions.is_empty() {
        default_coalitions(m)
    } else {
        coalitions
            .iter()
            .map(|c| parse_coalition(c, 2 * m - 1))
            .collect::<CliResult<_>>()?
    };
    let transcript = simulate(&config)?;
    if transcript.sift_count == 0 {
        return Err(usage(format!(
            "no sifted rounds among {rounds}; increase --rounds"
        )));
    }
    let summary = export::summary_json(&protocol_summary(&transcript, &subsets)?)?;
    let mut outputs = Outputs::default();
    outputs.file(out.join("transcript.jsonl"), export::transcript_jsonl(&transcript)?);
    outputs.file(out.join("summary.json"), summary.clone());
    outputs.print(summary);
    Ok(outputs)
}

pub fn sweep_attack(m: usize, carrier: CarrierFamily, grid: &[f64], out: &Path) -> CliResult<Outputs> {
    if m < 1 {
        return Err(usage("--m must be at least 1"));
    }
    AttackScenario::new(carrier, m, 0.0)?;
    let rows = attack_sweep(carrier, m, grid)?;
    let criterion_disagreements = rows
        .iter()
        .filter(|r| (r.phi - FRAC_PI_4).abs() > CROSSING_GUARD)
        .filter(|r| ((r.horodecki_ab - 1.0) > 0.0) != (r.margin > 0.0))
        .count();
    let summary = export::pretty_json(&SweepSummary {
        schema_version: SCHEMA_VERSION,
        carrier,
        m,
        grid_points: rows.len(),
        crossing_phi: security_crossing(CROSSING_TOL)?,
        crossing_tolerance: CROSSING_TOL,
        criterion_disagreements,
        csv: "sweep.csv".into(),
    })?;
    let mut outputs = Outputs::default();
    outputs.file(out.join("sweep.csv"), export::sweep_csv(&rows)?);
    outputs.file(out.join("summary.json"), summary.clone());
    outputs.print(summary);
    Ok(outputs)
}

fn check_noise(noise: f64) -> CliResult<()> {
    if !(0.0..=1.0).contains(&noise) {
        return Err(usage(format!("--noise must lie in [0, 1], got {noise}")));
    }
    Ok(())
}

fn check_tensor_n(n: usize) -> CliResult<()> {
    if n == 0 || n > MAX_TENSOR_QUBITS {
        return Err(usage(format!("--n must lie in 1..={MAX_TENSOR_QUBITS}, got {n}")));
    }
    Ok(())
}

fn noisy_carrier(family: CarrierFamily, n: usize, noise: f64) -> CliResult<DensityMatrix> {
    Ok(add_white_noise(&carrier_state(family, n)?, noise)?.realized)
}

fn emit(outputs: &mut Outputs, out: Option<&Path>, text: String) {
    match out {
        Some(path) => outputs.file(path, text),
        None => outputs.print(text),
    }
}

pub fn bell(
    family: CarrierFamily,
    n: usize,
    noise: f64,
    frame: FrameMode,
    restarts: usize,
    seed: u64,
    out: Option<&Path>,
) -> CliResult<Outputs> {
    check_tensor_n(n)?;
    check_noise(noise)?;
    if restarts == 0 {
        return Err(usage("--restarts must be positive"));
    }
    let rho = noisy_carrier(family, n, noise)?;
    rho.validate()?;
    let t = correlation_tensor(&rho)?;
    let search = match frame {
        FrameMode::Default => None,
        FrameMode::Search => Some(maximize_plane_sum(&t, restarts, seed)?),
    };
    let report = bell_report(family, noise, &t, search.as_ref().map(|s| (s, seed)))?;
    let mut outputs = Outputs::default();
    emit(&mut outputs, out, export::bell_json(&report)?);
    Ok(outputs)
}

pub fn thresholds(n_min: usize, n_max: usize, out: &Path) -> CliResult<Outputs> {
    if n_min < 4 || n_max < n_min || n_max > 64 {
        return Err(usage(format!(
            "need 4 <= --n-min <= --n-max <= 64, got {n_min}..{n_max}"
        )));
    }
    let rows = crossover_scan(n_min, n_max)?;
    let csv = export::thresholds_csv(&rows)?;
    let summary = export::pretty_json(&export::threshold_summary(&rows, "thresholds.csv")?)?;
    let mut outputs = Outputs::default();
    outputs.file(out.join("thresholds.csv"), csv);
    outputs.file(out.join("summary.json"), summary.clone());
    outputs.print(summary);
    Ok(outputs)
}

pub fn rdm(n: usize, marginals: Marginals, out: Option<&Path>) -> CliResult<Outputs> {
    if !(3..=MAX_RDM_QUBITS).contains(&n) {
        return Err(usage(format!("--n must lie in 3..={MAX_RDM_QUBITS}, got {n}")));
    }
    let choice = match marginals {
        Marginals::FirstLast => MarginalChoice::FirstLast,
        Marginals::All => MarginalChoice::All,
    };
    let solution = g_uniqueness_check_with(n, choice)?;
    let mut outputs = Outputs::default();
    emit(&mut outputs, out, export::gram_json(&solution)?);
    Ok(outputs)
}

pub fn tensor(family: CarrierFamily, n: usize, noise: f64, out: Option<&Path>) -> CliResult<Outputs> {
    check_tensor_n(n)?;
    check_noise(noise)?;
    let t = if noise == 1.0 {
        correlation_tensor(&carrier_state(family, n)?)?
    } else {
        correlation_tensor(&noisy_carrier(family, n, noise)?)?
    };
    let mut outputs = Outputs::default();
    emit(&mut outputs, out, export::tensor_json(&family.to_string(), &t)?);
    Ok(outputs)
}
