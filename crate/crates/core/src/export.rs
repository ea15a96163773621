//! Machine-readable documents: JSON lines, JSON and CSV.
//!
//! Every JSON document carries `schema_version`. Floats are written in the
//! shortest form that parses back to the same `f64`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::attack::{attacked_state, SweepRow};
use crate::bell::{
    crit_noise_g, crit_noise_ghz, g6_any_frame_threshold, lr_sufficiency_thresholds,
    CorrelationTensor, FrameSearch, ThresholdReport, ZbVerdict,
};
use crate::error::{QssError, Result};
use crate::protocol::{
    coalition_info, exact_coalition_info, reconstruct_key, ProtocolTranscript,
};
use crate::rdm::GramSolution;
use crate::states::CarrierFamily;

pub const SCHEMA_VERSION: u32 = 1;

fn to_json<T: Serialize>(value: &T) -> Result<String> {
    serde_json::to_string_pretty(value)
        .map(|mut s| {
            s.push('\n');
            s
        })
        .map_err(|e| QssError::InternalInconsistency(format!("serialization failed: {e}")))
}

#[derive(Serialize, Deserialize)]
pub struct TranscriptLine {
    pub round: u64,
    pub bases: String,
    pub outcomes: Vec<i8>,
    pub sifted: bool,
}

/// One JSON object per round, newline-terminated.
pub fn transcript_jsonl(t: &ProtocolTranscript) -> Result<String> {
    let mut out = String::new();
    for r in &t.records {
        let line = TranscriptLine {
            round: r.round,
            bases: r.bases.iter().map(|b| b.symbol()).collect(),
            outcomes: r.outcomes.values().to_vec(),
            sifted: r.sifted,
        };
        out.push_str(
            &serde_json::to_string(&line)
                .map_err(|e| QssError::InternalInconsistency(e.to_string()))?,
        );
        out.push('\n');
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoalitionEntry {
    /// 1-based Bob numbers.
    pub bobs: Vec<usize>,
    pub bits: f64,
    pub samples: usize,
    pub miller_madow_bias: f64,
    /// Value from the exact outcome distribution.
    pub exact_bits: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProtocolSummary {
    pub schema_version: u32,
    pub carrier: CarrierFamily,
    pub m: usize,
    pub n_parties: usize,
    pub phi: f64,
    pub rounds: usize,
    pub seed: u64,
    pub sift_count: usize,
    pub sift_rate: f64,
    pub error_rate: f64,
    pub error_rate_x: Option<f64>,
    pub error_rate_y: Option<f64>,
    /// Keyed by the Bob numbers joined with `+`.
    pub coalition_info: BTreeMap<String, CoalitionEntry>,
}

/// The nested coalitions `{B1}`, `{B1,B2}`, … up to all Bobs but one, as
/// 0-based Bob indices.
pub fn default_coalitions(m: usize) -> Vec<Vec<usize>> {
    let bobs = 2 * m - 1;
    (1..bobs).map(|k| (0..k).collect()).collect()
}

pub fn protocol_summary(t: &ProtocolTranscript, coalitions: &[Vec<usize>]) -> Result<ProtocolSummary> {
    let key = reconstruct_key(t)?;
    let state = attacked_state(&t.config.scenario)?;
    let mut table = BTreeMap::new();
    for subset in coalitions {
        let est = coalition_info(t, subset)?;
        let bobs: Vec<usize> = subset.iter().map(|b| b + 1).collect();
        let name = bobs.iter().map(|b| format!("B{b}")).collect::<Vec<_>>().join("+");
        table.insert(
            name,
            CoalitionEntry {
                bobs,
                bits: est.bits,
                samples: est.samples,
                miller_madow_bias: est.miller_madow_bias,
                exact_bits: exact_coalition_info(&state, subset)?,
            },
        );
    }
    Ok(ProtocolSummary {
        schema_version: SCHEMA_VERSION,
        carrier: t.config.scenario.carrier,
        m: t.config.m(),
        n_parties: t.config.n_parties(),
        phi: t.config.scenario.phi,
        rounds: t.config.rounds,
        seed: t.config.seed,
        sift_count: t.sift_count,
        sift_rate: t.sift_count as f64 / t.config.rounds as f64,
        error_rate: key.error_rate,
        error_rate_x: key.error_rate_x(),
        error_rate_y: key.error_rate_y(),
        coalition_info: table,
    })
}

pub fn summary_json(s: &ProtocolSummary) -> Result<String> {
    to_json(s)
}

fn csv_string<T: Serialize>(rows: &[T]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r)
            .map_err(|e| QssError::InternalInconsistency(format!("csv: {e}")))?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| QssError::InternalInconsistency(format!("csv: {e}")))?;
    String::from_utf8(bytes).map_err(|e| QssError::InternalInconsistency(e.to_string()))
}

/// Columns `phi,i_ab,i_ae,margin,qber,horodecki_ab,horodecki_ae`.
pub fn sweep_csv(rows: &[SweepRow]) -> Result<String> {
    csv_string(rows)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepSummary {
    pub schema_version: u32,
    pub carrier: CarrierFamily,
    pub m: usize,
    pub grid_points: usize,
    pub crossing_phi: f64,
    pub crossing_tolerance: f64,
    /// Grid points where the sign of `horodecki_ab − 1` differs from the
    /// sign of `margin`.
    pub criterion_disagreements: usize,
    pub csv: String,
}

/// Columns `n,p_crit_g,q_crit_ghz,g_more_robust`.
pub fn thresholds_csv(rows: &[ThresholdReport]) -> Result<String> {
    csv_string(rows)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThresholdSummary {
    pub schema_version: u32,
    pub n_min: usize,
    pub n_max: usize,
    /// Smallest scanned `n` from which the G family stays more robust.
    pub crossover_n: Option<usize>,
    pub csv: String,
}

pub fn threshold_summary(rows: &[ThresholdReport], csv: &str) -> Result<ThresholdSummary> {
    let (first, last) = match (rows.first(), rows.last()) {
        (Some(f), Some(l)) => (f.n, l.n),
        _ => return Err(QssError::InvalidArgument("empty threshold scan".into())),
    };
    let crossover_n = rows
        .iter()
        .rposition(|r| !r.g_more_robust)
        .map_or(Some(first), |i| rows.get(i + 1).map(|r| r.n));
    Ok(ThresholdSummary {
        schema_version: SCHEMA_VERSION,
        n_min: first,
        n_max: last,
        crossover_n,
        csv: csv.to_string(),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TensorDocument {
    pub schema_version: u32,
    pub state: String,
    pub n: usize,
    pub ordering: String,
    pub entries: Vec<f64>,
}

pub fn tensor_json(state: &str, t: &CorrelationTensor) -> Result<String> {
    to_json(&TensorDocument {
        schema_version: SCHEMA_VERSION,
        state: state.to_string(),
        n: t.n(),
        ordering: "xyz-row-major".into(),
        entries: t.entries().to_vec(),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BellThresholds {
    /// Largest G_6 visibility certified local by the fixed-frame sum.
    pub g6_fixed_frame: f64,
    /// Same for G_6 in every frame, from the full sum.
    pub g6_any_frame: f64,
    /// Largest GHZ_6 visibility certified local by the fixed-frame sum.
    pub ghz6_fixed_frame: f64,
    /// Critical visibilities for this `n`; absent below four parties.
    pub p_crit_g: Option<f64>,
    pub q_crit_ghz: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchReport {
    pub value: f64,
    pub restarts: usize,
    pub best_restart: usize,
    pub seed: u64,
    pub planes: Vec<[[f64; 3]; 2]>,
    pub verdict: ZbVerdict,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BellReport {
    pub schema_version: u32,
    pub state: CarrierFamily,
    pub n: usize,
    pub noise: f64,
    pub plane_sum: f64,
    pub full_sum: f64,
    /// Reading of the fixed-frame sum.
    pub verdict: ZbVerdict,
    /// `full_sum ≤ 1` bounds the plane sum in every frame.
    pub every_frame_certified: bool,
    pub thresholds: BellThresholds,
    pub search: Option<SearchReport>,
}

pub fn bell_report(
    state: CarrierFamily,
    noise: f64,
    t: &CorrelationTensor,
    search: Option<(&FrameSearch, u64)>,
) -> Result<BellReport> {
    let (g6_fixed_frame, ghz6_fixed_frame) = lr_sufficiency_thresholds()?;
    let n = t.n();
    let plane_sum = t.plane_sum(None)?;
    let full_sum = t.full_sum();
    Ok(BellReport {
        schema_version: SCHEMA_VERSION,
        state,
        n,
        noise,
        plane_sum,
        full_sum,
        verdict: ZbVerdict::from_sum(plane_sum),
        every_frame_certified: full_sum <= 1.0,
        thresholds: BellThresholds {
            g6_fixed_frame,
            g6_any_frame: g6_any_frame_threshold()?,
            ghz6_fixed_frame,
            p_crit_g: crit_noise_g(n).ok(),
            q_crit_ghz: crit_noise_ghz(n).ok(),
        },
        search: search.map(|(s, seed)| SearchReport {
            value: s.value,
            restarts: s.restarts,
            best_restart: s.best_restart,
            seed,
            planes: s.frame.planes().to_vec(),
            verdict: ZbVerdict::from_sum(s.value),
        }),
    })
}

pub fn bell_json(r: &BellReport) -> Result<String> {
    to_json(r)
}

#[derive(Serialize)]
struct GramDocument<'a> {
    schema_version: u32,
    #[serde(flatten)]
    solution: &'a GramSolution,
}

pub fn gram_json(s: &GramSolution) -> Result<String> {
    to_json(&GramDocument {
        schema_version: SCHEMA_VERSION,
        solution: s,
    })
}

pub fn pretty_json<T: Serialize>(value: &T) -> Result<String> {
    to_json(value)
}
