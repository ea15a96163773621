//! Monte Carlo runs of the sharing procedure.
//!
//! Every round, each of the `2m` parties picks `X` or `Y` with probability
//! one half and measures their qubit of a fresh copy of the (possibly
//! attacked) carrier. Rounds in which all parties chose the same basis are
//! kept. Alice's key bit is her result; the Bobs jointly reconstruct it from
//! the product of their results, corrected by the carrier's parity sign for
//! that basis.
//!
//! Each round draws from its own generator stream (`seed`, round index), so
//! transcripts are bit-identical regardless of how rounds are scheduled.

use std::collections::BTreeMap;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::attack::{attacked_state, AttackScenario, TripartiteState};
use crate::error::{QssError, Result};
use crate::qsim::{sample_outcome, stream_rng, Outcome, PauliAxis};
use crate::states::parity_sign;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProtocolConfig {
    pub scenario: AttackScenario,
    pub rounds: usize,
    pub seed: u64,
}

impl ProtocolConfig {
    pub fn new(scenario: AttackScenario, rounds: usize, seed: u64) -> Result<Self> {
        if scenario.m < 2 {
            return Err(QssError::InvalidArgument(format!(
                "the protocol needs m >= 2, got {}",
                scenario.m
            )));
        }
        if rounds == 0 {
            return Err(QssError::InvalidArgument("rounds must be positive".into()));
        }
        Ok(Self {
            scenario,
            rounds,
            seed,
        })
    }

    pub fn m(&self) -> usize {
        self.scenario.m
    }

    pub fn n_parties(&self) -> usize {
        2 * self.scenario.m
    }
}

/// Public basis pattern of a round.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BasisLabel {
    X,
    Y,
    Mixed,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RoundRecord {
    pub round: u64,
    /// One basis per party, Alice first.
    pub bases: Vec<PauliAxis>,
    pub outcomes: Outcome,
    pub sifted: bool,
}

impl RoundRecord {
    pub fn basis_label(&self) -> BasisLabel {
        match self.bases.first() {
            Some(&first) if self.sifted => match first {
                PauliAxis::X => BasisLabel::X,
                _ => BasisLabel::Y,
            },
            _ => BasisLabel::Mixed,
        }
    }

    pub fn alice_outcome(&self) -> i8 {
        self.outcomes.values()[0]
    }

    pub fn bob_outcomes(&self) -> &[i8] {
        &self.outcomes.values()[1..]
    }
}

#[derive(Clone, Debug)]
pub struct ProtocolTranscript {
    pub config: ProtocolConfig,
    pub records: Vec<RoundRecord>,
    pub alice_key: Vec<u8>,
    pub bob_product_key: Vec<u8>,
    pub sift_count: usize,
}

/// `+1 ↦ 0`, `−1 ↦ 1`.
pub fn outcome_bit(outcome: i8) -> u8 {
    if outcome > 0 {
        0
    } else {
        1
    }
}

/// Largest party count whose per-pattern distributions are tabulated.
const TABULATE_MAX_PARTIES: usize = 8;

/// Born distributions of the party outcomes, per basis pattern.
struct RoundSampler<'a> {
    state: &'a TripartiteState,
    parties: Vec<usize>,
    /// Indexed by the pattern bits (bit set = `Y`, first party most
    /// significant), when tabulated.
    table: Option<Vec<Vec<f64>>>,
}

impl<'a> RoundSampler<'a> {
    fn new(state: &'a TripartiteState, n: usize) -> Result<Self> {
        let parties: Vec<usize> = (0..n).collect();
        let table = if n <= TABULATE_MAX_PARTIES {
            Some(
                (0..1usize << n)
                    .map(|pattern| {
                        state
                            .psi()
                            .outcome_distribution(&parties, &pattern_bases(pattern, n))
                    })
                    .collect::<Result<_>>()?,
            )
        } else {
            None
        };
        Ok(Self {
            state,
            parties,
            table,
        })
    }

    fn sample<R: Rng + ?Sized>(&self, bases: &[PauliAxis], rng: &mut R) -> Result<Outcome> {
        let n = self.parties.len();
        match &self.table {
            Some(table) => {
                let pattern = bases
                    .iter()
                    .fold(0usize, |acc, &b| (acc << 1) | usize::from(b == PauliAxis::Y));
                sample_outcome(&table[pattern], n, rng)
            }
            None => {
                let dist = self.state.psi().outcome_distribution(&self.parties, bases)?;
                sample_outcome(&dist, n, rng)
            }
        }
    }
}

fn pattern_bases(pattern: usize, n: usize) -> Vec<PauliAxis> {
    (0..n)
        .map(|j| {
            if (pattern >> (n - 1 - j)) & 1 == 1 {
                PauliAxis::Y
            } else {
                PauliAxis::X
            }
        })
        .collect()
}

fn simulate_round(sampler: &RoundSampler<'_>, config: &ProtocolConfig, round: u64) -> Result<RoundRecord> {
    let mut rng = stream_rng(config.seed, round);
    let n = config.n_parties();
    let bases: Vec<PauliAxis> = (0..n)
        .map(|_| if rng.random::<bool>() { PauliAxis::X } else { PauliAxis::Y })
        .collect();
    let outcomes = sampler.sample(&bases, &mut rng)?;
    let sifted = bases.iter().all(|&b| b == bases[0]);
    Ok(RoundRecord {
        round,
        bases,
        outcomes,
        sifted,
    })
}

/// Key bits `(alice, bobs)` of a sifted round.
fn key_bits(record: &RoundRecord, config: &ProtocolConfig) -> Result<(u8, u8)> {
    let sign = parity_sign(config.scenario.carrier, config.m(), record.bases[0])?;
    let product: i8 = record.bob_outcomes().iter().product();
    Ok((outcome_bit(record.alice_outcome()), outcome_bit(sign * product)))
}

/// Runs the full procedure.
pub fn run_protocol(config: &ProtocolConfig) -> Result<ProtocolTranscript> {
    let state = attacked_state(&config.scenario)?;
    let sampler = RoundSampler::new(&state, config.n_parties())?;
    let records: Vec<RoundRecord> = (0..config.rounds as u64)
        .into_par_iter()
        .map(|round| simulate_round(&sampler, config, round))
        .collect::<Result<_>>()?;
    let mut alice_key = Vec::new();
    let mut bob_product_key = Vec::new();
    for record in records.iter().filter(|r| r.sifted) {
        let (a, b) = key_bits(record, config)?;
        alice_key.push(a);
        bob_product_key.push(b);
    }
    Ok(ProtocolTranscript {
        config: *config,
        sift_count: alice_key.len(),
        records,
        alice_key,
        bob_product_key,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct KeyReconstruction {
    pub alice_bits: Vec<u8>,
    pub bob_bits: Vec<u8>,
    /// Fraction of sifted rounds where the two bits differ.
    pub error_rate: f64,
    pub sifted_x: usize,
    pub errors_x: usize,
    pub sifted_y: usize,
    pub errors_y: usize,
}

impl KeyReconstruction {
    pub fn error_rate_x(&self) -> Option<f64> {
        (self.sifted_x > 0).then(|| self.errors_x as f64 / self.sifted_x as f64)
    }

    pub fn error_rate_y(&self) -> Option<f64> {
        (self.sifted_y > 0).then(|| self.errors_y as f64 / self.sifted_y as f64)
    }
}

/// What all Bobs together recover, compared with Alice's key.
pub fn reconstruct_key(transcript: &ProtocolTranscript) -> Result<KeyReconstruction> {
    let mut out = KeyReconstruction {
        alice_bits: Vec::new(),
        bob_bits: Vec::new(),
        error_rate: 0.0,
        sifted_x: 0,
        errors_x: 0,
        sifted_y: 0,
        errors_y: 0,
    };
    for record in transcript.records.iter().filter(|r| r.sifted) {
        let (a, b) = key_bits(record, &transcript.config)?;
        let wrong = usize::from(a != b);
        match record.basis_label() {
            BasisLabel::X => {
                out.sifted_x += 1;
                out.errors_x += wrong;
            }
            _ => {
                out.sifted_y += 1;
                out.errors_y += wrong;
            }
        }
        out.alice_bits.push(a);
        out.bob_bits.push(b);
    }
    if out.alice_bits.is_empty() {
        return Err(QssError::EmptySiftedSet);
    }
    out.error_rate = (out.errors_x + out.errors_y) as f64 / out.alice_bits.len() as f64;
    Ok(out)
}

/// A plug-in mutual-information estimate with its sample count.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MutualInfoEstimate {
    pub bits: f64,
    pub samples: usize,
    /// First-order (Miller–Madow) upward bias of the plug-in estimate.
    pub miller_madow_bias: f64,
}

/// Plug-in estimate of `I(label : symbol)` from empirical frequencies.
pub fn estimate_mutual_info(samples: &[(u64, u64)]) -> Result<MutualInfoEstimate> {
    if samples.len() < 2 {
        return Err(QssError::InvalidArgument(format!(
            "need at least 2 samples, got {}",
            samples.len()
        )));
    }
    let n = samples.len() as f64;
    let mut joint: BTreeMap<(u64, u64), usize> = BTreeMap::new();
    let mut labels: BTreeMap<u64, usize> = BTreeMap::new();
    let mut symbols: BTreeMap<u64, usize> = BTreeMap::new();
    for &(l, s) in samples {
        *joint.entry((l, s)).or_default() += 1;
        *labels.entry(l).or_default() += 1;
        *symbols.entry(s).or_default() += 1;
    }
    // Σ p(l,s) log2[p(l,s) / (p(l) p(s))], in count form
    let bits: f64 = joint
        .iter()
        .map(|(&(l, s), &c)| {
            let ratio = (c as f64 * n) / (labels[&l] as f64 * symbols[&s] as f64);
            c as f64 / n * ratio.log2()
        })
        .sum();
    let support = joint.len() as f64 - labels.len() as f64 - symbols.len() as f64 + 1.0;
    Ok(MutualInfoEstimate {
        bits: bits.max(0.0),
        samples: samples.len(),
        miller_madow_bias: support.max(0.0) / (2.0 * n * std::f64::consts::LN_2),
    })
}

fn check_coalition(subset: &[usize], n_bobs: usize) -> Result<()> {
    if subset.is_empty() {
        return Err(QssError::InvalidArgument("empty coalition".into()));
    }
    if subset.iter().any(|&b| b >= n_bobs) {
        return Err(QssError::InvalidArgument(format!(
            "coalition {subset:?} names a bob outside 0..{n_bobs}"
        )));
    }
    let mut sorted = subset.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted.len() != subset.len() {
        return Err(QssError::InvalidArgument(format!("repeated bob in {subset:?}")));
    }
    if subset.len() >= n_bobs {
        return Err(QssError::InvalidArgument(
            "a coalition of all bobs is the key reconstruction, not a proper subset".into(),
        ));
    }
    Ok(())
}

/// Estimated information a proper subset of Bobs (0-based among the Bobs)
/// holds about Alice's sifted key bit. The subset sees the public basis and
/// its own results.
pub fn coalition_info(transcript: &ProtocolTranscript, subset: &[usize]) -> Result<MutualInfoEstimate> {
    check_coalition(subset, transcript.config.scenario.n_bobs())?;
    let k = subset.len();
    let samples: Vec<(u64, u64)> = transcript
        .records
        .iter()
        .filter(|r| r.sifted)
        .map(|r| {
            let bobs = r.bob_outcomes();
            let mut symbol = u64::from(r.basis_label() == BasisLabel::Y) << k;
            for (j, &b) in subset.iter().enumerate() {
                symbol |= u64::from(outcome_bit(bobs[b])) << (k - 1 - j);
            }
            (u64::from(outcome_bit(r.alice_outcome())), symbol)
        })
        .collect();
    if samples.is_empty() {
        return Err(QssError::EmptySiftedSet);
    }
    estimate_mutual_info(&samples)
}

/// Exact value of what [`coalition_info`] estimates: the mean over the two
/// sifted bases of `I(A : coalition results)`.
pub fn exact_coalition_info(state: &TripartiteState, subset: &[usize]) -> Result<f64> {
    check_coalition(subset, state.scenario().n_bobs())?;
    let mut qubits = vec![state.alice()];
    qubits.extend(subset.iter().map(|b| b + 1));
    let mut total = 0.0;
    for basis in [PauliAxis::X, PauliAxis::Y] {
        let dist = state
            .psi()
            .outcome_distribution(&qubits, &vec![basis; qubits.len()])?;
        let half = dist.len() / 2;
        let p_a = [dist[..half].iter().sum::<f64>(), dist[half..].iter().sum::<f64>()];
        let p_s: Vec<f64> = (0..half).map(|s| dist[s] + dist[half + s]).collect();
        use crate::attack::shannon_entropy as h;
        total += h(&p_a)? + h(&p_s)? - h(&dist)?;
    }
    Ok(total / 2.0)
}
