use qss_core::attack::{attacked_state, AttackScenario};
use qss_core::protocol::{coalition_info, exact_coalition_info, reconstruct_key, run_protocol, ProtocolConfig};
use qss_core::states::CarrierFamily;

fn run(carrier: CarrierFamily, m: usize, phi: f64, rounds: usize, seed: u64) -> qss_core::protocol::ProtocolTranscript {
    let cfg = ProtocolConfig::new(AttackScenario::new(carrier, m, phi).unwrap(), rounds, seed).unwrap();
    run_protocol(&cfg).unwrap()
}

#[test]
fn each_party_sees_fair_coins_whatever_the_others_choose() {
    let t = run(CarrierFamily::G, 2, 0.0, 40_000, 5);
    for party in 0..4 {
        for other_basis in ['X', 'Y'] {
            let other = (party + 1) % 4;
            let picked: Vec<i8> = t
                .records
                .iter()
                .filter(|r| r.bases[other].symbol() == other_basis)
                .map(|r| r.outcomes.values()[party])
                .collect();
            let n = picked.len() as f64;
            let plus = picked.iter().filter(|&&o| o > 0).count() as f64 / n;
            let sigma = (0.25 / n).sqrt();
            assert!((plus - 0.5).abs() < 5.0 * sigma, "party {party}, other {other_basis}: {plus}");
        }
    }
}

#[test]
fn sift_rate_is_two_to_one_minus_parties() {
    for m in [2, 3] {
        let rounds = 60_000;
        let t = run(CarrierFamily::Ghz, m, 0.0, rounds, 11);
        let p = 2f64.powi(1 - 2 * m as i32);
        let sigma = (p * (1.0 - p) / rounds as f64).sqrt();
        let rate = t.sift_count as f64 / rounds as f64;
        assert!((rate - p).abs() < 5.0 * sigma, "m = {m}: {rate} vs {p}");
        assert_eq!(reconstruct_key(&t).unwrap().error_rate, 0.0);
    }
}

// Exact coalition information at M = 3 and no attack, from an independent
// dense-matrix computation of the outcome distributions.
const G_COALITION_BITS: [(usize, f64); 3] = [(1, 0.081_704_165_945_511_33), (2, 0.125_814_583_693_912_4), (4, 0.221_251_836_004_467_07)];

#[test]
fn exact_coalition_information_values() {
    let g = attacked_state(&AttackScenario::unattacked(CarrierFamily::G, 3).unwrap()).unwrap();
    let ghz = attacked_state(&AttackScenario::unattacked(CarrierFamily::Ghz, 3).unwrap()).unwrap();
    for (size, expected) in G_COALITION_BITS {
        let subset: Vec<usize> = (0..size).collect();
        assert!((exact_coalition_info(&g, &subset).unwrap() - expected).abs() < 1e-9, "size {size}");
        assert!(exact_coalition_info(&ghz, &subset).unwrap().abs() < 1e-12);
    }
}

#[test]
fn coalition_estimates_approach_exact_values() {
    let rounds = 200_000;
    for carrier in [CarrierFamily::G, CarrierFamily::Ghz] {
        let t = run(carrier, 3, 0.0, rounds, 23);
        let state = attacked_state(&t.config.scenario).unwrap();
        for subset in [vec![0], vec![1, 3], vec![0, 1, 2, 4]] {
            let est = coalition_info(&t, &subset).unwrap();
            let exact = exact_coalition_info(&state, &subset).unwrap();
            // plug-in bias is upward and of order the Miller-Madow term; sampling
            // noise at a few thousand sifted rounds is a few hundredths of a bit
            assert!(est.bits >= exact - 0.05, "{carrier} {subset:?}: {} vs {exact}", est.bits);
            assert!(est.bits <= exact + 0.05 + 3.0 * est.miller_madow_bias, "{carrier} {subset:?}: {} vs {exact}", est.bits);
        }
    }
}
