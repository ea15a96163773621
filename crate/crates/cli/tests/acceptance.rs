//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
//! criterion fails.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use qss_core::attack::{
    attacked_state, mutual_info_ab, mutual_info_ae, security_crossing, AttackScenario, CollapsePattern,
};
use qss_core::bell::{
    collapse_visibility, correlation_tensor, crossover_scan, g6_any_frame_threshold, horodecki_m,
    lr_sufficiency_thresholds, projected_werner_fit,
};
use qss_core::protocol::{coalition_info, exact_coalition_info, reconstruct_key, run_protocol, ProtocolConfig};
use qss_core::qsim::{PauliAxis, PauliString, PureState, QuantumState, C64};
use qss_core::rdm::{g_uniqueness_check, ghz_counterexample_check};
use qss_core::states::{add_white_noise, g_state, parity_sign, CarrierFamily};

type Check = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within_time(start: Instant, limit: Duration) -> Result<Duration, String> {
    let t = start.elapsed();
    ensure(t < limit, || format!("took {t:.2?}, limit {limit:.0?}"))?;
    Ok(t)
}

fn phi_grid() -> Vec<f64> {
    (0..21).map(|i| FRAC_PI_2 * i as f64 / 20.0).collect()
}

fn e<T: std::fmt::Debug>(x: T) -> String {
    format!("{x:?}")
}

fn criterion_1() -> Check {
    let start = Instant::now();
    let mut worst = 0.0f64;
    for m in 1..=4usize {
        let n = 2 * m;
        let g = g_state(n).map_err(e)?;
        let x = g.expectation(&PauliString::uniform(PauliAxis::X, n)).map_err(e)?;
        let y = g.expectation(&PauliString::uniform(PauliAxis::Y, n)).map_err(e)?;
        let y_expected = if m % 2 == 1 { 1.0 } else { -1.0 };
        worst = worst.max((x - 1.0).abs()).max((y - y_expected).abs());
        ensure((x - 1.0).abs() < 1e-10, || format!("N={n}: <X^N> = {x}"))?;
        ensure((y - y_expected).abs() < 1e-10, || format!("N={n}: <Y^N> = {y}"))?;
    }
    for n in [3usize, 5, 7] {
        let y = g_state(n).map_err(e)?.expectation(&PauliString::uniform(PauliAxis::Y, n)).map_err(e)?;
        worst = worst.max(y.abs());
        ensure(y.abs() < 1e-10, || format!("N={n}: <Y^N> = {y}"))?;
    }
    let t = within_time(start, Duration::from_secs(1))?;
    Ok(format!("max deviation {worst:.1e}, {t:.2?}"))
}

fn criterion_2() -> Check {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let plus = PureState::new(1, vec![C64::new(h, 0.0), C64::new(h, 0.0)]).map_err(e)?;
    let minus = PureState::new(1, vec![C64::new(h, 0.0), C64::new(-h, 0.0)]).map_err(e)?;
    let power = |s: &PureState| -> Result<PureState, String> {
        let mut acc = s.clone();
        for _ in 1..4 {
            acc = acc.tensor(s).map_err(e)?;
        }
        Ok(acc)
    };
    let (p4, m4) = (power(&plus)?, power(&minus)?);
    let amps: Vec<C64> = p4
        .amplitudes()
        .iter()
        .zip(m4.amplitudes())
        .map(|(a, b)| (a - b) * h)
        .collect();
    let target = PureState::new(4, amps).map_err(e)?;
    let d = g_state(4).map_err(e)?.distance_up_to_phase(&target).map_err(e)?;
    ensure(d < 1e-10, || format!("distance {d:.3e}"))?;
    Ok(format!("distance after phase alignment {d:.1e}"))
}

fn criterion_3() -> Check {
    let phi_star = security_crossing(1e-12).map_err(e)?;
    ensure((phi_star - FRAC_PI_4).abs() < 1e-6, || format!("crossing at {phi_star}"))?;
    let mut worst = 0.0f64;
    for carrier in [CarrierFamily::G, CarrierFamily::Ghz] {
        for m in [2, 3] {
            for phi in phi_grid() {
                let exact = attacked_state(&AttackScenario::new(carrier, m, phi).map_err(e)?)
                    .map_err(e)?
                    .exact_mutual_info_ab()
                    .map_err(e)?;
                let analytic = mutual_info_ab(phi).map_err(e)?;
                worst = worst.max((exact - analytic).abs());
                ensure((exact - analytic).abs() < 1e-9, || {
                    format!("{carrier} M={m} phi={phi}: exact {exact} vs analytic {analytic}")
                })?;
            }
        }
    }
    Ok(format!(
        "crossing {phi_star:.12} (|Δ| {:.1e}); max |I_exact − I_analytic| {worst:.1e}",
        (phi_star - FRAC_PI_4).abs()
    ))
}

fn criterion_4() -> Check {
    let mut compared = 0;
    for carrier in [CarrierFamily::G, CarrierFamily::Ghz] {
        for m in [2, 3] {
            for phi in phi_grid() {
                if (phi - FRAC_PI_4).abs() <= 1e-3 {
                    continue;
                }
                let state = attacked_state(&AttackScenario::new(carrier, m, phi).map_err(e)?).map_err(e)?;
                let m_ab = horodecki_m(&state.coalition_collapse(0, CollapsePattern::AllPlus).map_err(e)?).map_err(e)?;
                let m_ae = horodecki_m(&state.rho_ae().map_err(e)?).map_err(e)?;
                let margin = mutual_info_ab(phi).map_err(e)? - mutual_info_ae(phi).map_err(e)?;
                let s = margin.signum();
                ensure((m_ab - 1.0).signum() == s && (m_ae - 1.0).signum() == -s, || {
                    format!("{carrier} M={m} phi={phi}: M_AB={m_ab}, M_AE={m_ae}, margin={margin}")
                })?;
                compared += 1;
            }
        }
    }
    Ok(format!("{compared} grid points agree in sign"))
}

fn criterion_5() -> Check {
    let start = Instant::now();
    let rounds = 100_000;
    let honest = ProtocolConfig::new(AttackScenario::unattacked(CarrierFamily::G, 3).map_err(e)?, rounds, 0)
        .map_err(e)?;
    let t = run_protocol(&honest).map_err(e)?;
    let mut failures = Vec::new();

    let violations = t
        .records
        .iter()
        .filter(|r| r.sifted)
        .filter(|r| {
            let sign = parity_sign(CarrierFamily::G, 3, r.bases[0]).expect("x or y basis");
            r.outcomes.parity() != sign
        })
        .count();
    if violations > 0 {
        failures.push(format!("{violations} sifted rounds break parity"));
    }

    let p = 2f64.powi(-5);
    let sigma = (p * (1.0 - p) / rounds as f64).sqrt();
    let rate = t.sift_count as f64 / rounds as f64;
    if (rate - p).abs() > 5.0 * sigma {
        failures.push(format!("sift rate {rate} vs {p} (5σ = {:.2e})", 5.0 * sigma));
    }

    let state = attacked_state(&honest.scenario).map_err(e)?;
    let mut coalition = Vec::new();
    for subset in [vec![0], vec![0, 1], vec![0, 1, 2, 3]] {
        let est = coalition_info(&t, &subset).map_err(e)?;
        let exact = exact_coalition_info(&state, &subset).map_err(e)?;
        coalition.push(format!("{}:{:.4}(exact {:.4})", subset.len(), est.bits, exact));
        if est.bits > 0.02 {
            failures.push(format!(
                "coalition of {} Bobs: estimate {:.4} bits > 0.02 (exact {:.4})",
                subset.len(),
                est.bits,
                exact
            ));
        }
    }

    let attacked = ProtocolConfig::new(AttackScenario::new(CarrierFamily::G, 3, FRAC_PI_4).map_err(e)?, rounds, 0)
        .map_err(e)?;
    let key = reconstruct_key(&run_protocol(&attacked).map_err(e)?).map_err(e)?;
    let q_expected = (1.0 - FRAC_PI_4.cos()) / 2.0;
    let q = key.error_rate_x().ok_or("no sifted x rounds")?;
    let q_sigma = (q_expected * (1.0 - q_expected) / key.sifted_x as f64).sqrt();
    if (q - q_expected).abs() > 5.0 * q_sigma {
        failures.push(format!("QBER {q} vs {q_expected} (5σ = {:.3})", 5.0 * q_sigma));
    }
    let elapsed = start.elapsed();
    if elapsed > Duration::from_secs(60) {
        failures.push(format!("took {elapsed:.1?}"));
    }
    let detail = format!(
        "parity violations {violations}, sift rate {rate:.5}, coalition bits [{}], QBER {q:.4}, {elapsed:.2?}",
        coalition.join(", ")
    );
    if failures.is_empty() {
        Ok(detail)
    } else {
        Err(format!("{}; {detail}", failures.join("; ")))
    }
}

/// Value of a G_6 entry from the displayed expansion, by axis counts.
fn displayed_g6_entry(nx: usize, ny: usize, nz: usize) -> f64 {
    let third = 1.0 / 3.0;
    match (nx, ny, nz) {
        (6, 0, 0) | (0, 6, 0) => 1.0,
        (0, 0, 6) => -1.0,
        (2, 0, 4) | (0, 2, 4) | (2, 2, 2) => third,
        (4, 0, 2) | (0, 4, 2) | (2, 4, 0) | (4, 2, 0) => -third,
        _ => 0.0,
    }
}

fn criterion_6() -> Check {
    let t = correlation_tensor(&g_state(6).map_err(e)?).map_err(e)?;
    let full = t.full_sum();
    ensure((full - 23.0).abs() < 1e-9, || format!("full_sum(G_6) = {full}"))?;
    for p in [0.25, 0.5, 1.0] {
        let rho = add_white_noise(&g_state(6).map_err(e)?, p).map_err(e)?.realized;
        let s = correlation_tensor(&rho).map_err(e)?.plane_sum(None).map_err(e)?;
        ensure((s - 16.0 * p * p / 3.0).abs() < 1e-9, || format!("plane_sum at p={p}: {s}"))?;
    }
    let mut nonzero = 0;
    for (i, &v) in t.entries().iter().enumerate() {
        let mut counts = [0usize; 3];
        let mut rest = i;
        for _ in 0..6 {
            counts[rest % 3] += 1;
            rest /= 3;
        }
        let expected = displayed_g6_entry(counts[0], counts[1], counts[2]);
        ensure((v - expected).abs() < 1e-12, || {
            format!("entry {i} (x{} y{} z{}) = {v}, display gives {expected}", counts[0], counts[1], counts[2])
        })?;
        if expected != 0.0 {
            nonzero += 1;
        }
    }
    Ok(format!("full_sum {full:.12}; 16p²/3 reproduced; {nonzero} nonzero entries match the display"))
}

fn criterion_7() -> Check {
    let (p6, q6) = lr_sufficiency_thresholds().map_err(e)?;
    let any = g6_any_frame_threshold().map_err(e)?;
    for (name, value, printed) in [("sqrt(3/16)", p6, 0.433012), ("1/sqrt(23)", any, 0.208514), ("1/sqrt(32)", q6, 0.176777)] {
        ensure((value - printed).abs() <= 1e-6, || format!("{name} = {value} vs printed {printed}"))?;
    }
    let mut worst = 0.0f64;
    for n in [4, 5, 6, 8] {
        for p in [0.3, 0.5, 0.6, 0.9] {
            let fit = projected_werner_fit(n, p, false).map_err(e)?;
            let closed = collapse_visibility(n, p).map_err(e)?;
            worst = worst.max((fit.visibility - closed).abs()).max(fit.residual);
            ensure((fit.visibility - closed).abs() < 1e-9 && fit.residual < 1e-9, || {
                format!("n={n} p={p}: fit {} vs {closed}, residual {:.2e}", fit.visibility, fit.residual)
            })?;
        }
    }
    let scan = crossover_scan(4, 20).map_err(e)?;
    for r in &scan {
        ensure(r.g_more_robust == (r.n >= 13), || {
            format!("n={}: p_crit_g {} q_crit_ghz {}", r.n, r.p_crit_g, r.q_crit_ghz)
        })?;
    }
    let (r12, r13) = (&scan[8], &scan[9]);
    Ok(format!(
        "{p6:.7} {any:.7} {q6:.7}; collapse vs projection {worst:.1e}; n=12 ({:.6} vs {:.6}) n=13 ({:.6} vs {:.6})",
        r12.p_crit_g, r12.q_crit_ghz, r13.p_crit_g, r13.q_crit_ghz
    ))
}

fn criterion_8() -> Check {
    let start = Instant::now();
    for n in 3..=8 {
        ensure(ghz_counterexample_check(n).map_err(e)?, || format!("GHZ counterexample fails at n={n}"))?;
    }
    let mut dims = Vec::new();
    for n in 4..=8 {
        let s = g_uniqueness_check(n).map_err(e)?;
        ensure(s.residual < 1e-9, || format!("n={n}: residual {:.2e}", s.residual))?;
        ensure(s.forced_product == (n >= 5), || format!("n={n}: forced_product = {}", s.forced_product))?;
        dims.push(format!("n={n}:{}", s.nullspace_dim));
    }
    let t = within_time(start, Duration::from_secs(30))?;
    Ok(format!("nullspace dims {}; {t:.2?}", dims.join(" ")))
}

fn run_cli(args: &[&str], dir: &Path, threads: Option<&str>) -> Result<Vec<u8>, String> {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_qss"));
    cmd.args(args).current_dir(dir);
    if let Some(t) = threads {
        cmd.env("QSS_THREADS", t);
    }
    let out = cmd.output().map_err(e)?;
    ensure(out.status.success(), || {
        format!("{args:?} failed: {}", String::from_utf8_lossy(&out.stderr))
    })?;
    Ok(out.stdout)
}

fn snapshot(dir: &Path) -> Result<Vec<(String, Vec<u8>)>, String> {
    let mut files: Vec<(String, Vec<u8>)> = Vec::new();
    for entry in walk(dir)? {
        let bytes = std::fs::read(&entry).map_err(e)?;
        files.push((entry.strip_prefix(dir).map_err(e)?.display().to_string(), bytes));
    }
    files.sort();
    Ok(files)
}

fn walk(dir: &Path) -> Result<Vec<std::path::PathBuf>, String> {
    let mut out = Vec::new();
    for entry in std::fs::read_dir(dir).map_err(e)? {
        let path = entry.map_err(e)?.path();
        if path.is_dir() {
            out.extend(walk(&path)?);
        } else {
            out.push(path);
        }
    }
    Ok(out)
}

fn criterion_9() -> Check {
    let commands: [&[&str]; 6] = [
        &["run-protocol", "--m", "3", "--rounds", "20000", "--phi", "0.3", "--seed", "7", "--out", "proto"],
        &["sweep-attack", "--m", "2", "--carrier", "ghz", "--phi-grid", "0:pi/2:11", "--out", "sweep"],
        &["bell", "--state", "g", "--n", "5", "--noise", "0.7", "--frame", "search", "--restarts", "12", "--seed", "3", "--out", "bell.json"],
        &["thresholds", "--n-min", "4", "--n-max", "16", "--out", "thr"],
        &["rdm", "--n", "6", "--out", "rdm.json"],
        &["tensor", "--state", "ghz", "--n", "4", "--noise", "0.5", "--out", "tensor.json"],
    ];
    let mut runs = Vec::new();
    for threads in [None, None, Some("1")] {
        let dir = tempfile::tempdir().map_err(e)?;
        let mut stdout = Vec::new();
        for args in commands {
            stdout.push(run_cli(args, dir.path(), threads)?);
        }
        runs.push((snapshot(dir.path())?, stdout));
    }
    let files = runs[0].0.len();
    ensure(runs.windows(2).all(|w| w[0] == w[1]), || {
        "reruns produced different bytes".to_string()
    })?;
    Ok(format!("{} commands, {files} files byte-identical over 3 runs (one single-threaded)", commands.len()))
}

fn main() {
    let criteria: [(&str, fn() -> Check); 9] = [
        ("correlation identities", criterion_1),
        ("G_4 as a rotated GHZ state", criterion_2),
        ("security crossing and exact mutual information", criterion_3),
        ("Bell and information criteria agree", criterion_4),
        ("protocol Monte Carlo", criterion_5),
        ("correlation tensor values", criterion_6),
        ("noise thresholds", criterion_7),
        ("marginal determination", criterion_8),
        ("CLI determinism", criterion_9),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("criterion {}: PASS  {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {}: FAIL  {name}: {why}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
