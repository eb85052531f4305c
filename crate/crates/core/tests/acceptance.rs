//! Acceptance suite. Runs every criterion at its stated tolerance, prints one
//! PASS/FAIL line each, and exits non-zero if any criterion fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use nalgebra::DMatrix;
use num_complex::Complex64;
use qtele::fock::{cat, coherent, default_cutoff, FockVector};
use qtele::ideal::{teleport_pure, transfer_profile_qubit, transfer_profile_qutrit, TransferProfile};
use qtele::noise::{effective_resource, log_negativity, NoiseKind};
use qtele::oracle::{simulate_ideal_exact, simulate_noisy_exact};
use qtele::pipeline::{metrics_from_density, noisy_metrics};
use qtele::sweep::p_range;
use qtele::verify::{density_violation, qutrit_vs_qubit_grid, run_verify, VerifyOptions};
use qtele::{noise::kraus_set, Result};

struct Outcome {
    passed: bool,
    max_deviation: f64,
    detail: String,
}

impl Outcome {
    fn within(max_deviation: f64, tol: f64, detail: impl Into<String>) -> Self {
        Self {
            passed: max_deviation <= tol,
            max_deviation,
            detail: detail.into(),
        }
    }
}

fn c(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

fn fock_diff(a: &FockVector, b: &FockVector) -> f64 {
    let len = a.cutoff().max(b.cutoff());
    (0..=len).map(|m| (a.get(m) - b.get(m)).norm()).fold(0.0, f64::max)
}

fn coherent_metrics(alpha: f64, profile: &TransferProfile) -> Result<(f64, f64)> {
    let out = teleport_pure(&coherent(c(alpha), default_cutoff(alpha, profile.arms())), profile)?;
    Ok((out.fidelity, out.success_prob))
}

fn transfer_invariants() -> Result<Outcome> {
    let mut dev: f64 = 0.0;
    let mut support_ok = true;
    for n in 1..=20 {
        let q = transfer_profile_qutrit(n)?;
        for m in 0..=2 {
            dev = dev.max((q.weight(m) - 1.0).abs());
        }
        support_ok &= q.max_photons() == 2 * n && (2 * n + 1..4 * n + 4).all(|m| q.weight(m) == 0.0);
    }
    let mut out = Outcome::within(dev, 1e-12, "A_0, A_1, A_2 for N = 1..20");
    if !support_ok {
        out.passed = false;
        out.detail.push_str("; nonzero weight beyond 2N");
    }
    Ok(out)
}

fn ideal_oracle() -> Result<Outcome> {
    let mut inputs: Vec<FockVector> = [0.5, 1.0, 1.5].iter().map(|&a| coherent(c(a), 8)).collect();
    inputs.push(cat(1.0, 8));
    let mut dev: f64 = 0.0;
    for n in 1..=3 {
        let profile = transfer_profile_qutrit(n)?;
        for input in &inputs {
            let closed = teleport_pure(input, &profile)?;
            let exact = simulate_ideal_exact(input, n, 2)?;
            dev = dev.max(fock_diff(&closed.amplitudes, &exact.amplitudes));
        }
    }
    Ok(Outcome::within(
        dev,
        1e-10,
        "coherent 0.5/1.0/1.5 and cat 1.0, N = 1..3",
    ))
}

fn typo_arbitration() -> Result<Outcome> {
    let report = run_verify(&VerifyOptions::default());
    let check = report.check("printed-weights").expect("arbitration check exists");
    let line = check
        .notes
        .iter()
        .find(|l| l.starts_with("printed weights (N=1, m=2)"))
        .cloned()
        .unwrap_or_default();
    let shows_factor_two = line.contains("printed A = 2.000000000000") && line.contains("factor 2.000000");
    Ok(Outcome {
        passed: check.passed && check.max_deviation < 1e-10 && shows_factor_two,
        max_deviation: check.max_deviation,
        detail: line,
    })
}

fn noisy_oracle() -> Result<Outcome> {
    let mut dev: f64 = 0.0;
    for n in [1, 2] {
        for kind in NoiseKind::ALL {
            for p in [0.05, 0.2] {
                let kraus = kraus_set(kind, p)?;
                for alpha in [0.5, 1.0] {
                    let closed = noisy_metrics(c(alpha), n, kind, p)?;
                    let exact = simulate_noisy_exact(c(alpha), n, &kraus)?;
                    let (ps, f) = metrics_from_density(c(alpha), &exact)?;
                    let d = (closed.density.matrix() - &exact)
                        .iter()
                        .map(|z| z.norm())
                        .fold(0.0, f64::max);
                    dev = dev
                        .max(d)
                        .max((closed.success_prob - ps).abs())
                        .max((closed.fidelity - f).abs());
                }
            }
        }
    }
    Ok(Outcome::within(
        dev,
        1e-10,
        "N = 1, 2; all kinds; p = 0.05, 0.2; alpha = 0.5, 1.0",
    ))
}

fn qutrit_beats_qubit() -> Result<Outcome> {
    let three = transfer_profile_qutrit(3)?;
    let ten = transfer_profile_qubit(10)?;
    let mut worst = f64::NEG_INFINITY;
    for alpha in qutrit_vs_qubit_grid() {
        let (f3, p3) = coherent_metrics(alpha, &three)?;
        let (f10, p10) = coherent_metrics(alpha, &ten)?;
        worst = worst.max(f10 - f3).max(p10 - p3);
    }
    Ok(Outcome::within(
        worst.max(0.0),
        1e-9,
        format!("max(qubit - qutrit) = {worst:.3e} over alpha in (0, 1.5]"),
    ))
}

fn negativity_curves() -> Result<Outcome> {
    let grid = p_range(0.2, 0.005);
    let curve = |kind| {
        grid.iter()
            .map(|&p| log_negativity(kind, p))
            .collect::<Result<Vec<f64>>>()
    };
    let (bit, phase, depol) = (
        curve(NoiseKind::BitFlip)?,
        curve(NoiseKind::PhaseFlip)?,
        curve(NoiseKind::Depolarizing)?,
    );
    let mut dev: f64 = 0.0;
    for e in [&bit, &phase, &depol] {
        dev = dev.max((e[0] - 3f64.log2()).abs());
        for w in e.windows(2) {
            dev = dev.max(w[1] - w[0]);
        }
    }
    for i in 0..grid.len() {
        dev = dev.max((bit[i] - depol[i]).abs()).max(bit[i].max(depol[i]) - phase[i]);
    }
    let last = grid.len() - 1;
    Ok(Outcome::within(
        dev,
        1e-9,
        format!(
            "E_N(0.2): bit {:.6}, phase {:.6}, depolarizing {:.6}",
            bit[last], phase[last], depol[last]
        ),
    ))
}

fn bit_flip_peak() -> Result<Outcome> {
    let f = |alpha: f64| -> Result<f64> { Ok(noisy_metrics(c(alpha), 3, NoiseKind::BitFlip, 0.3)?.fidelity) };
    let (low, mid, high) = (f(0.2)?, f(1.2)?, f(2.5)?);
    Ok(Outcome {
        passed: mid > low && mid > high,
        max_deviation: (low.max(high) - mid).max(0.0),
        detail: format!("F(0.2) = {low:.6}, F(1.2) = {mid:.6}, F(2.5) = {high:.6}"),
    })
}

fn phase_flip_dominance() -> Result<Outcome> {
    let mut worst = f64::NEG_INFINITY;
    for alpha in [0.2, 0.5, 1.0] {
        for p in p_range(0.5, 0.05) {
            let f = |kind| -> Result<f64> { Ok(noisy_metrics(c(alpha), 3, kind, p)?.fidelity) };
            let phase = f(NoiseKind::PhaseFlip)?;
            worst = worst.max(f(NoiseKind::BitFlip)?.max(f(NoiseKind::Depolarizing)?) - phase);
        }
    }
    let mut exact = true;
    for p in p_range(0.5, 0.05) {
        let out = noisy_metrics(c(0.0), 3, NoiseKind::PhaseFlip, p)?;
        exact &= out.fidelity == 1.0 && out.success_prob == 1.0;
    }
    let mut out = Outcome::within(worst.max(0.0), 1e-9, format!("max(other - phase) = {worst:.3e}"));
    if !exact {
        out.passed = false;
        out.detail.push_str("; alpha = 0 is not exactly (1, 1)");
    } else {
        out.detail.push_str("; alpha = 0 gives F = Ps = 1 exactly");
    }
    Ok(out)
}

fn noiseless_limit() -> Result<Outcome> {
    let mut dev: f64 = 0.0;
    for n in [1, 2, 3, 5] {
        let profile = transfer_profile_qutrit(n)?;
        for i in 1..=8 {
            let alpha = 0.25 * i as f64;
            let (f, ps) = coherent_metrics(alpha, &profile)?;
            for kind in NoiseKind::ALL {
                let noisy = noisy_metrics(c(alpha), n, kind, 0.0)?;
                dev = dev.max((noisy.fidelity - f).abs()).max((noisy.success_prob - ps).abs());
            }
        }
    }
    Ok(Outcome::within(dev, 1e-12, "alpha = 0.25..2.0, N = 1, 2, 3, 5"))
}

fn state_physics() -> Result<Outcome> {
    let mut herm: f64 = 0.0;
    let mut other: f64 = 0.0;
    let mut count = 0usize;
    let mut add = |d: &DMatrix<Complex64>, f: f64, ps: f64| -> Result<()> {
        let (h, v) = density_violation(d, f, ps)?;
        herm = herm.max(h);
        other = other.max(v);
        count += 1;
        Ok(())
    };
    for profile in [transfer_profile_qutrit(3)?, transfer_profile_qubit(10)?] {
        for alpha in qutrit_vs_qubit_grid() {
            let out = teleport_pure(&coherent(c(alpha), default_cutoff(alpha, profile.arms())), &profile)?;
            add(&out.output.projector(), out.fidelity, out.success_prob)?;
        }
    }
    for kind in NoiseKind::ALL {
        for p in p_range(0.2, 0.005) {
            add(effective_resource(kind, p)?.rho(), 1.0, 1.0)?;
        }
    }
    for alpha in [0.2, 1.2, 2.5] {
        let out = noisy_metrics(c(alpha), 3, NoiseKind::BitFlip, 0.3)?;
        add(&out.density.normalized(), out.fidelity, out.success_prob)?;
    }
    for kind in NoiseKind::ALL {
        for alpha in [0.0, 0.2, 0.5, 1.0] {
            for p in p_range(0.5, 0.05) {
                let out = noisy_metrics(c(alpha), 3, kind, p)?;
                add(&out.density.normalized(), out.fidelity, out.success_prob)?;
            }
        }
    }
    Ok(Outcome {
        passed: herm <= 1e-10 && other <= 1e-9,
        max_deviation: herm.max(other),
        detail: format!("{count} states; Hermiticity defect {herm:.3e}, PSD/range violation {other:.3e}"),
    })
}

type Criterion = (u32, &'static str, fn() -> Result<Outcome>, Option<Duration>);

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        (
            1,
            "transfer invariants",
            transfer_invariants,
            Some(Duration::from_secs(1)),
        ),
        (
            2,
            "ideal oracle equivalence",
            ideal_oracle,
            Some(Duration::from_secs(60)),
        ),
        (3, "printed vs corrected weights", typo_arbitration, None),
        (
            4,
            "noisy oracle equivalence",
            noisy_oracle,
            Some(Duration::from_secs(120)),
        ),
        (5, "qutrit N=3 beats qubit N=10", qutrit_beats_qubit, None),
        (6, "log-negativity curves", negativity_curves, None),
        (7, "bit-flip fidelity peak", bit_flip_peak, None),
        (8, "phase-flip dominance", phase_flip_dominance, None),
        (9, "noiseless limit", noiseless_limit, None),
        (10, "state physics", state_physics, None),
    ];
    let mut failed = 0;
    for (id, name, run, limit) in criteria {
        let start = Instant::now();
        let result = run();
        let elapsed = start.elapsed();
        let (passed, line) = match result {
            Ok(o) => {
                let in_time = limit.is_none_or(|l| elapsed < l);
                let timing = match limit {
                    Some(l) if !in_time => format!(" [too slow: limit {:.0} s]", l.as_secs_f64()),
                    _ => String::new(),
                };
                (
                    o.passed && in_time,
                    format!(
                        "max dev {:.3e}, {:.3} s{timing}; {}",
                        o.max_deviation,
                        elapsed.as_secs_f64(),
                        o.detail
                    ),
                )
            }
            Err(e) => (false, format!("error: {e}")),
        };
        if !passed {
            failed += 1;
        }
        println!(
            "criterion {id:>2} {name:<30} {}  ({line})",
            if passed { "PASS" } else { "FAIL" }
        );
    }
    if failed == 0 {
        println!("acceptance: all 10 criteria passed");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {failed} criteria FAILED");
        ExitCode::FAILURE
    }
}
