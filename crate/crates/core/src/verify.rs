//! Self-check suite: closed forms against the brute-force oracle, structural
//! invariants, and the qualitative orderings the model is expected to show.
//!
//! Every check reports its largest deviation. The Kraus source is injectable
//! so tests can feed a corrupted channel and watch the suite fail.

use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::fock::{cat, coherent, default_cutoff, hermitian_defect, FockVector};
use crate::ideal::{
    teleport_pure, transfer_profile_qubit, transfer_profile_qutrit, transfer_profile_qutrit_printed, TransferProfile,
};
use crate::linalg::hermitian_eigenvalues;
use crate::noise::{kraus_set, log_negativity_with, KrausSet, NoiseKind};
use crate::oracle::{
    householder_completion, simulate_ideal_exact, simulate_ideal_exact_with, simulate_noisy_exact_with, splitter_matrix,
};
use crate::pipeline::{metrics_from_density, noisy_metrics_with};
use crate::sweep::p_range;
use crate::Result;

pub type KrausSource = fn(NoiseKind, f64) -> Result<KrausSet>;

#[derive(Debug, Clone, Copy)]
pub struct VerifyOptions {
    /// Print the full printed-vs-corrected coefficient table.
    pub printed_eq8: bool,
    pub kraus: KrausSource,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            printed_eq8: false,
            kraus: kraus_set,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub max_deviation: f64,
    pub tolerance: f64,
    pub notes: Vec<String>,
}

impl Check {
    fn new(name: &'static str, tolerance: f64) -> Self {
        Self {
            name,
            passed: true,
            max_deviation: 0.0,
            tolerance,
            notes: Vec::new(),
        }
    }

    fn dev(&mut self, d: f64) {
        // NaN counts as a failure.
        if !(d <= self.max_deviation) {
            self.max_deviation = if d.is_nan() { f64::INFINITY } else { d };
        }
    }

    fn fail(&mut self, note: impl Into<String>) {
        self.passed = false;
        self.notes.push(note.into());
    }

    fn finish(mut self) -> Self {
        if !(self.max_deviation <= self.tolerance) {
            self.passed = false;
        }
        self
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyReport {
    pub checks: Vec<Check>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

impl fmt::Display for VerifyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            writeln!(
                f,
                "[{}] {:<24} max deviation {:.3e} (tolerance {:.0e})",
                if c.passed { "PASS" } else { "FAIL" },
                c.name,
                c.max_deviation,
                c.tolerance
            )?;
            for note in &c.notes {
                writeln!(f, "       {note}")?;
            }
        }
        let failed = self.failures().count();
        if failed == 0 {
            writeln!(f, "all {} checks passed", self.checks.len())
        } else {
            writeln!(f, "{failed} of {} checks FAILED", self.checks.len())
        }
    }
}

pub fn run_verify(opts: &VerifyOptions) -> VerifyReport {
    let checks = vec![
        guarded(Check::new("kraus-completeness", 1e-12), |c| kraus_completeness(c, opts)),
        guarded(Check::new("transfer-invariants", 1e-12), transfer_invariants),
        guarded(Check::new("ideal-oracle", 1e-10), ideal_oracle),
        guarded(Check::new("printed-weights", 1e-10), |c| {
            printed_weights(c, opts.printed_eq8)
        }),
        guarded(Check::new("noisy-oracle", 1e-10), |c| noisy_oracle(c, opts)),
        guarded(Check::new("splitter-completion", 1e-10), |c| {
            splitter_completion(c, opts)
        }),
        guarded(Check::new("noiseless-limit", 1e-12), |c| noiseless_limit(c, opts)),
        guarded(Check::new("qutrit-vs-qubit", 1e-9), qutrit_vs_qubit),
        guarded(Check::new("negativity", 1e-9), |c| negativity(c, opts)),
        guarded(Check::new("bit-flip-peak", 0.0), |c| bit_flip_peak(c, opts)),
        guarded(Check::new("phase-flip-dominance", 1e-9), |c| {
            phase_flip_dominance(c, opts)
        }),
        guarded(Check::new("output-physics", 1e-9), |c| output_physics(c, opts)),
    ];
    VerifyReport { checks }
}

fn guarded(mut check: Check, body: impl FnOnce(&mut Check) -> Result<()>) -> Check {
    if let Err(e) = body(&mut check) {
        check.dev(f64::INFINITY);
        check.fail(format!("error: {e}"));
    }
    check.finish()
}

fn max_abs_diff(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> f64 {
    if a.shape() != b.shape() {
        return f64::INFINITY;
    }
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

fn fock_diff(a: &FockVector, b: &FockVector) -> f64 {
    let len = a.cutoff().max(b.cutoff());
    (0..=len).map(|m| (a.get(m) - b.get(m)).norm()).fold(0.0, f64::max)
}

fn kraus_completeness(c: &mut Check, opts: &VerifyOptions) -> Result<()> {
    for kind in NoiseKind::ALL {
        for i in 0..=100 {
            let p = i as f64 / 100.0;
            c.dev((opts.kraus)(kind, p)?.completeness_defect());
        }
    }
    Ok(())
}

fn transfer_invariants(c: &mut Check) -> Result<()> {
    for n in 1..=20 {
        let q = transfer_profile_qutrit(n)?;
        for m in 0..=2 {
            c.dev((q.weight(m) - 1.0).abs());
        }
        if q.weights().len() != 2 * n + 1 || q.weight(2 * n + 1) != 0.0 {
            c.fail(format!("qutrit profile N={n} has the wrong support"));
        }
        if q.weights().iter().any(|&a| !(a > 0.0 && a <= 1.0 + 1e-12)) {
            c.fail(format!("qutrit profile N={n} has a weight outside (0, 1]"));
        }
        let b = transfer_profile_qubit(n)?;
        if b.weights().len() != n + 1 {
            c.fail(format!("qubit profile N={n} has the wrong support"));
        }
        c.dev((b.weight(0) - 1.0).abs().max((b.weight(1) - 1.0).abs()));
    }
    Ok(())
}

fn ideal_oracle(c: &mut Check) -> Result<()> {
    let mut inputs: Vec<(String, FockVector)> = [0.5, 1.0, 1.5]
        .iter()
        .map(|&a| (format!("coherent({a})"), coherent(Complex64::new(a, 0.0), 8)))
        .collect();
    inputs.push(("cat(1)".into(), cat(1.0, 8)));
    for n in 1..=3 {
        let q = transfer_profile_qutrit(n)?;
        for (label, input) in &inputs {
            let closed = teleport_pure(input, &q)?;
            let exact = simulate_ideal_exact(input, n, 2)?;
            let d = fock_diff(&closed.amplitudes, &exact.amplitudes);
            c.dev(d);
            c.dev((closed.success_prob - exact.success_prob).abs());
            if d > c.tolerance {
                c.notes.push(format!("{label}, N={n}: amplitude deviation {d:.3e}"));
            }
        }
    }
    // Qubit baseline, one photon per arm.
    for n in 1..=4 {
        let input = coherent(Complex64::new(1.0, 0.0), 8);
        let closed = teleport_pure(&input, &transfer_profile_qubit(n)?)?;
        let exact = simulate_ideal_exact(&input, n, 1)?;
        c.dev(fock_diff(&closed.amplitudes, &exact.amplitudes));
    }
    Ok(())
}

/// Transfer weights recovered from the oracle, `C_m / input_m`.
fn oracle_weights(input: &FockVector, arms: usize) -> Result<Vec<f64>> {
    let exact = simulate_ideal_exact(input, arms, 2)?;
    Ok((0..=2 * arms)
        .map(|m| (exact.amplitudes.get(m) / input.get(m)).re)
        .collect())
}

fn printed_weights(c: &mut Check, full_table: bool) -> Result<()> {
    let input = coherent(Complex64::new(1.0, 0.0), 8);
    let mut at_12 = None;
    let mut table = Vec::new();
    for n in 1..=3 {
        let oracle = oracle_weights(&input, n)?;
        let corrected = transfer_profile_qutrit(n)?;
        let printed = transfer_profile_qutrit_printed(n)?;
        for (m, &a) in oracle.iter().enumerate() {
            let dc = (corrected.weight(m) - a).abs();
            let dp = (printed.weight(m) - a).abs();
            c.dev(dc);
            table.push(format!(
                "N={n} m={m}: oracle {a:.12}  corrected {:.12}  printed {:.12}  ratio {:.6}",
                corrected.weight(m),
                printed.weight(m),
                printed.weight(m) / a
            ));
            if n == 1 && m == 2 {
                at_12 = Some((a, corrected.weight(m), dc, printed.weight(m), dp));
            }
        }
    }
    let (a, corr, dc, pr, dp) = at_12.expect("N=1 covers m=2");
    c.notes.push(format!(
        "printed weights (N=1, m=2): oracle A = {a:.12}; corrected A = {corr:.12} (deviation {dc:.1e}); \
         printed A = {pr:.12} (deviation {dp:.3}, factor {:.6})",
        pr / a
    ));
    if !(dp > 0.5) {
        c.fail("printed coefficients unexpectedly agree with the oracle at (N=1, m=2)");
    }
    if full_table {
        c.notes.extend(table);
    }
    Ok(())
}

/// Oracle-vs-pipeline agreement at one point: returns the worst deviation
/// across the density matrix, success probability and fidelity.
fn noisy_point(alpha: f64, arms: usize, kraus: &KrausSet, unitary: &DMatrix<Complex64>) -> Result<f64> {
    let a = Complex64::new(alpha, 0.0);
    let closed = noisy_metrics_with(a, arms, kraus)?;
    let exact = simulate_noisy_exact_with(a, unitary, arms, kraus)?;
    let (ps, f) = metrics_from_density(a, &exact)?;
    Ok(max_abs_diff(closed.density.matrix(), &exact)
        .max((closed.success_prob - ps).abs())
        .max((closed.fidelity - f).abs()))
}

fn noisy_oracle(c: &mut Check, opts: &VerifyOptions) -> Result<()> {
    let mut points = Vec::new();
    for n in [1, 2] {
        for kind in NoiseKind::ALL {
            for p in [0.0, 0.05, 0.2] {
                for alpha in [0.5, 1.0] {
                    points.push((n, kind, p, alpha));
                }
            }
        }
    }
    for kind in NoiseKind::ALL {
        for p in [0.05, 0.2] {
            points.push((3, kind, p, 1.5));
        }
    }
    for (n, kind, p, alpha) in points {
        let kraus = (opts.kraus)(kind, p)?;
        let d = noisy_point(alpha, n, &kraus, &splitter_matrix(n))?;
        c.dev(d);
        if d > c.tolerance {
            c.notes
                .push(format!("{kind} p={p} alpha={alpha} N={n}: deviation {d:.3e}"));
        }
    }
    let vac = simulate_noisy_exact_with(
        Complex64::new(0.0, 0.0),
        &splitter_matrix(2),
        2,
        &(opts.kraus)(NoiseKind::BitFlip, 0.1)?,
    )?;
    c.dev((vac[(0, 0)].re - 0.81).abs());
    Ok(())
}

fn splitter_completion(c: &mut Check, opts: &VerifyOptions) -> Result<()> {
    for n in 2..=3 {
        let dft = splitter_matrix(n);
        let first_row: Vec<Complex64> = (0..n).map(|k| dft[(0, k)]).collect();
        let house = householder_completion(&first_row)?;
        let input = cat(1.0, 8);
        let a = simulate_ideal_exact_with(&input, &dft, n, 2)?;
        let b = simulate_ideal_exact_with(&input, &house, n, 2)?;
        c.dev(fock_diff(&a.amplitudes, &b.amplitudes));

        let kraus = (opts.kraus)(NoiseKind::Depolarizing, 0.2)?;
        let alpha = Complex64::new(0.7, 0.0);
        let d_dft = simulate_noisy_exact_with(alpha, &dft, n, &kraus)?;
        let d_house = simulate_noisy_exact_with(alpha, &house, n, &kraus)?;
        c.dev(max_abs_diff(&d_dft, &d_house));
    }
    Ok(())
}

fn noiseless_limit(c: &mut Check, opts: &VerifyOptions) -> Result<()> {
    for n in [1, 2, 3, 5] {
        let profile = transfer_profile_qutrit(n)?;
        for i in 1..=8 {
            let alpha = 0.25 * i as f64;
            let a = Complex64::new(alpha, 0.0);
            let pure = teleport_pure(&coherent(a, default_cutoff(alpha, n)), &profile)?;
            for kind in NoiseKind::ALL {
                let noisy = noisy_metrics_with(a, n, &(opts.kraus)(kind, 0.0)?)?;
                c.dev((noisy.fidelity - pure.fidelity).abs());
                c.dev((noisy.success_prob - pure.success_prob).abs());
            }
        }
    }
    Ok(())
}

fn coherent_metrics(alpha: f64, profile: &TransferProfile) -> Result<(f64, f64)> {
    let input = coherent(Complex64::new(alpha, 0.0), default_cutoff(alpha, profile.arms()));
    let out = teleport_pure(&input, profile)?;
    Ok((out.fidelity, out.success_prob))
}

/// α grid `(0, 1.5]` in steps of 0.01.
pub fn qutrit_vs_qubit_grid() -> Vec<f64> {
    (1..=150).map(|i| i as f64 / 100.0).collect()
}

fn qutrit_vs_qubit(c: &mut Check) -> Result<()> {
    let three = transfer_profile_qutrit(3)?;
    let ten = transfer_profile_qubit(10)?;
    for alpha in qutrit_vs_qubit_grid() {
        let (f3, p3) = coherent_metrics(alpha, &three)?;
        let (f10, p10) = coherent_metrics(alpha, &ten)?;
        c.dev(f10 - f3);
        c.dev(p10 - p3);
    }
    Ok(())
}

fn negativity(c: &mut Check, opts: &VerifyOptions) -> Result<()> {
    let grid = p_range(0.2, 0.005);
    let mut curves = Vec::new();
    for kind in NoiseKind::ALL {
        let curve: Vec<f64> = grid
            .iter()
            .map(|&p| log_negativity_with(&(opts.kraus)(kind, p)?))
            .collect::<Result<_>>()?;
        c.dev((curve[0] - 3f64.log2()).abs());
        for w in curve.windows(2) {
            c.dev(w[1] - w[0]);
        }
        curves.push(curve);
    }
    let (bit, phase, depol) = (&curves[0], &curves[1], &curves[2]);
    for i in 0..grid.len() {
        c.dev((bit[i] - depol[i]).abs());
        c.dev(bit[i].max(depol[i]) - phase[i]);
    }
    let last = grid.len() - 1;
    c.notes.push(format!(
        "E_N at p={}: bit {:.6}, phase {:.6}, depolarizing {:.6}",
        grid[last], bit[last], phase[last], depol[last]
    ));
    Ok(())
}

fn bit_flip_peak(c: &mut Check, opts: &VerifyOptions) -> Result<()> {
    let kraus = (opts.kraus)(NoiseKind::BitFlip, 0.3)?;
    let f = |alpha: f64| -> Result<f64> { Ok(noisy_metrics_with(Complex64::new(alpha, 0.0), 3, &kraus)?.fidelity) };
    let (low, mid, high) = (f(0.2)?, f(1.2)?, f(2.5)?);
    c.notes
        .push(format!("F(0.2) = {low:.6}, F(1.2) = {mid:.6}, F(2.5) = {high:.6}"));
    if !(mid > low && mid > high) {
        c.dev(low.max(high) - mid);
        c.fail("no interior fidelity peak for bit-flip noise at N=3, p=0.3");
    }
    Ok(())
}

/// p grid `[0, 0.5]` in steps of 0.05.
pub fn dominance_p_grid() -> Vec<f64> {
    p_range(0.5, 0.05)
}

fn phase_flip_dominance(c: &mut Check, opts: &VerifyOptions) -> Result<()> {
    for alpha in [0.2, 0.5, 1.0] {
        let a = Complex64::new(alpha, 0.0);
        for p in dominance_p_grid() {
            let f = |kind| -> Result<f64> { Ok(noisy_metrics_with(a, 3, &(opts.kraus)(kind, p)?)?.fidelity) };
            let phase = f(NoiseKind::PhaseFlip)?;
            c.dev(f(NoiseKind::BitFlip)?.max(f(NoiseKind::Depolarizing)?) - phase);
        }
    }
    for p in dominance_p_grid() {
        let out = noisy_metrics_with(Complex64::new(0.0, 0.0), 3, &(opts.kraus)(NoiseKind::PhaseFlip, p)?)?;
        if out.fidelity != 1.0 || out.success_prob != 1.0 {
            c.dev((out.fidelity - 1.0).abs().max((out.success_prob - 1.0).abs()));
            c.fail(format!(
                "phase flip at alpha=0, p={p}: F = {}, Ps = {} (expected exactly 1)",
                out.fidelity, out.success_prob
            ));
        }
    }
    Ok(())
}

/// Hermiticity and positivity of a normalized output density, plus the
/// range of its figures of merit.
pub fn density_violation(d: &DMatrix<Complex64>, fidelity: f64, success_prob: f64) -> Result<(f64, f64)> {
    let herm = hermitian_defect(d);
    let min_eig = hermitian_eigenvalues(d)?.first().copied().unwrap_or(0.0);
    let range = [fidelity, success_prob]
        .iter()
        .map(|&x| if x < 0.0 { -x } else { (x - 1.0).max(0.0) })
        .fold(0.0, f64::max);
    Ok((herm, (-min_eig).max(range)))
}

fn output_physics(c: &mut Check, opts: &VerifyOptions) -> Result<()> {
    let mut herm_max: f64 = 0.0;
    let mut record = |herm: f64, other: f64| {
        herm_max = herm_max.max(herm);
        c.dev(other);
    };
    for profile in [transfer_profile_qutrit(3)?, transfer_profile_qubit(10)?] {
        for alpha in qutrit_vs_qubit_grid() {
            let input = coherent(Complex64::new(alpha, 0.0), default_cutoff(alpha, profile.arms()));
            let out = teleport_pure(&input, &profile)?;
            let (h, v) = density_violation(&out.output.projector(), out.fidelity, out.success_prob)?;
            record(h, v);
        }
    }
    for kind in NoiseKind::ALL {
        for p in p_range(0.2, 0.005) {
            let rho = crate::noise::effective_resource_with(&(opts.kraus)(kind, p)?).into_inner();
            let (h, v) = density_violation(&rho, 1.0, 1.0)?;
            record(h, v);
        }
    }
    let mut noisy_points: Vec<(NoiseKind, f64, f64)> =
        [0.2, 1.2, 2.5].iter().map(|&a| (NoiseKind::BitFlip, 0.3, a)).collect();
    for kind in NoiseKind::ALL {
        for alpha in [0.0, 0.2, 0.5, 1.0] {
            for p in dominance_p_grid() {
                noisy_points.push((kind, p, alpha));
            }
        }
    }
    for (kind, p, alpha) in noisy_points {
        let out = noisy_metrics_with(Complex64::new(alpha, 0.0), 3, &(opts.kraus)(kind, p)?)?;
        let (h, v) = density_violation(&out.density.normalized(), out.fidelity, out.success_prob)?;
        record(h, v);
    }
    if herm_max > 1e-10 {
        c.fail(format!("Hermiticity defect {herm_max:.3e} exceeds 1e-10"));
    }
    c.dev(herm_max);
    Ok(())
}
