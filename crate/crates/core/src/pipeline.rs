//! Noisy teleportation of a coherent state: every arm carries the truncated
//! share `|α/√N⟩`, passes through the same qutrit channel, and the arms are
//! recombined with the other output ports post-selected on vacuum.
//!
//! Only coherent inputs split into a product of identical arms, so this
//! pipeline is scoped to them.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::fock::{coherent, expectation};
use crate::ideal::MIN_SUCCESS_PROB;
use crate::noise::{apply_channel, kraus_set, KrausSet, NoiseKind, Qutrit};
use crate::{Error, Result};

/// Unnormalized 3×3 state of one teleporter arm.
#[derive(Debug, Clone, PartialEq)]
pub struct ArmState {
    rho: Qutrit,
    alpha_per_arm: Complex64,
    arms: usize,
}

impl ArmState {
    /// Build an arm state directly; used for hand-made fixtures.
    pub fn from_parts(rho: Qutrit, alpha_per_arm: Complex64, arms: usize) -> Result<Self> {
        check_arms(arms)?;
        Ok(Self {
            rho,
            alpha_per_arm,
            arms,
        })
    }

    pub fn rho(&self) -> &Qutrit {
        &self.rho
    }

    pub fn alpha_per_arm(&self) -> Complex64 {
        self.alpha_per_arm
    }

    pub fn arms(&self) -> usize {
        self.arms
    }

    pub fn trace(&self) -> f64 {
        self.rho.trace().re
    }
}

fn check_arms(arms: usize) -> Result<()> {
    if arms == 0 {
        return Err(Error::invalid("N", "need at least one arm"));
    }
    Ok(())
}

/// `|t⟩⟨t|` with `t_n = e^{−|α|²/2N} (α/√N)^n / √n!`, `n ≤ 2`.
pub fn arm_input(alpha: Complex64, arms: usize) -> Result<ArmState> {
    check_arms(arms)?;
    let share = alpha / (arms as f64).sqrt();
    let t = coherent(share, 2);
    let rho = Qutrit::from_fn(|i, j| t.get(i) * t.get(j).conj());
    Ok(ArmState {
        rho,
        alpha_per_arm: share,
        arms,
    })
}

pub fn arm_output(arm: &ArmState, kraus: &KrausSet) -> ArmState {
    ArmState {
        rho: apply_channel(&arm.rho, kraus),
        ..arm.clone()
    }
}

/// Unnormalized output-port density `D` over `|0⟩ ..= |2N⟩`.
#[derive(Debug, Clone, PartialEq)]
pub struct OutputDensity {
    d: DMatrix<Complex64>,
    success_prob: f64,
    arms: usize,
}

impl OutputDensity {
    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.d
    }

    pub fn success_prob(&self) -> f64 {
        self.success_prob
    }

    pub fn arms(&self) -> usize {
        self.arms
    }

    /// `D / Ps`.
    pub fn normalized(&self) -> DMatrix<Complex64> {
        &self.d / Complex64::new(self.success_prob, 0.0)
    }
}

/// Two-index convolution of `acc` with the 3×3 `b`.
fn convolve(acc: &DMatrix<Complex64>, b: &Qutrit) -> DMatrix<Complex64> {
    let (rows, cols) = acc.shape();
    let mut out = DMatrix::zeros(rows + 2, cols + 2);
    for n in 0..3 {
        for m in 0..3 {
            let w = b[(n, m)];
            if w == Complex64::new(0.0, 0.0) {
                continue;
            }
            for p in 0..rows {
                for q in 0..cols {
                    out[(p + n, q + m)] += w * acc[(p, q)];
                }
            }
        }
    }
    out
}

/// Recombine `N` identical arms:
///
/// `D_pq = √(p! q!) · (B^{⊛N})_pq` with `B_nm = ρ_nm / (√(n! m!) N^{(n+m)/2})`,
/// where `⊛` is two-index convolution. This is the sum over per-arm photon
/// assignments with `Σn_i = p`, `Σm_i = q`, evaluated in `O(N³)` instead of by
/// enumeration.
pub fn recombine(arm: &ArmState) -> OutputDensity {
    let arms = arm.arms;
    let n = arms as f64;
    let inv_sqrt_fact = [1.0, 1.0, 1.0 / 2f64.sqrt()];
    let b =
        Qutrit::from_fn(|i, j| arm.rho[(i, j)] * (inv_sqrt_fact[i] * inv_sqrt_fact[j] / n.powf((i + j) as f64 / 2.0)));

    let mut acc = DMatrix::from_element(1, 1, Complex64::new(1.0, 0.0));
    for _ in 0..arms {
        acc = convolve(&acc, &b);
    }

    // √(p!) by running product
    let dim = 2 * arms + 1;
    let mut sqrt_fact = Vec::with_capacity(dim);
    let mut f = 1.0;
    for p in 0..dim {
        if p > 0 {
            f *= (p as f64).sqrt();
        }
        sqrt_fact.push(f);
    }
    let d = DMatrix::from_fn(dim, dim, |p, q| acc[(p, q)] * (sqrt_fact[p] * sqrt_fact[q]));
    let success_prob = d.trace().re;
    OutputDensity { d, success_prob, arms }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NoisyOutcome {
    pub density: OutputDensity,
    pub success_prob: f64,
    pub fidelity: f64,
}

/// `(Ps, F)` of the output port given its unnormalized density, with
/// `F = ⟨α|D|α⟩ / Ps` against the original input amplitude.
pub fn metrics_from_density(alpha: Complex64, d: &DMatrix<Complex64>) -> Result<(f64, f64)> {
    let success_prob = d.trace().re;
    if !(success_prob > MIN_SUCCESS_PROB) {
        return Err(Error::NoSuccessfulBranch(success_prob));
    }
    let target = coherent(alpha, d.nrows() - 1);
    let overlap = expectation(d, &target)?;
    Ok((success_prob, overlap / success_prob))
}

pub fn noisy_metrics_with(alpha: Complex64, arms: usize, kraus: &KrausSet) -> Result<NoisyOutcome> {
    let arm = arm_output(&arm_input(alpha, arms)?, kraus);
    let density = recombine(&arm);
    let (success_prob, fidelity) = metrics_from_density(alpha, density.matrix())?;
    Ok(NoisyOutcome {
        density,
        success_prob,
        fidelity,
    })
}

pub fn noisy_metrics(alpha: Complex64, arms: usize, kind: NoiseKind, p_noise: f64) -> Result<NoisyOutcome> {
    noisy_metrics_with(alpha, arms, &kraus_set(kind, p_noise)?)
}
