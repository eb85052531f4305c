//! Noiseless teleportation through `N` qutrit (or qubit) teleporters.
//!
//! A number state passing the split, truncate and recombine pipeline comes out
//! as `|m⟩ → A_m |m⟩`. For qutrit arms
//!
//! ```text
//! A_m = (m! N! / N^m) Σ_{k=max(0,m−N)}^{⌊m/2⌋} 2^{−k} / (k! (m−2k)! (N−m+k)!)
//! ```
//!
//! where `k` counts the arms holding two photons. The `2^{−k}` comes from the
//! `1/2!` in each doubly occupied arm; [`transfer_profile_qutrit_printed`]
//! keeps the variant without it so the two can be compared against the oracle.

use num_complex::Complex64;

use crate::fock::{FockVector, SchmidtDiagonalState};
use crate::{Error, Result};

pub const MAX_ARMS: usize = 64;

/// Photon capacity of a single teleporter arm.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ChannelDim {
    Qubit,
    Qutrit,
}

impl ChannelDim {
    pub fn dim(self) -> usize {
        match self {
            ChannelDim::Qubit => 2,
            ChannelDim::Qutrit => 3,
        }
    }

    pub fn from_dim(dim: usize) -> Result<Self> {
        match dim {
            2 => Ok(ChannelDim::Qubit),
            3 => Ok(ChannelDim::Qutrit),
            other => Err(Error::invalid("channel_dim", format!("expected 2 or 3, got {other}"))),
        }
    }

    /// Largest photon number a single arm carries.
    pub fn arm_cutoff(self) -> usize {
        self.dim() - 1
    }
}

/// Transfer weights `A_0 ..= A_{Mmax}` with `Mmax = (dim − 1)·N`.
#[derive(Debug, Clone, PartialEq)]
pub struct TransferProfile {
    arms: usize,
    channel: ChannelDim,
    weights: Vec<f64>,
}

impl TransferProfile {
    pub fn arms(&self) -> usize {
        self.arms
    }

    pub fn channel(&self) -> ChannelDim {
        self.channel
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn max_photons(&self) -> usize {
        self.weights.len() - 1
    }

    /// `A_m`, zero beyond the supported window.
    pub fn weight(&self, m: usize) -> f64 {
        self.weights.get(m).copied().unwrap_or(0.0)
    }

    /// Profile with arbitrary weights, used by tests and comparisons.
    pub fn from_weights(arms: usize, channel: ChannelDim, weights: Vec<f64>) -> Result<Self> {
        check_arms(arms)?;
        if weights.is_empty() {
            return Err(Error::invalid("weights", "need at least A_0"));
        }
        Ok(Self { arms, channel, weights })
    }
}

fn check_arms(arms: usize) -> Result<()> {
    if arms == 0 || arms > MAX_ARMS {
        return Err(Error::invalid(
            "N",
            format!("arm count must be in 1..={MAX_ARMS}, got {arms}"),
        ));
    }
    Ok(())
}

/// Qutrit sum for one `m`; `pair_weight` is 1/2 for the physical form and 1
/// for the printed variant.
fn qutrit_weight(arms: usize, m: usize, pair_weight: f64) -> f64 {
    let n = arms as f64;
    let k_min = m.saturating_sub(arms);
    let k_max = m / 2;
    if k_min > k_max {
        return 0.0;
    }

    // Term at k_min, as a product of factors of order one:
    //   Π_{j<m−k_min} (N−j)/N  ·  Π_{j<k_min} pair·(m−2j)(m−2j−1) / ((j+1) N)
    let mut term = 1.0;
    for j in 0..(m - k_min) {
        term *= (n - j as f64) / n;
    }
    for j in 0..k_min {
        let top = (m - 2 * j) as f64 * (m - 2 * j - 1) as f64;
        term *= pair_weight * top / ((j + 1) as f64 * n);
    }

    let mut sum = term;
    for k in k_min..k_max {
        // T_{k+1}/T_k = pair (m−2k)(m−2k−1) / ((k+1)(N−m+k+1))
        let top = (m - 2 * k) as f64 * (m - 2 * k - 1) as f64;
        let bottom = (k + 1) as f64 * (arms + k + 1 - m) as f64;
        term *= pair_weight * top / bottom;
        sum += term;
    }
    sum
}

/// Transfer profile of `N` ideal qutrit teleporters.
pub fn transfer_profile_qutrit(arms: usize) -> Result<TransferProfile> {
    check_arms(arms)?;
    let weights = (0..=2 * arms).map(|m| qutrit_weight(arms, m, 0.5)).collect();
    Ok(TransferProfile {
        arms,
        channel: ChannelDim::Qutrit,
        weights,
    })
}

/// The qutrit profile as it reads without the `2^{−k}` pair factor.
///
/// Not physical: at `N = 1` it gives `A_2 = 2`. Only used to demonstrate the
/// discrepancy against the brute-force oracle.
pub fn transfer_profile_qutrit_printed(arms: usize) -> Result<TransferProfile> {
    check_arms(arms)?;
    let weights = (0..=2 * arms).map(|m| qutrit_weight(arms, m, 1.0)).collect();
    Ok(TransferProfile {
        arms,
        channel: ChannelDim::Qutrit,
        weights,
    })
}

/// Transfer profile of `N` qubit teleporters, `A_m = N! / ((N−m)! N^m)`.
pub fn transfer_profile_qubit(arms: usize) -> Result<TransferProfile> {
    check_arms(arms)?;
    let n = arms as f64;
    let mut weights = Vec::with_capacity(arms + 1);
    let mut a = 1.0;
    weights.push(a);
    for j in 0..arms {
        a *= (n - j as f64) / n;
        weights.push(a);
    }
    Ok(TransferProfile {
        arms,
        channel: ChannelDim::Qubit,
        weights,
    })
}

pub fn transfer_profile(channel: ChannelDim, arms: usize) -> Result<TransferProfile> {
    match channel {
        ChannelDim::Qubit => transfer_profile_qubit(arms),
        ChannelDim::Qutrit => transfer_profile_qutrit(arms),
    }
}

/// Result of a pure-state teleportation.
#[derive(Debug, Clone, PartialEq)]
pub struct PureOutcome {
    /// Unnormalized output amplitudes `input_m · A_m`.
    pub amplitudes: FockVector,
    /// Normalized output state.
    pub output: FockVector,
    pub success_prob: f64,
    pub fidelity: f64,
}

/// Success probabilities at or below this are treated as "never succeeds".
pub const MIN_SUCCESS_PROB: f64 = 1e-300;

/// Teleport a pure single-mode state through the given profile.
pub fn teleport_pure(input: &FockVector, profile: &TransferProfile) -> Result<PureOutcome> {
    let coeffs: Vec<Complex64> = input
        .coeffs()
        .iter()
        .enumerate()
        .map(|(m, c)| c * profile.weight(m))
        .collect();
    let amplitudes = FockVector::from_coeffs(coeffs)?;
    let success_prob = amplitudes.norm_sqr();
    if !(success_prob > MIN_SUCCESS_PROB) {
        return Err(Error::NoSuccessfulBranch(success_prob));
    }
    let overlap = crate::fock::inner(input, &amplitudes);
    let fidelity = overlap.norm_sqr() / success_prob;
    let output = amplitudes.scaled(Complex64::new(1.0 / success_prob.sqrt(), 0.0));
    Ok(PureOutcome {
        amplitudes,
        output,
        success_prob,
        fidelity,
    })
}

/// Teleport one mode of a TMSV, given in Schmidt form.
///
/// Returns `(success_prob, fidelity)`. The untouched mode only contributes the
/// identity, so `Ps = Σ c_n² A_n²` and `F = (Σ c_n² A_n)² / Ps`.
pub fn teleport_schmidt(state: &SchmidtDiagonalState, profile: &TransferProfile) -> Result<(f64, f64)> {
    let mut ps = 0.0;
    let mut overlap = 0.0;
    for (n, c) in state.coeffs().iter().enumerate() {
        let a = profile.weight(n);
        ps += c * c * a * a;
        overlap += c * c * a;
    }
    if !(ps > MIN_SUCCESS_PROB) {
        return Err(Error::NoSuccessfulBranch(ps));
    }
    Ok((ps, overlap * overlap / ps))
}

/// Teleport one mode of `TMSV(λ)`; returns `(success_prob, fidelity)`.
pub fn teleport_tmsv(lambda: f64, profile: &TransferProfile) -> Result<(f64, f64)> {
    let state = crate::fock::tmsv(lambda, profile.max_photons())?;
    teleport_schmidt(&state, profile)
}
