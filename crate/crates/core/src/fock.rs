//! Single-mode Fock-space vectors and the input-state families.
//!
//! Generators never renormalize after truncation: the weight lost above the
//! cutoff is physical and shows up later as reduced success probability.
//! Factorials only ever appear through running ratios so that amplitudes stay
//! finite for photon numbers well past where `m!` overflows.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::{Error, Result};

/// Tolerance used when checking that a density matrix is Hermitian.
pub const HERMITIAN_TOL: f64 = 1e-10;

/// Complex amplitudes over `|0⟩ ..= |cutoff⟩`.
#[derive(Debug, Clone, PartialEq)]
pub struct FockVector {
    coeffs: Vec<Complex64>,
}

impl FockVector {
    pub fn from_coeffs(coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::invalid(
                "coeffs",
                "a Fock vector needs at least the vacuum entry",
            ));
        }
        Ok(Self { coeffs })
    }

    pub fn from_real(coeffs: &[f64]) -> Result<Self> {
        Self::from_coeffs(coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect())
    }

    pub fn vacuum(cutoff: usize) -> Self {
        let mut coeffs = vec![Complex64::new(0.0, 0.0); cutoff + 1];
        coeffs[0] = Complex64::new(1.0, 0.0);
        Self { coeffs }
    }

    pub fn cutoff(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// Amplitude of `|m⟩`; zero above the cutoff.
    pub fn get(&self, m: usize) -> Complex64 {
        self.coeffs.get(m).copied().unwrap_or_default()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }

    /// Copy truncated (or zero-padded) to a new cutoff.
    pub fn with_cutoff(&self, cutoff: usize) -> Self {
        let coeffs = (0..=cutoff).map(|m| self.get(m)).collect();
        Self { coeffs }
    }

    /// Multiply every amplitude by `factor`.
    pub fn scaled(&self, factor: Complex64) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|c| c * factor).collect(),
        }
    }

    /// Dense outer product `|self⟩⟨self|`.
    pub fn projector(&self) -> DMatrix<Complex64> {
        let d = self.coeffs.len();
        DMatrix::from_fn(d, d, |i, j| self.coeffs[i] * self.coeffs[j].conj())
    }
}

/// Real amplitudes `c_n` of a two-mode state `Σ c_n |n, n⟩`.
#[derive(Debug, Clone, PartialEq)]
pub struct SchmidtDiagonalState {
    coeffs: Vec<f64>,
}

impl SchmidtDiagonalState {
    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn cutoff(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn norm_sqr(&self) -> f64 {
        self.coeffs.iter().map(|c| c * c).sum()
    }
}

/// Coherent state `|α⟩` truncated at `cutoff`.
pub fn coherent(alpha: Complex64, cutoff: usize) -> FockVector {
    let mut coeffs = Vec::with_capacity(cutoff + 1);
    let mut c = Complex64::new((-alpha.norm_sqr() / 2.0).exp(), 0.0);
    coeffs.push(c);
    for m in 1..=cutoff {
        c = c * alpha / (m as f64).sqrt();
        coeffs.push(c);
    }
    FockVector { coeffs }
}

/// Even Schrödinger cat `(|α⟩ + |−α⟩) / √(2 + 2e^{−2α²})` for real `α`.
pub fn cat(alpha: f64, cutoff: usize) -> FockVector {
    let norm = 2.0 / (2.0 + 2.0 * (-2.0 * alpha * alpha).exp()).sqrt();
    let base = coherent(Complex64::new(alpha, 0.0), cutoff);
    let coeffs = base
        .coeffs
        .iter()
        .enumerate()
        .map(|(m, &c)| if m % 2 == 0 { c * norm } else { Complex64::new(0.0, 0.0) })
        .collect();
    FockVector { coeffs }
}

/// Single-mode squeezed vacuum with squeezing parameter `ξ`, `|ξ| < 1`.
pub fn squeezed_vacuum(xi: f64, cutoff: usize) -> Result<FockVector> {
    if !(xi.abs() < 1.0) {
        return Err(Error::invalid("xi", format!("|xi| must be < 1, got {xi}")));
    }
    let mut coeffs = vec![Complex64::new(0.0, 0.0); cutoff + 1];
    let mut c = (1.0 - xi * xi).powf(0.25);
    coeffs[0] = Complex64::new(c, 0.0);
    let mut m = 2;
    while m <= cutoff {
        // c_{2n} / c_{2n-2} = -ξ √(2n(2n-1)) / (2n)
        let mf = m as f64;
        c *= -xi * (mf * (mf - 1.0)).sqrt() / mf;
        coeffs[m] = Complex64::new(c, 0.0);
        m += 2;
    }
    Ok(FockVector { coeffs })
}

/// Two-mode squeezed vacuum `√(1−λ²) Σ λ^n |n, n⟩`, `|λ| < 1`.
pub fn tmsv(lambda: f64, cutoff: usize) -> Result<SchmidtDiagonalState> {
    if !(lambda.abs() < 1.0) {
        return Err(Error::invalid("lambda", format!("|lambda| must be < 1, got {lambda}")));
    }
    let mut coeffs = Vec::with_capacity(cutoff + 1);
    let mut c = (1.0 - lambda * lambda).sqrt();
    coeffs.push(c);
    for _ in 1..=cutoff {
        c *= lambda;
        coeffs.push(c);
    }
    Ok(SchmidtDiagonalState { coeffs })
}

/// `⟨u|v⟩`, the shorter vector implicitly zero-padded.
pub fn inner(u: &FockVector, v: &FockVector) -> Complex64 {
    u.coeffs.iter().zip(&v.coeffs).map(|(a, b)| a.conj() * b).sum()
}

/// Largest `|M_ij − conj(M_ji)|`.
pub fn hermitian_defect(m: &DMatrix<Complex64>) -> f64 {
    let n = m.nrows();
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

/// `⟨ψ|ρ|ψ⟩` for a Hermitian `ρ` over the Fock basis.
///
/// Amplitudes of `ψ` beyond the dimension of `ρ` do not contribute.
pub fn expectation(rho: &DMatrix<Complex64>, psi: &FockVector) -> Result<f64> {
    if rho.nrows() != rho.ncols() {
        return Err(Error::invalid(
            "rho",
            format!("expected a square matrix, got {}x{}", rho.nrows(), rho.ncols()),
        ));
    }
    let defect = hermitian_defect(rho);
    if defect > HERMITIAN_TOL {
        return Err(Error::NotHermitian(defect));
    }
    let d = rho.nrows();
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..d {
        let left = psi.get(i).conj();
        if left == Complex64::new(0.0, 0.0) {
            continue;
        }
        for j in 0..d {
            acc += left * rho[(i, j)] * psi.get(j);
        }
    }
    if acc.im.abs() >= HERMITIAN_TOL {
        return Err(Error::NotHermitian(acc.im.abs()));
    }
    Ok(acc.re)
}

/// Cutoff used for fidelity integrals: `max(2N, ⌈|α|² + 8|α| + 10⌉)`.
pub fn default_cutoff(alpha_abs: f64, arms: usize) -> usize {
    let tail = (alpha_abs * alpha_abs + 8.0 * alpha_abs + 10.0).ceil() as usize;
    tail.max(2 * arms)
}
