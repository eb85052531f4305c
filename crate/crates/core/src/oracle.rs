//! Exact multimode Fock-space simulation of the interferometer.
//!
//! Everything here is brute force: states are sparse maps from occupation
//! tuples to amplitudes, and a linear-optical unitary is applied by expanding
//! every creation operator `a_i† → Σ_j U_ji b_j†` multinomially. Cost grows
//! exponentially with the number of modes, which is fine for the small `N`
//! this is used at and is the point: none of the closed forms are reused.

use std::collections::{BTreeMap, HashMap};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::fock::{coherent, FockVector};
use crate::noise::KrausSet;
use crate::{Error, Result};

/// Amplitudes below this magnitude are dropped.
pub const PRUNE_TOL: f64 = 1e-16;

pub const MAX_IDEAL_ARMS: usize = 4;
pub const MAX_IDEAL_INPUT_CUTOFF: usize = 8;
pub const MAX_NOISY_ARMS: usize = 3;

/// Photon numbers per mode.
pub type Occupation = Vec<usize>;

fn zero() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

fn factorials(up_to: usize) -> Vec<f64> {
    let mut f = vec![1.0; up_to + 1];
    for k in 1..=up_to {
        f[k] = f[k - 1] * k as f64;
    }
    f
}

/// All ways of writing `n` as an ordered sum of `parts` non-negative integers.
fn compositions(n: usize, parts: usize) -> Vec<Vec<usize>> {
    if parts == 1 {
        return vec![vec![n]];
    }
    let mut out = Vec::new();
    for first in 0..=n {
        for mut rest in compositions(n - first, parts - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// Sparse pure state of `modes` bosonic modes.
#[derive(Debug, Clone, PartialEq)]
pub struct MultimodeState {
    modes: usize,
    cap: usize,
    amps: BTreeMap<Occupation, Complex64>,
}

impl MultimodeState {
    pub fn new(modes: usize, cap: usize) -> Self {
        Self {
            modes,
            cap,
            amps: BTreeMap::new(),
        }
    }

    /// Single-mode state in mode 0, vacuum elsewhere.
    pub fn from_first_mode(input: &FockVector, modes: usize, cap: usize) -> Result<Self> {
        let mut state = Self::new(modes, cap);
        for (m, &c) in input.coeffs().iter().enumerate() {
            if c.norm() < PRUNE_TOL {
                continue;
            }
            let mut occ = vec![0; modes];
            occ[0] = m;
            state.insert(occ, c)?;
        }
        Ok(state)
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    pub fn insert(&mut self, occ: Occupation, amp: Complex64) -> Result<()> {
        let total: usize = occ.iter().sum();
        if total > self.cap {
            return Err(Error::CapExceeded { total, cap: self.cap });
        }
        if occ.len() != self.modes {
            return Err(Error::invalid(
                "occupation",
                format!("expected {} modes, got {}", self.modes, occ.len()),
            ));
        }
        *self.amps.entry(occ).or_insert_with(zero) += amp;
        Ok(())
    }

    pub fn get(&self, occ: &[usize]) -> Complex64 {
        self.amps.get(occ).copied().unwrap_or_default()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Occupation, &Complex64)> {
        self.amps.iter()
    }

    pub fn len(&self) -> usize {
        self.amps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amps.is_empty()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.values().map(|c| c.norm_sqr()).sum()
    }

    fn prune(&mut self) {
        self.amps.retain(|_, c| c.norm() >= PRUNE_TOL);
    }

    /// Keep only kets with at most `max_per_mode` photons in every mode.
    pub fn project_each_mode(&self, max_per_mode: usize) -> Self {
        let amps = self
            .amps
            .iter()
            .filter(|(occ, _)| occ.iter().all(|&n| n <= max_per_mode))
            .map(|(k, v)| (k.clone(), *v))
            .collect();
        Self { amps, ..self.clone() }
    }

    /// Amplitudes of mode 0 conditioned on vacuum in every other mode.
    pub fn first_mode_given_vacuum(&self, cutoff: usize) -> FockVector {
        let mut coeffs = vec![zero(); cutoff + 1];
        for (occ, &c) in &self.amps {
            if occ[1..].iter().all(|&n| n == 0) && occ[0] <= cutoff {
                coeffs[occ[0]] += c;
            }
        }
        FockVector::from_coeffs(coeffs).expect("cutoff + 1 > 0")
    }
}

/// `U_jk = e^{2πi jk/N} / √N`.
pub fn splitter_matrix(modes: usize) -> DMatrix<Complex64> {
    let n = modes as f64;
    DMatrix::from_fn(modes, modes, |j, k| {
        Complex64::from_polar(1.0 / n.sqrt(), 2.0 * std::f64::consts::PI * (j * k) as f64 / n)
    })
}

/// Householder reflection `I − 2ww†/(w†w)`, `w = e_0 − u`, which maps `e_0`
/// to the unit vector `u`. `u_0` must be real; for real `u` the result is
/// symmetric, so `u` is both its first row and first column.
pub fn householder_completion(u: &[Complex64]) -> Result<DMatrix<Complex64>> {
    let n = u.len();
    if n == 0 {
        return Err(Error::invalid("u", "empty vector"));
    }
    let norm: f64 = u.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    if (norm - 1.0).abs() > 1e-12 {
        return Err(Error::invalid("u", format!("expected a unit vector, norm is {norm}")));
    }
    if u[0].im.abs() > 1e-15 {
        return Err(Error::invalid("u", "first component must be real"));
    }
    let mut w: Vec<Complex64> = u.iter().map(|c| -c).collect();
    w[0] += Complex64::new(1.0, 0.0);
    let ww: f64 = w.iter().map(|c| c.norm_sqr()).sum();
    if ww < 1e-30 {
        return Ok(DMatrix::identity(n, n));
    }
    Ok(DMatrix::from_fn(n, n, |i, j| {
        let delta = if i == j { 1.0 } else { 0.0 };
        Complex64::new(delta, 0.0) - w[i] * w[j].conj() * (2.0 / ww)
    }))
}

/// Image of a single normalized basis ket under the mode transformation
/// `a_i† → Σ_j U_ji b_j†`.
fn transform_ket(occ: &[usize], unitary: &DMatrix<Complex64>, fact: &[f64]) -> Vec<(Occupation, Complex64)> {
    let modes = occ.len();
    let norm: f64 = occ.iter().map(|&n| fact[n].sqrt()).product();
    let mut partial: Vec<(Occupation, Complex64)> = vec![(vec![0; modes], Complex64::new(1.0 / norm, 0.0))];
    for (i, &n_i) in occ.iter().enumerate() {
        if n_i == 0 {
            continue;
        }
        let splits = compositions(n_i, modes);
        let mut next = Vec::with_capacity(partial.len() * splits.len());
        for (out, coeff) in &partial {
            for split in &splits {
                let mut c = *coeff * fact[n_i];
                for (j, &k) in split.iter().enumerate() {
                    if k > 0 {
                        c *= unitary[(j, i)].powu(k as u32) / fact[k];
                    }
                }
                if c.norm() < PRUNE_TOL {
                    continue;
                }
                let mut o = out.clone();
                for (slot, &k) in o.iter_mut().zip(split) {
                    *slot += k;
                }
                next.push((o, c));
            }
        }
        partial = next;
    }
    // b†^o / √(o!) normalization of the output kets
    partial
        .into_iter()
        .map(|(o, c)| {
            let scale: f64 = o.iter().map(|&k| fact[k].sqrt()).product();
            (o, c * scale)
        })
        .collect()
}

fn check_unitary_shape(unitary: &DMatrix<Complex64>, modes: usize) -> Result<()> {
    if unitary.nrows() != modes || unitary.ncols() != modes {
        return Err(Error::invalid(
            "U",
            format!("expected {modes}x{modes}, got {}x{}", unitary.nrows(), unitary.ncols()),
        ));
    }
    Ok(())
}

pub fn apply_splitter(state: &MultimodeState, unitary: &DMatrix<Complex64>) -> Result<MultimodeState> {
    check_unitary_shape(unitary, state.modes)?;
    let fact = factorials(state.cap);
    let mut out = MultimodeState::new(state.modes, state.cap);
    for (occ, &amp) in state.iter() {
        let total: usize = occ.iter().sum();
        if total > state.cap {
            return Err(Error::CapExceeded { total, cap: state.cap });
        }
        for (o, c) in transform_ket(occ, unitary, &fact) {
            out.insert(o, amp * c)?;
        }
    }
    out.prune();
    Ok(out)
}

/// Sparse density operator over multimode occupation kets.
#[derive(Debug, Clone, PartialEq)]
pub struct MultimodeDensity {
    modes: usize,
    cap: usize,
    entries: BTreeMap<(Occupation, Occupation), Complex64>,
}

impl MultimodeDensity {
    pub fn from_pure(state: &MultimodeState) -> Self {
        let mut entries = BTreeMap::new();
        for (ket, a) in state.iter() {
            for (bra, b) in state.iter() {
                entries.insert((ket.clone(), bra.clone()), a * b.conj());
            }
        }
        Self {
            modes: state.modes,
            cap: state.cap,
            entries,
        }
    }

    pub fn get(&self, ket: &[usize], bra: &[usize]) -> Complex64 {
        self.entries
            .get(&(ket.to_vec(), bra.to_vec()))
            .copied()
            .unwrap_or_default()
    }

    pub fn trace(&self) -> f64 {
        self.entries
            .iter()
            .filter(|((k, b), _)| k == b)
            .map(|(_, v)| v.re)
            .sum()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Largest `|ρ(k,b) − conj ρ(b,k)|` over stored pairs.
    pub fn hermitian_defect(&self) -> f64 {
        self.entries
            .iter()
            .map(|((k, b), v)| (v - self.get(b, k).conj()).norm())
            .fold(0.0, f64::max)
    }

    /// Apply the qutrit channel to one mode. Every stored ket must have at
    /// most two photons in that mode.
    pub fn apply_channel_on_mode(&self, kraus: &KrausSet, mode: usize) -> Result<Self> {
        let mut entries: BTreeMap<(Occupation, Occupation), Complex64> = BTreeMap::new();
        for ((ket, bra), &v) in &self.entries {
            let (n, m) = (ket[mode], bra[mode]);
            if n > 2 || m > 2 {
                return Err(Error::invalid(
                    "state",
                    format!("mode {mode} holds more than two photons; truncate before applying a qutrit channel"),
                ));
            }
            for k in kraus.operators() {
                for r in 0..3 {
                    let left = k[(r, n)];
                    if left == zero() {
                        continue;
                    }
                    for s in 0..3 {
                        let right = k[(s, m)].conj();
                        if right == zero() {
                            continue;
                        }
                        let mut ket2 = ket.clone();
                        let mut bra2 = bra.clone();
                        ket2[mode] = r;
                        bra2[mode] = s;
                        *entries.entry((ket2, bra2)).or_insert_with(zero) += left * v * right;
                    }
                }
            }
        }
        entries.retain(|_, c| c.norm() >= PRUNE_TOL);
        Ok(Self {
            entries,
            ..self.clone()
        })
    }

    pub fn apply_channel_each_mode(&self, kraus: &KrausSet) -> Result<Self> {
        let mut rho = self.clone();
        for mode in 0..self.modes {
            rho = rho.apply_channel_on_mode(kraus, mode)?;
        }
        Ok(rho)
    }

    fn images(&self, unitary: &DMatrix<Complex64>) -> Result<HashMap<Occupation, Vec<(Occupation, Complex64)>>> {
        check_unitary_shape(unitary, self.modes)?;
        let fact = factorials(self.cap);
        let mut images = HashMap::new();
        for (ket, bra) in self.entries.keys() {
            for occ in [ket, bra] {
                if !images.contains_key(occ) {
                    let total: usize = occ.iter().sum();
                    if total > self.cap {
                        return Err(Error::CapExceeded { total, cap: self.cap });
                    }
                    images.insert(occ.clone(), transform_ket(occ, unitary, &fact));
                }
            }
        }
        Ok(images)
    }

    /// `U ρ U†` for the mode transformation defined by `unitary`.
    pub fn apply_splitter(&self, unitary: &DMatrix<Complex64>) -> Result<Self> {
        let images = self.images(unitary)?;
        let mut entries: BTreeMap<(Occupation, Occupation), Complex64> = BTreeMap::new();
        for ((ket, bra), &v) in &self.entries {
            for (k2, a) in &images[ket] {
                for (b2, b) in &images[bra] {
                    *entries.entry((k2.clone(), b2.clone())).or_insert_with(zero) += a * v * b.conj();
                }
            }
        }
        entries.retain(|_, c| c.norm() >= PRUNE_TOL);
        Ok(Self {
            entries,
            ..self.clone()
        })
    }

    /// Mode-0 block conditioned on vacuum in all other modes, as a dense
    /// `(cutoff+1)²` matrix (unnormalized).
    pub fn first_mode_given_vacuum(&self, cutoff: usize) -> DMatrix<Complex64> {
        let mut d = DMatrix::zeros(cutoff + 1, cutoff + 1);
        for ((ket, bra), &v) in &self.entries {
            let vac = ket[1..].iter().chain(&bra[1..]).all(|&n| n == 0);
            if vac && ket[0] <= cutoff && bra[0] <= cutoff {
                d[(ket[0], bra[0])] += v;
            }
        }
        d
    }

    /// Same as `apply_splitter` followed by `first_mode_given_vacuum`, but
    /// drops non-vacuum components of each ket image before the outer
    /// product. The projection commutes with expanding the product, so the
    /// result is identical.
    pub fn splitter_first_mode_given_vacuum(
        &self,
        unitary: &DMatrix<Complex64>,
        cutoff: usize,
    ) -> Result<DMatrix<Complex64>> {
        let images = self.images(unitary)?;
        let filtered: HashMap<&Occupation, Vec<(usize, Complex64)>> = images
            .iter()
            .map(|(occ, img)| {
                let kept = img
                    .iter()
                    .filter(|(o, _)| o[1..].iter().all(|&n| n == 0) && o[0] <= cutoff)
                    .map(|(o, c)| (o[0], *c))
                    .collect();
                (occ, kept)
            })
            .collect();
        let mut d = DMatrix::zeros(cutoff + 1, cutoff + 1);
        for ((ket, bra), &v) in &self.entries {
            for &(p, a) in &filtered[ket] {
                for &(q, b) in &filtered[bra] {
                    d[(p, q)] += a * v * b.conj();
                }
            }
        }
        Ok(d)
    }
}

/// Output of the ideal brute-force run.
#[derive(Debug, Clone, PartialEq)]
pub struct ExactIdeal {
    /// Unnormalized output-port amplitudes.
    pub amplitudes: FockVector,
    pub success_prob: f64,
}

fn check_arm_cutoff(per_arm_cutoff: usize) -> Result<()> {
    if per_arm_cutoff != 1 && per_arm_cutoff != 2 {
        return Err(Error::invalid(
            "per_arm_cutoff",
            format!("expected 1 or 2, got {per_arm_cutoff}"),
        ));
    }
    Ok(())
}

/// Split, truncate every arm to `per_arm_cutoff` photons, recombine, and
/// post-select vacuum on ports `1..N`, using the DFT splitter.
pub fn simulate_ideal_exact(input: &FockVector, arms: usize, per_arm_cutoff: usize) -> Result<ExactIdeal> {
    simulate_ideal_exact_with(input, &splitter_matrix(arms.max(1)), arms, per_arm_cutoff)
}

pub fn simulate_ideal_exact_with(
    input: &FockVector,
    unitary: &DMatrix<Complex64>,
    arms: usize,
    per_arm_cutoff: usize,
) -> Result<ExactIdeal> {
    if arms == 0 || arms > MAX_IDEAL_ARMS {
        return Err(Error::invalid(
            "N",
            format!("oracle supports 1..={MAX_IDEAL_ARMS} arms, got {arms}"),
        ));
    }
    if input.cutoff() > MAX_IDEAL_INPUT_CUTOFF {
        return Err(Error::CapExceeded {
            total: input.cutoff(),
            cap: MAX_IDEAL_INPUT_CUTOFF,
        });
    }
    check_arm_cutoff(per_arm_cutoff)?;

    let window = per_arm_cutoff * arms;
    let cap = window.min(input.cutoff()) + 2;
    // Components above the cap cannot survive the per-arm truncation.
    let input = input.with_cutoff(input.cutoff().min(cap));

    let state = MultimodeState::from_first_mode(&input, arms, cap)?;
    let split = apply_splitter(&state, unitary)?;
    let truncated = split.project_each_mode(per_arm_cutoff);
    let merged = apply_splitter(&truncated, &unitary.adjoint())?;
    let amplitudes = merged.first_mode_given_vacuum(window);
    let success_prob = amplitudes.norm_sqr();
    Ok(ExactIdeal {
        amplitudes,
        success_prob,
    })
}

/// Noisy brute-force run for a coherent input: split, truncate each arm to a
/// qutrit, apply the channel on every arm, recombine and post-select.
/// Returns the unnormalized `(2N+1)²` output-port density.
pub fn simulate_noisy_exact(alpha: Complex64, arms: usize, kraus: &KrausSet) -> Result<DMatrix<Complex64>> {
    simulate_noisy_exact_with(alpha, &splitter_matrix(arms.max(1)), arms, kraus)
}

pub fn simulate_noisy_exact_with(
    alpha: Complex64,
    unitary: &DMatrix<Complex64>,
    arms: usize,
    kraus: &KrausSet,
) -> Result<DMatrix<Complex64>> {
    if arms == 0 || arms > MAX_NOISY_ARMS {
        return Err(Error::invalid(
            "N",
            format!("noisy oracle supports 1..={MAX_NOISY_ARMS} arms, got {arms}"),
        ));
    }
    let window = 2 * arms;
    let cap = window + 2;
    let input = coherent(alpha, window);
    let state = MultimodeState::from_first_mode(&input, arms, cap)?;
    let split = apply_splitter(&state, unitary)?.project_each_mode(2);
    let noisy = MultimodeDensity::from_pure(&split).apply_channel_each_mode(kraus)?;
    noisy.splitter_first_mode_given_vacuum(&unitary.adjoint(), window)
}
