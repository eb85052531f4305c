//! Qutrit noise channels in Kraus form, the noisy two-qutrit resource and its
//! logarithmic negativity.

use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, Matrix3};
use num_complex::Complex64;

use crate::linalg::{partial_transpose_first, trace_norm};
use crate::{Error, Result};

pub type Qutrit = Matrix3<Complex64>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum NoiseKind {
    BitFlip,
    PhaseFlip,
    Depolarizing,
}

impl NoiseKind {
    pub const ALL: [NoiseKind; 3] = [NoiseKind::BitFlip, NoiseKind::PhaseFlip, NoiseKind::Depolarizing];

    pub fn name(self) -> &'static str {
        match self {
            NoiseKind::BitFlip => "bit_flip",
            NoiseKind::PhaseFlip => "phase_flip",
            NoiseKind::Depolarizing => "depolarizing",
        }
    }
}

impl fmt::Display for NoiseKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for NoiseKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().replace('-', "_").as_str() {
            "bit_flip" | "bitflip" | "bit" => Ok(NoiseKind::BitFlip),
            "phase_flip" | "phaseflip" | "phase" => Ok(NoiseKind::PhaseFlip),
            "depolarizing" | "depolarising" | "depol" => Ok(NoiseKind::Depolarizing),
            other => Err(Error::invalid("noise", format!("unknown noise kind `{other}`"))),
        }
    }
}

/// A named qutrit channel with its Kraus operators.
///
/// All three channels are mixtures of unitaries, `K_i = √w_i U_i`, and the
/// weighted form is kept alongside the operators. [`apply_channel`] uses it
/// so that states fixed by every `U_i` come out bit-for-bit unchanged.
#[derive(Debug, Clone, PartialEq)]
pub struct KrausSet {
    kind: NoiseKind,
    p_noise: f64,
    operators: Vec<Qutrit>,
    mixture: Option<Vec<(f64, Qutrit)>>,
}

impl KrausSet {
    pub fn kind(&self) -> NoiseKind {
        self.kind
    }

    pub fn p_noise(&self) -> f64 {
        self.p_noise
    }

    pub fn operators(&self) -> &[Qutrit] {
        &self.operators
    }

    /// Replace the operator list. The result is not checked for completeness,
    /// which is what makes corrupted fixtures possible in tests.
    pub fn with_operators(mut self, operators: Vec<Qutrit>) -> Self {
        self.operators = operators;
        self.mixture = None;
        self
    }

    /// `(w_i, U_i)` pairs, if the set is still in mixed-unitary form.
    pub fn mixture(&self) -> Option<&[(f64, Qutrit)]> {
        self.mixture.as_deref()
    }

    /// `Σ K_i† K_i`.
    pub fn completeness(&self) -> Qutrit {
        self.operators.iter().map(|k| k.adjoint() * k).sum()
    }

    /// Largest elementwise deviation of `Σ K_i† K_i` from the identity.
    pub fn completeness_defect(&self) -> f64 {
        (self.completeness() - Qutrit::identity())
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }
}

fn re(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

fn real3(rows: [[f64; 3]; 3]) -> Qutrit {
    Qutrit::from_fn(|i, j| re(rows[i][j]))
}

/// Cyclic shift `|j⟩ → |j−1 mod 3⟩`.
pub fn shift() -> Qutrit {
    real3([[0.0, 1.0, 0.0], [0.0, 0.0, 1.0], [1.0, 0.0, 0.0]])
}

/// Clock `diag(1, ω, ω²)` with `ω = e^{2πi/3}`.
pub fn clock() -> Qutrit {
    let w = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI / 3.0);
    Qutrit::from_diagonal(&nalgebra::Vector3::new(re(1.0), w, w * w))
}

pub fn kraus_set(kind: NoiseKind, p_noise: f64) -> Result<KrausSet> {
    if !(0.0..=1.0).contains(&p_noise) {
        return Err(Error::invalid("p_noise", format!("must lie in [0, 1], got {p_noise}")));
    }
    let id = Qutrit::identity();
    let mixture: Vec<(f64, Qutrit)> = match kind {
        NoiseKind::BitFlip => {
            let w = p_noise / 2.0;
            vec![
                (1.0 - p_noise, id),
                (w, real3([[0.0, 0.0, 1.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0]])),
                (w, real3([[0.0, 1.0, 0.0], [0.0, 0.0, 1.0], [1.0, 0.0, 0.0]])),
            ]
        }
        NoiseKind::PhaseFlip => {
            let w = p_noise / 2.0;
            vec![
                (1.0 - p_noise, id),
                (w, real3([[1.0, 0.0, 0.0], [0.0, -1.0, 0.0], [0.0, 0.0, 1.0]])),
                (w, real3([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, -1.0]])),
            ]
        }
        NoiseKind::Depolarizing => {
            let w = p_noise / 8.0;
            let d1 = shift();
            let d2 = clock();
            let d1_2 = d1 * d1;
            let d2_2 = d2 * d2;
            vec![
                (1.0 - p_noise, id),
                (w, d1),
                (w, d2),
                (w, d1_2),
                (w, d1 * d2),
                (w, d1_2 * d2),
                (w, d1 * d2_2),
                (w, d1_2 * d2_2),
                (w, d2_2),
            ]
        }
    };
    let operators = mixture.iter().map(|(w, u)| u * re(w.sqrt())).collect();
    Ok(KrausSet {
        kind,
        p_noise,
        operators,
        mixture: Some(mixture),
    })
}

/// `Σ_i K_i ρ K_i†`. Linear, so `ρ` may be unnormalized.
pub fn apply_channel(rho: &Qutrit, kraus: &KrausSet) -> Qutrit {
    match &kraus.mixture {
        // Noise branches first, identity branch last: the weights then sum
        // to exactly 1 in floating point.
        Some(mixture) => mixture
            .iter()
            .rev()
            .fold(Qutrit::zeros(), |acc, (w, u)| acc + u * rho * u.adjoint() * re(*w)),
        None => kraus.operators.iter().map(|k| k * rho * k.adjoint()).sum(),
    }
}

/// Two-qutrit density matrix over `|ij⟩`, index `3i + j`.
#[derive(Debug, Clone, PartialEq)]
pub struct ResourceState {
    rho: DMatrix<Complex64>,
}

impl ResourceState {
    pub fn rho(&self) -> &DMatrix<Complex64> {
        &self.rho
    }

    pub fn into_inner(self) -> DMatrix<Complex64> {
        self.rho
    }
}

/// `(|00⟩ + |11⟩ + |22⟩)/√3` as a 9-vector.
pub fn max_entangled_qutrits() -> DMatrix<Complex64> {
    let mut phi = DMatrix::zeros(9, 1);
    let amp = re(1.0 / 3f64.sqrt());
    for i in 0..3 {
        phi[(4 * i, 0)] = amp;
    }
    phi
}

/// Noisy resource `Σ_i (1 ⊗ K_i)|Φ⟩⟨Φ|(1 ⊗ K_i)†`, noise on the receiver qutrit.
pub fn effective_resource_with(kraus: &KrausSet) -> ResourceState {
    let phi = max_entangled_qutrits();
    let id = DMatrix::<Complex64>::identity(3, 3);
    let mut rho = DMatrix::zeros(9, 9);
    for k in kraus.operators() {
        let kd = DMatrix::from_fn(3, 3, |i, j| k[(i, j)]);
        let v = id.kronecker(&kd) * &phi;
        rho += &v * v.adjoint();
    }
    ResourceState { rho }
}

pub fn effective_resource(kind: NoiseKind, p_noise: f64) -> Result<ResourceState> {
    Ok(effective_resource_with(&kraus_set(kind, p_noise)?))
}

/// `log₂ ‖ρ^{T_A}‖₁` of the noisy resource.
pub fn log_negativity(kind: NoiseKind, p_noise: f64) -> Result<f64> {
    log_negativity_with(&kraus_set(kind, p_noise)?)
}

pub fn log_negativity_with(kraus: &KrausSet) -> Result<f64> {
    let resource = effective_resource_with(kraus);
    let pt = partial_transpose_first(resource.rho(), 3, 3)?;
    Ok(trace_norm(&pt)?.log2())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::hermitian_eigenvalues;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn basis_projector(n: usize) -> Qutrit {
        let mut m = Qutrit::zeros();
        m[(n, n)] = re(1.0);
        m
    }

    fn max_abs(m: &Qutrit) -> f64 {
        m.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    #[test]
    fn operator_counts() {
        assert_eq!(kraus_set(NoiseKind::BitFlip, 0.3).unwrap().operators().len(), 3);
        assert_eq!(kraus_set(NoiseKind::PhaseFlip, 0.3).unwrap().operators().len(), 3);
        assert_eq!(kraus_set(NoiseKind::Depolarizing, 0.3).unwrap().operators().len(), 9);
    }

    #[test]
    fn noiseless_set_is_identity() {
        let k = kraus_set(NoiseKind::BitFlip, 0.0).unwrap();
        assert_eq!(k.operators()[0], Qutrit::identity());
        assert!(k.operators()[1..].iter().all(|m| max_abs(m) == 0.0));
    }

    #[test]
    fn completeness_on_dense_grid() {
        for kind in NoiseKind::ALL {
            for i in 0..=100 {
                let k = kraus_set(kind, i as f64 / 100.0).unwrap();
                assert!(k.completeness_defect() < 1e-12, "{kind} p={}", i as f64 / 100.0);
            }
        }
        assert!(kraus_set(NoiseKind::Depolarizing, 0.4).unwrap().completeness_defect() < 1e-14);
    }

    #[test]
    fn phase_flip_matrix_entry() {
        let k = kraus_set(NoiseKind::PhaseFlip, 0.3).unwrap();
        assert_abs_diff_eq!(k.operators()[1][(1, 1)].re, -0.15f64.sqrt(), epsilon = 1e-15);
    }

    #[test]
    fn bit_flip_operators_are_cyclic_permutations() {
        let k = kraus_set(NoiseKind::BitFlip, 0.5).unwrap();
        let w = 0.25f64.sqrt();
        // K_1 sends |0⟩ → |1⟩, K_2 sends |0⟩ → |2⟩.
        assert_abs_diff_eq!(k.operators()[1][(1, 0)].re, w);
        assert_abs_diff_eq!(k.operators()[2][(2, 0)].re, w);
    }

    #[test]
    fn rejects_out_of_range_probability() {
        assert!(kraus_set(NoiseKind::BitFlip, -0.01).is_err());
        assert!(kraus_set(NoiseKind::Depolarizing, 1.5).is_err());
        assert!(kraus_set(NoiseKind::PhaseFlip, f64::NAN).is_err());
    }

    #[test]
    fn parses_names() {
        for kind in NoiseKind::ALL {
            assert_eq!(kind.name().parse::<NoiseKind>().unwrap(), kind);
        }
        assert_eq!("bit-flip".parse::<NoiseKind>().unwrap(), NoiseKind::BitFlip);
        assert!("amplitude_damping".parse::<NoiseKind>().is_err());
    }

    #[test]
    fn phase_flip_fixes_vacuum() {
        for p in [0.0, 0.3, 1.0] {
            let k = kraus_set(NoiseKind::PhaseFlip, p).unwrap();
            let out = apply_channel(&basis_projector(0), &k);
            assert!(max_abs(&(out - basis_projector(0))) < 1e-15);
        }
    }

    #[test]
    fn bit_flip_on_vacuum() {
        let out = apply_channel(&basis_projector(0), &kraus_set(NoiseKind::BitFlip, 0.1).unwrap());
        let expect = real3([[0.9, 0.0, 0.0], [0.0, 0.05, 0.0], [0.0, 0.0, 0.05]]);
        assert!(max_abs(&(out - expect)) < 1e-15);
    }

    #[test]
    fn full_depolarizing_on_one_photon() {
        // The eight non-identity shift/clock products: two keep |1⟩ (pure
        // clock powers), three shift it to |0⟩, three to |2⟩.
        let k = kraus_set(NoiseKind::Depolarizing, 1.0).unwrap();
        let out = apply_channel(&basis_projector(1), &k);
        let expect = real3([[3.0 / 8.0, 0.0, 0.0], [0.0, 0.25, 0.0], [0.0, 0.0, 3.0 / 8.0]]);
        assert!(max_abs(&(out - expect)) < 1e-12);

        // p = 8/9 weights all nine branches equally, which is the full twirl.
        let k = kraus_set(NoiseKind::Depolarizing, 8.0 / 9.0).unwrap();
        let out = apply_channel(&basis_projector(1), &k);
        assert!(max_abs(&(out - Qutrit::identity() / re(3.0))) < 1e-12);
    }

    #[test]
    fn resource_states() {
        let phi = max_entangled_qutrits();
        let pure = &phi * phi.adjoint();
        for kind in NoiseKind::ALL {
            let r = effective_resource(kind, 0.0).unwrap();
            assert_eq!(r.rho(), &pure);
        }

        let r = effective_resource(NoiseKind::BitFlip, 0.2).unwrap();
        let trace: Complex64 = r.rho().trace();
        assert_abs_diff_eq!(trace.re, 1.0, epsilon = 1e-12);
        assert!(crate::fock::hermitian_defect(r.rho()) < 1e-12);
        assert!(hermitian_eigenvalues(r.rho()).unwrap().iter().all(|&x| x > -1e-12));

        let r = effective_resource(NoiseKind::PhaseFlip, 0.2).unwrap();
        assert_abs_diff_eq!(r.rho()[(0, 0)].re, 1.0 / 3.0, epsilon = 1e-15);
    }

    #[test]
    fn resource_is_psd_on_coarse_grid() {
        for kind in NoiseKind::ALL {
            for i in 0..=10 {
                let r = effective_resource(kind, i as f64 / 10.0).unwrap();
                let ev = hermitian_eigenvalues(r.rho()).unwrap();
                assert!(ev[0] >= -1e-10, "{kind} p={}: {}", i as f64 / 10.0, ev[0]);
            }
        }
    }

    #[test]
    fn negativity_at_zero_noise() {
        for kind in NoiseKind::ALL {
            assert_abs_diff_eq!(log_negativity(kind, 0.0).unwrap(), 3f64.log2(), epsilon = 1e-9);
        }
    }

    #[test]
    fn negativity_orderings() {
        for i in 0..=20 {
            let p = i as f64 / 100.0;
            let bit = log_negativity(NoiseKind::BitFlip, p).unwrap();
            let dep = log_negativity(NoiseKind::Depolarizing, p).unwrap();
            let phase = log_negativity(NoiseKind::PhaseFlip, p).unwrap();
            assert_abs_diff_eq!(bit, dep, epsilon = 1e-9);
            assert!(phase + 1e-12 >= bit);
        }
    }

    #[test]
    fn negativity_non_increasing() {
        for kind in NoiseKind::ALL {
            let mut prev = f64::INFINITY;
            for i in 0..=20 {
                let e = log_negativity(kind, i as f64 / 100.0).unwrap();
                assert!(e <= prev + 1e-9, "{kind} at step {i}");
                prev = e;
            }
        }
    }

    fn qutrit_strategy() -> impl Strategy<Value = Qutrit> {
        prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 9)
            .prop_map(|raw| Qutrit::from_fn(|i, j| Complex64::new(raw[3 * i + j].0, raw[3 * i + j].1)))
    }

    fn kind_strategy() -> impl Strategy<Value = NoiseKind> {
        prop::sample::select(NoiseKind::ALL.to_vec())
    }

    proptest! {
        #[test]
        fn channel_is_linear_and_trace_preserving(
            a in qutrit_strategy(),
            b in qutrit_strategy(),
            s in -2.0f64..2.0,
            kind in kind_strategy(),
            p in 0.0f64..=1.0,
        ) {
            let k = kraus_set(kind, p).unwrap();
            let lhs = apply_channel(&(a + b * re(s)), &k);
            let rhs = apply_channel(&a, &k) + apply_channel(&b, &k) * re(s);
            prop_assert!(max_abs(&(lhs - rhs)) < 1e-12);
            prop_assert!((apply_channel(&a, &k).trace() - a.trace()).norm() < 1e-12);
        }
    }
}
