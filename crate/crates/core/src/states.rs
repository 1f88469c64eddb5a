//! One- and two-particle Bell states, the sixteen `Φ^i` and their mixtures.
//!
//! Single-particle ordering is momentum-major:
//! `|p₁,+½⟩ → 0`, `|p₁,−½⟩ → 1`, `|p₂,+½⟩ → 2`, `|p₂,−½⟩ → 3`,
//! and the two-particle index is `4·k_A + k_B`.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{c, hermitian_eigensystem, tensor_vec, ComplexMatrix, HermitianOperator};

pub const DEFAULT_THETA: f64 = FRAC_PI_4;

pub const NORM_TOL: f64 = 1e-12;

pub const WEIGHT_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Spin {
    Up,
    Down,
}

/// Single-particle index of `|p_m, s⟩`, `m ∈ {1, 2}`.
pub fn single_index(momentum: usize, spin: Spin) -> Result<usize> {
    if !(1..=2).contains(&momentum) {
        return Err(Error::IndexOutOfRange {
            index: momentum,
            range: "1..=2",
        });
    }
    Ok(2 * (momentum - 1) + if spin == Spin::Up { 0 } else { 1 })
}

pub fn two_particle_index(k_a: usize, k_b: usize) -> usize {
    4 * k_a + k_b
}

#[derive(Clone, Debug, PartialEq)]
pub struct PureState16 {
    amps: Vec<Complex64>,
}

impl PureState16 {
    pub fn new(amps: Vec<Complex64>) -> Result<Self> {
        if amps.len() != 16 {
            return Err(Error::DimensionMismatch {
                expected: "16 amplitudes".into(),
                actual: format!("{} amplitudes", amps.len()),
            });
        }
        let norm = vec_norm(&amps);
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized { norm });
        }
        Ok(Self { amps })
    }

    /// Rescales to unit norm. Fails on the zero vector.
    pub fn normalized(amps: Vec<Complex64>) -> Result<Self> {
        let norm = vec_norm(&amps);
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::NotNormalized { norm });
        }
        Self::new(amps.into_iter().map(|z| z / norm).collect())
    }

    pub fn basis(k: usize) -> Result<Self> {
        if k >= 16 {
            return Err(Error::IndexOutOfRange {
                index: k,
                range: "0..16",
            });
        }
        let mut amps = vec![c(0.0, 0.0); 16];
        amps[k] = c(1.0, 0.0);
        Ok(Self { amps })
    }

    pub fn product(a: &[Complex64], b: &[Complex64]) -> Result<Self> {
        Self::new(tensor_vec(a, b))
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm(&self) -> f64 {
        vec_norm(&self.amps)
    }

    /// `⟨self|other⟩`
    pub fn inner(&self, other: &Self) -> Complex64 {
        self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum()
    }

    pub fn projector(&self) -> HermitianOperator {
        HermitianOperator::projector(&self.amps)
    }

    /// Amplitudes with the two particles exchanged.
    pub fn swapped(&self) -> Self {
        let amps = (0..16).map(|k| self.amps[4 * (k % 4) + k / 4]).collect();
        Self { amps }
    }

    /// `N` with `N_{k_A k_B} = ⟨k_A k_B|ψ⟩`, so `σ_A = N N†`.
    pub fn coefficient_matrix(&self) -> ComplexMatrix {
        ComplexMatrix::from_fn(4, 4, |i, j| self.amps[4 * i + j])
    }
}

pub(crate) fn vec_norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// `ψ₁ = (|0⟩+|3⟩)/√2`, `ψ₂ = (|0⟩−|3⟩)/√2`,
/// `ψ₃ = (|2⟩+|1⟩)/√2`, `ψ₄ = (|2⟩−|1⟩)/√2`.
pub fn one_particle_bell(index: usize) -> Result<[Complex64; 4]> {
    let h = FRAC_1_SQRT_2;
    let z = c(0.0, 0.0);
    let v = match index {
        1 => [c(h, 0.0), z, z, c(h, 0.0)],
        2 => [c(h, 0.0), z, z, c(-h, 0.0)],
        3 => [z, c(h, 0.0), c(h, 0.0), z],
        4 => [z, c(-h, 0.0), c(h, 0.0), z],
        _ => {
            return Err(Error::IndexOutOfRange {
                index,
                range: "1..=4",
            })
        }
    };
    Ok(v)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BellKind {
    /// `(ψ_a ψ_a + ψ_b ψ_b)/√2`
    PsiPlus,
    /// `(ψ_a ψ_a − ψ_b ψ_b)/√2`
    PsiMinus,
    /// `(ψ_a ψ_b + ψ_b ψ_a)/√2`
    PhiPlus,
    /// `(ψ_a ψ_b − ψ_b ψ_a)/√2`
    PhiMinus,
}

pub const BELL_PAIRS: [(usize, usize); 6] = [(1, 2), (3, 4), (1, 3), (2, 4), (1, 4), (2, 3)];

pub fn two_particle_bell(kind: BellKind, pair: (usize, usize)) -> Result<PureState16> {
    if !BELL_PAIRS.contains(&pair) {
        return Err(Error::IndexOutOfRange {
            index: 10 * pair.0 + pair.1,
            range: "pairs (1,2),(3,4),(1,3),(2,4),(1,4),(2,3)",
        });
    }
    let a = one_particle_bell(pair.0)?;
    let b = one_particle_bell(pair.1)?;
    let (first, second, sign) = match kind {
        BellKind::PsiPlus => (tensor_vec(&a, &a), tensor_vec(&b, &b), 1.0),
        BellKind::PsiMinus => (tensor_vec(&a, &a), tensor_vec(&b, &b), -1.0),
        BellKind::PhiPlus => (tensor_vec(&a, &b), tensor_vec(&b, &a), 1.0),
        BellKind::PhiMinus => (tensor_vec(&a, &b), tensor_vec(&b, &a), -1.0),
    };
    let amps = first
        .iter()
        .zip(&second)
        .map(|(x, y)| (x + y * sign) * FRAC_1_SQRT_2)
        .collect();
    PureState16::new(amps)
}

/// `Φ^i(θ)` for `i ∈ 1..=16`; orthonormal for every θ.
pub fn phi_state(i: usize, theta: f64) -> Result<PureState16> {
    use BellKind::*;
    // (kind, leading pair, trailing pair, sign of the sine term)
    let (kind, lead, trail, sgn) = match i {
        1 => (PsiPlus, (1, 2), (3, 4), 1.0),
        2 => (PsiMinus, (1, 2), (3, 4), 1.0),
        3 => (PsiPlus, (3, 4), (1, 2), -1.0),
        4 => (PsiMinus, (3, 4), (1, 2), -1.0),
        5 => (PhiPlus, (1, 2), (3, 4), 1.0),
        6 => (PhiMinus, (1, 2), (3, 4), 1.0),
        7 => (PhiPlus, (3, 4), (1, 2), -1.0),
        8 => (PhiMinus, (3, 4), (1, 2), -1.0),
        9 => (PhiPlus, (2, 4), (1, 3), -1.0),
        10 => (PhiPlus, (1, 3), (2, 4), 1.0),
        11 => (PhiMinus, (2, 4), (1, 3), -1.0),
        12 => (PhiMinus, (1, 3), (2, 4), 1.0),
        13 => (PhiPlus, (2, 3), (1, 4), -1.0),
        14 => (PhiPlus, (1, 4), (2, 3), 1.0),
        15 => (PhiMinus, (2, 3), (1, 4), -1.0),
        16 => (PhiMinus, (1, 4), (2, 3), 1.0),
        _ => {
            return Err(Error::IndexOutOfRange {
                index: i,
                range: "1..=16",
            })
        }
    };
    let u = two_particle_bell(kind, lead)?;
    let v = two_particle_bell(kind, trail)?;
    let (s, co) = theta.sin_cos();
    let amps = u
        .amplitudes()
        .iter()
        .zip(v.amplitudes())
        .map(|(x, y)| x * co + y * (sgn * s))
        .collect();
    PureState16::normalized(amps)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Parity {
    Odd,
    Even,
    #[default]
    Free,
}

/// Mixture weights `q₁…q₁₆`, indexed from 1.
#[derive(Clone, Debug, PartialEq)]
pub struct MixtureWeights {
    q: [f64; 16],
    parity: Parity,
}

impl MixtureWeights {
    /// Validates nonnegativity, parity and unit sum (within [`WEIGHT_TOL`]),
    /// then renormalizes exactly.
    pub fn new(q: [f64; 16], parity: Parity) -> Result<Self> {
        for (k, &x) in q.iter().enumerate() {
            if !x.is_finite() || x < 0.0 {
                return Err(Error::InvalidWeights(format!(
                    "q{} = {x} is not a probability",
                    k + 1
                )));
            }
            let i = k + 1;
            let forbidden = match parity {
                Parity::Odd => i % 2 == 0,
                Parity::Even => i % 2 == 1,
                Parity::Free => false,
            };
            if forbidden && x != 0.0 {
                return Err(Error::InvalidWeights(format!(
                    "q{i} = {x} violates {parity:?} parity"
                )));
            }
        }
        let total: f64 = q.iter().sum();
        if (total - 1.0).abs() > WEIGHT_TOL {
            return Err(Error::InvalidWeights(format!(
                "weights sum to {total}, expected 1"
            )));
        }
        let mut q = q;
        q.iter_mut().for_each(|x| *x /= total);
        Ok(Self { q, parity })
    }

    /// Builds from sparse `(index, weight)` pairs with 1-based indices.
    pub fn from_pairs(pairs: &[(usize, f64)], parity: Parity) -> Result<Self> {
        let mut q = [0.0; 16];
        for &(i, x) in pairs {
            if !(1..=16).contains(&i) {
                return Err(Error::IndexOutOfRange {
                    index: i,
                    range: "1..=16",
                });
            }
            q[i - 1] += x;
        }
        Self::new(q, parity)
    }

    pub fn pure(i: usize) -> Result<Self> {
        let parity = if i % 2 == 1 { Parity::Odd } else { Parity::Even };
        Self::from_pairs(&[(i, 1.0)], parity)
    }

    pub fn uniform_odd() -> Self {
        let pairs: Vec<_> = (1..=16).step_by(2).map(|i| (i, 0.125)).collect();
        Self::from_pairs(&pairs, Parity::Odd).expect("uniform weights are valid")
    }

    /// `q_i` with 1-based `i`; zero outside `1..=16`.
    pub fn get(&self, i: usize) -> f64 {
        if (1..=16).contains(&i) {
            self.q[i - 1]
        } else {
            0.0
        }
    }

    pub fn as_array(&self) -> &[f64; 16] {
        &self.q
    }

    pub fn parity(&self) -> Parity {
        self.parity
    }

    /// True when every even-indexed weight vanishes, whatever the declared parity.
    pub fn is_odd_supported(&self) -> bool {
        (2..=16).step_by(2).all(|i| self.get(i) == 0.0)
    }

    pub fn require_odd(&self) -> Result<()> {
        if self.parity == Parity::Even || !self.is_odd_supported() {
            return Err(Error::InvalidWeights(
                "operation requires odd-parity weights (q_i = 0 for even i)".into(),
            ));
        }
        Ok(())
    }
}

/// `ρ = Σ q_i |Φ^i⟩⟨Φ^i|`.
pub fn build_mixture(weights: &MixtureWeights, theta: f64) -> Result<HermitianOperator> {
    let mut rho = HermitianOperator::from_real_diagonal(&[0.0; 16]);
    for i in 1..=16 {
        let q = weights.get(i);
        if q == 0.0 {
            continue;
        }
        rho = rho.combine(1.0, &phi_state(i, theta)?.projector(), q);
    }
    Ok(rho)
}

/// Smallest eigenvalue, for PSD checks.
pub fn min_eigenvalue(rho: &HermitianOperator) -> f64 {
    hermitian_eigensystem(rho).values[0]
}
