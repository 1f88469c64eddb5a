//! Witness construction through the correlation matrix.
//!
//! A witness is parameterized as `W = I₄⊗I₄ + Σ_{ij} A_ij Q_i⊗Q_j` over a
//! Hilbert-Schmidt orthonormal Hermitian basis `{Q_i}`. Then
//! `Tr(Wρ) = 1 + Σ A_ij ρ̃_ij` with `ρ̃_ij = Tr(ρ Q_i⊗Q_j)`. Minimizing over
//! `AᵗA ≤ I` gives `A = −½ρ̃Z⁺`, `Z = ½(ρ̃ᵗρ̃)^½`, and the optimum
//! `1 − Tr√(ρ̃ᵗρ̃)`.

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::{
    c, eigenvalues, hermitian_eigensystem, partial_transpose, tensor_product, BipartiteShape, ComplexMatrix,
    HermitianOperator, Party, RealMatrix,
};
use crate::measures::kappa;
use crate::states::{phi_state, MixtureWeights, DEFAULT_THETA};

/// Singular values of `ρ̃` at or below this are treated as kernel.
pub const RANGE_TOL: f64 = 1e-10;

/// Imaginary parts of `ρ̃` above this signal a non-Hermitian input.
pub const IMAGINARY_TOL: f64 = 1e-10;

/// `|x| ≤ TIE_TOL` makes a sign in the coefficient table undefined.
pub const TIE_TOL: f64 = 1e-12;

/// Index pairs of the symmetric and antisymmetric basis members (0-based).
const SYM_PAIRS: [(usize, usize); 6] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];
const ANTI_PAIRS: [(usize, usize); 6] = [(1, 0), (3, 0), (3, 1), (2, 0), (2, 1), (3, 2)];

#[derive(Clone, Debug)]
pub struct OperatorBasis {
    q: Vec<ComplexMatrix>,
}

/// `Q¹…Q⁶ = (E_ij+E_ji)/√2`, `Q⁷…Q¹² = i(E_ji−E_ij)/√2`, `Q¹³…Q¹⁶ = E_ii`.
pub fn build_operator_basis() -> OperatorBasis {
    let unit = |i: usize, j: usize| {
        let mut m = ComplexMatrix::zeros(4, 4);
        m[(i, j)] = c(1.0, 0.0);
        m
    };
    let mut q = Vec::with_capacity(16);
    for (i, j) in SYM_PAIRS {
        q.push((&unit(i, j) + &unit(j, i)).scale_real(FRAC_1_SQRT_2));
    }
    for (j, i) in ANTI_PAIRS {
        q.push((&unit(j, i) - &unit(i, j)).scale(c(0.0, FRAC_1_SQRT_2)));
    }
    for i in 0..4 {
        q.push(unit(i, i));
    }
    OperatorBasis { q }
}

impl OperatorBasis {
    /// `Q^i`, 1-based.
    pub fn get(&self, i: usize) -> &ComplexMatrix {
        &self.q[i - 1]
    }

    pub fn members(&self) -> &[ComplexMatrix] {
        &self.q
    }

    /// `I + Σ A_ij Q_i⊗Q_j`.
    pub fn witness_from(&self, a: &RealMatrix) -> Result<WitnessOperator> {
        if a.nrows() != 16 || a.ncols() != 16 {
            return Err(Error::DimensionMismatch {
                expected: "16x16 coefficient matrix".into(),
                actual: format!("{}x{}", a.nrows(), a.ncols()),
            });
        }
        let mut w = ComplexMatrix::identity(16);
        for i in 0..16 {
            for j in 0..16 {
                let aij = a[(i, j)];
                if aij != 0.0 {
                    w = &w + &tensor_product(&self.q[i], &self.q[j]).scale_real(aij);
                }
            }
        }
        Ok(WitnessOperator {
            w: HermitianOperator::new(w)?,
        })
    }
}

#[derive(Clone, Debug)]
pub struct CorrelationMatrix {
    pub rho_tilde: RealMatrix,
}

/// `ρ̃_ij = Tr(ρ · Q_i⊗Q_j)`.
pub fn correlation_matrix(rho: &HermitianOperator, basis: &OperatorBasis) -> Result<CorrelationMatrix> {
    if rho.dim() != 16 {
        return Err(Error::DimensionMismatch {
            expected: "16x16 operator".into(),
            actual: format!("{0}x{0}", rho.dim()),
        });
    }
    let m = rho.matrix();
    // X_i[b][d] = Σ_{a,c} ρ[4a+b, 4c+d] Q_i[c, a]
    let partial: Vec<[[Complex64; 4]; 4]> = basis
        .q
        .iter()
        .map(|qi| {
            let mut x = [[c(0.0, 0.0); 4]; 4];
            for a in 0..4 {
                for cc in 0..4 {
                    let qca = qi[(cc, a)];
                    if qca == c(0.0, 0.0) {
                        continue;
                    }
                    for (b, row) in x.iter_mut().enumerate() {
                        for (d, entry) in row.iter_mut().enumerate() {
                            *entry += m[(4 * a + b, 4 * cc + d)] * qca;
                        }
                    }
                }
            }
            x
        })
        .collect();
    let full = ComplexMatrix::from_fn(16, 16, |i, j| {
        let qj = &basis.q[j];
        let mut acc = c(0.0, 0.0);
        for b in 0..4 {
            for d in 0..4 {
                acc += partial[i][b][d] * qj[(d, b)];
            }
        }
        acc
    });
    Ok(CorrelationMatrix {
        rho_tilde: full.to_real(IMAGINARY_TOL)?,
    })
}

#[derive(Clone, Debug)]
pub struct WitnessCoefficients {
    pub a: RealMatrix,
    pub lagrange_z: RealMatrix,
    pub min_value: f64,
    /// Singular values of `ρ̃`, descending.
    pub singular_values: Vec<f64>,
}

#[derive(Clone, Debug)]
pub struct WitnessOperator {
    pub w: HermitianOperator,
}

impl WitnessOperator {
    pub fn spectrum(&self) -> Vec<f64> {
        eigenvalues(&self.w)
    }
}

/// Optimal witness for `ρ` over `AᵗA ≤ I`. On the kernel of `ρ̃` the
/// coefficients are set to zero, so a vanishing `ρ̃` yields `W = I`.
pub fn kkt_witness(rho: &HermitianOperator) -> Result<(WitnessCoefficients, WitnessOperator)> {
    let basis = build_operator_basis();
    let rt = correlation_matrix(rho, &basis)?.rho_tilde;
    let svd = rt.clone().svd(true, true);
    let u = svd.u.as_ref().expect("u requested");
    let v_t = svd.v_t.as_ref().expect("v_t requested");
    let mut order: Vec<usize> = (0..16).collect();
    order.sort_by(|&x, &y| svd.singular_values[y].total_cmp(&svd.singular_values[x]));
    let mut a = RealMatrix::zeros(16, 16);
    let mut z = RealMatrix::zeros(16, 16);
    for &k in &order {
        let s = svd.singular_values[k];
        let uk = u.column(k);
        let vk = v_t.row(k).transpose();
        z += &vk * vk.transpose() * (0.5 * s);
        if s > RANGE_TOL {
            a -= uk * vk.transpose();
        }
    }
    let singular_values: Vec<f64> = order.iter().map(|&k| svd.singular_values[k]).collect();
    let min_value = 1.0 - singular_values.iter().sum::<f64>();
    let witness = basis.witness_from(&a)?;
    Ok((
        WitnessCoefficients {
            a,
            lagrange_z: z,
            min_value,
            singular_values,
        },
        witness,
    ))
}

/// `Tr(Wρ)`.
pub fn detect(w: &WitnessOperator, rho: &HermitianOperator) -> Result<f64> {
    if w.w.dim() != rho.dim() {
        return Err(Error::DimensionMismatch {
            expected: format!("{0}x{0}", w.w.dim()),
            actual: format!("{0}x{0}", rho.dim()),
        });
    }
    Ok(w.w.trace_product(rho))
}

/// `I − 4|Φ¹⟩⟨Φ¹|` at the Bell angle.
pub fn reference_witness() -> WitnessOperator {
    let phi = phi_state(1, DEFAULT_THETA).expect("Φ¹ exists");
    WitnessOperator {
        w: HermitianOperator::identity(16).combine(1.0, &phi.projector(), -4.0),
    }
}

/// Closed form of `Tr(Wρ)` for [`reference_witness`] on an effectively
/// boosted odd mixture: `1 − 2q₁ − 2q₇ + 4(q₇ − q₁)κ(θ₁, θ₂)`.
pub fn reference_detection_value(weights: &MixtureWeights, theta1: f64, theta2: f64) -> Result<f64> {
    weights.require_odd()?;
    let (q1, q7) = (weights.get(1), weights.get(7));
    Ok(1.0 - 2.0 * q1 - 2.0 * q7 + 4.0 * (q7 - q1) * kappa(theta1, theta2)?)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BCoefficients {
    pub b: [f64; 8],
}

impl BCoefficients {
    /// ```text
    /// b1 = q1+q3+q5+q7     b2 = q9+q11+q13+q15
    /// b3 = q1−q3−q5+q7     b4 = q9−q11+q13−q15
    /// b5 = q1−q3+q5−q7     b6 = q9−q11−q13+q15
    /// b7 = q1+q3−q5−q7     b8 = q9+q11−q13−q15
    /// ```
    pub fn from_weights(w: &MixtureWeights) -> Self {
        let q = |i| w.get(i);
        Self {
            b: [
                q(1) + q(3) + q(5) + q(7),
                q(9) + q(11) + q(13) + q(15),
                q(1) - q(3) - q(5) + q(7),
                q(9) - q(11) + q(13) - q(15),
                q(1) - q(3) + q(5) - q(7),
                q(9) - q(11) - q(13) + q(15),
                q(1) + q(3) - q(5) - q(7),
                q(9) + q(11) - q(13) - q(15),
            ],
        }
    }

    /// `b_k`, 1-based.
    pub fn get(&self, k: usize) -> f64 {
        self.b[k - 1]
    }

    /// `q9 − q11 − q13 − q15`, an alternative reading of `b8` that does not
    /// reproduce the optimum; kept for comparison.
    pub fn alternative_b8(w: &MixtureWeights) -> f64 {
        w.get(9) - w.get(11) - w.get(13) - w.get(15)
    }

    fn check_ties(&self) -> Result<()> {
        const NAMES: [&str; 8] = ["b1", "b2", "b3", "b4", "b5", "b6", "b7", "b8"];
        for k in [0, 2, 4, 6] {
            let (x, y) = (self.b[k], self.b[k + 1]);
            if (x - y).abs() <= TIE_TOL {
                return Err(Error::CoefficientTie {
                    first: NAMES[k],
                    second: NAMES[k + 1],
                    lhs: x,
                    rhs: y,
                });
            }
            if (x + y).abs() <= TIE_TOL {
                return Err(Error::CoefficientTie {
                    first: NAMES[k],
                    second: "-b (partner)",
                    lhs: x,
                    rhs: -y,
                });
            }
        }
        Ok(())
    }
}

/// Coefficient matrix in basis order, with access by table labels.
#[derive(Clone, Debug, PartialEq)]
pub struct CoefficientTable {
    pub a: RealMatrix,
}

/// Table label (1-based) → basis index (1-based). Labels 1–4 are the
/// diagonal members `E_ii`, followed by the off-diagonal ones.
pub const LABEL_TO_BASIS: [usize; 16] = [13, 14, 15, 16, 1, 2, 3, 4, 5, 6, 7, 9, 8, 11, 10, 12];

impl CoefficientTable {
    /// `A_{ij}` addressed by table labels.
    pub fn labelled(&self, i: usize, j: usize) -> f64 {
        self.a[(LABEL_TO_BASIS[i - 1] - 1, LABEL_TO_BASIS[j - 1] - 1)]
    }
}

fn sgn(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else {
        -1.0
    }
}

/// `(diagonal, off-diagonal)` entries of the 2×2 block driven by `(x, y)`.
fn sign_block(x: f64, y: f64) -> (f64, f64) {
    (-0.5 * (sgn(x + y) + sgn(x - y)), -0.5 * (sgn(x + y) - sgn(x - y)))
}

/// Closed-form optimal coefficients for an odd mixture, as sign functions of
/// the `b` combinations. Independent of the boost angles.
pub fn coefficient_table(weights: &MixtureWeights) -> Result<CoefficientTable> {
    weights.require_odd()?;
    let b = BCoefficients::from_weights(weights);
    b.check_ties()?;
    let mut a = RealMatrix::zeros(16, 16);
    let mut put = |i: usize, j: usize, x: f64, y: f64, s: f64| {
        let (d, o) = sign_block(x, y);
        let (i, j) = (i - 1, j - 1);
        a[(i, i)] = s * d;
        a[(j, j)] = s * d;
        a[(i, j)] = s * o;
        a[(j, i)] = s * o;
    };
    let g = |k| b.get(k);
    put(13, 14, g(1), g(2), 1.0);
    put(15, 16, g(1), g(2), 1.0);
    put(2, 5, g(5), g(6), 1.0);
    put(9, 10, g(5), g(6), -1.0);
    put(3, 4, g(7), g(8), 1.0);
    put(8, 11, g(7), g(8), -1.0);
    a[(0, 0)] = -sgn(g(3) + g(4));
    a[(5, 5)] = -sgn(g(3) + g(4));
    a[(6, 6)] = sgn(g(3) - g(4));
    a[(11, 11)] = sgn(g(3) - g(4));
    Ok(CoefficientTable { a })
}

#[derive(Clone, Debug)]
pub struct FloorReport {
    pub samples: usize,
    /// Minimum of `Tr(Wρ_s)` over the random product states.
    pub raw_min: f64,
    /// Minimum after alternating local refinement of the best samples.
    pub polished_min: f64,
    /// `1 − σ_max(A)`, the guaranteed floor when `σ_max ≤ 1`.
    pub predicted_floor: f64,
}

/// Samples per independently seeded stream.
const SHARD: usize = 4096;
/// Best samples kept per shard and refined overall.
const KEEP_PER_SHARD: usize = 4;
const POLISH_COUNT: usize = 32;
const POLISH_ITERS: usize = 200;

fn haar_vector(rng: &mut ChaCha20Rng) -> [Complex64; 4] {
    let mut v = [c(0.0, 0.0); 4];
    for z in v.iter_mut() {
        *z = c(StandardNormal.sample(rng), StandardNormal.sample(rng));
    }
    let n = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    v.map(|z| z / n)
}

fn product_expectation(w: &ComplexMatrix, a: &[Complex64; 4], b: &[Complex64; 4]) -> f64 {
    let v: Vec<Complex64> = a.iter().flat_map(|x| b.iter().map(move |y| x * y)).collect();
    w.sandwich(&v, &v).re
}

/// Lowest eigenvector of the 4×4 operator obtained by fixing one factor.
fn local_minimizer(w: &ComplexMatrix, fixed: &[Complex64; 4], fixed_is_b: bool) -> [Complex64; 4] {
    let m = ComplexMatrix::from_fn(4, 4, |i, k| {
        let mut acc = c(0.0, 0.0);
        for j in 0..4 {
            for l in 0..4 {
                let (r, s) = if fixed_is_b {
                    (4 * i + j, 4 * k + l)
                } else {
                    (4 * j + i, 4 * l + k)
                };
                acc += fixed[j].conj() * w[(r, s)] * fixed[l];
            }
        }
        acc
    });
    let op = HermitianOperator::new(m).expect("compression of a Hermitian operator");
    let v = hermitian_eigensystem(&op).vector(0);
    [v[0], v[1], v[2], v[3]]
}

fn polish(w: &ComplexMatrix, mut a: [Complex64; 4], mut b: [Complex64; 4]) -> f64 {
    let mut best = product_expectation(w, &a, &b);
    for _ in 0..POLISH_ITERS {
        a = local_minimizer(w, &b, true);
        b = local_minimizer(w, &a, false);
        let v = product_expectation(w, &a, &b);
        let done = best - v < 1e-16;
        best = best.min(v);
        if done {
            break;
        }
    }
    best
}

/// Minimum of `Tr(Wρ_s)` over seeded Haar-random pure product states.
///
/// Samples are split into fixed-size shards, each drawing from its own
/// ChaCha stream, so the result depends on `seed` only, never on the thread
/// count.
pub fn separability_floor(w: &HermitianOperator, samples: usize, seed: u64) -> Result<FloorReport> {
    if w.dim() != 16 {
        return Err(Error::DimensionMismatch {
            expected: "16x16 witness".into(),
            actual: format!("{0}x{0}", w.dim()),
        });
    }
    let wm = w.matrix();
    let shards = samples.div_ceil(SHARD);
    type Candidate = (f64, [Complex64; 4], [Complex64; 4]);
    let mut best: Vec<Candidate> = (0..shards)
        .into_par_iter()
        .flat_map_iter(|shard| {
            let mut rng = ChaCha20Rng::seed_from_u64(seed);
            rng.set_stream(shard as u64);
            let count = SHARD.min(samples - shard * SHARD);
            let mut local: Vec<Candidate> = Vec::with_capacity(KEEP_PER_SHARD + 1);
            for _ in 0..count {
                let a = haar_vector(&mut rng);
                let b = haar_vector(&mut rng);
                let v = product_expectation(wm, &a, &b);
                if local.len() < KEEP_PER_SHARD || v < local[local.len() - 1].0 {
                    local.push((v, a, b));
                    local.sort_by(|x, y| x.0.total_cmp(&y.0));
                    local.truncate(KEEP_PER_SHARD);
                }
            }
            local
        })
        .collect();
    best.sort_by(|x, y| x.0.total_cmp(&y.0));
    let raw_min = best.first().map_or(f64::INFINITY, |x| x.0);
    let polished_min = best
        .par_iter()
        .take(POLISH_COUNT)
        .map(|(_, a, b)| polish(wm, *a, *b))
        .reduce(|| f64::INFINITY, f64::min)
        .min(raw_min);
    Ok(FloorReport {
        samples,
        raw_min,
        polished_min,
        predicted_floor: f64::NAN,
    })
}

/// [`separability_floor`] for the witness built from coefficients `A`.
pub fn separability_floor_check(a: &RealMatrix, samples: usize, seed: u64) -> Result<FloorReport> {
    let w = build_operator_basis().witness_from(a)?;
    let sigma_max = a.clone().singular_values().iter().cloned().fold(0.0, f64::max);
    let mut report = separability_floor(&w.w, samples, seed)?;
    report.predicted_floor = 1.0 - sigma_max;
    Ok(report)
}

/// `W = P + Q₁^{T_A}` with `Q₁` the positive part of `W^{T_A}`.
#[derive(Clone, Debug)]
pub struct Decomposition {
    pub p: HermitianOperator,
    pub q1: HermitianOperator,
    pub p_min_eigenvalue: f64,
    pub q1_min_eigenvalue: f64,
}

impl Decomposition {
    pub fn is_certificate(&self, tol: f64) -> bool {
        self.p_min_eigenvalue >= -tol && self.q1_min_eigenvalue >= -tol
    }
}

pub fn decompose(w: &WitnessOperator) -> Result<Decomposition> {
    let shape = BipartiteShape::FOUR_BY_FOUR;
    let wt = partial_transpose(&w.w, shape, Party::A)?;
    let q1 = HermitianOperator::new(hermitian_eigensystem(&wt).map_spectrum(|x| x.max(0.0)))?;
    let q1_t = partial_transpose(&q1, shape, Party::A)?;
    let p = w.w.combine(1.0, &q1_t, -1.0);
    Ok(Decomposition {
        p_min_eigenvalue: eigenvalues(&p)[0],
        q1_min_eigenvalue: eigenvalues(&q1)[0],
        p,
        q1,
    })
}
