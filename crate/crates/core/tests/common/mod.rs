//! Independent oracles shared by the integration tests. Nothing here calls
//! the library's decompositions; the point is to check them.
#![allow(dead_code)]

use doew::linalg::{c, ComplexMatrix, HermitianOperator};
use nalgebra::{Matrix4, Vector3};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, StandardNormal};

pub fn rng(seed: u64) -> ChaCha20Rng {
    ChaCha20Rng::seed_from_u64(seed)
}

// ---------------------------------------------------------------- Lorentz

/// Pure boost with rapidity `rap` along unit `n`.
pub fn lorentz_boost(rap: f64, n: Vector3<f64>) -> Matrix4<f64> {
    let (g, s) = (rap.cosh(), rap.sinh());
    let mut l = Matrix4::identity();
    l[(0, 0)] = g;
    for i in 0..3 {
        l[(0, i + 1)] = s * n[i];
        l[(i + 1, 0)] = s * n[i];
        for j in 0..3 {
            l[(i + 1, j + 1)] += (g - 1.0) * n[i] * n[j];
        }
    }
    l
}

/// Standard boost taking the rest momentum of unit mass to `p`.
pub fn standard_boost(p: Vector3<f64>) -> Matrix4<f64> {
    let m = p.norm();
    if m == 0.0 {
        return Matrix4::identity();
    }
    lorentz_boost(m.asinh(), p / m)
}

/// Wigner rotation `L⁻¹(Λp) Λ L(p)` for unit mass, rapidity `delta` along
/// `p_hat`, observer rapidity `alpha` along `e_hat`. Returns the rotation
/// block and the residual of the time-time entry from 1.
pub fn wigner_rotation_oracle(
    alpha: f64,
    e_hat: [f64; 3],
    delta: f64,
    p_hat: [f64; 3],
) -> (nalgebra::Matrix3<f64>, f64) {
    let e = Vector3::from(e_hat);
    let ph = Vector3::from(p_hat);
    let p = ph * delta.sinh();
    let lam = lorentz_boost(alpha, e);
    let p4 = nalgebra::Vector4::new(delta.cosh(), p[0], p[1], p[2]);
    let lp = lam * p4;
    let lp3 = Vector3::new(lp[1], lp[2], lp[3]);
    // L(q)⁻¹ is the boost with the opposite rapidity.
    let inv = {
        let m = lp3.norm();
        if m == 0.0 {
            Matrix4::identity()
        } else {
            lorentz_boost(-m.asinh(), lp3 / m)
        }
    };
    let w = inv * lam * standard_boost(p);
    let r = w.fixed_view::<3, 3>(1, 1).into_owned();
    (r, (w[(0, 0)] - 1.0).abs())
}

/// `(cos(Ω/2), sin(Ω/2)·n̂)` in the library's convention, recovered from a
/// rotation matrix. The library's axis is the negative of the active axis.
pub fn half_angle_from_rotation(r: &nalgebra::Matrix3<f64>) -> (f64, [f64; 3]) {
    let cos_omega = (r.trace() - 1.0) / 2.0;
    let ch = ((1.0 + cos_omega) / 2.0).max(0.0).sqrt();
    let axis = [
        (r[(2, 1)] - r[(1, 2)]) / 2.0,
        (r[(0, 2)] - r[(2, 0)]) / 2.0,
        (r[(1, 0)] - r[(0, 1)]) / 2.0,
    ];
    (ch, axis.map(|a| -a / (2.0 * ch)))
}

// ---------------------------------------------------------------- Jacobi

/// Eigenvalues of a real symmetric matrix by cyclic Jacobi rotations.
pub fn jacobi_eigenvalues(mut a: Vec<Vec<f64>>) -> Vec<f64> {
    let n = a.len();
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i][j] * a[i][j])
            .sum();
        if off < 1e-30 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if a[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let cs = 1.0 / (t * t + 1.0).sqrt();
                let sn = t * cs;
                for row in a.iter_mut() {
                    let (akp, akq) = (row[p], row[q]);
                    row[p] = cs * akp - sn * akq;
                    row[q] = sn * akp + cs * akq;
                }
                let (rp, rq) = (a[p].clone(), a[q].clone());
                for k in 0..n {
                    a[p][k] = cs * rp[k] - sn * rq[k];
                    a[q][k] = sn * rp[k] + cs * rq[k];
                }
            }
        }
    }
    let mut ev: Vec<f64> = (0..n).map(|i| a[i][i]).collect();
    ev.sort_by(f64::total_cmp);
    ev
}

/// Eigenvalues of a Hermitian matrix through the real embedding
/// `[[Re, −Im], [Im, Re]]`, whose spectrum is that of `H` doubled.
pub fn hermitian_eigenvalues_oracle(h: &ComplexMatrix) -> Vec<f64> {
    let n = h.rows();
    let mut big = vec![vec![0.0; 2 * n]; 2 * n];
    for i in 0..n {
        for j in 0..n {
            let z = h[(i, j)];
            big[i][j] = z.re;
            big[i + n][j + n] = z.re;
            big[i][j + n] = -z.im;
            big[i + n][j] = z.im;
        }
    }
    jacobi_eigenvalues(big).into_iter().step_by(2).collect()
}

/// Sum of singular values via the Jacobi spectrum of `MᵗM`.
pub fn nuclear_norm_oracle(m: &nalgebra::DMatrix<f64>) -> f64 {
    let mtm = m.transpose() * m;
    let n = mtm.nrows();
    let rows = (0..n).map(|i| (0..n).map(|j| mtm[(i, j)]).collect()).collect();
    jacobi_eigenvalues(rows)
        .into_iter()
        .map(|x| x.max(0.0).sqrt())
        .sum()
}

// ---------------------------------------------------------------- bipartite

/// `⟨a b|ρ^{T_A}|c d⟩ = ⟨c b|ρ|a d⟩` written with explicit 4-index loops.
pub fn partial_transpose_a_oracle(m: &ComplexMatrix) -> ComplexMatrix {
    let mut out = ComplexMatrix::zeros(16, 16);
    for a in 0..4 {
        for b in 0..4 {
            for cc in 0..4 {
                for d in 0..4 {
                    out[(4 * a + b, 4 * cc + d)] = m[(4 * cc + b, 4 * a + d)];
                }
            }
        }
    }
    out
}

pub fn partial_trace_b_oracle(m: &ComplexMatrix) -> ComplexMatrix {
    let mut out = ComplexMatrix::zeros(4, 4);
    for a in 0..4 {
        for cc in 0..4 {
            for b in 0..4 {
                out[(a, cc)] += m[(4 * a + b, 4 * cc + b)];
            }
        }
    }
    out
}

// ---------------------------------------------------------------- random

pub fn haar_vector(rng: &mut impl Rng, n: usize) -> Vec<Complex64> {
    let v: Vec<Complex64> = (0..n)
        .map(|_| c(StandardNormal.sample(rng), StandardNormal.sample(rng)))
        .collect();
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    v.into_iter().map(|z| z / norm).collect()
}

pub fn random_complex(rng: &mut impl Rng, rows: usize, cols: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| {
        c(StandardNormal.sample(rng), StandardNormal.sample(rng))
    })
}

pub fn random_hermitian(rng: &mut impl Rng, n: usize) -> HermitianOperator {
    let g = random_complex(rng, n, n);
    HermitianOperator::new((&g + &g.adjoint()).scale_real(0.5)).unwrap()
}

pub fn random_psd(rng: &mut impl Rng, n: usize) -> HermitianOperator {
    let g = random_complex(rng, n, n);
    HermitianOperator::new(&g * &g.adjoint()).unwrap()
}

pub fn random_density(rng: &mut impl Rng, n: usize) -> HermitianOperator {
    let p = random_psd(rng, n);
    let t = p.trace();
    p.scale(1.0 / t)
}

/// Uniform point on the simplex over the eight odd indices.
pub fn random_odd_weights(rng: &mut impl Rng) -> doew::MixtureWeights {
    let x: Vec<f64> = (0..8).map(|_| -rng.random::<f64>().ln()).collect();
    let s: f64 = x.iter().sum();
    let pairs: Vec<(usize, f64)> = (0..8).map(|k| (2 * k + 1, x[k] / s)).collect();
    doew::MixtureWeights::from_pairs(&pairs, doew::Parity::Odd).unwrap()
}

/// Random weights satisfying the feasible-region constraints:
/// `q₁ = q₇`, `q₃ = q₅`, `q₉ = q₁₃`, `q₁₁ = q₁₅`, each at most ¼.
pub fn random_feasible_weights(rng: &mut impl Rng) -> doew::MixtureWeights {
    loop {
        let x: Vec<f64> = (0..4).map(|_| -rng.random::<f64>().ln()).collect();
        let s: f64 = x.iter().sum();
        let y: Vec<f64> = x.iter().map(|v| 0.5 * v / s).collect();
        if y.iter().all(|&v| v <= 0.25) {
            let pairs = [
                (1, y[0]),
                (7, y[0]),
                (3, y[1]),
                (5, y[1]),
                (9, y[2]),
                (13, y[2]),
                (11, y[3]),
                (15, y[3]),
            ];
            return doew::MixtureWeights::from_pairs(&pairs, doew::Parity::Odd).unwrap();
        }
    }
}

pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n).map(|k| a + (b - a) * k as f64 / (n - 1) as f64).collect()
}

/// Reference expansion of `Φ¹` at the Bell angle: ½ on `|kk⟩`.
pub fn phi1_oracle() -> Vec<Complex64> {
    let mut v = vec![c(0.0, 0.0); 16];
    for k in 0..4 {
        v[5 * k] = c(0.5, 0.0);
    }
    v
}

/// `c_m = cos(θ_m/2)` filter applied entrywise to a two-particle vector.
pub fn filter_oracle(v: &[Complex64], t1: f64, t2: f64) -> Vec<Complex64> {
    let cm = |k: usize| if k < 2 { (t1 / 2.0).cos() } else { (t2 / 2.0).cos() };
    let w: Vec<Complex64> = (0..16).map(|i| v[i] * cm(i / 4) * cm(i % 4)).collect();
    let n = w.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    w.into_iter().map(|z| z / n).collect()
}
