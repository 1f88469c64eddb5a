//! Entropy, Hilbert-Schmidt distance, the edge witness and the closed-form
//! boosted witness values.

use crate::error::{Error, Result};
use crate::linalg::{
    eigenvalues, hs_inner, hs_norm, partial_trace, BipartiteShape, HermitianOperator, Party,
};
use crate::relativity::half_cosines;
use crate::states::{MixtureWeights, PureState16};
use crate::witness::{BCoefficients, WitnessOperator};

/// Eigenvalues below this are exact zeros for entropy purposes.
pub const ZERO_EIGENVALUE: f64 = 1e-14;

#[derive(Clone, Debug, PartialEq)]
pub struct EntropyReport {
    /// Reduced-state eigenvalues, ascending.
    pub eigenvalues: Vec<f64>,
    pub entropy_bits: f64,
}

pub fn shannon_bits(p: &[f64]) -> f64 {
    -p.iter()
        .filter(|&&x| x > ZERO_EIGENVALUE)
        .map(|&x| x * x.log2())
        .sum::<f64>()
}

/// Entanglement entropy of a pure state, from the reduced state of party A.
/// The B reduction is computed too and must agree within 1e-10.
pub fn entropy_pure(state: &PureState16) -> Result<EntropyReport> {
    let norm = state.norm();
    if (norm - 1.0).abs() > 1e-12 {
        return Err(Error::NotNormalized { norm });
    }
    let rho = state.projector();
    let shape = BipartiteShape::FOUR_BY_FOUR;
    let ev_a = eigenvalues(&partial_trace(&rho, shape, Party::B)?);
    let ev_b = eigenvalues(&partial_trace(&rho, shape, Party::A)?);
    let (sa, sb) = (shannon_bits(&ev_a), shannon_bits(&ev_b));
    debug_assert!((sa - sb).abs() < 1e-10, "reduced entropies differ: {sa} vs {sb}");
    Ok(EntropyReport {
        eigenvalues: ev_a,
        entropy_bits: sa,
    })
}

/// `κ = h₁h₂/(h₁² + h₂²)` with `h_m = cos²(θ_m/2)`, evaluated as
/// `r/(1 + r²)`, `r = min/max`, to stay accurate when one `h` is tiny.
pub fn kappa(theta1: f64, theta2: f64) -> Result<f64> {
    let (c1, c2) = half_cosines(theta1, theta2)?;
    let (h1, h2) = (c1 * c1, c2 * c2);
    let r = h1.min(h2) / h1.max(h2);
    Ok(r / (1.0 + r * r))
}

/// Reduced-state eigenvalues of the effectively boosted `Φ¹` (Bell angle):
/// `h₁²/2N` twice and `h₂²/2N` twice, `N = h₁² + h₂²`.
pub fn reduced_eigenvalues(theta1: f64, theta2: f64) -> Result<[f64; 4]> {
    let (c1, c2) = half_cosines(theta1, theta2)?;
    let (f1, f2) = (c1.powi(4), c2.powi(4));
    let n = 2.0 * (f1 + f2);
    Ok([f1 / n, f1 / n, f2 / n, f2 / n])
}

/// `−Σ 2λ_k log₂ λ_k` over the two distinct reduced eigenvalues.
pub fn entropy_formula(theta1: f64, theta2: f64) -> Result<f64> {
    Ok(shannon_bits(&reduced_eigenvalues(theta1, theta2)?))
}

pub fn hs_distance(a: &HermitianOperator, b: &HermitianOperator) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: format!("{0}x{0}", a.dim()),
            actual: format!("{0}x{0}", b.dim()),
        });
    }
    Ok(hs_norm(&(a.matrix() - b.matrix())))
}

/// Witness pointing from `ρ_ent` to the edge state:
/// `W = (Δ − ⟨ρ_edge, Δ⟩ I)/‖Δ‖`, `Δ = ρ_edge − ρ_ent`.
/// Returns `W` and the measure `−Tr(ρ_ent W)`, which equals `‖Δ‖`.
pub fn doew_from_edge(
    rho_ent: &HermitianOperator,
    rho_edge: &HermitianOperator,
) -> Result<(WitnessOperator, f64)> {
    let dist = hs_distance(rho_edge, rho_ent)?;
    if dist <= 1e-14 {
        return Err(Error::CoincidentStates);
    }
    let delta = rho_edge.combine(1.0, rho_ent, -1.0);
    let shift = hs_inner(rho_edge.matrix(), delta.matrix()).re;
    let w = delta
        .combine(1.0, &HermitianOperator::identity(delta.dim()), -shift)
        .scale(1.0 / dist);
    let measure = -w.trace_product(rho_ent);
    Ok((WitnessOperator { w }, measure))
}

/// Closed-form optimal witness value for an effectively boosted odd mixture:
///
/// `½(1 − |b₁−b₂| − |b₃−b₄| − |b₃+b₄|)
///   − (|b₅−b₆| + |b₅+b₆| + |b₇−b₈| + |b₇+b₈|)·κ(θ₁, θ₂)`.
pub fn relativistic_witness_value(weights: &MixtureWeights, theta1: f64, theta2: f64) -> Result<f64> {
    weights.require_odd()?;
    let b = BCoefficients::from_weights(weights);
    let g = |k| b.get(k);
    let sector = 0.5 * (1.0 - (g(1) - g(2)).abs() - (g(3) - g(4)).abs() - (g(3) + g(4)).abs());
    let cross = (g(5) - g(6)).abs() + (g(5) + g(6)).abs() + (g(7) - g(8)).abs() + (g(7) + g(8)).abs();
    Ok(sector - cross * kappa(theta1, theta2)?)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Concurrence {
    /// `1 + 8√(λ₁λ₂)`
    pub chi: f64,
    /// `4√(λ₁λ₂)`
    pub d: f64,
    pub lambda1: f64,
    pub lambda2: f64,
}

/// Generalized concurrence of the effectively boosted `Φ¹`, built from its
/// two distinct reduced eigenvalues (`λ₁ + λ₂ = ½`).
pub fn generalized_concurrence(theta1: f64, theta2: f64) -> Result<Concurrence> {
    let ev = reduced_eigenvalues(theta1, theta2)?;
    let (lambda1, lambda2) = (ev[0], ev[2]);
    let root = (lambda1 * lambda2).sqrt();
    Ok(Concurrence {
        chi: 1.0 + 8.0 * root,
        d: 4.0 * root,
        lambda1,
        lambda2,
    })
}

/// Inverts `d = 4√(λ₁λ₂)` under `λ₁ + λ₂ = ½`: `λ = ¼(1 ± √(1 − d²))`,
/// larger root first.
pub fn lambdas_from_concurrence(d: f64) -> Result<(f64, f64)> {
    if !(0.0..=1.0 + 1e-12).contains(&d) {
        return Err(Error::Domain(format!("concurrence {d} outside [0, 1]")));
    }
    let r = (1.0 - d * d).max(0.0).sqrt();
    Ok((0.25 * (1.0 + r), 0.25 * (1.0 - r)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::c;
    use crate::ppt::edge_state;
    use crate::relativity::effective_boost_pure;
    use crate::states::{build_mixture, phi_state, Parity, DEFAULT_THETA};
    use crate::witness::{detect, kkt_witness, reference_witness};
    use std::f64::consts::PI;

    #[test]
    fn entropy_examples() {
        let product = PureState16::basis(0).unwrap();
        assert_eq!(entropy_pure(&product).unwrap().entropy_bits, 0.0);
        let phi = phi_state(1, DEFAULT_THETA).unwrap();
        let r = entropy_pure(&phi).unwrap();
        assert!((r.entropy_bits - 2.0).abs() < 1e-12);
        assert!(r.eigenvalues.iter().all(|&x| (x - 0.25).abs() < 1e-14));
        assert!(entropy_pure(&PureState16::normalized(vec![c(1.0, 0.0); 16]).unwrap()).is_ok());
    }

    #[test]
    fn entropy_formula_examples() {
        assert!((entropy_formula(0.0, 0.0).unwrap() - 2.0).abs() < 1e-15);
        for t in [0.3, 1.5, 3.0] {
            assert!((entropy_formula(t, t).unwrap() - 2.0).abs() < 1e-14);
        }
        let v = entropy_formula(0.0, 2.0).unwrap();
        assert!(v < 2.0);
        let boosted = effective_boost_pure(&phi_state(1, DEFAULT_THETA).unwrap(), 0.0, 2.0).unwrap();
        assert!((entropy_pure(&boosted).unwrap().entropy_bits - v).abs() < 1e-12);
        assert!(matches!(entropy_formula(PI, PI), Err(Error::Domain(_))));
    }

    #[test]
    fn kappa_behaviour() {
        assert!((kappa(0.0, 0.0).unwrap() - 0.5).abs() < 1e-16);
        assert!((kappa(1.1, 1.1).unwrap() - 0.5).abs() < 1e-16);
        assert!(kappa(0.0, PI).unwrap().abs() < 1e-15);
        let direct = |t1: f64, t2: f64| {
            let (a, b) = ((t1 / 2.0).cos().powi(2), (t2 / 2.0).cos().powi(2));
            a * b / (a * a + b * b)
        };
        assert!((kappa(0.4, 2.2).unwrap() - direct(0.4, 2.2)).abs() < 1e-15);
    }

    #[test]
    fn distance_examples() {
        let mixed = HermitianOperator::from_real_diagonal(&[1.0 / 16.0; 16]);
        let pure = phi_state(1, DEFAULT_THETA).unwrap().projector();
        assert_eq!(hs_distance(&pure, &pure).unwrap(), 0.0);
        assert!((hs_distance(&mixed, &pure).unwrap() - (15.0f64 / 16.0).sqrt()).abs() < 1e-14);
        assert!(hs_distance(&mixed, &HermitianOperator::identity(4)).is_err());
    }

    #[test]
    fn edge_witness_chain() {
        let ent = MixtureWeights::pure(1).unwrap();
        let rho_ent = build_mixture(&ent, DEFAULT_THETA).unwrap();
        let rho_edge = edge_state(1).unwrap();
        let (w, m) = doew_from_edge(&rho_ent, &rho_edge).unwrap();
        assert!((m - hs_distance(&rho_edge, &rho_ent).unwrap()).abs() < 1e-12);
        assert!(detect(&w, &rho_ent).unwrap() < 0.0);
        assert!(detect(&w, &rho_edge).unwrap().abs() < 1e-12);
        assert!(matches!(
            doew_from_edge(&rho_ent, &rho_ent),
            Err(Error::CoincidentStates)
        ));
        let reference = reference_witness();
        assert!(detect(&reference, &rho_ent).unwrap() < 0.0);
    }

    #[test]
    fn closed_form_value_examples() {
        let pure = MixtureWeights::pure(1).unwrap();
        assert!((relativistic_witness_value(&pure, 0.0, 0.0).unwrap() + 3.0).abs() < 1e-15);
        let uniform = MixtureWeights::uniform_odd();
        let rho = build_mixture(&uniform, DEFAULT_THETA).unwrap();
        let (coef, _) = kkt_witness(&rho).unwrap();
        assert!((relativistic_witness_value(&uniform, 0.0, 0.0).unwrap() - coef.min_value).abs() < 1e-12);
        let w = MixtureWeights::from_pairs(&[(1, 0.6), (7, 0.1), (9, 0.3)], Parity::Odd).unwrap();
        let mut prev = f64::NEG_INFINITY;
        for k in 0..30 {
            let v = relativistic_witness_value(&w, 0.0, k as f64 * 0.1).unwrap();
            assert!(v >= prev - 1e-15);
            prev = v;
        }
    }

    #[test]
    fn concurrence_examples() {
        let c0 = generalized_concurrence(0.0, 0.0).unwrap();
        assert!(
            (c0.lambda1 - 0.25).abs() < 1e-16 && (c0.d - 1.0).abs() < 1e-15 && (c0.chi - 3.0).abs() < 1e-15
        );
        let edge = generalized_concurrence(0.0, PI - 1e-6).unwrap();
        assert!(edge.d < 1e-10 && (edge.chi - 1.0).abs() < 1e-10);
        for (t1, t2) in [(0.3, 2.0), (1.0, 0.1)] {
            let cc = generalized_concurrence(t1, t2).unwrap();
            assert!((cc.lambda1 + cc.lambda2 - 0.5).abs() < 1e-15);
            let (hi, lo) = lambdas_from_concurrence(cc.d).unwrap();
            let (a, b) = (cc.lambda1.max(cc.lambda2), cc.lambda1.min(cc.lambda2));
            assert!((hi - a).abs() < 1e-12 && (lo - b).abs() < 1e-12);
        }
        assert!(lambdas_from_concurrence(1.5).is_err());
    }
}
