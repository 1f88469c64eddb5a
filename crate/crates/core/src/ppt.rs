//! Partial-transpose spectra, the feasible region of odd mixtures and the
//! PPT edge state.

use crate::error::{Error, Result};
use crate::linalg::{eigenvalues, partial_transpose, BipartiteShape, HermitianOperator, Party};
use crate::relativity::half_cosines;
use crate::states::{build_mixture, MixtureWeights, Parity, DEFAULT_THETA};

pub const FEASIBLE_TOL: f64 = 1e-10;

/// Partner pairs `(i, j)` tied together by the feasible region, `q_i = q_j`.
pub const PARTNERS: [(usize, usize); 4] = [(1, 7), (3, 5), (9, 13), (11, 15)];

/// Eigenvalues of `ρ^{T_party}`, ascending.
pub fn ppt_spectrum(rho: &HermitianOperator, party: Party) -> Result<Vec<f64>> {
    let pt = partial_transpose(rho, BipartiteShape::FOUR_BY_FOUR, party)?;
    Ok(eigenvalues(&pt))
}

pub fn min_ppt_eigenvalue(rho: &HermitianOperator) -> Result<f64> {
    let a = ppt_spectrum(rho, Party::A)?[0];
    let b = ppt_spectrum(rho, Party::B)?[0];
    Ok(a.min(b))
}

#[derive(Clone, Debug, PartialEq)]
pub struct FeasibleRegionReport {
    /// `(id, residual)`; satisfied when `|residual| ≤ 1e-10`.
    pub equalities: Vec<(String, f64)>,
    /// `(id, margin)`; satisfied when `margin ≥ -1e-10`.
    pub inequalities: Vec<(String, f64)>,
    pub is_ppt: bool,
}

/// Evaluates `q₁ = q₇`, `q₃ = q₅`, `q₉ = q₁₃`, `q₁₁ = q₁₅`,
/// `q₁ + q₃ + q₁₁ + q₉ = ½` and `¼ − q_i ≥ 0`.
///
/// For odd mixtures at the Bell angle these are exactly the conditions for a
/// nonnegative partial transpose, in any frame of the effective boost.
pub fn feasible_region_check(weights: &MixtureWeights) -> Result<FeasibleRegionReport> {
    weights.require_odd()?;
    let q = |i| weights.get(i);
    let mut equalities: Vec<(String, f64)> = PARTNERS
        .iter()
        .map(|&(i, j)| (format!("q{i}=q{j}"), q(i) - q(j)))
        .collect();
    equalities.push(("q1+q3+q11+q9=1/2".into(), q(1) + q(3) + q(11) + q(9) - 0.5));
    let inequalities: Vec<(String, f64)> = (1..=16).map(|i| (format!("q{i}<=1/4"), 0.25 - q(i))).collect();
    let is_ppt = equalities.iter().all(|(_, r)| r.abs() <= FEASIBLE_TOL)
        && inequalities.iter().all(|(_, m)| *m >= -FEASIBLE_TOL);
    Ok(FeasibleRegionReport {
        equalities,
        inequalities,
        is_ppt,
    })
}

fn partner_of(i: usize) -> Option<usize> {
    PARTNERS.iter().find_map(|&(a, b)| {
        if a == i {
            Some(b)
        } else if b == i {
            Some(a)
        } else {
            None
        }
    })
}

/// Weights on the PPT edge in direction `i*`: `q_{i*}` and its partner at ¼,
/// the six remaining odd weights at 1/12 each.
pub fn edge_weights(direction: usize) -> Result<MixtureWeights> {
    let partner = partner_of(direction).ok_or(Error::IndexOutOfRange {
        index: direction,
        range: "odd indices 1..=15",
    })?;
    let pairs: Vec<(usize, f64)> = (1..=16)
        .step_by(2)
        .map(|i| {
            (
                i,
                if i == direction || i == partner {
                    0.25
                } else {
                    1.0 / 12.0
                },
            )
        })
        .collect();
    MixtureWeights::from_pairs(&pairs, Parity::Odd)
}

/// The mixture of [`edge_weights`] at the Bell angle.
pub fn edge_state(direction: usize) -> Result<HermitianOperator> {
    build_mixture(&edge_weights(direction)?, DEFAULT_THETA)
}

/// Exact partial-transpose spectrum (either party, ascending) of an odd
/// mixture at the Bell angle after the effective boost by `(θ₁, θ₂)`.
///
/// With `h_m = cos²(θ_m/2)` and `N = h₁² + h₂²`:
/// * equal-momentum sectors give `h_β²(1 − 2P_i)/(2N)`, `β = 1, 2`, with
///   `P = (q₁+q₇, q₃+q₅, q₉+q₁₃, q₁₁+q₁₅)`;
/// * cross-momentum sectors give `±(s₀ − 2p_i)·h₁h₂/(2N)` with
///   `p = (q₁−q₇, q₅−q₃, q₉−q₁₃, q₁₅−q₁₁)` and `s₀ = Σp_i`.
pub fn ppt_spectrum_closed_form(weights: &MixtureWeights, theta1: f64, theta2: f64) -> Result<Vec<f64>> {
    weights.require_odd()?;
    let (c1, c2) = half_cosines(theta1, theta2)?;
    let (h1, h2) = (c1 * c1, c2 * c2);
    let n = h1 * h1 + h2 * h2;
    let q = |i| weights.get(i);
    let sums = [q(1) + q(7), q(3) + q(5), q(9) + q(13), q(11) + q(15)];
    let diffs = [q(1) - q(7), q(5) - q(3), q(9) - q(13), q(15) - q(11)];
    let s0: f64 = diffs.iter().sum();
    let mut out = Vec::with_capacity(16);
    for h in [h1, h2] {
        out.extend(sums.iter().map(|p| h * h * (1.0 - 2.0 * p) / (2.0 * n)));
    }
    for p in diffs {
        let v = (s0 - 2.0 * p) * h1 * h2 / (2.0 * n);
        out.push(v);
        out.push(-v);
    }
    out.sort_by(f64::total_cmp);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::relativity::effective_boost_mixture;
    use crate::states::phi_state;

    #[test]
    fn maximally_mixed_is_flat() {
        let rho = HermitianOperator::from_real_diagonal(&[1.0 / 16.0; 16]);
        for v in ppt_spectrum(&rho, Party::A).unwrap() {
            assert!((v - 1.0 / 16.0).abs() < 1e-15);
        }
    }

    #[test]
    fn pure_phi1_has_quarter_negative_eigenvalue() {
        let rho = phi_state(1, DEFAULT_THETA).unwrap().projector();
        for party in [Party::A, Party::B] {
            let ev = ppt_spectrum(&rho, party).unwrap();
            assert!((ev[0] + 0.25).abs() < 1e-14);
        }
    }

    #[test]
    fn edge_configuration() {
        let w = edge_weights(1).unwrap();
        assert_eq!(w.get(1), 0.25);
        assert_eq!(w.get(7), 0.25);
        for i in [3, 5, 9, 11, 13, 15] {
            assert!((w.get(i) - 1.0 / 12.0).abs() < 1e-16);
        }
        let report = feasible_region_check(&w).unwrap();
        assert!(report.is_ppt, "{report:?}");
        let min = min_ppt_eigenvalue(&edge_state(1).unwrap()).unwrap();
        assert!(min.abs() < 1e-10, "min {min}");
        assert!(edge_weights(2).is_err());
        assert!(edge_weights(17).is_err());
        let w13 = edge_weights(13).unwrap();
        assert_eq!((w13.get(9), w13.get(13)), (0.25, 0.25));
    }

    #[test]
    fn pure_state_is_outside_region() {
        let report = feasible_region_check(&MixtureWeights::pure(1).unwrap()).unwrap();
        assert!(!report.is_ppt);
        assert!(report.equalities[0].1 > 0.0);
        assert!(report.inequalities[0].1 < 0.0);
    }

    #[test]
    fn uniform_odd_is_inside_region() {
        let w = MixtureWeights::uniform_odd();
        assert!(feasible_region_check(&w).unwrap().is_ppt);
        let rho = build_mixture(&w, DEFAULT_THETA).unwrap();
        assert!(min_ppt_eigenvalue(&rho).unwrap() >= -1e-10);
    }

    #[test]
    fn region_rejects_even_weights() {
        let w = MixtureWeights::pure(2).unwrap();
        assert!(feasible_region_check(&w).is_err());
    }

    #[test]
    fn closed_form_matches_eigensolve() {
        let w = MixtureWeights::from_pairs(
            &[
                (1, 0.31),
                (3, 0.07),
                (5, 0.12),
                (7, 0.05),
                (9, 0.2),
                (11, 0.1),
                (13, 0.06),
                (15, 0.09),
            ],
            Parity::Odd,
        )
        .unwrap();
        let rho = build_mixture(&w, DEFAULT_THETA).unwrap();
        for (t1, t2) in [(0.0, 0.0), (0.7, 1.9), (2.8, 0.3)] {
            let boosted = effective_boost_mixture(&rho, t1, t2).unwrap();
            let pred = ppt_spectrum_closed_form(&w, t1, t2).unwrap();
            for party in [Party::A, Party::B] {
                let ev = ppt_spectrum(&boosted, party).unwrap();
                let err = ev
                    .iter()
                    .zip(&pred)
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0, f64::max);
                assert!(err < 1e-12, "({t1},{t2}) {party:?}: {err}");
            }
        }
    }
}
