//! Wigner rotations and their action on the two-particle states.
//!
//! Two boost models are provided.
//!
//! * The unitary model applies `U = diag(D(W,p₁), D(W,p₂))` to each particle,
//!   with momentum labels `Λp_i` re-identified with `p_i`. Local unitaries leave
//!   every entanglement quantity unchanged, so this model alone cannot move
//!   the entropy or the partial-transpose spectrum.
//! * The effective model keeps only the spin-preserving part of each Wigner
//!   rotation, `K = diag(cos(Ω₁/2), cos(Ω₁/2), cos(Ω₂/2), cos(Ω₂/2))`, and
//!   renormalizes: `ρ ↦ (K⊗K)ρ(K⊗K)/Tr`. When the rotation axis is transverse
//!   to the spin quantization axis, `K` is exactly the diagonal of `D`. All the
//!   angle-dependent closed forms in [`crate::measures`], [`crate::ppt`] and
//!   [`crate::witness`] refer to this model, with `θ_m = Ω_m`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{c, tensor_product, ComplexMatrix, HermitianOperator};
use crate::states::PureState16;

pub type Vec3 = [f64; 3];

const UNIT_TOL: f64 = 1e-12;

/// Tolerance on `cos² + |v|² = 1` accepted by [`wigner_matrix`].
pub const ROTATION_TOL: f64 = 1e-10;

/// Below this, `cos(θ/2)` counts as zero in the effective model.
pub const HALF_COS_FLOOR: f64 = 1e-12;

fn dot(a: Vec3, b: Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn cross(a: Vec3, b: Vec3) -> Vec3 {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

fn norm3(a: Vec3) -> f64 {
    dot(a, a).sqrt()
}

fn check_unit(v: Vec3, what: &str) -> Result<()> {
    let n = norm3(v);
    if !n.is_finite() || (n - 1.0).abs() > UNIT_TOL {
        return Err(Error::InvalidKinematics(format!(
            "{what} has norm {n}, expected 1"
        )));
    }
    Ok(())
}

/// Observer boost: rapidity `α` (`cosh α = γ`) along `ê`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoostParameters {
    pub alpha: f64,
    pub e_hat: Vec3,
}

impl BoostParameters {
    pub fn new(alpha: f64, e_hat: Vec3) -> Result<Self> {
        if !alpha.is_finite() || alpha < 0.0 {
            return Err(Error::InvalidKinematics(format!(
                "alpha = {alpha} must be finite and ≥ 0"
            )));
        }
        check_unit(e_hat, "boost direction")?;
        Ok(Self { alpha, e_hat })
    }

    /// Rapidity from velocity `β ∈ [0, 1)`.
    pub fn from_beta(beta: f64, e_hat: Vec3) -> Result<Self> {
        if !(0.0..1.0).contains(&beta) {
            return Err(Error::InvalidKinematics(format!("beta = {beta} outside [0, 1)")));
        }
        Self::new(beta.atanh(), e_hat)
    }
}

/// Particle rapidity `δ` (`cosh δ = E/m`) and momentum direction.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ParticleKinematics {
    pub delta: f64,
    pub p_hat: Vec3,
}

impl ParticleKinematics {
    pub fn new(delta: f64, p_hat: Vec3) -> Result<Self> {
        if !delta.is_finite() || delta < 0.0 {
            return Err(Error::InvalidKinematics(format!(
                "delta = {delta} must be finite and ≥ 0"
            )));
        }
        check_unit(p_hat, "momentum direction")?;
        Ok(Self { delta, p_hat })
    }

    /// Momentum in the yz-plane, `p̂ = (0, sin θ, cos θ)`.
    pub fn yz_plane(delta: f64, theta_polar: f64) -> Result<Self> {
        let (s, co) = theta_polar.sin_cos();
        Self::new(delta, [0.0, s, co])
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HalfAngle {
    /// `cos(Ω/2)`, always positive.
    pub cos_half: f64,
    /// `sin(Ω/2)·n̂`
    pub sin_half_axis: Vec3,
}

impl HalfAngle {
    pub const IDENTITY: Self = Self {
        cos_half: 1.0,
        sin_half_axis: [0.0; 3],
    };

    /// `cos² + |sin·n̂|²`, which equals 1 for a valid rotation.
    pub fn normalization(&self) -> f64 {
        self.cos_half * self.cos_half + dot(self.sin_half_axis, self.sin_half_axis)
    }

    /// Rotation angle `Ω ∈ [0, π)`.
    pub fn omega(&self) -> f64 {
        2.0 * norm3(self.sin_half_axis).atan2(self.cos_half)
    }
}

/// Half-angle data of the Wigner rotation for one particle:
///
/// `cos(Ω/2) = (C + S·ê·p̂)/den`, `sin(Ω/2)·n̂ = S·(ê×p̂)/den`, with
/// `C = cosh(α/2)cosh(δ/2)`, `S = sinh(α/2)sinh(δ/2)` and
/// `den² = ½ + ½cosh α cosh δ + ½ sinh α sinh δ (ê·p̂)`.
///
/// A boost collinear with the momentum (or a vanishing rapidity) returns the
/// identity exactly.
pub fn wigner_half_angle(boost: &BoostParameters, particle: &ParticleKinematics) -> HalfAngle {
    let (a, d) = (boost.alpha, particle.delta);
    let x = dot(boost.e_hat, particle.p_hat);
    let n = cross(boost.e_hat, particle.p_hat);
    let big_c = (a / 2.0).cosh() * (d / 2.0).cosh();
    let big_s = (a / 2.0).sinh() * (d / 2.0).sinh();
    if big_s == 0.0 || n == [0.0; 3] {
        return HalfAngle::IDENTITY;
    }
    let den = (0.5 + 0.5 * a.cosh() * d.cosh() + 0.5 * a.sinh() * d.sinh() * x).sqrt();
    HalfAngle {
        cos_half: (big_c + big_s * x) / den,
        sin_half_axis: [big_s * n[0] / den, big_s * n[1] / den, big_s * n[2] / den],
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct WignerRotation {
    pub omega: f64,
    pub n_hat: Vec3,
    /// `cos(Ω/2) I + i sin(Ω/2) σ·n̂`
    pub d_matrix: ComplexMatrix,
}

impl WignerRotation {
    pub fn identity() -> Self {
        wigner_matrix(1.0, [0.0; 3]).expect("identity is normalized")
    }

    pub fn from_half_angle(h: &HalfAngle) -> Result<Self> {
        wigner_matrix(h.cos_half, h.sin_half_axis)
    }
}

pub fn wigner_matrix(cos_half: f64, v: Vec3) -> Result<WignerRotation> {
    let value = cos_half * cos_half + dot(v, v);
    if !value.is_finite() || (value - 1.0).abs() > ROTATION_TOL {
        return Err(Error::RotationNotNormalized { value });
    }
    let s = norm3(v);
    let n_hat = if s == 0.0 {
        [0.0, 0.0, 1.0]
    } else {
        [v[0] / s, v[1] / s, v[2] / s]
    };
    let d = ComplexMatrix::from_row_major(
        2,
        2,
        vec![
            c(cos_half, v[2]),
            c(v[1], v[0]),
            c(-v[1], v[0]),
            c(cos_half, -v[2]),
        ],
    )?;
    Ok(WignerRotation {
        omega: 2.0 * s.atan2(cos_half),
        n_hat,
        d_matrix: d,
    })
}

/// `diag(D(W,p₁), D(W,p₂))` on one particle's four-dimensional space.
pub fn single_particle_boost_unitary(d1: &WignerRotation, d2: &WignerRotation) -> ComplexMatrix {
    let mut u = ComplexMatrix::zeros(4, 4);
    for i in 0..2 {
        for j in 0..2 {
            u[(i, j)] = d1.d_matrix[(i, j)];
            u[(i + 2, j + 2)] = d2.d_matrix[(i, j)];
        }
    }
    u
}

fn unitarity_defect(u: &ComplexMatrix) -> f64 {
    (&(&u.adjoint() * u) - &ComplexMatrix::identity(u.rows())).max_abs()
}

fn check_local_unitary(u: &ComplexMatrix) -> Result<()> {
    if u.rows() != 4 || u.cols() != 4 {
        return Err(Error::DimensionMismatch {
            expected: "4x4 unitary".into(),
            actual: format!("{}x{}", u.rows(), u.cols()),
        });
    }
    let defect = unitarity_defect(u);
    if defect > ROTATION_TOL {
        return Err(Error::InvalidKinematics(format!(
            "matrix is not unitary (defect {defect:e})"
        )));
    }
    Ok(())
}

/// `(u_A ⊗ u_B)|ψ⟩`, renormalized.
pub fn boost_pure(state: &PureState16, u_a: &ComplexMatrix, u_b: &ComplexMatrix) -> Result<PureState16> {
    check_local_unitary(u_a)?;
    check_local_unitary(u_b)?;
    let amps = tensor_product(u_a, u_b).mat_vec(state.amplitudes());
    PureState16::normalized(amps)
}

/// `(u_A ⊗ u_B) ρ (u_A ⊗ u_B)†`.
pub fn boost_mixture(
    rho: &HermitianOperator,
    u_a: &ComplexMatrix,
    u_b: &ComplexMatrix,
) -> Result<HermitianOperator> {
    check_local_unitary(u_a)?;
    check_local_unitary(u_b)?;
    if rho.dim() != 16 {
        return Err(Error::DimensionMismatch {
            expected: "16x16 density matrix".into(),
            actual: format!("{0}x{0}", rho.dim()),
        });
    }
    rho.conjugate_by(&tensor_product(u_a, u_b))
}

/// `cos(θ₁/2)`, `cos(θ₂/2)` with the domain check shared by every
/// angle-dependent closed form.
pub fn half_cosines(theta1: f64, theta2: f64) -> Result<(f64, f64)> {
    if !theta1.is_finite() || !theta2.is_finite() {
        return Err(Error::Domain(format!("non-finite angles ({theta1}, {theta2})")));
    }
    let (c1, c2) = ((theta1 / 2.0).cos(), (theta2 / 2.0).cos());
    if c1.abs().max(c2.abs()) < HALF_COS_FLOOR {
        return Err(Error::Domain(format!(
            "cos(θ/2) vanishes for both angles ({theta1}, {theta2})"
        )));
    }
    Ok((c1, c2))
}

/// Spin-preserving single-particle filter `diag(c₁, c₁, c₂, c₂)`,
/// `c_m = cos(θ_m/2)`.
pub fn spin_preserving_filter(theta1: f64, theta2: f64) -> Result<ComplexMatrix> {
    let (c1, c2) = half_cosines(theta1, theta2)?;
    Ok(ComplexMatrix::diagonal(&[c1, c1, c2, c2]))
}

/// Effective boost of a pure state: `(K⊗K)|ψ⟩/‖·‖`.
pub fn effective_boost_pure(state: &PureState16, theta1: f64, theta2: f64) -> Result<PureState16> {
    let k = spin_preserving_filter(theta1, theta2)?;
    let amps = tensor_product(&k, &k).mat_vec(state.amplitudes());
    PureState16::normalized(amps)
}

/// Effective boost of a mixture: `(K⊗K)ρ(K⊗K)/Tr`.
pub fn effective_boost_mixture(
    rho: &HermitianOperator,
    theta1: f64,
    theta2: f64,
) -> Result<HermitianOperator> {
    if rho.dim() != 16 {
        return Err(Error::DimensionMismatch {
            expected: "16x16 density matrix".into(),
            actual: format!("{0}x{0}", rho.dim()),
        });
    }
    let k = spin_preserving_filter(theta1, theta2)?;
    let out = rho.conjugate_by(&tensor_product(&k, &k))?;
    let tr = out.trace();
    if tr <= 0.0 {
        return Err(Error::Domain(
            "state is annihilated by the effective boost".into(),
        ));
    }
    Ok(out.scale(1.0 / tr))
}

/// Wigner angles `(Ω₁, Ω₂)` for the two momentum labels.
pub fn effective_angles(
    boost: &BoostParameters,
    p1: &ParticleKinematics,
    p2: &ParticleKinematics,
) -> (f64, f64) {
    (
        wigner_half_angle(boost, p1).omega(),
        wigner_half_angle(boost, p2).omega(),
    )
}

/// The per-particle unitary `diag(D(W,p₁), D(W,p₂))` for the given kinematics.
pub fn kinematic_unitary(
    boost: &BoostParameters,
    p1: &ParticleKinematics,
    p2: &ParticleKinematics,
) -> Result<ComplexMatrix> {
    let d1 = WignerRotation::from_half_angle(&wigner_half_angle(boost, p1))?;
    let d2 = WignerRotation::from_half_angle(&wigner_half_angle(boost, p2))?;
    Ok(single_particle_boost_unitary(&d1, &d2))
}

pub fn determinant_2x2(m: &ComplexMatrix) -> Complex64 {
    m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)]
}
