//! Dense complex matrix kernel.
//!
//! Everything in this crate lives on a 16-dimensional two-particle space
//! (4 ⊗ 4), so all storage is dense and row-major. The decompositions
//! (`hermitian_eigensystem`, `trace_norm_sym`) delegate to `nalgebra`; the
//! bipartite reshuffles (partial transpose, partial trace, Kronecker product)
//! are written out directly because they are pure index permutations.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type RealMatrix = DMatrix<f64>;

/// Default absolute tolerance for complex matrix comparisons.
pub const DEFAULT_TOL: f64 = 1e-10;

/// Hermiticity tolerance, applied relative to the largest entry magnitude.
pub const HERMITIAN_TOL: f64 = 1e-12;

/// Eigenvalues at or above `-PSD_CLAMP` are treated as zero by [`psd_sqrt`].
pub const PSD_CLAMP: f64 = 1e-10;

/// Eigenvalues below `-PSD_REJECT` make [`psd_sqrt`] fail.
pub const PSD_REJECT: f64 = 1e-8;

#[inline]
pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Complex64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { c(1.0, 0.0) } else { c(0.0, 0.0) })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    /// Builds a matrix from row-major entries. Fails if the entry count does
    /// not equal `rows * cols`.
    pub fn from_row_major(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                expected: format!("{} entries", rows * cols),
                actual: format!("{} entries", data.len()),
            });
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_real(m: &RealMatrix) -> Self {
        Self::from_fn(m.nrows(), m.ncols(), |i, j| c(m[(i, j)], 0.0))
    }

    pub fn diagonal(values: &[f64]) -> Self {
        let n = values.len();
        Self::from_fn(n, n, |i, j| if i == j { c(values[i], 0.0) } else { c(0.0, 0.0) })
    }

    /// `|u⟩⟨v|`
    pub fn outer(u: &[Complex64], v: &[Complex64]) -> Self {
        Self::from_fn(u.len(), v.len(), |i, j| u[i] * v[j].conj())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[Complex64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<Complex64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.scale(c(s, 0.0))
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn mat_vec(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(v.len(), self.cols, "mat_vec dimension mismatch");
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// `⟨u|M|v⟩`
    pub fn sandwich(&self, u: &[Complex64], v: &[Complex64]) -> Complex64 {
        self.mat_vec(v).iter().zip(u).map(|(mv, ui)| ui.conj() * mv).sum()
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.rows == other.rows && self.cols == other.cols && self.max_abs_diff(other) <= tol
    }

    /// Largest entry of `|M - M†|`.
    pub fn hermiticity_deviation(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let mut worst: f64 = 0.0;
        for i in 0..self.rows {
            for j in i..self.cols {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn to_nalgebra(&self) -> DMatrix<Complex64> {
        DMatrix::from_row_slice(self.rows, self.cols, &self.data)
    }

    pub fn from_nalgebra(m: &DMatrix<Complex64>) -> Self {
        Self::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
    }

    /// Real part, failing if any imaginary component exceeds `tol`.
    pub fn to_real(&self, tol: f64) -> Result<RealMatrix> {
        let residue = self.data.iter().map(|z| z.im.abs()).fold(0.0, f64::max);
        if residue > tol {
            return Err(Error::ImaginaryResidue { residue });
        }
        Ok(RealMatrix::from_fn(self.rows, self.cols, |i, j| self[(i, j)].re))
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.cols + j]
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.cols, rhs.rows, "matrix product dimension mismatch");
        let mut out = ComplexMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..rhs.cols {
                    out.data[i * rhs.cols + j] += a * rhs[(k, j)];
                }
            }
        }
        out
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for z in self.row(i) {
                write!(f, "{:+.4}{:+.4}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

/// A square complex matrix known to equal its conjugate transpose.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianOperator {
    matrix: ComplexMatrix,
}

impl HermitianOperator {
    /// Checks Hermiticity (relative tolerance [`HERMITIAN_TOL`]) and then
    /// symmetrizes so the stored matrix is Hermitian to the last bit.
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::DimensionMismatch {
                expected: "square matrix".into(),
                actual: format!("{}x{}", matrix.rows(), matrix.cols()),
            });
        }
        let deviation = matrix.hermiticity_deviation();
        if deviation > HERMITIAN_TOL * matrix.max_abs().max(1.0) {
            return Err(Error::NotHermitian { deviation });
        }
        Ok(Self::symmetrized(matrix))
    }

    fn symmetrized(matrix: ComplexMatrix) -> Self {
        let adj = matrix.adjoint();
        Self {
            matrix: (&matrix + &adj).scale_real(0.5),
        }
    }

    pub fn identity(n: usize) -> Self {
        Self {
            matrix: ComplexMatrix::identity(n),
        }
    }

    /// `|ψ⟩⟨ψ|`
    pub fn projector(psi: &[Complex64]) -> Self {
        Self::symmetrized(ComplexMatrix::outer(psi, psi))
    }

    pub fn from_real_diagonal(values: &[f64]) -> Self {
        Self {
            matrix: ComplexMatrix::diagonal(values),
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }

    /// Real linear combination `a·self + b·other`.
    pub fn combine(&self, a: f64, other: &Self, b: f64) -> Self {
        Self {
            matrix: &self.matrix.scale_real(a) + &other.matrix.scale_real(b),
        }
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            matrix: self.matrix.scale_real(s),
        }
    }

    /// `U·self·U†`
    pub fn conjugate_by(&self, u: &ComplexMatrix) -> Result<Self> {
        if u.cols() != self.dim() || !u.is_square() {
            return Err(Error::DimensionMismatch {
                expected: format!("{0}x{0} unitary", self.dim()),
                actual: format!("{}x{}", u.rows(), u.cols()),
            });
        }
        let m = &(u * &self.matrix) * &u.adjoint();
        Ok(Self::symmetrized(m))
    }

    /// `Re Tr(self · other)`
    pub fn trace_product(&self, other: &Self) -> f64 {
        let n = self.dim();
        let mut acc = 0.0;
        for i in 0..n {
            for j in 0..n {
                acc += (self.matrix[(i, j)] * other.matrix[(j, i)]).re;
            }
        }
        acc
    }

    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.matrix.approx_eq(&other.matrix, tol)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Party {
    A,
    B,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BipartiteShape {
    pub dim_a: usize,
    pub dim_b: usize,
}

impl BipartiteShape {
    /// The spin-momentum two-particle space used throughout.
    pub const FOUR_BY_FOUR: Self = Self { dim_a: 4, dim_b: 4 };

    pub fn total(&self) -> usize {
        self.dim_a * self.dim_b
    }

    fn check(&self, op: &HermitianOperator) -> Result<()> {
        if op.dim() != self.total() {
            return Err(Error::DimensionMismatch {
                expected: format!("{}x{} operator", self.total(), self.total()),
                actual: format!("{}x{}", op.dim(), op.dim()),
            });
        }
        Ok(())
    }
}

/// Kronecker product `a ⊗ b`.
pub fn tensor_product(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (br, bc) = (b.rows(), b.cols());
    ComplexMatrix::from_fn(a.rows() * br, a.cols() * bc, |i, j| {
        a[(i / br, j / bc)] * b[(i % br, j % bc)]
    })
}

/// Kronecker product of two vectors.
pub fn tensor_vec(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    a.iter().flat_map(|x| b.iter().map(move |y| x * y)).collect()
}

/// Transposes the chosen tensor factor:
/// `⟨i j|ρ^{T_A}|k l⟩ = ⟨k j|ρ|i l⟩`.
pub fn partial_transpose(
    op: &HermitianOperator,
    shape: BipartiteShape,
    party: Party,
) -> Result<HermitianOperator> {
    shape.check(op)?;
    let (da, db) = (shape.dim_a, shape.dim_b);
    let m = op.matrix();
    let out = ComplexMatrix::from_fn(shape.total(), shape.total(), |r, s| {
        let (i, j) = (r / db, r % db);
        let (k, l) = (s / db, s % db);
        match party {
            Party::A => m[(k * db + j, i * db + l)],
            Party::B => m[(i * db + l, k * db + j)],
        }
    });
    debug_assert_eq!(out.rows(), da * db);
    Ok(HermitianOperator::symmetrized(out))
}

/// Traces out `party`; the result lives on the surviving factor.
pub fn partial_trace(
    op: &HermitianOperator,
    shape: BipartiteShape,
    party: Party,
) -> Result<HermitianOperator> {
    shape.check(op)?;
    let (da, db) = (shape.dim_a, shape.dim_b);
    let m = op.matrix();
    let out = match party {
        Party::B => ComplexMatrix::from_fn(da, da, |i, k| (0..db).map(|j| m[(i * db + j, k * db + j)]).sum()),
        Party::A => ComplexMatrix::from_fn(db, db, |j, l| (0..da).map(|i| m[(i * db + j, i * db + l)]).sum()),
    };
    Ok(HermitianOperator::symmetrized(out))
}

#[derive(Clone, Debug)]
pub struct EigenSystem {
    /// Ascending.
    pub values: Vec<f64>,
    /// Orthonormal eigenvectors stored as columns, paired with `values`.
    pub vectors: ComplexMatrix,
}

impl EigenSystem {
    pub fn vector(&self, k: usize) -> Vec<Complex64> {
        self.vectors.column(k)
    }

    /// `V·diag(λ)·V†`
    pub fn reconstruct(&self) -> ComplexMatrix {
        let v = &self.vectors;
        let n = v.rows();
        ComplexMatrix::from_fn(n, n, |i, j| {
            (0..self.values.len())
                .map(|k| v[(i, k)] * self.values[k] * v[(j, k)].conj())
                .sum()
        })
    }

    /// Applies `f` to the spectrum: `V·diag(f(λ))·V†`.
    pub fn map_spectrum(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        Self {
            values: self.values.iter().map(|&x| f(x)).collect(),
            vectors: self.vectors.clone(),
        }
        .reconstruct()
    }
}

pub fn hermitian_eigensystem(op: &HermitianOperator) -> EigenSystem {
    let eig = SymmetricEigen::new(op.matrix().to_nalgebra());
    let n = op.dim();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = ComplexMatrix::from_fn(n, n, |i, j| eig.eigenvectors[(i, order[j])]);
    EigenSystem { values, vectors }
}

pub fn eigenvalues(op: &HermitianOperator) -> Vec<f64> {
    hermitian_eigensystem(op).values
}

/// Principal square root of a positive semidefinite operator.
pub fn psd_sqrt(op: &HermitianOperator) -> Result<HermitianOperator> {
    let eig = hermitian_eigensystem(op);
    if let Some(&lowest) = eig.values.first() {
        if lowest < -PSD_REJECT {
            return Err(Error::NotPositive { eigenvalue: lowest });
        }
    }
    let root = eig.map_spectrum(|x| if x <= PSD_CLAMP { 0.0 } else { x.sqrt() });
    Ok(HermitianOperator::symmetrized(root))
}

/// `√Tr(A†A)`
pub fn hs_norm(m: &ComplexMatrix) -> f64 {
    m.as_slice().iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// `⟨A,B⟩ = Tr(A†B)`
pub fn hs_inner(a: &ComplexMatrix, b: &ComplexMatrix) -> Complex64 {
    a.as_slice()
        .iter()
        .zip(b.as_slice())
        .map(|(x, y)| x.conj() * y)
        .sum()
}

/// Sum of singular values, i.e. `Tr√(MᵗM)`.
pub fn trace_norm_sym(m: &RealMatrix) -> f64 {
    m.clone().svd(false, false).singular_values.iter().sum()
}
