//! Dense numeric kernel.
//!
//! Everything that depends on floating-point policy lives here: the
//! [`Matrix`] type, the singular value decomposition, tolerance-based rank,
//! orthonormal complements, Moore–Penrose inverses and defect ranks. The
//! rest of the crate only ever asks this module "what is the rank?", so a
//! single [`TolerancePolicy`] decides every verdict.
//!
//! The SVD is a one-sided Jacobi iteration with full (square) singular
//! bases, descending order, and a deterministic phase convention: the
//! largest-magnitude entry of every right singular vector is real and
//! positive. `nalgebra` supplies storage, QR and Cholesky.

use std::fmt;
use std::ops::{Add, Mul, Sub};
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Scalar type used throughout the crate.
pub type Scalar = Complex64;

/// Whether every entry of a matrix is exactly real.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Field {
    Real,
    Complex,
}

impl Field {
    pub fn of<'a>(entries: impl IntoIterator<Item = &'a Scalar>) -> Field {
        if entries.into_iter().all(|z| z.im == 0.0) {
            Field::Real
        } else {
            Field::Complex
        }
    }

    /// `Real` only when both inputs are real.
    pub fn join(self, other: Field) -> Field {
        if self == Field::Real && other == Field::Real {
            Field::Real
        } else {
            Field::Complex
        }
    }
}

/// Dense complex matrix tagged with its field.
///
/// The tag is derived from the entries on construction, so a `Real` matrix
/// always has imaginary parts that are exactly zero.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix {
    data: DMatrix<Scalar>,
    field: Field,
}

impl Matrix {
    pub fn from_dmatrix(data: DMatrix<Scalar>) -> Self {
        let field = Field::of(data.iter());
        Matrix { data, field }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            data: DMatrix::zeros(rows, cols),
            field: Field::Real,
        }
    }

    pub fn identity(n: usize) -> Self {
        Matrix {
            data: DMatrix::identity(n, n),
            field: Field::Real,
        }
    }

    /// Real matrix from row-major entries.
    pub fn real(rows: usize, cols: usize, entries: &[f64]) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(invalid(format!(
                "{} entries cannot fill a {rows}x{cols} matrix",
                entries.len()
            )));
        }
        Ok(Self::from_dmatrix(DMatrix::from_fn(rows, cols, |i, j| {
            Scalar::new(entries[i * cols + j], 0.0)
        })))
    }

    /// Complex matrix from row-major entries.
    pub fn from_row_major(rows: usize, cols: usize, entries: &[Scalar]) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(invalid(format!(
                "{} entries cannot fill a {rows}x{cols} matrix",
                entries.len()
            )));
        }
        Ok(Self::from_dmatrix(DMatrix::from_row_slice(
            rows, cols, entries,
        )))
    }

    /// Matrix whose columns are the given vectors, all of length `rows`.
    pub fn from_columns(rows: usize, columns: &[DVector<Scalar>]) -> Result<Self> {
        if let Some((j, c)) = columns.iter().enumerate().find(|(_, c)| c.len() != rows) {
            return Err(invalid(format!(
                "column {} has length {}, expected {rows}",
                j + 1,
                c.len()
            )));
        }
        Ok(Self::from_dmatrix(DMatrix::from_fn(
            rows,
            columns.len(),
            |i, j| columns[j][i],
        )))
    }

    pub fn rows(&self) -> usize {
        self.data.nrows()
    }

    pub fn cols(&self) -> usize {
        self.data.ncols()
    }

    pub fn shape(&self) -> (usize, usize) {
        self.data.shape()
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn is_empty(&self) -> bool {
        self.rows() == 0 || self.cols() == 0
    }

    pub fn as_dmatrix(&self) -> &DMatrix<Scalar> {
        &self.data
    }

    pub fn into_dmatrix(self) -> DMatrix<Scalar> {
        self.data
    }

    pub fn get(&self, i: usize, j: usize) -> Scalar {
        self.data[(i, j)]
    }

    pub fn column(&self, j: usize) -> DVector<Scalar> {
        self.data.column(j).into_owned()
    }

    pub fn columns(&self) -> Vec<DVector<Scalar>> {
        (0..self.cols()).map(|j| self.column(j)).collect()
    }

    /// Entries in row-major order.
    pub fn row_major(&self) -> Vec<Scalar> {
        let mut out = Vec::with_capacity(self.rows() * self.cols());
        for i in 0..self.rows() {
            for j in 0..self.cols() {
                out.push(self.data[(i, j)]);
            }
        }
        out
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Matrix {
        Matrix {
            data: self.data.adjoint(),
            field: self.field,
        }
    }

    pub fn scale(&self, factor: Scalar) -> Matrix {
        Self::from_dmatrix(&self.data * factor)
    }

    /// Largest entry magnitude, 0 for an empty matrix.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn frobenius_sq(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn all_finite(&self) -> bool {
        self.data
            .iter()
            .all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// `self − I`; panics on a non-square matrix.
    pub fn minus_identity(&self) -> Matrix {
        assert_eq!(
            self.rows(),
            self.cols(),
            "minus_identity needs a square matrix"
        );
        let n = self.rows();
        Self::from_dmatrix(&self.data - DMatrix::<Scalar>::identity(n, n))
    }

    /// Columns side by side; row counts must agree.
    pub fn hstack(&self, other: &Matrix) -> Result<Matrix> {
        if self.rows() != other.rows() {
            return Err(invalid(format!(
                "cannot append a {}-row block to a {}-row matrix",
                other.rows(),
                self.rows()
            )));
        }
        let mut data = DMatrix::zeros(self.rows(), self.cols() + other.cols());
        data.columns_mut(0, self.cols()).copy_from(&self.data);
        data.columns_mut(self.cols(), other.cols())
            .copy_from(&other.data);
        Ok(Self::from_dmatrix(data))
    }

    /// Keeps the listed columns (0-based), in the given order.
    pub fn select_columns(&self, keep: &[usize]) -> Matrix {
        let cols: Vec<_> = keep.iter().map(|&j| self.column(j)).collect();
        Self::from_columns(self.rows(), &cols).expect("columns share the row count")
    }

    /// Drops the listed columns (0-based).
    pub fn remove_columns(&self, drop: &[usize]) -> Matrix {
        let keep: Vec<usize> = (0..self.cols()).filter(|j| !drop.contains(j)).collect();
        self.select_columns(&keep)
    }

    /// Top-left `rows x cols` block, zero padded when larger than `self`.
    pub fn resized(&self, rows: usize, cols: usize) -> Matrix {
        Self::from_dmatrix(DMatrix::from_fn(rows, cols, |i, j| {
            if i < self.rows() && j < self.cols() {
                self.data[(i, j)]
            } else {
                Scalar::new(0.0, 0.0)
            }
        }))
    }
}

impl<'a> Mul<&'a Matrix> for &'a Matrix {
    type Output = Matrix;
    fn mul(self, rhs: &'a Matrix) -> Matrix {
        Matrix::from_dmatrix(&self.data * &rhs.data)
    }
}

impl<'a> Add<&'a Matrix> for &'a Matrix {
    type Output = Matrix;
    fn add(self, rhs: &'a Matrix) -> Matrix {
        Matrix::from_dmatrix(&self.data + &rhs.data)
    }
}

impl<'a> Sub<&'a Matrix> for &'a Matrix {
    type Output = Matrix;
    fn sub(self, rhs: &'a Matrix) -> Matrix {
        Matrix::from_dmatrix(&self.data - &rhs.data)
    }
}

impl fmt::Display for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows() {
            let row: Vec<String> = (0..self.cols())
                .map(|j| {
                    let z = self.data[(i, j)];
                    if self.field == Field::Real {
                        format!("{:>9.4}", z.re)
                    } else {
                        format!("{:>9.4}{:+.4}i", z.re, z.im)
                    }
                })
                .collect();
            writeln!(f, "[{}]", row.join(" "))?;
        }
        Ok(())
    }
}

/// Tolerances behind every rank decision.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TolerancePolicy {
    /// Singular values at or below `rank_rtol * σ_max` count as zero.
    pub rank_rtol: f64,
    /// Absolute floor under the relative threshold.
    pub abs_floor: f64,
    /// Relative change of γ under which a truncation scan is considered settled.
    pub stabilization_rtol: f64,
}

impl Default for TolerancePolicy {
    fn default() -> Self {
        TolerancePolicy {
            rank_rtol: 1e-10,
            abs_floor: 1e-12,
            stabilization_rtol: 1e-3,
        }
    }
}

impl TolerancePolicy {
    pub fn new(rank_rtol: f64, abs_floor: f64, stabilization_rtol: f64) -> Result<Self> {
        let tol = TolerancePolicy {
            rank_rtol,
            abs_floor,
            stabilization_rtol,
        };
        tol.validate()?;
        Ok(tol)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("rank_rtol", self.rank_rtol),
            ("abs_floor", self.abs_floor),
            ("stabilization_rtol", self.stabilization_rtol),
        ] {
            if !(v > 0.0 && v < 1.0) {
                return Err(invalid(format!("{name} must lie in (0, 1), got {v}")));
            }
        }
        Ok(())
    }

    /// Singular values strictly above this are numerically nonzero.
    pub fn threshold(&self, sigma_max: f64) -> f64 {
        (self.rank_rtol * sigma_max).max(self.abs_floor)
    }
}

/// Parses overrides such as `rank_rtol=1e-9,abs_floor=1e-13` on top of the defaults.
impl FromStr for TolerancePolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut tol = TolerancePolicy::default();
        for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (key, value) = part
                .split_once('=')
                .ok_or_else(|| invalid(format!("expected key=value, got `{part}`")))?;
            let value: f64 = value
                .trim()
                .parse()
                .map_err(|_| invalid(format!("`{value}` is not a number")))?;
            match key.trim() {
                "rank_rtol" => tol.rank_rtol = value,
                "abs_floor" => tol.abs_floor = value,
                "stabilization_rtol" => tol.stabilization_rtol = value,
                other => return Err(invalid(format!("unknown tolerance `{other}`"))),
            }
        }
        tol.validate()?;
        Ok(tol)
    }
}

/// Full singular value decomposition `A = U Σ V*`.
///
/// `left_basis` is `rows x rows` and `right_basis` is `cols x cols`; the
/// first `min(rows, cols)` columns pair with `singular_values`.
#[derive(Clone, Debug, PartialEq)]
pub struct SvdResult {
    pub singular_values: Vec<f64>,
    pub left_basis: Matrix,
    pub right_basis: Matrix,
}

impl SvdResult {
    pub fn sigma_max(&self) -> f64 {
        self.singular_values.first().copied().unwrap_or(0.0)
    }

    /// `U Σ V*` rebuilt from the factors.
    pub fn reconstruct(&self) -> Matrix {
        let (m, n) = (self.left_basis.rows(), self.right_basis.rows());
        let mut sigma = DMatrix::<Scalar>::zeros(m, n);
        for (i, s) in self.singular_values.iter().enumerate() {
            sigma[(i, i)] = Scalar::new(*s, 0.0);
        }
        Matrix::from_dmatrix(
            self.left_basis.as_dmatrix() * sigma * self.right_basis.as_dmatrix().adjoint(),
        )
    }
}

fn normalize_phase(mut col: nalgebra::DVectorViewMut<'_, Scalar>) -> Scalar {
    let mut best = 0;
    let mut best_abs = -1.0;
    for (i, z) in col.iter().enumerate() {
        let a = z.norm();
        if a > best_abs {
            best_abs = a;
            best = i;
        }
    }
    if best_abs <= 0.0 {
        return Scalar::new(1.0, 0.0);
    }
    let pivot = col[best];
    let phase = pivot.conj() / pivot.norm();
    for z in col.iter_mut() {
        *z *= phase;
    }
    col[best] = Scalar::new(col[best].norm(), 0.0);
    phase
}

/// Extends orthonormal columns `q` (n x k) to an orthonormal basis of ℂⁿ.
fn complete_basis(q: DMatrix<Scalar>) -> DMatrix<Scalar> {
    let (n, k) = q.shape();
    if k >= n {
        return q;
    }
    let mut aug = DMatrix::<Scalar>::zeros(n, k + n);
    aug.columns_mut(0, k).copy_from(&q);
    aug.columns_mut(k, n).fill_with_identity();
    let full = aug.qr().q();
    let mut out = DMatrix::<Scalar>::zeros(n, n);
    out.columns_mut(0, k).copy_from(&q);
    out.columns_mut(k, n - k).copy_from(&full.columns(k, n - k));
    for j in k..n {
        normalize_phase(out.column_mut(j));
    }
    out
}

/// Singular value decomposition with sorted singular values and fixed phases.
pub fn svd(a: &Matrix) -> Result<SvdResult> {
    if !a.all_finite() {
        return Err(invalid("matrix has non-finite entries"));
    }
    let (m, n) = a.shape();
    if m == 0 || n == 0 {
        return Ok(SvdResult {
            singular_values: Vec::new(),
            left_basis: Matrix::identity(m),
            right_basis: Matrix::identity(n),
        });
    }
    let (singular_values, mut u, mut v) = if m >= n {
        jacobi_svd(a.as_dmatrix().clone())
    } else {
        let (s, v, u) = jacobi_svd(a.as_dmatrix().adjoint());
        (s, u, v)
    };
    debug_assert!(singular_values.windows(2).all(|w| w[0] >= w[1]));

    for j in 0..singular_values.len().min(v.ncols()) {
        let phase = normalize_phase(v.column_mut(j));
        if j < u.ncols() {
            for z in u.column_mut(j).iter_mut() {
                *z *= phase;
            }
        }
    }

    Ok(SvdResult {
        singular_values,
        left_basis: Matrix::from_dmatrix(complete_basis(u)),
        right_basis: Matrix::from_dmatrix(complete_basis(v)),
    })
}

/// One-sided Jacobi SVD of a tall matrix (`rows >= cols`).
///
/// Returns the descending singular values, the left vectors of the nonzero
/// singular values and the full right basis.
fn jacobi_svd(mut work: DMatrix<Scalar>) -> (Vec<f64>, DMatrix<Scalar>, DMatrix<Scalar>) {
    const MAX_SWEEPS: usize = 80;
    let (m, n) = work.shape();
    let mut v = DMatrix::<Scalar>::identity(n, n);
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let alpha = work.column(p).norm_squared();
                let beta = work.column(q).norm_squared();
                let gamma = work.column(p).dotc(&work.column(q));
                let g = gamma.norm();
                if g == 0.0 || g <= f64::EPSILON * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let phase = gamma / g;
                let zeta = (beta - alpha) / (2.0 * g);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                rotate_columns(&mut work, p, q, c, s, phase);
                rotate_columns(&mut v, p, q, c, s, phase);
            }
        }
        if !rotated {
            break;
        }
    }

    let norms: Vec<f64> = (0..n).map(|j| work.column(j).norm()).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| norms[j].total_cmp(&norms[i]).then(i.cmp(&j)));
    let singular_values: Vec<f64> = order.iter().map(|&j| norms[j]).collect();
    let right = DMatrix::from_fn(n, n, |i, k| v[(i, order[k])]);
    let kept = singular_values.iter().take_while(|&&s| s > 0.0).count();
    let left = DMatrix::from_fn(m, kept, |i, k| {
        work[(i, order[k])] / Scalar::from(singular_values[k])
    });
    (singular_values, left, right)
}

/// Applies `[a_p a_q] <- [a_p a_q] [[c, s e^{iφ}], [-s e^{-iφ}, c]]`.
fn rotate_columns(a: &mut DMatrix<Scalar>, p: usize, q: usize, c: f64, s: f64, phase: Scalar) {
    for i in 0..a.nrows() {
        let x = a[(i, p)];
        let y = a[(i, q)];
        a[(i, p)] = x * c - y * phase.conj() * s;
        a[(i, q)] = x * phase * s + y * c;
    }
}

/// Number of singular values above the policy threshold.
pub fn numeric_rank(singular_values: &[f64], tol: &TolerancePolicy) -> usize {
    let Some(&sigma_max) = singular_values.first() else {
        return 0;
    };
    let threshold = tol.threshold(sigma_max);
    singular_values.iter().filter(|&&s| s > threshold).count()
}

/// Moore–Penrose inverse with singular values below the policy threshold discarded.
pub fn pseudo_inverse(a: &Matrix, tol: &TolerancePolicy) -> Result<Matrix> {
    let (m, n) = a.shape();
    let decomposition = svd(a)?;
    let rank = numeric_rank(&decomposition.singular_values, tol);
    let u = decomposition.left_basis.as_dmatrix();
    let v = decomposition.right_basis.as_dmatrix();
    let mut out = DMatrix::<Scalar>::zeros(n, m);
    for i in 0..rank {
        let inv = 1.0 / decomposition.singular_values[i];
        out += v.column(i) * u.column(i).adjoint() * Scalar::new(inv, 0.0);
    }
    Ok(Matrix::from_dmatrix(out))
}

/// Orthonormal basis of the orthogonal complement of the column space.
pub fn orthonormal_complement_basis(a: &Matrix, tol: &TolerancePolicy) -> Result<Matrix> {
    let decomposition = svd(a)?;
    let rank = numeric_rank(&decomposition.singular_values, tol);
    let d = a.rows();
    let u = decomposition.left_basis.as_dmatrix();
    Ok(Matrix::from_dmatrix(u.columns(rank, d - rank).into_owned()))
}

/// Orthonormal basis of the null space (right singular vectors past the rank).
pub fn null_space_basis(a: &Matrix, tol: &TolerancePolicy) -> Result<Matrix> {
    let decomposition = svd(a)?;
    let rank = numeric_rank(&decomposition.singular_values, tol);
    let n = a.cols();
    let v = decomposition.right_basis.as_dmatrix();
    Ok(Matrix::from_dmatrix(v.columns(rank, n - rank).into_owned()))
}

/// Numeric rank of `product − I`.
pub fn defect_rank(product: &Matrix, tol: &TolerancePolicy) -> Result<usize> {
    if product.rows() != product.cols() {
        return Err(invalid(format!(
            "defect rank needs a square product, got {}x{}",
            product.rows(),
            product.cols()
        )));
    }
    let decomposition = svd(&product.minus_identity())?;
    Ok(numeric_rank(&decomposition.singular_values, tol))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn tol() -> TolerancePolicy {
        TolerancePolicy::default()
    }

    fn unitary_defect(m: &Matrix) -> f64 {
        (&m.adjoint() * m).minus_identity().max_abs()
    }

    #[test]
    fn identity_singular_values() {
        let s = svd(&Matrix::identity(3)).unwrap();
        assert_eq!(s.singular_values, vec![1.0, 1.0, 1.0]);
    }

    #[test]
    fn diagonal_singular_values() {
        let a = Matrix::real(2, 2, &[2.0, 0.0, 0.0, 0.0]).unwrap();
        let s = svd(&a).unwrap();
        assert_abs_diff_eq!(s.singular_values[0], 2.0, epsilon = 1e-15);
        assert_abs_diff_eq!(s.singular_values[1], 0.0, epsilon = 1e-15);
    }

    #[test]
    fn swap_matrix_has_unit_singular_values() {
        // AᵀA = I for the swap, so both eigenvalues of AᵀA are 1.
        let a = Matrix::real(2, 2, &[0.0, 1.0, 1.0, 0.0]).unwrap();
        let ata = &a.adjoint() * &a;
        assert_eq!(ata, Matrix::identity(2));
        let s = svd(&a).unwrap();
        for sv in s.singular_values {
            assert_abs_diff_eq!(sv, 1.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn non_finite_input_is_rejected() {
        let a = Matrix::real(1, 2, &[1.0, f64::NAN]).unwrap();
        assert!(matches!(svd(&a), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn empty_matrix_has_empty_spectrum() {
        let s = svd(&Matrix::zeros(3, 0)).unwrap();
        assert!(s.singular_values.is_empty());
        assert_eq!(s.left_basis, Matrix::identity(3));
        assert_eq!(numeric_rank(&s.singular_values, &tol()), 0);
        let c = orthonormal_complement_basis(&Matrix::zeros(3, 0), &tol()).unwrap();
        assert_eq!(c.cols(), 3);
    }

    #[test]
    fn full_bases_for_wide_and_tall() {
        for (m, n) in [(2, 5), (5, 2), (3, 3)] {
            let a = Matrix::from_dmatrix(DMatrix::from_fn(m, n, |i, j| {
                Scalar::new((i * 7 + j * 3) as f64 % 5.0 - 2.0, (i + 2 * j) as f64 % 3.0)
            }));
            let s = svd(&a).unwrap();
            assert_eq!(s.left_basis.shape(), (m, m));
            assert_eq!(s.right_basis.shape(), (n, n));
            assert!(unitary_defect(&s.left_basis) <= 1e-10);
            assert!(unitary_defect(&s.right_basis) <= 1e-10);
            let err = (&s.reconstruct() - &a).max_abs();
            assert!(
                err <= 1e-8 * s.sigma_max().max(1.0),
                "reconstruction error {err}"
            );
        }
    }

    #[test]
    fn phase_convention_makes_pivot_real_positive() {
        let a = Matrix::from_row_major(
            2,
            2,
            &[
                Scalar::new(0.0, 1.0),
                Scalar::new(2.0, 0.0),
                Scalar::new(-1.0, 0.0),
                Scalar::new(0.0, -0.5),
            ],
        )
        .unwrap();
        let s = svd(&a).unwrap();
        for j in 0..2 {
            let col = s.right_basis.column(j);
            let pivot = col
                .iter()
                .max_by(|x, y| x.norm().total_cmp(&y.norm()))
                .unwrap();
            assert!(pivot.im.abs() < 1e-15 && pivot.re > 0.0);
        }
    }

    #[test]
    fn rank_examples() {
        assert_eq!(numeric_rank(&[1.0, 1.0, 1.0], &tol()), 3);
        assert_eq!(numeric_rank(&[2.0, 1e-14], &tol()), 1);
        assert_eq!(numeric_rank(&[0.0, 0.0], &tol()), 0);
        assert_eq!(numeric_rank(&[], &tol()), 0);
    }

    #[test]
    fn duplicate_column_rank() {
        // Columns e1, e1, e3, e4: row reduction leaves three pivots (rows 1, 3, 4).
        let a = Matrix::real(
            4,
            4,
            &[
                1.0, 1.0, 0.0, 0.0, //
                0.0, 0.0, 0.0, 0.0, //
                0.0, 0.0, 1.0, 0.0, //
                0.0, 0.0, 0.0, 1.0,
            ],
        )
        .unwrap();
        let s = svd(&a).unwrap();
        assert_eq!(numeric_rank(&s.singular_values, &tol()), 3);

        let comp = orthonormal_complement_basis(&a, &tol()).unwrap();
        assert_eq!(comp.cols(), 1);
        assert_abs_diff_eq!(comp.get(1, 0).norm(), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(comp.get(1, 0).re, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn complement_examples() {
        let a = Matrix::real(3, 2, &[1.0, 0.0, 0.0, 1.0, 0.0, 0.0]).unwrap();
        let c = orthonormal_complement_basis(&a, &tol()).unwrap();
        assert_eq!(c.cols(), 1);
        assert_abs_diff_eq!(c.get(2, 0).norm(), 1.0, epsilon = 1e-12);

        let full = Matrix::real(2, 2, &[1.0, 2.0, 3.0, 4.0]).unwrap();
        assert_eq!(
            orthonormal_complement_basis(&full, &tol()).unwrap().cols(),
            0
        );
    }

    #[test]
    fn pseudo_inverse_examples() {
        let id = Matrix::identity(3);
        assert!((&pseudo_inverse(&id, &tol()).unwrap() - &id).max_abs() < 1e-14);

        let a = Matrix::real(2, 2, &[2.0, 0.0, 0.0, 0.0]).unwrap();
        let expected = Matrix::real(2, 2, &[0.5, 0.0, 0.0, 0.0]).unwrap();
        assert!((&pseudo_inverse(&a, &tol()).unwrap() - &expected).max_abs() < 1e-14);

        let z = Matrix::zeros(2, 3);
        assert_eq!(pseudo_inverse(&z, &tol()).unwrap(), Matrix::zeros(3, 2));
    }

    #[test]
    fn pseudo_inverse_of_wide_full_rank_is_right_inverse() {
        let s = Matrix::real(
            3,
            5,
            &[
                1.0, 0.3, -0.2, 0.7, 0.1, //
                -0.4, 1.2, 0.5, 0.0, 0.9, //
                0.2, -0.6, 1.1, 0.8, -0.3,
            ],
        )
        .unwrap();
        let pinv = pseudo_inverse(&s, &tol()).unwrap();
        assert!((&s * &pinv).minus_identity().max_abs() <= 1e-8);
    }

    #[test]
    fn defect_rank_examples() {
        assert_eq!(defect_rank(&Matrix::identity(3), &tol()).unwrap(), 0);
        let p = Matrix::real(2, 2, &[0.0, 0.0, 0.0, 1.0]).unwrap();
        assert_eq!(defect_rank(&p, &tol()).unwrap(), 1);
        assert!(matches!(
            defect_rank(&Matrix::zeros(2, 3), &tol()),
            Err(Error::InvalidInput(_))
        ));
    }

    #[test]
    fn tolerance_parsing() {
        let t: TolerancePolicy = "rank_rtol=1e-8, abs_floor=1e-13".parse().unwrap();
        assert_eq!(t.rank_rtol, 1e-8);
        assert_eq!(t.abs_floor, 1e-13);
        assert_eq!(t.stabilization_rtol, 1e-3);
        assert!("rank_rtol=2".parse::<TolerancePolicy>().is_err());
        assert!("bogus=0.1".parse::<TolerancePolicy>().is_err());
        assert!(TolerancePolicy::new(0.0, 0.1, 0.1).is_err());
    }

    #[test]
    fn svd_is_deterministic() {
        let a = Matrix::real(3, 4, &[1., 2., 3., 4., 5., 6., 7., 8., 9., 10., 11., 13.]).unwrap();
        let s1 = svd(&a).unwrap();
        let s2 = svd(&a).unwrap();
        assert_eq!(s1, s2);
    }
}
