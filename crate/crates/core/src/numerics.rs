//! Dense small-matrix kernels: orthonormalization, rank decisions,
//! minimum-norm least squares, spectral norms and symmetric eigenvalue
//! extremes.
//!
//! Every rank decision goes through a singular value decomposition with a
//! cutoff relative to the largest singular value (see [`Tolerance`]).

use faer::Mat;
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};

pub type Vector = DVector<f64>;
pub type Matrix = DMatrix<f64>;

/// Numerical thresholds shared by every module.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Tolerance {
    /// Singular values below `rank_tol * sigma_max` count as zero.
    pub rank_tol: f64,
    /// Residual cutoff for declaring a linear system consistent, relative
    /// to the scale of the data.
    pub consistency_tol: f64,
    /// Pointwise equality threshold.
    pub eq_tol: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Self {
            rank_tol: 1e-10,
            consistency_tol: 1e-8,
            eq_tol: 1e-10,
        }
    }
}

impl Tolerance {
    pub fn validate(&self) -> Result<()> {
        let ok = [self.rank_tol, self.consistency_tol, self.eq_tol]
            .iter()
            .all(|t| t.is_finite() && *t >= 0.0);
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidInput(format!(
                "tolerances must be finite and nonnegative: {self:?}"
            )))
        }
    }
}

/// Thin SVD with singular triplets sorted by decreasing singular value.
pub(crate) struct SortedSvd {
    pub u: Matrix,
    pub sigma: Vec<f64>,
    pub v: Matrix,
}

pub(crate) fn sorted_svd(a: &Matrix) -> SortedSvd {
    let (rows, cols) = a.shape();
    let k = rows.min(cols);
    if k == 0 {
        return SortedSvd {
            u: Matrix::zeros(rows, 0),
            sigma: Vec::new(),
            v: Matrix::zeros(cols, 0),
        };
    }
    // nalgebra's dynamic SVD can lose accuracy on rank-deficient input, so
    // decompositions go through faer.
    let svd = to_faer(a)
        .thin_svd()
        .expect("SVD of a finite matrix converges");
    let (fu, fs, fv) = (svd.U(), svd.S().column_vector(), svd.V());
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&i, &j| fs[j].total_cmp(&fs[i]));
    let u = Matrix::from_fn(rows, k, |i, j| fu[(i, order[j])]);
    let v = Matrix::from_fn(cols, k, |i, j| fv[(i, order[j])]);
    let sigma = order.iter().map(|&j| fs[j]).collect();
    SortedSvd { u, sigma, v }
}

fn to_faer(a: &Matrix) -> Mat<f64> {
    Mat::from_fn(a.nrows(), a.ncols(), |i, j| a[(i, j)])
}

/// Number of singular values above `rel_tol * sigma_max`.
pub(crate) fn numerical_rank(sigma: &[f64], rel_tol: f64) -> usize {
    let max = sigma.first().copied().unwrap_or(0.0);
    if max <= 0.0 {
        return 0;
    }
    sigma.iter().take_while(|&&s| s > rel_tol * max).count()
}

/// Stacks vectors as the columns of a matrix.
pub fn columns(vectors: &[Vector], dim: usize) -> Result<Matrix> {
    for v in vectors {
        check_dim(dim, v.len())?;
    }
    let mut m = Matrix::zeros(dim, vectors.len());
    for (j, v) in vectors.iter().enumerate() {
        m.set_column(j, v);
    }
    Ok(m)
}

/// Orthonormal basis (as matrix columns) for the column space of `a`.
pub fn range_basis(a: &Matrix, tol: &Tolerance) -> Matrix {
    let svd = sorted_svd(a);
    let r = numerical_rank(&svd.sigma, tol.rank_tol);
    svd.u.columns(0, r).into_owned()
}

/// Orthonormal basis of the span of `vectors`, computed from a
/// rank-revealing SVD; the number of returned vectors is the numerical rank.
pub fn orthonormal_basis(vectors: &[Vector], tol: &Tolerance) -> Result<Vec<Vector>> {
    let Some(first) = vectors.first() else {
        return Ok(Vec::new());
    };
    let a = columns(vectors, first.len())?;
    let b = range_basis(&a, tol);
    Ok(b.column_iter().map(|c| c.into_owned()).collect())
}

/// Orthonormal basis (as columns) of the null space of `a`, with singular
/// values up to `cutoff` (absolute) treated as zero.
pub fn null_space_abs(a: &Matrix, cutoff: f64) -> Matrix {
    let (rows, cols) = a.shape();
    if cols == 0 {
        return Matrix::zeros(0, 0);
    }
    if rows == 0 {
        return Matrix::identity(cols, cols);
    }
    // Pad to at least square so the thin SVD exposes the full right basis.
    let padded = if rows < cols {
        let mut p = Matrix::zeros(cols, cols);
        p.rows_mut(0, rows).copy_from(a);
        p
    } else {
        a.clone()
    };
    let svd = sorted_svd(&padded);
    let r = svd.sigma.iter().take_while(|&&s| s > cutoff).count();
    svd.v.columns(r, cols - r).into_owned()
}

/// Orthonormal basis of the orthogonal complement of the span of the
/// orthonormal columns of `basis` in ℝⁿ.
pub fn complement_basis(basis: &Matrix, n: usize) -> Matrix {
    if basis.ncols() == 0 {
        return Matrix::identity(n, n);
    }
    let residual = Matrix::identity(n, n) - basis * basis.transpose();
    // Singular values of a projector are 0 or 1.
    let svd = sorted_svd(&residual);
    let r = svd.sigma.iter().take_while(|&&s| s > 0.5).count();
    svd.u.columns(0, r).into_owned()
}

/// Minimum-norm least-squares solution of `a x = b` through the
/// pseudoinverse, together with the achieved residual norm.
pub fn min_norm_solve(a: &Matrix, b: &Vector, tol: &Tolerance) -> Result<(Vector, f64)> {
    check_dim(a.nrows(), b.len())?;
    let svd = sorted_svd(a);
    let r = numerical_rank(&svd.sigma, tol.rank_tol);
    let mut x = Vector::zeros(a.ncols());
    for i in 0..r {
        let coeff = svd.u.column(i).dot(b) / svd.sigma[i];
        x.axpy(coeff, &svd.v.column(i), 1.0);
    }
    let residual = (a * &x - b).norm();
    Ok((x, residual))
}

/// Operator 2-norm, the largest singular value (equivalently the square
/// root of the largest eigenvalue of AᵀA).
pub fn spectral_norm(a: &Matrix) -> f64 {
    if a.is_empty() {
        return 0.0;
    }
    sorted_svd(a).sigma.first().copied().unwrap_or(0.0)
}

/// Smallest and largest eigenvalue of the symmetric part (M + Mᵀ)/2.
pub fn sym_eigen_extremes(m: &Matrix) -> Result<(f64, f64)> {
    if !m.is_square() {
        return Err(Error::NotSquare {
            rows: m.nrows(),
            cols: m.ncols(),
        });
    }
    if m.is_empty() {
        return Ok((0.0, 0.0));
    }
    let sym = symmetrize(m);
    let eig = to_faer(&sym)
        .self_adjoint_eigenvalues(faer::Side::Lower)
        .map_err(|_| Error::NonFinite("symmetric eigenproblem"))?;
    let min = eig.iter().copied().fold(f64::INFINITY, f64::min);
    let max = eig.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok((min, max))
}

pub fn symmetrize(m: &Matrix) -> Matrix {
    (m + m.transpose()) * 0.5
}

/// Largest absolute entry; 0 for an empty matrix.
pub fn max_abs(m: &Matrix) -> f64 {
    m.iter().fold(0.0, |acc, v| acc.max(v.abs()))
}

/// Builds a matrix from row-major nested vectors.
pub fn matrix_from_rows(rows: &[Vec<f64>]) -> Result<Matrix> {
    let nrows = rows.len();
    let ncols = rows.first().map_or(0, Vec::len);
    for r in rows {
        check_dim(ncols, r.len())?;
    }
    let m = Matrix::from_fn(nrows, ncols, |i, j| rows[i][j]);
    if m.iter().all(|v| v.is_finite()) {
        Ok(m)
    } else {
        Err(Error::NonFinite("matrix literal"))
    }
}

pub(crate) fn all_finite(v: &Vector) -> bool {
    v.iter().all(|x| x.is_finite())
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::{dmatrix, dvector};

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    #[test]
    fn basis_of_orthonormal_pair_spans_the_plane() {
        let b = orthonormal_basis(&[dvector![1.0, 0.0], dvector![0.0, 1.0]], &tol()).unwrap();
        assert_eq!(b.len(), 2);
        let m = columns(&b, 2).unwrap();
        assert!(max_abs(&(m.transpose() * &m - Matrix::identity(2, 2))) < 1e-12);
        assert!(max_abs(&(&m * m.transpose() - Matrix::identity(2, 2))) < 1e-12);
    }

    #[test]
    fn parallel_vectors_give_rank_one() {
        let b = orthonormal_basis(&[dvector![2.0, 0.0], dvector![4.0, 0.0]], &tol()).unwrap();
        assert_eq!(b.len(), 1);
        assert!((b[0][0].abs() - 1.0).abs() < 1e-12);
        assert!(b[0][1].abs() < 1e-12);
    }

    #[test]
    fn basis_reproduces_inputs() {
        let inputs = [dvector![1.0, 1.0, 0.0], dvector![1.0, 0.0, 1.0]];
        let b = orthonormal_basis(&inputs, &tol()).unwrap();
        assert_eq!(b.len(), 2);
        let m = columns(&b, 3).unwrap();
        for v in &inputs {
            let back = &m * (m.transpose() * v);
            assert!((back - v).norm() < 1e-12);
        }
    }

    #[test]
    fn basis_rejects_mixed_dimensions() {
        let err = orthonormal_basis(&[dvector![1.0, 0.0], dvector![1.0, 0.0, 0.0]], &tol());
        assert!(matches!(err, Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn zero_vectors_have_empty_basis() {
        let b = orthonormal_basis(&[dvector![0.0, 0.0, 0.0]], &tol()).unwrap();
        assert!(b.is_empty());
    }

    #[test]
    fn min_norm_identity() {
        let (x, r) = min_norm_solve(&Matrix::identity(2, 2), &dvector![3.0, 4.0], &tol()).unwrap();
        assert!((x - dvector![3.0, 4.0]).norm() < 1e-14);
        assert!(r < 1e-14);
    }

    #[test]
    fn min_norm_kills_null_component() {
        let a = dmatrix![1.0, 0.0; 0.0, 0.0];
        let (x, r) = min_norm_solve(&a, &dvector![5.0, 0.0], &tol()).unwrap();
        assert!((x - dvector![5.0, 0.0]).norm() < 1e-14);
        assert!(r < 1e-14);
    }

    #[test]
    fn min_norm_inconsistent_column() {
        let a = dmatrix![1.0; 1.0];
        let (x, r) = min_norm_solve(&a, &dvector![0.0, 2.0], &tol()).unwrap();
        assert!((x[0] - 1.0).abs() < 1e-14);
        assert!((r - 2f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn min_norm_shape_mismatch() {
        let err = min_norm_solve(&Matrix::identity(2, 2), &dvector![1.0], &tol());
        assert!(matches!(err, Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn spectral_norm_examples() {
        assert!((spectral_norm(&Matrix::identity(3, 3)) - 1.0).abs() < 1e-14);
        assert!((spectral_norm(&dmatrix![3.0, 0.0; 0.0, -5.0]) - 5.0).abs() < 1e-14);
        assert!((spectral_norm(&dmatrix![0.0, 1.0; 0.0, 0.0]) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn eigen_extremes_examples() {
        let (lo, hi) = sym_eigen_extremes(&dmatrix![0.2, 0.0; 0.0, 0.9]).unwrap();
        assert!((lo - 0.2).abs() < 1e-14 && (hi - 0.9).abs() < 1e-14);
        let (lo, hi) = sym_eigen_extremes(&Matrix::zeros(2, 2)).unwrap();
        assert_eq!((lo, hi), (0.0, 0.0));
        let (lo, hi) = sym_eigen_extremes(&dmatrix![0.0, 1.0; 1.0, 0.0]).unwrap();
        assert!((lo + 1.0).abs() < 1e-14 && (hi - 1.0).abs() < 1e-14);
    }

    #[test]
    fn eigen_extremes_rejects_rectangular() {
        assert!(matches!(
            sym_eigen_extremes(&Matrix::zeros(2, 3)),
            Err(Error::NotSquare { rows: 2, cols: 3 })
        ));
    }

    #[test]
    fn null_space_of_wide_matrix() {
        let a = dmatrix![1.0, 0.0, 0.0];
        let n = null_space_abs(&a, 1e-10);
        assert_eq!(n.ncols(), 2);
        assert!((a * n).norm() < 1e-14);
    }

    #[test]
    fn complement_completes_basis() {
        let b = dmatrix![1.0; 1.0] / 2f64.sqrt();
        let c = complement_basis(&b, 2);
        assert_eq!(c.ncols(), 1);
        assert!((b.transpose() * &c).norm() < 1e-14);
    }
}
