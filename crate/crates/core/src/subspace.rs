//! Affine subspaces of ℝⁿ stored as an anchor point plus an orthonormal
//! direction basis.

use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::numerics::{
    columns, complement_basis, max_abs, min_norm_solve, range_basis, Matrix, Tolerance, Vector,
};

/// `anchor + span(basis)`. The anchor is kept canonical: it is the point
/// of the set closest to the origin, so a subspace is linear exactly when
/// its anchor vanishes.
#[derive(Debug, Clone, PartialEq)]
pub struct AffineSubspace {
    anchor: Vector,
    basis: Matrix,
}

impl AffineSubspace {
    /// Builds `anchor + span(span)`; the span vectors need not be
    /// orthonormal or independent.
    pub fn new(anchor: Vector, span: &[Vector], tol: &Tolerance) -> Result<Self> {
        let n = anchor.len();
        let raw = columns(span, n)?;
        let basis = range_basis(&raw, tol);
        Ok(Self::from_orthonormal(anchor, basis))
    }

    /// Linear subspace spanned by `span` in ℝⁿ.
    pub fn linear(n: usize, span: &[Vector], tol: &Tolerance) -> Result<Self> {
        Self::new(Vector::zeros(n), span, tol)
    }

    /// Caller guarantees the columns of `basis` are orthonormal.
    pub fn from_orthonormal(anchor: Vector, basis: Matrix) -> Self {
        assert_eq!(anchor.len(), basis.nrows(), "anchor/basis dimension");
        let anchor = &anchor - &basis * (basis.transpose() * &anchor);
        Self { anchor, basis }
    }

    pub fn point(p: Vector) -> Self {
        let n = p.len();
        Self {
            anchor: p,
            basis: Matrix::zeros(n, 0),
        }
    }

    pub fn whole_space(n: usize) -> Self {
        Self {
            anchor: Vector::zeros(n),
            basis: Matrix::identity(n, n),
        }
    }

    pub fn zero(n: usize) -> Self {
        Self::point(Vector::zeros(n))
    }

    /// Affine hull of a nonempty point list.
    pub fn affine_hull(points: &[Vector], tol: &Tolerance) -> Result<Self> {
        let first = points.first().ok_or(Error::EmptyInput("affine hull"))?;
        let diffs: Vec<Vector> = points[1..].iter().map(|p| p - first).collect();
        for d in &diffs {
            check_dim(first.len(), d.len())?;
        }
        Self::new(first.clone(), &diffs, tol)
    }

    pub fn ambient_dim(&self) -> usize {
        self.anchor.len()
    }

    /// Dimension of the direction space.
    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    pub fn anchor(&self) -> &Vector {
        &self.anchor
    }

    /// Orthonormal direction basis as matrix columns.
    pub fn basis(&self) -> &Matrix {
        &self.basis
    }

    pub fn basis_vectors(&self) -> Vec<Vector> {
        self.basis.column_iter().map(|c| c.into_owned()).collect()
    }

    /// Orthogonal projector onto the direction space, `B Bᵀ`.
    pub fn projector_matrix(&self) -> Matrix {
        &self.basis * self.basis.transpose()
    }

    pub fn is_linear(&self, tol: &Tolerance) -> bool {
        self.anchor.norm() <= tol.consistency_tol
    }

    pub fn project(&self, x: &Vector) -> Result<Vector> {
        check_dim(self.ambient_dim(), x.len())?;
        let shifted = x - &self.anchor;
        Ok(&self.anchor + &self.basis * (self.basis.transpose() * shifted))
    }

    pub fn reflect(&self, x: &Vector) -> Result<Vector> {
        Ok(self.project(x)? * 2.0 - x)
    }

    /// Membership with the scale-invariant residual test
    /// `|P x - x| <= consistency_tol (1 + |x|)`.
    pub fn contains(&self, x: &Vector, tol: &Tolerance) -> Result<bool> {
        let p = self.project(x)?;
        Ok((p - x).norm() <= tol.consistency_tol * (1.0 + x.norm()))
    }

    pub fn orthogonal_complement(&self, tol: &Tolerance) -> Result<Self> {
        if !self.is_linear(tol) {
            return Err(Error::NotLinear {
                residual: self.anchor.norm(),
            });
        }
        let n = self.ambient_dim();
        Ok(Self {
            anchor: Vector::zeros(n),
            basis: complement_basis(&self.basis, n),
        })
    }

    /// Same set shifted by `v`.
    pub fn translate(&self, v: &Vector) -> Result<Self> {
        check_dim(self.ambient_dim(), v.len())?;
        Ok(Self::from_orthonormal(&self.anchor + v, self.basis.clone()))
    }

    /// Linear subspace parallel to this one.
    pub fn direction(&self) -> Self {
        Self {
            anchor: Vector::zeros(self.ambient_dim()),
            basis: self.basis.clone(),
        }
    }

    /// Set equality: equal dimensions, equal direction projectors and a
    /// shared point.
    pub fn same_set(&self, other: &Self, tol: &Tolerance) -> bool {
        self.ambient_dim() == other.ambient_dim()
            && self.dim() == other.dim()
            && max_abs(&(self.projector_matrix() - other.projector_matrix())) <= tol.consistency_tol
            && (&self.anchor - &other.anchor).norm()
                <= tol.consistency_tol * (1.0 + self.anchor.norm())
    }

    /// Whether `self` is contained in `other`.
    pub fn is_subset_of(&self, other: &Self, tol: &Tolerance) -> bool {
        if self.ambient_dim() != other.ambient_dim() {
            return false;
        }
        let Ok(anchor_in) = other.contains(&self.anchor, tol) else {
            return false;
        };
        let p = other.projector_matrix();
        anchor_in && max_abs(&(&p * &self.basis - &self.basis)) <= tol.consistency_tol
    }
}

/// Linear sum `U_1 + ... + U_k` of the direction spaces.
pub fn linear_sum(subspaces: &[AffineSubspace], tol: &Tolerance) -> Result<AffineSubspace> {
    let first = subspaces.first().ok_or(Error::EmptyInput("linear sum"))?;
    let n = first.ambient_dim();
    let mut vectors = Vec::new();
    for s in subspaces {
        check_dim(n, s.ambient_dim())?;
        vectors.extend(s.basis_vectors());
    }
    AffineSubspace::linear(n, &vectors, tol)
}

/// Result of intersecting affine subspaces.
#[derive(Debug, Clone, PartialEq)]
pub enum Intersection {
    Subspace(AffineSubspace),
    /// Inconsistent constraints; `residual` is the least-squares residual
    /// of the stacked system.
    Empty { residual: f64 },
}

impl Intersection {
    pub fn subspace(&self) -> Option<&AffineSubspace> {
        match self {
            Intersection::Subspace(s) => Some(s),
            Intersection::Empty { .. } => None,
        }
    }

    pub fn into_result(self) -> Result<AffineSubspace> {
        match self {
            Intersection::Subspace(s) => Ok(s),
            Intersection::Empty { residual } => Err(Error::EmptyIntersection { residual }),
        }
    }

    pub fn is_empty(&self) -> bool {
        matches!(self, Intersection::Empty { .. })
    }
}

/// Intersection of finitely many affine subspaces.
///
/// Stacks the constraints `N_jᵀ (x - a_j) = 0`, with `N_j` an orthonormal
/// basis of the complement of the j-th direction space, and solves for the
/// minimum-norm point. The direction space is the complement of the sum of
/// the complements.
pub fn intersect(subspaces: &[AffineSubspace], tol: &Tolerance) -> Result<Intersection> {
    let first = subspaces.first().ok_or(Error::EmptyInput("intersection"))?;
    let n = first.ambient_dim();
    let mut normals: Vec<Matrix> = Vec::with_capacity(subspaces.len());
    let mut total = 0;
    for s in subspaces {
        check_dim(n, s.ambient_dim())?;
        let nb = complement_basis(s.basis(), n);
        total += nb.ncols();
        normals.push(nb);
    }
    let mut constraints = Matrix::zeros(total, n);
    let mut rhs = Vector::zeros(total);
    let mut row = 0;
    let mut scale = 0.0f64;
    for (s, nb) in subspaces.iter().zip(&normals) {
        let k = nb.ncols();
        constraints.rows_mut(row, k).copy_from(&nb.transpose());
        rhs.rows_mut(row, k).copy_from(&(nb.transpose() * s.anchor()));
        scale = scale.max(s.anchor().norm());
        row += k;
    }
    let (x, residual) = min_norm_solve(&constraints, &rhs, tol)?;
    if residual > tol.consistency_tol * (1.0 + scale) {
        return Ok(Intersection::Empty { residual });
    }
    let normal_span = range_basis(&constraints.transpose(), tol);
    let direction = complement_basis(&normal_span, n);
    Ok(Intersection::Subspace(AffineSubspace::from_orthonormal(
        x, direction,
    )))
}

/// Config literal `{ "anchor": [..], "span": [[..], ..] }`; span vectors
/// are raw and get orthonormalized on load.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubspaceLiteral {
    pub anchor: Vec<f64>,
    #[serde(default)]
    pub span: Vec<Vec<f64>>,
}

impl SubspaceLiteral {
    pub fn build(&self, tol: &Tolerance) -> Result<AffineSubspace> {
        let anchor = Vector::from_vec(self.anchor.clone());
        if !crate::numerics::all_finite(&anchor) {
            return Err(Error::NonFinite("subspace anchor"));
        }
        let span: Vec<Vector> = self
            .span
            .iter()
            .map(|v| Vector::from_vec(v.clone()))
            .collect();
        if span.iter().any(|v| !crate::numerics::all_finite(v)) {
            return Err(Error::NonFinite("subspace span"));
        }
        AffineSubspace::new(anchor, &span, tol)
    }

    pub fn from_subspace(s: &AffineSubspace) -> Self {
        Self {
            anchor: s.anchor().iter().copied().collect(),
            span: s
                .basis_vectors()
                .iter()
                .map(|v| v.iter().copied().collect())
                .collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::dvector;

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    fn x_axis() -> AffineSubspace {
        AffineSubspace::linear(2, &[dvector![1.0, 0.0]], &tol()).unwrap()
    }

    fn y_axis() -> AffineSubspace {
        AffineSubspace::linear(2, &[dvector![0.0, 1.0]], &tol()).unwrap()
    }

    fn line_y1() -> AffineSubspace {
        AffineSubspace::new(dvector![0.0, 1.0], &[dvector![1.0, 0.0]], &tol()).unwrap()
    }

    #[test]
    fn project_examples() {
        let p = x_axis().project(&dvector![3.0, 4.0]).unwrap();
        assert!((p - dvector![3.0, 0.0]).norm() < 1e-14);
        let p = line_y1().project(&dvector![5.0, 7.0]).unwrap();
        assert!((p - dvector![5.0, 1.0]).norm() < 1e-14);
        let inside = dvector![-2.0, 1.0];
        assert!((line_y1().project(&inside).unwrap() - &inside).norm() < 1e-14);
    }

    #[test]
    fn reflect_examples() {
        let r = x_axis().reflect(&dvector![3.0, 4.0]).unwrap();
        assert!((r - dvector![3.0, -4.0]).norm() < 1e-14);
        let r = line_y1().reflect(&dvector![0.0, 3.0]).unwrap();
        assert!((r - dvector![0.0, -1.0]).norm() < 1e-14);
        let on = dvector![4.0, 1.0];
        assert!((line_y1().reflect(&on).unwrap() - &on).norm() < 1e-14);
    }

    #[test]
    fn project_rejects_wrong_dimension() {
        assert!(matches!(
            x_axis().project(&dvector![1.0, 2.0, 3.0]),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn complement_examples() {
        let c = x_axis().orthogonal_complement(&tol()).unwrap();
        assert!(c.same_set(&y_axis(), &tol()));
        let c = AffineSubspace::zero(3).orthogonal_complement(&tol()).unwrap();
        assert_eq!(c.dim(), 3);
        let diag = AffineSubspace::linear(2, &[dvector![1.0, 1.0]], &tol()).unwrap();
        let c = diag.orthogonal_complement(&tol()).unwrap();
        assert_eq!(c.dim(), 1);
        assert!(c.contains(&dvector![1.0, -1.0], &tol()).unwrap());
    }

    #[test]
    fn complement_of_affine_set_is_an_error() {
        assert!(matches!(
            line_y1().orthogonal_complement(&tol()),
            Err(Error::NotLinear { .. })
        ));
    }

    #[test]
    fn intersect_examples() {
        let i = intersect(&[x_axis(), y_axis()], &tol()).unwrap();
        let s = i.subspace().unwrap();
        assert_eq!(s.dim(), 0);
        assert!(s.anchor().norm() < 1e-14);

        let x2 = AffineSubspace::new(dvector![2.0, 0.0], &[dvector![0.0, 1.0]], &tol()).unwrap();
        let s = intersect(&[line_y1(), x2], &tol()).unwrap().into_result().unwrap();
        assert_eq!(s.dim(), 0);
        assert!((s.anchor() - dvector![2.0, 1.0]).norm() < 1e-12);

        let i = intersect(&[x_axis(), line_y1()], &tol()).unwrap();
        assert!(i.is_empty());
    }

    #[test]
    fn anchor_is_canonicalized() {
        let s = AffineSubspace::new(dvector![7.0, 1.0], &[dvector![1.0, 0.0]], &tol()).unwrap();
        assert!((s.anchor() - dvector![0.0, 1.0]).norm() < 1e-14);
        assert!(s.same_set(&line_y1(), &tol()));
    }

    #[test]
    fn literal_round_trip() {
        let lit: SubspaceLiteral =
            serde_json::from_str(r#"{ "anchor": [0, 1], "span": [[2, 0]] }"#).unwrap();
        let s = lit.build(&tol()).unwrap();
        assert!(s.same_set(&line_y1(), &tol()));
    }
}
