//! Affine isometries and general affine maps on ℝⁿ.
//!
//! [`AffineIsometry`] can only be built through constructors that keep its
//! linear part orthogonal; [`AffineMap`] carries arbitrary linear parts
//! (projector products, averaged operators, the Douglas–Rachford operator).

use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::numerics::{
    matrix_from_rows, max_abs, null_space_abs, spectral_norm, Matrix, Tolerance,
    Vector,
};
use crate::subspace::AffineSubspace;

/// `x ↦ Q x + b` with `Q` orthogonal.
#[derive(Debug, Clone, PartialEq)]
pub struct AffineIsometry {
    q: Matrix,
    b: Vector,
}

impl AffineIsometry {
    pub fn identity(n: usize) -> Self {
        Self {
            q: Matrix::identity(n, n),
            b: Vector::zeros(n),
        }
    }

    /// Checks `|QᵀQ - I|_max <= rank_tol` (orthogonality is a spectral
    /// statement, so the rank threshold applies).
    pub fn new(q: Matrix, b: Vector, tol: &Tolerance) -> Result<Self> {
        if !q.is_square() {
            return Err(Error::NotSquare {
                rows: q.nrows(),
                cols: q.ncols(),
            });
        }
        check_dim(q.nrows(), b.len())?;
        if q.iter().chain(b.iter()).any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("isometry"));
        }
        let deviation = orthogonality_defect(&q);
        if deviation > tol.rank_tol.max(1e-10) {
            return Err(Error::NotOrthogonal { deviation });
        }
        Ok(Self { q, b })
    }

    pub fn linear(q: Matrix, tol: &Tolerance) -> Result<Self> {
        let n = q.nrows();
        Self::new(q, Vector::zeros(n), tol)
    }

    /// Reflector `2 P_S - Id` of an affine subspace.
    pub fn reflector(s: &AffineSubspace) -> Self {
        let n = s.ambient_dim();
        let p = s.projector_matrix();
        let q = &p * 2.0 - Matrix::identity(n, n);
        // R x = 2(a + P(x - a)) - x with the canonical anchor a ⟂ directions.
        let b = s.anchor() * 2.0;
        Self { q, b }
    }

    pub fn translation(a: Vector) -> Self {
        let n = a.len();
        Self {
            q: Matrix::identity(n, n),
            b: a,
        }
    }

    pub fn dim(&self) -> usize {
        self.b.len()
    }

    pub fn linear_part(&self) -> &Matrix {
        &self.q
    }

    pub fn offset(&self) -> &Vector {
        &self.b
    }

    pub fn apply(&self, x: &Vector) -> Result<Vector> {
        check_dim(self.dim(), x.len())?;
        Ok(&self.q * x + &self.b)
    }

    /// `x ↦ self(inner(x))`.
    pub fn after(&self, inner: &Self) -> Result<Self> {
        compose(self, inner)
    }

    pub fn is_linear(&self, tol: &Tolerance) -> bool {
        self.b.norm() <= tol.eq_tol
    }

    pub fn is_self_adjoint(&self, tol: &Tolerance) -> bool {
        max_abs(&(&self.q - self.q.transpose())) <= tol.eq_tol
    }

    pub fn is_normal(&self, tol: &Tolerance) -> bool {
        let qt = self.q.transpose();
        max_abs(&(&self.q * &qt - &qt * &self.q)) <= tol.eq_tol
    }

    /// Linear self-adjoint isometries are exactly the reflectors of linear
    /// subspaces.
    pub fn is_linear_reflector(&self, tol: &Tolerance) -> bool {
        self.is_linear(tol) && self.is_self_adjoint(tol)
    }

    pub fn is_identity(&self, tol: &Tolerance) -> bool {
        let n = self.dim();
        max_abs(&(&self.q - Matrix::identity(n, n))) <= tol.eq_tol && self.b.norm() <= tol.eq_tol
    }

    /// Entrywise equality of linear parts and offsets at `eq_tol`.
    pub fn approx_eq(&self, other: &Self, tol: &Tolerance) -> bool {
        self.dim() == other.dim()
            && max_abs(&(&self.q - &other.q)) <= tol.eq_tol
            && (&self.b - &other.b).amax() <= tol.eq_tol
    }

    pub fn fixed_point_set(&self, tol: &Tolerance) -> Option<AffineSubspace> {
        fixed_points(&self.q, &self.b, tol)
    }

    /// `F x = T(x + z) - z` for a fixed point `z`; the result is linear and
    /// `Fix F = Fix T - z`.
    pub fn linearize_about(&self, z: &Vector, tol: &Tolerance) -> Result<Self> {
        check_dim(self.dim(), z.len())?;
        let residual = (&self.q * z + &self.b - z).norm();
        if residual > tol.consistency_tol * (1.0 + z.norm()) {
            return Err(Error::NotFixedPoint { residual });
        }
        Ok(Self {
            q: self.q.clone(),
            b: Vector::zeros(self.dim()),
        })
    }

    pub fn to_map(&self) -> AffineMap {
        AffineMap {
            a: self.q.clone(),
            b: self.b.clone(),
        }
    }
}

fn orthogonality_defect(q: &Matrix) -> f64 {
    let n = q.nrows();
    max_abs(&(q.transpose() * q - Matrix::identity(n, n)))
}

/// `x ↦ t2(t1(x))`: `Q = Q₂Q₁`, `b = Q₂b₁ + b₂`.
pub fn compose(t2: &AffineIsometry, t1: &AffineIsometry) -> Result<AffineIsometry> {
    check_dim(t2.dim(), t1.dim())?;
    Ok(AffineIsometry {
        q: &t2.q * &t1.q,
        b: &t2.q * &t1.b + &t2.b,
    })
}

/// Composition of a list applied left to right: `ops[0]` acts first.
pub fn compose_all(ops: &[AffineIsometry], n: usize) -> Result<AffineIsometry> {
    ops.iter()
        .try_fold(AffineIsometry::identity(n), |acc, t| compose(t, &acc))
}

/// Solves `(A - I) x = -b`. Singular values of `A - I` up to `rank_tol`
/// are exact fixed directions.
fn fixed_points(a: &Matrix, b: &Vector, tol: &Tolerance) -> Option<AffineSubspace> {
    fixed_points_or_residual(a, b, tol).ok()
}

/// Either the fixed-point set or the least-squares residual of `(A - I) x = -b`.
pub(crate) fn fixed_points_or_residual(
    a: &Matrix,
    b: &Vector,
    tol: &Tolerance,
) -> std::result::Result<AffineSubspace, f64> {
    let n = b.len();
    let shifted = a - Matrix::identity(n, n);
    let (x, residual) = min_norm_solve_abs(&shifted, &(-b), tol.rank_tol);
    if residual > tol.consistency_tol * (1.0 + b.norm()) {
        return Err(residual);
    }
    let directions = null_space_abs(&shifted, tol.rank_tol);
    Ok(AffineSubspace::from_orthonormal(x, directions))
}

// A - I has O(1) scale, so its rank is decided with an absolute cutoff: a
// relative one would turn a near-zero spectrum into spurious rank.
fn min_norm_solve_abs(a: &Matrix, b: &Vector, cutoff: f64) -> (Vector, f64) {
    let svd = crate::numerics::sorted_svd(a);
    let r = svd.sigma.iter().take_while(|&&s| s > cutoff).count();
    let mut x = Vector::zeros(a.ncols());
    for i in 0..r {
        let c = svd.u.column(i).dot(b) / svd.sigma[i];
        x.axpy(c, &svd.v.column(i), 1.0);
    }
    let residual = (a * &x - b).norm();
    (x, residual)
}

/// `x ↦ A x + b` with an arbitrary linear part.
#[derive(Debug, Clone, PartialEq)]
pub struct AffineMap {
    a: Matrix,
    b: Vector,
}

impl AffineMap {
    pub fn new(a: Matrix, b: Vector) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::NotSquare {
                rows: a.nrows(),
                cols: a.ncols(),
            });
        }
        check_dim(a.nrows(), b.len())?;
        if a.iter().chain(b.iter()).any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("affine map"));
        }
        Ok(Self { a, b })
    }

    pub fn linear(a: Matrix) -> Result<Self> {
        let n = a.nrows();
        Self::new(a, Vector::zeros(n))
    }

    pub fn identity(n: usize) -> Self {
        Self {
            a: Matrix::identity(n, n),
            b: Vector::zeros(n),
        }
    }

    /// Orthogonal projector onto an affine subspace.
    pub fn projector(s: &AffineSubspace) -> Self {
        Self {
            a: s.projector_matrix(),
            b: s.anchor().clone(),
        }
    }

    /// `P_{U_m} ⋯ P_{U_1}`: the first subspace is projected onto first.
    pub fn projector_product(subspaces: &[AffineSubspace]) -> Result<Self> {
        let first = subspaces
            .first()
            .ok_or(Error::EmptyInput("projector product"))?;
        let n = first.ambient_dim();
        subspaces.iter().try_fold(Self::identity(n), |acc, s| {
            Self::projector(s).after(&acc)
        })
    }

    /// Douglas–Rachford operator `½(Id + R_{U₂} R_{U₁})`.
    pub fn douglas_rachford(u1: &AffineSubspace, u2: &AffineSubspace) -> Result<Self> {
        check_dim(u1.ambient_dim(), u2.ambient_dim())?;
        let r = compose(&AffineIsometry::reflector(u2), &AffineIsometry::reflector(u1))?;
        let n = u1.ambient_dim();
        Ok(Self {
            a: (Matrix::identity(n, n) + r.linear_part()) * 0.5,
            b: r.offset() * 0.5,
        })
    }

    pub fn dim(&self) -> usize {
        self.b.len()
    }

    pub fn linear_part(&self) -> &Matrix {
        &self.a
    }

    pub fn offset(&self) -> &Vector {
        &self.b
    }

    pub fn apply(&self, x: &Vector) -> Result<Vector> {
        check_dim(self.dim(), x.len())?;
        Ok(&self.a * x + &self.b)
    }

    /// `x ↦ self(inner(x))`.
    pub fn after(&self, inner: &Self) -> Result<Self> {
        check_dim(self.dim(), inner.dim())?;
        Ok(Self {
            a: &self.a * &inner.a,
            b: &self.a * &inner.b + &self.b,
        })
    }

    /// Adjoint of the linear part (the offset must vanish).
    pub fn adjoint(&self, tol: &Tolerance) -> Result<Self> {
        self.require_linear(tol)?;
        Ok(Self {
            a: self.a.transpose(),
            b: Vector::zeros(self.dim()),
        })
    }

    pub fn is_linear(&self, tol: &Tolerance) -> bool {
        self.b.norm() <= tol.eq_tol
    }

    pub fn require_linear(&self, tol: &Tolerance) -> Result<()> {
        if self.is_linear(tol) {
            Ok(())
        } else {
            Err(Error::NotLinearMap {
                offset: self.b.norm(),
            })
        }
    }

    pub fn asymmetry(&self) -> f64 {
        max_abs(&(&self.a - self.a.transpose()))
    }

    pub fn is_self_adjoint(&self, tol: &Tolerance) -> bool {
        self.asymmetry() <= tol.eq_tol
    }

    pub fn is_normal(&self, tol: &Tolerance) -> bool {
        let at = self.a.transpose();
        max_abs(&(&self.a * &at - &at * &self.a)) <= tol.eq_tol
    }

    pub fn norm(&self) -> f64 {
        spectral_norm(&self.a)
    }

    pub fn require_nonexpansive(&self, tol: &Tolerance) -> Result<()> {
        let norm = self.norm();
        if norm <= 1.0 + tol.eq_tol.max(1e-12) {
            Ok(())
        } else {
            Err(Error::Expansive { norm })
        }
    }

    pub fn fixed_point_set(&self, tol: &Tolerance) -> Option<AffineSubspace> {
        fixed_points(&self.a, &self.b, tol)
    }
}

impl From<&AffineIsometry> for AffineMap {
    fn from(t: &AffineIsometry) -> Self {
        t.to_map()
    }
}

/// Weights ω, averaging constants α and relaxation constants λ of the
/// averaged operators built from linear isometries.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AveragedSpec {
    pub weights: Vec<f64>,
    pub alphas: Vec<f64>,
    /// Used by the product form only; entry 0 is ignored there.
    #[serde(default)]
    pub lambdas: Vec<f64>,
}

impl AveragedSpec {
    /// ω_i = 1/t, α_i = λ_i = ½.
    pub fn uniform(t: usize) -> Self {
        let w = 1.0 / t as f64;
        Self {
            weights: vec![w; t],
            alphas: vec![0.5; t],
            lambdas: vec![0.5; t],
        }
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// α = Σ ω_i α_i, the averagedness constant of the built operator.
    pub fn alpha(&self) -> f64 {
        self.weights
            .iter()
            .zip(&self.alphas)
            .map(|(w, a)| w * a)
            .sum()
    }

    fn validate(&self, count: usize, product: bool) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidAveraging(msg));
        if self.weights.len() != count || self.alphas.len() != count {
            return bad(format!(
                "expected {count} weights and alphas, got {} and {}",
                self.weights.len(),
                self.alphas.len()
            ));
        }
        if count == 0 {
            return bad("no operators".into());
        }
        if self.weights.iter().any(|&w| !(w > 0.0 && w <= 1.0)) {
            return bad("weights must lie in (0, 1]".into());
        }
        let total: f64 = self.weights.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return bad(format!("weights sum to {total}, not 1"));
        }
        if self.alphas.iter().any(|&a| !(a > 0.0 && a < 1.0)) {
            return bad("alphas must lie in (0, 1)".into());
        }
        if product {
            if self.lambdas.len() != count {
                return bad(format!(
                    "expected {count} lambdas, got {}",
                    self.lambdas.len()
                ));
            }
            if self.lambdas[1..].iter().any(|&l| !(l > 0.0 && l < 1.0)) {
                return bad("lambdas must lie in (0, 1)".into());
            }
        }
        Ok(())
    }
}

/// An averaged linear operator together with its averagedness constant.
#[derive(Debug, Clone, PartialEq)]
pub struct Averaged {
    pub map: AffineMap,
    pub alpha: f64,
}

fn require_linear_family(ops: &[AffineIsometry], tol: &Tolerance) -> Result<usize> {
    let n = ops.first().ok_or(Error::EmptyInput("operator family"))?.dim();
    for t in ops {
        check_dim(n, t.dim())?;
        if !t.is_linear(tol) {
            return Err(Error::NotLinearMap {
                offset: t.offset().norm(),
            });
        }
    }
    Ok(n)
}

/// `A = Σ ω_i ((1 - α_i) Id + α_i F_i)`.
pub fn build_sum_averaged(
    spec: &AveragedSpec,
    ops: &[AffineIsometry],
    tol: &Tolerance,
) -> Result<Averaged> {
    let n = require_linear_family(ops, tol)?;
    spec.validate(ops.len(), false)?;
    let id = Matrix::identity(n, n);
    let mut a = Matrix::zeros(n, n);
    for ((w, alpha), f) in spec.weights.iter().zip(&spec.alphas).zip(ops) {
        a += (&id * (1.0 - alpha) + f.linear_part() * *alpha) * *w;
    }
    Ok(Averaged {
        map: AffineMap::linear(a)?,
        alpha: spec.alpha(),
    })
}

/// `A = Σ ω_i A_i` with `A_1 = (1 - α_1) Id + α_1 F_1` and
/// `A_i = (1 - α_i) Id + α_i ((1 - λ_i) Id + λ_i F_i) F_{i-1} ⋯ F_1`.
pub fn build_product_averaged(
    spec: &AveragedSpec,
    ops: &[AffineIsometry],
    tol: &Tolerance,
) -> Result<Averaged> {
    let n = require_linear_family(ops, tol)?;
    spec.validate(ops.len(), true)?;
    let id = Matrix::identity(n, n);
    let mut a = Matrix::zeros(n, n);
    // prefix = F_{i-1} ⋯ F_1
    let mut prefix = id.clone();
    for (i, f) in ops.iter().enumerate() {
        let (w, alpha) = (spec.weights[i], spec.alphas[i]);
        let inner = if i == 0 {
            f.linear_part().clone()
        } else {
            let lambda = spec.lambdas[i];
            (&id * (1.0 - lambda) + f.linear_part() * lambda) * &prefix
        };
        a += (&id * (1.0 - alpha) + inner * alpha) * w;
        prefix = f.linear_part() * prefix;
    }
    Ok(Averaged {
        map: AffineMap::linear(a)?,
        alpha: spec.alpha(),
    })
}

/// Accelerated mapping `A_T x = t_x T x + (1 - t_x) x` with the line-search
/// step `t_x = <x, x - Tx> / |x - Tx|²` (and `t_x = 1` when `Tx = x`).
///
/// `Fix T = Fix T*` for linear nonexpansive `T`, so `<P_{Fix T} x, x - Tx>`
/// vanishes and the numerator is evaluated as `<x - P_{Fix T} x, x - Tx>`.
/// The two agree exactly, but the second avoids cancelling the fixed
/// component of `x` against `x - Tx`, which otherwise ruins `t_x` once
/// `|x - P_{Fix T} x|` falls to about the square root of machine epsilon.
#[derive(Debug, Clone)]
pub struct Accelerated {
    map: AffineMap,
    fixed: AffineSubspace,
}

impl Accelerated {
    /// Validates once that `t` is linear and nonexpansive.
    pub fn new(t: AffineMap, tol: &Tolerance) -> Result<Self> {
        t.require_linear(tol)?;
        t.require_nonexpansive(tol)?;
        let fixed = fixed_points_or_residual(t.linear_part(), t.offset(), tol)
            .map_err(|residual| Error::NoCommonFixedPoint { residual })?;
        Ok(Self { map: t, fixed })
    }

    pub fn operator(&self) -> &AffineMap {
        &self.map
    }

    pub fn step_size(&self, x: &Vector) -> Result<f64> {
        let tx = self.map.apply(x)?;
        self.step(x, &tx)
    }

    pub fn apply(&self, x: &Vector) -> Result<Vector> {
        let tx = self.map.apply(x)?;
        let t = self.step(x, &tx)?;
        Ok(tx * t + x * (1.0 - t))
    }

    fn step(&self, x: &Vector, tx: &Vector) -> Result<f64> {
        let d = x - tx;
        let dn = d.norm();
        // Only a difference at round-off level counts as `Tx = x`; a looser
        // cutoff would silently degrade the iteration to plain `T` steps.
        if dn <= f64::EPSILON * x.norm() {
            return Ok(1.0);
        }
        let moving = x - self.fixed.project(x)?;
        Ok(moving.dot(&d) / (dn * dn))
    }
}

/// One application of the accelerated mapping, validating `t` each call.
pub fn accelerated_apply(t: &AffineMap, x: &Vector, tol: &Tolerance) -> Result<Vector> {
    Accelerated::new(t.clone(), tol)?.apply(x)
}

/// Config literal for isometries.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum OperatorLiteral {
    Reflector {
        subspace: crate::subspace::SubspaceLiteral,
    },
    Translation {
        offset: Vec<f64>,
    },
    Orthogonal {
        matrix: Vec<Vec<f64>>,
        #[serde(default)]
        offset: Option<Vec<f64>>,
    },
    /// `ops[0]` is applied first.
    Compose {
        ops: Vec<OperatorLiteral>,
    },
    Identity {
        dim: usize,
    },
}

impl OperatorLiteral {
    pub fn build(&self, tol: &Tolerance) -> Result<AffineIsometry> {
        match self {
            OperatorLiteral::Reflector { subspace } => {
                Ok(AffineIsometry::reflector(&subspace.build(tol)?))
            }
            OperatorLiteral::Translation { offset } => {
                Ok(AffineIsometry::translation(Vector::from_vec(offset.clone())))
            }
            OperatorLiteral::Orthogonal { matrix, offset } => {
                let q = matrix_from_rows(matrix)?;
                let b = match offset {
                    Some(o) => Vector::from_vec(o.clone()),
                    None => Vector::zeros(q.nrows()),
                };
                AffineIsometry::new(q, b, tol)
            }
            OperatorLiteral::Compose { ops } => {
                let built: Vec<AffineIsometry> =
                    ops.iter().map(|o| o.build(tol)).collect::<Result<_>>()?;
                let n = built.first().ok_or(Error::EmptyInput("compose"))?.dim();
                compose_all(&built, n)
            }
            OperatorLiteral::Identity { dim } => Ok(AffineIsometry::identity(*dim)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::{dmatrix, dvector};

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    fn line(v: Vector) -> AffineSubspace {
        let n = v.len();
        AffineSubspace::linear(n, &[v], &tol()).unwrap()
    }

    #[test]
    fn reflector_examples() {
        let r = AffineIsometry::reflector(&line(dvector![1.0, 0.0]));
        assert!(max_abs(&(r.linear_part() - dmatrix![1.0, 0.0; 0.0, -1.0])) < 1e-14);
        assert!(r.offset().norm() < 1e-14);

        let s = AffineSubspace::new(dvector![0.0, 1.0], &[dvector![1.0, 0.0]], &tol()).unwrap();
        let r = AffineIsometry::reflector(&s);
        // Recover (Q, b) from probe points: b = R(0), Q e_j = R(e_j) - b.
        let b = r.apply(&dvector![0.0, 0.0]).unwrap();
        let q0 = r.apply(&dvector![1.0, 0.0]).unwrap() - &b;
        let q1 = r.apply(&dvector![0.0, 1.0]).unwrap() - &b;
        assert!((b - dvector![0.0, 2.0]).norm() < 1e-14);
        assert!((q0 - dvector![1.0, 0.0]).norm() < 1e-14);
        assert!((q1 - dvector![0.0, -1.0]).norm() < 1e-14);

        let r = AffineIsometry::reflector(&AffineSubspace::whole_space(3));
        assert!(r.is_identity(&tol()));
    }

    #[test]
    fn translation_examples() {
        assert!(AffineIsometry::translation(dvector![0.0, 0.0]).is_identity(&tol()));
        let t = AffineIsometry::translation(dvector![1.0, 0.0]);
        assert!(t.fixed_point_set(&tol()).is_none());
        assert!((t.apply(&dvector![2.0, 2.0]).unwrap() - dvector![3.0, 2.0]).norm() < 1e-15);
    }

    #[test]
    fn compose_examples() {
        let t = AffineIsometry::reflector(&line(dvector![1.0, 2.0]));
        let c = compose(&AffineIsometry::identity(2), &t).unwrap();
        assert!(c.approx_eq(&t, &tol()));

        let rx = AffineIsometry::reflector(&line(dvector![1.0, 0.0]));
        let ry = AffineIsometry::reflector(&line(dvector![0.0, 1.0]));
        let c = compose(&ry, &rx).unwrap();
        assert!(max_abs(&(c.linear_part() + Matrix::identity(2, 2))) < 1e-14);
        assert!((c.linear_part().determinant() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn compose_dimension_mismatch() {
        let err = compose(&AffineIsometry::identity(2), &AffineIsometry::identity(3));
        assert!(matches!(err, Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn fixed_set_of_three_reflector_product() {
        let r1 = AffineIsometry::reflector(&line(dvector![1.0, 0.0]));
        let r2 = AffineIsometry::reflector(&line(dvector![1.0, 1.0]));
        let r3 = AffineIsometry::reflector(&line(dvector![0.0, 1.0]));
        let t = compose_all(&[r1, r2, r3], 2).unwrap();
        let fix = t.fixed_point_set(&tol()).unwrap();
        assert_eq!(fix.dim(), 1);
        assert!(fix.same_set(&line(dvector![1.0, 1.0]), &tol()));
    }

    #[test]
    fn identity_fixes_everything() {
        let fix = AffineIsometry::identity(4).fixed_point_set(&tol()).unwrap();
        assert_eq!(fix.dim(), 4);
    }

    #[test]
    fn douglas_rachford_fixed_set_for_axes() {
        let t = AffineMap::douglas_rachford(&line(dvector![1.0, 0.0]), &line(dvector![0.0, 1.0]))
            .unwrap();
        let fix = t.fixed_point_set(&tol()).unwrap();
        assert_eq!(fix.dim(), 0);
        assert!(fix.anchor().norm() < 1e-14);
    }

    #[test]
    fn linearize_examples() {
        let t = AffineIsometry::reflector(&line(dvector![1.0, 3.0]));
        let f = t.linearize_about(&dvector![0.0, 0.0], &tol()).unwrap();
        assert!(f.approx_eq(&t, &tol()));

        let s = AffineSubspace::new(dvector![0.0, 1.0], &[dvector![1.0, 0.0]], &tol()).unwrap();
        let t = AffineIsometry::reflector(&s);
        let f = t.linearize_about(&dvector![0.0, 1.0], &tol()).unwrap();
        let rx = AffineIsometry::reflector(&line(dvector![1.0, 0.0]));
        for probe in [dvector![1.0, 0.0], dvector![0.0, 1.0], dvector![2.0, -3.0]] {
            assert!((f.apply(&probe).unwrap() - rx.apply(&probe).unwrap()).norm() < 1e-14);
        }
        let shifted = t
            .fixed_point_set(&tol())
            .unwrap()
            .translate(&dvector![0.0, -1.0])
            .unwrap();
        assert!(f.fixed_point_set(&tol()).unwrap().same_set(&shifted, &tol()));
    }

    #[test]
    fn linearize_requires_fixed_point() {
        let s = AffineSubspace::new(dvector![0.0, 1.0], &[dvector![1.0, 0.0]], &tol()).unwrap();
        let t = AffineIsometry::reflector(&s);
        assert!(matches!(
            t.linearize_about(&dvector![0.0, 0.0], &tol()),
            Err(Error::NotFixedPoint { .. })
        ));
    }

    #[test]
    fn sum_averaged_examples() {
        let a = build_sum_averaged(
            &AveragedSpec {
                weights: vec![1.0],
                alphas: vec![0.5],
                lambdas: vec![],
            },
            &[AffineIsometry::identity(3)],
            &tol(),
        )
        .unwrap();
        assert!(max_abs(&(a.map.linear_part() - Matrix::identity(3, 3))) < 1e-15);

        let rx = AffineIsometry::reflector(&line(dvector![1.0, 0.0]));
        let a = build_sum_averaged(
            &AveragedSpec {
                weights: vec![1.0],
                alphas: vec![0.5],
                lambdas: vec![],
            },
            &[rx],
            &tol(),
        )
        .unwrap();
        assert!(max_abs(&(a.map.linear_part() - dmatrix![1.0, 0.0; 0.0, 0.0])) < 1e-15);
        assert!((a.alpha - 0.5).abs() < 1e-15);
    }

    #[test]
    fn product_averaged_expansion() {
        let u = line(dvector![1.0, 2.0]);
        let ru = AffineIsometry::reflector(&u);
        let spec = AveragedSpec {
            weights: vec![0.0 + 0.25, 0.75],
            alphas: vec![0.3, 0.6],
            lambdas: vec![0.5, 0.4],
        };
        let a = build_product_averaged(&spec, &[AffineIsometry::identity(2), ru.clone()], &tol())
            .unwrap();
        let id = Matrix::identity(2, 2);
        let a1 = &id * 0.7 + &id * 0.3;
        let a2 = &id * 0.4 + (&id * 0.6 + ru.linear_part() * 0.4) * 0.6;
        let expected = a1 * 0.25 + a2 * 0.75;
        assert!(max_abs(&(a.map.linear_part() - expected)) < 1e-14);
    }

    #[test]
    fn product_with_single_operator_matches_sum() {
        let ru = AffineIsometry::reflector(&line(dvector![3.0, 1.0]));
        let spec = AveragedSpec {
            weights: vec![1.0],
            alphas: vec![0.35],
            lambdas: vec![0.5],
        };
        let s = build_sum_averaged(&spec, std::slice::from_ref(&ru), &tol()).unwrap();
        let p = build_product_averaged(&spec, &[ru], &tol()).unwrap();
        assert!(max_abs(&(s.map.linear_part() - p.map.linear_part())) < 1e-15);
    }

    #[test]
    fn averaged_spec_validation() {
        let ops = [AffineIsometry::identity(2), AffineIsometry::identity(2)];
        let bad_sum = AveragedSpec {
            weights: vec![0.5, 0.6],
            alphas: vec![0.5, 0.5],
            lambdas: vec![0.5, 0.5],
        };
        assert!(matches!(
            build_sum_averaged(&bad_sum, &ops, &tol()),
            Err(Error::InvalidAveraging(_))
        ));
        let bad_alpha = AveragedSpec {
            weights: vec![0.5, 0.5],
            alphas: vec![1.0, 0.5],
            lambdas: vec![0.5, 0.5],
        };
        assert!(build_sum_averaged(&bad_alpha, &ops, &tol()).is_err());
        let count = AveragedSpec::uniform(3);
        assert!(build_product_averaged(&count, &ops, &tol()).is_err());
        let affine = AffineIsometry::translation(dvector![1.0, 0.0]);
        assert!(matches!(
            build_sum_averaged(&AveragedSpec::uniform(1), &[affine], &tol()),
            Err(Error::NotLinearMap { .. })
        ));
    }

    #[test]
    fn accelerated_examples() {
        let t = AffineMap::projector(&line(dvector![1.0, 0.0]));
        let x = dvector![2.0, 0.0];
        assert_eq!(accelerated_apply(&t, &x, &tol()).unwrap(), x);

        let zero = AffineMap::linear(Matrix::zeros(2, 2)).unwrap();
        let out = accelerated_apply(&zero, &dvector![1.0, 0.0], &tol()).unwrap();
        assert!(out.norm() < 1e-15);

        let u1 = line(dvector![1.0, 0.0]);
        let u2 = line(dvector![1.0, 1.0]);
        let t = AffineMap::projector_product(&[u1, u2]).unwrap();
        let x = dvector![0.3, -1.7];
        let tx = t.apply(&x).unwrap();
        let out = accelerated_apply(&t, &tx, &tol()).unwrap();
        assert!(out.norm() < 1e-14);
    }

    #[test]
    fn accelerated_rejects_expansive() {
        let t = AffineMap::linear(Matrix::identity(2, 2) * 2.0).unwrap();
        assert!(matches!(
            accelerated_apply(&t, &dvector![1.0, 0.0], &tol()),
            Err(Error::Expansive { .. })
        ));
    }

    #[test]
    fn orthogonality_is_enforced() {
        let err = AffineIsometry::linear(dmatrix![1.0, 0.1; 0.0, 1.0], &tol());
        assert!(matches!(err, Err(Error::NotOrthogonal { .. })));
    }

    #[test]
    fn operator_literals() {
        let lit: OperatorLiteral = serde_json::from_str(
            r#"{"kind": "compose", "ops": [
                {"kind": "reflector", "subspace": {"anchor": [0, 0], "span": [[1, 0]]}},
                {"kind": "orthogonal", "matrix": [[-1, 0], [0, 1]]}
            ]}"#,
        )
        .unwrap();
        let t = lit.build(&tol()).unwrap();
        assert!(max_abs(&(t.linear_part() + Matrix::identity(2, 2))) < 1e-15);
        let lit: OperatorLiteral =
            serde_json::from_str(r#"{"kind": "translation", "offset": [1, 2]}"#).unwrap();
        assert!(lit.build(&tol()).unwrap().fixed_point_set(&tol()).is_none());
    }
}
