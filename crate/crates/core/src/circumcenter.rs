//! Circumcenters of finite point sets and the circumcenter mapping induced
//! by a family of isometries.

use crate::error::{check_dim, Error, Result};
use crate::isometry::{compose_all, fixed_points_or_residual, AffineIsometry};
use crate::numerics::{columns, max_abs, min_norm_solve, Tolerance, Vector};
use crate::subspace::{intersect, AffineSubspace, Intersection};

/// Largest reflector family accepted by [`build_psi`] (2^16 products).
pub const PSI_LIMIT: usize = 16;

/// Points closer than this multiple of `(1 + |p|)` always count as equal.
const DUPLICATE_ROUND_OFF: f64 = 64.0 * f64::EPSILON;

/// A nonempty finite list of points of a common dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct PointSet {
    points: Vec<Vector>,
}

impl PointSet {
    pub fn new(points: Vec<Vector>) -> Result<Self> {
        let first = points.first().ok_or(Error::EmptyInput("point set"))?;
        let n = first.len();
        for p in &points {
            check_dim(n, p.len())?;
            if p.iter().any(|v| !v.is_finite()) {
                return Err(Error::NonFinite("point set"));
            }
        }
        Ok(Self { points })
    }

    pub fn points(&self) -> &[Vector] {
        &self.points
    }

    pub fn dim(&self) -> usize {
        self.points[0].len()
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Largest pairwise distance.
    pub fn diameter(&self) -> f64 {
        let mut d = 0.0f64;
        for (i, p) in self.points.iter().enumerate() {
            for q in &self.points[i + 1..] {
                d = d.max((p - q).norm());
            }
        }
        d
    }

    pub fn scaled(&self, lambda: f64) -> Self {
        Self {
            points: self.points.iter().map(|p| p * lambda).collect(),
        }
    }

    pub fn translated(&self, y: &Vector) -> Result<Self> {
        check_dim(self.dim(), y.len())?;
        Ok(Self {
            points: self.points.iter().map(|p| p + y).collect(),
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CircumcenterResult {
    /// `None` when no point of the affine hull is equidistant to all points.
    pub center: Option<Vector>,
    /// Coordinates `α_i` with `center = p₀ + Σ α_i (p_i - p₀)`, one per point
    /// after the first. Repeated points get coefficient 0.
    pub coefficients: Vec<f64>,
    /// `max_i |c - p_i| - min_i |c - p_i|` at the computed candidate.
    pub equidistance_spread: f64,
    /// Distance of the candidate to the affine hull.
    pub hull_residual: f64,
}

impl CircumcenterResult {
    pub fn exists(&self) -> bool {
        self.center.is_some()
    }
}

/// Circumcenter of `k`: the unique point of `aff k` equidistant to every
/// point, if one exists.
///
/// With `d_i = p_i - p₀` and `D = [d_1 … d_r]`, the candidate `p₀ + y`
/// solves `Dᵀ y = ½ (|d_i|²)_i` in the minimum-norm sense, which places `y`
/// in the range of `D`. This is the same solution as the Gram system
/// `2 DᵀD α = h` without squaring the condition number.
pub fn circumcenter(k: &PointSet, tol: &Tolerance) -> CircumcenterResult {
    let pts = k.points();
    let p0 = &pts[0];
    let n = k.dim();

    // Keep one representative per cluster of coincident points. The
    // threshold is relative to the size of the set, so small but genuine
    // sets (late iterates near a fixed point) are not collapsed; the
    // round-off term merges images that agree up to evaluation error.
    let diameter = k.diameter();
    let mut reps: Vec<usize> = vec![0];
    for (i, p) in pts.iter().enumerate().skip(1) {
        let same = tol.eq_tol * diameter + DUPLICATE_ROUND_OFF * (1.0 + p.norm());
        let dup = reps.iter().any(|&j| (p - &pts[j]).norm() <= same);
        if !dup {
            reps.push(i);
        }
    }
    let diffs: Vec<Vector> = reps[1..].iter().map(|&i| &pts[i] - p0).collect();
    let d = columns(&diffs, n).expect("dimensions checked by PointSet");
    let h = Vector::from_iterator(diffs.len(), diffs.iter().map(|v| 0.5 * v.norm_squared()));
    let (y, _) = min_norm_solve(&d.transpose(), &h, tol).expect("shapes agree");
    let (alpha, _) = min_norm_solve(&d, &y, tol).expect("shapes agree");
    let candidate = p0 + &y;

    let mut coefficients = vec![0.0; pts.len() - 1];
    for (a, &i) in alpha.iter().zip(&reps[1..]) {
        coefficients[i - 1] = *a;
    }

    let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
    for p in pts {
        let r = (&candidate - p).norm();
        lo = lo.min(r);
        hi = hi.max(r);
    }
    let spread = hi - lo;
    let hull_residual = (&d * &alpha - &y).norm();
    let scale = 1.0 + diameter;
    let ok = spread <= tol.consistency_tol * scale && hull_residual <= tol.consistency_tol * scale;
    CircumcenterResult {
        center: ok.then_some(candidate),
        coefficients,
        equidistance_spread: spread,
        hull_residual,
    }
}

/// An ordered family of isometries with a nonempty common fixed-point set.
#[derive(Debug, Clone)]
pub struct OperatorSet {
    ops: Vec<AffineIsometry>,
    distinct: Vec<usize>,
    contains_identity: bool,
    fixed: AffineSubspace,
    tol: Tolerance,
}

impl OperatorSet {
    pub fn new(ops: Vec<AffineIsometry>, tol: &Tolerance) -> Result<Self> {
        let n = ops.first().ok_or(Error::EmptyInput("operator set"))?.dim();
        let mut fixed_sets = Vec::with_capacity(ops.len());
        for t in &ops {
            check_dim(n, t.dim())?;
            let fix = fixed_points_or_residual(t.linear_part(), t.offset(), tol)
                .map_err(|residual| Error::NoCommonFixedPoint { residual })?;
            fixed_sets.push(fix);
        }
        let fixed = match intersect(&fixed_sets, tol)? {
            Intersection::Subspace(s) => s,
            Intersection::Empty { residual } => {
                return Err(Error::NoCommonFixedPoint { residual })
            }
        };
        let mut distinct: Vec<usize> = Vec::new();
        for (i, t) in ops.iter().enumerate() {
            if !distinct.iter().any(|&j| ops[j].approx_eq(t, tol)) {
                distinct.push(i);
            }
        }
        let contains_identity = ops.iter().any(|t| t.is_identity(tol));
        Ok(Self {
            ops,
            distinct,
            contains_identity,
            fixed,
            tol: *tol,
        })
    }

    pub fn ops(&self) -> &[AffineIsometry] {
        &self.ops
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn dim(&self) -> usize {
        self.ops[0].dim()
    }

    /// Number of operators after removing duplicates.
    pub fn distinct_len(&self) -> usize {
        self.distinct.len()
    }

    pub fn contains_identity(&self) -> bool {
        self.contains_identity
    }

    /// `∩ Fix T_i`, computed once at construction.
    pub fn common_fixed_set(&self) -> &AffineSubspace {
        &self.fixed
    }

    pub fn tolerance(&self) -> &Tolerance {
        &self.tol
    }

    /// `S(x) = {T x : T ∈ S}` over distinct operators.
    pub fn images(&self, x: &Vector) -> Result<PointSet> {
        check_dim(self.dim(), x.len())?;
        let pts = self
            .distinct
            .iter()
            .map(|&i| self.ops[i].apply(x))
            .collect::<Result<Vec<_>>>()?;
        PointSet::new(pts)
    }

    pub fn is_linear(&self) -> bool {
        self.ops.iter().all(|t| t.is_linear(&self.tol))
    }
}

/// `C_S x = CC(S(x))`. For isometries with a common fixed point the center
/// always exists, so a missing center is reported as a numerical failure.
///
/// With `z` the projection of `x` onto the common fixed set and `L_i` the
/// linear parts, `T_i x = z + L_i (x - z)`, and the center is translation
/// equivariant, so the map is evaluated as `z + CC({L_i (x - z)})`. The
/// images then carry rounding error proportional to `|x - z|` rather than
/// `|x|`, which keeps late iterates accurate when the image set is nearly
/// degenerate.
pub fn circumcenter_map(s: &OperatorSet, x: &Vector) -> Result<Vector> {
    check_dim(s.dim(), x.len())?;
    let z = s.fixed.project(x)?;
    let y = x - &z;
    let pts: Vec<Vector> = s.distinct.iter().map(|&i| s.ops[i].linear_part() * &y).collect();
    let res = circumcenter(&PointSet::new(pts)?, &s.tol);
    match res.center {
        Some(c) => Ok(c + z),
        None => Err(Error::NumericalProperness {
            spread: res.equidistance_spread,
            residual: res.hull_residual,
        }),
    }
}

/// The operator set `{F_i}` with `F_i x = T_i(x + z) - z`, for `z` a common
/// fixed point. Satisfies `C_S x = z + C_{S_F}(x - z)`.
pub fn shift_operator_set(s: &OperatorSet, z: &Vector) -> Result<OperatorSet> {
    check_dim(s.dim(), z.len())?;
    let ops = s
        .ops
        .iter()
        .map(|t| t.linearize_about(z, &s.tol))
        .collect::<Result<Vec<_>>>()?;
    OperatorSet::new(ops, &s.tol)
}

/// Increasing index tuples of `0..m`, shortest first and lexicographic
/// within a length; the empty tuple comes first.
pub fn psi_index_sets(m: usize) -> Vec<Vec<usize>> {
    let mut out: Vec<Vec<usize>> = vec![Vec::new()];
    for r in 1..=m {
        let mut idx: Vec<usize> = (0..r).collect();
        loop {
            out.push(idx.clone());
            // Advance to the next r-combination in lexicographic order.
            let mut i = r;
            while i > 0 && idx[i - 1] == m - r + i - 1 {
                i -= 1;
            }
            if i == 0 {
                break;
            }
            idx[i - 1] += 1;
            for j in i..r {
                idx[j] = idx[j - 1] + 1;
            }
        }
    }
    out
}

/// `Ψ`: all `2^m` products `R_{i_r} ⋯ R_{i_1}` over increasing index tuples
/// `i_1 < … < i_r` (the empty product is `Id`), ordered as
/// [`psi_index_sets`].
pub fn build_psi(reflectors: &[AffineIsometry], tol: &Tolerance) -> Result<OperatorSet> {
    let first = reflectors.first().ok_or(Error::EmptyInput("reflector family"))?;
    let m = reflectors.len();
    if m > PSI_LIMIT {
        return Err(Error::TooManyReflectors {
            count: m,
            limit: PSI_LIMIT,
        });
    }
    let n = first.dim();
    for r in reflectors {
        check_dim(n, r.dim())?;
        if !r.is_linear_reflector(tol) {
            let q = r.linear_part();
            let deviation = max_abs(&(q - q.transpose())).max(r.offset().norm());
            return Err(Error::NotReflector { deviation });
        }
    }
    let ops = psi_index_sets(m)
        .iter()
        .map(|idx| {
            let chain: Vec<AffineIsometry> = idx.iter().map(|&i| reflectors[i].clone()).collect();
            compose_all(&chain, n)
        })
        .collect::<Result<Vec<_>>>()?;
    OperatorSet::new(ops, tol)
}
