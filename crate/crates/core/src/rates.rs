//! Linear-rate constants (Friedrichs angles, tuple angles, operator rates,
//! accelerated-map constants) and audits of traces against the bounds they
//! imply.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::isometry::{AffineMap, Averaged};
use crate::methods::{fmt_float, IterationTrace};
use crate::numerics::{complement_basis, spectral_norm, sym_eigen_extremes, Matrix, Tolerance};
use crate::subspace::{intersect, AffineSubspace};

/// Relative slack allowed between an observed error and its bound.
pub const AUDIT_TOL: f64 = 1e-8;

/// Absolute allowance, relative to the size of the starting point, for
/// errors that have reached round-off level while the bound keeps
/// shrinking geometrically.
pub const ROUND_OFF_FLOOR: f64 = 1e-12;

fn require_linear_subspace(s: &AffineSubspace, tol: &Tolerance) -> Result<()> {
    if s.is_linear(tol) {
        Ok(())
    } else {
        Err(Error::NotLinear {
            residual: s.anchor().norm(),
        })
    }
}

/// `P_{W⊥}` as a matrix, for a linear `W`.
fn perp_projector(w: &AffineSubspace) -> Matrix {
    let n = w.ambient_dim();
    Matrix::identity(n, n) - w.projector_matrix()
}

/// Cosine of the Friedrichs angle, `|P_V P_U P_{(U∩V)⊥}|`.
pub fn friedrichs_cos(u: &AffineSubspace, v: &AffineSubspace, tol: &Tolerance) -> Result<f64> {
    tuple_angle_cos(&[u.clone(), v.clone()], tol)
}

/// `γ = |P_{L_m} ⋯ P_{L_1} P_{(∩ L_i)⊥}|`, the rate of cyclic projections.
pub fn tuple_angle_cos(subspaces: &[AffineSubspace], tol: &Tolerance) -> Result<f64> {
    let first = subspaces.first().ok_or(Error::EmptyInput("subspace list"))?;
    for s in subspaces {
        check_dim(first.ambient_dim(), s.ambient_dim())?;
        require_linear_subspace(s, tol)?;
    }
    let w = intersect(subspaces, tol)?.into_result()?;
    let t = AffineMap::projector_product(subspaces)?;
    Ok(spectral_norm(&(t.linear_part() * perp_projector(&w))))
}

/// `|A P_{W⊥}|` for a linear `A` fixing the linear subspace `W` pointwise.
pub fn operator_rate(a: &AffineMap, w: &AffineSubspace, tol: &Tolerance) -> Result<f64> {
    check_dim(a.dim(), w.ambient_dim())?;
    a.require_linear(tol)?;
    require_linear_subspace(w, tol)?;
    let basis = w.basis();
    if basis.ncols() > 0 {
        let moved = a.linear_part() * basis - basis;
        let residual = moved
            .column_iter()
            .map(|c| c.norm())
            .fold(0.0, f64::max);
        if residual > tol.consistency_tol {
            return Err(Error::NotFixedSubspace { residual });
        }
    }
    Ok(spectral_norm(&(a.linear_part() * perp_projector(w))))
}

/// `|A P_{(Fix A)⊥}|`.
pub fn fixed_set_rate(a: &AffineMap, tol: &Tolerance) -> Result<f64> {
    let fix = a.fixed_point_set(tol).ok_or(Error::NoCommonFixedPoint {
        residual: f64::NAN,
    })?;
    operator_rate(a, &fix, tol)
}

/// Rate of an averaged operator on the complement of its fixed set; this is
/// strictly below 1 for every averaged linear operator on ℝⁿ.
pub fn averaged_rate(a: &Averaged, tol: &Tolerance) -> Result<f64> {
    let r = fixed_set_rate(&a.map, tol)?;
    if r < 1.0 {
        Ok(r)
    } else {
        Err(Error::ChainViolation(format!(
            "averaged operator has rate {r} on the complement of its fixed set"
        )))
    }
}

/// Constants of the accelerated mapping of a monotone self-adjoint
/// nonexpansive `T`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AccelConstants {
    /// Smallest Rayleigh quotient of `T` on `(Fix T)⊥`.
    pub c1: f64,
    /// Largest Rayleigh quotient of `T` on `(Fix T)⊥`.
    pub c2: f64,
    /// `(c₂ - c₁) / (2 - c₁ - c₂)`.
    pub eta: f64,
    /// `c(T) = |T P_{(Fix T)⊥}|`.
    pub c_t: f64,
}

impl AccelConstants {
    /// `c(T) / (2 - c(T))`.
    pub fn eta_ceiling(&self) -> f64 {
        self.c_t / (2.0 - self.c_t)
    }

    /// Checks `0 <= η <= c(T)/(2 - c(T)) <= c(T) < 1` to [`AUDIT_TOL`].
    pub fn check_chain(&self) -> Result<()> {
        let ceiling = self.eta_ceiling();
        let fail = |what: &str| {
            Err(Error::ChainViolation(format!(
                "{what}: eta={}, c(T)/(2-c(T))={ceiling}, c(T)={}",
                self.eta, self.c_t
            )))
        };
        if self.eta < -AUDIT_TOL {
            return fail("eta < 0");
        }
        if self.eta > ceiling + AUDIT_TOL {
            return fail("eta > c(T)/(2-c(T))");
        }
        if ceiling > self.c_t + AUDIT_TOL {
            return fail("c(T)/(2-c(T)) > c(T)");
        }
        if self.c_t >= 1.0 {
            return fail("c(T) >= 1");
        }
        Ok(())
    }

    /// Checks `c(T) = γ²` for the half-product angle `γ`.
    pub fn check_gamma(&self, gamma: f64) -> Result<()> {
        if (self.c_t - gamma * gamma).abs() <= AUDIT_TOL {
            Ok(())
        } else {
            Err(Error::ChainViolation(format!(
                "c(T)={} differs from gamma^2={}",
                self.c_t,
                gamma * gamma
            )))
        }
    }
}

/// Computes `c₁, c₂, η, c(T)` and verifies the chain of inequalities
/// between them.
pub fn accel_constants(t: &AffineMap, tol: &Tolerance) -> Result<AccelConstants> {
    t.require_linear(tol)?;
    if !t.is_self_adjoint(tol) {
        return Err(Error::NotSelfAdjoint {
            asymmetry: t.asymmetry(),
        });
    }
    t.require_nonexpansive(tol)?;
    // T is symmetric, so the eigenvalues of its symmetric part are the
    // exact extremes of <Tx, x> on the unit sphere.
    let (lo, _) = sym_eigen_extremes(t.linear_part())?;
    if lo < -tol.eq_tol {
        return Err(Error::NotMonotone { min_eigenvalue: lo });
    }
    let fix = t.fixed_point_set(tol).ok_or(Error::NoCommonFixedPoint {
        residual: f64::NAN,
    })?;
    let b = complement_basis(fix.basis(), t.dim());
    let consts = if b.ncols() == 0 {
        AccelConstants {
            c1: 0.0,
            c2: 0.0,
            eta: 0.0,
            c_t: 0.0,
        }
    } else {
        let restricted = b.transpose() * t.linear_part() * &b;
        let (c1, c2) = sym_eigen_extremes(&restricted)?;
        AccelConstants {
            c1,
            c2,
            eta: (c2 - c1) / (2.0 - c1 - c2),
            c_t: spectral_norm(&(t.linear_part() * &b * b.transpose())),
        }
    };
    consts.check_chain()?;
    Ok(consts)
}

/// How the geometric bound of an audit is scaled.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum ScaleMode {
    /// `rate^k · e₀`.
    Plain,
    /// `prefactor · rate^k · e₀`.
    Scaled { prefactor: f64 },
    /// `prefactor · rate^k · |x - x*|` with `x` the start before the prefix
    /// operator was applied.
    Prefixed { prefactor: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditRow {
    pub k: usize,
    pub observed: f64,
    pub bound: f64,
    pub satisfied: bool,
    pub slack: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateReport {
    pub constant_name: String,
    pub value: f64,
    pub scale_mode: ScaleMode,
    pub ingredients: BTreeMap<String, f64>,
    pub per_iteration: Vec<AuditRow>,
    pub slack_min: f64,
    /// Absolute allowance used for round-off level errors.
    pub floor: f64,
}

impl RateReport {
    pub fn all_satisfied(&self) -> bool {
        self.per_iteration.iter().all(|r| r.satisfied)
    }

    pub fn named(mut self, name: impl Into<String>) -> Self {
        self.constant_name = name.into();
        self
    }

    pub fn with_ingredient(mut self, name: impl Into<String>, value: f64) -> Self {
        self.ingredients.insert(name.into(), value);
        self
    }

    /// CSV with header `k,error,bound,slack`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("k,error,bound,slack\n");
        for r in &self.per_iteration {
            let _ = writeln!(
                out,
                "{},{},{},{}",
                r.k,
                fmt_float(r.observed),
                fmt_float(r.bound),
                fmt_float(r.slack)
            );
        }
        out
    }
}

/// Checks `errors[k] <= bound_k · (1 + AUDIT_TOL) + floor` for every `k`.
pub fn audit_bound(trace: &IterationTrace, rate: f64, mode: ScaleMode) -> RateReport {
    let scale = match mode {
        ScaleMode::Plain => trace.errors[0],
        ScaleMode::Scaled { prefactor } => prefactor * trace.errors[0],
        ScaleMode::Prefixed { prefactor } => prefactor * trace.start_error,
    };
    let size = trace.start.norm().max(trace.iterates[0].norm());
    let floor = ROUND_OFF_FLOOR * (1.0 + size);
    let mut per_iteration = Vec::with_capacity(trace.errors.len());
    let mut power = 1.0f64;
    for (k, &observed) in trace.errors.iter().enumerate() {
        let bound = power * scale;
        let satisfied = observed <= bound * (1.0 + AUDIT_TOL) + floor;
        let slack = if bound > 0.0 {
            (bound - observed) / bound
        } else if observed == 0.0 {
            1.0
        } else {
            -observed / floor
        };
        per_iteration.push(AuditRow {
            k,
            observed,
            bound,
            satisfied,
            slack,
        });
        power *= rate;
    }
    let slack_min = per_iteration
        .iter()
        .map(|r| r.slack)
        .fold(f64::INFINITY, f64::min);
    RateReport {
        constant_name: "rate".to_string(),
        value: rate,
        scale_mode: mode,
        ingredients: BTreeMap::new(),
        per_iteration,
        slack_min,
        floor,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::isometry::{AffineIsometry, build_product_averaged, build_sum_averaged, AveragedSpec};
    use crate::methods::{run_map, MethodConfig};
    use crate::numerics::Vector;
    use nalgebra::{dmatrix, dvector};

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    fn span(n: usize, vs: &[Vector]) -> AffineSubspace {
        AffineSubspace::linear(n, vs, &tol()).unwrap()
    }

    #[test]
    fn friedrichs_examples() {
        let u = span(3, &[dvector![1.0, 0.0, 0.0], dvector![0.0, 1.0, 1.0]]);
        assert!(friedrichs_cos(&u, &u, &tol()).unwrap() < 1e-12);

        let x = span(3, &[dvector![1.0, 0.0, 0.0]]);
        let y = span(3, &[dvector![0.0, 1.0, 0.0]]);
        assert!(friedrichs_cos(&x, &y, &tol()).unwrap() < 1e-15);

        let a = span(2, &[dvector![1.0, 0.0]]);
        let b = span(2, &[dvector![1.0, 1.0]]);
        let c = friedrichs_cos(&a, &b, &tol()).unwrap();
        assert!((c - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
        assert!((friedrichs_cos(&b, &a, &tol()).unwrap() - c).abs() < 1e-12);
    }

    #[test]
    fn friedrichs_rejects_affine_input() {
        let a = AffineSubspace::new(dvector![0.0, 1.0], &[dvector![1.0, 0.0]], &tol()).unwrap();
        let b = span(2, &[dvector![1.0, 1.0]]);
        assert!(matches!(
            friedrichs_cos(&a, &b, &tol()),
            Err(Error::NotLinear { .. })
        ));
    }

    #[test]
    fn tuple_angle_examples() {
        let u = span(3, &[dvector![1.0, 2.0, 0.0]]);
        assert!(tuple_angle_cos(std::slice::from_ref(&u), &tol()).unwrap() < 1e-12);

        let v = span(3, &[dvector![1.0, 0.0, 1.0], dvector![0.0, 1.0, 0.0]]);
        let pair = tuple_angle_cos(&[u.clone(), v.clone()], &tol()).unwrap();
        assert!((pair - friedrichs_cos(&u, &v, &tol()).unwrap()).abs() < 1e-14);
    }

    #[test]
    fn operator_rate_examples() {
        let w = span(2, &[dvector![1.0, 1.0]]);
        let p = AffineMap::projector(&w);
        assert!(operator_rate(&p, &w, &tol()).unwrap() < 1e-15);

        let rot = AffineIsometry::linear(dmatrix![-1.0, 0.0; 0.0, -1.0], &tol()).unwrap();
        let a = build_sum_averaged(&AveragedSpec::uniform(1), &[rot], &tol()).unwrap();
        let zero = AffineSubspace::zero(2);
        assert!(operator_rate(&a.map, &zero, &tol()).unwrap() < 1e-15);

        let other = span(2, &[dvector![1.0, 0.0]]);
        assert!(matches!(
            operator_rate(&p, &other, &tol()),
            Err(Error::NotFixedSubspace { .. })
        ));
    }

    #[test]
    fn dr_rate_two_ways() {
        let u1 = span(2, &[dvector![1.0, 0.0]]);
        let u2 = span(2, &[dvector![1.0, 1.0]]);
        let t = AffineMap::douglas_rachford(&u1, &u2).unwrap();
        assert!(t.is_normal(&tol()));
        let rate = fixed_set_rate(&t, &tol()).unwrap();
        // Normal T: |T P| is the largest modulus of its eigenvalues on
        // (Fix T)⊥, i.e. sqrt of the largest eigenvalue of TᵀT there.
        let m = t.linear_part().transpose() * t.linear_part();
        let (_, top) = sym_eigen_extremes(&m).unwrap();
        assert!((rate - top.sqrt()).abs() < 1e-12);
        assert!((rate - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
    }

    #[test]
    fn accel_examples() {
        let id = AffineMap::identity(3);
        let c = accel_constants(&id, &tol()).unwrap();
        assert_eq!(c, AccelConstants { c1: 0.0, c2: 0.0, eta: 0.0, c_t: 0.0 });

        let u1 = span(2, &[dvector![1.0, 0.0]]);
        let u2 = span(2, &[dvector![1.0, 1.0]]);
        let t = AffineMap::projector_product(&[u1.clone(), u2, u1]).unwrap();
        let c = accel_constants(&t, &tol()).unwrap();
        assert!((c.c_t - 0.5).abs() < 1e-12);
        assert!(c.eta <= 1.0 / 3.0 + 1e-12);
        assert!((c.c2 - c.c_t).abs() < 1e-12);
    }

    #[test]
    fn accel_rejects_bad_operators() {
        let u1 = span(2, &[dvector![1.0, 0.0]]);
        let u2 = span(2, &[dvector![1.0, 1.0]]);
        let t = AffineMap::projector_product(&[u1.clone(), u2]).unwrap();
        assert!(matches!(
            accel_constants(&t, &tol()),
            Err(Error::NotSelfAdjoint { .. })
        ));
        let neg = AffineMap::linear(dmatrix![-0.5, 0.0; 0.0, 1.0]).unwrap();
        assert!(matches!(
            accel_constants(&neg, &tol()),
            Err(Error::NotMonotone { .. })
        ));
    }

    #[test]
    fn averaged_rates_below_one() {
        let r1 = AffineIsometry::reflector(&span(3, &[dvector![1.0, 0.0, 0.0]]));
        let r2 = AffineIsometry::reflector(&span(3, &[dvector![1.0, 1.0, 0.0], dvector![0.0, 0.0, 1.0]]));
        let ops = [AffineIsometry::identity(3), r1.clone(), r2.clone()];
        let s = build_sum_averaged(&AveragedSpec::uniform(3), &ops, &tol()).unwrap();
        let p = build_product_averaged(&AveragedSpec::uniform(3), &ops, &tol()).unwrap();
        assert!(averaged_rate(&s, &tol()).unwrap() < 1.0);
        assert!(averaged_rate(&p, &tol()).unwrap() < 1.0);
    }

    #[test]
    fn audit_zero_trace() {
        let u = span(2, &[dvector![1.0, 0.0]]);
        let tr = run_map(std::slice::from_ref(&u), &dvector![1.0, 0.0], &MethodConfig::new(4), &tol())
            .unwrap();
        let rep = audit_bound(&tr, 0.5, ScaleMode::Plain);
        assert!(rep.all_satisfied());
        assert_eq!(rep.slack_min, 1.0);
    }

    #[test]
    fn audit_map_on_45_degree_lines() {
        let subs = [span(2, &[dvector![1.0, 0.0]]), span(2, &[dvector![1.0, 1.0]])];
        let g = tuple_angle_cos(&subs, &tol()).unwrap();
        let tr = run_map(&subs, &dvector![0.3, 1.0], &MethodConfig::new(30), &tol()).unwrap();
        let rep = audit_bound(&tr, g * g, ScaleMode::Scaled { prefactor: 1.0 / g });
        assert!(rep.all_satisfied());
        let csv = rep.to_csv();
        assert!(csv.starts_with("k,error,bound,slack\n"));
        assert_eq!(csv.lines().count(), 32);
    }

    #[test]
    fn audit_flags_violations() {
        let subs = [span(2, &[dvector![1.0, 0.0]]), span(2, &[dvector![1.0, 1.0]])];
        let tr = run_map(&subs, &dvector![0.3, 1.0], &MethodConfig::new(5), &tol()).unwrap();
        let rep = audit_bound(&tr, 0.1, ScaleMode::Plain);
        assert!(!rep.all_satisfied());
        assert!(rep.slack_min < 0.0);
    }
}
