//! Iteration drivers. Every driver records the full trace of iterates and
//! the distance of each iterate to the best approximation of the starting
//! point, computed analytically rather than read off the limit.

use std::fmt::Write as _;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::circumcenter::{circumcenter_map, OperatorSet};
use crate::error::{check_dim, Error, Result};
use crate::isometry::{Accelerated, AffineMap, Averaged};
use crate::numerics::{Tolerance, Vector};
use crate::subspace::{intersect, AffineSubspace};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MethodTag {
    Cim,
    Map,
    SymMap,
    AccelMap,
    Dr,
    AveragedIter,
    BlockwiseCim,
}

impl MethodTag {
    pub fn as_str(&self) -> &'static str {
        match self {
            MethodTag::Cim => "cim",
            MethodTag::Map => "map",
            MethodTag::SymMap => "sym_map",
            MethodTag::AccelMap => "accel_map",
            MethodTag::Dr => "dr",
            MethodTag::AveragedIter => "averaged_iter",
            MethodTag::BlockwiseCim => "blockwise_cim",
        }
    }
}

impl std::fmt::Display for MethodTag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone)]
pub struct MethodConfig {
    pub max_iters: usize,
    /// Stop once `|x_{k+1} - x_k| <= stop_tol`; 0 runs exactly `max_iters`.
    pub stop_tol: f64,
    /// Applied once to the starting point before iterating.
    pub prefix: Option<AffineMap>,
}

impl MethodConfig {
    pub fn new(max_iters: usize) -> Self {
        Self {
            max_iters,
            stop_tol: 0.0,
            prefix: None,
        }
    }

    pub fn with_stop_tol(mut self, stop_tol: f64) -> Self {
        self.stop_tol = stop_tol;
        self
    }

    pub fn with_prefix(mut self, prefix: AffineMap) -> Self {
        self.prefix = Some(prefix);
        self
    }

    fn validate(&self, n: usize) -> Result<()> {
        if !(self.stop_tol.is_finite() && self.stop_tol >= 0.0) {
            return Err(Error::InvalidInput(format!(
                "stop_tol must be finite and nonnegative, got {}",
                self.stop_tol
            )));
        }
        if let Some(p) = &self.prefix {
            check_dim(n, p.dim())?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct IterationTrace {
    pub method: MethodTag,
    /// `x₀` (after the prefix, if any), then `x₁, x₂, …`.
    pub iterates: Vec<Vector>,
    /// `|x_k - x*|` with `x*` the best approximation of the original start.
    pub errors: Vec<f64>,
    pub target: Vector,
    /// The start before the prefix was applied.
    pub start: Vector,
    /// `|start - x*|`.
    pub start_error: f64,
    pub prefixed: bool,
    pub stopped_at: usize,
    pub wall_time: Duration,
}

impl IterationTrace {
    pub fn final_error(&self) -> f64 {
        *self.errors.last().expect("trace holds x₀")
    }

    /// First `k` with `errors[k] <= tol`.
    pub fn iterations_to(&self, tol: f64) -> Option<usize> {
        self.errors.iter().position(|&e| e <= tol)
    }

    pub fn step_norms(&self) -> Vec<f64> {
        std::iter::once(0.0)
            .chain(self.iterates.windows(2).map(|w| (&w[1] - &w[0]).norm()))
            .collect()
    }

    /// CSV with header `k,x_norm,error,step_norm`; numbers use the shortest
    /// round-trip form.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("k,x_norm,error,step_norm\n");
        for (k, ((x, e), s)) in self
            .iterates
            .iter()
            .zip(&self.errors)
            .zip(self.step_norms())
            .enumerate()
        {
            let _ = writeln!(out, "{k},{},{},{}", fmt_float(x.norm()), fmt_float(*e), fmt_float(s));
        }
        out
    }

    pub fn envelope(&self) -> TraceEnvelope {
        let steps = self.step_norms();
        TraceEnvelope {
            method: self.method.as_str().to_string(),
            dim: self.target.len(),
            prefixed: self.prefixed,
            stopped_at: self.stopped_at,
            start_error: self.start_error,
            rows: self
                .iterates
                .iter()
                .zip(&self.errors)
                .zip(steps)
                .enumerate()
                .map(|(k, ((x, e), s))| TraceRow {
                    k,
                    x_norm: x.norm(),
                    error: *e,
                    step_norm: s,
                })
                .collect(),
        }
    }
}

/// Shortest scientific representation that parses back to the same `f64`.
pub fn fmt_float(v: f64) -> String {
    format!("{v:e}")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub k: usize,
    pub x_norm: f64,
    pub error: f64,
    pub step_norm: f64,
}

/// JSON form of a trace: metadata plus one row per iterate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceEnvelope {
    pub method: String,
    pub dim: usize,
    pub prefixed: bool,
    pub stopped_at: usize,
    pub start_error: f64,
    pub rows: Vec<TraceRow>,
}

fn drive<F>(
    method: MethodTag,
    x0: &Vector,
    target: Vector,
    cfg: &MethodConfig,
    mut step: F,
) -> Result<IterationTrace>
where
    F: FnMut(&Vector) -> Result<Vector>,
{
    let started = Instant::now();
    cfg.validate(x0.len())?;
    if x0.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("starting point"));
    }
    let first = match &cfg.prefix {
        Some(p) => p.apply(x0)?,
        None => x0.clone(),
    };
    let mut iterates = vec![first];
    let mut stopped_at = 0;
    for k in 0..cfg.max_iters {
        let next = step(&iterates[k])?;
        if next.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("iterate"));
        }
        let moved = (&next - &iterates[k]).norm();
        iterates.push(next);
        stopped_at = k + 1;
        if cfg.stop_tol > 0.0 && moved <= cfg.stop_tol {
            break;
        }
    }
    let errors = iterates.iter().map(|x| (x - &target).norm()).collect();
    Ok(IterationTrace {
        method,
        iterates,
        errors,
        start_error: (x0 - &target).norm(),
        target,
        start: x0.clone(),
        prefixed: cfg.prefix.is_some(),
        stopped_at,
        wall_time: started.elapsed(),
    })
}

/// Circumcentered isometry method `x_{k+1} = C_S x_k`, measured against
/// `P_{∩ Fix T_i} x₀`.
pub fn run_cim(s: &OperatorSet, x0: &Vector, cfg: &MethodConfig) -> Result<IterationTrace> {
    check_dim(s.dim(), x0.len())?;
    let target = s.common_fixed_set().project(x0)?;
    drive(MethodTag::Cim, x0, target, cfg, |x| circumcenter_map(s, x))
}

/// Cyclic projections `P_{U_m} ⋯ P_{U_1}`, one sweep per iteration.
pub fn run_map(
    subspaces: &[AffineSubspace],
    x0: &Vector,
    cfg: &MethodConfig,
    tol: &Tolerance,
) -> Result<IterationTrace> {
    let t = AffineMap::projector_product(subspaces)?;
    check_dim(t.dim(), x0.len())?;
    let w = intersect(subspaces, tol)?.into_result()?;
    let target = w.project(x0)?;
    drive(MethodTag::Map, x0, target, cfg, |x| t.apply(x))
}

fn require_self_adjoint(t: &AffineMap, tol: &Tolerance) -> Result<()> {
    if t.is_self_adjoint(tol) {
        Ok(())
    } else {
        Err(Error::NotSelfAdjoint {
            asymmetry: t.asymmetry(),
        })
    }
}

fn fixed_target(t: &AffineMap, x0: &Vector, tol: &Tolerance) -> Result<Vector> {
    crate::isometry::fixed_points_or_residual(t.linear_part(), t.offset(), tol)
        .map_err(|residual| Error::NoCommonFixedPoint { residual })?
        .project(x0)
}

/// Power iteration of a self-adjoint nonexpansive `T` (typically the
/// symmetric product `P_1 ⋯ P_n ⋯ P_1`).
pub fn run_sym_map(
    t: &AffineMap,
    x0: &Vector,
    cfg: &MethodConfig,
    tol: &Tolerance,
) -> Result<IterationTrace> {
    check_dim(t.dim(), x0.len())?;
    t.require_linear(tol)?;
    require_self_adjoint(t, tol)?;
    t.require_nonexpansive(tol)?;
    let target = fixed_target(t, x0, tol)?;
    drive(MethodTag::SymMap, x0, target, cfg, |x| t.apply(x))
}

/// Iterates the accelerated mapping of `t`. Only linearity and
/// nonexpansiveness are required; the rate theory needs self-adjointness,
/// which is checked where the constants are computed.
pub fn run_accel(
    t: &AffineMap,
    x0: &Vector,
    cfg: &MethodConfig,
    tol: &Tolerance,
) -> Result<IterationTrace> {
    check_dim(t.dim(), x0.len())?;
    let acc = Accelerated::new(t.clone(), tol)?;
    let target = fixed_target(t, x0, tol)?;
    drive(MethodTag::AccelMap, x0, target, cfg, |x| acc.apply(x))
}

/// Douglas–Rachford `½(Id + R_{U₂} R_{U₁})`, measured against the
/// projection onto its fixed-point set.
pub fn run_dr(
    u1: &AffineSubspace,
    u2: &AffineSubspace,
    x0: &Vector,
    cfg: &MethodConfig,
    tol: &Tolerance,
) -> Result<IterationTrace> {
    let t = AffineMap::douglas_rachford(u1, u2)?;
    check_dim(t.dim(), x0.len())?;
    let target = fixed_target(&t, x0, tol)?;
    drive(MethodTag::Dr, x0, target, cfg, |x| t.apply(x))
}

#[derive(Debug, Clone, PartialEq)]
pub enum BlockMode {
    /// `C_{S_p} ⋯ C_{S_1}`.
    Compose,
    /// `Σ ω_j C_{S_j}`.
    Convex(Vec<f64>),
}

/// Iterates a composition or convex combination of block circumcenter
/// maps. Every block must contain the identity.
pub fn run_blockwise_cim(
    blocks: &[OperatorSet],
    mode: &BlockMode,
    x0: &Vector,
    cfg: &MethodConfig,
    tol: &Tolerance,
) -> Result<IterationTrace> {
    let first = blocks.first().ok_or(Error::EmptyInput("block list"))?;
    for (index, b) in blocks.iter().enumerate() {
        check_dim(first.dim(), b.dim())?;
        if !b.contains_identity() {
            return Err(Error::BlockMissingIdentity { index });
        }
    }
    check_dim(first.dim(), x0.len())?;
    if let BlockMode::Convex(w) = mode {
        let total: f64 = w.iter().sum();
        if w.len() != blocks.len() || w.iter().any(|&v| !(v > 0.0)) || (total - 1.0).abs() > 1e-12
        {
            return Err(Error::InvalidAveraging(format!(
                "block weights must be {} positive numbers summing to 1",
                blocks.len()
            )));
        }
    }
    let fixed: Vec<AffineSubspace> = blocks.iter().map(|b| b.common_fixed_set().clone()).collect();
    let w = intersect(&fixed, tol)?
        .into_result()
        .map_err(|e| match e {
            Error::EmptyIntersection { residual } => Error::NoCommonFixedPoint { residual },
            other => other,
        })?;
    let target = w.project(x0)?;
    drive(MethodTag::BlockwiseCim, x0, target, cfg, |x| match mode {
        BlockMode::Compose => blocks
            .iter()
            .try_fold(x.clone(), |y, b| circumcenter_map(b, &y)),
        BlockMode::Convex(weights) => {
            let mut acc = Vector::zeros(x.len());
            for (b, wj) in blocks.iter().zip(weights) {
                acc.axpy(*wj, &circumcenter_map(b, x)?, 1.0);
            }
            Ok(acc)
        }
    })
}

/// Power iteration of an averaged operator built by the averaged builders.
pub fn run_averaged_iter(
    a: &Averaged,
    x0: &Vector,
    cfg: &MethodConfig,
    tol: &Tolerance,
) -> Result<IterationTrace> {
    check_dim(a.map.dim(), x0.len())?;
    let target = fixed_target(&a.map, x0, tol)?;
    drive(MethodTag::AveragedIter, x0, target, cfg, |x| a.map.apply(x))
}
