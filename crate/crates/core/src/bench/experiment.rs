//! Building an instance from a config, running every method, auditing the
//! traces against their theoretical rates and assembling the report.

use std::collections::BTreeMap;

use serde::Serialize;

use super::config::{
    BlockModeKind, ExperimentConfig, InstanceSource, MethodEntry, ProductKind, Recipe,
    StartSource,
};
use super::instance::{draw_start, generate_instance, Instance, RandomSpec};
use super::rng::{rng_from_seed, unit_sphere};
use crate::circumcenter::{build_psi, circumcenter_map, OperatorSet, PSI_LIMIT};
use crate::error::{Error, Result};
use crate::isometry::{
    build_product_averaged, build_sum_averaged, AffineIsometry, AffineMap, Averaged,
    AveragedSpec,
};
use crate::methods::{
    run_accel, run_averaged_iter, run_blockwise_cim, run_cim, run_dr, run_map, run_sym_map,
    BlockMode, IterationTrace, MethodConfig, MethodTag, TraceEnvelope,
};
use crate::numerics::{Tolerance, Vector};
use crate::rates::{
    accel_constants, audit_bound, averaged_rate, fixed_set_rate, operator_rate,
    tuple_angle_cos, RateReport, ScaleMode, AUDIT_TOL, ROUND_OFF_FLOOR,
};
use crate::subspace::{intersect, AffineSubspace};

/// Error level reported as "iterations to tolerance" in the summary.
pub const SUMMARY_TOL: f64 = 1e-10;

/// Number of powers checked in the `η^k c(T) <= γ^{2(k+1)}` comparison.
const ETA_GAMMA_POWERS: i32 = 50;

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    /// Overrides every seed in the config.
    pub seed: Option<u64>,
    pub max_iters: Option<usize>,
    /// Adds the invariant checks and disables early stopping.
    pub verify: bool,
    /// Embeds per-iteration rows in the JSON report.
    pub embed_traces: bool,
}

/// A materialized instance: linear subspaces, their reflectors, the
/// intersection and the starting point.
#[derive(Debug, Clone)]
pub struct Setup {
    pub name: String,
    pub seed: u64,
    pub tol: Tolerance,
    pub source: &'static str,
    pub instance: Instance,
    pub reflectors: Vec<AffineIsometry>,
}

impl Setup {
    pub fn subspaces(&self) -> &[AffineSubspace] {
        &self.instance.subspaces
    }

    pub fn m(&self) -> usize {
        self.instance.subspaces.len()
    }

    pub fn n(&self) -> usize {
        self.instance.x0.len()
    }

    /// `P_1 ⋯ P_m ⋯ P_1`.
    pub fn sym_product(&self) -> Result<AffineMap> {
        AffineMap::projector_product(&palindrome(self.subspaces()))
    }

    /// `P_m ⋯ P_1`.
    pub fn map_product(&self) -> Result<AffineMap> {
        AffineMap::projector_product(self.subspaces())
    }

    fn product(&self, kind: ProductKind) -> Result<AffineMap> {
        match kind {
            ProductKind::SymProduct => self.sym_product(),
            ProductKind::MapProduct => self.map_product(),
        }
    }

    /// `Ψ(R_1, …, R_m)`.
    pub fn psi(&self) -> Result<OperatorSet> {
        build_psi(&self.reflectors, &self.tol)
    }

    /// `Id, R_1, …, R_m`, the family behind both averaged builders.
    fn identity_family(&self) -> Vec<AffineIsometry> {
        let mut f = vec![AffineIsometry::identity(self.n())];
        f.extend(self.reflectors.iter().cloned());
        f
    }

    /// Sum-form averaged operator of `Id, R_1, …, R_m` with uniform weights.
    pub fn s1_operator(&self) -> Result<Averaged> {
        let f = self.identity_family();
        build_sum_averaged(&AveragedSpec::uniform(f.len()), &f, &self.tol)
    }

    /// Product-form averaged operator of `Id, R_1, …, R_m` with uniform weights.
    pub fn s2_operator(&self) -> Result<Averaged> {
        let f = self.identity_family();
        build_product_averaged(&AveragedSpec::uniform(f.len()), &f, &self.tol)
    }
}

/// `v_1, …, v_m, v_{m-1}, …, v_1`.
pub fn palindrome<T: Clone>(items: &[T]) -> Vec<T> {
    let mut out = items.to_vec();
    out.extend(items.iter().rev().skip(1).cloned());
    out
}

/// Builds the instance described by `cfg`.
pub fn prepare(cfg: &ExperimentConfig, seed_override: Option<u64>) -> Result<Setup> {
    let tol = cfg.tolerance;
    let n = cfg.ambient_dim;
    let (source, seed, instance) = match &cfg.instance {
        InstanceSource::Explicit { subspaces } => {
            let seed = seed_override.unwrap_or(cfg.seed);
            let subs = subspaces
                .iter()
                .map(|lit| {
                    let s = lit.build(&tol)?;
                    if s.is_linear(&tol) {
                        Ok(s)
                    } else {
                        Err(Error::NotLinear {
                            residual: s.anchor().norm(),
                        })
                    }
                })
                .collect::<Result<Vec<_>>>()?;
            let intersection = intersect(&subs, &tol)?.into_result()?;
            let x0 = match &cfg.x0 {
                StartSource::Explicit { point } => Vector::from_vec(point.clone()),
                StartSource::RandomSphere => draw_start(&mut rng_from_seed(seed), &intersection)
                    .ok_or_else(|| {
                        Error::Degenerate(
                            "every sampled start lies too close to the intersection".into(),
                        )
                    })?,
            };
            let inst = Instance {
                subspaces: subs,
                x0,
                intersection,
            };
            ("explicit", seed, inst)
        }
        InstanceSource::Random {
            count,
            dim_range,
            common_dim,
            seed: own_seed,
        } => {
            let seed = seed_override.or(*own_seed).unwrap_or(cfg.seed);
            let spec = RandomSpec {
                count: *count,
                dim_range: *dim_range,
                common_dim: *common_dim,
            };
            let mut inst = generate_instance(n, &spec, seed, &tol)?;
            if let StartSource::Explicit { point } = &cfg.x0 {
                inst.x0 = Vector::from_vec(point.clone());
            }
            ("random", seed, inst)
        }
    };
    let reflectors = instance
        .subspaces
        .iter()
        .map(AffineIsometry::reflector)
        .collect();
    Ok(Setup {
        name: cfg.name.clone(),
        seed,
        tol,
        source,
        instance,
        reflectors,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Environment {
    pub package: &'static str,
    pub version: &'static str,
    pub os: &'static str,
    pub arch: &'static str,
}

impl Environment {
    pub fn current() -> Self {
        Self {
            package: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            os: std::env::consts::OS,
            arch: std::env::consts::ARCH,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InstanceSummary {
    pub source: &'static str,
    pub subspace_dims: Vec<usize>,
    pub intersection_dim: usize,
    pub x0: Vec<f64>,
    /// `|x₀ - P_W x₀|` for `W` the intersection.
    pub start_distance: f64,
}

impl InstanceSummary {
    fn of(setup: &Setup) -> Result<Self> {
        let inst = &setup.instance;
        Ok(Self {
            source: setup.source,
            subspace_dims: inst.subspaces.iter().map(|s| s.dim()).collect(),
            intersection_dim: inst.intersection.dim(),
            x0: inst.x0.iter().copied().collect(),
            start_distance: (&inst.x0 - inst.intersection.project(&inst.x0)?).norm(),
        })
    }
}

/// Rate constants of an instance, keyed by name, plus the ones that could
/// not be computed and why.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Constants {
    pub values: BTreeMap<String, f64>,
    pub errors: BTreeMap<String, String>,
}

impl Constants {
    fn record(&mut self, name: &str, value: Result<f64>) {
        match value {
            Ok(v) => {
                self.values.insert(name.to_string(), v);
            }
            Err(e) => {
                self.errors.insert(name.to_string(), e.to_string());
            }
        }
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.values.get(name).copied()
    }
}

/// `gamma`, `friedrichs` and `dr_rate` (two subspaces only), the
/// accelerated-MAP constants of the symmetric product and the rates of the
/// two averaged operators.
pub fn instance_constants(setup: &Setup) -> Constants {
    let tol = &setup.tol;
    let mut c = Constants::default();
    c.record("gamma", tuple_angle_cos(setup.subspaces(), tol));
    if setup.m() == 2 {
        let s = setup.subspaces();
        c.record("friedrichs", tuple_angle_cos(&s[..2], tol));
        c.record(
            "dr_rate",
            AffineMap::douglas_rachford(&s[0], &s[1]).and_then(|t| fixed_set_rate(&t, tol)),
        );
    }
    match setup.sym_product().and_then(|t| accel_constants(&t, tol)) {
        Ok(a) => {
            c.values.insert("c1".into(), a.c1);
            c.values.insert("c2".into(), a.c2);
            c.values.insert("eta".into(), a.eta);
            c.values.insert("c_t".into(), a.c_t);
        }
        Err(e) => {
            c.errors.insert("eta".into(), e.to_string());
        }
    }
    c.record(
        "s1_rate",
        setup.s1_operator().and_then(|a| averaged_rate(&a, tol)),
    );
    c.record(
        "s2_rate",
        setup.s2_operator().and_then(|a| averaged_rate(&a, tol)),
    );
    c
}

#[derive(Debug, Clone, Serialize)]
pub struct MethodOutcome {
    pub name: String,
    pub method: MethodTag,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub recipe: Option<&'static str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub prefix: Option<ProductKind>,
    pub status: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub final_error: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub iterations_to_1e_10: Option<usize>,
    /// The first audited rate, if any.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theoretical_rate: Option<f64>,
    pub audits: Vec<RateReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trace: Option<TraceEnvelope>,
    /// The raw trace, for CSV output and timing.
    #[serde(skip)]
    pub raw: Option<IterationTrace>,
}

impl MethodOutcome {
    pub fn passed(&self) -> bool {
        self.error.is_none() && self.audits.iter().all(RateReport::all_satisfied)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    /// Worst observed value of the checked quantity.
    pub value: f64,
    pub detail: String,
}

impl Check {
    fn new(name: &str, passed: bool, value: f64, detail: impl Into<String>) -> Self {
        Self {
            name: name.to_string(),
            passed,
            value,
            detail: detail.into(),
        }
    }

    fn failed(name: &str, err: &Error) -> Self {
        Self::new(name, false, f64::NAN, err.to_string())
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ExperimentReport {
    pub name: String,
    pub seed: u64,
    pub ambient_dim: usize,
    pub max_iters: usize,
    pub environment: Environment,
    pub instance: InstanceSummary,
    pub constants: Constants,
    pub methods: Vec<MethodOutcome>,
    pub checks: Vec<Check>,
    pub passed: bool,
}

/// Runs every method of `cfg` on its instance and audits each trace.
/// Method failures are recorded in the report, not returned; only a config
/// whose instance cannot be built is an error.
pub fn run_experiment(cfg: &ExperimentConfig, opts: &RunOptions) -> Result<ExperimentReport> {
    let setup = prepare(cfg, opts.seed)?;
    let constants = instance_constants(&setup);
    let max_iters = opts.max_iters.unwrap_or(cfg.max_iters);
    let stop_tol = if opts.verify { 0.0 } else { cfg.stop_tol };
    let methods: Vec<MethodOutcome> = cfg
        .methods
        .iter()
        .map(|entry| {
            let iters = match opts.max_iters {
                Some(k) => k,
                None => entry.max_iters.unwrap_or(max_iters),
            };
            let mcfg = MethodConfig::new(iters).with_stop_tol(stop_tol);
            run_entry(&setup, entry, mcfg, opts.embed_traces)
        })
        .collect();
    let checks = if opts.verify {
        verify_checks(&setup, &constants, max_iters)
    } else {
        Vec::new()
    };
    let passed = methods.iter().all(MethodOutcome::passed) && checks.iter().all(|c| c.passed);
    Ok(ExperimentReport {
        name: cfg.name.clone(),
        seed: setup.seed,
        ambient_dim: setup.n(),
        max_iters,
        environment: Environment::current(),
        instance: InstanceSummary::of(&setup)?,
        constants,
        methods,
        checks,
        passed,
    })
}

/// One audit before the prefix rule is applied.
struct Planned {
    name: &'static str,
    rate: f64,
    prefactor: f64,
    ingredients: Vec<(&'static str, f64)>,
}

impl Planned {
    fn plain(name: &'static str, rate: f64) -> Self {
        Self {
            name,
            rate,
            prefactor: 1.0,
            ingredients: Vec::new(),
        }
    }

    fn with(mut self, name: &'static str, value: f64) -> Self {
        self.ingredients.push((name, value));
        self
    }
}

fn run_entry(setup: &Setup, entry: &MethodEntry, cfg: MethodConfig, embed: bool) -> MethodOutcome {
    let recipe = matches!(entry.method, MethodTag::Cim | MethodTag::AveragedIter)
        .then(|| entry.recipe().as_str());
    let mut out = MethodOutcome {
        name: entry.name.clone(),
        method: entry.method,
        recipe,
        prefix: entry.prefix,
        status: "ok",
        error: None,
        final_error: None,
        iterations_to_1e_10: None,
        theoretical_rate: None,
        audits: Vec::new(),
        trace: None,
        raw: None,
    };
    match execute(setup, entry, cfg) {
        Ok((trace, audits)) => {
            out.final_error = Some(trace.final_error());
            out.iterations_to_1e_10 = trace.iterations_to(SUMMARY_TOL);
            out.theoretical_rate = audits.first().map(|a| a.value);
            out.audits = audits;
            if embed {
                out.trace = Some(trace.envelope());
            }
            out.raw = Some(trace);
        }
        Err(e) => {
            out.status = "error";
            out.error = Some(e.to_string());
        }
    }
    out
}

fn execute(
    setup: &Setup,
    entry: &MethodEntry,
    mut cfg: MethodConfig,
) -> Result<(IterationTrace, Vec<RateReport>)> {
    let tol = &setup.tol;
    let subs = setup.subspaces();
    let x0 = &setup.instance.x0;
    let prefix = entry.prefix.map(|k| setup.product(k)).transpose()?;
    if let Some(p) = &prefix {
        cfg = cfg.with_prefix(p.clone());
    }
    let gamma = || tuple_angle_cos(subs, tol);
    // Each arm yields the trace, the set the error is measured against and
    // the audits that apply to it.
    let (trace, target_set, planned): (IterationTrace, AffineSubspace, Vec<Planned>) =
        match entry.method {
            MethodTag::Map => {
                let g = gamma()?;
                let mut plan = vec![Planned::plain("gamma", g)];
                if subs.len() == 2 && g > 0.0 {
                    // Two subspaces: |(P_2 P_1)^k - P_W| = c^(2k-1).
                    plan.push(Planned {
                        name: "gamma_sq_two_sets",
                        rate: g * g,
                        prefactor: 1.0 / g,
                        ingredients: vec![("gamma", g)],
                    });
                }
                let trace = run_map(subs, x0, &cfg, tol)?;
                (trace, setup.instance.intersection.clone(), plan)
            }
            MethodTag::SymMap => {
                let t = setup.sym_product()?;
                let c = fixed_set_rate(&t, tol)?;
                let trace = run_sym_map(&t, x0, &cfg, tol)?;
                let plan = vec![Planned::plain("c_t", c).with("gamma", gamma()?)];
                (trace, setup.instance.intersection.clone(), plan)
            }
            MethodTag::AccelMap => {
                let kind = entry.operator.unwrap_or(ProductKind::SymProduct);
                let t = setup.product(kind)?;
                let plan = match kind {
                    ProductKind::SymProduct => {
                        let a = accel_constants(&t, tol)?;
                        vec![Planned::plain("eta", a.eta)
                            .with("c1", a.c1)
                            .with("c2", a.c2)
                            .with("c_t", a.c_t)]
                    }
                    // No rate theory for the non-self-adjoint product.
                    ProductKind::MapProduct => Vec::new(),
                };
                let trace = run_accel(&t, x0, &cfg, tol)?;
                (trace, setup.instance.intersection.clone(), plan)
            }
            MethodTag::Dr => {
                if subs.len() != 2 {
                    return Err(Error::InvalidInput(format!(
                        "dr needs exactly two subspaces, the instance has {}",
                        subs.len()
                    )));
                }
                let t = AffineMap::douglas_rachford(&subs[0], &subs[1])?;
                let r = fixed_set_rate(&t, tol)?;
                let fix = t.fixed_point_set(tol).ok_or(Error::NoCommonFixedPoint {
                    residual: f64::NAN,
                })?;
                let trace = run_dr(&subs[0], &subs[1], x0, &cfg, tol)?;
                (trace, fix, vec![Planned::plain("dr_rate", r)])
            }
            MethodTag::Cim => {
                let (s, plan) = cim_plan(setup, entry)?;
                let trace = run_cim(&s, x0, &cfg)?;
                (trace, s.common_fixed_set().clone(), plan)
            }
            MethodTag::AveragedIter => {
                let (a, name) = match entry.recipe() {
                    Recipe::IdentityPlusPrefixProducts => (setup.s2_operator()?, "s2_rate"),
                    _ => (setup.s1_operator()?, "s1_rate"),
                };
                let r = averaged_rate(&a, tol)?;
                let trace = run_averaged_iter(&a, x0, &cfg, tol)?;
                let plan = vec![Planned::plain(name, r).with("alpha", a.alpha)];
                (trace, setup.instance.intersection.clone(), plan)
            }
            MethodTag::BlockwiseCim => {
                let blocks = setup
                    .reflectors
                    .iter()
                    .map(|r| OperatorSet::new(vec![AffineIsometry::identity(setup.n()), r.clone()], tol))
                    .collect::<Result<Vec<_>>>()?;
                let m = blocks.len();
                let (mode, plan) = match entry.mode.unwrap_or(BlockModeKind::Compose) {
                    // C_{{Id, R_i}} = P_i, so the composition is one MAP sweep.
                    BlockModeKind::Compose => {
                        (BlockMode::Compose, Planned::plain("gamma", gamma()?))
                    }
                    BlockModeKind::Convex => {
                        let w = vec![1.0 / m as f64; m];
                        let mut a = nalgebra::DMatrix::zeros(setup.n(), setup.n());
                        for s in subs {
                            a += s.projector_matrix() * w[0];
                        }
                        let r = fixed_set_rate(&AffineMap::linear(a)?, tol)?;
                        (BlockMode::Convex(w), Planned::plain("convex_projector_rate", r))
                    }
                };
                let trace = run_blockwise_cim(&blocks, &mode, x0, &cfg, tol)?;
                (trace, setup.instance.intersection.clone(), vec![plan])
            }
        };
    // A prefix T with P_W T = P_W turns `rate^k e₀` into
    // `rate^k |T P_{W⊥}| |x - P_W x|`.
    let prefix_rate = prefix
        .as_ref()
        .map(|p| operator_rate(p, &target_set, tol))
        .transpose()?;
    let reports = planned
        .into_iter()
        .map(|p| {
            let mode = match prefix_rate {
                Some(c) => ScaleMode::Prefixed {
                    prefactor: p.prefactor * c,
                },
                None if p.prefactor == 1.0 => ScaleMode::Plain,
                None => ScaleMode::Scaled {
                    prefactor: p.prefactor,
                },
            };
            let mut report = audit_bound(&trace, p.rate, mode).named(p.name);
            for (k, v) in p.ingredients {
                report = report.with_ingredient(k, v);
            }
            if let Some(c) = prefix_rate {
                report = report.with_ingredient("prefix_rate", c);
            }
            report
        })
        .collect();
    Ok((trace, reports))
}

/// Operator set and audits of a circumcentered method.
fn cim_plan(setup: &Setup, entry: &MethodEntry) -> Result<(OperatorSet, Vec<Planned>)> {
    let tol = &setup.tol;
    let subs = setup.subspaces();
    let refl = &setup.reflectors;
    Ok(match entry.recipe() {
        Recipe::Psi => {
            let g = tuple_angle_cos(subs, tol)?;
            (setup.psi()?, vec![Planned::plain("gamma", g)])
        }
        Recipe::PsiSymmetric => {
            let g = tuple_angle_cos(subs, tol)?;
            let g_sym = tuple_angle_cos(&palindrome(subs), tol)?;
            let a = accel_constants(&setup.sym_product()?, tol)?;
            let s = build_psi(&palindrome(refl), tol)?;
            let plan = vec![
                Planned::plain("gamma_sq", g_sym).with("gamma", g),
                Planned::plain("eta", a.eta)
                    .with("c1", a.c1)
                    .with("c2", a.c2)
                    .with("c_t", a.c_t),
            ];
            (s, plan)
        }
        Recipe::IdentityPlusReflectors => {
            let a = setup.s1_operator()?;
            let r = averaged_rate(&a, tol)?;
            let ops = setup.identity_family();
            (
                OperatorSet::new(ops, tol)?,
                vec![Planned::plain("s1_rate", r).with("alpha", a.alpha)],
            )
        }
        Recipe::IdentityPlusPrefixProducts => {
            let a = setup.s2_operator()?;
            let r = averaged_rate(&a, tol)?;
            let mut ops = vec![AffineIsometry::identity(setup.n())];
            for r in refl {
                let last = ops.last().expect("identity is present");
                ops.push(r.after(last)?);
            }
            (
                OperatorSet::new(ops, tol)?,
                vec![Planned::plain("s2_rate", r).with("alpha", a.alpha)],
            )
        }
        Recipe::Custom => {
            let ops = entry
                .operators
                .iter()
                .map(|lit| lit.build(tol))
                .collect::<Result<Vec<_>>>()?;
            let s = OperatorSet::new(ops, tol)?;
            let mut plan = Vec::new();
            if s.is_linear() && s.contains_identity() {
                // Sum-form averaged operator over Id and the other members.
                let mut family = vec![AffineIsometry::identity(s.dim())];
                family.extend(s.ops().iter().filter(|t| !t.is_identity(tol)).cloned());
                let a = build_sum_averaged(&AveragedSpec::uniform(family.len()), &family, tol)?;
                plan.push(Planned::plain("sum_averaged_rate", averaged_rate(&a, tol)?));
            }
            (s, plan)
        }
    })
}

/// Invariant checks run by `verify`.
pub fn verify_checks(setup: &Setup, constants: &Constants, iters: usize) -> Vec<Check> {
    let tol = &setup.tol;
    let mut checks = Vec::new();
    let gamma = constants.get("gamma");
    let accel = setup.sym_product().and_then(|t| accel_constants(&t, tol));
    match (&accel, gamma) {
        (Ok(a), Some(g)) => {
            let chain = a.check_chain().and_then(|_| a.check_gamma(g));
            checks.push(Check::new(
                "accel_chain",
                chain.is_ok(),
                a.eta,
                match chain {
                    Ok(()) => format!(
                        "0 <= eta={} <= c/(2-c)={} <= c(T)={} = gamma^2={} < 1",
                        a.eta,
                        a.eta_ceiling(),
                        a.c_t,
                        g * g
                    ),
                    Err(e) => e.to_string(),
                },
            ));
            let worst = (0..=ETA_GAMMA_POWERS)
                .map(|k| a.eta.powi(k) * a.c_t - g.powi(2 * (k + 1)) * (1.0 + AUDIT_TOL))
                .fold(f64::NEG_INFINITY, f64::max);
            checks.push(Check::new(
                "eta_vs_gamma_powers",
                worst <= 1e-15,
                worst,
                format!("max_k<=50 eta^k c(T) - gamma^(2(k+1))"),
            ));
        }
        (Err(e), _) => checks.push(Check::failed("accel_chain", e)),
        (Ok(_), None) => checks.push(Check::new(
            "accel_chain",
            false,
            f64::NAN,
            constants.errors.get("gamma").cloned().unwrap_or_default(),
        )),
    }
    if setup.m() > PSI_LIMIT {
        checks.push(Check::new(
            "psi_checks",
            true,
            0.0,
            format!("skipped: {} reflectors exceed the limit of {PSI_LIMIT}", setup.m()),
        ));
        return checks;
    }
    match psi_checks(setup, iters) {
        Ok(mut c) => checks.append(&mut c),
        Err(e) => checks.push(Check::failed("psi_checks", &e)),
    }
    checks
}

/// Points at which the double-projection identity is checked, besides x₀.
const DOUBLE_PROJECTION_SAMPLES: usize = 20;

/// Along the circumcentered-reflection trajectory over `Ψ`: the projection
/// onto the intersection never changes, each step satisfies the
/// Pythagorean identity, and one MAP sweep equals the average of `Ψ`.
/// The step equals the projection of `P_W x` onto `aff S(x)` is checked at
/// x₀ and at seeded sphere points rather than along the trajectory: late
/// iterates can span hull directions of relative extent near the rank
/// cutoff, where the point-set circumcenter is ill-conditioned.
fn psi_checks(setup: &Setup, iters: usize) -> Result<Vec<Check>> {
    let s = setup.psi()?;
    let w = &setup.instance.intersection;
    let x0 = &setup.instance.x0;
    let scale = 1.0 + x0.norm();
    let z = w.project(x0)?;
    let sweep = setup.map_product()?;
    let weight = 0.5f64.powi(setup.m() as i32);

    let mut xs = vec![x0.clone()];
    for k in 0..iters {
        xs.push(circumcenter_map(&s, &xs[k])?);
    }

    let mut invariance = 0.0f64;
    let mut expansion = 0.0f64;
    let mut pythagoras = 0.0f64;
    let mut pythagoras_ok = true;
    for (k, x) in xs.iter().enumerate() {
        invariance = invariance.max((w.project(x)? - &z).norm());
        let mut avg = Vector::zeros(x.len());
        for t in s.ops() {
            avg += t.apply(x)? * weight;
        }
        expansion = expansion.max((sweep.apply(x)? - avg).norm());
        if let Some(next) = xs.get(k + 1) {
            let d = (x - &z).norm();
            let gap = (d * d - (next - &z).norm_squared() - (next - x).norm_squared()).abs();
            let allowed = AUDIT_TOL * d * d + ROUND_OFF_FLOOR * scale * d + 1e-24;
            pythagoras = pythagoras.max(gap / allowed.max(f64::MIN_POSITIVE));
            pythagoras_ok &= gap <= allowed;
        }
    }

    let mut rng = rng_from_seed(setup.seed.wrapping_add(1));
    let mut samples = vec![x0.clone()];
    samples.extend((0..DOUBLE_PROJECTION_SAMPLES).map(|_| unit_sphere(&mut rng, setup.n())));
    let mut double_proj = 0.0f64;
    let mut double_proj_ok = true;
    for x in &samples {
        let imgs = s.images(x)?;
        let hull = AffineSubspace::affine_hull(imgs.points(), &setup.tol)?;
        let gap = (circumcenter_map(&s, x)? - hull.project(&w.project(x)?)?).norm();
        double_proj = double_proj.max(gap);
        double_proj_ok &= gap <= 1e-8 * (1.0 + x.norm());
    }

    let rel = |v: f64, limit: f64| v <= limit * scale;
    Ok(vec![
        Check::new(
            "projection_invariance",
            rel(invariance, 1e-10),
            invariance,
            "max_k |P_W x_k - P_W x_0|",
        ),
        Check::new(
            "cim_pythagoras",
            pythagoras_ok,
            pythagoras,
            "max_k gap / allowance in |x_k - z|^2 = |x_(k+1) - z|^2 + |x_(k+1) - x_k|^2",
        ),
        Check::new(
            "double_projection",
            double_proj_ok,
            double_proj,
            "max_x |C_S x - P_aff S(x) P_W x| over x_0 and 20 sphere points",
        ),
        Check::new(
            "reflector_expansion",
            rel(expansion, 1e-10),
            expansion,
            "max_k |P_m...P_1 x_k - 2^-m sum_Psi T x_k|",
        ),
    ])
}

#[cfg(test)]
mod tests {
    use super::*;

    const TWO_LINES: &str = r#"
name = "two-lines"
ambient_dim = 2
max_iters = 20

[instance]
source = "explicit"
subspaces = [
  { anchor = [0.0, 0.0], span = [[1.0, 0.0]] },
  { anchor = [0.0, 0.0], span = [[1.0, 1.0]] },
]

[x0]
source = "explicit"
point = [0.3, 1.0]

[[methods]]
name = "map"
method = "map"

[[methods]]
name = "crm"
method = "cim"
recipe = "psi_symmetric"

[[methods]]
name = "dr"
method = "dr"

[[methods]]
name = "accel"
method = "accel_map"

[[methods]]
name = "crm_prefixed"
method = "cim"
recipe = "psi_symmetric"
prefix = "sym_product"
"#;

    fn report(text: &str, verify: bool) -> ExperimentReport {
        let cfg = ExperimentConfig::from_toml(text).unwrap();
        let opts = RunOptions {
            verify,
            ..RunOptions::default()
        };
        run_experiment(&cfg, &opts).unwrap()
    }

    #[test]
    fn two_lines_report_passes() {
        let r = report(TWO_LINES, true);
        for m in &r.methods {
            assert!(m.passed(), "{}: {:?}", m.name, m.error);
        }
        for c in &r.checks {
            assert!(c.passed, "{c:?}");
        }
        assert!(r.passed);
        let half = 0.5f64.sqrt();
        assert!((r.constants.get("friedrichs").unwrap() - half).abs() < 1e-12);
        let crm = &r.methods[1];
        assert_eq!(crm.audits[0].constant_name, "gamma_sq");
        assert!((crm.audits[0].value - 0.5).abs() < 1e-12);
        let pre = &r.methods[4];
        assert!(matches!(
            pre.audits[1].scale_mode,
            ScaleMode::Prefixed { prefactor } if (prefactor - 0.5).abs() < 1e-12
        ));
    }

    #[test]
    fn single_subspace_map_converges_in_one_step() {
        let text = r#"
name = "one"
ambient_dim = 3
max_iters = 3
[instance]
source = "explicit"
subspaces = [{ anchor = [0.0, 0.0, 0.0], span = [[1.0, 2.0, 2.0]] }]
[x0]
source = "explicit"
point = [1.0, 0.0, 0.0]
[[methods]]
name = "map"
method = "map"
"#;
        let r = report(text, false);
        let m = &r.methods[0];
        assert!(m.passed());
        assert_eq!(m.iterations_to_1e_10, Some(1));
        assert!(m.audits[0].value.abs() < 1e-12);
    }

    #[test]
    fn method_errors_are_reported_not_raised() {
        let text = TWO_LINES.replace(
            "{ anchor = [0.0, 0.0], span = [[1.0, 1.0]] },",
            "{ anchor = [0.0, 0.0], span = [[1.0, 1.0]] },\n  { anchor = [0.0, 0.0], span = [[0.0, 1.0]] },",
        );
        let r = report(&text, false);
        let dr = r.methods.iter().find(|m| m.name == "dr").unwrap();
        assert_eq!(dr.status, "error");
        assert!(!r.passed);
    }

    #[test]
    fn random_instances_pass_every_audit() {
        let text = r#"
name = "random"
ambient_dim = 10
seed = 3
[instance]
source = "random"
count = 3
dim_range = [3, 7]
[[methods]]
name = "map"
method = "map"
[[methods]]
name = "crm"
method = "cim"
[[methods]]
name = "crm_sym"
method = "cim"
recipe = "psi_symmetric"
[[methods]]
name = "s1"
method = "cim"
recipe = "identity_plus_reflectors"
[[methods]]
name = "s2"
method = "cim"
recipe = "identity_plus_prefix_products"
[[methods]]
name = "avg"
method = "averaged_iter"
recipe = "identity_plus_prefix_products"
[[methods]]
name = "blocks"
method = "blockwise_cim"
mode = "convex"
[[methods]]
name = "sym"
method = "sym_map"
prefix = "map_product"
"#;
        for seed in 0..5 {
            let cfg = ExperimentConfig::from_toml(text).unwrap();
            let opts = RunOptions {
                seed: Some(seed),
                verify: true,
                ..RunOptions::default()
            };
            let r = run_experiment(&cfg, &opts).unwrap();
            for m in &r.methods {
                assert!(m.passed(), "seed {seed} {}: {:?}", m.name, m.error);
            }
            assert!(r.passed, "seed {seed}: {:?}", r.checks);
        }
    }

    #[test]
    fn palindrome_order() {
        assert_eq!(palindrome(&[1, 2, 3]), vec![1, 2, 3, 2, 1]);
        assert_eq!(palindrome(&[1]), vec![1]);
    }
}
