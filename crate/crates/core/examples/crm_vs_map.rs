//! Circumcentered reflections against cyclic projections on a random family
//! of subspaces, with both traces audited against the tuple angle.

use std::error::Error;

use circumcentered::bench::{generate_instance, RandomSpec};
use circumcentered::methods::{run_cim, run_map, MethodConfig};
use circumcentered::rates::{audit_bound, tuple_angle_cos, ScaleMode};
use circumcentered::circumcenter::build_psi;
use circumcentered::{AffineIsometry, Tolerance};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let tol = Tolerance::default();
    let spec = RandomSpec {
        count: 3,
        dim_range: [4, 7],
        common_dim: 1,
    };
    let inst = generate_instance(10, &spec, 2024, &tol)?;
    let dims: Vec<usize> = inst.subspaces.iter().map(|s| s.dim()).collect();
    println!("subspace dims {dims:?}, intersection dim {}", inst.intersection.dim());

    let gamma = tuple_angle_cos(&inst.subspaces, &tol)?;
    let reflectors: Vec<AffineIsometry> =
        inst.subspaces.iter().map(AffineIsometry::reflector).collect();
    let psi = build_psi(&reflectors, &tol)?;
    println!("gamma = {gamma:.6}, |Psi| = {} operators", psi.len());

    let cfg = MethodConfig::new(25);
    let crm = run_cim(&psi, &inst.x0, &cfg)?;
    let map = run_map(&inst.subspaces, &inst.x0, &cfg, &tol)?;
    println!("{:>3} {:>12} {:>12} {:>12}", "k", "CRM", "MAP", "gamma^k e0");
    for k in (0..=25).step_by(5) {
        println!(
            "{k:>3} {:>12.3e} {:>12.3e} {:>12.3e}",
            crm.errors[k],
            map.errors[k],
            gamma.powi(k as i32) * crm.errors[0]
        );
    }
    for trace in [&crm, &map] {
        let report = audit_bound(trace, gamma, ScaleMode::Plain);
        println!("{} audit: satisfied={} min slack {:.3}", trace.method, report.all_satisfied(), report.slack_min);
        assert!(report.all_satisfied());
    }
    assert!(crm.final_error() <= map.final_error());
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
