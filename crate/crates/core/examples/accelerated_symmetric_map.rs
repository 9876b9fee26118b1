//! Accelerated symmetric MAP: the constants c₁, c₂, η and c(T) of
//! T = P₁P₂P₃P₂P₁, their ordering, and circumcentered reflections started
//! from Tx, which inherit the η^k c(T) bound.

use std::error::Error;

use circumcentered::bench::{generate_instance, RandomSpec};
use circumcentered::circumcenter::build_psi;
use circumcentered::methods::{run_accel, run_cim, run_sym_map, MethodConfig};
use circumcentered::rates::{accel_constants, audit_bound, tuple_angle_cos, ScaleMode};
use circumcentered::{AffineIsometry, AffineMap, Tolerance};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let tol = Tolerance::default();
    let spec = RandomSpec {
        count: 3,
        dim_range: [3, 6],
        common_dim: 0,
    };
    let inst = generate_instance(8, &spec, 99, &tol)?;
    let subs = &inst.subspaces;
    let palindrome = vec![
        subs[0].clone(),
        subs[1].clone(),
        subs[2].clone(),
        subs[1].clone(),
        subs[0].clone(),
    ];
    let t = AffineMap::projector_product(&palindrome)?;
    let consts = accel_constants(&t, &tol)?;
    let gamma = tuple_angle_cos(subs, &tol)?;
    println!(
        "c1={:.6} c2={:.6} eta={:.6} c/(2-c)={:.6} c(T)={:.6} gamma^2={:.6}",
        consts.c1,
        consts.c2,
        consts.eta,
        consts.eta_ceiling(),
        consts.c_t,
        gamma * gamma
    );
    consts.check_chain()?;
    consts.check_gamma(gamma)?;

    let cfg = MethodConfig::new(30);
    let plain = run_sym_map(&t, &inst.x0, &cfg, &tol)?;
    let accel = run_accel(&t, &inst.x0, &cfg, &tol)?;
    println!(
        "after 30 steps: symmetric MAP {:.3e}, accelerated {:.3e}",
        plain.final_error(),
        accel.final_error()
    );
    assert!(audit_bound(&accel, consts.eta, ScaleMode::Plain).all_satisfied());

    // Circumcentered reflections over the palindromic reflector list,
    // started from Tx instead of x.
    let reflectors: Vec<AffineIsometry> = palindrome.iter().map(AffineIsometry::reflector).collect();
    let s = build_psi(&reflectors, &tol)?;
    let prefixed = run_cim(&s, &inst.x0, &cfg.clone().with_prefix(t))?;
    let report = audit_bound(
        &prefixed,
        consts.eta,
        ScaleMode::Prefixed {
            prefactor: consts.c_t,
        },
    );
    println!(
        "prefixed CRM: final error {:.3e}, eta^k c(T) bound holds: {}",
        prefixed.final_error(),
        report.all_satisfied()
    );
    assert!(report.all_satisfied());
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
