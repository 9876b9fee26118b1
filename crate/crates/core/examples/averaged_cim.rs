//! CIM over S₁ = {Id, R₁, …, R_m} and S₂ = {Id, R₁, R₂R₁, …} compared with
//! power iteration of the averaged operators that bound them.

use std::error::Error;

use circumcentered::bench::{generate_instance, RandomSpec};
use circumcentered::isometry::{build_product_averaged, build_sum_averaged, AveragedSpec};
use circumcentered::methods::{run_averaged_iter, run_cim, MethodConfig};
use circumcentered::rates::{audit_bound, averaged_rate, ScaleMode};
use circumcentered::{AffineIsometry, OperatorSet, Tolerance};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let tol = Tolerance::default();
    let spec = RandomSpec {
        count: 3,
        dim_range: [3, 5],
        common_dim: 1,
    };
    let inst = generate_instance(6, &spec, 5, &tol)?;
    let n = inst.x0.len();
    let mut family = vec![AffineIsometry::identity(n)];
    family.extend(inst.subspaces.iter().map(AffineIsometry::reflector));
    let uniform = AveragedSpec::uniform(family.len());

    let s1 = OperatorSet::new(family.clone(), &tol)?;
    let mut prefixes = vec![AffineIsometry::identity(n)];
    for r in &family[1..] {
        let last = prefixes.last().expect("starts with Id");
        prefixes.push(r.after(last)?);
    }
    let s2 = OperatorSet::new(prefixes, &tol)?;

    let a1 = build_sum_averaged(&uniform, &family, &tol)?;
    let a2 = build_product_averaged(&uniform, &family, &tol)?;
    let cfg = MethodConfig::new(40);
    for (label, s, a) in [("S1", &s1, &a1), ("S2", &s2, &a2)] {
        let rate = averaged_rate(a, &tol)?;
        let cim = run_cim(s, &inst.x0, &cfg)?;
        let power = run_averaged_iter(a, &inst.x0, &cfg, &tol)?;
        let audit = audit_bound(&cim, rate, ScaleMode::Plain);
        println!(
            "{label}: alpha={:.3} rate={rate:.6} CIM error {:.3e}, averaged iteration {:.3e}, bound ok={}",
            a.alpha,
            cim.final_error(),
            power.final_error(),
            audit.all_satisfied()
        );
        assert!(audit.all_satisfied());
        assert!(cim.final_error() <= power.final_error() * (1.0 + 1e-8) + 1e-12);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
