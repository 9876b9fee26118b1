//! Douglas–Rachford on two planes in ℝ³: its fixed-point set is larger than
//! the intersection, and its rate equals the Friedrichs cosine.

use std::error::Error;

use circumcentered::methods::{run_dr, MethodConfig};
use circumcentered::rates::{audit_bound, fixed_set_rate, friedrichs_cos, ScaleMode};
use circumcentered::{AffineMap, AffineSubspace, Tolerance};
use nalgebra::dvector;

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let tol = Tolerance::default();
    let u = AffineSubspace::linear(3, &[dvector![1.0, 0.0, 0.0], dvector![0.0, 1.0, 0.0]], &tol)?;
    let v = AffineSubspace::linear(3, &[dvector![1.0, 0.0, 0.0], dvector![0.0, 1.0, 2.0]], &tol)?;
    let t = AffineMap::douglas_rachford(&u, &v)?;
    let fix = t.fixed_point_set(&tol).ok_or("linear map fixes 0")?;
    let rate = fixed_set_rate(&t, &tol)?;
    let c = friedrichs_cos(&u, &v, &tol)?;
    println!("dim Fix T_DR = {}, rate {rate:.12}, Friedrichs cosine {c:.12}", fix.dim());
    assert!((rate - c).abs() < 1e-10);

    let x0 = dvector![0.4, -1.0, 2.5];
    let trace = run_dr(&u, &v, &x0, &MethodConfig::new(40), &tol)?;
    // The shadow sequence P_U x_k converges to the projection onto U ∩ V.
    let shadow = u.project(trace.iterates.last().expect("nonempty"))?;
    println!("final DR error {:.3e}, shadow point {:?}", trace.final_error(), shadow.as_slice());
    assert!(audit_bound(&trace, rate, ScaleMode::Plain).all_satisfied());
    assert!((shadow[1]).abs() < 1e-6 && (shadow[2]).abs() < 1e-6);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
