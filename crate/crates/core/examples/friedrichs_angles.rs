//! Friedrichs angles between pairs of subspaces and the m-tuple angle that
//! governs cyclic projections.

use std::error::Error;

use circumcentered::rates::{friedrichs_cos, tuple_angle_cos};
use circumcentered::{AffineSubspace, Tolerance};
use nalgebra::dvector;

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let tol = Tolerance::default();
    let span = |vs: &[[f64; 3]]| {
        let vs: Vec<_> = vs.iter().map(|v| dvector![v[0], v[1], v[2]]).collect();
        AffineSubspace::linear(3, &vs, &tol)
    };

    for deg in [15.0f64, 45.0, 80.0] {
        let r = deg.to_radians();
        let u = span(&[[1.0, 0.0, 0.0]])?;
        let v = span(&[[r.cos(), r.sin(), 0.0]])?;
        let c = friedrichs_cos(&u, &v, &tol)?;
        println!("lines at {deg:>4} degrees: c = {c:.12} (cos = {:.12})", r.cos());
        assert!((c - r.cos()).abs() < 1e-10);
    }

    // Two planes meeting in the z-axis: the angle is measured after removing
    // the common line, here 60 degrees between the normals.
    let a = span(&[[1.0, 0.0, 0.0], [0.0, 0.0, 1.0]])?;
    let b = span(&[[0.5, 3f64.sqrt() / 2.0, 0.0], [0.0, 0.0, 1.0]])?;
    let c = friedrichs_cos(&a, &b, &tol)?;
    println!("planes sharing an axis: c = {c:.12}");
    assert!((c - 0.5).abs() < 1e-10);

    // Orthogonal subspaces have c = 0; three lines around the plane give an
    // m-tuple angle strictly below 1.
    let x = span(&[[1.0, 0.0, 0.0]])?;
    let yz = span(&[[0.0, 1.0, 0.0], [0.0, 0.0, 1.0]])?;
    assert!(friedrichs_cos(&x, &yz, &tol)? < 1e-12);
    let lines = [
        span(&[[1.0, 0.0, 0.0]])?,
        span(&[[1.0, 1.0, 0.0]])?,
        span(&[[0.0, 1.0, 1.0]])?,
    ];
    let gamma = tuple_angle_cos(&lines, &tol)?;
    println!("three lines: gamma = {gamma:.12}");
    assert!(gamma > 0.0 && gamma < 1.0);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
