//! Circumcenters of finite point sets: existence, affine coefficients and
//! the scaling/translation behaviour.

use std::error::Error;

use circumcentered::{circumcenter, PointSet, Tolerance, Vector};
use nalgebra::dvector;

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let tol = Tolerance::default();

    // Right triangle: the center is the midpoint of the hypotenuse.
    let tri = PointSet::new(vec![dvector![0.0, 0.0], dvector![2.0, 0.0], dvector![0.0, 2.0]])?;
    let res = circumcenter(&tri, &tol);
    let c = res.center.clone().ok_or("triangle has a circumcenter")?;
    println!("triangle center {:?}, coefficients {:?}", c.as_slice(), res.coefficients);
    assert!((c - dvector![1.0, 1.0]).norm() < 1e-12);

    // Three distinct collinear points are never equidistant from one point
    // of their line.
    let line = PointSet::new(vec![dvector![0.0, 0.0], dvector![1.0, 0.0], dvector![3.0, 0.0]])?;
    let res = circumcenter(&line, &tol);
    println!(
        "collinear set: exists={} spread={:.3e}",
        res.exists(),
        res.equidistance_spread
    );
    assert!(!res.exists());

    // Duplicates do not change the answer.
    let dup = PointSet::new(vec![dvector![1.0, 0.0], dvector![1.0, 0.0], dvector![-1.0, 0.0]])?;
    let c = circumcenter(&dup, &tol).center.ok_or("two distinct points")?;
    assert!(c.norm() < 1e-12);

    // CC(λK + y) = λ CC(K) + y.
    let k = PointSet::new(vec![
        dvector![1.0, 0.0, 2.0],
        dvector![0.0, 3.0, 1.0],
        dvector![-1.0, 1.0, 0.0],
        dvector![2.0, 2.0, 2.0],
    ])?;
    let base = circumcenter(&k, &tol).center.ok_or("tetrahedron")?;
    let shift: Vector = dvector![5.0, -2.0, 0.5];
    let moved = circumcenter(&k.scaled(-3.0).translated(&shift)?, &tol)
        .center
        .ok_or("image of a tetrahedron")?;
    let gap = (moved - (base * -3.0 + &shift)).norm();
    println!("equivariance gap {gap:.3e}");
    assert!(gap < 1e-10);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
