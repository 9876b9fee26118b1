//! Fixed points of a product of reflectors can be much larger than the
//! intersection of the mirrors: three lines through the origin of the plane
//! meet only at 0, yet R₃R₂R₁ fixes a whole line.

use std::error::Error;

use circumcentered::isometry::compose_all;
use circumcentered::{intersect, AffineIsometry, AffineSubspace, Tolerance};
use nalgebra::dvector;

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let tol = Tolerance::default();
    let lines = [dvector![1.0, 0.0], dvector![1.0, 1.0], dvector![0.0, 1.0]]
        .into_iter()
        .map(|d| AffineSubspace::linear(2, &[d], &tol))
        .collect::<Result<Vec<_>, _>>()?;
    let reflectors: Vec<AffineIsometry> = lines.iter().map(AffineIsometry::reflector).collect();

    // compose_all applies its first operator first.
    let t = compose_all(&reflectors, 2)?;
    let fix = t.fixed_point_set(&tol).ok_or("linear isometries fix 0")?;
    let meet = intersect(&lines, &tol)?.into_result()?;
    println!("R3 R2 R1 ={:.3}", t.linear_part());
    println!("dim Fix = {}, basis {:?}", fix.dim(), fix.basis().as_slice());
    println!("dim of the intersection of the lines = {}", meet.dim());

    let diagonal = AffineSubspace::linear(2, &[dvector![1.0, 1.0]], &tol)?;
    assert!(fix.same_set(&diagonal, &tol));
    assert_eq!(meet.dim(), 0);

    // A translation has no fixed points at all.
    let shift = AffineIsometry::translation(dvector![1.0, 0.0]);
    assert!(shift.fixed_point_set(&tol).is_none());
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
