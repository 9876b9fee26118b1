//! Affine subspaces: projections, reflections, intersections, and running a
//! circumcentered method on affine reflectors by moving a common point to
//! the origin.

use std::error::Error;

use circumcentered::circumcenter::{circumcenter_map, shift_operator_set};
use circumcentered::{intersect, AffineIsometry, AffineSubspace, Intersection, OperatorSet, Tolerance};
use nalgebra::dvector;

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let tol = Tolerance::default();
    // Two planes in ℝ³ that meet in the line {(t, 1, 2)}.
    let a = AffineSubspace::new(
        dvector![0.0, 1.0, 0.0],
        &[dvector![1.0, 0.0, 0.0], dvector![0.0, 0.0, 1.0]],
        &tol,
    )?;
    let b = AffineSubspace::new(
        dvector![0.0, 0.0, 2.0],
        &[dvector![1.0, 0.0, 0.0], dvector![0.0, 1.0, 0.0]],
        &tol,
    )?;
    let x = dvector![3.0, -1.0, 5.0];
    println!("P_A x = {:?}, R_A x = {:?}", a.project(&x)?.as_slice(), a.reflect(&x)?.as_slice());

    let line = intersect(&[a.clone(), b.clone()], &tol)?.into_result()?;
    println!("A ∩ B: dim {}, anchor {:?}", line.dim(), line.anchor().as_slice());
    assert!((line.anchor() - dvector![0.0, 1.0, 2.0]).norm() < 1e-12);

    // Parallel planes never meet; the residual says how far apart they are.
    let c = AffineSubspace::new(
        dvector![0.0, 4.0, 0.0],
        &[dvector![1.0, 0.0, 0.0], dvector![0.0, 0.0, 1.0]],
        &tol,
    )?;
    if let Intersection::Empty { residual } = intersect(&[a.clone(), c], &tol)? {
        println!("parallel planes: empty intersection, residual {residual:.3}");
    } else {
        return Err("parallel planes should not meet".into());
    }

    // One circumcentered step over {Id, R_A, R_B, R_B R_A} lands on the
    // best approximation; shifting by a common point gives linear maps.
    let (ra, rb) = (AffineIsometry::reflector(&a), AffineIsometry::reflector(&b));
    let s = OperatorSet::new(vec![AffineIsometry::identity(3), ra.clone(), rb.clone(), rb.after(&ra)?], &tol)?;
    let cx = circumcenter_map(&s, &x)?;
    let target = line.project(&x)?;
    println!("C_S x = {:?}, P_(A∩B) x = {:?}", cx.as_slice(), target.as_slice());
    assert!((&cx - &target).norm() < 1e-10);

    let z = line.anchor().clone();
    let shifted = shift_operator_set(&s, &z)?;
    assert!(shifted.is_linear());
    let via_shift = circumcenter_map(&shifted, &(&x - &z))? + &z;
    assert!((via_shift - cx).norm() < 1e-10);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
