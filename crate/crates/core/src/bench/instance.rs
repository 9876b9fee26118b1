//! Random families of linear subspaces with a nontrivial starting point.

use serde::{Deserialize, Serialize};

use super::rng::{gaussian_matrix, rng_from_seed, uniform_int, unit_sphere, BenchRng};
use crate::error::{Error, Result};
use crate::numerics::{Tolerance, Vector};
use crate::subspace::{intersect, AffineSubspace};

/// Draws allowed before a degenerate instance is reported.
pub const MAX_DRAWS: usize = 100;

/// Minimum distance of the starting point to the intersection.
pub const MIN_START_DISTANCE: f64 = 0.1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RandomSpec {
    /// Number of subspaces.
    pub count: usize,
    /// Inclusive range of subspace dimensions.
    pub dim_range: [usize; 2],
    /// Dimension of a random subspace shared by every member, which forces
    /// the intersection to be at least this large.
    #[serde(default)]
    pub common_dim: usize,
}

impl RandomSpec {
    pub fn validate(&self, n: usize) -> Result<()> {
        let [lo, hi] = self.dim_range;
        let bad = |msg: String| Err(Error::InvalidInput(msg));
        if self.count == 0 {
            return bad("random instance needs count >= 1".into());
        }
        if lo > hi || hi > n {
            return bad(format!("dim_range [{lo}, {hi}] must satisfy lo <= hi <= {n}"));
        }
        if self.common_dim > hi {
            return bad(format!(
                "common_dim {} exceeds the largest subspace dimension {hi}",
                self.common_dim
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct Instance {
    pub subspaces: Vec<AffineSubspace>,
    pub x0: Vector,
    pub intersection: AffineSubspace,
}

/// Draws a starting point on the unit sphere at distance more than
/// [`MIN_START_DISTANCE`] from `w`.
pub fn draw_start(rng: &mut BenchRng, w: &AffineSubspace) -> Option<Vector> {
    (0..MAX_DRAWS).find_map(|_| {
        let x = unit_sphere(rng, w.ambient_dim());
        let far = w.project(&x).map(|p| (&x - p).norm() > MIN_START_DISTANCE);
        far.unwrap_or(false).then_some(x)
    })
}

/// Random linear subspaces of ℝⁿ with Gaussian bases (orthonormalized) and
/// a starting point on the unit sphere, all drawn from one seeded stream.
pub fn generate_instance(
    n: usize,
    spec: &RandomSpec,
    seed: u64,
    tol: &Tolerance,
) -> Result<Instance> {
    spec.validate(n)?;
    let mut rng = rng_from_seed(seed);
    let [lo, hi] = spec.dim_range;
    for _ in 0..MAX_DRAWS {
        let common = gaussian_matrix(&mut rng, n, spec.common_dim);
        let mut subspaces = Vec::with_capacity(spec.count);
        for _ in 0..spec.count {
            let d = uniform_int(&mut rng, lo.max(spec.common_dim), hi);
            let extra = gaussian_matrix(&mut rng, n, d - spec.common_dim);
            let span: Vec<Vector> = common
                .column_iter()
                .chain(extra.column_iter())
                .map(|c| c.into_owned())
                .collect();
            subspaces.push(AffineSubspace::linear(n, &span, tol)?);
        }
        let intersection = intersect(&subspaces, tol)?.into_result()?;
        let x = unit_sphere(&mut rng, n);
        if (&x - intersection.project(&x)?).norm() > MIN_START_DISTANCE {
            return Ok(Instance {
                subspaces,
                x0: x,
                intersection,
            });
        }
    }
    Err(Error::Degenerate(format!(
        "no starting point at distance > {MIN_START_DISTANCE} from the intersection after \
         {MAX_DRAWS} draws"
    )))
}
