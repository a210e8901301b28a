// The drifts of r^2, x3^2 and log r under a rank-2 martingale are half-traces of the
// projection against the Hessians; checked here on random points and normals.
//
//     cargo run --example drift_identities

use nalgebra::Matrix3;
use parabolicity::geometry::{self, Point3, UnitVector3};
use parabolicity::rng::replication_rng;
use parabolicity::Result;
use rand::Rng;

pub fn run_example() -> Result<f64> {
    let mut rng = replication_rng(11, 0);
    let hess_r2 = Matrix3::from_diagonal(&nalgebra::Vector3::new(2.0, 2.0, 0.0));
    let hess_x3 = Matrix3::from_diagonal(&nalgebra::Vector3::new(0.0, 0.0, 2.0));
    let mut worst: f64 = 0.0;
    let mut min_gap = f64::INFINITY;
    for _ in 0..10_000 {
        let p = Point3 {
            x1: rng.random_range(-10.0..10.0),
            x2: rng.random_range(-10.0..10.0),
            x3: rng.random_range(-10.0..10.0),
        };
        let n = UnitVector3::normalize(
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
        )?;
        let proj = geometry::projection(&n);
        worst = worst
            .max((geometry::drift_r2(&n) - geometry::half_trace(&proj, &hess_r2)).abs())
            .max((geometry::drift_x3_sq(&n) - geometry::half_trace(&proj, &hess_x3)).abs())
            .max((geometry::drift_log_r(&p, &n)? - geometry::half_trace(&proj, &geometry::hessian_log_r(&p)?)).abs());
        min_gap = min_gap.min(geometry::beta_gamma_inequality_gap(&p, &n)?);
    }
    println!("largest drift vs half-trace mismatch: {worst:.2e}");
    println!("smallest beta-gamma inequality gap: {min_gap:.3e}");
    Ok(worst)
}

fn main() -> Result<()> {
    run_example().map(|_| ())
}
