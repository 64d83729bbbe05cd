//! External rays of `z³` with their landing records, and the rational
//! laminations of maps whose critical point lands on 0: empty for the
//! principal ones, a periodic leaf pair and its relatives for captures.

use capture_atlas::atlas::{classify_point, AtlasConfig};
use capture_atlas::cubic::{solve_center_curve, CriticalBranch, CubicParams, SeedGrid};
use capture_atlas::lamina::Angle;
use capture_atlas::rays::{land_rational_ray, rational_lamination_sample, trace_ray, RayConfig};
use num_complex::Complex64;

fn main() -> capture_atlas::Result<()> {
    let cfg = RayConfig::default();
    let cube = CubicParams::new(Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
    for angle in [Angle::frac(0, 1), Angle::frac(1, 8), Angle::frac(1, 4)] {
        let ray = trace_ray(&cube, &angle, &cfg)?;
        let landing = land_rational_ray(&cube, &angle, &cfg)?;
        println!(
            "z³, angle {angle}: {} samples, lands at {:.9} (period {}, |multiplier| {:.6})",
            ray.points.len(),
            landing.landing_point,
            landing.period,
            landing.multiplier.norm()
        );
    }

    // Maps whose second critical point lands on 0 after two steps.
    let lambda = Complex64::new(0.5, 0.0);
    for b in solve_center_curve(lambda, 2, CriticalBranch::Both, SeedGrid::default())? {
        let p = CubicParams::new(lambda, b);
        let sample = rational_lamination_sample(&p, 12, 1e-6, &cfg)?;
        let leaves: Vec<String> = sample.lamination.leaves().iter().map(|l| l.to_string()).collect();
        let label = classify_point(lambda, b, &AtlasConfig::default()).label;
        println!("λ = 0.5, b = {b:.6} ({label}): [{}]", leaves.join(", "));
    }
    Ok(())
}
