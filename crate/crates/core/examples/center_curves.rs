//! Parameters whose critical point maps to 0 after exactly `n` steps.

use capture_atlas::cubic::{landing_critical_point, solve_center_curve, CriticalBranch, CubicParams, SeedGrid};
use num_complex::Complex64;

fn main() -> capture_atlas::Result<()> {
    let golden = (5f64.sqrt() - 1.0) / 2.0;
    let lambda = Complex64::from_polar(1.0, std::f64::consts::TAU * golden);
    for n in 1..=3 {
        let bs = solve_center_curve(lambda, n, CriticalBranch::Both, SeedGrid::default())?;
        println!("n = {n}: {} solutions", bs.len());
        for b in bs.iter().take(4) {
            let c = landing_critical_point(lambda, *b, n);
            let p = CubicParams::new(lambda, *b);
            println!("  b = {b:.8}  |f^{n}(c)| = {:.1e}", p.iterate(c, n as usize).norm());
        }
    }
    Ok(())
}
