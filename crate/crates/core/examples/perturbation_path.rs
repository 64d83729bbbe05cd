//! Pushes a Siegel capture into the attracting region along `(1 − ε)λ` and
//! reports the hyperbolic label the ladder settles on.

use capture_atlas::atlas::{perturbation_path_report, PathConfig};
use capture_atlas::cubic::{solve_center_curve, CriticalBranch, CubicParams, SeedGrid};
use num_complex::Complex64;

fn main() -> capture_atlas::Result<()> {
    let theta = (5f64.sqrt() - 1.0) / 2.0;
    let lambda = Complex64::from_polar(1.0, std::f64::consts::TAU * theta);
    let bs = solve_center_curve(lambda, 3, CriticalBranch::Both, SeedGrid::default())?;
    let ladder = [1e-2, 1e-3, 1e-4, 1e-5, 1e-6];
    for b in bs.iter().take(2) {
        let report = perturbation_path_report(&CubicParams::new(lambda, *b), &ladder, &PathConfig::default())?;
        println!("b = {b:.8}");
        for rung in &report.rungs {
            println!(
                "  ε = {:e}: {} (critical in component: {:?}, disk inside: {})",
                rung.eps, rung.label, rung.in_component, rung.disk_in_component
            );
        }
        match report.stabilized {
            Some(label) => println!("  stabilized on {label} over the last {} rungs", report.tail_length),
            None => println!("  no stable label"),
        }
    }
    Ok(())
}
