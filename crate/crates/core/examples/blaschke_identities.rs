//! Critical point, critical value and circle expansion of `Q_a`, and the
//! circle-hugging ladder toward a rotation number on the unit circle.

use capture_atlas::blaschke::{circle_hugging_ladder, NormalizedBlaschke};
use num_complex::Complex64;

fn main() -> capture_atlas::Result<()> {
    for a in [Complex64::new(0.5, 0.2), Complex64::from_polar(0.95, 2.0)] {
        let q = NormalizedBlaschke::new(a)?;
        let c = q.critical_point_in_disk().value;
        println!("a = {a:.4}");
        println!("  c_a = {c:.6}, Q_a(c_a) = {:.6}, c_a² = {:.6}", q.eval(c)?, c * c);
        println!("  Q_a'(0) = {:.6}", q.derivative(Complex64::new(0.0, 0.0))?);
        println!("  min |Q_a'| on the circle = {:.6}", q.expansion_margin(4096));
    }

    let golden = (5f64.sqrt() - 1.0) / 2.0;
    let s = Complex64::from_polar(1.0, std::f64::consts::TAU * golden);
    match circle_hugging_ladder(s, 20, 0.1, 60) {
        Some(hit) => println!(
            "ladder: rung {} (δ' = {:e}) keeps the critical orbit at modulus ≥ {:.4}",
            hit.k, hit.delta_prime, hit.min_modulus
        ),
        None => println!("ladder: no rung found"),
    }
    Ok(())
}
