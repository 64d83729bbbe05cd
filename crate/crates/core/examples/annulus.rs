//! Moduli of round annuli: nesting and scaling.

use capture_atlas::atlas::{annulus_modulus, Annulus};

fn main() -> capture_atlas::Result<()> {
    let unit = Annulus::new(1.0, std::f64::consts::TAU.exp())?;
    println!("m(A(1, e^2π)) = {}", annulus_modulus(&unit));
    let inner = Annulus::new(2.0, 4.0)?;
    let outer = Annulus::new(1.5, 5.0)?;
    println!(
        "A(2,4) ⊂ A(1.5,5): {}, moduli {:.6} ≤ {:.6}",
        outer.contains_annulus(&inner),
        annulus_modulus(&inner),
        annulus_modulus(&outer)
    );
    let scaled = Annulus::new(2.0 * 7.3, 4.0 * 7.3)?;
    println!("scaled by 7.3: {:.15}", annulus_modulus(&scaled));
    Ok(())
}
