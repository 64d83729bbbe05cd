//! Probes a constructed capture at a golden-mean Siegel multiplier: one
//! critical orbit lands in the linearization trap, the other stays on the
//! boundary side.

use capture_atlas::atlas::{classify_point, AtlasConfig};
use capture_atlas::cubic::{
    landing_critical_point, siegel_capture_probe, solve_center_curve, CriticalBranch, CubicParams, LinearizerSeries,
    ProbeConfig, ProbeStart, SeedGrid,
};
use num_complex::Complex64;

fn main() -> capture_atlas::Result<()> {
    let theta = (5f64.sqrt() - 1.0) / 2.0;
    let lambda = Complex64::from_polar(1.0, std::f64::consts::TAU * theta);
    let b = solve_center_curve(lambda, 3, CriticalBranch::Both, SeedGrid::default())?[0];
    let p = CubicParams::new(lambda, b);
    println!("b = {b:.10}");

    if let Some(series) = LinearizerSeries::new(&p, 2048) {
        println!("linearizer: {} terms, safe radius {:.4}", series.degree(), series.safe_radius(1e-13));
    }

    let c = landing_critical_point(lambda, b, 3);
    let cfg = ProbeConfig { start: ProbeStart::Point(c), ..ProbeConfig::default() };
    let ev = siegel_capture_probe(&p, theta, &cfg)?;
    println!(
        "probe from c: {:?}, order agreement {:.3} over {} triples, trap entry {:?}",
        ev.verdict, ev.order_agreement, ev.triples, ev.trap_entry
    );

    let class = classify_point(lambda, b, &AtlasConfig::default());
    println!("label: {}", class.label);
    Ok(())
}
