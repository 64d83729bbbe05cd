//! Continued fractions with certified quotients, Brjuno partial sums, and a
//! constructed angle whose sum diverges.

use capture_atlas::brjuno::{brjuno_partial_sums, cf_expand, make_non_brjuno, GrowthRule, HighPrecisionReal};

fn main() -> capture_atlas::Result<()> {
    let golden = HighPrecisionReal::golden_mean(256);
    let cf = cf_expand(&golden, 80)?;
    let denominators: Vec<String> = cf.denominators().take(12).map(|q| q.to_string()).collect();
    println!("golden mean denominators: {}", denominators.join(", "));
    let sums = brjuno_partial_sums(&cf)?;
    println!("partial sums: N=40 {:.12}, N=80 {:.12}", sums.sum_to(40), sums.sum_to(80));

    let decimal = HighPrecisionReal::from_decimal("0.41421356237309504880")?;
    let cf = cf_expand(&decimal, 30)?;
    println!(
        "0.41421356237309504880: {} certified quotients (truncated: {})",
        cf.quotients.len(),
        cf.truncated
    );

    let nb = make_non_brjuno(GrowthRule::ExpOverQ, 4, 1 << 16);
    let quotients: Vec<String> = nb.cf.quotients.iter().map(|a| a.to_string()).collect();
    println!("non-Brjuno prefix: [{}]", quotients.join(", "));
    println!("certified partial sum ≥ {}", nb.certified_sum());
    Ok(())
}
