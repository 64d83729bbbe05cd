//! Builds a small σ₃ lamination, checks sibling invariance and lists its gaps
//! with their degrees and the major of the quadratic gap.

use capture_atlas::lamina::{self, Chord, DegreeMap, Lamination};

fn main() -> capture_atlas::Result<()> {
    // A periodic leaf pair together with its two siblings.
    let lam = Lamination::parse(
        "d=3\n\
         1/6 1/3\n\
         2/3 5/6\n\
         0 1/2\n",
    )?;
    let report = lamina::check_sibling_invariant(&lam);
    println!("{} leaves, sibling invariant: {}", lam.len(), report.pass);
    for v in &report.violations {
        println!("  violation {:?} at {}", v.condition, v.leaf);
    }

    for gap in lamina::gaps(&lam) {
        let verts: Vec<String> = gap.vertices.iter().map(|a| a.to_string()).collect();
        let degree = lamina::gap_degree(&gap, DegreeMap::CUBIC);
        print!("gap [{}] degree {degree}", verts.join(", "));
        if degree == 2 {
            if let Ok((major, kind)) = lamina::quadratic_gap_major(&gap) {
                print!(", major {major} ({kind:?})");
            }
        }
        println!();
    }

    let crossing = Chord::frac((0, 1), (1, 2));
    let other = Chord::frac((1, 4), (3, 4));
    println!("{crossing} crosses {other}: {}", lamina::chords_cross(&crossing, &other));
    Ok(())
}
