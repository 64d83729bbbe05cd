//! Brute-force oracles shared by the integration tests. Angles are moved to
//! integer positions `t/M` on a grid with `3 | M`, so σ₃ is `t ↦ 3t mod M` and
//! preimages are `t/3 + jM/3`; nothing here reuses the library's comparisons.
#![allow(dead_code)]

use std::collections::BTreeSet;

use capture_atlas::lamina::{Angle, Chord, DegreeMap, Lamination, SiblingCondition, SiblingReport};
use num_integer::Integer;
use num_traits::ToPrimitive;
use rand::Rng;

/// An unordered chord on the grid `Z/M`, stored with `a < b`.
pub type GridChord = (u128, u128);

pub fn grid_modulus<'a>(angles: impl IntoIterator<Item = &'a Angle>) -> u128 {
    let l = angles.into_iter().fold(1u128, |l, a| l.lcm(&a.denom().to_u128().expect("small denominator")));
    3 * l
}

pub fn to_grid(a: &Angle, m: u128) -> u128 {
    let (p, q) = (a.numer().to_u128().unwrap(), a.denom().to_u128().unwrap());
    p * (m / q)
}

pub fn grid_chord(c: &Chord, m: u128) -> GridChord {
    norm(to_grid(c.a(), m), to_grid(c.b(), m))
}

pub fn norm(x: u128, y: u128) -> GridChord {
    (x.min(y), x.max(y))
}

/// Crossing by reading the four endpoints in circular order and asking whether
/// the labels alternate.
pub fn cross_oracle(c1: GridChord, c2: GridChord) -> bool {
    let pts = [c1.0, c1.1, c2.0, c2.1];
    if c1.0 == c1.1 || c2.0 == c2.1 || pts.iter().collect::<BTreeSet<_>>().len() < 4 {
        return false;
    }
    let mut labelled = [(c1.0, 1), (c1.1, 1), (c2.0, 2), (c2.1, 2)];
    labelled.sort();
    let seq: Vec<u8> = labelled.iter().map(|p| p.1).collect();
    seq == [1, 2, 1, 2] || seq == [2, 1, 2, 1]
}

pub fn disjoint_oracle(c1: GridChord, c2: GridChord) -> bool {
    let ends: BTreeSet<u128> = [c1.0, c1.1, c2.0, c2.1].into_iter().collect();
    ends.len() == 4 && !cross_oracle(c1, c2)
}

pub fn image(c: GridChord, m: u128) -> GridChord {
    norm(3 * c.0 % m, 3 * c.1 % m)
}

/// Violations as `(condition, chord)`, with conditions numbered 1..=3.
pub fn sibling_oracle(leaves: &[GridChord], m: u128) -> BTreeSet<(u8, GridChord)> {
    let set: BTreeSet<GridChord> = leaves.iter().copied().collect();
    let mut out = BTreeSet::new();
    for &l in leaves {
        let img = image(l, m);
        if img.0 != img.1 && !set.contains(&img) {
            out.insert((1, l));
        }
    }
    let third = m / 3;
    for &l in leaves {
        let pa: Vec<u128> = (0..3).map(|j| l.0 / 3 + j * third).collect();
        let pb: Vec<u128> = (0..3).map(|j| l.1 / 3 + j * third).collect();
        let ok = pa.iter().any(|&x| pb.iter().any(|&y| leaves.iter().all(|&o| !cross_oracle(norm(x, y), o))));
        if !ok {
            out.insert((2, l));
        }
    }
    for &l in leaves {
        let img = image(l, m);
        if img.0 == img.1 {
            continue;
        }
        let sibs: Vec<GridChord> = leaves.iter().copied().filter(|&s| s != l && image(s, m) == img).collect();
        let mut found = false;
        for i in 0..sibs.len() {
            for j in i + 1..sibs.len() {
                let trio = [l, sibs[i], sibs[j]];
                if (0..3).all(|x| (x + 1..3).all(|y| disjoint_oracle(trio[x], trio[y]))) {
                    found = true;
                }
            }
        }
        if !found {
            out.insert((3, l));
        }
    }
    out
}

pub fn report_as_grid(report: &SiblingReport, m: u128) -> BTreeSet<(u8, GridChord)> {
    report
        .violations
        .iter()
        .map(|v| {
            let k = match v.condition {
                SiblingCondition::ImageClosure => 1,
                SiblingCondition::PreimageExistence => 2,
                SiblingCondition::DisjointSiblings => 3,
            };
            (k, grid_chord(&v.leaf, m))
        })
        .collect()
}

/// Gap degree of a polygon on the grid by trying every subset of critical
/// non-edge chords; a triangle of critical edges counts as 3.
pub fn gap_degree_oracle(vertices: &[u128], m: u128) -> u32 {
    let mut v = vertices.to_vec();
    v.sort();
    v.dedup();
    let n = v.len();
    let critical = |x: u128, y: u128| x != y && 3 * x % m == 3 * y % m;
    let edges: BTreeSet<GridChord> = (0..n).map(|i| norm(v[i], v[(i + 1) % n])).collect();
    if n == 3 && edges.iter().all(|&(x, y)| critical(x, y)) {
        return 3;
    }
    let mut chords = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let c = (v[i], v[j]);
            if critical(c.0, c.1) && !edges.contains(&c) {
                chords.push(c);
            }
        }
    }
    assert!(chords.len() < 24, "subset search too large");
    let mut best = 0;
    for mask in 0u32..(1 << chords.len()) {
        let pick: Vec<GridChord> = (0..chords.len()).filter(|i| mask >> i & 1 == 1).map(|i| chords[i]).collect();
        if pick.len() > best && (0..pick.len()).all(|i| (i + 1..pick.len()).all(|j| disjoint_oracle(pick[i], pick[j]))) {
            best = pick.len();
        }
    }
    best as u32 + 1
}

/// Every set of at most `max` pairwise non-crossing chords with endpoints in
/// `{k/q}`, as index pairs.
pub fn noncrossing_sets(q: u128, max: usize) -> Vec<Vec<GridChord>> {
    let chords: Vec<GridChord> = (0..q).flat_map(|i| (i + 1..q).map(move |j| (i, j))).collect();
    let mut out = Vec::new();
    fn go(chords: &[GridChord], start: usize, cur: &mut Vec<GridChord>, max: usize, out: &mut Vec<Vec<GridChord>>) {
        out.push(cur.clone());
        if cur.len() == max {
            return;
        }
        for i in start..chords.len() {
            if cur.iter().all(|&c| !cross_oracle(chords[i], c)) {
                cur.push(chords[i]);
                go(chords, i + 1, cur, max, out);
                cur.pop();
            }
        }
    }
    go(&chords, 0, &mut Vec::new(), max, &mut out);
    out
}

/// All angles in `[0, 1)` with denominator at most `q_max`.
pub fn angles_up_to(q_max: i64) -> Vec<Angle> {
    let mut set = BTreeSet::new();
    for q in 1..=q_max {
        for p in 0..q {
            set.insert(Angle::frac(p, q));
        }
    }
    set.into_iter().collect()
}

/// A random set of `1..=max` pairwise non-crossing chords over `pool`.
pub fn random_noncrossing(rng: &mut impl Rng, pool: &[Angle], max: usize) -> Vec<Chord> {
    let want = rng.gen_range(1..=max);
    let mut out: Vec<Chord> = Vec::new();
    let mut tries = 0;
    while out.len() < want && tries < 200 {
        tries += 1;
        let i = rng.gen_range(0..pool.len());
        let j = rng.gen_range(0..pool.len());
        if i == j {
            continue;
        }
        let c = Chord::new(pool[i].clone(), pool[j].clone());
        let m = grid_modulus(out.iter().flat_map(|l| [l.a(), l.b()]).chain([c.a(), c.b()]));
        let g = grid_chord(&c, m);
        if out.iter().any(|l| grid_chord(l, m) == g || cross_oracle(grid_chord(l, m), g)) {
            continue;
        }
        out.push(c);
    }
    out
}

/// Compares the library's sibling check with the oracle on one leaf set.
pub fn sibling_agrees(leaves: &[Chord]) -> Result<(), String> {
    let m = grid_modulus(leaves.iter().flat_map(|l| [l.a(), l.b()]));
    let lam = Lamination::new(leaves.iter().cloned(), DegreeMap::CUBIC).map_err(|e| e.to_string())?;
    let got = report_as_grid(&capture_atlas::lamina::check_sibling_invariant(&lam), m);
    let grid: Vec<GridChord> = leaves.iter().map(|l| grid_chord(l, m)).collect();
    let want = sibling_oracle(&grid, m);
    if got == want {
        Ok(())
    } else {
        Err(format!("{leaves:?}: library {got:?}, oracle {want:?}"))
    }
}

pub fn grid_leaves(set: &[GridChord], q: u128) -> Vec<Chord> {
    set.iter().map(|&(i, j)| Chord::frac((i as i64, q as i64), (j as i64, q as i64))).collect()
}
