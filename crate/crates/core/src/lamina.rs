//! Exact combinatorics of chords, laminations and gaps under the angle
//! multiplication map `σ_d(x) = d·x mod 1` on the circle `ℝ/ℤ`.
//!
//! Angles are exact rationals. Floating point never enters this module, so
//! crossing, criticality and periodicity are decided exactly.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// A point of `ℝ/ℤ` stored as a reduced fraction in `[0, 1)`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Angle(BigRational);

impl Angle {
    pub fn zero() -> Self {
        Angle(BigRational::zero())
    }

    /// Builds `num/den`, rejecting zero denominators and values outside `[0, 1)`.
    pub fn new(num: impl Into<BigInt>, den: impl Into<BigInt>) -> Result<Self> {
        let den = den.into();
        if den.is_zero() {
            return Err(Error::input("zero denominator"));
        }
        let r = BigRational::new(num.into(), den);
        if r.is_negative() || r >= BigRational::one() {
            return Err(Error::input(format!("angle {r} outside [0,1)")));
        }
        Ok(Angle(r))
    }

    /// Reduces an arbitrary rational modulo 1.
    pub fn wrap(r: BigRational) -> Self {
        let f = r.clone() - r.floor();
        Angle(f)
    }

    /// Shorthand for small literals; panics on invalid input.
    pub fn frac(num: i64, den: i64) -> Self {
        Angle::new(num, den).expect("invalid angle literal")
    }

    pub fn as_ratio(&self) -> &BigRational {
        &self.0
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }

    /// Counterclockwise arc length from `self` to `other`, in `[0, 1)`.
    pub fn arc_to(&self, other: &Angle) -> BigRational {
        let diff = other.0.clone() - self.0.clone();
        if diff.is_negative() {
            diff + BigRational::one()
        } else {
            diff
        }
    }

    pub fn add(&self, r: &BigRational) -> Angle {
        Angle::wrap(self.0.clone() + r)
    }
}

impl fmt::Display for Angle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_zero() {
            write!(f, "0")
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl fmt::Debug for Angle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl FromStr for Angle {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::input(format!("malformed angle '{s}'"));
        match s.split_once('/') {
            Some((p, q)) => {
                let p: BigInt = p.trim().parse().map_err(|_| bad())?;
                let q: BigInt = q.trim().parse().map_err(|_| bad())?;
                if !q.is_positive() {
                    return Err(bad());
                }
                Angle::new(p, q)
            }
            None => {
                let p: BigInt = s.parse().map_err(|_| bad())?;
                Angle::new(p, 1)
            }
        }
    }
}

impl Serialize for Angle {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Angle {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// The degree `d ≥ 2` of `σ_d`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DegreeMap(u32);

impl DegreeMap {
    pub const CUBIC: DegreeMap = DegreeMap(3);

    pub fn new(d: u32) -> Result<Self> {
        if d < 2 {
            return Err(Error::input(format!("degree {d} < 2")));
        }
        Ok(DegreeMap(d))
    }

    pub fn get(self) -> u32 {
        self.0
    }
}

/// `σ_d(x) = d·x mod 1`.
pub fn sigma(x: &Angle, d: DegreeMap) -> Angle {
    let den = x.denom().clone();
    let num = (x.numer() * BigInt::from(d.0)).mod_floor(&den);
    Angle(BigRational::new(num, den))
}

/// `σ_d^n(x)`.
pub fn sigma_iter(x: &Angle, d: DegreeMap, n: usize) -> Angle {
    let den = x.denom().clone();
    let m = BigInt::from(d.0).modpow(&BigInt::from(n), &den);
    Angle(BigRational::new((x.numer() * m).mod_floor(&den), den))
}

/// Preperiod and period of a rational angle under `σ_d`.
///
/// Every rational angle is eventually periodic, so this always terminates; the
/// orbit has at most `denominator` distinct points.
pub fn orbit_type(x: &Angle, d: DegreeMap) -> (usize, usize) {
    let mut seen: BTreeMap<Angle, usize> = BTreeMap::new();
    let mut cur = x.clone();
    let mut k = 0usize;
    loop {
        if let Some(&j) = seen.get(&cur) {
            return (j, k - j);
        }
        seen.insert(cur.clone(), k);
        cur = sigma(&cur, d);
        k += 1;
    }
}

/// Unordered pair of angles, stored with `a ≤ b`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Chord {
    a: Angle,
    b: Angle,
}

impl Chord {
    pub fn new(x: Angle, y: Angle) -> Self {
        if x <= y {
            Chord { a: x, b: y }
        } else {
            Chord { a: y, b: x }
        }
    }

    pub fn frac(p: (i64, i64), q: (i64, i64)) -> Self {
        Chord::new(Angle::frac(p.0, p.1), Angle::frac(q.0, q.1))
    }

    pub fn a(&self) -> &Angle {
        &self.a
    }

    pub fn b(&self) -> &Angle {
        &self.b
    }

    pub fn is_degenerate(&self) -> bool {
        self.a == self.b
    }

    pub fn image(&self, d: DegreeMap) -> Chord {
        Chord::new(sigma(&self.a, d), sigma(&self.b, d))
    }

    pub fn has_endpoint(&self, x: &Angle) -> bool {
        &self.a == x || &self.b == x
    }

    fn shares_endpoint(&self, other: &Chord) -> bool {
        other.has_endpoint(&self.a) || other.has_endpoint(&self.b)
    }
}

impl fmt::Display for Chord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-{}", self.a, self.b)
    }
}

impl fmt::Debug for Chord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl Serialize for Chord {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        (&self.a, &self.b).serialize(s)
    }
}

/// Whether two chords meet in the open disk. Chords sharing an endpoint never
/// cross, and a degenerate chord crosses nothing.
pub fn chords_cross(c1: &Chord, c2: &Chord) -> bool {
    if c1.is_degenerate() || c2.is_degenerate() || c1.shares_endpoint(c2) {
        return false;
    }
    let inside = |x: &Angle| &c1.a < x && x < &c1.b;
    inside(&c2.a) != inside(&c2.b)
}

/// Four distinct endpoints and no crossing.
pub fn chords_disjoint(c1: &Chord, c2: &Chord) -> bool {
    !c1.shares_endpoint(c2) && !chords_cross(c1, c2)
}

pub fn is_critical(c: &Chord, d: DegreeMap) -> bool {
    !c.is_degenerate() && sigma(&c.a, d) == sigma(&c.b, d)
}

/// A finite set of pairwise non-crossing non-degenerate leaves.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Lamination {
    leaves: BTreeSet<Chord>,
    degree: DegreeMap,
}

impl Lamination {
    /// Degenerate chords are dropped; crossing leaves are rejected.
    pub fn new(leaves: impl IntoIterator<Item = Chord>, degree: DegreeMap) -> Result<Self> {
        let leaves: BTreeSet<Chord> = leaves.into_iter().filter(|c| !c.is_degenerate()).collect();
        let v: Vec<&Chord> = leaves.iter().collect();
        for i in 0..v.len() {
            for j in i + 1..v.len() {
                if chords_cross(v[i], v[j]) {
                    return Err(Error::CrossingLeaves(v[i].to_string(), v[j].to_string()));
                }
            }
        }
        Ok(Lamination { leaves, degree })
    }

    pub fn empty(degree: DegreeMap) -> Self {
        Lamination { leaves: BTreeSet::new(), degree }
    }

    pub fn leaves(&self) -> &BTreeSet<Chord> {
        &self.leaves
    }

    pub fn degree(&self) -> DegreeMap {
        self.degree
    }

    pub fn len(&self) -> usize {
        self.leaves.len()
    }

    pub fn is_empty(&self) -> bool {
        self.leaves.is_empty()
    }

    /// Non-degenerate images of the leaves. The image of a finite lamination
    /// need not be non-crossing in general, so a plain set is returned.
    pub fn image_leaves(&self) -> BTreeSet<Chord> {
        self.leaves
            .iter()
            .map(|c| c.image(self.degree))
            .filter(|c| !c.is_degenerate())
            .collect()
    }

    /// Parses the text format: a `d=<degree>` header line, then one leaf per
    /// line as two angles `p/q r/s`; `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self> {
        let mut degree = None;
        let mut leaves = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let perr = |msg: String| Error::Parse { line: i + 1, msg };
            if let Some(rest) = line.strip_prefix("d=") {
                if degree.is_some() {
                    return Err(perr("duplicate degree header".into()));
                }
                let d: u32 = rest.trim().parse().map_err(|_| perr(format!("bad degree '{rest}'")))?;
                degree = Some(DegreeMap::new(d).map_err(|e| perr(e.to_string()))?);
                continue;
            }
            let parts: Vec<&str> = line.split_whitespace().collect();
            if parts.len() != 2 {
                return Err(perr(format!("expected two angles, got '{line}'")));
            }
            let a: Angle = parts[0].parse().map_err(|e: Error| perr(e.to_string()))?;
            let b: Angle = parts[1].parse().map_err(|e: Error| perr(e.to_string()))?;
            leaves.push(Chord::new(a, b));
        }
        let degree = degree.ok_or(Error::Parse { line: 0, msg: "missing 'd=' header".into() })?;
        Lamination::new(leaves, degree)
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("d={}\n", self.degree.0);
        for c in &self.leaves {
            s.push_str(&format!("{} {}\n", c.a, c.b));
        }
        s
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum SiblingCondition {
    /// (1) the image of each leaf is a leaf (degenerate images always are).
    ImageClosure,
    /// (2) each leaf has a preimage chord compatible with the set.
    PreimageExistence,
    /// (3) each leaf with non-degenerate image has `d` pairwise disjoint siblings.
    DisjointSiblings,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SiblingViolation {
    pub condition: SiblingCondition,
    pub leaf: Chord,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SiblingReport {
    pub pass: bool,
    pub degree: u32,
    pub violations: Vec<SiblingViolation>,
}

/// All `σ_d`-preimages of an angle.
pub fn preimages(x: &Angle, d: DegreeMap) -> Vec<Angle> {
    let dd = BigInt::from(d.0);
    (0..d.0)
        .map(|k| Angle(BigRational::new(x.numer() + x.denom() * BigInt::from(k), x.denom() * &dd)))
        .collect()
}

/// Sibling-invariance restricted to a finite leaf set.
///
/// Condition (2) asks for a chord `ℓ₁` with `σ_d(ℓ₁) = ℓ` that crosses no leaf
/// of the set. Requiring `ℓ₁` to be listed would fail every finite set that
/// contains a non-periodic leaf.
pub fn check_sibling_invariant(lam: &Lamination) -> SiblingReport {
    let d = lam.degree;
    let mut violations = Vec::new();
    let leaves: Vec<&Chord> = lam.leaves.iter().collect();
    let images: Vec<Chord> = leaves.iter().map(|c| c.image(d)).collect();

    for (l, img) in leaves.iter().zip(&images) {
        if !img.is_degenerate() && !lam.leaves.contains(img) {
            violations.push(SiblingViolation { condition: SiblingCondition::ImageClosure, leaf: (*l).clone() });
        }
    }

    for l in &leaves {
        if !has_compatible_preimage(l, lam) {
            violations.push(SiblingViolation { condition: SiblingCondition::PreimageExistence, leaf: (*l).clone() });
        }
    }

    for (i, l) in leaves.iter().enumerate() {
        if images[i].is_degenerate() {
            continue;
        }
        let siblings: Vec<&Chord> = leaves
            .iter()
            .enumerate()
            .filter(|&(j, s)| j != i && images[j] == images[i] && chords_disjoint(l, s))
            .map(|(_, s)| *s)
            .collect();
        if max_disjoint(&siblings) + 1 < d.0 as usize {
            violations.push(SiblingViolation { condition: SiblingCondition::DisjointSiblings, leaf: (*l).clone() });
        }
    }

    violations.sort_by(|x, y| (x.condition, &x.leaf).cmp(&(y.condition, &y.leaf)));
    SiblingReport { pass: violations.is_empty(), degree: d.0, violations }
}

fn has_compatible_preimage(l: &Chord, lam: &Lamination) -> bool {
    let d = lam.degree;
    let pa = preimages(&l.a, d);
    let pb = preimages(&l.b, d);
    pa.iter().any(|x| {
        pb.iter().any(|y| {
            let c = Chord::new(x.clone(), y.clone());
            lam.leaves.iter().all(|m| !chords_cross(&c, m))
        })
    })
}

/// Size of the largest pairwise-disjoint subfamily.
fn max_disjoint(chords: &[&Chord]) -> usize {
    fn go(chords: &[&Chord], chosen: &mut Vec<usize>, start: usize, best: &mut usize) {
        *best = (*best).max(chosen.len());
        if chosen.len() + (chords.len() - start) <= *best {
            return;
        }
        for i in start..chords.len() {
            if chosen.iter().all(|&j| chords_disjoint(chords[i], chords[j])) {
                chosen.push(i);
                go(chords, chosen, i + 1, best);
                chosen.pop();
            }
        }
    }
    let mut best = 0;
    go(chords, &mut Vec::new(), 0, &mut best);
    best
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum AxiomStatus {
    Pass,
    Fail,
    Skipped,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AxiomCheck {
    pub axiom: String,
    pub status: AxiomStatus,
    pub witnesses: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AxiomsReport {
    pub pass: bool,
    pub checks: Vec<AxiomCheck>,
}

impl AxiomsReport {
    pub fn status(&self, axiom: &str) -> Option<AxiomStatus> {
        self.checks.iter().find(|c| c.axiom == axiom).map(|c| c.status)
    }
}

/// Checks laminational-equivalence axioms E1-E3 and invariance D1-D2 for a
/// finite family of classes. Points not listed are implicit singleton classes.
pub fn check_equivalence_axioms(classes: &[Vec<Angle>], d: DegreeMap) -> Result<AxiomsReport> {
    let mut sets: Vec<BTreeSet<Angle>> = Vec::with_capacity(classes.len());
    let mut owner: BTreeMap<Angle, usize> = BTreeMap::new();
    for (i, c) in classes.iter().enumerate() {
        if c.is_empty() {
            return Err(Error::input(format!("class {i} is empty")));
        }
        let s: BTreeSet<Angle> = c.iter().cloned().collect();
        for x in &s {
            if owner.insert(x.clone(), i).is_some() {
                return Err(Error::OverlappingClasses(x.to_string()));
            }
        }
        sets.push(s);
    }

    let show = |s: &BTreeSet<Angle>| {
        let v: Vec<String> = s.iter().map(|x| x.to_string()).collect();
        format!("{{{}}}", v.join(","))
    };

    let mut e2 = Vec::new();
    for i in 0..sets.len() {
        for j in i + 1..sets.len() {
            if linked(&sets[i], &sets[j]) {
                e2.push(format!("{} {}", show(&sets[i]), show(&sets[j])));
            }
        }
    }

    let mut d1 = Vec::new();
    let mut d2 = Vec::new();
    for s in &sets {
        let img: BTreeSet<Angle> = s.iter().map(|x| sigma(x, d)).collect();
        let ok = if img.len() == 1 {
            let y = img.iter().next().unwrap();
            owner.get(y).is_none_or(|&k| sets[k].len() == 1)
        } else {
            let first = img.iter().next().unwrap();
            owner.get(first).is_some_and(|&k| sets[k] == img)
        };
        if !ok {
            d1.push(format!("{} -> {}", show(s), show(&img)));
        }
        if !preserves_consecutive(s, &img, d) {
            d2.push(show(s));
        }
    }

    let status = |w: &Vec<String>| if w.is_empty() { AxiomStatus::Pass } else { AxiomStatus::Fail };
    let checks = vec![
        AxiomCheck { axiom: "E1".into(), status: AxiomStatus::Skipped, witnesses: vec![] },
        AxiomCheck { axiom: "E2".into(), status: status(&e2), witnesses: e2 },
        AxiomCheck { axiom: "E3".into(), status: AxiomStatus::Pass, witnesses: vec![] },
        AxiomCheck { axiom: "D1".into(), status: status(&d1), witnesses: d1 },
        AxiomCheck { axiom: "D2".into(), status: status(&d2), witnesses: d2 },
    ];
    let pass = checks.iter().all(|c| c.status != AxiomStatus::Fail);
    Ok(AxiomsReport { pass, checks })
}

/// Disjoint finite sets have linked hulls iff some pair of complementary arcs
/// of `a` both contain points of `b`.
fn linked(a: &BTreeSet<Angle>, b: &BTreeSet<Angle>) -> bool {
    if a.len() < 2 || b.len() < 2 {
        return false;
    }
    let av: Vec<&Angle> = a.iter().collect();
    let arc_of = |x: &Angle| av.iter().filter(|&&v| v < x).count() % av.len();
    let first = arc_of(b.iter().next().unwrap());
    b.iter().any(|x| arc_of(x) != first)
}

/// Cyclically consecutive triples of `s` map to consecutive triples of `img`.
fn preserves_consecutive(s: &BTreeSet<Angle>, img: &BTreeSet<Angle>, d: DegreeMap) -> bool {
    if s.len() < 3 || img.len() == 1 {
        return true;
    }
    let iv: Vec<&Angle> = img.iter().collect();
    let succ = |y: &Angle| {
        let k = iv.iter().position(|&v| v == y).unwrap();
        iv[(k + 1) % iv.len()].clone()
    };
    let sv: Vec<Angle> = s.iter().map(|x| sigma(x, d)).collect();
    let n = sv.len();
    (0..n).all(|i| {
        let (p, q, r) = (&sv[i], &sv[(i + 1) % n], &sv[(i + 2) % n]);
        &succ(p) == q && &succ(q) == r
    })
}

/// A complementary region of a finite lamination, presented by its boundary
/// points on the circle and its boundary leaves.
///
/// Between consecutive vertices the boundary is either a listed edge or one
/// of `circle_arcs`, given counterclockwise as `(from, to)`. `boundary_arcs[i]`
/// is the length of the circle arc cut off by `edges[i]` on the side away from
/// the gap.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Gap {
    pub vertices: Vec<Angle>,
    pub edges: Vec<Chord>,
    pub boundary_arcs: Vec<BigRationalLen>,
    pub circle_arcs: Vec<(Angle, Angle)>,
}

/// Exact arc length, serialized as `p/q`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct BigRationalLen(pub BigRational);

impl Serialize for BigRationalLen {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(&self.0)
    }
}

impl Gap {
    /// The whole disk: no vertices, no edges.
    pub fn whole_disk() -> Self {
        Gap { vertices: vec![], edges: vec![], boundary_arcs: vec![], circle_arcs: vec![] }
    }

    /// A finite polygon whose every side is an edge.
    pub fn polygon(vertices: impl IntoIterator<Item = Angle>) -> Result<Self> {
        let v: Vec<Angle> = vertices.into_iter().collect::<BTreeSet<_>>().into_iter().collect();
        if v.len() < 2 {
            return Err(Error::input("polygon needs at least two vertices"));
        }
        let n = v.len();
        let mut edges = Vec::new();
        let mut arcs = Vec::new();
        for i in 0..n {
            let (x, y) = (&v[i], &v[(i + 1) % n]);
            edges.push(Chord::new(x.clone(), y.clone()));
            arcs.push(BigRationalLen(x.arc_to(y)));
        }
        if n == 2 {
            edges.truncate(1);
            arcs.truncate(1);
        }
        Ok(Gap { vertices: v, edges, boundary_arcs: arcs, circle_arcs: vec![] })
    }

    pub fn is_whole_disk(&self) -> bool {
        self.vertices.is_empty()
    }

    /// For each side `(v_i, v_{i+1})`, whether it is an edge (true) or a circle
    /// arc belonging to the gap (false).
    pub fn side_is_edge(&self) -> Vec<bool> {
        let n = self.vertices.len();
        (0..n)
            .map(|i| {
                let (x, y) = (&self.vertices[i], &self.vertices[(i + 1) % n]);
                !self.circle_arcs.iter().any(|(s, t)| s == x && t == y)
            })
            .collect()
    }

    fn is_triangle_of_edges(&self) -> bool {
        self.vertices.len() == 3 && self.side_is_edge().iter().all(|&e| e)
    }
}

/// Complementary regions of a finite lamination, one per face of the chord
/// arrangement (`#leaves + 1` of them).
pub fn gaps(lam: &Lamination) -> Vec<Gap> {
    if lam.leaves.is_empty() {
        return vec![Gap::whole_disk()];
    }
    let verts: Vec<Angle> = lam
        .leaves
        .iter()
        .flat_map(|c| [c.a.clone(), c.b.clone()])
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let n = verts.len();
    let index: BTreeMap<&Angle, usize> = verts.iter().enumerate().map(|(i, v)| (v, i)).collect();

    // Directed half-edges: (from, to, is_chord). Arcs run counterclockwise
    // from a vertex to the next one.
    let mut half: Vec<(usize, usize, bool)> = (0..n).map(|i| (i, (i + 1) % n, false)).collect();
    for c in &lam.leaves {
        let (i, j) = (index[&c.a], index[&c.b]);
        half.push((i, j, true));
        half.push((j, i, true));
    }
    let mut out: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (h, &(u, _, _)) in half.iter().enumerate() {
        out[u].push(h);
    }
    // Direction key at a vertex v of an outgoing edge to w: (w - v) mod 1, with
    // the arc counted as 0. Arriving by an arc has key 1; arriving by a chord
    // from u has key (u - v) mod 1. The face continues along the outgoing edge
    // with the largest key strictly below the arrival key.
    let one = BigRational::one();
    let key_out = |h: usize| -> BigRational {
        let (u, w, chord) = half[h];
        if chord {
            verts[u].arc_to(&verts[w])
        } else {
            BigRational::zero()
        }
    };
    let key_in = |h: usize| -> BigRational {
        let (u, w, chord) = half[h];
        if chord {
            verts[w].arc_to(&verts[u])
        } else {
            one.clone()
        }
    };
    let next = |h: usize| -> usize {
        let v = half[h].1;
        let kin = key_in(h);
        out[v]
            .iter()
            .copied()
            .filter(|&g| key_out(g) < kin)
            .max_by(|&x, &y| key_out(x).cmp(&key_out(y)))
            .expect("arc edge always has key 0")
    };

    let mut used = vec![false; half.len()];
    let mut result = Vec::new();
    for start in 0..half.len() {
        if used[start] {
            continue;
        }
        let mut h = start;
        let mut vs = BTreeSet::new();
        let mut edges = Vec::new();
        let mut arcs = Vec::new();
        let mut circle_arcs = Vec::new();
        loop {
            used[h] = true;
            let (u, w, chord) = half[h];
            vs.insert(verts[u].clone());
            if chord {
                edges.push(Chord::new(verts[u].clone(), verts[w].clone()));
                arcs.push(BigRationalLen(verts[u].arc_to(&verts[w])));
            } else {
                circle_arcs.push((verts[u].clone(), verts[w].clone()));
            }
            h = next(h);
            if h == start {
                break;
            }
        }
        result.push(Gap { vertices: vs.into_iter().collect(), edges, boundary_arcs: arcs, circle_arcs });
    }
    result
}

/// Maximal number of pairwise disjoint critical chords inside the gap and off
/// its boundary, plus one; a triangle whose edges are all critical has degree 3.
///
/// Chord endpoints range over the gap's vertices and, on boundary arcs, over
/// the translates by `k/d` of vertices and arc midpoints (a fine grid for the
/// whole disk). For polygons every candidate is a vertex, so the count is exact.
pub fn gap_degree(g: &Gap, d: DegreeMap) -> u32 {
    if g.is_triangle_of_edges() && g.edges.iter().all(|e| is_critical(e, d)) {
        return 3;
    }
    let cands = candidate_points(g, d);
    let boundary: BTreeSet<&Chord> = g.edges.iter().collect();
    let mut chords = Vec::new();
    for i in 0..cands.len() {
        for j in i + 1..cands.len() {
            let c = Chord::new(cands[i].clone(), cands[j].clone());
            if is_critical(&c, d) && !boundary.contains(&c) {
                chords.push(c);
            }
        }
    }
    let refs: Vec<&Chord> = chords.iter().collect();
    max_disjoint(&refs) as u32 + 1
}

fn candidate_points(g: &Gap, d: DegreeMap) -> Vec<Angle> {
    let dd = d.0 as i64;
    if g.is_whole_disk() {
        let n = 2 * dd * dd;
        return (0..n).map(|j| Angle::frac(j, n)).collect();
    }
    let mut pts: BTreeSet<Angle> = g.vertices.iter().cloned().collect();
    let arcs: Vec<(Angle, BigRational)> = g
        .circle_arcs
        .iter()
        .map(|(s, t)| {
            let len = s.arc_to(t);
            (s.clone(), if len.is_zero() { BigRational::one() } else { len })
        })
        .collect();
    let on_arc = |x: &Angle| arcs.iter().any(|(s, len)| {
        let t = s.arc_to(x);
        t.is_positive() && &t < len
    });
    let mut seeds: Vec<Angle> = g.vertices.clone();
    for (s, len) in &arcs {
        seeds.push(s.add(&(len / BigRational::from_integer(2.into()))));
    }
    for s in &seeds {
        for k in 0..dd {
            let x = s.add(&BigRational::new(k.into(), dd.into()));
            if on_arc(&x) {
                pts.insert(x);
            }
        }
    }
    pts.into_iter().collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum MajorType {
    RegularCritical,
    Periodic { period: usize },
}

const MAJOR_ORBIT_CAP: usize = 1 << 20;

/// The unique edge with the longest hidden arc, and whether it is critical or
/// periodic under `σ_3`.
pub fn quadratic_gap_major(g: &Gap) -> Result<(Chord, MajorType)> {
    if g.edges.is_empty() {
        return Err(Error::input("gap has no edges"));
    }
    let mut order: Vec<usize> = (0..g.edges.len()).collect();
    order.sort_by(|&i, &j| g.boundary_arcs[j].cmp(&g.boundary_arcs[i]));
    let top = order[0];
    if order.len() > 1 && g.boundary_arcs[order[1]] == g.boundary_arcs[top] {
        return Err(Error::MajorTie(g.edges[top].to_string(), g.edges[order[1]].to_string()));
    }
    if g.boundary_arcs[top].0 < BigRational::new(1.into(), 3.into()) {
        return Err(Error::MajorTooShort(g.boundary_arcs[top].0.to_string()));
    }
    let major = g.edges[top].clone();
    let d = DegreeMap::CUBIC;
    if is_critical(&major, d) {
        return Ok((major, MajorType::RegularCritical));
    }
    let (_, pa) = orbit_type(major.a(), d);
    let (_, pb) = orbit_type(major.b(), d);
    let bound = (2 * pa.lcm(&pb)).min(MAJOR_ORBIT_CAP);
    let mut c = major.clone();
    for k in 1..=bound {
        c = c.image(d);
        if c == major {
            return Ok((major, MajorType::Periodic { period: k }));
        }
    }
    Err(Error::input(format!("major {major} is neither critical nor periodic")))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn a(p: i64, q: i64) -> Angle {
        Angle::frac(p, q)
    }

    fn lam(leaves: &[((i64, i64), (i64, i64))]) -> Lamination {
        Lamination::new(leaves.iter().map(|&(x, y)| Chord::frac(x, y)), DegreeMap::CUBIC).unwrap()
    }

    #[test]
    fn sigma_examples() {
        let d = DegreeMap::CUBIC;
        assert_eq!(sigma(&a(0, 1), d), a(0, 1));
        assert_eq!(sigma(&a(1, 4), d), a(3, 4));
        assert_eq!(sigma(&a(2, 3), d), a(0, 1));
        assert_eq!(sigma_iter(&a(1, 8), d, 2), a(1, 8));
    }

    #[test]
    fn angle_parsing() {
        assert_eq!("2/4".parse::<Angle>().unwrap(), a(1, 2));
        assert_eq!("0".parse::<Angle>().unwrap(), Angle::zero());
        assert!("1".parse::<Angle>().is_err());
        assert!("1/0".parse::<Angle>().is_err());
        assert!("-1/3".parse::<Angle>().is_err());
    }

    #[test]
    fn crossing_examples() {
        assert!(chords_cross(&Chord::frac((0, 1), (1, 2)), &Chord::frac((1, 4), (3, 4))));
        assert!(!chords_cross(&Chord::frac((0, 1), (1, 4)), &Chord::frac((1, 2), (3, 4))));
        assert!(!chords_cross(&Chord::frac((0, 1), (1, 2)), &Chord::frac((1, 2), (3, 4))));
    }

    #[test]
    fn critical_examples() {
        let d3 = DegreeMap::CUBIC;
        let d2 = DegreeMap::new(2).unwrap();
        assert!(is_critical(&Chord::frac((0, 1), (1, 3)), d3));
        assert!(!is_critical(&Chord::frac((0, 1), (1, 2)), d3));
        assert!(is_critical(&Chord::frac((0, 1), (1, 2)), d2));
    }

    #[test]
    fn sibling_examples() {
        assert!(check_sibling_invariant(&Lamination::empty(DegreeMap::CUBIC)).pass);
        let l = lam(&[((0, 1), (1, 2)), ((1, 6), (1, 3)), ((2, 3), (5, 6))]);
        let r = check_sibling_invariant(&l);
        assert!(r.pass, "{r:?}");
        let r = check_sibling_invariant(&lam(&[((1, 6), (1, 3))]));
        assert!(!r.pass);
        assert!(r.violations.iter().any(|v| v.condition == SiblingCondition::ImageClosure));
    }

    #[test]
    fn sibling_condition_three_names_leaf() {
        let r = check_sibling_invariant(&lam(&[((0, 1), (1, 2))]));
        assert_eq!(
            r.violations,
            vec![SiblingViolation { condition: SiblingCondition::DisjointSiblings, leaf: Chord::frac((0, 1), (1, 2)) }]
        );
    }

    #[test]
    fn axiom_examples() {
        let d = DegreeMap::CUBIC;
        let r = check_equivalence_axioms(&[vec![a(0, 1)], vec![a(1, 2)]], d).unwrap();
        assert!(r.pass);
        assert_eq!(r.status("E1"), Some(AxiomStatus::Skipped));
        let r = check_equivalence_axioms(&[vec![a(0, 1), a(1, 2)]], d).unwrap();
        assert!(r.pass);
        let r = check_equivalence_axioms(&[vec![a(0, 1), a(1, 4)], vec![a(1, 2), a(3, 4)]], d).unwrap();
        assert_eq!(r.status("D1"), Some(AxiomStatus::Fail));
        assert!(check_equivalence_axioms(&[vec![a(0, 1)], vec![a(0, 1), a(1, 2)]], d).is_err());
    }

    #[test]
    fn axioms_detect_linking_and_order() {
        let d = DegreeMap::CUBIC;
        let r = check_equivalence_axioms(&[vec![a(0, 1), a(1, 2)], vec![a(1, 4), a(3, 4)]], d).unwrap();
        assert_eq!(r.status("E2"), Some(AxiomStatus::Fail));
        // The rotational triple {1/13, 3/13, 9/13} maps to itself preserving order.
        let r = check_equivalence_axioms(&[vec![a(1, 13), a(3, 13), a(9, 13)]], d).unwrap();
        assert!(r.pass, "{r:?}");
        // {0, 1/3, 1/2} maps onto {0, 1/2} two-to-one on one side only.
        let r = check_equivalence_axioms(&[vec![a(0, 1), a(1, 3), a(1, 2)]], d).unwrap();
        assert_eq!(r.status("D2"), Some(AxiomStatus::Fail));
    }

    #[test]
    fn gap_examples() {
        let g = gaps(&Lamination::empty(DegreeMap::CUBIC));
        assert_eq!(g, vec![Gap::whole_disk()]);

        let g = gaps(&lam(&[((0, 1), (1, 2))]));
        assert_eq!(g.len(), 2);
        for gap in &g {
            assert_eq!(gap.vertices, vec![a(0, 1), a(1, 2)]);
            assert_eq!(gap.boundary_arcs, vec![BigRationalLen(BigRational::new(1.into(), 2.into()))]);
        }

        let g = gaps(&lam(&[((0, 1), (1, 2)), ((1, 6), (1, 3)), ((2, 3), (5, 6))]));
        assert_eq!(g.len(), 4);
    }

    #[test]
    fn nested_gap_has_both_edges() {
        let g = gaps(&lam(&[((0, 1), (1, 2)), ((1, 6), (1, 3))]));
        let mid = g.iter().find(|g| g.vertices.len() == 4).unwrap();
        assert_eq!(mid.edges.len(), 2);
        assert_eq!(mid.side_is_edge(), vec![false, true, false, true]);
    }

    #[test]
    fn degree_examples() {
        let d = DegreeMap::CUBIC;
        assert_eq!(gap_degree(&Gap::whole_disk(), d), 3);
        let tri = Gap::polygon([a(0, 1), a(1, 3), a(2, 3)]).unwrap();
        assert_eq!(gap_degree(&tri, d), 3);
        let quad = Gap::polygon([a(0, 1), a(1, 10), a(1, 2), a(6, 10)]).unwrap();
        assert_eq!(gap_degree(&quad, d), 1);
        for dd in 2..=4 {
            assert_eq!(gap_degree(&Gap::whole_disk(), DegreeMap::new(dd).unwrap()), dd);
        }
    }

    #[test]
    fn half_disk_is_quadratic() {
        let g = gaps(&lam(&[((0, 1), (1, 2))]));
        for gap in &g {
            assert_eq!(gap_degree(gap, DegreeMap::CUBIC), 2);
        }
    }

    fn gap_with(vertices: &[(i64, i64)], arcs: &[(i64, i64)]) -> Gap {
        let v: Vec<Angle> = vertices.iter().map(|&(p, q)| a(p, q)).collect();
        let n = v.len();
        Gap {
            edges: (0..n).map(|i| Chord::new(v[i].clone(), v[(i + 1) % n].clone())).collect(),
            boundary_arcs: arcs.iter().map(|&(p, q)| BigRationalLen(BigRational::new(p.into(), q.into()))).collect(),
            vertices: v,
            circle_arcs: vec![],
        }
    }

    #[test]
    fn major_examples() {
        let g = gap_with(&[(0, 1), (1, 2), (2, 3), (5, 6)], &[(1, 2), (1, 6), (1, 6), (1, 6)]);
        let (m, t) = quadratic_gap_major(&g).unwrap();
        assert_eq!(m, Chord::frac((0, 1), (1, 2)));
        assert_eq!(t, MajorType::Periodic { period: 1 });

        let g = Gap {
            vertices: vec![a(1, 3), a(2, 3)],
            edges: vec![Chord::frac((1, 3), (2, 3))],
            boundary_arcs: vec![BigRationalLen(BigRational::new(1.into(), 3.into()))],
            circle_arcs: vec![(a(2, 3), a(1, 3))],
        };
        let (m, t) = quadratic_gap_major(&g).unwrap();
        assert_eq!(m, Chord::frac((1, 3), (2, 3)));
        assert_eq!(t, MajorType::RegularCritical);

        let g = gap_with(&[(0, 1), (1, 2)], &[(1, 2), (1, 2)]);
        assert!(matches!(quadratic_gap_major(&g), Err(Error::MajorTie(..))));
        let g = Gap::polygon([a(0, 1), a(3, 10), a(1, 2), a(3, 4)]).unwrap();
        assert!(matches!(quadratic_gap_major(&g), Err(Error::MajorTooShort(_))));
    }

    #[test]
    fn text_format_round_trip() {
        let text = "# basilica-like\nd=3\n0 1/2\n1/6 1/3 # sibling\n2/3 5/6\n";
        let l = Lamination::parse(text).unwrap();
        assert_eq!(l.len(), 3);
        assert_eq!(Lamination::parse(&l.to_text()).unwrap(), l);
        assert!(matches!(Lamination::parse("0 1/2\n"), Err(Error::Parse { .. })));
        assert!(matches!(Lamination::parse("d=3\n0 1/2\n1/4 3/4\n"), Err(Error::CrossingLeaves(..))));
        assert!(matches!(Lamination::parse("d=3\n0 1/2 1/3\n"), Err(Error::Parse { line: 2, .. })));
    }

    #[test]
    fn orbit_types() {
        let d = DegreeMap::CUBIC;
        assert_eq!(orbit_type(&a(1, 8), d), (0, 2));
        assert_eq!(orbit_type(&a(1, 3), d), (1, 1));
        assert_eq!(orbit_type(&a(1, 13), d), (0, 3));
    }
}
