//! External rays of connected-Julia-set cubics, landing points of rational
//! rays, and the rational lamination they induce.
//!
//! The Böttcher coordinate is normalized to be asymptotic to the identity at
//! ∞: `φ(z) = z + b/3 + a₁/z + …` with `a₁ = (λ − b²/3)/3`, whose inverse is
//! `ψ(w) = w − b/3 − a₁/w + O(w⁻²)`. A ray point of potential `t` solves
//! `f^n(z) = ψ(e^{3^n (t + 2πiθ)})` for `n` large enough that `ψ` is accurate,
//! with the target phase taken from the exact angle `σ₃^n(θ)`.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::cubic::{escape_classify, CubicParams, EscapeStatus};
use crate::error::{Error, Result};
use crate::lamina::{chords_cross, orbit_type, sigma_iter, Angle, Chord, DegreeMap, Lamination};

#[derive(Clone, Debug)]
pub struct RayConfig {
    /// Ratio between consecutive potentials.
    pub potential_ratio: f64,
    pub t_min: f64,
    pub newton_tol: f64,
    pub newton_max: usize,
    /// Budget for the connectedness heuristic on both critical orbits.
    pub escape_iter: usize,
    /// `|multiplier| ≤ 1 + parabolic_tol` flags a landing as parabolic-suspect.
    pub parabolic_tol: f64,
}

impl Default for RayConfig {
    fn default() -> Self {
        RayConfig {
            potential_ratio: 0.85,
            t_min: 1e-6,
            newton_tol: 1e-12,
            newton_max: 60,
            escape_iter: 2000,
            parabolic_tol: 1e-6,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ExternalRay {
    pub angle: Angle,
    /// Ordered by decreasing potential.
    pub points: Vec<Complex64>,
    pub potentials: Vec<f64>,
    /// Set when Newton failed before reaching `t_min`; the polyline is truncated.
    pub failure: Option<String>,
}

impl ExternalRay {
    pub fn end(&self) -> Complex64 {
        *self.points.last().expect("rays have at least one point")
    }

    /// CSV with columns `potential,re,im`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("potential,re,im\n");
        for (t, z) in self.potentials.iter().zip(&self.points) {
            out.push_str(&format!("{t:e},{:.17e},{:.17e}\n", z.re, z.im));
        }
        out
    }
}

/// Minimal `|w|` at which the truncated `ψ` is used.
fn bottcher_radius(p: &CubicParams) -> f64 {
    1e3 * p.escape_radius().powi(2)
}

fn psi(p: &CubicParams, w: Complex64) -> Complex64 {
    let a1 = (p.lambda - p.b * p.b / 3.0) / 3.0;
    w - p.b / 3.0 - a1 / w
}

fn require_connected(p: &CubicParams, cfg: &RayConfig) -> Result<()> {
    let r = escape_classify(p, cfg.escape_iter, p.escape_radius());
    if r.status != EscapeStatus::BothBounded {
        return Err(Error::Domain(format!("critical orbits do not stay bounded ({:?})", r.status)));
    }
    Ok(())
}

/// Newton on `Log(f^n(z)/W) = 0` in the variable `log z`; the equation is
/// close to linear there wherever the Böttcher coordinate dominates.
fn solve_level(p: &CubicParams, z0: Complex64, n: usize, target: Complex64, cfg: &RayConfig) -> Option<Complex64> {
    let mut z = z0;
    for _ in 0..cfg.newton_max {
        let mut w = z;
        let mut dw = Complex64::new(1.0, 0.0);
        for _ in 0..n {
            dw *= p.deriv(w);
            w = p.eval(w);
        }
        if !w.is_finite() || !dw.is_finite() || dw.norm() == 0.0 {
            return None;
        }
        // Newton in u = log z: u ← u − F(u)/F'(u), F' = z (f^n)'(z)/f^n(z).
        let du = (w / target).ln() * w / (dw * z);
        z *= (-du).exp();
        if !z.is_finite() {
            return None;
        }
        if du.norm() <= cfg.newton_tol {
            return Some(z);
        }
    }
    None
}

pub fn trace_ray(p: &CubicParams, angle: &Angle, cfg: &RayConfig) -> Result<ExternalRay> {
    if !(cfg.t_min > 0.0) || !(cfg.potential_ratio > 0.0 && cfg.potential_ratio < 1.0) {
        return Err(Error::input("ray potentials need t_min > 0 and a ratio in (0, 1)"));
    }
    require_connected(p, cfg)?;
    Ok(trace_unchecked(p, angle, cfg))
}

fn trace_unchecked(p: &CubicParams, angle: &Angle, cfg: &RayConfig) -> ExternalRay {
    let big = bottcher_radius(p).ln();
    let d = DegreeMap::CUBIC;
    let mut phases: Vec<f64> = vec![angle.to_f64()];
    let mut phase = |n: usize| -> f64 {
        while phases.len() <= n {
            let k = phases.len();
            phases.push(sigma_iter(angle, d, k).to_f64());
        }
        phases[n]
    };
    let t0 = big;
    let mut z = psi(p, Complex64::from_polar(t0.exp(), std::f64::consts::TAU * phase(0)));
    let mut ray = ExternalRay { angle: angle.clone(), points: vec![z], potentials: vec![t0], failure: None };
    let mut t = t0;
    let mut ratio = cfg.potential_ratio;
    while t > cfg.t_min {
        let t_next = (t * ratio).max(cfg.t_min);
        // Smallest n with 3^n t ≥ ln of the Böttcher radius.
        let n = ((big / t_next).ln() / 3f64.ln()).ceil().max(0.0) as usize;
        let scaled = 3f64.powi(n as i32) * t_next;
        let target = Complex64::from_polar(scaled.exp(), std::f64::consts::TAU * phase(n));
        let target = psi(p, target);
        match solve_level(p, z, n, target, cfg) {
            Some(w) => {
                z = w;
                t = t_next;
                ray.points.push(z);
                ray.potentials.push(t);
                ratio = cfg.potential_ratio;
            }
            None if ratio < 0.999 => {
                // Retry with a finer potential step.
                ratio = ratio.sqrt();
            }
            None => {
                ray.failure = Some(format!("Newton failed below potential {t:e}"));
                break;
            }
        }
    }
    ray
}

#[derive(Clone, Debug, Serialize)]
pub struct LandingRecord {
    pub angle: Angle,
    pub landing_point: Complex64,
    /// Period of the landing cycle.
    pub period: usize,
    pub preperiod: usize,
    /// `(f^period)'` at the periodic point the ray eventually lands on.
    pub multiplier: Complex64,
    /// Largest `|f(z_i) − z_{i+1}|` around the landing cycle.
    pub residual: f64,
    /// Distance from the traced ray's end to the landing point.
    pub ray_gap: f64,
    pub parabolic_suspect: bool,
}

/// Solves `f(z_i) = z_{i+1}` (indices mod k) by Newton on the whole cycle.
/// The cyclic bidiagonal system gives `δ₀ = S/(1 − M)` with `M = Π f'(z_i)`.
fn polish_cycle(p: &CubicParams, guess: &[Complex64], cfg: &RayConfig) -> Option<(Vec<Complex64>, Complex64, f64)> {
    let k = guess.len();
    let mut z = guess.to_vec();
    for _ in 0..cfg.newton_max {
        let f: Vec<Complex64> = (0..k).map(|i| p.eval(z[i]) - z[(i + 1) % k]).collect();
        let d: Vec<Complex64> = z.iter().map(|&w| p.deriv(w)).collect();
        // Linearizing z ← z + δ: δ_{i+1} = f'(z_i) δ_i + F_i, closed around the cycle.
        let mut m = Complex64::new(1.0, 0.0);
        let mut s = Complex64::new(0.0, 0.0);
        for i in 0..k {
            s = d[i] * s + f[i];
            m *= d[i];
        }
        let den = Complex64::new(1.0, 0.0) - m;
        if den.norm() == 0.0 || !den.is_finite() {
            return None;
        }
        let mut delta = vec![Complex64::new(0.0, 0.0); k];
        delta[0] = s / den;
        for i in 0..k - 1 {
            delta[i + 1] = d[i] * delta[i] + f[i];
        }
        let mut biggest: f64 = 0.0;
        for i in 0..k {
            z[i] += delta[i];
            biggest = biggest.max(delta[i].norm());
        }
        if !z.iter().all(|w| w.is_finite()) {
            return None;
        }
        if biggest <= cfg.newton_tol * (1.0 + z.iter().map(|w| w.norm()).fold(0.0, f64::max)) {
            let mult = z.iter().map(|&w| p.deriv(w)).product();
            let res = (0..k).map(|i| (p.eval(z[i]) - z[(i + 1) % k]).norm()).fold(0.0, f64::max);
            return Some((z, mult, res));
        }
    }
    None
}

/// Newton for `f(z) = y` from `z0`.
fn pull_back(p: &CubicParams, y: Complex64, z0: Complex64, cfg: &RayConfig) -> Option<Complex64> {
    let mut z = z0;
    for _ in 0..cfg.newton_max {
        let d = p.deriv(z);
        if d.norm() == 0.0 {
            return None;
        }
        let step = (p.eval(z) - y) / d;
        z -= step;
        if step.norm() <= cfg.newton_tol * (1.0 + z.norm()) {
            return Some(z);
        }
    }
    None
}

/// Lands the ray of a rational angle: the periodic tail of the orbit by
/// cycle Newton seeded at the traced ray ends, then the preperiodic part by
/// pulling back along the rays of the preceding angles.
pub fn land_rational_ray(p: &CubicParams, angle: &Angle, cfg: &RayConfig) -> Result<LandingRecord> {
    require_connected(p, cfg)?;
    land_unchecked(p, angle, cfg)
}

fn land_unchecked(p: &CubicParams, angle: &Angle, cfg: &RayConfig) -> Result<LandingRecord> {
    let d = DegreeMap::CUBIC;
    let (pre, per) = orbit_type(angle, d);
    let orbit: Vec<Angle> = (0..pre + per).map(|k| sigma_iter(angle, d, k)).collect();
    let rays: Vec<ExternalRay> = orbit.par_iter().map(|a| trace_unchecked(p, a, cfg)).collect();
    if let Some(r) = rays.iter().find(|r| r.failure.is_some()) {
        return Err(Error::Unresolved(format!(
            "ray {} truncated: {}",
            r.angle,
            r.failure.as_deref().unwrap_or_default()
        )));
    }
    let ends: Vec<Complex64> = rays.iter().map(|r| r.end()).collect();
    let (cycle, multiplier, residual) = polish_cycle(p, &ends[pre..], cfg)
        .ok_or_else(|| Error::Unresolved(format!("landing cycle of {angle} did not converge")))?;
    let mut point = cycle[0];
    for i in (0..pre).rev() {
        point = pull_back(p, point, ends[i], cfg)
            .ok_or_else(|| Error::Unresolved(format!("pull-back of {angle} did not converge")))?;
    }
    let ray_gap = (point - ends[0]).norm();
    Ok(LandingRecord {
        angle: angle.clone(),
        landing_point: point,
        period: per,
        preperiod: pre,
        multiplier,
        residual,
        ray_gap,
        parabolic_suspect: multiplier.norm() <= 1.0 + cfg.parabolic_tol,
    })
}

/// All angles `p/q` in lowest terms with `1 ≤ q ≤ q_max` (and 0).
pub fn rational_angles(q_max: u32) -> Vec<Angle> {
    let mut out = vec![Angle::zero()];
    for q in 2..=q_max as i64 {
        for num in 1..q {
            if num_integer::gcd(num, q) == 1 {
                out.push(Angle::frac(num, q));
            }
        }
    }
    out.sort();
    out
}

#[derive(Clone, Debug, Serialize)]
pub struct LaminationSample {
    pub lamination: Lamination,
    /// Clusters of at least two angles landing together, each sorted.
    pub clusters: Vec<Vec<Angle>>,
    /// Leaves whose endpoints land at distance in `[tol, 2 tol)` without
    /// being clustered.
    pub flagged: Vec<Chord>,
    /// Angles whose landing failed.
    pub unresolved: Vec<Angle>,
    pub records: Vec<LandingRecord>,
}

/// Lands every rational angle with denominator at most `q_max`, groups
/// landing points closer than `tol`, and returns the hull edges of the groups.
pub fn rational_lamination_sample(p: &CubicParams, q_max: u32, tol: f64, cfg: &RayConfig) -> Result<LaminationSample> {
    if !(tol > 0.0) {
        return Err(Error::input("cluster tolerance must be positive"));
    }
    require_connected(p, cfg)?;
    let angles = rational_angles(q_max);
    let landed: Vec<(Angle, Result<LandingRecord>)> =
        angles.par_iter().map(|a| (a.clone(), land_unchecked(p, a, cfg))).collect();
    let mut records = Vec::new();
    let mut unresolved = Vec::new();
    for (a, r) in landed {
        match r {
            Ok(rec) => records.push(rec),
            Err(_) => unresolved.push(a),
        }
    }
    let n = records.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    let mut flagged = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let dist = (records[i].landing_point - records[j].landing_point).norm();
            if dist < tol {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                parent[a.max(b)] = a.min(b);
            } else if dist < 2.0 * tol {
                flagged.push(Chord::new(records[i].angle.clone(), records[j].angle.clone()));
            }
        }
    }
    let mut groups: BTreeMap<usize, Vec<Angle>> = BTreeMap::new();
    for i in 0..n {
        let r = find(&mut parent, i);
        groups.entry(r).or_default().push(records[i].angle.clone());
    }
    let mut clusters: Vec<Vec<Angle>> = groups.into_values().filter(|g| g.len() > 1).collect();
    let mut leaves = Vec::new();
    for g in clusters.iter_mut() {
        g.sort();
        for k in 0..g.len() {
            let next = &g[(k + 1) % g.len()];
            if g.len() == 2 && k == 1 {
                break;
            }
            leaves.push(Chord::new(g[k].clone(), next.clone()));
        }
    }
    clusters.sort();
    for (i, x) in leaves.iter().enumerate() {
        for y in &leaves[i + 1..] {
            if chords_cross(x, y) {
                return Err(Error::CrossingLeaves(x.to_string(), y.to_string()));
            }
        }
    }
    let lamination = Lamination::new(leaves, DegreeMap::CUBIC)?;
    Ok(LaminationSample { lamination, clusters, flagged, unresolved, records })
}

#[derive(Clone, Debug, Serialize)]
pub struct LeafStep {
    pub params: CubicParams,
    pub landing: Option<(Complex64, Complex64)>,
    pub separation: Option<f64>,
    pub multiplier: Option<Complex64>,
    pub parabolic_suspect: bool,
    pub persists: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct LeafStabilityReport {
    pub leaf: Chord,
    pub steps: Vec<LeafStep>,
    /// The endpoints land together at every step.
    pub persists: bool,
    pub parabolic_suspect: bool,
    /// Largest movement of the common landing point between consecutive steps.
    pub max_motion: f64,
}

/// Re-lands both endpoint rays of `leaf` at each parameter of `path`.
pub fn leaf_stability_probe(
    leaf: &Chord,
    path: &[CubicParams],
    tol: f64,
    cfg: &RayConfig,
) -> Result<LeafStabilityReport> {
    if path.is_empty() {
        return Err(Error::input("empty parameter path"));
    }
    let mut steps = Vec::with_capacity(path.len());
    for p in path {
        let ends = require_connected(p, cfg)
            .and_then(|_| Ok((land_unchecked(p, leaf.a(), cfg)?, land_unchecked(p, leaf.b(), cfg)?)));
        let step = match ends {
            Ok((ra, rb)) => {
                let sep = (ra.landing_point - rb.landing_point).norm();
                let suspect = ra.parabolic_suspect || rb.parabolic_suspect;
                LeafStep {
                    params: *p,
                    landing: Some((ra.landing_point, rb.landing_point)),
                    separation: Some(sep),
                    multiplier: Some(ra.multiplier),
                    parabolic_suspect: suspect,
                    persists: sep < tol,
                }
            }
            Err(_) => LeafStep {
                params: *p,
                landing: None,
                separation: None,
                multiplier: None,
                parabolic_suspect: false,
                persists: false,
            },
        };
        steps.push(step);
    }
    let persists = steps.iter().all(|s| s.persists);
    let parabolic_suspect = steps.iter().any(|s| s.parabolic_suspect);
    let max_motion = steps
        .windows(2)
        .filter_map(|w| Some((w[0].landing?.0 - w[1].landing?.0).norm()))
        .fold(0.0, f64::max);
    Ok(LeafStabilityReport { leaf: leaf.clone(), steps, persists, parabolic_suspect, max_motion })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cube() -> CubicParams {
        CubicParams::new(Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0))
    }

    #[test]
    fn cube_rays_are_radial() {
        let cfg = RayConfig::default();
        for (num, den) in [(0, 1), (1, 2), (1, 4), (1, 8), (5, 26)] {
            let a = Angle::frac(num, den);
            let ray = trace_ray(&cube(), &a, &cfg).unwrap();
            assert!(ray.failure.is_none());
            assert!(ray.potentials.windows(2).all(|w| w[1] < w[0]));
            for (z, t) in ray.points.iter().zip(&ray.potentials) {
                let expect = Complex64::from_polar(t.exp(), std::f64::consts::TAU * a.to_f64());
                assert!((z - expect).norm() < 1e-9 * z.norm(), "{a} {z} {expect}");
            }
        }
    }

    #[test]
    fn cube_landing_examples() {
        let cfg = RayConfig::default();
        let r = land_rational_ray(&cube(), &Angle::zero(), &cfg).unwrap();
        assert!((r.landing_point - 1.0).norm() < 1e-12);
        assert_eq!(r.period, 1);
        assert!((r.multiplier - 3.0).norm() < 1e-9);
        let r = land_rational_ray(&cube(), &Angle::frac(1, 2), &cfg).unwrap();
        assert!((r.landing_point + 1.0).norm() < 1e-12);
        let r = land_rational_ray(&cube(), &Angle::frac(1, 8), &cfg).unwrap();
        assert_eq!(r.period, 2);
        assert!((r.landing_point - Complex64::from_polar(1.0, std::f64::consts::FRAC_PI_4)).norm() < 1e-12);
        let r = land_rational_ray(&cube(), &Angle::frac(1, 6), &cfg).unwrap();
        assert_eq!((r.preperiod, r.period), (1, 1));
        assert!((r.landing_point - Complex64::from_polar(1.0, std::f64::consts::FRAC_PI_3)).norm() < 1e-12);
    }

    #[test]
    fn cube_has_empty_rational_lamination() {
        let s = rational_lamination_sample(&cube(), 10, 1e-6, &RayConfig::default()).unwrap();
        assert!(s.lamination.is_empty());
        assert!(s.unresolved.is_empty());
        assert!(s.flagged.is_empty());
    }

    #[test]
    fn disconnected_julia_set_rejected() {
        let p = CubicParams::new(Complex64::new(0.5, 0.0), Complex64::new(10.0, 0.0));
        assert!(matches!(trace_ray(&p, &Angle::zero(), &RayConfig::default()), Err(Error::Domain(_))));
    }

    #[test]
    fn constant_path_keeps_landing() {
        // For z³ the rays 0 and 1/2 land apart, so the pair is not a leaf and
        // the report says so at every step.
        let leaf = Chord::frac((0, 1), (1, 2));
        let rep = leaf_stability_probe(&leaf, &[cube(), cube()], 1e-6, &RayConfig::default()).unwrap();
        assert!(!rep.persists);
        assert_eq!(rep.max_motion, 0.0);
    }
}
