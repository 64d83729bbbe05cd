//! The marked cubic family `f(z) = λz + bz² + z³`.
//!
//! 0 is always fixed with multiplier λ. The two critical points are the roots
//! of `3z² + 2bz + λ`.

mod basin;
mod center;
pub mod linearize;
mod probe;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use basin::{
    basin_estimate, basin_membership, classify_hyperbolic, BasinConfig, BasinEstimate,
    HyperbolicClass, HyperbolicReport,
};
pub use center::{landing_critical_point, solve_center_curve, CriticalBranch, SeedGrid};
pub use linearize::{LinearizerSeries, Trap, TrapConfig, TrapSummary};
pub use probe::{siegel_capture_probe, CaptureEvidence, CaptureVerdict, ProbeConfig, ProbeStart};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CubicParams {
    pub lambda: Complex64,
    pub b: Complex64,
}

impl CubicParams {
    pub fn new(lambda: Complex64, b: Complex64) -> Self {
        CubicParams { lambda, b }
    }

    #[inline]
    pub fn eval(&self, z: Complex64) -> Complex64 {
        z * (self.lambda + z * (self.b + z))
    }

    #[inline]
    pub fn deriv(&self, z: Complex64) -> Complex64 {
        self.lambda + z * (2.0 * self.b + 3.0 * z)
    }

    /// `(f(z), f'(z))`.
    #[inline]
    pub fn eval_deriv(&self, z: Complex64) -> (Complex64, Complex64) {
        (self.eval(z), self.deriv(z))
    }

    pub fn orbit(&self, z0: Complex64, n: usize) -> Vec<Complex64> {
        let mut out = Vec::with_capacity(n + 1);
        let mut z = z0;
        out.push(z);
        for _ in 0..n {
            z = self.eval(z);
            out.push(z);
        }
        out
    }

    pub fn iterate(&self, z0: Complex64, n: usize) -> Complex64 {
        (0..n).fold(z0, |z, _| self.eval(z))
    }

    /// `|z| > R` implies `|f(z)| > |z|` and the orbit tends to ∞.
    pub fn escape_radius(&self) -> f64 {
        2.0 + self.lambda.norm() + self.b.norm()
    }

    pub fn critical_points(&self) -> CriticalPair {
        let (c1, c2) = stable_quadratic_roots(3.0, 2.0 * self.b, self.lambda);
        CriticalPair { c1, c2 }
    }

    /// 0 and the two roots of `z² + bz + λ − 1`.
    pub fn fixed_points(&self) -> [FixedPoint; 3] {
        let (u, v) = stable_quadratic_roots(1.0, self.b, self.lambda - 1.0);
        [Complex64::new(0.0, 0.0), u, v].map(|z| FixedPoint { z, multiplier: self.deriv(z) })
    }

    /// Radius of the disk on which `|f(z)| ≤ q|z|` with `q = (1 + |λ|)/2`,
    /// from the triangle-inequality bound `|f(z)| ≤ |λ||z| + |b||z|² + |z|³`:
    /// the positive root of `r² + |b| r − (1 − |λ|)/2`. Zero when `|λ| ≥ 1`.
    pub fn certified_disk_radius(&self) -> f64 {
        let l = self.lambda.norm();
        if l >= 1.0 {
            return 0.0;
        }
        let beta = self.b.norm();
        let c = (1.0 - l) / 2.0;
        // 2c / (β + √(β² + 4c)) avoids cancellation for small c.
        2.0 * c / (beta + (beta * beta + 4.0 * c).sqrt())
    }
}

/// Roots of `a z² + b z + c` without cancellation: `q = −(b + s)/2` with the
/// sign of `s = √(b² − 4ac)` maximizing `|b + s|`, then `q/a` and `c/q`.
fn stable_quadratic_roots(a: f64, b: Complex64, c: Complex64) -> (Complex64, Complex64) {
    let disc = (b * b - 4.0 * a * c).sqrt();
    let s = if (b + disc).norm() >= (b - disc).norm() { disc } else { -disc };
    let q = -(b + s) / 2.0;
    if q.norm() == 0.0 {
        // b = 0 and c = 0.
        return (q, q);
    }
    (q / a, c / q)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CriticalPair {
    pub c1: Complex64,
    pub c2: Complex64,
}

impl CriticalPair {
    pub fn as_array(&self) -> [Complex64; 2] {
        [self.c1, self.c2]
    }

    /// Reorders so that each new root sits next to the matching previous root.
    pub fn continue_from(&self, previous: &CriticalPair) -> CriticalPair {
        let straight = (self.c1 - previous.c1).norm() + (self.c2 - previous.c2).norm();
        let swapped = (self.c2 - previous.c1).norm() + (self.c1 - previous.c2).norm();
        if swapped < straight {
            CriticalPair { c1: self.c2, c2: self.c1 }
        } else {
            *self
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FixedPoint {
    pub z: Complex64,
    pub multiplier: Complex64,
}

/// `((1 − ε)λ, b)`: radial approach to the base multiplier.
pub fn perturb(p: &CubicParams, eps: f64) -> Result<CubicParams> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::input(format!("epsilon {eps} outside (0, 1)")));
    }
    Ok(CubicParams { lambda: p.lambda * (1.0 - eps), b: p.b })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum EscapeStatus {
    BothBounded,
    C1Escapes,
    C2Escapes,
    BothEscape,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EscapeReport {
    pub status: EscapeStatus,
    pub critical: CriticalPair,
    /// First iteration with `|f^k(c)| > R`, per critical point.
    pub escape_iter: [Option<usize>; 2],
}

/// First index `k ≤ max_iter` with `|f^k(z)| > radius`.
pub fn escape_time(p: &CubicParams, z0: Complex64, max_iter: usize, radius: f64) -> Option<usize> {
    let r2 = radius * radius;
    let mut z = z0;
    for k in 0..=max_iter {
        if z.norm_sqr() > r2 {
            return Some(k);
        }
        z = p.eval(z);
    }
    None
}

/// Iterates both critical orbits; "bounded" only means no escape within the
/// budget. `radius` is raised to the certified escape radius when smaller.
pub fn escape_classify(p: &CubicParams, max_iter: usize, radius: f64) -> EscapeReport {
    let radius = radius.max(p.escape_radius());
    let critical = p.critical_points();
    let escape_iter = critical.as_array().map(|c| escape_time(p, c, max_iter, radius));
    let status = match escape_iter {
        [None, None] => EscapeStatus::BothBounded,
        [Some(_), None] => EscapeStatus::C1Escapes,
        [None, Some(_)] => EscapeStatus::C2Escapes,
        [Some(_), Some(_)] => EscapeStatus::BothEscape,
    };
    EscapeReport { status, critical, escape_iter }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn eval_examples() {
        assert_eq!(CubicParams::new(c(0.0, 0.0), c(0.0, 0.0)).eval(c(2.0, 0.0)), c(8.0, 0.0));
        assert_eq!(CubicParams::new(c(1.0, 0.0), c(0.0, 0.0)).eval(c(0.0, 0.0)), c(0.0, 0.0));
        assert_eq!(CubicParams::new(c(0.0, 1.0), c(1.0, 0.0)).eval(c(1.0, 0.0)), c(2.0, 1.0));
    }

    #[test]
    fn critical_point_examples() {
        let z = CubicParams::new(c(0.0, 0.0), c(0.0, 0.0)).critical_points();
        assert_eq!((z.c1, z.c2), (c(0.0, 0.0), c(0.0, 0.0)));
        let cp = CubicParams::new(c(-3.0, 0.0), c(0.0, 0.0)).critical_points();
        let mut re = [cp.c1.re, cp.c2.re];
        re.sort_by(f64::total_cmp);
        assert_eq!(re, [-1.0, 1.0]);
        assert!(cp.c1.im.abs() < 1e-15 && cp.c2.im.abs() < 1e-15);
    }

    #[test]
    fn fixed_point_examples() {
        let f = CubicParams::new(c(1.0, 0.0), c(0.0, 0.0)).fixed_points();
        assert!(f.iter().all(|w| w.z.norm() == 0.0));
        let f = CubicParams::new(c(0.0, 0.0), c(0.0, 0.0)).fixed_points();
        let mut re: Vec<f64> = f.iter().map(|w| w.z.re).collect();
        re.sort_by(f64::total_cmp);
        assert_eq!(re, vec![-1.0, 0.0, 1.0]);
        assert_eq!(f[1].multiplier, c(3.0, 0.0));
    }

    #[test]
    fn perturb_is_radial() {
        let p = CubicParams::new(c(1.0, 0.0), c(2.0, 0.0));
        assert_eq!(perturb(&p, 0.5).unwrap(), CubicParams::new(c(0.5, 0.0), c(2.0, 0.0)));
        let g = Complex64::from_polar(1.0, 1.2);
        let q = perturb(&CubicParams::new(g, c(0.3, 0.1)), 1e-3).unwrap();
        assert!((q.lambda.norm() - (1.0 - 1e-3)).abs() < 1e-15);
        assert!((q.lambda.arg() - 1.2).abs() < 1e-15);
        assert!(perturb(&p, 0.0).is_err() && perturb(&p, 1.0).is_err());
    }

    #[test]
    fn escape_examples() {
        let r = escape_classify(&CubicParams::new(c(0.0, 0.0), c(0.0, 0.0)), 100, 2.0);
        assert_eq!(r.status, EscapeStatus::BothBounded);
        let r = escape_classify(&CubicParams::new(c(0.0, 0.0), c(10.0, 0.0)), 50, 2.0);
        assert!(matches!(r.status, EscapeStatus::C1Escapes | EscapeStatus::C2Escapes));
        let r = escape_classify(&CubicParams::new(c(0.5, 0.0), c(0.0, 0.0)), 1000, 2.0);
        assert_eq!(r.status, EscapeStatus::BothBounded);
    }

    #[test]
    fn certified_disk_contracts() {
        let p = CubicParams::new(Complex64::from_polar(0.7, 0.4), c(1.3, -0.8));
        let r = p.certified_disk_radius();
        let bound = p.lambda.norm() * r + p.b.norm() * r * r + r * r * r;
        assert!((bound - (1.0 + p.lambda.norm()) / 2.0 * r).abs() < 1e-14);
    }

    #[test]
    fn root_continuation_swaps_when_needed() {
        let prev = CriticalPair { c1: c(1.0, 0.0), c2: c(-1.0, 0.0) };
        let next = CriticalPair { c1: c(-0.9, 0.0), c2: c(1.1, 0.0) }.continue_from(&prev);
        assert_eq!(next.c1, c(1.1, 0.0));
    }
}
