//! Parameters where a critical point lands on 0 after exactly `n` steps.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::CubicParams;
use crate::error::{Error, Result};

/// Which root of `3z² + 2bz + λ` plays the role of `c(b)` at the seed.
/// Newton steps keep following the root nearest the previous one.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CriticalBranch {
    /// `(−b + √(b² − 3λ))/3`, principal square root.
    Plus,
    /// `(−b − √(b² − 3λ))/3`.
    Minus,
    Both,
}

/// Square grid of Newton seeds over `|b| ≤ radius`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SeedGrid {
    pub per_side: usize,
    pub radius: f64,
}

impl Default for SeedGrid {
    fn default() -> Self {
        SeedGrid { per_side: 40, radius: 4.0 }
    }
}

const RESIDUAL_TOL: f64 = 1e-10;
const PUNCTURE_TOL: f64 = 1e-8;
const DEDUP_TOL: f64 = 1e-8;
const STEP_TOL: f64 = 1e-10;
const MAX_NEWTON: usize = 100;

fn branch_root(lambda: Complex64, b: Complex64, plus: bool) -> Complex64 {
    let s = (b * b - 3.0 * lambda).sqrt();
    if plus {
        (-b + s) / 3.0
    } else {
        (-b - s) / 3.0
    }
}

fn nearest_root(lambda: Complex64, b: Complex64, prev: Complex64) -> Complex64 {
    let p = CubicParams::new(lambda, b).critical_points();
    if (p.c1 - prev).norm() <= (p.c2 - prev).norm() {
        p.c1
    } else {
        p.c2
    }
}

/// `g(b) = f^n(c(b))` and `g'(b)`, using `dc/db = −c/(3c + b)` and
/// `d f^{k+1}/db = f'(z_k) d z_k/db + z_k²`.
fn g_and_derivative(lambda: Complex64, b: Complex64, c: Complex64, n: u32) -> (Complex64, Complex64) {
    let p = CubicParams::new(lambda, b);
    let mut z = c;
    let mut dz = -c / (3.0 * c + b);
    for _ in 0..n {
        let dz_next = p.deriv(z) * dz + z * z;
        z = p.eval(z);
        dz = dz_next;
    }
    (z, dz)
}

fn newton(lambda: Complex64, b0: Complex64, plus: bool, n: u32) -> Option<(Complex64, Complex64)> {
    let mut b = b0;
    let mut c = branch_root(lambda, b, plus);
    let (mut g, mut dg) = g_and_derivative(lambda, b, c, n);
    for _ in 0..MAX_NEWTON {
        if !g.is_finite() || !dg.is_finite() {
            return None;
        }
        if g.norm() < 1e-15 {
            break;
        }
        if dg.norm() == 0.0 || !(3.0 * c + b).is_normal() {
            // Derivative singularity: nudge the seed.
            b += Complex64::new(1e-7, 1e-7);
            c = nearest_root(lambda, b, c);
            (g, dg) = g_and_derivative(lambda, b, c, n);
            continue;
        }
        let step = g / dg;
        let mut t = 1.0;
        let mut accepted = false;
        for _ in 0..40 {
            let b_try = b - step * t;
            let c_try = nearest_root(lambda, b_try, c);
            let (g_try, dg_try) = g_and_derivative(lambda, b_try, c_try, n);
            if g_try.is_finite() && g_try.norm() < g.norm() {
                b = b_try;
                c = c_try;
                g = g_try;
                dg = dg_try;
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if !accepted || (step * t).norm() < 1e-16 * (1.0 + b.norm()) {
            break;
        }
    }
    // A small residual alone is not enough near the punctured degenerate
    // roots (g vanishes to high order at b where c = 0); require a converged step.
    let converged = g.norm() < RESIDUAL_TOL && (g / dg).norm() < STEP_TOL * (1.0 + b.norm());
    converged.then_some((b, c))
}

/// Roots `b` of `f^n(c(b)) = 0` with `f^k(c) ≠ 0` for `k < n`, found by damped
/// Newton from a seed grid; sorted and deduplicated.
pub fn solve_center_curve(
    lambda: Complex64,
    n: u32,
    branch: CriticalBranch,
    seeds: SeedGrid,
) -> Result<Vec<Complex64>> {
    if n == 0 {
        return Err(Error::input("center curve order must be at least 1"));
    }
    if seeds.per_side == 0 || !(seeds.radius > 0.0) {
        return Err(Error::input("seed grid must be non-empty"));
    }
    let branches: &[bool] = match branch {
        CriticalBranch::Plus => &[true],
        CriticalBranch::Minus => &[false],
        CriticalBranch::Both => &[true, false],
    };
    let m = seeds.per_side;
    let mut found: Vec<Complex64> = Vec::new();
    for &plus in branches {
        for i in 0..m {
            for j in 0..m {
                let t = |k: usize| -seeds.radius + 2.0 * seeds.radius * (k as f64 + 0.5) / m as f64;
                let b0 = Complex64::new(t(i), t(j));
                if b0.norm() > seeds.radius {
                    continue;
                }
                let Some((b, c)) = newton(lambda, b0, plus, n) else { continue };
                let p = CubicParams::new(lambda, b);
                let punctured = p.orbit(c, n as usize - 1).iter().any(|z| z.norm() <= PUNCTURE_TOL);
                if punctured || found.iter().any(|f| (f - b).norm() < DEDUP_TOL) {
                    continue;
                }
                found.push(b);
            }
        }
    }
    found.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    Ok(found)
}

/// The critical point of `(λ, b)` whose `n`-th iterate is nearest 0.
pub fn landing_critical_point(lambda: Complex64, b: Complex64, n: u32) -> Complex64 {
    let p = CubicParams::new(lambda, b);
    let cp = p.critical_points();
    if p.iterate(cp.c1, n as usize).norm() <= p.iterate(cp.c2, n as usize).norm() {
        cp.c1
    } else {
        cp.c2
    }
}
