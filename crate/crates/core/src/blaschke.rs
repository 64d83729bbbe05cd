//! Quadratic Blaschke products fixing 0, normalized as
//! `Q_a(z) = z (a − z)/(1 − ā z)` with `|a| < 1`.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};

/// Pole tolerance on `|1 − ā z|`.
pub const POLE_TOL: f64 = 1e-14;

/// Minimum number of circle samples used by [`NormalizedBlaschke::expansion_margin`].
pub const MIN_CIRCLE_SAMPLES: usize = 4096;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct NormalizedBlaschke {
    a: Complex64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CriticalPoint {
    pub value: Complex64,
    /// `a = 0`: `Q_0(z) = −z²` has its critical point at the fixed point 0.
    pub degenerate: bool,
}

/// `z (a − z)/(1 − ā z)` for any `|a| ≤ 1`; on the circle this is the rotation
/// `z ↦ a z` away from the removable singularity at `z = a`.
pub fn q_formula(a: Complex64, z: Complex64) -> Result<Complex64> {
    let den = Complex64::new(1.0, 0.0) - a.conj() * z;
    if den.norm() < POLE_TOL {
        return Err(Error::Pole(den.norm()));
    }
    Ok(z * (a - z) / den)
}

impl NormalizedBlaschke {
    pub fn new(a: Complex64) -> Result<Self> {
        if !(a.norm() < 1.0) {
            return Err(Error::Domain(format!("|a| = {} is not < 1", a.norm())));
        }
        Ok(NormalizedBlaschke { a })
    }

    pub fn a(&self) -> Complex64 {
        self.a
    }

    pub fn eval(&self, z: Complex64) -> Result<Complex64> {
        q_formula(self.a, z)
    }

    /// `Q_a'(z) = (ā z² − 2 z + a)/(1 − ā z)²`.
    pub fn derivative(&self, z: Complex64) -> Result<Complex64> {
        let den = Complex64::new(1.0, 0.0) - self.a.conj() * z;
        if den.norm() < POLE_TOL {
            return Err(Error::Pole(den.norm()));
        }
        Ok((self.a.conj() * z * z - 2.0 * z + self.a) / (den * den))
    }

    /// `c_a = a/(1 + √(1 − |a|²))`, the critical point inside the disk. The
    /// radicand is a nonnegative real, so the principal root is unambiguous.
    pub fn critical_point_in_disk(&self) -> CriticalPoint {
        let r = (1.0 - self.a.norm_sqr()).max(0.0).sqrt();
        CriticalPoint { value: self.a / (1.0 + r), degenerate: self.a == Complex64::new(0.0, 0.0) }
    }

    /// `Q_a(c_a) = c_a²`.
    pub fn critical_value(&self) -> Complex64 {
        let c = self.critical_point_in_disk().value;
        c * c
    }

    /// The closed form `(1 − √(1 − |a|²))² / ā²`, undefined at `a = 0`.
    pub fn critical_value_closed_form(&self) -> Option<Complex64> {
        if self.a.norm() == 0.0 {
            return None;
        }
        let r = (1.0 - self.a.norm_sqr()).max(0.0).sqrt();
        let ac = self.a.conj();
        Some(Complex64::new((1.0 - r) * (1.0 - r), 0.0) / (ac * ac))
    }

    /// Minimum of `|Q_a'|` over equispaced circle points (at least
    /// [`MIN_CIRCLE_SAMPLES`]). A sampled check, not a bound.
    pub fn expansion_margin(&self, n_samples: usize) -> f64 {
        let n = n_samples.max(MIN_CIRCLE_SAMPLES);
        (0..n)
            .map(|k| {
                let z = Complex64::from_polar(1.0, std::f64::consts::TAU * k as f64 / n as f64);
                // |1 − ā z| ≥ 1 − |a| > 0 on the circle.
                self.derivative(z).map(|d| d.norm()).unwrap_or(f64::INFINITY)
            })
            .fold(f64::INFINITY, f64::min)
    }

    /// `min_{0≤i≤m} |Q_a^i(c_a)|`.
    pub fn critical_orbit_near_circle(&self, m: usize) -> f64 {
        let mut z = self.critical_point_in_disk().value;
        let mut best = z.norm();
        for _ in 0..m {
            z = self.eval(z).expect("the closed disk has no poles");
            best = best.min(z.norm());
        }
        best
    }
}

/// `B_{b,s}(z) = s z (b − z)/(1 − b̄ z)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GeneralBlaschke {
    b: Complex64,
    s: Complex64,
}

impl GeneralBlaschke {
    pub fn new(b: Complex64, s: Complex64) -> Result<Self> {
        let nb = b.norm();
        if !(nb > 0.0 && nb < 1.0) {
            return Err(Error::Domain(format!("|b| = {nb} not in (0,1)")));
        }
        if (s.norm() - 1.0).abs() > 1e-12 {
            return Err(Error::Domain(format!("|s| = {} is not 1", s.norm())));
        }
        Ok(GeneralBlaschke { b, s })
    }

    pub fn b(&self) -> Complex64 {
        self.b
    }

    pub fn s(&self) -> Complex64 {
        self.s
    }

    pub fn eval(&self, z: Complex64) -> Result<Complex64> {
        Ok(self.s * q_formula(self.b, z)?)
    }

    pub fn derivative_at_zero(&self) -> Complex64 {
        self.s * self.b
    }
}

/// Returns `Q_a` and the unit `ρ` with `ρ⁻¹ B(ρ z) = Q_a(z)`: `ρ = s̄`, `a = b s`.
pub fn normalize(bp: &GeneralBlaschke) -> (NormalizedBlaschke, Complex64) {
    let rho = bp.s.conj();
    let q = NormalizedBlaschke::new(bp.b * bp.s).expect("|b s| = |b| < 1");
    (q, rho)
}

/// Inverse of [`normalize`].
pub fn denormalize(q: &NormalizedBlaschke, rho: Complex64) -> Result<GeneralBlaschke> {
    GeneralBlaschke::new(q.a * rho, rho.conj())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LadderHit {
    /// Rung index `k`, with `δ′ = 2^-k` and `a = (1 − δ′) s`.
    pub k: u32,
    pub delta_prime: f64,
    pub min_modulus: f64,
}

/// Walks `δ′ = 2^-k`, `k = 1…max_k`, until `min_{i≤m} |Q_a^i(c_a)| > 1 − ε`
/// for `a = (1 − δ′) s`. Reports the first rung that succeeds, with no claim
/// that it is the largest admissible `δ`.
pub fn circle_hugging_ladder(s: Complex64, m: usize, eps: f64, max_k: u32) -> Option<LadderHit> {
    (1..=max_k).find_map(|k| {
        let dp = 0.5f64.powi(k as i32);
        let q = NormalizedBlaschke::new(s * (1.0 - dp)).ok()?;
        let v = q.critical_orbit_near_circle(m);
        (v > 1.0 - eps).then_some(LadderHit { k, delta_prime: dp, min_modulus: v })
    })
}

/// Minimum distance from `s` allowed for samples of `K`.
pub const ROTATION_SAMPLE_GAP: f64 = 1e-3;

/// `max_{z∈K} |Q_a(z) − s z|` for `|a| ≤ 1`.
pub fn rotation_limit_deviation(a: Complex64, s: Complex64, samples: &[Complex64]) -> Result<f64> {
    if let Some(z) = samples.iter().find(|z| (*z - s).norm() < ROTATION_SAMPLE_GAP) {
        return Err(Error::input(format!("sample {z} lies within {ROTATION_SAMPLE_GAP} of s")));
    }
    if a.norm() > 1.0 + 1e-15 {
        return Err(Error::Domain(format!("|a| = {} exceeds 1", a.norm())));
    }
    samples.iter().try_fold(0.0f64, |m, &z| Ok(m.max((q_formula(a, z)? - s * z).norm())))
}
