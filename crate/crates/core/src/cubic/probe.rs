//! Numerical evidence that a critical orbit is captured by the Siegel disk
//! of an irrationally indifferent fixed point.

use num_complex::Complex64;
use serde::Serialize;

use super::linearize::{Trap, TrapConfig};
use super::CubicParams;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ProbeStart {
    /// Index 0 or 1 into `critical_points()`.
    Critical(usize),
    Point(Complex64),
}

#[derive(Clone, Debug)]
pub struct ProbeConfig {
    pub start: ProbeStart,
    /// Added to the real part of the start point.
    pub displacement: f64,
    pub n_skip: usize,
    pub n_tail: usize,
    /// Allowed `|λ − e^{2πiθ}|`.
    pub lambda_tol: f64,
    /// θ within `rational_tol` of `p/q` with `q ≤ rational_max_q` is rejected.
    pub rational_max_q: u64,
    pub rational_tol: f64,
    /// Also report the first step at which the orbit enters the series trap.
    pub trap: Option<TrapConfig>,
}

impl Default for ProbeConfig {
    fn default() -> Self {
        ProbeConfig {
            start: ProbeStart::Critical(0),
            displacement: 1e-9,
            n_skip: 1000,
            n_tail: 2000,
            lambda_tol: 1e-9,
            rational_max_q: 1000,
            rational_tol: 1e-12,
            trap: Some(TrapConfig::default()),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CaptureVerdict {
    Captured,
    ConvergingToZero,
    Escaped,
    Unresolved,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CaptureEvidence {
    pub verdict: CaptureVerdict,
    pub start: Complex64,
    pub tail_radius_range: (f64, f64),
    /// Fraction of sampled tail triples whose circular order about 0 matches
    /// the rotation by θ.
    pub order_agreement: f64,
    pub triples: usize,
    pub escape_step: Option<usize>,
    /// First step inside the validated Siegel trap, if one was built.
    pub trap_entry: Option<usize>,
}

/// Rejects θ within `tol` of a rational with denominator at most `max_q`.
pub fn check_irrational(theta: f64, max_q: u64, tol: f64) -> Result<()> {
    for q in 1..=max_q {
        let x = theta * q as f64;
        if (x - x.round()).abs() < tol * q as f64 {
            return Err(Error::RationalInput(format!("{theta} is within {tol:e} of {}/{q}", x.round())));
        }
    }
    Ok(())
}

fn frac(x: f64) -> f64 {
    x - x.floor()
}

/// Whether `b` lies on the counterclockwise arc from `a` to `c`, on [0, 1).
fn ccw(a: f64, b: f64, c: f64) -> bool {
    frac(b - a) < frac(c - a)
}

const TRIPLE_OFFSETS: [(usize, usize); 7] = [(1, 2), (1, 3), (2, 5), (3, 8), (5, 13), (13, 34), (34, 89)];

pub fn siegel_capture_probe(p: &CubicParams, theta: f64, cfg: &ProbeConfig) -> Result<CaptureEvidence> {
    let rot = Complex64::from_polar(1.0, std::f64::consts::TAU * theta);
    if (p.lambda - rot).norm() > cfg.lambda_tol {
        return Err(Error::Domain(format!("lambda is not e^(2 pi i {theta}) within {:e}", cfg.lambda_tol)));
    }
    check_irrational(theta, cfg.rational_max_q, cfg.rational_tol)?;
    if cfg.n_tail < 3 {
        return Err(Error::input("probe tail needs at least 3 points"));
    }
    let base = match cfg.start {
        ProbeStart::Critical(i) if i < 2 => p.critical_points().as_array()[i],
        ProbeStart::Critical(i) => return Err(Error::input(format!("critical index {i} out of range"))),
        ProbeStart::Point(z) => z,
    };
    let start = base + cfg.displacement;
    let trap = cfg.trap.as_ref().map(|t| Trap::build(p, 0.0, t));
    let trap = trap.filter(|t| t.series().is_some());
    let radius = p.escape_radius();
    let mut ev = CaptureEvidence {
        verdict: CaptureVerdict::Unresolved,
        start,
        tail_radius_range: (f64::NAN, f64::NAN),
        order_agreement: 0.0,
        triples: 0,
        escape_step: None,
        trap_entry: None,
    };
    let total = cfg.n_skip + cfg.n_tail;
    let mut tail = Vec::with_capacity(cfg.n_tail);
    let mut z = start;
    for k in 0..total {
        if !z.is_finite() {
            return Ok(ev);
        }
        if z.norm() > radius {
            ev.escape_step = Some(k);
            ev.verdict = CaptureVerdict::Escaped;
            return Ok(ev);
        }
        if ev.trap_entry.is_none() && trap.as_ref().is_some_and(|t| t.contains(z)) {
            ev.trap_entry = Some(k);
        }
        if k >= cfg.n_skip {
            tail.push(z);
        }
        z = p.eval(z);
    }
    let radii: Vec<f64> = tail.iter().map(|w| w.norm()).collect();
    let r_min = radii.iter().copied().fold(f64::INFINITY, f64::min);
    let r_max = radii.iter().copied().fold(0.0, f64::max);
    ev.tail_radius_range = (r_min, r_max);
    let tenth = (radii.len() / 10).max(1);
    let head_mean: f64 = radii[..tenth].iter().sum::<f64>() / tenth as f64;
    let last_mean: f64 = radii[radii.len() - tenth..].iter().sum::<f64>() / tenth as f64;
    if r_min == 0.0 || last_mean < 0.5 * head_mean {
        ev.verdict = CaptureVerdict::ConvergingToZero;
        return Ok(ev);
    }
    let args: Vec<f64> = tail.iter().map(|w| frac(w.arg() / std::f64::consts::TAU)).collect();
    let rigid: Vec<f64> = (0..tail.len()).map(|k| frac(k as f64 * theta)).collect();
    let (mut agree, mut count) = (0usize, 0usize);
    for i in 0..tail.len() {
        for &(a, b) in &TRIPLE_OFFSETS {
            let (j, l) = (i + a, i + b);
            if l >= tail.len() {
                continue;
            }
            count += 1;
            if ccw(args[i], args[j], args[l]) == ccw(rigid[i], rigid[j], rigid[l]) {
                agree += 1;
            }
        }
    }
    ev.triples = count;
    ev.order_agreement = if count == 0 { 0.0 } else { agree as f64 / count as f64 };
    if r_min > 0.0 && r_max < radius && count > 0 && agree == count {
        ev.verdict = CaptureVerdict::Captured;
    }
    Ok(ev)
}
