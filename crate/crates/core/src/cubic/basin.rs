//! Immediate basin of 0 by grid flood-fill, and hyperbolic classification.
//!
//! A cell is a member when its center's orbit enters the trap (a certified
//! forward-invariant neighborhood of 0) within the budget. The component of
//! the cell of 0 under 4-adjacency is grown lazily: only cells next to the
//! component are ever evaluated. Membership is certified for the evaluated
//! centers; separation between components is limited by the resolution.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use super::linearize::{Trap, TrapConfig, TrapSummary};
use super::{CriticalPair, CubicParams};
use crate::error::{Error, Result};

#[derive(Clone, Debug)]
pub struct BasinConfig {
    /// `[x0, x1, y0, y1]`; defaults to a square containing the filled Julia set.
    pub window: Option<[f64; 4]>,
    /// Cells per side.
    pub resolution: usize,
    /// Per-orbit budget; defaults to `500 + 30/(1 − |λ|)`, capped at 5·10⁶.
    pub max_iter: Option<usize>,
    /// Extend the round certified disk by the linearizing-series trap when
    /// `|λ|` exceeds this; below it the round disk attracts quickly enough.
    pub series_trap_above: f64,
    pub trap: TrapConfig,
}

impl Default for BasinConfig {
    fn default() -> Self {
        BasinConfig {
            window: None,
            resolution: 400,
            max_iter: None,
            series_trap_above: 0.9,
            trap: TrapConfig::default(),
        }
    }
}

impl BasinConfig {
    pub fn budget(&self, p: &CubicParams) -> usize {
        self.max_iter.unwrap_or_else(|| {
            let gap = 1.0 - p.lambda.norm();
            (500.0 + 30.0 / gap).min(5e6) as usize
        })
    }

    fn window_for(&self, p: &CubicParams) -> [f64; 4] {
        self.window.unwrap_or_else(|| {
            // |z| > r_J gives |f(z)| > |z| and escape, with r_J the root of
            // r² − |b| r − (|λ| + 1).
            let beta = p.b.norm();
            let r = 1.02 * (beta + (beta * beta + 4.0 * (p.lambda.norm() + 1.0)).sqrt()) / 2.0;
            [-r, r, -r, r]
        })
    }

    pub(crate) fn build_trap(&self, p: &CubicParams) -> Trap {
        let disk = p.certified_disk_radius();
        if p.lambda.norm() > self.series_trap_above {
            Trap::build(p, disk, &self.trap)
        } else {
            Trap::disk(disk)
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Cell {
    Unknown,
    Member,
    Outside,
}

/// The grid, the verdicts of evaluated cells, and the component of 0.
#[derive(Clone, Debug)]
pub struct BasinEstimate {
    pub window: [f64; 4],
    pub nx: usize,
    pub ny: usize,
    pub max_iter: usize,
    cells: Vec<Cell>,
    component: Vec<bool>,
    trap: Trap,
    pub evaluated: usize,
    /// False when the fill stopped early after reaching its targets.
    pub complete: bool,
}

impl BasinEstimate {
    fn cell_size(&self) -> (f64, f64) {
        let [x0, x1, y0, y1] = self.window;
        ((x1 - x0) / self.nx as f64, (y1 - y0) / self.ny as f64)
    }

    pub fn cell_of(&self, z: Complex64) -> Option<(usize, usize)> {
        let [x0, _, y0, _] = self.window;
        let (hx, hy) = self.cell_size();
        let i = ((z.re - x0) / hx).floor();
        let j = ((z.im - y0) / hy).floor();
        if i >= 0.0 && j >= 0.0 && (i as usize) < self.nx && (j as usize) < self.ny {
            Some((i as usize, j as usize))
        } else {
            None
        }
    }

    pub fn center(&self, i: usize, j: usize) -> Complex64 {
        let [x0, _, y0, _] = self.window;
        let (hx, hy) = self.cell_size();
        Complex64::new(x0 + (i as f64 + 0.5) * hx, y0 + (j as f64 + 0.5) * hy)
    }

    /// Whether the cell's center orbit was evaluated and reached the trap.
    pub fn member_mask(&self, i: usize, j: usize) -> bool {
        self.cells[j * self.nx + i] == Cell::Member
    }

    pub fn in_component(&self, i: usize, j: usize) -> bool {
        self.component[j * self.nx + i]
    }

    pub fn component_size(&self) -> usize {
        self.component.iter().filter(|&&b| b).count()
    }

    /// `z` lies in the trap, or its cell lies in the component of 0.
    pub fn contains(&self, z: Complex64) -> bool {
        self.trap.contains(z) || self.cell_of(z).is_some_and(|(i, j)| self.in_component(i, j))
    }

    pub fn trap(&self) -> &Trap {
        &self.trap
    }
}

/// First `k ≤ budget` with `f^k(z)` in the trap; `None` on escape or exhaustion.
fn arrival(p: &CubicParams, trap: &Trap, z0: Complex64, budget: usize) -> Result<usize> {
    let r2 = p.escape_radius().powi(2);
    let mut z = z0;
    for k in 0..=budget {
        if trap.contains(z) {
            return Ok(k);
        }
        if z.norm_sqr() > r2 {
            return Err(Error::Domain(format!("orbit escapes at step {k}")));
        }
        z = p.eval(z);
    }
    Err(Error::Unresolved(format!("orbit budget of {budget} steps exhausted")))
}

pub fn basin_estimate(p: &CubicParams, cfg: &BasinConfig) -> Result<BasinEstimate> {
    check_attracting(p)?;
    flood(p, cfg.build_trap(p), cfg, &[])
}

/// Grows the component of 0; stops early once every target's cell is in it.
fn flood(p: &CubicParams, trap: Trap, cfg: &BasinConfig, targets: &[Complex64]) -> Result<BasinEstimate> {
    if cfg.resolution < 2 {
        return Err(Error::input("basin resolution must be at least 2"));
    }
    let window = cfg.window_for(p);
    let n = cfg.resolution;
    let mut est = BasinEstimate {
        window,
        nx: n,
        ny: n,
        max_iter: cfg.budget(p),
        cells: vec![Cell::Unknown; n * n],
        component: vec![false; n * n],
        trap,
        evaluated: 0,
        complete: true,
    };
    let Some((i0, j0)) = est.cell_of(Complex64::new(0.0, 0.0)) else {
        return Err(Error::input("basin window does not contain 0"));
    };
    let target_cells: Vec<usize> = targets.iter().filter_map(|&z| est.cell_of(z)).map(|(i, j)| j * n + i).collect();
    let seed = j0 * n + i0;
    est.cells[seed] = Cell::Member;
    est.component[seed] = true;
    let mut frontier = neighbors(seed, n, n);
    while !frontier.is_empty() {
        if !targets.is_empty()
            && target_cells.len() == targets.len()
            && target_cells.iter().all(|&c| est.component[c])
        {
            est.complete = false;
            break;
        }
        frontier.sort_unstable();
        frontier.dedup();
        frontier.retain(|&c| est.cells[c] == Cell::Unknown);
        let verdicts: Vec<bool> = frontier
            .par_iter()
            .map(|&c| {
                let z = est.center(c % n, c / n);
                arrival(p, &est.trap, z, est.max_iter).is_ok()
            })
            .collect();
        est.evaluated += frontier.len();
        let mut next = Vec::new();
        for (&c, ok) in frontier.iter().zip(verdicts) {
            if ok {
                est.cells[c] = Cell::Member;
                est.component[c] = true;
                next.extend(neighbors(c, n, n));
            } else {
                est.cells[c] = Cell::Outside;
            }
        }
        frontier = next;
    }
    Ok(est)
}

fn neighbors(c: usize, nx: usize, ny: usize) -> Vec<usize> {
    let (i, j) = (c % nx, c / nx);
    let mut out = Vec::with_capacity(4);
    if i > 0 {
        out.push(c - 1);
    }
    if i + 1 < nx {
        out.push(c + 1);
    }
    if j > 0 {
        out.push(c - nx);
    }
    if j + 1 < ny {
        out.push(c + nx);
    }
    out
}

fn check_attracting(p: &CubicParams) -> Result<()> {
    let l = p.lambda.norm();
    if !(l < 1.0) {
        return Err(Error::Domain(format!("|lambda| = {l} is not attracting")));
    }
    Ok(())
}

/// Whether `z0` lies in the immediate basin of 0, up to grid resolution.
pub fn basin_membership(p: &CubicParams, z0: Complex64, cfg: &BasinConfig) -> Result<bool> {
    check_attracting(p)?;
    let trap = cfg.build_trap(p);
    match arrival(p, &trap, z0, cfg.budget(p)) {
        Ok(0) => return Ok(true),
        Ok(_) => {}
        Err(Error::Domain(_)) => return Ok(false),
        Err(e) => return Err(e),
    }
    Ok(basin_estimate(p, cfg)?.contains(z0))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "label", content = "m")]
pub enum HyperbolicClass {
    Principal,
    IACapture(u32),
    OtherHyperbolic,
    Unresolved,
}

#[derive(Clone, Debug, Serialize)]
pub struct HyperbolicReport {
    pub class: HyperbolicClass,
    pub critical: CriticalPair,
    /// Steps for each critical orbit to reach the trap.
    pub arrival: [Option<usize>; 2],
    pub in_component: [bool; 2],
    pub resolution: usize,
    pub max_iter: usize,
    /// Cells in the component of 0 when the fill stopped.
    pub component_cells: usize,
    pub trap: TrapSummary,
    pub note: String,
}

/// Principal when both critical points lie in the component of 0,
/// IACapture(m) when one does and the other first lands in it after m steps.
pub fn classify_hyperbolic(p: &CubicParams, cfg: &BasinConfig) -> Result<HyperbolicReport> {
    check_attracting(p)?;
    let critical = p.critical_points();
    let budget = cfg.budget(p);
    let mut report = HyperbolicReport {
        class: HyperbolicClass::Unresolved,
        critical,
        arrival: [None, None],
        in_component: [false, false],
        resolution: cfg.resolution,
        max_iter: budget,
        component_cells: 0,
        trap: TrapSummary::default(),
        note: String::new(),
    };
    let trap = cfg.build_trap(p);
    report.trap = trap.summary();
    for (k, c) in critical.as_array().into_iter().enumerate() {
        match arrival(p, &trap, c, budget) {
            Ok(n) => report.arrival[k] = Some(n),
            Err(Error::Domain(msg)) => {
                report.note = format!("critical point {} escapes: {msg}", k + 1);
                return Ok(report);
            }
            Err(_) => {
                if let Some(period) = attracting_cycle(p, p.iterate(c, budget)) {
                    report.class = HyperbolicClass::OtherHyperbolic;
                    report.note = format!("critical point {} attracted to a cycle of period {period}", k + 1);
                } else {
                    report.note = format!("critical point {} unresolved within {budget} steps", k + 1);
                }
                return Ok(report);
            }
        }
    }
    let est = flood(p, trap, cfg, &critical.as_array())?;
    report.component_cells = est.component_size();
    report.in_component = critical.as_array().map(|c| est.contains(c));
    report.class = match report.in_component {
        [true, true] => HyperbolicClass::Principal,
        [false, false] => {
            report.note = "neither critical point reached from the component of 0".into();
            HyperbolicClass::Unresolved
        }
        [a, _] => {
            let other = if a { critical.c2 } else { critical.c1 };
            let reach = report.arrival[if a { 1 } else { 0 }].unwrap_or(0);
            let mut z = other;
            let mut m = None;
            for k in 1..=reach.max(1) {
                z = p.eval(z);
                if est.contains(z) {
                    m = Some(k as u32);
                    break;
                }
            }
            match m {
                Some(m) => HyperbolicClass::IACapture(m),
                None => HyperbolicClass::Unresolved,
            }
        }
    };
    Ok(report)
}

/// Period (≤ 64) of an attracting cycle near `z`, after settling.
fn attracting_cycle(p: &CubicParams, z: Complex64) -> Option<usize> {
    let mut z = p.iterate(z, 1000);
    if !z.is_finite() {
        return None;
    }
    for period in 1..=64 {
        let mut w = z;
        let mut d = Complex64::new(1.0, 0.0);
        for _ in 0..period {
            d *= p.deriv(w);
            w = p.eval(w);
        }
        if (w - z).norm() < 1e-8 * (1.0 + z.norm()) && d.norm() < 1.0 {
            return Some(period);
        }
        z = p.eval(z);
    }
    None
}
