//! Linearizing series at the marked fixed point and the invariant trap built
//! from it.
//!
//! For `0 < |λ| ≤ 1` (λ not a root of unity) the inverse Koenigs/Siegel map
//! `h(w) = w + Σ_{k≥2} h_k w^k` solves `f(h(w)) = h(λ w)`. On any disk `D_s`
//! where the truncated series is accurate, `T = h(D_s)` satisfies
//! `f(T) = h(λ D_s) ⊂ T`, so `T` is a connected forward-invariant set
//! containing 0: it lies in the immediate basin when `|λ| < 1` and in the
//! Siegel disk when `|λ| = 1`.

use num_complex::Complex64;
use serde::Serialize;

use super::CubicParams;

/// Inverse linearizing series truncated at degree `K`, stored in the scaled
/// variable `u = w/ρ` with `ρ` near the radius of convergence so that the
/// coefficients stay representable.
#[derive(Clone, Debug)]
pub struct LinearizerSeries {
    scale: f64,
    coeffs: Vec<Complex64>,
}

/// Coefficients of `g(u) = h(ρu)/ρ`, which solves `λg + bρ g² + ρ² g³ = g(λu)`.
/// Stops early, keeping the finite prefix, if they overflow.
fn scaled_coefficients(p: &CubicParams, rho: f64, k_max: usize) -> Option<Vec<Complex64>> {
    let lam = p.lambda;
    let (b, c) = (p.b * rho, rho * rho);
    let zero = Complex64::new(0.0, 0.0);
    let mut h = vec![zero; k_max + 1];
    let mut h2 = vec![zero; k_max + 1];
    h[1] = Complex64::new(1.0, 0.0);
    let mut lam_k = lam;
    for k in 2..=k_max {
        lam_k *= lam;
        // (g²)_k needs g_1..g_{k−1}; (g³)_k needs (g²)_2..(g²)_{k−1}.
        let mut s2 = zero;
        for i in 1..k {
            s2 += h[i] * h[k - i];
        }
        h2[k] = s2;
        let mut s3 = zero;
        for i in 1..k - 1 {
            s3 += h[i] * h2[k - i];
        }
        let den = lam_k - lam;
        if den.norm() < 1e-300 {
            return None;
        }
        h[k] = (b * s2 + c * s3) / den;
        if !h[k].is_finite() || h[k].norm() > 1e200 {
            if k <= 16 {
                return None;
            }
            h.truncate(k);
            break;
        }
    }
    Some(h)
}

impl LinearizerSeries {
    /// Coefficients from `h_k (λ^k − λ) = b (h²)_k + (h³)_k`, in `O(K²)`. A
    /// short unscaled pass estimates the radius of convergence by the root
    /// test; the full pass runs in the rescaled variable.
    pub fn new(p: &CubicParams, degree: usize) -> Option<Self> {
        if p.lambda.norm() == 0.0 || degree < 2 {
            return None;
        }
        let probe = scaled_coefficients(p, 1.0, degree.min(256))?;
        let k = probe.len() - 1;
        let rho = (k / 2..=k)
            .filter(|&j| probe[j].norm() > 0.0)
            .map(|j| probe[j].norm().powf(-1.0 / (j as f64 - 1.0)))
            .fold(f64::INFINITY, f64::min);
        let rho = if rho.is_finite() && rho > 0.0 { rho.min(1e3) } else { 1.0 };
        let coeffs = scaled_coefficients(p, rho, degree)?;
        Some(LinearizerSeries { scale: rho, coeffs })
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// `(h(w), h'(w))` by Horner's rule in the scaled variable.
    pub fn eval(&self, w: Complex64) -> (Complex64, Complex64) {
        let u = w / self.scale;
        let mut v = Complex64::new(0.0, 0.0);
        let mut d = Complex64::new(0.0, 0.0);
        for c in self.coeffs.iter().rev() {
            d = d * u + v;
            v = v * u + c;
        }
        (v * self.scale, d)
    }

    /// `h_k` in the unscaled variable.
    pub fn coefficient(&self, k: usize) -> Complex64 {
        self.coeffs[k] / self.scale.powi(k as i32 - 1)
    }

    /// Largest `s` with `|h_k| s^k ≤ tol·s` over the top eighth of the
    /// coefficients, so the neglected tail is of relative order `tol`.
    pub fn safe_radius(&self, tol: f64) -> f64 {
        let k_max = self.degree();
        let lo = (k_max - k_max / 8).max(2);
        let u = (lo..=k_max)
            .filter(|&k| self.coeffs[k].norm() > 0.0)
            .map(|k| (tol / self.coeffs[k].norm()).powf(1.0 / (k as f64 - 1.0)))
            .fold(f64::INFINITY, f64::min);
        u * self.scale
    }

    /// Newton solve of `h(w) = z` from `w0`.
    pub fn invert(&self, z: Complex64, w0: Complex64) -> Option<Complex64> {
        let mut w = w0;
        for _ in 0..60 {
            let (v, d) = self.eval(w);
            if d.norm() == 0.0 {
                return None;
            }
            let step = (v - z) / d;
            w -= step;
            if step.norm() < 1e-15 * (1.0 + w.norm()) {
                return Some(w);
            }
        }
        None
    }
}

#[derive(Clone, Debug)]
pub struct TrapConfig {
    pub series_degree: usize,
    pub tail_tol: f64,
    pub boundary_samples: usize,
    pub mask_resolution: usize,
    /// Maximum accepted `|f(h(w)) − h(λw)|` on the trap boundary.
    pub invariance_tol: f64,
}

impl Default for TrapConfig {
    fn default() -> Self {
        TrapConfig {
            series_degree: 2048,
            tail_tol: 1e-13,
            boundary_samples: 4096,
            mask_resolution: 512,
            invariance_tol: 1e-9,
        }
    }
}

/// A forward-invariant neighborhood of 0: the union of a round disk certified
/// by the triangle inequality and, when available, the rasterized image
/// `h(D_s)` of the linearizing series.
#[derive(Clone, Debug)]
pub struct Trap {
    disk_radius: f64,
    mask: Option<Mask>,
    series: Option<LinearizerSeries>,
    series_radius: f64,
}

#[derive(Clone, Debug)]
struct Mask {
    x0: f64,
    y0: f64,
    cell: f64,
    n: usize,
    /// Depth in cells of each interior cell; 0 outside.
    depth: Vec<u16>,
    outer_radius: f64,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct TrapSummary {
    pub disk_radius: f64,
    pub series_radius: f64,
    pub series_degree: usize,
    pub inradius: f64,
    pub outer_radius: f64,
}

impl Trap {
    /// The round disk alone.
    pub fn disk(radius: f64) -> Self {
        Trap { disk_radius: radius, mask: None, series: None, series_radius: 0.0 }
    }

    /// Builds the series trap, falling back to the round disk when the series
    /// cannot be validated.
    pub fn build(p: &CubicParams, disk_radius: f64, cfg: &TrapConfig) -> Self {
        let mut trap = Trap::disk(disk_radius);
        let Some(series) = LinearizerSeries::new(p, cfg.series_degree) else {
            return trap;
        };
        let s = series.safe_radius(cfg.tail_tol);
        if !(s.is_finite() && s > 0.0) {
            return trap;
        }
        let m = cfg.boundary_samples.max(64);
        let mut boundary = Vec::with_capacity(m);
        for j in 0..m {
            let w = Complex64::from_polar(s, std::f64::consts::TAU * j as f64 / m as f64);
            let (z, _) = series.eval(w);
            let (zl, _) = series.eval(p.lambda * w);
            if !z.is_finite() || (p.eval(z) - zl).norm() > cfg.invariance_tol {
                return trap;
            }
            boundary.push(z);
        }
        if let Some(mask) = Mask::rasterize(&boundary, cfg.mask_resolution) {
            trap.mask = Some(mask);
        }
        trap.series = Some(series);
        trap.series_radius = s;
        trap
    }

    pub fn summary(&self) -> TrapSummary {
        TrapSummary {
            disk_radius: self.disk_radius,
            series_radius: self.series_radius,
            series_degree: self.series.as_ref().map_or(0, |s| s.degree()),
            inradius: self.inradius(),
            outer_radius: self.mask.as_ref().map_or(self.disk_radius, |m| m.outer_radius.max(self.disk_radius)),
        }
    }

    pub fn series(&self) -> Option<&LinearizerSeries> {
        self.series.as_ref()
    }

    pub fn series_radius(&self) -> f64 {
        self.series_radius
    }

    /// Radius of a round disk about 0 inside the trap.
    pub fn inradius(&self) -> f64 {
        let m = self.mask.as_ref().map_or(0.0, |m| m.inradius());
        m.max(self.disk_radius)
    }

    pub fn contains(&self, z: Complex64) -> bool {
        self.depth(z) > 0.0
    }

    /// A lower estimate of the distance from `z` to the trap's boundary, 0 outside.
    pub fn depth(&self, z: Complex64) -> f64 {
        let r = z.norm();
        let disk = (self.disk_radius - r).max(0.0);
        match &self.mask {
            Some(m) if r < m.outer_radius => disk.max(m.depth_at(z)),
            _ => disk,
        }
    }
}

impl Mask {
    /// Scanline fill of the polygon, eroded by one cell around every cell the
    /// boundary passes through, then a chamfer distance transform.
    fn rasterize(boundary: &[Complex64], n: usize) -> Option<Mask> {
        let (mut xmin, mut xmax, mut ymin, mut ymax) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
        for z in boundary {
            xmin = xmin.min(z.re);
            xmax = xmax.max(z.re);
            ymin = ymin.min(z.im);
            ymax = ymax.max(z.im);
        }
        let span = (xmax - xmin).max(ymax - ymin);
        if !(span > 0.0) || n < 8 {
            return None;
        }
        let cell = span * 1.02 / n as f64;
        let x0 = xmin - 0.01 * span;
        let y0 = ymin - 0.01 * span;
        let mut inside = vec![false; n * n];
        let m = boundary.len();
        let mut xs: Vec<f64> = Vec::new();
        for row in 0..n {
            let y = y0 + (row as f64 + 0.5) * cell;
            xs.clear();
            for j in 0..m {
                let (a, b) = (boundary[j], boundary[(j + 1) % m]);
                if (a.im <= y) != (b.im <= y) {
                    xs.push(a.re + (y - a.im) * (b.re - a.re) / (b.im - a.im));
                }
            }
            xs.sort_by(|a, b| a.total_cmp(b));
            for pair in xs.chunks(2) {
                if pair.len() < 2 {
                    break;
                }
                let c0 = ((pair[0] - x0) / cell - 0.5).ceil().max(0.0) as usize;
                let c1 = ((pair[1] - x0) / cell - 0.5).floor();
                if c1 < 0.0 {
                    continue;
                }
                for col in c0..=(c1 as usize).min(n - 1) {
                    inside[row * n + col] = true;
                }
            }
        }
        // Cells touched by the boundary, with segments subdivided below half a cell.
        let mut touched = vec![false; n * n];
        let mark = |z: Complex64, touched: &mut Vec<bool>| {
            let c = ((z.re - x0) / cell).floor();
            let r = ((z.im - y0) / cell).floor();
            if c >= 0.0 && r >= 0.0 && (c as usize) < n && (r as usize) < n {
                touched[r as usize * n + c as usize] = true;
            }
        };
        for j in 0..m {
            let (a, b) = (boundary[j], boundary[(j + 1) % m]);
            let steps = ((b - a).norm() / (0.5 * cell)).ceil().max(1.0) as usize;
            for t in 0..steps {
                mark(a + (b - a) * (t as f64 / steps as f64), &mut touched);
            }
        }
        for r in 0..n {
            for c in 0..n {
                if touched[r * n + c] {
                    for dr in -1i64..=1 {
                        for dc in -1i64..=1 {
                            let (rr, cc) = (r as i64 + dr, c as i64 + dc);
                            if rr >= 0 && cc >= 0 && (rr as usize) < n && (cc as usize) < n {
                                inside[rr as usize * n + cc as usize] = false;
                            }
                        }
                    }
                }
            }
        }
        // Chamfer 3-4 distance to the nearest outside cell, in cells.
        const BIG: u32 = u32::MAX / 4;
        let mut dist: Vec<u32> = inside.iter().map(|&i| if i { BIG } else { 0 }).collect();
        let idx = |r: usize, c: usize| r * n + c;
        for r in 0..n {
            for c in 0..n {
                let mut d = dist[idx(r, c)];
                if d == 0 {
                    continue;
                }
                let edge = r == 0 || c == 0 || c + 1 == n;
                if edge {
                    d = d.min(3);
                } else {
                    d = d.min(dist[idx(r, c - 1)] + 3).min(dist[idx(r - 1, c)] + 3);
                    d = d.min(dist[idx(r - 1, c - 1)] + 4).min(dist[idx(r - 1, c + 1)] + 4);
                }
                dist[idx(r, c)] = d;
            }
        }
        for r in (0..n).rev() {
            for c in (0..n).rev() {
                let mut d = dist[idx(r, c)];
                if d == 0 {
                    continue;
                }
                let edge = r + 1 == n || c + 1 == n || c == 0;
                if edge {
                    d = d.min(3);
                } else {
                    d = d.min(dist[idx(r, c + 1)] + 3).min(dist[idx(r + 1, c)] + 3);
                    d = d.min(dist[idx(r + 1, c + 1)] + 4).min(dist[idx(r + 1, c - 1)] + 4);
                }
                dist[idx(r, c)] = d;
            }
        }
        // Chamfer 3-4 overestimates Euclidean distance by at most ~6%; drop one
        // cell for the cell's own extent.
        let depth: Vec<u16> = dist
            .iter()
            .map(|&d| if d == 0 { 0 } else { ((d as f64 / 3.0 / 1.06).floor() as u32).clamp(1, u16::MAX as u32) as u16 })
            .collect();
        let outer_radius = boundary.iter().map(|z| z.norm()).fold(0.0, f64::max) + 2.0 * cell;
        Some(Mask { x0, y0, cell, n, depth, outer_radius })
    }

    fn depth_at(&self, z: Complex64) -> f64 {
        let c = ((z.re - self.x0) / self.cell).floor();
        let r = ((z.im - self.y0) / self.cell).floor();
        if c < 0.0 || r < 0.0 || c as usize >= self.n || r as usize >= self.n {
            return 0.0;
        }
        let d = self.depth[r as usize * self.n + c as usize];
        if d == 0 {
            0.0
        } else {
            (d as f64 - 0.5).max(0.25) * self.cell
        }
    }

    fn inradius(&self) -> f64 {
        self.depth_at(Complex64::new(0.0, 0.0))
    }
}
