//! Parameter-slice classification, rendering, perturbation ladders, and
//! round-annulus moduli.

use std::fmt;
use std::path::Path;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cubic::{
    basin_estimate, classify_hyperbolic, escape_classify, perturb, siegel_capture_probe, BasinConfig,
    CaptureEvidence, CaptureVerdict, CriticalPair, CubicParams, EscapeReport, EscapeStatus, HyperbolicClass,
    HyperbolicReport, ProbeConfig, ProbeStart, Trap, TrapConfig,
};
use crate::error::{Error, Result};
use crate::lamina::Chord;
use crate::rays::{rational_lamination_sample, RayConfig};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(tag = "label", content = "index")]
pub enum Label {
    Escape,
    Principal,
    IACapture(u32),
    OtherHyperbolic,
    SiegelCaptureCandidate(u32),
    Unresolved,
}

impl Label {
    pub fn name(&self) -> &'static str {
        match self {
            Label::Escape => "Escape",
            Label::Principal => "Principal",
            Label::IACapture(_) => "IACapture",
            Label::OtherHyperbolic => "OtherHyperbolic",
            Label::SiegelCaptureCandidate(_) => "SiegelCaptureCandidate",
            Label::Unresolved => "Unresolved",
        }
    }

    /// The preperiod `m` or capture step `n`, when the label carries one.
    pub fn index(&self) -> Option<u32> {
        match self {
            Label::IACapture(m) | Label::SiegelCaptureCandidate(m) => Some(*m),
            _ => None,
        }
    }

    pub fn is_hyperbolic_bounded(&self) -> bool {
        matches!(self, Label::Principal | Label::IACapture(_))
    }

    /// Index into [`PALETTE`].
    pub fn palette_index(&self) -> u8 {
        let shade = |k: u32| (k.clamp(1, SHADES as u32) - 1) as u8;
        match self {
            Label::Escape => 0,
            Label::Principal => 1,
            Label::IACapture(m) => 2 + shade(*m),
            Label::OtherHyperbolic => 2 + SHADES,
            Label::SiegelCaptureCandidate(n) => 3 + SHADES + shade(*n),
            Label::Unresolved => 3 + 2 * SHADES,
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.index() {
            Some(k) => write!(f, "{}({k})", self.name()),
            None => f.write_str(self.name()),
        }
    }
}

impl From<HyperbolicClass> for Label {
    fn from(c: HyperbolicClass) -> Self {
        match c {
            HyperbolicClass::Principal => Label::Principal,
            HyperbolicClass::IACapture(m) => Label::IACapture(m),
            HyperbolicClass::OtherHyperbolic => Label::OtherHyperbolic,
            HyperbolicClass::Unresolved => Label::Unresolved,
        }
    }
}

/// Shades per indexed family; larger indices share the darkest shade.
const SHADES: u8 = 8;

/// The fixed palette: white, blue, eight greens (m = 1..8+), gray, eight reds
/// (n = 1..8+), black.
pub const PALETTE: [[u8; 3]; 20] = [
    [255, 255, 255],
    [40, 80, 220],
    [150, 235, 150],
    [120, 215, 120],
    [95, 195, 95],
    [70, 175, 70],
    [50, 155, 50],
    [35, 135, 35],
    [20, 115, 20],
    [10, 95, 10],
    [128, 128, 128],
    [255, 150, 150],
    [245, 120, 120],
    [235, 95, 95],
    [225, 70, 70],
    [210, 50, 50],
    [190, 35, 35],
    [170, 20, 20],
    [150, 10, 10],
    [0, 0, 0],
];

/// Text stored in the PNG describing [`PALETTE`].
pub fn palette_legend() -> String {
    let mut out = String::new();
    for (i, rgb) in PALETTE.iter().enumerate() {
        let what = match i as u8 {
            0 => "Escape".to_string(),
            1 => "Principal".to_string(),
            k if k < 2 + SHADES => format!("IACapture m={}{}", k - 1, if k == 1 + SHADES { "+" } else { "" }),
            k if k == 2 + SHADES => "OtherHyperbolic".to_string(),
            k if k < 3 + 2 * SHADES => {
                let n = k - 2 - SHADES;
                format!("SiegelCaptureCandidate n={n}{}", if n == SHADES { "+" } else { "" })
            }
            _ => "Unresolved".to_string(),
        };
        out.push_str(&format!("{i}: #{:02x}{:02x}{:02x} {what}\n", rgb[0], rgb[1], rgb[2]));
    }
    out
}

#[derive(Clone, Debug)]
pub struct AtlasConfig {
    pub escape_iter: usize,
    /// `||λ| − 1|` at or below this routes to the capture probe.
    pub unit_tol: f64,
    pub basin: BasinConfig,
    pub probe: ProbeConfig,
}

impl Default for AtlasConfig {
    fn default() -> Self {
        AtlasConfig {
            escape_iter: 1000,
            unit_tol: 1e-9,
            basin: BasinConfig { resolution: 160, ..BasinConfig::default() },
            probe: ProbeConfig::default(),
        }
    }
}

impl AtlasConfig {
    /// Coarser grids for whole-slice rendering.
    pub fn for_slices() -> Self {
        let mut cfg = AtlasConfig::default();
        cfg.basin.resolution = 64;
        cfg.basin.trap = TrapConfig { mask_resolution: 128, series_degree: 512, ..TrapConfig::default() };
        cfg.probe.trap = Some(TrapConfig { mask_resolution: 128, series_degree: 512, ..TrapConfig::default() });
        cfg
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Evidence {
    pub escape: EscapeReport,
    pub hyperbolic: Option<HyperbolicReport>,
    pub capture: Vec<CaptureEvidence>,
    pub note: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct Classification {
    pub lambda: Complex64,
    pub b: Complex64,
    pub label: Label,
    pub evidence: Evidence,
}

impl Classification {
    /// Compact diagnostics for CSV output.
    fn diagnostics(&self) -> String {
        let e = &self.evidence;
        let esc = e.escape.escape_iter.map(|k| k.map_or("-".to_string(), |k| k.to_string()));
        let mut out = format!("escape={}/{}", esc[0], esc[1]);
        if let Some(h) = &e.hyperbolic {
            let arr = h.arrival.map(|k| k.map_or("-".to_string(), |k| k.to_string()));
            out.push_str(&format!(" arrival={}/{} cells={}", arr[0], arr[1], h.component_cells));
        }
        for c in &e.capture {
            out.push_str(&format!(" probe={:?}", c.verdict));
        }
        out
    }
}

/// Escape test first; then the hyperbolic classifier inside the unit disk,
/// the capture probe on the unit circle, and nothing further outside.
pub fn classify_point(lambda: Complex64, b: Complex64, cfg: &AtlasConfig) -> Classification {
    let p = CubicParams::new(lambda, b);
    let escape = escape_classify(&p, cfg.escape_iter, p.escape_radius());
    let mut out = Classification {
        lambda,
        b,
        label: Label::Unresolved,
        evidence: Evidence { escape, hyperbolic: None, capture: Vec::new(), note: String::new() },
    };
    if escape.status != EscapeStatus::BothBounded {
        out.label = Label::Escape;
        return out;
    }
    let modulus = lambda.norm();
    if (modulus - 1.0).abs() <= cfg.unit_tol {
        let theta = (lambda.arg() / std::f64::consts::TAU).rem_euclid(1.0);
        let mut best: Option<u32> = None;
        for i in 0..2 {
            let probe = ProbeConfig { start: ProbeStart::Critical(i), ..cfg.probe.clone() };
            let lam_exact = CubicParams::new(Complex64::from_polar(1.0, std::f64::consts::TAU * theta), b);
            match siegel_capture_probe(&lam_exact, theta, &probe) {
                Ok(ev) => {
                    if ev.verdict == CaptureVerdict::Captured {
                        if let Some(n) = ev.trap_entry {
                            best = Some(best.map_or(n as u32, |m| m.min(n as u32)));
                        }
                    }
                    out.evidence.capture.push(ev);
                }
                Err(e) => {
                    out.evidence.note = e.to_string();
                    return out;
                }
            }
        }
        if let Some(n) = best {
            out.label = Label::SiegelCaptureCandidate(n);
        } else {
            out.evidence.note = "no critical orbit entered the Siegel trap with a captured tail".into();
        }
    } else if modulus < 1.0 {
        match classify_hyperbolic(&p, &cfg.basin) {
            Ok(r) => {
                out.label = r.class.into();
                out.evidence.hyperbolic = Some(r);
            }
            Err(e) => out.evidence.note = e.to_string(),
        }
    } else {
        out.evidence.note = "repelling marked fixed point: escape-only labels".into();
    }
    out
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SliceSpec {
    pub lambda: Complex64,
    /// `[x0, x1, y0, y1]` in the b-plane.
    pub window: [f64; 4],
    pub width: usize,
    pub height: usize,
}

impl SliceSpec {
    fn validate(&self) -> Result<()> {
        let [x0, x1, y0, y1] = self.window;
        if !(x1 > x0 && y1 > y0) || !self.window.iter().all(|v| v.is_finite()) {
            return Err(Error::input("slice window must have positive area"));
        }
        if self.width == 0 || self.height == 0 {
            return Err(Error::input("slice resolution must be positive"));
        }
        Ok(())
    }

    /// Center of pixel `(i, j)`, row 0 at the top.
    pub fn pixel_center(&self, i: usize, j: usize) -> Complex64 {
        let [x0, x1, y0, y1] = self.window;
        Complex64::new(
            x0 + (i as f64 + 0.5) * (x1 - x0) / self.width as f64,
            y1 - (j as f64 + 0.5) * (y1 - y0) / self.height as f64,
        )
    }
}

pub struct SliceRender {
    pub spec: SliceSpec,
    /// Row-major, row 0 at the top.
    pub pixels: Vec<Classification>,
    pub png: Vec<u8>,
    pub csv: String,
}

impl SliceRender {
    pub fn counts(&self) -> std::collections::BTreeMap<String, usize> {
        let mut m = std::collections::BTreeMap::new();
        for p in &self.pixels {
            *m.entry(p.label.to_string()).or_insert(0) += 1;
        }
        m
    }

    /// Writes `<prefix>.png` and `<prefix>.csv`.
    pub fn write(&self, prefix: &Path) -> Result<()> {
        let png = prefix.with_extension("png");
        let csv = prefix.with_extension("csv");
        std::fs::write(&png, &self.png).map_err(|e| Error::io(&png, e))?;
        std::fs::write(&csv, &self.csv).map_err(|e| Error::io(&csv, e))?;
        Ok(())
    }
}

pub const CSV_HEADER: &str = "re_b,im_b,label,index,diagnostics";

/// Classifies every pixel center on a pool of `workers` threads (the global
/// pool when `None`). Results are collected in pixel order, so output bytes do
/// not depend on the schedule.
pub fn render_slice(spec: &SliceSpec, cfg: &AtlasConfig, workers: Option<usize>) -> Result<SliceRender> {
    spec.validate()?;
    let (w, h) = (spec.width, spec.height);
    let run = || -> Vec<Classification> {
        (0..w * h)
            .into_par_iter()
            .map(|k| {
                let b = spec.pixel_center(k % w, k / w);
                classify_point(spec.lambda, b, cfg)
            })
            .collect()
    };
    let pixels = match workers {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .map_err(|e| Error::input(format!("thread pool: {e}")))?
            .install(run),
        None => run(),
    };
    let indices: Vec<u8> = pixels.iter().map(|p| p.label.palette_index()).collect();
    let png = encode_png(w, h, &indices)?;
    let mut csv = String::with_capacity(w * h * 64);
    csv.push_str(CSV_HEADER);
    csv.push('\n');
    for p in &pixels {
        let idx = p.label.index().map_or(String::new(), |k| k.to_string());
        csv.push_str(&format!("{:.17e},{:.17e},{},{idx},{}\n", p.b.re, p.b.im, p.label.name(), p.diagnostics()));
    }
    Ok(SliceRender { spec: spec.clone(), pixels, png, csv })
}

fn encode_png(w: usize, h: usize, indices: &[u8]) -> Result<Vec<u8>> {
    let mut buf = Vec::new();
    {
        let mut enc = png::Encoder::new(&mut buf, w as u32, h as u32);
        enc.set_color(png::ColorType::Indexed);
        enc.set_depth(png::BitDepth::Eight);
        enc.set_palette(PALETTE.iter().flatten().copied().collect::<Vec<u8>>());
        enc.add_text_chunk("palette".to_string(), palette_legend())
            .map_err(|e| Error::input(format!("png: {e}")))?;
        let mut writer = enc.write_header().map_err(|e| Error::input(format!("png: {e}")))?;
        writer.write_image_data(indices).map_err(|e| Error::input(format!("png: {e}")))?;
    }
    Ok(buf)
}

#[derive(Clone, Debug, Serialize)]
pub struct Rung {
    pub eps: f64,
    pub label: Label,
    pub critical: CriticalPair,
    /// Per critical point (continued from the base): in the component of 0.
    pub in_component: [bool; 2],
    /// The small-disk samples all lie in component cells.
    pub disk_in_component: bool,
    pub lamination: Option<Vec<Chord>>,
    pub hyperbolic: Option<HyperbolicReport>,
}

#[derive(Clone, Debug, Serialize)]
pub struct PerturbationReport {
    pub base: CubicParams,
    pub rungs: Vec<Rung>,
    /// The common label of the tail of the ladder (at least two rungs), if it
    /// is Principal or IACapture.
    pub stabilized: Option<Label>,
    pub tail_length: usize,
    /// Index (into the continued critical pair) of the critical point whose
    /// base orbit never enters the Siegel trap, when exactly one does.
    pub recurrent_index: Option<usize>,
    /// The recurrent critical point lies in the component of 0 on every tail rung.
    pub recurrent_in_component: Option<bool>,
    /// Radius of the sampled disk about 0.
    pub disk_radius: f64,
    pub lamination_constant_on_tail: Option<bool>,
}

#[derive(Clone, Debug)]
pub struct PathConfig {
    pub atlas: AtlasConfig,
    /// Rational angles up to this denominator for the lamination sample; 0 skips it.
    pub lamination_q_max: u32,
    pub disk_samples: usize,
}

impl Default for PathConfig {
    fn default() -> Self {
        PathConfig { atlas: AtlasConfig::default(), lamination_q_max: 0, disk_samples: 64 }
    }
}

/// Classifies `perturb(base, ε)` down a decreasing ladder and reports the
/// label the tail settles on.
pub fn perturbation_path_report(base: &CubicParams, ladder: &[f64], cfg: &PathConfig) -> Result<PerturbationReport> {
    if ladder.is_empty() {
        return Err(Error::input("empty epsilon ladder"));
    }
    if ladder.iter().any(|e| !(*e > 0.0 && *e < 1.0)) || ladder.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::input("epsilon ladder must decrease strictly inside (0, 1)"));
    }
    let modulus = base.lambda.norm();
    if (modulus - 1.0).abs() > cfg.atlas.unit_tol {
        return Err(Error::Domain(format!("base multiplier has modulus {modulus}, not 1")));
    }
    let base_crit = base.critical_points();
    let siegel = Trap::build(base, 0.0, cfg.atlas.probe.trap.as_ref().unwrap_or(&TrapConfig::default()));
    let recurrent_index = if siegel.series().is_some() {
        let enters = base_crit.as_array().map(|c| {
            let mut z = c;
            (0..1000).any(|_| {
                let hit = siegel.contains(z);
                z = base.eval(z);
                hit
            })
        });
        match enters {
            [true, false] => Some(1),
            [false, true] => Some(0),
            _ => None,
        }
    } else {
        None
    };
    // K: half the inradius of the trap of f_ε at the smallest rung.
    let smallest = perturb(base, *ladder.last().unwrap())?;
    let disk_radius = 0.5 * cfg.atlas.basin.build_trap(&smallest).inradius();
    let samples: Vec<Complex64> = (0..cfg.disk_samples.max(1))
        .flat_map(|k| {
            let a = std::f64::consts::TAU * k as f64 / cfg.disk_samples.max(1) as f64;
            [Complex64::from_polar(disk_radius, a), Complex64::from_polar(0.5 * disk_radius, a)]
        })
        .collect();

    let mut rungs = Vec::with_capacity(ladder.len());
    let mut prev = base_crit;
    for &eps in ladder {
        let p = perturb(base, eps)?;
        let critical = p.critical_points().continue_from(&prev);
        prev = critical;
        let c = classify_point(p.lambda, p.b, &cfg.atlas);
        let hyperbolic = c.evidence.hyperbolic.clone();
        let in_component = match &hyperbolic {
            Some(h) => {
                let same = (h.critical.c1 - critical.c1).norm() <= (h.critical.c1 - critical.c2).norm();
                if same {
                    h.in_component
                } else {
                    [h.in_component[1], h.in_component[0]]
                }
            }
            None => [false, false],
        };
        let disk_in_component = match basin_estimate(&p, &cfg.atlas.basin) {
            Ok(est) => samples.iter().all(|&z| est.cell_of(z).is_some_and(|(i, j)| est.in_component(i, j))),
            Err(_) => false,
        };
        let lamination = (cfg.lamination_q_max > 0)
            .then(|| rational_lamination_sample(&p, cfg.lamination_q_max, 1e-6, &RayConfig::default()).ok())
            .flatten()
            .map(|s| s.lamination.leaves().iter().cloned().collect());
        rungs.push(Rung { eps, label: c.label, critical, in_component, disk_in_component, lamination, hyperbolic });
    }
    let last = rungs.last().unwrap().label;
    let tail_length = rungs.iter().rev().take_while(|r| r.label == last).count();
    let stabilized = (tail_length >= 2 && last.is_hyperbolic_bounded()).then_some(last);
    let tail = &rungs[rungs.len() - tail_length..];
    let recurrent_in_component = recurrent_index.map(|i| tail.iter().all(|r| r.in_component[i]));
    let lamination_constant_on_tail = (cfg.lamination_q_max > 0).then(|| {
        tail.iter().all(|r| r.lamination.is_some() && r.lamination == tail[0].lamination)
    });
    Ok(PerturbationReport {
        base: *base,
        rungs,
        stabilized,
        tail_length,
        recurrent_index,
        recurrent_in_component,
        disk_radius,
        lamination_constant_on_tail,
    })
}

/// The round annulus `r < |z| < R`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Annulus {
    r: f64,
    big_r: f64,
}

impl Annulus {
    pub fn new(r: f64, big_r: f64) -> Result<Self> {
        if !(r > 0.0 && big_r > r && big_r.is_finite()) {
            return Err(Error::input(format!("annulus needs 0 < r < R, got r={r}, R={big_r}")));
        }
        Ok(Annulus { r, big_r })
    }

    pub fn inner(&self) -> f64 {
        self.r
    }

    pub fn outer(&self) -> f64 {
        self.big_r
    }

    pub fn contains_annulus(&self, other: &Annulus) -> bool {
        self.r <= other.r && other.big_r <= self.big_r
    }
}

/// `ln(R/r)/2π`.
pub fn annulus_modulus(a: &Annulus) -> f64 {
    (a.big_r / a.r).ln() / std::f64::consts::TAU
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn point_examples() {
        let cfg = AtlasConfig::default();
        assert_eq!(classify_point(c(0.5, 0.0), c(0.0, 0.0), &cfg).label, Label::Principal);
        let far = classify_point(c(0.5, 0.0), c(10.0, 0.0), &cfg).label;
        assert!(matches!(far, Label::Escape | Label::OtherHyperbolic));
        assert_eq!(classify_point(c(0.0, 0.0), c(0.0, 0.0), &cfg).label, Label::Principal);
        assert_eq!(classify_point(c(1.5, 0.0), c(0.0, 0.0), &cfg).label, Label::Unresolved);
    }

    #[test]
    fn palette_is_distinct_and_documented() {
        let mut seen = std::collections::HashSet::new();
        assert!(PALETTE.iter().all(|c| seen.insert(*c)));
        let legend = palette_legend();
        assert_eq!(legend.lines().count(), PALETTE.len());
        assert_eq!(Label::Unresolved.palette_index() as usize, PALETTE.len() - 1);
        assert_eq!(Label::IACapture(1).palette_index(), 2);
        assert_eq!(Label::IACapture(100).palette_index(), Label::IACapture(8).palette_index());
    }

    #[test]
    fn annulus_examples() {
        let a = Annulus::new(1.0, std::f64::consts::TAU.exp()).unwrap();
        assert!((annulus_modulus(&a) - 1.0).abs() < 1e-15);
        let m1 = annulus_modulus(&Annulus::new(2.0, 4.0).unwrap());
        let m2 = annulus_modulus(&Annulus::new(3.0, 6.0).unwrap());
        assert!((m1 - m2).abs() < 1e-15);
        assert!(Annulus::new(1.0, 1.0).is_err());
    }

    #[test]
    fn slice_rejects_degenerate_window() {
        let spec = SliceSpec { lambda: c(0.5, 0.0), window: [0.0, 0.0, -1.0, 1.0], width: 4, height: 4 };
        assert!(render_slice(&spec, &AtlasConfig::for_slices(), Some(1)).is_err());
    }

    #[test]
    fn ladder_input_errors() {
        let base = CubicParams::new(Complex64::from_polar(1.0, 2.0), c(0.1, 0.0));
        assert!(perturbation_path_report(&base, &[], &PathConfig::default()).is_err());
        assert!(perturbation_path_report(&base, &[1e-3, 1e-2], &PathConfig::default()).is_err());
    }
}
