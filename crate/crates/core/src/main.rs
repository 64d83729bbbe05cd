use std::path::PathBuf;
use std::process::ExitCode;

use capture_atlas::atlas::{self, Label, PathConfig, SliceSpec};
use capture_atlas::blaschke::NormalizedBlaschke;
use capture_atlas::brjuno::{self, ContinuedFraction, GrowthRule, HighPrecisionReal};
use capture_atlas::cubic::{self, CriticalBranch, CubicParams, SeedGrid};
use capture_atlas::lamina::{self, Angle, Lamination};
use capture_atlas::rays::{self, RayConfig};
use capture_atlas::{Error, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigUint;
use num_complex::Complex64;
use serde_json::json;

#[derive(Parser)]
#[command(name = "capture-atlas", version, about = "Cubic dynamics: slices, classification, rays, laminations")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Clone)]
struct LambdaArg {
    /// Multiplier at 0 as `re,im`.
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true, conflicts_with = "theta")]
    lambda: Option<Complex64>,
    /// Multiplier on the unit circle, `λ = e^{2πiθ}`.
    #[arg(long)]
    theta: Option<f64>,
}

impl LambdaArg {
    fn get(&self) -> Result<Complex64> {
        match (self.lambda, self.theta) {
            (Some(l), None) => Ok(l),
            (None, Some(t)) => Ok(Complex64::from_polar(1.0, std::f64::consts::TAU * t)),
            _ => Err(Error::Input("give --lambda re,im or --theta t".into())),
        }
    }
}

#[derive(Subcommand)]
enum Cmd {
    /// Classify every pixel of a b-plane slice; writes <out>.png and <out>.csv.
    Slice {
        /// SliceSpec as a JSON file; overrides the flags below.
        #[arg(long)]
        spec: Option<PathBuf>,
        #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
        lambda: Option<Complex64>,
        /// `x0,x1,y0,y1`.
        #[arg(long, allow_hyphen_values = true)]
        window: Option<String>,
        /// `WxH`.
        #[arg(long, default_value = "256x256")]
        res: String,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        workers: Option<usize>,
    },
    /// Classify a single parameter.
    Classify {
        #[command(flatten)]
        lambda: LambdaArg,
        #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
        b: Complex64,
    },
    /// Trace and land an external ray; the polyline goes to --csv.
    Ray {
        #[command(flatten)]
        lambda: LambdaArg,
        #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
        b: Complex64,
        /// Angle as `p/q`.
        #[arg(long)]
        angle: Angle,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Lamination utilities.
    Lamination {
        #[command(subcommand)]
        cmd: LaminationCmd,
    },
    /// Continued fraction and Brjuno partial sums.
    Brjuno {
        /// θ as a decimal string, read as the interval of its last digit.
        #[arg(long, group = "input")]
        theta: Option<String>,
        /// Partial quotients `a1,a2,...`.
        #[arg(long, group = "input")]
        quotients: Option<String>,
        /// The golden mean `(√5 − 1)/2`.
        #[arg(long, group = "input")]
        golden: bool,
        /// Build a prefix whose sum diverges.
        #[arg(long, group = "input", value_enum)]
        non_brjuno: Option<Rule>,
        /// Number of quotients.
        #[arg(long, default_value_t = 40)]
        n: usize,
    },
    /// Normalized quadratic Blaschke product `Q_a`.
    Blaschke {
        #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
        a: Complex64,
        /// Orbit length for the near-circle check.
        #[arg(long, default_value_t = 20)]
        m: usize,
    },
    /// Solve `f^n(c(b)) = 0` for b.
    Centers {
        #[command(flatten)]
        lambda: LambdaArg,
        #[arg(long)]
        n: u32,
        #[arg(long, value_enum, default_value = "both")]
        branch: Branch,
    },
    /// Classify `((1 − ε)λ, b)` down a ladder of ε.
    PerturbPath {
        #[command(flatten)]
        lambda: LambdaArg,
        #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
        b: Complex64,
        /// Comma-separated, strictly decreasing.
        #[arg(long, default_value = "1e-2,1e-3,1e-4,1e-5,1e-6")]
        eps_ladder: String,
        /// Also compare rational laminations up to this denominator.
        #[arg(long, default_value_t = 0)]
        lamination_q: u32,
    },
}

#[derive(Subcommand)]
enum LaminationCmd {
    /// Sibling invariance, gaps and gap degrees of a lamination file.
    Check { file: PathBuf },
}

#[derive(Clone, Copy, ValueEnum)]
enum Branch {
    Plus,
    Minus,
    Both,
}

#[derive(Clone, Copy, ValueEnum)]
enum Rule {
    ExpOverQ,
    PowerOfQ,
}

fn parse_complex(s: &str) -> std::result::Result<Complex64, String> {
    let v = parse_floats(s)?;
    match v[..] {
        [re] => Ok(Complex64::new(re, 0.0)),
        [re, im] => Ok(Complex64::new(re, im)),
        _ => Err(format!("expected re,im, got '{s}'")),
    }
}

fn parse_floats(s: &str) -> std::result::Result<Vec<f64>, String> {
    s.split(',').map(|t| t.trim().parse::<f64>().map_err(|e| format!("'{t}': {e}"))).collect()
}

/// Outcome of a command: the JSON to print and whether it was conclusive.
struct Outcome {
    json: serde_json::Value,
    conclusive: bool,
}

impl Outcome {
    fn done(json: serde_json::Value) -> Self {
        Outcome { json, conclusive: true }
    }
}

fn to_json<T: serde::Serialize>(v: &T) -> serde_json::Value {
    serde_json::to_value(v).expect("report types serialize")
}

fn run(cmd: Cmd) -> Result<Outcome> {
    match cmd {
        Cmd::Slice { spec, lambda, window, res, out, workers } => {
            let spec = match spec {
                Some(path) => {
                    let text = std::fs::read_to_string(&path).map_err(|e| Error::Io {
                        path: path.display().to_string(),
                        msg: e.to_string(),
                    })?;
                    serde_json::from_str::<SliceSpec>(&text).map_err(|e| Error::Input(format!("slice spec: {e}")))?
                }
                None => {
                    let lambda = lambda.ok_or(Error::Input("--lambda or --spec required".into()))?;
                    let w = parse_floats(window.as_deref().unwrap_or("-3,3,-3,3")).map_err(Error::Input)?;
                    let window: [f64; 4] =
                        w.try_into().map_err(|_| Error::Input("window needs x0,x1,y0,y1".into()))?;
                    let (wd, ht) = res.split_once('x').ok_or(Error::Input(format!("bad --res '{res}'")))?;
                    let parse = |s: &str| s.parse::<usize>().map_err(|e| Error::Input(format!("--res: {e}")));
                    SliceSpec { lambda, window, width: parse(wd)?, height: parse(ht)? }
                }
            };
            let render = atlas::render_slice(&spec, &atlas::AtlasConfig::for_slices(), workers)?;
            render.write(&out)?;
            Ok(Outcome::done(json!({
                "png": out.with_extension("png"),
                "csv": out.with_extension("csv"),
                "counts": render.counts(),
            })))
        }
        Cmd::Classify { lambda, b } => {
            let c = atlas::classify_point(lambda.get()?, b, &atlas::AtlasConfig::default());
            Ok(Outcome { conclusive: c.label != Label::Unresolved, json: to_json(&c) })
        }
        Cmd::Ray { lambda, b, angle, csv } => {
            let p = CubicParams::new(lambda.get()?, b);
            let cfg = RayConfig::default();
            let ray = rays::trace_ray(&p, &angle, &cfg)?;
            if let Some(path) = &csv {
                std::fs::write(path, ray.to_csv())
                    .map_err(|e| Error::Io { path: path.display().to_string(), msg: e.to_string() })?;
            }
            let landing = rays::land_rational_ray(&p, &angle, &cfg);
            let conclusive = ray.failure.is_none() && landing.is_ok();
            Ok(Outcome {
                json: json!({
                    "angle": angle,
                    "points": ray.points.len(),
                    "end": ray.end(),
                    "failure": ray.failure,
                    "landing": landing.as_ref().ok(),
                    "landing_error": landing.as_ref().err().map(|e| e.to_string()),
                }),
                conclusive,
            })
        }
        Cmd::Lamination { cmd: LaminationCmd::Check { file } } => {
            let text = std::fs::read_to_string(&file)
                .map_err(|e| Error::Io { path: file.display().to_string(), msg: e.to_string() })?;
            let lam = Lamination::parse(&text)?;
            let d = lam.degree();
            let sibling = lamina::check_sibling_invariant(&lam);
            let gaps: Vec<_> = lamina::gaps(&lam)
                .into_iter()
                .map(|g| {
                    let degree = lamina::gap_degree(&g, d);
                    json!({ "vertices": g.vertices, "degree": degree })
                })
                .collect();
            Ok(Outcome::done(json!({ "degree": d.get(), "leaves": lam.len(), "sibling": sibling, "gaps": gaps })))
        }
        Cmd::Brjuno { theta, quotients, golden, non_brjuno, n } => {
            if let Some(rule) = non_brjuno {
                let rule = match rule {
                    Rule::ExpOverQ => GrowthRule::ExpOverQ,
                    Rule::PowerOfQ => GrowthRule::PowerOfQ,
                };
                let nb = brjuno::make_non_brjuno(rule, n, 1 << 16);
                let sums = brjuno::brjuno_partial_sums(&nb.cf)?;
                return Ok(Outcome::done(json!({ "construction": nb, "sums": sums })));
            }
            let cf = if let Some(q) = quotients {
                let qs = q
                    .split(',')
                    .map(|t| t.trim().parse::<BigUint>().map_err(|e| Error::Input(format!("'{t}': {e}"))))
                    .collect::<Result<Vec<_>>>()?;
                ContinuedFraction::from_quotients(qs)?
            } else if golden {
                brjuno::cf_expand(&HighPrecisionReal::golden_mean(64 + 2 * n as u32), n)?
            } else if let Some(t) = theta {
                brjuno::cf_expand(&HighPrecisionReal::from_decimal(&t)?, n)?
            } else {
                return Err(Error::Input("give --theta, --quotients, --golden or --non-brjuno".into()));
            };
            let sums = brjuno::brjuno_partial_sums(&cf)?;
            Ok(Outcome::done(json!({ "approximation": cf.approximation(), "cf": cf, "sums": sums })))
        }
        Cmd::Blaschke { a, m } => {
            let q = NormalizedBlaschke::new(a)?;
            let c = q.critical_point_in_disk();
            Ok(Outcome::done(json!({
                "a": a,
                "critical_point": c,
                "critical_value": q.critical_value(),
                "critical_value_closed_form": q.critical_value_closed_form(),
                "derivative_at_zero": q.derivative(Complex64::new(0.0, 0.0))?,
                "expansion_margin": q.expansion_margin(0),
                "critical_orbit_min_modulus": q.critical_orbit_near_circle(m),
            })))
        }
        Cmd::Centers { lambda, n, branch } => {
            let lambda = lambda.get()?;
            let branch = match branch {
                Branch::Plus => CriticalBranch::Plus,
                Branch::Minus => CriticalBranch::Minus,
                Branch::Both => CriticalBranch::Both,
            };
            let bs = cubic::solve_center_curve(lambda, n, branch, SeedGrid::default())?;
            let rows: Vec<_> = bs
                .iter()
                .map(|&b| json!({ "b": b, "critical_point": cubic::landing_critical_point(lambda, b, n) }))
                .collect();
            Ok(Outcome::done(json!({ "lambda": lambda, "n": n, "solutions": rows })))
        }
        Cmd::PerturbPath { lambda, b, eps_ladder, lamination_q } => {
            let ladder = parse_floats(&eps_ladder).map_err(Error::Input)?;
            let base = CubicParams::new(lambda.get()?, b);
            let cfg = PathConfig { lamination_q_max: lamination_q, ..PathConfig::default() };
            let r = atlas::perturbation_path_report(&base, &ladder, &cfg)?;
            Ok(Outcome { conclusive: r.stabilized.is_some(), json: to_json(&r) })
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli.cmd) {
        Ok(out) => {
            use std::io::Write;
            // A closed pipe downstream is not a failure of the computation.
            let _ = writeln!(std::io::stdout(), "{}", serde_json::to_string_pretty(&out.json).expect("json values print"));
            if out.conclusive {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(2)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
