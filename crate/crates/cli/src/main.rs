use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use caisson::amoeba::{level_raster, limit_sweep, sweep_csv, Level, Slice};
use caisson::circuits::{
    base_equilibrium, certify_component, default_grid, detect_circuit, hypocycloid_implicit,
    safe_argument_intervals_with, Hypocycloid, RegionSampler,
};
use caisson::expsum::{dehomogenize, phi_transport};
use caisson::membership::dominance_threshold;
use caisson::orders::{omega_set, order_univariate, order_vector, DEFAULT_PHASE_SAMPLES};
use caisson::problem::{parse_matrix_json, parse_polar, Problem};
use caisson::raster::{components, SvgOverlay, Window};
use caisson::roots::roots_univariate;
use caisson::support_lattice::{factorize, is_lift, minimal_rational_lift, rank_r, rank_rho, rhat};
use caisson::{Complex64, Error, ExpSum, Result};
use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

#[derive(Parser)]
#[command(name = "caisson", version, about = "Caisson approximations of amoebas of exponential sums")]
struct Cli {
    /// Seed for all randomized steps (overridden by CAISSON_SEED).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads (overridden by CAISSON_THREADS).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct RasterOpts {
    /// x0,x1,y0,y1
    #[arg(long)]
    window: Option<String>,
    /// Pixels per axis.
    #[arg(long)]
    res: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Ranks r, ρ and r̂ of the support.
    Rank { problem: PathBuf },
    /// Minimal rational lift, or a lift check for a matrix given as JSON.
    Lift {
        problem: PathBuf,
        #[arg(long, conflicts_with = "check")]
        minimal: bool,
        #[arg(long)]
        check: Option<String>,
    },
    /// The factor T with A = T·B for a named lift.
    Factorize {
        problem: PathBuf,
        #[arg(long)]
        lift: String,
    },
    /// Raster of level A (sampled zeros), B (caisson) or I (lopsided).
    Raster {
        problem: PathBuf,
        #[arg(long, default_value = "I")]
        level: Level,
        #[arg(long)]
        lift: Option<String>,
        #[command(flatten)]
        opts: RasterOpts,
        /// Axes of the plane for more than two variables, e.g. 0,2.
        #[arg(long)]
        axes: Option<String>,
        /// Values of the remaining coordinates (length n).
        #[arg(long)]
        base: Option<String>,
        /// Write STEM.csv and STEM.svg instead of CSV on stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Order of the complement component containing a point.
    Order {
        problem: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        at: String,
        #[arg(long, default_value_t = DEFAULT_PHASE_SAMPLES)]
        samples: usize,
    },
    /// Orders of the complement components found in a window.
    Omega {
        problem: PathBuf,
        #[command(flatten)]
        opts: RasterOpts,
    },
    /// Roots of Σ c_k w^k, coefficients ascending (e.g. 1,0,2+1i).
    Roots {
        #[arg(long, allow_hyphen_values = true)]
        coeffs: String,
    },
    /// Smallest |c| of one term for which it can dominate.
    Threshold {
        problem: PathBuf,
        #[arg(long)]
        term: usize,
    },
    /// Barycentric-circuit certificate for a complement component.
    Certify {
        problem: PathBuf,
        #[arg(long)]
        lift: String,
        /// Barycenter coefficient as "mod,arg_pi".
        #[arg(long, allow_hyphen_values = true)]
        c: Option<String>,
        #[arg(long)]
        grid: Option<usize>,
        #[arg(long)]
        timings: bool,
        /// Write STEM.report.json and STEM.svg.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Arguments of the barycenter coefficient that keep the component.
    Intervals {
        problem: PathBuf,
        #[arg(long)]
        lift: String,
        #[arg(long)]
        radius: f64,
        #[arg(long, default_value_t = 400)]
        steps: usize,
    },
    /// Hausdorff distances of f_λ to the limit as λ decreases.
    LimitSweep {
        problem: PathBuf,
        #[arg(long, allow_hyphen_values = true, default_value = "1,0.1,0.01,0.001")]
        lambdas: String,
        #[command(flatten)]
        opts: RasterOpts,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    env_logger::init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(out) => {
            if !out.is_empty() {
                print!("{out}");
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("{}", json!({"error": e.kind(), "message": e.to_string()}));
            ExitCode::from(2)
        }
    }
}

fn env_override<T: std::str::FromStr>(name: &str, flag: Option<T>) -> Result<Option<T>> {
    match std::env::var(name) {
        Ok(v) => v
            .trim()
            .parse()
            .map(Some)
            .map_err(|_| Error::Parse(format!("{name}={v:?}"))),
        Err(_) => Ok(flag),
    }
}

fn load(path: &Path) -> Result<Problem> {
    let text = fs::read_to_string(path).map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))?;
    Problem::from_json(&text)
}

fn write(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))
}

fn with_ext(stem: &Path, ext: &str) -> PathBuf {
    let mut s = stem.as_os_str().to_owned();
    s.push(ext);
    PathBuf::from(s)
}

fn pretty(v: &impl serde::Serialize) -> String {
    serde_json::to_string_pretty(v).expect("serializable") + "\n"
}

fn floats(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|_| Error::Parse(format!("number {t:?}"))))
        .collect()
}

fn parse_window(s: &str) -> Result<Window> {
    match floats(s)?.as_slice() {
        [a, b, c, d] => Window::new(*a, *b, *c, *d),
        _ => Err(Error::Parse(format!("window {s:?}: expected x0,x1,y0,y1"))),
    }
}

/// `f` with the homogenizing row removed.
fn affine(p: &Problem) -> Result<ExpSum> {
    if p.f.support().top_row_is_ones() {
        dehomogenize(&p.f)
    } else {
        Ok(p.f.clone())
    }
}

/// Window from the flag, the problem, or centered on an equilibrium point of
/// a circuit lift.
fn window_for(p: &Problem, f: &ExpSum, flag: Option<&str>) -> Result<Window> {
    if let Some(s) = flag {
        return parse_window(s);
    }
    if let Some(w) = p.window {
        return Ok(w);
    }
    let base = p.base_sum()?;
    let center = p
        .lifts
        .values()
        .find_map(|l| base_equilibrium(&base, l))
        .filter(|x| x.len() == f.nvars())
        .unwrap_or_else(|| vec![0.0; f.nvars()]);
    let cy = center.get(1).copied().unwrap_or(0.0);
    Window::new(center[0] - 3.0, center[0] + 3.0, cy - 3.0, cy + 3.0)
}

fn resolution(p: &Problem, flag: Option<usize>, n: usize) -> [usize; 2] {
    let r = flag.or(p.resolution).unwrap_or(400).max(1);
    if n == 1 {
        [r, 1]
    } else {
        [r, r]
    }
}

fn run(cli: Cli) -> Result<String> {
    if let Some(t) = env_override("CAISSON_THREADS", cli.threads)? {
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .map_err(|e| Error::InvalidInput(e.to_string()))?;
    }
    let flag_seed = env_override("CAISSON_SEED", cli.seed)?;
    let seed_for = |p: &Problem| flag_seed.or(p.seed).unwrap_or(0);

    match cli.command {
        Command::Rank { problem } => {
            let p = load(&problem)?;
            let a = p.f.support();
            Ok(pretty(&json!({"r": rank_r(a), "rho": rank_rho(a), "rhat": rhat(a)})))
        }
        Command::Lift { problem, minimal, check } => {
            let p = load(&problem)?;
            let base = p.base_support()?;
            if let Some(m) = check {
                let b = parse_matrix_json(&p.basis, &m)?;
                return Ok(pretty(&json!({"is_lift": is_lift(&b, base.exponents())?})));
            }
            if !minimal {
                return Err(Error::InvalidInput("pass --minimal or --check".into()));
            }
            let l = minimal_rational_lift(&base);
            Ok(pretty(&json!({
                "lift": strings(l.lift().rows()),
                "factor": strings(l.factor()),
            })))
        }
        Command::Factorize { problem, lift } => {
            let p = load(&problem)?;
            let l = p.lift(&lift)?;
            let t = factorize(l.base().exponents(), l.lift().exponents())?;
            Ok(pretty(&json!({"factor": strings(&t)})))
        }
        Command::Raster {
            problem,
            level,
            lift,
            opts,
            axes,
            base,
            out,
        } => {
            let p = load(&problem)?;
            let f = affine(&p)?;
            let n = f.nvars();
            let slice = match (axes, base) {
                (None, None) => Slice::full(n)?,
                (a, b) => {
                    let ax = a.as_deref().map(floats).transpose()?.unwrap_or_else(|| vec![0.0, 1.0]);
                    let base = b.as_deref().map(floats).transpose()?.unwrap_or_else(|| vec![0.0; n]);
                    Slice {
                        base,
                        x_axis: ax[0] as usize,
                        y_axis: ax.get(1).map(|&v| v as usize),
                    }
                }
            };
            let mut window = window_for(&p, &f, opts.window.as_deref())?;
            if slice.y_axis.is_none() {
                window = Window::line(window.x[0], window.x[1])?;
            }
            let res = resolution(&p, opts.res, if slice.y_axis.is_none() { 1 } else { 2 });
            let lift = lift.map(|name| p.lift(&name).cloned()).transpose()?;
            let r = level_raster(&f, level, lift.as_ref(), &slice, window, res)?;
            let csv = r.to_csv();
            match out {
                Some(stem) => {
                    let mut overlay = SvgOverlay::default();
                    if level != Level::A {
                        for c in components(&r) {
                            overlay.labels.push((c.representative, format!("{}", c.pixels.len())));
                        }
                    }
                    write(&with_ext(&stem, ".csv"), &csv)?;
                    write(&with_ext(&stem, ".svg"), &r.to_svg(&overlay))?;
                    Ok(String::new())
                }
                None => Ok(csv),
            }
        }
        Command::Order { problem, at, samples } => {
            let p = load(&problem)?;
            let f = affine(&p)?;
            let x = floats(&at)?;
            let order = if f.nvars() == 1 && f.is_algebraic() {
                if x.len() != 1 {
                    return Err(Error::ShapeMismatch("one coordinate expected".into()));
                }
                vec![order_univariate(&f, x[0])?]
            } else {
                order_vector(&f, &x, samples, seed_for(&p))?
            };
            Ok(pretty(&json!({"at": x, "order": order})))
        }
        Command::Omega { problem, opts } => {
            let p = load(&problem)?;
            let f = affine(&p)?;
            let window = window_for(&p, &f, opts.window.as_deref())?;
            let report = omega_set(&f, window, resolution(&p, opts.res, 2), seed_for(&p))?;
            Ok(pretty(&report))
        }
        Command::Roots { coeffs } => {
            let c = coeffs
                .split(',')
                .map(|t| {
                    t.trim()
                        .parse::<Complex64>()
                        .map_err(|_| Error::Parse(format!("coefficient {t:?}")))
                })
                .collect::<Result<Vec<_>>>()?;
            let r = roots_univariate(&c)?;
            let roots: Vec<Value> = r
                .roots
                .iter()
                .zip(&r.backward_errors)
                .map(|(z, e)| json!({"re": z.re, "im": z.im, "log_modulus": z.norm().ln(), "backward_error": e}))
                .collect();
            Ok(pretty(&json!({ "roots": roots })))
        }
        Command::Threshold { problem, term } => {
            let p = load(&problem)?;
            let t = dominance_threshold(&affine(&p)?, term)?;
            Ok(pretty(&json!({"term": term, "value": t.value, "recession": t.recession, "minimizer": t.minimizer})))
        }
        Command::Certify {
            problem,
            lift,
            c,
            grid,
            timings,
            out,
        } => {
            let p = load(&problem)?;
            let l = p.lift(&lift)?;
            let mut f = p.base_sum()?;
            let circuit = dehomogenize(&phi_transport(&f, l)?).ok().and_then(|g| detect_circuit(&g));
            if let Some(cs) = c {
                let circ = circuit
                    .as_ref()
                    .ok_or_else(|| Error::InvalidInput("--c needs a circuit lift".into()))?;
                let mut coeffs = f.coefficients().to_vec();
                coeffs[circ.barycenter_index] = parse_polar(&cs)?;
                f = f.with_coefficients(coeffs)?;
            }
            let report = certify_component(&f, l, grid, timings)?;
            let text = pretty(&report);
            if let Some(stem) = out {
                write(&with_ext(&stem, ".report.json"), &text)?;
                if let Some(circ) = detect_circuit(&dehomogenize(&phi_transport(&f, l)?)?) {
                    let sampler = RegionSampler::new(&circ, grid.unwrap_or_else(|| default_grid(circ.dim())))?;
                    write(&with_ext(&stem, ".svg"), &region_svg(&sampler, circ.barycenter_coeff, circ.dim()))?;
                }
            }
            Ok(text)
        }
        Command::Intervals {
            problem,
            lift,
            radius,
            steps,
        } => {
            let p = load(&problem)?;
            let l = p.lift(&lift)?;
            let g = dehomogenize(&phi_transport(&p.base_sum()?, l)?)?;
            let circ = detect_circuit(&g).ok_or_else(|| Error::InvalidInput("the lift is not a circuit lift".into()))?;
            let sampler = RegionSampler::new(&circ, default_grid(circ.dim()))?;
            let iv = safe_argument_intervals_with(&sampler, radius, steps)?;
            let rounded: Vec<[f64; 2]> = iv.iter().map(|i| [round2(i.start), round2(i.end)]).collect();
            Ok(pretty(&json!({"radius": radius, "intervals_pi": iv, "rounded_pi": rounded})))
        }
        Command::LimitSweep {
            problem,
            lambdas,
            opts,
            out,
        } => {
            let p = load(&problem)?;
            let fam = p.family()?;
            let window = match opts.window.as_deref() {
                Some(s) => parse_window(s)?,
                None => p.window.map_or_else(|| Window::new(-1.0, 1.0, -20.0, 20.0), Ok)?,
            };
            let rows = limit_sweep(&fam, &floats(&lambdas)?, window, resolution(&p, opts.res, 2))?;
            let csv = sweep_csv(&rows);
            match out {
                Some(path) => {
                    write(&path, &csv)?;
                    Ok(String::new())
                }
                None => Ok(csv),
            }
        }
    }
}

fn round2(x: f64) -> f64 {
    (x * 100.0).round() / 100.0
}

fn strings(rows: &[Vec<caisson::ExtScalar>]) -> Vec<Vec<String>> {
    rows.iter().map(|r| r.iter().map(|x| x.to_string()).collect()).collect()
}

/// Sampled region (grey), its hypocycloid boundary for the two worked
/// circuits, and the query point (red).
fn region_svg(s: &RegionSampler, query: Complex64, n: usize) -> String {
    let pts = s.samples();
    let extent = pts
        .iter()
        .map(|z| z.norm())
        .fold(query.norm(), f64::max)
        * 1.1;
    let size = 600.0;
    let map = |z: Complex64| ((z.re / extent + 1.0) * size / 2.0, (1.0 - z.im / extent) * size / 2.0);
    let mut out = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{size}\" height=\"{size}\">\n<rect width=\"{size}\" height=\"{size}\" fill=\"white\"/>\n<g fill=\"#999\">\n"
    );
    let stride = (pts.len() / 20_000).max(1);
    for z in pts.iter().step_by(stride) {
        let (x, y) = map(*z);
        out.push_str(&format!("<circle cx=\"{x:.2}\" cy=\"{y:.2}\" r=\"0.8\"/>\n"));
    }
    out.push_str("</g>\n");
    let example = match n {
        2 => Some(Hypocycloid::Ex1),
        3 => Some(Hypocycloid::Ex2),
        _ => None,
    };
    if let Some(ex) = example {
        let mut path = String::new();
        for k in 0..=720 {
            let theta = std::f64::consts::TAU * k as f64 / 720.0;
            // outermost sign change of h along the ray
            let (mut r, step) = (extent, extent / 400.0);
            while r > 0.0 && hypocycloid_implicit(ex, r, theta) > 0.0 {
                r -= step;
            }
            let (x, y) = map(Complex64::from_polar(r.max(0.0), theta));
            path.push_str(&format!("{}{x:.2},{y:.2} ", if k == 0 { "M" } else { "L" }));
        }
        out.push_str(&format!("<path d=\"{path}\" fill=\"none\" stroke=\"blue\"/>\n"));
    }
    let (x, y) = map(query);
    out.push_str(&format!("<circle cx=\"{x:.2}\" cy=\"{y:.2}\" r=\"4\" fill=\"red\"/>\n</svg>\n"));
    out
}
