//! Command-line front end: rasters, fixed points, verification suites,
//! measure estimates and manifold traces.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use serde_json::json;

use fibdyn::escape::{compactness_probe, escape_radii, nested_backward_probe, nested_forward_probe, SampleDomain};
use fibdyn::grid::PixelGrid;
use fibdyn::manifolds::{
    curves_to_csv, saddle_frame, trace_branches, verify_kminus_decomposition, verify_kplus_decomposition,
    BoundaryOptions, SaddleBase, Side, TraceOptions,
};
use fibdyn::measure::{conjecture_explorer, estimates_to_csv, mc_measure, SampleBox, SetSelector, DEFAULT_BUDGET};
use fibdyn::partition::{verify_transition_tables, DEFAULT_MAX_DEPTH};
use fibdyn::render::{encode_output, rasterize, OutputFormat, Palette, RasterSpec, RenderMode};
use fibdyn::spectral::{classify_parameter, fixed_points, three_cycle};
use fibdyn::{Error, ParamContext};

#[derive(Parser)]
#[command(name = "fibdyn", version, about = "Dynamics of f(x, y) = (xy + c, x) on R^2 and C^2")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Rasterize a mode over a window and write PPM, CSV or JSON metadata.
    Render(RenderArgs),
    /// Fixed points, their multipliers and the 3-cycle, as JSON.
    FixedPoints {
        #[arg(long, allow_hyphen_values = true)]
        c: String,
    },
    /// Verification suites.
    Verify {
        #[command(subcommand)]
        suite: Suite,
    },
    /// Monte Carlo measure estimate as one CSV row.
    Measure(MeasureArgs),
    /// EXPLORATORY: K+ and K- estimates over a list of parameters.
    Explore {
        /// Semicolon-separated parameters, each `re[,im]`.
        #[arg(long = "c-list", allow_hyphen_values = true)]
        c_list: String,
        #[arg(long = "box", allow_hyphen_values = true)]
        sample_box: String,
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: usize,
    },
    /// Trace both branches of a stable or unstable manifold to CSV.
    Trace(TraceArgs),
}

#[derive(Args)]
struct RenderArgs {
    /// kplus-real, kminus-real, kplus-complex-slice, nested:N or limit-classes.
    #[arg(long)]
    mode: String,
    #[arg(long, allow_hyphen_values = true)]
    c: String,
    /// x0,x1,y0,y1
    #[arg(long, allow_hyphen_values = true)]
    window: String,
    /// WxH
    #[arg(long)]
    size: String,
    #[arg(long, default_value_t = 1000)]
    budget: usize,
    /// Slice height for kplus-complex-slice, `re[,im]`.
    #[arg(long, allow_hyphen_values = true)]
    y0: Option<String>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value = "ppm")]
    format: String,
}

#[derive(Subcommand)]
enum Suite {
    /// Certify every partition inclusion exactly.
    Transitions {
        #[arg(long, allow_hyphen_values = true)]
        c: f64,
        #[arg(long, default_value_t = DEFAULT_MAX_DEPTH)]
        max_depth: usize,
        /// Write one certificate file per inclusion into this directory.
        #[arg(long)]
        certificates: Option<PathBuf>,
    },
    /// Sampling checks of the K+ and K- decompositions.
    Decomposition {
        #[arg(long, allow_hyphen_values = true)]
        c: f64,
        #[arg(long, default_value_t = 10_000)]
        budget: usize,
        /// Pixels per side of the K+ grid over [-2, 2]^2.
        #[arg(long, default_value_t = 256)]
        grid: usize,
        #[arg(long, default_value_t = 1e-4)]
        tol: f64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Nested bidisk probes in both directions and the compactness probe.
    Escape {
        #[arg(long, allow_hyphen_values = true)]
        c: String,
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
        #[arg(long, default_value_t = 8)]
        n_max: usize,
        #[arg(long, default_value_t = 200)]
        budget: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
}

#[derive(Args)]
struct MeasureArgs {
    #[arg(long, allow_hyphen_values = true)]
    c: String,
    #[arg(long)]
    set: String,
    /// real:x0:x1:y0:y1, complex:(8 bounds) or polydisk:r
    #[arg(long = "box", allow_hyphen_values = true)]
    sample_box: String,
    #[arg(long, default_value_t = 10_000)]
    samples: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    budget: usize,
}

#[derive(Args)]
struct TraceArgs {
    #[arg(long, allow_hyphen_values = true)]
    c: f64,
    /// theta, p1, p2 or p3
    #[arg(long)]
    base: String,
    /// stable or unstable
    #[arg(long)]
    side: String,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 200)]
    levels: usize,
    #[arg(long, default_value_t = 1e-3)]
    arc_tol: f64,
    #[arg(long, default_value_t = 100.0)]
    max_arclen: f64,
}

enum Outcome {
    Pass,
    Fail,
}

fn parse_complex(s: &str) -> Result<Complex64, Error> {
    let bad = || Error::InvalidSpec(format!("cannot parse '{s}' as re[,im]"));
    let parts: Vec<&str> = s.split(',').collect();
    let num = |t: &str| t.trim().parse::<f64>().map_err(|_| bad());
    match parts.as_slice() {
        [re] => Ok(Complex64::new(num(re)?, 0.0)),
        [re, im] => Ok(Complex64::new(num(re)?, num(im)?)),
        _ => Err(bad()),
    }
}

fn parse_window(s: &str) -> Result<[f64; 4], Error> {
    let v: Vec<f64> = s
        .split(',')
        .map(|t| t.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|_| Error::InvalidSpec(format!("cannot parse window '{s}'")))?;
    v.try_into().map_err(|_| Error::InvalidSpec(format!("window needs four numbers, got '{s}'")))
}

fn parse_size(s: &str) -> Result<(usize, usize), Error> {
    let bad = || Error::InvalidSpec(format!("cannot parse size '{s}' as WxH"));
    let (w, h) = s.split_once(['x', 'X']).ok_or_else(bad)?;
    Ok((w.trim().parse().map_err(|_| bad())?, h.trim().parse().map_err(|_| bad())?))
}

fn write_file(path: &PathBuf, bytes: &[u8]) -> Result<(), Error> {
    std::fs::write(path, bytes).map_err(Error::from)
}

fn render(a: &RenderArgs) -> Result<Outcome, Error> {
    let mut mode: RenderMode = a.mode.parse()?;
    if let RenderMode::KplusComplexSlice { y0 } = &mut mode {
        *y0 = parse_complex(a.y0.as_deref().unwrap_or("0"))?;
    }
    let (width, height) = parse_size(&a.size)?;
    let spec = RasterSpec {
        mode,
        c: parse_complex(&a.c)?,
        window: parse_window(&a.window)?,
        width,
        height,
        budget: a.budget,
        seed: a.seed,
    };
    let format: OutputFormat = a.format.parse()?;
    let raster = rasterize(&spec)?;
    write_file(&a.out, &encode_output(&raster, format, &Palette::for_mode(mode))?)?;
    Ok(Outcome::Pass)
}

fn fixed_points_json(c: &str) -> Result<Outcome, Error> {
    let ctx = ParamContext::new(parse_complex(c)?);
    let mut v = json!({
        "c": ctx.c,
        "fixed_points": fixed_points(&ctx),
        "cycle": three_cycle(&ctx)?,
    });
    if ctx.is_real {
        v["parameter_class"] = json!(classify_parameter(ctx.c.re));
    }
    println!("{}", serde_json::to_string_pretty(&v).map_err(|e| Error::InvalidSpec(e.to_string()))?);
    Ok(Outcome::Pass)
}

fn verify_transitions(c: f64, max_depth: usize, dir: Option<&PathBuf>) -> Result<Outcome, Error> {
    let report = verify_transition_tables(c, max_depth)?;
    println!("# c = {c}, (1+c) a2 <= 1: {}", if report.product_bound { "pass" } else { "FAIL" });
    for cert in &report.certificates {
        println!("{:<8} {}", if cert.is_certified() { "pass" } else { "FAIL" }, cert.name());
    }
    if let Some(dir) = dir {
        std::fs::create_dir_all(dir)?;
        for (i, cert) in report.certificates.iter().enumerate() {
            write_file(&dir.join(format!("{i:02}.txt")), cert.to_text().as_bytes())?;
        }
    }
    let ok = report.all_certified() && report.product_bound;
    println!("{} of {} inclusions certified", report.certificates.len() - report.failures().len(), report.certificates.len());
    Ok(if ok { Outcome::Pass } else { Outcome::Fail })
}

fn verify_decomposition(c: f64, budget: usize, n: usize, tol: f64, seed: u64) -> Result<Outcome, Error> {
    let grid = PixelGrid::centered(2.0, n)?;
    let kp = verify_kplus_decomposition(c, &grid, budget, tol, &BoundaryOptions { seed, ..Default::default() })?;
    let counts = &kp.counts;
    println!("K+ grid {n}x{n} over [-2,2]^2, budget {budget}");
    println!(
        "  alpha {} theta {} cycle3 {} escape {} undecided {} ({:.4}%)",
        counts.alpha,
        counts.theta,
        counts.cycle3,
        counts.escape,
        counts.undecided,
        100.0 * kp.undecided_fraction
    );
    println!("  interior probes: {} checked, {} with a non-Bounded neighbour", kp.interior_checked, kp.interior_failures);
    println!(
        "  boundary: {} segments ({} discarded), theta {} cycle {} undecided {} failed {}, success {:.2}%",
        kp.segments_used,
        kp.segments_discarded,
        kp.approached_theta,
        kp.approached_cycle,
        kp.boundary_undecided,
        kp.boundary_failed,
        100.0 * kp.boundary_success_rate()
    );

    let r2 = escape_radii(Complex64::new(c, 0.0))?.r2;
    let kgrid = PixelGrid::centered(r2, 128)?;
    let km = verify_kminus_decomposition(c, &kgrid, budget.min(1000), tol, 500)?;
    println!("K- grid 128x128 over D_R2 (R2 = {r2:.4})");
    match km.grid_pass_fraction() {
        Some(f) => println!("  {} backward-bounded, {:.2}% reach theta/cycle or lie on a curve", km.grid_bounded, 100.0 * f),
        None => println!("  0 of {} grid points backward-bounded", km.grid_points),
    }
    println!(
        "  seeded: {} points, {} pass; vertices {} / {} backward-bounded; conditioned {} / {} bounded, {} reach theta/cycle",
        km.seeded_points,
        km.seeded_pass,
        km.vertices_backward_bounded,
        km.vertices_checked,
        km.conditioned_backward_bounded,
        km.conditioned_checked,
        km.conditioned_limit_pass
    );
    let kplus_ok = kp.undecided_fraction < 0.01 && kp.boundary_success_rate() >= 0.95 && kp.alpha_neighbourhood_interior;
    let grid_ok = km.grid_pass_fraction().map_or(true, |f| f >= 0.95);
    let seeded_ok = km.conditioned_limit_pass as f64 >= 0.95 * km.conditioned_checked as f64
        && km.conditioned_backward_bounded == km.conditioned_checked;
    Ok(if kplus_ok && grid_ok && seeded_ok { Outcome::Pass } else { Outcome::Fail })
}

fn verify_escape(c: &str, samples: usize, n_max: usize, budget: usize, seed: u64) -> Result<Outcome, Error> {
    let ctx = ParamContext::new(parse_complex(c)?);
    let radii = escape_radii(ctx.c)?;
    let mut ok = true;
    for (name, probe) in [("forward", nested_forward_probe as fn(_, _, _, _, _, _) -> _), ("backward", nested_backward_probe)] {
        let r = probe(&ctx, radii.r2, n_max, samples, seed, SampleDomain::Complex)?;
        println!(
            "{name:<8} nested probe R = {:.4}: levels {:?}, {} violations",
            radii.r2,
            r.level_counts,
            r.violations.len()
        );
        ok &= r.is_monotone();
    }
    let cp = compactness_probe(&ctx, budget, samples, seed)?;
    println!(
        "compactness: {} points of K found, max |x| {:.4}, max |y| {:.4}, bound R^3 = {:.4}",
        cp.k_points, cp.max_abs[0], cp.max_abs[1], cp.bound
    );
    ok &= cp.within_bound();
    Ok(if ok { Outcome::Pass } else { Outcome::Fail })
}

fn measure(a: &MeasureArgs) -> Result<Outcome, Error> {
    let ctx = ParamContext::new(parse_complex(&a.c)?);
    let set: SetSelector = a.set.parse()?;
    let b: SampleBox = a.sample_box.parse()?;
    let e = mc_measure(&ctx, set, b, a.samples, a.seed, a.budget)?;
    print!("{}", estimates_to_csv(&[e], false));
    Ok(Outcome::Pass)
}

fn explore(c_list: &str, sample_box: &str, samples: usize, seed: u64, budget: usize) -> Result<Outcome, Error> {
    let cs = c_list
        .split(';')
        .filter(|t| !t.trim().is_empty())
        .map(parse_complex)
        .collect::<Result<Vec<_>, _>>()?;
    let rows = conjecture_explorer(&cs, sample_box.parse()?, samples, seed, budget)?;
    print!("{}", estimates_to_csv(&rows, true));
    Ok(Outcome::Pass)
}

fn trace(a: &TraceArgs) -> Result<Outcome, Error> {
    let side = match a.side.as_str() {
        "stable" => Side::Stable,
        "unstable" => Side::Unstable,
        s => return Err(Error::InvalidSpec(format!("unknown side '{s}' (stable, unstable)"))),
    };
    let frame = saddle_frame(&ParamContext::real(a.c), SaddleBase::parse(&a.base)?)?;
    let opts = TraceOptions { levels: a.levels, arc_tol: a.arc_tol, max_arclen: a.max_arclen, ..Default::default() };
    let curves = trace_branches(&frame, side, &opts)?;
    write_file(&a.out, curves_to_csv(&curves).as_bytes())?;
    Ok(Outcome::Pass)
}

fn run(cli: Cli) -> Result<Outcome, Error> {
    match cli.command {
        Command::Render(a) => render(&a),
        Command::FixedPoints { c } => fixed_points_json(&c),
        Command::Verify { suite } => match suite {
            Suite::Transitions { c, max_depth, certificates } => verify_transitions(c, max_depth, certificates.as_ref()),
            Suite::Decomposition { c, budget, grid, tol, seed } => verify_decomposition(c, budget, grid, tol, seed),
            Suite::Escape { c, samples, n_max, budget, seed } => verify_escape(&c, samples, n_max, budget, seed),
        },
        Command::Measure(a) => measure(&a),
        Command::Explore { c_list, sample_box, samples, seed, budget } => {
            explore(&c_list, &sample_box, samples, seed, budget)
        }
        Command::Trace(a) => trace(&a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(Outcome::Pass) => ExitCode::SUCCESS,
        Ok(Outcome::Fail) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
