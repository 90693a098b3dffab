//! The `ffimg` command line: `simulate`, `image`, `hull`.
//!
//! Exit codes: 0 success, 1 runtime error, 2 usage error.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::error::Error;
use crate::forward::{add_noise, synthesize, DirectionSet, WavenumberGrid};
use crate::imaging::{
    compute_field, reconstruct_hull, IndicatorMode, SamplingGrid, DEFAULT_THRESHOLD,
    PROFILE_SAMPLES,
};
use crate::io;

#[derive(Debug, Parser)]
#[command(
    name = "ffimg",
    version,
    about = "Far-field synthesis and support imaging for 2D sources"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Synthesize far-field data for a scene and write it as CSV.
    #[command(after_help = EXPR_HELP)]
    Simulate(SimulateArgs),
    /// Evaluate an indicator on a sampling grid.
    Image(ImageArgs),
    /// Reconstruct a convex hull from strips of several directions.
    Hull(HullArgs),
}

const EXPR_HELP: &str = "Amplitude expressions in scene files use x, y, k, pi, i, numbers, \
+ - * / ^ and sin cos exp expi sqrt abs. ^ is right-associative and binds tighter \
than unary minus: -x^2 is -(x^2). expi(t) = exp(i t).";

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Aperture {
    Sparse,
    Full,
}

#[derive(Debug, Args)]
struct SimulateArgs {
    /// Built-in scene name (fig2a, fig2b, f1, f2, triangle, slab) or scene JSON path.
    #[arg(long)]
    scene: String,
    /// Far-field CSV to write; parameters go to <OUT>.meta.json.
    #[arg(long)]
    out: PathBuf,
    /// sparse: half-circle directions; full: uniform on [0, 2 pi).
    #[arg(long, value_enum, default_value = "sparse")]
    mode: Aperture,
    /// Directions for sparse mode, phi_j = -pi/2 + j pi/M [default: 20]
    #[arg(long = "M", conflicts_with = "q")]
    m: Option<usize>,
    /// Directions for full mode, phi_q = 2 pi q/Q [default: 64]
    #[arg(long = "Q")]
    q: Option<usize>,
    /// Number of wavenumbers, k_j = (j - 1/2) kmax/N.
    #[arg(long = "N", default_value_t = 20)]
    n: usize,
    /// Largest wavenumber.
    #[arg(long, default_value_t = 20.0)]
    kmax: f64,
    /// Mesh size; defaults to the scene's mesh_h.
    #[arg(long)]
    h: Option<f64>,
    /// Relative noise level delta.
    #[arg(long, default_value_t = 0.0)]
    noise: f64,
    /// Noise generator seed.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Debug, Args)]
struct ImageArgs {
    /// Far-field CSV written by `simulate`.
    #[arg(long)]
    data: PathBuf,
    /// single:m (one-based), multi, multi-raw or full.
    #[arg(long, value_parser = parse_mode)]
    mode: ModeArg,
    /// x_lo:x_hi:n_x,y_lo:y_hi:n_y
    #[arg(long, value_parser = parse_grid, allow_hyphen_values = true, default_value = "-4:4:81,-4:4:81")]
    grid: SamplingGrid,
    /// Indicator CSV to write.
    #[arg(long)]
    out: PathBuf,
    /// Also write an 8-bit binary PGM image.
    #[arg(long)]
    pgm: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct HullArgs {
    /// Far-field CSV written by `simulate`.
    #[arg(long)]
    data: PathBuf,
    /// `all` or one-based direction indices, e.g. 1,11.
    #[arg(long, default_value = "all")]
    dirs: String,
    /// Strip level as a fraction of each profile's maximum, in (0, 1).
    #[arg(long, default_value_t = DEFAULT_THRESHOLD)]
    threshold: f64,
    /// Grid whose projection bounds each strip profile.
    #[arg(long, value_parser = parse_grid, allow_hyphen_values = true, default_value = "-4:4:81,-4:4:81")]
    grid: SamplingGrid,
    /// Hull JSON to write.
    #[arg(long)]
    out: PathBuf,
}

/// `single:m` keeps the one-based index as typed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum ModeArg {
    Single(usize),
    Multi,
    MultiRaw,
    Full,
}

impl ModeArg {
    fn name(self) -> String {
        match self {
            ModeArg::Single(m) => format!("single:{m}"),
            ModeArg::Multi => "multi".into(),
            ModeArg::MultiRaw => "multi-raw".into(),
            ModeArg::Full => "full".into(),
        }
    }
}

fn parse_mode(s: &str) -> Result<ModeArg, String> {
    match s {
        "multi" => Ok(ModeArg::Multi),
        "multi-raw" => Ok(ModeArg::MultiRaw),
        "full" => Ok(ModeArg::Full),
        _ => {
            let idx = s
                .strip_prefix("single:")
                .ok_or_else(|| format!("expected single:m, multi, multi-raw or full, got {s:?}"))?;
            match idx.parse::<usize>() {
                Ok(m) if m >= 1 => Ok(ModeArg::Single(m)),
                _ => Err(format!(
                    "direction index must be a positive integer, got {idx:?}"
                )),
            }
        }
    }
}

fn parse_axis(s: &str) -> Result<(f64, f64, usize), String> {
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() != 3 {
        return Err(format!("expected lo:hi:n, got {s:?}"));
    }
    let num = |p: &str| {
        p.trim()
            .parse::<f64>()
            .map_err(|_| format!("bad number {p:?}"))
    };
    let n = parts[2]
        .trim()
        .parse::<usize>()
        .map_err(|_| format!("bad point count {:?}", parts[2]))?;
    Ok((num(parts[0])?, num(parts[1])?, n))
}

fn parse_grid(s: &str) -> Result<SamplingGrid, String> {
    let (x, y) = s
        .split_once(',')
        .ok_or_else(|| format!("expected x_lo:x_hi:n_x,y_lo:y_hi:n_y, got {s:?}"))?;
    let (x_lo, x_hi, nx) = parse_axis(x)?;
    let (y_lo, y_hi, ny) = parse_axis(y)?;
    SamplingGrid::new(x_lo, x_hi, nx, y_lo, y_hi, ny).map_err(|e| e.to_string())
}

enum Failure {
    Usage(String),
    Runtime(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Runtime(e)
    }
}

type Outcome = Result<(), Failure>;

fn grid_json(g: &SamplingGrid) -> Value {
    let (x_lo, x_hi) = g.x_range();
    let (y_lo, y_hi) = g.y_range();
    json!({"x_lo": x_lo, "x_hi": x_hi, "nx": g.nx(), "y_lo": y_lo, "y_hi": y_hi, "ny": g.ny()})
}

fn path_json(p: &Path) -> Value {
    Value::String(p.display().to_string())
}

fn base_meta(command: &str) -> BTreeMap<String, Value> {
    let mut meta = BTreeMap::new();
    meta.insert("command".into(), json!(command));
    meta.insert("version".into(), json!(env!("CARGO_PKG_VERSION")));
    meta
}

fn simulate(args: SimulateArgs) -> Outcome {
    let dirs = match args.mode {
        Aperture::Sparse => {
            if args.q.is_some() {
                return Err(Failure::Usage(
                    "--Q applies to --mode full; use --M for sparse".into(),
                ));
            }
            DirectionSet::sparse(args.m.unwrap_or(20))
        }
        Aperture::Full => {
            if args.m.is_some() {
                return Err(Failure::Usage(
                    "--M applies to --mode sparse; use --Q for full".into(),
                ));
            }
            DirectionSet::full(args.q.unwrap_or(64))
        }
    }
    .map_err(|e| Failure::Usage(e.to_string()))?;
    let kgrid =
        WavenumberGrid::new(args.n, args.kmax).map_err(|e| Failure::Usage(e.to_string()))?;
    let loaded = io::load_scene(&args.scene)?;
    let h = args.h.unwrap_or(loaded.mesh_h);
    let clean = synthesize(&loaded.scene, &dirs, &kgrid, h)?;
    let data = add_noise(&clean, args.noise, args.seed)?;
    io::write_far_field_csv(&data, &args.out)?;

    let mut meta = base_meta("simulate");
    meta.insert("scene".into(), json!(args.scene));
    meta.insert("out".into(), path_json(&args.out));
    meta.insert(
        "mode".into(),
        json!(match args.mode {
            Aperture::Sparse => "sparse",
            Aperture::Full => "full",
        }),
    );
    meta.insert(
        match args.mode {
            Aperture::Sparse => "M",
            Aperture::Full => "Q",
        }
        .into(),
        json!(dirs.len()),
    );
    meta.insert("N".into(), json!(kgrid.len()));
    meta.insert("kmax".into(), json!(kgrid.k_max()));
    meta.insert("h".into(), json!(h));
    meta.insert("noise".into(), json!(args.noise));
    meta.insert("seed".into(), json!(args.seed));
    meta.insert("rows".into(), json!(data.values().len()));
    io::write_metadata(&args.out, &meta)?;
    println!(
        "wrote {} rows to {}",
        data.values().len(),
        args.out.display()
    );
    Ok(())
}

fn image(args: ImageArgs) -> Outcome {
    let data = io::read_far_field_csv(&args.data)?;
    let mode = match args.mode {
        ModeArg::Single(m) => {
            if m > data.n_directions() {
                return Err(Failure::Usage(format!(
                    "single:{m} out of range, data has {} directions",
                    data.n_directions()
                )));
            }
            IndicatorMode::Single(m - 1)
        }
        ModeArg::Multi => IndicatorMode::MultiNormalized,
        ModeArg::MultiRaw => IndicatorMode::MultiRaw,
        ModeArg::Full => IndicatorMode::Full,
    };
    let field = compute_field(&data, mode, &args.grid, true)?;
    if field.peak().value <= 0.0 {
        return Err(Error::DegenerateData("indicator vanishes on the whole grid".into()).into());
    }
    io::write_field_csv(&field, &args.out)?;
    if let Some(pgm) = &args.pgm {
        io::write_field_pgm(&field, pgm)?;
    }

    let peak = field.peak();
    let mut meta = base_meta("image");
    meta.insert("data".into(), path_json(&args.data));
    meta.insert("out".into(), path_json(&args.out));
    meta.insert(
        "pgm".into(),
        args.pgm.as_deref().map_or(Value::Null, path_json),
    );
    meta.insert("mode".into(), json!(args.mode.name()));
    meta.insert("grid".into(), grid_json(&args.grid));
    meta.insert("normalized".into(), json!(field.is_normalized()));
    meta.insert(
        "peak".into(),
        json!({"value": peak.value, "ix": peak.ix, "iy": peak.iy, "x": peak.location.x, "y": peak.location.y}),
    );
    meta.insert("M".into(), json!(data.n_directions()));
    meta.insert("N".into(), json!(data.n_wavenumbers()));
    meta.insert("kmax".into(), json!(data.kgrid().k_max()));
    io::write_metadata(&args.out, &meta)?;
    println!(
        "wrote {} values to {} (peak {:.6e} at {})",
        args.grid.len(),
        args.out.display(),
        peak.value,
        peak.location
    );
    Ok(())
}

fn parse_dirs(spec: &str, available: usize) -> Result<Vec<usize>, Failure> {
    if spec == "all" {
        return Ok((0..available).collect());
    }
    spec.split(',')
        .map(|t| match t.trim().parse::<usize>() {
            Ok(i) if (1..=available).contains(&i) => Ok(i - 1),
            _ => Err(Failure::Usage(format!(
                "--dirs entry {t:?} is not an index in 1..={available}"
            ))),
        })
        .collect()
}

fn hull(args: HullArgs) -> Outcome {
    if !(args.threshold > 0.0 && args.threshold < 1.0) {
        return Err(Failure::Usage(format!(
            "--threshold must lie in (0, 1), got {}",
            args.threshold
        )));
    }
    let data = io::read_far_field_csv(&args.data)?;
    let dirs = parse_dirs(&args.dirs, data.n_directions())?;
    let normals: Vec<_> = dirs
        .iter()
        .map(|m| data.directions().direction(*m))
        .collect();
    let independent = normals
        .iter()
        .enumerate()
        .any(|(i, a)| normals[i + 1..].iter().any(|b| a.cross(*b).abs() > 1e-12));
    if !independent {
        return Err(Failure::Usage(
            "hull needs at least two directions with independent normals".into(),
        ));
    }
    let estimate = reconstruct_hull(&data, &dirs, &args.grid, args.threshold)?;
    let out = io::HullJson::new(&estimate, data.directions());
    io::write_hull_json(&out, &args.out)?;

    let mut meta = base_meta("hull");
    meta.insert("data".into(), path_json(&args.data));
    meta.insert("out".into(), path_json(&args.out));
    meta.insert(
        "dirs".into(),
        json!(dirs.iter().map(|m| m + 1).collect::<Vec<_>>()),
    );
    meta.insert("threshold".into(), json!(args.threshold));
    meta.insert("grid".into(), grid_json(&args.grid));
    meta.insert("profile_samples".into(), json!(PROFILE_SAMPLES));
    meta.insert("M".into(), json!(data.n_directions()));
    meta.insert("N".into(), json!(data.n_wavenumbers()));
    meta.insert("kmax".into(), json!(data.kgrid().k_max()));
    meta.insert("area".into(), json!(estimate.polygon.area()));
    io::write_metadata(&args.out, &meta)?;
    println!(
        "wrote hull with {} vertices (area {:.6}) to {}",
        out.polygon.len(),
        estimate.polygon.area(),
        args.out.display()
    );
    Ok(())
}

/// Run the CLI on `argv` (program name first) and return the exit code.
pub fn cli_main<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let outcome = match cli.command {
        Command::Simulate(a) => simulate(a),
        Command::Image(a) => image(a),
        Command::Hull(a) => hull(a),
    };
    match outcome {
        Ok(()) => 0,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}\n\nFor more information, try '--help'.");
            2
        }
        Err(Failure::Runtime(e)) => {
            eprintln!("error: {e}");
            1
        }
    }
}
