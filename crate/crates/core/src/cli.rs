//! Command-line front end: configuration parsing, experiment drivers and
//! report files.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::embed;
use crate::error::{Error, Result};
use crate::field::{Grid, ScalarField, VectorField};
use crate::gen;
use crate::io;
use crate::kernel;
use crate::norms::{self, Geometry, Resolution, Side, WindowFamily};
use crate::ns::{self, SolverConfig};

#[derive(Parser, Debug)]
#[command(name = "qalpha", version, about = "Q_alpha norms, embedding checks and mild Navier-Stokes runs")]
struct Cli {
    #[command(subcommand)]
    command: CommandKind,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug, Default)]
struct Common {
    #[arg(long, global = true)]
    alpha: Option<String>,
    #[arg(long = "T", global = true)]
    horizon: Option<String>,
    #[arg(long = "n", global = true)]
    dim: Option<String>,
    #[arg(long = "N", global = true)]
    size: Option<String>,
    #[arg(long = "L", global = true)]
    length: Option<String>,
    #[arg(long, global = true)]
    seed: Option<String>,
    #[arg(long, global = true)]
    threads: Option<String>,
    #[arg(long = "in", global = true)]
    input: Option<String>,
    #[arg(long, global = true)]
    out: Option<String>,
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    kind: Option<String>,
    /// Any other configuration key, as `key=value`.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    set: Vec<String>,
}

#[derive(Subcommand, Debug, Clone, Copy, PartialEq, Eq)]
pub enum CommandKind {
    /// Evaluate one norm-engine functional on a field file.
    Norm,
    /// Sharp constants, extremal ratios, energy identity and BMO bound.
    EmbedCheck,
    /// Schur sums and the two space-time inequalities.
    KernelCheck,
    /// Picard solve from initial data.
    NsRun,
    /// Picard solves over a list of amplitudes.
    NsSweep,
    /// Compare a run with its parabolically rescaled twin.
    ScaleCheck,
    /// Write a synthetic field corpus.
    Gen,
}

/// Every setting of a run; filled from defaults, then the config file, then
/// flags.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentConfig {
    #[serde(skip)]
    pub command: Option<CommandKind>,
    pub n: usize,
    #[serde(rename = "N")]
    pub size: usize,
    #[serde(rename = "L")]
    pub length: f64,
    pub alpha: f64,
    /// `None` is an infinite horizon.
    #[serde(rename = "T")]
    pub horizon: Option<f64>,
    pub seed: u64,
    pub threads: Option<usize>,
    pub input: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub kind: Option<String>,
    pub geometry: Option<String>,
    pub stride: Option<usize>,
    pub radii: Option<Vec<f64>>,
    pub per_side: Option<usize>,
    pub nodes: usize,
    pub time_nodes: usize,
    pub component: usize,
    #[serde(rename = "M")]
    pub steps: usize,
    pub tolerance: f64,
    pub max_iterations: usize,
    pub dealias: bool,
    pub epsilon: Option<f64>,
    pub lambda: usize,
    pub amplitude: f64,
    pub amplitudes: Vec<f64>,
    pub data: String,
    pub kmax: usize,
    pub count: usize,
    pub mode: Vec<i64>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            command: None,
            n: 2,
            size: 32,
            length: 1.0,
            alpha: 0.5,
            horizon: None,
            seed: 0,
            threads: None,
            input: None,
            out: None,
            kind: None,
            geometry: None,
            stride: None,
            radii: None,
            per_side: None,
            nodes: norms::DEFAULT_NODES,
            time_nodes: 16,
            component: 0,
            steps: 128,
            tolerance: 1e-10,
            max_iterations: 30,
            dealias: true,
            epsilon: None,
            lambda: 2,
            amplitude: 1.0,
            amplitudes: vec![1e-3, 1e-2, 1e-1],
            data: "taylor-green".into(),
            kmax: 3,
            count: 1,
            mode: vec![1, 0],
        }
    }
}

fn parse_num<T: std::str::FromStr>(key: &str, v: &str) -> Result<T> {
    v.trim()
        .parse()
        .map_err(|_| Error::param(key, format!("cannot parse `{v}`")))
}

fn parse_list<T: std::str::FromStr>(key: &str, v: &str) -> Result<Vec<T>> {
    v.split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| parse_num(key, s))
        .collect()
}

fn parse_bool(key: &str, v: &str) -> Result<bool> {
    match v.trim() {
        "true" | "on" | "1" | "yes" => Ok(true),
        "false" | "off" | "0" | "no" => Ok(false),
        _ => Err(Error::param(key, format!("expected a boolean, got `{v}`"))),
    }
}

fn parse_horizon(v: &str) -> Result<Option<f64>> {
    match v.trim() {
        "inf" | "infinity" => Ok(None),
        s => {
            let t: f64 = parse_num("T", s)?;
            if !(t > 0.0) {
                return Err(Error::param("T", format!("{t} must be positive")));
            }
            Ok(t.is_finite().then_some(t))
        }
    }
}

/// Reads `key = value` lines; `#` starts a comment.
pub fn parse_config_text(text: &str) -> Result<BTreeMap<String, String>> {
    let mut map = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Error::param("config", format!("line {}: expected key = value", i + 1)))?;
        map.insert(k.trim().to_string(), v.trim().to_string());
    }
    Ok(map)
}

impl ExperimentConfig {
    /// Applies `key = value` settings; unknown keys and bad values are errors
    /// naming the key.
    pub fn apply(&mut self, settings: &BTreeMap<String, String>) -> Result<()> {
        for (key, v) in settings {
            let k = key.as_str();
            match k {
                "n" => self.n = parse_num(k, v)?,
                "N" => self.size = parse_num(k, v)?,
                "L" => self.length = parse_num(k, v)?,
                "alpha" => self.alpha = parse_num(k, v)?,
                "T" => self.horizon = parse_horizon(v)?,
                "seed" => self.seed = parse_num(k, v)?,
                "threads" => self.threads = Some(parse_num(k, v)?),
                "in" => self.input = Some(PathBuf::from(v)),
                "out" => self.out = Some(PathBuf::from(v)),
                "kind" => self.kind = Some(v.clone()),
                "geometry" => self.geometry = Some(v.clone()),
                "stride" => self.stride = Some(parse_num(k, v)?),
                "radii" => self.radii = Some(parse_list(k, v)?),
                "per_side" => self.per_side = Some(parse_num(k, v)?),
                "nodes" => self.nodes = parse_num(k, v)?,
                "time_nodes" => self.time_nodes = parse_num(k, v)?,
                "component" => self.component = parse_num(k, v)?,
                "M" => self.steps = parse_num(k, v)?,
                "tolerance" => self.tolerance = parse_num(k, v)?,
                "max_iterations" => self.max_iterations = parse_num(k, v)?,
                "dealias" => self.dealias = parse_bool(k, v)?,
                "epsilon" => self.epsilon = Some(parse_num(k, v)?),
                "lambda" => self.lambda = parse_num(k, v)?,
                "amplitude" => self.amplitude = parse_num(k, v)?,
                "amplitudes" => self.amplitudes = parse_list(k, v)?,
                "data" => self.data = v.clone(),
                "kmax" => self.kmax = parse_num(k, v)?,
                "count" => self.count = parse_num(k, v)?,
                "mode" => self.mode = parse_list(k, v)?,
                _ => return Err(Error::param(k, "unknown configuration key")),
            }
        }
        Ok(())
    }

    pub fn grid(&self) -> Result<Grid> {
        Grid::new(self.n, self.size, self.length)
    }

    fn horizon_or(&self, default: f64) -> f64 {
        self.horizon.unwrap_or(default)
    }

    fn out_dir(&self) -> Result<PathBuf> {
        let dir = self.out.clone().unwrap_or_else(|| PathBuf::from("."));
        fs::create_dir_all(&dir)?;
        Ok(dir)
    }

    fn solver(&self, grid: Grid) -> Result<SolverConfig> {
        let mut c = SolverConfig::new(grid, self.alpha, self.horizon_or(0.1))?;
        c.steps = self.steps;
        c.tolerance = self.tolerance;
        c.max_iterations = self.max_iterations;
        c.dealias = self.dealias;
        c.nodes = self.time_nodes;
        if self.radii.is_some() || self.stride.is_some() || self.per_side.is_some() {
            c.family = Some(self.family(grid, Geometry::Ball)?);
        }
        c.validate()?;
        Ok(c)
    }

    fn family(&self, grid: Grid, default: Geometry) -> Result<WindowFamily> {
        let geometry = match self.geometry.as_deref() {
            None => default,
            Some("cube") => Geometry::Cube,
            Some("ball") => Geometry::Ball,
            Some(g) => return Err(Error::param("geometry", format!("`{g}` is neither cube nor ball"))),
        };
        let mut fam = WindowFamily::new(grid, geometry)?;
        if let Some(s) = self.stride {
            fam = fam.with_stride(s)?;
        }
        if let Some(r) = &self.radii {
            fam = fam.with_radii(r.clone())?;
        }
        if let Some(p) = self.per_side {
            fam = fam.with_resolution(Resolution::PerSide(p))?;
        }
        Ok(fam)
    }

    /// Initial data: `--in` if given, else the `data` generator.
    fn velocity(&self, grid: Grid) -> Result<VectorField> {
        if let Some(path) = &self.input {
            return load_input(path, |p| io::load_vector(p));
        }
        match self.data.as_str() {
            "taylor-green" => Ok(gen::taylor_green(grid, self.amplitude)),
            "divergence-free" | "random" => Ok(gen::divergence_free(grid, self.kmax, self.seed)?.scale(self.amplitude)),
            d => Err(Error::param("data", format!("`{d}` is not a velocity generator"))),
        }
    }
}

fn build_config(cli: &Cli) -> Result<ExperimentConfig> {
    let mut cfg = ExperimentConfig {
        command: Some(cli.command),
        ..Default::default()
    };
    if let Some(path) = &cli.common.config {
        cfg.apply(&parse_config_text(&fs::read_to_string(path)?)?)?;
    }
    let c = &cli.common;
    let mut flags = BTreeMap::new();
    for (k, v) in [
        ("alpha", &c.alpha),
        ("T", &c.horizon),
        ("n", &c.dim),
        ("N", &c.size),
        ("L", &c.length),
        ("seed", &c.seed),
        ("threads", &c.threads),
        ("in", &c.input),
        ("out", &c.out),
        ("kind", &c.kind),
    ] {
        if let Some(v) = v {
            flags.insert(k.to_string(), v.clone());
        }
    }
    for kv in &c.set {
        let (k, v) = kv
            .split_once('=')
            .ok_or_else(|| Error::param("set", format!("`{kv}` is not key=value")))?;
        flags.insert(k.trim().to_string(), v.trim().to_string());
    }
    cfg.apply(&flags)?;
    Ok(cfg)
}

/// Parses `argv`, runs the command and returns the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let outcome = build_config(&cli).and_then(|cfg| match cfg.threads {
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build()
            .map_err(|e| Error::param("threads", e.to_string()))?
            .install(|| execute(&cfg)),
        None => execute(&cfg),
    });
    match outcome {
        Ok(summary) => {
            eprintln!("{summary}");
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

/// Runs a parsed configuration; returns the one-line summary.
pub fn execute(cfg: &ExperimentConfig) -> Result<String> {
    match cfg.command {
        Some(CommandKind::Norm) => norm(cfg),
        Some(CommandKind::EmbedCheck) => embed_check(cfg),
        Some(CommandKind::KernelCheck) => kernel_check(cfg),
        Some(CommandKind::NsRun) => ns_run(cfg),
        Some(CommandKind::NsSweep) => ns_sweep(cfg),
        Some(CommandKind::ScaleCheck) => scale_check(cfg),
        Some(CommandKind::Gen) => generate(cfg),
        None => Err(Error::param("command", "missing")),
    }
}

fn write(dir: &Path, name: &str, text: &str) -> Result<PathBuf> {
    let path = dir.join(name);
    fs::write(&path, text)?;
    Ok(path)
}

/// Writes only after every report is computed, so a failed run leaves no files.
fn write_all(cfg: &ExperimentConfig, files: &[(&str, String)]) -> Result<()> {
    let dir = cfg.out_dir()?;
    for (name, text) in files {
        write(&dir, name, text)?;
    }
    Ok(())
}

fn load_input<T>(path: &Path, load: impl Fn(&Path) -> Result<T>) -> Result<T> {
    load(path).map_err(|e| match e {
        Error::Io(io) => Error::param("in", format!("{}: {io}", path.display())),
        e => e,
    })
}

fn load_scalar(cfg: &ExperimentConfig) -> Result<ScalarField> {
    let path = cfg
        .input
        .as_ref()
        .ok_or_else(|| Error::param("in", "an input field file is required"))?;
    let fields = load_input(path, |p| io::load(p))?;
    fields
        .into_iter()
        .nth(cfg.component)
        .ok_or_else(|| Error::param("component", format!("{} is past the last field", cfg.component)))
}

#[derive(Serialize)]
struct ScalarValue<'a> {
    kind: &'a str,
    alpha: f64,
    value: f64,
}

fn norm(cfg: &ExperimentConfig) -> Result<String> {
    let kind = cfg
        .kind
        .as_deref()
        .ok_or_else(|| Error::param("kind", "required for `norm`"))?;
    let f = load_scalar(cfg)?;
    let grid = *f.grid();
    let alpha = cfg.alpha;
    let horizon = cfg.horizon.unwrap_or(f64::INFINITY);
    let json = match kind {
        "sobolev" | "sobolev-real" => {
            let side = if kind == "sobolev" { Side::Fourier } else { Side::RealSpace };
            let value = norms::sobolev_seminorm(&f, alpha, side)?;
            serde_json::to_string_pretty(&ScalarValue { kind, alpha, value })?
        }
        _ => {
            let family = cfg.family(grid, norms::default_geometry(kind))?;
            let report = norms::evaluate(&f, kind, alpha, horizon, &family, cfg.nodes)?;
            if cfg.out.is_some() {
                let dir = cfg.out_dir()?;
                write(&dir, "windows.csv", &report.to_csv())?;
            }
            report.to_json()?
        }
    };
    println!("{json}");
    if cfg.out.is_some() {
        write(&cfg.out_dir()?, "norm.json", &format!("{json}\n"))?;
    }
    Ok(format!("norm kind={kind} alpha={alpha}"))
}

const SHARP_CASES: [(usize, f64); 3] = [(2, 0.3), (2, 0.5), (3, 0.5)];

fn embed_check(cfg: &ExperimentConfig) -> Result<String> {
    let constants = embed::constants_table_csv(&[2, 3], &[0.25, 0.3, 0.5, 0.7, 0.75])?;
    let mut sharp = String::from("n,alpha,constant,extremal_ratio,gaussian_ratio\n");
    let mut worst: f64 = 0.0;
    for (n, a) in SHARP_CASES {
        let c = embed::sharp_sobolev_constant(n, a)?.constant;
        let e = embed::extremal_ratio(n, a, 8)?.ratio;
        let g = embed::gaussian_ratio(n, a)?.ratio;
        worst = worst.max((e / c - 1.0).abs());
        let _ = writeln!(sharp, "{n},{a},{c},{e},{g}");
    }
    let grid = cfg.grid()?;
    let cubes = cfg.family(grid, Geometry::Cube)?;
    let mut energy = String::from("index,lhs,rhs,relative_gap\n");
    let mut bmo = String::from("index,alpha,ratio,bound\n");
    let mut gap: f64 = 0.0;
    let mut bound_excess: f64 = 0.0;
    let mut rng = gen::rng(cfg.seed);
    for i in 0..cfg.count {
        let f = gen::band_limited_with(grid, cfg.kmax, &mut rng)?;
        let e = embed::poisson_energy_identity(&f, cfg.alpha, cfg.nodes)?;
        let g = e.relative_gap()?;
        gap = gap.max(g);
        let _ = writeln!(energy, "{i},{},{},{g}", e.lhs, e.rhs);
        let b = embed::bmo_bound_check(&f, cfg.alpha, &cubes)?;
        bound_excess = bound_excess.max(b.ratio / b.bound);
        let _ = writeln!(bmo, "{i},{},{},{}", cfg.alpha, b.ratio, b.bound);
    }
    write_all(
        cfg,
        &[
            ("constants.csv", constants),
            ("sharpness.csv", sharp),
            ("energy.csv", energy),
            ("bmo_bound.csv", bmo),
        ],
    )?;
    Ok(format!(
        "embed-check extremal_deviation={worst:.3e} energy_gap={gap:.3e} bmo_ratio_over_bound={bound_excess:.4}"
    ))
}

fn kernel_check(cfg: &ExperimentConfig) -> Result<String> {
    let (alphas, zetas, points) = kernel::default_schur_grid();
    let rows = kernel::schur_rows(&alphas, &zetas, &points)?;
    let cols = kernel::schur_cols(&alphas, &zetas, &points)?;
    let excess = |s: &[kernel::SchurSample]| s.iter().map(|x| x.value - x.bound).fold(f64::MIN, f64::max);
    let grid = cfg.grid()?;
    let horizon = cfg.horizon_or(1.0);
    let mut regularity = String::from("index,lhs,rhs,ratio\n");
    let mut worst_regularity: f64 = 0.0;
    let corpus = kernel::oscillating_corpus(grid, cfg.kmax, cfg.alpha, horizon, cfg.time_nodes, cfg.count, cfg.seed)?;
    for (i, f) in corpus.iter().enumerate() {
        let r = kernel::regularity_inequality(f, cfg.alpha, horizon)?;
        worst_regularity = worst_regularity.max(r.ratio);
        let _ = writeln!(regularity, "{i},{},{},{}", r.lhs, r.rhs, r.ratio);
    }
    // C(f; alpha) takes radii up to 1; keep those that fit on the torus
    let mut balls = cfg.family(grid, Geometry::Ball)?;
    if cfg.radii.is_none() {
        let radii: Vec<f64> = [0.99, 0.7, 0.5, 0.35, 0.25, 0.125]
            .into_iter()
            .filter(|&r| r <= grid.length() / 2.0)
            .collect();
        balls = balls.with_radii(radii)?;
    }
    let mut duhamel = String::from("index,lhs,c_functional,rhs_l1,rhs_l2,ratio,ratio_l2\n");
    let mut worst_duhamel: f64 = 0.0;
    for (i, f) in kernel::bump_corpus(grid, cfg.alpha, cfg.time_nodes, cfg.count, cfg.seed)?
        .iter()
        .enumerate()
    {
        let r = kernel::duhamel_carleson_inequality(f, cfg.alpha, &balls, cfg.nodes)?;
        worst_duhamel = worst_duhamel.max(r.ratio);
        let _ = writeln!(
            duhamel,
            "{i},{},{},{},{},{},{}",
            r.lhs, r.c_functional, r.rhs_l1, r.rhs_l2, r.ratio, r.ratio_l2
        );
    }
    write_all(
        cfg,
        &[
            ("schur_rows.csv", kernel::schur_csv(&rows, "t")),
            ("schur_cols.csv", kernel::schur_csv(&cols, "s")),
            ("regularity.csv", regularity),
            ("duhamel_carleson.csv", duhamel),
        ],
    )?;
    Ok(format!(
        "kernel-check row_excess={:.3e} col_excess={:.3e} regularity_max_ratio={worst_regularity:.4} duhamel_carleson_max_ratio={worst_duhamel:.4}",
        excess(&rows),
        excess(&cols)
    ))
}

fn ns_run(cfg: &ExperimentConfig) -> Result<String> {
    let grid = cfg.grid()?;
    let a = cfg.velocity(grid)?;
    let solver = cfg.solver(*a.grid())?;
    let (u, d) = ns::picard_solve(&a, &solver)?;
    let dir = cfg.out_dir()?;
    write(&dir, "diagnostics.json", &format!("{}\n", d.to_json()?))?;
    io::save_vector(dir.join("solution.qafld"), u.last())?;
    let mut line = format!(
        "ns-run converged={} iterations={} residual={:.3e} admission_norm={:.4e}",
        d.converged, d.iterations, d.residual, d.admission_norm
    );
    if cfg.input.is_none() && cfg.data == "taylor-green" {
        let _ = write!(line, " taylor_green_error={:.3e}", ns::taylor_green_error(&u));
    }
    if let Some(eps) = cfg.epsilon {
        let _ = write!(line, " admitted={}", ns::admission_check(&a, &solver, eps)?.pass);
    }
    Ok(line)
}

fn ns_sweep(cfg: &ExperimentConfig) -> Result<String> {
    let grid = cfg.grid()?;
    let a = cfg.velocity(grid)?;
    let solver = cfg.solver(*a.grid())?;
    let rows = ns::contraction_sweep(&a, &cfg.amplitudes, &solver)?;
    write(&cfg.out_dir()?, "sweep.csv", &ns::sweep_csv(&rows))?;
    let threshold = ns::contraction_threshold(&rows)
        .map(|t| t.to_string())
        .unwrap_or_else(|| "none".into());
    Ok(format!("ns-sweep runs={} threshold={threshold}", rows.len()))
}

fn scale_check(cfg: &ExperimentConfig) -> Result<String> {
    let grid = cfg.grid()?;
    let a = cfg.velocity(grid)?;
    let solver = cfg.solver(*a.grid())?;
    let r = ns::scaling_experiment(&a, cfg.lambda, &solver)?;
    write(&cfg.out_dir()?, "scaling.json", &format!("{}\n", serde_json::to_string_pretty(&r)?))?;
    Ok(format!(
        "scale-check lambda={} max_relative_error={:.3e}",
        r.lambda, r.max_relative_error
    ))
}

fn generate(cfg: &ExperimentConfig) -> Result<String> {
    let grid = cfg.grid()?;
    let mut rng = gen::rng(cfg.seed);
    let mut corpus = Vec::with_capacity(cfg.count);
    for i in 0..cfg.count {
        let fields: Vec<ScalarField> = match cfg.data.as_str() {
            "random" => vec![gen::band_limited_with(grid, cfg.kmax, &mut rng)?.scale(cfg.amplitude)],
            "mode" => vec![gen::pure_mode(grid, &cfg.mode, cfg.amplitude)?],
            "taylor-green" => gen::taylor_green(grid, cfg.amplitude).into_components(),
            "divergence-free" => {
                let comps = (0..grid.dim())
                    .map(|_| gen::band_limited_with(grid, cfg.kmax, &mut rng))
                    .collect::<Result<Vec<_>>>()?;
                let v = crate::spectral::leray_project(&VectorField::new(comps)?);
                let m = v.max_abs();
                v.scale(if m > 0.0 { cfg.amplitude / m } else { 0.0 }).into_components()
            }
            d => return Err(Error::param("data", format!("unknown generator `{d}`"))),
        };
        corpus.push((format!("{}_{i:03}.qafld", cfg.data), fields));
    }
    let dir = cfg.out_dir()?;
    for (name, fields) in &corpus {
        io::save(dir.join(name), fields)?;
    }
    Ok(format!("gen data={} count={} dir={}", cfg.data, cfg.count, dir.display()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_text_and_overrides() {
        let map = parse_config_text("# comment\nalpha = 0.3\nN=16 # trailing\n\nT = inf\n").unwrap();
        let mut cfg = ExperimentConfig::default();
        cfg.apply(&map).unwrap();
        assert_eq!((cfg.alpha, cfg.size, cfg.horizon), (0.3, 16, None));
        let mut over = BTreeMap::new();
        over.insert("amplitudes".to_string(), "0.1, 0.2".to_string());
        over.insert("dealias".to_string(), "off".to_string());
        cfg.apply(&over).unwrap();
        assert_eq!(cfg.amplitudes, vec![0.1, 0.2]);
        assert!(!cfg.dealias);
    }

    #[test]
    fn bad_keys_name_the_field() {
        let mut cfg = ExperimentConfig::default();
        for (k, v) in [("bogus", "1"), ("alpha", "x"), ("T", "-1"), ("dealias", "maybe")] {
            let mut m = BTreeMap::new();
            m.insert(k.to_string(), v.to_string());
            match cfg.apply(&m) {
                Err(Error::InvalidParameter { name, .. }) => assert_eq!(name, k),
                other => panic!("{k}: {other:?}"),
            }
        }
        assert!(parse_config_text("novalue").is_err());
    }

    #[test]
    fn unknown_flag_and_subcommand_exit_2() {
        assert_eq!(run(["qalpha", "norm", "--bogus", "1"]), 2);
        assert_eq!(run(["qalpha", "frobnicate"]), 2);
        assert_eq!(run(["qalpha", "norm", "--set", "nokey"]), 2);
    }

    #[test]
    fn missing_input_is_a_validation_error() {
        assert_eq!(run(["qalpha", "norm", "--kind", "bmo"]), 2);
    }
}
