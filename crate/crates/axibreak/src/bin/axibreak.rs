//! Command-line front end: parses parameters, runs the requested solver,
//! and writes CSV/JSON outputs plus a run manifest into the chosen
//! directory.
//!
//! Exit codes: 0 on success, 1 when a solver fails, 2 on argument errors.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;
use std::sync::Arc;

use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;

use axibreak::io::{
    fmt_g12, round_g12, write_critical_csv, write_critical_plot, write_flow_log_csv,
    write_ggap_plot, write_json, write_landau_csv, write_radial_csv, write_reduced_json,
    write_rnode_plot, write_state_csv, write_sweep_csv, Manifest,
};
use axibreak::{
    default_seeds, embed_symmetric, energy_total, find_bstar, fit_bstar, landau_crossing,
    landau_mu, locate_bifurcation, minimize_2d_logged, nodal_radius, phase_winding,
    reduced_minimize, solve_symmetric, sweep, AxiError, Params, PolarGrid, RadialGrid, Seed2D,
    StationaryKind, SweepConfig,
};

// ---------------------------------------------------------------------------
// argument surface
// ---------------------------------------------------------------------------

#[derive(Parser)]
#[command(
    name = "axibreak",
    version,
    about = "Constrained minimization of the coupled Schrödinger–Ampère potential on the unit disk"
)]
struct Cli {
    /// Output directory (default: $AXIBREAK_OUT, else the current directory)
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Flat key=value config file; explicit flags override its entries
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Worker-pool width for independent solves (default: all cores)
    #[arg(long, global = true)]
    jobs: Option<usize>,

    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Solve one axially symmetric branch ψ = R(r)e^{-imθ}
    SolveSymmetric {
        /// Winding number of the branch
        #[arg(long)]
        m: Option<u32>,
        /// Applied field
        #[arg(long)]
        b: Option<f64>,
        /// Mean density constraint
        #[arg(long)]
        rho: Option<f64>,
        /// Radial grid points
        #[arg(long)]
        n: Option<usize>,
    },
    /// Landau-limit (ρ→0) eigenvalues and the m=0/m=1 crossing field
    Landau {
        /// Winding numbers to tabulate (comma separated)
        #[arg(long, value_delimiter = ',')]
        m: Option<Vec<u32>>,
        /// Fields to tabulate (comma separated); omit for the crossing only
        #[arg(long, value_delimiter = ',')]
        b: Option<Vec<f64>>,
        /// Radial grid points
        #[arg(long)]
        n: Option<usize>,
    },
    /// Stationary points of the four-parameter reduced model
    Reduced {
        /// Applied field
        #[arg(long)]
        b: Option<f64>,
        /// Mean density constraint
        #[arg(long)]
        rho: Option<f64>,
    },
    /// Full 2D constrained minimization on the disk
    #[command(name = "solve-2d")]
    Solve2d {
        /// Applied field
        #[arg(long)]
        b: Option<f64>,
        /// Mean density constraint
        #[arg(long)]
        rho: Option<f64>,
        /// Initial configuration
        #[arg(long, value_enum)]
        seed: Option<SeedKind>,
        /// m=0 admixture weight for the mixed seed
        #[arg(long)]
        eps: Option<f64>,
        /// Radial grid points
        #[arg(long)]
        n_r: Option<usize>,
        /// Angular grid points (even)
        #[arg(long)]
        n_theta: Option<usize>,
    },
    /// Critical field b*(ρ) where the symmetric branches exchange stability
    CriticalField {
        /// Densities (comma separated)
        #[arg(long, value_delimiter = ',')]
        rho: Option<Vec<f64>>,
        /// Radial grid points
        #[arg(long)]
        n: Option<usize>,
        /// Bisection tolerance on b*
        #[arg(long)]
        tol_b: Option<f64>,
    },
    /// Continuation along b = b*(ρ): nodal radius and energy gap vs density
    Sweep {
        /// Lowest density
        #[arg(long)]
        rho_min: Option<f64>,
        /// Highest density
        #[arg(long)]
        rho_max: Option<f64>,
        /// Step outside the refinement window
        #[arg(long)]
        coarse_step: Option<f64>,
        /// Step inside the refinement window
        #[arg(long)]
        fine_step: Option<f64>,
        /// Refinement window start
        #[arg(long)]
        fine_lo: Option<f64>,
        /// Refinement window end
        #[arg(long)]
        fine_hi: Option<f64>,
        /// Radial grid points of the 2D grid
        #[arg(long)]
        n_r: Option<usize>,
        /// Angular grid points (even)
        #[arg(long)]
        n_theta: Option<usize>,
        /// Bisection tolerance on the per-row b*
        #[arg(long)]
        tol_b: Option<f64>,
        /// m=0 admixture weight used while probing for the branch
        #[arg(long)]
        eps: Option<f64>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SeedKind {
    /// m=1 state with a small m=0 admixture
    Mixed,
    /// embedded m=0 radial solution
    Symmetric0,
    /// embedded m=1 radial solution
    Symmetric1,
}

impl fmt::Display for SeedKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SeedKind::Mixed => write!(f, "mixed"),
            SeedKind::Symmetric0 => write!(f, "symmetric0"),
            SeedKind::Symmetric1 => write!(f, "symmetric1"),
        }
    }
}

impl FromStr for SeedKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "mixed" => Ok(SeedKind::Mixed),
            "symmetric0" => Ok(SeedKind::Symmetric0),
            "symmetric1" => Ok(SeedKind::Symmetric1),
            other => Err(format!(
                "unknown seed '{other}' (expected mixed, symmetric0 or symmetric1)"
            )),
        }
    }
}

// ---------------------------------------------------------------------------
// error plumbing: exit 1 for solver failures, 2 for argument problems
// ---------------------------------------------------------------------------

struct CliError {
    code: u8,
    msg: String,
}

impl CliError {
    fn arg(msg: impl Into<String>) -> Self {
        Self {
            code: 2,
            msg: msg.into(),
        }
    }
}

impl From<AxiError> for CliError {
    fn from(e: AxiError) -> Self {
        let code = match &e {
            AxiError::InvalidArgument(_) | AxiError::Dimension(_) => 2,
            _ => 1,
        };
        Self {
            code,
            msg: e.to_string(),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.msg);
            ExitCode::from(e.code)
        }
    }
}

// ---------------------------------------------------------------------------
// config file: flat key=value lines, '#' comments; flags take precedence
// ---------------------------------------------------------------------------

const KNOWN_KEYS: &[&str] = &[
    "m", "b", "rho", "n", "n-r", "n-theta", "seed", "eps", "tol-b", "rho-min", "rho-max",
    "coarse-step", "fine-step", "fine-lo", "fine-hi", "out", "jobs",
];

struct FileCfg(BTreeMap<String, String>);

impl FileCfg {
    fn load(path: Option<&Path>) -> Result<Self, CliError> {
        let mut map = BTreeMap::new();
        let Some(path) = path else {
            return Ok(Self(map));
        };
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::arg(format!("cannot read config {}: {e}", path.display())))?;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((k, v)) = line.split_once('=') else {
                return Err(CliError::arg(format!(
                    "config line {} is not key=value: '{raw}'",
                    lineno + 1
                )));
            };
            let key = k.trim().replace('_', "-");
            if !KNOWN_KEYS.contains(&key.as_str()) {
                return Err(CliError::arg(format!("unknown config key '{key}'")));
            }
            map.insert(key, v.trim().to_string());
        }
        Ok(Self(map))
    }

    fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>, CliError>
    where
        T::Err: fmt::Display,
    {
        match self.0.get(key) {
            None => Ok(None),
            Some(raw) => raw.parse::<T>().map(Some).map_err(|e| {
                CliError::arg(format!("config key '{key}': cannot parse '{raw}': {e}"))
            }),
        }
    }

    fn get_list<T: FromStr>(&self, key: &str) -> Result<Option<Vec<T>>, CliError>
    where
        T::Err: fmt::Display,
    {
        match self.0.get(key) {
            None => Ok(None),
            Some(raw) => raw
                .split(',')
                .map(|tok| {
                    tok.trim().parse::<T>().map_err(|e| {
                        CliError::arg(format!("config key '{key}': cannot parse '{tok}': {e}"))
                    })
                })
                .collect::<Result<Vec<T>, CliError>>()
                .map(Some),
        }
    }
}

fn pick<T>(flag: Option<T>, from_cfg: Result<Option<T>, CliError>, default: T) -> Result<T, CliError> {
    Ok(flag.or(from_cfg?).unwrap_or(default))
}

fn pick_required<T>(
    flag: Option<T>,
    from_cfg: Result<Option<T>, CliError>,
    name: &str,
) -> Result<T, CliError> {
    flag.or(from_cfg?)
        .ok_or_else(|| CliError::arg(format!("missing required parameter --{name}")))
}

fn out_dir(flag: Option<PathBuf>, cfg: &FileCfg) -> Result<PathBuf, CliError> {
    let dir = match flag.or(cfg.get::<PathBuf>("out")?) {
        Some(d) => d,
        None => std::env::var_os("AXIBREAK_OUT")
            .map(PathBuf::from)
            .unwrap_or_else(|| PathBuf::from(".")),
    };
    fs::create_dir_all(&dir)
        .map_err(|e| CliError::arg(format!("cannot create output directory {}: {e}", dir.display())))?;
    Ok(dir)
}

// ---------------------------------------------------------------------------
// subcommands
// ---------------------------------------------------------------------------

fn run(cli: Cli) -> Result<(), CliError> {
    let cfg = FileCfg::load(cli.config.as_deref())?;
    let jobs = match cli.jobs.or(cfg.get("jobs")?) {
        Some(n) if n == 0 => return Err(CliError::arg("--jobs must be at least 1")),
        Some(n) => {
            // ignore the error if a pool already exists (tests call run() repeatedly)
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            n
        }
        None => rayon::current_num_threads(),
    };
    let dir = out_dir(cli.out.clone(), &cfg)?;

    match cli.cmd {
        Cmd::SolveSymmetric { m, b, rho, n } => cmd_solve_symmetric(&dir, &cfg, m, b, rho, n),
        Cmd::Landau { m, b, n } => cmd_landau(&dir, &cfg, m, b, n),
        Cmd::Reduced { b, rho } => cmd_reduced(&dir, &cfg, b, rho),
        Cmd::Solve2d {
            b,
            rho,
            seed,
            eps,
            n_r,
            n_theta,
        } => cmd_solve2d(&dir, &cfg, b, rho, seed, eps, n_r, n_theta),
        Cmd::CriticalField { rho, n, tol_b } => cmd_critical(&dir, &cfg, rho, n, tol_b, jobs),
        Cmd::Sweep {
            rho_min,
            rho_max,
            coarse_step,
            fine_step,
            fine_lo,
            fine_hi,
            n_r,
            n_theta,
            tol_b,
            eps,
        } => cmd_sweep(
            &dir,
            &cfg,
            SweepArgs {
                rho_min,
                rho_max,
                coarse_step,
                fine_step,
                fine_lo,
                fine_hi,
                n_r,
                n_theta,
                tol_b,
                eps,
            },
        ),
    }
}

#[derive(Serialize)]
struct SymmetricSummary {
    m: u32,
    b: f64,
    rho: f64,
    n: usize,
    mu: f64,
    energy: f64,
}

fn cmd_solve_symmetric(
    dir: &Path,
    cfg: &FileCfg,
    m: Option<u32>,
    b: Option<f64>,
    rho: Option<f64>,
    n: Option<usize>,
) -> Result<(), CliError> {
    let m = pick(m, cfg.get("m"), 0)?;
    let b = pick_required(b, cfg.get("b"), "b")?;
    let rho = pick_required(rho, cfg.get("rho"), "rho")?;
    let n = pick(n, cfg.get("n"), 512)?;

    let grid = RadialGrid::new(n)?;
    let p = Params::new(b, rho)?;
    let state = solve_symmetric(m, &p, &grid, None)?;

    write_radial_csv(&dir.join("radial.csv"), &state)?;
    write_json(
        &dir.join("summary.json"),
        &SymmetricSummary {
            m,
            b,
            rho,
            n,
            mu: round_g12(state.mu),
            energy: round_g12(state.energy),
        },
    )?;

    let mut man = Manifest::new("solve-symmetric");
    man.set("m", m)
        .set("b", b)
        .set("rho", rho)
        .set("n", n as u64)
        .set("residual_gate", axibreak::RESIDUAL_GATE)
        .set("constraint_gate", axibreak::CONSTRAINT_GATE);
    man.add_output("radial.csv").add_output("summary.json");
    man.write(dir)?;

    println!(
        "solve-symmetric: m={m} b={b} rho={rho} n={n} -> mu={} G={}",
        fmt_g12(state.mu),
        fmt_g12(state.energy)
    );
    Ok(())
}

#[derive(Serialize)]
struct LandauSummary {
    n: usize,
    crossing_b: f64,
    tabulated: usize,
}

fn cmd_landau(
    dir: &Path,
    cfg: &FileCfg,
    m: Option<Vec<u32>>,
    b: Option<Vec<f64>>,
    n: Option<usize>,
) -> Result<(), CliError> {
    let ms = pick(m, cfg.get_list("m"), vec![0, 1])?;
    let bs = pick(b, cfg.get_list("b"), Vec::new())?;
    let n = pick(n, cfg.get("n"), 512)?;
    if ms.is_empty() {
        return Err(CliError::arg("--m must name at least one winding number"));
    }

    let grid = RadialGrid::new(n)?;
    let mut rows = Vec::new();
    for &b in &bs {
        if b < 0.0 {
            return Err(CliError::arg(format!("field b={b} must be nonnegative")));
        }
        for &m in &ms {
            rows.push((m, b, landau_mu(m, b, &grid)));
        }
    }
    let crossing = landau_crossing(&grid);

    write_landau_csv(&dir.join("landau.csv"), &rows)?;
    write_json(
        &dir.join("summary.json"),
        &LandauSummary {
            n,
            crossing_b: round_g12(crossing),
            tabulated: rows.len(),
        },
    )?;

    let mut man = Manifest::new("landau");
    man.set(
        "m",
        serde_json::Value::from(ms.iter().map(|&v| u64::from(v)).collect::<Vec<u64>>()),
    )
    .set("b", serde_json::Value::from(bs.clone()))
    .set("n", n as u64);
    man.add_output("landau.csv").add_output("summary.json");
    man.write(dir)?;

    println!(
        "landau: {} eigenvalues tabulated, m=0/m=1 crossing at b={}",
        rows.len(),
        fmt_g12(crossing)
    );
    Ok(())
}

fn cmd_reduced(
    dir: &Path,
    cfg: &FileCfg,
    b: Option<f64>,
    rho: Option<f64>,
) -> Result<(), CliError> {
    let b = pick_required(b, cfg.get("b"), "b")?;
    let rho = pick_required(rho, cfg.get("rho"), "rho")?;

    let p = Params::new(b, rho)?;
    let scan = reduced_minimize(&p, &default_seeds(&p));
    let minima = scan
        .stationary
        .iter()
        .filter(|(_, k)| *k == StationaryKind::Minimum)
        .count();
    let saddles = scan.stationary.len() - minima;

    write_reduced_json(&dir.join("reduced.json"), &scan)?;

    let mut man = Manifest::new("reduced");
    man.set("b", b).set("rho", rho).set("seeds", "default-16");
    man.add_output("reduced.json");
    man.write(dir)?;

    println!(
        "reduced: b={b} rho={rho} -> {} stationary points ({minima} minima, {saddles} saddles), {} failed seeds",
        scan.stationary.len(),
        scan.failed_seeds.len()
    );
    Ok(())
}

#[derive(Serialize)]
struct Solve2dSummary {
    b: f64,
    rho: f64,
    n_r: usize,
    n_theta: usize,
    seed: String,
    energy: f64,
    mu: f64,
    winding: Option<i64>,
    r_node: Option<f64>,
    g_gap: f64,
    flow_steps: usize,
}

#[allow(clippy::too_many_arguments)]
fn cmd_solve2d(
    dir: &Path,
    cfg: &FileCfg,
    b: Option<f64>,
    rho: Option<f64>,
    seed: Option<SeedKind>,
    eps: Option<f64>,
    n_r: Option<usize>,
    n_theta: Option<usize>,
) -> Result<(), CliError> {
    let b = pick_required(b, cfg.get("b"), "b")?;
    let rho = pick_required(rho, cfg.get("rho"), "rho")?;
    let seed_kind = pick(seed, cfg.get("seed"), SeedKind::Mixed)?;
    let eps = pick(eps, cfg.get("eps"), 0.05)?;
    let n_r = pick(n_r, cfg.get("n-r"), 192)?;
    let n_theta = pick(n_theta, cfg.get("n-theta"), 64)?;

    let grid = Arc::new(PolarGrid::from_sizes(n_r, n_theta)?);
    let p = Params::new(b, rho)?;
    let seed2d = match seed_kind {
        SeedKind::Mixed => Seed2D::Mixed { eps },
        SeedKind::Symmetric0 => Seed2D::Symmetric(0),
        SeedKind::Symmetric1 => Seed2D::Symmetric(1),
    };
    let (state, log) = minimize_2d_logged(&seed2d, &p, &grid)?;

    // same-grid symmetric reference for the energy gap
    let g_sym = {
        let e0 = energy_total(&embed_symmetric(&solve_symmetric(0, &p, &grid.radial, None)?, &grid)?, &p)?;
        let e1 = energy_total(&embed_symmetric(&solve_symmetric(1, &p, &grid.radial, None)?, &grid)?, &p)?;
        e0.min(e1)
    };
    let g_gap = (state.energy - g_sym) / rho;
    let winding = phase_winding(&state).ok();
    let r_node = match winding {
        Some(1) => nodal_radius(&state).ok(),
        Some(0) => Some(0.0),
        _ => None,
    };

    write_state_csv(&dir.join("state.csv"), &state)?;
    write_flow_log_csv(&dir.join("flow_log.csv"), &log)?;
    write_json(
        &dir.join("summary.json"),
        &Solve2dSummary {
            b,
            rho,
            n_r,
            n_theta,
            seed: seed_kind.to_string(),
            energy: round_g12(state.energy),
            mu: round_g12(state.mu),
            winding,
            r_node: r_node.map(round_g12),
            g_gap: round_g12(g_gap),
            flow_steps: log.last().map_or(0, |row| row.step),
        },
    )?;

    let mut man = Manifest::new("solve-2d");
    man.set("b", b)
        .set("rho", rho)
        .set("seed", seed_kind.to_string())
        .set("eps", eps)
        .set("n_r", n_r as u64)
        .set("n_theta", n_theta as u64)
        .set("flow_res_tol", axibreak::solver2d::RES_TOL)
        .set("flow_max_steps", axibreak::solver2d::MAX_STEPS as u64);
    man.add_output("state.csv")
        .add_output("flow_log.csv")
        .add_output("summary.json");
    man.write(dir)?;

    println!(
        "solve-2d: b={b} rho={rho} seed={seed_kind} {n_r}x{n_theta} -> G={} winding={} r_node={} g_gap={}",
        fmt_g12(state.energy),
        winding.map_or_else(|| "-".to_string(), |w| w.to_string()),
        r_node.map_or_else(|| "-".to_string(), fmt_g12),
        fmt_g12(g_gap)
    );
    Ok(())
}

fn cmd_critical(
    dir: &Path,
    cfg: &FileCfg,
    rho: Option<Vec<f64>>,
    n: Option<usize>,
    tol_b: Option<f64>,
    _jobs: usize,
) -> Result<(), CliError> {
    let rhos = pick_required(rho, cfg.get_list("rho"), "rho")?;
    let n = pick(n, cfg.get("n"), 512)?;
    let tol_b = pick(tol_b, cfg.get("tol-b"), 1e-4)?;
    if rhos.is_empty() {
        return Err(CliError::arg("--rho must name at least one density"));
    }

    let grid = RadialGrid::new(n)?;
    // independent densities run on the worker pool; input order is preserved
    let rows: Vec<(f64, f64, f64)> = rhos
        .par_iter()
        .map(|&rho| -> Result<(f64, f64, f64), AxiError> {
            let bstar = find_bstar(rho, &grid, tol_b)?;
            Ok((rho, bstar, fit_bstar(rho)))
        })
        .collect::<Result<Vec<_>, AxiError>>()?;

    write_critical_csv(&dir.join("critical.csv"), &rows)?;
    write_critical_plot(dir, "critical.csv")?;

    let mut man = Manifest::new("critical-field");
    man.set("rho", serde_json::Value::from(rhos.clone()))
        .set("n", n as u64)
        .set("tol_b", tol_b);
    man.add_output("critical.csv").add_output("plot_bstar.gp");
    man.write(dir)?;

    let worst = rows
        .iter()
        .map(|(_, bn, bf)| ((bn - bf) / bf).abs())
        .fold(0.0_f64, f64::max);
    println!(
        "critical-field: {} densities on n={n}, max |rel err| vs fit = {}",
        rows.len(),
        fmt_g12(worst)
    );
    Ok(())
}

struct SweepArgs {
    rho_min: Option<f64>,
    rho_max: Option<f64>,
    coarse_step: Option<f64>,
    fine_step: Option<f64>,
    fine_lo: Option<f64>,
    fine_hi: Option<f64>,
    n_r: Option<usize>,
    n_theta: Option<usize>,
    tol_b: Option<f64>,
    eps: Option<f64>,
}

#[derive(Serialize)]
struct BifurcationJson {
    found: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    rho_c: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    bracket: Option<(f64, f64)>,
}

fn cmd_sweep(dir: &Path, cfg: &FileCfg, args: SweepArgs) -> Result<(), CliError> {
    let rho_min = pick(args.rho_min, cfg.get("rho-min"), 0.5)?;
    let rho_max = pick(args.rho_max, cfg.get("rho-max"), 10.0)?;
    let coarse = pick(args.coarse_step, cfg.get("coarse-step"), 0.25)?;
    let fine = pick(args.fine_step, cfg.get("fine-step"), 0.05)?;
    let fine_lo = pick(args.fine_lo, cfg.get("fine-lo"), 2.2)?;
    let fine_hi = pick(args.fine_hi, cfg.get("fine-hi"), 3.2)?;
    let defaults = SweepConfig::default();
    let sweep_cfg = SweepConfig {
        n_r: pick(args.n_r, cfg.get("n-r"), defaults.n_r)?,
        n_theta: pick(args.n_theta, cfg.get("n-theta"), defaults.n_theta)?,
        tol_b: pick(args.tol_b, cfg.get("tol-b"), defaults.tol_b)?,
        eps: pick(args.eps, cfg.get("eps"), defaults.eps)?,
    };

    let rho_grid = build_rho_grid(rho_min, rho_max, coarse, fine, fine_lo, fine_hi)?;
    let rows = sweep(&rho_grid, &sweep_cfg)?;
    let estimate = locate_bifurcation(&rows);

    write_sweep_csv(&dir.join("sweep.csv"), &rows)?;
    write_rnode_plot(dir, "sweep.csv")?;
    write_ggap_plot(dir, "sweep.csv")?;
    write_json(
        &dir.join("bifurcation.json"),
        &BifurcationJson {
            found: estimate.is_some(),
            rho_c: estimate.as_ref().map(|e| round_g12(e.rho_c)),
            bracket: estimate.as_ref().map(|e| e.bracket),
        },
    )?;

    let mut man = Manifest::new("sweep");
    man.set("rho_min", rho_min)
        .set("rho_max", rho_max)
        .set("coarse_step", coarse)
        .set("fine_step", fine)
        .set("fine_lo", fine_lo)
        .set("fine_hi", fine_hi)
        .set("n_r", sweep_cfg.n_r as u64)
        .set("n_theta", sweep_cfg.n_theta as u64)
        .set("tol_b", sweep_cfg.tol_b)
        .set("eps", sweep_cfg.eps)
        .set("rows", rho_grid.len() as u64)
        .set("flow_res_tol", axibreak::solver2d::RES_TOL)
        .set("flow_max_steps", axibreak::solver2d::MAX_STEPS as u64);
    man.add_output("sweep.csv")
        .add_output("plot_rnode.gp")
        .add_output("plot_ggap.gp")
        .add_output("bifurcation.json");
    man.write(dir)?;

    match &estimate {
        Some(e) => println!(
            "sweep: {} rows, onset rho_c={} bracket [{}, {}]",
            rows.len(),
            fmt_g12(e.rho_c),
            fmt_g12(e.bracket.0),
            fmt_g12(e.bracket.1)
        ),
        None => println!(
            "sweep: {} rows, asymmetric branch not detected in [{rho_min}, {rho_max}]",
            rows.len()
        ),
    }
    Ok(())
}

/// Builds the density grid in exact micro-unit (1e-6) integer steps so that
/// refinement points that coincide with coarse points dedup exactly and
/// repeated runs produce identical grids.
fn build_rho_grid(
    rho_min: f64,
    rho_max: f64,
    coarse: f64,
    fine: f64,
    fine_lo: f64,
    fine_hi: f64,
) -> Result<Vec<f64>, CliError> {
    if !(rho_min > 0.0 && rho_max > rho_min && rho_max <= 10.0) {
        return Err(CliError::arg(format!(
            "need 0 < rho-min < rho-max <= 10, got [{rho_min}, {rho_max}]"
        )));
    }
    if coarse <= 0.0 || fine <= 0.0 {
        return Err(CliError::arg("steps must be positive"));
    }
    let to_micro = |x: f64| -> Result<i64, CliError> {
        let m = (x * 1e6).round();
        if (m - x * 1e6).abs() > 1e-3 {
            return Err(CliError::arg(format!(
                "density grid values must be multiples of 1e-6, got {x}"
            )));
        }
        Ok(m as i64)
    };
    let (lo, hi) = (to_micro(rho_min)?, to_micro(rho_max)?);
    let (step_c, step_f) = (to_micro(coarse)?, to_micro(fine)?);
    let (flo, fhi) = (to_micro(fine_lo)?, to_micro(fine_hi)?);

    let mut micro: Vec<i64> = (0..).map(|i| lo + i * step_c).take_while(|&v| v <= hi).collect();
    if flo < fhi {
        let start = flo.max(lo);
        micro.extend(
            (0..)
                .map(|i| start + i * step_f)
                .take_while(|&v| v <= fhi.min(hi)),
        );
    }
    micro.sort_unstable();
    micro.dedup();
    Ok(micro.into_iter().map(|v| v as f64 / 1e6).collect())
}
