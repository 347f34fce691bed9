//! Serialization of solver results: CSV tables, JSON summaries, the run
//! manifest that accompanies every output directory, and gnuplot scripts
//! for the standard figures.
//!
//! All floating-point values in CSV files are rendered with 12 significant
//! digits through one formatter, so identical inputs produce bit-identical
//! files.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::Serialize;

use crate::error::Result;
use crate::fields::State2D;
use crate::radial::SymmetricState;
use crate::reduced::{ReducedPoint, ReducedScan, StationaryKind};
use crate::solver2d::FlowLogRow;
use crate::sweep::SweepRow;

/// Renders a float with 12 significant digits. NaN prints as `nan`, which
/// gnuplot treats as missing data.
pub fn fmt_g12(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    format!("{x:.11e}")
}

/// A float rounded to 12 significant digits, for JSON payloads that follow
/// the same serialization policy as the CSV files.
pub fn round_g12(x: f64) -> f64 {
    if x.is_finite() {
        fmt_g12(x).parse().unwrap_or(x)
    } else {
        x
    }
}

fn write_lines(path: &Path, lines: &[String]) -> Result<()> {
    let mut body = lines.join("\n");
    body.push('\n');
    fs::write(path, body)?;
    Ok(())
}

// ---------------------------------------------------------------------------
// run manifest
// ---------------------------------------------------------------------------

/// Description of one run: what was asked, at which resolutions and
/// tolerances, and which files were produced. Parameter keys are kept in a
/// sorted map so the JSON is deterministic.
#[derive(Debug, Clone, Serialize)]
pub struct Manifest {
    /// Subcommand or operation that produced the outputs.
    pub command: String,
    /// Crate version that produced the outputs.
    pub version: String,
    /// How angular derivatives are taken (fixed property of this solver).
    pub theta_derivative: String,
    /// Every input: parameters, grid sizes, tolerances, seeds.
    pub parameters: BTreeMap<String, serde_json::Value>,
    /// Files written alongside this manifest, relative to it.
    pub outputs: Vec<String>,
}

impl Manifest {
    pub fn new(command: &str) -> Self {
        Self {
            command: command.to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            theta_derivative: "spectral-fft".to_string(),
            parameters: BTreeMap::new(),
            outputs: Vec::new(),
        }
    }

    /// Records one input parameter.
    pub fn set(&mut self, key: &str, value: impl Into<serde_json::Value>) -> &mut Self {
        self.parameters.insert(key.to_string(), value.into());
        self
    }

    /// Records a produced file (relative name).
    pub fn add_output(&mut self, name: &str) -> &mut Self {
        self.outputs.push(name.to_string());
        self
    }

    /// Writes `run-manifest.json` into `dir`.
    pub fn write(&self, dir: &Path) -> Result<()> {
        let body = serde_json::to_string_pretty(self).map_err(std::io::Error::other)?;
        fs::write(dir.join("run-manifest.json"), body + "\n")?;
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// CSV writers
// ---------------------------------------------------------------------------

/// Radial profile table: one row per radial node.
pub fn write_radial_csv(path: &Path, state: &SymmetricState) -> Result<()> {
    let mut lines = vec!["r,R,a_theta".to_string()];
    for j in 0..state.grid.n {
        lines.push(format!(
            "{},{},{}",
            fmt_g12(state.grid.nodes[j]),
            fmt_g12(state.r_profile[j]),
            fmt_g12(state.a_profile[j]),
        ));
    }
    write_lines(path, &lines)
}

/// Full 2D state snapshot: one row per (r, θ) sample.
pub fn write_state_csv(path: &Path, state: &State2D) -> Result<()> {
    let grid = state.shared_grid()?;
    let mut lines = vec!["r,theta,re_psi,im_psi,a_theta".to_string()];
    for j in 0..grid.radial.n {
        for k in 0..grid.n_theta {
            let psi = state.psi.values[[j, k]];
            lines.push(format!(
                "{},{},{},{},{}",
                fmt_g12(grid.radial.nodes[j]),
                fmt_g12(grid.thetas[k]),
                fmt_g12(psi.re),
                fmt_g12(psi.im),
                fmt_g12(state.a.values[[j, k]]),
            ));
        }
    }
    write_lines(path, &lines)
}

/// Gradient-flow convergence log.
pub fn write_flow_log_csv(path: &Path, log: &[FlowLogRow]) -> Result<()> {
    let mut lines = vec!["step,energy,res_psi,res_a,tau".to_string()];
    for row in log {
        lines.push(format!(
            "{},{},{},{},{}",
            row.step,
            fmt_g12(row.energy),
            fmt_g12(row.res_psi),
            fmt_g12(row.res_a),
            fmt_g12(row.tau),
        ));
    }
    write_lines(path, &lines)
}

/// Landau-limit eigenvalue table: one row per (m, b) pair.
pub fn write_landau_csv(path: &Path, rows: &[(u32, f64, f64)]) -> Result<()> {
    let mut lines = vec!["m,b,mu".to_string()];
    for (m, b, mu) in rows {
        lines.push(format!("{},{},{}", m, fmt_g12(*b), fmt_g12(*mu)));
    }
    write_lines(path, &lines)
}

/// Critical-field table comparing the numeric crossing with the cubic fit.
pub fn write_critical_csv(path: &Path, rows: &[(f64, f64, f64)]) -> Result<()> {
    let mut lines = vec!["rho,bstar_numeric,bstar_fit,rel_err".to_string()];
    for (rho, bnum, bfit) in rows {
        let rel = (bnum - bfit) / bfit;
        lines.push(format!(
            "{},{},{},{}",
            fmt_g12(*rho),
            fmt_g12(*bnum),
            fmt_g12(*bfit),
            fmt_g12(rel),
        ));
    }
    write_lines(path, &lines)
}

/// Sweep table, one row per density.
pub fn write_sweep_csv(path: &Path, rows: &[SweepRow]) -> Result<()> {
    let mut lines = vec!["rho,bstar,r_node,g_gap,converged".to_string()];
    for row in rows {
        lines.push(format!(
            "{},{},{},{},{}",
            fmt_g12(row.rho),
            fmt_g12(row.bstar),
            fmt_g12(row.r_node),
            fmt_g12(row.g_gap),
            u8::from(row.converged),
        ));
    }
    write_lines(path, &lines)
}

// ---------------------------------------------------------------------------
// JSON writers
// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct StationaryJson {
    p: f64,
    q: f64,
    a0: f64,
    a1: f64,
    energy: f64,
    kind: StationaryKind,
}

#[derive(Serialize)]
struct FailedSeedJson {
    p: f64,
    q: f64,
    a0: f64,
    a1: f64,
    error: String,
}

#[derive(Serialize)]
struct ReducedScanJson {
    stationary: Vec<StationaryJson>,
    failed_seeds: Vec<FailedSeedJson>,
}

fn point_fields(pt: &ReducedPoint) -> (f64, f64, f64, f64) {
    (
        round_g12(pt.p),
        round_g12(pt.q),
        round_g12(pt.a0),
        round_g12(pt.a1),
    )
}

/// Stationary points of the reduced model, minima and saddles labelled.
pub fn write_reduced_json(path: &Path, scan: &ReducedScan) -> Result<()> {
    let doc = ReducedScanJson {
        stationary: scan
            .stationary
            .iter()
            .map(|(pt, kind)| {
                let (p, q, a0, a1) = point_fields(pt);
                StationaryJson {
                    p,
                    q,
                    a0,
                    a1,
                    energy: round_g12(pt.energy),
                    kind: *kind,
                }
            })
            .collect(),
        failed_seeds: scan
            .failed_seeds
            .iter()
            .map(|(pt, err)| {
                let (p, q, a0, a1) = point_fields(pt);
                FailedSeedJson {
                    p,
                    q,
                    a0,
                    a1,
                    error: err.to_string(),
                }
            })
            .collect(),
    };
    let body = serde_json::to_string_pretty(&doc).map_err(std::io::Error::other)?;
    fs::write(path, body + "\n")?;
    Ok(())
}

/// Writes an arbitrary serializable summary as pretty JSON.
pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let body = serde_json::to_string_pretty(value).map_err(std::io::Error::other)?;
    fs::write(path, body + "\n")?;
    Ok(())
}

// ---------------------------------------------------------------------------
// plot scripts
// ---------------------------------------------------------------------------

/// Gnuplot script for the nodal-radius figure (r_node vs ρ).
pub fn write_rnode_plot(dir: &Path, csv_name: &str) -> Result<()> {
    let lines = vec![
        "# nodal radius of the asymmetric state along b = b*(rho)".to_string(),
        "set terminal pngcairo size 900,600".to_string(),
        "set output 'fig_rnode.png'".to_string(),
        "set datafile separator ','".to_string(),
        "set xlabel 'rho'".to_string(),
        "set ylabel 'r_node'".to_string(),
        "set grid".to_string(),
        "set key left top".to_string(),
        format!(
            "plot '{csv_name}' skip 1 using 1:($5 > 0.5 ? $3 : NaN) \\"
        ),
        "    with linespoints pt 7 title 'nodal radius'".to_string(),
    ];
    write_lines(&dir.join("plot_rnode.gp"), &lines)
}

/// Gnuplot script for the energy-gap figure (g_gap vs ρ).
pub fn write_ggap_plot(dir: &Path, csv_name: &str) -> Result<()> {
    let lines = vec![
        "# energy gap (G - G_sym)/rho of the asymmetric state along b = b*(rho)".to_string(),
        "set terminal pngcairo size 900,600".to_string(),
        "set output 'fig_ggap.png'".to_string(),
        "set datafile separator ','".to_string(),
        "set xlabel 'rho'".to_string(),
        "set ylabel '(G - G_sym)/rho'".to_string(),
        "set grid".to_string(),
        "set key left bottom".to_string(),
        format!(
            "plot '{csv_name}' skip 1 using 1:($5 > 0.5 ? $4 : NaN) \\"
        ),
        "    with linespoints pt 7 title 'energy gap', 0 with lines dt 2 notitle".to_string(),
    ];
    write_lines(&dir.join("plot_ggap.gp"), &lines)
}

/// Gnuplot script comparing the numeric critical field with the cubic fit.
pub fn write_critical_plot(dir: &Path, csv_name: &str) -> Result<()> {
    let lines = vec![
        "# numeric critical field vs cubic fit".to_string(),
        "set terminal pngcairo size 900,600".to_string(),
        "set output 'fig_bstar.png'".to_string(),
        "set datafile separator ','".to_string(),
        "set xlabel 'rho'".to_string(),
        "set ylabel 'b*'".to_string(),
        "set grid".to_string(),
        "set key left top".to_string(),
        format!("plot '{csv_name}' skip 1 using 1:2 with points pt 7 title 'numeric', \\"),
        format!("     '{csv_name}' skip 1 using 1:3 with lines title 'fit'"),
    ];
    write_lines(&dir.join("plot_bstar.gp"), &lines)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::RadialGrid;
    use crate::radial::solve_symmetric;
    use crate::fields::Params;

    #[test]
    fn g12_formatting_is_twelve_significant_digits() {
        assert_eq!(fmt_g12(1.0), "1.00000000000e0");
        assert_eq!(fmt_g12(-0.0123456789012345), "-1.23456789012e-2");
        assert_eq!(fmt_g12(f64::NAN), "nan");
        assert_eq!(round_g12(1.2345678901234567), 1.23456789012);
    }

    #[test]
    fn manifest_round_trips_and_is_sorted() {
        let dir = tempdir();
        let mut m = Manifest::new("sweep");
        m.set("rho_min", 0.5).set("n_r", 192).set("a_first", true);
        m.add_output("sweep.csv");
        m.write(&dir).unwrap();
        let text = fs::read_to_string(dir.join("run-manifest.json")).unwrap();
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["command"], "sweep");
        assert_eq!(v["version"], env!("CARGO_PKG_VERSION"));
        assert_eq!(v["theta_derivative"], "spectral-fft");
        assert_eq!(v["parameters"]["n_r"], 192);
        assert_eq!(v["outputs"][0], "sweep.csv");
        // keys sorted for determinism
        let keys: Vec<&String> = v["parameters"].as_object().unwrap().keys().collect();
        let mut sorted = keys.clone();
        sorted.sort();
        assert_eq!(keys, sorted);
        cleanup(&dir);
    }

    #[test]
    fn radial_csv_has_header_and_rows() {
        let dir = tempdir();
        let grid = RadialGrid::new(32).unwrap();
        let p = Params::new(1.0, 1.0).unwrap();
        let s = solve_symmetric(0, &p, &grid, None).unwrap();
        let path = dir.join("radial.csv");
        write_radial_csv(&path, &s).unwrap();
        let text = fs::read_to_string(&path).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "r,R,a_theta");
        assert_eq!(lines.len(), 33);
        // identical write is bit-identical
        let path2 = dir.join("radial2.csv");
        write_radial_csv(&path2, &s).unwrap();
        assert_eq!(text, fs::read_to_string(&path2).unwrap());
        cleanup(&dir);
    }

    #[test]
    fn plot_scripts_reference_csv_relatively() {
        let dir = tempdir();
        write_rnode_plot(&dir, "sweep.csv").unwrap();
        write_ggap_plot(&dir, "sweep.csv").unwrap();
        write_critical_plot(&dir, "critical.csv").unwrap();
        for (name, csv) in [
            ("plot_rnode.gp", "'sweep.csv'"),
            ("plot_ggap.gp", "'sweep.csv'"),
            ("plot_bstar.gp", "'critical.csv'"),
        ] {
            let text = fs::read_to_string(dir.join(name)).unwrap();
            assert!(text.contains(csv), "{name} must reference {csv}");
            // every quoted file reference must be a bare name
            for quoted in text.split('\'').skip(1).step_by(2) {
                if quoted.ends_with(".csv") || quoted.ends_with(".png") {
                    assert!(
                        !quoted.contains('/'),
                        "{name} references a file through directories: {quoted}"
                    );
                }
            }
        }
        cleanup(&dir);
    }

    fn tempdir() -> std::path::PathBuf {
        let dir = std::env::temp_dir().join(format!(
            "axibreak-io-test-{}-{:?}",
            std::process::id(),
            std::thread::current().id()
        ));
        fs::create_dir_all(&dir).unwrap();
        dir
    }

    fn cleanup(dir: &Path) {
        let _ = fs::remove_dir_all(dir);
    }
}
