//! Continuation in the mean density along the critical line b = b*(ρ):
//! follows the asymmetric branch, recording the nodal radius and the energy
//! gap to the best symmetric state at each step.

use std::sync::Arc;

use serde::Serialize;

use crate::critical::find_bstar;
use crate::error::{AxiError, Result};
use crate::fields::{energy_total, Params, State2D};
use crate::grid::PolarGrid;
use crate::radial::solve_symmetric;
use crate::solver2d::{embed_symmetric, minimize_2d, nodal_radius, phase_winding, Seed2D};

/// Nodal radii at or below this value count as "on axis": the branch is only
/// considered detected once the node clears it.
pub const DETECTION_RADIUS: f64 = 0.05;

/// One point of the sweep along b = b*(ρ).
#[derive(Debug, Clone, Serialize)]
pub struct SweepRow {
    /// Mean density for this row.
    pub rho: f64,
    /// Critical field at this density, computed on the sweep's own radial
    /// resolution so all energies in the row share one discretization.
    pub bstar: f64,
    /// Radius of the nodal line (0 when the node sits on the axis or the
    /// state carries no winding).
    pub r_node: f64,
    /// (G − G_sym)/ρ with G_sym the lower of the two symmetric energies,
    /// evaluated on the same 2D grid as the asymmetric candidate.
    pub g_gap: f64,
    /// False when any solve in this row failed; numeric fields are NaN then.
    pub converged: bool,
}

/// Resolution and tolerance knobs for [`sweep`].
#[derive(Debug, Clone)]
pub struct SweepConfig {
    /// Radial points of the 2D grid (also used for the per-row b* solve).
    pub n_r: usize,
    /// Angular points of the 2D grid.
    pub n_theta: usize,
    /// Bisection tolerance on b*. Kept tight so the two symmetric branches
    /// are numerically degenerate at the returned field, which is what makes
    /// the recorded g_gap a clean signed quantity: a symmetric row's gap is
    /// bounded by |dΔG/db|·tol_b/(2ρ), and the default keeps that below
    /// 10⁻⁶ with margin down to the smallest density on the default grid.
    pub tol_b: f64,
    /// Weight of the m=0 admixture used to probe for the asymmetric branch
    /// while it has not been detected yet.
    pub eps: f64,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            n_r: 192,
            n_theta: 64,
            tol_b: 2e-7,
            eps: 0.05,
        }
    }
}

/// Bifurcation point estimated from a sweep.
#[derive(Debug, Clone, Serialize)]
pub struct BifurcationEstimate {
    /// Onset density from linear extrapolation of r_node² to zero.
    pub rho_c: f64,
    /// Densities of the last undetected and first detected rows.
    pub bracket: (f64, f64),
}

/// Default density grid: 0.5 to 10 in steps of 0.25, refined to steps of
/// 0.05 across the onset window [2.2, 3.2].
pub fn default_rho_grid() -> Vec<f64> {
    // build in integer hundredths so refinement overlaps dedup exactly
    let mut hundredths: Vec<i64> = (2..=40).map(|i| i * 25).collect();
    hundredths.extend((0..=20).map(|i| 220 + i * 5));
    hundredths.sort_unstable();
    hundredths.dedup();
    hundredths.into_iter().map(|c| c as f64 / 100.0).collect()
}

/// Sweeps the density grid upward along b = b*(ρ).
///
/// Each row computes the critical field, relaxes an asymmetric candidate,
/// and measures it against the best symmetric state on the same grid. Rows
/// where the branch has not been detected yet are probed with a fresh mixed
/// seed; once the node moves off the axis, the previous row's state seeds
/// the next one (continuation). A failed row is recorded with NaN fields and
/// the chain continues from the last good state.
pub fn sweep(rho_values: &[f64], cfg: &SweepConfig) -> Result<Vec<SweepRow>> {
    if rho_values.is_empty() {
        return Err(AxiError::InvalidArgument("empty density grid".into()));
    }
    for pair in rho_values.windows(2) {
        if pair[1] <= pair[0] {
            return Err(AxiError::InvalidArgument(
                "density grid must be strictly increasing".into(),
            ));
        }
    }
    if rho_values[0] <= 0.0 || rho_values[rho_values.len() - 1] > 10.0 {
        return Err(AxiError::InvalidArgument(
            "density grid must lie in (0, 10]".into(),
        ));
    }

    let grid = Arc::new(PolarGrid::from_sizes(cfg.n_r, cfg.n_theta)?);
    let mut rows = Vec::with_capacity(rho_values.len());
    let mut carry: Option<State2D> = None;
    let mut detected = false;
    for &rho in rho_values {
        match sweep_row(rho, cfg, &grid, if detected { carry.as_ref() } else { None }) {
            Ok((row, state)) => {
                detected = row.r_node > DETECTION_RADIUS;
                carry = Some(state);
                rows.push(row);
            }
            Err(_) => rows.push(SweepRow {
                rho,
                bstar: f64::NAN,
                r_node: f64::NAN,
                g_gap: f64::NAN,
                converged: false,
            }),
        }
    }
    Ok(rows)
}

fn sweep_row(
    rho: f64,
    cfg: &SweepConfig,
    grid: &Arc<PolarGrid>,
    carry: Option<&State2D>,
) -> Result<(SweepRow, State2D)> {
    let bstar = find_bstar(rho, &grid.radial, cfg.tol_b)?;
    let p = Params::new(bstar, rho)?;

    let state = match carry {
        Some(prev) => minimize_2d(&Seed2D::Explicit(prev.clone()), &p, grid)?,
        None => minimize_2d(&Seed2D::Mixed { eps: cfg.eps }, &p, grid)?,
    };

    let (e0, e0_radial) = symmetric_energy_2d(0, &p, grid)?;
    let (e1, e1_radial) = symmetric_energy_2d(1, &p, grid)?;
    for (e, er) in [(e0, e0_radial), (e1, e1_radial)] {
        if (e - er).abs() > 1e-8 * er.abs().max(1.0) {
            return Err(AxiError::Degenerate(format!(
                "embedded symmetric energy {e} disagrees with radial value {er}"
            )));
        }
    }
    let g_sym = e0.min(e1);
    let g_gap = (state.energy - g_sym) / rho;

    let r_node = match phase_winding(&state)? {
        1 => nodal_radius(&state)?,
        0 => 0.0,
        w => return Err(AxiError::Topology { found: w }),
    };

    Ok((
        SweepRow {
            rho,
            bstar,
            r_node,
            g_gap,
            converged: true,
        },
        state,
    ))
}

/// Energy of the symmetric branch evaluated on the 2D grid (via exact
/// embedding) together with the radial solver's own value; the two must
/// agree since the embedding is resolution-preserving.
fn symmetric_energy_2d(m: u32, p: &Params, grid: &Arc<PolarGrid>) -> Result<(f64, f64)> {
    let s = solve_symmetric(m, p, &grid.radial, None)?;
    let st = embed_symmetric(&s, grid)?;
    Ok((energy_total(&st, p)?, s.energy))
}

/// Estimates the onset density from sweep rows by extrapolating r_node²
/// linearly to zero over the first detected rows (square-root branch shape
/// near a pitchfork). Returns `None` when no converged row has the node off
/// the axis.
pub fn locate_bifurcation(rows: &[SweepRow]) -> Option<BifurcationEstimate> {
    let conv: Vec<&SweepRow> = rows.iter().filter(|r| r.converged).collect();
    let first = conv.iter().position(|r| r.r_node > DETECTION_RADIUS)?;
    let lo = if first == 0 {
        conv[0].rho
    } else {
        conv[first - 1].rho
    };
    let hi = conv[first].rho;

    let pts: Vec<(f64, f64)> = conv[first..]
        .iter()
        .take_while(|r| r.r_node > DETECTION_RADIUS)
        .take(3)
        .map(|r| (r.rho, r.r_node * r.r_node))
        .collect();
    if pts.len() < 2 {
        return Some(BifurcationEstimate {
            rho_c: 0.5 * (lo + hi),
            bracket: (lo, hi),
        });
    }

    let k = pts.len() as f64;
    let mean_x = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let mean_y = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mean_x) * (p.0 - mean_x)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mean_x) * (p.1 - mean_y)).sum();
    if sxx <= 0.0 || sxy <= 0.0 {
        // flat or inverted trend: fall back to the bracket midpoint
        return Some(BifurcationEstimate {
            rho_c: 0.5 * (lo + hi),
            bracket: (lo, hi),
        });
    }
    let slope = sxy / sxx;
    Some(BifurcationEstimate {
        rho_c: mean_x - mean_y / slope,
        bracket: (lo, hi),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::critical::fit_bstar;
    use approx::assert_relative_eq;

    fn synthetic_row(rho: f64, r_node: f64) -> SweepRow {
        SweepRow {
            rho,
            bstar: fit_bstar(rho),
            r_node,
            g_gap: if r_node > 0.0 { -1e-3 } else { 0.0 },
            converged: true,
        }
    }

    #[test]
    fn synthetic_square_root_branch_extrapolates_exactly() {
        let rows: Vec<SweepRow> = [2.0, 2.5, 3.25, 3.5, 3.75, 4.0]
            .iter()
            .map(|&rho| synthetic_row(rho, f64::max(rho - 3.0, 0.0).sqrt()))
            .collect();
        let est = locate_bifurcation(&rows).unwrap();
        assert_relative_eq!(est.rho_c, 3.0, epsilon = 1e-12);
        assert_eq!(est.bracket, (2.5, 3.25));
    }

    #[test]
    fn sweep_below_onset_finds_no_branch() {
        let rows: Vec<SweepRow> = [0.5, 1.0, 1.5, 2.0]
            .iter()
            .map(|&rho| synthetic_row(rho, 0.0))
            .collect();
        assert!(locate_bifurcation(&rows).is_none());
    }

    #[test]
    fn single_detected_row_reports_bracket_midpoint() {
        let rows = vec![synthetic_row(2.5, 0.0), synthetic_row(3.0, 0.2)];
        let est = locate_bifurcation(&rows).unwrap();
        assert_relative_eq!(est.rho_c, 2.75, epsilon = 1e-12);
        assert_eq!(est.bracket, (2.5, 3.0));
    }

    #[test]
    fn unconverged_rows_are_ignored_by_the_fit() {
        let mut rows: Vec<SweepRow> = [2.0, 3.25, 3.5, 3.75]
            .iter()
            .map(|&rho| synthetic_row(rho, f64::max(rho - 3.0, 0.0).sqrt()))
            .collect();
        rows.insert(
            1,
            SweepRow {
                rho: 2.5,
                bstar: f64::NAN,
                r_node: f64::NAN,
                g_gap: f64::NAN,
                converged: false,
            },
        );
        let est = locate_bifurcation(&rows).unwrap();
        assert_relative_eq!(est.rho_c, 3.0, epsilon = 1e-12);
        assert_eq!(est.bracket, (2.0, 3.25));
    }

    #[test]
    fn default_grid_is_increasing_and_refined_near_onset() {
        let g = default_rho_grid();
        assert_eq!(g.first().copied(), Some(0.5));
        assert_eq!(g.last().copied(), Some(10.0));
        for pair in g.windows(2) {
            assert!(pair[1] > pair[0]);
            let step = pair[1] - pair[0];
            if pair[0] >= 2.2 - 1e-12 && pair[1] <= 3.2 + 1e-12 {
                assert!(step < 0.0501, "coarse step {step} inside onset window");
            } else {
                assert!(step < 0.2501);
            }
        }
        // refinement must not duplicate the coarse points it overlaps
        let n225 = g.iter().filter(|&&v| (v - 2.25).abs() < 1e-9).count();
        assert_eq!(n225, 1);
    }

    #[test]
    fn rejects_bad_density_grids() {
        let cfg = SweepConfig::default();
        assert!(matches!(
            sweep(&[], &cfg),
            Err(AxiError::InvalidArgument(_))
        ));
        assert!(matches!(
            sweep(&[1.0, 1.0], &cfg),
            Err(AxiError::InvalidArgument(_))
        ));
        assert!(matches!(
            sweep(&[2.0, 1.0], &cfg),
            Err(AxiError::InvalidArgument(_))
        ));
        assert!(matches!(
            sweep(&[0.5, 11.0], &cfg),
            Err(AxiError::InvalidArgument(_))
        ));
    }

    #[test]
    fn coarse_sweep_crosses_the_onset() {
        let cfg = SweepConfig {
            n_r: 96,
            n_theta: 32,
            tol_b: 1e-6,
            eps: 0.05,
        };
        let rhos = [2.0, 2.5, 3.0, 3.5, 4.0];
        let rows = sweep(&rhos, &cfg).unwrap();
        assert_eq!(rows.len(), rhos.len());
        for row in &rows {
            assert!(row.converged, "row at rho={} failed", row.rho);
            // an admissible symmetric state bounds the candidate from above
            assert!(
                row.g_gap <= 1e-6,
                "g_gap={} at rho={}",
                row.g_gap,
                row.rho
            );
            assert_relative_eq!(
                row.bstar,
                fit_bstar(row.rho),
                max_relative = 5e-3
            );
        }
        // symmetric below the onset, broken above it
        assert!(rows[0].r_node <= DETECTION_RADIUS);
        assert!(rows[1].r_node <= DETECTION_RADIUS);
        let detected: Vec<&SweepRow> =
            rows.iter().filter(|r| r.r_node > DETECTION_RADIUS).collect();
        assert!(
            detected.len() >= 2,
            "nodal radii {:?}",
            rows.iter().map(|r| r.r_node).collect::<Vec<_>>()
        );
        for row in &detected {
            assert!(row.g_gap < 0.0, "g_gap={} at rho={}", row.g_gap, row.rho);
        }
        for pair in detected.windows(2) {
            assert!(pair[1].r_node >= pair[0].r_node - 1e-3);
        }
        let est = locate_bifurcation(&rows).unwrap();
        assert!(
            (2.2..=3.2).contains(&est.rho_c),
            "rho_c={} bracket={:?}",
            est.rho_c,
            est.bracket
        );
    }

    #[test]
    fn downward_walk_records_reentry() {
        // hysteresis diagnostic: walk the broken branch back down in density
        // and note where the node returns to the axis; the deviation from
        // the upward bracket is recorded, not asserted (none is expected for
        // a supercritical pitchfork).
        let cfg = SweepConfig {
            n_r: 96,
            n_theta: 32,
            tol_b: 1e-6,
            eps: 0.05,
        };
        let grid = Arc::new(PolarGrid::from_sizes(cfg.n_r, cfg.n_theta).unwrap());
        let b = find_bstar(3.5, &grid.radial, cfg.tol_b).unwrap();
        let p = Params::new(b, 3.5).unwrap();
        let mut state = minimize_2d(&Seed2D::Mixed { eps: cfg.eps }, &p, &grid).unwrap();
        assert!(nodal_radius(&state).unwrap() > DETECTION_RADIUS);

        let mut reentry = None;
        for rho in [3.0, 2.8, 2.6, 2.4, 2.2] {
            let b = find_bstar(rho, &grid.radial, cfg.tol_b).unwrap();
            let p = Params::new(b, rho).unwrap();
            state = minimize_2d(&Seed2D::Explicit(state.clone()), &p, &grid).unwrap();
            let r = match phase_winding(&state).unwrap() {
                1 => nodal_radius(&state).unwrap(),
                _ => 0.0,
            };
            if r <= DETECTION_RADIUS {
                reentry = Some(rho);
                break;
            }
        }
        eprintln!("downward walk re-entered the symmetric branch at rho={reentry:?}");
        assert!(
            reentry.is_some(),
            "branch survived down to rho=2.2, far below the onset"
        );
    }

    #[test]
    fn embedded_and_radial_symmetric_energies_agree() {
        let grid = Arc::new(PolarGrid::from_sizes(96, 32).unwrap());
        let p = Params::new(fit_bstar(3.0), 3.0).unwrap();
        for m in [0u32, 1] {
            let (e2d, erad) = symmetric_energy_2d(m, &p, &grid).unwrap();
            assert_relative_eq!(e2d, erad, max_relative = 1e-10);
        }
    }
}
