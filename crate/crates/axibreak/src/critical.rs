//! The critical field b*(ρ): where the m=0 and m=1 symmetric branches trade
//! places as the energy minimum.
//!
//! [`find_bstar`] locates the root of ΔG(b) = G₀(b, ρ) − G₁(b, ρ) by
//! bisection, seeding each radial solve with the previous solution on its
//! branch (continuation), and verifies that ΔG is increasing across the
//! final bracket before reporting. [`fit_bstar`] is the reference cubic that
//! the numerical root is validated against.

use crate::error::{AxiError, Result};
use crate::fields::Params;
use crate::grid::RadialGrid;
use crate::radial::{landau_crossing, solve_symmetric, SymmetricState};

/// Validity range of the cubic fit.
pub const FIT_RHO_RANGE: (f64, f64) = (0.0, 10.0);

/// The reference cubic b*(ρ) = 1.924 + 0.171ρ + 0.00104ρ² − 0.000036ρ³.
/// Evaluated exactly as written for any ρ; see [`fit_in_range`] for whether
/// ρ lies in the range the coefficients were fitted on.
pub fn fit_bstar(rho: f64) -> f64 {
    1.924 + 0.171 * rho + 0.00104 * rho * rho - 0.000036 * rho * rho * rho
}

/// Whether ρ lies inside the fit's validity range.
pub fn fit_in_range(rho: f64) -> bool {
    rho >= FIT_RHO_RANGE.0 && rho <= FIT_RHO_RANGE.1
}

pub const BRACKET: (f64, f64) = (1.5, 4.5);

/// Field at which G₀ = G₁ at fixed ρ, to |Δb| ≤ tol_b.
///
/// At ρ = 0 both branch energies vanish identically and the crossing is the
/// Landau-level crossing of the linear eigenvalues, which is delegated to the
/// shooting oracle's bisection.
pub fn find_bstar(rho: f64, grid: &RadialGrid, tol_b: f64) -> Result<f64> {
    if !(tol_b > 0.0) {
        return Err(AxiError::InvalidArgument(format!(
            "tol_b must be > 0, got {tol_b}"
        )));
    }
    if rho < 0.0 {
        return Err(AxiError::InvalidArgument(format!(
            "rho must be >= 0, got {rho}"
        )));
    }
    if rho == 0.0 {
        return Ok(landau_crossing(grid));
    }

    // continuation memory per branch
    let mut seed0: Option<SymmetricState> = None;
    let mut seed1: Option<SymmetricState> = None;
    let gap = |b: f64, seed0: &mut Option<SymmetricState>, seed1: &mut Option<SymmetricState>| -> Result<f64> {
        let p = Params::new(b, rho)?;
        let s0 = solve_symmetric(0, &p, grid, seed0.as_ref())?;
        let s1 = solve_symmetric(1, &p, grid, seed1.as_ref())?;
        let d = s0.energy - s1.energy;
        *seed0 = Some(s0);
        *seed1 = Some(s1);
        Ok(d)
    };

    let (mut lo, mut hi) = BRACKET;
    let f_lo = gap(lo, &mut seed0, &mut seed1)?;
    let f_hi = gap(hi, &mut seed0, &mut seed1)?;
    if !(f_lo < 0.0 && f_hi > 0.0) {
        return Err(AxiError::Bracketing { lo, hi, rho });
    }

    for _ in 0..200 {
        if hi - lo <= tol_b {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if gap(mid, &mut seed0, &mut seed1)? < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }

    // ΔG should rise monotonically through the final bracket; a violation
    // means the crossing was not a simple root at this resolution.
    let w = hi - lo;
    let f_a = gap(lo, &mut seed0, &mut seed1)?;
    let f_b = gap(lo + 0.25 * w, &mut seed0, &mut seed1)?;
    let f_c = gap(lo + 0.75 * w, &mut seed0, &mut seed1)?;
    let f_d = gap(hi, &mut seed0, &mut seed1)?;
    if !(f_a < f_b && f_b < f_c && f_c < f_d) {
        return Err(AxiError::Degenerate(format!(
            "energy gap not monotone across the final bracket [{lo}, {hi}] at rho = {rho}"
        )));
    }

    Ok(0.5 * (lo + hi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn fit_reference_values() {
        assert_relative_eq!(fit_bstar(0.0), 1.924, max_relative = 1e-12);
        assert_relative_eq!(fit_bstar(1.0), 2.096004, max_relative = 1e-12);
        assert_relative_eq!(fit_bstar(10.0), 3.702, max_relative = 1e-12);
        assert!(fit_in_range(10.0) && !fit_in_range(10.5) && !fit_in_range(-0.1));
    }

    #[test]
    fn numeric_crossing_tracks_fit() {
        let grid = RadialGrid::new(256).unwrap();
        for rho in [0.001, 1.0, 5.0] {
            let b = find_bstar(rho, &grid, 1e-4).unwrap();
            let fit = fit_bstar(rho);
            assert!(
                (b - fit).abs() / fit <= 0.02,
                "rho={rho}: b*={b} vs fit {fit}"
            );
        }
    }

    #[test]
    fn rho_zero_delegates_to_landau_crossing() {
        let grid = RadialGrid::new(512).unwrap();
        let b = find_bstar(0.0, &grid, 1e-4).unwrap();
        assert!((b - 1.924).abs() / 1.924 < 0.01);
    }

    #[test]
    fn deterministic_and_stable_under_tolerance_halving() {
        let grid = RadialGrid::new(256).unwrap();
        let b1 = find_bstar(1.0, &grid, 1e-3).unwrap();
        let b1_again = find_bstar(1.0, &grid, 1e-3).unwrap();
        assert_eq!(b1.to_bits(), b1_again.to_bits());
        let b2 = find_bstar(1.0, &grid, 5e-4).unwrap();
        assert!((b1 - b2).abs() <= 1e-3);
    }

    #[test]
    fn gap_changes_sign_around_crossing() {
        let grid = RadialGrid::new(256).unwrap();
        let rho = 1.0;
        let b = find_bstar(rho, &grid, 1e-4).unwrap();
        let gap_at = |bb: f64| {
            let p = Params::new(bb, rho).unwrap();
            let g0 = solve_symmetric(0, &p, &grid, None).unwrap().energy;
            let g1 = solve_symmetric(1, &p, &grid, None).unwrap().energy;
            g0 - g1
        };
        assert!(gap_at(b - 0.1) < 0.0, "m=0 should win below b*");
        assert!(gap_at(b + 0.1) > 0.0, "m=1 should win above b*");
    }

    #[test]
    fn out_of_reach_crossing_reports_bracketing() {
        // far outside the fit range the crossing leaves [1.5, 4.5]
        let grid = RadialGrid::new(128).unwrap();
        assert!(matches!(
            find_bstar(20.0, &grid, 1e-3),
            Err(AxiError::Bracketing { .. })
        ));
    }

    #[test]
    fn invalid_tolerance_rejected() {
        let grid = RadialGrid::new(128).unwrap();
        assert!(matches!(
            find_bstar(1.0, &grid, 0.0),
            Err(AxiError::InvalidArgument(_))
        ));
        assert!(matches!(
            find_bstar(-1.0, &grid, 1e-4),
            Err(AxiError::InvalidArgument(_))
        ));
    }
}
