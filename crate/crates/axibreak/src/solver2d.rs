//! Full two-dimensional constrained minimization on the polar grid.
//!
//! The descent is a projected gradient flow on (ψ, A_θ): each step moves
//! against the Euler–Lagrange residuals, rescales ψ back onto the density
//! constraint, and reads μ off as the Rayleigh quotient, which keeps the flow
//! tangent to the constraint surface to first order. The raw residuals are
//! terribly stiff (the radial Laplacian's top eigenvalue grows like n²), so
//! both fields are preconditioned with one implicit step of their dominant
//! linear parts: (I + τ(L_r + k²/r²))⁻¹ per angular mode for ψ and
//! (I + 2τ𝒞)⁻¹ for A_θ, where 𝒞 is the curl-curl operator (which contains no
//! θ-derivatives, so it applies column by column). Both are tridiagonal
//! solves.
//!
//! The step size starts at 10⁻³, halves whenever a step would raise G
//! (recomputing the preconditioned directions, since they depend on τ),
//! and doubles after 50 consecutive monotone steps up to a cap of 10⁻¹.
//! Convergence is declared when both weighted residual norms fall to 10⁻⁶.
//!
//! [`nodal_radius`] and [`phase_winding`] classify the result: the winding of
//! the boundary phase selects the branch, and the zero of ψ is located by
//! quadratic interpolation of |ψ|² along the diameter through its grid
//! minimum. The half-offset radial nodes make that diameter a uniformly
//! spaced line through the origin, so the interpolation needs no special
//! casing at the axis.

use crate::error::{AxiError, Result};
use crate::fields::{
    ampere_residual_raw, apply_h, d_theta_psi, density_mean_raw, energy_raw, rayleigh_mu,
    wnorm_c, wnorm_r, ComplexField, GaugeField, Params, State2D,
};
use crate::grid::PolarGrid;
use crate::radial::{solve_symmetric, SymmetricState};
use crate::reduced::ReducedPoint;
use ndarray::Array2;
use num_complex::Complex64;
use std::sync::Arc;

/// Starting configuration for the 2D minimization.
#[derive(Debug, Clone)]
pub enum Seed2D {
    /// The converged symmetric state of winding m, embedded in 2D.
    Symmetric(u32),
    /// The symmetric m=1 state carrying an m=0 admixture of relative weight
    /// ε — the standard probe for symmetry breaking. The admixture is finite
    /// at the origin, so it displaces the axis vortex at first order.
    Mixed { eps: f64 },
    /// The four-parameter ansatz evaluated on the grid.
    Reduced(ReducedPoint),
    /// Any explicit configuration on the same grid (continuation).
    Explicit(State2D),
}

/// One row of the flow's convergence log.
#[derive(Debug, Clone, Copy)]
pub struct FlowLogRow {
    pub step: usize,
    pub energy: f64,
    pub res_psi: f64,
    pub res_a: f64,
    pub tau: f64,
}

/// Embed a converged symmetric state onto a polar grid sharing its radial
/// resolution: ψ = 𝓡(r)e^{−imθ}, A = 𝓐(r). The spectral θ-derivative is
/// exact on a single harmonic, so the embedded state reproduces the radial
/// solver's discrete energy and residuals identically.
pub fn embed_symmetric(s: &SymmetricState, grid: &Arc<PolarGrid>) -> Result<State2D> {
    if s.grid.n != grid.radial.n {
        return Err(AxiError::Dimension(format!(
            "symmetric state has {} radial nodes, grid wants {}",
            s.grid.n, grid.radial.n
        )));
    }
    let n = grid.radial.n;
    let nt = grid.n_theta;
    let mut psi = Array2::zeros((n, nt));
    let mut a = Array2::zeros((n, nt));
    let m = s.m as f64;
    for j in 0..n {
        for k in 0..nt {
            let th = grid.thetas[k];
            psi[[j, k]] = Complex64::from_polar(s.r_profile[j], -m * th);
            a[[j, k]] = s.a_profile[j];
        }
    }
    Ok(State2D {
        psi: ComplexField::new(Arc::clone(grid), psi)?,
        a: GaugeField::new(Arc::clone(grid), a)?,
        mu: s.mu,
        energy: s.energy,
    })
}

/// Materialize a seed into a constraint-satisfying initial state.
pub fn build_initial(seed: &Seed2D, p: &Params, grid: &Arc<PolarGrid>) -> Result<State2D> {
    let n = grid.radial.n;
    let nt = grid.n_theta;
    match seed {
        Seed2D::Symmetric(m) => {
            let s = solve_symmetric(*m, p, &grid.radial, None)?;
            embed_symmetric(&s, grid)
        }
        Seed2D::Mixed { eps } => {
            // unit-weight m=1 configuration carrying an eps-weighted m=0
            // admixture: the admixture displaces the axis vortex, so above
            // the symmetry-breaking threshold the flow slides off the
            // symmetric branch instead of idling on it
            let s1 = solve_symmetric(1, p, &grid.radial, None)?;
            let s0 = solve_symmetric(0, p, &grid.radial, None)?;
            let mut st = embed_symmetric(&s1, grid)?;
            for j in 0..n {
                let bump = eps * s0.r_profile[j];
                for k in 0..nt {
                    st.psi.values[[j, k]] += Complex64::new(bump, 0.0);
                }
            }
            project_in_place(grid, &mut st.psi.values, p.rho)?;
            Ok(st)
        }
        Seed2D::Reduced(pt) => {
            let mut psi = Array2::zeros((n, nt));
            let mut a = Array2::zeros((n, nt));
            for j in 0..n {
                let r = grid.radial.nodes[j];
                let u = r * (1.0 - r / 2.0);
                let alpha = r - 2.0 * r * r / 3.0;
                let beta = r * r - 3.0 * r * r * r / 4.0;
                for k in 0..nt {
                    let th = grid.thetas[k];
                    psi[[j, k]] =
                        Complex64::new(pt.p, 0.0) + pt.q * u * Complex64::from_polar(1.0, -th);
                    a[[j, k]] = pt.a0 * alpha + pt.a1 * beta * th.cos();
                }
            }
            project_in_place(grid, &mut psi, p.rho)?;
            Ok(State2D {
                psi: ComplexField::new(Arc::clone(grid), psi)?,
                a: GaugeField::new(Arc::clone(grid), a)?,
                mu: 0.0,
                energy: f64::NAN,
            })
        }
        Seed2D::Explicit(s) => {
            let sg = s.shared_grid()?;
            if sg.as_ref() != grid.as_ref() {
                return Err(AxiError::Dimension(
                    "explicit seed lives on a different grid".into(),
                ));
            }
            let mut st = s.clone();
            project_in_place(grid, &mut st.psi.values, p.rho)?;
            Ok(st)
        }
    }
}

fn project_in_place(grid: &PolarGrid, psi: &mut Array2<Complex64>, rho: f64) -> Result<()> {
    let mean = density_mean_raw(grid, psi);
    if mean <= 0.0 {
        return Err(AxiError::Degenerate(
            "cannot project the zero field onto a positive density".into(),
        ));
    }
    let scale = (rho / mean).sqrt();
    psi.mapv_inplace(|v| v * scale);
    Ok(())
}

// ---------------------------------------------------------------------------
// Preconditioner: prefactored tridiagonal solves.
// ---------------------------------------------------------------------------

/// Prefactored (I + τ(L_r + k²/r²)) per angular mode and (I + 2τ𝒞) shared by
/// all columns. Stored as Thomas factors (elimination multiplier, pivot,
/// superdiagonal) laid out (radial, mode) to match row-major sweeps.
struct Precond {
    psi_m: Array2<f64>,
    psi_dp: Array2<f64>,
    psi_sup: Array2<f64>,
    a_m: Vec<f64>,
    a_dp: Vec<f64>,
    a_sup: Vec<f64>,
}

impl Precond {
    fn build(grid: &PolarGrid, tau: f64) -> Self {
        let n = grid.radial.n;
        let nt = grid.n_theta;
        let h = grid.radial.h;
        let h2 = h * h;
        let r = &grid.radial.nodes;

        // ψ: I + τ(L_r + k²/r²), one tridiagonal per mode
        let mut diag = Array2::zeros((n, nt));
        let mut sub = Array2::zeros((n, nt));
        let mut sup = Array2::zeros((n, nt));
        for j in 0..n {
            let mut lr_d = 0.0;
            let mut lr_lo = 0.0;
            let mut lr_up = 0.0;
            if j + 1 < n {
                let sf = grid.radial.face(j + 1);
                lr_d += sf / (r[j] * h2);
                lr_up = -sf / (r[j] * h2);
            }
            if j > 0 {
                let sf = grid.radial.face(j);
                lr_d += sf / (r[j] * h2);
                lr_lo = -sf / (r[j] * h2);
            }
            for k in 0..nt {
                let kk = grid.wavenumbers[k];
                diag[[j, k]] = 1.0 + tau * (lr_d + kk * kk / (r[j] * r[j]));
                sub[[j, k]] = tau * lr_lo;
                sup[[j, k]] = tau * lr_up;
            }
        }
        let (psi_m, psi_dp) = factor_rows(&sub, &diag, &sup);

        // A: I + 2τ𝒞 with the curl-curl rows (and the core flux term at j=0)
        let mut a_diag = vec![0.0; n];
        let mut a_sub = vec![0.0; n];
        let mut a_sup = vec![0.0; n];
        for j in 0..n {
            let mut d = 0.0;
            if j + 1 < n {
                let sf = grid.radial.face(j + 1);
                d += r[j] / (sf * h2);
                a_sup[j] = -2.0 * tau * r[j + 1] / (sf * h2);
            }
            if j > 0 {
                let sf = grid.radial.face(j);
                d += r[j] / (sf * h2);
                a_sub[j] = -2.0 * tau * r[j - 1] / (sf * h2);
            } else {
                d += 2.0 / (r[0] * h);
            }
            a_diag[j] = 1.0 + 2.0 * tau * d;
        }
        let mut a_m = vec![0.0; n];
        let mut a_dp = vec![0.0; n];
        a_dp[0] = a_diag[0];
        for j in 1..n {
            a_m[j] = a_sub[j] / a_dp[j - 1];
            a_dp[j] = a_diag[j] - a_m[j] * a_sup[j - 1];
        }

        Precond {
            psi_m,
            psi_dp,
            psi_sup: sup,
            a_m,
            a_dp,
            a_sup,
        }
    }

    /// out ← (I + τ(L_r + k²/r²))⁻¹ g, applied per Fourier mode.
    fn solve_psi(&self, grid: &PolarGrid, g: &Array2<Complex64>, out: &mut Array2<Complex64>) {
        let n = grid.radial.n;
        let nt = grid.n_theta;
        out.assign(g);
        let buf = out.as_slice_mut().expect("standard layout");
        grid.fft_rows(buf);
        // forward elimination / back substitution over radial index, all
        // modes in lockstep (row-major friendly)
        for j in 1..n {
            for k in 0..nt {
                let m = self.psi_m[[j, k]];
                let prev = buf[(j - 1) * nt + k];
                buf[j * nt + k] -= m * prev;
            }
        }
        for k in 0..nt {
            buf[(n - 1) * nt + k] /= self.psi_dp[[n - 1, k]];
        }
        for j in (0..n - 1).rev() {
            for k in 0..nt {
                let nxt = buf[(j + 1) * nt + k];
                buf[j * nt + k] = (buf[j * nt + k] - self.psi_sup[[j, k]] * nxt) / self.psi_dp[[j, k]];
            }
        }
        grid.ifft_rows(buf);
    }

    /// out ← (I + 2τ𝒞)⁻¹ g, column by column (𝒞 has no θ-derivatives).
    fn solve_a(&self, grid: &PolarGrid, g: &Array2<f64>, out: &mut Array2<f64>) {
        let n = grid.radial.n;
        let nt = grid.n_theta;
        out.assign(g);
        for j in 1..n {
            let m = self.a_m[j];
            for k in 0..nt {
                let prev = out[[j - 1, k]];
                out[[j, k]] -= m * prev;
            }
        }
        for k in 0..nt {
            out[[n - 1, k]] /= self.a_dp[n - 1];
        }
        for j in (0..n - 1).rev() {
            let sup = self.a_sup[j];
            let dp = self.a_dp[j];
            for k in 0..nt {
                let nxt = out[[j + 1, k]];
                out[[j, k]] = (out[[j, k]] - sup * nxt) / dp;
            }
        }
    }
}

/// Thomas-factor a family of tridiagonals laid out (radial, mode).
fn factor_rows(
    sub: &Array2<f64>,
    diag: &Array2<f64>,
    sup: &Array2<f64>,
) -> (Array2<f64>, Array2<f64>) {
    let (n, nt) = diag.dim();
    let mut m = Array2::zeros((n, nt));
    let mut dp = Array2::zeros((n, nt));
    for k in 0..nt {
        dp[[0, k]] = diag[[0, k]];
    }
    for j in 1..n {
        for k in 0..nt {
            let mm = sub[[j, k]] / dp[[j - 1, k]];
            m[[j, k]] = mm;
            dp[[j, k]] = diag[[j, k]] - mm * sup[[j - 1, k]];
        }
    }
    (m, dp)
}

// ---------------------------------------------------------------------------
// The flow.
// ---------------------------------------------------------------------------

/// Step cap of the gradient flow.
pub const MAX_STEPS: usize = 200_000;
/// Convergence tolerance on the Euler-Lagrange residual norms.
pub const RES_TOL: f64 = 1e-6;
const TAU_INIT: f64 = 1e-3;
const TAU_CAP: f64 = 1e-1;
const LOG_EVERY: usize = 1000;

/// Minimize G over (ψ, A_θ) at fixed (b, ρ) from the given seed.
pub fn minimize_2d(seed: &Seed2D, p: &Params, grid: &Arc<PolarGrid>) -> Result<State2D> {
    minimize_2d_logged(seed, p, grid).map(|(s, _)| s)
}

/// As [`minimize_2d`], also returning the convergence log (sampled every
/// thousand steps plus the final step).
pub fn minimize_2d_logged(
    seed: &Seed2D,
    p: &Params,
    grid: &Arc<PolarGrid>,
) -> Result<(State2D, Vec<FlowLogRow>)> {
    if p.rho <= 0.0 {
        return Err(AxiError::InvalidArgument(
            "2D minimization needs rho > 0; the rho → 0 limit is the linear eigenproblem".into(),
        ));
    }
    let mut st = build_initial(seed, p, grid)?;
    let n = grid.radial.n;
    let nt = grid.n_theta;

    let mut tau = TAU_INIT;
    let mut pc = Precond::build(grid, tau);
    let mut monotone = 0usize;
    let mut log: Vec<FlowLogRow> = Vec::new();

    let mut hpsi = Array2::zeros((n, nt));
    let mut scratch1 = Array2::zeros((n, nt));
    let mut scratch2 = Array2::zeros((n, nt));
    let mut dth = Array2::zeros((n, nt));
    let mut gpsi = Array2::zeros((n, nt));
    let mut ga = Array2::zeros((n, nt));
    let mut faces = Array2::zeros((n + 1, nt));
    let mut dpsi = Array2::zeros((n, nt));
    let mut da = Array2::zeros((n, nt));
    let mut psi_try: Array2<Complex64> = Array2::zeros((n, nt));
    let mut a_try: Array2<f64> = Array2::zeros((n, nt));

    let mut energy = energy_raw(grid, &st.psi.values, &st.a.values, p.b);
    let mut mu;
    let mut last_res = f64::INFINITY;

    for step in 0..MAX_STEPS {
        apply_h(
            grid,
            &st.psi.values,
            &st.a.values,
            p.b,
            &mut scratch1,
            &mut scratch2,
            &mut hpsi,
        );
        mu = rayleigh_mu(grid, &st.psi.values, &hpsi);
        for (g, (h, v)) in gpsi
            .iter_mut()
            .zip(hpsi.iter().zip(st.psi.values.iter()))
        {
            *g = h - mu * v;
        }
        d_theta_psi(
            grid,
            &st.psi.values,
            &st.a.values,
            p.b,
            &mut scratch1,
            &mut dth,
        );
        ampere_residual_raw(grid, &st.psi.values, &st.a.values, &dth, &mut faces, &mut ga);

        let res_psi = wnorm_c(grid, &gpsi);
        let res_a = wnorm_r(grid, &ga);
        last_res = res_psi.max(res_a);
        if step % LOG_EVERY == 0 {
            log.push(FlowLogRow {
                step,
                energy,
                res_psi,
                res_a,
                tau,
            });
        }
        if last_res <= RES_TOL {
            if step % LOG_EVERY != 0 {
                log.push(FlowLogRow {
                    step,
                    energy,
                    res_psi,
                    res_a,
                    tau,
                });
            }
            st.mu = mu;
            st.energy = energy;
            return Ok((st, log));
        }

        pc.solve_psi(grid, &gpsi, &mut dpsi);
        pc.solve_a(grid, &ga, &mut da);

        let mut halvings = 0usize;
        loop {
            for (t, (v, d)) in psi_try
                .iter_mut()
                .zip(st.psi.values.iter().zip(dpsi.iter()))
            {
                *t = v - tau * d;
            }
            project_in_place(grid, &mut psi_try, p.rho)?;
            for (t, (v, d)) in a_try.iter_mut().zip(st.a.values.iter().zip(da.iter())) {
                *t = v - tau * d;
            }
            let e_try = energy_raw(grid, &psi_try, &a_try, p.b);
            if e_try <= energy + 1e-14 * energy.abs() {
                std::mem::swap(&mut st.psi.values, &mut psi_try);
                std::mem::swap(&mut st.a.values, &mut a_try);
                energy = e_try;
                break;
            }
            halvings += 1;
            if halvings > 40 {
                return Err(AxiError::StepSizeFailure { step, tau });
            }
            tau *= 0.5;
            monotone = 0;
            pc = Precond::build(grid, tau);
            pc.solve_psi(grid, &gpsi, &mut dpsi);
            pc.solve_a(grid, &ga, &mut da);
        }
        if halvings == 0 {
            monotone += 1;
            if monotone >= 50 && tau < TAU_CAP {
                tau = (2.0 * tau).min(TAU_CAP);
                pc = Precond::build(grid, tau);
                monotone = 0;
            }
        }
    }

    Err(AxiError::FlowNonConvergence {
        steps: MAX_STEPS,
        residual: last_res,
        history: log.iter().map(|r| (r.step, r.res_psi.max(r.res_a))).collect(),
    })
}

// ---------------------------------------------------------------------------
// Diagnostics.
// ---------------------------------------------------------------------------

/// Winding number of arg ψ around the outermost ring, by summing
/// principal-value phase increments. Sign convention: the pure sector
/// ψ ∝ e^{−imθ} has winding +m, matching the branch label m.
pub fn phase_winding(state: &State2D) -> Result<i64> {
    let grid = state.shared_grid()?.clone();
    let n = grid.radial.n;
    let nt = grid.n_theta;
    let ring = state.psi.values.row(n - 1);
    let max_abs = ring.iter().fold(0.0_f64, |m, v| m.max(v.norm()));
    if max_abs == 0.0 || ring.iter().any(|v| v.norm() <= 1e-12 * max_abs) {
        return Err(AxiError::UndefinedWinding);
    }
    let mut total = 0.0;
    for k in 0..nt {
        let a = ring[k];
        let b = ring[(k + 1) % nt];
        total += (b * a.conj()).arg();
    }
    Ok((-total / (2.0 * std::f64::consts::PI)).round() as i64)
}

/// Radius of the nodal point of a single-winding state.
///
/// |ψ|² is minimized over the grid, then interpolated quadratically along the
/// diameter through the minimizing column (the half-offset nodes put this
/// slice on a uniform mesh straddling the origin, so an axis zero
/// interpolates to radius 0 without special treatment). Radii under half a
/// cell snap to 0.
pub fn nodal_radius(state: &State2D) -> Result<f64> {
    let w = phase_winding(state)?;
    if w != 1 {
        return Err(AxiError::Topology { found: w });
    }
    let grid = state.shared_grid()?.clone();
    let n = grid.radial.n;
    let nt = grid.n_theta;
    let h = grid.radial.h;
    let psi = &state.psi.values;

    let mut kmin = 0;
    let mut jmin = 0;
    let mut best = f64::INFINITY;
    for j in 0..n {
        for k in 0..nt {
            let v = psi[[j, k]].norm_sqr();
            if v < best {
                best = v;
                jmin = j;
                kmin = k;
            }
        }
    }
    let _ = jmin;
    let k_op = (kmin + nt / 2) % nt;

    // diameter slice: x = −r on the opposite column, +r on the minimizing one
    let mut xs = vec![0.0; 2 * n];
    let mut ys = vec![0.0; 2 * n];
    for j in 0..n {
        xs[n - 1 - j] = -grid.radial.nodes[j];
        ys[n - 1 - j] = psi[[j, k_op]].norm_sqr();
        xs[n + j] = grid.radial.nodes[j];
        ys[n + j] = psi[[j, kmin]].norm_sqr();
    }

    let mut i_min = 0;
    for i in 1..2 * n {
        if ys[i] < ys[i_min] {
            i_min = i;
        }
    }
    let r = if i_min == 0 || i_min == 2 * n - 1 {
        xs[i_min].abs()
    } else {
        let (y0, y1, y2) = (ys[i_min - 1], ys[i_min], ys[i_min + 1]);
        let denom = y0 - 2.0 * y1 + y2;
        let d = if denom > 0.0 {
            (0.5 * (y0 - y2) / denom).clamp(-0.5, 0.5)
        } else {
            0.0
        };
        (xs[i_min] + d * h).abs()
    };
    Ok(if r < 0.5 * h { 0.0 } else { r })
}

/// Rotate a state by an integer number of grid angles (an exact symmetry of
/// the discrete functional).
pub fn rotate_state(state: &State2D, shift: i64) -> Result<State2D> {
    let grid = state.shared_grid()?.clone();
    let nt = grid.n_theta as i64;
    let s = shift.rem_euclid(nt) as usize;
    let mut out = state.clone();
    for j in 0..grid.radial.n {
        for k in 0..grid.n_theta {
            let kk = (k + s) % grid.n_theta;
            out.psi.values[[j, kk]] = state.psi.values[[j, k]];
            out.a.values[[j, kk]] = state.a.values[[j, k]];
        }
    }
    Ok(out)
}

/// Rotate so the angular position of min |ψ| sits at θ = π — the reporting
/// convention for asymmetric states.
pub fn orient_node_to_pi(state: &State2D) -> Result<State2D> {
    let grid = state.shared_grid()?.clone();
    let n = grid.radial.n;
    let nt = grid.n_theta;
    let mut kmin = 0;
    let mut best = f64::INFINITY;
    for j in 0..n {
        for k in 0..nt {
            let v = state.psi.values[[j, k]].norm_sqr();
            if v < best {
                best = v;
                kmin = k;
            }
        }
    }
    rotate_state(state, nt as i64 / 2 - kmin as i64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::critical::fit_bstar;
    use crate::fields::{el_residuals, energy_total};
    use approx::assert_relative_eq;

    fn grid(n: usize, nt: usize) -> Arc<PolarGrid> {
        Arc::new(PolarGrid::from_sizes(n, nt).unwrap())
    }

    fn analytic_state(
        g: &Arc<PolarGrid>,
        f: impl Fn(f64, f64) -> Complex64,
    ) -> State2D {
        let mut psi = Array2::zeros((g.radial.n, g.n_theta));
        for j in 0..g.radial.n {
            for k in 0..g.n_theta {
                psi[[j, k]] = f(g.radial.nodes[j], g.thetas[k]);
            }
        }
        State2D {
            psi: ComplexField::new(Arc::clone(g), psi).unwrap(),
            a: GaugeField::zeros(Arc::clone(g)),
            mu: 0.0,
            energy: f64::NAN,
        }
    }

    // -- seeds --

    #[test]
    fn seeds_satisfy_constraint_after_projection() {
        let g = grid(64, 16);
        let p = Params::new(2.0, 1.5).unwrap();
        let seeds = [
            Seed2D::Symmetric(0),
            Seed2D::Symmetric(1),
            Seed2D::Mixed { eps: 0.05 },
            Seed2D::Reduced(ReducedPoint::new(1.0, 0.8, -0.5, 0.1)),
        ];
        for seed in &seeds {
            let st = build_initial(seed, &p, &g).unwrap();
            let mean = density_mean_raw(&g, &st.psi.values);
            assert_relative_eq!(mean, 1.5, max_relative = 1e-12);
        }
    }

    #[test]
    fn explicit_seed_grid_mismatch_rejected() {
        let g1 = grid(64, 16);
        let g2 = grid(48, 16);
        let p = Params::new(1.0, 1.0).unwrap();
        let st = build_initial(&Seed2D::Symmetric(0), &p, &g1).unwrap();
        assert!(matches!(
            build_initial(&Seed2D::Explicit(st), &p, &g2),
            Err(AxiError::Dimension(_))
        ));
    }

    // -- the flow --

    #[test]
    fn trivial_seed_converges_immediately() {
        let g = grid(64, 16);
        let p = Params::new(0.0, 1.0).unwrap();
        let (st, log) = minimize_2d_logged(&Seed2D::Symmetric(0), &p, &g).unwrap();
        assert!(st.energy.abs() < 1e-12);
        assert!(st.mu.abs() < 1e-10);
        assert_eq!(log.len(), 1, "uniform state is already stationary");
        for v in st.psi.values.iter() {
            assert_relative_eq!(v.re, 1.0, max_relative = 1e-10);
            assert!(v.im.abs() < 1e-12);
        }
    }

    #[test]
    fn symmetric_seeds_match_radial_solver() {
        // the embedding is exact on a single harmonic, so the flow accepts
        // the radial solution as already converged
        let g = grid(128, 32);
        let b = fit_bstar(1.0);
        let p = Params::new(b, 1.0).unwrap();
        for m in [0u32, 1] {
            let st = minimize_2d(&Seed2D::Symmetric(m), &p, &g).unwrap();
            let rad = solve_symmetric(m, &p, &g.radial, None).unwrap();
            assert_relative_eq!(st.energy, rad.energy, max_relative = 1e-5);
            assert_relative_eq!(st.mu, rad.mu, max_relative = 1e-5);
            let (rs, ra) = el_residuals(&st, &p).unwrap();
            assert!(rs <= 1e-6 && ra <= 1e-6);
        }
    }

    #[test]
    fn m1_state_has_axis_node_and_unit_winding() {
        let g = grid(128, 32);
        let p = Params::new(1.924, 1.0).unwrap();
        let st = minimize_2d(&Seed2D::Symmetric(1), &p, &g).unwrap();
        assert_eq!(phase_winding(&st).unwrap(), 1);
        assert_eq!(nodal_radius(&st).unwrap(), 0.0);
    }

    #[test]
    fn mixed_seed_relaxes_below_bifurcation() {
        // at ρ=1 the m=0 admixture dies out and the node returns to the axis
        let g = grid(96, 32);
        let p = Params::new(fit_bstar(1.0), 1.0).unwrap();
        let (st, log) = minimize_2d_logged(&Seed2D::Mixed { eps: 0.05 }, &p, &g).unwrap();
        for pair in log.windows(2) {
            assert!(
                pair[1].energy <= pair[0].energy + 1e-12 * pair[0].energy.abs(),
                "energy rose between logged steps"
            );
        }
        assert_eq!(phase_winding(&st).unwrap(), 1);
        assert!(nodal_radius(&st).unwrap() <= g.radial.h);
        // back on the symmetric branch, energy-wise
        let g1 = solve_symmetric(1, &p, &g.radial, None).unwrap().energy;
        assert_relative_eq!(st.energy, g1, max_relative = 1e-5);
    }

    #[test]
    fn mixed_seed_breaks_symmetry_above_bifurcation() {
        let g = grid(96, 32);
        let rho = 5.0;
        let p = Params::new(fit_bstar(rho), rho).unwrap();
        let (st, log) = minimize_2d_logged(&Seed2D::Mixed { eps: 0.05 }, &p, &g).unwrap();
        for pair in log.windows(2) {
            assert!(pair[1].energy <= pair[0].energy + 1e-12 * pair[0].energy.abs());
        }
        assert_eq!(phase_winding(&st).unwrap(), 1);
        let r_node = nodal_radius(&st).unwrap();
        assert!(r_node > 0.05, "expected an off-axis node, got {r_node}");
        // below both symmetric branches
        let g0 = solve_symmetric(0, &p, &g.radial, None).unwrap().energy;
        let g1 = solve_symmetric(1, &p, &g.radial, None).unwrap().energy;
        assert!(st.energy < g0 && st.energy < g1);
        // constraint held
        assert_relative_eq!(density_mean_raw(&g, &st.psi.values), rho, max_relative = 1e-10);

        // rotation degeneracy: grid rotations change nothing measurable
        for shift in [1i64, 7, 16] {
            let rot = rotate_state(&st, shift).unwrap();
            let e_rot = energy_total(&rot, &p).unwrap();
            assert_relative_eq!(e_rot, st.energy, max_relative = 1e-10);
            let (rs, ra) = el_residuals(&rot, &p).unwrap();
            assert!(rs <= 1.0001e-6 && ra <= 1.0001e-6);
        }

        // orientation fixing puts the node's column at θ = π
        let oriented = orient_node_to_pi(&st).unwrap();
        assert_relative_eq!(
            energy_total(&oriented, &p).unwrap(),
            st.energy,
            max_relative = 1e-10
        );
        let mut kmin = 0;
        let mut best = f64::INFINITY;
        for j in 0..g.radial.n {
            for k in 0..g.n_theta {
                let v = oriented.psi.values[[j, k]].norm_sqr();
                if v < best {
                    best = v;
                    kmin = k;
                }
            }
        }
        assert_eq!(kmin, g.n_theta / 2);
    }

    // -- diagnostics on analytic fields --

    #[test]
    fn manufactured_offcenter_zero() {
        let g = grid(128, 32);
        // plain displaced vortex: |ψ|² is exactly quadratic along the slice
        let st = analytic_state(&g, |r, th| {
            r * Complex64::from_polar(1.0, -th) - Complex64::new(0.3, 0.0)
        });
        assert_eq!(phase_winding(&st).unwrap(), 1);
        assert_relative_eq!(nodal_radius(&st).unwrap(), 0.3, epsilon = 1e-9);

        // a smooth positive envelope moves the interpolation off the exact
        // quadratic; stays within grid tolerance
        let st2 = analytic_state(&g, |r, th| {
            (r * Complex64::from_polar(1.0, -th) - Complex64::new(0.3, 0.0))
                * (2.0 - r * r)
        });
        assert_relative_eq!(nodal_radius(&st2).unwrap(), 0.3, epsilon = 1e-3);
    }

    #[test]
    fn winding_zero_and_higher() {
        let g = grid(64, 16);
        let uniform = analytic_state(&g, |_, _| Complex64::new(1.0, 0.0));
        assert_eq!(phase_winding(&uniform).unwrap(), 0);
        assert!(matches!(
            nodal_radius(&uniform),
            Err(AxiError::Topology { found: 0 })
        ));
        let m2 = analytic_state(&g, |r, th| {
            r * r * Complex64::from_polar(1.0, -2.0 * th)
        });
        assert_eq!(phase_winding(&m2).unwrap(), 2);
        assert!(matches!(
            nodal_radius(&m2),
            Err(AxiError::Topology { found: 2 })
        ));
    }

    #[test]
    fn boundary_zero_is_undefined_winding() {
        let g = grid(64, 16);
        let mut st = analytic_state(&g, |_, _| Complex64::new(1.0, 0.0));
        st.psi.values[[g.radial.n - 1, 0]] = Complex64::new(0.0, 0.0);
        assert!(matches!(phase_winding(&st), Err(AxiError::UndefinedWinding)));
    }

    #[test]
    fn rho_zero_rejected() {
        let g = grid(64, 16);
        let p = Params::new(1.0, 0.0).unwrap();
        assert!(matches!(
            minimize_2d(&Seed2D::Symmetric(0), &p, &g),
            Err(AxiError::InvalidArgument(_))
        ));
    }
}
