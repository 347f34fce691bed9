//! Four-parameter variational model of the symmetry breaking.
//!
//! The amplitude and gauge field are restricted to
//!
//! ```text
//!   ψ(r,θ)  = p + q·u(r)·e^{−iθ},          u(r) = r(1 − r/2)
//!   A_iθ    = a₀·α(r) + a₁·β(r)·cosθ,      α = r − 2r²/3,  β = r² − 3r³/4
//! ```
//!
//! with real (p, q, a₀, a₁). Both amplitude basis functions satisfy the
//! Neumann condition at r = 1 (u′(1) = 0, and the constant trivially), and
//! both gauge basis functions produce an induced field that vanishes at the
//! boundary: B_α = (1/r)(rα)′ = 2(1 − r) and B_β = (1/r)(rβ)′ = 3r(1 − r)
//! are both zero at r = 1. The density constraint becomes
//! p² + (11/60)q² = ρ, so the admissible set is a circle crossed with the
//! (a₀, a₁) plane.
//!
//! All integrals are polynomial×trigonometric, so G has an exact closed form;
//! [`reduced_energy`] evaluates it. [`reduced_energy_quadrature`] integrates
//! the ansatz directly with Gauss–Legendre × uniform-angle quadrature of more
//! than sufficient order, giving an independent route that the tests hold to
//! the closed form. [`reduced_minimize`] maps the stationary points of the
//! constrained surface from multiple seeds and classifies each as a minimum
//! or a saddle.

use crate::error::{AxiError, Result};
use crate::fields::Params;
use nalgebra::{Matrix3, Vector3};
use serde::Serialize;
use std::f64::consts::PI;

/// A point of the four-parameter ansatz. `energy` is G at the point once it
/// has been evaluated (constructors set NaN until then).
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ReducedPoint {
    pub p: f64,
    pub q: f64,
    pub a0: f64,
    pub a1: f64,
    pub energy: f64,
}

impl ReducedPoint {
    pub fn new(p: f64, q: f64, a0: f64, a1: f64) -> Self {
        ReducedPoint {
            p,
            q,
            a0,
            a1,
            energy: f64::NAN,
        }
    }

    /// Copy of the point with `energy` filled in from the closed form.
    pub fn evaluated(mut self, params: &Params) -> Self {
        self.energy = reduced_energy(&self, params);
        self
    }
}

/// Nature of a stationary point of the constrained energy surface.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum StationaryKind {
    Minimum,
    Saddle,
}

/// Outcome of a multi-start stationary-point search: converged points plus
/// the seeds that failed, each with its diagnostic.
#[derive(Debug)]
pub struct ReducedScan {
    pub stationary: Vec<(ReducedPoint, StationaryKind)>,
    pub failed_seeds: Vec<(ReducedPoint, AxiError)>,
}

/// G(p, q, a₀, a₁; b) from the exact polynomial integrals.
///
/// The rational coefficients come from integrating the ansatz term by term;
/// every one of them is pinned by the quadrature route in the tests.
pub fn reduced_energy(pt: &ReducedPoint, params: &Params) -> f64 {
    let (p, q, a0, a1) = (pt.p, pt.q, pt.a0, pt.a1);
    let b = params.b;
    let p2 = p * p;
    let q2 = q * q;

    let c_p = b * b / 2.0 + (7.0 / 15.0) * a0 * b + (31.0 / 270.0) * a0 * a0
        + (61.0 / 2688.0) * a1 * a1;
    let c_q = 5.0 / 8.0 - (11.0 / 30.0) * b + (37.0 / 336.0) * b * b - (23.0 / 126.0) * a0
        + (149.0 / 1512.0) * a0 * b
        + (149.0 / 6480.0) * a0 * a0
        + (629.0 / 126720.0) * a1 * a1;
    let c_pq = -1.0 / 8.0 + (47.0 / 336.0) * b + (65.0 / 1008.0) * a0;
    let c_field = (2.0 / 3.0) * a0 * a0 + (3.0 / 20.0) * a1 * a1;

    PI * (p2 * c_p + q2 * c_q + p * q * a1 * c_pq + c_field)
}

/// G evaluated by direct quadrature of the ansatz: 16-point Gauss–Legendre
/// radially × 32 uniform angles, which integrates the polynomial×harmonic
/// density exactly (up to rounding). Independent of the closed form.
pub fn reduced_energy_quadrature(pt: &ReducedPoint, params: &Params) -> f64 {
    let (p, q, a0, a1) = (pt.p, pt.q, pt.a0, pt.a1);
    let b = params.b;
    let (nodes, weights) = gauss_legendre_unit(16);
    let nt = 32;
    let dth = 2.0 * PI / nt as f64;
    let mut total = 0.0;
    for (&r, &wr) in nodes.iter().zip(&weights) {
        let u = r * (1.0 - r / 2.0);
        let u_over_r = 1.0 - r / 2.0;
        let up = 1.0 - r;
        let alpha = r - 2.0 * r * r / 3.0;
        let beta = r * r - 3.0 * r * r * r / 4.0;
        for k in 0..nt {
            let th = k as f64 * dth;
            let (s, c) = th.sin_cos();
            let a_theta = a0 * alpha + a1 * beta * c;
            let bfield = 2.0 * a0 * (1.0 - r) + 3.0 * a1 * r * (1.0 - r) * c;
            // ψ = p + q u e^{−iθ}
            let psi_re = p + q * u * c;
            let psi_im = -q * u * s;
            // ∂_r ψ = q u′ e^{−iθ}
            let dr_sq = q * q * up * up;
            // D_θψ = (q u / r) e^{−iθ} − (A_θ + b r) ψ
            let w = a_theta + b * r;
            let dth_re = q * u_over_r * c - w * psi_re;
            let dth_im = -q * u_over_r * s - w * psi_im;
            total +=
                wr * dth * r * (bfield * bfield + dr_sq + dth_re * dth_re + dth_im * dth_im);
        }
    }
    total
}

/// Mean density (1/π)∫|ψ|²dS of the ansatz: p² + (11/60)q². The cross term
/// carries e^{−iθ} and averages to zero.
pub fn reduced_constraint(pt: &ReducedPoint) -> f64 {
    pt.p * pt.p + (11.0 / 60.0) * pt.q * pt.q
}

/// The constraint evaluated by quadrature instead of the closed coefficient:
/// p² + q²·2∫u²r dr with the integral done by Gauss–Legendre.
pub fn reduced_constraint_quadrature(pt: &ReducedPoint) -> f64 {
    let (nodes, weights) = gauss_legendre_unit(16);
    let int_u2_r: f64 = nodes
        .iter()
        .zip(&weights)
        .map(|(&r, &w)| {
            let u = r * (1.0 - r / 2.0);
            w * u * u * r
        })
        .sum();
    pt.p * pt.p + 2.0 * int_u2_r * pt.q * pt.q
}

/// Deterministic 16-seed lattice on the constraint surface: four mixing
/// angles × two symmetric-gauge guesses × two cosθ-gauge guesses.
pub fn default_seeds(params: &Params) -> Vec<ReducedPoint> {
    let rho = params.rho;
    let mut seeds = Vec::with_capacity(16);
    for &phi in &[0.0, PI / 6.0, PI / 3.0, PI / 2.0] {
        for &a0 in &[0.0, -0.4 * params.b] {
            for &a1 in &[0.0, 0.3] {
                let p = rho.sqrt() * phi.cos();
                let q = (60.0 * rho / 11.0).sqrt() * phi.sin();
                seeds.push(ReducedPoint::new(p, q, a0, a1));
            }
        }
    }
    seeds
}

/// Stationary points of G on the constraint surface, found by damped Newton
/// from each seed in the (φ, a₀, a₁) chart with p = √ρ cosφ,
/// q = √(60ρ/11) sinφ. Converged points are canonicalized (p ≥ 0, then
/// q ≥ 0 via θ → θ+π), deduplicated, classified by the eigenvalues of the
/// finite-difference constrained Hessian, and sorted by energy with
/// lexicographic tie-breaking when energies agree to 10⁻¹².
pub fn reduced_minimize(params: &Params, seeds: &[ReducedPoint]) -> ReducedScan {
    let rho = params.rho;
    let p_amp = rho.sqrt();
    let q_amp = (60.0 * rho / 11.0).sqrt();

    let energy_at = |x: &Vector3<f64>| -> f64 {
        let pt = ReducedPoint::new(p_amp * x[0].cos(), q_amp * x[0].sin(), x[1], x[2]);
        reduced_energy(&pt, params)
    };

    let mut stationary: Vec<(ReducedPoint, StationaryKind)> = Vec::new();
    let mut failed: Vec<(ReducedPoint, AxiError)> = Vec::new();

    for seed in seeds {
        let c_err = (reduced_constraint(seed) - rho).abs();
        if c_err > 1e-8 * rho.max(1.0) {
            failed.push((
                *seed,
                AxiError::InvalidArgument(format!(
                    "seed violates the density constraint by {c_err:.3e}"
                )),
            ));
            continue;
        }
        if rho == 0.0 {
            failed.push((
                *seed,
                AxiError::Degenerate("constraint surface collapses at rho = 0".into()),
            ));
            continue;
        }
        let phi = (seed.q / q_amp).atan2(seed.p / p_amp);
        let mut x = Vector3::new(phi, seed.a0, seed.a1);

        match newton_stationary(&energy_at, &mut x) {
            Ok(()) => {
                let hess = fd_hessian(&energy_at, &x, 1e-4);
                let eig = hess.symmetric_eigenvalues();
                let lam_max = eig.iter().fold(0.0_f64, |m, l| m.max(l.abs()));
                let lam_min = eig.iter().fold(f64::INFINITY, |m, &l| m.min(l));
                let kind = if lam_min > -1e-6 * lam_max.max(1.0) {
                    StationaryKind::Minimum
                } else {
                    StationaryKind::Saddle
                };
                let pt = canonicalize(
                    ReducedPoint::new(p_amp * x[0].cos(), q_amp * x[0].sin(), x[1], x[2])
                        .evaluated(params),
                );
                if !stationary.iter().any(|(other, _)| {
                    (other.p - pt.p).abs() < 1e-5
                        && (other.q - pt.q).abs() < 1e-5
                        && (other.a0 - pt.a0).abs() < 1e-5
                        && (other.a1 - pt.a1).abs() < 1e-5
                }) {
                    stationary.push((pt, kind));
                }
            }
            Err(e) => failed.push((*seed, e)),
        }
    }

    stationary.sort_by(|(a, _), (b, _)| {
        let tol = 1e-12 * a.energy.abs().max(b.energy.abs()).max(1.0);
        if (a.energy - b.energy).abs() <= tol {
            (a.p, a.q, a.a0, a.a1)
                .partial_cmp(&(b.p, b.q, b.a0, b.a1))
                .unwrap()
        } else {
            a.energy.total_cmp(&b.energy)
        }
    });

    ReducedScan {
        stationary,
        failed_seeds: failed,
    }
}

/// Field at which the model's own symmetric branches exchange stability:
/// the root of G₀*(b) = G₁*(b) with each branch minimized over its gauge
/// coefficient. Bisection on [1.5, 4.5].
pub fn reduced_crossing(rho: f64) -> Result<f64> {
    if rho <= 0.0 {
        return Err(AxiError::InvalidArgument(format!(
            "rho must be > 0, got {rho}"
        )));
    }
    let gap = |b: f64| {
        let (g0, g1) = pure_branch_energies(&Params::new(b, rho).unwrap());
        g0 - g1
    };
    let (mut lo, mut hi) = (1.5, 4.5);
    let f_lo = gap(lo);
    let f_hi = gap(hi);
    if f_lo >= 0.0 || f_hi <= 0.0 {
        return Err(AxiError::Bracketing { lo, hi, rho });
    }
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if gap(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Energies of the two pure branches at (b, ρ), each minimized exactly over
/// its symmetric gauge coefficient (the dependence is quadratic; the cosθ
/// coefficient vanishes at a pure stationary point).
pub fn pure_branch_energies(params: &Params) -> (f64, f64) {
    let b = params.b;
    let rho = params.rho;

    // m=0 branch: p² = ρ, q = 0, a₁ = 0
    // G₀(a₀)/π = ρ(b²/2 + (7/15)a₀b + (31/270)a₀²) + (2/3)a₀²
    let quad0 = (31.0 / 270.0) * rho + 2.0 / 3.0;
    let lin0 = (7.0 / 15.0) * rho * b;
    let a0_star0 = -lin0 / (2.0 * quad0);
    let g0 = PI * (rho * b * b / 2.0 + lin0 * a0_star0 + quad0 * a0_star0 * a0_star0);

    // m=1 branch: q² = 60ρ/11, p = 0, a₁ = 0
    let q2 = 60.0 * rho / 11.0;
    let quad1 = (149.0 / 6480.0) * q2 + 2.0 / 3.0;
    let lin1 = q2 * (-23.0 / 126.0 + (149.0 / 1512.0) * b);
    let a0_star1 = -lin1 / (2.0 * quad1);
    let g1 = PI
        * (q2 * (5.0 / 8.0 - (11.0 / 30.0) * b + (37.0 / 336.0) * b * b)
            + lin1 * a0_star1
            + quad1 * a0_star1 * a0_star1);

    (g0, g1)
}

// ---------------------------------------------------------------------------
// Internals.
// ---------------------------------------------------------------------------

/// p ≥ 0 (global phase), then q ≥ 0 via θ → θ+π, which also flips a₁.
fn canonicalize(mut pt: ReducedPoint) -> ReducedPoint {
    if pt.p < 0.0 {
        pt.p = -pt.p;
        pt.q = -pt.q;
    }
    if pt.q < 0.0 {
        pt.q = -pt.q;
        pt.a1 = -pt.a1;
    }
    // clear negative zeros so deduplication and sorting see one representative
    if pt.p == 0.0 {
        pt.p = 0.0;
    }
    if pt.q == 0.0 {
        pt.q = 0.0;
    }
    pt
}

fn fd_gradient(f: &dyn Fn(&Vector3<f64>) -> f64, x: &Vector3<f64>, h: f64) -> Vector3<f64> {
    let mut g = Vector3::zeros();
    for i in 0..3 {
        let mut xp = *x;
        let mut xm = *x;
        xp[i] += h;
        xm[i] -= h;
        g[i] = (f(&xp) - f(&xm)) / (2.0 * h);
    }
    g
}

fn fd_hessian(f: &dyn Fn(&Vector3<f64>) -> f64, x: &Vector3<f64>, h: f64) -> Matrix3<f64> {
    let mut hm = Matrix3::zeros();
    let f0 = f(x);
    for i in 0..3 {
        let mut xp = *x;
        let mut xm = *x;
        xp[i] += h;
        xm[i] -= h;
        hm[(i, i)] = (f(&xp) - 2.0 * f0 + f(&xm)) / (h * h);
        for j in (i + 1)..3 {
            let mut xpp = *x;
            let mut xpm = *x;
            let mut xmp = *x;
            let mut xmm = *x;
            xpp[i] += h;
            xpp[j] += h;
            xpm[i] += h;
            xpm[j] -= h;
            xmp[i] -= h;
            xmp[j] += h;
            xmm[i] -= h;
            xmm[j] -= h;
            let v = (f(&xpp) - f(&xpm) - f(&xmp) + f(&xmm)) / (4.0 * h * h);
            hm[(i, j)] = v;
            hm[(j, i)] = v;
        }
    }
    hm
}

/// Newton iteration on ∇G = 0 in the chart, globalized by Levenberg–Marquardt
/// on the merit |∇G|² (step from (H² + λI)s = −H∇G, which descends the merit
/// for large enough λ even where H is indefinite — Newton alone stalls on the
/// way to saddles). Gradients and Hessians by central differences: the surface
/// is smooth and cheap, and the tolerances sit above the rounding floor of
/// the difference quotients.
fn newton_stationary(f: &dyn Fn(&Vector3<f64>) -> f64, x: &mut Vector3<f64>) -> Result<()> {
    let h_grad = 1e-5;
    let mut lambda = 0.0_f64;
    let mut last_gmax = f64::INFINITY;
    for _ in 0..500 {
        let g = fd_gradient(f, x, h_grad);
        let gnorm = g.norm();
        last_gmax = g.amax();
        let gtol = 1e-8 * f(x).abs().max(1.0);
        if last_gmax <= gtol {
            return Ok(());
        }
        let h = fd_hessian(f, x, 1e-4);

        // pure Newton when it helps (quadratic once in a basin)
        if let Some(sn) = h.lu().solve(&(-g)) {
            if sn.amax() <= 1e-8 {
                *x += sn;
                return Ok(());
            }
            if fd_gradient(f, &(*x + sn), h_grad).norm() < 0.9 * gnorm {
                *x += sn;
                lambda *= 0.3;
                if lambda < 1e-14 {
                    lambda = 0.0;
                }
                continue;
            }
        }

        let h2 = h * h;
        let hg = h * g;
        let lambda_unit = 1.0 + h2.trace() / 3.0;
        let mut accepted = false;
        for _ in 0..40 {
            let m = h2 + Matrix3::identity() * lambda;
            if let Some(s) = m.lu().solve(&(-hg)) {
                let xn = *x + s;
                if fd_gradient(f, &xn, h_grad).norm() < gnorm {
                    *x = xn;
                    lambda *= 0.3;
                    if lambda < 1e-14 * lambda_unit {
                        lambda = 0.0;
                    }
                    accepted = true;
                    break;
                }
            }
            lambda = (lambda * 10.0).max(1e-8 * lambda_unit);
        }
        if !accepted {
            // stagnation at the rounding floor of the difference quotients
            if last_gmax <= 10.0 * gtol {
                return Ok(());
            }
            return Err(AxiError::NonConvergence {
                iters: 500,
                residual: last_gmax,
            });
        }
    }
    Err(AxiError::NonConvergence {
        iters: 500,
        residual: last_gmax,
    })
}

/// Gauss–Legendre nodes and weights on [0, 1], by Newton refinement of the
/// Chebyshev estimates of the Legendre roots.
pub(crate) fn gauss_legendre_unit(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x: f64 = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        // map [−1, 1] → [0, 1]; roots come out in descending order
        nodes[n - 1 - i] = 0.5 * (1.0 + x);
        nodes[i] = 0.5 * (1.0 - x);
        weights[i] = 0.5 * w;
        weights[n - 1 - i] = 0.5 * w;
    }
    (nodes, weights)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::RadialGrid;
    use crate::radial::solve_symmetric;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    // -- quadrature machinery --

    #[test]
    fn gauss_legendre_integrates_polynomials_exactly() {
        let (x, w) = gauss_legendre_unit(16);
        assert_relative_eq!(w.iter().sum::<f64>(), 1.0, max_relative = 1e-14);
        for k in [1_u32, 5, 17, 31] {
            let integral: f64 = x.iter().zip(&w).map(|(&xi, &wi)| wi * xi.powi(k as i32)).sum();
            assert_relative_eq!(integral, 1.0 / (k as f64 + 1.0), max_relative = 1e-13);
        }
    }

    // -- reduced_energy examples --

    #[test]
    fn uniform_state_no_field_is_zero() {
        let params = Params::new(0.0, 1.0).unwrap();
        let pt = ReducedPoint::new(1.0, 0.0, 0.0, 0.0);
        assert_eq!(reduced_energy(&pt, &params), 0.0);
        assert!(reduced_energy_quadrature(&pt, &params).abs() < 1e-14);
    }

    #[test]
    fn uniform_state_in_field() {
        // ψ = p uniform, no induced gauge: G = πp²b²/2
        for (p, b) in [(1.0, 1.0), (0.7, 2.3), (2.0, 0.4)] {
            let params = Params::new(b, p * p).unwrap();
            let pt = ReducedPoint::new(p, 0.0, 0.0, 0.0);
            let expect = PI * p * p * b * b / 2.0;
            assert_relative_eq!(reduced_energy(&pt, &params), expect, max_relative = 1e-14);
            assert_relative_eq!(
                reduced_energy_quadrature(&pt, &params),
                expect,
                max_relative = 1e-13
            );
        }
    }

    #[test]
    fn symmetric_gauge_terms_match_quadrature() {
        // (p, 0, a₀, 0): the a₀ and a₀² coefficients against the quadrature route
        let params = Params::new(1.7, 1.0).unwrap();
        for a0 in [-1.5, -0.3, 0.6, 2.0] {
            let pt = ReducedPoint::new(1.1, 0.0, a0, 0.0);
            let closed = reduced_energy(&pt, &params);
            let quad = reduced_energy_quadrature(&pt, &params);
            assert_relative_eq!(closed, quad, max_relative = 1e-12);
        }
    }

    #[test]
    fn closed_form_matches_quadrature_on_grid() {
        let mut worst = 0.0_f64;
        for &b in &[0.0, 1.0, 1.924, 3.7, 4.5] {
            let params = Params::new(b, 1.0).unwrap();
            for &p in &[0.0, 0.8, -1.3] {
                for &q in &[0.0, 1.1, -2.0] {
                    for &a0 in &[0.0, -1.2, 0.9] {
                        for &a1 in &[0.0, 0.7, -1.8] {
                            let pt = ReducedPoint::new(p, q, a0, a1);
                            let closed = reduced_energy(&pt, &params);
                            let quad = reduced_energy_quadrature(&pt, &params);
                            let rel = (closed - quad).abs() / closed.abs().max(1.0);
                            worst = worst.max(rel);
                        }
                    }
                }
            }
        }
        assert!(worst < 1e-10, "worst closed-vs-quadrature deviation {worst:.3e}");
    }

    proptest! {
        #[test]
        fn closed_form_matches_quadrature_random(
            p in -2.0..2.0f64,
            q in -3.0..3.0f64,
            a0 in -3.0..3.0f64,
            a1 in -3.0..3.0f64,
            b in 0.0..4.5f64,
        ) {
            let params = Params::new(b, 1.0).unwrap();
            let pt = ReducedPoint::new(p, q, a0, a1);
            let closed = reduced_energy(&pt, &params);
            let quad = reduced_energy_quadrature(&pt, &params);
            prop_assert!((closed - quad).abs() <= 1e-10 * closed.abs().max(1.0));
        }

        #[test]
        fn theta_shift_symmetry(
            p in -2.0..2.0f64,
            q in -3.0..3.0f64,
            a0 in -3.0..3.0f64,
            a1 in -3.0..3.0f64,
            b in 0.0..4.5f64,
        ) {
            // θ → θ + π sends (q, a₁) → (−q, −a₁) and leaves G unchanged
            let params = Params::new(b, 1.0).unwrap();
            let g1 = reduced_energy(&ReducedPoint::new(p, q, a0, a1), &params);
            let g2 = reduced_energy(&ReducedPoint::new(p, -q, a0, -a1), &params);
            prop_assert!((g1 - g2).abs() <= 1e-13 * g1.abs().max(1.0));
        }
    }

    // -- reduced_constraint examples --

    #[test]
    fn constraint_examples() {
        assert_eq!(reduced_constraint(&ReducedPoint::new(1.0, 0.0, 0.0, 0.0)), 1.0);
        assert_relative_eq!(
            reduced_constraint(&ReducedPoint::new(0.0, 1.0, 0.0, 0.0)),
            11.0 / 60.0,
            max_relative = 1e-15
        );
        assert_relative_eq!(
            reduced_constraint(&ReducedPoint::new(1.0, 1.0, 0.0, 0.0)),
            1.0 + 11.0 / 60.0,
            max_relative = 1e-15
        );
        // gauge coefficients do not enter the density
        assert_eq!(
            reduced_constraint(&ReducedPoint::new(1.0, 1.0, 5.0, -3.0)),
            reduced_constraint(&ReducedPoint::new(1.0, 1.0, 0.0, 0.0))
        );
    }

    #[test]
    fn constraint_coefficient_vs_quadrature() {
        let pt = ReducedPoint::new(0.0, 1.0, 0.0, 0.0);
        assert!(
            (reduced_constraint_quadrature(&pt) - 11.0 / 60.0).abs() < 1e-12,
            "11/60 coefficient off: {}",
            reduced_constraint_quadrature(&pt)
        );
    }

    // -- decoupling of the cosθ gauge mode at a symmetric point --

    #[test]
    fn cos_mode_decouples_at_symmetric_point() {
        // at q = 0 the energy is even in a₁ (no linear coupling), so the
        // a₁-derivative vanishes at a₁ = 0
        let params = Params::new(2.2, 1.0).unwrap();
        let h = 1e-6;
        let gp = reduced_energy(&ReducedPoint::new(1.0, 0.0, -0.5, h), &params);
        let gm = reduced_energy(&ReducedPoint::new(1.0, 0.0, -0.5, -h), &params);
        assert!(((gp - gm) / (2.0 * h)).abs() < 1e-9);
        // evenness holds at finite a₁ as well
        let ga = reduced_energy(&ReducedPoint::new(1.0, 0.0, -0.5, 0.8), &params);
        let gb = reduced_energy(&ReducedPoint::new(1.0, 0.0, -0.5, -0.8), &params);
        assert_eq!(ga, gb);
    }

    // -- reduced_minimize --

    #[test]
    fn no_field_prefers_no_winding() {
        let params = Params::new(0.0, 1.0).unwrap();
        let scan = reduced_minimize(&params, &default_seeds(&params));
        assert!(scan.failed_seeds.is_empty());
        let (best, kind) = &scan.stationary[0];
        assert_eq!(*kind, StationaryKind::Minimum);
        assert!(best.q.abs() < 1e-6, "q = {}", best.q);
        assert!(best.a1.abs() < 1e-6, "a1 = {}", best.a1);
        assert!(best.energy.abs() < 1e-10);
    }

    #[test]
    fn small_rho_crossing_has_two_symmetric_minima_and_higher_mixed_point() {
        let rho = 0.5;
        let bstar = reduced_crossing(rho).unwrap();
        let params = Params::new(bstar, rho).unwrap();
        let scan = reduced_minimize(&params, &default_seeds(&params));
        let pure0: Vec<_> = scan
            .stationary
            .iter()
            .filter(|(pt, _)| pt.q.abs() < 1e-5 && pt.p > 0.1)
            .collect();
        let pure1: Vec<_> = scan
            .stationary
            .iter()
            .filter(|(pt, _)| pt.p.abs() < 1e-5 && pt.q > 0.1)
            .collect();
        let mixed: Vec<_> = scan
            .stationary
            .iter()
            .filter(|(pt, _)| pt.p.abs() > 1e-3 && pt.q.abs() > 1e-3)
            .collect();
        assert_eq!(pure0.len(), 1, "expected one m=0 stationary point");
        assert_eq!(pure1.len(), 1, "expected one m=1 stationary point");
        assert_eq!(pure0[0].1, StationaryKind::Minimum);
        assert_eq!(pure1[0].1, StationaryKind::Minimum);
        let g0 = pure0[0].0.energy;
        let g1 = pure1[0].0.energy;
        assert!(
            (g0 - g1).abs() <= 1e-6 * g0.abs().max(1.0),
            "branch energies should cross at b̃*: {g0} vs {g1}"
        );
        assert!(!mixed.is_empty(), "expected a mixed stationary point");
        for (pt, _) in &mixed {
            assert!(
                pt.energy > g0.max(g1),
                "mixed point at G={} should lie above the symmetric pair at small rho",
                pt.energy
            );
        }
    }

    #[test]
    fn large_rho_crossing_has_mixed_point_below_both() {
        let rho = 5.0;
        let bstar = reduced_crossing(rho).unwrap();
        assert!(
            (2.7..3.1).contains(&bstar),
            "internal crossing at {bstar}, expected near 2.89"
        );
        let params = Params::new(bstar, rho).unwrap();
        let scan = reduced_minimize(&params, &default_seeds(&params));
        let (g0, g1) = pure_branch_energies(&params);
        assert_relative_eq!(g0, g1, max_relative = 1e-9);
        let mixed_best = scan
            .stationary
            .iter()
            .filter(|(pt, _)| pt.p.abs() > 1e-3 && pt.q.abs() > 1e-3)
            .map(|(pt, _)| pt.energy)
            .fold(f64::INFINITY, f64::min);
        assert!(
            mixed_best < g0.min(g1),
            "mixed branch at {mixed_best} should undercut the symmetric pair at {g0}"
        );
        // and the global minimum of the scan is that mixed point
        assert!((scan.stationary[0].0.energy - mixed_best).abs() < 1e-9);
        assert_eq!(scan.stationary[0].1, StationaryKind::Minimum);
    }

    #[test]
    fn canonical_signs_and_determinism() {
        let params = Params::new(2.9, 5.0).unwrap();
        let scan1 = reduced_minimize(&params, &default_seeds(&params));
        let scan2 = reduced_minimize(&params, &default_seeds(&params));
        assert_eq!(scan1.stationary.len(), scan2.stationary.len());
        for ((a, ka), (b, kb)) in scan1.stationary.iter().zip(&scan2.stationary) {
            assert_eq!(ka, kb);
            assert_eq!(a.p.to_bits(), b.p.to_bits());
            assert_eq!(a.q.to_bits(), b.q.to_bits());
            assert_eq!(a.a0.to_bits(), b.a0.to_bits());
            assert_eq!(a.a1.to_bits(), b.a1.to_bits());
            assert!(a.p >= 0.0 && a.q >= 0.0);
        }
    }

    #[test]
    fn bad_seed_is_reported_not_fatal() {
        let params = Params::new(2.0, 1.0).unwrap();
        let mut seeds = default_seeds(&params);
        seeds.push(ReducedPoint::new(5.0, 5.0, 0.0, 0.0)); // violates constraint
        let scan = reduced_minimize(&params, &seeds);
        assert_eq!(scan.failed_seeds.len(), 1);
        assert!(!scan.stationary.is_empty());
    }

    // -- variational upper bound against the radial solver --

    #[test]
    fn symmetric_branch_is_variational_upper_bound() {
        let grid = RadialGrid::new(256).unwrap();
        for (b, rho) in [(1.924, 1.0), (2.5, 5.0), (3.7, 10.0)] {
            let params = Params::new(b, rho).unwrap();
            let (g0_reduced, _) = pure_branch_energies(&params);
            let exact = solve_symmetric(0, &params, &grid, None).unwrap().energy;
            assert!(
                g0_reduced >= exact - 1e-6,
                "reduced m=0 energy {g0_reduced} below the solver's {exact}"
            );
            assert!(
                g0_reduced <= 1.2 * exact + 1e-6,
                "reduced m=0 energy {g0_reduced} more than 20% above {exact}"
            );
        }
    }
}
