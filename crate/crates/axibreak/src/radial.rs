//! The axially symmetric family as a two-point boundary-value problem.
//!
//! In the sector ψ = 𝓡_m(r)e^{−imθ}, A_i = 𝓐_m(r)θ̂ the Euler–Lagrange
//! equations reduce to the ODE system
//!
//! ```text
//!   −(1/r)(r 𝓡′)′ + (m/r − 𝓐 − b r)² 𝓡 = μ 𝓡
//!   −d/dr[(1/r)(r 𝓐)′] = (m/r − 𝓐 − b r) 𝓡²
//! ```
//!
//! with 𝓡′(1) = 0, 𝓡 ~ r^m at the axis, 𝓐(0) = 0, B(1) = (1/r)(r𝓐)′|₁ = 0,
//! and the density constraint 2∫₀¹𝓡² r dr = ρ closing the system through μ.
//!
//! Discretization matches the 2D module exactly (same half-offset grid, same
//! conservative stencils, same core flux term), so an embedded radial solution
//! evaluates to the same discrete energy as the 2D functional.
//!
//! [`solve_symmetric`] runs Newton on the full coupled unknowns (𝓡, 𝓐, μ)
//! with a bordered block-tridiagonal Jacobian and a residual line search.
//! [`landau_mu`] is a deliberately independent oracle for the ρ→0 limit: it
//! shoots the linear radial equation with RK4 and bisects on 𝓡′(1; μ), and
//! shares no code with the finite-volume path.

use crate::error::{AxiError, Result};
use crate::fields::Params;
use crate::grid::RadialGrid;

/// Acceptance gate on the weighted Euler-Lagrange residual norms of a
/// returned symmetric state.
pub const RESIDUAL_GATE: f64 = 1e-8;

/// Acceptance gate on the density-constraint defect of a returned state.
pub const CONSTRAINT_GATE: f64 = 1e-10;

/// One member of the symmetric family.
#[derive(Debug, Clone)]
pub struct SymmetricState {
    pub m: u32,
    pub grid: RadialGrid,
    /// Samples of 𝓡_m(r) at the grid nodes (real; global phase fixed so the
    /// profile is positive at its peak).
    pub r_profile: Vec<f64>,
    /// Samples of 𝓐_m(r) at the grid nodes.
    pub a_profile: Vec<f64>,
    /// Lagrange multiplier of the density constraint.
    pub mu: f64,
    /// Thermodynamic potential G of the state.
    pub energy: f64,
}

impl SymmetricState {
    /// Discrete value of 2∫𝓡² r dr (equals ρ at a converged state).
    pub fn constraint_value(&self) -> f64 {
        let h = self.grid.h;
        2.0 * self
            .r_profile
            .iter()
            .zip(&self.grid.nodes)
            .map(|(r_val, r)| r_val * r_val * r)
            .sum::<f64>()
            * h
    }

    /// Weighted L² norms of the radial Schrödinger and Ampère residuals.
    pub fn residual_norms(&self, p: &Params) -> (f64, f64) {
        let sys = System::new(self.m, p.b, p.rho, &self.grid);
        let (fr, fa, _) = sys.residual(&self.r_profile, &self.a_profile, self.mu);
        let two_pi_h = 2.0 * std::f64::consts::PI * self.grid.h;
        let mut s = 0.0;
        let mut a = 0.0;
        for j in 0..self.grid.n {
            let w = two_pi_h * self.grid.nodes[j];
            s += w * fr[j] * fr[j];
            a += w * fa[j] * fa[j];
        }
        (s.sqrt(), a.sqrt())
    }

    /// Induced field at the center, B_i(0) = 2𝓐(r_0)/r_0 (negative for a
    /// diamagnetic response).
    pub fn induced_field_origin(&self) -> f64 {
        2.0 * self.a_profile[0] / self.grid.nodes[0]
    }
}

// ---------------------------------------------------------------------------
// Discrete system.
// ---------------------------------------------------------------------------

struct System<'g> {
    m: f64,
    b: f64,
    rho: f64,
    g: &'g RadialGrid,
}

impl<'g> System<'g> {
    fn new(m: u32, b: f64, rho: f64, g: &'g RadialGrid) -> Self {
        System {
            m: m as f64,
            b,
            rho,
            g,
        }
    }

    /// m/r − 𝓐 − b r at node j.
    #[inline]
    fn v(&self, a: &[f64], j: usize) -> f64 {
        let r = self.g.nodes[j];
        self.m / r - a[j] - self.b * r
    }

    /// Face field with the core value at f = 0 and B = 0 at f = n.
    fn faces(&self, a: &[f64]) -> Vec<f64> {
        let n = self.g.n;
        let h = self.g.h;
        let r = &self.g.nodes;
        let mut bf = vec![0.0; n + 1];
        bf[0] = 2.0 * a[0] / r[0];
        for f in 1..n {
            bf[f] = (r[f] * a[f] - r[f - 1] * a[f - 1]) / (self.g.face(f) * h);
        }
        bf
    }

    /// Residuals (F_𝓡, F_𝓐, F_constraint).
    fn residual(&self, rp: &[f64], ap: &[f64], mu: f64) -> (Vec<f64>, Vec<f64>, f64) {
        let n = self.g.n;
        let h = self.g.h;
        let r = &self.g.nodes;
        let bf = self.faces(ap);
        let mut fr = vec![0.0; n];
        let mut fa = vec![0.0; n];
        for j in 0..n {
            let mut lap = 0.0;
            if j + 1 < n {
                lap += self.g.face(j + 1) * (rp[j] - rp[j + 1]);
            }
            if j > 0 {
                lap += self.g.face(j) * (rp[j] - rp[j - 1]);
            }
            lap /= r[j] * h * h;
            let v = self.v(ap, j);
            fr[j] = lap + (v * v - mu) * rp[j];
            fa[j] = -(bf[j + 1] - bf[j]) / h - v * rp[j] * rp[j];
        }
        let fc = 2.0 * h
            * rp.iter()
                .zip(r)
                .map(|(x, rj)| x * x * rj)
                .sum::<f64>()
            - self.rho;
        (fr, fa, fc)
    }

    /// Thermodynamic potential of the profile pair.
    fn energy(&self, rp: &[f64], ap: &[f64]) -> f64 {
        let n = self.g.n;
        let h = self.g.h;
        let r = &self.g.nodes;
        let two_pi = 2.0 * std::f64::consts::PI;
        let mut e_face = 0.0;
        for f in 1..n {
            let sf = self.g.face(f);
            let dr = (rp[f] - rp[f - 1]) / h;
            let bf = (r[f] * ap[f] - r[f - 1] * ap[f - 1]) / (sf * h);
            e_face += sf * (dr * dr + bf * bf);
        }
        let mut e_node = 0.0;
        for j in 0..n {
            let v = self.v(ap, j);
            e_node += r[j] * v * v * rp[j] * rp[j];
        }
        // Core flux energy: (2a₀/r₀)² over the innermost disk of area πr₀².
        let e_core = 4.0 * std::f64::consts::PI * ap[0] * ap[0];
        two_pi * h * (e_face + e_node) + e_core
    }
}

// 2×2 blocks stored row-major.
type Blk = [f64; 4];

#[inline]
fn blk_inv(b: &Blk) -> Blk {
    let det = b[0] * b[3] - b[1] * b[2];
    [b[3] / det, -b[1] / det, -b[2] / det, b[0] / det]
}

#[inline]
fn blk_mv(a: &Blk, v: [f64; 2]) -> [f64; 2] {
    [a[0] * v[0] + a[1] * v[1], a[2] * v[0] + a[3] * v[1]]
}

/// Jacobian of the bulk system in block-tridiagonal form. Off-diagonal blocks
/// are diagonal (𝓡 and 𝓐 only couple to themselves across nodes), stored as
/// pairs; diagonal blocks are full 2×2.
struct BlockTri {
    diag: Vec<Blk>,
    /// sub[j] couples node j to j−1 (valid for j ≥ 1): (𝓡𝓡, 𝓐𝓐) entries.
    sub: Vec<[f64; 2]>,
    /// sup[j] couples node j to j+1 (valid for j ≤ n−2).
    sup: Vec<[f64; 2]>,
}

impl BlockTri {
    fn assemble(sys: &System, rp: &[f64], ap: &[f64], mu: f64) -> Self {
        let n = sys.g.n;
        let h = sys.g.h;
        let r = &sys.g.nodes;
        let h2 = h * h;
        let mut diag = vec![[0.0; 4]; n];
        let mut sub = vec![[0.0; 2]; n];
        let mut sup = vec![[0.0; 2]; n];
        for j in 0..n {
            let v = sys.v(ap, j);
            let mut drr = v * v - mu;
            let mut daa = rp[j] * rp[j];
            if j + 1 < n {
                let sf = sys.g.face(j + 1);
                drr += sf / (r[j] * h2);
                daa += r[j] / (sf * h2);
                sup[j] = [-sf / (r[j] * h2), -r[j + 1] / (sf * h2)];
            }
            if j > 0 {
                let sf = sys.g.face(j);
                drr += sf / (r[j] * h2);
                daa += r[j] / (sf * h2);
                sub[j] = [-sf / (r[j] * h2), -r[j - 1] / (sf * h2)];
            } else {
                // core flux term: d/da₀ of −(B₁ − B₀)/h includes (2/r₀)/h
                daa += 2.0 / (r[0] * h);
            }
            let cross = -2.0 * v * rp[j];
            diag[j] = [drr, cross, cross, daa];
        }
        BlockTri { diag, sub, sup }
    }

    /// LU-factor in place: replaces diag with Γ_j⁻¹.
    fn factor(&mut self) {
        let n = self.diag.len();
        self.diag[0] = blk_inv(&self.diag[0]);
        for j in 1..n {
            // Γ_j = D_j − L_j Γ_{j−1}⁻¹ U_{j−1}, with L, U diagonal blocks.
            let gi = &self.diag[j - 1]; // already inverted
            let l = self.sub[j];
            let u = self.sup[j - 1];
            let lgu = [
                l[0] * gi[0] * u[0],
                l[0] * gi[1] * u[1],
                l[1] * gi[2] * u[0],
                l[1] * gi[3] * u[1],
            ];
            let gj = [
                self.diag[j][0] - lgu[0],
                self.diag[j][1] - lgu[1],
                self.diag[j][2] - lgu[2],
                self.diag[j][3] - lgu[3],
            ];
            self.diag[j] = blk_inv(&gj);
        }
    }

    /// Solve (after factor) for a right-hand side given as interleaved pairs.
    fn solve(&self, rhs: &[[f64; 2]]) -> Vec<[f64; 2]> {
        let n = self.diag.len();
        let mut y = vec![[0.0; 2]; n];
        y[0] = rhs[0];
        for j in 1..n {
            let gi = &self.diag[j - 1];
            let gy = blk_mv(gi, y[j - 1]);
            let l = self.sub[j];
            y[j] = [rhs[j][0] - l[0] * gy[0], rhs[j][1] - l[1] * gy[1]];
        }
        let mut x = vec![[0.0; 2]; n];
        x[n - 1] = blk_mv(&self.diag[n - 1], y[n - 1]);
        for j in (0..n - 1).rev() {
            let u = self.sup[j];
            let t = [y[j][0] - u[0] * x[j + 1][0], y[j][1] - u[1] * x[j + 1][1]];
            x[j] = blk_mv(&self.diag[j], t);
        }
        x
    }
}

// ---------------------------------------------------------------------------
// Linear-limit initialization: smallest eigenpair of L_r + (m/r − br)².
// ---------------------------------------------------------------------------

/// Symmetric-tridiagonal representation (d, e) of the linear radial operator
/// conjugated by √r (which makes the finite-volume operator symmetric).
fn linear_tridiag(m: f64, b: f64, g: &RadialGrid) -> (Vec<f64>, Vec<f64>) {
    let n = g.n;
    let h2 = g.h * g.h;
    let r = &g.nodes;
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n - 1];
    for j in 0..n {
        let v0 = m / r[j] - b * r[j];
        d[j] = v0 * v0;
        if j + 1 < n {
            let sf = g.face(j + 1);
            d[j] += sf / (r[j] * h2);
            e[j] = -sf / (h2 * (r[j] * r[j + 1]).sqrt());
        }
        if j > 0 {
            d[j] += g.face(j) / (r[j] * h2);
        }
    }
    (d, e)
}

/// Number of eigenvalues of the symmetric tridiagonal (d, e) below x
/// (Sturm sequence count).
fn sturm_count(d: &[f64], e: &[f64], x: f64) -> usize {
    let mut count = 0;
    let mut q = d[0] - x;
    if q < 0.0 {
        count += 1;
    }
    for j in 1..d.len() {
        let ej = e[j - 1];
        let mut denom = q;
        if denom == 0.0 {
            denom = 1e-300;
        }
        q = d[j] - x - ej * ej / denom;
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

/// Smallest eigenvalue and eigenvector by Sturm bisection + inverse iteration.
fn smallest_eigenpair(d: &[f64], e: &[f64]) -> (f64, Vec<f64>) {
    let n = d.len();
    // Gershgorin bracket.
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for j in 0..n {
        let mut radius = 0.0;
        if j > 0 {
            radius += e[j - 1].abs();
        }
        if j + 1 < n {
            radius += e[j].abs();
        }
        lo = lo.min(d[j] - radius);
        hi = hi.max(d[j] + radius);
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if sturm_count(d, e, mid) >= 1 {
            hi = mid;
        } else {
            lo = mid;
        }
        if hi - lo <= 1e-13 * (1.0 + hi.abs()) {
            break;
        }
    }
    let lambda = 0.5 * (lo + hi);

    // Inverse iteration on (T − (λ − δ)I) with a tiny regularizing shift.
    let shift = lambda - 1e-9 * (1.0 + lambda.abs());
    let mut x = vec![1.0; n];
    for it in 0..5 {
        x = tridiag_solve_shifted(d, e, shift, &x);
        let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        for v in x.iter_mut() {
            *v /= norm;
        }
        if it >= 2 {
            break;
        }
    }
    (lambda, x)
}

/// Thomas solve of (T − shift·I) y = rhs for symmetric tridiagonal T.
fn tridiag_solve_shifted(d: &[f64], e: &[f64], shift: f64, rhs: &[f64]) -> Vec<f64> {
    let n = d.len();
    let mut dp = vec![0.0; n];
    let mut y = rhs.to_vec();
    dp[0] = d[0] - shift;
    for j in 1..n {
        let m = e[j - 1] / dp[j - 1];
        dp[j] = d[j] - shift - m * e[j - 1];
        y[j] -= m * y[j - 1];
    }
    y[n - 1] /= dp[n - 1];
    for j in (0..n - 1).rev() {
        y[j] = (y[j] - e[j] * y[j + 1]) / dp[j];
    }
    y
}

// ---------------------------------------------------------------------------
// Public operations.
// ---------------------------------------------------------------------------

/// Smallest eigenvalue μ of the linear radial operator
/// −(1/r)(r𝓡′)′ + (m/r − br)²𝓡 = μ𝓡 with 𝓡′(1) = 0 and 𝓡 ~ r^m at the axis:
/// the ρ→0 (Landau) limit of the symmetric problem.
///
/// Implemented by shooting: RK4 from the axis with the series start
/// 𝓡 = r^m(1 + c r²), c = −(μ + 2mb)/(4m + 4), scanning and then bisecting
/// the first sign change of 𝓡′(1; μ). This path is independent of the
/// finite-volume discretization and serves as its oracle. The grid only sets
/// the RK4 resolution (4n steps).
pub fn landau_mu(m: u32, b: f64, grid: &RadialGrid) -> f64 {
    let steps = 4 * grid.n.max(64);
    let shoot = |mu: f64| shoot_rprime_at_1(m, b, mu, steps);

    let mf = m as f64;
    let mut mu_lo = -2.0 * mf * b - 1.0;
    let mut f_lo = shoot(mu_lo);
    if f_lo == 0.0 {
        return mu_lo;
    }
    let step = 0.25;
    let cap = 2.0 * b * b + 4.0 * mf * b + 60.0;
    let mut mu_hi = mu_lo;
    let mut f_hi;
    loop {
        mu_hi += step;
        f_hi = shoot(mu_hi);
        if f_hi == 0.0 {
            return mu_hi;
        }
        if f_lo * f_hi < 0.0 {
            break;
        }
        mu_lo = mu_hi;
        f_lo = f_hi;
        assert!(
            mu_hi < cap,
            "no eigenvalue found below {cap} for m={m}, b={b}"
        );
    }
    for _ in 0..100 {
        let mid = 0.5 * (mu_lo + mu_hi);
        let f_mid = shoot(mid);
        if f_mid == 0.0 {
            return mid;
        }
        if f_lo * f_mid < 0.0 {
            mu_hi = mid;
        } else {
            mu_lo = mid;
            f_lo = f_mid;
        }
        if mu_hi - mu_lo <= 1e-14 * (1.0 + mu_hi.abs()) {
            break;
        }
    }
    0.5 * (mu_lo + mu_hi)
}

/// 𝓡′(1; μ) for the linear equation, by RK4 on (𝓡, 𝓡′).
fn shoot_rprime_at_1(m: u32, b: f64, mu: f64, steps: usize) -> f64 {
    let mf = m as f64;
    let r0: f64 = 1e-6;
    let c = -(mu + 2.0 * mf * b) / (4.0 * mf + 4.0);
    // series start R = r^m (1 + c r²)
    let mut y = [
        r0.powi(m as i32) * (1.0 + c * r0 * r0),
        r0.powi(m as i32 - 1) * (mf + (mf + 2.0) * c * r0 * r0),
    ];
    let h = (1.0 - r0) / steps as f64;
    let f = |r: f64, y: [f64; 2]| -> [f64; 2] {
        let v = mf / r - b * r;
        [y[1], -y[1] / r + (v * v - mu) * y[0]]
    };
    let mut r = r0;
    for _ in 0..steps {
        let k1 = f(r, y);
        let k2 = f(r + 0.5 * h, [y[0] + 0.5 * h * k1[0], y[1] + 0.5 * h * k1[1]]);
        let k3 = f(r + 0.5 * h, [y[0] + 0.5 * h * k2[0], y[1] + 0.5 * h * k2[1]]);
        let k4 = f(r + h, [y[0] + h * k3[0], y[1] + h * k3[1]]);
        y[0] += h / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]);
        y[1] += h / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]);
        r += h;
        // the linear problem allows rescaling; keep magnitudes in range
        let scale = y[0].abs().max(y[1].abs());
        if scale > 1e100 {
            y[0] /= scale;
            y[1] /= scale;
        }
    }
    y[1]
}

/// Field at which the m=0 and m=1 Landau curves cross (the ρ→0 limit of the
/// critical field).
pub fn landau_crossing(grid: &RadialGrid) -> f64 {
    let gap = |b: f64| landau_mu(0, b, grid) - landau_mu(1, b, grid);
    let mut lo = 1.0;
    let mut hi = 3.0;
    let f_lo = gap(lo);
    assert!(
        f_lo < 0.0 && gap(hi) > 0.0,
        "Landau crossing not bracketed in [1, 3]"
    );
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if gap(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Solve the symmetric family at (m, b, ρ) by Newton on (𝓡, 𝓐, μ).
///
/// `init` seeds the iteration when given (continuation); otherwise the
/// linear-limit eigenvector scaled to the constraint starts it. Returns a
/// state with radial residual norms ≤ 1e-8 and the constraint met to 1e-10,
/// or a diagnostic error.
pub fn solve_symmetric(
    m: u32,
    p: &Params,
    grid: &RadialGrid,
    init: Option<&SymmetricState>,
) -> Result<SymmetricState> {
    if p.rho < 0.0 {
        return Err(AxiError::InvalidArgument(format!(
            "rho must be >= 0, got {}",
            p.rho
        )));
    }
    let n = grid.n;
    let sys = System::new(m, p.b, p.rho, grid);

    // ρ = 0: the constraint degenerates; the state is the linear limit itself.
    if p.rho == 0.0 {
        let (d, e) = linear_tridiag(m as f64, p.b, grid);
        let (mu, _) = smallest_eigenpair(&d, &e);
        return Ok(SymmetricState {
            m,
            grid: grid.clone(),
            r_profile: vec![0.0; n],
            a_profile: vec![0.0; n],
            mu,
            energy: 0.0,
        });
    }

    let (mut rp, mut ap, mut mu) = match init {
        Some(s) if s.grid.n == n => (s.r_profile.clone(), s.a_profile.clone(), s.mu),
        _ => {
            let (d, e) = linear_tridiag(m as f64, p.b, grid);
            let (mu0, v) = smallest_eigenpair(&d, &e);
            // undo the √r symmetrization, fix the sign at the peak
            let mut rp: Vec<f64> = v
                .iter()
                .zip(&grid.nodes)
                .map(|(vj, rj)| vj / rj.sqrt())
                .collect();
            let peak = rp
                .iter()
                .enumerate()
                .max_by(|a, b| a.1.abs().total_cmp(&b.1.abs()))
                .map(|(i, _)| i)
                .unwrap();
            if rp[peak] < 0.0 {
                for v in rp.iter_mut() {
                    *v = -*v;
                }
            }
            let norm = 2.0 * grid.h
                * rp.iter()
                    .zip(&grid.nodes)
                    .map(|(x, r)| x * x * r)
                    .sum::<f64>();
            let scale = (p.rho / norm).sqrt();
            for v in rp.iter_mut() {
                *v *= scale;
            }
            (rp, vec![0.0; n], mu0)
        }
    };

    let full_norm = |fr: &[f64], fa: &[f64], fc: f64| -> f64 {
        let mut s = fc * fc;
        for j in 0..n {
            s += fr[j] * fr[j] + fa[j] * fa[j];
        }
        s.sqrt()
    };

    let update_tol = 1e-10;
    let mut last_res = f64::INFINITY;
    for _iter in 0..120 {
        let (fr, fa, fc) = sys.residual(&rp, &ap, mu);
        let res = full_norm(&fr, &fa, fc);
        last_res = res;
        let max_f = fr
            .iter()
            .chain(fa.iter())
            .chain(std::iter::once(&fc))
            .fold(0.0_f64, |acc, v| acc.max(v.abs()));
        if max_f < 1e-12 {
            break;
        }

        let mut jac = BlockTri::assemble(&sys, &rp, &ap, mu);
        jac.factor();

        // bordered solve: J Δx + c Δμ = −F,  dᵀΔx = −F_c
        let rhs_f: Vec<[f64; 2]> = (0..n).map(|j| [-fr[j], -fa[j]]).collect();
        let u = jac.solve(&rhs_f);
        let rhs_c: Vec<[f64; 2]> = (0..n).map(|j| [-rp[j], 0.0]).collect();
        let v = jac.solve(&rhs_c);
        let d_dot = |x: &[[f64; 2]]| -> f64 {
            4.0 * grid.h
                * x.iter()
                    .zip(rp.iter().zip(&grid.nodes))
                    .map(|(xj, (rj, node))| xj[0] * rj * node)
                    .sum::<f64>()
        };
        let denom = d_dot(&v);
        if denom.abs() < 1e-300 {
            return Err(AxiError::NonConvergence {
                iters: _iter,
                residual: res,
            });
        }
        let dmu = (d_dot(&u) + fc) / denom;
        let dx: Vec<[f64; 2]> = u
            .iter()
            .zip(&v)
            .map(|(uj, vj)| [uj[0] - dmu * vj[0], uj[1] - dmu * vj[1]])
            .collect();

        let max_step = dx
            .iter()
            .fold(0.0_f64, |acc, d| acc.max(d[0].abs()).max(d[1].abs()))
            .max(dmu.abs());
        if max_step <= update_tol {
            break;
        }

        // line search on the residual norm
        let mut alpha = 1.0;
        let mut accepted = false;
        for _ in 0..40 {
            let rp_n: Vec<f64> = rp.iter().zip(&dx).map(|(x, d)| x + alpha * d[0]).collect();
            let ap_n: Vec<f64> = ap.iter().zip(&dx).map(|(x, d)| x + alpha * d[1]).collect();
            let mu_n = mu + alpha * dmu;
            let (fr_n, fa_n, fc_n) = sys.residual(&rp_n, &ap_n, mu_n);
            if full_norm(&fr_n, &fa_n, fc_n) < (1.0 - 1e-4 * alpha) * res {
                rp = rp_n;
                ap = ap_n;
                mu = mu_n;
                accepted = true;
                break;
            }
            alpha *= 0.5;
        }
        if !accepted {
            // residual stagnated at rounding level; the gate below decides
            break;
        }

        if alpha * max_step <= update_tol {
            break;
        }
    }

    // Exact projection onto the density constraint. The radial equation is
    // linear in R at fixed (A, mu), so a rescale this small (the leftover
    // defect is at rounding level) leaves the residual norms unchanged while
    // zeroing the constraint defect a stagnated line search can leave behind.
    let cval = 2.0 * grid.h
        * rp.iter()
            .zip(&grid.nodes)
            .map(|(x, r)| x * x * r)
            .sum::<f64>();
    if cval > 0.0 {
        let scale = (p.rho / cval).sqrt();
        for v in rp.iter_mut() {
            *v *= scale;
        }
    }

    // fix the global phase: positive at the peak
    let peak = rp
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.abs().total_cmp(&b.1.abs()))
        .map(|(i, _)| i)
        .unwrap();
    if rp[peak] < 0.0 {
        for v in rp.iter_mut() {
            *v = -*v;
        }
    }

    let energy = sys.energy(&rp, &ap);
    let state = SymmetricState {
        m,
        grid: grid.clone(),
        r_profile: rp,
        a_profile: ap,
        mu,
        energy,
    };

    let (rs, ra) = state.residual_norms(p);
    let c_err = (state.constraint_value() - p.rho).abs();
    if rs > RESIDUAL_GATE || ra > RESIDUAL_GATE || c_err > CONSTRAINT_GATE {
        return Err(AxiError::NonConvergence {
            iters: 120,
            residual: last_res.max(rs).max(ra),
        });
    }
    Ok(state)
}

/// G(m) for m = 0..=m_max at fixed (b, ρ); per-sector failures are carried
/// in the entries rather than aborting the scan.
pub fn symmetric_energy_scan(
    p: &Params,
    grid: &RadialGrid,
    m_max: u32,
) -> Vec<(u32, Result<f64>)> {
    (0..=m_max)
        .map(|m| (m, solve_symmetric(m, p, grid, None).map(|s| s.energy)))
        .collect()
}
