//! Domain fields and the discrete thermodynamic potential.
//!
//! The objective is G = ∫ g dS over the unit disk with density
//! g = |∇×A_i|² + |(i∇ − A_i − b r θ̂)ψ|², subject to the mean-density
//! constraint (1/π)∫|ψ|² dS = ρ. The gauge is fixed so A_i is purely
//! azimuthal: A_i = A_θ(r,θ) θ̂, hence B = ∇×A_i has only the z-component
//! (1/r)∂_r(r A_θ).
//!
//! Discretely, G is assembled in conservative finite-volume form:
//!
//! * node terms (the azimuthal covariant derivative D_θψ = (i/r)∂_θψ −
//!   (A_θ + b r)ψ) with midpoint weights r_j h Δθ;
//! * face terms (radial kinetic |Δψ/h|² and B² with the face-difference curl
//!   B_f = (r_j A_j − r_{j−1} A_{j−1})/(r_f h)) with face weights r_f h Δθ;
//! * a core term at the innermost face: B_0 = 2 A_θ(r_0)/r_0, the uniform-field
//!   value consistent with the flux through the circle r = r_0. Without it the
//!   face differences are blind to A_θ ∝ 1/r and minimizers drift along that
//!   direction, acquiring an unphysical fractional flux at the origin.
//!
//! Dropping the f = n face encodes ∂ψ/∂r(1) = 0 and B(1) = 0 (the induced
//! field is curl-free outside the sample and continuous across r = 1).
//!
//! The exact analytic gradient of this discrete G is what the 2D solver
//! descends on, so energy/gradient consistency holds to roundoff by
//! construction.

use std::sync::Arc;

use ndarray::Array2;
use num_complex::Complex64;

use crate::error::{AxiError, Result};
use crate::grid::PolarGrid;

/// The two fixed knobs of the problem: external field b and mean density ρ
/// (dimensionless; the disk radius is fixed to 1, so b carries R⁻² and ρ is
/// scale-free — profiles for other radii follow from the R⁻¹ scaling of ψ
/// and A_i and are not computed here).
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Params {
    pub b: f64,
    pub rho: f64,
}

impl Params {
    pub fn new(b: f64, rho: f64) -> Result<Self> {
        if !(b >= 0.0) {
            return Err(AxiError::InvalidArgument(format!("b must be >= 0, got {b}")));
        }
        if !(rho >= 0.0) {
            return Err(AxiError::InvalidArgument(format!(
                "rho must be >= 0, got {rho}"
            )));
        }
        Ok(Params { b, rho })
    }
}

/// Complex amplitude ψ sampled at every (r_j, θ_k).
#[derive(Debug, Clone)]
pub struct ComplexField {
    pub grid: Arc<PolarGrid>,
    pub values: Array2<Complex64>,
}

impl ComplexField {
    pub fn new(grid: Arc<PolarGrid>, values: Array2<Complex64>) -> Result<Self> {
        check_dims(&grid, values.dim(), "ComplexField")?;
        Ok(ComplexField { grid, values })
    }

    pub fn zeros(grid: Arc<PolarGrid>) -> Self {
        let dim = (grid.radial.n, grid.n_theta);
        ComplexField {
            grid,
            values: Array2::zeros(dim),
        }
    }

    /// Uniform field ψ ≡ c.
    pub fn uniform(grid: Arc<PolarGrid>, c: Complex64) -> Self {
        let dim = (grid.radial.n, grid.n_theta);
        ComplexField {
            grid,
            values: Array2::from_elem(dim, c),
        }
    }
}

/// Azimuthal component A_θ sampled at every (r_j, θ_k). The radial component
/// is identically zero by the gauge choice, so it is not stored.
#[derive(Debug, Clone)]
pub struct GaugeField {
    pub grid: Arc<PolarGrid>,
    pub values: Array2<f64>,
}

impl GaugeField {
    pub fn new(grid: Arc<PolarGrid>, values: Array2<f64>) -> Result<Self> {
        check_dims(&grid, values.dim(), "GaugeField")?;
        Ok(GaugeField { grid, values })
    }

    pub fn zeros(grid: Arc<PolarGrid>) -> Self {
        let dim = (grid.radial.n, grid.n_theta);
        GaugeField {
            grid,
            values: Array2::zeros(dim),
        }
    }
}

fn check_dims(grid: &PolarGrid, dim: (usize, usize), what: &str) -> Result<()> {
    let expect = (grid.radial.n, grid.n_theta);
    if dim != expect {
        return Err(AxiError::Dimension(format!(
            "{what} is {dim:?}, grid wants {expect:?}"
        )));
    }
    Ok(())
}

/// A full configuration: ψ, A_θ, the constraint multiplier μ, and the energy
/// G at which the pair was last evaluated.
#[derive(Debug, Clone)]
pub struct State2D {
    pub psi: ComplexField,
    pub a: GaugeField,
    pub mu: f64,
    pub energy: f64,
}

impl State2D {
    /// Checks that ψ and A live on the same grid and returns it.
    pub fn shared_grid(&self) -> Result<&Arc<PolarGrid>> {
        if self.psi.grid.as_ref() != self.a.grid.as_ref() {
            return Err(AxiError::Dimension(
                "psi and a live on different grids".into(),
            ));
        }
        Ok(&self.psi.grid)
    }
}

// ---------------------------------------------------------------------------
// Raw-array kernels. These are the single source of truth for the discrete
// energy and its gradient; the public ops and both solvers wrap them.
// ---------------------------------------------------------------------------

/// Spectral θ-derivative of every radial row: out = ∂_θ field.
pub(crate) fn dtheta(grid: &PolarGrid, field: &Array2<Complex64>, out: &mut Array2<Complex64>) {
    out.assign(field);
    let nt = grid.n_theta;
    let buf = out.as_slice_mut().expect("standard layout");
    grid.fft_rows(buf);
    for row in buf.chunks_mut(nt) {
        for (v, &k) in row.iter_mut().zip(&grid.wavenumbers) {
            *v *= Complex64::new(0.0, k);
        }
    }
    grid.ifft_rows(buf);
}

/// D_θψ = (i/r)∂_θψ − (A_θ + b r)ψ at every node. `scratch` is clobbered.
pub(crate) fn d_theta_psi(
    grid: &PolarGrid,
    psi: &Array2<Complex64>,
    a: &Array2<f64>,
    b: f64,
    scratch: &mut Array2<Complex64>,
    out: &mut Array2<Complex64>,
) {
    dtheta(grid, psi, scratch);
    let r = &grid.radial.nodes;
    for j in 0..grid.radial.n {
        let rj = r[j];
        for k in 0..grid.n_theta {
            let w = a[[j, k]] + b * rj;
            out[[j, k]] = Complex64::new(0.0, 1.0 / rj) * scratch[[j, k]] - w * psi[[j, k]];
        }
    }
}

/// Face-centered field B_f for f = 0..=n: B_0 is the core value 2A(r_0)/r_0,
/// B_n = 0 (boundary condition), interior faces the conservative curl.
pub(crate) fn face_field(grid: &PolarGrid, a: &Array2<f64>, out: &mut Array2<f64>) {
    let n = grid.radial.n;
    let h = grid.radial.h;
    let r = &grid.radial.nodes;
    debug_assert_eq!(out.dim(), (n + 1, grid.n_theta));
    for k in 0..grid.n_theta {
        out[[0, k]] = 2.0 * a[[0, k]] / r[0];
        out[[n, k]] = 0.0;
    }
    for f in 1..n {
        let rf = grid.radial.face(f);
        for k in 0..grid.n_theta {
            out[[f, k]] = (r[f] * a[[f, k]] - r[f - 1] * a[[f - 1, k]]) / (rf * h);
        }
    }
}

/// The discrete thermodynamic potential G.
pub(crate) fn energy_raw(grid: &PolarGrid, psi: &Array2<Complex64>, a: &Array2<f64>, b: f64) -> f64 {
    let n = grid.radial.n;
    let nt = grid.n_theta;
    let h = grid.radial.h;
    let dth = grid.d_theta;
    let r = &grid.radial.nodes;

    // Face terms: radial kinetic energy and interior field energy.
    let mut e_face = 0.0;
    for f in 1..n {
        let rf = grid.radial.face(f);
        let mut acc = 0.0;
        for k in 0..nt {
            let dpsi = psi[[f, k]] - psi[[f - 1, k]];
            let bf = (r[f] * a[[f, k]] - r[f - 1] * a[[f - 1, k]]) / (rf * h);
            acc += bf * bf + dpsi.norm_sqr() / (h * h);
        }
        e_face += acc * rf;
    }
    e_face *= h * dth;

    // Node terms: azimuthal covariant kinetic energy.
    let mut scratch = Array2::zeros((n, nt));
    dtheta(grid, psi, &mut scratch);
    let mut e_node = 0.0;
    for j in 0..n {
        let rj = r[j];
        let mut acc = 0.0;
        for k in 0..nt {
            let w = a[[j, k]] + b * rj;
            let d = Complex64::new(0.0, 1.0 / rj) * scratch[[j, k]] - w * psi[[j, k]];
            acc += d.norm_sqr();
        }
        e_node += acc * rj;
    }
    e_node *= h * dth;

    // Core field energy: flux through the innermost circle, B_0 = 2A_0/r_0
    // over area π r_0² — per θ sample, (2a/r_0)² · (r_0²/2) · Δθ.
    let mut e_core = 0.0;
    for k in 0..nt {
        let b0 = 2.0 * a[[0, k]] / r[0];
        e_core += b0 * b0;
    }
    e_core *= 0.5 * r[0] * r[0] * dth;

    e_face + e_node + e_core
}

/// H ψ = −(1/r)(r ψ_r)_r + D_θ(D_θ ψ): the w-gradient of the kinetic part of
/// G, i.e. ∂G/∂ψ̄ = w ∘ (Hψ). Self-adjoint in the r h Δθ inner product.
pub(crate) fn apply_h(
    grid: &PolarGrid,
    psi: &Array2<Complex64>,
    a: &Array2<f64>,
    b: f64,
    scratch1: &mut Array2<Complex64>,
    scratch2: &mut Array2<Complex64>,
    out: &mut Array2<Complex64>,
) {
    let n = grid.radial.n;
    let nt = grid.n_theta;
    let h = grid.radial.h;
    let r = &grid.radial.nodes;

    // Radial part: conservative divergence of face fluxes.
    for j in 0..n {
        let inv = 1.0 / (r[j] * h * h);
        for k in 0..nt {
            let mut acc = Complex64::new(0.0, 0.0);
            if j + 1 < n {
                acc += grid.radial.face(j + 1) * (psi[[j, k]] - psi[[j + 1, k]]);
            }
            if j > 0 {
                acc += grid.radial.face(j) * (psi[[j, k]] - psi[[j - 1, k]]);
            }
            out[[j, k]] = acc * inv;
        }
    }

    // Azimuthal part: D_θ applied twice.
    d_theta_psi(grid, psi, a, b, scratch1, scratch2);
    dtheta(grid, scratch2, scratch1);
    for j in 0..n {
        let rj = r[j];
        for k in 0..nt {
            let w = a[[j, k]] + b * rj;
            out[[j, k]] += Complex64::new(0.0, 1.0 / rj) * scratch1[[j, k]] - w * scratch2[[j, k]];
        }
    }
}

/// Ampère residual field −∂_r B − J_θ with J_θ = Re[ψ̄ D_θψ]; equals
/// (∂G/∂A)/(2w). `dth_psi` must hold D_θψ.
pub(crate) fn ampere_residual_raw(
    grid: &PolarGrid,
    psi: &Array2<Complex64>,
    a: &Array2<f64>,
    dth_psi: &Array2<Complex64>,
    faces: &mut Array2<f64>,
    out: &mut Array2<f64>,
) {
    let n = grid.radial.n;
    let h = grid.radial.h;
    face_field(grid, a, faces);
    for j in 0..n {
        for k in 0..grid.n_theta {
            let jc = (psi[[j, k]].conj() * dth_psi[[j, k]]).re;
            out[[j, k]] = -(faces[[j + 1, k]] - faces[[j, k]]) / h - jc;
        }
    }
}

/// Weighted L² norm sqrt(Σ w_j |f|²) over the grid.
pub(crate) fn wnorm_c(grid: &PolarGrid, f: &Array2<Complex64>) -> f64 {
    let mut s = 0.0;
    for j in 0..grid.radial.n {
        let w = grid.weight(j);
        for k in 0..grid.n_theta {
            s += w * f[[j, k]].norm_sqr();
        }
    }
    s.sqrt()
}

pub(crate) fn wnorm_r(grid: &PolarGrid, f: &Array2<f64>) -> f64 {
    let mut s = 0.0;
    for j in 0..grid.radial.n {
        let w = grid.weight(j);
        for k in 0..grid.n_theta {
            s += w * f[[j, k]] * f[[j, k]];
        }
    }
    s.sqrt()
}

pub(crate) fn density_mean_raw(grid: &PolarGrid, psi: &Array2<Complex64>) -> f64 {
    let mut s = 0.0;
    for j in 0..grid.radial.n {
        let w = grid.weight(j);
        for k in 0..grid.n_theta {
            s += w * psi[[j, k]].norm_sqr();
        }
    }
    s / std::f64::consts::PI
}

/// Rayleigh quotient μ = ⟨ψ, Hψ⟩ / ⟨ψ, ψ⟩ in the weighted inner product.
pub(crate) fn rayleigh_mu(grid: &PolarGrid, psi: &Array2<Complex64>, hpsi: &Array2<Complex64>) -> f64 {
    let mut num = 0.0;
    let mut den = 0.0;
    for j in 0..grid.radial.n {
        let w = grid.weight(j);
        for k in 0..grid.n_theta {
            num += w * (psi[[j, k]].conj() * hpsi[[j, k]]).re;
            den += w * psi[[j, k]].norm_sqr();
        }
    }
    num / den
}

// ---------------------------------------------------------------------------
// Public operations.
// ---------------------------------------------------------------------------

/// Total thermodynamic potential G = ∫ g dS of a state.
pub fn energy_total(state: &State2D, p: &Params) -> Result<f64> {
    let grid = state.shared_grid()?;
    Ok(energy_raw(grid, &state.psi.values, &state.a.values, p.b))
}

/// Mean particle density (1/π)∫|ψ|² dS.
pub fn density_mean(psi: &ComplexField) -> f64 {
    density_mean_raw(&psi.grid, &psi.values)
}

/// Weighted L² norms of the two Euler–Lagrange residuals:
/// the stationarity of ψ, (i∇ − A − brθ̂)²ψ − μψ, and the θ-component of
/// Ampère's law, ∇×∇×A_i − Re[ψ̄(i∇ − A − brθ̂)ψ].
pub fn el_residuals(state: &State2D, p: &Params) -> Result<(f64, f64)> {
    let grid = state.shared_grid()?;
    let n = grid.radial.n;
    let nt = grid.n_theta;
    let psi = &state.psi.values;
    let a = &state.a.values;

    let mut s1 = Array2::zeros((n, nt));
    let mut s2 = Array2::zeros((n, nt));
    let mut hpsi = Array2::zeros((n, nt));
    apply_h(grid, psi, a, p.b, &mut s1, &mut s2, &mut hpsi);
    let mut res_s = hpsi;
    for j in 0..n {
        for k in 0..nt {
            res_s[[j, k]] -= state.mu * psi[[j, k]];
        }
    }

    d_theta_psi(grid, psi, a, p.b, &mut s1, &mut s2);
    let mut faces = Array2::zeros((n + 1, nt));
    let mut res_a = Array2::zeros((n, nt));
    ampere_residual_raw(grid, psi, a, &s2, &mut faces, &mut res_a);

    Ok((wnorm_c(grid, &res_s), wnorm_r(grid, &res_a)))
}

/// Exact analytic gradient of `energy_total` with respect to ψ̄ and A:
/// returns (∂G/∂ψ̄, ∂G/∂A), both carrying the quadrature weights, so that
/// δG = Σ 2 Re[∂G/∂ψ̄ · δψ̄̄] + Σ ∂G/∂A · δA. This is the object the 2D
/// solver descends on; finite differences of `energy_total` must match it.
pub fn energy_gradient(state: &State2D, p: &Params) -> Result<(Array2<Complex64>, Array2<f64>)> {
    let grid = state.shared_grid()?;
    let n = grid.radial.n;
    let nt = grid.n_theta;
    let psi = &state.psi.values;
    let a = &state.a.values;

    let mut s1 = Array2::zeros((n, nt));
    let mut s2 = Array2::zeros((n, nt));
    let mut gpsi = Array2::zeros((n, nt));
    apply_h(grid, psi, a, p.b, &mut s1, &mut s2, &mut gpsi);
    for j in 0..n {
        let w = grid.weight(j);
        for k in 0..nt {
            gpsi[[j, k]] *= w;
        }
    }

    d_theta_psi(grid, psi, a, p.b, &mut s1, &mut s2);
    let mut faces = Array2::zeros((n + 1, nt));
    let mut ga = Array2::zeros((n, nt));
    ampere_residual_raw(grid, psi, a, &s2, &mut faces, &mut ga);
    for j in 0..n {
        let w = grid.weight(j);
        for k in 0..nt {
            ga[[j, k]] *= 2.0 * w;
        }
    }

    Ok((gpsi, ga))
}

/// Rescale ψ so the mean density equals `rho` exactly.
pub fn constraint_project(psi: &ComplexField, rho: f64) -> Result<ComplexField> {
    if rho < 0.0 {
        return Err(AxiError::InvalidArgument(format!(
            "rho must be >= 0, got {rho}"
        )));
    }
    let d = density_mean(psi);
    if d <= 0.0 {
        return Err(AxiError::Degenerate(
            "cannot project a zero field onto a positive density".into(),
        ));
    }
    let scale = (rho / d).sqrt();
    let mut out = psi.clone();
    out.values.mapv_inplace(|v| v * scale);
    Ok(out)
}
