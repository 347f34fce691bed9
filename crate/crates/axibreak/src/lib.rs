//! Constrained minimization of the coupled Schrödinger–Ampère thermodynamic
//! potential on the unit disk.
//!
//! The objective is G = ∫ [ |∇×A_i|² + |(i∇ − A_i − b r θ̂)ψ|² ] dS subject to
//! the mean-density constraint (1/π)∫|ψ|² dS = ρ, with the induced potential
//! A_i gauge-fixed along θ̂. The crate provides:
//!
//! * [`fields`] — grids, field types, the discrete energy, constraint and
//!   Euler–Lagrange residuals;
//! * [`radial`] — the axially symmetric family ψ = 𝓡_m(r)e^{−imθ} as a
//!   constrained two-point boundary-value problem, plus the ρ→0 linear
//!   (Landau-limit) eigenvalue oracle;
//! * [`reduced`] — the four-parameter analytic variational model and its
//!   stationary-point map;
//! * [`solver2d`] — full 2D constrained minimization that discovers the
//!   symmetry-broken ground state and measures its nodal radius;
//! * [`critical`] — the critical field b*(ρ) where the m=0 and m=1 branches
//!   exchange stability, with a cubic reference fit for comparison;
//! * [`sweep`] — continuation along b = b*(ρ) tracing the bifurcation;
//! * [`io`] — CSV/JSON serialization used by the CLI.

pub mod critical;
pub mod error;
pub mod fields;
pub mod grid;
pub mod io;
pub mod radial;
pub mod reduced;
pub mod solver2d;
pub mod sweep;

pub use critical::{find_bstar, fit_bstar, fit_in_range, BRACKET, FIT_RHO_RANGE};
pub use error::{AxiError, Result};
pub use fields::{
    constraint_project, density_mean, el_residuals, energy_gradient, energy_total, ComplexField,
    GaugeField, Params, State2D,
};
pub use grid::{PolarGrid, RadialGrid};
pub use radial::{
    landau_crossing, landau_mu, solve_symmetric, symmetric_energy_scan, SymmetricState,
    CONSTRAINT_GATE, RESIDUAL_GATE,
};
pub use reduced::{
    default_seeds, pure_branch_energies, reduced_constraint, reduced_constraint_quadrature,
    reduced_crossing, reduced_energy, reduced_energy_quadrature, reduced_minimize, ReducedPoint,
    ReducedScan, StationaryKind,
};
pub use solver2d::{
    build_initial, embed_symmetric, minimize_2d, minimize_2d_logged, nodal_radius,
    orient_node_to_pi, phase_winding, rotate_state, FlowLogRow, Seed2D,
};
pub use sweep::{
    default_rho_grid, locate_bifurcation, sweep, BifurcationEstimate, SweepConfig, SweepRow,
    DETECTION_RADIUS,
};
