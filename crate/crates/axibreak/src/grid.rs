//! Polar discretization of the unit disk.
//!
//! Radial nodes sit at half-integer offsets r_j = (j+1/2)·h with h = 1/n, so
//! no quantity is ever evaluated at the coordinate singularity r = 0. Radial
//! fluxes and the magnetic field live on the faces r = f·h between nodes;
//! dropping the f = 0 and f = n faces builds the natural boundary conditions
//! (regularity at the axis, ∂ψ/∂r = 0 and B = 0 at r = 1) into the energy.
//! Angular derivatives are spectral (FFT collocation).

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{AxiError, Result};

/// Uniform half-offset radial grid on (0, 1].
#[derive(Debug, Clone, PartialEq)]
pub struct RadialGrid {
    /// Number of radial nodes.
    pub n: usize,
    /// Spacing h = 1/n.
    pub h: f64,
    /// Node radii r_j = (j+1/2)·h, strictly increasing.
    pub nodes: Vec<f64>,
}

impl RadialGrid {
    pub fn new(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(AxiError::InvalidArgument(format!(
                "radial grid needs at least 2 nodes, got {n}"
            )));
        }
        let h = 1.0 / n as f64;
        let nodes = (0..n).map(|j| (j as f64 + 0.5) * h).collect();
        Ok(RadialGrid { n, h, nodes })
    }

    /// Radius of face f (f = 0..=n), the midpoint between nodes f-1 and f.
    #[inline]
    pub fn face(&self, f: usize) -> f64 {
        f as f64 * self.h
    }
}

/// Product grid: radial nodes x uniform angles theta_k = 2*pi*k/n_theta.
///
/// Carries the FFT plans used for spectral theta-derivatives so they are
/// built once per grid; everything else is plain data.
#[derive(Clone)]
pub struct PolarGrid {
    pub radial: RadialGrid,
    pub n_theta: usize,
    /// Angular spacing 2*pi/n_theta.
    pub d_theta: f64,
    /// theta_k values.
    pub thetas: Vec<f64>,
    /// Spectral wavenumbers in FFT bin order (k_j = j for j < n/2, j - n after).
    pub wavenumbers: Vec<f64>,
    fft_fwd: Arc<dyn Fft<f64>>,
    fft_inv: Arc<dyn Fft<f64>>,
}

impl PolarGrid {
    pub fn new(radial: RadialGrid, n_theta: usize) -> Result<Self> {
        if n_theta < 4 || n_theta % 2 != 0 {
            return Err(AxiError::InvalidArgument(format!(
                "n_theta must be even and >= 4, got {n_theta}"
            )));
        }
        let d_theta = 2.0 * std::f64::consts::PI / n_theta as f64;
        let thetas = (0..n_theta).map(|k| k as f64 * d_theta).collect();
        let wavenumbers = (0..n_theta)
            .map(|j| {
                if j < n_theta / 2 {
                    j as f64
                } else {
                    j as f64 - n_theta as f64
                }
            })
            .collect();
        let mut planner = FftPlanner::new();
        let fft_fwd = planner.plan_fft_forward(n_theta);
        let fft_inv = planner.plan_fft_inverse(n_theta);
        Ok(PolarGrid {
            radial,
            n_theta,
            d_theta,
            thetas,
            wavenumbers,
            fft_fwd,
            fft_inv,
        })
    }

    /// Convenience constructor from raw sizes.
    pub fn from_sizes(n_r: usize, n_theta: usize) -> Result<Self> {
        Ok(Self::new(RadialGrid::new(n_r)?, n_theta)?)
    }

    /// Quadrature weight of node (j, k): r_j * h * d_theta (midpoint rule with
    /// the polar Jacobian).
    #[inline]
    pub fn weight(&self, j: usize) -> f64 {
        self.radial.nodes[j] * self.radial.h * self.d_theta
    }

    /// Forward FFT along theta of every radial row, in place.
    /// `buf` must be a standard-layout (n, n_theta) buffer flattened row-major.
    pub(crate) fn fft_rows(&self, buf: &mut [Complex64]) {
        debug_assert_eq!(buf.len() % self.n_theta, 0);
        self.fft_fwd.process(buf);
    }

    /// Inverse FFT along theta of every radial row, in place (normalized).
    pub(crate) fn ifft_rows(&self, buf: &mut [Complex64]) {
        debug_assert_eq!(buf.len() % self.n_theta, 0);
        self.fft_inv.process(buf);
        let scale = 1.0 / self.n_theta as f64;
        for v in buf.iter_mut() {
            *v *= scale;
        }
    }
}

impl fmt::Debug for PolarGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PolarGrid")
            .field("n_r", &self.radial.n)
            .field("n_theta", &self.n_theta)
            .finish()
    }
}

impl PartialEq for PolarGrid {
    fn eq(&self, other: &Self) -> bool {
        self.radial == other.radial && self.n_theta == other.n_theta
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn radial_nodes_half_offset() {
        let g = RadialGrid::new(8).unwrap();
        assert_eq!(g.nodes.len(), 8);
        assert!((g.nodes[0] - 0.0625).abs() < 1e-15);
        assert!((g.nodes[7] - 0.9375).abs() < 1e-15);
        for w in g.nodes.windows(2) {
            assert!(w[0] < w[1]);
        }
        assert!(g.nodes[7] <= 1.0);
    }

    #[test]
    fn rejects_bad_sizes() {
        assert!(RadialGrid::new(1).is_err());
        assert!(PolarGrid::from_sizes(8, 3).is_err());
        assert!(PolarGrid::from_sizes(8, 6).is_ok());
        assert!(PolarGrid::from_sizes(8, 7).is_err());
    }

    #[test]
    fn wavenumbers_fft_order() {
        let g = PolarGrid::from_sizes(4, 8).unwrap();
        assert_eq!(g.wavenumbers, vec![0.0, 1.0, 2.0, 3.0, -4.0, -3.0, -2.0, -1.0]);
    }

    #[test]
    fn fft_roundtrip() {
        let g = PolarGrid::from_sizes(2, 16).unwrap();
        let orig: Vec<Complex64> = (0..32)
            .map(|i| Complex64::new(i as f64, (i * i) as f64 * 0.01))
            .collect();
        let mut buf = orig.clone();
        g.fft_rows(&mut buf);
        g.ifft_rows(&mut buf);
        for (a, b) in buf.iter().zip(&orig) {
            assert!((a - b).norm() < 1e-12);
        }
    }
}
