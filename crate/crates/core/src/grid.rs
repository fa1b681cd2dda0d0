//! Rectangular phase-space grids `θ × p̄` with `p̄ = p/ħ`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A single phase-space point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseSpacePoint {
    pub theta: f64,
    pub pbar: f64,
}

/// Tensor grid: `θ_i = −π + 2πi/n_theta` (endpoint-exclusive) and a uniform
/// symmetric or arbitrary `p̄` window.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PhaseSpaceGrid {
    n_theta: usize,
    pbar_min: f64,
    pbar_max: f64,
    n_pbar: usize,
    #[serde(skip)]
    thetas: Vec<f64>,
    #[serde(skip)]
    pbars: Vec<f64>,
}

impl PhaseSpaceGrid {
    pub fn new(n_theta: usize, pbar_min: f64, pbar_max: f64, n_pbar: usize) -> Result<Self> {
        if n_theta == 0 {
            return Err(Error::Parameter("grid needs at least one theta node".into()));
        }
        if n_pbar < 2 || !(pbar_max > pbar_min) || !pbar_min.is_finite() || !pbar_max.is_finite() {
            return Err(Error::Parameter(format!(
                "p grid {pbar_min}:{pbar_max}:{n_pbar} needs at least two nodes and a positive step"
            )));
        }
        let step = (pbar_max - pbar_min) / (n_pbar - 1) as f64;
        let thetas = (0..n_theta).map(|i| -PI + 2.0 * PI * i as f64 / n_theta as f64).collect();
        let pbars = (0..n_pbar).map(|j| pbar_min + step * j as f64).collect();
        Ok(Self { n_theta, pbar_min, pbar_max, n_pbar, thetas, pbars })
    }

    /// Symmetric window `[−p̄_max, p̄_max]`.
    pub fn symmetric(n_theta: usize, pbar_max: f64, n_pbar: usize) -> Result<Self> {
        Self::new(n_theta, -pbar_max, pbar_max, n_pbar)
    }

    pub fn thetas(&self) -> &[f64] {
        &self.thetas
    }

    pub fn pbars(&self) -> &[f64] {
        &self.pbars
    }

    pub fn n_theta(&self) -> usize {
        self.n_theta
    }

    pub fn n_pbar(&self) -> usize {
        self.n_pbar
    }

    pub fn pbar_range(&self) -> (f64, f64) {
        (self.pbar_min, self.pbar_max)
    }

    pub fn pbar_step(&self) -> f64 {
        (self.pbar_max - self.pbar_min) / (self.n_pbar - 1) as f64
    }

    pub fn theta_step(&self) -> f64 {
        2.0 * PI / self.n_theta as f64
    }

    pub fn len(&self) -> usize {
        self.n_theta * self.n_pbar
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Points in row-major order (θ outer, p̄ inner), matching the layout of
    /// every grid evaluation in this crate.
    pub fn points(&self) -> impl Iterator<Item = PhaseSpacePoint> + '_ {
        self.thetas.iter().flat_map(move |&theta| self.pbars.iter().map(move |&pbar| PhaseSpacePoint { theta, pbar }))
    }

    /// `θ = −π` lies on the boundary of the fundamental domain.
    pub fn is_boundary_row(&self, i: usize) -> bool {
        i == 0
    }

    /// Canonical `t=N,p=a:b:M` description.
    pub fn describe(&self) -> String {
        format!("t={},p={}:{}:{}", self.n_theta, self.pbar_min, self.pbar_max, self.n_pbar)
    }
}
