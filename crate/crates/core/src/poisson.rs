//! Sine-spectral solve of `-V'' = |U|^2 / r` for the homogenized Hartree
//! field `Vbar = V - r/R`, which vanishes at both ends of the domain.

use std::f64::consts::PI;

use crate::grid::{RadialField, RadialGrid};

/// `rho_j = |U_j|^2 / r_j` on interior nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityRho {
    grid: RadialGrid,
    values: Vec<f64>,
}

impl DensityRho {
    pub fn grid(&self) -> &RadialGrid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Wraps arbitrary right-hand-side values; used for linear checks of the solver.
    pub fn from_values(grid: &RadialGrid, values: Vec<f64>) -> Self {
        assert_eq!(
            values.len(),
            grid.interior_len(),
            "density must have J-1 values"
        );
        DensityRho {
            grid: grid.clone(),
            values,
        }
    }
}

/// Homogenized Hartree field on interior nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct HartreeBar {
    grid: RadialGrid,
    values: Vec<f64>,
}

impl HartreeBar {
    pub fn zeros(grid: &RadialGrid) -> Self {
        HartreeBar {
            grid: grid.clone(),
            values: vec![0.0; grid.interior_len()],
        }
    }

    pub fn grid(&self) -> &RadialGrid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// `V_j = Vbar_j + r_j / R`.
    pub fn full_potential(&self) -> Vec<f64> {
        let r_max = self.grid.radius();
        self.values
            .iter()
            .enumerate()
            .map(|(j, v)| v + self.grid.node(j + 1) / r_max)
            .collect()
    }

    /// Hartree potential `V_P = V / (4 pi r)` at interior nodes.
    pub fn hartree_potential(&self) -> Vec<f64> {
        self.full_potential()
            .into_iter()
            .enumerate()
            .map(|(j, v)| v / (4.0 * PI * self.grid.node(j + 1)))
            .collect()
    }
}

pub fn density_from_u(u: &RadialField) -> DensityRho {
    let grid = u.grid();
    let values = u
        .values()
        .iter()
        .enumerate()
        .map(|(j, v)| v.norm_sqr() / grid.node(j + 1))
        .collect();
    DensityRho {
        grid: grid.clone(),
        values,
    }
}

/// Solves `-D_rr^s Vbar = rho` by dividing sine coefficients by `mu_k^2`.
pub fn solve_hartree_bar(rho: &DensityRho) -> HartreeBar {
    let grid = &rho.grid;
    let n = grid.intervals() as f64;
    let mut coeffs = grid.sine_sum_real(&rho.values);
    for (i, c) in coeffs.iter_mut().enumerate() {
        let mu = grid.mu(i + 1);
        *c *= 2.0 / (n * mu * mu);
    }
    HartreeBar {
        grid: grid.clone(),
        values: grid.sine_sum_real(&coeffs),
    }
}

/// `W_j = C_P Vbar_j / (4 pi r_j) + C_P / (4 pi R)`.
pub fn hartree_term(vbar: &HartreeBar, c_p: f64) -> Vec<f64> {
    let grid = &vbar.grid;
    let shift = c_p / (4.0 * PI * grid.radius());
    vbar.values
        .iter()
        .enumerate()
        .map(|(j, v)| c_p * v / (4.0 * PI * grid.node(j + 1)) + shift)
        .collect()
}

/// Fraction of `h_r sum |U_j|^2` carried by nodes with `r_j > cutoff`.
pub fn tail_mass(u: &RadialField, cutoff: f64) -> f64 {
    let grid = u.grid();
    grid.spacing()
        * u.values()
            .iter()
            .enumerate()
            .filter(|(j, _)| grid.node(j + 1) > cutoff)
            .map(|(_, v)| v.norm_sqr())
            .sum::<f64>()
}
