//! Physical parameters, the change of variables `U = 2 sqrt(pi) r psi`, and
//! the discrete mass and energy functionals in the reduced variables.

use std::f64::consts::PI;

use log::warn;
use num_complex::Complex64;

use crate::error::{Result, SpsError};
use crate::grid::{RadialField, RadialGrid};
use crate::poisson::{self, HartreeBar};

/// `2 sqrt(pi)`, the scale factor between `psi` and `U / r`.
pub fn radial_scale() -> f64 {
    2.0 * PI.sqrt()
}

/// Spherically symmetric external potential.
#[derive(Debug, Clone, PartialEq)]
pub enum ExternalPotential {
    Zero,
    /// `gamma^2 r^2 / 2`.
    Harmonic {
        gamma: f64,
    },
    /// Values at every node `r_0 ..= r_J` of the run grid.
    Tabulated(Vec<f64>),
}

impl ExternalPotential {
    /// Values at all nodes `j = 0..=J`.
    pub fn on_nodes(&self, grid: &RadialGrid) -> Result<Vec<f64>> {
        match self {
            ExternalPotential::Zero => Ok(vec![0.0; grid.intervals() + 1]),
            ExternalPotential::Harmonic { gamma } => Ok(grid
                .nodes()
                .into_iter()
                .map(|r| 0.5 * gamma * gamma * r * r)
                .collect()),
            ExternalPotential::Tabulated(values) => {
                if values.len() != grid.intervals() + 1 {
                    return Err(SpsError::config(
                        "potential",
                        format!(
                            "tabulated potential has {} values but the grid has {} nodes",
                            values.len(),
                            grid.intervals() + 1
                        ),
                    ));
                }
                if let Some(j) = values.iter().position(|v| !v.is_finite()) {
                    return Err(SpsError::config(
                        "potential",
                        format!("non-finite value at node {j}"),
                    ));
                }
                Ok(values.clone())
            }
        }
    }

    /// Values at the interior nodes `j = 1..J-1`.
    pub fn on_interior(&self, grid: &RadialGrid) -> Result<Vec<f64>> {
        let mut all = self.on_nodes(grid)?;
        all.pop();
        all.remove(0);
        Ok(all)
    }
}

/// Hartree coupling `C_P`, Slater coefficient `alpha` and the trap.
#[derive(Debug, Clone, PartialEq)]
pub struct PhysicsParams {
    pub c_p: f64,
    pub alpha: f64,
    pub potential: ExternalPotential,
}

impl PhysicsParams {
    pub fn new(c_p: f64, alpha: f64, potential: ExternalPotential) -> Result<Self> {
        if !c_p.is_finite() {
            return Err(SpsError::config("c_p", "must be finite"));
        }
        if !alpha.is_finite() {
            return Err(SpsError::config("alpha", "must be finite"));
        }
        if let ExternalPotential::Harmonic { gamma } = potential {
            if !gamma.is_finite() {
                return Err(SpsError::config(
                    "potential",
                    "harmonic frequency must be finite",
                ));
            }
        }
        if alpha < 0.0 {
            warn!("alpha = {alpha} is negative; the Slater term becomes repulsive");
        }
        Ok(PhysicsParams {
            c_p,
            alpha,
            potential,
        })
    }

    /// `V_ext = r^2/2`, `C_P = 100`, `alpha = 1`.
    pub fn reference_case() -> Self {
        PhysicsParams {
            c_p: 100.0,
            alpha: 1.0,
            potential: ExternalPotential::Harmonic { gamma: 1.0 },
        }
    }

    /// Harmonic trap with both interactions switched off.
    pub fn linear_harmonic(gamma: f64) -> Self {
        PhysicsParams {
            c_p: 0.0,
            alpha: 0.0,
            potential: ExternalPotential::Harmonic { gamma },
        }
    }
}

/// Diagnostics recorded along a trajectory.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ObservableSet {
    pub time: f64,
    pub mass: f64,
    pub energy: f64,
    pub psi_origin_abs: f64,
}

/// Converts `psi` sampled on all nodes `j = 0..=J` into `U_j = 2 sqrt(pi) r_j psi_j`
/// on the interior nodes.
pub fn u_from_psi(psi: &[Complex64], grid: &RadialGrid) -> Result<RadialField> {
    if psi.len() != grid.intervals() + 1 {
        return Err(SpsError::Shape {
            expected: grid.intervals() + 1,
            actual: psi.len(),
        });
    }
    let s = radial_scale();
    let values = (1..grid.intervals())
        .map(|j| psi[j] * (s * grid.node(j)))
        .collect();
    RadialField::new(grid, values)
}

/// Recovers `psi` on all nodes `j = 0..=J`; the origin value comes from the
/// sine-series derivative of `U` at `r = 0`.
pub fn psi_from_u(u: &RadialField) -> Vec<Complex64> {
    let grid = u.grid();
    let s = radial_scale();
    let mut psi = Vec::with_capacity(grid.intervals() + 1);
    psi.push(u.dst_forward().derivative_at_origin() / s);
    for (j, &v) in u.values().iter().enumerate() {
        psi.push(v / (s * grid.node(j + 1)));
    }
    psi.push(Complex64::new(0.0, 0.0));
    psi
}

/// Discrete mass `h_r sum_j |U_j|^2`.
pub fn mass(u: &RadialField) -> f64 {
    let n = u.norm_h();
    n * n
}

/// The four contributions to the discrete energy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyParts {
    pub kinetic: f64,
    pub external: f64,
    pub hartree: f64,
    pub slater: f64,
}

impl EnergyParts {
    pub fn total(&self) -> f64 {
        self.kinetic + self.external + self.hartree + self.slater
    }
}

/// Energy split by term. The kinetic part uses the Parseval form
/// `(R/4) sum_k mu_k^2 |U_k|^2`; the rest is the interior rectangle rule.
pub fn energy_parts(
    u: &RadialField,
    vbar: &HartreeBar,
    params: &PhysicsParams,
) -> Result<EnergyParts> {
    let grid = u.grid();
    if vbar.values().len() != u.values().len() {
        return Err(SpsError::Shape {
            expected: u.values().len(),
            actual: vbar.values().len(),
        });
    }
    let spectrum = u.dst_forward();
    let kinetic = 0.25
        * grid.radius()
        * spectrum
            .coeffs()
            .iter()
            .zip(grid.frequencies())
            .map(|(c, mu)| mu * mu * c.norm_sqr())
            .sum::<f64>();

    let v_ext = params.potential.on_interior(grid)?;
    let h = grid.spacing();
    let inv_r_max = 1.0 / grid.radius();
    let s = radial_scale();
    let (mut external, mut hartree, mut slater) = (0.0, 0.0, 0.0);
    for (j, (&uj, &vb)) in u.values().iter().zip(vbar.values()).enumerate() {
        let r = grid.node(j + 1);
        let dens = uj.norm_sqr();
        external += v_ext[j] * dens;
        hartree += (vb / r + inv_r_max) * dens;
        if params.alpha != 0.0 {
            slater += (s * r).powf(-2.0 / 3.0) * dens.powf(4.0 / 3.0);
        }
    }
    Ok(EnergyParts {
        kinetic,
        external: h * external,
        hartree: h * params.c_p / (8.0 * PI) * hartree,
        slater: -0.75 * params.alpha * h * slater,
    })
}

/// Discrete energy of `U` given its homogenized Hartree field.
pub fn energy(u: &RadialField, vbar: &HartreeBar, params: &PhysicsParams) -> Result<f64> {
    energy_parts(u, vbar, params).map(|p| p.total())
}

/// Energy with the Hartree field solved from `U` itself.
pub fn energy_self_consistent(u: &RadialField, params: &PhysicsParams) -> Result<f64> {
    let vbar = poisson::solve_hartree_bar(&poisson::density_from_u(u));
    energy(u, &vbar, params)
}

/// Unit-mass Gaussian `psi_0(r) = (2 pi w^2)^{-3/4} exp(-r^2 / (4 w^2))` in `U` variables.
/// `width = 1` is the standard dynamics initial datum.
pub fn gaussian_initial(grid: &RadialGrid, width: f64) -> Result<RadialField> {
    if !(width.is_finite() && width > 0.0) {
        return Err(SpsError::config(
            "gaussian_width",
            format!("must be positive, got {width}"),
        ));
    }
    let amp = (2.0 * PI * width * width).powf(-0.75);
    let s = radial_scale();
    let u = RadialField::from_real_fn(grid, |r| {
        s * r * amp * (-r * r / (4.0 * width * width)).exp()
    });
    let m = mass(&u);
    if (m - 1.0).abs() > 1e-6 {
        warn!(
            "Gaussian initial datum has discrete mass {m}; the domain radius {} is too small",
            grid.radius()
        );
    }
    Ok(u)
}

/// Closed-form ground state `(gamma/pi)^{3/4} exp(-gamma r^2 / 2)` of the
/// interaction-free harmonic trap, in `psi` variables.
pub fn harmonic_ground_state_psi(gamma: f64, r: f64) -> f64 {
    (gamma / PI).powf(0.75) * (-gamma * r * r / 2.0).exp()
}
