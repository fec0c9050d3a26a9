//! Ground states from the normalized gradient flow, discretized by backward
//! Euler in time and sine pseudospectral differences in space.
//!
//! Each outer step solves
//!
//! ```text
//! (1/dt - D_rr^s / 2 + diag(b)) phi+ = phi^n / dt
//! ```
//!
//! with the effective potential `b` frozen at `phi^n`, then rescales `phi+`
//! to unit discrete mass. The linear system is handled by a shifted
//! fixed-point iteration whose every sweep is diagonal in sine space.

use std::f64::consts::PI;

use log::{debug, warn};
use num_complex::Complex64;

use crate::error::{Result, SpsError};
use crate::grid::{RadialField, RadialGrid};
use crate::model::{self, radial_scale, PhysicsParams};
use crate::poisson::{self, HartreeBar};

#[derive(Debug, Clone)]
pub struct GfdnConfig {
    pub dt: f64,
    /// Stop once `max_j |phi^{n+1}_j - phi^n_j| / dt` falls below this.
    pub tol_outer: f64,
    /// Relative residual target of the inner linear solve.
    pub tol_inner: f64,
    pub max_outer: usize,
    pub max_inner: usize,
    /// Unit-mass real starting field in `U` variables; a trap-shaped Gaussian when `None`.
    pub initial_guess: Option<RadialField>,
}

impl Default for GfdnConfig {
    fn default() -> Self {
        GfdnConfig {
            dt: 0.01,
            tol_outer: 1e-10,
            tol_inner: 1e-13,
            max_outer: 100_000,
            max_inner: 500,
            initial_guess: None,
        }
    }
}

impl GfdnConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(SpsError::config(
                "dt",
                format!("must be positive, got {}", self.dt),
            ));
        }
        for (name, tol) in [("tol_outer", self.tol_outer), ("tol_inner", self.tol_inner)] {
            if !(tol > 0.0 && tol < 1.0) {
                return Err(SpsError::config(
                    name,
                    format!("must lie in (0, 1), got {tol}"),
                ));
            }
        }
        if self.max_outer < 1 {
            return Err(SpsError::config("max_outer", "must be at least 1"));
        }
        if self.max_inner < 1 {
            return Err(SpsError::config("max_inner", "must be at least 1"));
        }
        if let Some(guess) = &self.initial_guess {
            let m = model::mass(guess);
            if (m - 1.0).abs() > 1e-12 {
                return Err(SpsError::config(
                    "initial_guess",
                    format!("mass must be 1, got {m}"),
                ));
            }
            if guess.values().iter().any(|v| v.im != 0.0) {
                return Err(SpsError::config("initial_guess", "must be real-valued"));
            }
        }
        Ok(())
    }
}

/// Discrete ground state and diagnostics.
#[derive(Debug, Clone)]
pub struct GroundStateResult {
    /// Converged state in `U` variables, interior nodes.
    pub phi_u: RadialField,
    /// `phi_g(r_j)` on all nodes `j = 0..=J`.
    pub phi_psi: Vec<f64>,
    pub energy: f64,
    pub outer_iterations: usize,
    /// Final `max_j |phi^{n+1}_j - phi^n_j| / dt`.
    pub residual: f64,
    pub converged: bool,
}

/// Normalized `U`-space image of the trap ground state `pi^{-3/4} exp(-r^2/2)`.
pub fn default_initial_guess(grid: &RadialGrid) -> Result<RadialField> {
    let s = radial_scale();
    let guess = RadialField::from_real_fn(grid, |r| s * r * PI.powf(-0.75) * (-r * r / 2.0).exp());
    besp_normalize(&guess)
}

fn effective_potential_with_field(
    phi: &RadialField,
    v_ext: &[f64],
    params: &PhysicsParams,
) -> (Vec<f64>, HartreeBar) {
    let grid = phi.grid();
    let vbar = poisson::solve_hartree_bar(&poisson::density_from_u(phi));
    let hartree = poisson::hartree_term(&vbar, params.c_p);
    let s = radial_scale();
    let b = phi
        .values()
        .iter()
        .enumerate()
        .map(|(j, v)| {
            let slater = if params.alpha != 0.0 {
                params.alpha * (s * grid.node(j + 1)).powf(-2.0 / 3.0) * v.norm().powf(2.0 / 3.0)
            } else {
                0.0
            };
            v_ext[j] + hartree[j] - slater
        })
        .collect();
    (b, vbar)
}

/// `b_j = V_ext(r_j) + W_j - alpha (2 sqrt(pi) r_j)^{-2/3} |phi_j|^{2/3}` with the
/// Hartree term `W` solved from `phi`.
pub fn effective_potential(phi: &RadialField, params: &PhysicsParams) -> Result<Vec<f64>> {
    let v_ext = params.potential.on_interior(phi.grid())?;
    Ok(effective_potential_with_field(phi, &v_ext, params).0)
}

/// Solves `(1/dt - D_rr^s/2 + diag(b)) phi+ = phi_n / dt`.
///
/// Sweeps `(1/dt + s - D_rr^s/2) x_{m+1} = phi_n/dt + (s - b) x_m` with the
/// shift `s = (max b + min b)/2`; each sweep is a division in sine space. The
/// true residual after a sweep equals `(s - b)(x_m - x_{m+1})`, so it is
/// available without another transform. Iteration stops once its sup-norm is
/// at most `tol_inner * sup|phi_n| / dt`.
pub fn besp_linear_solve(
    phi_n: &RadialField,
    b: &[f64],
    dt: f64,
    tol_inner: f64,
    max_inner: usize,
) -> Result<RadialField> {
    let grid = phi_n.grid();
    if b.len() != grid.interior_len() {
        return Err(SpsError::Shape {
            expected: grid.interior_len(),
            actual: b.len(),
        });
    }
    let (b_min, b_max) = b
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| {
            (lo.min(x), hi.max(x))
        });
    let shift = 0.5 * (b_max + b_min);
    let inv_dt = 1.0 / dt;
    let rhs: Vec<Complex64> = phi_n.values().iter().map(|v| v * inv_dt).collect();
    let target = tol_inner * phi_n.sup_norm() * inv_dt;

    let mut x = phi_n.clone();
    let mut residual = f64::INFINITY;
    for sweep in 1..=max_inner {
        let forcing: Vec<Complex64> = rhs
            .iter()
            .zip(x.values())
            .zip(b)
            .map(|((r, xm), bj)| r + xm * (shift - bj))
            .collect();
        let mut spectrum = RadialField::new(grid, forcing)?.dst_forward();
        spectrum.scale_modes(|mu| 1.0 / (inv_dt + shift + 0.5 * mu * mu));
        let next = spectrum.dst_inverse();
        residual = x
            .values()
            .iter()
            .zip(next.values())
            .zip(b)
            .map(|((old, new), bj)| ((old - new) * (shift - bj)).norm())
            .fold(0.0, f64::max);
        x = next;
        if residual <= target {
            debug!("inner solve converged in {sweep} sweeps (residual {residual:.3e})");
            return Ok(x);
        }
        if !residual.is_finite() {
            break;
        }
    }
    Err(SpsError::InnerSolve {
        iterations: max_inner,
        residual,
    })
}

/// `phi+ / ||phi+||_h`.
pub fn besp_normalize(phi_plus: &RadialField) -> Result<RadialField> {
    let norm = phi_plus.norm_h();
    if norm == 0.0 || !norm.is_finite() {
        return Err(SpsError::Collapsed);
    }
    Ok(phi_plus.map(|v| v / norm))
}

/// Runs the normalized gradient flow to stationarity.
pub fn compute_ground_state(
    params: &PhysicsParams,
    grid: &RadialGrid,
    config: &GfdnConfig,
) -> Result<GroundStateResult> {
    config.validate()?;
    let v_ext = params.potential.on_interior(grid)?;
    let mut phi = match &config.initial_guess {
        Some(guess) => {
            if guess.grid() != grid {
                return Err(SpsError::config(
                    "initial_guess",
                    "defined on a different grid",
                ));
            }
            guess.clone()
        }
        None => default_initial_guess(grid)?,
    };

    let mut residual = f64::INFINITY;
    let mut iterations = 0;
    let mut converged = false;
    let mut last_energy: Option<f64> = None;
    let mut warned_increase = false;
    while iterations < config.max_outer {
        let (b, vbar) = effective_potential_with_field(&phi, &v_ext, params);
        let e = model::energy(&phi, &vbar, params)?;
        if let Some(prev) = last_energy {
            if e > prev + 1e-10 * prev.abs() && !warned_increase {
                warn!("gradient-flow energy increased from {prev} to {e} at step {iterations}");
                warned_increase = true;
            }
        }
        last_energy = Some(e);

        let plus = besp_linear_solve(&phi, &b, config.dt, config.tol_inner, config.max_inner)?;
        let next = besp_normalize(&plus)?;
        debug_assert!(next.values().iter().all(|v| v.im == 0.0));
        residual = next
            .values()
            .iter()
            .zip(phi.values())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
            / config.dt;
        phi = next;
        iterations += 1;
        if !residual.is_finite() {
            return Err(SpsError::NonFinite {
                time: iterations as f64 * config.dt,
            });
        }
        if residual <= config.tol_outer {
            converged = true;
            break;
        }
    }
    if !converged {
        warn!("gradient flow stopped after {iterations} steps with residual {residual:.3e}");
    }

    if phi.values()[0].re < 0.0 {
        phi = phi.map(|v| -v);
    }
    let energy = model::energy_self_consistent(&phi, params)?;
    let phi_psi = model::psi_from_u(&phi).into_iter().map(|c| c.re).collect();
    Ok(GroundStateResult {
        phi_u: phi,
        phi_psi,
        energy,
        outer_iterations: iterations,
        residual,
        converged,
    })
}
