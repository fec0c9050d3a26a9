//! Backward-Euler finite-difference reference solver working directly on
//! `psi(r)` and `V_P(r)` of the radial problem.
//!
//! Second-order central differences for `psi'' + (2/r) psi'`, with the
//! removable singularity at `r = 0` replaced by `3 psi''(0)` and `psi'(0) = 0`
//! via a ghost node. The Hartree potential uses the finite-volume flux form of
//! `(1/r^2)(r^2 V_P')'`, zero slope at the origin and the monopole Robin
//! relation `V_P'(R) + V_P(R)/R = 0`.

use std::f64::consts::PI;

use log::warn;

use crate::error::{Result, SpsError};
use crate::grid::RadialGrid;
use crate::ground_state::GfdnConfig;
use crate::model::{self, PhysicsParams};

/// `psi` and `V_P` on all nodes `j = 0..=J`.
#[derive(Debug, Clone, PartialEq)]
pub struct BefdState {
    pub phi: Vec<f64>,
    pub vp: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct BefdResult {
    pub state: BefdState,
    pub energy: f64,
    pub outer_iterations: usize,
    pub residual: f64,
    pub converged: bool,
}

/// Solves `a_i x_{i-1} + b_i x_i + c_i x_{i+1} = d_i` (Thomas algorithm).
fn solve_tridiagonal(lower: &[f64], diag: &[f64], upper: &[f64], rhs: &[f64]) -> Result<Vec<f64>> {
    let n = diag.len();
    let mut c = vec![0.0; n];
    let mut d = vec![0.0; n];
    let mut denom = diag[0];
    if denom == 0.0 {
        return Err(SpsError::Singular { row: 0 });
    }
    c[0] = upper[0] / denom;
    d[0] = rhs[0] / denom;
    for i in 1..n {
        denom = diag[i] - lower[i] * c[i - 1];
        if denom == 0.0 || !denom.is_finite() {
            return Err(SpsError::Singular { row: i });
        }
        c[i] = if i + 1 < n { upper[i] / denom } else { 0.0 };
        d[i] = (rhs[i] - lower[i] * d[i - 1]) / denom;
    }
    let mut x = d;
    for i in (0..n - 1).rev() {
        x[i] -= c[i] * x[i + 1];
    }
    Ok(x)
}

/// Trapezoidal 3D mass `4 pi h_r sum_j w_j r_j^2 |phi_j|^2`.
pub fn mass_3d(grid: &RadialGrid, phi: &[f64]) -> f64 {
    let n = grid.intervals();
    4.0 * PI
        * grid.spacing()
        * phi
            .iter()
            .enumerate()
            .map(|(j, p)| {
                let w = if j == 0 || j == n { 0.5 } else { 1.0 };
                let r = grid.node(j);
                w * r * r * p * p
            })
            .sum::<f64>()
}

/// Hartree potential `V_P` on all nodes for density `|phi|^2`.
pub fn befd_hartree(grid: &RadialGrid, phi: &[f64]) -> Result<Vec<f64>> {
    let n = grid.intervals();
    if phi.len() != n + 1 {
        return Err(SpsError::Shape {
            expected: n + 1,
            actual: phi.len(),
        });
    }
    let h = grid.spacing();
    let h2 = h * h;
    let r_max = grid.radius();
    let mut lower = vec![0.0; n + 1];
    let mut diag = vec![0.0; n + 1];
    let mut upper = vec![0.0; n + 1];
    let rhs: Vec<f64> = phi.iter().map(|p| p * p).collect();

    // -3 * 2 (V_1 - V_0) / h^2
    diag[0] = 6.0 / h2;
    upper[0] = -6.0 / h2;
    for j in 1..=n {
        let r = grid.node(j);
        let rp = (r + 0.5 * h).powi(2);
        let rm = (r - 0.5 * h).powi(2);
        // flux difference over the shell volume (r_{j+1/2}^3 - r_{j-1/2}^3) / 3
        let scale = 1.0 / ((r * r + h2 / 12.0) * h2);
        if j < n {
            lower[j] = -rm * scale;
            diag[j] = (rp + rm) * scale;
            upper[j] = -rp * scale;
        } else {
            // ghost V_{J+1} = V_{J-1} - 2 h V_J / R
            lower[j] = -(rp + rm) * scale;
            diag[j] = (rp * (1.0 + 2.0 * h / r_max) + rm) * scale;
        }
    }
    solve_tridiagonal(&lower, &diag, &upper, &rhs)
}

/// Discrete energy in `psi` variables; kinetic term from forward differences
/// at half nodes, everything else by the trapezoidal rule.
pub fn befd_energy(grid: &RadialGrid, state: &BefdState, params: &PhysicsParams) -> Result<f64> {
    let n = grid.intervals();
    let h = grid.spacing();
    let v_ext = params.potential.on_nodes(grid)?;
    let phi = &state.phi;
    let mut kinetic = 0.0;
    for j in 0..n {
        let rm = grid.node(j) + 0.5 * h;
        let d = (phi[j + 1] - phi[j]) / h;
        kinetic += rm * rm * d * d;
    }
    kinetic *= 0.5 * h;
    let mut rest = 0.0;
    for j in 0..=n {
        let w = if j == 0 || j == n { 0.5 } else { 1.0 };
        let r = grid.node(j);
        let dens = phi[j] * phi[j];
        let mut e = (v_ext[j] + 0.5 * params.c_p * state.vp[j]) * dens;
        if params.alpha != 0.0 {
            e -= 0.75 * params.alpha * dens.powf(4.0 / 3.0);
        }
        rest += w * r * r * e;
    }
    Ok(4.0 * PI * (kinetic + h * rest))
}

fn normalize(grid: &RadialGrid, phi: &mut [f64]) -> Result<()> {
    let m = mass_3d(grid, phi);
    if m == 0.0 || !m.is_finite() {
        return Err(SpsError::Collapsed);
    }
    let s = m.sqrt();
    phi.iter_mut().for_each(|p| *p /= s);
    Ok(())
}

/// Finite-difference gradient flow; the outer loop and stopping rule mirror
/// [`compute_ground_state`](crate::ground_state::compute_ground_state).
pub fn befd_ground_state(
    params: &PhysicsParams,
    grid: &RadialGrid,
    config: &GfdnConfig,
) -> Result<BefdResult> {
    config.validate()?;
    let n = grid.intervals();
    let h = grid.spacing();
    let h2 = h * h;
    let v_ext = params.potential.on_nodes(grid)?;

    let mut phi: Vec<f64> = match &config.initial_guess {
        Some(guess) => model::psi_from_u(guess).into_iter().map(|c| c.re).collect(),
        None => grid.nodes().iter().map(|&r| (-r * r / 2.0).exp()).collect(),
    };
    if phi.len() != n + 1 {
        return Err(SpsError::config(
            "initial_guess",
            "defined on a different grid",
        ));
    }
    phi[n] = 0.0;
    normalize(grid, &mut phi)?;

    // Unknowns phi_0 .. phi_{J-1}; phi_J = 0.
    let inv_dt = 1.0 / config.dt;
    let mut lower = vec![0.0; n];
    let mut upper = vec![0.0; n];
    let mut lap_diag = vec![0.0; n];
    lap_diag[0] = 6.0 / h2;
    upper[0] = -6.0 / h2;
    for j in 1..n {
        let r = grid.node(j);
        lap_diag[j] = 2.0 / h2;
        lower[j] = -1.0 / h2 + 1.0 / (r * h);
        upper[j] = -1.0 / h2 - 1.0 / (r * h);
    }
    // The system carries -L/2.
    lower.iter_mut().for_each(|x| *x *= 0.5);
    upper.iter_mut().for_each(|x| *x *= 0.5);
    lap_diag.iter_mut().for_each(|x| *x *= 0.5);

    let mut residual = f64::INFINITY;
    let mut iterations = 0;
    let mut converged = false;
    let mut diag = vec![0.0; n];
    let mut rhs = vec![0.0; n];
    while iterations < config.max_outer {
        let vp = befd_hartree(grid, &phi)?;
        for j in 0..n {
            let slater = if params.alpha != 0.0 {
                params.alpha * phi[j].abs().powf(2.0 / 3.0)
            } else {
                0.0
            };
            diag[j] = inv_dt + lap_diag[j] + v_ext[j] + params.c_p * vp[j] - slater;
            rhs[j] = phi[j] * inv_dt;
        }
        let mut next = solve_tridiagonal(&lower, &diag, &upper, &rhs)?;
        next.push(0.0);
        normalize(grid, &mut next)?;
        residual = next
            .iter()
            .zip(&phi)
            .map(|(a, b)| (a - b).abs())
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
        warn!("finite-difference gradient flow stopped after {iterations} steps with residual {residual:.3e}");
    }
    if phi[0] < 0.0 {
        phi.iter_mut().for_each(|p| *p = -*p);
    }
    let vp = befd_hartree(grid, &phi)?;
    let state = BefdState { phi, vp };
    let energy = befd_energy(grid, &state, params)?;
    Ok(BefdResult {
        state,
        energy,
        outer_iterations: iterations,
        residual,
        converged,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::harmonic_ground_state_psi;

    fn gaussian_psi(grid: &RadialGrid) -> Vec<f64> {
        let a = (2.0 * PI).powf(-0.75);
        grid.nodes()
            .iter()
            .map(|&r| a * (-r * r / 4.0).exp())
            .collect()
    }

    fn erf_error(grid: &RadialGrid) -> f64 {
        let vp = befd_hartree(grid, &gaussian_psi(grid)).unwrap();
        grid.nodes()
            .iter()
            .zip(&vp)
            .skip(1)
            .map(|(&r, v)| (v - libm::erf(r / 2f64.sqrt()) / (4.0 * PI * r)).abs())
            .fold(0.0, f64::max)
    }

    #[test]
    fn tridiagonal_matches_dense() {
        let lower = [0.0, 1.0, -2.0, 0.5];
        let diag = [4.0, 5.0, 6.0, 3.0];
        let upper = [1.0, 2.0, 0.5, 0.0];
        let x_true = [1.0, -2.0, 0.5, 3.0];
        let rhs: Vec<f64> = (0..4)
            .map(|i| {
                diag[i] * x_true[i]
                    + if i > 0 { lower[i] * x_true[i - 1] } else { 0.0 }
                    + if i < 3 { upper[i] * x_true[i + 1] } else { 0.0 }
            })
            .collect();
        let x = solve_tridiagonal(&lower, &diag, &upper, &rhs).unwrap();
        for (a, b) in x.iter().zip(x_true) {
            assert!((a - b).abs() < 1e-14);
        }
        assert!(solve_tridiagonal(&[0.0], &[0.0], &[0.0], &[1.0]).is_err());
    }

    #[test]
    fn hartree_of_zero_density() {
        let g = RadialGrid::new(8.0, 64).unwrap();
        let vp = befd_hartree(&g, &vec![0.0; 65]).unwrap();
        assert!(vp.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn hartree_gaussian_second_order() {
        let e1 = erf_error(&RadialGrid::new(16.0, 256).unwrap());
        let e2 = erf_error(&RadialGrid::new(16.0, 512).unwrap());
        let order = (e1 / e2).log2();
        assert!(
            (1.8..=2.2).contains(&order),
            "order {order} ({e1:e}, {e2:e})"
        );
    }

    #[test]
    fn hartree_far_field_monopole() {
        let g = RadialGrid::new(8.0, 512).unwrap();
        let vp = befd_hartree(&g, &gaussian_psi(&g)).unwrap();
        let far = 8.0 * vp[512];
        assert!((far - 1.0 / (4.0 * PI)).abs() < 1e-4, "r V_P(R) = {far}");
    }

    #[test]
    fn harmonic_ground_state_second_order() {
        let params = PhysicsParams::linear_harmonic(1.0);
        let errs: Vec<f64> = [256usize, 512]
            .iter()
            .map(|&n| {
                let g = RadialGrid::new(8.0, n).unwrap();
                let res = befd_ground_state(&params, &g, &GfdnConfig::default()).unwrap();
                assert!(res.converged);
                assert!((mass_3d(&g, &res.state.phi) - 1.0).abs() < 1e-12);
                res.state
                    .phi
                    .iter()
                    .zip(g.nodes())
                    .map(|(p, r)| (p - harmonic_ground_state_psi(1.0, r)).abs())
                    .fold(0.0, f64::max)
            })
            .collect();
        assert!(errs[1] < 1e-4, "sup error {:e}", errs[1]);
        let ratio = errs[0] / errs[1];
        assert!((3.5..=4.5).contains(&ratio), "ratio {ratio}");
    }
}
