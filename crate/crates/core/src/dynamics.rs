//! Strang-split time stepping: half a kinetic step in sine space, a full
//! nodal phase rotation by the effective potential, and another half kinetic
//! step. Both sub-flows are unimodular, so the discrete mass is conserved.

use num_complex::Complex64;

use crate::error::{Result, SpsError};
use crate::grid::RadialField;
use crate::model::{self, radial_scale, ObservableSet, PhysicsParams};
use crate::poisson;

#[derive(Debug, Clone, PartialEq)]
pub struct TsspConfig {
    pub dt: f64,
    pub t_final: f64,
    /// Observables are recorded every `record_every` steps (and at the final step).
    pub record_every: usize,
    pub snapshot_times: Vec<f64>,
}

impl Default for TsspConfig {
    fn default() -> Self {
        TsspConfig {
            dt: 0.01,
            t_final: 10.0,
            record_every: 10,
            snapshot_times: Vec::new(),
        }
    }
}

impl TsspConfig {
    /// Number of steps; `t_final` has to be a whole multiple of `dt`.
    pub fn steps(&self) -> Result<usize> {
        let ratio = self.t_final / self.dt;
        let n = ratio.round();
        if (ratio - n).abs() > 1e-9 * ratio.max(1.0) {
            return Err(SpsError::config(
                "t_final",
                format!(
                    "t_final = {} is not a multiple of dt = {}",
                    self.t_final, self.dt
                ),
            ));
        }
        Ok(n as usize)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(SpsError::config(
                "dt",
                format!("must be positive, got {}", self.dt),
            ));
        }
        if !(self.t_final.is_finite() && self.t_final >= 0.0) {
            return Err(SpsError::config(
                "t_final",
                format!("must be nonnegative, got {}", self.t_final),
            ));
        }
        if self.record_every < 1 {
            return Err(SpsError::config("record_every", "must be at least 1"));
        }
        for &t in &self.snapshot_times {
            if !(0.0..=self.t_final).contains(&t) {
                return Err(SpsError::config(
                    "snapshot_times",
                    format!("{t} lies outside [0, {}]", self.t_final),
                ));
            }
        }
        self.steps().map(|_| ())
    }
}

#[derive(Debug, Clone)]
pub struct Snapshot {
    pub time: f64,
    pub u: RadialField,
    /// `psi` on all nodes `j = 0..=J`.
    pub psi: Vec<Complex64>,
}

#[derive(Debug, Clone)]
pub struct DynamicsTrace {
    pub observables: Vec<ObservableSet>,
    pub snapshots: Vec<Snapshot>,
    pub final_state: RadialField,
}

/// Multiplies each sine coefficient by `exp(-i dt mu_k^2 / 4)`.
pub fn kinetic_half_step(u: &RadialField, dt: f64) -> RadialField {
    let mut spectrum = u.dst_forward();
    spectrum.multiply_modes(|mu| Complex64::from_polar(1.0, -0.25 * dt * mu * mu));
    spectrum.dst_inverse()
}

/// Rotates each node by `exp(-i dt b_j)` with `b` evaluated from `u` itself,
/// Hartree field included.
pub fn potential_step(u: &RadialField, params: &PhysicsParams, dt: f64) -> Result<RadialField> {
    let v_ext = params.potential.on_interior(u.grid())?;
    Ok(apply_potential(u, &v_ext, params, dt))
}

fn apply_potential(u: &RadialField, v_ext: &[f64], params: &PhysicsParams, dt: f64) -> RadialField {
    let grid = u.grid();
    let hartree = if params.c_p != 0.0 {
        let vbar = poisson::solve_hartree_bar(&poisson::density_from_u(u));
        poisson::hartree_term(&vbar, params.c_p)
    } else {
        vec![0.0; grid.interior_len()]
    };
    let s = radial_scale();
    let mut out = u.clone();
    for (j, v) in out.values_mut().iter_mut().enumerate() {
        let slater = if params.alpha != 0.0 {
            params.alpha * (s * grid.node(j + 1)).powf(-2.0 / 3.0) * v.norm().powf(2.0 / 3.0)
        } else {
            0.0
        };
        let b = v_ext[j] + hartree[j] - slater;
        *v *= Complex64::from_polar(1.0, -dt * b);
    }
    out
}

/// One step `U^n -> U^{n+1}`.
pub fn tssp_step(u: &RadialField, params: &PhysicsParams, dt: f64) -> Result<RadialField> {
    let v_ext = params.potential.on_interior(u.grid())?;
    Ok(step_with(u, &v_ext, params, dt))
}

fn step_with(u: &RadialField, v_ext: &[f64], params: &PhysicsParams, dt: f64) -> RadialField {
    let first = kinetic_half_step(u, dt);
    let second = apply_potential(&first, v_ext, params, dt);
    kinetic_half_step(&second, dt)
}

fn observe(u: &RadialField, params: &PhysicsParams, time: f64) -> Result<ObservableSet> {
    let psi0 = u.dst_forward().derivative_at_origin() / radial_scale();
    Ok(ObservableSet {
        time,
        mass: model::mass(u),
        energy: model::energy_self_consistent(u, params)?,
        psi_origin_abs: psi0.norm(),
    })
}

/// Item emitted while integrating.
#[derive(Debug, Clone)]
pub enum TraceEvent {
    Observable(ObservableSet),
    Snapshot(Snapshot),
}

/// Integrates from `u0` to `t_final`, handing every recorded observable and
/// snapshot to `sink` as soon as it is produced. Returns the final state.
pub fn evolve_streaming(
    u0: &RadialField,
    params: &PhysicsParams,
    config: &TsspConfig,
    mut sink: impl FnMut(TraceEvent) -> Result<()>,
) -> Result<RadialField> {
    config.validate()?;
    let m0 = model::mass(u0);
    if (m0 - 1.0).abs() > 1e-8 {
        return Err(SpsError::config(
            "initial",
            format!("initial mass must be 1, got {m0}"),
        ));
    }
    let steps = config.steps()?;
    let v_ext = params.potential.on_interior(u0.grid())?;
    let mut snapshot_steps: Vec<usize> = config
        .snapshot_times
        .iter()
        .map(|t| ((t / config.dt).round() as usize).min(steps))
        .collect();
    snapshot_steps.sort_unstable();
    snapshot_steps.dedup();
    let mut next_snap = snapshot_steps.into_iter().peekable();
    let snapshot = |n: usize, u: &RadialField| {
        TraceEvent::Snapshot(Snapshot {
            time: n as f64 * config.dt,
            u: u.clone(),
            psi: model::psi_from_u(u),
        })
    };

    sink(TraceEvent::Observable(observe(u0, params, 0.0)?))?;
    if next_snap.next_if_eq(&0).is_some() {
        sink(snapshot(0, u0))?;
    }
    let mut u = u0.clone();
    for n in 1..=steps {
        u = step_with(&u, &v_ext, params, config.dt);
        let time = n as f64 * config.dt;
        if u.values()
            .iter()
            .any(|v| !(v.re.is_finite() && v.im.is_finite()))
        {
            return Err(SpsError::NonFinite { time });
        }
        if n % config.record_every == 0 || n == steps {
            sink(TraceEvent::Observable(observe(&u, params, time)?))?;
        }
        if next_snap.next_if_eq(&n).is_some() {
            sink(snapshot(n, &u))?;
        }
    }
    Ok(u)
}

/// Integrates from `u0` to `t_final`, collecting the whole trace.
pub fn evolve(
    u0: &RadialField,
    params: &PhysicsParams,
    config: &TsspConfig,
) -> Result<DynamicsTrace> {
    let mut observables = Vec::new();
    let mut snapshots = Vec::new();
    let final_state = evolve_streaming(u0, params, config, |event| {
        match event {
            TraceEvent::Observable(o) => observables.push(o),
            TraceEvent::Snapshot(s) => snapshots.push(s),
        }
        Ok(())
    })?;
    Ok(DynamicsTrace {
        observables,
        snapshots,
        final_state,
    })
}
