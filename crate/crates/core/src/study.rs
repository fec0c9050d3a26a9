//! Drivers behind the command-line modes. Each writes plain CSV data files and
//! a human-readable summary into the configured output directory.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::PathBuf;
use std::time::Instant;

use log::{info, warn};

use crate::befd;
use crate::config::{Benchmark, Method, Mode, RunConfig};
use crate::dynamics::{self, TraceEvent};
use crate::error::{Result, SpsError};
use crate::grid::{RadialField, RadialGrid};
use crate::ground_state;
use crate::model::{self, radial_scale, PhysicsParams};
use crate::poisson;

/// Fixed-width scientific notation with 17 significant digits.
pub fn fmt_num(x: f64) -> String {
    format!("{x:.16e}")
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub converged: bool,
    pub files: Vec<PathBuf>,
}

/// Process exit code for an error: 2 configuration, 3 solver non-convergence,
/// 4 numerical or I/O failure.
pub fn exit_code(err: &SpsError) -> i32 {
    match err {
        SpsError::Config { .. } | SpsError::Shape { .. } => 2,
        SpsError::InnerSolve { .. } => 3,
        SpsError::Collapsed
        | SpsError::Singular { .. }
        | SpsError::NonFinite { .. }
        | SpsError::Io(_) => 4,
    }
}

pub fn run(config: &RunConfig) -> Result<RunOutcome> {
    fs::create_dir_all(&config.out_dir)?;
    match config.mode {
        Mode::GroundState => run_groundstate(config),
        Mode::Evolve => run_evolve(config),
        Mode::Sweep => run_sweep(config),
    }
}

/// Ground state on all nodes, whichever discretization produced it.
#[derive(Debug, Clone)]
pub struct NodalGroundState {
    pub grid: RadialGrid,
    pub psi: Vec<f64>,
    pub energy: f64,
    pub iterations: usize,
    pub residual: f64,
    pub converged: bool,
}

impl NodalGroundState {
    /// `U_j = 2 sqrt(pi) r_j psi_j`, zero at both ends.
    pub fn u(&self) -> Vec<f64> {
        let n = self.grid.intervals();
        let s = radial_scale();
        (0..=n)
            .map(|j| {
                if j == 0 || j == n {
                    0.0
                } else {
                    s * self.grid.node(j) * self.psi[j]
                }
            })
            .collect()
    }
}

pub fn solve_ground_state(
    method: Method,
    params: &PhysicsParams,
    grid: &RadialGrid,
    config: &ground_state::GfdnConfig,
) -> Result<NodalGroundState> {
    match method {
        Method::Besp => {
            let res = ground_state::compute_ground_state(params, grid, config)?;
            Ok(NodalGroundState {
                grid: grid.clone(),
                psi: res.phi_psi,
                energy: res.energy,
                iterations: res.outer_iterations,
                residual: res.residual,
                converged: res.converged,
            })
        }
        Method::Befd => {
            let res = befd::befd_ground_state(params, grid, config)?;
            Ok(NodalGroundState {
                grid: grid.clone(),
                psi: res.state.phi,
                energy: res.energy,
                iterations: res.outer_iterations,
                residual: res.residual,
                converged: res.converged,
            })
        }
    }
}

fn warn_tail(u: &RadialField) {
    let r_half = 0.5 * u.grid().radius();
    let tail = poisson::tail_mass(u, r_half);
    if tail > 1e-8 {
        warn!("mass {tail:.3e} lies beyond R/2 = {r_half}; the domain may be too small");
    }
}

fn output_path(config: &RunConfig, suffix: &str) -> PathBuf {
    config.out_dir.join(format!("{}_{suffix}", config.prefix))
}

fn write_summary(config: &RunConfig, lines: &[(String, String)], seconds: f64) -> Result<PathBuf> {
    let path = output_path(config, "summary.txt");
    let mut out = BufWriter::new(File::create(&path)?);
    for (k, v) in lines {
        writeln!(out, "{k} = {v}")?;
    }
    writeln!(out, "wall_seconds = {seconds:.6}")?;
    writeln!(out, "\n# configuration")?;
    write!(out, "{}", config.render())?;
    out.flush()?;
    Ok(path)
}

/// Writes `<prefix>_phi.csv` (`r,phi_g,u`, rows `j = 0..=J`) and the summary.
pub fn run_groundstate(config: &RunConfig) -> Result<RunOutcome> {
    let start = Instant::now();
    let grid = config.grid()?;
    let params = config.physics(&grid)?;
    let gs = solve_ground_state(config.method, &params, &grid, &config.gfdn())?;
    let seconds = start.elapsed().as_secs_f64();

    let u = gs.u();
    if let Ok(field) = RadialField::from_real(&grid, &u[1..grid.intervals()]) {
        warn_tail(&field);
    }
    let csv = output_path(config, "phi.csv");
    let mut out = BufWriter::new(File::create(&csv)?);
    writeln!(out, "r,phi_g,u")?;
    for (j, r) in grid.nodes().into_iter().enumerate() {
        writeln!(
            out,
            "{},{},{}",
            fmt_num(r),
            fmt_num(gs.psi[j]),
            fmt_num(u[j])
        )?;
    }
    out.flush()?;

    let summary = write_summary(
        config,
        &[
            ("method".into(), config.method.as_str().into()),
            ("energy".into(), fmt_num(gs.energy)),
            ("outer_iterations".into(), gs.iterations.to_string()),
            ("residual".into(), fmt_num(gs.residual)),
            ("converged".into(), gs.converged.to_string()),
        ],
        seconds,
    )?;
    info!(
        "ground state: energy {} after {} iterations (converged: {})",
        gs.energy, gs.iterations, gs.converged
    );
    Ok(RunOutcome {
        converged: gs.converged,
        files: vec![csv, summary],
    })
}

fn snapshot_label(t: f64) -> String {
    let rounded = (t * 1e9).round() / 1e9;
    format!("{rounded}")
}

/// Writes `<prefix>_observables.csv` and one `<prefix>_snapshot_<t>.csv` per
/// requested time. Rows are flushed as they are produced, so a failed run
/// leaves everything up to the failure on disk.
pub fn run_evolve(config: &RunConfig) -> Result<RunOutcome> {
    let start = Instant::now();
    let grid = config.grid()?;
    let params = config.physics(&grid)?;
    let u0 = model::gaussian_initial(&grid, config.gaussian_width)?;
    warn_tail(&u0);

    let obs_path = output_path(config, "observables.csv");
    let mut obs = BufWriter::new(File::create(&obs_path)?);
    writeln!(obs, "t,mass,energy,psi0_abs")?;
    let mut files = vec![obs_path];
    let nodes = grid.nodes();

    let result = dynamics::evolve_streaming(&u0, &params, &config.tssp(), |event| {
        match event {
            TraceEvent::Observable(o) => {
                writeln!(
                    obs,
                    "{},{},{},{}",
                    fmt_num(o.time),
                    fmt_num(o.mass),
                    fmt_num(o.energy),
                    fmt_num(o.psi_origin_abs)
                )?;
            }
            TraceEvent::Snapshot(s) => {
                let path = output_path(config, &format!("snapshot_{}.csv", snapshot_label(s.time)));
                let mut out = BufWriter::new(File::create(&path)?);
                writeln!(out, "r,abs_psi,re_psi,im_psi")?;
                for (r, p) in nodes.iter().zip(&s.psi) {
                    writeln!(
                        out,
                        "{},{},{},{}",
                        fmt_num(*r),
                        fmt_num(p.norm()),
                        fmt_num(p.re),
                        fmt_num(p.im)
                    )?;
                }
                out.flush()?;
                files.push(path);
            }
        }
        Ok(())
    });
    obs.flush()?;
    drop(obs);
    let seconds = start.elapsed().as_secs_f64();
    let final_state = result?;

    let summary = write_summary(
        config,
        &[
            ("final_mass".into(), fmt_num(model::mass(&final_state))),
            (
                "final_energy".into(),
                fmt_num(model::energy_self_consistent(&final_state, &params)?),
            ),
            ("steps".into(), config.tssp().steps()?.to_string()),
        ],
        seconds,
    )?;
    files.push(summary);
    Ok(RunOutcome {
        converged: true,
        files,
    })
}

/// Sup and L2 (`sqrt(h sum e_j^2)`) node-wise differences between a trial
/// solution and a benchmark on a nested finer grid.
pub fn nested_errors(
    trial: &RadialGrid,
    trial_psi: &[f64],
    bench: &RadialGrid,
    bench_psi: &[f64],
) -> Result<(f64, f64)> {
    let ratio = trial.spacing() / bench.spacing();
    let stride = ratio.round();
    if (ratio - stride).abs() > 1e-9 * ratio || stride < 1.0 || trial.radius() != bench.radius() {
        return Err(SpsError::config(
            "sweep_h",
            "trial grid nodes must be a subset of the benchmark grid nodes",
        ));
    }
    let stride = stride as usize;
    let mut sup: f64 = 0.0;
    let mut sq = 0.0;
    for (j, p) in trial_psi.iter().enumerate() {
        let e = (p - bench_psi[j * stride]).abs();
        sup = sup.max(e);
        sq += e * e;
    }
    Ok((sup, (trial.spacing() * sq).sqrt()))
}

/// Convergence study: one benchmark, then each trial mesh; writes
/// `<prefix>_sweep.csv` with `h_r,sup_error,l2_error,energy,seconds`.
pub fn run_sweep(config: &RunConfig) -> Result<RunOutcome> {
    let start = Instant::now();
    let bench_grid = RadialGrid::with_spacing(config.radius, config.benchmark_h)?;
    let params = config.physics(&bench_grid)?;
    let gfdn = config.gfdn();
    let (bench_psi, bench_energy) = match config.benchmark {
        Benchmark::Method(m) => {
            let gs = solve_ground_state(m, &params, &bench_grid, &gfdn)?;
            if !gs.converged {
                warn!("benchmark did not converge (residual {:.3e})", gs.residual);
            }
            (gs.psi, gs.energy)
        }
        Benchmark::Analytic => {
            let gamma = match params.potential {
                model::ExternalPotential::Harmonic { gamma } => gamma,
                _ => {
                    return Err(SpsError::config(
                        "benchmark",
                        "analytic benchmark needs a harmonic potential",
                    ))
                }
            };
            let psi = bench_grid
                .nodes()
                .into_iter()
                .map(|r| model::harmonic_ground_state_psi(gamma, r))
                .collect();
            (psi, 1.5 * gamma)
        }
    };

    let csv = output_path(config, "sweep.csv");
    let mut out = BufWriter::new(File::create(&csv)?);
    writeln!(out, "h_r,sup_error,l2_error,energy,seconds")?;
    let mut converged = true;
    for &h in &config.sweep_h {
        let t0 = Instant::now();
        let grid = RadialGrid::with_spacing(config.radius, h)?;
        let trial_params = config.physics(&grid)?;
        let gs = solve_ground_state(config.method, &trial_params, &grid, &gfdn)?;
        converged &= gs.converged;
        let secs = t0.elapsed().as_secs_f64();
        let (sup, l2) = nested_errors(&grid, &gs.psi, &bench_grid, &bench_psi)?;
        writeln!(
            out,
            "{},{},{},{},{}",
            fmt_num(h),
            fmt_num(sup),
            fmt_num(l2),
            fmt_num(gs.energy),
            fmt_num(secs)
        )?;
        info!("h_r = {h}: sup error {sup:.3e}");
    }
    out.flush()?;
    let summary = write_summary(
        config,
        &[
            ("benchmark".into(), config.benchmark.as_str().into()),
            ("benchmark_h".into(), fmt_num(config.benchmark_h)),
            ("benchmark_energy".into(), fmt_num(bench_energy)),
            ("trial_method".into(), config.method.as_str().into()),
            ("converged".into(), converged.to_string()),
        ],
        start.elapsed().as_secs_f64(),
    )?;
    Ok(RunOutcome {
        converged,
        files: vec![csv, summary],
    })
}
