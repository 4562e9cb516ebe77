//! Master-equation propagation of the battery density matrix.
//!
//! The state is integrated in the interaction picture,
//! dρ/dt = (1/iħ)[H_int, ρ] + ρ_s, with only the independent real entries
//! of ρ (diagonal plus upper-triangle Re/Im) carried by the integrator, so
//! every snapshot is Hermitian by construction.
//!
//! The Λ dissipator has no 1–3 dephasing term and, for branching sums below
//! one, leaks population out of the three-level subspace; both are kept as is.

mod density;
mod eigen;
mod ode;
mod operators;

use serde::{Deserialize, Serialize};

pub use density::{DensityMatrix, DensityRows, HERMITIAN_TOL, POSITIVITY_TOL};
pub use eigen::{instantaneous_eigensystem, EigenSystem};
pub use ode::OdeStats;
pub use operators::{dissipator, hamiltonian};

use crate::error::{Error, Result};
use crate::nuclide_db::{DecayModel, NuclideRecord, Scheme};
use crate::pulse::Schedule;
use crate::units::per_s_to_per_ps;

/// Slack on trace conservation beyond the physical leak budget.
pub const TRACE_TOL: f64 = 1e-8;
pub const DEFAULT_SNAPSHOTS: usize = 2001;

/// Time-dependent Rabi frequencies.
pub trait Drive: Sync {
    /// (Ω_p, Ω_s) in s⁻¹ at `t_ps`.
    fn rabi(&self, t_ps: f64) -> (f64, f64);

    /// Largest step the integrator may take without stepping over a feature.
    fn max_step_ps(&self) -> f64 {
        f64::INFINITY
    }
}

impl Drive for Schedule {
    fn rabi(&self, t_ps: f64) -> (f64, f64) {
        self.rabi_at(t_ps)
    }

    fn max_step_ps(&self) -> f64 {
        0.5 * self.min_sigma_ps()
    }
}

/// Square-pulse drive held constant over the whole window (test hook).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstantDrive {
    pub omega_p: f64,
    pub omega_s: f64,
}

impl Drive for ConstantDrive {
    fn rabi(&self, _t_ps: f64) -> (f64, f64) {
        (self.omega_p, self.omega_s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    pub rtol: f64,
    pub atol: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { rtol: 1e-10, atol: 1e-12 }
    }
}

impl Tolerances {
    pub fn validate(&self) -> Result<()> {
        if self.rtol > 0.0 && self.atol > 0.0 && self.rtol.is_finite() && self.atol.is_finite() {
            Ok(())
        } else {
            Err(Error::Usage(format!("tolerances must be positive (rtol {}, atol {})", self.rtol, self.atol)))
        }
    }

    pub fn halved(&self) -> Self {
        Tolerances { rtol: self.rtol / 2.0, atol: self.atol / 2.0 }
    }
}

/// Where snapshots are taken.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum SnapshotGrid {
    /// `n` evenly spaced points on [0, t_total].
    Uniform(usize),
    /// Explicit increasing times in ps, starting at 0.
    Times(Vec<f64>),
}

impl Default for SnapshotGrid {
    fn default() -> Self {
        SnapshotGrid::Uniform(DEFAULT_SNAPSHOTS)
    }
}

impl SnapshotGrid {
    pub fn times(&self, t_total_ps: f64) -> Result<Vec<f64>> {
        let times = match self {
            SnapshotGrid::Uniform(n) => {
                if *n < 2 {
                    return Err(Error::Usage(format!("snapshot grid needs at least 2 points, got {n}")));
                }
                let step = t_total_ps / (*n - 1) as f64;
                let mut v: Vec<f64> = (0..*n).map(|i| i as f64 * step).collect();
                v[*n - 1] = t_total_ps;
                v
            }
            SnapshotGrid::Times(v) => {
                if v.len() < 2 || v[0] != 0.0 {
                    return Err(Error::Usage("explicit snapshot grid needs ≥ 2 points starting at 0".into()));
                }
                if v.windows(2).any(|w| !(w[1] > w[0])) {
                    return Err(Error::Usage("snapshot times must be strictly increasing".into()));
                }
                v.clone()
            }
        };
        Ok(times)
    }
}

/// Snapshots of one propagation.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub record_id: String,
    pub scheme: Scheme,
    pub times: Vec<f64>,
    pub states: Vec<DensityMatrix>,
    pub schedule: Option<Schedule>,
    /// Largest trace loss the dissipator can physically produce.
    pub leak_budget: f64,
    pub stats: OdeStats,
}

impl Trajectory {
    pub fn dim(&self) -> usize {
        self.scheme.dim()
    }

    pub fn last(&self) -> &DensityMatrix {
        self.states.last().expect("trajectory holds at least two snapshots")
    }

    /// Population series of level `k`.
    pub fn population(&self, k: usize) -> Vec<f64> {
        self.states.iter().map(|s| s.get(k, k).re).collect()
    }
}

/// A propagation problem with an arbitrary drive and initial state.
pub struct Problem<'a, D: Drive + ?Sized> {
    pub label: &'a str,
    pub scheme: Scheme,
    pub decay: DecayModel,
    pub drive: &'a D,
    pub initial: DensityMatrix,
    pub t_total_ps: f64,
}

/// Trace loss permitted over `t_total_ps`.
pub fn leak_budget(scheme: Scheme, decay: &DecayModel, t_total_ps: f64) -> f64 {
    match scheme {
        Scheme::Lambda => per_s_to_per_ps(decay.gamma) * decay.leak_fraction() * t_total_ps,
        _ => 0.0,
    }
}

/// Checks the state invariants; `Err` carries the violated rule.
pub fn check_state(rho: &DensityMatrix, leak_budget: f64) -> std::result::Result<(), String> {
    let herm = rho.hermiticity_error();
    if herm > HERMITIAN_TOL {
        return Err(format!("Hermiticity deviation {herm:e} exceeds {HERMITIAN_TOL:e}"));
    }
    let tr = rho.trace();
    if tr > 1.0 + TRACE_TOL || tr < 1.0 - leak_budget - TRACE_TOL {
        return Err(format!("trace {tr} outside [1 - {leak_budget:e} - {TRACE_TOL:e}, 1 + {TRACE_TOL:e}]"));
    }
    let min = rho.min_eigenvalue();
    if min < -POSITIVITY_TOL {
        return Err(format!("eigenvalue {min:e} below -{POSITIVITY_TOL:e}"));
    }
    Ok(())
}

pub fn propagate_with<D: Drive + ?Sized>(
    problem: &Problem<'_, D>,
    grid: &SnapshotGrid,
    tol: &Tolerances,
) -> Result<Trajectory> {
    tol.validate()?;
    let d = problem.scheme.dim();
    if problem.initial.dim() != d {
        return Err(Error::Dimension { expected: d, got: problem.initial.dim() });
    }
    if !(problem.t_total_ps > 0.0) {
        return Err(Error::Usage(format!("t_total must be positive, got {}", problem.t_total_ps)));
    }
    let times = grid.times(problem.t_total_ps)?;
    let rhs = operators::Rhs::new(problem.scheme, &problem.decay, per_s_to_per_ps(problem.decay.gamma))?;
    let budget = leak_budget(problem.scheme, &problem.decay, problem.t_total_ps);
    let opts = ode::OdeOptions {
        rtol: tol.rtol,
        atol: tol.atol,
        max_step: problem.drive.max_step_ps(),
        max_steps: 20_000_000,
    };

    let drive = problem.drive;
    let mut states = Vec::with_capacity(times.len());
    let stats = ode::integrate(
        |t, y, dy| {
            let (wp, ws) = drive.rabi(t);
            rhs.eval(per_s_to_per_ps(wp), per_s_to_per_ps(ws), y, dy)
        },
        0.0,
        &problem.initial.to_packed(),
        &times,
        &opts,
        |i, t, y| {
            let rho = DensityMatrix::from_packed(d, y);
            check_state(&rho, budget).map_err(|rule| {
                Error::invariant(problem.label, format!("snapshot {i} (t = {t} ps): {rule}"))
            })?;
            states.push(rho);
            Ok(())
        },
    )?;

    Ok(Trajectory {
        record_id: problem.label.to_string(),
        scheme: problem.scheme,
        times,
        states,
        schedule: None,
        leak_budget: budget,
        stats,
    })
}

/// Integrates a record's charging scenario from the ground state.
pub fn propagate(
    record: &NuclideRecord,
    schedule: &Schedule,
    grid: &SnapshotGrid,
    tol: &Tolerances,
) -> Result<Trajectory> {
    if schedule.stokes.is_some() != record.scheme.is_three_level() {
        return Err(Error::Scheme(format!("schedule does not match the {:?} scheme of {}", record.scheme, record.id)));
    }
    let problem = Problem {
        label: &record.id,
        scheme: record.scheme,
        decay: record.decay_model()?,
        drive: schedule,
        initial: DensityMatrix::ground(record.dim()),
        t_total_ps: schedule.t_total_ps,
    };
    let mut traj = propagate_with(&problem, grid, tol)?;
    traj.schedule = Some(schedule.clone());
    Ok(traj)
}
