use serde::{Deserialize, Serialize};

use crate::dynamics::{propagate, SnapshotGrid, Tolerances, Trajectory};
use crate::error::Result;
use crate::metrics::{metric_series, MetricSeries};
use crate::nuclide_db::NuclideRecord;
use crate::pulse::{build_schedule, ScheduleOverrides};

/// Band around the final target population that counts as charged.
pub const STABLE_BAND: f64 = 1e-3;

/// Integrator settings shared by every scenario in a run.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RunOptions {
    pub tol: Tolerances,
    pub grid: SnapshotGrid,
}

/// End-of-charge figures of one scenario. Energies in eV, times in ps,
/// power in W.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChargingSummary {
    pub record_id: String,
    #[serde(rename = "E_sta_eV")]
    pub e_sta: f64,
    pub t_sta_ps: Option<f64>,
    pub t_total_ps: f64,
    #[serde(rename = "P_max_W")]
    pub p_max: f64,
    #[serde(rename = "W_sta_eV")]
    pub w_sta: f64,
    #[serde(rename = "E_max_eV")]
    pub e_max: f64,
    #[serde(rename = "W_max_eV")]
    pub w_max: f64,
    pub r_final: f64,
    pub purity_final: f64,
    pub purity_min: f64,
    pub target_pop_final: f64,
    /// Largest population of the intermediate level (three-level schemes).
    pub intermediate_pop_max: Option<f64>,
    pub trace_final: f64,
}

pub struct ChargingRun {
    pub trajectory: Trajectory,
    pub series: MetricSeries,
    pub summary: ChargingSummary,
}

/// Earliest snapshot from which the target population stays at or above
/// 0.999 of its final value and within ±0.001 of it. `None` when the final
/// population is below one half.
pub fn detect_stable_time(series: &MetricSeries, target_level: usize) -> Option<f64> {
    let pop = series.populations.get(target_level)?;
    let last = *pop.last()?;
    if last < 0.5 {
        return None;
    }
    let inside = |p: f64| p >= (1.0 - STABLE_BAND) * last && (p - last).abs() <= STABLE_BAND;
    let mut first = pop.len() - 1;
    while first > 0 && inside(pop[first - 1]) {
        first -= 1;
    }
    Some(series.times[first])
}

pub fn summarize(record_id: &str, traj: &Trajectory, series: &MetricSeries) -> ChargingSummary {
    let target = traj.scheme.target_level();
    let last = series.len() - 1;
    let max = |v: &[f64]| v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let p_max = series
        .energy
        .iter()
        .zip(&series.times)
        .skip(1)
        .map(|(e, t)| crate::metrics::average_power(*e, *t))
        .fold(0.0, f64::max);
    ChargingSummary {
        record_id: record_id.to_string(),
        e_sta: series.energy[last],
        t_sta_ps: detect_stable_time(series, target),
        t_total_ps: series.times[last],
        p_max,
        w_sta: series.ergotropy[last],
        e_max: max(&series.energy),
        w_max: max(&series.ergotropy),
        r_final: series.ratio[last],
        purity_final: series.purity[last],
        purity_min: series.purity.iter().copied().fold(f64::INFINITY, f64::min),
        target_pop_final: series.populations[target][last],
        intermediate_pop_max: traj.scheme.is_three_level().then(|| max(&series.populations[1])),
        trace_final: traj.last().trace(),
    }
}

pub fn run_charging_scenario(
    record: &NuclideRecord,
    overrides: &ScheduleOverrides,
    opts: &RunOptions,
) -> Result<ChargingRun> {
    let schedule = build_schedule(record, overrides)?;
    let trajectory = propagate(record, &schedule, &opts.grid, &opts.tol)?;
    let series = metric_series(&trajectory, &record.level_energies)?;
    let summary = summarize(&record.id, &trajectory, &series);
    Ok(ChargingRun { trajectory, series, summary })
}
