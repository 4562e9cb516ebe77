//! Command execution behind the `niqb` binary.

use std::path::PathBuf;

use serde::Serialize;

use crate::config::{CommandKind, RunConfig};
use crate::dynamics::OdeStats;
use crate::error::{Error, Result};
use crate::experiments::{
    compare_nuclear_vs_atomic, reproduce_performance_tables, robustness_sweep, run_charging_scenario, AxisSpec,
    ChargingRun, ChargingSummary,
};
use crate::io;
use crate::nuclide_db::{NuclideDb, NuclideRecord};
use crate::pulse::{build_schedule, Schedule, ScheduleOverrides};

/// Exit status for a table run with at least one failing row.
pub const EXIT_TABLE_FAILURE: i32 = 2;

#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub files: Vec<PathBuf>,
    /// Human-readable report for stdout.
    pub message: String,
    pub exit_code: i32,
}

#[derive(Serialize)]
struct SimulationDoc<'a> {
    #[serde(flatten)]
    summary: &'a ChargingSummary,
    schedule: &'a Option<Schedule>,
    overrides: &'a ScheduleOverrides,
    warnings: &'a [String],
    integrator: &'a OdeStats,
}

pub fn simulation_summary_json(run: &ChargingRun, overrides: &ScheduleOverrides) -> Result<String> {
    let schedule = &run.trajectory.schedule;
    let warnings = schedule.as_ref().map(|s| s.warnings.as_slice()).unwrap_or_default();
    io::to_json_string(&SimulationDoc {
        summary: &run.summary,
        schedule,
        overrides,
        warnings,
        integrator: &run.trajectory.stats,
    })
}

/// One decade either side of the tabulated intensity, 11 log-spaced points.
pub fn default_axis(intensity: f64) -> AxisSpec {
    AxisSpec::log(intensity / 10.0, intensity * 10.0, 11)
}

fn record<'a>(db: &'a NuclideDb, cfg: &RunConfig) -> Result<&'a NuclideRecord> {
    let id = cfg.nuclide.as_deref().ok_or_else(|| Error::Usage("--nuclide is required".into()))?;
    db.require(id)
}

/// Runs the configured command and writes its files into `cfg.out_dir`.
pub fn execute(cfg: &RunConfig) -> Result<Outcome> {
    cfg.validate()?;
    let db = NuclideDb::resolve(cfg.db_path.as_deref())?;
    let opts = cfg.run_options();
    let dir = cfg.out_dir.as_path();
    let mut files = Vec::new();
    let mut exit_code = 0;
    let message = match cfg.command {
        CommandKind::Simulate => {
            let rec = record(&db, cfg)?;
            let run = run_charging_scenario(rec, &cfg.overrides, &opts)?;
            io::ensure_dir(dir)?;
            files.push(io::write_file(dir, "trajectory.csv", |b| io::write_trajectory_csv(b, &run.trajectory))?);
            files.push(io::write_file(dir, "metrics.csv", |b| io::write_metrics_csv(b, &run.series))?);
            let doc = simulation_summary_json(&run, &cfg.overrides)?;
            files.push(io::write_file(dir, "summary.json", |b| {
                b.extend_from_slice(doc.as_bytes());
                Ok(())
            })?);
            let s = &run.summary;
            let mut m = format!(
                "{}: E_sta {:.6e} eV, t_sta {}, P_max {:.6e} W, R {:.6}\n",
                s.record_id,
                s.e_sta,
                s.t_sta_ps.map_or_else(|| "-".into(), |t| format!("{t:.6} ps")),
                s.p_max,
                s.r_final
            );
            for w in run.trajectory.schedule.iter().flat_map(|s| &s.warnings) {
                m.push_str(&format!("warning: {w}\n"));
            }
            m
        }
        CommandKind::Sweep => {
            let rec = record(&db, cfg)?;
            let ip = cfg.ip.unwrap_or_else(|| default_axis(rec.peak_intensity[0]));
            let is = match (cfg.is, rec.peak_intensity.get(1)) {
                (Some(a), _) => a,
                (None, Some(&i)) => default_axis(i),
                (None, None) => {
                    return Err(Error::Scheme(format!("{} is two-level; the sweep needs pump and Stokes pulses", rec.id)))
                }
            };
            let grid = robustness_sweep(rec, &ip.points()?, &is.points()?, &cfg.overrides, &opts, cfg.jobs)?;
            io::ensure_dir(dir)?;
            files.push(io::write_file(dir, "sweep.csv", |b| io::write_sweep_csv(b, &grid))?);
            files.push(io::write_json_file(dir, "sweep.json", &grid)?);
            format!(
                "{}: {}×{} cells, {} failed\n",
                grid.record_id,
                grid.ip_axis.len(),
                grid.is_axis.len(),
                grid.failures()
            )
        }
        CommandKind::Tables => {
            let report = reproduce_performance_tables(&db, &opts, cfg.jobs)?;
            io::ensure_dir(dir)?;
            files.push(io::write_json_file(dir, "report.json", &report)?);
            let text = report.to_text();
            files.push(io::write_file(dir, "report.txt", |b| {
                b.extend_from_slice(text.as_bytes());
                Ok(())
            })?);
            if !report.all_pass() {
                exit_code = EXIT_TABLE_FAILURE;
            }
            text
        }
        CommandKind::Compare => {
            let cmp = compare_nuclear_vs_atomic(&db, &opts, cfg.jobs)?;
            io::ensure_dir(dir)?;
            files.push(io::write_file(dir, "comparison.csv", |b| io::write_comparison_csv(b, &cmp))?);
            files.push(io::write_json_file(dir, "comparison.json", &cmp)?);
            let mut m = String::new();
            for r in &cmp.rows {
                m.push_str(&format!(
                    "{:<6} {:>8} vs {:<4} energy ×10^{:.3}  power ×10^{:.3}\n",
                    r.element,
                    r.nuclear_id,
                    r.atomic_id,
                    r.energy_ratio.log10(),
                    r.power_ratio.log10()
                ));
            }
            m
        }
        CommandKind::Validate => {
            for rec in db.records() {
                rec.validate()?;
                build_schedule(rec, &cfg.overrides)?;
            }
            format!("{} records valid\n", db.len())
        }
    };
    Ok(Outcome { files, message, exit_code })
}
