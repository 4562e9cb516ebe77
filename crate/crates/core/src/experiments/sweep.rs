use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::scenario::{run_charging_scenario, RunOptions};
use super::with_pool;
use crate::error::{Error, Result};
use crate::nuclide_db::NuclideRecord;
use crate::pulse::ScheduleOverrides;

/// `n` points from `lo` to `hi`, log- or linearly spaced.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AxisSpec {
    pub lo: f64,
    pub hi: f64,
    pub n: usize,
    pub log: bool,
}

impl AxisSpec {
    pub fn log(lo: f64, hi: f64, n: usize) -> Self {
        AxisSpec { lo, hi, n, log: true }
    }

    pub fn points(&self) -> Result<Vec<f64>> {
        if self.n == 0 || !(self.lo > 0.0) || !(self.hi >= self.lo) || !self.hi.is_finite() {
            return Err(Error::Usage(format!(
                "intensity range needs 0 < lo ≤ hi and n ≥ 1 (got {}:{}:{})",
                self.lo, self.hi, self.n
            )));
        }
        if self.n == 1 {
            return Ok(vec![self.lo]);
        }
        let m = (self.n - 1) as f64;
        Ok((0..self.n)
            .map(|i| {
                let f = i as f64 / m;
                match (i, self.log) {
                    (0, _) => self.lo,
                    (i, _) if i == self.n - 1 => self.hi,
                    (_, true) => (self.lo.ln() + f * (self.hi / self.lo).ln()).exp(),
                    (_, false) => self.lo + f * (self.hi - self.lo),
                }
            })
            .collect())
    }
}

impl std::fmt::Display for AxisSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{:e}:{:e}:{}", self.lo, self.hi, self.n)?;
        if !self.log {
            f.write_str(":lin")?;
        }
        Ok(())
    }
}

impl std::str::FromStr for AxisSpec {
    type Err = Error;

    /// `lo:hi:n`, optionally followed by `:log` (default) or `:lin`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Usage(format!("bad range `{s}`; expected lo:hi:n[:lin|:log]"));
        let parts: Vec<&str> = s.split(':').collect();
        let log = match parts.get(3).copied() {
            None | Some("log") => true,
            Some("lin") => false,
            Some(_) => return Err(bad()),
        };
        if !(3..=4).contains(&parts.len()) {
            return Err(bad());
        }
        let lo = parts[0].trim().parse().map_err(|_| bad())?;
        let hi = parts[1].trim().parse().map_err(|_| bad())?;
        let n = parts[2].trim().parse().map_err(|_| bad())?;
        let spec = AxisSpec { lo, hi, n, log };
        spec.points()?;
        Ok(spec)
    }
}

impl Serialize for AxisSpec {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for AxisSpec {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

/// One sweep cell; failed cells keep the error text and no values.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepCell {
    pub ip: f64,
    pub is: f64,
    #[serde(rename = "E_eV")]
    pub e_sta: Option<f64>,
    #[serde(rename = "R")]
    pub ratio: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

/// Stored energy and extraction ratio over a pump × Stokes intensity grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepGrid {
    pub record_id: String,
    pub ip_axis: Vec<f64>,
    pub is_axis: Vec<f64>,
    /// Row-major: `cells[i * is_axis.len() + j]` holds (ip_axis[i], is_axis[j]).
    pub cells: Vec<SweepCell>,
}

impl SweepGrid {
    pub fn cell(&self, i: usize, j: usize) -> &SweepCell {
        &self.cells[i * self.is_axis.len() + j]
    }

    /// E_sta matrix indexed [pump][Stokes]; failed cells are `None`.
    pub fn e_cells(&self) -> Vec<Vec<Option<f64>>> {
        self.cells.chunks(self.is_axis.len()).map(|r| r.iter().map(|c| c.e_sta).collect()).collect()
    }

    pub fn r_cells(&self) -> Vec<Vec<Option<f64>>> {
        self.cells.chunks(self.is_axis.len()).map(|r| r.iter().map(|c| c.ratio).collect()).collect()
    }

    pub fn failures(&self) -> usize {
        self.cells.iter().filter(|c| c.error.is_some()).count()
    }
}

/// Runs one charging scenario per (I_p, I_s) pair. Cells run on a pool of
/// `jobs` workers (all cores when `None`) and are gathered in grid order.
pub fn robustness_sweep(
    record: &NuclideRecord,
    ip_axis: &[f64],
    is_axis: &[f64],
    base: &ScheduleOverrides,
    opts: &RunOptions,
    jobs: Option<usize>,
) -> Result<SweepGrid> {
    if !record.scheme.is_three_level() {
        return Err(Error::Scheme(format!("{} is two-level; the sweep needs pump and Stokes pulses", record.id)));
    }
    if ip_axis.is_empty() || is_axis.is_empty() {
        return Err(Error::Usage("sweep axes must be non-empty".into()));
    }
    if ip_axis.iter().chain(is_axis).any(|v| !(*v >= 0.0)) {
        return Err(Error::Usage("sweep intensities must be non-negative".into()));
    }
    let pairs: Vec<(f64, f64)> = ip_axis.iter().flat_map(|&ip| is_axis.iter().map(move |&is| (ip, is))).collect();
    let cells = with_pool(jobs, || {
        pairs
            .par_iter()
            .map(|&(ip, is)| {
                let o = ScheduleOverrides { pump_intensity: Some(ip), stokes_intensity: Some(is), ..base.clone() };
                match run_charging_scenario(record, &o, opts) {
                    Ok(run) => SweepCell {
                        ip,
                        is,
                        e_sta: Some(run.summary.e_sta),
                        ratio: Some(run.summary.r_final),
                        error: None,
                    },
                    Err(e) => SweepCell { ip, is, e_sta: None, ratio: None, error: Some(e.to_string()) },
                }
            })
            .collect()
    })?;
    Ok(SweepGrid { record_id: record.id.clone(), ip_axis: ip_axis.to_vec(), is_axis: is_axis.to_vec(), cells })
}
