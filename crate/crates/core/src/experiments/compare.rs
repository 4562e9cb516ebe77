use std::collections::HashMap;

use rayon::prelude::*;
use serde::Serialize;

use super::scenario::{run_charging_scenario, ChargingSummary, RunOptions};
use super::with_pool;
use crate::error::Result;
use crate::nuclide_db::{NuclideDb, NuclideRecord, Scheme};
use crate::pulse::ScheduleOverrides;

/// One nuclear cell against the atomic cell of the same element.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonRow {
    pub element: String,
    pub z: Option<u32>,
    pub nuclear_id: String,
    pub atomic_id: String,
    #[serde(rename = "E_nuclear_eV")]
    pub e_nuclear: f64,
    #[serde(rename = "E_atomic_eV")]
    pub e_atomic: f64,
    pub energy_ratio: f64,
    #[serde(rename = "P_nuclear_W")]
    pub p_nuclear: f64,
    #[serde(rename = "P_atomic_W")]
    pub p_atomic: f64,
    pub power_ratio: f64,
    /// Half-life of the storage level, s (`None` when stable or unknown).
    pub lifetime_s: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Comparison {
    pub rows: Vec<ComparisonRow>,
    /// Records left out, with the reason.
    pub skipped: Vec<String>,
}

impl Comparison {
    fn extreme(&self, key: impl Fn(&ComparisonRow) -> f64, max: bool) -> Option<&ComparisonRow> {
        let cmp = |a: &&ComparisonRow, b: &&ComparisonRow| key(a).total_cmp(&key(b));
        if max {
            self.rows.iter().max_by(cmp)
        } else {
            self.rows.iter().min_by(cmp)
        }
    }

    pub fn min_energy_ratio(&self) -> Option<&ComparisonRow> {
        self.extreme(|r| r.energy_ratio, false)
    }

    pub fn max_energy_ratio(&self) -> Option<&ComparisonRow> {
        self.extreme(|r| r.energy_ratio, true)
    }

    pub fn min_power_ratio(&self) -> Option<&ComparisonRow> {
        self.extreme(|r| r.power_ratio, false)
    }

    pub fn max_power_ratio(&self) -> Option<&ComparisonRow> {
        self.extreme(|r| r.power_ratio, true)
    }
}

pub fn atomic_number(symbol: &str) -> Option<u32> {
    Some(match symbol {
        "Ni" => 28,
        "Nb" => 41,
        "Rh" => 45,
        "Ag" => 47,
        "Cd" => 48,
        "Sn" => 50,
        "Te" => 52,
        "Xe" => 54,
        "Pr" => 59,
        "Eu" => 63,
        "Gd" => 64,
        "Re" => 75,
        "Os" => 76,
        "Ir" => 77,
        "Pt" => 78,
        "Th" => 90,
        _ => return None,
    })
}

/// Pairs three-level nuclear cells with atomic cells of the same element,
/// using already computed summaries.
pub fn compare_from_summaries(db: &NuclideDb, summaries: &HashMap<String, ChargingSummary>) -> Comparison {
    let atomic: HashMap<&str, &NuclideRecord> =
        db.section(Scheme::AtomicLadder).map(|r| (r.element(), r)).collect();
    let mut rows = Vec::new();
    let mut skipped = Vec::new();
    for rec in db.records().filter(|r| r.scheme.is_nuclear()) {
        if !rec.scheme.is_three_level() {
            skipped.push(format!("{}: two-level cell, the atomic references are three-level", rec.id));
            continue;
        }
        let Some(at) = atomic.get(rec.element()) else {
            skipped.push(format!("{}: no atomic entry for {}", rec.id, rec.element()));
            continue;
        };
        let (Some(n), Some(a)) = (summaries.get(&rec.id), summaries.get(&at.id)) else {
            skipped.push(format!("{}: simulation missing", rec.id));
            continue;
        };
        rows.push(ComparisonRow {
            element: rec.element().to_string(),
            z: atomic_number(rec.element()),
            nuclear_id: rec.id.clone(),
            atomic_id: at.id.clone(),
            e_nuclear: n.e_sta,
            e_atomic: a.e_sta,
            energy_ratio: n.e_sta / a.e_sta,
            p_nuclear: n.p_max,
            p_atomic: a.p_max,
            power_ratio: n.p_max / a.p_max,
            lifetime_s: rec.half_lives.get(rec.scheme.target_level()).copied().flatten(),
        });
    }
    Comparison { rows, skipped }
}

/// Simulates every three-level nuclear and atomic cell and forms the ratios.
pub fn compare_nuclear_vs_atomic(db: &NuclideDb, opts: &RunOptions, jobs: Option<usize>) -> Result<Comparison> {
    let records: Vec<&NuclideRecord> = db.records().filter(|r| r.scheme.is_three_level()).collect();
    let results: Vec<(String, Option<ChargingSummary>)> = with_pool(jobs, || {
        records
            .par_iter()
            .map(|r| {
                let s = run_charging_scenario(r, &ScheduleOverrides::default(), opts).ok().map(|run| run.summary);
                (r.id.clone(), s)
            })
            .collect()
    })?;
    let summaries = results.into_iter().filter_map(|(id, s)| s.map(|s| (id, s))).collect();
    Ok(compare_from_summaries(db, &summaries))
}
