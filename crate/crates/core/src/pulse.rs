//! Laser pulse schedules: resonance kinematics, Gaussian Rabi envelopes,
//! pulse areas and counterintuitive STIRAP sequencing.

use std::f64::consts::{PI, SQRT_2};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::nuclide_db::{NuclideRecord, Scheme};
use crate::units::ps_to_s;

/// Two-level records carry no tabulated pulse center; the pump is placed at
/// this fraction of the evolution window.
pub const TWO_LEVEL_CENTER_FRACTION: f64 = 0.6;

/// Half-width, in envelope standard deviations, that the window should cover.
const SUPPORT_SIGMAS: f64 = 5.0;

/// Relativistic kinematics of a nucleus moving toward the laser.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Kinematics {
    pub beta: f64,
    pub gamma: f64,
    /// x = γ(1 + β).
    pub doppler: f64,
}

impl Kinematics {
    pub fn at_rest() -> Self {
        Kinematics { beta: 0.0, gamma: 1.0, doppler: 1.0 }
    }

    pub fn from_doppler(x: f64) -> Self {
        let x2 = x * x;
        Kinematics { beta: (x2 - 1.0) / (x2 + 1.0), gamma: 0.5 * (x + 1.0 / x), doppler: x }
    }
}

/// Nucleus velocity needed for a lab-frame photon to hit a transition on
/// resonance: ΔE = γ(1+β)ħω.
pub fn solve_resonance(transition_energy: f64, photon_energy: f64) -> Result<Kinematics> {
    if !(transition_energy > 0.0 && photon_energy > 0.0) {
        return Err(Error::Domain(format!(
            "energies must be positive (transition {transition_energy} eV, photon {photon_energy} eV)"
        )));
    }
    if transition_energy < photon_energy {
        return Err(Error::Domain(format!(
            "transition energy {transition_energy} eV below photon energy {photon_energy} eV needs a receding nucleus"
        )));
    }
    Ok(Kinematics::from_doppler(transition_energy / photon_energy))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PulseRole {
    Pump,
    Stokes,
}

/// One Gaussian drive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PulseSpec {
    /// s⁻¹·(W/cm²)^(-1/2)
    pub omega0: f64,
    /// Effective peak intensity, W/cm².
    pub intensity: f64,
    pub center_ps: f64,
    pub duration_ps: f64,
    pub doppler: f64,
    pub role: PulseRole,
}

impl PulseSpec {
    /// Ω_max = Ω₀√I in s⁻¹.
    pub fn peak_rabi(&self) -> f64 {
        self.omega0 * self.intensity.sqrt()
    }

    /// Standard deviation of the envelope in ps, T/x.
    pub fn sigma_ps(&self) -> f64 {
        self.duration_ps / self.doppler
    }
}

/// Rabi frequency (s⁻¹) of `p` at time `t_ps`.
pub fn rabi_envelope(p: &PulseSpec, t_ps: f64) -> f64 {
    let u = p.doppler * (t_ps - p.center_ps) / (SQRT_2 * p.duration_ps);
    p.peak_rabi() * (-u * u).exp()
}

/// ∫Ω dt over the whole real line, closed form Ω₀√I·√(2π)·T/x.
pub fn pulse_area(p: &PulseSpec) -> f64 {
    p.peak_rabi() * (2.0 * PI).sqrt() * ps_to_s(p.duration_ps) / p.doppler
}

/// Intensity (W/cm²) giving a pulse area of exactly π.
pub fn calibrate_pi_pulse(omega0: f64, duration_ps: f64, doppler: f64) -> Result<f64> {
    if !(omega0 > 0.0 && duration_ps > 0.0 && doppler > 0.0) {
        return Err(Error::Domain(format!(
            "π-pulse calibration needs positive inputs (Ω₀ = {omega0}, T = {duration_ps} ps, x = {doppler})"
        )));
    }
    let sqrt_i = PI * doppler / (omega0 * (2.0 * PI).sqrt() * ps_to_s(duration_ps));
    Ok(sqrt_i * sqrt_i)
}

/// Optional replacements for the tabulated laser settings.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScheduleOverrides {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pump_intensity: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stokes_intensity: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pump_center_ps: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stokes_center_ps: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub duration_ps: Option<f64>,
}

impl ScheduleOverrides {
    pub fn is_empty(&self) -> bool {
        *self == ScheduleOverrides::default()
    }

    fn check(&self) -> Result<()> {
        let fields = [
            ("pump_intensity", self.pump_intensity),
            ("stokes_intensity", self.stokes_intensity),
            ("pump_center_ps", self.pump_center_ps),
            ("stokes_center_ps", self.stokes_center_ps),
        ];
        for (name, v) in fields {
            if let Some(v) = v {
                if !(v >= 0.0 && v.is_finite()) {
                    return Err(Error::Schedule(format!("override `{name}` must be non-negative, got {v}")));
                }
            }
        }
        if let Some(d) = self.duration_ps {
            if !(d > 0.0 && d.is_finite()) {
                return Err(Error::Schedule(format!("override `duration_ps` must be positive, got {d}")));
            }
        }
        Ok(())
    }

    /// Folds `other` on top of `self`; values present in `other` win.
    pub fn merged_with(&self, other: &ScheduleOverrides) -> ScheduleOverrides {
        ScheduleOverrides {
            pump_intensity: other.pump_intensity.or(self.pump_intensity),
            stokes_intensity: other.stokes_intensity.or(self.stokes_intensity),
            pump_center_ps: other.pump_center_ps.or(self.pump_center_ps),
            stokes_center_ps: other.stokes_center_ps.or(self.stokes_center_ps),
            duration_ps: other.duration_ps.or(self.duration_ps),
        }
    }
}

/// Pump (and for three-level schemes, Stokes) pulses over an evolution window.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Schedule {
    pub pump: PulseSpec,
    pub stokes: Option<PulseSpec>,
    pub t_total_ps: f64,
    /// Non-fatal notes, e.g. when the window clips an envelope.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

impl Schedule {
    pub fn new(pump: PulseSpec, stokes: Option<PulseSpec>, t_total_ps: f64) -> Result<Self> {
        if !(t_total_ps > 0.0) {
            return Err(Error::Schedule(format!("t_total must be positive, got {t_total_ps} ps")));
        }
        if let Some(s) = &stokes {
            if !(s.center_ps < pump.center_ps) {
                return Err(Error::Schedule(format!(
                    "counterintuitive ordering violated: Stokes at {} ps is not before pump at {} ps",
                    s.center_ps, pump.center_ps
                )));
            }
        }
        let mut warnings = Vec::new();
        for p in std::iter::once(&pump).chain(stokes.as_ref()) {
            let half = SUPPORT_SIGMAS * p.sigma_ps();
            if p.center_ps - half < 0.0 || p.center_ps + half > t_total_ps {
                warnings.push(format!(
                    "{:?} envelope ({:.4} ± {:.4} ps at 5σ) is truncated by the window [0, {}] ps",
                    p.role, p.center_ps, half, t_total_ps
                ));
            }
        }
        Ok(Schedule { pump, stokes, t_total_ps, warnings })
    }

    /// (Ω_p, Ω_s) in s⁻¹ at `t_ps`.
    pub fn rabi_at(&self, t_ps: f64) -> (f64, f64) {
        (
            rabi_envelope(&self.pump, t_ps),
            self.stokes.as_ref().map_or(0.0, |s| rabi_envelope(s, t_ps)),
        )
    }

    /// Narrowest envelope width in ps.
    pub fn min_sigma_ps(&self) -> f64 {
        std::iter::once(&self.pump)
            .chain(self.stokes.as_ref())
            .map(PulseSpec::sigma_ps)
            .fold(f64::INFINITY, f64::min)
    }
}

/// Builds the laser schedule for a record from its tabulated settings.
pub fn build_schedule(record: &NuclideRecord, overrides: &ScheduleOverrides) -> Result<Schedule> {
    overrides.check()?;
    let t_total = record.t_total_ps();
    let duration = overrides.duration_ps.unwrap_or_else(|| record.pulse_duration_ps());

    let doppler = |k: usize| -> Result<f64> {
        match record.scheme {
            Scheme::AtomicLadder => Ok(1.0),
            _ => Ok(solve_resonance(record.transition_energy(k), record.photon_energy[k])?.doppler),
        }
    };

    let (pump_center, stokes_center) = match record.pulse_centers_ps() {
        Some((p, s)) => (p, Some(s)),
        None => {
            let p = record
                .pulse_centers
                .first()
                .map(|&c| crate::units::s_to_ps(c))
                .unwrap_or(TWO_LEVEL_CENTER_FRACTION * t_total);
            (p, None)
        }
    };

    let pump = PulseSpec {
        omega0: record.omega0[0],
        intensity: overrides.pump_intensity.unwrap_or(record.peak_intensity[0]),
        center_ps: overrides.pump_center_ps.unwrap_or(pump_center),
        duration_ps: duration,
        doppler: doppler(0)?,
        role: PulseRole::Pump,
    };

    let stokes = if record.scheme.is_three_level() {
        let center = overrides
            .stokes_center_ps
            .or(stokes_center)
            .ok_or_else(|| Error::Schedule(format!("{}: no Stokes pulse center", record.id)))?;
        Some(PulseSpec {
            omega0: record.omega0[1],
            intensity: overrides.stokes_intensity.unwrap_or(record.peak_intensity[1]),
            center_ps: center,
            duration_ps: duration,
            doppler: doppler(1)?,
            role: PulseRole::Stokes,
        })
    } else {
        if overrides.stokes_intensity.is_some() || overrides.stokes_center_ps.is_some() {
            return Err(Error::Schedule(format!("{}: two-level record has no Stokes pulse", record.id)));
        }
        None
    };

    Schedule::new(pump, stokes, t_total)
}
