use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::units::s_to_ps;

/// Level configuration of a battery cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Scheme {
    TwoLevel,
    /// Intermediate level above the storage level.
    Lambda,
    /// Intermediate level below the storage level.
    Ladder,
    /// Ladder-type atomic reference cell, driven without Doppler boost and without decay.
    AtomicLadder,
}

impl Scheme {
    pub fn dim(self) -> usize {
        match self {
            Scheme::TwoLevel => 2,
            _ => 3,
        }
    }

    pub fn is_three_level(self) -> bool {
        self.dim() == 3
    }

    pub fn is_nuclear(self) -> bool {
        self != Scheme::AtomicLadder
    }

    /// Number of laser-driven transitions (pump, and Stokes for three-level schemes).
    pub fn n_transitions(self) -> usize {
        self.dim() - 1
    }

    /// Index of the storage (target) level.
    pub fn target_level(self) -> usize {
        self.dim() - 1
    }

    /// Section key in the database file.
    pub fn section(self) -> &'static str {
        match self {
            Scheme::TwoLevel => "two_level",
            Scheme::Lambda => "lambda",
            Scheme::Ladder => "ladder",
            Scheme::AtomicLadder => "atomic",
        }
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "TwoLevel" | "two_level" => Ok(Scheme::TwoLevel),
            "Lambda" | "lambda" => Ok(Scheme::Lambda),
            "Ladder" | "ladder" => Ok(Scheme::Ladder),
            "AtomicLadder" | "atomic" => Ok(Scheme::AtomicLadder),
            other => Err(Error::Parse(format!("unknown scheme `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TransitionKind {
    Electric,
    Magnetic,
}

/// Multipolarity of a transition, written `E2`, `M4`, ...
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Multipolarity {
    pub kind: TransitionKind,
    pub order: u32,
}

impl fmt::Display for Multipolarity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let k = match self.kind {
            TransitionKind::Electric => 'E',
            TransitionKind::Magnetic => 'M',
        };
        write!(f, "{k}{}", self.order)
    }
}

impl FromStr for Multipolarity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let mut chars = s.chars();
        let kind = match chars.next() {
            Some('E') => TransitionKind::Electric,
            Some('M') => TransitionKind::Magnetic,
            _ => return Err(Error::Parse(format!("bad multipolarity `{s}`"))),
        };
        let order = chars
            .as_str()
            .parse::<u32>()
            .map_err(|_| Error::Parse(format!("bad multipolarity order in `{s}`")))?;
        Ok(Multipolarity { kind, order })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Parity {
    Positive,
    Negative,
}

/// Level spin and parity, written `11/2-`, `0+`, ...
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Spin {
    /// Twice the angular momentum, so half-integer spins stay exact.
    pub twice_j: u32,
    pub parity: Parity,
}

impl Spin {
    pub fn j(&self) -> f64 {
        f64::from(self.twice_j) / 2.0
    }
}

impl fmt::Display for Spin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let p = match self.parity {
            Parity::Positive => '+',
            Parity::Negative => '-',
        };
        if self.twice_j.is_multiple_of(2) {
            write!(f, "{}{p}", self.twice_j / 2)
        } else {
            write!(f, "{}/2{p}", self.twice_j)
        }
    }
}

impl FromStr for Spin {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::Parse(format!("bad spin-parity `{s}`"));
        let (body, parity) = if let Some(b) = s.strip_suffix('+') {
            (b, Parity::Positive)
        } else if let Some(b) = s.strip_suffix('-') {
            (b, Parity::Negative)
        } else {
            return Err(bad());
        };
        let twice_j = match body.split_once('/') {
            Some((num, "2")) => num.parse::<u32>().map_err(|_| bad())?,
            Some(_) => return Err(bad()),
            None => 2 * body.parse::<u32>().map_err(|_| bad())?,
        };
        Ok(Spin { twice_j, parity })
    }
}

macro_rules! string_serde {
    ($t:ty) => {
        impl Serialize for $t {
            fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
                s.collect_str(self)
            }
        }

        impl<'de> Deserialize<'de> for $t {
            fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
                let s = String::deserialize(d)?;
                s.parse().map_err(serde::de::Error::custom)
            }
        }
    };
}

string_serde!(Multipolarity);
string_serde!(Spin);

/// Performance values reported alongside the parameter tables, kept for
/// comparison only.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReportedMetrics {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega_max: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub area: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_sta_ps: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_total_ps: Option<f64>,
    #[serde(rename = "E_sta_eV", default, skip_serializing_if = "Option::is_none")]
    pub e_sta_ev: Option<f64>,
    #[serde(rename = "E_max_eV", default, skip_serializing_if = "Option::is_none")]
    pub e_max_ev: Option<f64>,
    #[serde(rename = "P_max_W", default, skip_serializing_if = "Option::is_none")]
    pub p_max_w: Option<f64>,
    #[serde(rename = "W_sta_eV", default, skip_serializing_if = "Option::is_none")]
    pub w_sta_ev: Option<f64>,
    #[serde(rename = "W_max_eV", default, skip_serializing_if = "Option::is_none")]
    pub w_max_ev: Option<f64>,
}

/// One battery cell's parameter set.
///
/// Per-transition vectors are ordered pump (1→2) then Stokes (2→3).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NuclideRecord {
    #[serde(skip)]
    pub id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mass_number: Option<u32>,
    pub scheme: Scheme,
    /// Level energies in eV, ground first.
    pub level_energies: Vec<f64>,
    /// Half-life per level in seconds; `None` marks a stable or unmodelled level.
    #[serde(default)]
    pub half_lives: Vec<Option<f64>>,
    /// (B21, B23) branching of the intermediate level.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub branching: Option<(f64, f64)>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub multipolarities: Vec<Multipolarity>,
    /// Reduced transition probabilities in Weisskopf units.
    #[serde(rename = "reduced_B", default, skip_serializing_if = "Vec::is_empty")]
    pub reduced_b: Vec<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub spins: Vec<Spin>,
    /// Rabi coefficient in s⁻¹·(W/cm²)^(-1/2).
    pub omega0: Vec<f64>,
    /// Effective peak intensity in W/cm².
    pub peak_intensity: Vec<f64>,
    /// (τ_p, τ_s) in seconds. Empty for two-level records.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub pulse_centers: Vec<f64>,
    /// Pulse duration T in seconds.
    pub pulse_duration: f64,
    /// Lab-frame photon energy per driven transition, eV.
    pub photon_energy: Vec<f64>,
    /// Evolution horizon in seconds.
    pub t_total: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reported: Option<ReportedMetrics>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub notes: Option<String>,
}

/// Spontaneous decay of the intermediate (three-level) or excited (two-level) state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayModel {
    /// Decay rate Γ of |2⟩ in s⁻¹.
    pub gamma: f64,
    pub branching: Option<(f64, f64)>,
}

impl DecayModel {
    pub fn none() -> Self {
        DecayModel { gamma: 0.0, branching: None }
    }

    /// Fraction of |2⟩ decays leaving the modelled subspace.
    pub fn leak_fraction(&self) -> f64 {
        match self.branching {
            Some((b21, b23)) => (1.0 - b21 - b23).max(0.0),
            None => 0.0,
        }
    }
}

impl NuclideRecord {
    pub fn dim(&self) -> usize {
        self.scheme.dim()
    }

    /// Element symbol, with any leading mass number stripped (`"154Gd"` → `"Gd"`).
    pub fn element(&self) -> &str {
        self.id.trim_start_matches(|c: char| c.is_ascii_digit())
    }

    pub fn t_total_ps(&self) -> f64 {
        s_to_ps(self.t_total)
    }

    pub fn pulse_duration_ps(&self) -> f64 {
        s_to_ps(self.pulse_duration)
    }

    /// (τ_p, τ_s) in ps when tabulated.
    pub fn pulse_centers_ps(&self) -> Option<(f64, f64)> {
        match self.pulse_centers.as_slice() {
            [p, s] => Some((s_to_ps(*p), s_to_ps(*s))),
            _ => None,
        }
    }

    /// Energy gap of driven transition `k` (0: 1↔2, 1: 2↔3) in eV.
    pub fn transition_energy(&self, k: usize) -> f64 {
        (self.level_energies[k + 1] - self.level_energies[k]).abs()
    }

    pub fn max_level_energy(&self) -> f64 {
        self.level_energies.iter().copied().fold(0.0, f64::max)
    }

    pub fn target_energy(&self) -> f64 {
        self.level_energies[self.scheme.target_level()]
    }

    pub fn decay_model(&self) -> Result<DecayModel> {
        let half_life = self.half_lives.get(1).copied().flatten();
        let gamma = super::linewidth_from_half_life(half_life)?;
        Ok(DecayModel { gamma, branching: self.branching })
    }

    /// Checks every record invariant; errors name the record and the rule.
    pub fn validate(&self) -> Result<()> {
        let id = self.id.as_str();
        let fail = |rule: String| Err(Error::invariant(id, rule));
        let dim = self.dim();
        let nt = self.scheme.n_transitions();
        let nuclear = self.scheme.is_nuclear();

        if self.level_energies.len() != dim {
            return fail(format!("expected {dim} level energies, found {}", self.level_energies.len()));
        }
        if !self.half_lives.is_empty() && self.half_lives.len() != dim {
            return fail(format!("expected {dim} half-lives, found {}", self.half_lives.len()));
        }
        for (name, v) in [
            ("omega0", &self.omega0),
            ("peak_intensity", &self.peak_intensity),
            ("photon_energy", &self.photon_energy),
        ] {
            if v.len() != nt {
                return fail(format!("expected {nt} `{name}` values, found {}", v.len()));
            }
        }
        if nuclear {
            if self.multipolarities.len() != nt || self.reduced_b.len() != nt {
                return fail(format!("expected {nt} multipolarities and reduced_B values"));
            }
            if self.spins.len() != dim {
                return fail(format!("expected {dim} spins, found {}", self.spins.len()));
            }
            if self.mass_number.unwrap_or(0) == 0 {
                return fail("mass_number must be ≥ 1".into());
            }
        }

        let e = &self.level_energies;
        if e[0] != 0.0 {
            return fail(format!("ground energy must be 0, found {}", e[0]));
        }
        let order_ok = match self.scheme {
            Scheme::TwoLevel => e[1] > e[0],
            Scheme::Lambda => e[1] > e[2] && e[2] > e[0],
            Scheme::Ladder => e[2] > e[1] && e[1] > e[0],
            Scheme::AtomicLadder => e[2] >= e[1] && e[1] > e[0],
        };
        if !order_ok {
            return fail(format!("level ordering violated for {:?} scheme: {:?}", self.scheme, e));
        }

        for (i, h) in self.half_lives.iter().enumerate() {
            if let Some(h) = h {
                if !(*h > 0.0) {
                    return fail(format!("half-life of level {} must be positive", i + 1));
                }
            }
        }
        let positive = |name: &str, v: f64| -> Result<()> {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::invariant(id, format!("`{name}` must be strictly positive, found {v}")))
            }
        };
        for &v in &self.omega0 {
            positive("omega0", v)?;
        }
        for &v in &self.peak_intensity {
            positive("peak_intensity", v)?;
        }
        positive("pulse_duration", self.pulse_duration)?;
        positive("t_total", self.t_total)?;
        for &v in &self.photon_energy {
            if nuclear {
                positive("photon_energy", v)?;
            } else if !(v >= 0.0) {
                return fail("`photon_energy` must be non-negative".into());
            }
        }
        for m in &self.multipolarities {
            if m.order < 1 {
                return fail(format!("multipolarity order must be ≥ 1, found {m}"));
            }
        }
        for &b in &self.reduced_b {
            positive("reduced_B", b)?;
        }

        match (self.scheme, self.branching) {
            (Scheme::Lambda, None) => return fail("Λ scheme requires branching (B21, B23)".into()),
            (_, Some((b21, b23))) => {
                if self.scheme == Scheme::TwoLevel {
                    return fail("two-level records carry no branching".into());
                }
                if b21 < 0.0 || b23 < 0.0 {
                    return fail(format!("branching ratios must be non-negative: ({b21}, {b23})"));
                }
                if b21 + b23 > 1.0 + 1e-6 {
                    return fail(format!("B21 + B23 = {} exceeds 1", b21 + b23));
                }
            }
            _ => {}
        }

        if self.scheme.is_three_level() {
            match self.pulse_centers.as_slice() {
                [tp, ts] => {
                    if !(ts < tp) {
                        return fail(format!(
                            "STIRAP requires τ_s < τ_p (counterintuitive order), found τ_p = {tp}, τ_s = {ts}"
                        ));
                    }
                    if *ts < 0.0 {
                        return fail("pulse centers must be non-negative".into());
                    }
                }
                _ => return fail("three-level records need pulse_centers [τ_p, τ_s]".into()),
            }
        } else if self.pulse_centers.len() > 1 {
            return fail("two-level records take at most one pulse center".into());
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spin_parse_roundtrip() {
        for s in ["3/2+", "11/2-", "0+", "8+", "1-"] {
            let spin: Spin = s.parse().unwrap();
            assert_eq!(spin.to_string(), s);
        }
        assert_eq!("11/2-".parse::<Spin>().unwrap().j(), 5.5);
        assert!("3/4+".parse::<Spin>().is_err());
        assert!("3/2".parse::<Spin>().is_err());
    }

    #[test]
    fn multipolarity_parse() {
        let m: Multipolarity = "M4".parse().unwrap();
        assert_eq!(m.kind, TransitionKind::Magnetic);
        assert_eq!(m.order, 4);
        assert_eq!(m.to_string(), "M4");
        assert!("X2".parse::<Multipolarity>().is_err());
        assert!("E".parse::<Multipolarity>().is_err());
    }

    #[test]
    fn element_strips_mass_number() {
        let db = crate::nuclide_db::NuclideDb::bundled().unwrap();
        assert_eq!(db.get("154Gd").unwrap().element(), "Gd");
        assert_eq!(db.get("Pt").unwrap().element(), "Pt");
    }
}
