use std::fs::File;
use std::io::{BufReader, Read};
use std::path::Path;

use indexmap::IndexMap;
use serde::Serialize;
use serde_json::Value;

use super::types::{NuclideRecord, Scheme};
use crate::error::{Error, Result};

/// The bundled parameter tables.
pub const BUNDLED_JSON: &str = include_str!("../../data/nuclides.json");

/// Environment variable overriding the bundled database path.
pub const DB_ENV_VAR: &str = "NIQB_DB";

const SECTIONS: [Scheme; 4] = [Scheme::TwoLevel, Scheme::Lambda, Scheme::Ladder, Scheme::AtomicLadder];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TableFormat {
    Json,
    Csv,
}

impl TableFormat {
    pub fn from_path(path: &Path) -> TableFormat {
        match path.extension().and_then(|e| e.to_str()) {
            Some(e) if e.eq_ignore_ascii_case("csv") => TableFormat::Csv,
            _ => TableFormat::Json,
        }
    }
}

/// Parses and validates a nuclide table.
pub fn load_nuclide_table<R: Read>(mut source: R, format: TableFormat) -> Result<Vec<NuclideRecord>> {
    let mut text = String::new();
    source
        .read_to_string(&mut text)
        .map_err(|e| Error::Parse(format!("unreadable input: {e}")))?;
    if text.trim().is_empty() {
        return Err(Error::Parse("empty input".into()));
    }
    let records = match format {
        TableFormat::Json => parse_json(&text)?,
        TableFormat::Csv => parse_csv(&text)?,
    };
    for r in &records {
        r.validate()?;
    }
    Ok(records)
}

fn required_fields(scheme: Scheme) -> Vec<&'static str> {
    let mut f = vec!["level_energies", "omega0", "peak_intensity", "pulse_duration", "photon_energy", "t_total"];
    if scheme.is_nuclear() {
        f.extend(["mass_number", "half_lives", "multipolarities", "reduced_B", "spins"]);
    }
    if scheme.is_three_level() {
        f.push("pulse_centers");
    }
    if scheme == Scheme::Lambda {
        f.push("branching");
    }
    f
}

fn parse_json(text: &str) -> Result<Vec<NuclideRecord>> {
    let root: Value = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    let root = root
        .as_object()
        .ok_or_else(|| Error::Parse("top level must be an object".into()))?;
    if let Some(k) = root.keys().find(|k| !SECTIONS.iter().any(|s| s.section() == k.as_str())) {
        return Err(Error::Parse(format!("unknown section `{k}`")));
    }
    let mut out = Vec::new();
    for scheme in SECTIONS {
        let Some(section) = root.get(scheme.section()) else { continue };
        let section = section
            .as_object()
            .ok_or_else(|| Error::Parse(format!("section `{}` must be an object", scheme.section())))?;
        for (id, entry) in section {
            let obj = entry
                .as_object()
                .ok_or_else(|| Error::schema(id.as_str(), "<record>"))?;
            if !obj.contains_key("scheme") {
                return Err(Error::schema(id.as_str(), "scheme"));
            }
            let declared: Scheme = obj["scheme"]
                .as_str()
                .ok_or_else(|| Error::schema(id.as_str(), "scheme"))?
                .parse()?;
            if declared != scheme {
                return Err(Error::invariant(
                    id.as_str(),
                    format!("scheme {declared:?} listed under section `{}`", scheme.section()),
                ));
            }
            for field in required_fields(scheme) {
                if obj.get(field).is_none_or(Value::is_null) {
                    return Err(Error::schema(id.as_str(), field));
                }
            }
            let mut record: NuclideRecord =
                serde_json::from_value(entry.clone()).map_err(|e| schema_from_serde(id, &e))?;
            record.id = id.clone();
            out.push(record);
        }
    }
    Ok(out)
}

fn schema_from_serde(id: &str, e: &serde_json::Error) -> Error {
    let msg = e.to_string();
    let field = msg
        .split('`')
        .nth(1)
        .filter(|_| msg.starts_with("missing field") || msg.starts_with("unknown field"))
        .map(str::to_owned)
        .unwrap_or(msg);
    Error::schema(id, field)
}

fn parse_csv(text: &str) -> Result<Vec<NuclideRecord>> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text.as_bytes());
    let headers = rdr.headers().map_err(|e| Error::Parse(e.to_string()))?.clone();
    let col = |name: &str| headers.iter().position(|h| h == name);
    for needed in ["id", "scheme"] {
        if col(needed).is_none() {
            return Err(Error::schema("<header>", needed));
        }
    }
    let mut out = Vec::new();
    for row in rdr.records() {
        let row = row.map_err(|e| Error::Parse(e.to_string()))?;
        let cell = |name: &str| col(name).and_then(|i| row.get(i)).filter(|s| !s.is_empty());
        let id = cell("id").ok_or_else(|| Error::schema("<row>", "id"))?.to_string();
        let scheme: Scheme = cell("scheme").ok_or_else(|| Error::schema(id.as_str(), "scheme"))?.parse()?;
        let required = required_fields(scheme);
        let field = |name: &str| -> Result<Option<&str>> {
            match cell(name) {
                None if required.contains(&name) => Err(Error::schema(id.as_str(), name)),
                c => Ok(c),
            }
        };
        let floats = |name: &str| -> Result<Vec<f64>> {
            match field(name)? {
                None => Ok(Vec::new()),
                Some(s) => s.split(';').map(|t| parse_f64(&id, name, t)).collect(),
            }
        };
        let scalar = |name: &str| -> Result<f64> {
            parse_f64(&id, name, field(name)?.unwrap_or_default())
        };
        let half_lives = match field("half_lives")? {
            None => Vec::new(),
            Some(s) => s
                .split(';')
                .map(|t| {
                    let t = t.trim();
                    if t.is_empty() || t == "stable" {
                        Ok(None)
                    } else {
                        parse_f64(&id, "half_lives", t).map(Some)
                    }
                })
                .collect::<Result<_>>()?,
        };
        let branching = match floats("branching")?.as_slice() {
            [] => None,
            [a, b] => Some((*a, *b)),
            _ => return Err(Error::schema(id.as_str(), "branching")),
        };
        let parsed_list = |name: &str| -> Result<Vec<String>> {
            Ok(field(name)?
                .map(|s| s.split(';').map(|t| t.trim().to_string()).collect())
                .unwrap_or_default())
        };
        let multipolarities = parsed_list("multipolarities")?
            .iter()
            .map(|s| s.parse())
            .collect::<Result<_>>()
            .map_err(|_| Error::schema(id.as_str(), "multipolarities"))?;
        let spins = parsed_list("spins")?
            .iter()
            .map(|s| s.parse())
            .collect::<Result<_>>()
            .map_err(|_| Error::schema(id.as_str(), "spins"))?;
        let mass_number = match field("mass_number")? {
            None => None,
            Some(s) => Some(s.parse::<u32>().map_err(|_| Error::schema(id.as_str(), "mass_number"))?),
        };
        out.push(NuclideRecord {
            mass_number,
            scheme,
            level_energies: floats("level_energies")?,
            half_lives,
            branching,
            multipolarities,
            reduced_b: floats("reduced_B")?,
            spins,
            omega0: floats("omega0")?,
            peak_intensity: floats("peak_intensity")?,
            pulse_centers: floats("pulse_centers")?,
            pulse_duration: scalar("pulse_duration")?,
            photon_energy: floats("photon_energy")?,
            t_total: scalar("t_total")?,
            reported: None,
            notes: None,
            id,
        });
    }
    Ok(out)
}

fn parse_f64(id: &str, field: &str, s: &str) -> Result<f64> {
    s.trim().parse::<f64>().map_err(|_| Error::schema(id, field))
}

/// Validated collection of records, grouped by scheme in file order.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct NuclideDb {
    two_level: IndexMap<String, NuclideRecord>,
    lambda: IndexMap<String, NuclideRecord>,
    ladder: IndexMap<String, NuclideRecord>,
    atomic: IndexMap<String, NuclideRecord>,
}

impl NuclideDb {
    pub fn bundled() -> Result<Self> {
        Self::from_reader(BUNDLED_JSON.as_bytes(), TableFormat::Json)
    }

    pub fn from_reader<R: Read>(source: R, format: TableFormat) -> Result<Self> {
        Self::from_records(load_nuclide_table(source, format)?)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let file = File::open(path).map_err(|e| Error::io(path, e))?;
        Self::from_reader(BufReader::new(file), TableFormat::from_path(path))
    }

    /// Explicit path, else `$NIQB_DB`, else the bundled tables.
    pub fn resolve(path: Option<&Path>) -> Result<Self> {
        if let Some(p) = path {
            return Self::from_path(p);
        }
        match std::env::var_os(DB_ENV_VAR) {
            Some(p) if !p.is_empty() => Self::from_path(Path::new(&p)),
            _ => Self::bundled(),
        }
    }

    pub fn from_records(records: Vec<NuclideRecord>) -> Result<Self> {
        let mut db = NuclideDb::default();
        for r in records {
            if db.get(&r.id).is_some() {
                return Err(Error::invariant(r.id.as_str(), "duplicate record id"));
            }
            db.section_mut(r.scheme).insert(r.id.clone(), r);
        }
        Ok(db)
    }

    fn section_mut(&mut self, scheme: Scheme) -> &mut IndexMap<String, NuclideRecord> {
        match scheme {
            Scheme::TwoLevel => &mut self.two_level,
            Scheme::Lambda => &mut self.lambda,
            Scheme::Ladder => &mut self.ladder,
            Scheme::AtomicLadder => &mut self.atomic,
        }
    }

    pub fn section(&self, scheme: Scheme) -> impl Iterator<Item = &NuclideRecord> {
        match scheme {
            Scheme::TwoLevel => self.two_level.values(),
            Scheme::Lambda => self.lambda.values(),
            Scheme::Ladder => self.ladder.values(),
            Scheme::AtomicLadder => self.atomic.values(),
        }
    }

    pub fn get(&self, id: &str) -> Option<&NuclideRecord> {
        [&self.two_level, &self.lambda, &self.ladder, &self.atomic]
            .into_iter()
            .find_map(|s| s.get(id))
    }

    pub fn require(&self, id: &str) -> Result<&NuclideRecord> {
        self.get(id).ok_or_else(|| Error::UnknownNuclide(id.to_string()))
    }

    /// All records: two-level, Λ, ladder, atomic.
    pub fn records(&self) -> impl Iterator<Item = &NuclideRecord> {
        SECTIONS.into_iter().flat_map(move |s| self.section(s))
    }

    pub fn len(&self) -> usize {
        self.records().count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn remove(&mut self, id: &str) -> Option<NuclideRecord> {
        [&mut self.two_level, &mut self.lambda, &mut self.ladder, &mut self.atomic]
            .into_iter()
            .find_map(|s| s.shift_remove(id))
    }

    pub fn to_json_string(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("record serialization is infallible");
        s.push('\n');
        s
    }
}
