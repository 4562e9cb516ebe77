//! Nuclear and atomic parameter records for battery cells.
//!
//! The bundled dataset is a single JSON document with one section per level
//! scheme (`two_level`, `lambda`, `ladder`, `atomic`), each mapping a record id
//! to its parameters. File units are eV, seconds and W/cm²; accessors with a
//! `_ps` suffix convert times to the internal picosecond scale.

mod loader;
mod physics;
mod types;

pub use loader::{load_nuclide_table, NuclideDb, TableFormat, BUNDLED_JSON, DB_ENV_VAR};
pub use physics::{compute_omega0, linewidth_from_half_life, weisskopf_to_si, weisskopf_unit};
pub use types::{
    DecayModel, Multipolarity, NuclideRecord, Parity, ReportedMetrics, Scheme, Spin,
    TransitionKind,
};
