//! Simulation and analysis toolkit for nuclear-isomer quantum batteries.
//!
//! A battery cell is a driven, dissipative two- or three-level system whose
//! levels and laser settings come from a bundled parameter database. The
//! crate builds Gaussian pulse schedules (π-pulse or STIRAP), integrates the
//! master equation for the density matrix and reports stored energy,
//! charging power, ergotropy, extraction ratio and purity.
//!
//! ```
//! use niqb_core::{experiments, nuclide_db::NuclideDb, pulse::ScheduleOverrides};
//!
//! let db = NuclideDb::bundled().unwrap();
//! let run = experiments::run_charging_scenario(
//!     db.require("193Ir").unwrap(),
//!     &ScheduleOverrides::default(),
//!     &experiments::RunOptions::default(),
//! )
//! .unwrap();
//! assert!((run.summary.e_sta / 80.24e3 - 1.0).abs() < 1e-3);
//! ```

pub mod cli;
pub mod config;
pub mod dynamics;
pub mod error;
pub mod experiments;
pub mod io;
pub mod metrics;
pub mod nuclide_db;
pub mod pulse;
pub mod units;

pub use error::{Error, Result};
