//! Command-line parsing and run configuration.
//!
//! A run is described by one [`RunConfig`]. It starts from defaults, takes
//! an optional JSON config file on top, and then the command-line flags,
//! which always win.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use crate::dynamics::{SnapshotGrid, Tolerances, DEFAULT_SNAPSHOTS};
use crate::error::{Error, Result};
use crate::experiments::{AxisSpec, RunOptions};
use crate::pulse::ScheduleOverrides;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CommandKind {
    #[default]
    Simulate,
    Sweep,
    Tables,
    Compare,
    Validate,
}

impl CommandKind {
    fn needs_nuclide(self) -> bool {
        matches!(self, CommandKind::Simulate | CommandKind::Sweep)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub command: CommandKind,
    pub nuclide: Option<String>,
    /// `None` means `$NIQB_DB` or the bundled tables.
    pub db_path: Option<PathBuf>,
    pub overrides: ScheduleOverrides,
    pub snapshots: usize,
    pub tol: Tolerances,
    pub out_dir: PathBuf,
    /// Worker threads; all cores when `None`.
    pub jobs: Option<usize>,
    /// Sweep axes; one decade either side of the record's intensity when unset.
    pub ip: Option<AxisSpec>,
    pub is: Option<AxisSpec>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            command: CommandKind::Simulate,
            nuclide: None,
            db_path: None,
            overrides: ScheduleOverrides::default(),
            snapshots: DEFAULT_SNAPSHOTS,
            tol: Tolerances::default(),
            out_dir: PathBuf::from("niqb_out"),
            jobs: None,
            ip: None,
            is: None,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        self.tol.validate()?;
        if self.snapshots < 2 {
            return Err(Error::Usage(format!("--snapshots must be at least 2, got {}", self.snapshots)));
        }
        if self.jobs == Some(0) {
            return Err(Error::Usage("--jobs must be at least 1".into()));
        }
        if self.command.needs_nuclide() && self.nuclide.is_none() {
            return Err(Error::Usage(format!(
                "`{}` needs --nuclide <ID>",
                serde_json::to_value(self.command).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default()
            )));
        }
        if self.command != CommandKind::Sweep && (self.ip.is_some() || self.is.is_some()) {
            return Err(Error::Usage("--ip/--is only apply to `sweep`".into()));
        }
        Ok(())
    }

    pub fn run_options(&self) -> RunOptions {
        RunOptions { tol: self.tol, grid: SnapshotGrid::Uniform(self.snapshots) }
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Usage(format!("bad config: {e}")))
    }

    pub fn from_json_file(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json_str(&text).map_err(|e| Error::Usage(format!("{}: {e}", path.display())))
    }

    pub fn to_json_string(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("config serialization is infallible");
        s.push('\n');
        s
    }
}

#[derive(Debug, Parser)]
#[command(name = "niqb", version, about = "Nuclear-isomer quantum battery simulator")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Charge one cell and write trajectory, metrics and summary.
    Simulate(CommonArgs),
    /// Scan pump and Stokes intensities for a three-level cell.
    Sweep {
        #[command(flatten)]
        common: CommonArgs,
        /// Pump intensity axis, W/cm²: lo:hi:n[:lin|:log].
        #[arg(long)]
        ip: Option<AxisSpec>,
        /// Stokes intensity axis, W/cm²: lo:hi:n[:lin|:log].
        #[arg(long = "is")]
        is: Option<AxisSpec>,
    },
    /// Simulate every database row and compare with the reported values.
    Tables(CommonArgs),
    /// Nuclear against atomic cells of the same element.
    Compare(CommonArgs),
    /// Load the database and build every schedule.
    Validate(CommonArgs),
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    #[arg(long)]
    pub nuclide: Option<String>,
    /// Database file (JSON or CSV).
    #[arg(long)]
    pub db: Option<PathBuf>,
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// JSON config; flags take precedence.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub snapshots: Option<usize>,
    #[arg(long)]
    pub rtol: Option<f64>,
    #[arg(long)]
    pub atol: Option<f64>,
    #[arg(long)]
    pub jobs: Option<usize>,
    /// Print the resolved config as JSON and exit.
    #[arg(long)]
    pub dump_config: bool,
    /// W/cm².
    #[arg(long)]
    pub pump_intensity: Option<f64>,
    /// W/cm².
    #[arg(long)]
    pub stokes_intensity: Option<f64>,
    #[arg(long)]
    pub pump_center_ps: Option<f64>,
    #[arg(long)]
    pub stokes_center_ps: Option<f64>,
    #[arg(long)]
    pub duration_ps: Option<f64>,
}

/// A parsed command line.
#[derive(Debug, Clone, PartialEq)]
pub struct Invocation {
    pub config: RunConfig,
    pub dump_config: bool,
}

impl Invocation {
    pub fn from_cli(cli: Cli) -> Result<Self> {
        let (kind, args, ip, is) = match cli.command {
            Command::Simulate(a) => (CommandKind::Simulate, a, None, None),
            Command::Sweep { common, ip, is } => (CommandKind::Sweep, common, ip, is),
            Command::Tables(a) => (CommandKind::Tables, a, None, None),
            Command::Compare(a) => (CommandKind::Compare, a, None, None),
            Command::Validate(a) => (CommandKind::Validate, a, None, None),
        };
        let mut c = match &args.config {
            Some(p) => RunConfig::from_json_file(p)?,
            None => RunConfig::default(),
        };
        c.command = kind;
        fn set<T>(slot: &mut T, v: Option<T>) {
            if let Some(v) = v {
                *slot = v;
            }
        }
        fn set_opt<T>(slot: &mut Option<T>, v: Option<T>) {
            if v.is_some() {
                *slot = v;
            }
        }
        set_opt(&mut c.nuclide, args.nuclide);
        set_opt(&mut c.db_path, args.db);
        set(&mut c.out_dir, args.out);
        set(&mut c.snapshots, args.snapshots);
        set(&mut c.tol.rtol, args.rtol);
        set(&mut c.tol.atol, args.atol);
        set_opt(&mut c.jobs, args.jobs);
        set_opt(&mut c.ip, ip);
        set_opt(&mut c.is, is);
        let o = &mut c.overrides;
        set_opt(&mut o.pump_intensity, args.pump_intensity);
        set_opt(&mut o.stokes_intensity, args.stokes_intensity);
        set_opt(&mut o.pump_center_ps, args.pump_center_ps);
        set_opt(&mut o.stokes_center_ps, args.stokes_center_ps);
        set_opt(&mut o.duration_ps, args.duration_ps);
        c.validate()?;
        Ok(Invocation { config: c, dump_config: args.dump_config })
    }
}

/// Parses `argv` (program name first). Help and version requests come back
/// as usage errors carrying the rendered text.
pub fn parse_cli<I, T>(argv: I) -> Result<Invocation>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = Cli::try_parse_from(argv).map_err(|e| Error::Usage(e.render().to_string()))?;
    Invocation::from_cli(cli)
}
