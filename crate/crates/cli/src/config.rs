//! JSON run configuration.
//!
//! ```json
//! {
//!   "schema_version": 1,
//!   "output_dir": "out",
//!   "solver": { "jmax_start": 64, "jmax_cap": 2000, "convergence": 1e-3 },
//!   "solve": { "potential": { "L": 22.5, "V0": 33.0, "N": 6 }, "bands": 3 },
//!   "odmr": { "system": { "zfs": { ... }, "g": 2.0023 }, "probe_GHz": 35.0 }
//! }
//! ```
//!
//! Every section is optional and mirrors the flags of the subcommand of the
//! same name. Unknown keys are rejected.

use std::path::{Path, PathBuf};

use gcenter_core::rotor::SolveOptions;
use gcenter_core::{Error, Result};
use serde::Deserialize;

use crate::args::{AverageArgs, FitArgs, IsotopeArgs, OdmrArgs, RatesArgs, ReproArgs, SolveArgs, SpectrumArgs};

pub const CONFIG_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub schema_version: u32,
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
    #[serde(default)]
    pub solver: SolveOptions,
    #[serde(default)]
    pub solve: SolveArgs,
    #[serde(default)]
    pub fit: FitArgs,
    #[serde(default)]
    pub isotope: IsotopeArgs,
    #[serde(default)]
    pub average_tensor: AverageArgs,
    #[serde(default)]
    pub rates: RatesArgs,
    #[serde(default)]
    pub spectrum: SpectrumArgs,
    #[serde(default)]
    pub odmr: OdmrArgs,
    #[serde(default)]
    pub paper_repro: ReproArgs,
}

impl RunConfig {
    pub fn empty() -> Self {
        RunConfig { schema_version: CONFIG_SCHEMA_VERSION, ..Default::default() }
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::usage(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| match e {
            Error::Usage(msg) => Error::usage(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn parse(text: &str) -> Result<Self> {
        let cfg: RunConfig = serde_json::from_str(text).map_err(|e| Error::usage(format!("invalid config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.schema_version != CONFIG_SCHEMA_VERSION {
            return Err(Error::usage(format!(
                "unsupported config schema_version {} (expected {CONFIG_SCHEMA_VERSION})",
                self.schema_version
            )));
        }
        let s = &self.solver;
        if s.jmax_start < 4 || s.jmax_cap < s.jmax_start || !(s.convergence > 0.0) {
            return Err(Error::usage("solver needs 4 <= jmax_start <= jmax_cap and convergence > 0"));
        }
        if let Some(sys) = &self.odmr.system {
            sys.validate()?;
        }
        // Presets plus overrides must still form valid potentials.
        for p in [&self.solve.potential, &self.isotope.excited, &self.spectrum.potential] {
            p.resolve(crate::args::Preset::Singlet)?;
        }
        Ok(())
    }
}
