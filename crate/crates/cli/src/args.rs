//! Command-line arguments. Each subcommand's argument struct doubles as its
//! section of the JSON config file, so a flag and a config key share a name.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use gcenter_core::isotope::ShiftRecipe;
use gcenter_core::rotor::{GapDefinition, RotorPotential};
use gcenter_core::spectrum::{LineShape, LineStatistics};
use gcenter_core::spin::TripletSpinSystem;
use gcenter_core::tensor::SymTensor3;
use serde::Deserialize;

#[derive(Debug, Parser)]
#[command(name = "gcenter", version, about = "G-center hindered-rotor, tensor-averaging and spin-Hamiltonian models")]
pub struct Cli {
    /// JSON run configuration; command-line flags override its values.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Emit JSON on stdout instead of a text table.
    #[arg(long, global = true)]
    pub json: bool,
    /// Directory for relative output paths (default: $GCENTER_OUT_DIR, then the config, then the working directory).
    #[arg(long, global = true, value_name = "DIR")]
    pub out_dir: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Rotational band structure of the ring potential.
    Solve(SolveArgs),
    /// Fit (L, V0) to an oscillator quantum and a tunneling splitting.
    Fit(FitArgs),
    /// Isotope shifts of the zero-phonon line.
    Isotope(IsotopeArgs),
    /// Motional average of a tensor about a rotation axis.
    AverageTensor(AverageArgs),
    /// Reorientation rate and symmetry regime versus temperature.
    Rates(RatesArgs),
    /// Zero-phonon-line fine structure and its thermal broadening.
    Spectrum(SpectrumArgs),
    /// ODMR resonance fields of the triplet state.
    Odmr(OdmrArgs),
    /// Compare computed quantities against the published values.
    PaperRepro(ReproArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Solve(_) => "solve",
            Command::Fit(_) => "fit",
            Command::Isotope(_) => "isotope",
            Command::AverageTensor(_) => "average-tensor",
            Command::Rates(_) => "rates",
            Command::Spectrum(_) => "spectrum",
            Command::Odmr(_) => "odmr",
            Command::PaperRepro(_) => "paper-repro",
        }
    }
}

/// Fills every `None` field of `$flags` from `$file`.
macro_rules! overlay {
    ($flags:expr, $file:expr; $($field:ident),* $(,)?) => {{
        let mut out = $flags;
        let file = $file;
        $(if out.$field.is_none() { out.$field = file.$field; })*
        out
    }};
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Preset {
    /// Excited singlet state (L = 22.5, V0 = 33).
    Singlet,
    /// Excited triplet state (L = 25.7, V0 = 40).
    Triplet,
    /// Electronic ground state (L = 31.97, V0 = 89).
    Ground,
}

impl Preset {
    pub fn potential(self) -> RotorPotential {
        match self {
            Preset::Singlet => RotorPotential::singlet_excited(),
            Preset::Triplet => RotorPotential::triplet_excited(),
            Preset::Ground => RotorPotential::electronic_ground(),
        }
    }
}

/// Rotor potential given by a preset and optional overrides.
#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PotentialArgs {
    /// Parameter set to start from [default: singlet].
    #[arg(long, value_enum)]
    pub preset: Option<Preset>,
    /// Mass-weighted path length L, sqrt(u)*Angstrom.
    #[arg(long = "L", value_name = "L")]
    #[serde(rename = "L")]
    pub path_length: Option<f64>,
    /// Barrier height V0, meV.
    #[arg(long = "V0", value_name = "V0")]
    #[serde(rename = "V0")]
    pub barrier: Option<f64>,
    /// Number of wells along the ring.
    #[arg(long = "N", value_name = "N")]
    #[serde(rename = "N")]
    pub wells: Option<u32>,
}

impl PotentialArgs {
    pub fn merged(self, file: Self) -> Self {
        overlay!(self, file; preset, path_length, barrier, wells)
    }

    pub fn resolve(&self, default: Preset) -> gcenter_core::Result<RotorPotential> {
        let base = self.preset.unwrap_or(default).potential();
        RotorPotential::new(
            self.path_length.unwrap_or(base.path_length),
            self.barrier.unwrap_or(base.barrier),
            self.wells.unwrap_or(base.wells),
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GapArg {
    Centroid,
    LowestExcited,
}

impl From<GapArg> for GapDefinition {
    fn from(g: GapArg) -> Self {
        match g {
            GapArg::Centroid => GapDefinition::Centroid,
            GapArg::LowestExcited => GapDefinition::LowestExcited,
        }
    }
}

#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolveArgs {
    #[command(flatten)]
    pub potential: PotentialArgs,
    /// Number of rotational bands [default: 3].
    #[arg(long)]
    pub bands: Option<usize>,
    /// Definition of the oscillator quantum [default: centroid].
    #[arg(long, value_enum)]
    pub gap: Option<GapArg>,
    /// Fixed plane-wave cutoff instead of automatic convergence.
    #[arg(long)]
    pub jmax: Option<usize>,
    /// Write the level table as CSV.
    #[arg(long, value_name = "FILE")]
    pub csv: Option<PathBuf>,
}

impl SolveArgs {
    pub fn merged(self, file: Self) -> Self {
        let potential = self.potential.clone().merged(file.potential.clone());
        SolveArgs { potential, ..overlay!(self, file; bands, gap, jmax, csv) }
    }
}

#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FitArgs {
    /// Target oscillator quantum, meV [default: 12.4].
    #[arg(long = "hbar-omega", value_name = "MEV")]
    #[serde(rename = "hbar_omega_meV")]
    pub hbar_omega: Option<f64>,
    /// Target tunneling splitting, ueV [default: 2.5].
    #[arg(long, value_name = "UEV")]
    #[serde(rename = "delta_ueV")]
    pub delta: Option<f64>,
    /// Number of wells [default: 6].
    #[arg(long = "N", value_name = "N")]
    #[serde(rename = "N")]
    pub wells: Option<u32>,
    /// Starting path length instead of the asymptotic guess.
    #[arg(long = "init-L", value_name = "L", requires = "init_barrier")]
    #[serde(rename = "init_L")]
    pub init_path_length: Option<f64>,
    /// Starting barrier instead of the asymptotic guess.
    #[arg(long = "init-V0", value_name = "V0", requires = "init_path_length")]
    #[serde(rename = "init_V0")]
    pub init_barrier: Option<f64>,
}

impl FitArgs {
    pub fn merged(self, file: Self) -> Self {
        overlay!(self, file; hbar_omega, delta, wells, init_path_length, init_barrier)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RecipeArg {
    ExcitedOnly,
    BothStates,
}

impl From<RecipeArg> for ShiftRecipe {
    fn from(r: RecipeArg) -> Self {
        match r {
            RecipeArg::ExcitedOnly => ShiftRecipe::ExcitedOnly,
            RecipeArg::BothStates => ShiftRecipe::BothStates,
        }
    }
}

#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct IsotopeArgs {
    #[command(flatten)]
    pub excited: PotentialArgs,
    /// Ground-state path length (both-states recipe) [default: 31.97].
    #[arg(long = "ground-L", value_name = "L")]
    #[serde(rename = "ground_L")]
    pub ground_path_length: Option<f64>,
    /// Ground-state barrier (both-states recipe) [default: 89].
    #[arg(long = "ground-V0", value_name = "V0")]
    #[serde(rename = "ground_V0")]
    pub ground_barrier: Option<f64>,
    /// Isotope masses in u [default: 29,30].
    #[arg(long, value_delimiter = ',', value_name = "U,...")]
    pub masses: Option<Vec<f64>>,
    /// Participation fraction f; calibrated against the target shift when omitted.
    #[arg(long)]
    pub fraction: Option<f64>,
    /// Shift used to calibrate f, ueV [default: 54].
    #[arg(long, value_name = "UEV")]
    #[serde(rename = "target_shift_ueV")]
    pub target_shift: Option<f64>,
    /// Isotope mass of the calibration shift [default: 29].
    #[arg(long, value_name = "U")]
    pub target_mass: Option<f64>,
    /// Reference isotope mass [default: 28].
    #[arg(long, value_name = "U")]
    pub reference_mass: Option<f64>,
    /// Which zero-point energies enter the shift [default: excited-only].
    #[arg(long, value_enum)]
    pub recipe: Option<RecipeArg>,
    /// Write the shift table as CSV.
    #[arg(long, value_name = "FILE")]
    pub csv: Option<PathBuf>,
}

impl IsotopeArgs {
    pub fn merged(self, file: Self) -> Self {
        let excited = self.excited.clone().merged(file.excited.clone());
        IsotopeArgs {
            excited,
            ..overlay!(self, file; ground_path_length, ground_barrier, masses, fraction, target_shift,
                target_mass, reference_mass, recipe, csv)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TensorPreset {
    CalculatedZfs,
    MeasuredZfs,
    CalculatedHyperfine,
    MeasuredHyperfine,
}

impl TensorPreset {
    pub fn tensor(self) -> SymTensor3 {
        match self {
            TensorPreset::CalculatedZfs => SymTensor3::calculated_zfs(),
            TensorPreset::MeasuredZfs => SymTensor3::measured_zfs(),
            TensorPreset::CalculatedHyperfine => SymTensor3::calculated_hyperfine(),
            TensorPreset::MeasuredHyperfine => SymTensor3::measured_hyperfine(),
        }
    }
}

#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AverageArgs {
    /// Tabulated tensor to average [default: calculated-zfs].
    #[arg(long, value_enum, conflicts_with_all = ["tensor", "magnitudes"])]
    pub preset: Option<TensorPreset>,
    /// Tensor components in MHz: xx,yy,zz or xx,yy,zz,xy,xz,yz.
    #[arg(long, value_parser = parse_tensor, value_name = "MHZ,...", conflicts_with = "magnitudes")]
    pub tensor: Option<SymTensor3>,
    /// Principal magnitudes xx,yy,zz with unknown signs; every traceless sign
    /// assignment is averaged.
    #[arg(long, value_parser = parse_vec3, value_name = "XX,YY,ZZ")]
    pub magnitudes: Option<[f64; 3]>,
    /// Rotation axis in the tensor frame [default: 0,1,0].
    #[arg(long, value_parser = parse_vec3, value_name = "X,Y,Z")]
    pub axis: Option<[f64; 3]>,
    /// Order of the cyclic rotation group [default: 3].
    #[arg(long)]
    pub order: Option<u32>,
}

impl AverageArgs {
    pub fn merged(self, file: Self) -> Self {
        overlay!(self, file; preset, tensor, magnitudes, axis, order)
    }
}

#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RatesArgs {
    /// Tunneling splitting, ueV [default: 0.22].
    #[arg(long, value_name = "UEV")]
    #[serde(rename = "delta_ueV")]
    pub delta: Option<f64>,
    /// Direct-process coefficient, Hz/K [default: 0].
    #[arg(long, value_name = "HZ_PER_K")]
    pub alpha: Option<f64>,
    /// Raman coefficient, Hz/K^5; calibrated so that the rate meets the probe
    /// at --calibrate-at when omitted.
    #[arg(long, value_name = "HZ_PER_K5")]
    pub beta: Option<f64>,
    /// Temperature at which the rate equals the probe frequency, K [default: 5].
    #[arg(long, value_name = "K", conflicts_with = "beta")]
    pub calibrate_at: Option<f64>,
    /// Probe (interrogation) frequency, GHz [default: 35].
    #[arg(long, value_name = "GHZ")]
    #[serde(rename = "probe_GHz")]
    pub probe: Option<f64>,
    /// Temperatures, K [default: 1.7,5,6,30].
    #[arg(long, value_delimiter = ',', value_name = "K,...")]
    #[serde(rename = "temperatures_K")]
    pub temperatures: Option<Vec<f64>>,
    /// Write the rate table as CSV.
    #[arg(long, value_name = "FILE")]
    pub csv: Option<PathBuf>,
}

impl RatesArgs {
    pub fn merged(self, file: Self) -> Self {
        overlay!(self, file; delta, alpha, beta, calibrate_at, probe, temperatures, csv)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StatisticsArg {
    Emission,
    Absorption,
}

impl From<StatisticsArg> for LineStatistics {
    fn from(s: StatisticsArg) -> Self {
        match s {
            StatisticsArg::Emission => LineStatistics::Emission,
            StatisticsArg::Absorption => LineStatistics::Absorption,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ShapeArg {
    Gaussian,
    Lorentzian,
}

impl From<ShapeArg> for LineShape {
    fn from(s: ShapeArg) -> Self {
        match s {
            ShapeArg::Gaussian => LineShape::Gaussian,
            ShapeArg::Lorentzian => LineShape::Lorentzian,
        }
    }
}

#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SpectrumArgs {
    #[command(flatten)]
    pub potential: PotentialArgs,
    /// Temperature in K; `inf` gives pure degeneracy weights [default: 1.4].
    #[arg(long, value_name = "K")]
    #[serde(rename = "temperature_K")]
    pub temperature: Option<f64>,
    /// Line-intensity statistics [default: emission].
    #[arg(long, value_enum)]
    pub statistics: Option<StatisticsArg>,
    /// Residual line width w0 (FWHM), ueV [default: 0.1].
    #[arg(long, value_name = "UEV")]
    #[serde(rename = "w0_ueV")]
    pub w0: Option<f64>,
    /// Activated width prefactor, ueV [default: calibrated to 12 ueV at 20 K].
    #[arg(long, value_name = "UEV")]
    #[serde(rename = "wa_ueV")]
    pub wa: Option<f64>,
    /// Activation energy of the broadening, meV [default: 12.4].
    #[arg(long, value_name = "MEV")]
    #[serde(rename = "ea_meV")]
    pub ea: Option<f64>,
    /// Line shape [default: gaussian].
    #[arg(long, value_enum)]
    pub shape: Option<ShapeArg>,
    /// Sampling step, ueV [default: width/10, clamped to 0.001..0.05].
    #[arg(long, value_name = "UEV")]
    #[serde(rename = "step_ueV")]
    pub step: Option<f64>,
    /// Write the sampled spectrum as CSV.
    #[arg(long, value_name = "FILE")]
    pub csv: Option<PathBuf>,
    /// Write the line list as CSV.
    #[arg(long, value_name = "FILE")]
    pub lines_csv: Option<PathBuf>,
}

impl SpectrumArgs {
    pub fn merged(self, file: Self) -> Self {
        let potential = self.potential.clone().merged(file.potential.clone());
        SpectrumArgs {
            potential,
            ..overlay!(self, file; temperature, statistics, w0, wa, ea, shape, step, csv, lines_csv)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ZfsPreset {
    /// Calculated tensor (307, 911, -1218 MHz).
    Calculated,
    /// Measured magnitudes (142, 800, 941 MHz) with the signs of the
    /// calculation, isotropic remainder removed.
    Measured,
    /// No zero-field splitting.
    Free,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum HyperfinePreset {
    None,
    Calculated,
    Measured,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OrientationSet {
    /// Distinct images of the defect under the cubic rotation group.
    Cubic,
    /// The defect frame only.
    Identity,
}

#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OdmrArgs {
    /// Zero-field splitting preset [default: calculated].
    #[arg(long, value_enum, conflicts_with = "zfs")]
    pub preset: Option<ZfsPreset>,
    /// Traceless ZFS tensor in the defect frame, MHz: xx,yy,zz[,xy,xz,yz].
    #[arg(long, value_parser = parse_tensor, value_name = "MHZ,...")]
    pub zfs: Option<SymTensor3>,
    /// Isotropic g-factor [default: 2.0023].
    #[arg(long)]
    pub g: Option<f64>,
    /// 29Si hyperfine tensor at first order [default: none].
    #[arg(long, value_enum)]
    pub hyperfine: Option<HyperfinePreset>,
    /// Field direction in crystal coordinates [default: 0,1,1].
    #[arg(long, value_parser = parse_vec3, value_name = "X,Y,Z")]
    pub direction: Option<[f64; 3]>,
    /// Microwave probe frequency, GHz [default: 35].
    #[arg(long, value_name = "GHZ")]
    #[serde(rename = "probe_GHz")]
    pub probe: Option<f64>,
    /// Upper end of the field sweep, T [default: 2].
    #[arg(long, value_name = "T")]
    #[serde(rename = "B_max_T")]
    pub b_max: Option<f64>,
    /// Orientation set [default: cubic].
    #[arg(long, value_enum)]
    pub orientations: Option<OrientationSet>,
    /// Motionally average D (and A) about this defect-frame axis first.
    #[arg(long, value_parser = parse_vec3, value_name = "X,Y,Z")]
    pub average_axis: Option<[f64; 3]>,
    /// Uniform pre-scan points per transition [default: 2000].
    #[arg(long)]
    pub scan_points: Option<usize>,
    /// Treat the ZFS principal values as magnitudes and report every
    /// traceless sign assignment.
    #[arg(long)]
    #[serde(default)]
    pub sign_hypotheses: bool,
    /// Full spin system (config file only); overrides preset, zfs, g and hyperfine.
    #[arg(skip)]
    pub system: Option<TripletSpinSystem>,
    /// Write the resonance table as CSV.
    #[arg(long, value_name = "FILE")]
    pub csv: Option<PathBuf>,
}

impl OdmrArgs {
    pub fn merged(self, file: Self) -> Self {
        let sign_hypotheses = self.sign_hypotheses || file.sign_hypotheses;
        OdmrArgs {
            sign_hypotheses,
            ..overlay!(self, file; preset, zfs, g, hyperfine, direction, probe, b_max, orientations,
                average_axis, scan_points, system, csv)
        }
    }
}

#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ReproArgs {
    /// Also write the report to this file.
    #[arg(long, value_name = "FILE")]
    pub output: Option<PathBuf>,
}

impl ReproArgs {
    pub fn merged(self, file: Self) -> Self {
        overlay!(self, file; output)
    }
}

fn parse_list(s: &str) -> Result<Vec<f64>, String> {
    s.split(',')
        .map(|p| p.trim().parse::<f64>().map_err(|e| format!("'{p}': {e}")))
        .collect()
}

pub fn parse_vec3(s: &str) -> Result<[f64; 3], String> {
    let v = parse_list(s)?;
    <[f64; 3]>::try_from(v.as_slice()).map_err(|_| format!("expected 3 comma-separated numbers, got {}", v.len()))
}

pub fn parse_tensor(s: &str) -> Result<SymTensor3, String> {
    let v = parse_list(s)?;
    match v.as_slice() {
        [xx, yy, zz] => Ok(SymTensor3::diag(*xx, *yy, *zz)),
        [xx, yy, zz, xy, xz, yz] => Ok(SymTensor3 { xx: *xx, yy: *yy, zz: *zz, xy: *xy, xz: *xz, yz: *yz }),
        _ => Err(format!("expected 3 or 6 comma-separated components, got {}", v.len())),
    }
}
