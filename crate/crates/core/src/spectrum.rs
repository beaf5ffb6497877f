//! Zero-phonon-line fine structure.
//!
//! The lines are the rotational levels of the lowest excited-state band,
//! measured from its lowest level. For a six-well ring that is four lines at
//! 0, δ, 3δ, 4δ with degeneracies 1, 2, 2, 1. The electronic ground-state
//! splitting is orders of magnitude smaller and is not resolved.

use std::f64::consts::{LN_2, PI};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rotor::BandStructure;
use crate::units::{mev_to_uev, thermal_energy_mev};

/// Which manifold sets the line intensities.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LineStatistics {
    /// Thermal population of the excited rotational levels.
    #[default]
    Emission,
    /// Population of the (unresolved) ground manifold: degeneracy weighting.
    Absorption,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Line {
    pub offset_uev: f64,
    pub degeneracy: u32,
    pub intensity: f64,
    pub k: i32,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LineList {
    pub zpl_energy_ev: f64,
    pub temperature_k: f64,
    pub lines: Vec<Line>,
}

impl LineList {
    pub fn total_degeneracy(&self) -> u32 {
        self.lines.iter().map(|l| l.degeneracy).sum()
    }
}

/// Zero-phonon line energy of the G center, eV.
pub const G_LINE_EV: f64 = 0.97;

pub fn fine_structure_lines(
    band: &BandStructure,
    temperature_k: f64,
    zpl_ev: f64,
    statistics: LineStatistics,
) -> Result<LineList> {
    if temperature_k.is_nan() || temperature_k <= 0.0 {
        return Err(Error::usage(format!("temperature must be > 0 (or +inf), got {temperature_k}")));
    }
    let mut ground: Vec<_> = band.band_levels(0).copied().collect();
    if ground.is_empty() {
        return Err(Error::usage("band structure has no levels"));
    }
    ground.sort_by(|a, b| a.energy_mev.total_cmp(&b.energy_mev).then(a.k.cmp(&b.k)));
    let origin = ground[0].energy_mev;
    let kt_uev = mev_to_uev(thermal_energy_mev(temperature_k));
    let mut lines: Vec<Line> = ground
        .iter()
        .map(|level| {
            let offset_uev = mev_to_uev(level.energy_mev - origin);
            let boltzmann = match statistics {
                LineStatistics::Emission if temperature_k.is_finite() => (-offset_uev / kt_uev).exp(),
                _ => 1.0,
            };
            Line { offset_uev, degeneracy: level.degeneracy, intensity: level.degeneracy as f64 * boltzmann, k: level.k }
        })
        .collect();
    let total: f64 = lines.iter().map(|l| l.intensity).sum();
    for line in &mut lines {
        line.intensity /= total;
    }
    Ok(LineList { zpl_energy_ev: zpl_ev, temperature_k, lines })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LineShape {
    #[default]
    Gaussian,
    Lorentzian,
}

/// Arrhenius line width `w(T) = w0 + wa·exp(−Ea/k_B T)` (FWHM).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BroadeningModel {
    /// Residual width, μeV.
    pub w0_uev: f64,
    /// Activated-width prefactor, μeV.
    pub wa_uev: f64,
    /// Activation energy, meV.
    pub ea_mev: f64,
    pub shape: LineShape,
}

/// Activation energy of the fine-structure broadening, meV.
pub const ACTIVATION_MEV: f64 = 12.4;

impl Default for BroadeningModel {
    fn default() -> Self {
        BroadeningModel::calibrated(0.1, 20.0, 12.0, ACTIVATION_MEV, LineShape::Gaussian)
    }
}

impl BroadeningModel {
    /// Chooses `wa` so that the width reaches `width_uev` at `temperature_k`.
    pub fn calibrated(w0_uev: f64, temperature_k: f64, width_uev: f64, ea_mev: f64, shape: LineShape) -> Self {
        let activation = (-ea_mev / thermal_energy_mev(temperature_k)).exp();
        BroadeningModel { w0_uev, wa_uev: (width_uev - w0_uev) / activation, ea_mev, shape }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.w0_uev >= 0.0 && self.wa_uev >= 0.0 && self.ea_mev > 0.0) {
            return Err(Error::usage("broadening needs w0 >= 0, wa >= 0, Ea > 0"));
        }
        Ok(())
    }

    pub fn width_uev(&self, temperature_k: f64) -> f64 {
        if temperature_k <= 0.0 {
            return self.w0_uev;
        }
        self.w0_uev + self.wa_uev * (-self.ea_mev / thermal_energy_mev(temperature_k)).exp()
    }
}

/// Uniform sampling grid in μeV offsets.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnergyGrid {
    pub min_uev: f64,
    pub max_uev: f64,
    pub step_uev: f64,
}

impl EnergyGrid {
    pub fn points(&self) -> Result<Vec<f64>> {
        if !(self.step_uev > 0.0 && self.max_uev > self.min_uev) || !self.min_uev.is_finite() || !self.max_uev.is_finite() {
            return Err(Error::usage(format!("empty energy grid {self:?}")));
        }
        let n = ((self.max_uev - self.min_uev) / self.step_uev).floor() as usize;
        Ok((0..=n).map(|i| self.min_uev + i as f64 * self.step_uev).collect())
    }

    /// Grid spanning the lines with `margin` widths on either side.
    pub fn covering(lines: &LineList, width_uev: f64, margin: f64, step_uev: f64) -> Self {
        let lo = lines.lines.iter().map(|l| l.offset_uev).fold(f64::INFINITY, f64::min);
        let hi = lines.lines.iter().map(|l| l.offset_uev).fold(f64::NEG_INFINITY, f64::max);
        EnergyGrid { min_uev: lo - margin * width_uev - step_uev, max_uev: hi + margin * width_uev + step_uev, step_uev }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SampledSpectrum {
    pub energy_uev_offset: Vec<f64>,
    /// Intensity density per μeV; each sample is the bin-averaged profile.
    pub intensity: Vec<f64>,
    pub width_uev: f64,
    pub step_uev: f64,
}

impl SampledSpectrum {
    /// Σ intensity · step.
    pub fn area(&self) -> f64 {
        self.intensity.iter().sum::<f64>() * self.step_uev
    }

    /// Number of strict local maxima (plateaus count once), ignoring wiggles
    /// below `1e-9` of the peak value.
    pub fn local_maxima(&self) -> usize {
        let peak = self.intensity.iter().copied().fold(0.0, f64::max);
        let floor = 1e-9 * peak;
        let mut compressed: Vec<f64> = Vec::with_capacity(self.intensity.len());
        for &y in &self.intensity {
            if compressed.last().is_none_or(|&last: &f64| (y - last).abs() > 1e-12 * peak) {
                compressed.push(y);
            }
        }
        let n = compressed.len();
        (0..n)
            .filter(|&i| {
                let y = compressed[i];
                let left = if i == 0 { f64::NEG_INFINITY } else { compressed[i - 1] };
                let right = if i + 1 == n { f64::NEG_INFINITY } else { compressed[i + 1] };
                y > floor && y > left && y > right
            })
            .count()
    }
}

/// Cumulative distribution of a unit-area profile of FWHM `width` at `x`.
fn profile_cdf(shape: LineShape, width: f64, x: f64) -> f64 {
    if width == 0.0 {
        return if x < 0.0 { 0.0 } else if x > 0.0 { 1.0 } else { 0.5 };
    }
    match shape {
        LineShape::Gaussian => {
            let sigma = width / (2.0 * (2.0 * LN_2).sqrt());
            0.5 * libm::erfc(-x / (sigma * std::f64::consts::SQRT_2))
        }
        LineShape::Lorentzian => 0.5 + (2.0 * x / width).atan() / PI,
    }
}

/// Probability mass of a unit-area profile outside `[lo, hi]` relative to its
/// centre.
pub fn tail_mass(shape: LineShape, width: f64, lo: f64, hi: f64) -> f64 {
    profile_cdf(shape, width, lo) + (1.0 - profile_cdf(shape, width, hi))
}

/// Samples the broadened line list. Each sample is the profile mass in its
/// cell `[x − step/2, x + step/2]` divided by the step.
pub fn broaden(lines: &LineList, model: &BroadeningModel, temperature_k: f64, grid: &EnergyGrid) -> Result<SampledSpectrum> {
    model.validate()?;
    let xs = grid.points()?;
    let width = model.width_uev(temperature_k);
    let step = grid.step_uev;
    let lo = xs[0] - 0.5 * step;
    let hi = xs[xs.len() - 1] + 0.5 * step;
    for line in &lines.lines {
        if line.offset_uev - 5.0 * width < lo || line.offset_uev + 5.0 * width > hi {
            return Err(Error::usage(format!(
                "grid [{lo}, {hi}] ueV does not cover line at {} ueV with five widths ({width} ueV)",
                line.offset_uev
            )));
        }
    }
    let intensity = xs
        .iter()
        .map(|&x| {
            lines
                .lines
                .iter()
                .map(|l| {
                    let a = x - 0.5 * step - l.offset_uev;
                    let b = x + 0.5 * step - l.offset_uev;
                    l.intensity * (profile_cdf(model.shape, width, b) - profile_cdf(model.shape, width, a))
                })
                .sum::<f64>()
                / step
        })
        .collect();
    Ok(SampledSpectrum { energy_uev_offset: xs, intensity, width_uev: width, step_uev: step })
}
