//! Temperature-dependent reorientation rate
//!
//! ```text
//! Γ(T) = 6δ/h + α·T + β·T⁵
//! ```
//!
//! The athermal term is the coherent tunneling rate through the six barriers;
//! the direct (one-phonon) and Raman (two-phonon) coefficients are supplied by
//! the caller. Comparing Γ(T) against a probe frequency decides whether a
//! measurement sees the static low-symmetry defect or its motional average.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics;
use crate::units::uev_to_hz;

/// Number of equivalent positions visited by the tunneling rotor.
pub const EQUIVALENT_POSITIONS: f64 = 6.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RateParams {
    /// Tunneling splitting δ in μeV.
    pub delta_uev: f64,
    /// Direct-process coefficient, Hz/K.
    #[serde(default)]
    pub alpha: f64,
    /// Raman-process coefficient, Hz/K⁵.
    #[serde(default)]
    pub beta: f64,
}

impl RateParams {
    pub fn new(delta_uev: f64, alpha: f64, beta: f64) -> Result<Self> {
        let p = RateParams { delta_uev, alpha, beta };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.delta_uev.is_finite() && self.delta_uev > 0.0) {
            return Err(Error::usage(format!("delta must be > 0, got {}", self.delta_uev)));
        }
        if !(self.alpha.is_finite() && self.alpha >= 0.0) || !(self.beta.is_finite() && self.beta >= 0.0) {
            return Err(Error::usage("alpha and beta must be finite and >= 0"));
        }
        Ok(())
    }

    /// Triplet-state preset: δ = 0.22 μeV, no direct term, and β calibrated
    /// so that Γ reaches a 35 GHz probe at 5 K. The β value is a calibration,
    /// not a first-principles coupling.
    pub fn triplet_calibrated() -> Self {
        let base = RateParams { delta_uev: 0.22, alpha: 0.0, beta: 0.0 };
        let beta = calibrate_beta(&base, 5.0, 35e9).expect("preset calibration is reachable");
        RateParams { beta, ..base }
    }

    /// Athermal rate 6δ/h in Hz.
    pub fn athermal_rate(&self) -> f64 {
        EQUIVALENT_POSITIONS * uev_to_hz(self.delta_uev)
    }
}

/// Contributions to the reorientation rate, all in Hz.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RateBreakdown {
    pub athermal: f64,
    pub direct: f64,
    pub raman: f64,
    pub total: f64,
}

pub fn rate_breakdown(p: &RateParams, temperature_k: f64) -> Result<RateBreakdown> {
    if !(temperature_k >= 0.0) || !temperature_k.is_finite() {
        return Err(Error::usage(format!("temperature must be >= 0, got {temperature_k}")));
    }
    let athermal = p.athermal_rate();
    let direct = p.alpha * temperature_k;
    let raman = p.beta * temperature_k.powi(5);
    Ok(RateBreakdown { athermal, direct, raman, total: athermal + direct + raman })
}

/// Γ(T) in Hz.
pub fn gamma(p: &RateParams, temperature_k: f64) -> Result<f64> {
    Ok(rate_breakdown(p, temperature_k)?.total)
}

/// β such that Γ(T_cross) equals the probe frequency.
pub fn calibrate_beta(p: &RateParams, t_cross_k: f64, probe_hz: f64) -> Result<f64> {
    if !(t_cross_k > 0.0) {
        return Err(Error::usage("crossing temperature must be > 0"));
    }
    let below = p.athermal_rate() + p.alpha * t_cross_k;
    let excess = probe_hz - below;
    if excess < 0.0 || (excess == 0.0 && p.alpha == 0.0) {
        return Err(Error::Calibration(format!(
            "probe {probe_hz:e} Hz does not exceed the athermal plus direct rate {below:e} Hz"
        )));
    }
    Ok(excess / t_cross_k.powi(5))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProbeContext {
    pub interrogation_frequency_hz: f64,
    pub temperature_k: f64,
}

impl ProbeContext {
    pub fn new(interrogation_frequency_hz: f64, temperature_k: f64) -> Result<Self> {
        if !(interrogation_frequency_hz > 0.0 && temperature_k > 0.0) {
            return Err(Error::usage("probe frequency and temperature must be > 0"));
        }
        Ok(ProbeContext { interrogation_frequency_hz, temperature_k })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SymmetryRegime {
    StaticLowSymmetry,
    MotionallyAveraged,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RegimeReport {
    pub regime: SymmetryRegime,
    pub rate_hz: f64,
    /// Γ(T) / probe frequency.
    pub margin: f64,
}

/// Averaged once reorientation is at least as fast as the probe.
pub fn classify_regime(p: &RateParams, probe: &ProbeContext) -> Result<RegimeReport> {
    let rate = gamma(p, probe.temperature_k)?;
    let margin = rate / probe.interrogation_frequency_hz;
    let regime = if rate >= probe.interrogation_frequency_hz {
        SymmetryRegime::MotionallyAveraged
    } else {
        SymmetryRegime::StaticLowSymmetry
    };
    Ok(RegimeReport { regime, rate_hz: rate, margin })
}

/// Temperature in `[0, t_max]` where Γ(T) equals the probe frequency.
pub fn crossing_temperature(p: &RateParams, probe_hz: f64, t_max_k: f64) -> Result<f64> {
    let mut f = |t: f64| gamma(p, t).map(|g| g - probe_hz).unwrap_or(f64::NAN);
    numerics::find_root(&mut f, 0.0, t_max_k)
}
