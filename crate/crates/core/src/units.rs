//! Physical constants and energy unit conversions.
//!
//! Every physical literal used by the crate lives in this file. Values are
//! CODATA 2018 exact or recommended values; derived constants are computed
//! from them at compile time so outputs are bit-reproducible.
//!
//! Energies are carried internally in meV. Other units appear only at I/O
//! boundaries and go through [`convert_energy`].

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

// CODATA 2018 SI values.
const HBAR_J_S: f64 = 1.054_571_817e-34;
const PLANCK_J_S: f64 = 6.626_070_15e-34;
const ELEMENTARY_CHARGE_C: f64 = 1.602_176_634e-19;
const BOLTZMANN_J_PER_K: f64 = 1.380_649e-23;
const ATOMIC_MASS_UNIT_KG: f64 = 1.660_539_066_60e-27;
const BOHR_MAGNETON_J_PER_T: f64 = 9.274_010_078_3e-24;
const ANGSTROM_M: f64 = 1e-10;

/// Default isotropic electron g-factor for the triplet spin system.
pub const G_DEFAULT: f64 = 2.0023;

/// Mass of the reference silicon isotope, in u (mass number).
pub const SI28_MASS: f64 = 28.0;

/// Fixed set of constants expressed in the units used throughout the crate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PhysicalConstants {
    /// ℏ²/2 in meV·u·Å², the kinetic prefactor for a mass-weighted coordinate.
    pub kinetic_coefficient: f64,
    /// Planck constant in μeV per GHz.
    pub planck_h: f64,
    /// Boltzmann constant in meV per K.
    pub boltzmann_kb: f64,
    /// μ_B / h in GHz per T.
    pub bohr_magneton_over_h: f64,
    /// Free-electron g-factor.
    pub g_free_electron: f64,
}

pub const CODATA_2018: PhysicalConstants = PhysicalConstants {
    kinetic_coefficient: HBAR_J_S * HBAR_J_S
        / (2.0 * ATOMIC_MASS_UNIT_KG * ANGSTROM_M * ANGSTROM_M)
        / ELEMENTARY_CHARGE_C
        * 1e3,
    planck_h: PLANCK_J_S * 1e9 / ELEMENTARY_CHARGE_C * 1e6,
    boltzmann_kb: BOLTZMANN_J_PER_K / ELEMENTARY_CHARGE_C * 1e3,
    bohr_magneton_over_h: BOHR_MAGNETON_J_PER_T / PLANCK_J_S * 1e-9,
    g_free_electron: 2.002_319_304_362_56,
};

/// Shorthand for the constants every module uses.
pub fn constants() -> &'static PhysicalConstants {
    &CODATA_2018
}

/// Energy-like units accepted at I/O boundaries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum EnergyUnit {
    #[serde(rename = "meV")]
    MilliElectronVolt,
    #[serde(rename = "ueV")]
    MicroElectronVolt,
    #[serde(rename = "GHz")]
    GigaHertz,
    #[serde(rename = "MHz")]
    MegaHertz,
    /// Temperature equivalent, E / k_B.
    #[serde(rename = "K")]
    Kelvin,
}

impl EnergyUnit {
    pub const ALL: [EnergyUnit; 5] = [
        EnergyUnit::MilliElectronVolt,
        EnergyUnit::MicroElectronVolt,
        EnergyUnit::GigaHertz,
        EnergyUnit::MegaHertz,
        EnergyUnit::Kelvin,
    ];

    /// Size of one unit expressed in meV.
    fn in_mev(self) -> f64 {
        let c = constants();
        match self {
            EnergyUnit::MilliElectronVolt => 1.0,
            EnergyUnit::MicroElectronVolt => 1e-3,
            EnergyUnit::GigaHertz => c.planck_h * 1e-3,
            EnergyUnit::MegaHertz => c.planck_h * 1e-6,
            EnergyUnit::Kelvin => c.boltzmann_kb,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            EnergyUnit::MilliElectronVolt => "meV",
            EnergyUnit::MicroElectronVolt => "ueV",
            EnergyUnit::GigaHertz => "GHz",
            EnergyUnit::MegaHertz => "MHz",
            EnergyUnit::Kelvin => "K",
        }
    }
}

impl fmt::Display for EnergyUnit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

impl FromStr for EnergyUnit {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "meV" => Ok(EnergyUnit::MilliElectronVolt),
            "ueV" | "μeV" | "µeV" => Ok(EnergyUnit::MicroElectronVolt),
            "GHz" => Ok(EnergyUnit::GigaHertz),
            "MHz" => Ok(EnergyUnit::MegaHertz),
            "K" => Ok(EnergyUnit::Kelvin),
            other => Err(Error::usage(format!(
                "unknown energy unit '{other}' (expected meV, ueV, GHz, MHz or K)"
            ))),
        }
    }
}

/// Linear conversion between two energy units.
pub fn convert_energy(value: f64, from: EnergyUnit, to: EnergyUnit) -> f64 {
    if from == to {
        return value;
    }
    value * from.in_mev() / to.in_mev()
}

/// String-token variant of [`convert_energy`] for config and CLI input.
pub fn convert_energy_str(value: f64, from: &str, to: &str) -> Result<f64> {
    Ok(convert_energy(value, from.parse()?, to.parse()?))
}

pub fn uev_to_mev(value: f64) -> f64 {
    value * 1e-3
}

pub fn mev_to_uev(value: f64) -> f64 {
    value * 1e3
}

/// Energy in μeV to frequency in Hz.
pub fn uev_to_hz(value: f64) -> f64 {
    value / constants().planck_h * 1e9
}

/// Frequency in Hz to energy in μeV.
pub fn hz_to_uev(value: f64) -> f64 {
    value * 1e-9 * constants().planck_h
}

/// k_B·T in meV.
pub fn thermal_energy_mev(temperature_k: f64) -> f64 {
    constants().boltzmann_kb * temperature_k
}

/// Electron Zeeman frequency per tesla, g·μ_B/h, in MHz/T.
pub fn zeeman_mhz_per_tesla(g: f64) -> f64 {
    g * constants().bohr_magneton_over_h * 1e3
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn constants_match_codata() {
        let c = constants();
        assert!(close(c.kinetic_coefficient, 2.0902, 0.0005), "{}", c.kinetic_coefficient);
        assert!(close(c.planck_h, 4.135668, 1e-5), "{}", c.planck_h);
        assert!(close(c.boltzmann_kb, 0.0861733, 1e-6), "{}", c.boltzmann_kb);
        assert!(close(c.bohr_magneton_over_h, 13.99625, 1e-4), "{}", c.bohr_magneton_over_h);
    }

    #[test]
    fn microvolt_to_gigahertz() {
        let ghz = convert_energy(2.5, EnergyUnit::MicroElectronVolt, EnergyUnit::GigaHertz);
        assert!(close(ghz, 0.6045, 1e-4), "{ghz}");
        assert_eq!(convert_energy(0.0, EnergyUnit::MicroElectronVolt, EnergyUnit::GigaHertz), 0.0);
    }

    #[test]
    fn microvolt_to_millikelvin() {
        let mk = convert_energy(0.22, EnergyUnit::MicroElectronVolt, EnergyUnit::Kelvin) * 1e3;
        assert!(close(mk, 2.553, 1e-3), "{mk}");
    }

    #[test]
    fn unknown_unit_rejected() {
        let err = convert_energy_str(1.0, "eV", "meV").unwrap_err();
        assert!(err.is_usage());
        assert!("furlong".parse::<EnergyUnit>().is_err());
        assert_eq!("μeV".parse::<EnergyUnit>().unwrap(), EnergyUnit::MicroElectronVolt);
    }

    #[test]
    fn round_trip_all_pairs() {
        for &a in &EnergyUnit::ALL {
            for &b in &EnergyUnit::ALL {
                for &x in &[1e-9, 0.37, 12.4, 3.3e4, -7.1] {
                    let back = convert_energy(convert_energy(x, a, b), b, a);
                    assert!((back - x).abs() <= 1e-12 * x.abs(), "{a} -> {b}: {x} vs {back}");
                }
            }
        }
    }

    #[test]
    fn hz_helpers_invert() {
        let hz = uev_to_hz(0.22);
        assert!((hz_to_uev(hz) - 0.22).abs() < 1e-15);
        assert!(close(zeeman_mhz_per_tesla(G_DEFAULT), 28024.6, 0.5));
    }
}
