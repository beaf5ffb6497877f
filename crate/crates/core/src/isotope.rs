//! Isotope shifts of the rotational zero-point energy.
//!
//! Substituting the central atom changes the mass-weighted path length. A
//! fraction `f` of the path is attributed to the substituted atom, so that
//! `L′ = L·√(1 + f·Δm/m_ref)` while the barrier is unchanged.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics;
use crate::rotor::{solve_bands, RotorPotential, SolveOptions};
use crate::units::{mev_to_uev, SI28_MASS};

/// Which zero-point energies enter the line shift.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ShiftRecipe {
    /// Only the excited-state rotational zero-point energy moves.
    #[default]
    ExcitedOnly,
    /// Difference of excited and electronic-ground zero-point energies.
    BothStates,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct IsotopeScaling {
    pub reference_mass: f64,
    pub participation_fraction: f64,
    pub recipe: ShiftRecipe,
}

impl Default for IsotopeScaling {
    fn default() -> Self {
        IsotopeScaling { reference_mass: SI28_MASS, participation_fraction: 1.0, recipe: ShiftRecipe::ExcitedOnly }
    }
}

impl IsotopeScaling {
    pub fn new(reference_mass: f64, participation_fraction: f64, recipe: ShiftRecipe) -> Result<Self> {
        let s = IsotopeScaling { reference_mass, participation_fraction, recipe };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.reference_mass.is_finite() && self.reference_mass > 0.0) {
            return Err(Error::usage("reference mass must be > 0"));
        }
        let f = self.participation_fraction;
        if !(f > 0.0 && f <= 1.0) {
            return Err(Error::usage(format!("participation fraction {f} outside (0, 1]")));
        }
        Ok(())
    }

    pub fn with_fraction(self, participation_fraction: f64) -> Self {
        IsotopeScaling { participation_fraction, ..self }
    }
}

pub fn scale_path(pot: &RotorPotential, s: &IsotopeScaling, new_mass: f64) -> Result<RotorPotential> {
    s.validate()?;
    if !(new_mass.is_finite() && new_mass > 0.0) {
        return Err(Error::usage(format!("isotope mass must be > 0, got {new_mass}")));
    }
    let factor = 1.0 + s.participation_fraction * (new_mass - s.reference_mass) / s.reference_mass;
    if factor <= 0.0 {
        return Err(Error::usage(format!("mass {new_mass} gives a non-positive path scale")));
    }
    RotorPotential::new(pot.path_length * factor.sqrt(), pot.barrier, pot.wells)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IsotopeShift {
    /// |shift| in μeV.
    pub magnitude_uev: f64,
    /// Signed change of the transition energy (new − reference) in μeV.
    pub signed_uev: f64,
}

fn transition_zpe(excited: &RotorPotential, ground: &RotorPotential, recipe: ShiftRecipe, opts: &SolveOptions) -> Result<f64> {
    let exc = solve_bands(excited, 2, opts)?.zero_point_mev();
    Ok(match recipe {
        ShiftRecipe::ExcitedOnly => exc,
        ShiftRecipe::BothStates => exc - solve_bands(ground, 2, opts)?.zero_point_mev(),
    })
}

pub fn zpl_isotope_shift(
    excited: &RotorPotential,
    ground: &RotorPotential,
    s: &IsotopeScaling,
    new_mass: f64,
) -> Result<IsotopeShift> {
    let opts = SolveOptions::default();
    let reference = transition_zpe(excited, ground, s.recipe, &opts)?;
    let shifted = transition_zpe(
        &scale_path(excited, s, new_mass)?,
        &scale_path(ground, s, new_mass)?,
        s.recipe,
        &opts,
    )?;
    let signed = mev_to_uev(shifted - reference);
    Ok(IsotopeShift { magnitude_uev: signed.abs(), signed_uev: signed })
}

/// Participation fraction that reproduces `target_shift_uev` at `target_mass`.
pub fn calibrate_participation(
    excited: &RotorPotential,
    ground: &RotorPotential,
    recipe: ShiftRecipe,
    target_shift_uev: f64,
    target_mass: f64,
) -> Result<f64> {
    let base = IsotopeScaling { recipe, ..Default::default() };
    let shift_at = |f: f64| zpl_isotope_shift(excited, ground, &base.with_fraction(f), target_mass);
    let max_shift = shift_at(1.0)?.magnitude_uev;
    if !(target_shift_uev > 0.0 && target_shift_uev <= max_shift) {
        return Err(Error::Calibration(format!(
            "target shift {target_shift_uev} ueV unreachable; attainable range with f in (0, 1] is (0, {max_shift:.4}] ueV"
        )));
    }
    let mut failure = None;
    let mut residual = |f: f64| match shift_at(f) {
        Ok(s) => s.magnitude_uev - target_shift_uev,
        Err(e) => {
            failure = Some(e);
            f64::NAN
        }
    };
    let f = numerics::find_root(&mut residual, 1e-9, 1.0);
    if let Some(e) = failure {
        return Err(e);
    }
    f
}
