//! Reproduction report: computed quantities next to published reference values.

use serde::Serialize;

use crate::error::Result;
use crate::isotope::{calibrate_participation, zpl_isotope_shift, IsotopeScaling, ShiftRecipe};
use crate::rates::{calibrate_beta, RateParams};
use crate::rotor::{harmonic_estimate, solve_bands, RotorPotential, SolveOptions};
use crate::spectrum::{broaden, fine_structure_lines, BroadeningModel, EnergyGrid, LineShape, LineStatistics, G_LINE_EV};
use crate::spin::{resonance_fields, ResonanceOptions, TripletSpinSystem};
use crate::tensor::{average_over_rotations, axial_parameters, AxisFrame, SymTensor3};
use crate::units::uev_to_hz;

pub const REPORT_SCHEMA_VERSION: u32 = 1;

/// Published values the report compares against.
pub mod targets {
    pub const SINGLET_DELTA_UEV: f64 = 2.5;
    pub const ACTIVATION_MEV: f64 = 12.4;
    pub const TRIPLET_DELTA_UEV: f64 = 0.22;
    pub const TRIPLET_GAMMA0_GHZ: f64 = 0.321;
    pub const GROUND_DELTA_MAX_UEV: f64 = 0.01;
    pub const SHIFT_29_UEV: f64 = 54.0;
    pub const SHIFT_30_UEV: f64 = 106.0;
    pub const AVERAGED_D_MHZ: f64 = 1365.0;
    pub const BETA_HZ_PER_K5: f64 = 1.110e7;
    pub const PROBE_GHZ: f64 = 35.0;
    pub const CROSSOVER_K: f64 = 5.0;
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub unit: String,
    pub computed: f64,
    /// Published value, if any.
    pub reference: Option<f64>,
    pub lower: f64,
    pub upper: f64,
    pub pass: bool,
}

impl Check {
    fn within(name: &str, unit: &str, computed: f64, reference: Option<f64>, lower: f64, upper: f64) -> Self {
        Check {
            name: name.to_string(),
            unit: unit.to_string(),
            computed,
            reference,
            lower,
            upper,
            pass: computed >= lower && computed <= upper,
        }
    }

    fn relative(name: &str, unit: &str, computed: f64, reference: f64, tol: f64) -> Self {
        let half = reference.abs() * tol;
        Self::within(name, unit, computed, Some(reference), reference - half, reference + half)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub schema_version: u32,
    pub checks: Vec<Check>,
}

impl Report {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    /// Fixed-width text table.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!(
            "{:<40} {:>14} {:>12} {:>27}  {:<8} {}\n",
            "quantity", "computed", "reference", "accepted range", "unit", "status"
        ));
        for c in &self.checks {
            let reference = c.reference.map_or("-".to_string(), format_value);
            out.push_str(&format!(
                "{:<40} {:>14} {:>12} {:>27}  {:<8} {}\n",
                c.name,
                format_value(c.computed),
                reference,
                format!("[{}, {}]", format_value(c.lower), format_value(c.upper)),
                c.unit,
                if c.pass { "PASS" } else { "FAIL" }
            ));
        }
        let passed = self.checks.iter().filter(|c| c.pass).count();
        out.push_str(&format!("{passed}/{} checks passed\n", self.checks.len()));
        out
    }
}

fn format_value(v: f64) -> String {
    if v == 0.0 {
        "0".to_string()
    } else if v.abs() >= 1e5 || v.abs() < 1e-3 {
        format!("{v:.6e}")
    } else {
        format!("{v:.6}")
    }
}

/// Runs every comparison. The computation is deterministic.
pub fn paper_report() -> Result<Report> {
    use targets::*;
    let opts = SolveOptions::default();
    let mut checks = Vec::new();

    let singlet = RotorPotential::singlet_excited();
    let sb = solve_bands(&singlet, 2, &opts)?;
    checks.push(Check::within("singlet tunneling splitting delta", "ueV", sb.delta_uev, Some(SINGLET_DELTA_UEV), 2.0, 3.0));
    checks.push(Check::relative("singlet quartet span / (4 delta)", "-", sb.total_splitting_uev / (4.0 * sb.delta_uev), 1.0, 0.02));
    let harmonic = harmonic_estimate(&singlet);
    checks.push(Check::within("singlet band gap hbar*omega", "meV", sb.hbar_omega_mev, Some(ACTIVATION_MEV), 11.0, 14.0_f64.min(harmonic)));

    let triplet = RotorPotential::triplet_excited();
    let tb = solve_bands(&triplet, 2, &opts)?;
    checks.push(Check::within("triplet tunneling splitting delta", "ueV", tb.delta_uev, Some(TRIPLET_DELTA_UEV), 0.15, 0.33));
    let gamma0_ghz = 6.0 * uev_to_hz(tb.delta_uev) * 1e-9;
    checks.push(Check::within("triplet athermal rate 6 delta/h", "GHz", gamma0_ghz, Some(TRIPLET_GAMMA0_GHZ), 0.22, 0.48));

    let gb = solve_bands(&RotorPotential::electronic_ground(), 2, &opts)?;
    checks.push(Check::within("ground-state tunneling splitting delta", "ueV", gb.delta_uev, None, 0.0, GROUND_DELTA_MAX_UEV));

    let ground = RotorPotential::electronic_ground();
    let f = calibrate_participation(&singlet, &ground, ShiftRecipe::ExcitedOnly, SHIFT_29_UEV, 29.0)?;
    checks.push(Check::within("participation fraction f (calibrated)", "-", f, None, 0.0, 1.0));
    let scaling = IsotopeScaling::default().with_fraction(f);
    let s29 = zpl_isotope_shift(&singlet, &ground, &scaling, 29.0)?.magnitude_uev;
    let s30 = zpl_isotope_shift(&singlet, &ground, &scaling, 30.0)?.magnitude_uev;
    checks.push(Check::relative("29Si isotope shift", "ueV", s29, SHIFT_29_UEV, 1e-6));
    checks.push(Check::within("30Si isotope shift", "ueV", s30, Some(SHIFT_30_UEV), 100.0, 112.0));

    let avg = average_over_rotations(&SymTensor3::calculated_zfs(), &AxisFrame::new([0.0, 1.0, 0.0], 3)?);
    let axial = axial_parameters(&avg, [0.0, 1.0, 0.0])?;
    checks.push(Check::relative("motionally averaged D", "MHz", axial.d, AVERAGED_D_MHZ, 1.5e-3));
    checks.push(Check::within("motionally averaged E", "MHz", axial.e, None, -1e-9, 1e-9));

    let athermal = RateParams::new(TRIPLET_DELTA_UEV, 0.0, 0.0)?;
    checks.push(Check::relative("athermal rate for delta = 0.22 ueV", "GHz", athermal.athermal_rate() * 1e-9, TRIPLET_GAMMA0_GHZ, 0.01));
    let beta = calibrate_beta(&athermal, CROSSOVER_K, PROBE_GHZ * 1e9)?;
    checks.push(Check::relative("Raman coefficient beta (5 K, 35 GHz)", "Hz/K^5", beta, BETA_HZ_PER_K5, 1e-3));

    let lines = fine_structure_lines(&sb, 1.4, G_LINE_EV, LineStatistics::Emission)?;
    let narrow = BroadeningModel { w0_uev: 0.1, wa_uev: 0.0, ea_mev: ACTIVATION_MEV, shape: LineShape::Gaussian };
    let resolved = broaden(&lines, &narrow, 1.4, &EnergyGrid::covering(&lines, 0.1, 8.0, 0.005))?.local_maxima();
    checks.push(Check::within("ZPL maxima at 1.4 K (w0 = 0.1 ueV)", "count", resolved as f64, Some(4.0), 4.0, 4.0));
    let hot = fine_structure_lines(&sb, 20.0, G_LINE_EV, LineStatistics::Emission)?;
    let model = BroadeningModel::default();
    let width = model.width_uev(20.0);
    let merged = broaden(&hot, &model, 20.0, &EnergyGrid::covering(&hot, width, 8.0, 0.02))?.local_maxima();
    checks.push(Check::within("ZPL maxima at 20 K", "count", merged as f64, Some(1.0), 1.0, 1.0));

    let free = TripletSpinSystem::simple(SymTensor3::default())?;
    let fields = resonance_fields(&free, [0.0, 0.0, 1.0], PROBE_GHZ, 2.0, &ResonanceOptions::default())?;
    let b = fields.iter().find(|r| r.upper - r.lower == 1).map_or(f64::NAN, |r| r.field_t);
    checks.push(Check::within("free-spin resonance at 35 GHz", "T", b, None, 1.2489 - 1e-4, 1.2489 + 1e-4));

    Ok(Report { schema_version: REPORT_SCHEMA_VERSION, checks })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn report_passes_and_is_stable() {
        let a = paper_report().unwrap();
        assert!(a.all_pass(), "{}", a.to_text());
        let b = paper_report().unwrap();
        assert_eq!(a.to_text(), b.to_text());
    }
}
