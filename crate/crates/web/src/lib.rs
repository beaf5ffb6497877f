//! WebAssembly bindings for the browser demo in `www/`.
//!
//! Each export takes plain numbers and returns a JSON string, so the page
//! needs no generated TypeScript types. The same functions are callable from
//! Rust, which is how the tests exercise them.

use gcenter_core::rotor::{solve_bands, RotorPotential, SolveOptions};
use gcenter_core::spectrum::{
    broaden, fine_structure_lines, BroadeningModel, EnergyGrid, LineShape, LineStatistics, ACTIVATION_MEV, G_LINE_EV,
};
use gcenter_core::spin::{cubic_images, motional_average, orientation_branches, ResonanceOptions, TripletSpinSystem};
use gcenter_core::tensor::AxisFrame;
use serde_json::json;
use wasm_bindgen::prelude::*;

/// Upper bound on sampled spectrum points; keeps the page responsive.
const MAX_POINTS: f64 = 4000.0;

fn potential(l: f64, v0: f64, n: u32) -> Result<RotorPotential, String> {
    RotorPotential::new(l, v0, n).map_err(|e| e.to_string())
}

/// Band structure of the ring potential: per-band levels, δ and ℏω.
pub fn rotor_levels(l: f64, v0: f64, n: u32, bands: usize) -> Result<String, String> {
    let pot = potential(l, v0, n)?;
    let b = solve_bands(&pot, bands.clamp(2, 6), &SolveOptions::default()).map_err(|e| e.to_string())?;
    let zero = b.zero_point_mev();
    let levels: Vec<_> = (0..b.band_count())
        .flat_map(|band| {
            b.band_levels(band).map(move |lv| {
                json!({ "band": band, "k": lv.k, "degeneracy": lv.degeneracy, "energy_meV": lv.energy_mev - zero })
            })
        })
        .collect();
    Ok(json!({
        "delta_ueV": b.delta_uev,
        "hbar_omega_meV": b.hbar_omega_mev,
        "jmax": b.jmax,
        "levels": levels,
    })
    .to_string())
}

/// Emission fine structure at `temperature_k`, broadened with residual width
/// `w0_uev` and an activated width that reaches 12 μeV at 20 K.
pub fn zpl_spectrum(l: f64, v0: f64, n: u32, temperature_k: f64, w0_uev: f64) -> Result<String, String> {
    let pot = potential(l, v0, n)?;
    let b = solve_bands(&pot, 2, &SolveOptions::default()).map_err(|e| e.to_string())?;
    let lines = fine_structure_lines(&b, temperature_k, G_LINE_EV, LineStatistics::Emission).map_err(|e| e.to_string())?;
    let model = BroadeningModel::calibrated(w0_uev, 20.0, 12.0_f64.max(w0_uev), ACTIVATION_MEV, LineShape::Gaussian);
    let width = model.width_uev(temperature_k);
    let mut grid = EnergyGrid::covering(&lines, width, 8.0, (width / 10.0).clamp(1e-3, 0.05));
    let span = grid.max_uev - grid.min_uev;
    if span / grid.step_uev > MAX_POINTS {
        grid.step_uev = span / MAX_POINTS;
    }
    let s = broaden(&lines, &model, temperature_k, &grid).map_err(|e| e.to_string())?;
    Ok(json!({
        "width_ueV": width,
        "maxima": s.local_maxima(),
        "lines": lines.lines.iter().map(|l| json!({"offset_ueV": l.offset_uev, "intensity": l.intensity})).collect::<Vec<_>>(),
        "x": s.energy_uev_offset,
        "y": s.intensity,
    })
    .to_string())
}

/// Resonance branches of the calculated triplet for a field direction over
/// all cubic orientations, optionally averaged about the defect axis.
pub fn odmr_branches(direction: [f64; 3], probe_ghz: f64, b_max_t: f64, averaged: bool) -> Result<String, String> {
    let base = TripletSpinSystem::calculated();
    let sys = if averaged {
        motional_average(&base, &AxisFrame::new([0.0, 1.0, 0.0], 3).map_err(|e| e.to_string())?)
    } else {
        base
    };
    let orientations = cubic_images(&sys);
    let opts = ResonanceOptions { scan_points: 800, ..Default::default() };
    let branches =
        orientation_branches(&sys, &orientations, direction, probe_ghz, b_max_t, &opts).map_err(|e| e.to_string())?;
    Ok(json!({
        "orientations": orientations.len(),
        "branches": branches.iter().map(|b| json!({
            "B_tesla": b.field_t,
            "multiplicity": b.multiplicity,
            "transitions": b.members.iter().map(|(_, t)| t.clone()).collect::<Vec<_>>(),
        })).collect::<Vec<_>>(),
    })
    .to_string())
}

#[wasm_bindgen(js_name = rotorLevels)]
pub fn rotor_levels_js(l: f64, v0: f64, n: u32, bands: usize) -> Result<String, JsError> {
    rotor_levels(l, v0, n, bands).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = zplSpectrum)]
pub fn zpl_spectrum_js(l: f64, v0: f64, n: u32, temperature_k: f64, w0_uev: f64) -> Result<String, JsError> {
    zpl_spectrum(l, v0, n, temperature_k, w0_uev).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = odmrBranches)]
pub fn odmr_branches_js(x: f64, y: f64, z: f64, probe_ghz: f64, b_max_t: f64, averaged: bool) -> Result<String, JsError> {
    odmr_branches([x, y, z], probe_ghz, b_max_t, averaged).map_err(|e| JsError::new(&e))
}
