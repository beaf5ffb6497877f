use std::path::{Path, PathBuf};

use gcenter_core::isotope::{calibrate_participation, scale_path, zpl_isotope_shift, IsotopeScaling, ShiftRecipe};
use gcenter_core::rates::{
    calibrate_beta, classify_regime, crossing_temperature, rate_breakdown, ProbeContext, RateParams, SymmetryRegime,
};
use gcenter_core::report::paper_report;
use gcenter_core::rotor::{
    fit_potential, harmonic_estimate, solve_bands, solve_bands_fixed, FitTargets, GapDefinition, RotorPotential,
    SolveOptions,
};
use gcenter_core::spectrum::{
    broaden, fine_structure_lines, BroadeningModel, EnergyGrid, LineShape, LineStatistics, ACTIVATION_MEV, G_LINE_EV,
};
use gcenter_core::spin::{
    cubic_images, default_defect_frame, motional_average, orientation_branches, ResonanceOptions, TripletSpinSystem,
};
use gcenter_core::tensor::{
    average_over_rotations, axial_parameters, identity3, remove_isotropic, traceless_sign_assignments, AxisFrame,
    SymTensor3,
};
use gcenter_core::units::{uev_to_hz, G_DEFAULT, SI28_MASS};
use gcenter_core::{Error, Result};
use serde_json::{json, Value};

use crate::args::{
    AverageArgs, FitArgs, HyperfinePreset, IsotopeArgs, OdmrArgs, OrientationSet, Preset, RatesArgs, ReproArgs,
    SolveArgs, SpectrumArgs, TensorPreset, ZfsPreset,
};
use crate::output::{csv_bytes, fixed, num, resolve, sci, table, Outcome, PendingFile};

pub struct Context {
    pub solver: SolveOptions,
    pub out_dir: Option<PathBuf>,
    pub json: bool,
}

impl Context {
    fn file(&self, path: &Path, bytes: Vec<u8>) -> PendingFile {
        PendingFile { path: resolve(self.out_dir.as_deref(), path), bytes }
    }
}

fn potential_json(p: &RotorPotential) -> Value {
    json!({ "L": p.path_length, "V0_meV": p.barrier, "N": p.wells })
}

fn potential_line(p: &RotorPotential) -> String {
    format!("potential: L = {} sqrt(u)*A, V0 = {} meV, N = {}\n", p.path_length, p.barrier, p.wells)
}

pub fn solve(a: &SolveArgs, ctx: &Context) -> Result<Outcome> {
    let pot = a.potential.resolve(Preset::Singlet)?;
    let n_bands = a.bands.unwrap_or(3);
    let gap: GapDefinition = a.gap.map(Into::into).unwrap_or_default();
    let bands = match a.jmax {
        Some(j) => solve_bands_fixed(&pot, j, n_bands, gap)?,
        None => solve_bands(&pot, n_bands, &SolveOptions { gap, ..ctx.solver })?,
    };
    let origin = bands.levels.iter().map(|l| l.energy_mev).fold(f64::INFINITY, f64::min);
    let headers = ["band", "k", "degeneracy", "energy_meV", "offset_ueV"];
    let mut csv_rows = Vec::new();
    let mut text_rows = Vec::new();
    let mut levels = Vec::new();
    for l in &bands.levels {
        let offset = (l.energy_mev - origin) * 1e3;
        csv_rows.push(vec![l.band.to_string(), l.k.to_string(), l.degeneracy.to_string(), num(l.energy_mev), num(offset)]);
        text_rows.push(vec![
            l.band.to_string(),
            l.k.to_string(),
            l.degeneracy.to_string(),
            fixed(l.energy_mev, 9),
            fixed(offset, 6),
        ]);
        levels.push(json!({
            "band": l.band, "k": l.k, "degeneracy": l.degeneracy,
            "energy_meV": l.energy_mev, "offset_ueV": offset,
        }));
    }
    let harmonic = harmonic_estimate(&pot);
    let gap_name = match bands.gap {
        GapDefinition::Centroid => "centroid",
        GapDefinition::LowestExcited => "lowest-excited",
    };
    let mut text = potential_line(&pot);
    text.push_str(&format!("basis: jmax = {}\n\n", bands.jmax));
    text.push_str(&table(&headers, &text_rows));
    text.push('\n');
    text.push_str(&table(
        &["quantity", "value"],
        &[
            vec!["delta_ueV".into(), fixed(bands.delta_uev, 6)],
            vec!["total_splitting_ueV".into(), fixed(bands.total_splitting_uev, 6)],
            vec![format!("hbar_omega_meV ({gap_name})"), fixed(bands.hbar_omega_mev, 6)],
            vec!["harmonic_estimate_meV".into(), fixed(harmonic, 6)],
            vec!["zero_point_meV".into(), fixed(bands.zero_point_mev(), 6)],
        ],
    ));
    let mut files = Vec::new();
    if let Some(p) = &a.csv {
        files.push(ctx.file(p, csv_bytes(&headers, &csv_rows)?));
    }
    Ok(Outcome {
        text,
        json: json!({
            "potential": potential_json(&pot),
            "jmax": bands.jmax,
            "gap_definition": gap_name,
            "delta_ueV": bands.delta_uev,
            "total_splitting_ueV": bands.total_splitting_uev,
            "hbar_omega_meV": bands.hbar_omega_mev,
            "harmonic_estimate_meV": harmonic,
            "zero_point_meV": bands.zero_point_mev(),
            "levels": levels,
        }),
        files,
        failed: false,
    })
}

pub fn fit(a: &FitArgs, ctx: &Context) -> Result<Outcome> {
    let targets = FitTargets { hbar_omega_mev: a.hbar_omega.unwrap_or(12.4), delta_uev: a.delta.unwrap_or(2.5) };
    let wells = a.wells.unwrap_or(6);
    let init = match (a.init_path_length, a.init_barrier) {
        (Some(l), Some(v)) => Some(RotorPotential::new(l, v, wells)?),
        (None, None) => None,
        _ => return Err(Error::usage("--init-L and --init-V0 must be given together")),
    };
    let r = fit_potential(&targets, wells, init, &ctx.solver)?;
    let rows = vec![
        vec!["L_sqrt_u_A".into(), fixed(r.potential.path_length, 9)],
        vec!["V0_meV".into(), fixed(r.potential.barrier, 9)],
        vec!["N".into(), wells.to_string()],
        vec!["delta_ueV".into(), fixed(r.bands_delta_uev, 9)],
        vec!["hbar_omega_meV".into(), fixed(r.bands_hbar_omega_mev, 9)],
        vec!["iterations".into(), r.iterations.to_string()],
        vec!["residual".into(), sci(r.residual)],
    ];
    let mut text = format!(
        "targets: hbar_omega = {} meV, delta = {} ueV\n\n",
        targets.hbar_omega_mev, targets.delta_uev
    );
    text.push_str(&table(&["quantity", "value"], &rows));
    Ok(Outcome {
        text,
        json: json!({
            "targets": { "hbar_omega_meV": targets.hbar_omega_mev, "delta_ueV": targets.delta_uev },
            "potential": potential_json(&r.potential),
            "delta_ueV": r.bands_delta_uev,
            "hbar_omega_meV": r.bands_hbar_omega_mev,
            "iterations": r.iterations,
            "residual": r.residual,
        }),
        ..Default::default()
    })
}

pub fn isotope(a: &IsotopeArgs, ctx: &Context) -> Result<Outcome> {
    let excited = a.excited.resolve(Preset::Singlet)?;
    let g = RotorPotential::electronic_ground();
    let ground = RotorPotential::new(
        a.ground_path_length.unwrap_or(g.path_length),
        a.ground_barrier.unwrap_or(g.barrier),
        excited.wells,
    )?;
    let recipe: ShiftRecipe = a.recipe.map(Into::into).unwrap_or_default();
    let reference_mass = a.reference_mass.unwrap_or(SI28_MASS);
    let masses = a.masses.clone().unwrap_or_else(|| vec![29.0, 30.0]);
    if masses.is_empty() {
        return Err(Error::usage("at least one isotope mass is required"));
    }
    let (fraction, calibrated) = match a.fraction {
        Some(f) => (f, false),
        None => {
            let target = a.target_shift.unwrap_or(54.0);
            let mass = a.target_mass.unwrap_or(29.0);
            if reference_mass != SI28_MASS {
                return Err(Error::usage("calibration uses the default reference mass; pass --fraction instead"));
            }
            (calibrate_participation(&excited, &ground, recipe, target, mass)?, true)
        }
    };
    let scaling = IsotopeScaling::new(reference_mass, fraction, recipe)?;
    let headers = ["mass_u", "L_excited_sqrt_u_A", "shift_ueV", "signed_shift_ueV"];
    let mut csv_rows = Vec::new();
    let mut text_rows = Vec::new();
    let mut entries = Vec::new();
    for &m in &masses {
        let shift = zpl_isotope_shift(&excited, &ground, &scaling, m)?;
        let l = scale_path(&excited, &scaling, m)?.path_length;
        csv_rows.push(vec![num(m), num(l), num(shift.magnitude_uev), num(shift.signed_uev)]);
        text_rows.push(vec![num(m), fixed(l, 6), fixed(shift.magnitude_uev, 4), fixed(shift.signed_uev, 4)]);
        entries.push(json!({
            "mass_u": m, "L_excited": l, "shift_ueV": shift.magnitude_uev, "signed_shift_ueV": shift.signed_uev,
        }));
    }
    let recipe_name = match recipe {
        ShiftRecipe::ExcitedOnly => "excited-only",
        ShiftRecipe::BothStates => "both-states",
    };
    let mut text = potential_line(&excited);
    text.push_str(&format!(
        "recipe: {recipe_name}, reference mass {reference_mass} u, participation fraction f = {fraction:.6}{}\n\n",
        if calibrated { " (calibrated)" } else { "" }
    ));
    text.push_str(&table(&headers, &text_rows));
    let mut files = Vec::new();
    if let Some(p) = &a.csv {
        files.push(ctx.file(p, csv_bytes(&headers, &csv_rows)?));
    }
    Ok(Outcome {
        text,
        json: json!({
            "excited": potential_json(&excited),
            "ground": potential_json(&ground),
            "recipe": recipe_name,
            "reference_mass_u": reference_mass,
            "participation_fraction": fraction,
            "calibrated": calibrated,
            "shifts": entries,
        }),
        files,
        failed: false,
    })
}

fn tensor_json(t: &SymTensor3) -> Value {
    json!({ "xx": t.xx, "yy": t.yy, "zz": t.zz, "xy": t.xy, "xz": t.xz, "yz": t.yz })
}

pub fn average_tensor(a: &AverageArgs, _ctx: &Context) -> Result<Outcome> {
    let axis = a.axis.unwrap_or([0.0, 1.0, 0.0]);
    let frame = AxisFrame::new(axis, a.order.unwrap_or(3))?;
    let inputs: Vec<(String, SymTensor3)> = if let Some(m) = a.magnitudes {
        let hyps = traceless_sign_assignments(m, 1e-2);
        if hyps.is_empty() {
            return Err(Error::usage(format!("no sign assignment of {m:?} is traceless within 1%")));
        }
        hyps.iter()
            .enumerate()
            .map(|(i, s)| (format!("signs {}", i + 1), SymTensor3::diag(s[0], s[1], s[2])))
            .collect()
    } else if let Some(t) = a.tensor {
        vec![("input".to_string(), t)]
    } else {
        let p = a.preset.unwrap_or(TensorPreset::CalculatedZfs);
        let name = clap::ValueEnum::to_possible_value(&p).map_or(String::new(), |v| v.get_name().to_string());
        vec![(name, p.tensor())]
    };
    if inputs.iter().any(|(_, t)| !t.is_finite()) {
        return Err(Error::usage("tensor components must be finite"));
    }
    let headers = ["tensor", "iso_MHz", "D_MHz", "E_MHz", "avg_xx", "avg_yy", "avg_zz", "avg_xy", "avg_xz", "avg_yz"];
    let mut rows = Vec::new();
    let mut results = Vec::new();
    for (label, t) in &inputs {
        let avg = average_over_rotations(t, &frame);
        let (iso, traceless) = remove_isotropic(&avg);
        let p = axial_parameters(&traceless, frame.axis)?;
        rows.push(vec![
            label.clone(),
            fixed(iso, 4),
            fixed(p.d, 4),
            fixed(p.e, 6),
            fixed(avg.xx, 4),
            fixed(avg.yy, 4),
            fixed(avg.zz, 4),
            fixed(avg.xy, 4),
            fixed(avg.xz, 4),
            fixed(avg.yz, 4),
        ]);
        results.push(json!({
            "label": label,
            "input_MHz": tensor_json(t),
            "averaged_MHz": tensor_json(&avg),
            "isotropic_MHz": iso,
            "D_MHz": p.d,
            "E_MHz": p.e,
        }));
    }
    let mut text = format!(
        "axis ({}, {}, {}), rotation order {}, tensors in MHz\n\n",
        frame.axis[0], frame.axis[1], frame.axis[2], frame.rotation_order
    );
    text.push_str(&table(&headers, &rows));
    Ok(Outcome {
        text,
        json: json!({ "axis": frame.axis, "rotation_order": frame.rotation_order, "tensors": results }),
        ..Default::default()
    })
}

fn regime_name(r: SymmetryRegime) -> &'static str {
    match r {
        SymmetryRegime::StaticLowSymmetry => "static_low_symmetry",
        SymmetryRegime::MotionallyAveraged => "motionally_averaged",
    }
}

pub fn rates(a: &RatesArgs, ctx: &Context) -> Result<Outcome> {
    let probe_hz = a.probe.unwrap_or(35.0) * 1e9;
    let base = RateParams::new(a.delta.unwrap_or(0.22), a.alpha.unwrap_or(0.0), 0.0)?;
    let (beta, calibrated_at) = match a.beta {
        Some(b) => (b, None),
        None => {
            let t = a.calibrate_at.unwrap_or(5.0);
            (calibrate_beta(&base, t, probe_hz)?, Some(t))
        }
    };
    let params = RateParams::new(base.delta_uev, base.alpha, beta)?;
    let temps = a.temperatures.clone().unwrap_or_else(|| vec![1.7, 5.0, 6.0, 30.0]);
    let headers = ["T_K", "athermal_Hz", "direct_Hz", "raman_Hz", "total_Hz", "margin", "regime"];
    let mut csv_rows = Vec::new();
    let mut text_rows = Vec::new();
    let mut entries = Vec::new();
    for &t in &temps {
        let b = rate_breakdown(&params, t)?;
        let r = classify_regime(&params, &ProbeContext::new(probe_hz, t)?)?;
        csv_rows.push(vec![num(t), num(b.athermal), num(b.direct), num(b.raman), num(b.total), num(r.margin), regime_name(r.regime).into()]);
        text_rows.push(vec![
            num(t),
            sci(b.athermal),
            sci(b.direct),
            sci(b.raman),
            sci(b.total),
            sci(r.margin),
            regime_name(r.regime).into(),
        ]);
        entries.push(json!({
            "T_K": t, "athermal_Hz": b.athermal, "direct_Hz": b.direct, "raman_Hz": b.raman,
            "total_Hz": b.total, "margin": r.margin, "regime": regime_name(r.regime),
        }));
    }
    let crossing = crossing_temperature(&params, probe_hz, 1000.0).ok();
    let mut text = format!(
        "delta = {} ueV, athermal rate 6*delta/h = {} Hz\nalpha = {} Hz/K, beta = {} Hz/K^5{}\nprobe = {} Hz, crossing temperature = {}\n\n",
        params.delta_uev,
        sci(6.0 * uev_to_hz(params.delta_uev)),
        params.alpha,
        sci(params.beta),
        calibrated_at.map_or(String::new(), |t| format!(" (calibrated at {t} K)")),
        sci(probe_hz),
        crossing.map_or("none below 1000 K".to_string(), |t| format!("{} K", fixed(t, 6))),
    );
    text.push_str(&table(&headers, &text_rows));
    let mut files = Vec::new();
    if let Some(p) = &a.csv {
        files.push(ctx.file(p, csv_bytes(&headers, &csv_rows)?));
    }
    Ok(Outcome {
        text,
        json: json!({
            "delta_ueV": params.delta_uev,
            "alpha_Hz_per_K": params.alpha,
            "beta_Hz_per_K5": params.beta,
            "beta_calibrated_at_K": calibrated_at,
            "probe_Hz": probe_hz,
            "crossing_temperature_K": crossing,
            "rates": entries,
        }),
        files,
        failed: false,
    })
}

pub fn spectrum(a: &SpectrumArgs, ctx: &Context) -> Result<Outcome> {
    let pot = a.potential.resolve(Preset::Singlet)?;
    let temperature = a.temperature.unwrap_or(1.4);
    let statistics: LineStatistics = a.statistics.map(Into::into).unwrap_or_default();
    let default = BroadeningModel::default();
    let shape: LineShape = a.shape.map(Into::into).unwrap_or(default.shape);
    let w0 = a.w0.unwrap_or(default.w0_uev);
    let ea = a.ea.unwrap_or(ACTIVATION_MEV);
    let model = match a.wa {
        Some(wa) => BroadeningModel { w0_uev: w0, wa_uev: wa, ea_mev: ea, shape },
        None => BroadeningModel::calibrated(w0, 20.0, 12.0, ea, shape),
    };
    model.validate()?;
    let bands = solve_bands(&pot, 2, &ctx.solver)?;
    let lines = fine_structure_lines(&bands, temperature, G_LINE_EV, statistics)?;
    let width = model.width_uev(temperature);
    let step = a.step.unwrap_or_else(|| (width / 10.0).clamp(1e-3, 0.05));
    if !(step > 0.0) {
        return Err(Error::usage("sampling step must be > 0"));
    }
    let grid = EnergyGrid::covering(&lines, width, 8.0, step);
    let sampled = broaden(&lines, &model, temperature, &grid)?;
    let maxima = sampled.local_maxima();

    let line_headers = ["offset_ueV", "degeneracy", "k", "intensity"];
    let line_rows: Vec<Vec<String>> = lines
        .lines
        .iter()
        .map(|l| vec![num(l.offset_uev), l.degeneracy.to_string(), l.k.to_string(), num(l.intensity)])
        .collect();
    let text_rows: Vec<Vec<String>> = lines
        .lines
        .iter()
        .map(|l| vec![fixed(l.offset_uev, 6), l.degeneracy.to_string(), l.k.to_string(), fixed(l.intensity, 6)])
        .collect();
    let mut text = potential_line(&pot);
    text.push_str(&format!(
        "ZPL {} eV, T = {} K, delta = {} ueV\n\n",
        lines.zpl_energy_ev,
        temperature,
        fixed(bands.delta_uev, 6)
    ));
    text.push_str(&table(&line_headers, &text_rows));
    text.push('\n');
    text.push_str(&table(
        &["quantity", "value"],
        &[
            vec!["width_ueV".into(), fixed(width, 6)],
            vec!["step_ueV".into(), num(step)],
            vec!["samples".into(), sampled.intensity.len().to_string()],
            vec!["area".into(), fixed(sampled.area(), 9)],
            vec!["local_maxima".into(), maxima.to_string()],
        ],
    ));
    let mut files = Vec::new();
    if let Some(p) = &a.csv {
        let rows: Vec<Vec<String>> = sampled
            .energy_uev_offset
            .iter()
            .zip(&sampled.intensity)
            .map(|(e, i)| vec![num(*e), num(*i)])
            .collect();
        files.push(ctx.file(p, csv_bytes(&["energy_uev_offset", "intensity"], &rows)?));
    }
    if let Some(p) = &a.lines_csv {
        files.push(ctx.file(p, csv_bytes(&line_headers, &line_rows)?));
    }
    let stats_name = match statistics {
        LineStatistics::Emission => "emission",
        LineStatistics::Absorption => "absorption",
    };
    Ok(Outcome {
        text,
        json: json!({
            "potential": potential_json(&pot),
            "temperature_K": if temperature.is_finite() { json!(temperature) } else { json!("inf") },
            "statistics": stats_name,
            "delta_ueV": bands.delta_uev,
            "zpl_eV": lines.zpl_energy_ev,
            "lines": lines.lines.iter().map(|l| json!({
                "offset_ueV": l.offset_uev, "degeneracy": l.degeneracy, "k": l.k, "intensity": l.intensity,
            })).collect::<Vec<_>>(),
            "width_ueV": width,
            "step_ueV": step,
            "area": sampled.area(),
            "local_maxima": maxima,
        }),
        files,
        failed: false,
    })
}

fn zfs_input(a: &OdmrArgs) -> SymTensor3 {
    if let Some(t) = a.zfs {
        return t;
    }
    match a.preset.unwrap_or(ZfsPreset::Calculated) {
        ZfsPreset::Calculated => SymTensor3::calculated_zfs(),
        ZfsPreset::Measured => SymTensor3::measured_zfs(),
        ZfsPreset::Free => SymTensor3::default(),
    }
}

fn odmr_systems(a: &OdmrArgs) -> Result<Vec<(Option<[f64; 3]>, TripletSpinSystem)>> {
    if let Some(sys) = a.system {
        if a.sign_hypotheses {
            return Err(Error::usage("sign hypotheses need a diagonal ZFS input, not a full system"));
        }
        sys.validate()?;
        return Ok(vec![(None, sys)]);
    }
    let hyperfine = match a.hyperfine.unwrap_or(HyperfinePreset::None) {
        HyperfinePreset::None => None,
        HyperfinePreset::Calculated => Some(SymTensor3::calculated_hyperfine()),
        HyperfinePreset::Measured => Some(SymTensor3::measured_hyperfine()),
    };
    let g = a.g.unwrap_or(G_DEFAULT);
    let frame = if a.preset == Some(ZfsPreset::Free) { identity3() } else { default_defect_frame() };
    let raw = zfs_input(a);
    let measured = a.zfs.is_none() && a.preset == Some(ZfsPreset::Measured);
    if a.sign_hypotheses {
        if raw.xy != 0.0 || raw.xz != 0.0 || raw.yz != 0.0 {
            return Err(Error::usage("sign hypotheses need a diagonal ZFS tensor"));
        }
        let hyps = traceless_sign_assignments([raw.xx, raw.yy, raw.zz], 1e-2);
        if hyps.is_empty() {
            return Err(Error::usage("no sign assignment of the ZFS magnitudes is traceless within 1%"));
        }
        return hyps
            .into_iter()
            .map(|s| {
                let (_, zfs) = remove_isotropic(&SymTensor3::diag(s[0], s[1], s[2]));
                Ok((Some(s), TripletSpinSystem::new(zfs, g, hyperfine, frame)?))
            })
            .collect();
    }
    // Tabulated magnitudes are rounded and leave a small trace.
    let zfs = if measured { remove_isotropic(&raw).1 } else { raw };
    Ok(vec![(None, TripletSpinSystem::new(zfs, g, hyperfine, frame)?)])
}

pub fn odmr(a: &OdmrArgs, ctx: &Context) -> Result<Outcome> {
    let direction = a.direction.unwrap_or([0.0, 1.0, 1.0]);
    let probe = a.probe.unwrap_or(35.0);
    let b_max = a.b_max.unwrap_or(2.0);
    let options = ResonanceOptions { scan_points: a.scan_points.unwrap_or(2000), ..Default::default() };
    let average = a.average_axis.map(|axis| AxisFrame::new(axis, 3)).transpose()?;
    let systems = odmr_systems(a)?;
    let hypotheses = systems.len() > 1 || a.sign_hypotheses;

    let mut headers = vec!["orientation_id", "B_tesla", "transition", "multiplicity"];
    if hypotheses {
        headers.insert(0, "sign_hypothesis");
    }
    let mut csv_rows = Vec::new();
    let mut text_rows = Vec::new();
    let mut results = Vec::new();
    for (h, (signs, base)) in systems.iter().enumerate() {
        let sys = match &average {
            Some(frame) => motional_average(base, frame),
            None => *base,
        };
        let orientations = match a.orientations.unwrap_or(OrientationSet::Cubic) {
            OrientationSet::Cubic => cubic_images(&sys),
            OrientationSet::Identity => vec![identity3()],
        };
        let branches = orientation_branches(&sys, &orientations, direction, probe, b_max, &options)?;
        for b in &branches {
            for (id, label) in &b.members {
                let mut row = vec![id.to_string(), num(b.field_t), label.clone(), b.multiplicity.to_string()];
                let mut trow = vec![id.to_string(), fixed(b.field_t, 7), label.clone(), b.multiplicity.to_string()];
                if hypotheses {
                    row.insert(0, (h + 1).to_string());
                    trow.insert(0, (h + 1).to_string());
                }
                csv_rows.push(row);
                text_rows.push(trow);
            }
        }
        results.push(json!({
            "signs_MHz": signs,
            "zfs_MHz": tensor_json(&sys.zfs),
            "orientations": orientations.len(),
            "branches": branches.iter().map(|b| json!({
                "B_tesla": b.field_t,
                "multiplicity": b.multiplicity,
                "members": b.members.iter().map(|(id, t)| json!({"orientation_id": id, "transition": t})).collect::<Vec<_>>(),
            })).collect::<Vec<_>>(),
        }));
    }
    let mut text = format!(
        "probe {probe} GHz, field along ({}, {}, {}), sweep (0, {b_max}] T{}\n",
        direction[0],
        direction[1],
        direction[2],
        if average.is_some() { ", motionally averaged" } else { "" }
    );
    for (h, (signs, _)) in systems.iter().enumerate() {
        if let Some(s) = signs {
            text.push_str(&format!("sign hypothesis {}: principal values ({}, {}, {}) MHz\n", h + 1, s[0], s[1], s[2]));
        }
    }
    text.push('\n');
    text.push_str(&table(&headers, &text_rows));
    let mut files = Vec::new();
    if let Some(p) = &a.csv {
        files.push(ctx.file(p, csv_bytes(&headers, &csv_rows)?));
    }
    Ok(Outcome {
        text,
        json: json!({
            "probe_GHz": probe,
            "direction": direction,
            "B_max_T": b_max,
            "motionally_averaged": average.is_some(),
            "systems": results,
        }),
        files,
        failed: false,
    })
}

pub fn paper_repro(a: &ReproArgs, ctx: &Context) -> Result<Outcome> {
    let report = paper_report()?;
    let text = report.to_text();
    let json = serde_json::to_value(&report).map_err(|e| Error::compute(e.to_string()))?;
    let mut files = Vec::new();
    if let Some(p) = &a.output {
        let body = if ctx.json { crate::output::envelope("paper-repro", json.clone()) } else { text.clone() };
        files.push(ctx.file(p, body.into_bytes()));
    }
    Ok(Outcome { text, json, files, failed: !report.all_pass() })
}
