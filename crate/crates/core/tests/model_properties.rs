use gcenter_core::isotope::{calibrate_participation, zpl_isotope_shift, IsotopeScaling, ShiftRecipe};
use gcenter_core::rates::{
    calibrate_beta, classify_regime, crossing_temperature, gamma, rate_breakdown, ProbeContext, RateParams,
    SymmetryRegime,
};
use gcenter_core::rotor::{solve_bands, BandStructure, RotorPotential, SolveOptions};
use gcenter_core::spectrum::{
    broaden, fine_structure_lines, tail_mass, BroadeningModel, EnergyGrid, LineShape, LineStatistics, G_LINE_EV,
};
use gcenter_core::units::uev_to_hz;
use proptest::prelude::*;
use std::sync::OnceLock;

fn singlet_band() -> &'static BandStructure {
    static BAND: OnceLock<BandStructure> = OnceLock::new();
    BAND.get_or_init(|| solve_bands(&RotorPotential::singlet_excited(), 2, &SolveOptions::default()).unwrap())
}

fn ground() -> RotorPotential {
    RotorPotential::electronic_ground()
}

#[test]
fn isotope_shift_grows_with_mass() {
    let exc = RotorPotential::singlet_excited();
    for f in [0.25, 0.5, 1.0] {
        let s = IsotopeScaling::default().with_fraction(f);
        let shifts: Vec<f64> =
            [28.5, 29.0, 30.0, 31.0].iter().map(|&m| zpl_isotope_shift(&exc, &ground(), &s, m).unwrap().magnitude_uev).collect();
        assert!(shifts.windows(2).all(|w| w[1] > w[0]), "f = {f}: {shifts:?}");
    }
}

#[test]
fn isotope_shift_ratio_is_near_linear() {
    let exc = RotorPotential::singlet_excited();
    for recipe in [ShiftRecipe::ExcitedOnly, ShiftRecipe::BothStates] {
        for f in [0.25, 0.5, 1.0] {
            let s = IsotopeScaling { recipe, ..IsotopeScaling::default() }.with_fraction(f);
            let s29 = zpl_isotope_shift(&exc, &ground(), &s, 29.0).unwrap().magnitude_uev;
            let s30 = zpl_isotope_shift(&exc, &ground(), &s, 30.0).unwrap().magnitude_uev;
            let ratio = s30 / s29;
            assert!((1.85..=2.0).contains(&ratio), "{recipe:?} f = {f}: {ratio}");
        }
    }
}

#[test]
fn calibration_round_trip() {
    let exc = RotorPotential::singlet_excited();
    for f in [0.25, 0.5, 1.0] {
        let s = IsotopeScaling::default().with_fraction(f);
        let target = zpl_isotope_shift(&exc, &ground(), &s, 29.0).unwrap().magnitude_uev;
        let back = calibrate_participation(&exc, &ground(), ShiftRecipe::ExcitedOnly, target, 29.0).unwrap();
        assert!((back - f).abs() <= 1e-3, "{f} -> {back}");
    }
}

#[test]
fn athermal_rate_is_exact() {
    let p = RateParams::new(0.22, 3.0, 5.0).unwrap();
    assert_eq!(gamma(&p, 0.0).unwrap(), 6.0 * uev_to_hz(0.22));
}

#[test]
fn raman_overtakes_tunneling_near_two_kelvin() {
    let p = RateParams::triplet_calibrated();
    let excess = |t: f64| {
        let r = rate_breakdown(&p, t).unwrap();
        r.raman - r.athermal
    };
    let t_star = gcenter_core::numerics::find_root(excess, 0.5, 5.0).unwrap();
    assert!((t_star - 1.96).abs() < 0.01, "{t_star}");
    assert!(excess(2.0) > 0.0 && excess(1.5) < 0.0);
    for t in [2.5, 5.0, 20.0] {
        assert!(excess(t) > 0.0);
    }
}

#[test]
fn regime_flips_at_crossing() {
    for (alpha, beta) in [(0.0, 1.11e7), (1e8, 5e6), (2e9, 0.0)] {
        let p = RateParams::new(0.22, alpha, beta).unwrap();
        let t = crossing_temperature(&p, 35e9, 100.0).unwrap();
        let below = classify_regime(&p, &ProbeContext::new(35e9, t - 1e-6).unwrap()).unwrap();
        let above = classify_regime(&p, &ProbeContext::new(35e9, t + 1e-6).unwrap()).unwrap();
        assert_eq!(below.regime, SymmetryRegime::StaticLowSymmetry);
        assert_eq!(above.regime, SymmetryRegime::MotionallyAveraged);
    }
}

#[test]
fn thermal_intensities_at_resolved_temperature() {
    let lines = fine_structure_lines(singlet_band(), 1.4, G_LINE_EV, LineStatistics::Emission).unwrap();
    let first = lines.lines.first().unwrap();
    let last = lines.lines.last().unwrap();
    let expected = (-last.offset_uev / gcenter_core::units::mev_to_uev(gcenter_core::units::thermal_energy_mev(1.4))).exp();
    assert!((last.intensity / first.intensity - expected).abs() < 1e-12);
    assert!((last.intensity / first.intensity - 0.92).abs() < 0.01);
}

#[test]
fn peak_count_never_increases_with_width() {
    let lines = fine_structure_lines(singlet_band(), 1.4, G_LINE_EV, LineStatistics::Emission).unwrap();
    let mut previous = usize::MAX;
    for w in [0.05, 0.1, 0.3, 0.6, 1.0, 1.5, 2.0, 3.0, 5.0, 8.0, 12.0, 20.0] {
        for shape in [LineShape::Gaussian, LineShape::Lorentzian] {
            let model = BroadeningModel { w0_uev: w, wa_uev: 0.0, ea_mev: 12.4, shape };
            let grid = EnergyGrid::covering(&lines, w, 6.0, 0.01);
            let n = broaden(&lines, &model, 1.4, &grid).unwrap().local_maxima();
            if shape == LineShape::Gaussian {
                assert!(n <= previous, "w = {w}: {n} > {previous}");
                previous = n;
            }
        }
    }
    assert_eq!(previous, 1);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn gamma_increases_with_temperature(alpha in 0.0..1e9f64, beta in 1.0..1e8f64, t in 0.0..50.0f64, dt in 1e-3..10.0f64) {
        let p = RateParams::new(0.22, alpha, beta).unwrap();
        prop_assert!(gamma(&p, t + dt).unwrap() > gamma(&p, t).unwrap());
    }

    #[test]
    fn calibrated_beta_reaches_probe(t in 1.0..40.0f64, probe in 1e9..1e11f64) {
        let p = RateParams::new(0.22, 0.0, 0.0).unwrap();
        let beta = calibrate_beta(&p, t, probe).unwrap();
        let q = RateParams { beta, ..p };
        prop_assert!((gamma(&q, t).unwrap() / probe - 1.0).abs() < 1e-12);
    }

    #[test]
    fn intensities_are_normalized(t in 0.05..400.0f64, absorb in any::<bool>()) {
        let stats = if absorb { LineStatistics::Absorption } else { LineStatistics::Emission };
        let lines = fine_structure_lines(singlet_band(), t, G_LINE_EV, stats).unwrap();
        let total: f64 = lines.lines.iter().map(|l| l.intensity).sum();
        prop_assert!((total - 1.0).abs() < 1e-12);
        prop_assert!(lines.lines.iter().all(|l| l.intensity > 0.0));
    }

    #[test]
    fn broadened_area_is_unity(w in 0.05..15.0f64, step in 0.002..0.05f64, lorentz in any::<bool>()) {
        let lines = fine_structure_lines(singlet_band(), 1.4, G_LINE_EV, LineStatistics::Emission).unwrap();
        let shape = if lorentz { LineShape::Lorentzian } else { LineShape::Gaussian };
        let model = BroadeningModel { w0_uev: w, wa_uev: 0.0, ea_mev: 12.4, shape };
        let grid = EnergyGrid::covering(&lines, w, 8.0, step * w.min(1.0));
        let spectrum = broaden(&lines, &model, 1.4, &grid).unwrap();
        // Mass outside the sampled window is known analytically.
        let lo = spectrum.energy_uev_offset[0] - 0.5 * spectrum.step_uev;
        let hi = spectrum.energy_uev_offset.last().unwrap() + 0.5 * spectrum.step_uev;
        let outside: f64 = lines.lines.iter().map(|l| l.intensity * tail_mass(shape, w, lo - l.offset_uev, hi - l.offset_uev)).sum();
        prop_assert!((spectrum.area() + outside - 1.0).abs() < 1e-6, "{} + {}", spectrum.area(), outside);
        if !lorentz {
            prop_assert!((spectrum.area() - 1.0).abs() < 1e-6);
        }
    }
}
