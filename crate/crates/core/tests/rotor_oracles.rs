use std::f64::consts::TAU;

use gcenter_core::numerics::{eig_tridiag, SymTridiag};
use gcenter_core::rotor::{
    fit_potential, solve_bands, solve_bands_fixed, BandStructure, FitTargets, GapDefinition,
    RotorPotential, SolveOptions,
};
use gcenter_core::units::constants;
use proptest::prelude::*;

fn bands(pot: &RotorPotential) -> BandStructure {
    solve_bands(pot, 2, &SolveOptions::default()).unwrap()
}

fn paper_sets() -> [RotorPotential; 3] {
    [
        RotorPotential::singlet_excited(),
        RotorPotential::triplet_excited(),
        RotorPotential::electronic_ground(),
    ]
}

/// Boundary condition at an end of the half cell.
#[derive(Clone, Copy)]
enum Edge {
    Even,
    Odd,
}

/// Real-space oracle: -C ψ'' + V ψ on the half cell between a well minimum
/// and the next barrier top, cell-centred grid with reflecting (even) or
/// antisymmetric (odd) ghost points. Even/even and even/odd pick out the
/// periodic and antiperiodic edges of the lowest band.
fn half_cell_level(pot: &RotorPotential, points: usize, left: Edge, right: Edge) -> f64 {
    let c = constants().kinetic_coefficient;
    let half_cell = pot.path_length / (2.0 * pot.wells as f64);
    let h = half_cell / points as f64;
    let stiffness = c / (h * h);
    let diag: Vec<f64> = (0..points)
        .map(|i| {
            let q = (i as f64 + 0.5) * h;
            let v = 0.5 * pot.barrier * (1.0 - (TAU * pot.wells as f64 * q / pot.path_length).cos());
            let mut d = 2.0 * stiffness + v;
            let edge = if i == 0 {
                Some(left)
            } else if i == points - 1 {
                Some(right)
            } else {
                None
            };
            match edge {
                Some(Edge::Even) => d -= stiffness,
                Some(Edge::Odd) => d += stiffness,
                None => {}
            }
            d
        })
        .collect();
    let off = vec![-stiffness; points - 1];
    eig_tridiag(&SymTridiag::new(diag, off).unwrap(), 1).unwrap()[0]
}

#[test]
fn finite_difference_grid_agrees_for_singlet() {
    let pot = RotorPotential::singlet_excited();
    let n = 4096;
    let e0 = half_cell_level(&pot, n, Edge::Even, Edge::Even);
    let e3 = half_cell_level(&pot, n, Edge::Even, Edge::Odd);
    let o_even = half_cell_level(&pot, n, Edge::Odd, Edge::Even);
    let o_odd = half_cell_level(&pot, n, Edge::Odd, Edge::Odd);
    let fd_delta_uev = (e3 - e0) / 4.0 * 1e3;
    let fd_omega = 0.5 * (o_even + o_odd) - 0.5 * (e0 + e3);

    let pw = bands(&pot);
    assert!(
        (fd_delta_uev / pw.delta_uev - 1.0).abs() < 0.01,
        "δ: grid {fd_delta_uev} vs plane wave {}",
        pw.delta_uev
    );
    assert!(
        (fd_omega / pw.hbar_omega_mev - 1.0).abs() < 1e-3,
        "ℏω: grid {fd_omega} vs plane wave {}",
        pw.hbar_omega_mev
    );
}

#[test]
fn quartet_spacing_ratios() {
    for pot in [RotorPotential::singlet_excited(), RotorPotential::triplet_excited()] {
        let b = bands(&pot);
        let e: Vec<f64> = (0..=3).map(|k| b.energy(0, k).unwrap()).collect();
        let d = b.delta_uev * 1e-3;
        let ratios = [(e[1] - e[0]) / d, (e[2] - e[1]) / d, (e[3] - e[2]) / d];
        for (r, expected) in ratios.iter().zip([1.0, 2.0, 1.0]) {
            assert!((r / expected - 1.0).abs() < 0.01, "{pot:?}: {ratios:?}");
        }
    }
}

#[test]
fn tight_binding_band_fit() {
    for pot in paper_sets() {
        let b = bands(&pot);
        let xs: Vec<f64> = b.sectors.iter().map(|&k| (TAU * k as f64 / 6.0).cos()).collect();
        let ys = &b.sector_energies[0];
        // Least squares for y = a − 2t·x; work relative to the band mean to keep
        // the tiny bandwidth out of cancellation.
        let n = xs.len() as f64;
        let y_mean = ys.iter().sum::<f64>() / n;
        let x_mean = xs.iter().sum::<f64>() / n;
        let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - x_mean) * (y - y_mean)).sum();
        let sxx: f64 = xs.iter().map(|x| (x - x_mean) * (x - x_mean)).sum();
        let slope = sxy / sxx;
        let t = -slope / 2.0;
        let max_residual = xs
            .iter()
            .zip(ys)
            .map(|(x, y)| ((y - y_mean) - slope * (x - x_mean)).abs())
            .fold(0.0, f64::max);
        assert!(max_residual < 0.01 * 4.0 * t, "{pot:?}: residual {max_residual} vs t {t}");
        assert!((t * 1e3 / b.delta_uev - 1.0).abs() < 0.01, "{pot:?}: t {t} vs δ {}", b.delta_uev);
    }
}

#[test]
fn sector_pairs_are_degenerate() {
    for pot in paper_sets() {
        let b = bands(&pot);
        for band in 0..b.band_count() {
            for k in 1..=2 {
                let plus = b.energy(band, k).unwrap();
                let minus = b.energy(band, -k).unwrap();
                assert!((plus - minus).abs() <= 1e-12 * plus.abs(), "{pot:?} band {band} k {k}");
            }
        }
    }
}

#[test]
fn scaling_invariance_is_exact() {
    for pot in paper_sets() {
        let scaled = RotorPotential::new(2.0 * pot.path_length, pot.barrier / 4.0, pot.wells).unwrap();
        let a = solve_bands_fixed(&pot, 64, 3, GapDefinition::Centroid).unwrap();
        let b = solve_bands_fixed(&scaled, 64, 3, GapDefinition::Centroid).unwrap();
        for (ra, rb) in a.sector_energies.iter().zip(&b.sector_energies) {
            for (ea, eb) in ra.iter().zip(rb) {
                assert!((ea / 4.0 - eb).abs() <= 1e-12 * eb.abs(), "{ea} vs {eb}");
            }
        }
    }
}

#[test]
fn variational_monotonicity_in_basis_size() {
    for pot in paper_sets() {
        let mut previous: Option<BandStructure> = None;
        for jmax in [4, 6, 8, 12, 16, 32, 64, 128] {
            let b = solve_bands_fixed(&pot, jmax, 3, GapDefinition::Centroid).unwrap();
            if let Some(prev) = &previous {
                for (rp, rb) in prev.sector_energies.iter().zip(&b.sector_energies) {
                    for (ep, eb) in rp.iter().zip(rb) {
                        assert!(*eb <= ep + 4.0 * f64::EPSILON * ep.abs(), "jmax {jmax}: {eb} > {ep}");
                    }
                }
            }
            previous = Some(b);
        }
    }
}

#[test]
fn fit_round_trips_recover_generators() {
    for generator in [RotorPotential::singlet_excited(), RotorPotential::triplet_excited()] {
        let b = bands(&generator);
        let targets = FitTargets { hbar_omega_mev: b.hbar_omega_mev, delta_uev: b.delta_uev };
        let fit = fit_potential(&targets, 6, None, &SolveOptions::default()).unwrap();
        let dl = fit.potential.path_length / generator.path_length - 1.0;
        let dv = fit.potential.barrier / generator.barrier - 1.0;
        assert!(dl.abs() < 1e-6 && dv.abs() < 1e-6, "{generator:?} -> {:?}", fit.potential);
        assert!((fit.bands_delta_uev / targets.delta_uev - 1.0).abs() < 1e-4);
        assert!((fit.bands_hbar_omega_mev / targets.hbar_omega_mev - 1.0).abs() < 1e-4);
    }
}

#[test]
fn fit_to_observed_targets_lands_near_published_parameters() {
    let targets = FitTargets { hbar_omega_mev: 12.4, delta_uev: 2.5 };
    let fit = fit_potential(&targets, 6, None, &SolveOptions::default()).unwrap();
    assert!((fit.potential.path_length / 22.5 - 1.0).abs() < 0.1, "{:?}", fit.potential);
    assert!((fit.potential.barrier / 33.0 - 1.0).abs() < 0.1, "{:?}", fit.potential);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn scaling_invariance_random(l in 10.0f64..40.0, v0 in 0.0f64..120.0) {
        let pot = RotorPotential::new(l, v0, 6).unwrap();
        let scaled = RotorPotential::new(2.0 * l, v0 / 4.0, 6).unwrap();
        let a = solve_bands_fixed(&pot, 32, 2, GapDefinition::Centroid).unwrap();
        let b = solve_bands_fixed(&scaled, 32, 2, GapDefinition::Centroid).unwrap();
        for (ra, rb) in a.sector_energies.iter().zip(&b.sector_energies) {
            for (ea, eb) in ra.iter().zip(rb) {
                prop_assert!((ea / 4.0 - eb).abs() <= 1e-12 * eb.abs().max(1e-300));
            }
        }
    }

    #[test]
    fn ground_band_ascends_with_k(l in 15.0f64..35.0, v0 in 5.0f64..100.0) {
        let b = solve_bands(&RotorPotential::new(l, v0, 6).unwrap(), 2, &SolveOptions::default()).unwrap();
        let e: Vec<f64> = (0..=3).map(|k| b.energy(0, k).unwrap()).collect();
        for w in e.windows(2) {
            prop_assert!(w[1] >= w[0]);
        }
        prop_assert!((b.total_splitting_uev - 4.0 * b.delta_uev).abs() <= 1e-12 * b.total_splitting_uev);
    }
}
