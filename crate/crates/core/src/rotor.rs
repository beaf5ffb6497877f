//! Hindered rotor on a ring.
//!
//! A particle moves along a closed, mass-weighted path of circumference `L`
//! (√u·Å) in the periodic well
//!
//! ```text
//! V(q) = (V₀/2)·(1 − cos(2πN·q/L))
//! ```
//!
//! with `N` equivalent minima. The Hamiltonian commutes with the N-fold ring
//! translation, so each Bloch sector `k` is solved separately in the plane-wave
//! basis `exp(i·2π(N·j + k)·q/L)`, `|j| ≤ jmax`. In that basis the cosine only
//! couples neighbouring `j`, which makes every sector a symmetric tridiagonal
//! matrix.
//!
//! The lowest band of a deep N-well ring is a tight-binding band
//! `E(k) = Ē − 2δ·cos(2πk/N)`; for N = 6 it shows up as the 1-2-2-1 quartet
//! with spacings δ, 2δ, δ.

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{self, eig_tridiag, SymTridiag, Tolerances};
use crate::units::{constants, mev_to_uev, uev_to_mev};

/// Periodic well along the reorientation path.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RotorPotential {
    /// Path circumference in √u·Å.
    #[serde(rename = "L")]
    pub path_length: f64,
    /// Barrier height in meV.
    #[serde(rename = "V0")]
    pub barrier: f64,
    /// Number of equivalent minima.
    #[serde(rename = "N", default = "default_wells")]
    pub wells: u32,
}

fn default_wells() -> u32 {
    6
}

impl RotorPotential {
    pub fn new(path_length: f64, barrier: f64, wells: u32) -> Result<Self> {
        let pot = RotorPotential { path_length, barrier, wells };
        pot.validate()?;
        Ok(pot)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.path_length.is_finite() && self.path_length > 0.0) {
            return Err(Error::usage(format!("path length L must be > 0, got {}", self.path_length)));
        }
        if !(self.barrier.is_finite() && self.barrier >= 0.0) {
            return Err(Error::usage(format!("barrier V0 must be >= 0, got {}", self.barrier)));
        }
        if self.wells == 0 {
            return Err(Error::usage("well count N must be >= 1"));
        }
        Ok(())
    }

    /// Excited singlet state, fitted to the observed fine structure.
    pub fn singlet_excited() -> Self {
        RotorPotential { path_length: 22.5, barrier: 33.0, wells: 6 }
    }

    /// Excited triplet state.
    pub fn triplet_excited() -> Self {
        RotorPotential { path_length: 25.7, barrier: 40.0, wells: 6 }
    }

    /// Electronic ground state.
    pub fn electronic_ground() -> Self {
        RotorPotential { path_length: 31.97, barrier: 89.0, wells: 6 }
    }

    /// Bloch sectors of the first zone, `-(N-1)/2 ..= N/2`.
    pub fn sectors(&self) -> std::ops::RangeInclusive<i32> {
        let n = self.wells as i32;
        -((n - 1) / 2)..=n / 2
    }

    /// Energy scale `ℏ²/2·(πN/L)²` of the equivalent Mathieu problem, in meV.
    pub fn mathieu_scale(&self) -> f64 {
        let a = PI * self.wells as f64 / self.path_length;
        constants().kinetic_coefficient * a * a
    }
}

/// One Bloch sector of the ring Hamiltonian.
#[derive(Debug, Clone, PartialEq)]
pub struct SectorHamiltonian {
    pub k: i32,
    pub jmax: usize,
    pub matrix: SymTridiag,
}

pub fn build_sector(pot: &RotorPotential, k: i32, jmax: usize) -> Result<SectorHamiltonian> {
    pot.validate()?;
    if 2 * k.unsigned_abs() > pot.wells {
        return Err(Error::usage(format!(
            "sector k = {k} outside the first zone of an N = {} ring",
            pot.wells
        )));
    }
    if jmax < 4 {
        return Err(Error::usage(format!("basis half-width jmax = {jmax} must be >= 4")));
    }
    let c = constants().kinetic_coefficient;
    let n = pot.wells as i64;
    let jmax_i = jmax as i64;
    let diagonal = (-jmax_i..=jmax_i)
        .map(|j| {
            let momentum = TAU * (n * j + k as i64) as f64 / pot.path_length;
            c * momentum * momentum + 0.5 * pot.barrier
        })
        .collect();
    let off_diagonal = vec![-0.25 * pot.barrier; 2 * jmax];
    Ok(SectorHamiltonian { k, jmax, matrix: SymTridiag::new(diagonal, off_diagonal)? })
}

/// How the oscillator quantum is read off the band structure.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GapDefinition {
    /// Difference of the centroids of the two lowest bands.
    #[default]
    Centroid,
    /// Lowest level of band 1 minus lowest level of band 0.
    LowestExcited,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolveOptions {
    pub jmax_start: usize,
    pub jmax_cap: usize,
    /// Relative change of δ accepted between two basis sizes.
    pub convergence: f64,
    pub gap: GapDefinition,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions { jmax_start: 64, jmax_cap: 2000, convergence: 1e-3, gap: GapDefinition::Centroid }
    }
}

/// A rotational level, with `k` folded to `0..=N/2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Level {
    pub band: usize,
    pub k: i32,
    pub energy_mev: f64,
    pub degeneracy: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BandStructure {
    pub potential: RotorPotential,
    pub jmax: usize,
    /// `sector_energies[b][i]` is band `b` in sector `sectors[i]`.
    pub sectors: Vec<i32>,
    pub sector_energies: Vec<Vec<f64>>,
    pub levels: Vec<Level>,
    /// Tunneling splitting δ in μeV.
    pub delta_uev: f64,
    /// Width of the lowest band Δ in μeV (4δ for six wells).
    pub total_splitting_uev: f64,
    /// Oscillator quantum ℏω in meV.
    pub hbar_omega_mev: f64,
    pub gap: GapDefinition,
}

impl BandStructure {
    pub fn energy(&self, band: usize, k: i32) -> Option<f64> {
        let idx = self.sectors.iter().position(|&s| s == k)?;
        self.sector_energies.get(band).map(|b| b[idx])
    }

    pub fn band_levels(&self, band: usize) -> impl Iterator<Item = &Level> {
        self.levels.iter().filter(move |l| l.band == band)
    }

    pub fn centroid(&self, band: usize) -> f64 {
        let e = &self.sector_energies[band];
        e.iter().sum::<f64>() / e.len() as f64
    }

    /// Lowest rotational level (zero-point energy) in meV.
    pub fn zero_point_mev(&self) -> f64 {
        self.sector_energies[0]
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min)
    }

    pub fn band_count(&self) -> usize {
        self.sector_energies.len()
    }
}

/// Bands at a fixed basis size, without convergence checks.
pub fn solve_bands_fixed(
    pot: &RotorPotential,
    jmax: usize,
    n_bands: usize,
    gap: GapDefinition,
) -> Result<BandStructure> {
    pot.validate()?;
    if n_bands < 2 {
        return Err(Error::usage("at least two bands are needed for the oscillator quantum"));
    }
    let sectors: Vec<i32> = pot.sectors().collect();
    let mut per_sector = Vec::with_capacity(sectors.len());
    for &k in &sectors {
        let h = build_sector(pot, k, jmax)?;
        if n_bands > h.matrix.len() {
            return Err(Error::usage(format!("{n_bands} bands requested from a {}-state basis", h.matrix.len())));
        }
        per_sector.push(eig_tridiag(&h.matrix, n_bands)?);
    }
    let sector_energies: Vec<Vec<f64>> = (0..n_bands)
        .map(|b| per_sector.iter().map(|e| e[b]).collect())
        .collect();

    let scale = sector_energies
        .iter()
        .flatten()
        .fold(pot.barrier.max(pot.mathieu_scale()), |m, e| m.max(e.abs()));
    let mut levels = Vec::new();
    for (band, energies) in sector_energies.iter().enumerate() {
        for (&k, &e) in sectors.iter().zip(energies) {
            if k < 0 {
                let partner = sectors.iter().position(|&s| s == -k).expect("sectors symmetric");
                if (energies[partner] - e).abs() > 1e-10 * scale {
                    return Err(Error::compute(format!(
                        "sectors ±{} not degenerate in band {band}: {} vs {}",
                        -k, energies[partner], e
                    )));
                }
                continue;
            }
            let paired = k != 0 && 2 * k as u32 != pot.wells;
            levels.push(Level { band, k, energy_mev: e, degeneracy: if paired { 2 } else { 1 } });
        }
    }

    let ground = &sector_energies[0];
    let k_edge = *sectors.last().expect("at least one sector");
    let width = energy_at(&sectors, ground, k_edge) - energy_at(&sectors, ground, 0);
    let delta = if pot.wells == 1 {
        0.0
    } else {
        // Tight-binding band E(k) = Ē − 2δ cos(2πk/N).
        let phase = TAU * k_edge as f64 / pot.wells as f64;
        width / (2.0 * (1.0 - phase.cos()))
    };
    let centroid = |b: usize| sector_energies[b].iter().sum::<f64>() / sectors.len() as f64;
    let lowest = |b: usize| sector_energies[b].iter().copied().fold(f64::INFINITY, f64::min);
    let hbar_omega = match gap {
        GapDefinition::Centroid => centroid(1) - centroid(0),
        GapDefinition::LowestExcited => lowest(1) - lowest(0),
    };
    Ok(BandStructure {
        potential: *pot,
        jmax,
        sectors,
        sector_energies,
        levels,
        delta_uev: mev_to_uev(delta),
        total_splitting_uev: mev_to_uev(width),
        hbar_omega_mev: hbar_omega,
        gap,
    })
}

fn energy_at(sectors: &[i32], energies: &[f64], k: i32) -> f64 {
    let idx = sectors.iter().position(|&s| s == k).expect("sector present");
    energies[idx]
}

/// Bands with automatic basis escalation: the basis is doubled until δ and the
/// zero-point energy change by less than `options.convergence` (relative).
pub fn solve_bands(pot: &RotorPotential, n_bands: usize, options: &SolveOptions) -> Result<BandStructure> {
    let mut jmax = options.jmax_start.max(4);
    let mut current = solve_bands_fixed(pot, jmax, n_bands, options.gap)?;
    loop {
        if jmax >= options.jmax_cap {
            return Err(Error::compute(format!(
                "rotor basis did not converge below jmax = {}",
                options.jmax_cap
            )));
        }
        let next_jmax = (2 * jmax).min(options.jmax_cap);
        let next = solve_bands_fixed(pot, next_jmax, n_bands, options.gap)?;
        let scale = next.zero_point_mev().abs().max(pot.mathieu_scale());
        let delta_ok = relative_change(current.delta_uev, next.delta_uev)
            <= options.convergence
            || (current.delta_uev - next.delta_uev).abs() <= mev_to_uev(1e-13 * scale);
        let zpe_ok = (current.zero_point_mev() - next.zero_point_mev()).abs()
            <= options.convergence * scale;
        let omega_ok = relative_change(current.hbar_omega_mev, next.hbar_omega_mev) <= options.convergence;
        if delta_ok && zpe_ok && omega_ok {
            return Ok(next);
        }
        jmax = next_jmax;
        current = next;
    }
}

fn relative_change(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / a.abs().max(b.abs())
    }
}

/// Small-oscillation quantum of one well, `(2πN/L)·√(ℏ²/2 · V₀)` in meV.
/// The anharmonic cosine well always has a smaller band gap.
pub fn harmonic_estimate(pot: &RotorPotential) -> f64 {
    let curvature = TAU * pot.wells as f64 / pot.path_length;
    curvature * (constants().kinetic_coefficient * pot.barrier).sqrt()
}

/// Large-barrier Mathieu asymptotics: `(ℏω in meV, δ in μeV)`.
///
/// With `q = V₀/(4s)` and `s` the Mathieu energy scale, the lowest band has
/// width `s·2⁵·√(2/π)·q^¾·e^(−4√q)` and the first gap is `s·(4√q − 1)`.
pub fn asymptotic_estimate(pot: &RotorPotential) -> (f64, f64) {
    let s = pot.mathieu_scale();
    let q = pot.barrier / (4.0 * s);
    let root = q.sqrt();
    let width = s * 32.0 * (2.0 / PI).sqrt() * q.powf(0.75) * (-4.0 * root).exp();
    (s * (4.0 * root - 1.0), mev_to_uev(width / 4.0))
}

/// Targets for [`fit_potential`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FitTargets {
    pub hbar_omega_mev: f64,
    pub delta_uev: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FitResult {
    pub potential: RotorPotential,
    pub bands_delta_uev: f64,
    pub bands_hbar_omega_mev: f64,
    pub iterations: usize,
    pub residual: f64,
}

/// Starting point obtained by inverting [`asymptotic_estimate`].
pub fn initial_guess(targets: &FitTargets, wells: u32) -> Result<RotorPotential> {
    let ratio = uev_to_mev(targets.delta_uev) / targets.hbar_omega_mev;
    let model = |q: f64| {
        let root = q.sqrt();
        8.0 * (2.0 / PI).sqrt() * q.powf(0.75) * (-4.0 * root).exp() / (4.0 * root - 1.0)
    };
    let q = numerics::find_root(|q| model(q).ln() - ratio.ln(), 1.0, 1e4).unwrap_or(1.0);
    let s = targets.hbar_omega_mev / (4.0 * q.sqrt() - 1.0);
    let barrier = 4.0 * s * q;
    let path_length = PI * wells as f64 * (constants().kinetic_coefficient / s).sqrt();
    RotorPotential::new(path_length, barrier, wells)
}

/// Finds `(L, V₀)` whose band structure reproduces the target ℏω and δ.
/// Residuals are the relative ℏω error and the log-ratio of δ.
pub fn fit_potential(
    targets: &FitTargets,
    wells: u32,
    init: Option<RotorPotential>,
    options: &SolveOptions,
) -> Result<FitResult> {
    if !(targets.hbar_omega_mev > 0.0 && targets.delta_uev > 0.0) {
        return Err(Error::usage("fit targets must be positive"));
    }
    if wells < 2 {
        return Err(Error::usage("tunneling fit needs at least two wells"));
    }
    let start = match init {
        Some(p) => {
            p.validate()?;
            p
        }
        None => initial_guess(targets, wells)?,
    };
    let residual = |x: [f64; 2]| -> Result<[f64; 2]> {
        let pot = RotorPotential::new(x[0], x[1], wells)?;
        let bands = solve_bands(&pot, 2, options)?;
        if bands.delta_uev <= 0.0 {
            return Err(Error::compute("non-positive tunneling splitting during fit"));
        }
        Ok([
            (bands.hbar_omega_mev - targets.hbar_omega_mev) / targets.hbar_omega_mev,
            (bands.delta_uev / targets.delta_uev).ln(),
        ])
    };
    let solution = numerics::newton2(
        residual,
        [start.path_length, start.barrier],
        1.0,
        1e-11,
        &Tolerances::default(),
    )?;
    let potential = RotorPotential::new(solution.x[0], solution.x[1], wells)?;
    let bands = solve_bands(&potential, 2, options)?;
    Ok(FitResult {
        potential,
        bands_delta_uev: bands.delta_uev,
        bands_hbar_omega_mev: bands.hbar_omega_mev,
        iterations: solution.iterations,
        residual: solution.residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn singlet() -> BandStructure {
        solve_bands(&RotorPotential::singlet_excited(), 2, &SolveOptions::default()).unwrap()
    }

    #[test]
    fn free_rotor_sector_is_diagonal() {
        let pot = RotorPotential::new(22.5, 0.0, 6).unwrap();
        let h = build_sector(&pot, 0, 8).unwrap();
        assert!(h.matrix.off_diagonal().iter().all(|&e| e == 0.0));
        let min = h.matrix.diagonal().iter().copied().fold(f64::INFINITY, f64::min);
        assert_eq!(min, 0.0);

        let h1 = build_sector(&pot, 1, 8).unwrap();
        let min = h1.matrix.diagonal().iter().copied().fold(f64::INFINITY, f64::min);
        assert!((min - 0.1630).abs() < 1e-4, "{min}");
    }

    #[test]
    fn sector_entries_follow_definition() {
        let pot = RotorPotential::singlet_excited();
        for k in -3..=3 {
            let h = build_sector(&pot, k, 10).unwrap();
            assert_eq!(h.matrix.len(), 21);
            assert!(h.matrix.off_diagonal().iter().all(|&e| e == -8.25));
            let c = constants().kinetic_coefficient;
            for (idx, &d) in h.matrix.diagonal().iter().enumerate() {
                let j = idx as i64 - 10;
                let p = TAU * (6 * j + k as i64) as f64 / 22.5;
                assert_eq!(d, c * p * p + 16.5);
            }
        }
    }

    #[test]
    fn sector_preconditions() {
        let pot = RotorPotential::singlet_excited();
        assert!(build_sector(&pot, 4, 10).unwrap_err().is_usage());
        assert!(build_sector(&pot, -4, 10).unwrap_err().is_usage());
        assert!(build_sector(&pot, 0, 3).unwrap_err().is_usage());
        assert!(RotorPotential::new(0.0, 1.0, 6).is_err());
        assert!(RotorPotential::new(1.0, -1.0, 6).is_err());
        assert!(RotorPotential::new(1.0, 1.0, 0).is_err());
    }

    #[test]
    fn singlet_quartet() {
        let b = singlet();
        assert!(b.delta_uev > 2.0 && b.delta_uev < 3.0, "{}", b.delta_uev);
        assert!((b.total_splitting_uev - 4.0 * b.delta_uev).abs() < 1e-12 * b.total_splitting_uev);
        let ground: Vec<_> = b.band_levels(0).collect();
        let degeneracies: Vec<u32> = ground.iter().map(|l| l.degeneracy).collect();
        assert_eq!(degeneracies, vec![1, 2, 2, 1]);
        assert_eq!(ground.iter().map(|l| l.k).collect::<Vec<_>>(), vec![0, 1, 2, 3]);
        for pair in ground.windows(2) {
            assert!(pair[1].energy_mev > pair[0].energy_mev);
        }
    }

    #[test]
    fn band_gap_below_harmonic_estimate() {
        let b = singlet();
        let harmonic = harmonic_estimate(&b.potential);
        assert!((harmonic - 13.9).abs() < 0.05, "{harmonic}");
        assert!(b.hbar_omega_mev > 11.0 && b.hbar_omega_mev < harmonic, "{}", b.hbar_omega_mev);
    }

    #[test]
    fn harmonic_estimate_homogeneity() {
        let p = RotorPotential::new(22.5, 33.0, 6).unwrap();
        let q = RotorPotential::new(45.0, 132.0, 6).unwrap();
        assert!((harmonic_estimate(&p) - harmonic_estimate(&q)).abs() < 1e-12);
        assert_eq!(harmonic_estimate(&RotorPotential::new(22.5, 0.0, 6).unwrap()), 0.0);
    }

    #[test]
    fn paper_parameter_sets() {
        let t = solve_bands(&RotorPotential::triplet_excited(), 2, &SolveOptions::default()).unwrap();
        assert!(t.delta_uev > 0.15 && t.delta_uev < 0.33, "{}", t.delta_uev);
        let g = solve_bands(&RotorPotential::electronic_ground(), 2, &SolveOptions::default()).unwrap();
        assert!(g.delta_uev < 0.01 && g.delta_uev > 0.0, "{}", g.delta_uev);
    }

    #[test]
    fn free_rotor_levels() {
        let pot = RotorPotential::new(22.5, 0.0, 6).unwrap();
        let b = solve_bands(&pot, 3, &SolveOptions::default()).unwrap();
        let c = constants().kinetic_coefficient;
        for level in b.band_levels(0) {
            let p = TAU * level.k as f64 / 22.5;
            assert!((level.energy_mev - c * p * p).abs() < 1e-12, "{level:?}");
        }
        // Second "band": |m| = 6 − |k|.
        for level in b.band_levels(1) {
            let m = 6 - level.k;
            let p = TAU * m as f64 / 22.5;
            assert!((level.energy_mev - c * p * p).abs() < 1e-10, "{level:?}");
        }
    }

    #[test]
    fn gap_definitions_differ_slightly() {
        let pot = RotorPotential::singlet_excited();
        let opts = SolveOptions { gap: GapDefinition::LowestExcited, ..Default::default() };
        let lowest = solve_bands(&pot, 2, &opts).unwrap();
        let centroid = singlet();
        let diff = centroid.hbar_omega_mev - lowest.hbar_omega_mev;
        assert!(diff.abs() < 0.5, "{diff}");
        assert_ne!(lowest.hbar_omega_mev, centroid.hbar_omega_mev);
    }

    #[test]
    fn escalation_cap_reports_compute_error() {
        let pot = RotorPotential::singlet_excited();
        let opts = SolveOptions { jmax_start: 8, jmax_cap: 8, ..Default::default() };
        assert!(matches!(solve_bands(&pot, 2, &opts), Err(Error::Compute(_))));
    }

    #[test]
    fn odd_and_single_well_rings() {
        let five = solve_bands(&RotorPotential::new(20.0, 30.0, 5).unwrap(), 2, &SolveOptions::default()).unwrap();
        assert_eq!(five.sectors, vec![-2, -1, 0, 1, 2]);
        let degs: Vec<u32> = five.band_levels(0).map(|l| l.degeneracy).collect();
        assert_eq!(degs, vec![1, 2, 2]);
        let one = solve_bands(&RotorPotential::new(5.0, 30.0, 1).unwrap(), 2, &SolveOptions::default()).unwrap();
        assert_eq!(one.delta_uev, 0.0);
    }

    #[test]
    fn asymptotic_estimate_close_to_exact() {
        let pot = RotorPotential::singlet_excited();
        let (omega, delta) = asymptotic_estimate(&pot);
        let b = singlet();
        assert!((omega / b.hbar_omega_mev - 1.0).abs() < 0.05, "{omega}");
        assert!((delta / b.delta_uev - 1.0).abs() < 0.15, "{delta}");
    }

    #[test]
    fn fit_rejects_bad_targets() {
        let t = FitTargets { hbar_omega_mev: -1.0, delta_uev: 2.5 };
        assert!(fit_potential(&t, 6, None, &SolveOptions::default()).unwrap_err().is_usage());
    }
}
