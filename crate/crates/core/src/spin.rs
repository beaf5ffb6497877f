//! Triplet (S = 1) spin Hamiltonian
//!
//! ```text
//! H/h = S·D·S + (g·μ_B/h)·B·S  [+ S·A·I, first order]
//! ```
//!
//! D and A are given in the defect principal frame; `frame` maps defect axes to
//! crystal axes. Fields and directions are crystal-frame vectors in tesla.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{self, eig_hermitian};
use crate::tensor::{
    average_over_rotations, determinant, identity3, mat_mul, normalize, transpose, AxisFrame, Mat3, SymTensor3,
    Vec3, TRACELESS_TOLERANCE,
};
use crate::units::{zeeman_mhz_per_tesla, G_DEFAULT};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TripletSpinSystem {
    /// Zero-field splitting tensor, MHz, traceless.
    pub zfs: SymTensor3,
    #[serde(default = "default_g")]
    pub g: f64,
    /// Optional nuclear (I = 1/2) hyperfine tensor, MHz.
    #[serde(default)]
    pub hyperfine: Option<SymTensor3>,
    /// Rows are crystal axes, columns are the defect x, y, z axes.
    #[serde(default = "identity3")]
    pub frame: Mat3,
}

fn default_g() -> f64 {
    G_DEFAULT
}

/// Defect frame with y along [111] and z along [1-10], the normal of a {110}
/// mirror plane containing [111].
pub fn default_defect_frame() -> Mat3 {
    let s6 = 6f64.sqrt();
    let s3 = 3f64.sqrt();
    let s2 = 2f64.sqrt();
    let x = [1.0 / s6, 1.0 / s6, -2.0 / s6];
    let y = [1.0 / s3, 1.0 / s3, 1.0 / s3];
    let z = [1.0 / s2, -1.0 / s2, 0.0];
    [[x[0], y[0], z[0]], [x[1], y[1], z[1]], [x[2], y[2], z[2]]]
}

impl TripletSpinSystem {
    pub fn new(zfs: SymTensor3, g: f64, hyperfine: Option<SymTensor3>, frame: Mat3) -> Result<Self> {
        let sys = TripletSpinSystem { zfs, g, hyperfine, frame };
        sys.validate()?;
        Ok(sys)
    }

    /// Axis-aligned system without hyperfine coupling.
    pub fn simple(zfs: SymTensor3) -> Result<Self> {
        Self::new(zfs, G_DEFAULT, None, identity3())
    }

    /// Calculated ZFS tensor placed in the crystal with [`default_defect_frame`].
    pub fn calculated() -> Self {
        TripletSpinSystem {
            zfs: SymTensor3::calculated_zfs(),
            g: G_DEFAULT,
            hyperfine: None,
            frame: default_defect_frame(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !self.zfs.is_finite() || !self.zfs.is_traceless(TRACELESS_TOLERANCE) {
            return Err(Error::usage(format!(
                "ZFS tensor must be finite and traceless (trace {} MHz)",
                self.zfs.trace()
            )));
        }
        if !(self.g.is_finite() && self.g > 0.0) {
            return Err(Error::usage("g-factor must be > 0"));
        }
        if let Some(a) = &self.hyperfine {
            if !a.is_finite() {
                return Err(Error::usage("hyperfine tensor must be finite"));
            }
        }
        let rrt = mat_mul(&self.frame, &transpose(&self.frame));
        let orthonormal = (0..3).all(|i| (0..3).all(|j| (rrt[i][j] - if i == j { 1.0 } else { 0.0 }).abs() < 1e-9));
        if !orthonormal || (determinant(&self.frame) - 1.0).abs() > 1e-9 {
            return Err(Error::usage("defect frame must be a proper rotation"));
        }
        Ok(())
    }

    pub fn crystal_zfs(&self) -> SymTensor3 {
        self.zfs.rotated(&self.frame)
    }

    pub fn crystal_hyperfine(&self) -> Option<SymTensor3> {
        self.hyperfine.map(|a| a.rotated(&self.frame))
    }

    /// Same defect re-oriented by the crystal rotation `g`.
    pub fn reoriented(&self, g: &Mat3) -> Self {
        TripletSpinSystem { frame: mat_mul(g, &self.frame), ..*self }
    }

    pub fn without_hyperfine(&self) -> Self {
        TripletSpinSystem { hyperfine: None, ..*self }
    }
}

/// Spin-1 matrices in the |+1⟩, |0⟩, |−1⟩ basis.
pub fn spin_matrices() -> [[[Complex64; 3]; 3]; 3] {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let z = Complex64::new(0.0, 0.0);
    let re = |x: f64| Complex64::new(x, 0.0);
    let im = |x: f64| Complex64::new(0.0, x);
    [
        [[z, re(r), z], [re(r), z, re(r)], [z, re(r), z]],
        [[z, im(-r), z], [im(r), z, im(-r)], [z, im(r), z]],
        [[re(1.0), z, z], [z, z, z], [z, z, re(-1.0)]],
    ]
}

fn hamiltonian(sys: &TripletSpinSystem, field_t: Vec3) -> Vec<Complex64> {
    let s = spin_matrices();
    let d = sys.crystal_zfs().matrix();
    let zeeman = zeeman_mhz_per_tesla(sys.g);
    let mut h = vec![Complex64::new(0.0, 0.0); 9];
    for a in 0..3 {
        for b in 0..3 {
            if d[a][b] == 0.0 {
                continue;
            }
            for i in 0..3 {
                for j in 0..3 {
                    let prod: Complex64 = (0..3).map(|k| s[a][i][k] * s[b][k][j]).sum();
                    h[i * 3 + j] += d[a][b] * prod;
                }
            }
        }
        for i in 0..3 {
            for j in 0..3 {
                h[i * 3 + j] += zeeman * field_t[a] * s[a][i][j];
            }
        }
    }
    h
}

/// Electron eigenstates at `field_t`: energies ascending (MHz) and ⟨S⟩.
#[derive(Debug, Clone)]
pub struct SpinStates {
    pub energies: [f64; 3],
    pub spin_expectation: [Vec3; 3],
    pub vectors: Vec<Vec<Complex64>>,
}

pub fn states(sys: &TripletSpinSystem, field_t: Vec3) -> Result<SpinStates> {
    let eig = eig_hermitian(3, &hamiltonian(sys, field_t))?;
    let s = spin_matrices();
    let mut spin_expectation = [[0.0; 3]; 3];
    for (level, v) in eig.vectors.iter().enumerate() {
        for a in 0..3 {
            let mut acc = Complex64::new(0.0, 0.0);
            for i in 0..3 {
                for j in 0..3 {
                    acc += v[i].conj() * s[a][i][j] * v[j];
                }
            }
            spin_expectation[level][a] = acc.re;
        }
    }
    Ok(SpinStates {
        energies: [eig.values[0], eig.values[1], eig.values[2]],
        spin_expectation,
        vectors: eig.vectors,
    })
}

/// The three electron spin levels in MHz, ascending.
pub fn levels(sys: &TripletSpinSystem, field_t: Vec3) -> Result<[f64; 3]> {
    if field_t.iter().any(|b| !b.is_finite()) {
        return Err(Error::usage("magnetic field must be finite"));
    }
    Ok(states(sys, field_t)?.energies)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ResonanceOptions {
    /// Uniform pre-scan points over (0, B_max].
    pub scan_points: usize,
    /// Sub-points used to re-scan intervals where a line nearly touches the
    /// probe frequency without a sign change.
    pub refine_points: usize,
}

impl Default for ResonanceOptions {
    fn default() -> Self {
        ResonanceOptions { scan_points: 2000, refine_points: 64 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Resonance {
    pub field_t: f64,
    /// Indices of the levels (ascending energy) joined by the transition.
    pub lower: usize,
    pub upper: usize,
    /// Nuclear projection along the field for hyperfine lines.
    pub nuclear_m: Option<f64>,
}

impl Resonance {
    pub fn label(&self) -> String {
        match self.nuclear_m {
            None => format!("{}-{}", self.lower, self.upper),
            Some(m) if m > 0.0 => format!("{}-{}/mI=+1/2", self.lower, self.upper),
            Some(_) => format!("{}-{}/mI=-1/2", self.lower, self.upper),
        }
    }
}

/// Transition frequency in MHz for one line, including the first-order
/// hyperfine shift `m_I·b̂·A·(⟨S⟩_upper − ⟨S⟩_lower)`.
fn line_frequency(
    sys: &TripletSpinSystem,
    hyperfine: Option<&SymTensor3>,
    direction: Vec3,
    field: f64,
    lower: usize,
    upper: usize,
    nuclear_m: Option<f64>,
) -> Result<f64> {
    let b = [direction[0] * field, direction[1] * field, direction[2] * field];
    let st = states(sys, b)?;
    let mut freq = st.energies[upper] - st.energies[lower];
    if let (Some(a), Some(m)) = (hyperfine, nuclear_m) {
        let kappa = |level: usize| numerics::dot(direction, a.apply(st.spin_expectation[level]));
        freq += m * (kappa(upper) - kappa(lower));
    }
    Ok(freq)
}


const TRANSITIONS: [(usize, usize); 3] = [(0, 1), (0, 2), (1, 2)];

/// All fields in `(0, b_max]` along `direction` where a level pair is separated
/// by the probe frequency.
pub fn resonance_fields(
    sys: &TripletSpinSystem,
    direction: Vec3,
    probe_ghz: f64,
    b_max_t: f64,
    options: &ResonanceOptions,
) -> Result<Vec<Resonance>> {
    sys.validate()?;
    if !(probe_ghz > 0.0) {
        return Err(Error::usage("probe frequency must be > 0"));
    }
    if !(b_max_t > 0.0 && b_max_t.is_finite()) {
        return Err(Error::usage("B_max must be > 0"));
    }
    if options.scan_points < 2 {
        return Err(Error::usage("resonance scan needs at least 2 points"));
    }
    let direction = normalize(direction)?;
    let probe = probe_ghz * 1e3;
    let hyperfine = sys.crystal_hyperfine();
    let nuclear: Vec<Option<f64>> = if hyperfine.is_some() { vec![Some(-0.5), Some(0.5)] } else { vec![None] };

    let n = options.scan_points;
    let fields: Vec<f64> = (0..=n).map(|i| b_max_t * i as f64 / n as f64).collect();
    let mut out = Vec::new();
    for &(lower, upper) in &TRANSITIONS {
        for &m in &nuclear {
            let f = |b: f64| line_frequency(sys, hyperfine.as_ref(), direction, b, lower, upper, m).map(|v| v - probe);
            let values = fields.iter().map(|&b| f(b)).collect::<Result<Vec<f64>>>()?;
            let mut brackets = Vec::new();
            for i in 0..n {
                if (values[i] < 0.0) != (values[i + 1] < 0.0) {
                    brackets.push((fields[i], fields[i + 1]));
                } else if i > 0 && values[i].abs() < values[i - 1].abs() && values[i].abs() <= values[i + 1].abs() {
                    // Near-tangency: look closer around the local minimum of |f|.
                    let spread = (values[i - 1] - values[i + 1]).abs().max((values[i - 1] - values[i]).abs());
                    if values[i].abs() <= spread {
                        let (lo, hi) = (fields[i - 1], fields[i + 1]);
                        let m_pts = options.refine_points.max(2);
                        let sub: Vec<f64> = (0..=m_pts).map(|j| lo + (hi - lo) * j as f64 / m_pts as f64).collect();
                        let sv = sub.iter().map(|&b| f(b)).collect::<Result<Vec<f64>>>()?;
                        for j in 0..m_pts {
                            if (sv[j] < 0.0) != (sv[j + 1] < 0.0) && sub[j + 1] > fields[i - 1] {
                                brackets.push((sub[j], sub[j + 1]));
                            }
                        }
                    }
                }
            }
            for (lo, hi) in brackets {
                let mut failure = None;
                let mut g = |b: f64| match f(b) {
                    Ok(v) => v,
                    Err(e) => {
                        failure = Some(e);
                        f64::NAN
                    }
                };
                let root = numerics::find_root(&mut g, lo, hi)?;
                if let Some(e) = failure {
                    return Err(e);
                }
                if root > 0.0 {
                    out.push(Resonance { field_t: root, lower, upper, nuclear_m: m });
                }
            }
        }
    }
    out.sort_by(|a, b| {
        a.field_t
            .total_cmp(&b.field_t)
            .then(a.lower.cmp(&b.lower))
            .then(a.upper.cmp(&b.upper))
            .then(a.nuclear_m.unwrap_or(0.0).total_cmp(&b.nuclear_m.unwrap_or(0.0)))
    });
    // Refined sub-intervals can rediscover a root already bracketed by the scan.
    out.dedup_by(|b, a| {
        a.lower == b.lower && a.upper == b.upper && a.nuclear_m == b.nuclear_m && (a.field_t - b.field_t).abs() < 1e-9
    });
    Ok(out)
}

/// The 24 proper rotations of the cube (signed permutation matrices with
/// determinant +1), in a fixed order starting with the identity.
pub fn cubic_rotations() -> Vec<Mat3> {
    const PERMS: [[usize; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
    let mut out = Vec::with_capacity(24);
    for perm in PERMS {
        for signs in 0..8u32 {
            let mut m = [[0.0; 3]; 3];
            for (row, &col) in perm.iter().enumerate() {
                m[row][col] = if signs & (1 << row) != 0 { -1.0 } else { 1.0 };
            }
            if determinant(&m) > 0.0 {
                out.push(m);
            }
        }
    }
    out
}

/// Cubic rotations that produce distinct crystal-frame tensors for `sys`.
pub fn cubic_images(sys: &TripletSpinSystem) -> Vec<Mat3> {
    let mut kept: Vec<(Mat3, SymTensor3, Option<SymTensor3>)> = Vec::new();
    let scale = sys.zfs.frobenius().max(1.0);
    for g in cubic_rotations() {
        let image = sys.reoriented(&g);
        let d = image.crystal_zfs();
        let a = image.crystal_hyperfine();
        let duplicate = kept.iter().any(|(_, kd, ka)| {
            let same_a = match (ka, &a) {
                (Some(x), Some(y)) => x.sub(y).frobenius() <= 1e-9 * scale,
                (None, None) => true,
                _ => false,
            };
            kd.sub(&d).frobenius() <= 1e-9 * scale && same_a
        });
        if !duplicate {
            kept.push((g, d, a));
        }
    }
    kept.into_iter().map(|(g, _, _)| g).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Branch {
    pub field_t: f64,
    pub multiplicity: usize,
    /// Orientation index and transition label for every merged resonance.
    pub members: Vec<(usize, String)>,
}

/// Merge tolerance for resonances of different orientations, in tesla.
pub const BRANCH_MERGE_T: f64 = 1e-5;

pub fn orientation_branches(
    sys: &TripletSpinSystem,
    orientations: &[Mat3],
    direction: Vec3,
    probe_ghz: f64,
    b_max_t: f64,
    options: &ResonanceOptions,
) -> Result<Vec<Branch>> {
    if orientations.is_empty() {
        return Err(Error::usage("orientation list must not be empty"));
    }
    let mut all: Vec<(usize, Resonance)> = Vec::new();
    for (id, g) in orientations.iter().enumerate() {
        for r in resonance_fields(&sys.reoriented(g), direction, probe_ghz, b_max_t, options)? {
            all.push((id, r));
        }
    }
    all.sort_by(|a, b| a.1.field_t.total_cmp(&b.1.field_t).then(a.0.cmp(&b.0)));
    let mut branches: Vec<Branch> = Vec::new();
    for (id, r) in all {
        match branches.last_mut() {
            Some(b) if (r.field_t - b.field_t).abs() <= BRANCH_MERGE_T => {
                b.multiplicity += 1;
                b.members.push((id, r.label()));
            }
            _ => branches.push(Branch { field_t: r.field_t, multiplicity: 1, members: vec![(id, r.label())] }),
        }
    }
    for b in &mut branches {
        b.members.sort();
    }
    Ok(branches)
}

/// Groups orientation indices whose full resonance lists coincide within
/// [`BRANCH_MERGE_T`]. Each group is one distinguishable ODMR pattern.
pub fn pattern_classes(
    sys: &TripletSpinSystem,
    orientations: &[Mat3],
    direction: Vec3,
    probe_ghz: f64,
    b_max_t: f64,
    options: &ResonanceOptions,
) -> Result<Vec<Vec<usize>>> {
    let mut classes: Vec<(Vec<f64>, Vec<usize>)> = Vec::new();
    for (id, g) in orientations.iter().enumerate() {
        let mut fields: Vec<f64> = resonance_fields(&sys.reoriented(g), direction, probe_ghz, b_max_t, options)?
            .iter()
            .map(|r| r.field_t)
            .collect();
        fields.sort_by(f64::total_cmp);
        let same = |other: &Vec<f64>| {
            other.len() == fields.len() && other.iter().zip(&fields).all(|(a, b)| (a - b).abs() <= BRANCH_MERGE_T)
        };
        match classes.iter_mut().find(|(f, _)| same(f)) {
            Some((_, ids)) => ids.push(id),
            None => classes.push((fields, vec![id])),
        }
    }
    Ok(classes.into_iter().map(|(_, ids)| ids).collect())
}

/// Replaces D (and A) by their averages over the rotations of `frame`, whose
/// axis is expressed in the defect frame.
pub fn motional_average(sys: &TripletSpinSystem, frame: &AxisFrame) -> TripletSpinSystem {
    TripletSpinSystem {
        zfs: average_over_rotations(&sys.zfs, frame),
        hyperfine: sys.hyperfine.map(|a| average_over_rotations(&a, frame)),
        ..*sys
    }
}
