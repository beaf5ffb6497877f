//! Symmetric 3×3 interaction tensors and their motional averages.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{cross, dot, eig_sym3, Sym3Eigen};

pub type Vec3 = [f64; 3];
pub type Mat3 = [[f64; 3]; 3];

/// Symmetric tensor in MHz (zero-field splitting D or hyperfine A).
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SymTensor3 {
    pub xx: f64,
    pub yy: f64,
    pub zz: f64,
    #[serde(default)]
    pub xy: f64,
    #[serde(default)]
    pub xz: f64,
    #[serde(default)]
    pub yz: f64,
}

impl SymTensor3 {
    pub fn diag(xx: f64, yy: f64, zz: f64) -> Self {
        SymTensor3 { xx, yy, zz, ..Default::default() }
    }

    pub fn identity(c: f64) -> Self {
        Self::diag(c, c, c)
    }

    /// Symmetrizes a full matrix.
    pub fn from_matrix(m: &Mat3) -> Self {
        SymTensor3 {
            xx: m[0][0],
            yy: m[1][1],
            zz: m[2][2],
            xy: 0.5 * (m[0][1] + m[1][0]),
            xz: 0.5 * (m[0][2] + m[2][0]),
            yz: 0.5 * (m[1][2] + m[2][1]),
        }
    }

    pub fn matrix(&self) -> Mat3 {
        [
            [self.xx, self.xy, self.xz],
            [self.xy, self.yy, self.yz],
            [self.xz, self.yz, self.zz],
        ]
    }

    /// Tensor with principal values `values` along the orthonormal `axes`.
    pub fn from_principal(values: Vec3, axes: [Vec3; 3]) -> Self {
        let mut m = [[0.0; 3]; 3];
        for (value, axis) in values.iter().zip(&axes) {
            for i in 0..3 {
                for j in 0..3 {
                    m[i][j] += value * axis[i] * axis[j];
                }
            }
        }
        Self::from_matrix(&m)
    }

    pub fn trace(&self) -> f64 {
        self.xx + self.yy + self.zz
    }

    pub fn frobenius(&self) -> f64 {
        let off = self.xy * self.xy + self.xz * self.xz + self.yz * self.yz;
        (self.xx * self.xx + self.yy * self.yy + self.zz * self.zz + 2.0 * off).sqrt()
    }

    pub fn is_finite(&self) -> bool {
        [self.xx, self.yy, self.zz, self.xy, self.xz, self.yz].iter().all(|v| v.is_finite())
    }

    /// Quadratic form n·T·n.
    pub fn project(&self, n: Vec3) -> f64 {
        dot(n, mat_vec(&self.matrix(), n))
    }

    pub fn apply(&self, v: Vec3) -> Vec3 {
        mat_vec(&self.matrix(), v)
    }

    /// R·T·Rᵀ.
    pub fn rotated(&self, r: &Mat3) -> Self {
        Self::from_matrix(&mat_mul(&mat_mul(r, &self.matrix()), &transpose(r)))
    }

    pub fn scaled(&self, s: f64) -> Self {
        SymTensor3 {
            xx: s * self.xx,
            yy: s * self.yy,
            zz: s * self.zz,
            xy: s * self.xy,
            xz: s * self.xz,
            yz: s * self.yz,
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        SymTensor3 {
            xx: self.xx + other.xx,
            yy: self.yy + other.yy,
            zz: self.zz + other.zz,
            xy: self.xy + other.xy,
            xz: self.xz + other.xz,
            yz: self.yz + other.yz,
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scaled(-1.0))
    }

    /// Principal values (descending magnitude) and axes.
    pub fn principal(&self) -> Result<Sym3Eigen> {
        eig_sym3(&self.matrix())
    }

    /// True when the trace is negligible against the tensor norm.
    pub fn is_traceless(&self, rel_tol: f64) -> bool {
        self.trace().abs() <= rel_tol * self.frobenius().max(f64::MIN_POSITIVE)
    }

    /// Calculated zero-field splitting of the triplet state in its principal
    /// frame, MHz: (xx, yy, zz) = (307, 911, −1218).
    pub fn calculated_zfs() -> Self {
        Self::diag(307.0, 911.0, -1218.0)
    }

    /// Measured ZFS principal magnitudes with the traceless sign choice
    /// (xx, yy, zz) = (142, 800, −941). The global sign is not known.
    pub fn measured_zfs() -> Self {
        Self::diag(142.0, 800.0, -941.0)
    }

    /// Calculated ²⁹Si hyperfine tensor, MHz.
    pub fn calculated_hyperfine() -> Self {
        Self::diag(-267.0, -324.0, -347.0)
    }

    /// Measured ²⁹Si hyperfine tensor, MHz.
    pub fn measured_hyperfine() -> Self {
        Self::diag(273.0, 312.0, 339.0)
    }
}

pub fn mat_vec(m: &Mat3, v: Vec3) -> Vec3 {
    [dot(m[0], v), dot(m[1], v), dot(m[2], v)]
}

pub fn mat_mul(a: &Mat3, b: &Mat3) -> Mat3 {
    let mut out = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            out[i][j] = (0..3).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    out
}

pub fn transpose(m: &Mat3) -> Mat3 {
    let mut out = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            out[i][j] = m[j][i];
        }
    }
    out
}

pub fn identity3() -> Mat3 {
    [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]
}

pub fn normalize(v: Vec3) -> Result<Vec3> {
    let n = dot(v, v).sqrt();
    if !(n.is_finite() && n > 0.0) {
        return Err(Error::usage(format!("cannot normalize vector {v:?}")));
    }
    Ok([v[0] / n, v[1] / n, v[2] / n])
}

/// Rotation by `angle` about the unit vector `n` (Rodrigues).
pub fn rotation_about(n: Vec3, angle: f64) -> Mat3 {
    let (s, c) = angle.sin_cos();
    let t = 1.0 - c;
    let [x, y, z] = n;
    [
        [t * x * x + c, t * x * y - s * z, t * x * z + s * y],
        [t * x * y + s * z, t * y * y + c, t * y * z - s * x],
        [t * x * z - s * y, t * y * z + s * x, t * z * z + c],
    ]
}

pub fn determinant(m: &Mat3) -> f64 {
    dot(m[0], cross(m[1], m[2]))
}

/// Rotation axis with the order of the cyclic group of equivalent positions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AxisFrame {
    pub axis: Vec3,
    #[serde(default = "default_order")]
    pub rotation_order: u32,
}

fn default_order() -> u32 {
    3
}

impl AxisFrame {
    pub fn new(axis: Vec3, rotation_order: u32) -> Result<Self> {
        if rotation_order == 0 {
            return Err(Error::usage("rotation order must be >= 1"));
        }
        Ok(AxisFrame { axis: normalize(axis)?, rotation_order })
    }

    /// Re-normalizes a deserialized frame.
    pub fn validated(self) -> Result<Self> {
        Self::new(self.axis, self.rotation_order)
    }

    /// The `rotation_order` rotations 2πi/n about the axis.
    pub fn rotations(&self) -> Vec<Mat3> {
        (0..self.rotation_order)
            .map(|i| rotation_about(self.axis, TAU * i as f64 / self.rotation_order as f64))
            .collect()
    }
}

/// Average of `R·T·Rᵀ` over the cyclic rotations of `frame`.
pub fn average_over_rotations(t: &SymTensor3, frame: &AxisFrame) -> SymTensor3 {
    let rotations = frame.rotations();
    let mut acc = [[0.0; 3]; 3];
    for r in &rotations {
        let m = t.rotated(r).matrix();
        for i in 0..3 {
            for j in 0..3 {
                acc[i][j] += m[i][j];
            }
        }
    }
    let n = rotations.len() as f64;
    let mut avg = SymTensor3::from_matrix(&acc).scaled(1.0 / n);
    // Averaging cannot change the trace; pin it against accumulated rounding.
    let drift = (avg.trace() - t.trace()) / 3.0;
    avg.xx -= drift;
    avg.yy -= drift;
    avg.zz -= drift;
    avg
}

/// Axial and rhombic zero-field parameters of a traceless tensor about `n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AxialParameters {
    /// D = (3/2)·n·T·n, MHz.
    pub d: f64,
    /// E = |T_aa − T_bb|/2 in the transverse principal frame, MHz.
    pub e: f64,
}

pub const TRACELESS_TOLERANCE: f64 = 1e-6;

pub fn axial_parameters(t: &SymTensor3, n: Vec3) -> Result<AxialParameters> {
    if !t.is_traceless(TRACELESS_TOLERANCE) {
        return Err(Error::usage(format!(
            "tensor has trace {} MHz; remove the isotropic part first",
            t.trace()
        )));
    }
    let n = normalize(n)?;
    let d = 1.5 * t.project(n);
    // Orthonormal basis (u, v) of the plane perpendicular to n.
    let helper = if n[0].abs() < 0.9 { [1.0, 0.0, 0.0] } else { [0.0, 1.0, 0.0] };
    let u = normalize(cross(n, helper))?;
    let v = cross(n, u);
    let tuu = t.project(u);
    let tvv = t.project(v);
    let tuv = dot(u, t.apply(v));
    let e = 0.5 * ((tuu - tvv).powi(2) + 4.0 * tuv * tuv).sqrt();
    Ok(AxialParameters { d, e })
}

/// Splits `t` into its isotropic part (trace/3) and traceless remainder.
pub fn remove_isotropic(t: &SymTensor3) -> (f64, SymTensor3) {
    let iso = t.trace() / 3.0;
    let mut traceless = t.sub(&SymTensor3::identity(iso));
    // Force an exactly zero trace.
    traceless.zz = -(traceless.xx + traceless.yy);
    (iso, traceless)
}

/// Sign assignments of three principal magnitudes whose sum is within
/// `rel_tol` of zero (relative to the largest magnitude). Results are ordered
/// with the first value negative.
pub fn traceless_sign_assignments(magnitudes: Vec3, rel_tol: f64) -> Vec<Vec3> {
    let largest = magnitudes.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let mut out = Vec::new();
    for mask in 0..8u32 {
        let signed: Vec3 = std::array::from_fn(|i| {
            if mask & (1 << i) != 0 {
                -magnitudes[i].abs()
            } else {
                magnitudes[i].abs()
            }
        });
        if (signed[0] + signed[1] + signed[2]).abs() <= rel_tol * largest && signed[0] <= 0.0 {
            out.push(signed);
        }
    }
    // Add the globally flipped partner of each assignment.
    let flipped: Vec<Vec3> = out.iter().map(|s| [-s[0], -s[1], -s[2]]).collect();
    out.extend(flipped);
    out
}
