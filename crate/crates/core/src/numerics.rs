//! Small dense numerical kernels.
//!
//! * Sturm-sequence bisection for the lowest eigenvalues of a symmetric
//!   tridiagonal matrix.
//! * Cyclic Jacobi for small dense symmetric matrices, with a real embedding
//!   for Hermitian ones.
//! * Bracketed scalar root finding and a damped 2-D Newton iteration.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerances used by the kernels in this module.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    /// Root bracket is shrunk to this fraction of its initial width.
    pub root_relative_width: f64,
    /// Maximum number of Jacobi sweeps before giving up.
    pub jacobi_max_sweeps: usize,
    /// Maximum Newton iterations.
    pub newton_max_iterations: usize,
    /// Relative finite-difference step for Newton Jacobians.
    pub newton_fd_step: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            root_relative_width: 1e-13,
            jacobi_max_sweeps: 100,
            newton_max_iterations: 200,
            newton_fd_step: 1e-5,
        }
    }
}

/// Symmetric tridiagonal matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SymTridiag {
    diagonal: Vec<f64>,
    off_diagonal: Vec<f64>,
}

impl SymTridiag {
    pub fn new(diagonal: Vec<f64>, off_diagonal: Vec<f64>) -> Result<Self> {
        if diagonal.is_empty() {
            return Err(Error::usage("tridiagonal matrix must have at least one row"));
        }
        if off_diagonal.len() + 1 != diagonal.len() {
            return Err(Error::usage(format!(
                "off-diagonal length {} does not match dimension {}",
                off_diagonal.len(),
                diagonal.len()
            )));
        }
        Ok(SymTridiag { diagonal, off_diagonal })
    }

    pub fn len(&self) -> usize {
        self.diagonal.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diagonal.is_empty()
    }

    pub fn diagonal(&self) -> &[f64] {
        &self.diagonal
    }

    pub fn off_diagonal(&self) -> &[f64] {
        &self.off_diagonal
    }

    /// Gershgorin interval containing the whole spectrum.
    pub fn gershgorin(&self) -> (f64, f64) {
        let n = self.len();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let left = if i > 0 { self.off_diagonal[i - 1].abs() } else { 0.0 };
            let right = if i + 1 < n { self.off_diagonal[i].abs() } else { 0.0 };
            lo = lo.min(self.diagonal[i] - left - right);
            hi = hi.max(self.diagonal[i] + left + right);
        }
        (lo, hi)
    }

    /// Number of eigenvalues strictly below `x` (Sturm count of the LDLᵀ pivots).
    pub fn count_below(&self, x: f64, off_sq: &[f64], pivmin: f64) -> usize {
        let mut count = 0;
        let mut q = self.diagonal[0] - x;
        if q.abs() < pivmin {
            q = -pivmin;
        }
        if q < 0.0 {
            count += 1;
        }
        for i in 1..self.len() {
            q = self.diagonal[i] - x - off_sq[i - 1] / q;
            if q.abs() < pivmin {
                q = -pivmin;
            }
            if q < 0.0 {
                count += 1;
            }
        }
        count
    }
}

/// Lowest `count` eigenvalues of `m`, ascending.
///
/// Each eigenvalue is bisected down to adjacent floating-point numbers, which
/// keeps the small eigenvalues of strongly graded matrices accurate well below
/// `eps·‖m‖`.
pub fn eig_tridiag(m: &SymTridiag, count: usize) -> Result<Vec<f64>> {
    let n = m.len();
    if count == 0 || count > n {
        return Err(Error::usage(format!("eigenvalue count {count} outside 1..={n}")));
    }
    if m.diagonal.iter().chain(&m.off_diagonal).any(|v| !v.is_finite()) {
        return Err(Error::compute("non-finite entry in tridiagonal matrix"));
    }
    let off_sq: Vec<f64> = m.off_diagonal.iter().map(|e| e * e).collect();
    let max_off_sq = off_sq.iter().cloned().fold(0.0, f64::max);
    let pivmin = f64::MIN_POSITIVE * max_off_sq.max(1.0);
    let (g_lo, g_hi) = m.gershgorin();
    let pad = f64::EPSILON * (g_lo.abs().max(g_hi.abs())).max(f64::MIN_POSITIVE) * 4.0;
    let (g_lo, g_hi) = (g_lo - pad, g_hi + pad);

    let mut values = Vec::with_capacity(count);
    let mut floor = g_lo;
    for index in 0..count {
        // Find x with count_below(x) <= index < count_below(x') for x' just above.
        let mut lo = floor;
        let mut hi = g_hi;
        for _ in 0..2200 {
            let mid = lo + 0.5 * (hi - lo);
            if mid <= lo || mid >= hi {
                break;
            }
            if m.count_below(mid, &off_sq, pivmin) > index {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        let value = lo + 0.5 * (hi - lo);
        values.push(value);
        floor = lo;
    }
    Ok(values)
}

/// Eigen-decomposition of a real symmetric matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SymEigen {
    /// Eigenvalues, ascending.
    pub values: Vec<f64>,
    /// `vectors[i]` is the unit eigenvector for `values[i]`.
    pub vectors: Vec<Vec<f64>>,
}

/// Cyclic Jacobi diagonalization of a dense symmetric matrix (row-major).
///
/// Sweeps visit `(p, q)` pairs in a fixed order, so the result is
/// deterministic.
pub fn jacobi_eigen(n: usize, matrix: &[f64], max_sweeps: usize) -> Result<SymEigen> {
    if matrix.len() != n * n {
        return Err(Error::usage("matrix storage does not match dimension"));
    }
    if matrix.iter().any(|v| !v.is_finite()) {
        return Err(Error::compute("non-finite entry in symmetric matrix"));
    }
    let mut a = matrix.to_vec();
    // Symmetrize from the upper triangle.
    for i in 0..n {
        for j in (i + 1)..n {
            let v = 0.5 * (a[i * n + j] + a[j * n + i]);
            a[i * n + j] = v;
            a[j * n + i] = v;
        }
    }
    let mut v = vec![0.0; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }
    let scale: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let mut converged = scale == 0.0;
    let mut sweeps = 0;
    while !converged && sweeps < max_sweeps {
        sweeps += 1;
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i * n + j] * a[i * n + j])
            .sum::<f64>()
            .sqrt();
        if off <= f64::EPSILON * 1e-3 * scale {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let app = a[p * n + p];
                let aqq = a[q * n + q];
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
                a[p * n + q] = 0.0;
                a[q * n + p] = 0.0;
                for k in 0..n {
                    let vkp = v[k * n + p];
                    let vkq = v[k * n + q];
                    v[k * n + p] = c * vkp - s * vkq;
                    v[k * n + q] = s * vkp + c * vkq;
                }
            }
        }
    }
    if !converged {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i * n + j] * a[i * n + j])
            .sum::<f64>()
            .sqrt();
        if off > 1e-12 * scale {
            return Err(Error::compute(format!("Jacobi did not converge in {max_sweeps} sweeps")));
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[i * n + i].total_cmp(&a[j * n + j]).then(i.cmp(&j)));
    let values = order.iter().map(|&i| a[i * n + i]).collect();
    let vectors = order
        .iter()
        .map(|&col| (0..n).map(|row| v[row * n + col]).collect())
        .collect();
    Ok(SymEigen { values, vectors })
}

/// Principal values and axes of a symmetric 3×3 matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sym3Eigen {
    /// Sorted by descending magnitude.
    pub values: [f64; 3],
    /// `vectors[i]` belongs to `values[i]`; the triple is a right-handed frame.
    pub vectors: [[f64; 3]; 3],
}

pub fn eig_sym3(m: &[[f64; 3]; 3]) -> Result<Sym3Eigen> {
    let flat: Vec<f64> = m.iter().flatten().copied().collect();
    let eig = jacobi_eigen(3, &flat, Tolerances::default().jacobi_max_sweeps)?;
    let mut order = [0usize, 1, 2];
    order.sort_by(|&i, &j| {
        eig.values[j]
            .abs()
            .total_cmp(&eig.values[i].abs())
            .then(eig.values[j].total_cmp(&eig.values[i]))
    });
    let mut values = [0.0; 3];
    let mut vectors = [[0.0; 3]; 3];
    for (slot, &i) in order.iter().enumerate() {
        values[slot] = eig.values[i];
        let v = &eig.vectors[i];
        // Sign convention: largest component positive.
        let pivot = (0..3)
            .max_by(|&a, &b| v[a].abs().total_cmp(&v[b].abs()).then(b.cmp(&a)))
            .unwrap_or(0);
        let sign = if v[pivot] < 0.0 { -1.0 } else { 1.0 };
        vectors[slot] = [sign * v[0], sign * v[1], sign * v[2]];
    }
    let c = cross(vectors[0], vectors[1]);
    if dot(c, vectors[2]) < 0.0 {
        vectors[2] = [-vectors[2][0], -vectors[2][1], -vectors[2][2]];
    }
    Ok(Sym3Eigen { values, vectors })
}

pub(crate) fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub(crate) fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

/// Eigen-decomposition of a Hermitian matrix.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    pub vectors: Vec<Vec<Complex64>>,
}

/// Diagonalizes an n×n Hermitian matrix (row-major) through its 2n×2n real
/// symmetric embedding `[[Re, -Im], [Im, Re]]`, whose spectrum is the
/// Hermitian spectrum with every value doubled.
pub fn eig_hermitian(n: usize, matrix: &[Complex64]) -> Result<HermitianEigen> {
    if matrix.len() != n * n {
        return Err(Error::usage("matrix storage does not match dimension"));
    }
    let m = 2 * n;
    let mut real = vec![0.0; m * m];
    for i in 0..n {
        for j in 0..n {
            let z = matrix[i * n + j];
            real[i * m + j] = z.re;
            real[(i + n) * m + (j + n)] = z.re;
            real[i * m + (j + n)] = -z.im;
            real[(i + n) * m + j] = z.im;
        }
    }
    let eig = jacobi_eigen(m, &real, Tolerances::default().jacobi_max_sweeps)?;
    let mut values = Vec::with_capacity(n);
    let mut vectors: Vec<Vec<Complex64>> = Vec::with_capacity(n);
    for (value, vec) in eig.values.iter().zip(&eig.vectors) {
        if vectors.len() == n {
            break;
        }
        let mut z: Vec<Complex64> = (0..n).map(|i| Complex64::new(vec[i], vec[i + n])).collect();
        for prev in &vectors {
            let overlap: Complex64 = prev.iter().zip(&z).map(|(p, q)| p.conj() * q).sum();
            for (zi, pi) in z.iter_mut().zip(prev) {
                *zi -= overlap * pi;
            }
        }
        let norm = z.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        if norm < 0.5 {
            continue;
        }
        for zi in &mut z {
            *zi /= norm;
        }
        values.push(*value);
        vectors.push(z);
    }
    if vectors.len() != n {
        return Err(Error::compute("failed to extract Hermitian eigenvectors"));
    }
    Ok(HermitianEigen { values, vectors })
}

/// Root of `f` inside `[lo, hi]` by bisection.
///
/// The bracket must contain a sign change (a zero endpoint counts). The
/// returned point always lies inside the initial bracket.
pub fn find_root<F>(mut f: F, lo: f64, hi: f64) -> Result<f64>
where
    F: FnMut(f64) -> f64,
{
    find_root_with(&mut f, lo, hi, Tolerances::default().root_relative_width)
}

pub fn find_root_with<F>(f: &mut F, lo: f64, hi: f64, relative_width: f64) -> Result<f64>
where
    F: FnMut(f64) -> f64,
{
    if !(lo.is_finite() && hi.is_finite()) || lo > hi {
        return Err(Error::usage(format!("invalid bracket [{lo}, {hi}]")));
    }
    let (mut a, mut b) = (lo, hi);
    let mut fa = f(a);
    let fb = f(b);
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if !(fa.is_finite() && fb.is_finite()) || fa.signum() == fb.signum() {
        return Err(Error::Bracket { lo, hi, f_lo: fa, f_hi: fb });
    }
    let target = (hi - lo) * relative_width;
    while b - a > target {
        let mid = a + 0.5 * (b - a);
        if mid <= a || mid >= b {
            break;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return Ok(mid);
        }
        if fm.signum() == fa.signum() {
            a = mid;
            fa = fm;
        } else {
            b = mid;
        }
    }
    Ok(a + 0.5 * (b - a))
}

/// Outcome of a successful [`newton2`] run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NewtonSolution {
    pub x: [f64; 2],
    pub residual: f64,
    pub iterations: usize,
}

/// Damped Newton iteration for a map R² → R² with a central finite-difference
/// Jacobian. Steps are scaled by `damping` and halved while they fail to reduce
/// the residual norm.
pub fn newton2<F>(
    mut f: F,
    start: [f64; 2],
    damping: f64,
    tol: f64,
    tolerances: &Tolerances,
) -> Result<NewtonSolution>
where
    F: FnMut([f64; 2]) -> Result<[f64; 2]>,
{
    if !(damping > 0.0 && damping <= 1.0) {
        return Err(Error::usage(format!("damping {damping} outside (0, 1]")));
    }
    let norm = |r: [f64; 2]| r[0].hypot(r[1]);
    let mut x = start;
    let mut r = f(x)?;
    let mut res = norm(r);
    for iteration in 0..tolerances.newton_max_iterations {
        if res < tol {
            return Ok(NewtonSolution { x, residual: res, iterations: iteration });
        }
        let mut jac = [[0.0; 2]; 2];
        for col in 0..2 {
            let h = tolerances.newton_fd_step * x[col].abs().max(1.0);
            let mut xp = x;
            let mut xm = x;
            xp[col] += h;
            xm[col] -= h;
            let rp = f(xp)?;
            let rm = f(xm)?;
            for row in 0..2 {
                jac[row][col] = (rp[row] - rm[row]) / (2.0 * h);
            }
        }
        let det = jac[0][0] * jac[1][1] - jac[0][1] * jac[1][0];
        if det == 0.0 || !det.is_finite() {
            return Err(Error::Fit { iterations: iteration, residual: res, last: x });
        }
        let step = [
            (jac[1][1] * r[0] - jac[0][1] * r[1]) / det,
            (-jac[1][0] * r[0] + jac[0][0] * r[1]) / det,
        ];
        let mut scale = damping;
        let mut accepted = false;
        for _ in 0..30 {
            let trial = [x[0] - scale * step[0], x[1] - scale * step[1]];
            if let Ok(rt) = f(trial) {
                let nt = norm(rt);
                if nt.is_finite() && nt < res {
                    x = trial;
                    r = rt;
                    res = nt;
                    accepted = true;
                    break;
                }
            }
            scale *= 0.5;
        }
        if !accepted {
            if res < tol {
                break;
            }
            return Err(Error::Fit { iterations: iteration, residual: res, last: x });
        }
    }
    if res < tol {
        Ok(NewtonSolution { x, residual: res, iterations: tolerances.newton_max_iterations })
    } else {
        Err(Error::Fit {
            iterations: tolerances.newton_max_iterations,
            residual: res,
            last: x,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonal_tridiag() {
        let m = SymTridiag::new(vec![2.0; 3], vec![0.0; 2]).unwrap();
        assert_eq!(eig_tridiag(&m, 3).unwrap(), vec![2.0, 2.0, 2.0]);
    }

    #[test]
    fn two_by_two_tridiag() {
        let m = SymTridiag::new(vec![0.0, 0.0], vec![1.0]).unwrap();
        let e = eig_tridiag(&m, 2).unwrap();
        assert!((e[0] + 1.0).abs() < 1e-15 && (e[1] - 1.0).abs() < 1e-15, "{e:?}");
    }

    #[test]
    fn tridiag_rejects_bad_input() {
        assert!(SymTridiag::new(vec![], vec![]).is_err());
        assert!(SymTridiag::new(vec![1.0, 2.0], vec![]).is_err());
        let m = SymTridiag::new(vec![1.0, f64::NAN], vec![0.5]).unwrap();
        assert!(matches!(eig_tridiag(&m, 1), Err(Error::Compute(_))));
        let m = SymTridiag::new(vec![1.0, 2.0], vec![0.5]).unwrap();
        assert!(eig_tridiag(&m, 0).unwrap_err().is_usage());
        assert!(eig_tridiag(&m, 3).unwrap_err().is_usage());
    }

    #[test]
    fn kac_matrix_ladder() {
        // Sylvester-Kac matrix (2·J_x for spin j = 99/2): zero diagonal,
        // off-diagonal sqrt(i(n-i)). Its spectrum is the exact equally spaced
        // ladder -(n-1), -(n-3), ..., n-1.
        let n = 100;
        let off: Vec<f64> = (1..n).map(|i| ((i * (n - i)) as f64).sqrt()).collect();
        let m = SymTridiag::new(vec![0.0; n], off).unwrap();
        let e = eig_tridiag(&m, 5).unwrap();
        for (level, value) in e.iter().enumerate() {
            let exact = -((n - 1) as f64) + 2.0 * level as f64;
            assert!(((value - exact) / exact).abs() < 1e-8, "level {level}: {value} vs {exact}");
        }
    }

    #[test]
    fn fine_oscillator_grid_matches_ladder() {
        let n = 4000;
        let half_width = 9.0;
        let h = 2.0 * half_width / (n + 1) as f64;
        let x = |i: usize| -half_width + h * (i + 1) as f64;
        let diag: Vec<f64> = (0..n).map(|i| 1.0 / (h * h) + 0.5 * x(i) * x(i)).collect();
        let off = vec![-0.5 / (h * h); n - 1];
        let e = eig_tridiag(&SymTridiag::new(diag, off).unwrap(), 5).unwrap();
        for (level, value) in e.iter().enumerate() {
            let exact = level as f64 + 0.5;
            assert!(((value - exact) / exact).abs() < 1e-4, "{value} vs {exact}");
        }
    }

    #[test]
    fn sym3_identity_and_diagonal() {
        let c = 3.7;
        let m = [[c, 0.0, 0.0], [0.0, c, 0.0], [0.0, 0.0, c]];
        let e = eig_sym3(&m).unwrap();
        assert_eq!(e.values, [c, c, c]);

        let d = [[-1218.0, 0.0, 0.0], [0.0, 911.0, 0.0], [0.0, 0.0, 307.0]];
        let e = eig_sym3(&d).unwrap();
        assert_eq!(e.values, [-1218.0, 911.0, 307.0]);
        assert_eq!(e.vectors, [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]);
    }

    #[test]
    fn sym3_residual_and_handedness() {
        let m = [[3.0, 1.2, -0.7], [1.2, -2.0, 0.4], [-0.7, 0.4, 5.5]];
        let e = eig_sym3(&m).unwrap();
        let norm: f64 = m.iter().flatten().map(|x| x * x).sum::<f64>().sqrt();
        for (value, v) in e.values.iter().zip(&e.vectors) {
            for row in 0..3 {
                let mv: f64 = (0..3).map(|c| m[row][c] * v[c]).sum();
                assert!((mv - value * v[row]).abs() <= 1e-10 * norm);
            }
        }
        let c = cross(e.vectors[0], e.vectors[1]);
        assert!((dot(c, e.vectors[2]) - 1.0).abs() < 1e-12);
        let trace: f64 = e.values.iter().sum();
        assert!((trace - 6.5).abs() < 1e-12 * 6.5);
    }

    #[test]
    fn hermitian_two_level() {
        // σ_y has eigenvalues ±1.
        let i = Complex64::i();
        let m = [Complex64::new(0.0, 0.0), -i, i, Complex64::new(0.0, 0.0)];
        let e = eig_hermitian(2, &m).unwrap();
        assert!((e.values[0] + 1.0).abs() < 1e-14 && (e.values[1] - 1.0).abs() < 1e-14);
        let v = &e.vectors[1];
        let mv0 = m[0] * v[0] + m[1] * v[1];
        let mv1 = m[2] * v[0] + m[3] * v[1];
        assert!((mv0 - v[0]).norm() < 1e-13 && (mv1 - v[1]).norm() < 1e-13);
    }

    #[test]
    fn roots() {
        assert!((find_root(|x| x - 1.0, 0.0, 2.0).unwrap() - 1.0).abs() < 1e-12);
        assert!((find_root(|x| x * x * x - 8.0, 0.0, 3.0).unwrap() - 2.0).abs() < 1e-12);
        assert!(matches!(find_root(|x| x * x + 1.0, -1.0, 1.0), Err(Error::Bracket { .. })));
    }

    #[test]
    fn newton_trivial_systems() {
        let tol = Tolerances::default();
        let s = newton2(|p| Ok([p[0] - 1.0, p[1] - 2.0]), [0.0, 0.0], 1.0, 1e-9, &tol).unwrap();
        assert!((s.x[0] - 1.0).abs() < 1e-9 && (s.x[1] - 2.0).abs() < 1e-9);
        assert_eq!(s.iterations, 1);

        // A x = b with A = [[2, 1], [1, 3]], b = [3, 5] -> x = [0.8, 1.4].
        let s = newton2(
            |p| Ok([2.0 * p[0] + p[1] - 3.0, p[0] + 3.0 * p[1] - 5.0]),
            [10.0, -4.0],
            1.0,
            1e-10,
            &tol,
        )
        .unwrap();
        assert_eq!(s.iterations, 1);
        assert!((s.x[0] - 0.8).abs() < 1e-9 && (s.x[1] - 1.4).abs() < 1e-9);
    }

    #[test]
    fn newton_reports_failure_with_last_iterate() {
        let tol = Tolerances::default();
        let err = newton2(|p| Ok([p[0] * p[0] + 1.0, p[1]]), [0.3, 0.0], 1.0, 1e-12, &tol)
            .unwrap_err();
        assert!(matches!(err, Error::Fit { .. }));
    }
}
