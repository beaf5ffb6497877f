use gcenter_core::tensor::{average_over_rotations, axial_parameters, AxisFrame, SymTensor3};
use proptest::prelude::*;

fn unit(v: [f64; 3]) -> [f64; 3] {
    let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    [v[0] / n, v[1] / n, v[2] / n]
}

/// Rotation matrix from the axis-angle exponential, written out by hand.
fn rodrigues(n: [f64; 3], theta: f64) -> [[f64; 3]; 3] {
    let (s, c) = theta.sin_cos();
    let t = 1.0 - c;
    let [x, y, z] = n;
    [
        [c + x * x * t, x * y * t - z * s, x * z * t + y * s],
        [y * x * t + z * s, c + y * y * t, y * z * t - x * s],
        [z * x * t - y * s, z * y * t + x * s, c + z * z * t],
    ]
}

fn brute_average(t: &SymTensor3, n: [f64; 3], order: u32) -> [[f64; 3]; 3] {
    let m = t.matrix();
    let mut acc = [[0.0; 3]; 3];
    for step in 0..order {
        let r = rodrigues(n, 2.0 * std::f64::consts::PI * step as f64 / order as f64);
        for i in 0..3 {
            for j in 0..3 {
                let mut v = 0.0;
                for a in 0..3 {
                    for b in 0..3 {
                        v += r[i][a] * m[a][b] * r[j][b];
                    }
                }
                acc[i][j] += v / order as f64;
            }
        }
    }
    acc
}

fn max_diff(a: &[[f64; 3]; 3], b: &[[f64; 3]; 3]) -> f64 {
    (0..3).flat_map(|i| (0..3).map(move |j| (a[i][j] - b[i][j]).abs())).fold(0.0, f64::max)
}

#[test]
fn calculated_zfs_averages_to_paper_value() {
    let t = SymTensor3::calculated_zfs();
    let frame = AxisFrame::new([0.0, 1.0, 0.0], 3).unwrap();
    let avg = average_over_rotations(&t, &frame);
    let p = axial_parameters(&avg, [0.0, 1.0, 0.0]).unwrap();
    assert!((p.d - 1366.5).abs() <= 0.5);
    assert!((p.d / 1365.0 - 1.0).abs() <= 1.5e-3);
    assert!(p.e.abs() <= 1e-9);
    let brute = brute_average(&t, [0.0, 1.0, 0.0], 3);
    assert!(max_diff(&avg.matrix(), &brute) <= 1e-12 * t.frobenius());
}

#[test]
fn order_six_matches_order_three() {
    let t = SymTensor3::calculated_zfs();
    let n = unit([1.0, 1.0, 1.0]);
    let a3 = average_over_rotations(&t, &AxisFrame::new(n, 3).unwrap());
    let a6 = average_over_rotations(&t, &AxisFrame::new(n, 6).unwrap());
    assert!(a3.sub(&a6).frobenius() <= 1e-12 * t.frobenius());
}

fn arb_tensor() -> impl Strategy<Value = SymTensor3> {
    prop::array::uniform6(-1500.0..1500.0f64).prop_map(|v| SymTensor3 { xx: v[0], yy: v[1], zz: v[2], xy: v[3], xz: v[4], yz: v[5] })
}

fn arb_axis() -> impl Strategy<Value = [f64; 3]> {
    [-1.0..1.0f64, -1.0..1.0f64, 0.05..1.0f64].prop_map(unit)
}

proptest! {
    #[test]
    fn averaging_is_idempotent_and_keeps_trace(t in arb_tensor(), n in arb_axis(), order in 3u32..8) {
        let frame = AxisFrame::new(n, order).unwrap();
        let once = average_over_rotations(&t, &frame);
        let twice = average_over_rotations(&once, &frame);
        let scale = t.frobenius().max(1.0);
        prop_assert!(once.sub(&twice).frobenius() <= 1e-12 * scale);
        prop_assert!((once.trace() - t.trace()).abs() <= 1e-12 * scale);
    }

    #[test]
    fn average_commutes_with_generator(t in arb_tensor(), n in arb_axis(), order in 2u32..8) {
        let frame = AxisFrame::new(n, order).unwrap();
        let avg = average_over_rotations(&t, &frame);
        let r = rodrigues(n, 2.0 * std::f64::consts::PI / order as f64);
        let turned = avg.rotated(&r);
        prop_assert!(turned.sub(&avg).frobenius() <= 1e-12 * t.frobenius().max(1.0));
    }

    #[test]
    fn averaging_is_a_contraction(t in arb_tensor(), n in arb_axis(), order in 1u32..8) {
        let avg = average_over_rotations(&t, &AxisFrame::new(n, order).unwrap());
        prop_assert!(avg.frobenius() <= t.frobenius() * (1.0 + 1e-12));
    }

    #[test]
    fn traceless_closed_form(t in arb_tensor(), n in arb_axis(), order in 3u32..8) {
        let iso = t.trace() / 3.0;
        let t = t.sub(&SymTensor3::identity(iso));
        let avg = average_over_rotations(&t, &AxisFrame::new(n, order).unwrap());
        let tnn = t.project(n);
        let scale = t.frobenius().max(1.0);
        for i in 0..3 {
            for j in 0..3 {
                let delta = if i == j { 1.0 } else { 0.0 };
                let closed = 0.5 * (3.0 * n[i] * n[j] - delta) * tnn;
                prop_assert!((avg.matrix()[i][j] - closed).abs() <= 1e-12 * scale);
            }
        }
        let brute = brute_average(&t, n, order);
        prop_assert!(max_diff(&avg.matrix(), &brute) <= 1e-12 * scale);
    }

    #[test]
    fn principal_decomposition_preserves_invariants(t in arb_tensor()) {
        let p = t.principal().unwrap();
        let sum: f64 = p.values.iter().sum();
        let sq: f64 = p.values.iter().map(|v| v * v).sum::<f64>().sqrt();
        let scale = t.frobenius().max(1.0);
        prop_assert!((sum - t.trace()).abs() <= 1e-12 * scale);
        prop_assert!((sq - t.frobenius()).abs() <= 1e-12 * scale);
    }
}
