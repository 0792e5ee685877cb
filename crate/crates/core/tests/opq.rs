use proptest::prelude::*;

use pvkernel::limit_kernels::mp_density;
use pvkernel::opq::{
    build_recurrence, build_recurrence_with, orthogonality_residual, FiniteKernel, HardEdgeKernel, Precision,
    RecurrenceTable, WeightParams,
};

/// Monic π_0..=π_n at x from the table.
fn monic_values(table: &RecurrenceTable, n: usize, x: f64) -> Vec<f64> {
    let mut out = vec![1.0, x - table.a[0]];
    for k in 1..n {
        let next = (x - table.a[k]) * out[k] - table.b[k] * out[k - 1];
        out.push(next);
    }
    out.truncate(n + 1);
    out
}

/// Monic Laguerre polynomials L_0..=L_n for x^α e^{-x}.
fn monic_laguerre(alpha: f64, n: usize, x: f64) -> Vec<f64> {
    let mut out = vec![1.0, x - (alpha + 1.0)];
    for k in 1..n {
        let kf = k as f64;
        let next = (x - (2.0 * kf + alpha + 1.0)) * out[k] - kf * (kf + alpha) * out[k - 1];
        out.push(next);
    }
    out
}

#[test]
fn linear_perturbation_matches_christoffel_formula() {
    // for (x + t) x^α e^{-x}: π_k(x) (x + t) = L_{k+1}(x) - L_{k+1}(-t)/L_k(-t) L_k(x)
    for &(alpha, t) in &[(1.0, 1.0), (2.5, 0.3), (0.5, 4.0)] {
        let n = 20;
        let params = WeightParams::new(alpha, 1.0, t).unwrap();
        let table = build_recurrence(n, &params).unwrap();
        let at_minus_t = monic_laguerre(alpha, n + 1, -t);
        for &x in &[0.5, 3.0, 10.0, 40.0] {
            let lag = monic_laguerre(alpha, n + 1, x);
            let got = monic_values(&table, n, x);
            for k in 0..=n {
                let want = (lag[k + 1] - at_minus_t[k + 1] / at_minus_t[k] * lag[k]) / (x + t);
                let scale = want.abs().max(1e-300);
                assert!(
                    (got[k] - want).abs() < 1e-9 * scale.max(lag[k].abs()),
                    "alpha {alpha}, t {t}, x {x}, k {k}: {} vs {want}",
                    got[k]
                );
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn orthogonality_for_random_parameters(alpha in 0.1f64..3.0, lambda in -0.9f64..3.0, t in 0.05f64..5.0) {
        let params = WeightParams::new(alpha, lambda, t).unwrap();
        let table = build_recurrence(24, &params).unwrap();
        let res = orthogonality_residual(&table, 24, 400).unwrap();
        prop_assert!(res < 1e-8, "{res:e}");
    }

    #[test]
    fn stieltjes_is_stable_in_quadrature_order(alpha in 0.1f64..3.0, lambda in -0.9f64..3.0, t in 0.05f64..5.0) {
        let n = 32;
        let params = WeightParams::new(alpha, lambda, t).unwrap();
        let coarse = build_recurrence_with(n, &params, 4 * n, Precision::Double).unwrap();
        let fine = build_recurrence_with(n, &params, 8 * n, Precision::Double).unwrap();
        for k in 0..n {
            let da = (coarse.a[k] - fine.a[k]).abs() / fine.a[k].abs().max(1.0);
            prop_assert!(da < 1e-9, "a_{k}: {da:e}");
            if k >= 1 {
                let db = (coarse.b[k] - fine.b[k]).abs() / fine.b[k].abs().max(1.0);
                prop_assert!(db < 1e-9, "b_{k}: {db:e}");
            }
        }
    }

    #[test]
    fn kernel_is_symmetric_and_positive_on_diagonal(x in 0.01f64..100.0, y in 0.01f64..100.0) {
        let params = WeightParams::new(1.5, 0.5, 0.7).unwrap();
        let k = FiniteKernel::new(16, &params).unwrap();
        prop_assert!((k.eval(x, y).unwrap() - k.eval(y, x).unwrap()).abs() < 1e-12);
        prop_assert!(k.eval(x, x).unwrap() > 0.0);
    }
}

#[test]
fn bulk_density_for_both_lambdas() {
    let n = 128;
    for &lambda in &[0.0, 1.0] {
        let params = WeightParams::new(1.0, lambda, 1.0).unwrap();
        let k = FiniteKernel::new(n, &params).unwrap();
        for &x in &[0.25, 0.5, 0.75] {
            let z = 4.0 * n as f64 * x;
            let emp = 4.0 * k.eval(z, z).unwrap();
            let mu = mp_density(x).unwrap();
            assert!(((emp - mu) / mu).abs() < 0.02, "lambda {lambda}, x {x}");
        }
    }
}

#[test]
fn hard_edge_differences_shrink_with_n() {
    let kernels: Vec<_> = [16, 32, 64]
        .iter()
        .map(|&n| HardEdgeKernel::new(1.5, 0.5, n, 5.0).unwrap())
        .collect();
    for &(u, v) in &[(1.0, 1.0), (2.0, 3.0)] {
        let vals: Vec<f64> = kernels.iter().map(|k| k.eval(u, v).unwrap()).collect();
        let d1 = (vals[1] - vals[0]).abs();
        let d2 = (vals[2] - vals[1]).abs();
        assert!(d2 < d1, "({u}, {v}): {d1:e} then {d2:e}");
    }
}

#[test]
fn extended_precision_tracks_double() {
    let params = WeightParams::new(2.0, -1.0, 0.3).unwrap();
    let d = build_recurrence_with(64, &params, 512, Precision::Double).unwrap();
    let e = build_recurrence_with(64, &params, 512, Precision::Extended).unwrap();
    for k in 0..64 {
        assert!((d.a[k] - e.a[k]).abs() < 1e-9 * d.a[k].abs().max(1.0));
    }
}

#[test]
fn high_degree_classical_coefficients() {
    // degrees past 350 need nodes beyond x ~ 1400, where √w underflows
    let alpha = 1.5;
    let params = WeightParams::classical(alpha).unwrap();
    let n = 400;
    let table = build_recurrence_with(n, &params, 1600, Precision::Extended).unwrap();
    for k in [1usize, 200, 350, 399] {
        let kf = k as f64;
        let a = 2.0 * kf + alpha + 1.0;
        let b = kf * (kf + alpha);
        assert!((table.a[k] - a).abs() < 1e-9 * a, "a_{k} = {}", table.a[k]);
        assert!((table.b[k] - b).abs() < 1e-9 * b, "b_{k} = {}", table.b[k]);
    }
}
