use pvkernel::painleve::ode::{integrate, Control, Tolerances, Trajectory};
use pvkernel::painleve::{lax_matrices, third_derivative, Mat2, PainleveJet};

/// (r, r′, r″) carried from `jet` to `to` by the third-order equation.
pub fn advance(jet: &PainleveJet, to: f64, alpha: f64, lambda: f64) -> [f64; 3] {
    let y0 = [jet.r, jet.r1, jet.r2];
    if to == jet.s {
        return y0;
    }
    let tol = Tolerances {
        rtol: 1e-13,
        atol: 1e-16,
        ..Tolerances::default()
    };
    // integrate in t = ±(s - s_jet) so the direction is always forward
    let sign = (to - jet.s).signum();
    let g = |t: f64, y: &[f64; 3]| {
        third_derivative(jet.s + sign * t, y[1], y[2], alpha, lambda)
            .ok()
            .map(|r3| [sign * y[1], sign * y[2], sign * r3])
    };
    let tr: Trajectory<3, ()> = integrate(g, 0.0, y0, &[(to - jet.s).abs()], &tol, |_, _| Control::Continue).unwrap();
    tr.last.1
}

pub fn a1_at(s: f64, state: [f64; 3], alpha: f64, lambda: f64) -> Mat2 {
    let r3 = third_derivative(s, state[1], state[2], alpha, lambda).unwrap();
    let jet = PainleveJet::new(s, state[0], state[1], state[2], r3);
    lax_matrices(&jet, alpha, lambda).unwrap().a1
}

/// Worst relative mismatch of s dA1/ds (central differences) against [A1, B2].
pub fn compatibility_error(jet: &PainleveJet, alpha: f64, lambda: f64) -> f64 {
    let s = jet.s;
    let h = 1e-4 * s;
    let plus = a1_at(s + h, advance(jet, s + h, alpha, lambda), alpha, lambda);
    let minus = a1_at(s - h, advance(jet, s - h, alpha, lambda), alpha, lambda);
    let comm = lax_matrices(jet, alpha, lambda).unwrap().commutator();
    let mut worst: f64 = 0.0;
    for i in 0..2 {
        for j in 0..2 {
            let lhs = s * (plus[i][j] - minus[i][j]) / (2.0 * h);
            worst = worst.max((lhs - comm[i][j]).norm() / comm[i][j].norm().max(1.0));
        }
    }
    worst
}
