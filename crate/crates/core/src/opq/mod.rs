//! Orthogonal polynomials for (x + t)^λ x^α e^{-x}: Gauss-Laguerre rules,
//! Stieltjes recurrences, and the Christoffel-Darboux kernel with its edge
//! rescalings.

mod kernel;
mod quadrature;
mod recurrence;
mod weight;

pub use kernel::{
    cd_kernel, cd_kernel_sum, scaled_hard, scaled_soft, FiniteKernel, HardEdgeKernel,
    SoftEdgeKernel, CONFLUENT_THRESHOLD,
};
pub use quadrature::{
    build_quadrature, composite_rule, discretize, gauss_jacobi_unit, laguerre_resolves, panel_order, QuadratureRule,
    MAX_ORDER,
};
pub use recurrence::{
    build_recurrence, build_recurrence_with, default_quadrature_order, moment, stieltjes,
    Precision, RecurrenceTable, MAX_DEGREE_DOUBLE, MAX_DEGREE_EXTENDED,
};
pub use weight::{weight_eval, WeightParams};

/// max_{i≠j≤n} |∫π_iπ_j w| / √(h_i h_j), measured with an independent rule of
/// order `check_order`.
pub fn orthogonality_residual(table: &RecurrenceTable, n: usize, check_order: usize) -> crate::Result<f64> {
    let p = &table.params;
    // a different panel size keeps the check independent of the build rule
    let rule = if laguerre_resolves(p, check_order) {
        build_quadrature(check_order, p.alpha())?
    } else {
        composite_rule(p.alpha(), p.t(), check_order, panel_order(n) + 16)?
    };
    // orthonormal values times √W at each node, carried as e^{g} times a
    // mantissa with g = ln(W/h_0)/4 so that far nodes neither under- nor overflow
    let mut vals = vec![vec![0.0; rule.len()]; n + 1];
    let mut scale = vec![0.0; rule.len()];
    for (i, (&x, &lw)) in rule.nodes.iter().zip(&rule.ln_weights).enumerate() {
        let ln_rel = lw + p.ln_perturbation(x) - table.ln_h[0];
        if ln_rel < -2700.0 {
            continue;
        }
        scale[i] = (0.25 * ln_rel).exp();
        let mut prev = 0.0;
        let mut cur = scale[i];
        for k in 0..=n {
            vals[k][i] = cur;
            if k == n {
                break;
            }
            let sb_k = if k == 0 { 0.0 } else { table.b[k].sqrt() };
            let next = ((x - table.a[k]) * cur - sb_k * prev) / table.b[k + 1].sqrt();
            prev = cur;
            cur = next;
        }
    }
    for row in vals.iter_mut() {
        for (v, s) in row.iter_mut().zip(&scale) {
            *v *= s;
        }
    }
    let mut worst: f64 = 0.0;
    for i in 0..=n {
        for j in 0..i {
            let ip: f64 = vals[i].iter().zip(&vals[j]).map(|(a, b)| a * b).sum();
            worst = worst.max(ip.abs());
        }
    }
    Ok(worst)
}
