use num_complex::Complex64;

use super::jet::{q_from_jet, q_prime, tau_prime, PainleveJet};
use crate::error::Result;

pub type Mat2 = [[Complex64; 2]; 2];

const I: Complex64 = Complex64::new(0.0, 1.0);

fn re(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

pub fn mat_mul(a: &Mat2, b: &Mat2) -> Mat2 {
    let mut out = [[Complex64::new(0.0, 0.0); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

pub fn det(a: &Mat2) -> Complex64 {
    a[0][0] * a[1][1] - a[0][1] * a[1][0]
}

pub fn trace(a: &Mat2) -> Complex64 {
    a[0][0] + a[1][1]
}

/// Coefficients of A(ξ) = A0 + A1/ξ + A2/(ξ - s) in ∂Φ/∂ξ = A Φ, and the
/// residue B2 of ∂Φ/∂s = -B2/(ξ - s) Φ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LaxMatrices {
    pub s: f64,
    pub a0: Mat2,
    pub a1: Mat2,
    pub a2: Mat2,
    pub b2: Mat2,
}

impl LaxMatrices {
    /// A(ξ).
    pub fn a_at(&self, xi: Complex64) -> Mat2 {
        let mut out = self.a0;
        let c1 = 1.0 / xi;
        let c2 = 1.0 / (xi - self.s);
        for i in 0..2 {
            for j in 0..2 {
                out[i][j] += self.a1[i][j] * c1 + self.a2[i][j] * c2;
            }
        }
        out
    }

    /// ∂A/∂ξ.
    pub fn a_xi_derivative(&self, xi: Complex64) -> Mat2 {
        let c1 = -1.0 / (xi * xi);
        let c2 = -1.0 / ((xi - self.s) * (xi - self.s));
        let mut out = [[Complex64::new(0.0, 0.0); 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                out[i][j] = self.a1[i][j] * c1 + self.a2[i][j] * c2;
            }
        }
        out
    }

    /// A1 B2 - B2 A1.
    pub fn commutator(&self) -> Mat2 {
        let ab = mat_mul(&self.a1, &self.b2);
        let ba = mat_mul(&self.b2, &self.a1);
        let mut out = ab;
        for i in 0..2 {
            for j in 0..2 {
                out[i][j] -= ba[i][j];
            }
        }
        out
    }
}

/// Lax matrices at the jet's s, with q, q′ and tau′ reconstructed from r.
pub fn lax_matrices(jet: &PainleveJet, alpha: f64, lambda: f64) -> Result<LaxMatrices> {
    jet.check_regular()?;
    let q = q_from_jet(jet, alpha, lambda)?;
    let qp = q_prime(jet);
    let tp = tau_prime(jet, lambda)?;
    let (r, r1) = (jet.r, jet.r1);
    let z = re(0.0);
    let a0 = [[z, z], [I * 0.5, z]];
    let a1 = [
        [re(-0.25 + 0.5 * r + qp), -I * (0.5 + r1)],
        [I * (tp - q), re(0.25 - 0.5 * r - qp)],
    ];
    let b2 = [[re(qp), -I * r1], [I * tp, re(-qp)]];
    let a2 = [[-b2[0][0], -b2[0][1]], [-b2[1][0], -b2[1][1]]];
    Ok(LaxMatrices {
        s: jet.s,
        a0,
        a1,
        a2,
        b2,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn determinants_on_arbitrary_jet() {
        // both determinant identities hold for any jet once q comes from r
        let jet = PainleveJet::new(0.8, -1.7, -0.11, 0.02, 0.0);
        let (a, l) = (1.5, 0.5);
        let m = lax_matrices(&jet, a, l).unwrap();
        assert!((det(&m.a1) + a * a / 4.0).norm() < 1e-12);
        assert!((det(&m.b2) + l * l / 4.0).norm() < 1e-12);
        assert!(trace(&m.a1).norm() < 1e-15);
        assert!(trace(&m.b2).norm() < 1e-15);
        for i in 0..2 {
            for j in 0..2 {
                assert_eq!(m.a2[i][j], -m.b2[i][j]);
            }
        }
    }

    #[test]
    fn singular_jet_rejected() {
        let jet = PainleveJet::new(1.0, -1.0, 0.0, 0.1, 0.0);
        assert!(lax_matrices(&jet, 1.0, 1.0).is_err());
        let jet = PainleveJet::new(1.0, -1.0, -0.5, 0.1, 0.0);
        assert!(lax_matrices(&jet, 1.0, 1.0).is_err());
    }
}
