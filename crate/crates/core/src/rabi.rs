//! Generalized quantum Rabi Hamiltonian
//! `ω_cav a†a + (ω_q/2) σ^z + g (cos θ σ^x + sin θ σ^z)(a† + a)`, with ħ = 1
//! and every frequency in units of the reference frequency `ω_ref`.

use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hilbert::{self, FockCutoff, Layout, OperatorMatrix, PauliAxis, C64};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RabiParams {
    pub omega_cav: f64,
    pub omega_q: f64,
    pub g: f64,
    pub theta: f64,
}

impl RabiParams {
    pub fn new(omega_cav: f64, omega_q: f64, g: f64, theta: f64) -> Result<Self> {
        let p = Self {
            omega_cav,
            omega_q,
            g,
            theta,
        };
        p.validate()?;
        Ok(p)
    }

    /// Qubit and cavity on resonance, `ω_cav = ω_q = ω`.
    pub fn resonant(omega: f64, g: f64, theta: f64) -> Result<Self> {
        Self::new(omega, omega, g, theta)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |name, reason: &str| {
            Err(Error::InvalidParameter {
                name,
                reason: reason.to_string(),
            })
        };
        if !(self.omega_cav > 0.0) || !self.omega_cav.is_finite() {
            return bad("omega_cav", "must be positive and finite");
        }
        if !(self.omega_q >= 0.0) || !self.omega_q.is_finite() {
            return bad("omega_q", "must be nonnegative and finite");
        }
        if !(self.g >= 0.0) || !self.g.is_finite() {
            return bad("g", "must be nonnegative and finite");
        }
        if !(0.0..=FRAC_PI_2 + 1e-15).contains(&self.theta) {
            return bad("theta", "must lie in [0, pi/2]");
        }
        Ok(())
    }

    /// The same Hamiltonian multiplied by `factor` (all frequencies scaled).
    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            omega_cav: self.omega_cav * factor,
            omega_q: self.omega_q * factor,
            g: self.g * factor,
            theta: self.theta,
        }
    }
}

pub fn build_hamiltonian(params: &RabiParams, cutoff: FockCutoff) -> Result<OperatorMatrix> {
    params.validate()?;
    let n = cutoff.n_max();
    let id2 = OperatorMatrix::identity(2);
    let idn = OperatorMatrix::identity(n);
    let sx = hilbert::pauli(PauliAxis::X);
    let sz = hilbert::pauli(PauliAxis::Z);

    let field = id2.tensor(&hilbert::number(cutoff)).scale_real(params.omega_cav);
    let qubit = sz.tensor(&idn).scale_real(params.omega_q / 2.0);
    let coupling_axis = &sx.scale_real(params.theta.cos()) + &sz.scale_real(params.theta.sin());
    let coupling = coupling_axis
        .tensor(&hilbert::quadrature(cutoff))
        .scale_real(params.g);

    let h = &(&field + &qubit) + &coupling;
    h.with_layout(Layout::Bipartite { qubit: 2, mode: n })
}

/// Parity `σ^z ⊗ (−1)^{a†a}`, conserved by the θ = 0 Hamiltonian.
pub fn parity(cutoff: FockCutoff) -> OperatorMatrix {
    let n = cutoff.n_max();
    let diag: Vec<f64> = (0..n)
        .map(|k| if k % 2 == 0 { 1.0 } else { -1.0 })
        .collect();
    hilbert::pauli(PauliAxis::Z).tensor(&OperatorMatrix::from_diagonal(&diag))
}

/// Expectation `⟨v|O|v⟩`.
pub fn expectation(op: &OperatorMatrix, v: &[C64]) -> C64 {
    let n = op.dim();
    (0..n)
        .map(|i| {
            let ov: C64 = op.row(i).iter().zip(v).map(|(a, b)| a * b).sum();
            v[i].conj() * ov
        })
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eigen;

    fn cut(n: usize) -> FockCutoff {
        FockCutoff::new(n).unwrap()
    }

    #[test]
    fn rejects_invalid_params() {
        assert!(RabiParams::new(0.0, 1.0, 0.1, 0.0).is_err());
        assert!(RabiParams::new(1.0, -0.1, 0.1, 0.0).is_err());
        assert!(RabiParams::new(1.0, 1.0, -0.1, 0.0).is_err());
        assert!(RabiParams::new(1.0, 1.0, 0.1, 2.0).is_err());
        assert!(RabiParams::new(1.0, 0.0, 0.0, FRAC_PI_2).is_ok());
    }

    #[test]
    fn decoupled_spectrum() {
        let p = RabiParams::resonant(1.0, 0.0, 0.0).unwrap();
        let h = build_hamiltonian(&p, cut(6)).unwrap();
        let vals = eigen::eigenvalues(&h).unwrap();
        let rel: Vec<f64> = vals.iter().map(|v| v - vals[0]).collect();
        assert_eq!(&rel[..4], &[0.0, 1.0, 1.0, 2.0]);
        // E = n ± ω/2
        assert_eq!(vals[0], -0.5);
    }

    #[test]
    fn hamiltonian_is_real_and_hermitian() {
        let p = RabiParams::new(1.3, 0.7, 0.9, 0.4).unwrap();
        let h = build_hamiltonian(&p, cut(10)).unwrap();
        assert!(h.is_real());
        assert_eq!(h.hermitian_deviation(), 0.0);
        assert_eq!(h.layout(), Layout::Bipartite { qubit: 2, mode: 10 });
    }

    #[test]
    fn parity_conserved_at_theta_zero() {
        for n in [4, 9, 30] {
            for g in [0.3, 1.0, 2.5] {
                let p = RabiParams::resonant(1.0, g, 0.0).unwrap();
                let h = build_hamiltonian(&p, cut(n)).unwrap();
                assert!(h.commutator(&parity(cut(n))).frobenius_norm() < 1e-12);
            }
        }
        let p = RabiParams::resonant(1.0, 1.0, 0.3).unwrap();
        let h = build_hamiltonian(&p, cut(8)).unwrap();
        assert!(h.commutator(&parity(cut(8))).frobenius_norm() > 1e-3);
    }

    #[test]
    fn theta_half_pi_has_no_cross_block_terms() {
        // sigma^x coefficient vanishes: no entries couple the two qubit blocks
        let p = RabiParams::resonant(1.0, 0.8, FRAC_PI_2).unwrap();
        let n = 7;
        let h = build_hamiltonian(&p, cut(n)).unwrap();
        for i in 0..n {
            for j in 0..n {
                assert!(h[(i, n + j)].norm() < 1e-15);
                assert!(h[(n + i, j)].norm() < 1e-15);
            }
        }
    }

    #[test]
    fn qubit_frequency_shift_is_exact() {
        let n = 6;
        let base = RabiParams::new(1.0, 0.5, 0.7, 0.3).unwrap();
        let shifted = RabiParams {
            omega_q: base.omega_q + 0.25,
            ..base
        };
        let h0 = build_hamiltonian(&base, cut(n)).unwrap();
        let h1 = build_hamiltonian(&shifted, cut(n)).unwrap();
        let diff = &h1 - &h0;
        for k in 0..n {
            let gap0 = h0[(k, k)] - h0[(n + k, n + k)];
            let gap1 = h1[(k, k)] - h1[(n + k, n + k)];
            assert!((gap1 - gap0 - C64::new(0.25, 0.0)).norm() < 1e-15);
            assert!((diff[(k, k)].re - 0.125).abs() < 1e-15);
        }
    }
}
