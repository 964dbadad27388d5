//! Certified eigendecompositions of working-substance Hamiltonians and the
//! Fock-cutoff convergence scan.

use std::collections::BTreeMap;

use crate::eigen;
use crate::error::{Error, Result};
use crate::hilbert::{FockCutoff, OperatorMatrix, C64};
use crate::rabi::{build_hamiltonian, RabiParams};

/// Default bound on `‖H v − E v‖₂` for every eigenpair.
pub const RESIDUAL_TOL: f64 = 1e-9;
/// Largest Fock cutoff the convergence scan will try.
pub const CUTOFF_CEILING: usize = 512;

#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    pub energies: Vec<f64>,
    /// `states[k]` is the eigenvector belonging to `energies[k]`.
    pub states: Vec<Vec<C64>>,
    /// `None` when the operator was not built from a cutoff.
    pub cutoff_used: Option<FockCutoff>,
    /// Largest eigenpair residual.
    pub residual_norm: f64,
}

impl SpectralDecomposition {
    pub fn dim(&self) -> usize {
        self.energies.len()
    }

    pub fn ground_energy(&self) -> f64 {
        self.energies[0]
    }

    /// Energies measured from the ground state (element 0 is exactly 0).
    pub fn ground_referenced(&self) -> Vec<f64> {
        let e0 = self.energies[0];
        self.energies.iter().map(|e| e - e0).collect()
    }

    /// Largest deviation of `⟨v_i|v_j⟩` from `δ_ij` over the first `n_levels` states.
    pub fn orthonormality_error(&self, n_levels: usize) -> f64 {
        let n = n_levels.min(self.dim());
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in i..n {
                let d: C64 = self.states[i]
                    .iter()
                    .zip(&self.states[j])
                    .map(|(a, b)| a.conj() * b)
                    .sum();
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((d - C64::new(target, 0.0)).norm());
            }
        }
        worst
    }
}

fn max_residual(h: &OperatorMatrix, energies: &[f64], states: &[Vec<C64>]) -> f64 {
    let n = h.dim();
    let mut worst: f64 = 0.0;
    let mut hv = vec![C64::new(0.0, 0.0); n];
    for (e, v) in energies.iter().zip(states) {
        for (i, slot) in hv.iter_mut().enumerate() {
            *slot = h.row(i).iter().zip(v).map(|(a, b)| a * b).sum();
        }
        let r: f64 = hv
            .iter()
            .zip(v)
            .map(|(hvi, vi)| (hvi - vi * *e).norm_sqr())
            .sum::<f64>()
            .sqrt();
        worst = worst.max(r);
    }
    worst
}

/// Decomposition with the default residual threshold.
pub fn eigendecompose(h: &OperatorMatrix) -> Result<SpectralDecomposition> {
    eigendecompose_with(h, RESIDUAL_TOL)
}

pub fn eigendecompose_with(h: &OperatorMatrix, residual_tol: f64) -> Result<SpectralDecomposition> {
    h.ensure_hermitian()?;
    let eig = eigen::eigh(h)?;
    let residual_norm = max_residual(h, &eig.values, &eig.vectors);
    if !(residual_norm < residual_tol) {
        return Err(Error::ResidualTooLarge {
            residual: residual_norm,
            threshold: residual_tol,
        });
    }
    let cutoff_used = match h.layout() {
        crate::hilbert::Layout::Bipartite { qubit: 2, mode } => FockCutoff::new(mode).ok(),
        _ => None,
    };
    Ok(SpectralDecomposition {
        energies: eig.values,
        states: eig.vectors,
        cutoff_used,
        residual_norm,
    })
}

/// `E_n − E_0` for the lowest `n_levels` states.
pub fn relative_spectrum(d: &SpectralDecomposition, n_levels: usize) -> Result<Vec<f64>> {
    if n_levels == 0 || n_levels > d.dim() {
        return Err(Error::IndexOutOfRange {
            index: n_levels,
            limit: d.dim(),
        });
    }
    Ok(relative_levels(&d.energies, n_levels))
}

fn relative_levels(energies: &[f64], n_levels: usize) -> Vec<f64> {
    let e0 = energies[0];
    energies[..n_levels].iter().map(|e| e - e0).collect()
}

/// Result of the cutoff convergence scan.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CutoffCertificate {
    pub cutoff: FockCutoff,
    /// Largest change of the tracked relative energies between `cutoff` and `2·cutoff`.
    pub max_change: f64,
}

/// Candidate cutoffs grow by roughly 25 % per step from `max(2, n_levels)`.
fn next_candidate(n: usize) -> usize {
    n + (n / 4).max(2)
}

/// Smallest tested cutoff whose lowest `n_levels` relative energies move by
/// less than `tol` when the cutoff is doubled.
pub fn converged_cutoff(params: &RabiParams, n_levels: usize, tol: f64) -> Result<FockCutoff> {
    converged_cutoff_with(params, n_levels, tol, CUTOFF_CEILING).map(|c| c.cutoff)
}

pub fn converged_cutoff_with(
    params: &RabiParams,
    n_levels: usize,
    tol: f64,
    ceiling: usize,
) -> Result<CutoffCertificate> {
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter {
            name: "tol",
            reason: "must be positive".into(),
        });
    }
    if n_levels == 0 {
        return Err(Error::InvalidParameter {
            name: "n_levels",
            reason: "must be at least 1".into(),
        });
    }
    params.validate()?;
    let mut cache: BTreeMap<usize, Vec<f64>> = BTreeMap::new();
    let mut levels = |n: usize| -> Result<Vec<f64>> {
        if let Some(v) = cache.get(&n) {
            return Ok(v.clone());
        }
        let h = build_hamiltonian(params, FockCutoff::new(n)?)?;
        let v = relative_levels(&eigen::eigenvalues(&h)?, n_levels);
        cache.insert(n, v.clone());
        Ok(v)
    };

    let mut n = n_levels.max(2);
    let mut last_change = f64::INFINITY;
    while 2 * n <= ceiling {
        let coarse = levels(n)?;
        let fine = levels(2 * n)?;
        let change = coarse
            .iter()
            .zip(&fine)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        if change < tol {
            return Ok(CutoffCertificate {
                cutoff: FockCutoff::new(n)?,
                max_change: change,
            });
        }
        last_change = change;
        n = next_candidate(n);
    }
    Err(Error::CutoffCeiling {
        ceiling,
        last_change,
        tol,
    })
}
