//! Von Neumann entropy and one-sided quantum discord of qubit ⊗ oscillator
//! states, with projective measurements on the qubit.
//!
//! The measured conditional entropy is minimized over the Bloch sphere by
//! a coarse grid followed by Nelder–Mead refinement from the best grid point.
//! Inside the optimizer the state is held in factored form `ρ = M M†`, so each
//! post-measurement oscillator state `ρ_B^j = M_j M_j†` shares its nonzero
//! spectrum with the small Gram matrix `M_j† M_j` (dimension = rank of ρ).

use std::f64::consts::PI;

use rayon::prelude::*;

use crate::eigen;
use crate::error::{Error, Result};
use crate::hilbert::{Layout, OperatorMatrix, C64};
use crate::optimize::{nelder_mead, NelderMeadOptions};
use crate::thermo::{CycleStates, Stage};

/// Eigenvalues at or below this contribute nothing to `−λ ln λ`.
pub const ENTROPY_FLOOR: f64 = 1e-14;
/// Measurement outcomes rarer than this are skipped.
pub const OUTCOME_FLOOR: f64 = 1e-14;
/// Mixture weights at or below this are dropped when factoring a state.
const RANK_FLOOR: f64 = 1e-16;
/// Discord values in `[−DISCORD_CLIP, 0)` are reported as 0.
pub const DISCORD_CLIP: f64 = 1e-9;

/// Entropy `−Σ λ ln λ` of a spectrum.
pub fn spectrum_entropy(values: &[f64]) -> f64 {
    values
        .iter()
        .filter(|&&l| l > ENTROPY_FLOOR)
        .map(|&l| -l * l.ln())
        .sum()
}

pub fn von_neumann_entropy(rho: &OperatorMatrix) -> Result<f64> {
    rho.ensure_density()?;
    Ok(spectrum_entropy(&eigen::eigenvalues(rho)?))
}

/// Qubit measurement along the Bloch direction `(θ_m, φ_m)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasurementBasis {
    pub theta_m: f64,
    pub phi_m: f64,
}

impl MeasurementBasis {
    /// Any real angles; mapped onto `θ ∈ [0, π]`, `φ ∈ [0, 2π)` describing the same axis.
    pub fn new(theta_m: f64, phi_m: f64) -> Self {
        let mut theta = theta_m.rem_euclid(2.0 * PI);
        let mut phi = phi_m;
        if theta > PI {
            theta = 2.0 * PI - theta;
            phi += PI;
        }
        Self {
            theta_m: theta,
            phi_m: phi.rem_euclid(2.0 * PI),
        }
    }

    /// The two orthonormal outcome states `|n̂₊⟩`, `|n̂₋⟩`.
    pub fn outcome_vectors(&self) -> [[C64; 2]; 2] {
        vectors_for(self.theta_m, self.phi_m)
    }

    pub fn projectors(&self) -> [OperatorMatrix; 2] {
        self.outcome_vectors().map(|v| OperatorMatrix::outer(&v))
    }
}

fn vectors_for(theta: f64, phi: f64) -> [[C64; 2]; 2] {
    let (s, c) = (0.5 * theta).sin_cos();
    let e = C64::from_polar(1.0, phi);
    [
        [C64::new(c, 0.0), e * s],
        [-e.conj() * s, C64::new(c, 0.0)],
    ]
}

fn mode_dim(rho: &OperatorMatrix) -> Result<usize> {
    match rho.layout() {
        Layout::Bipartite { qubit: 2, mode } => Ok(mode),
        _ => Err(Error::Unstructured),
    }
}

/// `Σ_j p_j S(ρ_B^j)` after measuring the qubit, computed on full
/// oscillator-dimension matrices.
pub fn conditional_entropy(rho: &OperatorMatrix, basis: &MeasurementBasis) -> Result<f64> {
    let mode = mode_dim(rho)?;
    let mut total = 0.0;
    for c in basis.outcome_vectors() {
        let mut rb = OperatorMatrix::zeros(mode);
        for a in 0..2 {
            for b in 0..2 {
                let w = c[a].conj() * c[b];
                if w == C64::new(0.0, 0.0) {
                    continue;
                }
                for k in 0..mode {
                    let row = rho.row(a * mode + k);
                    for l in 0..mode {
                        rb[(k, l)] += w * row[b * mode + l];
                    }
                }
            }
        }
        let p = rb.trace().re;
        if p < OUTCOME_FLOOR {
            continue;
        }
        total += p * spectrum_entropy(&eigen::eigenvalues(&rb.scale_real(1.0 / p))?);
    }
    Ok(total)
}

/// A state in factored form, prepared for repeated conditional-entropy evaluation.
#[derive(Debug, Clone)]
pub struct FactoredState {
    rank: usize,
    /// Gram blocks `G_ab = M_a† M_b` (row-major, rank × rank).
    g00: Vec<C64>,
    g11: Vec<C64>,
    g01: Vec<C64>,
    pub entropy_ab: f64,
    pub entropy_a: f64,
}

impl FactoredState {
    /// From a mixture `Σ_k p_k |v_k⟩⟨v_k|` with orthonormal `v_k` on `2 ⊗ mode`.
    pub fn from_mixture(populations: &[f64], basis: &[Vec<C64>], mode: usize) -> Result<Self> {
        let kept: Vec<(f64, &Vec<C64>)> = populations
            .iter()
            .zip(basis)
            .filter(|(p, _)| **p > RANK_FLOOR)
            .map(|(p, v)| (*p, v))
            .collect();
        if let Some((_, v)) = kept.iter().find(|(_, v)| v.len() != 2 * mode) {
            return Err(Error::DimensionMismatch {
                expected: 2 * mode,
                actual: v.len(),
            });
        }
        let rank = kept.len();
        let weights: Vec<f64> = kept.iter().map(|(p, _)| p.sqrt()).collect();
        let gram = |a: usize, b: usize| -> Vec<C64> {
            let mut g = vec![C64::new(0.0, 0.0); rank * rank];
            for k in 0..rank {
                let vk = &kept[k].1[a * mode..(a + 1) * mode];
                for l in 0..rank {
                    let vl = &kept[l].1[b * mode..(b + 1) * mode];
                    let d: C64 = vk.iter().zip(vl).map(|(x, y)| x.conj() * y).sum();
                    g[k * rank + l] = d * (weights[k] * weights[l]);
                }
            }
            g
        };
        let (g00, g11, g01) = (gram(0, 0), gram(1, 1), gram(0, 1));

        let pops: Vec<f64> = kept.iter().map(|(p, _)| *p).collect();
        let entropy_ab = spectrum_entropy(&pops);
        // ρ_A[a][b] = tr(M_a M_b†) = tr(G_ba)
        let tr = |g: &[C64]| -> C64 { (0..rank).map(|k| g[k * rank + k]).sum() };
        let r00 = tr(&g00).re;
        let r11 = tr(&g11).re;
        let r01 = tr(&g01).conj();
        let entropy_a = spectrum_entropy(&hermitian_2x2_eigenvalues(r00, r11, r01));
        Ok(Self {
            rank,
            g00,
            g11,
            g01,
            entropy_ab,
            entropy_a,
        })
    }

    /// Factors a density matrix through its eigendecomposition.
    pub fn from_density(rho: &OperatorMatrix) -> Result<Self> {
        let mode = mode_dim(rho)?;
        rho.ensure_density()?;
        let eig = eigen::eigh(rho)?;
        Self::from_mixture(&eig.values, &eig.vectors, mode)
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn conditional_entropy(&self, basis: &MeasurementBasis) -> Result<f64> {
        self.conditional_entropy_at(basis.theta_m, basis.phi_m)
    }

    fn conditional_entropy_at(&self, theta: f64, phi: f64) -> Result<f64> {
        let r = self.rank;
        let mut total = 0.0;
        for [c0, c1] in vectors_for(theta, phi) {
            let w00 = c0.norm_sqr();
            let w11 = c1.norm_sqr();
            let w01 = c0 * c1.conj();
            let mut g = OperatorMatrix::zeros(r);
            for k in 0..r {
                for l in 0..r {
                    let idx = k * r + l;
                    // G10 = G01†
                    let g10 = self.g01[l * r + k].conj();
                    g[(k, l)] = self.g00[idx] * w00
                        + self.g11[idx] * w11
                        + self.g01[idx] * w01
                        + g10 * w01.conj();
                }
            }
            let p = g.trace().re;
            if p < OUTCOME_FLOOR {
                continue;
            }
            total += p * spectrum_entropy(&eigen::eigenvalues(&g.scale_real(1.0 / p))?);
        }
        Ok(total)
    }
}

/// Eigenvalues of `[[a, c], [c*, b]]`.
fn hermitian_2x2_eigenvalues(a: f64, b: f64, c: C64) -> [f64; 2] {
    let mean = 0.5 * (a + b);
    let half = (0.25 * (a - b) * (a - b) + c.norm_sqr()).sqrt();
    [mean - half, mean + half]
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiscordOptions {
    pub grid_theta: usize,
    pub grid_phi: usize,
    pub refine: bool,
    pub nelder_mead: NelderMeadOptions,
    pub record_trace: bool,
}

impl Default for DiscordOptions {
    fn default() -> Self {
        Self {
            grid_theta: 64,
            grid_phi: 128,
            refine: true,
            nelder_mead: NelderMeadOptions {
                max_iterations: 400,
                f_tol: 1e-14,
                x_tol: 1e-8,
            },
            record_trace: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiscordResult {
    pub discord: f64,
    pub optimal_basis: MeasurementBasis,
    pub entropy_a: f64,
    pub entropy_ab: f64,
    pub conditional_entropy_min: f64,
    /// Smallest conditional entropy found on the coarse grid.
    pub grid_minimum: f64,
    /// Best value after each refinement iteration, when requested.
    pub trace: Option<Vec<f64>>,
}

pub fn quantum_discord(rho: &OperatorMatrix) -> Result<DiscordResult> {
    quantum_discord_with(rho, &DiscordOptions::default())
}

pub fn quantum_discord_with(rho: &OperatorMatrix, opts: &DiscordOptions) -> Result<DiscordResult> {
    discord_of(&FactoredState::from_density(rho)?, opts)
}

/// Discord of an already-factored state.
pub fn discord_of(state: &FactoredState, opts: &DiscordOptions) -> Result<DiscordResult> {
    if opts.grid_theta < 2 || opts.grid_phi < 1 {
        return Err(Error::InvalidParameter {
            name: "discord grid",
            reason: "need at least 2 polar and 1 azimuthal points".into(),
        });
    }
    let (nt, np) = (opts.grid_theta, opts.grid_phi);
    let d_theta = PI / (nt - 1) as f64;
    let d_phi = 2.0 * PI / np as f64;
    let values: Vec<f64> = (0..nt * np)
        .into_par_iter()
        .map(|idx| {
            let (i, j) = (idx / np, idx % np);
            state
                .conditional_entropy_at(i as f64 * d_theta, j as f64 * d_phi)
                .unwrap_or(f64::INFINITY)
        })
        .collect();
    let (best_idx, grid_minimum) = values
        .iter()
        .copied()
        .enumerate()
        .fold((0, f64::INFINITY), |acc, (i, v)| if v < acc.1 { (i, v) } else { acc });
    if !grid_minimum.is_finite() {
        return Err(Error::InvalidParameter {
            name: "state",
            reason: "conditional entropy could not be evaluated".into(),
        });
    }
    let start = [
        (best_idx / np) as f64 * d_theta,
        (best_idx % np) as f64 * d_phi,
    ];

    let mut best = (start, grid_minimum);
    let mut trace = None;
    if opts.refine {
        let m = nelder_mead(
            |x| state.conditional_entropy_at(x[0], x[1]).unwrap_or(f64::INFINITY),
            &start,
            &[0.5 * d_theta, 0.5 * d_phi],
            opts.nelder_mead,
        );
        if m.value < best.1 {
            best = ([m.x[0], m.x[1]], m.value);
        }
        if opts.record_trace {
            trace = Some(m.trace);
        }
    }

    let conditional_entropy_min = best.1;
    let mut discord = state.entropy_a - state.entropy_ab + conditional_entropy_min;
    if (-DISCORD_CLIP..0.0).contains(&discord) {
        discord = 0.0;
    }
    Ok(DiscordResult {
        discord,
        optimal_basis: MeasurementBasis::new(best.0[0], best.0[1]),
        entropy_a: state.entropy_a,
        entropy_ab: state.entropy_ab,
        conditional_entropy_min,
        grid_minimum,
        trace,
    })
}

/// Discord of stages 1, 3, 4 and their pairwise differences.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscordDifferences {
    pub rho1: DiscordResult,
    pub rho3: DiscordResult,
    pub rho4: DiscordResult,
    /// `D(ρ₄) − D(ρ₁)`: change across the hot isochore.
    pub diff_41: f64,
    /// `D(ρ₃) − D(ρ₁)`: cold versus hot thermal state.
    pub diff_31: f64,
    /// `D(ρ₃) − D(ρ₄)`: change across the compression stroke.
    pub diff_34: f64,
}

pub fn discord_differences(states: &CycleStates) -> Result<DiscordDifferences> {
    discord_differences_with(states, &DiscordOptions::default())
}

pub fn discord_differences_with(states: &CycleStates, opts: &DiscordOptions) -> Result<DiscordDifferences> {
    let mode = states.mode_dim();
    let stage = |s: Stage| -> Result<DiscordResult> {
        let (pops, basis) = states.mixture(s);
        discord_of(&FactoredState::from_mixture(pops, basis, mode)?, opts)
    };
    let rho1 = stage(Stage::One)?;
    let rho3 = stage(Stage::Three)?;
    let rho4 = stage(Stage::Four)?;
    Ok(DiscordDifferences {
        diff_41: rho4.discord - rho1.discord,
        diff_31: rho3.discord - rho1.discord,
        diff_34: rho3.discord - rho4.discord,
        rho1,
        rho3,
        rho4,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::LN_2;

    fn bell() -> OperatorMatrix {
        let s = 1.0 / 2f64.sqrt();
        let psi = [C64::new(s, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(s, 0.0)];
        OperatorMatrix::outer(&psi)
            .with_layout(Layout::Bipartite { qubit: 2, mode: 2 })
            .unwrap()
    }

    #[test]
    fn entropy_values() {
        let pure = OperatorMatrix::outer(&[C64::new(0.6, 0.0), C64::new(0.0, 0.8)]);
        assert!(von_neumann_entropy(&pure).unwrap().abs() < 1e-12);
        let mixed2 = OperatorMatrix::identity(2).scale_real(0.5);
        assert!((von_neumann_entropy(&mixed2).unwrap() - LN_2).abs() < 1e-14);
        let mixed4 = OperatorMatrix::identity(4).scale_real(0.25);
        assert!((von_neumann_entropy(&mixed4).unwrap() - 4f64.ln()).abs() < 1e-14);
        assert!(von_neumann_entropy(&OperatorMatrix::identity(2)).is_err());
    }

    #[test]
    fn basis_projectors_resolve_identity() {
        for (t, p) in [(0.0, 0.0), (0.7, 2.1), (PI, 5.0), (1.3, 0.4)] {
            let [p0, p1] = MeasurementBasis::new(t, p).projectors();
            let sum = &p0 + &p1;
            assert!((&sum - &OperatorMatrix::identity(2)).max_abs() < 1e-12);
            assert!((&p0.matmul(&p0) - &p0).max_abs() < 1e-12);
            assert!((&p1.matmul(&p1) - &p1).max_abs() < 1e-12);
        }
    }

    #[test]
    fn basis_canonicalization_keeps_axis() {
        let raw = MeasurementBasis { theta_m: 4.0, phi_m: -1.0 };
        let canon = MeasurementBasis::new(raw.theta_m, raw.phi_m);
        assert!((0.0..=PI).contains(&canon.theta_m));
        assert!((0.0..2.0 * PI).contains(&canon.phi_m));
        let [a, _] = raw.projectors();
        let [b, _] = canon.projectors();
        assert!((&a - &b).max_abs() < 1e-12);
    }

    #[test]
    fn conditional_entropy_of_product_state() {
        let ra = OperatorMatrix::from_diagonal(&[0.8, 0.2]);
        let rb = OperatorMatrix::from_diagonal(&[0.5, 0.3, 0.2]);
        let rho = ra.tensor(&rb);
        let sb = von_neumann_entropy(&rb).unwrap();
        for (t, p) in [(0.0, 0.0), (1.1, 0.3), (2.5, 4.0)] {
            let b = MeasurementBasis::new(t, p);
            assert!((conditional_entropy(&rho, &b).unwrap() - sb).abs() < 1e-12);
        }
    }

    #[test]
    fn conditional_entropy_of_bell_state() {
        let b = MeasurementBasis::new(0.0, 0.0);
        assert!(conditional_entropy(&bell(), &b).unwrap().abs() < 1e-12);
    }

    #[test]
    fn conditional_entropy_requires_structure() {
        let rho = OperatorMatrix::identity(4).scale_real(0.25);
        let b = MeasurementBasis::new(0.0, 0.0);
        assert_eq!(conditional_entropy(&rho, &b), Err(Error::Unstructured));
    }

    #[test]
    fn factored_route_matches_full_route() {
        let rho = bell();
        let mixed = &rho.scale_real(0.7)
            + &OperatorMatrix::from_diagonal(&[0.1, 0.05, 0.1, 0.05])
                .with_layout(Layout::Bipartite { qubit: 2, mode: 2 })
                .unwrap();
        let f = FactoredState::from_density(&mixed).unwrap();
        for (t, p) in [(0.0, 0.0), (0.9, 1.7), (2.2, 3.3)] {
            let b = MeasurementBasis::new(t, p);
            let full = conditional_entropy(&mixed, &b).unwrap();
            assert!((f.conditional_entropy(&b).unwrap() - full).abs() < 1e-12);
        }
    }

    #[test]
    fn bell_discord_is_ln2() {
        let d = quantum_discord(&bell()).unwrap();
        assert!((d.discord - LN_2).abs() < 1e-6);
        assert!((d.entropy_a - LN_2).abs() < 1e-12);
        assert!(d.entropy_ab.abs() < 1e-12);
    }

    #[test]
    fn product_discord_vanishes() {
        let ra = OperatorMatrix::from_diagonal(&[0.7, 0.3]);
        let rb = OperatorMatrix::from_diagonal(&[0.6, 0.4]);
        let d = quantum_discord(&ra.tensor(&rb)).unwrap();
        assert!(d.discord.abs() < 1e-9);
    }

    #[test]
    fn refinement_never_worse_than_grid() {
        let mixed = &bell().scale_real(0.6)
            + &OperatorMatrix::from_diagonal(&[0.3, 0.0, 0.0, 0.1])
                .with_layout(Layout::Bipartite { qubit: 2, mode: 2 })
                .unwrap();
        let opts = DiscordOptions {
            grid_theta: 8,
            grid_phi: 8,
            record_trace: true,
            ..Default::default()
        };
        let d = quantum_discord_with(&mixed, &opts).unwrap();
        assert!(d.conditional_entropy_min <= d.grid_minimum);
        let trace = d.trace.unwrap();
        assert!(trace.windows(2).all(|w| w[1] <= w[0]));
    }

    #[test]
    fn rejects_degenerate_grid() {
        let opts = DiscordOptions {
            grid_theta: 1,
            ..Default::default()
        };
        assert!(quantum_discord_with(&bell(), &opts).is_err());
    }
}
