//! Quantum Otto cycle: thermal states, adiabatic strokes at frozen
//! populations, and the heat/work bookkeeping of the four stages.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hilbert::{FockCutoff, Layout, OperatorMatrix, C64};
use crate::rabi::{build_hamiltonian, RabiParams};
use crate::spectral::{self, SpectralDecomposition, CUTOFF_CEILING};

/// Boltzmann constant, J/K (exact SI value).
pub const BOLTZMANN: f64 = 1.380649e-23;
/// Reduced Planck constant, J·s.
pub const HBAR: f64 = 1.054_571_817e-34;
/// Reference angular frequency ω_ref in rad/s: 2π × 10 GHz.
pub const DEFAULT_OMEGA_REF: f64 = 2.0 * PI * 10.0e9;
/// Cold-bath temperature used throughout the reference figures, in kelvin.
pub const DEFAULT_T_COLD: f64 = 0.019;
/// Default number of levels summed in the cycle bookkeeping.
pub const DEFAULT_N_LEVELS: usize = 24;
/// Populations outside the summed levels above this mass raise a warning.
pub const TAIL_TOL: f64 = 1e-8;
/// |W| at or below this is classified as idle.
pub const REGIME_TOL: f64 = 1e-12;

/// Hot and cold reservoirs; temperatures in kelvin, ω_ref in rad/s.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReservoirSpec {
    pub t_cold: f64,
    pub t_hot: f64,
    pub omega_ref: f64,
}

impl ReservoirSpec {
    pub fn new(t_cold: f64, t_hot: f64, omega_ref: f64) -> Result<Self> {
        if !(t_cold > 0.0) || !(t_hot > t_cold) || !t_hot.is_finite() {
            return Err(Error::InvalidParameter {
                name: "temperatures",
                reason: format!("need 0 < T_c < T_h, got T_c = {t_cold}, T_h = {t_hot}"),
            });
        }
        if !(omega_ref > 0.0) || !omega_ref.is_finite() {
            return Err(Error::InvalidParameter {
                name: "omega_ref",
                reason: "must be positive".into(),
            });
        }
        Ok(Self {
            t_cold,
            t_hot,
            omega_ref,
        })
    }

    /// `k_B T / (ħ ω_ref)`.
    pub fn thermal_energy(&self, temperature: f64) -> f64 {
        BOLTZMANN * temperature / (HBAR * self.omega_ref)
    }

    pub fn kt_cold(&self) -> f64 {
        self.thermal_energy(self.t_cold)
    }

    pub fn kt_hot(&self) -> f64 {
        self.thermal_energy(self.t_hot)
    }

    pub fn temperature_ratio(&self) -> f64 {
        self.t_hot / self.t_cold
    }
}

/// Which parameters the adiabatic strokes change.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum ProtocolVariant {
    /// Resonator (and resonant qubit) frequency switches between ω_c and ω_h; g, θ fixed.
    ResonatorFrequency,
    /// As above, with the coupling rescaled to `g_h = α (ω_h/ω_c) g_c`.
    CoupledCoupling { alpha: f64 },
    /// Only the qubit frequency changes, ω_qc → ω_qh.
    QubitFrequency,
}

impl ProtocolVariant {
    pub fn name(&self) -> &'static str {
        match self {
            Self::ResonatorFrequency => "resonator-frequency",
            Self::CoupledCoupling { .. } => "coupled-coupling",
            Self::QubitFrequency => "qubit-frequency",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CutoffPolicy {
    Fixed(FockCutoff),
    /// Converged per Hamiltonian; the larger of the hot and cold cutoffs is used.
    Auto { tol: f64, ceiling: usize },
}

impl Default for CutoffPolicy {
    fn default() -> Self {
        Self::Auto {
            tol: 1e-8,
            ceiling: CUTOFF_CEILING,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CycleProtocol {
    pub variant: ProtocolVariant,
    pub cold: RabiParams,
    pub hot: RabiParams,
    pub reservoirs: ReservoirSpec,
    pub n_levels: usize,
    pub cutoff: CutoffPolicy,
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-12 * a.abs().max(b.abs()).max(1.0)
}

impl CycleProtocol {
    /// Resonant working substance whose frequency switches ω_c ↔ ω_h.
    pub fn resonator_frequency(
        omega_c: f64,
        omega_h: f64,
        g: f64,
        theta: f64,
        reservoirs: ReservoirSpec,
    ) -> Result<Self> {
        Self {
            variant: ProtocolVariant::ResonatorFrequency,
            cold: RabiParams::resonant(omega_c, g, theta)?,
            hot: RabiParams::resonant(omega_h, g, theta)?,
            reservoirs,
            n_levels: DEFAULT_N_LEVELS,
            cutoff: CutoffPolicy::default(),
        }
        .validated()
    }

    pub fn coupled_coupling(
        omega_c: f64,
        omega_h: f64,
        g_c: f64,
        alpha: f64,
        theta: f64,
        reservoirs: ReservoirSpec,
    ) -> Result<Self> {
        let g_h = alpha * (omega_h / omega_c) * g_c;
        Self {
            variant: ProtocolVariant::CoupledCoupling { alpha },
            cold: RabiParams::resonant(omega_c, g_c, theta)?,
            hot: RabiParams::resonant(omega_h, g_h, theta)?,
            reservoirs,
            n_levels: DEFAULT_N_LEVELS,
            cutoff: CutoffPolicy::default(),
        }
        .validated()
    }

    pub fn qubit_frequency(
        omega: f64,
        g: f64,
        omega_qc: f64,
        omega_qh: f64,
        theta: f64,
        reservoirs: ReservoirSpec,
    ) -> Result<Self> {
        Self {
            variant: ProtocolVariant::QubitFrequency,
            cold: RabiParams::new(omega, omega_qc, g, theta)?,
            hot: RabiParams::new(omega, omega_qh, g, theta)?,
            reservoirs,
            n_levels: DEFAULT_N_LEVELS,
            cutoff: CutoffPolicy::default(),
        }
        .validated()
    }

    pub fn with_n_levels(mut self, n_levels: usize) -> Result<Self> {
        self.n_levels = n_levels;
        self.validated()
    }

    pub fn with_cutoff(mut self, cutoff: CutoffPolicy) -> Self {
        self.cutoff = cutoff;
        self
    }

    fn validated(self) -> Result<Self> {
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        self.cold.validate()?;
        self.hot.validate()?;
        let invalid = |reason: String| {
            Err(Error::InvalidParameter {
                name: "protocol",
                reason,
            })
        };
        if self.n_levels < 2 {
            return invalid(format!("n_levels must be at least 2, got {}", self.n_levels));
        }
        let (c, h) = (&self.cold, &self.hot);
        if !close(c.theta, h.theta) {
            return invalid("mixing angle must be shared by hot and cold Hamiltonians".into());
        }
        match self.variant {
            ProtocolVariant::ResonatorFrequency | ProtocolVariant::CoupledCoupling { .. } => {
                if !close(c.omega_cav, c.omega_q) || !close(h.omega_cav, h.omega_q) {
                    return invalid("resonator protocols need omega_cav = omega_q".into());
                }
                if h.omega_cav < c.omega_cav {
                    return invalid("hot frequency must not be below the cold frequency".into());
                }
            }
            ProtocolVariant::QubitFrequency => {
                if !close(c.omega_cav, h.omega_cav) || !close(c.g, h.g) {
                    return invalid("qubit-frequency protocol fixes omega_cav and g".into());
                }
                if h.omega_q < c.omega_q {
                    return invalid("need omega_qh >= omega_qc".into());
                }
            }
        }
        match self.variant {
            ProtocolVariant::ResonatorFrequency => {
                if !close(c.g, h.g) {
                    return invalid("resonator-frequency protocol keeps g fixed".into());
                }
            }
            ProtocolVariant::CoupledCoupling { alpha } => {
                if !(alpha >= 0.0) {
                    return invalid("alpha must be nonnegative".into());
                }
                let expected = alpha * (h.omega_cav / c.omega_cav) * c.g;
                if !close(h.g, expected) {
                    return invalid(format!("need g_h = alpha (omega_h/omega_c) g_c = {expected}"));
                }
            }
            ProtocolVariant::QubitFrequency => {}
        }
        Ok(())
    }

    /// ω_h/ω_c as seen by the resonator (1 for the qubit-frequency protocol).
    pub fn frequency_ratio(&self) -> f64 {
        self.hot.omega_cav / self.cold.omega_cav
    }
}

/// Boltzmann populations `P_n ∝ exp(−(E_n − E_min)/k_B T)`; `thermal_energy` is `k_B T`
/// in the same units as the energies.
pub fn thermal_populations(energies: &[f64], thermal_energy: f64) -> Result<Vec<f64>> {
    if !(thermal_energy > 0.0) || !thermal_energy.is_finite() {
        return Err(Error::InvalidParameter {
            name: "temperature",
            reason: format!("k_B T must be positive, got {thermal_energy}"),
        });
    }
    let e_min = energies.iter().copied().fold(f64::INFINITY, f64::min);
    let weights: Vec<f64> = energies
        .iter()
        .map(|e| (-(e - e_min) / thermal_energy).exp())
        .collect();
    let z: f64 = weights.iter().sum();
    Ok(weights.into_iter().map(|w| w / z).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Regime {
    Engine,
    Refrigerator,
    Idle,
}

impl Regime {
    pub fn classify(work: f64, tol: f64) -> Self {
        if work > tol {
            Self::Engine
        } else if work < -tol {
            Self::Refrigerator
        } else {
            Self::Idle
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Engine => "engine",
            Self::Refrigerator => "refrigerator",
            Self::Idle => "idle",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CycleReport {
    pub q_hot: f64,
    pub q_cold: f64,
    pub work: f64,
    /// `W_n` for `n < n_levels`.
    pub work_per_level: Vec<f64>,
    /// `W / Q_h`, absent when `Q_h = 0`.
    pub efficiency: Option<f64>,
    pub regime: Regime,
    /// Largest population mass (hot or cold) outside the summed levels.
    pub tail_mass: f64,
    pub truncation_warning: bool,
}

pub fn classify_regime(report: &CycleReport) -> Regime {
    Regime::classify(report.work, REGIME_TOL)
}

/// Heat and work for energies in ascending order, summed over the lowest `n_levels`.
pub fn cycle_thermodynamics(
    hot_energies: &[f64],
    cold_energies: &[f64],
    kt_hot: f64,
    kt_cold: f64,
    n_levels: usize,
) -> Result<CycleReport> {
    let p_hot = thermal_populations(hot_energies, kt_hot)?;
    let p_cold = thermal_populations(cold_energies, kt_cold)?;
    report_from_populations(hot_energies, cold_energies, &p_hot, &p_cold, n_levels)
}

fn report_from_populations(
    hot_energies: &[f64],
    cold_energies: &[f64],
    p_hot: &[f64],
    p_cold: &[f64],
    n_levels: usize,
) -> Result<CycleReport> {
    let limit = hot_energies.len().min(cold_energies.len());
    if n_levels == 0 || n_levels > limit {
        return Err(Error::IndexOutOfRange {
            index: n_levels,
            limit,
        });
    }
    let (eh0, ec0) = (hot_energies[0], cold_energies[0]);
    let mut q_hot = 0.0;
    let mut q_cold = 0.0;
    let mut work_per_level = Vec::with_capacity(n_levels);
    for n in 0..n_levels {
        let eh = hot_energies[n] - eh0;
        let ec = cold_energies[n] - ec0;
        let dp = p_hot[n] - p_cold[n];
        q_hot += eh * dp;
        q_cold += ec * (p_cold[n] - p_hot[n]);
        work_per_level.push((eh - ec) * dp);
    }
    let work: f64 = work_per_level.iter().sum();
    let tail = |p: &[f64]| (1.0 - p[..n_levels].iter().sum::<f64>()).max(0.0);
    let tail_mass = tail(p_hot).max(tail(p_cold));
    let efficiency = (q_hot != 0.0).then(|| work / q_hot);
    Ok(CycleReport {
        q_hot,
        q_cold,
        work,
        work_per_level,
        efficiency,
        regime: Regime::classify(work, REGIME_TOL),
        tail_mass,
        truncation_warning: tail_mass > TAIL_TOL,
    })
}

/// Per-level work `(E_n^h − E_n^c)(P_n(T_h) − P_n(T_c))` with ground-referenced spectra.
pub fn work_per_level(
    hot: &SpectralDecomposition,
    cold: &SpectralDecomposition,
    reservoirs: &ReservoirSpec,
    n: usize,
) -> Result<f64> {
    let limit = hot.dim().min(cold.dim());
    if n >= limit {
        return Err(Error::IndexOutOfRange { index: n, limit });
    }
    let p_hot = thermal_populations(&hot.energies, reservoirs.kt_hot())?;
    let p_cold = thermal_populations(&cold.energies, reservoirs.kt_cold())?;
    let eh = hot.energies[n] - hot.energies[0];
    let ec = cold.energies[n] - cold.energies[0];
    Ok((eh - ec) * (p_hot[n] - p_cold[n]))
}

/// Both decompositions at a common cutoff.
#[derive(Debug, Clone)]
pub struct CycleSpectra {
    pub hot: SpectralDecomposition,
    pub cold: SpectralDecomposition,
    pub cutoff: FockCutoff,
}

pub fn resolve_cutoff(protocol: &CycleProtocol) -> Result<FockCutoff> {
    match protocol.cutoff {
        CutoffPolicy::Fixed(c) => Ok(c),
        CutoffPolicy::Auto { tol, ceiling } => {
            let hot = spectral::converged_cutoff_with(&protocol.hot, protocol.n_levels, tol, ceiling)?;
            let cold = spectral::converged_cutoff_with(&protocol.cold, protocol.n_levels, tol, ceiling)?;
            Ok(hot.cutoff.max(cold.cutoff))
        }
    }
}

pub fn solve_spectra(protocol: &CycleProtocol) -> Result<CycleSpectra> {
    protocol.validate()?;
    let cutoff = resolve_cutoff(protocol)?;
    if 2 * cutoff.n_max() < protocol.n_levels {
        return Err(Error::IndexOutOfRange {
            index: protocol.n_levels,
            limit: 2 * cutoff.n_max(),
        });
    }
    let hot = spectral::eigendecompose(&build_hamiltonian(&protocol.hot, cutoff)?)?;
    let cold = spectral::eigendecompose(&build_hamiltonian(&protocol.cold, cutoff)?)?;
    Ok(CycleSpectra { hot, cold, cutoff })
}

pub fn report_for(spectra: &CycleSpectra, protocol: &CycleProtocol) -> Result<CycleReport> {
    cycle_thermodynamics(
        &spectra.hot.energies,
        &spectra.cold.energies,
        protocol.reservoirs.kt_hot(),
        protocol.reservoirs.kt_cold(),
        protocol.n_levels,
    )
}

/// The four states of the cycle.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    /// Hot thermal state, end of the hot isochore.
    One,
    /// Hot populations on the cold eigenbasis, end of the expansion.
    Two,
    /// Cold thermal state, end of the cold isochore.
    Three,
    /// Cold populations on the hot eigenbasis, end of the compression.
    Four,
}

/// States ρ₁…ρ₄ of the cycle together with the data they were built from.
#[derive(Debug, Clone)]
pub struct CycleStates {
    pub rho1: OperatorMatrix,
    pub rho2: OperatorMatrix,
    pub rho3: OperatorMatrix,
    pub rho4: OperatorMatrix,
    pub hot: SpectralDecomposition,
    pub cold: SpectralDecomposition,
    /// `P_n(T_h)` on the hot spectrum.
    pub pop_hot: Vec<f64>,
    /// `P_n(T_c)` on the cold spectrum.
    pub pop_cold: Vec<f64>,
}

/// Populations below this are left out of assembled density matrices.
const MIXTURE_FLOOR: f64 = 1e-30;

/// `Σ_k p_k |v_k⟩⟨v_k|` on the qubit ⊗ oscillator layout.
pub fn assemble_mixture(populations: &[f64], basis: &[Vec<C64>], mode_dim: usize) -> Result<OperatorMatrix> {
    let dim = basis.first().map_or(0, Vec::len);
    let mut rho = OperatorMatrix::zeros(dim);
    for (p, v) in populations.iter().zip(basis) {
        if *p < MIXTURE_FLOOR {
            continue;
        }
        for i in 0..dim {
            let pvi = v[i] * *p;
            if pvi == C64::new(0.0, 0.0) {
                continue;
            }
            for j in 0..dim {
                rho[(i, j)] += pvi * v[j].conj();
            }
        }
    }
    rho.with_layout(Layout::Bipartite {
        qubit: 2,
        mode: mode_dim,
    })
}

impl CycleStates {
    pub fn build(spectra: CycleSpectra, reservoirs: &ReservoirSpec) -> Result<Self> {
        let CycleSpectra { hot, cold, cutoff } = spectra;
        let mode = cutoff.n_max();
        let pop_hot = thermal_populations(&hot.energies, reservoirs.kt_hot())?;
        let pop_cold = thermal_populations(&cold.energies, reservoirs.kt_cold())?;
        Ok(Self {
            rho1: assemble_mixture(&pop_hot, &hot.states, mode)?,
            rho2: assemble_mixture(&pop_hot, &cold.states, mode)?,
            rho3: assemble_mixture(&pop_cold, &cold.states, mode)?,
            rho4: assemble_mixture(&pop_cold, &hot.states, mode)?,
            hot,
            cold,
            pop_hot,
            pop_cold,
        })
    }

    pub fn rho(&self, stage: Stage) -> &OperatorMatrix {
        match stage {
            Stage::One => &self.rho1,
            Stage::Two => &self.rho2,
            Stage::Three => &self.rho3,
            Stage::Four => &self.rho4,
        }
    }

    /// Spectral form `(populations, eigenbasis)` of a stage.
    pub fn mixture(&self, stage: Stage) -> (&[f64], &[Vec<C64>]) {
        match stage {
            Stage::One => (&self.pop_hot, &self.hot.states),
            Stage::Two => (&self.pop_hot, &self.cold.states),
            Stage::Three => (&self.pop_cold, &self.cold.states),
            Stage::Four => (&self.pop_cold, &self.hot.states),
        }
    }

    pub fn mode_dim(&self) -> usize {
        self.hot.dim() / 2
    }
}

pub fn run_cycle(protocol: &CycleProtocol) -> Result<(CycleStates, CycleReport)> {
    let spectra = solve_spectra(protocol)?;
    let report = report_for(&spectra, protocol)?;
    let states = CycleStates::build(spectra, &protocol.reservoirs)?;
    Ok((states, report))
}
