//! Quantum Otto cycle with a quantum Rabi working substance: exact
//! diagonalization of the Hamiltonian, cycle heat and work, qubit–oscillator
//! discord along the cycle, and the deep-coupling closed-form estimates.

pub mod analytic;
pub mod correlations;
pub mod eigen;
pub mod error;
pub mod hilbert;
pub mod optimize;
pub mod rabi;
pub mod spectral;
pub mod sweep;
pub mod thermo;

pub use analytic::{approx_levels, approx_w1, laguerre, positive_work_bound, ApproxEnergies};
pub use correlations::{
    conditional_entropy, discord_differences, quantum_discord, von_neumann_entropy,
    DiscordDifferences, DiscordOptions, DiscordResult, FactoredState, MeasurementBasis,
};
pub use error::{Error, Result};
pub use hilbert::{FockCutoff, Layout, OperatorMatrix, Subsystem, C64};
pub use rabi::{build_hamiltonian, RabiParams};
pub use spectral::{converged_cutoff, eigendecompose, relative_spectrum, SpectralDecomposition};
pub use thermo::{
    run_cycle, CutoffPolicy, CycleProtocol, CycleReport, CycleStates, ProtocolVariant, Regime,
    ReservoirSpec, Stage,
};
pub use sweep::{figure_preset, parse_config, run_sweep, Dataset, SweepConfig};
