//! Parameter sweeps: configuration, figure presets, and the parallel runner
//! producing plot-ready tables.
//!
//! Rows are emitted in grid order whatever the worker count, so identical
//! configs give identical files. A point that fails numerically keeps its row,
//! with empty value cells and the message in the `error` column.

pub mod config;
pub mod output;
pub mod presets;

use rayon::prelude::*;

use crate::analytic::{approx_w1, positive_work_bound};
use crate::correlations::{discord_differences_with, DiscordOptions};
use crate::error::{Error, Result};
use crate::rabi::{build_hamiltonian, RabiParams};
use crate::spectral::{self, converged_cutoff_with, relative_spectrum};
use crate::thermo::{report_for, solve_spectra, thermal_populations, CycleStates, CycleSpectra, ReservoirSpec};

pub use config::{
    parse_config, parse_config_with_env, Axis, CutoffSetting, OutputFormat, ProtocolTemplate, Series,
    SweepConfig, SweepMode, SweptParameter, VariantKind,
};
pub use output::{Cell, Dataset};
pub use presets::{figure_preset, preset_names};

/// Per-level work columns `W_0…` written for cycle sweeps.
const LEVEL_COLUMNS: usize = 4;

const DISCORD_COLUMNS: [&str; 12] = [
    "D_rho1", "D_rho3", "D_rho4", "D41", "D31", "D34", "theta_m_rho1", "phi_m_rho1", "theta_m_rho3",
    "phi_m_rho3", "theta_m_rho4", "phi_m_rho4",
];

fn parameter_columns(config: &SweepConfig) -> Vec<String> {
    let g = if config.mode == SweepMode::Cycle { "g_over_omega_c" } else { "g_over_omega" };
    let mut cols = vec![g.to_string(), "theta".to_string()];
    match config.template.variant {
        VariantKind::CoupledCoupling => cols.push("alpha".into()),
        VariantKind::QubitFrequency => cols.push("omega_qh".into()),
        VariantKind::ResonatorFrequency => {}
    }
    cols
}

fn body_columns(config: &SweepConfig) -> Vec<String> {
    match config.mode {
        SweepMode::Cycle => {
            let mut cols: Vec<String> = ["variant", "W", "Q_h", "Q_c", "eta", "regime"]
                .map(String::from)
                .to_vec();
            cols.extend((0..LEVEL_COLUMNS.min(config.n_levels)).map(|n| format!("W_{n}")));
            cols.extend(
                [
                    "E1_h",
                    "E1_c",
                    "kT_h",
                    "kT_c",
                    "P1_h",
                    "P1_c",
                    "first_law_residual",
                    "level_sum_residual",
                    "cutoff",
                    "max_residual",
                    "max_orthonormality_error",
                    "tail_mass",
                    "truncation_warning",
                ]
                .map(String::from),
            );
            if config.discord {
                cols.extend(DISCORD_COLUMNS.map(String::from));
            }
            cols
        }
        SweepMode::Spectrum => ["level_index", "energy_relative", "cutoff"].map(String::from).to_vec(),
        SweepMode::Approx => ["W1_numeric", "W1_approx", "bound"].map(String::from).to_vec(),
    }
}

/// Column names of the dataset `run_sweep` produces for `config`.
pub fn columns(config: &SweepConfig) -> Vec<String> {
    let mut cols = vec!["index".to_string()];
    cols.extend(parameter_columns(config));
    cols.extend(body_columns(config));
    cols.push("error".into());
    cols.push("config_hash".into());
    cols
}

fn parameter_cells(config: &SweepConfig, series_value: Option<f64>, x: f64) -> Vec<Cell> {
    let t = config.template_at(series_value, x);
    let mut cells = vec![Cell::Num(t.g_over_omega_c), Cell::Num(t.theta)];
    match t.variant {
        VariantKind::CoupledCoupling => cells.push(Cell::Num(t.alpha)),
        VariantKind::QubitFrequency => cells.push(Cell::Num(t.omega_qh)),
        VariantKind::ResonatorFrequency => {}
    }
    cells
}

fn cycle_cells(config: &SweepConfig, series_value: Option<f64>, x: f64) -> Result<Vec<Cell>> {
    let protocol = config.protocol_at(series_value, x)?;
    let spectra = solve_spectra(&protocol)?;
    let report = report_for(&spectra, &protocol)?;
    let res = protocol.reservoirs;
    let (kt_h, kt_c) = (res.kt_hot(), res.kt_cold());
    let p_h = thermal_populations(&spectra.hot.energies, kt_h)?;
    let p_c = thermal_populations(&spectra.cold.energies, kt_c)?;
    let e1 = |e: &[f64]| e[1] - e[0];
    let level_sum: f64 = report.work_per_level.iter().sum();
    let max_residual = spectra.hot.residual_norm.max(spectra.cold.residual_norm);
    let orthonormality = spectra
        .hot
        .orthonormality_error(protocol.n_levels)
        .max(spectra.cold.orthonormality_error(protocol.n_levels));

    let mut cells = vec![
        Cell::from(protocol.variant.name()),
        Cell::Num(report.work),
        Cell::Num(report.q_hot),
        Cell::Num(report.q_cold),
        Cell::from(report.efficiency),
        Cell::from(report.regime.name()),
    ];
    cells.extend(report.work_per_level.iter().take(LEVEL_COLUMNS).map(|&w| Cell::Num(w)));
    cells.extend([
        Cell::Num(e1(&spectra.hot.energies)),
        Cell::Num(e1(&spectra.cold.energies)),
        Cell::Num(kt_h),
        Cell::Num(kt_c),
        Cell::Num(p_h[1]),
        Cell::Num(p_c[1]),
        Cell::Num(report.work - (report.q_hot + report.q_cold)),
        Cell::Num(report.work - level_sum),
        Cell::from(spectra.cutoff.n_max()),
        Cell::Num(max_residual),
        Cell::Num(orthonormality),
        Cell::Num(report.tail_mass),
        Cell::from(report.truncation_warning),
    ]);
    if config.discord {
        cells.extend(discord_cells(config, spectra, &res)?);
    }
    Ok(cells)
}

fn discord_cells(config: &SweepConfig, spectra: CycleSpectra, res: &ReservoirSpec) -> Result<Vec<Cell>> {
    let states = CycleStates::build(spectra, res)?;
    let opts = DiscordOptions {
        grid_theta: config.discord_grid[0],
        grid_phi: config.discord_grid[1],
        ..DiscordOptions::default()
    };
    let d = discord_differences_with(&states, &opts)?;
    let mut cells: Vec<Cell> = [d.rho1.discord, d.rho3.discord, d.rho4.discord, d.diff_41, d.diff_31, d.diff_34]
        .map(Cell::Num)
        .to_vec();
    for r in [&d.rho1, &d.rho3, &d.rho4] {
        cells.push(Cell::Num(r.optimal_basis.theta_m));
        cells.push(Cell::Num(r.optimal_basis.phi_m));
    }
    Ok(cells)
}

fn cold_rabi(config: &SweepConfig, series_value: Option<f64>, x: f64) -> Result<RabiParams> {
    let t = config.template_at(series_value, x);
    RabiParams::resonant(t.omega_c, t.g_over_omega_c * t.omega_c, t.theta)
}

fn spectrum_cells(config: &SweepConfig, series_value: Option<f64>, x: f64) -> Result<Vec<Vec<Cell>>> {
    let params = cold_rabi(config, series_value, x)?;
    let cutoff = match config.cutoff {
        CutoffSetting::Fixed { n } => crate::hilbert::FockCutoff::new(n)?,
        CutoffSetting::Auto { tol, ceiling } => converged_cutoff_with(&params, config.n_levels, tol, ceiling)?.cutoff,
    };
    let d = spectral::eigendecompose(&build_hamiltonian(&params, cutoff)?)?;
    let rel = relative_spectrum(&d, config.n_levels)?;
    Ok(rel
        .into_iter()
        .enumerate()
        .map(|(k, e)| vec![Cell::from(k), Cell::Num(e), Cell::from(cutoff.n_max())])
        .collect())
}

fn approx_cells(config: &SweepConfig, x: f64) -> Result<Vec<Cell>> {
    let protocol = config.protocol_at(None, x)?;
    let spectra = solve_spectra(&protocol)?;
    let report = report_for(&spectra, &protocol)?;
    let res = protocol.reservoirs;
    let t = config.template_at(None, x);
    let ratio = protocol.frequency_ratio();
    let approx = approx_w1(t.omega_c, ratio, res.kt_cold(), res.kt_hot(), t.g_over_omega_c * t.omega_c);
    let bound = positive_work_bound(ratio, res.temperature_ratio()).ok();
    Ok(vec![Cell::Num(report.work_per_level[1]), Cell::Num(approx), Cell::from(bound)])
}

/// Value cells for one grid point (several rows in spectrum mode).
fn evaluate(config: &SweepConfig, series_value: Option<f64>, x: f64) -> Result<Vec<Vec<Cell>>> {
    match config.mode {
        SweepMode::Cycle => Ok(vec![cycle_cells(config, series_value, x)?]),
        SweepMode::Spectrum => spectrum_cells(config, series_value, x),
        SweepMode::Approx => Ok(vec![approx_cells(config, x)?]),
    }
}

fn build_pool(workers: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::InvalidParameter {
            name: "workers",
            reason: e.to_string(),
        })
}

/// Runs every grid point (in parallel on `config.workers` threads) and
/// assembles the rows in grid order.
pub fn run_sweep(config: &SweepConfig) -> Result<Dataset> {
    let pool = build_pool(config.workers)?;
    let hash = config.hash();
    let mut data = Dataset::new(columns(config));
    let n_body = body_columns(config).len();
    let points = config.points();

    let blocks: Vec<Vec<Vec<Cell>>> = pool.install(|| {
        points
            .par_iter()
            .enumerate()
            .map(|(index, &(series_value, x))| {
                let mut prefix = vec![Cell::from(index)];
                prefix.extend(parameter_cells(config, series_value, x));
                let (bodies, error) = match evaluate(config, series_value, x) {
                    Ok(b) => (b, String::new()),
                    Err(e) => (vec![vec![Cell::Empty; n_body]], e.to_string()),
                };
                bodies
                    .into_iter()
                    .map(|body| {
                        let mut row = prefix.clone();
                        row.extend(body);
                        row.push(Cell::Text(error.clone()));
                        row.push(Cell::Text(hash.clone()));
                        row
                    })
                    .collect()
            })
            .collect()
    });
    data.rows = blocks.into_iter().flatten().collect();
    Ok(data)
}

/// Single cycle at the template parameters: a one-row summary and the per-level table.
#[derive(Debug, Clone, PartialEq)]
pub struct CyclePoint {
    pub summary: Dataset,
    pub levels: Dataset,
}

pub fn single_cycle(config: &SweepConfig) -> Result<CyclePoint> {
    let t = config.template;
    let protocol = t
        .protocol(config.reservoirs()?)?
        .with_n_levels(config.n_levels)?
        .with_cutoff(config.cutoff.policy()?);
    let spectra = solve_spectra(&protocol)?;
    let report = report_for(&spectra, &protocol)?;
    let res = protocol.reservoirs;

    let mut summary = Dataset::new(
        ["g_over_omega_c", "theta", "variant", "W", "Q_h", "Q_c", "eta", "regime", "config_hash"]
            .map(String::from)
            .to_vec(),
    );
    summary.rows.push(vec![
        Cell::Num(t.g_over_omega_c),
        Cell::Num(t.theta),
        Cell::from(protocol.variant.name()),
        Cell::Num(report.work),
        Cell::Num(report.q_hot),
        Cell::Num(report.q_cold),
        Cell::from(report.efficiency),
        Cell::from(report.regime.name()),
        Cell::Text(config.hash()),
    ]);

    let p_h = thermal_populations(&spectra.hot.energies, res.kt_hot())?;
    let p_c = thermal_populations(&spectra.cold.energies, res.kt_cold())?;
    let mut levels = Dataset::new(["n", "E_n_h", "E_n_c", "P_n_h", "P_n_c", "W_n"].map(String::from).to_vec());
    let (eh, ec) = (spectra.hot.ground_referenced(), spectra.cold.ground_referenced());
    for (n, w) in report.work_per_level.iter().enumerate() {
        levels.rows.push(vec![
            Cell::from(n),
            Cell::Num(eh[n]),
            Cell::Num(ec[n]),
            Cell::Num(p_h[n]),
            Cell::Num(p_c[n]),
            Cell::Num(*w),
        ]);
    }
    Ok(CyclePoint { summary, levels })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quick(extra: &str) -> SweepConfig {
        parse_config(&format!("{extra}\n[cutoff]\nn = 30")).unwrap()
    }

    #[test]
    fn rows_follow_grid_and_columns_line_up() {
        let c = quick("[sweep]\nstop = 2.0\nn_points = 5");
        let d = run_sweep(&c).unwrap();
        assert_eq!(d.rows.len(), 5);
        assert!(d.rows.iter().all(|r| r.len() == d.columns.len()));
        let g = d.numbers("g_over_omega_c").unwrap();
        assert_eq!(g, vec![Some(0.0), Some(0.5), Some(1.0), Some(1.5), Some(2.0)]);
        assert_eq!(d.failed_rows(), 0);
        for name in ["W", "W_1", "W_2", "W_3", "Q_h", "Q_c", "eta"] {
            assert!(d.column_index(name).is_some(), "{name}");
        }
        assert_eq!(d.numbers("W_0").unwrap(), vec![Some(0.0); 5]);
    }

    #[test]
    fn identical_endpoints_give_identical_rows() {
        let c = quick("[sweep]\nstart = 1.2\nstop = 1.2\nn_points = 2");
        let d = run_sweep(&c).unwrap();
        assert_eq!(d.rows[0][1..], d.rows[1][1..]);
    }

    #[test]
    fn worker_count_does_not_change_output() {
        let mut c = quick("[sweep]\nstop = 3.0\nn_points = 7\n[series]\nparameter = \"theta\"\nvalues = [0.0, 0.4]");
        c.workers = 1;
        let a = run_sweep(&c).unwrap().to_csv();
        c.workers = 3;
        let b = run_sweep(&c).unwrap().to_csv();
        assert_eq!(a, b);
    }

    #[test]
    fn failures_stay_in_their_row() {
        // n_levels beyond 2 × cutoff cannot be summed
        let c = parse_config("n_levels = 30\n[cutoff]\nn = 10\n[sweep]\nn_points = 2").unwrap();
        let d = run_sweep(&c).unwrap();
        assert_eq!(d.rows.len(), 2);
        assert_eq!(d.failed_rows(), 2);
        let w = d.column_index("W").unwrap();
        assert_eq!(d.rows[0][w], Cell::Empty);
    }

    #[test]
    fn spectrum_mode_long_format() {
        let c = quick("mode = \"spectrum\"\nn_levels = 4\n[sweep]\nn_points = 3\nstop = 1.0");
        let d = run_sweep(&c).unwrap();
        assert_eq!(d.rows.len(), 12);
        let e = d.numbers("energy_relative").unwrap();
        assert_eq!(e[0], Some(0.0));
        // decoupled resonant model: 0, 1, 1, 2
        assert!((e[1].unwrap() - 1.0).abs() < 1e-12 && (e[3].unwrap() - 2.0).abs() < 1e-12);
        assert!(d.column_index("g_over_omega").is_some());
    }

    #[test]
    fn approx_mode_columns() {
        let d = run_sweep(&quick("mode = \"approx\"\n[sweep]\nn_points = 3")).unwrap();
        assert_eq!(d.failed_rows(), 0);
        let b = d.numbers("bound").unwrap();
        assert!((b[0].unwrap() - 1.00136).abs() < 1e-4);
    }

    #[test]
    fn single_cycle_tables() {
        let c = quick("g_over_omega_c = 0.5");
        let p = single_cycle(&c).unwrap();
        assert_eq!(p.summary.rows.len(), 1);
        assert_eq!(p.levels.rows.len(), 24);
        let w: f64 = p.levels.numbers("W_n").unwrap().iter().map(|x| x.unwrap()).sum();
        let total = p.summary.numbers("W").unwrap()[0].unwrap();
        assert!((w - total).abs() < 1e-12);
    }
}
