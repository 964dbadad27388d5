//! Configurations for the reference figures. Each preset is a config document,
//! so `rabi-otto preset <name>` and `rabi-otto sweep --config` agree exactly.

use crate::error::{Error, Result};

use super::config::{parse_config, SweepConfig};

const FIG2: &str = r#"
# total work and per-level work W_0..W_3 versus g/omega_c
[sweep]
parameter = "g_over_omega_c"
start = 0.0
stop = 3.5
n_points = 100
"#;

const FIG3: &str = r#"
# first excited energies E1_h, E1_c, thermal energies kT_h, kT_c and populations P1_h, P1_c
[sweep]
parameter = "g_over_omega_c"
start = 0.0
stop = 3.5
n_points = 100
"#;

const FIG4: &str = r#"
# discord differences D41 = D(rho4) - D(rho1) and D31 = D(rho3) - D(rho1) per mixing angle
discord = true

[sweep]
parameter = "g_over_omega_c"
start = 0.0
stop = 3.5
n_points = 71

[series]
parameter = "theta"
values = [0.0, 0.2617993877991494, 0.5235987755982988, 0.7853981633974483]
"#;

const FIG5: &str = r#"
# total work per mixing angle
[sweep]
parameter = "g_over_omega_c"
start = 0.0
stop = 3.5
n_points = 71

[series]
parameter = "theta"
values = [0.0, 0.2617993877991494, 0.5235987755982988, 0.7853981633974483]
"#;

const FIG6: &str = r#"
# efficiency eta and compression-stroke discord change D34 per coupling rescaling alpha
variant = "coupled-coupling"
discord = true

[sweep]
parameter = "g_over_omega_c"
start = 0.0
stop = 2.0
n_points = 50

[series]
parameter = "alpha"
values = [0.5, 1.0, 1.5]
"#;

const FIG7: &str = r#"
# work of the qubit-frequency protocol per hot qubit frequency
variant = "qubit-frequency"
omega_qc = 0.5
t_hot_ratio = 4.0

[sweep]
parameter = "g_over_omega_c"
start = 0.0
stop = 3.0
n_points = 100

[series]
parameter = "omega_qh"
values = [1.0, 1.5, 2.0]
"#;

const FIG8: &str = r#"
# hot-isochore discord change D41 for the qubit-frequency protocol
variant = "qubit-frequency"
omega_qc = 0.5
t_hot_ratio = 4.0
discord = true

[sweep]
parameter = "g_over_omega_c"
start = 0.0
stop = 3.0
n_points = 61

[series]
parameter = "omega_qh"
values = [1.0, 1.5, 2.0]
"#;

const FIG9: &str = r#"
# lowest 10 levels of the resonant Rabi model relative to the ground state
mode = "spectrum"
n_levels = 10

[sweep]
parameter = "g_over_omega_c"
start = 0.0
stop = 3.5
n_points = 100
"#;

const FIG10: &str = r#"
# numeric W_1 against the two-level approximation and the positive-work bound
mode = "approx"

[sweep]
parameter = "g_over_omega_c"
start = 0.0
stop = 3.5
n_points = 100
"#;

const PRESETS: [(&str, &str); 9] = [
    ("fig2", FIG2),
    ("fig3", FIG3),
    ("fig4", FIG4),
    ("fig5", FIG5),
    ("fig6", FIG6),
    ("fig7", FIG7),
    ("fig8", FIG8),
    ("fig9", FIG9),
    ("fig10", FIG10),
];

pub fn preset_names() -> impl Iterator<Item = &'static str> {
    PRESETS.iter().map(|(n, _)| *n)
}

/// The config document behind a preset.
pub fn preset_document(name: &str) -> Result<&'static str> {
    PRESETS
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, doc)| *doc)
        .ok_or_else(|| Error::UnknownPreset(name.to_string()))
}

pub fn figure_preset(name: &str) -> Result<SweepConfig> {
    parse_config(preset_document(name)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sweep::config::{SweepMode, SweptParameter, VariantKind};

    #[test]
    fn all_presets_parse() {
        for name in preset_names() {
            figure_preset(name).unwrap_or_else(|e| panic!("{name}: {e}"));
        }
        assert!(matches!(figure_preset("fig11"), Err(Error::UnknownPreset(_))));
    }

    #[test]
    fn fig2_matches_defaults() {
        let c = figure_preset("fig2").unwrap();
        assert_eq!(c, parse_config("").unwrap());
        assert_eq!(c.template.theta, 0.0);
        assert_eq!(c.template.omega_h / c.template.omega_c, 2.0);
        assert!((c.t_hot / c.t_cold - 9.0).abs() < 1e-12);
        assert_eq!((c.sweep.start, c.sweep.stop), (0.0, 3.5));
    }

    #[test]
    fn fig7_is_qubit_protocol() {
        let c = figure_preset("fig7").unwrap();
        assert_eq!(c.template.variant, VariantKind::QubitFrequency);
        assert_eq!(c.template.omega_qc, 0.5);
        assert!((c.t_hot / c.t_cold - 4.0).abs() < 1e-12);
        assert_eq!(c.series.unwrap().parameter, SweptParameter::OmegaQh);
    }

    #[test]
    fn fig9_is_spectrum() {
        let c = figure_preset("fig9").unwrap();
        assert_eq!((c.mode, c.n_levels), (SweepMode::Spectrum, 10));
    }
}
