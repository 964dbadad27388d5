//! Checks against independent references: characteristic-polynomial roots,
//! closed-form discord of Werner states, brute-force measurement grids, and the
//! deep-coupling approximation.

use std::f64::consts::PI;

use otto_core::analytic::{positive_work_bound, ApproxEnergies};
use otto_core::correlations::{conditional_entropy, quantum_discord, MeasurementBasis};
use otto_core::hilbert::{FockCutoff, Layout, OperatorMatrix, C64};
use otto_core::rabi::{build_hamiltonian, RabiParams};
use otto_core::spectral::{converged_cutoff, eigendecompose};
use otto_core::thermo::{run_cycle, CutoffPolicy, CycleProtocol, ReservoirSpec, Stage, DEFAULT_OMEGA_REF, DEFAULT_T_COLD};

fn cut(n: usize) -> FockCutoff {
    FockCutoff::new(n).unwrap()
}

/// det(A − λI) by Gaussian elimination with partial pivoting.
fn char_poly(a: &[Vec<f64>], lambda: f64) -> f64 {
    let n = a.len();
    let mut m: Vec<Vec<f64>> = a.to_vec();
    for (i, row) in m.iter_mut().enumerate() {
        row[i] -= lambda;
    }
    let mut det = 1.0;
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| m[i][col].abs().total_cmp(&m[j][col].abs())).unwrap();
        if m[piv][col] == 0.0 {
            return 0.0;
        }
        if piv != col {
            m.swap(piv, col);
            det = -det;
        }
        det *= m[col][col];
        for r in col + 1..n {
            let f = m[r][col] / m[col][col];
            for c in col..n {
                m[r][c] -= f * m[col][c];
            }
        }
    }
    det
}

fn roots_by_bisection(a: &[Vec<f64>], lo: f64, hi: f64, step: f64) -> Vec<f64> {
    let mut roots = Vec::new();
    let mut x = lo;
    let mut fx = char_poly(a, x);
    while x < hi {
        let y = x + step;
        let fy = char_poly(a, y);
        if fx * fy < 0.0 {
            let (mut l, mut r, mut fl) = (x, y, fx);
            for _ in 0..200 {
                let m = 0.5 * (l + r);
                let fm = char_poly(a, m);
                if fm * fl <= 0.0 {
                    r = m;
                } else {
                    l = m;
                    fl = fm;
                }
            }
            roots.push(0.5 * (l + r));
        }
        x = y;
        fx = fy;
    }
    roots
}

#[test]
fn eigenvalues_match_characteristic_polynomial() {
    for (g, theta) in [(0.7, 0.0), (1.3, 0.4)] {
        let p = RabiParams::new(1.0, 0.8, g, theta).unwrap();
        let h = build_hamiltonian(&p, cut(4)).unwrap();
        assert!(h.is_real());
        let n = h.dim();
        let a: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| h[(i, j)].re).collect()).collect();
        let bound: f64 = (0..n).map(|i| a[i].iter().map(|x| x.abs()).sum::<f64>()).fold(0.0, f64::max);
        let roots = roots_by_bisection(&a, -bound - 1.0, bound + 1.0, 1e-3);
        let d = eigendecompose(&h).unwrap();
        assert_eq!(roots.len(), n, "roots {roots:?}");
        for (r, e) in roots.iter().zip(&d.energies) {
            assert!((r - e).abs() < 1e-10, "root {r} vs eigenvalue {e}");
        }
    }
}

#[test]
fn decoupled_spectrum_is_ladder() {
    let (w, wq) = (1.0, 0.37);
    let d = eigendecompose(&build_hamiltonian(&RabiParams::new(w, wq, 0.0, 0.0).unwrap(), cut(12)).unwrap()).unwrap();
    let mut expected: Vec<f64> = (0..12).flat_map(|n| [n as f64 * w - wq / 2.0, n as f64 * w + wq / 2.0]).collect();
    expected.sort_by(f64::total_cmp);
    for (e, x) in d.energies.iter().zip(&expected) {
        assert!((e - x).abs() < 1e-12);
    }
}

fn werner(p: f64) -> OperatorMatrix {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let z = C64::new(0.0, 0.0);
    let bell = OperatorMatrix::outer(&[C64::new(s, 0.0), z, z, C64::new(s, 0.0)]);
    (&bell.scale_real(p) + &OperatorMatrix::identity(4).scale_real((1.0 - p) / 4.0))
        .with_layout(Layout::Bipartite { qubit: 2, mode: 2 })
        .unwrap()
}

/// Closed-form discord of the two-qubit Werner state.
fn werner_discord(p: f64) -> f64 {
    let xlnx = |x: f64| if x > 0.0 { x * x.ln() } else { 0.0 };
    0.25 * xlnx(1.0 - p) - 0.5 * xlnx(1.0 + p) + 0.25 * xlnx(1.0 + 3.0 * p)
}

#[test]
fn werner_state_discord_closed_form() {
    for p in [0.0, 0.1, 0.35, 0.6, 0.9, 1.0] {
        let d = quantum_discord(&werner(p)).unwrap();
        assert!((d.discord - werner_discord(p)).abs() < 1e-9, "p = {p}: {} vs {}", d.discord, werner_discord(p));
    }
}

#[test]
fn optimizer_beats_dense_grid() {
    let res = ReservoirSpec::new(0.3, 1.2, DEFAULT_OMEGA_REF).unwrap();
    let p = CycleProtocol::resonator_frequency(1.0, 2.0, 0.8, 0.9, res)
        .unwrap()
        .with_n_levels(6)
        .unwrap()
        .with_cutoff(CutoffPolicy::Fixed(cut(3)));
    let (states, _) = run_cycle(&p).unwrap();
    for stage in [Stage::One, Stage::Four] {
        let rho = states.rho(stage);
        let opt = quantum_discord(rho).unwrap();
        let (nt, np) = (721, 1441);
        let mut best = f64::INFINITY;
        for i in 0..nt {
            for j in 0..np {
                let b = MeasurementBasis::new(PI * i as f64 / (nt - 1) as f64, 2.0 * PI * j as f64 / (np - 1) as f64);
                best = best.min(conditional_entropy(rho, &b).unwrap());
            }
        }
        assert!(opt.conditional_entropy_min <= best + 1e-12, "{stage:?}: {} vs {best}", opt.conditional_entropy_min);
        // and the reported basis reproduces the reported value on the full route
        let again = conditional_entropy(rho, &opt.optimal_basis).unwrap();
        assert!((again - opt.conditional_entropy_min).abs() < 1e-10);
    }
}

#[test]
fn approximate_gap_in_deep_coupling() {
    for g in [1.5, 2.0, 2.5, 3.0] {
        let p = RabiParams::resonant(1.0, g, 0.0).unwrap();
        let c = converged_cutoff(&p, 4, 1e-12).unwrap();
        let d = eigendecompose(&build_hamiltonian(&p, c).unwrap()).unwrap();
        let exact = d.energies[1] - d.energies[0];
        let approx = ApproxEnergies::new(1.0, 1.0, g).gap();
        assert!((approx - exact).abs() <= 0.15 * exact, "g = {g}: approx {approx:e}, exact {exact:e}");
    }
}

#[test]
fn numeric_first_level_work_flips_near_bound() {
    let res = ReservoirSpec::new(DEFAULT_T_COLD, 9.0 * DEFAULT_T_COLD, DEFAULT_OMEGA_REF).unwrap();
    let w1 = |g: f64| {
        let p = CycleProtocol::resonator_frequency(1.0, 2.0, g, 0.0, res)
            .unwrap()
            .with_cutoff(CutoffPolicy::Fixed(cut(60)));
        run_cycle(&p).unwrap().1.work_per_level[1]
    };
    let (mut lo, mut hi) = (0.5, 1.8);
    assert!(w1(lo) > 0.0 && w1(hi) < 0.0);
    while hi - lo > 1e-4 {
        let m = 0.5 * (lo + hi);
        if w1(m) > 0.0 {
            lo = m;
        } else {
            hi = m;
        }
    }
    let bound = positive_work_bound(2.0, 9.0).unwrap();
    assert!((lo - bound).abs() <= 0.3, "flip at {lo}, bound {bound}");
}
