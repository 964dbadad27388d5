//! Nelder–Mead simplex minimization.

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NelderMeadOptions {
    pub max_iterations: usize,
    /// Stop when the spread of simplex values falls below this.
    pub f_tol: f64,
    /// Stop when every vertex lies within this distance of the best one.
    pub x_tol: f64,
}

impl Default for NelderMeadOptions {
    fn default() -> Self {
        Self {
            max_iterations: 500,
            f_tol: 1e-13,
            x_tol: 1e-9,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
    pub evaluations: usize,
    /// Best value after each iteration (nonincreasing).
    pub trace: Vec<f64>,
}

const REFLECT: f64 = 1.0;
const EXPAND: f64 = 2.0;
const CONTRACT: f64 = 0.5;
const SHRINK: f64 = 0.5;

/// Minimizes `f` from `start`, with the initial simplex stepping `steps[i]`
/// along axis `i`. The returned value never exceeds `f(start)`.
pub fn nelder_mead<F>(mut f: F, start: &[f64], steps: &[f64], opts: NelderMeadOptions) -> Minimum
where
    F: FnMut(&[f64]) -> f64,
{
    let dim = start.len();
    assert_eq!(steps.len(), dim, "one step per coordinate");
    let mut evaluations = 0;
    let mut eval = |x: &[f64]| {
        evaluations += 1;
        let v = f(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };

    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(dim + 1);
    simplex.push((start.to_vec(), eval(start)));
    for i in 0..dim {
        let mut x = start.to_vec();
        x[i] += steps[i];
        let v = eval(&x);
        simplex.push((x, v));
    }

    let mut trace = Vec::new();
    let mut iterations = 0;
    // stable sort keeps earlier vertices first on ties
    let order = |s: &mut Vec<(Vec<f64>, f64)>| s.sort_by(|a, b| a.1.total_cmp(&b.1));
    order(&mut simplex);

    while iterations < opts.max_iterations {
        let spread = simplex[dim].1 - simplex[0].1;
        let size = simplex[1..]
            .iter()
            .map(|(x, _)| {
                x.iter()
                    .zip(&simplex[0].0)
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0, f64::max)
            })
            .fold(0.0, f64::max);
        if spread <= opts.f_tol && size <= opts.x_tol {
            break;
        }
        iterations += 1;

        let centroid: Vec<f64> = (0..dim)
            .map(|k| simplex[..dim].iter().map(|(x, _)| x[k]).sum::<f64>() / dim as f64)
            .collect();
        let toward = |coef: f64, worst: &[f64]| -> Vec<f64> {
            centroid
                .iter()
                .zip(worst)
                .map(|(c, w)| c + coef * (c - w))
                .collect()
        };
        let worst = simplex[dim].0.clone();
        let f_worst = simplex[dim].1;
        let f_second = simplex[dim - 1].1;
        let f_best = simplex[0].1;

        let xr = toward(REFLECT, &worst);
        let fr = eval(&xr);
        if fr < f_best {
            let xe = toward(REFLECT * EXPAND, &worst);
            let fe = eval(&xe);
            simplex[dim] = if fe < fr { (xe, fe) } else { (xr, fr) };
        } else if fr < f_second {
            simplex[dim] = (xr, fr);
        } else {
            let (xc, fc) = if fr < f_worst {
                let xc = toward(REFLECT * CONTRACT, &worst);
                let fc = eval(&xc);
                (xc, fc)
            } else {
                let xc = toward(-CONTRACT, &worst);
                let fc = eval(&xc);
                (xc, fc)
            };
            if fc < f_worst.min(fr) {
                simplex[dim] = (xc, fc);
            } else {
                let best = simplex[0].0.clone();
                for vertex in simplex.iter_mut().skip(1) {
                    let x: Vec<f64> = best
                        .iter()
                        .zip(&vertex.0)
                        .map(|(b, v)| b + SHRINK * (v - b))
                        .collect();
                    let v = eval(&x);
                    *vertex = (x, v);
                }
            }
        }
        order(&mut simplex);
        trace.push(simplex[0].1);
    }

    let (x, value) = simplex.swap_remove(0);
    Minimum {
        x,
        value,
        iterations,
        evaluations,
        trace,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic_bowl() {
        let m = nelder_mead(
            |x| (x[0] - 1.5).powi(2) + 3.0 * (x[1] + 0.5).powi(2),
            &[0.0, 0.0],
            &[0.3, 0.3],
            NelderMeadOptions::default(),
        );
        assert!((m.x[0] - 1.5).abs() < 1e-6 && (m.x[1] + 0.5).abs() < 1e-6);
        assert!(m.value < 1e-12);
    }

    #[test]
    fn rosenbrock() {
        let m = nelder_mead(
            |x| (1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2),
            &[-1.2, 1.0],
            &[0.1, 0.1],
            NelderMeadOptions {
                max_iterations: 5000,
                ..Default::default()
            },
        );
        assert!((m.x[0] - 1.0).abs() < 1e-4 && (m.x[1] - 1.0).abs() < 1e-4);
    }

    #[test]
    fn never_worse_than_start_and_trace_monotone() {
        let f = |x: &[f64]| (3.0 * x[0]).sin() * (2.0 * x[1]).cos() + 0.1 * x[0];
        let start = [0.4, 0.9];
        let m = nelder_mead(f, &start, &[0.05, 0.05], NelderMeadOptions::default());
        assert!(m.value <= f(&start));
        assert!(m.trace.windows(2).all(|w| w[1] <= w[0]));
    }

    #[test]
    fn nan_is_treated_as_worst() {
        let m = nelder_mead(
            |x| if x[0] < 0.0 { f64::NAN } else { (x[0] - 0.2).powi(2) + x[1].powi(2) },
            &[0.5, 0.5],
            &[0.2, 0.2],
            NelderMeadOptions::default(),
        );
        assert!((m.x[0] - 0.2).abs() < 1e-6);
    }
}
