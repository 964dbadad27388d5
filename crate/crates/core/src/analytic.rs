//! Closed-form approximations for the deep-coupling Rabi model: displaced
//! oscillator levels, the two-level estimate of `W₁`, and the critical
//! coupling below which that estimate is positive.

use crate::error::{Error, Result};

/// Laguerre polynomial `L_n(x)` by the three-term recurrence
/// `(k+1) L_{k+1} = (2k + 1 − x) L_k − k L_{k−1}`.
pub fn laguerre(n: i64, x: f64) -> Result<f64> {
    if n < 0 {
        return Err(Error::InvalidParameter {
            name: "n",
            reason: format!("Laguerre order must be nonnegative, got {n}"),
        });
    }
    let (mut prev, mut cur) = (1.0, 1.0 - x);
    if n == 0 {
        return Ok(prev);
    }
    for k in 1..n {
        let k = k as f64;
        let next = ((2.0 * k + 1.0 - x) * cur - k * prev) / (k + 1.0);
        prev = cur;
        cur = next;
    }
    Ok(cur)
}

/// Branch energies `(E₊,ₙ, E₋,ₙ)` of the displaced-oscillator approximation,
///
/// `E±,n = −ωn − g²/ω ∓ (Ω/2) e^{−2g²/ω²} L_n(4g²/ω²)`.
///
/// The `−ωn` term is kept exactly as in the original derivation; it makes the
/// ladder unbounded below for `n > 0`, so only `n = 0` (`E₊,₀ = E_G`,
/// `E₋,₀ = E_1`) is physically meaningful and is the only order used elsewhere
/// in this crate.
pub fn approx_levels(omega: f64, big_omega: f64, g: f64, n: u32) -> (f64, f64) {
    let y = g / omega;
    let damping = (-2.0 * y * y).exp();
    let lag = laguerre(i64::from(n), 4.0 * y * y).expect("n is nonnegative");
    let base = -omega * f64::from(n) - g * g / omega;
    let split = 0.5 * big_omega * damping * lag;
    (base - split, base + split)
}

/// Ground and first excited energies of the approximation, plus the
/// effective half-gap `b = (Ω/2) e^{−2g²/ω²}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ApproxEnergies {
    pub ground: f64,
    pub first: f64,
    pub b: f64,
}

impl ApproxEnergies {
    pub fn new(omega: f64, big_omega: f64, g: f64) -> Self {
        let (ground, first) = approx_levels(omega, big_omega, g, 0);
        let y = g / omega;
        Self {
            ground,
            first,
            b: 0.5 * big_omega * (-2.0 * y * y).exp(),
        }
    }

    pub fn gap(&self) -> f64 {
        self.first - self.ground
    }
}

/// Two-level estimate `W = (b_h − b_c)(tanh(b_c/k_BT_c) − tanh(b_h/k_BT_h))` with
/// `b_h = (Rω/2) e^{−2g²/(Rω)²}` and `b_c = (ω/2) e^{−2g²/ω²}`. Thermal
/// energies are in the same units as `omega_c`.
pub fn approx_w1(omega_c: f64, ratio: f64, kt_cold: f64, kt_hot: f64, g: f64) -> f64 {
    let b_hot = ApproxEnergies::new(ratio * omega_c, ratio * omega_c, g).b;
    let b_cold = ApproxEnergies::new(omega_c, omega_c, g).b;
    (b_hot - b_cold) * ((b_cold / kt_cold).tanh() - (b_hot / kt_hot).tanh())
}

/// Critical `g/ω` below which [`approx_w1`] is positive:
/// `√( R² ln((T_h/T_c)/R) / (2 (R² − 1)) )`.
pub fn positive_work_bound(ratio: f64, temp_ratio: f64) -> Result<f64> {
    if !(ratio > 1.0) || !(temp_ratio > ratio) || !temp_ratio.is_finite() {
        return Err(Error::NoPositiveWorkRegion {
            ratio_freq: ratio,
            ratio_temp: temp_ratio,
        });
    }
    let r2 = ratio * ratio;
    Ok((0.5 * r2 / (r2 - 1.0) * (temp_ratio / ratio).ln()).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn explicit(n: usize, x: f64) -> f64 {
        match n {
            0 => 1.0,
            1 => 1.0 - x,
            2 => 1.0 - 2.0 * x + x * x / 2.0,
            3 => 1.0 - 3.0 * x + 1.5 * x * x - x.powi(3) / 6.0,
            4 => 1.0 - 4.0 * x + 3.0 * x * x - 2.0 * x.powi(3) / 3.0 + x.powi(4) / 24.0,
            _ => unreachable!(),
        }
    }

    #[test]
    fn laguerre_values() {
        assert_eq!(laguerre(0, 3.7).unwrap(), 1.0);
        assert_eq!(laguerre(1, 4.0).unwrap(), -3.0);
        assert!((laguerre(2, 2.0).unwrap() + 1.0).abs() < 1e-15);
        assert!(laguerre(-1, 1.0).is_err());
    }

    #[test]
    fn laguerre_matches_explicit_forms() {
        for n in 0..=4 {
            for i in 0..=200 {
                let x = 0.1 * i as f64;
                let got = laguerre(n as i64, x).unwrap();
                let want = explicit(n, x);
                assert!((got - want).abs() <= 1e-10 * want.abs().max(1.0), "n={n} x={x}");
            }
        }
    }

    #[test]
    fn levels_decoupled() {
        let (ep, em) = approx_levels(1.0, 1.0, 0.0, 0);
        assert_eq!((ep, em), (-0.5, 0.5));
    }

    #[test]
    fn gap_shrinks_with_coupling() {
        let gap = |g| ApproxEnergies::new(1.0, 1.0, g).gap();
        assert!((gap(1.0) - (-2f64).exp()).abs() < 1e-15);
        assert!((gap(1.0) - 0.1353).abs() < 1e-4);
        assert!(gap(2.0) < gap(1.0) && gap(3.0) < 1e-7);
        let e = ApproxEnergies::new(1.0, 0.8, 0.7);
        assert!((e.gap() - 2.0 * e.b).abs() < 1e-15 && e.first >= e.ground);
    }

    #[test]
    fn w1_vanishes_at_large_coupling() {
        assert!(approx_w1(1.0, 2.0, 0.04, 0.36, 30.0).abs() < 1e-300);
    }

    #[test]
    fn w1_zero_when_tanh_arguments_match() {
        let (r, g) = (2.0, 0.6);
        let b_h = ApproxEnergies::new(r, r, g).b;
        let b_c = ApproxEnergies::new(1.0, 1.0, g).b;
        let kt_c = 0.05;
        let kt_h = kt_c * b_h / b_c;
        assert!(approx_w1(1.0, r, kt_c, kt_h, g).abs() < 1e-15);
    }

    #[test]
    fn bound_closed_form() {
        let b = positive_work_bound(2.0, 9.0).unwrap();
        assert!((b - ((2.0 / 3.0) * 4.5f64.ln()).sqrt()).abs() < 1e-15);
        assert!((b - 1.00136).abs() < 1e-4);
        assert!(positive_work_bound(2.0, 2.0 + 1e-12).unwrap() < 1e-5);
        assert!(positive_work_bound(2.0, 1.5).is_err());
        assert!(positive_work_bound(1.0, 9.0).is_err());
    }

    #[test]
    fn sign_of_w1_follows_bound() {
        let (r, kt_c) = (2.0, 0.05);
        let bound = positive_work_bound(r, 9.0).unwrap();
        for i in 0..=700 {
            let y = 0.005 * i as f64;
            if (y - bound).abs() < 1e-9 {
                continue;
            }
            let w = approx_w1(1.0, r, kt_c, 9.0 * kt_c, y);
            assert_eq!(w > 0.0, y < bound, "g/omega = {y}, W = {w}");
        }
    }
}
