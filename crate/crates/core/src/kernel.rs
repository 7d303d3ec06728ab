//! The auxiliary kernels `psi`, `Phi` and the solution `g` of the defining
//! differential equations.
//!
//! For `gamma > 0` the series
//! `g(t) = 1 + 2 delta^2/(1 - xi) sum_{n>=1} (-1)^n (n+1-xi) t^n / ((n nu + delta)(n mu + delta))`
//! is the reference; the integral representations serve as an independent
//! check. For `gamma = 0` only the single-integral solution is used.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::params::ParameterSet;
use crate::quadrature::{integrate_with, QuadOptions, Singularity};
use crate::series::PowerSeries;
use crate::special::{pfq, sum_series, SeriesSum};

/// `psi_n = delta^2 / ((delta + n nu)(delta + n mu))`.
pub fn psi_coefficient(p: &ParameterSet, n: usize) -> f64 {
    let n = n as f64;
    let d = p.delta;
    d * d / ((d + n * p.nu) * (d + n * p.mu))
}

pub fn psi_series(p: &ParameterSet, order: usize) -> PowerSeries {
    PowerSeries::from_fn(order, |n| Complex64::new(psi_coefficient(p, n), 0.0))
}

/// `Phi = (z psi)'`, coefficients `(n+1) psi_n`.
pub fn phi_series(p: &ParameterSet, order: usize) -> PowerSeries {
    PowerSeries::from_fn(order, |n| {
        Complex64::new((n as f64 + 1.0) * psi_coefficient(p, n), 0.0)
    })
}

fn require_gamma_positive(p: &ParameterSet, what: &str) -> Result<()> {
    if p.gamma_is_zero() {
        Err(Error::PreconditionViolated(format!(
            "{what} needs gamma > 0 (mu, nu > 0)"
        )))
    } else {
        Ok(())
    }
}

fn require_xi(p: &ParameterSet) -> Result<()> {
    if p.xi < 1.0 {
        Ok(())
    } else {
        Err(Error::PreconditionViolated(format!(
            "xi = {} must be < 1",
            p.xi
        )))
    }
}

fn require_t(t: f64) -> Result<()> {
    if (0.0..=1.0).contains(&t) {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name: "t",
            value: t,
            reason: "must lie in [0, 1]",
        })
    }
}

/// `g(t)` from its alternating series; `gamma > 0`, `0 <= t <= 1`.
pub fn g_series_eval(p: &ParameterSet, t: f64, tol: f64) -> Result<SeriesSum> {
    require_gamma_positive(p, "the g series")?;
    require_xi(p)?;
    require_t(t)?;
    if t == 0.0 {
        return Ok(SeriesSum {
            value: 1.0,
            err: 0.0,
            terms: 1,
            accelerated: false,
        });
    }
    let scale = 2.0 / (1.0 - p.xi);
    let mut tn = 1.0;
    let mut next = 0;
    sum_series(
        |n| {
            while next < n {
                tn *= -t;
                next += 1;
            }
            if n == 0 {
                1.0
            } else {
                scale * tn * (n as f64 + 1.0 - p.xi) * psi_coefficient(p, n)
            }
        },
        tol,
    )
}

/// `g(t) = 2 4F3(1, 2-xi, delta/mu, delta/nu; 1-xi, 1+delta/mu, 1+delta/nu; -t) - 1`.
pub fn g_hypergeometric_eval(p: &ParameterSet, t: f64, tol: f64) -> Result<f64> {
    require_gamma_positive(p, "the 4F3 form of g")?;
    require_xi(p)?;
    require_t(t)?;
    let (dm, dn) = (p.delta / p.mu, p.delta / p.nu);
    let f = pfq(
        &crate::special::HypergeometricSpec::new(
            &[1.0, 2.0 - p.xi, dm, dn],
            &[1.0 - p.xi, 1.0 + dm, 1.0 + dn],
            -t,
        ),
        tol,
    )?;
    Ok(2.0 * f.value - 1.0)
}

/// `phi(w) = (1 - xi(1+w)) / ((1 - xi)(1+w)^2)`, the integrand of `(1+g)/2`.
fn phi_integrand(xi: f64, w: f64) -> f64 {
    let v = 1.0 + w;
    (1.0 - xi * v) / ((1.0 - xi) * v * v)
}

/// `g(t)` from the integral solution.
///
/// `gamma > 0`: `(1+g)/2 = int_0^1 int_0^1 phi(t r^{nu/delta} s^{mu/delta}) dr ds`.
/// `gamma = 0`: `(1+g)/2 = (delta/alpha) int_0^1 u^{delta/alpha - 1} phi(t u) du`.
pub fn g_integral_eval(p: &ParameterSet, t: f64, tol: f64) -> Result<f64> {
    require_xi(p)?;
    require_t(t)?;
    if t == 0.0 {
        return Ok(1.0);
    }
    let xi = p.xi;
    let half = if p.gamma_is_zero() {
        if !(p.alpha > 0.0) {
            return Err(Error::PreconditionViolated(
                "gamma = 0 needs alpha > 0".to_string(),
            ));
        }
        let e = p.delta / p.alpha;
        let opts = QuadOptions::tol(tol)
            .with_rel(tol)
            .with_singularity(Singularity::LeftPower);
        e * integrate_with(
            |u| u.powf(e - 1.0) * phi_integrand(xi, t * u),
            0.0,
            1.0,
            &opts,
        )?
        .value
    } else {
        let (a, b) = (p.nu / p.delta, p.mu / p.delta);
        let inner_opts = QuadOptions::tol(tol * 0.1)
            .with_rel(tol * 0.1)
            .with_singularity(Singularity::LeftPower);
        let outer_opts = QuadOptions::tol(tol)
            .with_rel(tol)
            .with_singularity(Singularity::LeftPower);
        let failure = std::cell::RefCell::new(None);
        let outer = integrate_with(
            |r| {
                let x = t * r.powf(a);
                match integrate_with(|s| phi_integrand(xi, x * s.powf(b)), 0.0, 1.0, &inner_opts) {
                    Ok(q) => q.value,
                    Err(e) => {
                        failure.borrow_mut().get_or_insert(e);
                        f64::NAN
                    }
                }
            },
            0.0,
            1.0,
            &outer_opts,
        );
        if let Some(e) = failure.into_inner() {
            return Err(e);
        }
        outer?.value
    };
    Ok(2.0 * half - 1.0)
}

/// `g(t)` by the preferred route: series for `gamma > 0`, integral for `gamma = 0`.
pub fn g_eval(p: &ParameterSet, t: f64, tol: f64) -> Result<f64> {
    if p.gamma_is_zero() {
        g_integral_eval(p, t, tol)
    } else {
        g_series_eval(p, t, tol).map(|s| s.value)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn kp(mu: f64, nu: f64, delta: f64, xi: f64) -> ParameterSet {
        ParameterSet::from_kernel(mu, nu, delta, xi).unwrap()
    }

    #[test]
    fn psi_examples() {
        let p = kp(1.0, 1.0, 1.0, 0.0);
        let s = psi_series(&p, 10);
        for n in 0..=10 {
            assert!((s.coeff(n).re - 1.0 / ((n + 1) * (n + 1)) as f64).abs() < 1e-15);
        }
        for q in [kp(2.0, 3.0, 1.5, 0.25), kp(0.3, 5.0, 2.0, 0.5)] {
            assert_eq!(psi_series(&q, 3).coeff(0).re, 1.0);
        }
        let big = psi_series(&p, 10_000);
        let at_one: f64 = big.coeffs().iter().map(|c| c.re).sum();
        let basel = std::f64::consts::PI.powi(2) / 6.0;
        assert!((at_one - basel).abs() < 1e-3);
    }

    #[test]
    fn phi_examples() {
        let p = kp(1.0, 1.0, 1.0, 0.0);
        let s = phi_series(&p, 8);
        for n in 0..=8 {
            assert!((s.coeff(n).re - 1.0 / (n + 1) as f64).abs() < 1e-15);
        }
        let q = kp(2.0, 3.0, 1.5, 0.25);
        let from_psi = psi_series(&q, 9).shift_up().derivative();
        let phi = phi_series(&q, 9);
        for n in 0..=9 {
            assert!((from_psi.coeff(n) - phi.coeff(n)).norm() < 1e-15);
        }
        assert_eq!(phi.eval(Complex64::new(0.0, 0.0)).re, 1.0);
    }

    #[test]
    fn g_series_examples() {
        let p = kp(1.0, 1.0, 1.0, 0.0);
        assert_eq!(g_series_eval(&p, 0.0, 1e-12).unwrap().value, 1.0);
        // mu = nu = delta = 1, xi = 0: g(1) = 1 + 2 sum (-1)^n/(n+1) = 2 ln 2 - 1
        let g1 = g_series_eval(&p, 1.0, 1e-13).unwrap();
        assert!(
            (g1.value - (2.0 * 2f64.ln() - 1.0)).abs() < 1e-12,
            "{}",
            g1.value
        );

        let q = kp(1.0, 1.0, 1.0, 0.25);
        let a = g_series_eval(&q, 0.6, 1e-14).unwrap().value;
        let b = g_hypergeometric_eval(&q, 0.6, 1e-14).unwrap();
        assert!((a - b).abs() < 1e-10);
    }

    #[test]
    fn g_series_needs_gamma_positive() {
        let p = ParameterSet::new(1.0, 0.0, 1.0, 0.0).unwrap();
        assert!(matches!(
            g_series_eval(&p, 0.5, 1e-12),
            Err(Error::PreconditionViolated(_))
        ));
    }

    #[test]
    fn g_integral_examples() {
        let p = ParameterSet::new(1.0, 0.0, 1.0, 0.0).unwrap();
        let g = g_integral_eval(&p, 0.5, 1e-12).unwrap();
        assert!((g - 1.0 / 3.0).abs() < 1e-11);
        assert!((g_integral_eval(&p, 1e-9, 1e-12).unwrap() - 1.0).abs() < 1e-6);
        assert_eq!(g_integral_eval(&p, 0.0, 1e-12).unwrap(), 1.0);

        let q = kp(1.0, 1.0, 1.0, 0.0);
        let a = g_integral_eval(&q, 0.5, 1e-11).unwrap();
        let b = g_series_eval(&q, 0.5, 1e-14).unwrap().value;
        assert!((a - b).abs() < 1e-8);
    }

    // gamma = 0 series, used only here as an oracle for the integral path
    fn g_gamma_zero_series(alpha: f64, delta: f64, xi: f64, t: f64) -> f64 {
        let mut s = 0.0;
        let mut tn = 1.0;
        for n in 1..20_000 {
            tn *= -t;
            s += tn * (n as f64 + 1.0 - xi) / (delta + n as f64 * alpha);
            if tn.abs() < 1e-18 {
                break;
            }
        }
        1.0 + 2.0 * delta / (1.0 - xi) * s
    }

    #[test]
    fn gamma_zero_integral_matches_oracle() {
        for (alpha, delta, zeta) in [
            (1.0, 1.0, 0.0),
            (2.0, 1.5, 0.5),
            (0.4, 1.2, 0.3),
            (3.0, 1.0, 0.25),
        ] {
            let p = ParameterSet::new(alpha, 0.0, delta, zeta).unwrap();
            for t in [0.1, 0.5, 0.9] {
                let a = g_integral_eval(&p, t, 1e-12).unwrap();
                let b = g_gamma_zero_series(alpha, delta, p.xi, t);
                assert!(
                    (a - b).abs() < 1e-9,
                    "({alpha},{delta},{zeta}) t={t}: {a} vs {b}"
                );
            }
        }
    }

    #[test]
    fn series_and_integral_agree() {
        for (mu, nu, delta, xi) in [
            (1.0, 1.0, 1.0, 0.0),
            (1.0, 1.0, 1.0, 0.5),
            (2.0, 3.0, 1.5, 0.25),
        ] {
            let p = kp(mu, nu, delta, xi);
            for t in [0.1, 0.25, 0.5, 0.75, 0.9] {
                let a = g_series_eval(&p, t, 1e-14).unwrap().value;
                let b = g_integral_eval(&p, t, 1e-11).unwrap();
                assert!(
                    (a - b).abs() < 1e-8,
                    "({mu},{nu},{delta},{xi}) t={t}: {a} vs {b}"
                );
            }
        }
    }

    #[test]
    fn g_decreasing() {
        for p in [
            kp(1.0, 1.0, 1.0, 0.0),
            kp(1.0, 1.0, 1.0, 0.5),
            kp(2.0, 3.0, 1.5, 0.25),
        ] {
            let vals: Vec<f64> = (0..=100)
                .map(|i| g_series_eval(&p, i as f64 / 100.0, 1e-14).unwrap().value)
                .collect();
            assert!(vals.windows(2).all(|w| w[1] < w[0]));
        }
    }

    proptest! {
        #[test]
        fn kernels_symmetric(mu in 0.1f64..5.0, nu in 0.1f64..5.0, delta in 1.0f64..3.0, t in 0.0f64..1.0) {
            let p = ParameterSet::from_kernel(mu, nu, delta, 0.2).unwrap();
            let q = p.swapped();
            prop_assert_eq!(psi_series(&p, 20), psi_series(&q, 20));
            prop_assert_eq!(phi_series(&p, 20), phi_series(&q, 20));
            let a = g_series_eval(&p, t, 1e-14).unwrap().value;
            let b = g_series_eval(&q, t, 1e-14).unwrap().value;
            prop_assert!((a - b).abs() < 1e-12);
        }

        #[test]
        fn series_matches_4f3(mu in 0.2f64..4.0, nu in 0.2f64..4.0, delta in 1.0f64..3.0, xi in 0.0f64..0.5, t in 0.0f64..1.0) {
            let p = ParameterSet::from_kernel(mu, nu, delta, xi);
            prop_assume!(p.is_ok());
            let p = p.unwrap();
            let a = g_series_eval(&p, t, 1e-14).unwrap().value;
            let b = g_hypergeometric_eval(&p, t, 1e-14).unwrap();
            prop_assert!((a - b).abs() < 1e-10, "{} vs {}", a, b);
        }
    }
}
