//! Scalar parameters of the problem.
//!
//! A run is dialled by `(alpha, gamma, delta, zeta)`. Everything downstream
//! works with the derived pair `(mu, nu)`, the roots of
//! `x^2 - (alpha - gamma) x + gamma = 0`, and the starlikeness order
//! `xi = 1 - delta + delta * zeta`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Discriminants in `(-DISCRIMINANT_SLACK, 0)` are treated as a double root.
pub const DISCRIMINANT_SLACK: f64 = 1e-12;

/// Roots of `x^2 - (alpha - gamma) x + gamma`, ordered `mu <= nu`.
pub fn derive_mu_nu(alpha: f64, gamma: f64) -> Result<(f64, f64)> {
    check_finite("alpha", alpha)?;
    check_finite("gamma", gamma)?;
    if alpha < 0.0 {
        return Err(Error::InvalidParameter {
            name: "alpha",
            value: alpha,
            reason: "must be >= 0",
        });
    }
    if gamma < 0.0 {
        return Err(Error::InvalidParameter {
            name: "gamma",
            value: gamma,
            reason: "must be >= 0",
        });
    }
    if gamma == 0.0 {
        return Ok((0.0, alpha));
    }

    let sum = alpha - gamma;
    let mut disc = sum * sum - 4.0 * gamma;
    if disc < 0.0 {
        if disc > -DISCRIMINANT_SLACK {
            disc = 0.0;
        } else {
            return Err(Error::ComplexRoots { discriminant: disc });
        }
    }
    // larger-magnitude root first, the other from the product to avoid cancellation
    let big = 0.5 * (sum + sum.signum() * disc.sqrt());
    let small = if big != 0.0 { gamma / big } else { 0.0 };
    let (lo, hi) = if small <= big {
        (small, big)
    } else {
        (big, small)
    };
    if lo < 0.0 {
        return Err(Error::NegativeRoot { lo, hi });
    }
    Ok((lo, hi))
}

/// `xi = 1 - delta + delta * zeta`.
pub fn derive_xi(delta: f64, zeta: f64) -> f64 {
    1.0 - delta + delta * zeta
}

fn check_finite(name: &'static str, value: f64) -> Result<()> {
    if value.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name,
            value,
            reason: "must be finite",
        })
    }
}

/// Conditions that do not invalidate a parameter set but fall outside the
/// range where the starlikeness theorems are stated.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "warning", rename_all = "snake_case")]
pub enum ParamWarning {
    /// `xi` outside `[0, 1/2]`.
    XiOutOfRange { xi: f64 },
    /// The theorems assume `delta >= 1`.
    DeltaBelowOne { delta: f64 },
    /// `zeta` outside `[1 - 1/delta, 1 - 1/(2 delta)]`.
    ZetaOutsideTheoremRange { zeta: f64, lo: f64, hi: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParameterSet {
    pub alpha: f64,
    pub gamma: f64,
    pub delta: f64,
    pub zeta: f64,
    pub mu: f64,
    pub nu: f64,
    pub xi: f64,
}

impl ParameterSet {
    pub fn new(alpha: f64, gamma: f64, delta: f64, zeta: f64) -> Result<Self> {
        check_finite("delta", delta)?;
        check_finite("zeta", zeta)?;
        if delta <= 0.0 {
            return Err(Error::InvalidParameter {
                name: "delta",
                value: delta,
                reason: "must be > 0",
            });
        }
        if !(0.0..1.0).contains(&zeta) {
            return Err(Error::InvalidParameter {
                name: "zeta",
                value: zeta,
                reason: "must lie in [0, 1)",
            });
        }
        let (mu, nu) = derive_mu_nu(alpha, gamma)?;
        Ok(Self {
            alpha,
            gamma,
            delta,
            zeta,
            mu,
            nu,
            xi: derive_xi(delta, zeta),
        })
    }

    /// Builds a parameter set from the kernel view `(mu, nu, delta, xi)`;
    /// `alpha`, `gamma` and `zeta` are reconstructed. `mu = 0` is the
    /// `gamma = 0` branch with `nu = alpha`.
    pub fn from_kernel(mu: f64, nu: f64, delta: f64, xi: f64) -> Result<Self> {
        for (name, v) in [("mu", mu), ("nu", nu), ("delta", delta), ("xi", xi)] {
            check_finite(name, v)?;
        }
        if mu < 0.0 || nu < 0.0 {
            return Err(Error::InvalidParameter {
                name: "mu",
                value: mu.min(nu),
                reason: "mu and nu must be >= 0",
            });
        }
        if delta <= 0.0 {
            return Err(Error::InvalidParameter {
                name: "delta",
                value: delta,
                reason: "must be > 0",
            });
        }
        let (mu, nu) = if mu <= nu { (mu, nu) } else { (nu, mu) };
        let gamma = mu * nu;
        let alpha = mu + nu + gamma;
        let zeta = (xi - 1.0 + delta) / delta;
        if !(0.0..1.0).contains(&zeta) {
            return Err(Error::InvalidParameter {
                name: "zeta",
                value: zeta,
                reason: "implied zeta must lie in [0, 1)",
            });
        }
        Ok(Self {
            alpha,
            gamma,
            delta,
            zeta,
            mu,
            nu,
            xi,
        })
    }

    /// True on the `gamma = 0` branch (`mu = 0`, `nu = alpha`).
    pub fn gamma_is_zero(&self) -> bool {
        self.gamma == 0.0 || self.mu == 0.0
    }

    pub fn delta_over_mu(&self) -> f64 {
        self.delta / self.mu
    }

    pub fn delta_over_nu(&self) -> f64 {
        self.delta / self.nu
    }

    /// Same parameters with the roots in the opposite order.
    pub fn swapped(&self) -> Self {
        Self {
            mu: self.nu,
            nu: self.mu,
            ..*self
        }
    }

    /// Exponent of `(1 - t)` in the monotonicity quotient, written
    /// as `3 - 2 delta (1 - zeta)`.
    pub fn decreasing_exponent(&self) -> f64 {
        3.0 - 2.0 * self.delta * (1.0 - self.zeta)
    }

    pub fn warnings(&self) -> Vec<ParamWarning> {
        let mut out = Vec::new();
        if !(0.0..=0.5).contains(&self.xi) {
            out.push(ParamWarning::XiOutOfRange { xi: self.xi });
        }
        if self.delta < 1.0 {
            out.push(ParamWarning::DeltaBelowOne { delta: self.delta });
        }
        let lo = 1.0 - 1.0 / self.delta;
        let hi = 1.0 - 0.5 / self.delta;
        if self.zeta < lo - 1e-15 || self.zeta > hi + 1e-15 {
            out.push(ParamWarning::ZetaOutsideTheoremRange {
                zeta: self.zeta,
                lo,
                hi,
            });
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn worked_example_double_root() {
        assert_eq!(derive_mu_nu(3.0, 1.0).unwrap(), (1.0, 1.0));
    }

    #[test]
    fn gamma_zero_branch() {
        assert_eq!(derive_mu_nu(2.5, 0.0).unwrap(), (0.0, 2.5));
        let p = ParameterSet::new(1.0, 0.0, 1.0, 0.0).unwrap();
        assert!(p.gamma_is_zero());
        assert_eq!(p.nu, 1.0);
    }

    #[test]
    fn complex_roots_rejected() {
        for (a, g) in [(5.0, 4.0), (6.0, 4.0), (6.0, 5.0), (10.0, 9.0)] {
            assert!(matches!(
                derive_mu_nu(a, g),
                Err(Error::ComplexRoots { .. })
            ));
        }
    }

    #[test]
    fn distinct_roots() {
        let (mu, nu) = derive_mu_nu(10.0, 5.0).unwrap();
        let s5 = 5f64.sqrt();
        assert!((mu - (5.0 - s5) / 2.0).abs() < 1e-14);
        assert!((nu - (5.0 + s5) / 2.0).abs() < 1e-14);
        assert!((mu - 1.381966).abs() < 1e-6 && (nu - 3.618034).abs() < 1e-6);
    }

    #[test]
    fn negative_roots_rejected() {
        // x^2 + 9x + 10: both roots negative
        assert!(matches!(
            derive_mu_nu(1.0, 10.0),
            Err(Error::NegativeRoot { .. })
        ));
    }

    #[test]
    fn near_zero_discriminant_is_double_root() {
        // (alpha - gamma)^2 - 4 gamma = 0 at alpha = gamma + 2 sqrt(gamma)
        let gamma: f64 = 2.0;
        let alpha = gamma + 2.0 * gamma.sqrt();
        let (mu, nu) = derive_mu_nu(alpha, gamma).unwrap();
        assert!((mu - nu).abs() < 1e-5);
        assert!((mu * nu - gamma).abs() < 1e-10);
    }

    #[test]
    fn xi_examples() {
        assert_eq!(derive_xi(1.0, 0.0), 0.0);
        assert_eq!(derive_xi(2.0, 0.75), 0.5);
        assert_eq!(derive_xi(1.0, 0.25), 0.25);
    }

    #[test]
    fn exponent_identity_example() {
        let p = ParameterSet::new(3.0, 1.0, 2.0, 0.75).unwrap();
        assert_eq!(p.decreasing_exponent(), 2.0);
        assert_eq!(1.0 + 2.0 * p.xi, 2.0);
    }

    #[test]
    fn from_kernel_roundtrip() {
        let p = ParameterSet::from_kernel(2.0, 3.0, 1.5, 0.25).unwrap();
        assert_eq!((p.alpha, p.gamma), (11.0, 6.0));
        assert!((p.zeta - 0.5).abs() < 1e-15);
        let q = ParameterSet::new(p.alpha, p.gamma, p.delta, p.zeta).unwrap();
        assert!((q.mu - 2.0).abs() < 1e-12 && (q.nu - 3.0).abs() < 1e-12);
        assert!((q.xi - 0.25).abs() < 1e-15);
    }

    #[test]
    fn warnings_flag_theorem_range() {
        let ok = ParameterSet::new(3.0, 1.0, 1.0, 0.25).unwrap();
        assert!(ok.warnings().is_empty());
        let off = ParameterSet::new(3.0, 1.0, 0.5, 0.5).unwrap();
        let w = off.warnings();
        assert!(w
            .iter()
            .any(|w| matches!(w, ParamWarning::DeltaBelowOne { .. })));
        assert!(w
            .iter()
            .any(|w| matches!(w, ParamWarning::XiOutOfRange { .. })));
    }

    #[test]
    fn rejects_bad_scalars() {
        assert!(ParameterSet::new(1.0, 0.0, 0.0, 0.0).is_err());
        assert!(ParameterSet::new(1.0, 0.0, 1.0, 1.0).is_err());
        assert!(ParameterSet::new(-1.0, 0.0, 1.0, 0.0).is_err());
        assert!(ParameterSet::new(f64::NAN, 0.0, 1.0, 0.0).is_err());
    }

    proptest! {
        #[test]
        fn vieta_relations_hold(mu in 0.0f64..20.0, nu in 0.0f64..20.0) {
            let gamma = mu * nu;
            let alpha = mu + nu + gamma;
            let (m, n) = derive_mu_nu(alpha, gamma).unwrap();
            prop_assert!(m <= n);
            prop_assert!(m >= 0.0);
            prop_assert!((m * n - gamma).abs() <= 1e-12 * gamma.max(1.0) * 10.0);
            prop_assert!((m + n - (alpha - gamma)).abs() <= 1e-12 * alpha.max(1.0));
        }

        #[test]
        fn exponent_identity(delta in 1.0f64..10.0, frac in 0.0f64..1.0) {
            let zeta = (1.0 - 1.0 / delta) + frac * 0.5 / delta;
            prop_assume!(zeta < 1.0);
            let p = ParameterSet::new(3.0, 1.0, delta, zeta).unwrap();
            prop_assert!((p.decreasing_exponent() - (1.0 + 2.0 * p.xi)).abs() < 1e-14 * delta.max(1.0));
            prop_assert!(p.xi >= -1e-15 && p.xi <= 0.5 + 1e-15);
        }
    }
}
