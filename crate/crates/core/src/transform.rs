//! The transform on coefficient level: members of the source class as
//! series of `(f/z)^delta`, the moment multiplication giving
//! `(F_delta/z)^delta`, and the recovery of `F_delta` and `G`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernel::psi_coefficient;
use crate::params::ParameterSet;
use crate::series::{series_pow, PowerSeries};
use crate::weight::Weight;

/// Truncation order for sharpness probes near `z = -1`.
pub const SHARPNESS_ORDER: usize = 512;

const UNIT_TOL: f64 = 1e-12;

/// Test function `beta + (1 - beta)(1 + x z)/(1 + y z)` with `|x| = |y| = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TestFunctionSpec {
    pub x: Complex64,
    pub y: Complex64,
    pub beta: f64,
    pub params: ParameterSet,
}

impl TestFunctionSpec {
    pub fn new(x: Complex64, y: Complex64, beta: f64, params: ParameterSet) -> Result<Self> {
        for (name, v) in [("x", x), ("y", y)] {
            if (v.norm() - 1.0).abs() > UNIT_TOL {
                return Err(Error::InvalidParameter {
                    name,
                    value: v.norm(),
                    reason: "must lie on the unit circle",
                });
            }
        }
        if !(beta < 1.0) {
            return Err(Error::InvalidParameter {
                name: "beta",
                value: beta,
                reason: "must be < 1",
            });
        }
        Ok(Self { x, y, beta, params })
    }

    /// `x = 1, y = -1`: the half-plane map `(1 + z)/(1 - z)`.
    pub fn extremal(beta: f64, params: ParameterSet) -> Result<Self> {
        Self::new(
            Complex64::new(1.0, 0.0),
            Complex64::new(-1.0, 0.0),
            beta,
            params,
        )
    }

    // coefficients of (1 - beta)(1 + x z)/(1 + y z) beyond the constant
    fn mobius(&self, n: usize) -> Complex64 {
        (1.0 - self.beta) * (self.x - self.y) * (-self.y).powu(n as u32 - 1)
    }
}

/// Series of `(f/z)^delta` for a member of the source class.
///
/// For `gamma > 0` this is the Hadamard product of the test function with
/// `psi`. For `gamma = 0` the defining expression reduces to
/// `P + (alpha/delta) z P'` with `P = (f/z)^delta`, a first-order equation
/// solved coefficientwise: `p_n = delta/(delta + n alpha) h_n`.
pub fn make_member(spec: &TestFunctionSpec, order: usize) -> PowerSeries {
    let p = &spec.params;
    if p.gamma_is_zero() {
        PowerSeries::from_fn(order, |n| {
            if n == 0 {
                Complex64::new(1.0, 0.0)
            } else {
                spec.mobius(n) * (p.delta / (p.delta + n as f64 * p.alpha))
            }
        })
    } else {
        PowerSeries::from_fn(order, |n| {
            if n == 0 {
                Complex64::new(1.0, 0.0)
            } else {
                spec.mobius(n) * psi_coefficient(p, n)
            }
        })
    }
}

fn require_unit_constant(s: &PowerSeries) -> Result<()> {
    let c0 = s.coeff(0);
    if (c0 - 1.0).norm() > UNIT_TOL {
        return Err(Error::NonUnitConstantTerm {
            re: c0.re,
            im: c0.im,
        });
    }
    Ok(())
}

/// `(F_delta/z)^delta` from `(f/z)^delta`: coefficient `n` times `tau_n`.
pub fn apply_transform(fz_delta: &PowerSeries, w: &Weight) -> Result<PowerSeries> {
    require_unit_constant(fz_delta)?;
    let tau = w.moments(fz_delta.order())?;
    Ok(PowerSeries::from_fn(fz_delta.order(), |n| {
        if n == 0 {
            fz_delta.coeff(0)
        } else {
            fz_delta.coeff(n) * tau[n]
        }
    }))
}

/// `F_delta = z ((F_delta/z)^delta)^{1/delta}`.
pub fn recover_f(fz_delta_transformed: &PowerSeries, delta: f64) -> Result<PowerSeries> {
    if !(delta > 0.0) {
        return Err(Error::InvalidParameter {
            name: "delta",
            value: delta,
            reason: "must be > 0",
        });
    }
    require_unit_constant(fz_delta_transformed)?;
    let root = if delta == 1.0 {
        fz_delta_transformed.clone()
    } else {
        series_pow(fz_delta_transformed, 1.0 / delta)?
    };
    Ok(root.shift_up())
}

/// `G = z (F_delta/z)^delta`.
pub fn g_series(fz_delta_transformed: &PowerSeries) -> PowerSeries {
    fz_delta_transformed.shift_up()
}
