//! The sharp order `beta` from `beta/(1-beta) = -int_0^1 lambda(t) g(t) dt`.

use std::cell::RefCell;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernel::{g_eval, psi_coefficient};
use crate::params::ParameterSet;
use crate::quadrature::{integrate_with_complement, QuadOptions};
use crate::special::{pfq, HypergeometricSpec};
use crate::weight::{Weight, WeightKind};

/// Ratios at or below `-1 + RATIO_GUARD` have no admissible `beta`.
pub const RATIO_GUARD: f64 = 1e-12;

/// `pi^2/12`, the alternating zeta value at 2.
const ETA2: f64 = std::f64::consts::PI * std::f64::consts::PI / 12.0;
const APERY: f64 = 1.202_056_903_159_594_2;
/// Alternating zeta value at 3, `3 zeta(3) / 4`.
const ETA3: f64 = 0.75 * APERY;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BetaMethod {
    #[serde(rename = "quadrature")]
    Quadrature,
    #[serde(rename = "series_termwise")]
    SeriesTermwise,
    #[serde(rename = "closed_form_5F4")]
    ClosedForm5F4,
    #[serde(rename = "closed_form_analytic")]
    ClosedFormAnalytic,
}

impl fmt::Display for BetaMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BetaMethod::Quadrature => "quadrature",
            BetaMethod::SeriesTermwise => "series_termwise",
            BetaMethod::ClosedForm5F4 => "closed_form_5F4",
            BetaMethod::ClosedFormAnalytic => "closed_form_analytic",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BetaResult {
    pub beta: f64,
    /// `beta / (1 - beta)`.
    pub ratio: f64,
    pub method: BetaMethod,
    #[serde(rename = "err")]
    pub err_estimate: f64,
}

/// `beta = ratio / (1 + ratio)`.
pub fn beta_from_ratio(ratio: f64) -> Result<f64> {
    if !ratio.is_finite() || ratio <= -1.0 + RATIO_GUARD {
        return Err(Error::RatioIsMinusOne(ratio));
    }
    Ok(ratio / (1.0 + ratio))
}

fn result(ratio: f64, method: BetaMethod, err: f64) -> Result<BetaResult> {
    Ok(BetaResult {
        beta: beta_from_ratio(ratio)?,
        ratio,
        method,
        err_estimate: err,
    })
}

fn require_xi_range(p: &ParameterSet) -> Result<()> {
    if (0.0..=0.5).contains(&p.xi) {
        Ok(())
    } else {
        Err(Error::PreconditionViolated(format!(
            "xi = {} must lie in [0, 1/2]",
            p.xi
        )))
    }
}

fn require_gamma_positive(p: &ParameterSet, what: &str) -> Result<()> {
    if p.gamma_is_zero() {
        Err(Error::PreconditionViolated(format!(
            "{what} needs gamma > 0"
        )))
    } else {
        Ok(())
    }
}

/// `beta` by quadrature of `lambda g`.
pub fn solve_beta(w: &Weight, p: &ParameterSet, tol: f64) -> Result<BetaResult> {
    require_xi_range(p)?;
    let g_tol = (tol * 1e-2).max(1e-15);
    let failure = RefCell::new(None);
    let opts = QuadOptions::tol(tol)
        .with_rel(tol)
        .with_singularity(w.singularity());
    let q = integrate_with_complement(
        |t, s| {
            let lam = w.value_c(t, s);
            if lam == 0.0 {
                return 0.0;
            }
            match g_eval(p, t, g_tol) {
                Ok(g) => lam * g,
                Err(e) => {
                    failure.borrow_mut().get_or_insert(e);
                    f64::NAN
                }
            }
        },
        0.0,
        1.0,
        &opts,
    );
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    let q = q?;
    result(-q.value, BetaMethod::Quadrature, q.err + g_tol)
}

/// `beta` from the moment series truncated after `n_terms` terms.
///
/// `err` is the magnitude of the first omitted term, a bound for the
/// alternating tail once the terms decrease.
pub fn solve_beta_series(w: &Weight, p: &ParameterSet, n_terms: usize) -> Result<BetaResult> {
    require_gamma_positive(p, "the termwise series")?;
    require_xi_range(p)?;
    let tau = w.moments(n_terms + 1)?;
    let term = |n: usize| {
        let sign = if n.is_multiple_of(2) { 1.0 } else { -1.0 };
        sign * (n as f64 + 1.0 - p.xi) * tau[n] * psi_coefficient(p, n)
    };
    // ascending order: the terms shrink, so the tail is added last
    let sum: f64 = (1..=n_terms).map(term).sum();
    let scale = 2.0 / (1.0 - p.xi);
    let ratio = -1.0 - scale * sum;
    result(
        ratio,
        BetaMethod::SeriesTermwise,
        scale * term(n_terms + 1).abs(),
    )
}

/// `5F4(1, b, 2-xi, delta/mu, delta/nu; c, 1-xi, 1+delta/mu, 1+delta/nu; -1)`.
pub fn carlson_shaffer_5f4(b: f64, c: f64, p: &ParameterSet, tol: f64) -> Result<(f64, f64)> {
    let (dm, dn) = (p.delta_over_mu(), p.delta_over_nu());
    let s = pfq(
        &HypergeometricSpec::new(
            &[1.0, b, 2.0 - p.xi, dm, dn],
            &[c, 1.0 - p.xi, 1.0 + dm, 1.0 + dn],
            -1.0,
        ),
        tol,
    )?;
    Ok((s.value, s.err))
}

/// `beta_0 = 1 - 1/(2(1 - F))` for the Carlson-Shaffer weight, with `F`
/// the `5F4` value above.
pub fn solve_beta_5f4(b: f64, c: f64, p: &ParameterSet) -> Result<BetaResult> {
    require_gamma_positive(p, "the 5F4 closed form")?;
    require_xi_range(p)?;
    if !(b > 0.0 && c > b) {
        return Err(Error::ParamOutOfRange(format!(
            "carlson_shaffer needs 0 < b < c, got b = {b}, c = {c}"
        )));
    }
    let (f, err) = carlson_shaffer_5f4(b, c, p, 1e-14)?;
    result(1.0 - 2.0 * f, BetaMethod::ClosedForm5F4, 2.0 * err)
}

/// True for the weights that coincide with `lambda = 1`.
pub fn is_uniform_equivalent(kind: &WeightKind) -> bool {
    match *kind {
        WeightKind::Uniform => true,
        WeightKind::Bernardi { c } => c == 0.0,
        WeightKind::CarlsonShaffer { b, c } => b == 1.0 && c == 2.0,
        WeightKind::Komatu { k, p } => k == 0.0 && p == 1.0,
        WeightKind::Hohlov { a, b, c } => a == 1.0 && b == 1.0 && c == 2.0,
        _ => false,
    }
}

/// Exact `beta` for `lambda = 1` when the kernel reduces to elementary
/// sums: `gamma = 0` with `delta = alpha`, or `gamma > 0` with
/// `mu = nu = delta`.
pub fn closed_form_analytic(w: &Weight, p: &ParameterSet) -> Result<BetaResult> {
    require_xi_range(p)?;
    if !is_uniform_equivalent(w.kind()) {
        return Err(Error::NotCovered(format!(
            "no closed form for the {} weight",
            w.name()
        )));
    }
    let xi = p.xi;
    let ratio = if p.gamma_is_zero() {
        if p.delta != p.alpha {
            return Err(Error::NotCovered(
                "gamma = 0 closed form needs delta = alpha".to_string(),
            ));
        }
        1.0 - 2.0 * (std::f64::consts::LN_2 - xi * ETA2) / (1.0 - xi)
    } else {
        if !(p.mu == p.delta && p.nu == p.delta) {
            return Err(Error::NotCovered(
                "gamma > 0 closed form needs mu = nu = delta".to_string(),
            ));
        }
        let integral = 1.0 + 2.0 / (1.0 - xi) * ((ETA2 - 1.0) - xi * (ETA3 - 1.0));
        -integral
    };
    result(ratio, BetaMethod::ClosedFormAnalytic, f64::EPSILON * 4.0)
}
