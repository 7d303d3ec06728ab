use serde::{Deserialize, Serialize};

use super::gamma::{digamma, gamma, rgamma};
use super::summation::{sum_series, SeriesSum};
use crate::error::{Error, Result};

/// Parameters of `pFq(c_1..c_p; d_1..d_q; x)` at a real argument.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HypergeometricSpec {
    pub numerator: Vec<f64>,
    pub denominator: Vec<f64>,
    pub argument: f64,
}

impl HypergeometricSpec {
    pub fn new(numerator: &[f64], denominator: &[f64], argument: f64) -> Self {
        Self {
            numerator: numerator.to_vec(),
            denominator: denominator.to_vec(),
            argument,
        }
    }
}

fn nonpositive_integer(x: f64) -> bool {
    x <= 0.0 && x == x.round()
}

/// Degree of a terminating series, if some numerator is a non-positive integer.
fn terminating_degree(numerator: &[f64]) -> Option<usize> {
    numerator
        .iter()
        .filter(|&&c| nonpositive_integer(c))
        .map(|&c| (-c) as usize)
        .min()
}

/// Sums the generalized hypergeometric series.
///
/// `|x| < 1` always converges for `p <= q + 1`. On `|x| = 1` the series is
/// accepted when `sum(d) - sum(c) > 0`, or at `x = -1` when the terms
/// still tend to zero (`sum(d) - sum(c) > -1`); the latter case is summed
/// with alternating acceleration.
pub fn pfq(spec: &HypergeometricSpec, tol: f64) -> Result<SeriesSum> {
    let HypergeometricSpec {
        numerator,
        denominator,
        argument: x,
    } = spec;
    let x = *x;
    if let Some(&d) = denominator.iter().find(|&&d| nonpositive_integer(d)) {
        return Err(Error::BadDenominator(d));
    }
    if !x.is_finite() {
        return Err(Error::DivergentSeries(format!("argument {x}")));
    }

    if let Some(m) = terminating_degree(numerator) {
        let mut t = 1.0;
        let mut sum = 1.0;
        for n in 0..m {
            t *= ratio(numerator, denominator, n) * x;
            sum += t;
        }
        return Ok(SeriesSum {
            value: sum,
            err: 0.0,
            terms: m + 1,
            accelerated: false,
        });
    }

    let p = numerator.len();
    let q = denominator.len();
    if x == 0.0 {
        return Ok(SeriesSum {
            value: 1.0,
            err: 0.0,
            terms: 1,
            accelerated: false,
        });
    }
    if p > q + 1 {
        return Err(Error::DivergentSeries(format!(
            "{p}F{q} has zero radius of convergence"
        )));
    }
    if p == q + 1 {
        let excess: f64 = denominator.iter().sum::<f64>() - numerator.iter().sum::<f64>();
        if x.abs() > 1.0 {
            return Err(Error::DivergentSeries(format!("|x| = {} > 1", x.abs())));
        }
        if x == 1.0 && excess <= 0.0 {
            return Err(Error::DivergentSeries(format!(
                "at x = 1 the parameter excess {excess} must be > 0"
            )));
        }
        if x == -1.0 && excess <= -1.0 {
            return Err(Error::DivergentSeries(format!(
                "at x = -1 the parameter excess {excess} must be > -1"
            )));
        }
    }

    let mut t = 1.0;
    let mut next = 0;
    sum_series(
        |n| {
            while next < n {
                t *= ratio(numerator, denominator, next) * x;
                next += 1;
            }
            t
        },
        tol,
    )
}

// t_{n+1}/t_n without the argument
fn ratio(numerator: &[f64], denominator: &[f64], n: usize) -> f64 {
    let n = n as f64;
    let num: f64 = numerator.iter().map(|c| c + n).product();
    let den: f64 = denominator.iter().map(|d| d + n).product();
    num / (den * (n + 1.0))
}

/// Value-only convenience wrapper around [`pfq`].
pub fn pfq_value(numerator: &[f64], denominator: &[f64], x: f64, tol: f64) -> Result<f64> {
    pfq(&HypergeometricSpec::new(numerator, denominator, x), tol).map(|s| s.value)
}

const HYP_TOL: f64 = 1e-15;
// how close c - a - b must be to an integer before the logarithmic formulas are used
const INTEGER_SNAP: f64 = 1e-9;

/// Gauss hypergeometric function `2F1(a, b; c; x)` for real `x <= 1`.
///
/// Uses the Maclaurin series for `|x| <= 1/2`, the Pfaff transformation for
/// `x < -1/2`, the `1 - x` connection formulas on `(1/2, 1)` (with the
/// logarithmic variants when `c - a - b` is an integer), and Gauss's sum at
/// `x = 1`.
pub fn hyp2f1(a: f64, b: f64, c: f64, x: f64) -> Result<f64> {
    hyp2f1_split(a, b, c, x, 1.0 - x)
}

/// [`hyp2f1`] with the complement `y = 1 - x` supplied by the caller, so
/// arguments that round to 1 in floating point keep their distance to the
/// branch point.
pub fn hyp2f1_split(a: f64, b: f64, c: f64, x: f64, y: f64) -> Result<f64> {
    if nonpositive_integer(c) {
        return Err(Error::BadDenominator(c));
    }
    if nonpositive_integer(a) || nonpositive_integer(b) {
        return pfq_value(&[a, b], &[c], x, HYP_TOL);
    }
    if x > 1.0 || !x.is_finite() || y < 0.0 {
        return Err(Error::DivergentSeries(format!("2F1 argument {x} > 1")));
    }
    if x == 0.0 {
        return Ok(1.0);
    }
    if x < -0.5 {
        // Pfaff: (1-x)^{-a} 2F1(a, c-b; c; x/(x-1))
        return Ok((1.0 - x).powf(-a) * hyp2f1(a, c - b, c, x / (x - 1.0))?);
    }
    if x <= 0.5 {
        return pfq_value(&[a, b], &[c], x, HYP_TOL);
    }
    let m = c - a - b;
    if y == 0.0 {
        if m <= 0.0 {
            return Err(Error::DivergentSeries(format!(
                "2F1 at x = 1 needs c - a - b > 0, got {m}"
            )));
        }
        return Ok(gamma(c) * gamma(m) * rgamma(c - a) * rgamma(c - b));
    }
    let mr = m.round();
    if (m - mr).abs() > INTEGER_SNAP {
        let first = gamma(c)
            * gamma(m)
            * rgamma(c - a)
            * rgamma(c - b)
            * maclaurin(a, b, a + b - c + 1.0, y)?;
        let second = y.powf(m)
            * gamma(c)
            * gamma(-m)
            * rgamma(a)
            * rgamma(b)
            * maclaurin(c - a, c - b, m + 1.0, y)?;
        return Ok(first + second);
    }
    let mi = mr as i64;
    if mi == 0 {
        log_case_zero(a, b, y)
    } else if mi > 0 {
        log_case_positive(a, b, mi as usize, y)
    } else {
        log_case_negative(a, b, (-mi) as usize, y)
    }
}

// 2F1 series in the (small) variable y, with a sane error for bad denominators
fn maclaurin(a: f64, b: f64, c: f64, y: f64) -> Result<f64> {
    if nonpositive_integer(c) {
        return Err(Error::BadDenominator(c));
    }
    pfq_value(&[a, b], &[c], y, HYP_TOL)
}

fn sum_log_series(mut term: impl FnMut(usize) -> f64) -> Result<f64> {
    sum_series(&mut term, HYP_TOL).map(|s| s.value)
}

// c = a + b
fn log_case_zero(a: f64, b: f64, y: f64) -> Result<f64> {
    let ln_y = y.ln();
    let mut coef = 1.0;
    let mut next = 0;
    let s = sum_log_series(|n| {
        while next < n {
            let k = next as f64;
            coef *= (a + k) * (b + k) / ((k + 1.0) * (k + 1.0)) * y;
            next += 1;
        }
        let k = n as f64;
        coef * (2.0 * digamma(k + 1.0) - digamma(a + k) - digamma(b + k) - ln_y)
    })?;
    Ok(gamma(a + b) * rgamma(a) * rgamma(b) * s)
}

// c = a + b + m, m >= 1
fn log_case_positive(a: f64, b: f64, m: usize, y: f64) -> Result<f64> {
    let mf = m as f64;
    let c = a + b + mf;
    let mut finite = 0.0;
    let mut t = 1.0;
    for n in 0..m {
        finite += t;
        let k = n as f64;
        t *= (a + k) * (b + k) / ((k + 1.0) * (1.0 - mf + k)) * y;
    }
    let finite = gamma(mf) * gamma(c) * rgamma(a + mf) * rgamma(b + mf) * finite;

    let ln_y = y.ln();
    let mut coef = 1.0 / gamma(mf + 1.0);
    let mut next = 0;
    let s = sum_log_series(|n| {
        while next < n {
            let k = next as f64;
            coef *= (a + mf + k) * (b + mf + k) / ((k + 1.0) * (k + mf + 1.0)) * y;
            next += 1;
        }
        let k = n as f64;
        coef * (ln_y - digamma(k + 1.0) - digamma(k + mf + 1.0)
            + digamma(a + k + mf)
            + digamma(b + k + mf))
    })?;
    // (x - 1)^m = (-y)^m
    let sign = if m.is_multiple_of(2) { 1.0 } else { -1.0 };
    Ok(finite - sign * y.powi(m as i32) * gamma(c) * rgamma(a) * rgamma(b) * s)
}

// c = a + b - m, m >= 1
fn log_case_negative(a: f64, b: f64, m: usize, y: f64) -> Result<f64> {
    let mf = m as f64;
    let c = a + b - mf;
    let mut finite = 0.0;
    let mut t = 1.0;
    for n in 0..m {
        finite += t;
        let k = n as f64;
        t *= (a - mf + k) * (b - mf + k) / ((k + 1.0) * (1.0 - mf + k)) * y;
    }
    let finite = gamma(mf) * gamma(c) * rgamma(a) * rgamma(b) * y.powi(-(m as i32)) * finite;

    let weight = gamma(c) * rgamma(a - mf) * rgamma(b - mf);
    if weight == 0.0 {
        return Ok(finite);
    }
    let ln_y = y.ln();
    let mut coef = 1.0 / gamma(mf + 1.0);
    let mut next = 0;
    let s = sum_log_series(|n| {
        while next < n {
            let k = next as f64;
            coef *= (a + k) * (b + k) / ((k + 1.0) * (k + mf + 1.0)) * y;
            next += 1;
        }
        let k = n as f64;
        coef * (ln_y - digamma(k + 1.0) - digamma(k + mf + 1.0) + digamma(a + k) + digamma(b + k))
    })?;
    let sign = if m.is_multiple_of(2) { 1.0 } else { -1.0 };
    Ok(finite - sign * weight * s)
}
