//! Summation of slowly converging real series.
//!
//! Terms are added directly until two successive terms drop below
//! `tol * |sum|`. A series that is still alive after a few dozen terms and
//! whose terms alternate in sign is handed to iterated averaging of the
//! partial sums (Euler / van Wijngaarden), which converges geometrically for
//! smooth alternating terms such as `(-1)^n / n`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_TOL: f64 = 1e-12;
pub const MAX_TERMS: usize = 100_000;

const MIN_TERMS: usize = 10;
const SWITCH_AT: usize = 64;
const EULER_START: usize = 64;
const EULER_LEVELS: usize = 32;

/// A summed series with an error estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesSum {
    pub value: f64,
    pub err: f64,
    pub terms: usize,
    pub accelerated: bool,
}

/// Sums `term(0) + term(1) + ...`.
pub fn sum_series(mut term: impl FnMut(usize) -> f64, tol: f64) -> Result<SeriesSum> {
    let mut terms: Vec<f64> = Vec::with_capacity(SWITCH_AT * 2);
    let mut sum = 0.0;
    let mut prev = f64::INFINITY;
    for n in 0..MAX_TERMS {
        let a = term(n);
        if !a.is_finite() {
            return Err(Error::DivergentSeries(format!("term {n} is {a}")));
        }
        sum += a;
        terms.push(a);
        let small = tol * sum.abs();
        if n + 1 >= MIN_TERMS && a.abs() <= small && prev.abs() <= small {
            return Ok(SeriesSum {
                value: sum,
                err: a.abs() + prev.abs(),
                terms: n + 1,
                accelerated: false,
            });
        }
        if sum == 0.0 && a == 0.0 && prev == 0.0 && n + 1 >= MIN_TERMS {
            return Ok(SeriesSum {
                value: 0.0,
                err: 0.0,
                terms: n + 1,
                accelerated: false,
            });
        }
        prev = a;
        if n + 1 == SWITCH_AT && alternates(&terms[SWITCH_AT - 16..]) {
            return euler_sum(terms, term, tol);
        }
    }
    Err(Error::DivergentSeries(format!(
        "no convergence after {MAX_TERMS} terms (partial sum {sum})"
    )))
}

fn alternates(a: &[f64]) -> bool {
    a.windows(2).all(|w| w[0] * w[1] < 0.0)
}

fn euler_sum(
    mut terms: Vec<f64>,
    mut term: impl FnMut(usize) -> f64,
    tol: f64,
) -> Result<SeriesSum> {
    let mut start = EULER_START;
    let mut levels = EULER_LEVELS;
    let mut partial: Vec<f64> = Vec::with_capacity(terms.len());
    let mut acc = 0.0;
    for a in &terms {
        acc += a;
        partial.push(acc);
    }
    loop {
        let need = start + levels + 1;
        if need > MAX_TERMS {
            break;
        }
        while terms.len() < need {
            let n = terms.len();
            let a = term(n);
            if !a.is_finite() {
                return Err(Error::DivergentSeries(format!("term {n} is {a}")));
            }
            acc += a;
            terms.push(a);
            partial.push(acc);
        }
        let mut v = partial[start..need].to_vec();
        let mut before_last = v[0];
        for level in 0..levels {
            if level + 1 == levels {
                before_last = v[0];
            }
            for i in 0..v.len() - 1 - level {
                v[i] = 0.5 * (v[i] + v[i + 1]);
            }
        }
        let value = v[0];
        let err = (value - before_last).abs();
        if err <= tol * value.abs().max(f64::MIN_POSITIVE) || err == 0.0 {
            return Ok(SeriesSum {
                value,
                err,
                terms: need,
                accelerated: true,
            });
        }
        start *= 2;
        levels *= 2;
    }
    Err(Error::DivergentSeries(format!(
        "alternating series not settled within {MAX_TERMS} terms"
    )))
}
