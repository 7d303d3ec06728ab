//! Tanh-sinh (double exponential) quadrature on finite intervals.
//!
//! The substitution `x = tanh(pi/2 sinh u)` clusters nodes at both ends
//! doubly exponentially, so integrable endpoint singularities such as
//! `t^{b-1}`, `(1-t)^{c-a-b}` or `log(1/t)` are handled without special
//! casing. Distances to the endpoints are computed from the complement
//! `1 - tanh(s) = e^{-s}/cosh(s)` to avoid cancellation.

use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_TOL: f64 = 1e-10;
pub const MAX_LEVEL: u32 = 12;
const MIN_LEVEL: u32 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Singularity {
    #[default]
    None,
    LeftPower,
    RightPower,
    LeftLog,
    Both,
}

impl Singularity {
    /// Half-width of the truncated `u` range.
    fn u_max(self) -> f64 {
        match self {
            Singularity::None => 4.0,
            _ => 6.5,
        }
    }
}

/// A real function on an open interval with a hint about endpoint behaviour.
pub struct Integrand<'a> {
    pub evaluate: &'a dyn Fn(f64) -> f64,
    pub singularity: Singularity,
}

impl<'a> Integrand<'a> {
    pub fn new(evaluate: &'a dyn Fn(f64) -> f64, singularity: Singularity) -> Self {
        Self {
            evaluate,
            singularity,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Quadrature {
    pub value: f64,
    pub err: f64,
    pub evaluations: usize,
    pub level: u32,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadOptions {
    pub abs_tol: f64,
    /// Extra relative tolerance; the stopping test uses `max(abs, rel*|I|)`.
    pub rel_tol: f64,
    pub singularity: Singularity,
    pub max_level: u32,
}

impl Default for QuadOptions {
    fn default() -> Self {
        Self {
            abs_tol: DEFAULT_TOL,
            rel_tol: 0.0,
            singularity: Singularity::None,
            max_level: MAX_LEVEL,
        }
    }
}

impl QuadOptions {
    pub fn tol(abs_tol: f64) -> Self {
        Self {
            abs_tol,
            ..Self::default()
        }
    }

    pub fn with_rel(mut self, rel_tol: f64) -> Self {
        self.rel_tol = rel_tol;
        self
    }

    pub fn with_singularity(mut self, s: Singularity) -> Self {
        self.singularity = s;
        self
    }
}

// weight and endpoint complement at abscissa u >= 0
#[inline]
fn node(u: f64) -> (f64, f64) {
    let s = FRAC_PI_2 * u.sinh();
    let ch = s.cosh();
    let comp = (-s).exp() / ch;
    let w = FRAC_PI_2 * u.cosh() / (ch * ch);
    (w, comp)
}

/// `integral of f over (lo, hi)` to within `tol`.
pub fn integrate(f: &Integrand<'_>, lo: f64, hi: f64, tol: f64) -> Result<Quadrature> {
    integrate_with(
        f.evaluate,
        lo,
        hi,
        &QuadOptions::tol(tol).with_singularity(f.singularity),
    )
}

pub fn integrate_with(
    f: impl Fn(f64) -> f64,
    lo: f64,
    hi: f64,
    opts: &QuadOptions,
) -> Result<Quadrature> {
    tanh_sinh(|x, _| f(x), lo, hi, opts, false)
}

/// Like [`integrate_with`], but `f(x, hi - x)` also receives the distance to
/// the right endpoint, computed without cancellation. Use it when the
/// integrand is singular at `hi`; `x` itself may round to `hi` there.
pub fn integrate_with_complement(
    f: impl Fn(f64, f64) -> f64,
    lo: f64,
    hi: f64,
    opts: &QuadOptions,
) -> Result<Quadrature> {
    tanh_sinh(f, lo, hi, opts, true)
}

fn tanh_sinh(
    f: impl Fn(f64, f64) -> f64,
    lo: f64,
    hi: f64,
    opts: &QuadOptions,
    complement: bool,
) -> Result<Quadrature> {
    if !(lo.is_finite() && hi.is_finite()) || lo > hi {
        return Err(Error::InvalidParameter {
            name: "interval",
            value: hi - lo,
            reason: "need finite lo <= hi",
        });
    }
    if !(opts.abs_tol > 0.0) && !(opts.rel_tol > 0.0) {
        return Err(Error::InvalidParameter {
            name: "tol",
            value: opts.abs_tol,
            reason: "must be > 0",
        });
    }
    if lo == hi {
        return Ok(Quadrature {
            value: 0.0,
            err: 0.0,
            evaluations: 0,
            level: 0,
        });
    }
    let width = hi - lo;
    let half = 0.5 * width;
    let u_max = opts.singularity.u_max();
    let mut evaluations = 0usize;
    let no_convergence = |value: f64, err: f64| Error::NoConvergence { lo, hi, value, err };

    let eval = |x: f64, dist_hi: f64, evaluations: &mut usize| -> Result<f64> {
        let y = f(x, dist_hi);
        *evaluations += 1;
        if y.is_finite() {
            Ok(y)
        } else {
            Err(no_convergence(f64::NAN, f64::INFINITY))
        }
    };
    let pair = |u: f64, evaluations: &mut usize| -> Result<f64> {
        let (w, comp) = node(u);
        if w == 0.0 {
            return Ok(0.0);
        }
        let d = half * comp;
        if d == 0.0 {
            return Ok(0.0);
        }
        let mut acc = 0.0;
        let left = lo + d;
        if left > lo {
            acc += eval(left, width - d, evaluations)?;
        }
        let right = hi - d;
        if right < hi || complement {
            acc += eval(right, d, evaluations)?;
        }
        Ok(w * acc)
    };

    let mut sum = FRAC_PI_2 * eval(lo + half, half, &mut evaluations)?;
    let mut k = 1usize;
    while k as f64 <= u_max {
        sum += pair(k as f64, &mut evaluations)?;
        k += 1;
    }
    let mut h = 1.0;
    let mut prev = half * h * sum;
    let mut err = f64::INFINITY;
    for level in 1..=opts.max_level {
        h *= 0.5;
        let mut j = 1usize;
        loop {
            let u = j as f64 * h;
            if u > u_max {
                break;
            }
            sum += pair(u, &mut evaluations)?;
            j += 2;
        }
        let value = half * h * sum;
        err = (value - prev).abs();
        let target = opts.abs_tol.max(opts.rel_tol * value.abs());
        if level >= MIN_LEVEL && err <= target {
            return Ok(Quadrature {
                value,
                err,
                evaluations,
                level,
            });
        }
        prev = value;
    }
    Err(no_convergence(prev, err))
}

/// A fixed tanh-sinh rule on `(lo, hi)` for tabulating integrands that are
/// reused many times.
#[derive(Debug, Clone, PartialEq)]
pub struct FixedRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl FixedRule {
    /// All nodes up to step `2^-level`, dropping nodes that round onto an endpoint.
    pub fn tanh_sinh(lo: f64, hi: f64, level: u32, singularity: Singularity) -> Self {
        let half = 0.5 * (hi - lo);
        let h = 0.5f64.powi(level as i32);
        let u_max = singularity.u_max();
        let mut nodes = vec![lo + half];
        let mut weights = vec![half * h * FRAC_PI_2];
        let mut j = 1usize;
        loop {
            let u = j as f64 * h;
            if u > u_max {
                break;
            }
            let (w, comp) = node(u);
            let d = half * comp;
            for x in [lo + d, hi - d] {
                if w > 0.0 && x > lo && x < hi {
                    nodes.push(x);
                    weights.push(half * h * w);
                }
            }
            j += 1;
        }
        // ascending order keeps summation order reproducible; nodes that
        // round to the same double near an endpoint are merged
        let mut idx: Vec<usize> = (0..nodes.len()).collect();
        idx.sort_by(|&a, &b| nodes[a].total_cmp(&nodes[b]));
        let mut rule = Self {
            nodes: Vec::with_capacity(idx.len()),
            weights: Vec::with_capacity(idx.len()),
        };
        for i in idx {
            if rule.nodes.last() == Some(&nodes[i]) {
                *rule.weights.last_mut().unwrap() += weights[i];
            } else {
                rule.nodes.push(nodes[i]);
                rule.weights.push(weights[i]);
            }
        }
        rule
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// `sum w_i f(x_i)` for tabulated values `f(x_i)`.
    pub fn apply(&self, values: &[f64]) -> f64 {
        self.weights.iter().zip(values).map(|(w, v)| w * v).sum()
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, w)| w * f(x))
            .sum()
    }
}
