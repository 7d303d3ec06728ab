//! Truncated complex power series `c_0 + c_1 z + ... + c_N z^N`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_ORDER: usize = 64;

const UNIT_TOL: f64 = 1e-12;
const ZERO_DENOM: f64 = 1e-14;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<[f64; 2]>", into = "Vec<[f64; 2]>")]
pub struct PowerSeries {
    coeffs: Vec<Complex64>,
}

impl PowerSeries {
    /// Fails if `coeffs` is empty or holds a non-finite value.
    pub fn new(coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::InvalidParameter {
                name: "coeffs",
                value: 0.0,
                reason: "a series needs at least one coefficient",
            });
        }
        if let Some(c) = coeffs.iter().find(|c| !c.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "coeffs",
                value: if c.re.is_finite() { c.im } else { c.re },
                reason: "coefficients must be finite",
            });
        }
        Ok(Self { coeffs })
    }

    pub fn from_real(coeffs: &[f64]) -> Result<Self> {
        Self::new(coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect())
    }

    /// Builds `c_n = f(n)` for `n = 0..=order`.
    pub fn from_fn(order: usize, f: impl FnMut(usize) -> Complex64) -> Self {
        Self {
            coeffs: (0..=order).map(f).collect(),
        }
    }

    pub fn zero(order: usize) -> Self {
        Self::from_fn(order, |_| Complex64::new(0.0, 0.0))
    }

    pub fn one(order: usize) -> Self {
        Self::monomial(order, 0)
    }

    /// The series `z` (order >= 1 to be meaningful).
    pub fn identity(order: usize) -> Self {
        Self::monomial(order, 1)
    }

    pub fn monomial(order: usize, k: usize) -> Self {
        Self::from_fn(order, |n| {
            Complex64::new(if n == k { 1.0 } else { 0.0 }, 0.0)
        })
    }

    /// `1/(1 - z)`, the identity for the Hadamard product.
    pub fn geometric(order: usize) -> Self {
        Self::from_fn(order, |_| Complex64::new(1.0, 0.0))
    }

    /// Koebe function `z/(1 - z)^2`.
    pub fn koebe(order: usize) -> Self {
        Self::from_fn(order, |n| Complex64::new(n as f64, 0.0))
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Complex64> {
        self.coeffs
    }

    /// Coefficient `n`, zero past the truncation order.
    pub fn coeff(&self, n: usize) -> Complex64 {
        self.coeffs
            .get(n)
            .copied()
            .unwrap_or(Complex64::new(0.0, 0.0))
    }

    pub fn truncate(&self, order: usize) -> Self {
        Self::from_fn(order, |n| self.coeff(n))
    }

    pub fn scale(&self, k: Complex64) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|c| c * k).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let order = self.order().min(other.order());
        Self::from_fn(order, |n| self.coeffs[n] + other.coeffs[n])
    }

    pub fn sub(&self, other: &Self) -> Self {
        let order = self.order().min(other.order());
        Self::from_fn(order, |n| self.coeffs[n] - other.coeffs[n])
    }

    /// Cauchy product truncated to the smaller order.
    pub fn mul(&self, other: &Self) -> Self {
        let order = self.order().min(other.order());
        let mut out = vec![Complex64::new(0.0, 0.0); order + 1];
        for (i, a) in self.coeffs.iter().take(order + 1).enumerate() {
            if *a == Complex64::new(0.0, 0.0) {
                continue;
            }
            for (j, b) in other.coeffs.iter().take(order + 1 - i).enumerate() {
                out[i + j] += a * b;
            }
        }
        Self { coeffs: out }
    }

    /// Formal derivative; the order drops by one (kept at least 0).
    pub fn derivative(&self) -> Self {
        if self.order() == 0 {
            return Self::zero(0);
        }
        Self::from_fn(self.order() - 1, |n| self.coeffs[n + 1] * (n as f64 + 1.0))
    }

    /// `z * s`, one order longer.
    pub fn shift_up(&self) -> Self {
        Self::from_fn(self.order() + 1, |n| {
            if n == 0 {
                Complex64::new(0.0, 0.0)
            } else {
                self.coeffs[n - 1]
            }
        })
    }

    /// `s / z`; requires a vanishing constant term.
    pub fn shift_down(&self) -> Result<Self> {
        let c0 = self.coeffs[0];
        if c0.norm() > UNIT_TOL {
            return Err(Error::NonZeroConstantTerm {
                re: c0.re,
                im: c0.im,
            });
        }
        if self.order() == 0 {
            return Ok(Self::zero(0));
        }
        Ok(Self::from_fn(self.order() - 1, |n| self.coeffs[n + 1]))
    }

    /// `z s'(z)`, i.e. `c_n -> n c_n`.
    pub fn theta(&self) -> Self {
        Self::from_fn(self.order(), |n| self.coeffs[n] * n as f64)
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        eval(self, z)
    }

    pub fn eval_derivative(&self, z: Complex64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for n in (1..=self.order()).rev() {
            acc = acc * z + self.coeffs[n] * n as f64;
        }
        acc
    }

    /// Largest coefficient magnitude among the last `k`.
    pub fn tail_magnitude(&self, k: usize) -> f64 {
        let start = self.coeffs.len().saturating_sub(k);
        self.coeffs[start..]
            .iter()
            .map(|c| c.norm())
            .fold(0.0, f64::max)
    }

    /// Geometric bound on the neglected tail at radius `r < 1`, assuming
    /// the last eight coefficients bound everything beyond the order.
    pub fn tail_bound(&self, r: f64) -> f64 {
        self.tail_magnitude(8) * r.powi(self.order() as i32 + 1) / (1.0 - r)
    }
}

impl TryFrom<Vec<[f64; 2]>> for PowerSeries {
    type Error = Error;

    fn try_from(v: Vec<[f64; 2]>) -> Result<Self> {
        Self::new(
            v.into_iter()
                .map(|[re, im]| Complex64::new(re, im))
                .collect(),
        )
    }
}

impl From<PowerSeries> for Vec<[f64; 2]> {
    fn from(s: PowerSeries) -> Self {
        s.coeffs.into_iter().map(|c| [c.re, c.im]).collect()
    }
}

/// Termwise product `a_n b_n`, truncated to the smaller order.
pub fn hadamard(a: &PowerSeries, b: &PowerSeries) -> PowerSeries {
    let order = a.order().min(b.order());
    PowerSeries::from_fn(order, |n| a.coeffs[n] * b.coeffs[n])
}

fn require_unit(s: &PowerSeries) -> Result<()> {
    let c0 = s.coeffs[0];
    if (c0 - 1.0).norm() > UNIT_TOL {
        return Err(Error::NonUnitConstantTerm {
            re: c0.re,
            im: c0.im,
        });
    }
    Ok(())
}

/// Logarithm of a series with unit constant term, via `L' = s'/s`.
pub fn series_log(s: &PowerSeries) -> Result<PowerSeries> {
    require_unit(s)?;
    let c = &s.coeffs;
    let order = s.order();
    let mut l = vec![Complex64::new(0.0, 0.0); order + 1];
    for n in 1..=order {
        let mut acc = c[n] * n as f64;
        for k in 1..n {
            acc -= l[k] * c[n - k] * k as f64;
        }
        l[n] = acc / n as f64;
    }
    Ok(PowerSeries { coeffs: l })
}

/// `1/s` for a series with nonzero constant term.
pub fn series_recip(s: &PowerSeries) -> Result<PowerSeries> {
    let c = s.coeffs();
    if c[0].norm() < ZERO_DENOM {
        return Err(Error::ZeroDenominator { re: 0.0, im: 0.0 });
    }
    let inv0 = c[0].inv();
    let mut out: Vec<Complex64> = Vec::with_capacity(c.len());
    out.push(inv0);
    for n in 1..c.len() {
        let acc: Complex64 = (1..=n).map(|k| c[k] * out[n - k]).sum();
        out.push(-acc * inv0);
    }
    Ok(PowerSeries { coeffs: out })
}

/// `a / b`, truncated to the smaller order.
pub fn series_div(a: &PowerSeries, b: &PowerSeries) -> Result<PowerSeries> {
    Ok(a.mul(&series_recip(b)?))
}

/// Exponential of a series with zero constant term, via `E' = s' E`.
pub fn series_exp(s: &PowerSeries) -> Result<PowerSeries> {
    let c0 = s.coeffs[0];
    if c0.norm() > UNIT_TOL {
        return Err(Error::NonZeroConstantTerm {
            re: c0.re,
            im: c0.im,
        });
    }
    let c = &s.coeffs;
    let order = s.order();
    let mut e = vec![Complex64::new(0.0, 0.0); order + 1];
    e[0] = Complex64::new(1.0, 0.0);
    for n in 1..=order {
        let mut acc = Complex64::new(0.0, 0.0);
        for k in 1..=n {
            acc += c[k] * e[n - k] * k as f64;
        }
        e[n] = acc / n as f64;
    }
    Ok(PowerSeries { coeffs: e })
}

/// `s^p = exp(p log s)` for a series with unit constant term.
pub fn series_pow(s: &PowerSeries, p: f64) -> Result<PowerSeries> {
    let l = series_log(s)?;
    series_exp(&l.scale(Complex64::new(p, 0.0)))
}

/// Horner evaluation.
pub fn eval(s: &PowerSeries, z: Complex64) -> Complex64 {
    s.coeffs
        .iter()
        .rev()
        .fold(Complex64::new(0.0, 0.0), |acc, c| acc * z + c)
}

/// `z s'(z) / s(z)`.
pub fn log_derivative_fraction(s: &PowerSeries, z: Complex64) -> Result<Complex64> {
    let v = eval(s, z);
    if v.norm() < ZERO_DENOM {
        return Err(Error::ZeroDenominator { re: z.re, im: z.im });
    }
    Ok(z * s.eval_derivative(z) / v)
}
