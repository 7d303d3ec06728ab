#![allow(clippy::excessive_precision)]
use std::f64::consts::PI;

use crate::error::{Error, Result};

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

const HALF_LN_2PI: f64 = 0.918_938_533_204_672_8;

/// `(x)_n = x (x+1) ... (x+n-1)`, with `(x)_0 = 1`.
pub fn pochhammer(x: f64, n: u32) -> f64 {
    (0..n).fold(1.0, |acc, k| acc * (x + k as f64))
}

// Lanczos sum for ln Gamma(x), x >= 0.5
fn lanczos_ln_gamma(x: f64) -> f64 {
    let x = x - 1.0;
    let mut a = LANCZOS[0];
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        a += c / (x + i as f64);
    }
    let t = x + LANCZOS_G + 0.5;
    HALF_LN_2PI + (x + 0.5) * t.ln() - t + a.ln()
}

/// `ln Gamma(x)` for `x > 0`.
pub fn log_gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::NonPositiveArgument(x));
    }
    if x == 1.0 || x == 2.0 {
        return Ok(0.0);
    }
    if x < 0.5 {
        // reflection keeps the Lanczos sum in its accurate range
        return Ok((PI / (PI * x).sin()).ln() - lanczos_ln_gamma(1.0 - x));
    }
    Ok(lanczos_ln_gamma(x))
}

fn is_nonpositive_integer(x: f64) -> bool {
    x <= 0.0 && x == x.round()
}

/// `Gamma(x)` on the real line; infinite at the poles.
pub fn gamma(x: f64) -> f64 {
    if is_nonpositive_integer(x) {
        return f64::INFINITY;
    }
    if x < 0.5 {
        return PI / ((PI * x).sin() * gamma(1.0 - x));
    }
    if x == x.round() && x <= 171.0 {
        return (1..x as u32).fold(1.0, |acc, k| acc * k as f64);
    }
    lanczos_ln_gamma(x).exp()
}

/// `1/Gamma(x)`, zero at the poles.
pub fn rgamma(x: f64) -> f64 {
    if is_nonpositive_integer(x) {
        return 0.0;
    }
    if x < 0.5 {
        return (PI * x).sin() * gamma(1.0 - x) / PI;
    }
    1.0 / gamma(x)
}

/// Digamma `psi(x) = Gamma'(x)/Gamma(x)`; NaN at the poles.
pub fn digamma(x: f64) -> f64 {
    if is_nonpositive_integer(x) {
        return f64::NAN;
    }
    if x < 0.0 {
        return digamma(1.0 - x) - PI / (PI * x).tan();
    }
    let mut x = x;
    let mut acc = 0.0;
    while x < 10.0 {
        acc -= 1.0 / x;
        x += 1.0;
    }
    let x2 = 1.0 / (x * x);
    let tail = x2
        * (1.0 / 12.0 - x2 * (1.0 / 120.0 - x2 * (1.0 / 252.0 - x2 * (1.0 / 240.0 - x2 / 132.0))));
    acc + x.ln() - 0.5 / x - tail
}
