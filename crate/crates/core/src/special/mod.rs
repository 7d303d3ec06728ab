//! Pochhammer symbols, gamma-family functions and hypergeometric series.

mod gamma;
mod hypergeometric;
mod summation;

pub use gamma::{digamma, gamma, log_gamma, pochhammer, rgamma};
pub use hypergeometric::{hyp2f1, hyp2f1_split, pfq, pfq_value, HypergeometricSpec};
pub use summation::{sum_series, SeriesSum, DEFAULT_TOL, MAX_TERMS};
