//! Shared fixtures for the benchmarks.

use starlike_core::transform::{apply_transform, g_series, make_member, SHARPNESS_ORDER};
use starlike_core::{ParameterSet, PowerSeries, TestFunctionSpec, Weight};

/// `alpha = 1, gamma = 0, delta = 1, zeta = 0`.
pub fn gamma_zero() -> ParameterSet {
    ParameterSet::new(1.0, 0.0, 1.0, 0.0).expect("valid parameters")
}

/// `mu = nu = delta = 1, xi = 0`.
pub fn gamma_one() -> ParameterSet {
    ParameterSet::from_kernel(1.0, 1.0, 1.0, 0.0).expect("valid parameters")
}

pub fn bernardi(c: f64) -> Weight {
    Weight::bernardi(c).expect("valid weight")
}

/// Series `1 + sum c_n z^n` with small deterministic coefficients.
pub fn smooth_series(order: usize) -> PowerSeries {
    let v: Vec<f64> = (0..=order)
        .map(|n| {
            if n == 0 {
                1.0
            } else {
                0.4 * (0.5f64).powi(n as i32) * (n as f64).cos()
            }
        })
        .collect();
    PowerSeries::from_real(&v).expect("finite coefficients")
}

/// Image `G` of the extremal member under the uniform weight.
pub fn extremal_image(beta: f64) -> PowerSeries {
    let p = gamma_one();
    let m = make_member(
        &TestFunctionSpec::extremal(beta, p).expect("valid spec"),
        SHARPNESS_ORDER,
    );
    g_series(&apply_transform(&m, &Weight::uniform()).expect("unit constant term"))
}
