//! Grid checks on the disk: starlikeness of `G`, membership in the source
//! class, the third-order functional and the sharpness identity at `z = -1`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::conditions::chebyshev_radii;
use crate::error::{Error, Result};
use crate::params::ParameterSet;
use crate::series::{log_derivative_fraction, series_div, series_pow, PowerSeries};

/// Interior checks pass down to `-INTERIOR_TOL`.
pub const INTERIOR_TOL: f64 = 1e-6;
/// Slack for configurations that are sharp on the boundary.
pub const BOUNDARY_TOL: f64 = 1e-3;
/// Largest admissible series tail at the outer radius.
pub const MEMBERSHIP_TAIL: f64 = 1e-8;
pub const PHI_GRID: usize = 360;
/// `R(r)` must end below `SHARPNESS_FACTOR * (1 - r)`.
pub const SHARPNESS_FACTOR: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Quantity {
    #[serde(rename = "starlike_margin")]
    StarlikeMargin,
    #[serde(rename = "W_membership")]
    WMembership,
    #[serde(rename = "third_order")]
    ThirdOrder,
    #[serde(rename = "sharpness")]
    Sharpness,
}

/// Polar grid: every radius with `angles` equally spaced arguments.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiskGrid {
    pub radii: Vec<f64>,
    pub angles: usize,
}

impl Default for DiskGrid {
    fn default() -> Self {
        Self {
            radii: chebyshev_radii(0.99, 24),
            angles: 128,
        }
    }
}

impl DiskGrid {
    pub fn new(radii: Vec<f64>, angles: usize) -> Result<Self> {
        if radii.is_empty() || angles == 0 {
            return Err(Error::InvalidParameter {
                name: "grid",
                value: 0.0,
                reason: "radii and angles must be nonempty",
            });
        }
        if let Some(&r) = radii.iter().find(|&&r| !(r > 0.0 && r < 1.0)) {
            return Err(Error::InvalidParameter {
                name: "radius",
                value: r,
                reason: "radii must lie in (0, 1)",
            });
        }
        Ok(Self { radii, angles })
    }

    pub fn r_max(&self) -> f64 {
        self.radii.iter().copied().fold(0.0, f64::max)
    }

    pub fn points(&self) -> impl Iterator<Item = (f64, f64, Complex64)> + '_ {
        self.radii.iter().flat_map(move |&r| {
            (0..self.angles).map(move |j| {
                let theta = 2.0 * PI * j as f64 / self.angles as f64;
                (r, theta, Complex64::from_polar(r, theta))
            })
        })
    }
}

/// One grid value, for CSV export.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSample {
    pub r: f64,
    pub theta: f64,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub quantity: Quantity,
    /// `None` when the grid hit a zero of a denominator.
    pub min_value: Option<f64>,
    pub argmin_z: Complex64,
    pub grid_spec: DiskGrid,
    pub passed: bool,
    pub tolerance: f64,
    /// Rotation attaining the membership margin.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phi: Option<f64>,
    /// `R(r)` along the sharpness ray.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub profile: Vec<f64>,
    #[serde(skip)]
    pub samples: Vec<GridSample>,
}

impl VerificationReport {
    fn from_min(
        quantity: Quantity,
        grid: &DiskGrid,
        tolerance: f64,
        samples: Vec<GridSample>,
    ) -> Self {
        let best = samples
            .iter()
            .copied()
            .reduce(|a, b| if b.value < a.value { b } else { a });
        let (min_value, argmin_z) = match best {
            Some(s) => (s.value, Complex64::from_polar(s.r, s.theta)),
            None => (f64::NAN, Complex64::new(0.0, 0.0)),
        };
        Self {
            quantity,
            min_value: Some(min_value),
            argmin_z,
            grid_spec: grid.clone(),
            passed: min_value >= -tolerance,
            tolerance,
            phi: None,
            profile: Vec::new(),
            samples,
        }
    }

    /// `r,theta,value` lines with a header.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("r,theta,value\n");
        for s in &self.samples {
            out.push_str(&format!("{},{},{}\n", s.r, s.theta, s.value));
        }
        out
    }
}

fn require_normalized(g: &PowerSeries) -> Result<()> {
    let (c0, c1) = (g.coeff(0), g.coeff(1));
    if c0.norm() > 1e-12 {
        return Err(Error::NonZeroConstantTerm {
            re: c0.re,
            im: c0.im,
        });
    }
    if (c1 - 1.0).norm() > 1e-12 {
        return Err(Error::InvalidParameter {
            name: "G'(0)",
            value: c1.norm(),
            reason: "series must start z + ...",
        });
    }
    Ok(())
}

/// `min Re(z G'/G) - xi` over the grid.
pub fn starlike_margin(
    g: &PowerSeries,
    xi: f64,
    grid: &DiskGrid,
    tolerance: f64,
) -> Result<VerificationReport> {
    require_normalized(g)?;
    let mut samples = Vec::with_capacity(grid.radii.len() * grid.angles);
    for (r, theta, z) in grid.points() {
        match log_derivative_fraction(g, z) {
            Ok(q) => samples.push(GridSample {
                r,
                theta,
                value: q.re - xi,
            }),
            Err(Error::ZeroDenominator { .. }) => {
                let mut rep = VerificationReport::from_min(
                    Quantity::StarlikeMargin,
                    grid,
                    tolerance,
                    samples,
                );
                rep.min_value = None;
                rep.argmin_z = z;
                rep.passed = false;
                return Ok(rep);
            }
            Err(e) => return Err(e),
        }
    }
    Ok(VerificationReport::from_min(
        Quantity::StarlikeMargin,
        grid,
        tolerance,
        samples,
    ))
}

/// `H` from the monomial-shift form: `h_n = (n mu + delta)(n nu + delta)/delta^2 p_n`.
pub fn h_from_coefficients(fz_delta: &PowerSeries, p: &ParameterSet) -> PowerSeries {
    let d = p.delta;
    PowerSeries::from_fn(fz_delta.order(), |n| {
        let nf = n as f64;
        fz_delta.coeff(n) * ((nf * p.mu + d) * (nf * p.nu + d) / (d * d))
    })
}

/// `H` assembled from `(f/z)^delta`, `z f'/f` and `z f''/f'` as in the class
/// definition.
pub fn h_from_definition(fz_delta: &PowerSeries, p: &ParameterSet) -> Result<PowerSeries> {
    let (alpha, gamma, delta) = (p.alpha, p.gamma, p.delta);
    let order = fz_delta.order();
    let f_over_z = series_pow(fz_delta, 1.0 / delta)?;
    let f = f_over_z.shift_up();
    let one = PowerSeries::one(order);
    // z f'/f = 1 + z (f/z)'/(f/z)
    let q = one.add(&series_div(&f_over_z.theta(), &f_over_z)?);
    let fp = f.derivative();
    // 1 + z f''/f'
    let r = one.add(&series_div(&fp.theta(), &fp)?);
    let bracket = q
        .scale(Complex64::new(gamma * (1.0 - 1.0 / delta), 0.0))
        .add(&r.scale(Complex64::new(gamma / delta, 0.0)))
        .add(&one.scale(Complex64::new(alpha - 3.0 * gamma, 0.0)));
    let first = fz_delta.scale(Complex64::new(1.0 - alpha + 2.0 * gamma, 0.0));
    Ok(first.add(&bracket.mul(fz_delta).mul(&q)).truncate(order))
}

/// Membership of `f` in the source class: some rotation `phi` of the
/// `phi_grid` makes `Re e^{i phi}(H - beta)` strictly positive on the grid.
pub fn w_membership(
    fz_delta: &PowerSeries,
    p: &ParameterSet,
    beta: f64,
    grid: &DiskGrid,
    phi_grid: usize,
) -> Result<VerificationReport> {
    if !(beta < 1.0) {
        return Err(Error::InvalidParameter {
            name: "beta",
            value: beta,
            reason: "the class needs beta < 1",
        });
    }
    if phi_grid == 0 {
        return Err(Error::InvalidParameter {
            name: "phi_grid",
            value: 0.0,
            reason: "need at least one rotation",
        });
    }
    let h = h_from_coefficients(fz_delta, p);
    let r_max = grid.r_max();
    let tail = h.tail_bound(r_max);
    if tail > MEMBERSHIP_TAIL {
        return Err(Error::TailTooLarge {
            tail,
            radius: r_max,
        });
    }
    let values: Vec<(f64, f64, Complex64)> = grid
        .points()
        .map(|(r, theta, z)| (r, theta, h.eval(z) - beta))
        .collect();
    let mut best: Option<(f64, f64, usize)> = None;
    for k in 0..phi_grid {
        let phi = 2.0 * PI * k as f64 / phi_grid as f64;
        let rot = Complex64::from_polar(1.0, phi);
        let (at, m) = values
            .iter()
            .enumerate()
            .map(|(i, v)| (i, (rot * v.2).re))
            .fold((0, f64::INFINITY), |a, b| if b.1 < a.1 { b } else { a });
        if best.is_none_or(|b| m > b.0) {
            best = Some((m, phi, at));
        }
    }
    let (m, phi, at) = best.expect("phi grid is nonempty");
    let rot = Complex64::from_polar(1.0, phi);
    Ok(VerificationReport {
        quantity: Quantity::WMembership,
        min_value: Some(m),
        argmin_z: Complex64::from_polar(values[at].0, values[at].1),
        grid_spec: grid.clone(),
        passed: m > 0.0,
        tolerance: 0.0,
        phi: Some(phi),
        profile: Vec::new(),
        samples: values
            .iter()
            .map(|&(r, theta, v)| GridSample {
                r,
                theta,
                value: (rot * v).re,
            })
            .collect(),
    })
}

/// Coefficients of `u' + (1/delta)(alpha - gamma(1 - 1/delta)) z u'' + (gamma/delta^2) z^2 u'''`
/// with `u = z (Fcal/z)^delta`.
pub fn third_order_series(fcal: &PowerSeries, p: &ParameterSet) -> Result<PowerSeries> {
    require_normalized(fcal)?;
    let (alpha, gamma, delta) = (p.alpha, p.gamma, p.delta);
    let u = series_pow(&fcal.shift_down()?, delta)?.shift_up();
    let a1 = (alpha - gamma * (1.0 - 1.0 / delta)) / delta;
    let a2 = gamma / (delta * delta);
    Ok(PowerSeries::from_fn(u.order() - 1, |m| {
        // z^m collects n = m + 1
        let n = (m + 1) as f64;
        let k = m as f64;
        u.coeff(m + 1) * (n * (1.0 + a1 * k + a2 * k * (k - 1.0)))
    }))
}

/// `min Re(third-order expression) - beta` over the grid.
pub fn third_order_functional(
    fcal: &PowerSeries,
    p: &ParameterSet,
    beta: f64,
    grid: &DiskGrid,
    tolerance: f64,
) -> Result<VerificationReport> {
    if fcal.order() < 16 {
        return Err(Error::InvalidParameter {
            name: "order",
            value: fcal.order() as f64,
            reason: "need at least 16 coefficients",
        });
    }
    let l = third_order_series(fcal, p)?;
    let samples = grid
        .points()
        .map(|(r, theta, z)| GridSample {
            r,
            theta,
            value: l.eval(z).re - beta,
        })
        .collect();
    Ok(VerificationReport::from_min(
        Quantity::ThirdOrder,
        grid,
        tolerance,
        samples,
    ))
}

/// `R(r) = |z G'(z) - xi G(z)|` at `z = -r`; passes when `R` decreases along
/// `radii_to_one` and ends below `10 (1 - r_final)`.
pub fn sharpness_probe(
    g: &PowerSeries,
    xi: f64,
    radii_to_one: &[f64],
) -> Result<VerificationReport> {
    if radii_to_one.is_empty() || radii_to_one.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidParameter {
            name: "radii_to_one",
            value: radii_to_one.len() as f64,
            reason: "radii must be nonempty and increasing",
        });
    }
    let grid = DiskGrid::new(radii_to_one.to_vec(), 1)?;
    let profile: Vec<f64> = radii_to_one
        .iter()
        .map(|&r| {
            let z = Complex64::new(-r, 0.0);
            (z * g.eval_derivative(z) - xi * g.eval(z)).norm()
        })
        .collect();
    let r_final = *radii_to_one.last().unwrap();
    let r_end = *profile.last().unwrap();
    let limit = SHARPNESS_FACTOR * (1.0 - r_final);
    let decreasing = profile.windows(2).all(|w| w[1] < w[0]);
    Ok(VerificationReport {
        quantity: Quantity::Sharpness,
        min_value: Some(limit - r_end),
        argmin_z: Complex64::new(-r_final, 0.0),
        grid_spec: grid,
        passed: decreasing && r_end < limit,
        tolerance: 0.0,
        phi: None,
        samples: radii_to_one
            .iter()
            .zip(&profile)
            .map(|(&r, &v)| GridSample {
                r,
                theta: PI,
                value: v,
            })
            .collect(),
        profile,
    })
}
