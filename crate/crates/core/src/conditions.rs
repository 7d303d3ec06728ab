//! Admissibility tests: the monotonicity condition on `Pi`, the
//! differential bounds on `t lambda'/lambda`, the per-operator parameter
//! tables and the duality functional `N(h_xi)`.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::params::ParameterSet;
use crate::quadrature::{integrate_with, FixedRule, QuadOptions, Singularity};
use crate::weight::{lambda_cap_with, pi_cap, Weight, WeightKind};

/// Grid endpoints stay this far inside `(0, 1)`.
pub const GRID_EPS: f64 = 1e-4;
/// Relative slack for grid differences in the monotonicity test.
pub const MONOTONE_SLACK: f64 = 1e-9;
/// Tolerance for the differential bound on `t lambda'/lambda`.
pub const BOUND_TOL: f64 = 1e-12;
/// `minimize_n` passes when the minimum is at least `-N_TOL`.
pub const N_TOL: f64 = 1e-6;
pub const DIFFERENTIAL_GRID: usize = 2001;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TheoremId {
    T33Monotone,
    T41GammaPos,
    T42GammaZero,
    OpBound(String),
    NFunctional,
}

impl fmt::Display for TheoremId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TheoremId::T33Monotone => f.write_str("T3_3_monotone"),
            TheoremId::T41GammaPos => f.write_str("T4_1_gamma_pos"),
            TheoremId::T42GammaZero => f.write_str("T4_2_gamma_zero"),
            TheoremId::OpBound(name) => write!(f, "op_bound({name})"),
            TheoremId::NFunctional => f.write_str("N_functional"),
        }
    }
}

impl FromStr for TheoremId {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Ok(match s {
            "T3_3_monotone" => TheoremId::T33Monotone,
            "T4_1_gamma_pos" => TheoremId::T41GammaPos,
            "T4_2_gamma_zero" => TheoremId::T42GammaZero,
            "N_functional" => TheoremId::NFunctional,
            _ => match s
                .strip_prefix("op_bound(")
                .and_then(|r| r.strip_suffix(')'))
            {
                Some(name) => TheoremId::OpBound(name.to_string()),
                None => return Err(format!("unknown theorem id `{s}`")),
            },
        })
    }
}

impl Serialize for TheoremId {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for TheoremId {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Where a margin is attained. Real grids report `z = t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub z: Complex64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<Complex64>,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Diagnostic {
    pub name: String,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionReport {
    pub theorem_id: TheoremId,
    pub passed: bool,
    /// Signed slack; negative means violated.
    pub margin: f64,
    pub witness: Option<Witness>,
    /// `gamma_pos` or `gamma_zero` for the branch-dependent checks.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub branch: Option<String>,
    #[serde(default)]
    pub diagnostics: Vec<Diagnostic>,
}

/// `h_xi(z) = z (1 + A z) / (1 - z)^2` with `A = (eps + 2 xi - 1) / (2 (1 - xi))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HxiEvaluator {
    pub xi: f64,
    pub epsilon: Complex64,
    coefficient: Complex64,
}

impl HxiEvaluator {
    pub fn new(xi: f64, epsilon: Complex64) -> Result<Self> {
        if (epsilon.norm() - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidParameter {
                name: "epsilon",
                value: epsilon.norm(),
                reason: "|epsilon| must be 1",
            });
        }
        if !(xi < 1.0) {
            return Err(Error::InvalidParameter {
                name: "xi",
                value: xi,
                reason: "must be < 1",
            });
        }
        let coefficient = (epsilon + (2.0 * xi - 1.0)) / (2.0 * (1.0 - xi));
        Ok(Self {
            xi,
            epsilon,
            coefficient,
        })
    }

    /// `(eps + 2 xi - 1) / (2 (1 - xi))`.
    pub fn coefficient(&self) -> Complex64 {
        self.coefficient
    }

    pub fn value(&self, z: Complex64) -> Complex64 {
        z * self.over_z(z)
    }

    /// `h_xi(w) / w`; equals 1 at `w = 0`.
    pub fn over_z(&self, w: Complex64) -> Complex64 {
        let d = Complex64::new(1.0, 0.0) - w;
        (1.0 + self.coefficient * w) / (d * d)
    }
}

/// `t^{e-1} Pi(t)` (or `t^{e-1} Lambda_alpha(t)` when `gamma = 0`), the
/// weight carried by both the monotonicity quotient and `N`.
fn pi_weight(w: &Weight, p: &ParameterSet, t: f64) -> Result<f64> {
    if p.gamma_is_zero() {
        if !(p.alpha > 0.0) {
            return Err(Error::PreconditionViolated(
                "gamma = 0 needs alpha > 0".to_string(),
            ));
        }
        let e = p.delta / p.alpha;
        Ok(t.powf(e - 1.0) * lambda_cap_with(w, p.alpha, p.delta, t)?)
    } else {
        Ok(t.powf(p.delta_over_mu() - 1.0) * pi_cap(w, p, t)?)
    }
}

/// Chebyshev points of the first kind on `(lo, hi)`, ascending.
pub fn chebyshev_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let (mid, half) = (0.5 * (lo + hi), 0.5 * (hi - lo));
    (0..n)
        .map(|i| mid - half * (PI * (i as f64 + 0.5) / n as f64).cos())
        .collect()
}

// keeps every k-th sample, enough to plot
fn thin(samples: &[(f64, f64)], max: usize, label: &str) -> Vec<Diagnostic> {
    let step = samples.len().div_ceil(max.max(1)).max(1);
    samples
        .iter()
        .step_by(step)
        .map(|&(t, v)| Diagnostic {
            name: format!("{label}({t:.6})"),
            value: v,
        })
        .collect()
}

/// `k(t) = t^{e-1} Pi(t) / ((1+t)(1-t)^{3 - 2 delta (1 - zeta)})` is decreasing
/// on a Chebyshev grid in `(GRID_EPS, 1 - GRID_EPS)`.
pub fn check_monotone_t33(
    w: &Weight,
    p: &ParameterSet,
    grid_size: usize,
) -> Result<ConditionReport> {
    if grid_size < 2 {
        return Err(Error::InvalidParameter {
            name: "grid_size",
            value: grid_size as f64,
            reason: "need at least two grid points",
        });
    }
    let expo = p.decreasing_exponent();
    let grid = chebyshev_grid(GRID_EPS, 1.0 - GRID_EPS, grid_size);
    let mut samples = Vec::with_capacity(grid.len());
    for &t in &grid {
        let k = pi_weight(w, p, t)? / ((1.0 + t) * (1.0 - t).powf(expo));
        samples.push((t, k));
    }
    let scale = samples.iter().map(|s| s.1.abs()).fold(0.0, f64::max);
    let (mut worst, mut at) = (f64::NEG_INFINITY, 0);
    for i in 1..samples.len() {
        let d = samples[i].1 - samples[i - 1].1;
        if d > worst {
            worst = d;
            at = i;
        }
    }
    let margin = if scale > 0.0 { -worst / scale } else { 0.0 };
    Ok(ConditionReport {
        theorem_id: TheoremId::T33Monotone,
        passed: margin >= -MONOTONE_SLACK,
        margin,
        witness: Some(Witness {
            z: Complex64::new(samples[at].0, 0.0),
            epsilon: None,
            value: samples[at].1,
        }),
        branch: Some(branch_name(p).to_string()),
        diagnostics: thin(&samples, 33, "k"),
    })
}

fn branch_name(p: &ParameterSet) -> &'static str {
    if p.gamma_is_zero() {
        "gamma_zero"
    } else {
        "gamma_pos"
    }
}

/// `alpha in (0, delta/3] or [delta, inf)`.
fn alpha_in_gamma_zero_range(alpha: f64, delta: f64) -> bool {
    (alpha > 0.0 && alpha <= delta / 3.0) || alpha >= delta
}

/// `sup t lambda'/lambda <= 5 - delta/mu - delta/nu` (`gamma > 0`) or
/// `<= 3 - delta/alpha` (`gamma = 0`, `xi = 0`) over a 2001-point grid.
pub fn check_differential_bound(w: &Weight, p: &ParameterSet) -> Result<ConditionReport> {
    let (id, bound) = if p.gamma_is_zero() {
        if !alpha_in_gamma_zero_range(p.alpha, p.delta) {
            return Err(Error::PreconditionViolated(format!(
                "alpha = {} must lie in (0, delta/3] or [delta, inf) with delta = {}",
                p.alpha, p.delta
            )));
        }
        if p.xi != 0.0 {
            return Err(Error::NotCovered(format!(
                "no gamma = 0 differential bound for xi = {} > 0",
                p.xi
            )));
        }
        (TheoremId::T42GammaZero, 3.0 - p.delta / p.alpha)
    } else {
        if !(1.0 <= p.delta && p.delta <= p.mu.min(p.nu)) {
            return Err(Error::PreconditionViolated(format!(
                "need 1 <= delta <= min(mu, nu); delta = {}, mu = {}, nu = {}",
                p.delta, p.mu, p.nu
            )));
        }
        (
            TheoremId::T41GammaPos,
            5.0 - p.delta_over_mu() - p.delta_over_nu(),
        )
    };
    let n = DIFFERENTIAL_GRID;
    let mut sup = f64::NEG_INFINITY;
    let mut at = 0.0;
    let mut samples = Vec::with_capacity(n);
    for i in 1..=n {
        let t = i as f64 / (n + 1) as f64;
        let v = w.log_derivative(t);
        if v.is_nan() {
            return Err(Error::PreconditionViolated(format!(
                "t lambda'/lambda undefined at t = {t}"
            )));
        }
        if v > sup {
            sup = v;
            at = t;
        }
        samples.push((t, v));
    }
    let margin = bound - sup;
    let mut diagnostics = vec![
        Diagnostic {
            name: "bound".to_string(),
            value: bound,
        },
        Diagnostic {
            name: "sup".to_string(),
            value: sup,
        },
    ];
    diagnostics.extend(thin(&samples, 21, "t_dlog_lambda"));
    Ok(ConditionReport {
        theorem_id: id,
        passed: margin >= -BOUND_TOL,
        margin,
        witness: Some(Witness {
            z: Complex64::new(at, 0.0),
            epsilon: None,
            value: sup,
        }),
        branch: Some(branch_name(p).to_string()),
        diagnostics,
    })
}

// one inequality of an operator table: slack >= 0 (or > 0 when strict)
struct Constraint {
    name: &'static str,
    slack: f64,
    strict: bool,
}

impl Constraint {
    fn ge(name: &'static str, slack: f64) -> Self {
        Self {
            name,
            slack,
            strict: false,
        }
    }

    fn gt(name: &'static str, slack: f64) -> Self {
        Self {
            name,
            slack,
            strict: true,
        }
    }

    fn holds(&self) -> bool {
        if self.strict {
            self.slack > 0.0
        } else {
            self.slack >= 0.0
        }
    }
}

// slack of x in [lo, hi]
fn interval_slack(x: f64, lo: f64, hi: f64) -> f64 {
    (x - lo).min(hi - x)
}

/// Pure arithmetic check of the operator's stated parameter inequalities.
///
/// Strict inequalities must hold strictly, so a strict constraint with zero
/// slack fails with `margin = 0`.
pub fn check_operator_bounds(kind: &WeightKind, p: &ParameterSet) -> Result<ConditionReport> {
    let gamma_zero = p.gamma_is_zero();
    let (d, dm, dn) = (p.delta, p.delta / p.mu, p.delta / p.nu);
    let five = 5.0 - dm - dn;
    let six = 6.0 - dm - dn;
    let mut cs = vec![
        Constraint::ge("delta >= 1", d - 1.0),
        Constraint::ge("xi in [0, 1/2]", interval_slack(p.xi, 0.0, 0.5)),
    ];
    // branch preconditions on the roots
    let delta_le_alpha = Constraint::ge("delta <= alpha", p.alpha - d);
    let delta_le_min = Constraint::ge("delta <= min(mu, nu)", p.mu.min(p.nu) - d);
    match *kind {
        WeightKind::Bernardi { c } => bernardi_constraints(&mut cs, c, p),
        WeightKind::Uniform => bernardi_constraints(&mut cs, 0.0, p),
        WeightKind::Komatu { k, p: pp } => {
            cs.push(Constraint::gt("k > -1", k + 1.0));
            if gamma_zero {
                cs.push(delta_le_alpha);
                cs.push(Constraint::ge("p >= 2", pp - 2.0));
                cs.push(Constraint::ge("k <= 0", -k));
            } else {
                cs.push(delta_le_min);
                cs.push(Constraint::ge("p >= 1", pp - 1.0));
                cs.push(Constraint::ge("k <= 5 - delta/mu - delta/nu", five - k));
            }
        }
        WeightKind::Hohlov { a, b, c } => {
            cs.push(Constraint::gt("a > 0", a));
            cs.push(Constraint::gt("b > 0", b));
            cs.push(Constraint::gt("c > 0", c));
            if gamma_zero {
                cs.push(delta_le_alpha);
                cs.push(Constraint::ge("c - a - b >= 1", c - a - b - 1.0));
                cs.push(Constraint::ge("b <= 1", 1.0 - b));
            } else {
                cs.push(delta_le_min);
                cs.push(Constraint::ge("c - a - b >= 0", c - a - b));
                cs.push(Constraint::ge("b <= 6 - delta/mu - delta/nu", six - b));
            }
        }
        WeightKind::CarlsonShaffer { b, c } => {
            cs.push(Constraint::gt("b > 0", b));
            cs.push(Constraint::gt("c > 0", c));
            if gamma_zero {
                cs.push(delta_le_alpha);
                cs.push(Constraint::ge("c - b >= 2", c - b - 2.0));
                cs.push(Constraint::ge("b <= 1", 1.0 - b));
            } else {
                cs.push(delta_le_min);
                cs.push(Constraint::ge("c - b >= 1", c - b - 1.0));
                cs.push(Constraint::ge("b <= 6 - delta/mu - delta/nu", six - b));
            }
        }
        WeightKind::TwoParam { a, b } => {
            // the weight is symmetric in (a, b); the table is stated for b <= a
            let (lo, hi) = if b <= a { (b, a) } else { (a, b) };
            cs.push(Constraint::gt("b > -1", lo + 1.0));
            let equal = hi - lo < crate::weight::TWO_PARAM_EQUAL_TOL;
            if gamma_zero {
                cs.push(delta_le_alpha);
                if equal {
                    cs.push(Constraint::ge("b = a <= 0", -hi));
                }
            } else {
                cs.push(delta_le_min);
                if equal {
                    cs.push(Constraint::ge(
                        "b = a <= 5 - delta/mu - delta/nu",
                        five - hi,
                    ));
                } else {
                    cs.push(Constraint::ge(
                        "b in [0, 5 - delta/mu - delta/nu]",
                        interval_slack(lo, 0.0, five),
                    ));
                }
            }
        }
        WeightKind::AliSingh { k } => {
            if gamma_zero {
                cs.push(delta_le_alpha);
                let slack = interval_slack(k, 2.0 / 3.0, 1.0).max(k - 3.0);
                cs.push(Constraint::ge("k in [2/3, 1] or [3, inf)", slack));
            } else {
                cs.push(delta_le_min);
                cs.push(Constraint::ge("k >= 0", k));
            }
        }
        WeightKind::Custom(_) => return Err(Error::UnknownOperator(kind.name().to_string())),
    }
    let passed = cs.iter().all(Constraint::holds);
    let margin = cs.iter().map(|c| c.slack).fold(f64::INFINITY, f64::min);
    let diagnostics = cs
        .iter()
        .map(|c| Diagnostic {
            name: c.name.to_string(),
            value: c.slack,
        })
        .collect();
    Ok(ConditionReport {
        theorem_id: TheoremId::OpBound(kind.name().to_string()),
        passed,
        margin,
        witness: None,
        branch: Some(branch_name(p).to_string()),
        diagnostics,
    })
}

fn bernardi_constraints(cs: &mut Vec<Constraint>, c: f64, p: &ParameterSet) {
    cs.push(Constraint::gt("c > -1", c + 1.0));
    if p.gamma_is_zero() {
        let (a, d) = (p.alpha, p.delta);
        let range = a.min(d / 3.0 - a).max(a - d);
        cs.push(Constraint::ge(
            "alpha in (0, delta/3] or [delta, inf)",
            range,
        ));
        cs.push(Constraint::ge("xi = 0", -p.xi.abs()));
        cs.push(Constraint::ge("c <= 3 - delta/alpha", 3.0 - d / a - c));
    } else {
        cs.push(Constraint::ge(
            "delta <= min(mu, nu)",
            p.mu.min(p.nu) - p.delta,
        ));
        cs.push(Constraint::ge(
            "c <= 5 - delta/mu - delta/nu",
            5.0 - p.delta_over_mu() - p.delta_over_nu() - c,
        ));
    }
}

/// Integrand factor of `N` that does not depend on `z` or `epsilon`.
fn n_kernel(xi: f64, t: f64) -> f64 {
    (1.0 - xi * (1.0 + t)) / ((1.0 - xi) * (1.0 + t) * (1.0 + t))
}

/// `N(h_xi) = int_0^1 t^{e-1} Pi(t) (Re h_xi(tz)/(tz) - (1 - xi(1+t))/((1-xi)(1+t)^2)) dt`.
pub fn eval_n_functional(
    w: &Weight,
    p: &ParameterSet,
    z: Complex64,
    epsilon: Complex64,
) -> Result<f64> {
    if !(z.norm() < 1.0) {
        return Err(Error::InvalidParameter {
            name: "z",
            value: z.norm(),
            reason: "|z| must be < 1",
        });
    }
    let h = HxiEvaluator::new(p.xi, epsilon)?;
    let failure = std::cell::RefCell::new(None);
    // the bracket is O(t) at 0, so the integrand vanishes there and the
    // shallow node set is enough
    let opts = QuadOptions::tol(1e-11)
        .with_rel(1e-10)
        .with_singularity(Singularity::None);
    let q = integrate_with(
        |t| match pi_weight(w, p, t) {
            Ok(pw) => pw * (h.over_z(z * t).re - n_kernel(p.xi, t)),
            Err(e) => {
                failure.borrow_mut().get_or_insert(e);
                f64::NAN
            }
        },
        0.0,
        1.0,
        &opts,
    );
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    Ok(q?.value)
}

/// Grid for the search over `z` and `epsilon`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NGrid {
    pub radii: Vec<f64>,
    pub angles: usize,
    pub epsilon_angles: usize,
}

impl Default for NGrid {
    fn default() -> Self {
        Self {
            radii: chebyshev_radii(0.995, 24),
            angles: 64,
            epsilon_angles: 16,
        }
    }
}

/// `n` radii in `(0, r_max]`, clustered toward `r_max`.
pub fn chebyshev_radii(r_max: f64, n: usize) -> Vec<f64> {
    (1..=n)
        .map(|i| r_max * (0.5 * PI * i as f64 / n as f64).sin())
        .collect()
}

/// `N` with `t^{e-1} Pi(t)` tabulated once on a fixed tanh-sinh rule, for
/// repeated evaluation over many `(z, epsilon)`.
#[derive(Debug, Clone)]
pub struct NFunctional {
    xi: f64,
    rule: FixedRule,
    // weight times t^{e-1} Pi(t) at each node
    weighted: Vec<f64>,
    kernel_integral: f64,
}

impl NFunctional {
    pub fn new(w: &Weight, p: &ParameterSet, level: u32) -> Result<Self> {
        let rule = FixedRule::tanh_sinh(0.0, 1.0, level, Singularity::None);
        let mut weighted = Vec::with_capacity(rule.len());
        let mut kernel_integral = 0.0;
        for (&t, &wt) in rule.nodes.iter().zip(&rule.weights) {
            let v = wt * pi_weight(w, p, t)?;
            kernel_integral += v * n_kernel(p.xi, t);
            weighted.push(v);
        }
        Ok(Self {
            xi: p.xi,
            rule,
            weighted,
            kernel_integral,
        })
    }

    pub fn eval(&self, z: Complex64, epsilon: Complex64) -> Result<f64> {
        let h = HxiEvaluator::new(self.xi, epsilon)?;
        let first: f64 = self
            .rule
            .nodes
            .iter()
            .zip(&self.weighted)
            .map(|(&t, &v)| v * h.over_z(z * t).re)
            .sum();
        Ok(first - self.kernel_integral)
    }
}

/// Minimum of `N` over `radii x angles x epsilon angles`; `z = 0` is skipped.
pub fn minimize_n(w: &Weight, p: &ParameterSet, grid: &NGrid) -> Result<ConditionReport> {
    if grid.radii.is_empty() || grid.angles == 0 || grid.epsilon_angles == 0 {
        return Err(Error::InvalidParameter {
            name: "grid",
            value: 0.0,
            reason: "radii, angles and epsilon angles must be nonempty",
        });
    }
    if let Some(&r) = grid.radii.iter().find(|&&r| !(0.0..1.0).contains(&r)) {
        return Err(Error::InvalidParameter {
            name: "radius",
            value: r,
            reason: "radii must lie in [0, 1)",
        });
    }
    let n = NFunctional::new(w, p, 7)?;
    let mut best: Option<Witness> = None;
    for &r in &grid.radii {
        if r == 0.0 {
            continue;
        }
        for j in 0..grid.angles {
            let z = Complex64::from_polar(r, 2.0 * PI * j as f64 / grid.angles as f64);
            for k in 0..grid.epsilon_angles {
                let eps =
                    Complex64::from_polar(1.0, 2.0 * PI * k as f64 / grid.epsilon_angles as f64);
                let v = n.eval(z, eps)?;
                if best.is_none_or(|b| v < b.value) {
                    best = Some(Witness {
                        z,
                        epsilon: Some(eps),
                        value: v,
                    });
                }
            }
        }
    }
    let margin = best.map_or(0.0, |b| b.value);
    Ok(ConditionReport {
        theorem_id: TheoremId::NFunctional,
        passed: margin >= -N_TOL,
        margin,
        witness: best,
        branch: Some(branch_name(p).to_string()),
        diagnostics: Vec::new(),
    })
}
