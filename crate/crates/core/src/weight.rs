//! Weight functions `lambda(t)` on `(0, 1)` with unit mass, and the
//! cumulative transforms `Lambda_nu^delta` and `Pi_{mu,nu}^delta` built from them.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::ParameterSet;
use crate::quadrature::{integrate_with_complement, QuadOptions, Singularity};
use crate::special::{hyp2f1_split, log_gamma, pochhammer};

/// Branch switch for the two-parameter weight.
pub const TWO_PARAM_EQUAL_TOL: f64 = 1e-9;
const QUAD_TOL: f64 = 1e-13;
const QUAD_REL: f64 = 1e-12;

type RealFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A user-supplied weight: `lambda`, `lambda'` and `lambda''` before normalization.
#[derive(Clone)]
pub struct CustomWeight {
    pub name: String,
    pub lambda: RealFn,
    pub d1: RealFn,
    pub d2: RealFn,
    pub singularity: Singularity,
}

impl CustomWeight {
    pub fn new(
        name: impl Into<String>,
        lambda: impl Fn(f64) -> f64 + Send + Sync + 'static,
        d1: impl Fn(f64) -> f64 + Send + Sync + 'static,
        d2: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            name: name.into(),
            lambda: Arc::new(lambda),
            d1: Arc::new(d1),
            d2: Arc::new(d2),
            singularity: Singularity::Both,
        }
    }
}

impl fmt::Debug for CustomWeight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CustomWeight")
            .field("name", &self.name)
            .finish_non_exhaustive()
    }
}

#[derive(Debug, Clone)]
pub enum WeightKind {
    Bernardi { c: f64 },
    Komatu { k: f64, p: f64 },
    Hohlov { a: f64, b: f64, c: f64 },
    CarlsonShaffer { b: f64, c: f64 },
    TwoParam { a: f64, b: f64 },
    AliSingh { k: f64 },
    Uniform,
    Custom(CustomWeight),
}

impl WeightKind {
    pub fn name(&self) -> &'static str {
        match self {
            WeightKind::Bernardi { .. } => "bernardi",
            WeightKind::Komatu { .. } => "komatu",
            WeightKind::Hohlov { .. } => "hohlov",
            WeightKind::CarlsonShaffer { .. } => "carlson_shaffer",
            WeightKind::TwoParam { .. } => "two_param",
            WeightKind::AliSingh { .. } => "ali_singh",
            WeightKind::Uniform => "uniform",
            WeightKind::Custom(_) => "custom",
        }
    }

    pub fn params(&self) -> BTreeMap<String, f64> {
        let pairs: Vec<(&str, f64)> = match *self {
            WeightKind::Bernardi { c } => vec![("c", c)],
            WeightKind::Komatu { k, p } => vec![("k", k), ("p", p)],
            WeightKind::Hohlov { a, b, c } => vec![("a", a), ("b", b), ("c", c)],
            WeightKind::CarlsonShaffer { b, c } => vec![("b", b), ("c", c)],
            WeightKind::TwoParam { a, b } => vec![("a", a), ("b", b)],
            WeightKind::AliSingh { k } => vec![("k", k)],
            WeightKind::Uniform | WeightKind::Custom(_) => vec![],
        };
        pairs.into_iter().map(|(k, v)| (k.to_string(), v)).collect()
    }
}

/// JSON form of a catalog weight: `{"kind": "...", "params": {...}}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightSpec {
    pub kind: String,
    #[serde(default)]
    pub params: BTreeMap<String, f64>,
}

impl WeightSpec {
    pub fn new(kind: &str, params: &[(&str, f64)]) -> Self {
        Self {
            kind: kind.to_string(),
            params: params.iter().map(|&(k, v)| (k.to_string(), v)).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightWarning {
    pub message: String,
    pub at: f64,
    pub value: f64,
}

/// A normalized weight. Build with [`make_weight`] or [`Weight::custom`].
#[derive(Debug, Clone)]
pub struct Weight {
    kind: WeightKind,
    norm: f64,
    warnings: Vec<WeightWarning>,
}

fn out_of_range(msg: String) -> Error {
    Error::ParamOutOfRange(msg)
}

fn finite(name: &str, v: f64) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(out_of_range(format!("{name} = {v} is not finite")))
    }
}

/// Validates catalog parameters and computes the normalization constant.
pub fn make_weight(kind: WeightKind) -> Result<Weight> {
    let norm = match kind {
        WeightKind::Bernardi { c } => {
            if !(finite("c", c)? > -1.0) {
                return Err(out_of_range(format!("bernardi needs c > -1, got {c}")));
            }
            1.0 + c
        }
        WeightKind::Uniform => 1.0,
        WeightKind::Komatu { k, p } => {
            if !(finite("k", k)? > -1.0) {
                return Err(out_of_range(format!("komatu needs k > -1, got {k}")));
            }
            if !(finite("p", p)? >= 1.0) {
                return Err(out_of_range(format!("komatu needs p >= 1, got {p}")));
            }
            (p * (1.0 + k).ln() - log_gamma(p)?).exp()
        }
        WeightKind::Hohlov { a, b, c } => {
            for (n, v) in [("a", a), ("b", b), ("c", c)] {
                if !(finite(n, v)? > 0.0) {
                    return Err(out_of_range(format!("hohlov needs {n} > 0, got {v}")));
                }
            }
            if !(c - a - b > -1.0) {
                return Err(out_of_range(format!(
                    "hohlov needs c - a - b > -1, got {}",
                    c - a - b
                )));
            }
            (log_gamma(c)? - log_gamma(a)? - log_gamma(b)? - log_gamma(c - a - b + 1.0)?).exp()
        }
        WeightKind::CarlsonShaffer { b, c } => {
            if !(finite("b", b)? > 0.0) {
                return Err(out_of_range(format!(
                    "carlson_shaffer needs b > 0, got {b}"
                )));
            }
            if !(finite("c", c)? > b) {
                return Err(out_of_range(format!(
                    "carlson_shaffer needs c > b, got b = {b}, c = {c}"
                )));
            }
            (log_gamma(c)? - log_gamma(b)? - log_gamma(c - b)?).exp()
        }
        WeightKind::TwoParam { a, b } => {
            for (n, v) in [("a", a), ("b", b)] {
                if !(finite(n, v)? > -1.0) {
                    return Err(out_of_range(format!("two_param needs {n} > -1, got {v}")));
                }
            }
            (a + 1.0) * (b + 1.0)
        }
        WeightKind::AliSingh { k } => {
            if !(0.0..1.0).contains(&finite("k", k)?) {
                return Err(out_of_range(format!("ali_singh needs 0 <= k < 1, got {k}")));
            }
            (1.0 - k) * (3.0 - k) / 2.0
        }
        WeightKind::Custom(_) => {
            return Err(out_of_range(
                "custom weights are built with Weight::custom".to_string(),
            ))
        }
    };
    let mut w = Weight {
        kind,
        norm,
        warnings: Vec::new(),
    };
    if let WeightKind::Hohlov { a, .. } = w.kind {
        if a > 1.0 {
            w.warnings = w.positivity_scan(1001);
        }
    }
    Ok(w)
}

impl Weight {
    pub fn bernardi(c: f64) -> Result<Self> {
        make_weight(WeightKind::Bernardi { c })
    }

    pub fn uniform() -> Self {
        make_weight(WeightKind::Uniform).expect("uniform weight has no parameters")
    }

    pub fn komatu(k: f64, p: f64) -> Result<Self> {
        make_weight(WeightKind::Komatu { k, p })
    }

    pub fn hohlov(a: f64, b: f64, c: f64) -> Result<Self> {
        make_weight(WeightKind::Hohlov { a, b, c })
    }

    pub fn carlson_shaffer(b: f64, c: f64) -> Result<Self> {
        make_weight(WeightKind::CarlsonShaffer { b, c })
    }

    pub fn two_param(a: f64, b: f64) -> Result<Self> {
        make_weight(WeightKind::TwoParam { a, b })
    }

    pub fn ali_singh(k: f64) -> Result<Self> {
        make_weight(WeightKind::AliSingh { k })
    }

    /// Normalizes a user weight by quadrature of its mass.
    pub fn custom(cw: CustomWeight) -> Result<Self> {
        let lam = cw.lambda.clone();
        let mass = integrate_with_complement(
            |t, _| lam(t),
            0.0,
            1.0,
            &QuadOptions::tol(QUAD_TOL)
                .with_rel(QUAD_REL)
                .with_singularity(cw.singularity),
        )?
        .value;
        if !(mass > 0.0) || !mass.is_finite() {
            return Err(out_of_range(format!(
                "custom weight `{}` has mass {mass}",
                cw.name
            )));
        }
        let mut w = Weight {
            kind: WeightKind::Custom(cw),
            norm: 1.0 / mass,
            warnings: Vec::new(),
        };
        w.warnings = w.positivity_scan(1001);
        Ok(w)
    }

    pub fn from_spec(spec: &WeightSpec) -> Result<Self> {
        let get = |name: &str| -> Result<f64> {
            spec.params
                .get(name)
                .copied()
                .ok_or_else(|| out_of_range(format!("{} needs parameter `{name}`", spec.kind)))
        };
        let known: &[&str] = match spec.kind.as_str() {
            "bernardi" => &["c"],
            "uniform" => &[],
            "komatu" => &["k", "p"],
            "hohlov" => &["a", "b", "c"],
            "carlson_shaffer" => &["b", "c"],
            "two_param" => &["a", "b"],
            "ali_singh" => &["k"],
            other => return Err(Error::UnknownOperator(other.to_string())),
        };
        if let Some(extra) = spec.params.keys().find(|k| !known.contains(&k.as_str())) {
            return Err(out_of_range(format!(
                "{} does not take parameter `{extra}`",
                spec.kind
            )));
        }
        let kind = match spec.kind.as_str() {
            "bernardi" => WeightKind::Bernardi { c: get("c")? },
            "uniform" => WeightKind::Uniform,
            "komatu" => WeightKind::Komatu {
                k: get("k")?,
                p: get("p")?,
            },
            "hohlov" => WeightKind::Hohlov {
                a: get("a")?,
                b: get("b")?,
                c: get("c")?,
            },
            "carlson_shaffer" => WeightKind::CarlsonShaffer {
                b: get("b")?,
                c: get("c")?,
            },
            "two_param" => WeightKind::TwoParam {
                a: get("a")?,
                b: get("b")?,
            },
            _ => WeightKind::AliSingh { k: get("k")? },
        };
        make_weight(kind)
    }

    pub fn spec(&self) -> WeightSpec {
        WeightSpec {
            kind: self.kind.name().to_string(),
            params: self.kind.params(),
        }
    }

    pub fn kind(&self) -> &WeightKind {
        &self.kind
    }

    pub fn name(&self) -> &'static str {
        self.kind.name()
    }

    /// Normalization constant `K`.
    pub fn normalization(&self) -> f64 {
        self.norm
    }

    pub fn warnings(&self) -> &[WeightWarning] {
        &self.warnings
    }

    pub fn singularity(&self) -> Singularity {
        match &self.kind {
            WeightKind::Uniform => Singularity::None,
            WeightKind::Bernardi { .. } | WeightKind::AliSingh { .. } => Singularity::LeftPower,
            WeightKind::Komatu { .. } | WeightKind::TwoParam { .. } => Singularity::LeftLog,
            WeightKind::Hohlov { .. } | WeightKind::CarlsonShaffer { .. } => Singularity::Both,
            WeightKind::Custom(cw) => cw.singularity,
        }
    }

    /// `lambda(t)`.
    pub fn value(&self, t: f64) -> f64 {
        self.value_c(t, 1.0 - t)
    }

    /// `lambda(t)` given `s = 1 - t` computed by the caller without
    /// cancellation; only weights singular at `t = 1` make use of it.
    pub fn value_c(&self, t: f64, s: f64) -> f64 {
        let k0 = self.norm;
        match self.kind {
            WeightKind::Uniform => 1.0,
            WeightKind::Bernardi { c } => k0 * t.powf(c),
            WeightKind::Komatu { k, p } => {
                let l = -t.ln();
                k0 * t.powf(k) * pow_or_one(l, p - 1.0)
            }
            WeightKind::Hohlov { a, b, c } => {
                let m = c - a - b;
                k0 * t.powf(b - 1.0) * s.powf(m) * hohlov_omega(a, b, c, s, t, 0)
            }
            WeightKind::CarlsonShaffer { b, c } => k0 * t.powf(b - 1.0) * s.powf(c - b - 1.0),
            WeightKind::TwoParam { a, b } => two_param_value(a, b, t),
            WeightKind::AliSingh { k } => k0 * t.powf(-k) * s * (1.0 + t),
            WeightKind::Custom(ref cw) => k0 * (cw.lambda)(t),
        }
    }

    /// `lambda'(t)`.
    pub fn d1(&self, t: f64) -> f64 {
        let k0 = self.norm;
        match self.kind {
            WeightKind::Uniform => 0.0,
            WeightKind::Bernardi { c } => k0 * c * t.powf(c - 1.0),
            WeightKind::Komatu { k, p } => {
                let l = -t.ln();
                k0 * t.powf(k - 1.0) * (k * pow_or_one(l, p - 1.0) - term(p - 1.0, l, p - 2.0))
            }
            WeightKind::CarlsonShaffer { .. } | WeightKind::Hohlov { .. } => {
                self.value(t) * self.log_derivative(t) / t
            }
            WeightKind::TwoParam { a, b } => {
                let (lo, hi) = ordered(a, b);
                let kk = (a + 1.0) * (b + 1.0);
                if hi - lo < TWO_PARAM_EQUAL_TOL {
                    kk * t.powf(lo - 1.0) * (lo * -t.ln() - 1.0)
                } else {
                    kk * (lo * t.powf(lo - 1.0) - hi * t.powf(hi - 1.0)) / (hi - lo)
                }
            }
            WeightKind::AliSingh { k } => k0 * t.powf(-k - 1.0) * (-k - (2.0 - k) * t * t),
            WeightKind::Custom(ref cw) => k0 * (cw.d1)(t),
        }
    }

    /// `lambda''(t)`.
    pub fn d2(&self, t: f64) -> f64 {
        let k0 = self.norm;
        match self.kind {
            WeightKind::Uniform => 0.0,
            WeightKind::Bernardi { c } => k0 * c * (c - 1.0) * t.powf(c - 2.0),
            WeightKind::Komatu { k, p } => {
                let l = -t.ln();
                let first = (k - 1.0) * (k * pow_or_one(l, p - 1.0) - term(p - 1.0, l, p - 2.0));
                let second =
                    k * term(p - 1.0, l, p - 2.0) - term((p - 1.0) * (p - 2.0), l, p - 3.0);
                k0 * t.powf(k - 2.0) * (first - second)
            }
            WeightKind::CarlsonShaffer { b, c } => {
                let s = 1.0 - t;
                let r = (b - 1.0) / t - (c - b - 1.0) / s;
                let dr = -(b - 1.0) / (t * t) - (c - b - 1.0) / (s * s);
                self.value(t) * (r * r + dr)
            }
            WeightKind::Hohlov { a, b, c } => {
                let s = 1.0 - t;
                let m = c - a - b;
                let w0 = hohlov_omega(a, b, c, s, t, 0);
                let w1 = hohlov_omega(a, b, c, s, t, 1) / w0;
                let w2 = hohlov_omega(a, b, c, s, t, 2) / w0;
                let r = (b - 1.0) / t - m / s - w1;
                let dr = -(b - 1.0) / (t * t) - m / (s * s) + w2 - w1 * w1;
                self.value(t) * (r * r + dr)
            }
            WeightKind::TwoParam { a, b } => {
                let (lo, hi) = ordered(a, b);
                let kk = (a + 1.0) * (b + 1.0);
                if hi - lo < TWO_PARAM_EQUAL_TOL {
                    kk * t.powf(lo - 2.0) * (lo * (lo - 1.0) * -t.ln() - (2.0 * lo - 1.0))
                } else {
                    kk * (lo * (lo - 1.0) * t.powf(lo - 2.0) - hi * (hi - 1.0) * t.powf(hi - 2.0))
                        / (hi - lo)
                }
            }
            WeightKind::AliSingh { k } => {
                k0 * t.powf(-k - 2.0) * (k * (k + 1.0) - (2.0 - k) * (1.0 - k) * t * t)
            }
            WeightKind::Custom(ref cw) => k0 * (cw.d2)(t),
        }
    }

    /// `t lambda'(t) / lambda(t)` in closed form where one is known.
    pub fn log_derivative(&self, t: f64) -> f64 {
        match self.kind {
            WeightKind::Uniform => 0.0,
            WeightKind::Bernardi { c } => c,
            WeightKind::Komatu { k, p } => {
                if p == 1.0 {
                    k
                } else {
                    k - (p - 1.0) / -t.ln()
                }
            }
            WeightKind::CarlsonShaffer { b, c } => (b - 1.0) - (c - b - 1.0) * t / (1.0 - t),
            WeightKind::Hohlov { a, b, c } => {
                let s = 1.0 - t;
                let m = c - a - b;
                let ratio = hohlov_omega(a, b, c, s, t, 1) / hohlov_omega(a, b, c, s, t, 0);
                (b - 1.0) - m * t / s - t * ratio
            }
            WeightKind::TwoParam { a, b } => {
                let (lo, hi) = ordered(a, b);
                let l = -t.ln();
                if hi - lo < TWO_PARAM_EQUAL_TOL {
                    lo - 1.0 / l
                } else {
                    // (lo - hi x)/(1 - x) with x = t^{hi-lo}
                    let d = hi - lo;
                    let one_minus_x = -(-d * l).exp_m1();
                    lo - d * (-d * l).exp() / one_minus_x
                }
            }
            WeightKind::AliSingh { k } => -k - 2.0 * t * t / (1.0 - t * t),
            WeightKind::Custom(ref cw) => t * (cw.d1)(t) / (cw.lambda)(t),
        }
    }

    /// Moment `tau_n = int t^n lambda(t) dt`.
    pub fn moment(&self, n: usize) -> Result<f64> {
        let nf = n as f64;
        Ok(match self.kind {
            WeightKind::Uniform => 1.0 / (nf + 1.0),
            WeightKind::Bernardi { c } => (1.0 + c) / (nf + c + 1.0),
            WeightKind::Komatu { k, p } => ((1.0 + k) / (nf + k + 1.0)).powf(p),
            WeightKind::Hohlov { a, b, c } => pochhammer_ratio(&[a, b], &[c, 1.0], n),
            WeightKind::CarlsonShaffer { b, c } => pochhammer_ratio(&[b], &[c], n),
            WeightKind::TwoParam { a, b } => {
                (a + 1.0) * (b + 1.0) / ((nf + a + 1.0) * (nf + b + 1.0))
            }
            WeightKind::AliSingh { k } => (1.0 - k) * (3.0 - k) / ((nf + 1.0 - k) * (nf + 3.0 - k)),
            WeightKind::Custom(_) => self.moment_quadrature(n)?,
        })
    }

    /// `tau_0 .. tau_n`; the Pochhammer families use the ratio recurrence.
    pub fn moments(&self, n: usize) -> Result<Vec<f64>> {
        let step: Option<Box<dyn Fn(f64) -> f64>> = match self.kind {
            WeightKind::Hohlov { a, b, c } => {
                Some(Box::new(move |k| (a + k) * (b + k) / ((c + k) * (k + 1.0))))
            }
            WeightKind::CarlsonShaffer { b, c } => Some(Box::new(move |k| (b + k) / (c + k))),
            _ => None,
        };
        match step {
            Some(step) => {
                let mut out = Vec::with_capacity(n + 1);
                let mut tau = 1.0;
                for k in 0..=n {
                    out.push(tau);
                    tau *= step(k as f64);
                }
                Ok(out)
            }
            None => (0..=n).map(|k| self.moment(k)).collect(),
        }
    }

    /// Moment by quadrature, for any weight.
    pub fn moment_quadrature(&self, n: usize) -> Result<f64> {
        integrate_with_complement(
            |t, s| t.powi(n as i32) * self.value_c(t, s),
            0.0,
            1.0,
            &QuadOptions::tol(QUAD_TOL)
                .with_rel(QUAD_REL)
                .with_singularity(self.singularity()),
        )
        .map(|q| q.value)
    }

    /// `int_0^1 lambda`, which should be 1.
    pub fn mass(&self) -> Result<f64> {
        self.moment_quadrature(0)
    }

    fn positivity_scan(&self, points: usize) -> Vec<WeightWarning> {
        (1..=points)
            .map(|i| i as f64 / (points + 1) as f64)
            .filter_map(|t| {
                let v = self.value(t);
                (!(v >= 0.0)).then(|| WeightWarning {
                    message: format!("{} weight is negative or undefined", self.name()),
                    at: t,
                    value: v,
                })
            })
            .take(1)
            .collect()
    }
}

fn ordered(a: f64, b: f64) -> (f64, f64) {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

// x^e with 0^0 = 1
fn pow_or_one(x: f64, e: f64) -> f64 {
    if e == 0.0 {
        1.0
    } else {
        x.powf(e)
    }
}

// coef * x^e, zero when coef is zero (avoids 0 * inf at x = 0)
fn term(coef: f64, x: f64, e: f64) -> f64 {
    if coef == 0.0 {
        0.0
    } else {
        coef * x.powf(e)
    }
}

fn two_param_value(a: f64, b: f64, t: f64) -> f64 {
    let (lo, hi) = ordered(a, b);
    let kk = (a + 1.0) * (b + 1.0);
    let l = -t.ln();
    if hi - lo < TWO_PARAM_EQUAL_TOL {
        return kk * t.powf(lo) * l;
    }
    let d = hi - lo;
    kk * t.powf(lo) * -(-d * l).exp_m1() / d
}

// k-th derivative of omega(x) = 2F1(c-a, 1-a; c-a-b+1; x) at x = s = 1 - t
fn hohlov_omega(a: f64, b: f64, c: f64, s: f64, t: f64, k: u32) -> f64 {
    let (aa, bb, cc) = (c - a, 1.0 - a, c - a - b + 1.0);
    let kf = k as f64;
    let scale = pochhammer(aa, k) * pochhammer(bb, k) / pochhammer(cc, k);
    if scale == 0.0 {
        return 0.0;
    }
    scale * hyp2f1_split(aa + kf, bb + kf, cc + kf, s, t).unwrap_or(f64::NAN)
}

// prod (num_i)_n / prod (den_j)_n, accumulated termwise to stay in range
fn pochhammer_ratio(num: &[f64], den: &[f64], n: usize) -> f64 {
    let mut acc = 1.0;
    for i in 0..n {
        let i = i as f64;
        let top: f64 = num.iter().map(|x| x + i).product();
        let bottom: f64 = den.iter().map(|x| x + i).product();
        acc *= top / bottom;
    }
    acc
}

fn quad_opts(w: &Weight) -> QuadOptions {
    let s = match w.singularity() {
        Singularity::None => Singularity::LeftPower,
        s => s,
    };
    QuadOptions::tol(QUAD_TOL)
        .with_rel(QUAD_REL)
        .with_singularity(s)
}

fn require_unit_interval(t: f64) -> Result<()> {
    if t > 0.0 && t <= 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name: "t",
            value: t,
            reason: "must lie in (0, 1]",
        })
    }
}

/// `Lambda_nu^delta(t) = int_t^1 lambda(s) s^{-delta/nu} ds`.
pub fn lambda_cap(w: &Weight, p: &ParameterSet, t: f64) -> Result<f64> {
    lambda_cap_with(w, p.nu, p.delta, t)
}

/// `Lambda` with an explicit exponent root; `nu = alpha` on the `gamma = 0` branch.
pub fn lambda_cap_with(w: &Weight, nu: f64, delta: f64, t: f64) -> Result<f64> {
    require_unit_interval(t)?;
    if !(nu > 0.0) {
        return Err(Error::InvalidParameter {
            name: "nu",
            value: nu,
            reason: "Lambda needs nu > 0",
        });
    }
    if t == 1.0 {
        return Ok(0.0);
    }
    let e = delta / nu;
    integrate_with_complement(|u, s| w.value_c(u, s) * u.powf(-e), t, 1.0, &quad_opts(w))
        .map(|q| q.value)
}

/// `Pi_{mu,nu}^delta(t)`; on the `gamma = 0` branch this is `Lambda_alpha^delta`.
///
/// For `gamma > 0` the double integral is evaluated in swapped order,
/// `int_t^1 lambda(u) u^{-delta/nu} (u^q - t^q)/q du` with
/// `q = delta/nu - delta/mu`.
pub fn pi_cap(w: &Weight, p: &ParameterSet, t: f64) -> Result<f64> {
    if p.gamma_is_zero() {
        return lambda_cap_with(w, p.alpha, p.delta, t);
    }
    require_unit_interval(t)?;
    if t == 1.0 {
        return Ok(0.0);
    }
    let e = p.delta / p.nu;
    let q = p.delta / p.nu - p.delta / p.mu;
    let tq = t.powf(q);
    integrate_with_complement(
        |u, s| w.value_c(u, s) * u.powf(-e) * swap_kernel(t, tq, u, q),
        t,
        1.0,
        &quad_opts(w),
    )
    .map(|r| r.value)
}

// (u^q - t^q)/q without cancellation; ln(u/t) at q = 0
fn swap_kernel(t: f64, tq: f64, u: f64, q: f64) -> f64 {
    let l = (u / t).ln();
    let x = q * l;
    if x == 0.0 {
        tq * l
    } else {
        tq * l * x.exp_m1() / x
    }
}

/// `Lambda` and `Pi` sampled on a grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CumulativeTables {
    pub grid: Vec<f64>,
    pub lambda_cap: Vec<f64>,
    pub pi_cap: Vec<f64>,
    pub params: ParameterSet,
}

impl CumulativeTables {
    pub fn build(w: &Weight, p: &ParameterSet, grid: Vec<f64>) -> Result<Self> {
        let nu = if p.gamma_is_zero() { p.alpha } else { p.nu };
        let lambda_cap = grid
            .iter()
            .map(|&t| lambda_cap_with(w, nu, p.delta, t))
            .collect::<Result<Vec<_>>>()?;
        let pi_cap = grid
            .iter()
            .map(|&t| pi_cap(w, p, t))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            grid,
            lambda_cap,
            pi_cap,
            params: *p,
        })
    }

    /// Both tables nonincreasing along an increasing grid, up to `slack`.
    pub fn nonincreasing(&self, slack: f64) -> bool {
        let ok = |v: &[f64]| {
            v.windows(2)
                .all(|w| w[1] <= w[0] + slack * w[0].abs().max(1.0))
        };
        ok(&self.lambda_cap) && ok(&self.pi_cap)
    }
}

pub const LIMIT_SAMPLES: [f64; 3] = [1e-2, 1e-3, 1e-4];
const LIMIT_STEP: f64 = 0.5;
const LIMIT_DROP: f64 = 0.1;

/// Diagnostics for the boundary hypotheses `t^{delta/nu} Lambda -> 0` and
/// `t^{delta/mu} Pi -> 0` as `t -> 0+`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LimitReport {
    pub lambda_ok: bool,
    pub pi_ok: bool,
    pub t: [f64; 3],
    pub lambda_samples: [f64; 3],
    pub pi_samples: [f64; 3],
}

fn decays(v: &[f64; 3]) -> bool {
    v.windows(2).all(|w| w[1].abs() < LIMIT_STEP * w[0].abs())
        && v[2].abs() < LIMIT_DROP * v[0].abs()
        || v.iter().all(|x| *x == 0.0)
}

pub fn limit_conditions(w: &Weight, p: &ParameterSet) -> Result<LimitReport> {
    if p.gamma_is_zero() {
        return Err(Error::PreconditionViolated(
            "limit conditions are stated for gamma > 0".to_string(),
        ));
    }
    let mut lambda_samples = [0.0; 3];
    let mut pi_samples = [0.0; 3];
    for (i, &t) in LIMIT_SAMPLES.iter().enumerate() {
        lambda_samples[i] = t.powf(p.delta / p.nu) * lambda_cap(w, p, t)?;
        pi_samples[i] = t.powf(p.delta / p.mu) * pi_cap(w, p, t)?;
    }
    Ok(LimitReport {
        lambda_ok: decays(&lambda_samples),
        pi_ok: decays(&pi_samples),
        t: LIMIT_SAMPLES,
        lambda_samples,
        pi_samples,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::integrate_with;
    use proptest::prelude::*;

    fn unit_params(mu: f64, nu: f64, delta: f64) -> ParameterSet {
        ParameterSet::from_kernel(mu, nu, delta, 0.0).unwrap()
    }

    fn sweep() -> Vec<Weight> {
        let mut out = Vec::new();
        for c in [-0.5, 0.0, 1.0, 3.0] {
            out.push(Weight::bernardi(c).unwrap());
        }
        for (k, p) in [(0.0, 1.0), (0.0, 2.0), (1.0, 2.0)] {
            out.push(Weight::komatu(k, p).unwrap());
        }
        for k in [0.0, 0.5, 0.9] {
            out.push(Weight::ali_singh(k).unwrap());
        }
        for (a, b, c) in [(1.0, 1.0, 3.0), (0.5, 1.0, 2.5)] {
            out.push(Weight::hohlov(a, b, c).unwrap());
        }
        out
    }

    #[test]
    fn normalization_sweep() {
        for w in sweep() {
            let m = w.mass().unwrap();
            assert!((m - 1.0).abs() < 1e-9, "{:?}: {m}", w.spec());
        }
        for w in [
            Weight::uniform(),
            Weight::carlson_shaffer(1.0, 3.0).unwrap(),
            Weight::carlson_shaffer(0.5, 1.2).unwrap(),
            Weight::two_param(0.5, 2.0).unwrap(),
            Weight::two_param(1.0, 1.0).unwrap(),
            Weight::hohlov(1.5, 0.7, 2.0).unwrap(),
        ] {
            assert!((w.mass().unwrap() - 1.0).abs() < 1e-9, "{:?}", w.spec());
        }
    }

    #[test]
    fn catalog_examples() {
        let b0 = Weight::bernardi(0.0).unwrap();
        assert_eq!(b0.value(0.3), 1.0);
        let a = Weight::ali_singh(0.4).unwrap();
        assert!((a.normalization() - 0.6 * 2.6 / 2.0).abs() < 1e-15);
        let k = Weight::komatu(1.0, 3.0).unwrap();
        let t: f64 = 0.4;
        let want = 8.0 / 2.0 * t * (1.0 / t).ln().powi(2);
        assert!((k.value(t) - want).abs() < 1e-14);
    }

    #[test]
    fn moment_examples() {
        let b0 = Weight::bernardi(0.0).unwrap();
        assert_eq!(b0.moment(1).unwrap(), 0.5);
        let b2 = Weight::bernardi(2.0).unwrap();
        assert!((b2.moment(3).unwrap() - 0.5).abs() < 1e-15);
        assert!((b2.moment_quadrature(3).unwrap() - 0.5).abs() < 1e-12);
        let u = Weight::uniform();
        for n in 0..10 {
            assert_eq!(u.moment(n).unwrap(), 1.0 / (n as f64 + 1.0));
        }
    }

    #[test]
    fn closed_moments_match_quadrature() {
        let mut ws = sweep();
        ws.push(Weight::carlson_shaffer(1.0, 3.0).unwrap());
        ws.push(Weight::carlson_shaffer(0.5, 1.7).unwrap());
        ws.push(Weight::two_param(-0.5, 2.0).unwrap());
        ws.push(Weight::two_param(0.3, 0.3).unwrap());
        ws.push(Weight::hohlov(2.0, 1.5, 4.0).unwrap());
        ws.push(Weight::hohlov(0.7, 0.4, 1.6).unwrap());
        for w in ws {
            for n in 0..=20 {
                let a = w.moment(n).unwrap();
                let b = w.moment_quadrature(n).unwrap();
                assert!((a - b).abs() < 1e-9, "{:?} n={n}: {a} vs {b}", w.spec());
            }
        }
    }

    #[test]
    fn moment_vector_matches_pointwise() {
        for w in [
            Weight::hohlov(0.5, 1.0, 2.5).unwrap(),
            Weight::carlson_shaffer(1.0, 3.0).unwrap(),
            Weight::komatu(1.0, 2.0).unwrap(),
        ] {
            let v = w.moments(30).unwrap();
            for (n, tau) in v.iter().enumerate() {
                assert!((tau - w.moment(n).unwrap()).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn hohlov_a1_is_carlson_shaffer() {
        for (b, c) in [(1.0, 3.0), (0.5, 2.5), (2.0, 3.5)] {
            let h = Weight::hohlov(1.0, b, c).unwrap();
            let cs = Weight::carlson_shaffer(b, c).unwrap();
            for i in 1..=9 {
                let t = i as f64 / 10.0;
                assert!((h.value(t) - cs.value(t)).abs() < 1e-10);
                assert!((h.log_derivative(t) - cs.log_derivative(t)).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let mut ws = sweep();
        ws.push(Weight::carlson_shaffer(0.5, 2.2).unwrap());
        ws.push(Weight::two_param(0.5, 2.0).unwrap());
        ws.push(Weight::two_param(0.5, 0.5).unwrap());
        ws.push(Weight::komatu(0.5, 3.5).unwrap());
        ws.push(Weight::hohlov(0.5, 1.5, 3.2).unwrap());
        ws.push(Weight::hohlov(1.7, 0.6, 2.9).unwrap());
        let h = 1e-5;
        for w in ws {
            for t in [0.15, 0.4, 0.7, 0.85] {
                let fd1 = (w.value(t + h) - w.value(t - h)) / (2.0 * h);
                let fd2 = (w.d1(t + h) - w.d1(t - h)) / (2.0 * h);
                let s1 = w.d1(t).abs().max(1.0);
                let s2 = w.d2(t).abs().max(1.0);
                assert!(
                    (w.d1(t) - fd1).abs() < 1e-6 * s1,
                    "{:?} d1 at {t}",
                    w.spec()
                );
                assert!(
                    (w.d2(t) - fd2).abs() < 1e-6 * s2,
                    "{:?} d2 at {t}",
                    w.spec()
                );
                let ld = t * w.d1(t) / w.value(t);
                assert!((w.log_derivative(t) - ld).abs() < 1e-9 * ld.abs().max(1.0));
            }
        }
    }

    #[test]
    fn parameter_ranges() {
        assert!(matches!(
            Weight::bernardi(-1.0),
            Err(Error::ParamOutOfRange(_))
        ));
        assert!(Weight::komatu(-1.5, 2.0).is_err());
        assert!(Weight::komatu(0.0, 0.5).is_err());
        assert!(Weight::hohlov(0.0, 1.0, 3.0).is_err());
        assert!(Weight::hohlov(1.0, 1.0, 0.5).is_err());
        assert!(Weight::carlson_shaffer(2.0, 1.0).is_err());
        assert!(Weight::two_param(-1.0, 0.0).is_err());
        assert!(Weight::ali_singh(1.0).is_err());
        assert!(Weight::ali_singh(-0.1).is_err());
    }

    #[test]
    fn spec_roundtrip() {
        let w = Weight::hohlov(1.0, 1.0, 3.0).unwrap();
        let json = serde_json::to_string(&w.spec()).unwrap();
        assert_eq!(
            json,
            r#"{"kind":"hohlov","params":{"a":1.0,"b":1.0,"c":3.0}}"#
        );
        let back: WeightSpec = serde_json::from_str(&json).unwrap();
        let w2 = Weight::from_spec(&back).unwrap();
        assert_eq!(w2.value(0.3), w.value(0.3));
        let bad = WeightSpec::new("nope", &[]);
        assert!(matches!(
            Weight::from_spec(&bad),
            Err(Error::UnknownOperator(_))
        ));
        let missing = WeightSpec::new("bernardi", &[]);
        assert!(Weight::from_spec(&missing).is_err());
        let uni: WeightSpec = serde_json::from_str(r#"{"kind":"uniform"}"#).unwrap();
        assert_eq!(Weight::from_spec(&uni).unwrap().name(), "uniform");
    }

    #[test]
    fn custom_weight_is_normalized() {
        let cw = CustomWeight::new("t^2", |t| t * t, |t| 2.0 * t, |_| 2.0);
        let w = Weight::custom(cw).unwrap();
        assert!((w.normalization() - 3.0).abs() < 1e-12);
        assert!((w.moment(1).unwrap() - 0.75).abs() < 1e-12);
        assert!((w.log_derivative(0.3) - 2.0).abs() < 1e-12);
        assert!(w.warnings().is_empty());
    }

    #[test]
    fn lambda_cap_examples() {
        let b0 = Weight::bernardi(0.0).unwrap();
        let p = unit_params(1.0, 1.0, 1.0);
        assert!((lambda_cap(&b0, &p, 0.5).unwrap() - 2f64.ln()).abs() < 1e-12);
        assert_eq!(lambda_cap(&b0, &p, 1.0).unwrap(), 0.0);
        let p2 = unit_params(0.5, 2.0, 1.0);
        assert!((lambda_cap(&Weight::uniform(), &p2, 0.25).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn pi_cap_examples() {
        let u = Weight::uniform();
        let p = unit_params(1.0, 1.0, 1.0);
        let want = 2f64.ln().powi(2) / 2.0;
        assert!((pi_cap(&u, &p, 0.5).unwrap() - want).abs() < 1e-12);
        assert!((want - 0.240227).abs() < 1e-6);
        assert_eq!(pi_cap(&u, &p, 1.0).unwrap(), 0.0);

        let g0 = ParameterSet::new(2.0, 0.0, 1.5, 0.5).unwrap();
        let b = Weight::bernardi(1.0).unwrap();
        let direct = lambda_cap_with(&b, 2.0, 1.5, 0.3).unwrap();
        assert_eq!(pi_cap(&b, &g0, 0.3).unwrap(), direct);
    }

    // Pi by the nested definition: outer quadrature over an inner Lambda
    fn pi_nested(w: &Weight, p: &ParameterSet, t: f64) -> f64 {
        let e = p.delta / p.mu - p.delta / p.nu + 1.0;
        integrate_with(
            |s| lambda_cap(w, p, s).unwrap() * s.powf(-e),
            t,
            1.0,
            &QuadOptions::tol(1e-11),
        )
        .unwrap()
        .value
    }

    #[test]
    fn swapped_pi_matches_nested() {
        let configs = [
            (Weight::bernardi(1.0).unwrap(), unit_params(2.0, 3.0, 1.5)),
            (
                Weight::komatu(0.5, 2.0).unwrap(),
                unit_params(1.0, 1.0, 1.0),
            ),
            (
                Weight::hohlov(0.5, 1.0, 2.5).unwrap(),
                unit_params(0.7, 2.5, 1.2),
            ),
            (Weight::ali_singh(0.5).unwrap(), unit_params(1.5, 1.5, 1.0)),
        ];
        for (w, p) in &configs {
            for t in [0.05, 0.3, 0.8] {
                let a = pi_cap(w, p, t).unwrap();
                let b = pi_nested(w, p, t);
                assert!(
                    (a - b).abs() < 1e-9 * a.abs().max(1.0),
                    "{:?} t={t}: {a} vs {b}",
                    w.spec()
                );
            }
        }
    }

    #[test]
    fn limit_condition_examples() {
        let p = unit_params(1.0, 1.0, 1.0);
        for w in [
            Weight::bernardi(0.0).unwrap(),
            Weight::bernardi(2.0).unwrap(),
            Weight::uniform(),
        ] {
            let r = limit_conditions(&w, &p).unwrap();
            assert!(r.lambda_ok && r.pi_ok, "{:?}: {r:?}", w.spec());
        }
        let g0 = ParameterSet::new(1.0, 0.0, 1.0, 0.0).unwrap();
        assert!(limit_conditions(&Weight::uniform(), &g0).is_err());
    }

    #[test]
    fn tables_are_monotone() {
        let grid: Vec<f64> = (1..40).map(|i| i as f64 / 40.0).collect();
        for (w, p) in [
            (Weight::bernardi(0.0).unwrap(), unit_params(1.0, 1.0, 1.0)),
            (
                Weight::komatu(0.0, 2.0).unwrap(),
                unit_params(2.0, 3.0, 1.5),
            ),
            (
                Weight::ali_singh(0.5).unwrap(),
                ParameterSet::new(2.0, 0.0, 1.0, 0.0).unwrap(),
            ),
        ] {
            let tab = CumulativeTables::build(&w, &p, grid.clone()).unwrap();
            assert!(tab.nonincreasing(0.0));
            assert!(tab.pi_cap.iter().all(|v| *v >= 0.0));
        }
    }

    proptest! {
        #[test]
        fn bernardi_caps_closed_form(c in -0.5f64..3.0, t in 0.01f64..0.99) {
            // delta = nu = mu = 1: Lambda = (1+c)(1 - t^c)/c
            let w = Weight::bernardi(c).unwrap();
            let p = unit_params(1.0, 1.0, 1.0);
            let want = if c.abs() < 1e-12 { -t.ln() } else { (1.0 + c) * (1.0 - t.powf(c)) / c };
            let got = lambda_cap(&w, &p, t).unwrap();
            prop_assert!((got - want).abs() < 1e-10 * want.abs().max(1.0));
        }

        #[test]
        fn two_param_is_symmetric(a in -0.9f64..3.0, b in -0.9f64..3.0, t in 0.01f64..0.99) {
            let w1 = Weight::two_param(a, b).unwrap();
            let w2 = Weight::two_param(b, a).unwrap();
            prop_assert!((w1.value(t) - w2.value(t)).abs() <= 1e-13 * w1.value(t).abs().max(1.0));
            prop_assert_eq!(w1.moment(3).unwrap(), w2.moment(3).unwrap());
        }
    }
}
