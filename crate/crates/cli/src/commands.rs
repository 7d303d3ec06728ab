use serde_json::{json, Map, Value};
use starlike_core::beta::{closed_form_analytic, solve_beta, solve_beta_5f4, solve_beta_series};
use starlike_core::conditions::{
    chebyshev_radii, check_differential_bound, check_monotone_t33, check_operator_bounds,
    minimize_n, NGrid, DIFFERENTIAL_GRID,
};
use starlike_core::transform::{
    apply_transform, g_series, make_member, recover_f, SHARPNESS_ORDER,
};
use starlike_core::verify::{
    sharpness_probe, starlike_margin, w_membership, BOUNDARY_TOL, INTERIOR_TOL, PHI_GRID,
};
use starlike_core::{
    BetaResult, ConditionReport, DiskGrid, Error, ParameterSet, PowerSeries, TestFunctionSpec,
    TheoremId, VerificationReport, Weight, WeightKind,
};

use crate::args::{
    BetaArgs, CheckArgs, GridArgs, MethodArg, ReportArgs, TheoremArg, TransformArgs, VerifyArgs,
};
use crate::io;
use crate::{CliError, Outcome, EXIT_CONDITION_FAILED, EXIT_NUMERIC, EXIT_OK, SCHEMA_VERSION};

/// Membership is checked on a smaller disk: the extremal `H` has
/// coefficients of constant size, so its tail only dies off well inside.
const MEMBERSHIP_R_MAX: f64 = 0.9;
const SHARPNESS_RADII: [f64; 3] = [0.9, 0.99, 0.999];
const BETA_TOL: f64 = 1e-10;

/// Default truncation: the gamma = 0 extremal decays like `1/n`, so it
/// needs many more terms before `|z| = 0.999` is reachable.
fn default_order(p: &ParameterSet) -> usize {
    if p.gamma_is_zero() {
        8 * SHARPNESS_ORDER
    } else {
        SHARPNESS_ORDER
    }
}

#[derive(Debug, Default)]
struct Tally {
    ran: usize,
    failed: usize,
    errors: usize,
}

impl Tally {
    fn certified(&self) -> bool {
        self.ran > 0 && self.failed == 0 && self.errors == 0
    }

    fn exit_code(&self) -> i32 {
        if self.errors > 0 {
            EXIT_NUMERIC
        } else if self.failed > 0 || self.ran == 0 {
            EXIT_CONDITION_FAILED
        } else {
            EXIT_OK
        }
    }

    /// Record a stage. Uncovered parameter ranges are skipped, other errors
    /// are numeric failures that leave the rest of the document intact.
    fn stage<T: serde::Serialize>(
        &mut self,
        r: Result<T, Error>,
        passed: impl FnOnce(&T) -> bool,
    ) -> Value {
        match r {
            Ok(report) => {
                let ok = passed(&report);
                self.ran += 1;
                if !ok {
                    self.failed += 1;
                }
                json!({"status": if ok { "passed" } else { "failed" }, "report": report})
            }
            Err(
                e @ (Error::NotCovered(_)
                | Error::UnknownOperator(_)
                | Error::PreconditionViolated(_)),
            ) => {
                json!({"status": "skipped", "reason": e.to_string()})
            }
            Err(e) => {
                self.errors += 1;
                json!({"status": "error", "reason": e.to_string()})
            }
        }
    }
}

fn document(inputs: Map<String, Value>, results: Map<String, Value>, certified: bool) -> Value {
    json!({
        "version": SCHEMA_VERSION,
        "inputs": inputs,
        "results": results,
        "certified": certified,
    })
}

fn with_warnings(
    mut inputs: Map<String, Value>,
    p: &ParameterSet,
    w: &Weight,
) -> Map<String, Value> {
    let pw = p.warnings();
    if !pw.is_empty() {
        inputs.insert("param_warnings".into(), json!(pw));
    }
    if !w.warnings().is_empty() {
        inputs.insert("weight_warnings".into(), json!(w.warnings()));
    }
    inputs
}

pub fn beta(a: &BetaArgs) -> Result<Outcome, CliError> {
    let p = io::params(&a.params)?;
    let w = io::weight(&a.weight)?;
    let r = compute_beta(&w, &p, a.method, a.tol, a.terms)?;
    let mut inputs = with_warnings(io::inputs("beta", &p, &w.spec()), &p, &w);
    inputs.insert("method".into(), json!(r.method));
    let mut results = Map::new();
    results.insert("beta".into(), json!(r));
    Ok(Outcome {
        document: document(inputs, results, true),
        exit_code: EXIT_OK,
    })
}

fn compute_beta(
    w: &Weight,
    p: &ParameterSet,
    method: MethodArg,
    tol: f64,
    terms: usize,
) -> Result<BetaResult, CliError> {
    if !(tol > 0.0) {
        return Err(CliError::Usage(format!(
            "--tol must be positive, got {tol}"
        )));
    }
    Ok(match method {
        MethodArg::Quadrature => solve_beta(w, p, tol)?,
        MethodArg::Series => solve_beta_series(w, p, terms)?,
        MethodArg::Analytic => closed_form_analytic(w, p)?,
        MethodArg::FiveFFour => match *w.kind() {
            WeightKind::CarlsonShaffer { b, c } => solve_beta_5f4(b, c, p)?,
            _ => {
                return Err(CliError::Usage(
                    "the 5F4 method needs --weight carlson_shaffer".into(),
                ))
            }
        },
    })
}

fn condition_stages(
    w: &Weight,
    p: &ParameterSet,
    grid_size: usize,
    tally: &mut Tally,
    out: &mut Map<String, Value>,
) {
    let passed = |r: &ConditionReport| r.passed;
    let checks: [(&str, Result<ConditionReport, Error>); 4] = [
        ("T3_3_monotone", check_monotone_t33(w, p, grid_size)),
        (
            if p.gamma_is_zero() {
                "T4_2_gamma_zero"
            } else {
                "T4_1_gamma_pos"
            },
            check_differential_bound(w, p),
        ),
        ("op_bound", check_operator_bounds(w.kind(), p)),
        ("N_functional", minimize_n(w, p, &NGrid::default())),
    ];
    for (name, r) in checks {
        out.insert(name.into(), tally.stage(r, passed));
    }
}

pub fn check(a: &CheckArgs) -> Result<Outcome, CliError> {
    let p = io::params(&a.params)?;
    let w = io::weight(&a.weight)?;
    if a.grid_size < 2 {
        return Err(CliError::Usage("--grid-size must be at least 2".into()));
    }
    let mut inputs = with_warnings(io::inputs("check", &p, &w.spec()), &p, &w);
    inputs.insert("grid_size".into(), json!(a.grid_size));
    let mut results = Map::new();
    let mut tally = Tally::default();
    let single = match a.theorem {
        TheoremArg::All => {
            inputs.insert("theorem".into(), json!("all"));
            condition_stages(&w, &p, a.grid_size, &mut tally, &mut results);
            None
        }
        TheoremArg::T33 => Some(check_monotone_t33(&w, &p, a.grid_size)?),
        TheoremArg::T41 | TheoremArg::T42 => {
            let want_zero = a.theorem == TheoremArg::T42;
            if want_zero != p.gamma_is_zero() {
                return Err(CliError::Usage(format!(
                    "{} covers gamma {}; this run has gamma = {}",
                    if want_zero { "T4_2" } else { "T4_1" },
                    if want_zero { "= 0" } else { "> 0" },
                    p.gamma
                )));
            }
            Some(check_differential_bound(&w, &p)?)
        }
        TheoremArg::Op => Some(check_operator_bounds(w.kind(), &p)?),
        TheoremArg::N => Some(minimize_n(&w, &p, &NGrid::default())?),
    };
    if let Some(r) = single {
        inputs.insert("theorem".into(), json!(r.theorem_id));
        // same keys as the `all` listing; the report keeps the full id
        let name = match r.theorem_id {
            TheoremId::OpBound(_) => "op_bound".to_string(),
            ref id => id.to_string(),
        };
        let v = tally.stage(Ok::<_, Error>(r), |r| r.passed);
        results.insert(name, v);
    }
    Ok(Outcome {
        document: document(inputs, results, tally.certified()),
        exit_code: tally.exit_code(),
    })
}

/// `(f/z)^delta` from `--input`, or the extremal member at `beta`.
fn member(
    input: Option<&std::path::Path>,
    beta: f64,
    p: &ParameterSet,
    order: usize,
) -> Result<PowerSeries, CliError> {
    match input {
        Some(path) => io::read_series(path),
        None => Ok(make_member(&TestFunctionSpec::extremal(beta, *p)?, order)),
    }
}

fn check_order(order: Option<usize>, p: &ParameterSet) -> Result<usize, CliError> {
    match order {
        Some(0) => Err(CliError::Usage("--order must be positive".into())),
        Some(n) => Ok(n),
        None => Ok(default_order(p)),
    }
}

pub fn transform(a: &TransformArgs) -> Result<Outcome, CliError> {
    let p = io::params(&a.params)?;
    let w = io::weight(&a.weight)?;
    let order = check_order(a.order, &p)?;
    let mut inputs = with_warnings(io::inputs("transform", &p, &w.spec()), &p, &w);
    let mut results = Map::new();
    let beta = if a.input.is_none() {
        let r = solve_beta(&w, &p, BETA_TOL)?;
        results.insert("beta".into(), json!(r));
        inputs.insert("member".into(), json!({"extremal": true, "order": order}));
        r.beta
    } else {
        inputs.insert("member".into(), json!({"extremal": false, "path": a.input}));
        0.0
    };
    let fz = member(a.input.as_deref(), beta, &p, order)?;
    let out = apply_transform(&fz, &w)?;
    results.insert("transformed".into(), io::series_json(&out));
    results.insert("F".into(), io::series_json(&recover_f(&out, p.delta)?));
    results.insert("G".into(), io::series_json(&g_series(&out)));
    Ok(Outcome {
        document: document(inputs, results, true),
        exit_code: EXIT_OK,
    })
}

struct DiskRun<'a> {
    p: ParameterSet,
    w: Weight,
    grid: DiskGrid,
    order: usize,
    tol: Option<f64>,
    csv: Option<&'a std::path::Path>,
}

impl<'a> DiskRun<'a> {
    fn new(
        params: &crate::args::ParamArgs,
        weight: &crate::args::WeightArgs,
        grid: &GridArgs,
        order: Option<usize>,
        tol: Option<f64>,
        csv: Option<&'a std::path::Path>,
    ) -> Result<Self, CliError> {
        let p = io::params(params)?;
        let w = io::weight(weight)?;
        let order = check_order(order, &p)?;
        if let Some(t) = tol {
            if !(t >= 0.0) {
                return Err(CliError::Usage(format!(
                    "--tol must be non-negative, got {t}"
                )));
            }
        }
        Ok(Self {
            grid: io::disk_grid(grid)?,
            p,
            w,
            order,
            tol,
            csv,
        })
    }

    fn membership_grid(&self) -> Result<DiskGrid, CliError> {
        let r_max = self.grid.r_max().min(MEMBERSHIP_R_MAX);
        Ok(DiskGrid::new(
            chebyshev_radii(r_max, self.grid.radii.len()),
            self.grid.angles,
        )?)
    }

    /// Membership, starlikeness of the image and, for the extremal member,
    /// the sharpness probe.
    fn disk_stages(
        &self,
        fz: &PowerSeries,
        beta: f64,
        extremal: bool,
        tally: &mut Tally,
        out: &mut Map<String, Value>,
    ) -> Result<(), CliError> {
        let passed = |r: &VerificationReport| r.passed;
        let mgrid = self.membership_grid()?;
        out.insert(
            "W_membership".into(),
            tally.stage(w_membership(fz, &self.p, beta, &mgrid, PHI_GRID), passed),
        );
        let g = match apply_transform(fz, &self.w) {
            Ok(s) => g_series(&s),
            Err(e) => {
                out.insert("transform".into(), tally.stage(Err::<(), _>(e), |_| false));
                return Ok(());
            }
        };
        let tol = self
            .tol
            .unwrap_or(if extremal { BOUNDARY_TOL } else { INTERIOR_TOL });
        let margin = starlike_margin(&g, self.p.xi, &self.grid, tol);
        if let (Some(path), Ok(rep)) = (self.csv, &margin) {
            std::fs::write(path, rep.to_csv())?;
        }
        out.insert("starlike_margin".into(), tally.stage(margin, passed));
        if extremal {
            out.insert(
                "sharpness".into(),
                tally.stage(sharpness_probe(&g, self.p.xi, &SHARPNESS_RADII), passed),
            );
        }
        Ok(())
    }

    fn inputs(&self, subcommand: &str) -> Map<String, Value> {
        let mut m = with_warnings(
            io::inputs(subcommand, &self.p, &self.w.spec()),
            &self.p,
            &self.w,
        );
        m.insert("grid".into(), json!(self.grid));
        m.insert("order".into(), json!(self.order));
        if let Some(t) = self.tol {
            m.insert("tol".into(), json!(t));
        }
        m
    }
}

pub fn verify(a: &VerifyArgs) -> Result<Outcome, CliError> {
    let run = DiskRun::new(
        &a.params,
        &a.weight,
        &a.grid,
        a.order,
        a.tol,
        a.csv.as_deref(),
    )?;
    let mut inputs = run.inputs("verify");
    let mut results = Map::new();
    let beta = match a.beta {
        Some(b) => {
            inputs.insert("beta".into(), json!(b));
            b
        }
        None => {
            let r = solve_beta(&run.w, &run.p, BETA_TOL)?;
            results.insert("beta".into(), json!(r));
            r.beta
        }
    };
    let extremal = a.input.is_none();
    inputs.insert(
        "member".into(),
        json!({"extremal": extremal, "path": a.input}),
    );
    let fz = member(a.input.as_deref(), beta, &run.p, run.order)?;
    let mut tally = Tally::default();
    run.disk_stages(&fz, beta, extremal, &mut tally, &mut results)?;
    Ok(Outcome {
        document: document(inputs, results, tally.certified()),
        exit_code: tally.exit_code(),
    })
}

pub fn report(a: &ReportArgs) -> Result<Outcome, CliError> {
    let run = DiskRun::new(
        &a.params,
        &a.weight,
        &a.grid,
        a.order,
        a.tol,
        a.csv.as_deref(),
    )?;
    let inputs = run.inputs("report");
    let mut results = Map::new();
    let mut tally = Tally::default();
    let beta = solve_beta(&run.w, &run.p, BETA_TOL);
    let beta_value = beta.as_ref().ok().map(|r| r.beta);
    results.insert("beta".into(), tally.stage(beta, |_| true));
    let mut conditions = Map::new();
    condition_stages(
        &run.w,
        &run.p,
        DIFFERENTIAL_GRID,
        &mut tally,
        &mut conditions,
    );
    results.insert("conditions".into(), Value::Object(conditions));
    if let Some(beta) = beta_value {
        let fz = member(None, beta, &run.p, run.order)?;
        let mut disk = Map::new();
        run.disk_stages(&fz, beta, true, &mut tally, &mut disk)?;
        results.insert("disk".into(), Value::Object(disk));
    }
    Ok(Outcome {
        document: document(inputs, results, tally.certified()),
        exit_code: tally.exit_code(),
    })
}
