use std::path::Path;

use num_complex::Complex64;
use serde_json::{json, Value};
use starlike_core::{DiskGrid, ParameterSet, PowerSeries, Weight, WeightSpec};

use crate::args::{GridArgs, ParamArgs, WeightArgs};
use crate::CliError;

pub fn params(a: &ParamArgs) -> Result<ParameterSet, CliError> {
    Ok(ParameterSet::new(a.alpha, a.gamma, a.delta, a.zeta)?)
}

pub fn weight_spec(a: &WeightArgs) -> Result<WeightSpec, CliError> {
    let flags = [("a", a.a), ("b", a.b), ("c", a.c), ("k", a.k), ("p", a.p)];
    let given: Vec<(&str, f64)> = flags
        .iter()
        .filter_map(|&(name, v)| v.map(|v| (name, v)))
        .collect();
    if a.weight.trim_start().starts_with('{') {
        if !given.is_empty() {
            return Err(CliError::Usage(
                "a JSON weight carries its own parameters; drop the --a/--b/--c/--k/--p flags"
                    .into(),
            ));
        }
        return serde_json::from_str(&a.weight)
            .map_err(|e| CliError::Usage(format!("bad weight JSON: {e}")));
    }
    Ok(WeightSpec::new(&a.weight, &given))
}

pub fn weight(a: &WeightArgs) -> Result<Weight, CliError> {
    Ok(Weight::from_spec(&weight_spec(a)?)?)
}

pub fn disk_grid(a: &GridArgs) -> Result<DiskGrid, CliError> {
    if a.grid_radii == 0 || a.grid_angles == 0 {
        return Err(CliError::Usage("grid sizes must be positive".into()));
    }
    Ok(DiskGrid::new(
        starlike_core::conditions::chebyshev_radii(a.r_max, a.grid_radii),
        a.grid_angles,
    )?)
}

pub fn read_series(path: &Path) -> Result<PowerSeries, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
    let pairs: Vec<[f64; 2]> = serde_json::from_str(&text).map_err(|e| {
        CliError::Usage(format!(
            "{}: expected a JSON array of [re, im] pairs: {e}",
            path.display()
        ))
    })?;
    let s = PowerSeries::new(
        pairs
            .iter()
            .map(|&[re, im]| Complex64::new(re, im))
            .collect(),
    )?;
    let c0 = s.coeff(0);
    if (c0 - 1.0).norm() > 1e-12 {
        return Err(starlike_core::Error::NonUnitConstantTerm {
            re: c0.re,
            im: c0.im,
        }
        .into());
    }
    Ok(s)
}

pub fn series_json(s: &PowerSeries) -> Value {
    Value::Array(s.coeffs().iter().map(|c| json!([c.re, c.im])).collect())
}

pub fn inputs(
    subcommand: &str,
    p: &ParameterSet,
    w: &WeightSpec,
) -> serde_json::Map<String, Value> {
    let mut m = serde_json::Map::new();
    m.insert("subcommand".into(), json!(subcommand));
    m.insert("params".into(), json!(p));
    m.insert("weight".into(), json!(w));
    m
}
