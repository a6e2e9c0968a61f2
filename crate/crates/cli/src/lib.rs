//! Scenario-driven verification of spray geometry on Lie algebroids.
//!
//! A scenario file declares an algebroid chart, a spray and named
//! sections, plus the checks to run. [`run::run`] evaluates every check at
//! seeded sample points and produces a [`report::Report`].

pub mod probe;
pub mod report;
pub mod run;
pub mod scenario;

use sha2::{Digest, Sha256};
use spraygeom_core::{BerwaldConnection, CurvatureSuite, Field, Plan, Space};

pub use report::{CheckResult, Report, Verdict};
pub use run::{run, run_traced, validate, Overrides, ENGINE};
pub use scenario::{load, parse, Scenario, ScenarioError};

/// Hex SHA-256 of scenario source bytes.
pub fn digest(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// Parse `x=...;y=...` into a point `[x.., y..]`.
pub fn parse_point(text: &str, space: Space) -> Result<Vec<f64>, String> {
    let mut x = None;
    let mut y = None;
    for part in text.split(';').map(str::trim).filter(|p| !p.is_empty()) {
        let (key, values) = part.split_once('=').ok_or_else(|| format!("expected `x=..` or `y=..`, found `{part}`"))?;
        let values: Vec<f64> = values
            .split(',')
            .map(str::trim)
            .filter(|v| !v.is_empty())
            .map(|v| v.parse::<f64>().map_err(|_| format!("invalid number `{v}`")))
            .collect::<Result<_, _>>()?;
        let slot = match key.trim() {
            "x" => &mut x,
            "y" => &mut y,
            other => return Err(format!("unknown coordinate group `{other}`")),
        };
        if slot.replace(values).is_some() {
            return Err(format!("`{}` given twice", key.trim()));
        }
    }
    let x = x.unwrap_or_default();
    let y = y.ok_or("missing `y=..`")?;
    if x.len() != space.n || y.len() != space.m {
        return Err(format!("expected {} x and {} y values, got {} and {}", space.n, space.m, x.len(), y.len()));
    }
    Ok(x.into_iter().chain(y).collect())
}

/// Names accepted by [`eval_tensor`].
pub const TENSORS: [&str; 9] = ["K", "R", "H", "W0", "W", "Wstar", "B", "D", "Berwald-coeffs"];

/// Components of a curvature tensor, or of the connection coefficients, at a point.
/// Labels use 1-based indices, output index first.
pub fn eval_tensor(scenario: &Scenario, name: &str, point: &[f64]) -> Result<Vec<(String, f64)>, String> {
    let sp = scenario.space();
    let m = sp.m;
    let bc = BerwaldConnection::new(&scenario.algebroid, &scenario.spray);
    let (labels, fields): (Vec<String>, Vec<Field>) = if name == "Berwald-coeffs" {
        (0..m)
            .flat_map(|g| (0..m).map(move |a| (g, a)))
            .map(|(g, a)| (format!("B[{}][{}]", g + 1, a + 1), bc.coeff(g, a).clone()))
            .unzip()
    } else {
        let suite = CurvatureSuite::new(&bc, scenario.options.dimension).map_err(|e| e.to_string())?;
        let t = suite
            .tensor(name)
            .ok_or_else(|| format!("unknown tensor `{name}`, expected one of {}", TENSORS.join(", ")))?;
        let k = t.arity();
        let tuples = spraygeom_core::tensor::index_tuples(m, k);
        (0..m)
            .flat_map(|o| tuples.iter().map(move |args| (o, args)))
            .map(|(o, args)| {
                let idx: String = args.iter().map(|a| format!("[{}]", a + 1)).collect();
                (format!("{name}[{}]{idx}", o + 1), t.get(o, args).clone())
            })
            .unzip()
    };
    let values = Plan::values_of(sp, &fields).values(point).map_err(|e| e.to_string())?;
    Ok(labels.into_iter().zip(values).collect())
}
