//! Residual sets and their evaluation over sample points.

use rayon::prelude::*;

use crate::field::{Field, Space};
use crate::plan::Plan;

/// A named identity, expressed as component fields that must all vanish.
#[derive(Debug, Clone)]
pub struct Residual {
    pub name: String,
    pub components: Vec<Field>,
}

impl Residual {
    pub fn new(name: impl Into<String>, components: Vec<Field>) -> Residual {
        Residual {
            name: name.into(),
            components,
        }
    }

    /// Componentwise difference `lhs - rhs`.
    pub fn difference(name: impl Into<String>, lhs: &[Field], rhs: &[Field]) -> Residual {
        assert_eq!(lhs.len(), rhs.len(), "component count mismatch");
        Residual::new(name, lhs.iter().zip(rhs).map(|(a, b)| a - b).collect())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResidualStats {
    /// Max over points of the max absolute component.
    pub max: f64,
    /// Mean over points of the max absolute component.
    pub mean: f64,
    pub evaluated: usize,
    pub skipped: usize,
    pub first_error: Option<String>,
}

impl ResidualStats {
    /// More than 10% of the points failed to evaluate.
    pub fn inconclusive(&self) -> bool {
        self.skipped * 10 > (self.evaluated + self.skipped)
    }

    pub fn within(&self, tol: f64) -> bool {
        !self.inconclusive() && self.evaluated > 0 && self.max <= tol
    }
}

fn point_max(values: &[f64]) -> f64 {
    values.iter().fold(0.0f64, |m, v| m.max(v.abs()))
}

/// Evaluate every residual at every point. All sets share one compiled plan;
/// when a point fails, the sets are retried separately at that point so that
/// only the sets that actually fail are charged with a skip.
pub fn evaluate(space: Space, sets: &[Residual], points: &[Vec<f64>]) -> Vec<ResidualStats> {
    let roots: Vec<Field> = sets.iter().flat_map(|s| s.components.iter().cloned()).collect();
    let plan = Plan::values_of(space, &roots);
    let mut bounds = Vec::with_capacity(sets.len());
    let mut start = 0;
    for s in sets {
        bounds.push((start, start + s.components.len()));
        start += s.components.len();
    }

    let shared: Vec<Result<Vec<f64>, String>> = points
        .par_iter()
        .map(|p| {
            plan.values(p)
                .map(|v| bounds.iter().map(|&(a, b)| point_max(&v[a..b])).collect())
                .map_err(|e| e.to_string())
        })
        .collect();

    let per_set: Option<Vec<Plan>> = shared
        .iter()
        .any(|r| r.is_err())
        .then(|| sets.iter().map(|s| Plan::values_of(space, &s.components)).collect());

    let mut stats: Vec<ResidualStats> = sets
        .iter()
        .map(|_| ResidualStats {
            max: 0.0,
            mean: 0.0,
            evaluated: 0,
            skipped: 0,
            first_error: None,
        })
        .collect();
    let mut sums = vec![0.0; sets.len()];

    for (p, r) in points.iter().zip(&shared) {
        match r {
            Ok(maxes) => {
                for (k, v) in maxes.iter().enumerate() {
                    record(&mut stats[k], &mut sums[k], Ok(*v));
                }
            }
            Err(_) => {
                let plans = per_set.as_ref().expect("fallback plans");
                for (k, plan) in plans.iter().enumerate() {
                    let v = plan.values(p).map(|v| point_max(&v)).map_err(|e| e.to_string());
                    record(&mut stats[k], &mut sums[k], v);
                }
            }
        }
    }
    for (s, sum) in stats.iter_mut().zip(sums) {
        if s.evaluated > 0 {
            s.mean = sum / s.evaluated as f64;
        }
    }
    stats
}

fn record(stats: &mut ResidualStats, sum: &mut f64, value: Result<f64, String>) {
    match value {
        Ok(v) => {
            stats.evaluated += 1;
            stats.max = stats.max.max(v);
            *sum += v;
        }
        Err(e) => {
            stats.skipped += 1;
            stats.first_error.get_or_insert(e);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;

    #[test]
    fn skips_are_attributed_per_set() {
        let s = Space::new(0, 1);
        let f = |t: &str| Field::from_expr(&parse(t, 0, 1).unwrap(), s);
        let sets = vec![
            Residual::new("ok", vec![f("y1 - y1")]),
            Residual::new("log", vec![f("log(y1)")]),
        ];
        let points = vec![vec![1.0], vec![-1.0], vec![std::f64::consts::E]];
        let stats = evaluate(s, &sets, &points);
        assert_eq!(stats[0].evaluated, 3);
        assert_eq!(stats[0].max, 0.0);
        assert!(stats[0].within(0.0));
        assert_eq!(stats[1].skipped, 1);
        assert!(stats[1].inconclusive());
        assert!((stats[1].max - 1.0).abs() < 1e-15);
        assert!((stats[1].mean - 0.5).abs() < 1e-15);
    }
}
