//! Registry of named verification experiments with machine-readable
//! reports.
//!
//! Every experiment is deterministic given its seed and returns a list of
//! named checks `{name, expected, actual, tol, pass}`; the experiment passes
//! iff every check passes. Reports serialize floats with 17 significant
//! digits so identical runs produce byte-identical JSON (modulo the
//! `runtime_ms` field).

mod examples;
mod suites;

use std::time::Instant;

use serde_json::{Map, Value};

use crate::error::{Error, Result};
use crate::exponent::PExponent;
use crate::pnorm::NormEngine;

/// Parameters accepted by every experiment; unset fields take
/// experiment-specific defaults.
#[derive(Clone, Debug, Default)]
pub struct ExperimentParams {
    pub p: Option<f64>,
    pub n: Option<usize>,
    pub seed: u64,
    pub restarts: Option<usize>,
    pub p_grid: Option<Vec<f64>>,
    pub count: Option<usize>,
}

impl ExperimentParams {
    pub fn engine(&self) -> NormEngine {
        NormEngine {
            seed: self.seed,
            restarts: self.restarts,
            ..NormEngine::default()
        }
    }

    pub fn exponent(&self, default: f64) -> Result<PExponent> {
        PExponent::new(self.p.unwrap_or(default))
    }
}

#[derive(Clone, Debug)]
pub struct Check {
    pub name: String,
    pub expected: Value,
    pub actual: Value,
    pub tol: f64,
    pub pass: bool,
}

#[derive(Clone, Debug)]
pub struct ExperimentResult {
    pub experiment: String,
    pub params: Map<String, Value>,
    pub seed: u64,
    pub checks: Vec<Check>,
    pub runtime_ms: u128,
}

impl ExperimentResult {
    pub fn pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn to_json(&self) -> Value {
        let checks: Vec<Value> = self
            .checks
            .iter()
            .map(|c| {
                let mut m = Map::new();
                m.insert("name".into(), Value::String(c.name.clone()));
                m.insert("expected".into(), c.expected.clone());
                m.insert("actual".into(), c.actual.clone());
                m.insert("tol".into(), json_float(c.tol));
                m.insert("pass".into(), Value::Bool(c.pass));
                Value::Object(m)
            })
            .collect();
        let mut root = Map::new();
        root.insert("experiment".into(), Value::String(self.experiment.clone()));
        root.insert("params".into(), Value::Object(self.params.clone()));
        root.insert("seed".into(), Value::Number(self.seed.into()));
        root.insert("checks".into(), Value::Array(checks));
        root.insert(
            "runtime_ms".into(),
            Value::Number((self.runtime_ms as u64).into()),
        );
        Value::Object(root)
    }

    /// Human-oriented rendering: one line per check.
    pub fn render_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!(
            "experiment {} (seed {})\n",
            self.experiment, self.seed
        ));
        for c in &self.checks {
            out.push_str(&format!(
                "  [{}] {}: expected {}, actual {} (tol {:e})\n",
                if c.pass { "PASS" } else { "FAIL" },
                c.name,
                render_value(&c.expected),
                render_value(&c.actual),
                c.tol,
            ));
        }
        out.push_str(&format!(
            "{}: {} in {} ms\n",
            self.experiment,
            if self.pass() { "PASS" } else { "FAIL" },
            self.runtime_ms
        ));
        out
    }
}

fn render_value(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

/// Serialize a float with 17 significant digits; non-finite values fall
/// back to strings since JSON has no literals for them.
pub fn json_float(v: f64) -> Value {
    if !v.is_finite() {
        return Value::String(format!("{v}"));
    }
    let text = format!("{v:.16e}");
    match text.parse::<serde_json::Number>() {
        Ok(n) => Value::Number(n),
        Err(_) => Value::String(text),
    }
}

/// Ordered list of check outcomes under construction.
pub(crate) struct Checks {
    list: Vec<Check>,
}

impl Checks {
    pub(crate) fn new() -> Self {
        Self { list: Vec::new() }
    }

    pub(crate) fn close(&mut self, name: &str, actual: f64, expected: f64, tol: f64) {
        self.list.push(Check {
            name: name.into(),
            expected: json_float(expected),
            actual: json_float(actual),
            tol,
            pass: (actual - expected).abs() <= tol,
        });
    }

    pub(crate) fn at_most(&mut self, name: &str, actual: f64, bound: f64, tol: f64) {
        self.list.push(Check {
            name: name.into(),
            expected: Value::String(format!("<= {}", bound)),
            actual: json_float(actual),
            tol,
            pass: actual <= bound + tol,
        });
    }

    pub(crate) fn at_least(&mut self, name: &str, actual: f64, bound: f64, tol: f64) {
        self.list.push(Check {
            name: name.into(),
            expected: Value::String(format!(">= {}", bound)),
            actual: json_float(actual),
            tol,
            pass: actual >= bound - tol,
        });
    }

    pub(crate) fn flag(&mut self, name: &str, actual: bool, expected: bool) {
        self.list.push(Check {
            name: name.into(),
            expected: Value::Bool(expected),
            actual: Value::Bool(actual),
            tol: 0.0,
            pass: actual == expected,
        });
    }

    pub(crate) fn info(&mut self, name: &str, actual: Value) {
        self.list.push(Check {
            name: name.into(),
            expected: Value::String("reported".into()),
            actual,
            tol: 0.0,
            pass: true,
        });
    }

    pub(crate) fn finish(
        self,
        experiment: &str,
        params: Map<String, Value>,
        seed: u64,
        started: Instant,
    ) -> ExperimentResult {
        ExperimentResult {
            experiment: experiment.into(),
            params,
            seed,
            checks: self.list,
            runtime_ms: started.elapsed().as_millis(),
        }
    }
}

pub(crate) fn params_map(entries: &[(&str, Value)]) -> Map<String, Value> {
    let mut m = Map::new();
    for (k, v) in entries {
        m.insert((*k).to_string(), v.clone());
    }
    m
}

type ExperimentFn = fn(&ExperimentParams) -> Result<ExperimentResult>;

/// The experiment registry, in declaration order.
pub const REGISTRY: &[(&str, ExperimentFn)] = &[
    ("example-mp", examples::example_mp),
    ("example-e7721", examples::example_e7721),
    ("example-mp2", examples::example_mp2),
    ("cayley-sweep", examples::cayley_sweep),
    ("support-suite", suites::support_suite),
    ("states-suite", suites::states_suite),
    ("m-ideal-suite", suites::m_ideal_suite),
    ("unitization-pair", suites::unitization_pair),
    ("uta-collapse", examples::uta_collapse),
    ("riesz-thorin", suites::riesz_thorin),
    ("oracle-vs-power", suites::oracle_vs_power),
];

pub fn experiment_names() -> Vec<&'static str> {
    REGISTRY.iter().map(|(n, _)| *n).collect()
}

/// Run a registered experiment; unknown names are a usage error.
pub fn run_experiment(name: &str, params: &ExperimentParams) -> Result<ExperimentResult> {
    for (key, f) in REGISTRY {
        if *key == name {
            return f(params);
        }
    }
    Err(Error::UnknownExperiment(name.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_experiment_is_an_error() {
        let err = run_experiment("no-such-thing", &ExperimentParams::default());
        assert!(matches!(err, Err(Error::UnknownExperiment(_))));
    }

    #[test]
    fn json_float_has_full_precision() {
        let v = 1.043_372_279_748_089_2_f64;
        let json = serde_json::to_string(&json_float(v)).unwrap();
        let back: f64 = json.trim_matches('"').parse().unwrap();
        assert_eq!(back.to_bits(), v.to_bits());
    }

    #[test]
    fn registry_names_match_spec() {
        let names = experiment_names();
        for expected in [
            "example-mp",
            "example-e7721",
            "example-mp2",
            "cayley-sweep",
            "support-suite",
            "states-suite",
            "m-ideal-suite",
            "unitization-pair",
            "uta-collapse",
            "riesz-thorin",
            "oracle-vs-power",
        ] {
            assert!(names.contains(&expected), "missing {expected}");
        }
    }
}
