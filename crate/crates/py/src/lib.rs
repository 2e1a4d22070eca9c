//! Python module `chunkwm`: environments, replay trials and the evaluation
//! helpers. Records cross the boundary as JSONL text.

use chunkwm_core::agent::{records_from_jsonl, records_to_jsonl, run_trial, AgentConfig, Variant};
use chunkwm_core::backend::ReplayBackend;
use chunkwm_core::domains::{load_domain, DomainKind};
use chunkwm_core::env;
use chunkwm_core::eval::{render_table, summarize_metrics, wilcoxon_signed_rank};
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

fn value_err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn kind(task: &str) -> PyResult<DomainKind> {
    task.parse().map_err(value_err)
}

fn variant(v: &str) -> PyResult<Variant> {
    v.parse().map_err(value_err)
}

/// Names of the bundled tasks.
#[pyfunction]
fn tasks() -> Vec<&'static str> {
    DomainKind::ALL.iter().map(|k| k.name()).collect()
}

/// Bundled instance ids of a task.
#[pyfunction]
fn instances(task: &str) -> PyResult<Vec<&'static str>> {
    Ok(kind(task)?.instances())
}

/// One text-game episode.
#[pyclass(module = "chunkwm")]
struct Environment {
    inner: env::Environment,
}

#[pymethods]
impl Environment {
    #[new]
    fn new(task: &str, instance: &str) -> PyResult<Self> {
        let t = load_domain(kind(task)?, instance).map_err(value_err)?;
        Ok(Self {
            inner: env::Environment::new(t.state, t.goal),
        })
    }

    fn observation(&self) -> String {
        self.inner.observation()
    }

    fn goal_text(&self) -> String {
        self.inner.goal_text()
    }

    /// `(met, total)` goal conditions.
    fn progress(&self) -> (u32, u32) {
        let p = self.inner.progress();
        (p.met, p.total)
    }

    fn valid_actions(&self) -> Vec<String> {
        self.inner.valid_actions().iter().map(|a| self.inner.surface(a)).collect()
    }

    /// Returns `(observation, executable, done)`.
    fn act(&mut self, action: &str) -> (String, bool, bool) {
        let o = self.inner.act(action);
        (o.observation, o.executable, o.done)
    }
}

/// Runs one trial against scripted replies and returns its record as a JSON line.
#[pyfunction]
#[pyo3(signature = (task, instance, variant_name, replies, max_steps = AgentConfig::DEFAULT_MAX_STEPS))]
fn run_replay(task: &str, instance: &str, variant_name: &str, replies: Vec<String>, max_steps: usize) -> PyResult<String> {
    let t = load_domain(kind(task)?, instance).map_err(value_err)?;
    let mut config = AgentConfig::new(variant(variant_name)?);
    config.max_steps = max_steps;
    let policy = ReplayBackend::new(replies);
    let record = run_trial(&config, &t, &policy, None).map_err(|f| value_err(f.error))?;
    Ok(records_to_jsonl(std::slice::from_ref(&record), false))
}

/// Replies that walk the bundled reference plan.
#[pyfunction]
fn plan_script(task: &str, instance: &str, variant_name: &str) -> PyResult<Vec<String>> {
    chunkwm_core::fixtures::plan_script(kind(task)?, instance, variant(variant_name)?).map_err(value_err)
}

/// Metrics table for a JSONL record set.
#[pyfunction]
#[pyo3(signature = (records_jsonl, baseline = Some("STD")))]
fn report(records_jsonl: &str, baseline: Option<&str>) -> PyResult<String> {
    let records = records_from_jsonl(records_jsonl).map_err(value_err)?;
    let baseline = baseline.map(variant).transpose()?;
    let summary = summarize_metrics(&records, baseline).map_err(value_err)?;
    Ok(render_table(&summary))
}

/// Two-sided Wilcoxon signed-rank test; returns `(statistic, p_value, n)`.
#[pyfunction]
fn wilcoxon(x: Vec<f64>, y: Vec<f64>) -> PyResult<(f64, f64, usize)> {
    let r = wilcoxon_signed_rank(&x, &y).map_err(value_err)?;
    Ok((r.statistic, r.p_value, r.n))
}

/// Runs the environment self-checks; returns `(passed, matrix_text)`.
#[pyfunction]
fn envcheck(task: &str) -> PyResult<(bool, String)> {
    let r = chunkwm_core::envcheck::envcheck(kind(task)?);
    Ok((r.passed(), r.matrix()))
}

#[pymodule]
fn chunkwm(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Environment>()?;
    m.add_function(wrap_pyfunction!(tasks, m)?)?;
    m.add_function(wrap_pyfunction!(instances, m)?)?;
    m.add_function(wrap_pyfunction!(run_replay, m)?)?;
    m.add_function(wrap_pyfunction!(plan_script, m)?)?;
    m.add_function(wrap_pyfunction!(report, m)?)?;
    m.add_function(wrap_pyfunction!(wilcoxon, m)?)?;
    m.add_function(wrap_pyfunction!(envcheck, m)?)?;
    Ok(())
}
