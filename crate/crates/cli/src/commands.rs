use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use chunkwm_core::agent::{
    records_from_jsonl, records_to_jsonl, run_suite, write_trajectory_logs, Backends, TrialRecord, TrialSpec, Variant,
};
use chunkwm_core::backend::{BackendError, ChatBackend, HttpBackend, ReplayBackend};
use chunkwm_core::domains::DomainKind;
use chunkwm_core::envcheck::envcheck;
use chunkwm_core::eval::{emit_report, render_table, step_series, summarize_metrics, ReportFormat};
use chunkwm_core::eval::wilcoxon_signed_rank;
use chunkwm_core::fixtures::plan_script;
use serde::Serialize;
use serde_json::json;

use crate::config::{self, BackendConfig, Experiment};

pub const EXIT_OK: u8 = 0;
pub const EXIT_ERROR: u8 = 1;
pub const EXIT_PARTIAL: u8 = 2;

/// Environment variables checked, in order, for the HTTP API key.
pub const API_KEY_VARS: [&str; 2] = ["CHUNKWM_API_KEY", "OPENAI_API_KEY"];

pub struct GlobalOpts {
    pub json: bool,
    pub out_dir: Option<PathBuf>,
    pub live: bool,
}

impl GlobalOpts {
    fn fail(&self, message: impl std::fmt::Display) -> u8 {
        let message = message.to_string();
        if self.json {
            println!("{}", json!({"ok": false, "error": message}));
        }
        eprintln!("error: {message}");
        EXIT_ERROR
    }

    fn emit<T: Serialize>(&self, value: &T, text: impl FnOnce() -> String) {
        if self.json {
            println!("{}", serde_json::to_string(value).expect("output serializes"));
        } else {
            print!("{}", text());
        }
    }
}

#[derive(Serialize)]
struct Manifest<'a> {
    tool_version: &'static str,
    config_path: String,
    config_hash: &'a str,
    started_at: String,
    finished_at: String,
    backend: String,
    trials_planned: usize,
    trials_completed: usize,
    trials_failed: usize,
    records_file: &'static str,
    failures_file: &'static str,
    logs_dir: &'static str,
}

fn script_name(spec: &TrialSpec) -> String {
    format!("{}-{}-{}.txt", spec.task, spec.instance, spec.variant)
}

type Factory = Box<dyn Fn(&TrialSpec) -> Result<Backends, BackendError> + Sync>;

fn build_backends(opts: &GlobalOpts, exp: &Experiment, max_requests: Option<u64>) -> Result<(Factory, String), String> {
    match &exp.config.backend {
        BackendConfig::Replay(r) => {
            let dir = exp.resolve(&r.script_dir);
            let synthesize = r.synthesize;
            let identity = format!("replay:{}", dir.display());
            let factory: Factory = Box::new(move |spec: &TrialSpec| {
                let path = dir.join(script_name(spec));
                let backend = if path.is_file() {
                    ReplayBackend::from_file(&path)
                        .map_err(|e| BackendError::InvalidRequest(format!("{}: {e}", path.display())))?
                } else if synthesize {
                    let replies = plan_script(spec.task, &spec.instance, spec.variant)
                        .map_err(|e| BackendError::InvalidRequest(e.to_string()))?;
                    ReplayBackend::named(format!("plan:{}-{}", spec.task, spec.instance), replies)
                } else {
                    return Err(BackendError::InvalidRequest(format!("missing script {}", path.display())));
                };
                Ok(Backends::shared(Arc::new(backend)))
            });
            Ok((factory, identity))
        }
        BackendConfig::Http(h) => {
            if !opts.live {
                return Err("the http backend sends paid requests; pass --live to allow it".into());
            }
            let mut http = h.clone();
            http.max_total_requests = max_requests.or(http.max_total_requests);
            if http.max_total_requests.is_none() {
                return Err("live runs need a request ceiling: set backend.max_total_requests or --max-requests".into());
            }
            http.api_key = API_KEY_VARS.iter().find_map(|v| std::env::var(v).ok().filter(|k| !k.is_empty()));
            if http.api_key.is_none() {
                return Err(format!("no API key: set {}", API_KEY_VARS[0]));
            }
            let backend: Arc<dyn ChatBackend> = Arc::new(HttpBackend::new(http));
            let identity = backend.identity();
            let factory: Factory = Box::new(move |_: &TrialSpec| Ok(Backends::shared(backend.clone())));
            Ok((factory, identity))
        }
    }
}

pub fn cmd_run(opts: &GlobalOpts, config_path: &Path, max_requests: Option<u64>) -> u8 {
    let exp = match config::load(config_path) {
        Ok(e) => e,
        Err(e) => return opts.fail(e),
    };
    let out_dir = opts.out_dir.clone().unwrap_or_else(|| exp.resolve(&exp.config.out_dir));
    let (factory, backend_identity) = match build_backends(opts, &exp, max_requests) {
        Ok(f) => f,
        Err(e) => return opts.fail(e),
    };
    if let Err(e) = fs::create_dir_all(&out_dir) {
        return opts.fail(format!("cannot create {}: {e}", out_dir.display()));
    }

    let started_at = chrono::Utc::now().to_rfc3339();
    let result = run_suite(&exp.specs, &exp.agent, exp.config.parallelism, factory);
    let finished_at = chrono::Utc::now().to_rfc3339();

    let manifest = Manifest {
        tool_version: env!("CARGO_PKG_VERSION"),
        config_path: config_path.display().to_string(),
        config_hash: &exp.config_hash,
        started_at,
        finished_at,
        backend: backend_identity,
        trials_planned: exp.specs.len(),
        trials_completed: result.records.len(),
        trials_failed: result.failures.len(),
        records_file: "records.jsonl",
        failures_file: "failures.json",
        logs_dir: "logs",
    };
    let written = (|| -> std::io::Result<()> {
        fs::write(out_dir.join("records.jsonl"), records_to_jsonl(&result.records, true))?;
        fs::write(
            out_dir.join("failures.json"),
            serde_json::to_string_pretty(&result.failures).map_err(std::io::Error::other)? + "\n",
        )?;
        write_trajectory_logs(&out_dir.join("logs"), &result.records)?;
        fs::write(
            out_dir.join("manifest.json"),
            serde_json::to_string_pretty(&manifest).map_err(std::io::Error::other)? + "\n",
        )
    })();
    if let Err(e) = written {
        return opts.fail(format!("writing results to {}: {e}", out_dir.display()));
    }

    let successes = result.records.iter().filter(|r| r.success).count();
    opts.emit(
        &json!({
            "ok": result.failures.is_empty(),
            "out_dir": out_dir.display().to_string(),
            "config_hash": exp.config_hash,
            "trials": result.records.len(),
            "successes": successes,
            "failures": result.failures,
        }),
        || {
            let mut s = format!(
                "{} trials, {} succeeded, {} failed; results in {}\n",
                result.records.len(),
                successes,
                result.failures.len(),
                out_dir.display()
            );
            for f in &result.failures {
                s.push_str(&format!("  failed {}: {}\n", f.trial_id, f.error));
            }
            s
        },
    );
    if result.failures.is_empty() {
        EXIT_OK
    } else {
        EXIT_PARTIAL
    }
}

fn read_records(path: &Path) -> Result<Vec<TrialRecord>, String> {
    let text = fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    let records = records_from_jsonl(&text).map_err(|e| format!("{}: {e}", path.display()))?;
    if records.is_empty() {
        return Err(format!("{}: no trial records", path.display()));
    }
    Ok(records)
}

pub fn cmd_report(opts: &GlobalOpts, records_path: &Path, baseline: Option<&str>) -> u8 {
    let records = match read_records(records_path) {
        Ok(r) => r,
        Err(e) => return opts.fail(e),
    };
    let baseline = match baseline.map(str::parse::<Variant>).transpose() {
        Ok(b) => b,
        Err(e) => return opts.fail(e),
    };
    let summary = match summarize_metrics(&records, baseline) {
        Ok(s) => s,
        Err(e) => return opts.fail(e),
    };
    let series = step_series(&records, 5).expect("bin width is positive");
    let out_dir = opts.out_dir.clone().unwrap_or_else(|| {
        records_path
            .parent()
            .map(|p| p.join("report"))
            .unwrap_or_else(|| PathBuf::from("report"))
    });
    let written = match emit_report(&summary, &series, &out_dir, &ReportFormat::ALL) {
        Ok(w) => w,
        Err(e) => return opts.fail(e),
    };
    opts.emit(
        &json!({
            "ok": true,
            "files": written.iter().map(|p| p.display().to_string()).collect::<Vec<_>>(),
            "summary": summary,
        }),
        || render_table(&summary),
    );
    EXIT_OK
}

/// Per-trial value of a metric; failed trials count the full step budget.
fn metric_value(r: &TrialRecord, steps: bool) -> f64 {
    if steps {
        (if r.success { r.steps_used } else { r.max_steps }) as f64
    } else {
        100.0 * r.max_progress
    }
}

pub fn cmd_stats(opts: &GlobalOpts, records_path: &Path, steps: bool, a: &str, b: &str) -> u8 {
    let records = match read_records(records_path) {
        Ok(r) => r,
        Err(e) => return opts.fail(e),
    };
    let (va, vb) = match (a.parse::<Variant>(), b.parse::<Variant>()) {
        (Ok(x), Ok(y)) => (x, y),
        (Err(e), _) | (_, Err(e)) => return opts.fail(e),
    };
    let collect = |v: Variant| -> BTreeMap<(DomainKind, String, u64), f64> {
        records
            .iter()
            .filter(|r| r.variant == v)
            .map(|r| ((r.task, r.instance.clone(), r.seed), metric_value(r, steps)))
            .collect()
    };
    let (ma, mb) = (collect(va), collect(vb));
    if ma.is_empty() || mb.is_empty() {
        return opts.fail(format!("no records for {}", if ma.is_empty() { va } else { vb }));
    }
    if ma.keys().ne(mb.keys()) {
        let unpaired: Vec<String> = ma
            .keys()
            .filter(|k| !mb.contains_key(*k))
            .chain(mb.keys().filter(|k| !ma.contains_key(*k)))
            .map(|(t, i, s)| format!("{t}/{i}/seed {s}"))
            .collect();
        return opts.fail(format!("unpaired records: {}", unpaired.join(", ")));
    }
    let x: Vec<f64> = ma.values().copied().collect();
    let y: Vec<f64> = mb.values().copied().collect();
    match wilcoxon_signed_rank(&x, &y) {
        Ok(res) => {
            opts.emit(
                &json!({
                    "ok": true,
                    "metric": if steps { "steps" } else { "pr" },
                    "variant_a": va,
                    "variant_b": vb,
                    "pairs": x.len(),
                    "result": res,
                }),
                || {
                    format!(
                        "{} vs {} on {} ({} pairs, {} non-zero): W = {}, p = {:.6e}\n",
                        va,
                        vb,
                        if steps { "steps" } else { "pr" },
                        x.len(),
                        res.n,
                        res.statistic,
                        res.p_value
                    )
                },
            );
            EXIT_OK
        }
        Err(e) => opts.fail(e),
    }
}

pub fn cmd_envcheck(opts: &GlobalOpts, task: &str) -> u8 {
    let kinds: Vec<DomainKind> = if task.eq_ignore_ascii_case("all") {
        DomainKind::ALL.to_vec()
    } else {
        match task.parse() {
            Ok(k) => vec![k],
            Err(e) => return opts.fail(e),
        }
    };
    let reports: Vec<_> = kinds.into_iter().map(envcheck).collect();
    let ok = reports.iter().all(|r| r.passed());
    opts.emit(&json!({"ok": ok, "reports": reports}), || {
        let mut s = String::new();
        for r in &reports {
            s.push_str(&format!("== {}\n{}", r.task, r.matrix()));
        }
        let failed: Vec<String> = reports
            .iter()
            .flat_map(|r| r.failures().map(move |f| format!("{}/{}/{}", r.task, f.check, f.instance)))
            .collect();
        if failed.is_empty() {
            s.push_str("all checks passed\n");
        } else {
            s.push_str(&format!("failed: {}\n", failed.join(", ")));
        }
        s
    });
    if ok {
        EXIT_OK
    } else {
        EXIT_ERROR
    }
}
