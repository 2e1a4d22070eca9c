//! Golden files: prompts as they appear in the worked examples, and the
//! report shapes for a hand-computed record set.

mod common;

use chunkwm_core::agent::{run_trial, AgentConfig, StepRecord, TrialRecord, Variant};
use chunkwm_core::backend::{build_prompt, prompt_header, AgentDecision, PromptLayout, ReplayBackend};
use chunkwm_core::domains::DomainKind;
use chunkwm_core::env::Environment;
use chunkwm_core::eval::{emit_report, render_table, series_csv, step_series, summarize_metrics, ReportFormat};
use chunkwm_core::memory::WorkingMemory;
use common::{fixture, load};

// The worked examples render `on(w1, the-hub1)` two ways: "Wheel w1 is on
// hub the-hub1." in the example transcript and "W1 is on the-hub1." in the
// task prompts. The environment has one template (the transcript's, which
// the replay must reproduce), so the prompt goldens swap that sentence.
const PAPER_T2_INIT: &str = "The nut nuts1 on the hub the-hub1 is tight. W1 is on the-hub1. Wheel r1 is intact. Wheel r1 is not inflated. Wrench is in boot.";
const T2_INIT: &str = "The nut nuts1 on the hub the-hub1 is tight. Wheel r1 is intact. Wheel r1 is not inflated. Wheel w1 is on hub the-hub1. Wrench is in boot.";

fn prompt_golden(name: &str) -> String {
    let text = fixture(name);
    assert_eq!(text.matches(PAPER_T2_INIT).count(), 1);
    text.replace(PAPER_T2_INIT, T2_INIT)
}

#[test]
fn std_prompt_after_transcript() {
    let task = load(DomainKind::Tyreworld, "t2");
    let policy = ReplayBackend::from_text("t2", &fixture("tyreworld_t2_std_transcript.txt"));
    let mut config = AgentConfig::new(Variant::Std);
    config.max_steps = 8;
    // the eighth request exhausts the script; its prompt is the one shown
    let failure = run_trial(&config, &task, &policy, None).unwrap_err();
    assert_eq!(failure.steps_completed, 7);
    let prompts = policy.prompts();
    assert_eq!(prompts.len(), 8);
    assert_eq!(format!("{}\n", prompts[7]), prompt_golden("golden_std_t2_prompt.txt"));
}

#[test]
fn ours_prompt_tail() {
    let task = load(DomainKind::Tyreworld, "t2");
    let env = Environment::new(task.state.clone(), task.goal.clone());
    let mut mem = WorkingMemory::chunked(env.observation());
    // subgoals keep the leading space of the reply they were parsed from;
    // the first three chunks closed without a verdict
    let closed: [(&str, &str, Option<bool>); 4] = [
        (" Open the boot to access the tools.", "Boot is open.", None),
        (" Fetch the wrench from the boot.", "You have wrench.", None),
        (" Loosen the nut on the hub the-hub1.", "The nut nuts1 on the hub the-hub1 is loose.", None),
        (
            " Fetch the jack from the boot and jack up the hub the-hub1.",
            "You have jack and hub the-hub1 is elevated. Subgoal is met.",
            Some(true),
        ),
    ];
    for (subgoal, summary, met) in closed {
        mem.open_subgoal(subgoal).unwrap();
        mem.append_step("x", "y", true).unwrap();
        mem.close_chunk(summary, met).unwrap();
    }
    mem.open_subgoal(" Unfasten the nut nuts1 and remove wheel w1 from the hub the-hub1.").unwrap();
    mem.append_step("undo nuts1 on the-hub1", "Hub the-hub1 is unfastened. You have nuts1.", true).unwrap();
    mem.append_step("Remove-wheel w1 from the-hub1", "The-hub1 is free.  You have w1.", true).unwrap();

    let prompt = build_prompt(PromptLayout::Ours, task.instructions, task.example_ours, &env.goal_text(), &mem);
    let golden = prompt_golden("golden_ours_t2_tail.txt");
    let text = format!("{}\n", prompt.user_text);
    assert!(text.ends_with(&golden), "prompt tail:\n{text}");
    // everything before the tail is instructions, note and example
    let head = &text[..text.len() - golden.len()];
    assert!(head.starts_with(task.instructions));
    assert!(head.contains("\nNote: A subgoal is a milestone goal"));
    assert!(head.ends_with(&format!("{}\n", task.example_ours)));
}

#[test]
fn header_is_prompt_prefix() {
    let task = load(DomainKind::Tyreworld, "t1");
    let env = Environment::new(task.state.clone(), task.goal.clone());
    for (layout, example) in [(PromptLayout::Std, task.example_std), (PromptLayout::Ours, task.example_ours)] {
        let header = prompt_header(layout, task.instructions, example, &env.goal_text());
        let mem = WorkingMemory::flat(env.observation());
        let prompt = build_prompt(layout, task.instructions, example, &env.goal_text(), &mem);
        assert_eq!(prompt.user_text, format!("{header}Observation: {}", env.observation()));
    }
}

// ---------------------------------------------------------------------------

fn record(variant: Variant, n: usize, progress: &[f64], exec: &[bool], ctx: usize, wall: f64) -> TrialRecord {
    let per_step: Vec<StepRecord> = progress
        .iter()
        .zip(exec)
        .enumerate()
        .map(|(i, (&p, &e))| StepRecord {
            step_index: i + 1,
            decision: AgentDecision::Act { action: "a".into() },
            action_text: "a".into(),
            observation: "o".into(),
            executable: e,
            progress: p,
            context_tokens: ctx,
            wall_ms: 1.0,
        })
        .collect();
    let max_progress = progress.iter().copied().fold(0.0, f64::max);
    TrialRecord {
        trial_id: format!("tyreworld-t1-{variant}-s{n}"),
        task: DomainKind::Tyreworld,
        instance: "t1".into(),
        variant,
        seed: n as u64,
        max_steps: 10,
        steps_used: per_step.len(),
        per_step,
        initial_progress: 0.0,
        final_progress: *progress.last().unwrap(),
        max_progress,
        success: max_progress == 1.0,
        chunks: 0,
        total_wall_ms: wall,
        degradations: vec![],
        events: vec![],
    }
}

fn golden_records() -> Vec<TrialRecord> {
    let odd_fail: Vec<bool> = (1..=10).map(|i| i % 2 == 0).collect();
    vec![
        record(Variant::Std, 0, &[0.25, 0.5, 0.75, 1.0], &[true; 4], 100, 200.0),
        record(Variant::Std, 1, &[0.5; 10], &odd_fail, 200, 400.0),
        record(Variant::Ours, 0, &[0.5, 1.0], &[true; 2], 60, 150.0),
        record(Variant::Ours, 1, &[0.0, 0.0, 0.0, 0.0, 0.5, 1.0], &[true; 6], 90, 450.0),
    ]
}

#[test]
fn report_table_golden() {
    let summary = summarize_metrics(&golden_records(), Some(Variant::Std)).unwrap();
    assert_eq!(render_table(&summary), fixture("golden_report.txt"));
}

#[test]
fn series_csv_golden() {
    let series = step_series(&golden_records(), 5).unwrap();
    assert_eq!(series_csv(&series, false), fixture("golden_progress_by_step.csv"));
    assert_eq!(series_csv(&series, true), fixture("golden_executability_by_step.csv"));
}

#[test]
fn emitted_files() {
    let records = golden_records();
    let summary = summarize_metrics(&records, Some(Variant::Std)).unwrap();
    let series = step_series(&records, 5).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let written = emit_report(&summary, &series, dir.path(), &ReportFormat::ALL).unwrap();
    let names: Vec<_> = written.iter().map(|p| p.file_name().unwrap().to_str().unwrap().to_string()).collect();
    assert_eq!(names, ["report.txt", "progress_by_step.csv", "executability_by_step.csv", "report.json"]);
    assert_eq!(std::fs::read_to_string(dir.path().join("report.txt")).unwrap(), fixture("golden_report.txt"));
    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("report.json")).unwrap()).unwrap();
    assert_eq!(json["schema_version"], 1);
    assert_eq!(json["summary"]["rows"].as_array().unwrap().len(), 2);
    assert_eq!(json["series"]["bin_width"], 5);
}
