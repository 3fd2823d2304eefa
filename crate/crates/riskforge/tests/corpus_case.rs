//! End-to-end checks of the bundled healthcare corpus: frozen scores and
//! ranges, oracle equivalence of the path family, scenario recomputation,
//! round-trips, and golden outputs.

use std::collections::BTreeSet;
use std::path::PathBuf;

use riskforge::corpus::{g1_framework_vectors, goldens, load_corpus, G1_HEALTHCARE};
use riskforge::likelihood::range_text;
use riskforge::model::{AttackTree, AttackerProfile, PathRole};
use riskforge::paths::{
    brute_force_paths, enumerate_paths, shared_precondition_report, DEFAULT_PATH_BUDGET,
};
use riskforge::report::{
    export_dot, framework_rows, render_assessment_table, render_diff,
    render_likelihood_framework, render_matrix, render_shared_preconditions, ReportFormat,
};
use riskforge::risk::{assess_goal, TieBreak};
use riskforge::scenario::{apply_scenario, whatif};
use riskforge::{export_canonical, parse_document, serialize_document, validate_bundle};

fn corpus() -> riskforge::AssessmentBundle {
    load_corpus(G1_HEALTHCARE).unwrap()
}

fn repo_root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..")
}

#[test]
fn corpus_validates_without_findings() {
    let report = validate_bundle(&corpus());
    assert!(report.findings.is_empty(), "{report}");
}

#[test]
fn risk_scores_match_the_bundled_assessment() {
    let bundle = corpus();
    let rows = assess_goal(&bundle, "G1", &AttackerProfile::INSIDER, DEFAULT_PATH_BUDGET).unwrap();
    let summary: Vec<(&str, u8, u8, u8)> = rows
        .iter()
        .map(|r| (r.risk_id.as_str(), r.likelihood.value(), r.impact.value(), r.score))
        .collect();
    assert_eq!(
        summary,
        vec![
            ("G1-R1", 4, 5, 20),
            ("G1-R3", 4, 4, 16),
            ("G1-R2", 3, 4, 12),
            ("G1-R4", 3, 3, 9),
        ]
    );
    assert_eq!(rows[0].likelihood.label(), "Likely");
    assert_eq!(rows[0].impact.label(), "Catastrophic");
}

#[test]
fn dominant_paths_match_the_case_study_narrative() {
    let bundle = corpus();
    let rows = assess_goal(&bundle, "G1", &AttackerProfile::INSIDER, DEFAULT_PATH_BUDGET).unwrap();
    let by_id = |id: &str| rows.iter().find(|r| r.risk_id == id).unwrap();

    // misdiagnosis rides on direct prompt injection
    assert_eq!(by_id("G1-R1").dominant.vector_ids(), vec!["prompt-injection"]);
    // unauthorized procedures need injection plus orchestration control
    assert_eq!(
        by_id("G1-R2").dominant.vector_ids(),
        vec!["prompt-injection", "orchestrator-error"]
    );
    // contamination is led by session mismanagement; the MitM tie loses on
    // vector order
    let r4 = by_id("G1-R4");
    assert_eq!(r4.dominant.vector_ids(), vec!["llm-session-mismanagement"]);
    assert_eq!(r4.dominant.bindings[0].role, PathRole::Direct);
    assert_eq!(r4.tie_break, TieBreak::VectorOrder);
}

#[test]
fn framework_rows_reproduce_all_six_ranges() {
    let bundle = corpus();
    let vectors = g1_framework_vectors();
    let rows = framework_rows(&bundle, Some(&vectors), DEFAULT_PATH_BUDGET).unwrap();
    let ranges: Vec<String> = rows.iter().map(|r| range_text(r.range)).collect();
    assert_eq!(ranges, vec!["4", "3\u{2013}4", "2\u{2013}3", "2\u{2013}3", "3", "3\u{2013}4"]);
    let requirements: Vec<(&str, &str)> = rows
        .iter()
        .map(|r| (r.business_knowledge.as_str(), r.technical_complexity.as_str()))
        .collect();
    assert_eq!(
        requirements,
        vec![
            ("Low", "Low"),
            ("Medium", "Medium"),
            ("High", "High"),
            ("Medium", "High"),
            ("Low", "Medium"),
            ("Medium", "Medium"),
        ]
    );
}

/// The root is an OR over five leaf-disjoint vectors, so the full minimal
/// family must equal the union of the per-vector families. Each vector
/// subtree is small enough for the brute-force oracle.
#[test]
fn path_family_equals_brute_force_union_over_vectors() {
    let bundle = corpus();
    let tree = bundle.tree.as_ref().unwrap();
    let enumerated: BTreeSet<BTreeSet<String>> = enumerate_paths(tree)
        .unwrap()
        .into_iter()
        .map(|p| p.steps)
        .collect();

    let mut union: BTreeSet<BTreeSet<String>> = BTreeSet::new();
    for vector in tree.node(&tree.root).unwrap().children() {
        let subtree = AttackTree {
            goal_id: tree.goal_id.clone(),
            goal_label: tree.goal_label.clone(),
            root: vector.clone(),
            nodes: tree.nodes.clone(),
        };
        for path in brute_force_paths(&subtree).unwrap() {
            union.insert(path.steps);
        }
    }
    assert_eq!(enumerated.len(), 55);
    assert_eq!(enumerated, union);
}

#[test]
fn harden_prompt_shifts_scores_as_derived() {
    let bundle = corpus();
    let result = whatif(&bundle, "harden-prompt", DEFAULT_PATH_BUDGET).unwrap();
    let by_id = |id: &str| result.diffs.iter().find(|d| d.risk_id == id).unwrap();

    let r1 = by_id("G1-R1");
    assert_eq!((r1.before.score, r1.after_score()), (20, 15));
    assert_eq!(
        r1.after.as_ref().unwrap().dominant.bindings[0].vector_label,
        "Model Tampering"
    );
    assert_eq!(r1.after.as_ref().unwrap().dominant.bindings[0].resolved.resolved, 3);

    let r3 = by_id("G1-R3");
    assert_eq!((r3.before.score, r3.after_score()), (16, 12));

    let r2 = by_id("G1-R2");
    assert_eq!((r2.before.score, r2.after_score()), (12, 8));

    let r4 = by_id("G1-R4");
    assert_eq!(r4.delta_score, 0);
    assert!(!r4.dominant_path_changed);

    // sorted by |delta| descending, ties by id
    let order: Vec<&str> = result.diffs.iter().map(|d| d.risk_id.as_str()).collect();
    assert_eq!(order, vec!["G1-R1", "G1-R2", "G1-R3", "G1-R4"]);

    // no dominant path mentions the disabled vector
    for diff in &result.diffs {
        if let Some(after) = &diff.after {
            assert!(after.dominant.vector_ids().iter().all(|v| *v != "prompt-injection"));
        }
    }
}

#[test]
fn sanitizing_third_party_content_prunes_the_shared_enabler() {
    let bundle = corpus();
    let derived = apply_scenario(&bundle, "sanitize-third-party").unwrap();
    let tree = derived.tree.as_ref().unwrap();
    assert!(!tree.contains("embed-hidden-instructions"));
    assert!(!tree.contains("kb-poisoning"));
    assert!(!tree.contains("indirect-injection"), "the AND lost a required child");
    assert!(tree.contains("direct-injection"));
    // 5 channel picks x 2 direct methods
    let paths = {
        let subtree = AttackTree {
            goal_id: tree.goal_id.clone(),
            goal_label: tree.goal_label.clone(),
            root: "prompt-injection".to_string(),
            nodes: tree.nodes.clone(),
        };
        enumerate_paths(&subtree).unwrap()
    };
    assert_eq!(paths.len(), 10);
}

#[test]
fn external_profile_clamps_the_orchestrator_pin() {
    let bundle = corpus();
    let result = whatif(&bundle, "no-insider", DEFAULT_PATH_BUDGET).unwrap();
    let by_id = |id: &str| result.diffs.iter().find(|d| d.risk_id == id).unwrap();
    assert_eq!(by_id("G1-R1").delta_score, 0);
    assert_eq!(by_id("G1-R3").delta_score, 0);
    assert_eq!(by_id("G1-R4").delta_score, 0);
    // the injection+orchestration pair decays once the insider-informed
    // pin clamps to the external ceiling
    let r2 = by_id("G1-R2");
    assert_eq!((r2.before.score, r2.after_score()), (12, 8));
    assert!(r2.dominant_path_changed);
}

#[test]
fn shared_precondition_analysis_links_injection_and_poisoning() {
    let bundle = corpus();
    let tree = bundle.tree.as_ref().unwrap();
    let paths = enumerate_paths(tree).unwrap();
    let rows = shared_precondition_report(&bundle, &paths);
    assert_eq!(rows.len(), 8, "every declared precondition is referenced");

    let shared = rows
        .iter()
        .find(|r| r.precondition == "p-unsanitized-third-party")
        .unwrap();
    let leaves: Vec<&str> = shared.dependent_leaves.iter().map(String::as_str).collect();
    assert_eq!(leaves, vec!["embed-hidden-instructions", "kb-poisoning"]);
    assert_eq!(shared.path_count, 20);
    let risks: Vec<&str> = shared.affected_risks.iter().map(String::as_str).collect();
    assert_eq!(risks, vec!["G1-R1", "G1-R2", "G1-R3"]);

    // ranking is (risk count, path count) descending
    for pair in rows.windows(2) {
        let a = (pair[0].affected_risks.len(), pair[0].path_count);
        let b = (pair[1].affected_risks.len(), pair[1].path_count);
        assert!(a >= b, "{a:?} then {b:?}");
    }
}

#[test]
fn corpus_round_trips_and_exports_deterministically() {
    let bundle = corpus();
    let serialized = serialize_document(&bundle).unwrap();
    let reparsed = parse_document(&serialized).unwrap();
    assert_eq!(bundle, reparsed);
    assert_eq!(serialized, serialize_document(&reparsed).unwrap());

    let first = export_canonical(&bundle).unwrap();
    let second = export_canonical(&reparsed).unwrap();
    assert_eq!(first, second);
}

#[test]
fn golden_outputs_are_reproduced_byte_exactly() {
    let bundle = corpus();
    let budget = DEFAULT_PATH_BUDGET;
    for golden in goldens() {
        let regenerated = match golden.operation {
            "assessment-markdown" | "assessment-csv" => {
                let rows =
                    assess_goal(&bundle, "G1", &AttackerProfile::default(), budget).unwrap();
                let format = if golden.operation.ends_with("csv") {
                    ReportFormat::Csv
                } else {
                    ReportFormat::MarkdownTable
                };
                render_assessment_table(&rows, format)
            }
            "framework" => {
                let vectors = g1_framework_vectors();
                render_likelihood_framework(&bundle, Some(&vectors), budget).unwrap()
            }
            "matrix" => {
                let rows =
                    assess_goal(&bundle, "G1", &AttackerProfile::default(), budget).unwrap();
                render_matrix(&rows)
            }
            "shared-pre" => {
                let tree = bundle.tree.as_ref().unwrap();
                let paths = enumerate_paths(tree).unwrap();
                render_shared_preconditions(&shared_precondition_report(&bundle, &paths))
            }
            "whatif:harden-prompt" => {
                render_diff(&whatif(&bundle, "harden-prompt", budget).unwrap())
            }
            "export-json" => export_canonical(&bundle).unwrap(),
            "export-dot:G1-R1" => {
                let tree = bundle.tree.as_ref().unwrap();
                let risk = bundle.risk("G1-R1").unwrap();
                let assessment =
                    riskforge::assess_risk(risk, &bundle, &AttackerProfile::default(), budget)
                        .unwrap();
                let mut steps = BTreeSet::new();
                for binding in &assessment.dominant.bindings {
                    steps.extend(
                        riskforge::likelihood::vector_dominant_steps(tree, &binding.vector, budget)
                            .unwrap(),
                    );
                }
                export_dot(tree, Some(&steps)).unwrap()
            }
            other => panic!("unknown golden operation {other}"),
        };
        let path = repo_root().join(golden.golden_path);
        let frozen = std::fs::read_to_string(&path)
            .unwrap_or_else(|err| panic!("cannot read {}: {err}", path.display()));
        assert_eq!(regenerated, frozen, "golden drift in {}", golden.golden_path);
        for figure in golden.key_figures {
            assert!(
                regenerated.contains(figure),
                "{} missing key figure {figure:?}",
                golden.operation
            );
        }
    }
}

#[test]
fn node_count_splits_into_leaves_and_internals() {
    let bundle = corpus();
    let tree = bundle.tree.as_ref().unwrap();
    let leaves = tree.leaf_count();
    let internals = tree.nodes.values().filter(|n| !n.is_leaf()).count();
    assert_eq!(tree.nodes.len(), leaves + internals);
    assert_eq!((tree.nodes.len(), leaves, internals), (52, 34, 18));
    assert_eq!(tree.dfs_order().len(), tree.nodes.len(), "each node reachable exactly once");
}

#[test]
fn assessments_are_deterministic() {
    let bundle = corpus();
    let first = assess_goal(&bundle, "G1", &AttackerProfile::INSIDER, DEFAULT_PATH_BUDGET).unwrap();
    let second =
        assess_goal(&bundle, "G1", &AttackerProfile::INSIDER, DEFAULT_PATH_BUDGET).unwrap();
    assert_eq!(first, second);
    let third = assess_goal(
        &load_corpus(G1_HEALTHCARE).unwrap(),
        "G1",
        &AttackerProfile::INSIDER,
        DEFAULT_PATH_BUDGET,
    )
    .unwrap();
    assert_eq!(first, third, "fresh parse, identical assessment");
}

#[test]
fn dot_export_covers_every_node_and_flags_connectors() {
    let bundle = corpus();
    let tree = bundle.tree.as_ref().unwrap();
    let dot = export_dot(tree, None).unwrap();
    let declared = dot.lines().filter(|l| l.contains("[label=")).count();
    assert_eq!(declared, tree.nodes.len());
    let edges = dot.lines().filter(|l| l.contains("->")).count();
    assert_eq!(edges, tree.nodes.len() - 1, "a tree has n-1 edges");
}
