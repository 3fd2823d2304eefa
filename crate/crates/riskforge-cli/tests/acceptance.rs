//! Acceptance suite. One test per criterion; each prints a PASS line with
//! the measured figures once its assertions hold.
//!
//! 1. Published assessment reproduction through the CLI (exact integers).
//! 2. Framework table ranges for the six corpus vectors (exact).
//! 3. Base-formula consistency: the 9-cell lookup and the range floors.
//! 4. Oracle equivalence of enumeration vs brute force on random trees.
//! 5. Soundness and minimality of every enumerated path.
//! 6. Scenario monotonicity, plus the corpus hardening shifts.
//! 7. Parser round-trips and canonical export determinism.
//! 8. Scale bijections and verbatim labels in rendered tables.

mod support;

use std::collections::BTreeSet;
use std::path::PathBuf;
use std::process::Command;
use std::time::Instant;

use riskforge::corpus::{g1_framework_vectors, load_corpus, G1_HEALTHCARE};
use riskforge::likelihood::{base_likelihood_levels, range_text};
use riskforge::model::{scale_label, AttackerProfile, Level, ScaleKind};
use riskforge::paths::{brute_force_paths, enumerate_paths, satisfies, DEFAULT_PATH_BUDGET};
use riskforge::report::{framework_rows, render_assessment_table, ReportFormat};
use riskforge::risk::assess_goal;
use riskforge::scenario::{apply, diff_assessments, whatif};
use riskforge::{export_canonical, parse_document, serialize_document};

use support::{gen_bundle, gen_scenario, gen_tree, Rng};

fn corpus_path() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus/g1-healthcare.atdl")
}

fn run_cli(args: &[&str]) -> (String, String, Option<i32>) {
    let output = Command::new(env!("CARGO_BIN_EXE_riskforge"))
        .args(args)
        .output()
        .expect("binary runs");
    (
        String::from_utf8_lossy(&output.stdout).into_owned(),
        String::from_utf8_lossy(&output.stderr).into_owned(),
        output.status.code(),
    )
}

#[test]
fn criterion_1_bundled_assessment_reproduced_exactly() {
    let started = Instant::now();
    let corpus = corpus_path();
    let (stdout, stderr, code) = run_cli(&["score", corpus.to_str().unwrap(), "--goal", "G1"]);
    let elapsed = started.elapsed();
    assert_eq!(code, Some(0), "stderr: {stderr}");

    let expected_rows = [
        "| G1-R1 | Misdiagnosis of Critical Illness | 4 (Likely) | 5 (Catastrophic) | 20 |",
        "| G1-R3 | Corrupted Medication Recommendations | 4 (Likely) | 4 (Major) | 16 |",
        "| G1-R2 | Unauthorized Procedures Executed | 3 (Possible) | 4 (Major) | 12 |",
        "| G1-R4 | Cross-Patient Context Contamination | 3 (Possible) | 3 (Moderate) | 9 |",
    ];
    let mut last = 0;
    for row in expected_rows {
        let at = stdout.find(row).unwrap_or_else(|| panic!("missing row {row:?} in:\n{stdout}"));
        assert!(at >= last, "rows out of rank order");
        last = at;
    }
    assert!(elapsed.as_secs_f64() < 1.0, "took {elapsed:?}");
    println!(
        "PASS criterion 1: scores 20/16/12/9 with (4,5),(4,4),(3,4),(3,3) in {:?}",
        elapsed
    );
}

#[test]
fn criterion_2_framework_ranges_reproduced_exactly() {
    let corpus = corpus_path();
    let vectors = g1_framework_vectors().join(",");
    let (stdout, stderr, code) = run_cli(&[
        "report",
        corpus.to_str().unwrap(),
        "--kind",
        "framework",
        "--vectors",
        &vectors,
    ]);
    assert_eq!(code, Some(0), "stderr: {stderr}");

    let expected = ["4", "3\u{2013}4", "2\u{2013}3", "2\u{2013}3", "3", "3\u{2013}4"];
    let ranges: Vec<String> = stdout
        .lines()
        .skip(2)
        .map(|line| {
            let cells: Vec<&str> = line.split('|').map(str::trim).collect();
            cells[4].to_string()
        })
        .collect();
    assert_eq!(ranges, expected, "in:\n{stdout}");

    // the library agrees
    let bundle = load_corpus(G1_HEALTHCARE).unwrap();
    let rows =
        framework_rows(&bundle, Some(&g1_framework_vectors()), DEFAULT_PATH_BUDGET).unwrap();
    let lib_ranges: Vec<String> = rows.iter().map(|r| range_text(r.range)).collect();
    assert_eq!(lib_ranges, expected);
    println!("PASS criterion 2: framework ranges 4 / 3-4 / 2-3 / 2-3 / 3 / 3-4");
}

#[test]
fn criterion_3_base_formula_matches_the_lookup_and_floors() {
    use Level::*;
    let lookup = [
        ((Low, Low), 4u8),
        ((Low, Medium), 3),
        ((Medium, Low), 3),
        ((Medium, Medium), 3),
        ((Low, High), 2),
        ((High, Low), 2),
        ((Medium, High), 2),
        ((High, Medium), 2),
        ((High, High), 2),
    ];
    for ((bk, tc), expected) in lookup {
        assert_eq!(base_likelihood_levels(bk, tc), expected, "cell ({bk:?},{tc:?})");
    }

    // every framework row's range floor equals its (bk, tc) cell
    let bundle = load_corpus(G1_HEALTHCARE).unwrap();
    let rows =
        framework_rows(&bundle, Some(&g1_framework_vectors()), DEFAULT_PATH_BUDGET).unwrap();
    assert_eq!(rows.len(), 6);
    for row in &rows {
        let parse = |s: &str| match s {
            "Low" => Low,
            "Medium" => Medium,
            "High" => High,
            other => panic!("unexpected level {other}"),
        };
        let cell = base_likelihood_levels(
            parse(&row.business_knowledge),
            parse(&row.technical_complexity),
        );
        assert_eq!(row.range.0, cell, "floor of {}", row.vector);
    }
    println!("PASS criterion 3: 9-cell lookup exact; all 6 range floors equal their cells");
}

#[test]
fn criterion_4_enumeration_equals_brute_force_on_random_trees() {
    let started = Instant::now();
    let mut rng = Rng::new(0x1157_ac3e_5eed_0004);
    let trees = 250;
    for case in 0..trees {
        let tree = gen_tree(&mut rng, 12, 5, &[], &[]);
        let fast = enumerate_paths(&tree)
            .unwrap_or_else(|err| panic!("case {case}: {err}"));
        let slow = brute_force_paths(&tree).unwrap();
        let fast_sets: BTreeSet<BTreeSet<String>> =
            fast.iter().map(|p| p.steps.clone()).collect();
        let slow_sets: BTreeSet<BTreeSet<String>> =
            slow.iter().map(|p| p.steps.clone()).collect();
        assert_eq!(fast_sets, slow_sets, "case {case} diverged");
        // both honor the same deterministic ordering contract
        assert_eq!(fast, slow, "case {case} ordering diverged");
    }
    let elapsed = started.elapsed();
    assert!(elapsed.as_secs() < 30, "took {elapsed:?}");
    println!("PASS criterion 4: {trees} random trees, enumeration == brute force in {elapsed:?}");
}

#[test]
fn criterion_5_paths_are_sound_and_minimal() {
    let mut rng = Rng::new(0x1157_ac3e_5eed_0005);
    let trees = 250;
    let mut paths_checked = 0usize;
    for case in 0..trees {
        let tree = gen_tree(&mut rng, 12, 5, &[], &[]);
        for path in enumerate_paths(&tree).unwrap() {
            assert!(satisfies(&tree, &path.steps), "case {case}: unsound path {path:?}");
            for step in &path.steps {
                let mut reduced = path.steps.clone();
                reduced.remove(step);
                assert!(
                    !satisfies(&tree, &reduced),
                    "case {case}: {step} is redundant in {path:?}"
                );
            }
            paths_checked += 1;
        }
    }
    println!("PASS criterion 5: {paths_checked} paths over {trees} trees all sound and minimal");
}

/// Not a numbered criterion: disabling one leaf keeps the family inside
/// the original one, namely the original paths that avoided the leaf.
#[test]
fn path_family_is_monotone_under_leaf_removal() {
    let mut rng = Rng::new(0x1157_ac3e_5eed_0015);
    for case in 0..100 {
        let bundle = gen_bundle(&mut rng);
        let tree = bundle.tree.as_ref().unwrap();
        let leaves: Vec<String> = tree
            .nodes
            .values()
            .filter(|n| n.is_leaf())
            .map(|n| n.id.clone())
            .collect();
        let victim = rng.pick(&leaves).clone();
        let before: BTreeSet<BTreeSet<String>> = enumerate_paths(tree)
            .unwrap()
            .into_iter()
            .map(|p| p.steps)
            .collect();

        let scenario = riskforge::model::Scenario {
            id: "drop-one".into(),
            disabled: BTreeSet::from([victim.clone()]),
            removed_preconditions: BTreeSet::new(),
            attacker_profile: AttackerProfile::INSIDER,
        };
        let derived = apply(&bundle, &scenario).unwrap();
        let after: BTreeSet<BTreeSet<String>> = match &derived.tree {
            None => BTreeSet::new(),
            Some(tree) => enumerate_paths(tree)
                .unwrap()
                .into_iter()
                .map(|p| p.steps)
                .collect(),
        };
        let expected: BTreeSet<BTreeSet<String>> = before
            .iter()
            .filter(|steps| !steps.contains(&victim))
            .cloned()
            .collect();
        assert_eq!(after, expected, "case {case}: removing {victim} reshaped the family");
    }
}

#[test]
fn criterion_6_mitigation_scenarios_never_raise_scores() {
    // corpus hardening shifts, derived from the bundled pins
    let bundle = load_corpus(G1_HEALTHCARE).unwrap();
    let result = whatif(&bundle, "harden-prompt", DEFAULT_PATH_BUDGET).unwrap();
    let shift = |id: &str| {
        let diff = result.diffs.iter().find(|d| d.risk_id == id).unwrap();
        (diff.before.score, diff.after_score())
    };
    assert_eq!(shift("G1-R1"), (20, 15));
    assert_eq!(shift("G1-R3"), (16, 12));

    // randomized monotonicity
    let mut rng = Rng::new(0x1157_ac3e_5eed_0006);
    let pairs = 150;
    for case in 0..pairs {
        let bundle = gen_bundle(&mut rng);
        let goal = bundle.tree.as_ref().unwrap().goal_id.clone();
        let scenario = gen_scenario(&mut rng, &bundle);
        let baseline =
            assess_goal(&bundle, &goal, &AttackerProfile::INSIDER, DEFAULT_PATH_BUDGET)
                .unwrap_or_else(|err| panic!("case {case} baseline: {err}"));
        let derived = apply(&bundle, &scenario).unwrap();
        let after = if derived.tree.is_some() {
            assess_goal(&derived, &goal, &AttackerProfile::INSIDER, DEFAULT_PATH_BUDGET)
                .unwrap_or_else(|err| panic!("case {case} after: {err}"))
        } else {
            Vec::new()
        };
        for diff in diff_assessments(&baseline, &after) {
            assert!(
                diff.delta_score <= 0,
                "case {case}: {} rose {} -> {} under {:?}",
                diff.risk_id,
                diff.before.score,
                diff.after_score(),
                scenario,
            );
        }
    }
    println!("PASS criterion 6: corpus 20->15 and 16->12; {pairs} random scenarios monotone");
}

#[test]
fn criterion_7_round_trips_and_deterministic_export() {
    // corpus fixpoint
    let bundle = load_corpus(G1_HEALTHCARE).unwrap();
    let reparsed = parse_document(&serialize_document(&bundle).unwrap()).unwrap();
    assert_eq!(bundle, reparsed, "corpus round-trip drifted");

    // random bundles
    let mut rng = Rng::new(0x1157_ac3e_5eed_0007);
    let bundles = 150;
    for case in 0..bundles {
        let bundle = gen_bundle(&mut rng);
        let text = serialize_document(&bundle)
            .unwrap_or_else(|err| panic!("case {case} serialize: {err}"));
        let reparsed = parse_document(&text)
            .unwrap_or_else(|err| panic!("case {case} reparse: {err}\n{text}"));
        assert_eq!(bundle, reparsed, "case {case} round-trip drifted:\n{text}");

        let first = export_canonical(&bundle).unwrap();
        let second = export_canonical(&reparsed).unwrap();
        assert_eq!(first, second, "case {case} export not deterministic");
    }

    // two separate export runs over the corpus are byte-identical
    let a = export_canonical(&load_corpus(G1_HEALTHCARE).unwrap()).unwrap();
    let b = export_canonical(&load_corpus(G1_HEALTHCARE).unwrap()).unwrap();
    assert_eq!(a, b);
    println!("PASS criterion 7: corpus + {bundles} random bundles round-trip, exports byte-stable");
}

#[test]
fn criterion_8_scale_bijections_and_verbatim_labels() {
    let likelihood = ["Rare", "Unlikely", "Possible", "Likely", "Almost Certain"];
    let impact = ["Negligible", "Minor", "Moderate", "Major", "Catastrophic"];
    for value in 1..=5u8 {
        assert_eq!(
            scale_label(value, ScaleKind::Likelihood).unwrap(),
            likelihood[(value - 1) as usize]
        );
        assert_eq!(
            scale_label(value, ScaleKind::Impact).unwrap(),
            impact[(value - 1) as usize]
        );
    }
    // bijectivity: labels are distinct, so value -> label inverts
    for labels in [likelihood, impact] {
        let set: BTreeSet<&str> = labels.iter().copied().collect();
        assert_eq!(set.len(), 5);
    }

    let bundle = load_corpus(G1_HEALTHCARE).unwrap();
    let rows = assess_goal(&bundle, "G1", &AttackerProfile::INSIDER, DEFAULT_PATH_BUDGET).unwrap();
    for format in [ReportFormat::MarkdownTable, ReportFormat::Csv] {
        let text = render_assessment_table(&rows, format);
        assert!(text.contains("4 (Likely)"), "{text}");
        assert!(text.contains("5 (Catastrophic)"), "{text}");
        assert!(text.contains("3 (Possible)"));
        assert!(text.contains("3 (Moderate)"));
        assert!(text.contains("4 (Major)"));
    }
    println!("PASS criterion 8: all ten (value, label) pairs round-trip and render verbatim");
}
