//! Bundled assessment corpora. The healthcare bundle encodes an LLM-driven
//! clinical decision-support system: five components, eight trust
//! boundaries, a five-vector attack tree for the goal of intervening in
//! medical procedures, a four-risk register, and canned what-if scenarios.

use crate::atdl::{parse_document_named, ParseError};
use crate::error::EngineError;
use crate::model::AssessmentBundle;

/// Name of the bundled healthcare corpus.
pub const G1_HEALTHCARE: &str = "g1-healthcare";

const G1_HEALTHCARE_TEXT: &str = include_str!("../../../corpus/g1-healthcare.atdl");

/// All bundled corpus names.
pub fn corpus_names() -> &'static [&'static str] {
    &[G1_HEALTHCARE]
}

/// Load a bundled corpus by name.
pub fn load_corpus(name: &str) -> Result<AssessmentBundle, EngineError> {
    let text = match name {
        G1_HEALTHCARE => G1_HEALTHCARE_TEXT,
        other => return Err(EngineError::UnknownCorpus(other.to_string())),
    };
    let bundle: Result<AssessmentBundle, ParseError> =
        parse_document_named(text, &format!("corpus/{name}.atdl"));
    Ok(bundle.expect("bundled corpus must parse"))
}

/// The six framework-table rows for the healthcare corpus: the five
/// top-level vectors plus the session hijack/fixation sub-vector, which the
/// register's session analysis leans on.
pub fn g1_framework_vectors() -> Vec<String> {
    [
        "prompt-injection",
        "llm-session-mismanagement",
        "orchestrator-error",
        "model-tampering",
        "mitm-web-session",
        "session-hijack-fixation",
    ]
    .into_iter()
    .map(String::from)
    .collect()
}

/// A frozen expectation over a corpus operation: the golden file it must
/// reproduce byte-exactly plus key figures that must appear in the output.
#[derive(Debug, Clone)]
pub struct GoldenExpectation {
    pub corpus: &'static str,
    /// Operation tag interpreted by the golden test harness.
    pub operation: &'static str,
    /// Golden file path relative to the repository root.
    pub golden_path: &'static str,
    /// Substrings the regenerated output must contain.
    pub key_figures: &'static [&'static str],
}

/// Golden expectations for the healthcare corpus.
pub fn goldens() -> Vec<GoldenExpectation> {
    vec![
        GoldenExpectation {
            corpus: G1_HEALTHCARE,
            operation: "assessment-markdown",
            golden_path: "corpus/golden/g1-assessment.md",
            key_figures: &[
                "| G1-R1 | Misdiagnosis of Critical Illness | 4 (Likely) | 5 (Catastrophic) | 20 |",
                "| G1-R3 | Corrupted Medication Recommendations | 4 (Likely) | 4 (Major) | 16 |",
                "| G1-R2 | Unauthorized Procedures Executed | 3 (Possible) | 4 (Major) | 12 |",
                "| G1-R4 | Cross-Patient Context Contamination | 3 (Possible) | 3 (Moderate) | 9 |",
            ],
        },
        GoldenExpectation {
            corpus: G1_HEALTHCARE,
            operation: "assessment-csv",
            golden_path: "corpus/golden/g1-assessment.csv",
            key_figures: &["G1-R1,Misdiagnosis of Critical Illness,4 (Likely),5 (Catastrophic),20,"],
        },
        GoldenExpectation {
            corpus: G1_HEALTHCARE,
            operation: "framework",
            golden_path: "corpus/golden/g1-framework.md",
            key_figures: &[
                "| Prompt Injection | Low | Low | 4 |",
                "| LLM Session Mismanagement | Medium | Medium | 3\u{2013}4 |",
                "| Orchestrator Error | High | High | 2\u{2013}3 |",
                "| Model Tampering | Medium | High | 2\u{2013}3 |",
                "| MitM Web Session | Low | Medium | 3 |",
                "| Session Hijack / Fixation | Medium | Medium | 3\u{2013}4 |",
            ],
        },
        GoldenExpectation {
            corpus: G1_HEALTHCARE,
            operation: "matrix",
            golden_path: "corpus/golden/g1-matrix.md",
            key_figures: &["| 4 (Likely) |  |  |  | G1-R3 | G1-R1 |", "| 3 (Possible) |  |  | G1-R4 | G1-R2 |  |"],
        },
        GoldenExpectation {
            corpus: G1_HEALTHCARE,
            operation: "shared-pre",
            golden_path: "corpus/golden/g1-shared-pre.md",
            key_figures: &["embed-hidden-instructions, kb-poisoning"],
        },
        GoldenExpectation {
            corpus: G1_HEALTHCARE,
            operation: "whatif:harden-prompt",
            golden_path: "corpus/golden/g1-whatif-harden-prompt.md",
            key_figures: &["| G1-R1 | 20\u{2192}15 | -5 |", "| G1-R3 | 16\u{2192}12 | -4 |"],
        },
        GoldenExpectation {
            corpus: G1_HEALTHCARE,
            operation: "export-json",
            golden_path: "corpus/golden/g1-canonical.json",
            key_figures: &["\"goal_id\": \"G1\""],
        },
        GoldenExpectation {
            corpus: G1_HEALTHCARE,
            operation: "export-dot:G1-R1",
            golden_path: "corpus/golden/g1-tree-r1.dot",
            key_figures: &["digraph attack_tree {"],
        },
    ]
}
