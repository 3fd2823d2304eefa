//! Rendering: assessment tables (markdown, CSV, canonical JSON, DOT),
//! the likelihood framework table, the 5x5 risk matrix, shared-precondition
//! rankings, and what-if diffs. All renderings are deterministic functions
//! of their inputs.

use std::collections::BTreeSet;

use serde_json::json;

use crate::error::EngineError;
use crate::likelihood::{range_text, vector_profile};
use crate::model::{AssessmentBundle, AttackTree, NodeId, NodeKind, PathRole};
use crate::paths::{satisfies, satisfies_node, SharedPreconditionRow};
use crate::risk::{risk_matrix, PathAssessment, RiskAssessment};
use crate::scenario::WhatIfResult;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    MarkdownTable,
    Csv,
    CanonicalJson,
    DotGraph,
}

impl ReportFormat {
    pub fn from_keyword(word: &str) -> Option<Self> {
        match word {
            "markdown" | "md" | "markdown-table" => Some(ReportFormat::MarkdownTable),
            "csv" => Some(ReportFormat::Csv),
            "json" | "canonical-json" => Some(ReportFormat::CanonicalJson),
            "dot" | "dot-graph" => Some(ReportFormat::DotGraph),
            _ => None,
        }
    }
}

fn md_cell(text: &str) -> String {
    text.replace('|', "\\|").replace('\n', " ")
}

fn csv_cell(text: &str) -> String {
    if text.contains(',') || text.contains('"') || text.contains('\n') || text.contains('\r') {
        format!("\"{}\"", text.replace('"', "\"\""))
    } else {
        text.to_string()
    }
}

fn dot_label(text: &str) -> String {
    text.replace('\\', "\\\\")
        .replace('"', "\\\"")
        .replace('\n', "\\n")
}

fn binding_list(path: &PathAssessment) -> String {
    path.bindings
        .iter()
        .map(|b| format!("{} ({})", b.vector_label, b.role.display_name()))
        .collect::<Vec<_>>()
        .join(" + ")
}

/// Distinct (vector, role) pairs across all candidate paths, in declaration
/// order.
fn attack_vectors_cell(assessment: &RiskAssessment) -> String {
    let mut seen: Vec<(String, PathRole)> = Vec::new();
    let mut parts = Vec::new();
    for path in &assessment.per_path_detail {
        for binding in &path.bindings {
            let key = (binding.vector.clone(), binding.role);
            if !seen.contains(&key) {
                parts.push(format!(
                    "{} ({})",
                    binding.vector_label,
                    binding.role.display_name()
                ));
                seen.push(key);
            }
        }
    }
    parts.join(", ")
}

const ASSESSMENT_HEADER: [&str; 6] = [
    "Risk ID",
    "Description",
    "Likelihood",
    "Impact",
    "Risk Score",
    "Attack Vectors",
];

/// Render assessments in the requested format. Empty input produces an
/// explicit placeholder instead of an error.
pub fn render_assessment_table(
    assessments: &[RiskAssessment],
    format: ReportFormat,
) -> String {
    match format {
        ReportFormat::MarkdownTable => {
            if assessments.is_empty() {
                return "no risks\n".to_string();
            }
            let mut out = String::new();
            out.push_str(&format!("| {} |\n", ASSESSMENT_HEADER.join(" | ")));
            out.push_str(&format!("|{}\n", " --- |".repeat(ASSESSMENT_HEADER.len())));
            for a in assessments {
                out.push_str(&format!(
                    "| {} | {} | {} | {} | {} | {} |\n",
                    md_cell(&a.risk_id),
                    md_cell(&a.description),
                    a.likelihood,
                    a.impact,
                    a.score,
                    md_cell(&attack_vectors_cell(a)),
                ));
            }
            out
        }
        ReportFormat::Csv => {
            let mut out = String::new();
            out.push_str(&ASSESSMENT_HEADER.join(","));
            out.push('\n');
            for a in assessments {
                let cells = [
                    a.risk_id.clone(),
                    a.description.clone(),
                    a.likelihood.to_string(),
                    a.impact.to_string(),
                    a.score.to_string(),
                    attack_vectors_cell(a),
                ];
                let row: Vec<String> = cells.iter().map(|c| csv_cell(c)).collect();
                out.push_str(&row.join(","));
                out.push('\n');
            }
            out
        }
        ReportFormat::CanonicalJson => {
            let rows: Vec<_> = assessments
                .iter()
                .map(|a| {
                    json!({
                        "risk_id": a.risk_id,
                        "description": a.description,
                        "likelihood": { "value": a.likelihood.value(), "label": a.likelihood.label() },
                        "impact": { "value": a.impact.value(), "label": a.impact.label() },
                        "score": a.score,
                        "dominant_path": a.dominant.bindings.iter().map(|b| json!({
                            "vector": b.vector,
                            "role": b.role.keyword(),
                            "effective_likelihood": b.resolved.effective,
                        })).collect::<Vec<_>>(),
                        "paths": a.per_path_detail.iter().map(|p| json!({
                            "vectors": p.vector_ids(),
                            "likelihood": p.likelihood,
                        })).collect::<Vec<_>>(),
                    })
                })
                .collect();
            let mut text = serde_json::to_string_pretty(&rows).expect("report JSON cannot fail");
            text.push('\n');
            text
        }
        ReportFormat::DotGraph => {
            let mut out = String::from("digraph assessments {\n");
            if !assessments.is_empty() {
                out.push_str("  rankdir=LR;\n  node [shape=box, fontname=\"Helvetica\"];\n");
            }
            for a in assessments {
                out.push_str(&format!(
                    "  \"{}\" [label=\"{}\\nscore {}\", style=filled, fillcolor=lightyellow];\n",
                    dot_label(&a.risk_id),
                    dot_label(&a.risk_id),
                    a.score
                ));
                for binding in &a.dominant.bindings {
                    out.push_str(&format!(
                        "  \"{}\" [label=\"{}\"];\n  \"{}\" -> \"{}\" [label=\"{}\"];\n",
                        dot_label(&binding.vector),
                        dot_label(&binding.vector_label),
                        dot_label(&a.risk_id),
                        dot_label(&binding.vector),
                        binding.role.display_name()
                    ));
                }
            }
            out.push_str("}\n");
            out
        }
    }
}

/// One row of the likelihood framework table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FrameworkRow {
    pub vector: NodeId,
    pub label: String,
    pub business_knowledge: String,
    pub technical_complexity: String,
    pub range: (u8, u8),
    pub justification: String,
}

/// Compute framework rows for the given vectors, defaulting to the root's
/// children (the top-level attack vectors) when none are named.
pub fn framework_rows(
    bundle: &AssessmentBundle,
    vectors: Option<&[String]>,
    budget: usize,
) -> Result<Vec<FrameworkRow>, EngineError> {
    let tree = bundle.tree()?;
    let default: Vec<String>;
    let selected: &[String] = match vectors {
        Some(ids) => ids,
        None => {
            default = tree
                .node(&tree.root)
                .map(|n| n.children().to_vec())
                .unwrap_or_default();
            &default
        }
    };
    let mut rows = Vec::with_capacity(selected.len());
    for id in selected {
        let node = tree
            .node(id)
            .ok_or_else(|| EngineError::UnknownNode(id.clone()))?;
        let profile = vector_profile(tree, id, budget)?;
        let (min, max) = profile.admissible();
        let justification = if min == max {
            format!(
                "Consistent ({min}) for any attacker meeting the {}/{} requirement.",
                profile.business_knowledge.display_name().to_lowercase(),
                profile.technical_complexity.display_name().to_lowercase(),
            )
        } else {
            format!("{min} without insider access; {max} when an insider shortcut applies.")
        };
        rows.push(FrameworkRow {
            vector: id.clone(),
            label: node.label.clone(),
            business_knowledge: profile.business_knowledge.display_name().to_string(),
            technical_complexity: profile.technical_complexity.display_name().to_string(),
            range: (min, max),
            justification,
        });
    }
    Ok(rows)
}

/// Render the likelihood framework table (markdown).
pub fn render_likelihood_framework(
    bundle: &AssessmentBundle,
    vectors: Option<&[String]>,
    budget: usize,
) -> Result<String, EngineError> {
    let rows = framework_rows(bundle, vectors, budget)?;
    let mut out = String::new();
    out.push_str("| Attack Path | Business Knowledge | Technical Complexity | Likelihood | Justification |\n");
    out.push_str("| --- | --- | --- | --- | --- |\n");
    for row in &rows {
        out.push_str(&format!(
            "| {} | {} | {} | {} | {} |\n",
            md_cell(&row.label),
            row.business_knowledge,
            row.technical_complexity,
            range_text(row.range),
            md_cell(&row.justification),
        ));
    }
    Ok(out)
}

/// Render the 5x5 matrix as a heat-map style table: likelihood rows
/// descending, impact columns ascending.
pub fn render_matrix(assessments: &[RiskAssessment]) -> String {
    let matrix = risk_matrix(assessments);
    let mut out = String::new();
    out.push_str("| Likelihood \\ Impact | 1 | 2 | 3 | 4 | 5 |\n");
    out.push_str("| --- | --- | --- | --- | --- | --- |\n");
    for likelihood in (1..=5u8).rev() {
        let label = crate::model::scale_label(likelihood, crate::model::ScaleKind::Likelihood)
            .expect("in range");
        let mut row = format!("| {likelihood} ({label}) |");
        for impact in 1..=5u8 {
            let ids = matrix.cell(likelihood, impact).join(", ");
            row.push_str(&format!(" {} |", md_cell(&ids)));
        }
        out.push_str(&row);
        out.push('\n');
    }
    out
}

/// Render the shared-precondition ranking (markdown).
pub fn render_shared_preconditions(rows: &[SharedPreconditionRow]) -> String {
    if rows.is_empty() {
        return "no shared preconditions\n".to_string();
    }
    let mut out = String::new();
    out.push_str("| Precondition | Description | Dependent Leaves | Paths | Risks |\n");
    out.push_str("| --- | --- | --- | --- | --- |\n");
    for row in rows {
        let leaves: Vec<&str> = row.dependent_leaves.iter().map(String::as_str).collect();
        let risks: Vec<&str> = row.affected_risks.iter().map(String::as_str).collect();
        out.push_str(&format!(
            "| {} | {} | {} | {} | {} |\n",
            md_cell(&row.precondition),
            md_cell(&row.description),
            md_cell(&leaves.join(", ")),
            row.path_count,
            md_cell(&risks.join(", ")),
        ));
    }
    out
}

/// Render a what-if diff (markdown), largest score shifts first.
pub fn render_diff(result: &WhatIfResult) -> String {
    let mut out = String::new();
    out.push_str(&format!("scenario: {}\n\n", result.scenario));
    out.push_str("| Risk ID | Shift | Delta | Dominant Before | Dominant After |\n");
    out.push_str("| --- | --- | --- | --- | --- |\n");
    for diff in &result.diffs {
        let shift = format!("{}\u{2192}{}", diff.before.score, diff.after_score());
        let after_text = match &diff.after {
            None => "eliminated".to_string(),
            Some(snapshot) => {
                if diff.dominant_path_changed {
                    binding_list(&snapshot.dominant)
                } else {
                    "unchanged".to_string()
                }
            }
        };
        out.push_str(&format!(
            "| {} | {} | {} | {} | {} |\n",
            md_cell(&diff.risk_id),
            shift,
            diff.delta_score,
            md_cell(&binding_list(&diff.before.dominant)),
            md_cell(&after_text),
        ));
    }
    out
}

/// Export the tree as a DOT digraph, root at top. AND nodes are drawn with
/// a double border and an `[AND]` tag; leaves carry their bk/tc levels. An
/// optional highlight set of leaf steps must satisfy the root; every node
/// the steps satisfy is styled.
pub fn export_dot(
    tree: &AttackTree,
    highlight: Option<&BTreeSet<NodeId>>,
) -> Result<String, EngineError> {
    if let Some(steps) = highlight {
        if !satisfies(tree, steps) {
            return Err(EngineError::InvalidHighlight);
        }
    }
    let lit: BTreeSet<NodeId> = match highlight {
        None => BTreeSet::new(),
        Some(steps) => tree
            .dfs_order()
            .into_iter()
            .filter(|id| satisfies_node(tree, id, steps))
            .collect(),
    };

    let mut out = String::from("digraph attack_tree {\n");
    out.push_str("  rankdir=TB;\n");
    out.push_str("  node [shape=box, style=\"rounded,filled\", fillcolor=white, fontname=\"Helvetica\"];\n");
    for id in tree.dfs_order() {
        let Some(node) = tree.node(&id) else { continue };
        let highlighted = lit.contains(&id);
        let fill = if highlighted { "gold" } else { "white" };
        let extra = if highlighted { ", color=red, penwidth=2" } else { "" };
        match &node.kind {
            NodeKind::Internal { connector, children } => {
                let peripheries = match connector {
                    crate::model::Connector::And => ", peripheries=2",
                    crate::model::Connector::Or => "",
                };
                out.push_str(&format!(
                    "  \"{}\" [label=\"{}\\n[{}]\", fillcolor={}{}{}];\n",
                    dot_label(&id),
                    dot_label(&node.label),
                    connector.keyword(),
                    fill,
                    peripheries,
                    extra,
                ));
                for child in children {
                    out.push_str(&format!(
                        "  \"{}\" -> \"{}\";\n",
                        dot_label(&id),
                        dot_label(child)
                    ));
                }
            }
            NodeKind::Leaf { profile } => {
                out.push_str(&format!(
                    "  \"{}\" [label=\"{}\\nbk={} tc={}\", shape=note, fillcolor={}{}];\n",
                    dot_label(&id),
                    dot_label(&node.label),
                    profile.business_knowledge.keyword(),
                    profile.technical_complexity.keyword(),
                    if highlighted { "gold" } else { "lightgrey" },
                    extra,
                ));
            }
        }
    }
    out.push_str("}\n");
    Ok(out)
}
