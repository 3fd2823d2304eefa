//! Canonical machine-readable export: a deterministic JSON mirror of the
//! bundle with lexicographically sorted keys, declaration-ordered arrays,
//! and LF line endings. Equal bundles export to byte-identical documents.

use serde_json::{json, Map, Value};

use crate::error::EngineError;
use crate::model::{AssessmentBundle, AttackTree, NodeKind, TreeNode};

use super::serialize::check_representable;

/// Export the bundle as canonical JSON text.
pub fn export_canonical(bundle: &AssessmentBundle) -> Result<String, EngineError> {
    check_representable(bundle)?;
    let value = bundle_value(bundle);
    // serde_json maps are BTree-backed, so keys come out sorted.
    let mut text = serde_json::to_string_pretty(&value).expect("bundle JSON cannot fail");
    text.push('\n');
    Ok(text)
}

fn bundle_value(bundle: &AssessmentBundle) -> Value {
    json!({
        "system": {
            "components": bundle.system.components.iter().map(|c| json!({
                "id": c.id,
                "kind": c.kind.keyword(),
                "name": c.name,
            })).collect::<Vec<_>>(),
            "boundaries": bundle.system.boundaries.iter().map(|b| json!({
                "id": b.id,
                "name": b.name,
            })).collect::<Vec<_>>(),
            "flows": bundle.system.flows.iter().map(|f| json!({
                "from": f.from,
                "to": f.to,
                "crosses": f.crosses,
            })).collect::<Vec<_>>(),
        },
        "preconditions": bundle.preconditions.iter().map(|p| json!({
            "id": p.id,
            "description": p.description,
            "component": p.component,
        })).collect::<Vec<_>>(),
        "tree": bundle.tree.as_ref().map(tree_value),
        "risks": bundle.risks.iter().map(|r| json!({
            "id": r.id,
            "goal": r.goal,
            "description": r.description,
            "impact": r.impact.value(),
            "candidate_paths": r.candidate_paths.iter().map(|p| json!({
                "steps": p.steps.iter().map(|s| json!({
                    "vector": s.vector,
                    "role": s.role.keyword(),
                    "pinned_likelihood": s.pinned_likelihood,
                })).collect::<Vec<_>>(),
            })).collect::<Vec<_>>(),
        })).collect::<Vec<_>>(),
        "scenarios": bundle.scenarios.iter().map(|s| json!({
            "id": s.id,
            "disabled": s.disabled.iter().collect::<Vec<_>>(),
            "removed_preconditions": s.removed_preconditions.iter().collect::<Vec<_>>(),
            "attacker_profile": { "insider": s.attacker_profile.insider },
        })).collect::<Vec<_>>(),
    })
}

fn tree_value(tree: &AttackTree) -> Value {
    // Nodes are exported in depth-first declaration order from the root.
    let nodes: Vec<Value> = tree
        .dfs_order()
        .iter()
        .filter_map(|id| tree.node(id))
        .map(node_value)
        .collect();
    json!({
        "goal_id": tree.goal_id,
        "goal_label": tree.goal_label,
        "root": tree.root,
        "nodes": nodes,
    })
}

fn node_value(node: &TreeNode) -> Value {
    let mut map = Map::new();
    map.insert("id".into(), json!(node.id));
    map.insert("label".into(), json!(node.label));
    match &node.kind {
        NodeKind::Internal { connector, children } => {
            map.insert("kind".into(), json!("internal"));
            map.insert("connector".into(), json!(connector.keyword()));
            map.insert("children".into(), json!(children));
            map.insert("profile".into(), Value::Null);
        }
        NodeKind::Leaf { profile } => {
            map.insert("kind".into(), json!("leaf"));
            map.insert("connector".into(), Value::Null);
            map.insert("children".into(), Value::Null);
            map.insert(
                "profile".into(),
                json!({
                    "business_knowledge": profile.business_knowledge.keyword(),
                    "technical_complexity": profile.technical_complexity.keyword(),
                    "insider_advantage": profile.insider_advantage,
                    "category": profile.category.keyword(),
                    "preconditions": profile.preconditions.iter().collect::<Vec<_>>(),
                    "component": profile.component,
                    "phase": profile.phase.keyword(),
                }),
            );
        }
    }
    Value::Object(map)
}
