//! Canonical ATDL emission: entities in declaration order, lowercase
//! keywords, one entity per stanza, two-space nesting. Parsing the output of
//! `serialize_document` yields a bundle structurally equal to the input.

use std::fmt::Write as _;

use crate::error::EngineError;
use crate::model::{AssessmentBundle, AttackTree, NodeKind, Phase, TreeNode};

use super::lex::{escape_string, is_valid_identifier};

/// Render a bundle as canonical ATDL text.
///
/// The bundle must be representable in the grammar: identifiers lexically
/// valid, tree children resolvable and acyclic, at least one child per
/// internal node, and at least one step per candidate path.
pub fn serialize_document(bundle: &AssessmentBundle) -> Result<String, EngineError> {
    check_representable(bundle)?;
    let mut out = String::new();

    out.push_str("system {\n");
    for component in &bundle.system.components {
        let _ = writeln!(
            out,
            "  component {} {} \"{}\"",
            component.id,
            component.kind.keyword(),
            escape_string(&component.name)
        );
    }
    for boundary in &bundle.system.boundaries {
        let _ = writeln!(out, "  boundary {} \"{}\"", boundary.id, escape_string(&boundary.name));
    }
    for flow in &bundle.system.flows {
        let _ = match &flow.crosses {
            Some(boundary) => {
                writeln!(out, "  flow {} -> {} crosses {}", flow.from, flow.to, boundary)
            }
            None => writeln!(out, "  flow {} -> {}", flow.from, flow.to),
        };
    }
    out.push_str("}\n");

    if !bundle.preconditions.is_empty() {
        out.push('\n');
    }
    for pre in &bundle.preconditions {
        let _ = writeln!(
            out,
            "pre {} \"{}\" component={}",
            pre.id,
            escape_string(&pre.description),
            pre.component
        );
    }

    if let Some(tree) = &bundle.tree {
        out.push('\n');
        let _ = write!(
            out,
            "goal {} \"{}\" ",
            tree.goal_id,
            escape_string(&tree.goal_label)
        );
        let root = tree.node(&tree.root).expect("checked by representability");
        write_node(&mut out, tree, root, 0);
    }

    for risk in &bundle.risks {
        out.push('\n');
        let _ = writeln!(
            out,
            "risk {} goal={} \"{}\" impact={} {{",
            risk.id,
            risk.goal,
            escape_string(&risk.description),
            risk.impact.value()
        );
        for path in &risk.candidate_paths {
            out.push_str("  path {\n");
            for step in &path.steps {
                let _ = write!(out, "    step vector={} role={}", step.vector, step.role.keyword());
                if let Some(pin) = step.pinned_likelihood {
                    let _ = write!(out, " pin={pin}");
                }
                out.push('\n');
            }
            out.push_str("  }\n");
        }
        out.push_str("}\n");
    }

    for scenario in &bundle.scenarios {
        out.push('\n');
        let _ = writeln!(out, "scenario {} {{", scenario.id);
        if !scenario.disabled.is_empty() {
            let ids: Vec<&str> = scenario.disabled.iter().map(String::as_str).collect();
            let _ = writeln!(out, "  disable={}", ids.join(","));
        }
        if !scenario.removed_preconditions.is_empty() {
            let ids: Vec<&str> = scenario
                .removed_preconditions
                .iter()
                .map(String::as_str)
                .collect();
            let _ = writeln!(out, "  remove-pre={}", ids.join(","));
        }
        if !scenario.attacker_profile.insider {
            out.push_str("  profile=external\n");
        }
        out.push_str("}\n");
    }

    Ok(out)
}

fn write_node(out: &mut String, tree: &AttackTree, node: &TreeNode, depth: usize) {
    let indent = "  ".repeat(depth);
    match &node.kind {
        NodeKind::Internal { connector, children } => {
            let _ = writeln!(
                out,
                "{indent}node {} {} \"{}\" {{",
                node.id,
                connector.keyword(),
                escape_string(&node.label)
            );
            for child in children {
                let child = tree.node(child).expect("checked by representability");
                write_node(out, tree, child, depth + 1);
            }
            let _ = writeln!(out, "{indent}}}");
        }
        NodeKind::Leaf { profile } => {
            let _ = write!(
                out,
                "{indent}leaf {} \"{}\" bk={} tc={} insider={} category={}",
                node.id,
                escape_string(&node.label),
                profile.business_knowledge.keyword(),
                profile.technical_complexity.keyword(),
                if profile.insider_advantage { "yes" } else { "no" },
                profile.category.keyword()
            );
            if !profile.preconditions.is_empty() {
                let ids: Vec<&str> = profile.preconditions.iter().map(String::as_str).collect();
                let _ = write!(out, " pre={}", ids.join(","));
            }
            if let Some(component) = &profile.component {
                let _ = write!(out, " component={component}");
            }
            if profile.phase != Phase::default() {
                let _ = write!(out, " phase={}", profile.phase.keyword());
            }
            out.push('\n');
        }
    }
}

/// Reject bundles the grammar cannot carry, naming the offending entity.
pub(crate) fn check_representable(bundle: &AssessmentBundle) -> Result<(), EngineError> {
    let bad_id = |entity: &str, id: &str| EngineError::Unserializable {
        entity: entity.to_string(),
        reason: format!("`{id}` is not a valid identifier"),
    };

    for component in &bundle.system.components {
        if !is_valid_identifier(&component.id) {
            return Err(bad_id("component", &component.id));
        }
    }
    for boundary in &bundle.system.boundaries {
        if !is_valid_identifier(&boundary.id) {
            return Err(bad_id("boundary", &boundary.id));
        }
    }
    for (index, flow) in bundle.system.flows.iter().enumerate() {
        for id in [Some(&flow.from), Some(&flow.to), flow.crosses.as_ref()]
            .into_iter()
            .flatten()
        {
            if !is_valid_identifier(id) {
                return Err(bad_id(&format!("flow #{}", index + 1), id));
            }
        }
    }
    for pre in &bundle.preconditions {
        if !is_valid_identifier(&pre.id) {
            return Err(bad_id("precondition", &pre.id));
        }
        if !is_valid_identifier(&pre.component) {
            return Err(bad_id("precondition", &pre.component));
        }
    }
    if let Some(tree) = &bundle.tree {
        if !is_valid_identifier(&tree.goal_id) {
            return Err(bad_id("goal", &tree.goal_id));
        }
        // Walk from the root: every child must resolve, no node may репeat
        // (a repeat means a cycle or a shared child), internal nodes need
        // at least one child.
        let mut visited = std::collections::BTreeSet::new();
        let mut stack = vec![tree.root.clone()];
        while let Some(id) = stack.pop() {
            if !is_valid_identifier(&id) {
                return Err(bad_id("node", &id));
            }
            let node = tree.node(&id).ok_or_else(|| EngineError::Unserializable {
                entity: "tree".to_string(),
                reason: format!("child `{id}` does not resolve"),
            })?;
            if !visited.insert(id.clone()) {
                return Err(EngineError::Unserializable {
                    entity: format!("node {id}"),
                    reason: "node is reachable more than once".to_string(),
                });
            }
            if let NodeKind::Internal { children, .. } = &node.kind {
                if children.is_empty() {
                    return Err(EngineError::Unserializable {
                        entity: format!("node {id}"),
                        reason: "internal node has no children".to_string(),
                    });
                }
                stack.extend(children.iter().cloned());
            }
            if let Some(profile) = node.profile() {
                for pre in &profile.preconditions {
                    if !is_valid_identifier(pre) {
                        return Err(bad_id(&format!("leaf {id}"), pre));
                    }
                }
                if let Some(component) = &profile.component {
                    if !is_valid_identifier(component) {
                        return Err(bad_id(&format!("leaf {id}"), component));
                    }
                }
            }
        }
    }
    for risk in &bundle.risks {
        if !is_valid_identifier(&risk.id) {
            return Err(bad_id("risk", &risk.id));
        }
        if !is_valid_identifier(&risk.goal) {
            return Err(bad_id(&format!("risk {}", risk.id), &risk.goal));
        }
        if risk.candidate_paths.is_empty() {
            return Err(EngineError::Unserializable {
                entity: format!("risk {}", risk.id),
                reason: "risk has no candidate paths".to_string(),
            });
        }
        for path in &risk.candidate_paths {
            if path.steps.is_empty() {
                return Err(EngineError::Unserializable {
                    entity: format!("risk {}", risk.id),
                    reason: "candidate path has no steps".to_string(),
                });
            }
            for step in &path.steps {
                if !is_valid_identifier(&step.vector) {
                    return Err(bad_id(&format!("risk {}", risk.id), &step.vector));
                }
            }
        }
    }
    for scenario in &bundle.scenarios {
        if !is_valid_identifier(&scenario.id) {
            return Err(bad_id("scenario", &scenario.id));
        }
        for id in scenario.disabled.iter().chain(&scenario.removed_preconditions) {
            if !is_valid_identifier(id) {
                return Err(bad_id(&format!("scenario {}", scenario.id), id));
            }
        }
    }
    Ok(())
}
