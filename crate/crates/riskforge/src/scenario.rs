//! What-if engine: apply a mitigation scenario to a bundle (disable leaves
//! or subtrees, remove preconditions, switch the attacker profile),
//! recompute the assessments, and diff them against the baseline.
//!
//! Application is a pure transformation: the derived bundle is a pruned
//! copy and the original is untouched. AND nodes losing a required child
//! become unsatisfiable and are pruned upward; candidate paths bound to a
//! pruned vector are dropped.

use std::collections::BTreeSet;

use crate::error::EngineError;
use crate::model::{
    AssessmentBundle, AttackTree, ImpactScore, LikelihoodScore, NodeId, NodeKind, RiskId, Scenario,
};
use crate::risk::{assess_goal, PathAssessment, RiskAssessment};

/// Apply the scenario with the given id, producing a derived bundle.
pub fn apply_scenario(
    bundle: &AssessmentBundle,
    scenario_id: &str,
) -> Result<AssessmentBundle, EngineError> {
    let scenario = bundle
        .scenario(scenario_id)
        .ok_or_else(|| EngineError::UnknownScenario(scenario_id.to_string()))?;
    apply(bundle, scenario)
}

/// Apply an explicit scenario (not necessarily declared in the bundle).
pub fn apply(bundle: &AssessmentBundle, scenario: &Scenario) -> Result<AssessmentBundle, EngineError> {
    // Resolve every referenced id up front.
    for node in &scenario.disabled {
        let known = bundle
            .tree
            .as_ref()
            .map(|t| t.contains(node))
            .unwrap_or(false);
        if !known {
            return Err(EngineError::UnknownScenarioRef {
                scenario: scenario.id.clone(),
                id: node.clone(),
            });
        }
    }
    for pre in &scenario.removed_preconditions {
        if bundle.precondition(pre).is_none() {
            return Err(EngineError::UnknownScenarioRef {
                scenario: scenario.id.clone(),
                id: pre.clone(),
            });
        }
    }

    let mut derived = bundle.clone();
    derived
        .preconditions
        .retain(|p| !scenario.removed_preconditions.contains(&p.id));

    if let Some(tree) = &bundle.tree {
        // An internal id disables its whole subtree.
        let mut disabled_leaves: BTreeSet<NodeId> = BTreeSet::new();
        for node in &scenario.disabled {
            disabled_leaves.extend(tree.leaves_under(node));
        }
        // A leaf needing a removed precondition is gone as well.
        for node in tree.nodes.values() {
            if let Some(profile) = node.profile() {
                if !profile
                    .preconditions
                    .is_disjoint(&scenario.removed_preconditions)
                {
                    disabled_leaves.insert(node.id.clone());
                }
            }
        }

        let mut surviving = AttackTree {
            goal_id: tree.goal_id.clone(),
            goal_label: tree.goal_label.clone(),
            root: tree.root.clone(),
            nodes: Default::default(),
        };
        let root_alive = prune(tree, &tree.root, &disabled_leaves, &mut surviving);
        derived.tree = root_alive.then_some(surviving);

        for risk in &mut derived.risks {
            risk.candidate_paths.retain(|path| {
                path.steps.iter().all(|step| {
                    derived
                        .tree
                        .as_ref()
                        .map(|t| t.contains(&step.vector))
                        .unwrap_or(false)
                })
            });
        }
    }

    Ok(derived)
}

/// Copy the subtree at `id` into `out`, skipping disabled leaves. Returns
/// false when the node is unsatisfiable: a disabled leaf, an OR with no
/// surviving child, or an AND missing any required child.
fn prune(
    tree: &AttackTree,
    id: &str,
    disabled: &BTreeSet<NodeId>,
    out: &mut AttackTree,
) -> bool {
    let Some(node) = tree.node(id) else {
        return false;
    };
    match &node.kind {
        NodeKind::Leaf { .. } => {
            if disabled.contains(id) {
                return false;
            }
            out.nodes.insert(id.to_string(), node.clone());
            true
        }
        NodeKind::Internal { connector, children } => {
            let mut kept = Vec::new();
            let mut all = true;
            for child in children {
                if prune(tree, child, disabled, out) {
                    kept.push(child.clone());
                } else {
                    all = false;
                }
            }
            let alive = match connector {
                crate::model::Connector::Or => !kept.is_empty(),
                crate::model::Connector::And => all,
            };
            if !alive {
                // Children copied for a dead parent must not linger.
                for child in kept {
                    remove_subtree(out, &child);
                }
                return false;
            }
            let mut pruned = node.clone();
            if let NodeKind::Internal { children, .. } = &mut pruned.kind {
                *children = kept;
            }
            out.nodes.insert(id.to_string(), pruned);
            true
        }
    }
}

fn remove_subtree(tree: &mut AttackTree, id: &str) {
    let children: Vec<NodeId> = tree
        .node(id)
        .map(|n| n.children().to_vec())
        .unwrap_or_default();
    tree.nodes.remove(id);
    for child in children {
        remove_subtree(tree, &child);
    }
}

/// Scored state of one risk at one point in time.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Snapshot {
    pub likelihood: LikelihoodScore,
    pub impact: ImpactScore,
    pub score: u8,
    pub dominant: PathAssessment,
}

impl Snapshot {
    fn of(assessment: &RiskAssessment) -> Self {
        Snapshot {
            likelihood: assessment.likelihood,
            impact: assessment.impact,
            score: assessment.score,
            dominant: assessment.dominant.clone(),
        }
    }
}

/// Before/after comparison for one risk. A risk whose paths were all pruned
/// scores 0 by convention and is flagged rather than dropped.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RiskDiff {
    pub risk_id: RiskId,
    pub before: Snapshot,
    pub after: Option<Snapshot>,
    /// `after.score - before.score`, with 0 standing in for an infeasible
    /// after state.
    pub delta_score: i32,
    pub dominant_path_changed: bool,
    pub newly_infeasible: bool,
}

impl RiskDiff {
    pub fn after_score(&self) -> u8 {
        self.after.as_ref().map(|s| s.score).unwrap_or(0)
    }
}

/// One diff per baseline risk, sorted by absolute score shift (descending),
/// ties by risk id.
pub fn diff_assessments(before: &[RiskAssessment], after: &[RiskAssessment]) -> Vec<RiskDiff> {
    let mut diffs: Vec<RiskDiff> = before
        .iter()
        .map(|b| {
            let a = after.iter().find(|a| a.risk_id == b.risk_id);
            let after_snapshot = a.map(Snapshot::of);
            let delta_score =
                after_snapshot.as_ref().map(|s| s.score as i32).unwrap_or(0) - b.score as i32;
            let dominant_path_changed = match &after_snapshot {
                Some(s) => s.dominant.vector_ids() != b.dominant.vector_ids(),
                None => true,
            };
            RiskDiff {
                risk_id: b.risk_id.clone(),
                before: Snapshot::of(b),
                after: after_snapshot,
                delta_score,
                dominant_path_changed,
                newly_infeasible: a.is_none(),
            }
        })
        .collect();
    diffs.sort_by(|x, y| {
        y.delta_score
            .abs()
            .cmp(&x.delta_score.abs())
            .then(x.risk_id.cmp(&y.risk_id))
    });
    diffs
}

/// Outcome of a full what-if run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WhatIfResult {
    pub scenario: String,
    pub baseline: Vec<RiskAssessment>,
    pub after: Vec<RiskAssessment>,
    pub diffs: Vec<RiskDiff>,
}

/// Assess the baseline, apply the scenario, reassess under the scenario's
/// attacker profile, and diff. The baseline uses the default (insider)
/// profile.
pub fn whatif(
    bundle: &AssessmentBundle,
    scenario_id: &str,
    budget: usize,
) -> Result<WhatIfResult, EngineError> {
    let scenario = bundle
        .scenario(scenario_id)
        .ok_or_else(|| EngineError::UnknownScenario(scenario_id.to_string()))?
        .clone();
    let goal = bundle.tree()?.goal_id.clone();
    let baseline = assess_goal(bundle, &goal, &Default::default(), budget)?;
    let derived = apply(bundle, &scenario)?;
    let after = if derived.tree.is_some() {
        assess_goal(&derived, &goal, &scenario.attacker_profile, budget)?
    } else {
        Vec::new()
    };
    let diffs = diff_assessments(&baseline, &after);
    Ok(WhatIfResult {
        scenario: scenario_id.to_string(),
        baseline,
        after,
        diffs,
    })
}
