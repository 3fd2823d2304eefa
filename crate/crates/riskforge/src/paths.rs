//! Minimal attack path enumeration over AND/OR trees.
//!
//! A path is a minimal set of leaves that jointly satisfies the root: a leaf
//! is satisfied when present, an OR node when some child is satisfied, an
//! AND node when all children are. Families are built recursively (OR is
//! union, AND is cross-product union) with a superset-removal pass, since
//! distributing AND over OR can produce non-minimal sets when subtrees
//! share leaves.

use std::collections::BTreeSet;

use crate::error::EngineError;
use crate::model::{AssessmentBundle, AttackTree, NodeId, NodeKind, PreconditionId, RiskId};

/// Default cap on enumerated paths; AND/OR cross-products are exponential.
pub const DEFAULT_PATH_BUDGET: usize = 100_000;

/// Hard ceiling on leaves for the brute-force oracle.
pub const BRUTE_FORCE_LEAF_LIMIT: usize = 20;

/// A minimal satisfying leaf set with its aggregated requirements.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct AttackPath {
    /// Leaf ids, all of which must succeed (conjunction).
    pub steps: BTreeSet<NodeId>,
    /// Union of the step preconditions.
    pub preconditions: BTreeSet<PreconditionId>,
    /// Union of the components the steps touch.
    pub components_touched: BTreeSet<String>,
}

/// Evaluate the tree bottom-up against a set of succeeded leaves.
pub fn satisfies(tree: &AttackTree, steps: &BTreeSet<NodeId>) -> bool {
    satisfies_node(tree, &tree.root, steps)
}

/// Evaluate the subtree rooted at `id` against a set of succeeded leaves.
pub fn satisfies_node(tree: &AttackTree, id: &str, steps: &BTreeSet<NodeId>) -> bool {
    match tree.node(id) {
        None => false,
        Some(node) => match &node.kind {
            NodeKind::Leaf { .. } => steps.contains(id),
            NodeKind::Internal { connector, children } => match connector {
                crate::model::Connector::Or => {
                    children.iter().any(|c| satisfies_node(tree, c, steps))
                }
                crate::model::Connector::And => {
                    children.iter().all(|c| satisfies_node(tree, c, steps))
                }
            },
        },
    }
}

/// Enumerate all minimal attack paths with the default budget.
pub fn enumerate_paths(tree: &AttackTree) -> Result<Vec<AttackPath>, EngineError> {
    enumerate_paths_with_budget(tree, DEFAULT_PATH_BUDGET)
}

/// Enumerate all minimal attack paths, failing once any intermediate family
/// outgrows `budget`.
pub fn enumerate_paths_with_budget(
    tree: &AttackTree,
    budget: usize,
) -> Result<Vec<AttackPath>, EngineError> {
    let family = subtree_family(tree, &tree.root, budget)?;
    Ok(finish(tree, family))
}

/// Minimal satisfying leaf sets for the subtree rooted at `node`, as raw
/// step sets in deterministic order.
pub fn subtree_step_family(
    tree: &AttackTree,
    node: &str,
    budget: usize,
) -> Result<Vec<BTreeSet<NodeId>>, EngineError> {
    let mut family = subtree_family(tree, node, budget)?;
    family.sort();
    Ok(family)
}

fn subtree_family(
    tree: &AttackTree,
    id: &str,
    budget: usize,
) -> Result<Vec<BTreeSet<NodeId>>, EngineError> {
    let node = tree
        .node(id)
        .ok_or_else(|| EngineError::UnknownNode(id.to_string()))?;
    match &node.kind {
        NodeKind::Leaf { .. } => Ok(vec![BTreeSet::from([id.to_string()])]),
        NodeKind::Internal { connector, children } => {
            let mut families = Vec::with_capacity(children.len());
            for child in children {
                families.push(subtree_family(tree, child, budget)?);
            }
            let combined = match connector {
                crate::model::Connector::Or => {
                    let mut union: Vec<BTreeSet<NodeId>> = Vec::new();
                    for family in families {
                        for member in family {
                            check_budget(union.len() + 1, budget)?;
                            union.push(member);
                        }
                    }
                    union.sort();
                    union.dedup();
                    minimize(union)
                }
                crate::model::Connector::And => {
                    let mut product: Vec<BTreeSet<NodeId>> = vec![BTreeSet::new()];
                    for family in families {
                        let mut next = Vec::with_capacity(product.len() * family.len());
                        for partial in &product {
                            for member in &family {
                                check_budget(next.len() + 1, budget)?;
                                let mut merged = partial.clone();
                                merged.extend(member.iter().cloned());
                                next.push(merged);
                            }
                        }
                        next.sort();
                        next.dedup();
                        product = next;
                    }
                    minimize(product)
                }
            };
            Ok(combined)
        }
    }
}

fn check_budget(size: usize, budget: usize) -> Result<(), EngineError> {
    if size > budget {
        Err(EngineError::PathBudgetExceeded { budget })
    } else {
        Ok(())
    }
}

/// Drop every set that strictly contains another member of the family.
fn minimize(family: Vec<BTreeSet<NodeId>>) -> Vec<BTreeSet<NodeId>> {
    let mut keep = Vec::with_capacity(family.len());
    'outer: for (i, candidate) in family.iter().enumerate() {
        for (j, other) in family.iter().enumerate() {
            if i != j
                && other.len() <= candidate.len()
                && other.is_subset(candidate)
                && other != candidate
            {
                continue 'outer;
            }
        }
        keep.push(candidate.clone());
    }
    keep
}

fn finish(tree: &AttackTree, mut family: Vec<BTreeSet<NodeId>>) -> Vec<AttackPath> {
    family.sort();
    family.dedup();
    family
        .into_iter()
        .map(|steps| aggregate(tree, steps))
        .collect()
}

fn aggregate(tree: &AttackTree, steps: BTreeSet<NodeId>) -> AttackPath {
    let mut preconditions = BTreeSet::new();
    let mut components_touched = BTreeSet::new();
    for step in &steps {
        if let Some(profile) = tree.node(step).and_then(|n| n.profile()) {
            preconditions.extend(profile.preconditions.iter().cloned());
            if let Some(component) = &profile.component {
                components_touched.insert(component.clone());
            }
        }
    }
    AttackPath {
        steps,
        preconditions,
        components_touched,
    }
}

/// Independent oracle: enumerate every leaf subset, keep the satisfying
/// ones, and filter to minimal sets. Refuses trees with more than
/// [`BRUTE_FORCE_LEAF_LIMIT`] leaves.
pub fn brute_force_paths(tree: &AttackTree) -> Result<Vec<AttackPath>, EngineError> {
    let leaves: Vec<NodeId> = tree
        .dfs_order()
        .into_iter()
        .filter(|id| tree.node(id).map(|n| n.is_leaf()).unwrap_or(false))
        .collect();
    if leaves.len() > BRUTE_FORCE_LEAF_LIMIT {
        return Err(EngineError::TooManyLeaves {
            leaves: leaves.len(),
            limit: BRUTE_FORCE_LEAF_LIMIT,
        });
    }
    let mut satisfying: Vec<BTreeSet<NodeId>> = Vec::new();
    for mask in 0u32..(1u32 << leaves.len()) {
        let set: BTreeSet<NodeId> = leaves
            .iter()
            .enumerate()
            .filter(|(i, _)| mask & (1 << i) != 0)
            .map(|(_, id)| id.clone())
            .collect();
        if satisfies(tree, &set) {
            satisfying.push(set);
        }
    }
    // AND/OR evaluation is monotone, so a satisfying set is minimal exactly
    // when removing any single element breaks it.
    let minimal: Vec<BTreeSet<NodeId>> = satisfying
        .into_iter()
        .filter(|set| {
            set.iter().all(|step| {
                let mut reduced = set.clone();
                reduced.remove(step);
                !satisfies(tree, &reduced)
            })
        })
        .collect();
    Ok(finish(tree, minimal))
}

/// One report row per precondition that at least one leaf depends on.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SharedPreconditionRow {
    pub precondition: PreconditionId,
    pub description: String,
    /// Leaves whose profiles require the precondition.
    pub dependent_leaves: BTreeSet<NodeId>,
    /// How many enumerated paths contain at least one dependent leaf.
    pub path_count: usize,
    /// Risks with a bound vector whose subtree contains a dependent leaf.
    pub affected_risks: BTreeSet<RiskId>,
}

/// Rank preconditions by blast radius: descending by affected risk count,
/// then by path count, ties broken by precondition id.
pub fn shared_precondition_report(
    bundle: &AssessmentBundle,
    paths: &[AttackPath],
) -> Vec<SharedPreconditionRow> {
    let Some(tree) = &bundle.tree else {
        return Vec::new();
    };
    let mut rows = Vec::new();
    for pre in &bundle.preconditions {
        let dependent_leaves: BTreeSet<NodeId> = tree
            .nodes
            .values()
            .filter(|node| {
                node.profile()
                    .map(|p| p.preconditions.contains(&pre.id))
                    .unwrap_or(false)
            })
            .map(|node| node.id.clone())
            .collect();
        if dependent_leaves.is_empty() {
            continue;
        }
        let path_count = paths
            .iter()
            .filter(|path| !path.steps.is_disjoint(&dependent_leaves))
            .count();
        let affected_risks: BTreeSet<RiskId> = bundle
            .risks
            .iter()
            .filter(|risk| {
                risk.candidate_paths.iter().any(|path| {
                    path.steps.iter().any(|step| {
                        !tree.leaves_under(&step.vector).is_disjoint(&dependent_leaves)
                    })
                })
            })
            .map(|risk| risk.id.clone())
            .collect();
        rows.push(SharedPreconditionRow {
            precondition: pre.id.clone(),
            description: pre.description.clone(),
            dependent_leaves,
            path_count,
            affected_risks,
        });
    }
    rows.sort_by(|a, b| {
        b.affected_risks
            .len()
            .cmp(&a.affected_risks.len())
            .then(b.path_count.cmp(&a.path_count))
            .then(a.precondition.cmp(&b.precondition))
    });
    rows
}
