//! Seeded generators for random trees, bundles, and scenarios. xorshift64*
//! keeps every acceptance run reproducible without extra dependencies.

use std::collections::{BTreeMap, BTreeSet};

use riskforge::likelihood::vector_profile;
use riskforge::model::{
    AssessmentBundle, AttackTree, AttackerProfile, CandidatePath, Component, ComponentKind,
    Connector, DataFlow, ImpactScore, Level, NodeKind, PathRole, Phase, Precondition,
    RiskInstance, Scenario, StepProfile, ThreatCategory, TreeNode, TrustBoundary, VectorBinding,
};
use riskforge::paths::DEFAULT_PATH_BUDGET;

pub struct Rng(u64);

impl Rng {
    pub fn new(seed: u64) -> Self {
        Rng(seed.max(1))
    }

    pub fn next(&mut self) -> u64 {
        let mut x = self.0;
        x ^= x >> 12;
        x ^= x << 25;
        x ^= x >> 27;
        self.0 = x;
        x.wrapping_mul(0x2545_f491_4f6c_dd1d)
    }

    pub fn below(&mut self, n: usize) -> usize {
        (self.next() % n as u64) as usize
    }

    /// Inclusive range.
    pub fn range(&mut self, lo: usize, hi: usize) -> usize {
        lo + self.below(hi - lo + 1)
    }

    pub fn chance(&mut self, percent: u64) -> bool {
        self.next() % 100 < percent
    }

    pub fn pick<'a, T>(&mut self, items: &'a [T]) -> &'a T {
        &items[self.below(items.len())]
    }
}

/// Labels occasionally carry characters the serializer must escape.
fn gen_text(rng: &mut Rng, base: String) -> String {
    match rng.below(10) {
        0 => format!("{base} with \"quotes\""),
        1 => format!("{base} with a \\ backslash"),
        2 => format!("{base}\nsecond line"),
        3 => format!("{base}, commas | pipes # not a comment"),
        _ => base,
    }
}

const LEVELS: [Level; 3] = [Level::Low, Level::Medium, Level::High];
const CATEGORIES: [ThreatCategory; 3] = [
    ThreatCategory::Conventional,
    ThreatCategory::AdversarialMl,
    ThreatCategory::Conversational,
];
const PHASES: [Phase; 3] = [Phase::Precondition, Phase::Execution, Phase::Impact];
const ROLES: [PathRole; 3] = [PathRole::Direct, PathRole::Indirect, PathRole::Situational];

/// Declared ids a generated leaf may reference.
struct Pools<'a> {
    pres: &'a [String],
    components: &'a [String],
}

fn gen_profile(rng: &mut Rng, pools: &Pools<'_>) -> StepProfile {
    let mut preconditions = BTreeSet::new();
    for pre in pools.pres {
        if rng.chance(25) {
            preconditions.insert(pre.clone());
        }
    }
    let component = if !pools.components.is_empty() && rng.chance(50) {
        Some(rng.pick(pools.components).clone())
    } else {
        None
    };
    StepProfile {
        business_knowledge: *rng.pick(&LEVELS),
        technical_complexity: *rng.pick(&LEVELS),
        insider_advantage: rng.chance(50),
        category: *rng.pick(&CATEGORIES),
        preconditions,
        component,
        phase: if rng.chance(70) { Phase::Execution } else { *rng.pick(&PHASES) },
    }
}

struct TreeBuilder<'a> {
    nodes: BTreeMap<String, TreeNode>,
    counter: usize,
    max_depth: usize,
    pools: Pools<'a>,
}

impl TreeBuilder<'_> {
    fn gen_node(&mut self, rng: &mut Rng, leaf_budget: usize, depth: usize) -> String {
        let id = format!("n{}", self.counter);
        self.counter += 1;
        let make_leaf = leaf_budget <= 1 || depth >= self.max_depth || rng.chance(25);
        if make_leaf {
            self.nodes.insert(
                id.clone(),
                TreeNode {
                    id: id.clone(),
                    label: gen_text(rng, format!("step {id}")),
                    kind: NodeKind::Leaf { profile: gen_profile(rng, &self.pools) },
                },
            );
            return id;
        }
        let arity = rng.range(2, 3.min(leaf_budget));
        let mut parts = vec![1usize; arity];
        let mut extra = leaf_budget - arity;
        while extra > 0 {
            parts[rng.below(arity)] += 1;
            extra -= 1;
        }
        let children: Vec<String> = parts
            .clone()
            .into_iter()
            .map(|budget| self.gen_node(rng, budget, depth + 1))
            .collect();
        let connector = if rng.chance(50) { Connector::And } else { Connector::Or };
        self.nodes.insert(
            id.clone(),
            TreeNode {
                id: id.clone(),
                label: gen_text(rng, format!("goal {id}")),
                kind: NodeKind::Internal { connector, children },
            },
        );
        id
    }
}

/// A random valid tree with at most `max_leaves` leaves and depth at most
/// `max_depth`.
pub fn gen_tree(
    rng: &mut Rng,
    max_leaves: usize,
    max_depth: usize,
    pre_pool: &[String],
    components: &[String],
) -> AttackTree {
    let mut builder = TreeBuilder {
        nodes: BTreeMap::new(),
        counter: 0,
        max_depth,
        pools: Pools { pres: pre_pool, components },
    };
    let target = rng.range(1, max_leaves);
    let root = builder.gen_node(rng, target, 0);
    AttackTree {
        goal_id: root.clone(),
        goal_label: "generated goal".to_string(),
        root,
        nodes: builder.nodes,
    }
}

const KINDS: [ComponentKind; 5] = [
    ComponentKind::WebApp,
    ComponentKind::Platform,
    ComponentKind::Orchestrator,
    ComponentKind::ExternalResource,
    ComponentKind::Model,
];

/// A random bundle that passes validation: referential integrity holds and
/// every pin sits inside its vector's admissible range.
pub fn gen_bundle(rng: &mut Rng) -> AssessmentBundle {
    let mut bundle = AssessmentBundle::default();

    let component_ids: Vec<String> = (0..rng.range(1, 3)).map(|i| format!("c{i}")).collect();
    for (index, id) in component_ids.iter().enumerate() {
        bundle.system.components.push(Component {
            id: id.clone(),
            kind: KINDS[index % KINDS.len()],
            name: gen_text(rng, format!("Component {index}")),
        });
    }
    let boundary_ids: Vec<String> = (0..rng.range(0, 2)).map(|i| format!("b{i}")).collect();
    for (index, id) in boundary_ids.iter().enumerate() {
        bundle.system.boundaries.push(TrustBoundary {
            id: id.clone(),
            name: format!("Boundary {index}"),
        });
    }
    for _ in 0..rng.range(0, 3) {
        bundle.system.flows.push(DataFlow {
            from: rng.pick(&component_ids).clone(),
            to: rng.pick(&component_ids).clone(),
            crosses: if !boundary_ids.is_empty() && rng.chance(50) {
                Some(rng.pick(&boundary_ids).clone())
            } else {
                None
            },
        });
    }

    let pre_pool: Vec<String> = (0..rng.range(0, 3)).map(|i| format!("p{i}")).collect();
    for id in &pre_pool {
        bundle.preconditions.push(Precondition {
            id: id.clone(),
            description: gen_text(rng, format!("precondition {id}")),
            component: rng.pick(&component_ids).clone(),
        });
    }

    let tree = gen_tree(rng, 8, 4, &pre_pool, &component_ids);
    let node_ids: Vec<String> = tree.nodes.keys().cloned().collect();
    let goal = tree.goal_id.clone();
    bundle.tree = Some(tree);

    for risk_index in 0..rng.range(1, 3) {
        let mut candidate_paths = Vec::new();
        for _ in 0..rng.range(1, 3) {
            let mut steps = Vec::new();
            for _ in 0..rng.range(1, 2) {
                let vector = rng.pick(&node_ids).clone();
                let pinned_likelihood = if rng.chance(40) {
                    let tree = bundle.tree.as_ref().unwrap();
                    let (min, max) = vector_profile(tree, &vector, DEFAULT_PATH_BUDGET)
                        .unwrap()
                        .admissible();
                    Some(rng.range(min as usize, max as usize) as u8)
                } else {
                    None
                };
                steps.push(VectorBinding {
                    vector,
                    role: *rng.pick(&ROLES),
                    pinned_likelihood,
                });
            }
            candidate_paths.push(CandidatePath { steps });
        }
        bundle.risks.push(RiskInstance {
            id: format!("R{risk_index}"),
            goal: goal.clone(),
            description: gen_text(rng, format!("generated risk {risk_index}")),
            impact: ImpactScore::new(rng.range(1, 5) as u8).unwrap(),
            candidate_paths,
        });
    }

    for scenario_index in 0..rng.range(0, 2) {
        bundle.scenarios.push(gen_scenario_with_id(
            rng,
            &node_ids,
            &pre_pool,
            format!("s{scenario_index}"),
        ));
    }

    bundle
}

fn gen_scenario_with_id(
    rng: &mut Rng,
    node_ids: &[String],
    pre_pool: &[String],
    id: String,
) -> Scenario {
    let mut disabled = BTreeSet::new();
    for _ in 0..rng.range(0, 2) {
        disabled.insert(rng.pick(node_ids).clone());
    }
    let mut removed_preconditions = BTreeSet::new();
    if !pre_pool.is_empty() && rng.chance(40) {
        removed_preconditions.insert(rng.pick(pre_pool).clone());
    }
    Scenario {
        id,
        disabled,
        removed_preconditions,
        attacker_profile: AttackerProfile::INSIDER,
    }
}

/// A disable/remove-only scenario over the bundle's own ids, keeping the
/// insider profile so recomputation is comparable to the baseline.
pub fn gen_scenario(rng: &mut Rng, bundle: &AssessmentBundle) -> Scenario {
    let node_ids: Vec<String> = bundle
        .tree
        .as_ref()
        .map(|t| t.nodes.keys().cloned().collect())
        .unwrap_or_default();
    let pre_pool: Vec<String> = bundle.preconditions.iter().map(|p| p.id.clone()).collect();
    gen_scenario_with_id(rng, &node_ids, &pre_pool, "what-if".to_string())
}
