//! Domain model for assessment bundles: system architecture, AND/OR attack
//! trees, risk register entries, scenarios, and the 1-5 rating scales.
//!
//! All types are plain immutable values. Construct them, share them, send
//! them across threads; nothing here mutates after construction.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::error::EngineError;

pub type ComponentId = String;
pub type BoundaryId = String;
pub type PreconditionId = String;
pub type NodeId = String;
pub type RiskId = String;
pub type ScenarioId = String;

// ---------------------------------------------------------------------------
// System model
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum ComponentKind {
    WebApp,
    Platform,
    Orchestrator,
    ExternalResource,
    Model,
}

impl ComponentKind {
    pub fn keyword(&self) -> &'static str {
        match self {
            ComponentKind::WebApp => "web-app",
            ComponentKind::Platform => "platform",
            ComponentKind::Orchestrator => "orchestrator",
            ComponentKind::ExternalResource => "external-resource",
            ComponentKind::Model => "model",
        }
    }

    pub fn from_keyword(word: &str) -> Option<Self> {
        match word {
            "web-app" => Some(ComponentKind::WebApp),
            "platform" => Some(ComponentKind::Platform),
            "orchestrator" => Some(ComponentKind::Orchestrator),
            "external-resource" => Some(ComponentKind::ExternalResource),
            "model" => Some(ComponentKind::Model),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Component {
    pub id: ComponentId,
    pub kind: ComponentKind,
    pub name: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrustBoundary {
    pub id: BoundaryId,
    pub name: String,
}

/// A data flow between two components, optionally crossing a trust boundary.
/// Flows that cross a boundary are treated as attack surface.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DataFlow {
    pub from: ComponentId,
    pub to: ComponentId,
    pub crosses: Option<BoundaryId>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SystemModel {
    pub components: Vec<Component>,
    pub boundaries: Vec<TrustBoundary>,
    pub flows: Vec<DataFlow>,
}

impl SystemModel {
    pub fn component(&self, id: &str) -> Option<&Component> {
        self.components.iter().find(|c| c.id == id)
    }

    pub fn boundary(&self, id: &str) -> Option<&TrustBoundary> {
        self.boundaries.iter().find(|b| b.id == id)
    }
}

// ---------------------------------------------------------------------------
// Capability levels and step profiles
// ---------------------------------------------------------------------------

/// Three-level requirement scale for business knowledge and technical
/// complexity. Ranks are 1..=3 and feed the base likelihood formula.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Level {
    Low,
    Medium,
    High,
}

impl Level {
    pub fn rank(&self) -> u8 {
        match self {
            Level::Low => 1,
            Level::Medium => 2,
            Level::High => 3,
        }
    }

    pub fn keyword(&self) -> &'static str {
        match self {
            Level::Low => "low",
            Level::Medium => "med",
            Level::High => "high",
        }
    }

    pub fn from_keyword(word: &str) -> Option<Self> {
        match word {
            "low" => Some(Level::Low),
            "med" => Some(Level::Medium),
            "high" => Some(Level::High),
            _ => None,
        }
    }

    pub fn display_name(&self) -> &'static str {
        match self {
            Level::Low => "Low",
            Level::Medium => "Medium",
            Level::High => "High",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum ThreatCategory {
    Conventional,
    AdversarialMl,
    Conversational,
}

impl ThreatCategory {
    pub fn keyword(&self) -> &'static str {
        match self {
            ThreatCategory::Conventional => "conventional",
            ThreatCategory::AdversarialMl => "adversarial-ml",
            ThreatCategory::Conversational => "conversational",
        }
    }

    pub fn from_keyword(word: &str) -> Option<Self> {
        match word {
            "conventional" => Some(ThreatCategory::Conventional),
            "adversarial-ml" => Some(ThreatCategory::AdversarialMl),
            "conversational" => Some(ThreatCategory::Conversational),
            _ => None,
        }
    }
}

/// Narrative position of a step along the threat timeline.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord)]
pub enum Phase {
    Precondition,
    #[default]
    Execution,
    Impact,
}

impl Phase {
    pub fn keyword(&self) -> &'static str {
        match self {
            Phase::Precondition => "precondition",
            Phase::Execution => "execution",
            Phase::Impact => "impact",
        }
    }

    pub fn from_keyword(word: &str) -> Option<Self> {
        match word {
            "precondition" => Some(Phase::Precondition),
            "execution" => Some(Phase::Execution),
            "impact" => Some(Phase::Impact),
            _ => None,
        }
    }
}

/// Capability requirements of an atomic attack step.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StepProfile {
    pub business_knowledge: Level,
    pub technical_complexity: Level,
    /// Whether insider status raises the step's feasibility ceiling.
    pub insider_advantage: bool,
    pub category: ThreatCategory,
    pub preconditions: BTreeSet<PreconditionId>,
    pub component: Option<ComponentId>,
    pub phase: Phase,
}

/// A system state, vulnerability, or assumption an attack step requires.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Precondition {
    pub id: PreconditionId,
    pub description: String,
    pub component: ComponentId,
}

// ---------------------------------------------------------------------------
// Attack tree
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Connector {
    And,
    Or,
}

impl Connector {
    pub fn keyword(&self) -> &'static str {
        match self {
            Connector::And => "AND",
            Connector::Or => "OR",
        }
    }
}

/// Node payload: internal nodes carry a connector and children, leaves carry
/// a step profile. The enum shape makes the exclusivity structural.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NodeKind {
    Internal {
        connector: Connector,
        children: Vec<NodeId>,
    },
    Leaf {
        profile: StepProfile,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeNode {
    pub id: NodeId,
    pub label: String,
    pub kind: NodeKind,
}

impl TreeNode {
    pub fn is_leaf(&self) -> bool {
        matches!(self.kind, NodeKind::Leaf { .. })
    }

    pub fn profile(&self) -> Option<&StepProfile> {
        match &self.kind {
            NodeKind::Leaf { profile } => Some(profile),
            NodeKind::Internal { .. } => None,
        }
    }

    pub fn children(&self) -> &[NodeId] {
        match &self.kind {
            NodeKind::Internal { children, .. } => children,
            NodeKind::Leaf { .. } => &[],
        }
    }
}

/// Rooted AND/OR decomposition of an adversary goal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AttackTree {
    pub goal_id: String,
    pub goal_label: String,
    pub root: NodeId,
    pub nodes: BTreeMap<NodeId, TreeNode>,
}

impl AttackTree {
    pub fn node(&self, id: &str) -> Option<&TreeNode> {
        self.nodes.get(id)
    }

    pub fn contains(&self, id: &str) -> bool {
        self.nodes.contains_key(id)
    }

    pub fn leaf_count(&self) -> usize {
        self.nodes.values().filter(|n| n.is_leaf()).count()
    }

    /// Node ids of the subtree rooted at `id`, in depth-first order following
    /// child declaration order. Missing children are skipped.
    pub fn subtree_nodes(&self, id: &str) -> Vec<NodeId> {
        let mut out = Vec::new();
        let mut stack = vec![id.to_string()];
        while let Some(current) = stack.pop() {
            if let Some(node) = self.nodes.get(&current) {
                out.push(current.clone());
                for child in node.children().iter().rev() {
                    stack.push(child.clone());
                }
            }
        }
        out
    }

    /// Leaf ids reachable under `id` (including `id` itself when it is a leaf).
    pub fn leaves_under(&self, id: &str) -> BTreeSet<NodeId> {
        self.subtree_nodes(id)
            .into_iter()
            .filter(|n| self.nodes.get(n).map(|x| x.is_leaf()).unwrap_or(false))
            .collect()
    }

    /// Depth-first declaration order of all nodes from the root.
    pub fn dfs_order(&self) -> Vec<NodeId> {
        self.subtree_nodes(&self.root)
    }
}

// ---------------------------------------------------------------------------
// Rating scales
// ---------------------------------------------------------------------------

pub const LIKELIHOOD_LABELS: [&str; 5] =
    ["Rare", "Unlikely", "Possible", "Likely", "Almost Certain"];

pub const IMPACT_LABELS: [&str; 5] =
    ["Negligible", "Minor", "Moderate", "Major", "Catastrophic"];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScaleKind {
    Likelihood,
    Impact,
}

/// Fixed 1-5 value-to-label mapping for both rating scales.
pub fn scale_label(value: u8, kind: ScaleKind) -> Result<&'static str, EngineError> {
    if !(1..=5).contains(&value) {
        return Err(EngineError::ScaleOutOfRange { value });
    }
    let labels = match kind {
        ScaleKind::Likelihood => &LIKELIHOOD_LABELS,
        ScaleKind::Impact => &IMPACT_LABELS,
    };
    Ok(labels[(value - 1) as usize])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct LikelihoodScore {
    value: u8,
}

impl LikelihoodScore {
    pub fn new(value: u8) -> Result<Self, EngineError> {
        scale_label(value, ScaleKind::Likelihood)?;
        Ok(LikelihoodScore { value })
    }

    pub fn value(&self) -> u8 {
        self.value
    }

    pub fn label(&self) -> &'static str {
        LIKELIHOOD_LABELS[(self.value - 1) as usize]
    }
}

impl fmt::Display for LikelihoodScore {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ({})", self.value, self.label())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct ImpactScore {
    value: u8,
}

impl ImpactScore {
    pub fn new(value: u8) -> Result<Self, EngineError> {
        scale_label(value, ScaleKind::Impact)?;
        Ok(ImpactScore { value })
    }

    pub fn value(&self) -> u8 {
        self.value
    }

    pub fn label(&self) -> &'static str {
        IMPACT_LABELS[(self.value - 1) as usize]
    }
}

impl fmt::Display for ImpactScore {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ({})", self.value, self.label())
    }
}

// ---------------------------------------------------------------------------
// Risk register
// ---------------------------------------------------------------------------

/// How an attack path contributes to a risk outcome. Direct paths cause it
/// immediately; indirect paths act through a side effect on an intermediate
/// component; situational paths need specific conditions or misconfigurations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum PathRole {
    Direct,
    Indirect,
    Situational,
}

impl PathRole {
    /// Likelihood modifier applied on top of the resolved score.
    pub fn modifier(&self) -> i8 {
        match self {
            PathRole::Direct => 0,
            PathRole::Indirect => -1,
            PathRole::Situational => -2,
        }
    }

    pub fn keyword(&self) -> &'static str {
        match self {
            PathRole::Direct => "direct",
            PathRole::Indirect => "indirect",
            PathRole::Situational => "situational",
        }
    }

    pub fn from_keyword(word: &str) -> Option<Self> {
        match word {
            "direct" => Some(PathRole::Direct),
            "indirect" => Some(PathRole::Indirect),
            "situational" => Some(PathRole::Situational),
            _ => None,
        }
    }

    pub fn display_name(&self) -> &'static str {
        match self {
            PathRole::Direct => "Direct",
            PathRole::Indirect => "Indirect",
            PathRole::Situational => "Situational",
        }
    }
}

/// Binding of a risk to an attack vector (a tree node, possibly a whole
/// subtree), annotated with its contribution role and an optional analyst
/// pin resolving the vector's admissible range.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VectorBinding {
    pub vector: NodeId,
    pub role: PathRole,
    pub pinned_likelihood: Option<u8>,
}

/// Conjunctive step list: every bound vector must succeed for the path to
/// realize the risk.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CandidatePath {
    pub steps: Vec<VectorBinding>,
}

impl CandidatePath {
    /// Ordering key used for deterministic tie-breaks: the declared vector
    /// id sequence.
    pub fn key(&self) -> Vec<&str> {
        self.steps.iter().map(|s| s.vector.as_str()).collect()
    }
}

/// A named compromise outcome under a goal, with analyst-declared impact.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RiskInstance {
    pub id: RiskId,
    pub goal: String,
    pub description: String,
    pub impact: ImpactScore,
    pub candidate_paths: Vec<CandidatePath>,
}

// ---------------------------------------------------------------------------
// Scenarios and attacker profiles
// ---------------------------------------------------------------------------

/// The adversary population admitted by an assessment. Defaults to
/// insider-capable, which resolves unpinned ranges at their maximum for
/// steps flagged with insider advantage.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AttackerProfile {
    pub insider: bool,
}

impl Default for AttackerProfile {
    fn default() -> Self {
        AttackerProfile { insider: true }
    }
}

impl AttackerProfile {
    pub const INSIDER: AttackerProfile = AttackerProfile { insider: true };
    pub const EXTERNAL: AttackerProfile = AttackerProfile { insider: false };
}

/// A mitigation what-if overlay: disable tree nodes (an internal id disables
/// its whole subtree), remove preconditions, or switch the attacker profile.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Scenario {
    pub id: ScenarioId,
    pub disabled: BTreeSet<NodeId>,
    pub removed_preconditions: BTreeSet<PreconditionId>,
    pub attacker_profile: AttackerProfile,
}

// ---------------------------------------------------------------------------
// Source spans
// ---------------------------------------------------------------------------

/// Position of a parsed entity or finding in its source document.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct SourceSpan {
    pub file: String,
    pub line: u32,
    pub column: u32,
}

impl fmt::Display for SourceSpan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.file, self.line, self.column)
    }
}

/// Stable reference to an entity inside a bundle, used to key source spans
/// and to locate validation findings.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum EntityRef {
    Bundle,
    System,
    Component(ComponentId),
    Boundary(BoundaryId),
    Flow(usize),
    Precondition(PreconditionId),
    Tree,
    Node(NodeId),
    Risk(RiskId),
    Path { risk: RiskId, index: usize },
    Step { risk: RiskId, path: usize, index: usize },
    Scenario(ScenarioId),
}

impl fmt::Display for EntityRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EntityRef::Bundle => write!(f, "bundle"),
            EntityRef::System => write!(f, "system"),
            EntityRef::Component(id) => write!(f, "component {id}"),
            EntityRef::Boundary(id) => write!(f, "boundary {id}"),
            EntityRef::Flow(i) => write!(f, "flow #{}", i + 1),
            EntityRef::Precondition(id) => write!(f, "precondition {id}"),
            EntityRef::Tree => write!(f, "tree"),
            EntityRef::Node(id) => write!(f, "node {id}"),
            EntityRef::Risk(id) => write!(f, "risk {id}"),
            EntityRef::Path { risk, index } => write!(f, "risk {} path #{}", risk, index + 1),
            EntityRef::Step { risk, path, index } => {
                write!(f, "risk {} path #{} step #{}", risk, path + 1, index + 1)
            }
            EntityRef::Scenario(id) => write!(f, "scenario {id}"),
        }
    }
}

/// Side table of source spans keyed by entity, kept out of structural
/// equality so that formatting-only differences do not matter.
#[derive(Debug, Clone, Default)]
pub struct SpanMap {
    map: BTreeMap<EntityRef, SourceSpan>,
}

impl SpanMap {
    pub fn new() -> Self {
        SpanMap::default()
    }

    pub fn insert(&mut self, entity: EntityRef, span: SourceSpan) {
        self.map.insert(entity, span);
    }

    pub fn get(&self, entity: &EntityRef) -> Option<&SourceSpan> {
        self.map.get(entity)
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }
}

// ---------------------------------------------------------------------------
// Bundle
// ---------------------------------------------------------------------------

/// Root aggregate: one assessment's system model, attack tree, risk register,
/// and scenarios. Equality is structural content equality and ignores spans.
#[derive(Debug, Clone, Default)]
pub struct AssessmentBundle {
    pub system: SystemModel,
    pub preconditions: Vec<Precondition>,
    pub tree: Option<AttackTree>,
    pub risks: Vec<RiskInstance>,
    pub scenarios: Vec<Scenario>,
    pub spans: SpanMap,
}

impl PartialEq for AssessmentBundle {
    fn eq(&self, other: &Self) -> bool {
        self.system == other.system
            && self.preconditions == other.preconditions
            && self.tree == other.tree
            && self.risks == other.risks
            && self.scenarios == other.scenarios
    }
}

impl Eq for AssessmentBundle {}

impl AssessmentBundle {
    pub fn precondition(&self, id: &str) -> Option<&Precondition> {
        self.preconditions.iter().find(|p| p.id == id)
    }

    pub fn risk(&self, id: &str) -> Option<&RiskInstance> {
        self.risks.iter().find(|r| r.id == id)
    }

    pub fn scenario(&self, id: &str) -> Option<&Scenario> {
        self.scenarios.iter().find(|s| s.id == id)
    }

    /// The concrete tree, or a domain error for bundles without one.
    pub fn tree(&self) -> Result<&AttackTree, EngineError> {
        self.tree.as_ref().ok_or(EngineError::MissingTree)
    }
}
