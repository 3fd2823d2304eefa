//! Cross-entity validation of an assessment bundle.
//!
//! Findings are data, not failures: the report lists errors (referential
//! breaks, malformed trees, pins outside admissible ranges, scale bounds,
//! duplicate ids) and warnings (suspicious but legal constructs). A bundle
//! is valid when the report carries zero errors. Validation is pure, so
//! validating twice yields identical reports.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::likelihood::vector_profile;
use crate::model::{
    AssessmentBundle, AttackTree, EntityRef, NodeKind, SourceSpan,
};
use crate::paths::DEFAULT_PATH_BUDGET;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Severity {
    Warning,
    Error,
}

impl fmt::Display for Severity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Severity::Warning => write!(f, "warning"),
            Severity::Error => write!(f, "error"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Finding {
    pub severity: Severity,
    pub location: EntityRef,
    pub span: Option<SourceSpan>,
    pub message: String,
}

impl fmt::Display for Finding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.span {
            Some(span) => write!(f, "{span}: {}: {}: {}", self.severity, self.location, self.message),
            None => write!(f, "{}: {}: {}", self.severity, self.location, self.message),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub findings: Vec<Finding>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.error_count() == 0
    }

    pub fn error_count(&self) -> usize {
        self.findings
            .iter()
            .filter(|f| f.severity == Severity::Error)
            .count()
    }

    pub fn errors(&self) -> impl Iterator<Item = &Finding> {
        self.findings.iter().filter(|f| f.severity == Severity::Error)
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.findings.is_empty() {
            return writeln!(f, "valid: no findings");
        }
        for finding in &self.findings {
            writeln!(f, "{finding}")?;
        }
        Ok(())
    }
}

/// Validate with the default path budget for pin-range derivation.
pub fn validate_bundle(bundle: &AssessmentBundle) -> ValidationReport {
    validate_bundle_with_budget(bundle, DEFAULT_PATH_BUDGET)
}

pub fn validate_bundle_with_budget(bundle: &AssessmentBundle, budget: usize) -> ValidationReport {
    let mut v = Validator { bundle, budget, findings: Vec::new() };
    v.system();
    v.preconditions();
    v.tree();
    v.risks();
    v.scenarios();
    ValidationReport { findings: v.findings }
}

struct Validator<'a> {
    bundle: &'a AssessmentBundle,
    budget: usize,
    findings: Vec<Finding>,
}

impl<'a> Validator<'a> {
    fn push(&mut self, severity: Severity, location: EntityRef, message: String) {
        let span = self.bundle.spans.get(&location).cloned();
        self.findings.push(Finding { severity, location, span, message });
    }

    fn error(&mut self, location: EntityRef, message: String) {
        self.push(Severity::Error, location, message);
    }

    fn warn(&mut self, location: EntityRef, message: String) {
        self.push(Severity::Warning, location, message);
    }

    fn component_exists(&self, id: &str) -> bool {
        self.bundle.system.component(id).is_some()
    }

    fn system(&mut self) {
        let mut seen = BTreeSet::new();
        for component in &self.bundle.system.components {
            if !seen.insert(component.id.clone()) {
                self.error(
                    EntityRef::Component(component.id.clone()),
                    format!("duplicate component id `{}`", component.id),
                );
            }
        }
        let mut seen = BTreeSet::new();
        for boundary in &self.bundle.system.boundaries {
            if !seen.insert(boundary.id.clone()) {
                self.error(
                    EntityRef::Boundary(boundary.id.clone()),
                    format!("duplicate boundary id `{}`", boundary.id),
                );
            }
        }
        for (index, flow) in self.bundle.system.flows.iter().enumerate() {
            for endpoint in [&flow.from, &flow.to] {
                if !self.component_exists(endpoint) {
                    self.error(
                        EntityRef::Flow(index),
                        format!("flow endpoint `{endpoint}` is not a known component"),
                    );
                }
            }
            if let Some(boundary) = &flow.crosses {
                if self.bundle.system.boundary(boundary).is_none() {
                    self.error(
                        EntityRef::Flow(index),
                        format!("flow crosses unknown boundary `{boundary}`"),
                    );
                }
            }
        }
    }

    fn preconditions(&mut self) {
        let mut seen = BTreeSet::new();
        let mut referenced: BTreeSet<&str> = BTreeSet::new();
        if let Some(tree) = &self.bundle.tree {
            for node in tree.nodes.values() {
                if let Some(profile) = node.profile() {
                    referenced.extend(profile.preconditions.iter().map(String::as_str));
                }
            }
        }
        for pre in &self.bundle.preconditions {
            if !seen.insert(pre.id.clone()) {
                self.error(
                    EntityRef::Precondition(pre.id.clone()),
                    format!("duplicate precondition id `{}`", pre.id),
                );
            }
            if !self.component_exists(&pre.component) {
                self.error(
                    EntityRef::Precondition(pre.id.clone()),
                    format!("precondition component `{}` is not a known component", pre.component),
                );
            }
            if !referenced.contains(pre.id.as_str()) {
                self.warn(
                    EntityRef::Precondition(pre.id.clone()),
                    format!("precondition `{}` is not required by any leaf", pre.id),
                );
            }
        }
    }

    fn tree(&mut self) {
        let Some(tree) = &self.bundle.tree else {
            return;
        };
        if !tree.contains(&tree.root) {
            self.error(
                EntityRef::Tree,
                format!("root node `{}` does not resolve", tree.root),
            );
            return;
        }
        if tree.goal_id != tree.root {
            self.warn(
                EntityRef::Tree,
                format!(
                    "goal id `{}` differs from root node id `{}`",
                    tree.goal_id, tree.root
                ),
            );
        }

        // Walk from the root counting how often each node is reached; a
        // well-formed tree reaches every declared node exactly once.
        let mut reached: BTreeMap<&str, usize> = BTreeMap::new();
        let mut stack = vec![tree.root.as_str()];
        let mut guard = 0usize;
        while let Some(id) = stack.pop() {
            guard += 1;
            if guard > tree.nodes.len().saturating_mul(2) + 16 {
                self.error(EntityRef::Tree, "node graph contains a cycle".to_string());
                break;
            }
            let count = reached.entry(id).or_insert(0);
            *count += 1;
            if *count > 1 {
                // Re-reached: either two parents or a cycle. Do not recurse
                // again.
                continue;
            }
            let Some(node) = tree.node(id) else {
                continue;
            };
            match &node.kind {
                NodeKind::Leaf { profile } => {
                    for pre in &profile.preconditions {
                        if self.bundle.precondition(pre).is_none() {
                            self.error(
                                EntityRef::Node(id.to_string()),
                                format!("leaf requires unknown precondition `{pre}`"),
                            );
                        }
                    }
                    if let Some(component) = &profile.component {
                        if !self.component_exists(component) {
                            self.error(
                                EntityRef::Node(id.to_string()),
                                format!("leaf names unknown component `{component}`"),
                            );
                        }
                    }
                }
                NodeKind::Internal { children, .. } => {
                    if children.is_empty() {
                        self.error(
                            EntityRef::Node(id.to_string()),
                            "internal node has no children".to_string(),
                        );
                    }
                    for child in children {
                        if tree.contains(child) {
                            stack.push(child.as_str());
                        } else {
                            self.error(
                                EntityRef::Node(id.to_string()),
                                format!("child `{child}` does not resolve"),
                            );
                        }
                    }
                }
            }
        }
        for (id, count) in &reached {
            if *count > 1 {
                self.error(
                    EntityRef::Node(id.to_string()),
                    format!("node is reachable {count} times; every non-root must have exactly one parent"),
                );
            }
        }
        for id in tree.nodes.keys() {
            if !reached.contains_key(id.as_str()) {
                self.error(
                    EntityRef::Node(id.clone()),
                    "node is not reachable from the root".to_string(),
                );
            }
        }
    }

    fn risks(&mut self) {
        let mut seen = BTreeSet::new();
        for risk in &self.bundle.risks {
            if !seen.insert(risk.id.clone()) {
                self.error(
                    EntityRef::Risk(risk.id.clone()),
                    format!("duplicate risk id `{}`", risk.id),
                );
            }
            match &self.bundle.tree {
                None => {
                    self.error(
                        EntityRef::Risk(risk.id.clone()),
                        "risk declared but the bundle has no attack tree".to_string(),
                    );
                    continue;
                }
                Some(tree) => {
                    if risk.goal != tree.goal_id {
                        self.error(
                            EntityRef::Risk(risk.id.clone()),
                            format!(
                                "risk goal `{}` does not match the tree goal `{}`",
                                risk.goal, tree.goal_id
                            ),
                        );
                    }
                    if risk.candidate_paths.is_empty() {
                        self.error(
                            EntityRef::Risk(risk.id.clone()),
                            "risk has no candidate paths".to_string(),
                        );
                    }
                    for (path_index, path) in risk.candidate_paths.iter().enumerate() {
                        if path.steps.is_empty() {
                            self.error(
                                EntityRef::Path { risk: risk.id.clone(), index: path_index },
                                "candidate path has no steps".to_string(),
                            );
                        }
                        for (step_index, step) in path.steps.iter().enumerate() {
                            let location = EntityRef::Step {
                                risk: risk.id.clone(),
                                path: path_index,
                                index: step_index,
                            };
                            if !tree.contains(&step.vector) {
                                self.error(
                                    location,
                                    format!("vector `{}` is not a tree node", step.vector),
                                );
                                continue;
                            }
                            self.check_pin(tree, risk, location, step);
                        }
                    }
                }
            }
        }
    }

    fn check_pin(
        &mut self,
        tree: &AttackTree,
        _risk: &crate::model::RiskInstance,
        location: EntityRef,
        step: &crate::model::VectorBinding,
    ) {
        let Some(pin) = step.pinned_likelihood else {
            return;
        };
        match vector_profile(tree, &step.vector, self.budget) {
            Ok(profile) => {
                let (min, max) = profile.admissible();
                if pin < min || pin > max {
                    self.error(
                        location,
                        format!(
                            "pin {pin} on vector `{}` lies outside the admissible range [{min},{max}]",
                            step.vector
                        ),
                    );
                }
            }
            Err(err) => {
                self.error(
                    location,
                    format!("cannot derive admissible range for `{}`: {err}", step.vector),
                );
            }
        }
    }

    fn scenarios(&mut self) {
        let mut seen = BTreeSet::new();
        for scenario in &self.bundle.scenarios {
            if !seen.insert(scenario.id.clone()) {
                self.error(
                    EntityRef::Scenario(scenario.id.clone()),
                    format!("duplicate scenario id `{}`", scenario.id),
                );
            }
            for node in &scenario.disabled {
                let resolves = self
                    .bundle
                    .tree
                    .as_ref()
                    .map(|t| t.contains(node))
                    .unwrap_or(false);
                if !resolves {
                    self.error(
                        EntityRef::Scenario(scenario.id.clone()),
                        format!("disable target `{node}` is not a tree node"),
                    );
                }
            }
            for pre in &scenario.removed_preconditions {
                if self.bundle.precondition(pre).is_none() {
                    self.error(
                        EntityRef::Scenario(scenario.id.clone()),
                        format!("removed precondition `{pre}` is not declared"),
                    );
                }
            }
        }
    }
}
