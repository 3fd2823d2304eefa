//! Per-risk assessment: resolve every candidate path, score the risk from
//! its dominant path (the one with maximal path likelihood), and rank risks
//! within a goal. Scores are Likelihood x Impact on the 1-5 scales.

use crate::error::EngineError;
use crate::likelihood::{path_likelihood, resolve_binding, vector_profile, ResolvedLikelihood};
use crate::model::{
    AssessmentBundle, AttackerProfile, ImpactScore, LikelihoodScore, PathRole, RiskId,
    RiskInstance,
};

/// One binding of the risk resolved against the tree and attacker profile.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BindingAssessment {
    pub vector: String,
    pub vector_label: String,
    pub role: PathRole,
    pub resolved: ResolvedLikelihood,
}

/// One candidate path with its weakest-link likelihood.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PathAssessment {
    /// Index of the path in the risk's declaration order.
    pub index: usize,
    pub bindings: Vec<BindingAssessment>,
    pub likelihood: u8,
}

impl PathAssessment {
    pub fn vector_ids(&self) -> Vec<&str> {
        self.bindings.iter().map(|b| b.vector.as_str()).collect()
    }
}

/// How the dominant path was selected among the candidates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TieBreak {
    /// Single path with the maximal likelihood.
    UniqueMaximum,
    /// Tied on likelihood; the path with fewer steps won.
    FewerSteps,
    /// Tied on likelihood and length; the lexicographically first vector
    /// id sequence won.
    VectorOrder,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RiskAssessment {
    pub risk_id: RiskId,
    pub description: String,
    pub likelihood: LikelihoodScore,
    pub impact: ImpactScore,
    /// `likelihood * impact`, in [1,25].
    pub score: u8,
    pub dominant: PathAssessment,
    pub tie_break: TieBreak,
    pub per_path_detail: Vec<PathAssessment>,
}

impl RiskAssessment {
    /// True when any binding of the dominant path had a pin clamped by the
    /// attacker profile.
    pub fn pin_clamped(&self) -> bool {
        self.dominant.bindings.iter().any(|b| b.resolved.pin_clamped)
    }
}

/// Assess a single risk under an attacker profile.
///
/// Every candidate path is resolved binding by binding; the path score is
/// the minimum effective likelihood of its bindings; the risk takes the
/// maximum over paths. Ties prefer fewer steps, then the declared vector
/// id order, and the applied rule is recorded.
pub fn assess_risk(
    risk: &RiskInstance,
    bundle: &AssessmentBundle,
    attacker: &AttackerProfile,
    budget: usize,
) -> Result<RiskAssessment, EngineError> {
    let tree = bundle.tree()?;
    let mut per_path_detail = Vec::with_capacity(risk.candidate_paths.len());
    for (index, path) in risk.candidate_paths.iter().enumerate() {
        let mut bindings = Vec::with_capacity(path.steps.len());
        for step in &path.steps {
            let profile = vector_profile(tree, &step.vector, budget)?;
            let resolved = resolve_binding(step, &profile, attacker)?;
            let label = tree
                .node(&step.vector)
                .map(|n| n.label.clone())
                .unwrap_or_else(|| step.vector.clone());
            bindings.push(BindingAssessment {
                vector: step.vector.clone(),
                vector_label: label,
                role: step.role,
                resolved,
            });
        }
        let likelihood = path_likelihood(
            &bindings.iter().map(|b| b.resolved).collect::<Vec<_>>(),
        )?;
        per_path_detail.push(PathAssessment { index, bindings, likelihood });
    }

    let Some(first) = per_path_detail.first() else {
        return Err(EngineError::NoCandidatePaths { risk: risk.id.clone() });
    };

    let mut dominant = first;
    let mut tie_break = TieBreak::UniqueMaximum;
    for candidate in &per_path_detail[1..] {
        if candidate.likelihood > dominant.likelihood {
            dominant = candidate;
            tie_break = TieBreak::UniqueMaximum;
        } else if candidate.likelihood == dominant.likelihood {
            if candidate.bindings.len() < dominant.bindings.len() {
                dominant = candidate;
                tie_break = TieBreak::FewerSteps;
            } else if candidate.bindings.len() == dominant.bindings.len() {
                if candidate.vector_ids() < dominant.vector_ids() {
                    dominant = candidate;
                }
                tie_break = TieBreak::VectorOrder;
            } else {
                tie_break = TieBreak::FewerSteps;
            }
        }
    }

    let likelihood = LikelihoodScore::new(dominant.likelihood)?;
    let score = likelihood.value() * risk.impact.value();
    Ok(RiskAssessment {
        risk_id: risk.id.clone(),
        description: risk.description.clone(),
        likelihood,
        impact: risk.impact,
        score,
        dominant: dominant.clone(),
        tie_break,
        per_path_detail,
    })
}

/// Assess every risk bound to `goal`, sorted descending by score, ties by
/// likelihood then risk id. Risks whose candidate paths were all pruned
/// away (by a scenario) are skipped; callers diffing against a baseline
/// detect them by their absence.
pub fn assess_goal(
    bundle: &AssessmentBundle,
    goal: &str,
    attacker: &AttackerProfile,
    budget: usize,
) -> Result<Vec<RiskAssessment>, EngineError> {
    let tree = bundle.tree()?;
    if tree.goal_id != goal {
        return Err(EngineError::UnknownGoal(goal.to_string()));
    }
    let mut assessments = Vec::new();
    for risk in bundle.risks.iter().filter(|r| r.goal == goal) {
        if risk.candidate_paths.is_empty() {
            continue;
        }
        assessments.push(assess_risk(risk, bundle, attacker, budget)?);
    }
    assessments.sort_by(|a, b| {
        b.score
            .cmp(&a.score)
            .then(b.likelihood.value().cmp(&a.likelihood.value()))
            .then(a.risk_id.cmp(&b.risk_id))
    });
    Ok(assessments)
}

/// 5x5 Likelihood x Impact grid; cell `(l, i)` lists the risk ids assessed
/// at likelihood `l` and impact `i`. Every assessment lands in exactly one
/// cell.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RiskMatrix {
    cells: [[Vec<RiskId>; 5]; 5],
}

impl RiskMatrix {
    pub fn cell(&self, likelihood: u8, impact: u8) -> &[RiskId] {
        &self.cells[(likelihood - 1) as usize][(impact - 1) as usize]
    }

    pub fn is_empty(&self) -> bool {
        self.cells.iter().flatten().all(|c| c.is_empty())
    }
}

pub fn risk_matrix(assessments: &[RiskAssessment]) -> RiskMatrix {
    let mut matrix = RiskMatrix::default();
    for assessment in assessments {
        let l = (assessment.likelihood.value() - 1) as usize;
        let i = (assessment.impact.value() - 1) as usize;
        matrix.cells[l][i].push(assessment.risk_id.clone());
    }
    matrix
}
