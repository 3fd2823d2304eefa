//! Two-factor likelihood framework: base scores from capability
//! requirements, insider uplift, admissible ranges, pin resolution, role
//! modifiers, and weakest-link combination along a conjunctive path.
//!
//! The base score is `5 - max(rank(bk), rank(tc))` clamped to [1,5]; a step
//! flagged with insider advantage widens the admissible range by one at the
//! top. Bound vectors may be whole subtrees, whose capability profile is
//! derived from the most feasible minimal path through them.

use std::collections::BTreeSet;

use crate::error::EngineError;
use crate::model::{AttackTree, AttackerProfile, Level, StepProfile, VectorBinding};
use crate::paths::subtree_step_family;

/// Capability requirement of an attack vector: what the likelihood
/// framework needs to score it. Leaves carry one directly; internal vectors
/// derive one from their subtree.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VectorProfile {
    pub business_knowledge: Level,
    pub technical_complexity: Level,
    pub insider_advantage: bool,
}

impl VectorProfile {
    pub fn of_step(profile: &StepProfile) -> Self {
        VectorProfile {
            business_knowledge: profile.business_knowledge,
            technical_complexity: profile.technical_complexity,
            insider_advantage: profile.insider_advantage,
        }
    }

    pub fn base(&self) -> u8 {
        base_likelihood_levels(self.business_knowledge, self.technical_complexity)
    }

    pub fn admissible(&self) -> (u8, u8) {
        let base = self.base();
        let max = if self.insider_advantage {
            (base + 1).min(5)
        } else {
            base
        };
        (base, max)
    }
}

/// Base likelihood from the two capability factors.
pub fn base_likelihood_levels(bk: Level, tc: Level) -> u8 {
    let requirement = bk.rank().max(tc.rank());
    (5 - requirement).clamp(1, 5)
}

/// Base likelihood of a step profile.
pub fn base_likelihood(profile: &StepProfile) -> u8 {
    base_likelihood_levels(profile.business_knowledge, profile.technical_complexity)
}

/// Admissible likelihood range of a step profile: the base, widened by one
/// at the top when insider status raises feasibility.
pub fn admissible_range(profile: &StepProfile) -> (u8, u8) {
    VectorProfile::of_step(profile).admissible()
}

/// Derive the capability profile of the vector rooted at `node`.
///
/// For a leaf this is its own profile. For an internal node, each minimal
/// path through the subtree has a joint requirement (componentwise maximum
/// of its leaves' levels, range ceiling at the weakest leaf's ceiling) and
/// the vector takes the profile of its most feasible path. Ties prefer
/// fewer steps, then the lexicographically first step set.
pub fn vector_profile(
    tree: &AttackTree,
    node: &str,
    budget: usize,
) -> Result<VectorProfile, EngineError> {
    Ok(dominant_subpath(tree, node, budget)?.0)
}

/// The leaf steps of the vector's most feasible minimal path, the same
/// path whose joint profile [`vector_profile`] reports.
pub fn vector_dominant_steps(
    tree: &AttackTree,
    node: &str,
    budget: usize,
) -> Result<BTreeSet<String>, EngineError> {
    Ok(dominant_subpath(tree, node, budget)?.1)
}

fn dominant_subpath(
    tree: &AttackTree,
    node: &str,
    budget: usize,
) -> Result<(VectorProfile, BTreeSet<String>), EngineError> {
    let target = tree
        .node(node)
        .ok_or_else(|| EngineError::UnknownNode(node.to_string()))?;
    if let Some(profile) = target.profile() {
        return Ok((
            VectorProfile::of_step(profile),
            BTreeSet::from([node.to_string()]),
        ));
    }

    let family = subtree_step_family(tree, node, budget)?;
    let mut best: Option<(u8, u8, usize, VectorProfile, usize)> = None;
    for (index, steps) in family.iter().enumerate() {
        let mut bk = Level::Low;
        let mut tc = Level::Low;
        let mut ceiling = 5u8;
        for step in steps {
            let profile = tree
                .node(step)
                .and_then(|n| n.profile())
                .ok_or_else(|| EngineError::UnknownNode(step.clone()))?;
            bk = bk.max(profile.business_knowledge);
            tc = tc.max(profile.technical_complexity);
            ceiling = ceiling.min(admissible_range(profile).1);
        }
        let base = base_likelihood_levels(bk, tc);
        // ceiling is always base or base+1: the leaf that pins the joint
        // base caps it from above.
        let joint = VectorProfile {
            business_knowledge: bk,
            technical_complexity: tc,
            insider_advantage: ceiling > base,
        };
        let better = match &best {
            None => true,
            Some((max, b, len, _, _)) => {
                (ceiling, base) > (*max, *b) || ((ceiling, base) == (*max, *b) && steps.len() < *len)
            }
        };
        if better {
            best = Some((ceiling, base, steps.len(), joint, index));
        }
    }
    best.map(|(_, _, _, profile, index)| (profile, family[index].clone()))
        .ok_or_else(|| EngineError::InfeasibleVector(node.to_string()))
}

/// Fully resolved likelihood of one vector binding.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ResolvedLikelihood {
    /// Base score from the capability formula.
    pub base: u8,
    /// Admissible (min, max) range declared by the vector's profile.
    pub admissible: (u8, u8),
    /// Pin if present, otherwise the profile default for the attacker.
    pub resolved: u8,
    /// Role modifier, zero or negative.
    pub role_modifier: i8,
    /// `max(1, resolved + role_modifier)`.
    pub effective: u8,
    /// True when a pin exceeded what the attacker profile admits and was
    /// clamped down (pins encode insider-informed judgments).
    pub pin_clamped: bool,
}

/// Resolve a binding against its vector's profile and the attacker profile.
///
/// Unpinned bindings resolve to the range maximum the attacker can reach:
/// insider attackers take the insider-uplifted ceiling, external attackers
/// the base. A pin outside the declared admissible range is a domain error;
/// a pin above what the attacker admits is clamped and flagged.
pub fn resolve_binding(
    binding: &VectorBinding,
    profile: &VectorProfile,
    attacker: &AttackerProfile,
) -> Result<ResolvedLikelihood, EngineError> {
    let (min, max) = profile.admissible();
    let attacker_max = if attacker.insider { max } else { min };
    let (resolved, pin_clamped) = match binding.pinned_likelihood {
        Some(pin) => {
            if pin < min || pin > max {
                return Err(EngineError::PinOutsideRange {
                    vector: binding.vector.clone(),
                    pin,
                    min,
                    max,
                });
            }
            (pin.min(attacker_max), pin > attacker_max)
        }
        None => (attacker_max, false),
    };
    let role_modifier = binding.role.modifier();
    let effective = (resolved as i8 + role_modifier).max(1) as u8;
    Ok(ResolvedLikelihood {
        base: profile.base(),
        admissible: (min, max),
        resolved,
        role_modifier,
        effective,
        pin_clamped,
    })
}

/// Weakest-link combination: the likelihood of a conjunctive path is the
/// minimum effective likelihood of its bindings.
pub fn path_likelihood(bindings: &[ResolvedLikelihood]) -> Result<u8, EngineError> {
    bindings
        .iter()
        .map(|b| b.effective)
        .min()
        .ok_or(EngineError::EmptyBindingList)
}

/// Render an admissible range the way the framework table does: a bare
/// value for point ranges, `min-max` with an en dash otherwise.
pub fn range_text(range: (u8, u8)) -> String {
    if range.0 == range.1 {
        range.0.to_string()
    } else {
        format!("{}\u{2013}{}", range.0, range.1)
    }
}
