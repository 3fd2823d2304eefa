//! riskforge: goal-driven cyber risk assessment over AND/OR attack trees.
//!
//! The crate parses declarative assessment bundles (system model, attack
//! tree, preconditions, risk register, scenarios) from ATDL text,
//! enumerates minimal attack paths, scores risks with a two-factor
//! likelihood framework on a Likelihood x Impact matrix, selects dominant
//! paths, and recomputes scores under mitigation what-if scenarios.
//!
//! Everything is a pure function over immutable values; concurrent use
//! needs no coordination.

pub mod atdl;
pub mod corpus;
pub mod error;
pub mod likelihood;
pub mod model;
pub mod paths;
pub mod report;
pub mod risk;
pub mod scenario;
pub mod validate;

pub use atdl::{export_canonical, parse_document, parse_document_named, serialize_document, ParseError};
pub use error::EngineError;
pub use model::{scale_label, AssessmentBundle, AttackerProfile, ScaleKind};
pub use paths::{brute_force_paths, enumerate_paths, enumerate_paths_with_budget, DEFAULT_PATH_BUDGET};
pub use risk::{assess_goal, assess_risk, risk_matrix};
pub use scenario::{apply_scenario, diff_assessments, whatif};
pub use validate::{validate_bundle, validate_bundle_with_budget, ValidationReport};
