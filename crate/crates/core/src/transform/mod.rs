//! Bisimulation-preserving constructions and their checkers.

mod acyclic;
mod cover;
mod exploded;
mod regular;

use serde::Serialize;
use thiserror::Error;

use crate::model::ValidationReport;

pub use acyclic::{is_n_acyclic, max_overlap};
pub use cover::{
    disjoint_union, dummy_agent_expand, is_k_rich, rich_cover, verify_covering, Covering, CoveringFailure,
    DUMMY_AGENT,
};
pub use exploded::{
    exploded_view, exploded_view_capped, pullback_formula, recover_from_exploded, ExplodedView, ViewPoint,
    DEFAULT_CLASS_CAP, REL_I, VIEW_POINT,
};
pub use regular::{
    b_membership_formula, b_structure, check_kappa_regular, granularity_schedule, is_kappa_regular, local_structure,
    regularize, BlockDecomposition, ClassDecomposition, LocalStructure, Regularized,
};

#[derive(Debug, Error, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "error", rename_all = "snake_case")]
pub enum TransformError {
    #[error("model was not validated")]
    NotValidated,
    #[error("the state must be non-empty")]
    EmptyState,
    #[error("class of size {size} exceeds the cap {cap}")]
    Cap { size: usize, cap: usize },
    #[error("insufficient richness in {agent}-class {class:?}: {detail}")]
    InsufficientRichness {
        agent: String,
        class: Vec<String>,
        detail: String,
    },
    #[error("post-verification failed: {0}")]
    PostVerificationFailure(String),
    #[error("malformed exploded view: {0}")]
    MalformedView(String),
    #[error("decomposition is not regular: {0}")]
    NotRegular(String),
    #[error("invalid model: {0}")]
    Invalid(String),
}

impl From<ValidationReport> for TransformError {
    fn from(r: ValidationReport) -> Self {
        TransformError::Invalid(r.to_string())
    }
}
