//! Exact secrecy audits.
//!
//! Each audit compares, for every unqualified set and every pair of secrets,
//! the distribution of what the set sees under uniform dealer randomness. All
//! probabilities are exact fractions; a scheme passes when every distance is 0.

pub mod dist;
mod evolving_audit;
mod inf_audit;
pub mod linear;
mod report;
mod static_audit;

pub use dist::{statistical_distance, Distribution, Probability};
pub use evolving_audit::{
    audit_evolving, audit_evolving_sets, audit_inf_width, AuditMode, EvolvingAuditModel, EvolvingScheme, Scope,
    AUTO_EXHAUSTIVE_BITS, EXHAUSTIVE_MAX_BITS,
};
pub use inf_audit::{audit_inf_default, INF_AUDIT_MAX_WIDTH};
pub use report::{AuditCell, AuditReport, Method, CSV_HEADER};
pub use static_audit::{audit_static, audit_static_with_odd_points, STATIC_AUDIT_MAX_BITS};
