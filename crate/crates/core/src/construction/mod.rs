//! Randomized construction of small weight sets `A ⊆ F_p^*` with
//! `D_A(F_p) ≤ k_total`, and certificates for them.

pub mod assemble;
pub mod bad_set;
pub mod certificate;
pub mod cover;
pub mod goodness;
pub mod params;
pub mod verify;

pub use assemble::{assemble_weight_set, stage_weights};
pub use bad_set::{build_bad_set, BadSet, TupleVec};
pub use certificate::{
    construct_weight_set, construct_with, verify_document, ConstructOptions, CoverCertificate,
    SCHEMA,
};
pub use cover::{find_cover, Cover, CoverConfig, CoverMode, IntersectionCheck};
pub use goodness::{goodness_threshold, is_good};
pub use params::{make_params, make_params_relaxed, params_with_radius, ConstructionParams, Parity};
pub use verify::{verify_weight_set, FailureWitness, Tier, Verdict, VerificationReport};
