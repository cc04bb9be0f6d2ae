//! Word-phrase semantic relatedness over a typed lexical network, combined
//! with distributional similarity and threshold rules.

pub mod cli;
pub mod contextcomp;
pub mod distsim;
pub mod error;
pub mod netstore;
pub mod pathrel;
pub mod report;
pub mod ruleset;

pub use error::{Error, Result};
pub use netstore::{NodeId, NodeKind, RelationCategory, SemanticNetwork};
pub use pathrel::{PathResult, RelatednessParams, RelatednessScore};
pub use report::LoadReport;
