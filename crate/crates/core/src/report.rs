use serde::Serialize;

/// Summary of an ingestion step.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct LoadReport {
    pub node_count: usize,
    pub edge_count: usize,
    pub token_count: usize,
    /// Informational only; never changes the exit status.
    pub warnings: Vec<String>,
}
