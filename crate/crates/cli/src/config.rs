//! Scenario configuration for the `simulate` subcommand.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct SimulateConfig {
    pub k: u32,
    pub r: u32,
    pub n_tx: usize,
    pub n_rx: usize,
    pub n_ris: usize,
    /// Optional code-length override; the shortest design otherwise.
    pub p: Option<u32>,
    pub q: usize,
    pub es: f64,
    pub n0: f64,
    pub seed: u64,
    /// Channel synthesis model; `iid` draws unstructured CN(0,1) entries.
    pub channel_model: String,
    pub trials: usize,
}

impl Default for SimulateConfig {
    fn default() -> Self {
        Self {
            k: 2,
            r: 2,
            n_tx: 2,
            n_rx: 2,
            n_ris: 8,
            p: None,
            q: 1,
            es: 1.0,
            n0: 0.01,
            seed: 1,
            channel_model: "iid".into(),
            trials: 100,
        }
    }
}
