use std::path::PathBuf;

use serde::{Deserialize, Serialize};

pub const FILE_NAME: &str = "manifest.json";
pub const TOOL: &str = "glotto";

/// Chronology parameters after layering defaults, config file, environment
/// and flags. `k_var` stays `None` unless set somewhere.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Chronology {
    pub tau: f64,
    pub d_max: f64,
    pub k_var: Option<f64>,
    pub reference_year: i32,
}

/// A command with every input resolved, enough to reproduce its outputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "lowercase")]
pub enum Resolved {
    Dist {
        corpus: PathBuf,
        m_catalog: u32,
        policy: String,
        min_shared: usize,
        references: Vec<String>,
    },
    Tree {
        matrix: PathBuf,
        chronology: Chronology,
        anchor: Option<f64>,
        annotate: Option<usize>,
    },
    Embed {
        matrix: PathBuf,
        dim: usize,
        groups: Option<PathBuf>,
        group_column: Option<String>,
    },
    Date {
        matrix: PathBuf,
        chronology: Chronology,
        dim: Option<usize>,
    },
    Simulate {
        tree: PathBuf,
        rate: f64,
        seed: u64,
        m_catalog: u32,
        baseline_samples: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub out_dir: PathBuf,
    #[serde(flatten)]
    pub run: Resolved,
}

impl RunManifest {
    pub fn new(out_dir: PathBuf, run: Resolved) -> Self {
        RunManifest {
            tool: TOOL.to_owned(),
            version: env!("CARGO_PKG_VERSION").to_owned(),
            out_dir,
            run,
        }
    }
}
