//! `report.json`: defect numbers and counts for one run.
//!
//! Every defect key is always present; `null` means the command did not
//! compute it. Field order is fixed, so identical runs give identical bytes.

use std::path::Path;

use serde::Serialize;

#[derive(Debug, Clone, Default, Serialize, PartialEq)]
pub struct Defects {
    pub plancherel: Option<f64>,
    pub roundtrip_ffstar: Option<f64>,
    pub roundtrip_fstarf: Option<f64>,
    pub intertwining: Option<f64>,
    pub kernel_vs_oracle: Option<f64>,
    pub route_equivalence: Option<f64>,
    pub unitarity: Option<f64>,
}

#[derive(Debug, Clone, Default, Serialize, PartialEq)]
pub struct Counts {
    pub bound_states: Option<usize>,
    pub oracle_bound_states: Option<usize>,
    pub masked_xi: Option<usize>,
}

/// One tolerance comparison made by `validate`.
#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub tolerance: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct Report {
    pub command: String,
    pub potential: String,
    pub multiplier: String,
    pub grid: [f64; 3],
    pub xi: [f64; 2],
    pub defects: Defects,
    pub counts: Counts,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub checks: Vec<Check>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub passed: Option<bool>,
}

impl Report {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn write(&self, path: &Path) -> std::io::Result<()> {
        std::fs::write(path, self.to_json())
    }
}
