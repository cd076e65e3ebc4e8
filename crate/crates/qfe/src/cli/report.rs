//! Machine-readable run reports: JSON with an optional CSV flattening of the
//! tables.

use serde::{Deserialize, Serialize};

pub const SCHEMA_VERSION: u32 = 1;

/// One computed quantity with its unit, tolerance and provenance
/// ("formula", "empirical" or "extrapolated").
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportValue {
    pub name: String,
    pub value: f64,
    pub unit: String,
    pub tolerance: f64,
    pub provenance: String,
}

/// A rectangular numeric table (one row per ladder size, per fiber, ...).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

/// Outcome of one named verification check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

/// The result of one scenario run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema_version: u32,
    pub scenario: String,
    pub kind: String,
    pub seed: u64,
    #[serde(default)]
    pub values: Vec<ReportValue>,
    #[serde(default)]
    pub tables: Vec<Table>,
    #[serde(default)]
    pub warnings: Vec<String>,
    #[serde(default)]
    pub checks: Vec<CheckResult>,
}

impl Report {
    pub fn new(scenario: &str, kind: &str, seed: u64) -> Self {
        Report {
            schema_version: SCHEMA_VERSION,
            scenario: scenario.to_string(),
            kind: kind.to_string(),
            seed,
            values: vec![],
            tables: vec![],
            warnings: vec![],
            checks: vec![],
        }
    }

    pub fn push_value(&mut self, name: &str, value: f64, unit: &str, tol: f64, provenance: &str) {
        self.values.push(ReportValue {
            name: name.to_string(),
            value,
            unit: unit.to_string(),
            tolerance: tol,
            provenance: provenance.to_string(),
        });
    }

    pub fn checks_passed(&self) -> usize {
        self.checks.iter().filter(|c| c.pass).count()
    }

    pub fn all_checks_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    /// CSV flattening of the tables, one block per table separated by a
    /// blank line. Values are printed with enough digits to round-trip.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for table in &self.tables {
            out.push_str("table,");
            out.push_str(&table.name);
            out.push('\n');
            out.push_str(&table.columns.join(","));
            out.push('\n');
            for row in &table.rows {
                let cells: Vec<String> = row.iter().map(|v| format!("{v:?}")).collect();
                out.push_str(&cells.join(","));
                out.push('\n');
            }
            out.push('\n');
        }
        out
    }
}
