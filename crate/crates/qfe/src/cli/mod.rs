//! Batch front-end: JSON scenario configs, deterministic runs, JSON/CSV
//! reports. The `qfe` binary is a thin wrapper around [`run_scenario`].

mod report;
mod verify;

pub use report::{CheckResult, Report, ReportValue, Table, SCHEMA_VERSION};

use crate::dynentropy::{
    multiplication_entropy_rate, spectral_entropy_rate, toeplitz_entropy_rates, SymbolFunction,
};
use crate::error::{QfeError, Result};
use crate::linalg::{CMat, C64};
use crate::spectra::{DirectIntegralModel, FiberGrid, IntervalSamples, MultiplicationModel};
use crate::Algebra;
use serde::{Deserialize, Serialize};

/// The scenario kinds the CLI understands.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScenarioKind {
    /// Spectral-integral evaluation over direct-integral data.
    Formula,
    /// Multiplication-operator evaluation over sampled intervals.
    Cor14,
    /// Block-Toeplitz empirical rate study.
    Rate,
    /// The built-in invariant suite.
    Verify,
}

impl ScenarioKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            ScenarioKind::Formula => "formula",
            ScenarioKind::Cor14 => "cor14",
            ScenarioKind::Rate => "rate",
            ScenarioKind::Verify => "verify",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "formula" => Some(ScenarioKind::Formula),
            "cor14" => Some(ScenarioKind::Cor14),
            "rate" => Some(ScenarioKind::Rate),
            "verify" => Some(ScenarioKind::Verify),
            _ => None,
        }
    }
}

/// A complex matrix as nested arrays of [re, im] pairs, row-major.
pub type ComplexMatrixJson = Vec<Vec<[f64; 2]>>;

fn matrix_from_json(m: &ComplexMatrixJson, path: &str) -> Result<CMat> {
    let rows = m.len();
    let cols = if rows > 0 { m[0].len() } else { 0 };
    if rows != cols {
        return Err(QfeError::InvalidArgument(format!(
            "{path}: expected a square matrix, got {rows}×{cols}"
        )));
    }
    for (i, row) in m.iter().enumerate() {
        if row.len() != cols {
            return Err(QfeError::InvalidArgument(format!(
                "{path}[{i}]: ragged row of length {}",
                row.len()
            )));
        }
    }
    Ok(CMat::from_fn(rows, cols, |i, j| {
        C64::new(m[i][j][0], m[i][j][1])
    }))
}

/// One interval of a multiplication-operator model.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IntervalJson {
    pub a: f64,
    pub b: f64,
    pub omega_prime: Vec<f64>,
    pub rho: Vec<f64>,
}

/// Model payload; which fields apply depends on the scenario kind.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct ModelSpec {
    /// Uniform midpoint grid size (formula, rate).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_nodes: Option<usize>,
    /// Per-node fibers (formula), full complex form.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fibers: Option<Vec<ComplexMatrixJson>>,
    /// Per-node scalar fibers (formula), shorthand for 1×1 matrices.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fibers_scalar: Option<Vec<f64>>,
    /// One fiber repeated at every node (formula shorthand).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fiber: Option<ComplexMatrixJson>,
    /// Mass of the singular spectral part (contributes zero entropy).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub singular_rate: Option<f64>,
    /// Symbol samples (rate), full complex form.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<Vec<ComplexMatrixJson>>,
    /// Scalar symbol samples (rate).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples_scalar: Option<Vec<f64>>,
    /// Intervals (cor14).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub intervals: Option<Vec<IntervalJson>>,
}

/// Numeric options; `grid` and `cutoff` may be overridden from the command
/// line.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct Options {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cutoff: Option<usize>,
    /// Rate-ladder block counts.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sizes: Option<Vec<usize>>,
}

/// A batch scenario loaded from JSON.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Scenario {
    pub schema_version: u32,
    pub name: String,
    pub kind: ScenarioKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub algebra: Option<Algebra>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model: Option<ModelSpec>,
    #[serde(default)]
    pub options: Options,
    #[serde(default)]
    pub seed: u64,
}

impl Scenario {
    pub fn from_json(text: &str) -> Result<Self> {
        let sc: Scenario = serde_json::from_str(text)
            .map_err(|e| QfeError::InvalidArgument(format!("config: {e}")))?;
        if sc.schema_version != SCHEMA_VERSION {
            return Err(QfeError::InvalidArgument(format!(
                "schema_version: expected {SCHEMA_VERSION}, got {}",
                sc.schema_version
            )));
        }
        Ok(sc)
    }

    fn algebra(&self) -> Result<Algebra> {
        self.algebra
            .ok_or_else(|| QfeError::InvalidArgument("algebra: field is required".into()))
    }

    fn model(&self) -> Result<&ModelSpec> {
        self.model
            .as_ref()
            .ok_or_else(|| QfeError::InvalidArgument("model: field is required".into()))
    }

    fn grid_from_model(&self, n_nodes: Option<usize>, fallback: usize) -> Result<FiberGrid> {
        FiberGrid::uniform(n_nodes.or(self.options.grid).unwrap_or(fallback))
    }

    /// Assemble the direct-integral model of a `formula` scenario.
    pub fn direct_integral_model(&self) -> Result<DirectIntegralModel> {
        let spec = self.model()?;
        let algebra = self.algebra()?;
        let fibers: Vec<CMat> = if let Some(fs) = &spec.fibers {
            fs.iter()
                .enumerate()
                .map(|(j, m)| matrix_from_json(m, &format!("model.fibers[{j}]")))
                .collect::<Result<_>>()?
        } else if let Some(fs) = &spec.fibers_scalar {
            fs.iter()
                .map(|&x| CMat::from_element(1, 1, C64::new(x, 0.0)))
                .collect()
        } else if let Some(f) = &spec.fiber {
            let m = matrix_from_json(f, "model.fiber")?;
            let n = spec.n_nodes.or(self.options.grid).unwrap_or(64);
            vec![m; n]
        } else {
            // no fibers at all: the degenerate model without an absolutely
            // continuous part
            vec![]
        };
        let grid = if fibers.is_empty() {
            FiberGrid::new(vec![], vec![])?
        } else {
            self.grid_from_model(spec.n_nodes, fibers.len())?
        };
        if grid.len() != fibers.len() {
            return Err(QfeError::InvalidArgument(format!(
                "model.fibers: {} fibers for a grid of {} nodes",
                fibers.len(),
                grid.len()
            )));
        }
        let model = DirectIntegralModel::new(grid, fibers, algebra)?;
        match spec.singular_rate {
            Some(r) => model.with_singular_rate(r),
            None => Ok(model),
        }
    }

    /// Assemble the multiplication model of a `cor14` scenario.
    pub fn multiplication_model(&self) -> Result<MultiplicationModel> {
        let spec = self.model()?;
        let algebra = self.algebra()?;
        let ivs = spec.intervals.as_ref().ok_or_else(|| {
            QfeError::InvalidArgument("model.intervals: field is required for cor14".into())
        })?;
        let intervals: Vec<IntervalSamples> = ivs
            .iter()
            .map(|iv| IntervalSamples::new(iv.a, iv.b, iv.omega_prime.clone(), iv.rho.clone()))
            .collect::<Result<_>>()?;
        MultiplicationModel::new(intervals, algebra)
    }

    /// Assemble the symbol of a `rate` scenario.
    pub fn symbol(&self) -> Result<SymbolFunction> {
        let spec = self.model()?;
        let algebra = self.algebra()?;
        if let Some(samples) = &spec.samples {
            let mats: Vec<CMat> = samples
                .iter()
                .enumerate()
                .map(|(j, m)| matrix_from_json(m, &format!("model.samples[{j}]")))
                .collect::<Result<_>>()?;
            let grid = self.grid_from_model(spec.n_nodes, mats.len())?;
            SymbolFunction::new(grid, mats, algebra)
        } else if let Some(samples) = &spec.samples_scalar {
            let grid = self.grid_from_model(spec.n_nodes, samples.len())?;
            SymbolFunction::scalar(grid, samples, algebra)
        } else {
            Err(QfeError::InvalidArgument(
                "model.samples: field is required for rate".into(),
            ))
        }
    }
}

/// Run one scenario to a report. Deterministic for a fixed config and seed.
pub fn run_scenario(scenario: &Scenario) -> Result<Report> {
    let mut report = Report::new(&scenario.name, scenario.kind.as_str(), scenario.seed);
    match scenario.kind {
        ScenarioKind::Formula => {
            let model = scenario.direct_integral_model()?;
            let h = spectral_entropy_rate(&model);
            report.push_value("entropy_rate", h, "nats/step", 1e-12, "formula");
            if model.singular_rate() > 0.0 {
                report.warnings.push(format!(
                    "singular spectral part of mass {} contributes zero entropy",
                    model.singular_rate()
                ));
            }
            let mut rows = Vec::new();
            for (j, (&node, &w)) in model
                .grid()
                .nodes()
                .iter()
                .zip(model.grid().weights())
                .enumerate()
            {
                let mut row = vec![j as f64, node, w];
                row.push(model.fiber_eigenvalues(j).len() as f64);
                rows.push(row);
            }
            report.tables.push(Table {
                name: "fibers".into(),
                columns: vec![
                    "node_index".into(),
                    "theta".into(),
                    "weight".into(),
                    "dim".into(),
                ],
                rows,
            });
        }
        ScenarioKind::Cor14 => {
            let model = scenario.multiplication_model()?;
            let h = multiplication_entropy_rate(&model);
            report.push_value("entropy_rate", h, "nats/step", 1e-12, "formula");
        }
        ScenarioKind::Rate => {
            let symbol = scenario.symbol()?;
            let sizes = scenario
                .options
                .sizes
                .clone()
                .unwrap_or_else(|| vec![32, 64, 128, 256]);
            let out = toeplitz_entropy_rates(&symbol, &sizes)?;
            report.push_value(
                "formula_value",
                out.formula_value,
                "nats/step",
                1e-12,
                "formula",
            );
            report.push_value(
                "extrapolated_rate",
                out.extrapolated_rate,
                "nats/step",
                5e-3,
                "extrapolated",
            );
            let last = *out.rates.last().unwrap();
            report.push_value("last_rate", last, "nats/step", 5e-2, "empirical");
            let rows = out
                .sizes
                .iter()
                .zip(out.block_entropies.iter())
                .zip(out.rates.iter())
                .map(|((&n, &s), &r)| vec![n as f64, s, r])
                .collect();
            report.tables.push(Table {
                name: "rate_ladder".into(),
                columns: vec!["n".into(), "block_entropy".into(), "rate".into()],
                rows,
            });
        }
        ScenarioKind::Verify => {
            let grid = scenario.options.grid.unwrap_or(64);
            let cutoff = scenario.options.cutoff.unwrap_or(16);
            report.checks = verify::run_all(scenario.seed, grid, cutoff);
            let passed = report.checks_passed();
            let total = report.checks.len();
            report.push_value("checks_total", total as f64, "count", 0.0, "empirical");
            report.push_value("checks_passed", passed as f64, "count", 0.0, "empirical");
            if passed < total {
                report
                    .warnings
                    .push(format!("{} of {total} checks failed", total - passed));
            }
        }
    }
    Ok(report)
}
