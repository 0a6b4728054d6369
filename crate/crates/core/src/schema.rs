//! Versioned JSON formats: problem files in, result reports out.

use serde::{Deserialize, Serialize};

use crate::auxiliary::ConvexSet;
use crate::error::{Error, Result};
use crate::geom::Hyperplane;
use crate::measure::{Measure, MeasureSpec};
use crate::miranda::MirandaCertificate;
use crate::scenario::ScenarioReport;
use crate::separability::{SeparabilityReport, SignPattern};
use crate::solver::{Method, Problem, ResidualScan, SplitResult};

pub const SCHEMA_VERSION: u32 = 1;

/// A problem file: n measures on `R^n`, target ratios, optional
/// separator sets.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProblemFile {
    pub schema: u32,
    pub measures: Vec<MeasureSpec>,
    pub alphas: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub separators: Option<Vec<ConvexSetSpec>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ConvexSetSpec {
    Ball { center: Vec<f64>, radius: f64 },
    Polygon { vertices: Vec<Vec<f64>> },
}

impl ConvexSetSpec {
    pub fn to_set(&self) -> ConvexSet {
        match self {
            ConvexSetSpec::Ball { center, radius } => ConvexSet::Ball {
                center: crate::geom::Vector::new(center.clone()),
                radius: *radius,
            },
            ConvexSetSpec::Polygon { vertices } => ConvexSet::Polygon {
                vertices: vertices.iter().cloned().map(crate::geom::Vector::new).collect(),
            },
        }
    }

    pub fn from_set(set: &ConvexSet) -> Self {
        match set {
            ConvexSet::Ball { center, radius } => {
                ConvexSetSpec::Ball { center: center.0.clone(), radius: *radius }
            }
            ConvexSet::Polygon { vertices } => ConvexSetSpec::Polygon {
                vertices: vertices.iter().map(|v| v.0.clone()).collect(),
            },
        }
    }
}

impl ProblemFile {
    pub fn from_problem(p: &Problem) -> Self {
        ProblemFile {
            schema: SCHEMA_VERSION,
            measures: p.measures().iter().map(|m| m.spec()).collect(),
            alphas: p.alphas().to_vec(),
            separators: p
                .separators()
                .map(|s| s.iter().map(ConvexSetSpec::from_set).collect()),
        }
    }

    pub fn into_problem(self) -> Result<Problem> {
        if self.schema != SCHEMA_VERSION {
            return Err(Error::InvalidParameter(format!(
                "unsupported schema version {} (expected {})",
                self.schema, SCHEMA_VERSION
            )));
        }
        let measures = self
            .measures
            .into_iter()
            .map(Measure::from_spec)
            .collect::<Result<Vec<_>>>()?;
        let separators = self
            .separators
            .map(|s| s.iter().map(ConvexSetSpec::to_set).collect());
        Problem::new(measures, self.alphas, separators)
    }
}

/// Parses a problem file, reporting JSON syntax errors with line and
/// column positions.
pub fn parse_problem(json: &str) -> std::result::Result<Problem, String> {
    let file: ProblemFile = serde_json::from_str(json)
        .map_err(|e| format!("problem JSON invalid at line {}, column {}: {e}", e.line(), e.column()))?;
    file.into_problem().map_err(|e| e.to_string())
}

/// Outcome report of a split run.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum SplitReport {
    Found {
        schema: u32,
        hyperplane: Hyperplane,
        achieved: Vec<f64>,
        residual_norm: f64,
        method: Method,
        evaluations: usize,
        plateau: bool,
        verified: bool,
        #[serde(skip_serializing_if = "Option::is_none")]
        certificate: Option<MirandaCertificate>,
    },
    NotFound {
        schema: u32,
        scan: ScanReport,
    },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScanReport {
    pub resolution: usize,
    pub best_v: Vec<f64>,
    pub best_norm: f64,
    pub histogram: Vec<(f64, usize)>,
}

impl ScanReport {
    pub fn from_scan(s: &ResidualScan) -> Self {
        ScanReport {
            resolution: s.resolution,
            best_v: s.best_v.0.clone(),
            best_norm: s.best_norm,
            histogram: s.histogram.clone(),
        }
    }
}

impl SplitReport {
    pub fn found(res: &SplitResult, verified: bool) -> Self {
        SplitReport::Found {
            schema: SCHEMA_VERSION,
            hyperplane: res.hyperplane.clone(),
            achieved: res.achieved.clone(),
            residual_norm: res.residual_norm,
            method: res.method,
            evaluations: res.evaluations,
            plateau: res.plateau,
            verified,
            certificate: res.certificate.clone(),
        }
    }

    pub fn not_found(scan: &ResidualScan) -> Self {
        SplitReport::NotFound { schema: SCHEMA_VERSION, scan: ScanReport::from_scan(scan) }
    }
}

/// Separability outcome (witnesses keyed by their sign patterns).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SeparabilityFile {
    pub schema: u32,
    pub separable: bool,
    pub margin: f64,
    pub witnesses: Vec<WitnessEntry>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub failing_pattern: Option<Vec<i8>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WitnessEntry {
    pub pattern: Vec<i8>,
    pub hyperplane: Hyperplane,
}

impl SeparabilityFile {
    pub fn from_report(r: &SeparabilityReport) -> Self {
        let signs = |p: &SignPattern| (0..p.len()).map(|i| p.get(i).unwrap_or(0)).collect();
        SeparabilityFile {
            schema: SCHEMA_VERSION,
            separable: r.separable,
            margin: r.margin,
            witnesses: r
                .witnesses
                .iter()
                .map(|(p, h)| WitnessEntry { pattern: signs(p), hyperplane: h.clone() })
                .collect(),
            failing_pattern: r.failing_pattern.as_ref().map(signs),
        }
    }
}

/// Two-line partition output.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TwoLineFile {
    pub schema: u32,
    pub h1: Hyperplane,
    pub h2: Hyperplane,
    pub quadrant_masses: [f64; 4],
    pub targets: [f64; 4],
    pub max_error: f64,
}

/// Scenario report wrapper with the schema stamp.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScenarioFile {
    pub schema: u32,
    #[serde(flatten)]
    pub report: ScenarioReport,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::Vector;

    #[test]
    fn problem_roundtrip() {
        let p = Problem::new(
            vec![
                Measure::uniform_ball(Vector::new(vec![-2.0, 0.0]), 1.0).unwrap(),
                Measure::uniform_ball(Vector::new(vec![2.0, 0.0]), 1.0).unwrap(),
            ],
            vec![0.3, 0.7],
            Some(vec![
                ConvexSet::Ball { center: Vector::new(vec![-2.0, 0.0]), radius: 1.5 },
                ConvexSet::Ball { center: Vector::new(vec![2.0, 0.0]), radius: 1.5 },
            ]),
        )
        .unwrap();
        let file = ProblemFile::from_problem(&p);
        let json = serde_json::to_string_pretty(&file).unwrap();
        let p2 = parse_problem(&json).unwrap();
        assert_eq!(p2.alphas(), p.alphas());
        assert_eq!(p2.measures()[0].spec(), p.measures()[0].spec());
        assert!(p2.separators().is_some());
    }

    #[test]
    fn malformed_json_reports_position() {
        let err = parse_problem("{\n  \"schema\": 1,\n  measures: []\n}").unwrap_err();
        assert!(err.contains("line 3"), "{err}");
    }

    #[test]
    fn wrong_schema_version_rejected() {
        let json = r#"{"schema": 9, "measures": [], "alphas": []}"#;
        assert!(parse_problem(json).unwrap_err().contains("schema"));
    }

    #[test]
    fn count_dimension_mismatch_is_reported() {
        let json = r#"{
            "schema": 1,
            "measures": [
                {"type": "uniform_ball", "center": [0.0, 0.0], "radius": 1.0},
                {"type": "uniform_ball", "center": [3.0, 0.0], "radius": 1.0},
                {"type": "uniform_ball", "center": [0.0, 3.0], "radius": 1.0}
            ],
            "alphas": [0.5, 0.5, 0.5]
        }"#;
        let err = parse_problem(json).unwrap_err();
        assert!(err.contains("count != dimension"), "{err}");
    }
}
