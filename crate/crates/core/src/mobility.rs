//! Structural mobility (Grübler/Kutzbach) and the input-count check.
//!
//! A mechanism is called rational when its mobility equals the number of
//! actuated inputs: fewer inputs leave it under-actuated, more make the
//! actuators fight each other.

use std::fmt;
use std::io;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MobilityError {
    #[error("mechanism '{label}': {reason}")]
    InvalidGraph { label: String, reason: String },
    #[error("cannot join a planar and a spatial mechanism")]
    MixedSpaces,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Space {
    Planar,
    Spatial,
}

/// Joint counts by the number of freedoms each joint removes: `p5` counts
/// one-DoF pairs, `p3` three-DoF pairs and so on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct JointCounts {
    pub p1: u32,
    pub p2: u32,
    pub p3: u32,
    pub p4: u32,
    pub p5: u32,
}

impl JointCounts {
    pub fn total(&self) -> u64 {
        [self.p1, self.p2, self.p3, self.p4, self.p5].iter().map(|&p| p as u64).sum()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MechanismGraph {
    pub label: String,
    pub space: Space,
    pub moving_links: u32,
    #[serde(default)]
    pub joints: JointCounts,
    /// Number of driven joints; `None` when the scheme is only counted.
    #[serde(default)]
    pub actuated_inputs: Option<u32>,
}

impl MechanismGraph {
    pub fn validate(&self) -> Result<(), MobilityError> {
        let invalid = |reason: &str| {
            Err(MobilityError::InvalidGraph { label: self.label.clone(), reason: reason.into() })
        };
        if self.space == Space::Planar && (self.joints.p1 + self.joints.p2 + self.joints.p3) > 0 {
            return invalid("planar mechanisms only have p4 and p5 joints");
        }
        if let Some(inputs) = self.actuated_inputs {
            if inputs as u64 > self.joints.total() {
                return invalid("more actuated inputs than joints");
            }
        }
        Ok(())
    }

    /// Two mechanisms side by side, sharing nothing.
    pub fn disjoint_union(&self, other: &MechanismGraph) -> Result<MechanismGraph, MobilityError> {
        if self.space != other.space {
            return Err(MobilityError::MixedSpaces);
        }
        let j = |a: u32, b: u32| a + b;
        Ok(MechanismGraph {
            label: format!("{} + {}", self.label, other.label),
            space: self.space,
            moving_links: self.moving_links + other.moving_links,
            joints: JointCounts {
                p1: j(self.joints.p1, other.joints.p1),
                p2: j(self.joints.p2, other.joints.p2),
                p3: j(self.joints.p3, other.joints.p3),
                p4: j(self.joints.p4, other.joints.p4),
                p5: j(self.joints.p5, other.joints.p5),
            },
            actuated_inputs: self.actuated_inputs.zip(other.actuated_inputs).map(|(a, b)| a + b),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Diagnosis {
    Rational,
    /// More inputs than degrees of freedom.
    RedundantActuation,
    /// Fewer inputs than degrees of freedom.
    UnderActuated,
    /// No input count given.
    Unassessed,
}

impl fmt::Display for Diagnosis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Diagnosis::Rational => "rational",
            Diagnosis::RedundantActuation => "redundant-actuation",
            Diagnosis::UnderActuated => "under-actuated",
            Diagnosis::Unassessed => "-",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MobilityResult {
    pub label: String,
    pub mobility: i64,
    pub actuated_inputs: Option<u32>,
    pub rational: bool,
    pub diagnosis: Diagnosis,
}

/// `W = 3n − 2p5 − p4` (planar) or `W = 6n − 5p5 − 4p4 − 3p3 − 2p2 − p1`
/// (spatial), `n` the number of moving links.
pub fn mobility_number(graph: &MechanismGraph) -> i64 {
    let n = graph.moving_links as i64;
    let JointCounts { p1, p2, p3, p4, p5 } = graph.joints;
    let [p1, p2, p3, p4, p5] = [p1, p2, p3, p4, p5].map(|p| p as i64);
    match graph.space {
        Space::Planar => 3 * n - 2 * p5 - p4,
        Space::Spatial => 6 * n - 5 * p5 - 4 * p4 - 3 * p3 - 2 * p2 - p1,
    }
}

pub fn mobility(graph: &MechanismGraph) -> Result<MobilityResult, MobilityError> {
    graph.validate()?;
    let w = mobility_number(graph);
    let diagnosis = match graph.actuated_inputs {
        None => Diagnosis::Unassessed,
        Some(inputs) if inputs as i64 == w => Diagnosis::Rational,
        Some(inputs) if inputs as i64 > w => Diagnosis::RedundantActuation,
        Some(_) => Diagnosis::UnderActuated,
    };
    Ok(MobilityResult {
        label: graph.label.clone(),
        mobility: w,
        actuated_inputs: graph.actuated_inputs,
        rational: diagnosis == Diagnosis::Rational,
        diagnosis,
    })
}

pub fn rationality_report(graphs: &[MechanismGraph]) -> Result<Vec<MobilityResult>, MobilityError> {
    graphs.iter().map(mobility).collect()
}

/// The planar and spatial tripod and the two eight-legged walkers.
pub fn worked_examples() -> Vec<MechanismGraph> {
    let graph = |label: &str, space, moving_links, p3, p5, inputs| MechanismGraph {
        label: label.into(),
        space,
        moving_links,
        joints: JointCounts { p3, p5, ..Default::default() },
        actuated_inputs: inputs,
    };
    vec![
        graph("planar tripod scheme", Space::Planar, 7, 0, 9, None),
        graph("spatial tripod", Space::Spatial, 10, 3, 9, Some(6)),
        graph("eight-legged, rigid body", Space::Spatial, 13, 4, 12, Some(12)),
        graph("eight-legged, segmented body", Space::Spatial, 15, 4, 14, Some(8)),
    ]
}

/// Plain-text table, one mechanism per line.
pub fn format_table(results: &[MobilityResult]) -> String {
    let width = results.iter().map(|r| r.label.chars().count()).max().unwrap_or(0).max(9);
    let mut out = format!("{:<width$}  {:>4}  {:>6}  {}\n", "mechanism", "W", "inputs", "diagnosis");
    for r in results {
        let inputs = r.actuated_inputs.map_or("-".to_string(), |i| i.to_string());
        out.push_str(&format!(
            "{:<width$}  {:>4}  {:>6}  {}\n",
            r.label, r.mobility, inputs, r.diagnosis
        ));
    }
    out
}

pub fn write_csv<W: io::Write>(writer: W, results: &[MobilityResult]) -> csv::Result<()> {
    let mut out = csv::Writer::from_writer(writer);
    out.write_record(["mechanism", "mobility", "actuated_inputs", "rational", "diagnosis"])?;
    for r in results {
        out.write_record([
            r.label.clone(),
            r.mobility.to_string(),
            r.actuated_inputs.map(|i| i.to_string()).unwrap_or_default(),
            r.rational.to_string(),
            r.diagnosis.to_string(),
        ])?;
    }
    out.flush()?;
    Ok(())
}
