//! Quasi-random scan of the five nonlinear linkage parameters.
//!
//! Each LP-tau point is mapped affinely into a [`ParamBox`], the inner
//! least-squares problem is solved, and the outcome is kept as one row of a
//! sampling table. Infeasible samples stay in the table with their reason so
//! the feasible fraction of the box can be inspected.

use std::f64::consts::{PI, TAU};
use std::fmt;
use std::io;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dominance::nondominated_indices;
use crate::fourbar::{gait_metrics, step_cycle_ratio, Branch, FourBarParams, GaitMetrics, KinematicsError};
use crate::sobol::LpTau;
use crate::synthesis::{reduced_objective, SweepSettings, SynthesisError, SynthesisSolution};

#[derive(Debug, Error)]
pub enum SearchError {
    #[error("invalid parameter box: {0}")]
    InvalidBox(String),
    #[error("budget must be at least 1")]
    EmptyBudget,
    #[error("sample index range exceeds the LP-tau sequence length")]
    IndexOverflow,
    #[error("sampling table: {0}")]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] io::Error),
}

/// Bounds on `(p1, p2, p3, p4, p5)`. Angles in radians.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamBox {
    pub lower: [f64; 5],
    pub upper: [f64; 5],
}

impl Default for ParamBox {
    /// `p1 ∈ [0.1, 0.6]`, `p2, p3 ∈ [0.4, 2.5]`, `p4 ∈ [0, 2π]`,
    /// `p5 ∈ [π, 0.95·2π]`.
    fn default() -> Self {
        Self {
            lower: [0.1, 0.4, 0.4, 0.0, PI],
            upper: [0.6, 2.5, 2.5, TAU, 0.95 * TAU],
        }
    }
}

impl ParamBox {
    /// A degenerate box holding a single parameter vector.
    pub fn point(genome: [f64; 5]) -> Self {
        Self { lower: genome, upper: genome }
    }

    pub fn validate(&self) -> Result<(), SearchError> {
        for i in 0..5 {
            let (lo, hi) = (self.lower[i], self.upper[i]);
            if !(lo.is_finite() && hi.is_finite()) || lo > hi {
                return Err(SearchError::InvalidBox(format!("p{} bounds [{lo}, {hi}]", i + 1)));
            }
        }
        for i in 0..3 {
            if self.lower[i] <= 0.0 {
                return Err(SearchError::InvalidBox(format!("p{} must be positive", i + 1)));
            }
        }
        if self.lower[4] < PI || self.upper[4] > TAU {
            return Err(SearchError::InvalidBox("p5 bounds must lie within [π, 2π]".into()));
        }
        Ok(())
    }

    /// Affine image of a unit-cube point.
    pub fn map(&self, unit: &[f64; 5]) -> [f64; 5] {
        std::array::from_fn(|i| self.lower[i] + unit[i] * (self.upper[i] - self.lower[i]))
    }

    pub fn contains(&self, genome: &[f64]) -> bool {
        genome.len() == 5
            && genome.iter().enumerate().all(|(i, &g)| g >= self.lower[i] && g <= self.upper[i])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScanSettings {
    pub sweep: SweepSettings,
    pub branch: Branch,
    /// LP-tau index of the first sample; 1 skips the all-zero point.
    pub skip: u32,
}

impl Default for ScanSettings {
    fn default() -> Self {
        Self { sweep: SweepSettings::default(), branch: Branch::Positive, skip: 1 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Infeasibility {
    InvalidParameters(String),
    Sweep(String),
    Solve(String),
}

impl fmt::Display for Infeasibility {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Infeasibility::InvalidParameters(m) => write!(f, "invalid parameters: {m}"),
            Infeasibility::Sweep(m) => write!(f, "{m}"),
            Infeasibility::Solve(m) => write!(f, "solve failed: {m}"),
        }
    }
}

impl From<SynthesisError> for Infeasibility {
    fn from(err: SynthesisError) -> Self {
        match err {
            SynthesisError::Kinematics(KinematicsError::InvalidArgument(m)) => {
                Infeasibility::InvalidParameters(m)
            }
            SynthesisError::Kinematics(k) => Infeasibility::Sweep(k.to_string()),
            other => Infeasibility::Solve(other.to_string()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Evaluated {
    pub solution: SynthesisSolution,
    pub metrics: GaitMetrics,
}

/// One row of the sampling table.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleRecord {
    /// LP-tau sequence index of the sample.
    pub index: u32,
    pub params: FourBarParams,
    pub outcome: Result<Evaluated, Infeasibility>,
}

impl SampleRecord {
    pub fn feasible(&self) -> bool {
        self.outcome.is_ok()
    }

    pub fn evaluated(&self) -> Option<&Evaluated> {
        self.outcome.as_ref().ok()
    }

    /// Reduced objective `δ⁰`, if the sample could be evaluated.
    pub fn delta(&self) -> Option<f64> {
        self.evaluated().map(|e| e.solution.delta)
    }

    /// Criteria vector `[δ⁰, -μ_min, -ν]` (all minimized).
    pub fn criteria(&self) -> Option<[f64; 3]> {
        self.evaluated().map(|e| {
            [e.solution.delta, -e.metrics.min_transmission_deg, -e.metrics.step_cycle_ratio]
        })
    }
}

pub fn evaluate(index: u32, params: FourBarParams, sweep: &SweepSettings) -> SampleRecord {
    let outcome = reduced_objective(&params, sweep)
        .map(|eval| Evaluated {
            metrics: gait_metrics(&params, &eval.poses),
            solution: eval.solution,
        })
        .map_err(Infeasibility::from)
        .and_then(|e| {
            if e.solution.delta.is_finite() {
                Ok(e)
            } else {
                Err(Infeasibility::Solve("non-finite residual".into()))
            }
        });
    SampleRecord { index, params, outcome }
}

/// Evaluates `budget` LP-tau samples mapped into `bounds`.
///
/// Samples are evaluated in parallel and returned in sequence order, so the
/// table is identical for any thread count.
pub fn scan(
    bounds: &ParamBox,
    budget: usize,
    settings: &ScanSettings,
) -> Result<Vec<SampleRecord>, SearchError> {
    bounds.validate()?;
    if budget == 0 {
        return Err(SearchError::EmptyBudget);
    }
    let start = settings.skip as u64;
    if start + budget as u64 > u32::MAX as u64 {
        return Err(SearchError::IndexOverflow);
    }
    let generator = LpTau::new(5).expect("dimension 5 is supported");
    let records = (0..budget as u32)
        .into_par_iter()
        .map(|offset| {
            let index = settings.skip + offset;
            let mut unit = [0.0; 5];
            generator.fill_point(index, &mut unit);
            let [p1, p2, p3, p4, p5] = bounds.map(&unit);
            let params = FourBarParams {
                crank: p1,
                coupler: p2,
                rocker: p3,
                start_angle: p4,
                support_arc: p5,
                branch: settings.branch,
            };
            evaluate(index, params, &settings.sweep)
        })
        .collect();
    Ok(records)
}

/// Design requirements applied to the sampling table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Constraints {
    /// Largest acceptable `δ⁰`.
    pub max_delta: f64,
    /// Smallest acceptable minimum transmission angle, degrees.
    pub min_transmission_deg: f64,
    /// Smallest acceptable step-cycle ratio `ν`.
    pub min_step_cycle_ratio: f64,
}

impl Default for Constraints {
    fn default() -> Self {
        Self { max_delta: f64::INFINITY, min_transmission_deg: 0.0, min_step_cycle_ratio: 0.0 }
    }
}

impl Constraints {
    pub fn admits(&self, record: &SampleRecord) -> bool {
        record.evaluated().is_some_and(|e| {
            e.solution.delta <= self.max_delta
                && e.metrics.min_transmission_deg >= self.min_transmission_deg
                && e.metrics.step_cycle_ratio >= self.min_step_cycle_ratio
        })
    }
}

/// Feasible records meeting every constraint, in input order.
pub fn filter_feasible<'a, I>(records: I, constraints: &Constraints) -> Vec<&'a SampleRecord>
where
    I: IntoIterator<Item = &'a SampleRecord>,
{
    records.into_iter().filter(|r| constraints.admits(r)).collect()
}

/// Nondominated records under `[δ⁰, -μ_min, -ν]`, in input order. Records
/// without an evaluation are never part of the front.
pub fn pareto_filter<'a>(records: &[&'a SampleRecord]) -> Vec<&'a SampleRecord> {
    let evaluated: Vec<(&SampleRecord, [f64; 3])> =
        records.iter().filter_map(|r| r.criteria().map(|c| (*r, c))).collect();
    let points: Vec<[f64; 3]> = evaluated.iter().map(|(_, c)| *c).collect();
    nondominated_indices(&points).into_iter().map(|i| evaluated[i].0).collect()
}

/// Flat CSV row of the sampling table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableRow {
    pub index: u32,
    pub p1: f64,
    pub p2: f64,
    pub p3: f64,
    pub p4: f64,
    pub p5: f64,
    pub branch: Branch,
    pub delta: Option<f64>,
    pub normalized_rms: Option<f64>,
    pub mu_min_deg: Option<f64>,
    pub nu: f64,
    pub support_arc_deg: f64,
    pub feasible: bool,
    pub reason: String,
}

impl From<&SampleRecord> for TableRow {
    fn from(r: &SampleRecord) -> Self {
        let p = &r.params;
        let support_arc_deg = p.support_arc.to_degrees();
        let eval = r.evaluated();
        TableRow {
            index: r.index,
            p1: p.crank,
            p2: p.coupler,
            p3: p.rocker,
            p4: p.start_angle,
            p5: p.support_arc,
            branch: p.branch,
            delta: eval.map(|e| e.solution.delta),
            normalized_rms: eval.map(|e| e.solution.normalized_rms()),
            mu_min_deg: eval.map(|e| e.metrics.min_transmission_deg),
            nu: step_cycle_ratio(support_arc_deg),
            support_arc_deg,
            feasible: r.feasible(),
            reason: match &r.outcome {
                Ok(_) => String::new(),
                Err(why) => why.to_string(),
            },
        }
    }
}

pub fn write_table<'a, W, I>(writer: W, records: I) -> Result<(), SearchError>
where
    W: io::Write,
    I: IntoIterator<Item = &'a SampleRecord>,
{
    let mut csv = csv::Writer::from_writer(writer);
    for record in records {
        csv.serialize(TableRow::from(record))?;
    }
    csv.flush()?;
    Ok(())
}

/// Reads a sampling table; `#` lines are comments.
pub fn read_table<R: io::Read>(reader: R) -> Result<Vec<TableRow>, SearchError> {
    let mut csv = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(reader);
    let rows = csv.deserialize().collect::<Result<Vec<TableRow>, _>>()?;
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lambda_genome() -> [f64; 5] {
        [0.5, 1.25, 1.25, PI / 2.0, 1.05 * PI]
    }

    #[test]
    fn collapsed_box_repeats_one_record() {
        let records = scan(&ParamBox::point(lambda_genome()), 6, &ScanSettings::default()).unwrap();
        assert_eq!(records.len(), 6);
        for r in &records {
            assert!(r.feasible());
            assert_eq!(r.params, records[0].params);
            assert_eq!(r.outcome, records[0].outcome);
        }
    }

    #[test]
    fn record_count_equals_budget() {
        for budget in [1, 7, 64] {
            let records = scan(&ParamBox::default(), budget, &ScanSettings::default()).unwrap();
            assert_eq!(records.len(), budget);
            assert!(records.windows(2).all(|w| w[0].index + 1 == w[1].index));
        }
    }

    #[test]
    fn infeasible_samples_carry_reasons() {
        let records = scan(&ParamBox::default(), 256, &ScanSettings::default()).unwrap();
        let infeasible: Vec<_> = records.iter().filter(|r| !r.feasible()).collect();
        assert!(!infeasible.is_empty());
        for r in infeasible {
            assert!(!TableRow::from(r).reason.is_empty());
        }
    }

    #[test]
    fn open_constraints_keep_every_feasible_record() {
        let records = scan(&ParamBox::default(), 128, &ScanSettings::default()).unwrap();
        let feasible: Vec<_> = records.iter().filter(|r| r.feasible()).collect();
        let kept = filter_feasible(&records, &Constraints::default());
        assert_eq!(kept, feasible);
        let impossible = Constraints { min_transmission_deg: 91.0, ..Constraints::default() };
        assert!(filter_feasible(&records, &impossible).is_empty());
    }

    #[test]
    fn box_validation() {
        let mut b = ParamBox::default();
        b.lower[4] = 3.0;
        assert!(b.validate().is_err());
        let mut b = ParamBox::default();
        b.lower[1] = 3.0;
        assert!(b.validate().is_err());
        assert!(matches!(
            scan(&ParamBox::default(), 0, &ScanSettings::default()),
            Err(SearchError::EmptyBudget)
        ));
    }

    #[test]
    fn table_round_trip() {
        let records = scan(&ParamBox::default(), 32, &ScanSettings::default()).unwrap();
        let mut buf = b"# comment line\n".to_vec();
        write_table(&mut buf, &records).unwrap();
        let rows = read_table(buf.as_slice()).unwrap();
        assert_eq!(rows.len(), 32);
        let expected: Vec<TableRow> = records.iter().map(TableRow::from).collect();
        assert_eq!(rows, expected);
    }
}
