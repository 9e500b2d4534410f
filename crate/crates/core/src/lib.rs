//! Design toolkit for a cyclic walking-robot leg and its tripod-gait body.
//!
//! The crate is organised bottom-up:
//!
//! * [`fourbar`] - position analysis of the normalized four-bar `ABCD` over a
//!   crank sweep, transmission angles and step-cycle metrics.
//! * [`synthesis`] - the 6x6 least-squares problem that fits a coupler point to
//!   a straight, uniformly traversed foot trajectory.
//! * [`sobol`] and [`search`] - LP-tau (Sobol) scans over the five nonlinear
//!   linkage parameters, feasibility and Pareto filtering of the sampling table.
//! * [`nsga2`] - a generic NSGA-II engine with the leg-synthesis problem as an
//!   instance and 2-D hypervolume tracking.
//! * [`isotropy`] - tripod Jacobians and isotropic configuration families.
//! * [`mobility`] - Grübler/Kutzbach mobility and the "rational structure" check.

pub mod dominance;
pub mod fourbar;
pub mod isotropy;
pub mod mobility;
pub mod nsga2;
pub mod search;
pub mod sobol;
pub mod synthesis;

pub use fourbar::{Branch, CrankSchedule, FourBarParams, GaitMetrics, KinematicsError, Pose};
pub use synthesis::{LineTarget, LinearSystem, SynthesisError, SynthesisSolution};
