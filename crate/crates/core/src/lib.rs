//! Probability that a randomly placed, randomly oriented segment acts as a
//! reflector between a fixed transmitter and receiver.
//!
//! Two regimes are modelled. A metasurface-coated object can steer the
//! reflection anywhere, so it reflects whenever Tx and Rx are on the same side
//! of its line ([`analytic::pr_event1_approach1`], [`analytic::pr_event1_approach2`]).
//! A plain object obeys the mirror law and additionally needs the Tx-Rx
//! mid-perpendicular to cross it ([`analytic::pr_event2`],
//! [`analytic::pr_event3_upper`]). [`montecarlo`] samples the same object law
//! and checks the events with exact geometry.

pub mod analytic;
pub mod error;
pub mod geometry;
pub mod montecarlo;
pub mod quadrature;

pub use analytic::{NetworkConfig, ReflectionReport};
pub use error::{Error, Result};
pub use geometry::{Point2, SegmentObject};
pub use montecarlo::{McReport, ProbabilityEstimate, SampleSpec};
pub use quadrature::QuadratureSpec;
