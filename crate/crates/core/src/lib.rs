//! Near-field XL-MIMO uplink channel simulation and classical channel
//! estimation.
//!
//! * [`geometry`] and [`channel`] synthesize far- and near-field ULA channels
//!   and noisy pilot observations.
//! * [`dictionary`] builds the angular (DFT) and polar-domain dictionaries.
//! * [`estimators`] provides least squares and orthogonal matching pursuit.
//! * [`sweep`], [`dataset`] and [`complexity`] form the evaluation harness.

pub mod channel;
pub mod complexity;
pub mod dataset;
pub mod dictionary;
pub mod error;
pub mod estimators;
pub mod geometry;
pub mod metrics;
pub mod rng;
pub mod sweep;

pub use channel::{ChannelScenario, ChannelVector, PathComponent, Regime, SnrConfig};
pub use dictionary::{AngularDictionary, Dictionary, Direction, DistanceSampling, PolarDictionary, PolarGrid};
pub use error::{Error, Result};
pub use geometry::ArrayGeometry;
