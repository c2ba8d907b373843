//! Dynamic metric facility location with constant-time cost queries.
//!
//! The engine keeps an O(1)-approximate uncapacitated facility location
//! solution while clients are inserted and deleted. The core is generic
//! over the [`Scalar`] used for distances and costs.

pub mod engine;
pub mod error;
pub mod fixtures;
pub mod harness;
pub mod hierarchy;
pub mod instance_file;
pub mod metric;
pub mod oracle;
pub mod scalar;

pub use engine::{Assignment, DynamicFacilityLocation, NodeAnnotation, UpdateStats};
pub use error::{Error, Result};
pub use hierarchy::{Hierarchy, NodeId};
pub use metric::{ClientId, ClientRegistry, FacilityId, Instance, MetricKind, MetricSpace, Params, PointId};
pub use scalar::{Rational, Scalar};

pub type Engine64 = DynamicFacilityLocation<f64>;
pub type Engine32 = DynamicFacilityLocation<f32>;
pub type ExactEngine = DynamicFacilityLocation<Rational>;
