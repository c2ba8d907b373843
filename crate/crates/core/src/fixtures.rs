//! Small named instances used throughout the tests and the README.

use crate::metric::{Instance, MetricKind, MetricSpace, PointId};
use crate::scalar::Scalar;

/// Coordinates of the LINE5 instance: five points on a line.
pub const LINE5_COORDS: [u64; 5] = [0, 25, 50, 100, 101];

/// LINE5: points at 0, 25, 50, 100 and 101 on a line; facility F0 at P0 and
/// F1 at P3 with the given opening costs.
pub fn line5<T: Scalar>(f0: T, f1: T) -> Instance<T> {
    let points = LINE5_COORDS.iter().map(|&x| vec![T::from_count(x)]).collect();
    let metric = MetricSpace::euclidean(MetricKind::EuclideanL2, points).expect("valid line");
    Instance::new(metric, vec![(PointId(0), f0), (PointId(3), f1)], Some(1.0)).expect("valid instance")
}

/// Points on a line at the given integer coordinates, one facility per
/// `(point index, cost)` entry.
pub fn on_line<T: Scalar>(coords: &[i64], facilities: &[(usize, u64)]) -> Instance<T> {
    let lo = coords.iter().copied().min().unwrap_or(0);
    let points = coords.iter().map(|&x| vec![T::from_count((x - lo) as u64)]).collect();
    let metric = MetricSpace::euclidean(MetricKind::EuclideanLinf, points).expect("valid line");
    let facilities = facilities.iter().map(|&(p, c)| (PointId(p), T::from_count(c))).collect();
    Instance::new(metric, facilities, Some(1.0)).expect("valid instance")
}
