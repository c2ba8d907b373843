//! Instances: a finite point universe with a metric, facilities with
//! positive opening costs, and the live client set.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::scalar::{cround, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PointId(pub usize);

impl fmt::Display for PointId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "P{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FacilityId(pub usize);

impl fmt::Display for FacilityId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ClientId(pub u64);

impl fmt::Display for ClientId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "c{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MetricKind {
    ExplicitMatrix,
    EuclideanL2,
    EuclideanLinf,
}

impl MetricKind {
    pub fn as_str(self) -> &'static str {
        match self {
            MetricKind::ExplicitMatrix => "explicit-matrix",
            MetricKind::EuclideanL2 => "euclidean-L2",
            MetricKind::EuclideanLinf => "euclidean-Linf",
        }
    }
}

/// A finite metric space.
#[derive(Debug, Clone, PartialEq)]
pub enum MetricSpace<T> {
    Matrix { n: usize, entries: Vec<T> },
    L2 { dim: usize, coords: Vec<T> },
    Linf { dim: usize, coords: Vec<T> },
}

impl<T: Scalar> MetricSpace<T> {
    /// Explicit distance matrix; validated exhaustively for the metric axioms.
    pub fn from_matrix(rows: Vec<Vec<T>>) -> Result<Self> {
        let n = rows.len();
        let mut entries = Vec::with_capacity(n * n);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::InvalidInstance(format!("matrix row {i} has {} entries, expected {n}", row.len())));
            }
            entries.extend_from_slice(row);
        }
        let space = MetricSpace::Matrix { n, entries };
        space.validate_matrix()?;
        Ok(space)
    }

    pub fn euclidean(kind: MetricKind, points: Vec<Vec<T>>) -> Result<Self> {
        let dim = points.first().map_or(0, Vec::len);
        let mut coords = Vec::with_capacity(points.len() * dim);
        for (i, p) in points.iter().enumerate() {
            if p.len() != dim {
                return Err(Error::InvalidInstance(format!("point {i} has dimension {}, expected {dim}", p.len())));
            }
            coords.extend_from_slice(p);
        }
        let space = match kind {
            MetricKind::EuclideanL2 => MetricSpace::L2 { dim, coords },
            MetricKind::EuclideanLinf => MetricSpace::Linf { dim, coords },
            MetricKind::ExplicitMatrix => return Err(Error::InvalidInstance("explicit-matrix needs a matrix".into())),
        };
        if matches!(space, MetricSpace::L2 { .. }) {
            // Scalars without a general square root must still produce exact distances.
            for p in 0..space.len() {
                for q in 0..space.len() {
                    if space.squared_l2(p, q).checked_sqrt().is_none() {
                        return Err(Error::InvalidInstance(format!(
                            "distance between P{p} and P{q} is not representable in {}",
                            T::NAME
                        )));
                    }
                }
            }
        }
        Ok(space)
    }

    pub fn kind(&self) -> MetricKind {
        match self {
            MetricSpace::Matrix { .. } => MetricKind::ExplicitMatrix,
            MetricSpace::L2 { .. } => MetricKind::EuclideanL2,
            MetricSpace::Linf { .. } => MetricKind::EuclideanLinf,
        }
    }

    pub fn len(&self) -> usize {
        match self {
            MetricSpace::Matrix { n, .. } => *n,
            MetricSpace::L2 { dim, coords } | MetricSpace::Linf { dim, coords } => {
                if *dim == 0 {
                    0
                } else {
                    coords.len() / dim
                }
            }
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn distance(&self, p: PointId, q: PointId) -> Result<T> {
        let n = self.len();
        for x in [p, q] {
            if x.0 >= n {
                return Err(Error::InvalidPoint(x, n));
            }
        }
        Ok(self.dist(p.0, q.0))
    }

    /// Unchecked distance between point indices.
    #[inline]
    pub(crate) fn dist(&self, p: usize, q: usize) -> T {
        match self {
            MetricSpace::Matrix { n, entries } => entries[p * n + q],
            MetricSpace::L2 { .. } => self.squared_l2(p, q).checked_sqrt().expect("validated at construction"),
            MetricSpace::Linf { dim, coords } => {
                let a = &coords[p * dim..(p + 1) * dim];
                let b = &coords[q * dim..(q + 1) * dim];
                a.iter().zip(b).fold(T::zero(), |m, (&x, &y)| T::max_of(m, T::abs_diff(x, y)))
            }
        }
    }

    fn squared_l2(&self, p: usize, q: usize) -> T {
        let MetricSpace::L2 { dim, coords } = self else { unreachable!() };
        let a = &coords[p * dim..(p + 1) * dim];
        let b = &coords[q * dim..(q + 1) * dim];
        a.iter().zip(b).fold(T::zero(), |s, (&x, &y)| {
            let d = T::abs_diff(x, y);
            s + d * d
        })
    }

    fn validate_matrix(&self) -> Result<()> {
        let n = self.len();
        for p in 0..n {
            if self.dist(p, p) != T::zero() {
                return Err(Error::MetricViolation(format!("dist(P{p},P{p}) is not zero")));
            }
            for q in 0..n {
                let d = self.dist(p, q);
                if d < T::zero() {
                    return Err(Error::MetricViolation(format!("dist(P{p},P{q}) is negative")));
                }
                if d != self.dist(q, p) {
                    return Err(Error::MetricViolation(format!(
                        "asymmetric pair (P{p},P{q}): {} vs {}",
                        d,
                        self.dist(q, p)
                    )));
                }
            }
        }
        for p in 0..n {
            for q in 0..n {
                let d = self.dist(p, q);
                for x in 0..n {
                    if d > self.dist(p, x) + self.dist(x, q) {
                        return Err(Error::MetricViolation(format!("triangle inequality fails for (P{p},P{x},P{q})")));
                    }
                }
            }
        }
        Ok(())
    }

    /// Largest pairwise distance.
    pub fn diameter(&self) -> T {
        let n = self.len();
        let mut w = T::zero();
        for p in 0..n {
            for q in p + 1..n {
                w = T::max_of(w, self.dist(p, q));
            }
        }
        w
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Facility<T> {
    pub id: FacilityId,
    pub point: PointId,
    pub opening_cost: T,
}

/// Points, metric and facilities. Immutable once built.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance<T> {
    metric: MetricSpace<T>,
    facilities: Vec<Facility<T>>,
    kappa: Option<f64>,
    diameter: T,
    f_min: T,
    f_max: T,
}

impl<T: Scalar> Instance<T> {
    /// `facilities` are `(point, opening cost)` pairs; ids follow their order.
    pub fn new(metric: MetricSpace<T>, facilities: Vec<(PointId, T)>, kappa: Option<f64>) -> Result<Self> {
        if facilities.is_empty() {
            return Err(Error::InvalidInstance("at least one facility is required".into()));
        }
        let n = metric.len();
        let mut list = Vec::with_capacity(facilities.len());
        for (i, (point, cost)) in facilities.into_iter().enumerate() {
            if point.0 >= n {
                return Err(Error::InvalidPoint(point, n));
            }
            if cost <= T::zero() {
                return Err(Error::InvalidInstance(format!("facility F{i} has non-positive opening cost {cost}")));
            }
            list.push(Facility { id: FacilityId(i), point, opening_cost: cost });
        }
        if let Some(k) = kappa {
            if k.is_nan() || k < 0.0 {
                return Err(Error::InvalidInstance(format!("kappa must be non-negative, got {k}")));
            }
        }
        let f_min = list.iter().map(|f| f.opening_cost).fold(list[0].opening_cost, T::min_of);
        let f_max = list.iter().map(|f| f.opening_cost).fold(list[0].opening_cost, T::max_of);
        let diameter = metric.diameter();
        Ok(Instance { metric, facilities: list, kappa, diameter, f_min, f_max })
    }

    pub fn metric(&self) -> &MetricSpace<T> {
        &self.metric
    }

    pub fn facilities(&self) -> &[Facility<T>] {
        &self.facilities
    }

    pub fn facility(&self, id: FacilityId) -> &Facility<T> {
        &self.facilities[id.0]
    }

    pub fn num_points(&self) -> usize {
        self.metric.len()
    }

    pub fn kappa(&self) -> Option<f64> {
        self.kappa
    }

    pub fn diameter(&self) -> T {
        self.diameter
    }

    pub fn distance(&self, p: PointId, q: PointId) -> Result<T> {
        self.metric.distance(p, q)
    }

    #[inline]
    pub(crate) fn dist(&self, p: PointId, q: PointId) -> T {
        self.metric.dist(p.0, q.0)
    }

    #[inline]
    pub(crate) fn facility_dist(&self, a: FacilityId, b: FacilityId) -> T {
        self.dist(self.facilities[a.0].point, self.facilities[b.0].point)
    }

    pub fn check_point(&self, p: PointId) -> Result<()> {
        if p.0 < self.num_points() {
            Ok(())
        } else {
            Err(Error::InvalidPoint(p, self.num_points()))
        }
    }

    pub fn derive_parameters(&self, n: u64) -> Params<T> {
        Params::derive(self, n)
    }
}

/// Global scale parameters of an instance for a given client scale `n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Params<T> {
    pub diameter: T,
    pub f_max: T,
    pub f_min: T,
    pub n: u64,
    pub rho_min: i32,
    pub rho_max: i32,
    pub delta: u32,
    /// Set when `rho_max < rho_min` forced the range down to a single level.
    pub clamped: bool,
}

impl<T: Scalar> Params<T> {
    pub fn derive(instance: &Instance<T>, n: u64) -> Self {
        let divisor = (instance.facilities.len() as u64).max(n);
        let rho_min = cround(instance.f_min / T::from_count(divisor));
        let rho_max = cround(T::max_of(instance.diameter, instance.f_max));
        let (rho_min, clamped) = if rho_max < rho_min { (rho_max, true) } else { (rho_min, false) };
        Params {
            diameter: instance.diameter,
            f_max: instance.f_max,
            f_min: instance.f_min,
            n,
            rho_min,
            rho_max,
            delta: (rho_max - rho_min + 1) as u32,
            clamped,
        }
    }

    pub fn logradii(&self) -> std::ops::RangeInclusive<i32> {
        self.rho_min..=self.rho_max
    }
}

/// Largest power of 5 not exceeding `count`; zero for an empty client set.
pub fn client_scale(count: usize) -> u64 {
    if count == 0 {
        return 0;
    }
    let mut n = 1u64;
    while n * 5 <= count as u64 {
        n *= 5;
    }
    n
}

/// Live clients and the points they occupy. Several clients may share a point.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct ClientRegistry {
    clients: BTreeMap<ClientId, PointId>,
}

impl ClientRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, id: ClientId, point: PointId) -> Result<()> {
        if self.clients.contains_key(&id) {
            return Err(Error::DuplicateClient(id));
        }
        self.clients.insert(id, point);
        Ok(())
    }

    pub fn remove(&mut self, id: ClientId) -> Result<PointId> {
        self.clients.remove(&id).ok_or(Error::UnknownClient(id))
    }

    pub fn get(&self, id: ClientId) -> Option<PointId> {
        self.clients.get(&id).copied()
    }

    pub fn contains(&self, id: ClientId) -> bool {
        self.clients.contains_key(&id)
    }

    pub fn len(&self) -> usize {
        self.clients.len()
    }

    pub fn is_empty(&self) -> bool {
        self.clients.is_empty()
    }

    /// Clients in ascending id order.
    pub fn iter(&self) -> impl Iterator<Item = (ClientId, PointId)> + '_ {
        self.clients.iter().map(|(&c, &p)| (c, p))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::line5;

    #[test]
    fn distance_examples() {
        let inst = line5(10.0, 10.0);
        assert_eq!(inst.distance(PointId(0), PointId(0)).unwrap(), 0.0);
        assert_eq!(inst.distance(PointId(0), PointId(3)).unwrap(), 100.0);
        let plane = MetricSpace::euclidean(MetricKind::EuclideanL2, vec![vec![0.0, 0.0], vec![3.0, 4.0]]).unwrap();
        assert_eq!(plane.distance(PointId(0), PointId(1)).unwrap(), 5.0);
        let linf = MetricSpace::euclidean(MetricKind::EuclideanLinf, vec![vec![0.0, 0.0], vec![3.0, 4.0]]).unwrap();
        assert_eq!(linf.distance(PointId(0), PointId(1)).unwrap(), 4.0);
    }

    #[test]
    fn invalid_point_is_an_error() {
        let inst = line5(10.0, 10.0);
        assert!(matches!(inst.distance(PointId(0), PointId(5)), Err(Error::InvalidPoint(PointId(5), 5))));
    }

    #[test]
    fn line5_parameters() {
        let inst = line5(10.0, 10.0);
        let p = inst.derive_parameters(0);
        assert_eq!((p.diameter, p.rho_min, p.rho_max, p.delta), (101.0, 1, 3, 3));
        let p = inst.derive_parameters(25);
        assert_eq!((p.rho_min, p.delta), (0, 4));
    }

    #[test]
    fn unit_instance_has_one_level() {
        let metric = MetricSpace::from_matrix(vec![vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        let inst = Instance::new(metric, vec![(PointId(0), 1.0)], None).unwrap();
        let p = inst.derive_parameters(0);
        assert_eq!((p.rho_min, p.rho_max, p.delta, p.clamped), (0, 0, 1, false));
    }

    #[test]
    fn rejects_non_positive_cost() {
        let metric = MetricSpace::from_matrix(vec![vec![0.0]]).unwrap();
        assert!(Instance::new(metric.clone(), vec![(PointId(0), 0.0)], None).is_err());
        assert!(Instance::new(metric, vec![(PointId(0), -3.0)], None).is_err());
    }

    #[test]
    fn rejects_asymmetric_and_non_metric_matrices() {
        let err = MetricSpace::from_matrix(vec![vec![0.0, 1.0], vec![2.0, 0.0]]).unwrap_err();
        assert!(err.to_string().contains("(P0,P1)"), "{err}");
        let err =
            MetricSpace::from_matrix(vec![vec![0.0, 1.0, 5.0], vec![1.0, 0.0, 1.0], vec![5.0, 1.0, 0.0]]).unwrap_err();
        assert!(matches!(err, Error::MetricViolation(_)));
    }

    #[test]
    fn client_scale_is_largest_power_of_five() {
        assert_eq!(client_scale(0), 0);
        assert_eq!(client_scale(1), 1);
        assert_eq!(client_scale(4), 1);
        assert_eq!(client_scale(5), 5);
        assert_eq!(client_scale(124), 25);
        assert_eq!(client_scale(125), 125);
    }

    #[test]
    fn registry_rejects_duplicates() {
        let mut reg = ClientRegistry::new();
        reg.insert(ClientId(1), PointId(3)).unwrap();
        assert!(matches!(reg.insert(ClientId(1), PointId(2)), Err(Error::DuplicateClient(_))));
        assert_eq!(reg.len(), 1);
        assert!(matches!(reg.remove(ClientId(7)), Err(Error::UnknownClient(_))));
        assert_eq!(reg.remove(ClientId(1)).unwrap(), PointId(3));
        assert!(reg.is_empty());
    }
}
