use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::metric::{ClientId, ClientRegistry, FacilityId, Instance, PointId};
use crate::scalar::Scalar;

/// Largest facility count accepted by [`brute_force_opt`].
pub const MAX_OPT_FACILITIES: usize = 20;

#[derive(Debug, Clone, PartialEq)]
pub struct OptResult<T> {
    pub cost: T,
    /// Ascending.
    pub open_set: Vec<FacilityId>,
    /// Nearest open facility of every client, ties by id.
    pub assignment: BTreeMap<ClientId, FacilityId>,
}

/// Exact optimum by enumerating every facility subset. Among optimal
/// subsets the one with the smallest bitmask wins.
pub fn brute_force_opt<T: Scalar>(instance: &Instance<T>, clients: &ClientRegistry) -> Result<OptResult<T>> {
    let m = instance.facilities().len();
    if m > MAX_OPT_FACILITIES {
        return Err(Error::TooManyFacilities(m, MAX_OPT_FACILITIES));
    }
    if clients.is_empty() {
        return Ok(OptResult { cost: T::zero(), open_set: Vec::new(), assignment: BTreeMap::new() });
    }

    let mut weight: BTreeMap<PointId, u64> = BTreeMap::new();
    for (_, p) in clients.iter() {
        *weight.entry(p).or_default() += 1;
    }
    let points: Vec<(PointId, T)> = weight.into_iter().map(|(p, w)| (p, T::from_count(w))).collect();
    let dist: Vec<Vec<T>> = instance
        .facilities()
        .iter()
        .map(|f| points.iter().map(|&(p, _)| instance.dist(p, f.point)).collect())
        .collect();

    let mut search = Search { instance, points: &points, dist: &dist, best: None };
    let mut nearest: Vec<Option<T>> = vec![None; points.len()];
    search.visit(0, 0, T::zero(), &mut nearest);
    let (cost, mask) = search.best.expect("some subset is non-empty");

    let open_set: Vec<FacilityId> = (0..m).filter(|i| mask >> i & 1 == 1).map(FacilityId).collect();
    let assignment = clients
        .iter()
        .map(|(cid, p)| {
            let best = open_set
                .iter()
                .copied()
                .reduce(|a, b| {
                    let (da, db) =
                        (instance.dist(p, instance.facility(a).point), instance.dist(p, instance.facility(b).point));
                    if db < da {
                        b
                    } else {
                        a
                    }
                })
                .unwrap();
            (cid, best)
        })
        .collect();
    Ok(OptResult { cost, open_set, assignment })
}

struct Search<'a, T> {
    instance: &'a Instance<T>,
    points: &'a [(PointId, T)],
    dist: &'a [Vec<T>],
    best: Option<(T, u32)>,
}

impl<T: Scalar> Search<'_, T> {
    /// Depth-first include/exclude over facilities, carrying the current
    /// nearest distance of every client point.
    fn visit(&mut self, i: usize, mask: u32, opening: T, nearest: &mut [Option<T>]) {
        if i == self.dist.len() {
            if mask == 0 {
                return;
            }
            let mut total = opening;
            for (k, &(_, w)) in self.points.iter().enumerate() {
                total = total + w * nearest[k].unwrap();
            }
            let better = match self.best {
                None => true,
                Some((c, m)) => total < c || (total == c && mask < m),
            };
            if better {
                self.best = Some((total, mask));
            }
            return;
        }
        self.visit(i + 1, mask, opening, nearest);
        let saved: Vec<Option<T>> = nearest.to_vec();
        for (k, d) in self.dist[i].iter().enumerate() {
            if nearest[k].is_none_or(|n| *d < n) {
                nearest[k] = Some(*d);
            }
        }
        let cost = opening + self.instance.facilities()[i].opening_cost;
        self.visit(i + 1, mask | 1 << i, cost, nearest);
        nearest.copy_from_slice(&saved);
    }
}
