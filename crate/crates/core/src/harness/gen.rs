//! Random instances and traces for fuzzing.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::trace::{Trace, TraceEvent};
use crate::instance_file::{Coords, FacilityFile, InstanceFile, MetricFile};
use crate::metric::{ClientId, PointId};

/// Environment variable holding the generator seed.
pub const SEED_VAR: &str = "NETFLOC_SEED";

/// Seed from `NETFLOC_SEED`, or `default` when unset or unparsable.
pub fn seed_from_env(default: u64) -> u64 {
    std::env::var(SEED_VAR).ok().and_then(|s| s.trim().parse().ok()).unwrap_or(default)
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FuzzConfig {
    pub facilities: usize,
    /// Total declared points, facility sites included.
    pub points: usize,
    /// Side of the integer grid.
    pub grid: u32,
    pub max_cost: u32,
}

impl Default for FuzzConfig {
    fn default() -> Self {
        FuzzConfig { facilities: 20, points: 60, grid: 1000, max_cost: 500 }
    }
}

/// Distinct uniform points on `[0, grid]^2` under L2. Facilities sit on the
/// first points with integer costs uniform in `[1, max_cost]`.
pub fn random_instance(rng: &mut impl Rng, cfg: &FuzzConfig) -> InstanceFile {
    assert!(cfg.facilities >= 1 && cfg.facilities <= cfg.points);
    let mut seen = BTreeSet::new();
    let mut points = Vec::with_capacity(cfg.points);
    while points.len() < cfg.points {
        let p = (rng.gen_range(0..=cfg.grid), rng.gen_range(0..=cfg.grid));
        if seen.insert(p) {
            points.push(Coords::Vector(vec![f64::from(p.0), f64::from(p.1)]));
        }
    }
    let facilities = (0..cfg.facilities)
        .map(|i| FacilityFile { point: i, cost: f64::from(rng.gen_range(1..=cfg.max_cost)) })
        .collect();
    InstanceFile {
        metric: MetricFile { kind: "euclidean-L2".to_string(), points: Some(points), matrix: None },
        facilities,
        kappa: None,
    }
}

/// `events` mutations, two inserts per delete on average, each delete
/// removing a uniformly random live client. Ends with a cost and a
/// solution query.
pub fn random_trace(rng: &mut impl Rng, num_points: usize, events: usize) -> Trace {
    let mut live: Vec<ClientId> = Vec::new();
    let mut next = 0u64;
    let mut out = Vec::with_capacity(events + 2);
    for _ in 0..events {
        if live.is_empty() || rng.gen_range(0..3) < 2 {
            let client = ClientId(next);
            next += 1;
            live.push(client);
            out.push(TraceEvent::Insert { client, point: PointId(rng.gen_range(0..num_points)) });
        } else {
            let i = rng.gen_range(0..live.len());
            out.push(TraceEvent::Delete(live.swap_remove(i)));
        }
    }
    out.push(TraceEvent::CostQuery);
    out.push(TraceEvent::SolutionQuery);
    Trace::from_events(out)
}

/// `count` inserts at uniformly random points followed by deletions of all
/// of them in random order.
pub fn grow_shrink_trace(rng: &mut impl Rng, num_points: usize, count: usize) -> Trace {
    let mut out: Vec<TraceEvent> = (0..count)
        .map(|i| TraceEvent::Insert { client: ClientId(i as u64), point: PointId(rng.gen_range(0..num_points)) })
        .collect();
    let mut order: Vec<u64> = (0..count as u64).collect();
    order.shuffle(rng);
    out.extend(order.into_iter().map(|c| TraceEvent::Delete(ClientId(c))));
    Trace::from_events(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::Instance;

    #[test]
    fn instance_is_valid_and_reproducible() {
        let cfg = FuzzConfig { facilities: 5, points: 12, ..Default::default() };
        let a = random_instance(&mut rng(7), &cfg);
        let b = random_instance(&mut rng(7), &cfg);
        assert_eq!(a.to_json(), b.to_json());
        let inst: Instance<f64> = a.to_instance().unwrap();
        assert_eq!((inst.num_points(), inst.facilities().len()), (12, 5));
        assert!(inst.facilities().iter().all(|f| (1.0..=500.0).contains(&f.opening_cost)));
    }

    #[test]
    fn trace_is_consistent() {
        let t = random_trace(&mut rng(3), 10, 300);
        let mut live = BTreeSet::new();
        let (mut ins, mut del) = (0, 0);
        for e in &t.events {
            match e.event {
                TraceEvent::Insert { client, point } => {
                    assert!(point.0 < 10);
                    assert!(live.insert(client));
                    ins += 1;
                }
                TraceEvent::Delete(client) => {
                    assert!(live.remove(&client));
                    del += 1;
                }
                _ => {}
            }
        }
        assert_eq!(ins + del, 300);
        assert!(ins > del);
        assert_eq!(Trace::parse(&t.to_text()).unwrap().len(), t.len());
    }

    #[test]
    fn grow_shrink_empties_the_set() {
        let t = grow_shrink_trace(&mut rng(1), 5, 30);
        assert_eq!(t.len(), 60);
        assert!(matches!(t.events[59].event, TraceEvent::Delete(_)));
    }
}
