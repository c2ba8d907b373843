//! Slow, definition-level recomputation of the dynamic state and an exact
//! solver for small instances.
//!
//! Nothing here reads the engine's lists of areas or neighbors: areas come
//! from a scan over all triplets, `X`/`Y` membership from distances between
//! area centers, and every counter from its defining set.

pub mod checks;
mod opt;

use std::collections::hash_map::DefaultHasher;
use std::fmt;
use std::hash::{Hash, Hasher};

use crate::engine::{Assignment, NodeAnnotation};
use crate::error::{Error, Result};
use crate::hierarchy::constants::{C2, CX, CY};
use crate::hierarchy::{Hierarchy, NodeId};
use crate::metric::{ClientId, ClientRegistry, FacilityId, Instance, PointId};
use crate::scalar::Scalar;

pub use opt::{brute_force_opt, OptResult, MAX_OPT_FACILITIES};

/// Full dynamic state: every annotation, the open facilities and all
/// client assignments.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct StateSnapshot {
    /// Fingerprint of the tree the annotations refer to.
    pub layout: u64,
    pub rho_min: i32,
    pub annotations: Vec<NodeAnnotation>,
    /// Ascending.
    pub open_facilities: Vec<FacilityId>,
    /// Ascending by client id.
    pub assignments: Vec<(ClientId, Assignment)>,
}

impl StateSnapshot {
    pub fn state_hash(&self) -> u64 {
        let mut h = DefaultHasher::new();
        self.hash(&mut h);
        h.finish()
    }
}

/// Fingerprint of the static tree: facility, logradius, color and parent of
/// every node.
pub fn layout_key<T: Scalar>(h: &Hierarchy<T>) -> u64 {
    let mut hasher = DefaultHasher::new();
    h.params().rho_min.hash(&mut hasher);
    h.params().rho_max.hash(&mut hasher);
    for n in h.nodes() {
        (n.facility, n.r, n.color, n.parent).hash(&mut hasher);
    }
    hasher.finish()
}

/// One differing field.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mismatch {
    pub subject: String,
    pub field: &'static str,
    pub left: String,
    pub right: String,
}

impl fmt::Display for Mismatch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}: {} != {}", self.subject, self.field, self.left, self.right)
    }
}

/// Field-by-field diff. Empty iff the snapshots are equal.
pub fn compare_states(a: &StateSnapshot, b: &StateSnapshot) -> Result<Vec<Mismatch>> {
    if a.layout != b.layout || a.rho_min != b.rho_min || a.annotations.len() != b.annotations.len() {
        return Err(Error::StructureMismatch);
    }
    let mut out = Vec::new();
    macro_rules! field {
        ($subject:expr, $x:expr, $y:expr, $name:ident) => {
            if $x.$name != $y.$name {
                out.push(Mismatch {
                    subject: $subject,
                    field: stringify!($name),
                    left: format!("{:?}", $x.$name),
                    right: format!("{:?}", $y.$name),
                });
            }
        };
    }
    for (i, (x, y)) in a.annotations.iter().zip(&b.annotations).enumerate() {
        let subject = || format!("node #{i}");
        field!(subject(), x, y, is_open);
        field!(subject(), x, y, is_enabled);
        field!(subject(), x, y, is_abundant);
        field!(subject(), x, y, n_area);
        field!(subject(), x, y, n_x);
        field!(subject(), x, y, open_below);
        field!(subject(), x, y, n_enabled_below);
        field!(subject(), x, y, cost);
        field!(subject(), x, y, y);
    }
    if a.open_facilities != b.open_facilities {
        out.push(Mismatch {
            subject: "solution".into(),
            field: "open_facilities",
            left: format!("{:?}", a.open_facilities),
            right: format!("{:?}", b.open_facilities),
        });
    }
    let left: std::collections::BTreeMap<_, _> = a.assignments.iter().copied().collect();
    let right: std::collections::BTreeMap<_, _> = b.assignments.iter().copied().collect();
    for cid in left.keys().chain(right.keys().filter(|c| !left.contains_key(c))) {
        let (x, y) = (left.get(cid), right.get(cid));
        if x != y {
            out.push(Mismatch {
                subject: format!("client {cid}"),
                field: "assignment",
                left: format!("{x:?}"),
                right: format!("{y:?}"),
            });
        }
    }
    Ok(out)
}

/// Smallest area of `p` by a scan over every triplet, then the ancestors.
pub fn brute_area_chain<T: Scalar>(instance: &Instance<T>, h: &Hierarchy<T>, p: PointId) -> Vec<NodeId> {
    let mut best: Option<(i32, T, FacilityId, NodeId)> = None;
    for v in h.node_ids() {
        let n = h.node(v);
        let d = instance.dist(p, instance.facility(n.facility).point);
        if d > T::radius(C2, n.r) {
            continue;
        }
        let better = match best {
            None => true,
            Some((r, bd, bf, _)) => n.r < r || (n.r == r && (d < bd || (d == bd && n.facility < bf))),
        };
        if better {
            best = Some((n.r, d, n.facility, v));
        }
    }
    let (_, _, _, bottom) = best.expect("the root ball covers every point");
    let mut chain = vec![bottom];
    while let Some(parent) = h.node(*chain.last().unwrap()).parent {
        chain.push(parent);
    }
    chain
}

struct Areas<'a, T> {
    instance: &'a Instance<T>,
    h: &'a Hierarchy<T>,
    chains: Vec<Option<Vec<NodeId>>>,
}

impl<'a, T: Scalar> Areas<'a, T> {
    fn new(instance: &'a Instance<T>, h: &'a Hierarchy<T>) -> Self {
        Areas { instance, h, chains: vec![None; instance.num_points()] }
    }

    fn chain(&mut self, p: PointId) -> &[NodeId] {
        if self.chains[p.0].is_none() {
            self.chains[p.0] = Some(brute_area_chain(self.instance, self.h, p));
        }
        self.chains[p.0].as_deref().unwrap()
    }

    /// Area of `p` at logradius `r`, if `p` is covered at that level.
    fn at(&mut self, p: PointId, r: i32) -> Option<NodeId> {
        let h = self.h;
        self.chain(p).iter().copied().find(|&v| h.node(v).r == r)
    }

    /// Whether `p`'s logradius-`r` area has its center within `c * 5^r` of `v`'s facility.
    fn within(&mut self, p: PointId, v: NodeId, c: u32) -> bool {
        let n = self.h.node(v);
        let Some(a) = self.at(p, n.r) else { return false };
        let (inst, h) = (self.instance, self.h);
        let center = inst.facility(h.node(a).facility).point;
        inst.dist(center, inst.facility(n.facility).point) <= T::radius(c, n.r)
    }

    fn in_x(&mut self, p: PointId, v: NodeId) -> bool {
        self.within(p, v, CX)
    }

    fn facility_in_y(&mut self, f: FacilityId, v: NodeId) -> bool {
        self.within(self.instance.facility(f).point, v, CY)
    }
}

/// Evaluates every dynamic quantity from its definition for the given live
/// clients on the tree `h`.
pub fn recompute_state<T: Scalar>(instance: &Instance<T>, h: &Hierarchy<T>, clients: &ClientRegistry) -> StateSnapshot {
    let mut areas = Areas::new(instance, h);
    let len = h.len();
    let rho_min = h.params().rho_min;

    let mut per_point: Vec<u64> = vec![0; instance.num_points()];
    for (_, p) in clients.iter() {
        per_point[p.0] += 1;
    }
    let occupied: Vec<(PointId, u64)> =
        per_point.iter().enumerate().filter(|&(_, &c)| c > 0).map(|(p, &c)| (PointId(p), c)).collect();

    let mut ann = vec![NodeAnnotation::default(); len];
    for &(p, count) in &occupied {
        for &v in areas.chain(p).to_vec().iter() {
            ann[v.0].n_area += count;
        }
    }

    // Designated cost: the cheapest facility whose area at this level lies in X.
    let mut designated: Vec<Option<(T, FacilityId)>> = vec![None; len];
    for v in h.node_ids() {
        for f in instance.facilities() {
            if !areas.in_x(f.point, v) {
                continue;
            }
            let better = match designated[v.0] {
                None => true,
                Some((c, id)) => f.opening_cost < c || (f.opening_cost == c && f.id < id),
            };
            if better {
                designated[v.0] = Some((f.opening_cost, f.id));
            }
        }
        let n_x = occupied.iter().filter(|&&(p, _)| areas.in_x(p, v)).map(|&(_, c)| c).sum();
        ann[v.0].n_x = n_x;
        let (f_star, _) = designated[v.0].expect("X contains the triplet's own facility");
        ann[v.0].is_abundant = T::pow5(h.node(v).r) * T::from_count(n_x) >= f_star;
    }

    // Lex order on (r, color, facility): every open triplet that can block
    // another is decided before it.
    let mut order: Vec<NodeId> = h.node_ids().collect();
    order.sort_by_key(|&v| h.node(v).key());
    let mut open: Vec<NodeId> = Vec::new();
    for &v in &order {
        let (r, s) = (h.node(v).r, h.node(v).color);
        let blocked_by = |areas: &mut Areas<T>, u: NodeId| {
            let nu = h.node(u);
            (nu.r, nu.color) < (r, s) && areas.facility_in_y(nu.facility, v)
        };
        let below = open.iter().filter(|&&u| blocked_by(&mut areas, u)).count();
        ann[v.0].open_below = below as u32;
        if ann[v.0].is_abundant && below == 0 {
            ann[v.0].is_open = true;
            open.push(v);
        }
    }
    for v in h.node_ids() {
        let (r, s) = (h.node(v).r, h.node(v).color);
        ann[v.0].is_enabled = open.iter().any(|&u| {
            let nu = h.node(u);
            (nu.r, nu.color) <= (r, s) && areas.facility_in_y(nu.facility, v)
        });
    }

    let mut assignments = Vec::new();
    let client_list: Vec<(ClientId, PointId)> = clients.iter().collect();
    for &(cid, p) in &client_list {
        let chain = areas.chain(p).to_vec();
        let area = *chain.iter().find(|v| ann[v.0].is_enabled).expect("the root is enabled while clients are live");
        let an = h.node(area);
        let aux = open
            .iter()
            .copied()
            .filter(|&u| {
                let nu = h.node(u);
                (nu.r, nu.color) <= (an.r, an.color) && areas.facility_in_y(nu.facility, area)
            })
            .min_by_key(|&u| h.node(u).key())
            .expect("an enabled area has an open triplet in Y");
        assignments.push((
            cid,
            Assignment {
                r_area: an.r,
                area_triplet: area,
                aux_triplet: aux,
                open_facility: designated[aux.0].unwrap().1,
            },
        ));
        let pay = 5u128.pow((an.r - rho_min) as u32);
        for &v in &chain {
            let nv = h.node(v);
            if nv.r >= an.r {
                ann[v.0].cost += pay;
            }
            if nv.r > an.r {
                ann[v.0].y += pay;
                ann[v.0].n_enabled_below += 1;
            }
        }
    }

    let mut open_facilities: Vec<FacilityId> = open.iter().map(|&v| designated[v.0].unwrap().1).collect();
    open_facilities.sort_unstable();
    open_facilities.dedup();

    StateSnapshot { layout: layout_key(h), rho_min, annotations: ann, open_facilities, assignments }
}
