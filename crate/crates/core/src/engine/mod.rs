//! The live annotated tree, maintained under client insertions and deletions.
//!
//! Payments are kept as exact integers in units of `5^rho_min`, so `cost`
//! and `y` are bit-exact regardless of the scalar type.

mod heap;
mod registry;

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::hierarchy::{AreaChain, Hierarchy, NodeId};
use crate::metric::{client_scale, ClientId, ClientRegistry, FacilityId, Instance, PointId};
use crate::oracle::StateSnapshot;
use crate::scalar::Scalar;

pub use heap::{DirtyHeap, TripletKey};
pub use registry::OpenFacilityRegistry;

/// Largest supported number of logradii; payments must fit in `u128`.
pub const MAX_LEVELS: u32 = 40;

/// Dynamic fields of one triplet.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub struct NodeAnnotation {
    pub is_open: bool,
    pub is_enabled: bool,
    pub is_abundant: bool,
    /// Live clients in the area.
    pub n_area: u64,
    /// Live clients in `X(j, r)`.
    pub n_x: u64,
    /// Open lex-smaller triplets whose facility lies in `Y(j, r)`.
    pub open_below: u32,
    /// Live clients in enabled areas strictly below.
    pub n_enabled_below: u64,
    /// Payment of the subtree, in units of `5^rho_min`.
    pub cost: u128,
    /// Sum of the children's `cost`.
    pub y: u128,
}

/// Where a client pays and which facility serves it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Assignment {
    pub r_area: i32,
    pub area_triplet: NodeId,
    pub aux_triplet: NodeId,
    pub open_facility: FacilityId,
}

/// Outcome of [`check_status`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StatusCheck {
    pub open: bool,
    pub switched: bool,
}

/// Proposes the open bit of a triplet from its abundance and `open_below`.
pub fn check_status(a: &NodeAnnotation) -> StatusCheck {
    if !a.is_open && a.is_abundant && a.open_below == 0 {
        StatusCheck { open: true, switched: true }
    } else if (a.is_open && a.open_below >= 1) || !a.is_abundant {
        StatusCheck { open: false, switched: a.is_open }
    } else {
        StatusCheck { open: a.is_open, switched: false }
    }
}

/// Work counters of a single update.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct UpdateStats {
    /// Size of the affected set `S`.
    pub touched: u64,
    pub heap_pulls: u64,
    /// Open/closed transitions.
    pub flips: u64,
    /// Nodes whose enabled bit changed.
    pub enabled_flips: u64,
    /// Nodes pulled from the heap more than once.
    pub repeat_cleanings: u64,
    /// Logradius range changes triggered by this update.
    pub level_shifts: u64,
}

impl UpdateStats {
    fn absorb(&mut self, other: &UpdateStats) {
        self.touched += other.touched;
        self.heap_pulls += other.heap_pulls;
        self.flips += other.flips;
        self.enabled_flips += other.enabled_flips;
        self.repeat_cleanings += other.repeat_cleanings;
        self.level_shifts += other.level_shifts;
    }
}

#[derive(Debug, Clone)]
pub struct DynamicFacilityLocation<T> {
    instance: Instance<T>,
    hierarchy: Hierarchy<T>,
    clients: ClientRegistry,
    chains: Vec<Option<AreaChain>>,
    ann: Vec<NodeAnnotation>,
    scale: Vec<u128>,
    open: OpenFacilityRegistry,
    heap: DirtyHeap,
    last: UpdateStats,
    totals: UpdateStats,
}

impl<T: Scalar> DynamicFacilityLocation<T> {
    pub fn new(instance: Instance<T>) -> Result<Self> {
        let params = instance.derive_parameters(0);
        if params.delta > MAX_LEVELS {
            return Err(Error::InvalidInstance(format!(
                "{} logradii needed, at most {MAX_LEVELS} supported",
                params.delta
            )));
        }
        let hierarchy = Hierarchy::build(&instance, params);
        let open = OpenFacilityRegistry::new(instance.facilities().len());
        let mut engine = DynamicFacilityLocation {
            chains: vec![None; instance.num_points()],
            instance,
            hierarchy,
            clients: ClientRegistry::new(),
            ann: Vec::new(),
            scale: Vec::new(),
            open,
            heap: DirtyHeap::default(),
            last: UpdateStats::default(),
            totals: UpdateStats::default(),
        };
        engine.reset_annotations();
        Ok(engine)
    }

    pub fn instance(&self) -> &Instance<T> {
        &self.instance
    }

    pub fn hierarchy(&self) -> &Hierarchy<T> {
        &self.hierarchy
    }

    pub fn clients(&self) -> &ClientRegistry {
        &self.clients
    }

    pub fn annotation(&self, v: NodeId) -> &NodeAnnotation {
        &self.ann[v.0]
    }

    pub fn annotations(&self) -> &[NodeAnnotation] {
        &self.ann
    }

    /// Direct write access for fault-injection tests.
    #[doc(hidden)]
    pub fn annotation_mut(&mut self, v: NodeId) -> &mut NodeAnnotation {
        &mut self.ann[v.0]
    }

    pub fn open_registry(&self) -> &OpenFacilityRegistry {
        &self.open
    }

    /// Counters of the most recent update.
    pub fn last_update(&self) -> &UpdateStats {
        &self.last
    }

    /// Counters summed over all updates so far.
    pub fn totals(&self) -> &UpdateStats {
        &self.totals
    }

    pub fn insert_client(&mut self, cid: ClientId, p: PointId) -> Result<()> {
        self.instance.check_point(p)?;
        self.clients.insert(cid, p)?;
        self.apply(p, 1);
        Ok(())
    }

    pub fn delete_client(&mut self, cid: ClientId) -> Result<()> {
        let p = self.clients.remove(cid)?;
        self.apply(p, -1);
        Ok(())
    }

    /// The triplets whose `X` contains `p`.
    pub fn find_affected_triplets(&mut self, p: PointId) -> Vec<NodeId> {
        let chain = self.chain(p).clone();
        self.affected(&chain)
    }

    /// Total payment `sum 5^{r_area}`.
    pub fn cost_query(&self) -> T {
        T::from_units(self.cost_units()) * T::pow5(self.hierarchy.params().rho_min)
    }

    /// Root cost in units of `5^rho_min`.
    pub fn cost_units(&self) -> u128 {
        self.ann[self.hierarchy.root().0].cost
    }

    /// Open facilities in ascending id order.
    pub fn solution_query(&self) -> Vec<FacilityId> {
        let mut out: Vec<FacilityId> = self.open.iter().collect();
        out.sort_unstable();
        out
    }

    pub fn assign_client(&self, cid: ClientId) -> Result<Assignment> {
        if self.clients.is_empty() {
            return Err(Error::NoClients);
        }
        let p = self.clients.get(cid).ok_or(Error::UnknownClient(cid))?;
        let chain = self.chains[p.0].clone().unwrap_or_else(|| self.hierarchy.area_chain(&self.instance, p));
        Ok(self.assign_with_chain(&chain))
    }

    fn assign_with_chain(&self, chain: &AreaChain) -> Assignment {
        let h = &self.hierarchy;
        let area = chain
            .nodes()
            .iter()
            .copied()
            .find(|v| self.ann[v.0].is_enabled)
            .expect("the root is enabled while clients are live");
        let area_node = h.node(area);
        let aux = std::iter::once(area)
            .chain(area_node.neighbors_below.iter().copied())
            .filter(|u| self.ann[u.0].is_open)
            .min_by_key(|&u| h.node(u).key())
            .expect("an enabled triplet has an open triplet in Y");
        Assignment {
            r_area: area_node.r,
            area_triplet: area,
            aux_triplet: aux,
            open_facility: h.node(aux).designated_facility,
        }
    }

    /// Assignments of all live clients, by client id.
    pub fn assignments(&self) -> BTreeMap<ClientId, Assignment> {
        self.clients
            .iter()
            .map(|(cid, p)| {
                let chain = self.chains[p.0].as_ref().expect("live client points have cached chains");
                (cid, self.assign_with_chain(chain))
            })
            .collect()
    }

    /// Cost of the maintained solution: opening costs of the open facilities
    /// plus each client's distance to its assigned facility.
    pub fn realized_cost(&self) -> T {
        let mut total = T::zero();
        for f in self.open.iter() {
            total = total + self.instance.facility(f).opening_cost;
        }
        for (cid, a) in self.assignments() {
            let p = self.clients.get(cid).unwrap();
            total = total + self.instance.dist(p, self.instance.facility(a.open_facility).point);
        }
        total
    }

    pub fn snapshot(&self) -> StateSnapshot {
        StateSnapshot {
            layout: crate::oracle::layout_key(&self.hierarchy),
            rho_min: self.hierarchy.params().rho_min,
            annotations: self.ann.clone(),
            open_facilities: self.solution_query(),
            assignments: self.assignments().into_iter().collect(),
        }
    }

    fn chain(&mut self, p: PointId) -> &AreaChain {
        if self.chains[p.0].is_none() {
            self.chains[p.0] = Some(self.hierarchy.area_chain(&self.instance, p));
        }
        self.chains[p.0].as_ref().unwrap()
    }

    /// `X` is built from same-level centers within `cX * 5^r`, which is a
    /// symmetric relation, so the triplets whose `X` contains `p` are the
    /// `x_areas` of the areas on `p`'s chain.
    fn affected(&self, chain: &AreaChain) -> Vec<NodeId> {
        chain.nodes().iter().flat_map(|&u| self.hierarchy.node(u).x_areas.iter().copied()).collect()
    }

    fn apply(&mut self, p: PointId, delta: i64) {
        self.last = UpdateStats::default();
        let chain = self.chain(p).clone();
        let s = self.affected(&chain);
        self.last.touched = s.len() as u64;
        let u = self.update_status(&s, delta);
        self.update_cost(&chain, &u, delta);
        self.adjust_levels();
        self.totals.absorb(&self.last);
    }

    fn is_abundant(&self, v: NodeId) -> bool {
        let node = self.hierarchy.node(v);
        T::pow5(node.r) * T::from_count(self.ann[v.0].n_x) >= node.designated_cost
    }

    fn push_dirty(&mut self, v: NodeId) {
        let key = self.hierarchy.node(v).key();
        self.heap.push(v, key);
    }

    /// Adjusts `n_x` on `s`, drains the dirty heap and returns the nodes
    /// whose enabled bit must flip, with the new bit.
    fn update_status(&mut self, s: &[NodeId], delta: i64) -> Vec<(NodeId, bool)> {
        for &v in s {
            let a = &mut self.ann[v.0];
            a.n_x = a.n_x.checked_add_signed(delta).expect("n_x underflow");
            let abundant = self.is_abundant(v);
            if abundant != self.ann[v.0].is_abundant {
                self.ann[v.0].is_abundant = abundant;
                self.push_dirty(v);
            }
        }
        self.drain_heap()
    }

    fn drain_heap(&mut self) -> Vec<(NodeId, bool)> {
        while let Some(v) = self.heap.pop() {
            self.last.heap_pulls += 1;
            let check = check_status(&self.ann[v.0]);
            if !check.switched {
                continue;
            }
            self.last.flips += 1;
            self.ann[v.0].is_open = check.open;
            let designated = self.hierarchy.node(v).designated_facility;
            if check.open {
                self.open.acquire(designated);
            } else {
                self.open.release(designated);
            }
            for i in 0..self.hierarchy.node(v).neighbors_above.len() {
                let u = self.hierarchy.node(v).neighbors_above[i];
                let a = &mut self.ann[u.0];
                if check.open {
                    a.open_below += 1;
                } else {
                    a.open_below -= 1;
                }
                self.push_dirty(u);
            }
        }
        let flipped: Vec<(NodeId, bool)> = self
            .heap
            .cleaned()
            .iter()
            .filter_map(|&v| {
                let a = &self.ann[v.0];
                let enabled = a.open_below >= 1 || a.is_open;
                (enabled != a.is_enabled).then_some((v, enabled))
            })
            .collect();
        self.last.repeat_cleanings += self.heap.finish();
        self.last.enabled_flips += flipped.len() as u64;
        flipped
    }

    fn update_cost(&mut self, chain: &AreaChain, flipped: &[(NodeId, bool)], delta: i64) {
        let h = &self.hierarchy;
        for &(v, enabled) in flipped {
            if let Some(parent) = h.node(v).parent {
                let change = self.ann[v.0].n_area as i64 * (enabled as i64 - self.ann[v.0].is_enabled as i64);
                let a = &mut self.ann[parent.0];
                a.n_enabled_below = a.n_enabled_below.checked_add_signed(change).expect("n_enabled_below underflow");
            }
        }
        for &(v, enabled) in flipped {
            self.ann[v.0].is_enabled = enabled;
        }
        for &v in chain.nodes() {
            if self.ann[v.0].is_enabled {
                if let Some(parent) = h.node(v).parent {
                    let a = &mut self.ann[parent.0];
                    a.n_enabled_below = a.n_enabled_below.checked_add_signed(delta).expect("n_enabled_below underflow");
                }
            }
            let a = &mut self.ann[v.0];
            a.n_area = a.n_area.checked_add_signed(delta).expect("n_area underflow");
        }

        let mut q: Vec<(i32, NodeId)> = chain.nodes().iter().map(|&v| (h.node(v).r, v)).collect();
        for &(u, _) in flipped {
            q.extend(h.path_to_root(u).map(|v| (h.node(v).r, v)));
        }
        q.sort_unstable();
        q.dedup();
        for (_, v) in q {
            self.recompute_cost(v);
        }
    }

    fn recompute_cost(&mut self, v: NodeId) {
        let a = &self.ann[v.0];
        let old = a.cost;
        let new = if a.is_enabled { a.y + u128::from(a.n_area - a.n_enabled_below) * self.scale[v.0] } else { a.y };
        self.ann[v.0].cost = new;
        if let Some(parent) = self.hierarchy.node(v).parent {
            let y = &mut self.ann[parent.0].y;
            *y = *y + new - old;
        }
    }

    /// Recomputes the client scale and, when the bottom logradius moves,
    /// adds or removes the bottom level and rebuilds every annotation.
    fn adjust_levels(&mut self) {
        let n = client_scale(self.clients.len());
        let params = self.instance.derive_parameters(n);
        if params.rho_min == self.hierarchy.params().rho_min {
            self.hierarchy.set_client_scale(n);
            return;
        }
        assert!(params.delta <= MAX_LEVELS, "too many logradii for exact payments");
        self.last.level_shifts += 1;
        self.hierarchy = self.hierarchy.with_params(&self.instance, params);
        self.chains.iter_mut().for_each(|c| *c = None);
        self.reset_annotations();
        self.rebuild_from_clients();
    }

    fn reset_annotations(&mut self) {
        let rho_min = self.hierarchy.params().rho_min;
        self.ann = vec![NodeAnnotation::default(); self.hierarchy.len()];
        self.scale = self.hierarchy.nodes().iter().map(|n| 5u128.pow((n.r - rho_min) as u32)).collect();
        self.heap.resize(self.hierarchy.len());
        self.open.clear();
    }

    /// Builds all annotations for the current clients on a fresh tree.
    fn rebuild_from_clients(&mut self) {
        let points: Vec<PointId> = self.clients.iter().map(|(_, p)| p).collect();
        for p in points {
            let chain = self.chain(p).clone();
            for &v in chain.nodes() {
                self.ann[v.0].n_area += 1;
            }
        }
        for v in self.hierarchy.node_ids() {
            let n_x = self.hierarchy.node(v).x_areas.iter().map(|a| self.ann[a.0].n_area).sum();
            self.ann[v.0].n_x = n_x;
            let abundant = self.is_abundant(v);
            self.ann[v.0].is_abundant = abundant;
            if abundant {
                self.push_dirty(v);
            }
        }
        for (v, enabled) in self.drain_heap() {
            self.ann[v.0].is_enabled = enabled;
        }
        // Node ids grow downwards, so reverse order visits children first.
        for i in (0..self.hierarchy.len()).rev() {
            let v = NodeId(i);
            let below: u64 = self
                .hierarchy
                .node(v)
                .children
                .iter()
                .filter(|c| self.ann[c.0].is_enabled)
                .map(|c| self.ann[c.0].n_area)
                .sum();
            let y: u128 = self.hierarchy.node(v).children.iter().map(|c| self.ann[c.0].cost).sum();
            let a = &mut self.ann[v.0];
            a.n_enabled_below = below;
            a.y = y;
            a.cost = if a.is_enabled { y + u128::from(a.n_area - below) * self.scale[i] } else { y };
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::line5;

    fn ann(open: bool, abundant: bool, open_below: u32) -> NodeAnnotation {
        NodeAnnotation { is_open: open, is_enabled: open, is_abundant: abundant, open_below, ..Default::default() }
    }

    #[test]
    fn check_status_branches() {
        assert_eq!(check_status(&ann(false, true, 0)), StatusCheck { open: true, switched: true });
        assert_eq!(check_status(&ann(true, true, 2)), StatusCheck { open: false, switched: true });
        assert_eq!(check_status(&ann(false, false, 0)), StatusCheck { open: false, switched: false });
        assert_eq!(check_status(&ann(true, false, 0)), StatusCheck { open: false, switched: true });
        assert_eq!(check_status(&ann(true, true, 0)), StatusCheck { open: true, switched: false });
        assert_eq!(check_status(&ann(false, true, 1)), StatusCheck { open: false, switched: false });
    }

    fn line5_engine(f1: f64) -> DynamicFacilityLocation<f64> {
        DynamicFacilityLocation::new(line5(10.0, f1)).unwrap()
    }

    fn node(e: &DynamicFacilityLocation<f64>, r: i32) -> NodeId {
        e.hierarchy().node_at(FacilityId(0), r).unwrap()
    }

    #[test]
    fn line5_first_insertion() {
        let mut e = line5_engine(10.0);
        assert_eq!(e.find_affected_triplets(PointId(3)), vec![node(&e, 1), node(&e, 2), node(&e, 3)]);
        e.insert_client(ClientId(1), PointId(3)).unwrap();
        assert!(e.annotation(node(&e, 2)).is_open);
        assert!(!e.annotation(node(&e, 1)).is_open);
        assert!(e.annotation(node(&e, 3)).is_enabled);
        assert_eq!(e.annotation(node(&e, 3)).open_below, 1);
        assert_eq!(e.cost_query(), 25.0);
        assert_eq!(e.solution_query(), vec![FacilityId(0)]);
        let costs: Vec<u128> = (1..=3).map(|r| e.annotation(node(&e, r)).cost).collect();
        assert_eq!(costs, vec![0, 5, 5]);
        let a = e.assign_client(ClientId(1)).unwrap();
        assert_eq!((a.r_area, a.aux_triplet, a.open_facility), (2, node(&e, 2), FacilityId(0)));
        assert_eq!(e.realized_cost(), 110.0);
    }

    #[test]
    fn line5_three_clients() {
        let mut e = line5_engine(10.0);
        e.insert_client(ClientId(1), PointId(3)).unwrap();
        e.insert_client(ClientId(2), PointId(4)).unwrap();
        e.insert_client(ClientId(3), PointId(3)).unwrap();
        assert!(e.annotation(node(&e, 1)).is_open);
        assert!(!e.annotation(node(&e, 2)).is_open);
        assert_eq!(e.cost_query(), 15.0);
        for r in 1..=3 {
            assert_eq!(e.annotation(node(&e, r)).cost, 3);
        }
        for c in 1..=3 {
            let a = e.assign_client(ClientId(c)).unwrap();
            assert_eq!((a.r_area, a.open_facility), (1, FacilityId(0)));
        }
        assert_eq!(e.realized_cost(), 311.0);
    }

    #[test]
    fn cheaper_designated_facility_is_opened() {
        let mut e = line5_engine(9.0);
        e.insert_client(ClientId(1), PointId(3)).unwrap();
        assert_eq!(e.solution_query(), vec![FacilityId(1)]);
    }

    #[test]
    fn insert_then_delete_restores_empty_state() {
        let mut e = line5_engine(10.0);
        let empty = e.snapshot();
        e.insert_client(ClientId(1), PointId(3)).unwrap();
        e.delete_client(ClientId(1)).unwrap();
        assert_eq!(e.cost_query(), 0.0);
        assert!(e.solution_query().is_empty());
        assert_eq!(e.snapshot(), empty);
    }

    #[test]
    fn rejected_updates_leave_state_unchanged() {
        let mut e = line5_engine(10.0);
        e.insert_client(ClientId(1), PointId(3)).unwrap();
        let before = e.snapshot();
        assert!(matches!(e.insert_client(ClientId(1), PointId(0)), Err(Error::DuplicateClient(_))));
        assert!(matches!(e.delete_client(ClientId(7)), Err(Error::UnknownClient(_))));
        assert!(matches!(e.insert_client(ClientId(2), PointId(9)), Err(Error::InvalidPoint(..))));
        assert_eq!(e.snapshot(), before);
    }

    #[test]
    fn assignment_requires_clients() {
        let e = line5_engine(10.0);
        assert!(matches!(e.assign_client(ClientId(1)), Err(Error::NoClients)));
    }

    #[test]
    fn level_push_at_twenty_five_clients() {
        let mut e = line5_engine(10.0);
        for c in 0..24 {
            e.insert_client(ClientId(c), PointId((c % 5) as usize)).unwrap();
        }
        assert_eq!(e.hierarchy().params().rho_min, 1);
        e.insert_client(ClientId(24), PointId(4)).unwrap();
        assert_eq!(e.last_update().level_shifts, 1);
        let params = e.hierarchy().params();
        assert_eq!((params.rho_min, params.delta), (0, 4));
        let bottom: Vec<FacilityId> = e.hierarchy().level(0).map(|v| e.hierarchy().node(v).facility).collect();
        assert_eq!(bottom, vec![FacilityId(0), FacilityId(1)]);
        e.delete_client(ClientId(24)).unwrap();
        assert_eq!(e.hierarchy().params().rho_min, 1);
        assert_eq!(e.hierarchy().len(), 3);
    }
}
