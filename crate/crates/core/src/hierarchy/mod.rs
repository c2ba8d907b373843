//! Static preprocessing: nets, the dependency tree, laminar areas, `X`/`Y`
//! neighborhoods, coloring, designated facilities and above-neighbor lists.
//!
//! Areas are never materialized as point sets. A point's area at
//! logradius `r` is the level-`r` entry of its [`AreaChain`], found with
//! [`Hierarchy::find_area`] and the parent pointers.

pub mod constants;
mod dump;
pub mod nets;

use std::fmt;

use crate::metric::{FacilityId, Instance, Params, PointId};
use crate::scalar::Scalar;

use constants::{C2, C4, CX, CY};
pub use nets::Skeleton;

/// Index of a triplet in the hierarchy. Nodes are numbered top-down, level
/// by level, and by facility id inside a level.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(pub usize);

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

/// One facility/logradius/color triplet.
#[derive(Debug, Clone, PartialEq)]
pub struct TripletNode<T> {
    pub facility: FacilityId,
    pub r: i32,
    pub color: u32,
    pub parent: Option<NodeId>,
    pub children: Vec<NodeId>,
    /// Same-level areas composing `X(j, r)`, ascending.
    pub x_areas: Vec<NodeId>,
    /// Same-level areas composing `Y(j, r)`, ascending.
    pub y_areas: Vec<NodeId>,
    pub designated_facility: FacilityId,
    pub designated_cost: T,
    /// Triplets `(j', r', s')` with `(r', s') > (r, s)` whose `Y` contains this facility.
    pub neighbors_above: Vec<NodeId>,
    /// Inverse of `neighbors_above`.
    pub neighbors_below: Vec<NodeId>,
}

impl<T> TripletNode<T> {
    /// Heap and tie-break key: logradius, color, facility id.
    pub fn key(&self) -> (i32, u32, FacilityId) {
        (self.r, self.color, self.facility)
    }
}

/// Area membership of a point: its smallest area and all ancestors.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AreaChain {
    bottom_r: i32,
    nodes: Vec<NodeId>,
}

impl AreaChain {
    /// Smallest-logradius area containing the point.
    pub fn bottom(&self) -> NodeId {
        self.nodes[0]
    }

    pub fn bottom_r(&self) -> i32 {
        self.bottom_r
    }

    /// The area containing the point at logradius `r`, if any.
    pub fn at(&self, r: i32) -> Option<NodeId> {
        if r < self.bottom_r {
            return None;
        }
        self.nodes.get((r - self.bottom_r) as usize).copied()
    }

    /// Bottom-up node list, ending at the root.
    pub fn nodes(&self) -> &[NodeId] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Hierarchy<T> {
    params: Params<T>,
    skeleton: Skeleton,
    nodes: Vec<TripletNode<T>>,
    level_start: Vec<usize>,
    facility_chains: Vec<AreaChain>,
}

impl<T: Scalar> Hierarchy<T> {
    pub fn build(instance: &Instance<T>, params: Params<T>) -> Self {
        let skeleton = Skeleton::build(instance, &params);
        Self::from_skeleton(instance, params, skeleton)
    }

    /// Derives everything above the bare tree: coloring, area chains of the
    /// facilities, `X`/`Y` lists, designations and neighbor lists.
    pub fn from_skeleton(instance: &Instance<T>, params: Params<T>, skeleton: Skeleton) -> Self {
        assert_eq!(skeleton.rho_max, params.rho_max);
        assert_eq!(skeleton.rho_min(), params.rho_min);
        let mut level_start = Vec::with_capacity(skeleton.levels.len() + 1);
        let mut total = 0;
        for level in &skeleton.levels {
            level_start.push(total);
            total += level.len();
        }
        level_start.push(total);

        let mut nodes = Vec::with_capacity(total);
        for (l, level) in skeleton.levels.iter().enumerate() {
            let r = skeleton.logradius(l);
            for n in level {
                nodes.push(TripletNode {
                    facility: n.facility,
                    r,
                    color: 0,
                    parent: n.parent.map(|p| NodeId(level_start[l - 1] + p)),
                    children: n.children.iter().map(|&c| NodeId(level_start[l + 1] + c)).collect(),
                    x_areas: Vec::new(),
                    y_areas: Vec::new(),
                    designated_facility: n.facility,
                    designated_cost: instance.facility(n.facility).opening_cost,
                    neighbors_above: Vec::new(),
                    neighbors_below: Vec::new(),
                });
            }
        }
        let mut h = Hierarchy { params, skeleton, nodes, level_start, facility_chains: Vec::new() };
        h.color_pairs(instance);
        h.facility_chains = instance.facilities().iter().map(|f| h.area_chain(instance, f.point)).collect();
        h.build_xy_and_designations(instance);
        h
    }

    pub fn params(&self) -> &Params<T> {
        &self.params
    }

    pub fn skeleton(&self) -> &Skeleton {
        &self.skeleton
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn root(&self) -> NodeId {
        NodeId(0)
    }

    pub fn node(&self, id: NodeId) -> &TripletNode<T> {
        &self.nodes[id.0]
    }

    pub fn nodes(&self) -> &[TripletNode<T>] {
        &self.nodes
    }

    pub fn node_ids(&self) -> impl Iterator<Item = NodeId> {
        (0..self.nodes.len()).map(NodeId)
    }

    /// Nodes at logradius `r`, by facility id.
    pub fn level(&self, r: i32) -> impl Iterator<Item = NodeId> {
        let l = self.skeleton.level_index(r);
        (self.level_start[l]..self.level_start[l + 1]).map(NodeId)
    }

    /// The node for facility `f` at logradius `r`, if `f` is in `J_r`.
    pub fn node_at(&self, f: FacilityId, r: i32) -> Option<NodeId> {
        if r < self.params.rho_min || r > self.params.rho_max {
            return None;
        }
        let l = self.skeleton.level_index(r);
        self.skeleton.levels[l].binary_search_by_key(&f, |n| n.facility).ok().map(|i| NodeId(self.level_start[l] + i))
    }

    /// Root path of `v`, starting with `v`.
    pub fn path_to_root(&self, v: NodeId) -> impl Iterator<Item = NodeId> + '_ {
        std::iter::successors(Some(v), move |&u| self.nodes[u.0].parent)
    }

    /// Cached area chain of a facility's point.
    pub fn facility_chain(&self, f: FacilityId) -> &AreaChain {
        &self.facility_chains[f.0]
    }

    pub fn num_colors(&self) -> u32 {
        self.nodes.iter().map(|n| n.color + 1).max().unwrap_or(0)
    }

    /// All pairs `(j, r)` with `dist(p, j) <= cstar * 5^r`, top-down.
    pub fn find_balls(&self, instance: &Instance<T>, p: PointId, cstar: u32) -> Vec<NodeId> {
        self.skeleton.find_balls(instance, p, cstar).into_iter().map(|(l, i)| NodeId(self.level_start[l] + i)).collect()
    }

    /// The smallest-logradius area containing `p`: minimal logradius among
    /// balls of radius `c2 * 5^r` containing `p`, then minimal distance,
    /// then minimal facility id.
    pub fn find_area(&self, instance: &Instance<T>, p: PointId) -> NodeId {
        let balls = self.find_balls(instance, p, C2);
        let r_star = balls.iter().map(|&v| self.nodes[v.0].r).min().expect("the root ball contains every point");
        balls
            .into_iter()
            .filter(|&v| self.nodes[v.0].r == r_star)
            .map(|v| {
                let f = self.nodes[v.0].facility;
                (instance.dist(p, instance.facility(f).point), f, v)
            })
            .reduce(|a, b| if b.0 < a.0 || (b.0 == a.0 && b.1 < a.1) { b } else { a })
            .map(|(_, _, v)| v)
            .unwrap()
    }

    pub fn area_chain(&self, instance: &Instance<T>, p: PointId) -> AreaChain {
        let bottom = self.find_area(instance, p);
        AreaChain { bottom_r: self.nodes[bottom.0].r, nodes: self.path_to_root(bottom).collect() }
    }

    /// `p ∈ X(v)`, given the area chain of `p`.
    pub fn x_contains(&self, v: NodeId, chain: &AreaChain) -> bool {
        let node = &self.nodes[v.0];
        chain.at(node.r).is_some_and(|a| node.x_areas.binary_search(&a).is_ok())
    }

    /// `p ∈ Y(v)`, given the area chain of `p`.
    pub fn y_contains(&self, v: NodeId, chain: &AreaChain) -> bool {
        let node = &self.nodes[v.0];
        chain.at(node.r).is_some_and(|a| node.y_areas.binary_search(&a).is_ok())
    }

    fn same_level_balls(&self, instance: &Instance<T>, v: NodeId, cstar: u32) -> Vec<NodeId> {
        let node = &self.nodes[v.0];
        let p = instance.facility(node.facility).point;
        let r = node.r;
        self.find_balls(instance, p, cstar).into_iter().filter(|&u| self.nodes[u.0].r == r).collect()
    }

    /// Greedy coloring per level in facility-id order; pairs within
    /// `c4 * 5^r` of each other get distinct colors.
    fn color_pairs(&mut self, instance: &Instance<T>) {
        for r in self.params.logradii() {
            let ids: Vec<NodeId> = self.level(r).collect();
            for &v in &ids {
                let conflicts = self.same_level_balls(instance, v, C4);
                let mut used: Vec<u32> = conflicts.iter().filter(|&&u| u < v).map(|&u| self.nodes[u.0].color).collect();
                used.sort_unstable();
                used.dedup();
                let color = used.iter().enumerate().find(|&(i, &c)| i as u32 != c).map_or(used.len(), |(i, _)| i);
                self.nodes[v.0].color = color as u32;
            }
        }
    }

    fn build_xy_and_designations(&mut self, instance: &Instance<T>) {
        for v in 0..self.nodes.len() {
            let x = self.same_level_balls(instance, NodeId(v), CX);
            let y = self.same_level_balls(instance, NodeId(v), CY);
            self.nodes[v].x_areas = x;
            self.nodes[v].y_areas = y;
        }

        // Cheapest facility inside every area, ties by id.
        let mut area_min: Vec<Option<(T, FacilityId)>> = vec![None; self.nodes.len()];
        for f in instance.facilities() {
            for &a in self.facility_chains[f.id.0].nodes() {
                let better = match area_min[a.0] {
                    None => true,
                    Some((c, id)) => f.opening_cost < c || (f.opening_cost == c && f.id < id),
                };
                if better {
                    area_min[a.0] = Some((f.opening_cost, f.id));
                }
            }
        }
        for v in 0..self.nodes.len() {
            let best = self.nodes[v]
                .x_areas
                .iter()
                .filter_map(|a| area_min[a.0])
                .reduce(|a, b| if b.0 < a.0 || (b.0 == a.0 && b.1 < a.1) { b } else { a })
                .expect("X(j, r) contains j");
            self.nodes[v].designated_cost = best.0;
            self.nodes[v].designated_facility = best.1;
        }

        // Y is symmetric on same-level centers, so the triplets whose Y holds
        // facility j at logradius r' are y_areas of j's level-r' area.
        for v in 0..self.nodes.len() {
            let node = &self.nodes[v];
            let key = (node.r, node.color);
            let chain = &self.facility_chains[node.facility.0];
            let mut above = Vec::new();
            for r in node.r..=self.params.rho_max {
                let Some(a) = chain.at(r) else { continue };
                for &u in &self.nodes[a.0].y_areas {
                    let other = &self.nodes[u.0];
                    if (other.r, other.color) > key {
                        above.push(u);
                    }
                }
            }
            above.sort_unstable();
            self.nodes[v].neighbors_above = above;
        }
        for v in 0..self.nodes.len() {
            for i in 0..self.nodes[v].neighbors_above.len() {
                let u = self.nodes[v].neighbors_above[i];
                self.nodes[u.0].neighbors_below.push(NodeId(v));
            }
        }
    }

    pub(crate) fn set_client_scale(&mut self, n: u64) {
        self.params.n = n;
    }

    /// Applies a client-scale change to the bottom of the tree: adds levels
    /// below while `rho_min` decreased, drops them while it increased.
    pub fn with_params(&self, instance: &Instance<T>, params: Params<T>) -> Self {
        let mut skeleton = self.skeleton.clone();
        while skeleton.rho_min() > params.rho_min {
            skeleton.push_bottom_level(instance);
        }
        while skeleton.rho_min() < params.rho_min {
            skeleton.pop_bottom_level();
        }
        Self::from_skeleton(instance, params, skeleton)
    }

    /// Indented text dump, one node per line.
    pub fn dump(&self) -> String {
        dump::render(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{line5, on_line};

    fn ids(h: &Hierarchy<f64>, v: &[NodeId]) -> Vec<(usize, i32)> {
        v.iter().map(|&u| (h.node(u).facility.0, h.node(u).r)).collect()
    }

    #[test]
    fn line5_structure() {
        let inst = line5(10.0, 10.0);
        let h = Hierarchy::build(&inst, inst.derive_parameters(0));
        assert_eq!(h.len(), 3);
        assert_eq!(ids(&h, &h.find_balls(&inst, PointId(3), C2)), vec![(0, 3), (0, 2), (0, 1)]);
        let area = h.find_area(&inst, PointId(3));
        assert_eq!(ids(&h, &[area]), vec![(0, 1)]);
        let chain = h.area_chain(&inst, PointId(3));
        assert_eq!(ids(&h, chain.nodes()), vec![(0, 1), (0, 2), (0, 3)]);
        assert!(h.nodes().iter().all(|n| n.color == 0));

        let bottom = h.node_at(FacilityId(0), 1).unwrap();
        let n = h.node(bottom);
        assert_eq!(n.x_areas, vec![bottom]);
        assert_eq!((n.designated_facility, n.designated_cost), (FacilityId(0), 10.0));
        assert_eq!(ids(&h, &n.neighbors_above), vec![(0, 3), (0, 2)]);
    }

    #[test]
    fn cheaper_facility_becomes_designated() {
        let inst = line5(10.0, 9.0);
        let h = Hierarchy::build(&inst, inst.derive_parameters(0));
        let n = h.node(h.node_at(FacilityId(0), 1).unwrap());
        assert_eq!((n.designated_facility, n.designated_cost), (FacilityId(1), 9.0));
    }

    #[test]
    fn root_ball_always_found() {
        let inst = line5(10.0, 10.0);
        let h = Hierarchy::build(&inst, inst.derive_parameters(0));
        for p in 0..5 {
            assert_eq!(h.find_balls(&inst, PointId(p), C2)[0], h.root());
        }
    }

    #[test]
    fn chain_length_matches_bottom_logradius() {
        let inst = on_line::<f64>(&[0, 3, 30, 31, 90, 250, 400, 1000], &[(0, 1), (2, 2), (4, 3), (6, 1)]);
        let h = Hierarchy::build(&inst, inst.derive_parameters(0));
        for p in 0..inst.num_points() {
            let chain = h.area_chain(&inst, PointId(p));
            assert_eq!(chain.len() as i32, h.params().rho_max - chain.bottom_r() + 1);
            assert_eq!(*chain.nodes().last().unwrap(), h.root());
        }
    }

    #[test]
    fn close_pairs_get_distinct_colors() {
        // Two facilities 50 apart: separate at 5^r = 1 (c1 = 20), conflicting (c4 = 284).
        let inst = on_line::<f64>(&[0, 50], &[(0, 1), (1, 1)]);
        let params = inst.derive_parameters(0);
        assert_eq!(params.rho_min, 0);
        let h = Hierarchy::build(&inst, params);
        let colors: Vec<u32> = h.level(0).map(|v| h.node(v).color).collect();
        assert_eq!(colors, vec![0, 1]);
    }

    #[test]
    fn equidistant_area_centers_prefer_lower_id() {
        // P1 at 100 sits between F0 at 200 and F1 at 0; both are in J_1.
        let inst = on_line::<f64>(&[0, 100, 200], &[(2, 1), (0, 1)]);
        let h = Hierarchy::build(&inst, inst.derive_parameters(0));
        assert_eq!(h.level(1).count(), 2);
        let area = h.find_area(&inst, PointId(1));
        assert_eq!(h.node(area).facility, FacilityId(0));
        assert_eq!(h.node(area).r, 1);
    }
}
