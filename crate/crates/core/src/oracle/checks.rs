//! Property checks over the static tree and the live state. Each check
//! returns human-readable violations; an empty list means it holds.

use crate::engine::DynamicFacilityLocation;
use crate::hierarchy::constants::{C1, C2, C3, C4, CX, PAYMENT_FACTOR};
use crate::hierarchy::{AreaChain, Hierarchy, NodeId};
use crate::metric::{FacilityId, Instance, PointId};
use crate::scalar::Scalar;

/// Relative slack allowed when comparing floating distance sums.
pub const PAYMENT_SLACK: f64 = 1e-9;

/// Nets, tree, areas, neighborhoods, coloring and designations.
pub fn structural_violations<T: Scalar>(instance: &Instance<T>, h: &Hierarchy<T>) -> Vec<String> {
    let mut out = Vec::new();
    let params = h.params();
    let chains: Vec<AreaChain> = (0..instance.num_points()).map(|p| h.area_chain(instance, PointId(p))).collect();
    let fpoint = |f: FacilityId| instance.facility(f).point;

    if h.level(params.rho_max).count() != 1 {
        out.push("top level is not a single facility".to_string());
    }
    for r in params.logradii() {
        let level: Vec<NodeId> = h.level(r).collect();
        let radius = T::radius(C1, r);
        for (i, &a) in level.iter().enumerate() {
            for &b in &level[i + 1..] {
                let (fa, fb) = (h.node(a).facility, h.node(b).facility);
                if instance.dist(fpoint(fa), fpoint(fb)) <= radius {
                    out.push(format!("separation fails at r={r}: {fa} and {fb}"));
                }
                if instance.dist(fpoint(fa), fpoint(fb)) <= T::radius(C4, r) && h.node(a).color == h.node(b).color {
                    out.push(format!("color conflict at r={r}: {fa} and {fb}"));
                }
            }
        }
        for f in instance.facilities() {
            if !level.iter().any(|&v| instance.dist(f.point, fpoint(h.node(v).facility)) <= radius) {
                out.push(format!("covering fails at r={r} for {}", f.id));
            }
        }
        if r < params.rho_max {
            for &v in &level {
                let parent = h.node(v).parent.expect("non-root nodes have parents");
                if h.node(parent).r != r + 1 {
                    out.push(format!("{v}: parent on the wrong level"));
                }
                let f = h.node(v).facility;
                let d = |u: NodeId| instance.dist(fpoint(f), fpoint(h.node(u).facility));
                let closest = h
                    .level(r + 1)
                    .reduce(|a, b| {
                        if d(b) < d(a) || (d(b) == d(a) && h.node(b).facility < h.node(a).facility) {
                            b
                        } else {
                            a
                        }
                    })
                    .unwrap();
                if closest != parent {
                    out.push(format!("{v}: parent is not the closest upper facility"));
                }
                if d(parent) > T::radius(C1, r + 1) {
                    out.push(format!("{v}: parent farther than c1 * 5^(r+1)"));
                }
            }
        }
        if r > params.rho_min {
            for v in h.level(r) {
                if h.node_at(h.node(v).facility, r - 1).is_none() {
                    out.push(format!("{v}: facility missing from the level below"));
                }
            }
        }
    }

    for (p, chain) in chains.iter().enumerate() {
        let p = PointId(p);
        let brute = super::brute_area_chain(instance, h, p);
        if brute != chain.nodes() {
            out.push(format!("{p}: area chain differs from the brute-force scan"));
        }
        for w in chain.nodes().windows(2) {
            if h.node(w[0]).parent != Some(w[1]) {
                out.push(format!("{p}: area chain is not a tree path"));
            }
        }
        for &v in chain.nodes() {
            let n = h.node(v);
            if instance.dist(p, fpoint(n.facility)) > T::radius(C2, n.r) {
                out.push(format!("{p}: area {v} exceeds its ball"));
            }
        }
        for r in params.logradii() {
            let covered = h.level(r).any(|v| instance.dist(p, fpoint(h.node(v).facility)) <= T::radius(C2, r));
            if covered != (r >= chain.bottom_r()) {
                out.push(format!("{p}: level-{r} areas do not match the union of balls"));
            }
        }
        for cstar in [C2, CX, C4] {
            let mut fast = h.find_balls(instance, p, cstar);
            let mut brute: Vec<NodeId> = h
                .node_ids()
                .filter(|&v| instance.dist(p, fpoint(h.node(v).facility)) <= T::radius(cstar, h.node(v).r))
                .collect();
            fast.sort_unstable();
            brute.sort_unstable();
            if fast != brute {
                out.push(format!("{p}: find_balls with c={cstar} differs from the brute-force scan"));
            }
        }
    }

    for v in h.node_ids() {
        let n = h.node(v);
        let j = fpoint(n.facility);
        if n.x_areas.binary_search(&v).is_err() {
            out.push(format!("{v}: missing from its own X"));
        }
        if !n.x_areas.iter().all(|a| n.y_areas.binary_search(a).is_ok()) {
            out.push(format!("{v}: X not inside Y"));
        }
        if n.designated_cost > instance.facility(n.facility).opening_cost {
            out.push(format!("{v}: designated cost above own opening cost"));
        }
        if instance.dist(j, fpoint(n.designated_facility)) > T::radius(C3, n.r) {
            out.push(format!("{v}: designated facility farther than c3 * 5^r"));
        }
        for (p, chain) in chains.iter().enumerate() {
            let d = instance.dist(PointId(p), j);
            if h.x_contains(v, chain) && d > T::radius(C3, n.r) {
                out.push(format!("{v}: X reaches P{p} beyond c3 * 5^r"));
            }
            if h.y_contains(v, chain) {
                if d > T::radius(C4, n.r) {
                    out.push(format!("{v}: Y reaches P{p} beyond c4 * 5^r"));
                }
                if let Some(parent) = n.parent {
                    if !h.y_contains(parent, chain) {
                        out.push(format!("{v}: P{p} in Y but not in the parent's Y"));
                    }
                }
            }
        }
    }

    // Every ball B(j, 5^r) lies inside a single X at logradius r.
    for f in instance.facilities() {
        for r in params.logradii() {
            let inside: Vec<usize> =
                (0..instance.num_points()).filter(|&p| instance.dist(PointId(p), f.point) <= T::pow5(r)).collect();
            let covered = h.level(r).any(|v| inside.iter().all(|&p| h.x_contains(v, &chains[p])));
            if !covered {
                out.push(format!("B({}, 5^{r}) is not inside any X", f.id));
            }
        }
    }

    if let Some(kappa) = instance.kappa() {
        out.extend(kappa_violations(h, kappa));
    }
    out
}

/// Size bounds that hold when the declared doubling dimension is correct.
pub fn kappa_violations<T: Scalar>(h: &Hierarchy<T>, kappa: f64) -> Vec<String> {
    let mut out = Vec::new();
    let bound = |e: f64| 2f64.powf(e * kappa);
    for v in h.node_ids() {
        let n = h.node(v);
        if n.children.len() as f64 > bound(4.0) {
            out.push(format!("{v}: {} children exceed 2^(4 kappa)", n.children.len()));
        }
        if n.x_areas.len() as f64 > bound(3.0) {
            out.push(format!("{v}: {} X areas exceed 2^(3 kappa)", n.x_areas.len()));
        }
        if n.y_areas.len() as f64 > bound(5.0) {
            out.push(format!("{v}: {} Y areas exceed 2^(5 kappa)", n.y_areas.len()));
        }
    }
    if h.num_colors() as f64 > bound(5.0) + 1.0 {
        out.push(format!("{} colors exceed 2^(5 kappa) + 1", h.num_colors()));
    }
    out
}

/// Status, counter and cost relations of the live state.
pub fn logical_violations<T: Scalar>(engine: &DynamicFacilityLocation<T>) -> Vec<String> {
    let mut out = Vec::new();
    let h = engine.hierarchy();
    let instance = engine.instance();
    let rho_min = h.params().rho_min;
    let ann = engine.annotations();

    for v in h.node_ids() {
        let a = &ann[v.0];
        let n = h.node(v);
        if a.is_open && !a.is_enabled {
            out.push(format!("{v}: open but not enabled"));
        }
        if a.is_abundant && !a.is_enabled {
            out.push(format!("{v}: abundant but not enabled"));
        }
        if a.is_abundant != (T::pow5(n.r) * T::from_count(a.n_x) >= n.designated_cost) {
            out.push(format!("{v}: abundance bit out of date"));
        }
        if let Some(parent) = n.parent {
            if a.is_enabled && !ann[parent.0].is_enabled {
                out.push(format!("{v}: enabled below a disabled parent"));
            }
        }
        let below: u64 = n.children.iter().filter(|c| ann[c.0].is_enabled).map(|c| ann[c.0].n_area).sum();
        if below != a.n_enabled_below {
            out.push(format!("{v}: n_enabled_below {} but enabled children hold {below}", a.n_enabled_below));
        }
        let y: u128 = n.children.iter().map(|c| ann[c.0].cost).sum();
        if y != a.y {
            out.push(format!("{v}: y {} but children cost {y}", a.y));
        }
        let scale = 5u128.pow((n.r - rho_min) as u32);
        let cost = if a.is_enabled { a.y + u128::from(a.n_area - a.n_enabled_below) * scale } else { a.y };
        if cost != a.cost {
            out.push(format!("{v}: cost {} but the recursion gives {cost}", a.cost));
        }
    }

    let mut designated: Vec<FacilityId> =
        h.node_ids().filter(|v| ann[v.0].is_open).map(|v| h.node(v).designated_facility).collect();
    designated.sort_unstable();
    designated.dedup();
    if designated != engine.solution_query() {
        out.push("open facility list differs from the designated facilities of open triplets".to_string());
    }

    if engine.clients().is_empty() {
        return out;
    }
    if !ann.iter().any(|a| a.is_open) {
        out.push("clients are live but no triplet is open".to_string());
    }
    if !ann[h.root().0].is_enabled {
        out.push("clients are live but the root is disabled".to_string());
    }
    let assignments = engine.assignments();
    let mut paid = 0u128;
    for (cid, p) in engine.clients().iter() {
        let chain = h.area_chain(instance, p);
        let open_x = h.node_ids().filter(|&v| ann[v.0].is_open && h.x_contains(v, &chain)).count();
        if open_x > 1 {
            out.push(format!("client {cid} lies in X of {open_x} open triplets"));
        }
        let a = assignments[&cid];
        paid += 5u128.pow((a.r_area - rho_min) as u32);
        let reach = T::radius(C2 + C3 + C4, a.r_area);
        if instance.dist(p, instance.facility(a.open_facility).point) > reach {
            out.push(format!("client {cid} is farther than (c2+c3+c4) * 5^r_area from its facility"));
        }
    }
    if paid != engine.cost_units() {
        out.push(format!("root cost {} but clients pay {paid}", engine.cost_units()));
    }
    out
}

/// The realized solution cost against `(c2+c3+c4+1)` times the total payment.
pub fn payment_violation<T: Scalar>(engine: &DynamicFacilityLocation<T>) -> Option<String> {
    let realized = engine.realized_cost().as_f64();
    let bound = f64::from(PAYMENT_FACTOR) * engine.cost_query().as_f64();
    (realized > bound * (1.0 + PAYMENT_SLACK)).then(|| format!("realized cost {realized} exceeds {bound}"))
}

/// Every live check in one list.
pub fn state_violations<T: Scalar>(engine: &DynamicFacilityLocation<T>) -> Vec<String> {
    let mut out = logical_violations(engine);
    out.extend(payment_violation(engine));
    if engine.last_update().repeat_cleanings > 0 {
        out.push(format!("{} triplets cleaned twice in one update", engine.last_update().repeat_cleanings));
    }
    out
}
