//! Separated facility sets `J_r` and the parent relation between them.

use crate::metric::{FacilityId, Instance, Params, PointId};
use crate::scalar::Scalar;

use super::constants::{C1, C2};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NetNode {
    pub facility: FacilityId,
    /// Index into the level above.
    pub parent: Option<usize>,
    /// Indices into the level below, ascending.
    pub children: Vec<usize>,
}

/// The bare tree over facility/logradius pairs.
///
/// `levels[0]` holds logradius `rho_max`, `levels[k]` logradius `rho_max - k`.
/// Every level is sorted by facility id and `J_{r+1}` is a subset of `J_r`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Skeleton {
    pub rho_max: i32,
    pub levels: Vec<Vec<NetNode>>,
}

impl Skeleton {
    /// Builds every level top-down. Each level starts from the level above
    /// and greedily adds the remaining facilities in id order.
    pub fn build<T: Scalar>(instance: &Instance<T>, params: &Params<T>) -> Self {
        let mut levels: Vec<Vec<NetNode>> = Vec::with_capacity(params.delta as usize);
        let mut above: Vec<FacilityId> = Vec::new();
        for r in params.logradii().rev() {
            let radius = T::radius(C1, r);
            let mut chosen = above.clone();
            for f in instance.facilities() {
                if chosen.contains(&f.id) {
                    continue;
                }
                if chosen.iter().all(|&c| instance.facility_dist(f.id, c) > radius) {
                    chosen.push(f.id);
                }
            }
            chosen.sort();
            let level: Vec<NetNode> = chosen
                .iter()
                .map(|&facility| NetNode {
                    facility,
                    parent: closest(instance, facility, above.iter().copied().enumerate()),
                    children: Vec::new(),
                })
                .collect();
            if let Some(upper) = levels.last_mut() {
                for (i, node) in level.iter().enumerate() {
                    upper[node.parent.expect("non-root levels have parents")].children.push(i);
                }
            }
            levels.push(level);
            above = chosen;
        }
        Skeleton { rho_max: params.rho_max, levels }
    }

    pub fn rho_min(&self) -> i32 {
        self.rho_max - self.levels.len() as i32 + 1
    }

    pub fn level_index(&self, r: i32) -> usize {
        (self.rho_max - r) as usize
    }

    pub fn logradius(&self, level: usize) -> i32 {
        self.rho_max - level as i32
    }

    /// All pairs `(level, index)` with `dist(p, j) <= cstar * 5^r`, found by a
    /// top-down traversal that only expands children of surviving pairs.
    /// Valid for `cstar >= 5/4 * c1`.
    pub fn find_balls<T: Scalar>(&self, instance: &Instance<T>, p: PointId, cstar: u32) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        let Some(top) = self.levels.first() else {
            return out;
        };
        let mut frontier: Vec<usize> = Vec::new();
        let radius = T::radius(cstar, self.rho_max);
        for (i, node) in top.iter().enumerate() {
            if instance.dist(p, instance.facility(node.facility).point) <= radius {
                frontier.push(i);
            }
        }
        out.extend(frontier.iter().map(|&i| (0, i)));
        for level in 1..self.levels.len() {
            let radius = T::radius(cstar, self.logradius(level));
            let mut next = Vec::new();
            for &i in &frontier {
                for &c in &self.levels[level - 1][i].children {
                    let node = &self.levels[level][c];
                    if instance.dist(p, instance.facility(node.facility).point) <= radius {
                        next.push(c);
                    }
                }
            }
            next.sort_unstable();
            out.extend(next.iter().map(|&i| (level, i)));
            frontier = next;
        }
        out
    }

    /// Appends the level `rho_min - 1` below the current bottom. The new
    /// level is seeded with the current bottom level; every other facility
    /// is tested against the new level through `find_balls(j, c2)`.
    pub fn push_bottom_level<T: Scalar>(&mut self, instance: &Instance<T>) {
        let bottom = self.levels.len() - 1;
        let new_r = self.rho_min() - 1;
        let seed: Vec<NetNode> = self.levels[bottom]
            .iter()
            .enumerate()
            .map(|(i, n)| NetNode { facility: n.facility, parent: Some(i), children: Vec::new() })
            .collect();
        let mut in_level = vec![false; instance.facilities().len()];
        for n in &seed {
            in_level[n.facility.0] = true;
        }
        for n in self.levels[bottom].iter_mut() {
            n.children.clear();
        }
        self.levels.push(seed);
        let new_level = bottom + 1;
        for (i, n) in self.levels[new_level].clone().iter().enumerate() {
            self.levels[bottom][n.parent.unwrap()].children.push(i);
        }

        let cover = T::radius(C1, new_r);
        for f in instance.facilities() {
            if in_level[f.id.0] {
                continue;
            }
            let balls = self.find_balls(instance, f.point, C2);
            let covered = balls
                .iter()
                .any(|&(l, i)| l == new_level && instance.facility_dist(f.id, self.levels[l][i].facility) <= cover);
            if covered {
                continue;
            }
            let candidates =
                balls.iter().filter(|&&(l, _)| l == bottom).map(|&(_, i)| (i, self.levels[bottom][i].facility));
            let parent = closest(instance, f.id, candidates).expect("covering guarantees a parent within c2");
            let idx = self.levels[new_level].len();
            self.levels[new_level].push(NetNode { facility: f.id, parent: Some(parent), children: Vec::new() });
            self.levels[bottom][parent].children.push(idx);
            in_level[f.id.0] = true;
        }

        // Restore the facility-id order of the new level.
        self.levels[new_level].sort_by_key(|n| n.facility);
        for n in self.levels[bottom].iter_mut() {
            n.children.clear();
        }
        for i in 0..self.levels[new_level].len() {
            let parent = self.levels[new_level][i].parent.unwrap();
            self.levels[bottom][parent].children.push(i);
        }
    }

    pub fn pop_bottom_level(&mut self) {
        assert!(self.levels.len() > 1, "cannot remove the root level");
        self.levels.pop();
        if let Some(bottom) = self.levels.last_mut() {
            for n in bottom.iter_mut() {
                n.children.clear();
            }
        }
    }
}

/// Index of the candidate closest to `f`, ties broken by facility id.
fn closest<T: Scalar>(
    instance: &Instance<T>,
    f: FacilityId,
    candidates: impl Iterator<Item = (usize, FacilityId)>,
) -> Option<usize> {
    let mut best: Option<(T, FacilityId, usize)> = None;
    for (i, c) in candidates {
        let d = instance.facility_dist(f, c);
        let better = match &best {
            None => true,
            Some((bd, bf, _)) => d < *bd || (d == *bd && c < *bf),
        };
        if better {
            best = Some((d, c, i));
        }
    }
    best.map(|(_, _, i)| i)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{line5, on_line};

    fn facility_sets(s: &Skeleton) -> Vec<Vec<usize>> {
        s.levels.iter().map(|l| l.iter().map(|n| n.facility.0).collect()).collect()
    }

    #[test]
    fn line5_is_a_chain_of_f0() {
        let inst = line5(10.0, 10.0);
        let s = Skeleton::build(&inst, &inst.derive_parameters(0));
        assert_eq!(facility_sets(&s), vec![vec![0], vec![0], vec![0]]);
        assert_eq!(s.levels[1][0].parent, Some(0));
        assert_eq!(s.levels[0][0].children, vec![0]);
    }

    #[test]
    fn single_facility_gives_a_path() {
        let inst = on_line::<f64>(&[0, 7, 400], &[(1, 1)]);
        let params = inst.derive_parameters(0);
        let s = Skeleton::build(&inst, &params);
        assert_eq!(s.levels.len(), params.delta as usize);
        assert!(s.levels.iter().all(|l| l.len() == 1 && l[0].facility == FacilityId(0)));
    }

    #[test]
    fn far_apart_facilities_separate_at_small_radius() {
        // 5^1 = 5 gives c1 * 5^r = 100 < 150.
        let inst = on_line::<f64>(&[0, 150], &[(0, 1), (1, 1)]);
        let params = inst.derive_parameters(0);
        let s = Skeleton::build(&inst, &params);
        assert_eq!(params.rho_min, 0);
        let level1 = &s.levels[s.level_index(1)];
        assert_eq!(level1.iter().map(|n| n.facility.0).collect::<Vec<_>>(), vec![0, 1]);
    }

    #[test]
    fn equidistant_parents_prefer_lower_id() {
        // F0 at 200 and F1 at 0 are both in J_1; F2 at 100 is 100 from each.
        let inst = on_line::<f64>(&[0, 100, 200], &[(2, 1), (0, 1), (1, 1)]);
        let params = inst.derive_parameters(0);
        assert_eq!((params.rho_min, params.rho_max), (0, 4));
        let s = Skeleton::build(&inst, &params);
        let level1 = &s.levels[s.level_index(1)];
        assert_eq!(level1.iter().map(|n| n.facility.0).collect::<Vec<_>>(), vec![0, 1]);
        let level0 = &s.levels[s.level_index(0)];
        let f2 = level0.iter().find(|n| n.facility == FacilityId(2)).unwrap();
        assert_eq!(level1[f2.parent.unwrap()].facility, FacilityId(0));
    }

    #[test]
    fn pushed_level_matches_fresh_build() {
        let inst =
            on_line::<f64>(&[0, 3, 30, 31, 90, 250, 400], &[(0, 1), (1, 1), (2, 2), (3, 2), (4, 3), (5, 1), (6, 9)]);
        let params = inst.derive_parameters(0);
        let mut s = Skeleton::build(&inst, &params);
        for _ in 0..3 {
            s.push_bottom_level(&inst);
            let mut lower = params;
            lower.rho_min = s.rho_min();
            lower.delta = (lower.rho_max - lower.rho_min + 1) as u32;
            assert_eq!(s, Skeleton::build(&inst, &lower));
        }
        s.pop_bottom_level();
        let mut lower = params;
        lower.rho_min = s.rho_min();
        lower.delta = (lower.rho_max - lower.rho_min + 1) as u32;
        assert_eq!(s, Skeleton::build(&inst, &lower));
    }
}
