use crate::metric::FacilityId;

/// Open facilities with O(1) insertion and removal.
///
/// A facility may be designated by several open triplets, so each one
/// carries a reference count and stays listed while the count is positive.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct OpenFacilityRegistry {
    list: Vec<FacilityId>,
    position: Vec<Option<usize>>,
    refcount: Vec<u32>,
}

impl OpenFacilityRegistry {
    pub fn new(num_facilities: usize) -> Self {
        OpenFacilityRegistry {
            list: Vec::new(),
            position: vec![None; num_facilities],
            refcount: vec![0; num_facilities],
        }
    }

    pub fn acquire(&mut self, f: FacilityId) {
        self.refcount[f.0] += 1;
        if self.refcount[f.0] == 1 {
            self.position[f.0] = Some(self.list.len());
            self.list.push(f);
        }
    }

    pub fn release(&mut self, f: FacilityId) {
        assert!(self.refcount[f.0] > 0, "releasing closed facility {f}");
        self.refcount[f.0] -= 1;
        if self.refcount[f.0] == 0 {
            let i = self.position[f.0].take().unwrap();
            self.list.swap_remove(i);
            if let Some(&moved) = self.list.get(i) {
                self.position[moved.0] = Some(i);
            }
        }
    }

    pub fn is_open(&self, f: FacilityId) -> bool {
        self.refcount[f.0] > 0
    }

    pub fn refcount(&self, f: FacilityId) -> u32 {
        self.refcount[f.0]
    }

    /// Open facilities in registry order.
    pub fn iter(&self) -> impl Iterator<Item = FacilityId> + '_ {
        self.list.iter().copied()
    }

    pub fn len(&self) -> usize {
        self.list.len()
    }

    pub fn is_empty(&self) -> bool {
        self.list.is_empty()
    }

    pub fn clear(&mut self) {
        self.list.clear();
        self.position.iter_mut().for_each(|p| *p = None);
        self.refcount.iter_mut().for_each(|c| *c = 0);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn refcounted_membership() {
        let mut r = OpenFacilityRegistry::new(3);
        r.acquire(FacilityId(1));
        r.acquire(FacilityId(2));
        r.acquire(FacilityId(1));
        assert_eq!(r.len(), 2);
        r.release(FacilityId(1));
        assert!(r.is_open(FacilityId(1)));
        r.release(FacilityId(1));
        assert!(!r.is_open(FacilityId(1)));
        assert_eq!(r.iter().collect::<Vec<_>>(), vec![FacilityId(2)]);
        r.acquire(FacilityId(0));
        r.release(FacilityId(2));
        assert_eq!(r.iter().collect::<Vec<_>>(), vec![FacilityId(0)]);
    }

    #[test]
    #[should_panic(expected = "releasing closed facility")]
    fn release_of_closed_facility_panics() {
        OpenFacilityRegistry::new(1).release(FacilityId(0));
    }
}
