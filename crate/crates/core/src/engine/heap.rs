use std::cmp::Reverse;
use std::collections::BinaryHeap;

use crate::hierarchy::NodeId;
use crate::metric::FacilityId;

/// Lexicographic processing key: logradius, color, facility id.
pub type TripletKey = (i32, u32, FacilityId);

/// Min-heap of dirty triplets with deduplication on push and a record of
/// every node cleaned during the current update.
#[derive(Debug, Clone, Default)]
pub struct DirtyHeap {
    heap: BinaryHeap<Reverse<(TripletKey, NodeId)>>,
    queued: Vec<bool>,
    cleaned: Vec<bool>,
    cleaned_list: Vec<NodeId>,
    repeats: u64,
}

impl DirtyHeap {
    pub fn new(len: usize) -> Self {
        DirtyHeap {
            heap: BinaryHeap::new(),
            queued: vec![false; len],
            cleaned: vec![false; len],
            cleaned_list: Vec::new(),
            repeats: 0,
        }
    }

    pub fn resize(&mut self, len: usize) {
        *self = DirtyHeap::new(len);
    }

    /// Returns false when `v` is already queued.
    pub fn push(&mut self, v: NodeId, key: TripletKey) -> bool {
        if self.queued[v.0] {
            return false;
        }
        self.queued[v.0] = true;
        self.heap.push(Reverse((key, v)));
        true
    }

    /// Pulls the minimum node and marks it cleaned. A node cleaned twice in
    /// one update is counted in [`DirtyHeap::repeats`].
    pub fn pop(&mut self) -> Option<NodeId> {
        let Reverse((_, v)) = self.heap.pop()?;
        self.queued[v.0] = false;
        if self.cleaned[v.0] {
            self.repeats += 1;
        } else {
            self.cleaned[v.0] = true;
            self.cleaned_list.push(v);
        }
        Some(v)
    }

    pub fn is_empty(&self) -> bool {
        self.heap.is_empty()
    }

    /// Distinct nodes cleaned since the last [`DirtyHeap::finish`].
    pub fn cleaned(&self) -> &[NodeId] {
        &self.cleaned_list
    }

    pub fn repeats(&self) -> u64 {
        self.repeats
    }

    /// Ends an update: forgets the cleaned set and returns the repeat count.
    pub fn finish(&mut self) -> u64 {
        for v in self.cleaned_list.drain(..) {
            self.cleaned[v.0] = false;
        }
        std::mem::take(&mut self.repeats)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pops_in_key_order_and_dedupes() {
        let mut h = DirtyHeap::new(4);
        assert!(h.push(NodeId(2), (1, 0, FacilityId(5))));
        assert!(h.push(NodeId(0), (0, 1, FacilityId(3))));
        assert!(h.push(NodeId(1), (0, 1, FacilityId(2))));
        assert!(!h.push(NodeId(1), (0, 1, FacilityId(2))));
        let order: Vec<_> = std::iter::from_fn(|| h.pop()).collect();
        assert_eq!(order, vec![NodeId(1), NodeId(0), NodeId(2)]);
        assert_eq!(h.cleaned().len(), 3);
        assert_eq!(h.finish(), 0);
        assert!(h.cleaned().is_empty());
    }

    #[test]
    fn counts_repeated_cleaning() {
        let mut h = DirtyHeap::new(2);
        h.push(NodeId(0), (0, 0, FacilityId(0)));
        h.pop();
        h.push(NodeId(0), (0, 0, FacilityId(0)));
        h.pop();
        assert_eq!(h.repeats(), 1);
        assert_eq!(h.finish(), 1);
        h.push(NodeId(0), (0, 0, FacilityId(0)));
        h.pop();
        assert_eq!(h.finish(), 0);
    }
}
