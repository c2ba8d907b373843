use std::fmt::Write;

use super::{Hierarchy, NodeId};
use crate::scalar::Scalar;

/// One line per node, children indented under their parent.
pub(super) fn render<T: Scalar>(h: &Hierarchy<T>) -> String {
    let mut out = String::new();
    let mut stack = vec![(h.root(), 0usize)];
    while let Some((v, depth)) = stack.pop() {
        line(h, v, depth, &mut out);
        for &c in h.node(v).children.iter().rev() {
            stack.push((c, depth + 1));
        }
    }
    out
}

fn line<T: Scalar>(h: &Hierarchy<T>, v: NodeId, depth: usize, out: &mut String) {
    let n = h.node(v);
    let parent = n.parent.map_or_else(|| "-".to_string(), |p| h.node(p).facility.to_string());
    let _ = writeln!(
        out,
        "{:indent$}r={} s={} j={} parent={} f*={} j*={}",
        "",
        n.r,
        n.color,
        n.facility,
        parent,
        n.designated_cost,
        n.designated_facility,
        indent = 2 * depth
    );
}

#[cfg(test)]
mod tests {
    use crate::fixtures::line5;
    use crate::hierarchy::Hierarchy;

    #[test]
    fn line5_dump() {
        let inst = line5(10.0, 9.0);
        let h = Hierarchy::build(&inst, inst.derive_parameters(0));
        assert_eq!(
            h.dump(),
            "r=3 s=0 j=F0 parent=- f*=9 j*=F1\n  r=2 s=0 j=F0 parent=F0 f*=9 j*=F1\n    r=1 s=0 j=F0 parent=F0 f*=9 j*=F1\n"
        );
    }
}
