use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum NodeStatus {
    Pending,
    Succeeded,
    Subdivided,
}

/// Node of the symmetric binary interval tree.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BitNode {
    pub c: f64,
    pub d: f64,
    pub depth: usize,
    pub status: NodeStatus,
}

impl BitNode {
    pub fn children(&self) -> [BitNode; 2] {
        let m = 0.5 * (self.c + self.d);
        let mk = |c, d| BitNode { c, d, depth: self.depth + 1, status: NodeStatus::Pending };
        [mk(self.c, m), mk(m, self.d)]
    }
}

/// Depth-first enumeration of BIT(a, b): a node is subdivided when `terminate`
/// declines it.
pub fn enumerate_bit(
    a: f64,
    b: f64,
    mut terminate: impl FnMut(f64, f64, usize) -> bool,
    depth_cap: usize,
) -> Result<Vec<BitNode>> {
    if !(a < b) {
        return Err(Error::InvalidParameter(format!("need a < b, got [{a}, {b}]")));
    }
    let mut out = Vec::new();
    let mut stack = vec![BitNode { c: a, d: b, depth: 0, status: NodeStatus::Pending }];
    while let Some(mut node) = stack.pop() {
        if node.depth > depth_cap {
            return Err(Error::DepthCap { cap: depth_cap });
        }
        if terminate(node.c, node.d, node.depth) {
            node.status = NodeStatus::Succeeded;
            out.push(node);
        } else {
            node.status = NodeStatus::Subdivided;
            let [l, r] = node.children();
            out.push(node);
            stack.push(r);
            stack.push(l);
        }
    }
    Ok(out)
}
