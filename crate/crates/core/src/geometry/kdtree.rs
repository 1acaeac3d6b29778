//! Exact k-d tree over a [`PointSet`] of any dimension.
//!
//! Nodes split at the median of the widest axis; leaves hold up to
//! `LEAF_SIZE` points copied into a contiguous buffer so scans stay in cache.

use super::cloud::{dist2, PointSet};

const LEAF_SIZE: usize = 16;

#[derive(Debug, Clone)]
enum Node {
    Leaf {
        start: usize,
        end: usize,
    },
    Split {
        axis: usize,
        value: f64,
        left: usize,
        right: usize,
    },
}

#[derive(Debug, Clone)]
pub struct KdTree {
    dim: usize,
    // points reordered into leaf order
    coords: Vec<f64>,
    ids: Vec<usize>,
    nodes: Vec<Node>,
}

impl KdTree {
    pub fn build(points: &PointSet) -> Self {
        let dim = points.dim();
        let mut order: Vec<usize> = (0..points.len()).collect();
        let mut nodes = Vec::new();
        if !order.is_empty() {
            build_node(points, &mut order, 0, &mut nodes);
        }
        let mut coords = Vec::with_capacity(points.coords().len());
        for &i in &order {
            coords.extend_from_slice(points.point(i));
        }
        KdTree {
            dim,
            coords,
            ids: order,
            nodes,
        }
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    /// Ids of all points with `‖p − query‖ ≤ radius`, in ascending id order.
    pub fn within_radius(&self, query: &[f64], radius: f64) -> Vec<usize> {
        let mut out = Vec::new();
        self.within_radius_into(query, radius, &mut out);
        out
    }

    pub fn within_radius_into(&self, query: &[f64], radius: f64, out: &mut Vec<usize>) {
        out.clear();
        if self.nodes.is_empty() {
            return;
        }
        let r2 = radius * radius;
        let mut stack = vec![0usize];
        while let Some(n) = stack.pop() {
            match self.nodes[n] {
                Node::Leaf { start, end } => {
                    for slot in start..end {
                        let p = &self.coords[slot * self.dim..(slot + 1) * self.dim];
                        if dist2(p, query) <= r2 {
                            out.push(self.ids[slot]);
                        }
                    }
                }
                Node::Split {
                    axis,
                    value,
                    left,
                    right,
                } => {
                    let delta = query[axis] - value;
                    if delta <= radius {
                        stack.push(left);
                    }
                    if delta >= -radius {
                        stack.push(right);
                    }
                }
            }
        }
        out.sort_unstable();
    }

    /// Nearest point to `query` as `(id, distance)`; ties go to the smaller id.
    pub fn nearest(&self, query: &[f64]) -> Option<(usize, f64)> {
        if self.nodes.is_empty() {
            return None;
        }
        let mut best = (usize::MAX, f64::INFINITY);
        self.nearest_rec(0, query, &mut best);
        Some((best.0, best.1.sqrt()))
    }

    fn nearest_rec(&self, n: usize, query: &[f64], best: &mut (usize, f64)) {
        match self.nodes[n] {
            Node::Leaf { start, end } => {
                for slot in start..end {
                    let p = &self.coords[slot * self.dim..(slot + 1) * self.dim];
                    let d2 = dist2(p, query);
                    let id = self.ids[slot];
                    if d2 < best.1 || (d2 == best.1 && id < best.0) {
                        *best = (id, d2);
                    }
                }
            }
            Node::Split {
                axis,
                value,
                left,
                right,
            } => {
                let delta = query[axis] - value;
                let (near, far) = if delta <= 0.0 {
                    (left, right)
                } else {
                    (right, left)
                };
                self.nearest_rec(near, query, best);
                if delta * delta <= best.1 {
                    self.nearest_rec(far, query, best);
                }
            }
        }
    }
}

fn build_node(points: &PointSet, order: &mut [usize], offset: usize, nodes: &mut Vec<Node>) -> usize {
    let id = nodes.len();
    if order.len() <= LEAF_SIZE {
        nodes.push(Node::Leaf {
            start: offset,
            end: offset + order.len(),
        });
        return id;
    }
    let dim = points.dim();
    let mut lo = vec![f64::INFINITY; dim];
    let mut hi = vec![f64::NEG_INFINITY; dim];
    for &i in order.iter() {
        for (k, &c) in points.point(i).iter().enumerate() {
            lo[k] = lo[k].min(c);
            hi[k] = hi[k].max(c);
        }
    }
    let axis = (0..dim)
        .max_by(|&a, &b| (hi[a] - lo[a]).total_cmp(&(hi[b] - lo[b])))
        .unwrap_or(0);
    if hi[axis] - lo[axis] <= 0.0 {
        // all points coincide
        nodes.push(Node::Leaf {
            start: offset,
            end: offset + order.len(),
        });
        return id;
    }
    let mid = order.len() / 2;
    order.select_nth_unstable_by(mid, |&a, &b| {
        points.point(a)[axis].total_cmp(&points.point(b)[axis])
    });
    let value = points.point(order[mid])[axis];
    nodes.push(Node::Leaf { start: 0, end: 0 });
    let (left_part, right_part) = order.split_at_mut(mid);
    // left holds coordinates <= value, right holds >= value
    let left = build_node(points, left_part, offset, nodes);
    let right = build_node(points, right_part, offset + mid, nodes);
    nodes[id] = Node::Split {
        axis,
        value,
        left,
        right,
    };
    id
}
