//! Right-continuous piecewise trajectories with recorded left limits at atoms.

use crate::vector::VectorSpace;

#[derive(Debug, Clone, PartialEq)]
pub struct Node<V> {
    pub t: f64,
    pub y: V,
    /// Time derivative of the continuous branch through this node.
    pub dy: V,
    /// `true` for the left limit stored at an atom time.
    pub left: bool,
}

/// Nodes sorted by time; at an atom the left-limit node precedes the value node.
#[derive(Debug, Clone, PartialEq)]
pub struct StieltjesTrajectory<V> {
    nodes: Vec<Node<V>>,
}

impl<V: VectorSpace> StieltjesTrajectory<V> {
    /// Builds a trajectory from nodes in ascending order.
    pub fn from_nodes(nodes: Vec<Node<V>>) -> Self {
        debug_assert!(nodes.windows(2).all(|w| w[0].t < w[1].t || (w[0].t == w[1].t && w[0].left && !w[1].left)));
        StieltjesTrajectory { nodes }
    }

    pub fn nodes(&self) -> &[Node<V>] {
        &self.nodes
    }

    /// Distinct node times in ascending order.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut ts: Vec<f64> = self.nodes.iter().map(|n| n.t).collect();
        ts.dedup();
        ts
    }

    pub fn start(&self) -> f64 {
        self.nodes.first().map(|n| n.t).unwrap_or(f64::NAN)
    }

    pub fn end(&self) -> f64 {
        self.nodes.last().map(|n| n.t).unwrap_or(f64::NAN)
    }

    /// Value stored exactly at a node time (the right value at atoms).
    pub fn at_node(&self, t: f64) -> Option<&V> {
        let i = self.nodes.partition_point(|n| n.t <= t);
        (i > 0 && self.nodes[i - 1].t == t).then(|| &self.nodes[i - 1].y)
    }

    /// Left limit recorded at an atom time.
    pub fn left_limit(&self, t: f64) -> Option<&V> {
        self.nodes.iter().find(|n| n.t == t && n.left).map(|n| &n.y)
    }

    /// Value at `t` by cubic Hermite interpolation between neighbouring nodes.
    pub fn value(&self, t: f64) -> Option<V> {
        if self.nodes.is_empty() || t < self.start() || t > self.end() {
            return None;
        }
        if let Some(v) = self.at_node(t) {
            return Some(v.clone());
        }
        let hi = self.nodes.partition_point(|n| n.t <= t);
        let (n0, n1) = (&self.nodes[hi - 1], &self.nodes[hi]);
        let h = n1.t - n0.t;
        let s = (t - n0.t) / h;
        let (s2, s3) = (s * s, s * s * s);
        let mut y = n0.y.clone();
        y.scale(2.0 * s3 - 3.0 * s2 + 1.0);
        y.axpy(h * (s3 - 2.0 * s2 + s), &n0.dy);
        y.axpy(-2.0 * s3 + 3.0 * s2, &n1.y);
        y.axpy(h * (s3 - s2), &n1.dy);
        Some(y)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn node(t: f64, y: f64, dy: f64, left: bool) -> Node<f64> {
        Node { t, y, dy, left }
    }

    #[test]
    fn hermite_is_exact_for_cubics() {
        let p = |t: f64| t * t * t - t;
        let dp = |t: f64| 3.0 * t * t - 1.0;
        let tr = StieltjesTrajectory::from_nodes(vec![node(0.0, p(0.0), dp(0.0), false), node(2.0, p(2.0), dp(2.0), false)]);
        assert!((tr.value(0.7).unwrap() - p(0.7)).abs() < 1e-14);
    }

    #[test]
    fn atoms_are_right_continuous() {
        let tr = StieltjesTrajectory::from_nodes(vec![
            node(0.0, 1.0, 0.0, false),
            node(1.0, 1.0, 0.0, true),
            node(1.0, 3.0, 0.0, false),
            node(2.0, 3.0, 0.0, false),
        ]);
        assert_eq!(tr.value(1.0), Some(3.0));
        assert_eq!(tr.left_limit(1.0), Some(&1.0));
        assert!((tr.value(1.0 - 1e-9).unwrap() - 1.0).abs() < 1e-12);
        assert!((tr.value(1.0 + 1e-9).unwrap() - 3.0).abs() < 1e-12);
        assert_eq!(tr.breakpoints(), vec![0.0, 1.0, 2.0]);
        assert_eq!(tr.value(2.5), None);
    }
}
