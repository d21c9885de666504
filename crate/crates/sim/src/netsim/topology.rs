use std::collections::VecDeque;
use std::f64::consts::PI;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::rng::{stream, Stream};
use crate::NodeId;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn distance(self, other: Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

/// Node placement in a rectangle with unit-disk connectivity.
///
/// Two distinct nodes are adjacent iff their distance is at most
/// `radio_range`. Graphs built with [`Topology::from_edges`] carry a fixed
/// adjacency instead and ignore positions.
#[derive(Debug, Clone, PartialEq)]
pub struct Topology {
    positions: Vec<Point>,
    radio_range: f64,
    width: f64,
    height: f64,
    adjacency: Vec<Vec<NodeId>>,
    fixed: bool,
}

impl Topology {
    pub fn from_positions(positions: Vec<Point>, radio_range: f64, width: f64, height: f64) -> Self {
        let mut topo = Self {
            adjacency: vec![Vec::new(); positions.len()],
            positions,
            radio_range,
            width,
            height,
            fixed: false,
        };
        topo.refresh();
        topo
    }

    /// `n` uniformly placed nodes; the same seed always yields the same layout.
    pub fn generate(n: usize, width: f64, height: f64, radio_range: f64, seed: u64) -> Self {
        let mut rng = stream(seed, Stream::Placement);
        let positions = (0..n)
            .map(|_| Point::new(rng.gen::<f64>() * width, rng.gen::<f64>() * height))
            .collect();
        Self::from_positions(positions, radio_range, width, height)
    }

    /// An abstract graph with the given undirected edges.
    pub fn from_edges(n: usize, edges: &[(NodeId, NodeId)]) -> Self {
        let mut adjacency = vec![Vec::new(); n];
        for &(a, b) in edges {
            if a != b && !adjacency[a].contains(&b) {
                adjacency[a].push(b);
                adjacency[b].push(a);
            }
        }
        for list in &mut adjacency {
            list.sort_unstable();
        }
        Self {
            positions: vec![Point::default(); n],
            radio_range: 0.0,
            width: 0.0,
            height: 0.0,
            adjacency,
            fixed: true,
        }
    }

    /// Nodes on a straight line `spacing` metres apart.
    pub fn chain(n: usize, spacing: f64, radio_range: f64) -> Self {
        let positions = (0..n).map(|i| Point::new(i as f64 * spacing, 0.0)).collect();
        Self::from_positions(positions, radio_range, (n.max(1) - 1) as f64 * spacing, 0.0)
    }

    /// Row-major `rows x cols` grid; with `radio_range == spacing` only the
    /// four axis neighbours are adjacent.
    pub fn grid(rows: usize, cols: usize, spacing: f64, radio_range: f64) -> Self {
        let positions = (0..rows * cols)
            .map(|i| Point::new((i % cols) as f64 * spacing, (i / cols) as f64 * spacing))
            .collect();
        Self::from_positions(
            positions,
            radio_range,
            (cols.max(1) - 1) as f64 * spacing,
            (rows.max(1) - 1) as f64 * spacing,
        )
    }

    /// `n` nodes on a circle where each node reaches exactly its two
    /// neighbours along the circle (2-regular), for `n >= 5`.
    pub fn ring(n: usize, radio_range: f64) -> Self {
        let chord = radio_range * 0.9;
        let radius = chord / (2.0 * (PI / n as f64).sin());
        let positions = (0..n)
            .map(|i| {
                let a = 2.0 * PI * i as f64 / n as f64;
                Point::new(radius * (1.0 + a.cos()), radius * (1.0 + a.sin()))
            })
            .collect();
        Self::from_positions(positions, radio_range, 2.0 * radius, 2.0 * radius)
    }

    /// `n` nodes packed well within range of each other.
    pub fn complete(n: usize, radio_range: f64) -> Self {
        let r = radio_range * 0.25;
        let positions = (0..n)
            .map(|i| {
                let a = 2.0 * PI * i as f64 / n.max(1) as f64;
                Point::new(r * (1.0 + a.cos()), r * (1.0 + a.sin()))
            })
            .collect();
        Self::from_positions(positions, radio_range, 2.0 * r, 2.0 * r)
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn radio_range(&self) -> f64 {
        self.radio_range
    }

    pub fn area(&self) -> (f64, f64) {
        (self.width, self.height)
    }

    pub fn position(&self, node: NodeId) -> Point {
        self.positions[node]
    }

    pub fn positions(&self) -> &[Point] {
        &self.positions
    }

    pub fn neighbors(&self, node: NodeId) -> &[NodeId] {
        &self.adjacency[node]
    }

    pub fn adjacency(&self) -> &[Vec<NodeId>] {
        &self.adjacency
    }

    pub fn degree(&self, node: NodeId) -> usize {
        self.adjacency[node].len()
    }

    pub fn is_adjacent(&self, a: NodeId, b: NodeId) -> bool {
        self.adjacency[a].binary_search(&b).is_ok()
    }

    pub fn mean_degree(&self) -> f64 {
        if self.is_empty() {
            return 0.0;
        }
        self.adjacency.iter().map(Vec::len).sum::<usize>() as f64 / self.len() as f64
    }

    /// Moves one node and refreshes adjacency.
    pub fn set_position(&mut self, node: NodeId, p: Point) {
        self.positions[node] = p;
        self.refresh();
    }

    pub(crate) fn positions_mut(&mut self) -> &mut [Point] {
        &mut self.positions
    }

    /// Recomputes unit-disk adjacency from the current positions.
    pub fn refresh(&mut self) {
        if self.fixed {
            return;
        }
        let n = self.positions.len();
        let r = self.radio_range;
        for list in &mut self.adjacency {
            list.clear();
        }
        for a in 0..n {
            for b in a + 1..n {
                if self.positions[a].distance(self.positions[b]) <= r {
                    self.adjacency[a].push(b);
                    self.adjacency[b].push(a);
                }
            }
        }
    }

    /// Breadth-first depths from `source`; unreachable nodes are `None`.
    pub fn bfs_depths(&self, source: NodeId) -> Vec<Option<u32>> {
        self.bfs_tree(source).0
    }

    /// BFS depths and parents. Neighbours are visited in id order, so each
    /// node's parent is its lowest-id neighbour one level up that was
    /// dequeued first.
    pub fn bfs_tree(&self, source: NodeId) -> (Vec<Option<u32>>, Vec<Option<NodeId>>) {
        let mut depth = vec![None; self.len()];
        let mut parent = vec![None; self.len()];
        depth[source] = Some(0);
        let mut queue = VecDeque::from([source]);
        while let Some(u) = queue.pop_front() {
            let d = depth[u].unwrap();
            for &v in &self.adjacency[u] {
                if depth[v].is_none() {
                    depth[v] = Some(d + 1);
                    parent[v] = Some(u);
                    queue.push_back(v);
                }
            }
        }
        (depth, parent)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_node_has_no_edges() {
        let t = Topology::generate(1, 100.0, 100.0, 250.0, 3);
        assert_eq!(t.degree(0), 0);
    }

    #[test]
    fn close_pair_is_one_symmetric_edge() {
        let t = Topology::from_positions(vec![Point::new(0.0, 0.0), Point::new(100.0, 0.0)], 250.0, 200.0, 200.0);
        assert_eq!(t.neighbors(0), &[1]);
        assert_eq!(t.neighbors(1), &[0]);
    }

    #[test]
    fn generation_is_deterministic() {
        let a = Topology::generate(50, 1000.0, 1000.0, 250.0, 7);
        let b = Topology::generate(50, 1000.0, 1000.0, 250.0, 7);
        assert_eq!(a.adjacency(), b.adjacency());
        assert_eq!(a.positions(), b.positions());
        let c = Topology::generate(50, 1000.0, 1000.0, 250.0, 8);
        assert_ne!(a.positions(), c.positions());
    }

    #[test]
    fn adjacency_symmetric_and_irreflexive() {
        let t = Topology::generate(40, 600.0, 600.0, 200.0, 11);
        for a in 0..t.len() {
            assert!(!t.is_adjacent(a, a));
            for &b in t.neighbors(a) {
                assert!(t.is_adjacent(b, a));
            }
        }
    }

    #[test]
    fn constructed_shapes() {
        let ring = Topology::ring(7, 100.0);
        assert!((0..7).all(|v| ring.degree(v) == 2));
        let k4 = Topology::complete(4, 100.0);
        assert!((0..4).all(|v| k4.degree(v) == 3));
        let grid = Topology::grid(3, 3, 100.0, 100.0);
        assert_eq!(grid.neighbors(4), &[1, 3, 5, 7]);
        assert_eq!(grid.degree(0), 2);
        let chain = Topology::chain(3, 100.0, 150.0);
        assert_eq!(chain.bfs_depths(0), vec![Some(0), Some(1), Some(2)]);
    }
}
