//! Compatibility graphs and the structural analyses the stability conditions
//! depend on: neighborhoods, independent sets, bipartiteness, separability
//! and spanning odd cycles.

use std::collections::VecDeque;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{MatchError, Result};

/// Item class, stored as an index into the graph's vertex list.
pub type Vertex = usize;

/// Graphs are capped at this many vertices so that subset enumeration stays
/// tractable.
pub const MAX_VERTICES: usize = 20;

/// A set of vertices, as a bitmask over vertex indices.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct VertexSet(pub u32);

impl VertexSet {
    pub const EMPTY: VertexSet = VertexSet(0);

    pub fn singleton(v: Vertex) -> Self {
        VertexSet(1 << v)
    }

    pub fn from_iter<I: IntoIterator<Item = Vertex>>(iter: I) -> Self {
        let mut mask = 0u32;
        for v in iter {
            mask |= 1 << v;
        }
        VertexSet(mask)
    }

    pub fn contains(&self, v: Vertex) -> bool {
        self.0 >> v & 1 == 1
    }

    pub fn insert(&mut self, v: Vertex) {
        self.0 |= 1 << v;
    }

    pub fn is_empty(&self) -> bool {
        self.0 == 0
    }

    pub fn len(&self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn union(&self, other: VertexSet) -> VertexSet {
        VertexSet(self.0 | other.0)
    }

    pub fn intersects(&self, other: VertexSet) -> bool {
        self.0 & other.0 != 0
    }

    pub fn is_subset_of(&self, other: VertexSet) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn iter(&self) -> impl Iterator<Item = Vertex> + '_ {
        let mask = self.0;
        (0..32usize).filter(move |v| mask >> v & 1 == 1)
    }
}

impl fmt::Debug for VertexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

/// A non-empty independent set, flagged maximal when no outside vertex can be
/// added.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IndependentSet {
    pub members: VertexSet,
    pub maximal: bool,
}

/// On-disk form: `{"vertices": [...], "edges": [[a,b], ...]}`.
#[derive(Serialize, Deserialize)]
struct GraphFile {
    vertices: Vec<String>,
    edges: Vec<(String, String)>,
}

/// A simple connected compatibility graph. Immutable after construction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CompatibilityGraph {
    names: Vec<String>,
    adj: Vec<u32>,
}

impl CompatibilityGraph {
    /// Builds a graph from vertex names (in order) and edges given by name.
    ///
    /// Rejects self-loops, duplicate vertices, unknown endpoints,
    /// disconnected graphs and graphs with more than [`MAX_VERTICES`]
    /// vertices. Parallel edges collapse silently.
    pub fn new<S: AsRef<str>>(vertices: &[S], edges: &[(S, S)]) -> Result<Self> {
        let names: Vec<String> = vertices.iter().map(|s| s.as_ref().to_string()).collect();
        if names.is_empty() {
            return Err(MatchError::InvalidGraph("no vertices".into()));
        }
        if names.len() > MAX_VERTICES {
            return Err(MatchError::InvalidGraph(format!(
                "{} vertices exceeds the cap of {MAX_VERTICES}",
                names.len()
            )));
        }
        for (i, a) in names.iter().enumerate() {
            if names[..i].contains(a) {
                return Err(MatchError::InvalidGraph(format!("duplicate vertex {a:?}")));
            }
        }
        let lookup = |name: &str| -> Result<usize> {
            names
                .iter()
                .position(|n| n == name)
                .ok_or_else(|| MatchError::UnknownVertex(name.to_string()))
        };
        let mut adj = vec![0u32; names.len()];
        for (a, b) in edges {
            let u = lookup(a.as_ref())?;
            let v = lookup(b.as_ref())?;
            if u == v {
                return Err(MatchError::InvalidGraph(format!(
                    "self-loop at {:?}",
                    a.as_ref()
                )));
            }
            adj[u] |= 1 << v;
            adj[v] |= 1 << u;
        }
        let g = CompatibilityGraph { names, adj };
        if !g.is_connected() {
            return Err(MatchError::InvalidGraph("graph is not connected".into()));
        }
        Ok(g)
    }

    /// Builds a graph on vertices named `"1".."n"` from 1-based index pairs.
    pub fn from_numbered(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let names: Vec<String> = (1..=n).map(|i| i.to_string()).collect();
        let edges: Vec<(String, String)> = edges
            .iter()
            .map(|&(a, b)| (a.to_string(), b.to_string()))
            .collect();
        Self::new(&names, &edges)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: GraphFile =
            serde_json::from_str(text).map_err(|e| MatchError::Parse(e.to_string()))?;
        Self::new(&file.vertices, &file.edges)
    }

    pub fn to_json(&self) -> String {
        let mut edges = Vec::new();
        for u in 0..self.len() {
            for v in (u + 1)..self.len() {
                if self.adjacent(u, v) {
                    edges.push((self.names[u].clone(), self.names[v].clone()));
                }
            }
        }
        serde_json::to_string(&GraphFile {
            vertices: self.names.clone(),
            edges,
        })
        .expect("graph serialization cannot fail")
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        false // constructor requires at least one vertex
    }

    pub fn vertices(&self) -> impl Iterator<Item = Vertex> {
        0..self.len()
    }

    pub fn all_vertices(&self) -> VertexSet {
        VertexSet((1u32 << self.len()) - 1)
    }

    pub fn name(&self, v: Vertex) -> &str {
        &self.names[v]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    /// Resolves a vertex name to its index.
    pub fn vertex(&self, name: &str) -> Result<Vertex> {
        self.names
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| MatchError::UnknownVertex(name.to_string()))
    }

    pub fn adjacent(&self, u: Vertex, v: Vertex) -> bool {
        self.adj[u] >> v & 1 == 1
    }

    /// Neighbor set of a single vertex, `E({v})`.
    pub fn neighbors(&self, v: Vertex) -> VertexSet {
        VertexSet(self.adj[v])
    }

    /// Neighbor list of a vertex in ascending order.
    pub fn neighbor_list(&self, v: Vertex) -> Vec<Vertex> {
        self.neighbors(v).iter().collect()
    }

    /// `E(U)`: the set of vertices adjacent to at least one member of `u`.
    pub fn neighborhood(&self, u: VertexSet) -> Result<VertexSet> {
        if !u.is_subset_of(self.all_vertices()) {
            return Err(MatchError::UnknownVertex(format!(
                "vertex index out of range in {u:?}"
            )));
        }
        let mut out = 0u32;
        for v in u.iter() {
            out |= self.adj[v];
        }
        Ok(VertexSet(out))
    }

    /// Whether `set` contains no pair of neighbors.
    pub fn is_independent(&self, set: VertexSet) -> bool {
        set.iter().all(|v| self.adj[v] & set.0 == 0)
    }

    fn is_connected(&self) -> bool {
        let mut seen = VertexSet::singleton(0);
        let mut queue = VecDeque::from([0usize]);
        while let Some(u) = queue.pop_front() {
            for v in self.neighbors(u).iter() {
                if !seen.contains(v) {
                    seen.insert(v);
                    queue.push_back(v);
                }
            }
        }
        seen == self.all_vertices()
    }

    /// All non-empty independent sets, each flagged maximal, ordered by size
    /// and then lexicographically on the member lists.
    pub fn independent_sets(&self) -> Vec<IndependentSet> {
        let n = self.len();
        let mut sets = Vec::new();
        for mask in 1u32..(1u32 << n) {
            let set = VertexSet(mask);
            if !self.is_independent(set) {
                continue;
            }
            let maximal = (0..n)
                .filter(|&v| !set.contains(v))
                .all(|v| self.adj[v] & set.0 != 0);
            sets.push(IndependentSet { members: set, maximal });
        }
        sets.sort_by_key(|s| {
            let members: Vec<Vertex> = s.members.iter().collect();
            (members.len(), members)
        });
        sets
    }

    /// BFS 2-coloring; `Some(colors)` iff the graph has no odd cycle.
    pub fn bipartition(&self) -> Option<Vec<u8>> {
        let mut color = vec![u8::MAX; self.len()];
        color[0] = 0;
        let mut queue = VecDeque::from([0usize]);
        while let Some(u) = queue.pop_front() {
            for v in self.neighbors(u).iter() {
                if color[v] == u8::MAX {
                    color[v] = 1 - color[u];
                    queue.push_back(v);
                } else if color[v] == color[u] {
                    return None;
                }
            }
        }
        Some(color)
    }

    pub fn is_bipartite(&self) -> bool {
        self.bipartition().is_some()
    }

    /// Partition into maximal independent sets with every cross pair
    /// adjacent, when one exists. The parts are the connected components of
    /// the complement graph; such a partition is valid iff each component is
    /// independent in the original graph.
    pub fn separability_order(&self) -> Option<(usize, Vec<VertexSet>)> {
        let n = self.len();
        let full = self.all_vertices();
        let mut part_of = vec![usize::MAX; n];
        let mut parts: Vec<VertexSet> = Vec::new();
        for start in 0..n {
            if part_of[start] != usize::MAX {
                continue;
            }
            let id = parts.len();
            let mut comp = VertexSet::singleton(start);
            part_of[start] = id;
            let mut queue = VecDeque::from([start]);
            while let Some(u) = queue.pop_front() {
                let non_neighbors = VertexSet(full.0 & !self.adj[u] & !(1 << u));
                for v in non_neighbors.iter() {
                    if part_of[v] == usize::MAX {
                        part_of[v] = id;
                        comp.insert(v);
                        queue.push_back(v);
                    }
                }
            }
            parts.push(comp);
        }
        if parts.len() < 2 || parts.iter().any(|&p| !self.is_independent(p)) {
            return None;
        }
        Some((parts.len(), parts))
    }

    /// Shortest odd closed walk through `root`, as a vertex sequence, found
    /// by BFS on the parity-doubled graph. A minimal odd closed walk is
    /// always a simple cycle.
    fn shortest_odd_cycle_through(&self, root: Vertex) -> Option<Vec<Vertex>> {
        let n = self.len();
        // State (v, parity); parent pointers for reconstruction.
        let mut dist = vec![[usize::MAX; 2]; n];
        let mut parent = vec![[usize::MAX; 2]; n];
        dist[root][0] = 0;
        let mut queue = VecDeque::from([(root, 0usize)]);
        while let Some((u, p)) = queue.pop_front() {
            for v in self.neighbors(u).iter() {
                let q = 1 - p;
                if dist[v][q] == usize::MAX {
                    dist[v][q] = dist[u][p] + 1;
                    parent[v][q] = u;
                    queue.push_back((v, q));
                }
            }
        }
        if dist[root][1] == usize::MAX {
            return None;
        }
        let mut walk = Vec::with_capacity(dist[root][1]);
        let (mut v, mut p) = (root, 1usize);
        while !(v == root && p == 0) {
            walk.push(parent[v][p]);
            v = parent[v][p];
            p = 1 - p;
        }
        walk.reverse(); // starts at root, implicit closing edge back to root
        Some(walk)
    }

    /// The shortest odd cycle, as a vertex sequence; a shortest odd cycle is
    /// always induced (a chord would close a shorter odd cycle).
    pub fn shortest_odd_cycle(&self) -> Option<Vec<Vertex>> {
        self.vertices()
            .filter_map(|r| self.shortest_odd_cycle_through(r))
            .min_by_key(|walk| (walk.len(), walk.clone()))
    }

    /// A closed walk of odd length visiting every vertex at least once, with
    /// consecutive vertices adjacent (including last-to-first); `None` iff
    /// the graph is bipartite.
    ///
    /// Starts from the shortest odd cycle (smallest root wins ties) and
    /// appends out-and-back shortest paths to uncovered vertices in
    /// ascending order, so the output is deterministic.
    pub fn spanning_odd_cycle(&self) -> Option<Vec<Vertex>> {
        if self.is_bipartite() {
            return None;
        }
        let cycle = self
            .shortest_odd_cycle()
            .expect("non-bipartite graph has an odd cycle");
        let start = cycle[0];
        let mut covered = VertexSet::from_iter(cycle.iter().copied());
        let mut walk = cycle;
        for target in self.vertices() {
            if covered.contains(target) {
                continue;
            }
            let path = self.shortest_path(start, target);
            for &v in &path[1..] {
                covered.insert(v);
            }
            // Excursion start -> target -> back, spliced before the closing
            // edge; adds an even number of steps so parity is preserved.
            walk.extend_from_slice(&path[..path.len() - 1]);
            walk.push(*path.last().unwrap());
            walk.extend(path[1..path.len() - 1].iter().rev());
        }
        debug_assert!(walk.len() % 2 == 1);
        Some(walk)
    }

    /// Shortest path between two vertices (BFS, neighbors visited in
    /// ascending order), endpoints included.
    pub fn shortest_path(&self, from: Vertex, to: Vertex) -> Vec<Vertex> {
        let mut parent = vec![usize::MAX; self.len()];
        let mut seen = VertexSet::singleton(from);
        let mut queue = VecDeque::from([from]);
        while let Some(u) = queue.pop_front() {
            if u == to {
                break;
            }
            for v in self.neighbors(u).iter() {
                if !seen.contains(v) {
                    seen.insert(v);
                    parent[v] = u;
                    queue.push_back(v);
                }
            }
        }
        let mut path = vec![to];
        let mut v = to;
        while v != from {
            v = parent[v];
            path.push(v);
        }
        path.reverse();
        path
    }

    pub fn distance(&self, from: Vertex, to: Vertex) -> usize {
        self.shortest_path(from, to).len() - 1
    }

    /// Formats a vertex set using vertex names, e.g. `{1,3}`.
    pub fn format_set(&self, set: VertexSet) -> String {
        let names: Vec<&str> = set.iter().map(|v| self.name(v)).collect();
        format!("{{{}}}", names.join(","))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn paw() -> CompatibilityGraph {
        CompatibilityGraph::from_numbered(4, &[(1, 2), (2, 3), (2, 4), (3, 4)]).unwrap()
    }

    fn k3() -> CompatibilityGraph {
        CompatibilityGraph::from_numbered(3, &[(1, 2), (1, 3), (2, 3)]).unwrap()
    }

    fn single_edge() -> CompatibilityGraph {
        CompatibilityGraph::from_numbered(2, &[(1, 2)]).unwrap()
    }

    fn weak6() -> CompatibilityGraph {
        CompatibilityGraph::from_numbered(
            6,
            &[
                (1, 2),
                (1, 3),
                (1, 5),
                (1, 6),
                (2, 3),
                (2, 4),
                (2, 6),
                (3, 4),
                (3, 5),
                (4, 5),
                (4, 6),
                (5, 6),
            ],
        )
        .unwrap()
    }

    fn set(g: &CompatibilityGraph, names: &[&str]) -> VertexSet {
        VertexSet::from_iter(names.iter().map(|n| g.vertex(n).unwrap()))
    }

    #[test]
    fn rejects_disconnected_and_self_loops() {
        assert!(CompatibilityGraph::from_numbered(3, &[(1, 2)]).is_err());
        assert!(CompatibilityGraph::from_numbered(2, &[(1, 1), (1, 2)]).is_err());
        assert!(CompatibilityGraph::new(&["a", "a"], &[("a", "a")]).is_err());
    }

    #[test]
    fn neighborhood_on_paw() {
        let g = paw();
        assert_eq!(g.neighborhood(set(&g, &["1"])).unwrap(), set(&g, &["2"]));
        assert_eq!(g.neighborhood(VertexSet::EMPTY).unwrap(), VertexSet::EMPTY);
        assert_eq!(
            g.neighborhood(set(&g, &["1", "3"])).unwrap(),
            set(&g, &["2", "4"])
        );
        assert!(g.neighborhood(VertexSet(1 << 10)).is_err());
    }

    #[test]
    fn independent_sets_on_paw() {
        let g = paw();
        let sets = g.independent_sets();
        let listed: Vec<(VertexSet, bool)> = sets.iter().map(|s| (s.members, s.maximal)).collect();
        assert_eq!(
            listed,
            vec![
                (set(&g, &["1"]), false),
                (set(&g, &["2"]), true),
                (set(&g, &["3"]), false),
                (set(&g, &["4"]), false),
                (set(&g, &["1", "3"]), true),
                (set(&g, &["1", "4"]), true),
            ]
        );
    }

    #[test]
    fn independent_sets_on_complete_graphs() {
        let g = k3();
        let sets = g.independent_sets();
        assert_eq!(sets.len(), 3);
        assert!(sets.iter().all(|s| s.maximal && s.members.len() == 1));

        let e = single_edge();
        let sets = e.independent_sets();
        assert_eq!(sets.len(), 2);
        assert!(sets.iter().all(|s| s.maximal));
    }

    #[test]
    fn bipartiteness() {
        assert!(!paw().is_bipartite());
        assert!(single_edge().is_bipartite());
        assert!(!weak6().is_bipartite());
        let coloring = single_edge().bipartition().unwrap();
        assert_ne!(coloring[0], coloring[1]);
    }

    #[test]
    fn separability() {
        let g = weak6();
        let (p, parts) = g.separability_order().unwrap();
        assert_eq!(p, 3);
        assert_eq!(
            parts,
            vec![set(&g, &["1", "4"]), set(&g, &["2", "5"]), set(&g, &["3", "6"])]
        );
        assert!(paw().separability_order().is_none());
        let (p, parts) = k3().separability_order().unwrap();
        assert_eq!(p, 3);
        assert_eq!(parts.len(), 3);
        // Every cross pair in distinct parts is adjacent.
        for (i, a) in parts.iter().enumerate() {
            for (j, b) in parts.iter().enumerate() {
                if i == j {
                    continue;
                }
                for u in a.iter() {
                    for v in b.iter() {
                        assert!(k3().adjacent(u, v));
                    }
                }
            }
        }
    }

    #[test]
    fn spanning_odd_cycle_on_paw() {
        let g = paw();
        let walk = g.spanning_odd_cycle().unwrap();
        let names: Vec<&str> = walk.iter().map(|&v| g.name(v)).collect();
        assert_eq!(names, vec!["2", "3", "4", "2", "1"]);
    }

    #[test]
    fn spanning_odd_cycle_edges_and_parity() {
        for g in [paw(), k3(), weak6()] {
            let walk = g.spanning_odd_cycle().unwrap();
            assert_eq!(walk.len() % 2, 1);
            let mut covered = VertexSet::EMPTY;
            for i in 0..walk.len() {
                covered.insert(walk[i]);
                let next = walk[(i + 1) % walk.len()];
                assert!(g.adjacent(walk[i], next), "walk edge {i} missing");
            }
            assert_eq!(covered, g.all_vertices());
        }
        assert!(single_edge().spanning_odd_cycle().is_none());
    }

    #[test]
    fn k3_spanning_cycle_is_triangle() {
        let walk = k3().spanning_odd_cycle().unwrap();
        assert_eq!(walk.len(), 3);
    }

    #[test]
    fn json_round_trip() {
        let g = paw();
        let g2 = CompatibilityGraph::from_json(&g.to_json()).unwrap();
        assert_eq!(g, g2);
    }
}
