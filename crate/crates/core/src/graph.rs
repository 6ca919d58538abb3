//! Immutable simple undirected graphs.
//!
//! A [`Graph`] stores a deduplicated, self-loop-free edge list in canonical
//! order — each edge as `(min, max)`, the list sorted lexicographically — so
//! that an edge's position in the list is a stable [`EdgeId`] shared by every
//! per-edge vector in the crate (curvature values, drop scores, …).
//! Adjacency lists are kept sorted, which makes common-neighbor queries a
//! linear merge and membership tests a binary search.
//!
//! Graphs are never mutated. Structural edits are expressed as a
//! [`RewiredView`]: a base graph plus a set of dropped edge ids and added
//! node pairs, materializable into a fresh `Graph`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Node index, `0..n`.
pub type NodeId = usize;

/// Position of an edge in the canonical edge list of a [`Graph`].
#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct EdgeId(pub usize);

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("node index {node} out of range for a graph on {n} nodes")]
    NodeOutOfRange { node: usize, n: usize },
    #[error("edge list parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("graph is disconnected")]
    Disconnected,
    #[error("graph has no nodes")]
    Empty,
    #[error("edge ({u}, {v}) is not present in the graph")]
    MissingEdge { u: usize, v: usize },
    #[error("edge id {0} out of range ({1} edges)")]
    EdgeIdOutOfRange(usize, usize),
    #[error("duplicate dropped edge id {0}")]
    DuplicateDrop(usize),
    #[error("added edge ({u}, {v}) already exists in the base graph")]
    AddExisting { u: usize, v: usize },
    #[error("duplicate added edge ({u}, {v})")]
    DuplicateAdd { u: usize, v: usize },
    #[error("self-loop ({0}, {0}) cannot be added")]
    SelfLoop(usize),
}

/// Immutable simple undirected graph with canonical edge indexing.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    /// Canonical edge list: each `(u, v)` with `u < v`, sorted lexicographically.
    edges: Vec<(NodeId, NodeId)>,
    /// Sorted neighbor lists.
    adj: Vec<Vec<NodeId>>,
}

impl Graph {
    /// Builds a graph on `n` nodes from an arbitrary edge list.
    ///
    /// Self-loops are discarded and duplicate edges (in either orientation)
    /// are collapsed. Node indices must be `< n`.
    pub fn from_edge_list(n: usize, raw: &[(usize, usize)]) -> Result<Self, GraphError> {
        let mut edges = Vec::with_capacity(raw.len());
        for &(a, b) in raw {
            if a >= n {
                return Err(GraphError::NodeOutOfRange { node: a, n });
            }
            if b >= n {
                return Err(GraphError::NodeOutOfRange { node: b, n });
            }
            if a == b {
                continue; // self-loops are dropped
            }
            edges.push((a.min(b), a.max(b)));
        }
        edges.sort_unstable();
        edges.dedup();
        Ok(Self::from_canonical(n, edges))
    }

    /// Builds from an edge list already in canonical form (each pair
    /// `(min, max)`, sorted, deduplicated, indices in range).
    pub(crate) fn from_canonical(n: usize, edges: Vec<(NodeId, NodeId)>) -> Self {
        debug_assert!(edges.windows(2).all(|w| w[0] < w[1]), "edges not canonical");
        debug_assert!(edges.iter().all(|&(u, v)| u < v && v < n));
        let mut adj = vec![Vec::new(); n];
        for &(u, v) in &edges {
            adj[u].push(v);
            adj[v].push(u);
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        Graph { n, edges, adj }
    }

    /// Parses the plain-text edge-list format: one edge per line as two
    /// whitespace-separated 0-based node indices; `#`-prefixed comment lines
    /// and blank lines are ignored; an optional `n=<count>` line pins the
    /// node count (otherwise it is inferred as max index + 1).
    pub fn parse_edge_list(text: &str) -> Result<Self, GraphError> {
        let (pairs, header_n) = parse_edge_pairs(text)?;
        let inferred = pairs
            .iter()
            .map(|&(a, b)| a.max(b) + 1)
            .max()
            .unwrap_or(0);
        let n = header_n.unwrap_or(inferred);
        Self::from_edge_list(n, &pairs)
    }

    /// Serializes to the edge-list text format parsed by
    /// [`Graph::parse_edge_list`], including the `n=` header so isolated
    /// trailing nodes survive a round-trip.
    pub fn to_edge_list_string(&self) -> String {
        let mut out = String::with_capacity(8 + self.edges.len() * 8);
        out.push_str(&format!("n={}\n", self.n));
        for &(u, v) in &self.edges {
            out.push_str(&format!("{u} {v}\n"));
        }
        out
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    /// Canonical edge list.
    pub fn edges(&self) -> &[(NodeId, NodeId)] {
        &self.edges
    }

    pub fn endpoints(&self, e: EdgeId) -> Result<(NodeId, NodeId), GraphError> {
        self.edges
            .get(e.0)
            .copied()
            .ok_or(GraphError::EdgeIdOutOfRange(e.0, self.edges.len()))
    }

    /// Sorted neighbors of `u`.
    pub fn neighbors(&self, u: NodeId) -> &[NodeId] {
        &self.adj[u]
    }

    pub fn degree(&self, u: NodeId) -> usize {
        self.adj[u].len()
    }

    /// Sum of all degrees (= 2|E|).
    pub fn volume(&self) -> usize {
        2 * self.edges.len()
    }

    /// `(dmin, dmax)` over all nodes; `None` for the empty graph.
    pub fn degree_extremes(&self) -> Option<(usize, usize)> {
        if self.n == 0 {
            return None;
        }
        let mut dmin = usize::MAX;
        let mut dmax = 0;
        for list in &self.adj {
            dmin = dmin.min(list.len());
            dmax = dmax.max(list.len());
        }
        Some((dmin, dmax))
    }

    pub fn contains_edge(&self, u: NodeId, v: NodeId) -> bool {
        if u >= self.n || v >= self.n || u == v {
            return false;
        }
        self.adj[u].binary_search(&v).is_ok()
    }

    /// Canonical index of edge `(u, v)` (order-insensitive).
    pub fn edge_index(&self, u: NodeId, v: NodeId) -> Option<EdgeId> {
        let key = (u.min(v), u.max(v));
        self.edges.binary_search(&key).ok().map(EdgeId)
    }

    /// Number of triangles through the node pair `(u, v)`, i.e.
    /// `|N(u) ∩ N(v)|`. Linear merge over the sorted adjacency lists.
    pub fn triangles_at(&self, u: NodeId, v: NodeId) -> usize {
        let (a, b) = (&self.adj[u], &self.adj[v]);
        let (mut i, mut j, mut count) = (0, 0, 0);
        while i < a.len() && j < b.len() {
            match a[i].cmp(&b[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    count += 1;
                    i += 1;
                    j += 1;
                }
            }
        }
        count
    }

    /// Sorted list of common neighbors of `u` and `v`.
    pub fn common_neighbors(&self, u: NodeId, v: NodeId) -> Vec<NodeId> {
        let (a, b) = (&self.adj[u], &self.adj[v]);
        let (mut i, mut j) = (0, 0);
        let mut out = Vec::new();
        while i < a.len() && j < b.len() {
            match a[i].cmp(&b[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    out.push(a[i]);
                    i += 1;
                    j += 1;
                }
            }
        }
        out
    }

    /// BFS hop distances from `src`; `None` for unreachable nodes.
    pub fn bfs_distances(&self, src: NodeId) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.n];
        let mut queue = std::collections::VecDeque::new();
        dist[src] = Some(0);
        queue.push_back(src);
        while let Some(u) = queue.pop_front() {
            let du = dist[u].unwrap();
            for &v in &self.adj[u] {
                if dist[v].is_none() {
                    dist[v] = Some(du + 1);
                    queue.push_back(v);
                }
            }
        }
        dist
    }

    /// Connected components as sorted node lists, ordered by smallest member.
    pub fn connected_components(&self) -> Vec<Vec<NodeId>> {
        let mut seen = vec![false; self.n];
        let mut components = Vec::new();
        for start in 0..self.n {
            if seen[start] {
                continue;
            }
            let mut comp = vec![start];
            seen[start] = true;
            let mut head = 0;
            while head < comp.len() {
                let u = comp[head];
                head += 1;
                for &v in &self.adj[u] {
                    if !seen[v] {
                        seen[v] = true;
                        comp.push(v);
                    }
                }
            }
            comp.sort_unstable();
            components.push(comp);
        }
        components
    }

    pub fn is_connected(&self) -> bool {
        self.n <= 1 || self.connected_components().len() == 1
    }

    /// Largest connected component as a new graph, with nodes renumbered in
    /// ascending original order, plus the old→new index map. Ties between
    /// equal-sized components go to the one containing the smallest node
    /// index.
    pub fn largest_connected_component(&self) -> Result<(Graph, Vec<Option<usize>>), GraphError> {
        if self.n == 0 {
            return Err(GraphError::Empty);
        }
        let components = self.connected_components();
        // components are ordered by smallest member, so a strict `>` keeps
        // the earliest component on ties.
        let best = components
            .iter()
            .enumerate()
            .max_by(|(ia, a), (ib, b)| a.len().cmp(&b.len()).then(ib.cmp(ia)))
            .map(|(i, _)| i)
            .unwrap();
        let keep = &components[best];
        let mut map = vec![None; self.n];
        for (new, &old) in keep.iter().enumerate() {
            map[old] = Some(new);
        }
        let edges = self
            .edges
            .iter()
            .filter_map(|&(u, v)| match (map[u], map[v]) {
                (Some(a), Some(b)) => Some((a, b)),
                _ => None,
            })
            .collect();
        // Renumbering is monotone, so canonical order is preserved.
        Ok((Graph::from_canonical(keep.len(), edges), map))
    }

    /// Exact diameter in hops. Errors on disconnected or empty graphs.
    pub fn diameter(&self) -> Result<usize, GraphError> {
        if self.n == 0 {
            return Err(GraphError::Empty);
        }
        let mut best = 0;
        for src in 0..self.n {
            for d in self.bfs_distances(src) {
                match d {
                    Some(d) => best = best.max(d),
                    None => return Err(GraphError::Disconnected),
                }
            }
        }
        Ok(best)
    }

    /// True iff every connected component is 2-colorable.
    pub fn is_bipartite(&self) -> bool {
        let mut color: Vec<Option<bool>> = vec![None; self.n];
        for start in 0..self.n {
            if color[start].is_some() {
                continue;
            }
            color[start] = Some(false);
            let mut queue = std::collections::VecDeque::from([start]);
            while let Some(u) = queue.pop_front() {
                let cu = color[u].unwrap();
                for &v in &self.adj[u] {
                    match color[v] {
                        None => {
                            color[v] = Some(!cu);
                            queue.push_back(v);
                        }
                        Some(cv) if cv == cu => return false,
                        Some(_) => {}
                    }
                }
            }
        }
        true
    }

    /// Order-independent structural fingerprint (FNV-1a over the node count
    /// and the canonical edge list). Stable across runs and platforms; used
    /// to detect mismatches between a graph and artifacts derived from it.
    pub fn fingerprint(&self) -> u64 {
        const OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
        const PRIME: u64 = 0x0000_0100_0000_01b3;
        let mut h = OFFSET;
        let mut absorb = |x: u64| {
            for byte in x.to_le_bytes() {
                h ^= u64::from(byte);
                h = h.wrapping_mul(PRIME);
            }
        };
        absorb(self.n as u64);
        for &(u, v) in &self.edges {
            absorb(u as u64);
            absorb(v as u64);
        }
        h
    }
}

fn parse_usize(tok: &str, line: usize) -> Result<usize, GraphError> {
    tok.parse::<usize>().map_err(|e| GraphError::Parse {
        line,
        msg: format!("invalid node index {tok:?}: {e}"),
    })
}

/// Parses edge-list text into raw pairs plus the optional `n=<count>` header.
/// Shared by [`Graph::parse_edge_list`] and the dataset loader (which pins
/// the node count from the label file instead).
pub fn parse_edge_pairs(
    text: &str,
) -> Result<(Vec<(usize, usize)>, Option<usize>), GraphError> {
    let mut pairs = Vec::new();
    let mut header_n = None;
    for (idx, raw_line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw_line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if let Some(rest) = line.strip_prefix("n=") {
            let n = rest.trim().parse::<usize>().map_err(|e| GraphError::Parse {
                line: line_no,
                msg: format!("invalid node count {rest:?}: {e}"),
            })?;
            header_n = Some(n);
            continue;
        }
        let mut tokens = line.split_whitespace();
        let (a, b) = match (tokens.next(), tokens.next(), tokens.next()) {
            (Some(a), Some(b), None) => (a, b),
            _ => {
                return Err(GraphError::Parse {
                    line: line_no,
                    msg: format!("expected two node indices, got {line:?}"),
                })
            }
        };
        pairs.push((parse_usize(a, line_no)?, parse_usize(b, line_no)?));
    }
    Ok((pairs, header_n))
}

/// A base graph plus a set of dropped edges and added node pairs.
///
/// Views are cheap to construct and validate their edits eagerly:
/// dropped ids must be distinct edges of the base, added pairs must be
/// distinct non-edges without self-loops. The base graph is never modified;
/// [`RewiredView::materialize`] produces the edited graph.
#[derive(Clone, Debug)]
pub struct RewiredView<'g> {
    base: &'g Graph,
    /// Sorted distinct edge ids of the base graph.
    dropped: Vec<EdgeId>,
    /// Canonical sorted distinct pairs, none present in the base.
    added: Vec<(NodeId, NodeId)>,
}

impl<'g> RewiredView<'g> {
    pub fn new(
        base: &'g Graph,
        mut dropped: Vec<EdgeId>,
        added_raw: Vec<(NodeId, NodeId)>,
    ) -> Result<Self, GraphError> {
        dropped.sort_unstable();
        for pair in dropped.windows(2) {
            if pair[0] == pair[1] {
                return Err(GraphError::DuplicateDrop(pair[0].0));
            }
        }
        if let Some(&last) = dropped.last() {
            if last.0 >= base.num_edges() {
                return Err(GraphError::EdgeIdOutOfRange(last.0, base.num_edges()));
            }
        }
        let mut added = Vec::with_capacity(added_raw.len());
        for (a, b) in added_raw {
            if a == b {
                return Err(GraphError::SelfLoop(a));
            }
            let n = base.n();
            if a >= n {
                return Err(GraphError::NodeOutOfRange { node: a, n });
            }
            if b >= n {
                return Err(GraphError::NodeOutOfRange { node: b, n });
            }
            let pair = (a.min(b), a.max(b));
            if base.contains_edge(pair.0, pair.1) {
                return Err(GraphError::AddExisting { u: pair.0, v: pair.1 });
            }
            added.push(pair);
        }
        added.sort_unstable();
        for pair in added.windows(2) {
            if pair[0] == pair[1] {
                return Err(GraphError::DuplicateAdd {
                    u: pair[0].0,
                    v: pair[0].1,
                });
            }
        }
        Ok(RewiredView {
            base,
            dropped,
            added,
        })
    }

    pub fn base(&self) -> &'g Graph {
        self.base
    }

    pub fn dropped(&self) -> &[EdgeId] {
        &self.dropped
    }

    pub fn added(&self) -> &[(NodeId, NodeId)] {
        &self.added
    }

    /// Edge count of the materialized graph.
    pub fn num_edges(&self) -> usize {
        self.base.num_edges() - self.dropped.len() + self.added.len()
    }

    /// Builds the edited graph: base edges minus drops, plus additions, on
    /// the same node set.
    pub fn materialize(&self) -> Graph {
        let kept = {
            let mut kept = Vec::with_capacity(self.num_edges());
            let mut drop_iter = self.dropped.iter().peekable();
            for (idx, &edge) in self.base.edges().iter().enumerate() {
                if drop_iter.peek().is_some_and(|d| d.0 == idx) {
                    drop_iter.next();
                } else {
                    kept.push(edge);
                }
            }
            kept
        };
        // Merge two sorted lists into canonical order.
        let mut edges = Vec::with_capacity(self.num_edges());
        let (mut i, mut j) = (0, 0);
        while i < kept.len() || j < self.added.len() {
            let take_kept = match (kept.get(i), self.added.get(j)) {
                (Some(a), Some(b)) => a < b,
                (Some(_), None) => true,
                _ => false,
            };
            if take_kept {
                edges.push(kept[i]);
                i += 1;
            } else {
                edges.push(self.added[j]);
                j += 1;
            }
        }
        Graph::from_canonical(self.base.n(), edges)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn bridged_triangles() -> Graph {
        // Two triangles {0,1,2} and {3,4,5} joined by the bridge (2,3).
        Graph::from_edge_list(
            6,
            &[(0, 1), (0, 2), (1, 2), (2, 3), (3, 4), (3, 5), (4, 5)],
        )
        .unwrap()
    }

    #[test]
    fn build_canonicalizes_dedupes_and_drops_loops() {
        let g = Graph::from_edge_list(4, &[(2, 1), (1, 2), (3, 3), (0, 1), (1, 0)]).unwrap();
        assert_eq!(g.edges(), &[(0, 1), (1, 2)]);
        assert_eq!(g.n(), 4);
        assert_eq!(g.degree(3), 0);
        assert_eq!(g.volume(), 4);
    }

    #[test]
    fn build_rejects_out_of_range() {
        let err = Graph::from_edge_list(3, &[(0, 3)]).unwrap_err();
        assert!(matches!(
            err,
            GraphError::NodeOutOfRange { node: 3, n: 3 }
        ));
    }

    #[test]
    fn parse_edge_list_with_comments_and_header() {
        let g = Graph::parse_edge_list("# demo\nn=5\n0 1\n\n 1\t2 \n").unwrap();
        assert_eq!(g.n(), 5);
        assert_eq!(g.edges(), &[(0, 1), (1, 2)]);

        // Without a header the node count is max index + 1.
        let g = Graph::parse_edge_list("0 1\n1 4\n").unwrap();
        assert_eq!(g.n(), 5);
    }

    #[test]
    fn parse_edge_list_reports_line_numbers() {
        let err = Graph::parse_edge_list("0 1\n2 x\n").unwrap_err();
        match err {
            GraphError::Parse { line, .. } => assert_eq!(line, 2),
            other => panic!("unexpected error {other:?}"),
        }
        let err = Graph::parse_edge_list("0 1\n\n2 3 4\n").unwrap_err();
        match err {
            GraphError::Parse { line, .. } => assert_eq!(line, 3),
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn edge_list_round_trip_preserves_isolated_nodes() {
        let g = Graph::from_edge_list(7, &[(0, 2), (2, 5)]).unwrap();
        let back = Graph::parse_edge_list(&g.to_edge_list_string()).unwrap();
        assert_eq!(g, back);
    }

    #[test]
    fn triangles_and_common_neighbors() {
        let g = bridged_triangles();
        assert_eq!(g.triangles_at(0, 1), 1);
        assert_eq!(g.common_neighbors(0, 1), vec![2]);
        assert_eq!(g.triangles_at(2, 3), 0);
        assert_eq!(g.common_neighbors(2, 3), Vec::<usize>::new());
        assert_eq!(g.triangles_at(3, 4), 1);
    }

    #[test]
    fn edge_index_is_order_insensitive() {
        let g = bridged_triangles();
        let e = g.edge_index(3, 2).unwrap();
        assert_eq!(g.endpoints(e).unwrap(), (2, 3));
        assert_eq!(g.edge_index(2, 3), Some(e));
        assert_eq!(g.edge_index(0, 5), None);
    }

    #[test]
    fn diameter_and_connectivity() {
        let path = Graph::from_edge_list(5, &[(0, 1), (1, 2), (2, 3), (3, 4)]).unwrap();
        assert_eq!(path.diameter().unwrap(), 4);
        assert!(path.is_connected());

        let split = Graph::from_edge_list(4, &[(0, 1), (2, 3)]).unwrap();
        assert!(!split.is_connected());
        assert!(matches!(split.diameter(), Err(GraphError::Disconnected)));
    }

    #[test]
    fn bipartite_detection() {
        let c4 = Graph::from_edge_list(4, &[(0, 1), (1, 2), (2, 3), (0, 3)]).unwrap();
        assert!(c4.is_bipartite());
        let k3 = Graph::from_edge_list(3, &[(0, 1), (1, 2), (0, 2)]).unwrap();
        assert!(!k3.is_bipartite());
        assert!(bridged_triangles().is_bipartite() == false);
    }

    #[test]
    fn lcc_prefers_smallest_index_on_ties() {
        // Components {0,1} and {2,3} have equal size; {4} is isolated.
        let g = Graph::from_edge_list(5, &[(0, 1), (2, 3)]).unwrap();
        let (lcc, map) = g.largest_connected_component().unwrap();
        assert_eq!(lcc.n(), 2);
        assert_eq!(lcc.edges(), &[(0, 1)]);
        assert_eq!(map, vec![Some(0), Some(1), None, None, None]);
    }

    #[test]
    fn lcc_renumbers_in_ascending_order() {
        let g = Graph::from_edge_list(6, &[(1, 3), (3, 5), (0, 2)]).unwrap();
        let (lcc, map) = g.largest_connected_component().unwrap();
        assert_eq!(lcc.n(), 3);
        assert_eq!(lcc.edges(), &[(0, 1), (1, 2)]); // 1→0, 3→1, 5→2
        assert_eq!(map[1], Some(0));
        assert_eq!(map[3], Some(1));
        assert_eq!(map[5], Some(2));
        assert_eq!(map[0], None);
    }

    #[test]
    fn fingerprint_tracks_structure() {
        let g1 = bridged_triangles();
        let g2 = bridged_triangles();
        assert_eq!(g1.fingerprint(), g2.fingerprint());
        let h = Graph::from_edge_list(6, &[(0, 1), (0, 2), (1, 2), (2, 3), (3, 4), (3, 5)])
            .unwrap();
        assert_ne!(g1.fingerprint(), h.fingerprint());
        // Same edges, different node count → different fingerprint.
        let wider = Graph::from_edge_list(7, g1.edges()).unwrap();
        assert_ne!(g1.fingerprint(), wider.fingerprint());
    }

    #[test]
    fn rewired_view_materializes_edits() {
        let g = bridged_triangles();
        // Drop the bridge and one triangle edge; add (1, 4).
        let bridge = g.edge_index(2, 3).unwrap();
        let tri = g.edge_index(0, 1).unwrap();
        let view = RewiredView::new(&g, vec![bridge, tri], vec![(4, 1)]).unwrap();
        assert_eq!(view.num_edges(), g.num_edges() - 2 + 1);
        let m = view.materialize();
        assert_eq!(m.n(), g.n());
        assert_eq!(m.num_edges(), 6);
        assert!(!m.contains_edge(2, 3));
        assert!(!m.contains_edge(0, 1));
        assert!(m.contains_edge(1, 4));
        assert!(m.contains_edge(0, 2));
        // Base graph untouched.
        assert!(g.contains_edge(2, 3));
    }

    #[test]
    fn rewired_view_validates_edits() {
        let g = bridged_triangles();
        let e0 = EdgeId(0);
        assert!(matches!(
            RewiredView::new(&g, vec![e0, e0], vec![]),
            Err(GraphError::DuplicateDrop(0))
        ));
        assert!(matches!(
            RewiredView::new(&g, vec![EdgeId(99)], vec![]),
            Err(GraphError::EdgeIdOutOfRange(99, 7))
        ));
        assert!(matches!(
            RewiredView::new(&g, vec![], vec![(0, 1)]),
            Err(GraphError::AddExisting { u: 0, v: 1 })
        ));
        assert!(matches!(
            RewiredView::new(&g, vec![], vec![(1, 4), (4, 1)]),
            Err(GraphError::DuplicateAdd { u: 1, v: 4 })
        ));
        assert!(matches!(
            RewiredView::new(&g, vec![], vec![(2, 2)]),
            Err(GraphError::SelfLoop(2))
        ));
        assert!(matches!(
            RewiredView::new(&g, vec![], vec![(0, 9)]),
            Err(GraphError::NodeOutOfRange { node: 9, n: 6 })
        ));
    }

    /// Strategy: a node count and a batch of arbitrary (possibly messy)
    /// pairs inside it.
    fn raw_graph() -> impl Strategy<Value = (usize, Vec<(usize, usize)>)> {
        (2usize..24).prop_flat_map(|n| {
            let pair = (0..n, 0..n);
            (Just(n), proptest::collection::vec(pair, 0..80))
        })
    }

    proptest! {
        #[test]
        fn adjacency_is_symmetric_sorted_and_consistent((n, raw) in raw_graph()) {
            let g = Graph::from_edge_list(n, &raw).unwrap();
            let mut degree_sum = 0;
            for u in 0..g.n() {
                let adj = g.neighbors(u);
                degree_sum += adj.len();
                prop_assert!(adj.windows(2).all(|w| w[0] < w[1]), "unsorted or duplicated");
                for &v in adj {
                    prop_assert!(v != u, "self-loop survived");
                    prop_assert!(g.neighbors(v).contains(&u), "asymmetric adjacency");
                }
            }
            prop_assert_eq!(degree_sum, 2 * g.num_edges());
            prop_assert_eq!(degree_sum, g.volume());
        }

        #[test]
        fn edge_index_round_trips((n, raw) in raw_graph()) {
            let g = Graph::from_edge_list(n, &raw).unwrap();
            for (i, &(u, v)) in g.edges().iter().enumerate() {
                prop_assert_eq!(g.edge_index(u, v), Some(EdgeId(i)));
                prop_assert_eq!(g.edge_index(v, u), Some(EdgeId(i)));
                prop_assert_eq!(g.endpoints(EdgeId(i)).unwrap(), (u, v));
                prop_assert!(g.contains_edge(u, v) && g.contains_edge(v, u));
            }
        }

        #[test]
        fn components_partition_the_nodes((n, raw) in raw_graph()) {
            let g = Graph::from_edge_list(n, &raw).unwrap();
            let comps = g.connected_components();
            let mut all: Vec<usize> = comps.iter().flatten().copied().collect();
            all.sort_unstable();
            prop_assert_eq!(all, (0..n).collect::<Vec<_>>());
        }

        #[test]
        fn materialize_applies_exactly_the_edits(
            (n, raw) in raw_graph(),
            drop_bits in proptest::collection::vec(any::<bool>(), 80),
            add_pairs in proptest::collection::vec((0usize..24, 0usize..24), 0..10),
        ) {
            let g = Graph::from_edge_list(n, &raw).unwrap();
            let dropped: Vec<EdgeId> = (0..g.num_edges())
                .filter(|&i| drop_bits.get(i).copied().unwrap_or(false))
                .map(EdgeId)
                .collect();
            let mut added: Vec<(usize, usize)> = add_pairs
                .into_iter()
                .filter(|&(a, b)| a != b && a < n && b < n)
                .map(|(a, b)| (a.min(b), a.max(b)))
                .filter(|&(a, b)| !g.contains_edge(a, b))
                .collect();
            added.sort_unstable();
            added.dedup();

            let view = RewiredView::new(&g, dropped.clone(), added.clone()).unwrap();
            let m = view.materialize();
            prop_assert_eq!(m.n(), g.n());
            prop_assert_eq!(m.num_edges(), g.num_edges() - dropped.len() + added.len());
            for (i, &(u, v)) in g.edges().iter().enumerate() {
                let expect = !dropped.contains(&EdgeId(i));
                prop_assert_eq!(m.contains_edge(u, v), expect);
            }
            for &(u, v) in &added {
                prop_assert!(m.contains_edge(u, v));
            }
        }
    }
}
