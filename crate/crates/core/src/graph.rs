//! Causal networks: finite directed acyclic graphs with named vertices and
//! edges, and directed paths in them.
//!
//! A [`CausalNetwork`] is validated at construction: every edge endpoint must
//! name a known vertex and the directed graph must be acyclic. Parallel edges
//! and isolated vertices are allowed. Networks compare by id; relabelings are
//! detected separately with [`CausalNetwork::find_isomorphism`].

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use thiserror::Error;

use crate::ids::{EdgeId, VertexId};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("directed cycle through edges [{}]", .0.iter().map(|e| e.as_str()).collect::<Vec<_>>().join(", "))]
    CycleFound(Vec<EdgeId>),
    #[error("edge {0} references a vertex that is not in the network")]
    DanglingEndpoint(EdgeId),
    #[error("duplicate vertex id {0}")]
    DuplicateVertex(VertexId),
    #[error("duplicate edge id {0}")]
    DuplicateEdge(EdgeId),
    #[error("unknown vertex {0}")]
    UnknownVertex(VertexId),
    #[error("unknown edge {0}")]
    UnknownEdge(EdgeId),
    #[error("path breaks at edge {0}: its source does not match the previous endpoint")]
    BrokenPath(EdgeId),
    #[error("nonempty path anchored at {anchor} but its first edge starts at {start}")]
    AnchorMismatch { anchor: VertexId, start: VertexId },
    #[error("functor image of edge {edge} runs {found_start} -> {found_end}, expected {want_start} -> {want_end}")]
    ImageEndpointMismatch {
        edge: EdgeId,
        want_start: VertexId,
        want_end: VertexId,
        found_start: VertexId,
        found_end: VertexId,
    },
    #[error("vertex {0} has no image under the functor")]
    MissingVertexImage(VertexId),
    #[error("edge {0} has no image under the functor")]
    MissingEdgeImage(EdgeId),
    #[error("functor composition mismatch: target of inner functor differs from source of outer")]
    SourceTargetMismatch,
    #[error("not a poset: {0}")]
    NotAPoset(String),
}

/// A directed edge, stored as `(source, target)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeEnds {
    pub src: VertexId,
    pub tgt: VertexId,
}

/// A finite directed acyclic multigraph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CausalNetwork {
    vertices: BTreeSet<VertexId>,
    edges: BTreeMap<EdgeId, EdgeEnds>,
}

impl CausalNetwork {
    /// Builds a network, checking all invariants (unique ids, endpoints
    /// present, acyclicity).
    pub fn new(
        vertices: impl IntoIterator<Item = VertexId>,
        edges: impl IntoIterator<Item = (EdgeId, VertexId, VertexId)>,
    ) -> Result<Self, GraphError> {
        let mut vset = BTreeSet::new();
        for v in vertices {
            if !vset.insert(v.clone()) {
                return Err(GraphError::DuplicateVertex(v));
            }
        }
        let mut emap = BTreeMap::new();
        for (id, src, tgt) in edges {
            if !vset.contains(&src) || !vset.contains(&tgt) {
                return Err(GraphError::DanglingEndpoint(id));
            }
            if emap.insert(id.clone(), EdgeEnds { src, tgt }).is_some() {
                return Err(GraphError::DuplicateEdge(id));
            }
        }
        let net = Self {
            vertices: vset,
            edges: emap,
        };
        net.topological_order()?;
        Ok(net)
    }

    /// Convenience constructor from string literals.
    pub fn from_parts(vertices: &[&str], edges: &[(&str, &str, &str)]) -> Result<Self, GraphError> {
        Self::new(
            vertices.iter().map(|v| VertexId::from(*v)),
            edges
                .iter()
                .map(|(id, s, t)| (EdgeId::from(*id), VertexId::from(*s), VertexId::from(*t))),
        )
    }

    pub fn vertices(&self) -> impl Iterator<Item = &VertexId> {
        self.vertices.iter()
    }

    pub fn edges(&self) -> impl Iterator<Item = (&EdgeId, &EdgeEnds)> {
        self.edges.iter()
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn has_vertex(&self, v: &VertexId) -> bool {
        self.vertices.contains(v)
    }

    pub fn has_edge(&self, e: &EdgeId) -> bool {
        self.edges.contains_key(e)
    }

    pub fn edge_ends(&self, e: &EdgeId) -> Result<&EdgeEnds, GraphError> {
        self.edges.get(e).ok_or_else(|| GraphError::UnknownEdge(e.clone()))
    }

    /// Edges pointing into `v`, in id order.
    pub fn in_edges(&self, v: &VertexId) -> Vec<EdgeId> {
        self.edges
            .iter()
            .filter(|(_, ends)| &ends.tgt == v)
            .map(|(id, _)| id.clone())
            .collect()
    }

    /// Edges pointing out of `v`, in id order.
    pub fn out_edges(&self, v: &VertexId) -> Vec<EdgeId> {
        self.edges
            .iter()
            .filter(|(_, ends)| &ends.src == v)
            .map(|(id, _)| id.clone())
            .collect()
    }

    /// Kahn's algorithm with a sorted ready set, so the returned order is
    /// canonical. Fails with a witness cycle if the graph is not acyclic.
    pub fn topological_order(&self) -> Result<Vec<VertexId>, GraphError> {
        let mut indegree: BTreeMap<&VertexId, usize> =
            self.vertices.iter().map(|v| (v, 0)).collect();
        for ends in self.edges.values() {
            *indegree.get_mut(&ends.tgt).expect("validated endpoint") += 1;
        }
        let mut ready: BTreeSet<&VertexId> = indegree
            .iter()
            .filter(|(_, d)| **d == 0)
            .map(|(v, _)| *v)
            .collect();
        let mut order = Vec::with_capacity(self.vertices.len());
        while let Some(v) = ready.iter().next().copied() {
            ready.remove(v);
            order.push(v.clone());
            for (_, ends) in self.edges.iter().filter(|(_, ends)| ends.src == *v) {
                let d = indegree.get_mut(&ends.tgt).expect("validated endpoint");
                *d -= 1;
                if *d == 0 {
                    ready.insert(&ends.tgt);
                }
            }
        }
        if order.len() == self.vertices.len() {
            Ok(order)
        } else {
            Err(GraphError::CycleFound(self.find_cycle_among(
                &self
                    .vertices
                    .iter()
                    .filter(|v| !order.contains(v))
                    .cloned()
                    .collect(),
            )))
        }
    }

    /// Position of each vertex in the canonical topological order.
    pub fn topological_index(&self) -> Result<BTreeMap<VertexId, usize>, GraphError> {
        Ok(self
            .topological_order()?
            .into_iter()
            .enumerate()
            .map(|(i, v)| (v, i))
            .collect())
    }

    /// Walks forward from an arbitrary remaining vertex until it revisits one,
    /// then reports the edges of the loop. Only called on vertex sets in which
    /// every vertex has an outgoing edge within the set.
    fn find_cycle_among(&self, remaining: &BTreeSet<VertexId>) -> Vec<EdgeId> {
        let start = remaining.iter().next().expect("nonempty remainder");
        let mut seen: Vec<(VertexId, Option<EdgeId>)> = vec![(start.clone(), None)];
        let mut cur = start.clone();
        loop {
            let (eid, ends) = self
                .edges
                .iter()
                .find(|(_, ends)| ends.src == cur && remaining.contains(&ends.tgt))
                .expect("every remaining vertex keeps an in-set successor");
            let next = ends.tgt.clone();
            if let Some(pos) = seen.iter().position(|(v, _)| *v == next) {
                let mut cycle: Vec<EdgeId> =
                    seen[pos + 1..].iter().filter_map(|(_, e)| e.clone()).collect();
                cycle.push(eid.clone());
                return cycle;
            }
            seen.push((next.clone(), Some(eid.clone())));
            cur = next;
        }
    }

    /// Vertices reachable from `v` by directed paths, including `v` itself.
    pub fn reachable_from(&self, v: &VertexId) -> BTreeSet<VertexId> {
        let mut seen = BTreeSet::new();
        let mut queue = VecDeque::from([v.clone()]);
        while let Some(u) = queue.pop_front() {
            if !seen.insert(u.clone()) {
                continue;
            }
            for ends in self.edges.values() {
                if ends.src == u && !seen.contains(&ends.tgt) {
                    queue.push_back(ends.tgt.clone());
                }
            }
        }
        seen
    }

    /// Start vertex of a path (its anchor).
    pub fn path_start(&self, p: &Path) -> VertexId {
        p.anchor().clone()
    }

    /// End vertex of a path: the anchor when empty, else the last edge's target.
    pub fn path_end(&self, p: &Path) -> Result<VertexId, GraphError> {
        match p.edges().last() {
            None => Ok(p.anchor().clone()),
            Some(e) => Ok(self.edge_ends(e)?.tgt.clone()),
        }
    }

    /// Checks that `p` is a well-formed directed path in this network.
    pub fn check_path(&self, p: &Path) -> Result<(), GraphError> {
        if !self.has_vertex(p.anchor()) {
            return Err(GraphError::UnknownVertex(p.anchor().clone()));
        }
        let mut at = p.anchor().clone();
        for (i, e) in p.edges().iter().enumerate() {
            let ends = self.edge_ends(e)?;
            if ends.src != at {
                return Err(if i == 0 {
                    GraphError::AnchorMismatch {
                        anchor: p.anchor().clone(),
                        start: ends.src.clone(),
                    }
                } else {
                    GraphError::BrokenPath(e.clone())
                });
            }
            at = ends.tgt.clone();
        }
        Ok(())
    }

    /// Searches for a graph isomorphism onto `other`: a pair of bijections on
    /// vertices and edges preserving sources and targets. Backtracking over
    /// vertex assignments; intended for the desk-scale graphs this crate
    /// works with.
    pub fn find_isomorphism(
        &self,
        other: &CausalNetwork,
    ) -> Option<(BTreeMap<VertexId, VertexId>, BTreeMap<EdgeId, EdgeId>)> {
        if self.vertices.len() != other.vertices.len() || self.edges.len() != other.edges.len() {
            return None;
        }
        let degree = |net: &CausalNetwork, v: &VertexId| {
            (net.in_edges(v).len(), net.out_edges(v).len())
        };
        let mine: Vec<VertexId> = self.vertices.iter().cloned().collect();
        let mut vmap: BTreeMap<VertexId, VertexId> = BTreeMap::new();
        let mut used: BTreeSet<VertexId> = BTreeSet::new();

        fn extend(
            a: &CausalNetwork,
            b: &CausalNetwork,
            order: &[VertexId],
            vmap: &mut BTreeMap<VertexId, VertexId>,
            used: &mut BTreeSet<VertexId>,
            degree: &impl Fn(&CausalNetwork, &VertexId) -> (usize, usize),
        ) -> bool {
            let Some(v) = order.get(vmap.len()).cloned() else {
                return true;
            };
            let dv = degree(a, &v);
            let candidates: Vec<VertexId> = b
                .vertices()
                .filter(|w| !used.contains(*w) && degree(b, w) == dv)
                .cloned()
                .collect();
            for w in candidates {
                // Every already-mapped neighbour relation must transport: the
                // number of parallel edges between mapped pairs must agree.
                let ok = vmap.iter().all(|(x, y)| {
                    let count = |net: &CausalNetwork, s: &VertexId, t: &VertexId| {
                        net.edges().filter(|(_, e)| &e.src == s && &e.tgt == t).count()
                    };
                    count(a, x, &v) == count(b, y, &w) && count(a, &v, x) == count(b, &w, y)
                });
                if !ok {
                    continue;
                }
                vmap.insert(v.clone(), w.clone());
                used.insert(w.clone());
                if extend(a, b, order, vmap, used, degree) {
                    return true;
                }
                vmap.remove(&v);
                used.remove(&w);
            }
            false
        }

        if !extend(self, other, &mine, &mut vmap, &mut used, &degree) {
            return None;
        }
        // Vertex bijection fixed; pair up parallel edges between each mapped
        // source/target pair in id order.
        let mut emap = BTreeMap::new();
        let mut taken: BTreeSet<EdgeId> = BTreeSet::new();
        for (eid, ends) in self.edges() {
            let src = vmap[&ends.src].clone();
            let tgt = vmap[&ends.tgt].clone();
            let img = other
                .edges()
                .find(|(id, e)| e.src == src && e.tgt == tgt && !taken.contains(*id))
                .map(|(id, _)| id.clone())?;
            taken.insert(img.clone());
            emap.insert(eid.clone(), img);
        }
        Some((vmap, emap))
    }
}

/// Validates the network invariants. Networks built through
/// [`CausalNetwork::new`] always pass; this re-checks from the raw parts.
pub fn validate_network(n: &CausalNetwork) -> Result<(), GraphError> {
    for (id, ends) in n.edges() {
        if !n.has_vertex(&ends.src) || !n.has_vertex(&ends.tgt) {
            return Err(GraphError::DanglingEndpoint(id.clone()));
        }
    }
    n.topological_order().map(|_| ())
}

/// A directed edge path. The empty path is anchored at a vertex; a nonempty
/// path's anchor is its first edge's source.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Path {
    anchor: VertexId,
    edges: Vec<EdgeId>,
}

impl Path {
    /// The identity path at `v`.
    pub fn empty(v: VertexId) -> Self {
        Self {
            anchor: v,
            edges: Vec::new(),
        }
    }

    /// A path from explicit parts. Well-formedness against a network is
    /// checked by [`CausalNetwork::check_path`].
    pub fn new(anchor: VertexId, edges: Vec<EdgeId>) -> Self {
        Self { anchor, edges }
    }

    /// A nonempty path in `net`, its anchor derived from the first edge.
    pub fn of_edges(net: &CausalNetwork, edges: Vec<EdgeId>) -> Result<Self, GraphError> {
        let first = edges.first().ok_or_else(|| {
            GraphError::BrokenPath(EdgeId::from(""))
        })?;
        let anchor = net.edge_ends(first)?.src.clone();
        let p = Self { anchor, edges };
        net.check_path(&p)?;
        Ok(p)
    }

    pub fn anchor(&self) -> &VertexId {
        &self.anchor
    }

    pub fn edges(&self) -> &[EdgeId] {
        &self.edges
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vid(s: &str) -> VertexId {
        VertexId::from(s)
    }

    fn eid(s: &str) -> EdgeId {
        EdgeId::from(s)
    }

    /// Independent cycle oracle: plain DFS with a recursion stack.
    fn dfs_has_cycle(vertices: &[VertexId], edges: &[(EdgeId, VertexId, VertexId)]) -> bool {
        fn visit(
            v: &VertexId,
            edges: &[(EdgeId, VertexId, VertexId)],
            done: &mut BTreeSet<VertexId>,
            stack: &mut BTreeSet<VertexId>,
        ) -> bool {
            if stack.contains(v) {
                return true;
            }
            if done.contains(v) {
                return false;
            }
            stack.insert(v.clone());
            for (_, s, t) in edges.iter().filter(|(_, s, _)| s == v) {
                let _ = s;
                if visit(t, edges, done, stack) {
                    return true;
                }
            }
            stack.remove(v);
            done.insert(v.clone());
            false
        }
        let mut done = BTreeSet::new();
        for v in vertices {
            let mut stack = BTreeSet::new();
            if visit(v, edges, &mut done, &mut stack) {
                return true;
            }
        }
        false
    }

    #[test]
    fn single_vertex_is_valid() {
        let n = CausalNetwork::from_parts(&["a"], &[]).unwrap();
        assert!(validate_network(&n).is_ok());
    }

    #[test]
    fn two_cycle_is_rejected() {
        let err = CausalNetwork::from_parts(&["a", "b"], &[("e1", "a", "b"), ("e2", "b", "a")])
            .unwrap_err();
        match err {
            GraphError::CycleFound(edges) => {
                assert_eq!(
                    edges.iter().cloned().collect::<BTreeSet<_>>(),
                    [eid("e1"), eid("e2")].into_iter().collect()
                );
            }
            other => panic!("expected CycleFound, got {other:?}"),
        }
    }

    #[test]
    fn dangling_endpoint_is_rejected() {
        let err =
            CausalNetwork::from_parts(&["a"], &[("e", "a", "missing")]).unwrap_err();
        assert_eq!(err, GraphError::DanglingEndpoint(eid("e")));
    }

    #[test]
    fn forward_edges_on_indexed_vertices_always_acyclic() {
        // Edges only from lower to higher index cannot close a cycle; check
        // construction succeeds and agrees with the DFS oracle.
        let vertices: Vec<VertexId> = (0..10).map(|i| vid(&format!("v{i}"))).collect();
        let mut edges = Vec::new();
        let mut k = 0;
        for i in 0..10usize {
            for j in (i + 1)..10 {
                if (i * 7 + j * 13) % 3 == 0 {
                    edges.push((eid(&format!("e{k}")), vertices[i].clone(), vertices[j].clone()));
                    k += 1;
                }
            }
        }
        assert!(!dfs_has_cycle(&vertices, &edges));
        let n = CausalNetwork::new(vertices, edges).unwrap();
        assert!(validate_network(&n).is_ok());
    }

    #[test]
    fn topological_order_is_canonical_and_consistent() {
        let n = CausalNetwork::from_parts(
            &["a", "b", "c", "d"],
            &[("e1", "a", "b"), ("e2", "a", "c"), ("e3", "b", "d"), ("e4", "c", "d")],
        )
        .unwrap();
        let order = n.topological_order().unwrap();
        assert_eq!(order, vec![vid("a"), vid("b"), vid("c"), vid("d")]);
        let idx = n.topological_index().unwrap();
        for (_, ends) in n.edges() {
            assert!(idx[&ends.src] < idx[&ends.tgt]);
        }
    }

    #[test]
    fn path_checks_endpoint_compatibility() {
        let n = CausalNetwork::from_parts(&["a", "b", "c"], &[("e1", "a", "b"), ("e2", "b", "c")])
            .unwrap();
        let p = Path::of_edges(&n, vec![eid("e1"), eid("e2")]).unwrap();
        assert_eq!(n.path_end(&p).unwrap(), vid("c"));
        assert!(n
            .check_path(&Path::new(vid("a"), vec![eid("e2")]))
            .is_err());
        assert!(n.check_path(&Path::empty(vid("b"))).is_ok());
    }

    #[test]
    fn parallel_edges_and_isolated_vertices_are_allowed() {
        let n = CausalNetwork::from_parts(
            &["a", "b", "lonely"],
            &[("e1", "a", "b"), ("e2", "a", "b")],
        )
        .unwrap();
        assert_eq!(n.edge_count(), 2);
        assert_eq!(n.in_edges(&vid("b")), vec![eid("e1"), eid("e2")]);
    }

    #[test]
    fn isomorphism_found_for_relabeling() {
        let a = CausalNetwork::from_parts(&["a", "b"], &[("e", "a", "b"), ("f", "a", "b")])
            .unwrap();
        let b = CausalNetwork::from_parts(&["x", "y"], &[("p", "x", "y"), ("q", "x", "y")])
            .unwrap();
        let (vmap, emap) = a.find_isomorphism(&b).unwrap();
        assert_eq!(vmap[&vid("a")], vid("x"));
        assert_eq!(vmap[&vid("b")], vid("y"));
        assert_eq!(emap.len(), 2);

        let c = CausalNetwork::from_parts(&["x", "y"], &[("p", "x", "y")]).unwrap();
        assert!(a.find_isomorphism(&c).is_none());
    }
}
