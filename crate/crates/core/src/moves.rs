//! The six elementary rewrites of causal networks, the path functors they
//! induce, and the decomposition of an arbitrary functor into a move
//! sequence.
//!
//! Decomposition runs a fixed pipeline: subdivide every edge whose image is a
//! long path, shrink the fibers of the vertex map, merge edge groups with a
//! common single-edge image, add whatever the target still misses, and finish
//! with one relabeling isomorphism so the composite lands on the target
//! exactly. Each stage keeps the intermediate graph acyclic.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::functor::{compose_functors, identity_functor, PathFunctor};
use crate::graph::{CausalNetwork, GraphError, Path};
use crate::ids::{EdgeId, VertexId};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MoveError {
    #[error("move references unknown id: {0}")]
    UnknownId(String),
    #[error("edges [{}] do not share a common source and target", .0.iter().map(|e| e.as_str()).collect::<Vec<_>>().join(", "))]
    NotParallel(Vec<EdgeId>),
    #[error("move would create a directed cycle through [{}]", .0.iter().map(|e| e.as_str()).collect::<Vec<_>>().join(", "))]
    CycleCreated(Vec<EdgeId>),
    #[error("id already in use: {0}")]
    IdCollision(String),
    #[error("malformed move: {0}")]
    Malformed(String),
    #[error("functor is not decomposable: {0}")]
    NotDecomposable(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// One elementary deformation of a causal network.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ElementaryMove {
    /// Relabel vertices and edges by a pair of bijections.
    Iso {
        vertex_map: BTreeMap<VertexId, VertexId>,
        edge_map: BTreeMap<EdgeId, EdgeId>,
    },
    /// Add an isolated vertex.
    AddVertex { vertex: VertexId },
    /// Add an edge between two existing vertices.
    AddEdge {
        edge: EdgeId,
        src: VertexId,
        tgt: VertexId,
    },
    /// Split an edge at a new middle vertex.
    Subdivide {
        edge: EdgeId,
        new_vertex: VertexId,
        new_edges: (EdgeId, EdgeId),
    },
    /// Merge a parallel family of edges into a single edge.
    MergeEdges {
        edges: BTreeSet<EdgeId>,
        merged: EdgeId,
    },
    /// Shrink the induced subgraph on a vertex subset to a single point.
    ShrinkVertices {
        vertices: BTreeSet<VertexId>,
        new_vertex: VertexId,
    },
}

impl ElementaryMove {
    /// Identity relabeling of `n`, the normal form of a trivial move list.
    pub fn trivial_iso(n: &CausalNetwork) -> Self {
        ElementaryMove::Iso {
            vertex_map: n.vertices().map(|v| (v.clone(), v.clone())).collect(),
            edge_map: n.edges().map(|(e, _)| (e.clone(), e.clone())).collect(),
        }
    }
}

fn fresh_vertex(n: &CausalNetwork, v: &VertexId) -> Result<(), MoveError> {
    if n.has_vertex(v) {
        Err(MoveError::IdCollision(v.to_string()))
    } else {
        Ok(())
    }
}

fn fresh_edge(n: &CausalNetwork, e: &EdgeId) -> Result<(), MoveError> {
    if n.has_edge(e) {
        Err(MoveError::IdCollision(e.to_string()))
    } else {
        Ok(())
    }
}

fn rebuild(
    vertices: impl IntoIterator<Item = VertexId>,
    edges: impl IntoIterator<Item = (EdgeId, VertexId, VertexId)>,
) -> Result<CausalNetwork, MoveError> {
    CausalNetwork::new(vertices, edges).map_err(|e| match e {
        GraphError::CycleFound(edges) => MoveError::CycleCreated(edges),
        other => MoveError::Graph(other),
    })
}

/// Applies one elementary move, returning the rewritten network and the
/// functor it induces from the old path category to the new one.
pub fn apply_move(
    n: &CausalNetwork,
    m: &ElementaryMove,
) -> Result<(CausalNetwork, PathFunctor), MoveError> {
    match m {
        ElementaryMove::Iso {
            vertex_map,
            edge_map,
        } => {
            for v in n.vertices() {
                if !vertex_map.contains_key(v) {
                    return Err(MoveError::UnknownId(v.to_string()));
                }
            }
            for (e, _) in n.edges() {
                if !edge_map.contains_key(e) {
                    return Err(MoveError::UnknownId(e.to_string()));
                }
            }
            if vertex_map.len() != n.vertex_count() || edge_map.len() != n.edge_count() {
                return Err(MoveError::Malformed(
                    "relabeling mentions ids outside the network".into(),
                ));
            }
            let new_vertices: BTreeSet<VertexId> = vertex_map.values().cloned().collect();
            if new_vertices.len() != vertex_map.len() {
                return Err(MoveError::IdCollision("vertex relabeling is not injective".into()));
            }
            let new_edge_ids: BTreeSet<EdgeId> = edge_map.values().cloned().collect();
            if new_edge_ids.len() != edge_map.len() {
                return Err(MoveError::IdCollision("edge relabeling is not injective".into()));
            }
            let out = rebuild(
                new_vertices,
                n.edges().map(|(e, ends)| {
                    (
                        edge_map[e].clone(),
                        vertex_map[&ends.src].clone(),
                        vertex_map[&ends.tgt].clone(),
                    )
                }),
            )?;
            let f = PathFunctor::new(
                n.clone(),
                out.clone(),
                vertex_map.clone(),
                n.edges()
                    .map(|(e, ends)| {
                        (
                            e.clone(),
                            Path::new(vertex_map[&ends.src].clone(), vec![edge_map[e].clone()]),
                        )
                    })
                    .collect(),
            )?;
            Ok((out, f))
        }
        ElementaryMove::AddVertex { vertex } => {
            fresh_vertex(n, vertex)?;
            let out = rebuild(
                n.vertices().cloned().chain([vertex.clone()]),
                n.edges()
                    .map(|(e, ends)| (e.clone(), ends.src.clone(), ends.tgt.clone())),
            )?;
            Ok((out.clone(), inclusion(n, &out)))
        }
        ElementaryMove::AddEdge { edge, src, tgt } => {
            fresh_edge(n, edge)?;
            if !n.has_vertex(src) {
                return Err(MoveError::UnknownId(src.to_string()));
            }
            if !n.has_vertex(tgt) {
                return Err(MoveError::UnknownId(tgt.to_string()));
            }
            let out = rebuild(
                n.vertices().cloned(),
                n.edges()
                    .map(|(e, ends)| (e.clone(), ends.src.clone(), ends.tgt.clone()))
                    .chain([(edge.clone(), src.clone(), tgt.clone())]),
            )?;
            Ok((out.clone(), inclusion(n, &out)))
        }
        ElementaryMove::Subdivide {
            edge,
            new_vertex,
            new_edges: (first, second),
        } => {
            let ends = n
                .edge_ends(edge)
                .map_err(|_| MoveError::UnknownId(edge.to_string()))?
                .clone();
            fresh_vertex(n, new_vertex)?;
            fresh_edge(n, first)?;
            fresh_edge(n, second)?;
            if first == second {
                return Err(MoveError::IdCollision(first.to_string()));
            }
            let out = rebuild(
                n.vertices().cloned().chain([new_vertex.clone()]),
                n.edges()
                    .filter(|(e, _)| *e != edge)
                    .map(|(e, ends)| (e.clone(), ends.src.clone(), ends.tgt.clone()))
                    .chain([
                        (first.clone(), ends.src.clone(), new_vertex.clone()),
                        (second.clone(), new_vertex.clone(), ends.tgt.clone()),
                    ]),
            )?;
            let vertex_map = n.vertices().map(|v| (v.clone(), v.clone())).collect();
            let edge_map = n
                .edges()
                .map(|(e, e_ends)| {
                    let img = if e == edge {
                        Path::new(ends.src.clone(), vec![first.clone(), second.clone()])
                    } else {
                        Path::new(e_ends.src.clone(), vec![e.clone()])
                    };
                    (e.clone(), img)
                })
                .collect();
            let f = PathFunctor::new(n.clone(), out.clone(), vertex_map, edge_map)?;
            Ok((out, f))
        }
        ElementaryMove::MergeEdges { edges, merged } => {
            if edges.is_empty() {
                return Err(MoveError::Malformed("merge of an empty edge set".into()));
            }
            let mut common: Option<(VertexId, VertexId)> = None;
            for e in edges {
                let ends = n
                    .edge_ends(e)
                    .map_err(|_| MoveError::UnknownId(e.to_string()))?;
                match &common {
                    None => common = Some((ends.src.clone(), ends.tgt.clone())),
                    Some((s, t)) => {
                        if s != &ends.src || t != &ends.tgt {
                            return Err(MoveError::NotParallel(edges.iter().cloned().collect()));
                        }
                    }
                }
            }
            fresh_edge(n, merged)?;
            let (src, tgt) = common.expect("nonempty");
            let out = rebuild(
                n.vertices().cloned(),
                n.edges()
                    .filter(|(e, _)| !edges.contains(*e))
                    .map(|(e, ends)| (e.clone(), ends.src.clone(), ends.tgt.clone()))
                    .chain([(merged.clone(), src.clone(), tgt.clone())]),
            )?;
            let vertex_map = n.vertices().map(|v| (v.clone(), v.clone())).collect();
            let edge_map = n
                .edges()
                .map(|(e, ends)| {
                    let img = if edges.contains(e) {
                        Path::new(src.clone(), vec![merged.clone()])
                    } else {
                        Path::new(ends.src.clone(), vec![e.clone()])
                    };
                    (e.clone(), img)
                })
                .collect();
            let f = PathFunctor::new(n.clone(), out.clone(), vertex_map, edge_map)?;
            Ok((out, f))
        }
        ElementaryMove::ShrinkVertices {
            vertices,
            new_vertex,
        } => {
            if vertices.is_empty() {
                return Err(MoveError::Malformed("shrink of an empty vertex set".into()));
            }
            for v in vertices {
                if !n.has_vertex(v) {
                    return Err(MoveError::UnknownId(v.to_string()));
                }
            }
            fresh_vertex(n, new_vertex)?;
            let collapse = |v: &VertexId| -> VertexId {
                if vertices.contains(v) {
                    new_vertex.clone()
                } else {
                    v.clone()
                }
            };
            let internal = |ends: &crate::graph::EdgeEnds| {
                vertices.contains(&ends.src) && vertices.contains(&ends.tgt)
            };
            let out = rebuild(
                n.vertices()
                    .filter(|v| !vertices.contains(*v))
                    .cloned()
                    .chain([new_vertex.clone()]),
                n.edges()
                    .filter(|(_, ends)| !internal(ends))
                    .map(|(e, ends)| (e.clone(), collapse(&ends.src), collapse(&ends.tgt))),
            )?;
            let vertex_map = n.vertices().map(|v| (v.clone(), collapse(v))).collect();
            let edge_map = n
                .edges()
                .map(|(e, ends)| {
                    let img = if internal(ends) {
                        Path::empty(new_vertex.clone())
                    } else {
                        Path::new(collapse(&ends.src), vec![e.clone()])
                    };
                    (e.clone(), img)
                })
                .collect();
            let f = PathFunctor::new(n.clone(), out.clone(), vertex_map, edge_map)?;
            Ok((out, f))
        }
    }
}

fn inclusion(small: &CausalNetwork, big: &CausalNetwork) -> PathFunctor {
    PathFunctor::new(
        small.clone(),
        big.clone(),
        small.vertices().map(|v| (v.clone(), v.clone())).collect(),
        small
            .edges()
            .map(|(e, ends)| (e.clone(), Path::new(ends.src.clone(), vec![e.clone()])))
            .collect(),
    )
    .expect("inclusion of a subgraph is a valid functor")
}

/// Applies a move list in order, returning all intermediate networks and the
/// composite functor from the first network to the last.
pub fn apply_moves(
    n: &CausalNetwork,
    moves: &[ElementaryMove],
) -> Result<(Vec<CausalNetwork>, PathFunctor), MoveError> {
    let mut networks = vec![n.clone()];
    let mut composite = identity_functor(n);
    for m in moves {
        let (next, f) = apply_move(networks.last().expect("nonempty"), m)?;
        composite = compose_functors(&f, &composite)?;
        networks.push(next);
    }
    Ok((networks, composite))
}

/// Deterministic generator of unused ids with a fixed prefix.
struct FreshIds {
    used_vertices: BTreeSet<VertexId>,
    used_edges: BTreeSet<EdgeId>,
    counter: usize,
}

impl FreshIds {
    fn for_network(n: &CausalNetwork) -> Self {
        Self {
            used_vertices: n.vertices().cloned().collect(),
            used_edges: n.edges().map(|(e, _)| e.clone()).collect(),
            counter: 0,
        }
    }

    fn vertex(&mut self, tag: &str) -> VertexId {
        loop {
            let candidate = VertexId::from(format!("_{tag}{}", self.counter));
            self.counter += 1;
            if self.used_vertices.insert(candidate.clone()) {
                return candidate;
            }
        }
    }

    fn edge(&mut self, tag: &str) -> EdgeId {
        loop {
            let candidate = EdgeId::from(format!("_{tag}{}", self.counter));
            self.counter += 1;
            if self.used_edges.insert(candidate.clone()) {
                return candidate;
            }
        }
    }
}

/// Decomposes `f` into elementary moves whose induced functors compose to
/// `f` exactly, ending with a relabeling isomorphism onto `f`'s target.
pub fn decompose(f: &PathFunctor) -> Result<Vec<ElementaryMove>, MoveError> {
    let target = f.target().clone();
    let mut current = f.source().clone();
    let mut vmap: BTreeMap<VertexId, VertexId> = f.vertex_map().clone();
    let mut emap: BTreeMap<EdgeId, Path> = f.edge_map().clone();
    let mut fresh = FreshIds::for_network(&current);
    let mut moves: Vec<ElementaryMove> = Vec::new();

    let step = |current: &mut CausalNetwork,
                moves: &mut Vec<ElementaryMove>,
                m: ElementaryMove|
     -> Result<(), MoveError> {
        let (next, _) = apply_move(current, &m)?;
        moves.push(m);
        *current = next;
        Ok(())
    };

    // Subdivide until every edge image is a path of length <= 1. Splitting an
    // edge peels the first target edge off its image; the new middle vertex
    // maps to the intermediate vertex of the image path.
    loop {
        let long = emap
            .iter()
            .find(|(_, p)| p.len() >= 2)
            .map(|(e, p)| (e.clone(), p.clone()));
        let Some((e, img)) = long else { break };
        let head = img.edges()[0].clone();
        let tail: Vec<EdgeId> = img.edges()[1..].to_vec();
        let mid_target = target.edge_ends(&head)?.tgt.clone();
        let mid = fresh.vertex("sub");
        let first = fresh.edge("sub");
        let second = fresh.edge("sub");
        step(
            &mut current,
            &mut moves,
            ElementaryMove::Subdivide {
                edge: e.clone(),
                new_vertex: mid.clone(),
                new_edges: (first.clone(), second.clone()),
            },
        )?;
        vmap.insert(mid.clone(), mid_target.clone());
        emap.remove(&e);
        emap.insert(first, Path::new(img.anchor().clone(), vec![head]));
        emap.insert(second, Path::new(mid_target, tail));
    }

    // Shrink each vertex-map fiber to a point, in topological order of the
    // image vertices. Edges with empty images sit inside fibers and vanish.
    let target_order = target.topological_order()?;
    for w in &target_order {
        let fiber: BTreeSet<VertexId> = vmap
            .iter()
            .filter(|(_, img)| *img == w)
            .map(|(v, _)| v.clone())
            .collect();
        if fiber.len() < 2 {
            continue;
        }
        let z = fresh.vertex("shr");
        let shrink = ElementaryMove::ShrinkVertices {
            vertices: fiber.clone(),
            new_vertex: z.clone(),
        };
        if let Err(MoveError::CycleCreated(cycle)) = step(&mut current, &mut moves, shrink) {
            return Err(MoveError::NotDecomposable(format!(
                "shrinking the fiber over {w} closes a cycle through {cycle:?}"
            )));
        }
        for v in &fiber {
            vmap.remove(v);
        }
        vmap.insert(z, w.clone());
        // Fiber-internal edges vanished from the network; their images were
        // necessarily empty paths (a nonempty image would be a loop at w).
        emap.retain(|e, img| {
            debug_assert!(current.has_edge(e) || img.is_empty());
            current.has_edge(e)
        });
    }

    // Merge edge groups sharing a single-edge image.
    let mut by_image: BTreeMap<EdgeId, BTreeSet<EdgeId>> = BTreeMap::new();
    for (e, img) in &emap {
        debug_assert_eq!(img.len(), 1, "post-shrink images are single edges");
        by_image
            .entry(img.edges()[0].clone())
            .or_default()
            .insert(e.clone());
    }
    for (d, group) in &by_image {
        if group.len() < 2 {
            continue;
        }
        let merged = fresh.edge("mrg");
        step(
            &mut current,
            &mut moves,
            ElementaryMove::MergeEdges {
                edges: group.clone(),
                merged: merged.clone(),
            },
        )?;
        for e in group {
            emap.remove(e);
        }
        emap.insert(merged, Path::new(target.edge_ends(d)?.src.clone(), vec![d.clone()]));
    }

    // Include whatever the target still misses: vertices first, then edges.
    let hit_vertices: BTreeSet<VertexId> = vmap.values().cloned().collect();
    for w in &target_order {
        if hit_vertices.contains(w) {
            continue;
        }
        let v = fresh.vertex("add");
        step(&mut current, &mut moves, ElementaryMove::AddVertex { vertex: v.clone() })?;
        vmap.insert(v, w.clone());
    }
    let inverse_vmap: BTreeMap<VertexId, VertexId> =
        vmap.iter().map(|(v, w)| (w.clone(), v.clone())).collect();
    let hit_edges: BTreeSet<EdgeId> = emap
        .values()
        .map(|p| p.edges()[0].clone())
        .collect();
    for (d, ends) in target.edges() {
        if hit_edges.contains(d) {
            continue;
        }
        let e = fresh.edge("add");
        let src = inverse_vmap
            .get(&ends.src)
            .ok_or_else(|| MoveError::NotDecomposable(format!("no preimage for {}", ends.src)))?
            .clone();
        let tgt = inverse_vmap
            .get(&ends.tgt)
            .ok_or_else(|| MoveError::NotDecomposable(format!("no preimage for {}", ends.tgt)))?
            .clone();
        step(
            &mut current,
            &mut moves,
            ElementaryMove::AddEdge { edge: e.clone(), src, tgt },
        )?;
        emap.insert(e, Path::new(ends.src.clone(), vec![d.clone()]));
    }

    // Final relabeling onto the target's ids.
    let edge_rename: BTreeMap<EdgeId, EdgeId> = emap
        .iter()
        .map(|(e, p)| (e.clone(), p.edges()[0].clone()))
        .collect();
    if vmap.len() != current.vertex_count()
        || edge_rename.len() != current.edge_count()
        || vmap.values().collect::<BTreeSet<_>>().len() != target.vertex_count()
        || edge_rename.values().collect::<BTreeSet<_>>().len() != target.edge_count()
    {
        return Err(MoveError::NotDecomposable(
            "pipeline did not reach a relabeling of the target".into(),
        ));
    }
    step(
        &mut current,
        &mut moves,
        ElementaryMove::Iso {
            vertex_map: vmap,
            edge_map: edge_rename,
        },
    )?;
    debug_assert_eq!(&current, f.target());
    Ok(moves)
}

/// Checks that the induced functors of `moves` compose to exactly `f`,
/// comparing vertex and edge maps elementwise. Returns false on any
/// mismatch, including moves that fail to apply.
pub fn verify_decomposition(f: &PathFunctor, moves: &[ElementaryMove]) -> bool {
    match apply_moves(f.source(), moves) {
        Ok((_, composite)) => &composite == f,
        Err(_) => false,
    }
}
