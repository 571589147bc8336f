//! Functors between the path categories of two causal networks.
//!
//! The path category of a network is free on its edges, so a functor is fixed
//! by a vertex map together with an edge-to-path map; functoriality is then
//! automatic. Validation checks endpoint compatibility: the image of an edge
//! must run from the image of its source to the image of its target, and a
//! length-0 image forces those to coincide.

use std::collections::BTreeMap;

use crate::graph::{CausalNetwork, GraphError, Path};
use crate::ids::{EdgeId, VertexId};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PathFunctor {
    source: CausalNetwork,
    target: CausalNetwork,
    vertex_map: BTreeMap<VertexId, VertexId>,
    edge_map: BTreeMap<EdgeId, Path>,
}

impl PathFunctor {
    pub fn new(
        source: CausalNetwork,
        target: CausalNetwork,
        vertex_map: BTreeMap<VertexId, VertexId>,
        edge_map: BTreeMap<EdgeId, Path>,
    ) -> Result<Self, GraphError> {
        for v in source.vertices() {
            let img = vertex_map
                .get(v)
                .ok_or_else(|| GraphError::MissingVertexImage(v.clone()))?;
            if !target.has_vertex(img) {
                return Err(GraphError::UnknownVertex(img.clone()));
            }
        }
        for (v, _) in vertex_map.iter() {
            if !source.has_vertex(v) {
                return Err(GraphError::UnknownVertex(v.clone()));
            }
        }
        for (e, ends) in source.edges() {
            let img = edge_map
                .get(e)
                .ok_or_else(|| GraphError::MissingEdgeImage(e.clone()))?;
            target.check_path(img)?;
            let want_start = vertex_map[&ends.src].clone();
            let want_end = vertex_map[&ends.tgt].clone();
            let found_start = target.path_start(img);
            let found_end = target.path_end(img)?;
            if want_start != found_start || want_end != found_end {
                return Err(GraphError::ImageEndpointMismatch {
                    edge: e.clone(),
                    want_start,
                    want_end,
                    found_start,
                    found_end,
                });
            }
        }
        for (e, _) in edge_map.iter() {
            if !source.has_edge(e) {
                return Err(GraphError::UnknownEdge(e.clone()));
            }
        }
        Ok(Self {
            source,
            target,
            vertex_map,
            edge_map,
        })
    }

    pub fn source(&self) -> &CausalNetwork {
        &self.source
    }

    pub fn target(&self) -> &CausalNetwork {
        &self.target
    }

    pub fn vertex_map(&self) -> &BTreeMap<VertexId, VertexId> {
        &self.vertex_map
    }

    pub fn edge_map(&self) -> &BTreeMap<EdgeId, Path> {
        &self.edge_map
    }

    pub fn vertex_image(&self, v: &VertexId) -> Result<&VertexId, GraphError> {
        self.vertex_map
            .get(v)
            .ok_or_else(|| GraphError::UnknownVertex(v.clone()))
    }

    pub fn edge_image(&self, e: &EdgeId) -> Result<&Path, GraphError> {
        self.edge_map
            .get(e)
            .ok_or_else(|| GraphError::UnknownEdge(e.clone()))
    }

    /// Image of a whole path: concatenation of the images of its edges.
    pub fn apply_to_path(&self, p: &Path) -> Result<Path, GraphError> {
        self.source.check_path(p)?;
        let anchor = self.vertex_image(p.anchor())?.clone();
        let mut edges = Vec::new();
        for e in p.edges() {
            edges.extend_from_slice(self.edge_image(e)?.edges());
        }
        Ok(Path::new(anchor, edges))
    }
}

/// Identity functor: fixes every vertex, sends every edge to itself.
pub fn identity_functor(n: &CausalNetwork) -> PathFunctor {
    let vertex_map = n.vertices().map(|v| (v.clone(), v.clone())).collect();
    let edge_map = n
        .edges()
        .map(|(e, ends)| (e.clone(), Path::new(ends.src.clone(), vec![e.clone()])))
        .collect();
    PathFunctor::new(n.clone(), n.clone(), vertex_map, edge_map)
        .expect("identity functor is always valid")
}

/// Composite `g` after `f`. Requires `f`'s target network to equal `g`'s
/// source network by id.
pub fn compose_functors(g: &PathFunctor, f: &PathFunctor) -> Result<PathFunctor, GraphError> {
    if f.target != g.source {
        return Err(GraphError::SourceTargetMismatch);
    }
    let vertex_map = f
        .vertex_map
        .iter()
        .map(|(v, w)| Ok((v.clone(), g.vertex_image(w)?.clone())))
        .collect::<Result<BTreeMap<_, _>, GraphError>>()?;
    let edge_map = f
        .edge_map
        .iter()
        .map(|(e, p)| Ok((e.clone(), g.apply_to_path(p)?)))
        .collect::<Result<BTreeMap<_, _>, GraphError>>()?;
    PathFunctor::new(f.source.clone(), g.target.clone(), vertex_map, edge_map)
}
