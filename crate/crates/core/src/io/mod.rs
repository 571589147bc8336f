//! JSON serialization for every artifact, plus DOT export.
//!
//! Serialization is canonical: all maps are emitted in sorted key order and
//! list-valued fields are sorted where the domain type does not fix an
//! order, so `serialize . parse . serialize == serialize` byte for byte.
//! Parse errors carry the JSON path to the offending value; validation
//! errors surface the domain-level complaint.

pub mod dot;

use std::collections::{BTreeMap, BTreeSet};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::diagram::{CausalDiagram, GaugeWitness, Polarization, Valuation, VertexOrders};
use crate::functor::PathFunctor;
use crate::graph::{CausalNetwork, Path};
use crate::ids::{EdgeId, VertexId};
use crate::moves::ElementaryMove;
use crate::poset::Poset;
use crate::smc::SymmetricMonoidal;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IoError {
    #[error("parse error at {path}: {reason}")]
    Parse { path: String, reason: String },
    #[error("validation error: {0}")]
    Validation(String),
}

impl IoError {
    fn validation(err: impl std::fmt::Display) -> Self {
        IoError::Validation(err.to_string())
    }
}

fn parse_json<T: DeserializeOwned>(input: &str) -> Result<T, IoError> {
    let mut de = serde_json::Deserializer::from_str(input);
    serde_path_to_error::deserialize(&mut de).map_err(|e| IoError::Parse {
        path: e.path().to_string(),
        reason: e.inner().to_string(),
    })
}

fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("serialization of artifact types cannot fail")
}

// ---------------------------------------------------------------------------
// Networks

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EdgeJson {
    pub id: EdgeId,
    pub src: VertexId,
    pub tgt: VertexId,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NetworkJson {
    pub vertices: Vec<VertexId>,
    pub edges: Vec<EdgeJson>,
}

impl From<&CausalNetwork> for NetworkJson {
    fn from(n: &CausalNetwork) -> Self {
        Self {
            vertices: n.vertices().cloned().collect(),
            edges: n
                .edges()
                .map(|(e, ends)| EdgeJson {
                    id: e.clone(),
                    src: ends.src.clone(),
                    tgt: ends.tgt.clone(),
                })
                .collect(),
        }
    }
}

impl TryFrom<NetworkJson> for CausalNetwork {
    type Error = IoError;

    fn try_from(j: NetworkJson) -> Result<Self, IoError> {
        CausalNetwork::new(
            j.vertices,
            j.edges.into_iter().map(|e| (e.id, e.src, e.tgt)),
        )
        .map_err(IoError::validation)
    }
}

pub fn parse_network(input: &str) -> Result<CausalNetwork, IoError> {
    parse_json::<NetworkJson>(input)?.try_into()
}

pub fn serialize_network(n: &CausalNetwork) -> String {
    to_json(&NetworkJson::from(n))
}

// ---------------------------------------------------------------------------
// Functors

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PathJson {
    pub anchor: VertexId,
    pub edges: Vec<EdgeId>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FunctorJson {
    pub source: NetworkJson,
    pub target: NetworkJson,
    pub vmap: BTreeMap<VertexId, VertexId>,
    pub emap: BTreeMap<EdgeId, PathJson>,
}

impl From<&PathFunctor> for FunctorJson {
    fn from(f: &PathFunctor) -> Self {
        Self {
            source: f.source().into(),
            target: f.target().into(),
            vmap: f.vertex_map().clone(),
            emap: f
                .edge_map()
                .iter()
                .map(|(e, p)| {
                    (
                        e.clone(),
                        PathJson {
                            anchor: p.anchor().clone(),
                            edges: p.edges().to_vec(),
                        },
                    )
                })
                .collect(),
        }
    }
}

impl TryFrom<FunctorJson> for PathFunctor {
    type Error = IoError;

    fn try_from(j: FunctorJson) -> Result<Self, IoError> {
        let source: CausalNetwork = j.source.try_into()?;
        let target: CausalNetwork = j.target.try_into()?;
        PathFunctor::new(
            source,
            target,
            j.vmap,
            j.emap
                .into_iter()
                .map(|(e, p)| (e, Path::new(p.anchor, p.edges)))
                .collect(),
        )
        .map_err(IoError::validation)
    }
}

pub fn parse_functor(input: &str) -> Result<PathFunctor, IoError> {
    parse_json::<FunctorJson>(input)?.try_into()
}

pub fn serialize_functor(f: &PathFunctor) -> String {
    to_json(&FunctorJson::from(f))
}

// ---------------------------------------------------------------------------
// Moves

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum MoveJson {
    Iso {
        vmap: BTreeMap<VertexId, VertexId>,
        emap: BTreeMap<EdgeId, EdgeId>,
    },
    AddVertex {
        vertex: VertexId,
    },
    AddEdge {
        edge: EdgeId,
        src: VertexId,
        tgt: VertexId,
    },
    Subdivide {
        edge: EdgeId,
        new_vertex: VertexId,
        new_edges: (EdgeId, EdgeId),
    },
    MergeEdges {
        edges: BTreeSet<EdgeId>,
        merged: EdgeId,
    },
    ShrinkVertices {
        vertices: BTreeSet<VertexId>,
        new_vertex: VertexId,
    },
}

impl From<&ElementaryMove> for MoveJson {
    fn from(m: &ElementaryMove) -> Self {
        match m {
            ElementaryMove::Iso {
                vertex_map,
                edge_map,
            } => MoveJson::Iso {
                vmap: vertex_map.clone(),
                emap: edge_map.clone(),
            },
            ElementaryMove::AddVertex { vertex } => MoveJson::AddVertex {
                vertex: vertex.clone(),
            },
            ElementaryMove::AddEdge { edge, src, tgt } => MoveJson::AddEdge {
                edge: edge.clone(),
                src: src.clone(),
                tgt: tgt.clone(),
            },
            ElementaryMove::Subdivide {
                edge,
                new_vertex,
                new_edges,
            } => MoveJson::Subdivide {
                edge: edge.clone(),
                new_vertex: new_vertex.clone(),
                new_edges: new_edges.clone(),
            },
            ElementaryMove::MergeEdges { edges, merged } => MoveJson::MergeEdges {
                edges: edges.clone(),
                merged: merged.clone(),
            },
            ElementaryMove::ShrinkVertices {
                vertices,
                new_vertex,
            } => MoveJson::ShrinkVertices {
                vertices: vertices.clone(),
                new_vertex: new_vertex.clone(),
            },
        }
    }
}

impl From<MoveJson> for ElementaryMove {
    fn from(j: MoveJson) -> Self {
        match j {
            MoveJson::Iso { vmap, emap } => ElementaryMove::Iso {
                vertex_map: vmap,
                edge_map: emap,
            },
            MoveJson::AddVertex { vertex } => ElementaryMove::AddVertex { vertex },
            MoveJson::AddEdge { edge, src, tgt } => ElementaryMove::AddEdge { edge, src, tgt },
            MoveJson::Subdivide {
                edge,
                new_vertex,
                new_edges,
            } => ElementaryMove::Subdivide {
                edge,
                new_vertex,
                new_edges,
            },
            MoveJson::MergeEdges { edges, merged } => ElementaryMove::MergeEdges { edges, merged },
            MoveJson::ShrinkVertices {
                vertices,
                new_vertex,
            } => ElementaryMove::ShrinkVertices {
                vertices,
                new_vertex,
            },
        }
    }
}

/// Accepts either a bare move array or an object with a `moves` field (the
/// shape `decompose` emits), so command pipelines compose without editing.
pub fn parse_moves(input: &str) -> Result<Vec<ElementaryMove>, IoError> {
    #[derive(Deserialize)]
    struct Wrapped {
        moves: Vec<MoveJson>,
    }
    let parsed = match parse_json::<Vec<MoveJson>>(input) {
        Ok(moves) => moves,
        Err(as_array) => match parse_json::<Wrapped>(input) {
            Ok(w) => w.moves,
            Err(_) => return Err(as_array),
        },
    };
    Ok(parsed.into_iter().map(ElementaryMove::from).collect())
}

pub fn serialize_moves(moves: &[ElementaryMove]) -> String {
    to_json(&moves.iter().map(MoveJson::from).collect::<Vec<_>>())
}

// ---------------------------------------------------------------------------
// Posets

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PosetJson {
    pub elements: Vec<VertexId>,
    pub relation: Vec<(VertexId, VertexId)>,
}

impl From<&Poset> for PosetJson {
    fn from(p: &Poset) -> Self {
        Self {
            elements: p.elements().cloned().collect(),
            relation: p.relation().cloned().collect(),
        }
    }
}

pub fn parse_poset(input: &str) -> Result<Poset, IoError> {
    let j = parse_json::<PosetJson>(input)?;
    Poset::new(j.elements, j.relation).map_err(IoError::validation)
}

pub fn serialize_poset(p: &Poset) -> String {
    to_json(&PosetJson::from(p))
}

// ---------------------------------------------------------------------------
// Diagrams and witnesses

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PolEntryJson {
    #[serde(rename = "in")]
    pub in_order: Vec<EdgeId>,
    #[serde(rename = "out")]
    pub out_order: Vec<EdgeId>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ValJson<O, M> {
    pub edges: BTreeMap<EdgeId, O>,
    pub vertices: BTreeMap<VertexId, M>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DiagramJson<O, M> {
    pub smc: String,
    pub network: NetworkJson,
    pub pol: BTreeMap<VertexId, PolEntryJson>,
    pub val: ValJson<O, M>,
}

/// Reads just the `smc` tag of a diagram or witness file, for dispatch.
pub fn peek_smc_tag(input: &str) -> Result<String, IoError> {
    #[derive(Deserialize)]
    struct Tagged {
        smc: String,
    }
    Ok(parse_json::<Tagged>(input)?.smc)
}

pub fn diagram_to_json<V: SymmetricMonoidal>(d: &CausalDiagram<V>) -> DiagramJson<V::Obj, V::Mor> {
    DiagramJson {
        smc: V::NAME.to_owned(),
        network: d.network().into(),
        pol: d
            .polarization()
            .orders()
            .iter()
            .map(|(v, o)| {
                (
                    v.clone(),
                    PolEntryJson {
                        in_order: o.in_order.clone(),
                        out_order: o.out_order.clone(),
                    },
                )
            })
            .collect(),
        val: ValJson {
            edges: d.valuation().edge_objects.clone(),
            vertices: d.valuation().vertex_morphisms.clone(),
        },
    }
}

pub fn diagram_from_json<V: SymmetricMonoidal>(
    j: DiagramJson<V::Obj, V::Mor>,
) -> Result<CausalDiagram<V>, IoError> {
    if j.smc != V::NAME {
        return Err(IoError::Validation(format!(
            "diagram is tagged {:?}, expected {:?}",
            j.smc,
            V::NAME
        )));
    }
    let network: CausalNetwork = j.network.try_into()?;
    let polarization = Polarization::new(
        j.pol
            .into_iter()
            .map(|(v, o)| {
                (
                    v,
                    VertexOrders {
                        in_order: o.in_order,
                        out_order: o.out_order,
                    },
                )
            })
            .collect(),
    );
    CausalDiagram::new(
        network,
        polarization,
        Valuation {
            edge_objects: j.val.edges,
            vertex_morphisms: j.val.vertices,
        },
    )
    .map_err(IoError::validation)
}

pub fn parse_diagram<V: SymmetricMonoidal>(input: &str) -> Result<CausalDiagram<V>, IoError> {
    // Check the instance tag before deserializing instance-specific payloads,
    // so a mismatch surfaces as a validation error rather than a type error.
    let tag = peek_smc_tag(input)?;
    if tag != V::NAME {
        return Err(IoError::Validation(format!(
            "diagram is tagged {tag:?}, expected {:?}",
            V::NAME
        )));
    }
    diagram_from_json::<V>(parse_json(input)?)
}

pub fn serialize_diagram<V: SymmetricMonoidal>(d: &CausalDiagram<V>) -> String {
    to_json(&diagram_to_json::<V>(d))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WitnessEntryJson<M> {
    pub fwd: M,
    pub inv: M,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WitnessJson<M> {
    pub smc: String,
    pub edges: BTreeMap<EdgeId, WitnessEntryJson<M>>,
}

pub fn parse_witness<V: SymmetricMonoidal>(input: &str) -> Result<GaugeWitness<V>, IoError> {
    let tag = peek_smc_tag(input)?;
    if tag != V::NAME {
        return Err(IoError::Validation(format!(
            "witness is tagged {tag:?}, expected {:?}",
            V::NAME
        )));
    }
    let j: WitnessJson<V::Mor> = parse_json(input)?;
    GaugeWitness::new(
        j.edges
            .into_iter()
            .map(|(e, pair)| (e, (pair.fwd, pair.inv)))
            .collect(),
    )
    .map_err(IoError::validation)
}

pub fn serialize_witness<V: SymmetricMonoidal>(w: &GaugeWitness<V>) -> String {
    to_json(&WitnessJson {
        smc: V::NAME.to_owned(),
        edges: w
            .maps()
            .iter()
            .map(|(e, (fwd, inv))| {
                (
                    e.clone(),
                    WitnessEntryJson {
                        fwd: fwd.clone(),
                        inv: inv.clone(),
                    },
                )
            })
            .collect(),
    })
}
