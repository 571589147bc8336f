//! Evaluation of the sub-diagram induced by a vertex subset: contract the
//! inner vertices in topological order against an ordered frontier of open
//! edges, producing a single morphism between the tensor of the ordered
//! incoming boundary and the tensor of the ordered outgoing boundary.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::diagram::{CausalDiagram, DiagramError};
use crate::ids::{EdgeId, VertexId};
use crate::smc::{perm_to_symmetry, tensor_all, Permutation, SmcError, SymmetricMonoidal};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("unknown vertex {0}")]
    UnknownVertex(VertexId),
    #[error("boundary order does not list {side} exactly once each: {detail}")]
    BoundaryOrderMismatch { side: &'static str, detail: String },
    #[error("vertex order is not a linearization of the subset")]
    BadLinearization,
    #[error(transparent)]
    Diagram(#[from] DiagramError),
    #[error(transparent)]
    Smc(#[from] SmcError),
}

/// The three-way split of the edges incident to a vertex subset `S`:
/// `dom` enters from outside, `cod` leaves to outside, `internal` stays
/// within.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InducedBoundary {
    pub dom: BTreeSet<EdgeId>,
    pub cod: BTreeSet<EdgeId>,
    pub internal: BTreeSet<EdgeId>,
}

/// Computes the induced boundary of `S`. Edges with both endpoints outside
/// `S` are not incident and are excluded entirely.
pub fn induced_boundary<V: SymmetricMonoidal>(
    d: &CausalDiagram<V>,
    subset: &BTreeSet<VertexId>,
) -> Result<InducedBoundary, EvalError> {
    for v in subset {
        if !d.network().has_vertex(v) {
            return Err(EvalError::UnknownVertex(v.clone()));
        }
    }
    let mut out = InducedBoundary {
        dom: BTreeSet::new(),
        cod: BTreeSet::new(),
        internal: BTreeSet::new(),
    };
    for (e, ends) in d.network().edges() {
        match (subset.contains(&ends.src), subset.contains(&ends.tgt)) {
            (false, true) => {
                out.dom.insert(e.clone());
            }
            (true, false) => {
                out.cod.insert(e.clone());
            }
            (true, true) => {
                out.internal.insert(e.clone());
            }
            (false, false) => {}
        }
    }
    Ok(out)
}

/// Chosen linear orders on the `dom` and `cod` boundary edges.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundaryOrder {
    dom_order: Vec<EdgeId>,
    cod_order: Vec<EdgeId>,
}

impl BoundaryOrder {
    pub fn new(
        boundary: &InducedBoundary,
        dom_order: Vec<EdgeId>,
        cod_order: Vec<EdgeId>,
    ) -> Result<Self, EvalError> {
        let check = |side: &'static str, order: &[EdgeId], want: &BTreeSet<EdgeId>| {
            let listed: BTreeSet<&EdgeId> = order.iter().collect();
            if listed.len() != order.len() || listed != want.iter().collect() {
                Err(EvalError::BoundaryOrderMismatch {
                    side,
                    detail: format!("listed {order:?}, boundary {want:?}"),
                })
            } else {
                Ok(())
            }
        };
        check("dom", &dom_order, &boundary.dom)?;
        check("cod", &cod_order, &boundary.cod)?;
        Ok(Self {
            dom_order,
            cod_order,
        })
    }

    /// Both boundary sets in sorted id order.
    pub fn canonical(boundary: &InducedBoundary) -> Self {
        Self {
            dom_order: boundary.dom.iter().cloned().collect(),
            cod_order: boundary.cod.iter().cloned().collect(),
        }
    }

    pub fn dom_order(&self) -> &[EdgeId] {
        &self.dom_order
    }

    pub fn cod_order(&self) -> &[EdgeId] {
        &self.cod_order
    }
}

/// Canonical topological order of the induced subgraph on `subset`.
fn canonical_linearization<V: SymmetricMonoidal>(
    d: &CausalDiagram<V>,
    subset: &BTreeSet<VertexId>,
) -> Vec<VertexId> {
    d.network()
        .topological_order()
        .expect("validated network")
        .into_iter()
        .filter(|v| subset.contains(v))
        .collect()
}

fn check_linearization<V: SymmetricMonoidal>(
    d: &CausalDiagram<V>,
    subset: &BTreeSet<VertexId>,
    order: &[VertexId],
) -> Result<(), EvalError> {
    let listed: BTreeSet<&VertexId> = order.iter().collect();
    if listed.len() != order.len() || listed != subset.iter().collect() {
        return Err(EvalError::BadLinearization);
    }
    let position: std::collections::BTreeMap<&VertexId, usize> =
        order.iter().enumerate().map(|(i, v)| (v, i)).collect();
    for (_, ends) in d.network().edges() {
        if let (Some(a), Some(b)) = (position.get(&ends.src), position.get(&ends.tgt)) {
            if a >= b {
                return Err(EvalError::BadLinearization);
            }
        }
    }
    Ok(())
}

/// Evaluates the sub-diagram induced by `subset` along an explicit
/// linearization of its vertices. All linearizations yield equal morphisms;
/// exposing the choice lets tests exercise exactly that.
pub fn value_with_order<V: SymmetricMonoidal>(
    d: &CausalDiagram<V>,
    subset: &BTreeSet<VertexId>,
    q: &BoundaryOrder,
    order: &[VertexId],
) -> Result<V::Mor, EvalError> {
    let boundary = induced_boundary(d, subset)?;
    // Re-anchor the boundary order against this subset.
    let q = BoundaryOrder::new(&boundary, q.dom_order.clone(), q.cod_order.clone())?;
    check_linearization(d, subset, order)?;

    let mut frontier: Vec<EdgeId> = q.dom_order.clone();
    let mut acc = V::identity(&tensor_all::<V>(&d.objects_along(&frontier)));
    for x in order {
        let orders = d.polarization().at(x);
        // Bring x's in-edges to the left, in polarization order, keeping the
        // other open edges in their current relative order.
        let rest: Vec<EdgeId> = frontier
            .iter()
            .filter(|e| !orders.in_order.contains(e))
            .cloned()
            .collect();
        let mut rearranged = orders.in_order.clone();
        rearranged.extend(rest.iter().cloned());
        let sigma = Permutation::matching(&frontier, &rearranged).map_err(EvalError::Smc)?;
        if !sigma.is_identity() {
            let perm = perm_to_symmetry::<V>(&sigma, &d.objects_along(&frontier));
            acc = V::compose(&perm, &acc).map_err(EvalError::Smc)?;
        }
        let step = V::tensor_mor(
            d.vertex_morphism(x),
            &V::identity(&tensor_all::<V>(&d.objects_along(&rest))),
        );
        acc = V::compose(&step, &acc).map_err(EvalError::Smc)?;
        frontier = orders.out_order.clone();
        frontier.extend(rest);
    }
    let sigma = Permutation::matching(&frontier, &q.cod_order).map_err(EvalError::Smc)?;
    if !sigma.is_identity() {
        let perm = perm_to_symmetry::<V>(&sigma, &d.objects_along(&frontier));
        acc = V::compose(&perm, &acc).map_err(EvalError::Smc)?;
    }
    Ok(acc)
}

/// Evaluates the sub-diagram induced by `subset` with the canonical
/// linearization.
pub fn value<V: SymmetricMonoidal>(
    d: &CausalDiagram<V>,
    subset: &BTreeSet<VertexId>,
    q: &BoundaryOrder,
) -> Result<V::Mor, EvalError> {
    let order = canonical_linearization(d, subset);
    value_with_order(d, subset, q, &order)
}

/// Evaluates the whole diagram: a morphism from the unit to the unit.
pub fn total_value<V: SymmetricMonoidal>(d: &CausalDiagram<V>) -> Result<V::Mor, EvalError> {
    let subset: BTreeSet<VertexId> = d.network().vertices().cloned().collect();
    let boundary = induced_boundary(d, &subset)?;
    let q = BoundaryOrder::canonical(&boundary);
    value(d, &subset, &q)
}
