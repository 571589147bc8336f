//! Transport of causal diagrams along graph deformations.
//!
//! Each elementary move on the underlying network induces a map on diagrams:
//! relabelings carry the data across, a fresh vertex receives the identity
//! on the unit, a fresh edge carries the unit object placed first in the
//! affected orders, a subdivided edge duplicates its object with an identity
//! at the middle, merged parallel edges tensor their objects, and a shrunken
//! vertex subset is replaced by its evaluated sub-diagram. Arbitrary
//! functors transport by decomposition into moves.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::diagram::{
    side_transport, CausalDiagram, DiagramError, GaugeWitness, Polarization, Valuation,
    VertexOrders,
};
use crate::eval::{induced_boundary, value, BoundaryOrder, EvalError};
use crate::functor::PathFunctor;
use crate::ids::{EdgeId, VertexId};
use crate::moves::{apply_move, decompose, ElementaryMove, MoveError};
use crate::smc::{perm_to_symmetry, tensor_all, Permutation, SymmetricMonoidal};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NerveError {
    #[error("move not applicable to the diagram's network: {0}")]
    MoveInapplicable(String),
    #[error(transparent)]
    Move(#[from] MoveError),
    #[error(transparent)]
    Diagram(#[from] DiagramError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Graph(#[from] crate::graph::GraphError),
}

/// Replaces `old` by the block `block` at the position where a member of
/// `members` first occurs; all members are removed.
fn splice_block(
    old: &[EdgeId],
    members: &dyn Fn(&EdgeId) -> bool,
    block: &[EdgeId],
) -> Vec<EdgeId> {
    let mut out = Vec::with_capacity(old.len());
    let mut placed = false;
    for e in old {
        if members(e) {
            if !placed {
                out.extend(block.iter().cloned());
                placed = true;
            }
        } else {
            out.push(e.clone());
        }
    }
    if !placed {
        out.extend(block.iter().cloned());
    }
    out
}

/// Transports a causal diagram along one elementary move of its network.
pub fn nerve_move<V: SymmetricMonoidal>(
    d: &CausalDiagram<V>,
    m: &ElementaryMove,
) -> Result<CausalDiagram<V>, NerveError> {
    let (net2, _) = apply_move(d.network(), m)?;
    match m {
        ElementaryMove::Iso {
            vertex_map,
            edge_map,
        } => {
            let orders = d
                .polarization()
                .orders()
                .iter()
                .map(|(v, vo)| {
                    (
                        vertex_map[v].clone(),
                        VertexOrders {
                            in_order: vo.in_order.iter().map(|e| edge_map[e].clone()).collect(),
                            out_order: vo.out_order.iter().map(|e| edge_map[e].clone()).collect(),
                        },
                    )
                })
                .collect();
            let valuation = Valuation {
                edge_objects: d
                    .valuation()
                    .edge_objects
                    .iter()
                    .map(|(e, o)| (edge_map[e].clone(), o.clone()))
                    .collect(),
                vertex_morphisms: d
                    .valuation()
                    .vertex_morphisms
                    .iter()
                    .map(|(v, f)| (vertex_map[v].clone(), f.clone()))
                    .collect(),
            };
            Ok(CausalDiagram::new(net2, Polarization::new(orders), valuation)?)
        }
        ElementaryMove::AddVertex { vertex } => {
            let mut orders = d.polarization().orders().clone();
            orders.insert(vertex.clone(), VertexOrders::default());
            let mut valuation = d.valuation().clone();
            valuation
                .vertex_morphisms
                .insert(vertex.clone(), V::identity(&V::unit()));
            Ok(CausalDiagram::new(net2, Polarization::new(orders), valuation)?)
        }
        ElementaryMove::AddEdge { edge, src, tgt } => {
            let mut orders = d.polarization().orders().clone();
            let out = orders
                .get_mut(src)
                .ok_or_else(|| NerveError::MoveInapplicable(format!("unknown vertex {src}")))?;
            out.out_order.insert(0, edge.clone());
            let inn = orders
                .get_mut(tgt)
                .ok_or_else(|| NerveError::MoveInapplicable(format!("unknown vertex {tgt}")))?;
            inn.in_order.insert(0, edge.clone());
            let mut valuation = d.valuation().clone();
            valuation.edge_objects.insert(edge.clone(), V::unit());
            // Strict unit: tensoring the unit in first leaves every boundary
            // object unchanged, so vertex morphisms carry over as they are.
            Ok(CausalDiagram::new(net2, Polarization::new(orders), valuation)?)
        }
        ElementaryMove::Subdivide {
            edge,
            new_vertex,
            new_edges: (first, second),
        } => {
            let obj = d.edge_object(edge).clone();
            let ends = d.network().edge_ends(edge)?.clone();
            let mut orders = d.polarization().orders().clone();
            for e in orders
                .get_mut(&ends.src)
                .expect("validated")
                .out_order
                .iter_mut()
            {
                if e == edge {
                    *e = first.clone();
                }
            }
            for e in orders
                .get_mut(&ends.tgt)
                .expect("validated")
                .in_order
                .iter_mut()
            {
                if e == edge {
                    *e = second.clone();
                }
            }
            orders.insert(
                new_vertex.clone(),
                VertexOrders {
                    in_order: vec![first.clone()],
                    out_order: vec![second.clone()],
                },
            );
            let mut valuation = d.valuation().clone();
            valuation.edge_objects.remove(edge);
            valuation.edge_objects.insert(first.clone(), obj.clone());
            valuation.edge_objects.insert(second.clone(), obj.clone());
            valuation
                .vertex_morphisms
                .insert(new_vertex.clone(), V::identity(&obj));
            Ok(CausalDiagram::new(net2, Polarization::new(orders), valuation)?)
        }
        ElementaryMove::MergeEdges { edges, merged } => {
            let any = edges.iter().next().expect("apply_move checked nonempty");
            let ends = d.network().edge_ends(any)?.clone();
            let old_out = d.polarization().at(&ends.src).clone();
            let old_in = d.polarization().at(&ends.tgt).clone();
            // Canonical order of the merged family: source-side order.
            let family: Vec<EdgeId> = old_out
                .out_order
                .iter()
                .filter(|e| edges.contains(*e))
                .cloned()
                .collect();
            let merged_obj = tensor_all::<V>(&d.objects_along(&family));

            let is_member = |e: &EdgeId| edges.contains(e);
            let new_out = splice_block(&old_out.out_order, &is_member, &[merged.clone()]);
            let new_in = splice_block(&old_in.in_order, &is_member, &[merged.clone()]);
            // Reordered-but-unmerged views, to conjugate the endpoints by.
            let expanded_out = splice_block(&old_out.out_order, &is_member, &family);
            let expanded_in = splice_block(&old_in.in_order, &is_member, &family);

            let sigma_out = Permutation::matching(&old_out.out_order, &expanded_out)
                .map_err(DiagramError::Smc)?;
            let sigma_in = Permutation::matching(&old_in.in_order, &expanded_in)
                .map_err(DiagramError::Smc)?;
            let src_mor = V::compose(
                &perm_to_symmetry::<V>(&sigma_out, &d.objects_along(&old_out.out_order)),
                d.vertex_morphism(&ends.src),
            )
            .map_err(DiagramError::Smc)?;
            let tgt_mor = V::compose(
                d.vertex_morphism(&ends.tgt),
                &perm_to_symmetry::<V>(
                    &sigma_in.inverse(),
                    &sigma_in.permute(&d.objects_along(&old_in.in_order)),
                ),
            )
            .map_err(DiagramError::Smc)?;

            let mut orders = d.polarization().orders().clone();
            orders.get_mut(&ends.src).expect("validated").out_order = new_out;
            orders.get_mut(&ends.tgt).expect("validated").in_order = new_in;
            let mut valuation = d.valuation().clone();
            for e in edges {
                valuation.edge_objects.remove(e);
            }
            valuation.edge_objects.insert(merged.clone(), merged_obj);
            valuation.vertex_morphisms.insert(ends.src.clone(), src_mor);
            valuation.vertex_morphisms.insert(ends.tgt.clone(), tgt_mor);
            Ok(CausalDiagram::new(net2, Polarization::new(orders), valuation)?)
        }
        ElementaryMove::ShrinkVertices {
            vertices,
            new_vertex,
        } => {
            let q = canonical_boundary_order(d, vertices)?;
            let subset = vertices.iter().cloned().collect();
            let vertex_value = value(d, &subset, &q)?;
            let mut orders: BTreeMap<VertexId, VertexOrders> = d
                .polarization()
                .orders()
                .iter()
                .filter(|(v, _)| !vertices.contains(*v))
                .map(|(v, vo)| (v.clone(), vo.clone()))
                .collect();
            orders.insert(
                new_vertex.clone(),
                VertexOrders {
                    in_order: q.dom_order().to_vec(),
                    out_order: q.cod_order().to_vec(),
                },
            );
            let valuation = Valuation {
                edge_objects: d
                    .valuation()
                    .edge_objects
                    .iter()
                    .filter(|(e, _)| net2.has_edge(e))
                    .map(|(e, o)| (e.clone(), o.clone()))
                    .collect(),
                vertex_morphisms: d
                    .valuation()
                    .vertex_morphisms
                    .iter()
                    .filter(|(v, _)| !vertices.contains(*v))
                    .map(|(v, f)| (v.clone(), f.clone()))
                    .chain([(new_vertex.clone(), vertex_value)])
                    .collect(),
            };
            Ok(CausalDiagram::new(net2, Polarization::new(orders), valuation)?)
        }
    }
}

/// The deterministic boundary order used when shrinking `subset`: edges
/// sorted by the topological index of their endpoint inside the subset,
/// then by that endpoint's polarization position.
pub fn canonical_boundary_order<V: SymmetricMonoidal>(
    d: &CausalDiagram<V>,
    subset: &std::collections::BTreeSet<VertexId>,
) -> Result<BoundaryOrder, NerveError> {
    let topo = d.network().topological_index()?;
    let boundary = induced_boundary(d, subset)?;
    let key = |e: &EdgeId, incoming: bool| -> (usize, usize) {
        let ends = d.network().edge_ends(e).expect("validated edge");
        let (anchor, orders) = if incoming {
            (&ends.tgt, &d.polarization().at(&ends.tgt).in_order)
        } else {
            (&ends.src, &d.polarization().at(&ends.src).out_order)
        };
        let pos = orders.iter().position(|x| x == e).expect("validated polarization");
        (topo[anchor], pos)
    };
    let mut dom_order: Vec<EdgeId> = boundary.dom.iter().cloned().collect();
    dom_order.sort_by_key(|e| key(e, true));
    let mut cod_order: Vec<EdgeId> = boundary.cod.iter().cloned().collect();
    cod_order.sort_by_key(|e| key(e, false));
    Ok(BoundaryOrder::new(&boundary, dom_order, cod_order).map_err(NerveError::Eval)?)
}

/// Transports a diagram along an arbitrary functor out of its network by
/// folding [`nerve_move`] over a decomposition of the functor.
pub fn nerve_apply<V: SymmetricMonoidal>(
    d: &CausalDiagram<V>,
    f: &PathFunctor,
) -> Result<CausalDiagram<V>, NerveError> {
    if f.source() != d.network() {
        return Err(NerveError::MoveInapplicable(
            "functor source differs from the diagram's network".into(),
        ));
    }
    let moves = decompose(f)?;
    nerve_apply_moves(d, &moves)
}

/// Folds [`nerve_move`] over an explicit move list.
pub fn nerve_apply_moves<V: SymmetricMonoidal>(
    d: &CausalDiagram<V>,
    moves: &[ElementaryMove],
) -> Result<CausalDiagram<V>, NerveError> {
    let mut out = d.clone();
    for m in moves {
        out = nerve_move(&out, m)?;
    }
    Ok(out)
}

/// Given gauge-equivalent inputs `d` and `d2` with witness `w`, derives the
/// witness between `nerve_move(d, m)` and `nerve_move(d2, m)`.
pub fn transport_witness<V: SymmetricMonoidal>(
    d: &CausalDiagram<V>,
    d2: &CausalDiagram<V>,
    w: &GaugeWitness<V>,
    m: &ElementaryMove,
) -> Result<GaugeWitness<V>, NerveError> {
    let maps = w.maps();
    let transported: BTreeMap<EdgeId, (V::Mor, V::Mor)> = match m {
        ElementaryMove::Iso { edge_map, .. } => maps
            .iter()
            .map(|(e, pair)| (edge_map[e].clone(), pair.clone()))
            .collect(),
        ElementaryMove::AddVertex { .. } => maps.clone(),
        ElementaryMove::AddEdge { edge, .. } => {
            let id = V::identity(&V::unit());
            maps.iter()
                .map(|(e, pair)| (e.clone(), pair.clone()))
                .chain([(edge.clone(), (id.clone(), id))])
                .collect()
        }
        ElementaryMove::Subdivide {
            edge,
            new_edges: (first, second),
            ..
        } => {
            let pair = maps
                .get(edge)
                .ok_or_else(|| DiagramError::WitnessIncomplete(edge.clone()))?
                .clone();
            maps.iter()
                .filter(|(e, _)| *e != edge)
                .map(|(e, p)| (e.clone(), p.clone()))
                .chain([(first.clone(), pair.clone()), (second.clone(), pair)])
                .collect()
        }
        ElementaryMove::MergeEdges { edges, merged } => {
            let any = edges.iter().next().expect("nonempty merge family");
            let ends = d.network().edge_ends(any)?.clone();
            // The same source-side canonical order nerve_move uses, read off
            // each input separately.
            let family_of = |dia: &CausalDiagram<V>| -> Vec<EdgeId> {
                dia.polarization()
                    .at(&ends.src)
                    .out_order
                    .iter()
                    .filter(|e| edges.contains(*e))
                    .cloned()
                    .collect()
            };
            let family_d = family_of(d);
            let family_d2 = family_of(d2);
            let (fwd, inv) = side_transport::<V>(
                &family_d,
                &family_d2,
                &d2.objects_along(&family_d),
                w,
            )?;
            maps.iter()
                .filter(|(e, _)| !edges.contains(*e))
                .map(|(e, p)| (e.clone(), p.clone()))
                .chain([(merged.clone(), (fwd, inv))])
                .collect()
        }
        ElementaryMove::ShrinkVertices { vertices, .. } => {
            let internal = |e: &EdgeId| {
                let ends = d.network().edge_ends(e).expect("edge of the network");
                vertices.contains(&ends.src) && vertices.contains(&ends.tgt)
            };
            maps.iter()
                .filter(|(e, _)| !internal(e))
                .map(|(e, p)| (e.clone(), p.clone()))
                .collect()
        }
    };
    Ok(GaugeWitness::from_checked(transported))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::gauge_check;
    use crate::eval::total_value;
    use crate::graph::CausalNetwork;
    use crate::smc::{MatQ, RatMatrix};
    use num_rational::BigRational;

    fn vid(s: &str) -> VertexId {
        VertexId::from(s)
    }

    fn eid(s: &str) -> EdgeId {
        EdgeId::from(s)
    }

    /// Closed diagram x --e--> y in MatQ with a 2-dimensional edge.
    fn closed_chain() -> CausalDiagram<MatQ> {
        let net = CausalNetwork::from_parts(&["x", "y"], &[("e", "x", "y")]).unwrap();
        CausalDiagram::new(
            net.clone(),
            Polarization::canonical(&net),
            Valuation {
                edge_objects: [(eid("e"), 2usize)].into(),
                vertex_morphisms: [
                    (vid("x"), RatMatrix::from_ints(&[&[1], &[2]])),
                    (vid("y"), RatMatrix::from_ints(&[&[3, 5]])),
                ]
                .into(),
            },
        )
        .unwrap()
    }

    #[test]
    fn added_vertex_carries_unit_identity() {
        let d = closed_chain();
        let out = nerve_move(&d, &ElementaryMove::AddVertex { vertex: vid("w") }).unwrap();
        assert_eq!(out.vertex_morphism(&vid("w")), &RatMatrix::identity(1));
        assert_eq!(
            total_value(&d).unwrap().scalar(),
            total_value(&out).unwrap().scalar()
        );
    }

    #[test]
    fn added_edge_is_unit_and_first() {
        let d = closed_chain();
        let out = nerve_move(
            &d,
            &ElementaryMove::AddEdge {
                edge: eid("u"),
                src: vid("x"),
                tgt: vid("y"),
            },
        )
        .unwrap();
        assert_eq!(out.edge_object(&eid("u")), &1usize);
        assert_eq!(
            out.polarization().at(&vid("x")).out_order,
            vec![eid("u"), eid("e")]
        );
        assert_eq!(
            out.polarization().at(&vid("y")).in_order,
            vec![eid("u"), eid("e")]
        );
        // Unit insertion leaves the evaluation unchanged.
        assert_eq!(
            total_value(&out).unwrap().scalar().unwrap(),
            &BigRational::from_integer(13.into())
        );
    }

    #[test]
    fn subdivide_then_shrink_preserves_total_value() {
        let d = closed_chain();
        let sub = nerve_move(
            &d,
            &ElementaryMove::Subdivide {
                edge: eid("e"),
                new_vertex: vid("v"),
                new_edges: (eid("e1"), eid("e2")),
            },
        )
        .unwrap();
        assert_eq!(sub.vertex_morphism(&vid("v")), &RatMatrix::identity(2));
        assert_eq!(sub.edge_object(&eid("e1")), &2usize);
        let shrunk = nerve_move(
            &sub,
            &ElementaryMove::ShrinkVertices {
                vertices: [vid("v")].into(),
                new_vertex: vid("z"),
            },
        )
        .unwrap();
        // The middle identity evaluates away.
        assert_eq!(shrunk.vertex_morphism(&vid("z")), &RatMatrix::identity(2));
        for diagram in [&d, &sub, &shrunk] {
            assert_eq!(
                total_value(diagram).unwrap().scalar().unwrap(),
                &BigRational::from_integer(13.into())
            );
        }
    }

    #[test]
    fn merge_tensors_objects_and_conjugates_endpoints() {
        // Two parallel edges of dimensions 2 and 3.
        let net = CausalNetwork::from_parts(&["x", "y"], &[("e1", "x", "y"), ("e2", "x", "y")])
            .unwrap();
        let x_mor = RatMatrix::from_ints(&[&[1], &[0], &[2], &[0], &[0], &[3]]);
        let y_mor = RatMatrix::from_ints(&[&[1, 1, 0, 0, 1, 0]]);
        let d = CausalDiagram::<MatQ>::new(
            net.clone(),
            Polarization::canonical(&net),
            Valuation {
                edge_objects: [(eid("e1"), 2usize), (eid("e2"), 3usize)].into(),
                vertex_morphisms: [(vid("x"), x_mor.clone()), (vid("y"), y_mor.clone())].into(),
            },
        )
        .unwrap();
        let out = nerve_move(
            &d,
            &ElementaryMove::MergeEdges {
                edges: [eid("e1"), eid("e2")].into(),
                merged: eid("m"),
            },
        )
        .unwrap();
        assert_eq!(out.edge_object(&eid("m")), &6usize);
        // Orders already had e1 before e2 and the block replaces them in
        // place, so the endpoint morphisms are unchanged here.
        assert_eq!(out.vertex_morphism(&vid("x")), &x_mor);
        assert_eq!(out.vertex_morphism(&vid("y")), &y_mor);
        assert_eq!(
            total_value(&d).unwrap().scalar(),
            total_value(&out).unwrap().scalar()
        );
    }

    #[test]
    fn merge_respects_gauge_with_transported_witness() {
        let net = CausalNetwork::from_parts(&["x", "y"], &[("e1", "x", "y"), ("e2", "x", "y")])
            .unwrap();
        let d = CausalDiagram::<MatQ>::new(
            net.clone(),
            Polarization::canonical(&net),
            Valuation {
                edge_objects: [(eid("e1"), 2usize), (eid("e2"), 2usize)].into(),
                vertex_morphisms: [
                    (vid("x"), RatMatrix::from_ints(&[&[1], &[0], &[2], &[1]])),
                    (vid("y"), RatMatrix::from_ints(&[&[1, 1, 0, 1]])),
                ]
                .into(),
            },
        )
        .unwrap();
        // Gauge-transform with a different order at y and a nontrivial map
        // on e1.
        let g = RatMatrix::from_ints(&[&[1, 1], &[0, 1]]);
        let w = crate::diagram::GaugeWitness::new(
            [
                (eid("e1"), (g.clone(), g.inverse().unwrap())),
                (eid("e2"), (RatMatrix::identity(2), RatMatrix::identity(2))),
            ]
            .into(),
        )
        .unwrap();
        let mut orders = d.polarization().orders().clone();
        orders.get_mut(&vid("y")).unwrap().in_order = vec![eid("e2"), eid("e1")];
        let d2 =
            crate::diagram::gauge_transform(&d, &w, Polarization::new(orders)).unwrap();
        assert!(gauge_check(&d, &d2, &w).unwrap());

        let m = ElementaryMove::MergeEdges {
            edges: [eid("e1"), eid("e2")].into(),
            merged: eid("m"),
        };
        let out = nerve_move(&d, &m).unwrap();
        let out2 = nerve_move(&d2, &m).unwrap();
        let tw = transport_witness(&d, &d2, &w, &m).unwrap();
        assert!(gauge_check(&out, &out2, &tw).unwrap());
    }

    #[test]
    fn shrink_assigns_the_subset_value() {
        let net = CausalNetwork::from_parts(
            &["p", "x", "y", "q"],
            &[("in", "p", "x"), ("e", "x", "y"), ("out", "y", "q")],
        )
        .unwrap();
        let mx = RatMatrix::from_ints(&[&[1, 0], &[1, 1]]);
        let my = RatMatrix::from_ints(&[&[2, 1], &[0, 1]]);
        let d = CausalDiagram::<MatQ>::new(
            net.clone(),
            Polarization::canonical(&net),
            Valuation {
                edge_objects: [(eid("in"), 2usize), (eid("e"), 2usize), (eid("out"), 2usize)]
                    .into(),
                vertex_morphisms: [
                    (vid("p"), RatMatrix::from_ints(&[&[1], &[1]])),
                    (vid("x"), mx.clone()),
                    (vid("y"), my.clone()),
                    (vid("q"), RatMatrix::from_ints(&[&[1, 2]])),
                ]
                .into(),
            },
        )
        .unwrap();
        let out = nerve_move(
            &d,
            &ElementaryMove::ShrinkVertices {
                vertices: [vid("x"), vid("y")].into(),
                new_vertex: vid("z"),
            },
        )
        .unwrap();
        assert_eq!(out.vertex_morphism(&vid("z")), &my.matmul(&mx).unwrap());
        assert_eq!(
            total_value(&d).unwrap().scalar(),
            total_value(&out).unwrap().scalar()
        );
    }

    #[test]
    fn nerve_apply_identity_is_identity() {
        let d = closed_chain();
        let f = crate::functor::identity_functor(d.network());
        let out = nerve_apply(&d, &f).unwrap();
        assert_eq!(out, d);
    }

    #[test]
    fn nerve_apply_matches_single_move() {
        let d = closed_chain();
        let m = ElementaryMove::Subdivide {
            edge: eid("e"),
            new_vertex: vid("v"),
            new_edges: (eid("e1"), eid("e2")),
        };
        let (_, f) = apply_move(d.network(), &m).unwrap();
        let via_move = nerve_move(&d, &m).unwrap();
        let via_functor = nerve_apply(&d, &f).unwrap();
        assert_eq!(
            total_value(&via_move).unwrap().scalar(),
            total_value(&via_functor).unwrap().scalar()
        );
    }
}
