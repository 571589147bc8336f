//! Seeded random generators shared by the integration suites.
//!
//! Everything here is deterministic given the seed, so failures reproduce.
//! Diagram generation keeps the set of simultaneously open edges small (both
//! in count and in tensor dimension) so exact rational evaluation stays fast.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use caunet::diagram::{
    gauge_transform, CausalDiagram, GaugeWitness, Polarization, Valuation, VertexOrders,
};
use caunet::moves::{apply_move, apply_moves, ElementaryMove};
use caunet::smc::{MatQ, RatMatrix};
use caunet::{CausalNetwork, EdgeId, PathFunctor, VertexId};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn vid(s: impl AsRef<str>) -> VertexId {
    VertexId::from(s.as_ref())
}

pub fn eid(s: impl AsRef<str>) -> EdgeId {
    EdgeId::from(s.as_ref())
}

// ---------------------------------------------------------------------------
// Networks and moves

/// A random DAG: vertices in a fixed creation order, edges only forward, so
/// acyclicity holds by construction. Parallel edges are deliberately common.
pub fn random_dag(rng: &mut ChaCha8Rng, max_vertices: usize, max_edges: usize) -> CausalNetwork {
    let n = rng.random_range(1..=max_vertices);
    let vertices: Vec<VertexId> = (0..n).map(|i| vid(format!("v{i}"))).collect();
    let mut edges = Vec::new();
    if n >= 2 {
        let e_count = rng.random_range(0..=max_edges);
        for k in 0..e_count {
            let i = rng.random_range(0..n - 1);
            let j = rng.random_range(i + 1..n);
            edges.push((eid(format!("e{k}")), vertices[i].clone(), vertices[j].clone()));
        }
    }
    CausalNetwork::new(vertices, edges).expect("forward edges cannot cycle")
}

/// Picks one applicable elementary move for the network, using `tag` to mint
/// fresh ids.
pub fn random_move(
    rng: &mut ChaCha8Rng,
    net: &CausalNetwork,
    tag: &mut usize,
) -> ElementaryMove {
    let mut fresh_v = || {
        *tag += 1;
        vid(format!("m{tag}v"))
    };
    let fresh_e = |tag: &mut usize| {
        *tag += 1;
        eid(format!("m{tag}e"))
    };
    let mut kinds: Vec<u8> = vec![0, 1, 2, 3, 4, 5];
    kinds.shuffle(rng);
    for kind in kinds {
        match kind {
            0 => {
                // Fresh relabeling of everything.
                *tag += 1;
                let t = *tag;
                let vertex_map: BTreeMap<VertexId, VertexId> = net
                    .vertices()
                    .map(|v| (v.clone(), vid(format!("r{t}_{v}"))))
                    .collect();
                let edge_map: BTreeMap<EdgeId, EdgeId> = net
                    .edges()
                    .map(|(e, _)| (e.clone(), eid(format!("r{t}_{e}"))))
                    .collect();
                return ElementaryMove::Iso {
                    vertex_map,
                    edge_map,
                };
            }
            1 => {
                return ElementaryMove::AddVertex { vertex: fresh_v() };
            }
            2 => {
                // Forward edge along the topological order stays acyclic.
                let order = net.topological_order().expect("valid network");
                if order.len() < 2 {
                    continue;
                }
                let i = rng.random_range(0..order.len() - 1);
                let j = rng.random_range(i + 1..order.len());
                return ElementaryMove::AddEdge {
                    edge: fresh_e(tag),
                    src: order[i].clone(),
                    tgt: order[j].clone(),
                };
            }
            3 => {
                let edges: Vec<EdgeId> = net.edges().map(|(e, _)| e.clone()).collect();
                let Some(edge) = edges.choose(rng).cloned() else {
                    continue;
                };
                return ElementaryMove::Subdivide {
                    edge,
                    new_vertex: fresh_v(),
                    new_edges: (fresh_e(tag), fresh_e(tag)),
                };
            }
            4 => {
                let mut families: BTreeMap<(VertexId, VertexId), Vec<EdgeId>> = BTreeMap::new();
                for (e, ends) in net.edges() {
                    families
                        .entry((ends.src.clone(), ends.tgt.clone()))
                        .or_default()
                        .push(e.clone());
                }
                let parallel: Vec<&Vec<EdgeId>> =
                    families.values().filter(|f| f.len() >= 2).collect();
                let Some(family) = parallel.choose(rng) else {
                    continue;
                };
                let take = rng.random_range(2..=family.len());
                let mut picked = (*family).clone();
                picked.shuffle(rng);
                picked.truncate(take);
                return ElementaryMove::MergeEdges {
                    edges: picked.into_iter().collect(),
                    merged: fresh_e(tag),
                };
            }
            5 => {
                // An interval of the topological order is reachability-convex,
                // so shrinking it cannot close a cycle.
                let order = net.topological_order().expect("valid network");
                if order.len() < 2 {
                    continue;
                }
                let len = rng.random_range(2..=order.len().min(3));
                let start = rng.random_range(0..=order.len() - len);
                return ElementaryMove::ShrinkVertices {
                    vertices: order[start..start + len].iter().cloned().collect(),
                    new_vertex: fresh_v(),
                };
            }
            _ => unreachable!(),
        }
    }
    ElementaryMove::AddVertex { vertex: fresh_v() }
}

/// A random move sequence from `base` together with its composite functor.
pub fn random_move_sequence(
    rng: &mut ChaCha8Rng,
    base: &CausalNetwork,
    count: usize,
) -> (Vec<ElementaryMove>, PathFunctor) {
    let mut tag = 0usize;
    let mut moves = Vec::with_capacity(count);
    let mut current = base.clone();
    for _ in 0..count {
        let m = random_move(rng, &current, &mut tag);
        let (next, _) = apply_move(&current, &m).expect("generated moves apply");
        moves.push(m);
        current = next;
    }
    let (_, functor) = apply_moves(base, &moves).expect("checked above");
    (moves, functor)
}

// ---------------------------------------------------------------------------
// Rational matrices

pub fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn random_rational(rng: &mut ChaCha8Rng) -> BigRational {
    let num = rng.random_range(-3..=3i64);
    let den = *[1i64, 1, 2].choose(rng).expect("nonempty");
    q(num, den)
}

pub fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> RatMatrix {
    let mut m = RatMatrix::zeros(rows, cols);
    for i in 0..rows {
        for j in 0..cols {
            m[(i, j)] = random_rational(rng);
        }
    }
    m
}

/// A random invertible matrix built from elementary row operations, returned
/// with its exact inverse.
pub fn random_invertible(rng: &mut ChaCha8Rng, dim: usize) -> (RatMatrix, RatMatrix) {
    let mut m = RatMatrix::identity(dim);
    let ops = rng.random_range(1..=dim + 2);
    for _ in 0..ops {
        match rng.random_range(0..3) {
            0 if dim >= 2 => {
                // row_i += lambda * row_j
                let i = rng.random_range(0..dim);
                let mut j = rng.random_range(0..dim);
                if i == j {
                    j = (j + 1) % dim;
                }
                let lambda = [q(1, 1), q(-1, 1), q(2, 1), q(1, 2)]
                    .choose(rng)
                    .expect("nonempty")
                    .clone();
                for c in 0..dim {
                    let add = &m[(j, c)] * &lambda;
                    m[(i, c)] += add;
                }
            }
            1 if dim >= 2 => {
                let i = rng.random_range(0..dim);
                let mut j = rng.random_range(0..dim);
                if i == j {
                    j = (j + 1) % dim;
                }
                for c in 0..dim {
                    let a = m[(i, c)].clone();
                    let b = m[(j, c)].clone();
                    m[(i, c)] = b;
                    m[(j, c)] = a;
                }
            }
            _ => {
                let i = rng.random_range(0..dim);
                let mu = [q(-1, 1), q(2, 1), q(1, 2), q(3, 1)]
                    .choose(rng)
                    .expect("nonempty")
                    .clone();
                for c in 0..dim {
                    let scaled = &m[(i, c)] * &mu;
                    m[(i, c)] = scaled;
                }
            }
        }
    }
    let inv = m.inverse().expect("product of elementary operations");
    (m, inv)
}

// ---------------------------------------------------------------------------
// MatQ diagrams

/// Size knobs for [`random_matq_diagram`]. `max_open` and `max_open_dim`
/// bound the number and total tensor dimension of simultaneously open edges,
/// which in turn bounds the cost of exact evaluation.
#[derive(Clone, Copy)]
pub struct DiagramBudget {
    pub max_vertices: usize,
    pub max_open: usize,
    pub max_open_dim: usize,
    pub dims: &'static [usize],
}

impl DiagramBudget {
    pub fn small() -> Self {
        Self {
            max_vertices: 6,
            max_open: 3,
            max_open_dim: 8,
            dims: &[1, 1, 2, 2, 3],
        }
    }

    pub fn wide() -> Self {
        Self {
            max_vertices: 10,
            max_open: 4,
            max_open_dim: 18,
            dims: &[1, 1, 2, 2, 3],
        }
    }

    pub fn dims_to_four() -> Self {
        Self {
            max_vertices: 6,
            max_open: 3,
            max_open_dim: 16,
            dims: &[1, 2, 3, 4],
        }
    }
}

/// A closed random MatQ diagram: every edge is produced and later consumed,
/// the final vertex consuming everything still open. Vertex creation order
/// is a topological order. Polarizations are randomly shuffled and the
/// vertex matrices are generated against them.
pub fn random_matq_diagram(rng: &mut ChaCha8Rng, budget: DiagramBudget) -> CausalDiagram<MatQ> {
    let n = rng.random_range(1..=budget.max_vertices);
    let mut open: Vec<(EdgeId, usize, VertexId)> = Vec::new();
    let mut vertices: Vec<VertexId> = Vec::new();
    let mut edges: Vec<(EdgeId, VertexId, VertexId)> = Vec::new();
    let mut edge_objects: BTreeMap<EdgeId, usize> = BTreeMap::new();
    let mut next_edge = 0usize;

    for k in 0..n {
        let v = vid(format!("x{k}"));
        vertices.push(v.clone());
        let last = k == n - 1;

        // Consume a random subset of the open edges; the last vertex takes
        // everything so the diagram closes.
        open.shuffle(rng);
        let take = if last {
            open.len()
        } else {
            rng.random_range(0..=open.len())
        };
        for (e, dim, src) in open.drain(..take) {
            edges.push((e.clone(), src, v.clone()));
            edge_objects.insert(e, dim);
        }

        // Emit new open edges within the width budget.
        if !last {
            let want = rng.random_range(0..=2usize);
            for _ in 0..want {
                let dim = *budget.dims.choose(rng).expect("nonempty");
                let open_dim: usize =
                    open.iter().map(|(_, d, _)| d).product::<usize>().max(1);
                if open.len() + 1 > budget.max_open || open_dim * dim > budget.max_open_dim {
                    break;
                }
                let e = eid(format!("g{next_edge}"));
                next_edge += 1;
                open.push((e, dim, v.clone()));
            }
        }
    }

    let network = CausalNetwork::new(vertices, edges).expect("creation order is topological");
    let polarization = shuffled_polarization(rng, &network);
    let mut vertex_morphisms = BTreeMap::new();
    for v in network.vertices() {
        let orders = polarization.at(v);
        let in_dim: usize = orders
            .in_order
            .iter()
            .map(|e| edge_objects[e])
            .product::<usize>()
            .max(1);
        let out_dim: usize = orders
            .out_order
            .iter()
            .map(|e| edge_objects[e])
            .product::<usize>()
            .max(1);
        vertex_morphisms.insert(v.clone(), random_matrix(rng, out_dim, in_dim));
    }
    CausalDiagram::new(
        network,
        polarization,
        Valuation {
            edge_objects,
            vertex_morphisms,
        },
    )
    .expect("generated diagram is well-formed")
}

/// Random total orders at every vertex.
pub fn shuffled_polarization(rng: &mut ChaCha8Rng, net: &CausalNetwork) -> Polarization {
    let orders = net
        .vertices()
        .map(|v| {
            let mut in_order = net.in_edges(v);
            let mut out_order = net.out_edges(v);
            in_order.shuffle(rng);
            out_order.shuffle(rng);
            (
                v.clone(),
                VertexOrders {
                    in_order,
                    out_order,
                },
            )
        })
        .collect();
    Polarization::new(orders)
}

/// A random gauge transform of `d`: invertible map on every edge plus a
/// shuffled polarization. Returns the transformed diagram and the witness.
pub fn random_gauge(
    rng: &mut ChaCha8Rng,
    d: &CausalDiagram<MatQ>,
) -> (CausalDiagram<MatQ>, GaugeWitness<MatQ>) {
    let maps: BTreeMap<EdgeId, (RatMatrix, RatMatrix)> = d
        .network()
        .edges()
        .map(|(e, _)| (e.clone(), random_invertible(rng, *d.edge_object(e))))
        .collect();
    let w = GaugeWitness::new(maps).expect("inverses are exact");
    let pol = shuffled_polarization(rng, d.network());
    let d2 = gauge_transform(d, &w, pol).expect("transform along a valid witness");
    (d2, w)
}

// ---------------------------------------------------------------------------
// Subsets and linearizations

/// A contiguous run of the canonical topological order. Such subsets are
/// reachability-convex.
pub fn interval_subset(rng: &mut ChaCha8Rng, net: &CausalNetwork) -> BTreeSet<VertexId> {
    let order = net.topological_order().expect("valid network");
    let len = rng.random_range(1..=order.len());
    let start = rng.random_range(0..=order.len() - len);
    order[start..start + len].iter().cloned().collect()
}

/// A random linearization of the induced subgraph on `subset` via
/// randomized Kahn's algorithm.
pub fn random_linearization(
    rng: &mut ChaCha8Rng,
    net: &CausalNetwork,
    subset: &BTreeSet<VertexId>,
) -> Vec<VertexId> {
    let mut indegree: BTreeMap<VertexId, usize> =
        subset.iter().map(|v| (v.clone(), 0)).collect();
    for (_, ends) in net.edges() {
        if subset.contains(&ends.src) && subset.contains(&ends.tgt) {
            *indegree.get_mut(&ends.tgt).expect("subset member") += 1;
        }
    }
    let mut ready: Vec<VertexId> = indegree
        .iter()
        .filter(|(_, d)| **d == 0)
        .map(|(v, _)| v.clone())
        .collect();
    let mut out = Vec::with_capacity(subset.len());
    while !ready.is_empty() {
        let pick = rng.random_range(0..ready.len());
        let v = ready.swap_remove(pick);
        for (_, ends) in net.edges() {
            if ends.src == v && subset.contains(&ends.tgt) {
                let d = indegree.get_mut(&ends.tgt).expect("subset member");
                *d -= 1;
                if *d == 0 {
                    ready.push(ends.tgt.clone());
                }
            }
        }
        out.push(v);
    }
    assert_eq!(out.len(), subset.len(), "induced subgraph of a DAG sorts");
    out
}
