//! Causal diagrams: a causal network whose edges carry objects and whose
//! vertices carry morphisms of a strict symmetric monoidal category, read
//! against a polarization that totally orders each vertex's in- and
//! out-edges. Two diagrams on the same network are gauge equivalent when a
//! family of per-edge isomorphisms makes the exchange square at every vertex
//! commute; witnesses are explicit and carry their inverses.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::graph::{CausalNetwork, GraphError};
use crate::ids::{EdgeId, VertexId};
use crate::smc::{perm_to_symmetry, tensor_all, Permutation, SmcError, SymmetricMonoidal};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DiagramError {
    #[error("polarization at vertex {0} does not list exactly the incident edges")]
    PolarizationMismatch(VertexId),
    #[error("boundary mismatch at vertex {vertex}: expected {expected}, found {found}")]
    BoundaryMismatch {
        vertex: VertexId,
        expected: String,
        found: String,
    },
    #[error("edge {0} has no assigned object")]
    MissingEdgeObject(EdgeId),
    #[error("vertex {0} has no assigned morphism")]
    MissingVertexMorphism(VertexId),
    #[error("diagrams live on different networks")]
    NetworkMismatch,
    #[error("witness provides no isomorphism for edge {0}")]
    WitnessIncomplete(EdgeId),
    #[error("witness entry for edge {0} is not a valid isomorphism here")]
    WitnessNotInverse(EdgeId),
    #[error("witnesses cover different edge sets")]
    EdgeSetMismatch,
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Smc(#[from] SmcError),
}

/// Total orders on the in-edges and out-edges of one vertex.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct VertexOrders {
    pub in_order: Vec<EdgeId>,
    pub out_order: Vec<EdgeId>,
}

/// A choice of [`VertexOrders`] for every vertex of a network.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Polarization {
    orders: BTreeMap<VertexId, VertexOrders>,
}

impl Polarization {
    pub fn new(orders: BTreeMap<VertexId, VertexOrders>) -> Self {
        Self { orders }
    }

    /// The id-sorted polarization of a network.
    pub fn canonical(net: &CausalNetwork) -> Self {
        let orders = net
            .vertices()
            .map(|v| {
                (
                    v.clone(),
                    VertexOrders {
                        in_order: net.in_edges(v),
                        out_order: net.out_edges(v),
                    },
                )
            })
            .collect();
        Self { orders }
    }

    pub fn check_against(&self, net: &CausalNetwork) -> Result<(), DiagramError> {
        for v in net.vertices() {
            let orders = self
                .orders
                .get(v)
                .ok_or_else(|| DiagramError::PolarizationMismatch(v.clone()))?;
            let listed_in: BTreeSet<&EdgeId> = orders.in_order.iter().collect();
            let listed_out: BTreeSet<&EdgeId> = orders.out_order.iter().collect();
            let want_in = net.in_edges(v);
            let want_out = net.out_edges(v);
            if listed_in.len() != orders.in_order.len()
                || listed_out.len() != orders.out_order.len()
                || listed_in != want_in.iter().collect()
                || listed_out != want_out.iter().collect()
            {
                return Err(DiagramError::PolarizationMismatch(v.clone()));
            }
        }
        if self.orders.len() != net.vertex_count() {
            let stray = self
                .orders
                .keys()
                .find(|v| !net.has_vertex(v))
                .expect("count mismatch implies a stray vertex");
            return Err(DiagramError::PolarizationMismatch(stray.clone()));
        }
        Ok(())
    }

    pub fn at(&self, v: &VertexId) -> &VertexOrders {
        &self.orders[v]
    }

    pub fn get(&self, v: &VertexId) -> Option<&VertexOrders> {
        self.orders.get(v)
    }

    pub fn orders(&self) -> &BTreeMap<VertexId, VertexOrders> {
        &self.orders
    }
}

/// Objects on edges, morphisms on vertices.
#[derive(Debug)]
pub struct Valuation<V: SymmetricMonoidal> {
    pub edge_objects: BTreeMap<EdgeId, V::Obj>,
    pub vertex_morphisms: BTreeMap<VertexId, V::Mor>,
}

// Manual impls: deriving would demand bounds on the marker type `V` itself.
impl<V: SymmetricMonoidal> Clone for Valuation<V> {
    fn clone(&self) -> Self {
        Self {
            edge_objects: self.edge_objects.clone(),
            vertex_morphisms: self.vertex_morphisms.clone(),
        }
    }
}

impl<V: SymmetricMonoidal> PartialEq for Valuation<V> {
    fn eq(&self, other: &Self) -> bool {
        self.edge_objects == other.edge_objects
            && self.vertex_morphisms == other.vertex_morphisms
    }
}

/// A validated causal diagram in the category `V`.
#[derive(Debug)]
pub struct CausalDiagram<V: SymmetricMonoidal> {
    network: CausalNetwork,
    polarization: Polarization,
    valuation: Valuation<V>,
}

impl<V: SymmetricMonoidal> Clone for CausalDiagram<V> {
    fn clone(&self) -> Self {
        Self {
            network: self.network.clone(),
            polarization: self.polarization.clone(),
            valuation: self.valuation.clone(),
        }
    }
}

impl<V: SymmetricMonoidal> PartialEq for CausalDiagram<V> {
    fn eq(&self, other: &Self) -> bool {
        self.network == other.network
            && self.polarization == other.polarization
            && self.valuation == other.valuation
    }
}

impl<V: SymmetricMonoidal> CausalDiagram<V> {
    pub fn new(
        network: CausalNetwork,
        polarization: Polarization,
        valuation: Valuation<V>,
    ) -> Result<Self, DiagramError> {
        let d = Self {
            network,
            polarization,
            valuation,
        };
        d.validate()?;
        Ok(d)
    }

    /// Checks the polarization and every vertex morphism's boundary against
    /// the tensor of the polarized edge objects.
    pub fn validate(&self) -> Result<(), DiagramError> {
        self.polarization.check_against(&self.network)?;
        for (e, _) in self.network.edges() {
            let obj = self
                .valuation
                .edge_objects
                .get(e)
                .ok_or_else(|| DiagramError::MissingEdgeObject(e.clone()))?;
            V::check_obj(obj)?;
        }
        for v in self.network.vertices() {
            let mor = self
                .valuation
                .vertex_morphisms
                .get(v)
                .ok_or_else(|| DiagramError::MissingVertexMorphism(v.clone()))?;
            V::check_mor(mor)?;
            let want_dom = self.boundary_object(&self.polarization.at(v).in_order);
            let want_cod = self.boundary_object(&self.polarization.at(v).out_order);
            if V::dom(mor) != want_dom || V::cod(mor) != want_cod {
                return Err(DiagramError::BoundaryMismatch {
                    vertex: v.clone(),
                    expected: format!(
                        "{} -> {}",
                        V::obj_label(&want_dom),
                        V::obj_label(&want_cod)
                    ),
                    found: format!(
                        "{} -> {}",
                        V::obj_label(&V::dom(mor)),
                        V::obj_label(&V::cod(mor))
                    ),
                });
            }
        }
        Ok(())
    }

    fn boundary_object(&self, edges: &[EdgeId]) -> V::Obj {
        tensor_all::<V>(&self.objects_along(edges))
    }

    pub fn network(&self) -> &CausalNetwork {
        &self.network
    }

    pub fn polarization(&self) -> &Polarization {
        &self.polarization
    }

    pub fn valuation(&self) -> &Valuation<V> {
        &self.valuation
    }

    pub fn edge_object(&self, e: &EdgeId) -> &V::Obj {
        &self.valuation.edge_objects[e]
    }

    pub fn vertex_morphism(&self, v: &VertexId) -> &V::Mor {
        &self.valuation.vertex_morphisms[v]
    }

    /// Objects along a list of edges, in order.
    pub fn objects_along(&self, edges: &[EdgeId]) -> Vec<V::Obj> {
        edges.iter().map(|e| self.edge_object(e).clone()).collect()
    }
}

/// Re-runs all [`CausalDiagram`] invariants; diagrams built through
/// [`CausalDiagram::new`] always pass.
pub fn validate_diagram<V: SymmetricMonoidal>(d: &CausalDiagram<V>) -> Result<(), DiagramError> {
    d.validate()
}

/// A per-edge isomorphism family, each entry stored with its two-sided
/// inverse.
#[derive(Debug)]
pub struct GaugeWitness<V: SymmetricMonoidal> {
    maps: BTreeMap<EdgeId, (V::Mor, V::Mor)>,
}

impl<V: SymmetricMonoidal> Clone for GaugeWitness<V> {
    fn clone(&self) -> Self {
        Self {
            maps: self.maps.clone(),
        }
    }
}

impl<V: SymmetricMonoidal> PartialEq for GaugeWitness<V> {
    fn eq(&self, other: &Self) -> bool {
        self.maps == other.maps
    }
}

impl<V: SymmetricMonoidal> GaugeWitness<V> {
    /// Builds a witness, verifying that each pair really is a two-sided
    /// inverse.
    pub fn new(maps: BTreeMap<EdgeId, (V::Mor, V::Mor)>) -> Result<Self, DiagramError> {
        for (e, (fwd, inv)) in &maps {
            let round = V::compose(inv, fwd).map_err(DiagramError::Smc)?;
            let round_back = V::compose(fwd, inv).map_err(DiagramError::Smc)?;
            if !V::mor_equal(&round, &V::identity(&V::dom(fwd)))
                || !V::mor_equal(&round_back, &V::identity(&V::cod(fwd)))
            {
                return Err(DiagramError::WitnessNotInverse(e.clone()));
            }
        }
        Ok(Self { maps })
    }

    pub(crate) fn from_checked(maps: BTreeMap<EdgeId, (V::Mor, V::Mor)>) -> Self {
        Self { maps }
    }

    /// The identity witness on a diagram's edges.
    pub fn identity(d: &CausalDiagram<V>) -> Self {
        let maps = d
            .network()
            .edges()
            .map(|(e, _)| {
                let id = V::identity(d.edge_object(e));
                (e.clone(), (id.clone(), id))
            })
            .collect();
        Self { maps }
    }

    pub fn forward(&self, e: &EdgeId) -> Option<&V::Mor> {
        self.maps.get(e).map(|(f, _)| f)
    }

    pub fn backward(&self, e: &EdgeId) -> Option<&V::Mor> {
        self.maps.get(e).map(|(_, i)| i)
    }

    pub fn maps(&self) -> &BTreeMap<EdgeId, (V::Mor, V::Mor)> {
        &self.maps
    }
}

/// Edgewise inverse: swaps each stored pair.
pub fn witness_invert<V: SymmetricMonoidal>(w: &GaugeWitness<V>) -> GaugeWitness<V> {
    GaugeWitness {
        maps: w
            .maps
            .iter()
            .map(|(e, (fwd, inv))| (e.clone(), (inv.clone(), fwd.clone())))
            .collect(),
    }
}

/// Edgewise composite `w2` after `w1`.
pub fn witness_compose<V: SymmetricMonoidal>(
    w2: &GaugeWitness<V>,
    w1: &GaugeWitness<V>,
) -> Result<GaugeWitness<V>, DiagramError> {
    if w1.maps.keys().ne(w2.maps.keys()) {
        return Err(DiagramError::EdgeSetMismatch);
    }
    let maps = w1
        .maps
        .iter()
        .map(|(e, (f1, i1))| {
            let (f2, i2) = &w2.maps[e];
            let fwd = V::compose(f2, f1).map_err(DiagramError::Smc)?;
            let inv = V::compose(i1, i2).map_err(DiagramError::Smc)?;
            Ok((e.clone(), (fwd, inv)))
        })
        .collect::<Result<BTreeMap<_, _>, DiagramError>>()?;
    Ok(GaugeWitness { maps })
}

/// The horizontal morphism of the exchange square on one side of a vertex:
/// tensor the witness maps in the old order, then permute into the new
/// order. Returns the composite together with its inverse. `new_objs` are
/// the post-transport edge objects listed in the old order.
pub(crate) fn side_transport<V: SymmetricMonoidal>(
    old_order: &[EdgeId],
    new_order: &[EdgeId],
    new_objs: &[V::Obj],
    w: &GaugeWitness<V>,
) -> Result<(V::Mor, V::Mor), DiagramError> {
    let mut fwd = V::identity(&V::unit());
    let mut inv = V::identity(&V::unit());
    for e in old_order {
        let (f, i) = w
            .maps
            .get(e)
            .ok_or_else(|| DiagramError::WitnessIncomplete(e.clone()))?;
        fwd = V::tensor_mor(&fwd, f);
        inv = V::tensor_mor(&inv, i);
    }
    let sigma = Permutation::matching(old_order, new_order).map_err(DiagramError::Smc)?;
    let perm_fwd = perm_to_symmetry::<V>(&sigma, new_objs);
    let perm_inv = perm_to_symmetry::<V>(&sigma.inverse(), &sigma.permute(new_objs));
    let h = V::compose(&perm_fwd, &fwd).map_err(DiagramError::Smc)?;
    let h_inv = V::compose(&inv, &perm_inv).map_err(DiagramError::Smc)?;
    Ok((h, h_inv))
}

fn vertex_square_holds<V: SymmetricMonoidal>(
    d: &CausalDiagram<V>,
    d2: &CausalDiagram<V>,
    w: &GaugeWitness<V>,
    v: &VertexId,
) -> Result<bool, DiagramError> {
    let old = d.polarization().at(v);
    let new = d2.polarization().at(v);
    let (h_in, _) = side_transport::<V>(
        &old.in_order,
        &new.in_order,
        &d2.objects_along(&old.in_order),
        w,
    )?;
    let (h_out, _) = side_transport::<V>(
        &old.out_order,
        &new.out_order,
        &d2.objects_along(&old.out_order),
        w,
    )?;
    let left = V::compose(&h_out, d.vertex_morphism(v)).map_err(DiagramError::Smc)?;
    let right = V::compose(d2.vertex_morphism(v), &h_in).map_err(DiagramError::Smc)?;
    Ok(V::mor_equal(&left, &right))
}

/// Checks gauge equivalence of two diagrams on the same network via an
/// explicit witness: at every vertex the square
/// `h_out . v1(x) = v1'(x) . h_in` must commute, where each horizontal map
/// tensors the witness isomorphisms in the old polarization order and then
/// permutes into the new order. Empty sides degenerate to the identity on
/// the unit.
pub fn gauge_check<V: SymmetricMonoidal>(
    d: &CausalDiagram<V>,
    d2: &CausalDiagram<V>,
    w: &GaugeWitness<V>,
) -> Result<bool, DiagramError> {
    if d.network() != d2.network() {
        return Err(DiagramError::NetworkMismatch);
    }
    for (e, _) in d.network().edges() {
        let (fwd, _) = w
            .maps
            .get(e)
            .ok_or_else(|| DiagramError::WitnessIncomplete(e.clone()))?;
        // A witness whose boundaries disagree with the edge objects cannot
        // make any square commute.
        if &V::dom(fwd) != d.edge_object(e) || &V::cod(fwd) != d2.edge_object(e) {
            return Ok(false);
        }
    }
    for v in d.network().vertices() {
        if !vertex_square_holds(d, d2, w, v)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Rewrites a diagram along a witness and a replacement polarization: every
/// edge object becomes the witness codomain and every vertex morphism is
/// conjugated by the horizontal transports, so the result is gauge
/// equivalent to the input by `w`.
pub fn gauge_transform<V: SymmetricMonoidal>(
    d: &CausalDiagram<V>,
    w: &GaugeWitness<V>,
    newpol: Polarization,
) -> Result<CausalDiagram<V>, DiagramError> {
    newpol.check_against(d.network())?;
    let mut edge_objects = BTreeMap::new();
    for (e, _) in d.network().edges() {
        let (fwd, _) = w
            .maps
            .get(e)
            .ok_or_else(|| DiagramError::WitnessIncomplete(e.clone()))?;
        if &V::dom(fwd) != d.edge_object(e) {
            return Err(DiagramError::WitnessNotInverse(e.clone()));
        }
        edge_objects.insert(e.clone(), V::cod(fwd));
    }
    let objs_in_old_order = |edges: &[EdgeId]| -> Vec<V::Obj> {
        edges.iter().map(|e| edge_objects[e].clone()).collect()
    };
    let mut vertex_morphisms = BTreeMap::new();
    for v in d.network().vertices() {
        let old = d.polarization().at(v);
        let new = newpol.at(v);
        let (_, h_in_inv) = side_transport::<V>(
            &old.in_order,
            &new.in_order,
            &objs_in_old_order(&old.in_order),
            w,
        )?;
        let (h_out, _) = side_transport::<V>(
            &old.out_order,
            &new.out_order,
            &objs_in_old_order(&old.out_order),
            w,
        )?;
        let mor = V::compose(
            &V::compose(&h_out, d.vertex_morphism(v)).map_err(DiagramError::Smc)?,
            &h_in_inv,
        )
        .map_err(DiagramError::Smc)?;
        vertex_morphisms.insert(v.clone(), mor);
    }
    CausalDiagram::new(
        d.network().clone(),
        newpol,
        Valuation {
            edge_objects,
            vertex_morphisms,
        },
    )
}

/// Reorders the polarization only: a gauge transform along the identity
/// witness. The output passes [`gauge_check`] against the input with the
/// identity witness.
pub fn repolarize<V: SymmetricMonoidal>(
    d: &CausalDiagram<V>,
    newpol: Polarization,
) -> Result<CausalDiagram<V>, DiagramError> {
    gauge_transform(d, &GaugeWitness::identity(d), newpol)
}

/// Instances that can enumerate a small set of candidate isomorphisms
/// between two objects, enabling a brute-force witness search.
pub trait WitnessSearch: SymmetricMonoidal {
    /// Candidate `(iso, inverse)` pairs from `a` to `b`. Finite and small.
    fn candidate_isos(a: &Self::Obj, b: &Self::Obj) -> Vec<(Self::Mor, Self::Mor)>;
}

/// Bounded brute-force search for a gauge witness between two diagrams on
/// the same network. Tries every combination of per-edge candidate
/// isomorphisms, pruning as soon as a vertex with fully assigned incident
/// edges fails its square.
pub fn search_witness<V: WitnessSearch>(
    d: &CausalDiagram<V>,
    d2: &CausalDiagram<V>,
) -> Result<Option<GaugeWitness<V>>, DiagramError> {
    if d.network() != d2.network() {
        return Err(DiagramError::NetworkMismatch);
    }
    let edges: Vec<EdgeId> = d.network().edges().map(|(e, _)| e.clone()).collect();
    let candidates: Vec<Vec<(V::Mor, V::Mor)>> = edges
        .iter()
        .map(|e| V::candidate_isos(d.edge_object(e), d2.edge_object(e)))
        .collect();
    if candidates.iter().any(|c| c.is_empty()) && !edges.is_empty() {
        return Ok(None);
    }

    fn assign<V: WitnessSearch>(
        d: &CausalDiagram<V>,
        d2: &CausalDiagram<V>,
        edges: &[EdgeId],
        candidates: &[Vec<(V::Mor, V::Mor)>],
        chosen: &mut BTreeMap<EdgeId, (V::Mor, V::Mor)>,
        next: usize,
    ) -> Result<Option<GaugeWitness<V>>, DiagramError> {
        if next == edges.len() {
            let w = GaugeWitness {
                maps: chosen.clone(),
            };
            for v in d.network().vertices() {
                if !vertex_square_holds(d, d2, &w, v)? {
                    return Ok(None);
                }
            }
            return Ok(Some(w));
        }
        let e = &edges[next];
        let ends = d.network().edge_ends(e).map_err(DiagramError::Graph)?.clone();
        for cand in &candidates[next] {
            chosen.insert(e.clone(), cand.clone());
            let w = GaugeWitness {
                maps: chosen.clone(),
            };
            let mut viable = true;
            for v in [&ends.src, &ends.tgt] {
                let incident: Vec<EdgeId> = d
                    .network()
                    .in_edges(v)
                    .into_iter()
                    .chain(d.network().out_edges(v))
                    .collect();
                if incident.iter().all(|i| chosen.contains_key(i))
                    && !vertex_square_holds(d, d2, &w, v)?
                {
                    viable = false;
                    break;
                }
            }
            if viable {
                if let Some(found) = assign(d, d2, edges, candidates, chosen, next + 1)? {
                    return Ok(Some(found));
                }
            }
            chosen.remove(e);
        }
        Ok(None)
    }

    let mut chosen = BTreeMap::new();
    assign(d, d2, &edges, &candidates, &mut chosen, 0)
}

impl WitnessSearch for crate::smc::PermCat {
    fn candidate_isos(
        a: &Vec<String>,
        b: &Vec<String>,
    ) -> Vec<(crate::smc::WordBijection, crate::smc::WordBijection)> {
        // All letter-preserving bijections between the two words.
        fn extend(
            a: &[String],
            b: &[String],
            images: &mut Vec<usize>,
            used: &mut Vec<bool>,
            out: &mut Vec<Vec<usize>>,
        ) {
            let i = images.len();
            if i == a.len() {
                out.push(images.clone());
                return;
            }
            for j in 0..b.len() {
                if !used[j] && b[j] == a[i] {
                    used[j] = true;
                    images.push(j);
                    extend(a, b, images, used, out);
                    images.pop();
                    used[j] = false;
                }
            }
        }
        if a.len() != b.len() {
            return Vec::new();
        }
        let mut all = Vec::new();
        extend(a, b, &mut Vec::new(), &mut vec![false; b.len()], &mut all);
        all.into_iter()
            .filter_map(|images| {
                let perm = Permutation::new(images).ok()?;
                let fwd =
                    crate::smc::WordBijection::new(a.clone(), b.clone(), perm.clone()).ok()?;
                let inv = crate::smc::WordBijection::new(b.clone(), a.clone(), perm.inverse()).ok()?;
                Some((fwd, inv))
            })
            .collect()
    }
}

impl WitnessSearch for crate::smc::MatQ {
    fn candidate_isos(
        a: &usize,
        b: &usize,
    ) -> Vec<(crate::smc::RatMatrix, crate::smc::RatMatrix)> {
        use crate::smc::RatMatrix;
        // A small generating set of invertible matrices, dimensions 1 and 2.
        if a != b || *a > 2 {
            return Vec::new();
        }
        let mats: Vec<RatMatrix> = match a {
            1 => vec![
                RatMatrix::from_ints(&[&[1]]),
                RatMatrix::from_ints(&[&[-1]]),
                RatMatrix::from_ints(&[&[2]]),
                RatMatrix::from_rows(vec![vec![num_rational::BigRational::new(
                    1.into(),
                    2.into(),
                )]])
                .expect("well-formed"),
                RatMatrix::from_ints(&[&[3]]),
            ],
            2 => vec![
                RatMatrix::identity(2),
                RatMatrix::from_ints(&[&[0, 1], &[1, 0]]),
                RatMatrix::from_ints(&[&[2, 0], &[0, 1]]),
                RatMatrix::from_ints(&[&[1, 0], &[0, 2]]),
                RatMatrix::from_ints(&[&[-1, 0], &[0, 1]]),
                RatMatrix::from_ints(&[&[1, 1], &[0, 1]]),
                RatMatrix::from_ints(&[&[1, 0], &[1, 1]]),
            ],
            _ => Vec::new(),
        };
        mats.into_iter()
            .filter_map(|m| {
                let inv = m.inverse()?;
                Some((m, inv))
            })
            .collect()
    }
}
