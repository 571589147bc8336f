//! Finite posets and the bridge to causal networks: a poset becomes the DAG
//! of all its strict pairs, and a network defines a poset by directed
//! reachability. The reachability direction is a retraction of the first.

use std::collections::{BTreeMap, BTreeSet};

use crate::graph::{CausalNetwork, GraphError};
use crate::ids::{EdgeId, VertexId};

/// A finite partial order, stored with its full (reflexive) relation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Poset {
    elements: BTreeSet<VertexId>,
    relation: BTreeSet<(VertexId, VertexId)>,
}

impl Poset {
    /// Builds a poset and checks reflexivity, antisymmetry and transitivity.
    pub fn new(
        elements: impl IntoIterator<Item = VertexId>,
        relation: impl IntoIterator<Item = (VertexId, VertexId)>,
    ) -> Result<Self, GraphError> {
        let elements: BTreeSet<VertexId> = elements.into_iter().collect();
        let relation: BTreeSet<(VertexId, VertexId)> = relation.into_iter().collect();
        for (a, b) in &relation {
            if !elements.contains(a) || !elements.contains(b) {
                return Err(GraphError::NotAPoset(format!(
                    "pair ({a}, {b}) mentions an unknown element"
                )));
            }
        }
        for x in &elements {
            if !relation.contains(&(x.clone(), x.clone())) {
                return Err(GraphError::NotAPoset(format!("missing reflexive pair ({x}, {x})")));
            }
        }
        for (a, b) in &relation {
            if a != b && relation.contains(&(b.clone(), a.clone())) {
                return Err(GraphError::NotAPoset(format!(
                    "antisymmetry violated on {a} and {b}"
                )));
            }
        }
        for (a, b) in &relation {
            for (c, d) in relation.range((b.clone(), VertexId::from(""))..) {
                if c != b {
                    break;
                }
                if !relation.contains(&(a.clone(), d.clone())) {
                    return Err(GraphError::NotAPoset(format!(
                        "transitivity violated: {a} <= {b} <= {d}"
                    )));
                }
            }
        }
        Ok(Self { elements, relation })
    }

    /// The poset generated by covering pairs: reflexive-transitive closure,
    /// failing only if the closure would break antisymmetry.
    pub fn generated_by(
        elements: impl IntoIterator<Item = VertexId>,
        pairs: impl IntoIterator<Item = (VertexId, VertexId)>,
    ) -> Result<Self, GraphError> {
        let elements: BTreeSet<VertexId> = elements.into_iter().collect();
        let mut succ: BTreeMap<VertexId, BTreeSet<VertexId>> = elements
            .iter()
            .map(|x| (x.clone(), BTreeSet::from([x.clone()])))
            .collect();
        for (a, b) in pairs {
            if !elements.contains(&a) || !elements.contains(&b) {
                return Err(GraphError::NotAPoset(format!(
                    "pair ({a}, {b}) mentions an unknown element"
                )));
            }
            succ.get_mut(&a).expect("checked").insert(b);
        }
        // Warshall-style saturation.
        loop {
            let mut grew = false;
            for x in &elements {
                let step: BTreeSet<VertexId> = succ[x]
                    .iter()
                    .flat_map(|y| succ[y].iter().cloned())
                    .collect();
                let entry = succ.get_mut(x).expect("checked");
                let before = entry.len();
                entry.extend(step);
                grew |= entry.len() > before;
            }
            if !grew {
                break;
            }
        }
        let relation: BTreeSet<(VertexId, VertexId)> = succ
            .iter()
            .flat_map(|(a, bs)| bs.iter().map(move |b| (a.clone(), b.clone())))
            .collect();
        Self::new(elements, relation)
    }

    pub fn elements(&self) -> impl Iterator<Item = &VertexId> {
        self.elements.iter()
    }

    pub fn relation(&self) -> impl Iterator<Item = &(VertexId, VertexId)> {
        self.relation.iter()
    }

    pub fn le(&self, a: &VertexId, b: &VertexId) -> bool {
        self.relation.contains(&(a.clone(), b.clone()))
    }

    /// Strict pairs a < b, in sorted order.
    pub fn strict_pairs(&self) -> Vec<(VertexId, VertexId)> {
        self.relation.iter().filter(|(a, b)| a != b).cloned().collect()
    }
}

/// The transitive-closure DAG of a poset: one edge per strict pair. Edge ids
/// are generated as `p0, p1, ...` over the sorted pairs.
pub fn poset_to_network(p: &Poset) -> CausalNetwork {
    let edges = p
        .strict_pairs()
        .into_iter()
        .enumerate()
        .map(|(i, (a, b))| (EdgeId::from(format!("p{i}")), a, b));
    CausalNetwork::new(p.elements().cloned(), edges)
        .expect("strict pairs of a poset form an acyclic graph")
}

/// The reachability poset of a network: x <= y iff a directed path runs from
/// x to y. Acyclicity makes the relation antisymmetric.
pub fn network_to_poset(n: &CausalNetwork) -> Poset {
    let relation = n.vertices().flat_map(|v| {
        n.reachable_from(v)
            .into_iter()
            .map(move |w| (v.clone(), w))
    });
    Poset::new(n.vertices().cloned(), relation.collect::<Vec<_>>())
        .expect("reachability in a DAG is a partial order")
}
