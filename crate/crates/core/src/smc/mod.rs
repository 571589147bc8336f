//! Strict symmetric monoidal category interface and concrete instances.
//!
//! The interface is deliberately strict: unit and associativity laws hold as
//! exact equalities of objects, so tensor products of object lists can be
//! folded without bracketing data. Three instances are provided:
//!
//! * [`MatQ`](matq::MatQ) — finite-dimensional spaces over the rationals;
//!   morphisms are exact rational matrices, tensor is the Kronecker product.
//! * [`PermCat`](permcat::PermCat) — words of atoms with position bijections.
//! * [`FreeSmc`](free::FreeSmc) — string diagrams freely generated by a
//!   [`Signature`](free::Signature), compared up to anchored isomorphism.
//!
//! Different instances are different Rust types, so cross-instance misuse is
//! rejected by the compiler rather than at runtime.

use std::fmt::Debug;

use serde::de::DeserializeOwned;
use serde::Serialize;
use thiserror::Error;

pub mod free;
pub mod matq;
pub mod permcat;

pub use free::{FreeDiagram, FreeSmc, Signature};
pub use matq::{format_rational, parse_rational, MatQ, RatMatrix};
pub use permcat::{PermCat, WordBijection};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SmcError {
    #[error("boundary mismatch: cannot compose {found} after {expected}")]
    BoundaryMismatch { expected: String, found: String },
    #[error("not a bijection: {0:?}")]
    NotABijection(Vec<usize>),
    #[error("invalid object: {0}")]
    InvalidObject(String),
    #[error("invalid morphism: {0}")]
    InvalidMorphism(String),
}

/// A strict symmetric monoidal category with decidable morphism equality.
///
/// `Mor`'s `PartialEq` is structural (representation equality); semantic
/// equality of morphisms is [`SymmetricMonoidal::mor_equal`]. The two
/// coincide for matrices and word bijections but not for string diagrams.
pub trait SymmetricMonoidal {
    type Obj: Clone + Eq + Ord + Debug + Serialize + DeserializeOwned;
    type Mor: Clone + PartialEq + Debug + Serialize + DeserializeOwned;

    /// Tag used in serialized artifacts to name the instance.
    const NAME: &'static str;

    fn unit() -> Self::Obj;
    fn tensor_obj(a: &Self::Obj, b: &Self::Obj) -> Self::Obj;
    fn dom(f: &Self::Mor) -> Self::Obj;
    fn cod(f: &Self::Mor) -> Self::Obj;
    fn identity(a: &Self::Obj) -> Self::Mor;
    fn compose(g: &Self::Mor, f: &Self::Mor) -> Result<Self::Mor, SmcError>;
    fn tensor_mor(f: &Self::Mor, g: &Self::Mor) -> Self::Mor;
    /// The braiding `a (x) b -> b (x) a`.
    fn symmetry(a: &Self::Obj, b: &Self::Obj) -> Self::Mor;
    fn mor_equal(f: &Self::Mor, g: &Self::Mor) -> bool;
    /// Structural well-formedness of an object (deserialized data may lie).
    fn check_obj(a: &Self::Obj) -> Result<(), SmcError>;
    /// Structural well-formedness of a morphism.
    fn check_mor(f: &Self::Mor) -> Result<(), SmcError>;
    /// Short human-readable label for DOT export.
    fn obj_label(a: &Self::Obj) -> String;
    /// Short human-readable label for DOT export.
    fn mor_label(f: &Self::Mor) -> String;
}

/// Tensor product over an ordered list of objects; the empty list gives the
/// unit.
pub fn tensor_all<V: SymmetricMonoidal>(objs: &[V::Obj]) -> V::Obj {
    objs.iter()
        .fold(V::unit(), |acc, o| V::tensor_obj(&acc, o))
}

/// A bijection of positions `0..n`, stored as its image list: position `i`
/// is sent to `images[i]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct Permutation {
    images: Vec<usize>,
}

impl<'de> serde::Deserialize<'de> for Permutation {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let images = Vec::<usize>::deserialize(deserializer)?;
        Permutation::new(images).map_err(serde::de::Error::custom)
    }
}

impl Permutation {
    pub fn new(images: Vec<usize>) -> Result<Self, SmcError> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &i in &images {
            if i >= n || seen[i] {
                return Err(SmcError::NotABijection(images));
            }
            seen[i] = true;
        }
        Ok(Self { images })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            images: (0..n).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.images.len()
    }

    pub fn is_empty(&self) -> bool {
        self.images.is_empty()
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &j)| i == j)
    }

    pub fn apply(&self, i: usize) -> usize {
        self.images[i]
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    pub fn inverse(&self) -> Self {
        let mut images = vec![0; self.images.len()];
        for (i, &j) in self.images.iter().enumerate() {
            images[j] = i;
        }
        Self { images }
    }

    /// `self` after `other`: the result sends `i` to `self(other(i))`.
    pub fn compose(&self, other: &Self) -> Self {
        assert_eq!(self.len(), other.len(), "permutation sizes must match");
        Self {
            images: other.images.iter().map(|&i| self.images[i]).collect(),
        }
    }

    /// Rearranges a slice: the element at position `i` lands at position
    /// `self(i)` of the output.
    pub fn permute<T: Clone>(&self, items: &[T]) -> Vec<T> {
        assert_eq!(self.len(), items.len(), "permutation size must match items");
        let mut out: Vec<Option<T>> = vec![None; items.len()];
        for (i, item) in items.iter().enumerate() {
            out[self.images[i]] = Some(item.clone());
        }
        out.into_iter().map(|x| x.expect("bijection")).collect()
    }

    /// The permutation sending each position of `from` to the position of
    /// the equal element in `to`. Requires `to` to be a rearrangement of
    /// `from` with unique elements.
    pub fn matching<T: Eq>(from: &[T], to: &[T]) -> Result<Self, SmcError> {
        if from.len() != to.len() {
            return Err(SmcError::NotABijection(Vec::new()));
        }
        let images = from
            .iter()
            .map(|x| {
                to.iter()
                    .position(|y| y == x)
                    .ok_or_else(|| SmcError::NotABijection(Vec::new()))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(images)
    }
}

/// Builds the canonical symmetry `(x) objs -> (x) permuted-objs` for an
/// arbitrary permutation by factoring it into adjacent transpositions and
/// stacking braidings. Coherence makes the result independent of the chosen
/// factorization.
pub fn perm_to_symmetry<V: SymmetricMonoidal>(perm: &Permutation, objs: &[V::Obj]) -> V::Mor {
    assert_eq!(perm.len(), objs.len(), "permutation size must match objects");
    // Selection sort towards the target arrangement: bring the factor
    // destined for each position to the front of the unsettled suffix by
    // adjacent swaps, composing one braiding per swap.
    let target: Vec<usize> = perm.inverse().images().to_vec(); // target[p] = source index at p
    let mut arrangement: Vec<usize> = (0..objs.len()).collect();
    let mut acc = V::identity(&tensor_all::<V>(objs));
    for settled in 0..objs.len() {
        let mut pos = arrangement
            .iter()
            .position(|&s| s == target[settled])
            .expect("bijection");
        while pos > settled {
            // Swap arrangement[pos-1] and arrangement[pos].
            let left_objs: Vec<V::Obj> = arrangement[..pos - 1]
                .iter()
                .map(|&s| objs[s].clone())
                .collect();
            let right_objs: Vec<V::Obj> = arrangement[pos + 1..]
                .iter()
                .map(|&s| objs[s].clone())
                .collect();
            let a = &objs[arrangement[pos - 1]];
            let b = &objs[arrangement[pos]];
            let step = V::tensor_mor(
                &V::tensor_mor(&V::identity(&tensor_all::<V>(&left_objs)), &V::symmetry(a, b)),
                &V::identity(&tensor_all::<V>(&right_objs)),
            );
            acc = V::compose(&step, &acc).expect("braiding boundaries line up");
            arrangement.swap(pos - 1, pos);
            pos -= 1;
        }
    }
    acc
}
