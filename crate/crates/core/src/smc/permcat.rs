//! Words of atoms with position bijections: the prototypical strict
//! symmetric monoidal category in which every morphism is invertible.
//! Objects are ordered lists of atom names, tensor is concatenation, and a
//! morphism is a bijection of positions carrying each source atom to an
//! equal target atom.

use serde::{Deserialize, Serialize};

use super::{Permutation, SmcError, SymmetricMonoidal};

/// A bijection between two words, preserving letters.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WordBijection {
    pub source: Vec<String>,
    pub target: Vec<String>,
    pub perm: Permutation,
}

impl WordBijection {
    pub fn new(
        source: Vec<String>,
        target: Vec<String>,
        perm: Permutation,
    ) -> Result<Self, SmcError> {
        let w = Self {
            source,
            target,
            perm,
        };
        w.check()?;
        Ok(w)
    }

    fn check(&self) -> Result<(), SmcError> {
        if self.source.len() != self.target.len() || self.perm.len() != self.source.len() {
            return Err(SmcError::InvalidMorphism(
                "word lengths and permutation size disagree".into(),
            ));
        }
        for (i, atom) in self.source.iter().enumerate() {
            if &self.target[self.perm.apply(i)] != atom {
                return Err(SmcError::InvalidMorphism(format!(
                    "letter {atom:?} at position {i} maps to a different letter"
                )));
            }
        }
        Ok(())
    }
}

/// Marker type for the word-and-bijection instance.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PermCat;

impl SymmetricMonoidal for PermCat {
    type Obj = Vec<String>;
    type Mor = WordBijection;

    const NAME: &'static str = "perm";

    fn unit() -> Vec<String> {
        Vec::new()
    }

    fn tensor_obj(a: &Vec<String>, b: &Vec<String>) -> Vec<String> {
        a.iter().chain(b.iter()).cloned().collect()
    }

    fn dom(f: &WordBijection) -> Vec<String> {
        f.source.clone()
    }

    fn cod(f: &WordBijection) -> Vec<String> {
        f.target.clone()
    }

    fn identity(a: &Vec<String>) -> WordBijection {
        WordBijection {
            source: a.clone(),
            target: a.clone(),
            perm: Permutation::identity(a.len()),
        }
    }

    fn compose(g: &WordBijection, f: &WordBijection) -> Result<WordBijection, SmcError> {
        if f.target != g.source {
            return Err(SmcError::BoundaryMismatch {
                expected: format!("{:?}", f.target),
                found: format!("{:?}", g.source),
            });
        }
        Ok(WordBijection {
            source: f.source.clone(),
            target: g.target.clone(),
            perm: g.perm.compose(&f.perm),
        })
    }

    fn tensor_mor(f: &WordBijection, g: &WordBijection) -> WordBijection {
        let images = f
            .perm
            .images()
            .iter()
            .copied()
            .chain(g.perm.images().iter().map(|&i| i + f.target.len()))
            .collect();
        let out = WordBijection {
            source: Self::tensor_obj(&f.source, &g.source),
            target: Self::tensor_obj(&f.target, &g.target),
            perm: Permutation::new(images).expect("block sum of bijections"),
        };
        debug_assert!(out.check().is_ok());
        out
    }

    fn symmetry(a: &Vec<String>, b: &Vec<String>) -> WordBijection {
        let images = (0..a.len()).map(|i| b.len() + i).chain(0..b.len()).collect();
        WordBijection {
            source: Self::tensor_obj(a, b),
            target: Self::tensor_obj(b, a),
            perm: Permutation::new(images).expect("block swap is a bijection"),
        }
    }

    fn mor_equal(f: &WordBijection, g: &WordBijection) -> bool {
        f == g
    }

    fn check_obj(_a: &Vec<String>) -> Result<(), SmcError> {
        Ok(())
    }

    fn check_mor(f: &WordBijection) -> Result<(), SmcError> {
        f.check()
    }

    fn obj_label(a: &Vec<String>) -> String {
        if a.is_empty() {
            "I".to_owned()
        } else {
            a.join(".")
        }
    }

    fn mor_label(f: &WordBijection) -> String {
        format!("{:?}", f.perm.images())
    }
}
