//! String diagrams freely generated by a signature.
//!
//! A morphism is an anchored progressive diagram: an ordered input boundary,
//! an ordered output boundary, a set of generator-labeled inner nodes with
//! ordered ports, and wires connecting output ports to input ports. Two
//! morphisms are equal exactly when some node bijection preserving generator
//! labels carries the wiring of one onto the other; the boundary is held
//! fixed. The equality search is a small backtracking matcher, intended for
//! diagrams with at most a dozen inner nodes.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::{SmcError, SymmetricMonoidal};

/// Generating data: named atomic objects and named generator morphisms with
/// word-valued boundaries.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Signature {
    pub objects: BTreeSet<String>,
    pub generators: BTreeMap<String, (Vec<String>, Vec<String>)>,
}

impl Signature {
    pub fn new(
        objects: impl IntoIterator<Item = String>,
        generators: impl IntoIterator<Item = (String, Vec<String>, Vec<String>)>,
    ) -> Result<Self, SmcError> {
        let objects: BTreeSet<String> = objects.into_iter().collect();
        let mut map = BTreeMap::new();
        for (name, dom, cod) in generators {
            for atom in dom.iter().chain(cod.iter()) {
                if !objects.contains(atom) {
                    return Err(SmcError::InvalidObject(format!(
                        "generator {name} uses undeclared object {atom}"
                    )));
                }
            }
            if map.insert(name.clone(), (dom, cod)).is_some() {
                return Err(SmcError::InvalidMorphism(format!("duplicate generator {name}")));
            }
        }
        Ok(Self {
            objects,
            generators: map,
        })
    }
}

/// Where a wire starts: an input boundary position or a node output port.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutPort {
    Dom(usize),
    NodeOut(usize, usize),
}

/// Where a wire ends: an output boundary position or a node input port.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InPort {
    Cod(usize),
    NodeIn(usize, usize),
}

/// A generator occurrence with its boundary words.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiagramNode {
    pub gen: String,
    pub dom: Vec<String>,
    pub cod: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Wire {
    pub src: OutPort,
    pub tgt: InPort,
}

/// An anchored string diagram over a signature.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FreeDiagram {
    pub dom: Vec<String>,
    pub cod: Vec<String>,
    pub nodes: Vec<DiagramNode>,
    pub wires: Vec<Wire>,
}

impl FreeDiagram {
    /// The identity diagram on a word: straight wires, no nodes.
    pub fn identity(word: &[String]) -> Self {
        Self {
            dom: word.to_vec(),
            cod: word.to_vec(),
            nodes: Vec::new(),
            wires: (0..word.len())
                .map(|i| Wire {
                    src: OutPort::Dom(i),
                    tgt: InPort::Cod(i),
                })
                .collect(),
        }
    }

    /// A single generator, wired straight through.
    pub fn generator(sig: &Signature, name: &str) -> Result<Self, SmcError> {
        let (dom, cod) = sig
            .generators
            .get(name)
            .ok_or_else(|| SmcError::InvalidMorphism(format!("unknown generator {name}")))?
            .clone();
        let mut wires = Vec::new();
        for i in 0..dom.len() {
            wires.push(Wire {
                src: OutPort::Dom(i),
                tgt: InPort::NodeIn(0, i),
            });
        }
        for j in 0..cod.len() {
            wires.push(Wire {
                src: OutPort::NodeOut(0, j),
                tgt: InPort::Cod(j),
            });
        }
        Ok(Self {
            dom: dom.clone(),
            cod: cod.clone(),
            nodes: vec![DiagramNode {
                gen: name.to_owned(),
                dom,
                cod,
            }],
            wires,
        })
    }

    /// The block transposition `a (x) b -> b (x) a`.
    pub fn block_swap(a: &[String], b: &[String]) -> Self {
        let mut wires = Vec::new();
        for i in 0..a.len() {
            wires.push(Wire {
                src: OutPort::Dom(i),
                tgt: InPort::Cod(b.len() + i),
            });
        }
        for j in 0..b.len() {
            wires.push(Wire {
                src: OutPort::Dom(a.len() + j),
                tgt: InPort::Cod(j),
            });
        }
        Self {
            dom: a.iter().chain(b.iter()).cloned().collect(),
            cod: b.iter().chain(a.iter()).cloned().collect(),
            nodes: Vec::new(),
            wires,
        }
    }

    fn out_port_label(&self, p: &OutPort) -> Option<&String> {
        match p {
            OutPort::Dom(i) => self.dom.get(*i),
            OutPort::NodeOut(n, j) => self.nodes.get(*n)?.cod.get(*j),
        }
    }

    fn in_port_label(&self, p: &InPort) -> Option<&String> {
        match p {
            InPort::Cod(i) => self.cod.get(*i),
            InPort::NodeIn(n, j) => self.nodes.get(*n)?.dom.get(*j),
        }
    }

    /// Structural validation: every port carries exactly one wire, labels
    /// agree across each wire, and the node-to-node wiring is acyclic.
    pub fn check(&self) -> Result<(), SmcError> {
        let mut out_seen: BTreeSet<OutPort> = BTreeSet::new();
        let mut in_seen: BTreeSet<InPort> = BTreeSet::new();
        for w in &self.wires {
            let src_label = self
                .out_port_label(&w.src)
                .ok_or_else(|| SmcError::InvalidMorphism(format!("wire from missing port {:?}", w.src)))?;
            let tgt_label = self
                .in_port_label(&w.tgt)
                .ok_or_else(|| SmcError::InvalidMorphism(format!("wire into missing port {:?}", w.tgt)))?;
            if src_label != tgt_label {
                return Err(SmcError::InvalidMorphism(format!(
                    "wire carries {src_label} into {tgt_label}"
                )));
            }
            if !out_seen.insert(w.src.clone()) {
                return Err(SmcError::InvalidMorphism(format!("port {:?} wired twice", w.src)));
            }
            if !in_seen.insert(w.tgt.clone()) {
                return Err(SmcError::InvalidMorphism(format!("port {:?} wired twice", w.tgt)));
            }
        }
        let want_out = self.dom.len()
            + self.nodes.iter().map(|n| n.cod.len()).sum::<usize>();
        let want_in = self.cod.len()
            + self.nodes.iter().map(|n| n.dom.len()).sum::<usize>();
        if out_seen.len() != want_out || in_seen.len() != want_in {
            return Err(SmcError::InvalidMorphism("unwired port".into()));
        }
        // Progressivity: node dependencies must not cycle.
        let mut preds: BTreeMap<usize, BTreeSet<usize>> =
            (0..self.nodes.len()).map(|i| (i, BTreeSet::new())).collect();
        for w in &self.wires {
            if let (OutPort::NodeOut(a, _), InPort::NodeIn(b, _)) = (&w.src, &w.tgt) {
                preds.get_mut(b).expect("checked").insert(*a);
            }
        }
        let mut done: BTreeSet<usize> = BTreeSet::new();
        loop {
            let ready: Vec<usize> = preds
                .iter()
                .filter(|(n, ps)| !done.contains(n) && ps.iter().all(|p| done.contains(p)))
                .map(|(n, _)| *n)
                .collect();
            if ready.is_empty() {
                break;
            }
            done.extend(ready);
        }
        if done.len() != self.nodes.len() {
            return Err(SmcError::InvalidMorphism("diagram wiring is cyclic".into()));
        }
        Ok(())
    }

    fn wire_from(&self, src: &OutPort) -> Option<&Wire> {
        self.wires.iter().find(|w| &w.src == src)
    }
}

/// Marker type for the free string-diagram instance.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FreeSmc;

fn shift_out(p: &OutPort, nodes: usize, dom: usize) -> OutPort {
    match p {
        OutPort::Dom(i) => OutPort::Dom(i + dom),
        OutPort::NodeOut(n, j) => OutPort::NodeOut(n + nodes, *j),
    }
}

fn shift_in(p: &InPort, nodes: usize, cod: usize) -> InPort {
    match p {
        InPort::Cod(i) => InPort::Cod(i + cod),
        InPort::NodeIn(n, j) => InPort::NodeIn(n + nodes, *j),
    }
}

impl SymmetricMonoidal for FreeSmc {
    type Obj = Vec<String>;
    type Mor = FreeDiagram;

    const NAME: &'static str = "free";

    fn unit() -> Vec<String> {
        Vec::new()
    }

    fn tensor_obj(a: &Vec<String>, b: &Vec<String>) -> Vec<String> {
        a.iter().chain(b.iter()).cloned().collect()
    }

    fn dom(f: &FreeDiagram) -> Vec<String> {
        f.dom.clone()
    }

    fn cod(f: &FreeDiagram) -> Vec<String> {
        f.cod.clone()
    }

    fn identity(a: &Vec<String>) -> FreeDiagram {
        FreeDiagram::identity(a)
    }

    fn compose(g: &FreeDiagram, f: &FreeDiagram) -> Result<FreeDiagram, SmcError> {
        if f.cod != g.dom {
            return Err(SmcError::BoundaryMismatch {
                expected: format!("{:?}", f.cod),
                found: format!("{:?}", g.dom),
            });
        }
        let shift = f.nodes.len();
        let mut nodes = f.nodes.clone();
        nodes.extend(g.nodes.iter().cloned());
        let mut wires = Vec::new();
        // f-wires that stop at the interface continue along the g-wire
        // leaving the same interface position.
        for w in &f.wires {
            match &w.tgt {
                InPort::Cod(i) => {
                    let cont = g
                        .wire_from(&OutPort::Dom(*i))
                        .ok_or_else(|| SmcError::InvalidMorphism("unwired interface".into()))?;
                    wires.push(Wire {
                        src: w.src.clone(),
                        tgt: shift_in(&cont.tgt, shift, 0),
                    });
                }
                _ => wires.push(w.clone()),
            }
        }
        for w in &g.wires {
            match &w.src {
                OutPort::Dom(_) => {} // already spliced above
                src => wires.push(Wire {
                    src: shift_out(src, shift, 0),
                    tgt: shift_in(&w.tgt, shift, 0),
                }),
            }
        }
        wires.sort();
        let out = FreeDiagram {
            dom: f.dom.clone(),
            cod: g.cod.clone(),
            nodes,
            wires,
        };
        debug_assert!(out.check().is_ok());
        Ok(out)
    }

    fn tensor_mor(f: &FreeDiagram, g: &FreeDiagram) -> FreeDiagram {
        let shift = f.nodes.len();
        let mut nodes = f.nodes.clone();
        nodes.extend(g.nodes.iter().cloned());
        let mut wires = f.wires.clone();
        for w in &g.wires {
            wires.push(Wire {
                src: shift_out(&w.src, shift, f.dom.len()),
                tgt: shift_in(&w.tgt, shift, f.cod.len()),
            });
        }
        wires.sort();
        let out = FreeDiagram {
            dom: Self::tensor_obj(&f.dom, &g.dom),
            cod: Self::tensor_obj(&f.cod, &g.cod),
            nodes,
            wires,
        };
        debug_assert!(out.check().is_ok());
        out
    }

    fn symmetry(a: &Vec<String>, b: &Vec<String>) -> FreeDiagram {
        FreeDiagram::block_swap(a, b)
    }

    fn mor_equal(f: &FreeDiagram, g: &FreeDiagram) -> bool {
        diagram_isomorphic(f, g)
    }

    fn check_obj(_a: &Vec<String>) -> Result<(), SmcError> {
        Ok(())
    }

    fn check_mor(f: &FreeDiagram) -> Result<(), SmcError> {
        f.check()
    }

    fn obj_label(a: &Vec<String>) -> String {
        if a.is_empty() {
            "I".to_owned()
        } else {
            a.join(".")
        }
    }

    fn mor_label(f: &FreeDiagram) -> String {
        format!(
            "{}=>{} ({} nodes)",
            Self::obj_label(&f.dom),
            Self::obj_label(&f.cod),
            f.nodes.len()
        )
    }
}

/// Boundary-anchored labeled-diagram isomorphism by backtracking over node
/// assignments. Ports are rigid, so once nodes are matched the whole wiring
/// must transport wire by wire.
fn diagram_isomorphic(f: &FreeDiagram, g: &FreeDiagram) -> bool {
    if f.dom != g.dom || f.cod != g.cod || f.nodes.len() != g.nodes.len() {
        return false;
    }
    let n = f.nodes.len();
    if n == 0 {
        let mut fw = f.wires.clone();
        let mut gw = g.wires.clone();
        fw.sort();
        gw.sort();
        return fw == gw;
    }

    fn map_out(p: &OutPort, assign: &[Option<usize>]) -> Option<OutPort> {
        match p {
            OutPort::Dom(i) => Some(OutPort::Dom(*i)),
            OutPort::NodeOut(a, j) => assign[*a].map(|b| OutPort::NodeOut(b, *j)),
        }
    }

    fn map_in(p: &InPort, assign: &[Option<usize>]) -> Option<InPort> {
        match p {
            InPort::Cod(i) => Some(InPort::Cod(*i)),
            InPort::NodeIn(a, j) => assign[*a].map(|b| InPort::NodeIn(b, *j)),
        }
    }

    // Wires whose endpoints are both mapped must exist verbatim in g.
    fn consistent(f: &FreeDiagram, g: &FreeDiagram, assign: &[Option<usize>]) -> bool {
        for w in &f.wires {
            let (Some(src), Some(tgt)) = (map_out(&w.src, assign), map_in(&w.tgt, assign)) else {
                continue;
            };
            if !g.wires.iter().any(|v| v.src == src && v.tgt == tgt) {
                return false;
            }
        }
        true
    }

    fn extend(
        f: &FreeDiagram,
        g: &FreeDiagram,
        next: usize,
        assign: &mut Vec<Option<usize>>,
        used: &mut Vec<bool>,
    ) -> bool {
        if next == f.nodes.len() {
            return consistent(f, g, assign);
        }
        for cand in 0..g.nodes.len() {
            if used[cand] || g.nodes[cand] != f.nodes[next] {
                continue;
            }
            assign[next] = Some(cand);
            used[cand] = true;
            if consistent(f, g, assign) && extend(f, g, next + 1, assign, used) {
                return true;
            }
            assign[next] = None;
            used[cand] = false;
        }
        false
    }

    let mut assign = vec![None; n];
    let mut used = vec![false; n];
    extend(f, g, 0, &mut assign, &mut used)
}
