//! One-way DOT export of networks and diagrams.

use crate::diagram::CausalDiagram;
use crate::graph::CausalNetwork;
use crate::smc::SymmetricMonoidal;

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

/// Renders a network as a directed graph, one arc per edge with the edge id
/// as label. Vertices appear in sorted order, so output is deterministic.
pub fn network_to_dot(n: &CausalNetwork) -> String {
    let mut out = String::from("digraph {\n");
    for v in n.vertices() {
        out.push_str(&format!("  {};\n", quote(v.as_str())));
    }
    for (e, ends) in n.edges() {
        out.push_str(&format!(
            "  {} -> {} [label={}];\n",
            quote(ends.src.as_str()),
            quote(ends.tgt.as_str()),
            quote(e.as_str()),
        ));
    }
    out.push_str("}\n");
    out
}

/// Renders a diagram: edges labeled by their object, vertices by a short
/// description of their morphism.
pub fn diagram_to_dot<V: SymmetricMonoidal>(d: &CausalDiagram<V>) -> String {
    let mut out = String::from("digraph {\n");
    for v in d.network().vertices() {
        let label = format!("{}: {}", v, V::mor_label(d.vertex_morphism(v)));
        out.push_str(&format!("  {} [label={}];\n", quote(v.as_str()), quote(&label)));
    }
    for (e, ends) in d.network().edges() {
        let label = format!("{}: {}", e, V::obj_label(d.edge_object(e)));
        out.push_str(&format!(
            "  {} -> {} [label={}];\n",
            quote(ends.src.as_str()),
            quote(ends.tgt.as_str()),
            quote(&label),
        ));
    }
    out.push_str("}\n");
    out
}
