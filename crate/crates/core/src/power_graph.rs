//! Directed power graphs, edge witnesses, and the two product constructions.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::graph::{AdjacencyDocument, SimpleGraph};
use crate::group::{crt_intersect, Element, FiniteAbelianGroup, ResidueClass};

pub const DEFAULT_VERTEX_CAP: u64 = 50_000;

/// Vertices are the group elements in index order. There is an edge `g -> h`
/// iff `h` is a positive multiple of `g` and `h != g`.
#[derive(Debug, Clone)]
pub struct DirectedPowerGraph {
    group: FiniteAbelianGroup,
    elements: Vec<Element>,
    orders: Vec<u64>,
    out: Vec<Vec<usize>>,
    /// `witnesses[g][i]` is the class of exponents taking `g` to `out[g][i]`.
    witnesses: Vec<Vec<ResidueClass>>,
}

pub fn build_power_graph(group: &FiniteAbelianGroup) -> Result<DirectedPowerGraph> {
    build_power_graph_with_cap(group, DEFAULT_VERTEX_CAP)
}

pub fn build_power_graph_with_cap(group: &FiniteAbelianGroup, cap: u64) -> Result<DirectedPowerGraph> {
    let order = group.order();
    if order > cap {
        return Err(Error::Capacity { order, cap });
    }
    let n = order as usize;
    let elements: Vec<Element> = group.elements().collect();
    let orders: Vec<u64> = elements.iter().map(|g| group.element_order(g)).collect();
    let mut out = Vec::with_capacity(n);
    let mut witnesses = Vec::with_capacity(n);
    for (gi, g) in elements.iter().enumerate() {
        let o = orders[gi];
        // Multiples k*g for k = 1..=o are pairwise distinct, so the first hit
        // of each target is its least positive witness.
        let mut row: Vec<(usize, ResidueClass)> = (1..=o)
            .filter_map(|k| {
                let h = group.index_of(&group.power(g, k));
                (h != gi).then(|| (h, ResidueClass::new(k, o).expect("order is positive")))
            })
            .collect();
        row.sort_unstable_by_key(|&(h, _)| h);
        out.push(row.iter().map(|&(h, _)| h).collect());
        witnesses.push(row.into_iter().map(|(_, c)| c).collect());
    }
    Ok(DirectedPowerGraph {
        group: group.clone(),
        elements,
        orders,
        out,
        witnesses,
    })
}

impl DirectedPowerGraph {
    pub fn group(&self) -> &FiniteAbelianGroup {
        &self.group
    }

    pub fn vertex_count(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &[Element] {
        &self.elements
    }

    pub fn element(&self, v: usize) -> &Element {
        &self.elements[v]
    }

    pub fn element_order(&self, v: usize) -> u64 {
        self.orders[v]
    }

    pub fn out_neighbors(&self, v: usize) -> &[usize] {
        &self.out[v]
    }

    pub fn has_edge(&self, g: usize, h: usize) -> bool {
        self.out[g].binary_search(&h).is_ok()
    }

    pub fn edge_count(&self) -> usize {
        self.out.iter().map(Vec::len).sum()
    }

    /// Directed edges `(g, h)` in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.out
            .iter()
            .enumerate()
            .flat_map(|(g, hs)| hs.iter().map(move |&h| (g, h)))
    }

    /// Exponents `k >= 1` with `k*g = h`, as a class modulo `o(g)`. For
    /// `g == h` this is `1 mod o(g)`; it is `None` when `h` is not a
    /// multiple of `g`.
    pub fn witness(&self, g: usize, h: usize) -> Option<ResidueClass> {
        if g == h {
            return Some(ResidueClass::new(1, self.orders[g]).expect("order is positive"));
        }
        self.out[g]
            .binary_search(&h)
            .ok()
            .map(|i| self.witnesses[g][i])
    }

    pub fn undirected_view(&self) -> SimpleGraph {
        SimpleGraph::from_edges(self.vertex_count(), self.edges()).expect("power graph edges are valid")
    }

    pub fn to_dot(&self) -> String {
        let mut out = format!("digraph \"P({})\" {{\n", self.group);
        for (v, e) in self.elements.iter().enumerate() {
            writeln!(out, "  {v} [label=\"{e}\"];").unwrap();
        }
        for (g, h) in self.edges() {
            writeln!(out, "  {g} -> {h};").unwrap();
        }
        out.push_str("}\n");
        out
    }

    pub fn undirected_dot(&self) -> String {
        let labels: Vec<String> = self.elements.iter().map(|e| e.to_string()).collect();
        self.undirected_view()
            .to_dot(&format!("P({})", self.group), Some(&labels))
    }

    /// Adjacency document; `directed` selects arcs versus undirected pairs.
    pub fn to_json(&self, directed: bool) -> String {
        let edges: Vec<[usize; 2]> = if directed {
            self.edges().map(|(a, b)| [a, b]).collect()
        } else {
            self.undirected_view().edges().map(|(a, b)| [a, b]).collect()
        };
        let doc = AdjacencyDocument {
            vertices: self.elements.clone(),
            edges,
        };
        serde_json::to_string_pretty(&doc).expect("document serializes")
    }
}

/// Pairs `(v1, v2)` and `(x1, x2)` are adjacent when, in one direction or the
/// other, some positive exponent takes both coordinates to their targets at
/// once: `f1(v1, x1) ∩ f2(v2, x2) ≠ ∅`. Vertex `(a, b)` has index
/// `a * |P2| + b`, matching [`FiniteAbelianGroup::direct_product`].
pub fn boxtimes_product(p1: &DirectedPowerGraph, p2: &DirectedPowerGraph) -> SimpleGraph {
    let n2 = p2.vertex_count();
    let arc = |a: usize, b: usize, c: usize, d: usize| match (p1.witness(a, c), p2.witness(b, d)) {
        (Some(f1), Some(f2)) => crt_intersect(f1, f2).is_some(),
        _ => false,
    };
    SimpleGraph::from_fn(p1.vertex_count() * n2, |x, y| {
        let (a, b) = (x / n2, x % n2);
        let (c, d) = (y / n2, y % n2);
        arc(a, b, c, d) || arc(c, d, a, b)
    })
}

/// Strong product of the two directed graphs (with reflexive coordinates),
/// then symmetrized.
pub fn directed_strong_product(p1: &DirectedPowerGraph, p2: &DirectedPowerGraph) -> SimpleGraph {
    let n2 = p2.vertex_count();
    let arc = |a: usize, b: usize, c: usize, d: usize| {
        (a == c || p1.has_edge(a, c)) && (b == d || p2.has_edge(b, d))
    };
    SimpleGraph::from_fn(p1.vertex_count() * n2, |x, y| {
        let (a, b) = (x / n2, x % n2);
        let (c, d) = (y / n2, y % n2);
        arc(a, b, c, d) || arc(c, d, a, b)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::strong_product;

    fn pg(spec: &str) -> DirectedPowerGraph {
        build_power_graph(&spec.parse().unwrap()).unwrap()
    }

    #[test]
    fn small_views() {
        assert_eq!(pg("Z3").undirected_view(), SimpleGraph::complete(3));
        assert_eq!(pg("Z4").undirected_view(), SimpleGraph::complete(4));
        assert_eq!(pg("Z2xZ2").undirected_view(), SimpleGraph::star(3));
        assert_eq!(pg("Z2").undirected_view(), SimpleGraph::complete(2));
        let t = pg("Z1");
        assert_eq!((t.vertex_count(), t.edge_count()), (1, 0));
    }

    #[test]
    fn witnesses() {
        let p = pg("Z8");
        // 2 -> 6 via k = 3 (mod 4)
        assert_eq!(p.witness(2, 6).unwrap(), ResidueClass::new(3, 4).unwrap());
        let to_identity = p.witness(2, 0).unwrap();
        assert_eq!((to_identity.base(), to_identity.least_positive()), (0, 4));
        assert!(p.witness(2, 1).is_none());
        assert_eq!(p.witness(0, 0).unwrap().modulus(), 1);
    }

    #[test]
    fn capacity_is_enforced() {
        let g: FiniteAbelianGroup = "Z2^6".parse().unwrap();
        assert_eq!(
            build_power_graph_with_cap(&g, 32).unwrap_err(),
            Error::Capacity { order: 64, cap: 32 }
        );
    }

    #[test]
    fn boxtimes_of_two_z2_is_proper_subgraph() {
        let p = pg("Z2");
        let b = boxtimes_product(&p, &p);
        let s = strong_product(&p.undirected_view(), &p.undirected_view());
        assert!(b.edges().all(|(x, y)| s.has_edge(x, y)));
        assert!(b.edge_count() < s.edge_count());
        assert_eq!(b, pg("Z2xZ2").undirected_view());
    }

    #[test]
    fn boxtimes_with_trivial_is_identity() {
        let p = pg("Z9");
        assert_eq!(boxtimes_product(&p, &pg("Z1")), p.undirected_view());
    }

    #[test]
    fn json_export_shape() {
        let doc: serde_json::Value = serde_json::from_str(&pg("Z2").to_json(false)).unwrap();
        assert_eq!(doc["vertices"], serde_json::json!([[0], [1]]));
        assert_eq!(doc["edges"], serde_json::json!([[0, 1]]));
    }
}
