//! Undirected loop-free graphs on vertices `0..n`.

use std::collections::VecDeque;
use std::fmt::Write as _;

use serde::Serialize;

use crate::error::{Error, Result};

/// Symmetric, loop-free adjacency with sorted neighbor lists.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SimpleGraph {
    adj: Vec<Vec<usize>>,
}

impl SimpleGraph {
    pub fn empty(n: usize) -> Self {
        Self {
            adj: vec![Vec::new(); n],
        }
    }

    /// Builds from an edge list; duplicates and orientation are normalized.
    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut adj = vec![Vec::new(); n];
        for (a, b) in edges {
            if a >= n || b >= n {
                return Err(Error::Precondition(format!(
                    "edge ({a},{b}) out of range for {n} vertices"
                )));
            }
            if a == b {
                return Err(Error::Precondition(format!("self-loop at {a}")));
            }
            adj[a].push(b);
            adj[b].push(a);
        }
        for list in &mut adj {
            list.sort_unstable();
            list.dedup();
        }
        Ok(Self { adj })
    }

    /// Builds from a symmetric predicate evaluated on all pairs `a < b`.
    pub fn from_fn(n: usize, mut adjacent: impl FnMut(usize, usize) -> bool) -> Self {
        let mut adj = vec![Vec::new(); n];
        for a in 0..n {
            for b in a + 1..n {
                if adjacent(a, b) {
                    adj[a].push(b);
                    adj[b].push(a);
                }
            }
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        Self { adj }
    }

    pub fn complete(n: usize) -> Self {
        Self::from_fn(n, |_, _| true)
    }

    /// Star with center 0 and `leaves` leaves.
    pub fn star(leaves: usize) -> Self {
        Self::from_fn(leaves + 1, |a, _| a == 0)
    }

    /// Path on `n` vertices `0-1-...-(n-1)`.
    pub fn path(n: usize) -> Self {
        Self::from_fn(n, |a, b| b == a + 1)
    }

    pub fn cycle(n: usize) -> Self {
        Self::from_fn(n, |a, b| b == a + 1 || (n >= 3 && a == 0 && b == n - 1))
    }

    pub fn vertex_count(&self) -> usize {
        self.adj.len()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        a < self.adj.len() && self.adj[a].binary_search(&b).is_ok()
    }

    /// Edges `(a, b)` with `a < b`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adj
            .iter()
            .enumerate()
            .flat_map(|(a, ns)| ns.iter().filter(move |&&b| b > a).map(move |&b| (a, b)))
    }

    /// Connected components of the graph with `removed` deleted. Each
    /// component is sorted; components are ordered by their least vertex.
    pub fn components_without(&self, removed: &[bool]) -> Vec<Vec<usize>> {
        let n = self.vertex_count();
        let mut seen = removed.to_vec();
        seen.resize(n, false);
        let mut comps = Vec::new();
        let mut queue = VecDeque::new();
        for s in 0..n {
            if seen[s] {
                continue;
            }
            seen[s] = true;
            queue.push_back(s);
            let mut comp = Vec::new();
            while let Some(x) = queue.pop_front() {
                comp.push(x);
                for &y in &self.adj[x] {
                    if !seen[y] {
                        seen[y] = true;
                        queue.push_back(y);
                    }
                }
            }
            comp.sort_unstable();
            comps.push(comp);
        }
        comps
    }

    pub fn components(&self) -> Vec<Vec<usize>> {
        self.components_without(&[])
    }

    pub fn is_connected(&self) -> bool {
        self.components().len() <= 1
    }

    pub fn is_tree(&self) -> bool {
        self.vertex_count() >= 1 && self.edge_count() + 1 == self.vertex_count() && self.is_connected()
    }

    /// Subgraph induced on `vertices`, relabelled `0..k` in the given order.
    pub fn induced(&self, vertices: &[usize]) -> Self {
        let mut pos = vec![usize::MAX; self.vertex_count()];
        for (i, &v) in vertices.iter().enumerate() {
            pos[v] = i;
        }
        let mut adj = vec![Vec::new(); vertices.len()];
        for (i, &v) in vertices.iter().enumerate() {
            adj[i] = self.adj[v]
                .iter()
                .filter_map(|&u| (pos[u] != usize::MAX).then_some(pos[u]))
                .collect();
            adj[i].sort_unstable();
        }
        Self { adj }
    }

    /// The graph with vertex `v` deleted; higher indices shift down by one.
    pub fn remove_vertex(&self, v: usize) -> Self {
        let keep: Vec<usize> = (0..self.vertex_count()).filter(|&x| x != v).collect();
        self.induced(&keep)
    }

    /// Applies a relabelling: vertex `v` becomes `perm[v]`.
    pub fn relabel(&self, perm: &[usize]) -> Self {
        Self::from_edges(
            self.vertex_count(),
            self.edges().map(|(a, b)| (perm[a], perm[b])),
        )
        .expect("relabelling by a permutation preserves validity")
    }

    pub fn to_dot(&self, name: &str, labels: Option<&[String]>) -> String {
        let mut out = format!("graph \"{name}\" {{\n");
        for v in 0..self.vertex_count() {
            match labels {
                Some(l) => writeln!(out, "  {v} [label=\"{}\"];", l[v]).unwrap(),
                None => writeln!(out, "  {v};").unwrap(),
            }
        }
        for (a, b) in self.edges() {
            writeln!(out, "  {a} -- {b};").unwrap();
        }
        out.push_str("}\n");
        out
    }
}

/// Strong product: vertex `(a, b)` has index `a * |V2| + b`.
pub fn strong_product(g1: &SimpleGraph, g2: &SimpleGraph) -> SimpleGraph {
    let n2 = g2.vertex_count();
    let n = g1.vertex_count() * n2;
    SimpleGraph::from_fn(n, |x, y| {
        let (a, b) = (x / n2, x % n2);
        let (c, d) = (y / n2, y % n2);
        let first = a == c || g1.has_edge(a, c);
        let second = b == d || g2.has_edge(b, d);
        first && second
    })
}

/// JSON adjacency document `{vertices: [...], edges: [[i, j], ...]}`.
#[derive(Debug, Clone, Serialize)]
pub struct AdjacencyDocument<V: Serialize> {
    pub vertices: Vec<V>,
    pub edges: Vec<[usize; 2]>,
}

/// Finds an isomorphism `f` with `g1.has_edge(a,b) == g2.has_edge(f[a],f[b])`
/// that also preserves the given vertex colors. Plain backtracking with
/// color-refinement candidates; meant for the small structured graphs in tests
/// and drawing checks.
pub fn find_isomorphism(
    g1: &SimpleGraph,
    colors1: &[u64],
    g2: &SimpleGraph,
    colors2: &[u64],
) -> Option<Vec<usize>> {
    let n = g1.vertex_count();
    if n != g2.vertex_count() || g1.edge_count() != g2.edge_count() {
        return None;
    }
    let (c1, c2) = refine_colors(g1, colors1, g2, colors2);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&v| std::cmp::Reverse(g1.degree(v)));
    let mut map = vec![usize::MAX; n];
    let mut used = vec![false; n];
    fn go(
        k: usize,
        order: &[usize],
        g1: &SimpleGraph,
        g2: &SimpleGraph,
        c1: &[u64],
        c2: &[u64],
        map: &mut [usize],
        used: &mut [bool],
    ) -> bool {
        if k == order.len() {
            return true;
        }
        let v = order[k];
        for w in 0..g2.vertex_count() {
            if used[w] || c1[v] != c2[w] || g1.degree(v) != g2.degree(w) {
                continue;
            }
            let consistent = order[..k]
                .iter()
                .all(|&x| g1.has_edge(v, x) == g2.has_edge(w, map[x]));
            if !consistent {
                continue;
            }
            map[v] = w;
            used[w] = true;
            if go(k + 1, order, g1, g2, c1, c2, map, used) {
                return true;
            }
            used[w] = false;
            map[v] = usize::MAX;
        }
        false
    }
    go(0, &order, g1, g2, &c1, &c2, &mut map, &mut used).then_some(map)
}

// Runs the same refinement on both graphs with a shared palette so that the
// resulting color ids are comparable.
fn refine_colors(g: &SimpleGraph, init: &[u64], other: &SimpleGraph, other_init: &[u64]) -> (Vec<u64>, Vec<u64>) {
    use std::collections::BTreeMap;
    let n = g.vertex_count();
    let mut ca: Vec<u64> = init.to_vec();
    let mut cb: Vec<u64> = other_init.to_vec();
    for _ in 0..=n {
        let mut palette: BTreeMap<(u64, Vec<u64>), u64> = BTreeMap::new();
        let sig = |gr: &SimpleGraph, c: &[u64], v: usize| {
            let mut s: Vec<u64> = gr.neighbors(v).iter().map(|&u| c[u]).collect();
            s.sort_unstable();
            (c[v], s)
        };
        let sa: Vec<_> = (0..n).map(|v| sig(g, &ca, v)).collect();
        let sb: Vec<_> = (0..other.vertex_count()).map(|v| sig(other, &cb, v)).collect();
        for s in sa.iter().chain(sb.iter()) {
            let next = palette.len() as u64;
            palette.entry(s.clone()).or_insert(next);
        }
        let na: Vec<u64> = sa.iter().map(|s| palette[s]).collect();
        let nb: Vec<u64> = sb.iter().map(|s| palette[s]).collect();
        let stable = count_distinct(&na) == count_distinct(&ca) && count_distinct(&nb) == count_distinct(&cb);
        ca = na;
        cb = nb;
        if stable {
            break;
        }
    }
    (ca, cb)
}

fn count_distinct(c: &[u64]) -> usize {
    let mut v = c.to_vec();
    v.sort_unstable();
    v.dedup();
    v.len()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn strong_product_examples() {
        let k2 = SimpleGraph::complete(2);
        assert_eq!(strong_product(&k2, &k2), SimpleGraph::complete(4));
        let p = SimpleGraph::path(3);
        assert_eq!(strong_product(&SimpleGraph::complete(1), &p), p);
        let prod = strong_product(&k2, &p);
        assert_eq!(prod.vertex_count(), 6);
        assert_eq!(prod.edge_count(), 11);
    }

    #[test]
    fn components_after_removal() {
        let s = SimpleGraph::star(3);
        let mut removed = vec![false; 4];
        removed[0] = true;
        assert_eq!(s.components_without(&removed).len(), 3);
        assert_eq!(s.components().len(), 1);
    }

    #[test]
    fn trees() {
        assert!(SimpleGraph::star(3).is_tree());
        assert!(SimpleGraph::path(1).is_tree());
        assert!(!SimpleGraph::cycle(3).is_tree());
        assert!(!SimpleGraph::empty(2).is_tree());
    }

    #[test]
    fn isomorphism_respects_colors() {
        let p = SimpleGraph::path(3);
        let q = SimpleGraph::from_edges(3, [(0, 2), (2, 1)]).unwrap();
        let f = find_isomorphism(&p, &[0, 0, 0], &q, &[0, 0, 0]).unwrap();
        assert_eq!(f[1], 2);
        assert!(find_isomorphism(&p, &[0, 1, 0], &q, &[0, 1, 0]).is_none());
        assert!(find_isomorphism(&p, &[0, 0, 0], &SimpleGraph::complete(3), &[0, 0, 0]).is_none());
    }

    #[test]
    fn rejects_bad_edges() {
        assert!(SimpleGraph::from_edges(2, [(0, 0)]).is_err());
        assert!(SimpleGraph::from_edges(2, [(0, 2)]).is_err());
    }
}
