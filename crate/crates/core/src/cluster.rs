//! Cluster graphs (strong-component quotients of power graphs), the closed-form
//! cluster counts for p-groups, exponent trees, and weighted expansion.

use std::fmt::Write as _;

use num_integer::Integer;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::SimpleGraph;
use crate::group::{Element, FiniteAbelianGroup};
use crate::power_graph::DirectedPowerGraph;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Cluster {
    /// Least member in element order.
    pub representative: Element,
    /// Element indices, ascending.
    pub members: Vec<usize>,
    pub weight: u64,
    /// Common order of the members.
    pub element_order: u64,
}

/// Clusters are indexed by their least member, so the identity cluster is 0.
/// An edge `a -> b` means members of `a` have multiples in `b`; the edge
/// relation is transitively closed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightedClusterGraph {
    group: FiniteAbelianGroup,
    clusters: Vec<Cluster>,
    cluster_of: Vec<usize>,
    edges: Vec<Vec<usize>>,
    irreducible: Vec<Vec<usize>>,
    levels: Vec<usize>,
}

impl WeightedClusterGraph {
    /// Assembles the graph from a partition of element indices and a
    /// (transitively closed) arc list between parts.
    fn assemble(
        group: &FiniteAbelianGroup,
        mut parts: Vec<Vec<usize>>,
        arcs: impl Fn(&[usize], &[usize]) -> Vec<(usize, usize)>,
    ) -> Self {
        for p in &mut parts {
            p.sort_unstable();
        }
        parts.sort_unstable_by_key(|p| p[0]);
        let n = group.order() as usize;
        let mut cluster_of = vec![0; n];
        for (c, p) in parts.iter().enumerate() {
            for &v in p {
                cluster_of[v] = c;
            }
        }
        let k = parts.len();
        let mut edges = vec![Vec::new(); k];
        for (a, b) in arcs(&cluster_of, &parts.iter().map(|p| p[0]).collect::<Vec<_>>()) {
            if a != b {
                edges[a].push(b);
            }
        }
        for e in &mut edges {
            e.sort_unstable();
            e.dedup();
        }
        let irreducible: Vec<Vec<usize>> = (0..k)
            .map(|a| {
                edges[a]
                    .iter()
                    .copied()
                    .filter(|&c| !edges[a].iter().any(|&b| edges[b].binary_search(&c).is_ok()))
                    .collect()
            })
            .collect();
        let clusters: Vec<Cluster> = parts
            .into_iter()
            .map(|members| {
                let representative = group.element_at(members[0]);
                Cluster {
                    element_order: group.element_order(&representative),
                    representative,
                    weight: members.len() as u64,
                    members,
                }
            })
            .collect();
        // Arcs strictly decrease element order, so ascending order is a
        // valid evaluation order for the height recursion.
        let mut by_order: Vec<usize> = (0..k).collect();
        by_order.sort_by_key(|&c| clusters[c].element_order);
        let mut levels = vec![0; k];
        for c in by_order {
            levels[c] = irreducible[c].iter().map(|&d| levels[d] + 1).max().unwrap_or(0);
        }
        Self {
            group: group.clone(),
            clusters,
            cluster_of,
            edges,
            irreducible,
            levels,
        }
    }

    pub fn group(&self) -> &FiniteAbelianGroup {
        &self.group
    }

    pub fn len(&self) -> usize {
        self.clusters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.clusters.is_empty()
    }

    pub fn clusters(&self) -> &[Cluster] {
        &self.clusters
    }

    pub fn cluster(&self, c: usize) -> &Cluster {
        &self.clusters[c]
    }

    /// Cluster containing element index `v`.
    pub fn cluster_of(&self, v: usize) -> usize {
        self.cluster_of[v]
    }

    pub fn weights(&self) -> Vec<u64> {
        self.clusters.iter().map(|c| c.weight).collect()
    }

    pub fn out_edges(&self, c: usize) -> &[usize] {
        &self.edges[c]
    }

    pub fn irreducible_out(&self, c: usize) -> &[usize] {
        &self.irreducible[c]
    }

    pub fn irreducible_in_degree(&self, c: usize) -> usize {
        self.irreducible.iter().filter(|e| e.binary_search(&c).is_ok()).count()
    }

    /// Number of irreducible edges on a path down to the identity cluster.
    pub fn level(&self, c: usize) -> usize {
        self.levels[c]
    }

    pub fn levels(&self) -> &[usize] {
        &self.levels
    }

    /// Clusters at height `k`.
    pub fn level_set(&self, k: usize) -> Vec<usize> {
        (0..self.len()).filter(|&c| self.levels[c] == k).collect()
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges
            .iter()
            .enumerate()
            .flat_map(|(a, bs)| bs.iter().map(move |&b| (a, b)))
    }

    pub fn irreducible_edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.irreducible
            .iter()
            .enumerate()
            .flat_map(|(a, bs)| bs.iter().map(move |&b| (a, b)))
    }

    /// Undirected graph on clusters with all (closed) edges.
    pub fn undirected(&self) -> SimpleGraph {
        SimpleGraph::from_edges(self.len(), self.edges()).expect("cluster arcs are valid")
    }

    /// Undirected graph on clusters with irreducible edges only.
    pub fn irreducible_graph(&self) -> SimpleGraph {
        SimpleGraph::from_edges(self.len(), self.irreducible_edges()).expect("cluster arcs are valid")
    }

    /// Partition of element indices, by cluster.
    pub fn partition(&self) -> Vec<Vec<usize>> {
        self.clusters.iter().map(|c| c.members.clone()).collect()
    }

    /// DOT with weight labels and irreducible edges only, drawn bottom-up
    /// from the identity cluster.
    pub fn to_dot(&self) -> String {
        let mut out = format!("digraph \"C({})\" {{\n  rankdir=BT;\n", self.group);
        for (i, c) in self.clusters.iter().enumerate() {
            writeln!(
                out,
                "  {i} [label=\"{}\", tooltip=\"{}\"];",
                c.weight, c.representative
            )
            .unwrap();
        }
        for (a, b) in self.irreducible_edges() {
            writeln!(out, "  {b} -> {a};").unwrap();
        }
        out.push_str("}\n");
        out
    }

    pub fn to_json(&self) -> String {
        #[derive(Serialize)]
        struct Doc<'a> {
            group: String,
            clusters: Vec<ClusterDoc<'a>>,
            edges: Vec<[usize; 2]>,
            irreducible_edges: Vec<[usize; 2]>,
        }
        #[derive(Serialize)]
        struct ClusterDoc<'a> {
            representative: &'a Element,
            members: Vec<Element>,
            weight: u64,
            level: usize,
        }
        let doc = Doc {
            group: self.group.to_string(),
            clusters: self
                .clusters
                .iter()
                .enumerate()
                .map(|(i, c)| ClusterDoc {
                    representative: &c.representative,
                    members: c.members.iter().map(|&v| self.group.element_at(v)).collect(),
                    weight: c.weight,
                    level: self.levels[i],
                })
                .collect(),
            edges: self.edges().map(|(a, b)| [a, b]).collect(),
            irreducible_edges: self.irreducible_edges().map(|(a, b)| [a, b]).collect(),
        };
        serde_json::to_string_pretty(&doc).expect("document serializes")
    }
}

/// Strong components of the power graph, via an iterative Tarjan pass.
pub fn condense(p: &DirectedPowerGraph) -> WeightedClusterGraph {
    let parts = strong_components(p.vertex_count(), |v| p.out_neighbors(v));
    WeightedClusterGraph::assemble(p.group(), parts, |cluster_of, _| {
        p.edges()
            .map(|(g, h)| (cluster_of[g], cluster_of[h]))
            .collect()
    })
}

fn strong_components<'a>(n: usize, succ: impl Fn(usize) -> &'a [usize]) -> Vec<Vec<usize>> {
    const UNSEEN: usize = usize::MAX;
    let mut index = vec![UNSEEN; n];
    let mut low = vec![0; n];
    let mut on_stack = vec![false; n];
    let mut stack = Vec::new();
    let mut comps = Vec::new();
    let mut next = 0;
    for root in 0..n {
        if index[root] != UNSEEN {
            continue;
        }
        let mut call: Vec<(usize, usize)> = vec![(root, 0)];
        index[root] = next;
        low[root] = next;
        next += 1;
        stack.push(root);
        on_stack[root] = true;
        while let Some(&mut (v, ref mut i)) = call.last_mut() {
            let ns = succ(v);
            if *i < ns.len() {
                let w = ns[*i];
                *i += 1;
                if index[w] == UNSEEN {
                    index[w] = next;
                    low[w] = next;
                    next += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    call.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
                continue;
            }
            call.pop();
            if let Some(&(parent, _)) = call.last() {
                low[parent] = low[parent].min(low[v]);
            }
            if low[v] == index[v] {
                let mut comp = Vec::new();
                loop {
                    let w = stack.pop().expect("component root is on the stack");
                    on_stack[w] = false;
                    comp.push(w);
                    if w == v {
                        break;
                    }
                }
                comps.push(comp);
            }
        }
    }
    comps
}

fn require_p_group(group: &FiniteAbelianGroup) -> Result<Option<u64>> {
    if group.rank() == 0 {
        return Ok(None);
    }
    group
        .single_prime()
        .map(Some)
        .ok_or_else(|| Error::Domain(format!("{group} is not a p-group (primes {:?})", group.primes())))
}

/// Clusters of a p-group as orbits of multiplication by units modulo
/// `p^e`, where `p^e` is the group exponent. Edges come from the multiples
/// of each representative.
pub fn clusters_by_orbits(group: &FiniteAbelianGroup) -> Result<WeightedClusterGraph> {
    let p = require_p_group(group)?;
    let modulus = p.map_or(1, |p| p.pow(group.exponent_of(p)));
    let units: Vec<u64> = (1..=modulus).filter(|x| x.gcd(&modulus) == 1).collect();
    let n = group.order() as usize;
    let mut seen = vec![false; n];
    let mut parts = Vec::new();
    for v in 0..n {
        if seen[v] {
            continue;
        }
        let g = group.element_at(v);
        let mut orbit: Vec<usize> = units.iter().map(|&x| group.index_of(&group.power(&g, x))).collect();
        orbit.sort_unstable();
        orbit.dedup();
        for &w in &orbit {
            seen[w] = true;
        }
        parts.push(orbit);
    }
    Ok(WeightedClusterGraph::assemble(group, parts, |cluster_of, reps| {
        reps.iter()
            .enumerate()
            .flat_map(|(c, &r)| {
                let g = group.element_at(r);
                let o = group.element_order(&g);
                (1..=o)
                    .map(move |k| (c, cluster_of[group.index_of(&group.power(&g, k))]))
                    .collect::<Vec<_>>()
            })
            .collect()
    }))
}

fn log_p(mut x: u64, p: u64) -> u32 {
    let mut k = 0;
    while x > 1 {
        x /= p;
        k += 1;
    }
    k
}

/// Size of the cluster of `a` in a p-group: `p^(m-1) (p-1)` where `p^m` is
/// the order of `a`; the identity cluster has size 1.
pub fn cluster_size_formula(group: &FiniteAbelianGroup, a: &Element) -> Result<u64> {
    check_element(group, a)?;
    let Some(p) = require_p_group(group)? else {
        return Ok(1);
    };
    if a.is_identity() {
        return Ok(1);
    }
    let m = log_p(group.element_order(a), p);
    Ok(p.pow(m - 1) * (p - 1))
}

/// The same expression with `m` taken as the largest factor exponent over
/// the support of `a`. This overestimates whenever a supported coordinate
/// is divisible by `p`; kept to report that gap.
pub fn max_support_exponent_size(group: &FiniteAbelianGroup, a: &Element) -> Result<u64> {
    check_element(group, a)?;
    let Some(p) = require_p_group(group)? else {
        return Ok(1);
    };
    let m = a
        .support()
        .iter()
        .map(|&i| group.factors()[i].exponent)
        .max();
    Ok(m.map_or(1, |m| p.pow(m - 1) * (p - 1)))
}

/// Number of `y mod p^m` with `p*y = x`: zero for units, `p` otherwise.
pub fn r_count(x: u64, p: u64, m: u32) -> u64 {
    debug_assert!(x < p.pow(m));
    if x.gcd(&p) == 1 {
        0
    } else {
        p
    }
}

/// Product of [`r_count`] over the coordinates: the number of elements `b`
/// with `p*b = a`.
pub fn root_count_product(group: &FiniteAbelianGroup, a: &Element) -> Result<u64> {
    check_element(group, a)?;
    let Some(p) = require_p_group(group)? else {
        return Ok(1);
    };
    Ok(a.coords()
        .iter()
        .zip(group.factors())
        .map(|(&x, f)| r_count(x, p, f.exponent))
        .product())
}

/// Number of clusters other than `c(a)` whose members `b` satisfy
/// `p*b ∈ c(a)`; equivalently the irreducible in-degree of `c(a)`.
///
/// Each member of `c(a)` has the same number `R` of p-th roots. For `a != 0`
/// every root cluster is `p` times larger than `c(a)`, giving `R / p`; for
/// `a = 0` the roots form the p-torsion subgroup, whose nonzero clusters
/// have size `p - 1`.
pub fn cluster_indegree(group: &FiniteAbelianGroup, a: &Element) -> Result<u64> {
    let roots = root_count_product(group, a)?;
    let Some(p) = require_p_group(group)? else {
        return Ok(0);
    };
    Ok(if a.is_identity() {
        (roots - 1) / (p - 1)
    } else {
        roots / p
    })
}

fn check_element(group: &FiniteAbelianGroup, a: &Element) -> Result<()> {
    if group.contains(a) {
        Ok(())
    } else {
        Err(Error::InvalidElement(format!("{a} is not an element of {group}")))
    }
}

/// Tree on exponent tuples `0 <= a_i <= alpha_i` with edges `a -- a+1`
/// (componentwise increment clamped at `alpha`). The root is `alpha`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NTree {
    pub exponents: Vec<u32>,
    /// Tuples in lexicographic order.
    pub nodes: Vec<Vec<u32>>,
    /// `(child, parent)` index pairs.
    pub edges: Vec<(usize, usize)>,
    pub root: usize,
}

impl NTree {
    pub fn from_exponents(exponents: &[u32]) -> Self {
        let mut nodes: Vec<Vec<u32>> = vec![Vec::new()];
        for &a in exponents {
            nodes = nodes
                .into_iter()
                .flat_map(|t| {
                    (0..=a).map(move |x| {
                        let mut t = t.clone();
                        t.push(x);
                        t
                    })
                })
                .collect();
        }
        let index = |t: &[u32]| nodes.binary_search_by(|x| x.as_slice().cmp(t)).expect("tuple is a node");
        let root = index(exponents);
        let edges = nodes
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != root)
            .map(|(i, t)| {
                let up: Vec<u32> = t.iter().zip(exponents).map(|(&x, &a)| (x + 1).min(a)).collect();
                (i, index(&up))
            })
            .collect();
        Self {
            exponents: exponents.to_vec(),
            nodes,
            edges,
            root,
        }
    }

    pub fn graph(&self) -> SimpleGraph {
        SimpleGraph::from_edges(self.nodes.len(), self.edges.iter().copied()).expect("tree edges are valid")
    }

    pub fn to_dot(&self) -> String {
        let mut out = String::from("graph \"N-tree\" {\n");
        for (i, t) in self.nodes.iter().enumerate() {
            let label: Vec<String> = t.iter().map(u32::to_string).collect();
            writeln!(out, "  {i} [label=\"({})\"];", label.join(",")).unwrap();
        }
        for &(a, b) in &self.edges {
            writeln!(out, "  {a} -- {b};").unwrap();
        }
        out.push_str("}\n");
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("tree serializes")
    }
}

pub fn build_n_tree(group: &FiniteAbelianGroup) -> Result<NTree> {
    require_p_group(group)?;
    let exps: Vec<u32> = group.factors().iter().map(|f| f.exponent).collect();
    Ok(NTree::from_exponents(&exps))
}

/// Blow-up of `g` replacing each vertex `v` by a clique of `w[v]` copies.
/// Returns the graph and, for each new vertex, the original vertex. Copies of
/// `v` are numbered consecutively, in vertex order.
pub fn expand_weighted(g: &SimpleGraph, w: &[u64]) -> Result<(SimpleGraph, Vec<usize>)> {
    if w.len() != g.vertex_count() {
        return Err(Error::Precondition(format!(
            "{} weights for {} vertices",
            w.len(),
            g.vertex_count()
        )));
    }
    if let Some(v) = w.iter().position(|&x| x == 0) {
        return Err(Error::Precondition(format!("vertex {v} has weight 0")));
    }
    let origin: Vec<usize> = w
        .iter()
        .enumerate()
        .flat_map(|(v, &k)| std::iter::repeat(v).take(k as usize))
        .collect();
    let expanded = SimpleGraph::from_fn(origin.len(), |a, b| {
        origin[a] == origin[b] || g.has_edge(origin[a], origin[b])
    });
    Ok((expanded, origin))
}

/// Quotient by a partition: classes `X` and `Y` are adjacent when every
/// member of `X` has a neighbor in `Y` and every member of `Y` has a
/// neighbor in `X`.
pub fn quotient_graph(g: &SimpleGraph, classes: &[Vec<usize>]) -> Result<SimpleGraph> {
    let n = g.vertex_count();
    let mut class_of = vec![usize::MAX; n];
    for (c, members) in classes.iter().enumerate() {
        if members.is_empty() {
            return Err(Error::Precondition(format!("class {c} is empty")));
        }
        for &v in members {
            if v >= n || class_of[v] != usize::MAX {
                return Err(Error::Precondition(format!(
                    "vertex {v} is out of range or in two classes"
                )));
            }
            class_of[v] = c;
        }
    }
    if let Some(v) = class_of.iter().position(|&c| c == usize::MAX) {
        return Err(Error::Precondition(format!("vertex {v} is in no class")));
    }
    let dominates = |x: usize, y: usize| {
        classes[x]
            .iter()
            .all(|&v| g.neighbors(v).iter().any(|&u| class_of[u] == y))
    };
    Ok(SimpleGraph::from_fn(classes.len(), |x, y| dominates(x, y) && dominates(y, x)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::power_graph::build_power_graph;

    fn grp(s: &str) -> FiniteAbelianGroup {
        s.parse().unwrap()
    }

    #[test]
    fn z9_z3_clusters() {
        let g = grp("Z9xZ3");
        let c = condense(&build_power_graph(&g).unwrap());
        let mut w = c.weights();
        w.sort_unstable();
        assert_eq!(w, vec![1, 2, 2, 2, 2, 6, 6, 6]);
        assert_eq!(c.irreducible_in_degree(0), 4);
        for k in 0..c.len() {
            if c.cluster(k).weight == 6 {
                assert_eq!(c.irreducible_out(k).len(), 1);
                assert_eq!(c.level(k), 2);
            }
        }
        assert_eq!(clusters_by_orbits(&g).unwrap(), c);
    }

    #[test]
    fn trivial_group() {
        let c = condense(&build_power_graph(&grp("Z1")).unwrap());
        assert_eq!(c.weights(), vec![1]);
        assert_eq!(clusters_by_orbits(&grp("Z1")).unwrap(), c);
    }

    #[test]
    fn orbit_sizes() {
        let z8 = grp("Z8");
        let c = clusters_by_orbits(&z8).unwrap();
        assert_eq!(c.cluster(c.cluster_of(1)).members, vec![1, 3, 5, 7]);
        let g = grp("Z9xZ3");
        let a = g.element(vec![1, 0]).unwrap();
        let o = clusters_by_orbits(&g).unwrap();
        assert_eq!(o.cluster(o.cluster_of(g.index_of(&a))).weight, 6);
        assert!(clusters_by_orbits(&grp("Z2xZ3")).is_err());
    }

    #[test]
    fn size_formulas() {
        let g = grp("Z9xZ3");
        let e = |c: Vec<u64>| g.element(c).unwrap();
        assert_eq!(cluster_size_formula(&g, &e(vec![1, 1])).unwrap(), 6);
        assert_eq!(cluster_size_formula(&g, &e(vec![3, 1])).unwrap(), 2);
        assert_eq!(cluster_size_formula(&g, &e(vec![0, 0])).unwrap(), 1);
        assert_eq!(max_support_exponent_size(&g, &e(vec![3, 1])).unwrap(), 6);
    }

    #[test]
    fn roots_and_indegree() {
        assert_eq!(r_count(1, 3, 2), 0);
        assert_eq!(r_count(3, 3, 2), 3);
        assert_eq!(r_count(0, 2, 1), 2);
        let g = grp("Z9xZ3");
        let e = |c: Vec<u64>| g.element(c).unwrap();
        assert_eq!(root_count_product(&g, &e(vec![3, 0])).unwrap(), 9);
        assert_eq!(cluster_indegree(&g, &e(vec![3, 0])).unwrap(), 3);
        assert_eq!(cluster_indegree(&g, &e(vec![0, 0])).unwrap(), 4);
        let z9 = grp("Z9");
        assert_eq!(cluster_indegree(&z9, &z9.element(vec![1]).unwrap()).unwrap(), 0);
    }

    #[test]
    fn n_trees() {
        let t = NTree::from_exponents(&[3, 2]);
        assert_eq!(t.nodes.len(), 12);
        assert_eq!(t.nodes[t.root], vec![3, 2]);
        assert!(t.graph().is_tree());
        let t = NTree::from_exponents(&[1]);
        assert_eq!(t.edges, vec![(0, 1)]);
        let t = NTree::from_exponents(&[1, 1]);
        assert_eq!(t.root, 3);
        assert_eq!(t.edges, vec![(0, 3), (1, 3), (2, 3)]);
    }

    #[test]
    fn expansion() {
        let (k3, origin) = expand_weighted(&SimpleGraph::empty(1), &[3]).unwrap();
        assert_eq!(k3, SimpleGraph::complete(3));
        assert_eq!(origin, vec![0, 0, 0]);
        let (k4, _) = expand_weighted(&SimpleGraph::complete(2), &[2, 2]).unwrap();
        assert_eq!(k4, SimpleGraph::complete(4));
        assert!(expand_weighted(&SimpleGraph::complete(2), &[1, 0]).is_err());
    }

    #[test]
    fn quotients() {
        let g = SimpleGraph::cycle(5);
        let discrete: Vec<Vec<usize>> = (0..5).map(|v| vec![v]).collect();
        assert_eq!(quotient_graph(&g, &discrete).unwrap(), g);
        let one = quotient_graph(&g, &[(0..5).collect()]).unwrap();
        assert_eq!((one.vertex_count(), one.edge_count()), (1, 0));
        assert!(quotient_graph(&g, &[vec![0, 1]]).is_err());
    }

    #[test]
    fn cluster_partition_quotient_is_condensation() {
        let p = build_power_graph(&grp("Z9xZ3")).unwrap();
        let c = condense(&p);
        let q = quotient_graph(&p.undirected_view(), &c.partition()).unwrap();
        assert_eq!(q, c.undirected());
    }
}
