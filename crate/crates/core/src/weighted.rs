//! Vertex-weighted Hamiltonicity: walks that visit each vertex at least once
//! and at most `w(v)` times, cut certificates, the tree criterion, and the
//! constructions that lift cycles through products and quotients.

use std::collections::HashSet;
use std::fmt;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::cluster::expand_weighted;
use crate::error::{Error, Result};
use crate::graph::{strong_product, SimpleGraph};
use crate::oracle::{find_hamiltonian, SearchConfig, SearchOutcome};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightedGraph {
    graph: SimpleGraph,
    weights: Vec<u64>,
}

impl WeightedGraph {
    pub fn new(graph: SimpleGraph, weights: Vec<u64>) -> Result<Self> {
        if weights.len() != graph.vertex_count() {
            return Err(Error::Precondition(format!(
                "{} weights for {} vertices",
                weights.len(),
                graph.vertex_count()
            )));
        }
        if let Some(v) = weights.iter().position(|&w| w == 0) {
            return Err(Error::Precondition(format!("vertex {v} has weight 0")));
        }
        Ok(Self { graph, weights })
    }

    /// All weights 1.
    pub fn unit(graph: SimpleGraph) -> Self {
        let weights = vec![1; graph.vertex_count()];
        Self { graph, weights }
    }

    pub fn graph(&self) -> &SimpleGraph {
        &self.graph
    }

    pub fn weights(&self) -> &[u64] {
        &self.weights
    }

    pub fn weight(&self, v: usize) -> u64 {
        self.weights[v]
    }

    pub fn vertex_count(&self) -> usize {
        self.graph.vertex_count()
    }

    pub fn total_weight(&self) -> u64 {
        self.weights.iter().sum()
    }

    /// Same graph with every weight multiplied by `factor`.
    pub fn scaled(&self, factor: u64) -> Result<Self> {
        Self::new(self.graph.clone(), self.weights.iter().map(|w| w * factor).collect())
    }

    pub fn expand(&self) -> (SimpleGraph, Vec<usize>) {
        expand_weighted(&self.graph, &self.weights).expect("weights are positive")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WalkKind {
    Path,
    Cycle,
}

impl fmt::Display for WalkKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            WalkKind::Path => "path",
            WalkKind::Cycle => "cycle",
        })
    }
}

/// A walk `seq[0] seq[1] ... seq[k-1]`. For cycles the closing step
/// `seq[k-1] -- seq[0]` is implied and the first vertex is not repeated.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WalkCertificate {
    pub kind: WalkKind,
    pub seq: Vec<usize>,
}

impl WalkCertificate {
    pub fn new(kind: WalkKind, seq: Vec<usize>) -> Self {
        Self { kind, seq }
    }

    /// Occurrence count of each vertex among `0..n`; out-of-range entries
    /// are ignored.
    pub fn multiplicity(&self, n: usize) -> Vec<u64> {
        let mut m = vec![0; n];
        for &v in &self.seq {
            if v < n {
                m[v] += 1;
            }
        }
        m
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum WalkIssue {
    Empty,
    OutOfRange { position: usize, vertex: usize },
    NotAdjacent { position: usize, from: usize, to: usize },
    ClosingRepeat,
    Uncovered { vertex: usize },
    OverWeight { vertex: usize, count: u64, weight: u64 },
    /// A closed walk needs total weight at least 3.
    TooLight { total: u64 },
}

impl fmt::Display for WalkIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WalkIssue::Empty => write!(f, "empty walk"),
            WalkIssue::OutOfRange { position, vertex } => {
                write!(f, "position {position}: vertex {vertex} does not exist")
            }
            WalkIssue::NotAdjacent { position, from, to } => {
                write!(f, "position {position}: {from} and {to} are not adjacent")
            }
            WalkIssue::ClosingRepeat => write!(f, "cycle repeats its first vertex at the end"),
            WalkIssue::Uncovered { vertex } => write!(f, "vertex {vertex} is never visited"),
            WalkIssue::OverWeight { vertex, count, weight } => {
                write!(f, "vertex {vertex} visited {count} times, weight {weight}")
            }
            WalkIssue::TooLight { total } => {
                write!(f, "closed walk needs total weight at least 3, graph has {total}")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct WalkReport {
    pub issues: Vec<WalkIssue>,
}

impl WalkReport {
    pub fn is_valid(&self) -> bool {
        self.issues.is_empty()
    }
}

/// Checks adjacency (cyclically for cycles), coverage and multiplicity
/// bounds. A cycle may consist of a single vertex, in which case no edge is
/// needed, but every closed walk requires total weight at least 3.
pub fn verify_walk(g: &WeightedGraph, cert: &WalkCertificate) -> WalkReport {
    let n = g.vertex_count();
    let seq = &cert.seq;
    let mut issues = Vec::new();
    if seq.is_empty() {
        issues.push(WalkIssue::Empty);
        return WalkReport { issues };
    }
    for (position, &vertex) in seq.iter().enumerate() {
        if vertex >= n {
            issues.push(WalkIssue::OutOfRange { position, vertex });
        }
    }
    if !issues.is_empty() {
        return WalkReport { issues };
    }
    let steps = match cert.kind {
        WalkKind::Path => seq.len() - 1,
        WalkKind::Cycle if seq.len() == 1 => 0,
        WalkKind::Cycle => seq.len(),
    };
    if cert.kind == WalkKind::Cycle && seq.len() >= 2 && seq[0] == seq[seq.len() - 1] {
        issues.push(WalkIssue::ClosingRepeat);
    }
    for i in 0..steps {
        let (a, b) = (seq[i], seq[(i + 1) % seq.len()]);
        if !g.graph().has_edge(a, b) {
            issues.push(WalkIssue::NotAdjacent { position: i, from: a, to: b });
        }
    }
    for (vertex, count) in cert.multiplicity(n).into_iter().enumerate() {
        if count == 0 {
            issues.push(WalkIssue::Uncovered { vertex });
        } else if count > g.weight(vertex) {
            issues.push(WalkIssue::OverWeight {
                vertex,
                count,
                weight: g.weight(vertex),
            });
        }
    }
    if cert.kind == WalkKind::Cycle && g.total_weight() < 3 {
        issues.push(WalkIssue::TooLight { total: g.total_weight() });
    }
    WalkReport { issues }
}

/// A vertex set together with the component count of its complement.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CutWitness {
    pub cut: Vec<usize>,
    pub components: usize,
    pub total_weight: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CutVerdict {
    pub witness: CutWitness,
    pub obstructs_cycle: bool,
    pub obstructs_path: bool,
}

impl CutVerdict {
    pub fn obstructs(&self, kind: WalkKind) -> bool {
        match kind {
            WalkKind::Path => self.obstructs_path,
            WalkKind::Cycle => self.obstructs_cycle,
        }
    }
}

/// Counts the components `N` of `g - cut`. A closed walk must enter each
/// component from the cut and leave again, so it needs `w(cut) >= N`
/// whenever `N >= 2`; a walk with two free ends needs `w(cut) >= N - 1`.
pub fn cut_check(g: &WeightedGraph, cut: &[usize]) -> Result<CutVerdict> {
    let n = g.vertex_count();
    let mut removed = vec![false; n];
    for &v in cut {
        if v >= n {
            return Err(Error::Precondition(format!("cut vertex {v} out of range")));
        }
        removed[v] = true;
    }
    let mut cut: Vec<usize> = cut.to_vec();
    cut.sort_unstable();
    cut.dedup();
    let components = g.graph().components_without(&removed).len();
    let total_weight: u64 = cut.iter().map(|&v| g.weight(v)).sum();
    let big_n = components as u64;
    Ok(CutVerdict {
        obstructs_cycle: big_n >= 2 && total_weight < big_n,
        obstructs_path: total_weight + 1 < big_n,
        witness: CutWitness {
            cut,
            components,
            total_weight,
        },
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeDecision {
    /// Every vertex has weight at least its degree.
    pub degree_criterion: bool,
    /// On success, a depth-first tour from vertex 0 with the final return to
    /// the root dropped. Each vertex appears exactly `deg(v)` times (once
    /// for a lone vertex), and the last vertex is adjacent to the first, so
    /// the sequence is valid both as a walk and as a closed walk.
    pub walk: Option<WalkCertificate>,
}

pub fn tree_w_hamiltonian(t: &WeightedGraph) -> Result<TreeDecision> {
    let g = t.graph();
    if !g.is_tree() {
        return Err(Error::Domain("input graph is not a tree".into()));
    }
    let degree_criterion = (0..g.vertex_count()).all(|v| t.weight(v) >= g.degree(v) as u64);
    let walk = degree_criterion.then(|| WalkCertificate::new(WalkKind::Path, tree_tour(g)));
    Ok(TreeDecision {
        degree_criterion,
        walk,
    })
}

fn tree_tour(g: &SimpleGraph) -> Vec<usize> {
    let mut seq = vec![0];
    let mut stack: Vec<(usize, usize, usize)> = vec![(0, usize::MAX, 0)];
    while let Some((v, parent, i)) = stack.pop() {
        let ns = g.neighbors(v);
        let next = ns[i..].iter().position(|&u| u != parent).map(|k| i + k);
        match next {
            Some(j) => {
                stack.push((v, parent, j + 1));
                stack.push((ns[j], v, 0));
                seq.push(ns[j]);
            }
            None => {
                if let Some(&(p, _, _)) = stack.last() {
                    seq.push(p);
                }
            }
        }
    }
    if seq.len() > 1 {
        seq.pop();
    }
    seq
}

/// `max deg(v) / w(v)`: the least scale `λ` with `λ w(v) >= deg(v)` for all `v`.
pub fn tree_lambda_threshold(t: &WeightedGraph) -> Result<Ratio<u64>> {
    let g = t.graph();
    if !g.is_tree() {
        return Err(Error::Domain("input graph is not a tree".into()));
    }
    Ok((0..g.vertex_count())
        .map(|v| Ratio::new(g.degree(v) as u64, t.weight(v)))
        .max()
        .unwrap_or_else(|| Ratio::from_integer(0)))
}

/// Depth-first search directly over (current vertex, visit counts) states.
/// Independent of the expansion; used to cross-check it.
pub fn weighted_search(g: &WeightedGraph, kind: WalkKind) -> Option<Vec<usize>> {
    let n = g.vertex_count();
    if n == 0 {
        return None;
    }
    if kind == WalkKind::Cycle && g.total_weight() < 3 {
        return None;
    }
    if n == 1 {
        return Some(vec![0]);
    }
    let mut failed: HashSet<(usize, Vec<u64>)> = HashSet::new();
    let starts: Vec<usize> = match kind {
        WalkKind::Cycle => vec![0],
        WalkKind::Path => (0..n).collect(),
    };
    for s in starts {
        let mut counts = vec![0; n];
        counts[s] = 1;
        let mut seq = vec![s];
        if walk_dfs(g, kind, &mut counts, &mut seq, 1, &mut failed) {
            return Some(seq);
        }
    }
    None
}

fn walk_dfs(
    g: &WeightedGraph,
    kind: WalkKind,
    counts: &mut Vec<u64>,
    seq: &mut Vec<usize>,
    covered: usize,
    failed: &mut HashSet<(usize, Vec<u64>)>,
) -> bool {
    let n = g.vertex_count();
    let cur = *seq.last().expect("walk is nonempty");
    if covered == n {
        match kind {
            WalkKind::Path => return true,
            WalkKind::Cycle if g.graph().has_edge(cur, seq[0]) => return true,
            WalkKind::Cycle => {}
        }
    }
    let key = (cur, counts.clone());
    if failed.contains(&key) {
        return false;
    }
    for &u in g.graph().neighbors(cur) {
        if counts[u] < g.weight(u) {
            counts[u] += 1;
            seq.push(u);
            let newly = usize::from(counts[u] == 1);
            if walk_dfs(g, kind, counts, seq, covered + newly, failed) {
                return true;
            }
            seq.pop();
            counts[u] -= 1;
        }
    }
    failed.insert(key);
    false
}

/// `(direct weighted search, oracle on the expansion)`; the two agree when
/// weighted Hamiltonicity is equivalent to Hamiltonicity of the blow-up.
pub fn expansion_equivalence_check(g: &WeightedGraph, kind: WalkKind, cfg: &SearchConfig) -> Result<(bool, bool)> {
    let direct = weighted_search(g, kind).is_some();
    let (expanded, _) = g.expand();
    match find_hamiltonian(&expanded, kind, cfg) {
        SearchOutcome::Found(_) => Ok((direct, true)),
        SearchOutcome::None => Ok((direct, false)),
        SearchOutcome::Inconclusive(why) => Err(Error::Inconclusive(why)),
    }
}

fn check_hamiltonian_cycle(g: &SimpleGraph, c: &WalkCertificate, what: &str) -> Result<()> {
    if c.kind != WalkKind::Cycle || c.seq.len() < 3 {
        return Err(Error::Precondition(format!("{what} must be a cycle on at least 3 vertices")));
    }
    let report = verify_walk(&WeightedGraph::unit(g.clone()), c);
    match report.issues.first() {
        None => Ok(()),
        Some(issue) => Err(Error::Precondition(format!("{what} is not a Hamiltonian cycle: {issue}"))),
    }
}

/// Row-by-row traversal of the product: for each `b` in the second cycle,
/// walk the whole first cycle at height `b`. Vertex `(a, b)` has index
/// `a * |V2| + b`.
pub fn compose_product_cycle(
    g1: &SimpleGraph,
    c1: &WalkCertificate,
    g2: &SimpleGraph,
    c2: &WalkCertificate,
) -> Result<WalkCertificate> {
    check_hamiltonian_cycle(g1, c1, "first cycle")?;
    check_hamiltonian_cycle(g2, c2, "second cycle")?;
    let n2 = g2.vertex_count();
    let seq = c2
        .seq
        .iter()
        .flat_map(|&b| c1.seq.iter().map(move |&a| a * n2 + b))
        .collect();
    let out = WalkCertificate::new(WalkKind::Cycle, seq);
    let product = WeightedGraph::unit(strong_product(g1, g2));
    if let Some(issue) = verify_walk(&product, &out).issues.first() {
        return Err(Error::Construction(format!("product cycle: {issue}")));
    }
    Ok(out)
}

/// Lifts a Hamiltonian cycle of the quotient over `classes` to `g`. Each
/// class is traversed along its own cycle, opened at some rotation and
/// direction so that it starts next to where the previous class ended.
/// Candidates are tried lowest start vertex first, forward before backward,
/// with backtracking. Classes of size 1 or 2 may pass any ordering of their
/// members.
pub fn lift_quotient_cycle(
    g: &SimpleGraph,
    classes: &[Vec<usize>],
    quotient_cycle: &[usize],
    class_cycles: &[WalkCertificate],
) -> Result<WalkCertificate> {
    if class_cycles.len() != classes.len() {
        return Err(Error::Precondition("one class cycle per class is required".into()));
    }
    let mut seen = vec![false; classes.len()];
    for &c in quotient_cycle {
        if c >= classes.len() || std::mem::replace(&mut seen[c], true) {
            return Err(Error::Precondition(format!("class {c} repeated or out of range")));
        }
    }
    if seen.iter().any(|s| !s) {
        return Err(Error::Precondition("quotient cycle misses a class".into()));
    }
    for (i, (members, cyc)) in classes.iter().zip(class_cycles).enumerate() {
        let mut a = members.clone();
        let mut b = cyc.seq.clone();
        a.sort_unstable();
        b.sort_unstable();
        if a != b {
            return Err(Error::Precondition(format!("cycle of class {i} does not list its members")));
        }
        let k = cyc.seq.len();
        let closing = if k >= 3 { k } else { k - 1 };
        if (0..closing).any(|j| !g.has_edge(cyc.seq[j], cyc.seq[(j + 1) % k])) {
            return Err(Error::Precondition(format!("cycle of class {i} uses a missing edge")));
        }
    }
    let options: Vec<Vec<Vec<usize>>> = quotient_cycle
        .iter()
        .map(|&c| openings(&class_cycles[c].seq))
        .collect();
    let mut chosen: Vec<usize> = Vec::with_capacity(options.len());
    if !choose_openings(g, &options, &mut chosen) {
        return Err(Error::Construction(
            "no junction edges connect consecutive classes".into(),
        ));
    }
    let seq: Vec<usize> = chosen
        .iter()
        .enumerate()
        .flat_map(|(i, &j)| options[i][j].iter().copied())
        .collect();
    let out = WalkCertificate::new(WalkKind::Cycle, seq);
    if let Some(issue) = verify_walk(&WeightedGraph::unit(g.clone()), &out).issues.first() {
        return Err(Error::Construction(format!("lifted cycle: {issue}")));
    }
    Ok(out)
}

/// All Hamiltonian paths of a class read off its cycle, ordered by first
/// vertex, forward before backward.
fn openings(cyc: &[usize]) -> Vec<Vec<usize>> {
    let k = cyc.len();
    let mut out: Vec<(usize, u8, Vec<usize>)> = Vec::new();
    for r in 0..k {
        let fwd: Vec<usize> = (0..k).map(|i| cyc[(r + i) % k]).collect();
        let bwd: Vec<usize> = (0..k).map(|i| cyc[(r + k - i) % k]).collect();
        out.push((fwd[0], 0, fwd));
        if k >= 3 {
            out.push((bwd[0], 1, bwd));
        } else if k == 2 {
            // The two orderings of a pair are covered by its two rotations.
        }
    }
    out.sort();
    out.dedup_by(|a, b| a.2 == b.2);
    out.into_iter().map(|(_, _, p)| p).collect()
}

fn choose_openings(g: &SimpleGraph, options: &[Vec<Vec<usize>>], chosen: &mut Vec<usize>) -> bool {
    let i = chosen.len();
    if i == options.len() {
        if options.len() == 1 {
            return true;
        }
        let last = *options[i - 1][chosen[i - 1]].last().expect("class is nonempty");
        let first = options[0][chosen[0]][0];
        return g.has_edge(last, first);
    }
    for j in 0..options[i].len() {
        let ok = i == 0 || {
            let prev = *options[i - 1][chosen[i - 1]].last().expect("class is nonempty");
            g.has_edge(prev, options[i][j][0])
        };
        if ok {
            chosen.push(j);
            if choose_openings(g, options, chosen) {
                return true;
            }
            chosen.pop();
        }
    }
    false
}

/// Deletes a vertex adjacent to all others. The result has a Hamiltonian
/// path exactly when the input has a Hamiltonian cycle (for at least three
/// vertices).
pub fn universal_vertex_reduce(g: &SimpleGraph, v0: usize) -> Result<SimpleGraph> {
    if v0 >= g.vertex_count() || g.degree(v0) + 1 != g.vertex_count() {
        return Err(Error::Domain(format!("vertex {v0} is not adjacent to every other vertex")));
    }
    Ok(g.remove_vertex(v0))
}
