//! Exact Hamiltonian path and cycle search: subset dynamic programming for
//! small graphs and pruned backtracking a little beyond.

use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Arc;
use std::time::{Duration, Instant};

use crate::cluster::expand_weighted;
use crate::graph::SimpleGraph;
use crate::weighted::{WalkCertificate, WalkKind, WeightedGraph};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SearchMode {
    Dp,
    Backtracking,
    #[default]
    Auto,
}

#[derive(Debug, Clone)]
pub struct SearchConfig {
    pub mode: SearchMode,
    /// Largest vertex count handed to the subset DP.
    pub dp_cap: usize,
    /// Largest vertex count handed to backtracking (at most 63).
    pub backtrack_cap: usize,
    pub time_budget: Option<Duration>,
    /// Set to `true` from another thread to stop the search.
    pub cancel: Option<Arc<AtomicBool>>,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            mode: SearchMode::Auto,
            dp_cap: 20,
            backtrack_cap: 24,
            time_budget: None,
            cancel: None,
        }
    }
}

impl SearchConfig {
    pub fn with_time_budget(mut self, budget: Duration) -> Self {
        self.time_budget = Some(budget);
        self
    }

    pub fn with_mode(mut self, mode: SearchMode) -> Self {
        self.mode = mode;
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SearchOutcome {
    Found(WalkCertificate),
    /// Exhaustively refuted.
    None,
    Inconclusive(String),
}

impl SearchOutcome {
    pub fn is_found(&self) -> bool {
        matches!(self, SearchOutcome::Found(_))
    }

    /// `Some(true/false)` when decided, `None` when inconclusive.
    pub fn decided(&self) -> Option<bool> {
        match self {
            SearchOutcome::Found(_) => Some(true),
            SearchOutcome::None => Some(false),
            SearchOutcome::Inconclusive(_) => None,
        }
    }
}

struct Stopwatch {
    deadline: Option<Instant>,
    cancel: Option<Arc<AtomicBool>>,
    ticks: u32,
}

impl Stopwatch {
    fn new(cfg: &SearchConfig) -> Self {
        Self {
            deadline: cfg.time_budget.map(|d| Instant::now() + d),
            cancel: cfg.cancel.clone(),
            ticks: 0,
        }
    }

    /// Cheap enough to call at every node; the clock is read every 1024 calls.
    fn expired(&mut self) -> bool {
        if self.cancel.as_ref().is_some_and(|c| c.load(Ordering::Relaxed)) {
            return true;
        }
        self.ticks = self.ticks.wrapping_add(1);
        self.ticks % 1024 == 0 && self.deadline.is_some_and(|d| Instant::now() >= d)
    }
}

/// Hamiltonian path (every vertex once) or cycle (at least 3 vertices,
/// closing edge implied) in `g`.
pub fn find_hamiltonian(g: &SimpleGraph, kind: WalkKind, cfg: &SearchConfig) -> SearchOutcome {
    let n = g.vertex_count();
    match kind {
        WalkKind::Path if n == 0 => return SearchOutcome::None,
        WalkKind::Path if n == 1 => return found(kind, vec![0]),
        WalkKind::Cycle if n < 3 => return SearchOutcome::None,
        _ => {}
    }
    let use_dp = match cfg.mode {
        SearchMode::Dp => true,
        SearchMode::Backtracking => false,
        SearchMode::Auto => n <= cfg.dp_cap,
    };
    let cap = if use_dp { cfg.dp_cap.min(24) } else { cfg.backtrack_cap.min(62) };
    if n > cap {
        return SearchOutcome::Inconclusive(format!("{n} vertices exceed the search cap of {cap}"));
    }
    let adj: Vec<u64> = (0..n)
        .map(|v| g.neighbors(v).iter().fold(0u64, |m, &u| m | 1 << u))
        .collect();
    let mut clock = Stopwatch::new(cfg);
    let result = if use_dp {
        held_karp(&adj, kind, &mut clock)
    } else {
        match kind {
            WalkKind::Cycle => backtrack_cycle(&adj, &mut clock),
            WalkKind::Path => {
                // A Hamiltonian path of G is a Hamiltonian cycle of G plus
                // one universal vertex, cut open at that vertex.
                let hub = n;
                let full = (1u64 << n) - 1;
                let mut with_hub: Vec<u64> = adj.iter().map(|m| m | 1 << hub).collect();
                with_hub.push(full);
                backtrack_cycle(&with_hub, &mut clock).map(|r| {
                    r.map(|cyc| {
                        let at = cyc.iter().position(|&v| v == hub).expect("hub is on the cycle");
                        cyc[at + 1..].iter().chain(&cyc[..at]).copied().collect()
                    })
                })
            }
        }
    };
    match result {
        Ok(Some(seq)) => found(kind, seq),
        Ok(None) => SearchOutcome::None,
        Err(Interrupted) => SearchOutcome::Inconclusive("time budget exhausted or cancelled".into()),
    }
}

fn found(kind: WalkKind, seq: Vec<usize>) -> SearchOutcome {
    SearchOutcome::Found(WalkCertificate { kind, seq })
}

struct Interrupted;

fn held_karp(adj: &[u64], kind: WalkKind, clock: &mut Stopwatch) -> Result<Option<Vec<usize>>, Interrupted> {
    let n = adj.len();
    let full = (1usize << n) - 1;
    // ends[mask] = bitset of vertices v such that some path covers exactly
    // `mask` and ends at v (for cycles, all paths start at vertex 0).
    let mut ends = vec![0u32; 1 << n];
    match kind {
        WalkKind::Cycle => ends[1] = 1,
        WalkKind::Path => (0..n).for_each(|v| ends[1 << v] = 1 << v),
    }
    for mask in 1..=full {
        if kind == WalkKind::Cycle && mask & 1 == 0 {
            continue;
        }
        let mut e = ends[mask];
        if e == 0 {
            continue;
        }
        if clock.expired() {
            return Err(Interrupted);
        }
        while e != 0 {
            let v = e.trailing_zeros() as usize;
            e &= e - 1;
            let mut next = adj[v] as usize & !mask;
            while next != 0 {
                let u = next.trailing_zeros() as usize;
                next &= next - 1;
                ends[mask | 1 << u] |= 1 << u;
            }
        }
    }
    let mut last = match kind {
        WalkKind::Cycle => ends[full] & adj[0] as u32,
        WalkKind::Path => ends[full],
    };
    if last == 0 {
        return Ok(None);
    }
    let mut seq = Vec::with_capacity(n);
    let mut mask = full;
    loop {
        let v = last.trailing_zeros() as usize;
        seq.push(v);
        mask &= !(1 << v);
        if mask == 0 {
            break;
        }
        last = ends[mask] & adj[v] as u32;
    }
    seq.reverse();
    Ok(Some(seq))
}

/// Cycle through vertex 0 by depth-first extension in ascending neighbor
/// order. A branch is cut when the unvisited set is disconnected, when an
/// unvisited vertex has fewer than two usable neighbors, or when either
/// end of the partial path has no unvisited neighbor left.
fn backtrack_cycle(adj: &[u64], clock: &mut Stopwatch) -> Result<Option<Vec<usize>>, Interrupted> {
    let n = adj.len();
    let full = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    let mut path = vec![0usize];
    let found = extend(adj, full, 1, &mut path, clock)?;
    Ok(found.then_some(path))
}

fn extend(
    adj: &[u64],
    full: u64,
    visited: u64,
    path: &mut Vec<usize>,
    clock: &mut Stopwatch,
) -> Result<bool, Interrupted> {
    if clock.expired() {
        return Err(Interrupted);
    }
    let cur = *path.last().expect("path starts at vertex 0");
    let rest = full & !visited;
    if rest == 0 {
        return Ok(adj[cur] & 1 != 0);
    }
    if !feasible(adj, rest, cur) {
        return Ok(false);
    }
    let mut cand = adj[cur] & rest;
    while cand != 0 {
        let u = cand.trailing_zeros() as usize;
        cand &= cand - 1;
        path.push(u);
        if extend(adj, full, visited | 1 << u, path, clock)? {
            return Ok(true);
        }
        path.pop();
    }
    Ok(false)
}

fn feasible(adj: &[u64], rest: u64, cur: usize) -> bool {
    let ends = 1u64 | 1 << cur;
    if adj[cur] & rest == 0 || adj[0] & rest == 0 {
        return false;
    }
    let usable = rest | ends;
    let mut r = rest;
    while r != 0 {
        let x = r.trailing_zeros() as usize;
        r &= r - 1;
        if (adj[x] & usable).count_ones() < 2 {
            return false;
        }
    }
    let mut reach = rest & rest.wrapping_neg();
    loop {
        let mut grown = reach;
        let mut r = reach;
        while r != 0 {
            let x = r.trailing_zeros() as usize;
            r &= r - 1;
            grown |= adj[x] & rest;
        }
        if grown == reach {
            return reach == rest;
        }
        reach = grown;
    }
}

/// Searches the weighted expansion and projects the result back: copies map
/// to their vertex and consecutive repeats (cyclically, for cycles) collapse.
pub fn find_w_hamiltonian(g: &WeightedGraph, kind: WalkKind, cfg: &SearchConfig) -> SearchOutcome {
    let total = g.total_weight();
    let cap = cfg.dp_cap.max(cfg.backtrack_cap) as u64;
    if total > cap {
        return SearchOutcome::Inconclusive(format!("expansion has {total} vertices, cap is {cap}"));
    }
    let (expanded, origin) = expand_weighted(g.graph(), g.weights()).expect("weighted graph is valid");
    match find_hamiltonian(&expanded, kind, cfg) {
        SearchOutcome::Found(c) => found(kind, project(&c.seq, &origin, kind)),
        other => other,
    }
}

fn project(seq: &[usize], origin: &[usize], kind: WalkKind) -> Vec<usize> {
    let mut out: Vec<usize> = Vec::with_capacity(seq.len());
    for &x in seq {
        let v = origin[x];
        if out.last() != Some(&v) {
            out.push(v);
        }
    }
    if kind == WalkKind::Cycle {
        while out.len() > 1 && out.first() == out.last() {
            out.pop();
        }
    }
    out
}
