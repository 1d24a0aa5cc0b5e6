//! Weighted two-axis grids (the cluster graphs of two-prime groups), their
//! cut obstructions, and the constructive cycle builder: a snake path in the
//! complete bipartite graph, a red/blue coloring of the unused cells, and
//! assembly of the grid cycle.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::SimpleGraph;
use crate::weighted::{cut_check, tree_w_hamiltonian, verify_walk, CutWitness, WalkCertificate, WalkKind, WeightedGraph};

/// Vertices `(i, j)` with `0 <= i <= m`, `0 <= j <= n`. The corner `(0,0)`
/// has weight 1, x-axis vertices `(i,0)` weight `v`, y-axis vertices `(0,j)`
/// weight `u`, interior vertices `u*v`. Vertex `(i,j)` has index
/// `i*(n+1) + j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Grid {
    pub m: usize,
    pub n: usize,
    pub u: u64,
    pub v: u64,
}

impl Grid {
    pub fn new(m: usize, n: usize, u: u64, v: u64) -> Result<Self> {
        if u == 0 || v == 0 {
            return Err(Error::Precondition("axis weights must be at least 1".into()));
        }
        Ok(Self { m, n, u, v })
    }

    pub fn vertex_count(&self) -> usize {
        (self.m + 1) * (self.n + 1)
    }

    pub fn index(&self, i: usize, j: usize) -> usize {
        i * (self.n + 1) + j
    }

    pub fn coords(&self, idx: usize) -> (usize, usize) {
        (idx / (self.n + 1), idx % (self.n + 1))
    }

    pub fn weight(&self, i: usize, j: usize) -> u64 {
        match (i, j) {
            (0, 0) => 1,
            (_, 0) => self.v,
            (0, _) => self.u,
            _ => self.u * self.v,
        }
    }

    /// Swaps the axes together with their weights.
    pub fn transposed(&self) -> Self {
        Self {
            m: self.n,
            n: self.m,
            u: self.v,
            v: self.u,
        }
    }

    /// `(k,l)` is a multiple of `(i,j)` when each coordinate is kept or
    /// zeroed; vertices are adjacent when either is a multiple of the other.
    /// In particular x-axis and y-axis vertices are never adjacent.
    pub fn adjacent(a: (usize, usize), b: (usize, usize)) -> bool {
        let below = |(i, j): (usize, usize), (k, l): (usize, usize)| (k == 0 || k == i) && (l == 0 || l == j);
        a != b && (below(a, b) || below(b, a))
    }

    pub fn graph(&self) -> SimpleGraph {
        SimpleGraph::from_fn(self.vertex_count(), |a, b| {
            Self::adjacent(self.coords(a), self.coords(b))
        })
    }

    pub fn weighted(&self) -> WeightedGraph {
        let w = (0..self.vertex_count())
            .map(|x| {
                let (i, j) = self.coords(x);
                self.weight(i, j)
            })
            .collect();
        WeightedGraph::new(self.graph(), w).expect("grid weights are positive")
    }

    pub fn expanded_size(&self) -> u64 {
        1 + self.m as u64 * self.v + self.n as u64 * self.u + (self.m * self.n) as u64 * self.u * self.v
    }

    /// `n*u >= m-1`, `m*v >= n-1` and `n*u + m*v >= m*n - 1`.
    pub fn criterion_holds(&self) -> bool {
        let (m, n) = (self.m as i128, self.n as i128);
        let (u, v) = (self.u as i128, self.v as i128);
        n * u >= m - 1 && m * v >= n - 1 && n * u + m * v >= m * n - 1
    }

    pub fn to_dot(&self) -> String {
        let labels: Vec<String> = (0..self.vertex_count())
            .map(|x| {
                let (i, j) = self.coords(x);
                format!("({i},{j}) w={}", self.weight(i, j))
            })
            .collect();
        self.graph().to_dot(
            &format!("Grid m={} n={} u={} v={}", self.m, self.n, self.u, self.v),
            Some(&labels),
        )
    }

    pub fn to_json(&self) -> String {
        #[derive(Serialize)]
        struct Doc {
            m: usize,
            n: usize,
            u: u64,
            v: u64,
            vertices: Vec<[usize; 2]>,
            weights: Vec<u64>,
            edges: Vec<[usize; 2]>,
        }
        let vertices: Vec<[usize; 2]> = (0..self.vertex_count())
            .map(|x| {
                let (i, j) = self.coords(x);
                [i, j]
            })
            .collect();
        let doc = Doc {
            m: self.m,
            n: self.n,
            u: self.u,
            v: self.v,
            weights: vertices.iter().map(|&[i, j]| self.weight(i, j)).collect(),
            vertices,
            edges: self.graph().edges().map(|(a, b)| [a, b]).collect(),
        };
        serde_json::to_string_pretty(&doc).expect("document serializes")
    }
}

impl fmt::Display for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{},{},{}", self.m, self.n, self.u, self.v)
    }
}

/// `m,n,u,v`.
impl std::str::FromStr for Grid {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(',').map(str::trim).collect();
        let bad = || Error::Precondition(format!("grid spec `{s}` must be m,n,u,v"));
        if parts.len() != 4 {
            return Err(bad());
        }
        let m = parts[0].parse().map_err(|_| bad())?;
        let n = parts[1].parse().map_err(|_| bad())?;
        let u = parts[2].parse().map_err(|_| bad())?;
        let v = parts[3].parse().map_err(|_| bad())?;
        Grid::new(m, n, u, v)
    }
}

/// The three axis cuts, each containing the corner.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CutFamily {
    /// Corner and all `(i,0)`; leaves `n` components.
    XAxis,
    /// Corner and all `(0,j)`; leaves `m` components.
    YAxis,
    /// Both axes; isolates all `m*n` interior vertices.
    Cross,
}

impl fmt::Display for CutFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CutFamily::XAxis => "x-axis",
            CutFamily::YAxis => "y-axis",
            CutFamily::Cross => "cross",
        })
    }
}

impl CutFamily {
    pub const ALL: [CutFamily; 3] = [CutFamily::YAxis, CutFamily::XAxis, CutFamily::Cross];

    pub fn vertices(self, g: &Grid) -> Vec<usize> {
        (0..g.vertex_count())
            .filter(|&x| {
                let (i, j) = g.coords(x);
                match self {
                    CutFamily::XAxis => j == 0,
                    CutFamily::YAxis => i == 0,
                    CutFamily::Cross => i == 0 || j == 0,
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ViolatedCut {
    pub family: CutFamily,
    pub witness: CutWitness,
}

/// Axis cuts that rule out a walk of the given kind, counted by flood fill.
pub fn grid_necessary(g: &Grid, kind: WalkKind) -> Vec<ViolatedCut> {
    let wg = g.weighted();
    CutFamily::ALL
        .iter()
        .filter_map(|&family| {
            let verdict = cut_check(&wg, &family.vertices(g)).expect("cut vertices are in range");
            verdict.obstructs(kind).then_some(ViolatedCut {
                family,
                witness: verdict.witness,
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum GridObstruction {
    Cut {
        family: Option<CutFamily>,
        witness: CutWitness,
    },
    /// Total weight below 3 leaves no room for a closed walk.
    TooLight { total: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GridDecision {
    Hamiltonian(WalkCertificate),
    NotHamiltonian(GridObstruction),
}

impl GridDecision {
    pub fn is_hamiltonian(&self) -> bool {
        matches!(self, GridDecision::Hamiltonian(_))
    }
}

/// Decides whether the grid has a weighted Hamiltonian cycle and returns a
/// checked certificate either way. Grids with an empty axis are stars and go
/// through the tree criterion.
pub fn decide_grid(g: &Grid) -> Result<GridDecision> {
    if g.m == 0 || g.n == 0 {
        return decide_star(g);
    }
    if let Some(cut) = grid_necessary(g, WalkKind::Cycle).into_iter().next() {
        return Ok(GridDecision::NotHamiltonian(GridObstruction::Cut {
            family: Some(cut.family),
            witness: cut.witness,
        }));
    }
    let path = build_snake_path(g)?;
    let problem = residual_weights(&path);
    let coloring = match color_game_solve(&problem) {
        ColorOutcome::Colored(c) => c,
        ColorOutcome::Blocked(b) => {
            return Err(Error::Construction(format!(
                "residual cells are not colorable although the criterion holds; blocking set {b:?}"
            )))
        }
    };
    let cycle = assemble_grid_cycle(&path, &coloring)?;
    Ok(GridDecision::Hamiltonian(cycle))
}

fn decide_star(g: &Grid) -> Result<GridDecision> {
    let wg = g.weighted();
    if wg.total_weight() < 3 {
        return Ok(GridDecision::NotHamiltonian(GridObstruction::TooLight {
            total: wg.total_weight(),
        }));
    }
    let decision = tree_w_hamiltonian(&wg)?;
    match decision.walk {
        Some(walk) => {
            let cycle = WalkCertificate::new(WalkKind::Cycle, walk.seq);
            if let Some(issue) = verify_walk(&wg, &cycle).issues.first() {
                return Err(Error::Construction(format!("star tour: {issue}")));
            }
            Ok(GridDecision::Hamiltonian(cycle))
        }
        None => {
            let verdict = cut_check(&wg, &[0])?;
            Ok(GridDecision::NotHamiltonian(GridObstruction::Cut {
                family: None,
                witness: verdict.witness,
            }))
        }
    }
}

/// A vertex of the complete bipartite graph `K_{m,n}`; indices are 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Side {
    X(usize),
    Y(usize),
}

/// An alternating walk in `K_{m,n}` (`m >= n`) whose `x_i` carry weight `v`
/// and `y_j` weight `u`. When `transposed` is set, the x side stands for the
/// grid's y-axis.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BipartitePath {
    pub m: usize,
    pub n: usize,
    pub u: u64,
    pub v: u64,
    pub seq: Vec<Side>,
    pub transposed: bool,
}

impl BipartitePath {
    pub fn occurrences(&self, s: Side) -> u64 {
        self.seq.iter().filter(|&&x| x == s).count() as u64
    }

    pub fn weight(&self, s: Side) -> u64 {
        match s {
            Side::X(_) => self.v,
            Side::Y(_) => self.u,
        }
    }

    /// Cells `(i, j)` (1-based) whose edge `x_i y_j` the walk uses.
    pub fn used_cells(&self) -> BTreeSet<(usize, usize)> {
        self.seq
            .windows(2)
            .map(|w| cell_of(w[0], w[1]))
            .collect()
    }

    pub fn is_endpoint(&self, s: Side) -> bool {
        self.seq.first() == Some(&s) || self.seq.last() == Some(&s)
    }

    /// The grid this walk lives in, in original orientation.
    pub fn grid(&self) -> Grid {
        let g = Grid {
            m: self.m,
            n: self.n,
            u: self.u,
            v: self.v,
        };
        if self.transposed {
            g.transposed()
        } else {
            g
        }
    }
}

fn cell_of(a: Side, b: Side) -> (usize, usize) {
    match (a, b) {
        (Side::X(i), Side::Y(j)) | (Side::Y(j), Side::X(i)) => (i, j),
        _ => unreachable!("bipartite walk alternates sides"),
    }
}

/// Snake walk on the normalized grid (longer axis first):
/// `x_1 y_1 x_2 y_2 ... x_n y_n` when the axes are equal, otherwise
/// `x_1 y_s(1) x_2 y_s(2) ... x_{m-1} y_s(m-1) x_m` with `s(k) = ((k-1) mod n) + 1`.
/// Each `y_j` then occurs at most `ceil((m-1)/n)` times, which the criterion
/// keeps within `u`.
pub fn build_snake_path(g: &Grid) -> Result<BipartitePath> {
    let transposed = g.m < g.n;
    let h = if transposed { g.transposed() } else { *g };
    if h.n == 0 {
        return Err(Error::Precondition("snake walk needs both axes nonempty".into()));
    }
    if !h.criterion_holds() {
        return Err(Error::Precondition(format!("grid {g} fails the cut criterion")));
    }
    let (m, n) = (h.m, h.n);
    let seq: Vec<Side> = if m == n {
        (1..=n).flat_map(|i| [Side::X(i), Side::Y(i)]).collect()
    } else {
        let mut s: Vec<Side> = (1..m).flat_map(|k| [Side::X(k), Side::Y((k - 1) % n + 1)]).collect();
        s.push(Side::X(m));
        s
    };
    let path = BipartitePath {
        m,
        n,
        u: h.u,
        v: h.v,
        seq,
        transposed,
    };
    let sides = (1..=m).map(Side::X).chain((1..=n).map(Side::Y));
    for s in sides {
        if path.occurrences(s) > path.weight(s) {
            return Err(Error::Construction(format!(
                "snake walk visits {s:?} {} times, weight {}",
                path.occurrences(s),
                path.weight(s)
            )));
        }
    }
    Ok(path)
}

/// A set of cells with a red budget per row and a blue budget per column.
/// Indices are 0-based.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ColorProblem {
    pub cells: Vec<(usize, usize)>,
    pub row_budgets: Vec<u64>,
    pub col_budgets: Vec<u64>,
}

impl ColorProblem {
    /// Sorts and deduplicates the cells; every cell must be in range.
    pub fn new(mut cells: Vec<(usize, usize)>, row_budgets: Vec<u64>, col_budgets: Vec<u64>) -> Result<Self> {
        cells.sort_unstable();
        cells.dedup();
        if let Some(&(i, j)) = cells
            .iter()
            .find(|&&(i, j)| i >= row_budgets.len() || j >= col_budgets.len())
        {
            return Err(Error::Precondition(format!("cell ({i},{j}) out of range")));
        }
        Ok(Self {
            cells,
            row_budgets,
            col_budgets,
        })
    }

    /// Total budget of the rows and columns touched by `subset`.
    pub fn capacity(&self, subset: &[(usize, usize)]) -> u64 {
        let rows: BTreeSet<usize> = subset.iter().map(|c| c.0).collect();
        let cols: BTreeSet<usize> = subset.iter().map(|c| c.1).collect();
        rows.iter().map(|&i| self.row_budgets[i]).sum::<u64>() + cols.iter().map(|&j| self.col_budgets[j]).sum::<u64>()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Color {
    Red,
    Blue,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct Coloring {
    pub assignment: BTreeMap<(usize, usize), Color>,
}

impl Coloring {
    /// Every cell colored, nothing else colored, and no budget exceeded.
    pub fn is_legal(&self, p: &ColorProblem) -> bool {
        if self.assignment.len() != p.cells.len() || !p.cells.iter().all(|c| self.assignment.contains_key(c)) {
            return false;
        }
        let mut red = vec![0u64; p.row_budgets.len()];
        let mut blue = vec![0u64; p.col_budgets.len()];
        for (&(i, j), &c) in &self.assignment {
            match c {
                Color::Red => red[i] += 1,
                Color::Blue => blue[j] += 1,
            }
        }
        red.iter().zip(&p.row_budgets).all(|(a, b)| a <= b) && blue.iter().zip(&p.col_budgets).all(|(a, b)| a <= b)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ColorOutcome {
    Colored(Coloring),
    /// Cells whose count exceeds the total budget of their rows and columns.
    Blocked(Vec<(usize, usize)>),
}

/// Rows in order of decreasing cell count (lowest index first on ties);
/// within a row, cells sorted by the remaining budget of their column.
fn greedy_row_order(p: &ColorProblem) -> Vec<(usize, Vec<(usize, usize)>)> {
    let mut rows: BTreeMap<usize, Vec<(usize, usize)>> = BTreeMap::new();
    for &c in &p.cells {
        rows.entry(c.0).or_default().push(c);
    }
    let mut order: Vec<(usize, Vec<(usize, usize)>)> = rows.into_iter().collect();
    order.sort_by_key(|(i, cells)| (std::cmp::Reverse(cells.len()), *i));
    order
}

/// The plain greedy: rows by decreasing size; in each row, red for the
/// cells whose columns have the least budget left, as many as the row budget
/// allows, and blue for the rest. Fails as soon as a blue cell finds its
/// column exhausted, which can happen even when a legal coloring exists.
pub fn greedy_color_game(p: &ColorProblem) -> Option<Coloring> {
    let mut col_left = p.col_budgets.clone();
    let mut coloring = Coloring::default();
    for (i, mut cells) in greedy_row_order(p) {
        cells.sort_by_key(|&(_, j)| (col_left[j], j));
        let reds = (p.row_budgets[i] as usize).min(cells.len());
        for (k, &(r, j)) in cells.iter().enumerate() {
            if k < reds {
                coloring.assignment.insert((r, j), Color::Red);
            } else if col_left[j] > 0 {
                col_left[j] -= 1;
                coloring.assignment.insert((r, j), Color::Blue);
            } else {
                return None;
            }
        }
    }
    Some(coloring)
}

/// The greedy above, except that a blue cell meeting an exhausted column
/// triggers an augmenting search that recolors earlier cells to free a
/// slot. When no augmenting path exists, the cells reached by the search
/// outnumber the budget of every row and column they touch, and are
/// returned as the blocking set.
pub fn color_game_solve(p: &ColorProblem) -> ColorOutcome {
    let rows = p.row_budgets.len();
    let cap: Vec<u64> = p.row_budgets.iter().chain(&p.col_budgets).copied().collect();
    let mut used = vec![0u64; cap.len()];
    // Resource of a cell: its row `i` (red) or `rows + j` (blue).
    let mut holder: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    let mut members: Vec<BTreeSet<(usize, usize)>> = vec![BTreeSet::new(); cap.len()];
    let resources = |c: (usize, usize)| [c.0, rows + c.1];

    for (i, mut cells) in greedy_row_order(p) {
        cells.sort_by_key(|&(_, j)| (cap[rows + j] - used[rows + j], j));
        for c in cells {
            let target = if used[i] < cap[i] {
                Some(i)
            } else if used[rows + c.1] < cap[rows + c.1] {
                Some(rows + c.1)
            } else {
                None
            };
            if let Some(r) = target {
                used[r] += 1;
                holder.insert(c, r);
                members[r].insert(c);
                continue;
            }
            // Breadth-first search over resources; `via[r]` is the cell that
            // would move into `r`.
            let mut via: Vec<Option<(usize, usize)>> = vec![None; cap.len()];
            let mut queue = VecDeque::new();
            let mut reached_cells = vec![c];
            for r in resources(c) {
                via[r] = Some(c);
                queue.push_back(r);
            }
            let mut free = None;
            while let Some(r) = queue.pop_front() {
                if used[r] < cap[r] {
                    free = Some(r);
                    break;
                }
                for &d in &members[r] {
                    reached_cells.push(d);
                    let other = resources(d).into_iter().find(|&x| x != r).expect("two resources");
                    if via[other].is_none() {
                        via[other] = Some(d);
                        queue.push_back(other);
                    }
                }
            }
            let Some(mut r) = free else {
                reached_cells.sort_unstable();
                reached_cells.dedup();
                return ColorOutcome::Blocked(reached_cells);
            };
            used[r] += 1;
            loop {
                let d = via[r].expect("reached resources record their entering cell");
                let previous = holder.insert(d, r);
                members[r].insert(d);
                match previous {
                    Some(old) => {
                        members[old].remove(&d);
                        r = old;
                    }
                    None => break,
                }
            }
        }
    }
    let assignment = holder
        .into_iter()
        .map(|(c, r)| (c, if r < rows { Color::Red } else { Color::Blue }))
        .collect();
    ColorOutcome::Colored(Coloring { assignment })
}

/// Max-flow feasibility: source -> cell (1) -> row or column -> sink
/// (budget). Shortest augmenting paths.
pub fn colorability_oracle(p: &ColorProblem) -> bool {
    let (rows, cols, k) = (p.row_budgets.len(), p.col_budgets.len(), p.cells.len());
    let source = 0;
    let sink = 1 + k + rows + cols;
    let n = sink + 1;
    let mut cap = vec![vec![0i64; n]; n];
    for (x, &(i, j)) in p.cells.iter().enumerate() {
        cap[source][1 + x] = 1;
        cap[1 + x][1 + k + i] = 1;
        cap[1 + x][1 + k + rows + j] = 1;
    }
    for i in 0..rows {
        cap[1 + k + i][sink] = p.row_budgets[i] as i64;
    }
    for j in 0..cols {
        cap[1 + k + rows + j][sink] = p.col_budgets[j] as i64;
    }
    let mut flow = 0;
    loop {
        let mut parent = vec![usize::MAX; n];
        parent[source] = source;
        let mut queue = VecDeque::from([source]);
        while let Some(x) = queue.pop_front() {
            for y in 0..n {
                if parent[y] == usize::MAX && cap[x][y] > 0 {
                    parent[y] = x;
                    queue.push_back(y);
                }
            }
        }
        if parent[sink] == usize::MAX {
            break;
        }
        let mut y = sink;
        while y != source {
            let x = parent[y];
            cap[x][y] -= 1;
            cap[y][x] += 1;
            y = x;
        }
        flow += 1;
    }
    flow == k
}

/// Exhaustive search for a subset `B` of cells with `|B|` above the budget
/// of the rows and columns it touches. Limited to 20 cells.
pub fn hall_violation(p: &ColorProblem) -> Result<Option<Vec<(usize, usize)>>> {
    let k = p.cells.len();
    if k > 20 {
        return Err(Error::Precondition(format!("{k} cells exceed the exhaustive limit of 20")));
    }
    for mask in 1u32..(1 << k) {
        let subset: Vec<(usize, usize)> = (0..k).filter(|&x| mask >> x & 1 == 1).map(|x| p.cells[x]).collect();
        if p.capacity(&subset) < subset.len() as u64 {
            return Ok(Some(subset));
        }
    }
    Ok(None)
}

/// Budgets left for detours once the walk is fixed, and the cells of unused
/// edges. A vertex occurring `d` times has `w - d` spare visits; an endpoint
/// of the walk gets one more, because the cell placed between it and the
/// corner costs no extra visit.
pub fn residual_weights(path: &BipartitePath) -> ColorProblem {
    let used = path.used_cells();
    let cells = (1..=path.m)
        .flat_map(|i| (1..=path.n).map(move |j| (i, j)))
        .filter(|c| !used.contains(c))
        .map(|(i, j)| (i - 1, j - 1))
        .collect();
    let budget = |s: Side| path.weight(s) - path.occurrences(s) + u64::from(path.is_endpoint(s));
    let rows = (1..=path.m).map(|i| budget(Side::X(i))).collect();
    let cols = (1..=path.n).map(|j| budget(Side::Y(j))).collect();
    ColorProblem::new(cells, rows, cols).expect("cells are in range")
}

/// Turns the walk and a legal coloring of its residual cells into a grid
/// cycle from the corner. Each walk vertex, on its first visit, detours
/// through its cells (red cells through the row's x vertex, blue cells
/// through the column's y vertex); every walk step `x_i y_j` passes through
/// the cell `(i,j)`, since the axes are not adjacent to each other; each walk
/// endpoint spends one of its cells between itself and the corner.
///
/// Residual cells are visited once. A walk edge's cell is visited once per
/// use of the edge, which is twice only for middle rows when `n = 1`, where
/// the criterion forces `u >= 2`.
pub fn assemble_grid_cycle(path: &BipartitePath, coloring: &Coloring) -> Result<WalkCertificate> {
    let problem = residual_weights(path);
    if !coloring.is_legal(&problem) {
        return Err(Error::Precondition(
            "coloring does not fit the residual budgets of the walk".into(),
        ));
    }
    let mut red: BTreeMap<usize, VecDeque<usize>> = BTreeMap::new();
    let mut blue: BTreeMap<usize, VecDeque<usize>> = BTreeMap::new();
    for (&(i, j), &c) in &coloring.assignment {
        match c {
            Color::Red => red.entry(i + 1).or_default().push_back(j + 1),
            Color::Blue => blue.entry(j + 1).or_default().push_back(i + 1),
        }
    }
    let point = |s: Side| match s {
        Side::X(i) => (i, 0),
        Side::Y(j) => (0, j),
    };
    let mut take = |s: Side| match s {
        Side::X(i) => red.get_mut(&i).and_then(VecDeque::pop_front).map(|j| (i, j)),
        Side::Y(j) => blue.get_mut(&j).and_then(VecDeque::pop_front).map(|i| (i, j)),
    };
    let first = path.seq[0];
    let last = *path.seq.last().expect("walk is nonempty");
    let start_slot = take(first);
    let end_slot = take(last);

    let mut cyc: Vec<(usize, usize)> = vec![(0, 0)];
    cyc.extend(start_slot);
    let mut seen: BTreeSet<Side> = BTreeSet::new();
    for (k, &s) in path.seq.iter().enumerate() {
        let p = point(s);
        cyc.push(p);
        if seen.insert(s) {
            let detours: Vec<(usize, usize)> = match s {
                Side::X(i) => red.get(&i).map(|js| js.iter().map(|&j| (i, j)).collect()),
                Side::Y(j) => blue.get(&j).map(|is| is.iter().map(|&i| (i, j)).collect()),
            }
            .unwrap_or_default();
            for cell in detours {
                cyc.push(cell);
                cyc.push(p);
            }
        }
        if let Some(&t) = path.seq.get(k + 1) {
            cyc.push(cell_of(s, t));
        }
    }
    cyc.extend(end_slot);

    let grid = path.grid();
    let seq: Vec<usize> = cyc
        .into_iter()
        .map(|(i, j)| if path.transposed { grid.index(j, i) } else { grid.index(i, j) })
        .collect();
    let cert = WalkCertificate::new(WalkKind::Cycle, seq);
    let wg = grid.weighted();
    if let Some(issue) = verify_walk(&wg, &cert).issues.first() {
        return Err(Error::Construction(format!("assembled grid cycle: {issue}")));
    }
    Ok(cert)
}

/// One union of coordinate hyperplanes through the origin in a
/// multi-axis grid.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MultiAxisCut {
    /// 0-based coordinates whose zero-hyperplanes form the cut.
    pub axes: Vec<usize>,
    pub weight: u64,
    /// Product of the sizes of the chosen axes.
    pub components: u64,
    /// Component count by flood fill, when the grid is small enough.
    pub counted_components: Option<u64>,
    pub violated: bool,
}

const MULTI_AXIS_FLOOD_LIMIT: usize = 20_000;

/// Multi-axis grid on tuples `0 <= x_k <= m_k`, where `x` and `y` are
/// adjacent when one arises from the other by zeroing coordinates, and a
/// vertex with
/// nonzero coordinates `K` weighs the product of `weights[k]` over `k` in
/// `K`. For every nonempty set `I` of coordinates, the cut where some
/// coordinate in `I` vanishes is weighed by direct summation and compared
/// with the number of components it leaves.
pub fn multi_axis_cuts(dims: &[usize], weights: &[u64]) -> Result<Vec<MultiAxisCut>> {
    let r = dims.len();
    if r == 0 || weights.len() != r {
        return Err(Error::Precondition("need one weight per axis and at least one axis".into()));
    }
    if r > 16 {
        return Err(Error::Precondition("at most 16 axes".into()));
    }
    let total: usize = dims.iter().map(|&m| m + 1).product();
    let decode = |mut x: usize| -> Vec<usize> {
        let mut t = vec![0; r];
        for k in (0..r).rev() {
            t[k] = x % (dims[k] + 1);
            x /= dims[k] + 1;
        }
        t
    };
    let vertex_weight = |t: &[usize]| -> u64 {
        t.iter().zip(weights).filter(|(&c, _)| c != 0).map(|(_, &w)| w).product()
    };
    let graph = (total <= MULTI_AXIS_FLOOD_LIMIT).then(|| {
        let tuples: Vec<Vec<usize>> = (0..total).map(decode).collect();
        let below = |a: &[usize], b: &[usize]| a.iter().zip(b).all(|(&x, &y)| y == 0 || y == x);
        SimpleGraph::from_fn(total, |a, b| below(&tuples[a], &tuples[b]) || below(&tuples[b], &tuples[a]))
    });
    let mut out = Vec::new();
    for mask in 1usize..(1 << r) {
        let axes: Vec<usize> = (0..r).filter(|&k| mask >> k & 1 == 1).collect();
        let in_cut = |t: &[usize]| axes.iter().any(|&k| t[k] == 0);
        let mut weight = 0u64;
        let mut removed = vec![false; total];
        for (x, flag) in removed.iter_mut().enumerate() {
            let t = decode(x);
            if in_cut(&t) {
                weight += vertex_weight(&t);
                *flag = true;
            }
        }
        let components: u64 = axes.iter().map(|&k| dims[k] as u64).product();
        let counted_components = graph
            .as_ref()
            .map(|g| g.components_without(&removed).len() as u64);
        out.push(MultiAxisCut {
            axes,
            weight,
            components,
            counted_components,
            violated: components >= 2 && weight < components,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(m: usize, n: usize, u: u64, v: u64) -> Grid {
        Grid::new(m, n, u, v).unwrap()
    }

    #[test]
    fn necessary_conditions() {
        let cuts = grid_necessary(&grid(7, 1, 2, 1), WalkKind::Cycle);
        assert_eq!(cuts.len(), 1);
        assert_eq!(cuts[0].family, CutFamily::YAxis);
        assert_eq!(cuts[0].witness.components, 7);
        assert_eq!(cuts[0].witness.total_weight, 3);
        assert!(grid_necessary(&grid(1, 1, 1, 1), WalkKind::Cycle).is_empty());
        assert!(grid_necessary(&grid(3, 1, 2, 1), WalkKind::Cycle).is_empty());
    }

    #[test]
    fn decisions() {
        let yes = decide_grid(&grid(3, 1, 2, 1)).unwrap();
        assert!(yes.is_hamiltonian());
        assert!(!decide_grid(&grid(7, 1, 2, 1)).unwrap().is_hamiltonian());
        let g = grid(1, 1, 1, 1);
        match decide_grid(&g).unwrap() {
            GridDecision::Hamiltonian(c) => {
                let pts: Vec<_> = c.seq.iter().map(|&x| g.coords(x)).collect();
                assert_eq!(pts, vec![(0, 0), (1, 0), (1, 1), (0, 1)]);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn degenerate_grids() {
        assert!(!decide_grid(&grid(0, 0, 1, 1)).unwrap().is_hamiltonian());
        assert!(!decide_grid(&grid(1, 0, 1, 1)).unwrap().is_hamiltonian());
        assert!(decide_grid(&grid(1, 0, 1, 2)).unwrap().is_hamiltonian());
        assert!(!decide_grid(&grid(2, 0, 1, 3)).unwrap().is_hamiltonian());
        assert!(decide_grid(&grid(0, 1, 2, 1)).unwrap().is_hamiltonian());
    }

    #[test]
    fn snake_walks() {
        let p = build_snake_path(&grid(5, 2, 2, 1)).unwrap();
        use Side::{X, Y};
        assert_eq!(p.seq, vec![X(1), Y(1), X(2), Y(2), X(3), Y(1), X(4), Y(2), X(5)]);
        assert_eq!(p.occurrences(Y(1)), 2);
        let q = build_snake_path(&grid(3, 1, 2, 1)).unwrap();
        assert_eq!(q.seq, vec![X(1), Y(1), X(2), Y(1), X(3)]);
        let sq = build_snake_path(&grid(3, 3, 2, 2)).unwrap();
        assert!(sq.seq.iter().all(|&s| sq.occurrences(s) == 1));
        assert!(build_snake_path(&grid(7, 1, 2, 1)).is_err());
    }

    #[test]
    fn residuals() {
        let p = build_snake_path(&grid(2, 2, 3, 3)).unwrap();
        let r = residual_weights(&p);
        assert_eq!(r.cells, vec![(0, 1)]);
        assert_eq!(r.row_budgets, vec![3, 2]);
        assert_eq!(r.col_budgets, vec![2, 3]);
        let p = build_snake_path(&grid(2, 1, 2, 1)).unwrap();
        assert!(residual_weights(&p).cells.is_empty());
        let p = build_snake_path(&grid(5, 2, 2, 1)).unwrap();
        assert_eq!(residual_weights(&p).cells.len(), 2);
    }

    #[test]
    fn color_game_examples() {
        let full = ColorProblem::new(vec![(0, 0), (0, 1), (1, 0), (1, 1)], vec![1, 1], vec![1, 1]).unwrap();
        match color_game_solve(&full) {
            ColorOutcome::Colored(c) => assert!(c.is_legal(&full)),
            other => panic!("unexpected {other:?}"),
        }
        let blocked = ColorProblem::new(vec![(0, 0), (0, 1)], vec![1], vec![0, 0]).unwrap();
        match color_game_solve(&blocked) {
            ColorOutcome::Blocked(b) => assert!(blocked.capacity(&b) < b.len() as u64),
            other => panic!("unexpected {other:?}"),
        }
        assert!(!colorability_oracle(&blocked));
        let empty = ColorProblem::new(vec![], vec![], vec![]).unwrap();
        assert_eq!(color_game_solve(&empty), ColorOutcome::Colored(Coloring::default()));
    }

    #[test]
    fn oracle_single_cells() {
        assert!(!colorability_oracle(&ColorProblem::new(vec![(0, 0)], vec![0], vec![0]).unwrap()));
        assert!(colorability_oracle(&ColorProblem::new(vec![(0, 0)], vec![1], vec![0]).unwrap()));
    }

    #[test]
    fn plain_greedy_misses_a_colorable_instance() {
        let p = ColorProblem::new(vec![(0, 0), (0, 1), (1, 1)], vec![1, 0, 1], vec![1, 1, 1]).unwrap();
        assert!(greedy_color_game(&p).is_none());
        assert!(colorability_oracle(&p));
        assert!(matches!(color_game_solve(&p), ColorOutcome::Colored(c) if c.is_legal(&p)));
    }

    #[test]
    fn assembly_rejects_illegal_coloring() {
        let p = build_snake_path(&grid(2, 2, 1, 1)).unwrap();
        let mut c = Coloring::default();
        c.assignment.insert((1, 1), Color::Red);
        assert!(matches!(assemble_grid_cycle(&p, &c), Err(Error::Precondition(_))));
    }

    #[test]
    fn multi_axis_reduces_to_axis_cuts() {
        let cuts = multi_axis_cuts(&[7, 1], &[1, 2]).unwrap();
        let y_axis = &cuts[0];
        assert_eq!((y_axis.axes.clone(), y_axis.weight, y_axis.components), (vec![0], 3, 7));
        assert_eq!(y_axis.counted_components, Some(7));
        assert!(y_axis.violated);
        let star = multi_axis_cuts(&[4], &[2]).unwrap();
        assert_eq!(star.len(), 1);
        assert_eq!((star[0].weight, star[0].components), (1, 4));
    }

    #[test]
    fn grid_spec_parsing() {
        assert_eq!("3,1,2,1".parse::<Grid>().unwrap(), grid(3, 1, 2, 1));
        assert!("3,1,2".parse::<Grid>().is_err());
        assert!("3,1,0,1".parse::<Grid>().is_err());
    }
}
