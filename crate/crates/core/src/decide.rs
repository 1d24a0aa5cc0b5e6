//! End-to-end decisions for groups `(Z_p)^a x (Z_q)^b`, certificate checking
//! and structure export.

use std::fmt;

use serde::Serialize;

use crate::cert::Certificate;
use crate::cluster::{build_n_tree, condense, WeightedClusterGraph};
use crate::error::{Error, Result};
use crate::grid::{decide_grid, Grid, GridDecision, GridObstruction};
use crate::group::FiniteAbelianGroup;
use crate::power_graph::{build_power_graph, DirectedPowerGraph};
use crate::weighted::{cut_check, verify_walk, WalkCertificate, WalkKind, WeightedGraph};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Hamiltonian,
    NotHamiltonian,
    Unsupported,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Hamiltonian => "hamiltonian",
            Verdict::NotHamiltonian => "not-hamiltonian",
            Verdict::Unsupported => "unsupported",
        })
    }
}

/// `(Z_p)^a x (Z_q)^b`, with `p` the prime of the first factor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct TwoPrimeShape {
    pub p: u64,
    pub a: u32,
    pub q: u64,
    pub b: u32,
}

impl TwoPrimeShape {
    pub fn of(group: &FiniteAbelianGroup) -> Result<Self> {
        let primes = group.primes();
        if primes.len() != 2 {
            return Err(Error::Domain(format!(
                "{group} involves {} primes; exactly two are required",
                primes.len()
            )));
        }
        if let Some(f) = group.factors().iter().find(|f| f.exponent != 1) {
            return Err(Error::Domain(format!(
                "factor Z{} is not of prime order; both prime blocks must be elementary",
                f.order()
            )));
        }
        let p = group.factors()[0].prime;
        let q = if primes[0] == p { primes[1] } else { primes[0] };
        let count = |r: u64| group.factors().iter().filter(|f| f.prime == r).count() as u32;
        Ok(Self {
            p,
            a: count(p),
            q,
            b: count(q),
        })
    }

    /// Cluster grid: lines of the p-block on the x-axis (weight `p-1`),
    /// lines of the q-block on the y-axis (weight `q-1`).
    pub fn grid(&self) -> Grid {
        let lines = |r: u64, k: u32| ((r.pow(k) - 1) / (r - 1)) as usize;
        Grid::new(lines(self.p, self.a), lines(self.q, self.b), self.q - 1, self.p - 1)
            .expect("prime weights are positive")
    }

    /// The two-prime criterion read with the block ranks in place of the
    /// line counts. Reported for comparison only.
    pub fn rank_reading(&self) -> bool {
        let (n, m) = (self.a as i128, self.b as i128);
        let (p, q) = (self.p as i128, self.q as i128);
        m * (q - 1) >= n - 1 && n * (p - 1) >= m - 1 && m * (q - 1) + n * (p - 1) >= m * n - 1
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct GroupVerdict {
    pub group: String,
    pub verdict: Verdict,
    pub certificate: Option<Certificate>,
    pub method_trace: Vec<String>,
    pub grid: Option<Grid>,
    /// Outcome of [`TwoPrimeShape::rank_reading`], when applicable.
    pub rank_reading: Option<bool>,
}

impl GroupVerdict {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("verdict serializes")
    }
}

/// Grid position of every element: `(i, j)` where `i` numbers the line
/// through the p-part (0 for a zero p-part) and `j` the line through the
/// q-part, both in order of first appearance.
fn grid_positions(group: &FiniteAbelianGroup, shape: &TwoPrimeShape) -> Vec<(usize, usize)> {
    let n = group.order() as usize;
    let in_block = |r: u64| -> Vec<bool> { group.factors().iter().map(|f| f.prime == r).collect() };
    let (p_mask, q_mask) = (in_block(shape.p), in_block(shape.q));
    let project = |x: usize, mask: &[bool]| -> usize {
        let e = group.element_at(x);
        let coords = e.coords().iter().zip(mask).map(|(&c, &keep)| if keep { c } else { 0 }).collect();
        group.index_of(&group.element(coords).expect("projection stays in range"))
    };
    let label_lines = |mask: &[bool], prime: u64| -> Vec<usize> {
        let mut label = vec![usize::MAX; n];
        label[0] = 0;
        let mut next = 1;
        for x in 0..n {
            if project(x, mask) != x || label[x] != usize::MAX {
                continue;
            }
            let e = group.element_at(x);
            for k in 1..prime {
                label[group.index_of(&group.power(&e, k))] = next;
            }
            next += 1;
        }
        label
    };
    let p_line = label_lines(&p_mask, shape.p);
    let q_line = label_lines(&q_mask, shape.q);
    (0..n)
        .map(|x| (p_line[project(x, &p_mask)], q_line[project(x, &q_mask)]))
        .collect()
}

/// Checks that the clusters are exactly the grid cells, with matching
/// weights and adjacency. Returns, for each grid vertex, its cluster.
fn match_clusters_to_grid(
    clusters: &WeightedClusterGraph,
    grid: &Grid,
    positions: &[(usize, usize)],
) -> Result<Vec<usize>> {
    let mut cell_cluster = vec![usize::MAX; grid.vertex_count()];
    for (c, cl) in clusters.clusters().iter().enumerate() {
        let (i, j) = positions[cl.members[0]];
        if cl.members.iter().any(|&x| positions[x] != (i, j)) {
            return Err(Error::Construction(format!("cluster {c} spans several grid cells")));
        }
        if cl.weight != grid.weight(i, j) {
            return Err(Error::Construction(format!(
                "cluster at ({i},{j}) has {} members, grid weight is {}",
                cl.weight,
                grid.weight(i, j)
            )));
        }
        cell_cluster[grid.index(i, j)] = c;
    }
    if cell_cluster.contains(&usize::MAX) {
        return Err(Error::Construction("some grid cell has no cluster".into()));
    }
    let cg = clusters.undirected();
    let gg = grid.graph();
    for a in 0..grid.vertex_count() {
        for b in a + 1..grid.vertex_count() {
            if gg.has_edge(a, b) != cg.has_edge(cell_cluster[a], cell_cluster[b]) {
                return Err(Error::Construction(format!(
                    "grid and cluster adjacency differ at {:?} - {:?}",
                    grid.coords(a),
                    grid.coords(b)
                )));
            }
        }
    }
    Ok(cell_cluster)
}

/// Decides Hamiltonicity of the power graph for `(Z_p)^a x (Z_q)^b`. Other
/// groups get [`Verdict::Unsupported`]. Every emitted certificate has been
/// checked against the power graph.
pub fn decide_group(group: &FiniteAbelianGroup) -> Result<GroupVerdict> {
    let mut trace = Vec::new();
    let shape = match TwoPrimeShape::of(group) {
        Ok(s) => s,
        Err(Error::Domain(why)) => {
            trace.push(format!("outside the supported family (Z_p)^a x (Z_q)^b: {why}"));
            trace.push("structure commands (export) still apply".into());
            return Ok(GroupVerdict {
                group: group.to_string(),
                verdict: Verdict::Unsupported,
                certificate: None,
                method_trace: trace,
                grid: None,
                rank_reading: None,
            });
        }
        Err(e) => return Err(e),
    };
    trace.push(format!(
        "shape (Z_{})^{} x (Z_{})^{}",
        shape.p, shape.a, shape.q, shape.b
    ));
    let pg = build_power_graph(group)?;
    let ug = pg.undirected_view();
    trace.push(format!(
        "power graph: {} vertices, {} undirected edges",
        ug.vertex_count(),
        ug.edge_count()
    ));
    let clusters = condense(&pg);
    let grid = shape.grid();
    let positions = grid_positions(group, &shape);
    let cell_cluster = match_clusters_to_grid(&clusters, &grid, &positions)?;
    trace.push(format!(
        "{} clusters form the weighted grid m={} n={} u={} v={}",
        clusters.len(),
        grid.m,
        grid.n,
        grid.u,
        grid.v
    ));
    let rank = shape.rank_reading();

    let (verdict, certificate) = match decide_grid(&grid)? {
        GridDecision::Hamiltonian(walk) => {
            trace.push(format!(
                "cut criterion holds; weighted grid cycle of length {} built from snake walk and color game",
                walk.seq.len()
            ));
            let cycle = lift_grid_cycle(&walk, &grid, &clusters, &cell_cluster)?;
            let report = verify_walk(&WeightedGraph::unit(ug.clone()), &cycle);
            if let Some(issue) = report.issues.first() {
                return Err(Error::Construction(format!("lifted cycle: {issue}")));
            }
            trace.push(format!("lifted to a Hamiltonian cycle on {} elements; verified", cycle.seq.len()));
            let vertices = cycle.seq.iter().map(|&x| pg.element(x).coords().to_vec()).collect();
            (Verdict::Hamiltonian, Certificate::walk(WalkKind::Cycle, vertices))
        }
        GridDecision::NotHamiltonian(obstruction) => {
            let grid_cut = match obstruction {
                GridObstruction::Cut { family, witness } => {
                    trace.push(format!(
                        "{} cut of weight {} leaves {} components",
                        family.map_or("corner".to_string(), |f| f.to_string()),
                        witness.total_weight,
                        witness.components
                    ));
                    witness.cut
                }
                GridObstruction::TooLight { total } => {
                    return Err(Error::Construction(format!(
                        "grid of total weight {total} cannot come from a two-prime group"
                    )))
                }
            };
            let mut cut: Vec<usize> = grid_cut
                .iter()
                .flat_map(|&x| clusters.cluster(cell_cluster[x]).members.iter().copied())
                .collect();
            cut.sort_unstable();
            let verdict = cut_check(&WeightedGraph::unit(ug.clone()), &cut)?;
            if !verdict.obstructs_cycle {
                return Err(Error::Construction("lifted cut does not obstruct".into()));
            }
            trace.push(format!(
                "element cut of size {} leaves {} components; verified",
                cut.len(),
                verdict.witness.components
            ));
            let cert = Certificate::Cut {
                cut: cut.iter().map(|&x| pg.element(x).coords().to_vec()).collect(),
                components: verdict.witness.components,
            };
            (Verdict::NotHamiltonian, cert)
        }
    };
    let verdict_bool = verdict == Verdict::Hamiltonian;
    trace.push(format!(
        "rank reading of the criterion says {}{}",
        if rank { "hamiltonian" } else { "not-hamiltonian" },
        if rank == verdict_bool { "" } else { " (disagrees; not used)" }
    ));
    Ok(GroupVerdict {
        group: group.to_string(),
        verdict,
        certificate: Some(certificate),
        method_trace: trace,
        grid: Some(grid),
        rank_reading: Some(rank),
    })
}

/// Replaces each grid visit by distinct members of the cell's cluster. A
/// cell visited `k` times with `w` members spends `w - k + 1` members
/// (ascending) on its first visit and one on each later visit.
fn lift_grid_cycle(
    walk: &WalkCertificate,
    grid: &Grid,
    clusters: &WeightedClusterGraph,
    cell_cluster: &[usize],
) -> Result<WalkCertificate> {
    let visits = walk.multiplicity(grid.vertex_count());
    let mut next_member = vec![0usize; grid.vertex_count()];
    let mut seq = Vec::new();
    for &x in &walk.seq {
        let members = &clusters.cluster(cell_cluster[x]).members;
        let k = visits[x] as usize;
        let take = if next_member[x] == 0 { members.len() + 1 - k } else { 1 };
        let start = next_member[x];
        seq.extend_from_slice(&members[start..start + take]);
        next_member[x] += take;
    }
    Ok(WalkCertificate::new(WalkKind::Cycle, seq))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VerifyReport {
    pub valid: bool,
    pub diagnostics: Vec<String>,
}

/// Checks a certificate document against the power graph of `group`. Walks
/// must visit every element exactly once along power-graph edges; cuts must
/// leave the stated number of components, more than the cut size.
pub fn verify_certificate(group: &FiniteAbelianGroup, cert_json: &str) -> Result<VerifyReport> {
    let cert = Certificate::from_json(cert_json)?;
    let pg = build_power_graph(group)?;
    Ok(check_certificate(&pg, &cert))
}

pub fn check_certificate(pg: &DirectedPowerGraph, cert: &Certificate) -> VerifyReport {
    let group = pg.group();
    let ug = WeightedGraph::unit(pg.undirected_view());
    let mut diagnostics = Vec::new();
    let resolve = |coords: &[Vec<u64>], diagnostics: &mut Vec<String>| -> Option<Vec<usize>> {
        let mut out = Vec::with_capacity(coords.len());
        for (i, c) in coords.iter().enumerate() {
            match group.element(c.clone()) {
                Ok(e) => out.push(group.index_of(&e)),
                Err(e) => {
                    diagnostics.push(format!("vertex {i}: {e}"));
                    return None;
                }
            }
        }
        Some(out)
    };
    let describe = |x: usize| pg.element(x).to_string();
    match cert {
        Certificate::Cycle { vertices } | Certificate::Path { vertices } => {
            let kind = if matches!(cert, Certificate::Cycle { .. }) {
                WalkKind::Cycle
            } else {
                WalkKind::Path
            };
            let Some(seq) = resolve(vertices, &mut diagnostics) else {
                return VerifyReport { valid: false, diagnostics };
            };
            let report = verify_walk(&ug, &WalkCertificate::new(kind, seq));
            for issue in &report.issues {
                diagnostics.push(match issue {
                    crate::weighted::WalkIssue::NotAdjacent { position, from, to } => format!(
                        "step {position}: {} and {} are not adjacent",
                        describe(*from),
                        describe(*to)
                    ),
                    crate::weighted::WalkIssue::Uncovered { vertex } => {
                        format!("element {} is never visited", describe(*vertex))
                    }
                    crate::weighted::WalkIssue::OverWeight { vertex, count, .. } => {
                        format!("element {} visited {count} times", describe(*vertex))
                    }
                    other => other.to_string(),
                });
            }
            if report.is_valid() {
                diagnostics.push(format!("valid Hamiltonian {kind} on {} elements", vertices.len()));
            }
            VerifyReport {
                valid: report.is_valid(),
                diagnostics,
            }
        }
        Certificate::Cut { cut, components } => {
            let Some(mut idx) = resolve(cut, &mut diagnostics) else {
                return VerifyReport { valid: false, diagnostics };
            };
            idx.sort_unstable();
            if idx.windows(2).any(|w| w[0] == w[1]) {
                diagnostics.push("cut lists an element twice".into());
                return VerifyReport { valid: false, diagnostics };
            }
            let verdict = cut_check(&ug, &idx).expect("resolved elements are in range");
            let found = verdict.witness.components;
            let mut valid = true;
            if found != *components {
                diagnostics.push(format!("cut leaves {found} components, certificate says {components}"));
                valid = false;
            }
            if !verdict.obstructs_cycle {
                diagnostics.push(format!(
                    "cut of size {} leaves {found} components, which does not rule out a Hamiltonian cycle",
                    idx.len()
                ));
                valid = false;
            }
            if valid {
                diagnostics.push(format!("cut of size {} leaves {found} components", idx.len()));
            }
            VerifyReport { valid, diagnostics }
        }
    }
}

/// Checks a weighted cycle or cut certificate against a grid; vertices are
/// `[i, j]` pairs.
pub fn verify_grid_certificate(grid: &Grid, cert_json: &str) -> Result<VerifyReport> {
    let cert = Certificate::from_json(cert_json)?;
    let wg = grid.weighted();
    let resolve = |coords: &[Vec<u64>]| -> std::result::Result<Vec<usize>, String> {
        coords
            .iter()
            .enumerate()
            .map(|(k, c)| match c.as_slice() {
                &[i, j] if (i as usize) <= grid.m && (j as usize) <= grid.n => {
                    Ok(grid.index(i as usize, j as usize))
                }
                _ => Err(format!("vertex {k}: {c:?} is not a grid point")),
            })
            .collect()
    };
    let (seq, kind, stated) = match &cert {
        Certificate::Cycle { vertices } => (resolve(vertices), WalkKind::Cycle, None),
        Certificate::Path { vertices } => (resolve(vertices), WalkKind::Path, None),
        Certificate::Cut { cut, components } => (resolve(cut), WalkKind::Cycle, Some(*components)),
    };
    let seq = match seq {
        Ok(s) => s,
        Err(d) => {
            return Ok(VerifyReport {
                valid: false,
                diagnostics: vec![d],
            })
        }
    };
    Ok(match stated {
        None => {
            let report = verify_walk(&wg, &WalkCertificate::new(kind, seq));
            VerifyReport {
                valid: report.is_valid(),
                diagnostics: report.issues.iter().map(ToString::to_string).collect(),
            }
        }
        Some(components) => {
            let v = cut_check(&wg, &seq)?;
            let valid = v.witness.components == components && v.obstructs_cycle;
            VerifyReport {
                valid,
                diagnostics: vec![format!(
                    "cut of weight {} leaves {} components",
                    v.witness.total_weight, v.witness.components
                )],
            }
        }
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExportKind {
    Power,
    Cluster,
    NTree,
    Grid,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExportFormat {
    Dot,
    Json,
}

/// Deterministic DOT or JSON rendering of a structure attached to `group`.
/// `directed` only affects the power graph.
pub fn export(group: &FiniteAbelianGroup, what: ExportKind, format: ExportFormat, directed: bool) -> Result<String> {
    Ok(match what {
        ExportKind::Power => {
            let pg = build_power_graph(group)?;
            match (format, directed) {
                (ExportFormat::Dot, true) => pg.to_dot(),
                (ExportFormat::Dot, false) => pg.undirected_dot(),
                (ExportFormat::Json, d) => pg.to_json(d),
            }
        }
        ExportKind::Cluster => {
            let c = condense(&build_power_graph(group)?);
            match format {
                ExportFormat::Dot => c.to_dot(),
                ExportFormat::Json => c.to_json(),
            }
        }
        ExportKind::NTree => {
            let t = build_n_tree(group)?;
            match format {
                ExportFormat::Dot => t.to_dot(),
                ExportFormat::Json => t.to_json(),
            }
        }
        ExportKind::Grid => {
            let g = TwoPrimeShape::of(group)?.grid();
            match format {
                ExportFormat::Dot => g.to_dot(),
                ExportFormat::Json => g.to_json(),
            }
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grp(s: &str) -> FiniteAbelianGroup {
        s.parse().unwrap()
    }

    #[test]
    fn shapes() {
        let s = TwoPrimeShape::of(&grp("Z2^2xZ3")).unwrap();
        assert_eq!((s.p, s.a, s.q, s.b), (2, 2, 3, 1));
        assert_eq!(s.grid(), Grid::new(3, 1, 2, 1).unwrap());
        assert!(TwoPrimeShape::of(&grp("Z4xZ3")).is_err());
        assert!(TwoPrimeShape::of(&grp("Z2xZ3xZ5")).is_err());
        let big = TwoPrimeShape::of(&grp("Z2^3xZ3")).unwrap();
        assert!(big.rank_reading());
        assert!(!big.grid().criterion_holds());
    }

    #[test]
    fn verdicts() {
        for (spec, expected) in [
            ("Z2xZ3", Verdict::Hamiltonian),
            ("Z2^2xZ3", Verdict::Hamiltonian),
            ("Z2^3xZ3", Verdict::NotHamiltonian),
            ("Z3xZ2^2", Verdict::Hamiltonian),
            ("Z9xZ3", Verdict::Unsupported),
        ] {
            let v = decide_group(&grp(spec)).unwrap();
            assert_eq!(v.verdict, expected, "{spec}");
            if let Some(c) = &v.certificate {
                let report = verify_certificate(&grp(spec), &c.to_json()).unwrap();
                assert!(report.valid, "{spec}: {:?}", report.diagnostics);
            }
        }
    }

    #[test]
    fn z2_cubed_times_z3_cut() {
        let g = grp("Z2^3xZ3");
        let v = decide_group(&g).unwrap();
        match v.certificate.unwrap() {
            Certificate::Cut { cut, components } => {
                assert_eq!(cut, vec![vec![0, 0, 0, 0], vec![0, 0, 0, 1], vec![0, 0, 0, 2]]);
                assert_eq!(components, 7);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn swapped_cycle_is_rejected() {
        let g = grp("Z2^2xZ3");
        let Some(Certificate::Cycle { vertices }) = decide_group(&g).unwrap().certificate else {
            panic!("expected a cycle");
        };
        // Some swaps stay valid inside a clique; at least one must not.
        let broken = (1..vertices.len()).find_map(|k| {
            let mut v = vertices.clone();
            v.swap(0, k);
            let r = verify_certificate(&g, &Certificate::Cycle { vertices: v }.to_json()).unwrap();
            (!r.valid).then_some(r)
        });
        let r = broken.expect("some swap breaks adjacency");
        assert!(r.diagnostics[0].contains("not adjacent"), "{:?}", r.diagnostics);
    }

    #[test]
    fn exports() {
        assert!(export(&grp("Z1"), ExportKind::Cluster, ExportFormat::Dot, false)
            .unwrap()
            .contains("0 [label=\"1\""));
        assert!(matches!(
            export(&grp("Z2xZ3"), ExportKind::NTree, ExportFormat::Json, false),
            Err(Error::Domain(_))
        ));
        assert_eq!(
            export(&grp("Z9xZ3"), ExportKind::Power, ExportFormat::Json, true).unwrap(),
            export(&grp("Z9xZ3"), ExportKind::Power, ExportFormat::Json, true).unwrap()
        );
    }
}
