//! Randomized and exhaustive cross-checks against brute-force references.

use proptest::prelude::*;

use crate::cluster::{clusters_by_orbits, condense, quotient_graph};
use crate::graph::SimpleGraph;
use crate::grid::{
    assemble_grid_cycle, build_snake_path, color_game_solve, colorability_oracle, residual_weights, ColorOutcome,
};
use crate::oracle::{find_hamiltonian, find_w_hamiltonian, SearchConfig, SearchOutcome};
use crate::power_graph::build_power_graph;
use crate::weighted::{verify_walk, weighted_search};
use crate::{
    crt_intersect, decide_grid, Certificate, FiniteAbelianGroup, Grid, ResidueClass, WalkKind, WeightedGraph,
};

const PRIMES: [u64; 4] = [2, 3, 5, 7];

/// Abelian groups of order at most `max`.
fn small_group(max: u64) -> impl Strategy<Value = FiniteAbelianGroup> {
    prop::collection::vec((0usize..4, 1u32..4), 0..4).prop_filter_map("order too large", move |fs| {
        let factors: Vec<(u64, u32)> = fs.into_iter().map(|(i, e)| (PRIMES[i], e)).collect();
        let g = FiniteAbelianGroup::new(factors).ok()?;
        (g.order() <= max).then_some(g)
    })
}

fn p_group(max: u64) -> impl Strategy<Value = FiniteAbelianGroup> {
    (0usize..3, prop::collection::vec(1u32..4, 1..4)).prop_filter_map("order too large", move |(i, es)| {
        let g = FiniteAbelianGroup::new(es.into_iter().map(|e| (PRIMES[i], e))).ok()?;
        (g.order() <= max).then_some(g)
    })
}

fn graph(max_n: usize) -> impl Strategy<Value = SimpleGraph> {
    (0..=max_n).prop_flat_map(|n| {
        prop::collection::vec(any::<bool>(), n * n.saturating_sub(1) / 2).prop_map(move |bits| {
            let mut k = 0;
            let mut edges = Vec::new();
            for a in 0..n {
                for b in a + 1..n {
                    if bits[k] {
                        edges.push((a, b));
                    }
                    k += 1;
                }
            }
            SimpleGraph::from_edges(n, edges).unwrap()
        })
    })
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for at in 0..=p.len() {
            let mut q = p.clone();
            q.insert(at, n - 1);
            out.push(q);
        }
    }
    out
}

fn naive_hamiltonian(g: &SimpleGraph, kind: WalkKind) -> bool {
    let n = g.vertex_count();
    if kind == WalkKind::Cycle && n < 3 {
        return false;
    }
    permutations(n).iter().any(|p| {
        let steps = p.windows(2).all(|w| g.has_edge(w[0], w[1]));
        steps && (kind == WalkKind::Path || g.has_edge(p[n - 1], p[0]))
    }) && n > 0
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn group_laws(g in small_group(200), a in any::<u64>(), b in any::<u64>(), c in any::<u64>()) {
        let n = g.order();
        let (x, y, z) = (g.element_at((a % n) as usize), g.element_at((b % n) as usize), g.element_at((c % n) as usize));
        prop_assert_eq!(g.add(&x, &y), g.add(&y, &x));
        prop_assert_eq!(g.add(&g.add(&x, &y), &z), g.add(&x, &g.add(&y, &z)));
        prop_assert_eq!(g.add(&x, &g.identity()), x.clone());
        prop_assert_eq!(g.element_at(g.index_of(&x)), x.clone());
        let o = g.element_order(&x);
        prop_assert!(g.power(&x, o).is_identity());
        prop_assert_eq!(n % o, 0);
        prop_assert!((1..o).all(|k| !g.power(&x, k).is_identity()));
    }

    #[test]
    fn group_specs_round_trip(g in small_group(10_000)) {
        let again: FiniteAbelianGroup = g.to_string().parse().unwrap();
        prop_assert_eq!(again, g);
    }

    #[test]
    fn crt_matches_enumeration(m1 in 1u64..=30, m2 in 1u64..=30, r1 in 0u64..30, r2 in 0u64..30) {
        let a = ResidueClass::new(r1 % m1, m1).unwrap();
        let b = ResidueClass::new(r2 % m2, m2).unwrap();
        let lcm = num_integer::lcm(m1, m2);
        let common: Vec<u64> = (0..lcm).filter(|&k| a.contains(k) && b.contains(k)).collect();
        match crt_intersect(a, b) {
            None => prop_assert!(common.is_empty()),
            Some(c) => {
                prop_assert_eq!(c.modulus(), lcm);
                prop_assert_eq!(common, vec![c.base()]);
            }
        }
    }

    #[test]
    fn power_graph_is_transitive_with_equal_orders_on_mutual_arcs(g in small_group(120)) {
        let p = build_power_graph(&g).unwrap();
        let n = p.vertex_count();
        for a in 0..n {
            for &b in p.out_neighbors(a) {
                prop_assert!(a != b);
                for &c in p.out_neighbors(b) {
                    prop_assert!(c == a || p.has_edge(a, c));
                }
                if p.has_edge(b, a) {
                    prop_assert_eq!(p.element_order(a), p.element_order(b));
                }
                let w = p.witness(a, b).unwrap();
                prop_assert_eq!(g.power(p.element(a), w.least_positive()), p.element(b).clone());
            }
        }
    }

    #[test]
    fn orbits_are_components_and_edges_saturate(g in p_group(250)) {
        let p = build_power_graph(&g).unwrap();
        let c = condense(&p);
        prop_assert_eq!(&clusters_by_orbits(&g).unwrap(), &c);
        prop_assert_eq!(c.clusters().iter().map(|k| k.weight).sum::<u64>(), g.order());
        for (x, y) in c.edges() {
            for &a in &c.cluster(x).members {
                for &b in &c.cluster(y).members {
                    prop_assert!(p.has_edge(a, b));
                }
            }
        }
        let q = quotient_graph(&p.undirected_view(), &c.partition()).unwrap();
        prop_assert_eq!(q, c.undirected());
        prop_assert_eq!(c.level(c.cluster_of(0)), 0);
    }

    #[test]
    fn oracle_matches_permutations(g in graph(7)) {
        let cfg = SearchConfig::default();
        for kind in [WalkKind::Cycle, WalkKind::Path] {
            let out = find_hamiltonian(&g, kind, &cfg);
            prop_assert_eq!(out.decided(), Some(naive_hamiltonian(&g, kind)));
            if let SearchOutcome::Found(w) = &out {
                prop_assert!(verify_walk(&WeightedGraph::unit(g.clone()), w).is_valid());
            }
            prop_assert_eq!(find_hamiltonian(&g, kind, &cfg), out);
        }
    }

    #[test]
    fn weighted_oracle_agrees_with_direct_search(g in graph(5), ws in prop::collection::vec(1u64..=3, 5)) {
        let wg = WeightedGraph::new(g.clone(), ws[..g.vertex_count()].to_vec()).unwrap();
        for kind in [WalkKind::Cycle, WalkKind::Path] {
            let out = find_w_hamiltonian(&wg, kind, &SearchConfig::default());
            prop_assert_eq!(out.decided(), Some(weighted_search(&wg, kind).is_some()));
            if let SearchOutcome::Found(w) = &out {
                prop_assert!(verify_walk(&wg, w).is_valid());
            }
        }
    }

    #[test]
    fn grid_decisions_match_search(m in 0usize..=4, n in 0usize..=4, u in 1u64..=3, v in 1u64..=3) {
        let g = Grid::new(m, n, u, v).unwrap();
        prop_assume!(g.expanded_size() <= 16);
        let truth = find_w_hamiltonian(&g.weighted(), WalkKind::Cycle, &SearchConfig::default()).decided();
        prop_assert_eq!(Some(decide_grid(&g).unwrap().is_hamiltonian()), truth);
    }

    #[test]
    fn certificates_round_trip(vs in prop::collection::vec(prop::collection::vec(0u64..50, 1..4), 0..8), k in 0usize..100) {
        for c in [
            Certificate::Cycle { vertices: vs.clone() },
            Certificate::Path { vertices: vs.clone() },
            Certificate::Cut { cut: vs.clone(), components: k },
        ] {
            prop_assert_eq!(Certificate::from_json(&c.to_json()).unwrap(), c);
        }
    }
}

#[test]
fn snake_walk_and_coloring_assemble_on_every_small_grid() {
    let mut built = 0;
    for m in 1..=6 {
        for n in 1..=6 {
            for u in 1..=4 {
                for v in 1..=4 {
                    let g = Grid::new(m, n, u, v).unwrap();
                    if !g.criterion_holds() {
                        assert!(build_snake_path(&g).is_err());
                        continue;
                    }
                    let path = build_snake_path(&g).unwrap();
                    let problem = residual_weights(&path);
                    assert!(colorability_oracle(&problem), "{g}");
                    let ColorOutcome::Colored(coloring) = color_game_solve(&problem) else {
                        panic!("color game blocked on {g}");
                    };
                    assert!(coloring.is_legal(&problem));
                    let cycle = assemble_grid_cycle(&path, &coloring).unwrap();
                    assert!(verify_walk(&g.weighted(), &cycle).is_valid(), "{g}");
                    built += 1;
                }
            }
        }
    }
    assert!(built > 300, "{built}");
}
