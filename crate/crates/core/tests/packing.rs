use bundle_decomp_core::generate::{bipartite_density, regular};
use bundle_decomp_core::packing::*;
use bundle_decomp_core::partition::VertexPartition;
use bundle_decomp_core::{Error, Graph, RngStream, Strictness};
use rayon::prelude::*;

fn pattern(name: &str) -> PatternGraph {
    PatternGraph::from_graph(&named_graph(name).unwrap()).unwrap()
}

fn complete_bipartite(na: usize, nb: usize) -> Graph {
    let edges: Vec<_> = (0..na).flat_map(|a| (0..nb).map(move |b| (a, na + b))).collect();
    Graph::new(na + nb, &edges).unwrap()
}

fn copies_verified(g: &Graph, h: &PatternGraph, es: &[Embedding]) {
    for e in es {
        verify_embedding(g, h, e).unwrap();
    }
}

#[test]
fn chain_on_complete_pair() {
    let g = complete_bipartite(10, 5);
    let h = pattern("K2,1");
    let s0: Vec<usize> = (0..10).collect();
    let t1: Vec<usize> = (10..15).collect();
    let out = moho_embed(&g, &s0, &t1, &h, 0.5, Some(1.0));
    assert_eq!(out.embeddings.len(), 5);
    assert!(out.residue.is_empty());
    assert_eq!(out.aborts, 0);
    // the first chain vertex sees all of S0, ties go to the lowest index
    assert_eq!(out.embeddings[0].map[h.y[0]], 10);
    copies_verified(&g, &h, &out.embeddings);
}

#[test]
fn chain_without_partners() {
    let g = complete_bipartite(10, 5);
    let s0: Vec<usize> = (0..10).collect();
    let out = moho_embed(&g, &s0, &[], &pattern("K2,1"), 0.5, Some(1.0));
    assert!(out.embeddings.is_empty());
    assert_eq!(out.residue, s0);
}

#[test]
fn chain_residue_on_planted_instance() {
    let h = pattern("K3,2");
    let delta: f64 = 0.3;
    let bound = h.h() as f64 / delta.powi(h.h() as i32);
    (0..50u64).into_par_iter().for_each(|seed| {
        let host = bipartite_density(40, 500, 0.4, &mut RngStream::new(seed, 0)).unwrap();
        let g = &host.graph;
        let out = moho_embed(g, &host.a, &host.b, &h, delta, None);
        assert!((out.residue.len() as f64) <= bound);
        // the default floor exceeds |S0| here, so also run down to |X|
        let out = moho_embed(g, &host.a, &host.b, &h, delta, Some(h.x.len() as f64));
        copies_verified(g, &h, &out.embeddings);
        assert!(out.residue.len() < 40, "seed {seed}: nothing embedded");
    });
}

#[test]
fn balancing_copies() {
    let h = pattern("K3,1");
    assert_eq!(h.delta_h(), 2);
    assert_eq!(balance_assignment(107, 100, &h).unwrap().balancing, 3);
    let even = balance_assignment(100, 100, &h).unwrap();
    assert_eq!(even.balancing, 0);
    assert_eq!(even.doubled, 25);
    let plan = balance_assignment(103, 100, &h).unwrap();
    assert_eq!(plan.balancing, 1);
    assert!(plan.larger_is_s);
    assert!(203 - plan.assigned < 4);
    assert!(plan.bound_holds);
    assert!(matches!(balance_assignment(10, 10, &pattern("C4")), Err(Error::BalancedPattern)));
}

#[test]
fn plan_arithmetic_over_sizes() {
    for name in ["K2,1", "K3,1", "K4,1", "K3,2", "K5,2", "S6"] {
        let h = pattern(name);
        for s in h.h()..120 {
            for t in h.h()..120 {
                let plan = balance_assignment(s, t, &h).unwrap();
                let sides = plan.orientations().iter().fold((0, 0), |(a, b), &x_on_s| {
                    if x_on_s {
                        (a + h.x.len(), b + h.y.len())
                    } else {
                        (a + h.y.len(), b + h.x.len())
                    }
                });
                assert!(sides.0 <= s && sides.1 <= t, "{name} {s} {t}");
                assert_eq!(sides.0 + sides.1, plan.assigned);
                if !plan.capacity_limited {
                    assert!(plan.within_slack, "{name} {s} {t}");
                }
                if h.delta_h() == 1 && !plan.capacity_limited {
                    assert!(plan.bound_holds, "{name} {s} {t}");
                }
            }
        }
    }
    // no orientation mix covers more than 380 of 386 vertices here
    let plan = balance_assignment(193, 193, &pattern("K4,1")).unwrap();
    assert_eq!(386 - plan.assigned, 6);
    assert!(!plan.bound_holds && plan.within_slack);
}

#[test]
fn single_edges_fill_complete_pair() {
    let g = complete_bipartite(50, 50);
    let h = pattern("K2");
    let s: Vec<usize> = (0..50).collect();
    let t: Vec<usize> = (50..100).collect();
    let plan = AssignmentPlan { doubled: 25, ..Default::default() };
    let cfg = SuperRegularConfig { assume: true, ..Default::default() };
    let out = embed_super_regular(&g, &s, &t, &h, &plan, None, &cfg, &mut RngStream::new(1, 0)).unwrap();
    assert_eq!(out.failed, 0);
    assert_eq!(out.embeddings.len(), 50);
    let again = embed_super_regular(&g, &s, &t, &h, &plan, None, &cfg, &mut RngStream::new(1, 0)).unwrap();
    assert_eq!(out, again);
    let strict = SuperRegularConfig::default();
    assert!(embed_super_regular(&g, &s, &t, &h, &plan, None, &strict, &mut RngStream::new(1, 0)).is_err());
}

#[test]
fn hexagons_in_random_pair() {
    let h = pattern("C6");
    let successes: usize = (0..100u64)
        .into_par_iter()
        .map(|seed| {
            let host = bipartite_density(1000, 1000, 0.3, &mut RngStream::new(seed, 7)).unwrap();
            let plan = AssignmentPlan { doubled: 165, ..Default::default() };
            let cfg = SuperRegularConfig { assume: true, ..Default::default() };
            let out = embed_super_regular(&host.graph, &host.a, &host.b, &h, &plan, None, &cfg, &mut RngStream::new(seed, 8))
                .unwrap();
            usize::from(out.failed == 0)
        })
        .sum();
    assert!(successes >= 90, "{successes}");
}

fn one_cluster_partition(a: Vec<Vec<usize>>, b: Vec<Vec<usize>>) -> VertexPartition {
    VertexPartition { k: a.len() - 1, epsilon: 0.1, d: 0.3, a, b }
}

#[test]
fn absorption_cases() {
    let g = Graph::empty(10);
    let vp = one_cluster_partition(vec![vec![], vec![0, 1]], vec![vec![], vec![2, 3]]);
    let out = absorb_exceptional(&g, &vp, 1.0, 0.3);
    assert!(out.residue.is_empty() && out.s0[1].is_empty() && out.t0[1].is_empty());

    // vertex 0 sees all of B_1 and nothing of B_2
    let mut edges = vec![(0, 5), (0, 6)];
    edges.extend([(1, 5), (2, 7), (3, 8), (4, 7), (4, 8)]);
    let g = Graph::new(9, &edges).unwrap();
    let vp = one_cluster_partition(vec![vec![0], vec![1, 2], vec![3, 4]], vec![vec![], vec![5, 6], vec![7, 8]]);
    let out = absorb_exceptional(&g, &vp, 1.0, 0.3);
    assert_eq!(out.s0[1], vec![0]);
    assert!(out.s0[2].is_empty() && out.residue.is_empty());
}

#[test]
fn absorption_overflow() {
    let m = 20;
    let d = 1e-6;
    let cap = unbalanced::intake_cap(d, m);
    assert_eq!(cap, 11);
    let extra = 15;
    let a1: Vec<usize> = (0..m).collect();
    let b1: Vec<usize> = (m..2 * m).collect();
    let a0: Vec<usize> = (2 * m..2 * m + extra).collect();
    let edges: Vec<_> = a0.iter().flat_map(|&v| b1.iter().map(move |&u| (v, u))).collect();
    let g = Graph::new(2 * m + extra, &edges).unwrap();
    let vp = one_cluster_partition(vec![a0, a1], vec![vec![], b1]);
    let out = absorb_exceptional(&g, &vp, 1.0, d);
    assert_eq!(out.s0[1].len(), cap);
    assert_eq!(out.residue.len(), extra - cap);
    assert!(out.log.iter().any(|l| l.contains("intake cap")));
}

#[test]
fn balanced_edgeless_host() {
    let g = Graph::empty(40);
    let res = pack_balanced(&g, &pattern("C4"), 0.2, 0.3, &PackConfig::default(), &RngStream::new(3, 0)).unwrap();
    assert!(res.embeddings.is_empty());
    assert_eq!(res.uncovered.len(), 40);
    assert!(res.assertions.all_pass());
}

#[test]
fn strict_pattern_size_gate() {
    let g = regular(200, 20, &mut RngStream::new(1, 0)).unwrap();
    let cfg = PackConfig { strictness: Strictness::Strict, ..Default::default() };
    let err = pack_balanced(&g, &pattern("C4"), 0.01, 0.3, &cfg, &RngStream::new(1, 0)).unwrap_err();
    assert!(matches!(err, Error::PatternTooLarge { .. }));
    assert!(err.to_string().contains("h too large"));
}

#[test]
fn single_edges_cover_dense_host() {
    let g = regular(400, 380, &mut RngStream::new(5, 0)).unwrap();
    let res = pack_balanced(&g, &pattern("K2"), 0.05, 0.3, &PackConfig::default(), &RngStream::new(5, 1)).unwrap();
    assert!(res.assertions.all_pass(), "{:?}", res.assertions);
    assert!(res.coverage() >= 0.9, "{}", res.coverage());
}

#[test]
fn unbalanced_rejects_balanced_pattern() {
    let g = regular(100, 30, &mut RngStream::new(1, 0)).unwrap();
    let err = pack_unbalanced(&g, &pattern("C4"), 0.2, 0.3, &PackConfig::default(), &RngStream::new(1, 0)).unwrap_err();
    assert!(matches!(err, Error::NeedsUnbalanced));
}

#[test]
fn unbalanced_paths_on_dense_host() {
    let g = regular(400, 200, &mut RngStream::new(9, 0)).unwrap();
    let h = pattern("P3");
    let res = pack_unbalanced(&g, &h, 0.2, 0.3, &PackConfig::default(), &RngStream::new(9, 1)).unwrap();
    assert!(res.assertions.all_pass(), "{:?}", res.assertions);
    assert!(res.k > 0);
    assert!(res.clusters.iter().all(|c| c.leftover <= h.h()), "{:?}", res.clusters);
    let again = pack_unbalanced(&g, &h, 0.2, 0.3, &PackConfig::default(), &RngStream::new(9, 1)).unwrap();
    assert_eq!(res, again);
}

#[test]
fn subdivided_k4_runs_the_same_pipeline() {
    let h = one_subdivision(&named_graph("K4").unwrap());
    assert_eq!(h.delta_h(), 2);
    let g = regular(400, 200, &mut RngStream::new(4, 0)).unwrap();
    let res = pack_unbalanced(&g, &h, 0.2, 0.3, &PackConfig::default(), &RngStream::new(4, 1)).unwrap();
    assert!(res.assertions.all_pass(), "{:?}", res.assertions);
    assert!(!res.embeddings.is_empty());
}

#[test]
fn no_bundles_leaves_everything_uncovered() {
    let g = regular(100, 6, &mut RngStream::new(2, 0)).unwrap();
    let res = pack_unbalanced(&g, &pattern("P3"), 0.2, 0.3, &PackConfig::default(), &RngStream::new(2, 1)).unwrap();
    assert_eq!(res.k, 0);
    assert_eq!(res.uncovered.len(), 100);
    assert!(res.assertions.all_pass());
}

#[test]
fn stored_result_reaudits_identically() {
    let g = regular(400, 200, &mut RngStream::new(6, 0)).unwrap();
    let h = pattern("P3");
    let res = pack_unbalanced(&g, &h, 0.2, 0.3, &PackConfig::default(), &RngStream::new(6, 1)).unwrap();
    let json = serde_json::to_string(&res).unwrap();
    let back: PackingResult = serde_json::from_str(&json).unwrap();
    let pattern_back: PatternGraph = serde_json::from_str(&serde_json::to_string(&h).unwrap()).unwrap();
    assert_eq!(audit_packing(&g, &pattern_back, &back), res.assertions);

    let mut tampered = back.clone();
    let e = &mut tampered.embeddings[0].map;
    e[0] = (0..g.n()).find(|v| !e.contains(v) && !g.has_edge(*v, e[1])).unwrap();
    let audit = audit_packing(&g, &h, &tampered);
    assert!(!audit.passed("embeddings"));
    assert!(audit.get("embeddings").unwrap().detail.as_deref().unwrap().starts_with("copy 0"));
}
