use proptest::prelude::*;
use wirecut::cutting::{exact_cut_expectation, CutMethod};
use wirecut::qaoa::{
    build_qaoa_circuit, chain_partition, exact_cost, generate_clustered_graph, max_fragment_qubits,
    maxcut_cost_operator, optimize_params, plan_qaoa_cuts, ClusteredGraphSpec, EdgeOrder, Evaluator, Graph, Init,
    OptimizerConfig, QAOAParams, VertexLabel,
};
use wirecut::sim::{exact_distribution, exact_expectation};
use wirecut::C64;

/// Brute-force `⟨f⟩`: phases `exp(-iγ z_i z_j)` per edge and
/// `exp(-iβ X)` per qubit, applied to `|+⟩^n` with plain loops.
fn brute_force_cost(graph: &Graph, gammas: &[f64], betas: &[f64]) -> f64 {
    let n = graph.num_vertices();
    let dim = 1usize << n;
    let z = |x: usize, v: usize| if (x >> v) & 1 == 0 { 1.0 } else { -1.0 };
    let energy: Vec<f64> = (0..dim)
        .map(|x| graph.edges().iter().map(|&(a, b)| z(x, a) * z(x, b)).sum::<f64>())
        .collect();
    let mut psi = vec![C64::new((dim as f64).sqrt().recip(), 0.0); dim];
    for (&g, &b) in gammas.iter().zip(betas) {
        for (a, e) in psi.iter_mut().zip(&energy) {
            *a *= C64::from_polar(1.0, -g * e);
        }
        let (c, s) = (C64::new(b.cos(), 0.0), C64::new(0.0, -b.sin()));
        for v in 0..n {
            for x in 0..dim {
                if (x >> v) & 1 == 0 {
                    let y = x | (1 << v);
                    let (p, q) = (psi[x], psi[y]);
                    psi[x] = c * p + s * q;
                    psi[y] = s * p + c * q;
                }
            }
        }
    }
    let m = graph.num_edges() as f64;
    psi.iter().zip(&energy).map(|(a, e)| a.norm_sqr() * e / m).sum()
}

#[test]
fn exact_cost_matches_brute_force_on_five_vertices() {
    let g = Graph::new(5, &[(0, 1), (0, 2), (1, 2), (1, 3), (2, 4), (3, 4)]).unwrap();
    for (gammas, betas) in [
        (vec![0.3], vec![0.9]),
        (vec![1.1], vec![0.2]),
        (vec![0.4, 0.8], vec![0.6, 0.3]),
        (vec![0.2, 0.5, 1.3], vec![1.0, 0.7, 0.1]),
    ] {
        let want = brute_force_cost(&g, &gammas, &betas);
        let got = exact_cost(&g, &QAOAParams::new(gammas.clone(), betas.clone()).unwrap()).unwrap();
        assert!((got - want).abs() < 1e-12, "{gammas:?} {betas:?}: {got} vs {want}");
    }
}

#[test]
fn cost_operator_is_bounded_and_signed() {
    let g = Graph::new(4, &[(0, 1), (1, 2), (2, 3), (0, 3)]).unwrap();
    let f = maxcut_cost_operator(&g).unwrap();
    assert_eq!(f.evaluate(0), 1.0);
    // alternating colouring cuts every edge of the 4-cycle
    assert_eq!(f.evaluate(0b0101), -1.0);
    assert!(f.table(4).iter().all(|v| v.abs() <= 1.0));
}

fn graph_for(r: usize, n: usize, k: usize, seed: u64) -> Option<Graph> {
    generate_clustered_graph(&ClusteredGraphSpec::new(r, n, k, seed)).ok()
}

fn angles(p: usize, seed: u64) -> QAOAParams {
    let t = |i: u64| ((seed.wrapping_mul(2654435761).wrapping_add(i * 40503) % 1000) as f64) / 1000.0 * 3.0;
    QAOAParams::new((0..p as u64).map(t).collect(), (0..p as u64).map(|i| t(i + 17)).collect()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn edge_order_does_not_change_the_state(
        n in 2usize..=3, k in 1usize..=2, p in 1usize..=2, seed in 0u64..1000,
    ) {
        let Some(g) = graph_for(2, n, k, seed) else { return Ok(()) };
        let part = chain_partition(&g).unwrap();
        let params = angles(p, seed);
        let a = exact_distribution(&build_qaoa_circuit(&g, &params, EdgeOrder::Natural).unwrap()).unwrap();
        let b = exact_distribution(&build_qaoa_circuit(&g, &params, EdgeOrder::Partition(&part)).unwrap()).unwrap();
        for (x, y) in a.iter().zip(&b) {
            prop_assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn generated_graphs_have_the_chain_structure(
        r in 2usize..=4, n in 1usize..=6, k in 1usize..=3, seed in 0u64..1000,
    ) {
        let spec = ClusteredGraphSpec::new(r, n, k, seed);
        let Ok(g) = generate_clustered_graph(&spec) else { return Ok(()) };
        prop_assert_eq!(g.num_vertices(), r * n + (r - 1) * k);
        prop_assert!(g.is_connected());
        prop_assert_eq!(&generate_clustered_graph(&spec).unwrap(), &g);
        for &(a, b) in g.edges() {
            let (la, lb) = (g.labels()[a].unwrap(), g.labels()[b].unwrap());
            let ok = match (la, lb) {
                (VertexLabel::Cluster(i), VertexLabel::Cluster(j)) => i == j,
                (VertexLabel::Cluster(i), VertexLabel::Separator(s))
                | (VertexLabel::Separator(s), VertexLabel::Cluster(i)) => i == s || i == s + 1,
                (VertexLabel::Separator(_), VertexLabel::Separator(_)) => false,
            };
            prop_assert!(ok, "edge ({}, {}) joins {:?} and {:?}", a, b, la, lb);
        }
    }

    #[test]
    fn qaoa_cut_plans_respect_structural_bounds(
        r in 2usize..=3, n in 3usize..=4, k in 1usize..=2, p in 1usize..=3, seed in 0u64..1000,
    ) {
        let Some(g) = graph_for(r, n, k, seed) else { return Ok(()) };
        let part = chain_partition(&g).unwrap();
        let plan = plan_qaoa_cuts(&g, &part, p, CutMethod::Randomized).unwrap();
        prop_assert!(plan.groups().len() <= (2 * p - 1) * part.overlaps().len());
        prop_assert!(plan.groups().iter().all(|grp| grp.wires.len() <= part.kappa()));
        prop_assert!(plan.max_fragment_width() <= max_fragment_qubits(n, p, k));
        prop_assert!(plan.fragments().len() <= part.len());
    }

    #[test]
    fn qaoa_cut_expectation_is_unbiased(k in 1usize..=2, p in 1usize..=2, seed in 0u64..1000) {
        let Some(g) = graph_for(2, 2, k, seed) else { return Ok(()) };
        let part = chain_partition(&g).unwrap();
        let params = angles(p, seed);
        let plan = plan_qaoa_cuts(&g, &part, p, CutMethod::Randomized).unwrap();
        prop_assume!(plan.groups().len() <= 3);
        let c = build_qaoa_circuit(&g, &params, EdgeOrder::Partition(&part)).unwrap();
        let obs = maxcut_cost_operator(&g).unwrap();
        let want = exact_expectation(&c, &obs).unwrap();
        let got = exact_cut_expectation(&c, &plan, &obs).unwrap();
        prop_assert!((got - want).abs() < 1e-10, "{} vs {}", got, want);
    }
}

#[test]
fn exact_optimisation_never_increases_the_cost() {
    let g = graph_for(2, 3, 1, 0).unwrap();
    let config = OptimizerConfig {
        steps: 15,
        init: Init::Ramp,
        ..OptimizerConfig::default()
    };
    let res = optimize_params(&g, 2, &Evaluator::Exact, &config).unwrap();
    assert_eq!(res.trace.len(), 16);
    assert!(res.trace.windows(2).all(|w| w[1] <= w[0]));
    let check = exact_cost(&g, &res.params).unwrap();
    assert!((check - res.cost).abs() < 1e-12);
    assert!(res.cost < res.trace[0]);
}
