use proptest::prelude::*;
use randcount::families::{GfMatrix, Graph};
use randcount::FamilyOracle;

const BUDGET: u64 = 1_000_000;

fn brute_force(oracle: &FamilyOracle, c: &[f64]) -> f64 {
    oracle
        .enumerate(BUDGET)
        .unwrap()
        .iter()
        .map(|x| x.iter().map(|&i| c[i]).sum::<f64>())
        .fold(f64::NEG_INFINITY, f64::max)
}

fn graph_from(num_vertices: usize, picks: &[bool]) -> Graph {
    let mut all = Vec::new();
    for u in 0..num_vertices {
        for v in u + 1..num_vertices {
            all.push((u, v));
        }
    }
    let edges = all
        .into_iter()
        .zip(picks)
        .filter(|(_, &p)| p)
        .map(|(e, _)| e)
        .collect();
    Graph::new(num_vertices, edges).unwrap()
}

fn oracles_on(graph: &Graph) -> Vec<FamilyOracle> {
    let mut out = vec![FamilyOracle::forests(graph.clone())];
    if graph.is_connected() {
        out.push(FamilyOracle::spanning_trees(graph.clone()).unwrap());
    }
    if let Ok(pm) = FamilyOracle::perfect_matchings(graph.clone()) {
        out.push(pm);
    }
    out
}

fn weights(n: usize, seed: &[i32]) -> Vec<f64> {
    (0..n)
        .map(|i| seed[i % seed.len()] as f64 + 0.37 * (i as f64).sin())
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn graph_oracles_match_enumeration(
        num_vertices in 2usize..7,
        picks in prop::collection::vec(prop::bool::weighted(0.6), 15),
        seed in prop::collection::vec(-20i32..20, 1..16),
    ) {
        let graph = graph_from(num_vertices, &picks);
        prop_assume!(graph.num_edges() <= 12);
        for oracle in oracles_on(&graph) {
            let c = weights(oracle.n(), &seed);
            let fast = oracle.max_weight(&c).unwrap();
            prop_assert!((fast - brute_force(&oracle, &c)).abs() < 1e-9, "{}", oracle.descriptor());
        }
    }

    #[test]
    fn integer_weights_match_exactly(
        rows in 1usize..6,
        cells in prop::collection::vec(prop::bool::weighted(0.7), 36),
        seed in prop::collection::vec(-9i32..9, 36),
    ) {
                let support: Vec<Vec<bool>> = (0..rows).map(|i| (0..rows).map(|j| cells[i * 6 + j] || i == j).collect()).collect();
        let oracle = FamilyOracle::bipartite_matchings(&support).unwrap();
        let c: Vec<f64> = (0..oracle.n()).map(|i| seed[i % seed.len()] as f64).collect();
        prop_assert_eq!(oracle.max_weight(&c).unwrap(), brute_force(&oracle, &c));
    }

    #[test]
    fn matroids_match_enumeration(
        n in 1usize..11,
        k in 0usize..6,
        entries in prop::collection::vec(0i64..3, 40),
        seed in prop::collection::vec(-20i32..20, 1..12),
    ) {
        let k = k.min(n);
        let uniform = FamilyOracle::uniform_matroid(n, k).unwrap();
        let c = weights(n, &seed);
        prop_assert!((uniform.max_weight(&c).unwrap() - brute_force(&uniform, &c)).abs() < 1e-9);

        let rows: Vec<Vec<i64>> = (0..4).map(|r| (0..n).map(|j| entries[(r * 10 + j) % 40]).collect()).collect();
        let linear = FamilyOracle::linear_matroid(GfMatrix::from_rows(&rows, 3).unwrap());
        prop_assert!((linear.max_weight(&c).unwrap() - brute_force(&linear, &c)).abs() < 1e-9);
    }

    #[test]
    fn explicit_relabeling_leaves_max_unchanged(
        n in 1usize..10,
        members in prop::collection::vec(prop::collection::vec(any::<bool>(), 10), 1..20),
        shift in 1usize..10,
        seed in prop::collection::vec(-20i32..20, 1..10),
    ) {
        let subsets: Vec<Vec<usize>> = members.iter().map(|m| (0..n).filter(|&i| m[i]).collect()).collect();
        let perm = |i: usize| (i * (2 * shift + 1) + shift) % n;
        // (2s+1) is odd, so it is a bijection whenever gcd(2s+1, n) = 1
        prop_assume!((0..n).map(perm).collect::<std::collections::BTreeSet<_>>().len() == n);
        let relabeled: Vec<Vec<usize>> = subsets.iter().map(|x| x.iter().map(|&i| perm(i)).collect()).collect();
        // integer weights keep the sums exact under any summation order
        let c: Vec<f64> = (0..n).map(|i| seed[i % seed.len()] as f64).collect();
        let mut c_perm = vec![0.0; n];
        for i in 0..n {
            c_perm[perm(i)] = c[i];
        }
        let a = FamilyOracle::explicit(n, subsets).unwrap().max_weight(&c).unwrap();
        let b = FamilyOracle::explicit(n, relabeled).unwrap().max_weight(&c_perm).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn edge_order_does_not_change_the_maximum(
        picks in prop::collection::vec(prop::bool::weighted(0.7), 15),
        rotate in 0usize..15,
        seed in prop::collection::vec(-20i32..20, 1..16),
    ) {
        let graph = graph_from(6, &picks);
        let mut edges = graph.edges().to_vec();
        let r = rotate % edges.len().max(1);
        edges.rotate_left(r);
        let rotated = Graph::new(6, edges).unwrap();
        let c = weights(graph.num_edges(), &seed);
        let mut c_rot = c.clone();
        c_rot.rotate_left(r);
        for (a, b) in oracles_on(&graph).iter().zip(oracles_on(&rotated).iter()) {
            prop_assert!((a.max_weight(&c).unwrap() - b.max_weight(&c_rot).unwrap()).abs() < 1e-9);
        }
    }

    #[test]
    fn ties_give_a_unique_value(reps in 1usize..6) {
        // all-equal weights: every basis of K5 has weight 4
        let oracle = FamilyOracle::spanning_trees(Graph::complete(5)).unwrap();
        let c = vec![reps as f64; 10];
        prop_assert_eq!(oracle.max_weight(&c).unwrap(), 4.0 * reps as f64);
    }
}

#[test]
fn product_adds_maxima() {
    let left = FamilyOracle::spanning_trees(Graph::complete(4)).unwrap();
    let right = FamilyOracle::uniform_matroid(5, 2).unwrap();
    let product = FamilyOracle::product(vec![left.clone(), right.clone()]).unwrap();
    let c: Vec<f64> = (0..11).map(|i| ((i * 7) % 5) as f64 - 1.5).collect();
    let sum = left.max_weight(&c[..6]).unwrap() + right.max_weight(&c[6..]).unwrap();
    assert_eq!(product.max_weight(&c).unwrap(), sum);
    assert_eq!(product.enumerate(BUDGET).unwrap().len(), 16 * 10);
}

#[test]
fn weight_length_and_finiteness_are_checked() {
    let oracle = FamilyOracle::uniform_matroid(4, 2).unwrap();
    assert!(oracle.max_weight(&[1.0, 2.0]).is_err());
    assert!(oracle.max_weight(&[1.0, f64::NAN, 0.0, 0.0]).is_err());
}
