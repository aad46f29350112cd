mod common;

use common::*;
use mosc::metrics::max_weight_assignment;
use mosc::{enumerate_triangles, epsilon_nodes, epsilon_structures, evaluate, nmi, ocut, Partition, Structure};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::Rng;

fn relabel(p: &Partition, sigma: &[usize]) -> Partition {
    Partition::new(p.labels().iter().map(|&l| sigma[l]).collect(), p.k()).unwrap()
}

#[test]
fn assignment_matches_brute_force_on_hundred_pairs() {
    let mut r = rng(3);
    for case in 0..100 {
        let n = r.gen_range(6..16);
        let g = gnp(n, 0.5, &mut r);
        let ti = enumerate_triangles(&g);
        let (kt, kc) = (r.gen_range(1..=6.min(n)), r.gen_range(1..=6.min(n)));
        let truth = random_partition(n, kt, &mut r);
        let cand = random_partition(n, kc, &mut r);
        for s in [Structure::Node, Structure::Edge, Structure::Triangle] {
            let fast = epsilon_structures(&truth, &cand, s, &g, &ti).unwrap().value;
            let slow = brute_epsilon(&truth, &cand, &structures(&g, &ti, s));
            assert_eq!(fast, slow, "case {case}, {s}");
        }
        assert_eq!(epsilon_nodes(&truth, &cand).unwrap().value, brute_epsilon(&truth, &cand, &structures(&g, &ti, Structure::Node)));
    }
}

#[test]
fn ocut_matches_brute_force_on_hundred_orderings() {
    let mut r = rng(4);
    for case in 0..100 {
        let n = r.gen_range(4..14);
        let g = gnp(n, 0.55, &mut r);
        let ti = enumerate_triangles(&g);
        let truth = random_partition(n, r.gen_range(2..=3.min(n)), &mut r);
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(&mut r);
        for s in [Structure::Node, Structure::Edge, Structure::Triangle] {
            let report = ocut(&order, &truth, s, &g, &ti).unwrap();
            let items = structures(&g, &ti, s);
            let curve: Vec<f64> = (1..n)
                .map(|u| {
                    let mut labels = vec![1; n];
                    order[..u].iter().for_each(|&v| labels[v] = 0);
                    brute_epsilon(&truth, &Partition::new(labels, 2).unwrap(), &items)
                })
                .collect();
            assert_eq!(report.curve, curve, "case {case}, {s}");
            let min = curve.iter().copied().fold(f64::INFINITY, f64::min);
            assert_eq!(report.value, min);
            assert_eq!(report.best_u, curve.iter().position(|&v| v == min).unwrap() + 1);
        }
    }
}

#[test]
fn assignment_small_cases() {
    let w = vec![vec![1.0, 5.0, 0.0], vec![4.0, 2.0, 0.0], vec![0.0, 0.0, 3.0]];
    assert_eq!(max_weight_assignment(&w), (12.0, vec![1, 0, 2]));
}

/// NMI with base-2 logarithms and the arithmetic-mean normalization.
fn nmi_log2(a: &Partition, b: &Partition) -> f64 {
    let n = a.n() as f64;
    let mut joint = std::collections::HashMap::new();
    for (&x, &y) in a.labels().iter().zip(b.labels()) {
        *joint.entry((x, y)).or_insert(0.0) += 1.0;
    }
    let h = |sizes: Vec<usize>| -sizes.iter().map(|&s| s as f64 / n).map(|p| p * p.log2()).sum::<f64>();
    let (sa, sb) = (a.sizes(), b.sizes());
    let mi: f64 = joint
        .iter()
        .map(|(&(x, y), &c)| c / n * (c * n / (sa[x] as f64 * sb[y] as f64)).log2())
        .sum();
    let denom = (h(sa) + h(sb)) / 2.0;
    if denom == 0.0 { 1.0 } else { mi / denom }
}

#[test]
fn nmi_hand_value() {
    let a = Partition::from_labels(&[0, 0, 1, 1]);
    let b = Partition::from_labels(&[0, 0, 0, 1]);
    assert!((nmi(&a, &b).unwrap() - nmi_log2(&a, &b)).abs() < 1e-12);
    let independent = Partition::from_labels(&[0, 1, 0, 1]);
    assert!(nmi(&a, &independent).unwrap().abs() < 1e-12);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn nmi_symmetric_and_base_free(n in 2usize..40, ka in 1usize..6, kb in 1usize..6, seed in any::<u64>()) {
        let mut r = rng(seed);
        let a = random_partition(n, ka.min(n), &mut r);
        let b = random_partition(n, kb.min(n), &mut r);
        let (ab, ba) = (nmi(&a, &b).unwrap(), nmi(&b, &a).unwrap());
        prop_assert!((ab - ba).abs() < 1e-12);
        prop_assert!((0.0..=1.0).contains(&ab));
        prop_assert!((ab - nmi_log2(&a, &b).clamp(0.0, 1.0)).abs() < 1e-9);
        prop_assert!((nmi(&a, &a).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn metrics_ignore_cluster_names(n in 3usize..20, k in 2usize..5, seed in any::<u64>()) {
        let mut r = rng(seed);
        let k = k.min(n);
        let g = gnp(n, 0.5, &mut r);
        let ti = enumerate_triangles(&g);
        let truth = random_partition(n, k, &mut r);
        let cand = random_partition(n, k, &mut r);
        let mut sigma: Vec<usize> = (0..k).collect();
        sigma.shuffle(&mut r);
        let base = evaluate(&truth, &cand, &g, &ti).unwrap();
        for (t, c) in [(relabel(&truth, &sigma), cand.clone()), (truth.clone(), relabel(&cand, &sigma))] {
            let other = evaluate(&t, &c, &g, &ti).unwrap();
            prop_assert_eq!((other.eps_n, other.eps_e, other.eps_t), (base.eps_n, base.eps_e, base.eps_t));
            prop_assert!((other.nmi - base.nmi).abs() < 1e-12);
        }
    }
}
