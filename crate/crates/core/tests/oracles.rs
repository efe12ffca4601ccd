mod common;

use common::Table;
use interinfo::cluster::{ward_cluster, DissimilarityMatrix, NodeRef};
use interinfo::info::{Analyzer, EntropyLattice};
use interinfo::prob::Estimator;
use interinfo::search::{conditional_scan, RankBy};
use interinfo::synth::{
    gen_naive_bayes, gen_parity, gen_synonym, gen_triplicate, GenKind, Sampling,
};
use interinfo::viz::newick;

fn fixture() -> DissimilarityMatrix {
    let rows = vec![
        vec![0.0, 1.0, 4.0, 6.0],
        vec![1.0, 0.0, 3.0, 5.0],
        vec![4.0, 3.0, 0.0, 2.0],
        vec![6.0, 5.0, 2.0, 0.0],
    ];
    let names = ["A", "B", "C", "D"].iter().map(|s| s.to_string()).collect();
    DissimilarityMatrix::from_values(names, rows, 1000.0).unwrap()
}

// Hand-run Lance-Williams recurrence on the fixture:
//   merge {A,B} at 1
//   d(C,AB) = (2*4 + 2*3 - 1*1) / 3 = 13/3,  d(D,AB) = (2*6 + 2*5 - 1) / 3 = 7
//   merge {C,D} at 2
//   d(AB,CD) = (3*13/3 + 3*7 - 2*2) / 4 = 30/4 = 7.5
#[test]
fn ward_hand_fixture() {
    let t = ward_cluster(&fixture());
    let heights: Vec<f64> = t.merges.iter().map(|m| m.height).collect();
    for (got, want) in heights.iter().zip([1.0, 2.0, 7.5]) {
        assert!((got - want).abs() < 1e-9, "{heights:?}");
    }
    assert_eq!(t.members(NodeRef::Merge(0)), vec![0, 1]);
    assert_eq!(t.members(NodeRef::Merge(1)), vec![2, 3]);
    assert_eq!(
        t.cut_names(2).unwrap(),
        vec![vec!["A", "B"], vec!["C", "D"]]
    );
}

#[test]
fn ward_hand_fixture_newick() {
    assert_eq!(
        newick(&ward_cluster(&fixture())),
        "((A:1.000000,B:1.000000):6.500000,(C:2.000000,D:2.000000):5.500000);\n"
    );
}

fn mixture_table(p1: f64) -> Table {
    let mut cells: Vec<(Vec<u32>, f64)> = [[0, 0, 0], [1, 1, 0], [1, 0, 1], [0, 1, 1]]
        .iter()
        .map(|t| (t.to_vec(), p1 / 4.0))
        .collect();
    cells.push((vec![2, 2, 2], 1.0 - p1));
    Table {
        cards: vec![3, 3, 3],
        cells,
    }
}

// Bisection on the brute-force interaction information of the mixture puts
// the zero crossing at p1 = 0.77291 (to five places); the synergy of the XOR
// event and the redundancy of the (2,2,2) event cancel there.
#[test]
fn mixture_root_by_bisection() {
    let f = |p: f64| mixture_table(p).interaction(&[0, 1, 2], &[]);
    let (mut lo, mut hi) = (0.5, 0.95);
    assert!(f(lo) < 0.0 && f(hi) > 0.0);
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let root = 0.5 * (lo + hi);
    assert!(root > 0.75 && root < 0.80, "root {root}");
    assert!((root - 0.77291).abs() < 5e-6, "root {root}");

    // the library agrees with the oracle along the whole curve
    for i in 0..=20 {
        let p = i as f64 / 20.0;
        let dist = GenKind::Mixture { p1: p }.distribution().unwrap();
        let lib = EntropyLattice::new(&dist)
            .unwrap()
            .interaction_information(&[0, 1, 2], &[])
            .unwrap()
            .0;
        assert!((lib - f(p)).abs() < 1e-12, "p1 = {p}");
    }
}

fn table_of(ds: &interinfo::data::Dataset) -> Table {
    let n = ds.n_instances() as f64;
    let mut cells = Vec::new();
    for r in 0..n as usize {
        cells.push((ds.instance(r), 1.0 / n));
    }
    Table {
        cards: (0..ds.n_attributes()).map(|a| ds.cardinality(a)).collect(),
        cells,
    }
}

#[test]
fn four_way_parity_brute_force() {
    let ds = gen_parity(3, 8, Sampling::Exhaustive).unwrap();
    let oracle = table_of(&ds).interaction(&[0, 1, 2, 3], &[]);
    assert!((oracle - 1.0).abs() < 1e-12);
    let lib = Analyzer::new(&ds, Estimator::Ml)
        .interaction_information(&[0, 1, 2, 3], &[])
        .unwrap()
        .0;
    assert!((lib - oracle).abs() < 1e-12);
    // every lower-order interaction vanishes
    for s in common::subsets(&[0, 1, 2, 3], 2)
        .into_iter()
        .filter(|s| s.len() < 4)
    {
        assert!(table_of(&ds).interaction(&s, &[]).abs() < 1e-12);
    }
}

#[test]
fn polysemy_triple_is_synergistic() {
    let dist = GenKind::Polysemy {
        p_context1: 0.3,
        p_context2: 0.3,
        noise: 0.05,
    }
    .distribution()
    .unwrap();
    let cells: Vec<(Vec<u32>, f64)> = dist.iter().collect();
    let t = Table {
        cards: dist.cardinalities().to_vec(),
        cells,
    };
    let oracle = t.interaction(&[0, 1, 2], &[]);
    assert!(oracle > 0.0, "{oracle}");
    let lib = EntropyLattice::new(&dist)
        .unwrap()
        .interaction_information(&[0, 1, 2], &[])
        .unwrap()
        .0;
    assert!((lib - oracle).abs() < 1e-12);
}

#[test]
fn noiseless_synonyms_share_one_bit() {
    let ds = gen_synonym(0.0, 2, 8, Sampling::Exhaustive).unwrap();
    let i = Analyzer::new(&ds, Estimator::Ml)
        .mutual_information(&[0], &[1])
        .unwrap();
    assert!((i.0.abs() - 1.0).abs() < 1e-12);
}

#[test]
fn triplicate_rotations() {
    let ds = gen_triplicate(2, Sampling::Exhaustive).unwrap();
    let an = Analyzer::new(&ds, Estimator::Ml);
    for (a, b, c) in [(0, 1, 2), (1, 2, 0), (2, 0, 1)] {
        assert_eq!(
            an.conditional_mutual_information(&[a], &[b], &[c])
                .unwrap()
                .0,
            0.0
        );
    }
    assert_eq!(an.total_correlation(&[0, 1, 2], &[]).unwrap().0, 2.0);
}

#[test]
fn naive_bayes_conditional_scores_shrink() {
    let mut last = f64::INFINITY;
    for n in [500, 5000, 50000] {
        let ds = gen_naive_bayes(4, 3, 2, 0.6, n, 11).unwrap();
        let top = conditional_scan(&ds, 2, 1, RankBy::Magnitude, Estimator::Ml).unwrap();
        let worst = top[0].magnitude.0;
        assert!(worst < last);
        last = worst;
    }
    assert!(last < 1e-3, "{last}");
}
