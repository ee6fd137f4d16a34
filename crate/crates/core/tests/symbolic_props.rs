mod common;

use jsrkit_core::cocycle::PeriodicWord;
use jsrkit_core::symbolic::{
    epsilon_of_n, golden_convergents, is_balanced, karp_value, max_cycle_mean, path_max_average, shift_distance,
    sturmian_word, OrbitClosure, Rational, ShiftDistance, ShiftPoint, WeightedGraph,
};
use proptest::prelude::*;

fn window(half: usize) -> impl Strategy<Value = ShiftPoint> {
    prop::collection::vec(0u8..2, 2 * half + 1).prop_map(move |s| ShiftPoint::new(s, half).unwrap())
}

/// Same as `base` except at a few positions; keeps triples close enough
/// that the distances are not all 2.
fn nearby(base: ShiftPoint) -> impl Strategy<Value = ShiftPoint> {
    let len = base.symbols().len();
    prop::collection::vec(0..len, 0..3).prop_map(move |flips| {
        let mut s = base.symbols().to_vec();
        for f in flips {
            s[f] ^= 1;
        }
        ShiftPoint::new(s, base.origin()).unwrap()
    })
}

fn graph() -> impl Strategy<Value = WeightedGraph> {
    (1usize..=8).prop_flat_map(|v| {
        prop::collection::vec((0..v, 0..v, -10i32..=10), 1..=3 * v)
            .prop_map(move |es| WeightedGraph::new(v, es.into_iter().map(|(a, b, w)| (a, b, w as f64)).collect()).unwrap())
    })
}

/// Best mean over simple cycles by depth-first enumeration, as an exact
/// fraction (sum, length).
fn simple_cycle_oracle(g: &WeightedGraph) -> Option<(i64, i64)> {
    fn dfs(g: &WeightedGraph, start: usize, at: usize, on: &mut Vec<bool>, sum: i64, len: i64, best: &mut Option<(i64, i64)>) {
        for e in g.edges().iter().filter(|e| e.from == at) {
            let s = sum + e.weight as i64;
            if e.to == start {
                let better = best.map_or(true, |(bs, bl)| s * bl > bs * (len + 1));
                if better {
                    *best = Some((s, len + 1));
                }
            } else if e.to > start && !on[e.to] {
                on[e.to] = true;
                dfs(g, start, e.to, on, s, len + 1, best);
                on[e.to] = false;
            }
        }
    }
    let mut best = None;
    for start in 0..g.vertices() {
        let mut on = vec![false; g.vertices()];
        on[start] = true;
        dfs(g, start, start, &mut on, 0, 0, &mut best);
    }
    best
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn shift_metric_symmetric_and_ultrametric(
        (x, y, z) in window(6).prop_flat_map(|x| (Just(x.clone()), nearby(x.clone()), nearby(x)))
    ) {
        let dxy = shift_distance(&x, &y);
        prop_assert_eq!(dxy, shift_distance(&y, &x));
        let dxz = shift_distance(&x, &z);
        let dyz = shift_distance(&y, &z);
        // only decided distances take part in the bound
        if let (ShiftDistance::Exact(a), ShiftDistance::Exact(b), ShiftDistance::Exact(c)) = (dxz, dxy, dyz) {
            prop_assert!(a <= 2.0 * b.max(c));
        }
        if x == y {
            prop_assert!(matches!(dxy, ShiftDistance::UpperBound(_)));
        }
    }

    #[test]
    fn sturmian_words_are_balanced(k in 4usize..24, pn in 0i64..97, len in 50usize..300) {
        let g = golden_convergents(k + 1)[k];
        let phi = Rational::new(pn, 97).unwrap();
        let w = sturmian_word(g, phi, len, len / 2).unwrap();
        prop_assert!(is_balanced(w.symbols(), 200));
    }

    #[test]
    fn epsilon_monotone_for_periodic_sets(
        orbits in prop::collection::vec(prop::collection::vec(0usize..2, 1..5), 1..3)
    ) {
        let z = OrbitClosure::periodic(orbits.into_iter().map(|c| PeriodicWord::new(c).unwrap()).collect(), 2).unwrap();
        let mut prev = f64::INFINITY;
        for n in 1..=6 {
            let e = epsilon_of_n(&z, n, 1 << 20).unwrap();
            prop_assert!(e.exact);
            prop_assert!(e.value <= prev);
            prev = e.value;
        }
        // every orbit of Z has period below 5, so Z itself is reachable
        prop_assert_eq!(prev, 0.0);
    }

    #[test]
    fn path_average_envelope(g in graph(), n in 1usize..60) {
        match (simple_cycle_oracle(&g), max_cycle_mean(&g)) {
            (None, r) => prop_assert!(r.is_err()),
            (Some((s, l)), Ok(m)) => {
                let exact = s as f64 / l as f64;
                prop_assert!((m.value - exact).abs() < 1e-9);
                prop_assert!((m.witness.mean - exact).abs() < 1e-9);
                let p = path_max_average(&g, n).unwrap();
                let bound = 2.0 * g.max_abs_weight() * g.vertices() as f64 / n as f64;
                prop_assert!(p >= exact - 1e-9);
                prop_assert!(p - exact <= bound + 1e-9);
                prop_assert!((karp_value(&g, 1000).unwrap() - exact).abs() < 1e-9);
            }
            (Some(_), Err(e)) => prop_assert!(false, "missed a cycle: {:?}", e),
        }
    }
}

#[test]
fn sturmian_epsilon_monotone_and_decaying() {
    let z = OrbitClosure::sturmian(golden_convergents(24)).unwrap();
    let values: Vec<f64> = (1..=21).map(|n| epsilon_of_n(&z, n, 0).unwrap().value).collect();
    assert!(values.windows(2).all(|w| w[1] <= w[0]), "{values:?}");
    for (a, b) in [(5, 8), (8, 13), (13, 21)] {
        assert!(values[b - 1] <= 0.5 * values[a - 1]);
    }
}
