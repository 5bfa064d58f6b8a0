mod common;

use proptest::prelude::*;
use rand::Rng;

use falforge::filling::{
    aggregate_length, certificate, crossing_count, filling_for, min_crossings, normalized_length, plan, CuspShape,
    FillingError,
};

/// Threshold recomputed by hand: `n * max(107.6/d^2 + 14.41, 45.2/(d^2.5 ln(1+e)) + 14.41)`.
fn oracle_raw(epsilon: f64, delta: f64, n: usize) -> f64 {
    let a = 107.6 / delta.powi(2) + 14.41;
    let b = 45.2 / (delta.powi(2) * delta.sqrt() * (1.0 + epsilon).ln()) + 14.41;
    n as f64 * if a > b { a } else { b }
}

#[test]
fn length_is_at_least_root_c() {
    let mut r = common::rng(20);
    for _ in 0..10_000 {
        let w = 10f64.powf(r.gen_range(-3.0..3.0));
        let b = 10f64.powf(r.gen_range(-3.0..3.0));
        let c: u64 = r.gen_range(1..2000);
        let l = normalized_length(&CuspShape { w, b, half_twist: false }, c).unwrap();
        let cf = c as f64;
        assert!(l * l >= cf * (1.0 - 1e-12), "w={w} b={b} c={c}");
        // L^2 - c = (x - c)^2 / 2x with x = w/b.
        let x = w / b;
        let gap = (x - cf).powi(2) / (2.0 * x);
        assert!(((l * l - cf) - gap).abs() <= 1e-9 * (l * l), "w={w} b={b} c={c}");
        if ((l - cf.sqrt()) / cf.sqrt()).abs() < 1e-9 {
            assert!((x - cf).abs() <= 1e-3 * cf, "near-equality away from w/b = c");
        }
    }
}

#[test]
fn equality_when_ratio_matches() {
    for c in 1..=100u64 {
        for b in [0.01, 0.5, 1.0, 7.0] {
            let l = normalized_length(&CuspShape { w: c as f64 * b, b, half_twist: false }, c).unwrap();
            assert!((l - (c as f64).sqrt()).abs() < 1e-9, "c={c} b={b}");
        }
    }
}

#[test]
fn threshold_reference_value() {
    let t = min_crossings(std::f64::consts::E - 1.0, 1.0, 6).unwrap();
    assert!((t.raw - 732.06).abs() < 1e-9);
    assert_eq!(t.crossings, 733);
    assert_eq!((t.untwisted.n, t.untwisted.crossings), (367, 734));
    assert_eq!((t.twisted.n, t.twisted.crossings), (366, 733));
}

#[test]
fn threshold_matches_oracle_and_is_monotone() {
    let deltas: Vec<f64> = (0..20).map(|i| 0.05 + 0.1 * i as f64).collect();
    let epsilons: Vec<f64> = (0..20).map(|i| 0.01 * 1.4f64.powi(i)).collect();
    for n in [1, 6, 13] {
        let grid: Vec<Vec<u64>> = deltas
            .iter()
            .map(|&d| {
                epsilons
                    .iter()
                    .map(|&e| {
                        let t = min_crossings(e, d, n).unwrap();
                        let raw = oracle_raw(e, d, n);
                        assert!((t.raw - raw).abs() <= 1e-9 * raw);
                        assert_eq!(t.crossings, raw.ceil() as u64);
                        t.crossings
                    })
                    .collect()
            })
            .collect();
        for i in 0..20 {
            for j in 0..20 {
                if i + 1 < 20 {
                    assert!(grid[i + 1][j] <= grid[i][j], "delta not monotone at {i},{j}");
                }
                if j + 1 < 20 {
                    assert!(grid[i][j + 1] <= grid[i][j], "epsilon not monotone at {i},{j}");
                }
            }
        }
    }
}

#[test]
fn parity_of_crossing_counts() {
    for n in -100i64..=100 {
        let even = crossing_count(n, false);
        let odd = crossing_count(n, true);
        assert_eq!(even % 2, 0);
        assert_eq!(odd % 2, 1);
        assert_eq!(even, (2 * n).unsigned_abs());
        assert_eq!(odd, (2 * n + 1).unsigned_abs());
    }
}

#[test]
fn smallest_filling_by_brute_force() {
    for c in 1..=300u64 {
        for half_twist in [false, true] {
            for sign in [1i8, -1] {
                let best = (-400i64..=400)
                    .filter(|&n| (n >= 0) == (sign > 0) && (n != 0 || sign > 0))
                    .filter(|&n| crossing_count(n, half_twist) >= c)
                    .min_by_key(|n| (crossing_count(*n, half_twist), n.abs()))
                    .unwrap();
                let got = filling_for(c, half_twist, sign);
                assert_eq!(got.crossings, crossing_count(best, half_twist), "c={c} twist={half_twist} sign={sign}");
                assert_eq!(got.crossings, crossing_count(got.n, half_twist));
                assert!(got.crossings >= c);
            }
        }
    }
}

#[test]
fn aggregate_of_equal_lengths() {
    let c = 733.0f64;
    for n in 1..=50 {
        let l = aggregate_length(&vec![c.sqrt(); n]).unwrap();
        assert!((l - (c / n as f64).sqrt()).abs() < 1e-12, "n={n}");
    }
    assert_eq!(aggregate_length(&[]), Err(FillingError::Empty));
}

#[test]
fn bad_parameters_are_rejected() {
    assert!(matches!(min_crossings(1.0, 0.0, 3), Err(FillingError::NonPositive { name: "delta", .. })));
    assert!(matches!(min_crossings(1.0, -1.0, 3), Err(FillingError::NonPositive { .. })));
    assert!(matches!(min_crossings(0.0, 1.0, 3), Err(FillingError::NonPositive { name: "epsilon", .. })));
    assert!(matches!(min_crossings(f64::NAN, 1.0, 3), Err(FillingError::NonPositive { .. })));
    let s = CuspShape { w: 1.0, b: 1.0, half_twist: false };
    assert_eq!(normalized_length(&s, 0), Err(FillingError::ZeroCrossings));
    assert!(plan(1.0, 0.0, 1.0, &[s], &[1]).is_err());
}

fn shapes() -> impl Strategy<Value = Vec<(f64, f64, bool, bool)>> {
    prop::collection::vec((0.1f64..10.0, 0.1f64..10.0, any::<bool>(), any::<bool>()), 1..12)
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 200, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn planned_fillings_always_pass(raw in shapes(), eps in 0.05f64..3.0, delta in 0.2f64..3.0) {
        let s: Vec<CuspShape> = raw.iter().map(|&(w, b, t, _)| CuspShape { w, b, half_twist: t }).collect();
        let signs: Vec<i8> = raw.iter().map(|&(.., neg)| if neg { -1 } else { 1 }).collect();
        let p = plan(eps, 2.0, delta, &s, &signs).unwrap();
        let cert = certificate(eps, 2.0, delta, &p).unwrap();
        prop_assert!(cert.passed);
        prop_assert!(cert.min_crossings >= cert.required_crossings);
        // The aggregate squared length is at least min c_i / n.
        prop_assert!(cert.aggregate_length_sq >= cert.guaranteed_length_sq * (1.0 - 1e-12));
        for (c, &sg) in p.circles.iter().zip(&signs) {
            prop_assert_eq!(c.n >= 0, sg > 0);
            prop_assert_eq!(c.crossings % 2 == 1, c.shape.half_twist);
        }
    }

    #[test]
    fn certificate_passes_iff_every_circle_reaches_threshold(
        raw in shapes(), eps in 0.05f64..3.0, delta in 0.5f64..3.0, cut in 0usize..12, drop in 1u64..50,
    ) {
        let s: Vec<CuspShape> = raw.iter().map(|&(w, b, t, _)| CuspShape { w, b, half_twist: t }).collect();
        let mut p = plan(eps, 1.0, delta, &s, &vec![1; s.len()]).unwrap();
        let required = p.threshold.crossings;
        if cut < p.circles.len() {
            let c = &mut p.circles[cut];
            let lowered = filling_for(required.saturating_sub(drop + 1).max(1), c.shape.half_twist, 1);
            c.n = lowered.n;
            c.crossings = lowered.crossings;
        }
        let cert = certificate(eps, 1.0, delta, &p).unwrap();
        let min_c = p.circles.iter().map(|c| c.crossings).min().unwrap();
        prop_assert_eq!(cert.passed, min_c >= required);
        prop_assert_eq!(cert.min_crossings, min_c);
        prop_assert_eq!(cert.deficient.is_empty(), cert.passed);
    }
}

#[test]
fn certificate_rejects_mismatched_parameters() {
    let s = [CuspShape { w: 1.0, b: 1.0, half_twist: false }];
    let p = plan(1.0, 1.0, 1.0, &s, &[1]).unwrap();
    assert_eq!(certificate(1.0, 1.0, 2.0, &p), Err(FillingError::ParameterMismatch));
}
