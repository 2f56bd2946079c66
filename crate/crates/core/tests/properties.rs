use proptest::prelude::*;

use golden_gates::approx::GateCatalog;
use golden_gates::lattice::exact_synthesis;
use golden_gates::quat::{from_su2, quat_mul, to_so3, to_su2};
use golden_gates::words::{evaluate_word, reduce_word};
use golden_gates::{metric_d, GateSet, GateWord, Generator, LipschitzQuaternion, Psu2Point};

fn small_quat() -> impl Strategy<Value = LipschitzQuaternion> {
    (-40i64..=40, -40i64..=40, -40i64..=40, -40i64..=40)
        .prop_map(|(a, b, c, d)| LipschitzQuaternion::new(a, b, c, d))
}

fn unit() -> impl Strategy<Value = Psu2Point> {
    [-1.0f64..1.0, -1.0f64..1.0, -1.0f64..1.0, -1.0f64..1.0]
        .prop_filter("nonzero", |v| v.iter().map(|x| x * x).sum::<f64>() > 1e-3)
        .prop_map(|v| Psu2Point::new(v).unwrap())
}

fn word(max_len: usize) -> impl Strategy<Value = GateWord> {
    prop::collection::vec(0usize..9, 0..=max_len)
        .prop_map(|ix| reduce_word(&ix.iter().map(|&i| Generator::ALL[i]).collect::<Vec<_>>()).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn norm_is_multiplicative(p in small_quat(), q in small_quat()) {
        let pq = quat_mul(&p, &q).unwrap();
        prop_assert_eq!(pq.norm(), p.norm() * q.norm());
        prop_assert_eq!(pq.conj(), quat_mul(&q.conj(), &p.conj()).unwrap());
    }

    #[test]
    fn metric_is_bi_invariant(x in unit(), y in unit(), g in unit()) {
        let d = metric_d(&x, &y);
        prop_assert!((metric_d(&g.mul(&x), &g.mul(&y)) - d).abs() < 1e-10);
        prop_assert!((metric_d(&x.mul(&g), &y.mul(&g)) - d).abs() < 1e-10);
        let neg = Psu2Point::new(y.coords().map(|v| -v)).unwrap();
        prop_assert!((metric_d(&x, &neg) - d).abs() < 1e-15);
        prop_assert!((0.0..=1.0).contains(&d));
    }

    #[test]
    fn metric_triangle_inequality(x in unit(), y in unit(), z in unit()) {
        prop_assert!(metric_d(&x, &z) <= metric_d(&x, &y) + metric_d(&y, &z) + 1e-12);
    }

    #[test]
    fn su2_and_so3_are_homomorphisms(x in unit(), y in unit()) {
        let m = to_su2(&x).mul(&to_su2(&y));
        prop_assert!(metric_d(&from_su2(&m).unwrap(), &x.mul(&y)) < 1e-7);
        let r = to_so3(&x).mul(&to_so3(&y));
        let s = to_so3(&x.mul(&y));
        for i in 0..3 {
            for j in 0..3 {
                prop_assert!((r.0[i][j] - s.0[i][j]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn synthesis_round_trip(w in word(14)) {
        let q = evaluate_word(&w);
        let back = exact_synthesis(&q).unwrap();
        prop_assert_eq!(back.height(), w.height());
        prop_assert_eq!(&back, &w);
        prop_assert_eq!(reduce_word(&w.symbols()).unwrap(), w);
    }

    #[test]
    fn norm_records_height(w in word(14)) {
        let q = evaluate_word(&w);
        prop_assert_eq!(q.height_of_norm(), Some(w.height()));
        prop_assert!(q.is_primitive() && q.is_canonical());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn nearest_is_sign_blind_and_nested(x in unit()) {
        let small = GateCatalog::build(GateSet::T, 2).unwrap();
        let large = GateCatalog::build(GateSet::T, 3).unwrap();
        let c = x.coords();
        let x = Psu2Point::new(c).unwrap();
        let neg = Psu2Point::new(c.map(|v| -v)).unwrap();
        prop_assert_eq!(x, neg);
        let a = small.nearest(&x).unwrap();
        let b = small.nearest(&neg).unwrap();
        prop_assert_eq!(&a.word, &b.word);
        prop_assert_eq!(a.achieved_distance, b.achieved_distance);
        prop_assert!(large.nearest(&x).unwrap().achieved_distance <= a.achieved_distance);
    }
}
