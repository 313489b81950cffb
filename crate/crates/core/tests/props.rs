//! Property tests for the operator invariants: round trips, zero-extension,
//! linearity, eval/table agreement, monotone partial sums, and the rule
//! hierarchy.

use dseq_core::convergence::certify_rule;
use dseq_core::difference::{delta, inv_delta};
use dseq_core::seq::DoubleSequence;
use dseq_core::window::Window;
use dseq_core::{RunConfig, Rule, Scalar, Verdict};
use proptest::collection::vec;
use proptest::prelude::*;

const CAP: u64 = 1 << 22;

fn int_rows() -> impl Strategy<Value = Vec<Vec<i64>>> {
    (1usize..=12, 1usize..=12).prop_flat_map(|(r, c)| vec(vec(-1000i64..=1000, c..=c), r..=r))
}

fn float_rows() -> impl Strategy<Value = Vec<Vec<f64>>> {
    (1usize..=12, 1usize..=12).prop_flat_map(|(r, c)| vec(vec(-1000.0f64..1000.0, c..=c), r..=r))
}

fn int_seq() -> impl Strategy<Value = DoubleSequence> {
    (int_rows(), -3i64..=3)
        .prop_map(|(rows, default)| DoubleSequence::from_int_rows(rows, default).unwrap())
}

fn float_seq() -> impl Strategy<Value = DoubleSequence> {
    float_rows().prop_map(|rows| DoubleSequence::from_f64_rows(rows, 0.0).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn delta_and_inv_delta_are_mutually_inverse_exactly(x in int_seq()) {
        let w = Window::square(16);
        let orig = x.table(w, CAP).unwrap();
        let fwd = inv_delta(&delta(&x)).table(w, CAP).unwrap();
        let bwd = delta(&inv_delta(&x)).table(w, CAP).unwrap();
        for m in 0..=w.m_max {
            for n in 0..=w.n_max {
                prop_assert_eq!(fwd.get(m, n), orig.get(m, n), "S(dx) at ({},{})", m, n);
                prop_assert_eq!(bwd.get(m, n), orig.get(m, n), "d(Sx) at ({},{})", m, n);
            }
        }
    }

    #[test]
    fn roundtrips_stay_within_float_tolerance(x in float_seq()) {
        let w = Window::square(16);
        let orig = x.table_f64(w, CAP).unwrap();
        let fwd = inv_delta(&delta(&x)).table_f64(w, CAP).unwrap();
        let bwd = delta(&inv_delta(&x)).table_f64(w, CAP).unwrap();
        let scale = orig.iter().fold(1.0f64, |acc, v| acc.max(v.abs()));
        for m in 0..=w.m_max {
            for n in 0..=w.n_max {
                prop_assert!((fwd.get(m, n) - orig.get(m, n)).abs() <= 1e-12 * scale);
                prop_assert!((bwd.get(m, n) - orig.get(m, n)).abs() <= 1e-12 * scale);
            }
        }
    }

    #[test]
    fn negative_indices_evaluate_to_zero(x in int_seq(), m in -5i64..20, n in -5i64..20) {
        for y in [x.clone(), delta(&x), inv_delta(&x)] {
            prop_assert_eq!(y.eval(-1, n).unwrap().to_f64(), 0.0);
            prop_assert_eq!(y.eval(m, -1).unwrap().to_f64(), 0.0);
        }
    }

    #[test]
    fn delta_is_linear(x in int_seq(), y in int_seq(), c in -9i64..=9) {
        let w = Window::square(16);
        let lhs = delta(&x.scale(Scalar::Int(c)).add(&y)).table(w, CAP).unwrap();
        let rhs = delta(&x).scale(Scalar::Int(c)).add(&delta(&y)).table(w, CAP).unwrap();
        for m in 0..=w.m_max {
            for n in 0..=w.n_max {
                prop_assert_eq!(lhs.get(m, n), rhs.get(m, n));
            }
        }
    }

    #[test]
    fn window_tables_agree_with_pointwise_eval(x in int_seq()) {
        let w = Window::square(14);
        for y in [x.prefix_sum(), x.delta(), x.abs()] {
            let t = y.table(w, CAP).unwrap();
            for m in 0..=w.m_max {
                for n in 0..=w.n_max {
                    prop_assert_eq!(t.get(m, n), y.eval(m as i64, n as i64).unwrap());
                }
            }
        }
    }

    #[test]
    fn absolute_partial_sums_are_monotone_exactly_on_integers(x in int_seq()) {
        let w = Window::square(16);
        let z = x.abs().prefix_sum().table_f64(w, CAP).unwrap();
        for m in 0..=w.m_max {
            for n in 0..=w.n_max {
                if m > 0 {
                    prop_assert!(z.get(m, n) >= z.get(m - 1, n));
                }
                if n > 0 {
                    prop_assert!(z.get(m, n) >= z.get(m, n - 1));
                }
            }
        }
    }

    #[test]
    fn absolute_partial_sums_are_monotone_up_to_rounding(x in float_seq()) {
        // The inclusion-exclusion recurrence can land one ulp below the
        // previous cell on the float path; allow rounding-scale slack.
        let w = Window::square(16);
        let z = x.abs().prefix_sum().table_f64(w, CAP).unwrap();
        let slack = 1e-12 * z.get(w.m_max, w.n_max).max(1.0);
        for m in 0..=w.m_max {
            for n in 0..=w.n_max {
                if m > 0 {
                    prop_assert!(z.get(m, n) >= z.get(m - 1, n) - slack);
                }
                if n > 0 {
                    prop_assert!(z.get(m, n) >= z.get(m, n - 1) - slack);
                }
            }
        }
    }
}

proptest! {
    // Each case runs three schedule certifications; keep the count low.
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn rule_hierarchy_holds_on_random_tables(x in int_seq()) {
        let cfg = RunConfig { schedule: vec![8, 16, 32], ..RunConfig::default() };
        let r = certify_rule(&x, Rule::R, &cfg).unwrap();
        let bp = certify_rule(&x, Rule::Bp, &cfg).unwrap();
        let p = certify_rule(&x, Rule::P, &cfg).unwrap();
        if r.verdict == Verdict::Converges {
            prop_assert_eq!(bp.verdict, Verdict::Converges);
        }
        if bp.verdict == Verdict::Converges {
            prop_assert_eq!(p.verdict, Verdict::Converges);
            let (a, b) = (bp.limit.unwrap(), p.limit.unwrap());
            prop_assert!((a - b).abs() <= 1e-9, "bp limit {} vs p limit {}", a, b);
        }
    }
}
