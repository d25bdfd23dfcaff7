use proptest::prelude::*;
use treebench::objectives::{concavity_class, leaf_value, log_beta, ConcavityClass, LeafStats};
use treebench::{Objective, ObjectiveKind, ObjectiveParams};

fn f(kind: ObjectiveKind, n: usize, e: usize) -> f64 {
    Objective::new(kind, ObjectiveParams::default())
        .unwrap()
        .leaf_value(n, e)
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

// Published comparison table, rounded to three decimals.
#[test]
fn comparison_table_values() {
    use ObjectiveKind::*;
    assert!(close(f(Gini, 8, 2), 3.0, 1e-3));
    assert!(close(f(Gini, 4, 2) + f(Gini, 4, 0), 2.0, 1e-3));
    assert!(close(f(Entropy, 8, 1), 2.174, 1e-3));
    assert!(close(f(Entropy, 4, 2) + f(Entropy, 4, 0), 2.0, 1e-3));
    assert!(close(f(MdlMehta, 6, 2), 5.513, 1e-3));
    assert!(close(f(MdlMehta, 4, 2) + f(MdlMehta, 2, 0), 5.409, 1e-3));
    assert!(close(f(Bayes, 6, 2), 4.379, 1e-3));
    assert!(close(f(Bayes, 4, 2) + f(Bayes, 2, 0), 4.321, 1e-3));

    let table1 = Objective::new(MdlQuinlan, ObjectiveParams::default().with_table1_base(true)).unwrap();
    assert!(close(table1.leaf_value(6, 2), 4.708, 1e-3));
    assert!(close(table1.leaf_value(4, 2) + table1.leaf_value(2, 0), 4.377, 1e-3));
    assert!(close(f(MdlQuinlan, 6, 2), 4.0943, 1e-4));
    assert!(close(f(MdlQuinlan, 4, 2) + f(MdlQuinlan, 2, 0), 3.5835, 1e-4));
}

#[test]
fn table_relations_strict() {
    use ObjectiveKind::*;
    assert!(f(Gini, 8, 2) > f(Gini, 4, 2) + f(Gini, 4, 0));
    assert!(f(Entropy, 8, 1) > f(Entropy, 4, 2) + f(Entropy, 4, 0));
    assert!(f(MdlMehta, 6, 2) > f(MdlMehta, 4, 2) + f(MdlMehta, 2, 0));
    assert!(f(Bayes, 6, 2) > f(Bayes, 4, 2) + f(Bayes, 2, 0));
}

#[test]
fn direct_evaluations() {
    use ObjectiveKind::*;
    assert_eq!(f(Accuracy, 100, 20), 20.0);
    assert!(close(f(SqrtGini, 8, 2), 8.0 * 0.375f64.sqrt(), 1e-12));
    assert!(close(f(MinError, 4, 2), 2.0, 1e-12));
    assert_eq!(f(BinomPessimistic, 5, 5), 5.0);
    assert!(close(
        f(BinomPessimistic, 100, 0),
        100.0 * (1.0 - 0.25f64.powf(0.01)),
        1e-9
    ));
    assert!(close(f(BinomPessimistic, 100, 0), 1.3767, 1e-4));
    assert!(close(f(MLoss, 100, 20), 25.0, 1e-9));
    assert_eq!(f(LLoss, 100, 0), 0.0);
    assert_eq!(f(SmoothedAccuracy, 10, 2), 2.0);
}

#[test]
fn empty_leaf_costs_nothing() {
    for kind in ObjectiveKind::ALL {
        assert_eq!(f(kind, 0, 0), 0.0, "{kind}");
    }
}

#[test]
fn log_beta_reference() {
    // Γ(2.5)² / Γ(5) = (1.329340388179137)² / 24
    let reference = (1.329_340_388_179_137f64.powi(2) / 24.0).ln();
    assert!(close(log_beta(2.5, 2.5).unwrap(), reference, 1e-12));
    assert!(close(log_beta(2.5, 2.5).unwrap(), -2.609, 1e-3));
    assert!(log_beta(0.0, 2.0).is_err());
}

#[test]
fn concavity_classes() {
    use ObjectiveKind::*;
    for kind in [Gini, SqrtGini, Entropy, MdlQuinlan, MdlMehta, Bayes] {
        assert_eq!(concavity_class(kind), ConcavityClass::StrictlyConcave);
    }
    for kind in [Accuracy, MinError, BinomPessimistic, MLoss, LLoss, SmoothedAccuracy] {
        assert_eq!(concavity_class(kind), ConcavityClass::NonConcave);
    }
}

#[test]
fn nondecreasing_in_errors() {
    for kind in ObjectiveKind::ALL {
        for n in 2..=200 {
            for e in 1..=n / 2 {
                assert!(f(kind, n, e) + 1e-12 >= f(kind, n, e - 1), "{kind} ({n},{e})");
            }
        }
    }
}

#[test]
fn node_size_direction() {
    use ObjectiveKind::*;
    for n in 1..200 {
        for e in 0..=n / 2 {
            for kind in ObjectiveKind::ALL {
                let (a, b) = (f(kind, n, e), f(kind, n + 1, e));
                match kind {
                    MLoss | LLoss => assert!(b <= a + 1e-12, "{kind} ({n},{e})"),
                    Accuracy => assert_eq!(a, b),
                    _ if concavity_class(kind) == ConcavityClass::StrictlyConcave => {
                        assert!(b + 1e-12 >= a, "{kind} ({n},{e})")
                    }
                    _ => {}
                }
            }
        }
    }
}

#[test]
fn smoothing_one_is_min_error() {
    let smoothed = Objective::new(
        ObjectiveKind::SmoothedAccuracy,
        ObjectiveParams::default().with_smoothing(1.0).unwrap(),
    )
    .unwrap();
    for n in 1..=150 {
        for e in 0..=n / 2 {
            assert_eq!(smoothed.leaf_value(n, e), f(ObjectiveKind::MinError, n, e));
        }
    }
}

// Every split of (n, k positives) into two nonempty children.
fn splits(n: usize, k: usize) -> impl Iterator<Item = ((usize, usize), (usize, usize))> {
    (1..n).flat_map(move |n1| {
        let n2 = n - n1;
        (k.saturating_sub(n2)..=k.min(n1)).map(move |k1| ((n1, k1), (n2, k - k1)))
    })
}

fn g(kind: ObjectiveKind, n: usize, positives: usize) -> f64 {
    f(kind, n, positives.min(n - positives))
}

#[test]
fn impurity_kinds_strictly_improve_on_ratio_changing_splits() {
    use ObjectiveKind::*;
    for kind in [Gini, SqrtGini, Entropy] {
        for n in 2..=60 {
            for k in 0..=n {
                for ((n1, k1), (n2, k2)) in splits(n, k) {
                    if k1 * n == k * n1 {
                        continue; // child ratio equals the parent's
                    }
                    assert!(
                        g(kind, n1, k1) + g(kind, n2, k2) < g(kind, n, k),
                        "{kind} ({n},{k}) -> ({n1},{k1}) ({n2},{k2})"
                    );
                }
            }
        }
    }
}

// The code-length and Bayes kinds are concave in the class ratio but carry a
// per-leaf term that grows with n, so some ratio-changing splits do not
// improve on the parent.
#[test]
fn length_kinds_have_non_improving_splits() {
    use ObjectiveKind::*;
    for kind in [MdlQuinlan, MdlMehta, Bayes] {
        let witness = (2..=20).any(|n| {
            (0..=n).any(|k| {
                splits(n, k).any(|((n1, k1), (n2, k2))| {
                    k1 * n != k * n1 && g(kind, n1, k1) + g(kind, n2, k2) >= g(kind, n, k) - 1e-9
                })
            })
        });
        assert!(witness, "{kind}");
    }
}

#[test]
fn accuracy_flat_when_ratios_below_half() {
    for n in 2..=40 {
        for k in 0..=n / 2 {
            for ((n1, k1), (n2, k2)) in splits(n, k) {
                if 2 * k1 <= n1 && 2 * k2 <= n2 {
                    assert_eq!(
                        g(ObjectiveKind::Accuracy, n1, k1) + g(ObjectiveKind::Accuracy, n2, k2),
                        g(ObjectiveKind::Accuracy, n, k)
                    );
                }
            }
        }
    }
}

#[test]
fn validating_entry_point() {
    let p = ObjectiveParams::default();
    assert!(leaf_value(ObjectiveKind::Gini, &p, LeafStats { n: 4, e: 3 }).is_err());
    assert!(close(
        leaf_value(ObjectiveKind::Gini, &p, LeafStats::new(8, 2).unwrap()).unwrap(),
        3.0,
        1e-12
    ));
    assert!(ObjectiveParams::new(1.5, 2.5, 2.5, 0.0).is_err());
    assert!(ObjectiveParams::new(0.25, 0.0, 2.5, 0.0).is_err());
    assert!(ObjectiveParams::new(0.25, 2.5, 2.5, -1.0).is_err());
}

proptest! {
    #[test]
    fn log_beta_symmetric(a in 0.01f64..50.0, b in 0.01f64..50.0) {
        let (x, y) = (log_beta(a, b).unwrap(), log_beta(b, a).unwrap());
        prop_assert!((x - y).abs() <= 1e-12 * x.abs().max(1.0));
    }

    #[test]
    fn values_finite_nonnegative(n in 1usize..5000, frac in 0.0f64..=0.5, kind_idx in 0..12usize) {
        let e = ((n as f64) * frac).floor() as usize;
        let v = f(ObjectiveKind::ALL[kind_idx], n, e.min(n / 2));
        prop_assert!(v.is_finite() && v >= 0.0);
    }
}
