use std::f64::consts::PI;

use amo_core::operator::diagonal_entry;
use amo_core::{build_harper, eigen_sym, norm_rational, norm_real, CornerSign, Fraction, Twist};
use proptest::prelude::*;

fn fraction() -> impl Strategy<Value = Fraction> {
    (1u64..=40).prop_flat_map(|q| (0..=q).prop_map(move |p| Fraction::new(p, q).unwrap()))
}

fn twist() -> impl Strategy<Value = Twist> {
    (0.0f64..2.0 * PI, any::<bool>()).prop_map(|(phi, periodic)| Twist {
        phi,
        omega: if periodic {
            CornerSign::Periodic
        } else {
            CornerSign::Antiperiodic
        },
    })
}

#[test]
fn small_cases_by_hand() {
    // q = 1: single entry 2ω + λ cos φ
    let h = build_harper(
        Fraction::ZERO,
        3.0,
        Twist {
            phi: 0.0,
            omega: CornerSign::Antiperiodic,
        },
    );
    assert_eq!(h.spectrum().unwrap().eigenvalues, vec![1.0]);
    // q = 2, θ = 1/2, λ = 3: [[3, 2], [2, −3]] → ±√13
    let s = build_harper(Fraction::HALF, 3.0, Twist::TRIVIAL).spectrum().unwrap();
    assert!((s.norm - 13f64.sqrt()).abs() < 1e-14);
    // antiperiodic q = 2 cancels the hopping
    let s = build_harper(
        Fraction::HALF,
        3.0,
        Twist {
            phi: 0.0,
            omega: CornerSign::Antiperiodic,
        },
    )
    .spectrum()
    .unwrap();
    assert!((s.eigenvalues[0] + 3.0).abs() < 1e-14 && (s.eigenvalues[1] - 3.0).abs() < 1e-14);
}

#[test]
fn norm_at_zero_and_large_coupling() {
    assert_eq!(norm_rational(Fraction::ZERO, 2.0).unwrap(), 4.0);
    let n = norm_rational(Fraction::new(1, 7).unwrap(), 100.0).unwrap();
    assert!(n > 100.0 && n <= 102.0);
}

#[test]
fn real_theta_uses_convergents() {
    let golden = (5f64.sqrt() - 1.0) / 2.0;
    let (n, f) = norm_real(golden, 2.0, 89).unwrap();
    // θ is folded into [0, 1/2] first
    assert_eq!(f, Fraction::new(34, 89).unwrap());
    assert_eq!(n, norm_rational(f, 2.0).unwrap());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn matrix_is_symmetric_with_expected_entries(f in fraction(), l in -5.0f64..5.0, t in twist()) {
        let h = build_harper(f, l, t);
        let m = h.entries();
        let q = m.dim();
        for i in 0..q {
            for j in 0..q {
                prop_assert_eq!(m[(i, j)], m[(j, i)]);
            }
            // at q = 1 both hops land on the diagonal
            let hop = if q == 1 { 2.0 * t.omega.value() } else { 0.0 };
            let direct = l * (2.0 * PI * i as f64 * f.value() + t.phi).cos() + hop;
            prop_assert!((m[(i, i)] - direct).abs() < 1e-12);
            prop_assert!((m[(i, i)] - hop - diagonal_entry(f, l, t.phi, i as u64)).abs() < 1e-14);
        }
    }

    #[test]
    fn spectrum_matches_trace_invariants(f in fraction(), l in -5.0f64..5.0, t in twist()) {
        let h = build_harper(f, l, t);
        let ev = h.spectrum().unwrap().eigenvalues;
        let m = h.entries();
        let q = m.dim();
        let frob: f64 = (0..q).flat_map(|i| (0..q).map(move |j| (i, j))).map(|(i, j)| m[(i, j)].powi(2)).sum();
        let scale = 1.0 + frob;
        prop_assert!((ev.iter().sum::<f64>() - m.trace()).abs() < 1e-10 * scale);
        prop_assert!((ev.iter().map(|e| e * e).sum::<f64>() - frob).abs() < 1e-10 * scale);
        prop_assert!(ev.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn eigenvectors_are_orthonormal(f in fraction(), l in 0.0f64..4.0, t in twist()) {
        let m = build_harper(f, l, t).entries().clone();
        let pairs = eigen_sym(&m).unwrap();
        for (i, a) in pairs.iter().enumerate() {
            let hv = m.mul_vec(&a.vector);
            let res = hv.iter().zip(&a.vector).map(|(h, v)| (h - a.value * v).powi(2)).sum::<f64>().sqrt();
            prop_assert!(res < 1e-10);
            for b in &pairs[i..] {
                let dot: f64 = a.vector.iter().zip(&b.vector).map(|(x, y)| x * y).sum();
                let want = if std::ptr::eq(a, b) { 1.0 } else { 0.0 };
                prop_assert!((dot - want).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn norm_within_gershgorin(f in fraction(), l in -6.0f64..6.0) {
        let n = norm_rational(f, l).unwrap();
        prop_assert!(n <= 2.0 + l.abs() + 1e-12);
        prop_assert!(n >= 0.0);
    }

    #[test]
    fn norm_symmetries(f in fraction(), l in 0.0f64..5.0) {
        let n = norm_rational(f, l).unwrap();
        prop_assert!((n - norm_rational(f.reflect(), l).unwrap()).abs() < 1e-10);
        prop_assert!((n - norm_rational(f, -l).unwrap()).abs() < 1e-10);
    }

    #[test]
    fn norm_is_dual(f in fraction(), l in 0.1f64..10.0) {
        let n = norm_rational(f, l).unwrap();
        let dual = l / 2.0 * norm_rational(f, 4.0 / l).unwrap();
        prop_assert!((n - dual).abs() < 1e-9 * (1.0 + n), "{} vs {}", n, dual);
    }

    #[test]
    fn norm_dominates_every_twist(f in fraction(), l in 0.0f64..5.0, t in twist()) {
        let s = build_harper(f, l, t).spectrum().unwrap();
        prop_assert!(s.norm <= norm_rational(f, l).unwrap() + 1e-10);
    }
}
