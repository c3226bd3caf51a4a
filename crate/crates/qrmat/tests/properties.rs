use num_complex::Complex64 as C64;
use proptest::prelude::*;
use qrmat::cpotts::{boltzmann_from_json, boltzmann_to_json, export_boltzmann, import_boltzmann, r_semicyclic, CurveSpec, LambdaConvention};
use qrmat::linalg::{kron, max_abs, TensorOperator};
use qrmat::qnum::{qbinom, QParam};
use qrmat::raffine::{r_spectral, total_weight_diag, SpectralOptions};
use qrmat::repspace::{relation_residuals, truncated_verma};
use qrmat::rfinite::{r_verma_direct, triangularity_defect};

fn lambda() -> impl Strategy<Value = C64> {
    (0.1f64..2.0, -0.5f64..0.5).prop_map(|(re, im)| C64::new(re, im))
}

fn generic_q() -> impl Strategy<Value = QParam> {
    (1.05f64..1.6, -0.3f64..0.3).prop_map(|(re, im)| QParam::generic(C64::new(re, im)).unwrap())
}

fn any_q() -> impl Strategy<Value = QParam> {
    prop_oneof![generic_q(), (3u32..9).prop_map(|n| QParam::root_of_unity(n).unwrap())]
}

fn close(a: C64, b: C64, tol: f64) -> bool {
    (a - b).norm() <= tol * (1.0 + a.norm().max(b.norm()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn qbinom_symmetry(qp in any_q(), s in 0u32..14, k in 0u32..14) {
        let n = k.min(s);
        prop_assert!(close(qbinom(s, n, &qp).unwrap(), qbinom(s, s - n, &qp).unwrap(), 1e-10));
    }

    #[test]
    fn qbinom_pascal(qp in any_q(), s in 0u32..13, k in 1u32..14) {
        let n = k.min(s + 1);
        let lhs = qbinom(s + 1, n, &qp).unwrap();
        let a = if n <= s { qbinom(s, n, &qp).unwrap() } else { C64::new(0.0, 0.0) };
        let rhs = qp.powi(n as i64) * a + qp.powi(-((s + 1 - n) as i64)) * qbinom(s, n - 1, &qp).unwrap();
        prop_assert!(close(lhs, rhs, 1e-9), "{lhs} vs {rhs}");
    }

    #[test]
    fn verma_relations_hold(qp in any_q(), l in lambda(), depth in 1usize..6) {
        let rep = truncated_verma(l, depth, &qp).unwrap();
        prop_assert!(relation_residuals(&rep).max() < 1e-9);
    }

    #[test]
    fn finite_r_conserves_weight(qp in generic_q(), l1 in lambda(), l2 in lambda(), d1 in 1usize..5, d2 in 1usize..5) {
        let (a, b) = (truncated_verma(l1, d1, &qp).unwrap(), truncated_verma(l2, d2, &qp).unwrap());
        let r = r_verma_direct(&a, &b).unwrap();
        let w = total_weight_diag(&a, &b);
        for (idx, v) in r.matrix.iter().enumerate() {
            let (row, col) = (idx % r.matrix.nrows(), idx / r.matrix.nrows());
            if v.norm() > 1e-14 {
                prop_assert!((w[row] - w[col]).norm() < 1e-9);
            }
        }
        prop_assert!(triangularity_defect(&r) < 1e-12);
    }

    #[test]
    fn spectral_r_fixes_the_vacuum(qp in generic_q(), l1 in lambda(), l2 in lambda(), re in -0.6f64..0.6, im in -0.6f64..0.6) {
        let (a, b) = (truncated_verma(l1, 3, &qp).unwrap(), truncated_verma(l2, 3, &qp).unwrap());
        let r = r_spectral(C64::new(re, im), &a, &b, SpectralOptions::default()).unwrap();
        let col = r.matrix.column(0);
        prop_assert!((col[0] - 1.0).norm() < 1e-12);
        prop_assert!(col.iter().skip(1).all(|v| v.norm() < 1e-12));
    }

    #[test]
    fn kron_mixed_product(seed in any::<u64>()) {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let mut m = |r: usize, c: usize| qrmat::linalg::CMat::from_fn(r, c, |_, _| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
        let (a, b, c, d) = (m(2, 3), m(3, 2), m(2, 2), m(2, 3));
        let lhs = kron(&a, &c) * kron(&b, &d);
        let rhs = kron(&(&a * &b), &(&c * &d));
        prop_assert!(max_abs(&(lhs - rhs)) < 1e-12);
    }

    #[test]
    fn boltzmann_json_round_trip(l1 in lambda(), l2 in lambda(), a_re in -0.9f64..0.9, a_im in -0.9f64..0.9, k in 0i64..3) {
        let qp = QParam::root_of_unity(3).unwrap();
        let z = qp.powi(2 * k);
        let spec = CurveSpec::on_curve(3, z, l1, l2, C64::new(a_re, a_im), None, LambdaConvention::KPower).unwrap();
        let r = r_semicyclic(z, &spec.rep1().unwrap(), &spec.rep2().unwrap(), SpectralOptions::with_cartan()).unwrap();
        let doc = export_boltzmann(&r, &spec, None, None);
        let back = boltzmann_from_json(&boltzmann_to_json(&doc).unwrap()).unwrap();
        let op: TensorOperator = import_boltzmann(&back).unwrap();
        prop_assert_eq!(op, r);
    }
}
