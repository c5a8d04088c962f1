use local_product::document::InstanceDocument;
use local_product::local_product::local_product_direct;
use local_product::quadrature::{integrate_box, mc_integrate, Kernel};
use local_product::sheet::{sheet_phase_eval, Sheet};
use local_product::space::{box_from_pair, lp_point_norm, unit_phase_e};
use local_product::theorems::{report, CheckOptions, TheoremId, Verdict};
use local_product::{ComplexScalar, LocalProductInstance, Pairing, QuadratureConfig, RealVector};
use proptest::prelude::*;

fn vec_pair(n: std::ops::RangeInclusive<usize>, lo: f64, hi: f64) -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
    n.prop_flat_map(move |n| (prop::collection::vec(lo..hi, n), prop::collection::vec(lo..hi, n)))
}

fn rv(x: &[f64]) -> RealVector {
    RealVector::new(x.to_vec()).unwrap()
}

fn close(x: ComplexScalar, y: ComplexScalar, rel: f64) -> bool {
    (x - y).norm() <= rel * x.norm().max(y.norm()).max(1e-300)
}

proptest! {
    #[test]
    fn dot_pairing_is_symmetric((a, b) in vec_pair(1..=6, -5.0, 5.0)) {
        let (a, b) = (rv(&a), rv(&b));
        let p = Pairing::DotProduct;
        prop_assert_eq!(p.eval(&a, &b).unwrap(), p.eval(&b, &a).unwrap());
    }

    #[test]
    fn symplectic_pairing_is_antisymmetric((a, b) in vec_pair(2..=2, -5.0, 5.0)) {
        let (a, b) = (rv(&a), rv(&b));
        let p = Pairing::Symplectic2D;
        prop_assert_eq!(p.eval(&a, &b).unwrap(), -p.eval(&b, &a).unwrap());
        prop_assert_eq!(p.eval(&a, &a).unwrap(), 0.0);
    }

    #[test]
    fn box_ignores_component_signs((a, b) in vec_pair(1..=5, -3.0, 3.0)) {
        let (a, b) = (rv(&a), rv(&b));
        prop_assert_eq!(box_from_pair(&a, &b).unwrap(), box_from_pair(&a.abs(), &b.abs()).unwrap());
    }

    #[test]
    fn swapping_endpoints_flips_volume_by_parity((a, b) in vec_pair(1..=5, -3.0, 3.0)) {
        let (a, b) = (rv(&a), rv(&b));
        let v = box_from_pair(&a, &b).unwrap().signed_volume();
        let w = box_from_pair(&b, &a).unwrap().signed_volume();
        let sign = if a.dim() % 2 == 0 { 1.0 } else { -1.0 };
        prop_assert_eq!(w, sign * v);
    }

    #[test]
    fn unit_phase_has_modulus_one(r in -1e6f64..1e6) {
        let z = unit_phase_e(ComplexScalar::new(r, 0.0)).unwrap();
        prop_assert!((z.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn lp_norm_bounds(x in prop::collection::vec(0.0f64..10.0, 1..=6), k in 1u32..=12) {
        let m = x.iter().cloned().fold(0.0, f64::max);
        let v = lp_point_norm(&x, k).unwrap();
        prop_assert!(v >= m * (1.0 - 1e-14));
        prop_assert!(v <= m * (x.len() as f64).powf(1.0 / k as f64) * (1.0 + 1e-14));
    }

    #[test]
    fn inverse_sheets_multiply_to_one(k in 1u32..=12, r in 0.01f64..3.0) {
        let one = ComplexScalar::new(1.0, 0.0);
        let id = sheet_phase_eval(Sheet::Identity, k, r);
        let recip = sheet_phase_eval(Sheet::Reciprocal, k, r);
        if let (Ok(x), Ok(y)) = (id, recip) {
            prop_assert!(close(x * y, one, 1e-12));
        }
        let l = sheet_phase_eval(Sheet::Log, k, r).unwrap();
        let rl = sheet_phase_eval(Sheet::ReciprocalLog, k, r).unwrap();
        prop_assert!(close(l * rl, one, 1e-12));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn integral_is_invariant_under_dimension_permutation(
        (a, b) in vec_pair(3..=3, 0.1, 2.0),
        k in 1u32..=8,
        perm in Just(vec![0usize, 1, 2]).prop_shuffle(),
    ) {
        let d = box_from_pair(&rv(&a), &rv(&b)).unwrap();
        let cfg = QuadratureConfig::default();
        let x = integrate_box(&Kernel::LpNorm(k), &d, &cfg).unwrap().value;
        let y = integrate_box(&Kernel::LpNorm(k), &d.permuted(&perm).unwrap(), &cfg).unwrap().value;
        prop_assert!(close(x, y, 1e-9));
        let m = Kernel::Monomial(vec![1, 2, 3]);
        let x = integrate_box(&m, &d, &cfg).unwrap().value;
        let y = integrate_box(&m.permuted(&perm), &d.permuted(&perm).unwrap(), &cfg).unwrap().value;
        prop_assert!(close(x, y, 1e-12));
    }

    #[test]
    fn local_product_invariant_under_permutation_and_paired_sign_flips(
        (a, b) in vec_pair(2..=3, 0.3, 2.0),
        k in 4u32..=8,
        flip in 0usize..3,
        sheet in prop::sample::select(vec![Sheet::Constant(1.0), Sheet::Log, Sheet::Identity, Sheet::AbsoluteValue]),
    ) {
        let cfg = QuadratureConfig::default();
        let inst = LocalProductInstance::new(rv(&a), rv(&b), k, sheet);
        let base = match local_product_direct(&inst, &cfg) {
            Ok(v) => v.value,
            Err(_) => return Ok(()),
        };
        let mut ra = a.clone();
        let mut rb = b.clone();
        ra.reverse();
        rb.reverse();
        let perm = local_product_direct(&LocalProductInstance::new(rv(&ra), rv(&rb), k, sheet), &cfg).unwrap().value;
        prop_assert!(close(base, perm, 1e-9), "{base} vs {perm}");
        let j = flip % a.len();
        let mut fa = a.clone();
        let mut fb = b.clone();
        fa[j] = -fa[j];
        fb[j] = -fb[j];
        let flipped = local_product_direct(&LocalProductInstance::new(rv(&fa), rv(&fb), k, sheet), &cfg).unwrap().value;
        prop_assert!(close(base, flipped, 1e-9), "{base} vs {flipped}");
    }

    #[test]
    fn app2_lhs_scales_with_box(
        (a, b) in vec_pair(1..=3, 0.2, 2.0),
        s in 1u32..=2,
        t in 0.5f64..2.0,
    ) {
        let (a, b) = (rv(&a), rv(&b));
        let p: f64 = a.as_slice().iter().zip(b.as_slice()).map(|(x, y)| x * y).sum();
        let q = p * t * t;
        prop_assume!((p - 1.0).abs() > 1e-3 && (q - 1.0).abs() > 1e-3);
        let cfg = QuadratureConfig::default();
        let opts = CheckOptions::default();
        let r = report(TheoremId::App2, &a, &b, s, &cfg, opts).unwrap();
        let rt = report(TheoremId::App2, &a.scaled(t).unwrap(), &b.scaled(t).unwrap(), s, &cfg, opts).unwrap();
        let expected = r.lhs * t.powi(a.dim() as i32 + 1);
        prop_assert!((rt.lhs - expected).abs() <= 1e-8 * expected.max(1e-300));
    }

    #[test]
    fn verdict_stable_under_doubled_effort(
        (a, b) in vec_pair(1..=3, 0.1, 2.0),
        s in 1u32..=2,
        theorem in prop::sample::select(vec![TheoremId::App2, TheoremId::App3]),
    ) {
        let (a, b) = (rv(&a), rv(&b));
        let cfg = QuadratureConfig::default();
        let opts = CheckOptions::default();
        let Ok(r) = report(theorem, &a, &b, s, &cfg, opts) else { return Ok(()) };
        prop_assume!(r.verdict != Verdict::Inconclusive);
        let r2 = report(theorem, &a, &b, s, &cfg.doubled(), opts).unwrap();
        prop_assert_eq!(r.verdict, r2.verdict);
    }

    #[test]
    fn instance_document_round_trips(
        (a, b) in vec_pair(1..=4, -10.0, 10.0),
        k in 1u32..=16,
        sheet in prop::sample::select(vec!["const", "id", "recip", "log", "reciplog", "abs", "const:2.5"]),
        nodes in 2usize..64,
    ) {
        let text = serde_json::json!({
            "a": a, "b": b, "k": k, "sheet": sheet, "quadrature": {"method": "gl", "nodes": nodes}
        }).to_string();
        let doc = InstanceDocument::parse(&text).unwrap();
        let again = InstanceDocument::parse(&doc.to_json()).unwrap();
        prop_assert_eq!(&doc, &again);
        prop_assert_eq!(doc.local_product_instance().unwrap(), again.local_product_instance().unwrap());
        prop_assert_eq!(doc.a, a);
    }
}

/// Monte Carlo lands within 3 standard errors of a converged GL value in at
/// least 95 of 100 seeds.
#[test]
fn monte_carlo_is_consistent_with_gauss_legendre() {
    let d = box_from_pair(&rv(&[0.2, 0.5, 0.1]), &rv(&[1.5, 1.0, 2.0])).unwrap();
    let kernel = Kernel::LpNorm(4);
    let exact = integrate_box(&kernel, &d, &QuadratureConfig::default()).unwrap().value.re;
    let hits = (0..100u64)
        .filter(|&seed| {
            let r = mc_integrate(&kernel, &d, 4000, seed).unwrap();
            (r.value.re - exact).abs() <= 3.0 * r.error_estimate
        })
        .count();
    assert!(hits >= 95, "{hits}/100");
}
