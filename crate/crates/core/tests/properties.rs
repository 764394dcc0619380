use pndil::generators::{random_candidate, random_polynomial};
use pndil::hardy::{mult_symbol, mult_symbol_adjoint, mult_z, mult_z_adjoint, HardyElement, IndexBox, SymbolSeries};
use pndil::matcore::{operator_norm, poly_roots, psd_sqrt, CMatrix, C64};
use pndil::tuples::{make_tuple, szego_defect, OperatorTuple};
use pndil::vonneumann::{vn_check_with, TorusSamples};
use pndil::{MultiPoly, Tolerances};
use proptest::prelude::*;

fn complex() -> impl Strategy<Value = C64> {
    (-1.0..1.0f64, -1.0..1.0f64).prop_map(|(a, b)| C64::new(a, b))
}

fn matrix(n: usize) -> impl Strategy<Value = CMatrix> {
    prop::collection::vec(complex(), n * n).prop_map(move |v| CMatrix::from_vec(n, n, v).unwrap())
}

fn element(grid: IndexBox, dim: usize) -> impl Strategy<Value = HardyElement> {
    prop::collection::vec(complex(), grid.len() * dim).prop_map(move |v| {
        let mut f = HardyElement::zeros(grid, dim);
        for l in 0..grid.len() {
            f.coeff_mut(l).copy_from_slice(&v[l * dim..(l + 1) * dim]);
        }
        f
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn psd_sqrt_squares_back(a in matrix(4)) {
        let p = a.matmul(&a.adjoint());
        let s = psd_sqrt(&p, 1e-9).unwrap();
        prop_assert!((&s.matmul(&s) - &p).max_abs() <= 1e-10 * (1.0 + p.max_abs()));
        prop_assert!(s.hermitian_defect() <= 1e-12);
    }

    #[test]
    fn operator_norm_is_submultiplicative(a in matrix(3), b in matrix(3)) {
        let lhs = operator_norm(&a.matmul(&b));
        prop_assert!(lhs <= operator_norm(&a) * operator_norm(&b) * (1.0 + 1e-12) + 1e-14);
        prop_assert!(operator_norm(&a) <= a.frobenius_norm() * (1.0 + 1e-12));
        prop_assert!(a.frobenius_norm() <= 3f64.sqrt() * operator_norm(&a) * (1.0 + 1e-12) + 1e-14);
    }

    #[test]
    fn roots_scale_with_the_variable(
        roots in prop::collection::vec(complex(), 2..5),
        s in 0.5..2.0f64,
    ) {
        let expand = |rs: &[C64]| {
            let mut c = vec![C64::new(1.0, 0.0)];
            for &r in rs {
                let mut next = vec![C64::new(0.0, 0.0); c.len() + 1];
                for (i, &a) in c.iter().enumerate() {
                    next[i + 1] += a;
                    next[i] -= a * r;
                }
                c = next;
            }
            c
        };
        let scaled: Vec<C64> = roots.iter().map(|r| r * s).collect();
        let a = poly_roots(&expand(&roots)).unwrap();
        let b = poly_roots(&expand(&scaled)).unwrap();
        // Clustered roots are ill-conditioned individually; compare their
        // symmetric functions.
        let pa: C64 = a.iter().map(|r| r * s).product();
        let pb: C64 = b.iter().product();
        prop_assert!((pa - pb).norm() <= 1e-8 * (1.0 + pa.norm()));
        let sa: C64 = a.iter().map(|r| r * s).sum();
        let sb: C64 = b.iter().sum();
        prop_assert!((sa - sb).norm() <= 1e-8 * (1.0 + sa.norm()));
    }

    #[test]
    fn szego_defect_ignores_order(seed in 0u64..500, n in 2usize..5) {
        let t = random_candidate(seed, 3, n, 0.05).unwrap();
        let mut ops = t.ops().to_vec();
        ops.rotate_left(1);
        ops.swap(0, n - 1);
        let permuted = make_tuple(ops, 1e-10, 1e-10).unwrap();
        prop_assert!((&szego_defect(&t) - &szego_defect(&permuted)).max_abs() <= 1e-12);
    }

    #[test]
    fn shift_adjoint_pairing(
        f in element(IndexBox::new(2, 3), 2),
        g in element(IndexBox::new(2, 3), 2),
        i in 1usize..3,
    ) {
        let lhs = mult_z(i, &f).inner(&g);
        let rhs = f.inner(&mult_z_adjoint(i, &g));
        prop_assert!((lhs - rhs).norm() <= 1e-12);
    }

    #[test]
    fn symbol_adjoint_pairing(
        f in element(IndexBox::new(2, 2), 2),
        g in element(IndexBox::new(2, 2), 3),
        cs in prop::collection::vec(matrix(3), 9),
    ) {
        let grid = IndexBox::new(2, 2);
        let coeffs: Vec<CMatrix> = cs.iter().map(|c| c.block(0, 3, 0, 2)).collect();
        let s = SymbolSeries::new(grid, coeffs).unwrap();
        let lhs = mult_symbol(&s, &f).unwrap().inner(&g);
        let rhs = f.inner(&mult_symbol_adjoint(&s, &g).unwrap());
        prop_assert!((lhs - rhs).norm() <= 1e-12);
    }

    #[test]
    fn polynomial_display_round_trips(seed in 0u64..10_000, nvars in 1usize..4, degree in 0usize..4) {
        let p = random_polynomial(seed, nvars, degree);
        let back = MultiPoly::parse_with_arity(&p.to_string(), nvars).unwrap();
        prop_assert_eq!(back, p);
    }
}

fn pure_triple(seed: u64) -> (OperatorTuple, pndil::PnCertificate) {
    let t = random_candidate(seed, 3, 3, 0.6).unwrap();
    let id = CMatrix::identity(3);
    let tn = t.last();
    let g1 = &id - &tn.matmul(&tn.adjoint());
    let cert = pndil::verify_pn(&t, vec![g1, CMatrix::zeros(3, 3)], 1e-8);
    (t, cert.expect("operators of norm 0.4 admit the trivial splitting"))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn von_neumann_margin_is_nonnegative(seed in 0u64..1000, pseed in 0u64..1000) {
        let (t, cert) = pure_triple(seed);
        let built = pndil::realization::build_generating_unitary(&t, &cert, 1e-8).unwrap();
        let samples = TorusSamples::new(&built.realization, 32, 3);
        let p = random_polynomial(pseed, 3, 3);
        let rep = vn_check_with(&p, &t, &samples, 0, &Tolerances::default()).unwrap();
        prop_assert!(rep.margin >= -1e-7, "margin {}", rep.margin);
    }
}
