use hardylab::diagnostics::hankel_kernel_norm;
use hardylab::lang::{lower, parse, Func, LoweringOptions, SymbolExpr};
use hardylab::operator::{finite_rank_norm, hankel_svd, identity_residual, spectral_norm, IdentityId, IdentityInputs};
use hardylab::symbol::multiply;
use hardylab::{CoeffVector, DiskPoint, Laurent, Symbol, WindowedOperator, C64};
use nalgebra::DMatrix;
use proptest::prelude::*;

fn complex() -> impl Strategy<Value = C64> {
    (-1.0..1.0f64, -1.0..1.0f64).prop_map(|(a, b)| C64::new(a, b))
}

fn laurent(max_degree: i64) -> impl Strategy<Value = Laurent> {
    (-max_degree..=0, prop::collection::vec(complex(), 1..(2 * max_degree as usize + 2)))
        .prop_map(|(lo, c)| Laurent::new(lo, c))
}

fn poly(max_degree: i64) -> impl Strategy<Value = Symbol> {
    laurent(max_degree).prop_map(Symbol::polynomial)
}

/// Polynomials, arcs and Möbius conjugates: exact, with every kind of tail.
fn symbol() -> impl Strategy<Value = Symbol> {
    prop_oneof![
        poly(6),
        (0.0..6.3f64, 0.05..6.2f64).prop_map(|(a, len)| Symbol::arc(a, a + len).unwrap()),
        (0.0..0.9f64, 0.0..6.3f64).prop_map(|(r, t)| Symbol::mobius(DiskPoint::polar(r, t).unwrap()).conj()),
    ]
}

fn point(max: f64) -> impl Strategy<Value = DiskPoint> {
    (0.0..max, 0.0..6.3f64).prop_map(|(r, t)| DiskPoint::polar(r, t).unwrap())
}

fn vector(n: usize) -> impl Strategy<Value = CoeffVector> {
    prop::collection::vec(complex(), n).prop_map(CoeffVector::exact)
}

fn max_diff(a: &[C64], b: &[C64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn conjugations_are_involutions_and_compose(f in symbol()) {
        // Closed-form carriers recompute reflected coefficients, so agreement is to rounding.
        let tol = 1e-15;
        let band = f.coeff_range(-40, 81);
        for g in [f.tilde().tilde(), f.star().star(), f.conj().conj()] {
            prop_assert!(max_diff(&g.coeff_range(-40, 81), &band) <= tol);
        }
        prop_assert!(max_diff(&f.star().tilde().coeff_range(-40, 81), &f.conj().coeff_range(-40, 81)) <= tol);
        for n in -20..=20 {
            prop_assert!((f.tilde().coeff(n) - f.coeff(-n)).norm() <= tol);
            prop_assert!((f.star().coeff(n) - f.coeff(n).conj()).norm() <= tol);
        }
    }

    #[test]
    fn adjoints_match_conjugate_symbols(f in symbol()) {
        let n = 24;
        let h = WindowedOperator::hankel(&f, n).unwrap().adjoint().matrix;
        let hs = WindowedOperator::hankel(&f.star(), n).unwrap().matrix;
        prop_assert!((h - hs).norm() < 1e-14);
        let t = WindowedOperator::toeplitz(&f, n).unwrap().adjoint().matrix;
        let tc = WindowedOperator::toeplitz(&f.conj(), n).unwrap().matrix;
        prop_assert!((t - tc).norm() < 1e-14);
    }

    #[test]
    fn fft_application_matches_dense(f in symbol(), v in vector(96), hankel in any::<bool>()) {
        let op = if hankel { WindowedOperator::hankel(&f, 96) } else { WindowedOperator::toeplitz(&f, 96) }.unwrap();
        let fast = op.fast_apply(&v).unwrap();
        let dense = op.apply_dense(&v).unwrap();
        prop_assert!(max_diff(&fast.entries, &dense.entries) < 1e-12);
    }

    #[test]
    fn hankel_norm_is_bounded_by_sup_norm(f in symbol(), n in 1usize..64) {
        let s = hankel_svd(&f, n).unwrap();
        prop_assert!(s.windows(2).all(|w| w[0] >= w[1]));
        prop_assert!(s[0] <= f.sup_norm_bound() * (1.0 + 1e-12) + 1e-12);
    }

    #[test]
    fn finite_rank_norm_matches_dense_sum(
        ls in prop::collection::vec(vector(10), 1..5),
        rs in prop::collection::vec(vector(10), 5),
    ) {
        let rs = &rs[..ls.len()];
        let mut dense = DMatrix::<C64>::zeros(10, 10);
        for (l, r) in ls.iter().zip(rs) {
            dense += WindowedOperator::rank_one(l, r, 10).matrix;
        }
        let expected = spectral_norm(&dense);
        prop_assert!((finite_rank_norm(&ls, rs) - expected).abs() <= 1e-12 * (1.0 + expected));
    }

    #[test]
    fn polynomial_product_is_convolution(p in laurent(5), q in laurent(5)) {
        let prod = multiply(&Symbol::polynomial(p.clone()), &Symbol::polynomial(q.clone())).unwrap();
        for n in -24..=24 {
            let direct: C64 = p.terms().map(|(k, c)| c * q.coeff(n - k)).sum();
            prop_assert!((prod.coeff(n) - direct).norm() < 1e-13);
        }
    }

    #[test]
    fn toeplitz_product_identity_holds(f in poly(4), g in poly(4), z in point(0.3)) {
        let r = identity_residual(IdentityId::P1, &IdentityInputs { f, g, z }, 32).unwrap();
        prop_assert!(r.certified && r.residual < 1e-12, "{r:?}");
    }

    #[test]
    fn kernel_norm_error_bars_overlap(f in symbol(), z in point(0.97)) {
        let coarse = hankel_kernel_norm(&f, z, 1e-6).unwrap();
        let fine = hankel_kernel_norm(&f, z, 1e-7).unwrap();
        let (a, b) = coarse.interval();
        let (c, d) = fine.interval();
        prop_assert!(a <= d + 1e-13 && c <= b + 1e-13, "{coarse:?} {fine:?}");
        prop_assert!(fine.error_bar <= coarse.error_bar * (1.0 + 1e-9) + 1e-15);
    }
}

fn expr() -> impl Strategy<Value = SymbolExpr> {
    let leaf = prop_oneof![
        (0u32..20).prop_map(|k| SymbolExpr::Num(k as f64 * 0.25)),
        Just(SymbolExpr::I),
        Just(SymbolExpr::Z),
        Just(SymbolExpr::Zbar),
    ];
    leaf.prop_recursive(4, 24, 2, |inner| {
        let b = |e: SymbolExpr| Box::new(e);
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(move |(x, y)| SymbolExpr::Add(b(x), b(y))),
            (inner.clone(), inner.clone()).prop_map(move |(x, y)| SymbolExpr::Sub(b(x), b(y))),
            (inner.clone(), inner.clone()).prop_map(move |(x, y)| SymbolExpr::Mul(b(x), b(y))),
            inner.clone().prop_map(move |x| SymbolExpr::Neg(b(x))),
            (inner.clone(), 0u32..3).prop_map(move |(x, k)| SymbolExpr::Pow(b(x), k)),
            (inner, prop_oneof![Just(Func::Conj), Just(Func::Tilde), Just(Func::Star)])
                .prop_map(|(x, f)| SymbolExpr::Call(f, vec![x])),
        ]
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn printed_expressions_lower_to_the_same_symbol(e in expr()) {
        let opts = LoweringOptions::default();
        let direct = lower(&e, &opts).unwrap();
        let text = e.to_string();
        let reparsed = lower(&parse(&text).unwrap(), &opts).unwrap();
        let (a, b) = (direct.coeff_range(-40, 81), reparsed.coeff_range(-40, 81));
        let scale = a.iter().map(|c| c.norm()).fold(1.0, f64::max);
        prop_assert!(max_diff(&a, &b) <= 1e-12 * scale, "{text}");
    }
}
