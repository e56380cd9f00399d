//! Algebraic axioms as property tests: field laws for every supported
//! coefficient field, ring and Euclidean laws for polynomials, reduction
//! invariants for rational functions, the ultrametric valuation laws, the
//! parser round-trip, and the evaluation homomorphism into Laurent series.

use carlitz_umbral::laurent::ratfn_to_laurent;
use carlitz_umbral::parse::{fmt_poly, fmt_ratfn, parse_poly, parse_ratfn};
use carlitz_umbral::{FieldSpec, FqElem, LinPoly, Poly, RatFn};
use proptest::prelude::*;

const QS: [u64; 6] = [2, 3, 4, 5, 8, 9];

fn any_field() -> impl Strategy<Value = FieldSpec> {
    prop::sample::select(&QS[..]).prop_map(|q| FieldSpec::from_q(q).unwrap())
}

fn elems(fs: FieldSpec, n: usize) -> impl Strategy<Value = Vec<FqElem>> {
    prop::collection::vec(0u64..fs.q() as u64, n)
        .prop_map(move |v| v.into_iter().map(|i| fs.element_at(i)).collect())
}

fn poly(fs: FieldSpec, max_len: usize) -> impl Strategy<Value = Poly> {
    prop::collection::vec(0u64..fs.q() as u64, 0..max_len).prop_map(move |v| {
        Poly::from_coeffs(fs, v.into_iter().map(|i| fs.element_at(i)).collect())
    })
}

fn polys(n: usize, max_len: usize) -> impl Strategy<Value = (FieldSpec, Vec<Poly>)> {
    any_field().prop_flat_map(move |fs| {
        (Just(fs), prop::collection::vec(poly(fs, max_len), n))
    })
}

fn ratfn(fs: FieldSpec, max_len: usize) -> impl Strategy<Value = RatFn> {
    (poly(fs, max_len), poly(fs, max_len)).prop_map(move |(n, d)| {
        let d = if d.is_zero() { Poly::one(fs) } else { d };
        RatFn::new(n, d).expect("nonzero denominator")
    })
}

fn ratfns(n: usize, max_len: usize) -> impl Strategy<Value = (FieldSpec, Vec<RatFn>)> {
    any_field().prop_flat_map(move |fs| {
        (Just(fs), prop::collection::vec(ratfn(fs, max_len), n))
    })
}

proptest! {
    #[test]
    fn field_laws((fs, v) in any_field().prop_flat_map(|fs| (Just(fs), elems(fs, 3)))) {
        let (a, b, c) = (v[0], v[1], v[2]);
        prop_assert_eq!(fs.add(a, b), fs.add(b, a));
        prop_assert_eq!(fs.mul(a, b), fs.mul(b, a));
        prop_assert_eq!(fs.add(fs.add(a, b), c), fs.add(a, fs.add(b, c)));
        prop_assert_eq!(fs.mul(fs.mul(a, b), c), fs.mul(a, fs.mul(b, c)));
        prop_assert_eq!(fs.mul(a, fs.add(b, c)), fs.add(fs.mul(a, b), fs.mul(a, c)));
        prop_assert_eq!(fs.add(a, fs.zero()), a);
        prop_assert_eq!(fs.mul(a, fs.one()), a);
        prop_assert_eq!(fs.add(a, fs.neg(a)), fs.zero());
        if !fs.is_zero(a) {
            prop_assert_eq!(fs.mul(a, fs.inv(a).unwrap()), fs.one());
        }
        // Frobenius is additive in characteristic p.
        let p = fs.p() as u64;
        prop_assert_eq!(fs.pow(fs.add(a, b), p), fs.add(fs.pow(a, p), fs.pow(b, p)));
    }

    #[test]
    fn poly_ring_laws((fs, v) in polys(3, 10)) {
        let (a, b, c) = (&v[0], &v[1], &v[2]);
        prop_assert_eq!(a.add(b), b.add(a));
        prop_assert_eq!(a.mul(b), b.mul(a));
        prop_assert_eq!(a.add(b).add(c), a.add(&b.add(c)));
        prop_assert_eq!(a.mul(b).mul(c), a.mul(&b.mul(c)));
        prop_assert_eq!(a.mul(&b.add(c)), a.mul(b).add(&a.mul(c)));
        prop_assert_eq!(a.add(&a.neg()), Poly::zero(fs));
        prop_assert_eq!(a.mul(&Poly::one(fs)), a.clone());
    }

    #[test]
    fn poly_euclidean_division((_fs, v) in polys(2, 10)) {
        let (a, b) = (&v[0], &v[1]);
        prop_assume!(!b.is_zero());
        let (q, r) = a.divrem(b).unwrap();
        prop_assert_eq!(&q.mul(b).add(&r), a);
        if let Some(rd) = r.deg() {
            prop_assert!(rd < b.deg().unwrap());
        }
    }

    #[test]
    fn poly_gcd_divides_both((_fs, v) in polys(2, 8)) {
        let (a, b) = (&v[0], &v[1]);
        prop_assume!(!a.is_zero() || !b.is_zero());
        let g = a.gcd(b);
        prop_assert!(g.is_monic());
        if !a.is_zero() {
            prop_assert_eq!(a.exact_div(&g).unwrap().mul(&g), a.clone());
        }
        if !b.is_zero() {
            prop_assert_eq!(b.exact_div(&g).unwrap().mul(&g), b.clone());
        }
    }

    #[test]
    fn poly_frobenius_is_a_ring_map((fs, v) in polys(2, 6)) {
        let (a, b) = (&v[0], &v[1]);
        let p = fs.p() as u64;
        let q = fs.q() as u64;
        prop_assert_eq!(a.frobenius_power(q), a.pow(q));
        prop_assert_eq!(
            a.add(b).frobenius_power(p),
            a.frobenius_power(p).add(&b.frobenius_power(p))
        );
        prop_assert_eq!(
            a.mul(b).frobenius_power(q * q),
            a.frobenius_power(q * q).mul(&b.frobenius_power(q * q))
        );
    }

    #[test]
    fn poly_parse_roundtrip((fs, v) in polys(1, 12)) {
        let p = &v[0];
        prop_assert_eq!(&parse_poly(fs, &fmt_poly(p)).unwrap(), p);
    }

    #[test]
    fn ratfn_field_laws((fs, v) in ratfns(3, 5)) {
        let (a, b, c) = (&v[0], &v[1], &v[2]);
        prop_assert_eq!(a.add(b), b.add(a));
        prop_assert_eq!(a.mul(b), b.mul(a));
        prop_assert_eq!(a.add(b).add(c), a.add(&b.add(c)));
        prop_assert_eq!(a.mul(b).mul(c), a.mul(&b.mul(c)));
        prop_assert_eq!(a.mul(&b.add(c)), a.mul(b).add(&a.mul(c)));
        prop_assert_eq!(a.sub(a), RatFn::zero(fs));
        if !a.is_zero() {
            prop_assert_eq!(a.mul(&a.inv().unwrap()), RatFn::one(fs));
        }
    }

    #[test]
    fn ratfn_is_stored_reduced((_fs, v) in ratfns(2, 6)) {
        let r = &v[0].mul(&v[1]);
        prop_assert!(r.den().is_monic());
        prop_assert!(r.num().gcd(r.den()).is_one());
    }

    #[test]
    fn ratfn_parse_roundtrip((fs, v) in ratfns(1, 8)) {
        let r = &v[0];
        prop_assert_eq!(&parse_ratfn(fs, &fmt_ratfn(r)).unwrap(), r);
    }

    #[test]
    fn valuation_is_ultrametric((_fs, v) in ratfns(2, 6)) {
        let (a, b) = (&v[0], &v[1]);
        // v(ab) = v(a) + v(b), with infinity absorbing.
        let va = a.valuation().finite();
        let vb = b.valuation().finite();
        let vab = a.mul(b).valuation().finite();
        prop_assert_eq!(vab, va.zip(vb).map(|(x, y)| x + y));
        // v(a + b) >= min(v(a), v(b)), with equality when they differ.
        let vsum = a.add(b).valuation().finite();
        match (va, vb) {
            (Some(x), Some(y)) => {
                let m = x.min(y);
                prop_assert!(vsum.map_or(true, |s| s >= m));
                if x != y {
                    prop_assert_eq!(vsum, Some(m));
                }
            }
            (Some(x), None) => prop_assert_eq!(vsum, Some(x)),
            (None, Some(y)) => prop_assert_eq!(vsum, Some(y)),
            (None, None) => prop_assert_eq!(vsum, None),
        }
    }

    #[test]
    fn laurent_embedding_is_a_ring_map((_fs, v) in ratfns(2, 5)) {
        let (a, b) = (&v[0], &v[1]);
        let (la, lb) = (ratfn_to_laurent(a, 24), ratfn_to_laurent(b, 24));
        prop_assert!(ratfn_to_laurent(&a.add(b), 24).agrees_with(&la.add(&lb)));
        prop_assert!(ratfn_to_laurent(&a.mul(b), 24).agrees_with(&la.mul(&lb)));
        // The embedding preserves the valuation whenever it is visible.
        if let Some(va) = a.valuation().finite() {
            if va < la.precision() {
                prop_assert_eq!(la.valuation(), Some(va));
            }
        }
    }

    #[test]
    fn linear_polynomials_are_additive(
        ((fs, v), at) in ratfns(4, 3).prop_flat_map(|(fs, v)| ((Just(fs), Just(v)), elems(fs, 1)))
    ) {
        let u = LinPoly::from_coeffs(fs, v[..2].to_vec());
        let w = LinPoly::from_coeffs(fs, v[2..].to_vec());
        let (s, t) = (&RatFn::x(fs), &RatFn::constant(fs, at[0]).add(&RatFn::one(fs)));
        // F_q-linearity of evaluation: u(s + t) = u(s) + u(t), u(c s) = c u(s).
        prop_assert_eq!(
            u.eval(&s.add(t)).unwrap(),
            u.eval(s).unwrap().add(&u.eval(t).unwrap())
        );
        let c = RatFn::constant(fs, at[0]);
        prop_assert_eq!(
            u.eval(&c.mul(s)).unwrap(),
            c.mul(&u.eval(s).unwrap())
        );
        // Composition realizes evaluation: (u o w)(s) = u(w(s)).
        let uw = u.compose(&w).unwrap();
        prop_assert_eq!(uw.eval(s).unwrap(), u.eval(&w.eval(s).unwrap()).unwrap());
    }
}
