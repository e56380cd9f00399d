//! Rational functions over F_q(x) in canonical form: monic denominator,
//! gcd(num, den) = 1, zero represented as 0/1. Canonicalization is eager,
//! which keeps equality a plain coefficient comparison and valuation O(deg).
//!
//! The x-adic valuation v is carried as an integer exponent (absolute
//! values are q^{-v}); `ValExp::Infinite` is v(0). No floating point
//! appears anywhere.

use crate::error::{Error, Result};
use crate::gf::{FieldSpec, FqElem};
use crate::poly::Poly;

/// Valuation exponent: finite integer or +infinity (for zero).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ValExp {
    Finite(i64),
    Infinite,
}

impl ValExp {
    pub fn finite(self) -> Option<i64> {
        match self {
            ValExp::Finite(v) => Some(v),
            ValExp::Infinite => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, ValExp::Infinite)
    }

    /// v(a*b) = v(a) + v(b).
    pub fn add(self, other: ValExp) -> ValExp {
        match (self, other) {
            (ValExp::Finite(a), ValExp::Finite(b)) => ValExp::Finite(a + b),
            _ => ValExp::Infinite,
        }
    }

    pub fn min(self, other: ValExp) -> ValExp {
        if self <= other {
            self
        } else {
            other
        }
    }
}

impl PartialOrd for ValExp {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ValExp {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        match (self, other) {
            (ValExp::Infinite, ValExp::Infinite) => std::cmp::Ordering::Equal,
            (ValExp::Infinite, _) => std::cmp::Ordering::Greater,
            (_, ValExp::Infinite) => std::cmp::Ordering::Less,
            (ValExp::Finite(a), ValExp::Finite(b)) => a.cmp(b),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RatFn {
    num: Poly,
    den: Poly,
}

impl RatFn {
    /// num/den, canonicalized. Errors if den = 0.
    pub fn new(num: Poly, den: Poly) -> Result<RatFn> {
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Self::reduce(num, den))
    }

    /// Canonicalize a fraction with a known-nonzero denominator.
    fn reduce(mut num: Poly, mut den: Poly) -> RatFn {
        let f = *num.field();
        if num.is_zero() {
            return RatFn {
                num,
                den: Poly::one(f),
            };
        }
        if !den.is_one() {
            // Common x-power first: cheap and frequent in this domain.
            let k = num.ord().unwrap().min(den.ord().unwrap());
            if k > 0 {
                num = num.exact_div(&Poly::x_pow(f, k)).unwrap();
                den = den.exact_div(&Poly::x_pow(f, k)).unwrap();
            }
            if !den.is_constant() && !num.is_constant() {
                let g = num.gcd(&den);
                if g.deg() != Some(0) {
                    num = num.exact_div(&g).unwrap();
                    den = den.exact_div(&g).unwrap();
                }
            }
        }
        // Monic denominator absorbs the unit into the numerator.
        let lc = den.lead_coeff().expect("den nonzero");
        if lc != f.one() {
            let inv = f.inv(lc).expect("nonzero lead");
            num = num.mul_scalar(inv);
            den = den.mul_scalar(inv);
        }
        RatFn { num, den }
    }

    pub fn from_poly(p: Poly) -> RatFn {
        let f = *p.field();
        RatFn {
            num: p,
            den: Poly::one(f),
        }
    }

    pub fn zero(field: FieldSpec) -> RatFn {
        RatFn::from_poly(Poly::zero(field))
    }

    pub fn one(field: FieldSpec) -> RatFn {
        RatFn::from_poly(Poly::one(field))
    }

    pub fn constant(field: FieldSpec, c: FqElem) -> RatFn {
        RatFn::from_poly(Poly::constant(field, c))
    }

    pub fn x(field: FieldSpec) -> RatFn {
        RatFn::from_poly(Poly::x(field))
    }

    pub fn field(&self) -> &FieldSpec {
        self.num.field()
    }

    pub fn num(&self) -> &Poly {
        &self.num
    }

    pub fn den(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }

    /// The underlying polynomial, when the denominator is 1.
    pub fn as_poly(&self) -> Option<&Poly> {
        if self.den.is_one() {
            Some(&self.num)
        } else {
            None
        }
    }

    pub fn add(&self, other: &RatFn) -> RatFn {
        let f = *self.field();
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        if self.den.is_one() || other.den.is_one() || self.den.gcd(&other.den).is_one() {
            // Coprime (or trivial) denominators: the sum is already reduced.
            let num = self
                .num
                .mul(&other.den)
                .add(&other.num.mul(&self.den));
            let den = self.den.mul(&other.den);
            return Self::reduce_coprime(f, num, den);
        }
        let num = self.num.mul(&other.den).add(&other.num.mul(&self.den));
        let den = self.den.mul(&other.den);
        Self::reduce(num, den)
    }

    /// Skip the gcd when coprimality is structural; still normalizes zero.
    fn reduce_coprime(f: FieldSpec, num: Poly, den: Poly) -> RatFn {
        if num.is_zero() {
            return RatFn::zero(f);
        }
        debug_assert!(num.gcd(&den).is_one());
        RatFn { num, den }
    }

    pub fn neg(&self) -> RatFn {
        RatFn {
            num: self.num.neg(),
            den: self.den.clone(),
        }
    }

    pub fn sub(&self, other: &RatFn) -> RatFn {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &RatFn) -> RatFn {
        let f = *self.field();
        if self.is_zero() || other.is_zero() {
            return RatFn::zero(f);
        }
        // Cross-reduce so the final fraction is canonical without a gcd on
        // the full products.
        let g1 = if other.den.is_one() {
            Poly::one(f)
        } else {
            self.num.gcd(&other.den)
        };
        let g2 = if self.den.is_one() {
            Poly::one(f)
        } else {
            other.num.gcd(&self.den)
        };
        let n1 = if g1.is_one() {
            self.num.clone()
        } else {
            self.num.exact_div(&g1).unwrap()
        };
        let d2 = if g1.is_one() {
            other.den.clone()
        } else {
            other.den.exact_div(&g1).unwrap()
        };
        let n2 = if g2.is_one() {
            other.num.clone()
        } else {
            other.num.exact_div(&g2).unwrap()
        };
        let d1 = if g2.is_one() {
            self.den.clone()
        } else {
            self.den.exact_div(&g2).unwrap()
        };
        let num = n1.mul(&n2);
        let den = d1.mul(&d2);
        // Units: den is monic except for the divided-out gcd leads.
        Self::reduce_units(num, den)
    }

    fn reduce_units(mut num: Poly, mut den: Poly) -> RatFn {
        let f = *num.field();
        if num.is_zero() {
            return RatFn::zero(f);
        }
        let lc = den.lead_coeff().expect("den nonzero");
        if lc != f.one() {
            let inv = f.inv(lc).expect("nonzero lead");
            num = num.mul_scalar(inv);
            den = den.mul_scalar(inv);
        }
        debug_assert!(num.gcd(&den).is_one());
        RatFn { num, den }
    }

    pub fn mul_poly(&self, p: &Poly) -> RatFn {
        self.mul(&RatFn::from_poly(p.clone()))
    }

    pub fn inv(&self) -> Result<RatFn> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        RatFn::new(self.den.clone(), self.num.clone())
    }

    pub fn div(&self, other: &RatFn) -> Result<RatFn> {
        Ok(self.mul(&other.inv()?))
    }

    /// Integer power; negative exponents invert first.
    pub fn pow(&self, e: i64) -> Result<RatFn> {
        if e < 0 {
            return self.inv()?.pow(-e);
        }
        Ok(RatFn {
            num: self.num.pow(e as u64),
            den: self.den.pow(e as u64),
        })
    }

    /// r^{q^k}: exponents scale by q^k, coefficients are fixed. Canonical
    /// form survives (gcd and monicity are preserved by q-powers).
    pub fn frobenius_power(&self, k: u32) -> Result<RatFn> {
        let q = self.field().q() as u64;
        let mut e: u64 = 1;
        for _ in 0..k {
            e = e
                .checked_mul(q)
                .ok_or(Error::ExponentOverflow { k: k as u64 })?;
        }
        Ok(RatFn {
            num: self.num.frobenius_power(e),
            den: self.den.frobenius_power(e),
        })
    }

    /// Inverse of `frobenius_power(1)` when it exists: every exponent with
    /// a nonzero coefficient must be divisible by q.
    pub fn qth_root(&self) -> Result<RatFn> {
        let q = self.field().q() as usize;
        let root = |p: &Poly| -> Result<Poly> {
            let f = *p.field();
            let mut out = vec![f.zero(); p.coeffs().len() / q + 1];
            for (e, c) in p.nonzero_terms() {
                if e % q != 0 {
                    return Err(Error::QthRootNotExist);
                }
                // c^q = c in F_q, so c is its own q-th root.
                out[e / q] = c;
            }
            Ok(Poly::from_coeffs(f, out))
        };
        Ok(RatFn {
            num: root(&self.num)?,
            den: root(&self.den)?,
        })
    }

    /// x-adic valuation: ord(num) - ord(den), +infinity for zero.
    pub fn valuation(&self) -> ValExp {
        match self.num.ord() {
            None => ValExp::Infinite,
            Some(vn) => {
                let vd = self.den.ord().expect("den nonzero");
                ValExp::Finite(vn as i64 - vd as i64)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(q: u64) -> FieldSpec {
        FieldSpec::from_q(q).unwrap()
    }

    fn poly(fs: FieldSpec, cs: &[u64]) -> Poly {
        Poly::from_coeffs(fs, cs.iter().map(|&c| fs.from_u64(c)).collect())
    }

    #[test]
    fn canonical_form() {
        let fs = f(5);
        // (2x) / (2x^2) = 1/x.
        let r = RatFn::new(poly(fs, &[0, 2]), poly(fs, &[0, 0, 2])).unwrap();
        assert_eq!(r.num(), &Poly::one(fs));
        assert_eq!(r.den(), &Poly::x(fs));
        // Zero normal form is 0/1 regardless of input denominator.
        let z = RatFn::new(Poly::zero(fs), poly(fs, &[1, 3, 1])).unwrap();
        assert!(z.is_zero());
        assert!(z.den().is_one());
        // gcd cancellation: (x^2-1)/(x-1) = x+1 over F_5.
        let r = RatFn::new(poly(fs, &[4, 0, 1]), poly(fs, &[4, 1])).unwrap();
        assert_eq!(r.as_poly().unwrap(), &poly(fs, &[1, 1]));
    }

    #[test]
    fn zero_denominator_rejected() {
        let fs = f(3);
        assert_eq!(
            RatFn::new(Poly::one(fs), Poly::zero(fs)),
            Err(Error::DivisionByZero)
        );
        let x = RatFn::x(fs);
        assert_eq!(RatFn::zero(fs).inv(), Err(Error::DivisionByZero));
        assert_eq!(x.div(&RatFn::zero(fs)), Err(Error::DivisionByZero));
    }

    #[test]
    fn field_axioms_seeded() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(42);
        for q in [2u64, 3, 4, 5] {
            let fs = f(q);
            let mut rand_ratfn = || loop {
                let num = Poly::from_coeffs(
                    fs,
                    (0..rng.gen_range(1..6))
                        .map(|_| fs.element_at(rng.gen_range(0..fs.q() as u64)))
                        .collect(),
                );
                let den = Poly::from_coeffs(
                    fs,
                    (0..rng.gen_range(1..4))
                        .map(|_| fs.element_at(rng.gen_range(0..fs.q() as u64)))
                        .collect(),
                );
                if !den.is_zero() {
                    return RatFn::new(num, den).unwrap();
                }
            };
            for _ in 0..40 {
                let a = rand_ratfn();
                let b = rand_ratfn();
                let c = rand_ratfn();
                assert_eq!(a.add(&b), b.add(&a));
                assert_eq!(a.mul(&b), b.mul(&a));
                assert_eq!(a.add(&b).add(&c), a.add(&b.add(&c)));
                assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
                assert_eq!(a.mul(&b.add(&c)), a.mul(&b).add(&a.mul(&c)));
                assert!(a.sub(&a).is_zero());
                if !a.is_zero() {
                    assert!(a.mul(&a.inv().unwrap()).is_one());
                }
            }
        }
    }

    #[test]
    fn valuations() {
        let fs = f(2);
        assert_eq!(RatFn::zero(fs).valuation(), ValExp::Infinite);
        // v(x^2 + x^3) = 2.
        let r = RatFn::from_poly(poly(fs, &[0, 0, 1, 1]));
        assert_eq!(r.valuation(), ValExp::Finite(2));
        // v((x^2+1)/x^5) = 2 - 5 = -3 over F_2... (x^2+1 = (x+1)^2 has ord 0).
        let r = RatFn::new(poly(fs, &[1, 0, 1]), Poly::x_pow(fs, 5)).unwrap();
        assert_eq!(r.valuation(), ValExp::Finite(-5));
        // Ultrametric: v(a+b) >= min(v(a), v(b)).
        let a = RatFn::new(poly(fs, &[0, 1]), poly(fs, &[1, 1])).unwrap();
        let b = RatFn::new(poly(fs, &[0, 0, 1]), poly(fs, &[1, 0, 1])).unwrap();
        assert!(a.add(&b).valuation() >= a.valuation().min(b.valuation()));
        assert_eq!(
            a.mul(&b).valuation(),
            a.valuation().add(b.valuation())
        );
    }

    #[test]
    fn valexp_ordering() {
        assert!(ValExp::Infinite > ValExp::Finite(1 << 40));
        assert!(ValExp::Finite(-3) < ValExp::Finite(0));
        assert_eq!(ValExp::Infinite.add(ValExp::Finite(5)), ValExp::Infinite);
        assert_eq!(ValExp::Finite(2).add(ValExp::Finite(-7)), ValExp::Finite(-5));
    }

    #[test]
    fn frobenius_power_and_qth_root() {
        let fs = f(3);
        let r = RatFn::new(poly(fs, &[1, 2]), poly(fs, &[0, 1, 1])).unwrap();
        let r3 = r.frobenius_power(1).unwrap();
        assert_eq!(r3, r.pow(3).unwrap());
        assert_eq!(r3.qth_root().unwrap(), r);
        // Valuation scales by q^k.
        assert_eq!(
            r.frobenius_power(2).unwrap().valuation(),
            ValExp::Finite(9 * r.valuation().finite().unwrap())
        );
        // x has exponent 1: no cube root.
        assert_eq!(RatFn::x(fs).qth_root(), Err(Error::QthRootNotExist));
    }

    #[test]
    fn negative_powers() {
        let fs = f(2);
        let x = RatFn::x(fs);
        let xm2 = x.pow(-2).unwrap();
        assert_eq!(xm2.den(), &Poly::x_pow(fs, 2));
        assert!(x.pow(-2).unwrap().mul(&x.pow(2).unwrap()).is_one());
        assert_eq!(RatFn::zero(fs).pow(-1), Err(Error::DivisionByZero));
    }
}
