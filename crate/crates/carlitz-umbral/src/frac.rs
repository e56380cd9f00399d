//! Internal factored-fraction engine: num / prod_i atom_i^{e_i} with the
//! denominator kept as a list of (polynomial, exponent) pairs instead of an
//! expanded product.
//!
//! The denominators that arise here (Carlitz factorials D_i, L_i and their
//! q-power twists) factor into sparse atoms, mostly the two-term brackets
//! [k] = x^{q^k} - x, while their expansions have astronomically many
//! terms. Keeping the factored form gives three exact shortcuts:
//!
//! - zero tests need no reduction at all (the fraction is zero iff its
//!   numerator is zero),
//! - the x-adic valuation is additive, so it reads off the unreduced form,
//! - conversion to a canonical `RatFn` peels atoms out of the numerator by
//!   exact division in p-power chunks, avoiding any large gcd.
//!
//! Identity verification throughout the crate is "subtract both sides as
//! `Frac`s and test the numerator against zero".

use crate::gf::FieldSpec;
use crate::poly::Poly;
use crate::ratfn::{RatFn, ValExp};
use crate::Result;
use std::collections::HashMap;

#[derive(Debug, Clone)]
pub(crate) struct Frac {
    num: Poly,
    den: Vec<(Poly, u64)>,
}

/// Memo for expansion work shared across the cells of a grid identity.
/// `memo` holds atom-power expansion factors, which recur whenever cells
/// share denominators; `expanded` holds whole rewritten numerators keyed
/// by (numerator, missing factors), which recur when the same term is
/// expanded over the same common denominator twice (the composition checks
/// revisit the rows that built the logarithm table).
#[derive(Default)]
pub(crate) struct PowCache {
    memo: HashMap<Poly, HashMap<u64, Poly>>,
    expanded: HashMap<(Poly, Vec<(Poly, u64)>), Poly>,
}

/// Products whose dense length reaches this bound go through the
/// `expanded` memo; smaller ones are cheaper to recompute than to store.
const EXPAND_MEMO_MIN: usize = 1 << 15;

impl PowCache {
    pub fn new() -> PowCache {
        PowCache::default()
    }

    pub fn pow(&mut self, base: &Poly, e: u64) -> Poly {
        if e == 0 {
            return Poly::one(*base.field());
        }
        if e == 1 {
            return base.clone();
        }
        if let Some(p) = self.memo.get(base).and_then(|m| m.get(&e)) {
            return p.clone();
        }
        let v = atom_pow(base, e);
        self.memo
            .entry(base.clone())
            .or_default()
            .insert(e, v.clone());
        v
    }
}

/// Product of the pieces, smallest pair first, so the running parts stay
/// as small as the factor sizes allow.
fn product_tree(field: FieldSpec, mut pieces: Vec<Poly>) -> Poly {
    if pieces.is_empty() {
        return Poly::one(field);
    }
    while pieces.len() > 1 {
        pieces.sort_by(|a, b| b.coeffs().len().cmp(&a.coeffs().len()));
        let a = pieces.pop().unwrap();
        let b = pieces.pop().unwrap();
        pieces.push(a.mul(&b));
    }
    pieces.pop().unwrap()
}

/// base^e expanded, multiplying p-power Frobenius images of the base so
/// sparse bases stay sparse as long as possible (Lucas-minimal term count).
pub(crate) fn atom_pow(base: &Poly, e: u64) -> Poly {
    let f = *base.field();
    let p = f.p() as u64;
    if e == 0 {
        return Poly::one(f);
    }
    let mut acc = Poly::one(f);
    let mut chunk = base.clone();
    let mut rest = e;
    while rest > 0 {
        let d = rest % p;
        for _ in 0..d {
            acc = acc.mul(&chunk);
        }
        rest /= p;
        if rest > 0 {
            chunk = chunk.frobenius_power(p);
        }
    }
    acc
}

impl Frac {
    pub fn from_poly(num: Poly) -> Frac {
        Frac {
            num,
            den: Vec::new(),
        }
    }

    pub fn zero(field: FieldSpec) -> Frac {
        Frac::from_poly(Poly::zero(field))
    }

    pub fn one(field: FieldSpec) -> Frac {
        Frac::from_poly(Poly::one(field))
    }

    /// num / prod base^e. Atoms must be nonzero; zero exponents are dropped.
    pub fn new(num: Poly, den: Vec<(Poly, u64)>) -> Frac {
        let mut f = Frac {
            num,
            den: Vec::new(),
        };
        for (base, e) in den {
            f.push_atom(base, e);
        }
        f
    }

    pub fn from_ratfn(r: &RatFn) -> Frac {
        let mut f = Frac::from_poly(r.num().clone());
        if !r.den().is_one() {
            f.push_atom(r.den().clone(), 1);
        }
        f
    }

    pub fn field(&self) -> &FieldSpec {
        self.num.field()
    }

    pub fn num(&self) -> &Poly {
        &self.num
    }

    /// Exact and complete: atoms are nonzero, so the value is zero iff the
    /// numerator is the zero polynomial. No reduction needed.
    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    fn push_atom(&mut self, base: Poly, e: u64) {
        assert!(!base.is_zero(), "zero atom in denominator");
        if e == 0 || base.is_one() {
            return;
        }
        for (b, exp) in &mut self.den {
            if *b == base {
                *exp += e;
                return;
            }
        }
        self.den.push((base, e));
    }

    pub fn neg(&self) -> Frac {
        Frac {
            num: self.num.neg(),
            den: self.den.clone(),
        }
    }

    pub fn scale(&self, c: crate::gf::FqElem) -> Frac {
        Frac {
            num: self.num.mul_scalar(c),
            den: self.den.clone(),
        }
    }

    /// Multiplicative inverse: the expanded denominator becomes the
    /// numerator, the old numerator a single atom (or a scalar factor).
    pub fn inverse(&self) -> Result<Frac> {
        let f = *self.field();
        if self.num.is_zero() {
            return Err(crate::Error::DivisionByZero);
        }
        let mut num = Poly::one(f);
        for (b, e) in &self.den {
            num = num.mul(&atom_pow(b, *e));
        }
        let mut out = Frac::from_poly(num);
        if self.num.is_constant() {
            out.num = out.num.mul_scalar(f.inv(self.num.coeff(0))?);
        } else {
            out.push_atom(self.num.clone(), 1);
        }
        Ok(out)
    }

    pub fn mul(&self, other: &Frac) -> Frac {
        let mut out = Frac {
            num: self.num.mul(&other.num),
            den: self.den.clone(),
        };
        for (b, e) in &other.den {
            out.push_atom(b.clone(), *e);
        }
        out
    }

    pub fn mul_poly(&self, p: &Poly) -> Frac {
        Frac {
            num: self.num.mul(p),
            den: self.den.clone(),
        }
    }

    pub fn div_atom(&self, base: &Poly, e: u64) -> Frac {
        let mut out = self.clone();
        out.push_atom(base.clone(), e);
        out
    }

    /// Raises to the q^m power: Frobenius on the numerator and on every
    /// atom base, exponents unchanged.
    pub fn frob(&self, m: u32) -> Result<Frac> {
        let q = self.field().q() as u64;
        let mut e: u64 = 1;
        for _ in 0..m {
            e = e
                .checked_mul(q)
                .ok_or(crate::Error::ExponentOverflow { k: m as u64 })?;
        }
        Ok(Frac {
            num: self.num.frobenius_power(e),
            den: self
                .den
                .iter()
                .map(|(b, ex)| (b.frobenius_power(e), *ex))
                .collect(),
        })
    }

    /// Common denominator of the terms: per-base maximum exponents.
    fn lcd_of(terms: &[Frac]) -> Vec<(Poly, u64)> {
        let mut lcd: Vec<(Poly, u64)> = Vec::new();
        for t in terms {
            for (b, e) in &t.den {
                match lcd.iter_mut().find(|(lb, _)| lb == b) {
                    Some((_, le)) => *le = (*le).max(*e),
                    None => lcd.push((b.clone(), *e)),
                }
            }
        }
        lcd
    }

    /// Numerator of this fraction rewritten over the given common
    /// denominator (a superset of its own atoms).
    fn expand_num(&self, lcd: &[(Poly, u64)], cache: &mut PowCache) -> Poly {
        let mut missing: Vec<(Poly, u64)> = Vec::new();
        for (b, le) in lcd {
            let have = self
                .den
                .iter()
                .find(|(tb, _)| tb == b)
                .map(|(_, e)| *e)
                .unwrap_or(0);
            if *le > have {
                missing.push((b.clone(), le - have));
            }
        }
        if missing.is_empty() {
            return self.num.clone();
        }
        let projected = self.num.coeffs().len()
            + missing
                .iter()
                .map(|(b, e)| (b.coeffs().len().saturating_sub(1)) * *e as usize)
                .sum::<usize>();
        let key = (self.num.clone(), missing);
        if projected >= EXPAND_MEMO_MIN {
            if let Some(p) = cache.expanded.get(&key) {
                return p.clone();
            }
        }
        let mut pieces = vec![key.0.clone()];
        for (b, e) in &key.1 {
            pieces.push(cache.pow(b, *e));
        }
        let part = product_tree(*self.field(), pieces);
        if projected >= EXPAND_MEMO_MIN {
            cache.expanded.insert(key, part.clone());
        }
        part
    }

    /// Sum over a common denominator built from the per-base maximum
    /// exponents. The result's denominator is the LCD in factored form.
    pub fn add_all(terms: &[Frac]) -> Frac {
        Frac::add_all_cached(terms, &mut PowCache::new())
    }

    /// add_all with the expansion factors memoized across calls.
    pub fn add_all_cached(terms: &[Frac], cache: &mut PowCache) -> Frac {
        assert!(!terms.is_empty());
        let f = *terms[0].field();
        let lcd = Frac::lcd_of(terms);
        let mut num = Poly::zero(f);
        for t in terms {
            num = num.add(&t.expand_num(&lcd, cache));
        }
        Frac { num, den: lcd }
    }

    /// Numerators of the terms over their common factored denominator,
    /// together with that denominator. Dropping the denominator is enough
    /// for zero tests of linear combinations of the row.
    pub fn normalize_row(terms: &[Frac], cache: &mut PowCache) -> (Vec<Poly>, Vec<(Poly, u64)>) {
        let lcd = Frac::lcd_of(terms);
        let nums = terms.iter().map(|t| t.expand_num(&lcd, cache)).collect();
        (nums, lcd)
    }

    pub fn add(&self, other: &Frac) -> Frac {
        Frac::add_all(&[self.clone(), other.clone()])
    }

    pub fn sub(&self, other: &Frac) -> Frac {
        self.add(&other.neg())
    }

    /// x-adic valuation, exact on the unreduced form by additivity.
    pub fn valuation(&self) -> ValExp {
        match self.num.ord() {
            None => ValExp::Infinite,
            Some(vn) => {
                let mut v = vn as i64;
                for (b, e) in &self.den {
                    v -= (b.ord().expect("nonzero atom") as i64) * (*e as i64);
                }
                ValExp::Finite(v)
            }
        }
    }

    /// Canonical rational function. Peels each atom out of the numerator by
    /// exact division in the largest possible p-power chunks (an atom's
    /// p^j-th power is its Frobenius image, so chunks stay sparse); whatever
    /// part of an atom power does not divide is expanded into the final
    /// denominator, and one last gcd handles mixed factors.
    pub fn to_ratfn(&self) -> Result<RatFn> {
        let f = *self.field();
        if self.num.is_zero() {
            return Ok(RatFn::zero(f));
        }
        let p = f.p() as u64;
        let mut num = self.num.clone();
        let mut leftovers: Vec<(Poly, u64)> = Vec::new();
        for (base, e) in &self.den {
            let mut rem = *e;
            'peel: while rem > 0 {
                // Largest p^j <= rem.
                let mut j = 0u32;
                let mut pj: u64 = 1;
                while pj.checked_mul(p).map_or(false, |n| n <= rem) {
                    pj *= p;
                    j += 1;
                }
                loop {
                    let chunk = base.frobenius_power(pj);
                    if let Ok(qt) = num.exact_div(&chunk) {
                        num = qt;
                        rem -= pj;
                        continue 'peel;
                    }
                    if j == 0 {
                        leftovers.push((base.clone(), rem));
                        break 'peel;
                    }
                    j -= 1;
                    pj /= p;
                }
            }
        }
        let mut den = Poly::one(f);
        for (base, e) in leftovers {
            den = den.mul(&atom_pow(&base, e));
        }
        RatFn::new(num, den)
    }
}
