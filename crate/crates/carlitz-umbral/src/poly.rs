//! Dense polynomials over F_q.
//!
//! Coefficients are stored low-to-high with no trailing zeros, so
//! `deg(0)` is a distinguished sentinel (`None`) rather than -1 and the
//! x-adic order of a nonzero polynomial is the index of its first nonzero
//! coefficient. The representation is dense, but the inner loops of
//! multiplication and division walk precomputed nonzero-term lists:
//! products against the near-binomial factors that dominate this domain
//! (x^{q^k} - x and its characteristic powers) cost O(deg), and exact
//! division by a sparse divisor costs O(quotient terms * divisor terms).
//! Large dense-dense products switch to Karatsuba.

use crate::error::{Error, Result};
use crate::gf::{FieldSpec, FqElem};
use crate::ratfn::RatFn;

const KARATSUBA_BASE: usize = 32;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Poly {
    field: FieldSpec,
    coeffs: Vec<FqElem>,
}

impl Poly {
    pub fn zero(field: FieldSpec) -> Poly {
        Poly {
            field,
            coeffs: Vec::new(),
        }
    }

    pub fn one(field: FieldSpec) -> Poly {
        Poly::constant(field, field.one())
    }

    pub fn constant(field: FieldSpec, c: FqElem) -> Poly {
        let coeffs = if field.is_zero(c) { vec![] } else { vec![c] };
        Poly { field, coeffs }
    }

    pub fn x(field: FieldSpec) -> Poly {
        Poly::monomial(field, 1, field.one())
    }

    pub fn x_pow(field: FieldSpec, e: usize) -> Poly {
        Poly::monomial(field, e, field.one())
    }

    pub fn monomial(field: FieldSpec, e: usize, c: FqElem) -> Poly {
        if field.is_zero(c) {
            return Poly::zero(field);
        }
        let mut coeffs = vec![field.zero(); e + 1];
        coeffs[e] = c;
        Poly { field, coeffs }
    }

    /// Low-to-high coefficients; trailing zeros are trimmed.
    pub fn from_coeffs(field: FieldSpec, coeffs: Vec<FqElem>) -> Poly {
        let mut p = Poly { field, coeffs };
        p.trim();
        p
    }

    fn trim(&mut self) {
        while let Some(&last) = self.coeffs.last() {
            if self.field.is_zero(last) {
                self.coeffs.pop();
            } else {
                break;
            }
        }
    }

    pub fn field(&self) -> &FieldSpec {
        &self.field
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0] == self.field.one()
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    /// Degree; `None` is the -infinity sentinel of the zero polynomial.
    pub fn deg(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// x-adic order: index of the first nonzero coefficient.
    pub fn ord(&self) -> Option<usize> {
        self.coeffs.iter().position(|&c| !self.field.is_zero(c))
    }

    pub fn coeff(&self, i: usize) -> FqElem {
        self.coeffs.get(i).copied().unwrap_or_else(|| self.field.zero())
    }

    pub fn coeffs(&self) -> &[FqElem] {
        &self.coeffs
    }

    pub fn lead_coeff(&self) -> Option<FqElem> {
        self.coeffs.last().copied()
    }

    pub fn is_monic(&self) -> bool {
        self.lead_coeff() == Some(self.field.one())
    }

    pub fn nonzero_terms(&self) -> Vec<(usize, FqElem)> {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !self.field.is_zero(**c))
            .map(|(e, &c)| (e, c))
            .collect()
    }

    pub fn term_count(&self) -> usize {
        self.coeffs
            .iter()
            .filter(|c| !self.field.is_zero(**c))
            .count()
    }

    pub fn add(&self, other: &Poly) -> Poly {
        assert_eq!(self.field, other.field, "mixed fields");
        let f = self.field;
        let (long, short) = if self.coeffs.len() >= other.coeffs.len() {
            (self, other)
        } else {
            (other, self)
        };
        let mut coeffs = long.coeffs.clone();
        for (i, &c) in short.coeffs.iter().enumerate() {
            coeffs[i] = f.add(coeffs[i], c);
        }
        Poly::from_coeffs(f, coeffs)
    }

    pub fn neg(&self) -> Poly {
        let f = self.field;
        Poly {
            field: f,
            coeffs: self.coeffs.iter().map(|&c| f.neg(c)).collect(),
        }
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.neg())
    }

    pub fn mul_scalar(&self, c: FqElem) -> Poly {
        let f = self.field;
        if f.is_zero(c) {
            return Poly::zero(f);
        }
        Poly {
            field: f,
            coeffs: self.coeffs.iter().map(|&a| f.mul(a, c)).collect(),
        }
    }

    /// Multiply by c * x^e.
    pub fn mul_monomial(&self, e: usize, c: FqElem) -> Poly {
        let f = self.field;
        if f.is_zero(c) || self.is_zero() {
            return Poly::zero(f);
        }
        let mut coeffs = vec![f.zero(); self.coeffs.len() + e];
        for (i, &a) in self.coeffs.iter().enumerate() {
            coeffs[e + i] = f.mul(a, c);
        }
        Poly { field: f, coeffs }
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        assert_eq!(self.field, other.field, "mixed fields");
        let f = self.field;
        if self.is_zero() || other.is_zero() {
            return Poly::zero(f);
        }
        let (la, lb) = (self.coeffs.len(), other.coeffs.len());
        let ta = self.term_count();
        let tb = other.term_count();
        let cross = ta as u64 * tb as u64;
        let out_len = la + lb - 1;
        if ta.min(tb) <= 4 || cross <= 2 * out_len as u64 {
            return self.mul_sparse(other);
        }
        if la.min(lb) <= KARATSUBA_BASE * 2 {
            let mut out = vec![f.zero(); out_len];
            schoolbook_add_into(&f, &self.coeffs, &other.coeffs, &mut out);
            return Poly::from_coeffs(f, out);
        }
        let mut out = vec![f.zero(); out_len];
        karatsuba_add_into(&f, &self.coeffs, &other.coeffs, &mut out);
        Poly::from_coeffs(f, out)
    }

    fn mul_sparse(&self, other: &Poly) -> Poly {
        let f = self.field;
        let (sparse, dense) = if self.term_count() <= other.term_count() {
            (self, other)
        } else {
            (other, self)
        };
        let terms = sparse.nonzero_terms();
        let mut out = vec![f.zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (e1, c1) in terms {
            for (e2, &c2) in dense.coeffs.iter().enumerate() {
                if f.is_zero(c2) {
                    continue;
                }
                out[e1 + e2] = f.add(out[e1 + e2], f.mul(c1, c2));
            }
        }
        Poly::from_coeffs(f, out)
    }

    /// Quotient and remainder; the divisor's nonzero terms drive the inner
    /// loop, so division by sparse polynomials is cheap.
    pub fn divrem(&self, divisor: &Poly) -> Result<(Poly, Poly)> {
        assert_eq!(self.field, divisor.field, "mixed fields");
        let f = self.field;
        if divisor.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let dd = divisor.deg().unwrap();
        if self.deg().map_or(true, |d| d < dd) {
            return Ok((Poly::zero(f), self.clone()));
        }
        let inv_lead = f.inv(divisor.lead_coeff().unwrap())?;
        // All divisor terms except the leading one, highest first.
        let low_terms: Vec<(usize, FqElem)> = divisor
            .nonzero_terms()
            .into_iter()
            .filter(|&(e, _)| e != dd)
            .collect();
        let mut rem = self.coeffs.clone();
        let qlen = rem.len() - dd;
        let mut quot = vec![f.zero(); qlen];
        for i in (dd..rem.len()).rev() {
            let c = rem[i];
            if f.is_zero(c) {
                continue;
            }
            let qc = f.mul(c, inv_lead);
            quot[i - dd] = qc;
            rem[i] = f.zero();
            for &(e, dc) in &low_terms {
                let idx = i - dd + e;
                rem[idx] = f.sub(rem[idx], f.mul(qc, dc));
            }
        }
        Ok((Poly::from_coeffs(f, quot), Poly::from_coeffs(f, rem)))
    }

    /// Division that must be exact; the remainder is checked.
    pub fn exact_div(&self, divisor: &Poly) -> Result<Poly> {
        let (q, r) = self.divrem(divisor)?;
        if r.is_zero() {
            Ok(q)
        } else {
            Err(Error::NotPolynomial {
                context: "inexact division".into(),
            })
        }
    }

    /// Monic greatest common divisor (Euclid); gcd(0, 0) = 0.
    pub fn gcd(&self, other: &Poly) -> Poly {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let r = a.divrem(&b).expect("nonzero divisor").1;
            a = b;
            b = r;
        }
        a.monic()
    }

    /// Scale to leading coefficient 1 (zero stays zero).
    pub fn monic(&self) -> Poly {
        match self.lead_coeff() {
            None => self.clone(),
            Some(lc) if lc == self.field.one() => self.clone(),
            Some(lc) => self.mul_scalar(self.field.inv(lc).expect("nonzero lead")),
        }
    }

    pub fn pow(&self, mut e: u64) -> Poly {
        let mut base = self.clone();
        let mut acc = Poly::one(self.field);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// f^e for e a power of the characteristic p: coefficients map through
    /// the p^k-Frobenius and exponents scale by e. Positional, no products.
    pub fn frobenius_power(&self, e: u64) -> Poly {
        let f = self.field;
        debug_assert!(is_char_power(f.p() as u64, e), "exponent must be a p-power");
        if e == 1 || self.is_zero() {
            return self.clone();
        }
        let deg = self.deg().unwrap() as u64;
        let new_deg = deg.checked_mul(e).expect("degree overflow") as usize;
        let mut coeffs = vec![f.zero(); new_deg + 1];
        for (i, &c) in self.coeffs.iter().enumerate() {
            if !f.is_zero(c) {
                coeffs[i * e as usize] = f.pow(c, e);
            }
        }
        Poly { field: f, coeffs }
    }

    /// Substitute a rational function for x (Horner).
    pub fn eval(&self, at: &RatFn) -> RatFn {
        let f = self.field;
        let mut acc = RatFn::zero(f);
        for &c in self.coeffs.iter().rev() {
            acc = acc.mul(at).add(&RatFn::constant(f, c));
        }
        acc
    }

    pub fn eval_elem(&self, at: FqElem) -> FqElem {
        let f = self.field;
        let mut acc = f.zero();
        for &c in self.coeffs.iter().rev() {
            acc = f.add(f.mul(acc, at), c);
        }
        acc
    }
}

pub(crate) fn is_char_power(p: u64, mut e: u64) -> bool {
    if e == 0 {
        return false;
    }
    while e > 1 {
        if e % p != 0 {
            return false;
        }
        e /= p;
    }
    true
}

/// out += a * b, schoolbook. Prime fields accumulate raw u64 products per
/// column and reduce once (p <= 2^16 keeps 2^32 summands overflow-free).
fn schoolbook_add_into(f: &FieldSpec, a: &[FqElem], b: &[FqElem], out: &mut [FqElem]) {
    if f.nu() == 1 {
        let p = f.p() as u64;
        let mut acc = vec![0u64; a.len() + b.len() - 1];
        for (i, &ca) in a.iter().enumerate() {
            let va = ca.0 as u64;
            if va == 0 {
                continue;
            }
            for (j, &cb) in b.iter().enumerate() {
                acc[i + j] += va * cb.0 as u64;
            }
        }
        for (o, s) in out.iter_mut().zip(acc) {
            *o = f.add(*o, FqElem((s % p) as u32));
        }
    } else {
        for (i, &ca) in a.iter().enumerate() {
            if f.is_zero(ca) {
                continue;
            }
            for (j, &cb) in b.iter().enumerate() {
                if !f.is_zero(cb) {
                    out[i + j] = f.add(out[i + j], f.mul(ca, cb));
                }
            }
        }
    }
}

/// out += a * b by Karatsuba splitting; out must hold a.len()+b.len()-1.
fn karatsuba_add_into(f: &FieldSpec, a: &[FqElem], b: &[FqElem], out: &mut [FqElem]) {
    if a.is_empty() || b.is_empty() {
        return;
    }
    if a.len().min(b.len()) <= KARATSUBA_BASE {
        schoolbook_add_into(f, a, b, out);
        return;
    }
    let h = a.len().max(b.len()) / 2;
    let (a0, a1) = a.split_at(h.min(a.len()));
    let (b0, b1) = b.split_at(h.min(b.len()));

    let mut z0 = vec![f.zero(); a0.len() + b0.len() - 1];
    karatsuba_add_into(f, a0, b0, &mut z0);
    let z2 = if a1.is_empty() || b1.is_empty() {
        Vec::new()
    } else {
        let mut z = vec![f.zero(); a1.len() + b1.len() - 1];
        karatsuba_add_into(f, a1, b1, &mut z);
        z
    };

    let sa = add_slices(f, a0, a1);
    let sb = add_slices(f, b0, b1);
    let mut z1 = vec![f.zero(); sa.len() + sb.len() - 1];
    karatsuba_add_into(f, &sa, &sb, &mut z1);
    for (i, &c) in z0.iter().enumerate() {
        z1[i] = f.sub(z1[i], c);
    }
    for (i, &c) in z2.iter().enumerate() {
        z1[i] = f.sub(z1[i], c);
    }

    for (i, &c) in z0.iter().enumerate() {
        out[i] = f.add(out[i], c);
    }
    for (i, &c) in z1.iter().enumerate() {
        out[h + i] = f.add(out[h + i], c);
    }
    for (i, &c) in z2.iter().enumerate() {
        out[2 * h + i] = f.add(out[2 * h + i], c);
    }
}

fn add_slices(f: &FieldSpec, x: &[FqElem], y: &[FqElem]) -> Vec<FqElem> {
    let (long, short) = if x.len() >= y.len() { (x, y) } else { (y, x) };
    let mut v = long.to_vec();
    for (i, &c) in short.iter().enumerate() {
        v[i] = f.add(v[i], c);
    }
    v
}
