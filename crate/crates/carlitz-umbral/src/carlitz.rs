//! The Carlitz apparatus over F_q(x): brackets [i] = x^{q^i} - x, the
//! factorials D_i = [i] D_{i-1}^q and L_i = [i] L_{i-1}, K-binomial
//! coefficients D_i/(D_n D_{i-n}^{q^n}), the Carlitz polynomials
//!
//!   e_i(t) = sum_j (-1)^{i-j} (D_i/(D_j L_{i-j}^{q^j})) t^{q^j}
//!          = prod_{deg m < i} (t - m),
//!
//! their normalizations f_i = e_i/D_i, and the Carlitz module
//! C_s(z) = sum_i f_i(s) z^{q^i}.
//!
//! Everything here has two faces: expanded polynomials (cached D_i, L_i)
//! and factored atom lists over the brackets, since D_i = prod_k [k]^{q^{i-k}}
//! and L_i = prod_k [k]. The factored face powers exact division and
//! valuation bookkeeping at depths where expansion would be hopeless.

use crate::error::{Error, Result};
use crate::frac::Frac;
use crate::gf::{FieldSpec, FqElem};
use crate::linpoly::LinPoly;
use crate::poly::Poly;
use crate::ratfn::RatFn;

/// Expanded-cache size guard: sum of deg D_i is about max * q^max.
const MAX_CACHE_COEFFS: u64 = 1 << 26;

pub struct CarlitzCache {
    field: FieldSpec,
    max: usize,
    brackets: Vec<Poly>,
    d: Vec<Poly>,
    l: Vec<Poly>,
}

impl CarlitzCache {
    /// Builds brackets and factorials up to index `max`, verifying the
    /// closed-form degree and valuation of every entry.
    pub fn new(field: FieldSpec, max: usize) -> Result<CarlitzCache> {
        let q = field.q() as u64;
        let qi = q
            .checked_pow(max as u32)
            .ok_or(Error::ExponentOverflow { k: max as u64 })?;
        if (max as u64).saturating_mul(qi) > MAX_CACHE_COEFFS {
            return Err(Error::InvalidInput(format!(
                "carlitz cache of order {} over F_{} needs about {} coefficients (limit {})",
                max,
                field.q(),
                (max as u64) * qi,
                MAX_CACHE_COEFFS
            )));
        }
        let one = Poly::one(field);
        let mut brackets = Vec::with_capacity(max);
        let mut d = vec![one.clone()];
        let mut l = vec![one];
        let mut qpow: u64 = 1;
        for i in 1..=max {
            qpow *= q;
            // [i] = x^{q^i} - x.
            let br = Poly::x_pow(field, qpow as usize).sub(&Poly::x(field));
            assert_eq!(br.ord(), Some(1), "v([i]) = 1");
            let di = br.mul(&d[i - 1].frobenius_power(q));
            let li = br.mul(&l[i - 1]);
            // Closed forms: deg D_i = i q^i, v(D_i) = (q^i-1)/(q-1),
            // deg L_i = (q^{i+1}-q)/(q-1), v(L_i) = i, both monic.
            assert_eq!(di.deg(), Some((i as u64 * qpow) as usize));
            assert_eq!(di.ord(), Some(((qpow - 1) / (q - 1)) as usize));
            assert_eq!(li.deg(), Some(((qpow * q - q) / (q - 1)) as usize));
            assert_eq!(li.ord(), Some(i));
            assert!(di.is_monic() && li.is_monic());
            brackets.push(br);
            d.push(di);
            l.push(li);
        }
        Ok(CarlitzCache {
            field,
            max,
            brackets,
            d,
            l,
        })
    }

    pub fn field(&self) -> &FieldSpec {
        &self.field
    }

    pub fn max_order(&self) -> usize {
        self.max
    }

    /// [i] for 1 <= i <= max.
    pub fn bracket(&self, i: usize) -> &Poly {
        &self.brackets[i - 1]
    }

    pub fn d(&self, i: usize) -> &Poly {
        &self.d[i]
    }

    pub fn l(&self, i: usize) -> &Poly {
        &self.l[i]
    }

    pub(crate) fn q_pow(&self, e: u32) -> Result<u64> {
        let q = self.field.q() as u64;
        q.checked_pow(e)
            .ok_or(Error::ExponentOverflow { k: e as u64 })
    }

    /// D_i^{q^f} as bracket atoms: prod_{k=1..i} [k]^{q^{i-k+f}}.
    pub(crate) fn d_atoms(&self, i: usize, f: u32) -> Result<Vec<(Poly, u64)>> {
        let mut atoms = Vec::with_capacity(i);
        for k in 1..=i {
            let e = self.q_pow((i - k) as u32 + f)?;
            atoms.push((self.bracket(k).clone(), e));
        }
        Ok(atoms)
    }

    /// L_i^{q^f} as bracket atoms: prod_{k=1..i} [k]^{q^f}.
    pub(crate) fn l_atoms(&self, i: usize, f: u32) -> Result<Vec<(Poly, u64)>> {
        let e = self.q_pow(f)?;
        Ok((1..=i).map(|k| (self.bracket(k).clone(), e)).collect())
    }

    /// (-1)^k in F_q.
    pub(crate) fn sign(&self, k: usize) -> FqElem {
        if k % 2 == 0 {
            self.field.one()
        } else {
            self.field.neg(self.field.one())
        }
    }

    /// K-binomial coefficient D_i/(D_n D_{i-n}^{q^n}): always a polynomial;
    /// zero when n > i by the usual convention.
    pub fn k_binomial(&self, i: usize, n: usize) -> Result<Poly> {
        assert!(i <= self.max, "index beyond cache");
        if n > i {
            return Ok(Poly::zero(self.field));
        }
        let mut atoms = self.d_atoms(n, 0)?;
        atoms.extend(self.d_atoms(i - n, n as u32)?);
        let r = Frac::new(self.d(i).clone(), atoms).to_ratfn()?;
        match r.as_poly() {
            Some(p) => Ok(p.clone()),
            None => Err(Error::NotPolynomial {
                context: format!("K-binomial ({}, {})", i, n),
            }),
        }
    }

    /// e_i by the coefficient formula; every coefficient is a polynomial
    /// and the top one is 1.
    pub fn carlitz_e(&self, i: usize) -> Result<LinPoly> {
        assert!(i <= self.max, "index beyond cache");
        let mut coeffs = Vec::with_capacity(i + 1);
        for j in 0..=i {
            let mut atoms = self.d_atoms(j, 0)?;
            atoms.extend(self.l_atoms(i - j, j as u32)?);
            let num = self.d(i).mul_scalar(self.sign(i - j));
            let r = Frac::new(num, atoms).to_ratfn()?;
            if r.as_poly().is_none() {
                return Err(Error::NotPolynomial {
                    context: format!("coefficient {} of e_{}", j, i),
                });
            }
            coeffs.push(r);
        }
        let lp = LinPoly::from_coeffs(self.field, coeffs);
        debug_assert!(lp.coeff(i).is_one());
        Ok(lp)
    }

    /// e_i by the defining product over all q^i polynomials of degree < i,
    /// expanded blind in t and then checked to be F_q-linear.
    pub fn carlitz_e_oracle(&self, i: usize) -> Result<LinPoly> {
        let count = self.q_pow(i as u32)?;
        if i > 4 || count > 256 {
            return Err(Error::EnumerationTooLarge { count });
        }
        let f = self.field;
        // Dense t-coefficients of the running product, starting from t.
        let mut prod: Vec<Poly> = vec![Poly::zero(f), Poly::one(f)];
        for idx in 0..count {
            // Digits of idx in base q give the coefficients of m.
            let mut m_coeffs = Vec::with_capacity(i);
            let mut rest = idx;
            for _ in 0..i {
                m_coeffs.push(f.element_at(rest % f.q() as u64));
                rest /= f.q() as u64;
            }
            let m = Poly::from_coeffs(f, m_coeffs);
            if m.is_zero() {
                continue; // the t - 0 factor is the initial seed
            }
            // Multiply by (t - m).
            let neg_m = m.neg();
            let mut next = vec![Poly::zero(f); prod.len() + 1];
            for (k, c) in prod.iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                next[k + 1] = next[k + 1].add(c);
                next[k] = next[k].add(&c.mul(&neg_m));
            }
            prod = next;
        }
        // The product of (t - m) over an F_q-subspace of m's is F_q-linear.
        let q = f.q() as usize;
        let mut coeffs = Vec::new();
        let mut qj: usize = 1;
        for (k, c) in prod.iter().enumerate() {
            if k == qj {
                coeffs.push(RatFn::from_poly(c.clone()));
                qj *= q;
            } else {
                assert!(c.is_zero(), "product not F_q-linear at t^{}", k);
            }
        }
        Ok(LinPoly::from_coeffs(f, coeffs))
    }

    /// f_i = e_i/D_i, the orthonormal basis element of level i.
    pub fn carlitz_f(&self, i: usize) -> Result<LinPoly> {
        assert!(i <= self.max, "index beyond cache");
        let mut coeffs = Vec::with_capacity(i + 1);
        for j in 0..=i {
            let mut atoms = self.d_atoms(j, 0)?;
            atoms.extend(self.l_atoms(i - j, j as u32)?);
            let num = Poly::constant(self.field, self.sign(i - j));
            coeffs.push(Frac::new(num, atoms).to_ratfn()?);
        }
        Ok(LinPoly::from_coeffs(self.field, coeffs))
    }

    /// Carlitz module: C_s(z) = sum_{i <= deg s} f_i(s) z^{q^i}, each
    /// f_i(s) a polynomial because e_i(s) is divisible by D_i... the
    /// division is asserted exact.
    pub fn carlitz_module(&self, s: &Poly) -> Result<LinPoly> {
        let deg = match s.deg() {
            None => return Ok(LinPoly::zero(self.field)),
            Some(d) => d,
        };
        assert!(deg <= self.max, "deg s beyond cache");
        let sv = RatFn::from_poly(s.clone());
        let mut coeffs = Vec::with_capacity(deg + 1);
        for i in 0..=deg {
            let fi = self.carlitz_f(i)?;
            let v = fi.eval(&sv)?;
            if v.as_poly().is_none() {
                return Err(Error::NotPolynomial {
                    context: format!("f_{}({})", i, s),
                });
            }
            coeffs.push(v);
        }
        Ok(LinPoly::from_coeffs(self.field, coeffs))
    }

    /// The alternating reciprocal-factorial identity
    /// sum_{j=0}^{h-1} (-1)^j/(L_j D_{h-j}^{q^j}) = (-1)^{h+1}/L_h,
    /// verified as an exact zero test in factored form.
    pub fn gekeler_check(&self, h: usize) -> Result<bool> {
        assert!(h >= 1 && h <= self.max, "index beyond cache");
        let mut terms = Vec::with_capacity(h + 1);
        for j in 0..h {
            let mut atoms = self.l_atoms(j, 0)?;
            atoms.extend(self.d_atoms(h - j, j as u32)?);
            let num = Poly::constant(self.field, self.sign(j));
            terms.push(Frac::new(num, atoms));
        }
        let rhs_num = Poly::constant(self.field, self.sign(h + 1));
        terms.push(Frac::new(rhs_num, self.l_atoms(h, 0)?).neg());
        Ok(Frac::add_all(&terms).is_zero())
    }
}
