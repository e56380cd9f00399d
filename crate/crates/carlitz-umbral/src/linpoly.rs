//! F_q-linear polynomials in t: finite sums u(t) = sum_j a_j t^{q^j} with
//! coefficients in F_q(x). These are exactly the polynomials additive in t
//! with u(ct) = c u(t) for c in F_q, and they form a ring under addition
//! and composition, with the Frobenius twist tau u = u^q.
//!
//! Coefficients are indexed by the Frobenius level j (the exponent is
//! q^j), so degree bookkeeping never touches q^j itself until evaluation.
//!
//! [`BiLinPoly`] is the two-variable analogue spanned by s^{q^j} t^{q^k},
//! used to verify binomial-type identities: both sides of an identity in
//! (s, t) are accumulated into coefficient matrices and compared entry by
//! entry, which is an exact zero test in F_q(x).

use crate::error::{Error, Result};
use crate::gf::FieldSpec;
use crate::ratfn::RatFn;
use std::fmt;

#[derive(Debug, Clone, PartialEq)]
pub struct LinPoly {
    field: FieldSpec,
    coeffs: Vec<RatFn>,
}

impl LinPoly {
    pub fn zero(field: FieldSpec) -> LinPoly {
        LinPoly {
            field,
            coeffs: Vec::new(),
        }
    }

    /// The identity t (level 0 coefficient 1).
    pub fn t(field: FieldSpec) -> LinPoly {
        LinPoly {
            field,
            coeffs: vec![RatFn::one(field)],
        }
    }

    /// coeffs[j] multiplies t^{q^j}; trailing zeros are trimmed.
    pub fn from_coeffs(field: FieldSpec, coeffs: Vec<RatFn>) -> LinPoly {
        let mut lp = LinPoly { field, coeffs };
        lp.trim();
        lp
    }

    /// c * t^{q^j}.
    pub fn term(field: FieldSpec, j: usize, c: RatFn) -> LinPoly {
        if c.is_zero() {
            return LinPoly::zero(field);
        }
        let mut coeffs = vec![RatFn::zero(field); j + 1];
        coeffs[j] = c;
        LinPoly { field, coeffs }
    }

    fn trim(&mut self) {
        while self.coeffs.last().map_or(false, |c| c.is_zero()) {
            self.coeffs.pop();
        }
    }

    pub fn field(&self) -> &FieldSpec {
        &self.field
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Highest Frobenius level with a nonzero coefficient; None for zero.
    pub fn order(&self) -> Option<usize> {
        if self.coeffs.is_empty() {
            None
        } else {
            Some(self.coeffs.len() - 1)
        }
    }

    pub fn coeff(&self, j: usize) -> RatFn {
        self.coeffs
            .get(j)
            .cloned()
            .unwrap_or_else(|| RatFn::zero(self.field))
    }

    pub fn coeffs(&self) -> &[RatFn] {
        &self.coeffs
    }

    pub fn add(&self, other: &LinPoly) -> LinPoly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut out = Vec::with_capacity(n);
        for j in 0..n {
            out.push(self.coeff(j).add(&other.coeff(j)));
        }
        LinPoly::from_coeffs(self.field, out)
    }

    pub fn neg(&self) -> LinPoly {
        LinPoly {
            field: self.field,
            coeffs: self.coeffs.iter().map(|c| c.neg()).collect(),
        }
    }

    pub fn sub(&self, other: &LinPoly) -> LinPoly {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &RatFn) -> LinPoly {
        if c.is_zero() {
            return LinPoly::zero(self.field);
        }
        LinPoly::from_coeffs(
            self.field,
            self.coeffs.iter().map(|a| a.mul(c)).collect(),
        )
    }

    /// Substitution t -> lam * t: (rho_lam u)_j = a_j lam^{q^j}.
    pub fn rho(&self, lam: &RatFn) -> Result<LinPoly> {
        let mut out = Vec::with_capacity(self.coeffs.len());
        let mut pw = lam.clone();
        for (j, c) in self.coeffs.iter().enumerate() {
            if j > 0 {
                pw = pw.frobenius_power(1)?;
            }
            out.push(c.mul(&pw));
        }
        Ok(LinPoly::from_coeffs(self.field, out))
    }

    /// Composition (self o other)(t) = self(other(t)):
    /// (u o v)_m = sum_{j+k=m} u_j v_k^{q^j}.
    pub fn compose(&self, other: &LinPoly) -> Result<LinPoly> {
        if self.is_zero() || other.is_zero() {
            return Ok(LinPoly::zero(self.field));
        }
        let n = self.coeffs.len() + other.coeffs.len() - 1;
        let mut out = vec![RatFn::zero(self.field); n];
        for (j, uj) in self.coeffs.iter().enumerate() {
            if uj.is_zero() {
                continue;
            }
            for (k, vk) in other.coeffs.iter().enumerate() {
                if vk.is_zero() {
                    continue;
                }
                let tw = vk.frobenius_power(j as u32)?;
                out[j + k] = out[j + k].add(&uj.mul(&tw));
            }
        }
        Ok(LinPoly::from_coeffs(self.field, out))
    }

    /// tau^k: for k >= 0 raises to the q^k-th power (coefficients get
    /// Frobenius, levels shift up by k); for k < 0 takes the q^{|k|}-th
    /// root, which requires the low |k| levels to vanish and every
    /// coefficient to be a q^{|k|}-th power.
    pub fn tau_power(&self, k: i64) -> Result<LinPoly> {
        if self.is_zero() || k == 0 {
            return Ok(self.clone());
        }
        if k > 0 {
            let k = k as usize;
            let mut out = vec![RatFn::zero(self.field); self.coeffs.len() + k];
            for (j, c) in self.coeffs.iter().enumerate() {
                out[j + k] = c.frobenius_power(k as u32)?;
            }
            return Ok(LinPoly::from_coeffs(self.field, out));
        }
        let k = (-k) as usize;
        for j in 0..k.min(self.coeffs.len()) {
            if !self.coeffs[j].is_zero() {
                return Err(Error::ConstantTermObstruction { level: j });
            }
        }
        let mut out = Vec::with_capacity(self.coeffs.len().saturating_sub(k));
        for j in k..self.coeffs.len() {
            let mut c = self.coeffs[j].clone();
            for _ in 0..k {
                c = c.qth_root()?;
            }
            out.push(c);
        }
        Ok(LinPoly::from_coeffs(self.field, out))
    }

    /// Evaluation at a point of F_q(x), walking q-th powers incrementally.
    pub fn eval(&self, at: &RatFn) -> Result<RatFn> {
        let mut acc = RatFn::zero(self.field);
        let mut pw = at.clone();
        for (j, c) in self.coeffs.iter().enumerate() {
            if j > 0 {
                pw = pw.frobenius_power(1)?;
            }
            if !c.is_zero() {
                acc = acc.add(&c.mul(&pw));
            }
        }
        Ok(acc)
    }
}

impl fmt::Display for LinPoly {
    /// Descending levels; exponents are the actual integers q^j.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let q = self.field.q() as u128;
        let mut parts = Vec::new();
        for (j, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let e = q.pow(j as u32);
            let cs = crate::parse::fmt_ratfn(c);
            let needs_parens = cs.contains(' ') || cs.contains('/');
            let coeff = if c.is_one() {
                String::new()
            } else if needs_parens {
                format!("({})*", cs)
            } else {
                format!("{}*", cs)
            };
            let tpow = if e == 1 {
                "t".to_string()
            } else {
                format!("t^{}", e)
            };
            parts.push(format!("{}{}", coeff, tpow));
        }
        f.write_str(&parts.join(" + "))
    }
}

/// Bilinear span of s^{q^j} t^{q^k}: coefficient matrix indexed [j][k].
#[derive(Debug, Clone, PartialEq)]
pub struct BiLinPoly {
    field: FieldSpec,
    coeffs: Vec<Vec<RatFn>>,
}

impl BiLinPoly {
    pub fn zero(field: FieldSpec) -> BiLinPoly {
        BiLinPoly {
            field,
            coeffs: Vec::new(),
        }
    }

    pub fn coeff(&self, j: usize, k: usize) -> RatFn {
        self.coeffs
            .get(j)
            .and_then(|row| row.get(k))
            .cloned()
            .unwrap_or_else(|| RatFn::zero(self.field))
    }

    fn entry(&mut self, j: usize, k: usize) -> &mut RatFn {
        if self.coeffs.len() <= j {
            self.coeffs.resize(j + 1, Vec::new());
        }
        let row = &mut self.coeffs[j];
        if row.len() <= k {
            row.resize(k + 1, RatFn::zero(self.field));
        }
        &mut row[k]
    }

    /// u(st) for a one-variable linear u: (st)^{q^m} = s^{q^m} t^{q^m}
    /// puts u's coefficients on the diagonal.
    pub fn from_diagonal(u: &LinPoly) -> BiLinPoly {
        let mut b = BiLinPoly::zero(*u.field());
        for (m, c) in u.coeffs().iter().enumerate() {
            if !c.is_zero() {
                *b.entry(m, m) = c.clone();
            }
        }
        b
    }

    /// Adds coeff * in_t(t) * in_s(s)^{q^frob}: the t-side level k keeps
    /// its coefficient, the s-side level j gets Frobenius-twisted and
    /// shifted to row j + frob.
    pub fn accumulate(
        &mut self,
        coeff: &RatFn,
        in_t: &LinPoly,
        in_s: &LinPoly,
        frob: u32,
    ) -> Result<()> {
        if coeff.is_zero() {
            return Ok(());
        }
        for (j, sj) in in_s.coeffs().iter().enumerate() {
            if sj.is_zero() {
                continue;
            }
            let tw = sj.frobenius_power(frob)?;
            for (k, tk) in in_t.coeffs().iter().enumerate() {
                if tk.is_zero() {
                    continue;
                }
                let add = coeff.mul(&tw).mul(tk);
                let e = self.entry(j + frob as usize, k);
                *e = e.add(&add);
            }
        }
        Ok(())
    }

    pub fn sub(&self, other: &BiLinPoly) -> BiLinPoly {
        let rows = self.coeffs.len().max(other.coeffs.len());
        let mut out = BiLinPoly::zero(self.field);
        for j in 0..rows {
            let cols = self
                .coeffs
                .get(j)
                .map_or(0, |r| r.len())
                .max(other.coeffs.get(j).map_or(0, |r| r.len()));
            for k in 0..cols {
                let d = self.coeff(j, k).sub(&other.coeff(j, k));
                if !d.is_zero() {
                    *out.entry(j, k) = d;
                }
            }
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|row| row.iter().all(|c| c.is_zero()))
    }

    /// First nonzero entry (row-major), for counterexample reports.
    pub fn first_nonzero(&self) -> Option<(usize, usize, RatFn)> {
        for (j, row) in self.coeffs.iter().enumerate() {
            for (k, c) in row.iter().enumerate() {
                if !c.is_zero() {
                    return Some((j, k, c.clone()));
                }
            }
        }
        None
    }
}
