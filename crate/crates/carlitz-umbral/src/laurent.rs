//! Truncated Laurent series over F_q at the place x = 0.
//!
//! Elements of K = F_q((x)) are carried with an explicit absolute precision:
//! a series is known modulo x^P.  The valuation v is the exponent of the
//! first nonzero coefficient and |z| = q^{-v}.  Precision propagates by the
//! ultrametric rules prec(a+b) >= min(prec a, prec b) and
//! prec(ab) >= min(prec a + v(b), prec b + v(a)); the q-power map is exact,
//! multiplying precision by q, because (a + e)^q = a^q + e^q in
//! characteristic p and c^q = c on F_q.
//!
//! F_q-linear series sum b_j t^{q^j} are evaluated at points of K by
//! summing term valuations v(b_j) + q^j v(t); the sum is admitted only
//! while those valuations strictly increase, which for the exponential and
//! logarithm series reproduces the convergence disks v(t) >= 1 (q > 2) and
//! v(t) >= 2 (q = 2).  Violations raise an error instead of truncating.

use crate::error::{Error, Result};
use crate::gf::{FieldSpec, FqElem};
use crate::linpoly::LinPoly;
use crate::poly::Poly;
use crate::ratfn::{RatFn, ValExp};
use crate::umbral::BasicSequence;

/// Laurent series known modulo x^prec; coeffs[i] is the coefficient of
/// x^{lead+i}.  Empty coeffs mean zero to the stated precision.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LaurentSeries {
    field: FieldSpec,
    lead: i64,
    coeffs: Vec<FqElem>,
    prec: i64,
}

impl LaurentSeries {
    fn normalized(field: FieldSpec, lead: i64, mut coeffs: Vec<FqElem>, prec: i64) -> LaurentSeries {
        let mut lead = lead;
        // Drop everything at or above the precision.
        if lead + coeffs.len() as i64 > prec {
            let keep = (prec - lead).max(0) as usize;
            coeffs.truncate(keep);
        }
        while coeffs.first().is_some_and(|c| field.is_zero(*c)) {
            coeffs.remove(0);
            lead += 1;
        }
        while coeffs.last().is_some_and(|c| field.is_zero(*c)) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            lead = prec;
        }
        LaurentSeries {
            field,
            lead,
            coeffs,
            prec,
        }
    }

    /// The zero-to-precision element: no coefficient is known nonzero
    /// below x^prec.
    pub fn zero_to_precision(field: FieldSpec, prec: i64) -> LaurentSeries {
        LaurentSeries {
            field,
            lead: prec,
            coeffs: Vec::new(),
            prec,
        }
    }

    /// Embeds a polynomial, truncated at the precision.
    pub fn from_poly(p: &Poly, prec: i64) -> LaurentSeries {
        let f = *p.field();
        LaurentSeries::normalized(f, 0, p.coeffs().to_vec(), prec)
    }

    /// Series with the given coefficients starting at x^lead.
    pub fn from_coeffs(field: FieldSpec, lead: i64, coeffs: Vec<FqElem>, prec: i64) -> LaurentSeries {
        LaurentSeries::normalized(field, lead, coeffs, prec)
    }

    pub fn field(&self) -> &FieldSpec {
        &self.field
    }

    pub fn precision(&self) -> i64 {
        self.prec
    }

    /// Exponent of the first nonzero coefficient; None when the series is
    /// zero to its precision.
    pub fn valuation(&self) -> Option<i64> {
        if self.coeffs.is_empty() {
            None
        } else {
            Some(self.lead)
        }
    }

    /// Coefficient of x^e, which must lie below the precision.
    pub fn coeff(&self, e: i64) -> FqElem {
        assert!(e < self.prec, "coefficient of x^{} is beyond O(x^{})", e, self.prec);
        let i = e - self.lead;
        if i < 0 || i >= self.coeffs.len() as i64 {
            self.field.zero()
        } else {
            self.coeffs[i as usize]
        }
    }

    pub fn is_zero_to_precision(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Forgets information beyond x^prec.
    pub fn truncate(&self, prec: i64) -> LaurentSeries {
        assert!(prec <= self.prec);
        LaurentSeries::normalized(self.field, self.lead, self.coeffs.clone(), prec)
    }

    pub fn neg(&self) -> LaurentSeries {
        let coeffs = self.coeffs.iter().map(|c| self.field.neg(*c)).collect();
        LaurentSeries {
            field: self.field,
            lead: self.lead,
            coeffs,
            prec: self.prec,
        }
    }

    pub fn add(&self, other: &LaurentSeries) -> LaurentSeries {
        let f = self.field;
        let prec = self.prec.min(other.prec);
        let lead = match (self.valuation(), other.valuation()) {
            (None, None) => return LaurentSeries::zero_to_precision(f, prec),
            (None, Some(v)) | (Some(v), None) => v.min(prec),
            (Some(a), Some(b)) => a.min(b).min(prec),
        };
        let mut coeffs = vec![f.zero(); (prec - lead).max(0) as usize];
        for (src, base) in [(self, self.lead), (other, other.lead)] {
            for (i, c) in src.coeffs.iter().enumerate() {
                let e = base + i as i64;
                if e < prec {
                    let slot = (e - lead) as usize;
                    coeffs[slot] = f.add(coeffs[slot], *c);
                }
            }
        }
        LaurentSeries::normalized(f, lead, coeffs, prec)
    }

    pub fn sub(&self, other: &LaurentSeries) -> LaurentSeries {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &LaurentSeries) -> LaurentSeries {
        let f = self.field;
        match (self.valuation(), other.valuation()) {
            (None, None) => LaurentSeries::zero_to_precision(f, self.prec + other.prec),
            (None, Some(v)) => LaurentSeries::zero_to_precision(f, self.prec + v),
            (Some(v), None) => LaurentSeries::zero_to_precision(f, other.prec + v),
            (Some(va), Some(vb)) => {
                let prec = (self.prec + vb).min(other.prec + va);
                let a = Poly::from_coeffs(f, self.coeffs.clone());
                let b = Poly::from_coeffs(f, other.coeffs.clone());
                let prod = a.mul(&b);
                LaurentSeries::normalized(f, va + vb, prod.coeffs().to_vec(), prec)
            }
        }
    }

    /// Multiplicative inverse of a series that is nonzero to its precision.
    pub fn inv(&self) -> Result<LaurentSeries> {
        let f = self.field;
        let v = self.valuation().ok_or(Error::ZeroToPrecision)?;
        let n = (self.prec - v) as usize;
        // Unit part u with u[0] != 0; invert by the convolution recurrence.
        let u = &self.coeffs;
        let u0 = f.inv(u[0])?;
        let mut w = Vec::with_capacity(n);
        w.push(u0);
        for k in 1..n {
            let mut acc = f.zero();
            for i in 1..=k.min(u.len() - 1) {
                acc = f.add(acc, f.mul(u[i], w[k - i]));
            }
            w.push(f.neg(f.mul(u0, acc)));
        }
        Ok(LaurentSeries::normalized(f, -v, w, self.prec - 2 * v))
    }

    /// The q-power map: exponents dilate by q, coefficients are fixed, and
    /// the precision multiplies by q.
    pub fn frobenius(&self) -> LaurentSeries {
        let f = self.field;
        let q = f.q() as i64;
        if self.coeffs.is_empty() {
            return LaurentSeries::zero_to_precision(f, self.prec * q);
        }
        let mut coeffs = vec![f.zero(); (self.coeffs.len() - 1) * q as usize + 1];
        for (i, c) in self.coeffs.iter().enumerate() {
            coeffs[i * q as usize] = *c;
        }
        LaurentSeries::normalized(f, self.lead * q, coeffs, self.prec * q)
    }

    /// Equality of all coefficients below the smaller precision.
    pub fn agrees_with(&self, other: &LaurentSeries) -> bool {
        self.first_disagreement(other).is_none()
    }

    /// Smallest exponent below the common precision where the two differ.
    pub fn first_disagreement(&self, other: &LaurentSeries) -> Option<i64> {
        let prec = self.prec.min(other.prec);
        let lo = self.lead.min(other.lead).min(prec);
        (lo..prec).find(|&e| self.coeff(e) != other.coeff(e))
    }
}

impl std::fmt::Display for LaurentSeries {
    fn fmt(&self, out: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let f = &self.field;
        for (i, c) in self.coeffs.iter().enumerate() {
            if f.is_zero(*c) {
                continue;
            }
            if i > 0 {
                write!(out, " + ")?;
            }
            let e = self.lead + i as i64;
            let cs = f.fmt_elem(*c);
            match (e, cs.as_str()) {
                (0, _) => write!(out, "{}", cs)?,
                (1, "1") => write!(out, "x")?,
                (1, _) => write!(out, "{}*x", cs)?,
                (_, "1") => write!(out, "x^{}", e)?,
                _ => write!(out, "{}*x^{}", cs, e)?,
            }
        }
        if !self.coeffs.is_empty() {
            write!(out, " + ")?;
        }
        write!(out, "O(x^{})", self.prec)
    }
}

/// Expands a rational function at x = 0 to the requested precision; the
/// result back-multiplied by the denominator agrees with the numerator.
pub fn ratfn_to_laurent(r: &RatFn, prec: i64) -> LaurentSeries {
    let f = *r.field();
    if r.is_zero() {
        return LaurentSeries::zero_to_precision(f, prec);
    }
    let num = r.num();
    let den = r.den();
    let vn = num.ord().expect("nonzero numerator") as i64;
    let vd = den.ord().expect("nonzero denominator") as i64;
    let lead = vn - vd;
    let n = prec - lead;
    if n <= 0 {
        return LaurentSeries::zero_to_precision(f, prec);
    }
    // Divide the shifted coefficient streams: c_k from the recurrence
    // u_0 c_k = num_k - sum_{i>=1} u_i c_{k-i}.
    let u0 = f.inv(den.coeff(vd as usize)).expect("unit part");
    let mut c = Vec::with_capacity(n as usize);
    for k in 0..n as usize {
        let mut acc = num.coeff(vn as usize + k);
        for i in 1..=k {
            let ui = den.coeff(vd as usize + i);
            if !f.is_zero(ui) {
                acc = f.sub(acc, f.mul(ui, c[k - i]));
            }
        }
        c.push(f.mul(u0, acc));
    }
    LaurentSeries::normalized(f, lead, c, prec)
}

/// Evaluates sum_j b_j lam^{q^j} at a point of K.
///
/// Term valuations v(b_j) + q^j v(lam) must strictly increase; the first
/// violation raises DivergentAtPoint.  Terms are accumulated until three
/// consecutive ones lie beyond the target precision (one suffices under
/// the precondition; the margin guards the bookkeeping).
pub fn eval_lin_series(b: &[RatFn], lam: &LaurentSeries, prec: i64) -> Result<LaurentSeries> {
    let f = *lam.field();
    let q = f.q() as i64;
    let vlam = lam
        .valuation()
        .ok_or_else(|| Error::InvalidInput("evaluation point is zero to working precision".into()))?;
    // The running power lam^{q^j} only ever needs coefficients up to the
    // target precision plus the largest pole order among the b_j.
    let margin = b
        .iter()
        .filter_map(|bj| bj.valuation().finite())
        .map(|v| (-v).max(0))
        .max()
        .unwrap_or(0);
    let mut acc = LaurentSeries::zero_to_precision(f, prec);
    let mut pw = lam.clone();
    let mut pw_level = 0usize;
    let mut last_finite: Option<i64> = None;
    let mut beyond = 0usize;
    let mut qj: i64 = 1;
    for (j, bj) in b.iter().enumerate() {
        if j > 0 {
            qj = qj
                .checked_mul(q)
                .ok_or(Error::ExponentOverflow { k: j as u64 })?;
        }
        let vb = match bj.valuation() {
            ValExp::Finite(vb) => vb,
            // A zero coefficient contributes nothing; its term valuation
            // counts as beyond the precision.
            ValExp::Infinite => {
                beyond += 1;
                if beyond >= 3 {
                    return Ok(acc.truncate(prec));
                }
                continue;
            }
        };
        let vt = vb + qj * vlam;
        if last_finite.is_some_and(|prev| vt <= prev) {
            return Err(Error::DivergentAtPoint { j });
        }
        last_finite = Some(vt);
        if vt > prec {
            beyond += 1;
            if beyond >= 3 {
                return Ok(acc.truncate(prec));
            }
            continue;
        }
        beyond = 0;
        while pw_level < j {
            pw = pw.frobenius();
            pw = pw.truncate(pw.precision().min(prec + margin));
            pw_level += 1;
        }
        let term = ratfn_to_laurent(bj, prec - qj * vlam).mul(&pw);
        if term.precision() < prec {
            return Err(Error::InvalidInput(
                "evaluation point precision too low for the target".into(),
            ));
        }
        acc = acc.add(&term).truncate(prec);
    }
    // The strict valuation increase is enforced term by term, so one
    // trailing beyond-precision term already bounds the tail when the
    // coefficient list runs out early.
    if beyond >= 1 {
        return Ok(acc.truncate(prec));
    }
    Err(Error::InvalidInput(
        "series exhausted below the target precision".into(),
    ))
}

/// Evaluates a complete F_q-linear polynomial at a point of K.  The sum is
/// finite, so no convergence criterion applies and every term is taken.
pub fn eval_lin_poly(u: &LinPoly, lam: &LaurentSeries, prec: i64) -> Result<LaurentSeries> {
    let f = *lam.field();
    let q = f.q() as i64;
    let vlam = lam
        .valuation()
        .ok_or_else(|| Error::InvalidInput("evaluation point is zero to working precision".into()))?;
    let margin = u
        .coeffs()
        .iter()
        .filter_map(|c| c.valuation().finite())
        .map(|v| (-v).max(0))
        .max()
        .unwrap_or(0);
    let mut acc = LaurentSeries::zero_to_precision(f, prec);
    let mut pw = lam.clone();
    let mut pw_level = 0usize;
    let mut qj: i64 = 1;
    for (j, cj) in u.coeffs().iter().enumerate() {
        if j > 0 {
            qj = qj
                .checked_mul(q)
                .ok_or(Error::ExponentOverflow { k: j as u64 })?;
        }
        let vc = match cj.valuation() {
            ValExp::Finite(v) => v,
            ValExp::Infinite => continue,
        };
        if vc + qj * vlam > prec {
            continue;
        }
        while pw_level < j {
            pw = pw.frobenius();
            pw = pw.truncate(pw.precision().min(prec + margin));
            pw_level += 1;
        }
        let term = ratfn_to_laurent(cj, prec - qj * vlam).mul(&pw);
        if term.precision() < prec {
            return Err(Error::InvalidInput(
                "evaluation point precision too low for the target".into(),
            ));
        }
        acc = acc.add(&term).truncate(prec);
    }
    Ok(acc)
}

/// Outcome of a pointwise series comparison at fixed precision.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PointReport {
    pub precision: i64,
    pub first_mismatch: Option<i64>,
}

impl PointReport {
    pub fn holds(&self) -> bool {
        self.first_mismatch.is_none()
    }
}

/// Compares e_delta(lam * t) with sum_n Q_n(t) e_delta(lam)^{q^n} in K to
/// the given precision; t must be integral and lam inside the convergence
/// disk, otherwise evaluation raises DivergentAtPoint.
pub fn eq36_check(
    seq: &BasicSequence,
    lam: &LaurentSeries,
    t_point: &RatFn,
    prec: i64,
) -> Result<PointReport> {
    let f = *seq.field();
    let q = f.q() as i64;
    match t_point.valuation() {
        ValExp::Infinite => {
            // Both sides vanish identically at t = 0.
            return Ok(PointReport {
                precision: prec,
                first_mismatch: None,
            });
        }
        ValExp::Finite(v) if v < 0 => {
            return Err(Error::InvalidInput(
                "the scaling point t must lie in the integer ring".into(),
            ));
        }
        ValExp::Finite(_) => {}
    }
    let order = seq.op().order();
    let e = crate::genfun::exp_series(seq.op(), order)?;
    // Left side: e_delta at lam * t.
    let emb_prec = prec - lam.valuation().unwrap_or(0).min(0);
    let lam_t = lam.mul(&ratfn_to_laurent(t_point, emb_prec));
    let lhs = eval_lin_series(e.coeffs(), &lam_t, prec)?;
    // Right side: sum of Q_n(t) w^{q^n} for w = e_delta(lam).
    let w = eval_lin_series(e.coeffs(), lam, prec)?;
    let vw = w.valuation().ok_or(Error::ZeroToPrecision)?;
    let mut values = Vec::with_capacity(order + 1);
    for n in 0..=order {
        values.push(seq.q_poly(n)?.eval(t_point)?);
    }
    let margin = values
        .iter()
        .filter_map(|v| v.valuation().finite())
        .map(|v| (-v).max(0))
        .max()
        .unwrap_or(0);
    let mut rhs = LaurentSeries::zero_to_precision(f, prec);
    let mut wn = w.clone();
    let mut qn: i64 = 1;
    let mut beyond = 0usize;
    let mut summed = false;
    for (n, qt) in values.iter().enumerate() {
        if n > 0 {
            qn = qn
                .checked_mul(q)
                .ok_or(Error::ExponentOverflow { k: n as u64 })?;
            wn = wn.frobenius();
            wn = wn.truncate(wn.precision().min(prec + margin));
        }
        let vq = match qt.valuation() {
            ValExp::Finite(v) => v,
            ValExp::Infinite => {
                beyond += 1;
                if beyond >= 3 {
                    summed = true;
                    break;
                }
                continue;
            }
        };
        if vq + qn * vw > prec {
            beyond += 1;
            if beyond >= 3 {
                summed = true;
                break;
            }
            continue;
        }
        beyond = 0;
        let term = ratfn_to_laurent(qt, prec - qn * vw).mul(&wn);
        if term.precision() < prec {
            return Err(Error::InvalidInput(
                "point precision too low for the target".into(),
            ));
        }
        rhs = rhs.add(&term).truncate(prec);
    }
    // As in eval_lin_series, one trailing beyond-precision term bounds
    // the tail when the sequence runs out before the triple guard.
    if !summed && beyond == 0 {
        return Err(Error::InvalidInput(
            "basic sequence exhausted below the target precision".into(),
        ));
    }
    Ok(PointReport {
        precision: prec,
        first_mismatch: lhs.first_disagreement(&rhs),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::carlitz::CarlitzCache;
    use crate::genfun::{exp_series, log_series};
    use crate::umbral::{DeltaOperator, SigmaSpec};
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn f2() -> FieldSpec {
        FieldSpec::from_q(2).unwrap()
    }

    fn rf(f: &FieldSpec, src: &str) -> RatFn {
        crate::parse::parse_ratfn(*f, src).unwrap()
    }

    #[test]
    fn embedding_examples() {
        let f = f2();
        let g = ratfn_to_laurent(&rf(&f, "1/(1+x)"), 4);
        assert_eq!(g.valuation(), Some(0));
        for e in 0..4 {
            assert_eq!(g.coeff(e), f.one());
        }
        assert_eq!(format!("{}", g), "1 + x + x^2 + x^3 + O(x^4)");
        let m = ratfn_to_laurent(&rf(&f, "x^3"), 10);
        assert_eq!(m.valuation(), Some(3));
        assert_eq!(m.coeff(3), f.one());
        let p = ratfn_to_laurent(&rf(&f, "1/x"), 5);
        assert_eq!(p.valuation(), Some(-1));
        // Back-multiplication by the denominator recovers the numerator.
        let r = rf(&f, "(x + x^3)/(1 + x + x^4)");
        let emb = ratfn_to_laurent(&r, 12);
        let den = ratfn_to_laurent(&RatFn::from_poly(r.den().clone()), 12);
        let num = ratfn_to_laurent(&RatFn::from_poly(r.num().clone()), 12);
        assert!(emb.mul(&den).agrees_with(&num));
    }

    #[test]
    fn arithmetic_and_precision_rules() {
        let f = f2();
        // Char-2 squaring of the bracket [1] = x + x^2.
        let b1 = ratfn_to_laurent(&rf(&f, "x + x^2"), 10);
        assert!(b1.mul(&b1).agrees_with(&ratfn_to_laurent(&rf(&f, "x^2 + x^4"), 10)));
        // z * inv(z) = 1 to the propagated precision.
        let z = ratfn_to_laurent(&rf(&f, "x + x^3"), 10);
        let zi = z.inv().unwrap();
        assert_eq!(zi.precision(), 8);
        assert_eq!(zi.valuation(), Some(-1));
        let prod = z.mul(&zi);
        assert_eq!(prod.precision(), 9);
        assert!(prod.agrees_with(&ratfn_to_laurent(&RatFn::one(f), 9)));
        // Addition truncates to the smaller precision.
        let a = ratfn_to_laurent(&rf(&f, "1 + x^2"), 6);
        let b = ratfn_to_laurent(&rf(&f, "x"), 4);
        assert_eq!(a.add(&b).precision(), 4);
        // Multiplication: prec(ab) = min(pa + vb, pb + va).
        let c = a.mul(&b);
        assert_eq!(c.precision(), (6 + 1).min(4));
        // Frobenius dilates exponents and multiplies the precision by q.
        let fr = z.frobenius();
        assert_eq!(fr.precision(), 20);
        assert_eq!(fr.valuation(), Some(2));
        assert_eq!(fr.coeff(6), f.one());
        // Inverting the zero-to-precision element is rejected.
        assert_eq!(
            LaurentSeries::zero_to_precision(f, 3).inv().err(),
            Some(Error::ZeroToPrecision)
        );
    }

    #[test]
    fn embedding_is_a_ring_homomorphism() {
        for q in [2u64, 3, 4] {
            let f = FieldSpec::from_q(q).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(11 + q);
            for _ in 0..20 {
                let mut rand_poly = |d: usize| {
                    let coeffs = (0..=d)
                        .map(|_| f.element_at(rng.gen_range(0..q)))
                        .collect::<Vec<_>>();
                    Poly::from_coeffs(f, coeffs)
                };
                let num_a = rand_poly(4);
                let num_b = rand_poly(3);
                let mut den_a = rand_poly(3);
                let mut den_b = rand_poly(2);
                if den_a.is_zero() {
                    den_a = Poly::one(f);
                }
                if den_b.is_zero() {
                    den_b = Poly::one(f);
                }
                let a = RatFn::new(num_a, den_a).unwrap();
                let b = RatFn::new(num_b, den_b).unwrap();
                let (ea, eb) = (ratfn_to_laurent(&a, 14), ratfn_to_laurent(&b, 14));
                assert!(ratfn_to_laurent(&a.add(&b), 14).agrees_with(&ea.add(&eb)));
                assert!(ratfn_to_laurent(&a.mul(&b), 14).agrees_with(&ea.mul(&eb)));
            }
        }
    }

    #[test]
    fn factorial_valuations_match_closed_forms() {
        for q in [2u64, 3] {
            let f = FieldSpec::from_q(q).unwrap();
            let ch = CarlitzCache::new(f, 8).unwrap();
            let mut expected = 0i64;
            for i in 0..=8usize {
                if i > 0 {
                    expected = q as i64 * expected + 1;
                }
                let d = LaurentSeries::from_poly(ch.d(i), expected + 2);
                assert_eq!(d.valuation(), Some(expected), "D_{} at q={}", i, q);
                let l = LaurentSeries::from_poly(ch.l(i), i as i64 + 2);
                assert_eq!(l.valuation(), Some(i as i64), "L_{} at q={}", i, q);
            }
        }
    }

    #[test]
    fn convergence_disks_are_enforced() {
        // q = 2: the disk is v >= 2, so v = 1 diverges.
        let f = f2();
        let ch = CarlitzCache::new(f, 8).unwrap();
        let op = DeltaOperator::new(&ch, SigmaSpec::Carlitz, 8).unwrap();
        let e = exp_series(&op, 8).unwrap();
        let inside = ratfn_to_laurent(&rf(&f, "x^2"), 16);
        let v = eval_lin_series(e.coeffs(), &inside, 16).unwrap();
        assert_eq!(v.valuation(), Some(2));
        assert_eq!(v.precision(), 16);
        let boundary = ratfn_to_laurent(&rf(&f, "x"), 16);
        assert_eq!(
            eval_lin_series(e.coeffs(), &boundary, 16).err(),
            Some(Error::DivergentAtPoint { j: 1 })
        );
        // q = 3: v = 1 lies inside the disk.
        let f3 = FieldSpec::from_q(3).unwrap();
        let ch3 = CarlitzCache::new(f3, 8).unwrap();
        let op3 = DeltaOperator::new(&ch3, SigmaSpec::Carlitz, 8).unwrap();
        let e3 = exp_series(&op3, 8).unwrap();
        let pt = ratfn_to_laurent(&rf(&f3, "x"), 12);
        let v3 = eval_lin_series(e3.coeffs(), &pt, 12).unwrap();
        assert_eq!(v3.valuation(), Some(1));
        // v = 0 diverges in any field.
        let unit = ratfn_to_laurent(&RatFn::one(*ch3.field()), 12);
        assert!(matches!(
            eval_lin_series(e3.coeffs(), &unit, 12),
            Err(Error::DivergentAtPoint { .. })
        ));
    }

    #[test]
    fn functional_equation_at_a_point() {
        let f = f2();
        let ch = CarlitzCache::new(f, 8).unwrap();
        let op = DeltaOperator::new(&ch, SigmaSpec::Carlitz, 8).unwrap();
        let e = exp_series(&op, 8).unwrap();
        let lam = ratfn_to_laurent(&rf(&f, "x^2"), 16);
        let w = eval_lin_series(e.coeffs(), &lam, 16).unwrap();
        // C_x(e_C(x^2)) = e_C(x^3).
        let phi = ch.carlitz_module(&Poly::x(f)).unwrap();
        let lhs = eval_lin_poly(&phi, &w, 16).unwrap();
        let cube = ratfn_to_laurent(&rf(&f, "x^3"), 16);
        let rhs = eval_lin_series(e.coeffs(), &cube, 16).unwrap();
        assert!(lhs.agrees_with(&rhs));
    }

    #[test]
    fn log_and_exp_round_trip_at_points() {
        let f = f2();
        let ch = CarlitzCache::new(f, 8).unwrap();
        let op = DeltaOperator::new(&ch, SigmaSpec::Carlitz, 8).unwrap();
        let e = exp_series(&op, 8).unwrap();
        let lg = log_series(&op, 8).unwrap();
        for src in ["x^2", "x^3", "x^2 + x^3"] {
            let lam = ratfn_to_laurent(&rf(&f, src), 12);
            let u = eval_lin_series(lg.coeffs(), &lam, 12).unwrap();
            // |log t| = |t| on the disk.
            assert_eq!(u.valuation(), lam.valuation());
            let back = eval_lin_series(e.coeffs(), &u, 12).unwrap();
            assert!(back.agrees_with(&lam.truncate(12)));
        }
    }

    #[test]
    fn eq36_at_points_and_negative_control() {
        let f = f2();
        let ch = CarlitzCache::new(f, 8).unwrap();
        let op = DeltaOperator::new(&ch, SigmaSpec::Carlitz, 8).unwrap();
        let seq = crate::umbral::BasicSequence::new(&op, 8).unwrap();
        let lam = ratfn_to_laurent(&rf(&f, "x^2"), 14);
        for t in ["x", "1", "x^3 + x + 1", "0"] {
            let rep = eq36_check(&seq, &lam, &rf(&f, t), 12).unwrap();
            assert!(rep.holds(), "t = {}", t);
        }
        let broken = seq.perturbed(2, 1, &rf(&f, "x"));
        let rep = eq36_check(&broken, &lam, &rf(&f, "x"), 12).unwrap();
        assert!(!rep.holds());
        // Integrality of t is required.
        assert!(matches!(
            eq36_check(&seq, &lam, &rf(&f, "1/x"), 12),
            Err(Error::InvalidInput(_))
        ));
    }
}
