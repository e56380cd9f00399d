//! Generalized exponential and logarithm as truncated F_q-linear series.
//!
//! For a delta operator with eigenvalues c_n the exponential e_delta =
//! sum b_j t^{q^j} is the fixed point of delta, pinned down by b_0 = 1 and
//! the recurrence b_{j+1} = b_j^q / c_{j+1}.  Its composition inverse
//! log_delta = sum beta_l t^{q^l} satisfies beta_0 = 1 and
//! beta_l = -sum_{m=1}^{l} b_m beta_{l-m}^{q^m}.  Truncation is indexed by
//! the Frobenius level: a series of order M is known modulo t^{q^{M+1}},
//! and composition of two order-M series is again exact to order M.
//!
//! The checks in this module are exact zero tests on factored fractions:
//! the composite series e o log and log o e against the identity, the
//! fixed-point equation delta_0 e = e^q, the generating identity
//! gamma_j^{(n)} = b_j beta_{n-j}^{q^j} tying the series to the basic
//! sequence table, and the valuation profile -v(b_j) = (q^j-1)/(q-1) with
//! the ultrametric bound -v(beta_j) <= (q^j-1)/(q-1).

use crate::carlitz::CarlitzCache;
use crate::error::{Error, Result};
use crate::frac::{Frac, PowCache};
use crate::gf::FieldSpec;
use crate::poly::Poly;
use crate::ratfn::{RatFn, ValExp};
use crate::umbral::{BasicSequence, DeltaOperator, SigmaSpec};

/// F_q-linear power series truncated at Frobenius level `order`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FormalLinSeries {
    field: FieldSpec,
    coeffs: Vec<RatFn>,
}

impl FormalLinSeries {
    /// Series with the given coefficients of t^{q^j}; the order is the
    /// index of the last entry.
    pub fn from_coeffs(field: FieldSpec, coeffs: Vec<RatFn>) -> FormalLinSeries {
        assert!(!coeffs.is_empty());
        FormalLinSeries { field, coeffs }
    }

    /// The identity series t, truncated at the given order.
    pub fn identity(field: FieldSpec, order: usize) -> FormalLinSeries {
        let mut coeffs = vec![RatFn::zero(field); order + 1];
        coeffs[0] = RatFn::one(field);
        FormalLinSeries { field, coeffs }
    }

    pub fn field(&self) -> &FieldSpec {
        &self.field
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Coefficient of t^{q^j}.
    pub fn coeff(&self, j: usize) -> &RatFn {
        assert!(j < self.coeffs.len());
        &self.coeffs[j]
    }

    pub fn coeffs(&self) -> &[RatFn] {
        &self.coeffs
    }

    pub fn is_identity(&self) -> bool {
        self.coeffs[0].is_one() && self.coeffs[1..].iter().all(RatFn::is_zero)
    }
}

/// Composite series u(v(t)) truncated at the smaller of the two orders:
/// coefficient m is sum_{j+k=m} u_j v_k^{q^j}.
pub fn series_compose(u: &FormalLinSeries, v: &FormalLinSeries) -> Result<FormalLinSeries> {
    let f = *u.field();
    let order = u.order().min(v.order());
    let mut coeffs = Vec::with_capacity(order + 1);
    for m in 0..=order {
        let mut acc = RatFn::zero(f);
        for j in 0..=m {
            let term = u.coeff(j).mul(&v.coeff(m - j).frobenius_power(j as u32)?);
            acc = acc.add(&term);
        }
        coeffs.push(acc);
    }
    Ok(FormalLinSeries { field: f, coeffs })
}

/// Exponential coefficients b_0..b_m in factored form.
pub(crate) fn exp_fracs(op: &DeltaOperator, m: usize) -> Result<Vec<Frac>> {
    assert!(m <= op.order());
    let f = *op.field();
    let mut b = Vec::with_capacity(m + 1);
    b.push(Frac::one(f));
    for j in 1..=m {
        let inv = op.c_frac(j).inverse()?;
        let prev: &Frac = &b[j - 1];
        b.push(prev.frob(1)?.mul(&inv));
    }
    Ok(b)
}

/// Logarithm coefficients beta_0..beta_m in factored form, from the
/// exponential table.
pub(crate) fn log_fracs(b: &[Frac], pc: &mut PowCache) -> Result<Vec<Frac>> {
    let f = *b[0].field();
    let mut beta = Vec::with_capacity(b.len());
    beta.push(Frac::one(f));
    for l in 1..b.len() {
        let mut terms = Vec::with_capacity(l);
        for m in 1..=l {
            terms.push(b[m].mul(&beta[l - m].frob(m as u32)?));
        }
        beta.push(Frac::add_all_cached(&terms, pc).neg());
    }
    Ok(beta)
}

/// The exponential e_delta truncated at order m.
pub fn exp_series(op: &DeltaOperator, m: usize) -> Result<FormalLinSeries> {
    let b = exp_fracs(op, m)?;
    let coeffs = b.iter().map(Frac::to_ratfn).collect::<Result<Vec<_>>>()?;
    Ok(FormalLinSeries::from_coeffs(*op.field(), coeffs))
}

/// The logarithm log_delta truncated at order m.
pub fn log_series(op: &DeltaOperator, m: usize) -> Result<FormalLinSeries> {
    let beta = log_fracs(&exp_fracs(op, m)?, &mut PowCache::new())?;
    let coeffs = beta
        .iter()
        .map(Frac::to_ratfn)
        .collect::<Result<Vec<_>>>()?;
    Ok(FormalLinSeries::from_coeffs(*op.field(), coeffs))
}

/// Outcome of the fixed-point check delta_0 s = s^q on a series.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FixedPointReport {
    pub levels: usize,
    pub first_failure: Option<usize>,
}

impl FixedPointReport {
    pub fn holds(&self) -> bool {
        self.first_failure.is_none()
    }
}

/// Verifies c_n s_n = s_{n-1}^q for 1 <= n <= order(s); level 0 is killed
/// by delta_0 and absent from s^q, so it never constrains.
pub fn delta_fixed_point_check(op: &DeltaOperator, s: &FormalLinSeries) -> Result<FixedPointReport> {
    let m = s.order();
    assert!(m <= op.order());
    let mut first_failure = None;
    for n in 1..=m {
        let lhs = op.c_frac(n).mul(&Frac::from_ratfn(s.coeff(n)));
        let rhs = Frac::from_ratfn(s.coeff(n - 1)).frob(1)?;
        if !lhs.sub(&rhs).is_zero() {
            first_failure = Some(n);
            break;
        }
    }
    Ok(FixedPointReport {
        levels: m,
        first_failure,
    })
}

/// Outcome of the three series identities run on the factored tables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeriesReport {
    pub order: usize,
    /// First level where c_n b_n != b_{n-1}^q.
    pub fixed_point: Option<usize>,
    /// First coefficient where e o log differs from the identity.
    pub exp_log: Option<usize>,
    /// First coefficient where log o e differs from the identity.
    pub log_exp: Option<usize>,
}

impl SeriesReport {
    pub fn holds(&self) -> bool {
        self.fixed_point.is_none() && self.exp_log.is_none() && self.log_exp.is_none()
    }
}

fn compose_defect(u: &[Frac], v: &[Frac], m: usize, pc: &mut PowCache) -> Result<Option<usize>> {
    let f = *u[0].field();
    for msum in 0..=m {
        let mut terms = Vec::with_capacity(msum + 2);
        for j in 0..=msum {
            terms.push(u[j].mul(&v[msum - j].frob(j as u32)?));
        }
        if msum == 0 {
            terms.push(Frac::one(f).neg());
        }
        if !Frac::add_all_cached(&terms, pc).is_zero() {
            return Ok(Some(msum));
        }
    }
    Ok(None)
}

/// Builds the b and beta tables once and verifies the fixed point and both
/// composition inverses exactly, entirely in factored form.
pub fn series_identity_check(op: &DeltaOperator, m: usize) -> Result<SeriesReport> {
    let mut pc = PowCache::new();
    let b = exp_fracs(op, m)?;
    let beta = log_fracs(&b, &mut pc)?;
    let mut fixed_point = None;
    for n in 1..=m {
        let terms = [op.c_frac(n).mul(&b[n]), b[n - 1].frob(1)?.neg()];
        if !Frac::add_all_cached(&terms, &mut pc).is_zero() {
            fixed_point = Some(n);
            break;
        }
    }
    Ok(SeriesReport {
        order: m,
        fixed_point,
        exp_log: compose_defect(&b, &beta, m, &mut pc)?,
        log_exp: compose_defect(&beta, &b, m, &mut pc)?,
    })
}

/// Outcome of the generating identity gamma_j^{(n)} = b_j beta_{n-j}^{q^j}.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneratingReport {
    pub order: usize,
    pub first_mismatch: Option<(usize, usize)>,
}

impl GeneratingReport {
    pub fn holds(&self) -> bool {
        self.first_mismatch.is_none()
    }
}

/// Compares the coefficient table of the basic sequence with the products
/// b_j beta_{n-j}^{q^j} for 0 <= j <= n <= m; both sides are exact.
pub fn generating_identity_check(seq: &BasicSequence, m: usize) -> Result<GeneratingReport> {
    assert!(m <= seq.order());
    let mut pc = PowCache::new();
    let b = exp_fracs(seq.op(), m)?;
    let beta = log_fracs(&b, &mut pc)?;
    let mut first_mismatch = None;
    'scan: for n in 0..=m {
        for j in 0..=n {
            let terms = [
                seq.gamma_frac(n, j).clone(),
                b[j].mul(&beta[n - j].frob(j as u32)?).neg(),
            ];
            if !Frac::add_all_cached(&terms, &mut pc).is_zero() {
                first_mismatch = Some((j, n));
                break 'scan;
            }
        }
    }
    Ok(GeneratingReport {
        order: m,
        first_mismatch,
    })
}

/// One row of the valuation profile.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProfileRow {
    pub j: usize,
    /// (q^j - 1)/(q - 1).
    pub expected: i64,
    /// -v(b_j), exact from the factored product.
    pub b_exponent: i64,
    /// Certified upper bound on -v(beta_j) from the ultrametric minimum.
    pub beta_bound: i64,
}

/// Outcome of the valuation profile check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ValuationReport {
    /// |sigma_1| = 1 or |sigma_l| <= 1 fails; the profile does not apply.
    HypothesisNotMet { level: usize, valuation: i64 },
    Failed {
        j: usize,
        expected: i64,
        b_exponent: i64,
        beta_bound: i64,
    },
    Verified { rows: Vec<ProfileRow> },
}

impl ValuationReport {
    pub fn verified(&self) -> bool {
        matches!(self, ValuationReport::Verified { .. })
    }
}

/// Exact valuation bookkeeping for the series coefficients, without any
/// polynomial expansion.
///
/// Under the hypotheses, the l = 1 term of S_n strictly dominates, so
/// v(S_n) is the unique minimum of the per-term valuations and v(c_n),
/// v(b_j) follow exactly by additivity.  For beta the ultrametric gives
/// the certified bound v(beta_l) >= min_m (v(b_m) + q^m v(beta_{l-m})).
pub fn valuation_profile(
    cache: &CarlitzCache,
    sigma: &SigmaSpec,
    m: usize,
) -> Result<ValuationReport> {
    assert!(m <= cache.max_order());
    let q = cache.field().q() as i64;
    // Hypotheses: v(sigma_1) = 0 and v(sigma_l) >= 0 (zero passes).
    let mut v_sigma = Vec::with_capacity(m + 1);
    v_sigma.push(ValExp::Infinite);
    for l in 1..=m {
        let v = sigma.sigma_frac(cache, l)?.valuation();
        match v {
            ValExp::Infinite => {
                if l == 1 {
                    return Err(Error::NotDeltaOperator(1));
                }
            }
            ValExp::Finite(vl) => {
                if (l == 1 && vl != 0) || vl < 0 {
                    return Ok(ValuationReport::HypothesisNotMet {
                        level: l,
                        valuation: vl,
                    });
                }
            }
        }
        v_sigma.push(v);
    }
    let v_d = |i: usize| cache.d(i).ord().expect("D_i is nonzero") as i64;
    // v(c_n) = v(D_n) + v(S_n) with v(S_n) the unique minimum over terms.
    let mut v_c = vec![0i64; m + 1];
    for n in 1..=m {
        let mut best: Option<i64> = None;
        let mut tied = false;
        for l in 1..=n {
            if let ValExp::Finite(vs) = v_sigma[l] {
                let vt = vs - (cache.q_pow(l as u32)? as i64) * v_d(n - l);
                match best {
                    Some(b) if vt > b => {}
                    Some(b) if vt == b => tied = true,
                    _ => {
                        best = Some(vt);
                        tied = false;
                    }
                }
            }
        }
        let vs = best.ok_or(Error::NotDeltaOperator(n))?;
        if tied {
            return Err(Error::InvalidInput(format!(
                "tied dominant terms in S_{}: valuation not certified",
                n
            )));
        }
        v_c[n] = v_d(n) + vs;
    }
    // b recurrence on valuations, beta bound by the ultrametric minimum.
    let mut rows = Vec::with_capacity(m + 1);
    let mut v_b = vec![0i64; m + 1];
    let mut v_beta = vec![0i64; m + 1];
    let mut expected = vec![0i64; m + 1];
    for j in 0..=m {
        if j > 0 {
            expected[j] = q * expected[j - 1] + 1;
            v_b[j] = q * v_b[j - 1] - v_c[j];
            v_beta[j] = (1..=j)
                .map(|mm| v_b[mm] + (q.pow(mm as u32)) * v_beta[j - mm])
                .min()
                .unwrap();
        }
        let row = ProfileRow {
            j,
            expected: expected[j],
            b_exponent: -v_b[j],
            beta_bound: -v_beta[j],
        };
        if row.b_exponent != row.expected || row.beta_bound > row.expected {
            return Ok(ValuationReport::Failed {
                j,
                expected: row.expected,
                b_exponent: row.b_exponent,
                beta_bound: row.beta_bound,
            });
        }
        rows.push(row);
    }
    Ok(ValuationReport::Verified { rows })
}

/// Verifies the Carlitz functional equation C_s(e_C(t)) = e_C(st) as
/// truncated series: sum_{j+k=m} phi_j b_k^{q^j} = b_m s^{q^m} for m <= order,
/// where phi = C_s and b_k = 1/D_k.
pub fn carlitz_functional_check(cache: &CarlitzCache, s: &Poly, order: usize) -> Result<bool> {
    assert!(order <= cache.max_order());
    let f = *cache.field();
    let phi = cache.carlitz_module(s)?;
    let mut b = Vec::with_capacity(order + 1);
    for k in 0..=order {
        b.push(Frac::new(Poly::one(f), cache.d_atoms(k, 0)?));
    }
    for m in 0..=order {
        let mut terms = Vec::with_capacity(m + 2);
        for j in 0..=m {
            let cj = phi.coeff(j);
            if cj.is_zero() {
                continue;
            }
            terms.push(Frac::from_ratfn(&cj).mul(&b[m - j].frob(j as u32)?));
        }
        let e = cache.q_pow(m as u32)?;
        terms.push(b[m].mul_poly(&s.frobenius_power(e)).neg());
        if !Frac::add_all(&terms).is_zero() {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cache(q: u64, n: usize) -> CarlitzCache {
        CarlitzCache::new(FieldSpec::from_q(q).unwrap(), n).unwrap()
    }

    #[test]
    fn carlitz_series_closed_forms() {
        for q in [2u64, 3] {
            let ch = cache(q, 6);
            let f = *ch.field();
            let op = DeltaOperator::new(&ch, SigmaSpec::Carlitz, 6).unwrap();
            let e = exp_series(&op, 6).unwrap();
            let lg = log_series(&op, 6).unwrap();
            assert!(e.coeff(0).is_one());
            assert_eq!(lg.coeff(1), &e.coeff(1).neg());
            for j in 0..=6 {
                let bj = RatFn::new(Poly::one(f), ch.d(j).clone()).unwrap();
                assert_eq!(e.coeff(j), &bj);
                let lj = RatFn::new(Poly::constant(f, ch.sign(j)), ch.l(j).clone()).unwrap();
                assert_eq!(lg.coeff(j), &lj);
            }
        }
    }

    #[test]
    fn example2_series_telescope() {
        let ch = cache(3, 6);
        let f = *ch.field();
        let op = DeltaOperator::new(&ch, SigmaSpec::Example2, 6).unwrap();
        let e = exp_series(&op, 6).unwrap();
        let lg = log_series(&op, 6).unwrap();
        // b_j = 1 and log = t - t^q: the composite telescopes.
        for j in 0..=6 {
            assert!(e.coeff(j).is_one());
        }
        assert!(lg.coeff(0).is_one());
        assert_eq!(lg.coeff(1), &RatFn::one(f).neg());
        assert!(lg.coeffs()[2..].iter().all(RatFn::is_zero));
        assert!(series_compose(&e, &lg).unwrap().is_identity());
    }

    #[test]
    fn composition_inverts_materialized_series() {
        let ch = cache(2, 4);
        for sigma in [SigmaSpec::Carlitz, SigmaSpec::Laguerre, SigmaSpec::Example2] {
            let op = DeltaOperator::new(&ch, sigma, 4).unwrap();
            let e = exp_series(&op, 4).unwrap();
            let lg = log_series(&op, 4).unwrap();
            assert!(series_compose(&e, &lg).unwrap().is_identity());
            assert!(series_compose(&lg, &e).unwrap().is_identity());
            let id = FormalLinSeries::identity(*op.field(), 4);
            assert_eq!(series_compose(&e, &id).unwrap(), e);
        }
    }

    #[test]
    fn fixed_point_holds_and_fault_is_localized() {
        let ch = cache(2, 5);
        let f = *ch.field();
        for sigma in [SigmaSpec::Carlitz, SigmaSpec::Laguerre] {
            let op = DeltaOperator::new(&ch, sigma, 5).unwrap();
            let e = exp_series(&op, 5).unwrap();
            let rep = delta_fixed_point_check(&op, &e).unwrap();
            assert!(rep.holds());
            assert_eq!(rep.levels, 5);
            let mut broken = e.coeffs().to_vec();
            broken[2] = broken[2].add(&RatFn::one(f));
            let broken = FormalLinSeries::from_coeffs(f, broken);
            let rep = delta_fixed_point_check(&op, &broken).unwrap();
            assert_eq!(rep.first_failure, Some(2));
        }
    }

    #[test]
    fn table_identities_hold_to_order_six() {
        for q in [2u64, 3] {
            let ch = cache(q, 6);
            for sigma in [SigmaSpec::Carlitz, SigmaSpec::Laguerre, SigmaSpec::Example2] {
                let op = DeltaOperator::new(&ch, sigma, 6).unwrap();
                let rep = series_identity_check(&op, 6).unwrap();
                assert!(rep.holds(), "q={} {:?}", q, rep);
            }
        }
    }

    #[test]
    fn generating_identity_matches_gamma_table() {
        let ch = cache(2, 4);
        let f = *ch.field();
        for sigma in [SigmaSpec::Carlitz, SigmaSpec::Laguerre] {
            let op = DeltaOperator::new(&ch, sigma, 4).unwrap();
            let seq = BasicSequence::new(&op, 4).unwrap();
            let rep = generating_identity_check(&seq, 4).unwrap();
            assert!(rep.holds());
            let broken = seq.perturbed(3, 1, &RatFn::one(f));
            let rep = generating_identity_check(&broken, 4).unwrap();
            assert_eq!(rep.first_mismatch, Some((1, 3)));
        }
    }

    #[test]
    fn valuation_profile_rows_and_hypothesis() {
        for q in [2u64, 3] {
            let ch = cache(q, 8);
            for sigma in [SigmaSpec::Carlitz, SigmaSpec::Laguerre] {
                match valuation_profile(&ch, &sigma, 8).unwrap() {
                    ValuationReport::Verified { rows } => {
                        assert_eq!(rows.len(), 9);
                        for (j, row) in rows.iter().enumerate() {
                            assert_eq!(row.j, j);
                            assert_eq!(row.b_exponent, row.expected);
                            assert_eq!(row.beta_bound, row.expected);
                        }
                    }
                    other => panic!("expected verified profile, got {:?}", other),
                }
            }
            assert_eq!(
                valuation_profile(&ch, &SigmaSpec::Example2, 8).unwrap(),
                ValuationReport::HypothesisNotMet {
                    level: 1,
                    valuation: -1
                }
            );
        }
        // The carlitz logarithm has -v(beta_j) = j, well under the bound.
        let ch = cache(2, 6);
        let op = DeltaOperator::new(&ch, SigmaSpec::Carlitz, 6).unwrap();
        let lg = log_series(&op, 6).unwrap();
        for j in 0..=6 {
            assert_eq!(lg.coeff(j).valuation(), ValExp::Finite(-(j as i64)));
        }
        // An all-zero sigma is not a delta operator at all.
        let f = *ch.field();
        let zero = SigmaSpec::Explicit(vec![RatFn::zero(f)]);
        assert_eq!(
            valuation_profile(&ch, &zero, 4).err(),
            Some(Error::NotDeltaOperator(1))
        );
    }

    #[test]
    fn functional_equation_truncated() {
        for q in [2u64, 3] {
            let ch = cache(q, 4);
            let f = *ch.field();
            for s in [
                Poly::x_pow(f, 1),
                Poly::x_pow(f, 2),
                Poly::x_pow(f, 2).add(&Poly::x_pow(f, 1)).add(&Poly::one(f)),
            ] {
                assert!(carlitz_functional_check(&ch, &s, 4).unwrap(), "q={}", q);
            }
            // A constant acts by scaling, which also satisfies the equation.
            assert!(carlitz_functional_check(&ch, &Poly::one(f), 4).unwrap());
        }
    }
}
