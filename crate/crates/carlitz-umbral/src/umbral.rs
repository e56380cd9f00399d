//! Delta operators and their basic sequences over K = F_q(x).
//!
//! A delta operator is determined by a sigma sequence (σ_1, σ_2, ...):
//! the twisted form δ₀ acts diagonally on the monomials t^{q^n} with
//! eigenvalues c_n = D_n S_n, where S_n = Σ_{l=1}^n σ_l / D_{n−l}^{q^l},
//! and δ = τ⁻¹ δ₀. The sigma data defines a delta operator iff S_n ≠ 0
//! for every n in range.
//!
//! Each delta operator owns a unique basic sequence {Q_n}: Q_0 = t,
//! deg Q_n = q^n, Q_n(1) = 0 for n ≥ 1, and δ Q_n = Q_{n−1}. Its
//! coefficient table γ_j^{(n)} obeys γ_{i+1}^{(n)} = (γ_i^{(n−1)})^q / c_{i+1},
//! closed by γ_0^{(n)} = −Σ_{j≥1} γ_j^{(n)}; the unnormalized companion is
//! P_n = D_n Q_n. Iterates δ₀^{(l)} = τ^l δ^l act diagonally with
//! eigenvalues E_{l,n} = Π_{k<l} c_{n−k}^{q^k}.
//!
//! All identity checks run as exact zero tests in the factored-fraction
//! engine: the K-binomial identity in two variables, generalized Taylor
//! expansion with two independent coefficient routes, expansion of
//! invariant operators over a basic sequence, and sup norms in the
//! orthonormal Carlitz basis {f_i}.

use crate::carlitz::CarlitzCache;
use crate::error::{Error, Result};
use crate::frac::{atom_pow, Frac, PowCache};
use crate::gf::FieldSpec;
use crate::linpoly::LinPoly;
use crate::poly::Poly;
use crate::ratfn::{RatFn, ValExp};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Defining data of a delta operator: the coefficients σ_l of the
/// invariant-operator expansion of δ₀. Explicit lists are zero-extended.
#[derive(Debug, Clone, PartialEq)]
pub enum SigmaSpec {
    /// σ_1 = 1, σ_l = 0 for l ≥ 2: δ₀ is the Carlitz difference operator.
    Carlitz,
    /// σ_l = 1 for all l ≥ 1: the Laguerre-type operator.
    Laguerre,
    /// σ_l = (−1)^{l+1} / L_l: the operator with S_n = 1/D_n and c_n = 1.
    Example2,
    Explicit(Vec<RatFn>),
}

impl SigmaSpec {
    pub(crate) fn sigma_frac(&self, cache: &CarlitzCache, l: usize) -> Result<Frac> {
        assert!(l >= 1, "sigma index starts at 1");
        let f = *cache.field();
        Ok(match self {
            SigmaSpec::Carlitz => {
                if l == 1 {
                    Frac::one(f)
                } else {
                    Frac::zero(f)
                }
            }
            SigmaSpec::Laguerre => Frac::one(f),
            SigmaSpec::Example2 => Frac::new(
                Poly::constant(f, cache.sign(l + 1)),
                cache.l_atoms(l, 0)?,
            ),
            SigmaSpec::Explicit(v) => v
                .get(l - 1)
                .map(Frac::from_ratfn)
                .unwrap_or_else(|| Frac::zero(f)),
        })
    }

    /// σ_l in canonical form.
    pub fn sigma(&self, cache: &CarlitzCache, l: usize) -> Result<RatFn> {
        self.sigma_frac(cache, l)?.to_ratfn()
    }
}

/// A delta operator to finite order N: the tables S_n, c_n = D_n S_n and
/// E_{l,n} for indices ≤ N. Construction fails atomically on the first
/// vanishing S_n.
pub struct DeltaOperator<'a> {
    cache: &'a CarlitzCache,
    sigma: SigmaSpec,
    n_max: usize,
    s: Vec<Frac>,
    c: Vec<Frac>,
    c_rat: Vec<RatFn>,
    e: Vec<Vec<Frac>>,
}

impl<'a> DeltaOperator<'a> {
    pub fn new(cache: &'a CarlitzCache, sigma: SigmaSpec, n_max: usize) -> Result<Self> {
        assert!(n_max <= cache.max_order(), "order exceeds cache");
        let f = *cache.field();
        let mut s = vec![Frac::one(f)];
        let mut c = vec![Frac::one(f)];
        let mut c_rat = vec![RatFn::one(f)];
        for n in 1..=n_max {
            // S_n = sum_{l=1}^n sigma_l / D_{n-l}^{q^l}
            let mut terms = Vec::new();
            for l in 1..=n {
                let sl = sigma.sigma_frac(cache, l)?;
                if sl.is_zero() {
                    continue;
                }
                terms.push(sl.mul(&Frac::new(
                    Poly::one(f),
                    cache.d_atoms(n - l, l as u32)?,
                )));
            }
            let sn = if terms.is_empty() {
                Frac::zero(f)
            } else {
                Frac::add_all(&terms)
            };
            if sn.is_zero() {
                return Err(Error::NotDeltaOperator(n));
            }
            // c_n = D_n S_n, reduced once so the gamma recurrence divides
            // by minimal atoms.
            let cn = sn.mul_poly(cache.d(n)).to_ratfn()?;
            s.push(sn);
            c.push(Frac::from_ratfn(&cn));
            c_rat.push(cn);
        }
        // E_{0,n} = 1, E_{l,n} = c_n E_{l-1,n-1}^q; zero above the diagonal.
        let mut e = vec![vec![Frac::zero(f); n_max + 1]; n_max + 1];
        for n in 0..=n_max {
            e[0][n] = Frac::one(f);
        }
        for l in 1..=n_max {
            for n in l..=n_max {
                e[l][n] = c[n].mul(&e[l - 1][n - 1].frob(1)?);
            }
        }
        Ok(DeltaOperator {
            cache,
            sigma,
            n_max,
            s,
            c,
            c_rat,
            e,
        })
    }

    pub fn cache(&self) -> &'a CarlitzCache {
        self.cache
    }

    pub fn field(&self) -> &FieldSpec {
        self.cache.field()
    }

    pub fn sigma_spec(&self) -> &SigmaSpec {
        &self.sigma
    }

    pub fn order(&self) -> usize {
        self.n_max
    }

    /// S_n in canonical form, 1 ≤ n ≤ N.
    pub fn s_value(&self, n: usize) -> Result<RatFn> {
        assert!((1..=self.n_max).contains(&n));
        self.s[n].to_ratfn()
    }

    /// v(S_n), exact without reduction.
    pub fn s_valuation(&self, n: usize) -> ValExp {
        assert!((1..=self.n_max).contains(&n));
        self.s[n].valuation()
    }

    /// c_n = D_n S_n, the δ₀ eigenvalue on t^{q^n}.
    pub fn c_value(&self, n: usize) -> &RatFn {
        assert!((1..=self.n_max).contains(&n));
        &self.c_rat[n]
    }

    /// E_{l,n}, the δ₀^{(l)} eigenvalue on t^{q^n}.
    pub fn eigenvalue(&self, l: usize, n: usize) -> Result<RatFn> {
        assert!(l <= self.n_max && n <= self.n_max);
        self.e[l][n].to_ratfn()
    }

    pub(crate) fn c_frac(&self, n: usize) -> &Frac {
        &self.c[n]
    }

    pub(crate) fn e_frac(&self, l: usize, n: usize) -> &Frac {
        &self.e[l][n]
    }

    fn check_order(&self, u: &LinPoly) -> Result<()> {
        if let Some(m) = u.order() {
            if m > self.n_max {
                return Err(Error::OrderExceeded {
                    requested: m,
                    cached: self.n_max,
                });
            }
        }
        Ok(())
    }

    /// δ₀: kills t, multiplies the level-n coefficient by c_n.
    pub fn delta0_apply(&self, u: &LinPoly) -> Result<LinPoly> {
        self.check_order(u)?;
        let f = *self.field();
        let mut out = vec![RatFn::zero(f); u.coeffs().len()];
        for (n, a) in u.coeffs().iter().enumerate().skip(1) {
            out[n] = a.mul(&self.c_rat[n]);
        }
        Ok(LinPoly::from_coeffs(f, out))
    }

    /// δ = τ⁻¹ δ₀. Fails with QthRootNotExist unless every c_n a_n is a
    /// q-th power, as it is on basic sequences; failure on generic input
    /// reflects that δ maps into a larger coefficient field.
    pub fn delta_apply(&self, u: &LinPoly) -> Result<LinPoly> {
        self.delta0_apply(u)?.tau_power(-1)
    }

    /// δ₀^{(l)} = τ^l δ^l: diagonal with eigenvalues E_{l,n} (zero for n < l).
    pub fn delta0_iter(&self, l: usize, u: &LinPoly) -> Result<LinPoly> {
        assert!(l <= self.n_max);
        self.check_order(u)?;
        let f = *self.field();
        let mut out = vec![RatFn::zero(f); u.coeffs().len()];
        for (n, a) in u.coeffs().iter().enumerate().skip(l) {
            if !a.is_zero() {
                out[n] = a.mul(&self.e[l][n].to_ratfn()?);
            }
        }
        Ok(LinPoly::from_coeffs(f, out))
    }
}

/// The Carlitz-case iterate built the other way: l steps of
/// v ↦ v(xt) − x^{q^{k−1}} v(t), an independent construction that must
/// agree with `delta0_iter` for the carlitz preset.
pub fn delta0_recursive(cache: &CarlitzCache, l: usize, u: &LinPoly) -> Result<LinPoly> {
    assert!(l <= cache.max_order());
    let f = *cache.field();
    let x = RatFn::x(f);
    let mut v = u.clone();
    for k in 1..=l {
        let shift = x.frobenius_power(k as u32 - 1)?;
        v = v.rho(&x)?.sub(&v.scale(&shift));
    }
    Ok(v)
}

/// Basic sequence of a delta operator: the γ table and the polynomials
/// Q_n (normalized) and P_n = D_n Q_n.
pub struct BasicSequence<'a, 'o> {
    op: &'o DeltaOperator<'a>,
    n_max: usize,
    gamma: Vec<Vec<Frac>>,
}

impl<'a, 'o> BasicSequence<'a, 'o> {
    pub fn new(op: &'o DeltaOperator<'a>, n_max: usize) -> Result<Self> {
        assert!(n_max <= op.order(), "order exceeds operator tables");
        let f = *op.field();
        let mut inv_c = vec![Frac::one(f)];
        for i in 1..=n_max {
            inv_c.push(op.c_frac(i).inverse()?);
        }
        let mut gamma = vec![vec![Frac::one(f)]];
        for n in 1..=n_max {
            let mut row = vec![Frac::zero(f); n + 1];
            for i in 0..n {
                row[i + 1] = gamma[n - 1][i].frob(1)?.mul(&inv_c[i + 1]);
            }
            // Q_n(1) = 0 pins the free coefficient.
            row[0] = Frac::add_all(&row[1..]).neg();
            gamma.push(row);
        }
        Ok(BasicSequence { op, n_max, gamma })
    }

    pub fn op(&self) -> &'o DeltaOperator<'a> {
        self.op
    }

    pub fn field(&self) -> &FieldSpec {
        self.op.field()
    }

    pub fn order(&self) -> usize {
        self.n_max
    }

    /// γ_j^{(n)}, the level-j coefficient of Q_n, in canonical form.
    pub fn gamma(&self, n: usize, j: usize) -> Result<RatFn> {
        self.gamma_frac(n, j).to_ratfn()
    }

    pub(crate) fn gamma_frac(&self, n: usize, j: usize) -> &Frac {
        assert!(n <= self.n_max && j <= n);
        &self.gamma[n][j]
    }

    /// Q_n as an explicit linear polynomial.
    pub fn q_poly(&self, n: usize) -> Result<LinPoly> {
        assert!(n <= self.n_max);
        let mut coeffs = Vec::with_capacity(n + 1);
        for j in 0..=n {
            coeffs.push(self.gamma[n][j].to_ratfn()?);
        }
        Ok(LinPoly::from_coeffs(*self.field(), coeffs))
    }

    /// P_n = D_n Q_n.
    pub fn p_poly(&self, n: usize) -> Result<LinPoly> {
        let d = self.op.cache().d(n);
        Ok(self.q_poly(n)?.scale(&RatFn::from_poly(d.clone())))
    }

    /// Copy with γ_j^{(n)} shifted by delta: the injected fault used by
    /// the negative-control paths of the verification suites.
    pub fn perturbed(&self, n: usize, j: usize, delta: &RatFn) -> BasicSequence<'a, 'o> {
        assert!(n <= self.n_max && j <= n);
        let mut gamma = self.gamma.clone();
        gamma[n][j] = gamma[n][j].add(&Frac::from_ratfn(delta));
        BasicSequence {
            op: self.op,
            n_max: self.n_max,
            gamma,
        }
    }
}

/// Bilinear accumulator over s^{q^j} t^{q^k} with factored-fraction cells;
/// push terms from both sides (one side negated), then scan for the first
/// cell whose exact sum is nonzero.
struct FracAcc {
    field: FieldSpec,
    cells: Vec<Vec<Vec<Frac>>>,
}

impl FracAcc {
    fn new(field: FieldSpec) -> FracAcc {
        FracAcc {
            field,
            cells: Vec::new(),
        }
    }

    fn push(&mut self, j: usize, k: usize, t: Frac) {
        if t.is_zero() {
            return;
        }
        if self.cells.len() <= j {
            self.cells.resize_with(j + 1, Vec::new);
        }
        let row = &mut self.cells[j];
        if row.len() <= k {
            row.resize_with(k + 1, Vec::new);
        }
        row[k].push(t);
    }

    fn first_nonzero(&self, pc: &mut PowCache) -> Option<(usize, usize, Frac)> {
        for (j, row) in self.cells.iter().enumerate() {
            for (k, terms) in row.iter().enumerate() {
                if terms.is_empty() {
                    continue;
                }
                let s = Frac::add_all_cached(terms, pc);
                if !s.is_zero() {
                    return Some((j, k, s));
                }
            }
        }
        let _ = self.field;
        None
    }
}

/// Outcome of the two K-binomial identities for one index i.
#[derive(Debug, Clone)]
pub struct BinomialReport {
    pub index: usize,
    /// Q_i(st) = Σ_n Q_n(t) Q_{i−n}(s)^{q^n}.
    pub q_form_ok: bool,
    /// P_i(st) = Σ_n binom_K(i,n) P_n(t) P_{i−n}(s)^{q^n} with the
    /// independently computed binom_K(i,n) = D_i/(D_n D_{i−n}^{q^n}).
    pub p_form_ok: bool,
    /// (j, k, value) of the first nonzero cell of LHS − RHS, if any.
    pub first_mismatch: Option<(usize, usize, RatFn)>,
}

impl BinomialReport {
    pub fn holds(&self) -> bool {
        self.q_form_ok && self.p_form_ok
    }
}

/// Checks both forms of the K-binomial identity for Q_i / P_i.
pub fn k_binomial_check(seq: &BasicSequence, i: usize) -> Result<BinomialReport> {
    assert!(i <= seq.order());
    let f = *seq.field();
    let cache = seq.op().cache();
    let mut pc = PowCache::new();

    let mut q_acc = FracAcc::new(f);
    for m in 0..=i {
        q_acc.push(m, m, seq.gamma_frac(i, m).clone());
    }
    for n in 0..=i {
        for k in 0..=n {
            let gk = seq.gamma_frac(n, k);
            if gk.is_zero() {
                continue;
            }
            for j in 0..=(i - n) {
                let gj = seq.gamma_frac(i - n, j).frob(n as u32)?;
                q_acc.push(j + n, k, gk.mul(&gj).neg());
            }
        }
    }
    let q_bad = q_acc.first_nonzero(&mut pc);

    let mut p_acc = FracAcc::new(f);
    for m in 0..=i {
        p_acc.push(m, m, seq.gamma_frac(i, m).mul_poly(cache.d(i)));
    }
    for n in 0..=i {
        let binom = cache.k_binomial(i, n)?;
        for k in 0..=n {
            let pk = seq.gamma_frac(n, k).mul_poly(cache.d(n));
            if pk.is_zero() {
                continue;
            }
            for j in 0..=(i - n) {
                let pj = seq
                    .gamma_frac(i - n, j)
                    .mul_poly(cache.d(i - n))
                    .frob(n as u32)?;
                p_acc.push(j + n, k, pk.mul(&pj).mul_poly(&binom).neg());
            }
        }
    }
    let p_bad = p_acc.first_nonzero(&mut pc);

    let first = match (&q_bad, &p_bad) {
        (Some((j, k, v)), _) | (None, Some((j, k, v))) => Some((*j, *k, v.to_ratfn()?)),
        (None, None) => None,
    };
    Ok(BinomialReport {
        index: i,
        q_form_ok: q_bad.is_none(),
        p_form_ok: p_bad.is_none(),
        first_mismatch: first,
    })
}

fn coeff_fracs(seq: &BasicSequence, u: &LinPoly) -> Vec<Frac> {
    let mut a: Vec<Frac> = u.coeffs().iter().map(Frac::from_ratfn).collect();
    a.resize(seq.order() + 1, Frac::zero(*seq.field()));
    a
}

/// Taylor coefficients ψ_l = (δ₀^{(l)} f)(1) = Σ_j a_j E_{l,j} via the
/// operator route, in factored form.
fn taylor_fracs(seq: &BasicSequence, a: &[Frac]) -> Vec<Frac> {
    let op = seq.op();
    let f = *seq.field();
    let mut psi = Vec::with_capacity(seq.order() + 1);
    for l in 0..=seq.order() {
        let terms: Vec<Frac> = (l..=seq.order())
            .filter(|&j| !a[j].is_zero())
            .map(|j| a[j].mul(op.e_frac(l, j)))
            .collect();
        psi.push(if terms.is_empty() {
            Frac::zero(f)
        } else {
            Frac::add_all(&terms)
        });
    }
    psi
}

/// ψ by triangular back-substitution against {Q_l}, independent of the
/// eigenvalue tables.
fn taylor_solve_fracs(seq: &BasicSequence, a: &[Frac]) -> Result<Vec<Frac>> {
    let f = *seq.field();
    let mut resid = a.to_vec();
    let mut psi = vec![Frac::zero(f); seq.order() + 1];
    for n in (0..=seq.order()).rev() {
        if resid[n].is_zero() {
            continue;
        }
        let pn = resid[n].mul(&seq.gamma_frac(n, n).inverse()?);
        for j in 0..n {
            resid[j] = resid[j].sub(&pn.mul(seq.gamma_frac(n, j)));
        }
        psi[n] = pn;
    }
    Ok(psi)
}

/// Generalized Taylor coefficients of f in the basis {Q_l}, canonical form.
pub fn taylor_expand(seq: &BasicSequence, f: &LinPoly) -> Result<Vec<RatFn>> {
    seq.op().check_order(f)?;
    taylor_fracs(seq, &coeff_fracs(seq, f))
        .iter()
        .map(Frac::to_ratfn)
        .collect()
}

#[derive(Debug, Clone)]
pub struct TaylorReport {
    /// Operator route equals the triangular solve, level by level.
    pub routes_agree: bool,
    /// f = Σ ψ_l Q_l reproduces every coefficient of f.
    pub reconstructs: bool,
    /// First level (route comparison) or coefficient index (reconstruction)
    /// that failed.
    pub first_mismatch: Option<usize>,
}

impl TaylorReport {
    pub fn holds(&self) -> bool {
        self.routes_agree && self.reconstructs
    }
}

/// Verifies the Taylor expansion of f both ways and the exact
/// reconstruction f = Σ ψ_l Q_l.
pub fn taylor_check(seq: &BasicSequence, f: &LinPoly) -> Result<TaylorReport> {
    seq.op().check_order(f)?;
    let a = coeff_fracs(seq, f);
    let psi = taylor_fracs(seq, &a);
    let solved = taylor_solve_fracs(seq, &a)?;
    let mut route_bad = None;
    for l in 0..=seq.order() {
        if !psi[l].sub(&solved[l]).is_zero() {
            route_bad = Some(l);
            break;
        }
    }
    let mut recon_bad = None;
    let mut pc = PowCache::new();
    for j in 0..=seq.order() {
        let mut terms = vec![a[j].neg()];
        for l in j..=seq.order() {
            if !psi[l].is_zero() {
                terms.push(psi[l].mul(seq.gamma_frac(l, j)));
            }
        }
        if !Frac::add_all_cached(&terms, &mut pc).is_zero() {
            recon_bad = Some(j);
            break;
        }
    }
    Ok(TaylorReport {
        routes_agree: route_bad.is_none(),
        reconstructs: recon_bad.is_none(),
        first_mismatch: route_bad.or(recon_bad),
    })
}

/// Coefficient vector of u with denominators cleared: (ã_0..ã_N, U) with
/// a_j = ã_j / U exactly, U the product of the coefficient denominators.
fn cleared_coeffs(field: FieldSpec, order: usize, u: &LinPoly) -> (Vec<Poly>, Poly) {
    let n = order + 1;
    let mut nums = vec![Poly::zero(field); n];
    let mut dens: Vec<Option<Poly>> = vec![None; n];
    for (j, a) in u.coeffs().iter().enumerate() {
        nums[j] = a.num().clone();
        if !a.den().is_one() {
            dens[j] = Some(a.den().clone());
        }
    }
    let mut prefix = vec![Poly::one(field); n + 1];
    for i in 0..n {
        prefix[i + 1] = match &dens[i] {
            Some(d) => prefix[i].mul(d),
            None => prefix[i].clone(),
        };
    }
    let mut suffix = vec![Poly::one(field); n + 1];
    for i in (0..n).rev() {
        suffix[i] = match &dens[i] {
            Some(d) => suffix[i + 1].mul(d),
            None => suffix[i + 1].clone(),
        };
    }
    let scaled = (0..n)
        .map(|i| nums[i].mul(&prefix[i]).mul(&suffix[i + 1]))
        .collect();
    (scaled, prefix[n].clone())
}

/// Σ_i w_i · m_i accumulated in one buffer: the w_i are small, the m_i
/// large, so each product walks the dense side once per nonzero term.
fn weighted_sum(field: FieldSpec, pairs: &[(&Poly, &Poly)]) -> Poly {
    let mut len = 0;
    for (w, m) in pairs {
        if !w.is_zero() && !m.is_zero() {
            len = len.max(w.coeffs().len() + m.coeffs().len() - 1);
        }
    }
    let mut out = vec![field.zero(); len];
    for (w, m) in pairs {
        if w.is_zero() || m.is_zero() {
            continue;
        }
        for (e, c) in w.nonzero_terms() {
            for (i, &a) in m.coeffs().iter().enumerate() {
                if !field.is_zero(a) {
                    out[e + i] = field.add(out[e + i], field.mul(c, a));
                }
            }
        }
    }
    Poly::from_coeffs(field, out)
}

/// Defect rows of a reconstruction identity: row j holds, over a common
/// denominator, per-l numerators of W_{j,l} = (entry products summed) − δ_{lj},
/// so that Σ_l a_l W_{j,l} is the level-j defect of reconstructing
/// f = Σ_l a_l t^{q^l}. `entry(j, l)` yields the product terms of cell (j, l).
fn normalized_defect_rows(
    field: FieldSpec,
    order: usize,
    mut entry: impl FnMut(usize, usize) -> Result<Vec<Frac>>,
) -> Result<Vec<Vec<Poly>>> {
    let mut pc = PowCache::new();
    let mut rows = Vec::with_capacity(order + 1);
    for j in 0..=order {
        let mut terms: Vec<Frac> = Vec::new();
        let mut owner: Vec<usize> = Vec::new();
        for l in 0..=order {
            for t in entry(j, l)? {
                if !t.is_zero() {
                    terms.push(t);
                    owner.push(l);
                }
            }
            if l == j {
                terms.push(Frac::from_poly(Poly::constant(field, field.neg(field.one()))));
                owner.push(l);
            }
        }
        let (nums, _) = Frac::normalize_row(&terms, &mut pc);
        let mut row = vec![Poly::zero(field); order + 1];
        for (l, num) in owner.into_iter().zip(nums) {
            row[l] = row[l].add(&num);
        }
        rows.push(row);
    }
    Ok(rows)
}

/// First level at which the defect rows do not vanish on u, by exact
/// small-by-large linear combinations of u's cleared coefficients.
fn table_defect(
    field: FieldSpec,
    order: usize,
    rows: &[Vec<Poly>],
    u: &LinPoly,
) -> Result<Option<usize>> {
    if let Some(m) = u.order() {
        if m > order {
            return Err(Error::OrderExceeded {
                requested: m,
                cached: order,
            });
        }
    }
    let (scaled, _) = cleared_coeffs(field, order, u);
    for (j, row) in rows.iter().enumerate() {
        let pairs: Vec<(&Poly, &Poly)> = scaled.iter().zip(row).map(|(a, r)| (a, r)).collect();
        if !weighted_sum(field, &pairs).is_zero() {
            return Ok(Some(j));
        }
    }
    Ok(None)
}

/// Reconstruction table of a basic sequence: defect rows of
/// R_{j,l} = Σ_m γ_j^{(m)} E_{m,l} − δ_{lj}, so for f = Σ_l a_l t^{q^l} the
/// level-j coefficient of (Σ_m ψ_m Q_m) − f equals Σ_l a_l R_{j,l}, with ψ
/// the operator-route Taylor coefficients.
///
/// Vanishing of every row on f certifies both halves of the Taylor theorem
/// at once: f reconstructs from the operator-route ψ, and that ψ then
/// solves the triangular system Γᵀψ = a whose solution is unique, so the
/// operator route agrees with back-substitution. Building the table costs
/// about one `taylor_check`; each `check` after that is a family of
/// small-by-large linear combinations.
pub struct TaylorTable {
    field: FieldSpec,
    order: usize,
    rows: Vec<Vec<Poly>>,
}

impl TaylorTable {
    pub fn new(seq: &BasicSequence) -> TaylorTable {
        let field = *seq.field();
        let op = seq.op();
        let n = seq.order();
        let rows = normalized_defect_rows(field, n, |j, l| {
            Ok((j..=l)
                .map(|m| seq.gamma_frac(m, j).mul(op.e_frac(m, l)))
                .collect())
        })
        .expect("infallible entries");
        TaylorTable {
            field,
            order: n,
            rows,
        }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// Exact Taylor verification of one polynomial against the table.
    pub fn check(&self, f: &LinPoly) -> Result<TaylorReport> {
        let first = table_defect(self.field, self.order, &self.rows, f)?;
        Ok(TaylorReport {
            routes_agree: first.is_none(),
            reconstructs: first.is_none(),
            first_mismatch: first,
        })
    }
}

/// Two-variable Taylor identity: f(st) = Σ_l (δ₀^{(l)} f)(s) · Q_l(t),
/// verified entrywise over s^{q^j} t^{q^k}.
pub fn taylor_bilinear_check(seq: &BasicSequence, f: &LinPoly) -> Result<bool> {
    seq.op().check_order(f)?;
    let op = seq.op();
    let field = *seq.field();
    let a = coeff_fracs(seq, f);
    let mut acc = FracAcc::new(field);
    for (m, am) in a.iter().enumerate() {
        acc.push(m, m, am.clone());
    }
    for l in 0..=seq.order() {
        for j in l..=seq.order() {
            if a[j].is_zero() {
                continue;
            }
            let ej = a[j].mul(op.e_frac(l, j));
            for k in 0..=l {
                acc.push(j, k, ej.mul(seq.gamma_frac(l, k)).neg());
            }
        }
    }
    Ok(acc.first_nonzero(&mut PowCache::new()).is_none())
}

/// A linear operator commuting with every substitution t ↦ λt: by the
/// classification such operators act diagonally, t^{q^n} ↦ c'_n t^{q^n}.
#[derive(Debug, Clone, PartialEq)]
pub struct InvariantOperator {
    field: FieldSpec,
    c: Vec<RatFn>,
}

impl InvariantOperator {
    /// c[n] is the eigenvalue on t^{q^n}, n = 0..=N.
    pub fn new(field: FieldSpec, c: Vec<RatFn>) -> InvariantOperator {
        InvariantOperator { field, c }
    }

    pub fn identity(field: FieldSpec, n_max: usize) -> InvariantOperator {
        InvariantOperator {
            field,
            c: vec![RatFn::one(field); n_max + 1],
        }
    }

    /// δ₀ of a delta operator as an invariant operator (c'_0 = 0).
    pub fn from_delta0(op: &DeltaOperator) -> InvariantOperator {
        let mut c = vec![RatFn::zero(*op.field())];
        for n in 1..=op.order() {
            c.push(op.c_value(n).clone());
        }
        InvariantOperator {
            field: *op.field(),
            c,
        }
    }

    pub fn order(&self) -> usize {
        self.c.len() - 1
    }

    pub fn coeff(&self, n: usize) -> &RatFn {
        &self.c[n]
    }

    pub fn apply(&self, u: &LinPoly) -> Result<LinPoly> {
        if let Some(m) = u.order() {
            if m >= self.c.len() {
                return Err(Error::OrderExceeded {
                    requested: m,
                    cached: self.c.len() - 1,
                });
            }
        }
        let out = u
            .coeffs()
            .iter()
            .enumerate()
            .map(|(n, a)| a.mul(&self.c[n]))
            .collect();
        Ok(LinPoly::from_coeffs(self.field, out))
    }
}

/// Diagonal operators commute with every ρ_λ: T(u(λt)) = (Tu)(λt).
pub fn invariance_check(t: &InvariantOperator, u: &LinPoly, lam: &RatFn) -> Result<bool> {
    Ok(t.apply(&u.rho(lam)?)? == t.apply(u)?.rho(lam)?)
}

#[derive(Debug, Clone)]
pub struct InvariantExpansion {
    /// σ'_0 .. σ'_N with σ'_l = (T P_l)(1) / D_l.
    pub sigma: Vec<RatFn>,
    /// Whether c'_n = Σ_{l≤n} σ'_l E_{l,n} reproduced every eigenvalue.
    pub reconstructed: bool,
    pub first_mismatch: Option<usize>,
}

/// Expands an invariant operator over the basic sequence of a delta
/// operator and verifies the expansion by reconstructing its eigenvalues.
pub fn invariant_expand(seq: &BasicSequence, t: &InvariantOperator) -> Result<InvariantExpansion> {
    assert!(t.order() >= seq.order(), "operator data too short");
    let op = seq.op();
    let f = *seq.field();
    // sigma'_l = (T P_l)(1) / D_l = sum_j c'_j gamma_j^{(l)}
    let mut sigma_fracs = Vec::with_capacity(seq.order() + 1);
    for l in 0..=seq.order() {
        let terms: Vec<Frac> = (0..=l)
            .filter(|&j| !t.coeff(j).is_zero())
            .map(|j| Frac::from_ratfn(t.coeff(j)).mul(seq.gamma_frac(l, j)))
            .collect();
        sigma_fracs.push(if terms.is_empty() {
            Frac::zero(f)
        } else {
            Frac::add_all(&terms)
        });
    }
    let mut reconstructed = true;
    let mut first_mismatch = None;
    for n in 0..=seq.order() {
        let mut terms = vec![Frac::from_ratfn(t.coeff(n)).neg()];
        for l in 0..=n {
            if !sigma_fracs[l].is_zero() {
                terms.push(sigma_fracs[l].mul(op.e_frac(l, n)));
            }
        }
        if !Frac::add_all(&terms).is_zero() {
            reconstructed = false;
            first_mismatch = Some(n);
            break;
        }
    }
    Ok(InvariantExpansion {
        sigma: sigma_fracs
            .iter()
            .map(Frac::to_ratfn)
            .collect::<Result<_>>()?,
        reconstructed,
        first_mismatch,
    })
}

fn carlitz_basis_coeff(cache: &CarlitzCache, m: usize, i: usize) -> Result<Frac> {
    // f_m level-i coefficient: (-1)^{m-i} / (D_i L_{m-i}^{q^i})
    let f = *cache.field();
    let mut den = cache.d_atoms(i, 0)?;
    den.extend(cache.l_atoms(m - i, i as u32)?);
    Ok(Frac::new(Poly::constant(f, cache.sign(m - i)), den))
}

pub(crate) fn carlitz_expand_fracs(cache: &CarlitzCache, coeffs: &[Frac]) -> Result<Vec<Frac>> {
    assert!(coeffs.len() <= cache.max_order() + 1);
    let f = *cache.field();
    let mut resid = coeffs.to_vec();
    let mut a = vec![Frac::zero(f); coeffs.len()];
    for m in (0..coeffs.len()).rev() {
        if resid[m].is_zero() {
            continue;
        }
        // f_m is the only remaining basis element with a level-m term,
        // with coefficient 1/D_m.
        let am = resid[m].mul_poly(cache.d(m));
        for i in 0..m {
            let phi = carlitz_basis_coeff(cache, m, i)?;
            resid[i] = resid[i].sub(&am.mul(&phi));
        }
        a[m] = am;
    }
    Ok(a)
}

/// Coefficients of u in the orthonormal basis {f_i}: u = Σ a_i f_i,
/// by triangular back-substitution. Exact reconstruction is an invariant.
pub fn carlitz_expand(cache: &CarlitzCache, u: &LinPoly) -> Result<Vec<RatFn>> {
    if let Some(m) = u.order() {
        if m > cache.max_order() {
            return Err(Error::OrderExceeded {
                requested: m,
                cached: cache.max_order(),
            });
        }
    }
    let coeffs: Vec<Frac> = u.coeffs().iter().map(Frac::from_ratfn).collect();
    carlitz_expand_fracs(cache, &coeffs)?
        .iter()
        .map(Frac::to_ratfn)
        .collect()
}

fn sup_norm_of_fracs(a: &[Frac]) -> Option<i64> {
    let mut best: Option<i64> = None;
    for ai in a {
        if let ValExp::Finite(v) = ai.valuation() {
            best = Some(best.map_or(-v, |b: i64| b.max(-v)));
        }
    }
    best
}

/// Sup-norm exponent e with ‖u‖ = q^e, read off the Carlitz expansion as
/// max_i(−v(a_i)); None for u = 0.
pub fn sup_norm(cache: &CarlitzCache, u: &LinPoly) -> Result<Option<i64>> {
    if let Some(m) = u.order() {
        if m > cache.max_order() {
            return Err(Error::OrderExceeded {
                requested: m,
                cached: cache.max_order(),
            });
        }
    }
    let coeffs: Vec<Frac> = u.coeffs().iter().map(Frac::from_ratfn).collect();
    Ok(sup_norm_of_fracs(&carlitz_expand_fracs(cache, &coeffs)?))
}

/// Reconstruction table for the Carlitz basis {f_i}: defect rows of
/// W_{j,l} = Σ_i φ_{i,j} A_{i,l} − δ_{jl}, where φ_{i,j} is the level-j
/// coefficient of f_i and column A_{·,l} the expansion of t^{q^l}, so
/// Σ_l a_l W_{j,l} is the level-j defect of f = Σ_i a_i(f) f_i. Vanishing
/// on f certifies that the expansion of f reconstructs it exactly.
pub struct ExpansionTable {
    field: FieldSpec,
    order: usize,
    rows: Vec<Vec<Poly>>,
}

impl ExpansionTable {
    pub fn new(cache: &CarlitzCache, order: usize) -> Result<ExpansionTable> {
        assert!(order <= cache.max_order());
        let field = *cache.field();
        let mut cols = Vec::with_capacity(order + 1);
        for l in 0..=order {
            let mut unit = vec![Frac::zero(field); order + 1];
            unit[l] = Frac::one(field);
            cols.push(carlitz_expand_fracs(cache, &unit)?);
        }
        let rows = normalized_defect_rows(field, order, |j, l| {
            (j..=order)
                .map(|i| Ok(cols[l][i].mul(&carlitz_basis_coeff(cache, i, j)?)))
                .collect()
        })?;
        Ok(ExpansionTable {
            field,
            order,
            rows,
        })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// First level at which Σ a_i f_i fails to reproduce u; None when the
    /// expansion reconstructs u exactly.
    pub fn check(&self, u: &LinPoly) -> Result<Option<usize>> {
        table_defect(self.field, self.order, &self.rows, u)
    }
}

/// Outcome of the orthonormal-basis check for a basic sequence.
#[derive(Debug, Clone, PartialEq)]
pub enum OrthonormalReport {
    /// The sigma data violates |σ_1| = 1, |σ_l| ≤ 1: the theorem does not
    /// apply (distinct from a conclusion failure).
    HypothesisNotMet { level: usize, valuation: i64 },
    /// Some ‖Q_n‖ ≠ 1.
    NormFailed { n: usize, exponent: i64 },
    /// ‖f‖ = max_n |ψ_n| failed on a sampled polynomial.
    SampleFailed {
        index: usize,
        sup_exponent: i64,
        psi_exponent: i64,
    },
    Verified {
        norms_checked: usize,
        samples_checked: usize,
    },
}

impl OrthonormalReport {
    pub fn verified(&self) -> bool {
        matches!(self, OrthonormalReport::Verified { .. })
    }
}

/// Rows of a linear map on coefficient vectors, each normalized over a
/// common denominator so that only numerator orders are needed for
/// valuations: value_i = (Σ_j ã_j nums[i][j]) / (U · den), with den_ord
/// the x-adic order of the row denominator.
struct NormRows {
    nums: Vec<Vec<Poly>>,
    den_ord: Vec<i64>,
}

impl NormRows {
    fn from_fracs(table: &[Vec<Frac>], pc: &mut PowCache) -> NormRows {
        let mut nums = Vec::with_capacity(table.len());
        let mut den_ord = Vec::with_capacity(table.len());
        for row in table {
            let (ns, lcd) = Frac::normalize_row(row, pc);
            nums.push(ns);
            den_ord.push(
                lcd.iter()
                    .map(|(b, e)| b.ord().expect("nonzero atom") as i64 * *e as i64)
                    .sum(),
            );
        }
        NormRows { nums, den_ord }
    }

    /// max_i −v(value_i) for the cleared input (ã, ord U); None on the
    /// kernel of the map.
    fn sup_exponent(&self, field: FieldSpec, scaled: &[Poly], u_ord: i64) -> Option<i64> {
        let mut best: Option<i64> = None;
        for (row, dord) in self.nums.iter().zip(&self.den_ord) {
            let pairs: Vec<(&Poly, &Poly)> =
                scaled.iter().zip(row).map(|(a, r)| (a, r)).collect();
            if let Some(o) = weighted_sum(field, &pairs).ord() {
                let e = dord + u_ord - o as i64;
                best = Some(best.map_or(e, |b| b.max(e)));
            }
        }
        best
    }
}

/// Checks that {Q_n} is orthonormal: hypothesis v(σ_1) = 0 and v(σ_l) ≥ 0,
/// then ‖Q_n‖ = q^0 for n ≤ N, then ‖f‖ = max_n |ψ_n| on seeded random
/// polynomials.
pub fn orthonormal_check(
    seq: &BasicSequence,
    samples: usize,
    seed: u64,
) -> Result<OrthonormalReport> {
    let op = seq.op();
    let cache = op.cache();
    for l in 1..=seq.order() {
        let v = op.sigma_spec().sigma_frac(cache, l)?.valuation();
        let bad = match v {
            ValExp::Finite(v) => v < 0 || (l == 1 && v != 0),
            ValExp::Infinite => false,
        };
        if bad {
            let ValExp::Finite(v) = v else { unreachable!() };
            return Ok(OrthonormalReport::HypothesisNotMet {
                level: l,
                valuation: v,
            });
        }
    }
    for n in 0..=seq.order() {
        let a = carlitz_expand_fracs(cache, &seq.gamma[n])?;
        match sup_norm_of_fracs(&a) {
            Some(0) => {}
            Some(e) => return Ok(OrthonormalReport::NormFailed { n, exponent: e }),
            None => unreachable!("Q_n is nonzero"),
        }
    }
    // Both sides are linear in f, so normalize their row tables once:
    // ψ_l = Σ_j a_j E_{l,j} and the Carlitz-basis coordinates a_i(f),
    // whose columns are the expansions of the unit vectors.
    let field = *seq.field();
    let n = seq.order();
    let mut pc = PowCache::new();
    let e_table: Vec<Vec<Frac>> = (0..=n)
        .map(|l| (0..=n).map(|j| op.e_frac(l, j).clone()).collect())
        .collect();
    let psi_rows = NormRows::from_fracs(&e_table, &mut pc);
    let mut cols = Vec::with_capacity(n + 1);
    for j in 0..=n {
        let mut unit = vec![Frac::zero(field); n + 1];
        unit[j] = Frac::one(field);
        cols.push(carlitz_expand_fracs(cache, &unit)?);
    }
    let a_table: Vec<Vec<Frac>> = (0..=n)
        .map(|i| (0..=n).map(|j| cols[j][i].clone()).collect())
        .collect();
    let a_rows = NormRows::from_fracs(&a_table, &mut pc);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for index in 0..samples {
        let f = random_linpoly(&mut rng, seq.field(), seq.order());
        let (scaled, u) = cleared_coeffs(field, n, &f);
        let u_ord = u.ord().expect("nonzero clearing factor") as i64;
        let sup = a_rows
            .sup_exponent(field, &scaled, u_ord)
            .expect("sample is nonzero");
        let psi = psi_rows
            .sup_exponent(field, &scaled, u_ord)
            .expect("sample is nonzero");
        if sup != psi {
            return Ok(OrthonormalReport::SampleFailed {
                index,
                sup_exponent: sup,
                psi_exponent: psi,
            });
        }
    }
    Ok(OrthonormalReport::Verified {
        norms_checked: seq.order() + 1,
        samples_checked: samples,
    })
}

/// Seeded random linear polynomial of order ≤ n_max with rational
/// coefficients of mixed valuation; never zero.
pub fn random_linpoly(rng: &mut ChaCha8Rng, field: &FieldSpec, n_max: usize) -> LinPoly {
    let f = *field;
    let q = f.q() as u64;
    loop {
        let mut coeffs = Vec::with_capacity(n_max + 1);
        for _ in 0..=n_max {
            if rng.gen_range(0..4) == 0 {
                coeffs.push(RatFn::zero(f));
                continue;
            }
            let num = Poly::from_coeffs(
                f,
                (0..rng.gen_range(1..5))
                    .map(|_| f.element_at(rng.gen_range(0..q)))
                    .collect(),
            );
            if num.is_zero() {
                coeffs.push(RatFn::zero(f));
                continue;
            }
            // Denominator x^k (x+1)^j gives coefficients of valuation
            // between -4 and 3.
            let xp = Poly::x_pow(f, rng.gen_range(0..3));
            let shift = atom_pow(
                &Poly::from_coeffs(f, vec![f.one(), f.one()]),
                rng.gen_range(0..3),
            );
            coeffs.push(RatFn::new(num, xp.mul(&shift)).expect("nonzero denominator"));
        }
        let u = LinPoly::from_coeffs(f, coeffs);
        if !u.is_zero() {
            return u;
        }
    }
}

/// Descent of the iterates along the sequence:
/// δ₀^{(l)} P_j = (D_j / D_{j−l}^{q^l}) · P_{j−l}^{q^l}, checked exactly.
pub fn iterated_descent_check(seq: &BasicSequence, l: usize, j: usize) -> Result<bool> {
    assert!(l <= j && j <= seq.order());
    let op = seq.op();
    let cache = op.cache();
    let f = *seq.field();
    // D_j / D_{j-l}^{q^l} = prod_{m=j-l+1}^{j} [m]^{q^{j-m}}, a polynomial.
    let mut ratio = Poly::one(f);
    for m in (j - l + 1)..=j {
        ratio = ratio.mul(&atom_pow(cache.bracket(m), cache.q_pow((j - m) as u32)?));
    }
    for k in 0..=j {
        // level-k coefficient of delta_0^{(l)} P_j
        let lhs = if k < l {
            Frac::zero(f)
        } else {
            seq.gamma_frac(j, k).mul_poly(cache.d(j)).mul(op.e_frac(l, k))
        };
        // level-k coefficient of ratio * P_{j-l}^{q^l}
        let rhs = if k < l || k - l > j - l {
            Frac::zero(f)
        } else {
            seq.gamma_frac(j - l, k - l)
                .mul_poly(cache.d(j - l))
                .frob(l as u32)?
                .mul_poly(&ratio)
        };
        if !lhs.sub(&rhs).is_zero() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Uniqueness of the basic sequence: recover the eigenvalues c'_n from the
/// action δ₀ P_n = [n] P_{n−1}^q on the sequence itself, verify consistency
/// across all coefficient levels, rebuild the γ table from c', and compare.
pub fn uniqueness_regeneration_check(seq: &BasicSequence) -> Result<bool> {
    let op = seq.op();
    let cache = op.cache();
    let f = *seq.field();
    if seq.order() == 0 {
        return Ok(true);
    }
    // c'_j from the leading coefficients; consistency at every (n, k).
    let mut cprime = vec![Frac::one(f)];
    for j in 1..=seq.order() {
        let top_prev = seq
            .gamma_frac(j - 1, j - 1)
            .mul_poly(cache.d(j - 1))
            .frob(1)?;
        let top = seq.gamma_frac(j, j).mul_poly(cache.d(j));
        cprime.push(top_prev.mul_poly(cache.bracket(j)).mul(&top.inverse()?));
    }
    for n in 1..=seq.order() {
        for k in 1..=n {
            let lhs = cprime[k].mul(&seq.gamma_frac(n, k).mul_poly(cache.d(n)));
            let rhs = seq
                .gamma_frac(n - 1, k - 1)
                .mul_poly(cache.d(n - 1))
                .frob(1)?
                .mul_poly(cache.bracket(n));
            if !lhs.sub(&rhs).is_zero() {
                return Ok(false);
            }
        }
        // Level 0 is trivial: delta_0 kills it and the q-twist starts at 1.
    }
    // Rebuild gamma from the recovered eigenvalues.
    let mut inv_c = vec![Frac::one(f)];
    for i in 1..=seq.order() {
        inv_c.push(cprime[i].inverse()?);
    }
    let mut gamma = vec![vec![Frac::one(f)]];
    for n in 1..=seq.order() {
        let mut row = vec![Frac::zero(f); n + 1];
        for i in 0..n {
            row[i + 1] = gamma[n - 1][i].frob(1)?.mul(&inv_c[i + 1]);
        }
        row[0] = Frac::add_all(&row[1..]).neg();
        gamma.push(row);
    }
    for n in 0..=seq.order() {
        for j in 0..=n {
            if !gamma[n][j].sub(seq.gamma_frac(n, j)).is_zero() {
                return Ok(false);
            }
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

    fn rf(f: &FieldSpec, src: &str) -> RatFn {
        crate::parse::parse_ratfn(*f, src).unwrap()
    }

    #[test]
    fn preset_tables_closed_forms() {
        for q in [2u64, 3] {
            let ch = cache(q, 6);
            let f = *ch.field();
            // carlitz: S_n = 1/D_{n-1}^q, c_n = [n]
            let op = DeltaOperator::new(&ch, SigmaSpec::Carlitz, 6).unwrap();
            for n in 1..=6 {
                assert_eq!(op.c_value(n), &RatFn::from_poly(ch.bracket(n).clone()));
            }
            // example2: S_n = 1/D_n, c_n = 1
            let op = DeltaOperator::new(&ch, SigmaSpec::Example2, 6).unwrap();
            for n in 1..=6 {
                let want = RatFn::new(Poly::one(f), ch.d(n).clone()).unwrap();
                assert_eq!(op.s_value(n).unwrap(), want);
                assert!(op.c_value(n).is_one());
            }
        }
        // laguerre, q = 2: -v(S_n) = (q^n - q)/(q - 1)
        let ch = cache(2, 6);
        let op = DeltaOperator::new(&ch, SigmaSpec::Laguerre, 6).unwrap();
        for n in 1..=6 {
            let want = -(((1u64 << n) - 2) as i64);
            assert_eq!(op.s_valuation(n), ValExp::Finite(want));
        }
    }

    #[test]
    fn vanishing_s_rejected_atomically() {
        let ch = cache(2, 4);
        let f = *ch.field();
        // All-zero sigma fails at n = 1.
        let all_zero = SigmaSpec::Explicit(vec![RatFn::zero(f)]);
        assert_eq!(
            DeltaOperator::new(&ch, all_zero, 4).err(),
            Some(Error::NotDeltaOperator(1))
        );
        // sigma_2 = -1/[1]^q makes S_2 = 1/D_1^q + sigma_2 = 0.
        let s2 = RatFn::from_poly(ch.bracket(1).clone())
            .frobenius_power(1)
            .unwrap()
            .inv()
            .unwrap()
            .neg();
        let bad = SigmaSpec::Explicit(vec![RatFn::one(f), s2]);
        assert_eq!(
            DeltaOperator::new(&ch, bad, 4).err(),
            Some(Error::NotDeltaOperator(2))
        );
    }

    #[test]
    fn delta0_and_delta_actions() {
        let ch = cache(2, 5);
        let f = *ch.field();
        let t = LinPoly::t(f);
        let carlitz = DeltaOperator::new(&ch, SigmaSpec::Carlitz, 5).unwrap();
        // delta_0(t) = 0; delta_0(t^{q^n}) = [n] t^{q^n}.
        assert!(carlitz.delta0_apply(&t).unwrap().is_zero());
        for n in 1..=5 {
            let m = LinPoly::term(f, n, RatFn::one(f));
            let want = LinPoly::term(f, n, RatFn::from_poly(ch.bracket(n).clone()));
            assert_eq!(carlitz.delta0_apply(&m).unwrap(), want);
        }
        // example2: delta_0(t^{q^j}) = t^{q^j} for j >= 1.
        let ex2 = DeltaOperator::new(&ch, SigmaSpec::Example2, 5).unwrap();
        for j in 1..=5 {
            let m = LinPoly::term(f, j, RatFn::one(f));
            assert_eq!(ex2.delta0_apply(&m).unwrap(), m);
        }
        // d f_i = f_{i-1}; the root exists on the Carlitz basis.
        for i in 1..=5 {
            let fi = ch.carlitz_f(i).unwrap();
            assert_eq!(carlitz.delta_apply(&fi).unwrap(), ch.carlitz_f(i - 1).unwrap());
        }
        // ... but not on a bare monomial: [1] t^q has no q-th root.
        let tq = LinPoly::term(f, 1, RatFn::one(f));
        assert_eq!(carlitz.delta_apply(&tq), Err(Error::QthRootNotExist));
        // Order guard.
        let high = LinPoly::term(f, 6, RatFn::one(f));
        assert_eq!(
            carlitz.delta0_apply(&high),
            Err(Error::OrderExceeded {
                requested: 6,
                cached: 5
            })
        );
    }

    #[test]
    fn basic_sequence_closed_forms() {
        for q in [2u64, 3] {
            let ch = cache(q, 4);
            let f = *ch.field();
            for sigma in [SigmaSpec::Carlitz, SigmaSpec::Laguerre, SigmaSpec::Example2] {
                let op = DeltaOperator::new(&ch, sigma.clone(), 4).unwrap();
                let seq = BasicSequence::new(&op, 4).unwrap();
                // Q_0 = t; Q_n(1) = 0; deg Q_n = q^n; delta Q_n = Q_{n-1}.
                assert_eq!(seq.q_poly(0).unwrap(), LinPoly::t(f));
                for n in 1..=4 {
                    let qn = seq.q_poly(n).unwrap();
                    assert_eq!(qn.order(), Some(n));
                    assert!(qn.eval(&RatFn::one(f)).unwrap().is_zero());
                    assert_eq!(op.delta_apply(&qn).unwrap(), seq.q_poly(n - 1).unwrap());
                }
                match sigma {
                    SigmaSpec::Carlitz => {
                        for n in 0..=4 {
                            assert_eq!(seq.q_poly(n).unwrap(), ch.carlitz_f(n).unwrap());
                        }
                    }
                    SigmaSpec::Example2 => {
                        for n in 1..=4 {
                            let mut coeffs = vec![RatFn::zero(f); n + 1];
                            coeffs[n - 1] = RatFn::constant(f, f.neg(f.one()));
                            coeffs[n] = RatFn::one(f);
                            assert_eq!(
                                seq.q_poly(n).unwrap(),
                                LinPoly::from_coeffs(f, coeffs)
                            );
                        }
                    }
                    _ => {}
                }
            }
        }
    }

    #[test]
    fn k_binomial_holds_and_localizes_faults() {
        for q in [2u64, 3] {
            let ch = cache(q, 3);
            for sigma in [SigmaSpec::Carlitz, SigmaSpec::Laguerre, SigmaSpec::Example2] {
                let op = DeltaOperator::new(&ch, sigma, 3).unwrap();
                let seq = BasicSequence::new(&op, 3).unwrap();
                for i in 0..=3 {
                    let rep = k_binomial_check(&seq, i).unwrap();
                    assert!(rep.holds(), "q={} i={}", q, i);
                    assert!(rep.first_mismatch.is_none());
                }
                let f = *ch.field();
                let broken = seq.perturbed(2, 1, &RatFn::one(f));
                let rep = k_binomial_check(&broken, 2).unwrap();
                assert!(!rep.holds());
                assert!(rep.first_mismatch.is_some());
            }
        }
    }

    #[test]
    fn taylor_examples_and_routes() {
        let ch = cache(2, 4);
        let f = *ch.field();
        let op = DeltaOperator::new(&ch, SigmaSpec::Carlitz, 4).unwrap();
        let seq = BasicSequence::new(&op, 4).unwrap();
        // f = t: psi = (1, 0, ...).
        let psi = taylor_expand(&seq, &LinPoly::t(f)).unwrap();
        assert!(psi[0].is_one());
        assert!(psi[1..].iter().all(RatFn::is_zero));
        // f = t^2 over q=2: t^2 = f_0 + D_1 f_1, psi = (1, D_1).
        let t2 = LinPoly::term(f, 1, RatFn::one(f));
        let psi = taylor_expand(&seq, &t2).unwrap();
        assert!(psi[0].is_one());
        assert_eq!(psi[1], RatFn::from_poly(ch.d(1).clone()));
        assert!(psi[2..].iter().all(RatFn::is_zero));
        // f = Q_m: psi is the Kronecker delta at m.
        for m in 0..=4 {
            let psi = taylor_expand(&seq, &seq.q_poly(m).unwrap()).unwrap();
            for (l, v) in psi.iter().enumerate() {
                assert_eq!(l == m, v.is_one());
                assert_eq!(l != m, v.is_zero());
            }
        }
        // Both routes and reconstruction on seeded random inputs, plus the
        // two-variable form.
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for sigma in [SigmaSpec::Carlitz, SigmaSpec::Laguerre, SigmaSpec::Example2] {
            let op = DeltaOperator::new(&ch, sigma, 4).unwrap();
            let seq = BasicSequence::new(&op, 4).unwrap();
            for _ in 0..5 {
                let u = random_linpoly(&mut rng, &f, 4);
                let rep = taylor_check(&seq, &u).unwrap();
                assert!(rep.holds(), "{:?}", rep);
                assert!(taylor_bilinear_check(&seq, &u).unwrap());
            }
        }
    }

    #[test]
    fn tables_match_literal_routes() {
        let ch = cache(3, 4);
        let f = *ch.field();
        let mut rng = ChaCha8Rng::seed_from_u64(19);
        for sigma in [SigmaSpec::Carlitz, SigmaSpec::Laguerre, SigmaSpec::Example2] {
            let op = DeltaOperator::new(&ch, sigma, 4).unwrap();
            let seq = BasicSequence::new(&op, 4).unwrap();
            let table = TaylorTable::new(&seq);
            let broken = seq.perturbed(3, 1, &rf(&f, "x"));
            let broken_table = TaylorTable::new(&broken);
            for _ in 0..4 {
                let u = random_linpoly(&mut rng, &f, 4);
                let lit = taylor_check(&seq, &u).unwrap();
                let tab = table.check(&u).unwrap();
                assert!(lit.holds() && tab.holds());
                // A shifted gamma breaks both routes the same way.
                let lit = taylor_check(&broken, &u).unwrap();
                let tab = broken_table.check(&u).unwrap();
                assert_eq!(lit.holds(), tab.holds());
            }
        }
        let exp = ExpansionTable::new(&ch, 4).unwrap();
        for _ in 0..4 {
            let u = random_linpoly(&mut rng, &f, 4);
            assert_eq!(exp.check(&u).unwrap(), None);
            let a = carlitz_expand(&ch, &u).unwrap();
            let mut back = LinPoly::zero(f);
            for (i, ai) in a.iter().enumerate() {
                back = back.add(&ch.carlitz_f(i).unwrap().scale(ai));
            }
            assert_eq!(back, u);
        }
        let big = LinPoly::term(f, 5, RatFn::one(f));
        assert!(exp.check(&big).is_err());
    }

    #[test]
    fn invariant_expansion_examples() {
        let ch = cache(3, 5);
        let f = *ch.field();
        let carlitz = DeltaOperator::new(&ch, SigmaSpec::Carlitz, 5).unwrap();
        let seq = BasicSequence::new(&carlitz, 5).unwrap();
        // T = delta_0 recovers the defining sigma sequence.
        let exp = invariant_expand(&seq, &InvariantOperator::from_delta0(&carlitz)).unwrap();
        assert!(exp.reconstructed);
        assert!(exp.sigma[0].is_zero());
        assert!(exp.sigma[1].is_one());
        assert!(exp.sigma[2..].iter().all(RatFn::is_zero));
        // T = identity: sigma' = (1, 0, ...).
        let exp = invariant_expand(&seq, &InvariantOperator::identity(f, 5)).unwrap();
        assert!(exp.reconstructed);
        assert!(exp.sigma[0].is_one());
        assert!(exp.sigma[1..].iter().all(RatFn::is_zero));
        // The Carlitz delta_0 expanded over the laguerre sequence still
        // reconstructs c'_n = [n].
        let lag = DeltaOperator::new(&ch, SigmaSpec::Laguerre, 5).unwrap();
        let lag_seq = BasicSequence::new(&lag, 5).unwrap();
        let exp = invariant_expand(&lag_seq, &InvariantOperator::from_delta0(&carlitz)).unwrap();
        assert!(exp.reconstructed, "{:?}", exp.first_mismatch);
    }

    #[test]
    fn carlitz_expansion_and_norms() {
        let ch = cache(2, 5);
        let f = *ch.field();
        // u = f_3: coefficients are the Kronecker delta.
        let a = carlitz_expand(&ch, &ch.carlitz_f(3).unwrap()).unwrap();
        assert!(a[3].is_one());
        assert!(a[..3].iter().all(RatFn::is_zero));
        // q=2: t^2 = f_0 + D_1 f_1.
        let t2 = LinPoly::term(f, 1, RatFn::one(f));
        let a = carlitz_expand(&ch, &t2).unwrap();
        assert!(a[0].is_one());
        assert_eq!(a[1], RatFn::from_poly(ch.d(1).clone()));
        // Reconstruction: sum a_i f_i = u for a mixed input.
        let u = LinPoly::from_coeffs(f, vec![rf(&f, "1/x"), rf(&f, "x + 1"), rf(&f, "x^3")]);
        let a = carlitz_expand(&ch, &u).unwrap();
        let mut back = LinPoly::zero(f);
        for (i, ai) in a.iter().enumerate() {
            back = back.add(&ch.carlitz_f(i).unwrap().scale(ai));
        }
        assert_eq!(back, u);
        // Norms: ||f_i|| = q^0, ||t^q|| = q^0, ||x^{-1} t|| = q^1.
        for i in 0..=5 {
            assert_eq!(sup_norm(&ch, &ch.carlitz_f(i).unwrap()).unwrap(), Some(0));
        }
        assert_eq!(sup_norm(&ch, &t2).unwrap(), Some(0));
        let small = LinPoly::term(f, 0, rf(&f, "1/x"));
        assert_eq!(sup_norm(&ch, &small).unwrap(), Some(1));
        assert_eq!(sup_norm(&ch, &LinPoly::zero(f)).unwrap(), None);
    }

    #[test]
    fn orthonormal_reports() {
        let ch = cache(2, 4);
        let f = *ch.field();
        let lag = DeltaOperator::new(&ch, SigmaSpec::Laguerre, 4).unwrap();
        let lag_seq = BasicSequence::new(&lag, 4).unwrap();
        let rep = orthonormal_check(&lag_seq, 10, 3).unwrap();
        assert_eq!(
            rep,
            OrthonormalReport::Verified {
                norms_checked: 5,
                samples_checked: 10
            }
        );
        // carlitz: the basis is {f_n} itself.
        let car = DeltaOperator::new(&ch, SigmaSpec::Carlitz, 4).unwrap();
        let car_seq = BasicSequence::new(&car, 4).unwrap();
        assert!(orthonormal_check(&car_seq, 5, 3).unwrap().verified());
        // example2: |sigma_1| = q > 1.
        let ex2 = DeltaOperator::new(&ch, SigmaSpec::Example2, 4).unwrap();
        let ex2_seq = BasicSequence::new(&ex2, 4).unwrap();
        assert_eq!(
            orthonormal_check(&ex2_seq, 5, 3).unwrap(),
            OrthonormalReport::HypothesisNotMet {
                level: 1,
                valuation: -1
            }
        );
        // A negative-valuation fault in the table breaks a norm.
        let broken = lag_seq.perturbed(2, 0, &rf(&f, "1/x"));
        match orthonormal_check(&broken, 5, 3).unwrap() {
            OrthonormalReport::NormFailed { n: 2, exponent } => assert!(exponent > 0),
            other => panic!("expected a norm failure, got {:?}", other),
        }
    }

    #[test]
    fn descent_and_regeneration() {
        for q in [2u64, 3] {
            let ch = cache(q, 4);
            for sigma in [SigmaSpec::Carlitz, SigmaSpec::Laguerre, SigmaSpec::Example2] {
                let op = DeltaOperator::new(&ch, sigma, 4).unwrap();
                let seq = BasicSequence::new(&op, 4).unwrap();
                for j in 0..=4usize {
                    for l in 0..=j {
                        assert!(iterated_descent_check(&seq, l, j).unwrap());
                    }
                }
                assert!(uniqueness_regeneration_check(&seq).unwrap());
                let f = *ch.field();
                let broken = seq.perturbed(3, 2, &RatFn::one(f));
                assert!(!uniqueness_regeneration_check(&broken).unwrap());
            }
        }
    }

    #[test]
    fn recursive_iterate_agrees_with_diagonal() {
        for q in [2u64, 3] {
            let ch = cache(q, 5);
            let f = *ch.field();
            let op = DeltaOperator::new(&ch, SigmaSpec::Carlitz, 5).unwrap();
            // Vanishing below the diagonal: l > n kills t^{q^n}.
            for l in 1..=3usize {
                for n in 0..l {
                    let m = LinPoly::term(f, n, RatFn::one(f));
                    assert!(delta0_recursive(&ch, l, &m).unwrap().is_zero());
                }
            }
            // Eigenvalues on monomials and agreement on random inputs.
            let mut rng = ChaCha8Rng::seed_from_u64(19);
            for l in 0..=3usize {
                for n in l..=5 {
                    let m = LinPoly::term(f, n, RatFn::one(f));
                    assert_eq!(
                        delta0_recursive(&ch, l, &m).unwrap(),
                        op.delta0_iter(l, &m).unwrap()
                    );
                }
                for _ in 0..3 {
                    let u = random_linpoly(&mut rng, &f, 5);
                    assert_eq!(
                        delta0_recursive(&ch, l, &u).unwrap(),
                        op.delta0_iter(l, &u).unwrap()
                    );
                }
            }
        }
        // Hand value at q = 2: the second iterate on t^4 is [2][1]^2 t^4.
        let ch = cache(2, 2);
        let f = *ch.field();
        let t4 = LinPoly::term(f, 2, RatFn::one(f));
        let want = ch.bracket(2).mul(&ch.bracket(1).pow(2));
        assert_eq!(
            delta0_recursive(&ch, 2, &t4).unwrap(),
            LinPoly::term(f, 2, RatFn::from_poly(want))
        );
    }

    #[test]
    fn diagonal_operators_commute_with_substitution() {
        let ch = cache(3, 3);
        let f = *ch.field();
        let op = DeltaOperator::new(&ch, SigmaSpec::Laguerre, 3).unwrap();
        let t = InvariantOperator::from_delta0(&op);
        let u = LinPoly::from_coeffs(f, vec![rf(&f, "x"), rf(&f, "1/(x+1)"), rf(&f, "x^2")]);
        for lam in ["x", "x^2 + 1", "1/x"] {
            assert!(invariance_check(&t, &u, &rf(&f, lam)).unwrap());
        }
    }

    #[test]
    fn explicit_sigma_zero_extends() {
        let ch = cache(2, 4);
        let f = *ch.field();
        // [1] is the carlitz preset spelled out.
        let op_e = DeltaOperator::new(&ch, SigmaSpec::Explicit(vec![RatFn::one(f)]), 4).unwrap();
        let op_c = DeltaOperator::new(&ch, SigmaSpec::Carlitz, 4).unwrap();
        for n in 1..=4 {
            assert_eq!(op_e.c_value(n), op_c.c_value(n));
            assert_eq!(op_e.s_value(n).unwrap(), op_c.s_value(n).unwrap());
        }
        // A truncated laguerre list diverges from the full preset once the
        // tail matters.
        let op_t =
            DeltaOperator::new(&ch, SigmaSpec::Explicit(vec![RatFn::one(f); 2]), 4).unwrap();
        let op_l = DeltaOperator::new(&ch, SigmaSpec::Laguerre, 4).unwrap();
        assert_eq!(op_t.c_value(2), op_l.c_value(2));
        assert_ne!(op_t.c_value(3), op_l.c_value(3));
    }
}
