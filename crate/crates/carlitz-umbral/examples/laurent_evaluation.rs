//! Evaluating the formal series at points of K = F_q((x)): truncated
//! Laurent arithmetic, the convergence condition (term valuations must
//! grow), log_delta(e_delta(lam)) = lam at a convergent point, the
//! functional-equation identity at lam = x^2, and divergence at v = 1.

use carlitz_umbral::carlitz::CarlitzCache;
use carlitz_umbral::genfun::{exp_series, log_series};
use carlitz_umbral::laurent::{eq36_check, eval_lin_series, ratfn_to_laurent};
use carlitz_umbral::parse::parse_ratfn;
use carlitz_umbral::{
    BasicSequence, DeltaOperator, FieldSpec, LaurentSeries, Poly, RatFn, Result, SigmaSpec,
};

fn main() -> Result<()> {
    let fs = FieldSpec::from_q(2)?;

    // Rational functions embed in K; denominators become geometric tails.
    let r = parse_ratfn(fs, "x^2/(x + 1)")?;
    println!("{} = {}", r, ratfn_to_laurent(&r, 10));

    let cache = CarlitzCache::new(fs, 8)?;
    let op = DeltaOperator::new(&cache, SigmaSpec::Carlitz, 8)?;
    let e = exp_series(&op, 8)?;
    let log = log_series(&op, 8)?;

    // At v(lam) = 2 the terms b_j lam^{q^j} gain valuation every step.
    let prec = 16;
    let lam = ratfn_to_laurent(&parse_ratfn(fs, "x^2")?, prec);
    let value = eval_lin_series(e.coeffs(), &lam, prec)?;
    println!("e_delta(x^2)   = {}", value);
    let back = eval_lin_series(log.coeffs(), &value, prec)?;
    println!("log(e(x^2))    = {}", back);
    println!("round trip is the identity: {}", back.agrees_with(&lam));

    // The point identity behind the series: both sides of the defining
    // functional equation agree at lam = x^2, t = x.
    let seq = BasicSequence::new(&op, 8)?;
    let lam12 = LaurentSeries::from_poly(&Poly::x_pow(fs, 2), 12);
    let p = eq36_check(&seq, &lam12, &RatFn::x(fs), 12)?;
    println!("functional equation at lam = x^2, t = x: {}", p.holds());

    // At v(lam) = 1 every term of e_delta has valuation exactly 1: the
    // series does not converge and evaluation refuses.
    let edge = ratfn_to_laurent(&RatFn::x(fs), prec);
    match eval_lin_series(e.coeffs(), &edge, prec) {
        Err(err) => println!("at v = 1: {}", err),
        Ok(_) => println!("at v = 1: unexpectedly converged"),
    }
    Ok(())
}
