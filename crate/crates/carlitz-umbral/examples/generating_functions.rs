//! Generating functions as formal series in the twist operator: the
//! exponential e_delta with coefficients b_j, its reversion log_delta with
//! coefficients beta_j, the fixed-point equation c_n b_n = b_{n-1}^q, the
//! two-sided composition inverse, and the exact valuation profile
//! -v(b_j) = (q^j - 1)/(q - 1) under the orthonormality hypothesis.

use carlitz_umbral::carlitz::CarlitzCache;
use carlitz_umbral::genfun::{
    exp_series, generating_identity_check, log_series, series_identity_check, valuation_profile,
    ValuationReport,
};
use carlitz_umbral::parse::fmt_ratfn;
use carlitz_umbral::{BasicSequence, DeltaOperator, FieldSpec, Result, SigmaSpec};

fn main() -> Result<()> {
    let fs = FieldSpec::from_q(2)?;
    let cache = CarlitzCache::new(fs, 4)?;
    let op = DeltaOperator::new(&cache, SigmaSpec::Carlitz, 4)?;

    // For the Carlitz operator the tables are classical: b_j = 1/D_j and
    // beta_j = (-1)^j / L_j.
    let b = exp_series(&op, 4)?;
    let beta = log_series(&op, 4)?;
    println!("carlitz generating series over F_2");
    for j in 0..=4 {
        println!(
            "  b_{} = {}, beta_{} = {}",
            j,
            fmt_ratfn(b.coeff(j)),
            j,
            fmt_ratfn(beta.coeff(j))
        );
    }

    let s = series_identity_check(&op, 4)?;
    println!(
        "fixed point holds: {}, e o log = id: {}, log o e = id: {}",
        s.fixed_point.is_none(),
        s.exp_log.is_none(),
        s.log_exp.is_none()
    );

    // gamma_j^(n) = b_j beta_{n-j}^{q^j} ties the series to the sequence.
    let seq = BasicSequence::new(&op, 4)?;
    println!(
        "generating identity holds: {}",
        generating_identity_check(&seq, 4)?.holds()
    );

    match valuation_profile(&cache, op.sigma_spec(), 4)? {
        ValuationReport::Verified { rows } => {
            for r in rows {
                println!(
                    "  j = {}: -v(b_j) = {} (expected {}), -v(beta_j) <= {}",
                    r.j, r.b_exponent, r.expected, r.beta_bound
                );
            }
        }
        other => println!("valuation profile: {:?}", other),
    }
    Ok(())
}
