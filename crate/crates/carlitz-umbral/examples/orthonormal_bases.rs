//! Orthonormal bases for the sup norm: when v(sigma_1) = 0 and all
//! v(sigma_l) >= 0, the basic sequence Q_n has norm q^0 and the Taylor
//! coefficients compute norms: ||f|| = max_l |psi_l|. The example2 family
//! violates the hypothesis and the theorem correctly does not apply.

use carlitz_umbral::carlitz::CarlitzCache;
use carlitz_umbral::parse::{fmt_ratfn, parse_linpoly};
use carlitz_umbral::umbral::{carlitz_expand, orthonormal_check, sup_norm, taylor_expand};
use carlitz_umbral::{BasicSequence, DeltaOperator, FieldSpec, Result, SigmaSpec};

fn main() -> Result<()> {
    let fs = FieldSpec::from_q(2)?;
    let cache = CarlitzCache::new(fs, 4)?;
    let op = DeltaOperator::new(&cache, SigmaSpec::Laguerre, 4)?;
    let seq = BasicSequence::new(&op, 4)?;

    println!("laguerre over F_2: norms of the basic sequence");
    for n in 0..=4 {
        let qn = seq.q_poly(n)?;
        let e = sup_norm(&cache, &qn)?.expect("Q_n is nonzero");
        println!("  ||Q_{}|| = q^{}", n, e);
        let vals: Vec<String> = carlitz_expand(&cache, &qn)?
            .iter()
            .map(|a| match a.valuation().finite() {
                Some(v) => v.to_string(),
                None => "inf".into(),
            })
            .collect();
        println!("    coefficient valuations: [{}]", vals.join(", "));
    }

    // Norm via Taylor coefficients on a sample polynomial.
    let f = parse_linpoly(fs, "t^4/x + t^2 + x^3*t")?;
    let e = sup_norm(&cache, &f)?.expect("nonzero");
    let psi = taylor_expand(&seq, &f)?;
    let best = psi
        .iter()
        .filter_map(|c| c.valuation().finite())
        .map(|v| -v)
        .max()
        .expect("nonzero");
    println!("f = {}", f);
    println!("  ||f|| = q^{}, max_l |psi_l| = q^{}", e, best);
    for (l, c) in psi.iter().enumerate() {
        println!("  psi_{} = {}", l, fmt_ratfn(c));
    }

    // The seeded bulk check, and the family where the hypothesis fails.
    println!("laguerre check: {:?}", orthonormal_check(&seq, 8, 1)?);
    let op2 = DeltaOperator::new(&cache, SigmaSpec::Example2, 4)?;
    let seq2 = BasicSequence::new(&op2, 4)?;
    println!("example2 check: {:?}", orthonormal_check(&seq2, 8, 1)?);
    Ok(())
}
