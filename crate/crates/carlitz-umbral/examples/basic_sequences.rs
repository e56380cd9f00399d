//! Basic sequences of K-binomial type: the gamma coefficient triangle,
//! the polynomials Q_n and P_n = D_n Q_n, and the binomial identity
//! Q_n(s + t) = sum_j Q_j(s) Q_{n-j}(t)-style expansion that characterizes
//! them, checked through its exact bilinear form.

use carlitz_umbral::carlitz::CarlitzCache;
use carlitz_umbral::parse::fmt_ratfn;
use carlitz_umbral::umbral::{k_binomial_check, uniqueness_regeneration_check};
use carlitz_umbral::{BasicSequence, DeltaOperator, FieldSpec, Result, SigmaSpec};

fn main() -> Result<()> {
    let fs = FieldSpec::from_q(2)?;
    let cache = CarlitzCache::new(fs, 4)?;
    let op = DeltaOperator::new(&cache, SigmaSpec::Laguerre, 4)?;
    let seq = BasicSequence::new(&op, 4)?;

    println!("laguerre basic sequence over F_2");
    for n in 0..=4 {
        let row: Vec<String> = (0..=n)
            .map(|j| Ok(fmt_ratfn(&seq.gamma(n, j)?)))
            .collect::<Result<_>>()?;
        println!("n = {}", n);
        println!("  gamma = [{}]", row.join(", "));
        println!("  Q_{} = {}", n, seq.q_poly(n)?);
        println!("  P_{} = {}", n, seq.p_poly(n)?);
    }

    // The K-binomial identity, as an equality of bilinear forms in (s, t).
    for i in 0..=4 {
        let r = k_binomial_check(&seq, i)?;
        println!("K-binomial identity at Q_{}: {}", i, r.holds());
    }

    // The sequence regenerates itself from its own gamma data: basic
    // sequences are unique for their operator.
    println!(
        "regeneration from gamma reproduces the sequence: {}",
        uniqueness_regeneration_check(&seq)?
    );
    Ok(())
}
