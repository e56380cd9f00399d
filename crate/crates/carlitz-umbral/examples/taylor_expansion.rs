//! Generalized Taylor expansion: every F_q-linear polynomial f is the sum
//! of psi_l Q_l with psi_l produced by applying the operator powers of
//! delta to f; the same psi solves the triangular linear system, and the
//! expansion reconstructs f exactly.

use carlitz_umbral::carlitz::CarlitzCache;
use carlitz_umbral::parse::{fmt_ratfn, parse_linpoly};
use carlitz_umbral::umbral::{taylor_check, taylor_expand};
use carlitz_umbral::{BasicSequence, DeltaOperator, FieldSpec, LinPoly, Result, SigmaSpec};

fn main() -> Result<()> {
    let fs = FieldSpec::from_q(2)?;
    let cache = CarlitzCache::new(fs, 3)?;
    let op = DeltaOperator::new(&cache, SigmaSpec::Carlitz, 3)?;
    let seq = BasicSequence::new(&op, 3)?;

    let f = parse_linpoly(fs, "t^8 + x*t^2 + t")?;
    println!("f = {}", f);

    let psi = taylor_expand(&seq, &f)?;
    for (l, c) in psi.iter().enumerate() {
        println!("  psi_{} = {}", l, fmt_ratfn(c));
    }

    // Reconstruct f as sum_l psi_l Q_l and compare exactly.
    let mut back = LinPoly::zero(fs);
    for (l, c) in psi.iter().enumerate() {
        back = back.add(&seq.q_poly(l)?.scale(c));
    }
    println!("sum psi_l Q_l = f: {}", back == f);

    // The full two-route check: operator route and triangular solve agree,
    // and the expansion reconstructs the input.
    let report = taylor_check(&seq, &f)?;
    println!(
        "routes agree: {}, reconstructs: {}",
        report.routes_agree, report.reconstructs
    );
    Ok(())
}
