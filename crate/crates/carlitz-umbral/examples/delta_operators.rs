//! Delta operators delta = sum_l sigma_l tau^l delta_0^(l): the three
//! built-in coefficient families, their structure constants c_n, and the
//! defining action delta Q_n = Q_{n-1} on the basic sequence.

use carlitz_umbral::carlitz::CarlitzCache;
use carlitz_umbral::parse::fmt_ratfn;
use carlitz_umbral::{BasicSequence, DeltaOperator, FieldSpec, Result, SigmaSpec};

fn main() -> Result<()> {
    let fs = FieldSpec::from_q(2)?;
    let cache = CarlitzCache::new(fs, 4)?;
    let presets = [
        ("carlitz", SigmaSpec::Carlitz),
        ("laguerre", SigmaSpec::Laguerre),
        ("example2", SigmaSpec::Example2),
    ];
    for (name, spec) in presets {
        let op = DeltaOperator::new(&cache, spec.clone(), 4)?;
        println!("operator {}", name);
        for l in 1..=3 {
            println!("  sigma_{} = {}", l, fmt_ratfn(&spec.sigma(&cache, l)?));
        }
        for n in 1..=3 {
            println!(
                "  S_{} = {}, c_{} = {}",
                n,
                fmt_ratfn(&op.s_value(n)?),
                n,
                fmt_ratfn(op.c_value(n))
            );
        }

        // delta lowers the basic sequence by one step: delta Q_n = Q_{n-1}.
        let seq = BasicSequence::new(&op, 4)?;
        for n in 1..=4 {
            let lowered = op.delta_apply(&seq.q_poly(n)?)?;
            println!(
                "  delta Q_{} = Q_{}: {}",
                n,
                n - 1,
                lowered == seq.q_poly(n - 1)?
            );
        }
    }
    Ok(())
}
