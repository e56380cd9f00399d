//! The Carlitz module: the F_q[x]-module structure C_a on the additive
//! group, with C_x(z) = x z + z^q and C_a multiplicative in a. The
//! composition law C_{ts} = C_t o C_s is what makes C a ring morphism
//! from F_q[x] into F_q-linear polynomials.

use carlitz_umbral::carlitz::CarlitzCache;
use carlitz_umbral::parse::parse_poly;
use carlitz_umbral::{FieldSpec, Result};

fn main() -> Result<()> {
    let fs = FieldSpec::from_q(2)?;
    let cache = CarlitzCache::new(fs, 6)?;

    for src in ["x", "x^2", "x^2 + x + 1"] {
        let a = parse_poly(fs, src)?;
        println!("C_({}) = {}", src, cache.carlitz_module(&a)?);
    }

    // Multiplicativity: C_{ts} = C_t o C_s for every pair of arguments.
    for (ts, tt) in [("x", "x^2"), ("x + 1", "x^2 + x"), ("x^2", "x^2 + 1")] {
        let s = parse_poly(fs, ts)?;
        let t = parse_poly(fs, tt)?;
        let joint = cache.carlitz_module(&t.mul(&s))?;
        let composed = cache.carlitz_module(&t)?.compose(&cache.carlitz_module(&s)?)?;
        println!(
            "C_(({}) ({})) = C_({}) o C_({}): {}",
            tt, ts, tt, ts,
            joint == composed
        );
    }
    Ok(())
}
