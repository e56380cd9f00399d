//! The Carlitz ladder over F_q[x]: brackets [i] = x^{q^i} - x, factorials
//! D_i = [i] D_{i-1}^q and L_i = [i] L_{i-1}, and the two polynomial
//! families e_i (products over proper polynomials of degree < i) and the
//! normalized f_i = e_i / D_i.

use carlitz_umbral::carlitz::CarlitzCache;
use carlitz_umbral::parse::fmt_poly;
use carlitz_umbral::{FieldSpec, Result};

fn main() -> Result<()> {
    let fs = FieldSpec::from_q(2)?;
    let cache = CarlitzCache::new(fs, 4)?;
    println!("carlitz tables over F_2, i <= 4");
    for i in 0..=4 {
        println!("i = {}", i);
        if i > 0 {
            println!("  [{}] = {}", i, fmt_poly(cache.bracket(i)));
        }
        println!("  D_{} = {}", i, fmt_poly(cache.d(i)));
        println!("  L_{} = {}", i, fmt_poly(cache.l(i)));
        println!("  e_{} = {}", i, cache.carlitz_e(i)?);
        println!("  f_{} = {}", i, cache.carlitz_f(i)?);
    }

    // e_i has two independent constructions: the recurrence from e_{i-1}
    // and the product of t - m over all m of degree < i. They agree.
    for i in 0..=3 {
        let same = cache.carlitz_e(i)? == cache.carlitz_e_oracle(i)?;
        println!("e_{} recurrence = linear-factor product: {}", i, same);
    }
    Ok(())
}
