//! A tour of the coefficient fields F_q: element enumeration, arithmetic,
//! the Frobenius map a -> a^p, and the freshman's dream (a + b)^p = a^p + b^p
//! that makes every q-power map F_q-linear in characteristic p.

use carlitz_umbral::{FieldSpec, Result};

fn main() -> Result<()> {
    for q in [4u64, 9] {
        let fs = FieldSpec::from_q(q)?;
        println!("F_{} = F_{}^{}", fs.q(), fs.p(), fs.nu());

        let elems: Vec<_> = fs.elements().collect();
        print!("  elements as coordinate vectors:");
        for &a in &elems {
            print!(" {:?}", fs.coords(a));
        }
        println!();

        // Frobenius orbits partition the field; fixed points form F_p.
        let p = fs.p() as u64;
        print!("  frobenius a -> a^{}:", p);
        for &a in &elems {
            print!(" {:?}->{:?}", fs.coords(a), fs.coords(fs.pow(a, p)));
        }
        println!();

        // Additivity of the p-th power map on a full pass over pairs.
        let additive = elems.iter().all(|&a| {
            elems
                .iter()
                .all(|&b| fs.pow(fs.add(a, b), p) == fs.add(fs.pow(a, p), fs.pow(b, p)))
        });
        println!("  (a + b)^p = a^p + b^p for all pairs: {}", additive);

        // Multiplicative group has order q - 1.
        let one = fs.one();
        let all_unit_order = elems
            .iter()
            .filter(|&&a| !fs.is_zero(a))
            .all(|&a| fs.pow(a, q - 1) == one);
        println!("  a^(q-1) = 1 for all units: {}", all_unit_order);
    }
    Ok(())
}
