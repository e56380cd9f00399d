//! Arithmetic in the finite field F_q, q = p^nu <= 2^16.
//!
//! Elements are stored in the polynomial basis: a length-nu coordinate
//! vector over F_p packed into a single `u32` in radix p (digit i is the
//! coefficient of the basis power x^i). Prime fields (nu = 1) are plain
//! residues. No multiplication tables are built; products convolve the
//! coordinate vectors and reduce by the field modulus on the fly.
//!
//! The modulus for an extension field is chosen deterministically: the
//! lexicographically smallest monic irreducible of degree nu over F_p,
//! comparing coefficient tuples from the constant term upward. This makes
//! every printed coordinate vector reproducible across runs and machines.

use crate::error::{Error, Result};

pub const MAX_NU: usize = 16;

/// Element of F_q. Meaningful only together with the `FieldSpec` that
/// produced it; the spec's operations assume canonical (fully reduced)
/// coordinates, which every constructor here guarantees.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FqElem(pub(crate) u32);

/// Description of F_q: characteristic, extension degree, and (for nu > 1)
/// the low coefficients of the monic degree-nu modulus.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FieldSpec {
    p: u32,
    nu: u32,
    q: u32,
    modulus: [u32; MAX_NU],
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

impl FieldSpec {
    /// Field with p^nu elements. `p` must be prime and p^nu <= 2^16.
    pub fn new(p: u64, nu: u32) -> Result<FieldSpec> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if nu == 0 || nu as usize > MAX_NU {
            return Err(Error::FieldTooLarge { p, nu });
        }
        let mut q: u64 = 1;
        for _ in 0..nu {
            q *= p;
            if q > 1 << 16 {
                return Err(Error::FieldTooLarge { p, nu });
            }
        }
        let mut spec = FieldSpec {
            p: p as u32,
            nu,
            q: q as u32,
            modulus: [0; MAX_NU],
        };
        if nu > 1 {
            spec.modulus = find_modulus(p as u32, nu);
        }
        Ok(spec)
    }

    /// Field of size q, factored as p^nu. Errors unless q is a prime power.
    pub fn from_q(q: u64) -> Result<FieldSpec> {
        if q < 2 {
            return Err(Error::NotPrime(q));
        }
        let mut p = 2u64;
        while p * p <= q {
            if q % p == 0 {
                break;
            }
            p += 1;
        }
        if p * p > q {
            p = q; // q itself is prime
        }
        let mut nu = 0u32;
        let mut rest = q;
        while rest > 1 {
            if rest % p != 0 {
                return Err(Error::NotPrime(q));
            }
            rest /= p;
            nu += 1;
        }
        FieldSpec::new(p, nu)
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn nu(&self) -> u32 {
        self.nu
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    /// Coefficients c_0..c_{nu-1} of the modulus (leading 1 implicit).
    /// Empty slice for prime fields.
    pub fn modulus_coeffs(&self) -> &[u32] {
        &self.modulus[..if self.nu > 1 { self.nu as usize } else { 0 }]
    }

    pub fn zero(&self) -> FqElem {
        FqElem(0)
    }

    pub fn one(&self) -> FqElem {
        FqElem(1)
    }

    pub fn is_zero(&self, a: FqElem) -> bool {
        a.0 == 0
    }

    /// Integer embedded via the prime subfield (n mod p).
    pub fn from_u64(&self, n: u64) -> FqElem {
        FqElem((n % self.p as u64) as u32)
    }

    /// The i-th element in the fixed enumeration order, 0 <= i < q
    /// (digit i of the packed representation; prime subfield first).
    pub fn element_at(&self, i: u64) -> FqElem {
        assert!(i < self.q as u64, "element index out of range");
        FqElem(i as u32)
    }

    /// Element from coordinates (constant term first). Coordinates are
    /// reduced mod p; at most nu may be given.
    pub fn elem(&self, coords: &[u32]) -> FqElem {
        assert!(coords.len() <= self.nu as usize, "too many coordinates");
        let mut packed = 0u32;
        for (i, &c) in coords.iter().enumerate() {
            packed += (c % self.p) * self.p.pow(i as u32);
        }
        FqElem(packed)
    }

    pub fn coords(&self, a: FqElem) -> Vec<u32> {
        let mut v = Vec::with_capacity(self.nu as usize);
        let mut rest = a.0;
        for _ in 0..self.nu {
            v.push(rest % self.p);
            rest /= self.p;
        }
        v
    }

    /// All q elements, in increasing packed order (0 first).
    pub fn elements(&self) -> impl Iterator<Item = FqElem> {
        (0..self.q).map(FqElem)
    }

    pub fn add(&self, a: FqElem, b: FqElem) -> FqElem {
        if self.nu == 1 {
            return FqElem((a.0 + b.0) % self.p);
        }
        let (mut out, mut pw, mut x, mut y) = (0u32, 1u32, a.0, b.0);
        for _ in 0..self.nu {
            out += ((x % self.p + y % self.p) % self.p) * pw;
            x /= self.p;
            y /= self.p;
            pw *= self.p;
        }
        FqElem(out)
    }

    pub fn neg(&self, a: FqElem) -> FqElem {
        if self.nu == 1 {
            return FqElem(if a.0 == 0 { 0 } else { self.p - a.0 });
        }
        let (mut out, mut pw, mut x) = (0u32, 1u32, a.0);
        for _ in 0..self.nu {
            let d = x % self.p;
            out += (if d == 0 { 0 } else { self.p - d }) * pw;
            x /= self.p;
            pw *= self.p;
        }
        FqElem(out)
    }

    pub fn sub(&self, a: FqElem, b: FqElem) -> FqElem {
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, a: FqElem, b: FqElem) -> FqElem {
        if self.nu == 1 {
            return FqElem(((a.0 as u64 * b.0 as u64) % self.p as u64) as u32);
        }
        let nu = self.nu as usize;
        let p = self.p as u64;
        let mut da = [0u64; MAX_NU];
        let mut db = [0u64; MAX_NU];
        let (mut x, mut y) = (a.0 as u64, b.0 as u64);
        for i in 0..nu {
            da[i] = x % p;
            db[i] = y % p;
            x /= p;
            y /= p;
        }
        let mut buf = [0u64; 2 * MAX_NU - 1];
        for i in 0..nu {
            if da[i] == 0 {
                continue;
            }
            for j in 0..nu {
                buf[i + j] += da[i] * db[j];
            }
        }
        // x^nu = -(m_0 + m_1 x + ... + m_{nu-1} x^{nu-1})
        for i in (nu..2 * nu - 1).rev() {
            let t = buf[i] % p;
            buf[i] = 0;
            if t == 0 {
                continue;
            }
            for j in 0..nu {
                let m = self.modulus[j] as u64;
                if m != 0 {
                    buf[i - nu + j] += t * (p - m);
                }
            }
        }
        let mut out = 0u32;
        let mut pw = 1u32;
        for i in 0..nu {
            out += ((buf[i] % p) as u32) * pw;
            pw *= self.p;
        }
        FqElem(out)
    }

    pub fn pow(&self, a: FqElem, mut e: u64) -> FqElem {
        let mut base = a;
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    pub fn inv(&self, a: FqElem) -> Result<FqElem> {
        if a.0 == 0 {
            return Err(Error::DivisionByZero);
        }
        // a^(q-2) = a^{-1}; the group of units has order q-1.
        Ok(self.pow(a, self.q as u64 - 2))
    }

    pub fn div(&self, a: FqElem, b: FqElem) -> Result<FqElem> {
        Ok(self.mul(a, self.inv(b)?))
    }

    /// Canonical text form: decimal residue for prime fields, coordinate
    /// vector `[c0,c1,...]` for extensions.
    pub fn fmt_elem(&self, a: FqElem) -> String {
        if self.nu == 1 {
            a.0.to_string()
        } else {
            let coords = self.coords(a);
            let inner: Vec<String> = coords.iter().map(|c| c.to_string()).collect();
            format!("[{}]", inner.join(","))
        }
    }
}

/// Lexicographically smallest monic irreducible of degree nu over F_p,
/// coefficient tuples (c_0, ..., c_{nu-1}) compared constant term first.
fn find_modulus(p: u32, nu: u32) -> [u32; MAX_NU] {
    let nu = nu as usize;
    let total = (p as u64).pow(nu as u32);
    for idx in 0..total {
        // c_0 is the most significant digit so increasing idx walks the
        // tuples in lexicographic order.
        let mut coeffs = vec![0u32; nu];
        let mut rest = idx;
        for i in (0..nu).rev() {
            coeffs[i] = (rest % p as u64) as u32;
            rest /= p as u64;
        }
        if is_irreducible(p, &coeffs) {
            let mut out = [0u32; MAX_NU];
            out[..nu].copy_from_slice(&coeffs);
            return out;
        }
    }
    unreachable!("irreducibles of every degree exist over F_p");
}

/// Is x^nu + c_{nu-1} x^{nu-1} + ... + c_0 irreducible over F_p?
/// Trial division by every monic polynomial of degree 1..=nu/2; the
/// candidate count is at most 2 * p^(nu/2) <= 512 under the q <= 2^16 cap.
fn is_irreducible(p: u32, low_coeffs: &[u32]) -> bool {
    let nu = low_coeffs.len();
    let mut f = low_coeffs.to_vec();
    f.push(1);
    for d in 1..=nu / 2 {
        let count = (p as u64).pow(d as u32);
        for idx in 0..count {
            let mut g = vec![0u32; d + 1];
            let mut rest = idx;
            for item in g.iter_mut().take(d) {
                *item = (rest % p as u64) as u32;
                rest /= p as u64;
            }
            g[d] = 1;
            if divides(p, &g, &f) {
                return false;
            }
        }
    }
    true
}

/// Does g divide f over F_p? Both monic, dense low-to-high coefficients.
fn divides(p: u32, g: &[u32], f: &[u32]) -> bool {
    let mut rem = f.to_vec();
    let dg = g.len() - 1;
    while rem.len() > dg {
        let lead = *rem.last().unwrap() % p;
        let shift = rem.len() - 1 - dg;
        if lead != 0 {
            for (i, &gc) in g.iter().enumerate() {
                let sub = (lead as u64 * gc as u64) % p as u64;
                let cur = rem[shift + i] as u64;
                rem[shift + i] = ((cur + p as u64 - sub) % p as u64) as u32;
            }
        }
        rem.pop();
        while rem.len() > dg && *rem.last().unwrap() == 0 {
            rem.pop();
        }
    }
    rem.iter().all(|&c| c % p == 0)
}
