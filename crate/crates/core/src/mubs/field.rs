//! Arithmetic in GF(p^n) by lookup tables.
//!
//! Elements are indexed by their coefficient vector over the polynomial basis
//! `1, x, …, x^{n-1}` read as a base-`p` number, so the prime subfield is
//! `0..p` and index arithmetic for `n = 1` is plain arithmetic mod `p`.

use crate::error::{Error, Result};

/// Monic irreducible polynomials, coefficients of `1, x, …, x^{n-1}` (the
/// leading 1 is implicit).
const IRREDUCIBLES: &[(u64, u32, &[u32])] = &[
    (3, 2, &[1, 0]),       // x^2 + 1
    (5, 2, &[2, 0]),       // x^2 + 2
    (7, 2, &[1, 0]),       // x^2 + 1
    (11, 2, &[1, 0]),      // x^2 + 1
    (13, 2, &[11, 0]),     // x^2 + 11
    (3, 3, &[1, 2, 0]),    // x^3 + 2x + 1
    (5, 3, &[1, 1, 0]),    // x^3 + x + 1
    (3, 4, &[2, 1, 0, 0]), // x^4 + x + 2
];

const MAX_ORDER: u64 = 256;

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut k = 2;
    while k * k <= n {
        if n.is_multiple_of(k) {
            return false;
        }
        k += 1;
    }
    true
}

/// `Some((p, n))` if `q = p^n` for a prime `p`.
pub fn prime_power(q: u64) -> Option<(u64, u32)> {
    if q < 2 {
        return None;
    }
    let p = (2..=q).find(|k| q.is_multiple_of(*k))?;
    let mut rest = q;
    let mut n = 0;
    while rest.is_multiple_of(p) {
        rest /= p;
        n += 1;
    }
    (rest == 1).then_some((p, n))
}

/// Addition, multiplication and absolute trace tables of GF(p^n).
#[derive(Clone, Debug)]
pub struct FieldTable {
    p: u32,
    n: u32,
    q: usize,
    modulus: Vec<u32>,
    add: Vec<u16>,
    mul: Vec<u16>,
    trace: Vec<u16>,
}

impl FieldTable {
    pub fn characteristic(&self) -> u32 {
        self.p
    }

    pub fn degree(&self) -> u32 {
        self.n
    }

    pub fn order(&self) -> usize {
        self.q
    }

    /// Non-leading coefficients of the defining polynomial (empty for prime
    /// fields).
    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    pub fn add(&self, a: usize, b: usize) -> usize {
        self.add[a * self.q + b] as usize
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.mul[a * self.q + b] as usize
    }

    pub fn neg(&self, a: usize) -> usize {
        (0..self.q).find(|&b| self.add(a, b) == 0).expect("additive inverse exists")
    }

    pub fn pow(&self, a: usize, mut e: u64) -> usize {
        let mut base = a;
        let mut acc = 1;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// Absolute trace `F_q → F_p`, returned as an integer in `0..p`.
    pub fn trace(&self, a: usize) -> u32 {
        self.trace[a] as u32
    }

    /// Index of the element with the given coefficients (low degree first).
    pub fn element(&self, coeffs: &[u32]) -> usize {
        coeffs.iter().rev().fold(0usize, |acc, &c| acc * self.p as usize + (c % self.p) as usize)
    }

    pub fn coefficients(&self, mut a: usize) -> Vec<u32> {
        let p = self.p as usize;
        (0..self.n)
            .map(|_| {
                let c = (a % p) as u32;
                a /= p;
                c
            })
            .collect()
    }
}

/// Builds GF(p^n). Extension fields come from the shipped polynomial table.
pub fn gf_build(p: u64, n: u32) -> Result<FieldTable> {
    let unsupported = |reason: &str| Error::UnsupportedField {
        p,
        n,
        reason: reason.to_string(),
    };
    if !is_prime(p) {
        return Err(unsupported("characteristic is not prime"));
    }
    if n == 0 {
        return Err(unsupported("degree must be >= 1"));
    }
    let q = p.checked_pow(n).filter(|&q| q <= MAX_ORDER).ok_or_else(|| unsupported("order exceeds 256"))?;
    let modulus: Vec<u32> = if n == 1 {
        Vec::new()
    } else {
        IRREDUCIBLES
            .iter()
            .find(|(pp, nn, _)| *pp == p && *nn == n)
            .map(|(_, _, c)| c.to_vec())
            .ok_or_else(|| unsupported("no irreducible polynomial shipped for this field"))?
    };

    let p32 = p as u32;
    let q = q as usize;
    let digits = |mut a: usize| -> Vec<u32> {
        (0..n)
            .map(|_| {
                let c = (a % p as usize) as u32;
                a /= p as usize;
                c
            })
            .collect()
    };
    let index = |c: &[u32]| c.iter().rev().fold(0usize, |acc, &x| acc * p as usize + x as usize);

    let mut add = vec![0u16; q * q];
    let mut mul = vec![0u16; q * q];
    for a in 0..q {
        let ca = digits(a);
        for b in 0..q {
            let cb = digits(b);
            let sum: Vec<u32> = ca.iter().zip(&cb).map(|(x, y)| (x + y) % p32).collect();
            add[a * q + b] = index(&sum) as u16;
            mul[a * q + b] = index(&poly_mul_mod(&ca, &cb, &modulus, p32)) as u16;
        }
    }

    let mut table = FieldTable {
        p: p32,
        n,
        q,
        modulus,
        add,
        mul,
        trace: vec![0; q],
    };
    for a in 0..q {
        // tr(a) = a + a^p + … + a^{p^{n-1}}
        let mut acc = 0;
        let mut frob = a;
        for _ in 0..n {
            acc = table.add(acc, frob);
            frob = table.pow(frob, p);
        }
        if acc >= p as usize {
            return Err(unsupported("trace left the prime subfield; modulus is not irreducible"));
        }
        table.trace[a] = acc as u16;
    }
    Ok(table)
}

/// Product of two degree-<n polynomials reduced by the monic modulus
/// `x^n + Σ m_i x^i`.
fn poly_mul_mod(a: &[u32], b: &[u32], modulus: &[u32], p: u32) -> Vec<u32> {
    let n = a.len();
    let mut prod = vec![0u32; 2 * n - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            prod[i + j] = (prod[i + j] + x * y) % p;
        }
    }
    // x^n ≡ -Σ m_i x^i
    for k in (n..prod.len()).rev() {
        let c = prod[k];
        if c == 0 {
            continue;
        }
        prod[k] = 0;
        for (i, m) in modulus.iter().enumerate() {
            let t = k - n + i;
            prod[t] = (prod[t] + (p - (c * m) % p)) % p;
        }
    }
    prod.truncate(n);
    prod
}
