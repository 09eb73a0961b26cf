//! Finite fields `F_{p^d}` presented as `F_p[y]/(f)` and dense polynomials
//! over them.
//!
//! Field elements are packed into a `u64` code: the base-`p` digits of the
//! code are the coefficients of the representative polynomial in `y`,
//! least significant first. For `d = 1` the code is simply the residue.

use crate::error::{Error, Result};

pub(crate) fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

pub(crate) fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// A finite field `F_p[y]/(modulus)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Gf {
    p: u64,
    modulus: Vec<u64>,
    size: u64,
}

impl Gf {
    /// The prime field `F_p`, presented with modulus `y`.
    pub fn prime(p: u64) -> Result<Self> {
        if !is_prime(p) || p >= 1 << 31 {
            return Err(Error::NonPrimeP(p));
        }
        Ok(Self {
            p,
            modulus: vec![0, 1],
            size: p,
        })
    }

    /// `F_p[y]/(modulus)`; `modulus` holds ascending coefficients and must
    /// be monic and irreducible over `F_p`.
    pub fn new(p: u64, modulus: &[u64]) -> Result<Self> {
        let base = Self::prime(p)?;
        let bad = || Error::ReducibleModulus(modulus.to_vec());
        if modulus.len() < 2 || modulus.iter().any(|&c| c >= p) || *modulus.last().unwrap() != 1 {
            return Err(bad());
        }
        if !is_irreducible(&base, modulus) {
            return Err(bad());
        }
        let degree = (modulus.len() - 1) as u32;
        let size = p.checked_pow(degree).ok_or_else(bad)?;
        if size >= 1 << 62 {
            return Err(bad());
        }
        Ok(Self {
            p,
            modulus: modulus.to_vec(),
            size,
        })
    }

    /// First monic irreducible polynomial of the given degree over `F_p`,
    /// in order of increasing packed code of the lower coefficients.
    pub fn find_irreducible(p: u64, degree: usize) -> Result<Vec<u64>> {
        let base = Self::prime(p)?;
        if degree == 1 {
            return Ok(vec![0, 1]);
        }
        let mut lower = vec![0u64; degree];
        loop {
            // skip multiples of y
            if lower[0] != 0 {
                let mut f = lower.clone();
                f.push(1);
                if is_irreducible(&base, &f) {
                    return Ok(f);
                }
            }
            let mut i = 0;
            loop {
                if i == degree {
                    return Err(Error::DegreeBoundExceeded(degree));
                }
                lower[i] += 1;
                if lower[i] < p {
                    break;
                }
                lower[i] = 0;
                i += 1;
            }
        }
    }

    pub fn characteristic(&self) -> u64 {
        self.p
    }

    pub fn degree(&self) -> usize {
        self.modulus.len() - 1
    }

    pub fn modulus(&self) -> &[u64] {
        &self.modulus
    }

    pub fn size(&self) -> u64 {
        self.size
    }

    pub fn digits(&self, x: u64) -> Vec<u64> {
        let mut out = vec![0; self.degree()];
        let mut x = x;
        for d in out.iter_mut() {
            *d = x % self.p;
            x /= self.p;
        }
        out
    }

    pub fn from_digits(&self, digits: &[u64]) -> u64 {
        digits
            .iter()
            .rev()
            .fold(0u64, |acc, &d| acc * self.p + d % self.p)
    }

    /// Embeds an integer through `Z -> F_p -> F_q`.
    pub fn from_int(&self, v: i64) -> u64 {
        v.rem_euclid(self.p as i64) as u64
    }

    pub fn add(&self, a: u64, b: u64) -> u64 {
        if self.degree() == 1 {
            return (a + b) % self.p;
        }
        let (mut a, mut b) = (a, b);
        let mut out = 0u64;
        let mut place = 1u64;
        while a > 0 || b > 0 {
            out += ((a % self.p + b % self.p) % self.p) * place;
            a /= self.p;
            b /= self.p;
            place = place.wrapping_mul(self.p);
        }
        out
    }

    pub fn neg(&self, a: u64) -> u64 {
        if self.degree() == 1 {
            return (self.p - a % self.p) % self.p;
        }
        let digits: Vec<u64> = self
            .digits(a)
            .into_iter()
            .map(|d| (self.p - d) % self.p)
            .collect();
        self.from_digits(&digits)
    }

    pub fn sub(&self, a: u64, b: u64) -> u64 {
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, a: u64, b: u64) -> u64 {
        if self.degree() == 1 {
            return ((a as u128 * b as u128) % self.p as u128) as u64;
        }
        if a == 0 || b == 0 {
            return 0;
        }
        let d = self.degree();
        let (da, db) = (self.digits(a), self.digits(b));
        let mut prod = vec![0u64; 2 * d - 1];
        for (i, &x) in da.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in db.iter().enumerate() {
                prod[i + j] = (prod[i + j] + x * y) % self.p;
            }
        }
        // reduce by the monic modulus from the top down
        for top in (d..prod.len()).rev() {
            let c = prod[top];
            if c == 0 {
                continue;
            }
            for (k, &m) in self.modulus[..d].iter().enumerate() {
                let idx = top - d + k;
                prod[idx] = (prod[idx] + (self.p - c) * m) % self.p;
            }
            prod[top] = 0;
        }
        self.from_digits(&prod[..d])
    }

    pub fn pow(&self, a: u64, mut e: u128) -> u64 {
        let mut base = a;
        let mut acc = 1u64;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    pub fn inv(&self, a: u64) -> Option<u64> {
        if a == 0 {
            None
        } else {
            Some(self.pow(a, self.size as u128 - 2))
        }
    }

    /// `x -> x^{p^k}`.
    pub fn frobenius(&self, a: u64, k: usize) -> u64 {
        let mut x = a;
        for _ in 0..(k % self.degree()) {
            x = self.pow(x, self.p as u128);
        }
        x
    }

    /// Multiplicative order of a nonzero element.
    pub fn order(&self, a: u64) -> u64 {
        let group = self.size - 1;
        let mut ord = group;
        for r in prime_factors(group) {
            while ord % r == 0 && self.pow(a, (ord / r) as u128) == 1 {
                ord /= r;
            }
        }
        ord
    }
}

// Dense polynomials over a `Gf`, ascending coefficients, no trailing zeros.
pub(crate) type Poly = Vec<u64>;

pub(crate) fn trim(mut f: Poly) -> Poly {
    while f.last() == Some(&0) {
        f.pop();
    }
    f
}

pub(crate) fn poly_sub(field: &Gf, a: &[u64], b: &[u64]) -> Poly {
    let len = a.len().max(b.len());
    let out = (0..len)
        .map(|i| {
            let x = a.get(i).copied().unwrap_or(0);
            let y = b.get(i).copied().unwrap_or(0);
            field.sub(x, y)
        })
        .collect();
    trim(out)
}

pub(crate) fn poly_mul(field: &Gf, a: &[u64], b: &[u64]) -> Poly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = field.add(out[i + j], field.mul(x, y));
        }
    }
    trim(out)
}

/// Quotient and remainder; panics on division by the zero polynomial.
pub(crate) fn poly_divrem(field: &Gf, a: &[u64], b: &[u64]) -> (Poly, Poly) {
    let b = trim(b.to_vec());
    assert!(!b.is_empty(), "polynomial division by zero");
    let mut rem = trim(a.to_vec());
    if rem.len() < b.len() {
        return (Vec::new(), rem);
    }
    let lead_inv = field.inv(*b.last().unwrap()).expect("nonzero leading coefficient");
    let mut quot = vec![0u64; rem.len() - b.len() + 1];
    while rem.len() >= b.len() {
        let shift = rem.len() - b.len();
        let c = field.mul(*rem.last().unwrap(), lead_inv);
        quot[shift] = c;
        for (k, &bk) in b.iter().enumerate() {
            rem[shift + k] = field.sub(rem[shift + k], field.mul(c, bk));
        }
        rem = trim(rem);
    }
    (trim(quot), rem)
}

pub(crate) fn poly_rem(field: &Gf, a: &[u64], b: &[u64]) -> Poly {
    poly_divrem(field, a, b).1
}

pub(crate) fn poly_monic(field: &Gf, f: &[u64]) -> Poly {
    match f.last() {
        None => Vec::new(),
        Some(&lead) => {
            let inv = field.inv(lead).expect("nonzero leading coefficient");
            f.iter().map(|&c| field.mul(c, inv)).collect()
        }
    }
}

pub(crate) fn poly_gcd(field: &Gf, a: &[u64], b: &[u64]) -> Poly {
    let (mut a, mut b) = (trim(a.to_vec()), trim(b.to_vec()));
    while !b.is_empty() {
        let r = poly_rem(field, &a, &b);
        a = b;
        b = r;
    }
    poly_monic(field, &a)
}

/// Inverse of `a` modulo `m`, when `gcd(a, m) = 1`.
pub(crate) fn poly_inv_mod(field: &Gf, a: &[u64], m: &[u64]) -> Option<Poly> {
    let (mut r0, mut r1) = (trim(m.to_vec()), poly_rem(field, a, m));
    let (mut s0, mut s1): (Poly, Poly) = (Vec::new(), vec![1]);
    while !r1.is_empty() {
        let (q, r) = poly_divrem(field, &r0, &r1);
        let s2 = poly_sub(field, &s0, &poly_mul(field, &q, &s1));
        r0 = std::mem::replace(&mut r1, r);
        s0 = std::mem::replace(&mut s1, s2);
    }
    if r0.len() != 1 {
        return None;
    }
    let c = field.inv(r0[0])?;
    Some(poly_rem(
        field,
        &s0.iter().map(|&x| field.mul(x, c)).collect::<Vec<_>>(),
        m,
    ))
}

fn poly_powmod(field: &Gf, base: &[u64], mut e: u128, m: &[u64]) -> Poly {
    let mut acc: Poly = vec![1];
    let mut b = poly_rem(field, base, m);
    while e > 0 {
        if e & 1 == 1 {
            acc = poly_rem(field, &poly_mul(field, &acc, &b), m);
        }
        b = poly_rem(field, &poly_mul(field, &b, &b), m);
        e >>= 1;
    }
    acc
}

/// Ben-Or test: `f` is irreducible over `field` iff
/// `gcd(f, x^{Q^i} - x) = 1` for `1 <= i <= deg f / 2`, `Q = |field|`.
pub(crate) fn is_irreducible(field: &Gf, f: &[u64]) -> bool {
    let f = trim(f.to_vec());
    if f.len() < 2 {
        return false;
    }
    let deg = f.len() - 1;
    if deg == 1 {
        return true;
    }
    let x: Poly = vec![0, 1];
    let mut h = x.clone();
    for _ in 1..=deg / 2 {
        h = poly_powmod(field, &h, field.size() as u128, &f);
        let g = poly_gcd(field, &f, &poly_sub(field, &h, &x));
        if g.len() != 1 {
            return false;
        }
    }
    true
}
