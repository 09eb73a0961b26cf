//! Exact arithmetic in the supported finite commutative chain rings:
//! `Z_{p^m}`, `F_{p^s}` and `F_{p^s} + u F_{p^s}` with `u^2 = 0`.
//!
//! Elements are canonical integer codes ([`Elem`]) interpreted by a shared
//! [`Ring`] handle, so equality of elements is equality of codes.
//!
//! * `Z_{p^m}`: the residue in `[0, p^m)`.
//! * `F_{p^s}`: base-`p` digits are the coefficients over `F_p`.
//! * `F_q + uF_q`: `a + q*b` for the element `a + b*u`, `a`, `b` field codes.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::gf::Gf;

/// Default cap on `|R|` for unit enumeration.
pub const DEFAULT_ENUMERATION_BOUND: u64 = 1 << 16;

/// Rings up to this size get precomputed operation tables.
const TABLE_LIMIT: u64 = 256;

/// Rings up to this size have their coefficient maps checked exhaustively.
const MAP_CHECK_LIMIT: u64 = 1 << 10;

/// Presentation of a supported chain ring.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "family")]
pub enum RingSpec {
    /// `Z_{p^m}`.
    #[serde(rename = "Zpm")]
    IntegersModPM { p: u64, m: u32 },
    /// `F_p[y]/(modulus)`, a field with `p^s` elements.
    #[serde(rename = "PrimeFieldExt", alias = "Fq")]
    PrimeFieldExt {
        p: u64,
        s: u32,
        #[serde(default)]
        modulus: Vec<u64>,
    },
    /// `F_{p^s}[u]/(u^2)`.
    #[serde(rename = "FqPlusU")]
    FqPlusU {
        p: u64,
        s: u32,
        #[serde(default)]
        modulus: Vec<u64>,
    },
}

impl RingSpec {
    pub fn zpm(p: u64, m: u32) -> Self {
        RingSpec::IntegersModPM { p, m }
    }

    pub fn prime_field(p: u64) -> Self {
        RingSpec::PrimeFieldExt {
            p,
            s: 1,
            modulus: vec![0, 1],
        }
    }

    pub fn field(p: u64, modulus: &[u64]) -> Self {
        RingSpec::PrimeFieldExt {
            p,
            s: modulus.len().saturating_sub(1) as u32,
            modulus: modulus.to_vec(),
        }
    }

    pub fn fq_plus_u(p: u64, modulus: &[u64]) -> Self {
        RingSpec::FqPlusU {
            p,
            s: modulus.len().saturating_sub(1) as u32,
            modulus: modulus.to_vec(),
        }
    }

    pub fn characteristic_prime(&self) -> u64 {
        match *self {
            RingSpec::IntegersModPM { p, .. }
            | RingSpec::PrimeFieldExt { p, .. }
            | RingSpec::FqPlusU { p, .. } => p,
        }
    }

    /// Short human label, e.g. `Z_9`, `F_4`, `F_4+uF_4`.
    pub fn label(&self) -> String {
        match *self {
            RingSpec::IntegersModPM { p, m } => format!("Z_{}", p.pow(m)),
            RingSpec::PrimeFieldExt { p, s, .. } => format!("F_{}", p.pow(s)),
            RingSpec::FqPlusU { p, s, .. } => {
                let q = p.pow(s);
                format!("F_{q}+uF_{q}")
            }
        }
    }
}

/// Canonical code of a ring element. Only meaningful together with its [`Ring`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Elem(u32);

impl Elem {
    pub const ZERO: Elem = Elem(0);
    pub const ONE: Elem = Elem(1);

    pub fn code(self) -> u64 {
        self.0 as u64
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

struct Tables {
    add: Vec<u8>,
    mul: Vec<u8>,
    neg: Vec<u8>,
}

struct Inner {
    spec: RingSpec,
    residue: Gf,
    size: u64,
    /// `|R/J(R)|`
    q: u64,
    tables: Option<Tables>,
}

/// Shared, immutable handle to a chain ring.
#[derive(Clone)]
pub struct Ring {
    inner: Arc<Inner>,
}

impl fmt::Debug for Ring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Ring({})", self.inner.spec.label())
    }
}

impl PartialEq for Ring {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.inner, &other.inner) || self.inner.spec == other.inner.spec
    }
}

impl Eq for Ring {}

impl Ring {
    pub fn new(spec: RingSpec) -> Result<Self> {
        let spec = normalize(spec)?;
        let (residue, size) = match &spec {
            RingSpec::IntegersModPM { p, m } => {
                if *m == 0 {
                    return Err(Error::InvalidSpec("exponent m must be >= 1".into()));
                }
                let residue = Gf::prime(*p)?;
                let size = p
                    .checked_pow(*m)
                    .filter(|&s| s <= u32::MAX as u64)
                    .ok_or_else(|| Error::InvalidSpec("ring too large".into()))?;
                (residue, size)
            }
            RingSpec::PrimeFieldExt { p, modulus, .. } => {
                let residue = Gf::new(*p, modulus)?;
                let size = residue.size();
                (residue, size)
            }
            RingSpec::FqPlusU { p, modulus, .. } => {
                let residue = Gf::new(*p, modulus)?;
                let size = residue.size().checked_mul(residue.size());
                (residue, size.unwrap_or(u64::MAX))
            }
        };
        if size > u32::MAX as u64 {
            return Err(Error::InvalidSpec("ring too large".into()));
        }
        let q = residue.size();
        let mut inner = Inner {
            spec,
            residue,
            size,
            q,
            tables: None,
        };
        if size <= TABLE_LIMIT {
            inner.tables = Some(build_tables(&inner));
        }
        Ok(Ring {
            inner: Arc::new(inner),
        })
    }

    pub fn spec(&self) -> &RingSpec {
        &self.inner.spec
    }

    pub fn label(&self) -> String {
        self.inner.spec.label()
    }

    pub fn size(&self) -> u64 {
        self.inner.size
    }

    pub fn characteristic_prime(&self) -> u64 {
        self.inner.spec.characteristic_prime()
    }

    /// The residue field `R/J(R)`.
    pub fn residue_field(&self) -> &Gf {
        &self.inner.residue
    }

    /// The residue field as a ring in its own right.
    pub fn residue_ring(&self) -> Ring {
        match &self.inner.spec {
            RingSpec::PrimeFieldExt { .. } => self.clone(),
            _ => {
                let gf = &self.inner.residue;
                Ring::new(RingSpec::field(gf.characteristic(), gf.modulus()))
                    .expect("residue field presentation is valid")
            }
        }
    }

    /// Nilpotency index `t` of `J(R)`.
    pub fn nilpotency_index(&self) -> u32 {
        match self.inner.spec {
            RingSpec::IntegersModPM { m, .. } => m,
            RingSpec::PrimeFieldExt { .. } => 1,
            RingSpec::FqPlusU { .. } => 2,
        }
    }

    pub fn is_field(&self) -> bool {
        self.nilpotency_index() == 1
    }

    pub fn zero(&self) -> Elem {
        Elem(0)
    }

    pub fn one(&self) -> Elem {
        Elem(1)
    }

    pub fn elem(&self, code: u64) -> Result<Elem> {
        if code < self.inner.size {
            Ok(Elem(code as u32))
        } else {
            Err(Error::Parse(format!(
                "code {code} out of range for {}",
                self.label()
            )))
        }
    }

    /// Image of an integer under `Z -> R`.
    pub fn from_int(&self, v: i64) -> Elem {
        match self.inner.spec {
            RingSpec::IntegersModPM { .. } => Elem(v.rem_euclid(self.inner.size as i64) as u32),
            _ => Elem(self.inner.residue.from_int(v) as u32),
        }
    }

    pub fn elements(&self) -> impl Iterator<Item = Elem> {
        (0..self.inner.size as u32).map(Elem)
    }

    pub fn add(&self, a: Elem, b: Elem) -> Elem {
        if let Some(t) = &self.inner.tables {
            return Elem(t.add[self.idx(a, b)] as u32);
        }
        self.add_slow(a, b)
    }

    pub fn mul(&self, a: Elem, b: Elem) -> Elem {
        if let Some(t) = &self.inner.tables {
            return Elem(t.mul[self.idx(a, b)] as u32);
        }
        self.mul_slow(a, b)
    }

    pub fn neg(&self, a: Elem) -> Elem {
        if let Some(t) = &self.inner.tables {
            return Elem(t.neg[a.0 as usize] as u32);
        }
        self.neg_slow(a)
    }

    pub fn sub(&self, a: Elem, b: Elem) -> Elem {
        self.add(a, self.neg(b))
    }

    pub fn pow(&self, a: Elem, mut e: u128) -> Elem {
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

    pub fn is_unit(&self, a: Elem) -> bool {
        self.residue(a) != 0
    }

    pub fn inverse(&self, a: Elem) -> Result<Elem> {
        if !self.is_unit(a) {
            return Err(Error::NotAUnit(self.render(a)));
        }
        let gf = &self.inner.residue;
        Ok(match self.inner.spec {
            RingSpec::IntegersModPM { .. } => {
                Elem(inverse_mod(a.0 as u64, self.inner.size) as u32)
            }
            RingSpec::PrimeFieldExt { .. } => Elem(gf.inv(a.0 as u64).unwrap() as u32),
            RingSpec::FqPlusU { .. } => {
                // (a + bu)^{-1} = a^{-1} - b a^{-2} u
                let (x, y) = self.split_u(a);
                let xi = gf.inv(x).unwrap();
                let yi = gf.neg(gf.mul(y, gf.mul(xi, xi)));
                self.join_u(xi, yi)
            }
        })
    }

    /// Projection `R -> R/J(R)`, as a code in [`Ring::residue_field`].
    pub fn residue(&self, a: Elem) -> u64 {
        match self.inner.spec {
            RingSpec::IntegersModPM { p, .. } => a.0 as u64 % p,
            RingSpec::PrimeFieldExt { .. } => a.0 as u64,
            RingSpec::FqPlusU { .. } => a.0 as u64 % self.inner.q,
        }
    }

    /// Canonical section of the residue map: integer representative, or
    /// zero `u`-part.
    pub fn lift_residue(&self, c: u64) -> Elem {
        Elem((c % self.inner.q) as u32)
    }

    /// Largest `v` with `a` in `J^v`, `None` for zero.
    pub fn valuation(&self, a: Elem) -> Option<u32> {
        self.split_valuation(a).map(|(v, _)| v)
    }

    /// Writes a nonzero `a` as `pi^v * unit`.
    pub fn split_valuation(&self, a: Elem) -> Option<(u32, Elem)> {
        if a.is_zero() {
            return None;
        }
        Some(match self.inner.spec {
            RingSpec::IntegersModPM { p, .. } => {
                let (mut x, mut v) = (a.0 as u64, 0);
                while x % p == 0 {
                    x /= p;
                    v += 1;
                }
                (v, Elem(x as u32))
            }
            RingSpec::PrimeFieldExt { .. } => (0, a),
            RingSpec::FqPlusU { .. } => {
                let (x, y) = self.split_u(a);
                if x != 0 {
                    (0, a)
                } else {
                    (1, Elem(y as u32))
                }
            }
        })
    }

    /// `pi^v` for the radical generator `pi` (`p`, none, `u`).
    pub fn uniformizer_pow(&self, v: u32) -> Elem {
        if v == 0 {
            return self.one();
        }
        match self.inner.spec {
            RingSpec::IntegersModPM { p, m } => {
                if v >= m {
                    self.zero()
                } else {
                    Elem(p.pow(v) as u32)
                }
            }
            RingSpec::PrimeFieldExt { .. } => self.zero(),
            RingSpec::FqPlusU { .. } => {
                if v == 1 {
                    self.join_u(0, 1)
                } else {
                    self.zero()
                }
            }
        }
    }

    /// Some `c` with `a * c = b`, if one exists.
    pub fn divide(&self, b: Elem, a: Elem) -> Option<Elem> {
        let Some((w, ub)) = self.split_valuation(b) else {
            return Some(self.zero());
        };
        let (v, ua) = self.split_valuation(a)?;
        if w < v {
            return None;
        }
        let ua_inv = self.inverse(ua).expect("unit part is a unit");
        Some(self.mul(self.uniformizer_pow(w - v), self.mul(ub, ua_inv)))
    }

    /// The units of the ring, in code order.
    pub fn units(&self) -> Result<Vec<Elem>> {
        self.units_bounded(DEFAULT_ENUMERATION_BOUND)
    }

    pub fn units_bounded(&self, bound: u64) -> Result<Vec<Elem>> {
        if self.inner.size > bound {
            return Err(Error::RingTooLarge {
                size: self.inner.size,
                bound,
            });
        }
        Ok(self.elements().filter(|&x| self.is_unit(x)).collect())
    }

    /// Canonical structured encoding: an integer for `Z_{p^m}` and prime
    /// fields, a coefficient array for `F_{p^s}` with `s > 1`, and a pair of
    /// coefficient arrays for `a + b*u`.
    pub fn encode(&self, a: Elem) -> Value {
        let gf = &self.inner.residue;
        match self.inner.spec {
            RingSpec::IntegersModPM { .. } => Value::from(a.0),
            RingSpec::PrimeFieldExt { s, .. } => {
                if s == 1 {
                    Value::from(a.0)
                } else {
                    Value::from(gf.digits(a.0 as u64))
                }
            }
            RingSpec::FqPlusU { .. } => {
                let (x, y) = self.split_u(a);
                Value::from(vec![gf.digits(x), gf.digits(y)])
            }
        }
    }

    /// Inverse of [`Ring::encode`]. A bare integer is also accepted as a
    /// packed code for every family.
    pub fn decode(&self, v: &Value) -> Result<Elem> {
        let gf = &self.inner.residue;
        let bad = || Error::Parse(format!("cannot read {v} as an element of {}", self.label()));
        if let Some(code) = v.as_u64() {
            return self.elem(code);
        }
        if let Some(i) = v.as_i64() {
            return Ok(self.from_int(i));
        }
        let digits_of = |v: &Value| -> Result<u64> {
            let arr = v.as_array().ok_or_else(bad)?;
            if arr.len() != gf.degree() {
                return Err(bad());
            }
            let ds: Option<Vec<u64>> = arr
                .iter()
                .map(|d| d.as_u64().filter(|&d| d < gf.characteristic()))
                .collect();
            Ok(gf.from_digits(&ds.ok_or_else(bad)?))
        };
        match self.inner.spec {
            RingSpec::IntegersModPM { .. } => Err(bad()),
            RingSpec::PrimeFieldExt { .. } => Ok(Elem(digits_of(v)? as u32)),
            RingSpec::FqPlusU { .. } => {
                let pair = v.as_array().filter(|a| a.len() == 2).ok_or_else(bad)?;
                let x = digits_of(&pair[0])?;
                let y = digits_of(&pair[1])?;
                Ok(self.join_u(x, y))
            }
        }
    }

    /// Text rendering: decimal for `Z_{p^m}` and prime fields, a polynomial
    /// in `w` for extension fields, and `a+b*u` for the `u`-family.
    pub fn render(&self, a: Elem) -> String {
        match self.inner.spec {
            RingSpec::IntegersModPM { .. } => a.0.to_string(),
            RingSpec::PrimeFieldExt { .. } => self.render_field(a.0 as u64),
            RingSpec::FqPlusU { .. } => {
                let (x, y) = self.split_u(a);
                let upart = match y {
                    0 => None,
                    1 => Some("u".to_string()),
                    _ => {
                        let b = self.render_field(y);
                        if b.contains('+') {
                            Some(format!("({b})*u"))
                        } else {
                            Some(format!("{b}*u"))
                        }
                    }
                };
                match (x, upart) {
                    (0, None) => "0".into(),
                    (0, Some(u)) => u,
                    (_, None) => self.render_field(x),
                    (_, Some(u)) => format!("{}+{u}", self.render_field(x)),
                }
            }
        }
    }

    fn render_field(&self, c: u64) -> String {
        let gf = &self.inner.residue;
        if gf.degree() == 1 {
            return c.to_string();
        }
        let terms: Vec<String> = gf
            .digits(c)
            .iter()
            .enumerate()
            .rev()
            .filter(|(_, &d)| d != 0)
            .map(|(i, &d)| {
                let coef = if d == 1 && i > 0 { String::new() } else { d.to_string() };
                match i {
                    0 => coef,
                    1 => format!("{coef}w"),
                    _ => format!("{coef}w^{i}"),
                }
            })
            .collect();
        if terms.is_empty() {
            "0".into()
        } else {
            terms.join("+")
        }
    }

    fn split_u(&self, a: Elem) -> (u64, u64) {
        let c = a.0 as u64;
        (c % self.inner.q, c / self.inner.q)
    }

    fn join_u(&self, x: u64, y: u64) -> Elem {
        Elem((x + self.inner.q * y) as u32)
    }

    fn idx(&self, a: Elem, b: Elem) -> usize {
        a.0 as usize * self.inner.size as usize + b.0 as usize
    }

    fn add_slow(&self, a: Elem, b: Elem) -> Elem {
        add_raw(&self.inner, a, b)
    }

    fn mul_slow(&self, a: Elem, b: Elem) -> Elem {
        mul_raw(&self.inner, a, b)
    }

    fn neg_slow(&self, a: Elem) -> Elem {
        neg_raw(&self.inner, a)
    }
}

fn normalize(spec: RingSpec) -> Result<RingSpec> {
    let fix = |p: u64, s: u32, modulus: Vec<u64>| -> Result<Vec<u64>> {
        if s == 0 {
            return Err(Error::InvalidSpec("degree s must be >= 1".into()));
        }
        Gf::prime(p)?;
        if modulus.is_empty() {
            return Gf::find_irreducible(p, s as usize);
        }
        if modulus.len() != s as usize + 1 {
            return Err(Error::InvalidSpec(format!(
                "modulus {modulus:?} does not have degree {s}"
            )));
        }
        Ok(modulus)
    };
    Ok(match spec {
        RingSpec::IntegersModPM { p, m } => {
            Gf::prime(p)?;
            RingSpec::IntegersModPM { p, m }
        }
        RingSpec::PrimeFieldExt { p, s, modulus } => RingSpec::PrimeFieldExt {
            p,
            s,
            modulus: fix(p, s, modulus)?,
        },
        RingSpec::FqPlusU { p, s, modulus } => RingSpec::FqPlusU {
            p,
            s,
            modulus: fix(p, s, modulus)?,
        },
    })
}

fn split_raw(inner: &Inner, a: Elem) -> (u64, u64) {
    (a.0 as u64 % inner.q, a.0 as u64 / inner.q)
}

fn add_raw(inner: &Inner, a: Elem, b: Elem) -> Elem {
    let gf = &inner.residue;
    match inner.spec {
        RingSpec::IntegersModPM { .. } => Elem(((a.0 as u64 + b.0 as u64) % inner.size) as u32),
        RingSpec::PrimeFieldExt { .. } => Elem(gf.add(a.0 as u64, b.0 as u64) as u32),
        RingSpec::FqPlusU { .. } => {
            let ((x, y), (z, w)) = (split_raw(inner, a), split_raw(inner, b));
            Elem((gf.add(x, z) + inner.q * gf.add(y, w)) as u32)
        }
    }
}

fn mul_raw(inner: &Inner, a: Elem, b: Elem) -> Elem {
    let gf = &inner.residue;
    match inner.spec {
        RingSpec::IntegersModPM { .. } => Elem(((a.0 as u64 * b.0 as u64) % inner.size) as u32),
        RingSpec::PrimeFieldExt { .. } => Elem(gf.mul(a.0 as u64, b.0 as u64) as u32),
        RingSpec::FqPlusU { .. } => {
            let ((x, y), (z, w)) = (split_raw(inner, a), split_raw(inner, b));
            let lo = gf.mul(x, z);
            let hi = gf.add(gf.mul(x, w), gf.mul(y, z));
            Elem((lo + inner.q * hi) as u32)
        }
    }
}

fn neg_raw(inner: &Inner, a: Elem) -> Elem {
    let gf = &inner.residue;
    match inner.spec {
        RingSpec::IntegersModPM { .. } => Elem(((inner.size - a.0 as u64) % inner.size) as u32),
        RingSpec::PrimeFieldExt { .. } => Elem(gf.neg(a.0 as u64) as u32),
        RingSpec::FqPlusU { .. } => {
            let (x, y) = split_raw(inner, a);
            Elem((gf.neg(x) + inner.q * gf.neg(y)) as u32)
        }
    }
}

fn build_tables(inner: &Inner) -> Tables {
    let n = inner.size as u32;
    let mut add = Vec::with_capacity((n * n) as usize);
    let mut mul = Vec::with_capacity((n * n) as usize);
    for a in 0..n {
        for b in 0..n {
            add.push(add_raw(inner, Elem(a), Elem(b)).0 as u8);
            mul.push(mul_raw(inner, Elem(a), Elem(b)).0 as u8);
        }
    }
    let neg = (0..n).map(|a| neg_raw(inner, Elem(a)).0 as u8).collect();
    Tables { add, mul, neg }
}

fn inverse_mod(a: u64, m: u64) -> u64 {
    let (mut r0, mut r1) = (m as i128, a as i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    t0.rem_euclid(m as i128) as u64
}

/// An element together with its ring; arithmetic checks that both operands
/// share a presentation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RingElement {
    ring: Ring,
    value: Elem,
}

impl RingElement {
    pub fn new(ring: &Ring, value: Elem) -> Self {
        Self {
            ring: ring.clone(),
            value,
        }
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn value(&self) -> Elem {
        self.value
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.ring == other.ring {
            Ok(())
        } else {
            Err(Error::SpecMismatch)
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(Self::new(&self.ring, self.ring.add(self.value, other.value)))
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(Self::new(&self.ring, self.ring.mul(self.value, other.value)))
    }

    pub fn neg(&self) -> Self {
        Self::new(&self.ring, self.ring.neg(self.value))
    }

    pub fn inverse(&self) -> Result<Self> {
        Ok(Self::new(&self.ring, self.ring.inverse(self.value)?))
    }
}

impl fmt::Display for RingElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.ring.render(self.value))
    }
}

/// The shape of a coefficient map.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MapKind {
    Identity,
    /// `x -> x^{p^k}` applied to field coefficients.
    FrobeniusPower(usize),
    /// `x -> x^{p^{m/2}}` on `Z_{p^m}` with `m` even. Multiplicative only.
    HermitianPower,
    /// Arbitrary unit-preserving multiplicative map given by its images in code order.
    Table(Vec<Elem>),
}

/// A multiplicative map `R -> R` fixing `1`, validated against a ring.
#[derive(Clone, Debug)]
pub struct CoefficientMap {
    ring: Ring,
    kind: MapKind,
    additive: bool,
    order: Option<usize>,
}

impl CoefficientMap {
    pub fn identity(ring: &Ring) -> Self {
        Self {
            ring: ring.clone(),
            kind: MapKind::Identity,
            additive: true,
            order: Some(1),
        }
    }

    pub fn new(ring: &Ring, kind: MapKind) -> Result<Self> {
        let mismatch = |why: &str| Error::MapSpecMismatch(format!("{why} on {}", ring.label()));
        match (&kind, ring.spec()) {
            (MapKind::Identity, _) => return Ok(Self::identity(ring)),
            (MapKind::FrobeniusPower(_), RingSpec::IntegersModPM { m, .. }) if *m > 1 => {
                return Err(mismatch("x -> x^p is not a ring map"))
            }
            (MapKind::HermitianPower, RingSpec::IntegersModPM { m, .. }) if m % 2 == 0 => {}
            (MapKind::HermitianPower, _) => {
                return Err(mismatch("the Hermitian power map needs Z_{p^{2m}}"))
            }
            (MapKind::Table(t), _) if t.len() as u64 != ring.size() => {
                return Err(mismatch("table length differs from ring size"))
            }
            (MapKind::Table(t), _) if t.iter().any(|x| x.code() >= ring.size()) => {
                return Err(mismatch("table entry out of range"))
            }
            _ => {}
        }
        let mut map = Self {
            ring: ring.clone(),
            kind,
            additive: false,
            order: None,
        };
        if ring.size() <= MAP_CHECK_LIMIT {
            let elems: Vec<Elem> = ring.elements().collect();
            if map.apply(ring.one()) != ring.one() {
                return Err(mismatch("map does not fix 1"));
            }
            let mut additive = true;
            for &x in &elems {
                let fx = map.apply(x);
                for &y in &elems {
                    let fy = map.apply(y);
                    if map.apply(ring.mul(x, y)) != ring.mul(fx, fy) {
                        return Err(mismatch("map is not multiplicative"));
                    }
                    if additive && map.apply(ring.add(x, y)) != ring.add(fx, fy) {
                        additive = false;
                    }
                }
            }
            if !additive && map.kind != MapKind::HermitianPower {
                return Err(mismatch("map is not additive"));
            }
            map.additive = additive;
            map.order = order_by_iteration(&map, &elems);
        } else {
            map.additive = map.kind != MapKind::HermitianPower;
            map.order = match (&map.kind, ring.spec()) {
                (MapKind::FrobeniusPower(k), RingSpec::PrimeFieldExt { s, .. })
                | (MapKind::FrobeniusPower(k), RingSpec::FqPlusU { s, .. }) => {
                    let s = *s as usize;
                    Some(s / gcd(s, k % s).max(1))
                }
                (MapKind::FrobeniusPower(_), _) => Some(1),
                _ => None,
            };
        }
        Ok(map)
    }

    /// `a + b*u -> phi(a) + phi(b)*twist*u` on `F_q + uF_q`, `phi` the
    /// `frobenius`-th power of `x -> x^p`, `twist` a nonzero residue-field code.
    pub fn fqu_semilinear(ring: &Ring, frobenius: usize, twist: u64) -> Result<Self> {
        let RingSpec::FqPlusU { .. } = ring.spec() else {
            return Err(Error::MapSpecMismatch(format!(
                "semilinear maps need F_q+uF_q, got {}",
                ring.label()
            )));
        };
        let gf = ring.residue_field();
        if twist == 0 || twist >= gf.size() {
            return Err(Error::MapSpecMismatch("twist must be a nonzero field element".into()));
        }
        let table = ring
            .elements()
            .map(|x| {
                let (a, b) = ring.split_u(x);
                let fa = gf.frobenius(a, frobenius);
                let fb = gf.mul(gf.frobenius(b, frobenius), twist);
                ring.join_u(fa, fb)
            })
            .collect();
        Self::new(ring, MapKind::Table(table))
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn kind(&self) -> &MapKind {
        &self.kind
    }

    pub fn is_additive(&self) -> bool {
        self.additive
    }

    /// Smallest `k >= 1` with `map^k = id`, when it exists.
    pub fn order(&self) -> Option<usize> {
        self.order
    }

    pub fn apply(&self, x: Elem) -> Elem {
        let ring = &self.ring;
        match &self.kind {
            MapKind::Identity => x,
            MapKind::FrobeniusPower(k) => match ring.spec() {
                RingSpec::IntegersModPM { .. } => x,
                RingSpec::PrimeFieldExt { .. } => {
                    Elem(ring.residue_field().frobenius(x.code(), *k) as u32)
                }
                RingSpec::FqPlusU { .. } => {
                    let gf = ring.residue_field();
                    let (a, b) = ring.split_u(x);
                    ring.join_u(gf.frobenius(a, *k), gf.frobenius(b, *k))
                }
            },
            MapKind::HermitianPower => {
                let RingSpec::IntegersModPM { p, m } = *ring.spec() else {
                    unreachable!("validated at construction")
                };
                ring.pow(x, p.pow(m / 2) as u128)
            }
            MapKind::Table(t) => t[x.0 as usize],
        }
    }

    /// The map applied `k` times.
    pub fn apply_k(&self, x: Elem, k: usize) -> Elem {
        let k = match self.order {
            Some(ord) => k % ord,
            None => k,
        };
        (0..k).fold(x, |acc, _| self.apply(acc))
    }

    /// `map^{-k}`, defined when the order is known.
    pub fn apply_inverse_k(&self, x: Elem, k: usize) -> Option<Elem> {
        let ord = self.order?;
        Some(self.apply_k(x, ord - k % ord))
    }
}

impl PartialEq for CoefficientMap {
    fn eq(&self, other: &Self) -> bool {
        self.ring == other.ring && self.kind == other.kind
    }
}

fn order_by_iteration(map: &CoefficientMap, elems: &[Elem]) -> Option<usize> {
    let mut current: Vec<Elem> = elems.iter().map(|&x| map.apply(x)).collect();
    for k in 1..=64 {
        if current.iter().zip(elems).all(|(a, b)| a == b) {
            return Some(k);
        }
        current = current.iter().map(|&x| map.apply(x)).collect();
    }
    None
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}
