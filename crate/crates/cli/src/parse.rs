//! Text forms of rings, elements and inner products accepted on the command
//! line and in manifest or job files.

use anyhow::{anyhow, bail, Context, Result};
use constacyclic::twisted::{GaloisForm, TwistedElement, TwistedRing};
use constacyclic::{CoefficientMap, Elem, MapKind, Ring, RingSpec};
use serde::Deserialize;
use serde_json::Value;

/// A ring given either as text (`Z_9`, `F4`, `F_4+uF_4`) or as a tagged
/// JSON object such as `{"family": "Zpm", "p": 3, "m": 2}`.
#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum RingDesc {
    Text(String),
    Spec(RingSpec),
}

impl RingDesc {
    pub fn spec(&self) -> Result<RingSpec> {
        match self {
            RingDesc::Text(s) => ring_spec(s),
            RingDesc::Spec(s) => Ok(s.clone()),
        }
    }

    pub fn ring(&self) -> Result<Ring> {
        Ok(Ring::new(self.spec()?)?)
    }
}

fn prime_power(q: u64) -> Option<(u64, u32)> {
    if q < 2 {
        return None;
    }
    let p = (2..=q).find(|d| q % d == 0)?;
    let mut m = 0;
    let mut r = q;
    while r % p == 0 {
        r /= p;
        m += 1;
    }
    (r == 1).then_some((p, m))
}

fn order_of(s: &str) -> Result<(u64, u32)> {
    let digits = s.trim_start_matches('_').trim_start_matches('{').trim_end_matches('}');
    let q: u64 = digits
        .parse()
        .map_err(|_| anyhow!("expected a prime power, found `{digits}`"))?;
    prime_power(q).ok_or_else(|| anyhow!("{q} is not a prime power"))
}

/// Parses a ring descriptor. Text forms: `Z_{p^m}` (`Z9`, `Z_9`), `F_q`
/// (`F5`, `F_4`), `F_q+uF_q` (`F4+uF4`); a leading `{` is read as JSON.
pub fn ring_spec(text: &str) -> Result<RingSpec> {
    let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    if s.starts_with('{') {
        return serde_json::from_str(&s).with_context(|| format!("bad ring descriptor `{text}`"));
    }
    let bad = || anyhow!("unrecognized ring `{text}`; expected Z_N, F_q, F_q+uF_q or a JSON object");
    if let Some(rest) = s.strip_prefix('Z') {
        let (p, m) = order_of(rest)?;
        return Ok(RingSpec::zpm(p, m));
    }
    let rest = s.strip_prefix('F').ok_or_else(bad)?;
    if let Some((a, b)) = rest.split_once("+u") {
        let b = b.strip_prefix('F').ok_or_else(bad)?;
        let (p, s1) = order_of(a)?;
        if order_of(b)? != (p, s1) {
            return Err(bad());
        }
        return Ok(RingSpec::FqPlusU { p, s: s1, modulus: vec![] });
    }
    let (p, s1) = order_of(rest)?;
    Ok(RingSpec::PrimeFieldExt { p, s: s1, modulus: vec![] })
}

pub fn ring(text: &str) -> Result<Ring> {
    Ok(Ring::new(ring_spec(text)?)?)
}

/// Reads one element: a JSON value in the ring's structured encoding, a
/// packed code, or a (possibly negative) integer.
pub fn element(r: &Ring, text: &str) -> Result<Elem> {
    let v: Value = serde_json::from_str(text.trim())
        .with_context(|| format!("cannot read `{text}` as an element of {}", r.label()))?;
    Ok(r.decode(&v)?)
}

/// Ascending coefficient list, either a JSON array or comma-separated values.
pub fn coefficients(r: &Ring, text: &str) -> Result<Vec<Elem>> {
    let t = text.trim();
    if t.starts_with('[') {
        let vs: Vec<Value> = serde_json::from_str(t).context("bad coefficient array")?;
        return values(r, &vs);
    }
    t.split(',').map(|c| element(r, c)).collect()
}

pub fn values(r: &Ring, vs: &[Value]) -> Result<Vec<Elem>> {
    vs.iter().map(|v| Ok(r.decode(v)?)).collect()
}

pub fn twisted_element(ctx: &TwistedRing, coeffs: Vec<Elem>) -> Result<TwistedElement> {
    if coeffs.len() != ctx.n() {
        bail!("expected {} coefficients, found {}", ctx.n(), coeffs.len());
    }
    Ok(ctx.element(coeffs)?)
}

/// One inner product. Accepted: `euclid`, `hermitian`, `frobenius[:k]`
/// (powers of the Frobenius of an extension field or its `u`-extension) and
/// `semilinear:F:T[:k]` for `a + bu -> a^(p^F) + b^(p^F) T u` on `F_q+uF_q`.
pub fn form(r: &Ring, text: &str) -> Result<GaloisForm> {
    let parts: Vec<&str> = text.trim().split(':').collect();
    let num = |s: &str| -> Result<u64> {
        s.parse().map_err(|_| anyhow!("bad number `{s}` in form `{text}`"))
    };
    let k_at = |i: usize| -> Result<usize> { parts.get(i).map_or(Ok(1), |s| Ok(num(s)? as usize)) };
    match parts[0] {
        "euclid" | "euclidean" if parts.len() == 1 => Ok(GaloisForm::euclidean(r)),
        "hermitian" if parts.len() == 1 => Ok(GaloisForm::hermitian(r)?),
        "frobenius" if parts.len() <= 2 => {
            let map = CoefficientMap::new(r, MapKind::FrobeniusPower(1))?;
            Ok(GaloisForm::new(map, k_at(1)?)?)
        }
        "semilinear" if (3..=4).contains(&parts.len()) => {
            let map = CoefficientMap::fqu_semilinear(r, num(parts[1])? as usize, num(parts[2])?)?;
            Ok(GaloisForm::new(map, k_at(3)?)?)
        }
        _ => bail!("unrecognized form `{text}`"),
    }
}

pub fn forms(r: &Ring, list: &str) -> Result<Vec<GaloisForm>> {
    list.split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| form(r, s))
        .collect()
}
