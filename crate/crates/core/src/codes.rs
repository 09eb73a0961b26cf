//! Constacyclic codes as ideals `<e>` of `R^{γ_λ} C_n` with `e^2 = e`.
//!
//! A codeword is identified with its ascending coefficient vector. Since the
//! ring is commutative and `e` idempotent, `x` lies in `<e>` exactly when
//! `x e = x`, and `x e = sum_j x_j (g^j e)` is a combination of the rows of
//! the circulant generator matrix.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::chain_ring::{Elem, Ring};
use crate::error::{Error, Result};
use crate::idempotents::IdempotentSystem;
use crate::linalg::{echelonize, kernel, RingMatrix};
use crate::twisted::{GaloisForm, TwistedElement, TwistedRing};

/// Hard cap on `|C|` for full enumeration.
pub const FULL_ENUMERATION_LIMIT: u64 = 1 << 24;

/// Cap on `|C|` below which the automatic strategy enumerates.
pub const AUTO_ENUMERATION_LIMIT: u64 = 1 << 20;

pub const DEFAULT_WEIGHT_CEILING: usize = 4;

#[derive(Clone, Debug)]
pub struct ConstacyclicCode {
    generator: TwistedElement,
    matrix: RingMatrix,
    basis: Vec<Vec<Elem>>,
    rank: usize,
    free: bool,
}

/// `<e>` for an idempotent `e`.
pub fn code_from_idempotent(e: &TwistedElement) -> Result<ConstacyclicCode> {
    if !e.is_idempotent() {
        return Err(Error::NotIdempotent);
    }
    let n = e.n();
    let mut rows = Vec::with_capacity(n);
    let mut cur = e.clone();
    for _ in 0..n {
        rows.push(cur.coeffs().to_vec());
        cur = cur.gshift();
    }
    let matrix = RingMatrix::from_rows(e.ring(), &rows, n)?;
    let ech = echelonize(&matrix);
    if !ech.free {
        return Err(Error::InvalidSpec("idempotent generates a non-free ideal".into()));
    }
    Ok(ConstacyclicCode {
        generator: e.clone(),
        basis: ech.basis(),
        rank: ech.rank,
        free: ech.free,
        matrix,
    })
}

impl ConstacyclicCode {
    pub fn context(&self) -> &TwistedRing {
        self.generator.context()
    }

    pub fn ring(&self) -> &Ring {
        self.generator.ring()
    }

    pub fn n(&self) -> usize {
        self.generator.n()
    }

    pub fn generator(&self) -> &TwistedElement {
        &self.generator
    }

    /// Rows `g^i e`, `i = 0..n`.
    pub fn generator_matrix(&self) -> &RingMatrix {
        &self.matrix
    }

    /// A free basis of the code (echelon rows with unit pivots).
    pub fn basis(&self) -> &[Vec<Elem>] {
        &self.basis
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn is_free(&self) -> bool {
        self.free
    }

    pub fn is_zero(&self) -> bool {
        self.rank == 0
    }

    /// `|C| = |R|^rank`, if it fits in a `u64`.
    pub fn size(&self) -> Option<u64> {
        self.ring().size().checked_pow(self.rank as u32)
    }

    pub fn contains(&self, x: &[Elem]) -> bool {
        x.len() == self.n() && self.matrix.combine_rows(x).map(|y| y == x).unwrap_or(false)
    }

    /// `<1 - e>`.
    pub fn complement(&self) -> ConstacyclicCode {
        code_from_idempotent(&self.generator.complement()).expect("1 - e is idempotent")
    }

    /// Every codeword, in basis-coefficient order.
    pub fn codewords(&self, limit: u64) -> Result<Vec<Vec<Elem>>> {
        let size = self.size().filter(|&s| s <= limit).ok_or(Error::RingTooLarge {
            size: self.size().unwrap_or(u64::MAX),
            bound: limit,
        })?;
        let ring = self.ring();
        let q = ring.size();
        Ok((0..size)
            .map(|mut idx| {
                let mut x = vec![ring.zero(); self.n()];
                for b in &self.basis {
                    let a = ring.elem(idx % q).unwrap();
                    idx /= q;
                    for (xi, &bi) in x.iter_mut().zip(b) {
                        *xi = ring.add(*xi, ring.mul(a, bi));
                    }
                }
                x
            })
            .collect())
    }
}

/// The residue code `<ϑ(e)>` over `R / J(R)`.
pub fn reduce_code(c: &ConstacyclicCode) -> ConstacyclicCode {
    if c.ring().is_field() {
        return c.clone();
    }
    code_from_idempotent(&c.generator.reduce()).expect("ϑ preserves idempotents")
}

/// How an LCD decision was reached.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LcdRoute {
    /// `λ m^k(λ) = 1`: the idempotent criterion `e = e (m^k e)*`.
    Criterion,
    /// `λ m^k(λ) - 1` is a unit: every constacyclic code is LCD.
    UnitTwist,
    /// Gram matrix `B m^k(B)^T` of a basis is invertible.
    Gram,
}

#[derive(Clone, Debug)]
pub struct LcdDecision {
    pub lcd: bool,
    pub route: LcdRoute,
    /// `e - e (m^k e)*` on the criterion route.
    pub residual: Option<TwistedElement>,
}

fn check_form(c: &ConstacyclicCode, form: &GaloisForm) -> Result<()> {
    if form.map().ring() == c.ring() {
        Ok(())
    } else {
        Err(Error::MapSpecMismatch(format!(
            "form over {} applied to a code over {}",
            form.map().ring().label(),
            c.ring().label()
        )))
    }
}

/// `e (m^k e)*`.
fn criterion_product(c: &ConstacyclicCode, form: &GaloisForm) -> Result<TwistedElement> {
    let e = &c.generator;
    e.mul(&e.map_coeffs(form)?.star()?)
}

pub fn is_lcd(c: &ConstacyclicCode, form: &GaloisForm) -> Result<LcdDecision> {
    check_form(c, form)?;
    let ring = c.ring();
    let lam = c.context().lambda();
    let twist = ring.sub(ring.mul(lam, form.apply(lam)), ring.one());
    if twist.is_zero() {
        let prod = criterion_product(c, form)?;
        let residual = c.generator.sub(&prod)?;
        return Ok(LcdDecision {
            lcd: residual.is_zero(),
            route: LcdRoute::Criterion,
            residual: Some(residual),
        });
    }
    if ring.is_unit(twist) {
        return Ok(LcdDecision {
            lcd: true,
            route: LcdRoute::UnitTwist,
            residual: None,
        });
    }
    if !form.map().is_additive() {
        return Err(Error::CriterionInapplicable(
            "λ m^k(λ) - 1 is a nonzero non-unit and the map is not additive".into(),
        ));
    }
    Ok(LcdDecision {
        lcd: is_lcd_gram(c, form)?,
        route: LcdRoute::Gram,
        residual: None,
    })
}

/// `C ∩ C^{⊥k} = 0` decided by invertibility of `B m^k(B)^T`; needs an additive map.
pub fn is_lcd_gram(c: &ConstacyclicCode, form: &GaloisForm) -> Result<bool> {
    check_form(c, form)?;
    if !form.map().is_additive() {
        return Err(Error::NonAdditiveMap);
    }
    let ring = c.ring();
    let k = c.rank;
    let mut data = Vec::with_capacity(k * k);
    for bi in &c.basis {
        for bj in &c.basis {
            data.push(
                bi.iter()
                    .zip(bj)
                    .fold(ring.zero(), |acc, (&x, &y)| ring.add(acc, ring.mul(x, form.apply(y)))),
            );
        }
    }
    let gram = RingMatrix::new(ring, k, k, data)?;
    Ok(echelonize(&gram).rank == k)
}

/// `C ⊆ C^{⊥k}` via `e (m^k e)* = 0`.
pub fn is_self_orthogonal(c: &ConstacyclicCode, form: &GaloisForm) -> Result<bool> {
    check_form(c, form)?;
    Ok(criterion_product(c, form)?.is_zero())
}

/// `C^{⊥k}` as a code in the `m^{-k}(λ^{-1})` context.
pub fn dual(c: &ConstacyclicCode, form: &GaloisForm) -> Result<ConstacyclicCode> {
    check_form(c, form)?;
    let map = form.map();
    if !map.is_additive() {
        return Err(Error::NonAdditiveMap);
    }
    let ring = c.ring();
    let n = c.n();
    let k = form.k();
    let unmap = |x: Elem| map.apply_inverse_k(x, k).ok_or(Error::NonAdditiveMap);
    let lam_inv = ring.inverse(c.context().lambda())?;
    let ctx = TwistedRing::new(ring, n, unmap(lam_inv)?)?;

    let gens: Vec<Vec<Elem>> = kernel(&c.matrix)
        .into_iter()
        .map(|g| g.into_iter().map(unmap).collect::<Result<Vec<_>>>())
        .collect::<Result<_>>()?;

    let orthogonal = |y: &TwistedElement| {
        c.matrix.row_vecs().iter().all(|row| {
            row.iter()
                .zip(y.coeffs())
                .fold(ring.zero(), |acc, (&a, &b)| ring.add(acc, ring.mul(a, form.apply(b))))
                .is_zero()
        })
    };
    let e = if c.is_zero() {
        ctx.one()
    } else if c.rank == n {
        ctx.zero()
    } else {
        let sys = IdempotentSystem::new(&ctx)?;
        sys.primitives
            .iter()
            .filter(|f| orthogonal(f))
            .fold(ctx.zero(), |acc, f| acc.add(f).expect("same context"))
    };
    let d = code_from_idempotent(&e)?;
    if d.rank + c.rank != n || !gens.iter().all(|g| d.contains(g)) {
        return Err(Error::InvalidSpec("dual does not match the kernel of the generator matrix".into()));
    }
    Ok(d)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    Auto,
    FullEnumeration,
    BoundedWeight,
    /// `d(C) = d(ϑ(C))` for free codes.
    Reduction,
}

#[derive(Clone, Copy, Debug)]
pub struct DistanceOptions {
    pub strategy: Strategy,
    pub weight_ceiling: usize,
    pub enumeration_limit: u64,
}

impl Default for DistanceOptions {
    fn default() -> Self {
        Self {
            strategy: Strategy::Auto,
            weight_ceiling: DEFAULT_WEIGHT_CEILING,
            enumeration_limit: FULL_ENUMERATION_LIMIT,
        }
    }
}

impl DistanceOptions {
    pub fn with_strategy(strategy: Strategy) -> Self {
        Self {
            strategy,
            ..Self::default()
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DistanceMethod {
    ZeroCode,
    FullEnumeration,
    BoundedWeight,
    Reduction,
}

#[derive(Clone, Debug)]
pub struct MinDistance {
    /// Minimum nonzero weight; `n + 1` for the zero code.
    pub d: usize,
    pub witness: Option<Vec<Elem>>,
    pub method: DistanceMethod,
    /// Whether all nonzero codewords share one weight; full enumeration only.
    pub constant_weight: Option<bool>,
    /// Size of the candidate space examined by bounded-weight search.
    pub candidates: Option<u128>,
}

pub fn min_distance(c: &ConstacyclicCode, opts: &DistanceOptions) -> Result<MinDistance> {
    if c.is_zero() {
        return Ok(MinDistance {
            d: c.n() + 1,
            witness: None,
            method: DistanceMethod::ZeroCode,
            constant_weight: None,
            candidates: None,
        });
    }
    let size = c.size();
    match opts.strategy {
        Strategy::FullEnumeration => match size {
            Some(s) if s <= opts.enumeration_limit.min(FULL_ENUMERATION_LIMIT) => Ok(enumerate(c)),
            _ => Err(Error::RingTooLarge {
                size: size.unwrap_or(u64::MAX),
                bound: opts.enumeration_limit.min(FULL_ENUMERATION_LIMIT),
            }),
        },
        Strategy::BoundedWeight => bounded_weight(c, opts.weight_ceiling),
        Strategy::Reduction => reduction(c, opts),
        Strategy::Auto => {
            let limit = opts.enumeration_limit.min(FULL_ENUMERATION_LIMIT);
            if size.is_some_and(|s| s <= limit.min(AUTO_ENUMERATION_LIMIT)) {
                return Ok(enumerate(c));
            }
            if !c.ring().is_field() && c.free {
                return reduction(c, opts);
            }
            match bounded_weight(c, opts.weight_ceiling) {
                Err(Error::SearchCeilingExceeded { .. }) if size.is_some_and(|s| s <= limit) => {
                    Ok(enumerate(c))
                }
                other => other,
            }
        }
    }
}

fn reduction(c: &ConstacyclicCode, opts: &DistanceOptions) -> Result<MinDistance> {
    let ring = c.ring();
    if ring.is_field() {
        return min_distance(c, &DistanceOptions { strategy: Strategy::Auto, ..*opts });
    }
    if !c.free {
        return Err(Error::CriterionInapplicable("reduction needs a free code".into()));
    }
    let reduced = reduce_code(c);
    let inner = min_distance(&reduced, &DistanceOptions { strategy: Strategy::Auto, ..*opts })?;
    let scale = ring.uniformizer_pow(ring.nilpotency_index() - 1);
    let witness = inner.witness.map(|w| {
        w.iter()
            .map(|&x| ring.mul(scale, ring.lift_residue(x.code())))
            .collect()
    });
    Ok(MinDistance {
        d: inner.d,
        witness,
        method: DistanceMethod::Reduction,
        constant_weight: None,
        candidates: None,
    })
}

struct Tally {
    min: usize,
    max: usize,
    witness: Option<Vec<Elem>>,
}

fn weight(x: &[Elem]) -> usize {
    x.iter().filter(|v| !v.is_zero()).count()
}

/// Walks all `a * B` with `a` in `R^k`, updating the word incrementally.
fn enumerate(c: &ConstacyclicCode) -> MinDistance {
    let ring = c.ring();
    let elems: Vec<Elem> = ring.elements().collect();
    let q = elems.len();
    let n = c.n();
    let k = c.rank;
    // steps[j][b][d]: added to the word when digit b moves from elems[j] to elems[j+1],
    // or back to elems[0] from the last element (j = q - 1).
    let steps: Vec<Vec<Vec<Elem>>> = (0..q)
        .map(|j| {
            let delta = ring.sub(elems[(j + 1) % q], elems[j]);
            c.basis
                .iter()
                .map(|b| b.iter().map(|&x| ring.mul(delta, x)).collect())
                .collect()
        })
        .collect();

    // split the top digits across tasks
    let mut top = 0;
    let mut tasks = 1usize;
    while top < k && tasks < 256 {
        top += 1;
        tasks *= q;
    }
    let low = k - top;
    let results: Vec<Tally> = (0..tasks)
        .into_par_iter()
        .map(|t| {
            let mut word = vec![ring.zero(); n];
            let mut idx = t;
            for b in low..k {
                let a = elems[idx % q];
                idx /= q;
                for (w, &x) in word.iter_mut().zip(&c.basis[b]) {
                    *w = ring.add(*w, ring.mul(a, x));
                }
            }
            let mut tally = Tally {
                min: usize::MAX,
                max: 0,
                witness: None,
            };
            let mut digits = vec![0usize; low];
            loop {
                let w = weight(&word);
                if w > 0 {
                    if w < tally.min {
                        tally.min = w;
                        tally.witness = Some(word.clone());
                    }
                    tally.max = tally.max.max(w);
                }
                let mut b = 0;
                loop {
                    if b == low {
                        return tally;
                    }
                    let j = digits[b];
                    for (w, &s) in word.iter_mut().zip(&steps[j][b]) {
                        *w = ring.add(*w, s);
                    }
                    digits[b] = (j + 1) % q;
                    if digits[b] != 0 {
                        break;
                    }
                    b += 1;
                }
            }
        })
        .collect();

    let mut best = Tally {
        min: usize::MAX,
        max: 0,
        witness: None,
    };
    for t in results {
        if t.min < best.min {
            best.min = t.min;
            best.witness = t.witness;
        }
        best.max = best.max.max(t.max);
    }
    MinDistance {
        d: best.min,
        witness: best.witness,
        method: DistanceMethod::FullEnumeration,
        constant_weight: Some(best.min == best.max),
        candidates: None,
    }
}

fn combinations(n: usize, w: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..w).collect();
    if w > n {
        return out;
    }
    loop {
        out.push(cur.clone());
        let mut i = w;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if cur[i] < n - w + i {
                break;
            }
            if i == 0 {
                return out;
            }
        }
        cur[i] += 1;
        for j in i + 1..w {
            cur[j] = cur[j - 1] + 1;
        }
    }
}

fn binomial(n: usize, w: usize) -> u128 {
    (0..w).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

/// Searches weights `1..=ceiling` over every support. The first nonzero
/// coordinate ranges over `pi^v` (a unit multiple of a codeword is a
/// codeword of the same support); the others over all nonzero values.
fn bounded_weight(c: &ConstacyclicCode, ceiling: usize) -> Result<MinDistance> {
    let ring = c.ring();
    let n = c.n();
    let t = ring.nilpotency_index();
    let leads: Vec<Elem> = (0..t).map(|v| ring.uniformizer_pow(v)).collect();
    let nonzero: Vec<Elem> = ring.elements().filter(|x| !x.is_zero()).collect();
    let rows = c.matrix.row_vecs();
    let mut candidates = 0u128;
    for w in 1..=ceiling.min(n) {
        candidates += binomial(n, w) * t as u128 * (nonzero.len() as u128).pow(w as u32 - 1);
        let found = combinations(n, w).into_par_iter().find_map_first(|support| {
            let mut pick = vec![0usize; w];
            loop {
                // x e restricted to the support equals x, and vanishes elsewhere
                let mut image = vec![ring.zero(); n];
                let coeff = |i: usize, p: &[usize]| if i == 0 { leads[p[0]] } else { nonzero[p[i]] };
                for (i, &s) in support.iter().enumerate() {
                    let a = coeff(i, &pick);
                    for (o, &r) in image.iter_mut().zip(&rows[s]) {
                        *o = ring.add(*o, ring.mul(a, r));
                    }
                }
                let mut word = vec![ring.zero(); n];
                for (i, &s) in support.iter().enumerate() {
                    word[s] = coeff(i, &pick);
                }
                if image == word {
                    return Some(word);
                }
                let mut i = 0;
                loop {
                    if i == w {
                        return None;
                    }
                    let radix = if i == 0 { leads.len() } else { nonzero.len() };
                    pick[i] += 1;
                    if pick[i] < radix {
                        break;
                    }
                    pick[i] = 0;
                    i += 1;
                }
            }
        });
        if let Some(word) = found {
            return Ok(MinDistance {
                d: w,
                witness: Some(word),
                method: DistanceMethod::BoundedWeight,
                constant_weight: None,
                candidates: Some(candidates),
            });
        }
    }
    let upper = c.basis.iter().map(|b| weight(b)).min().unwrap_or(n + 1);
    Err(Error::SearchCeilingExceeded {
        ceiling,
        floor: ceiling + 1,
        upper: upper.min(n - c.rank + 1),
    })
}

/// Stable summary of a classified code.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CodeReport {
    pub ring: String,
    pub n: usize,
    pub lambda: Value,
    /// Ascending coefficients of the generating idempotent.
    pub e: Vec<Value>,
    pub k_rank: usize,
    pub d: usize,
    pub d_method: DistanceMethod,
    pub free: bool,
    /// Per form label; `null` when the decision does not apply.
    pub lcd: BTreeMap<String, Option<bool>>,
    pub self_orth: BTreeMap<String, Option<bool>>,
    pub mdr: bool,
    pub mds: bool,
    pub constant_weight: Option<bool>,
}

pub fn classify(c: &ConstacyclicCode, forms: &[GaloisForm], opts: &DistanceOptions) -> Result<CodeReport> {
    let dist = min_distance(c, opts)?;
    let n = c.n();
    let k = c.rank;
    let mdr = !c.is_zero() && dist.d == n - k + 1;
    let ring = c.ring();
    let mut lcd = BTreeMap::new();
    let mut self_orth = BTreeMap::new();
    for f in forms {
        lcd.insert(f.label(), is_lcd(c, f).ok().map(|d| d.lcd));
        self_orth.insert(f.label(), is_self_orthogonal(c, f).ok());
    }
    Ok(CodeReport {
        ring: ring.label(),
        n,
        lambda: ring.encode(c.context().lambda()),
        e: c.generator.coeffs().iter().map(|&x| ring.encode(x)).collect(),
        k_rank: k,
        d: dist.d,
        d_method: dist.method,
        free: c.free,
        lcd,
        self_orth,
        mdr,
        mds: mdr && c.free,
        constant_weight: if c.is_zero() { None } else { dist.constant_weight },
    })
}
