//! Worked examples and brute-force oracles shared by the integration tests.
#![allow(dead_code)]

use std::collections::HashSet;

use constacyclic::twisted::{GaloisForm, TwistedElement, TwistedRing};
use constacyclic::{CoefficientMap, Elem, Ring, RingSpec};

pub fn ring(spec: RingSpec) -> Ring {
    Ring::new(spec).unwrap()
}

pub fn zpm(p: u64, m: u32) -> Ring {
    ring(RingSpec::zpm(p, m))
}

pub fn fp(p: u64) -> Ring {
    ring(RingSpec::prime_field(p))
}

pub fn ctx(r: &Ring, n: usize, lambda: i64) -> TwistedRing {
    TwistedRing::new(r, n, r.from_int(lambda)).unwrap()
}

/// Coefficients listed from `g^{n-1}` down to `g^0`.
pub fn desc(t: &TwistedRing, c: &[i64]) -> TwistedElement {
    let asc: Vec<i64> = c.iter().rev().copied().collect();
    t.from_ints(&asc).unwrap()
}

/// `{power: coefficient}` pairs.
pub fn sparse(t: &TwistedRing, terms: &[(usize, i64)]) -> TwistedElement {
    let mut c = vec![0i64; t.n()];
    for &(i, v) in terms {
        c[i] = v;
    }
    t.from_ints(&c).unwrap()
}

pub struct Example {
    pub ctx: TwistedRing,
    pub e: TwistedElement,
}

/// Z_9, n = 11, λ = 8.
pub fn z9_c11() -> Example {
    let t = ctx(&zpm(3, 2), 11, 8);
    let e = desc(&t, &[4, 5, 4, 5, 4, 5, 4, 5, 4, 5, 5]);
    Example { ctx: t, e }
}

pub const Z9_E3_DESC: [i64; 11] = [1, 8, 1, 8, 1, 8, 1, 8, 1, 8, 8];
pub const Z9_E3_STAR_PRINTED_DESC: [i64; 11] = [8, 1, 8, 1, 8, 1, 8, 1, 8, 1, 8];

/// Z_4, n = 19, λ = 3.
pub fn z4_c19() -> Example {
    let t = ctx(&zpm(2, 2), 19, 3);
    let mut asc = vec![2i64];
    for _ in 0..9 {
        asc.extend([3, 1]);
    }
    let e = t.from_ints(&asc).unwrap();
    Example { ctx: t, e }
}

/// Z_8, n = 3, λ = 3.
pub fn z8_c3() -> Example {
    let t = ctx(&zpm(2, 3), 3, 3);
    let e = desc(&t, &[3, 1, 3]);
    Example { ctx: t, e }
}

/// F_5, n = 21, λ = 4.
pub fn f5_c21() -> Example {
    let t = ctx(&fp(5), 21, 4);
    let e = sparse(
        &t,
        &[
            (20, 1), (18, 4), (17, 4), (16, 1), (15, 1), (14, 2), (12, 4), (9, 1),
            (7, 3), (6, 4), (5, 4), (4, 1), (3, 1), (1, 4), (0, 1),
        ],
    );
    Example { ctx: t, e }
}

/// F_3, n = 10, λ = 2; `e` and the complementary `f`.
pub fn f3_c10() -> (Example, TwistedElement) {
    let t = ctx(&fp(3), 10, 2);
    let e = sparse(&t, &[(8, 1), (6, 2), (4, 1), (2, 2), (0, 2)]);
    let f = sparse(&t, &[(8, 2), (6, 1), (4, 2), (2, 1), (0, 2)]);
    (Example { ctx: t, e }, f)
}

/// Z_16, n = 33, λ = 7.
pub fn z16_c33() -> Example {
    let t = ctx(&zpm(2, 4), 33, 7);
    let e = desc(
        &t,
        &[
            9, 15, 2, 15, 8, 14, 8, 15, 2, 8, 11, 14, 8, 8, 2, 15, 9, 14, 8, 8, 2, 13, 8, 14, 9, 8,
            2, 8, 9, 14, 9, 15, 13,
        ],
    );
    Example { ctx: t, e }
}

pub const Z16_REDUCED_SUPPORT: [usize; 13] = [32, 31, 29, 25, 22, 17, 16, 11, 8, 4, 2, 1, 0];

/// F_4 + uF_4 with ω² = ω + 1, n = 5, λ = 1 + ωu.
pub fn fqu_c5() -> (Example, GaloisForm) {
    let r = ring(RingSpec::fq_plus_u(2, &[1, 1, 1]));
    let lambda = r.decode(&serde_json::json!([[1, 0], [0, 1]])).unwrap();
    let t = TwistedRing::new(&r, 5, lambda).unwrap();
    let one = r.one();
    let e = t.element(vec![one, lambda, one, lambda, one]).unwrap();
    // σ(a + bu) = a² + b²(ω + 1)u
    let sigma = CoefficientMap::fqu_semilinear(&r, 1, 3).unwrap();
    let form = GaloisForm::new(sigma, 1).unwrap();
    (Example { ctx: t, e }, form)
}

/// Every idempotent found by scanning all `|R|^n` elements.
pub fn idempotent_scan(t: &TwistedRing) -> HashSet<Vec<Elem>> {
    t.enumerate()
        .filter(|x| x.mul(x).unwrap() == *x)
        .map(|x| x.coeffs().to_vec())
        .collect()
}

/// A small additive generating set of `R`.
fn additive_generators(r: &Ring) -> Vec<Elem> {
    let mut gens = Vec::new();
    let mut span: HashSet<Elem> = HashSet::from([r.zero()]);
    for x in r.elements() {
        if span.contains(&x) {
            continue;
        }
        gens.push(x);
        let mut frontier: Vec<Elem> = span.iter().copied().collect();
        while let Some(y) = frontier.pop() {
            for &g in &gens {
                let z = r.add(y, g);
                if span.insert(z) {
                    frontier.push(z);
                }
            }
        }
    }
    gens
}

fn rows_of(e: &TwistedElement) -> Vec<Vec<Elem>> {
    let g = e.context().monomial(1, e.ring().one());
    let mut rows = Vec::new();
    let mut cur = e.clone();
    for _ in 0..e.n() {
        rows.push(cur.coeffs().to_vec());
        cur = cur.mul(&g).unwrap();
    }
    rows
}

pub fn pack(r: &Ring, x: &[Elem]) -> u64 {
    x.iter().rev().fold(0, |acc, v| acc * r.size() + v.code())
}

pub fn unpack(r: &Ring, n: usize, mut code: u64) -> Vec<Elem> {
    (0..n)
        .map(|_| {
            let v = r.elem(code % r.size()).unwrap();
            code /= r.size();
            v
        })
        .collect()
}

/// The R-span of the rows `g^i e` (computed with plain multiplication by
/// `g`), grown by additive closure; words are packed base `|R|`.
pub fn span_of_ideal(e: &TwistedElement) -> Vec<u64> {
    let r = e.ring();
    let n = e.n();
    let scalars = additive_generators(r);
    let mut gens: Vec<Vec<Elem>> = Vec::new();
    for row in rows_of(e) {
        for &s in &scalars {
            let g: Vec<Elem> = row.iter().map(|&x| r.mul(s, x)).collect();
            if g.iter().any(|x| !x.is_zero()) {
                gens.push(g);
            }
        }
    }
    let mut seen: HashSet<u64> = HashSet::from([0]);
    let mut out = vec![0u64];
    let mut i = 0;
    while i < out.len() {
        let v = unpack(r, n, out[i]);
        for g in &gens {
            let w: Vec<Elem> = v.iter().zip(g).map(|(&a, &b)| r.add(a, b)).collect();
            let code = pack(r, &w);
            if seen.insert(code) {
                out.push(code);
            }
        }
        i += 1;
    }
    out
}

/// `sum a_i σ^k(b_i)`, computed directly from the map.
pub fn form_value(f: &GaloisForm, a: &[Elem], b: &[Elem]) -> Elem {
    let r = f.map().ring();
    a.iter()
        .zip(b)
        .fold(r.zero(), |acc, (&x, &y)| r.add(acc, r.mul(x, f.apply(y))))
}

/// `C ∩ C^{⊥k} = {0}` by scanning codewords. The form is R-linear in its
/// first argument, so orthogonality to the rows `g^i e` is orthogonality
/// to `C` for any coefficient map.
pub fn brute_lcd(e: &TwistedElement, f: &GaloisForm) -> bool {
    let r = e.ring();
    let n = e.n();
    let rows = rows_of(e);
    !span_of_ideal(e).iter().any(|&w| {
        let x = unpack(r, n, w);
        w != 0 && rows.iter().all(|c| form_value(f, c, &x).is_zero())
    })
}

/// Minimum nonzero weight over an explicit word list.
pub fn brute_distance(r: &Ring, n: usize, words: &[u64]) -> usize {
    words
        .iter()
        .map(|&w| unpack(r, n, w).iter().filter(|x| !x.is_zero()).count())
        .filter(|&w| w > 0)
        .min()
        .unwrap_or(usize::MAX)
}
