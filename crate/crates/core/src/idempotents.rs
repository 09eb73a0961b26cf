//! Idempotents of `R^{γ_λ} C_n` when `p` does not divide `n`.
//!
//! `x^n - λ̄` is squarefree over the residue field `F_q`; its irreducible
//! factors are the minimal polynomials of the Frobenius orbits of its roots
//! in a splitting field `F_{q^t}`. Each factor yields a primitive idempotent
//! by CRT, and idempotents lift uniquely through the nilpotent radical.

use std::collections::HashMap;

use crate::chain_ring::Elem;
use crate::error::{Error, Result};
use crate::gf::{self, prime_factors, Gf, Poly};
use crate::twisted::{TwistedElement, TwistedRing};

/// Default cap on the splitting-field degree `t`.
pub const DEFAULT_DEGREE_BOUND: usize = 24;

/// Default cap on the number of irreducible factors (so at most `2^20` idempotents).
pub const DEFAULT_FACTOR_BOUND: usize = 20;

/// Factorization of `x^n - λ̄` over `F_q` through its roots in `F_{q^t}`.
#[derive(Clone, Debug)]
pub struct SplittingData {
    pub base: Gf,
    pub n: usize,
    pub lambda: u64,
    /// Degree `t` of the splitting field over the base field.
    pub extension_degree: usize,
    /// `F_{q^t}` as `F_p[y]/(f)`.
    pub extension: Gf,
    /// The `n` distinct roots, as extension-field codes.
    pub roots: Vec<u64>,
    /// Root indices grouped by `x -> x^q` orbits, aligned with `factors`.
    pub orbits: Vec<Vec<usize>>,
    /// Monic irreducible factors over the base field, ascending coefficients,
    /// sorted by degree and then coefficients.
    pub factors: Vec<Poly>,
}

impl SplittingData {
    /// `x^n - λ̄` over the base field.
    pub fn target(&self) -> Poly {
        let mut f = vec![0u64; self.n + 1];
        f[0] = self.base.neg(self.lambda);
        f[self.n] = 1;
        f
    }

    pub fn product(&self) -> Poly {
        self.factors
            .iter()
            .fold(vec![1], |acc, f| gf::poly_mul(&self.base, &acc, f))
    }
}

fn check_coprime(p: u64, n: usize) -> Result<()> {
    if n as u64 % p == 0 {
        Err(Error::PDividesN { p, n })
    } else {
        Ok(())
    }
}

/// Order of `a` in `field^*`, assuming it divides `group`.
fn order_dividing(field: &Gf, a: u64, group: u64) -> u64 {
    let mut ord = group;
    for r in prime_factors(group) {
        while ord % r == 0 && field.pow(a, (ord / r) as u128) == 1 {
            ord /= r;
        }
    }
    ord
}

/// An element of exact order `order` in `field^*`; `order` must divide `|field| - 1`.
fn element_of_order(field: &Gf, order: u64) -> u64 {
    let cofactor = (field.size() - 1) / order;
    (2..field.size().max(3))
        .map(|z| field.pow(z % field.size(), cofactor as u128))
        .find(|&b| b != 0 && order_dividing(field, b, order) == order)
        .unwrap_or(1)
}

pub fn factor_xn_minus_lambda(base: &Gf, n: usize, lambda: u64) -> Result<SplittingData> {
    factor_xn_minus_lambda_bounded(base, n, lambda, DEFAULT_DEGREE_BOUND)
}

pub fn factor_xn_minus_lambda_bounded(
    base: &Gf,
    n: usize,
    lambda: u64,
    degree_bound: usize,
) -> Result<SplittingData> {
    let p = base.characteristic();
    check_coprime(p, n)?;
    if lambda == 0 || lambda >= base.size() {
        return Err(Error::NotAUnit(lambda.to_string()));
    }
    let q = base.size();
    let ell = base.order(lambda);
    let big_n = n as u128 * ell as u128;

    // minimal t with n * ord(λ̄) | q^t - 1
    let mut t = 0;
    let mut qt: u128 = 1;
    for cand in 1..=degree_bound {
        qt = qt.saturating_mul(q as u128);
        if qt >= 1 << 62 {
            break;
        }
        if (qt - 1) % big_n == 0 {
            t = cand;
            break;
        }
    }
    if t == 0 {
        return Err(Error::DegreeBoundExceeded(degree_bound));
    }

    let s = base.degree();
    let extension = if t == 1 {
        base.clone()
    } else {
        Gf::new(p, &Gf::find_irreducible(p, s * t)?)?
    };

    // embedding F_q -> F_{q^t}
    let embed: Vec<u64> = if t == 1 || s == 1 {
        (0..q).collect()
    } else {
        let h = element_of_order(&extension, q - 1);
        let modulus = base.modulus();
        let eval = |x: u64| {
            modulus
                .iter()
                .rev()
                .fold(0u64, |acc, &c| extension.add(extension.mul(acc, x), c))
        };
        let mut root = None;
        let mut x = 1u64;
        for _ in 0..q - 1 {
            if eval(x) == 0 {
                root = Some(x);
                break;
            }
            x = extension.mul(x, h);
        }
        let root = root.expect("residue modulus splits in the extension");
        (0..q)
            .map(|c| {
                base.digits(c)
                    .iter()
                    .rev()
                    .fold(0u64, |acc, &d| extension.add(extension.mul(acc, root), d))
            })
            .collect()
    };
    let unembed: HashMap<u64, u64> = embed.iter().enumerate().map(|(c, &e)| (e, c as u64)).collect();

    // roots: the coset of the kernel of x -> x^n inside the cyclic group of order n * ell
    let big_n = big_n as u64;
    let beta = element_of_order(&extension, big_n);
    let target = embed[lambda as usize];
    let mut i0 = None;
    let mut acc = 1u64;
    for i in 0..big_n {
        if extension.pow(acc, n as u128) == target {
            i0 = Some(i);
            break;
        }
        acc = extension.mul(acc, beta);
    }
    let i0 = i0.expect("λ̄ has an n-th root in the splitting field");
    let start = extension.pow(beta, i0 as u128);
    let step = extension.pow(beta, ell as u128);
    let mut roots = Vec::with_capacity(n);
    let mut r = start;
    for _ in 0..n {
        roots.push(r);
        r = extension.mul(r, step);
    }

    let index: HashMap<u64, usize> = roots.iter().enumerate().map(|(i, &r)| (r, i)).collect();
    let mut seen = vec![false; n];
    let mut groups: Vec<(Poly, Vec<usize>)> = Vec::new();
    for i in 0..n {
        if seen[i] {
            continue;
        }
        let mut orbit = Vec::new();
        let mut j = i;
        while !seen[j] {
            seen[j] = true;
            orbit.push(j);
            j = index[&extension.pow(roots[j], q as u128)];
        }
        let mut poly: Poly = vec![1];
        for &k in &orbit {
            poly = gf::poly_mul(&extension, &poly, &[extension.neg(roots[k]), 1]);
        }
        let factor: Poly = poly
            .iter()
            .map(|c| *unembed.get(c).expect("orbit polynomial has base-field coefficients"))
            .collect();
        groups.push((factor, orbit));
    }
    groups.sort_by(|a, b| (a.0.len(), &a.0).cmp(&(b.0.len(), &b.0)));
    let (factors, orbits) = groups.into_iter().unzip();

    Ok(SplittingData {
        base: base.clone(),
        n,
        lambda,
        extension_degree: t,
        extension,
        roots,
        orbits,
        factors,
    })
}

/// Primitive idempotents of `F_q^{γ_λ̄} C_n`, one per irreducible factor,
/// in factor order. `ctx` must be over a field.
pub fn primitive_idempotents_field(ctx: &TwistedRing) -> Result<Vec<TwistedElement>> {
    let split = split_context(ctx)?;
    primitive_idempotents_from(ctx, &split)
}

fn split_context(ctx: &TwistedRing) -> Result<SplittingData> {
    let ring = ctx.ring();
    if !ring.is_field() {
        return Err(Error::InvalidSpec(format!(
            "primitive idempotents are built over a field, got {}",
            ring.label()
        )));
    }
    factor_xn_minus_lambda(ring.residue_field(), ctx.n(), ctx.lambda().code())
}

fn primitive_idempotents_from(ctx: &TwistedRing, split: &SplittingData) -> Result<Vec<TwistedElement>> {
    let field = &split.base;
    let target = split.target();
    let n = ctx.n();
    split
        .factors
        .iter()
        .map(|f| {
            let (h, rem) = gf::poly_divrem(field, &target, f);
            debug_assert!(rem.is_empty());
            let h_inv = gf::poly_inv_mod(field, &h, f).expect("factors are coprime");
            let mut e = gf::poly_rem(field, &gf::poly_mul(field, &h, &h_inv), &target);
            e.resize(n, 0);
            let coeffs: Vec<Elem> = e.iter().map(|&c| ctx.ring().elem(c)).collect::<Result<_>>()?;
            ctx.element(coeffs)
        })
        .collect()
}

/// Lifts an idempotent of the residue twisted ring to `target` by Newton
/// iteration `e <- 3e^2 - 2e^3`.
pub fn lift_idempotent(e0: &TwistedElement, target: &TwistedRing) -> Result<TwistedElement> {
    if e0.context() != &target.residue_ring() {
        return Err(Error::ContextMismatch);
    }
    if !e0.is_idempotent() {
        return Err(Error::NotIdempotentInput);
    }
    let ring = target.ring();
    let coeffs = e0
        .coeffs()
        .iter()
        .map(|c| ring.lift_residue(c.code()))
        .collect();
    let mut e = target.element(coeffs)?;
    let three = ring.from_int(3);
    let minus_two = ring.from_int(-2);
    let t = ring.nilpotency_index();
    let max_steps = (32 - (t - 1).leading_zeros()) as usize + 1;
    for _ in 0..=max_steps {
        let e2 = e.mul_unchecked(&e);
        if e2 == e {
            return Ok(e);
        }
        let e3 = e2.mul_unchecked(&e);
        e = e2.scale(three).add(&e3.scale(minus_two))?;
    }
    Err(Error::NotIdempotentInput)
}

/// The primitive idempotents of `R^{γ_λ} C_n` and the factorization they come from.
#[derive(Clone, Debug)]
pub struct IdempotentSystem {
    pub splitting: SplittingData,
    /// Lifted primitive idempotents, aligned with `splitting.factors`.
    pub primitives: Vec<TwistedElement>,
    context: TwistedRing,
}

impl IdempotentSystem {
    pub fn new(ctx: &TwistedRing) -> Result<Self> {
        Self::bounded(ctx, DEFAULT_FACTOR_BOUND)
    }

    pub fn bounded(ctx: &TwistedRing, factor_bound: usize) -> Result<Self> {
        check_coprime(ctx.ring().characteristic_prime(), ctx.n())?;
        let residue = ctx.residue_ring();
        let split = split_context(&residue)?;
        if split.factors.len() > factor_bound {
            return Err(Error::TooManyFactors {
                factors: split.factors.len(),
                bound: factor_bound,
            });
        }
        let primitives = primitive_idempotents_from(&residue, &split)?
            .iter()
            .map(|e0| lift_idempotent(e0, ctx))
            .collect::<Result<_>>()?;
        Ok(Self {
            splitting: split,
            primitives,
            context: ctx.clone(),
        })
    }

    pub fn len(&self) -> usize {
        1 << self.primitives.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// `sum_{i in mask} e_i`.
    pub fn subset_sum(&self, mask: u64) -> TwistedElement {
        self.primitives
            .iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .fold(self.context.zero(), |acc, (_, e)| acc.add(e).expect("same context"))
    }

    /// Every idempotent, indexed by subset mask.
    pub fn all(&self) -> Vec<TwistedElement> {
        (0..self.len() as u64).map(|m| self.subset_sum(m)).collect()
    }
}

/// All `2^s` idempotents of `R^{γ_λ} C_n`, in subset-mask order.
pub fn all_idempotents(ctx: &TwistedRing) -> Result<Vec<TwistedElement>> {
    Ok(IdempotentSystem::new(ctx)?.all())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain_ring::{Ring, RingSpec};

    fn field_ctx(p: u64, n: usize, lambda: i64) -> TwistedRing {
        let r = Ring::new(RingSpec::prime_field(p)).unwrap();
        let l = r.from_int(lambda);
        TwistedRing::new(&r, n, l).unwrap()
    }

    #[test]
    fn x3_minus_1_over_f2() {
        let f2 = Gf::prime(2).unwrap();
        let s = factor_xn_minus_lambda(&f2, 3, 1).unwrap();
        assert_eq!(s.factors, vec![vec![1, 1], vec![1, 1, 1]]);
        assert_eq!(s.extension_degree, 2);
        assert_eq!(s.product(), s.target());
    }

    #[test]
    fn x21_minus_4_over_f5() {
        let f5 = Gf::prime(5).unwrap();
        let s = factor_xn_minus_lambda(&f5, 21, 4).unwrap();
        assert_eq!(s.factors.iter().map(|f| f.len() - 1).sum::<usize>(), 21);
        assert_eq!(s.product(), s.target());
        for (orbit, f) in s.orbits.iter().zip(&s.factors) {
            assert_eq!(orbit.len(), f.len() - 1);
        }
    }

    #[test]
    fn p_dividing_n_is_rejected() {
        let f3 = Gf::prime(3).unwrap();
        assert_eq!(
            factor_xn_minus_lambda(&f3, 3, 1).unwrap_err(),
            Error::PDividesN { p: 3, n: 3 }
        );
    }

    #[test]
    fn f2_primitive_idempotents() {
        let ctx = field_ctx(2, 3, 1);
        let prims = primitive_idempotents_field(&ctx).unwrap();
        assert_eq!(prims, vec![ctx.from_ints(&[1, 1, 1]).unwrap(), ctx.from_ints(&[0, 1, 1]).unwrap()]);
    }

    #[test]
    fn irreducible_target_gives_one() {
        // x^2 - 2 is irreducible over F_5
        let ctx = field_ctx(5, 2, 2);
        assert_eq!(primitive_idempotents_field(&ctx).unwrap(), vec![ctx.one()]);
    }

    #[test]
    fn lift_to_z4() {
        let z4 = Ring::new(RingSpec::zpm(2, 2)).unwrap();
        let ctx = TwistedRing::new(&z4, 3, z4.one()).unwrap();
        let res = ctx.residue_ring();
        let e0 = res.from_ints(&[0, 1, 1]).unwrap();
        assert_eq!(lift_idempotent(&e0, &ctx).unwrap(), ctx.from_ints(&[2, 1, 1]).unwrap());
        assert_eq!(lift_idempotent(&res.zero(), &ctx).unwrap(), ctx.zero());
        assert_eq!(lift_idempotent(&res.one(), &ctx).unwrap(), ctx.one());
        let not_idem = res.from_ints(&[0, 1, 0]).unwrap();
        assert_eq!(lift_idempotent(&not_idem, &ctx), Err(Error::NotIdempotentInput));
    }

    #[test]
    fn n_equals_one_gives_trivial_idempotents() {
        let z9 = Ring::new(RingSpec::zpm(3, 2)).unwrap();
        let ctx = TwistedRing::new(&z9, 1, z9.one()).unwrap();
        assert_eq!(all_idempotents(&ctx).unwrap(), vec![ctx.zero(), ctx.one()]);
    }

    #[test]
    fn too_many_factors() {
        let f5 = Ring::new(RingSpec::prime_field(5)).unwrap();
        let ctx = TwistedRing::new(&f5, 4, f5.one()).unwrap();
        assert_eq!(
            IdempotentSystem::bounded(&ctx, 3).unwrap_err(),
            Error::TooManyFactors { factors: 4, bound: 3 }
        );
    }
}
