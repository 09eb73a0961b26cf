//! The twisted group ring `R^{γ_λ} C_n`.
//!
//! Elements are written in the basis `1, g, ..., g^{n-1}` with `g^n = λ`,
//! so multiplication is negacyclic-style convolution where wrapped terms
//! pick up a factor `λ`. Arbitrary normalized 2-cocycles on `C_n` reduce to
//! this form through [`CocycleTable::standardize`].

use std::fmt;
use std::sync::Arc;

use serde_json::{json, Value};

use crate::chain_ring::{CoefficientMap, Elem, MapKind, Ring};
use crate::error::{Error, Result};

#[derive(Debug, PartialEq, Eq)]
struct Context {
    ring: Ring,
    n: usize,
    lambda: Elem,
}

/// Handle to `R^{γ_λ} C_n`; cheap to clone.
#[derive(Clone, Debug)]
pub struct TwistedRing {
    ctx: Arc<Context>,
}

impl PartialEq for TwistedRing {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.ctx, &other.ctx) || self.ctx == other.ctx
    }
}

impl Eq for TwistedRing {}

impl TwistedRing {
    pub fn new(ring: &Ring, n: usize, lambda: Elem) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidSpec("group order n must be >= 1".into()));
        }
        ring.elem(lambda.code())?;
        if !ring.is_unit(lambda) {
            return Err(Error::NotAUnit(ring.render(lambda)));
        }
        Ok(Self {
            ctx: Arc::new(Context {
                ring: ring.clone(),
                n,
                lambda,
            }),
        })
    }

    pub fn ring(&self) -> &Ring {
        &self.ctx.ring
    }

    pub fn n(&self) -> usize {
        self.ctx.n
    }

    pub fn lambda(&self) -> Elem {
        self.ctx.lambda
    }

    /// Whether `λ^2 = 1`, the condition for the classical involution.
    pub fn lambda_involutive(&self) -> bool {
        let r = self.ring();
        r.mul(self.lambda(), self.lambda()) == r.one()
    }

    pub fn element(&self, coeffs: Vec<Elem>) -> Result<TwistedElement> {
        if coeffs.len() != self.n() {
            return Err(Error::DimensionMismatch {
                expected: self.n(),
                got: coeffs.len(),
            });
        }
        for &c in &coeffs {
            self.ring().elem(c.code())?;
        }
        Ok(TwistedElement {
            ctx: self.clone(),
            coeffs,
        })
    }

    /// Element from integer coefficients, ascending (index `i` is the
    /// coefficient of `g^i`).
    pub fn from_ints(&self, coeffs: &[i64]) -> Result<TwistedElement> {
        self.element(coeffs.iter().map(|&c| self.ring().from_int(c)).collect())
    }

    pub fn zero(&self) -> TwistedElement {
        TwistedElement {
            ctx: self.clone(),
            coeffs: vec![self.ring().zero(); self.n()],
        }
    }

    pub fn one(&self) -> TwistedElement {
        self.monomial(0, self.ring().one())
    }

    /// `c * g^i` for `0 <= i < n`.
    pub fn monomial(&self, i: usize, c: Elem) -> TwistedElement {
        let mut z = self.zero();
        z.coeffs[i % self.n()] = c;
        z
    }

    /// Every element; only sensible for tiny contexts.
    pub fn enumerate(&self) -> impl Iterator<Item = TwistedElement> + '_ {
        let size = self.ring().size();
        let total = size.checked_pow(self.n() as u32).unwrap_or(u64::MAX);
        (0..total).map(move |mut idx| {
            let coeffs = (0..self.n())
                .map(|_| {
                    let c = idx % size;
                    idx /= size;
                    self.ring().elem(c).unwrap()
                })
                .collect();
            TwistedElement {
                ctx: self.clone(),
                coeffs,
            }
        })
    }

    /// The same group order over the residue field, with `λ` reduced.
    pub fn residue_ring(&self) -> TwistedRing {
        let res = self.ring().residue_ring();
        let lam = res.elem(self.ring().residue(self.lambda())).unwrap();
        TwistedRing::new(&res, self.n(), lam).expect("reduced wrap unit is nonzero")
    }

    /// Parses `{n, lambda, coeffs}` in this context.
    pub fn decode(&self, v: &Value) -> Result<TwistedElement> {
        let bad = |what: &str| Error::Parse(format!("twisted element: {what}"));
        let coeffs = v
            .get("coeffs")
            .and_then(Value::as_array)
            .ok_or_else(|| bad("missing coeffs"))?;
        if let Some(n) = v.get("n").and_then(Value::as_u64) {
            if n as usize != self.n() {
                return Err(Error::ContextMismatch);
            }
        }
        if let Some(l) = v.get("lambda") {
            if self.ring().decode(l)? != self.lambda() {
                return Err(Error::ContextMismatch);
            }
        }
        let coeffs = coeffs
            .iter()
            .map(|c| self.ring().decode(c))
            .collect::<Result<Vec<_>>>()?;
        self.element(coeffs)
    }
}

/// An element `sum a_i g^i` of `R^{γ_λ} C_n`.
#[derive(Clone, PartialEq, Eq)]
pub struct TwistedElement {
    ctx: TwistedRing,
    coeffs: Vec<Elem>,
}

impl fmt::Debug for TwistedElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} in {}^{{λ={}}}C_{}", self, self.ring().label(), self.ring().render(self.ctx.lambda()), self.ctx.n())
    }
}

impl fmt::Display for TwistedElement {
    /// Descending powers, e.g. `3*g^2 + g + 3`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ring = self.ring();
        let terms: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .rev()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, &c)| {
                let mut coef = ring.render(c);
                if coef.contains('+') {
                    coef = format!("({coef})");
                }
                match (i, c == ring.one()) {
                    (0, _) => coef,
                    (1, true) => "g".into(),
                    (1, false) => format!("{coef}*g"),
                    (_, true) => format!("g^{i}"),
                    (_, false) => format!("{coef}*g^{i}"),
                }
            })
            .collect();
        if terms.is_empty() {
            f.write_str("0")
        } else {
            f.write_str(&terms.join(" + "))
        }
    }
}

impl TwistedElement {
    pub fn context(&self) -> &TwistedRing {
        &self.ctx
    }

    pub fn ring(&self) -> &Ring {
        self.ctx.ring()
    }

    pub fn n(&self) -> usize {
        self.ctx.n()
    }

    /// Ascending coefficients.
    pub fn coeffs(&self) -> &[Elem] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    /// Hamming weight of the coefficient vector.
    pub fn weight(&self) -> usize {
        self.coeffs.iter().filter(|c| !c.is_zero()).count()
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.ctx == other.ctx {
            Ok(())
        } else {
            Err(Error::ContextMismatch)
        }
    }

    fn with_coeffs(&self, coeffs: Vec<Elem>) -> Self {
        Self {
            ctx: self.ctx.clone(),
            coeffs,
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let r = self.ring();
        Ok(self.with_coeffs(
            self.coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(&a, &b)| r.add(a, b))
                .collect(),
        ))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let r = self.ring();
        Ok(self.with_coeffs(
            self.coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(&a, &b)| r.sub(a, b))
                .collect(),
        ))
    }

    pub fn neg(&self) -> Self {
        let r = self.ring();
        self.with_coeffs(self.coeffs.iter().map(|&a| r.neg(a)).collect())
    }

    pub fn scale(&self, c: Elem) -> Self {
        let r = self.ring();
        self.with_coeffs(self.coeffs.iter().map(|&a| r.mul(c, a)).collect())
    }

    /// `1 - self`.
    pub fn complement(&self) -> Self {
        self.ctx
            .one()
            .sub(self)
            .expect("same context")
    }

    /// Product in `R^{γ_λ} C_n`: `a_i b_j` lands on `g^{(i+j) mod n}`,
    /// times `λ` when `i + j >= n`.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(self.mul_unchecked(other))
    }

    pub(crate) fn mul_unchecked(&self, other: &Self) -> Self {
        let r = self.ring();
        let n = self.n();
        let lam = self.ctx.lambda();
        let mut low = vec![r.zero(); n];
        let mut wrap = vec![r.zero(); n];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                let t = r.mul(a, b);
                if i + j < n {
                    low[i + j] = r.add(low[i + j], t);
                } else {
                    wrap[i + j - n] = r.add(wrap[i + j - n], t);
                }
            }
        }
        let coeffs = low
            .into_iter()
            .zip(wrap)
            .map(|(l, w)| r.add(l, r.mul(lam, w)))
            .collect();
        self.with_coeffs(coeffs)
    }

    pub fn is_idempotent(&self) -> bool {
        &self.mul_unchecked(self) == self
    }

    /// `g * self`: rotate right, wrapped coefficient times `λ`.
    pub fn gshift(&self) -> Self {
        let r = self.ring();
        let n = self.n();
        let mut out = Vec::with_capacity(n);
        out.push(r.mul(self.ctx.lambda(), self.coeffs[n - 1]));
        out.extend_from_slice(&self.coeffs[..n - 1]);
        self.with_coeffs(out)
    }

    /// The classical involution `g^i -> g^{-i} = λ g^{n-i}`; needs `λ^2 = 1`.
    pub fn star(&self) -> Result<Self> {
        if !self.ctx.lambda_involutive() {
            return Err(Error::LambdaNotInvolutive);
        }
        let r = self.ring();
        let n = self.n();
        let lam = self.ctx.lambda();
        let mut out = vec![r.zero(); n];
        out[0] = self.coeffs[0];
        for i in 1..n {
            out[n - i] = r.mul(lam, self.coeffs[i]);
        }
        Ok(self.with_coeffs(out))
    }

    /// Applies `m^k` to every coefficient.
    pub fn map_coeffs(&self, form: &GaloisForm) -> Result<Self> {
        form.check_ring(self.ring())?;
        Ok(self.with_coeffs(
            self.coeffs
                .iter()
                .map(|&c| form.map.apply_k(c, form.k))
                .collect(),
        ))
    }

    /// Coefficient-wise residue map into the residue-field twisted ring.
    pub fn reduce(&self) -> Self {
        let res_ctx = self.ctx.residue_ring();
        let coeffs = self
            .coeffs
            .iter()
            .map(|&c| res_ctx.ring().elem(self.ring().residue(c)).unwrap())
            .collect();
        TwistedElement {
            ctx: res_ctx,
            coeffs,
        }
    }

    /// Encodes as `{n, lambda, coeffs}`.
    pub fn encode(&self) -> Value {
        let r = self.ring();
        json!({
            "n": self.n(),
            "lambda": r.encode(self.ctx.lambda()),
            "coeffs": self.coeffs.iter().map(|&c| r.encode(c)).collect::<Vec<_>>(),
        })
    }
}

/// A generalized `k`-Galois form `[a, b]_k = sum a_i m^k(b_i)`.
#[derive(Clone, Debug, PartialEq)]
pub struct GaloisForm {
    map: CoefficientMap,
    k: usize,
}

impl GaloisForm {
    pub fn new(map: CoefficientMap, k: usize) -> Result<Self> {
        if let Some(ord) = map.order() {
            if ord > 1 && k >= ord {
                return Err(Error::InvalidSpec(format!(
                    "iterate k = {k} must be below the map order {ord}"
                )));
            }
        }
        Ok(Self { map, k })
    }

    /// `k = 0` with the identity map.
    pub fn euclidean(ring: &Ring) -> Self {
        Self {
            map: CoefficientMap::identity(ring),
            k: 0,
        }
    }

    /// The `p^m`-power map with `k = 1` on `Z_{p^{2m}}`.
    pub fn hermitian(ring: &Ring) -> Result<Self> {
        Ok(Self {
            map: CoefficientMap::new(ring, MapKind::HermitianPower)?,
            k: 1,
        })
    }

    pub fn map(&self) -> &CoefficientMap {
        &self.map
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn is_euclidean(&self) -> bool {
        self.k == 0 || *self.map.kind() == MapKind::Identity
    }

    /// Stable name used in reports: `euclid`, `hermitian`, or `galois_<k>`.
    pub fn label(&self) -> String {
        if self.is_euclidean() {
            "euclid".into()
        } else if *self.map.kind() == MapKind::HermitianPower && self.k == 1 {
            "hermitian".into()
        } else {
            format!("galois_{}", self.k)
        }
    }

    fn check_ring(&self, ring: &Ring) -> Result<()> {
        if self.map.ring() == ring {
            Ok(())
        } else {
            Err(Error::MapSpecMismatch(format!(
                "map over {} applied to {}",
                self.map.ring().label(),
                ring.label()
            )))
        }
    }

    /// `m^k(x)`.
    pub fn apply(&self, x: Elem) -> Elem {
        self.map.apply_k(x, self.k)
    }

    /// `[a, b]_k`.
    pub fn eval(&self, a: &TwistedElement, b: &TwistedElement) -> Result<Elem> {
        a.check(b)?;
        self.check_ring(a.ring())?;
        let r = a.ring();
        Ok(a.coeffs
            .iter()
            .zip(&b.coeffs)
            .fold(r.zero(), |acc, (&x, &y)| r.add(acc, r.mul(x, self.apply(y)))))
    }
}

/// An explicit 2-cocycle `γ(g^i, g^j)` on `C_n` with unit values.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CocycleTable {
    ring: Ring,
    n: usize,
    table: Vec<Elem>,
}

/// Output of [`CocycleTable::standardize`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Standardized {
    /// Wrap unit of the equivalent `γ_λ` twisting.
    pub lambda: Elem,
    /// `delta[i]` rescales basis element `i`: `g^i (power) = delta[i] * (basis i)`.
    pub delta: Vec<Elem>,
}

impl CocycleTable {
    pub fn new(ring: &Ring, n: usize, table: Vec<Elem>) -> Result<Self> {
        if table.len() != n * n {
            return Err(Error::DimensionMismatch {
                expected: n * n,
                got: table.len(),
            });
        }
        if let Some(&bad) = table.iter().find(|&&x| !ring.is_unit(x)) {
            return Err(Error::NotAUnit(ring.render(bad)));
        }
        Ok(Self {
            ring: ring.clone(),
            n,
            table,
        })
    }

    pub fn trivial(ring: &Ring, n: usize) -> Self {
        Self {
            ring: ring.clone(),
            n,
            table: vec![ring.one(); n * n],
        }
    }

    /// `γ_λ(g^i, g^j) = λ` if `i + j >= n`, else 1.
    pub fn wrap(ring: &Ring, n: usize, lambda: Elem) -> Self {
        let table = (0..n * n)
            .map(|idx| {
                if idx / n + idx % n >= n {
                    lambda
                } else {
                    ring.one()
                }
            })
            .collect();
        Self {
            ring: ring.clone(),
            n,
            table,
        }
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> Elem {
        self.table[(i % self.n) * self.n + j % self.n]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Elem) {
        self.table[i * self.n + j] = v;
    }

    /// Cohomologous table `δ(g)δ(h)δ(gh)^{-1}γ(g,h)` for units `delta`.
    pub fn transport(&self, delta: &[Elem]) -> Result<Self> {
        if delta.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: delta.len(),
            });
        }
        let r = &self.ring;
        let inv: Vec<Elem> = delta.iter().map(|&d| r.inverse(d)).collect::<Result<_>>()?;
        let n = self.n;
        let table = (0..n * n)
            .map(|idx| {
                let (i, j) = (idx / n, idx % n);
                let t = r.mul(r.mul(delta[i], delta[j]), inv[(i + j) % n]);
                r.mul(t, self.table[idx])
            })
            .collect();
        Ok(Self {
            ring: r.clone(),
            n,
            table,
        })
    }

    /// Checks normalization and `γ(x,y)γ(xy,z) = γ(y,z)γ(x,yz)` on all triples.
    pub fn validate(&self) -> Result<()> {
        let r = &self.ring;
        let n = self.n;
        for i in 0..n {
            if self.get(i, 0) != r.one() {
                return Err(Error::UnnormalizedCocycle { pair: (i, 0) });
            }
            if self.get(0, i) != r.one() {
                return Err(Error::UnnormalizedCocycle { pair: (0, i) });
            }
        }
        for x in 0..n {
            for y in 0..n {
                for z in 0..n {
                    let lhs = r.mul(self.get(x, y), self.get((x + y) % n, z));
                    let rhs = r.mul(self.get(y, z), self.get(x, (y + z) % n));
                    if lhs != rhs {
                        return Err(Error::InvalidCocycle { triple: (x, y, z) });
                    }
                }
            }
        }
        Ok(())
    }

    /// Finds `λ` and the diagonal basis change carrying this table to `γ_λ`,
    /// using the generator `g = g^1`.
    pub fn standardize(&self) -> Result<Standardized> {
        self.validate()?;
        let r = &self.ring;
        let n = self.n;
        let mut delta = Vec::with_capacity(n);
        let mut acc = r.one();
        delta.push(acc);
        for i in 1..n {
            // delta[i] = prod_{j=1}^{i-1} γ(g, g^j)
            if i >= 2 {
                acc = r.mul(acc, self.get(1, i - 1));
            }
            delta.push(acc);
        }
        let lambda = if n == 1 {
            r.one()
        } else {
            r.mul(delta[n - 1], self.get(1, n - 1))
        };
        // b_i = delta_i * (g^i)-bar must multiply by the wrap table
        let carried = self.transport(&delta)?;
        if carried != CocycleTable::wrap(r, n, lambda) {
            return Err(Error::InvalidCocycle { triple: (1, 1, 1) });
        }
        Ok(Standardized { lambda, delta })
    }
}
