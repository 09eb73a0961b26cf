//! Matrices over a chain ring: echelon forms, kernels and row-span
//! membership.
//!
//! Every entry of a chain ring matrix is `pi^v * unit`, and an entry of
//! minimal valuation divides every other entry of its column. Elimination
//! therefore never needs gcds; the only complication compared to fields is
//! that pivots may be non-units.

use std::fmt;

use crate::chain_ring::{Elem, Ring};
use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq)]
pub struct RingMatrix {
    ring: Ring,
    rows: usize,
    cols: usize,
    data: Vec<Elem>,
}

impl fmt::Debug for RingMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "RingMatrix over {} ({}x{})", self.ring.label(), self.rows, self.cols)?;
        for r in 0..self.rows {
            let row: Vec<String> = self.row(r).iter().map(|&x| self.ring.render(x)).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

impl RingMatrix {
    pub fn new(ring: &Ring, rows: usize, cols: usize, data: Vec<Elem>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                expected: rows * cols,
                got: data.len(),
            });
        }
        Ok(Self {
            ring: ring.clone(),
            rows,
            cols,
            data,
        })
    }

    pub fn zeros(ring: &Ring, rows: usize, cols: usize) -> Self {
        Self {
            ring: ring.clone(),
            rows,
            cols,
            data: vec![ring.zero(); rows * cols],
        }
    }

    pub fn identity(ring: &Ring, size: usize) -> Self {
        let mut m = Self::zeros(ring, size, size);
        for i in 0..size {
            m.set(i, i, ring.one());
        }
        m
    }

    /// Builds a matrix from equal-length rows; `cols` fixes the width when
    /// `rows` is empty.
    pub fn from_rows(ring: &Ring, rows: &[Vec<Elem>], cols: usize) -> Result<Self> {
        let mut data = Vec::with_capacity(rows.len() * cols);
        for row in rows {
            if row.len() != cols {
                return Err(Error::DimensionMismatch {
                    expected: cols,
                    got: row.len(),
                });
            }
            data.extend_from_slice(row);
        }
        Self::new(ring, rows.len(), cols, data)
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> Elem {
        self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: Elem) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[Elem] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn row_vecs(&self) -> Vec<Vec<Elem>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(&self.ring, self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.set(c, r, self.get(r, c));
            }
        }
        t
    }

    /// `coeffs * self`, a combination of the rows.
    pub fn combine_rows(&self, coeffs: &[Elem]) -> Result<Vec<Elem>> {
        if coeffs.len() != self.rows {
            return Err(Error::DimensionMismatch {
                expected: self.rows,
                got: coeffs.len(),
            });
        }
        let ring = &self.ring;
        let mut out = vec![ring.zero(); self.cols];
        for (r, &c) in coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            for (o, &x) in out.iter_mut().zip(self.row(r)) {
                *o = ring.add(*o, ring.mul(c, x));
            }
        }
        Ok(out)
    }

    /// `self * x^T`.
    pub fn apply_to(&self, x: &[Elem]) -> Result<Vec<Elem>> {
        if x.len() != self.cols {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                got: x.len(),
            });
        }
        let ring = &self.ring;
        Ok((0..self.rows)
            .map(|r| {
                self.row(r)
                    .iter()
                    .zip(x)
                    .fold(ring.zero(), |acc, (&a, &b)| ring.add(acc, ring.mul(a, b)))
            })
            .collect())
    }

    /// Coefficient-wise image in the residue field, as a matrix over
    /// [`Ring::residue_ring`].
    pub fn residue_projection(&self) -> RingMatrix {
        let res = self.ring.residue_ring();
        let data = self
            .data
            .iter()
            .map(|&x| res.elem(self.ring.residue(x)).expect("residue code in range"))
            .collect();
        RingMatrix {
            ring: res,
            rows: self.rows,
            cols: self.cols,
            data,
        }
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(a * self.cols + c, b * self.cols + c);
        }
    }

    fn scale_row(&mut self, r: usize, unit: Elem) {
        for c in 0..self.cols {
            let v = self.ring.mul(self.get(r, c), unit);
            self.set(r, c, v);
        }
    }

    /// row[target] += factor * row[source]
    fn add_row_multiple(&mut self, target: usize, source: usize, factor: Elem) {
        if factor.is_zero() {
            return;
        }
        for c in 0..self.cols {
            let v = self
                .ring
                .add(self.get(target, c), self.ring.mul(factor, self.get(source, c)));
            self.set(target, c, v);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for r in 0..self.rows {
            self.data.swap(r * self.cols + a, r * self.cols + b);
        }
    }

    /// col[target] += factor * col[source]
    fn add_col_multiple(&mut self, target: usize, source: usize, factor: Elem) {
        if factor.is_zero() {
            return;
        }
        for r in 0..self.rows {
            let v = self
                .ring
                .add(self.get(r, target), self.ring.mul(factor, self.get(r, source)));
            self.set(r, target, v);
        }
    }
}

/// An invertible elementary row operation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RowOp {
    Swap(usize, usize),
    /// Multiply a row by a unit.
    Scale(usize, Elem),
    /// `row[target] += factor * row[source]`.
    AddMultiple {
        target: usize,
        source: usize,
        factor: Elem,
    },
}

impl RowOp {
    pub fn apply(&self, m: &mut RingMatrix) {
        match *self {
            RowOp::Swap(a, b) => m.swap_rows(a, b),
            RowOp::Scale(r, u) => m.scale_row(r, u),
            RowOp::AddMultiple {
                target,
                source,
                factor,
            } => m.add_row_multiple(target, source, factor),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Pivot {
    pub row: usize,
    pub col: usize,
    pub unit: bool,
}

#[derive(Clone, Debug)]
pub struct EchelonResult {
    pub matrix: RingMatrix,
    /// Unit pivots first (rows `0..rank`), then non-unit pivots, each block
    /// with strictly increasing columns.
    pub pivots: Vec<Pivot>,
    /// Number of unit pivots.
    pub rank: usize,
    /// Whether the row span is a free module (equivalently, no non-unit pivots).
    pub free: bool,
    pub ops: Vec<RowOp>,
}

impl EchelonResult {
    /// Replays the recorded operations on `m`.
    pub fn replay(&self, m: &RingMatrix) -> RingMatrix {
        let mut out = m.clone();
        for op in &self.ops {
            op.apply(&mut out);
        }
        out
    }

    /// The rows carrying unit pivots; a basis of the row span when it is free.
    pub fn basis(&self) -> Vec<Vec<Elem>> {
        (0..self.rank).map(|r| self.matrix.row(r).to_vec()).collect()
    }
}

/// Row echelon form using invertible row operations.
///
/// Columns are scanned left to right taking the first unit entry at or
/// below the current row as pivot; unit pivots are normalized to 1 and
/// cleared above and below. Columns whose remaining entries all lie in
/// `J(R)` are revisited afterwards with minimal-valuation pivots, which
/// are normalized to `pi^v` and cleared below only.
pub fn echelonize(m: &RingMatrix) -> EchelonResult {
    let ring = m.ring.clone();
    let mut a = m.clone();
    let mut ops = Vec::new();
    let mut pivots = Vec::new();
    let mut deferred = Vec::new();
    let mut cur = 0;

    let mut record = |a: &mut RingMatrix, op: RowOp| {
        op.apply(a);
        ops.push(op);
    };

    for col in 0..a.cols {
        if cur == a.rows {
            break;
        }
        let found = (cur..a.rows).find(|&r| ring.is_unit(a.get(r, col)));
        let Some(r) = found else {
            if (cur..a.rows).any(|r| !a.get(r, col).is_zero()) {
                deferred.push(col);
            }
            continue;
        };
        if r != cur {
            record(&mut a, RowOp::Swap(r, cur));
        }
        let inv = ring.inverse(a.get(cur, col)).expect("unit pivot");
        if inv != ring.one() {
            record(&mut a, RowOp::Scale(cur, inv));
        }
        for i in 0..a.rows {
            let x = a.get(i, col);
            if i != cur && !x.is_zero() {
                record(
                    &mut a,
                    RowOp::AddMultiple {
                        target: i,
                        source: cur,
                        factor: ring.neg(x),
                    },
                );
            }
        }
        pivots.push(Pivot {
            row: cur,
            col,
            unit: true,
        });
        cur += 1;
    }
    let rank = cur;

    for col in deferred {
        if cur == a.rows {
            break;
        }
        let best = (cur..a.rows)
            .filter_map(|r| ring.valuation(a.get(r, col)).map(|v| (v, r)))
            .min();
        let Some((_, r)) = best else { continue };
        if r != cur {
            record(&mut a, RowOp::Swap(r, cur));
        }
        let (_, unit) = ring.split_valuation(a.get(cur, col)).unwrap();
        let inv = ring.inverse(unit).expect("unit part");
        if inv != ring.one() {
            record(&mut a, RowOp::Scale(cur, inv));
        }
        let piv = a.get(cur, col);
        for i in cur + 1..a.rows {
            let x = a.get(i, col);
            if !x.is_zero() {
                let q = ring.divide(x, piv).expect("pivot has minimal valuation");
                record(
                    &mut a,
                    RowOp::AddMultiple {
                        target: i,
                        source: cur,
                        factor: ring.neg(q),
                    },
                );
            }
        }
        pivots.push(Pivot {
            row: cur,
            col,
            unit: false,
        });
        cur += 1;
    }

    EchelonResult {
        free: pivots.len() == rank,
        matrix: a,
        pivots,
        rank,
        ops,
    }
}

/// `left * m * right = diag` with `left`, `right` invertible.
struct Diagonal {
    left: RingMatrix,
    right: RingMatrix,
    diag: Vec<Elem>,
}

fn diagonalize(m: &RingMatrix) -> Diagonal {
    let ring = m.ring.clone();
    let mut a = m.clone();
    let mut left = RingMatrix::identity(&ring, m.rows);
    let mut right = RingMatrix::identity(&ring, m.cols);
    let steps = m.rows.min(m.cols);
    let mut diag = Vec::with_capacity(steps);
    for k in 0..steps {
        let mut best: Option<(u32, usize, usize)> = None;
        for r in k..a.rows {
            for c in k..a.cols {
                if let Some(v) = ring.valuation(a.get(r, c)) {
                    if best.map_or(true, |(bv, _, _)| v < bv) {
                        best = Some((v, r, c));
                    }
                }
            }
        }
        let Some((_, r, c)) = best else { break };
        a.swap_rows(k, r);
        left.swap_rows(k, r);
        a.swap_cols(k, c);
        right.swap_cols(k, c);
        let piv = a.get(k, k);
        for i in k + 1..a.rows {
            let x = a.get(i, k);
            if !x.is_zero() {
                let f = ring.neg(ring.divide(x, piv).expect("minimal valuation"));
                a.add_row_multiple(i, k, f);
                left.add_row_multiple(i, k, f);
            }
        }
        for j in k + 1..a.cols {
            let x = a.get(k, j);
            if !x.is_zero() {
                let f = ring.neg(ring.divide(x, piv).expect("minimal valuation"));
                a.add_col_multiple(j, k, f);
                right.add_col_multiple(j, k, f);
            }
        }
        diag.push(piv);
    }
    Diagonal { left, right, diag }
}

/// Generators of `{x : m * x^T = 0}`.
pub fn kernel(m: &RingMatrix) -> Vec<Vec<Elem>> {
    let ring = &m.ring;
    let t = ring.nilpotency_index();
    let d = diagonalize(m);
    let mut gens = Vec::new();
    for i in 0..m.cols {
        let scale = match d.diag.get(i) {
            Some(&di) => match ring.valuation(di) {
                Some(0) => continue,
                Some(v) => ring.uniformizer_pow(t - v),
                None => ring.one(),
            },
            None => ring.one(),
        };
        let g: Vec<Elem> = (0..m.cols)
            .map(|r| ring.mul(scale, d.right.get(r, i)))
            .collect();
        if g.iter().any(|x| !x.is_zero()) {
            gens.push(g);
        }
    }
    gens
}

/// Coefficients `c` with `c * m = v`, or `None` when `v` is outside the row span.
pub fn solve_membership(m: &RingMatrix, v: &[Elem]) -> Result<Option<Vec<Elem>>> {
    if v.len() != m.cols {
        return Err(Error::DimensionMismatch {
            expected: m.cols,
            got: v.len(),
        });
    }
    let ring = &m.ring;
    // m^T c^T = v^T
    let at = m.transpose();
    let d = diagonalize(&at);
    let w = d.left.apply_to(v)?;
    let mut y = vec![ring.zero(); m.rows];
    for (i, &wi) in w.iter().enumerate() {
        match d.diag.get(i) {
            Some(&di) if !di.is_zero() => match ring.divide(wi, di) {
                Some(q) => y[i] = q,
                None => return Ok(None),
            },
            _ => {
                if !wi.is_zero() {
                    return Ok(None);
                }
            }
        }
    }
    let c = d.right.apply_to(&y)?;
    if m.combine_rows(&c)? != v {
        return Ok(None);
    }
    Ok(Some(c))
}
