//! Exact null spaces over ℚ: dense fraction-free elimination for small
//! systems, streamed elimination (exact or multi-modular) for tall ones.

pub mod modp;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::polyring::Rational;

/// A sparse row: `(column, value)` pairs with distinct columns.
pub type SparseRow = Vec<(usize, Rational)>;

const BATCH: usize = 512;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum NullspaceError {
    #[error("column {col} out of range for a system with {ncols} columns")]
    ColumnOutOfRange { col: usize, ncols: usize },
    #[error("modular reconstruction failed with {primes} primes; rerun in exact mode")]
    ReconstructionFailed { primes: usize },
    #[error("row source failed: {0}")]
    Source(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QMatrix {
    ncols: usize,
    rows: Vec<SparseRow>,
}

impl QMatrix {
    pub fn new(ncols: usize) -> Self {
        QMatrix { ncols, rows: Vec::new() }
    }

    pub fn from_dense(ncols: usize, rows: &[Vec<Rational>]) -> Result<Self, NullspaceError> {
        let mut m = QMatrix::new(ncols);
        for r in rows {
            m.push_row(r.iter().enumerate().filter(|(_, v)| !v.is_zero()).map(|(j, v)| (j, v.clone())).collect())?;
        }
        Ok(m)
    }

    pub fn push_row(&mut self, row: SparseRow) -> Result<(), NullspaceError> {
        if let Some(&(col, _)) = row.iter().find(|(c, _)| *c >= self.ncols) {
            return Err(NullspaceError::ColumnOutOfRange { col, ncols: self.ncols });
        }
        self.rows.push(row.into_iter().filter(|(_, v)| !v.is_zero()).collect());
        Ok(())
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[SparseRow] {
        &self.rows
    }

    pub fn apply(&self, v: &[Rational]) -> Vec<Rational> {
        self.rows.iter().map(|r| dot(r, v)).collect()
    }

    /// Rank via exact elimination.
    pub fn rank(&self) -> usize {
        let (pivots, _) = echelon_integer(self);
        pivots.len()
    }
}

fn dot(row: &[(usize, Rational)], v: &[Rational]) -> Rational {
    let mut acc = Rational::zero();
    for (j, a) in row {
        if !v[*j].is_zero() {
            acc += a * &v[*j];
        }
    }
    acc
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NullBasis {
    ncols: usize,
    vectors: Vec<Vec<Rational>>,
}

impl NullBasis {
    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn vectors(&self) -> &[Vec<Rational>] {
        &self.vectors
    }

    pub fn into_vectors(self) -> Vec<Vec<Rational>> {
        self.vectors
    }

    pub fn dim(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }
}

/// Scales `v` so its first nonzero coordinate is 1.
pub fn normalize(v: &mut [Rational]) {
    if let Some(lead) = v.iter().find(|c| !c.is_zero()).cloned() {
        if !lead.is_one() {
            let inv = lead.recip();
            for c in v.iter_mut() {
                if !c.is_zero() {
                    *c *= &inv;
                }
            }
        }
    }
}

/// Kernel vectors from a reduced echelon form given as pivot columns and,
/// per pivot row, the value of each free column after scaling the pivot to 1.
fn kernel_from_rref(ncols: usize, pivots: &[usize], rref: &[Vec<Rational>]) -> Vec<Vec<Rational>> {
    let mut is_pivot = vec![false; ncols];
    for &c in pivots {
        is_pivot[c] = true;
    }
    let mut out = Vec::new();
    for f in (0..ncols).filter(|&f| !is_pivot[f]) {
        let mut v = vec![Rational::zero(); ncols];
        v[f] = Rational::one();
        for (row, &pc) in rref.iter().zip(pivots) {
            if !row[f].is_zero() {
                v[pc] = -&row[f];
            }
        }
        normalize(&mut v);
        out.push(v);
    }
    out
}

fn int_gcd(a: &Rational, b: &Rational) -> Rational {
    if a.is_inline() && b.is_inline() {
        let (x, y) = (a.numer(), b.numer());
        return Rational::from(x.gcd(&y));
    }
    Rational::from(a.numer().gcd(&b.numer()))
}

/// Clears denominators of a sparse row, returning a dense integer row.
fn integer_row(ncols: usize, row: &[(usize, Rational)]) -> Vec<Rational> {
    let mut lcm = BigInt::one();
    for (_, v) in row {
        if !v.is_integer() {
            lcm = lcm.lcm(&v.denom());
        }
    }
    let l = Rational::from(lcm);
    let mut out = vec![Rational::zero(); ncols];
    for (j, v) in row {
        out[*j] = v * &l;
    }
    out
}

fn remove_content(row: &mut [Rational]) {
    let mut g = Rational::zero();
    for v in row.iter().filter(|v| !v.is_zero()) {
        g = if g.is_zero() { v.abs() } else { int_gcd(&g, v) };
        if g.is_one() {
            return;
        }
    }
    if !g.is_zero() && !g.is_one() {
        for v in row.iter_mut().filter(|v| !v.is_zero()) {
            *v = &*v / &g;
        }
    }
}

/// Fraction-free Gauss–Jordan elimination on integer rows with content
/// removal. Pivot rule: leftmost unresolved column, first remaining row with
/// a nonzero entry there. Returns pivot columns and the reduced pivot rows.
fn echelon_integer(a: &QMatrix) -> (Vec<usize>, Vec<Vec<Rational>>) {
    let n = a.ncols;
    let mut rows: Vec<Vec<Rational>> = a.rows.iter().map(|r| integer_row(n, r)).collect();
    rows.retain(|r| r.iter().any(|v| !v.is_zero()));
    let mut pivots = Vec::new();
    let mut done = 0;
    for c in 0..n {
        let Some(p) = (done..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(done, p);
        let prow = std::mem::take(&mut rows[done]);
        let support: Vec<usize> = (c..n).filter(|&j| !prow[j].is_zero()).collect();
        let pv = prow[c].clone();
        rows.par_iter_mut().enumerate().filter(|(i, r)| *i != done && !r[c].is_zero()).for_each(|(_, r)| {
            let e = r[c].clone();
            for v in r.iter_mut().filter(|v| !v.is_zero()) {
                *v *= &pv;
            }
            for &j in &support {
                let t = &e * &prow[j];
                r[j] -= &t;
            }
            remove_content(r);
        });
        rows[done] = prow;
        pivots.push(c);
        done += 1;
    }
    rows.truncate(done);
    (pivots, rows)
}

/// Exact null-space basis of `a`.
pub fn null_dense(a: &QMatrix) -> NullBasis {
    let (pivots, rows) = echelon_integer(a);
    let rref: Vec<Vec<Rational>> = rows
        .into_iter()
        .zip(&pivots)
        .map(|(r, &c)| {
            let inv = r[c].recip();
            r.into_iter().map(|v| if v.is_zero() { v } else { v * &inv }).collect()
        })
        .collect();
    NullBasis { ncols: a.ncols, vectors: kernel_from_rref(a.ncols, &pivots, &rref) }
}

/// A restartable sequence of sparse rows.
pub trait RowSource: Sync {
    /// Visits every row once, in a fixed order.
    fn visit(&self, f: &mut dyn FnMut(SparseRow)) -> Result<(), NullspaceError>;
}

impl RowSource for QMatrix {
    fn visit(&self, f: &mut dyn FnMut(SparseRow)) -> Result<(), NullspaceError> {
        for r in &self.rows {
            f(r.clone());
        }
        Ok(())
    }
}

impl RowSource for Vec<SparseRow> {
    fn visit(&self, f: &mut dyn FnMut(SparseRow)) -> Result<(), NullspaceError> {
        for r in self {
            f(r.clone());
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StreamMode {
    Exact,
    /// Start with `primes` primes (at least two), add more on failure up to `budget`.
    Modular { primes: usize, budget: usize },
}

impl StreamMode {
    pub fn modular() -> Self {
        StreamMode::Modular { primes: 2, budget: modp::PRIMES.len() }
    }
}

trait Field: Clone + Send + Sync {
    fn is_zero(&self) -> bool;
    fn inv(&self) -> Self;
    /// `a - b * c`
    fn sub_mul(a: &Self, b: &Self, c: &Self) -> Self;
    fn mul(a: &Self, b: &Self) -> Self;
}

impl Field for Rational {
    fn is_zero(&self) -> bool {
        Rational::is_zero(self)
    }
    fn inv(&self) -> Self {
        self.recip()
    }
    fn sub_mul(a: &Self, b: &Self, c: &Self) -> Self {
        a - &(b * c)
    }
    fn mul(a: &Self, b: &Self) -> Self {
        a * b
    }
}

/// Residue modulo a prime chosen at runtime; the prime travels alongside.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
struct Fp(u64, u64);

impl Field for Fp {
    fn is_zero(&self) -> bool {
        self.0 == 0
    }
    fn inv(&self) -> Self {
        Fp(modp::inv(self.0, self.1), self.1)
    }
    fn sub_mul(a: &Self, b: &Self, c: &Self) -> Self {
        Fp(modp::sub(a.0, modp::mul(b.0, c.0, a.1), a.1), a.1)
    }
    fn mul(a: &Self, b: &Self) -> Self {
        Fp(modp::mul(a.0, b.0, a.1), a.1)
    }
}

struct Echelon<T> {
    ncols: usize,
    /// pivot column of each row
    pivots: Vec<usize>,
    /// row owning each column, if it is a pivot column
    owner: Vec<Option<usize>>,
    rows: Vec<Vec<T>>,
}

impl<T: Field> Echelon<T> {
    fn new(ncols: usize) -> Self {
        Echelon { ncols, pivots: Vec::new(), owner: vec![None; ncols], rows: Vec::new() }
    }

    fn full(&self) -> bool {
        self.pivots.len() == self.ncols
    }

    fn reduce(&self, row: &mut [T]) {
        for c in 0..self.ncols {
            if row[c].is_zero() {
                continue;
            }
            if let Some(i) = self.owner[c] {
                let e = row[c].clone();
                let prow = &self.rows[i];
                for j in c..self.ncols {
                    if !prow[j].is_zero() {
                        row[j] = T::sub_mul(&row[j], &e, &prow[j]);
                    }
                }
            }
        }
    }

    /// Inserts an already reduced nonzero row and restores reduced form.
    fn insert(&mut self, mut row: Vec<T>) {
        self.reduce(&mut row);
        let Some(c) = row.iter().position(|v| !v.is_zero()) else {
            return;
        };
        let inv = row[c].inv();
        for v in row.iter_mut().filter(|v| !v.is_zero()) {
            *v = T::mul(v, &inv);
        }
        for other in self.rows.iter_mut() {
            if !other[c].is_zero() {
                let e = other[c].clone();
                for j in c..self.ncols {
                    if !row[j].is_zero() {
                        other[j] = T::sub_mul(&other[j], &e, &row[j]);
                    }
                }
            }
        }
        self.owner[c] = Some(self.rows.len());
        self.pivots.push(c);
        self.rows.push(row);
    }

    /// Reduces a batch in parallel against the current block, then inserts
    /// survivors serially. The reduced form does not depend on batching.
    fn absorb(&mut self, batch: Vec<Vec<T>>) {
        let survivors: Vec<Vec<T>> = batch
            .into_par_iter()
            .filter_map(|mut r| {
                self.reduce(&mut r);
                r.iter().any(|v| !v.is_zero()).then_some(r)
            })
            .collect();
        for r in survivors {
            if self.full() {
                break;
            }
            self.insert(r);
        }
    }

    /// Pivot columns ascending with their rows.
    fn sorted(&self) -> (Vec<usize>, Vec<&Vec<T>>) {
        let mut idx: Vec<usize> = (0..self.rows.len()).collect();
        idx.sort_by_key(|&i| self.pivots[i]);
        (idx.iter().map(|&i| self.pivots[i]).collect(), idx.iter().map(|&i| &self.rows[i]).collect())
    }
}

fn stream_exact(src: &dyn RowSource, ncols: usize) -> Result<NullBasis, NullspaceError> {
    let mut ech: Echelon<Rational> = Echelon::new(ncols);
    let mut batch = Vec::with_capacity(BATCH);
    let mut bad = None;
    src.visit(&mut |row| {
        if ech.full() {
            return;
        }
        let mut dense = vec![Rational::zero(); ncols];
        for (j, v) in row {
            match dense.get_mut(j) {
                Some(slot) => *slot = v,
                None => bad = Some(j),
            }
        }
        batch.push(dense);
        if batch.len() == BATCH {
            ech.absorb(std::mem::take(&mut batch));
        }
    })?;
    if let Some(col) = bad {
        return Err(NullspaceError::ColumnOutOfRange { col, ncols });
    }
    ech.absorb(batch);
    let (pivots, rows) = ech.sorted();
    let rref: Vec<Vec<Rational>> = rows.into_iter().cloned().collect();
    Ok(NullBasis { ncols, vectors: kernel_from_rref(ncols, &pivots, &rref) })
}

/// One pass over the source reducing modulo each prime. A prime dividing some
/// denominator is marked unusable.
fn modular_pass(src: &dyn RowSource, ncols: usize, primes: &[u64]) -> Result<Vec<Option<Echelon<Fp>>>, NullspaceError> {
    let mut echs: Vec<Option<Echelon<Fp>>> = primes.iter().map(|_| Some(Echelon::new(ncols))).collect();
    let mut batch: Vec<SparseRow> = Vec::with_capacity(BATCH);
    let mut bad = None;
    let flush = |echs: &mut Vec<Option<Echelon<Fp>>>, batch: Vec<SparseRow>| {
        echs.par_iter_mut().zip(primes.par_iter()).for_each(|(slot, &p)| {
            let Some(ech) = slot else { return };
            if ech.full() {
                return;
            }
            let mut dense_rows = Vec::with_capacity(batch.len());
            for row in &batch {
                let mut dense = vec![Fp(0, p); ncols];
                for (j, v) in row {
                    match v.mod_prime(p) {
                        Some(r) => dense[*j] = Fp(r, p),
                        None => {
                            *slot = None;
                            return;
                        }
                    }
                }
                dense_rows.push(dense);
            }
            ech.absorb(dense_rows);
        });
    };
    src.visit(&mut |row| {
        if let Some(&(col, _)) = row.iter().find(|(c, _)| *c >= ncols) {
            bad = Some(col);
            return;
        }
        batch.push(row);
        if batch.len() == BATCH {
            flush(&mut echs, std::mem::take(&mut batch));
        }
    })?;
    if let Some(col) = bad {
        return Err(NullspaceError::ColumnOutOfRange { col, ncols });
    }
    flush(&mut echs, batch);
    Ok(echs)
}

fn verify_pass(src: &dyn RowSource, candidates: &[Vec<Rational>]) -> Result<bool, NullspaceError> {
    let mut ok = true;
    let mut batch: Vec<SparseRow> = Vec::with_capacity(BATCH);
    let check = |batch: &[SparseRow]| batch.par_iter().all(|r| candidates.iter().all(|v| dot(r, v).is_zero()));
    src.visit(&mut |row| {
        if !ok {
            return;
        }
        batch.push(row);
        if batch.len() == BATCH {
            ok &= check(&batch);
            batch.clear();
        }
    })?;
    Ok(ok && check(&batch))
}

fn stream_modular(src: &dyn RowSource, ncols: usize, start: usize, budget: usize) -> Result<NullBasis, NullspaceError> {
    let budget = budget.clamp(2, modp::PRIMES.len());
    let mut count = start.clamp(2, budget);
    loop {
        let primes = &modp::PRIMES[..count];
        let echs = modular_pass(src, ncols, primes)?;
        if let Some(candidates) = lift(ncols, primes, &echs) {
            if verify_pass(src, &candidates)? {
                return Ok(NullBasis { ncols, vectors: candidates });
            }
        }
        if count >= budget {
            return Err(NullspaceError::ReconstructionFailed { primes: count });
        }
        count = (count + 2).min(budget);
    }
}

/// Combines the primes of maximal rank and earliest pivot set by CRT and
/// lifts each kernel coordinate by rational reconstruction.
fn lift(ncols: usize, primes: &[u64], echs: &[Option<Echelon<Fp>>]) -> Option<Vec<Vec<Rational>>> {
    let mut best: Option<Vec<usize>> = None;
    for ech in echs.iter().flatten() {
        let (piv, _) = ech.sorted();
        best = match best {
            None => Some(piv),
            Some(b) if piv.len() > b.len() || (piv.len() == b.len() && piv < b) => Some(piv),
            keep => keep,
        };
    }
    let pivots = best?;
    let group: Vec<(u64, &Echelon<Fp>)> = primes
        .iter()
        .zip(echs)
        .filter_map(|(&p, e)| e.as_ref().map(|e| (p, e)))
        .filter(|(_, e)| e.sorted().0 == pivots)
        .collect();
    let mut is_pivot = vec![false; ncols];
    for &c in &pivots {
        is_pivot[c] = true;
    }
    let frees: Vec<usize> = (0..ncols).filter(|&f| !is_pivot[f]).collect();
    let sorted: Vec<Vec<&Vec<Fp>>> = group.iter().map(|(_, e)| e.sorted().1).collect();
    let mut out = Vec::with_capacity(frees.len());
    for &f in &frees {
        let mut v = vec![Rational::zero(); ncols];
        v[f] = Rational::one();
        for (k, &pc) in pivots.iter().enumerate() {
            let mut r = BigInt::zero();
            let mut m = BigInt::one();
            for (g, (p, _)) in group.iter().enumerate() {
                let x = sorted[g][k][f].0;
                let neg = modp::sub(0, x, *p);
                r = modp::crt(&r, &m, neg, *p);
                m *= BigInt::from(*p);
            }
            let (n, d) = modp::rational_reconstruct(&r, &m)?;
            v[pc] = Rational::from_bigints(n, d);
        }
        normalize(&mut v);
        out.push(v);
    }
    Some(out)
}

/// Null space of a streamed system. Modular mode always re-verifies the
/// lifted basis exactly against a second pass.
pub fn null_stream(src: &dyn RowSource, ncols: usize, mode: StreamMode) -> Result<NullBasis, NullspaceError> {
    match mode {
        StreamMode::Exact => stream_exact(src, ncols),
        StreamMode::Modular { primes, budget } => stream_modular(src, ncols, primes, budget),
    }
}

/// Whether `v` lies in the span of `basis` (exact elimination).
pub fn in_span(basis: &[Vec<Rational>], v: &[Rational]) -> bool {
    let ncols = v.len();
    let mut m = QMatrix::new(ncols);
    for b in basis {
        m.push_row(b.iter().cloned().enumerate().filter(|(_, c)| !c.is_zero()).collect()).expect("matching length");
    }
    let r0 = m.rank();
    m.push_row(v.iter().cloned().enumerate().filter(|(_, c)| !c.is_zero()).collect()).expect("matching length");
    m.rank() == r0
}

/// Whether two families span the same subspace.
pub fn same_span(a: &[Vec<Rational>], b: &[Vec<Rational>]) -> bool {
    a.iter().all(|v| in_span(b, v)) && b.iter().all(|v| in_span(a, v))
}
