//! Evaluation of trace polynomials on the generic traceless matrices
//!
//! ```text
//! x = diag(x11, x22, x33, -(x11 + x22 + x33))
//! y = (y_pq) with y44 = -(y11 + y22 + y33)
//! ```
//!
//! over the 18-variable ring `Q[x11, x22, x33, y11, ..., y43]`.

use std::collections::HashMap;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, OnceLock, RwLock};

use crate::polyring::{CommPoly, Rational, VarSet};
use crate::tracelang::{Letter, TraceExpr, Word};

pub const N: usize = 4;

/// Variable names in the fixed order used for canonical serialization.
pub const VAR_NAMES: [&str; 18] = [
    "x11", "x22", "x33", "y11", "y12", "y13", "y14", "y21", "y22", "y23", "y24", "y31", "y32", "y33", "y34", "y41",
    "y42", "y43",
];

/// Number of leading variables belonging to `x`.
pub const X_VARS: usize = 3;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EvalError {
    #[error("cannot evaluate tr({0}): words of length < 2 are excluded")]
    ShortWord(Word),
}

/// The shared 18-variable set.
pub fn varset() -> Arc<VarSet> {
    static VARS: OnceLock<Arc<VarSet>> = OnceLock::new();
    VARS.get_or_init(|| VarSet::new(VAR_NAMES).expect("valid variable names")).clone()
}

/// A 4×4 matrix of polynomials.
#[derive(Clone, Debug, PartialEq)]
pub struct GenericMatrix {
    entries: Vec<CommPoly>,
}

impl GenericMatrix {
    pub fn zero() -> Self {
        let vars = varset();
        GenericMatrix { entries: vec![CommPoly::zero(&vars); N * N] }
    }

    pub fn entry(&self, row: usize, col: usize) -> &CommPoly {
        &self.entries[row * N + col]
    }

    fn set(&mut self, row: usize, col: usize, p: CommPoly) {
        self.entries[row * N + col] = p;
    }

    pub fn trace(&self) -> CommPoly {
        let vars = varset();
        (0..N).fold(CommPoly::zero(&vars), |acc, i| acc.add(self.entry(i, i)).expect("shared variables"))
    }

    pub fn mul(&self, other: &GenericMatrix) -> GenericMatrix {
        let mut out = GenericMatrix::zero();
        for i in 0..N {
            for j in 0..N {
                let mut acc = CommPoly::zero(&varset());
                for k in 0..N {
                    let (a, b) = (self.entry(i, k), other.entry(k, j));
                    if !a.is_zero() && !b.is_zero() {
                        acc.add_scaled_assign(&a.mul(b).expect("shared variables"), &Rational::one());
                    }
                }
                out.set(i, j, acc);
            }
        }
        out
    }

    /// `tr(self * other)` without forming the full product.
    pub fn trace_of_product(&self, other: &GenericMatrix) -> CommPoly {
        let mut acc = CommPoly::zero(&varset());
        for i in 0..N {
            for k in 0..N {
                let (a, b) = (self.entry(i, k), other.entry(k, i));
                if !a.is_zero() && !b.is_zero() {
                    acc.add_scaled_assign(&a.mul(b).expect("shared variables"), &Rational::one());
                }
            }
        }
        acc
    }

    pub fn add(&self, other: &GenericMatrix) -> GenericMatrix {
        GenericMatrix {
            entries: self.entries.iter().zip(&other.entries).map(|(a, b)| a.add(b).expect("shared variables")).collect(),
        }
    }

    pub fn sub(&self, other: &GenericMatrix) -> GenericMatrix {
        GenericMatrix {
            entries: self.entries.iter().zip(&other.entries).map(|(a, b)| a.sub(b).expect("shared variables")).collect(),
        }
    }
}

/// The generic traceless diagonal matrix `x`.
pub fn build_x() -> GenericMatrix {
    let vars = varset();
    let mut m = GenericMatrix::zero();
    let mut last = CommPoly::zero(&vars);
    for i in 0..3 {
        let v = CommPoly::var(&vars, i);
        last = last.sub(&v).expect("shared variables");
        m.set(i, i, v);
    }
    m.set(3, 3, last);
    m
}

/// The generic traceless matrix `y`; entry (1,4) is the independent variable `y14`.
pub fn build_y() -> GenericMatrix {
    let vars = varset();
    let mut m = GenericMatrix::zero();
    for p in 0..N {
        for q in 0..N {
            if (p, q) == (3, 3) {
                continue;
            }
            m.set(p, q, CommPoly::named(&vars, &format!("y{}{}", p + 1, q + 1)));
        }
    }
    let d = ["y11", "y22", "y33"]
        .iter()
        .fold(CommPoly::zero(&vars), |acc, n| acc.sub(&CommPoly::named(&vars, n)).expect("shared variables"));
    m.set(3, 3, d);
    m
}

/// Trace values keyed by cyclic-canonical word. Safe for concurrent use; racing
/// inserts store identical values.
#[derive(Default)]
pub struct EvalCache {
    map: RwLock<HashMap<Word, Arc<CommPoly>>>,
}

impl EvalCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, w: &Word) -> Option<Arc<CommPoly>> {
        self.map.read().expect("cache lock").get(w).cloned()
    }

    pub fn insert(&self, w: Word, p: Arc<CommPoly>) {
        self.map.write().expect("cache lock").insert(w, p);
    }

    pub fn len(&self) -> usize {
        self.map.read().expect("cache lock").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn entries(&self) -> Vec<(Word, Arc<CommPoly>)> {
        let mut v: Vec<_> = self.map.read().expect("cache lock").iter().map(|(w, p)| (w.clone(), p.clone())).collect();
        v.sort_by(|a, b| a.0.cmp(&b.0));
        v
    }
}

/// The pair `(x, y)` together with a trace cache.
pub struct GenericPair {
    x: GenericMatrix,
    y: GenericMatrix,
    cache: EvalCache,
    word_evals: AtomicU64,
}

impl Default for GenericPair {
    fn default() -> Self {
        Self::new()
    }
}

impl GenericPair {
    pub fn new() -> Self {
        GenericPair { x: build_x(), y: build_y(), cache: EvalCache::new(), word_evals: AtomicU64::new(0) }
    }

    pub fn matrix(&self, l: Letter) -> &GenericMatrix {
        match l {
            Letter::X => &self.x,
            Letter::Y => &self.y,
        }
    }

    pub fn cache(&self) -> &EvalCache {
        &self.cache
    }

    /// Number of words evaluated from scratch (cache misses) so far.
    pub fn word_evaluations(&self) -> u64 {
        self.word_evals.load(Ordering::Relaxed)
    }

    /// The matrix product for `w`, letters multiplied left to right.
    pub fn eval_word(&self, w: &Word) -> GenericMatrix {
        let mut it = w.letters().iter();
        let Some(&first) = it.next() else {
            let vars = varset();
            let mut id = GenericMatrix::zero();
            for i in 0..N {
                id.set(i, i, CommPoly::one(&vars));
            }
            return id;
        };
        it.fold(self.matrix(first).clone(), |acc, &l| acc.mul(self.matrix(l)))
    }

    /// `tr(w)` computed in the given letter order, bypassing the cache.
    pub fn trace_word_uncached(&self, w: &Word) -> Result<CommPoly, EvalError> {
        if w.len() < 2 {
            return Err(EvalError::ShortWord(w.clone()));
        }
        let letters = w.letters();
        let prefix = Word::new(letters[..letters.len() - 1].to_vec());
        let last = letters[letters.len() - 1];
        Ok(self.eval_word(&prefix).trace_of_product(self.matrix(last)))
    }

    /// `tr(w)` via the cache keyed on the cyclic-canonical rotation.
    pub fn eval_word_trace(&self, w: &Word) -> Result<Arc<CommPoly>, EvalError> {
        if w.len() < 2 {
            return Err(EvalError::ShortWord(w.clone()));
        }
        let key = w.cyclic_normalize();
        if let Some(p) = self.cache.get(&key) {
            return Ok(p);
        }
        self.word_evals.fetch_add(1, Ordering::Relaxed);
        let p = Arc::new(self.trace_word_uncached(&key)?);
        self.cache.insert(key, p.clone());
        Ok(p)
    }

    pub fn eval_trace_expr(&self, e: &TraceExpr) -> Result<CommPoly, EvalError> {
        let vars = varset();
        let mut out = CommPoly::zero(&vars);
        for (m, c) in e.terms() {
            let mut acc = CommPoly::constant(&vars, c.clone());
            for w in m.factors() {
                acc = acc.mul(&*self.eval_word_trace(w)?).expect("shared variables");
            }
            out.add_scaled_assign(&acc, &Rational::one());
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tracelang::{commutator_xy, trace_of, NcPoly};

    fn v(name: &str) -> CommPoly {
        CommPoly::named(&varset(), name)
    }

    fn w(s: &str) -> Word {
        s.parse().unwrap()
    }

    #[test]
    fn matrices_are_traceless() {
        assert!(build_x().trace().is_zero());
        assert!(build_y().trace().is_zero());
        let (x, y) = (build_x(), build_y());
        let comm = x.mul(&y).sub(&y.mul(&x));
        assert!(comm.trace().is_zero());
    }

    #[test]
    fn displayed_entries() {
        let (x, y) = (build_x(), build_y());
        assert_eq!(*x.entry(0, 0), v("x11"));
        assert!(x.entry(0, 1).is_zero());
        let d = v("y11").add(&v("y22")).unwrap().add(&v("y33")).unwrap().neg();
        assert_eq!(*y.entry(3, 3), d);
        assert_eq!(*y.entry(0, 3), v("y14"));
    }

    #[test]
    fn small_word_traces() {
        let g = GenericPair::new();
        let s = v("x11").add(&v("x22")).unwrap().add(&v("x33")).unwrap();
        let expected = ["x11", "x22", "x33"]
            .iter()
            .map(|n| v(n).pow(2))
            .fold(s.pow(2), |a, b| a.add(&b).unwrap());
        assert_eq!(*g.eval_word_trace(&w("xx")).unwrap(), expected);

        let t = v("y11").add(&v("y22")).unwrap().add(&v("y33")).unwrap();
        let expected = [("x11", "y11"), ("x22", "y22"), ("x33", "y33")]
            .iter()
            .map(|(a, b)| v(a).mul(&v(b)).unwrap())
            .fold(s.mul(&t).unwrap(), |a, b| a.add(&b).unwrap());
        assert_eq!(*g.eval_word_trace(&w("xy")).unwrap(), expected);

        let a = g.trace_word_uncached(&w("xyxy")).unwrap();
        let b = g.trace_word_uncached(&w("yxyx")).unwrap();
        assert!(a.sub(&b).unwrap().is_zero());
        assert!(matches!(g.eval_word_trace(&w("x")), Err(EvalError::ShortWord(_))));
    }

    #[test]
    fn trace_expr_is_multiplicative() {
        let g = GenericPair::new();
        let e2 = TraceExpr::trace_word(w("xx")).unwrap();
        let f2 = TraceExpr::trace_word(w("yy")).unwrap();
        let lhs = g.eval_trace_expr(&e2.mul(&f2)).unwrap();
        let rhs = g.eval_trace_expr(&e2).unwrap().mul(&g.eval_trace_expr(&f2).unwrap()).unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn commutator_square_is_nonzero_of_bidegree_two_two() {
        let g = GenericPair::new();
        let c = commutator_xy();
        let e = trace_of(&c.mul(&c)).unwrap();
        let p = g.eval_trace_expr(&e).unwrap();
        assert!(!p.is_zero());
        assert_eq!(p.bidegree(0..X_VARS), Some((2, 2)));
    }

    #[test]
    fn cache_is_coherent() {
        let g = GenericPair::new();
        let word = w("yxxyxy");
        let cached = g.eval_word_trace(&word).unwrap();
        let again = g.eval_word_trace(&word.rotate(3)).unwrap();
        assert!(Arc::ptr_eq(&cached, &again));
        assert_eq!(*cached, g.trace_word_uncached(&word).unwrap());
        assert_eq!(g.word_evaluations(), 1);
        let e = trace_of(&NcPoly::word(word)).unwrap();
        assert_eq!(g.eval_trace_expr(&e).unwrap(), *cached);
    }
}
