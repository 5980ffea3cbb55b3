use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;
use rustc_hash::FxHashMap;

use super::{PolyError, Rational};

/// Maximum number of variables a [`VarSet`] may hold.
pub const MAX_VARS: usize = 18;
const BITS: u32 = 7;
const MASK: u128 = (1 << BITS) - 1;
/// Largest exponent a single variable may carry.
pub const MAX_EXPONENT: u32 = MASK as u32;

/// Ordered, immutable list of variable names.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct VarSet {
    names: Vec<String>,
}

impl VarSet {
    pub fn new<S: Into<String>>(names: impl IntoIterator<Item = S>) -> Result<Arc<Self>, PolyError> {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        if names.len() > MAX_VARS {
            return Err(PolyError::TooManyVariables(names.len()));
        }
        for (i, n) in names.iter().enumerate() {
            if names[..i].contains(n) {
                return Err(PolyError::DuplicateVariable(n.clone()));
            }
        }
        Ok(Arc::new(VarSet { names }))
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }
}

/// Exponent vector packed seven bits per variable, variable 0 in the most
/// significant slot. Multiplication of monomials is integer addition, and
/// comparing packed values of equal total degree is lexicographic order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Monomial(u128);

impl Monomial {
    pub const ONE: Monomial = Monomial(0);

    fn shift(var: usize) -> u32 {
        (MAX_VARS - 1 - var) as u32 * BITS
    }

    pub fn var(var: usize) -> Self {
        Monomial(1u128 << Self::shift(var))
    }

    pub fn from_exponents(exps: &[u32]) -> Result<Self, PolyError> {
        if exps.len() > MAX_VARS {
            return Err(PolyError::TooManyVariables(exps.len()));
        }
        let mut packed = 0u128;
        for (v, &e) in exps.iter().enumerate() {
            if e > MAX_EXPONENT {
                return Err(PolyError::ExponentOverflow);
            }
            packed |= (e as u128) << Self::shift(v);
        }
        Ok(Monomial(packed))
    }

    pub fn exponent(self, var: usize) -> u32 {
        ((self.0 >> Self::shift(var)) & MASK) as u32
    }

    pub fn exponents(self, nvars: usize) -> Vec<u32> {
        (0..nvars).map(|v| self.exponent(v)).collect()
    }

    pub fn degree(self) -> u32 {
        (0..MAX_VARS).map(|v| self.exponent(v)).sum()
    }

    /// Degree restricted to the variables in `range`.
    pub fn partial_degree(self, range: std::ops::Range<usize>) -> u32 {
        range.map(|v| self.exponent(v)).sum()
    }

    /// Product of monomials. Callers keep per-variable exponents within
    /// [`MAX_EXPONENT`] (total degrees here never exceed a few dozen).
    #[inline]
    pub fn mul(self, other: Monomial) -> Monomial {
        Monomial(self.0 + other.0)
    }

    pub fn packed(self) -> u128 {
        self.0
    }

    /// Graded-lexicographic comparison (total degree first).
    pub fn grlex_cmp(&self, other: &Monomial) -> std::cmp::Ordering {
        self.degree().cmp(&other.degree()).then(self.0.cmp(&other.0))
    }
}

/// Sparse polynomial with exact rational coefficients over a fixed [`VarSet`].
#[derive(Clone)]
pub struct CommPoly {
    vars: Arc<VarSet>,
    terms: FxHashMap<Monomial, Rational>,
}

impl PartialEq for CommPoly {
    fn eq(&self, other: &Self) -> bool {
        self.vars == other.vars && self.terms == other.terms
    }
}

impl Eq for CommPoly {}

impl CommPoly {
    pub fn zero(vars: &Arc<VarSet>) -> Self {
        CommPoly { vars: vars.clone(), terms: FxHashMap::default() }
    }

    pub fn constant(vars: &Arc<VarSet>, c: Rational) -> Self {
        let mut p = Self::zero(vars);
        p.add_term(Monomial::ONE, c);
        p
    }

    pub fn one(vars: &Arc<VarSet>) -> Self {
        Self::constant(vars, Rational::one())
    }

    pub fn var(vars: &Arc<VarSet>, index: usize) -> Self {
        assert!(index < vars.len(), "variable index out of range");
        let mut p = Self::zero(vars);
        p.add_term(Monomial::var(index), Rational::one());
        p
    }

    /// Variable looked up by name; panics on an unknown name.
    pub fn named(vars: &Arc<VarSet>, name: &str) -> Self {
        let i = vars.index_of(name).unwrap_or_else(|| panic!("unknown variable {name}"));
        Self::var(vars, i)
    }

    pub fn from_terms(vars: &Arc<VarSet>, terms: impl IntoIterator<Item = (Monomial, Rational)>) -> Self {
        let mut p = Self::zero(vars);
        for (m, c) in terms {
            p.add_term(m, c);
        }
        p
    }

    pub fn vars(&self) -> &Arc<VarSet> {
        &self.vars
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, m: &Monomial) -> Rational {
        self.terms.get(m).cloned().unwrap_or_default()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    /// Terms in graded-lex descending order.
    pub fn sorted_terms(&self) -> Vec<(Monomial, Rational)> {
        let mut v: Vec<_> = self.terms.iter().map(|(m, c)| (*m, c.clone())).collect();
        v.sort_by(|a, b| b.0.grlex_cmp(&a.0));
        v
    }

    pub fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::hash_map::Entry::Occupied(mut e) => {
                *e.get_mut() += &c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
            std::collections::hash_map::Entry::Vacant(e) => {
                e.insert(c);
            }
        }
    }

    fn check_vars(&self, other: &CommPoly) -> Result<(), PolyError> {
        if Arc::ptr_eq(&self.vars, &other.vars) || self.vars == other.vars {
            Ok(())
        } else {
            Err(PolyError::VarSetMismatch)
        }
    }

    pub fn add(&self, other: &CommPoly) -> Result<CommPoly, PolyError> {
        self.check_vars(other)?;
        let mut out = self.clone();
        out.add_scaled_assign(other, &Rational::one());
        Ok(out)
    }

    pub fn sub(&self, other: &CommPoly) -> Result<CommPoly, PolyError> {
        self.check_vars(other)?;
        let mut out = self.clone();
        out.add_scaled_assign(other, &-Rational::one());
        Ok(out)
    }

    /// `self += c * other`; panics if the variable sets differ.
    pub fn add_scaled_assign(&mut self, other: &CommPoly, c: &Rational) {
        self.check_vars(other).expect("variable sets differ");
        if c.is_zero() {
            return;
        }
        for (m, v) in &other.terms {
            let t = if c.is_one() { v.clone() } else { v * c };
            self.add_term(*m, t);
        }
    }

    pub fn scale(&self, c: &Rational) -> CommPoly {
        if c.is_zero() {
            return CommPoly::zero(&self.vars);
        }
        CommPoly {
            vars: self.vars.clone(),
            terms: self.terms.iter().map(|(m, v)| (*m, v * c)).collect(),
        }
    }

    pub fn neg(&self) -> CommPoly {
        self.scale(&-Rational::one())
    }

    pub fn mul(&self, other: &CommPoly) -> Result<CommPoly, PolyError> {
        self.check_vars(other)?;
        let (small, large) = if self.len() <= other.len() { (self, other) } else { (other, self) };
        // Large products are split over the shorter factor and merged; exact
        // addition makes the result independent of the split.
        if small.len() * large.len() < 1 << 16 || small.len() < 4 {
            return Ok(Self::mul_serial(small.terms.iter(), large));
        }
        let left: Vec<_> = small.terms.iter().collect();
        let chunk = left.len().div_ceil(rayon::current_num_threads().max(1));
        let parts: Vec<CommPoly> = left
            .par_chunks(chunk.max(1))
            .map(|c| Self::mul_serial(c.iter().copied(), large))
            .collect();
        let mut it = parts.into_iter();
        let mut acc = it.next().unwrap_or_else(|| CommPoly::zero(&self.vars));
        for p in it {
            acc.add_scaled_assign(&p, &Rational::one());
        }
        Ok(acc)
    }

    fn mul_serial<'a>(left: impl Iterator<Item = (&'a Monomial, &'a Rational)>, right: &CommPoly) -> CommPoly {
        let mut out = CommPoly::zero(&right.vars);
        out.terms.reserve(right.len());
        for (ma, ca) in left {
            for (mb, cb) in &right.terms {
                out.add_term(ma.mul(*mb), ca * cb);
            }
        }
        out
    }

    pub fn pow(&self, e: u32) -> CommPoly {
        let mut acc = CommPoly::one(&self.vars);
        for _ in 0..e {
            acc = acc.mul(self).expect("same variable set");
        }
        acc
    }

    /// Largest total degree of a term; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(|m| m.degree()).max()
    }

    /// The common bidegree of all terms when variables are split into
    /// `first` and the rest; `None` when not bihomogeneous or zero.
    pub fn bidegree(&self, first: std::ops::Range<usize>) -> Option<(u32, u32)> {
        let mut out = None;
        for m in self.terms.keys() {
            let p = m.partial_degree(first.clone());
            let q = m.degree() - p;
            match out {
                None => out = Some((p, q)),
                Some(d) if d != (p, q) => return None,
                _ => {}
            }
        }
        out
    }

    /// Canonical text: one term per line, `<num>/<den> e1 ... en`, graded-lex descending.
    pub fn to_canonical_text(&self) -> String {
        let n = self.vars.len();
        let mut s = String::new();
        for (m, c) in self.sorted_terms() {
            s.push_str(&format!("{}/{}", c.numer(), c.denom()));
            for v in 0..n {
                s.push(' ');
                s.push_str(&m.exponent(v).to_string());
            }
            s.push('\n');
        }
        s
    }

    /// Inverse of [`to_canonical_text`](Self::to_canonical_text). Lines starting with `#` are ignored.
    pub fn from_canonical_text(vars: &Arc<VarSet>, text: &str) -> Result<CommPoly, PolyError> {
        let mut p = CommPoly::zero(vars);
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let bad = || PolyError::Parse { line: lineno + 1 };
            let mut fields = line.split_ascii_whitespace();
            let c: Rational = fields.next().ok_or_else(bad)?.parse().map_err(|_| bad())?;
            let exps = fields.map(|f| f.parse::<u32>().map_err(|_| bad())).collect::<Result<Vec<_>, _>>()?;
            if exps.len() != vars.len() {
                return Err(bad());
            }
            let m = Monomial::from_exponents(&exps)?;
            if p.terms.contains_key(&m) || c.is_zero() {
                return Err(bad());
            }
            p.terms.insert(m, c);
        }
        Ok(p)
    }

    /// Sum of absolute values of the coefficients.
    pub fn l1_norm(&self) -> Rational {
        self.terms.values().map(|c| c.abs()).sum()
    }
}

impl fmt::Debug for CommPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for CommPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let names = self.vars.names();
        for (k, (m, c)) in self.sorted_terms().into_iter().enumerate() {
            let neg = c.is_negative();
            let a = c.abs();
            if k > 0 {
                write!(f, "{}", if neg { " - " } else { " + " })?;
            } else if neg {
                write!(f, "-")?;
            }
            let mut factors = Vec::new();
            for (v, name) in names.iter().enumerate() {
                match m.exponent(v) {
                    0 => {}
                    1 => factors.push(name.clone()),
                    e => factors.push(format!("{name}^{e}")),
                }
            }
            if factors.is_empty() {
                write!(f, "{a}")?;
            } else if a.is_one() {
                write!(f, "{}", factors.join("*"))?;
            } else {
                write!(f, "{a}*{}", factors.join("*"))?;
            }
        }
        Ok(())
    }
}
