//! Words in two letters, noncommutative polynomials and pure trace
//! polynomials in cyclic-canonical form, with the polarization derivations
//! and the unitriangular substitutions acting on them.

use std::collections::BTreeMap;
use std::fmt;

use crate::polyring::Rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Letter {
    X,
    Y,
}

impl Letter {
    pub fn as_char(self) -> char {
        match self {
            Letter::X => 'x',
            Letter::Y => 'y',
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TraceError {
    #[error("tr({0}) has a length-1 argument; tr(x) = tr(y) = 0 must be applied explicitly")]
    TracelessViolation(Word),
    #[error("trace of a constant word is not an element of the traceless algebra")]
    ConstantTrace,
    #[error("invalid word `{0}`")]
    InvalidWord(String),
}

/// A word over `{x, y}`; the derived order is lexicographic with `x < y`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Word(Vec<Letter>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn new(letters: Vec<Letter>) -> Self {
        Word(letters)
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `(count of x, count of y)`.
    pub fn bidegree(&self) -> (u32, u32) {
        let x = self.0.iter().filter(|&&l| l == Letter::X).count() as u32;
        (x, self.0.len() as u32 - x)
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Word(v)
    }

    /// Rotation moving the first `k` letters to the end.
    pub fn rotate(&self, k: usize) -> Word {
        if self.0.is_empty() {
            return self.clone();
        }
        let mut v = self.0.clone();
        v.rotate_left(k % self.0.len());
        Word(v)
    }

    /// Lexicographically least rotation.
    pub fn cyclic_normalize(&self) -> Word {
        (1..self.0.len()).map(|k| self.rotate(k)).fold(self.clone(), |best, w| if w < best { w } else { best })
    }

    pub fn is_cyclic_canonical(&self) -> bool {
        *self == self.cyclic_normalize()
    }

    /// Word with exponents compressed, e.g. `x^2yx`.
    pub fn to_grammar(&self) -> String {
        let mut s = String::new();
        let mut i = 0;
        while i < self.0.len() {
            let l = self.0[i];
            let mut j = i;
            while j < self.0.len() && self.0[j] == l {
                j += 1;
            }
            s.push(l.as_char());
            if j - i > 1 {
                s.push_str(&format!("^{}", j - i));
            }
            i = j;
        }
        s
    }
}

impl std::str::FromStr for Word {
    type Err = TraceError;

    /// Plain letter strings such as `xyy`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.chars()
            .map(|c| match c {
                'x' => Ok(Letter::X),
                'y' => Ok(Letter::Y),
                _ => Err(TraceError::InvalidWord(s.to_string())),
            })
            .collect::<Result<Vec<_>, _>>()
            .map(Word)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        for l in &self.0 {
            write!(f, "{}", l.as_char())?;
        }
        Ok(())
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

fn add_into<K: Ord>(map: &mut BTreeMap<K, Rational>, k: K, c: Rational) {
    if c.is_zero() {
        return;
    }
    match map.entry(k) {
        std::collections::btree_map::Entry::Occupied(mut e) => {
            *e.get_mut() += c;
            if e.get().is_zero() {
                e.remove();
            }
        }
        std::collections::btree_map::Entry::Vacant(e) => {
            e.insert(c);
        }
    }
}

/// Element of the free associative algebra `Q<x, y>`.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct NcPoly(BTreeMap<Word, Rational>);

impl NcPoly {
    pub fn zero() -> Self {
        NcPoly::default()
    }

    pub fn one() -> Self {
        Self::word(Word::empty())
    }

    pub fn word(w: Word) -> Self {
        let mut m = BTreeMap::new();
        m.insert(w, Rational::one());
        NcPoly(m)
    }

    pub fn x() -> Self {
        Self::word(Word(vec![Letter::X]))
    }

    pub fn y() -> Self {
        Self::word(Word(vec![Letter::Y]))
    }

    pub fn letter(l: Letter) -> Self {
        Self::word(Word(vec![l]))
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Word, &Rational)> {
        self.0.iter()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn coeff(&self, w: &Word) -> Rational {
        self.0.get(w).cloned().unwrap_or_default()
    }

    pub fn add_term(&mut self, w: Word, c: Rational) {
        add_into(&mut self.0, w, c);
    }

    pub fn add(&self, other: &NcPoly) -> NcPoly {
        let mut out = self.clone();
        for (w, c) in &other.0 {
            out.add_term(w.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &NcPoly) -> NcPoly {
        self.add(&other.scale(&-Rational::one()))
    }

    pub fn scale(&self, c: &Rational) -> NcPoly {
        if c.is_zero() {
            return NcPoly::zero();
        }
        NcPoly(self.0.iter().map(|(w, v)| (w.clone(), v * c)).collect())
    }

    /// Concatenation product.
    pub fn mul(&self, other: &NcPoly) -> NcPoly {
        let mut out = NcPoly::zero();
        for (a, ca) in &self.0 {
            for (b, cb) in &other.0 {
                out.add_term(a.concat(b), ca * cb);
            }
        }
        out
    }

    pub fn pow(&self, e: u32) -> NcPoly {
        (0..e).fold(NcPoly::one(), |acc, _| acc.mul(self))
    }

    /// `[a, b] = ab - ba`.
    pub fn commutator(a: &NcPoly, b: &NcPoly) -> NcPoly {
        a.mul(b).sub(&b.mul(a))
    }

    fn derivation(&self, from: Letter, to: Letter) -> NcPoly {
        let mut out = NcPoly::zero();
        for (w, c) in &self.0 {
            for (pos, &l) in w.letters().iter().enumerate() {
                if l == from {
                    let mut nw = w.letters().to_vec();
                    nw[pos] = to;
                    out.add_term(Word(nw), c.clone());
                }
            }
        }
        out
    }

    /// `x ↦ 0`, `y ↦ x`, extended by the Leibniz rule.
    pub fn delta(&self) -> NcPoly {
        self.derivation(Letter::Y, Letter::X)
    }

    /// `x ↦ y`, `y ↦ 0`, extended by the Leibniz rule.
    pub fn delta1(&self) -> NcPoly {
        self.derivation(Letter::X, Letter::Y)
    }
}

impl fmt::Display for NcPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "0");
        }
        for (k, (w, c)) in self.0.iter().enumerate() {
            write_signed(f, k == 0, c, &w.to_grammar(), w.is_empty())?;
        }
        Ok(())
    }
}

impl fmt::Debug for NcPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

fn write_signed(f: &mut fmt::Formatter<'_>, first: bool, c: &Rational, body: &str, bare: bool) -> fmt::Result {
    let neg = c.is_negative();
    let a = c.abs();
    if !first {
        write!(f, "{}", if neg { " - " } else { " + " })?;
    } else if neg {
        write!(f, "-")?;
    }
    if bare {
        write!(f, "{a}")
    } else if a.is_one() {
        write!(f, "{body}")
    } else {
        write!(f, "{a}*{body}")
    }
}

/// Product of traces of cyclic-canonical words of length at least two,
/// kept as a sorted multiset. The empty product is the constant 1.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct TraceMonomial(Vec<Word>);

impl TraceMonomial {
    pub fn one() -> Self {
        TraceMonomial(Vec::new())
    }

    /// Normalizes each factor and sorts the multiset.
    pub fn new(words: impl IntoIterator<Item = Word>) -> Result<Self, TraceError> {
        let mut v = Vec::new();
        for w in words {
            match w.len() {
                0 => return Err(TraceError::ConstantTrace),
                1 => return Err(TraceError::TracelessViolation(w)),
                _ => v.push(w.cyclic_normalize()),
            }
        }
        v.sort();
        Ok(TraceMonomial(v))
    }

    pub fn factors(&self) -> &[Word] {
        &self.0
    }

    pub fn mul(&self, other: &TraceMonomial) -> TraceMonomial {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        v.sort();
        TraceMonomial(v)
    }

    pub fn bidegree(&self) -> (u32, u32) {
        self.0.iter().map(Word::bidegree).fold((0, 0), |a, b| (a.0 + b.0, a.1 + b.1))
    }

    /// Trace-grammar rendering such as `tr(x^2)^2*tr(xy)`; empty for the unit.
    pub fn to_grammar(&self) -> String {
        let mut parts = Vec::new();
        let mut i = 0;
        while i < self.0.len() {
            let mut j = i;
            while j < self.0.len() && self.0[j] == self.0[i] {
                j += 1;
            }
            let base = format!("tr({})", self.0[i].to_grammar());
            parts.push(if j - i > 1 { format!("{base}^{}", j - i) } else { base });
            i = j;
        }
        parts.join("*")
    }
}

impl fmt::Debug for TraceMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            write!(f, "1")
        } else {
            write!(f, "{}", self.to_grammar())
        }
    }
}

/// Result of [`TraceExpr::bidegree`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Bidegree {
    Homogeneous(u32, u32),
    NotHomogeneous,
    /// The zero expression, homogeneous of every bidegree.
    Zero,
}

/// Rational linear combination of trace monomials (an element of the pure
/// trace algebra, modulo cyclic invariance only).
#[derive(Clone, PartialEq, Eq, Default)]
pub struct TraceExpr(BTreeMap<TraceMonomial, Rational>);

impl TraceExpr {
    pub fn zero() -> Self {
        TraceExpr::default()
    }

    pub fn one() -> Self {
        Self::monomial(TraceMonomial::one())
    }

    pub fn monomial(m: TraceMonomial) -> Self {
        let mut map = BTreeMap::new();
        map.insert(m, Rational::one());
        TraceExpr(map)
    }

    /// `tr(w)` for a single word.
    pub fn trace_word(w: Word) -> Result<Self, TraceError> {
        Ok(Self::monomial(TraceMonomial::new([w])?))
    }

    pub fn terms(&self) -> impl Iterator<Item = (&TraceMonomial, &Rational)> {
        self.0.iter()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn coeff(&self, m: &TraceMonomial) -> Rational {
        self.0.get(m).cloned().unwrap_or_default()
    }

    pub fn add_term(&mut self, m: TraceMonomial, c: Rational) {
        add_into(&mut self.0, m, c);
    }

    pub fn add(&self, other: &TraceExpr) -> TraceExpr {
        let mut out = self.clone();
        out.add_scaled_assign(other, &Rational::one());
        out
    }

    pub fn sub(&self, other: &TraceExpr) -> TraceExpr {
        let mut out = self.clone();
        out.add_scaled_assign(other, &-Rational::one());
        out
    }

    pub fn add_scaled_assign(&mut self, other: &TraceExpr, c: &Rational) {
        if c.is_zero() {
            return;
        }
        for (m, v) in &other.0 {
            self.add_term(m.clone(), v * c);
        }
    }

    pub fn scale(&self, c: &Rational) -> TraceExpr {
        if c.is_zero() {
            return TraceExpr::zero();
        }
        TraceExpr(self.0.iter().map(|(m, v)| (m.clone(), v * c)).collect())
    }

    /// Product of trace polynomials.
    pub fn mul(&self, other: &TraceExpr) -> TraceExpr {
        let mut out = TraceExpr::zero();
        for (a, ca) in &self.0 {
            for (b, cb) in &other.0 {
                out.add_term(a.mul(b), ca * cb);
            }
        }
        out
    }

    pub fn pow(&self, e: u32) -> TraceExpr {
        (0..e).fold(TraceExpr::one(), |acc, _| acc.mul(self))
    }

    pub fn bidegree(&self) -> Bidegree {
        let mut it = self.0.keys().map(TraceMonomial::bidegree);
        let Some(first) = it.next() else {
            return Bidegree::Zero;
        };
        if it.all(|d| d == first) {
            Bidegree::Homogeneous(first.0, first.1)
        } else {
            Bidegree::NotHomogeneous
        }
    }

    /// Extends a word-level derivation (`from ↦ to`, other letter ↦ 0) to
    /// trace polynomials by the Leibniz rule.
    fn derivation(&self, from: Letter, to: Letter) -> TraceExpr {
        let mut out = TraceExpr::zero();
        for (m, c) in &self.0 {
            let factors = m.factors();
            for (k, w) in factors.iter().enumerate() {
                for (pos, &l) in w.letters().iter().enumerate() {
                    if l != from {
                        continue;
                    }
                    let mut nw = w.letters().to_vec();
                    nw[pos] = to;
                    let mut fs = factors.to_vec();
                    fs[k] = Word(nw);
                    let mono = TraceMonomial::new(fs).expect("lengths are preserved");
                    out.add_term(mono, c.clone());
                }
            }
        }
        out
    }

    /// The raising derivation: `x ↦ 0`, `y ↦ x`.
    pub fn delta(&self) -> TraceExpr {
        self.derivation(Letter::Y, Letter::X)
    }

    /// The lowering derivation: `x ↦ y`, `y ↦ 0`.
    pub fn delta1(&self) -> TraceExpr {
        self.derivation(Letter::X, Letter::Y)
    }

    /// Substitutes `from ↦ x + y` letterwise and expands.
    fn substitute(&self, from: Letter) -> TraceExpr {
        let mut word_images: BTreeMap<Word, TraceExpr> = BTreeMap::new();
        let mut out = TraceExpr::zero();
        for (m, c) in &self.0 {
            let mut acc = TraceExpr::one().scale(c);
            for w in m.factors() {
                let img = word_images.entry(w.clone()).or_insert_with(|| {
                    let sum = NcPoly::x().add(&NcPoly::y());
                    let nc = w.letters().iter().fold(NcPoly::one(), |p, &l| {
                        p.mul(&if l == from { sum.clone() } else { NcPoly::letter(l) })
                    });
                    trace_of(&nc).expect("lengths are preserved")
                });
                acc = acc.mul(img);
            }
            out.add_scaled_assign(&acc, &Rational::one());
        }
        out
    }

    /// `h`: `x ↦ x`, `y ↦ x + y`.
    pub fn subst_h(&self) -> TraceExpr {
        self.substitute(Letter::Y)
    }

    /// `h1`: `x ↦ x + y`, `y ↦ y`.
    pub fn subst_h1(&self) -> TraceExpr {
        self.substitute(Letter::X)
    }

    /// Homogeneous component of the given bidegree.
    pub fn component(&self, p: u32, q: u32) -> TraceExpr {
        TraceExpr(self.0.iter().filter(|(m, _)| m.bidegree() == (p, q)).map(|(m, c)| (m.clone(), c.clone())).collect())
    }

    /// Rendering in the trace grammar accepted by [`crate::syntax::parse_trace`].
    pub fn to_grammar(&self) -> String {
        if self.0.is_empty() {
            return "0".into();
        }
        let mut s = String::new();
        for (k, (m, c)) in self.0.iter().enumerate() {
            let body = m.to_grammar();
            let neg = c.is_negative();
            let a = c.abs();
            if k > 0 {
                s.push_str(if neg { " - " } else { " + " });
            } else if neg {
                s.push('-');
            }
            if body.is_empty() {
                s.push_str(&a.to_string());
            } else if a.is_one() {
                s.push_str(&body);
            } else {
                s.push_str(&format!("{a}*{body}"));
            }
        }
        s
    }
}

impl fmt::Display for TraceExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_grammar())
    }
}

impl fmt::Debug for TraceExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// `tr(a)`, merging words in the same rotation class.
pub fn trace_of(a: &NcPoly) -> Result<TraceExpr, TraceError> {
    let mut out = TraceExpr::zero();
    for (w, c) in a.terms() {
        out.add_term(TraceMonomial::new([w.clone()])?, c.clone());
    }
    Ok(out)
}

/// `[x, y] = xy - yx`.
pub fn commutator_xy() -> NcPoly {
    NcPoly::commutator(&NcPoly::x(), &NcPoly::y())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn w(s: &str) -> Word {
        s.parse().unwrap()
    }

    fn tr(s: &str) -> TraceExpr {
        TraceExpr::trace_word(w(s)).unwrap()
    }

    fn q(n: i64) -> Rational {
        Rational::from_integer(n)
    }

    #[test]
    fn cyclic_normalize_examples() {
        assert_eq!(w("yxy").cyclic_normalize(), w("xyy"));
        assert_eq!(w("xxxx").cyclic_normalize(), w("xxxx"));
        assert_eq!(w("xyxy").cyclic_normalize(), w("xyxy"));
        assert_eq!(w("yxyx").cyclic_normalize(), w("xyxy"));
    }

    #[test]
    fn commutator_square() {
        let c = commutator_xy();
        let sq = c.mul(&c);
        let mut expected = NcPoly::zero();
        expected.add_term(w("xyxy"), q(1));
        expected.add_term(w("xyyx"), q(-1));
        expected.add_term(w("yxxy"), q(-1));
        expected.add_term(w("yxyx"), q(1));
        assert_eq!(sq, expected);
        assert_eq!(c.mul(&NcPoly::one()), c);
    }

    #[test]
    fn commutator_cube_by_brute_force() {
        // expand (xy - yx)^3 by choosing one of the two words in each factor
        let mut oracle: BTreeMap<Word, i64> = BTreeMap::new();
        for mask in 0..8u32 {
            let mut letters = Vec::new();
            let mut sign = 1;
            for k in 0..3 {
                if mask >> k & 1 == 0 {
                    letters.extend([Letter::X, Letter::Y]);
                } else {
                    letters.extend([Letter::Y, Letter::X]);
                    sign = -sign;
                }
            }
            *oracle.entry(Word(letters)).or_default() += sign;
        }
        let cube = commutator_xy().pow(3);
        assert_eq!(cube.len(), 8);
        for (word, c) in cube.terms() {
            assert_eq!(*c, q(oracle[word]));
            assert!(*c == q(1) || *c == q(-1));
        }
    }

    #[test]
    fn trace_of_merges_rotations() {
        let e = trace_of(&NcPoly::word(w("xy")).add(&NcPoly::word(w("yx")))).unwrap();
        assert_eq!(e, tr("xy").scale(&q(2)));
        let c = commutator_xy();
        let e = trace_of(&c.mul(&c)).unwrap();
        assert_eq!(e, tr("xyxy").scale(&q(2)).sub(&tr("xxyy").scale(&q(2))));
        assert_eq!(
            tr("xx").mul(&tr("yy")),
            TraceExpr::monomial(TraceMonomial::new([w("xx"), w("yy")]).unwrap())
        );
    }

    #[test]
    fn traceless_violations() {
        assert_eq!(trace_of(&NcPoly::x()), Err(TraceError::TracelessViolation(w("x"))));
        assert_eq!(trace_of(&NcPoly::one()), Err(TraceError::ConstantTrace));
    }

    #[test]
    fn derivation_examples() {
        assert_eq!(tr("xy").delta(), tr("xx"));
        assert_eq!(tr("xx").delta1(), tr("xy").scale(&q(2)));
        let c = commutator_xy();
        let e = trace_of(&c.mul(&c)).unwrap();
        assert!(e.delta().is_zero());
    }

    #[test]
    fn substitution_examples() {
        assert_eq!(tr("xx").subst_h(), tr("xx"));
        assert_eq!(tr("xy").subst_h(), tr("xx").add(&tr("xy")));
        let c = commutator_xy();
        let e = trace_of(&c.mul(&c)).unwrap();
        assert_eq!(e.subst_h(), e);
        assert_eq!(tr("yy").subst_h1(), tr("yy"));
    }

    #[test]
    fn bidegrees() {
        assert_eq!(tr("xy").bidegree(), Bidegree::Homogeneous(1, 1));
        assert_eq!(tr("xx").add(&tr("xy")).bidegree(), Bidegree::NotHomogeneous);
        let c = commutator_xy();
        let e = trace_of(&c.pow(3).mul(&NcPoly::x().pow(2))).unwrap();
        assert_eq!(e.bidegree(), Bidegree::Homogeneous(5, 3));
        assert_eq!(TraceExpr::zero().bidegree(), Bidegree::Zero);
    }

    fn arb_word(max: usize) -> impl Strategy<Value = Word> {
        prop::collection::vec(prop_oneof![Just(Letter::X), Just(Letter::Y)], 2..=max).prop_map(Word)
    }

    fn arb_bihomogeneous(p: u32, q: u32) -> impl Strategy<Value = TraceExpr> {
        // random products of traces whose letters are a shuffle of x^p y^q, split into factors
        let letters: Vec<Letter> =
            std::iter::repeat_n(Letter::X, p as usize).chain(std::iter::repeat_n(Letter::Y, q as usize)).collect();
        let n = letters.len();
        prop::collection::vec((Just(letters).prop_shuffle(), prop::collection::vec(any::<bool>(), n), -3i64..4), 1..4)
            .prop_map(move |terms| {
                let mut e = TraceExpr::zero();
                for (ls, cuts, c) in terms {
                    let mut words = Vec::new();
                    let mut cur = Vec::new();
                    for (i, l) in ls.into_iter().enumerate() {
                        cur.push(l);
                        if cur.len() >= 2 && cuts[i] && n - i - 1 >= 2 {
                            words.push(Word(std::mem::take(&mut cur)));
                        }
                    }
                    words.push(Word(cur));
                    e.add_term(TraceMonomial::new(words).unwrap(), Rational::from_integer(c));
                }
                e
            })
    }

    proptest! {
        #[test]
        fn normalization_rotation_invariant(word in arb_word(12), k in 0usize..12) {
            let n = word.cyclic_normalize();
            prop_assert_eq!(n.cyclic_normalize(), n.clone());
            prop_assert_eq!(word.rotate(k).cyclic_normalize(), n);
        }

        #[test]
        fn derivations_obey_leibniz(a in arb_bihomogeneous(2, 2), b in arb_bihomogeneous(3, 1)) {
            prop_assert_eq!(a.mul(&b).delta(), a.delta().mul(&b).add(&a.mul(&b.delta())));
            prop_assert_eq!(a.mul(&b).delta1(), a.delta1().mul(&b).add(&a.mul(&b.delta1())));
        }

        #[test]
        fn derivations_shift_bidegree(a in arb_bihomogeneous(3, 2)) {
            let d = a.delta();
            prop_assert!(matches!(d.bidegree(), Bidegree::Homogeneous(4, 1) | Bidegree::Zero));
            let d1 = a.delta1();
            prop_assert!(matches!(d1.bidegree(), Bidegree::Homogeneous(2, 3) | Bidegree::Zero));
        }
    }
}
