//! GL₂ bookkeeping: partitions, Schur functions, the twelve generator modules
//! `W_1..W_12` of `G₀`, the free algebra `K[G₀]` on their 30 basis vectors
//! `u_{i,j}`, and the map Φ back to trace polynomials.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::OnceLock;

use serde::Serialize;

use crate::genmat::GenericPair;
use crate::polyring::{BiSeries, Rational};
use crate::tracelang::{commutator_xy, trace_of, NcPoly, TraceExpr, Word};

/// Number of abstract generators `u_{i,j}`.
pub const NGENS: usize = 30;
/// Number of generator modules.
pub const NMODULES: usize = 12;

/// `(λ₁, λ₂)` of `W_1..W_12` in catalog order.
pub const MODULE_PARTITIONS: [(u32, u32); NMODULES] =
    [(2, 0), (3, 0), (4, 0), (2, 2), (3, 2), (4, 2), (3, 3), (4, 3), (5, 3), (4, 4), (6, 3), (5, 5)];

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GlcatError {
    #[error("invalid partition ({0},{1}): need λ₁ ≥ λ₂ ≥ 0")]
    InvalidPartition(i64, i64),
    #[error("generator u{module},{j}: {what} does not match the evaluated oracle")]
    Certification { module: usize, j: usize, what: &'static str },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Partition {
    pub l1: u32,
    pub l2: u32,
}

impl Partition {
    pub fn new(l1: i64, l2: i64) -> Result<Self, GlcatError> {
        if l2 < 0 || l1 < l2 || l1 > u32::MAX as i64 {
            return Err(GlcatError::InvalidPartition(l1, l2));
        }
        Ok(Partition { l1: l1 as u32, l2: l2 as u32 })
    }

    pub fn degree(&self) -> u32 {
        self.l1 + self.l2
    }

    /// `W(λ)` has dimension `λ₁ − λ₂ + 1`.
    pub fn dim(&self) -> u32 {
        self.l1 - self.l2 + 1
    }

    /// The bidegree `(λ₁ + 1, λ₂ − 1)` one step up the weight ladder.
    pub fn raised(&self) -> Option<(u32, u32)> {
        (self.l2 > 0).then(|| (self.l1 + 1, self.l2 - 1))
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.l1, self.l2)
    }
}

impl std::str::FromStr for Partition {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim().trim_start_matches('(').trim_end_matches(')');
        let (a, b) = s.split_once(',').ok_or_else(|| format!("expected `l1,l2`, got `{s}`"))?;
        let a: i64 = a.trim().parse().map_err(|e| format!("{e}"))?;
        let b: i64 = b.trim().parse().map_err(|e| format!("{e}"))?;
        Partition::new(a, b).map_err(|e| e.to_string())
    }
}

/// `S_λ(t,u) = (tu)^{λ₂}(t^{λ₁−λ₂} + ⋯ + u^{λ₁−λ₂})`, truncated to degree `bound`.
pub fn schur(lambda: Partition, bound: u32) -> BiSeries {
    let mut s = BiSeries::zero(bound);
    let a = lambda.l1 - lambda.l2;
    for k in 0..=a {
        s.set(lambda.l2 + a - k, lambda.l2 + k, Rational::one());
    }
    s
}

/// One of the 30 abstract generators, by global index in catalog order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AbsGen(u8);

struct GenTable {
    module: [u8; NGENS],
    j: [u8; NGENS],
    first: [u8; NMODULES],
}

fn table() -> &'static GenTable {
    static T: OnceLock<GenTable> = OnceLock::new();
    T.get_or_init(|| {
        let mut t = GenTable { module: [0; NGENS], j: [0; NGENS], first: [0; NMODULES] };
        let mut g = 0;
        for (i, &(l1, l2)) in MODULE_PARTITIONS.iter().enumerate() {
            t.first[i] = g as u8;
            for j in 0..=(l1 - l2) {
                t.module[g] = (i + 1) as u8;
                t.j[g] = j as u8;
                g += 1;
            }
        }
        assert_eq!(g, NGENS);
        t
    })
}

impl AbsGen {
    pub fn from_index(g: usize) -> Option<Self> {
        (g < NGENS).then_some(AbsGen(g as u8))
    }

    /// `u_{module, j}` with `module` in `1..=12`.
    pub fn new(module: usize, j: usize) -> Option<Self> {
        if !(1..=NMODULES).contains(&module) || j as u32 > module_a(module) {
            return None;
        }
        Some(AbsGen(table().first[module - 1] + j as u8))
    }

    pub fn all() -> impl Iterator<Item = AbsGen> {
        (0..NGENS as u8).map(AbsGen)
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }

    pub fn module(self) -> usize {
        table().module[self.index()] as usize
    }

    pub fn j(self) -> usize {
        table().j[self.index()] as usize
    }

    pub fn a(self) -> u32 {
        module_a(self.module())
    }

    pub fn bidegree(self) -> (u32, u32) {
        let (l1, l2) = MODULE_PARTITIONS[self.module() - 1];
        let j = self.j() as u32;
        (l1 - j, l2 + j)
    }
}

impl fmt::Display for AbsGen {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "u{},{}", self.module(), self.j())
    }
}

/// `a_i = λ₁ − λ₂` of module `i` (1-based).
pub fn module_a(i: usize) -> u32 {
    let (l1, l2) = MODULE_PARTITIONS[i - 1];
    l1 - l2
}

/// `b_i = λ₂` of module `i` (1-based).
pub fn module_b(i: usize) -> u32 {
    MODULE_PARTITIONS[i - 1].1
}

/// A monomial in the 30 generators, as an exponent vector.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct AbsMono([u8; NGENS]);

impl AbsMono {
    pub fn one() -> Self {
        AbsMono([0; NGENS])
    }

    pub fn gen(g: AbsGen) -> Self {
        let mut m = Self::one();
        m.0[g.index()] = 1;
        m
    }

    pub fn from_gens(gens: impl IntoIterator<Item = AbsGen>) -> Self {
        let mut m = Self::one();
        for g in gens {
            m.0[g.index()] += 1;
        }
        m
    }

    pub fn exponent(&self, g: AbsGen) -> u32 {
        self.0[g.index()] as u32
    }

    pub fn exponents(&self) -> &[u8; NGENS] {
        &self.0
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|&e| e as u32).sum()
    }

    pub fn bidegree(&self) -> (u32, u32) {
        AbsGen::all().fold((0, 0), |(p, q), g| {
            let e = self.exponent(g);
            let (gp, gq) = g.bidegree();
            (p + e * gp, q + e * gq)
        })
    }

    /// Generators with repetition, ascending.
    pub fn factors(&self) -> Vec<AbsGen> {
        AbsGen::all().flat_map(|g| std::iter::repeat_n(g, self.exponent(g) as usize)).collect()
    }

    pub fn mul(&self, other: &AbsMono) -> AbsMono {
        let mut m = *self;
        for (a, b) in m.0.iter_mut().zip(other.0.iter()) {
            *a += b;
        }
        m
    }

    pub fn divides(&self, other: &AbsMono) -> bool {
        self.0.iter().zip(other.0.iter()).all(|(a, b)| a <= b)
    }

    /// Number of factors from each module `m_1..m_12`.
    pub fn module_degrees(&self) -> [u8; NMODULES] {
        let mut out = [0; NMODULES];
        for g in AbsGen::all() {
            out[g.module() - 1] += self.0[g.index()];
        }
        out
    }

    fn with_exponent(&self, g: AbsGen, e: u8) -> AbsMono {
        let mut m = *self;
        m.0[g.index()] = e;
        m
    }
}

/// Factor count first, then the ascending factor sequences lexicographically.
impl Ord for AbsMono {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.degree().cmp(&other.degree()).then_with(|| self.factors().cmp(&other.factors()))
    }
}

impl PartialOrd for AbsMono {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl serde::Serialize for AbsMono {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl fmt::Display for AbsMono {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = AbsGen::all()
            .filter(|&g| self.exponent(g) > 0)
            .map(|g| match self.exponent(g) {
                1 => g.to_string(),
                e => format!("{g}^{e}"),
            })
            .collect();
        if parts.is_empty() {
            write!(f, "1")
        } else {
            write!(f, "{}", parts.join("*"))
        }
    }
}

impl fmt::Debug for AbsMono {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Element of `K[G₀]`.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct AbsPoly(BTreeMap<AbsMono, Rational>);

impl AbsPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::monomial(AbsMono::one())
    }

    pub fn monomial(m: AbsMono) -> Self {
        AbsPoly(BTreeMap::from([(m, Rational::one())]))
    }

    pub fn gen(g: AbsGen) -> Self {
        Self::monomial(AbsMono::gen(g))
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (AbsMono, Rational)>) -> Self {
        let mut p = Self::zero();
        for (m, c) in terms {
            p.add_term(m, c);
        }
        p
    }

    pub fn terms(&self) -> impl Iterator<Item = (&AbsMono, &Rational)> {
        self.0.iter()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn coeff(&self, m: &AbsMono) -> Rational {
        self.0.get(m).cloned().unwrap_or_default()
    }

    pub fn add_term(&mut self, m: AbsMono, c: Rational) {
        if c.is_zero() {
            return;
        }
        let slot = self.0.entry(m).or_default();
        *slot += &c;
        if slot.is_zero() {
            self.0.remove(&m);
        }
    }

    pub fn add(&self, other: &AbsPoly) -> AbsPoly {
        let mut out = self.clone();
        for (m, c) in &other.0 {
            out.add_term(*m, c.clone());
        }
        out
    }

    pub fn sub(&self, other: &AbsPoly) -> AbsPoly {
        self.add(&other.scale(&-Rational::one()))
    }

    pub fn scale(&self, c: &Rational) -> AbsPoly {
        if c.is_zero() {
            return AbsPoly::zero();
        }
        AbsPoly(self.0.iter().map(|(m, v)| (*m, v * c)).collect())
    }

    pub fn mul(&self, other: &AbsPoly) -> AbsPoly {
        let mut out = AbsPoly::zero();
        for (a, ca) in &self.0 {
            for (b, cb) in &other.0 {
                out.add_term(a.mul(b), ca * cb);
            }
        }
        out
    }

    /// The common bidegree of all terms, if any.
    pub fn bidegree(&self) -> Option<(u32, u32)> {
        let mut it = self.0.keys().map(AbsMono::bidegree);
        let first = it.next()?;
        it.all(|b| b == first).then_some(first)
    }

    /// Leibniz extension of `u_{i,j} ↦ c(j) · u_{i,j+step}`.
    fn ladder(&self, up: bool) -> AbsPoly {
        let mut out = AbsPoly::zero();
        for (m, c) in &self.0 {
            for g in AbsGen::all() {
                let e = m.exponent(g);
                if e == 0 {
                    continue;
                }
                let (j, a) = (g.j() as u32, g.a());
                let (target, k) = if up {
                    if j == 0 {
                        continue;
                    }
                    (AbsGen::new(g.module(), g.j() - 1).expect("in range"), j)
                } else {
                    if j == a {
                        continue;
                    }
                    (AbsGen::new(g.module(), g.j() + 1).expect("in range"), a - j)
                };
                let lowered = m.with_exponent(g, (e - 1) as u8);
                let nm = lowered.with_exponent(target, lowered.exponent(target) as u8 + 1);
                out.add_term(nm, c * &Rational::from_integer((e * k) as i64));
            }
        }
        out
    }

    /// Raising operator: `Δ(u_{i,j}) = j · u_{i,j−1}`.
    pub fn abs_delta(&self) -> AbsPoly {
        self.ladder(true)
    }

    /// Lowering operator: `Δ₁(u_{i,j}) = (a_i − j) · u_{i,j+1}`.
    pub fn abs_delta1(&self) -> AbsPoly {
        self.ladder(false)
    }

    /// Coefficient vector over a fixed monomial list; `None` if a term falls outside.
    pub fn coordinates(&self, basis: &[AbsMono]) -> Option<Vec<Rational>> {
        let index: BTreeMap<&AbsMono, usize> = basis.iter().enumerate().map(|(i, m)| (m, i)).collect();
        let mut v = vec![Rational::zero(); basis.len()];
        for (m, c) in &self.0 {
            v[*index.get(m)?] = c.clone();
        }
        Some(v)
    }

    pub fn from_coordinates(basis: &[AbsMono], v: &[Rational]) -> AbsPoly {
        AbsPoly::from_terms(basis.iter().copied().zip(v.iter().cloned()))
    }
}

impl fmt::Display for AbsPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "0");
        }
        for (k, (m, c)) in self.0.iter().enumerate() {
            let neg = c.is_negative();
            let a = c.abs();
            if k > 0 {
                write!(f, "{}", if neg { " - " } else { " + " })?;
            } else if neg {
                write!(f, "-")?;
            }
            if a.is_one() {
                write!(f, "{m}")?;
            } else if m.degree() == 0 {
                write!(f, "{a}")?;
            } else {
                write!(f, "{a}*{m}")?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for AbsPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// `e_j = c_j · tr(N_j)` with `N_j = Δ₁^j(N_0)` in the free algebra.
#[derive(Debug, Clone, PartialEq)]
pub struct BasisElement {
    pub nc: NcPoly,
    pub scale: Rational,
    pub expr: TraceExpr,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorModule {
    pub index: usize,
    pub partition: Partition,
    pub a: u32,
    pub b: u32,
    pub hwv: TraceExpr,
    pub basis: Vec<BasisElement>,
}

impl GeneratorModule {
    fn build(index: usize) -> Self {
        let (l1, l2) = MODULE_PARTITIONS[index - 1];
        let (a, b) = (l1 - l2, l2);
        let comm = commutator_xy();
        let x = NcPoly::x();
        let n0 = if (l1, l2) == (5, 5) {
            let w = |s: &str| NcPoly::word(s.parse::<Word>().expect("valid word"));
            let tail = w("xxyy").sub(&w("xyyx")).sub(&w("yxxy")).add(&w("yyxx"));
            comm.pow(3).mul(&tail)
        } else {
            comm.pow(b).mul(&x.pow(a))
        };
        let mut basis = Vec::with_capacity(a as usize + 1);
        let mut nc = n0;
        let mut falling = Rational::one();
        for j in 0..=a {
            if j > 0 {
                nc = nc.delta1();
                falling *= Rational::from_integer((a - j + 1) as i64);
            }
            let scale = falling.recip();
            let expr = trace_of(&nc).expect("no short words").scale(&scale);
            basis.push(BasisElement { nc: nc.clone(), scale, expr });
        }
        GeneratorModule { index, partition: Partition { l1, l2 }, a, b, hwv: basis[0].expr.clone(), basis }
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// `e_j` in the trace grammar, kept factored as `c*tr(N_j)`.
    pub fn basis_grammar(&self, j: usize) -> String {
        let e = &self.basis[j];
        let body = format!("tr({})", nc_grammar(&e.nc));
        if e.scale.is_one() {
            body
        } else {
            format!("{}*{body}", e.scale)
        }
    }
}

/// An NcPoly as a parenthesized sum of words, usable inside `tr(...)`.
pub fn nc_grammar(p: &NcPoly) -> String {
    let terms: Vec<(String, Rational)> = p.terms().map(|(w, c)| (w.to_grammar(), c.clone())).collect();
    if terms.len() == 1 && terms[0].1.is_one() {
        return terms[0].0.clone();
    }
    let mut s = String::from("(");
    for (k, (w, c)) in terms.iter().enumerate() {
        let neg = c.is_negative();
        let a = c.abs();
        if k > 0 {
            s.push_str(if neg { " - " } else { " + " });
        } else if neg {
            s.push('-');
        }
        if !a.is_one() {
            s.push_str(&format!("{a}*"));
        }
        s.push_str(w);
    }
    s.push(')');
    s
}

pub struct Catalog {
    modules: Vec<GeneratorModule>,
}

impl Catalog {
    /// Builds the modules and certifies the ladder constants
    /// `Δ e_j = j e_{j−1}` and `Δ₁ e_j = (a − j) e_{j+1}` by evaluation.
    pub fn build(pair: &GenericPair) -> Result<Catalog, GlcatError> {
        let modules: Vec<GeneratorModule> = (1..=NMODULES).map(GeneratorModule::build).collect();
        for m in &modules {
            certify(pair, m)?;
        }
        Ok(Catalog { modules })
    }

    pub fn modules(&self) -> &[GeneratorModule] {
        &self.modules
    }

    pub fn module(&self, i: usize) -> &GeneratorModule {
        &self.modules[i - 1]
    }

    pub fn basis_expr(&self, g: AbsGen) -> &TraceExpr {
        &self.module(g.module()).basis[g.j()].expr
    }

    /// Φ: `u_{i,j} ↦ e_j` of `W_i`, extended multiplicatively and linearly.
    pub fn phi(&self, p: &AbsPoly) -> TraceExpr {
        let mut out = TraceExpr::zero();
        for (m, c) in p.terms() {
            let img = m.factors().iter().fold(TraceExpr::one(), |acc, &g| acc.mul(self.basis_expr(g)));
            out.add_scaled_assign(&img, c);
        }
        out
    }

    /// Φ(p) in the trace grammar without expanding products of basis elements.
    pub fn phi_grammar(&self, p: &AbsPoly) -> String {
        if p.is_zero() {
            return "0".into();
        }
        let mut s = String::new();
        for (k, (m, c)) in p.terms().enumerate() {
            let mut coeff = c.clone();
            let mut factors = Vec::new();
            for g in m.factors() {
                let e = &self.module(g.module()).basis[g.j()];
                coeff *= &e.scale;
                factors.push(format!("tr({})", nc_grammar(&e.nc)));
            }
            let neg = coeff.is_negative();
            let a = coeff.abs();
            if k > 0 {
                s.push_str(if neg { " - " } else { " + " });
            } else if neg {
                s.push('-');
            }
            if factors.is_empty() {
                s.push_str(&a.to_string());
                continue;
            }
            if !a.is_one() {
                s.push_str(&format!("{a}*"));
            }
            s.push_str(&factors.join("*"));
        }
        s
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::Value::Array(
            self.modules
                .iter()
                .map(|m| {
                    serde_json::json!({
                        "module": m.index,
                        "partition": [m.partition.l1, m.partition.l2],
                        "a": m.a,
                        "b": m.b,
                        "basis": (0..m.dim()).map(|j| serde_json::json!({
                            "generator": format!("u{},{}", m.index, j),
                            "bidegree": [m.a + m.b - j as u32, m.b + j as u32],
                            "trace": m.basis_grammar(j),
                        })).collect::<Vec<_>>(),
                    })
                })
                .collect(),
        )
    }
}

fn certify(pair: &GenericPair, m: &GeneratorModule) -> Result<(), GlcatError> {
    let eval = |e: &TraceExpr| pair.eval_trace_expr(e).expect("generator words have length ≥ 2");
    let evals: Vec<_> = m.basis.iter().map(|e| eval(&e.expr)).collect();
    let fail = |j: usize, what| GlcatError::Certification { module: m.index, j, what };
    for (j, e) in m.basis.iter().enumerate() {
        let (p, q) = (m.a + m.b - j as u32, m.b + j as u32);
        if e.expr.bidegree() != crate::tracelang::Bidegree::Homogeneous(p, q) {
            return Err(fail(j, "bidegree"));
        }
        if evals[j].is_zero() {
            return Err(fail(j, "nonvanishing"));
        }
        let up = eval(&e.expr.delta());
        let want = if j == 0 { None } else { Some(evals[j - 1].scale(&Rational::from_integer(j as i64))) };
        if !want.map_or(up.is_zero(), |w| w == up) {
            return Err(fail(j, "Δ constant"));
        }
        let down = eval(&e.expr.delta1());
        let want = evals.get(j + 1).map(|w| w.scale(&Rational::from_integer((m.a - j as u32) as i64)));
        if !want.map_or(down.is_zero(), |w| w == down) {
            return Err(fail(j, "Δ₁ constant"));
        }
    }
    Ok(())
}

/// The certified catalog, built on first use.
pub fn catalog() -> &'static Catalog {
    static CAT: OnceLock<Catalog> = OnceLock::new();
    CAT.get_or_init(|| Catalog::build(&GenericPair::new()).unwrap_or_else(|e| panic!("catalog certification: {e}")))
}

/// Hilbert series of `K[G₀]` truncated at total degree `bound`.
pub fn hilbert_kg0(bound: u32) -> BiSeries {
    AbsGen::all().fold(BiSeries::one(bound), |acc, g| {
        let (p, q) = g.bidegree();
        acc.mul(&BiSeries::inv_geom(p, q, bound).expect("generators have positive degree")).expect("same bound")
    })
}

fn coeff_at(h: &BiSeries, p: u32, q: u32) -> i64 {
    use num_traits::ToPrimitive;
    h.coeff(p, q).numer().to_i64().expect("Hilbert coefficients are small integers")
}

/// `m(λ) = h(λ₁, λ₂) − h(λ₁ + 1, λ₂ − 1)`.
pub fn multiplicity(lambda: Partition) -> i64 {
    let h = hilbert_kg0(lambda.degree());
    let up = lambda.raised().map_or(0, |(p, q)| coeff_at(&h, p, q));
    coeff_at(&h, lambda.l1, lambda.l2) - up
}

/// All monomials of bidegree `(p, q)`, ascending in the [`AbsMono`] order.
pub fn abs_monomials_bideg(p: u32, q: u32) -> Vec<AbsMono> {
    fn rec(g: usize, p: u32, q: u32, cur: &mut AbsMono, out: &mut Vec<AbsMono>) {
        if p == 0 && q == 0 {
            out.push(*cur);
            return;
        }
        if g == NGENS {
            return;
        }
        let gen = AbsGen(g as u8);
        let (gp, gq) = gen.bidegree();
        let mut e = 0u32;
        while e * gp <= p && e * gq <= q {
            cur.0[g] = e as u8;
            rec(g + 1, p - e * gp, q - e * gq, cur, out);
            e += 1;
        }
        cur.0[g] = 0;
    }
    let mut out = Vec::new();
    rec(0, p, q, &mut AbsMono::one(), &mut out);
    out.sort();
    out
}

/// All monomials of bidegree `λ`.
pub fn abs_monomials(lambda: Partition) -> Vec<AbsMono> {
    abs_monomials_bideg(lambda.l1, lambda.l2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tracelang::Bidegree;

    fn q(n: i64) -> Rational {
        Rational::from_integer(n)
    }

    fn lam(a: i64, b: i64) -> Partition {
        Partition::new(a, b).unwrap()
    }

    fn tr(s: &str) -> TraceExpr {
        TraceExpr::trace_word(s.parse().unwrap()).unwrap()
    }

    fn u(i: usize, j: usize) -> AbsPoly {
        AbsPoly::gen(AbsGen::new(i, j).unwrap())
    }

    #[test]
    fn schur_examples() {
        let s = schur(lam(2, 1), 6);
        assert_eq!(s.terms(), vec![(2, 1, q(1)), (1, 2, q(1))]);
        let s = schur(lam(7, 5), 14);
        assert_eq!(s.terms(), vec![(7, 5, q(1)), (6, 6, q(1)), (5, 7, q(1))]);
        assert_eq!(schur(lam(0, 0), 3), BiSeries::one(3));
        assert!(Partition::new(2, 3).is_err());
    }

    #[test]
    fn generator_inventory() {
        assert_eq!(AbsGen::all().count(), 30);
        let dims: Vec<usize> = (1..=12).map(|i| AbsGen::all().filter(|g| g.module() == i).count()).collect();
        assert_eq!(dims, vec![3, 4, 5, 1, 2, 3, 1, 2, 3, 1, 4, 1]);
        // with W(1,0) restored, per-degree counts of a minimal generating set
        let mut g = [0usize; 11];
        g[1] = 2;
        for gen in AbsGen::all() {
            let (p, q) = gen.bidegree();
            g[(p + q) as usize] += 1;
        }
        assert_eq!(&g[1..], &[2, 3, 4, 6, 2, 4, 2, 4, 4, 1]);
        assert_eq!(AbsGen::new(11, 1).unwrap().bidegree(), (5, 4));
        assert!(AbsGen::new(4, 1).is_none());
    }

    #[test]
    fn w40_basis() {
        let c = catalog();
        let m = c.module(3);
        assert_eq!(m.partition, lam(4, 0));
        let expected = [
            tr("xxxx"),
            tr("xxxy"),
            tr("xxyy").scale(&q(2)).add(&tr("xyxy")).scale(&Rational::new(1, 3)),
            tr("xyyy"),
            tr("yyyy"),
        ];
        for (j, e) in expected.iter().enumerate() {
            assert_eq!(&m.basis[j].expr, e, "e_{j}");
        }
    }

    #[test]
    fn w53_basis() {
        let c = catalog();
        let comm3 = commutator_xy().pow(3);
        let w = |s: &str| NcPoly::word(s.parse().unwrap());
        let e0 = trace_of(&comm3.mul(&w("xx"))).unwrap();
        let e1 = trace_of(&comm3.mul(&w("yx").add(&w("xy")))).unwrap().scale(&Rational::new(1, 2));
        let e2 = trace_of(&comm3.mul(&w("yy"))).unwrap();
        let m = c.module(9);
        assert_eq!(m.basis.iter().map(|b| b.expr.clone()).collect::<Vec<_>>(), vec![e0, e1, e2]);
        assert_eq!(c.module(4).dim(), 1);
        assert_eq!(c.module(4).hwv, trace_of(&commutator_xy().pow(2)).unwrap());
    }

    #[test]
    fn phi_examples() {
        let c = catalog();
        let comm = commutator_xy();
        assert_eq!(c.phi(&u(5, 0)), trace_of(&comm.pow(2).mul(&NcPoly::x())).unwrap());
        let w = |s: &str| NcPoly::word(s.parse().unwrap());
        let sum = w("yxx").add(&w("xyx")).add(&w("xxy"));
        let e = trace_of(&comm.pow(3).mul(&sum)).unwrap().scale(&Rational::new(1, 3));
        assert_eq!(c.phi(&u(11, 1)), e);
        assert_eq!(c.phi(&u(1, 0).mul(&u(1, 2))), tr("xx").mul(&tr("yy")));
    }

    #[test]
    fn bidegrees_of_basis() {
        for m in catalog().modules() {
            for (j, e) in m.basis.iter().enumerate() {
                assert_eq!(e.expr.bidegree(), Bidegree::Homogeneous(m.a + m.b - j as u32, m.b + j as u32));
            }
        }
    }

    #[test]
    fn ladder_examples() {
        assert_eq!(u(1, 1).abs_delta(), u(1, 0));
        assert_eq!(u(1, 2).abs_delta(), u(1, 1).scale(&q(2)));
        assert_eq!(u(1, 0).abs_delta(), AbsPoly::zero());
        assert_eq!(u(1, 0).abs_delta1(), u(1, 1).scale(&q(2)));
        let sq = u(1, 2).mul(&u(1, 2));
        assert_eq!(sq.abs_delta(), u(1, 1).mul(&u(1, 2)).scale(&q(4)));
    }

    #[test]
    fn sl2_weight_on_every_generator() {
        for g in AbsGen::all() {
            let p = AbsPoly::gen(g);
            let comm = p.abs_delta1().abs_delta().sub(&p.abs_delta().abs_delta1());
            let weight = g.a() as i64 - 2 * g.j() as i64;
            assert_eq!(comm, p.scale(&q(weight)), "{g}");
        }
    }

    #[test]
    fn phi_intertwines_ladders() {
        let c = catalog();
        let pair = GenericPair::new();
        for g in AbsGen::all() {
            let p = AbsPoly::gen(g);
            let lhs = pair.eval_trace_expr(&c.phi(&p).delta()).unwrap();
            let rhs = pair.eval_trace_expr(&c.phi(&p.abs_delta())).unwrap();
            assert_eq!(lhs, rhs, "Δ on {g}");
            let lhs = pair.eval_trace_expr(&c.phi(&p).delta1()).unwrap();
            let rhs = pair.eval_trace_expr(&c.phi(&p.abs_delta1())).unwrap();
            assert_eq!(lhs, rhs, "Δ₁ on {g}");
        }
    }

    #[test]
    fn catalog_hwvs_are_fixed_by_h() {
        let pair = GenericPair::new();
        for m in catalog().modules() {
            let v = pair.eval_trace_expr(&m.hwv).unwrap();
            assert!(pair.eval_trace_expr(&m.hwv.delta()).unwrap().is_zero(), "W{}", m.index);
            assert_eq!(pair.eval_trace_expr(&m.hwv.subst_h()).unwrap(), v, "W{}", m.index);
            let last = &m.basis[m.a as usize].expr;
            assert!(pair.eval_trace_expr(&last.delta1()).unwrap().is_zero());
        }
    }

    #[test]
    fn hilbert_and_multiplicities() {
        let h = hilbert_kg0(14);
        assert_eq!(h.coeff(2, 0), q(1));
        assert_eq!(h.coeff(7, 5), q(155));
        assert_eq!(h.coeff(8, 4), q(119));
        assert_eq!(multiplicity(lam(7, 5)), 36);
        assert_eq!(multiplicity(lam(6, 6)), 30);
        assert_eq!(multiplicity(lam(8, 6)), 106);
        assert_eq!(multiplicity(lam(2, 2)), 2);
    }

    /// Independent count: number of exponent vectors over the generator
    /// bidegrees, by dynamic programming over generators.
    fn count_monomials(p: u32, q: u32) -> u64 {
        let (p, q) = (p as usize, q as usize);
        let mut table = vec![vec![0u64; q + 1]; p + 1];
        table[0][0] = 1;
        for g in AbsGen::all() {
            let (gp, gq) = g.bidegree();
            let (gp, gq) = (gp as usize, gq as usize);
            for i in gp..=p {
                for j in gq..=q {
                    table[i][j] += table[i - gp][j - gq];
                }
            }
        }
        table[p][q]
    }

    #[test]
    fn monomial_enumeration() {
        assert_eq!(abs_monomials(lam(2, 0)), vec![AbsMono::gen(AbsGen::new(1, 0).unwrap())]);
        assert_eq!(abs_monomials(lam(7, 5)).len(), 155);
        assert_eq!(abs_monomials_bideg(8, 4).len(), 119);
        for (p, qq) in [(7, 5), (6, 6), (9, 5), (8, 6), (7, 7), (4, 4)] {
            let ms = abs_monomials_bideg(p, qq);
            assert_eq!(ms.len() as u64, count_monomials(p, qq));
            assert!(ms.windows(2).all(|w| w[0] < w[1]));
            assert!(ms.iter().all(|m| m.bidegree() == (p, qq)));
            let h = hilbert_kg0(p + qq);
            assert_eq!(h.coeff(p, qq), Rational::from_integer(ms.len() as i64));
        }
    }

    #[test]
    fn multiplicity_matches_difference_of_counts() {
        for (a, b) in [(7, 5), (6, 6), (8, 5), (7, 6), (9, 5), (8, 6), (7, 7)] {
            let m = multiplicity(lam(a, b));
            let diff = abs_monomials_bideg(a as u32, b as u32).len() as i64
                - abs_monomials_bideg(a as u32 + 1, b as u32 - 1).len() as i64;
            assert_eq!(m, diff);
        }
    }

    #[test]
    fn phi_grammar_reparses_to_phi() {
        let c = catalog();
        let p = u(11, 1).mul(&u(3, 2)).scale(&Rational::new(-3, 5)).add(&u(12, 0));
        let text = c.phi_grammar(&p);
        assert_eq!(crate::syntax::parse_trace(&text).unwrap(), c.phi(&p));
    }

    #[test]
    fn json_lists_twelve_modules() {
        let j = catalog().to_json();
        assert_eq!(j.as_array().unwrap().len(), 12);
        assert_eq!(j[11]["partition"], serde_json::json!([5, 5]));
    }
}
