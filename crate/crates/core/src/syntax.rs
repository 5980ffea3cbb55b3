//! Concrete syntax: the trace grammar and the Φ-expression grammar.
//!
//! Trace grammar (sums inside a trace may carry rational coefficients):
//!
//! ```text
//! expr   := sign? term (('+'|'-') term)*
//! term   := rational ('*'? factor)* | factor ('*'? factor)*
//! factor := 'tr' '(' ncword ')' ('^' int)?
//! ncword := ncatom+
//! ncatom := ('x' | 'y' | '[' ncword ',' ncword ']' | '(' ncsum ')') ('^' int)*
//! ncsum  := sign? ncterm (('+'|'-') ncterm)*
//! ncterm := (rational '*'?)? ncword | rational
//! ```
//!
//! Φ grammar, over `t_i`, `x_i`, `y_i`, `z_i^(p,q)` with `i` in 1..=12:
//!
//! ```text
//! sum  := sign? prod (('+'|'-') prod)*
//! prod := atom ('*' atom)*
//! atom := rational | var ('^' int)? | '(' sum ')' ('^' int)?
//! var  := 't'idx | 'x'idx | 'y'idx | 'z'idx '^(' int ',' int ')'
//! ```

use std::collections::BTreeMap;

use crate::glcat::{module_a, module_b, AbsGen, AbsMono, AbsPoly, NMODULES};
use crate::polyring::Rational;
use crate::tracelang::{NcPoly, TraceError, TraceExpr};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SyntaxError {
    #[error("syntax error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("trace error: {0}")]
    Trace(#[from] TraceError),
    #[error("module {module} in monomial `{monomial}`: {msg}")]
    Completeness { module: usize, monomial: String, msg: String },
}

struct Lexer<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Self {
        Lexer { src: src.as_bytes(), pos: 0 }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn peek_is(&mut self, s: &str) -> bool {
        self.skip_ws();
        self.src[self.pos..].starts_with(s.as_bytes())
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: u8) -> Result<(), SyntaxError> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.error(format!("expected `{}`", c as char)))
        }
    }

    fn error(&self, msg: impl Into<String>) -> SyntaxError {
        SyntaxError::Parse { pos: self.pos, msg: msg.into() }
    }

    fn digits(&mut self) -> Option<&'a str> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        (self.pos > start).then(|| std::str::from_utf8(&self.src[start..self.pos]).expect("ascii"))
    }

    fn int(&mut self) -> Result<u32, SyntaxError> {
        let d = self.digits().ok_or_else(|| self.error("expected an integer"))?;
        d.parse().map_err(|_| self.error("integer out of range"))
    }

    /// `digits ('/' digits)?`, if a digit follows.
    fn rational(&mut self) -> Result<Option<Rational>, SyntaxError> {
        let Some(n) = self.digits() else { return Ok(None) };
        let text = if self.peek() == Some(b'/') {
            self.pos += 1;
            let d = self.digits().ok_or_else(|| self.error("expected a denominator"))?;
            format!("{n}/{d}")
        } else {
            n.to_string()
        };
        text.parse::<Rational>().map(Some).map_err(|e| self.error(e.to_string()))
    }

    fn sign(&mut self) -> Option<bool> {
        if self.eat(b'+') {
            Some(false)
        } else if self.eat(b'-') {
            Some(true)
        } else {
            None
        }
    }

    fn at_end(&mut self) -> bool {
        self.peek().is_none()
    }
}

fn signed(c: Rational, neg: bool) -> Rational {
    if neg {
        -c
    } else {
        c
    }
}

/// Parses the trace grammar into canonical form.
pub fn parse_trace(src: &str) -> Result<TraceExpr, SyntaxError> {
    let mut lx = Lexer::new(src);
    let mut out = TraceExpr::zero();
    let mut neg = lx.sign().unwrap_or(false);
    loop {
        let t = trace_term(&mut lx)?;
        out.add_scaled_assign(&t, &signed(Rational::one(), neg));
        match lx.sign() {
            Some(n) => neg = n,
            None if lx.at_end() => return Ok(out),
            None => return Err(lx.error("expected `+`, `-` or end of input")),
        }
    }
}

fn trace_term(lx: &mut Lexer) -> Result<TraceExpr, SyntaxError> {
    let coeff = lx.rational()?;
    let mut acc = TraceExpr::one().scale(coeff.as_ref().unwrap_or(&Rational::one()));
    let mut factors = 0;
    loop {
        let star = lx.eat(b'*');
        if lx.peek_is("tr") {
            acc = acc.mul(&trace_factor(lx)?);
            factors += 1;
        } else if star {
            return Err(lx.error("expected `tr(` after `*`"));
        } else {
            break;
        }
    }
    if factors == 0 && coeff.is_none() {
        return Err(lx.error("expected a rational or `tr(`"));
    }
    Ok(acc)
}

fn trace_factor(lx: &mut Lexer) -> Result<TraceExpr, SyntaxError> {
    lx.pos += 2;
    lx.expect(b'(')?;
    let inner = nc_word(lx)?;
    lx.expect(b')')?;
    let e = crate::tracelang::trace_of(&inner)?;
    if lx.eat(b'^') {
        Ok(e.pow(lx.int()?))
    } else {
        Ok(e)
    }
}

fn nc_word(lx: &mut Lexer) -> Result<NcPoly, SyntaxError> {
    let mut acc = NcPoly::one();
    let mut atoms = 0;
    while matches!(lx.peek(), Some(b'x' | b'y' | b'[' | b'(')) {
        acc = acc.mul(&nc_atom(lx)?);
        atoms += 1;
    }
    if atoms == 0 {
        return Err(lx.error("expected `x`, `y`, `[` or `(`"));
    }
    Ok(acc)
}

fn nc_atom(lx: &mut Lexer) -> Result<NcPoly, SyntaxError> {
    let mut base = match lx.peek() {
        Some(b'x') => {
            lx.pos += 1;
            NcPoly::x()
        }
        Some(b'y') => {
            lx.pos += 1;
            NcPoly::y()
        }
        Some(b'[') => {
            lx.pos += 1;
            let a = nc_word(lx)?;
            lx.expect(b',')?;
            let b = nc_word(lx)?;
            lx.expect(b']')?;
            NcPoly::commutator(&a, &b)
        }
        Some(b'(') => {
            lx.pos += 1;
            let s = nc_sum(lx)?;
            lx.expect(b')')?;
            s
        }
        _ => return Err(lx.error("expected `x`, `y`, `[` or `(`")),
    };
    while lx.eat(b'^') {
        base = base.pow(lx.int()?);
    }
    Ok(base)
}

fn nc_sum(lx: &mut Lexer) -> Result<NcPoly, SyntaxError> {
    let mut out = NcPoly::zero();
    let mut neg = lx.sign().unwrap_or(false);
    loop {
        let c = lx.rational()?;
        lx.eat(b'*');
        let term = if matches!(lx.peek(), Some(b'x' | b'y' | b'[' | b'(')) {
            nc_word(lx)?
        } else if c.is_some() {
            NcPoly::one()
        } else {
            return Err(lx.error("expected a word"));
        };
        out = out.add(&term.scale(&signed(c.unwrap_or_else(Rational::one), neg)));
        match lx.sign() {
            Some(n) => neg = n,
            None => return Ok(out),
        }
    }
}

/// A Φ symbol: `t_i`, `x_i`, `y_i` or `z_i^(p,q)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum PhiSym {
    T(u8),
    X(u8),
    Y(u8),
    Z(u8, u32, u32),
}

impl PhiSym {
    fn module(self) -> usize {
        match self {
            PhiSym::T(i) | PhiSym::X(i) | PhiSym::Y(i) | PhiSym::Z(i, _, _) => i as usize,
        }
    }
}

impl std::fmt::Display for PhiSym {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            PhiSym::T(i) => write!(f, "t{i}"),
            PhiSym::X(i) => write!(f, "x{i}"),
            PhiSym::Y(i) => write!(f, "y{i}"),
            PhiSym::Z(i, p, q) => write!(f, "z{i}^({p},{q})"),
        }
    }
}

type SymMono = BTreeMap<PhiSym, u32>;

/// An expanded Φ-expression: a polynomial in the Φ symbols.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct PhiExpression(BTreeMap<SymMono, Rational>);

impl PhiExpression {
    fn constant(c: Rational) -> Self {
        let mut p = PhiExpression::default();
        p.add_term(SymMono::new(), c);
        p
    }

    fn sym(s: PhiSym) -> Self {
        let mut p = PhiExpression::default();
        p.add_term(SymMono::from([(s, 1)]), Rational::one());
        p
    }

    fn add_term(&mut self, m: SymMono, c: Rational) {
        if c.is_zero() {
            return;
        }
        let slot = self.0.entry(m.clone()).or_default();
        *slot += &c;
        if slot.is_zero() {
            self.0.remove(&m);
        }
    }

    fn add_scaled(&mut self, other: &PhiExpression, c: &Rational) {
        for (m, v) in &other.0 {
            self.add_term(m.clone(), v * c);
        }
    }

    fn mul(&self, other: &PhiExpression) -> PhiExpression {
        let mut out = PhiExpression::default();
        for (a, ca) in &self.0 {
            for (b, cb) in &other.0 {
                let mut m = a.clone();
                for (s, e) in b {
                    *m.entry(*s).or_default() += e;
                }
                out.add_term(m, ca * cb);
            }
        }
        out
    }

    fn pow(&self, e: u32) -> PhiExpression {
        (0..e).fold(PhiExpression::constant(Rational::one()), |acc, _| acc.mul(self))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Checks the completeness rule and maps each monomial into `K[G₀]`.
    pub fn to_abs(&self) -> Result<AbsPoly, SyntaxError> {
        let mut out = AbsPoly::zero();
        for (m, c) in &self.0 {
            out.add_term(sym_mono_to_abs(m)?, c.clone());
        }
        Ok(out)
    }
}

fn render_sym_mono(m: &SymMono) -> String {
    if m.is_empty() {
        return "1".into();
    }
    m.iter().map(|(s, e)| if *e == 1 { s.to_string() } else { format!("{s}^{e}") }).collect::<Vec<_>>().join("*")
}

fn sym_mono_to_abs(m: &SymMono) -> Result<AbsMono, SyntaxError> {
    let mut gens = Vec::new();
    for i in 1..=NMODULES {
        let (a, b) = (module_a(i), module_b(i));
        let err = |msg: String| SyntaxError::Completeness { module: i, monomial: render_sym_mono(m), msg };
        let (mut t, mut xd, mut yd) = (0u32, 0u32, 0u32);
        let mut zs = Vec::new();
        for (s, &e) in m.iter().filter(|(s, _)| s.module() == i) {
            match *s {
                PhiSym::T(_) => t += e,
                PhiSym::X(_) => xd += e,
                PhiSym::Y(_) => yd += e,
                PhiSym::Z(_, p, q) => {
                    if p + q != a {
                        return Err(err(format!("z{i}^({p},{q}) must have total degree {a}")));
                    }
                    zs.extend(std::iter::repeat_n(q, e as usize));
                }
            }
        }
        if a == 0 && (xd + yd > 0 || !zs.is_empty()) {
            return Err(err(format!("W{i} is one-dimensional; only t{i} may appear")));
        }
        if b == 0 && t > 0 {
            return Err(err(format!("t{i} does not occur for W{i}")));
        }
        let plain = xd + yd;
        // with a = 1 every plain variable is its own slot
        if a != 1 && plain != 0 && plain != a {
            return Err(err(format!("plain x{i}, y{i} have degree {plain}; a slot needs 0 or {a}")));
        }
        let plain_slots = if a == 1 { plain } else { u32::from(plain > 0) };
        let slots = zs.len() as u32 + plain_slots;
        if b > 0 {
            if t % b != 0 {
                return Err(err(format!("t{i} exponent {t} is not a multiple of {b}")));
            }
            let expected = if a == 0 { t / b } else { slots };
            if t / b != expected {
                return Err(err(format!("t{i}^{t} covers {} slots but {slots} forms are present", t / b)));
            }
            if a == 0 {
                gens.extend(std::iter::repeat_n(AbsGen::new(i, 0).expect("module exists"), (t / b) as usize));
                continue;
            }
        }
        for q in zs {
            gens.push(AbsGen::new(i, q as usize).expect("checked degree"));
        }
        if a == 1 {
            gens.extend(std::iter::repeat_n(AbsGen::new(i, 0).expect("module exists"), xd as usize));
            gens.extend(std::iter::repeat_n(AbsGen::new(i, 1).expect("module exists"), yd as usize));
        } else if plain_slots == 1 {
            gens.push(AbsGen::new(i, yd as usize).expect("checked degree"));
        }
    }
    Ok(AbsMono::from_gens(gens))
}

/// Drops `#` comments (to end of line); data files carry a header this way.
pub fn strip_comments(src: &str) -> String {
    src.lines().map(|l| l.split_once('#').map_or(l, |(a, _)| a)).collect::<Vec<_>>().join("\n")
}

/// Parses the Φ grammar and expands it.
pub fn parse_phi_expr(src: &str) -> Result<PhiExpression, SyntaxError> {
    let mut lx = Lexer::new(src);
    let e = phi_sum(&mut lx)?;
    if !lx.at_end() {
        return Err(lx.error("unexpected trailing input"));
    }
    Ok(e)
}

/// Parses a Φ-expression and maps it into `K[G₀]`.
pub fn parse_phi(src: &str) -> Result<AbsPoly, SyntaxError> {
    parse_phi_expr(src)?.to_abs()
}

fn phi_sum(lx: &mut Lexer) -> Result<PhiExpression, SyntaxError> {
    let mut out = PhiExpression::default();
    let mut neg = lx.sign().unwrap_or(false);
    loop {
        let p = phi_prod(lx)?;
        out.add_scaled(&p, &signed(Rational::one(), neg));
        match lx.sign() {
            Some(n) => neg = n,
            None => return Ok(out),
        }
    }
}

fn phi_prod(lx: &mut Lexer) -> Result<PhiExpression, SyntaxError> {
    let mut acc = phi_atom(lx)?;
    while lx.eat(b'*') {
        acc = acc.mul(&phi_atom(lx)?);
    }
    if matches!(lx.peek(), Some(b't' | b'x' | b'y' | b'z' | b'(' | b'0'..=b'9')) {
        return Err(lx.error("missing `*` between factors"));
    }
    Ok(acc)
}

fn phi_atom(lx: &mut Lexer) -> Result<PhiExpression, SyntaxError> {
    if let Some(c) = lx.rational()? {
        return Ok(PhiExpression::constant(c));
    }
    let base = match lx.peek() {
        Some(b'(') => {
            lx.pos += 1;
            let s = phi_sum(lx)?;
            lx.expect(b')')?;
            s
        }
        Some(c @ (b't' | b'x' | b'y' | b'z')) => {
            lx.pos += 1;
            let start = lx.pos;
            let idx = lx.int()?;
            if !(1..=NMODULES as u32).contains(&idx) || lx.src[start] == b'0' {
                return Err(SyntaxError::Parse { pos: start, msg: format!("module index {idx} outside 1..=12") });
            }
            let i = idx as u8;
            let sym = match c {
                b't' => PhiSym::T(i),
                b'x' => PhiSym::X(i),
                b'y' => PhiSym::Y(i),
                _ => {
                    lx.expect(b'^')?;
                    lx.expect(b'(')?;
                    let p = lx.int()?;
                    lx.expect(b',')?;
                    let q = lx.int()?;
                    lx.expect(b')')?;
                    PhiSym::Z(i, p, q)
                }
            };
            PhiExpression::sym(sym)
        }
        _ => return Err(lx.error("expected a rational, a variable or `(`")),
    };
    if lx.eat(b'^') {
        Ok(base.pow(lx.int()?))
    } else {
        Ok(base)
    }
}

/// Renders `p` in the Φ grammar using `z`-forms for every slot.
pub fn emit_phi(p: &AbsPoly) -> String {
    if p.is_zero() {
        return "0".into();
    }
    let mut s = String::new();
    for (k, (m, c)) in p.terms().enumerate() {
        let neg = c.is_negative();
        let a = c.abs();
        if k > 0 {
            s.push_str(if neg { " - " } else { " + " });
        } else if neg {
            s.push('-');
        }
        let mut factors = Vec::new();
        let degs = m.module_degrees();
        for i in 1..=NMODULES {
            let mi = degs[i - 1] as u32;
            if mi == 0 {
                continue;
            }
            let (ai, bi) = (module_a(i), module_b(i));
            if bi > 0 {
                factors.push(format!("t{i}^{}", bi * mi));
            }
            if ai == 0 {
                continue;
            }
            for j in 0..=ai as usize {
                let g = AbsGen::new(i, j).expect("in range");
                match m.exponent(g) {
                    0 => {}
                    1 => factors.push(format!("z{i}^({},{j})", ai as usize - j)),
                    e => factors.push(format!("z{i}^({},{j})^{e}", ai as usize - j)),
                }
            }
        }
        if factors.is_empty() {
            s.push_str(&a.to_string());
        } else {
            if !a.is_one() {
                s.push_str(&format!("{a}*"));
            }
            s.push_str(&factors.join("*"));
        }
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn u(i: usize, j: usize) -> AbsPoly {
        AbsPoly::gen(AbsGen::new(i, j).unwrap())
    }

    fn tr(s: &str) -> TraceExpr {
        TraceExpr::trace_word(s.parse().unwrap()).unwrap()
    }

    #[test]
    fn trace_grammar_basics() {
        assert_eq!(parse_trace("tr(xy)").unwrap(), tr("xy"));
        assert_eq!(parse_trace("tr(x^2)*tr(y^2)").unwrap(), tr("xx").mul(&tr("yy")));
        assert_eq!(parse_trace("tr(x^2) tr(y^2)").unwrap(), tr("xx").mul(&tr("yy")));
        assert_eq!(parse_trace("tr(xy + yx)").unwrap_err(), SyntaxError::Parse { pos: 6, msg: "expected `)`".into() });
        assert_eq!(parse_trace("tr((xy + yx))").unwrap(), tr("xy").scale(&Rational::from_integer(2)));
        let comm = parse_trace("tr([x,y]^2)").unwrap();
        assert_eq!(comm, tr("xyxy").scale(&Rational::from_integer(2)).sub(&tr("xxyy").scale(&Rational::from_integer(2))));
        assert_eq!(parse_trace("-1/2*tr(xy)^2 + 3").unwrap(), tr("xy").pow(2).scale(&Rational::new(-1, 2)).add(&TraceExpr::one().scale(&Rational::from_integer(3))));
        assert!(matches!(parse_trace("tr(x)"), Err(SyntaxError::Trace(_))));
        assert!(parse_trace("tr(xz)").is_err());
        assert!(parse_trace("").is_err());
    }

    #[test]
    fn trace_grammar_round_trip_of_renderings() {
        let e = parse_trace("tr([x,y]^3 (x^2 y^2 - x y^2 x - y x^2 y + y^2 x^2)) - 2/3*tr(xxyy)*tr(xy)").unwrap();
        assert_eq!(parse_trace(&e.to_grammar()).unwrap(), e);
        let sums = parse_trace("tr((2*xxy - 1/3*xyx + yxx)y)").unwrap();
        assert_eq!(parse_trace(&sums.to_grammar()).unwrap(), sums);
    }

    #[test]
    fn phi_examples() {
        assert_eq!(parse_phi("t5^2*x5").unwrap(), u(5, 0));
        let u3 = parse_phi("-(x5*y8-y5*x8)*t5^2*t8^3").unwrap();
        assert_eq!(u3, u(5, 1).mul(&u(8, 0)).sub(&u(5, 0).mul(&u(8, 1))));
        let a = parse_phi("(z1^(1,1))^2").unwrap();
        let b = parse_phi("z1^(2,0)*z1^(0,2)").unwrap();
        assert_eq!(a, u(1, 1).mul(&u(1, 1)));
        assert_eq!(b, u(1, 0).mul(&u(1, 2)));
        assert_ne!(a, b);
        assert_eq!(parse_phi("t4^2*t12^5").unwrap(), u(4, 0).mul(&u(12, 0)));
        assert_eq!(parse_phi("t4^4").unwrap(), u(4, 0).mul(&u(4, 0)));
        assert_eq!(parse_phi("t11^3*x11^2*y11").unwrap(), u(11, 1));
        assert_eq!(parse_phi("t5^4*x5*y5").unwrap(), u(5, 0).mul(&u(5, 1)));
        assert_eq!(parse_phi("t8^9*y8^3").unwrap(), u(8, 1).mul(&u(8, 1)).mul(&u(8, 1)));
    }

    #[test]
    fn phi_errors() {
        assert!(matches!(parse_phi("x5y8"), Err(SyntaxError::Parse { .. })));
        assert!(matches!(parse_phi("t5^2*x5 t8^3"), Err(SyntaxError::Parse { .. })));
        assert!(matches!(parse_phi("x13"), Err(SyntaxError::Parse { .. })));
        assert!(matches!(parse_phi("x11*y11"), Err(SyntaxError::Completeness { module: 11, .. })));
        assert!(matches!(parse_phi("t5*x5"), Err(SyntaxError::Completeness { module: 5, .. })));
        assert!(matches!(parse_phi("t1^2*x1^2"), Err(SyntaxError::Completeness { module: 1, .. })));
        assert!(matches!(parse_phi("x4"), Err(SyntaxError::Completeness { module: 4, .. })));
        assert!(matches!(parse_phi("z1^(2,1)"), Err(SyntaxError::Completeness { module: 1, .. })));
        assert!(matches!(parse_phi("t5^4*x5"), Err(SyntaxError::Completeness { module: 5, .. })));
        assert!(matches!(parse_phi("x1^2*y1^2"), Err(SyntaxError::Completeness { module: 1, .. })));
        match parse_phi("t5^2*x5*y5") {
            Err(SyntaxError::Completeness { monomial, .. }) => assert_eq!(monomial, "t5^2*x5*y5"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn emitted_phi_reparses() {
        let p = u(5, 1).mul(&u(8, 0)).scale(&Rational::new(-7, 3)).add(&u(1, 1).mul(&u(1, 1)).mul(&u(4, 0)));
        assert_eq!(parse_phi(&emit_phi(&p)).unwrap(), p);
        assert_eq!(parse_phi(&emit_phi(&AbsPoly::zero())).unwrap(), AbsPoly::zero());
    }

    fn arb_abspoly() -> impl Strategy<Value = AbsPoly> {
        let mono = prop::collection::vec(0usize..30, 0..5)
            .prop_map(|gs| AbsMono::from_gens(gs.into_iter().map(|g| AbsGen::from_index(g).unwrap())));
        prop::collection::vec((mono, -20i64..20, 1i64..6), 0..6)
            .prop_map(|ts| AbsPoly::from_terms(ts.into_iter().map(|(m, n, d)| (m, Rational::new(n, d)))))
    }

    proptest! {
        #[test]
        fn phi_round_trip(p in arb_abspoly()) {
            let text = emit_phi(&p);
            prop_assert_eq!(parse_phi(&text).unwrap(), p);
        }
    }
}
