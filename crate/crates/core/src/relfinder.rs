//! Defining relations: the ζ-system over a hwv basis, its null space, orbits
//! under Δ₁, checks of explicit relations, and leading monomials modulo the
//! ideal generated by the parameter subalgebra.

use std::cmp::Ordering as CmpOrdering;
use std::collections::BTreeMap;
use std::path::PathBuf;
use std::sync::atomic::Ordering;
use std::sync::Arc;

use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};

use crate::cache::{sha256_hex, CacheError};
use crate::engine::{Engine, EngineError};
use crate::genmat::{varset, EvalError, GenericPair};
use crate::glcat::{abs_monomials, abs_monomials_bideg, AbsGen, AbsMono, AbsPoly, Partition};
use crate::hwv::{abspoly_json, basis_json, default_blocked, hwv_basis_capped, HwvBasis, HwvError};
use crate::images::GeneratorImages;
use crate::nullspace::{in_span, null_stream, NullspaceError, QMatrix, SparseRow};
use crate::polyring::{BiSeries, CommPoly, Monomial, Rational};
use crate::tracelang::TraceExpr;

/// Partitions carrying relations, by degree.
pub const RELATION_PARTITIONS: [(u32, &[(u32, u32)]); 3] =
    [(12, &[(7, 5), (6, 6)]), (13, &[(8, 5), (7, 6)]), (14, &[(9, 5), (8, 6), (7, 7)])];

/// Monomials whose images are held in memory at once while assembling a system.
const CHUNK: usize = 32;

/// Nonzero terms listed in a residual report.
pub const RESIDUAL_LISTING_CAP: usize = 12;

#[derive(Debug, thiserror::Error)]
pub enum RelError {
    #[error(transparent)]
    Hwv(#[from] HwvError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Nullspace(#[from] NullspaceError),
    #[error(transparent)]
    Cache(#[from] CacheError),
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error("candidate has bidegree {found}, expected {expected}")]
    Bidegree { expected: Partition, found: String },
    #[error("no relation data for degree {0}; supported degrees are 12, 13 and 14")]
    UnsupportedDegree(u32),
    #[error("malformed certificate: {0}")]
    Certificate(String),
}

pub fn relation_partitions(degree: u32) -> Result<Vec<Partition>, RelError> {
    RELATION_PARTITIONS
        .iter()
        .find(|(d, _)| *d == degree)
        .map(|(_, ps)| ps.iter().map(|&(a, b)| Partition::new(a as i64, b as i64).expect("valid partition")).collect())
        .ok_or(RelError::UnsupportedDegree(degree))
}

#[derive(Debug, Clone, PartialEq)]
pub struct RelationSpace {
    pub lambda: Partition,
    pub hwv: HwvBasis,
    /// One coefficient vector over `hwv.vectors` per relation.
    pub zeta: Vec<Vec<Rational>>,
    pub relvectors: Vec<AbsPoly>,
    pub r: usize,
    /// [`certificate_digest`] of each relvector, taken when it was solved.
    pub digests: Vec<String>,
}

/// Hash binding a relation to its evaluated value.
pub fn certificate_digest(lambda: Partition, v: &AbsPoly, value: &CommPoly) -> String {
    sha256_hex(format!("{lambda}\n{v}\n{}", value.to_canonical_text()).as_bytes())
}

/// `Σ_i ζ_i w_i`.
pub fn combine(vectors: &[AbsPoly], zeta: &[Rational]) -> AbsPoly {
    let mut out = AbsPoly::zero();
    for (w, z) in vectors.iter().zip(zeta) {
        if !z.is_zero() {
            out = out.add(&w.scale(z));
        }
    }
    out
}

/// The ζ-system: for each commutative monomial in the images, the row of its
/// coefficients in `eval(Φ(w_1)), …, eval(Φ(w_s))`. Rows come sorted by monomial.
pub fn zeta_system(images: &GeneratorImages, vectors: &[AbsPoly]) -> Vec<(Monomial, SparseRow)> {
    let s = vectors.len();
    let mut uses: BTreeMap<AbsMono, Vec<(usize, &Rational)>> = BTreeMap::new();
    for (i, w) in vectors.iter().enumerate() {
        for (m, c) in w.terms() {
            uses.entry(*m).or_default().push((i, c));
        }
    }
    let monos: Vec<AbsMono> = uses.keys().copied().collect();
    let mut acc: FxHashMap<Monomial, Vec<Rational>> = FxHashMap::default();
    for chunk in monos.chunks(CHUNK) {
        for (m, img) in chunk.iter().zip(images.monomials(chunk)) {
            let u = &uses[m];
            for (cm, c) in img.terms() {
                let row = acc.entry(*cm).or_insert_with(|| vec![Rational::zero(); s]);
                for &(i, ci) in u {
                    row[i] += &(c * ci);
                }
            }
        }
    }
    let mut rows: Vec<(Monomial, SparseRow)> = acc
        .into_iter()
        .map(|(m, row)| (m, row.into_iter().enumerate().filter(|(_, c)| !c.is_zero()).collect::<SparseRow>()))
        .filter(|(_, r)| !r.is_empty())
        .collect();
    rows.sort_unstable_by_key(|(m, _)| m.packed());
    rows
}

/// `Σ_k row_k · ζ` as a polynomial.
fn system_value(rows: &[(Monomial, SparseRow)], zeta: &[Rational]) -> CommPoly {
    let mut terms = Vec::new();
    for (m, row) in rows {
        let mut c = Rational::zero();
        for (i, a) in row {
            c += &(a * &zeta[*i]);
        }
        if !c.is_zero() {
            terms.push((*m, c));
        }
    }
    CommPoly::from_terms(&varset(), terms)
}

fn relspace_key(hwv: &HwvBasis) -> String {
    format!("relspace:v1:{}:{}", hwv.lambda, sha256_hex(basis_json(hwv).to_string().as_bytes()))
}

fn relspace_json(space: &RelationSpace) -> serde_json::Value {
    serde_json::json!({
        "lambda": [space.lambda.l1, space.lambda.l2],
        "r": space.r,
        "zeta": space.zeta.iter().map(|z| z.iter().map(Rational::to_string).collect::<Vec<_>>()).collect::<Vec<_>>(),
        "digests": space.digests,
    })
}

fn relspace_from_json(hwv: &HwvBasis, v: &serde_json::Value) -> Option<RelationSpace> {
    let zeta: Vec<Vec<Rational>> = v["zeta"]
        .as_array()?
        .iter()
        .map(|z| z.as_array()?.iter().map(|c| c.as_str()?.parse().ok()).collect::<Option<Vec<_>>>())
        .collect::<Option<_>>()?;
    let digests: Vec<String> =
        v["digests"].as_array()?.iter().map(|d| d.as_str().map(String::from)).collect::<Option<_>>()?;
    if zeta.len() != digests.len() || zeta.iter().any(|z| z.len() != hwv.vectors.len()) {
        return None;
    }
    let relvectors = zeta.iter().map(|z| combine(&hwv.vectors, z)).collect();
    Some(RelationSpace { lambda: hwv.lambda, hwv: hwv.clone(), r: zeta.len(), zeta, relvectors, digests })
}

/// Relation space at λ: hwv basis, ζ-system from the evaluated images, null
/// space in the engine's mode. Memoized per engine and stored in its cache.
pub fn relation_space(engine: &Engine, lambda: Partition) -> Result<Arc<RelationSpace>, RelError> {
    if let Some(s) = engine.spaces.lock().expect("spaces lock").get(&lambda) {
        return Ok(s.clone());
    }
    let cfg = engine.config();
    let blocked = cfg.blocked.unwrap_or_else(|| default_blocked(lambda));
    let hwv = hwv_basis_capped(lambda, blocked, cfg.degree_cap)?;
    let key = relspace_key(&hwv);
    let cached = engine.cache().and_then(|c| c.get_json(&key)).and_then(|v| relspace_from_json(&hwv, &v));
    let space = match cached {
        Some(s) => s,
        None => {
            let s = solve_space(engine, hwv)?;
            if let Some(c) = engine.cache() {
                c.put_json(&key, &relspace_json(&s))?;
            }
            s
        }
    };
    let space = Arc::new(space);
    engine.spaces.lock().expect("spaces lock").insert(lambda, space.clone());
    Ok(space)
}

fn solve_space(engine: &Engine, hwv: HwvBasis) -> Result<RelationSpace, RelError> {
    let images = engine.images()?;
    engine.system_evals.fetch_add(1, Ordering::Relaxed);
    let rows = zeta_system(&images, &hwv.vectors);
    let plain: Vec<SparseRow> = rows.iter().map(|(_, r)| r.clone()).collect();
    let zeta = null_stream(&plain, hwv.vectors.len(), engine.config().mode)?.into_vectors();
    let relvectors: Vec<AbsPoly> = zeta.iter().map(|z| combine(&hwv.vectors, z)).collect();
    let digests = zeta
        .iter()
        .zip(&relvectors)
        .map(|(z, v)| certificate_digest(hwv.lambda, v, &system_value(&rows, z)))
        .collect();
    Ok(RelationSpace { lambda: hwv.lambda, r: zeta.len(), hwv, zeta, relvectors, digests })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResidualTerm {
    pub monomial: String,
    pub coeff: String,
}

/// Outcome of an exact zero test.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ZeroReport {
    pub zero: bool,
    /// Number of nonzero terms of the evaluated polynomial.
    pub terms: usize,
    /// The first terms in graded-lex descending order.
    pub listing: Vec<ResidualTerm>,
    /// sha256 of the canonical text of the evaluated polynomial.
    pub digest: String,
}

impl ZeroReport {
    pub fn from_value(value: &CommPoly) -> Self {
        let listing = value
            .sorted_terms()
            .into_iter()
            .take(RESIDUAL_LISTING_CAP)
            .map(|(m, c)| ResidualTerm {
                monomial: CommPoly::from_terms(value.vars(), [(m, Rational::one())]).to_string(),
                coeff: c.to_string(),
            })
            .collect();
        ZeroReport {
            zero: value.is_zero(),
            terms: value.len(),
            listing,
            digest: sha256_hex(value.to_canonical_text().as_bytes()),
        }
    }
}

/// Evaluates a trace expression on the generic matrices.
pub fn verify_zero(pair: &GenericPair, e: &TraceExpr) -> Result<ZeroReport, EvalError> {
    Ok(ZeroReport::from_value(&pair.eval_trace_expr(e)?))
}

/// Evaluates `Φ(p)` through the generator images.
pub fn verify_abs_zero(engine: &Engine, p: &AbsPoly) -> Result<ZeroReport, RelError> {
    Ok(ZeroReport::from_value(&engine.images()?.eval_abs(p)))
}

fn bidegree_text(p: &AbsPoly) -> String {
    match p.bidegree() {
        Some((a, b)) => format!("({a},{b})"),
        None => "mixed".into(),
    }
}

/// Whether `candidate` lies in the span of the relvectors.
pub fn membership(candidate: &AbsPoly, space: &RelationSpace) -> Result<bool, RelError> {
    if candidate.is_zero() {
        return Ok(true);
    }
    let lambda = space.lambda;
    if candidate.bidegree() != Some((lambda.l1, lambda.l2)) {
        return Err(RelError::Bidegree { expected: lambda, found: bidegree_text(candidate) });
    }
    let ms = abs_monomials(lambda);
    let coords = |p: &AbsPoly| p.coordinates(&ms).expect("bihomogeneous of bidegree λ");
    let basis: Vec<Vec<Rational>> = space.relvectors.iter().map(coords).collect();
    Ok(in_span(&basis, &coords(candidate)))
}

/// For each relvector `v`, the basis `e_0 = v`, `e_j = Δ₁(e_{j−1}) / (a − j + 1)`
/// of the module it generates, `a = λ₁ − λ₂`.
pub fn orbit(space: &RelationSpace) -> Vec<AbsPoly> {
    let a = space.lambda.l1 - space.lambda.l2;
    let mut out = Vec::new();
    for v in &space.relvectors {
        let mut e = v.clone();
        out.push(e.clone());
        for j in 1..=a {
            e = e.abs_delta1().scale(&Rational::new(1, (a - j + 1) as i64));
            out.push(e.clone());
        }
    }
    out
}

/// Generators split into a homogeneous system of parameters and the rest; the
/// rest carries the order ≻ used for leading monomials.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParameterSplit {
    pub hsop: Vec<AbsGen>,
    /// In ≻-descending order.
    pub complement: Vec<AbsGen>,
}

impl ParameterSplit {
    pub fn standard() -> Self {
        let g = |i, j| AbsGen::new(i, j).expect("generator exists");
        let complement = vec![
            g(5, 0),
            g(5, 1),
            g(7, 0),
            g(8, 0),
            g(8, 1),
            g(6, 1),
            g(9, 0),
            g(9, 1),
            g(9, 2),
            g(10, 0),
            g(11, 0),
            g(11, 1),
            g(11, 2),
            g(11, 3),
            g(12, 0),
        ];
        let hsop = AbsGen::all().filter(|x| !complement.contains(x)).collect();
        ParameterSplit { hsop, complement }
    }

    pub fn involves_hsop(&self, m: &AbsMono) -> bool {
        self.hsop.iter().any(|&g| m.exponent(g) > 0)
    }

    /// Drops every term with a parameter factor.
    pub fn reduce(&self, p: &AbsPoly) -> AbsPoly {
        AbsPoly::from_terms(p.terms().filter(|(m, _)| !self.involves_hsop(m)).map(|(m, c)| (*m, c.clone())))
    }

    /// ≻: lexicographic in the exponents, generators taken in ≻-descending order.
    pub fn cmp(&self, a: &AbsMono, b: &AbsMono) -> CmpOrdering {
        self.complement
            .iter()
            .map(|&g| a.exponent(g).cmp(&b.exponent(g)))
            .find(|o| o.is_ne())
            .unwrap_or_else(|| a.cmp(b))
    }

    /// ≻-greatest term surviving [`Self::reduce`].
    pub fn leading(&self, p: &AbsPoly) -> Option<AbsMono> {
        self.reduce(p).terms().map(|(m, _)| *m).max_by(|a, b| self.cmp(a, b))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OrbitVector {
    pub lambda: Partition,
    /// Relvector index within the space.
    pub relation: usize,
    /// Step `j` along the Δ₁ ladder.
    pub step: u32,
    /// Leading monomial of this vector alone; `None` when nothing survives.
    pub leading: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LeadingReport {
    pub degree: u32,
    pub vectors: Vec<OrbitVector>,
    /// Leading monomials of the span of the reduced orbit vectors, ≻-descending.
    pub leading: Vec<AbsMono>,
    /// Orbit vectors with no term left after reduction.
    pub degenerate: Vec<usize>,
    /// Orbit vectors whose reductions depend on earlier ones.
    pub dependent: usize,
}

impl LeadingReport {
    /// `Σ t^p u^q` over the leading monomials.
    pub fn generating_function(&self, bound: u32) -> BiSeries {
        let mut s = BiSeries::zero(bound);
        for m in &self.leading {
            let (p, q) = m.bidegree();
            s.add_to(p, q, &Rational::one());
        }
        s
    }
}

/// Echelon pivots of `rows` (leftmost nonzero column after reduction) and the
/// number of rows that reduce to zero.
fn pivot_columns(rows: &[Vec<Rational>]) -> (Vec<usize>, usize) {
    let mut pivots: Vec<(usize, Vec<Rational>)> = Vec::new();
    let mut dependent = 0;
    for r in rows {
        let mut row = r.clone();
        loop {
            let Some(lead) = row.iter().position(|c| !c.is_zero()) else {
                dependent += 1;
                break;
            };
            match pivots.iter().find(|(p, _)| *p == lead) {
                Some((_, prow)) => {
                    let f = &row[lead] / &prow[lead];
                    for (x, y) in row.iter_mut().zip(prow) {
                        *x -= &(&f * y);
                    }
                }
                None => {
                    pivots.push((lead, row));
                    break;
                }
            }
        }
    }
    let mut cols: Vec<usize> = pivots.into_iter().map(|(p, _)| p).collect();
    cols.sort_unstable();
    (cols, dependent)
}

/// Leading monomials of the span of the reductions of `vectors`: echelon form
/// with columns in ≻-descending order; the pivots are the leading monomials.
pub fn leading_of_span(split: &ParameterSplit, vectors: &[AbsPoly]) -> (Vec<AbsMono>, usize) {
    let reduced: Vec<AbsPoly> = vectors.iter().map(|v| split.reduce(v)).collect();
    let mut cols: Vec<AbsMono> = reduced.iter().flat_map(|v| v.terms().map(|(m, _)| *m)).collect();
    cols.sort_by(|a, b| split.cmp(b, a));
    cols.dedup();
    let rows: Vec<Vec<Rational>> =
        reduced.iter().map(|v| v.coordinates(&cols).expect("columns cover every term")).collect();
    let (pivots, dependent) = pivot_columns(&rows);
    (pivots.into_iter().map(|i| cols[i]).collect(), dependent)
}

/// Leading monomials modulo the parameter ideal of all relation orbit vectors of
/// the given degree.
pub fn leading_analysis(engine: &Engine, degree: u32) -> Result<LeadingReport, RelError> {
    let split = ParameterSplit::standard();
    let mut vectors = Vec::new();
    let mut all = Vec::new();
    for lambda in relation_partitions(degree)? {
        let space = relation_space(engine, lambda)?;
        let a = lambda.l1 - lambda.l2;
        for (k, v) in orbit(&space).into_iter().enumerate() {
            vectors.push(OrbitVector {
                lambda,
                relation: k / (a as usize + 1),
                step: k as u32 % (a + 1),
                leading: split.leading(&v).map(|m| m.to_string()),
            });
            all.push(v);
        }
    }
    let degenerate = vectors.iter().enumerate().filter(|(_, v)| v.leading.is_none()).map(|(i, _)| i).collect();
    let (leading, dependent) = leading_of_span(&split, &all);
    Ok(LeadingReport { degree, vectors, leading, degenerate, dependent })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NewRelationEntry {
    pub lambda: Partition,
    pub r: usize,
    /// Multiplicity of `W(λ)` among products of lower-degree relations.
    pub old: usize,
    pub new: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NewRelationsReport {
    pub degree: u32,
    pub entries: Vec<NewRelationEntry>,
}

/// Dimension of the span of `o·m` at bidegree `(p,q)`, over the orbit vectors
/// `o` and monomials `m` of the complementary bidegree.
fn old_dimension(lower: &[AbsPoly], p: u32, q: u32) -> usize {
    let ms = abs_monomials_bideg(p, q);
    let mut a = QMatrix::new(ms.len());
    for o in lower {
        let Some((op, oq)) = o.bidegree() else { continue };
        if op > p || oq > q {
            continue;
        }
        for m in abs_monomials_bideg(p - op, q - oq) {
            let prod = o.mul(&AbsPoly::monomial(m));
            let coords = prod.coordinates(&ms).expect("product has bidegree (p,q)");
            a.push_row(coords.into_iter().enumerate().filter(|(_, c)| !c.is_zero()).collect())
                .expect("columns in range");
        }
    }
    a.rank()
}

/// Splits the relation multiplicities of a degree into the part generated by
/// lower-degree relations and the new part.
pub fn new_relations(engine: &Engine, degree: u32) -> Result<NewRelationsReport, RelError> {
    let targets = relation_partitions(degree)?;
    let mut lower = Vec::new();
    for d in RELATION_PARTITIONS.iter().map(|(d, _)| *d).filter(|&d| d < degree) {
        for lambda in relation_partitions(d)? {
            lower.extend(orbit(&*relation_space(engine, lambda)?));
        }
    }
    let mut entries = Vec::new();
    for lambda in targets {
        let r = relation_space(engine, lambda)?.r;
        let here = old_dimension(&lower, lambda.l1, lambda.l2);
        let up = lambda.raised().map_or(0, |(p, q)| old_dimension(&lower, p, q));
        let old = here - up;
        entries.push(NewRelationEntry { lambda, r, old, new: r.saturating_sub(old) });
    }
    Ok(NewRelationsReport { degree, entries })
}

#[derive(Debug, Clone, PartialEq)]
pub struct RelationCertificate {
    pub lambda: Partition,
    pub index: usize,
    pub zeta: Vec<Rational>,
    pub abspoly: AbsPoly,
    /// `Φ(abspoly)` in the trace grammar.
    pub trace_form: String,
    pub leading: Option<AbsMono>,
    pub digest: String,
}

impl RelationCertificate {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "lambda": [self.lambda.l1, self.lambda.l2],
            "index": self.index,
            "zeta": self.zeta.iter().map(Rational::to_string).collect::<Vec<_>>(),
            "abspoly": abspoly_json(&self.abspoly),
            "trace_form": self.trace_form,
            "leading": self.leading.map_or_else(|| "none".to_string(), |m| m.to_string()),
            "digest": self.digest,
        })
    }
}

pub fn certificates(engine: &Engine, space: &RelationSpace) -> Vec<RelationCertificate> {
    let split = ParameterSplit::standard();
    (0..space.r)
        .map(|k| RelationCertificate {
            lambda: space.lambda,
            index: k,
            zeta: space.zeta[k].clone(),
            abspoly: space.relvectors[k].clone(),
            trace_form: engine.catalog().phi_grammar(&space.relvectors[k]),
            leading: split.leading(&space.relvectors[k]),
            digest: space.digests[k].clone(),
        })
        .collect()
}

/// Writes certificates as `certificates/rel-<l1>-<l2>-<k>.json` under the cache directory.
pub fn write_certificates(engine: &Engine, space: &RelationSpace) -> Result<Vec<PathBuf>, RelError> {
    let Some(cache) = engine.cache() else {
        return Ok(Vec::new());
    };
    let dir = cache.dir().join("certificates");
    let io = |source| CacheError::Io { path: dir.clone(), source };
    std::fs::create_dir_all(&dir).map_err(io)?;
    let mut paths = Vec::new();
    for c in certificates(engine, space) {
        let path = dir.join(format!("rel-{}-{}-{}.json", c.lambda.l1, c.lambda.l2, c.index));
        let text = serde_json::to_string_pretty(&c.to_json()).expect("json values serialize");
        std::fs::write(&path, text).map_err(|source| CacheError::Io { path: path.clone(), source })?;
        paths.push(path);
    }
    Ok(paths)
}

/// Parses the `abspoly` field layout of certificates and bases.
pub fn abspoly_from_json(v: &serde_json::Value) -> Option<AbsPoly> {
    let mut out = AbsPoly::zero();
    for t in v.as_array()? {
        let gens = t.get(0)?.as_array()?;
        let gens: Vec<AbsGen> =
            gens.iter().map(|g| AbsGen::from_index(g.as_u64()? as usize)).collect::<Option<_>>()?;
        let c: Rational = t.get(1)?.as_str()?.parse().ok()?;
        out.add_term(AbsMono::from_gens(gens), c);
    }
    Some(out)
}

/// Re-evaluates a certificate: its relation must evaluate to zero and reproduce the digest.
pub fn recheck_certificate(engine: &Engine, cert: &serde_json::Value) -> Result<bool, RelError> {
    let bad = |m: &str| RelError::Certificate(m.to_string());
    let lam = cert["lambda"].as_array().ok_or_else(|| bad("lambda"))?;
    let (l1, l2) = (lam.first().and_then(|x| x.as_i64()), lam.get(1).and_then(|x| x.as_i64()));
    let lambda = Partition::new(l1.ok_or_else(|| bad("lambda"))?, l2.ok_or_else(|| bad("lambda"))?)
        .map_err(|e| bad(&e.to_string()))?;
    let v = abspoly_from_json(&cert["abspoly"]).ok_or_else(|| bad("abspoly"))?;
    let value = engine.images()?.eval_abs(&v);
    Ok(value.is_zero() && cert["digest"].as_str() == Some(certificate_digest(lambda, &v, &value).as_str()))
}

/// Best fit of a candidate by the relvectors: the combination agreeing with it
/// on the echelon pivots of the space, and what is left over.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SpanResidual {
    /// Coefficients on `space.relvectors`.
    pub coefficients: Vec<String>,
    pub terms: usize,
    pub listing: Vec<ResidualTerm>,
}

pub fn span_residual(candidate: &AbsPoly, space: &RelationSpace) -> Result<SpanResidual, RelError> {
    let lambda = space.lambda;
    if !candidate.is_zero() && candidate.bidegree() != Some((lambda.l1, lambda.l2)) {
        return Err(RelError::Bidegree { expected: lambda, found: bidegree_text(candidate) });
    }
    let ms = abs_monomials(lambda);
    let coords = |p: &AbsPoly| p.coordinates(&ms).expect("bihomogeneous of bidegree λ");
    let rel: Vec<Vec<Rational>> = space.relvectors.iter().map(coords).collect();
    let cand = coords(candidate);
    let (pivots, _) = pivot_columns(&rel);
    // Σ_k c_k rel_k[p] = cand[p] on the pivots: kernel of [rel_k[p] | −cand[p]]
    let mut a = QMatrix::new(rel.len() + 1);
    for &p in &pivots {
        let mut row: SparseRow = rel.iter().enumerate().map(|(k, r)| (k, r[p].clone())).collect();
        row.push((rel.len(), -cand[p].clone()));
        a.push_row(row.into_iter().filter(|(_, c)| !c.is_zero()).collect()).expect("columns in range");
    }
    let kernel = crate::nullspace::null_dense(&a);
    let v = kernel.vectors().iter().find(|v| !v[rel.len()].is_zero()).expect("pivot block is invertible");
    let coefficients: Vec<Rational> = v[..rel.len()].iter().map(|c| c / &v[rel.len()]).collect();
    let fit = combine(&space.relvectors, &coefficients);
    let residual = candidate.sub(&fit);
    let listing = residual
        .terms()
        .take(RESIDUAL_LISTING_CAP)
        .map(|(m, c)| ResidualTerm { monomial: m.to_string(), coeff: c.to_string() })
        .collect();
    Ok(SpanResidual {
        coefficients: coefficients.iter().map(Rational::to_string).collect(),
        terms: residual.len(),
        listing,
    })
}

/// How a published relation compares with a computed space.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PublishedStatus {
    /// In the span and evaluates to zero.
    Verified,
    /// In the span, yet the evaluation leaves a residual.
    Discrepancy,
    /// Outside the span.
    NotInSpace,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PublishedCheck {
    pub name: String,
    pub lambda: Partition,
    pub membership: bool,
    pub evaluation: ZeroReport,
    pub status: PublishedStatus,
    /// Present when the candidate is outside the span.
    pub fit: Option<SpanResidual>,
}

/// Membership in the computed space first, exact evaluation of `Φ(candidate)` second.
pub fn check_published(
    engine: &Engine,
    name: &str,
    candidate: &AbsPoly,
    lambda: Partition,
) -> Result<PublishedCheck, RelError> {
    let space = relation_space(engine, lambda)?;
    let member = membership(candidate, &space)?;
    let key = format!("phizero:v1:{}", sha256_hex(candidate.to_string().as_bytes()));
    let evaluation = engine.memo_json(&key, || Ok::<_, RelError>(verify_zero(engine.pair(), &engine.catalog().phi(candidate))?))?;
    let status = match (member, evaluation.zero) {
        (true, true) => PublishedStatus::Verified,
        (true, false) => PublishedStatus::Discrepancy,
        (false, _) => PublishedStatus::NotInSpace,
    };
    let fit = if member { None } else { Some(span_residual(candidate, &space)?) };
    Ok(PublishedCheck { name: name.to_string(), lambda, membership: member, evaluation, status, fit })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SourceKind {
    Trace,
    Phi,
}

/// A bundled transcription of an explicit relation.
#[derive(Debug, Clone, Copy)]
pub struct PublishedRelation {
    pub name: &'static str,
    pub file: &'static str,
    pub lambda: (u32, u32),
    pub kind: SourceKind,
    /// As printed, or a corrected reading.
    pub printed: bool,
    pub source: &'static str,
}

macro_rules! bundled {
    ($name:expr, $file:literal, $l1:expr, $l2:expr, $kind:ident, $printed:expr) => {
        PublishedRelation {
            name: $name,
            file: $file,
            lambda: ($l1, $l2),
            kind: SourceKind::$kind,
            printed: $printed,
            source: include_str!(concat!("../data/", $file)),
        }
    };
}

pub const PUBLISHED: [PublishedRelation; 6] = [
    bundled!("v'(6,6)", "v66prime.trace", 6, 6, Trace, true),
    bundled!("v'(6,6)", "v66prime_corrected.trace", 6, 6, Trace, false),
    bundled!("v'(6,6)", "v66prime.phi", 6, 6, Phi, true),
    bundled!("v(7,5)", "v75.phi", 7, 5, Phi, true),
    bundled!("v''(6,6)", "v66second.phi", 6, 6, Phi, true),
    bundled!("v''(6,6)", "v66second_rescaled.phi", 6, 6, Phi, false),
];

pub fn published(file: &str) -> Option<&'static PublishedRelation> {
    PUBLISHED.iter().find(|p| p.file == file)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceCheck {
    pub bidegree: String,
    pub evaluation: ZeroReport,
}

/// Exact evaluation of a trace polynomial, with its bidegree for diagnosis.
pub fn check_trace(engine: &Engine, e: &TraceExpr) -> Result<TraceCheck, RelError> {
    use crate::tracelang::Bidegree;
    let bidegree = match e.bidegree() {
        Bidegree::Homogeneous(a, b) => format!("({a},{b})"),
        Bidegree::NotHomogeneous => "mixed".into(),
        Bidegree::Zero => "zero".into(),
    };
    let key = format!("tracezero:v1:{}", sha256_hex(e.to_grammar().as_bytes()));
    let evaluation = engine.memo_json(&key, || Ok::<_, RelError>(verify_zero(engine.pair(), e)?))?;
    Ok(TraceCheck { bidegree, evaluation })
}
