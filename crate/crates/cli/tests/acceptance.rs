//! Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any failed.
//!
//! All arithmetic is exact, so every numeric comparison is equality
//! (tolerance zero). Runtime budgets are pinned below.

use std::collections::BTreeMap;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use traceforge::engine::{Engine, EngineConfig};
use traceforge::genmat::GenericPair;
use traceforge::glcat::{abs_monomials, abs_monomials_bideg, catalog, multiplicity, AbsGen, AbsPoly, Partition};
use traceforge::hwv::{hwv_basis, hwv_verify, hwv_verify_formal};
use traceforge::nullspace::{same_span, StreamMode};
use traceforge::polyring::Rational;
use traceforge::relfinder::{
    leading_analysis, membership, new_relations, orbit, published, relation_space, verify_zero,
};
use traceforge::syntax::{emit_phi, parse_phi, parse_trace, strip_comments};
use traceforge::tracelang::{Letter, TraceExpr, TraceMonomial, Word};

const TOLERANCE: i64 = 0;

const BUDGET_1: Duration = Duration::from_secs(10);
const BUDGET_2: Duration = Duration::from_secs(10);
const BUDGET_3: Duration = Duration::from_secs(5 * 60);
const BUDGET_4: Duration = Duration::from_secs(15 * 60);
const BUDGET_5: Duration = Duration::from_secs(5 * 60);
const BUDGET_6: Duration = Duration::from_secs(4 * 3600);

const TABLE: [((i64, i64), i64, usize, usize); 7] = [
    ((7, 5), 36, 155, 119),
    ((6, 6), 30, 185, 155),
    ((8, 5), 67, 203, 136),
    ((7, 6), 49, 252, 203),
    ((9, 5), 96, 284, 188),
    ((8, 6), 106, 390, 284),
    ((7, 7), 28, 418, 390),
];

const R_12: [((i64, i64), usize); 2] = [((7, 5), 1), ((6, 6), 2)];
const R_13_14: [((i64, i64), usize); 5] = [((8, 5), 1), ((7, 6), 2), ((9, 5), 2), ((8, 6), 6), ((7, 7), 2)];

const LEAD_12: &[&str] = &["u5,0*u8,0", "u5,0*u8,1", "u5,1*u8,0", "u5,1*u8,1", "u7,0^2"];
const LEAD_13: &[&str] = &[
    "u5,0*u9,0", "u5,0*u9,1", "u5,1*u9,0", "u5,0*u9,2", "u5,1*u9,1", "u5,1*u9,2", "u5,0*u10,0", "u5,1*u10,0",
];
const LEAD_14: &[&str] = &[
    "u5,0*u11,0", "u5,0*u11,1", "u5,1*u11,0", "u5,0*u11,2", "u5,1*u11,1", "u5,0*u11,3", "u5,1*u11,2",
    "u5,1*u11,3", "u7,0*u9,0", "u7,0*u9,1", "u7,0*u9,2", "u7,0*u10,0", "u8,0^2", "u8,0*u8,1", "u8,1^2",
];
/// New relations by degree, as `(λ, multiplicity)`.
const NEW: [(u32, &[((u32, u32), usize)]); 3] = [
    (12, &[((7, 5), 1), ((6, 6), 2)]),
    (13, &[((8, 5), 1), ((7, 6), 2)]),
    (14, &[((9, 5), 1), ((8, 6), 3), ((7, 7), 1)]),
];
const OLD_NEW_14: [((u32, u32), usize, usize); 3] = [((9, 5), 1, 1), ((8, 6), 3, 3), ((7, 7), 1, 1)];

fn lam((a, b): (i64, i64)) -> Partition {
    Partition::new(a, b).unwrap()
}

struct Report {
    failed: usize,
}

impl Report {
    fn line(&mut self, id: &str, ok: bool, took: Duration, budget: Option<Duration>, note: String) {
        let in_time = budget.is_none_or(|b| took <= b);
        let pass = ok && in_time;
        if !pass {
            self.failed += 1;
        }
        let time = match budget {
            Some(b) => format!("{:.2}s of {}s", took.as_secs_f64(), b.as_secs()),
            None => format!("{:.2}s", took.as_secs_f64()),
        };
        println!("criterion {id:<4} {}  [{time}] {note}", if pass { "PASS" } else { "FAIL" });
    }

    fn info(&self, id: &str, note: String) {
        println!("criterion {id:<4} INFO  {note}");
    }
}

fn criterion_1(rep: &mut Report) {
    let t = Instant::now();
    let got: Vec<i64> = TABLE.iter().map(|&(l, ..)| multiplicity(lam(l))).collect();
    let want: Vec<i64> = TABLE.iter().map(|&(_, m, ..)| m).collect();
    let ok = got.iter().zip(&want).all(|(g, w)| (g - w).abs() <= TOLERANCE);
    rep.line("1", ok, t.elapsed(), Some(BUDGET_1), format!("m = {got:?}"));
}

fn criterion_2(rep: &mut Report) {
    let t = Instant::now();
    let got: Vec<(usize, usize)> = TABLE
        .iter()
        .map(|&((a, b), ..)| (abs_monomials(lam((a, b))).len(), abs_monomials_bideg(a as u32 + 1, b as u32 - 1).len()))
        .collect();
    let want: Vec<(usize, usize)> = TABLE.iter().map(|&(_, _, p, q)| (p, q)).collect();
    rep.line("2", got == want, t.elapsed(), Some(BUDGET_2), format!("(P,Q) = {got:?}"));
}

fn criterion_3(rep: &mut Report) {
    let t = Instant::now();
    let mut ok = true;
    let mut notes = Vec::new();
    for &(l, m, _, q) in &TABLE {
        let b = hwv_basis(lam(l), lam(l).degree() > 12).unwrap();
        let killed = hwv_verify_formal(&b.vectors).passed();
        ok &= b.vectors.len() as i64 == m && b.rank == q && killed;
        notes.push(format!("{l:?}:{}/{}", b.vectors.len(), b.rank));
    }
    rep.line("3", ok, t.elapsed(), Some(BUDGET_3), format!("vectors/rank {}", notes.join(" ")));
}

fn criterion_4(rep: &mut Report, e: &Engine) {
    let t = Instant::now();
    let mut ok = true;
    let mut total = 0;
    for &(l, r) in &R_12 {
        let s = relation_space(e, lam(l)).unwrap();
        ok &= s.r == r;
        total += orbit(&s).len();
    }
    ok &= total == 5;
    rep.line("4", ok, t.elapsed(), Some(BUDGET_4), format!("orbit vectors {total}"));
}

fn bundled(file: &str) -> String {
    strip_comments(published(file).expect("bundled").source)
}

fn criterion_5(rep: &mut Report, e: &Engine) {
    let t = Instant::now();
    let trace = verify_zero(e.pair(), &parse_trace(&bundled("v66prime.trace")).unwrap()).unwrap();
    let s75 = relation_space(e, lam((7, 5))).unwrap();
    let s66 = relation_space(e, lam((6, 6))).unwrap();
    let v75 = parse_phi(&bundled("v75.phi")).unwrap();
    let v66 = parse_phi(&bundled("v66second.phi")).unwrap();
    let m75 = membership(&v75, &s75).unwrap();
    let m66 = membership(&v66, &s66).unwrap();
    let r75 = verify_zero(e.pair(), &e.catalog().phi(&v75)).unwrap();
    let r66 = verify_zero(e.pair(), &e.catalog().phi(&v66)).unwrap();
    let note = format!(
        "trace form of v'(6,6): {} residual terms; v(7,5): member {m75}, residual {}; v''(6,6): member {m66}, residual {}",
        trace.terms, r75.terms, r66.terms
    );
    rep.line("5", trace.zero && m75 && m66, t.elapsed(), Some(BUDGET_5), note);

    let phi_first = parse_phi(&bundled("v66prime.phi")).unwrap();
    let corrected = verify_zero(e.pair(), &parse_trace(&bundled("v66prime_corrected.trace")).unwrap()).unwrap();
    let rescaled = parse_phi(&bundled("v66second_rescaled.phi")).unwrap();
    rep.info(
        "5",
        format!(
            "Φ-form of v'(6,6): member {}, zero {}; corrected trace form zero {}; rescaled v''(6,6): member {}, zero {}",
            membership(&phi_first, &s66).unwrap(),
            verify_zero(e.pair(), &e.catalog().phi(&phi_first)).unwrap().zero,
            corrected.zero,
            membership(&rescaled, &s66).unwrap(),
            verify_zero(e.pair(), &e.catalog().phi(&rescaled)).unwrap().zero,
        ),
    );
}

fn criterion_6(rep: &mut Report, e: &Engine) {
    let t = Instant::now();
    let got: Vec<usize> = R_13_14.iter().map(|&(l, _)| relation_space(e, lam(l)).unwrap().r).collect();
    let want: Vec<usize> = R_13_14.iter().map(|&(_, r)| r).collect();
    rep.line("6", got == want, t.elapsed(), Some(BUDGET_6), format!("r = {got:?}"));
}

/// Bidegree counts of `Σ c_λ S_λ` in degree `d`.
fn schur_counts(parts: &[((u32, u32), usize)]) -> BTreeMap<(u32, u32), usize> {
    let mut out = BTreeMap::new();
    for &((l1, l2), c) in parts {
        for k in 0..=l1 - l2 {
            *out.entry((l1 - k, l2 + k)).or_default() += c;
        }
    }
    out
}

fn criterion_7(rep: &mut Report, e: &Engine) {
    for (d, want) in [(12, LEAD_12), (13, LEAD_13), (14, LEAD_14)] {
        let t = Instant::now();
        let r = leading_analysis(e, d).unwrap();
        let mut got: Vec<String> = r.leading.iter().map(ToString::to_string).collect();
        let mut want: Vec<String> = want.iter().map(|s| s.to_string()).collect();
        let mut counts = BTreeMap::new();
        for m in &r.leading {
            *counts.entry(m.bidegree()).or_insert(0) += 1;
        }
        let parts = NEW.iter().find(|(k, _)| *k == d).unwrap().1;
        let gf = counts == schur_counts(parts);
        got.sort();
        want.sort();
        let note = format!("{} leading monomials, generating function {}", got.len(), if gf { "matches" } else { "differs" });
        rep.line(&format!("7.{d}"), got == want && gf, t.elapsed(), None, note);
    }
}

fn criterion_8(rep: &mut Report, e: &Engine) {
    let t = Instant::now();
    let r = new_relations(e, 14).unwrap();
    let got: Vec<((u32, u32), usize, usize)> = r.entries.iter().map(|x| ((x.lambda.l1, x.lambda.l2), x.old, x.new)).collect();
    rep.line("8", got == OLD_NEW_14, t.elapsed(), None, format!("(λ, old, new) = {got:?}"));
}

fn trace_corpus() -> Vec<TraceExpr> {
    let mut words = Vec::new();
    for len in 2..=4u32 {
        for bits in 0..1u32 << len {
            let w = Word::new((0..len).map(|i| if bits >> i & 1 == 1 { Letter::Y } else { Letter::X }).collect());
            if w.is_cyclic_canonical() {
                words.push(w);
            }
        }
    }
    let singles: Vec<TraceExpr> = words.iter().map(|w| TraceExpr::trace_word(w.clone()).unwrap()).collect();
    let mut out = singles.clone();
    for (i, a) in words.iter().enumerate().step_by(3) {
        for b in words.iter().skip(i).step_by(4) {
            let m = TraceMonomial::new([a.clone(), b.clone()]).unwrap();
            out.push(TraceExpr::monomial(m).add(&singles[i].scale(&Rational::from_integer(-2))));
        }
    }
    out
}

fn criterion_9(rep: &mut Report, e: &Engine) {
    let pair = GenericPair::new();

    let t = Instant::now();
    let corpus = trace_corpus();
    let mut bad = 0;
    for a in &corpus {
        for b in &corpus {
            let ab = a.mul(b);
            bad += usize::from(ab.delta() != a.delta().mul(b).add(&a.mul(&b.delta())));
            bad += usize::from(ab.delta1() != a.delta1().mul(b).add(&a.mul(&b.delta1())));
        }
    }
    rep.line("9a", bad == 0, t.elapsed(), None, format!("Leibniz rule on {} pairs, {bad} failures", corpus.len().pow(2)));

    let t = Instant::now();
    let mut bad = 0;
    let mut count = 0;
    for len in 2..=8usize {
        for bits in 0..1u32 << len {
            let w = Word::new((0..len).map(|i| if bits >> i & 1 == 1 { Letter::Y } else { Letter::X }).collect());
            let base = pair.trace_word_uncached(&w).unwrap();
            for k in 1..len {
                count += 1;
                bad += usize::from(w.rotate(k).cyclic_normalize() != w.cyclic_normalize());
            }
            bad += usize::from(*pair.eval_word_trace(&w).unwrap() != base);
            bad += usize::from(pair.trace_word_uncached(&w.rotate(1)).unwrap() != base);
        }
    }
    rep.line("9b", bad == 0, t.elapsed(), None, format!("cyclic invariance to length 8, {count} rotations, {bad} failures"));

    let t = Instant::now();
    let cat = catalog();
    let ev = |p: &AbsPoly| pair.eval_trace_expr(&cat.phi(p)).unwrap();
    let mut bad = 0;
    for g in AbsGen::all() {
        let p = AbsPoly::gen(g);
        let weight = Rational::from_integer(g.a() as i64 - 2 * g.j() as i64);
        bad += usize::from(p.abs_delta1().abs_delta().sub(&p.abs_delta().abs_delta1()) != p.scale(&weight));
        let e_g = cat.basis_expr(g);
        bad += usize::from(pair.eval_trace_expr(&e_g.delta()).unwrap() != ev(&p.abs_delta()));
        bad += usize::from(pair.eval_trace_expr(&e_g.delta1()).unwrap() != ev(&p.abs_delta1()));
    }
    rep.line("9c", bad == 0, t.elapsed(), None, format!("sl2 ladder on 30 generators, {bad} failures"));

    let t = Instant::now();
    let mut bad = 0;
    for m in cat.modules() {
        bad += usize::from(!pair.eval_trace_expr(&m.hwv.delta()).unwrap().is_zero());
        bad += usize::from(pair.eval_trace_expr(&m.hwv.subst_h()).unwrap() != pair.eval_trace_expr(&m.hwv).unwrap());
    }
    for l in [(7, 5), (6, 6)] {
        let b = hwv_basis(lam(l), false).unwrap();
        bad += hwv_verify(&b.vectors, cat, &pair).unwrap().failures.len();
    }
    rep.line("9d", bad == 0, t.elapsed(), None, format!("hwv checks by evaluation, {bad} failures"));

    let t = Instant::now();
    let mut bad = 0;
    for &(l, ..) in &TABLE {
        let ms = abs_monomials(lam(l));
        let coords = |blocked| -> Vec<Vec<Rational>> {
            hwv_basis(lam(l), blocked).unwrap().vectors.iter().map(|v| v.coordinates(&ms).unwrap()).collect()
        };
        bad += usize::from(!same_span(&coords(true), &coords(false)));
    }
    rep.line("9e", bad == 0, t.elapsed(), None, format!("blocked vs unblocked on 7 partitions, {bad} failures"));

    let t = Instant::now();
    let exact = Engine::new(EngineConfig { mode: StreamMode::Exact, ..Default::default() }).unwrap();
    let mut bad = 0;
    for l in [(7, 5), (6, 6), (8, 5), (7, 6)] {
        let a = relation_space(&exact, lam(l)).unwrap();
        let b = relation_space(e, lam(l)).unwrap();
        bad += usize::from(!same_span(&a.zeta, &b.zeta));
    }
    rep.line("9f", bad == 0, t.elapsed(), None, format!("modular vs exact on 4 systems, {bad} failures"));

    let t = Instant::now();
    let mut polys: Vec<AbsPoly> = ["v66prime.phi", "v75.phi", "v66second.phi", "v66second_rescaled.phi"]
        .iter()
        .map(|f| parse_phi(&bundled(f)).unwrap())
        .collect();
    for l in [(7, 5), (6, 6)] {
        polys.extend(relation_space(e, lam(l)).unwrap().relvectors.iter().cloned());
    }
    let bad = polys.iter().filter(|p| parse_phi(&emit_phi(p)).ok().as_ref() != Some(*p)).count();
    rep.line("9g", bad == 0, t.elapsed(), None, format!("Φ round trips on {} polynomials, {bad} failures", polys.len()));
}

/// The binary agrees with the verdicts and a second run is served by the cache.
fn cli_checks(rep: &mut Report) {
    let t = Instant::now();
    let dir = tempfile::tempdir().unwrap();
    let run = || {
        let out = Command::new(env!("CARGO_BIN_EXE_traceforge"))
            .args(["--format", "json", "--cache-dir"])
            .arg(dir.path())
            .args(["reproduce", "--paper-tables", "--extended"])
            .output()
            .unwrap();
        let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
        (out.status.success(), v)
    };
    let (ok1, first) = run();
    let (ok2, second) = run();
    let verdict = first["items"].as_array().unwrap().iter().all(|i| i["passed"] == true || i["informational"] == true);
    let stats = &second["stats"];
    let idle = stats["word_evals"] == 0 && stats["image_evals"] == 0 && stats["system_evals"] == 0;
    let strip = |v: &serde_json::Value| -> Vec<serde_json::Value> {
        v["items"].as_array().unwrap().iter().map(|i| serde_json::json!([i["id"], i["passed"], i["detail"]])).collect()
    };
    let same = strip(&first) == strip(&second);
    rep.line(
        "cli",
        ok1 == verdict && ok2 == verdict && idle && same,
        t.elapsed(),
        None,
        format!("exit status follows verdict ({verdict}), second run evaluates nothing: {idle}, identical: {same}"),
    );
}

fn main() -> ExitCode {
    let mut rep = Report { failed: 0 };
    let engine = Engine::new(EngineConfig::default()).unwrap();
    criterion_1(&mut rep);
    criterion_2(&mut rep);
    criterion_3(&mut rep);
    criterion_4(&mut rep, &engine);
    criterion_5(&mut rep, &engine);
    criterion_6(&mut rep, &engine);
    criterion_7(&mut rep, &engine);
    criterion_8(&mut rep, &engine);
    criterion_9(&mut rep, &engine);
    cli_checks(&mut rep);
    println!("{} failed", rep.failed);
    if rep.failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
