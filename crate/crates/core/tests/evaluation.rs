//! Properties that need the generic matrices.

use std::collections::BTreeMap;

use traceforge::genmat::GenericPair;
use traceforge::glcat::{catalog, AbsGen, AbsPoly};
use traceforge::polyring::Rational;
use traceforge::tracelang::{Letter, Word};

fn all_words(len: usize) -> impl Iterator<Item = Word> {
    (0u32..1 << len).map(move |bits| {
        Word::new((0..len).map(|i| if bits >> i & 1 == 1 { Letter::Y } else { Letter::X }).collect())
    })
}

/// Every word up to length 8 is evaluated in its own letter order; words in
/// one rotation class must agree.
#[test]
fn rotation_invariance_exhaustive_to_length_eight() {
    let pair = GenericPair::new();
    for len in 2..=8 {
        let mut classes: BTreeMap<Word, _> = BTreeMap::new();
        for w in all_words(len) {
            let t = pair.trace_word_uncached(&w).unwrap();
            let class = w.cyclic_normalize();
            match classes.get(&class) {
                Some(prev) => assert_eq!(prev, &t, "{w} vs {class}"),
                None => {
                    classes.insert(class, t);
                }
            }
        }
    }
}

#[test]
fn ladder_on_all_thirty_generators() {
    let cat = catalog();
    let pair = GenericPair::new();
    let ev = |p: &AbsPoly| pair.eval_trace_expr(&cat.phi(p)).unwrap();
    for g in AbsGen::all() {
        let e = cat.basis_expr(g);
        let (a, j) = (g.a() as i64, g.j() as i64);
        let up = pair.eval_trace_expr(&e.delta()).unwrap();
        let down = pair.eval_trace_expr(&e.delta1()).unwrap();
        let want_up = match g.j().checked_sub(1).and_then(|k| AbsGen::new(g.module(), k)) {
            Some(prev) => ev(&AbsPoly::gen(prev)).scale(&Rational::from_integer(j)),
            None => ev(&AbsPoly::zero()),
        };
        let want_down = match AbsGen::new(g.module(), g.j() + 1) {
            Some(next) => ev(&AbsPoly::gen(next)).scale(&Rational::from_integer(a - j)),
            None => ev(&AbsPoly::zero()),
        };
        assert_eq!(up, want_up, "Δ on {g}");
        assert_eq!(down, want_down, "Δ₁ on {g}");
        // [Δ, Δ₁] acts by the weight a − 2j
        let comm = pair.eval_trace_expr(&e.delta1().delta().sub(&e.delta().delta1())).unwrap();
        assert_eq!(comm, ev(&AbsPoly::gen(g)).scale(&Rational::from_integer(a - 2 * j)), "weight of {g}");
    }
}

#[test]
fn catalog_hwvs_killed_and_fixed() {
    let pair = GenericPair::new();
    for m in catalog().modules() {
        assert!(pair.eval_trace_expr(&m.hwv.delta()).unwrap().is_zero(), "Δ on W{}", m.index);
        assert_eq!(
            pair.eval_trace_expr(&m.hwv.subst_h()).unwrap(),
            pair.eval_trace_expr(&m.hwv).unwrap(),
            "h on W{}",
            m.index
        );
    }
}

#[test]
fn cache_does_not_change_values() {
    let cached = GenericPair::new();
    let plain = GenericPair::new();
    for w in all_words(6) {
        let a = cached.eval_word_trace(&w).unwrap();
        let again = cached.eval_word_trace(&w.rotate(1)).unwrap();
        assert_eq!(*a, *again);
        assert_eq!(*a, plain.trace_word_uncached(&w.cyclic_normalize()).unwrap());
    }
}
