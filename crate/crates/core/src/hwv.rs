//! Highest weight vectors of a given bidegree in `K[G₀]`: the null space of
//! the matrix of Δ from bidegree λ to bidegree (λ₁ + 1, λ₂ − 1).

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::genmat::{EvalError, GenericPair};
use crate::glcat::{abs_monomials, abs_monomials_bideg, AbsMono, AbsPoly, Catalog, Partition, NMODULES};
use crate::images::GeneratorImages;
use crate::nullspace::{null_dense, QMatrix};
use crate::polyring::Rational;
use crate::tracelang::TraceExpr;

/// Largest total degree handled unless configured otherwise.
pub const DEFAULT_DEGREE_CAP: u32 = 14;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum HwvError {
    #[error("total degree {degree} of {lambda} exceeds the cap {cap}")]
    DegreeCap { lambda: Partition, degree: u32, cap: u32 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct HwvBasis {
    pub lambda: Partition,
    /// Number of monomials of bidegree λ.
    pub p: usize,
    /// Number of monomials of bidegree (λ₁ + 1, λ₂ − 1).
    pub q: usize,
    /// Rank of the Δ matrix.
    pub rank: usize,
    pub vectors: Vec<AbsPoly>,
}

/// Δ restricted to the given source monomials, in the given target monomials.
fn alpha(sources: &[AbsMono], targets: &[AbsMono]) -> QMatrix {
    let tindex: BTreeMap<&AbsMono, usize> = targets.iter().enumerate().map(|(i, m)| (m, i)).collect();
    let mut rows: Vec<Vec<(usize, Rational)>> = vec![Vec::new(); targets.len()];
    for (col, m) in sources.iter().enumerate() {
        for (t, c) in AbsPoly::monomial(*m).abs_delta().terms() {
            rows[tindex[t]].push((col, c.clone()));
        }
    }
    let mut a = QMatrix::new(sources.len());
    for r in rows {
        a.push_row(r).expect("columns in range");
    }
    a
}

fn solve(sources: &[AbsMono], targets: &[AbsMono]) -> (usize, Vec<AbsPoly>) {
    let a = alpha(sources, targets);
    let basis = null_dense(&a);
    let rank = sources.len() - basis.dim();
    (rank, basis.vectors().iter().map(|v| AbsPoly::from_coordinates(sources, v)).collect())
}

/// Basis of the highest weight vectors of bidegree λ. With `blocked`, the
/// system splits by the module multidegree `(m_1, …, m_12)` which Δ preserves;
/// blocks are solved in parallel and concatenated in multidegree order.
pub fn hwv_basis_capped(lambda: Partition, blocked: bool, cap: u32) -> Result<HwvBasis, HwvError> {
    if lambda.degree() > cap {
        return Err(HwvError::DegreeCap { lambda, degree: lambda.degree(), cap });
    }
    let sources = abs_monomials(lambda);
    let targets = lambda.raised().map_or_else(Vec::new, |(p, q)| abs_monomials_bideg(p, q));
    let (rank, vectors) = if blocked {
        let mut blocks: BTreeMap<[u8; NMODULES], (Vec<AbsMono>, Vec<AbsMono>)> = BTreeMap::new();
        for m in &sources {
            blocks.entry(m.module_degrees()).or_default().0.push(*m);
        }
        for m in &targets {
            blocks.entry(m.module_degrees()).or_default().1.push(*m);
        }
        let solved: Vec<(usize, Vec<AbsPoly>)> =
            blocks.into_values().collect::<Vec<_>>().into_par_iter().map(|(s, t)| solve(&s, &t)).collect();
        solved.into_iter().fold((0, Vec::new()), |(r, mut v), (br, bv)| {
            v.extend(bv);
            (r + br, v)
        })
    } else {
        solve(&sources, &targets)
    };
    Ok(HwvBasis { lambda, p: sources.len(), q: targets.len(), rank, vectors })
}

/// [`hwv_basis_capped`] with the default degree cap.
pub fn hwv_basis(lambda: Partition, blocked: bool) -> Result<HwvBasis, HwvError> {
    hwv_basis_capped(lambda, blocked, DEFAULT_DEGREE_CAP)
}

/// Blocked above total degree 12.
pub fn default_blocked(lambda: Partition) -> bool {
    lambda.degree() > 12
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HwvFailure {
    pub index: usize,
    pub check: &'static str,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Default)]
pub struct HwvReport {
    pub checked: usize,
    pub failures: Vec<HwvFailure>,
}

impl HwvReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Formal check `abs_delta(v) = 0` only.
pub fn hwv_verify_formal(vectors: &[AbsPoly]) -> HwvReport {
    let failures = vectors
        .iter()
        .enumerate()
        .filter(|(_, v)| !v.abs_delta().is_zero())
        .map(|(index, _)| HwvFailure { index, check: "abs_delta" })
        .collect();
    HwvReport { checked: vectors.len(), failures }
}

/// Full check: `abs_delta(v) = 0`, `eval(Δ Φ(v)) = 0` and
/// `eval(h Φ(v)) = eval(Φ(v))`. Δ and h act on traces symbolically per
/// generator; products are assembled from the evaluated factors.
pub fn hwv_verify(vectors: &[AbsPoly], cat: &Catalog, pair: &GenericPair) -> Result<HwvReport, EvalError> {
    let mut report = hwv_verify_formal(vectors);
    let plain = GeneratorImages::plain(cat, pair)?;
    let delta = GeneratorImages::compute(cat, pair, TraceExpr::delta)?;
    let h = GeneratorImages::compute(cat, pair, TraceExpr::subst_h)?;
    let mut monos: Vec<AbsMono> = vectors.iter().flat_map(|v| v.terms().map(|(m, _)| *m)).collect();
    monos.sort();
    monos.dedup();
    let plain_m = plain.monomials(&monos);
    let h_m = h.monomials(&monos);
    let delta_m: Vec<_> = monos.par_iter().map(|m| plain.leibniz(&delta, m)).collect();
    let index: BTreeMap<AbsMono, usize> = monos.iter().enumerate().map(|(i, m)| (*m, i)).collect();
    let evaluated: Vec<Vec<&'static str>> = vectors
        .par_iter()
        .map(|v| {
            let vars = crate::genmat::varset();
            let (mut d, mut hv, mut pv) = (
                crate::polyring::CommPoly::zero(&vars),
                crate::polyring::CommPoly::zero(&vars),
                crate::polyring::CommPoly::zero(&vars),
            );
            for (m, c) in v.terms() {
                let i = index[m];
                d.add_scaled_assign(&delta_m[i], c);
                hv.add_scaled_assign(&h_m[i], c);
                pv.add_scaled_assign(&plain_m[i], c);
            }
            let mut fails = Vec::new();
            if !d.is_zero() {
                fails.push("eval delta");
            }
            if hv != pv {
                fails.push("eval h");
            }
            fails
        })
        .collect();
    for (index, fails) in evaluated.into_iter().enumerate() {
        report.failures.extend(fails.into_iter().map(|check| HwvFailure { index, check }));
    }
    report.failures.sort_by_key(|f| f.index);
    Ok(report)
}

/// `{"lambda": [l1,l2], "P", "Q", "rank", "vectors": [[[gen indices], "c"], ...]}`.
pub fn basis_json(b: &HwvBasis) -> serde_json::Value {
    serde_json::json!({
        "lambda": [b.lambda.l1, b.lambda.l2],
        "P": b.p,
        "Q": b.q,
        "rank": b.rank,
        "vectors": b.vectors.iter().map(abspoly_json).collect::<Vec<_>>(),
    })
}

/// Terms as `[[generator indices with repetition], "coefficient"]`.
pub fn abspoly_json(p: &AbsPoly) -> serde_json::Value {
    serde_json::Value::Array(
        p.terms()
            .map(|(m, c)| {
                let gens: Vec<usize> = m.factors().iter().map(|g| g.index()).collect();
                serde_json::json!([gens, c.to_string()])
            })
            .collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::glcat::{catalog, multiplicity, AbsGen};
    use crate::nullspace::same_span;

    fn lam(a: i64, b: i64) -> Partition {
        Partition::new(a, b).unwrap()
    }

    fn u(i: usize, j: usize) -> AbsPoly {
        AbsPoly::gen(AbsGen::new(i, j).unwrap())
    }

    fn coords(b: &HwvBasis) -> Vec<Vec<Rational>> {
        let ms = abs_monomials(b.lambda);
        b.vectors.iter().map(|v| v.coordinates(&ms).unwrap()).collect()
    }

    #[test]
    fn lambda_2_2() {
        let b = hwv_basis(lam(2, 2), false).unwrap();
        assert_eq!((b.p, b.q, b.vectors.len()), (4, 2, 2));
        // Sym²W(2,0) ⊃ W(2,2): Δ(u10 u12) = 2 u10 u11 = Δ(u11²)
        let sym = u(1, 0).mul(&u(1, 2)).sub(&u(1, 1).mul(&u(1, 1)));
        let space = coords(&b);
        let ms = abs_monomials(b.lambda);
        assert!(crate::nullspace::in_span(&space, &sym.coordinates(&ms).unwrap()));
        assert!(crate::nullspace::in_span(&space, &u(4, 0).coordinates(&ms).unwrap()));
    }

    #[test]
    fn degree_twelve_counts() {
        for (a, bb, p, q, s) in [(7, 5, 155, 119, 36), (6, 6, 185, 155, 30)] {
            let b = hwv_basis(lam(a, bb), false).unwrap();
            assert_eq!((b.p, b.q, b.rank, b.vectors.len()), (p, q, q, s));
            assert!(hwv_verify_formal(&b.vectors).passed());
        }
    }

    #[test]
    fn blocked_equals_unblocked() {
        for (a, bb) in [(7, 5), (6, 6), (5, 3), (4, 4)] {
            let un = hwv_basis(lam(a, bb), false).unwrap();
            let bl = hwv_basis(lam(a, bb), true).unwrap();
            assert_eq!(un.rank, bl.rank);
            assert!(same_span(&coords(&un), &coords(&bl)));
            let mut x = un.vectors.clone();
            let mut y = bl.vectors.clone();
            x.sort_by_key(|v| format!("{v}"));
            y.sort_by_key(|v| format!("{v}"));
            assert_eq!(x, y);
        }
    }

    #[test]
    fn multiplicity_agrees_for_small_partitions() {
        for d in 2..=10i64 {
            for b in 0..=d / 2 {
                let l = lam(d - b, b);
                assert_eq!(hwv_basis(l, true).unwrap().vectors.len() as i64, multiplicity(l), "{l}");
            }
        }
    }

    #[test]
    fn cap_is_enforced() {
        assert!(matches!(hwv_basis(lam(8, 7), false), Err(HwvError::DegreeCap { .. })));
        assert!(hwv_basis_capped(lam(8, 7), true, 15).is_ok());
    }

    #[test]
    fn evaluation_checks_and_negative_control() {
        let cat = catalog();
        let pair = GenericPair::new();
        let b = hwv_basis(lam(5, 3), false).unwrap();
        let rep = hwv_verify(&b.vectors, cat, &pair).unwrap();
        assert!(rep.passed(), "{rep:?}");
        assert!(hwv_verify(&[u(4, 0)], cat, &pair).unwrap().passed());
        let mut bad = b.vectors[0].clone();
        let m = abs_monomials(b.lambda).into_iter().find(|m| !AbsPoly::monomial(*m).abs_delta().is_zero()).unwrap();
        bad.add_term(m, Rational::from_integer(1));
        let rep = hwv_verify_formal(&[bad]);
        assert_eq!(rep.failures, vec![HwvFailure { index: 0, check: "abs_delta" }]);
    }
}
