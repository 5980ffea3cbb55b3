//! Evaluated images of the 30 generators and of monomials in them.

use std::collections::HashMap;
use std::sync::Arc;

use rayon::prelude::*;

use crate::genmat::{varset, EvalError, GenericPair};
use crate::glcat::{AbsGen, AbsMono, AbsPoly, Catalog, NGENS};
use crate::polyring::{CommPoly, Rational};
use crate::tracelang::TraceExpr;

/// `eval(f(e_g))` for each generator `g`, for some map `f` on trace expressions.
#[derive(Clone)]
pub struct GeneratorImages {
    polys: Vec<Arc<CommPoly>>,
}

impl GeneratorImages {
    /// Evaluates `f(e_g)` for every generator in parallel.
    pub fn compute(
        cat: &Catalog,
        pair: &GenericPair,
        f: impl Fn(&TraceExpr) -> TraceExpr + Sync,
    ) -> Result<Self, EvalError> {
        let polys = AbsGen::all()
            .collect::<Vec<_>>()
            .into_par_iter()
            .map(|g| pair.eval_trace_expr(&f(cat.basis_expr(g))).map(Arc::new))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(GeneratorImages { polys })
    }

    /// `eval(e_g)`.
    pub fn plain(cat: &Catalog, pair: &GenericPair) -> Result<Self, EvalError> {
        Self::compute(cat, pair, TraceExpr::clone)
    }

    pub fn from_polys(polys: Vec<CommPoly>) -> Self {
        assert_eq!(polys.len(), NGENS);
        GeneratorImages { polys: polys.into_iter().map(Arc::new).collect() }
    }

    pub fn get(&self, g: AbsGen) -> &CommPoly {
        &self.polys[g.index()]
    }

    pub fn polys(&self) -> impl Iterator<Item = &CommPoly> {
        self.polys.iter().map(|p| &**p)
    }

    /// Product image of each monomial. Shared prefixes of the ascending
    /// factor sequences are multiplied once, level by level in parallel.
    pub fn monomials(&self, monos: &[AbsMono]) -> Vec<Arc<CommPoly>> {
        let one = Arc::new(CommPoly::one(&varset()));
        let seqs: Vec<Vec<AbsGen>> = monos.iter().map(AbsMono::factors).collect();
        let mut results: Vec<Option<Arc<CommPoly>>> =
            seqs.iter().map(|s| s.is_empty().then(|| one.clone())).collect();
        let mut prev: HashMap<&[AbsGen], Arc<CommPoly>> = HashMap::from([(&[][..], one)]);
        let depth = seqs.iter().map(Vec::len).max().unwrap_or(0);
        for k in 1..=depth {
            let mut need: Vec<&[AbsGen]> = seqs.iter().filter(|s| s.len() >= k).map(|s| &s[..k]).collect();
            need.sort();
            need.dedup();
            let cur: HashMap<&[AbsGen], Arc<CommPoly>> = need
                .par_iter()
                .map(|&pre| {
                    let p = prev[&pre[..k - 1]].mul(self.get(pre[k - 1])).expect("shared variables");
                    (pre, Arc::new(p))
                })
                .collect();
            for (slot, s) in results.iter_mut().zip(&seqs) {
                if s.len() == k {
                    *slot = Some(cur[&s[..]].clone());
                }
            }
            prev = cur;
        }
        results.into_iter().map(|r| r.expect("every length visited")).collect()
    }

    /// `Σ c_m · image(m)`.
    pub fn eval_abs(&self, p: &AbsPoly) -> CommPoly {
        let monos: Vec<AbsMono> = p.terms().map(|(m, _)| *m).collect();
        let imgs = self.monomials(&monos);
        let mut out = CommPoly::zero(&varset());
        for ((_, c), img) in p.terms().zip(imgs) {
            out.add_scaled_assign(&img, c);
        }
        out
    }

    /// `eval(D(Φ(m)))` for a derivation `D` whose generator images are `d`:
    /// `Σ_k (Π_{l≠k} e_l) · d(e_k)` by the Leibniz rule.
    pub fn leibniz(&self, d: &GeneratorImages, m: &AbsMono) -> CommPoly {
        let factors = m.factors();
        let vars = varset();
        let mut out = CommPoly::zero(&vars);
        for k in 0..factors.len() {
            let mut acc = d.get(factors[k]).clone();
            for (l, &g) in factors.iter().enumerate() {
                if l != k {
                    acc = acc.mul(self.get(g)).expect("shared variables");
                }
            }
            out.add_scaled_assign(&acc, &Rational::one());
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::glcat::{abs_monomials_bideg, catalog};

    #[test]
    fn images_are_multiplicative() {
        let cat = catalog();
        let pair = GenericPair::new();
        let imgs = GeneratorImages::plain(cat, &pair).unwrap();
        let monos = abs_monomials_bideg(4, 4);
        let got = imgs.monomials(&monos);
        for (m, p) in monos.iter().zip(got) {
            let direct = pair.eval_trace_expr(&cat.phi(&AbsPoly::monomial(*m))).unwrap();
            assert_eq!(*p, direct, "{m}");
        }
    }

    #[test]
    fn leibniz_matches_symbolic_derivation() {
        let cat = catalog();
        let pair = GenericPair::new();
        let imgs = GeneratorImages::plain(cat, &pair).unwrap();
        let d = GeneratorImages::compute(cat, &pair, TraceExpr::delta1).unwrap();
        for m in abs_monomials_bideg(4, 2) {
            let direct = pair.eval_trace_expr(&cat.phi(&AbsPoly::monomial(m)).delta1()).unwrap();
            assert_eq!(imgs.leibniz(&d, &m), direct, "{m}");
        }
    }
}
