use std::fmt;

use super::{PolyError, Rational};

/// Default truncation bound for series work.
pub const DEFAULT_SERIES_BOUND: u32 = 14;

/// Bivariate power series in `t,u` truncated to total degree `bound`.
#[derive(Clone, PartialEq, Eq)]
pub struct BiSeries {
    bound: u32,
    /// Row-major over `p`, each row holding `q = 0..=bound-p`.
    coeffs: Vec<Rational>,
}

fn index(bound: u32, p: u32, q: u32) -> usize {
    // rows p = 0..p-1 contribute (bound+1) + bound + ... entries
    let p = p as usize;
    let b = bound as usize;
    p * (b + 1) - p * (p.saturating_sub(1)) / 2 + q as usize
}

impl BiSeries {
    pub fn zero(bound: u32) -> Self {
        let n = (bound as usize + 1) * (bound as usize + 2) / 2;
        BiSeries { bound, coeffs: vec![Rational::zero(); n] }
    }

    pub fn one(bound: u32) -> Self {
        let mut s = Self::zero(bound);
        s.set(0, 0, Rational::one());
        s
    }

    pub fn bound(&self) -> u32 {
        self.bound
    }

    /// Coefficient of `t^p u^q`; zero beyond the truncation bound.
    pub fn coeff(&self, p: u32, q: u32) -> Rational {
        if p + q > self.bound {
            return Rational::zero();
        }
        self.coeffs[index(self.bound, p, q)].clone()
    }

    /// Sets a coefficient; terms beyond the bound are silently dropped.
    pub fn set(&mut self, p: u32, q: u32, c: Rational) {
        if p + q <= self.bound {
            let i = index(self.bound, p, q);
            self.coeffs[i] = c;
        }
    }

    pub fn add_to(&mut self, p: u32, q: u32, c: &Rational) {
        if p + q <= self.bound {
            let i = index(self.bound, p, q);
            self.coeffs[i] += c;
        }
    }

    /// Nonzero terms `(p, q, coeff)` ordered by total degree then descending `p`.
    pub fn terms(&self) -> Vec<(u32, u32, Rational)> {
        let mut out = Vec::new();
        for d in 0..=self.bound {
            for p in (0..=d).rev() {
                let c = self.coeff(p, d - p);
                if !c.is_zero() {
                    out.push((p, d - p, c));
                }
            }
        }
        out
    }

    pub fn add(&self, other: &BiSeries) -> Result<BiSeries, PolyError> {
        if self.bound != other.bound {
            return Err(PolyError::BoundMismatch(self.bound, other.bound));
        }
        let mut out = self.clone();
        for (a, b) in out.coeffs.iter_mut().zip(&other.coeffs) {
            *a += b;
        }
        Ok(out)
    }

    pub fn sub(&self, other: &BiSeries) -> Result<BiSeries, PolyError> {
        if self.bound != other.bound {
            return Err(PolyError::BoundMismatch(self.bound, other.bound));
        }
        let mut out = self.clone();
        for (a, b) in out.coeffs.iter_mut().zip(&other.coeffs) {
            *a -= b;
        }
        Ok(out)
    }

    pub fn scale(&self, c: &Rational) -> BiSeries {
        BiSeries { bound: self.bound, coeffs: self.coeffs.iter().map(|x| x * c).collect() }
    }

    /// Truncated product; both factors must share the bound.
    pub fn mul(&self, other: &BiSeries) -> Result<BiSeries, PolyError> {
        if self.bound != other.bound {
            return Err(PolyError::BoundMismatch(self.bound, other.bound));
        }
        let d = self.bound;
        let mut out = BiSeries::zero(d);
        for (p1, q1, a) in self.terms() {
            for p2 in 0..=(d - p1 - q1) {
                for q2 in 0..=(d - p1 - q1 - p2) {
                    let b = &other.coeffs[index(d, p2, q2)];
                    if !b.is_zero() {
                        out.add_to(p1 + p2, q1 + q2, &(&a * b));
                    }
                }
            }
        }
        Ok(out)
    }

    /// Truncation of `1 / (1 - t^p u^q)`.
    pub fn inv_geom(p: u32, q: u32, bound: u32) -> Result<BiSeries, PolyError> {
        if p == 0 && q == 0 {
            return Err(PolyError::DivergentSeries);
        }
        let mut s = BiSeries::zero(bound);
        let mut k = 0;
        while k * (p + q) <= bound {
            s.set(k * p, k * q, Rational::one());
            k += 1;
        }
        Ok(s)
    }
}

impl fmt::Debug for BiSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for BiSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms = self.terms();
        if terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = terms
            .into_iter()
            .map(|(p, q, c)| {
                let mono = match (p, q) {
                    (0, 0) => String::new(),
                    _ => {
                        let t = match p {
                            0 => String::new(),
                            1 => "t".into(),
                            _ => format!("t^{p}"),
                        };
                        let u = match q {
                            0 => String::new(),
                            1 => "u".into(),
                            _ => format!("u^{q}"),
                        };
                        t + &u
                    }
                };
                if mono.is_empty() {
                    c.to_string()
                } else if c.is_one() {
                    mono
                } else {
                    format!("{c}*{mono}")
                }
            })
            .collect();
        write!(f, "{} (+ O(deg > {}))", parts.join(" + "), self.bound)
    }
}
