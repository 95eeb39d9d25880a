use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::point::CVec3;
use crate::{Error, Result};

/// Exponent triple `(a, b, c)` of the monomial `x^a y^b z^c`.
pub type Monomial = (usize, usize, usize);

/// Monomials of total degree `d` in graded-lexicographic order.
pub fn monomials(d: usize) -> Vec<Monomial> {
    let mut out = Vec::with_capacity((d + 1) * (d + 2) / 2);
    for a in (0..=d).rev() {
        for b in (0..=d - a).rev() {
            out.push((a, b, d - a - b));
        }
    }
    out
}

fn monomial_index(d: usize, (a, b, _): Monomial) -> usize {
    // rows for x-exponents d, d-1, ..., a+1 hold 1, 2, ..., d-a monomials
    let before = (d - a) * (d - a + 1) / 2;
    before + (d - a - b)
}

/// Real homogeneous polynomial in `x, y, z`, normalized so that the largest
/// coefficient has absolute value one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PolySpec", into = "PolySpec")]
pub struct HomPoly3 {
    degree: usize,
    coeffs: Vec<f64>,
}

impl HomPoly3 {
    /// Builds from dense graded-lex coefficients and normalizes.
    pub fn from_coeffs(degree: usize, coeffs: Vec<f64>) -> Result<Self> {
        if degree == 0 {
            return Err(Error::InvalidInput("degree must be at least 1".into()));
        }
        let expected = (degree + 1) * (degree + 2) / 2;
        if coeffs.len() != expected {
            return Err(Error::InvalidInput(format!(
                "degree {degree} needs {expected} coefficients, got {}",
                coeffs.len()
            )));
        }
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidInput("non-finite coefficient".into()));
        }
        let max = coeffs.iter().fold(0.0f64, |m, c| m.max(c.abs()));
        if max == 0.0 {
            return Err(Error::InvalidInput("zero polynomial".into()));
        }
        Ok(HomPoly3 { degree, coeffs: coeffs.into_iter().map(|c| c / max).collect() })
    }

    pub fn from_terms(degree: usize, terms: &[(Monomial, f64)]) -> Result<Self> {
        let mut coeffs = vec![0.0; (degree + 1) * (degree + 2) / 2];
        for &((a, b, c), v) in terms {
            if a + b + c != degree {
                return Err(Error::InvalidInput(format!(
                    "monomial x^{a} y^{b} z^{c} has degree {} instead of {degree}",
                    a + b + c
                )));
            }
            coeffs[monomial_index(degree, (a, b, c))] += v;
        }
        Self::from_coeffs(degree, coeffs)
    }

    /// The product of linear forms `l_i · (x, y, z)`.
    pub fn product_of_lines(lines: &[[f64; 3]]) -> Result<Self> {
        let mut acc = Dense3::constant(1.0);
        for l in lines {
            acc = acc.mul(&Dense3::linear(l));
        }
        acc.into_poly()
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn terms(&self) -> impl Iterator<Item = (Monomial, f64)> + '_ {
        monomials(self.degree).into_iter().zip(self.coeffs.iter().copied())
    }

    pub fn coeff(&self, m: Monomial) -> f64 {
        if m.0 + m.1 + m.2 != self.degree {
            return 0.0;
        }
        self.coeffs[monomial_index(self.degree, m)]
    }

    fn powers(&self, p: &CVec3) -> [Vec<Complex64>; 3] {
        let d = self.degree;
        let mk = |v: Complex64| {
            let mut pw = Vec::with_capacity(d + 1);
            let mut acc = Complex64::new(1.0, 0.0);
            for _ in 0..=d {
                pw.push(acc);
                acc *= v;
            }
            pw
        };
        [mk(p[0]), mk(p[1]), mk(p[2])]
    }

    /// Value at a (not necessarily normalized) homogeneous vector.
    pub fn eval(&self, p: &CVec3) -> Complex64 {
        let [px, py, pz] = self.powers(p);
        self.terms().filter(|(_, c)| *c != 0.0).map(|((a, b, c), k)| px[a] * py[b] * pz[c] * k).sum()
    }

    pub fn eval_real(&self, p: &[f64; 3]) -> f64 {
        self.eval(&super::point::to_complex(*p)).re
    }

    /// `(∂F/∂x, ∂F/∂y, ∂F/∂z)` at `p`.
    pub fn gradient(&self, p: &CVec3) -> CVec3 {
        let [px, py, pz] = self.powers(p);
        let zero = Complex64::new(0.0, 0.0);
        let mut g = [zero; 3];
        for ((a, b, c), k) in self.terms() {
            if k == 0.0 {
                continue;
            }
            if a > 0 {
                g[0] += px[a - 1] * py[b] * pz[c] * (k * a as f64);
            }
            if b > 0 {
                g[1] += px[a] * py[b - 1] * pz[c] * (k * b as f64);
            }
            if c > 0 {
                g[2] += px[a] * py[b] * pz[c - 1] * (k * c as f64);
            }
        }
        g
    }

    pub fn gradient_real(&self, p: &[f64; 3]) -> [f64; 3] {
        let g = self.gradient(&super::point::to_complex(*p));
        [g[0].re, g[1].re, g[2].re]
    }

    /// `G(p) = F(M p)` for a real 3×3 matrix `M` (rows act on `p`).
    pub fn compose_linear(&self, m: &[[f64; 3]; 3]) -> Result<Self> {
        let rows = [Dense3::linear(&m[0]), Dense3::linear(&m[1]), Dense3::linear(&m[2])];
        let mut pw: Vec<Vec<Dense3>> = rows
            .iter()
            .map(|r| {
                let mut v = vec![Dense3::constant(1.0)];
                for i in 0..self.degree {
                    let next = v[i].mul(r);
                    v.push(next);
                }
                v
            })
            .collect();
        let mut acc = Dense3::zero(self.degree);
        for ((a, b, c), k) in self.terms() {
            if k == 0.0 {
                continue;
            }
            let term = pw[0][a].mul(&pw[1][b]).mul(&pw[2][c]);
            acc.add_scaled(&term, k);
        }
        pw.clear();
        acc.into_poly()
    }

    /// `a·self + b·other`, normalized.
    pub fn combine(&self, a: f64, other: &HomPoly3, b: f64) -> Result<Self> {
        if self.degree != other.degree {
            return Err(Error::InvalidInput("degrees differ".into()));
        }
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(x, y)| a * x + b * y).collect();
        Self::from_coeffs(self.degree, coeffs)
    }

    /// Absolute cosine between coefficient vectors; 1 means proportional.
    pub fn coefficient_cosine(&self, other: &HomPoly3) -> f64 {
        if self.degree != other.degree {
            return 0.0;
        }
        let dot: f64 = self.coeffs.iter().zip(&other.coeffs).map(|(x, y)| x * y).sum();
        let na: f64 = self.coeffs.iter().map(|x| x * x).sum::<f64>().sqrt();
        let nb: f64 = other.coeffs.iter().map(|x| x * x).sum::<f64>().sqrt();
        (dot / (na * nb)).abs()
    }
}

impl fmt::Display for HomPoly3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for ((a, b, c), k) in self.terms() {
            if k == 0.0 {
                continue;
            }
            if !first {
                write!(f, " ")?;
            }
            write!(f, "{k:+}*{}", monomial_key((a, b, c)))?;
            first = false;
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

/// Dense trivariate polynomial of a single degree, used for substitutions.
#[derive(Clone)]
struct Dense3 {
    degree: usize,
    coeffs: Vec<f64>,
}

impl Dense3 {
    fn zero(degree: usize) -> Self {
        Dense3 { degree, coeffs: vec![0.0; (degree + 1) * (degree + 2) / 2] }
    }

    fn constant(v: f64) -> Self {
        Dense3 { degree: 0, coeffs: vec![v] }
    }

    fn linear(l: &[f64; 3]) -> Self {
        Dense3 { degree: 1, coeffs: l.to_vec() }
    }

    fn mul(&self, other: &Dense3) -> Dense3 {
        let d = self.degree + other.degree;
        let mut out = Dense3::zero(d);
        for (ma, ka) in monomials(self.degree).into_iter().zip(&self.coeffs) {
            if *ka == 0.0 {
                continue;
            }
            for (mb, kb) in monomials(other.degree).into_iter().zip(&other.coeffs) {
                let m = (ma.0 + mb.0, ma.1 + mb.1, ma.2 + mb.2);
                out.coeffs[monomial_index(d, m)] += ka * kb;
            }
        }
        out
    }

    fn add_scaled(&mut self, other: &Dense3, s: f64) {
        for (a, b) in self.coeffs.iter_mut().zip(&other.coeffs) {
            *a += s * b;
        }
    }

    fn into_poly(self) -> Result<HomPoly3> {
        HomPoly3::from_coeffs(self.degree, self.coeffs)
    }
}

pub fn monomial_key((a, b, c): Monomial) -> String {
    format!("x^{a} y^{b} z^{c}")
}

/// Parses keys such as `"x^2 y^0 z^1"`, `"x^2*z"` or `"y^2 z"`.
pub fn parse_monomial(key: &str) -> Result<Monomial> {
    let mut exps = [0usize; 3];
    let mut seen = [false; 3];
    for tok in key.split(|c: char| c.is_whitespace() || c == '*').filter(|t| !t.is_empty()) {
        if tok == "1" {
            continue;
        }
        let (var, exp) = match tok.split_once('^') {
            Some((v, e)) => {
                (v, e.parse::<usize>().map_err(|_| Error::InvalidInput(format!("bad exponent in monomial '{key}'")))?)
            }
            None => (tok, 1),
        };
        let idx = match var {
            "x" => 0,
            "y" => 1,
            "z" => 2,
            _ => return Err(Error::InvalidInput(format!("unknown variable '{var}' in monomial '{key}'"))),
        };
        if seen[idx] {
            return Err(Error::InvalidInput(format!("variable '{var}' repeated in monomial '{key}'")));
        }
        seen[idx] = true;
        exps[idx] = exp;
    }
    Ok((exps[0], exps[1], exps[2]))
}

/// JSON form `{"degree": d, "coeffs": {"x^a y^b z^c": value, ...}}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolySpec {
    pub degree: usize,
    pub coeffs: BTreeMap<String, f64>,
}

impl TryFrom<PolySpec> for HomPoly3 {
    type Error = Error;

    fn try_from(spec: PolySpec) -> Result<Self> {
        let terms = spec.coeffs.iter().map(|(k, v)| parse_monomial(k).map(|m| (m, *v))).collect::<Result<Vec<_>>>()?;
        HomPoly3::from_terms(spec.degree, &terms)
    }
}

impl From<HomPoly3> for PolySpec {
    fn from(p: HomPoly3) -> Self {
        let coeffs = p.terms().filter(|(_, k)| *k != 0.0).map(|(m, k)| (monomial_key(m), k)).collect();
        PolySpec { degree: p.degree, coeffs }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::point::{cnormalize, to_complex};

    fn e_curve() -> HomPoly3 {
        // y²z − x³ + xz²
        HomPoly3::from_terms(3, &[((0, 2, 1), 1.0), ((3, 0, 0), -1.0), ((1, 0, 2), 1.0)]).unwrap()
    }

    fn circle() -> HomPoly3 {
        HomPoly3::from_terms(2, &[((2, 0, 0), 1.0), ((0, 2, 0), 1.0), ((0, 0, 2), -1.0)]).unwrap()
    }

    #[test]
    fn monomial_order_and_count() {
        let m = monomials(2);
        assert_eq!(m, vec![(2, 0, 0), (1, 1, 0), (1, 0, 1), (0, 2, 0), (0, 1, 1), (0, 0, 2)]);
        for d in 1..=9 {
            let ms = monomials(d);
            assert_eq!(ms.len(), (d + 1) * (d + 2) / 2);
            for (i, m) in ms.iter().enumerate() {
                assert_eq!(monomial_index(d, *m), i);
            }
        }
    }

    #[test]
    fn eval_examples() {
        let e = e_curve();
        assert!(e.eval(&to_complex([0.0, 1.0, 0.0])).norm() < 1e-15);
        assert_eq!(e.eval(&to_complex([2.0, 0.0, 1.0])).re, -6.0);
        // normalized point scales by the cube of the norm
        let v = e.eval(&cnormalize(&to_complex([2.0, 0.0, 1.0]))).re;
        assert!((v + 6.0 / 5f64.powf(1.5)).abs() < 1e-14);
        assert!(circle().eval(&to_complex([1.0, 0.0, 1.0])).norm() < 1e-15);
    }

    #[test]
    fn gradient_examples() {
        let g = circle().gradient(&to_complex([1.0, 0.0, 1.0]));
        assert_eq!([g[0].re, g[1].re, g[2].re], [2.0, 0.0, -2.0]);
        let g = e_curve().gradient(&to_complex([0.0, 0.0, 1.0]));
        assert_eq!([g[0].re, g[1].re, g[2].re], [1.0, 0.0, 0.0]);
    }

    #[test]
    fn euler_relation() {
        let e = e_curve();
        let p = [Complex64::new(0.3, -1.1), Complex64::new(2.0, 0.5), Complex64::new(-0.7, 0.2)];
        let g = e.gradient(&p);
        let lhs: Complex64 = g.iter().zip(&p).map(|(a, b)| a * b).sum();
        assert!((lhs - e.eval(&p) * 3.0).norm() < 1e-12);
    }

    #[test]
    fn normalization_and_errors() {
        let p = HomPoly3::from_terms(1, &[((1, 0, 0), 4.0), ((0, 1, 0), -2.0)]).unwrap();
        assert_eq!(p.coeffs(), &[1.0, -0.5, 0.0]);
        assert!(HomPoly3::from_coeffs(2, vec![0.0; 6]).is_err());
        assert!(HomPoly3::from_coeffs(2, vec![1.0; 5]).is_err());
        assert!(HomPoly3::from_terms(2, &[((1, 0, 0), 1.0)]).is_err());
    }

    #[test]
    fn compose_with_permutation_swaps_variables() {
        let e = e_curve();
        // G(x, y, z) = E(y, x, z)
        let g = e.compose_linear(&[[0.0, 1.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, 1.0]]).unwrap();
        let p = [Complex64::new(0.3, 0.1), Complex64::new(-1.0, 0.2), Complex64::new(0.5, 0.0)];
        let q = [p[1], p[0], p[2]];
        assert!((g.eval(&p) - e.eval(&q)).norm() < 1e-14);
    }

    #[test]
    fn product_of_lines_vanishes_on_each_line() {
        let lines = [[1.0, 0.0, 0.5], [0.0, 1.0, 0.0], [1.0, 1.0, 1.0]];
        let g = HomPoly3::product_of_lines(&lines).unwrap();
        assert_eq!(g.degree(), 3);
        assert!(g.eval_real(&[-0.5, 3.0, 1.0]).abs() < 1e-14);
        assert!(g.eval_real(&[7.0, 0.0, 2.0]).abs() < 1e-14);
    }

    #[test]
    fn json_round_trip() {
        let text = r#"{"degree":3,"coeffs":{"y^2 z":1,"x^3":-1,"x z^2":1}}"#;
        let p: HomPoly3 = serde_json::from_str(text).unwrap();
        assert_eq!(p, e_curve());
        let back: HomPoly3 = serde_json::from_str(&serde_json::to_string(&p).unwrap()).unwrap();
        assert_eq!(back, p);
        assert!(serde_json::from_str::<HomPoly3>(r#"{"degree":3,"coeffs":{"w^3":1}}"#).is_err());
        assert!(serde_json::from_str::<HomPoly3>(r#"{"degree":3,"coeffs":{},"extra":1}"#).is_err());
    }
}
