use num_complex::Complex64;

use super::point::{to_complex, CVec3};
use super::poly::HomPoly3;
use super::roots::{aberth, newton_polish};
use crate::{Error, Result};

/// Chordal radius under which roots are merged across the two charts.
pub const CHART_MERGE_RADIUS: f64 = 1e-8;
/// Chordal radius under which roots are reported as one multiple root.
pub const MULTIPLICITY_RADIUS: f64 = 1e-6;

/// Point `(α:β)` of CP¹, stored with unit norm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cp1Point {
    pub alpha: Complex64,
    pub beta: Complex64,
}

impl Cp1Point {
    pub fn new(alpha: Complex64, beta: Complex64) -> Self {
        let n = (alpha.norm_sqr() + beta.norm_sqr()).sqrt();
        assert!(n > 0.0, "(0:0) is not a point of CP¹");
        Cp1Point { alpha: alpha / n, beta: beta / n }
    }

    pub fn real(alpha: f64, beta: f64) -> Self {
        Self::new(alpha.into(), beta.into())
    }

    pub fn distance(&self, other: &Cp1Point) -> f64 {
        (self.alpha * other.beta - self.beta * other.alpha).norm()
    }

    /// The point `α u + β v` of the plane.
    pub fn on_line(&self, u: &CVec3, v: &CVec3) -> CVec3 {
        [
            u[0] * self.alpha + v[0] * self.beta,
            u[1] * self.alpha + v[1] * self.beta,
            u[2] * self.alpha + v[2] * self.beta,
        ]
    }
}

/// A root with its multiplicity estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RootCluster {
    pub point: Cp1Point,
    pub multiplicity: usize,
}

/// Binary form `B(α, β) = Σ b_k α^k β^(d−k)`.
#[derive(Debug, Clone, PartialEq)]
pub struct BinaryForm {
    coeffs: Vec<Complex64>,
}

impl BinaryForm {
    pub fn new(coeffs: Vec<Complex64>) -> Self {
        assert!(!coeffs.is_empty(), "a binary form needs at least one coefficient");
        BinaryForm { coeffs }
    }

    pub fn from_real(coeffs: &[f64]) -> Self {
        Self::new(coeffs.iter().map(|&c| c.into()).collect())
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, c| m.max(c.norm()))
    }

    pub fn is_zero(&self) -> bool {
        self.max_abs() == 0.0
    }

    pub fn eval(&self, alpha: Complex64, beta: Complex64) -> Complex64 {
        // Horner in the chart where the point is bounded
        let d = self.degree();
        if alpha.norm() <= beta.norm() {
            let t = alpha / beta;
            let mut acc = Complex64::new(0.0, 0.0);
            for c in self.coeffs.iter().rev() {
                acc = acc * t + c;
            }
            acc * beta.powu(d as u32)
        } else {
            let s = beta / alpha;
            let mut acc = Complex64::new(0.0, 0.0);
            for c in self.coeffs.iter() {
                acc = acc * s + c;
            }
            acc * alpha.powu(d as u32)
        }
    }

    /// `|B(p)| / (max|b_k| ‖p‖^d)` for a unit point.
    pub fn relative_residual(&self, p: &Cp1Point) -> f64 {
        let m = self.max_abs();
        if m == 0.0 {
            return 0.0;
        }
        self.eval(p.alpha, p.beta).norm() / m
    }

    /// Product with the linear form `β₀ α − α₀ β` vanishing at `root`.
    pub fn times_linear(&self, root: &Cp1Point) -> BinaryForm {
        let d = self.degree();
        let mut out = vec![Complex64::new(0.0, 0.0); d + 2];
        for (k, b) in self.coeffs.iter().enumerate() {
            out[k + 1] += b * root.beta;
            out[k] -= b * root.alpha;
        }
        BinaryForm::new(out)
    }

    /// Polynomial in `t = α/β` (ascending coefficients).
    fn beta_chart(&self) -> Vec<Complex64> {
        self.coeffs.clone()
    }

    /// Polynomial in `s = β/α` (ascending coefficients).
    fn alpha_chart(&self) -> Vec<Complex64> {
        self.coeffs.iter().rev().copied().collect()
    }

    /// Same form with `α` and `β` exchanged.
    pub fn swapped(&self) -> BinaryForm {
        BinaryForm::new(self.alpha_chart())
    }
}

/// `B(α, β) = F(α u + β v)` for a line spanned by real `u`, `v`.
pub fn restrict_to_line(f: &HomPoly3, u: &[f64; 3], v: &[f64; 3]) -> Result<BinaryForm> {
    restrict_to_line_c(f, &to_complex(*u), &to_complex(*v))
}

/// Complex version of [`restrict_to_line`].
pub fn restrict_to_line_c(f: &HomPoly3, u: &CVec3, v: &CVec3) -> Result<BinaryForm> {
    let d = f.degree();
    let zero = Complex64::new(0.0, 0.0);
    // powers[i][e] = (u_i α + v_i β)^e, indexed by α-exponent
    let powers: Vec<Vec<Vec<Complex64>>> = (0..3)
        .map(|i| {
            let mut list = vec![vec![Complex64::new(1.0, 0.0)]];
            for e in 0..d {
                let prev = &list[e];
                let mut next = vec![zero; prev.len() + 1];
                for (k, c) in prev.iter().enumerate() {
                    next[k] += c * v[i];
                    next[k + 1] += c * u[i];
                }
                list.push(next);
            }
            list
        })
        .collect();
    let mut out = vec![zero; d + 1];
    for ((a, b, c), k) in f.terms() {
        if k == 0.0 {
            continue;
        }
        let px = &powers[0][a];
        let py = &powers[1][b];
        let pz = &powers[2][c];
        // convolve px * py * pz
        let mut xy = vec![zero; a + b + 1];
        for (i, x) in px.iter().enumerate() {
            for (j, y) in py.iter().enumerate() {
                xy[i + j] += x * y;
            }
        }
        for (i, x) in xy.iter().enumerate() {
            for (j, z) in pz.iter().enumerate() {
                out[i + j] += x * z * k;
            }
        }
    }
    let form = BinaryForm::new(out);
    let scale = (0..3).map(|i| u[i].norm() + v[i].norm()).fold(0.0, f64::max).powi(d as i32);
    if form.max_abs() <= 1e-14 * scale.max(1.0) {
        return Err(Error::DegenerateLine);
    }
    Ok(form)
}

/// All `d` roots of a binary form, counted with multiplicity.
///
/// Both dehomogenizations are solved; each root is taken from the chart in
/// which it is bounded by one, polished there, and roots closer than
/// [`MULTIPLICITY_RADIUS`] are reported as one cluster.
pub fn binary_roots(b: &BinaryForm) -> Vec<RootCluster> {
    let d = b.degree();
    let scale = b.max_abs();
    if d == 0 || scale == 0.0 {
        return Vec::new();
    }
    let unit = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    let pb = b.beta_chart();
    let pa = b.alpha_chart();

    let mut from_beta: Vec<Cp1Point> = aberth(&pb).into_iter().map(|t| Cp1Point::new(t, unit)).collect();
    while from_beta.len() < d {
        from_beta.push(Cp1Point::new(unit, zero));
    }
    let mut from_alpha: Vec<Cp1Point> = aberth(&pa).into_iter().map(|s| Cp1Point::new(unit, s)).collect();
    while from_alpha.len() < d {
        from_alpha.push(Cp1Point::new(zero, unit));
    }

    // greedy matching of the two full root lists
    let mut pairs: Vec<(f64, usize, usize)> = Vec::with_capacity(d * d);
    for (i, p) in from_beta.iter().enumerate() {
        for (j, q) in from_alpha.iter().enumerate() {
            pairs.push((p.distance(q), i, j));
        }
    }
    pairs.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)).then(x.2.cmp(&y.2)));
    let mut used_b = vec![false; d];
    let mut used_a = vec![false; d];
    let mut merged = Vec::with_capacity(d);
    for (_, i, j) in pairs {
        if used_b[i] || used_a[j] {
            continue;
        }
        used_b[i] = true;
        used_a[j] = true;
        let p = from_beta[i];
        let q = from_alpha[j];
        let pick = if p.alpha.norm() <= p.beta.norm() { p } else { q };
        merged.push(polish(b, &pb, &pa, pick));
    }

    cluster(merged)
}

fn polish(b: &BinaryForm, pb: &[Complex64], pa: &[Complex64], p: Cp1Point) -> Cp1Point {
    let before = b.relative_residual(&p);
    let cand = if p.alpha.norm() <= p.beta.norm() {
        let t = newton_polish(pb, p.alpha / p.beta, 4);
        Cp1Point::new(t, Complex64::new(1.0, 0.0))
    } else {
        let s = newton_polish(pa, p.beta / p.alpha, 4);
        Cp1Point::new(Complex64::new(1.0, 0.0), s)
    };
    if b.relative_residual(&cand) <= before {
        cand
    } else {
        p
    }
}

fn cluster(points: Vec<Cp1Point>) -> Vec<RootCluster> {
    let n = points.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], i: usize) -> usize {
        let mut r = i;
        while parent[r] != r {
            r = parent[r];
        }
        parent[i] = r;
        r
    }
    for i in 0..n {
        for j in i + 1..n {
            if points[i].distance(&points[j]) < MULTIPLICITY_RADIUS {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                if a != b {
                    parent[b.max(a)] = a.min(b);
                }
            }
        }
    }
    let mut out: Vec<RootCluster> = Vec::new();
    let mut rep_of = vec![usize::MAX; n];
    for (i, point) in points.iter().enumerate() {
        let r = find(&mut parent, i);
        if rep_of[r] == usize::MAX {
            rep_of[r] = out.len();
            out.push(RootCluster { point: *point, multiplicity: 1 });
        } else {
            out[rep_of[r]].multiplicity += 1;
        }
    }
    out
}

/// Removes the linear factor vanishing at `root`, returning `B'` with
/// `B = (β₀ α − α₀ β) · B'` up to a nonzero scalar.
pub fn deflate(b: &BinaryForm, root: &Cp1Point, tol: f64) -> Result<BinaryForm> {
    let residual = b.relative_residual(root);
    if residual > tol {
        return Err(Error::NotARoot { residual });
    }
    let d = b.degree();
    if d == 0 {
        return Err(Error::InvalidInput("cannot deflate a constant form".into()));
    }
    let zero = Complex64::new(0.0, 0.0);
    if root.alpha.norm() <= root.beta.norm() {
        // divide Σ b_k t^k by (t − t0); B = (α − t0 β) B'
        let t0 = root.alpha / root.beta;
        let mut q = vec![zero; d];
        let mut carry = zero;
        for k in (1..=d).rev() {
            carry = b.coeffs[k] + t0 * carry;
            q[k - 1] = carry;
        }
        Ok(BinaryForm::new(q))
    } else {
        // divide Σ b_{d−j} s^j by (s − s0); B = (β − s0 α) B'
        let s0 = root.beta / root.alpha;
        let c: Vec<Complex64> = b.coeffs.iter().rev().copied().collect();
        let mut e = vec![zero; d];
        let mut carry = zero;
        for j in (1..=d).rev() {
            carry = c[j] + s0 * carry;
            e[j - 1] = carry;
        }
        // coefficient of α^k in B' is e_{d−1−k}
        Ok(BinaryForm::new(e.into_iter().rev().collect()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::poly::HomPoly3;

    fn e_curve() -> HomPoly3 {
        HomPoly3::from_terms(3, &[((0, 2, 1), 1.0), ((3, 0, 0), -1.0), ((1, 0, 2), 1.0)]).unwrap()
    }

    fn circle() -> HomPoly3 {
        HomPoly3::from_terms(2, &[((2, 0, 0), 1.0), ((0, 2, 0), 1.0), ((0, 0, 2), -1.0)]).unwrap()
    }

    fn assert_form(b: &BinaryForm, expected: &[f64]) {
        assert_eq!(b.degree() + 1, expected.len());
        for (c, e) in b.coeffs().iter().zip(expected) {
            assert!((c - Complex64::new(*e, 0.0)).norm() < 1e-14, "{:?} vs {expected:?}", b.coeffs());
        }
    }

    /// Coefficients up to a common complex scale.
    fn assert_proportional(a: &BinaryForm, b: &BinaryForm, tol: f64) {
        let na: f64 = a.coeffs().iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        let nb: f64 = b.coeffs().iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        let dot: Complex64 = a.coeffs().iter().zip(b.coeffs()).map(|(x, y)| x.conj() * y).sum();
        let cos = dot.norm() / (na * nb);
        assert!(1.0 - cos < tol, "not proportional: {:?} {:?}", a.coeffs(), b.coeffs());
    }

    fn has_root(roots: &[RootCluster], p: Cp1Point, mult: usize) -> bool {
        // a double root is only resolved to about sqrt(eps)
        let tol = if mult == 1 { 1e-12 } else { 1e-7 };
        roots.iter().any(|r| r.point.distance(&p) < tol && r.multiplicity == mult)
    }

    #[test]
    fn restriction_of_cubic_to_x_axis() {
        // y = 0: B = −α³ + αβ²
        let b = restrict_to_line(&e_curve(), &[1.0, 0.0, 0.0], &[0.0, 0.0, 1.0]).unwrap();
        assert_form(&b, &[0.0, 1.0, 0.0, -1.0]);
    }

    #[test]
    fn restriction_of_circle_to_infinity() {
        let b = restrict_to_line(&circle(), &[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0]).unwrap();
        assert_form(&b, &[1.0, 0.0, 1.0]);
    }

    #[test]
    fn swapping_span_swaps_coefficients() {
        let u = [0.3, -0.2, 1.0];
        let v = [1.1, 0.7, -0.4];
        let b1 = restrict_to_line(&e_curve(), &u, &v).unwrap();
        let b2 = restrict_to_line(&e_curve(), &v, &u).unwrap();
        let sw = b1.swapped();
        for (x, y) in sw.coeffs().iter().zip(b2.coeffs()) {
            assert!((x - y).norm() < 1e-13);
        }
    }

    #[test]
    fn degenerate_line_is_rejected() {
        // x·(y² − z²) contains the line x = 0
        let f = HomPoly3::from_terms(3, &[((1, 2, 0), 1.0), ((1, 0, 2), -1.0)]).unwrap();
        let err = restrict_to_line(&f, &[0.0, 1.0, 0.0], &[0.0, 0.0, 1.0]).unwrap_err();
        assert_eq!(err, Error::DegenerateLine);
    }

    #[test]
    fn roots_of_x_axis_section() {
        let b = BinaryForm::from_real(&[0.0, 1.0, 0.0, -1.0]);
        let r = binary_roots(&b);
        assert_eq!(r.iter().map(|c| c.multiplicity).sum::<usize>(), 3);
        assert!(has_root(&r, Cp1Point::real(0.0, 1.0), 1));
        assert!(has_root(&r, Cp1Point::real(1.0, 1.0), 1));
        assert!(has_root(&r, Cp1Point::real(1.0, -1.0), 1));
    }

    #[test]
    fn roots_conjugate_pair() {
        let b = BinaryForm::from_real(&[1.0, 0.0, 1.0]);
        let r = binary_roots(&b);
        let i = Complex64::new(0.0, 1.0);
        assert!(has_root(&r, Cp1Point::new(i, 1.0.into()), 1));
        assert!(has_root(&r, Cp1Point::new(-i, 1.0.into()), 1));
    }

    #[test]
    fn roots_with_multiplicity_and_infinity() {
        // (α − β)² β = α²β − 2αβ² + β³
        let b = BinaryForm::from_real(&[1.0, -2.0, 1.0, 0.0]);
        let r = binary_roots(&b);
        assert_eq!(r.len(), 2);
        assert!(has_root(&r, Cp1Point::real(1.0, 1.0), 2));
        assert!(has_root(&r, Cp1Point::real(1.0, 0.0), 1));
    }

    #[test]
    fn deflation_examples() {
        let b = BinaryForm::from_real(&[0.0, 1.0, 0.0, -1.0]);
        let d = deflate(&b, &Cp1Point::real(0.0, 1.0), 1e-10).unwrap();
        // β² − α²
        assert_proportional(&d, &BinaryForm::from_real(&[1.0, 0.0, -1.0]), 1e-14);

        let c = BinaryForm::from_real(&[1.0, 0.0, 1.0]);
        let i = Complex64::new(0.0, 1.0);
        let root = Cp1Point::new(i, 1.0.into());
        let d = deflate(&c, &root, 1e-10).unwrap();
        assert_proportional(&d, &BinaryForm::new(vec![i, 1.0.into()]), 1e-14);
        assert_proportional(&d.times_linear(&root), &c, 1e-12);

        let err = deflate(&c, &Cp1Point::real(1.0, 1.0), 1e-10).unwrap_err();
        assert!(matches!(err, Error::NotARoot { .. }));
    }

    #[test]
    fn deflation_at_infinity() {
        // α β (α − 2β): roots (1:0), (0:1), (2:1)
        let b = BinaryForm::from_real(&[0.0, -2.0, 1.0, 0.0]);
        let d = deflate(&b, &Cp1Point::real(1.0, 0.0), 1e-12).unwrap();
        let r = binary_roots(&d);
        assert!(has_root(&r, Cp1Point::real(0.0, 1.0), 1));
        assert!(has_root(&r, Cp1Point::real(2.0, 1.0), 1));
    }
}
