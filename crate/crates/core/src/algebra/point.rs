use num_complex::Complex64;

/// Homogeneous complex 3-vector.
pub type CVec3 = [Complex64; 3];

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

pub fn to_complex(v: [f64; 3]) -> CVec3 {
    [v[0].into(), v[1].into(), v[2].into()]
}

pub fn re3(v: &CVec3) -> [f64; 3] {
    [v[0].re, v[1].re, v[2].re]
}

pub fn conj3(v: &CVec3) -> CVec3 {
    [v[0].conj(), v[1].conj(), v[2].conj()]
}

/// Hermitian product `Σ conj(a_i) b_i`.
pub fn hdot(a: &CVec3, b: &CVec3) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub fn cnorm(v: &CVec3) -> f64 {
    v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
}

pub fn cscale(v: &CVec3, s: Complex64) -> CVec3 {
    [v[0] * s, v[1] * s, v[2] * s]
}

pub fn cadd(a: &CVec3, b: &CVec3) -> CVec3 {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

pub fn csub(a: &CVec3, b: &CVec3) -> CVec3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

pub fn cnormalize(v: &CVec3) -> CVec3 {
    let n = cnorm(v);
    cscale(v, Complex64::new(1.0 / n, 0.0))
}

/// Bilinear cross product (no conjugation).
pub fn ccross(a: &CVec3, b: &CVec3) -> CVec3 {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

/// Chordal (Fubini-Study sine) distance between two points of CP², computed
/// as `‖a ∧ b‖ / (‖a‖ ‖b‖)` so that it stays accurate for nearby points.
pub fn chordal(a: &CVec3, b: &CVec3) -> f64 {
    let na = cnorm(a);
    let nb = cnorm(b);
    if na == 0.0 || nb == 0.0 {
        return 1.0;
    }
    let w = ccross(a, b);
    (cnorm(&w) / (na * nb)).min(1.0)
}

/// Distance from a point to its complex conjugate; zero exactly on real points.
pub fn realness_defect(v: &CVec3) -> f64 {
    chordal(v, &conj3(v))
}

/// Rotate `v` by a unit phase so that `⟨reference, v⟩` is real and nonnegative.
pub fn align_phase(v: &CVec3, reference: &CVec3) -> CVec3 {
    let h = hdot(v, reference);
    let n = h.norm();
    if n == 0.0 {
        return *v;
    }
    cscale(v, h / n)
}

/// Nearest real unit vector to a nearly real complex point.
pub fn real_part_projective(v: &CVec3) -> [f64; 3] {
    let k = (0..3).max_by(|&i, &j| v[i].norm().total_cmp(&v[j].norm())).unwrap_or(0);
    let phase = if v[k].norm() > 0.0 { v[k].conj() / v[k].norm() } else { Complex64::new(1.0, 0.0) };
    let r = [(v[0] * phase).re, (v[1] * phase).re, (v[2] * phase).re];
    normalize3(&r)
}

pub fn dot3(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub fn cross3(a: &[f64; 3], b: &[f64; 3]) -> [f64; 3] {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

pub fn norm3(a: &[f64; 3]) -> f64 {
    dot3(a, a).sqrt()
}

pub fn normalize3(a: &[f64; 3]) -> [f64; 3] {
    let n = norm3(a);
    [a[0] / n, a[1] / n, a[2] / n]
}

pub fn sub3(a: &[f64; 3], b: &[f64; 3]) -> [f64; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

pub fn add3(a: &[f64; 3], b: &[f64; 3]) -> [f64; 3] {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

pub fn scale3(a: &[f64; 3], s: f64) -> [f64; 3] {
    [a[0] * s, a[1] * s, a[2] * s]
}

/// Chordal distance in RP² (sign-insensitive).
pub fn chordal_real(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    (norm3(&cross3(a, b)) / (norm3(a) * norm3(b))).min(1.0)
}

/// Two real unit vectors spanning the line with coordinates `line`
/// (the points `p` with `line · p = 0`), orthonormal.
pub fn line_frame(line: &[f64; 3]) -> ([f64; 3], [f64; 3]) {
    let l = normalize3(line);
    let k = (0..3).min_by(|&i, &j| l[i].abs().total_cmp(&l[j].abs())).unwrap_or(0);
    let mut e = [0.0; 3];
    e[k] = 1.0;
    let u = normalize3(&cross3(&l, &e));
    let v = cross3(&l, &u);
    (u, v)
}

/// Point of CP², unit Hermitian norm, first nonzero coordinate real positive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProjPointC(CVec3);

impl ProjPointC {
    pub fn new(v: CVec3) -> Self {
        let n = cnorm(&v);
        assert!(n > 0.0, "zero vector is not a projective point");
        let v = cscale(&v, Complex64::new(1.0 / n, 0.0));
        let lead = v.iter().find(|c| c.norm() > 1e-12).copied().unwrap_or(ZERO);
        let phase = if lead.norm() > 0.0 { lead.conj() / lead.norm() } else { Complex64::new(1.0, 0.0) };
        ProjPointC(cscale(&v, phase))
    }

    pub fn from_real(v: [f64; 3]) -> Self {
        Self::new(to_complex(v))
    }

    pub fn coords(&self) -> &CVec3 {
        &self.0
    }

    pub fn conj(&self) -> Self {
        Self::new(conj3(&self.0))
    }

    pub fn distance(&self, other: &Self) -> f64 {
        chordal(&self.0, &other.0)
    }
}

/// Point of RP², unit norm, first nonzero coordinate positive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProjPointR([f64; 3]);

impl ProjPointR {
    pub fn new(v: [f64; 3]) -> Self {
        let n = norm3(&v);
        assert!(n > 0.0, "zero vector is not a projective point");
        let v = scale3(&v, 1.0 / n);
        let sign = v.iter().find(|c| c.abs() > 1e-12).map_or(1.0, |c| c.signum());
        ProjPointR(scale3(&v, sign))
    }

    /// Affine point `(x, y)` of the chart `z = 1`.
    pub fn affine(x: f64, y: f64) -> Self {
        Self::new([x, y, 1.0])
    }

    pub fn coords(&self) -> &[f64; 3] {
        &self.0
    }

    pub fn to_complex(&self) -> ProjPointC {
        ProjPointC::from_real(self.0)
    }

    /// Affine coordinates in the chart `z = 1`, if the point is not at infinity.
    pub fn to_affine(&self) -> Option<(f64, f64)> {
        (self.0[2].abs() > 1e-12).then(|| (self.0[0] / self.0[2], self.0[1] / self.0[2]))
    }

    pub fn distance(&self, other: &Self) -> f64 {
        chordal_real(&self.0, &other.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_phase_is_applied() {
        let i = Complex64::new(0.0, 1.0);
        let p = ProjPointC::new([i * 2.0, Complex64::new(1.0, 1.0), ZERO]);
        let c = p.coords();
        assert!((cnorm(c) - 1.0).abs() < 1e-12);
        assert!(c[0].im.abs() < 1e-15 && c[0].re > 0.0);
    }

    #[test]
    fn chordal_ignores_scale_and_phase() {
        let a = to_complex([1.0, 2.0, 3.0]);
        let b = cscale(&a, Complex64::new(-0.3, 2.0));
        assert!(chordal(&a, &b) < 1e-7);
        assert!(realness_defect(&b) < 1e-7);
        let c = to_complex([1.0, 0.0, 0.0]);
        let d = to_complex([0.0, 1.0, 0.0]);
        assert!((chordal(&c, &d) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn line_frame_spans_line() {
        let l = [0.3, -1.2, 0.5];
        let (u, v) = line_frame(&l);
        assert!(dot3(&l, &u).abs() < 1e-14 && dot3(&l, &v).abs() < 1e-14);
        assert!(dot3(&u, &v).abs() < 1e-14);
        assert!((norm3(&u) - 1.0).abs() < 1e-14 && (norm3(&v) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn real_sign_canonical() {
        let p = ProjPointR::new([-1.0, 0.0, -1.0]);
        assert!(p.coords()[0] > 0.0);
        let (x, y) = p.to_affine().unwrap();
        assert!((x - 1.0).abs() < 1e-15 && y.abs() < 1e-15);
    }
}
