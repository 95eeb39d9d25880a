//! Intersection of two plane curves: resultant elimination followed by
//! Newton polishing.

use nalgebra::{DMatrix, Matrix3, Vector3};
use num_complex::Complex64;

use super::binary::{binary_roots, BinaryForm};
use super::point::{cnorm, cnormalize, conj3, CVec3};
use super::poly::HomPoly3;
use super::roots::aberth;
use crate::{Error, Result};

/// Generic rotations tried in turn; the first that puts no intersection
/// point and no degenerate leading coefficient in the way is used.
const ROTATION_ANGLES: [[f64; 3]; 4] = [[0.61, 1.13, 2.37], [1.91, 0.47, 0.83], [2.71, 1.57, 0.29], [0.17, 2.03, 1.41]];

fn rotation([a, b, c]: [f64; 3]) -> [[f64; 3]; 3] {
    let (sa, ca) = a.sin_cos();
    let (sb, cb) = b.sin_cos();
    let (sc, cc) = c.sin_cos();
    let rz = [[ca, -sa, 0.0], [sa, ca, 0.0], [0.0, 0.0, 1.0]];
    let rx = [[1.0, 0.0, 0.0], [0.0, cb, -sb], [0.0, sb, cb]];
    let rz2 = [[cc, -sc, 0.0], [sc, cc, 0.0], [0.0, 0.0, 1.0]];
    matmul(&matmul(&rz, &rx), &rz2)
}

fn matmul(a: &[[f64; 3]; 3], b: &[[f64; 3]; 3]) -> [[f64; 3]; 3] {
    let mut out = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            out[i][j] = (0..3).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    out
}

fn apply(m: &[[f64; 3]; 3], p: &CVec3) -> CVec3 {
    let row = |i: usize| p[0] * m[i][0] + p[1] * m[i][1] + p[2] * m[i][2];
    [row(0), row(1), row(2)]
}

/// Coefficients in `y` of `F(t, y, 1)`, ascending.
fn y_coefficients(f: &HomPoly3, t: Complex64) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); f.degree() + 1];
    for ((a, b, _), k) in f.terms() {
        if k != 0.0 {
            out[b] += t.powu(a as u32) * k;
        }
    }
    out
}

fn sylvester_det(p: &[Complex64], q: &[Complex64]) -> Complex64 {
    let (m, n) = (p.len() - 1, q.len() - 1);
    let size = m + n;
    let mut s = DMatrix::<Complex64>::zeros(size, size);
    for r in 0..n {
        for (k, c) in p.iter().rev().enumerate() {
            s[(r, r + k)] = *c;
        }
    }
    for r in 0..m {
        for (k, c) in q.iter().rev().enumerate() {
            s[(n + r, r + k)] = *c;
        }
    }
    s.determinant()
}

/// One Newton solve of `F = G = 0` in the affine chart through `p0`
/// orthogonal to `p0`. Returns the unit-norm solution on convergence.
pub fn newton_two_curves(f: &HomPoly3, g: &HomPoly3, p0: &CVec3, tol: f64, max_iter: usize) -> Option<CVec3> {
    let anchor = cnormalize(p0);
    let chart = conj3(&anchor);
    let mut p = anchor;
    for _ in 0..max_iter {
        let gf = f.gradient(&p);
        let gg = g.gradient(&p);
        let a = Matrix3::new(gf[0], gf[1], gf[2], gg[0], gg[1], gg[2], chart[0], chart[1], chart[2]);
        let rhs = Vector3::new(-f.eval(&p), -g.eval(&p), Complex64::new(0.0, 0.0));
        let delta = a.lu().solve(&rhs)?;
        for i in 0..3 {
            p[i] += delta[i];
        }
        let step: f64 = delta.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        if !step.is_finite() {
            return None;
        }
        if step < tol {
            return Some(cnormalize(&p));
        }
    }
    None
}

/// Intersection points of `F = 0` and `G = 0` with multiplicity estimates.
///
/// The `y`-resultant is interpolated on roots of unity after a generic
/// rotation, its roots give the projections of the intersection points, and
/// each is lifted by solving for `y` and polished by Newton on both curves.
pub fn intersect_curves(f: &HomPoly3, g: &HomPoly3) -> Result<Vec<(CVec3, usize)>> {
    let total = f.degree() * g.degree();
    for angles in ROTATION_ANGLES {
        let rot = rotation(angles);
        let fr = f.compose_linear(&rot)?;
        let gr = g.compose_linear(&rot)?;
        // leading y-coefficients must be nonzero constants
        if fr.coeff((0, fr.degree(), 0)).abs() < 1e-3 || gr.coeff((0, gr.degree(), 0)).abs() < 1e-3 {
            continue;
        }
        let m = total + 1;
        let samples: Vec<Complex64> = (0..m)
            .map(|k| {
                let w = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * k as f64 / m as f64);
                sylvester_det(&y_coefficients(&fr, w), &y_coefficients(&gr, w))
            })
            .collect();
        let coeffs: Vec<Complex64> = (0..m)
            .map(|j| {
                let s: Complex64 = samples
                    .iter()
                    .enumerate()
                    .map(|(k, v)| {
                        v * Complex64::from_polar(1.0, -2.0 * std::f64::consts::PI * (j * k) as f64 / m as f64)
                    })
                    .sum();
                s / m as f64
            })
            .collect();
        let resultant = BinaryForm::new(coeffs);
        if resultant.is_zero() {
            return Err(Error::InvalidInput("curves share a component".into()));
        }
        let mut out = Vec::with_capacity(total);
        let mut ok = true;
        for root in binary_roots(&resultant) {
            let (x, z) = (root.point.alpha, root.point.beta);
            // y-polynomial of F̃(x, y, z)
            let mut ycoef = vec![Complex64::new(0.0, 0.0); fr.degree() + 1];
            for ((a, b, c), k) in fr.terms() {
                if k != 0.0 {
                    ycoef[b] += x.powu(a as u32) * z.powu(c as u32) * k;
                }
            }
            let ys = aberth(&ycoef);
            let best = ys
                .iter()
                .map(|&y| {
                    let p = cnormalize(&[x, y, z]);
                    (gr.eval(&p).norm(), p)
                })
                .min_by(|a, b| a.0.total_cmp(&b.0));
            let Some((_, p_rot)) = best else {
                ok = false;
                break;
            };
            let p = apply(&rot, &p_rot);
            let polished = if root.multiplicity == 1 { newton_two_curves(f, g, &p, 1e-14, 30).unwrap_or(p) } else { p };
            out.push((polished, root.multiplicity));
        }
        if ok && out.iter().map(|(_, m)| m).sum::<usize>() == total {
            return Ok(out);
        }
    }
    Err(Error::InvalidInput("resultant elimination failed for every trial rotation".into()))
}

/// Largest `|F(p)|, |G(p)|` over unit-normalized points.
pub fn max_residual(f: &HomPoly3, g: &HomPoly3, pts: &[CVec3]) -> f64 {
    pts.iter()
        .map(|p| {
            let q = cnormalize(p);
            debug_assert!(cnorm(&q) > 0.0);
            f.eval(&q).norm().max(g.eval(&q).norm())
        })
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::point::{chordal, to_complex};

    fn e_curve() -> HomPoly3 {
        HomPoly3::from_terms(3, &[((0, 2, 1), 1.0), ((3, 0, 0), -1.0), ((1, 0, 2), 1.0)]).unwrap()
    }

    #[test]
    fn cubic_meets_three_lines_in_nine_points() {
        let lines = [[0.0, 1.0, 0.0], [1.0, 0.0, 0.5], [1.0, -1.0, 0.5]];
        let g = HomPoly3::product_of_lines(&lines).unwrap();
        let pts = intersect_curves(&e_curve(), &g).unwrap();
        assert_eq!(pts.len(), 9);
        assert!(pts.iter().all(|(_, m)| *m == 1));
        let raw: Vec<CVec3> = pts.iter().map(|(p, _)| *p).collect();
        assert!(max_residual(&e_curve(), &g, &raw) < 1e-12);
        // y = 0 contributes (−1,0), (0,0), (1,0)
        for x in [-1.0, 0.0, 1.0] {
            let q = to_complex([x, 0.0, 1.0]);
            assert!(raw.iter().any(|p| chordal(p, &q) < 1e-10), "missing ({x}, 0)");
        }
    }

    #[test]
    fn conic_meets_circle() {
        let circle = HomPoly3::from_terms(2, &[((2, 0, 0), 1.0), ((0, 2, 0), 1.0), ((0, 0, 2), -1.0)]).unwrap();
        // x² + 4y² − 4z²: meets the unit circle in (±1, 0) twice each? no: 3y² = 3 → y = ±1, x = 0
        let ell = HomPoly3::from_terms(2, &[((2, 0, 0), 1.0), ((0, 2, 0), 4.0), ((0, 0, 2), -2.0)]).unwrap();
        let pts = intersect_curves(&circle, &ell).unwrap();
        assert_eq!(pts.iter().map(|(_, m)| m).sum::<usize>(), 4);
        let raw: Vec<CVec3> = pts.iter().map(|(p, _)| *p).collect();
        assert!(max_residual(&circle, &ell, &raw) < 1e-12);
    }
}
