use num_complex::Complex64;

use super::{divisor_at, min_separation, system_lines, DivisorPath};
use crate::algebra::point::{ccross, chordal, cscale, csub, hdot, to_complex, CVec3};
use crate::algebra::{BinaryForm, Cp1Point, HomPoly3};
use crate::family::LoopFamily;
use crate::{Error, Result};

/// Velocity scale under which a path counts as motionless.
const STILL: f64 = 1e-8;

/// Smallest pairwise chordal distance of the divisor over the grid.
pub fn transversality_margin(path: &DivisorPath) -> f64 {
    (0..path.grid.len()).map(|k| min_separation(&path.positions_at(k))).fold(1.0, f64::min)
}

/// Greedy nearest-neighbour distance between two point multisets.
pub fn multiset_distance(a: &[CVec3], b: &[CVec3]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    let mut used = vec![false; b.len()];
    let mut worst = 0.0f64;
    for p in a {
        let best =
            (0..b.len()).filter(|&j| !used[j]).map(|j| (chordal(p, &b[j]), j)).min_by(|x, y| x.0.total_cmp(&y.0));
        if let Some((d, j)) = best {
            used[j] = true;
            worst = worst.max(d);
        }
    }
    worst
}

/// Distance between the start and end divisors of a path.
pub fn closure_defect(path: &DivisorPath) -> f64 {
    multiset_distance(&path.positions_at(0), &path.positions_at(path.steps()))
}

/// Largest distance between the tracked divisor and an independent full
/// solve, checked every `stride` grid values.
pub fn oracle_defect(f: &HomPoly3, fam: &LoopFamily, path: &DivisorPath, stride: usize) -> Result<f64> {
    let mut worst = 0.0f64;
    for k in (0..=path.steps()).step_by(stride.max(1)) {
        let solved = divisor_at(f, fam, path.grid[k])?;
        worst = worst.max(multiset_distance(&path.positions_at(k), &solved.points));
    }
    Ok(worst)
}

/// Coefficient distance between the product of the tracked roots on each
/// line and the deflated restriction, up to scale and phase.
pub fn vieta_defect(f: &HomPoly3, fam: &LoopFamily, path: &DivisorPath) -> Result<f64> {
    if !fam.is_linear() {
        return Err(Error::InvalidInput("the Vieta check applies to line systems".into()));
    }
    let mut worst = 0.0f64;
    for (k, &t) in path.grid.iter().enumerate() {
        for (i, ld) in system_lines(f, &fam.sample(t))?.iter().enumerate() {
            let (u, v) = (to_complex(ld.u), to_complex(ld.v));
            let dot = |a: &CVec3, b: &CVec3| a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
            let mut product = BinaryForm::new(vec![Complex64::new(1.0, 0.0)]);
            for p in path.points.iter().filter(|p| p.line == Some(i)) {
                let q = p.positions[k];
                product = product.times_linear(&Cp1Point::new(dot(&u, &q), dot(&v, &q)));
            }
            worst = worst.max(form_distance(&product, &ld.form));
        }
    }
    Ok(worst)
}

fn form_distance(a: &BinaryForm, b: &BinaryForm) -> f64 {
    if a.degree() != b.degree() {
        return f64::INFINITY;
    }
    let na = a.coeffs().iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    let nb = b.coeffs().iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    let inner: Complex64 = a.coeffs().iter().zip(b.coeffs()).map(|(x, y)| x.conj() * y).sum();
    let phase = if inner.norm() > 0.0 { inner / inner.norm() } else { Complex64::new(1.0, 0.0) };
    a.coeffs().iter().zip(b.coeffs()).map(|(x, y)| (x * phase / na - y / nb).norm_sqr()).sum::<f64>().sqrt()
}

/// Holomorphic differential of a plane cubic on a tangent vector: the
/// factor `λ` with `p × ṗ = λ ∇F(p)`. In the chart `z = 1` this is `ẋ / F_y`.
fn differential(f: &HomPoly3, p: &CVec3, velocity: &CVec3) -> Complex64 {
    let g = f.gradient(p);
    let w = ccross(p, velocity);
    hdot(&g, &w) / g.iter().map(|c| c.norm_sqr()).sum::<f64>()
}

/// Maximum over interior grid values of `|Σ_j ω(ṗ_j)|`, relative to the
/// largest `Σ_j |ω(ṗ_j)|`. Zero for a motionless path.
pub fn abel_jacobi_residual(f: &HomPoly3, path: &DivisorPath) -> Result<f64> {
    if f.degree() != 3 {
        return Err(Error::NotCubic);
    }
    let n = path.steps();
    let mut worst = 0.0f64;
    let mut scale = 0.0f64;
    for k in 1..n {
        let dt = path.grid[k + 1] - path.grid[k - 1];
        let mut sum = Complex64::new(0.0, 0.0);
        let mut abs = 0.0;
        for p in &path.points {
            let v = cscale(&csub(&p.positions[k + 1], &p.positions[k - 1]), (1.0 / dt).into());
            let w = differential(f, &p.positions[k], &v);
            sum += w;
            abs += w.norm();
        }
        worst = worst.max(sum.norm());
        scale = scale.max(abs);
    }
    if scale <= STILL {
        return Ok(0.0);
    }
    Ok(worst / scale)
}
