//! Simultaneous root iteration for univariate complex polynomials.

use num_complex::Complex64;

const MAX_ITERATIONS: usize = 800;

/// Value and derivative by Horner's rule; `coeffs` are in ascending order.
pub fn horner(coeffs: &[Complex64], z: Complex64) -> (Complex64, Complex64) {
    let mut p = Complex64::new(0.0, 0.0);
    let mut dp = Complex64::new(0.0, 0.0);
    for &c in coeffs.iter().rev() {
        dp = dp * z + p;
        p = p * z + c;
    }
    (p, dp)
}

/// Effective degree after dropping leading coefficients below `1e-14` of the largest.
pub fn effective_degree(coeffs: &[Complex64]) -> usize {
    let scale = coeffs.iter().fold(0.0f64, |m, c| m.max(c.norm()));
    let mut n = coeffs.len().saturating_sub(1);
    while n > 0 && coeffs[n].norm() <= 1e-14 * scale {
        n -= 1;
    }
    n
}

/// All finite roots of `Σ coeffs[k] z^k` by Aberth–Ehrlich iteration.
///
/// Leading coefficients that are negligible are dropped, so the returned
/// vector can be shorter than `coeffs.len() - 1`.
pub fn aberth(coeffs: &[Complex64]) -> Vec<Complex64> {
    let n = effective_degree(coeffs);
    if n == 0 {
        return Vec::new();
    }
    let p = &coeffs[..=n];
    let lead = p[n];
    let monic: Vec<Complex64> = p.iter().map(|c| c / lead).collect();
    if n == 1 {
        return vec![-monic[0]];
    }

    // Fujiwara bound for the initial circle
    let mut bound = 0.0f64;
    for (k, c) in monic.iter().enumerate().take(n) {
        let e = (n - k) as f64;
        let mut r = c.norm().powf(1.0 / e);
        if k == 0 {
            r *= 0.5f64.powf(1.0 / e);
        }
        bound = bound.max(r);
    }
    let radius = if bound > 0.0 { bound } else { 1.0 };
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| {
            let angle = 2.0 * std::f64::consts::PI * k as f64 / n as f64 + 0.4;
            Complex64::from_polar(radius, angle)
        })
        .collect();

    let deriv: Vec<Complex64> = (1..=n).map(|k| monic[k] * k as f64).collect();
    for _ in 0..MAX_ITERATIONS {
        let mut moved = false;
        for k in 0..n {
            let (pv, _) = horner(&monic, z[k]);
            if pv.norm() == 0.0 {
                continue;
            }
            let (dv, _) = horner(&deriv, z[k]);
            let s: Complex64 = (0..n)
                .filter(|&j| j != k)
                .map(|j| {
                    let d = z[k] - z[j];
                    if d.norm() == 0.0 {
                        Complex64::new(0.0, 0.0)
                    } else {
                        d.inv()
                    }
                })
                .sum();
            let denom = dv - pv * s;
            let w = if denom.norm() == 0.0 || !denom.is_finite() {
                Complex64::new(1e-8 * (1.0 + z[k].norm()), 1e-8)
            } else {
                pv / denom
            };
            if !w.is_finite() {
                continue;
            }
            z[k] -= w;
            if w.norm() > 4.0 * f64::EPSILON * (1.0 + z[k].norm()) {
                moved = true;
            }
        }
        if !moved {
            break;
        }
    }
    z
}

/// A few Newton steps on a simple root, kept only while the residual drops.
pub fn newton_polish(coeffs: &[Complex64], mut z: Complex64, steps: usize) -> Complex64 {
    let (mut pv, mut dv) = horner(coeffs, z);
    for _ in 0..steps {
        if dv.norm() == 0.0 {
            break;
        }
        let cand = z - pv / dv;
        let (cp, cd) = horner(coeffs, cand);
        if cp.norm() >= pv.norm() {
            break;
        }
        z = cand;
        pv = cp;
        dv = cd;
    }
    z
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn sorted_re(mut v: Vec<Complex64>) -> Vec<f64> {
        v.sort_by(|a, b| a.re.total_cmp(&b.re));
        v.into_iter().map(|z| z.re).collect()
    }

    #[test]
    fn cubic_with_zero_root() {
        // -t^3 + t
        let r = aberth(&[c(0.0), c(1.0), c(0.0), c(-1.0)]);
        let r = sorted_re(r);
        for (a, b) in r.iter().zip([-1.0, 0.0, 1.0]) {
            assert!((a - b).abs() < 1e-14, "{r:?}");
        }
    }

    #[test]
    fn wilkinson_like_degree_nine() {
        // (t-1)(t-2)...(t-9)
        let mut p = vec![c(1.0)];
        for k in 1..=9 {
            let mut q = vec![c(0.0); p.len() + 1];
            for (i, a) in p.iter().enumerate() {
                q[i + 1] += a;
                q[i] -= a * k as f64;
            }
            p = q;
        }
        let r = sorted_re(aberth(&p));
        for (i, a) in r.iter().enumerate() {
            assert!((a - (i + 1) as f64).abs() < 1e-8, "{r:?}");
        }
    }

    #[test]
    fn negligible_leading_coefficient_is_dropped() {
        let r = aberth(&[c(-1.0), c(1.0), c(1e-17)]);
        assert_eq!(r.len(), 1);
        assert!((r[0] - c(1.0)).norm() < 1e-15);
    }

    #[test]
    fn complex_pair() {
        let r = aberth(&[c(1.0), c(0.0), c(1.0)]);
        let mut ims: Vec<f64> = r.iter().map(|z| z.im).collect();
        ims.sort_by(f64::total_cmp);
        assert!((ims[0] + 1.0).abs() < 1e-14 && (ims[1] - 1.0).abs() < 1e-14);
    }
}
