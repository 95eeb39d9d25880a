use super::point::{chordal, conj3, real_part_projective, realness_defect, CVec3, ProjPointC, ProjPointR};
use crate::{Error, Result};

/// Real/non-real role of a point within a conjugation-closed multiset.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConjClass {
    Real,
    Paired { partner: usize },
}

/// Classifies each point as real or as half of a conjugate pair.
///
/// Points within `tol` of their own conjugate are real; the rest are matched
/// greedily to the nearest unmatched conjugate.
pub fn classify_conjugates(points: &[CVec3], tol: f64) -> Result<Vec<ConjClass>> {
    let n = points.len();
    let mut out: Vec<Option<ConjClass>> =
        points.iter().map(|p| (realness_defect(p) < tol).then_some(ConjClass::Real)).collect();
    for i in 0..n {
        if out[i].is_some() {
            continue;
        }
        let target = conj3(&points[i]);
        let best = (0..n)
            .filter(|&j| j != i && out[j].is_none())
            .map(|j| (chordal(&points[j], &target), j))
            .min_by(|a, b| a.0.total_cmp(&b.0));
        match best {
            Some((d, j)) if d < tol => {
                out[i] = Some(ConjClass::Paired { partner: j });
                out[j] = Some(ConjClass::Paired { partner: i });
            }
            Some((d, _)) => return Err(Error::UnpairedPoint { distance: d }),
            None => return Err(Error::UnpairedPoint { distance: f64::INFINITY }),
        }
    }
    Ok(out.into_iter().map(|c| c.expect("every point classified")).collect())
}

/// Sign of the imaginary part of the first non-real coordinate after
/// canonical phase normalization; selects the canonical half of a pair.
pub fn upper_half(p: &CVec3) -> bool {
    let c = ProjPointC::new(*p);
    c.coords().iter().find(|z| z.im.abs() > 1e-12).is_none_or(|z| z.im > 0.0)
}

/// Real points and conjugate pairs of a conjugation-closed multiset.
pub type ConjPartition = (Vec<ProjPointR>, Vec<(ProjPointC, ProjPointC)>);

/// Splits a conjugation-closed multiset into its real part and its pairs.
pub fn conj_partition(points: &[CVec3], tol: f64) -> Result<ConjPartition> {
    let classes = classify_conjugates(points, tol)?;
    let mut real = Vec::new();
    let mut pairs = Vec::new();
    for (i, c) in classes.iter().enumerate() {
        match *c {
            ConjClass::Real => real.push(ProjPointR::new(real_part_projective(&points[i]))),
            ConjClass::Paired { partner } if partner > i => {
                let (a, b) = (points[i], points[partner]);
                let (a, b) = if upper_half(&a) { (a, b) } else { (b, a) };
                pairs.push((ProjPointC::new(a), ProjPointC::new(b)));
            }
            ConjClass::Paired { .. } => {}
        }
    }
    Ok((real, pairs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::binary::{binary_roots, restrict_to_line, BinaryForm};
    use crate::algebra::point::to_complex;
    use crate::algebra::poly::HomPoly3;
    use num_complex::Complex64;

    #[test]
    fn single_real_point() {
        let (real, pairs) = conj_partition(&[to_complex([1.0, 0.0, 1.0])], 1e-9).unwrap();
        assert_eq!(real.len(), 1);
        assert!(pairs.is_empty());
        assert!(real[0].distance(&ProjPointR::new([1.0, 0.0, 1.0])) < 1e-15);
    }

    #[test]
    fn pair_from_circle_at_infinity() {
        let b = BinaryForm::from_real(&[1.0, 0.0, 1.0]);
        let (u, v) = (to_complex([1.0, 0.0, 0.0]), to_complex([0.0, 1.0, 0.0]));
        let pts: Vec<_> = binary_roots(&b).iter().map(|r| r.point.on_line(&u, &v)).collect();
        let (real, pairs) = conj_partition(&pts, 1e-9).unwrap();
        assert!(real.is_empty());
        assert_eq!(pairs.len(), 1);
        assert!(pairs[0].0.conj().distance(&pairs[0].1) < 1e-12);
        assert!(upper_half(pairs[0].0.coords()));
    }

    #[test]
    fn x_axis_section_is_purely_real() {
        let e = HomPoly3::from_terms(3, &[((0, 2, 1), 1.0), ((3, 0, 0), -1.0), ((1, 0, 2), 1.0)]).unwrap();
        let b = restrict_to_line(&e, &[1.0, 0.0, 0.0], &[0.0, 0.0, 1.0]).unwrap();
        let (u, v) = (to_complex([1.0, 0.0, 0.0]), to_complex([0.0, 0.0, 1.0]));
        let pts: Vec<_> = binary_roots(&b).iter().map(|r| r.point.on_line(&u, &v)).collect();
        let (real, pairs) = conj_partition(&pts, 1e-9).unwrap();
        assert_eq!(real.len(), 3);
        assert!(pairs.is_empty());
    }

    #[test]
    fn lonely_complex_point_is_an_error() {
        let i = Complex64::new(0.0, 1.0);
        let p = [i, Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)];
        assert!(matches!(conj_partition(&[p], 1e-9), Err(Error::UnpairedPoint { .. })));
    }
}
