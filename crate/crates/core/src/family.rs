//! Closed one-parameter families of cutting systems.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::algebra::point::{chordal_real, dot3, normalize3, scale3, to_complex};
use crate::algebra::{HomPoly3, ProjPointR};
use crate::{Error, Result};

/// Largest chordal gap allowed between consecutive sampled lines.
pub const MAX_SAMPLE_GAP: f64 = 0.1;
/// Chordal tolerance for closure of a sampled line list.
pub const CLOSURE_TOL: f64 = 1e-10;
/// Tolerance on `|F(C)|` for a pencil base point.
pub const BASE_POINT_TOL: f64 = 1e-9;

/// A member of a family: what is intersected with the curve.
#[derive(Debug, Clone, PartialEq)]
pub enum Cutter {
    /// Unit line-coordinate vectors, in a fixed order along the loop.
    Lines(Vec<[f64; 3]>),
    Curve(HomPoly3),
}

#[derive(Debug, Clone, PartialEq)]
pub struct CuttingSystem {
    pub cutter: Cutter,
    /// Real base points removed from every line passing through them.
    pub base_points: Vec<[f64; 3]>,
}

impl CuttingSystem {
    pub fn lines(&self) -> Option<&[[f64; 3]]> {
        match &self.cutter {
            Cutter::Lines(l) => Some(l),
            Cutter::Curve(_) => None,
        }
    }

    /// Chordal distance to another system, up to scale and line reordering.
    pub fn distance(&self, other: &CuttingSystem) -> f64 {
        match (&self.cutter, &other.cutter) {
            (Cutter::Lines(a), Cutter::Lines(b)) if a.len() == b.len() => {
                // greedy permutation match; line sets here are small
                let mut used = vec![false; b.len()];
                let mut worst = 0.0f64;
                for la in a {
                    let (j, d) = b
                        .iter()
                        .enumerate()
                        .filter(|(j, _)| !used[*j])
                        .map(|(j, lb)| (j, chordal_real(la, lb)))
                        .min_by(|x, y| x.1.total_cmp(&y.1))
                        .expect("same length");
                    used[j] = true;
                    worst = worst.max(d);
                }
                worst
            }
            (Cutter::Curve(f), Cutter::Curve(g)) => {
                let c = f.coefficient_cosine(g).abs().min(1.0);
                (1.0 - c * c).sqrt()
            }
            _ => 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum FamilyKind {
    /// Lines through `center`, normal at angle `start_angle + t` in the chart `z = 1`.
    LinePencil { center: [f64; 3], start_angle: f64 },
    /// Lines through `center` swinging back and forth: angle `start_angle + amplitude·sin t`.
    PencilSweep { center: [f64; 3], start_angle: f64, amplitude: f64 },
    /// `k` pencil lines at angles `start_angle + t + jπ/k`.
    LineProduct { center: [f64; 3], k: usize, start_angle: f64 },
    /// `cos t · F₀ + sin t · F₁`.
    BinaryPencil { f0: HomPoly3, f1: HomPoly3 },
    /// `F₀ + ε (cos t · G₁ + sin t · G₂)`.
    PerturbationLoop { f0: HomPoly3, g1: HomPoly3, g2: HomPoly3, epsilon: f64 },
    /// Spherical interpolation through line samples, one unit of time per segment.
    SampledLines { samples: Vec<[f64; 3]> },
}

/// A closed loop of cutting systems over `t ∈ [0, period]`.
#[derive(Debug, Clone, PartialEq)]
pub struct LoopFamily {
    kind: FamilyKind,
    period: f64,
    base_points: Vec<[f64; 3]>,
}

/// Line through the affine-chart point `center` with normal angle `theta`.
pub fn pencil_line(center: &[f64; 3], theta: f64) -> [f64; 3] {
    let (s, c) = theta.sin_cos();
    let (x, y) = (center[0] / center[2], center[1] / center[2]);
    normalize3(&[c, s, -(c * x + s * y)])
}

fn affine_center(c: &ProjPointR) -> Result<[f64; 3]> {
    let (x, y) = c.to_affine().ok_or_else(|| Error::InvalidInput("pencil centers must be affine points".into()))?;
    Ok([x, y, 1.0])
}

fn slerp(a: &[f64; 3], b: &[f64; 3], s: f64) -> [f64; 3] {
    let cos = dot3(a, b).clamp(-1.0, 1.0);
    let omega = cos.acos();
    if omega < 1e-12 {
        return normalize3(&[a[0] + s * (b[0] - a[0]), a[1] + s * (b[1] - a[1]), a[2] + s * (b[2] - a[2])]);
    }
    let wa = ((1.0 - s) * omega).sin() / omega.sin();
    let wb = (s * omega).sin() / omega.sin();
    normalize3(&[wa * a[0] + wb * b[0], wa * a[1] + wb * b[1], wa * a[2] + wb * b[2]])
}

impl LoopFamily {
    pub fn kind(&self) -> &FamilyKind {
        &self.kind
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    pub fn base_points(&self) -> &[[f64; 3]] {
        &self.base_points
    }

    /// Whether the systems are made of lines.
    pub fn is_linear(&self) -> bool {
        !matches!(self.kind, FamilyKind::BinaryPencil { .. } | FamilyKind::PerturbationLoop { .. })
    }

    /// Cutting system at parameter `t ∈ [0, period]`.
    pub fn sample(&self, t: f64) -> CuttingSystem {
        let cutter = match &self.kind {
            FamilyKind::LinePencil { center, start_angle } => Cutter::Lines(vec![pencil_line(center, start_angle + t)]),
            FamilyKind::PencilSweep { center, start_angle, amplitude } => {
                Cutter::Lines(vec![pencil_line(center, start_angle + amplitude * t.sin())])
            }
            FamilyKind::LineProduct { center, k, start_angle } => Cutter::Lines(
                (0..*k).map(|j| pencil_line(center, start_angle + t + j as f64 * PI / *k as f64)).collect(),
            ),
            FamilyKind::BinaryPencil { f0, f1 } => {
                Cutter::Curve(f0.combine(t.cos(), f1, t.sin()).expect("pencil forms are independent"))
            }
            FamilyKind::PerturbationLoop { f0, g1, g2, epsilon } => {
                let g = g1.combine(t.cos(), g2, t.sin()).expect("perturbation forms are independent");
                Cutter::Curve(f0.combine(1.0, &g, *epsilon).expect("perturbation is small"))
            }
            FamilyKind::SampledLines { samples } => {
                let n = samples.len() - 1;
                let t = t.clamp(0.0, n as f64);
                let i = (t.floor() as usize).min(n.saturating_sub(1));
                let s = t - i as f64;
                if n == 0 {
                    Cutter::Lines(vec![samples[0]])
                } else {
                    Cutter::Lines(vec![slerp(&samples[i], &samples[i + 1], s)])
                }
            }
        };
        CuttingSystem { cutter, base_points: self.base_points.clone() }
    }

    /// Distance between the systems at `t = 0` and `t = period`.
    pub fn closure_defect(&self) -> f64 {
        self.sample(0.0).distance(&self.sample(self.period))
    }
}

/// Pencil of lines through an affine point; period π.
pub fn line_pencil(c: &ProjPointR) -> Result<LoopFamily> {
    line_pencil_at(c, 0.0)
}

/// Pencil starting at normal angle `start_angle`.
pub fn line_pencil_at(c: &ProjPointR, start_angle: f64) -> Result<LoopFamily> {
    Ok(LoopFamily {
        kind: FamilyKind::LinePencil { center: affine_center(c)?, start_angle },
        period: PI,
        base_points: Vec::new(),
    })
}

fn check_on_curve(f: &HomPoly3, c: &[f64; 3]) -> Result<()> {
    let residual = f.eval_real(&normalize3(c)).abs();
    if residual > BASE_POINT_TOL {
        return Err(Error::NotOnCurve { residual });
    }
    Ok(())
}

/// Pencil about a curve point `C`, with `C` removed from every cut divisor.
pub fn line_pencil_with_base_point(f: &HomPoly3, c: &ProjPointR, start_angle: f64) -> Result<LoopFamily> {
    let center = affine_center(c)?;
    check_on_curve(f, &center)?;
    Ok(LoopFamily {
        kind: FamilyKind::LinePencil { center, start_angle },
        period: PI,
        base_points: vec![normalize3(&center)],
    })
}

/// Back-and-forth sweep of the pencil about a curve point `C`; period 2π.
pub fn pencil_sweep(f: &HomPoly3, c: &ProjPointR, start_angle: f64, amplitude: f64) -> Result<LoopFamily> {
    let center = affine_center(c)?;
    check_on_curve(f, &center)?;
    Ok(LoopFamily {
        kind: FamilyKind::PencilSweep { center, start_angle, amplitude },
        period: 2.0 * PI,
        base_points: vec![normalize3(&center)],
    })
}

/// `k` equally spaced lines of the pencil through `c`; period π/k.
pub fn line_product(c: &ProjPointR, k: usize) -> Result<LoopFamily> {
    line_product_at(c, k, 0.0)
}

pub fn line_product_at(c: &ProjPointR, k: usize, start_angle: f64) -> Result<LoopFamily> {
    if k < 2 {
        return Err(Error::InvalidInput(format!("line product needs k ≥ 2, got {k}")));
    }
    Ok(LoopFamily {
        kind: FamilyKind::LineProduct { center: affine_center(c)?, k, start_angle },
        period: PI / k as f64,
        base_points: Vec::new(),
    })
}

/// [`line_product`] with the center required to lie inside `oval`.
pub fn line_product_in_oval(c: &ProjPointR, k: usize, oval: &crate::topology::CurveComponent) -> Result<LoopFamily> {
    if !crate::topology::point_in_oval(c, oval)? {
        return Err(Error::NotInterior);
    }
    line_product(c, k)
}

fn check_independent(a: &HomPoly3, b: &HomPoly3) -> Result<()> {
    if a.degree() != b.degree() {
        return Err(Error::InvalidInput("pencil forms must have equal degree".into()));
    }
    if a.coefficient_cosine(b).abs() > 1.0 - 1e-12 {
        return Err(Error::ProportionalForms);
    }
    Ok(())
}

/// Projective pencil `cos θ F₀ + sin θ F₁`, `θ ∈ [0, π]`.
pub fn binary_curve_pencil(f0: &HomPoly3, f1: &HomPoly3) -> Result<LoopFamily> {
    check_independent(f0, f1)?;
    Ok(LoopFamily {
        kind: FamilyKind::BinaryPencil { f0: f0.clone(), f1: f1.clone() },
        period: PI,
        base_points: Vec::new(),
    })
}

/// Small circle `F₀ + ε(cos t G₁ + sin t G₂)` around `F₀`; period 2π.
pub fn perturbation_loop(f0: &HomPoly3, g1: &HomPoly3, g2: &HomPoly3, epsilon: f64) -> Result<LoopFamily> {
    check_independent(f0, g1)?;
    check_independent(g1, g2)?;
    if !(epsilon > 0.0 && epsilon < 0.5) {
        return Err(Error::InvalidInput(format!("perturbation size {epsilon} out of range")));
    }
    Ok(LoopFamily {
        kind: FamilyKind::PerturbationLoop { f0: f0.clone(), g1: g1.clone(), g2: g2.clone(), epsilon },
        period: 2.0 * PI,
        base_points: Vec::new(),
    })
}

/// Line loop through explicit samples; the list must close up to scale.
pub fn sampled_line_loop(samples: &[[f64; 3]]) -> Result<LoopFamily> {
    sampled_line_loop_with_base_points(samples, &[])
}

pub fn sampled_line_loop_with_base_points(samples: &[[f64; 3]], base_points: &[[f64; 3]]) -> Result<LoopFamily> {
    if samples.len() < 2 {
        return Err(Error::InvalidInput("a sampled loop needs at least two samples".into()));
    }
    let mut lines: Vec<[f64; 3]> = Vec::with_capacity(samples.len());
    for (i, s) in samples.iter().enumerate() {
        if !s.iter().all(|v| v.is_finite()) || s.iter().all(|v| *v == 0.0) {
            return Err(Error::InvalidInput(format!("sample {i} is not a line")));
        }
        let mut l = normalize3(s);
        if let Some(prev) = lines.last() {
            if dot3(prev, &l) < 0.0 {
                l = scale3(&l, -1.0);
            }
            let d = chordal_real(prev, &l);
            if d > MAX_SAMPLE_GAP {
                return Err(Error::TooCoarse { index: i, distance: d });
            }
        }
        lines.push(l);
    }
    let gap = chordal_real(&lines[0], lines.last().expect("nonempty"));
    if gap > CLOSURE_TOL {
        return Err(Error::NotClosed { distance: gap });
    }
    Ok(LoopFamily {
        period: (lines.len() - 1) as f64,
        kind: FamilyKind::SampledLines { samples: lines },
        base_points: base_points.iter().map(normalize3).collect(),
    })
}

/// Tangent lines of the ellipse `((x−x₀)/a)² + ((y−y₀)/b)² = 1` at `count`
/// equally spaced parameter values, closed by repeating the first.
pub fn ellipse_tangent_lines(center: (f64, f64), axes: (f64, f64), count: usize) -> Vec<[f64; 3]> {
    let (x0, y0) = center;
    let (a, b) = axes;
    (0..=count)
        .map(|i| {
            let s = 2.0 * PI * (i % count) as f64 / count as f64;
            let (sn, cs) = s.sin_cos();
            let p = (x0 + a * cs, y0 + b * sn);
            let n = (cs / a, sn / b);
            normalize3(&[n.0, n.1, -(n.0 * p.0 + n.1 * p.1)])
        })
        .collect()
}

pub fn ellipse_tangents(center: (f64, f64), axes: (f64, f64), count: usize) -> Result<LoopFamily> {
    if !(axes.0 > 0.0 && axes.1 > 0.0) || count < 3 {
        return Err(Error::InvalidInput("ellipse needs positive axes and at least 3 samples".into()));
    }
    sampled_line_loop(&ellipse_tangent_lines(center, axes, count))
}

/// Serialized form of a family, as it appears in scenario configs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum FamilySpec {
    LinePencil {
        center: [f64; 2],
        #[serde(default)]
        start_angle: f64,
        #[serde(default)]
        deflate_center: bool,
    },
    PencilSweep {
        center: [f64; 2],
        start_angle: f64,
        amplitude: f64,
    },
    LineProduct {
        center: [f64; 2],
        k: usize,
        #[serde(default)]
        start_angle: f64,
    },
    BinaryPencil {
        #[serde(rename = "F0")]
        f0: HomPoly3,
        #[serde(rename = "F1")]
        f1: HomPoly3,
    },
    PerturbationLoop {
        #[serde(rename = "F0")]
        f0: HomPoly3,
        /// Filled from a seed by the scenario runner when absent.
        #[serde(rename = "G1", default, skip_serializing_if = "Option::is_none")]
        g1: Option<HomPoly3>,
        #[serde(rename = "G2", default, skip_serializing_if = "Option::is_none")]
        g2: Option<HomPoly3>,
        epsilon: f64,
    },
    SampledLines {
        samples: Vec<[f64; 3]>,
        #[serde(default)]
        base_points: Vec<[f64; 3]>,
    },
    EllipseTangents {
        center: [f64; 2],
        semi_axes: [f64; 2],
        samples: usize,
    },
}

impl FamilySpec {
    /// Builds the family for the curve `f` (needed to validate base points).
    pub fn build(&self, f: &HomPoly3) -> Result<LoopFamily> {
        let pt = |c: &[f64; 2]| ProjPointR::affine(c[0], c[1]);
        match self {
            FamilySpec::LinePencil { center, start_angle, deflate_center } => {
                if *deflate_center {
                    line_pencil_with_base_point(f, &pt(center), *start_angle)
                } else {
                    line_pencil_at(&pt(center), *start_angle)
                }
            }
            FamilySpec::PencilSweep { center, start_angle, amplitude } => {
                pencil_sweep(f, &pt(center), *start_angle, *amplitude)
            }
            FamilySpec::LineProduct { center, k, start_angle } => line_product_at(&pt(center), *k, *start_angle),
            FamilySpec::BinaryPencil { f0, f1 } => binary_curve_pencil(f0, f1),
            FamilySpec::PerturbationLoop { f0, g1, g2, epsilon } => match (g1, g2) {
                (Some(g1), Some(g2)) => perturbation_loop(f0, g1, g2, *epsilon),
                _ => Err(Error::InvalidInput("perturbation loop needs both G1 and G2".into())),
            },
            FamilySpec::SampledLines { samples, base_points } => {
                for b in base_points {
                    check_on_curve(f, b)?;
                }
                sampled_line_loop_with_base_points(samples, base_points)
            }
            FamilySpec::EllipseTangents { center, semi_axes, samples } => {
                ellipse_tangents((center[0], center[1]), (semi_axes[0], semi_axes[1]), *samples)
            }
        }
    }
}

/// Points of `sys` where its lines pass through `p` (used by tests and presets).
pub fn passes_through(sys: &CuttingSystem, p: &[f64; 3], tol: f64) -> bool {
    match &sys.cutter {
        Cutter::Lines(lines) => lines.iter().any(|l| dot3(l, &normalize3(p)).abs() < tol),
        Cutter::Curve(g) => g.eval(&to_complex(normalize3(p))).norm() < tol,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::point::line_frame;
    use crate::algebra::{binary_roots, restrict_to_line};

    fn e_curve() -> HomPoly3 {
        HomPoly3::from_terms(3, &[((0, 2, 1), 1.0), ((3, 0, 0), -1.0), ((1, 0, 2), 1.0)]).unwrap()
    }

    fn real_root_count(f: &HomPoly3, line: &[f64; 3]) -> usize {
        let (u, v) = line_frame(line);
        let b = restrict_to_line(f, &u, &v).unwrap();
        binary_roots(&b)
            .iter()
            .filter(|r| {
                let (a, b) = (r.point.alpha, r.point.beta);
                (a * b.conj()).im.abs() < 1e-9
            })
            .map(|r| r.multiplicity)
            .sum()
    }

    #[test]
    fn pencil_closes_up_to_sign() {
        let fam = line_pencil(&ProjPointR::affine(-0.5, 0.0)).unwrap();
        let l0 = fam.sample(0.0).lines().unwrap()[0];
        let l1 = fam.sample(PI).lines().unwrap()[0];
        assert!(chordal_real(&l0, &l1) < 1e-12);
        assert!(dot3(&l0, &l1) < 0.0);
        // horizontal normal: the vertical line x = −0.5
        assert!(l0[1].abs() < 1e-15);
        assert!(fam.closure_defect() < 1e-10);
    }

    #[test]
    fn interior_pencil_is_separating() {
        let f = e_curve();
        let fam = line_pencil(&ProjPointR::affine(-0.5, 0.0)).unwrap();
        for i in 0..200 {
            let sys = fam.sample(PI * i as f64 / 200.0);
            assert_eq!(real_root_count(&f, &sys.lines().unwrap()[0]), 3, "sample {i}");
        }
        let far = line_pencil(&ProjPointR::affine(5.0, 5.0)).unwrap();
        let ones = (0..200)
            .filter(|i| real_root_count(&f, &far.sample(PI * *i as f64 / 200.0).lines().unwrap()[0]) == 1)
            .count();
        assert!(ones > 0);
    }

    #[test]
    fn base_point_must_lie_on_curve() {
        let f = e_curve();
        assert!(matches!(
            line_pencil_with_base_point(&f, &ProjPointR::affine(0.5, 0.0), 0.0),
            Err(Error::NotOnCurve { .. })
        ));
        let fam = line_pencil_with_base_point(&f, &ProjPointR::affine(1.0, 0.0), 0.3).unwrap();
        assert_eq!(fam.base_points().len(), 1);
        assert!(passes_through(&fam.sample(1.234), &[1.0, 0.0, 1.0], 1e-12));
    }

    #[test]
    fn line_product_closes_with_reordering() {
        let fam = line_product(&ProjPointR::affine(-0.5, 0.0), 3).unwrap();
        assert!((fam.period() - PI / 3.0).abs() < 1e-15);
        let a = fam.sample(0.2);
        let b = fam.sample(0.2 + PI / 3.0);
        assert!(a.distance(&b) < 1e-10);
        assert!(fam.closure_defect() < 1e-10);
        assert!(line_product(&ProjPointR::affine(0.0, 0.0), 1).is_err());
    }

    #[test]
    fn binary_pencil_closes_and_rejects_proportional() {
        let f = e_curve();
        let g = HomPoly3::from_terms(3, &[((3, 0, 0), 1.0), ((0, 3, 0), 1.0), ((0, 0, 3), -1.0)]).unwrap();
        let fam = binary_curve_pencil(&f, &g).unwrap();
        assert!(fam.closure_defect() < 1e-10);
        let twice = HomPoly3::from_coeffs(3, f.coeffs().iter().map(|c| -2.0 * c).collect()).unwrap();
        assert_eq!(binary_curve_pencil(&f, &twice).unwrap_err(), Error::ProportionalForms);
    }

    #[test]
    fn sampled_loops() {
        let lines = ellipse_tangent_lines((-0.5, 0.0), (0.8, 0.8), 720);
        let fam = sampled_line_loop(&lines).unwrap();
        assert_eq!(fam.period(), 720.0);
        assert!(fam.closure_defect() < 1e-10);

        let constant = sampled_line_loop(&[[1.0, 0.0, 0.2]; 5]).unwrap();
        assert!(constant.sample(0.0).distance(&constant.sample(2.7)) < 1e-15);

        let mut rev = lines.clone();
        rev.reverse();
        let back = sampled_line_loop(&rev).unwrap();
        let d = fam.sample(100.25).distance(&back.sample(720.0 - 100.25));
        assert!(d < 1e-12);

        assert!(matches!(
            sampled_line_loop(&[[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [1.0, 0.0, 0.0]]),
            Err(Error::TooCoarse { index: 1, .. })
        ));
        assert!(matches!(sampled_line_loop(&[[1.0, 0.0, 0.0], [1.0, 0.05, 0.0]]), Err(Error::NotClosed { .. })));
    }

    #[test]
    fn ellipse_tangents_miss_the_oval() {
        let f = e_curve();
        let fam = ellipse_tangents((-0.5, 0.0), (0.8, 0.8), 720).unwrap();
        for i in 0..720 {
            let l = fam.sample(i as f64 + 0.5).lines().unwrap()[0];
            assert_eq!(real_root_count(&f, &l), 1, "sample {i}");
        }
    }

    #[test]
    fn spec_round_trip() {
        let json = r#"{"kind":"line_product","center":[-0.5,0.0],"k":3}"#;
        let spec: FamilySpec = serde_json::from_str(json).unwrap();
        let fam = spec.build(&e_curve()).unwrap();
        assert!(matches!(fam.kind(), FamilyKind::LineProduct { k: 3, .. }));
        let bad = r#"{"kind":"line_pencil","center":[0,0],"extra":1}"#;
        assert!(serde_json::from_str::<FamilySpec>(bad).is_err());
    }
}
