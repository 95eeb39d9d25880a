//! Path tracking of the cut divisor around a loop of cutting systems.

mod diagnostics;

use serde::{Deserialize, Serialize};

use crate::algebra::point::{
    align_phase, cadd, chordal, cnormalize, conj3, cscale, csub, line_frame, real_part_projective, realness_defect,
    to_complex, CVec3,
};
use crate::algebra::roots::horner;
use crate::algebra::{
    binary_roots, classify_conjugates, deflate, intersect_curves, newton_two_curves, restrict_to_line, BinaryForm,
    ConjClass, Cp1Point, HomPoly3,
};
use crate::family::{Cutter, CuttingSystem, LoopFamily};
use crate::topology::CurveTopology;
use crate::{Error, Result};

pub use diagnostics::{
    abel_jacobi_residual, closure_defect, multiset_distance, oracle_defect, transversality_margin, vieta_defect,
};

/// Realness threshold used to classify solved points.
const CLASSIFY_TOL: f64 = 1e-8;
/// Residual `|F(p)|`, `|G(p)|` accepted after a corrector step.
const SYSTEM_TOL: f64 = 1e-9;
/// Re-solved separation below which a failed step is read as a discriminant crossing.
const NEAR_DISCRIMINANT: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrackerConfig {
    pub steps: usize,
    pub corrector_tol: f64,
    pub collision_tol: f64,
    pub max_retries: usize,
}

impl Default for TrackerConfig {
    fn default() -> Self {
        TrackerConfig { steps: 2000, corrector_tol: 1e-11, collision_tol: 1e-6, max_retries: 8 }
    }
}

impl TrackerConfig {
    pub fn with_steps(steps: usize) -> Self {
        TrackerConfig { steps, ..Self::default() }
    }

    /// Imaginary drift under which a real point is projected back to real.
    pub fn snap_tol(&self) -> f64 {
        self.corrector_tol * 100.0
    }
}

/// A simple divisor cut by one cutting system.
#[derive(Debug, Clone, PartialEq)]
pub struct Divisor {
    pub points: Vec<CVec3>,
    pub multiplicities: Vec<usize>,
    pub classes: Vec<ConjClass>,
    /// Index of the line carrying each point (line systems only).
    pub lines: Vec<Option<usize>>,
}

impl Divisor {
    pub fn degree(&self) -> usize {
        self.multiplicities.iter().sum()
    }

    pub fn min_separation(&self) -> f64 {
        min_separation(&self.points)
    }

    pub fn is_simple(&self, collision_tol: f64) -> bool {
        self.multiplicities.iter().all(|&m| m == 1) && self.min_separation() > collision_tol
    }

    pub fn real_count(&self) -> usize {
        self.classes.iter().filter(|c| **c == ConjClass::Real).count()
    }

    /// Pointwise complex conjugate; pairs keep their indices.
    pub fn conjugate(&self) -> Divisor {
        Divisor { points: self.points.iter().map(conj3).collect(), ..self.clone() }
    }
}

pub(crate) fn min_separation(points: &[CVec3]) -> f64 {
    let mut m = 1.0f64;
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            m = m.min(chordal(&points[i], &points[j]));
        }
    }
    m
}

/// Frame and deflated restriction of the curve to one line of a system.
#[derive(Debug, Clone)]
struct LineData {
    u: [f64; 3],
    v: [f64; 3],
    form: BinaryForm,
}

fn line_data(f: &HomPoly3, line: &[f64; 3], base_points: &[[f64; 3]]) -> Result<LineData> {
    let (u, v) = line_frame(line);
    let mut form = restrict_to_line(f, &u, &v)?;
    for b in base_points {
        let (a, bb) = (crate::algebra::point::dot3(b, &u), crate::algebra::point::dot3(b, &v));
        let on_line = crate::algebra::point::dot3(b, line).abs();
        if on_line < 1e-9 {
            form = deflate(&form, &Cp1Point::real(a, bb), 1e-8)?;
        }
    }
    Ok(LineData { u, v, form })
}

fn system_lines(f: &HomPoly3, sys: &CuttingSystem) -> Result<Vec<LineData>> {
    match &sys.cutter {
        Cutter::Lines(lines) => lines.iter().map(|l| line_data(f, l, &sys.base_points)).collect(),
        Cutter::Curve(_) => Ok(Vec::new()),
    }
}

/// All points cut by `sys`, with multiplicities and carrying line.
pub fn solve_system(f: &HomPoly3, sys: &CuttingSystem) -> Result<Vec<(CVec3, usize, Option<usize>)>> {
    match &sys.cutter {
        Cutter::Lines(_) => {
            let mut out = Vec::new();
            for (i, ld) in system_lines(f, sys)?.iter().enumerate() {
                let (u, v) = (to_complex(ld.u), to_complex(ld.v));
                for r in binary_roots(&ld.form) {
                    out.push((cnormalize(&r.point.on_line(&u, &v)), r.multiplicity, Some(i)));
                }
            }
            Ok(out)
        }
        Cutter::Curve(g) => Ok(intersect_curves(f, g)?.into_iter().map(|(p, m)| (p, m, None)).collect()),
    }
}

fn divisor_from(solved: Vec<(CVec3, usize, Option<usize>)>) -> Result<Divisor> {
    let points: Vec<CVec3> = solved.iter().map(|s| s.0).collect();
    let classes = classify_conjugates(&points, CLASSIFY_TOL)?;
    let points = points
        .iter()
        .zip(&classes)
        .map(|(p, c)| match c {
            ConjClass::Real => to_complex(real_part_projective(p)),
            ConjClass::Paired { .. } => *p,
        })
        .collect();
    Ok(Divisor {
        points,
        multiplicities: solved.iter().map(|s| s.1).collect(),
        classes,
        lines: solved.iter().map(|s| s.2).collect(),
    })
}

/// Divisor cut by the family at parameter `t`, without a simplicity check.
pub fn divisor_at(f: &HomPoly3, fam: &LoopFamily, t: f64) -> Result<Divisor> {
    divisor_from(solve_system(f, &fam.sample(t))?)
}

/// Divisor cut at `t = 0`; must be simple.
pub fn initial_divisor(f: &HomPoly3, fam: &LoopFamily) -> Result<Divisor> {
    initial_divisor_with(f, fam, TrackerConfig::default().collision_tol)
}

pub fn initial_divisor_with(f: &HomPoly3, fam: &LoopFamily, collision_tol: f64) -> Result<Divisor> {
    let solved = solve_system(f, &fam.sample(0.0))?;
    if let Some(s) = solved.iter().find(|s| s.1 > 1) {
        return Err(Error::NonSimpleStart(format!("root of multiplicity {}", s.1)));
    }
    let d = divisor_from(solved)?;
    let sep = d.min_separation();
    if sep <= collision_tol {
        return Err(Error::NonSimpleStart(format!("points {sep:.3e} apart")));
    }
    Ok(d)
}

/// One tracked point over the grid.
#[derive(Debug, Clone, PartialEq)]
pub struct TrackedPoint {
    pub class: ConjClass,
    pub line: Option<usize>,
    /// Component of a real point.
    pub component: Option<usize>,
    /// Unit representatives, phase-aligned step to step.
    pub positions: Vec<CVec3>,
    /// Unwrapped arc parameter of a real point (raw marching order).
    pub lift: Vec<f64>,
}

impl TrackedPoint {
    pub fn is_real(&self) -> bool {
        self.class == ConjClass::Real
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DivisorPath {
    pub grid: Vec<f64>,
    pub points: Vec<TrackedPoint>,
    pub max_residual: f64,
    pub min_separation: f64,
}

impl DivisorPath {
    pub fn steps(&self) -> usize {
        self.grid.len() - 1
    }

    pub fn period(&self) -> f64 {
        *self.grid.last().expect("grid is nonempty") - self.grid[0]
    }

    pub fn degree(&self) -> usize {
        self.points.len()
    }

    pub fn positions_at(&self, k: usize) -> Vec<CVec3> {
        self.points.iter().map(|p| p.positions[k]).collect()
    }

    pub fn is_purely_real(&self) -> bool {
        self.points.iter().all(TrackedPoint::is_real)
    }

    /// Components carrying at least one real point.
    pub fn occupied(&self) -> std::collections::BTreeSet<usize> {
        self.points.iter().filter_map(|p| p.component).collect()
    }
}

#[derive(Debug, Clone, Copy)]
enum StepFailure {
    Diverged(usize),
    LeftReal,
    Jump,
    Collision,
}

struct Stepper<'a> {
    f: &'a HomPoly3,
    fam: &'a LoopFamily,
    cfg: &'a TrackerConfig,
    classes: &'a [ConjClass],
    lines: &'a [Option<usize>],
}

fn newton_on_line(ld: &LineData, p0: &CVec3, tol: f64) -> Option<CVec3> {
    let (u, v) = (to_complex(ld.u), to_complex(ld.v));
    let dot = |a: &CVec3, b: &CVec3| a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
    let alpha = dot(&u, p0);
    let beta = dot(&v, p0);
    let coeffs = ld.form.coeffs();
    let alpha_chart = alpha.norm() >= beta.norm();
    let poly: Vec<_> = if alpha_chart { coeffs.iter().rev().copied().collect() } else { coeffs.to_vec() };
    let mut s = if alpha_chart { beta / alpha } else { alpha / beta };
    let mut converged = 0;
    for _ in 0..40 {
        let (p, dp) = horner(&poly, s);
        let ds = p / dp;
        if !ds.is_finite() {
            return None;
        }
        s -= ds;
        if ds.norm() <= tol * (1.0 + s.norm()) {
            converged += 1;
            if converged == 2 {
                break;
            }
        }
    }
    if converged == 0 {
        return None;
    }
    let one = num_complex::Complex64::new(1.0, 0.0);
    let pt = if alpha_chart { Cp1Point { alpha: one, beta: s } } else { Cp1Point { alpha: s, beta: one } };
    Some(cnormalize(&pt.on_line(&u, &v)))
}

impl Stepper<'_> {
    fn correct(
        &self,
        j: usize,
        sys: &CuttingSystem,
        lines: &[LineData],
        pred: &CVec3,
    ) -> std::result::Result<CVec3, StepFailure> {
        let tol = self.cfg.corrector_tol;
        let q = match (&sys.cutter, self.lines[j]) {
            (Cutter::Lines(_), Some(i)) => newton_on_line(&lines[i], pred, tol),
            (Cutter::Curve(g), _) => newton_two_curves(self.f, g, pred, tol, 40),
            _ => None,
        };
        let q = q.ok_or(StepFailure::Diverged(j))?;
        let residual = self.residual(sys, &q);
        if residual > SYSTEM_TOL {
            return Err(StepFailure::Diverged(j));
        }
        Ok(q)
    }

    fn residual(&self, sys: &CuttingSystem, q: &CVec3) -> f64 {
        let rf = self.f.eval(q).norm();
        let rg = match &sys.cutter {
            Cutter::Lines(_) => 0.0,
            Cutter::Curve(g) => g.eval(q).norm(),
        };
        rf.max(rg)
    }

    /// Attempts one continuation step from `cur` at `t` to `t + h`.
    fn step(
        &self,
        cur: &[CVec3],
        prev: Option<(&[CVec3], f64)>,
        t: f64,
        h: f64,
    ) -> std::result::Result<(Vec<CVec3>, f64), StepFailure> {
        let sys = self.fam.sample(t + h);
        let lines = system_lines(self.f, &sys).map_err(|_| StepFailure::Diverged(0))?;
        let n = cur.len();
        let mut next: Vec<Option<CVec3>> = vec![None; n];
        let mut residual = 0.0f64;
        for j in 0..n {
            if let ConjClass::Paired { partner } = self.classes[j] {
                if partner < j {
                    continue;
                }
            }
            let pred = match prev {
                Some((pv, hp)) => cnormalize(&cadd(&cur[j], &cscale(&csub(&cur[j], &pv[j]), (h / hp).into()))),
                None => cur[j],
            };
            let q = self.correct(j, &sys, &lines, &pred)?;
            let mut q = align_phase(&q, &cur[j]);
            if self.classes[j] == ConjClass::Real {
                if realness_defect(&q) > self.cfg.snap_tol() {
                    return Err(StepFailure::LeftReal);
                }
                q = align_phase(&to_complex(real_part_projective(&q)), &cur[j]);
            }
            residual = residual.max(self.residual(&sys, &q));
            next[j] = Some(q);
            if let ConjClass::Paired { partner } = self.classes[j] {
                next[partner] = Some(conj3(&q));
            }
        }
        let next: Vec<CVec3> = next.into_iter().map(|q| q.expect("every point corrected")).collect();
        let half_sep = 0.5 * min_separation(cur);
        if (0..n).any(|j| chordal(&next[j], &cur[j]) > half_sep) {
            return Err(StepFailure::Jump);
        }
        if min_separation(&next) <= self.cfg.collision_tol {
            return Err(StepFailure::Collision);
        }
        Ok((next, residual))
    }

    /// Classifies a step that failed after all retries.
    fn diagnose(&self, failure: StepFailure, t: f64, real_count: usize) -> Error {
        let hit = match divisor_at(self.f, self.fam, t) {
            Ok(d) => {
                d.multiplicities.iter().any(|&m| m > 1)
                    || d.real_count() != real_count
                    || d.min_separation() < NEAR_DISCRIMINANT.max(self.cfg.collision_tol)
            }
            Err(_) => true,
        };
        if hit {
            return Error::DiscriminantHit { t };
        }
        match failure {
            StepFailure::Diverged(point) => Error::CorrectorDiverged { t, point },
            StepFailure::LeftReal => Error::DiscriminantHit { t },
            StepFailure::Jump | StepFailure::Collision => Error::MatchAmbiguity { t },
        }
    }
}

/// Tracks the divisor cut at `t = 0` around the loop and attaches angle lifts.
pub fn track_loop(f: &HomPoly3, fam: &LoopFamily, topo: &CurveTopology, cfg: &TrackerConfig) -> Result<DivisorPath> {
    let start = initial_divisor_with(f, fam, cfg.collision_tol)?;
    track_from(f, fam, topo, cfg, &start)
}

/// Tracks a given start divisor (which must be the one cut at `t = 0`).
pub fn track_from(
    f: &HomPoly3,
    fam: &LoopFamily,
    topo: &CurveTopology,
    cfg: &TrackerConfig,
    start: &Divisor,
) -> Result<DivisorPath> {
    let mut path = track_positions(f, fam, cfg, start)?;
    attach_lifts(&mut path, topo)?;
    Ok(path)
}

/// Continuation only; real points carry no component or lift yet.
pub fn track_positions(f: &HomPoly3, fam: &LoopFamily, cfg: &TrackerConfig, start: &Divisor) -> Result<DivisorPath> {
    if cfg.steps == 0 {
        return Err(Error::InvalidInput("tracker needs at least one step".into()));
    }
    if !start.is_simple(cfg.collision_tol) {
        return Err(Error::NonSimpleStart("start divisor is not simple".into()));
    }
    let stepper = Stepper { f, fam, cfg, classes: &start.classes, lines: &start.lines };
    let period = fam.period();
    let n = cfg.steps;
    let grid: Vec<f64> = (0..=n).map(|k| period * k as f64 / n as f64).collect();
    let nominal = period / n as f64;
    let real_count = start.real_count();

    let mut cur: Vec<CVec3> = start.points.iter().map(cnormalize).collect();
    let mut prev: Option<(Vec<CVec3>, f64)> = None;
    let mut history: Vec<Vec<CVec3>> = vec![cur.clone()];
    let mut max_residual = cur.iter().map(|p| f.eval(p).norm()).fold(0.0, f64::max);
    let mut min_sep = min_separation(&cur);

    for k in 0..n {
        let target = grid[k + 1];
        let mut t = grid[k];
        let mut h = nominal;
        let mut retries = 0;
        while t < target {
            let last = target - t <= h * (1.0 + 1e-9);
            let step = if last { target - t } else { h };
            match stepper.step(&cur, prev.as_ref().map(|(p, hp)| (p.as_slice(), *hp)), t, step) {
                Ok((next, residual)) => {
                    max_residual = max_residual.max(residual);
                    prev = Some((std::mem::replace(&mut cur, next), step));
                    t = if last { target } else { t + step };
                    if retries > 0 {
                        h = (2.0 * h).min(nominal);
                    }
                }
                Err(failure) => {
                    retries += 1;
                    if retries > cfg.max_retries {
                        return Err(stepper.diagnose(failure, t + step, real_count));
                    }
                    h = 0.5 * step;
                }
            }
        }
        min_sep = min_sep.min(min_separation(&cur));
        history.push(cur.clone());
    }

    let points = (0..start.points.len())
        .map(|j| TrackedPoint {
            class: start.classes[j],
            line: start.lines[j],
            component: None,
            positions: history.iter().map(|h| h[j]).collect(),
            lift: Vec::new(),
        })
        .collect();
    Ok(DivisorPath { grid, points, max_residual, min_separation: min_sep })
}

fn wrap_half(d: f64) -> f64 {
    d - d.round()
}

/// Locates every real trajectory on the topology and unwraps its arc parameter.
pub fn attach_lifts(path: &mut DivisorPath, topo: &CurveTopology) -> Result<()> {
    for p in path.points.iter_mut().filter(|p| p.is_real()) {
        let first = real_part_projective(&p.positions[0]);
        let loc = topo.nearest(&first).ok_or(Error::OffCurve { distance: f64::INFINITY })?;
        let comp = topo.component(loc.component);
        let tol = 10.0 * comp.step();
        if loc.distance > tol {
            return Err(Error::OffCurve { distance: loc.distance });
        }
        let mut lift = Vec::with_capacity(p.positions.len());
        lift.push(loc.phi);
        let (mut hint, mut phi) = (loc.segment, loc.phi);
        for q in &p.positions[1..] {
            let l = comp.locate_near(&real_part_projective(q), hint);
            if l.distance > tol {
                return Err(Error::OffCurve { distance: l.distance });
            }
            let last = *lift.last().expect("nonempty");
            lift.push(last + wrap_half(l.phi - phi));
            hint = l.segment;
            phi = l.phi;
        }
        p.component = Some(loc.component);
        p.lift = lift;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::ProjPointR;
    use crate::family::{line_pencil, line_product, sampled_line_loop};
    use crate::topology::{trace_real_locus, DEFAULT_ON_CURVE_TOL, DEFAULT_STEP};

    fn e_curve() -> HomPoly3 {
        HomPoly3::from_terms(3, &[((0, 2, 1), 1.0), ((3, 0, 0), -1.0), ((1, 0, 2), 1.0)]).unwrap()
    }

    fn has_point(d: &Divisor, x: f64, y: f64) -> bool {
        let target = to_complex([x, y, 1.0]);
        d.points.iter().any(|p| chordal(p, &target) < 1e-12)
    }

    #[test]
    fn initial_divisor_examples() {
        let f = e_curve();
        // the pencil line y = 0 has normal angle π/2
        let fam = crate::family::line_pencil_at(&ProjPointR::affine(-0.5, 0.0), std::f64::consts::FRAC_PI_2).unwrap();
        let d = initial_divisor(&f, &fam).unwrap();
        assert_eq!(d.degree(), 3);
        assert_eq!(d.real_count(), 3);
        assert!(has_point(&d, -1.0, 0.0) && has_point(&d, 0.0, 0.0) && has_point(&d, 1.0, 0.0));

        let prod = line_product(&ProjPointR::affine(-0.5, 0.0), 3).unwrap();
        let d9 = initial_divisor(&f, &prod).unwrap();
        assert_eq!(d9.degree(), 9);
        assert_eq!(d9.real_count(), 9);

        let x03 = sampled_line_loop(&[[1.0, 0.0, -0.3], [1.0, 0.0, -0.3]]).unwrap();
        let d = initial_divisor(&f, &x03).unwrap();
        assert_eq!(d.real_count(), 1);
        let real = d.points.iter().zip(&d.classes).find(|(_, c)| **c == ConjClass::Real).unwrap().0;
        assert!(chordal(real, &to_complex([0.0, 1.0, 0.0])) < 1e-12);
    }

    #[test]
    fn interior_pencil_swaps_oval_points() {
        let f = e_curve();
        let topo = trace_real_locus(&f, DEFAULT_STEP, DEFAULT_ON_CURVE_TOL).unwrap();
        let fam = line_pencil(&ProjPointR::affine(-0.5, 0.0)).unwrap();
        let path = track_loop(&f, &fam, &topo, &TrackerConfig::with_steps(500)).unwrap();
        assert!(path.max_residual <= 1e-9);
        assert!(transversality_margin(&path) > 0.01);
        assert!(closure_defect(&path) < 1e-8);
        for p in &path.points {
            let start = p.positions[0];
            let end = *p.positions.last().unwrap();
            let moved = chordal(&start, &end) > 1e-3;
            assert_eq!(moved, p.component == Some(0), "only oval points move to a new position");
        }
    }

    #[test]
    fn constant_family_keeps_margin() {
        let f = e_curve();
        let topo = trace_real_locus(&f, DEFAULT_STEP, DEFAULT_ON_CURVE_TOL).unwrap();
        let fam = sampled_line_loop(&[[1.0, 0.3, 0.2]; 4]).unwrap();
        let start = initial_divisor(&f, &fam).unwrap();
        let path = track_loop(&f, &fam, &topo, &TrackerConfig::with_steps(30)).unwrap();
        assert!((transversality_margin(&path) - start.min_separation()).abs() < 1e-12);
        assert_eq!(abel_jacobi_residual(&f, &path).unwrap(), 0.0);
    }
}
