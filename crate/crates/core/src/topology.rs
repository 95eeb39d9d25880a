//! Real locus of a plane curve as oriented polylines on the unit sphere.
//!
//! Every component of the real locus is stored through its lift to the unit
//! sphere. An oval lifts to a closed loop (its antipodal copy is not stored);
//! a one-sided component lifts to an arc running from a vertex to the
//! antipode of that vertex. All queries accept either sign of a point.

use serde::{Deserialize, Serialize};

use crate::algebra::point::{
    add3, chordal_real, cross3, dot3, line_frame, norm3, normalize3, scale3, sub3, to_complex,
};
use crate::algebra::{binary_roots, restrict_to_line, HomPoly3, ProjPointR};
use crate::{Error, Result};

pub const DEFAULT_STEP: f64 = 1e-3;
pub const DEFAULT_ON_CURVE_TOL: f64 = 1e-10;
pub const SCAN_CIRCLES: usize = 64;
const SCAN_SAMPLES: usize = 1024;
const MIN_GRADIENT: f64 = 1e-6;
const MAX_VERTICES: usize = 2_000_000;
/// Half-width of the segment window searched around a location hint.
const HINT_WINDOW: usize = 96;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ComponentKind {
    Oval,
    OneSided,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CurveType {
    TypeI,
    TypeII,
    Unknown,
}

/// One connected component of the real locus.
#[derive(Debug, Clone, Serialize)]
pub struct CurveComponent {
    pub id: usize,
    pub kind: ComponentKind,
    /// `+1` keeps the stored vertex order, `-1` reverses it.
    pub orientation: i8,
    vertices: Vec<[f64; 3]>,
    #[serde(skip)]
    arc: Vec<f64>,
    #[serde(skip)]
    step: f64,
}

/// Nearest point of a component polyline.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Location {
    pub component: usize,
    /// Arc parameter in `[0, 1)`, measured in the stored vertex order.
    pub phi: f64,
    pub segment: usize,
    pub distance: f64,
}

impl CurveComponent {
    fn new(kind: ComponentKind, vertices: Vec<[f64; 3]>, step: f64) -> Self {
        let mut c = CurveComponent { id: 0, kind, orientation: 1, vertices, arc: Vec::new(), step };
        let mut arc = Vec::with_capacity(c.vertices.len() + 1);
        arc.push(0.0);
        let mut acc = 0.0;
        for i in 0..c.vertices.len() {
            let (a, b) = c.segment(i);
            acc += norm3(&sub3(&b, &a));
            arc.push(acc);
        }
        c.arc = arc;
        c
    }

    pub fn vertices(&self) -> &[[f64; 3]] {
        &self.vertices
    }

    /// Cumulative chordal arc length; the last entry is the total length.
    pub fn arc_table(&self) -> &[f64] {
        &self.arc
    }

    pub fn total_length(&self) -> f64 {
        *self.arc.last().unwrap_or(&0.0)
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn segment_count(&self) -> usize {
        self.vertices.len()
    }

    /// Endpoints of segment `i`; the last segment closes the polyline.
    pub fn segment(&self, i: usize) -> ([f64; 3], [f64; 3]) {
        let n = self.vertices.len();
        let a = self.vertices[i];
        let b = if i + 1 < n {
            self.vertices[i + 1]
        } else {
            match self.kind {
                ComponentKind::Oval => self.vertices[0],
                ComponentKind::OneSided => scale3(&self.vertices[0], -1.0),
            }
        };
        (a, b)
    }

    /// Point of the polyline at arc parameter `phi` (any real; taken mod 1).
    pub fn point_at(&self, phi: f64) -> [f64; 3] {
        let target = phi.rem_euclid(1.0) * self.total_length();
        let i = match self.arc.binary_search_by(|a| a.total_cmp(&target)) {
            Ok(i) => i.min(self.vertices.len() - 1),
            Err(i) => i.saturating_sub(1).min(self.vertices.len() - 1),
        };
        let (a, b) = self.segment(i);
        let len = self.arc[i + 1] - self.arc[i];
        let s = if len > 0.0 { ((target - self.arc[i]) / len).clamp(0.0, 1.0) } else { 0.0 };
        normalize3(&add3(&a, &scale3(&sub3(&b, &a), s)))
    }

    fn project_segment(&self, i: usize, p: &[f64; 3]) -> (f64, f64) {
        let (a, b) = self.segment(i);
        let ab = sub3(&b, &a);
        let len2 = dot3(&ab, &ab);
        let best = |q: &[f64; 3]| {
            let s = if len2 > 0.0 { (dot3(&sub3(q, &a), &ab) / len2).clamp(0.0, 1.0) } else { 0.0 };
            let foot = add3(&a, &scale3(&ab, s));
            (norm3(&sub3(q, &foot)), s)
        };
        let plus = best(p);
        let minus = best(&scale3(p, -1.0));
        if plus.0 <= minus.0 {
            plus
        } else {
            minus
        }
    }

    fn location_on_segment(&self, i: usize, p: &[f64; 3]) -> Location {
        let (d, s) = self.project_segment(i, p);
        let len = self.arc[i + 1] - self.arc[i];
        let phi = ((self.arc[i] + s * len) / self.total_length()).rem_euclid(1.0);
        Location { component: self.id, phi, segment: i, distance: d }
    }

    /// Nearest point of this polyline to `p` (a unit vector of either sign).
    pub fn locate(&self, p: &[f64; 3]) -> Location {
        let p = normalize3(p);
        (0..self.segment_count())
            .map(|i| self.location_on_segment(i, &p))
            .min_by(|a, b| a.distance.total_cmp(&b.distance))
            .expect("component has vertices")
    }

    /// Like [`locate`](Self::locate) but searching a window around `hint`
    /// first; falls back to the full search when the window result is poor.
    pub fn locate_near(&self, p: &[f64; 3], hint: usize) -> Location {
        let n = self.segment_count();
        let p = normalize3(p);
        if n <= 2 * HINT_WINDOW + 1 {
            return self.locate(&p);
        }
        let best = (0..=2 * HINT_WINDOW)
            .map(|k| (hint + n + k - HINT_WINDOW) % n)
            .map(|i| self.location_on_segment(i, &p))
            .min_by(|a, b| a.distance.total_cmp(&b.distance))
            .expect("window is nonempty");
        let offset = (best.segment + n - (hint + n - HINT_WINDOW) % n) % n;
        let at_edge = offset == 0 || offset == 2 * HINT_WINDOW;
        if at_edge || best.distance > 2.0 * self.step {
            self.locate(&p)
        } else {
            best
        }
    }

    /// `phi` in the component's fixed orientation.
    pub fn oriented_phi(&self, phi: f64) -> f64 {
        if self.orientation >= 0 {
            phi
        } else {
            (1.0 - phi).rem_euclid(1.0)
        }
    }
}

/// All components of the real locus.
#[derive(Debug, Clone, Serialize)]
pub struct CurveTopology {
    pub degree: usize,
    pub components: Vec<CurveComponent>,
    pub curve_type: CurveType,
    pub complex_orientation_fixed: bool,
}

impl CurveTopology {
    pub fn component(&self, id: usize) -> &CurveComponent {
        &self.components[id]
    }

    pub fn ovals(&self) -> impl Iterator<Item = &CurveComponent> {
        self.components.iter().filter(|c| c.kind == ComponentKind::Oval)
    }

    /// Nearest component location; `None` when the topology is empty.
    pub fn nearest(&self, p: &[f64; 3]) -> Option<Location> {
        self.components.iter().map(|c| c.locate(p)).min_by(|a, b| a.distance.total_cmp(&b.distance))
    }
}

fn sphere_correct(f: &HomPoly3, q: [f64; 3], tol: f64) -> Result<[f64; 3]> {
    let mut q = normalize3(&q);
    for _ in 0..30 {
        let v = f.eval_real(&q);
        let g = f.gradient_real(&q);
        let gt = sub3(&g, &scale3(&q, dot3(&g, &q)));
        let n2 = dot3(&gt, &gt);
        if n2.sqrt() < MIN_GRADIENT {
            return Err(Error::SingularCurve { gradient: n2.sqrt() });
        }
        q = normalize3(&sub3(&q, &scale3(&gt, v / n2)));
        if v.abs() < 1e-15 {
            break;
        }
    }
    let residual = f.eval_real(&q).abs();
    if residual > tol {
        return Err(Error::SeedMiss(format!("corrector stalled with residual {residual:.3e}")));
    }
    Ok(q)
}

/// Deterministic, roughly uniform normals for the scanning great circles.
fn scan_normals(count: usize) -> Vec<[f64; 3]> {
    let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
    (0..count)
        .map(|i| {
            let z = 1.0 - (i as f64 + 0.5) / count as f64;
            let r = (1.0 - z * z).sqrt();
            let th = golden * i as f64 + 0.1;
            [r * th.cos(), r * th.sin(), z]
        })
        .collect()
}

fn seeds(f: &HomPoly3, tol: f64) -> Result<Vec<[f64; 3]>> {
    let mut out = Vec::new();
    for n in scan_normals(SCAN_CIRCLES) {
        let (e1, e2) = line_frame(&n);
        let at = |s: f64| add3(&scale3(&e1, s.cos()), &scale3(&e2, s.sin()));
        let h = 2.0 * std::f64::consts::PI / SCAN_SAMPLES as f64;
        let mut prev_s = 0.0;
        let mut prev_v = f.eval_real(&at(0.0));
        for k in 1..=SCAN_SAMPLES {
            let s = k as f64 * h;
            let v = f.eval_real(&at(s));
            if prev_v == 0.0 || prev_v.signum() != v.signum() {
                let (mut lo, mut hi, mut vlo) = (prev_s, s, prev_v);
                for _ in 0..60 {
                    let mid = 0.5 * (lo + hi);
                    let vm = f.eval_real(&at(mid));
                    if vm == 0.0 {
                        lo = mid;
                        hi = mid;
                        break;
                    }
                    if vm.signum() == vlo.signum() {
                        lo = mid;
                        vlo = vm;
                    } else {
                        hi = mid;
                    }
                }
                out.push(sphere_correct(f, at(0.5 * (lo + hi)), tol)?);
            }
            prev_s = s;
            prev_v = v;
        }
    }
    Ok(out)
}

fn march(f: &HomPoly3, seed: [f64; 3], step: f64, tol: f64) -> Result<(ComponentKind, Vec<[f64; 3]>)> {
    let mut verts = vec![seed];
    let mut p = seed;
    let anti = scale3(&seed, -1.0);
    loop {
        let g = f.gradient_real(&p);
        let t = cross3(&g, &p);
        let tn = norm3(&t);
        if tn < MIN_GRADIENT {
            return Err(Error::SingularCurve { gradient: tn });
        }
        let q = normalize3(&add3(&p, &scale3(&t, step / tn)));
        let q = sphere_correct(f, q, tol)?;
        if verts.len() >= 4 {
            if norm3(&sub3(&q, &seed)) < step {
                if norm3(&sub3(&q, &seed)) > 1e-9 {
                    verts.push(q);
                }
                return Ok((ComponentKind::Oval, verts));
            }
            if norm3(&sub3(&q, &anti)) < step {
                if norm3(&sub3(&q, &anti)) > 1e-9 {
                    verts.push(q);
                }
                return Ok((ComponentKind::OneSided, verts));
            }
        }
        verts.push(q);
        p = q;
        if verts.len() > MAX_VERTICES {
            return Err(Error::SeedMiss("marching did not close".into()));
        }
    }
}

/// Traces the real locus of `f` with marching step `step` (sphere chordal).
///
/// Vertices are ordered along the tangent field `∇F × p`, which is
/// compatible with the antipodal map, so every component carries a
/// well-defined stored orientation in the projective plane.
pub fn trace_real_locus(f: &HomPoly3, step: f64, tol: f64) -> Result<CurveTopology> {
    if !(step > 0.0 && step < 0.1) {
        return Err(Error::InvalidInput(format!("marching step {step} out of range")));
    }
    let mut comps: Vec<CurveComponent> = Vec::new();
    for seed in seeds(f, tol)? {
        let merged = comps.iter().any(|c| {
            c.vertices.iter().any(|v| norm3(&sub3(v, &seed)) < 3.0 * step || norm3(&add3(v, &seed)) < 3.0 * step)
        });
        if merged {
            continue;
        }
        let (kind, verts) = march(f, seed, step, tol)?;
        comps.push(CurveComponent::new(kind, verts, step));
    }

    let one_sided = comps.iter().filter(|c| c.kind == ComponentKind::OneSided).count();
    let expected = f.degree() % 2;
    if one_sided != expected {
        return Err(Error::SeedMiss(format!("{one_sided} one-sided components for a curve of degree {}", f.degree())));
    }
    // ovals first, keeping discovery order within each kind
    comps.sort_by_key(|c| match c.kind {
        ComponentKind::Oval => 0,
        ComponentKind::OneSided => 1,
    });
    for (i, c) in comps.iter_mut().enumerate() {
        c.id = i;
    }
    let mut topo = CurveTopology {
        degree: f.degree(),
        components: comps,
        curve_type: CurveType::Unknown,
        complex_orientation_fixed: false,
    };
    topo.curve_type = classify_cubic_type(&topo);
    Ok(topo)
}

/// Component and arc parameter of a real point.
pub fn locate_on_component(p: &ProjPointR, topo: &CurveTopology, tol: f64) -> Result<(usize, f64)> {
    let loc = topo.nearest(p.coords()).ok_or(Error::OffCurve { distance: f64::INFINITY })?;
    if loc.distance > tol {
        return Err(Error::OffCurve { distance: loc.distance });
    }
    Ok((loc.component, loc.phi))
}

/// Affine chart containing an oval: `(n, e1, e2)` with `n · v > 0` on every vertex.
fn oval_chart(comp: &CurveComponent) -> Result<([f64; 3], [f64; 3], [f64; 3])> {
    let sum = comp.vertices.iter().fold([0.0; 3], |acc, v| add3(&acc, v));
    let n = normalize3(&sum);
    if comp.vertices.iter().any(|v| dot3(&n, v) <= 1e-6) {
        return Err(Error::InvalidInput("oval does not fit in a single affine chart".into()));
    }
    let (e1, e2) = line_frame(&n);
    Ok((n, e1, e2))
}

fn chart_coords(n: &[f64; 3], e1: &[f64; 3], e2: &[f64; 3], p: &[f64; 3]) -> (f64, f64) {
    let w = dot3(n, p);
    (dot3(e1, p) / w, dot3(e2, p) / w)
}

/// Even-odd test of `p` against the disk bounded by an oval.
pub fn point_in_oval(p: &ProjPointR, comp: &CurveComponent) -> Result<bool> {
    if comp.kind != ComponentKind::Oval {
        return Err(Error::InvalidInput("interiority is only defined for ovals".into()));
    }
    let (n, e1, e2) = oval_chart(comp)?;
    let pc = p.coords();
    let w = dot3(&n, pc);
    if w.abs() < 1e-12 {
        return Ok(false);
    }
    let q = if w > 0.0 { *pc } else { scale3(pc, -1.0) };
    let (qx, qy) = chart_coords(&n, &e1, &e2, &q);
    let poly: Vec<(f64, f64)> = comp.vertices.iter().map(|v| chart_coords(&n, &e1, &e2, v)).collect();
    let tol = 1e-12 * (1.0 + qx.abs() + qy.abs());
    for attempt in 0..5 {
        let gamma = 0.5123 + 1.1 * attempt as f64;
        let (c, s) = (gamma.cos(), gamma.sin());
        // rotate so the ray is the positive x-axis
        let rot: Vec<(f64, f64)> = poly
            .iter()
            .map(|&(x, y)| {
                let (dx, dy) = (x - qx, y - qy);
                (c * dx + s * dy, -s * dx + c * dy)
            })
            .collect();
        if rot.iter().any(|&(x, y)| y.abs() < tol && x > -tol) {
            continue;
        }
        let m = rot.len();
        let mut crossings = 0usize;
        for i in 0..m {
            let (ax, ay) = rot[i];
            let (bx, by) = rot[(i + 1) % m];
            if (ay > 0.0) != (by > 0.0) {
                let x = ax + (bx - ax) * (-ay) / (by - ay);
                if x > 0.0 {
                    crossings += 1;
                }
            }
        }
        return Ok(crossings % 2 == 1);
    }
    Err(Error::Ambiguous)
}

/// Two components ⇒ type I (M-cubic), one ⇒ type II; other degrees are unknown.
pub fn classify_cubic_type(topo: &CurveTopology) -> CurveType {
    if topo.degree != 3 {
        return CurveType::Unknown;
    }
    match topo.components.len() {
        2 => CurveType::TypeI,
        1 => CurveType::TypeII,
        _ => CurveType::Unknown,
    }
}

/// A point inside the oval of an M-cubic: the chart centroid of its vertices.
pub fn oval_center(comp: &CurveComponent) -> Result<ProjPointR> {
    let (n, e1, e2) = oval_chart(comp)?;
    let m = comp.vertices.len() as f64;
    let (sx, sy) =
        comp.vertices.iter().map(|v| chart_coords(&n, &e1, &e2, v)).fold((0.0, 0.0), |(a, b), (x, y)| (a + x, b + y));
    let (cx, cy) = (sx / m, sy / m);
    Ok(ProjPointR::new(add3(&n, &add3(&scale3(&e1, cx), &scale3(&e2, cy)))))
}

fn cubic_parts(topo: &CurveTopology) -> Result<(&CurveComponent, &CurveComponent)> {
    if topo.degree != 3 || topo.curve_type != CurveType::TypeI {
        return Err(Error::InvalidInput("complex orientation needs a type I cubic".into()));
    }
    let oval = topo.components.iter().find(|c| c.kind == ComponentKind::Oval);
    let line = topo.components.iter().find(|c| c.kind == ComponentKind::OneSided);
    match (oval, line) {
        (Some(o), Some(l)) => Ok((o, l)),
        _ => Err(Error::InvalidInput("expected an oval and a one-sided component".into())),
    }
}

/// Degree of the map oval → one-sided component sending `q` to the third
/// real point of the line `cq`, in the stored vertex orders.
pub fn covering_degree(f: &HomPoly3, topo: &CurveTopology, c: &ProjPointR) -> Result<i64> {
    let (oval, pseudo) = cubic_parts(topo)?;
    if !point_in_oval(c, oval)? {
        return Err(Error::NotInterior);
    }
    let cc = c.coords();
    let mut hint = 0usize;
    let mut phis = Vec::with_capacity(oval.vertices.len());
    for q in &oval.vertices {
        let line = cross3(cc, q);
        let (u, v) = line_frame(&line);
        let b = restrict_to_line(f, &u, &v)?;
        let (uc, vc) = (to_complex(u), to_complex(v));
        let best = binary_roots(&b)
            .into_iter()
            .filter(|r| {
                r.point.alpha.im.abs() < 1e-7 && r.point.beta.im.abs() < 1e-7 || is_real(&r.point.on_line(&uc, &vc))
            })
            .map(|r| {
                let pt = r.point.on_line(&uc, &vc);
                let real = normalize3(&crate::algebra::point::real_part_projective(&pt));
                pseudo.locate_near(&real, hint)
            })
            .min_by(|a, b| a.distance.total_cmp(&b.distance))
            .ok_or_else(|| Error::SeedMiss("line through the center misses the one-sided component".into()))?;
        if best.distance > 10.0 * pseudo.step {
            return Err(Error::SeedMiss("line through the center misses the one-sided component".into()));
        }
        hint = best.segment;
        phis.push(best.phi);
    }
    let m = phis.len();
    let mut total = 0.0;
    for i in 0..m {
        let d = phis[(i + 1) % m] - phis[i];
        total += d - d.round();
    }
    let degree = total.round();
    if (total - degree).abs() > 0.05 || degree.abs() != 2.0 {
        return Err(Error::CoveringDegree(degree as i64));
    }
    Ok(degree as i64)
}

fn is_real(p: &crate::algebra::point::CVec3) -> bool {
    crate::algebra::point::realness_defect(p) < 1e-8
}

/// Fixes the complex orientations of an M-cubic: the one-sided component
/// keeps its stored order and the oval is oriented so that the projection
/// from the interior point `c` covers the one-sided component with degree +2.
pub fn complex_orientation_cubic(f: &HomPoly3, topo: &CurveTopology, c: &ProjPointR) -> Result<CurveTopology> {
    let degree = covering_degree(f, topo, c)?;
    let mut out = topo.clone();
    for comp in &mut out.components {
        comp.orientation = match comp.kind {
            ComponentKind::OneSided => 1,
            ComponentKind::Oval => (degree / 2) as i8,
        };
    }
    out.complex_orientation_fixed = true;
    Ok(out)
}

/// Number of times a real line crosses the traced locus (sign changes of
/// `line · v` along every lifted polyline).
pub fn line_crossings(topo: &CurveTopology, line: &[f64; 3]) -> usize {
    let mut count = 0;
    for comp in &topo.components {
        for i in 0..comp.segment_count() {
            let (a, b) = comp.segment(i);
            if (dot3(line, &a) > 0.0) != (dot3(line, &b) > 0.0) {
                count += 1;
            }
        }
    }
    count
}

/// Distance in RP² from `p` to the nearest vertex of `comp`.
pub fn distance_to_vertices(p: &[f64; 3], comp: &CurveComponent) -> f64 {
    comp.vertices.iter().map(|v| chordal_real(p, v)).fold(f64::INFINITY, f64::min)
}
