use std::collections::BTreeMap;
use std::f64::consts::TAU;

use crate::algebra::point::{chordal, to_complex};
use crate::algebra::ConjClass;
use crate::topology::CurveTopology;
use crate::tracking::{transversality_margin, DivisorPath, TrackedPoint};
use crate::{Error, Result};

use super::MATCH_TOL;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SyntheticOptions {
    pub steps: usize,
    /// Amplitude (in arc parameter) of a periodic wobble added to every point.
    pub wiggle: f64,
}

impl Default for SyntheticOptions {
    fn default() -> Self {
        SyntheticOptions { steps: 400, wiggle: 0.0 }
    }
}

/// Purely real loop with prescribed windings, ignoring any algebraic constraint.
///
/// On a component with `m` points and winding `c = qm + e` (`0 ≤ e < m`),
/// every point slides forward to the start position of the point `e` places
/// ahead and then makes `q` more full turns.
pub fn synthetic_loop(
    topo: &CurveTopology,
    start: &[(usize, f64)],
    c: &[i64],
    opts: SyntheticOptions,
) -> Result<DivisorPath> {
    if c.len() != topo.components.len() {
        return Err(Error::InvalidInput(format!(
            "winding vector has {} entries for {} components",
            c.len(),
            topo.components.len()
        )));
    }
    if opts.steps == 0 {
        return Err(Error::InvalidInput("synthetic loop needs at least one step".into()));
    }
    let mut by_comp: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (j, &(k, _)) in start.iter().enumerate() {
        if k >= topo.components.len() {
            return Err(Error::InvalidInput(format!("no component {k}")));
        }
        by_comp.entry(k).or_default().push(j);
    }
    for (k, &ck) in c.iter().enumerate() {
        if ck != 0 && !by_comp.contains_key(&k) {
            return Err(Error::UnoccupiedNonzero { component: k });
        }
    }

    let phi0: Vec<f64> = start.iter().map(|&(_, phi)| phi.rem_euclid(1.0)).collect();
    let mut delta = vec![0.0; start.len()];
    for (&k, members) in &by_comp {
        let comp = topo.component(k);
        let o = f64::from(comp.orientation);
        let mut order = members.clone();
        order.sort_by(|&a, &b| comp.oriented_phi(phi0[a]).total_cmp(&comp.oriented_phi(phi0[b])));
        let m = order.len() as i64;
        let (q, e) = (c[k].div_euclid(m), c[k].rem_euclid(m) as usize);
        for (r, &j) in order.iter().enumerate() {
            let target = order[(r + e) % order.len()];
            let ahead = if e == 0 {
                0.0
            } else {
                (comp.oriented_phi(phi0[target]) - comp.oriented_phi(phi0[j])).rem_euclid(1.0)
            };
            delta[j] = o * (ahead + q as f64);
        }
    }

    let n = opts.steps;
    let grid: Vec<f64> = (0..=n).map(|k| k as f64 / n as f64).collect();
    let points: Vec<TrackedPoint> = start
        .iter()
        .enumerate()
        .map(|(j, &(k, _))| {
            let comp = topo.component(k);
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            let lift: Vec<f64> =
                grid.iter().map(|&s| phi0[j] + delta[j] * s + sign * opts.wiggle * (TAU * s).sin()).collect();
            let positions = lift.iter().map(|&phi| to_complex(comp.point_at(phi))).collect();
            TrackedPoint { class: ConjClass::Real, line: None, component: Some(k), positions, lift }
        })
        .collect();
    let mut path = DivisorPath { grid, points, max_residual: 0.0, min_separation: 1.0 };
    path.min_separation = transversality_margin(&path);
    Ok(path)
}

/// `p` followed by `q`; `q` must start where `p` ends.
pub fn loop_concat(p: &DivisorPath, q: &DivisorPath) -> Result<DivisorPath> {
    if p.points.len() != q.points.len() {
        return Err(Error::EndpointMismatch);
    }
    let end = p.steps();
    let mut used = vec![false; q.points.len()];
    let mut points = Vec::with_capacity(p.points.len());
    for a in &p.points {
        let tail = a.positions[end];
        let (d, i) = (0..q.points.len())
            .filter(|&i| !used[i])
            .map(|i| (chordal(&tail, &q.points[i].positions[0]), i))
            .min_by(|x, y| x.0.total_cmp(&y.0))
            .ok_or(Error::EndpointMismatch)?;
        let b = &q.points[i];
        if d > MATCH_TOL || a.is_real() != b.is_real() || a.component != b.component {
            return Err(Error::EndpointMismatch);
        }
        used[i] = true;
        let mut positions = a.positions.clone();
        positions.extend_from_slice(&b.positions[1..]);
        let lift = if a.is_real() {
            let shift = a.lift[end] - b.lift[0];
            let mut l = a.lift.clone();
            l.extend(b.lift[1..].iter().map(|x| x + shift));
            l
        } else {
            Vec::new()
        };
        points.push(TrackedPoint { positions, lift, ..a.clone() });
    }
    let offset = p.period() - q.grid[0];
    let mut grid = p.grid.clone();
    grid.extend(q.grid[1..].iter().map(|t| t + offset));
    Ok(DivisorPath {
        grid,
        points,
        max_residual: p.max_residual.max(q.max_residual),
        min_separation: p.min_separation.min(q.min_separation),
    })
}

/// The same loop traversed backwards.
pub fn loop_reverse(p: &DivisorPath) -> DivisorPath {
    let total = p.grid[0] + *p.grid.last().expect("grid is nonempty");
    let grid = p.grid.iter().rev().map(|t| total - t).collect();
    let points = p
        .points
        .iter()
        .map(|a| {
            let mut positions = a.positions.clone();
            positions.reverse();
            let mut lift: Vec<f64> = a.lift.iter().rev().copied().collect();
            if let Some(&first) = lift.first() {
                let shift = first.floor();
                lift.iter_mut().for_each(|x| *x -= shift);
            }
            TrackedPoint { positions, lift, ..a.clone() }
        })
        .collect();
    DivisorPath { grid, points, ..p.clone() }
}
