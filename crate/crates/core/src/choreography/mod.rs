//! Real tracing classes, monodromy, and theorem verdicts for tracked loops.

mod synthetic;

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::algebra::point::chordal;
use crate::algebra::ConjClass;
use crate::topology::{CurveTopology, CurveType};
use crate::tracking::DivisorPath;
use crate::{Error, Result};

pub use synthetic::{loop_concat, loop_reverse, synthetic_loop, SyntheticOptions};

/// Largest distance of a winding sum from an integer.
pub const WINDING_TOL: f64 = 0.01;
/// End-to-start matching radius for monodromy.
pub const MATCH_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Basis {
    ComplexOrientation,
    Marching,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TracingVector {
    /// Winding of component `k` at index `k`.
    pub c: Vec<i64>,
    /// Unrounded winding sums.
    pub raw: Vec<f64>,
    pub basis: Basis,
}

impl TracingVector {
    pub fn is_zero(&self) -> bool {
        self.c.iter().all(|&c| c == 0)
    }
}

/// Sum over real points of the oriented change in arc parameter, per component.
pub fn real_tracing(path: &DivisorPath, topo: &CurveTopology) -> Result<TracingVector> {
    let mut raw = vec![0.0; topo.components.len()];
    for p in path.points.iter().filter(|p| p.is_real()) {
        let k = p.component.ok_or_else(|| Error::InvalidInput("real point without a component".into()))?;
        let (first, last) = match (p.lift.first(), p.lift.last()) {
            (Some(a), Some(b)) => (*a, *b),
            _ => return Err(Error::InvalidInput("real point without an angle lift".into())),
        };
        raw[k] += f64::from(topo.component(k).orientation) * (last - first);
    }
    let mut c = Vec::with_capacity(raw.len());
    for (k, &r) in raw.iter().enumerate() {
        if (r - r.round()).abs() > WINDING_TOL {
            return Err(Error::NonIntegerWinding { component: k, value: r });
        }
        c.push(r.round() as i64);
    }
    let basis = if topo.complex_orientation_fixed { Basis::ComplexOrientation } else { Basis::Marching };
    Ok(TracingVector { c, raw, basis })
}

/// Real points of one component in cyclic order and the monodromy power.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComponentCycle {
    pub component: usize,
    /// Path point indices sorted by oriented arc parameter at `t = 0`.
    pub order: Vec<usize>,
    /// `e` with `μ|A = ν^e`, if the restriction is a cyclic power.
    pub power: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MonodromyPermutation {
    /// Point `j` ends at the start position of point `map[j]`; real points only.
    pub map: BTreeMap<usize, usize>,
    pub cycles: Vec<ComponentCycle>,
}

impl MonodromyPermutation {
    pub fn is_identity(&self) -> bool {
        self.map.iter().all(|(a, b)| a == b)
    }

    pub fn power(&self, component: usize) -> Option<usize> {
        self.cycles.iter().find(|c| c.component == component).and_then(|c| c.power)
    }
}

fn oriented_start(path: &DivisorPath, topo: &CurveTopology, j: usize) -> f64 {
    let p = &path.points[j];
    let comp = topo.component(p.component.expect("real point has a component"));
    comp.oriented_phi(p.lift[0].rem_euclid(1.0))
}

/// End-to-start matching of real points and its cyclic decomposition.
pub fn monodromy(path: &DivisorPath, topo: &CurveTopology) -> Result<MonodromyPermutation> {
    let real: Vec<usize> = (0..path.points.len()).filter(|&j| path.points[j].is_real()).collect();
    let end = path.steps();
    let mut map = BTreeMap::new();
    let mut taken = BTreeSet::new();
    for &j in &real {
        let q = path.points[j].positions[end];
        let (d, i) = real
            .iter()
            .map(|&i| (chordal(&q, &path.points[i].positions[0]), i))
            .min_by(|a, b| a.0.total_cmp(&b.0))
            .ok_or(Error::MatchFailure)?;
        if d > MATCH_TOL || !taken.insert(i) {
            return Err(Error::MatchFailure);
        }
        if path.points[i].component != path.points[j].component {
            return Err(Error::MatchFailure);
        }
        map.insert(j, i);
    }

    let mut by_comp: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for &j in &real {
        let k = path.points[j].component.ok_or(Error::MatchFailure)?;
        by_comp.entry(k).or_default().push(j);
    }
    let cycles = by_comp
        .into_iter()
        .map(|(component, mut order)| {
            order.sort_by(|&a, &b| oriented_start(path, topo, a).total_cmp(&oriented_start(path, topo, b)));
            let m = order.len();
            let pos = |j: usize| order.iter().position(|&x| x == j).expect("member");
            let e = (pos(map[&order[0]]) + m) % m;
            let cyclic = (0..m).all(|r| map[&order[r]] == order[(r + e) % m]);
            ComponentCycle { component, order, power: cyclic.then_some(e) }
        })
        .collect();
    Ok(MonodromyPermutation { map, cycles })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum TheoremId {
    Th1a,
    Th1b,
    Th1c,
    Th2a,
    Th2b,
    #[serde(rename = "Th3-consistency")]
    Th3Consistency,
    #[serde(rename = "Sec3_3")]
    Sec33,
}

/// `satisfied` is false whenever `applicable` is false.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TheoremVerdict {
    pub theorem: TheoremId,
    pub applicable: bool,
    pub satisfied: bool,
    pub detail: String,
}

impl TheoremVerdict {
    fn not_applicable(theorem: TheoremId, why: &str) -> Self {
        TheoremVerdict { theorem, applicable: false, satisfied: false, detail: why.into() }
    }

    fn evaluated(theorem: TheoremId, satisfied: bool, detail: String) -> Self {
        TheoremVerdict { theorem, applicable: true, satisfied, detail }
    }

    /// Applicable but not satisfied.
    pub fn is_violation(&self) -> bool {
        self.applicable && !self.satisfied
    }
}

/// Checks `μ|A_i = ν^{c_i}` on every occupied component.
pub fn check_tracing_monodromy(tv: &TracingVector, mp: &MonodromyPermutation) -> TheoremVerdict {
    let mut bad = Vec::new();
    for cyc in &mp.cycles {
        let m = cyc.order.len() as i64;
        let c = tv.c.get(cyc.component).copied().unwrap_or(0);
        let expected = c.rem_euclid(m) as usize;
        match cyc.power {
            Some(e) if e == expected => {}
            Some(e) => bad.push(format!("component {}: power {e}, winding {c} mod {m}", cyc.component)),
            None => bad.push(format!("component {}: not a cyclic power", cyc.component)),
        }
    }
    let detail =
        if bad.is_empty() { "monodromy matches the winding on every component".into() } else { bad.join("; ") };
    TheoremVerdict::evaluated(TheoremId::Sec33, bad.is_empty(), detail)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Realness {
    PurelyReal,
    Mixed,
}

pub fn check_theorems(
    tv: &TracingVector,
    realness: Realness,
    curve_type: CurveType,
    occupied: &BTreeSet<usize>,
) -> Vec<TheoremVerdict> {
    let type_i = curve_type == CurveType::TypeI;
    let real = realness == Realness::PurelyReal;
    let unoccupied: Vec<usize> = (0..tv.c.len()).filter(|k| !occupied.contains(k)).collect();
    let c = &tv.c;
    let show = format!("c = {c:?}");
    let mut out = Vec::new();

    out.push(if type_i && real {
        let equal = c.windows(2).all(|w| w[0] == w[1]);
        TheoremVerdict::evaluated(TheoremId::Th1a, equal, show.clone())
    } else {
        TheoremVerdict::not_applicable(TheoremId::Th1a, "needs a type I curve and a purely real divisor")
    });

    out.push(if type_i && real && !unoccupied.is_empty() {
        TheoremVerdict::evaluated(TheoremId::Th1b, tv.is_zero(), format!("{show}, unoccupied {unoccupied:?}"))
    } else {
        TheoremVerdict::not_applicable(
            TheoremId::Th1b,
            "needs a type I curve, a purely real divisor and an empty component",
        )
    });

    out.push(if curve_type == CurveType::TypeII && real {
        TheoremVerdict::evaluated(TheoremId::Th1c, tv.is_zero(), show.clone())
    } else {
        TheoremVerdict::not_applicable(TheoremId::Th1c, "needs a type II curve and a purely real divisor")
    });

    out.push(if type_i {
        let parity = c.windows(2).all(|w| (w[0] - w[1]).rem_euclid(2) == 0);
        TheoremVerdict::evaluated(TheoremId::Th2a, parity, show.clone())
    } else {
        TheoremVerdict::not_applicable(TheoremId::Th2a, "needs a type I curve")
    });

    out.push(if type_i && !unoccupied.is_empty() {
        let even = c.iter().all(|x| x.rem_euclid(2) == 0);
        TheoremVerdict::evaluated(TheoremId::Th2b, even, format!("{show}, unoccupied {unoccupied:?}"))
    } else {
        TheoremVerdict::not_applicable(TheoremId::Th2b, "needs a type I curve and an empty component")
    });
    out
}

/// A loop that is null-homotopic in its parameter space must trace zero
/// with identity monodromy.
pub fn check_null_loop(tv: &TracingVector, mp: &MonodromyPermutation) -> TheoremVerdict {
    let ok = tv.is_zero() && mp.is_identity();
    TheoremVerdict::evaluated(
        TheoremId::Th3Consistency,
        ok,
        format!("c = {:?}, identity monodromy: {}", tv.c, mp.is_identity()),
    )
}

/// Whether every point of the path is real.
pub fn realness(path: &DivisorPath) -> Realness {
    if path.points.iter().all(|p| p.class == ConjClass::Real) {
        Realness::PurelyReal
    } else {
        Realness::Mixed
    }
}
