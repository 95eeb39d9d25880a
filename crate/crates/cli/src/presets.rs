//! The shipped scenarios on the M-cubic `y²z = x³ − xz²` and the type II
//! cubic `y²z = x³ + xz²`.

use std::f64::consts::PI;

use choreo_core::algebra::point::cross3;
use choreo_core::algebra::{third_collinear_point, HomPoly3, ProjPointR};
use choreo_core::choreography::TheoremId;
use choreo_core::family::{pencil_line, FamilySpec};
use choreo_core::topology::DEFAULT_STEP;
use choreo_core::tracking::TrackerConfig;

use crate::config::{Expectation, Outputs, ScenarioConfig};
use crate::CliError;

pub const PRESET_NAMES: [&str; 7] =
    ["sec7-1", "sec7-1b", "sec7-2", "sec7-3", "thm2-oval", "thm3-null", "typeII-pencil"];

/// `y²z − x³ + xz²`.
pub fn m_cubic() -> HomPoly3 {
    HomPoly3::from_terms(3, &[((0, 2, 1), 1.0), ((3, 0, 0), -1.0), ((1, 0, 2), 1.0)]).expect("valid cubic")
}

/// `y²z − x³ − xz²`.
pub fn type_ii_cubic() -> HomPoly3 {
    HomPoly3::from_terms(3, &[((0, 2, 1), 1.0), ((3, 0, 0), -1.0), ((1, 0, 2), -1.0)]).expect("valid cubic")
}

/// Upper point of `y² = x³ − x` over `x`.
fn upper(x: f64) -> ProjPointR {
    ProjPointR::affine(x, (x * x * x - x).sqrt())
}

/// Third collinear point `C` of `A`, `B` and the normal angle of line `AB`.
fn base_point(a: f64, b: f64) -> Result<([f64; 2], f64), CliError> {
    let (pa, pb) = (upper(a), upper(b));
    let c = third_collinear_point(&m_cubic(), &pa, &pb)?;
    let (x, y) = c.to_affine().ok_or_else(|| CliError::Config("base point at infinity".into()))?;
    let line = cross3(pa.coords(), pb.coords());
    Ok(([x, y], line[1].atan2(line[0])))
}

fn base(name: &str, description: &str, curve: HomPoly3, family: FamilySpec) -> ScenarioConfig {
    ScenarioConfig {
        name: name.into(),
        description: description.into(),
        curve,
        curve_type_override: None,
        interior_point: None,
        marching_step: DEFAULT_STEP,
        family,
        tracker: TrackerConfig::default(),
        checks: Vec::new(),
        expected: None,
        accept_discriminant: false,
        seed: 0,
        outputs: Outputs::default(),
    }
}

fn expect(c: &[i64]) -> Option<Expectation> {
    Some(Expectation { c: c.to_vec(), advisory: false })
}

/// Fully specified config for a named scenario.
pub fn preset(name: &str) -> Result<ScenarioConfig, CliError> {
    preset_with_seed(name, 0)
}

pub fn preset_with_seed(name: &str, seed: u64) -> Result<ScenarioConfig, CliError> {
    let mut cfg = match name {
        "sec7-1" => {
            let (c, angle) = base_point(-0.04, 1.17)?;
            let mut cfg = base(
                name,
                "A on the oval, B on the one-sided component; the line AB rotates about its third point C, which is removed from the divisor",
                m_cubic(),
                FamilySpec::LinePencil { center: c, start_angle: angle, deflate_center: true },
            );
            cfg.expected = expect(&[1, 1]);
            cfg
        }
        "sec7-1b" => {
            let (c, angle) = base_point(-0.9, -0.2)?;
            let mut cfg = base(
                name,
                "A and B both on the oval; C lies on the one-sided component and the line swings about C inside the cone of lines meeting the oval",
                m_cubic(),
                FamilySpec::PencilSweep { center: c, start_angle: angle, amplitude: 0.1 },
            );
            cfg.expected = expect(&[0, 0]);
            cfg.accept_discriminant = true;
            cfg
        }
        "sec7-2" => {
            let mut cfg = base(
                name,
                "lines through the interior point (-0.5, 0) of the oval",
                m_cubic(),
                FamilySpec::LinePencil { center: [-0.5, 0.0], start_angle: 0.0, deflate_center: false },
            );
            cfg.expected = expect(&[1, 1]);
            cfg
        }
        "sec7-3" => {
            let mut cfg = base(
                name,
                "three lines through (-0.5, 0) at equal angles, rotated together by a third of a turn",
                m_cubic(),
                FamilySpec::LineProduct { center: [-0.5, 0.0], k: 3, start_angle: 0.0 },
            );
            cfg.expected = expect(&[1, 1]);
            cfg
        }
        "thm2-oval" => {
            let mut cfg = base(
                name,
                "tangent lines of a circle enclosing the oval; each meets the one-sided component once and the oval never",
                m_cubic(),
                FamilySpec::EllipseTangents { center: [-0.5, 0.0], semi_axes: [0.8, 0.8], samples: 720 },
            );
            cfg.expected = Some(Expectation { c: vec![0, 2], advisory: true });
            cfg
        }
        "thm3-null" => {
            let c = [-0.5, 0.0, 1.0];
            let lines: Vec<[f64; 3]> = (0..3).map(|j| pencil_line(&c, j as f64 * PI / 3.0)).collect();
            let f0 = HomPoly3::product_of_lines(&lines)?;
            let mut cfg = base(
                name,
                "small circle of cubics around three lines through (-0.5, 0), with seeded random directions",
                m_cubic(),
                FamilySpec::PerturbationLoop { f0, g1: None, g2: None, epsilon: 0.01 },
            );
            cfg.checks = vec![TheoremId::Th3Consistency, TheoremId::Sec33, TheoremId::Th1a, TheoremId::Th2a];
            cfg.expected = expect(&[0, 0]);
            cfg.accept_discriminant = true;
            cfg
        }
        "typeII-pencil" => {
            let mut cfg = base(
                name,
                "lines through (0.5, 0) on the type II cubic y^2 = x^3 + x",
                type_ii_cubic(),
                FamilySpec::LinePencil { center: [0.5, 0.0], start_angle: 0.0, deflate_center: false },
            );
            cfg.expected = expect(&[0]);
            cfg.accept_discriminant = true;
            cfg
        }
        other => return Err(CliError::UnknownPreset(other.into())),
    };
    cfg.seed = seed;
    Ok(cfg)
}
