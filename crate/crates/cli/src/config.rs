use std::path::{Path, PathBuf};

use choreo_core::algebra::HomPoly3;
use choreo_core::choreography::TheoremId;
use choreo_core::family::FamilySpec;
use choreo_core::topology::{CurveType, DEFAULT_STEP};
use choreo_core::tracking::TrackerConfig;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::CliError;

/// Published JSON schema of [`ScenarioConfig`].
pub const SCENARIO_SCHEMA: &str = include_str!("../schema/scenario.schema.json");

fn default_step() -> f64 {
    DEFAULT_STEP
}

fn is_false(b: &bool) -> bool {
    !*b
}

/// Expected tracing vector, compared up to a global sign (complex
/// orientations are only defined up to simultaneous reversal).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Expectation {
    pub c: Vec<i64>,
    /// A mismatch is reported but does not fail `verify-all`.
    #[serde(default, skip_serializing_if = "is_false")]
    pub advisory: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Outputs {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub report: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trajectory: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub plot: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    #[serde(default)]
    pub name: String,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub description: String,
    pub curve: HomPoly3,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub curve_type_override: Option<CurveType>,
    /// Point inside the oval used to fix complex orientations of an M-cubic;
    /// defaults to the centroid of the traced oval.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub interior_point: Option<[f64; 2]>,
    #[serde(default = "default_step")]
    pub marching_step: f64,
    pub family: FamilySpec,
    #[serde(default)]
    pub tracker: TrackerConfig,
    /// Verdicts to report; empty means all standard theorem checks.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub checks: Vec<TheoremId>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expected: Option<Expectation>,
    /// A discriminant hit counts as an acceptable outcome.
    #[serde(default, skip_serializing_if = "is_false")]
    pub accept_discriminant: bool,
    /// Seed for randomly generated parts of the family.
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub outputs: Outputs,
}

impl ScenarioConfig {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("configs serialize")
    }

    pub fn requested_checks(&self) -> Vec<TheoremId> {
        if self.checks.is_empty() {
            vec![TheoremId::Th1a, TheoremId::Th1b, TheoremId::Th1c, TheoremId::Th2a, TheoremId::Th2b, TheoremId::Sec33]
        } else {
            self.checks.clone()
        }
    }

    /// Family spec with seeded random forms filled in where absent.
    pub fn resolved_family(&self) -> Result<FamilySpec, CliError> {
        let mut spec = self.family.clone();
        if let FamilySpec::PerturbationLoop { f0, g1, g2, .. } = &mut spec {
            let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
            let degree = f0.degree();
            let count = (degree + 1) * (degree + 2) / 2;
            let mut random_form = || {
                let coeffs = (0..count).map(|_| rng.gen_range(-1.0..1.0)).collect();
                HomPoly3::from_coeffs(degree, coeffs).map_err(CliError::Core)
            };
            let a = random_form()?;
            let b = random_form()?;
            g1.get_or_insert(a);
            g2.get_or_insert(b);
        }
        Ok(spec)
    }
}
