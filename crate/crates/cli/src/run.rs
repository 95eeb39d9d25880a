use std::collections::BTreeMap;

use choreo_core::algebra::ProjPointR;
use choreo_core::choreography::{
    check_null_loop, check_theorems, check_tracing_monodromy, monodromy, real_tracing, realness, Basis, TheoremId,
    TheoremVerdict, MATCH_TOL, WINDING_TOL,
};
use choreo_core::topology::{
    classify_cubic_type, complex_orientation_cubic, oval_center, trace_real_locus, ComponentKind, CurveTopology,
    CurveType, DEFAULT_ON_CURVE_TOL, DEFAULT_STEP,
};
use choreo_core::tracking::{
    abel_jacobi_residual, closure_defect, oracle_defect, track_loop, transversality_margin, vieta_defect, DivisorPath,
    TrackerConfig,
};
use choreo_core::Error;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::config::ScenarioConfig;
use crate::CliError;

pub const EXIT_OK: i32 = 0;
pub const EXIT_DISCRIMINANT: i32 = 2;
pub const EXIT_TRACKER: i32 = 3;
pub const EXIT_CONFIG: i32 = 4;

/// Number of grid values checked against an independent full solve.
const ORACLE_SAMPLES: usize = 40;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Tolerances {
    pub steps: usize,
    pub corrector: f64,
    pub collision: f64,
    pub real_snap: f64,
    pub max_retries: usize,
    pub marching_step: f64,
    pub on_curve: f64,
    pub winding: f64,
    pub monodromy_match: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Diagnostics {
    pub max_residual: f64,
    pub closure_defect: f64,
    pub oracle_defect: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub vieta_defect: Option<f64>,
    pub raw_winding: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExpectationResult {
    pub c: Vec<i64>,
    pub matched: bool,
    pub advisory: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ErrorReport {
    pub kind: String,
    pub message: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TracingReport {
    pub version: String,
    pub name: String,
    pub config_hash: String,
    pub tolerances: Tolerances,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub curve_type: Option<CurveType>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub components: Option<Vec<ComponentKind>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub basis: Option<Basis>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub degree: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub real_points: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c: Option<BTreeMap<usize, i64>>,
    /// Pairs `[j, i]`: real point `j` ends where point `i` started.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub monodromy: Option<Vec<[usize; 2]>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cyclic_powers: Option<BTreeMap<usize, Option<usize>>>,
    pub verdicts: Vec<TheoremVerdict>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub expectation: Option<ExpectationResult>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub abel_jacobi_residual: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub transversality_margin: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub diagnostics: Option<Diagnostics>,
    pub error: Option<ErrorReport>,
    pub exit_code: i32,
}

impl TracingReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }

    pub fn tracing(&self) -> Option<Vec<i64>> {
        self.c.as_ref().map(|c| c.values().copied().collect())
    }

    pub fn verdict(&self, id: TheoremId) -> Option<&TheoremVerdict> {
        self.verdicts.iter().find(|v| v.theorem == id)
    }
}

/// Everything produced by one run.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub report: TracingReport,
    pub topology: Option<CurveTopology>,
    pub path: Option<DivisorPath>,
}

impl Outcome {
    pub fn exit_code(&self) -> i32 {
        self.report.exit_code
    }

    /// Whether `verify-all` counts this run as a pass.
    pub fn acceptable(&self, cfg: &ScenarioConfig) -> bool {
        let r = &self.report;
        match &r.error {
            None => {
                let violations = r.verdicts.iter().any(TheoremVerdict::is_violation);
                let expectation = r.expectation.as_ref().is_none_or(|e| e.matched || e.advisory);
                !violations && expectation
            }
            Some(_) => cfg.accept_discriminant && r.exit_code == EXIT_DISCRIMINANT,
        }
    }
}

pub fn exit_code_for(e: &Error) -> i32 {
    match e {
        Error::DiscriminantHit { .. } => EXIT_DISCRIMINANT,
        Error::InvalidInput(_)
        | Error::NotOnCurve { .. }
        | Error::ProportionalForms
        | Error::NotClosed { .. }
        | Error::TooCoarse { .. }
        | Error::NotInterior
        | Error::NotCubic => EXIT_CONFIG,
        _ => EXIT_TRACKER,
    }
}

fn error_report(e: &Error) -> ErrorReport {
    let debug = format!("{e:?}");
    let kind = debug.split(|c: char| !c.is_alphanumeric()).next().unwrap_or("Error").to_string();
    let t = match e {
        Error::DiscriminantHit { t } | Error::CorrectorDiverged { t, .. } | Error::MatchAmbiguity { t } => Some(*t),
        _ => None,
    };
    ErrorReport { kind, message: e.to_string(), t }
}

pub fn config_hash(cfg: &ScenarioConfig) -> String {
    let digest = Sha256::digest(serde_json::to_vec(cfg).expect("configs serialize"));
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

fn blank_report(name: String, config_hash: String, tolerances: Tolerances) -> TracingReport {
    TracingReport {
        version: env!("CARGO_PKG_VERSION").into(),
        name,
        config_hash,
        tolerances,
        curve_type: None,
        components: None,
        basis: None,
        degree: None,
        real_points: None,
        c: None,
        monodromy: None,
        cyclic_powers: None,
        verdicts: Vec::new(),
        expectation: None,
        abel_jacobi_residual: None,
        transversality_margin: None,
        diagnostics: None,
        error: None,
        exit_code: EXIT_OK,
    }
}

fn tolerances(t: &TrackerConfig, marching_step: f64) -> Tolerances {
    Tolerances {
        steps: t.steps,
        corrector: t.corrector_tol,
        collision: t.collision_tol,
        real_snap: t.snap_tol(),
        max_retries: t.max_retries,
        marching_step,
        on_curve: DEFAULT_ON_CURVE_TOL,
        winding: WINDING_TOL,
        monodromy_match: MATCH_TOL,
    }
}

/// Report for a config that could not be read or parsed.
pub fn config_failure(message: &str) -> TracingReport {
    let mut r = blank_report(String::new(), String::new(), tolerances(&TrackerConfig::default(), DEFAULT_STEP));
    r.error = Some(ErrorReport { kind: "ConfigError".into(), message: message.into(), t: None });
    r.exit_code = EXIT_CONFIG;
    r
}

fn orient(cfg: &ScenarioConfig, topo: CurveTopology, curve_type: CurveType) -> Result<CurveTopology, Error> {
    if curve_type != CurveType::TypeI || topo.degree != 3 || topo.components.len() != 2 {
        return Ok(topo);
    }
    let c = match cfg.interior_point {
        Some([x, y]) => ProjPointR::affine(x, y),
        None => {
            let oval = topo.ovals().next().ok_or(Error::NotInterior)?;
            oval_center(oval)?
        }
    };
    complex_orientation_cubic(&cfg.curve, &topo, &c)
}

/// Runs the full pipeline. Errors are folded into the report.
pub fn run_scenario(cfg: &ScenarioConfig) -> Outcome {
    let mut report = blank_report(cfg.name.clone(), config_hash(cfg), tolerances(&cfg.tracker, cfg.marching_step));
    let mut outcome_topo = None;
    let mut outcome_path = None;
    let result = (|| -> Result<(), CliError> {
        let f = &cfg.curve;
        let traced = trace_real_locus(f, cfg.marching_step, DEFAULT_ON_CURVE_TOL)?;
        let curve_type = cfg.curve_type_override.unwrap_or_else(|| classify_cubic_type(&traced));
        let topo = orient(cfg, traced, curve_type)?;
        report.curve_type = Some(curve_type);
        report.components = Some(topo.components.iter().map(|c| c.kind).collect());
        outcome_topo = Some(topo.clone());

        let family = cfg.resolved_family()?.build(f)?;
        let path = track_loop(f, &family, &topo, &cfg.tracker)?;
        outcome_path = Some(path.clone());
        report.degree = Some(path.degree());
        report.real_points = Some(path.points.iter().filter(|p| p.is_real()).count());
        report.transversality_margin = Some(transversality_margin(&path));
        if f.degree() == 3 {
            report.abel_jacobi_residual = Some(abel_jacobi_residual(f, &path)?);
        }
        let stride = (cfg.tracker.steps / ORACLE_SAMPLES).max(1);
        let tv = real_tracing(&path, &topo)?;
        report.diagnostics = Some(Diagnostics {
            max_residual: path.max_residual,
            closure_defect: closure_defect(&path),
            oracle_defect: oracle_defect(f, &family, &path, stride)?,
            vieta_defect: if family.is_linear() { Some(vieta_defect(f, &family, &path)?) } else { None },
            raw_winding: tv.raw.clone(),
        });
        report.basis = Some(tv.basis);
        report.c = Some(tv.c.iter().copied().enumerate().collect());

        let mp = monodromy(&path, &topo)?;
        report.monodromy = Some(mp.map.iter().map(|(a, b)| [*a, *b]).collect());
        report.cyclic_powers = Some(mp.cycles.iter().map(|c| (c.component, c.power)).collect());

        let mut all = check_theorems(&tv, realness(&path), curve_type, &path.occupied());
        all.push(check_tracing_monodromy(&tv, &mp));
        all.push(check_null_loop(&tv, &mp));
        let wanted = cfg.requested_checks();
        report.verdicts = all.into_iter().filter(|v| wanted.contains(&v.theorem)).collect();

        if let Some(exp) = &cfg.expected {
            let neg: Vec<i64> = exp.c.iter().map(|x| -x).collect();
            let matched = tv.c == exp.c || tv.c == neg;
            report.expectation = Some(ExpectationResult { c: exp.c.clone(), matched, advisory: exp.advisory });
        }
        Ok(())
    })();
    if let Err(e) = result {
        let (code, err) = match &e {
            CliError::Core(core) => (exit_code_for(core), error_report(core)),
            other => (EXIT_CONFIG, ErrorReport { kind: "ConfigError".into(), message: other.to_string(), t: None }),
        };
        report.exit_code = code;
        report.error = Some(err);
    }
    Outcome { report, topology: outcome_topo, path: outcome_path }
}
