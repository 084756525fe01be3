//! The four commands. Each returns a [`Report`] or a [`CliError`] carrying
//! the process exit code.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use serde_json::{json, Value};

use semivar_core::{
    build_epsilon_net, run_suite, run_suite_for, solve_sup, verify_epsilon_net, FamilyConfig,
    Method, PartitionPair, Suite, SupResult, VariationBreakdown,
};

use crate::format::{self, FormatError};
use crate::report::{sha256_hex, Report, Status};

pub const EXIT_FAIL: u8 = 1;
pub const EXIT_INPUT: u8 = 2;
pub const EXIT_SIZE_GUARD: u8 = 3;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    pub fn input(message: impl Into<String>) -> Self {
        CliError {
            code: EXIT_INPUT,
            message: message.into(),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for CliError {}

impl From<semivar_core::Error> for CliError {
    fn from(e: semivar_core::Error) -> Self {
        CliError {
            code: if e.is_size_guard() {
                EXIT_SIZE_GUARD
            } else {
                EXIT_INPUT
            },
            message: e.to_string(),
        }
    }
}

impl From<FormatError> for CliError {
    fn from(e: FormatError) -> Self {
        match e {
            FormatError::Core(core) => core.into(),
            other => CliError::input(other.to_string()),
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;

/// Exit code for a successfully produced report.
pub fn exit_code(report: &Report) -> u8 {
    match report.status {
        Status::Fail => EXIT_FAIL,
        Status::Pass | Status::Computed => 0,
    }
}

struct Inputs(BTreeMap<String, String>);

impl Inputs {
    fn new() -> Self {
        Inputs(BTreeMap::new())
    }

    /// Reads `path` and records its digest under `role`.
    fn read(&mut self, role: &str, path: &Path) -> Result<Vec<u8>> {
        let bytes = format::read_bytes(path)?;
        self.0.insert(role.to_string(), sha256_hex(&bytes));
        Ok(bytes)
    }

    fn family_config(&mut self, path: Option<&Path>) -> Result<FamilyConfig> {
        let path = path.ok_or_else(|| CliError::input("--family-config is required"))?;
        Ok(format::load_family_config(
            &self.read("family_config", path)?,
        )?)
    }
}

pub fn parse_method(s: &str) -> Result<Method> {
    Ok(s.parse::<Method>()?)
}

fn pair_json(p: &PartitionPair) -> Value {
    json!({"pi": p.pi.indices(), "pi_star": p.pi_star.indices()})
}

fn breakdown_json(b: &VariationBreakdown) -> Value {
    json!({"row": b.row, "col": b.col, "mixed": b.mixed, "total": b.total})
}

fn sup_json(r: &SupResult) -> Value {
    json!({
        "argmax": pair_json(&r.argmax),
        "breakdown": breakdown_json(&r.breakdown),
        "method": r.method.as_str(),
        "optimal": r.optimal,
        "value": r.value,
    })
}

/// Supremum of the variation of one function.
pub fn variation(
    function: &Path,
    family_config: Option<&Path>,
    method: Method,
    seed: Option<u64>,
) -> Result<Report> {
    let mut inputs = Inputs::new();
    let f = format::load_function(&inputs.read("function", function)?)?;
    let cfg = inputs.family_config(family_config)?;
    let sup = solve_sup(&f, None, &cfg, method)?;
    let results = json!({
        "family": format::family_config_json(&cfg),
        "grid": [f.rows(), f.cols()],
        "instance": f.instance().to_string(),
        "seed": seed,
        "variation": sup_json(&sup),
    });
    Ok(Report::new(
        "variation",
        inputs.0,
        results,
        Status::Computed,
    ))
}

/// The metric `ρ` between two functions.
pub fn distance(
    a: &Path,
    b: &Path,
    family_config: Option<&Path>,
    method: Method,
    seed: Option<u64>,
) -> Result<Report> {
    let mut inputs = Inputs::new();
    let f = format::load_function(&inputs.read("function_a", a)?)?;
    let g = format::load_function(&inputs.read("function_b", b)?)?;
    let cfg = inputs.family_config(family_config)?;
    if !f.same_domain(&g) {
        return Err(semivar_core::Error::GridMismatch.into());
    }
    let base = f.get(0, 0).dist(g.get(0, 0))?;
    let joint = solve_sup(&f, Some(&g), &cfg, method)?;
    let results = json!({
        "base_distance": base,
        "family": format::family_config_json(&cfg),
        "joint_variation": sup_json(&joint),
        "rho": base + joint.value,
        "seed": seed,
    });
    Ok(Report::new("distance", inputs.0, results, Status::Computed))
}

/// Runs a property suite; status `fail` if any check is violated.
pub fn verify(
    suite: &str,
    seed: u64,
    count: usize,
    family_config: Option<&Path>,
) -> Result<Report> {
    let suite: Suite = suite.parse()?;
    let mut inputs = Inputs::new();
    let report = match family_config {
        Some(path) => {
            let cfg = inputs.family_config(Some(path))?;
            run_suite_for(suite, seed, count, &[cfg])?
        }
        None => run_suite(suite, seed, count)?,
    };
    let checks: Vec<Value> = report
        .checks
        .iter()
        .map(|c| {
            json!({
                "cases": c.cases,
                "name": c.name,
                "passed": c.passed(),
                "tolerance": c.tolerance,
                "violations": c.violations,
                "worst_margin": c.worst_margin,
            })
        })
        .collect();
    let worst = report
        .checks
        .iter()
        .map(|c| c.worst_margin)
        .fold(f64::INFINITY, f64::min);
    let results = json!({
        "checks": checks,
        "count": count,
        "seed": seed,
        "suite": suite.as_str(),
        "violations": report.checks.iter().map(|c| c.violations).sum::<usize>(),
        "worst_margin": worst,
    });
    let status = if report.passed() {
        Status::Pass
    } else {
        Status::Fail
    };
    Ok(Report::new("verify", inputs.0, results, status))
}

/// Builds and verifies an ε-net for a function family.
pub fn precompact(
    family: &Path,
    epsilon: f64,
    family_config: Option<&Path>,
    method: Method,
    seed: Option<u64>,
) -> Result<Report> {
    if method != Method::Auto {
        return Err(CliError::input("precompact supports only --method auto"));
    }
    let mut inputs = Inputs::new();
    let a = format::load_family(&inputs.read("family", family)?)?;
    let cfg = inputs.family_config(family_config)?;
    let net = build_epsilon_net(&a, epsilon, &cfg)?;
    let cert = &net.certificate;
    let verification = if cert.holds {
        Some(verify_epsilon_net(&a, &net.centers, epsilon, &cfg)?)
    } else {
        None
    };
    let verified = verification.as_ref().is_some_and(|v| v.ok);
    let results = json!({
        "center_indices": net.centers,
        "centers": net.labels,
        "certificate": {
            "defect": cert.defect,
            "epsilon": cert.epsilon,
            "holds": cert.holds,
            "witness": pair_json(&cert.witness),
        },
        "epsilon": epsilon,
        "family": format::family_config_json(&cfg),
        "members": a.len(),
        "note": (!cert.holds).then_some("no witness found"),
        "seed": seed,
        "verification": verification.map(|v| json!({
            "offender": v.offender,
            "ok": v.ok,
            "worst": v.worst,
        })),
    });
    let status = if verified { Status::Pass } else { Status::Fail };
    Ok(Report::new("precompact", inputs.0, results, status))
}
