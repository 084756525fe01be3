//! JSON file formats: grid functions, family configurations and function
//! families.
//!
//! Function files are saved canonically: keys sorted, every number written
//! with 17 significant digits, so `load(save(f)) == f` exactly.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::Deserialize;
use serde_json::Value;

use semivar_core::{
    Distortion, Element, Family, FamilyConfig, FunctionFamily, Grid1D, GridFunction2D, Instance,
    Interval, WatermanWeights,
};

#[derive(Debug, thiserror::Error)]
pub enum FormatError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("{0}")]
    Schema(String),
    #[error(transparent)]
    Core(#[from] semivar_core::Error),
}

pub type Result<T> = std::result::Result<T, FormatError>;

fn schema<T>(msg: impl Into<String>) -> Result<T> {
    Err(FormatError::Schema(msg.into()))
}

/// Reads a file, returning its bytes.
pub fn read_bytes(path: &Path) -> Result<Vec<u8>> {
    fs::read(path).map_err(|source| FormatError::Io {
        path: path.display().to_string(),
        source,
    })
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SemigroupSpec {
    kind: String,
    dim: Option<usize>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct FunctionFile {
    grid_t: Vec<f64>,
    grid_s: Vec<f64>,
    semigroup: SemigroupSpec,
    values: Vec<Vec<Value>>,
}

fn parse_instance(spec: &SemigroupSpec) -> Result<Instance> {
    let inst = match (spec.kind.as_str(), spec.dim) {
        ("nonneg-real", None) => Instance::NonNegReal,
        ("interval", None) => Instance::Interval,
        ("real-vector", Some(k)) => Instance::RealVector(k),
        ("box", Some(k)) => Instance::Boxed(k),
        ("real-vector" | "box", None) => {
            return schema(format!("semigroup kind '{}' needs \"dim\"", spec.kind))
        }
        ("nonneg-real" | "interval", Some(_)) => {
            return schema(format!("semigroup kind '{}' takes no \"dim\"", spec.kind))
        }
        (other, _) => return schema(format!("unknown semigroup kind '{other}'")),
    };
    Ok(inst.checked()?)
}

fn number(v: &Value) -> Result<f64> {
    v.as_f64()
        .ok_or_else(|| FormatError::Schema(format!("expected a number, found {v}")))
}

fn numbers(v: &Value) -> Result<Vec<f64>> {
    match v {
        Value::Array(xs) => xs.iter().map(number).collect(),
        _ => schema(format!("expected an array of numbers, found {v}")),
    }
}

fn interval(v: &Value) -> Result<Interval> {
    match numbers(v)?.as_slice() {
        &[lo, hi] => Ok(Interval::new(lo, hi)?),
        _ => schema(format!("expected [lo, hi], found {v}")),
    }
}

/// Decodes one element of `instance`.
pub fn parse_element(instance: Instance, v: &Value) -> Result<Element> {
    let e = match instance {
        Instance::NonNegReal => Element::scalar(number(v)?)?,
        Instance::RealVector(_) => Element::vector(numbers(v)?)?,
        Instance::Interval => Element::Interval(interval(v)?),
        Instance::Boxed(_) => match v {
            Value::Array(xs) => Element::boxed(xs.iter().map(interval).collect::<Result<_>>()?)?,
            _ => return schema(format!("expected an array of [lo, hi] pairs, found {v}")),
        },
    };
    instance.check(&e)?;
    Ok(e)
}

fn function_from_file(file: FunctionFile) -> Result<GridFunction2D> {
    let instance = parse_instance(&file.semigroup)?;
    let grid_t = Grid1D::new(file.grid_t)?;
    let grid_s = Grid1D::new(file.grid_s)?;
    let rows = file
        .values
        .iter()
        .map(|row| row.iter().map(|v| parse_element(instance, v)).collect())
        .collect::<Result<Vec<Vec<Element>>>>()?;
    Ok(GridFunction2D::new(grid_t, grid_s, instance, rows)?)
}

/// Parses a function file.
pub fn load_function(bytes: &[u8]) -> Result<GridFunction2D> {
    function_from_file(serde_json::from_slice(bytes)?)
}

/// `%.17g`: 17 significant digits, fixed notation for exponents in
/// `[-5, 17)`, trailing zeros removed.
pub fn fmt_g17(x: f64) -> String {
    if x == 0.0 {
        return if x.is_sign_negative() { "-0" } else { "0" }.to_string();
    }
    let sci = format!("{x:.16e}");
    let (mantissa, exp) = sci.split_once('e').expect("scientific notation");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..17).contains(&exp) {
        let fixed = format!("{:.*}", (16 - exp) as usize, x);
        trim_zeros(&fixed).to_string()
    } else {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", trim_zeros(mantissa), exp.abs())
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn write_numbers(out: &mut String, xs: impl IntoIterator<Item = f64>) {
    out.push('[');
    for (k, x) in xs.into_iter().enumerate() {
        if k > 0 {
            out.push(',');
        }
        out.push_str(&fmt_g17(x));
    }
    out.push(']');
}

fn write_element(out: &mut String, e: &Element) {
    match e {
        Element::Scalar(x) => out.push_str(&fmt_g17(*x)),
        Element::Vector(xs) => write_numbers(out, xs.iter().copied()),
        Element::Interval(iv) => write_numbers(out, [iv.lo(), iv.hi()]),
        Element::Boxed(ivs) => {
            out.push('[');
            for (k, iv) in ivs.iter().enumerate() {
                if k > 0 {
                    out.push(',');
                }
                write_numbers(out, [iv.lo(), iv.hi()]);
            }
            out.push(']');
        }
    }
}

fn write_function(out: &mut String, f: &GridFunction2D) {
    out.push_str("{\"grid_s\":");
    write_numbers(out, f.grid_s().points().iter().copied());
    out.push_str(",\"grid_t\":");
    write_numbers(out, f.grid_t().points().iter().copied());
    out.push_str(",\"semigroup\":");
    match f.instance() {
        Instance::NonNegReal => out.push_str("{\"kind\":\"nonneg-real\"}"),
        Instance::Interval => out.push_str("{\"kind\":\"interval\"}"),
        Instance::RealVector(k) => {
            let _ = write!(out, "{{\"dim\":{k},\"kind\":\"real-vector\"}}");
        }
        Instance::Boxed(k) => {
            let _ = write!(out, "{{\"dim\":{k},\"kind\":\"box\"}}");
        }
    }
    out.push_str(",\"values\":[");
    for i in 0..f.rows() {
        if i > 0 {
            out.push(',');
        }
        out.push('[');
        for j in 0..f.cols() {
            if j > 0 {
                out.push(',');
            }
            write_element(out, f.get(i, j));
        }
        out.push(']');
    }
    out.push_str("]}");
}

/// Canonical function file (single line, trailing newline).
pub fn save_function(f: &GridFunction2D) -> String {
    let mut out = String::new();
    write_function(&mut out, f);
    out.push('\n');
    out
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct KappaSpec {
    kind: String,
    alpha: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct FamilyConfigFile {
    family: String,
    p: Option<f64>,
    lambda: Option<String>,
    kappa: Option<KappaSpec>,
    korenblum_dp_variant: Option<bool>,
}

/// Parses a family configuration file.
pub fn load_family_config(bytes: &[u8]) -> Result<FamilyConfig> {
    let c: FamilyConfigFile = serde_json::from_slice(bytes)?;
    let unused = |field: &str, present: bool| -> Result<()> {
        if present {
            schema(format!(
                "field \"{field}\" does not apply to family '{}'",
                c.family
            ))
        } else {
            Ok(())
        }
    };
    let need_p = || {
        c.p.ok_or_else(|| FormatError::Schema(format!("family '{}' needs \"p\"", c.family)))
    };
    let family = match c.family.as_str() {
        "wiener" | "riesz" => {
            unused("lambda", c.lambda.is_some())?;
            unused("kappa", c.kappa.is_some())?;
            unused("korenblum_dp_variant", c.korenblum_dp_variant.is_some())?;
            if c.family == "wiener" {
                Family::Wiener { p: need_p()? }
            } else {
                Family::Riesz { p: need_p()? }
            }
        }
        "waterman" => {
            unused("p", c.p.is_some())?;
            unused("kappa", c.kappa.is_some())?;
            unused("korenblum_dp_variant", c.korenblum_dp_variant.is_some())?;
            match c.lambda.as_deref() {
                None | Some("harmonic") => Family::Waterman {
                    lambda: WatermanWeights::Harmonic,
                },
                Some(other) => return schema(format!("unknown weight sequence '{other}'")),
            }
        }
        "korenblum" => {
            unused("lambda", c.lambda.is_some())?;
            let kappa = match &c.kappa {
                Some(k) if k.kind == "power" => Distortion::Power { alpha: k.alpha },
                Some(k) => return schema(format!("unknown distortion kind '{}'", k.kind)),
                None => return schema("family 'korenblum' needs \"kappa\""),
            };
            Family::Korenblum {
                kappa,
                p: need_p()?,
                dp_variant: c.korenblum_dp_variant.unwrap_or(false),
            }
        }
        other => return schema(format!("unknown family '{other}'")),
    };
    Ok(FamilyConfig::new(family)?)
}

/// Family configuration as JSON.
pub fn family_config_json(cfg: &FamilyConfig) -> Value {
    match *cfg.family() {
        Family::Wiener { p } => serde_json::json!({"family": "wiener", "p": p}),
        Family::Riesz { p } => serde_json::json!({"family": "riesz", "p": p}),
        Family::Waterman { .. } => serde_json::json!({"family": "waterman", "lambda": "harmonic"}),
        Family::Korenblum {
            kappa: Distortion::Power { alpha },
            p,
            dp_variant,
        } => serde_json::json!({
            "family": "korenblum",
            "p": p,
            "kappa": {"kind": "power", "alpha": alpha},
            "korenblum_dp_variant": dp_variant,
        }),
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct FamilyFile {
    members: Vec<FunctionFile>,
    labels: Vec<String>,
}

/// Parses a family file.
pub fn load_family(bytes: &[u8]) -> Result<FunctionFamily> {
    let file: FamilyFile = serde_json::from_slice(bytes)?;
    let members = file
        .members
        .into_iter()
        .map(function_from_file)
        .collect::<Result<Vec<_>>>()?;
    Ok(FunctionFamily::new(members, file.labels)?)
}

/// Canonical family file.
pub fn save_family(a: &FunctionFamily) -> String {
    let mut out = String::from("{\"labels\":");
    out.push_str(&serde_json::to_string(a.labels()).expect("strings serialize"));
    out.push_str(",\"members\":[");
    for (k, f) in a.members().iter().enumerate() {
        if k > 0 {
            out.push_str(",\n");
        }
        write_function(&mut out, f);
    }
    out.push_str("]}\n");
    out
}
