//! Input file schemas (matrix and diagonal-operator JSON), deterministic
//! report serialization, and CSV emission.
//!
//! Reports serialize with sorted keys and floats at 17 significant digits
//! in lowercase scientific notation, so identical inputs and flags produce
//! byte-identical output.

use crate::error::{Error, Result};
use crate::linalg::{C64, ComplexMatrix};
use crate::semigroup::StabilityReport;
use crate::spectral::{DiagonalOperator, Resolution};
use crate::stability::GpgVerdict;
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

#[derive(Clone, Debug, Deserialize, Serialize)]
pub struct MatrixFile {
    pub n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    /// Row-major entries as [re, im] pairs.
    pub data: Vec<Vec<[f64; 2]>>,
}

#[derive(Clone, Debug, Deserialize, Serialize)]
pub struct RuleMeta {
    pub name: String,
    #[serde(rename = "N")]
    pub n: usize,
}

#[derive(Clone, Debug, Deserialize, Serialize)]
pub struct DiagonalFile {
    pub eigenvalues: Vec<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rule: Option<RuleMeta>,
}

/// A parsed input operator together with its descriptor for reports.
#[derive(Clone, Debug)]
pub enum InputOperator {
    Matrix {
        matrix: ComplexMatrix,
        label: Option<String>,
    },
    Diagonal {
        operator: DiagonalOperator,
        rule: Option<RuleMeta>,
    },
}

impl InputOperator {
    pub fn to_matrix(&self) -> ComplexMatrix {
        match self {
            InputOperator::Matrix { matrix, .. } => matrix.clone(),
            InputOperator::Diagonal { operator, .. } => operator.to_matrix(),
        }
    }

    pub fn descriptor(&self) -> Value {
        match self {
            InputOperator::Matrix { matrix, label } => {
                let mut m = Map::new();
                m.insert("kind".into(), json!("matrix"));
                m.insert("n".into(), json!(matrix.dim()));
                if let Some(l) = label {
                    m.insert("label".into(), json!(l));
                }
                Value::Object(m)
            }
            InputOperator::Diagonal { operator, rule } => {
                let mut m = Map::new();
                m.insert("kind".into(), json!("diagonal"));
                m.insert("n".into(), json!(operator.eigenvalues.len()));
                m.insert("label".into(), json!(operator.label));
                if let Some(r) = rule {
                    m.insert("rule".into(), json!({"name": r.name, "N": r.n}));
                }
                Value::Object(m)
            }
        }
    }
}

/// Parses either a MatrixFile or a DiagonalFile, detected by its keys.
pub fn parse_input(text: &str) -> Result<InputOperator> {
    let value: Value = serde_json::from_str(text)
        .map_err(|e| Error::Input(format!("malformed JSON: {e}")))?;
    let obj = value
        .as_object()
        .ok_or_else(|| Error::Input("top level must be a JSON object".into()))?;
    if obj.contains_key("data") {
        let file: MatrixFile = serde_json::from_value(value.clone())
            .map_err(|e| Error::Input(format!("bad matrix file: {e}")))?;
        matrix_from_file(&file)
    } else if obj.contains_key("eigenvalues") {
        let file: DiagonalFile = serde_json::from_value(value.clone())
            .map_err(|e| Error::Input(format!("bad diagonal file: {e}")))?;
        diagonal_from_file(&file)
    } else {
        Err(Error::Input(
            "expected field `data` (matrix) or `eigenvalues` (diagonal operator)".into(),
        ))
    }
}

fn matrix_from_file(file: &MatrixFile) -> Result<InputOperator> {
    if file.data.len() != file.n {
        return Err(Error::Input(format!(
            "field `data`: expected {} rows, found {}",
            file.n,
            file.data.len()
        )));
    }
    let mut rows = Vec::with_capacity(file.n);
    for (i, row) in file.data.iter().enumerate() {
        if row.len() != file.n {
            return Err(Error::Input(format!(
                "field `data`: row {i} has {} entries, expected {}",
                row.len(),
                file.n
            )));
        }
        rows.push(row.iter().map(|&[re, im]| C64::new(re, im)).collect::<Vec<_>>());
    }
    let matrix = ComplexMatrix::from_rows(&rows)?;
    Ok(InputOperator::Matrix {
        matrix,
        label: file.label.clone(),
    })
}

fn diagonal_from_file(file: &DiagonalFile) -> Result<InputOperator> {
    if file.eigenvalues.is_empty() {
        return Err(Error::Input("field `eigenvalues`: must be non-empty".into()));
    }
    let eigs: Vec<C64> = file.eigenvalues.iter().map(|&[re, im]| C64::new(re, im)).collect();
    let label = file
        .rule
        .as_ref()
        .map(|r| format!("{} N={}", r.name, r.n))
        .unwrap_or_else(|| "diagonal".into());
    Ok(InputOperator::Diagonal {
        operator: DiagonalOperator::new(eigs, label)?,
        rule: file.rule.clone(),
    })
}

/// MatrixFile content for a matrix, for round-trippable output.
pub fn matrix_to_file(matrix: &ComplexMatrix, label: Option<&str>) -> MatrixFile {
    let n = matrix.dim();
    let data = (0..n)
        .map(|i| (0..n).map(|j| [matrix[(i, j)].re, matrix[(i, j)].im]).collect())
        .collect();
    MatrixFile {
        n,
        label: label.map(|s| s.to_string()),
        data,
    }
}

/// Float formatting contract: 17 significant digits, lowercase scientific.
pub fn format_float(x: f64) -> String {
    if x.is_finite() {
        format!("{:.16e}", x)
    } else if x.is_nan() {
        "nan".into()
    } else if x > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

/// JSON value for a float, degrading to a string for non-finite values.
pub fn num(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else {
        Value::String(format_float(x))
    }
}

fn complex_value(z: C64) -> Value {
    Value::Array(vec![json!(z.re), json!(z.im)])
}

/// Deterministic serialization: sorted object keys (serde_json's default
/// map is ordered), two-space indentation, floats via `format_float`.
pub fn to_json_string(value: &Value) -> String {
    let mut out = String::new();
    write_value(value, 0, &mut out);
    out.push('\n');
    out
}

fn write_value(value: &Value, indent: usize, out: &mut String) {
    match value {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                out.push_str(&i.to_string());
            } else if let Some(u) = n.as_u64() {
                out.push_str(&u.to_string());
            } else {
                out.push_str(&format_float(n.as_f64().unwrap_or(f64::NAN)));
            }
        }
        Value::String(s) => {
            out.push_str(&serde_json::to_string(s).expect("string serialization"))
        }
        Value::Array(items) => {
            if items.is_empty() {
                out.push_str("[]");
                return;
            }
            out.push('[');
            for (i, item) in items.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                out.push('\n');
                push_indent(indent + 1, out);
                write_value(item, indent + 1, out);
            }
            out.push('\n');
            push_indent(indent, out);
            out.push(']');
        }
        Value::Object(map) => {
            if map.is_empty() {
                out.push_str("{}");
                return;
            }
            out.push('{');
            for (i, (key, item)) in map.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                out.push('\n');
                push_indent(indent + 1, out);
                out.push_str(&serde_json::to_string(key).expect("key serialization"));
                out.push_str(": ");
                write_value(item, indent + 1, out);
            }
            out.push('\n');
            push_indent(indent, out);
            out.push('}');
        }
    }
}

fn push_indent(indent: usize, out: &mut String) {
    for _ in 0..indent {
        out.push_str("  ");
    }
}

/// Assembled analysis report matching the documented top-level schema.
pub fn build_report(
    input: &InputOperator,
    stability: &StabilityReport,
    gpg: Option<&GpgVerdict>,
    config_echo: Value,
) -> Value {
    let mut warnings: Vec<Value> = stability.warnings.iter().map(|w| json!(w)).collect();
    if let Some(v) = gpg {
        if v.indeterminate {
            warnings.push(json!(
                "spectral bound within the borderline band: classification is indeterminate"
            ));
        }
        if let Some(scan) = &v.axis {
            if !scan.converged {
                warnings.push(json!("axis scan budget exhausted before target enclosure width"));
            }
        }
    }

    let m0_value = match &stability.m0 {
        Some(est) => json!({
            "value": num(est.value),
            "method": match est.method {
                crate::spectral::M0Method::Exact => "exact",
                crate::spectral::M0Method::Bounded => "bounded",
            },
            "upper": num(est.upper),
        }),
        None => Value::Null,
    };

    let gpg_value = match gpg {
        Some(v) => {
            let axis = match &v.axis {
                Some(scan) => json!({
                    "lower": num(scan.sup_lower),
                    "upper": num(scan.sup_upper),
                    "truncation_radius": num(scan.truncation_radius),
                    "refinement_depth": scan.refinement_depth,
                    "points": scan.axis_points.len(),
                    "converged": scan.converged,
                }),
                None => Value::Null,
            };
            json!({
                "rhp_in_resolvent_set": v.rhp_in_resolvent_set,
                "classification": v.classification.as_str(),
                "indeterminate": v.indeterminate,
                "witness": v.witness.map(complex_value).unwrap_or(Value::Null),
                "axis_sup": axis,
            })
        }
        None => Value::Null,
    };

    let defective_info = match &stability.resolution {
        Resolution::Defective(d) => json!({
            "residual": num(d.residual),
            "vcond": d.vcond.map(num).unwrap_or(Value::Null),
        }),
        Resolution::ScalarType(_) => Value::Null,
    };

    json!({
        "input": input.descriptor(),
        "spectral_bound": num(stability.spectral_bound),
        "growth_bound_estimate": {
            "value": num(stability.growth_bound_estimate.value),
            "upper": stability.growth_bound_estimate.upper,
        },
        "sbegb_gap": num(stability.sbegb_gap),
        "scalar_type": stability.scalar_type,
        "m0": m0_value,
        "best_constant": {
            "grid_sup": num(stability.best_constant.grid_sup),
            "certified_upper": num(stability.best_constant.certified_upper),
            "diverging": stability.best_constant.diverging,
            "omega": num(stability.best_constant.omega),
            "t_max": num(stability.best_constant.t_max),
        },
        "gpg": gpg_value,
        "classification": stability.classification.as_str(),
        "defective": defective_info,
        "warnings": warnings,
        "version": env!("CARGO_PKG_VERSION"),
        "config": config_echo,
    })
}

/// CSV with header `t,norm,rate`, one row per growth sample.
pub fn growth_curve_csv(curve: &crate::semigroup::GrowthCurve) -> String {
    let mut out = String::from("t,norm,rate\n");
    for s in &curve.samples {
        out.push_str(&format!(
            "{},{},{}\n",
            format_float(s.t),
            format_float(s.norm),
            format_float(s.rate)
        ));
    }
    out
}

/// CSV with header `omega,norm` for the final axis grid.
pub fn axis_csv(scan: &crate::stability::ResolventScan) -> String {
    let mut out = String::from("omega,norm\n");
    for (w, n) in &scan.axis_points {
        out.push_str(&format!("{},{}\n", format_float(*w), format_float(*n)));
    }
    out
}
