//! Operator spec documents: JSON trees with a `"kind"` discriminator.
//!
//! ```json
//! {"operator": {"kind": "sum", "children": [
//!     {"kind": "identity"},
//!     {"kind": "diagonal", "sequence": {"kind": "unit_modulus",
//!         "real_part": {"kind": "harmonic", "limit": 1, "coeff": 1, "offset": 1}}}]},
//!  "options": {"dim": 64}}
//! ```
//!
//! Numbers may be JSON numbers or decimal strings; complex scalars are
//! `{"re": .., "im": ..}`; vectors are dense arrays or
//! `{"entries": [[j, z], ...]}` with 1-based `j`.

use num_complex::Complex64;
use serde::{Serialize, Serializer};
use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::expr::{OperatorExpr, Tail};
use crate::linalg::CMatrix;
use crate::seq::{ComplexSeqSpec, SeqSpec};
use crate::subspace::{SubspaceKind, SubspaceSpec};
use crate::vector::Vector;

/// Options a document may carry; command-line flags take precedence.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct SpecOptions {
    pub dim: Option<usize>,
    pub angles: Option<usize>,
    pub trials: Option<usize>,
    pub seed: Option<u64>,
    pub tol: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpecDocument {
    pub operator: OperatorExpr,
    pub options: SpecOptions,
}

/// Parse a document: either `{"operator": .., "options": ..}` or a bare
/// expression.
pub fn parse_spec(text: &str) -> Result<SpecDocument> {
    let value: Value = serde_json::from_str(text).map_err(|e| Error::Parse {
        path: format!("line {}, column {}", e.line(), e.column()),
        message: e.to_string(),
    })?;
    parse_document(&value)
}

pub fn parse_document(value: &Value) -> Result<SpecDocument> {
    let obj = as_object(value, "$")?;
    if obj.contains_key("operator") {
        for key in obj.keys() {
            if key != "operator" && key != "options" {
                return Err(parse_err("$", format!("unexpected field {key:?}")));
            }
        }
        let operator = parse_expr(&obj["operator"], "$.operator")?;
        let options = match obj.get("options") {
            Some(o) => parse_options(o, "$.options")?,
            None => SpecOptions::default(),
        };
        Ok(SpecDocument { operator, options })
    } else {
        Ok(SpecDocument { operator: parse_expr(value, "$")?, options: SpecOptions::default() })
    }
}

/// Serialise a document; `parse_document` inverts it.
pub fn document_to_value(doc: &SpecDocument) -> Value {
    let mut out = Map::new();
    out.insert("operator".into(), expr_to_value(&doc.operator));
    let opts = serde_json::to_value(&doc.options).expect("options serialise");
    let opts: Map<String, Value> = opts.as_object().unwrap().iter().filter(|(_, v)| !v.is_null()).map(|(k, v)| (k.clone(), v.clone())).collect();
    if !opts.is_empty() {
        out.insert("options".into(), Value::Object(opts));
    }
    Value::Object(out)
}

fn parse_err(path: &str, message: impl Into<String>) -> Error {
    Error::Parse { path: path.to_string(), message: message.into() }
}

fn as_object<'a>(v: &'a Value, path: &str) -> Result<&'a Map<String, Value>> {
    v.as_object().ok_or_else(|| parse_err(path, "expected an object"))
}

fn field<'a>(obj: &'a Map<String, Value>, name: &str, path: &str) -> Result<&'a Value> {
    obj.get(name).ok_or_else(|| parse_err(path, format!("missing field {name:?}")))
}

fn kind_of<'a>(obj: &'a Map<String, Value>, path: &str) -> Result<&'a str> {
    field(obj, "kind", path)?.as_str().ok_or_else(|| parse_err(&format!("{path}.kind"), "expected a string"))
}

fn parse_real(v: &Value, path: &str) -> Result<f64> {
    let x = match v {
        Value::Number(n) => n.as_f64().ok_or_else(|| parse_err(path, "number out of range"))?,
        Value::String(s) => s.trim().parse::<f64>().map_err(|_| parse_err(path, format!("not a decimal number: {s:?}")))?,
        _ => return Err(parse_err(path, "expected a number or decimal string")),
    };
    if !x.is_finite() {
        return Err(Error::NonFinite(path.to_string()));
    }
    Ok(x)
}

fn parse_index(v: &Value, path: &str) -> Result<usize> {
    let bad = || parse_err(path, "expected a non-negative integer");
    match v {
        Value::Number(n) => n.as_u64().map(|k| k as usize).ok_or_else(bad),
        Value::String(s) => s.trim().parse::<usize>().map_err(|_| bad()),
        _ => Err(bad()),
    }
}

fn parse_complex(v: &Value, path: &str) -> Result<Complex64> {
    match v {
        Value::Object(obj) => {
            for key in obj.keys() {
                if key != "re" && key != "im" {
                    return Err(parse_err(path, format!("unexpected field {key:?} in complex scalar")));
                }
            }
            let re = obj.get("re").map(|x| parse_real(x, &format!("{path}.re"))).transpose()?.unwrap_or(0.0);
            let im = obj.get("im").map(|x| parse_real(x, &format!("{path}.im"))).transpose()?.unwrap_or(0.0);
            Ok(Complex64::new(re, im))
        }
        _ => Ok(Complex64::new(parse_real(v, path)?, 0.0)),
    }
}

fn parse_list<'a>(v: &'a Value, path: &str) -> Result<&'a Vec<Value>> {
    v.as_array().ok_or_else(|| parse_err(path, "expected an array"))
}

fn parse_reals(v: &Value, path: &str) -> Result<Vec<f64>> {
    parse_list(v, path)?.iter().enumerate().map(|(i, x)| parse_real(x, &format!("{path}[{i}]"))).collect()
}

fn parse_indices(v: &Value, path: &str) -> Result<Vec<usize>> {
    parse_list(v, path)?.iter().enumerate().map(|(i, x)| parse_index(x, &format!("{path}[{i}]"))).collect()
}

fn parse_vector(v: &Value, path: &str) -> Result<Vector> {
    match v {
        Value::Array(items) => {
            let coords = items.iter().enumerate().map(|(i, x)| parse_complex(x, &format!("{path}[{i}]"))).collect::<Result<Vec<_>>>()?;
            Ok(Vector::from_dense(&coords))
        }
        Value::Object(obj) => {
            let entries = parse_list(field(obj, "entries", path)?, &format!("{path}.entries"))?;
            let mut items = Vec::with_capacity(entries.len());
            for (i, e) in entries.iter().enumerate() {
                let p = format!("{path}.entries[{i}]");
                let pair = parse_list(e, &p)?;
                if pair.len() != 2 {
                    return Err(parse_err(&p, "expected [index, value]"));
                }
                let j = parse_index(&pair[0], &format!("{p}[0]"))?;
                if j == 0 {
                    return Err(parse_err(&p, "indices start at 1"));
                }
                items.push((j, parse_complex(&pair[1], &format!("{p}[1]"))?));
            }
            Vector::from_entries(items).map_err(|e| parse_err(path, e.to_string()))
        }
        _ => Err(parse_err(path, "expected a vector")),
    }
}

fn parse_vectors(v: &Value, path: &str) -> Result<Vec<Vector>> {
    parse_list(v, path)?.iter().enumerate().map(|(i, x)| parse_vector(x, &format!("{path}[{i}]"))).collect()
}

fn parse_options(v: &Value, path: &str) -> Result<SpecOptions> {
    let obj = as_object(v, path)?;
    let mut o = SpecOptions::default();
    for (key, value) in obj {
        let p = format!("{path}.{key}");
        match key.as_str() {
            "dim" => o.dim = Some(parse_index(value, &p)?),
            "angles" => o.angles = Some(parse_index(value, &p)?),
            "trials" => o.trials = Some(parse_index(value, &p)?),
            "seed" => o.seed = Some(parse_index(value, &p)? as u64),
            "tol" => o.tol = Some(parse_real(value, &p)?),
            _ => return Err(parse_err(&p, "unknown option")),
        }
    }
    Ok(o)
}

pub fn parse_seq(v: &Value, path: &str) -> Result<SeqSpec> {
    let obj = as_object(v, path)?;
    let kind = kind_of(obj, path)?;
    let real = |name: &str| parse_real(field(obj, name, path)?, &format!("{path}.{name}"));
    match kind {
        "explicit_then_zero" => SeqSpec::explicit_then_zero(parse_reals(field(obj, "values", path)?, &format!("{path}.values"))?),
        "explicit_then_constant" => {
            SeqSpec::explicit_then_constant(parse_reals(field(obj, "values", path)?, &format!("{path}.values"))?, real("tail")?)
        }
        "harmonic" => SeqSpec::harmonic(real("limit")?, real("coeff")?, real("offset")?),
        "geometric" => SeqSpec::geometric(real("limit")?, real("coeff")?, real("ratio")?),
        other => Err(Error::UnknownKind { path: format!("{path}.kind"), kind: other.to_string() }),
    }
}

fn parse_complex_seq(v: &Value, path: &str) -> Result<ComplexSeqSpec> {
    let obj = as_object(v, path)?;
    match kind_of(obj, path)? {
        "real" => Ok(ComplexSeqSpec::real(parse_seq(field(obj, "sequence", path)?, &format!("{path}.sequence"))?)),
        "unit_modulus" => {
            let real_part = parse_seq(field(obj, "real_part", path)?, &format!("{path}.real_part"))?;
            let conjugate = match obj.get("conjugate") {
                None => false,
                Some(Value::Bool(b)) => *b,
                Some(_) => return Err(parse_err(&format!("{path}.conjugate"), "expected a boolean")),
            };
            let s = ComplexSeqSpec::unit_modulus(real_part)?;
            Ok(if conjugate { s.conj() } else { s })
        }
        _ => Ok(ComplexSeqSpec::real(parse_seq(v, path)?)),
    }
}

pub fn parse_subspace(v: &Value, path: &str) -> Result<SubspaceSpec> {
    let obj = as_object(v, path)?;
    match kind_of(obj, path)? {
        "span" => SubspaceSpec::span(parse_vectors(field(obj, "vectors", path)?, &format!("{path}.vectors"))?),
        "complement" => SubspaceSpec::complement(parse_vectors(field(obj, "vectors", path)?, &format!("{path}.vectors"))?),
        "canonical_tail" => Ok(SubspaceSpec::canonical_tail(parse_index(field(obj, "k", path)?, &format!("{path}.k"))?)),
        "whole" => Ok(SubspaceSpec::whole()),
        "block_repetition" => {
            let prefix = match obj.get("prefix") {
                Some(p) => parse_indices(p, &format!("{path}.prefix"))?,
                None => vec![],
            };
            let period = parse_indices(field(obj, "period", path)?, &format!("{path}.period"))?;
            SubspaceSpec::block_repetition(prefix, period)
        }
        other => Err(Error::UnknownKind { path: format!("{path}.kind"), kind: other.to_string() }),
    }
}

fn parse_children(obj: &Map<String, Value>, path: &str) -> Result<Vec<OperatorExpr>> {
    let p = format!("{path}.children");
    let list = parse_list(field(obj, "children", path)?, &p)?;
    if list.is_empty() {
        return Err(parse_err(&p, "expected at least one child"));
    }
    list.iter().enumerate().map(|(i, c)| parse_expr(c, &format!("{p}[{i}]"))).collect()
}

fn parse_child(obj: &Map<String, Value>, path: &str) -> Result<OperatorExpr> {
    parse_expr(field(obj, "child", path)?, &format!("{path}.child"))
}

pub fn parse_expr(v: &Value, path: &str) -> Result<OperatorExpr> {
    let obj = as_object(v, path)?;
    let kind = kind_of(obj, path)?;
    Ok(match kind {
        "identity" => OperatorExpr::Identity,
        "zero" => OperatorExpr::zero(),
        "diagonal" => OperatorExpr::diagonal(parse_complex_seq(field(obj, "sequence", path)?, &format!("{path}.sequence"))?),
        "dense" => {
            let p = format!("{path}.matrix");
            let rows = parse_list(field(obj, "matrix", path)?, &p)?;
            let n = rows.len();
            let mut m = CMatrix::zeros(n, n);
            for (i, row) in rows.iter().enumerate() {
                let rp = format!("{p}[{i}]");
                let row = parse_list(row, &rp)?;
                if row.len() != n {
                    return Err(parse_err(&rp, format!("expected {n} entries, got {}", row.len())));
                }
                for (j, z) in row.iter().enumerate() {
                    m[(i, j)] = parse_complex(z, &format!("{rp}[{j}]"))?;
                }
            }
            let tail = match obj.get("tail").map(|t| t.as_str()) {
                None | Some(Some("zero")) => Tail::Zero,
                Some(Some("identity")) => Tail::Identity,
                _ => return Err(parse_err(&format!("{path}.tail"), "expected \"zero\" or \"identity\"")),
            };
            OperatorExpr::dense(m, tail)?
        }
        "finite_rank" => {
            let p = format!("{path}.terms");
            let mut terms = vec![];
            for (i, t) in parse_list(field(obj, "terms", path)?, &p)?.iter().enumerate() {
                let tp = format!("{p}[{i}]");
                let to = as_object(t, &tp)?;
                let sigma = parse_real(field(to, "sigma", &tp)?, &format!("{tp}.sigma"))?;
                let left = parse_vector(field(to, "left", &tp)?, &format!("{tp}.left"))?;
                let right = parse_vector(field(to, "right", &tp)?, &format!("{tp}.right"))?;
                terms.push((sigma, left, right));
            }
            OperatorExpr::finite_rank(terms)?
        }
        "projection" => OperatorExpr::projection(parse_subspace(field(obj, "subspace", path)?, &format!("{path}.subspace"))?),
        "shift" => {
            let k = match obj.get("offset") {
                Some(k) => parse_index(k, &format!("{path}.offset"))?,
                None => 1,
            };
            OperatorExpr::shift(k)?
        }
        "scale" => OperatorExpr::scale(parse_complex(field(obj, "alpha", path)?, &format!("{path}.alpha"))?, parse_child(obj, path)?)?,
        "sum" => OperatorExpr::Sum(parse_children(obj, path)?),
        "compose" => OperatorExpr::Compose(parse_children(obj, path)?),
        "adjoint" => OperatorExpr::Adjoint(Box::new(parse_child(obj, path)?)),
        "restrict" => OperatorExpr::Restrict(
            Box::new(parse_child(obj, path)?),
            parse_subspace(field(obj, "subspace", path)?, &format!("{path}.subspace"))?,
        ),
        "sqrt_gram" => OperatorExpr::SqrtGram(Box::new(parse_child(obj, path)?)),
        other => return Err(Error::UnknownKind { path: format!("{path}.kind"), kind: other.to_string() }),
    })
}

fn complex_value(z: Complex64) -> Value {
    if z.im == 0.0 {
        json!(z.re)
    } else {
        json!({"re": z.re, "im": z.im})
    }
}

fn vector_value(v: &Vector) -> Value {
    Value::Array(v.to_dense(v.support_max()).into_iter().map(complex_value).collect())
}

pub fn seq_to_value(s: &SeqSpec) -> Value {
    serde_json::to_value(s).expect("sequences serialise")
}

fn complex_seq_value(s: &ComplexSeqSpec) -> Value {
    match s {
        ComplexSeqSpec::Real { sequence } => seq_to_value(sequence),
        ComplexSeqSpec::UnitModulus { real_part, conjugate } => {
            json!({"kind": "unit_modulus", "real_part": seq_to_value(real_part), "conjugate": conjugate})
        }
    }
}

pub fn subspace_to_value(m: &SubspaceSpec) -> Value {
    match m.kind() {
        SubspaceKind::SpanFinite { vectors } => json!({"kind": "span", "vectors": vectors.iter().map(vector_value).collect::<Vec<_>>()}),
        SubspaceKind::ComplementFinite { vectors } => {
            json!({"kind": "complement", "vectors": vectors.iter().map(vector_value).collect::<Vec<_>>()})
        }
        SubspaceKind::CanonicalTail { k } => json!({"kind": "canonical_tail", "k": k}),
        SubspaceKind::BlockRepetition { prefix, period } => json!({"kind": "block_repetition", "prefix": prefix, "period": period}),
    }
}

pub fn expr_to_value(t: &OperatorExpr) -> Value {
    let children = |cs: &[OperatorExpr]| cs.iter().map(expr_to_value).collect::<Vec<_>>();
    match t {
        OperatorExpr::Identity => json!({"kind": "identity"}),
        OperatorExpr::Diagonal(s) => json!({"kind": "diagonal", "sequence": complex_seq_value(s)}),
        OperatorExpr::Dense { matrix, tail } => {
            let rows: Vec<Value> = (0..matrix.nrows())
                .map(|i| Value::Array((0..matrix.ncols()).map(|j| complex_value(matrix[(i, j)])).collect()))
                .collect();
            let tail = if *tail == Tail::Identity { "identity" } else { "zero" };
            json!({"kind": "dense", "matrix": rows, "tail": tail})
        }
        OperatorExpr::FiniteRank(terms) => {
            let terms: Vec<Value> = terms
                .iter()
                .map(|r| json!({"sigma": r.sigma, "left": vector_value(&r.left), "right": vector_value(&r.right)}))
                .collect();
            json!({"kind": "finite_rank", "terms": terms})
        }
        OperatorExpr::Projection(m) => json!({"kind": "projection", "subspace": subspace_to_value(m)}),
        OperatorExpr::Shift(k) => json!({"kind": "shift", "offset": k}),
        OperatorExpr::Scale(alpha, c) => json!({"kind": "scale", "alpha": complex_value(*alpha), "child": expr_to_value(c)}),
        OperatorExpr::Sum(cs) => json!({"kind": "sum", "children": children(cs)}),
        OperatorExpr::Compose(cs) => json!({"kind": "compose", "children": children(cs)}),
        OperatorExpr::Adjoint(c) => json!({"kind": "adjoint", "child": expr_to_value(c)}),
        OperatorExpr::Restrict(c, m) => json!({"kind": "restrict", "child": expr_to_value(c), "subspace": subspace_to_value(m)}),
        OperatorExpr::SqrtGram(c) => json!({"kind": "sqrt_gram", "child": expr_to_value(c)}),
    }
}

impl Serialize for OperatorExpr {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        expr_to_value(self).serialize(serializer)
    }
}
