//! JSON specs for sequences and matrices.
//!
//! Sequences: `{"kind":"closed_form","name":...,"params":{...}}`,
//! `{"kind":"table","values":[[...]],"default":0.0}`, or
//! `{"kind":"combinator","op":...,"children":[...]}`.
//!
//! Matrices: `{"kind":"builtin","name":"delta"}`,
//! `{"kind":"entries","entries":[[m,n,k,l,v],...]}`, or
//! `{"kind":"row_family","name":...,"params":{...}}`.

use serde_json::Value;

use crate::error::{Error, Result};
use crate::matrix::{Builtin, FourDimMatrix};
use crate::scalar::Scalar;
use crate::seq::{catalog, table_from_json, DoubleSequence};

fn scalar_from_json(v: &Value, what: &str) -> Result<Scalar> {
    if let Some(i) = v.as_i64() {
        Ok(Scalar::Int(i))
    } else if let Some(f) = v.as_f64() {
        Ok(Scalar::Float(f))
    } else {
        Err(Error::InvalidSpec(format!("{what} must be a number, got {v}")))
    }
}

fn kind_of<'v>(v: &'v Value, what: &str) -> Result<&'v str> {
    let obj = v
        .as_object()
        .ok_or_else(|| Error::InvalidSpec(format!("{what} spec must be a JSON object, got {v}")))?;
    obj.get("kind")
        .and_then(Value::as_str)
        .ok_or_else(|| Error::InvalidSpec(format!("{what} spec needs a string `kind` field")))
}

/// Builds a [`DoubleSequence`] from its JSON spec.
pub fn seq_from_json(v: &Value) -> Result<DoubleSequence> {
    match kind_of(v, "sequence")? {
        "closed_form" => {
            let name = v
                .get("name")
                .and_then(Value::as_str)
                .ok_or_else(|| Error::InvalidSpec("closed_form needs a string `name`".into()))?;
            let params = v.get("params").cloned().unwrap_or(Value::Null);
            catalog(name, &params)
        }
        "table" => {
            let values = v
                .get("values")
                .ok_or_else(|| Error::InvalidSpec("table spec needs `values`".into()))?;
            let default = v.get("default").and_then(Value::as_f64).unwrap_or(0.0);
            table_from_json(values, default)
        }
        "combinator" => {
            let op = v
                .get("op")
                .and_then(Value::as_str)
                .ok_or_else(|| Error::InvalidSpec("combinator needs a string `op`".into()))?;
            let children: Vec<DoubleSequence> = v
                .get("children")
                .and_then(Value::as_array)
                .ok_or_else(|| Error::InvalidSpec("combinator needs a `children` array".into()))?
                .iter()
                .map(seq_from_json)
                .collect::<Result<_>>()?;
            let arity = |n: usize| -> Result<()> {
                if children.len() == n {
                    Ok(())
                } else {
                    Err(Error::InvalidSpec(format!(
                        "combinator `{op}` takes {n} child(ren), got {}",
                        children.len()
                    )))
                }
            };
            match op {
                "add" => {
                    arity(2)?;
                    Ok(children[0].add(&children[1]))
                }
                "sub" => {
                    arity(2)?;
                    Ok(children[0].sub(&children[1]))
                }
                "mul" => {
                    arity(2)?;
                    Ok(children[0].mul(&children[1]))
                }
                "scale" => {
                    arity(1)?;
                    let c = scalar_from_json(
                        v.get("c").unwrap_or(&Value::Null),
                        "combinator `scale` field `c`",
                    )?;
                    Ok(children[0].scale(c))
                }
                "abs" => {
                    arity(1)?;
                    Ok(children[0].abs())
                }
                "pow_abs" => {
                    arity(1)?;
                    let q = v.get("q").and_then(Value::as_f64).ok_or_else(|| {
                        Error::InvalidSpec("combinator `pow_abs` needs numeric `q`".into())
                    })?;
                    children[0].pow_abs(q)
                }
                "delta" => {
                    arity(1)?;
                    Ok(children[0].delta())
                }
                "prefix_sum" => {
                    arity(1)?;
                    Ok(children[0].prefix_sum())
                }
                other => Err(Error::InvalidSpec(format!("unknown combinator op `{other}`"))),
            }
        }
        other => Err(Error::InvalidSpec(format!("unknown sequence kind `{other}`"))),
    }
}

/// Builds a [`FourDimMatrix`] from its JSON spec.
pub fn mat_from_json(v: &Value) -> Result<FourDimMatrix> {
    match kind_of(v, "matrix")? {
        "builtin" => {
            let name = v
                .get("name")
                .and_then(Value::as_str)
                .ok_or_else(|| Error::InvalidSpec("builtin matrix needs a string `name`".into()))?;
            let which = match name {
                "delta" => Builtin::Delta,
                "sigma" => Builtin::Sigma,
                "identity" => Builtin::Identity,
                other => return Err(Error::UnknownCatalogEntry(format!("builtin matrix `{other}`"))),
            };
            Ok(FourDimMatrix::builtin(which))
        }
        "entries" => {
            let rows = v
                .get("entries")
                .and_then(Value::as_array)
                .ok_or_else(|| Error::InvalidSpec("entries spec needs an `entries` array".into()))?;
            let mut list = Vec::with_capacity(rows.len());
            for row in rows {
                let row = row.as_array().filter(|r| r.len() == 5).ok_or_else(|| {
                    Error::InvalidSpec("each entry must be a 5-tuple [m,n,k,l,value]".into())
                })?;
                let idx = |i: usize, label: &str| -> Result<usize> {
                    row[i].as_u64().map(|v| v as usize).ok_or_else(|| {
                        Error::InvalidSpec(format!("entry index `{label}` must be a nonnegative integer, got {}", row[i]))
                    })
                };
                list.push((
                    idx(0, "m")?,
                    idx(1, "n")?,
                    idx(2, "k")?,
                    idx(3, "l")?,
                    scalar_from_json(&row[4], "entry value")?,
                ));
            }
            FourDimMatrix::from_entries(list)
        }
        "row_family" => {
            let name = v
                .get("name")
                .and_then(Value::as_str)
                .ok_or_else(|| Error::InvalidSpec("row_family needs a string `name`".into()))?;
            let params = v.get("params").cloned().unwrap_or(Value::Null);
            FourDimMatrix::row_family(name, &params)
        }
        other => Err(Error::InvalidSpec(format!("unknown matrix kind `{other}`"))),
    }
}

fn parse(text: &str, what: &str) -> Result<Value> {
    serde_json::from_str(text)
        .map_err(|e| Error::InvalidSpec(format!("malformed {what} JSON: {e}")))
}

/// Parses and builds a sequence from JSON text.
pub fn seq_from_str(text: &str) -> Result<DoubleSequence> {
    seq_from_json(&parse(text, "sequence")?)
}

/// Parses and builds a matrix from JSON text.
pub fn mat_from_str(text: &str) -> Result<FourDimMatrix> {
    mat_from_json(&parse(text, "matrix")?)
}
