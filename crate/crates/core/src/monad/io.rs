//! JSON serialization of monads (`segre-monad-v1`).

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::{FormMatrix, Monad, MonadShape, ShapeKind};
use crate::chow::{CurveClass, DivisorClass};
use crate::error::{Error, Result};
use crate::field::{Field, FieldSpec, PrimeField, RationalField};
use crate::multipoly::{render_terms, Exponents, MultiDegree, MultiForm};

pub const FORMAT_TAG: &str = "segre-monad-v1";

#[derive(Serialize, Deserialize)]
struct Term {
    e: [u32; 6],
    c: String,
}

fn matrix_json<F: Field>(f: &F, m: &FormMatrix<F::Elem>) -> Value {
    let rows: Vec<Value> = (0..m.rows)
        .map(|r| {
            let cols: Vec<Value> = (0..m.cols)
                .map(|c| {
                    let terms: Vec<Term> = render_terms(f, m.get(r, c))
                        .into_iter()
                        .map(|(e, c)| Term { e, c })
                        .collect();
                    serde_json::to_value(terms).expect("plain data")
                })
                .collect();
            Value::Array(cols)
        })
        .collect();
    Value::Array(rows)
}

pub fn to_json<F: Field>(m: &Monad<F>) -> Value {
    json!({
        "format": FORMAT_TAG,
        "field": m.field.spec(),
        "shape": m.shape.kind,
        "c2": m.shape.c2.0,
        "seed": m.seed,
        "alpha": matrix_json(&m.field, &m.alpha),
        "beta": matrix_json(&m.field, &m.beta),
    })
}

/// Pretty JSON with sorted keys and a trailing newline.
pub fn serialize<F: Field>(m: &Monad<F>) -> String {
    let mut s = serde_json::to_string_pretty(&to_json(m)).expect("plain data");
    s.push('\n');
    s
}

/// A monad over whichever field its file declares.
#[derive(Clone, Debug, PartialEq)]
pub enum AnyMonad {
    Prime(Monad<PrimeField>),
    Rational(Monad<RationalField>),
}

fn byte_offset(text: &str, line: usize, column: usize) -> usize {
    if line == 0 {
        return 0;
    }
    let start: usize = text
        .split_inclusive('\n')
        .take(line - 1)
        .map(str::len)
        .sum();
    (start + column.saturating_sub(1)).min(text.len())
}

fn key_offset(text: &str, key: &str) -> usize {
    text.find(&format!("\"{key}\"")).unwrap_or(0)
}

struct Doc<'a> {
    text: &'a str,
    value: Value,
    spec: FieldSpec,
    shape: MonadShape,
    seed: Option<u64>,
}

fn parse_doc(text: &str) -> Result<Doc<'_>> {
    let value: Value = serde_json::from_str(text).map_err(|e| Error::Parse {
        offset: byte_offset(text, e.line(), e.column()),
        msg: e.to_string(),
    })?;
    let bad = |key: &str, msg: String| Error::Parse {
        offset: key_offset(text, key),
        msg,
    };
    let obj = value
        .as_object()
        .ok_or_else(|| bad("", "top level is not an object".into()))?;
    match obj.get("format").and_then(Value::as_str) {
        Some(FORMAT_TAG) => {}
        other => {
            return Err(bad(
                "format",
                format!("expected format {FORMAT_TAG:?}, found {other:?}"),
            ))
        }
    }
    let spec: FieldSpec = serde_json::from_value(obj.get("field").cloned().unwrap_or(Value::Null))
        .map_err(|e| bad("field", format!("bad field: {e}")))?;
    let kind: ShapeKind = serde_json::from_value(obj.get("shape").cloned().unwrap_or(Value::Null))
        .map_err(|e| bad("shape", format!("bad shape: {e}")))?;
    let c2: [i64; 3] = serde_json::from_value(obj.get("c2").cloned().unwrap_or(Value::Null))
        .map_err(|e| bad("c2", format!("bad c2: {e}")))?;
    let seed: Option<u64> = serde_json::from_value(obj.get("seed").cloned().unwrap_or(Value::Null))
        .map_err(|e| bad("seed", format!("bad seed: {e}")))?;
    let shape = MonadShape::new(kind, CurveClass(c2)).map_err(|e| bad("c2", e.to_string()))?;
    Ok(Doc {
        text,
        value,
        spec,
        shape,
        seed,
    })
}

fn parse_matrix<F: Field>(
    f: &F,
    doc: &Doc<'_>,
    key: &str,
    row_tw: &[DivisorClass],
    col_tw: &[DivisorClass],
) -> Result<FormMatrix<F::Elem>> {
    let bad = |msg: String| Error::Parse {
        offset: key_offset(doc.text, key),
        msg: format!("{key}: {msg}"),
    };
    let rows = doc
        .value
        .get(key)
        .and_then(Value::as_array)
        .ok_or_else(|| bad("missing or not a list".into()))?;
    if rows.len() != row_tw.len() {
        return Err(bad(format!(
            "expected {} rows, found {}",
            row_tw.len(),
            rows.len()
        )));
    }
    let mut out = FormMatrix::zeros(row_tw, col_tw);
    for (r, row) in rows.iter().enumerate() {
        let cols = row
            .as_array()
            .ok_or_else(|| bad(format!("row {r} is not a list")))?;
        if cols.len() != col_tw.len() {
            return Err(bad(format!(
                "row {r}: expected {} entries, found {}",
                col_tw.len(),
                cols.len()
            )));
        }
        for (c, entry) in cols.iter().enumerate() {
            let terms: Vec<Term> = serde_json::from_value(entry.clone())
                .map_err(|e| bad(format!("entry ({r},{c}): {e}")))?;
            let degree = MultiDegree((row_tw[r] - col_tw[c]).0);
            let parsed: Vec<(Exponents, F::Elem)> = terms
                .into_iter()
                .map(|t| f.parse(&t.c).map(|v| (t.e, v)))
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| bad(format!("entry ({r},{c}): {e}")))?;
            let form = MultiForm::from_terms(f, degree, parsed)
                .map_err(|e| bad(format!("entry ({r},{c}): {e}")))?;
            out.set(r, c, form);
        }
    }
    Ok(out)
}

fn build<F: Field>(f: F, doc: &Doc<'_>) -> Result<Monad<F>> {
    let [a, b, c] = doc.shape.terms().map(|t| t.twists());
    let alpha = parse_matrix(&f, doc, "alpha", &b, &a)?;
    let beta = parse_matrix(&f, doc, "beta", &c, &b)?;
    Monad::new(doc.shape, f, alpha, beta, doc.seed).map_err(|e| Error::Parse {
        offset: 0,
        msg: e.to_string(),
    })
}

/// Parse a monad over the caller's field; a file over another field is an error.
pub fn deserialize<F: Field>(text: &str, field: F) -> Result<Monad<F>> {
    let doc = parse_doc(text)?;
    if doc.spec != field.spec() {
        return Err(Error::PrimeMismatch {
            found: doc.spec.to_string(),
            requested: field.spec().to_string(),
        });
    }
    build(field, &doc)
}

pub fn deserialize_any(text: &str) -> Result<AnyMonad> {
    let doc = parse_doc(text)?;
    match doc.spec {
        FieldSpec::Prime { p } => {
            let f = PrimeField::new(p).map_err(|msg| Error::Parse {
                offset: key_offset(text, "field"),
                msg,
            })?;
            Ok(AnyMonad::Prime(build(f, &doc)?))
        }
        FieldSpec::Rational => Ok(AnyMonad::Rational(build(RationalField, &doc)?)),
        FieldSpec::Extension { .. } => Err(Error::Parse {
            offset: key_offset(text, "field"),
            msg: "monads over extension fields are not stored".into(),
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::monad::random_monad;

    fn sample() -> Monad<PrimeField> {
        let shape = MonadShape::new(ShapeKind::Kernel, CurveClass::new(1, 1, 1)).unwrap();
        random_monad(shape, PrimeField::default(), 4, 20).unwrap()
    }

    #[test]
    fn round_trip() {
        let m = sample();
        let text = serialize(&m);
        assert_eq!(deserialize(&text, PrimeField::default()).unwrap(), m);
        assert_eq!(deserialize_any(&text).unwrap(), AnyMonad::Prime(m.clone()));
        assert_eq!(serialize(&m), text);
    }

    #[test]
    fn rational_round_trip() {
        let shape = MonadShape::new(ShapeKind::Global, CurveClass::new(1, 1, 0)).unwrap();
        let m = random_monad(shape, RationalField, 2, 20).unwrap();
        let text = serialize(&m);
        assert_eq!(deserialize(&text, RationalField).unwrap(), m);
    }

    #[test]
    fn truncated_input_reports_offset() {
        let text = serialize(&sample());
        let cut = &text[..text.len() / 2];
        match deserialize(cut, PrimeField::default()) {
            Err(Error::Parse { offset, .. }) => assert!(offset > 0 && offset <= cut.len()),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn prime_mismatch() {
        let text = serialize(&sample());
        let f = PrimeField::new(101).unwrap();
        assert!(matches!(
            deserialize(&text, f),
            Err(Error::PrimeMismatch { .. })
        ));
        assert!(matches!(
            deserialize(&text, RationalField),
            Err(Error::PrimeMismatch { .. })
        ));
    }
}
