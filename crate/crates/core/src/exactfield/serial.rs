//! JSON forms of fields and field elements.
//!
//! A field is `{"minpoly": [c0, ..., cd], "root_index": k}`; an element is
//! either a rational string, an array of coordinate strings in an ambient
//! field, or a full object `{"minpoly": [...], "coords": [...], "root_index": k}`.

use std::sync::Arc;

use serde_json::{json, Value};

use super::field::{FieldElement, NumberField};
use super::rational::{format_rational, parse_rational, Rational};
use crate::error::{Error, Result};

pub fn parse_rational_value(v: &Value) -> Result<Rational> {
    match v {
        Value::String(s) => parse_rational(s),
        Value::Number(n) => match n.as_i64() {
            Some(i) => Ok(Rational::from_integer(i.into())),
            None => parse_rational(&n.to_string()),
        },
        _ => Err(Error::Parse(format!("expected a rational, got {v}"))),
    }
}

pub fn rational_to_value(q: &Rational) -> Value {
    Value::String(format_rational(q))
}

/// Parses a field spec, returning the field and the chosen root index.
pub fn parse_field(v: &Value) -> Result<(Arc<NumberField>, usize)> {
    let minpoly = v
        .get("minpoly")
        .and_then(Value::as_array)
        .ok_or_else(|| Error::Parse("field needs a \"minpoly\" array".into()))?
        .iter()
        .map(parse_rational_value)
        .collect::<Result<Vec<_>>>()?;
    let root_index = v.get("root_index").and_then(Value::as_u64).unwrap_or(0) as usize;
    let field = NumberField::new(minpoly)?;
    if root_index >= field.degree() {
        return Err(Error::RootIndex {
            index: root_index,
            degree: field.degree(),
        });
    }
    Ok((field, root_index))
}

pub fn field_to_value(field: &NumberField, root_index: usize) -> Value {
    json!({
        "minpoly": field.minpoly().iter().map(rational_to_value).collect::<Vec<_>>(),
        "root_index": root_index,
    })
}

pub fn parse_coords(v: &Value, field: &Arc<NumberField>) -> Result<FieldElement> {
    let coords = v
        .as_array()
        .ok_or_else(|| Error::Parse(format!("expected coordinates, got {v}")))?
        .iter()
        .map(parse_rational_value)
        .collect::<Result<Vec<_>>>()?;
    if coords.len() > field.degree() {
        return Err(Error::Parse(format!(
            "{} coordinates for a field of degree {}",
            coords.len(),
            field.degree()
        )));
    }
    Ok(FieldElement::from_coords(field, coords))
}

/// Parses an element in any of the accepted forms, in the ambient `field`.
pub fn parse_element(v: &Value, field: &Arc<NumberField>) -> Result<FieldElement> {
    match v {
        Value::String(_) | Value::Number(_) => Ok(field.from_rational(parse_rational_value(v)?)),
        Value::Array(_) => parse_coords(v, field),
        Value::Object(map) => {
            let coords = map
                .get("coords")
                .ok_or_else(|| Error::Parse("element needs \"coords\"".into()))?;
            if map.contains_key("minpoly") {
                let (own, _) = parse_field(v)?;
                if *own != **field && !own.is_rational() {
                    return Err(Error::Parse("element lives in a different field".into()));
                }
                let a = parse_coords(coords, &own)?;
                Ok(a.lift_to(field))
            } else {
                parse_coords(coords, field)
            }
        }
        _ => Err(Error::Parse(format!(
            "cannot read a field element from {v}"
        ))),
    }
}

/// Parses a self-describing element object.
pub fn parse_standalone(v: &Value) -> Result<(FieldElement, usize)> {
    let (field, root_index) = parse_field(v)?;
    let coords = v
        .get("coords")
        .ok_or_else(|| Error::Parse("element needs \"coords\"".into()))?;
    Ok((parse_coords(coords, &field)?, root_index))
}

pub fn element_to_value(a: &FieldElement, root_index: usize) -> Value {
    let mut v = field_to_value(a.field(), root_index);
    v["coords"] = coords_to_value(a);
    v
}

pub fn coords_to_value(a: &FieldElement) -> Value {
    Value::Array(a.coords().iter().map(rational_to_value).collect())
}
