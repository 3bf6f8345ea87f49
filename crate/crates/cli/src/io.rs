use std::fs;
use std::io::Write;
use std::path::Path;
use std::sync::Arc;

use looptool::exactfield::rational::format_rational;
use looptool::exactfield::{parse_rational, FieldElement, NumberField};
use looptool::fixtures::Unit;
use serde_json::Value;

use crate::error::{CliError, CliResult};

pub fn read_json(path: &Path) -> CliResult<Value> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })?;
    serde_json::from_str(&text).map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))
}

pub fn write_text(path: &Path, text: &str) -> CliResult<()> {
    fs::write(path, text).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })
}

/// Rows of `n,coord_0,...[,unit]`.
pub fn write_values(out: impl Write, values: &[(u64, FieldElement)], unit: Unit) -> CliResult<()> {
    let mut w = csv::Writer::from_writer(out);
    let degree = values.first().map_or(1, |(_, v)| v.field().degree());
    let mut header = vec!["n".to_string()];
    header.extend((0..degree).map(|i| format!("coord_{i}")));
    if unit != Unit::One {
        header.push("unit".into());
    }
    w.write_record(&header)?;
    for (n, v) in values {
        let mut row = vec![n.to_string()];
        row.extend(v.coords().iter().map(format_rational));
        if unit != Unit::One {
            row.push(unit.as_str().into());
        }
        w.write_record(&row)?;
    }
    w.flush().map_err(|source| CliError::Io {
        path: "<output>".into(),
        source,
    })?;
    Ok(())
}

/// Values in `field`, with the unit tag if the file has one.
pub fn read_values(
    path: &Path,
    field: &Arc<NumberField>,
) -> CliResult<(Vec<(u64, FieldElement)>, Unit)> {
    let mut r = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))?;
    let mut values = Vec::new();
    let mut unit: Option<Unit> = None;
    for (line, rec) in r.records().enumerate() {
        let rec = rec?;
        let Some(first) = rec.get(0) else { continue };
        let Ok(n) = first.parse::<u64>() else {
            if line == 0 {
                continue;
            }
            return Err(CliError::Parse(format!(
                "line {}: bad index {first:?}",
                line + 1
            )));
        };
        let d = field.degree();
        if rec.len() < 2 || rec.len() > d + 2 {
            return Err(CliError::Parse(format!(
                "line {}: expected at most {d} coordinates and a unit",
                line + 1
            )));
        }
        let ncoords = (rec.len() - 1).min(d);
        let coords = (1..=ncoords)
            .map(|i| {
                parse_rational(&rec[i])
                    .map_err(|e| CliError::Parse(format!("line {}: {e}", line + 1)))
            })
            .collect::<CliResult<Vec<_>>>()?;
        let u = match rec.get(ncoords + 1) {
            Some(s) => {
                Unit::parse(s).map_err(|e| CliError::Parse(format!("line {}: {e}", line + 1)))?
            }
            None => Unit::One,
        };
        if unit.is_some_and(|prev| prev != u) {
            return Err(CliError::Parse(format!("line {}: mixed units", line + 1)));
        }
        unit = Some(u);
        values.push((n, FieldElement::from_coords(field, coords)));
    }
    if values.is_empty() {
        return Err(CliError::Parse(format!("{}: no values", path.display())));
    }
    Ok((values, unit.unwrap_or(Unit::One)))
}

pub fn show(v: &FieldElement, unit: Unit) -> String {
    match unit {
        Unit::One => v.to_string(),
        u => format!("{v} (unit {})", u.as_str()),
    }
}
