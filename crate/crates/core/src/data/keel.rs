//! KEEL `.dat` reader and writer.

use std::fmt::Write as _;

use super::{Attribute, AttributeKind, Dataset};
use crate::{Error, Result};

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse { line, message: message.into() }
}

/// Splits `@keyword rest` into a lowercase keyword and the remainder.
fn directive(line: &str) -> Option<(String, &str)> {
    let body = line.strip_prefix('@')?;
    let end = body.find(|c: char| c.is_whitespace() || c == '{').unwrap_or(body.len());
    Some((body[..end].to_ascii_lowercase(), body[end..].trim()))
}

fn parse_attribute(rest: &str, line: usize) -> Result<Attribute> {
    let rest = rest.trim();
    let name_end = rest
        .find(|c: char| c.is_whitespace() || c == '{')
        .ok_or_else(|| parse_err(line, "attribute declaration has no type"))?;
    let name = rest[..name_end].trim_matches(|c| c == '\'' || c == '"').to_string();
    let ty = rest[name_end..].trim();
    if let Some(list) = ty.strip_prefix('{') {
        let list =
            list.strip_suffix('}').ok_or_else(|| parse_err(line, format!("unterminated category list for {name}")))?;
        let categories: Vec<String> = list.split(',').map(|c| c.trim().to_string()).filter(|c| !c.is_empty()).collect();
        return Attribute::nominal(name, categories).map_err(|e| parse_err(line, e.to_string()));
    }
    let kw_end = ty.find(|c: char| c.is_whitespace() || c == '[').unwrap_or(ty.len());
    let integer = match ty[..kw_end].to_ascii_lowercase().as_str() {
        "real" | "numeric" => false,
        "integer" => true,
        other => return Err(parse_err(line, format!("unknown attribute type '{other}'"))),
    };
    let range_text = ty[kw_end..].trim();
    let range = if range_text.is_empty() {
        None
    } else {
        let inner = range_text
            .strip_prefix('[')
            .and_then(|r| r.strip_suffix(']'))
            .ok_or_else(|| parse_err(line, format!("malformed range '{range_text}'")))?;
        let bounds: Vec<&str> = inner.split(',').map(str::trim).collect();
        if bounds.len() != 2 {
            return Err(parse_err(line, format!("malformed range '{range_text}'")));
        }
        let lo: f64 = bounds[0].parse().map_err(|_| parse_err(line, format!("bad bound '{}'", bounds[0])))?;
        let hi: f64 = bounds[1].parse().map_err(|_| parse_err(line, format!("bad bound '{}'", bounds[1])))?;
        Some((lo, hi))
    };
    let mut attr = Attribute::numeric(name, range).map_err(|e| parse_err(line, e.to_string()))?;
    attr.kind = AttributeKind::Numeric { integer, range };
    Ok(attr)
}

fn name_list(rest: &str) -> Vec<String> {
    rest.split(',').map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect()
}

/// Parses a KEEL-format dataset. The less frequent class becomes positive.
pub fn parse_keel(text: &str) -> Result<Dataset> {
    let mut relation: Option<String> = None;
    let mut attributes: Vec<Attribute> = Vec::new();
    let mut inputs: Option<Vec<String>> = None;
    let mut outputs: Option<Vec<String>> = None;
    let mut data_start: Option<usize> = None;

    let lines: Vec<&str> = text.lines().collect();
    for (idx, raw) in lines.iter().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('%') {
            continue;
        }
        let (kw, rest) = directive(line)
            .ok_or_else(|| parse_err(line_no, format!("expected a header directive, found '{line}'")))?;
        match kw.as_str() {
            "relation" => relation = Some(rest.to_string()),
            "attribute" => attributes.push(parse_attribute(rest, line_no)?),
            "inputs" | "input" => inputs = Some(name_list(rest)),
            "outputs" | "output" => outputs = Some(name_list(rest)),
            "data" => {
                data_start = Some(idx + 1);
                break;
            }
            other => return Err(parse_err(line_no, format!("unknown directive '@{other}'"))),
        }
    }

    let relation = relation.ok_or_else(|| parse_err(1, "missing @relation"))?;
    let data_start = data_start.ok_or_else(|| parse_err(lines.len().max(1), "missing @data section"))?;
    if attributes.is_empty() {
        return Err(parse_err(data_start, "no @attribute declarations"));
    }

    let find = |name: &str, line: usize| {
        attributes
            .iter()
            .position(|a| a.name == name)
            .ok_or_else(|| parse_err(line, format!("undeclared attribute '{name}'")))
    };
    let output = match &outputs {
        Some(names) if names.len() != 1 => {
            return Err(parse_err(data_start, format!("expected exactly one output, found {}", names.len())))
        }
        Some(names) => find(&names[0], data_start)?,
        None => attributes.len() - 1,
    };
    let input_idx: Vec<usize> = match &inputs {
        Some(names) => names.iter().map(|n| find(n, data_start)).collect::<Result<_>>()?,
        None => (0..attributes.len()).filter(|&i| i != output).collect(),
    };
    if input_idx.contains(&output) {
        return Err(parse_err(data_start, "output attribute is also listed as an input"));
    }
    let class_attr = &attributes[output];
    match &class_attr.kind {
        AttributeKind::Nominal { categories } if categories.len() == 2 => {}
        AttributeKind::Nominal { categories } => {
            return Err(parse_err(
                data_start,
                format!("output attribute must have two classes, found {}", categories.len()),
            ))
        }
        AttributeKind::Numeric { .. } => return Err(parse_err(data_start, "output attribute must be nominal")),
    }

    let mut rows = Vec::new();
    for (idx, raw) in lines.iter().enumerate().skip(data_start) {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('%') {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != attributes.len() {
            return Err(parse_err(line_no, format!("expected {} values, found {}", attributes.len(), fields.len())));
        }
        let mut values = Vec::with_capacity(input_idx.len());
        for &a in &input_idx {
            values.push(parse_value(&attributes[a], fields[a], line_no)?);
        }
        let label = fields[output];
        if class_attr.category_index(label).is_none() {
            return Err(parse_err(line_no, format!("unknown class '{label}'")));
        }
        rows.push((values, label.to_string()));
    }
    if rows.is_empty() {
        return Err(Error::Validation("the @data section is empty".into()));
    }

    let schema = input_idx.iter().map(|&i| attributes[i].clone()).collect();
    Dataset::from_labelled_rows(relation, schema, class_attr.name.clone(), rows)
}

fn parse_value(attr: &Attribute, field: &str, line: usize) -> Result<f64> {
    if field == "?" || field.eq_ignore_ascii_case("<null>") {
        return Err(parse_err(line, format!("missing value for {}", attr.name)));
    }
    match &attr.kind {
        AttributeKind::Numeric { .. } => {
            let v: f64 =
                field.parse().map_err(|_| parse_err(line, format!("'{field}' is not numeric ({})", attr.name)))?;
            if !v.is_finite() {
                return Err(parse_err(line, format!("non-finite value for {}", attr.name)));
            }
            Ok(v)
        }
        AttributeKind::Nominal { .. } => attr
            .category_index(field)
            .map(|i| i as f64)
            .ok_or_else(|| parse_err(line, format!("unknown value '{field}' for {}", attr.name))),
    }
}

/// Writes `ds` back out in KEEL format. The class attribute goes last.
pub fn to_keel(ds: &Dataset) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "@relation {}", ds.name);
    for attr in &ds.schema {
        match &attr.kind {
            AttributeKind::Numeric { integer, range } => {
                let ty = if *integer { "integer" } else { "real" };
                match range {
                    Some((lo, hi)) => {
                        let _ = writeln!(out, "@attribute {} {ty} [{lo}, {hi}]", attr.name);
                    }
                    None => {
                        let _ = writeln!(out, "@attribute {} {ty}", attr.name);
                    }
                }
            }
            AttributeKind::Nominal { categories } => {
                let _ = writeln!(out, "@attribute {} {{{}}}", attr.name, categories.join(", "));
            }
        }
    }
    let _ = writeln!(out, "@attribute {} {{{}, {}}}", ds.class_name, ds.positive_label, ds.negative_label);
    let inputs: Vec<&str> = ds.schema.iter().map(|a| a.name.as_str()).collect();
    let _ = writeln!(out, "@inputs {}", inputs.join(", "));
    let _ = writeln!(out, "@outputs {}", ds.class_name);
    out.push_str("@data\n");
    for inst in &ds.instances {
        for (v, attr) in inst.values.iter().zip(&ds.schema) {
            match &attr.kind {
                AttributeKind::Numeric { .. } => {
                    let _ = write!(out, "{v}, ");
                }
                AttributeKind::Nominal { categories } => {
                    let _ = write!(out, "{}, ", categories[*v as usize]);
                }
            }
        }
        let label = if inst.label.is_positive() { &ds.positive_label } else { &ds.negative_label };
        let _ = writeln!(out, "{label}");
    }
    out
}
