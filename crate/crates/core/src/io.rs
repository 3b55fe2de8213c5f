//! File formats: spec JSON, CSV traces, OBJ meshes.
//!
//! Spec JSON is `{"V": n, "north": [...], "south": [...], "equator": [...]}`
//! with lengths given as numbers or decimal strings, plus an optional
//! free-form `"provenance"` object. Meshes use Klein coordinates, vertex
//! order `N, S, P_1..P_V`.

use std::fmt::Write as _;

use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::flexibility::FlexTrace;
use crate::hypgeom::{from_klein, to_klein, PointH3};
use crate::suspension::{Placement, SuspensionSpec};

/// A spec together with its provenance block.
#[derive(Debug, Clone, PartialEq)]
pub struct SpecDocument {
    pub spec: SuspensionSpec,
    pub provenance: Option<Value>,
}

fn parse_len(v: &Value, field: &str, i: usize) -> Result<f64> {
    let x = match v {
        Value::Number(n) => n.as_f64(),
        Value::String(s) => s.trim().parse::<f64>().ok(),
        _ => None,
    }
    .ok_or_else(|| {
        Error::Parse(format!(
            "{field}[{i}] is not a number or decimal string: {v}"
        ))
    })?;
    if !(x.is_finite() && x > 0.0) {
        return Err(Error::InvalidSpec(format!(
            "{field}[{i}] = {x} is not a positive length"
        )));
    }
    Ok(x)
}

fn parse_lengths(obj: &Map<String, Value>, field: &str) -> Result<Vec<f64>> {
    let arr = obj
        .get(field)
        .ok_or_else(|| Error::Parse(format!("missing field \"{field}\"")))?
        .as_array()
        .ok_or_else(|| Error::Parse(format!("\"{field}\" must be an array")))?;
    arr.iter()
        .enumerate()
        .map(|(i, v)| parse_len(v, field, i))
        .collect()
}

/// Parses and validates spec JSON.
pub fn parse_spec_json(text: &str) -> Result<SpecDocument> {
    let root: Value = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    let obj = root
        .as_object()
        .ok_or_else(|| Error::Parse("spec must be a JSON object".into()))?;
    for key in obj.keys() {
        if !["V", "north", "south", "equator", "provenance"].contains(&key.as_str()) {
            return Err(Error::Parse(format!("unknown field \"{key}\"")));
        }
    }
    let north = parse_lengths(obj, "north")?;
    let south = parse_lengths(obj, "south")?;
    let equator = parse_lengths(obj, "equator")?;
    if let Some(v) = obj.get("V") {
        let v = v
            .as_u64()
            .ok_or_else(|| Error::Parse("\"V\" must be a non-negative integer".into()))?;
        if v as usize != north.len() {
            return Err(Error::InvalidSpec(format!(
                "V = {v} but {} north lengths",
                north.len()
            )));
        }
    }
    let spec = SuspensionSpec::new(north, south, equator)?;
    Ok(SpecDocument {
        spec,
        provenance: obj.get("provenance").cloned(),
    })
}

/// Pretty-printed spec JSON; numbers use the shortest round-trip form.
pub fn spec_to_json(spec: &SuspensionSpec, provenance: Option<&Value>) -> String {
    let mut doc = json!({
        "V": spec.v(),
        "north": spec.north,
        "south": spec.south,
        "equator": spec.equator,
    });
    if let Some(p) = provenance {
        doc["provenance"] = p.clone();
    }
    let mut s = serde_json::to_string_pretty(&doc).expect("spec serializes");
    s.push('\n');
    s
}

/// CSV with header `t,theta_1..theta_V,sigma,m,defect`; `sigma` is the
/// bitmask with bit `j` set when `σ_{j+1} = −1`. Samples outside the
/// feasible region are skipped.
pub fn trace_to_csv(trace: &FlexTrace) -> String {
    let v = trace
        .samples
        .iter()
        .find(|s| s.solution.is_some())
        .map_or(0, |s| s.theta.len());
    let mut out = String::from("t");
    for j in 1..=v {
        write!(out, ",theta_{j}").unwrap();
    }
    out.push_str(",sigma,m,defect\n");
    for s in &trace.samples {
        let Some(sol) = &s.solution else { continue };
        write!(out, "{:.16e}", s.t).unwrap();
        for th in &s.theta {
            write!(out, ",{th:.16e}").unwrap();
        }
        writeln!(out, ",{},{},{:.16e}", sol.signs.mask(), sol.m, sol.defect).unwrap();
    }
    out
}

/// OBJ mesh of a placement: `v` lines in Klein coordinates, faces
/// `N P_j P_{j+1}` and `S P_{j+1} P_j`.
pub fn placement_to_obj(p: &Placement) -> Result<String> {
    let mut pts = vec![p.north(), p.south()];
    pts.extend(p.vertices());
    points_to_obj(&pts)
}

fn points_to_obj(pts: &[PointH3]) -> Result<String> {
    let v = pts.len() - 2;
    let mut out = String::new();
    for q in pts {
        let [a, b, c] = to_klein(q)?;
        writeln!(out, "v {a:.16e} {b:.16e} {c:.16e}").unwrap();
    }
    for j in 0..v {
        let (a, b) = (3 + j, 3 + (j + 1) % v);
        writeln!(out, "f 1 {a} {b}").unwrap();
        writeln!(out, "f 2 {b} {a}").unwrap();
    }
    Ok(out)
}

/// Reads back `(north, south, equator)` from an OBJ written by
/// [`placement_to_obj`].
pub fn obj_to_points(text: &str) -> Result<(PointH3, PointH3, Vec<PointH3>)> {
    let mut pts = Vec::new();
    for (ln, line) in text.lines().enumerate() {
        let mut it = line.split_whitespace();
        if it.next() != Some("v") {
            continue;
        }
        let k: Vec<f64> = it
            .map(|w| {
                w.parse::<f64>()
                    .map_err(|e| Error::Parse(format!("line {}: {e}", ln + 1)))
            })
            .collect::<Result<_>>()?;
        let [a, b, c] = k[..] else {
            return Err(Error::Parse(format!(
                "line {}: expected 3 coordinates",
                ln + 1
            )));
        };
        pts.push(from_klein([a, b, c])?);
    }
    if pts.len() < 5 {
        return Err(Error::Parse(format!(
            "mesh has {} vertices, need at least 5",
            pts.len()
        )));
    }
    let eq = pts.split_off(2);
    Ok((pts[0], pts[1], eq))
}
