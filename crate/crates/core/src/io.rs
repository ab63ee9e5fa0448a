//! JSON configuration, CSV outputs and PGM heatmaps.
//!
//! A configuration document may omit any section or field; missing values
//! come from the nominal reference scenario. Unknown keys are rejected.

use std::fmt::Write as _;

use serde_json::{Map, Value};

use crate::config::SimulationConfig;
use crate::error::{ConfigError, ModelError};
use crate::grid::Grid;
use crate::scenario::{averaged_signals, SignalLog};
use crate::solver::TemperatureField;

/// Parses and validates a configuration document.
pub fn load_config(text: &str) -> Result<SimulationConfig, ConfigError> {
    let doc: Value = serde_json::from_str(text)?;
    let mut merged = serde_json::to_value(SimulationConfig::default()).expect("config serializes");
    merge(&mut merged, doc, "")?;
    let cfg: SimulationConfig = serde_json::from_value(merged).map_err(|e| ModelError::Invalid {
        path: "config".into(),
        constraint: e.to_string(),
    })?;
    cfg.validate()?;
    Ok(cfg)
}

/// Pretty-printed JSON that [`load_config`] reads back to an equal config.
pub fn config_to_json(cfg: &SimulationConfig) -> String {
    serde_json::to_string_pretty(cfg).expect("config serializes")
}

fn merge(base: &mut Value, doc: Value, path: &str) -> Result<(), ModelError> {
    match (base, doc) {
        (Value::Object(base), Value::Object(doc)) => merge_objects(base, doc, path),
        (Value::Object(_), other) => Err(ModelError::invalid(
            display_path(path),
            format!("expected an object, found {}", kind(&other)),
        )),
        (base, doc) => {
            *base = doc;
            Ok(())
        }
    }
}

fn merge_objects(base: &mut Map<String, Value>, doc: Map<String, Value>, path: &str) -> Result<(), ModelError> {
    for (key, value) in doc {
        let child = if path.is_empty() {
            key.clone()
        } else {
            format!("{path}.{key}")
        };
        match base.get_mut(&key) {
            Some(slot) => merge(slot, value, &child)?,
            None => return Err(ModelError::invalid(child, "unknown key")),
        }
    }
    Ok(())
}

fn display_path(path: &str) -> String {
    if path.is_empty() {
        "config".to_string()
    } else {
        path.to_string()
    }
}

fn kind(v: &Value) -> &'static str {
    match v {
        Value::Null => "null",
        Value::Bool(_) => "a boolean",
        Value::Number(_) => "a number",
        Value::String(_) => "a string",
        Value::Array(_) => "an array",
        Value::Object(_) => "an object",
    }
}

/// `x1,x2,theta` with one row per cell in flat-index order.
pub fn write_field_csv(field: &TemperatureField, grid: &Grid) -> String {
    let mut out = String::with_capacity(32 * grid.len() + 16);
    out.push_str("x1,x2,theta\n");
    for (offset, theta) in field.as_slice().iter().enumerate() {
        let (x1, x2) = grid.cell_center(grid.cell_index(offset));
        writeln!(out, "{x1},{x2},{theta}").unwrap();
    }
    out
}

/// `t,u_0..,y_0..,u_avg,y_avg` with one row per logged instant.
pub fn write_signals_csv(log: &SignalLog) -> String {
    let n_u = log.inputs.first().map_or(0, Vec::len);
    let n_y = log.outputs.first().map_or(0, Vec::len);
    let mut out = String::from("t");
    for n in 0..n_u {
        write!(out, ",u_{n}").unwrap();
    }
    for n in 0..n_y {
        write!(out, ",y_{n}").unwrap();
    }
    out.push_str(",u_avg,y_avg\n");

    let avg = averaged_signals(log);
    for (i, t) in log.times.iter().enumerate() {
        write!(out, "{t}").unwrap();
        for v in log.inputs[i].iter().chain(&log.outputs[i]) {
            write!(out, ",{v}").unwrap();
        }
        writeln!(out, ",{},{}", avg.input_mean[i], avg.output_mean[i]).unwrap();
    }
    out
}

/// Binary PGM (P5, maxval 255) with `J` columns and `K` rows, topside row first.
///
/// With `range = None` the field's own min and max are used; a uniform field
/// then renders as mid-gray 128.
pub fn render_heatmap(field: &TemperatureField, grid: &Grid, range: Option<(f64, f64)>) -> Result<Vec<u8>, ModelError> {
    let (lo, hi) = match range {
        Some((lo, hi)) if lo < hi => (lo, hi),
        Some((lo, hi)) => {
            return Err(ModelError::invalid(
                "range",
                format!("theta_lo ({lo}) must be < theta_hi ({hi})"),
            ));
        }
        None => (field.min(), field.max()),
    };
    let (cols, rows) = (grid.cols(), grid.rows());
    let header = format!("P5\n{cols} {rows}\n255\n");
    let mut img = Vec::with_capacity(header.len() + cols * rows);
    img.extend_from_slice(header.as_bytes());
    for k in (0..rows).rev() {
        for &theta in field.row(grid, k) {
            let px = if hi > lo {
                (255.0 * ((theta - lo) / (hi - lo)).clamp(0.0, 1.0)).round() as u8
            } else {
                128
            };
            img.push(px);
        }
    }
    Ok(img)
}
