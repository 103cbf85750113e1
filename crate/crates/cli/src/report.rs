//! JSON and CSV rendering. Exact values travel as `"num/den"` strings next
//! to a decimal rendering.

use std::io::Write;
use std::path::Path;

use jrp_core::cost::{csv_header_with_decimals, CostBreakdown};
use jrp_core::model::rational::{format_rational, to_decimal, Rational};
use jrp_core::model::Policy;
use serde_json::{json, Map, Value};

use crate::error::CliError;

pub fn exact(x: &Rational, digits: usize) -> Value {
    json!({ "exact": format_rational(x), "decimal": to_decimal(x, digits) })
}

pub fn breakdown(cost: &CostBreakdown, digits: usize) -> Value {
    let mut out = Map::new();
    out.insert("standalone".into(), exact(&cost.standalone_total, digits));
    out.insert(
        "joint_frequency".into(),
        exact(&cost.joint_frequency, digits),
    );
    out.insert("joint_cost".into(), exact(&cost.joint_cost, digits));
    out.insert("total".into(), exact(&cost.total, digits));
    if let Some(c) = &cost.per_class {
        out.insert(
            "per_class".into(),
            json!({
                "constants": exact(&c.constants, digits),
                "variables": exact(&c.variables, digits),
                "clauses": exact(&c.clauses, digits),
            }),
        );
    }
    Value::Object(out)
}

pub fn policy(p: &Policy) -> Value {
    Value::Object(
        p.cycles
            .iter()
            .map(|(id, t)| (id.clone(), Value::String(format_rational(t))))
            .collect(),
    )
}

pub fn print_json(value: &Value) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(value).expect("values serialize");
    let mut out = std::io::stdout().lock();
    writeln!(out, "{text}").map_err(|e| CliError::input(format!("stdout: {e}")))
}

/// Header plus one row per record.
pub fn print_csv(header: &[String], rows: &[Vec<String>]) -> Result<(), CliError> {
    let mut writer = csv::Writer::from_writer(std::io::stdout().lock());
    let fail = |e: csv::Error| CliError::input(format!("stdout: {e}"));
    writer.write_record(header).map_err(fail)?;
    for row in rows {
        writer.write_record(row).map_err(fail)?;
    }
    writer
        .flush()
        .map_err(|e| CliError::input(format!("stdout: {e}")))
}

pub fn print_breakdown_csv(
    cost: &CostBreakdown,
    instance_id: &str,
    policy_id: &str,
    digits: usize,
) -> Result<(), CliError> {
    print_csv(
        &csv_header_with_decimals(),
        &[cost.csv_record(instance_id, policy_id, digits)],
    )
}

pub fn read(path: &Path) -> Result<Vec<u8>, CliError> {
    std::fs::read(path).map_err(|e| CliError::input(format!("{}: {e}", path.display())))
}

pub fn write(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    std::fs::write(path, bytes).map_err(|e| CliError::input(format!("{}: {e}", path.display())))
}

/// File stem used as a default record id.
pub fn stem(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default()
}
