//! Result rendering: aligned text tables, CSV and JSON records.

use serde_json::{Map, Value};
use sigmadb::exec::{ResultStatus, StatementOutcome};
use sigmadb::{Heading, RelationResult, Tuple};

use crate::config::OutputFormat;

pub fn render(result: &RelationResult, format: OutputFormat) -> String {
    match format {
        OutputFormat::Table => table(result),
        OutputFormat::Csv => csv(result),
        OutputFormat::Json => {
            let mut s = serde_json::to_string_pretty(&records(result)).expect("JSON values serialize");
            s.push('\n');
            s
        }
    }
}

fn cells(result: &RelationResult) -> Vec<Vec<String>> {
    result
        .tuples
        .iter()
        .map(|t| t.values().iter().map(|v| v.to_string()).collect())
        .collect()
}

pub fn table(result: &RelationResult) -> String {
    let names: Vec<&str> = result.heading.names().collect();
    let rows = cells(result);
    let widths: Vec<usize> = names
        .iter()
        .enumerate()
        .map(|(i, n)| {
            rows.iter()
                .map(|r| r[i].chars().count())
                .chain([n.chars().count()])
                .max()
                .unwrap_or(0)
        })
        .collect();
    let numeric: Vec<bool> = result.heading.attrs().iter().map(|a| a.domain.is_numeric()).collect();
    let line = |values: &[String], header: bool| -> String {
        let parts: Vec<String> = values
            .iter()
            .enumerate()
            .map(|(i, v)| {
                if numeric[i] && !header {
                    format!(" {v:>w$} ", w = widths[i])
                } else {
                    format!(" {v:<w$} ", w = widths[i])
                }
            })
            .collect();
        parts.join("|").trim_end().to_string() + "\n"
    };
    let mut out = String::new();
    if !names.is_empty() {
        out.push_str(&line(&names.iter().map(|n| n.to_string()).collect::<Vec<_>>(), true));
        let rule: Vec<String> = widths.iter().map(|w| "-".repeat(w + 2)).collect();
        out.push_str(&rule.join("+"));
        out.push('\n');
    }
    for r in &rows {
        out.push_str(&line(r, false));
    }
    let n = rows.len();
    out.push_str(&format!("({n} {})\n", if n == 1 { "row" } else { "rows" }));
    if let ResultStatus::Truncated { limit } = result.status {
        out.push_str(&format!("(truncated by LIMIT {limit})\n"));
    }
    out
}

pub fn csv(result: &RelationResult) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(result.heading.names()).expect("in-memory write");
    for r in cells(result) {
        w.write_record(&r).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("CSV output is UTF-8")
}

/// One JSON object per tuple, keys in heading order, values as strings.
pub fn records(result: &RelationResult) -> Value {
    tuple_records(&result.heading, &result.tuples)
}

pub fn tuple_records<'a>(heading: &Heading, tuples: impl IntoIterator<Item = &'a Tuple>) -> Value {
    Value::Array(tuples.into_iter().map(|t| record(heading, t)).collect())
}

fn record(heading: &Heading, tuple: &Tuple) -> Value {
    let obj: Map<String, Value> = heading
        .names()
        .zip(tuple.values())
        .map(|(n, v)| (n.to_string(), Value::String(v.to_string())))
        .collect();
    Value::Object(obj)
}

/// `[{"name": ..., "type": ...}]` for a heading.
pub fn columns(heading: &Heading) -> Value {
    Value::Array(
        heading
            .attrs()
            .iter()
            .map(|a| serde_json::json!({ "name": a.name, "type": a.domain.to_string() }))
            .collect(),
    )
}

/// Short confirmation for statements that do not return rows.
pub fn outcome_message(outcome: &StatementOutcome) -> Option<String> {
    match outcome {
        StatementOutcome::TypeDefined { name } => Some(format!("CREATE TYPE {name}")),
        StatementOutcome::RelationDefined { name, kind } => {
            Some(format!("CREATE {} {name}", kind.as_str().to_uppercase()))
        }
        StatementOutcome::Inserted { name, added } => Some(format!("INSERT {added} INTO {name}")),
        StatementOutcome::Rows(_) => None,
    }
}
