//! Serializable trace documents for CSV and JSON output.

use nsroot::analysis::{empirical_order, method_indices, EfficiencyReport};
use nsroot::{IterationTrace, Method, NumericContext, Real};
use serde::{Deserialize, Serialize};

use crate::format::fixed;

/// One CSV row or JSON step; numbers are full-precision decimal text.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepRecord {
    pub i: usize,
    pub x: String,
    pub abs_error: Option<String>,
    pub residual: String,
    pub horner_units: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Indices {
    pub p: String,
    pub d: u32,
    #[serde(rename = "I1")]
    pub i1: String,
    #[serde(rename = "I2")]
    pub i2: String,
    #[serde(rename = "I3")]
    pub i3: String,
}

impl Indices {
    pub fn from_report(r: &EfficiencyReport) -> Self {
        Self {
            p: fixed(&r.p),
            d: r.d,
            i1: fixed(&r.i1),
            i2: fixed(&r.i2),
            i3: fixed(&r.i3),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceDocument {
    pub method: String,
    pub function: String,
    pub points: Vec<String>,
    pub precision: u32,
    pub steps: Vec<StepRecord>,
    pub termination: String,
    pub empirical_order: Vec<String>,
    pub indices: Indices,
}

pub fn step_records(trace: &IterationTrace, ctx: &NumericContext) -> Vec<StepRecord> {
    let text = |v: &Real| v.to_decimal_string(ctx);
    trace
        .steps
        .iter()
        .map(|s| StepRecord {
            i: s.index,
            x: text(&s.x),
            abs_error: s.error.as_ref().map(text),
            residual: text(&s.residual),
            horner_units: s.horner_units,
        })
        .collect()
}

/// Wall ratios at 10 places; empty when the trace is too short.
pub fn order_ratios(trace: &IterationTrace, ctx: &NumericContext) -> Vec<String> {
    empirical_order(trace, ctx)
        .map(|o| o.ratios.iter().map(fixed).collect())
        .unwrap_or_default()
}

pub fn trace_document(
    method: Method,
    function: &str,
    points: &[String],
    trace: &IterationTrace,
    ctx: &NumericContext,
) -> TraceDocument {
    TraceDocument {
        method: method.name().to_string(),
        function: function.to_string(),
        points: points.to_vec(),
        precision: ctx.digits(),
        steps: step_records(trace, ctx),
        termination: trace.termination.name().to_string(),
        empirical_order: order_ratios(trace, ctx),
        indices: Indices::from_report(&method_indices(method, ctx)),
    }
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("documents serialize") + "\n"
}

pub fn to_csv<T: Serialize>(rows: &[T]) -> String {
    let mut writer = csv::Writer::from_writer(Vec::new());
    for row in rows {
        writer.serialize(row).expect("rows serialize");
    }
    String::from_utf8(writer.into_inner().expect("in-memory writer")).expect("utf-8 output")
}

/// Parses CSV written by [`to_csv`].
pub fn from_csv<T: for<'de> Deserialize<'de>>(text: &str) -> Result<Vec<T>, csv::Error> {
    csv::Reader::from_reader(text.as_bytes())
        .deserialize()
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_round_trip_keeps_missing_errors() {
        let rows = vec![
            StepRecord {
                i: 0,
                x: "1.5".into(),
                abs_error: None,
                residual: "-2.5e-3".into(),
                horner_units: 2,
            },
            StepRecord {
                i: 1,
                x: "1.25".into(),
                abs_error: Some("1e-9".into()),
                residual: "0".into(),
                horner_units: 2,
            },
        ];
        let text = to_csv(&rows);
        assert!(text.starts_with("i,x,abs_error,residual,horner_units\n"));
        let back: Vec<StepRecord> = from_csv(&text).unwrap();
        assert_eq!(back, rows);
        assert_eq!(to_csv(&back), text);
    }
}
