//! Reference benchmark: the nonstationary Halley and Chebyshev methods on
//!
//! ```text
//! f(x) = x^2 - exp((1/x) * sin(pi * x^2 / 2)) - 1,    root sqrt(2)
//! ```
//!
//! from the starting points 1.7, 1.6, 1.5 at 120 digits, checked against
//! published iterate values.

use crate::expr::parse;
use crate::methods::{IterationTrace, Method, MethodConfig, MethodError, Problem};
use crate::numctx::{NumericContext, Real};

pub const FUNCTION: &str = "x^2 - exp((1/x) * sin(pi * x^2 / 2)) - 1";
pub const POINTS: [&str; 3] = ["1.7", "1.6", "1.5"];
pub const DIGITS: u32 = 120;
/// Rows `i = 0..ROWS` are reported.
pub const ROWS: usize = 7;
pub const PLACES: usize = 10;

const STARTING_ERRORS: [&str; 3] = ["0.2857864376", "0.1857864376", "0.0857864376"];
const E5_EXPONENT: i64 = -62;

struct Expected {
    method: Method,
    x3: &'static str,
    x4: &'static str,
}

const EXPECTED: [Expected; 2] = [
    Expected {
        method: Method::NonstationaryHalley,
        x3: "1.4143581722",
        x4: "1.4142135632",
    },
    Expected {
        method: Method::NonstationaryChebyshev,
        x3: "1.4149666839",
        x4: "1.4142135854",
    },
];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Check {
    pub method: Method,
    pub row: usize,
    pub column: &'static str,
    pub expected: String,
    pub got: String,
    pub passed: bool,
}

#[derive(Debug, Clone)]
pub struct BenchmarkReport {
    pub ctx: NumericContext,
    pub traces: Vec<IterationTrace>,
    pub checks: Vec<Check>,
}

impl BenchmarkReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

pub fn problem(ctx: NumericContext) -> Problem {
    let f = parse(FUNCTION).expect("benchmark function parses");
    let root = ctx.int(2).sqrt().expect("sqrt(2) is defined");
    Problem::new(f, ctx).with_root_hint(root)
}

pub fn config(ctx: &NumericContext) -> MethodConfig {
    let points = POINTS
        .iter()
        .map(|p| ctx.parse(p).expect("benchmark points parse"))
        .collect();
    MethodConfig::new(ctx, points)
}

pub fn methods() -> [Method; 2] {
    [EXPECTED[0].method, EXPECTED[1].method]
}

/// Runs both methods and evaluates every check.
pub fn run() -> Result<BenchmarkReport, MethodError> {
    let ctx = NumericContext::new(DIGITS).expect("benchmark precision is supported");
    let problem = problem(ctx);
    let config = config(&ctx);
    let mut traces = Vec::new();
    let mut checks = Vec::new();
    for expected in &EXPECTED {
        let trace = expected.method.run(&problem, &config)?;
        checks.extend(check_trace(expected, &trace));
        traces.push(trace);
    }
    Ok(BenchmarkReport {
        ctx,
        traces,
        checks,
    })
}

fn error_at(trace: &IterationTrace, row: usize) -> Option<&Real> {
    trace.steps.get(row)?.error.as_ref()
}

fn check_trace(expected: &Expected, trace: &IterationTrace) -> Vec<Check> {
    const MISSING: &str = "missing";
    let method = expected.method;
    let check = |row, column, expected: String, got: String, passed| Check {
        method,
        row,
        column,
        expected,
        got,
        passed,
    };
    let fixed = |v: Option<&Real>| v.map_or(MISSING.to_string(), |v| v.to_fixed_string(PLACES));

    let mut checks = Vec::new();
    for (row, want) in STARTING_ERRORS.iter().enumerate() {
        let got = fixed(error_at(trace, row));
        checks.push(check(
            row,
            "abs_error",
            want.to_string(),
            got.clone(),
            got == *want,
        ));
    }
    // the published iterates are truncated, not rounded, to 10 places
    for (row, want) in [(3, expected.x3), (4, expected.x4)] {
        let got = trace
            .steps
            .get(row)
            .map_or(MISSING.to_string(), |s| s.x.to_truncated_string(PLACES));
        checks.push(check(row, "x", want.to_string(), got.clone(), got == want));
    }

    let e5 = error_at(trace, 5);
    let exponent = e5.and_then(Real::decimal_exponent);
    checks.push(check(
        5,
        "abs_error",
        format!("exponent {E5_EXPONENT} +/- 1"),
        e5.map_or(MISSING.to_string(), |e| e.to_sci_string(3)),
        exponent.is_some_and(|e| (e - E5_EXPONENT).abs() <= 1),
    ));

    let zero = format!("0.{}", "0".repeat(PLACES));
    let got = fixed(error_at(trace, 6));
    checks.push(check(
        6,
        "abs_error",
        zero.clone(),
        got.clone(),
        got == zero,
    ));
    checks
}
