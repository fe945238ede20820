use std::io::Write;
use std::path::PathBuf;

use nsroot::analysis::{
    default_order_tol, efficiency_indices, empirical_order, kung_traub_comparison, method_indices,
    nonstationary_limit, solve_order_equation, EfficiencyReport, OrderEquation,
};
use nsroot::benchmark;
use nsroot::methods::DEFAULT_MAX_ITERATIONS;
use nsroot::numctx::DEFAULT_DIGITS;
use nsroot::{
    parse, Expr, IterationTrace, Method, MethodConfig, MethodError, NumericContext, Problem, Real,
};
use serde::{Deserialize, Serialize};

use crate::format::{self, fixed, iterate, small};
use crate::report::{self, to_csv, to_json, trace_document, Indices, TraceDocument};
use crate::settings::{pick, split_list, ConfigFile};
use crate::{
    AnalyzeArgs, CliError, CompareArgs, OutputFormat, ProblemArgs, ReproduceArgs, SolveArgs,
};

fn load_config(path: &Option<PathBuf>) -> Result<ConfigFile, CliError> {
    match path {
        Some(path) => ConfigFile::load(path),
        None => Ok(ConfigFile::default()),
    }
}

fn emit(out: &mut dyn Write, text: &str) -> Result<(), CliError> {
    out.write_all(text.as_bytes())
        .map_err(|e| CliError::Input(format!("cannot write output: {e}")))
}

fn context(digits: Option<u32>) -> Result<NumericContext, CliError> {
    NumericContext::new(digits.unwrap_or(DEFAULT_DIGITS))
        .map_err(|e| CliError::Input(e.to_string()))
}

fn number(ctx: &NumericContext, what: &str, text: &str) -> Result<Real, CliError> {
    ctx.parse(text).map_err(|_| {
        CliError::Input(format!(
            "invalid {what} {text:?}: expected a decimal number"
        ))
    })
}

fn parse_function(text: &str) -> Result<Expr, CliError> {
    parse(text).map_err(|e| {
        let caret = " ".repeat(e.offset);
        CliError::Input(format!("invalid function: {e}\n  {text}\n  {caret}^"))
    })
}

/// Bad configurations and failures at a user-supplied starting point are
/// input errors; anything later in the run is numerical.
fn method_error(method: Method, e: MethodError) -> CliError {
    match e {
        MethodError::InvalidConfig(msg) => CliError::Input(format!("{method}: {msg}")),
        MethodError::Numeric { iteration, .. } if iteration < method.required_points() => {
            CliError::Input(format!("{method}: starting point rejected: {e}"))
        }
        other => CliError::Numerical(format!("{method}: {other}")),
    }
}

/// Everything a run needs besides the method.
struct Setup {
    ctx: NumericContext,
    function: String,
    problem: Problem,
    point_text: Vec<String>,
    points: Vec<Real>,
    tol: Option<Real>,
    max_iter: usize,
    output: OutputFormat,
}

impl Setup {
    fn resolve(args: &ProblemArgs, cfg: &ConfigFile) -> Result<Self, CliError> {
        let ctx = context(pick(args.precision, cfg, "precision")?)?;
        let function: String = pick(args.function.clone(), cfg, "function")?
            .ok_or_else(|| CliError::Input("missing --function".into()))?;
        let f = parse_function(&function)?;
        let point_text = split_list(
            &pick(args.points.clone(), cfg, "points")?
                .ok_or_else(|| CliError::Input("missing --points".into()))?,
        );
        if point_text.is_empty() {
            return Err(CliError::Input("--points needs at least one value".into()));
        }
        let points = point_text
            .iter()
            .map(|p| number(&ctx, "point", p))
            .collect::<Result<Vec<_>, _>>()?;
        let tol = pick(args.tol.clone(), cfg, "tol")?
            .map(|t: String| number(&ctx, "tolerance", &t))
            .transpose()?;
        if tol.as_ref().is_some_and(|t| t.is_negative()) {
            return Err(CliError::Input("tolerance must be non-negative".into()));
        }
        let mut problem = Problem::new(f, ctx);
        if let Some(hint) = pick(args.root_hint.clone(), cfg, "root-hint")? {
            problem = problem.with_root_hint(number(&ctx, "root hint", &hint)?);
        }
        Ok(Self {
            ctx,
            function,
            problem,
            point_text,
            points,
            tol,
            max_iter: pick(args.max_iter, cfg, "max-iter")?.unwrap_or(DEFAULT_MAX_ITERATIONS),
            output: pick(args.output, cfg, "output")?.unwrap_or(OutputFormat::Table),
        })
    }

    /// Uses the last `count` points (all of them when `count` is larger).
    fn config(&self, count: usize) -> (Vec<String>, MethodConfig) {
        let start = self.points.len().saturating_sub(count);
        let mut config = MethodConfig::new(&self.ctx, self.points[start..].to_vec())
            .with_max_iterations(self.max_iter);
        if let Some(tol) = &self.tol {
            config = config.with_tolerance(tol.clone());
        }
        (self.point_text[start..].to_vec(), config)
    }

    fn run(&self, method: Method) -> Result<(Vec<String>, IterationTrace), MethodError> {
        let (text, config) = self.config(method.required_points());
        if text.len() < method.required_points() {
            return Err(MethodError::InvalidConfig(format!(
                "needs {} starting point(s), got {}",
                method.required_points(),
                text.len()
            )));
        }
        Ok((text, method.run(&self.problem, &config)?))
    }
}

fn parse_method(text: &str) -> Result<Method, CliError> {
    text.parse().map_err(CliError::Input)
}

fn order_summary(trace: &IterationTrace, ctx: &NumericContext) -> String {
    match empirical_order(trace, ctx) {
        Ok(order) => {
            let ratios: Vec<String> = order.ratios.iter().map(|r| r.to_fixed_string(3)).collect();
            let proxy = if order.proxy {
                " (step-length proxy)"
            } else {
                ""
            };
            format!("{}{proxy}", ratios.join(" "))
        }
        Err(_) => "n/a (too few usable steps)".into(),
    }
}

fn indices_line(r: &EfficiencyReport) -> String {
    format!(
        "p={} d={} I1={} I2={} I3={}",
        fixed(&r.p),
        r.d,
        fixed(&r.i1),
        fixed(&r.i2),
        fixed(&r.i3)
    )
}

fn trace_table(trace: &IterationTrace, ctx: &NumericContext) -> String {
    let with_error = trace.steps.iter().all(|s| s.error.is_some());
    let mut header = vec!["i", "x_i"];
    if with_error {
        header.push("|e_i|");
    }
    header.extend(["f(x_i)", "d_i", "units"]);
    let mut units = 0;
    let rows: Vec<Vec<String>> = trace
        .steps
        .iter()
        .map(|s| {
            units += s.horner_units;
            let mut row = vec![s.index.to_string(), iterate(&s.x)];
            if let Some(e) = s.error.as_ref().filter(|_| with_error) {
                row.push(small(e, ctx));
            }
            row.extend([
                small(&s.residual, ctx),
                s.horner_units.to_string(),
                units.to_string(),
            ]);
            row
        })
        .collect();
    format::table(&header, &rows)
}

pub fn solve(args: SolveArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let cfg = load_config(&args.problem.config)?;
    let method = parse_method(
        &pick(args.method, &cfg, "method")?
            .ok_or_else(|| CliError::Input("missing --method".into()))?,
    )?;
    let setup = Setup::resolve(&args.problem, &cfg)?;
    if setup.points.len() != method.required_points() {
        return Err(CliError::Input(format!(
            "{method} needs exactly {} starting point(s), got {}",
            method.required_points(),
            setup.points.len()
        )));
    }
    let (points, trace) = setup.run(method).map_err(|e| method_error(method, e))?;
    let ctx = &setup.ctx;
    let text = match setup.output {
        OutputFormat::Json => to_json(&trace_document(
            method,
            &setup.function,
            &points,
            &trace,
            ctx,
        )),
        OutputFormat::Csv => to_csv(&report::step_records(&trace, ctx)),
        OutputFormat::Table => {
            let mut text = format!(
                "method     {method}\nfunction   {}\nprecision  {} digits\n\n",
                setup.function,
                ctx.digits()
            );
            text += &trace_table(&trace, ctx);
            text += &format!(
                "\ntermination     {} after {} iteration(s), {} Horner units\n",
                trace.termination,
                trace.iterations(),
                trace.total_horner_units()
            );
            text += &format!("empirical order {}\n", order_summary(&trace, ctx));
            text += &format!(
                "indices         {}\n",
                indices_line(&method_indices(method, ctx))
            );
            text
        }
    };
    emit(out, &text)?;
    trace
        .ensure_converged()
        .map(drop)
        .map_err(|e| method_error(method, e))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompareEntry {
    pub method: String,
    pub trace: Option<TraceDocument>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompareDocument {
    pub function: String,
    pub points: Vec<String>,
    pub precision: u32,
    pub methods: Vec<CompareEntry>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompareRow {
    pub method: String,
    pub iterations: Option<usize>,
    pub horner_units: Option<u32>,
    pub root: Option<String>,
    pub empirical_order: Option<String>,
    pub p: String,
    pub d: u32,
    #[serde(rename = "I1")]
    pub i1: String,
    #[serde(rename = "I2")]
    pub i2: String,
    #[serde(rename = "I3")]
    pub i3: String,
    pub termination: Option<String>,
    pub error: Option<String>,
}

type RunResult = Result<(Vec<String>, IterationTrace), MethodError>;

pub fn compare(args: CompareArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let cfg = load_config(&args.problem.config)?;
    let methods = match pick(args.methods, &cfg, "methods")? {
        Some(list) => split_list(&list)
            .iter()
            .map(|m| parse_method(m))
            .collect::<Result<Vec<_>, _>>()?,
        None => Method::ALL.to_vec(),
    };
    if methods.is_empty() {
        return Err(CliError::Input(
            "--methods needs at least one method".into(),
        ));
    }
    let setup = Setup::resolve(&args.problem, &cfg)?;
    let ctx = &setup.ctx;

    // runs are independent; results are collected in request order
    let results: Vec<(Method, RunResult)> = std::thread::scope(|scope| {
        let handles: Vec<_> = methods
            .iter()
            .map(|&m| {
                let setup = &setup;
                scope.spawn(move || (m, setup.run(m)))
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("method thread panicked"))
            .collect()
    });

    let mut worst: Option<CliError> = None;
    let mut note = |e: CliError| {
        let replace = matches!(
            (&worst, &e),
            (None, _) | (Some(CliError::Numerical(_)), CliError::Input(_))
        );
        if replace {
            worst = Some(e);
        }
    };

    let mut entries = Vec::new();
    let mut rows = Vec::new();
    for (method, result) in &results {
        let method = *method;
        let indices = Indices::from_report(&method_indices(method, ctx));
        let mut row = CompareRow {
            method: method.name().into(),
            iterations: None,
            horner_units: None,
            root: None,
            empirical_order: None,
            p: indices.p.clone(),
            d: indices.d,
            i1: indices.i1.clone(),
            i2: indices.i2.clone(),
            i3: indices.i3.clone(),
            termination: None,
            error: None,
        };
        match result {
            Ok((points, trace)) => {
                row.iterations = Some(trace.iterations());
                row.horner_units = Some(trace.total_horner_units());
                row.root = Some(fixed(trace.root()));
                row.empirical_order = empirical_order(trace, ctx)
                    .ok()
                    .and_then(|o| o.last().map(|r| r.to_fixed_string(3)));
                row.termination = Some(trace.termination.name().into());
                if let Err(e) = trace.clone().ensure_converged() {
                    note(method_error(method, e));
                }
                entries.push(CompareEntry {
                    method: method.name().into(),
                    trace: Some(trace_document(method, &setup.function, points, trace, ctx)),
                    error: None,
                });
            }
            Err(e) => {
                row.error = Some(e.to_string());
                note(method_error(method, e.clone()));
                entries.push(CompareEntry {
                    method: method.name().into(),
                    trace: None,
                    error: Some(e.to_string()),
                });
            }
        }
        rows.push(row);
    }

    let text = match setup.output {
        OutputFormat::Json => to_json(&CompareDocument {
            function: setup.function.clone(),
            points: setup.point_text.clone(),
            precision: ctx.digits(),
            methods: entries,
        }),
        OutputFormat::Csv => to_csv(&rows),
        OutputFormat::Table => {
            let dash = || "-".to_string();
            let cells: Vec<Vec<String>> = rows
                .iter()
                .map(|r| {
                    vec![
                        r.method.clone(),
                        r.iterations.map_or_else(dash, |v| v.to_string()),
                        r.horner_units.map_or_else(dash, |v| v.to_string()),
                        r.root.clone().unwrap_or_else(dash),
                        r.empirical_order.clone().unwrap_or_else(dash),
                        r.p.clone(),
                        r.d.to_string(),
                        r.i1.clone(),
                        r.i2.clone(),
                        r.i3.clone(),
                        match (&r.termination, &r.error) {
                            (_, Some(e)) => format!("error: {e}"),
                            (Some(t), None) => t.clone(),
                            (None, None) => dash(),
                        },
                    ]
                })
                .collect();
            format!(
                "function   {}\npoints     {}\nprecision  {} digits\n\n",
                setup.function,
                setup.point_text.join(", "),
                ctx.digits()
            ) + &format::table(
                &[
                    "method", "iters", "units", "root", "order", "p", "d", "I1", "I2", "I3",
                    "status",
                ],
                &cells,
            )
        }
    };
    emit(out, &text)?;
    worst.map_or(Ok(()), Err)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnalyzeRow {
    pub k: String,
    pub r_k: String,
    #[serde(rename = "I1")]
    pub i1: String,
    #[serde(rename = "I2")]
    pub i2: String,
    #[serde(rename = "I3")]
    pub i3: String,
}

impl AnalyzeRow {
    fn new(k: String, r: &EfficiencyReport) -> Self {
        Self {
            k,
            r_k: fixed(&r.p),
            i1: fixed(&r.i1),
            i2: fixed(&r.i2),
            i3: fixed(&r.i3),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KungTraub {
    pub n: u32,
    #[serde(rename = "I2")]
    pub i2: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnalyzeDocument {
    pub s: u32,
    pub n_max: u32,
    pub precision: u32,
    pub rows: Vec<AnalyzeRow>,
    pub limit: AnalyzeRow,
    pub kung_traub: Vec<KungTraub>,
}

pub fn analyze(args: AnalyzeArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let cfg = load_config(&args.config)?;
    let s = pick(args.s, &cfg, "s")?.unwrap_or(1);
    let n_max = pick(args.n_max, &cfg, "n-max")?.unwrap_or(10);
    if s == 0 || n_max == 0 {
        return Err(CliError::Input("--s and --n-max must be at least 1".into()));
    }
    let ctx = context(pick(args.precision, &cfg, "precision")?)?;
    let output = pick(args.output, &cfg, "output")?.unwrap_or(OutputFormat::Table);
    let invalid = |e: nsroot::AnalysisError| CliError::Input(e.to_string());

    let tol = default_order_tol(&ctx);
    let mut rows = Vec::new();
    for k in 1..=n_max {
        let r = solve_order_equation(OrderEquation::new(s, k).map_err(invalid)?, &tol, &ctx);
        rows.push(AnalyzeRow::new(
            k.to_string(),
            &efficiency_indices(&r, s, &ctx).map_err(invalid)?,
        ));
    }
    let limit = AnalyzeRow::new(
        "limit".into(),
        &nonstationary_limit(s, &ctx).map_err(invalid)?,
    );
    let kung_traub = [2, 3, 4, 8, 64]
        .into_iter()
        .map(|n| {
            Ok(KungTraub {
                n,
                i2: fixed(&kung_traub_comparison(n, &ctx).map_err(invalid)?),
            })
        })
        .collect::<Result<Vec<_>, CliError>>()?;

    let text = match output {
        OutputFormat::Json => to_json(&AnalyzeDocument {
            s,
            n_max,
            precision: ctx.digits(),
            rows,
            limit,
            kung_traub,
        }),
        OutputFormat::Csv => {
            rows.push(limit);
            to_csv(&rows)
        }
        OutputFormat::Table => {
            let cells: Vec<Vec<String>> = rows
                .iter()
                .chain(std::iter::once(&limit))
                .map(|r| {
                    vec![
                        r.k.clone(),
                        r.r_k.clone(),
                        r.i1.clone(),
                        r.i2.clone(),
                        r.i3.clone(),
                    ]
                })
                .collect();
            let mut text =
                format!("s = {s}: stationary processes with memory depth k, d = {s}\n\n");
            text += &format::table(&["k", "r_k", "I1", "I2", "I3"], &cells);
            text += &format!(
                "\nlimit row: s-nonstationary process, p = {}, I1 = 1 + 1/{s}, I2 = {}^(1/{s}), I3 = log10({})/{s}\n",
                s + 1,
                s + 1,
                s + 1
            );
            let kt: Vec<String> = kung_traub
                .iter()
                .map(|k| format!("n={}: {}", k.n, k.i2))
                .collect();
            text += &format!(
                "optimal multipoint without memory, I2 = 2^((n-1)/n) < 2: {}\n",
                kt.join(", ")
            );
            text
        }
    };
    emit(out, &text)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub method: String,
    pub row: usize,
    pub column: String,
    pub expected: String,
    pub got: String,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReproduceDocument {
    pub methods: Vec<TraceDocument>,
    pub checks: Vec<CheckRecord>,
    pub passed: bool,
}

pub fn reproduce_table1(args: ReproduceArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let report = benchmark::run().map_err(|e| CliError::Numerical(e.to_string()))?;
    let ctx = &report.ctx;
    let points: Vec<String> = benchmark::POINTS.iter().map(|p| p.to_string()).collect();
    let checks: Vec<CheckRecord> = report
        .checks
        .iter()
        .map(|c| CheckRecord {
            method: c.method.name().into(),
            row: c.row,
            column: c.column.into(),
            expected: c.expected.clone(),
            got: c.got.clone(),
            passed: c.passed,
        })
        .collect();
    let failed = checks.iter().filter(|c| !c.passed).count();

    let text = match args.output.unwrap_or(OutputFormat::Table) {
        OutputFormat::Json => to_json(&ReproduceDocument {
            methods: benchmark::methods()
                .iter()
                .zip(&report.traces)
                .map(|(&m, t)| trace_document(m, benchmark::FUNCTION, &points, t, ctx))
                .collect(),
            checks: checks.clone(),
            passed: failed == 0,
        }),
        OutputFormat::Csv => to_csv(&checks),
        OutputFormat::Table => {
            let [a, b] = benchmark::methods();
            let mut text = format!(
                "f(x) = {}\nstarting points {}, precision {} digits, root sqrt(2)\n\n",
                benchmark::FUNCTION,
                points.join(", "),
                ctx.digits()
            );
            let cell = |trace: &IterationTrace, i: usize| match trace.steps.get(i) {
                Some(s) => [
                    iterate(&s.x),
                    small(s.error.as_ref().expect("root is known"), ctx),
                ],
                None => ["-".to_string(), "-".to_string()],
            };
            let rows: Vec<Vec<String>> = (0..benchmark::ROWS)
                .map(|i| {
                    let mut row = vec![i.to_string()];
                    row.extend(cell(&report.traces[0], i));
                    row.extend(cell(&report.traces[1], i));
                    row
                })
                .collect();
            let (xa, ea) = (format!("x_i ({a})"), format!("|e_i| ({a})"));
            let (xb, eb) = (format!("x_i ({b})"), format!("|e_i| ({b})"));
            text += &format::table(&["i", &xa, &ea, &xb, &eb], &rows);
            text += &format!(
                "\nchecks: {} of {} passed\n",
                checks.len() - failed,
                checks.len()
            );
            for c in checks.iter().filter(|c| !c.passed) {
                text += &format!(
                    "mismatch: {} row {} {}: expected {}, got {}\n",
                    c.method, c.row, c.column, c.expected, c.got
                );
            }
            text
        }
    };
    emit(out, &text)?;
    if failed == 0 {
        Ok(())
    } else {
        Err(CliError::Numerical(format!(
            "{failed} of {} benchmark checks failed",
            checks.len()
        )))
    }
}
