//! Convergence-order and efficiency analysis.
//!
//! * [`OrderEquation`]: `F_n(t) = t^(n+1) - s * sum_{j=0..n} t^j`, whose
//!   unique root in `(s, s+1)` is the order of a one-point method with
//!   memory that reuses information from `n` old points and evaluates `s`
//!   derivatives (counting `f`) per step.
//! * [`EfficiencyReport`]: informational efficiency `p/d`, computational
//!   efficiency `p^(1/d)` and local efficiency `log10(p^(1/d))`.
//! * [`empirical_order`]: Wall's ratio `log|e_{n+1}| / log|e_n|` along a
//!   trace.

use thiserror::Error;

use crate::methods::{IterationTrace, Method};
use crate::numctx::{NumError, NumericContext, Real};

/// Bisection width used when callers have no specific requirement.
pub const DEFAULT_ORDER_TOL_EXP: i32 = -15;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AnalysisError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("insufficient data: {0}")]
    InsufficientData(String),
    #[error(transparent)]
    Numeric(#[from] NumError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct OrderEquation {
    /// Derivatives used per step, counting `f` itself.
    pub s: u32,
    /// Number of reused old points.
    pub n: u32,
}

impl OrderEquation {
    pub fn new(s: u32, n: u32) -> Result<Self, AnalysisError> {
        if s == 0 {
            return Err(AnalysisError::InvalidArgument("s must be >= 1".into()));
        }
        // F_0(t) = t - s has root s itself, outside (s, s+1)
        if n == 0 {
            return Err(AnalysisError::InvalidArgument(
                "the order equation needs memory depth n >= 1".into(),
            ));
        }
        Ok(Self { s, n })
    }

    /// `F_n(t)`.
    pub fn value(&self, t: &Real, ctx: &NumericContext) -> Real {
        // sum_{j=0..n} t^j by Horner
        let mut geometric = ctx.one();
        for _ in 0..self.n {
            geometric = &geometric * t + ctx.one();
        }
        // t^(n+1) = (t - 1) * sum + 1
        let leading = (t - ctx.one()) * &geometric + ctx.one();
        leading - ctx.int(i64::from(self.s)) * geometric
    }
}

/// Unique root of `F_n` in `(s, s+1)`, bisected to an interval of width
/// at most `tol`; returns the midpoint.
pub fn solve_order_equation(eq: OrderEquation, tol: &Real, ctx: &NumericContext) -> Real {
    let mut lo = ctx.int(i64::from(eq.s));
    let mut hi = ctx.int(i64::from(eq.s) + 1);
    debug_assert!(eq.value(&lo, ctx).is_negative());
    debug_assert!(!eq.value(&hi, ctx).is_negative());
    let half = ctx.ratio(1, 2).expect("nonzero denominator");
    while &hi - &lo > *tol {
        let mid = (&lo + &hi) * &half;
        if eq.value(&mid, ctx).is_negative() {
            lo = mid;
        } else {
            hi = mid;
        }
        // the bracket cannot shrink below one ulp
        if (&hi - &lo).is_zero() {
            break;
        }
    }
    (lo + hi) * half
}

pub fn default_order_tol(ctx: &NumericContext) -> Real {
    ctx.pow10(DEFAULT_ORDER_TOL_EXP)
}

/// `[r_1, ..., r_{n_max}]`: orders of the stationary processes with memory
/// depth 1..n_max, strictly increasing towards `s + 1`.
pub fn order_sequence(
    s: u32,
    n_max: u32,
    tol: &Real,
    ctx: &NumericContext,
) -> Result<Vec<Real>, AnalysisError> {
    if n_max == 0 {
        return Err(AnalysisError::InvalidArgument("n_max must be >= 1".into()));
    }
    (1..=n_max)
        .map(|n| Ok(solve_order_equation(OrderEquation::new(s, n)?, tol, ctx)))
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct EfficiencyReport {
    pub p: Real,
    pub d: u32,
    /// `p / d`.
    pub i1: Real,
    /// `p^(1/d)`.
    pub i2: Real,
    /// `log10(i2)`.
    pub i3: Real,
}

pub fn efficiency_indices(
    p: &Real,
    d: u32,
    ctx: &NumericContext,
) -> Result<EfficiencyReport, AnalysisError> {
    if d == 0 {
        return Err(AnalysisError::InvalidArgument("d must be >= 1".into()));
    }
    if *p <= ctx.one() {
        return Err(AnalysisError::InvalidArgument(
            "order p must exceed 1".into(),
        ));
    }
    let d_real = ctx.int(i64::from(d));
    let i1 = p.checked_div(&d_real)?;
    let i2 = p.pow(&ctx.one().checked_div(&d_real)?)?;
    let i3 = i2.log10()?;
    Ok(EfficiencyReport {
        p: p.clone(),
        d,
        i1,
        i2,
        i3,
    })
}

/// Indices of the `s`-nonstationary limit: `p = s + 1`, `d = s`.
pub fn nonstationary_limit(
    s: u32,
    ctx: &NumericContext,
) -> Result<EfficiencyReport, AnalysisError> {
    efficiency_indices(&ctx.int(i64::from(s) + 1), s, ctx)
}

/// Order used for the efficiency indices of a built-in method.
pub fn theoretical_order(method: Method, ctx: &NumericContext) -> Real {
    let tol = ctx.pow10(10 - ctx.digits() as i32);
    match method {
        Method::Newton | Method::NonstationaryS1 => ctx.int(2),
        Method::Secant => solve_order_equation(OrderEquation { s: 1, n: 1 }, &tol, ctx),
        Method::GeneralizedSecant => solve_order_equation(OrderEquation { s: 1, n: 2 }, &tol, ctx),
        Method::Halley
        | Method::NonstationaryHalley
        | Method::Chebyshev
        | Method::NonstationaryChebyshev => ctx.int(3),
    }
}

pub fn method_indices(method: Method, ctx: &NumericContext) -> EfficiencyReport {
    efficiency_indices(&theoretical_order(method, ctx), method.horner_units(), ctx)
        .expect("built-in methods have p > 1 and d >= 1")
}

/// `2^((n-1)/n)`: computational efficiency of an optimal multipoint method
/// without memory using `n` evaluations per step (order `2^(n-1)`).
pub fn kung_traub_comparison(n_evals: u32, ctx: &NumericContext) -> Result<Real, AnalysisError> {
    if n_evals == 0 {
        return Err(AnalysisError::InvalidArgument(
            "n_evals must be >= 1".into(),
        ));
    }
    let exponent = ctx.ratio(i64::from(n_evals) - 1, i64::from(n_evals))?;
    Ok(ctx.int(2).pow(&exponent)?)
}

/// Wall-ratio sequence from a trace.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalOrder {
    /// `log|e_{n+1}| / log|e_n|` for consecutive usable errors.
    pub ratios: Vec<Real>,
    /// Errors were approximated by step lengths `|x_{n+1} - x_n|`.
    pub proxy: bool,
    last_pair: Option<(Real, Real)>,
}

impl EmpiricalOrder {
    pub fn last(&self) -> Option<&Real> {
        self.ratios.last()
    }

    /// Indicative asymptotic error constant `|e_{n+1}| / |e_n|^p` at the
    /// last usable pair.
    pub fn asymptotic_constant(&self, p: &Real) -> Option<Real> {
        let (prev, next) = self.last_pair.as_ref()?;
        next.checked_div(&prev.pow(p).ok()?).ok()
    }
}

/// Errors at or below this magnitude are rounding noise and are skipped.
pub fn noise_floor(ctx: &NumericContext) -> Real {
    ctx.pow10(10 - ctx.digits() as i32)
}

/// Consecutive errors `(e_i, e_{i+1})`.
pub type ErrorPair = (Real, Real);

/// Ratios `ln e_{i+1} / ln e_i` over consecutive entries with
/// `floor < e < 1` and `e_{i+1} < e_i`; returns the ratios and the last
/// pair used. Non-decreasing pairs carry no order information (typically
/// an error stuck at the accuracy of the supplied root).
pub fn wall_ratios(
    errors: &[Real],
    floor: &Real,
    ctx: &NumericContext,
) -> Result<(Vec<Real>, Option<ErrorPair>), NumError> {
    let usable = |e: &Real| *e > *floor && *e < ctx.one();
    let mut ratios = Vec::new();
    let mut last_pair = None;
    for pair in errors.windows(2) {
        if usable(&pair[0]) && usable(&pair[1]) && pair[1] < pair[0] {
            ratios.push(pair[1].ln()?.checked_div(&pair[0].ln()?)?);
            last_pair = Some((pair[0].clone(), pair[1].clone()));
        }
    }
    Ok((ratios, last_pair))
}

/// Empirical convergence order of a trace. Uses the error column when
/// every step has one, otherwise step lengths as proxies.
pub fn empirical_order(
    trace: &IterationTrace,
    ctx: &NumericContext,
) -> Result<EmpiricalOrder, AnalysisError> {
    if trace.steps.len() < 4 {
        return Err(AnalysisError::InsufficientData(format!(
            "need at least 4 steps, trace has {}",
            trace.steps.len()
        )));
    }
    let exact: Option<Vec<Real>> = trace.steps.iter().map(|s| s.error.clone()).collect();
    let proxy = exact.is_none();
    let errors = exact.unwrap_or_else(|| {
        trace
            .steps
            .windows(2)
            .map(|w| (&w[1].x - &w[0].x).abs())
            .collect()
    });
    let (ratios, last_pair) = wall_ratios(&errors, &noise_floor(ctx), ctx)?;
    if ratios.is_empty() {
        return Err(AnalysisError::InsufficientData(
            "no two consecutive errors above the noise floor".into(),
        ));
    }
    Ok(EmpiricalOrder {
        ratios,
        proxy,
        last_pair,
    })
}
