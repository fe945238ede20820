pub mod analysis;
pub mod benchmark;
pub mod divdiff;
pub mod expr;
pub mod methods;
pub mod numctx;

pub use analysis::{AnalysisError, EfficiencyReport, EmpiricalOrder, OrderEquation};
pub use divdiff::{DivDiffError, DividedDifferenceTable};
pub use expr::{parse, Expr, ParseError};
pub use methods::{
    IterationTrace, Method, MethodConfig, MethodError, OnePointRule, Problem, Step, Termination,
};
pub use numctx::{NumError, NumericContext, Real, Transcendental};
