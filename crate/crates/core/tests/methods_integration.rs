mod common;

use common::{bisect, ctx, lagrange_at_last, widen, EQ21};
use nsroot::methods::{
    run_chebyshev, run_halley, run_newton, run_nonstationary_chebyshev, run_nonstationary_generic,
    run_nonstationary_halley, run_nonstationary_s1, run_stationary, ChebyshevRule, HalleyRule,
    HouseholderRule, NewtonRule,
};
use nsroot::{parse, IterationTrace, Method, MethodConfig, NumericContext, Problem, Termination};

fn benchmark(c: NumericContext) -> Problem {
    Problem::new(parse(EQ21).unwrap(), c).with_root_hint(c.int(2).sqrt().unwrap())
}

/// The last `n` of 1.7, 1.6, 1.5.
fn points(c: &NumericContext, n: usize) -> MethodConfig {
    let all = ["1.7", "1.6", "1.5"];
    MethodConfig::new(
        c,
        all[3 - n..].iter().map(|p| c.parse(p).unwrap()).collect(),
    )
}

fn run(method: Method, c: NumericContext) -> IterationTrace {
    method
        .run(&benchmark(c), &points(&c, method.required_points()))
        .unwrap()
}

#[test]
fn every_method_converges_to_the_bisection_root() {
    let c = ctx(120);
    let f = parse(EQ21).unwrap();
    let oracle = bisect(
        |x| f.evaluate(x, &c).unwrap(),
        c.parse("1.3").unwrap(),
        c.parse("1.5").unwrap(),
        60,
        &c,
    );
    for method in Method::ALL {
        let trace = run(method, c);
        assert!(trace.converged(), "{method}: {:?}", trace.termination);
        assert_eq!(trace.root().to_fixed_string(10), "1.4142135624", "{method}");
        assert!((trace.root() - &oracle).abs() < c.pow10(-58), "{method}");
    }
}

#[test]
fn horner_units_follow_the_evaluation_count() {
    let c = ctx(120);
    for method in Method::ALL {
        let trace = run(method, c);
        for step in &trace.steps {
            assert_eq!(step.horner_units, method.horner_units(), "{method}");
        }
        assert_eq!(
            trace.total_horner_units(),
            method.horner_units() * trace.steps.len() as u32
        );
    }
}

#[test]
fn errors_contract_after_the_starting_points() {
    let c = ctx(120);
    for method in Method::ALL {
        let trace = run(method, c);
        let errors: Vec<_> = trace.steps[trace.initial_points - 1..]
            .iter()
            .map(|s| s.error.clone().unwrap())
            .take_while(|e| !e.is_zero())
            .collect();
        for w in errors.windows(2) {
            assert!(w[1] < w[0], "{method}: {:?} !< {:?}", w[1], w[0]);
        }
    }
}

fn same_steps(a: &IterationTrace, b: &IterationTrace) {
    assert_eq!(a.steps, b.steps);
    assert_eq!(a.termination, b.termination);
}

#[test]
fn generic_runner_reproduces_dedicated_runs() {
    let c = ctx(120);
    let p = benchmark(c);
    same_steps(
        &run_nonstationary_generic(&p, &points(&c, 2), &NewtonRule).unwrap(),
        &run_nonstationary_s1(&p, &points(&c, 2)).unwrap(),
    );
    same_steps(
        &run_nonstationary_generic(&p, &points(&c, 3), &HalleyRule).unwrap(),
        &run_nonstationary_halley(&p, &points(&c, 3)).unwrap(),
    );
    same_steps(
        &run_nonstationary_generic(&p, &points(&c, 3), &ChebyshevRule).unwrap(),
        &run_nonstationary_chebyshev(&p, &points(&c, 3)).unwrap(),
    );
    same_steps(
        &run_stationary(&p, &points(&c, 1), &NewtonRule).unwrap(),
        &run_newton(&p, &points(&c, 1)).unwrap(),
    );
    same_steps(
        &run_stationary(&p, &points(&c, 1), &HalleyRule).unwrap(),
        &run_halley(&p, &points(&c, 1)).unwrap(),
    );
    same_steps(
        &run_stationary(&p, &points(&c, 1), &ChebyshevRule).unwrap(),
        &run_chebyshev(&p, &points(&c, 1)).unwrap(),
    );
}

#[test]
fn third_order_substitution_runs_with_four_points() {
    let c = ctx(120);
    let p = benchmark(c);
    let config = MethodConfig::new(
        &c,
        ["1.8", "1.7", "1.6", "1.5"]
            .iter()
            .map(|s| c.parse(s).unwrap())
            .collect(),
    );
    let trace = run_nonstationary_generic(&p, &config, &HouseholderRule).unwrap();
    assert!(trace.converged());
    assert_eq!(trace.label, "nonstat-householder");
    assert!(trace.steps.iter().all(|s| s.horner_units == 3));
    let stationary = run_stationary(&p, &points(&c, 1), &HouseholderRule).unwrap();
    assert!(stationary.steps.iter().all(|s| s.horner_units == 4));
    assert_eq!(stationary.root().to_fixed_string(10), "1.4142135624");
}

#[test]
fn nonstationary_s1_is_newton_on_the_interpolant() {
    let c = ctx(120);
    let wide = ctx(200);
    let trace = run(Method::NonstationaryS1, c);
    let xs: Vec<_> = trace.steps.iter().map(|s| widen(&s.x, &wide)).collect();
    let fs: Vec<_> = trace
        .steps
        .iter()
        .map(|s| widen(&s.residual, &wide))
        .collect();
    for k in 1..xs.len() - 1 {
        let (p, dp) = lagrange_at_last(&xs[..=k], &fs[..=k], &wide);
        let next = &xs[k] - p.checked_div(&dp).unwrap();
        assert!((next - &xs[k + 1]).abs() < wide.pow10(-110), "step {k}");
    }
}

#[test]
fn unknown_root_still_terminates() {
    let c = ctx(60);
    let p = Problem::new(parse("x^3 - 2*x - 5").unwrap(), c);
    let trace = run_nonstationary_s1(&p, &MethodConfig::new(&c, vec![c.int(3), c.int(2)])).unwrap();
    assert!(trace.steps.iter().all(|s| s.error.is_none()));
    assert_ne!(trace.termination, Termination::MaxIterations);
    assert_eq!(trace.root().to_fixed_string(10), "2.0945514815");
}
