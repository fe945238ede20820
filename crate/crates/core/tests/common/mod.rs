//! Independent oracles and generators shared by the integration tests.
//! Nothing here calls into the divided-difference table or the methods.
#![allow(dead_code)]

use nsroot::expr::Expr;
use nsroot::{NumericContext, Real, Transcendental};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rug::Rational;

pub const EQ21: &str = "x^2 - exp((1/x) * sin(pi * x^2 / 2)) - 1";

pub fn ctx(digits: u32) -> NumericContext {
    NumericContext::new(digits).unwrap()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `|a - b| <= 10^-digits * max(1, |a|, |b|)`.
pub fn agree(a: &Real, b: &Real, digits: i32, ctx: &NumericContext) -> bool {
    let scale = [ctx.one(), a.abs(), b.abs()]
        .into_iter()
        .fold(ctx.zero(), |m, v| if v > m { v } else { m });
    (a - b).abs() <= ctx.pow10(-digits) * scale
}

/// Re-reads `x` exactly in a (typically wider) context.
pub fn widen(x: &Real, wide: &NumericContext) -> Real {
    wide.rational(&x.to_rational())
}

/// A random rational `n / den` with `|n| <= max_num`.
pub fn rational(rng: &mut impl Rng, max_num: i64, den: i64) -> Rational {
    Rational::from((rng.gen_range(-max_num..=max_num), den))
}

/// `count` distinct nodes in `[-2, 2]`, pairwise more than 0.03 apart.
pub fn spread_nodes(rng: &mut impl Rng, count: usize, ctx: &NumericContext) -> Vec<Real> {
    let mut grid: Vec<i64> = (-40..=40).collect();
    grid.shuffle(rng);
    grid[..count]
        .iter()
        .map(|&k| {
            let jitter = rng.gen_range(0..1000);
            ctx.rational(&Rational::from((k * 1000 + jitter / 4, 20_000)))
        })
        .collect()
}

/// Full divided-difference triangle: `dd[a][b] = f[x_a, ..., x_b]`.
pub fn divided_differences(xs: &[Real], fs: &[Real]) -> Vec<Vec<Real>> {
    let n = xs.len();
    let mut dd: Vec<Vec<Real>> = vec![vec![fs[0].clone(); n]; n];
    for (i, f) in fs.iter().enumerate() {
        dd[i][i] = f.clone();
    }
    for width in 1..n {
        for a in 0..n - width {
            let b = a + width;
            dd[a][b] = (&dd[a + 1][b] - &dd[a][b - 1])
                .checked_div(&(&xs[b] - &xs[a]))
                .unwrap();
        }
    }
    dd
}

/// Derivative of the interpolating polynomial at the last node via the
/// product-quotient form
/// `w_{k-1}(x_k) * sum_{i=1..k} f[x_{k-i}..x_k] / w_{k-i}(x_k)`,
/// `w_m(x) = prod_{j=0..m} (x - x_j)`.
pub fn w_quotient_derivative(xs: &[Real], fs: &[Real], ctx: &NumericContext) -> Real {
    let k = xs.len() - 1;
    let dd = divided_differences(xs, fs);
    let w = |m: usize| -> Real { (0..=m).fold(ctx.one(), |acc, j| acc * (&xs[k] - &xs[j])) };
    let outer = w(k - 1);
    let mut sum = ctx.zero();
    for i in 1..=k {
        sum = sum + dd[k - i][k].checked_div(&w(k - i)).unwrap();
    }
    outer * sum
}

/// Lagrange-form value and derivative of the interpolating polynomial at
/// the last node.
pub fn lagrange_at_last(xs: &[Real], fs: &[Real], ctx: &NumericContext) -> (Real, Real) {
    let k = xs.len() - 1;
    let xk = &xs[k];
    let mut derivative = ctx.zero();
    for j in 0..k {
        let mut num = ctx.one();
        let mut den = ctx.one();
        for m in 0..=k {
            if m != j {
                den = den * (&xs[j] - &xs[m]);
                if m != k {
                    num = num * (xk - &xs[m]);
                }
            }
        }
        derivative = derivative + &fs[j] * num.checked_div(&den).unwrap();
    }
    let mut own = ctx.zero();
    for x in &xs[..k] {
        own = own + ctx.one().checked_div(&(xk - x)).unwrap();
    }
    derivative = derivative + &fs[k] * own;
    (fs[k].clone(), derivative)
}

/// Bisection on a sign-changing bracket down to `10^-digits`.
pub fn bisect(
    f: impl Fn(&Real) -> Real,
    mut lo: Real,
    mut hi: Real,
    digits: i32,
    ctx: &NumericContext,
) -> Real {
    let lo_negative = f(&lo).is_negative();
    assert_ne!(
        lo_negative,
        f(&hi).is_negative(),
        "bracket must change sign"
    );
    let half = ctx.ratio(1, 2).unwrap();
    while &hi - &lo > ctx.pow10(-digits) {
        let mid = (&lo + &hi) * &half;
        if f(&mid).is_negative() == lo_negative {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (lo + hi) * half
}

/// Polynomial with the given coefficients (constant first) as an `Expr`.
pub fn polynomial_expr(coeffs: &[Rational]) -> Expr {
    coeffs
        .iter()
        .enumerate()
        .fold(Expr::constant(0), |acc, (i, c)| {
            let term = Expr::mul(
                Expr::constant(c.clone()),
                Expr::pow(Expr::var(), Expr::constant(i as i64)),
            );
            Expr::add(acc, term)
        })
}

/// Horner evaluation of a polynomial, independent of `Expr`.
pub fn horner(coeffs: &[Rational], x: &Real, ctx: &NumericContext) -> Real {
    coeffs
        .iter()
        .rev()
        .fold(ctx.zero(), |acc, c| acc * x + ctx.rational(c))
}

/// Random expression that is smooth and finite on `[-2, 2]`: logarithms,
/// roots, quotients and general powers only see arguments `>= 1`.
pub fn random_expr(rng: &mut impl Rng, depth: u32) -> Expr {
    if depth == 0 || rng.gen_bool(0.2) {
        return match rng.gen_range(0..4) {
            0 | 1 => Expr::var(),
            2 => Expr::constant(rational(rng, 9, 4)),
            _ => Expr::pi(),
        };
    }
    let sub = |rng: &mut _| random_expr(rng, depth - 1);
    // 1 + u^2 >= 1
    let positive = |u: Expr| Expr::add(Expr::constant(1), Expr::pow(u, Expr::constant(2)));
    // keeps exp arguments within [-1, 1]
    let bounded = |u: Expr| Expr::func(Transcendental::Sin, u);
    match rng.gen_range(0..11) {
        0 => Expr::add(sub(rng), sub(rng)),
        1 => Expr::sub(sub(rng), sub(rng)),
        2 => Expr::mul(sub(rng), sub(rng)),
        3 => Expr::div(sub(rng), positive(sub(rng))),
        4 => Expr::pow(sub(rng), Expr::constant(rng.gen_range(2..=3))),
        5 => Expr::pow(positive(sub(rng)), bounded(sub(rng))),
        6 => Expr::neg(sub(rng)),
        7 => Expr::func(Transcendental::Exp, bounded(sub(rng))),
        8 => Expr::func(Transcendental::Sin, sub(rng)),
        9 => Expr::func(Transcendental::Ln, positive(sub(rng))),
        _ => Expr::func(Transcendental::Sqrt, positive(sub(rng))),
    }
}

/// Central difference `(f(x+h) - f(x-h)) / 2h`.
pub fn central_difference(e: &Expr, x: &Real, h: &Real, ctx: &NumericContext) -> Real {
    let up = e.evaluate(&(x + h), ctx).unwrap();
    let down = e.evaluate(&(x - h), ctx).unwrap();
    (up - down).checked_div(&(ctx.int(2) * h)).unwrap()
}

/// Fourth-order central difference
/// `(-f(x+2h) + 8f(x+h) - 8f(x-h) + f(x-2h)) / 12h`.
pub fn central_difference_4(e: &Expr, x: &Real, h: &Real, ctx: &NumericContext) -> Real {
    let at = |k: i64| e.evaluate(&(x + ctx.int(k) * h), ctx).unwrap();
    let num = ctx.int(8) * (at(1) - at(-1)) - (at(2) - at(-2));
    num.checked_div(&(ctx.int(12) * h)).unwrap()
}

/// `F_n(t)` summed term by term.
pub fn order_polynomial(s: u32, n: u32, t: &Real, ctx: &NumericContext) -> Real {
    let mut power = ctx.one();
    let mut sum = ctx.zero();
    for _ in 0..=n {
        sum = sum + &power;
        power = power * t;
    }
    power - ctx.int(s.into()) * sum
}
