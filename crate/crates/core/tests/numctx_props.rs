use nsroot::NumericContext;
use proptest::prelude::*;
use rug::Rational;

fn ctx(digits: u32) -> NumericContext {
    NumericContext::new(digits).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn pythagorean_identity(num in -10_000i64..=10_000) {
        let c = ctx(120);
        let x = c.ratio(num, 1000).unwrap();
        let s = x.sin().unwrap();
        let k = x.cos().unwrap();
        let sum = &s * &s + &k * &k;
        prop_assert!((sum - c.one()).abs() < c.pow10(-117));
    }

    #[test]
    fn dyadic_rationals_round_trip(a in -1_000_000i64..1_000_000, b in -1_000_000i64..1_000_000,
                                   sa in 0u32..20, sb in 0u32..20) {
        // p / 2^k is exactly representable in binary
        let c = ctx(60);
        let ra = Rational::from((a, 1i64 << sa));
        let rb = Rational::from((b, 1i64 << sb));
        let (x, y) = (c.rational(&ra), c.rational(&rb));
        prop_assert_eq!((&x + &y).to_rational(), Rational::from(&ra + &rb));
        prop_assert_eq!((&x - &y).to_rational(), Rational::from(&ra - &rb));
        prop_assert_eq!((&x * &y).to_rational(), Rational::from(&ra * &rb));
    }

    #[test]
    fn doubling_precision_refines(num in 1i64..=5_000, digits in 30u32..=90) {
        let low = ctx(digits);
        let high = ctx(2 * digits);
        let x_low = low.ratio(num, 997).unwrap();
        let x_high = high.ratio(num, 997).unwrap();
        let pairs = [
            (x_low.exp().unwrap(), x_high.exp().unwrap()),
            (x_low.ln().unwrap(), x_high.ln().unwrap()),
            (x_low.sin().unwrap(), x_high.sin().unwrap()),
            (x_low.sqrt().unwrap(), x_high.sqrt().unwrap()),
            (low.one().checked_div(&x_low).unwrap(), high.one().checked_div(&x_high).unwrap()),
        ];
        for (a, b) in pairs {
            let diff = high.rational(&a.to_rational()) - b.clone();
            let scale = if b.abs() > high.one() { b.abs() } else { high.one() };
            prop_assert!(diff.abs() <= high.pow10(5 - digits as i32) * scale);
        }
    }
}

#[test]
fn table_of_known_values() {
    let c = ctx(50);
    let third = c.one().checked_div(&c.int(3)).unwrap();
    assert_eq!(third.to_fixed_string(50), format!("0.{}", "3".repeat(50)));
    assert!((c.int(2) - c.int(2)).is_zero());
    assert_eq!(c.int(2).sqrt().unwrap().to_fixed_string(10), "1.4142135624");
    assert_eq!(c.zero().exp().unwrap(), c.one());
    let half_pi = c.pi() * c.ratio(1, 2).unwrap();
    assert!((half_pi.sin().unwrap() - c.one()).abs() < c.pow10(-48));
    assert!(c.pi().sin().unwrap().abs() < c.pow10(-48));
    assert!((c.pi().cos().unwrap() + c.one()).abs() < c.pow10(-48));
    assert_eq!(c.pi().to_fixed_string(9), "3.141592654");
}
