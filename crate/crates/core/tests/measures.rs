use cfmetric_core::cf::{cylinder_length, rational_to_f64, Word};
use cfmetric_core::measure::{
    an_bound, hn_measures, jk_measure, jk_tilde_measure, product_tail_measure, series_partial, HVariant,
};
use cfmetric_core::phi::PhiFamily;
use num_bigint::BigInt;
use num_rational::BigRational;

fn w(q: &[u64]) -> Word {
    Word::from_u64s(q).unwrap()
}

fn int(l: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(l))
}

fn rat(p: i64, q: i64) -> BigRational {
    BigRational::new(BigInt::from(p), BigInt::from(q))
}

/// Exact complement sum `|I(w)| - sum_{ab<l} |I(w a b)|`.
fn product_tail_oracle(prefix: &[u64], l: u64) -> BigRational {
    let mut total = cylinder_length(&w(prefix));
    for a in 1..l {
        for b in (1..).take_while(|b| a * b < l) {
            let mut q = prefix.to_vec();
            q.extend([a, b]);
            total -= cylinder_length(&w(&q));
        }
    }
    total
}

#[test]
fn product_tail_is_exact() {
    for (prefix, l) in [(&[][..], 10u64), (&[1][..], 100), (&[4, 1, 7][..], 37)] {
        assert_eq!(product_tail_measure(&w(prefix), &int(l as i64)).unwrap(), product_tail_oracle(prefix, l));
    }
    assert_eq!(
        product_tail_measure(&w(&[]), &int(10)).unwrap(),
        rat(7_797_677, 23_279_256)
    );
    // Non-integer threshold 7/2 behaves like 4.
    assert_eq!(
        product_tail_measure(&w(&[2, 3]), &rat(7, 2)).unwrap(),
        rat(33_549_569, 3_434_361_840)
    );
}

// Oracle values: digamma closed forms over the first free quotient and an
// Euler-Maclaurin tail over the second, in mpmath at 40 digits.
#[test]
fn certified_brackets_contain_oracle_values() {
    let cases: [(&str, Box<dyn Fn() -> _>, f64); 6] = [
        ("jk [3] l=50 [2]", Box::new(|| jk_measure(&w(&[3]), &w(&[2]), &int(50), 1e-9)), 0.001_594_320_660_947_22),
        (
            "jk [1 2] l=1000 [1]",
            Box::new(|| jk_measure(&w(&[1, 2]), &w(&[1]), &int(1000), 1e-9)),
            0.000_381_743_710_675_976,
        ),
        ("H [2] l=100", Box::new(|| hn_measures(&w(&[2]), &int(100), 1e-9, HVariant::H)), 0.003_895_100_556_544_82),
        (
            "H~ [2] l=100",
            Box::new(|| hn_measures(&w(&[2]), &int(100), 1e-9, HVariant::HTilde)),
            0.007_404_730_711_066_16,
        ),
        ("H [] l=1000", Box::new(|| hn_measures(&w(&[]), &int(1000), 1e-9, HVariant::H)), 0.002_402_137_762_311_64),
        (
            "H~ [] l=1000",
            Box::new(|| hn_measures(&w(&[]), &int(1000), 1e-9, HVariant::HTilde)),
            0.008_756_072_028_402_78,
        ),
    ];
    for (name, f, want) in cases {
        let m = f().unwrap();
        let (lo, hi) = (m.lower_f64(), m.upper_f64());
        let slack = 1e-14 * want;
        assert!(lo - slack <= want && want <= hi + slack, "{name}: [{lo}, {hi}] vs {want}");
        assert!(m.relative_width() <= 1e-9, "{name}: width {}", m.relative_width());
    }
}

#[test]
fn jk_and_complement_partition_the_cylinder() {
    let prefix = w(&[2, 5]);
    let whole = cylinder_length(&prefix);
    for l in [7i64, 60, 450] {
        let big = jk_measure(&prefix, &w(&[]), &int(l), 1e-10).unwrap();
        let small = jk_tilde_measure(&prefix, &w(&[]), &int(l)).unwrap();
        assert!(big.add(&small).contains(&whole), "l={l}");
        assert!(big.relative_width() <= 1e-10);
        // A fixed suffix only shrinks both parts.
        let big3 = jk_measure(&prefix, &w(&[3]), &int(l), 1e-10).unwrap();
        let small3 = jk_tilde_measure(&prefix, &w(&[3]), &int(l)).unwrap();
        assert!(big3.upper < big.lower && small3.upper < small.lower);
    }
}

#[test]
fn tail_measure_shapes() {
    let prefix = w(&[1, 3]);
    let len = rational_to_f64(&cylinder_length(&prefix));
    for l in [100i64, 1_000, 10_000, 100_000] {
        let lf = l as f64;
        let p = rational_to_f64(&product_tail_measure(&prefix, &int(l)).unwrap());
        let shape = lf * p / len - lf.ln();
        assert!((-5.0..=5.0).contains(&shape), "product l={l}: {shape}");

        let h = hn_measures(&prefix, &int(l), 1e-7, HVariant::H).unwrap();
        assert!(h.relative_width() <= 1e-6);
        let r = lf * h.mid_f64() / len;
        assert!((0.05..=20.0).contains(&r), "H l={l}: {r}");

        let ht = hn_measures(&prefix, &int(l), 1e-7, HVariant::HTilde).unwrap();
        assert!(ht.relative_width() <= 1e-6);
        let r = lf / lf.ln() * ht.mid_f64() / len;
        assert!((0.05..=20.0).contains(&r), "H~ l={l}: {r}");
    }
}

#[test]
fn bound_and_series() {
    assert!((an_bound(100, 100.0).unwrap() - 0.222_076_2).abs() < 1e-6);
    assert!(an_bound(10, 1.0).is_err());
    let ones = vec![1.0; 50];
    let s = series_partial(&ones).unwrap();
    assert_eq!(s.total.len(), 50);
    assert!((s.last() - 50.0).abs() < 1e-12);
    let phi = PhiFamily::Power { a: 2.0 }.tabulate(2000);
    let s = series_partial(&phi).unwrap();
    assert!(s.last() < 10.0);
    assert!(series_partial(&[2.0, 1.5]).is_err());
}
