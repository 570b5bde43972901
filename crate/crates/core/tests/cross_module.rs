use gumball::binom::{binom_cdf, f, f_direct, g};
use gumball::exactnum::Rat;
use gumball::lemmas::{lemma4_scan, verify_iid};
use gumball::search::{eval_config, verify_general, Config};

#[test]
fn general_minimum_never_exceeds_iid_minimum() {
    for n in 2..=9u32 {
        let general = verify_general(n, true).unwrap();
        let iid = verify_iid(n as u64).unwrap();
        assert!(general.min_value <= iid.min_value);
        assert_eq!(general.min_value, iid.min_value, "n = {n}");
        assert_eq!(general.argmin, iid.argmin);
    }
}

#[test]
fn scan_agrees_with_direct_sums() {
    let scan = lemma4_scan(3, 40, 6, 1).unwrap();
    let mut expected = Vec::new();
    for n in 3..40u64 {
        for m in 1..6u64.min(n) {
            if f_direct(n, m).unwrap() >= f_direct(n, m + 1).unwrap() {
                expected.push((n, m));
            }
        }
    }
    let got: Vec<(u64, u64)> = scan.violations.iter().map(|v| (v.n, v.m)).collect();
    assert_eq!(got, expected);
}

#[test]
fn all_equal_value_is_a_binomial_cdf() {
    // with every machine two-point on {0, n/m}, P(sum <= n) = P(Bin(n, m/n) <= m)
    for (n, j) in [(6u32, 2u32), (6, 3), (8, 4), (10, 5)] {
        let m = n / j;
        let value = eval_config(&Config::all_equal(n, j).unwrap());
        assert_eq!(value, g(n as u64, j as u64).unwrap());
        let x = Rat::new(1, j).unwrap();
        assert_eq!(x, Rat::new(m, n).unwrap());
        assert_eq!(value, binom_cdf(n as u64, &x, m as u64).unwrap());
        assert!(f(n as u64, m as u64).unwrap() < value);
    }
}
