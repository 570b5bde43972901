//! Acceptance run: one PASS/FAIL line per criterion.
//!
//! Every comparison is exact unless a tolerance constant below says
//! otherwise. The process exits nonzero only when a criterion disagrees
//! with `EXPECTED_FAIL`.

use std::time::{Duration, Instant};

use gumball::binom::f_direct;
use gumball::exactnum::Rat;
use gumball::lemmas::theorem_tail_check_expanded;
use gumball::report::{Report, Verdict};
use gumball_cli::run_from_args;
use num_bigint::BigUint;
use serde_json::Value;

/// Enclosure width for the certified inequality.
const CERTIFY_TOL: &str = "1e-30";

const IID_BUDGET: Duration = Duration::from_secs(5 * 60);
const GENERAL_BUDGET: Duration = Duration::from_secs(30 * 60);
const SCAN_BUDGET: Duration = Duration::from_secs(60 * 60);
const SCAN_STRIDE_BUDGET: Duration = Duration::from_secs(2 * 60);

/// Criteria known to fail as stated; each one still runs in full.
const EXPECTED_FAIL: &[u32] = &[5];

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn cli(args: &[&str]) -> (i32, Report) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("gumball").chain(args.iter().copied());
    let code = run_from_args(argv, &mut out, &mut err);
    let text = String::from_utf8(out).expect("utf-8");
    let report = Report::from_json(&text).unwrap_or_else(|e| {
        panic!("{args:?}: {e}\n{}", String::from_utf8_lossy(&err))
    });
    (code, report)
}

fn exact_of(v: &Value) -> &str {
    v["exact"].as_str().expect("exact field")
}

/// `(n / (n + 1))^n` from integer powers.
fn iid_minimum(n: u64) -> Rat {
    Rat::new(BigUint::from(n).pow(n as u32), BigUint::from(n + 1).pow(n as u32)).expect("nonzero")
}

fn all_equal_label(n: u64) -> String {
    let items: Vec<String> = (0..n).map(|_| (n + 1).to_string()).collect();
    format!("{{{}}}", items.join(","))
}

fn check_search_entries(results: &[Value], first_n: u64) -> Result<(), String> {
    for (i, r) in results.iter().enumerate() {
        let n = first_n + i as u64;
        if r["n"] != n {
            return Err(format!("entry {i} is for n = {}", r["n"]));
        }
        if exact_of(&r["min_value"]) != iid_minimum(n).to_string() {
            return Err(format!("n = {n}: min {}", exact_of(&r["min_value"])));
        }
        let argmin: Vec<&str> = r["argmin"]
            .as_array()
            .expect("argmin")
            .iter()
            .map(|c| c.as_str().expect("label"))
            .collect();
        if argmin != [all_equal_label(n).as_str()] {
            return Err(format!("n = {n}: argmin {argmin:?}"));
        }
        if r["complete"] != true {
            return Err(format!("n = {n}: incomplete"));
        }
    }
    Ok(())
}

fn criterion_1() -> Outcome {
    let started = Instant::now();
    let (code, r) = cli(&["verify-iid", "--n-min", "2", "--n-max", "99"]);
    let elapsed = started.elapsed();
    let results = r.values["results"].as_array().expect("results");
    if let Err(e) = check_search_entries(results, 2) {
        return outcome(false, e);
    }
    let pass = code == 0 && results.len() == 98 && elapsed < IID_BUDGET;
    outcome(
        pass,
        format!("98 values of n, unique minimizer j = n + 1, exit {code}, {elapsed:.2?}"),
    )
}

fn criterion_2() -> Outcome {
    let started = Instant::now();
    let mut pruned = Vec::new();
    for n in 2..=10u64 {
        let (code, r) = cli(&["verify-general", "--n", &n.to_string()]);
        let results = r.values["results"].as_array().expect("results").clone();
        if let Err(e) = check_search_entries(&results, n) {
            return outcome(false, e);
        }
        if code != 0 {
            return outcome(false, format!("n = {n}: exit {code}"));
        }
        pruned.push(results[0].clone());
    }
    let elapsed = started.elapsed();
    for n in 2..=8u64 {
        let (code, r) = cli(&["verify-general", "--n", &n.to_string(), "--no-prune"]);
        let full = &r.values["results"][0];
        let with = &pruned[(n - 2) as usize];
        if code != 0
            || full["min_value"] != with["min_value"]
            || full["argmin"] != with["argmin"]
            || full["configs_evaluated"] != full["total_configs"]
        {
            return outcome(false, format!("n = {n}: exhaustive run differs"));
        }
    }
    outcome(
        elapsed < GENERAL_BUDGET,
        format!("n = 2..=10 pruned in {elapsed:.2?}; exhaustive agrees for n <= 8"),
    )
}

fn criterion_3() -> Outcome {
    let started = Instant::now();
    let (code, full) = cli(&["scan-lemma4", "--n-lo", "100", "--n-hi", "3200", "--m-max", "11"]);
    let full_time = started.elapsed();
    let started = Instant::now();
    let (stride_code, strided) = cli(&[
        "scan-lemma4", "--n-lo", "100", "--n-hi", "3200", "--m-max", "11", "--stride", "37",
    ]);
    let stride_time = started.elapsed();
    // spot cells re-derived by term-by-term summation
    let spots_ok = [(100u64, 1u64), (100, 10), (1234, 5), (3199, 10)]
        .iter()
        .all(|&(n, m)| f_direct(n, m).unwrap() < f_direct(n, m + 1).unwrap());
    let pass = code == 0
        && full.violations.is_empty()
        && full.values["cells_checked"] == 3100 * 10
        && stride_code == 0
        && strided.violations.is_empty()
        && spots_ok
        && full_time < SCAN_BUDGET
        && stride_time < SCAN_STRIDE_BUDGET;
    outcome(
        pass,
        format!(
            "{} cells, {} violations, {full_time:.2?}; stride 37: {} cells in {stride_time:.2?}",
            full.values["cells_checked"],
            full.violations.len(),
            strided.values["cells_checked"]
        ),
    )
}

fn criterion_4() -> Outcome {
    let (code, r) = cli(&["scan-lemma4", "--n-lo", "3", "--n-hi", "100", "--m-max", "11"]);
    let reported: Vec<(u64, u64)> = r
        .violations
        .iter()
        .map(|v| (v["n"].as_u64().unwrap(), v["m"].as_u64().unwrap()))
        .collect();
    let mut oracle = Vec::new();
    for n in 3..100u64 {
        for m in 1..11u64.min(n) {
            if f_direct(n, m).unwrap() >= f_direct(n, m + 1).unwrap() {
                oracle.push((n, m));
            }
        }
    }
    let largest = r.values["largest_failing_n"].as_u64();
    let known = r.violations.iter().any(|v| {
        v["n"] == 4 && v["m"] == 1 && exact_of(&v["f_m"]) == "81/256" && exact_of(&v["f_next"]) == "5/16"
    });
    let pass = code == 1
        && reported == oracle
        && largest == oracle.iter().map(|c| c.0).max()
        && largest.is_some_and(|n| n < 99)
        && known;
    outcome(
        pass,
        format!(
            "{} violations, largest failing n = {largest:?}, f(4,2) = 5/16 < 81/256 = f(4,1) reported: {known}",
            reported.len()
        ),
    )
}

fn criterion_5() -> Outcome {
    let (code, r) = cli(&["certify-lemma4-final", "--n", "3200", "--m-max", "11", "--tol", CERTIFY_TOL]);
    let statuses: Vec<String> = r.values["final_inequality"]
        .as_array()
        .expect("rows")
        .iter()
        .map(|row| format!("m={}:{}", row["m"], row["status"].as_str().unwrap()))
        .collect();
    let all_proven = statuses.len() == 11 && statuses.iter().all(|s| s.ends_with(":Proven"));
    let pass = code == 0 && r.verdict == Verdict::Confirmed && all_proven;
    let mut detail = format!("exit {code}, {}", statuses.join(" "));
    if !pass {
        // diagnostic only: slack of failing rows and where certification starts
        let (_, diag) = cli(&[
            "certify-lemma4-final", "--n", "3200", "--m-max", "11", "--tol", CERTIFY_TOL,
            "--find-n-up-to", "20000",
        ]);
        for v in &diag.violations {
            detail.push_str(&format!("; m={} slack ~{}", v["m"], v["margin"]["hi"]["approx"].as_str().unwrap()));
        }
        let firsts: Vec<String> = diag.values["certifying_n"]
            .as_array()
            .expect("rows")
            .iter()
            .filter(|row| row["m"].as_u64().unwrap() >= 8)
            .map(|row| format!("m={}:n>={}", row["m"], row["smallest_certified_n"]))
            .collect();
        detail.push_str(&format!("; first certified {}", firsts.join(" ")));
    }
    outcome(pass, detail)
}

fn criterion_6() -> Outcome {
    let (code, r) = cli(&[
        "check-lemma3", "--point", "100,12", "--point", "128,64", "--point", "1000,12", "--point",
        "1000,500",
    ]);
    let bound = Rat::new(3, 8).unwrap();
    let oracle_ok = [(100u64, 12u64), (128, 64), (1000, 12), (1000, 500)]
        .iter()
        .all(|&(n, m)| f_direct(n, m).unwrap() >= bound);
    let approx: Vec<String> = r.values["points"]
        .as_array()
        .expect("points")
        .iter()
        .map(|p| format!("f({},{})~{}", p["n"], p["m"], p["f"]["approx"].as_str().unwrap()))
        .collect();
    outcome(code == 0 && oracle_ok, approx.join(" "))
}

fn criterion_7() -> Outcome {
    let (code, r) = cli(&["tail-check", "--n-min", "100", "--n-max", "5000", "--sweep-limit", "100"]);
    let smallest = r.values["smallest_n"].as_u64();
    let oracle_ok = [100u64, 101, 997, 2500, 5000]
        .iter()
        .all(|&n| theorem_tail_check_expanded(n).unwrap());
    let boundary_ok = smallest.is_some_and(|s| {
        (3..s).all(|n| !theorem_tail_check_expanded(n).unwrap()) && theorem_tail_check_expanded(s).unwrap()
    });
    outcome(
        code == 0 && r.values["all_hold"] == true && oracle_ok && boundary_ok,
        format!("4901 values hold: {}, smallest n = {smallest:?}", r.values["all_hold"]),
    )
}

fn criterion_8() -> Outcome {
    let (code, r) = cli(&["selftest"]);
    let suites = r.values["suites"].as_array().expect("suites");
    let cases = |name: &str| {
        suites
            .iter()
            .find(|s| s["name"] == name)
            .map(|s| (s["cases"].as_u64().unwrap(), s["failures"].as_u64().unwrap()))
            .unwrap_or((0, u64::MAX))
    };
    let expected = [
        ("cdf-monotone-in-p", 1000),
        ("far-atom-transport", 500),
        ("median-equals-mean", 200 * 201 / 2),
        ("iid-objective-vs-convolution", (2..=12).sum::<u64>()),
        ("exp-enclosure-reference", 12),
    ];
    let mut pass = code == 0 && suites.len() == expected.len();
    let mut parts = Vec::new();
    for (name, at_least) in expected {
        let (n, failed) = cases(name);
        pass &= n >= at_least && failed == 0;
        parts.push(format!("{name} {n}/{failed}"));
    }
    outcome(pass, format!("cases/failures: {}", parts.join(", ")))
}

fn main() {
    let criteria: [(u32, fn() -> Outcome); 8] = [
        (1, criterion_1),
        (2, criterion_2),
        (3, criterion_3),
        (4, criterion_4),
        (5, criterion_5),
        (6, criterion_6),
        (7, criterion_7),
        (8, criterion_8),
    ];
    let mut unexpected = Vec::new();
    for (id, check) in criteria {
        let o = check();
        let tag = if o.pass { "PASS" } else { "FAIL" };
        println!("{tag} criterion {id}: {}", o.detail);
        if o.pass == EXPECTED_FAIL.contains(&id) {
            unexpected.push(id);
        }
    }
    if unexpected.is_empty() {
        println!("acceptance: results match expectations (expected failures: {EXPECTED_FAIL:?})");
    } else {
        println!("acceptance: unexpected outcome for criteria {unexpected:?}");
        std::process::exit(1);
    }
}
