use std::fs;
use std::path::Path;

use gumball::exactnum::Rat;
use gumball::lemmas::{self, CertifiedVerdict, Status};
use gumball::report::{exact, interval, Report, Verdict};
use gumball::search::{self, Checkpoint, SearchOptions, SearchReport};
use gumball::selftest::{self, SelftestOptions};
use gumball::{Error, Result};
use serde_json::{json, Value};

use crate::config::{Command, GeneralArgs};

/// The four points reported when `check-lemma3` gets none.
pub const DEFAULT_LEMMA3_POINTS: [(u64, u64); 4] = [(100, 12), (128, 64), (1000, 12), (1000, 500)];

pub fn execute(command: &Command, tol: &Rat) -> Result<Report> {
    match command {
        Command::VerifyIid { n_min, n_max } => verify_iid(*n_min, *n_max),
        Command::VerifyGeneral(args) => verify_general(args),
        Command::ScanLemma4 {
            n_lo,
            n_hi,
            m_max,
            stride,
        } => scan_lemma4(*n_lo, *n_hi, *m_max, *stride),
        Command::CheckLemma3 { points } => check_lemma3(points),
        Command::CertifyLemma4Final {
            n,
            m_max,
            find_n_up_to,
        } => certify_final(*n, *m_max, *find_n_up_to, tol),
        Command::ProbeLemma4Monotone { n1, n2, m } => probe(*n1, *n2, *m, tol),
        Command::TailCheck {
            n_min,
            n_max,
            sweep_limit,
        } => tail_check(*n_min, *n_max, *sweep_limit),
        Command::MedianCheck { n_max } => median_check(*n_max),
        Command::Selftest {
            seed,
            cdf_cases,
            transport_cases,
        } => run_selftest(*seed, *cdf_cases, *transport_cases),
    }
}

fn range_check(lo: u64, hi: u64, what: &str) -> Result<()> {
    if lo > hi {
        return Err(Error::Domain(format!("{what}: empty range {lo}..={hi}")));
    }
    Ok(())
}

fn search_entry(r: &SearchReport) -> Value {
    json!({
        "n": r.n,
        "min_value": exact(&r.min_value),
        "argmin": r.argmin.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
        "conjecture_value": exact(&r.conjecture_value),
        "conjecture_holds": r.conjecture_holds,
        "argmin_unique": r.argmin_unique_at_conjecture,
        "complete": r.complete,
        "configs_evaluated": r.configs_evaluated,
        "configs_pruned": r.configs_pruned,
        "total_configs": r.total_configs,
    })
}

fn search_verdict(r: &SearchReport) -> Verdict {
    if !r.complete {
        Verdict::Incomplete
    } else if r.conjecture_holds && r.argmin_unique_at_conjecture {
        Verdict::Confirmed
    } else {
        Verdict::Refuted
    }
}

fn add_search_results(report: &mut Report, results: &[SearchReport]) {
    let mut verdict = Verdict::Confirmed;
    for r in results {
        let v = search_verdict(r);
        if v == Verdict::Refuted {
            report.violations.push(json!({
                "n": r.n,
                "min_value": exact(&r.min_value),
                "argmin": r.argmin.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
            }));
        }
        verdict = verdict.combine(v);
    }
    report.verdict = verdict;
    report.value("results", results.iter().map(search_entry).collect::<Vec<_>>());
}

fn verify_iid(n_min: u64, n_max: u64) -> Result<Report> {
    range_check(n_min, n_max, "verify-iid")?;
    if n_min < 2 {
        return Err(Error::Domain(format!("verify-iid needs n >= 2, got {n_min}")));
    }
    let mut report = Report::new("verify-iid");
    report.param("n_min", n_min).param("n_max", n_max);
    let results = (n_min..=n_max).map(lemmas::verify_iid).collect::<Result<Vec<_>>>()?;
    add_search_results(&mut report, &results);
    Ok(report)
}

pub fn read_checkpoint(path: &Path) -> Result<Checkpoint> {
    let text = fs::read_to_string(path)
        .map_err(|e| Error::Checkpoint(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Error::Checkpoint(format!("{}: {e}", path.display())))
}

pub fn write_checkpoint(path: &Path, cp: &Checkpoint) -> Result<()> {
    let text = serde_json::to_string_pretty(cp).expect("checkpoint is serializable");
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, text)
        .and_then(|_| fs::rename(&tmp, path))
        .map_err(|e| Error::Checkpoint(format!("{}: {e}", path.display())))
}

fn verify_general(args: &GeneralArgs) -> Result<Report> {
    let ns = args.range().map_err(Error::Domain)?;
    if ns.is_empty() {
        return Err(Error::Domain("verify-general: empty range".into()));
    }
    if ns.len() > 1 && (args.checkpoint.is_some() || args.max_units.is_some()) {
        return Err(Error::Domain(
            "--checkpoint and --max-units need a single --n".into(),
        ));
    }
    let mut report = Report::new("verify-general");
    report
        .param("n", &ns)
        .param("prune", !args.no_prune)
        .param("max_units", args.max_units)
        .param("batch_size", args.batch_size);
    let mut results = Vec::new();
    for &n in &ns {
        let resume = match (&args.checkpoint, args.resume) {
            (Some(path), true) => Some(read_checkpoint(path)?),
            _ => None,
        };
        let options = SearchOptions {
            prune: !args.no_prune,
            max_units: args.max_units,
            batch_size: args.batch_size,
            resume,
        };
        let result = search::verify_general_with(n, &options, |cp| match &args.checkpoint {
            Some(path) => write_checkpoint(path, cp),
            None => Ok(()),
        })?;
        results.push(result);
    }
    add_search_results(&mut report, &results);
    Ok(report)
}

fn scan_lemma4(n_lo: u64, n_hi: u64, m_max: u64, stride: u64) -> Result<Report> {
    let scan = lemmas::lemma4_scan(n_lo, n_hi, m_max, stride)?;
    let mut report = Report::new("scan-lemma4");
    report
        .param("n_lo", n_lo)
        .param("n_hi", n_hi)
        .param("m_max", m_max)
        .param("stride", stride);
    report
        .value("cells_checked", scan.cells_checked)
        .value("violation_count", scan.violations.len())
        .value("largest_failing_n", scan.largest_failing_n)
        .value("violations_cross_checked", scan.violations_cross_checked);
    for v in &scan.violations {
        report.violations.push(json!({
            "n": v.n,
            "m": v.m,
            "f_m": exact(&v.f_m),
            "f_next": exact(&v.f_next),
        }));
    }
    report.verdict = if scan.all_pass {
        Verdict::Confirmed
    } else {
        Verdict::Refuted
    };
    Ok(report)
}

fn check_lemma3(points: &[(u64, u64)]) -> Result<Report> {
    let points = if points.is_empty() {
        DEFAULT_LEMMA3_POINTS.to_vec()
    } else {
        points.to_vec()
    };
    let mut report = Report::new("check-lemma3");
    report.param("points", &points);
    let mut rows = Vec::new();
    for &(n, m) in &points {
        let margin = lemmas::lemma3_margin(n, m)?;
        let holds = !margin.is_negative();
        let row = json!({
            "n": n,
            "m": m,
            "f": exact(&(margin.clone() + Rat::new(3, 8)?)),
            "margin": exact(&margin),
            "holds": holds,
        });
        if !holds {
            report.violations.push(row.clone());
        }
        rows.push(row);
    }
    report.verdict = if report.violations.is_empty() {
        Verdict::Confirmed
    } else {
        Verdict::Refuted
    };
    report.value("points", rows);
    Ok(report)
}

fn verdict_entry(v: &CertifiedVerdict, m: u64) -> Value {
    json!({
        "m": m,
        "status": v.status,
        "lhs": interval(&v.lhs),
        "rhs": exact(&v.rhs),
        "margin": interval(&v.margin()),
    })
}

fn status_verdict(s: Status) -> Verdict {
    match s {
        Status::Proven => Verdict::Confirmed,
        Status::Disproven => Verdict::Refuted,
        Status::Inconclusive => Verdict::Inconclusive,
    }
}

fn certify_final(n: u64, m_max: u64, find_n_up_to: Option<u64>, tol: &Rat) -> Result<Report> {
    if m_max == 0 {
        return Err(Error::Domain("--m-max must be at least 1".into()));
    }
    let mut report = Report::new("certify-lemma4-final");
    report
        .param("n", n)
        .param("m_max", m_max)
        .param("tol", tol.to_string())
        .param("find_n_up_to", find_n_up_to);
    let mut verdict = Verdict::Confirmed;
    let mut finals = Vec::new();
    let mut limits = Vec::new();
    let mut thresholds = Vec::new();
    for m in 1..=m_max {
        let v = lemmas::lemma4_final_inequality(n, m, tol)?;
        verdict = verdict.combine(status_verdict(v.status));
        let entry = verdict_entry(&v, m);
        if v.status == Status::Disproven {
            report.violations.push(entry.clone());
        }
        finals.push(entry);
        limits.push(verdict_entry(&lemmas::lemma4_limit_inequality(m, tol)?, m));
        if let Some(limit) = find_n_up_to {
            let found = lemmas::lemma4_certifying_n(m, limit, tol)?;
            thresholds.push(json!({ "m": m, "smallest_certified_n": found }));
        }
    }
    report.verdict = verdict;
    report.value("final_inequality", finals);
    report.value("limit_inequality", limits);
    if find_n_up_to.is_some() {
        report.value("certifying_n", thresholds);
    }
    Ok(report)
}

fn probe(n1: u64, n2: u64, m: u64, tol: &Rat) -> Result<Report> {
    let p = lemmas::lemma4_n_monotonicity_probe(n1, n2, m, tol)?;
    let mut report = Report::new("probe-lemma4-monotone");
    report
        .param("n1", n1)
        .param("n2", n2)
        .param("m", m)
        .param("tol", tol.to_string());
    report
        .value("r_decreases", p.r_decreases)
        .value("lambda1", interval(&p.lambda1))
        .value("lambda2", interval(&p.lambda2))
        .value("lambda_increases", p.lambda_increases)
        .value("detail", &p.detail);
    report.verdict = if p.holds {
        Verdict::Confirmed
    } else if p.r_decreases && p.lambda2.hi() > p.lambda1.lo() {
        Verdict::Inconclusive
    } else {
        report.violations.push(json!({ "n1": n1, "n2": n2, "m": m, "detail": p.detail }));
        Verdict::Refuted
    };
    Ok(report)
}

fn tail_check(n_min: u64, n_max: u64, sweep_limit: u64) -> Result<Report> {
    range_check(n_min, n_max, "tail-check")?;
    let sweep = lemmas::theorem_tail_sweep(n_min, n_max)?;
    let smallest = lemmas::smallest_tail_n(sweep_limit)?;
    let mut report = Report::new("tail-check");
    report
        .param("n_min", n_min)
        .param("n_max", n_max)
        .param("sweep_limit", sweep_limit);
    report
        .value("checked", n_max - n_min + 1)
        .value("all_hold", sweep.all_hold)
        .value("smallest_n", smallest);
    for n in &sweep.failures {
        report.violations.push(json!({ "n": n }));
    }
    report.verdict = if sweep.all_hold {
        Verdict::Confirmed
    } else {
        Verdict::Refuted
    };
    Ok(report)
}

fn median_check(n_max: u64) -> Result<Report> {
    let (cells, failures) = lemmas::median_sweep(n_max)?;
    let mut report = Report::new("median-check");
    report.param("n_max", n_max);
    report.value("cells_checked", cells);
    for (n, m) in &failures {
        report.violations.push(json!({ "n": n, "m": m }));
    }
    report.verdict = if failures.is_empty() {
        Verdict::Confirmed
    } else {
        Verdict::Refuted
    };
    Ok(report)
}

fn run_selftest(seed: u64, cdf_cases: u64, transport_cases: u64) -> Result<Report> {
    let options = SelftestOptions {
        seed,
        cdf_cases,
        transport_cases,
        ..SelftestOptions::default()
    };
    let suites = selftest::run_all(&options)?;
    let mut report = Report::new("selftest");
    report
        .param("seed", seed)
        .param("cdf_cases", cdf_cases)
        .param("transport_cases", transport_cases);
    for s in &suites {
        if !s.passed() {
            report.violations.push(serde_json::to_value(s).expect("serializable"));
        }
    }
    report.verdict = if report.violations.is_empty() {
        Verdict::Confirmed
    } else {
        Verdict::Refuted
    };
    report.value("suites", &suites);
    Ok(report)
}
