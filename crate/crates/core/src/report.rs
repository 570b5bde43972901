//! Machine-readable run reports.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::exactnum::{Rat, RatInterval};

pub const REPORT_SCHEMA_VERSION: u32 = 1;

/// Digits kept in the decimal rendering next to each exact value.
pub const DECIMAL_DIGITS: u32 = 12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    Confirmed,
    Refuted,
    Inconclusive,
    Incomplete,
}

impl Verdict {
    pub fn exit_code(self) -> i32 {
        match self {
            Verdict::Confirmed => 0,
            Verdict::Refuted => 1,
            Verdict::Inconclusive | Verdict::Incomplete => 2,
        }
    }

    /// Worst of two verdicts: refuted beats incomplete beats inconclusive.
    pub fn combine(self, other: Verdict) -> Verdict {
        fn rank(v: Verdict) -> u8 {
            match v {
                Verdict::Confirmed => 0,
                Verdict::Inconclusive => 1,
                Verdict::Incomplete => 2,
                Verdict::Refuted => 3,
            }
        }
        if rank(other) > rank(self) {
            other
        } else {
            self
        }
    }
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Verdict::Confirmed => "Confirmed",
            Verdict::Refuted => "Refuted",
            Verdict::Inconclusive => "Inconclusive",
            Verdict::Incomplete => "Incomplete",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema_version: u32,
    pub command: String,
    pub params: BTreeMap<String, Value>,
    pub verdict: Verdict,
    pub values: BTreeMap<String, Value>,
    pub violations: Vec<Value>,
    pub timing_ms: u64,
}

impl Report {
    pub fn new(command: &str) -> Self {
        Report {
            schema_version: REPORT_SCHEMA_VERSION,
            command: command.to_string(),
            params: BTreeMap::new(),
            verdict: Verdict::Confirmed,
            values: BTreeMap::new(),
            violations: Vec::new(),
            timing_ms: 0,
        }
    }

    pub fn param(&mut self, key: &str, value: impl Serialize) -> &mut Self {
        self.params.insert(key.to_string(), to_value(value));
        self
    }

    pub fn value(&mut self, key: &str, value: impl Serialize) -> &mut Self {
        self.values.insert(key.to_string(), to_value(value));
        self
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report is serializable")
    }

    pub fn from_json(s: &str) -> serde_json::Result<Self> {
        serde_json::from_str(s)
    }
}

fn to_value(v: impl Serialize) -> Value {
    serde_json::to_value(v).expect("report values are serializable")
}

/// `{"exact": "num/den", "approx": "0.123..."}`.
pub fn exact(x: &Rat) -> Value {
    json!({ "exact": x.to_string(), "approx": x.to_decimal(DECIMAL_DIGITS) })
}

pub fn interval(iv: &RatInterval) -> Value {
    json!({ "lo": exact(iv.lo()), "hi": exact(iv.hi()) })
}

/// Flattens nested values into `(dotted.key, exact, approx)` rows; scalars
/// put their JSON text in `exact` and leave `approx` empty.
pub fn flatten(values: &BTreeMap<String, Value>) -> Vec<(String, String, String)> {
    let mut rows = Vec::new();
    for (k, v) in values {
        flatten_into(k, v, &mut rows);
    }
    rows
}

fn flatten_into(key: &str, v: &Value, rows: &mut Vec<(String, String, String)>) {
    match v {
        Value::Object(map) => {
            if let (Some(Value::String(e)), Some(Value::String(a))) = (map.get("exact"), map.get("approx")) {
                rows.push((key.to_string(), e.clone(), a.clone()));
                return;
            }
            for (k, inner) in map {
                flatten_into(&format!("{key}.{k}"), inner, rows);
            }
        }
        Value::Array(items) => {
            for (i, inner) in items.iter().enumerate() {
                flatten_into(&format!("{key}[{i}]"), inner, rows);
            }
        }
        Value::String(s) => rows.push((key.to_string(), s.clone(), String::new())),
        other => rows.push((key.to_string(), other.to_string(), String::new())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roundtrip_preserves_everything() {
        let mut r = Report::new("verify-iid");
        r.param("n_min", 2).param("n_max", 5);
        r.value("min", exact(&Rat::new(16, 81).unwrap()));
        r.value("lambda", interval(&RatInterval::new(Rat::one(), Rat::from(2u64)).unwrap()));
        r.violations.push(json!({ "n": 4, "m": 1 }));
        r.verdict = Verdict::Refuted;
        r.timing_ms = 17;
        let back = Report::from_json(&r.to_json()).unwrap();
        assert_eq!(back, r);
    }

    #[test]
    fn exact_value_shape() {
        let v = exact(&Rat::new(1, 3).unwrap());
        assert_eq!(v["exact"], "1/3");
        assert_eq!(v["approx"], "0.333333333333");
    }

    #[test]
    fn flatten_rows() {
        let mut r = Report::new("x");
        r.value("a", exact(&Rat::new(1, 2).unwrap()));
        r.value("b", json!([{ "c": 1 }, "s"]));
        let rows = flatten(&r.values);
        assert_eq!(
            rows,
            vec![
                ("a".into(), "1/2".into(), "0.5".into()),
                ("b[0].c".into(), "1".into(), String::new()),
                ("b[1]".into(), "s".into(), String::new()),
            ]
        );
    }

    #[test]
    fn combine_is_worst() {
        use Verdict::*;
        assert_eq!(Confirmed.combine(Inconclusive), Inconclusive);
        assert_eq!(Incomplete.combine(Inconclusive), Incomplete);
        assert_eq!(Refuted.combine(Incomplete), Refuted);
        assert_eq!(Confirmed.combine(Confirmed), Confirmed);
    }
}
