use std::fmt::Write as _;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    ReportOnly,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::ReportOnly => "report-only",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckRecord {
    pub id: String,
    pub description: String,
    pub paper_ref: String,
    pub lhs: f64,
    pub rhs: f64,
    pub abs_err: f64,
    pub rel_err: f64,
    pub tol: f64,
    pub status: Status,
    pub runtime_ms: f64,
}

/// `abs_err = |lhs - rhs|` unless the check supplies its own distance (for
/// complex or matrix comparisons); `rel_err` divides by `|rhs|` and falls
/// back to `abs_err` when `rhs = 0`.
pub fn errors(lhs: f64, rhs: f64, abs: Option<f64>) -> (f64, f64) {
    let abs_err = abs.unwrap_or((lhs - rhs).abs());
    let rel_err = if rhs != 0.0 { abs_err / rhs.abs() } else { abs_err };
    (abs_err, rel_err)
}

pub fn passes(abs_err: f64, rel_err: f64, tol: f64) -> bool {
    abs_err <= tol || rel_err <= tol
}

/// 17 significant digits; non-finite values become `null`.
pub fn fmt_num(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        "null".to_string()
    }
}

fn fmt_str(s: &str) -> String {
    serde_json::to_string(s).expect("strings always serialize")
}

pub fn to_json(records: &[CheckRecord]) -> String {
    let mut out = String::from("[\n");
    for (i, r) in records.iter().enumerate() {
        let _ = write!(
            out,
            "  {{\"id\": {}, \"description\": {}, \"paper_ref\": {}, \"lhs\": {}, \"rhs\": {}, \
             \"abs_err\": {}, \"rel_err\": {}, \"tol\": {}, \"status\": {}, \"runtime_ms\": {}}}",
            fmt_str(&r.id),
            fmt_str(&r.description),
            fmt_str(&r.paper_ref),
            fmt_num(r.lhs),
            fmt_num(r.rhs),
            fmt_num(r.abs_err),
            fmt_num(r.rel_err),
            fmt_num(r.tol),
            fmt_str(r.status.as_str()),
            fmt_num(r.runtime_ms),
        );
        out.push_str(if i + 1 < records.len() { ",\n" } else { "\n" });
    }
    out.push_str("]\n");
    out
}
