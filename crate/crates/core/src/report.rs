//! CSV and JSON serialization of estimator output.
//!
//! Numbers are written with 12 significant digits and a `.` separator,
//! independent of locale, so equal inputs give byte-identical files.

use crate::compare::{Residual, StaircaseRow};
use crate::estimate::EstimateReport;
use crate::sde::{CounterexampleRow, SamplingRow};

/// `%.12g`-style formatting.
pub fn fmt_num(x: f64) -> String {
    fmt_sig(x, 12)
}

pub fn fmt_sig(x: f64, digits: usize) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return if x.is_nan() { "nan".into() } else if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent");
    let exp: i32 = exp.parse().expect("exponent");
    if exp < -5 || exp >= digits as i32 {
        let mantissa = trim_zeros(mantissa);
        return format!("{mantissa}e{}{:02}", if exp < 0 { '-' } else { '+' }, exp.abs());
    }
    let decimals = (digits as i32 - 1 - exp).max(0) as usize;
    trim_zeros(&format!("{:.*}", decimals, x)).to_string()
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn opt(x: Option<f64>) -> String {
    x.map(fmt_num).unwrap_or_default()
}

pub const ESTIMATE_HEADER: &str = "estimator,value,n,se_proxy,q,alpha,s0,seed";

pub fn estimate_csv_row(r: &EstimateReport) -> String {
    format!(
        "{},{},{},{},{},{},{},{}",
        r.estimator.name(),
        fmt_num(r.value),
        r.n,
        fmt_num(r.se_proxy),
        opt(r.q),
        opt(r.alpha),
        opt(r.s0),
        r.seed
    )
}

pub fn estimates_csv(rows: &[EstimateReport]) -> String {
    let mut out = String::from(ESTIMATE_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&estimate_csv_row(r));
        out.push('\n');
    }
    out
}

pub fn staircase_csv(rows: &[StaircaseRow]) -> String {
    let mut out = String::from("grid_value,k,prob\n");
    for r in rows {
        out.push_str(&format!("{},{},{}\n", fmt_num(r.grid_value), r.level, fmt_num(r.prob)));
    }
    out
}

pub fn sampling_csv(rows: &[SamplingRow]) -> String {
    let mut out = String::from("delta_t,rho_rescaled,se,crossing_diag\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{}\n",
            fmt_num(r.delta_t),
            fmt_num(r.rho_rescaled),
            fmt_num(r.se),
            fmt_num(r.crossing_diag)
        ));
    }
    out
}

pub fn counterexample_csv(rows: &[CounterexampleRow]) -> String {
    let mut out = String::from("s0,or\n");
    for r in rows {
        out.push_str(&format!("{},{}\n", fmt_num(r.s0), fmt_num(r.or)));
    }
    out
}

pub fn residual_csv(r: &Residual) -> String {
    format!(
        "lhs,rhs,residual,se_lhs,se_rhs\n{},{},{},{},{}\n",
        fmt_num(r.lhs),
        fmt_num(r.rhs),
        fmt_num(r.residual),
        fmt_num(r.se_lhs),
        fmt_num(r.se_rhs)
    )
}

/// JSON with non-finite numbers mapped to `null`.
pub fn to_json<T: serde::Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("report types serialize")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimate::Estimator;

    #[test]
    fn significant_digits() {
        assert_eq!(fmt_num(0.0), "0");
        assert_eq!(fmt_num(0.25), "0.25");
        assert_eq!(fmt_num(-3.0), "-3");
        assert_eq!(fmt_num(1.0 / 3.0), "0.333333333333");
        assert_eq!(fmt_num(2.0 / 3.0 * 1000.0), "666.666666667");
        assert_eq!(fmt_num(1.5e-7), "1.5e-07");
        assert_eq!(fmt_num(123456789012345.0), "1.23456789012e+14");
        assert_eq!(fmt_num(0.1 + 0.2), "0.3");
    }

    #[test]
    fn estimate_row_layout() {
        let r = EstimateReport {
            estimator: Estimator::Orbit,
            value: 0.25,
            n: 4000,
            se_proxy: 0.0,
            q: None,
            alpha: None,
            s0: Some(0.125),
            seed: 7,
        };
        assert_eq!(estimate_csv_row(&r), "orbit,0.25,4000,0,,,0.125,7");
        let json: serde_json::Value = serde_json::from_str(&to_json(&r)).unwrap();
        assert_eq!(json["estimator"], "orbit");
        assert_eq!(json["q"], serde_json::Value::Null);
        assert_eq!(json["s0"], 0.125);
    }
}
