use std::fmt;
use std::fmt::Write as _;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::exact::ExactRow;
use super::sweep::SweepRecord;
use super::table::EstimateSummary;
use crate::error::{Error, Result};

pub const SUMMARY_HEADER: &str =
    "method,measured,noise,mitigation,mean,sd,bias,rmse,shots,iterations,theta,theta_w,seed";
pub const SWEEP_HEADER: &str =
    "parameter,x,measured,noise,mitigation,mean,sd,unmitigated_mean,unmitigated_sd,shots,iterations,seed";
pub const FIT_HEADER: &str = "parameter,measured,noise,mitigation,fit,intercept,rss,coeffs";
pub const EXACT_HEADER: &str =
    "fixture,disturbance,indirect,three_state,error,locally_uniform,locally_uniform_t,theta,dec_p_plus,dec_estimate,coherence_l1";

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Jsonl,
    Text,
}

impl FromStr for Format {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(Format::Csv),
            "jsonl" | "json" => Ok(Format::Jsonl),
            "text" | "txt" => Ok(Format::Text),
            other => Err(Error::Config(format!("unknown format '{other}'"))),
        }
    }
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Format::Csv => "csv",
            Format::Jsonl => "jsonl",
            Format::Text => "text",
        })
    }
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Jsonl => "jsonl",
            Format::Text => "txt",
        }
    }
}

/// Fixed-point text without a negative zero.
fn fixed(x: f64, digits: usize) -> String {
    let s = format!("{x:.digits$}");
    if s.starts_with('-') && s[1..].chars().all(|c| c == '0' || c == '.') {
        s[1..].to_string()
    } else {
        s
    }
}

fn opt(x: Option<f64>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

/// Summary rows as CSV. With `milli`, SD, bias and RMSE are in units of
/// 10⁻³ and rounded as in a printed table.
pub fn summaries_csv(rows: &[EstimateSummary], milli: bool) -> String {
    let mut s = String::from(SUMMARY_HEADER);
    s.push('\n');
    for r in rows {
        let (mean, sd, bias, rmse) = if milli {
            (
                fixed(r.mean, 3),
                fixed(r.sd * 1e3, 2),
                fixed(r.bias * 1e3, 2),
                fixed(r.rmse * 1e3, 2),
            )
        } else {
            (
                r.mean.to_string(),
                r.sd.to_string(),
                r.bias.to_string(),
                r.rmse.to_string(),
            )
        };
        let _ = writeln!(
            s,
            "{},{},{},{},{mean},{sd},{bias},{rmse},{},{},{},{},{}",
            r.method,
            r.measured,
            r.noise,
            r.mitigation,
            r.shots,
            r.n_iterations,
            opt(r.theta),
            opt(r.theta_w),
            r.seed
        );
    }
    s
}

pub fn summaries_text(rows: &[EstimateSummary]) -> String {
    let mut s = format!(
        "{:<5} {:<5} {:<10} {:<8} {:>8}  {:>9} {:>9} {:>9}   (x1e-3)\n",
        "", "", "noise", "mitig.", "mean", "sd", "bias", "rmse"
    );
    for r in rows {
        let _ = writeln!(
            s,
            "{:<5} P^{:<3} {:<10} {:<8} {:>8.3}  {:>9.2} {:>9.2} {:>9.2}",
            r.method.to_string(),
            r.measured.to_string(),
            r.noise,
            r.mitigation.to_string(),
            r.mean,
            r.sd * 1e3,
            r.bias * 1e3,
            r.rmse * 1e3
        );
    }
    s
}

pub fn jsonl<T: Serialize>(items: &[T]) -> Result<String> {
    let mut s = String::new();
    for it in items {
        s.push_str(&serde_json::to_string(it)?);
        s.push('\n');
    }
    Ok(s)
}

pub fn sweep_csv(rec: &SweepRecord) -> String {
    let mut s = String::from(SWEEP_HEADER);
    s.push('\n');
    let param = serde_json::to_value(rec.parameter)
        .ok()
        .and_then(|v| v.as_str().map(str::to_string))
        .unwrap_or_default();
    for c in &rec.cells {
        let _ = writeln!(
            s,
            "{param},{},{},{},{},{},{},{},{},{},{},{}",
            c.x,
            rec.measured,
            rec.noise,
            rec.mitigation,
            c.mean,
            c.sd,
            c.unmitigated_mean,
            c.unmitigated_sd,
            rec.shots,
            rec.n_iterations,
            rec.seeds.first().copied().unwrap_or(0)
        );
    }
    s
}

pub fn fits_csv(rec: &SweepRecord) -> String {
    let mut s = String::from(FIT_HEADER);
    s.push('\n');
    let param = serde_json::to_value(rec.parameter)
        .ok()
        .and_then(|v| v.as_str().map(str::to_string))
        .unwrap_or_default();
    for f in &rec.fits {
        let kind = serde_json::to_value(f.kind)
            .ok()
            .and_then(|v| v.as_str().map(str::to_string))
            .unwrap_or_default();
        let coeffs: Vec<String> = f.coeffs.iter().map(|c| c.to_string()).collect();
        let _ = writeln!(
            s,
            "{param},{},{},{},{kind},{},{},{}",
            rec.measured,
            rec.noise,
            rec.mitigation,
            f.intercept,
            f.rss,
            coeffs.join(";")
        );
    }
    s
}

pub fn exact_csv(rows: &[ExactRow]) -> String {
    let mut s = String::from(EXACT_HEADER);
    s.push('\n');
    for r in rows {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{},{},{},{},{}",
            r.fixture,
            r.disturbance,
            r.indirect,
            r.three_state,
            r.error,
            r.locally_uniform,
            r.locally_uniform_t,
            r.theta,
            r.dec_p_plus,
            r.dec_estimate,
            r.coherence_l1
        );
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::table::{run_table, TableConfig};

    #[test]
    fn csv_layout() {
        let cfg = TableConfig {
            analytic: true,
            iterations: 1,
            ..TableConfig::default()
        };
        let rows = run_table(&cfg).unwrap();
        let csv = summaries_csv(&rows, false);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], SUMMARY_HEADER);
        assert_eq!(lines.len(), 10);
        assert!(lines[1].starts_with("TSM,X,none,none,"));
        assert!(lines.iter().skip(1).all(|l| l.split(',').count() == 13));
        let milli = summaries_csv(&rows, true);
        assert!(milli
            .lines()
            .nth(1)
            .unwrap()
            .starts_with("TSM,X,none,none,0.000,0.00,"));
        for line in jsonl(&rows).unwrap().lines() {
            assert!(line.starts_with("{\"v\":1,"));
        }
    }

    #[test]
    fn format_names() {
        for f in [Format::Csv, Format::Jsonl, Format::Text] {
            assert_eq!(f.to_string().parse::<Format>().unwrap(), f);
        }
        assert!("xml".parse::<Format>().is_err());
    }
}
