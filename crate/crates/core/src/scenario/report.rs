use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::safety::{error_stats, ScenarioMetrics, StatsReport};
use crate::stats::{round_half_away, ErrorSummary};

pub const REPORT_CSV_HEADER: &str = "scenario,traditional,simulated,high_fidelity,err_trad,err_hf";
const FOOTER_IDS: [&str; 3] = ["*mean_error", "*mae", "*rmse"];

/// One table row. Differences are method minus simulated.
#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub scenario: String,
    pub traditional: Option<f64>,
    pub simulated: Option<f64>,
    pub high_fidelity: Option<f64>,
    pub diff_traditional: Option<f64>,
    pub diff_high_fidelity: Option<f64>,
}

impl From<&ScenarioMetrics> for ReportRow {
    fn from(m: &ScenarioMetrics) -> Self {
        ReportRow {
            scenario: m.scenario.clone(),
            traditional: m.traditional,
            simulated: m.simulated,
            high_fidelity: m.high_fidelity,
            diff_traditional: m.err_traditional(),
            diff_high_fidelity: m.err_high_fidelity(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub rows: Vec<ReportRow>,
    /// Absent when no row has all three values.
    pub stats: Option<StatsReport>,
}

/// Builds the comparison table, rows sorted by scenario id.
pub fn report(metrics: &[ScenarioMetrics]) -> Result<Report> {
    if metrics.is_empty() {
        return Err(Error::Validation("report needs at least one scenario".into()));
    }
    let mut rows: Vec<ReportRow> = metrics.iter().map(ReportRow::from).collect();
    rows.sort_by(|a, b| a.scenario.cmp(&b.scenario));
    Ok(Report {
        rows,
        stats: error_stats(metrics).ok(),
    })
}

fn fixed(v: f64) -> String {
    format!("{:.2}", round_half_away(v, 2))
}

fn signed(v: f64) -> String {
    let r = round_half_away(v, 2);
    // Keep "+0.00" for values that round to zero from below.
    let r = if r == 0.0 { 0.0 } else { r };
    format!("{r:+.2}")
}

fn with_diff(value: Option<f64>, diff: Option<f64>) -> String {
    match (value, diff) {
        (Some(v), Some(d)) => format!("{} ({})", fixed(v), signed(d)),
        (Some(v), None) => format!("{} (--)", fixed(v)),
        (None, _) => "--".into(),
    }
}

fn opt_csv(v: Option<f64>) -> String {
    v.map_or(String::new(), |x| format!("{x}"))
}

impl Report {
    /// Fixed-width text table with a Mean Error / MAE / RMSE footer.
    pub fn render_table(&self) -> String {
        let header = ["Scenario", "Traditional (s)", "Simulated (s)", "High-Fidelity (s)"];
        let mut lines: Vec<[String; 4]> = self
            .rows
            .iter()
            .map(|r| {
                [
                    r.scenario.clone(),
                    with_diff(r.traditional, r.diff_traditional),
                    r.simulated.map_or("--".into(), fixed),
                    with_diff(r.high_fidelity, r.diff_high_fidelity),
                ]
            })
            .collect();
        let footer: Vec<[String; 4]> = match &self.stats {
            Some(s) => {
                let pick = |f: fn(&ErrorSummary) -> f64, signed_fmt: bool| {
                    let show = |v: f64| if signed_fmt { signed(v) } else { fixed(v) };
                    (show(f(&s.traditional)), show(f(&s.high_fidelity)))
                };
                [
                    ("Mean Error", pick(|e| e.mean_error, true)),
                    ("MAE", pick(|e| e.mae, false)),
                    ("RMSE", pick(|e| e.rmse, false)),
                ]
                .into_iter()
                .map(|(name, (t, h))| [name.to_string(), t, String::new(), h])
                .collect()
            }
            None => ["Mean Error", "MAE", "RMSE"]
                .iter()
                .map(|n| [n.to_string(), "--".into(), String::new(), "--".into()])
                .collect(),
        };
        let mut widths = header.map(str::len);
        for l in lines.iter().chain(&footer) {
            for (w, c) in widths.iter_mut().zip(l) {
                *w = (*w).max(c.len());
            }
        }
        let fmt = |cells: &[String; 4]| {
            let mut s = format!("{:<w$}", cells[0], w = widths[0]);
            for (c, w) in cells[1..].iter().zip(&widths[1..]) {
                let _ = write!(s, "  {c:>w$}");
            }
            s.trim_end().to_string() + "\n"
        };
        let rule = "-".repeat(widths.iter().sum::<usize>() + 6) + "\n";
        let mut out = fmt(&header.map(String::from));
        out.push_str(&rule);
        for l in lines.drain(..) {
            out.push_str(&fmt(&l));
        }
        out.push_str(&rule);
        for l in &footer {
            out.push_str(&fmt(l));
        }
        out
    }

    /// Machine-readable rows at full precision, then footer rows whose
    /// scenario field starts with `*`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from(REPORT_CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{}",
                r.scenario,
                opt_csv(r.traditional),
                opt_csv(r.simulated),
                opt_csv(r.high_fidelity),
                opt_csv(r.diff_traditional),
                opt_csv(r.diff_high_fidelity)
            );
        }
        if let Some(s) = &self.stats {
            let stats = [
                (s.traditional.mean_error, s.high_fidelity.mean_error),
                (s.traditional.mae, s.high_fidelity.mae),
                (s.traditional.rmse, s.high_fidelity.rmse),
            ];
            for (id, (t, h)) in FOOTER_IDS.iter().zip(stats) {
                let _ = writeln!(out, "{id},,,,{t},{h}");
            }
        }
        out
    }
}

fn parse_opt(field: &str, line: usize, name: &str) -> Result<Option<f64>> {
    if field.trim().is_empty() {
        return Ok(None);
    }
    field.trim().parse().map(Some).map_err(|_| Error::Parse {
        line,
        message: format!("{name} `{field}` is not a number"),
    })
}

/// Reads the per-scenario rows of a report or metrics CSV; footer rows are
/// skipped and the difference columns are recomputed from the values.
pub fn parse_report_csv(text: &str) -> Result<Vec<ScenarioMetrics>> {
    let mut lines = text.lines().enumerate();
    let header = lines.next().map(|(_, l)| l.trim_end()).unwrap_or("");
    let short_header = "scenario,traditional,simulated,high_fidelity";
    if header != REPORT_CSV_HEADER && header != short_header {
        return Err(Error::Parse {
            line: 1,
            message: format!("expected header `{REPORT_CSV_HEADER}`, found `{header}`"),
        });
    }
    let mut out = Vec::new();
    for (i, line) in lines {
        let line_no = i + 1;
        if line.trim().is_empty() {
            continue;
        }
        let f: Vec<&str> = line.split(',').collect();
        if f.len() < 4 {
            return Err(Error::Parse {
                line: line_no,
                message: format!("expected at least 4 fields, found {}", f.len()),
            });
        }
        if f[0].starts_with('*') {
            continue;
        }
        out.push(ScenarioMetrics {
            scenario: f[0].to_string(),
            traditional: parse_opt(f[1], line_no, "traditional")?,
            simulated: parse_opt(f[2], line_no, "simulated")?,
            high_fidelity: parse_opt(f[3], line_no, "high_fidelity")?,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(id: &str, t: Option<f64>, s: Option<f64>, h: Option<f64>) -> ScenarioMetrics {
        ScenarioMetrics {
            scenario: id.into(),
            traditional: t,
            simulated: s,
            high_fidelity: h,
        }
    }

    fn table_ii() -> Vec<ScenarioMetrics> {
        [
            ("I", 1.06, 1.60, 1.35),
            ("IV", 0.81, 1.10, 0.89),
            ("V", 1.70, 1.30, 1.12),
            ("VI", 4.12, 1.95, 1.35),
            ("VII", 1.27, 1.60, 1.86),
            ("VIII", 1.58, 2.10, 1.87),
        ]
        .iter()
        .map(|&(id, t, s, h)| m(id, Some(t), Some(s), Some(h)))
        .collect()
    }

    #[test]
    fn reference_table_footer() {
        let r = report(&table_ii()).unwrap();
        let text = r.render_table();
        let row = |name: &str| {
            text.lines()
                .find(|l| l.starts_with(name))
                .unwrap()
                .split_whitespace()
                .filter(|c| c.parse::<f64>().is_ok())
                .map(String::from)
                .collect::<Vec<_>>()
        };
        assert_eq!(row("Mean Error"), ["+0.15", "-0.20"]);
        assert_eq!(row("MAE"), ["0.71", "0.29"]);
        assert_eq!(row("RMSE"), ["0.97", "0.32"]);
        assert!(text.contains("1.06 (-0.54)"), "{text}");
    }

    #[test]
    fn zero_difference_formatting() {
        let r = report(&[m("A", Some(1.0), Some(1.0), Some(1.0))]).unwrap();
        assert!(r.render_table().contains("1.00 (+0.00)"));
        assert_eq!(signed(-0.001), "+0.00");
    }

    #[test]
    fn missing_values_render_placeholders() {
        let rows = vec![m("A", Some(1.0), None, Some(2.0)), m("B", Some(1.0), Some(2.0), Some(2.5))];
        let r = report(&rows).unwrap();
        let text = r.render_table();
        let a = text.lines().find(|l| l.starts_with('A')).unwrap();
        assert!(a.contains("--"), "{a}");
        assert_eq!(r.stats.as_ref().unwrap().count, 1);
        assert!(report(&[]).is_err());
        let only_missing = report(&[m("A", None, None, None)]).unwrap();
        assert!(only_missing.stats.is_none());
        assert!(only_missing.render_table().contains("Mean Error"));
    }

    #[test]
    fn csv_round_trip_and_order() {
        let mut rows = table_ii();
        rows.push(m("II", Some(0.1 + 0.2), None, Some(1.0 / 3.0)));
        rows.reverse();
        let r = report(&rows).unwrap();
        let parsed = parse_report_csv(&r.to_csv()).unwrap();
        let mut sorted = rows.clone();
        sorted.sort_by(|a, b| a.scenario.cmp(&b.scenario));
        assert_eq!(parsed, sorted);
        assert_eq!(parsed[0].scenario, "I");
        assert_eq!(parsed[1].scenario, "II");
        assert!(parse_report_csv("nope\n").is_err());
        assert!(parse_report_csv(&format!("{REPORT_CSV_HEADER}\nA,x,,,,\n")).is_err());
    }
}
