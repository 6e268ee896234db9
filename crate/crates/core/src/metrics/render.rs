use std::fmt::Write;

use super::{MetricRow, MetricsReport, YearHistogram};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Markdown,
    Csv,
    /// JSON document, as served by the HTTP API.
    Structured,
}

impl ReportFormat {
    pub fn parse(s: &str) -> Option<ReportFormat> {
        match s.to_ascii_lowercase().as_str() {
            "markdown" | "md" => Some(ReportFormat::Markdown),
            "csv" => Some(ReportFormat::Csv),
            "structured" | "json" => Some(ReportFormat::Structured),
            _ => None,
        }
    }
}

pub fn render_report(report: &MetricsReport, format: ReportFormat) -> String {
    match format {
        ReportFormat::Markdown => {
            let mut out = String::new();
            writeln!(
                out,
                "Members: {} total, {} refereed",
                report.totals.member_count, report.refereed.member_count
            )
            .unwrap();
            out.push('\n');
            out.push_str("| | Totals | Refereed |\n|---|---:|---:|\n");
            for row in MetricRow::ALL {
                writeln!(
                    out,
                    "| {} | {} | {} |",
                    row.label(),
                    report.totals.value(row),
                    report.refereed.value(row)
                )
                .unwrap();
            }
            out
        }
        ReportFormat::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["", "Totals", "Refereed"]).unwrap();
            for row in MetricRow::ALL {
                w.write_record([
                    row.label().to_string(),
                    report.totals.value(row),
                    report.refereed.value(row),
                ])
                .unwrap();
            }
            String::from_utf8(w.into_inner().expect("in-memory writer")).expect("utf-8")
        }
        ReportFormat::Structured => {
            let mut s = serde_json::to_string_pretty(report).expect("report serializes");
            s.push('\n');
            s
        }
    }
}

/// Plain-text bar chart, one line per year.
pub fn render_histogram(h: &YearHistogram) -> String {
    let max = h.counts.values().copied().max().unwrap_or(0).max(h.unknown);
    let scale = if max > 50 { max as f64 / 50.0 } else { 1.0 };
    let mut out = String::new();
    let bar = |n: usize| "#".repeat(((n as f64) / scale).ceil() as usize);
    for (year, n) in &h.counts {
        writeln!(out, "{year} {n:>5} {}", bar(*n)).unwrap();
    }
    if h.unknown > 0 {
        writeln!(out, "????  {:>5} {}", h.unknown, bar(h.unknown)).unwrap();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const ZERO_MARKDOWN: &str = "Members: 0 total, 0 refereed

| | Totals | Refereed |
|---|---:|---:|
| Number of citing papers | 0 | 0 |
| Total citations | 0 | 0 |
| Number of self-citations | 0 | 0 |
| Average citations | 0.0 | 0.0 |
| Median citations | 0 | 0 |
| Normalized citations | 0.0 | 0.0 |
| Refereed citations | 0 | 0 |
| Average refereed citations | 0.0 | 0.0 |
| Median refereed citations | 0 | 0 |
| Normalized refereed citations | 0.0 | 0.0 |
";

    #[test]
    fn zero_table_golden() {
        assert_eq!(
            render_report(&MetricsReport::default(), ReportFormat::Markdown),
            ZERO_MARKDOWN
        );
    }

    #[test]
    fn csv_parses_back() {
        let mut r = MetricsReport::default();
        r.totals.total_citations = 1329;
        r.totals.average_citations = super::super::Tenths(24);
        r.refereed.total_citations = 962;
        let text = render_report(&r, ReportFormat::Csv);
        let mut rd = csv::Reader::from_reader(text.as_bytes());
        assert_eq!(
            rd.headers().unwrap().iter().collect::<Vec<_>>(),
            vec!["", "Totals", "Refereed"]
        );
        let rows: Vec<csv::StringRecord> = rd.records().map(Result::unwrap).collect();
        assert_eq!(rows.len(), 10);
        assert_eq!(&rows[1][0], "Total citations");
        assert_eq!(&rows[1][1], "1329");
        assert_eq!(&rows[1][2], "962");
        assert_eq!(&rows[3][1], "2.4");
    }

    #[test]
    fn structured_is_json() {
        let v: serde_json::Value = serde_json::from_str(&render_report(
            &MetricsReport::default(),
            ReportFormat::Structured,
        ))
        .unwrap();
        assert_eq!(v["totals"]["member_count"], 0);
    }
}
