use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::optimizer::{Mode, Schedule};
use crate::selection::Selection;

/// One aggregated line of a sweep: an algorithm at one swept value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub swept_name: String,
    pub swept_value: f64,
    pub mode: Mode,
    pub schedule: Schedule,
    pub selection: Selection,
    pub mean_rate_bps_hz: f64,
    pub stderr: f64,
    /// Shortfall against the grid oracle of the same mode and selection,
    /// `100 (C_opt - C) / C_opt`; empty when the sweep has no such oracle.
    pub gap_pct: Option<f64>,
    pub mean_solve_ms: f64,
}

const HEADER: [&str; 9] = [
    "swept_name",
    "swept_value",
    "mode",
    "schedule",
    "selection",
    "mean_rate_bps_hz",
    "stderr",
    "gap_pct",
    "mean_solve_ms",
];

pub fn emit_csv(rows: &[SweepRow]) -> Result<String> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
    w.write_record(HEADER)?;
    for r in rows {
        w.serialize(r)?;
    }
    let bytes = w.into_inner().map_err(|e| crate::Error::Csv(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| crate::Error::Csv(e.to_string()))
}

pub fn parse_csv(text: &str) -> Result<Vec<SweepRow>> {
    csv::Reader::from_reader(text.as_bytes())
        .deserialize()
        .map(|r| r.map_err(Into::into))
        .collect()
}

/// Fixed-width text table; numeric columns are right-aligned.
pub fn emit_table(rows: &[SweepRow]) -> String {
    let cells: Vec<[String; 9]> = rows
        .iter()
        .map(|r| {
            [
                r.swept_name.clone(),
                format!("{}", r.swept_value),
                r.mode.to_string(),
                r.schedule.to_string(),
                r.selection.to_string(),
                format!("{:.4}", r.mean_rate_bps_hz),
                format!("{:.4}", r.stderr),
                r.gap_pct.map_or("-".into(), |g| format!("{g:.3}")),
                format!("{:.3}", r.mean_solve_ms),
            ]
        })
        .collect();
    let mut widths = HEADER.map(str::len);
    for row in &cells {
        for (w, c) in widths.iter_mut().zip(row) {
            *w = (*w).max(c.len());
        }
    }
    let line = |fields: &[String]| {
        let parts: Vec<String> = fields
            .iter()
            .enumerate()
            .map(|(i, f)| {
                if (2..5).contains(&i) || i == 0 {
                    format!("{f:<w$}", w = widths[i])
                } else {
                    format!("{f:>w$}", w = widths[i])
                }
            })
            .collect();
        parts.join("  ").trim_end().to_string()
    };
    let mut out = line(&HEADER.map(String::from));
    out.push('\n');
    for row in &cells {
        out.push_str(&line(row));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(value: f64, rate: f64, gap: Option<f64>) -> SweepRow {
        SweepRow {
            swept_name: "i_bar_db".into(),
            swept_value: value,
            mode: Mode::Coherent,
            schedule: Schedule::Greedy2,
            selection: Selection::All,
            mean_rate_bps_hz: rate,
            stderr: 0.0125,
            gap_pct: gap,
            mean_solve_ms: 12.5,
        }
    }

    #[test]
    fn csv_single_row() {
        let text = emit_csv(&[row(0.0, 1.0, None)]).unwrap();
        assert_eq!(text.lines().count(), 2);
        assert_eq!(
            text.lines().next().unwrap(),
            "swept_name,swept_value,mode,schedule,selection,mean_rate_bps_hz,stderr,gap_pct,mean_solve_ms"
        );
        assert_eq!(text.lines().nth(1).unwrap(), "i_bar_db,0.0,coherent,greedy2,all,1.0,0.0125,,12.5");
    }

    #[test]
    fn csv_round_trip() {
        let rows = vec![row(2.0, 6.123456789012345, Some(0.1561)), row(10.0, 1.0 / 3.0, Some(-0.0))];
        assert_eq!(parse_csv(&emit_csv(&rows).unwrap()).unwrap(), rows);
    }

    #[test]
    fn csv_quotes_fields() {
        let mut r = row(0.0, 1.0, None);
        r.swept_name = "a,b".into();
        let text = emit_csv(&[r.clone()]).unwrap();
        assert!(text.contains("\"a,b\""));
        assert_eq!(parse_csv(&text).unwrap(), vec![r]);
    }

    #[test]
    fn table_golden() {
        let rows = vec![row(0.0, 6.1, Some(0.25)), row(10.0, 12.34567, None)];
        let expected = "\
swept_name  swept_value  mode      schedule  selection  mean_rate_bps_hz  stderr  gap_pct  mean_solve_ms
i_bar_db              0  coherent  greedy2   all                  6.1000  0.0125    0.250         12.500
i_bar_db             10  coherent  greedy2   all                 12.3457  0.0125        -         12.500
";
        assert_eq!(emit_table(&rows), expected);
    }
}
