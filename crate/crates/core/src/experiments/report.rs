//! Result rows, CSV output, per-cell summaries and gnuplot data blocks.

use std::collections::HashMap;
use std::fmt::Write as _;

use super::grid::{Experiment, GridCell};
use crate::error::{Error, Result};

pub const CSV_HEADER: &str = "experiment,cell,rep,seed,metric,value";
pub const SUMMARY_HEADER: &str = "experiment,cell,metric,mean,se,count";

/// Metric name of rows recording a failed replication.
pub const ERROR_METRIC: &str = "error";

#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub experiment: Experiment,
    pub cell: String,
    pub rep: usize,
    /// Stream id of the replication.
    pub seed: u64,
    pub metric: String,
    pub value: f64,
    /// Failure message for error rows; not part of the CSV.
    pub note: Option<String>,
}

impl ResultRow {
    pub fn is_error(&self) -> bool {
        self.metric == ERROR_METRIC
    }
}

pub fn format_csv(rows: &[ResultRow]) -> String {
    let mut out = String::with_capacity(64 * (rows.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in rows {
        writeln!(out, "{},{},{},{},{},{}", r.experiment, r.cell, r.rep, r.seed, r.metric, r.value)
            .expect("writing to a String");
    }
    out
}

/// Reads rows written by [`format_csv`].
pub fn parse_csv(text: &str) -> Result<Vec<ResultRow>> {
    let mut lines = text.lines();
    if lines.next() != Some(CSV_HEADER) {
        return Err(Error::Parse { line: 1, msg: format!("expected header `{CSV_HEADER}`") });
    }
    let mut rows = Vec::new();
    for (idx, line) in lines.enumerate() {
        let lineno = idx + 2;
        let bad = |msg: &str| Error::Parse { line: lineno, msg: msg.to_string() };
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 6 {
            return Err(bad("expected 6 fields"));
        }
        rows.push(ResultRow {
            experiment: Experiment::from_id(f[0]).ok_or_else(|| bad("unknown experiment"))?,
            cell: f[1].to_string(),
            rep: f[2].parse().map_err(|_| bad("bad rep"))?,
            seed: f[3].parse().map_err(|_| bad("bad seed"))?,
            metric: f[4].to_string(),
            value: f[5].parse().map_err(|_| bad("bad value"))?,
            note: None,
        });
    }
    Ok(rows)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub experiment: Experiment,
    pub cell: String,
    pub metric: String,
    pub mean: f64,
    /// Sample standard deviation over `√count`; 0 for a single row.
    pub se: f64,
    pub count: usize,
}

/// Mean, standard error and count per `(cell, metric)`, in order of first
/// appearance.
pub fn aggregate(rows: &[ResultRow]) -> Vec<SummaryRow> {
    let mut index: HashMap<(&str, &str), usize> = HashMap::new();
    let mut groups: Vec<(&ResultRow, Vec<f64>)> = Vec::new();
    for r in rows {
        let slot = *index.entry((&r.cell, &r.metric)).or_insert_with(|| {
            groups.push((r, Vec::new()));
            groups.len() - 1
        });
        groups[slot].1.push(r.value);
    }
    groups
        .into_iter()
        .map(|(first, values)| {
            let n = values.len();
            let mean = values.iter().sum::<f64>() / n as f64;
            let se = if n > 1 {
                let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
                (var / n as f64).sqrt()
            } else {
                0.0
            };
            SummaryRow {
                experiment: first.experiment,
                cell: first.cell.clone(),
                metric: first.metric.clone(),
                mean,
                se,
                count: n,
            }
        })
        .collect()
}

pub fn format_summary(summary: &[SummaryRow]) -> String {
    let mut out = String::from(SUMMARY_HEADER);
    out.push('\n');
    for s in summary {
        writeln!(out, "{},{},{},{},{},{}", s.experiment, s.cell, s.metric, s.mean, s.se, s.count)
            .expect("writing to a String");
    }
    out
}

/// Looks up the summary entry for one cell and metric.
pub fn find<'a>(summary: &'a [SummaryRow], cell: &str, metric: &str) -> Option<&'a SummaryRow> {
    summary.iter().find(|s| s.cell == cell && s.metric == metric)
}

/// A curve label with its `(alpha, mean, se)` points.
type Curve = (String, Vec<(f64, f64, f64)>);

/// Gnuplot data: one indexed block per `(p, noise, start)` curve with
/// columns `alpha mean se`, blocks separated by two blank lines.
pub fn phase_dat(cells: &[GridCell], summary: &[SummaryRow], metric: &str) -> String {
    let mut curves: Vec<Curve> = Vec::new();
    for cell in cells {
        let GridCell::Phase { p, r, alpha, noise, start } = cell else {
            continue;
        };
        let Some(s) = find(summary, &cell.name(), metric) else {
            continue;
        };
        let label = format!("p={p} r={r} noise={noise} start={}", start.label());
        match curves.iter_mut().find(|(l, _)| *l == label) {
            Some((_, pts)) => pts.push((*alpha, s.mean, s.se)),
            None => curves.push((label, vec![(*alpha, s.mean, s.se)])),
        }
    }
    let mut out = String::new();
    for (idx, (label, mut pts)) in curves.into_iter().enumerate() {
        if idx > 0 {
            out.push_str("\n\n");
        }
        pts.sort_by(|a, b| a.0.total_cmp(&b.0));
        writeln!(out, "# {label}\n# alpha mean_{metric} se").expect("writing to a String");
        for (a, m, se) in pts {
            writeln!(out, "{a} {m} {se}").expect("writing to a String");
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(cell: &str, metric: &str, rep: usize, value: f64) -> ResultRow {
        ResultRow {
            experiment: Experiment::Table1,
            cell: cell.into(),
            rep,
            seed: 7,
            metric: metric.into(),
            value,
            note: None,
        }
    }

    #[test]
    fn aggregate_examples() {
        assert!(aggregate(&[]).is_empty());
        let one = aggregate(&[row("a", "m", 0, 3.5)]);
        assert_eq!((one[0].mean, one[0].se, one[0].count), (3.5, 0.0, 1));
        let two = aggregate(&[row("a", "m", 0, 0.0), row("a", "m", 1, 2.0)]);
        assert_eq!((two[0].mean, two[0].se), (1.0, 1.0));
        let mixed = aggregate(&[row("a", "m", 0, 0.0), row("a", "n", 0, 5.0), row("a", "m", 1, 2.0)]);
        assert_eq!(mixed.len(), 2);
        assert_eq!(find(&mixed, "a", "n").unwrap().mean, 5.0);
        assert_eq!(find(&mixed, "a", "m").unwrap().count, 2);
    }

    #[test]
    fn csv_round_trip() {
        let rows = vec![row("50x50x50_5x5x5_lam20", "l1_hooi", 0, 0.123_456_789_012_345_67), row("c", "m", 3, -1e-300)];
        let text = format_csv(&rows);
        assert!(text.starts_with("experiment,cell,rep,seed,metric,value\n"));
        assert_eq!(parse_csv(&text).unwrap(), rows);
        assert!(parse_csv("bad\n").is_err());
        assert!(parse_csv(&format!("{CSV_HEADER}\ntable1,a,0,1,m\n")).is_err());
    }

    #[test]
    fn dat_blocks() {
        use crate::ensembles::NoiseKind;
        use crate::experiments::grid::StartKind;
        let cells: Vec<GridCell> = [0.5, 0.4]
            .iter()
            .map(|&alpha| GridCell::Phase { p: 50, r: 5, alpha, noise: NoiseKind::Uniform, start: StartKind::Warm })
            .collect();
        let rows: Vec<ResultRow> = cells.iter().map(|c| row(&c.name(), "linf", 0, 0.25)).collect();
        let dat = phase_dat(&cells, &aggregate(&rows), "linf");
        let data: Vec<&str> = dat.lines().filter(|l| !l.starts_with('#')).collect();
        assert_eq!(data, vec!["0.4 0.25 0", "0.5 0.25 0"]);
    }
}
