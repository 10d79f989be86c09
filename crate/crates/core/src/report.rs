//! Tabular output: measure rows, rivalry matrices and correlation tables.
//!
//! Every CSV starts with a `# schema: ...` comment line. Rationals appear
//! twice, as `num/den` and as a 15-significant-digit decimal.

use std::collections::{BTreeMap, BTreeSet};
use std::io::{self, BufRead, Write};

use num_bigint::BigInt;
use serde::Serialize;
use thiserror::Error;

use crate::instance::Instance;
use crate::measures::{pearson, BaselineAdd, BaselineCost, MeasureError, Probability, RivalryMatrix, StrengthReport};
use crate::rational::{format_decimal, format_exact, format_f64, from_u64, from_uint, Rational};

pub const MEASURE_SCHEMA: &str = "pb-control/measures/v1";
pub const RIVALRY_SCHEMA: &str = "pb-control/rivalry/v1";
pub const CORRELATION_SCHEMA: &str = "pb-control/correlation/v1";

pub const MEASURE_COLUMNS: [&str; 10] =
    ["instance", "rule", "project", "measure", "r", "q", "cap", "exact", "decimal", "note"];

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("not a measure report: {0}")]
    Format(String),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] io::Error),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Value {
    Exact(Rational),
    /// Monte-Carlo estimate with its provenance.
    Sampled {
        estimate: Rational,
        samples: u64,
        seed: u64,
    },
    /// No value; the note says why (`unreachable`, `partial`).
    Missing(&'static str),
}

impl Value {
    fn cells(&self) -> [String; 3] {
        match self {
            Value::Exact(r) => [format_exact(r), format_decimal(r), "exact".into()],
            Value::Sampled { estimate, samples, seed } => {
                [format_exact(estimate), format_decimal(estimate), format!("sampled seed={seed} samples={samples}")]
            }
            Value::Missing(why) => [String::new(), String::new(), (*why).into()],
        }
    }

    pub fn exact(&self) -> Option<&Rational> {
        match self {
            Value::Exact(r) => Some(r),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReportRow {
    pub instance: String,
    pub rule: String,
    pub project: String,
    pub measure: String,
    pub r: Option<usize>,
    pub q: Option<String>,
    pub cap: Option<usize>,
    pub value: Value,
}

impl ReportRow {
    fn key(&self) -> (&str, &str, &str, &str, Option<usize>, Option<&str>, Option<usize>) {
        (&self.instance, &self.rule, &self.project, &self.measure, self.r, self.q.as_deref(), self.cap)
    }

    /// Measure name with its parameters, e.g. `win_probability[r=2]`.
    pub fn label(&self) -> String {
        let mut params = Vec::new();
        if let Some(r) = self.r {
            params.push(format!("r={r}"));
        }
        if let Some(q) = &self.q {
            params.push(format!("q={q}"));
        }
        if let Some(c) = self.cap {
            params.push(format!("cap={c}"));
        }
        if params.is_empty() {
            self.measure.clone()
        } else {
            format!("{}[{}]", self.measure, params.join(","))
        }
    }
}

/// Sorts rows by instance, rule, project, measure and parameters.
pub fn sort_rows(rows: &mut [ReportRow]) {
    rows.sort_by(|a, b| a.key().cmp(&b.key()));
}

struct RowBase<'a> {
    instance: &'a str,
    rule: &'a str,
    project: &'a str,
}

impl RowBase<'_> {
    fn row(&self, measure: &str, r: Option<usize>, cap: Option<usize>, value: Value) -> ReportRow {
        ReportRow {
            instance: self.instance.to_string(),
            rule: self.rule.to_string(),
            project: self.project.to_string(),
            measure: measure.to_string(),
            r,
            q: None,
            cap,
            value,
        }
    }
}

/// One `funded` row per project; losing projects also get the deletion measures.
pub fn strength_rows(instance_id: &str, instance: &Instance, report: &StrengthReport, cap: usize) -> Vec<ReportRow> {
    let rule = report.rule.name();
    let mut rows = Vec::new();
    for ps in &report.projects {
        let base = RowBase { instance: instance_id, rule, project: instance.project_id(ps.project).as_str() };
        rows.push(base.row("funded", None, None, Value::Exact(from_u64(ps.funded as u64))));
        if ps.funded {
            continue;
        }
        let missing = if ps.complete { "unreachable" } else { "partial" };
        let mds = ps.min_deletions.map_or(Value::Missing(missing), |k| Value::Exact(from_u64(k as u64)));
        rows.push(base.row("min_deletions", None, Some(cap), mds));
        let (cost, ratio) = match &ps.cheapest {
            Some(c) => (
                Value::Exact(from_uint(&c.total_cost)),
                c.ratio.clone().map_or(Value::Missing("unreachable"), Value::Exact),
            ),
            None => (Value::Missing(missing), Value::Missing(missing)),
        };
        rows.push(base.row("cheapest_deletion_cost", None, Some(cap), cost));
        rows.push(base.row("cheapest_deletion_ratio", None, Some(cap), ratio));
        for (&r, prob) in &ps.win_probability {
            let v = match prob {
                Probability::Exact(x) => Value::Exact(x.clone()),
                Probability::Sampled(s) => Value::Sampled { estimate: s.estimate(), samples: s.samples, seed: s.seed },
            };
            rows.push(base.row("win_probability", Some(r), None, v));
        }
    }
    rows
}

/// Rows for the cost and add baselines of one losing project.
pub fn baseline_rows(
    instance_id: &str,
    rule: &str,
    project: &str,
    cost: &BaselineCost,
    add: &BaselineAdd,
    cap: usize,
) -> Vec<ReportRow> {
    let base = RowBase { instance: instance_id, rule, project };
    vec![
        base.row("baseline_cost", None, None, Value::Exact(cost.score.clone())),
        base.row("baseline_add", None, Some(cap), Value::Exact(add.score.clone())),
    ]
}

pub fn write_measure_csv<W: Write>(out: W, rows: &[ReportRow]) -> Result<(), ReportError> {
    let mut out = out;
    writeln!(out, "# schema: {MEASURE_SCHEMA}")?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(MEASURE_COLUMNS)?;
    for row in rows {
        let [exact, decimal, note] = row.value.cells();
        w.write_record([
            row.instance.clone(),
            row.rule.clone(),
            row.project.clone(),
            row.measure.clone(),
            row.r.map(|v| v.to_string()).unwrap_or_default(),
            row.q.clone().unwrap_or_default(),
            row.cap.map(|v| v.to_string()).unwrap_or_default(),
            exact,
            decimal,
            note,
        ])?;
    }
    w.flush()?;
    Ok(())
}

fn parse_rational(s: &str) -> Option<Rational> {
    let (n, d) = s.split_once('/').unwrap_or((s, "1"));
    let n: BigInt = n.parse().ok()?;
    let d: BigInt = d.parse().ok()?;
    (d != BigInt::from(0)).then(|| Rational::new(n, d))
}

/// Reads a measure CSV. Comment lines are skipped; sampled rows come back as
/// [`Value::Sampled`] and empty values as [`Value::Missing`].
pub fn read_measure_csv<R: BufRead>(input: R) -> Result<Vec<ReportRow>, ReportError> {
    let mut text = String::new();
    for line in input.lines() {
        let line = line?;
        if !line.starts_with('#') {
            text.push_str(&line);
            text.push('\n');
        }
    }
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let header: Vec<String> = reader.headers()?.iter().map(str::to_string).collect();
    if header != MEASURE_COLUMNS {
        return Err(ReportError::Format(format!("unexpected header {}", header.join(","))));
    }
    let opt_usize = |s: &str| -> Result<Option<usize>, ReportError> {
        if s.is_empty() {
            Ok(None)
        } else {
            s.parse().map(Some).map_err(|_| ReportError::Format(format!("bad integer `{s}`")))
        }
    };
    let mut rows = Vec::new();
    for rec in reader.records() {
        let rec = rec?;
        let f = |i: usize| rec.get(i).unwrap_or("").to_string();
        let note = f(9);
        let value = if f(7).is_empty() {
            Value::Missing(if note == "partial" { "partial" } else { "unreachable" })
        } else {
            let x = parse_rational(&f(7)).ok_or_else(|| ReportError::Format(format!("bad rational `{}`", f(7))))?;
            if let Some(rest) = note.strip_prefix("sampled ") {
                let mut seed = 0;
                let mut samples = 0;
                for kv in rest.split_whitespace() {
                    match kv.split_once('=') {
                        Some(("seed", v)) => seed = v.parse().unwrap_or(0),
                        Some(("samples", v)) => samples = v.parse().unwrap_or(0),
                        _ => {}
                    }
                }
                Value::Sampled { estimate: x, samples, seed }
            } else {
                Value::Exact(x)
            }
        };
        rows.push(ReportRow {
            instance: f(0),
            rule: f(1),
            project: f(2),
            measure: f(3),
            r: opt_usize(&f(4))?,
            q: Some(f(5)).filter(|s| !s.is_empty()),
            cap: opt_usize(&f(6))?,
            value,
        });
    }
    Ok(rows)
}

/// Losing projects as rows, all projects as columns; the diagonal is empty.
pub fn write_rivalry_csv<W: Write>(
    out: W,
    instance: &Instance,
    rule: &str,
    matrix: &RivalryMatrix,
    decimal: bool,
) -> Result<(), ReportError> {
    let mut out = out;
    writeln!(
        out,
        "# schema: {RIVALRY_SCHEMA} rule={rule} r={} values={}",
        matrix.r,
        if decimal { "decimal" } else { "exact" }
    )?;
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["project".to_string()];
    header.extend(matrix.columns.iter().map(|&c| instance.project_id(c).0.clone()));
    w.write_record(&header)?;
    for (i, &p) in matrix.rows.iter().enumerate() {
        let mut rec = vec![instance.project_id(p).0.clone()];
        rec.extend(matrix.entries[i].iter().map(|e| match e {
            None => String::new(),
            Some(x) if decimal => format_decimal(x),
            Some(x) => format_exact(x),
        }));
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

/// Pairwise Pearson coefficients between measure labels.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CorrelationTable {
    pub labels: Vec<String>,
    /// `None` when fewer than two shared points exist or a variance is zero.
    pub matrix: Vec<Vec<Option<f64>>>,
    pub shared: Vec<Vec<usize>>,
}

/// Correlates every pair of exact measures over the (instance, rule,
/// project) keys both have a value for.
pub fn correlate(rows: &[ReportRow]) -> Result<CorrelationTable, MeasureError> {
    let mut by_label: BTreeMap<String, BTreeMap<(String, String, String), Rational>> = BTreeMap::new();
    for row in rows {
        if row.measure == "funded" {
            continue;
        }
        if let Some(x) = row.value.exact() {
            by_label
                .entry(row.label())
                .or_default()
                .insert((row.instance.clone(), row.rule.clone(), row.project.clone()), x.clone());
        }
    }
    let labels: Vec<String> = by_label.keys().cloned().collect();
    let mut matrix = vec![vec![None; labels.len()]; labels.len()];
    let mut shared = vec![vec![0; labels.len()]; labels.len()];
    for (i, a) in labels.iter().enumerate() {
        for (j, b) in labels.iter().enumerate() {
            let (va, vb) = (&by_label[a], &by_label[b]);
            let keys: BTreeSet<_> = va.keys().filter(|k| vb.contains_key(*k)).collect();
            shared[i][j] = keys.len();
            let xs: Vec<Rational> = keys.iter().map(|k| va[*k].clone()).collect();
            let ys: Vec<Rational> = keys.iter().map(|k| vb[*k].clone()).collect();
            matrix[i][j] = match pearson(&xs, &ys) {
                Ok(v) => Some(v),
                Err(MeasureError::TooFewPoints | MeasureError::ZeroVariance) => None,
                Err(e) => return Err(e),
            };
        }
    }
    Ok(CorrelationTable { labels, matrix, shared })
}

pub fn write_correlation_csv<W: Write>(out: W, table: &CorrelationTable) -> Result<(), ReportError> {
    let mut out = out;
    writeln!(out, "# schema: {CORRELATION_SCHEMA}")?;
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["measure".to_string()];
    header.extend(table.labels.iter().cloned());
    w.write_record(&header)?;
    for (i, label) in table.labels.iter().enumerate() {
        let mut rec = vec![label.clone()];
        rec.extend(table.matrix[i].iter().map(|v| v.map(format_f64).unwrap_or_default()));
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::fixtures::example_one;
    use crate::measures::{strength_report, StrengthConfig};
    use crate::rational::ratio;
    use crate::rules::RuleId;
    use crate::tiebreak::TieBreakOrder;

    fn example_rows() -> Vec<ReportRow> {
        let e = example_one();
        let t = TieBreakOrder::input_order(&e);
        let rep = strength_report(&e, RuleId::GreedyAv, &t, &StrengthConfig::default()).unwrap();
        strength_rows("ex1", &e, &rep, 3)
    }

    #[test]
    fn csv_round_trip() {
        let mut rows = example_rows();
        sort_rows(&mut rows);
        let mut buf = Vec::new();
        write_measure_csv(&mut buf, &rows).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("# schema: pb-control/measures/v1\n"));
        assert!(text.contains("ex1,greedy-av,c2,win_probability,1,,,1/2,0.5,exact"));
        assert_eq!(read_measure_csv(&buf[..]).unwrap(), rows);
    }

    #[test]
    fn ordering_is_by_key() {
        let mut rows = example_rows();
        rows.reverse();
        sort_rows(&mut rows);
        let projects: Vec<&str> = rows.iter().map(|r| r.project.as_str()).collect();
        let mut sorted = projects.clone();
        sorted.sort();
        assert_eq!(projects, sorted);
    }

    #[test]
    fn sampled_rows_are_tagged() {
        let row = ReportRow {
            instance: "i".into(),
            rule: "phragmen".into(),
            project: "a".into(),
            measure: "win_probability".into(),
            r: Some(1),
            q: None,
            cap: None,
            value: Value::Sampled { estimate: ratio(3, 10), samples: 10, seed: 7 },
        };
        let mut buf = Vec::new();
        write_measure_csv(&mut buf, std::slice::from_ref(&row)).unwrap();
        assert!(String::from_utf8_lossy(&buf).contains("3/10,0.3,sampled seed=7 samples=10"));
        assert_eq!(read_measure_csv(&buf[..]).unwrap(), vec![row]);
    }

    #[test]
    fn correlation_of_identical_measures() {
        let mk = |p: &str, m: &str, v: Rational| ReportRow {
            instance: "i".into(),
            rule: "greedy-av".into(),
            project: p.into(),
            measure: m.into(),
            r: None,
            q: None,
            cap: None,
            value: Value::Exact(v),
        };
        let rows = vec![
            mk("a", "x", ratio(0, 1)),
            mk("b", "x", ratio(1, 2)),
            mk("c", "x", ratio(1, 1)),
            mk("a", "y", ratio(1, 1)),
            mk("b", "y", ratio(1, 2)),
            mk("c", "y", ratio(0, 1)),
        ];
        let t = correlate(&rows).unwrap();
        assert_eq!(t.labels, vec!["x", "y"]);
        assert!((t.matrix[0][0].unwrap() - 1.0).abs() < 1e-12);
        assert!((t.matrix[0][1].unwrap() + 1.0).abs() < 1e-12);
        assert_eq!(t.shared[0][1], 3);
    }
}
