//! Reader and writer for the Pabulib `.pb` format.
//!
//! A file has three sections introduced by the lines `META`, `PROJECTS` and
//! `VOTES`. Each section is a `;`-separated table whose first row is a
//! header (`key;value` for META). Only approval ballots are supported.

use std::fs;
use std::path::Path;

use indexmap::IndexMap;
use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, Pow, Zero};
use thiserror::Error;

use crate::instance::{validate_instance, Instance, InstanceError, RawInstance, RawProject, RawVoter};

#[derive(Debug, Error)]
pub enum PabulibError {
    #[error("missing section {0}")]
    MissingSection(&'static str),
    #[error("section {0} appears twice")]
    RepeatedSection(&'static str),
    #[error("content before the first section header at line {0}")]
    StrayLine(usize),
    #[error("META lacks `{0}`")]
    MissingMeta(&'static str),
    #[error("unsupported vote_type `{0}`: only approval ballots are handled")]
    UnsupportedVoteType(String),
    #[error("section {section} lacks column `{column}`")]
    MissingColumn { section: &'static str, column: &'static str },
    #[error("cannot parse {what} `{value}` as a non-negative number")]
    BadNumber { what: String, value: String },
    #[error("voter `{voter}` approves unknown project `{project}`")]
    UnknownProject { voter: String, project: String },
    #[error("malformed {section} row: {message}")]
    Csv { section: &'static str, message: String },
    #[error(transparent)]
    Instance(#[from] InstanceError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ParseOptions {
    /// Reject ballots naming unknown projects; otherwise drop them with a warning.
    pub strict: bool,
}

impl Default for ParseOptions {
    fn default() -> Self {
        ParseOptions { strict: true }
    }
}

/// The three tables of a `.pb` file, uninterpreted.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PabulibFile {
    pub meta: IndexMap<String, String>,
    pub project_columns: Vec<String>,
    pub projects: Vec<Vec<String>>,
    pub vote_columns: Vec<String>,
    pub votes: Vec<Vec<String>>,
}

/// A parsed instance plus data-hygiene warnings.
#[derive(Clone, Debug)]
pub struct Parsed {
    pub instance: Instance,
    pub warnings: Vec<String>,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Section {
    Meta,
    Projects,
    Votes,
}

impl Section {
    fn name(self) -> &'static str {
        match self {
            Section::Meta => "META",
            Section::Projects => "PROJECTS",
            Section::Votes => "VOTES",
        }
    }
}

fn read_table(section: Section, body: &str) -> Result<Vec<Vec<String>>, PabulibError> {
    let mut reader = csv::ReaderBuilder::new()
        .delimiter(b';')
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(body.as_bytes());
    let mut rows = Vec::new();
    for rec in reader.records() {
        let rec = rec.map_err(|e| PabulibError::Csv { section: section.name(), message: e.to_string() })?;
        if rec.iter().all(str::is_empty) {
            continue;
        }
        rows.push(rec.iter().map(str::to_string).collect());
    }
    Ok(rows)
}

impl PabulibFile {
    /// Splits the text into its sections. Accepts LF and CRLF line endings
    /// and a leading byte-order mark.
    pub fn parse(text: &str) -> Result<Self, PabulibError> {
        let text = text.strip_prefix('\u{feff}').unwrap_or(text);
        let mut bodies: [Option<String>; 3] = [None, None, None];
        let mut current: Option<usize> = None;
        for (lineno, line) in text.lines().enumerate() {
            let line = line.strip_suffix('\r').unwrap_or(line);
            let header = match line.trim().to_ascii_uppercase().as_str() {
                "META" => Some(Section::Meta),
                "PROJECTS" => Some(Section::Projects),
                "VOTES" => Some(Section::Votes),
                _ => None,
            };
            if let Some(s) = header {
                let slot = s as usize;
                if bodies[slot].is_some() {
                    return Err(PabulibError::RepeatedSection(s.name()));
                }
                bodies[slot] = Some(String::new());
                current = Some(slot);
                continue;
            }
            match current {
                Some(slot) => {
                    let body = bodies[slot].as_mut().expect("open section");
                    body.push_str(line);
                    body.push('\n');
                }
                None if line.trim().is_empty() => {}
                None => return Err(PabulibError::StrayLine(lineno + 1)),
            }
        }
        let mut take = |s: Section| bodies[s as usize].take().ok_or(PabulibError::MissingSection(s.name()));
        let (meta_body, projects_body, votes_body) =
            (take(Section::Meta)?, take(Section::Projects)?, take(Section::Votes)?);

        let mut meta = IndexMap::new();
        for (i, row) in read_table(Section::Meta, &meta_body)?.into_iter().enumerate() {
            if i == 0 && row.first().is_some_and(|k| k == "key") {
                continue;
            }
            let key = row.first().cloned().unwrap_or_default();
            let value = row.get(1..).map(|r| r.join(";")).unwrap_or_default();
            meta.insert(key, value);
        }
        let split = |section: Section, body: &str| -> Result<(Vec<String>, Vec<Vec<String>>), PabulibError> {
            let mut rows = read_table(section, body)?.into_iter();
            let header = rows.next().unwrap_or_default();
            Ok((header, rows.collect()))
        };
        let (project_columns, projects) = split(Section::Projects, &projects_body)?;
        let (vote_columns, votes) = split(Section::Votes, &votes_body)?;
        Ok(PabulibFile { meta, project_columns, projects, vote_columns, votes })
    }

    /// Interprets the tables as an approval election.
    pub fn to_instance(&self, options: &ParseOptions) -> Result<Parsed, PabulibError> {
        let mut warnings = Vec::new();
        let budget_text = self.meta.get("budget").ok_or(PabulibError::MissingMeta("budget"))?;
        let vote_type = self.meta.get("vote_type").ok_or(PabulibError::MissingMeta("vote_type"))?;
        if !vote_type.eq_ignore_ascii_case("approval") {
            return Err(PabulibError::UnsupportedVoteType(vote_type.clone()));
        }

        let column = |cols: &[String], section: &'static str, name: &'static str| {
            cols.iter().position(|c| c == name).ok_or(PabulibError::MissingColumn { section, column: name })
        };
        let id_col = column(&self.project_columns, "PROJECTS", "project_id")?;
        let cost_col = column(&self.project_columns, "PROJECTS", "cost")?;
        let voter_col = column(&self.vote_columns, "VOTES", "voter_id")?;
        let vote_col = column(&self.vote_columns, "VOTES", "vote")?;

        let budget = parse_decimal("budget", budget_text)?;
        let mut costs = Vec::with_capacity(self.projects.len());
        for row in &self.projects {
            let id = cell(row, id_col);
            costs.push(parse_decimal(&format!("cost of `{id}`"), cell(row, cost_col))?);
        }
        // least common denominator of all amounts read as reduced fractions v / 10^d
        let pow10 = |d: u32| BigUint::from(10u32).pow(d);
        let scale = costs.iter().chain(std::iter::once(&budget)).fold(BigUint::one(), |acc, (v, d)| {
            let den = pow10(*d);
            let reduced = &den / v.gcd(&den);
            acc.lcm(&reduced)
        });
        let rescale = |(v, d): &(BigUint, u32)| v * &scale / pow10(*d);

        let mut metadata = self.meta.clone();
        let budget = rescale(&budget);
        metadata.insert("budget".into(), budget.to_string());
        if !scale.is_one() {
            metadata.insert("cost_scale".into(), scale.to_string());
            warnings.push(format!("fractional amounts scaled by {scale}"));
        }

        let mut raw = RawInstance { budget, metadata, ..Default::default() };
        for (row, cost) in self.projects.iter().zip(&costs) {
            raw.projects.push(RawProject {
                id: cell(row, id_col).to_string(),
                cost: rescale(cost),
                attributes: extras(&self.project_columns, row, &[id_col, cost_col]),
            });
        }
        let known: std::collections::HashSet<&str> = raw.projects.iter().map(|p| p.id.as_str()).collect();
        let mut seen_voters = std::collections::HashSet::new();
        for row in &self.votes {
            let voter = cell(row, voter_col).to_string();
            if !seen_voters.insert(voter.clone()) {
                warnings.push(format!("duplicate voter `{voter}`: keeping the first ballot"));
                continue;
            }
            let mut approvals = Vec::new();
            for project in cell(row, vote_col).split(',').map(str::trim).filter(|s| !s.is_empty()) {
                if known.contains(project) {
                    approvals.push(project.to_string());
                } else if options.strict {
                    return Err(PabulibError::UnknownProject { voter, project: project.to_string() });
                } else {
                    warnings.push(format!("voter `{voter}` approves unknown project `{project}`: dropped"));
                }
            }
            raw.voters.push(RawVoter {
                id: voter,
                approvals,
                attributes: extras(&self.vote_columns, row, &[voter_col, vote_col]),
            });
        }
        for w in &warnings {
            log::warn!("{w}");
        }
        Ok(Parsed { instance: validate_instance(raw)?, warnings })
    }

    /// Tables for an instance; META's budget, vote_type, num_projects and
    /// num_votes are refreshed, other keys pass through.
    pub fn from_instance(instance: &Instance) -> Self {
        let mut meta = instance.metadata().clone();
        meta.insert("budget".into(), instance.budget().to_string());
        meta.insert("vote_type".into(), "approval".into());
        meta.insert("num_projects".into(), instance.num_projects().to_string());
        meta.insert("num_votes".into(), instance.num_voters().to_string());

        let mut project_columns = vec!["project_id".to_string(), "cost".to_string()];
        for p in instance.projects() {
            for k in p.attributes.keys() {
                if !project_columns.contains(k) {
                    project_columns.push(k.clone());
                }
            }
        }
        let projects = instance
            .projects()
            .iter()
            .map(|p| {
                let mut row = vec![p.id.0.clone(), p.cost.to_string()];
                row.extend(project_columns[2..].iter().map(|k| p.attributes.get(k).cloned().unwrap_or_default()));
                row
            })
            .collect();

        let mut vote_columns = vec!["voter_id".to_string(), "vote".to_string()];
        for v in instance.voters() {
            for k in v.attributes.keys() {
                if !vote_columns.contains(k) {
                    vote_columns.push(k.clone());
                }
            }
        }
        let votes = instance
            .voters()
            .iter()
            .map(|v| {
                let ballot: Vec<&str> = v.approvals.iter().map(|&a| instance.project_id(a).as_str()).collect();
                let mut row = vec![v.id.clone(), ballot.join(",")];
                row.extend(vote_columns[2..].iter().map(|k| v.attributes.get(k).cloned().unwrap_or_default()));
                row
            })
            .collect();
        PabulibFile { meta, project_columns, projects, vote_columns, votes }
    }

    pub fn to_text(&self) -> String {
        fn table(rows: impl IntoIterator<Item = Vec<String>>) -> String {
            let mut w = csv::WriterBuilder::new().delimiter(b';').flexible(true).from_writer(Vec::new());
            for r in rows {
                w.write_record(&r).expect("writing to memory");
            }
            String::from_utf8(w.into_inner().expect("writing to memory")).expect("utf-8 input")
        }
        let mut out = String::from("META\n");
        out.push_str(&table(
            std::iter::once(vec!["key".to_string(), "value".to_string()])
                .chain(self.meta.iter().map(|(k, v)| vec![k.clone(), v.clone()])),
        ));
        out.push_str("PROJECTS\n");
        out.push_str(&table(std::iter::once(self.project_columns.clone()).chain(self.projects.iter().cloned())));
        out.push_str("VOTES\n");
        out.push_str(&table(std::iter::once(self.vote_columns.clone()).chain(self.votes.iter().cloned())));
        out
    }
}

fn cell(row: &[String], i: usize) -> &str {
    row.get(i).map_or("", String::as_str)
}

fn extras(columns: &[String], row: &[String], skip: &[usize]) -> IndexMap<String, String> {
    columns
        .iter()
        .enumerate()
        .filter(|(i, _)| !skip.contains(i))
        .map(|(i, c)| (c.clone(), cell(row, i).to_string()))
        .collect()
}

/// Non-negative decimal with `.` or `,` as separator, as (digits, number of
/// fractional digits). Trailing fractional zeros are dropped.
fn parse_decimal(what: &str, text: &str) -> Result<(BigUint, u32), PabulibError> {
    let bad = || PabulibError::BadNumber { what: what.to_string(), value: text.to_string() };
    let t = text.trim();
    let (int, frac) = match t.find(['.', ',']) {
        Some(i) => (&t[..i], t[i + 1..].trim_end_matches('0')),
        None => (t, ""),
    };
    if int.is_empty() && frac.is_empty() {
        return Err(bad());
    }
    if !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let digits = format!("{int}{frac}");
    let value = if digits.is_empty() { BigUint::zero() } else { digits.parse().map_err(|_| bad())? };
    Ok((value, frac.len() as u32))
}

/// Parses `.pb` text with strict unknown-project handling.
pub fn parse(text: &str) -> Result<Instance, PabulibError> {
    Ok(parse_with(text, &ParseOptions::default())?.instance)
}

pub fn parse_with(text: &str, options: &ParseOptions) -> Result<Parsed, PabulibError> {
    PabulibFile::parse(text)?.to_instance(options)
}

pub fn write(instance: &Instance) -> String {
    PabulibFile::from_instance(instance).to_text()
}

pub fn read_file(path: impl AsRef<Path>, options: &ParseOptions) -> Result<Parsed, PabulibError> {
    parse_with(&fs::read_to_string(path)?, options)
}

pub fn write_file(path: impl AsRef<Path>, instance: &Instance) -> Result<(), PabulibError> {
    Ok(fs::write(path, write(instance))?)
}
