//! Rosters of named performances, read from CSV or JSON.

use std::collections::HashSet;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;
use tilerank_core::ops::{apply_op, PerfOp};
use tilerank_core::regions::{roster_priors, Entity};
use tilerank_core::{Performance, Priors};

#[derive(Debug, Error, PartialEq)]
pub enum RosterError {
    #[error("roster is empty")]
    Empty,
    #[error("line {line}: {message}")]
    Line { line: u64, message: String },
    #[error("line {line}: duplicate entity name `{name}`")]
    Duplicate { name: String, line: u64 },
    #[error("invalid JSON roster: {0}")]
    Json(String),
    #[error("{0}")]
    Priors(String),
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
    #[error("unknown roster format `{0}` (expected csv or json)")]
    Format(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RosterFormat {
    Csv,
    Json,
}

impl RosterFormat {
    pub fn from_path(path: &Path) -> Result<Self, RosterError> {
        match path.extension().and_then(|e| e.to_str()).map(str::to_ascii_lowercase).as_deref() {
            Some("csv") => Ok(RosterFormat::Csv),
            Some("json") => Ok(RosterFormat::Json),
            other => Err(RosterError::Format(other.unwrap_or("").to_string())),
        }
    }

    /// JSON if the first non-blank character opens an object, else CSV.
    pub fn sniff(text: &str) -> Self {
        match text.trim_start().chars().next() {
            Some('{') => RosterFormat::Json,
            _ => RosterFormat::Csv,
        }
    }
}

/// One CSV/JSON row: counts or probabilities.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Row {
    pub name: String,
    pub tn: f64,
    pub fp: f64,
    #[serde(rename = "fn")]
    pub fn_: f64,
    pub tp: f64,
}

/// Non-empty list of uniquely named entities sharing one prior.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RosterFile", into = "RosterFile")]
pub struct Roster {
    pub entities: Vec<Entity>,
    pub priors: Priors,
    /// Set when the entities were shifted to common priors on load.
    pub shifted_to: Option<Priors>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
struct RosterFile {
    entities: Vec<Row>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    priors: Option<Priors>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    shifted_to: Option<Priors>,
}

impl From<Roster> for RosterFile {
    fn from(r: Roster) -> Self {
        let entities = r
            .entities
            .iter()
            .map(|e| {
                let p = e.performance;
                Row { name: e.name.clone(), tn: p.tn(), fp: p.fp(), fn_: p.fn_(), tp: p.tp() }
            })
            .collect();
        RosterFile { entities, priors: Some(r.priors), shifted_to: r.shifted_to }
    }
}

impl TryFrom<RosterFile> for Roster {
    type Error = RosterError;

    fn try_from(f: RosterFile) -> Result<Self, RosterError> {
        let rows: Vec<(u64, Row)> = f.entities.into_iter().enumerate().map(|(i, r)| (i as u64 + 1, r)).collect();
        // An explicit shift target in the file is honoured; stated priors are derived data.
        Roster::from_rows(rows, f.shifted_to.map(|p| p.pos()))
    }
}

impl Roster {
    /// Builds a roster from numbered rows. Mixed priors are an error unless
    /// `shift_to_pos` (the target `π+`) is given.
    pub fn from_rows(rows: Vec<(u64, Row)>, shift_to_pos: Option<f64>) -> Result<Self, RosterError> {
        if rows.is_empty() {
            return Err(RosterError::Empty);
        }
        let mut seen = HashSet::new();
        let mut entities = Vec::with_capacity(rows.len());
        for (line, row) in rows {
            let name = row.name.trim().to_string();
            if name.is_empty() {
                return Err(RosterError::Line { line, message: "empty entity name".into() });
            }
            if !seen.insert(name.clone()) {
                return Err(RosterError::Duplicate { name, line });
            }
            let p = Performance::from_counts(row.tn, row.fp, row.fn_, row.tp)
                .map_err(|e| RosterError::Line { line, message: e.to_string() })?;
            entities.push(Entity::new(name, p));
        }
        Roster::new(entities, shift_to_pos)
    }

    pub fn new(entities: Vec<Entity>, shift_to_pos: Option<f64>) -> Result<Self, RosterError> {
        if entities.is_empty() {
            return Err(RosterError::Empty);
        }
        let mut seen = HashSet::new();
        for e in &entities {
            if !seen.insert(e.name.as_str()) {
                return Err(RosterError::Duplicate { name: e.name.clone(), line: 0 });
            }
        }
        match shift_to_pos {
            None => {
                let priors = roster_priors(&entities).map_err(|e| {
                    RosterError::Priors(format!("{e}; pass a shift target (positive prior) to unify"))
                })?;
                Ok(Roster { entities, priors, shifted_to: None })
            }
            Some(pos) => {
                let target = Priors::from_pos(pos).map_err(|e| RosterError::Priors(e.to_string()))?;
                let entities = entities
                    .into_iter()
                    .map(|e| {
                        let p = apply_op(PerfOp::PriorShift(target), &e.performance)
                            .map_err(|err| RosterError::Priors(format!("entity `{}`: {err}", e.name)))?;
                        Ok(Entity::new(e.name, p))
                    })
                    .collect::<Result<Vec<_>, RosterError>>()?;
                Ok(Roster { entities, priors: target, shifted_to: Some(target) })
            }
        }
    }

    pub fn names(&self) -> Vec<&str> {
        self.entities.iter().map(|e| e.name.as_str()).collect()
    }

    pub fn find(&self, name: &str) -> Option<usize> {
        self.entities.iter().position(|e| e.name == name)
    }

    pub fn performances(&self) -> Vec<Performance> {
        self.entities.iter().map(|e| e.performance).collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("roster serializes")
    }
}

/// Reads `name,tn,fp,fn,tp` with a header row, in any column order.
pub fn parse_csv(text: &str, shift_to_pos: Option<f64>) -> Result<Roster, RosterError> {
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).flexible(true).from_reader(text.as_bytes());
    let headers = reader
        .headers()
        .map_err(|e| RosterError::Line { line: 1, message: e.to_string() })?
        .clone();
    if headers.iter().all(|h| h.is_empty()) {
        return Err(RosterError::Empty);
    }
    let col = |want: &str| {
        headers.iter().position(|h| h.eq_ignore_ascii_case(want)).ok_or_else(|| RosterError::Line {
            line: 1,
            message: format!("missing column `{want}` (header must name name,tn,fp,fn,tp)"),
        })
    };
    let idx = [col("name")?, col("tn")?, col("fp")?, col("fn")?, col("tp")?];
    let mut rows = Vec::new();
    for rec in reader.records() {
        let rec = rec.map_err(|e| RosterError::Line {
            line: e.position().map_or(0, |p| p.line()),
            message: e.to_string(),
        })?;
        let line = rec.position().map_or(0, |p| p.line());
        if rec.iter().all(|f| f.is_empty()) {
            continue;
        }
        if rec.len() != headers.len() {
            return Err(RosterError::Line {
                line,
                message: format!("expected {} fields, found {}", headers.len(), rec.len()),
            });
        }
        let num = |k: usize, what: &str| -> Result<f64, RosterError> {
            let s = &rec[idx[k]];
            s.parse::<f64>()
                .map_err(|_| RosterError::Line { line, message: format!("{what} `{s}` is not a number") })
        };
        rows.push((
            line,
            Row { name: rec[idx[0]].to_string(), tn: num(1, "tn")?, fp: num(2, "fp")?, fn_: num(3, "fn")?, tp: num(4, "tp")? },
        ));
    }
    Roster::from_rows(rows, shift_to_pos)
}

pub fn parse_json(text: &str, shift_to_pos: Option<f64>) -> Result<Roster, RosterError> {
    let file: RosterFile = serde_json::from_str(text)
        .map_err(|e| RosterError::Json(format!("line {}, column {}: {e}", e.line(), e.column())))?;
    let rows: Vec<(u64, Row)> = file.entities.into_iter().enumerate().map(|(i, r)| (i as u64 + 1, r)).collect();
    Roster::from_rows(rows, shift_to_pos.or(file.shifted_to.map(|p| p.pos())))
}

pub fn parse_roster(text: &str, format: RosterFormat, shift_to_pos: Option<f64>) -> Result<Roster, RosterError> {
    match format {
        RosterFormat::Csv => parse_csv(text, shift_to_pos),
        RosterFormat::Json => parse_json(text, shift_to_pos),
    }
}

pub fn load_roster(path: &Path, format: Option<RosterFormat>, shift_to_pos: Option<f64>) -> Result<Roster, RosterError> {
    let format = match format {
        Some(f) => f,
        None => RosterFormat::from_path(path)?,
    };
    let text = std::fs::read_to_string(path)
        .map_err(|e| RosterError::Io { path: path.display().to_string(), message: e.to_string() })?;
    parse_roster(&text, format, shift_to_pos)
}
