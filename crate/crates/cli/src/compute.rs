//! Computations shared by the command line and the HTTP API.

use anyhow::{anyhow, bail, Context, Result};
use serde::Serialize;
use tilerank_core::regions::{rank_r_regions, Entity, RegionOptions, RegionSet};
use tilerank_core::roc::{roc_pencil, RocPencil};
use tilerank_core::stats::{correlation_tile, vut, vut_case, vut_numeric, SampleSpec, Target, VutCase};
use tilerank_core::tile::{rank_tile, value_tile};
use tilerank_core::{Performance, Priors, Score, ScoreValue, TileCoord, TileGrid};

use crate::render::Palette;
use crate::roster::Roster;

pub const DEFAULT_SCORES: &str = "A,TNR,TPR,NPV,PPV,F1,BA,kappa";

/// `"a,b"` or `"a b"`.
pub fn parse_coord(s: &str) -> Result<TileCoord> {
    let parts: Vec<&str> = s.split([',', ' ']).filter(|p| !p.is_empty()).collect();
    let [a, b] = parts.as_slice() else {
        bail!("coordinate `{s}` must be `a,b`");
    };
    let num = |x: &str| x.trim().parse::<f64>().map_err(|_| anyhow!("`{x}` is not a number"));
    Ok(TileCoord::new(num(a)?, num(b)?)?)
}

/// `"tn,fp,fn,tp"` as counts or probabilities.
pub fn parse_perf(s: &str) -> Result<Performance> {
    let xs = s
        .split(',')
        .map(|x| x.trim().parse::<f64>().map_err(|_| anyhow!("`{x}` is not a number")))
        .collect::<Result<Vec<f64>>>()?;
    let [tn, fp, fn_, tp] = xs.as_slice() else {
        bail!("performance `{s}` must be `tn,fp,fn,tp`");
    };
    Ok(Performance::from_counts(*tn, *fp, *fn_, *tp)?)
}

/// A coordinate if the text looks like one, otherwise a catalog name.
pub fn parse_target(s: &str) -> Result<Target> {
    if s.contains(',') {
        return Ok(Target::Coord(parse_coord(s)?));
    }
    Ok(Target::Score(s.parse::<Score>()?))
}

pub fn priors_from_neg(neg: f64) -> Result<Priors> {
    let p = Priors::from_neg(neg)?;
    p.require_interior()?;
    Ok(p)
}

fn entity_index(roster: &Roster, entity: Option<&str>) -> Result<usize> {
    match entity {
        Some(name) => roster.find(name).ok_or_else(|| {
            anyhow!("no entity named `{name}` (roster has {})", roster.names().join(", "))
        }),
        None if roster.entities.len() == 1 => Ok(0),
        None => bail!("roster has {} entities; choose one by name", roster.entities.len()),
    }
}

fn stamp(grid: &mut TileGrid, roster: &Roster, entity: &str) {
    grid.meta.entity = Some(entity.to_string());
    grid.meta.priors = Some(roster.priors);
    grid.meta.shifted_to = roster.shifted_to;
    grid.meta.palette = Some(Palette::for_kind(grid.kind).name().to_string());
}

/// `R_{a,b}` of one entity over the Tile.
pub fn entity_value_tile(roster: &Roster, entity: Option<&str>, res: usize) -> Result<TileGrid> {
    let i = entity_index(roster, entity)?;
    let mut grid = value_tile(&roster.entities[i].performance, res)?;
    grid.meta.score = Some("R(a,b)".into());
    stamp(&mut grid, roster, &roster.entities[i].name);
    Ok(grid)
}

/// Rank of one entity within the roster over the Tile.
pub fn entity_rank_tile(roster: &Roster, entity: Option<&str>, res: usize) -> Result<TileGrid> {
    let i = entity_index(roster, entity)?;
    let mut grid = rank_tile(&roster.performances(), i, res)?;
    grid.meta.score = Some("rank".into());
    stamp(&mut grid, roster, &roster.entities[i].name);
    Ok(grid)
}

/// The roster as seen at priors `(neg, 1 − neg)`, shifting when they differ.
pub fn roster_at(roster: &Roster, neg: Option<f64>) -> Result<Vec<Entity>> {
    match neg {
        None => Ok(roster.entities.clone()),
        Some(n) => {
            let target = priors_from_neg(n)?;
            if target.approx_eq(&roster.priors, 0.0) {
                return Ok(roster.entities.clone());
            }
            let shifted = Roster::new(roster.entities.clone(), Some(target.pos()))?;
            Ok(shifted.entities)
        }
    }
}

pub fn regions(roster: &Roster, rank: usize, neg: Option<f64>) -> Result<RegionSet> {
    let entities = roster_at(roster, neg)?;
    if rank == 0 || rank > entities.len() {
        bail!("rank {rank} must be between 1 and {}", entities.len());
    }
    Ok(rank_r_regions(&entities, rank, RegionOptions::default())?)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CorrelateParams {
    pub n: usize,
    pub seed: u64,
    pub res: usize,
    pub alpha: f64,
    /// Negative prior to hold fixed while sampling.
    pub fixed_neg_prior: Option<f64>,
}

impl Default for CorrelateParams {
    fn default() -> Self {
        CorrelateParams { n: 10_000, seed: 0, res: 51, alpha: 1.0, fixed_neg_prior: None }
    }
}

pub fn correlate(target: &Target, p: &CorrelateParams) -> Result<TileGrid> {
    let spec = match p.fixed_neg_prior {
        Some(n) => SampleSpec::fixed_priors(p.n, p.seed, priors_from_neg(n)?),
        None => SampleSpec { concentration: p.alpha, ..SampleSpec::uniform(p.n, p.seed) },
    };
    let mut grid = correlation_tile(target, &spec, p.res)?;
    grid.meta.palette = Some(Palette::for_kind(grid.kind).name().to_string());
    Ok(grid)
}

/// Iso-performance pencil at `c`. Priors default to the roster's, then to balanced.
pub fn roc(c: TileCoord, neg: Option<f64>, roster: Option<&Roster>) -> Result<RocPencil> {
    let priors = match (neg, roster) {
        (Some(n), _) => priors_from_neg(n)?,
        (None, Some(r)) => r.priors,
        (None, None) => Priors::balanced(),
    };
    let entities: Vec<(String, Performance)> = match roster {
        Some(r) => roster_at(r, Some(priors.neg()))?
            .into_iter()
            .map(|e| (e.name, e.performance))
            .collect(),
        None => Vec::new(),
    };
    Ok(roc_pencil(c, priors, &entities).context("cannot build the ROC pencil")?)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScoreRow {
    pub name: String,
    pub values: Vec<ScoreValue>,
}

pub fn parse_scores(names: &str) -> Result<Vec<Score>> {
    names
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<Score>().map_err(Into::into))
        .collect()
}

pub fn score_table(roster: &Roster, scores: &[Score]) -> Vec<ScoreRow> {
    roster
        .entities
        .iter()
        .map(|e| ScoreRow { name: e.name.clone(), values: scores.iter().map(|s| s.evaluate(&e.performance)).collect() })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VutReport {
    pub name: String,
    pub case: VutCase,
    pub closed_form: f64,
    pub numeric: f64,
    pub nodes: usize,
}

pub fn vut_report(name: &str, p: &Performance, nodes: usize) -> Result<VutReport> {
    Ok(VutReport {
        name: name.to_string(),
        case: vut_case(p),
        closed_form: vut(p),
        numeric: vut_numeric(p, nodes)?,
        nodes,
    })
}

/// Twelve decimals with trailing zeros dropped.
pub fn fmt_num(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    let s = format!("{x:.12}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".into()
    } else {
        s.to_string()
    }
}

pub fn fmt_value(v: ScoreValue) -> String {
    v.value().map_or_else(|| "undefined".into(), fmt_num)
}
