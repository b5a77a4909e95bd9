//! Rectangular rasters over the Tile.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::perf::{Priors, ScoreValue, TileCoord};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GridKind {
    Value,
    NoSkill,
    NoSkillArgmax,
    Rank,
    KendallTau,
}

/// Parameters a grid was computed with.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct GridMeta {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub score: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub entity: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub priors: Option<Priors>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shifted_to: Option<Priors>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_samples: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub concentration: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fixed_neg_prior: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub palette: Option<String>,
}

/// `values[i][j]` holds the cell at `(a[i], b[j])`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TileGrid {
    pub kind: GridKind,
    pub n_a: usize,
    pub n_b: usize,
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    pub values: Vec<Vec<ScoreValue>>,
    pub meta: GridMeta,
}

/// `n` evenly spaced points on `[0,1]`, both ends included and exact.
pub fn linspace(n: usize) -> Vec<f64> {
    match n {
        0 => vec![],
        1 => vec![0.0],
        _ => (0..n).map(|i| i as f64 / (n - 1) as f64).collect(),
    }
}

pub(crate) fn check_resolution(res: usize) -> Result<()> {
    if res < 2 {
        return Err(Error::InvalidArgument(format!("resolution {res} must be at least 2")));
    }
    Ok(())
}

impl TileGrid {
    /// Fills a `res × res` grid, one row of constant `a` per task.
    pub fn from_fn<F>(kind: GridKind, res: usize, meta: GridMeta, f: F) -> Result<Self>
    where
        F: Fn(TileCoord) -> ScoreValue + Sync,
    {
        check_resolution(res)?;
        let a = linspace(res);
        let b = linspace(res);
        let values = a
            .par_iter()
            .map(|&ai| b.iter().map(|&bj| f(TileCoord { a: ai, b: bj })).collect())
            .collect();
        Ok(TileGrid { kind, n_a: res, n_b: res, a, b, values, meta })
    }

    pub fn get(&self, i: usize, j: usize) -> ScoreValue {
        self.values[i][j]
    }

    pub fn coord(&self, i: usize, j: usize) -> TileCoord {
        TileCoord { a: self.a[i], b: self.b[j] }
    }

    /// Checks the shape and coordinate invariants.
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidArgument(format!("invalid grid: {m}")));
        if self.a.len() != self.n_a || self.b.len() != self.n_b {
            return bad("coordinate count does not match n_a/n_b");
        }
        if self.values.len() != self.n_a || self.values.iter().any(|r| r.len() != self.n_b) {
            return bad("values shape does not match n_a x n_b");
        }
        for axis in [&self.a, &self.b] {
            if axis.iter().any(|x| !(0.0..=1.0).contains(x)) {
                return bad("coordinate outside [0,1]");
            }
            if axis.windows(2).any(|w| w[0] >= w[1]) {
                return bad("coordinates not strictly increasing");
            }
        }
        Ok(())
    }

    pub fn defined_values(&self) -> impl Iterator<Item = f64> + '_ {
        self.values.iter().flatten().filter_map(|v| v.value())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linspace_is_exact_at_ends_and_middle() {
        let x = linspace(101);
        assert_eq!(x[0], 0.0);
        assert_eq!(x[50], 0.5);
        assert_eq!(x[100], 1.0);
        assert_eq!(x[70], 0.7);
    }

    #[test]
    fn from_fn_layout() {
        let g = TileGrid::from_fn(GridKind::Value, 3, GridMeta::default(), |c| {
            ScoreValue::Defined(10.0 * c.a + c.b)
        })
        .unwrap();
        g.validate().unwrap();
        assert_eq!(g.get(2, 1), ScoreValue::Defined(10.5));
        assert!(TileGrid::from_fn(GridKind::Value, 1, GridMeta::default(), |_| {
            ScoreValue::Undefined
        })
        .is_err());
    }

    #[test]
    fn validate_catches_shape() {
        let mut g = TileGrid::from_fn(GridKind::Value, 3, GridMeta::default(), |_| {
            ScoreValue::Undefined
        })
        .unwrap();
        g.values[1].pop();
        assert!(g.validate().is_err());
    }
}
