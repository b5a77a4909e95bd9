//! Canonical ranking scores seen in ROC space `(FPR, TPR)` at fixed priors.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::perf::{canonical_score, Performance, Priors, ScoreValue, TileCoord};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RocPoint {
    pub fpr: f64,
    pub tpr: f64,
}

impl RocPoint {
    pub fn new(fpr: f64, tpr: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&fpr) || !(0.0..=1.0).contains(&tpr) {
            return Err(Error::InvalidArgument(format!("ROC point ({fpr}, {tpr}) outside [0,1]^2")));
        }
        Ok(RocPoint { fpr, tpr })
    }

    pub fn to_performance(&self, priors: Priors) -> Performance {
        let (n, p) = (priors.neg(), priors.pos());
        Performance::raw(n * (1.0 - self.fpr), n * self.fpr, p * (1.0 - self.tpr), p * self.tpr)
    }

    /// `(FPR, TPR)` of a performance with non-zero priors.
    pub fn of(p: &Performance) -> Result<Self> {
        let (n, q) = (p.neg_prior(), p.pos_prior());
        if n == 0.0 || q == 0.0 {
            return Err(Error::InvalidPriors("ROC needs both classes present".into()));
        }
        Ok(RocPoint { fpr: p.fp() / n, tpr: p.tp() / q })
    }
}

/// `u·fpr + v·tpr + w = 0` with `u² + v² = 1`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HomLine {
    pub u: f64,
    pub v: f64,
    pub w: f64,
}

impl HomLine {
    pub fn residual(&self, pt: RocPoint) -> f64 {
        self.u * pt.fpr + self.v * pt.tpr + self.w
    }
}

/// Homogeneous point; `h = 0` is a point at infinity.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HomPoint {
    pub x: f64,
    pub y: f64,
    pub h: f64,
}

impl HomPoint {
    pub fn is_at_infinity(&self) -> bool {
        self.h == 0.0
    }

    pub fn affine(&self) -> Option<(f64, f64)> {
        (!self.is_at_infinity()).then(|| (self.x / self.h, self.y / self.h))
    }
}

/// Position of a pencil vertex relative to the ROC square.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VertexSide {
    BottomLeft,
    UpperRight,
    AtInfinity,
    Elsewhere,
}

pub fn score_from_roc(pt: RocPoint, priors: Priors, c: TileCoord) -> Result<ScoreValue> {
    priors.require_interior()?;
    Ok(canonical_score(c, &pt.to_performance(priors)))
}

/// Points of ROC space where `R_{a,b}` equals `value`.
///
/// The residual is positive on the side of better performances.
pub fn iso_line(value: f64, c: TileCoord, priors: Priors) -> Result<HomLine> {
    priors.require_interior()?;
    if !(0.0..=1.0).contains(&value) {
        return Err(Error::InvalidArgument(format!("iso value {value} not in [0,1]")));
    }
    let (n, p, a, b, s) = (priors.neg(), priors.pos(), c.a, c.b, value);
    // (1−s)·numerator − s·(denominator − numerator), written in fpr and tpr.
    let u = -n * ((1.0 - s) * (1.0 - a) + s * (1.0 - b));
    let v = p * ((1.0 - s) * a + s * b);
    let w = (1.0 - s) * (1.0 - a) * n - s * b * p;
    let norm = u.hypot(v);
    if norm == 0.0 {
        return Err(Error::InvalidArgument("score is constant over ROC".into()));
    }
    Ok(HomLine { u: u / norm, v: v / norm, w: w / norm })
}

/// Common point of all iso-lines of `R_{a,b}`.
pub fn pencil_vertex(c: TileCoord, priors: Priors) -> Result<HomPoint> {
    let l0 = iso_line(0.0, c, priors)?;
    let l1 = iso_line(1.0, c, priors)?;
    let x = l0.v * l1.w - l0.w * l1.v;
    let y = l0.w * l1.u - l0.u * l1.w;
    let mut h = l0.u * l1.v - l0.v * l1.u;
    if c.a == c.b {
        h = 0.0;
    }
    Ok(HomPoint { x, y, h })
}

pub fn vertex_side(v: &HomPoint) -> VertexSide {
    match v.affine() {
        None => VertexSide::AtInfinity,
        Some((x, y)) if x <= 0.0 && y <= 0.0 => VertexSide::BottomLeft,
        Some((x, y)) if x >= 1.0 && y >= 1.0 => VertexSide::UpperRight,
        Some(_) => VertexSide::Elsewhere,
    }
}

/// Direction along which the score varies linearly, and its rate.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ValueAxis {
    /// Unit vector of slope `−π−/π+`, pointing towards lower FPR.
    pub direction: [f64; 2],
    pub slope: f64,
    pub value_at_anchor: ScoreValue,
    /// Change of the score per unit length along `direction`.
    pub rate: ScoreValue,
}

/// Along slope `−π−/π+` the denominator of `R_{a,b}` is constant, so the
/// score is exactly affine there.
pub fn linear_value_axis(c: TileCoord, priors: Priors, anchor: RocPoint) -> Result<ValueAxis> {
    priors.require_interior()?;
    let (n, p) = (priors.neg(), priors.pos());
    let norm = n.hypot(p);
    let direction = [-p / norm, n / norm];
    let perf = anchor.to_performance(priors);
    let den = (1.0 - c.a) * perf.tn() + (1.0 - c.b) * perf.fp() + c.b * perf.fn_() + c.a * perf.tp();
    Ok(ValueAxis {
        direction,
        slope: -n / p,
        value_at_anchor: canonical_score(c, &perf),
        rate: ScoreValue::ratio(n * p / norm, den),
    })
}

/// Everything the ROC panel draws for one `(a, b)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RocPencil {
    pub coord: TileCoord,
    pub priors: Priors,
    pub zero_line: HomLine,
    pub one_line: HomLine,
    pub vertex: HomPoint,
    pub vertex_side: VertexSide,
    pub value_axis: ValueAxis,
    pub entities: Vec<RocEntity>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RocEntity {
    pub name: String,
    pub point: RocPoint,
    pub score: ScoreValue,
    pub iso_line: Option<HomLine>,
}

pub fn roc_pencil(c: TileCoord, priors: Priors, entities: &[(String, Performance)]) -> Result<RocPencil> {
    let vertex = pencil_vertex(c, priors)?;
    let mut out = Vec::with_capacity(entities.len());
    for (name, perf) in entities {
        let point = RocPoint::of(perf)?;
        let score = score_from_roc(point, priors, c)?;
        let iso_line = match score.value() {
            Some(v) => Some(iso_line(v.clamp(0.0, 1.0), c, priors)?),
            None => None,
        };
        out.push(RocEntity { name: name.clone(), point, score, iso_line });
    }
    Ok(RocPencil {
        coord: c,
        priors,
        zero_line: iso_line(0.0, c, priors)?,
        one_line: iso_line(1.0, c, priors)?,
        vertex,
        vertex_side: vertex_side(&vertex),
        value_axis: linear_value_axis(c, priors, RocPoint { fpr: 0.5, tpr: 0.5 })?,
        entities: out,
    })
}
