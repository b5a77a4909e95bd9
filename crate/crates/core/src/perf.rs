//! Performances, events, importances and the ranking score `R_I`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Tolerance on the sum of the four components of a [`Performance`].
pub const SUM_TOLERANCE: f64 = 1e-12;

/// One of the four outcomes of a two-class crisp classification.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Outcome {
    Tn,
    Fp,
    Fn,
    Tp,
}

impl Outcome {
    pub const ALL: [Outcome; 4] = [Outcome::Tn, Outcome::Fp, Outcome::Fn, Outcome::Tp];

    fn index(self) -> usize {
        match self {
            Outcome::Tn => 0,
            Outcome::Fp => 1,
            Outcome::Fn => 2,
            Outcome::Tp => 3,
        }
    }

    /// `S = 1` for tn and tp.
    pub fn is_satisfying(self) -> bool {
        matches!(self, Outcome::Tn | Outcome::Tp)
    }

    pub fn name(self) -> &'static str {
        ["tn", "fp", "fn", "tp"][self.index()]
    }
}

impl FromStr for Outcome {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "tn" => Ok(Outcome::Tn),
            "fp" => Ok(Outcome::Fp),
            "fn" => Ok(Outcome::Fn),
            "tp" => Ok(Outcome::Tp),
            other => Err(Error::InvalidEvent(format!("unknown outcome `{other}`"))),
        }
    }
}

/// Result of evaluating a score: a finite real, or `Undefined` when the
/// performance lies outside the domain of the score.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ScoreValue {
    Defined(f64),
    Undefined,
}

impl ScoreValue {
    /// `num / den`, undefined when `den` is exactly zero.
    pub fn ratio(num: f64, den: f64) -> Self {
        if den == 0.0 {
            ScoreValue::Undefined
        } else {
            ScoreValue::Defined(num / den)
        }
    }

    pub fn value(self) -> Option<f64> {
        match self {
            ScoreValue::Defined(v) => Some(v),
            ScoreValue::Undefined => None,
        }
    }

    pub fn is_defined(self) -> bool {
        matches!(self, ScoreValue::Defined(_))
    }

    /// Panics on `Undefined`; meant for tests and call sites that already checked.
    pub fn unwrap(self) -> f64 {
        self.value().expect("score value is undefined")
    }
}

impl From<Option<f64>> for ScoreValue {
    fn from(v: Option<f64>) -> Self {
        match v {
            Some(x) => ScoreValue::Defined(x),
            None => ScoreValue::Undefined,
        }
    }
}

impl fmt::Display for ScoreValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScoreValue::Defined(v) => write!(f, "{v}"),
            ScoreValue::Undefined => f.write_str("undefined"),
        }
    }
}

impl Serialize for ScoreValue {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.value().serialize(s)
    }
}

impl<'de> Deserialize<'de> for ScoreValue {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        Ok(Option::<f64>::deserialize(d)?.into())
    }
}

/// Class priors `(π−, π+)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawPriors")]
pub struct Priors {
    neg: f64,
    pos: f64,
}

#[derive(Deserialize)]
struct RawPriors {
    neg: f64,
    pos: f64,
}

impl TryFrom<RawPriors> for Priors {
    type Error = Error;

    fn try_from(r: RawPriors) -> Result<Self> {
        let p = Priors::from_neg(r.neg)?;
        if (p.pos - r.pos).abs() > 1e-9 {
            return Err(Error::InvalidPriors(format!(
                "priors {} and {} do not sum to 1",
                r.neg, r.pos
            )));
        }
        Ok(p)
    }
}

impl Priors {
    /// Priors from the negative-class prior `π−` in `[0,1]`.
    pub fn from_neg(neg: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&neg) {
            return Err(Error::InvalidPriors(format!("negative prior {neg} not in [0,1]")));
        }
        Ok(Priors { neg, pos: 1.0 - neg })
    }

    /// Priors from the positive-class prior `π+` in `[0,1]`.
    pub fn from_pos(pos: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&pos) {
            return Err(Error::InvalidPriors(format!("positive prior {pos} not in [0,1]")));
        }
        Ok(Priors { neg: 1.0 - pos, pos })
    }

    pub fn balanced() -> Self {
        Priors { neg: 0.5, pos: 0.5 }
    }

    pub fn neg(&self) -> f64 {
        self.neg
    }

    pub fn pos(&self) -> f64 {
        self.pos
    }

    /// Errors unless both priors are strictly inside `(0,1)`.
    pub fn require_interior(&self) -> Result<()> {
        if self.neg > 0.0 && self.pos > 0.0 {
            Ok(())
        } else {
            Err(Error::InvalidPriors(format!(
                "priors ({}, {}) must both be in (0,1)",
                self.neg, self.pos
            )))
        }
    }

    pub fn is_balanced(&self) -> bool {
        self.neg == 0.5
    }

    pub fn approx_eq(&self, other: &Priors, tol: f64) -> bool {
        (self.neg - other.neg).abs() <= tol
    }
}

/// A probability measure over `{tn, fp, fn, tp}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawPerformance")]
pub struct Performance {
    tn: f64,
    fp: f64,
    #[serde(rename = "fn")]
    fn_: f64,
    tp: f64,
}

#[derive(Deserialize)]
struct RawPerformance {
    tn: f64,
    fp: f64,
    #[serde(rename = "fn")]
    fn_: f64,
    tp: f64,
}

impl TryFrom<RawPerformance> for Performance {
    type Error = Error;

    fn try_from(r: RawPerformance) -> Result<Self> {
        Performance::new(r.tn, r.fp, r.fn_, r.tp)
    }
}

fn check_component(name: &str, v: f64) -> Result<()> {
    if !v.is_finite() || v < 0.0 {
        return Err(Error::InvalidPerformance(format!("{name} = {v} must be finite and >= 0")));
    }
    Ok(())
}

impl Performance {
    /// Strict constructor: components must be non-negative and sum to 1.
    pub fn new(tn: f64, fp: f64, fn_: f64, tp: f64) -> Result<Self> {
        for (name, v) in [("tn", tn), ("fp", fp), ("fn", fn_), ("tp", tp)] {
            check_component(name, v)?;
        }
        let sum = tn + fp + fn_ + tp;
        if (sum - 1.0).abs() > SUM_TOLERANCE {
            return Err(Error::InvalidPerformance(format!("components sum to {sum}, not 1")));
        }
        Ok(Performance { tn, fp, fn_, tp })
    }

    /// Counts (or probabilities) normalized by their total.
    ///
    /// Inputs already summing to 1 are kept bit-for-bit.
    pub fn from_counts(tn: f64, fp: f64, fn_: f64, tp: f64) -> Result<Self> {
        for (name, v) in [("tn", tn), ("fp", fp), ("fn", fn_), ("tp", tp)] {
            check_component(name, v)?;
        }
        let total = tn + fp + fn_ + tp;
        if total == 0.0 {
            return Err(Error::EmptyMatrix);
        }
        if (total - 1.0).abs() <= SUM_TOLERANCE {
            return Ok(Performance { tn, fp, fn_, tp });
        }
        Ok(Performance { tn: tn / total, fp: fp / total, fn_: fn_ / total, tp: tp / total })
    }

    /// Performance with given priors and class-conditional rates.
    pub fn from_rates(priors: Priors, tnr: f64, tpr: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&tnr) || !(0.0..=1.0).contains(&tpr) {
            return Err(Error::InvalidPerformance(format!("rates ({tnr}, {tpr}) not in [0,1]")));
        }
        let tn = priors.neg * tnr;
        let tp = priors.pos * tpr;
        Ok(Performance { tn, fp: priors.neg - tn, fn_: priors.pos - tp, tp })
    }

    /// Components stored without any check. Callers guarantee validity.
    pub(crate) fn raw(tn: f64, fp: f64, fn_: f64, tp: f64) -> Self {
        Performance { tn, fp, fn_, tp }
    }

    pub fn tn(&self) -> f64 {
        self.tn
    }

    pub fn fp(&self) -> f64 {
        self.fp
    }

    pub fn fn_(&self) -> f64 {
        self.fn_
    }

    pub fn tp(&self) -> f64 {
        self.tp
    }

    pub fn get(&self, o: Outcome) -> f64 {
        self.components()[o.index()]
    }

    /// `[tn, fp, fn, tp]`
    pub fn components(&self) -> [f64; 4] {
        [self.tn, self.fp, self.fn_, self.tp]
    }

    pub fn neg_prior(&self) -> f64 {
        self.tn + self.fp
    }

    pub fn pos_prior(&self) -> f64 {
        self.fn_ + self.tp
    }

    pub fn neg_rate(&self) -> f64 {
        self.tn + self.fn_
    }

    pub fn pos_rate(&self) -> f64 {
        self.fp + self.tp
    }

    pub fn priors(&self) -> Priors {
        let pos = self.pos_prior().clamp(0.0, 1.0);
        Priors { neg: 1.0 - pos, pos }
    }

    /// `P(E)`
    pub fn prob(&self, e: Event) -> f64 {
        Outcome::ALL.iter().filter(|o| e.contains(**o)).map(|o| self.get(*o)).sum()
    }

    /// `t·self + (1−t)·other`
    pub fn mix(&self, other: &Performance, t: f64) -> Performance {
        let s = 1.0 - t;
        Performance {
            tn: t * self.tn + s * other.tn,
            fp: t * self.fp + s * other.fp,
            fn_: t * self.fn_ + s * other.fn_,
            tp: t * self.tp + s * other.tp,
        }
    }
}

/// A subset of the sample space, stored as a 4-bit mask.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Event(u8);

impl Event {
    pub const EMPTY: Event = Event(0);
    pub const OMEGA: Event = Event(0b1111);

    pub fn new(outcomes: &[Outcome]) -> Self {
        Event(outcomes.iter().fold(0, |m, o| m | (1 << o.index())))
    }

    pub fn from_bits(bits: u8) -> Result<Self> {
        if bits > 0b1111 {
            return Err(Error::InvalidEvent(format!("bit mask {bits:#b} has more than 4 outcomes")));
        }
        Ok(Event(bits))
    }

    pub fn bits(self) -> u8 {
        self.0
    }

    pub fn contains(self, o: Outcome) -> bool {
        self.0 & (1 << o.index()) != 0
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn is_subset_of(self, other: Event) -> bool {
        self.0 & !other.0 == 0
    }
}

impl fmt::Display for Event {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<&str> =
            Outcome::ALL.iter().filter(|o| self.contains(**o)).map(|o| o.name()).collect();
        write!(f, "{{{}}}", names.join(","))
    }
}

impl FromStr for Event {
    type Err = Error;

    /// Accepts `tn,tp`, `{tn,tp}` or `omega`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().trim_start_matches('{').trim_end_matches('}');
        if s.eq_ignore_ascii_case("omega") {
            return Ok(Event::OMEGA);
        }
        let mut out = Vec::new();
        for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            out.push(part.parse::<Outcome>()?);
        }
        Ok(Event::new(&out))
    }
}

/// `P(E)` for `∅ ⊊ E ⊊ Ω`.
pub fn unconditional_probabilistic_score(e: Event, p: &Performance) -> Result<f64> {
    if e.is_empty() || e == Event::OMEGA {
        return Err(Error::InvalidEvent(format!("{e} must be a non-empty proper subset")));
    }
    Ok(p.prob(e))
}

/// `P(E1 | E2)` for `∅ ⊊ E1 ⊊ E2 ⊆ Ω`; undefined when `P(E2) = 0`.
pub fn conditional_probabilistic_score(e1: Event, e2: Event, p: &Performance) -> Result<ScoreValue> {
    if e1.is_empty() || e1 == e2 || !e1.is_subset_of(e2) {
        return Err(Error::InvalidEvent(format!("need ∅ ⊊ {e1} ⊊ {e2}")));
    }
    Ok(ScoreValue::ratio(p.prob(e1), p.prob(e2)))
}

/// Canonical coordinate `(a, b)` on the Tile.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(into = "[f64; 2]", try_from = "[f64; 2]")]
pub struct TileCoord {
    pub a: f64,
    pub b: f64,
}

impl TileCoord {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&a) || !(0.0..=1.0).contains(&b) {
            return Err(Error::CoordOutOfRange { a, b });
        }
        Ok(TileCoord { a, b })
    }
}

impl From<TileCoord> for [f64; 2] {
    fn from(c: TileCoord) -> Self {
        [c.a, c.b]
    }
}

impl TryFrom<[f64; 2]> for TileCoord {
    type Error = Error;

    fn try_from(v: [f64; 2]) -> Result<Self> {
        TileCoord::new(v[0], v[1])
    }
}

/// Non-negative importance weights over the four outcomes.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Importance {
    pub tn: f64,
    pub fp: f64,
    #[serde(rename = "fn")]
    pub fn_: f64,
    pub tp: f64,
}

impl Importance {
    pub fn new(tn: f64, fp: f64, fn_: f64, tp: f64) -> Result<Self> {
        for v in [tn, fp, fn_, tp] {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::InvalidImportance(format!("weight {v} must be finite and >= 0")));
            }
        }
        if tn + tp <= 0.0 || fp + fn_ <= 0.0 {
            return Err(Error::InvalidImportance(
                "need I(tn)+I(tp) > 0 and I(fp)+I(fn) > 0".into(),
            ));
        }
        Ok(Importance { tn, fp, fn_, tp })
    }

    /// `I_{a,b} = (1−a, 1−b, b, a)`
    pub fn canonical(c: TileCoord) -> Self {
        Importance { tn: 1.0 - c.a, fp: 1.0 - c.b, fn_: c.b, tp: c.a }
    }

    pub fn canonicalize(&self) -> TileCoord {
        TileCoord { a: self.tp / (self.tn + self.tp), b: self.fn_ / (self.fp + self.fn_) }
    }
}

/// `R_I(P)`
pub fn ranking_score(i: &Importance, p: &Performance) -> ScoreValue {
    let num = i.tn * p.tn + i.tp * p.tp;
    let den = num + (i.fp * p.fp + i.fn_ * p.fn_);
    ScoreValue::ratio(num, den)
}

/// `R_{a,b}(P)`
pub fn canonical_score(c: TileCoord, p: &Performance) -> ScoreValue {
    ranking_score(&Importance::canonical(c), p)
}

/// Outcome of comparing two performances under a score.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PerfOrdering {
    Worse,
    Equivalent,
    Better,
    Incomparable,
}

/// Orders `p1` relative to `p2` under `R_I`.
pub fn compare(p1: &Performance, p2: &Performance, i: &Importance) -> PerfOrdering {
    compare_values(ranking_score(i, p1), ranking_score(i, p2), p1 == p2)
}

pub(crate) fn compare_values(s1: ScoreValue, s2: ScoreValue, same: bool) -> PerfOrdering {
    match (s1, s2) {
        (ScoreValue::Defined(x), ScoreValue::Defined(y)) => {
            if x < y {
                PerfOrdering::Worse
            } else if x > y {
                PerfOrdering::Better
            } else {
                PerfOrdering::Equivalent
            }
        }
        _ if same => PerfOrdering::Equivalent,
        _ => PerfOrdering::Incomparable,
    }
}
