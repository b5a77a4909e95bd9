//! Named scores computed from a performance.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::perf::{Performance, ScoreValue};
use crate::stats::vut;

/// A score from the catalog, with its parameter when it has one.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Score {
    Ptn,
    Pfp,
    Pfn,
    Ptp,
    NegPrior,
    PosPrior,
    NegRate,
    PosRate,
    Accuracy,
    Tnr,
    Fpr,
    Tpr,
    Fnr,
    Npv,
    For,
    Ppv,
    Fdr,
    JaccardNeg,
    JaccardPos,
    /// `P({tn,tp} | {tn,fn,tp})`
    AccuracyNoFp,
    /// `P({tn,tp} | {tn,fp,tp})`
    AccuracyNoFn,
    /// `F_β` stored through `b = β²/(1+β²)`.
    FBeta { b: f64 },
    BennettS,
    Snpv,
    Sppv,
    Nlr,
    Plr,
    /// `(1−w)·TNR + w·TPR`
    WeightedAccuracy { w: f64 },
    BalancedAccuracy,
    Youden,
    DetC,
    CohenKappa,
    BiasIndex,
    Markedness,
    Acp,
    P4,
    GMean,
    Vut,
}

/// `b = β²/(1+β²)` computed without overflow; `β = ∞` gives 1.
pub fn fbeta_b(beta: f64) -> f64 {
    1.0 / (1.0 + 1.0 / (beta * beta))
}

impl Score {
    pub fn f_beta(beta: f64) -> Result<Self> {
        if beta.is_nan() || beta < 0.0 {
            return Err(Error::InvalidArgument(format!("beta = {beta} must be in [0, inf]")));
        }
        Ok(Score::FBeta { b: fbeta_b(beta) })
    }

    pub fn weighted_accuracy(w: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&w) {
            return Err(Error::InvalidArgument(format!("weight {w} must be in [0,1]")));
        }
        Ok(Score::WeightedAccuracy { w })
    }

    /// Scores that break the ranking axioms and should not be used to rank.
    pub fn non_ranking(&self) -> bool {
        matches!(self, Score::Acp | Score::P4 | Score::Vut)
    }

    /// The nine probabilistic scores that are also canonical ranking scores.
    pub fn probabilistic_ranking_scores() -> [Score; 9] {
        [
            Score::Npv,
            Score::AccuracyNoFp,
            Score::Tpr,
            Score::JaccardNeg,
            Score::Accuracy,
            Score::JaccardPos,
            Score::Tnr,
            Score::AccuracyNoFn,
            Score::Ppv,
        ]
    }

    pub fn evaluate(&self, p: &Performance) -> ScoreValue {
        catalog_score(self, p)
    }
}

impl fmt::Display for Score {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Score::Ptn => "PTN",
            Score::Pfp => "PFP",
            Score::Pfn => "PFN",
            Score::Ptp => "PTP",
            Score::NegPrior => "pi-",
            Score::PosPrior => "pi+",
            Score::NegRate => "tau-",
            Score::PosRate => "tau+",
            Score::Accuracy => "A",
            Score::Tnr => "TNR",
            Score::Fpr => "FPR",
            Score::Tpr => "TPR",
            Score::Fnr => "FNR",
            Score::Npv => "NPV",
            Score::For => "FOR",
            Score::Ppv => "PPV",
            Score::Fdr => "FDR",
            Score::JaccardNeg => "J-",
            Score::JaccardPos => "J+",
            Score::AccuracyNoFp => "A|noFP",
            Score::AccuracyNoFn => "A|noFN",
            Score::FBeta { b } => {
                if *b == 0.5 {
                    return f.write_str("F1");
                }
                let beta = (b / (1.0 - b)).sqrt();
                return write!(f, "F:{beta}");
            }
            Score::BennettS => "S",
            Score::Snpv => "SNPV",
            Score::Sppv => "SPPV",
            Score::Nlr => "NLR",
            Score::Plr => "PLR",
            Score::WeightedAccuracy { w } => return write!(f, "WA:{w}"),
            Score::BalancedAccuracy => "BA",
            Score::Youden => "JY",
            Score::DetC => "detC",
            Score::CohenKappa => "kappa",
            Score::BiasIndex => "BiasIndex",
            Score::Markedness => "markedness",
            Score::Acp => "ACP",
            Score::P4 => "P4",
            Score::GMean => "GMean",
            Score::Vut => "VUT",
        };
        f.write_str(s)
    }
}

fn parse_param(s: &str, what: &str) -> Result<f64> {
    let t = s.trim();
    if t.eq_ignore_ascii_case("inf") || t == "∞" {
        return Ok(f64::INFINITY);
    }
    t.parse::<f64>()
        .map_err(|_| Error::InvalidArgument(format!("cannot parse {what} parameter `{s}`")))
}

impl FromStr for Score {
    type Err = Error;

    /// Case-insensitive; `F<β>`, `F:<β>`, `Fbeta:<β>` and `WA:<w>` carry parameters.
    fn from_str(name: &str) -> Result<Self> {
        let raw = name.trim();
        let key = raw.to_ascii_lowercase();
        let plain = match key.as_str() {
            "ptn" | "rejection_rate" => Some(Score::Ptn),
            "pfp" => Some(Score::Pfp),
            "pfn" => Some(Score::Pfn),
            "ptp" | "detection_rate" => Some(Score::Ptp),
            "pi-" | "π−" | "π-" | "neg_prior" => Some(Score::NegPrior),
            "pi+" | "π+" | "pos_prior" | "prevalence" => Some(Score::PosPrior),
            "tau-" | "τ−" | "τ-" | "neg_rate" => Some(Score::NegRate),
            "tau+" | "τ+" | "pos_rate" => Some(Score::PosRate),
            "a" | "acc" | "accuracy" => Some(Score::Accuracy),
            "tnr" | "specificity" => Some(Score::Tnr),
            "fpr" => Some(Score::Fpr),
            "tpr" | "sensitivity" | "recall" => Some(Score::Tpr),
            "fnr" => Some(Score::Fnr),
            "npv" => Some(Score::Npv),
            "for" => Some(Score::For),
            "ppv" | "precision" => Some(Score::Ppv),
            "fdr" => Some(Score::Fdr),
            "j-" | "jneg" | "j−" => Some(Score::JaccardNeg),
            "j+" | "jpos" | "jaccard" | "iou" | "csi" => Some(Score::JaccardPos),
            "a|nofp" => Some(Score::AccuracyNoFp),
            "a|nofn" => Some(Score::AccuracyNoFn),
            "f1" | "dice" => Some(Score::FBeta { b: 0.5 }),
            "s" | "bennett" | "bennett_s" => Some(Score::BennettS),
            "snpv" => Some(Score::Snpv),
            "sppv" => Some(Score::Sppv),
            "nlr" => Some(Score::Nlr),
            "plr" => Some(Score::Plr),
            "ba" | "balanced_accuracy" => Some(Score::BalancedAccuracy),
            "jy" | "j_y" | "youden" | "informedness" => Some(Score::Youden),
            "detc" => Some(Score::DetC),
            "kappa" | "κ" | "cohen_kappa" => Some(Score::CohenKappa),
            "biasindex" | "bias_index" => Some(Score::BiasIndex),
            "markedness" => Some(Score::Markedness),
            "acp" => Some(Score::Acp),
            "p4" => Some(Score::P4),
            "gmean" | "g-mean" => Some(Score::GMean),
            "vut" => Some(Score::Vut),
            _ => None,
        };
        if let Some(s) = plain {
            return Ok(s);
        }
        match key.as_str() {
            "scott_pi" | "scottpi" | "scott's pi" | "fleiss_kappa" | "fleisskappa" => {
                return Err(Error::ReservedScore(raw.to_string()));
            }
            "g" | "g-measure" | "gmeasure" => {
                return Err(Error::InvalidArgument(format!(
                    "`{raw}` is ambiguous: use GMean or J+"
                )));
            }
            _ => {}
        }
        if let Some(rest) = key.strip_prefix("wa:") {
            return Score::weighted_accuracy(parse_param(rest, "WA")?);
        }
        for prefix in ["fbeta:", "f:", "f"] {
            if let Some(rest) = key.strip_prefix(prefix) {
                if let Ok(beta) = parse_param(rest, "F-beta") {
                    return Score::f_beta(beta);
                }
            }
        }
        Err(Error::UnknownScore(raw.to_string()))
    }
}

fn ratio(num: f64, den: f64) -> Option<f64> {
    ScoreValue::ratio(num, den).value()
}

/// Evaluates a catalog score on `p`.
pub fn catalog_score(score: &Score, p: &Performance) -> ScoreValue {
    let (tn, fp, fn_, tp) = (p.tn(), p.fp(), p.fn_(), p.tp());
    let tnr = || ratio(tn, tn + fp);
    let tpr = || ratio(tp, fn_ + tp);
    let npv = || ratio(tn, tn + fn_);
    let ppv = || ratio(tp, fp + tp);
    let v: Option<f64> = match *score {
        Score::Ptn => Some(tn),
        Score::Pfp => Some(fp),
        Score::Pfn => Some(fn_),
        Score::Ptp => Some(tp),
        Score::NegPrior => Some(p.neg_prior()),
        Score::PosPrior => Some(p.pos_prior()),
        Score::NegRate => Some(p.neg_rate()),
        Score::PosRate => Some(p.pos_rate()),
        // Divided by the total so it matches the canonical score at (½, ½) bitwise.
        Score::Accuracy => ratio(tn + tp, (tn + tp) + (fp + fn_)),
        Score::Tnr => tnr(),
        Score::Fpr => ratio(fp, tn + fp),
        Score::Tpr => tpr(),
        Score::Fnr => ratio(fn_, fn_ + tp),
        Score::Npv => npv(),
        Score::For => ratio(fn_, tn + fn_),
        Score::Ppv => ppv(),
        Score::Fdr => ratio(fp, fp + tp),
        Score::JaccardNeg => ratio(tn, tn + fp + fn_),
        Score::JaccardPos => ratio(tp, fp + fn_ + tp),
        Score::AccuracyNoFp => ratio(tn + tp, tn + fn_ + tp),
        Score::AccuracyNoFn => ratio(tn + tp, tn + fp + tp),
        // Same operation order as the canonical score at (1, b).
        Score::FBeta { b } => ratio(tp, tp + ((1.0 - b) * fp + b * fn_)),
        Score::BennettS => Some(2.0 * (tn + tp) - 1.0),
        Score::Snpv => {
            let (t, f) = (tnr(), ratio(fn_, fn_ + tp));
            t.zip(f).and_then(|(t, f)| ratio(t, t + f))
        }
        Score::Sppv => {
            let (t, f) = (tpr(), ratio(fp, tn + fp));
            t.zip(f).and_then(|(t, f)| ratio(t, f + t))
        }
        Score::Nlr => ratio(fn_, fn_ + tp).zip(tnr()).and_then(|(f, t)| ratio(f, t)),
        Score::Plr => tpr().zip(ratio(fp, tn + fp)).and_then(|(t, f)| ratio(t, f)),
        Score::WeightedAccuracy { w } => tnr().zip(tpr()).map(|(n, q)| (1.0 - w) * n + w * q),
        Score::BalancedAccuracy => tnr().zip(tpr()).map(|(n, q)| 0.5 * (n + q)),
        Score::Youden => tnr().zip(tpr()).map(|(n, q)| n + q - 1.0),
        Score::DetC => Some(tn * tp - fp * fn_),
        Score::CohenKappa => {
            let ea = p.neg_prior() * p.neg_rate() + p.pos_prior() * p.pos_rate();
            ratio(tn + tp - ea, 1.0 - ea)
        }
        Score::BiasIndex => Some(p.pos_rate() - p.pos_prior()),
        Score::Markedness => npv().zip(ppv()).map(|(n, q)| n + q - 1.0),
        Score::Acp => four(tnr(), tpr(), npv(), ppv()).map(|v| v.iter().sum::<f64>() / 4.0),
        Score::P4 => four(tnr(), tpr(), npv(), ppv()).map(|v| {
            if v.iter().any(|x| *x == 0.0) {
                0.0
            } else {
                4.0 / v.iter().map(|x| 1.0 / x).sum::<f64>()
            }
        }),
        Score::GMean => tnr().zip(tpr()).map(|(n, q)| (n * q).sqrt()),
        Score::Vut => Some(vut(p)),
    };
    v.into()
}

fn four(a: Option<f64>, b: Option<f64>, c: Option<f64>, d: Option<f64>) -> Option<[f64; 4]> {
    Some([a?, b?, c?, d?])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::perf::{canonical_score, TileCoord};

    fn perf(tn: f64, fp: f64, fn_: f64, tp: f64) -> Performance {
        Performance::new(tn, fp, fn_, tp).unwrap()
    }

    fn val(s: &str, p: &Performance) -> f64 {
        s.parse::<Score>().unwrap().evaluate(p).unwrap()
    }

    #[test]
    fn balanced_accuracy_of_p2_is_prior_free() {
        for p in [
            perf(0.40, 0.40, 0.04, 0.16),
            perf(0.25, 0.25, 0.10, 0.40),
            perf(0.10, 0.10, 0.16, 0.64),
        ] {
            assert!((val("BA", &p) - 0.65).abs() < 1e-12);
        }
    }

    #[test]
    fn kappa_of_no_skill_is_zero() {
        let p = perf(0.7 * 0.4, 0.7 * 0.6, 0.3 * 0.4, 0.3 * 0.6);
        assert!(val("kappa", &p).abs() < 1e-12);
    }

    #[test]
    fn p4_symmetric() {
        let p = perf(0.4, 0.1, 0.1, 0.4);
        assert!((val("P4", &p) - 0.8).abs() < 1e-12);
        assert!((val("ACP", &p) - 0.8).abs() < 1e-12);
    }

    #[test]
    fn hand_values() {
        let p = perf(0.56, 0.24, 0.06, 0.14);
        assert!((val("TNR", &p) - 0.7).abs() < 1e-12);
        assert!((val("FPR", &p) - 0.3).abs() < 1e-12);
        assert!((val("TPR", &p) - 0.7).abs() < 1e-12);
        assert!((val("NPV", &p) - 0.56 / 0.62).abs() < 1e-12);
        assert!((val("PPV", &p) - 0.14 / 0.38).abs() < 1e-12);
        assert!((val("J-", &p) - 0.56 / 0.86).abs() < 1e-12);
        assert!((val("J+", &p) - 0.14 / 0.44).abs() < 1e-12);
        assert!((val("S", &p) - 0.4).abs() < 1e-12);
        assert!((val("JY", &p) - 0.4).abs() < 1e-12);
        assert!((val("detC", &p) - 0.8 * 0.2 * 0.4).abs() < 1e-12);
        assert!((val("NLR", &p) - 0.3 / 0.7).abs() < 1e-12);
        assert!((val("PLR", &p) - 0.7 / 0.3).abs() < 1e-12);
        assert!((val("SNPV", &p) - 0.7).abs() < 1e-12);
        assert!((val("BiasIndex", &p) - (0.38 - 0.2)).abs() < 1e-12);
        assert!((val("GMean", &p) - 0.7).abs() < 1e-12);
        let ea: f64 = 0.8 * 0.62 + 0.2 * 0.38;
        assert!((val("kappa", &p) - (0.7 - ea) / (1.0 - ea)).abs() < 1e-12);
        let jp = val("J+", &p);
        assert!((val("F1", &p) - 2.0 * jp / (jp + 1.0)).abs() < 1e-12);
        assert!((val("markedness", &p) - (0.56 / 0.62 + 0.14 / 0.38 - 1.0)).abs() < 1e-12);
    }

    #[test]
    fn domain_violations() {
        let all_neg = perf(0.8, 0.0, 0.2, 0.0);
        assert_eq!("PPV".parse::<Score>().unwrap().evaluate(&all_neg), ScoreValue::Undefined);
        let zero_tnr = perf(0.0, 0.5, 0.2, 0.3);
        assert_eq!("NLR".parse::<Score>().unwrap().evaluate(&zero_tnr), ScoreValue::Undefined);
        let constant = perf(0.5, 0.0, 0.5, 0.0);
        assert_eq!("kappa".parse::<Score>().unwrap().evaluate(&constant), ScoreValue::Defined(0.0));
        let degenerate = perf(1.0, 0.0, 0.0, 0.0);
        assert_eq!("kappa".parse::<Score>().unwrap().evaluate(&degenerate), ScoreValue::Undefined);
    }

    #[test]
    fn fbeta_limits() {
        let p = perf(0.3, 0.2, 0.1, 0.4);
        let inf = Score::f_beta(f64::INFINITY).unwrap().evaluate(&p);
        let zero = Score::f_beta(0.0).unwrap().evaluate(&p);
        assert_eq!(inf, Score::Tpr.evaluate(&p));
        assert_eq!(zero, Score::Ppv.evaluate(&p));
        assert_eq!("F2".parse::<Score>().unwrap(), Score::f_beta(2.0).unwrap());
        assert_eq!("Fbeta:0.5".parse::<Score>().unwrap(), Score::f_beta(0.5).unwrap());
        assert_eq!("Finf".parse::<Score>().unwrap(), Score::FBeta { b: 1.0 });
        let b2 = 4.0;
        let f2 = (1.0 + b2) * 0.4 / ((1.0 + b2) * 0.4 + b2 * 0.1 + 0.2);
        assert!((Score::f_beta(2.0).unwrap().evaluate(&p).unwrap() - f2).abs() < 1e-12);
    }

    #[test]
    fn fbeta_matches_canonical_bitwise() {
        let p = perf(0.3, 0.2, 0.1, 0.4);
        let s = Score::f_beta(1.7).unwrap();
        let Score::FBeta { b } = s else { unreachable!() };
        assert_eq!(s.evaluate(&p), canonical_score(TileCoord::new(1.0, b).unwrap(), &p));
    }

    #[test]
    fn names_and_flags() {
        assert!(matches!("scott_pi".parse::<Score>(), Err(Error::ReservedScore(_))));
        assert!(matches!("fleiss_kappa".parse::<Score>(), Err(Error::ReservedScore(_))));
        assert!(matches!("G".parse::<Score>(), Err(Error::InvalidArgument(_))));
        assert!(matches!("nope".parse::<Score>(), Err(Error::UnknownScore(_))));
        assert!(Score::Acp.non_ranking() && Score::P4.non_ranking() && Score::Vut.non_ranking());
        assert!(!Score::Accuracy.non_ranking());
        for s in Score::probabilistic_ranking_scores() {
            assert_eq!(s.to_string().parse::<Score>().unwrap(), s);
        }
        assert_eq!("WA:0.3".parse::<Score>().unwrap(), Score::WeightedAccuracy { w: 0.3 });
        assert!("WA:1.3".parse::<Score>().is_err());
    }
}
