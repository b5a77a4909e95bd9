//! Random performances.
//!
//! Sample `i` of a spec with seed `s` is drawn from ChaCha8 keyed by
//! `seed_from_u64(s)` with the stream number set to `i`, so any subset of
//! samples can be regenerated independently. Uniforms are 53-bit floats in
//! `[0,1)`. With `α = 1` the Gamma draws are `−ln(1−U)`; other `α` use the
//! Marsaglia–Tsang sampler of `rand_distr`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma};

use crate::error::{Error, Result};
use crate::perf::{Performance, Priors};

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Constraint {
    None,
    /// TNR and TPR independent and uniform at these priors.
    FixedPriors(Priors),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SampleSpec {
    pub n: usize,
    pub seed: u64,
    pub constraint: Constraint,
    /// Dirichlet concentration, used when unconstrained.
    pub concentration: f64,
}

impl SampleSpec {
    pub fn uniform(n: usize, seed: u64) -> Self {
        SampleSpec { n, seed, constraint: Constraint::None, concentration: 1.0 }
    }

    pub fn fixed_priors(n: usize, seed: u64, priors: Priors) -> Self {
        SampleSpec { n, seed, constraint: Constraint::FixedPriors(priors), concentration: 1.0 }
    }

    fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::InvalidArgument("sample count must be at least 1".into()));
        }
        if !(self.concentration > 0.0 && self.concentration.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "concentration {} must be positive",
                self.concentration
            )));
        }
        if let Constraint::FixedPriors(p) = self.constraint {
            p.require_interior()?;
        }
        Ok(())
    }
}

pub fn sample_performances(spec: &SampleSpec) -> Result<Vec<Performance>> {
    spec.validate()?;
    let base = ChaCha8Rng::seed_from_u64(spec.seed);
    let gamma = Gamma::new(spec.concentration, 1.0)
        .map_err(|e| Error::InvalidArgument(format!("bad concentration: {e}")))?;
    let out = (0..spec.n)
        .map(|i| {
            let mut rng = base.clone();
            rng.set_stream(i as u64);
            match spec.constraint {
                Constraint::FixedPriors(p) => {
                    let tnr: f64 = rng.random();
                    let tpr: f64 = rng.random();
                    Performance::from_rates(p, tnr, tpr).expect("rates lie in [0,1)")
                }
                Constraint::None => dirichlet(&mut rng, spec.concentration, &gamma),
            }
        })
        .collect();
    Ok(out)
}

fn dirichlet(rng: &mut ChaCha8Rng, alpha: f64, gamma: &Gamma<f64>) -> Performance {
    loop {
        let mut g = [0.0f64; 4];
        for x in g.iter_mut() {
            *x = if alpha == 1.0 {
                let u: f64 = rng.random();
                -(1.0 - u).ln()
            } else {
                gamma.sample(rng)
            };
        }
        let s: f64 = g.iter().sum();
        if s > 0.0 {
            return Performance::raw(g[0] / s, g[1] / s, g[2] / s, g[3] / s);
        }
    }
}
