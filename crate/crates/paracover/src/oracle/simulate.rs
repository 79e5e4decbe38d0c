//! Seeded Monte Carlo simulation of annual terminal wealth.
//!
//! Generator: ChaCha12 (`rand_chacha` 0.3, output stable across platforms).
//! Year `i` draws from the stream with index `i` of the seeded cipher, so
//! results are bit-identical for a given `(seed, num_years, antithetic)`
//! regardless of how the year range is chunked across threads; chunks are a
//! fixed 65,536 units and partial accumulators merge in chunk order.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::sampling::{sample_count, sample_severity};
use super::stats::MomentAccumulator;
use crate::error::{Error, Result};
use crate::objective::Scenario;
use crate::pricing;

const CHUNK: u64 = 1 << 16;

/// Simulation length, seed, and antithetic pairing flag.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SimulationConfig {
    num_years: u64,
    seed: u64,
    antithetic: bool,
}

impl SimulationConfig {
    pub fn new(num_years: u64, seed: u64) -> Result<Self> {
        if num_years == 0 {
            return Err(Error::InvalidParameter {
                name: "num_years",
                value: 0.0,
                requirement: "at least 1",
            });
        }
        Ok(Self {
            num_years,
            seed,
            antithetic: false,
        })
    }

    /// Pair each even year with an odd year driven by the complemented
    /// uniform stream. Point estimates remain unbiased; the reported
    /// standard errors keep the independent-year formula and are
    /// conservative for the mean under the induced negative correlation.
    pub fn with_antithetic(mut self, antithetic: bool) -> Self {
        self.antithetic = antithetic;
        self
    }

    pub fn num_years(&self) -> u64 {
        self.num_years
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn antithetic(&self) -> bool {
        self.antithetic
    }
}

/// Contract design to simulate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Design {
    /// No contract: `W = w0 - S`.
    None,
    /// Excess-of-loss at the given deductible.
    Indemnity(f64),
    /// Fixed payment per event.
    Parametric(f64),
}

/// Sample statistics of simulated wealth. `mv = mean - beta * variance` by
/// construction; the mv standard error comes from the delta method on
/// (mean, variance) with a fourth-moment plug-in.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MCEstimate {
    pub mean: f64,
    pub variance: f64,
    pub mv: f64,
    pub std_error_mean: f64,
    pub std_error_mv: f64,
}

/// Simulate `num_years` independent years of terminal wealth
/// `W = w0 - premium - S + benefit` and return the moment estimates.
pub fn simulate_wealth(s: &Scenario, design: Design, cfg: &SimulationConfig) -> Result<MCEstimate> {
    let premium = match design {
        Design::None => 0.0,
        Design::Indemnity(d) => {
            pricing::indemnity_premium(&s.sev, &s.freq, &s.indemnity_pricing, d)?
        }
        Design::Parametric(k) => {
            if !k.is_finite() || !(0.0..=s.sev.cap()).contains(&k) {
                return Err(Error::OutOfRange {
                    name: "payment",
                    value: k,
                    lo: 0.0,
                    hi: s.sev.cap(),
                });
            }
            pricing::parametric_premium(&s.freq, &s.parametric_pricing, k)?
        }
    };

    let units = if cfg.antithetic {
        cfg.num_years.div_ceil(2)
    } else {
        cfg.num_years
    };
    let n_chunks = units.div_ceil(CHUNK);
    let base_rng = ChaCha12Rng::seed_from_u64(cfg.seed);

    let partials: Vec<MomentAccumulator> = (0..n_chunks)
        .into_par_iter()
        .map(|chunk| {
            let mut acc = MomentAccumulator::default();
            let lo = chunk * CHUNK;
            let hi = (lo + CHUNK).min(units);
            for unit in lo..hi {
                let mut rng = base_rng.clone();
                rng.set_stream(unit);
                if cfg.antithetic {
                    let mut tape = UniformTape::new(&mut rng);
                    acc.push(simulate_year(s, design, premium, |t| t.next(), &mut tape));
                    let second_year = 2 * unit + 1;
                    if second_year < cfg.num_years {
                        tape.rewind_inverted();
                        acc.push(simulate_year(s, design, premium, |t| t.next(), &mut tape));
                    }
                } else {
                    acc.push(simulate_year(
                        s,
                        design,
                        premium,
                        |r: &mut ChaCha12Rng| r.gen::<f64>(),
                        &mut rng,
                    ));
                }
            }
            acc
        })
        .collect();

    let acc = partials
        .into_iter()
        .fold(MomentAccumulator::default(), MomentAccumulator::merge);
    Ok(estimate_from(acc, s.prefs.risk_aversion()))
}

fn simulate_year<S>(
    s: &Scenario,
    design: Design,
    premium: f64,
    mut uniform: impl FnMut(&mut S) -> f64,
    source: &mut S,
) -> f64 {
    let count = sample_count(&s.freq, uniform(source));
    // accumulate the loss net of the indemnity benefit per event, so a full
    // cover leaves wealth exactly constant across paths
    let mut net_loss = 0.0;
    for _ in 0..count {
        let y = sample_severity(&s.sev, uniform(source));
        net_loss += match design {
            Design::Indemnity(d) => y.min(d),
            _ => y,
        };
    }
    let benefit = match design {
        Design::Parametric(k) => k * count as f64,
        _ => 0.0,
    };
    s.prefs.initial_wealth() - premium - net_loss + benefit
}

fn estimate_from(acc: MomentAccumulator, beta: f64) -> MCEstimate {
    let n = acc.count() as f64;
    let mean = acc.mean();
    let variance = acc.sample_variance();
    let mv = mean - beta * variance;
    let mu2 = acc.central2();
    let mu3 = acc.central3();
    let mu4 = acc.central4();
    let std_error_mean = (mu2 / n).sqrt();
    // Var(mean - beta*var) ~ [mu2 + beta^2 (mu4 - mu2^2) - 2 beta mu3] / n
    let mv_var = (mu2 + beta * beta * (mu4 - mu2 * mu2) - 2.0 * beta * mu3) / n;
    MCEstimate {
        mean,
        variance,
        mv,
        std_error_mean,
        std_error_mv: mv_var.max(0.0).sqrt(),
    }
}

/// Records the uniforms of a primary path so the antithetic partner can
/// replay the identical positions as `1 - u`, preserving the monotone
/// coupling through both the count and severity inversions.
struct UniformTape<'a> {
    rng: &'a mut ChaCha12Rng,
    tape: Vec<f64>,
    pos: usize,
    invert: bool,
}

impl<'a> UniformTape<'a> {
    fn new(rng: &'a mut ChaCha12Rng) -> Self {
        Self {
            rng,
            tape: Vec::new(),
            pos: 0,
            invert: false,
        }
    }

    fn next(&mut self) -> f64 {
        if self.pos == self.tape.len() {
            self.tape.push(self.rng.gen::<f64>());
        }
        let u = self.tape[self.pos];
        self.pos += 1;
        if self.invert {
            1.0 - u
        } else {
            u
        }
    }

    fn rewind_inverted(&mut self) {
        self.pos = 0;
        self.invert = true;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::objective;
    use crate::pricing::FrequencyModel;

    #[test]
    fn config_rejects_zero_years() {
        assert!(SimulationConfig::new(0, 1).is_err());
    }

    #[test]
    fn identical_seeds_are_bit_identical() {
        let s = Scenario::baseline();
        let cfg = SimulationConfig::new(200_000, 99).unwrap();
        let a = simulate_wealth(&s, Design::Indemnity(22_500.0), &cfg).unwrap();
        let b = simulate_wealth(&s, Design::Indemnity(22_500.0), &cfg).unwrap();
        assert_eq!(a, b);
        let c = simulate_wealth(
            &s,
            Design::Indemnity(22_500.0),
            &SimulationConfig::new(200_000, 100).unwrap(),
        )
        .unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn full_cover_has_zero_variance() {
        let s = Scenario::baseline();
        let cfg = SimulationConfig::new(50_000, 7).unwrap();
        let est = simulate_wealth(&s, Design::Indemnity(0.0), &cfg).unwrap();
        assert_eq!(est.variance, 0.0);
        let premium =
            pricing::indemnity_premium(&s.sev, &s.freq, &s.indemnity_pricing, 0.0).unwrap();
        assert!((est.mean - (150_000.0 - premium)).abs() < 1e-9);
    }

    #[test]
    fn negligible_frequency_leaves_wealth_untouched() {
        let mut s = Scenario::baseline();
        s.freq = FrequencyModel::poisson(1e-12).unwrap();
        let est =
            simulate_wealth(&s, Design::None, &SimulationConfig::new(10_000, 3).unwrap()).unwrap();
        assert_eq!(est.mean, 150_000.0);
        assert_eq!(est.variance, 0.0);
    }

    #[test]
    fn single_year_is_finite() {
        let s = Scenario::baseline();
        let est =
            simulate_wealth(&s, Design::None, &SimulationConfig::new(1, 42).unwrap()).unwrap();
        assert!(est.mean.is_finite());
        assert_eq!(est.variance, 0.0);
        assert_eq!(est.std_error_mv, 0.0);
    }

    #[test]
    fn estimates_agree_with_closed_form_at_modest_size() {
        let s = Scenario::baseline();
        let cfg = SimulationConfig::new(2_000_000, 2024).unwrap();
        let est = simulate_wealth(&s, Design::Parametric(243_622.0), &cfg).unwrap();
        let closed = objective::mv_parametric(&s, 243_622.0).unwrap();
        let z = (est.mv - closed) / est.std_error_mv;
        assert!(z.abs() < 4.0, "z = {z}, mc = {}, closed = {closed}", est.mv);
    }

    #[test]
    fn antithetic_pairing_keeps_estimates_consistent() {
        let s = Scenario::baseline();
        let plain = simulate_wealth(
            &s,
            Design::Parametric(200_000.0),
            &SimulationConfig::new(400_000, 12).unwrap(),
        )
        .unwrap();
        let anti = simulate_wealth(
            &s,
            Design::Parametric(200_000.0),
            &SimulationConfig::new(400_000, 12)
                .unwrap()
                .with_antithetic(true),
        )
        .unwrap();
        // same model, so the two estimates must agree within joint error bars
        let tol = 4.0 * (plain.std_error_mv + anti.std_error_mv);
        assert!(
            (plain.mv - anti.mv).abs() < tol,
            "plain {} vs antithetic {}",
            plain.mv,
            anti.mv
        );
    }

    #[test]
    fn rejects_out_of_range_contract_parameters() {
        let s = Scenario::baseline();
        let cfg = SimulationConfig::new(10, 1).unwrap();
        assert!(simulate_wealth(&s, Design::Indemnity(-1.0), &cfg).is_err());
        assert!(simulate_wealth(&s, Design::Parametric(s.sev.cap() + 1.0), &cfg).is_err());
    }
}
