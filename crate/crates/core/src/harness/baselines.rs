//! Reference optimizers run under the same termination rules as OPT-GAN.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::engine::Deadline;
use crate::error::{Error, Result};
use crate::knowledge::ScoredSolution;
use crate::objective::Objective;
use crate::trace::{indicator, push_record, TerminationReason, TraceRecord, DEFAULT_PREC};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BaselineConfig {
    pub max_fes: u64,
    pub prec: f64,
    pub time_limit_secs: Option<f64>,
}

impl Default for BaselineConfig {
    fn default() -> Self {
        Self {
            max_fes: 10_000,
            prec: DEFAULT_PREC,
            time_limit_secs: None,
        }
    }
}

impl BaselineConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_fes == 0 {
            return Err(Error::Config("max_fes must be at least 1".into()));
        }
        if !(self.prec.is_finite() && self.prec >= 0.0) {
            return Err(Error::Config("prec must be finite and non-negative".into()));
        }
        if let Some(t) = self.time_limit_secs {
            if !(t.is_finite() && t > 0.0) {
                return Err(Error::Config("time_limit_secs must be positive".into()));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BaselineOutcome {
    pub best: Option<ScoredSolution>,
    /// One record per improvement plus a final record at `evaluations`.
    pub records: Vec<TraceRecord>,
    pub termination: TerminationReason,
    pub evaluations: u64,
}

/// Wraps an objective with budget, time and precision bookkeeping.
struct Tracker<'a, O: ?Sized> {
    objective: &'a mut O,
    optimum: Option<f64>,
    config: &'a BaselineConfig,
    deadline: Deadline,
    fes: u64,
    best: Option<ScoredSolution>,
    records: Vec<TraceRecord>,
    stop: Option<TerminationReason>,
}

impl<'a, O: Objective + ?Sized> Tracker<'a, O> {
    fn new(objective: &'a mut O, config: &'a BaselineConfig) -> Result<Self> {
        config.validate()?;
        Ok(Self {
            optimum: objective.optimum_value(),
            objective,
            config,
            deadline: Deadline::new(config.time_limit_secs),
            fes: 0,
            best: None,
            records: Vec::new(),
            stop: None,
        })
    }

    /// `None` once the run must stop; no evaluation happens then.
    fn eval(&mut self, x: &[f64]) -> Result<Option<f64>> {
        if self.stop.is_some() {
            return Ok(None);
        }
        if self.fes >= self.config.max_fes {
            self.stop = Some(TerminationReason::Budget);
            return Ok(None);
        }
        if self.deadline.passed() {
            self.stop = Some(TerminationReason::Time);
            return Ok(None);
        }
        let candidate = ScoredSolution::new(x.to_vec(), self.objective.evaluate(x)?);
        let value = candidate.fitness;
        self.fes += 1;
        if self.best.as_ref().is_none_or(|b| value < b.fitness) {
            self.best = Some(candidate);
            let current = indicator(value, self.optimum, self.config.prec);
            push_record(&mut self.records, self.fes, current);
            if self.optimum.is_some() && current < 0.0 {
                self.stop = Some(TerminationReason::Precision);
            }
        }
        Ok(Some(value))
    }

    fn finish(mut self) -> BaselineOutcome {
        if let Some(best) = &self.best {
            let current = indicator(best.fitness, self.optimum, self.config.prec);
            push_record(&mut self.records, self.fes, current);
        }
        BaselineOutcome {
            best: self.best,
            records: self.records,
            termination: self.stop.unwrap_or(TerminationReason::Budget),
            evaluations: self.fes,
        }
    }
}

/// I.i.d. uniform queries on the domain until a termination rule fires.
pub fn random_search_baseline<O, R>(objective: &mut O, config: &BaselineConfig, rng: &mut R) -> Result<BaselineOutcome>
where
    O: Objective + ?Sized,
    R: Rng + ?Sized,
{
    let domain = objective.domain().clone();
    let mut tracker = Tracker::new(objective, config)?;
    while tracker.eval(&domain.sample(rng))?.is_some() {}
    Ok(tracker.finish())
}

const REFLECT: f64 = 1.0;
const EXPAND: f64 = 2.0;
const CONTRACT: f64 = 0.5;
const SHRINK: f64 = 0.5;
const INITIAL_STEP: f64 = 0.1;
const COLLAPSE_TOL: f64 = 1e-10;

/// Nelder–Mead simplex search with restarts.
///
/// Each start draws a uniform point and steps 10% of the box width along
/// every axis. Trial points are clipped to the box. When the simplex shrinks
/// below `1e-10` of the box width, or all its values are equal, the search
/// restarts from a fresh uniform point.
pub fn nelder_mead_baseline<O, R>(objective: &mut O, config: &BaselineConfig, rng: &mut R) -> Result<BaselineOutcome>
where
    O: Objective + ?Sized,
    R: Rng + ?Sized,
{
    let domain = objective.domain().clone();
    let n = domain.dim();
    let mut tracker = Tracker::new(objective, config)?;
    let clip = |x: Vec<f64>| -> Vec<f64> {
        x.into_iter()
            .enumerate()
            .map(|(i, v)| v.clamp(domain.lower()[i], domain.upper()[i]))
            .collect()
    };

    macro_rules! eval {
        ($x:expr, $stop:lifetime) => {
            match tracker.eval(&$x)? {
                Some(v) => v,
                None => break $stop,
            }
        };
    }

    'search: loop {
        let x0 = domain.sample(rng);
        let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
        let f0 = eval!(x0, 'search);
        simplex.push((x0.clone(), f0));
        for i in 0..n {
            let mut x = x0.clone();
            let step = INITIAL_STEP * domain.width(i);
            x[i] = if x[i] + step <= domain.upper()[i] { x[i] + step } else { x[i] - step };
            let f = eval!(x, 'search);
            simplex.push((x, f));
        }

        loop {
            debug_assert_eq!(simplex.len(), n + 1);
            simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
            let (best_x, best_f) = simplex[0].clone();
            let worst_f = simplex[n].1;
            let spread = simplex[1..].iter().fold(0.0_f64, |acc, (x, _)| {
                x.iter()
                    .zip(&best_x)
                    .enumerate()
                    .fold(acc, |acc, (i, (a, b))| acc.max((a - b).abs() / domain.width(i)))
            });
            if spread < COLLAPSE_TOL || best_f == worst_f {
                continue 'search;
            }

            let mut centroid = vec![0.0; n];
            for (x, _) in &simplex[..n] {
                for (c, v) in centroid.iter_mut().zip(x) {
                    *c += v / n as f64;
                }
            }
            let toward = |from: &[f64], coef: f64| -> Vec<f64> {
                clip(centroid.iter().zip(from).map(|(c, v)| c + coef * (v - c)).collect())
            };

            let worst_x = simplex[n].0.clone();
            let xr = toward(&worst_x, -REFLECT);
            let fr = eval!(xr, 'search);
            if fr < best_f {
                let xe = toward(&xr, EXPAND);
                let fe = eval!(xe, 'search);
                simplex[n] = if fe < fr { (xe, fe) } else { (xr, fr) };
                continue;
            }
            if fr < simplex[n - 1].1 {
                simplex[n] = (xr, fr);
                continue;
            }
            let (xc, fc, accept) = if fr < worst_f {
                let xc = toward(&xr, CONTRACT);
                let fc = eval!(xc, 'search);
                (xc, fc, fc <= fr)
            } else {
                let xc = toward(&worst_x, CONTRACT);
                let fc = eval!(xc, 'search);
                (xc, fc, fc < worst_f)
            };
            if accept {
                simplex[n] = (xc, fc);
                continue;
            }
            for i in 1..=n {
                let x: Vec<f64> = best_x
                    .iter()
                    .zip(&simplex[i].0)
                    .map(|(b, v)| b + SHRINK * (v - b))
                    .collect();
                let f = eval!(x, 'search);
                simplex[i] = (x, f);
            }
        }
    }
    Ok(tracker.finish())
}
