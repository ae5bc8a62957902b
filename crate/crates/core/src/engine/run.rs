use rand::Rng;

use super::{Deadline, EpochDiagnostics, OptGanConfig, OptGanState};
use crate::error::{Error, Result};
use crate::knowledge::{shrink_size, OptimalSet, ScoredSolution};
use crate::objective::Objective;
use crate::trace::{indicator, push_record, TerminationReason, TraceRecord};

/// Result of one optimization run.
#[derive(Debug, Clone)]
pub struct OptGanOutcome {
    pub best: ScoredSolution,
    /// `(fes, indicator)` after initialization and after every epoch.
    pub records: Vec<TraceRecord>,
    pub diagnostics: Vec<EpochDiagnostics>,
    pub termination: TerminationReason,
    /// Final state, including the trained generator.
    pub state: OptGanState,
}

/// Minimizes `objective`.
///
/// The `k0` initialization queries count toward `max_fes`; an epoch only
/// starts if its `m` evaluations still fit in the budget. A run stops on the
/// first of: indicator below zero, budget exhausted, wall-clock limit.
pub fn optimize<O, R>(objective: &mut O, config: &OptGanConfig, rng: &mut R) -> Result<OptGanOutcome>
where
    O: Objective + ?Sized,
    R: Rng + ?Sized,
{
    config.validate()?;
    if config.max_fes <= config.k0 as u64 {
        return Err(Error::Config(format!(
            "max_fes ({}) must exceed the initial optimal set size ({})",
            config.max_fes, config.k0
        )));
    }
    let deadline = Deadline::new(config.time_limit_secs);
    let optimum = objective.optimum_value();
    let domain = objective.domain().clone();

    let mut state = OptGanState::new(&domain, config, rng)?;
    state.opt_set = OptimalSet::init(objective, config.k0, rng)?;
    state.fes = config.k0 as u64;

    let mut records = Vec::new();
    let mut diagnostics = Vec::new();
    let fbest = |st: &OptGanState| st.opt_set.best().map_or(f64::INFINITY, |b| b.fitness);
    let reached = |value: f64| optimum.is_some() && value < 0.0;

    let current = indicator(fbest(&state), optimum, config.prec);
    push_record(&mut records, state.fes, current);

    let termination = 'run: {
        if reached(current) {
            break 'run TerminationReason::Precision;
        }
        if !config.ablation.no_pretraining && !state.pretrain_until(config, rng, &deadline)? {
            break 'run TerminationReason::Time;
        }
        while state.fes + config.m as u64 <= config.max_fes {
            if deadline.passed() || !state.train_epoch(config, rng, &deadline)? {
                break 'run TerminationReason::Time;
            }
            let (w_di, w_dr) = state.wasserstein_estimates(config, rng)?;

            let candidates = state.sample_generator(config.m, rng)?;
            let mut scored = Vec::with_capacity(candidates.len());
            for x in candidates {
                let value = objective.evaluate(&x)?;
                state.fes += 1;
                scored.push(ScoredSolution::new(x, value));
            }
            state.opt_set.update(scored);
            if !config.ablation.no_shrinking {
                let k = shrink_size(config.k0, config.a, state.fes, config.max_fes);
                state.opt_set.shrink_to(k);
            }
            state.epoch += 1;

            let best = fbest(&state);
            diagnostics.push(EpochDiagnostics {
                fes: state.fes,
                k_t: state.opt_set.capacity(),
                fbest: best,
                w_di,
                w_dr,
            });
            let current = indicator(best, optimum, config.prec);
            push_record(&mut records, state.fes, current);
            if reached(current) {
                break 'run TerminationReason::Precision;
            }
        }
        TerminationReason::Budget
    };

    let best = state
        .opt_set
        .best()
        .cloned()
        .ok_or_else(|| Error::InvalidArgument("optimal set is empty".into()))?;
    Ok(OptGanOutcome {
        best,
        records,
        diagnostics,
        termination,
        state,
    })
}
