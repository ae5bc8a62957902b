use crate::domain::Domain;
use crate::error::Result;

/// Query-only access to a function being minimized.
///
/// Implementations count their own evaluations; optimizers read the count
/// back through [`Objective::evaluations`] for budget accounting.
pub trait Objective {
    fn domain(&self) -> &Domain;

    fn evaluate(&mut self, x: &[f64]) -> Result<f64>;

    /// Number of `evaluate` calls served so far.
    fn evaluations(&self) -> u64;

    /// Known optimal value, when there is one. Enables the precision
    /// termination rule and the `fbest - f* - prec` indicator.
    fn optimum_value(&self) -> Option<f64> {
        None
    }

    fn dim(&self) -> usize {
        self.domain().dim()
    }
}

/// NaN and infinite objective values rank last and never enter a training batch
/// as numbers.
pub(crate) fn sanitize_fitness(value: f64) -> f64 {
    if value.is_nan() {
        f64::INFINITY
    } else {
        value
    }
}
