//! The optimal set: the best solutions seen so far, which define the
//! exploitation target distribution.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::domain::Domain;
use crate::error::{Error, Result};
use crate::objective::{sanitize_fitness, Objective};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoredSolution {
    pub x: Vec<f64>,
    pub fitness: f64,
}

impl ScoredSolution {
    /// NaN fitness is stored as `+inf`.
    pub fn new(x: Vec<f64>, fitness: f64) -> Self {
        Self {
            x,
            fitness: sanitize_fitness(fitness),
        }
    }
}

/// Best solutions sorted ascending by fitness, at most `capacity` of them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimalSet {
    members: Vec<ScoredSolution>,
    capacity: usize,
    k0: usize,
}

impl OptimalSet {
    pub fn empty(k0: usize) -> Result<Self> {
        if k0 == 0 {
            return Err(Error::InvalidArgument("optimal set size must be >= 1".into()));
        }
        Ok(Self {
            members: Vec::with_capacity(k0),
            capacity: k0,
            k0,
        })
    }

    /// Draws `k0` uniform points on the objective's domain and evaluates each
    /// once.
    pub fn init<O, R>(objective: &mut O, k0: usize, rng: &mut R) -> Result<Self>
    where
        O: Objective + ?Sized,
        R: Rng + ?Sized,
    {
        let mut set = Self::empty(k0)?;
        let domain: Domain = objective.domain().clone();
        let mut initial = Vec::with_capacity(k0);
        for _ in 0..k0 {
            let x = domain.sample(rng);
            let fitness = objective.evaluate(&x)?;
            initial.push(ScoredSolution::new(x, fitness));
        }
        set.update(initial);
        Ok(set)
    }

    pub fn members(&self) -> &[ScoredSolution] {
        &self.members
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn k0(&self) -> usize {
        self.k0
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn best(&self) -> Option<&ScoredSolution> {
        self.members.first()
    }

    /// Keeps the best `capacity` elements of `members ∪ candidates`. On equal
    /// fitness incumbents win, then earlier candidates.
    pub fn update(&mut self, candidates: Vec<ScoredSolution>) {
        self.members.extend(candidates);
        // stable: members are already sorted and come first
        self.members
            .sort_by(|a, b| a.fitness.total_cmp(&b.fitness));
        self.members.truncate(self.capacity);
    }

    /// Lowers the capacity (never above `k0`, never below 1) and truncates.
    pub fn shrink_to(&mut self, capacity: usize) {
        self.capacity = capacity.clamp(1, self.k0);
        self.members.truncate(self.capacity);
    }

    /// `s` draws with replacement from the members' positions.
    pub fn bootstrap_sample<R: Rng + ?Sized>(&self, s: usize, rng: &mut R) -> Result<Vec<Vec<f64>>> {
        if self.members.is_empty() {
            return Err(Error::EmptyBatch("bootstrap from empty optimal set"));
        }
        if s == 0 {
            return Err(Error::InvalidArgument("bootstrap size must be >= 1".into()));
        }
        let n = self.members.len();
        Ok((0..s)
            .map(|_| self.members[rng.random_range(0..n)].x.clone())
            .collect())
    }
}

/// Capacity after `t` evaluations: `ceil(k0^(1 - a t / max_fes))`, at least 1.
pub fn shrink_size(k0: usize, a: f64, t: u64, max_fes: u64) -> usize {
    let k0 = k0.max(1);
    let exponent = 1.0 - a * t as f64 / max_fes.max(1) as f64;
    let value = (k0 as f64).powf(exponent);
    // powf can land a hair above an exact integer; don't let that bump the ceiling
    let nearest = value.round();
    let k = if (value - nearest).abs() <= 1e-12 * nearest.max(1.0) {
        nearest
    } else {
        value.ceil()
    };
    (k as usize).clamp(1, k0)
}
