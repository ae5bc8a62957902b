//! Analytic test problems with shift/rotation instances.
//!
//! An instance evaluates `kernel(scale * R (x - shift) + z_opt) + offset`, so
//! its optimum sits at `x = shift` with value `f_star`. Instances are
//! "BBOB-style": the landscape types of the COCO and CEC suites, not their
//! official instance data.

mod kernels;
mod rotation;

pub use kernels::{kernel_value, michalewicz_minimum, Kernel, Suite};
pub use rotation::{determinant, identity, mat_vec, orthogonality_error, random_rotation};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::domain::Domain;
use crate::error::{check_len, Error, Result};
use crate::objective::Objective;

/// Counts queries served by one run.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct EvalCounter {
    count: u64,
}

impl EvalCounter {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn count(&self) -> u64 {
        self.count
    }
}

/// A fully specified problem instance. Serializes to JSON with everything
/// needed to rebuild it exactly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkProblem {
    pub kernel: Kernel,
    pub dim: usize,
    pub instance_seed: u64,
    pub rotated: bool,
    pub domain: Domain,
    pub shift: Vec<f64>,
    pub rotation: Vec<Vec<f64>>,
    pub f_star: f64,
    pub f_star_offset: f64,
}

fn instance_stream(kernel: Kernel, dim: usize, instance_seed: u64) -> crate::RunRng {
    let tag = (kernel as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ (dim as u64).rotate_left(32);
    crate::seeded_rng(instance_seed ^ tag)
}

/// Instance with the kernel's default rotation setting.
pub fn make_problem(kernel: Kernel, dim: usize, instance_seed: u64) -> Result<BenchmarkProblem> {
    make_problem_with(kernel, dim, instance_seed, kernel.rotated_by_default())
}

pub fn make_problem_with(
    kernel: Kernel,
    dim: usize,
    instance_seed: u64,
    rotated: bool,
) -> Result<BenchmarkProblem> {
    kernel.check_dim(dim)?;
    let (lo, hi) = kernel.bounds();
    let domain = Domain::cube(dim, lo, hi)?;
    let mut rng = instance_stream(kernel, dim, instance_seed);

    if !kernel.transformable() {
        if rotated {
            return Err(Error::Unsupported(format!(
                "{kernel} instances cannot be rotated"
            )));
        }
        let f_star = michalewicz_minimum(dim, lo, hi);
        return Ok(BenchmarkProblem {
            kernel,
            dim,
            instance_seed,
            rotated: false,
            domain,
            shift: vec![0.0; dim],
            rotation: identity(dim),
            f_star,
            f_star_offset: 0.0,
        });
    }

    // central 80% of the box
    let width = hi - lo;
    let shift: Vec<f64> = (0..dim)
        .map(|_| lo + 0.1 * width + 0.8 * width * rng.random::<f64>())
        .collect();
    let rotation = if rotated {
        random_rotation(dim, &mut rng)
    } else {
        identity(dim)
    };
    let f_star = (rng.random_range(-1000.0..1000.0) * 100.0_f64).round() / 100.0;
    let z_opt = kernel.optimum_z(dim).expect("transformable kernels have a known optimum");
    let f_star_offset = f_star - kernel_value(kernel, &z_opt);
    Ok(BenchmarkProblem {
        kernel,
        dim,
        instance_seed,
        rotated,
        domain,
        shift,
        rotation,
        f_star,
        f_star_offset,
    })
}

impl BenchmarkProblem {
    /// `scale * R (x - shift) + z_opt`.
    pub fn to_kernel_coords(&self, x: &[f64]) -> Vec<f64> {
        if !self.kernel.transformable() {
            return x.to_vec();
        }
        let scale = self.kernel.scale();
        let centered: Vec<f64> = x
            .iter()
            .zip(&self.shift)
            .map(|(a, s)| scale * (a - s))
            .collect();
        let mut z = if self.rotated {
            mat_vec(&self.rotation, &centered)
        } else {
            centered
        };
        if let Some(z_opt) = self.kernel.optimum_z(self.dim) {
            z.iter_mut().zip(z_opt).for_each(|(a, o)| *a += o);
        }
        z
    }

    /// Objective value at `x`; out-of-domain points are evaluated as-is.
    pub fn evaluate(&self, x: &[f64], counter: &mut EvalCounter) -> Result<f64> {
        check_len("benchmark query", self.dim, x.len())?;
        counter.count += 1;
        Ok(kernel_value(self.kernel, &self.to_kernel_coords(x)) + self.f_star_offset)
    }

    /// Where the optimum lies in `x`, when known.
    pub fn optimum_location(&self) -> Option<Vec<f64>> {
        if self.kernel.transformable() {
            Some(self.shift.clone())
        } else {
            None
        }
    }

    /// A fresh counted view for one run.
    pub fn instance(&self) -> Instance<'_> {
        Instance {
            problem: self,
            counter: EvalCounter::new(),
        }
    }

    /// `kernel-dN-iS`, used for file names.
    pub fn label(&self) -> String {
        format!("{}-d{}-i{}", self.kernel, self.dim, self.instance_seed)
    }
}

/// A problem plus the evaluation counter of the run using it.
#[derive(Debug, Clone)]
pub struct Instance<'p> {
    problem: &'p BenchmarkProblem,
    counter: EvalCounter,
}

impl Instance<'_> {
    pub fn problem(&self) -> &BenchmarkProblem {
        self.problem
    }

    pub fn counter(&self) -> &EvalCounter {
        &self.counter
    }
}

impl Objective for Instance<'_> {
    fn domain(&self) -> &Domain {
        &self.problem.domain
    }

    fn evaluate(&mut self, x: &[f64]) -> Result<f64> {
        self.problem.evaluate(x, &mut self.counter)
    }

    fn evaluations(&self) -> u64 {
        self.counter.count()
    }

    fn optimum_value(&self) -> Option<f64> {
        Some(self.problem.f_star)
    }
}
