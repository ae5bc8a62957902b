use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::domain::Domain;
use crate::error::{check_len, Error, Result};

pub const DEFAULT_SLOPE: f64 = 0.01;

/// `z` for `z >= 0`, `slope * z` otherwise.
#[inline]
pub fn leaky_relu(z: f64, slope: f64) -> f64 {
    if z >= 0.0 {
        z
    } else {
        slope * z
    }
}

/// Derivative of [`leaky_relu`]; taken as 1 at the kink.
#[inline]
pub fn leaky_relu_derivative(z: f64, slope: f64) -> f64 {
    if z >= 0.0 {
        1.0
    } else {
        slope
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum OutputActivation {
    Linear,
    /// `center + half_width * tanh(o)` per output, kept strictly inside the box.
    ScaledTanh { domain: Domain },
}

impl OutputActivation {
    #[inline]
    fn apply(&self, k: usize, o: f64) -> f64 {
        match self {
            OutputActivation::Linear => o,
            OutputActivation::ScaledTanh { domain } => {
                let y = domain.center(k) + domain.half_width(k) * o.tanh();
                let (lo, hi) = (domain.lower()[k], domain.upper()[k]);
                // tanh saturates to exactly +-1 in f64
                if y >= hi {
                    hi.next_down()
                } else if y <= lo {
                    lo.next_up()
                } else {
                    y
                }
            }
        }
    }

    #[inline]
    fn derivative(&self, k: usize, o: f64) -> f64 {
        match self {
            OutputActivation::Linear => 1.0,
            OutputActivation::ScaledTanh { domain } => {
                let t = o.tanh();
                domain.half_width(k) * (1.0 - t * t)
            }
        }
    }
}

/// Weights and biases of an `in -> hidden -> out` perceptron.
///
/// Matrices are row-major: `w1` is `hidden x in`, `w2` is `out x hidden`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MlpParams {
    pub in_dim: usize,
    pub hidden_dim: usize,
    pub out_dim: usize,
    pub w1: Vec<f64>,
    pub b1: Vec<f64>,
    pub w2: Vec<f64>,
    pub b2: Vec<f64>,
    pub hidden_slope: f64,
    pub output: OutputActivation,
}

fn check_dims(in_dim: usize, hidden_dim: usize, out_dim: usize) -> Result<()> {
    if in_dim == 0 || hidden_dim == 0 || out_dim == 0 {
        return Err(Error::InvalidArgument(format!(
            "layer sizes must be >= 1, got {in_dim}-{hidden_dim}-{out_dim}"
        )));
    }
    Ok(())
}

/// Fan-scaled uniform weights in `+-sqrt(6 / (fan_in + fan_out))`, zero biases,
/// linear output and the default LeakyReLU slope.
pub fn init_params<R: Rng + ?Sized>(
    in_dim: usize,
    hidden_dim: usize,
    out_dim: usize,
    rng: &mut R,
) -> Result<MlpParams> {
    check_dims(in_dim, hidden_dim, out_dim)?;
    let mut layer = |fan_in: usize, fan_out: usize| -> Vec<f64> {
        let limit = (6.0 / (fan_in + fan_out) as f64).sqrt();
        (0..fan_in * fan_out)
            .map(|_| limit * (2.0 * rng.random::<f64>() - 1.0))
            .collect()
    };
    let w1 = layer(in_dim, hidden_dim);
    let w2 = layer(hidden_dim, out_dim);
    Ok(MlpParams {
        in_dim,
        hidden_dim,
        out_dim,
        w1,
        b1: vec![0.0; hidden_dim],
        w2,
        b2: vec![0.0; out_dim],
        hidden_slope: DEFAULT_SLOPE,
        output: OutputActivation::Linear,
    })
}

impl MlpParams {
    pub fn zeros(in_dim: usize, hidden_dim: usize, out_dim: usize) -> Result<Self> {
        check_dims(in_dim, hidden_dim, out_dim)?;
        Ok(Self {
            in_dim,
            hidden_dim,
            out_dim,
            w1: vec![0.0; hidden_dim * in_dim],
            b1: vec![0.0; hidden_dim],
            w2: vec![0.0; out_dim * hidden_dim],
            b2: vec![0.0; out_dim],
            hidden_slope: DEFAULT_SLOPE,
            output: OutputActivation::Linear,
        })
    }

    pub fn with_slope(mut self, slope: f64) -> Result<Self> {
        if !(slope > 0.0 && slope < 1.0) {
            return Err(Error::InvalidArgument(format!(
                "LeakyReLU slope must lie in (0, 1), got {slope}"
            )));
        }
        self.hidden_slope = slope;
        Ok(self)
    }

    pub fn with_output(mut self, output: OutputActivation) -> Result<Self> {
        if let OutputActivation::ScaledTanh { domain } = &output {
            check_len("scaled tanh domain", self.out_dim, domain.dim())?;
        }
        self.output = output;
        Ok(self)
    }

    pub fn num_params(&self) -> usize {
        self.w1.len() + self.b1.len() + self.w2.len() + self.b2.len()
    }

    pub fn is_finite(&self) -> bool {
        self.slices().iter().all(|s| s.iter().all(|v| v.is_finite()))
    }

    pub(crate) fn slices(&self) -> [&[f64]; 4] {
        [&self.w1, &self.b1, &self.w2, &self.b2]
    }

    pub(crate) fn slices_mut(&mut self) -> [&mut [f64]; 4] {
        [&mut self.w1, &mut self.b1, &mut self.w2, &mut self.b2]
    }

    /// True for a scalar, linear-output network (a Wasserstein critic).
    pub fn is_critic(&self) -> bool {
        self.out_dim == 1 && self.output == OutputActivation::Linear
    }

    pub(crate) fn require_critic(&self) -> Result<()> {
        if self.is_critic() {
            Ok(())
        } else {
            Err(Error::InvalidArgument(
                "critic must have one linear output".into(),
            ))
        }
    }

    /// Hidden pre-activations `w1 x + b1` into `z`.
    #[inline]
    pub(crate) fn pre_activations(&self, x: &[f64], z: &mut [f64]) {
        let n = self.in_dim;
        for (j, zj) in z.iter_mut().enumerate() {
            let row = &self.w1[j * n..(j + 1) * n];
            *zj = self.b1[j] + row.iter().zip(x).map(|(w, xi)| w * xi).sum::<f64>();
        }
    }

    /// Output before the output activation; `z` receives hidden pre-activations.
    #[inline]
    pub(crate) fn raw_output(&self, x: &[f64], z: &mut [f64], o: &mut [f64]) {
        self.pre_activations(x, z);
        let h = self.hidden_dim;
        let slope = self.hidden_slope;
        for (k, ok) in o.iter_mut().enumerate() {
            let row = &self.w2[k * h..(k + 1) * h];
            *ok = self.b2[k]
                + row
                    .iter()
                    .zip(z.iter())
                    .map(|(w, zj)| w * leaky_relu(*zj, slope))
                    .sum::<f64>();
        }
    }

    #[inline]
    pub(crate) fn activate(&self, k: usize, o: f64) -> f64 {
        self.output.apply(k, o)
    }

    #[inline]
    pub(crate) fn activation_derivative(&self, k: usize, o: f64) -> f64 {
        self.output.derivative(k, o)
    }

    /// `act_out(w2 leaky_relu(w1 x + b1) + b2)`.
    pub fn forward(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_len("mlp input", self.in_dim, x.len())?;
        let mut z = vec![0.0; self.hidden_dim];
        let mut o = vec![0.0; self.out_dim];
        self.raw_output(x, &mut z, &mut o);
        Ok(o
            .iter()
            .enumerate()
            .map(|(k, &ok)| self.activate(k, ok))
            .collect())
    }

    pub fn forward_batch(&self, xs: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
        xs.iter().map(|x| self.forward(x)).collect()
    }

    /// Scalar critic value. Caller guarantees shapes.
    #[inline]
    pub(crate) fn critic_value(&self, x: &[f64], z: &mut [f64]) -> f64 {
        self.pre_activations(x, z);
        let slope = self.hidden_slope;
        self.b2[0]
            + self
                .w2
                .iter()
                .zip(z.iter())
                .map(|(w, zj)| w * leaky_relu(*zj, slope))
                .sum::<f64>()
    }

    /// Scalar critic value plus its input gradient into `grad`.
    #[inline]
    pub(crate) fn critic_value_and_input_grad(
        &self,
        x: &[f64],
        z: &mut [f64],
        grad: &mut [f64],
    ) -> f64 {
        self.pre_activations(x, z);
        let n = self.in_dim;
        let slope = self.hidden_slope;
        grad.iter_mut().for_each(|g| *g = 0.0);
        let mut value = self.b2[0];
        for (j, &zj) in z.iter().enumerate() {
            value += self.w2[j] * leaky_relu(zj, slope);
            let a = self.w2[j] * leaky_relu_derivative(zj, slope);
            let row = &self.w1[j * n..(j + 1) * n];
            for (g, w) in grad.iter_mut().zip(row) {
                *g += w * a;
            }
        }
        value
    }

    /// Scalar critic value `D(x)`.
    pub fn critic(&self, x: &[f64]) -> Result<f64> {
        self.require_critic()?;
        check_len("critic input", self.in_dim, x.len())?;
        let mut z = vec![0.0; self.hidden_dim];
        Ok(self.critic_value(x, &mut z))
    }

    /// Exact `grad_x D(x)` of a scalar critic.
    pub fn input_gradient(&self, x: &[f64]) -> Result<Vec<f64>> {
        if self.out_dim != 1 {
            return Err(Error::InvalidArgument(format!(
                "input gradient needs a scalar output, network has {}",
                self.out_dim
            )));
        }
        self.require_critic()?;
        check_len("critic input", self.in_dim, x.len())?;
        let mut z = vec![0.0; self.hidden_dim];
        let mut g = vec![0.0; self.in_dim];
        self.critic_value_and_input_grad(x, &mut z, &mut g);
        Ok(g)
    }
}

/// Gradient arrays shaped like an [`MlpParams`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GradBundle {
    pub w1: Vec<f64>,
    pub b1: Vec<f64>,
    pub w2: Vec<f64>,
    pub b2: Vec<f64>,
}

impl GradBundle {
    pub fn zeros_like(params: &MlpParams) -> Self {
        Self {
            w1: vec![0.0; params.w1.len()],
            b1: vec![0.0; params.b1.len()],
            w2: vec![0.0; params.w2.len()],
            b2: vec![0.0; params.b2.len()],
        }
    }

    pub fn matches(&self, params: &MlpParams) -> bool {
        self.w1.len() == params.w1.len()
            && self.b1.len() == params.b1.len()
            && self.w2.len() == params.w2.len()
            && self.b2.len() == params.b2.len()
    }

    pub fn slices(&self) -> [&[f64]; 4] {
        [&self.w1, &self.b1, &self.w2, &self.b2]
    }

    pub(crate) fn slices_mut(&mut self) -> [&mut [f64]; 4] {
        [&mut self.w1, &mut self.b1, &mut self.w2, &mut self.b2]
    }

    /// All entries in parameter order `w1, b1, w2, b2`.
    pub fn iter(&self) -> impl Iterator<Item = &f64> {
        self.w1
            .iter()
            .chain(&self.b1)
            .chain(&self.w2)
            .chain(&self.b2)
    }

    pub fn is_finite(&self) -> bool {
        self.iter().all(|v| v.is_finite())
    }

    pub fn max_abs(&self) -> f64 {
        self.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn add_assign(&mut self, other: &GradBundle) {
        for (dst, src) in self.slices_mut().into_iter().zip(other.slices()) {
            for (d, s) in dst.iter_mut().zip(src) {
                *d += s;
            }
        }
    }
}
