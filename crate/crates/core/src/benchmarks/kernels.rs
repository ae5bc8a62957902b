//! Raw objective kernels, evaluated in the transformed coordinate `z`.
//!
//! Textbook BBOB/CEC formulas without the official instance machinery
//! (no oscillation/asymmetry transforms, no conditioning matrices).

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Constant folded into the Schwefel kernel so its optimum sits at `z = 0`.
pub const SCHWEFEL_SHIFT: f64 = 4.209687462275036e2;
const SCHWEFEL_CONST: f64 = 4.189828872724338e2;

pub const WEIERSTRASS_A: f64 = 0.5;
pub const WEIERSTRASS_B: f64 = 3.0;
pub const WEIERSTRASS_KMAX: u32 = 20;

pub const MICHALEWICZ_M: i32 = 10;

const LUNACEK_MU0: f64 = 2.5;
const LUNACEK_D: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Kernel {
    Sphere,
    Ellipsoidal,
    Rastrigin,
    Rosenbrock,
    BentCigar,
    DifferentPowers,
    SchaffersF7,
    Schwefel,
    Weierstrass,
    Michalewicz,
    LunacekBiRastrigin,
}

/// Which benchmark family a kernel's domain and scaling follow.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    /// `[-5, 5]^n`
    BbobStyle,
    /// `[-100, 100]^n`
    Cec19Style,
    /// `[0, 4]^n`, untransformed
    Simulationlib,
}

impl Suite {
    pub fn name(&self) -> &'static str {
        match self {
            Suite::BbobStyle => "bbob",
            Suite::Cec19Style => "cec19",
            Suite::Simulationlib => "simulationlib",
        }
    }
}

impl Kernel {
    pub const ALL: [Kernel; 11] = [
        Kernel::Sphere,
        Kernel::Ellipsoidal,
        Kernel::Rastrigin,
        Kernel::Rosenbrock,
        Kernel::BentCigar,
        Kernel::DifferentPowers,
        Kernel::SchaffersF7,
        Kernel::Schwefel,
        Kernel::Weierstrass,
        Kernel::Michalewicz,
        Kernel::LunacekBiRastrigin,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Kernel::Sphere => "sphere",
            Kernel::Ellipsoidal => "ellipsoidal",
            Kernel::Rastrigin => "rastrigin",
            Kernel::Rosenbrock => "rosenbrock",
            Kernel::BentCigar => "bent_cigar",
            Kernel::DifferentPowers => "different_powers",
            Kernel::SchaffersF7 => "schaffers_f7",
            Kernel::Schwefel => "schwefel",
            Kernel::Weierstrass => "weierstrass",
            Kernel::Michalewicz => "michalewicz",
            Kernel::LunacekBiRastrigin => "lunacek_bi_rastrigin",
        }
    }

    pub fn suite(&self) -> Suite {
        match self {
            Kernel::Schwefel | Kernel::Weierstrass => Suite::Cec19Style,
            Kernel::Michalewicz => Suite::Simulationlib,
            _ => Suite::BbobStyle,
        }
    }

    pub fn bounds(&self) -> (f64, f64) {
        match self.suite() {
            Suite::BbobStyle => (-5.0, 5.0),
            Suite::Cec19Style => (-100.0, 100.0),
            Suite::Simulationlib => (0.0, 4.0),
        }
    }

    pub fn min_dim(&self) -> usize {
        match self {
            Kernel::Rosenbrock | Kernel::SchaffersF7 => 2,
            _ => 1,
        }
    }

    /// Whether instances get a random rotation unless told otherwise.
    pub fn rotated_by_default(&self) -> bool {
        matches!(
            self,
            Kernel::BentCigar
                | Kernel::DifferentPowers
                | Kernel::SchaffersF7
                | Kernel::Schwefel
                | Kernel::Weierstrass
                | Kernel::LunacekBiRastrigin
        )
    }

    /// Whether instances are shifted and rotated at all.
    pub fn transformable(&self) -> bool {
        !matches!(self, Kernel::Michalewicz)
    }

    /// Multiplier applied to `x - shift` before the rotation.
    pub fn scale(&self) -> f64 {
        match self {
            Kernel::Schwefel => 10.0,
            Kernel::Weierstrass => 0.005,
            _ => 1.0,
        }
    }

    /// Location of the kernel's global minimum in `z` coordinates. `None` when
    /// there is no closed form.
    pub fn optimum_z(&self, dim: usize) -> Option<Vec<f64>> {
        match self {
            Kernel::Rosenbrock => Some(vec![1.0; dim]),
            Kernel::Michalewicz => None,
            _ => Some(vec![0.0; dim]),
        }
    }

    pub fn check_dim(&self, dim: usize) -> Result<()> {
        if dim < self.min_dim() {
            return Err(Error::Unsupported(format!(
                "{} needs dimension >= {}, got {dim}",
                self.name(),
                self.min_dim()
            )));
        }
        Ok(())
    }
}

impl std::fmt::Display for Kernel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Kernel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let norm = s.trim().to_ascii_lowercase().replace('-', "_");
        Kernel::ALL
            .iter()
            .copied()
            .find(|k| k.name() == norm)
            .ok_or_else(|| Error::Unsupported(format!("unknown kernel `{s}`")))
    }
}

/// Untransformed kernel value at `z`.
pub fn kernel_value(kernel: Kernel, z: &[f64]) -> f64 {
    let n = z.len();
    let nf = n as f64;
    match kernel {
        Kernel::Sphere => z.iter().map(|v| v * v).sum(),
        Kernel::Ellipsoidal => z
            .iter()
            .enumerate()
            .map(|(i, v)| condition(i, n, 6.0) * v * v)
            .sum(),
        Kernel::Rastrigin => {
            10.0 * nf
                + z.iter()
                    .map(|v| v * v - 10.0 * (2.0 * PI * v).cos())
                    .sum::<f64>()
        }
        Kernel::Rosenbrock => z
            .windows(2)
            .map(|w| 100.0 * (w[1] - w[0] * w[0]).powi(2) + (w[0] - 1.0).powi(2))
            .sum(),
        Kernel::BentCigar => {
            z[0] * z[0] + 1e6 * z[1..].iter().map(|v| v * v).sum::<f64>()
        }
        Kernel::DifferentPowers => z
            .iter()
            .enumerate()
            .map(|(i, v)| {
                let exp = if n > 1 {
                    2.0 + 4.0 * i as f64 / (nf - 1.0)
                } else {
                    2.0
                };
                v.abs().powf(exp)
            })
            .sum::<f64>()
            .sqrt(),
        Kernel::SchaffersF7 => {
            let mean = z
                .windows(2)
                .map(|w| {
                    let s = (w[0] * w[0] + w[1] * w[1]).sqrt();
                    let rs = s.sqrt();
                    rs + rs * (50.0 * s.powf(0.2)).sin().powi(2)
                })
                .sum::<f64>()
                / (nf - 1.0);
            mean * mean
        }
        Kernel::Schwefel => schwefel(z),
        Kernel::Weierstrass => weierstrass(z),
        Kernel::Michalewicz => z
            .iter()
            .enumerate()
            .map(|(i, v)| michalewicz_term(i, *v))
            .sum(),
        Kernel::LunacekBiRastrigin => {
            let s = 1.0 - 1.0 / (2.0 * (nf + 20.0).sqrt() - 8.2);
            let mu1 = -((LUNACEK_MU0 * LUNACEK_MU0 - LUNACEK_D) / s).sqrt();
            let near: f64 = z.iter().map(|v| v * v).sum();
            let far: f64 = LUNACEK_D * nf
                + s * z
                    .iter()
                    .map(|v| (v + LUNACEK_MU0 - mu1).powi(2))
                    .sum::<f64>();
            let ripple: f64 = z.iter().map(|v| 1.0 - (2.0 * PI * v).cos()).sum();
            near.min(far) + 10.0 * ripple
        }
    }
}

fn condition(i: usize, n: usize, decades: f64) -> f64 {
    if n > 1 {
        10f64.powf(decades * i as f64 / (n - 1) as f64)
    } else {
        1.0
    }
}

/// CEC-style Schwefel with the periodic fold and quadratic penalty beyond +-500.
fn schwefel(z: &[f64]) -> f64 {
    let nf = z.len() as f64;
    let mut f = SCHWEFEL_CONST * nf;
    for &zi in z {
        let zi = zi + SCHWEFEL_SHIFT;
        if zi > 500.0 {
            let y = 500.0 - zi % 500.0;
            f -= y * y.abs().sqrt().sin();
            let t = (zi - 500.0) / 100.0;
            f += t * t / nf;
        } else if zi < -500.0 {
            let y = zi.abs() % 500.0 - 500.0;
            f -= y * (500.0 - zi.abs() % 500.0).sqrt().sin();
            let t = (zi + 500.0) / 100.0;
            f += t * t / nf;
        } else {
            f -= zi * zi.abs().sqrt().sin();
        }
    }
    f
}

fn weierstrass(z: &[f64]) -> f64 {
    let mut total = 0.0;
    // cos(pi * 3^k) = -1 exactly, so the per-coordinate offset is sum a^k
    let mut offset = 0.0;
    let mut a_k = 1.0;
    for _ in 0..=WEIERSTRASS_KMAX {
        offset += a_k;
        a_k *= WEIERSTRASS_A;
    }
    for &zi in z {
        let mut a_k = 1.0;
        let mut b_k = 1.0;
        let mut s = 0.0;
        for _ in 0..=WEIERSTRASS_KMAX {
            s += a_k * (2.0 * PI * b_k * (zi + 0.5)).cos();
            a_k *= WEIERSTRASS_A;
            b_k *= WEIERSTRASS_B;
        }
        total += s + offset;
    }
    total
}

fn michalewicz_term(i: usize, v: f64) -> f64 {
    let idx = (i + 1) as f64;
    -v.sin() * (idx * v * v / PI).sin().powi(2 * MICHALEWICZ_M)
}

/// Minimum of the Michalewicz function on `[lo, hi]^dim`: the function is
/// separable, so each coordinate is minimized on a fine grid and then refined
/// by golden-section search.
pub fn michalewicz_minimum(dim: usize, lo: f64, hi: f64) -> f64 {
    const GRID: usize = 200_000;
    (0..dim)
        .map(|i| {
            let f = |v: f64| michalewicz_term(i, v);
            let step = (hi - lo) / GRID as f64;
            let best = (0..=GRID)
                .map(|g| lo + step * g as f64)
                .min_by(|a, b| f(*a).total_cmp(&f(*b)))
                .expect("grid is non-empty");
            let (mut a, mut b) = ((best - step).max(lo), (best + step).min(hi));
            let ratio = (5f64.sqrt() - 1.0) / 2.0;
            for _ in 0..200 {
                let c = b - ratio * (b - a);
                let d = a + ratio * (b - a);
                if f(c) < f(d) {
                    b = d;
                } else {
                    a = c;
                }
            }
            f(0.5 * (a + b)).min(f(best))
        })
        .sum()
}
