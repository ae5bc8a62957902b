//! Monte Carlo density grids of a trained 2-D generator.

use std::fmt::Write as _;
use std::path::Path;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::domain::Domain;
use crate::error::{Error, Result};
use crate::nn::MlpParams;

pub const DEFAULT_HEATMAP_SAMPLES: u64 = 1_000_000;

/// Generator weights saved next to a trace so the heatmap can be rebuilt later.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorSnapshot {
    pub domain: Domain,
    pub params: MlpParams,
}

impl GeneratorSnapshot {
    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, serde_json::to_string(self)?)?;
        Ok(())
    }

    pub fn read(path: &Path) -> Result<Self> {
        Ok(serde_json::from_str(&std::fs::read_to_string(path)?)?)
    }
}

/// Counts are row-major with `resolution.1` rows (y) of `resolution.0` cells (x).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HeatmapGrid {
    pub lower: [f64; 2],
    pub upper: [f64; 2],
    pub resolution: (usize, usize),
    pub counts: Vec<u64>,
    pub total_samples: u64,
}

impl HeatmapGrid {
    pub fn new(lower: [f64; 2], upper: [f64; 2], resolution: (usize, usize)) -> Result<Self> {
        let (gx, gy) = resolution;
        if gx == 0 || gy == 0 {
            return Err(Error::InvalidArgument("heatmap resolution must be positive".into()));
        }
        for i in 0..2 {
            if !(lower[i].is_finite() && upper[i].is_finite() && lower[i] < upper[i]) {
                return Err(Error::InvalidArgument(format!(
                    "bad heatmap bounds [{}, {}]",
                    lower[i], upper[i]
                )));
            }
        }
        Ok(Self {
            lower,
            upper,
            resolution,
            counts: vec![0; gx * gy],
            total_samples: 0,
        })
    }

    fn cell(&self, axis: usize, v: f64, cells: usize) -> Option<usize> {
        let (lo, hi) = (self.lower[axis], self.upper[axis]);
        if !(lo..=hi).contains(&v) {
            return None;
        }
        let idx = ((v - lo) / (hi - lo) * cells as f64).floor() as usize;
        Some(idx.min(cells - 1))
    }

    /// Counts one sample; points outside the bounds only raise `total_samples`.
    pub fn add(&mut self, x: f64, y: f64) {
        self.total_samples += 1;
        let (gx, gy) = self.resolution;
        if let (Some(ix), Some(iy)) = (self.cell(0, x, gx), self.cell(1, y, gy)) {
            self.counts[iy * gx + ix] += 1;
        }
    }

    pub fn count(&self, ix: usize, iy: usize) -> u64 {
        self.counts[iy * self.resolution.0 + ix]
    }

    pub fn in_bounds(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn to_csv(&self) -> String {
        let (gx, gy) = self.resolution;
        let mut out = format!(
            "# lower={},{} upper={},{} resolution={}x{} samples={} in_bounds={} rows=y cols=x\n",
            self.lower[0],
            self.lower[1],
            self.upper[0],
            self.upper[1],
            gx,
            gy,
            self.total_samples,
            self.in_bounds()
        );
        for row in self.counts.chunks(gx) {
            let line: Vec<String> = row.iter().map(u64::to_string).collect();
            let _ = writeln!(out, "{}", line.join(","));
        }
        debug_assert_eq!(out.lines().count(), gy + 1);
        out
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_csv())?;
        Ok(())
    }
}

/// Forwards `n_samples` noise vectors through `gen` and bins the outputs.
pub fn export_generator_heatmap<R: Rng + ?Sized>(
    gen: &MlpParams,
    bounds: &Domain,
    resolution: (usize, usize),
    n_samples: u64,
    rng: &mut R,
) -> Result<HeatmapGrid> {
    if gen.out_dim != 2 || bounds.dim() != 2 {
        return Err(Error::Unsupported(format!(
            "heatmaps need a 2-D problem, got generator output {} and bounds {}",
            gen.out_dim,
            bounds.dim()
        )));
    }
    if n_samples == 0 {
        return Err(Error::InvalidArgument("n_samples must be at least 1".into()));
    }
    let mut grid = HeatmapGrid::new(
        [bounds.lower()[0], bounds.lower()[1]],
        [bounds.upper()[0], bounds.upper()[1]],
        resolution,
    )?;
    let mut noise = vec![0.0; gen.in_dim];
    for _ in 0..n_samples {
        for v in noise.iter_mut() {
            *v = rng.random_range(-1.0..=1.0);
        }
        let y = gen.forward(&noise)?;
        grid.add(y[0], y[1]);
    }
    Ok(grid)
}
