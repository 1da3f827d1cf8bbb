//! Monte-Carlo oracle for `int_{x_n > K|x'|^2} e^{xi . x} dx`.
//!
//! `x_n` is drawn from the density `a e^{-a x_n}` with `a = -Re xi_n`, and
//! `x'` uniformly (stratified) in the ball of radius `sqrt(x_n / K)`. Batches
//! run in parallel with independent ChaCha8 streams and are reduced in batch
//! order, so results do not depend on the thread count.

use crate::error::{Error, Result};
use crate::linalg::{CVec, CompensatedSum};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Sample mean with its standard error (from the spread of batch means).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub mean: Complex64,
    pub stderr: f64,
    pub samples: usize,
}

impl McEstimate {
    /// `|value - mean| / |value|` and the same gap in standard errors.
    pub fn compare(&self, value: Complex64) -> (f64, f64) {
        let gap = (value - self.mean).norm();
        (gap / value.norm(), if self.stderr > 0.0 { gap / self.stderr } else { f64::INFINITY })
    }
}

fn batch(xi: &CVec, k: f64, dim: usize, samples: usize, rng: &mut ChaCha8Rng) -> Complex64 {
    let xn = xi[dim - 1];
    let a = -xn.re;
    let mut sum = CompensatedSum::default();
    for j in 0..samples {
        let u: f64 = rng.gen();
        let t = -(1.0 - u).ln() / a;
        let r = (t / k).sqrt();
        let s: f64 = (j as f64 + rng.gen::<f64>()) / samples as f64;
        let (phase, vol) = if dim == 2 {
            let x1 = r * (2.0 * s - 1.0);
            (xi[0] * x1, 2.0 * r)
        } else {
            let rho = r * s.sqrt();
            let ang = 2.0 * PI * rng.gen::<f64>();
            (xi[0] * rho * ang.cos() + xi[1] * rho * ang.sin(), PI * r * r)
        };
        sum.add((phase + (xn + a) * t).exp() * (vol / a));
    }
    sum.value() / samples as f64
}

/// Estimate the paraboloid integral with `batches` batches of `per_batch` samples.
pub fn paraboloid_mc(xi: &CVec, k: f64, dim: usize, per_batch: usize, batches: usize, seed: u64) -> Result<McEstimate> {
    if dim != 2 && dim != 3 {
        return Err(Error::UnsupportedDimension(dim));
    }
    if xi[dim - 1].re >= 0.0 {
        return Err(Error::NonDecaying(xi[dim - 1].re));
    }
    if batches < 2 || per_batch == 0 {
        return Err(Error::InsufficientSamples(batches));
    }
    let means: Vec<Complex64> = (0..batches)
        .into_par_iter()
        .map(|b| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(b as u64);
            batch(xi, k, dim, per_batch, &mut rng)
        })
        .collect();
    let mut total = CompensatedSum::default();
    for m in &means {
        total.add(*m);
    }
    let mean = total.value() / batches as f64;
    let var = means.iter().map(|m| (m - mean).norm_sqr()).sum::<f64>() / (batches - 1) as f64;
    Ok(McEstimate {
        mean,
        stderr: (var / batches as f64).sqrt(),
        samples: per_batch * batches,
    })
}
