//! One module per subcommand. Each parses its own strict `sweep` block.

pub mod cgo_verify;
pub mod distinguish;
pub mod identity_check;
pub mod kpoint_decay;
pub mod medium_demo;
pub mod nonradiating_audit;
pub mod sweep_small;

use crate::config::ExperimentConfig;
use crate::error::{CliError, CliResult};
use elastic_scatter::elastic::{make_medium, LameMedium};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

/// Evaluate `f(0..n)` on the worker pool, keeping point order.
pub(crate) fn par_points<T, F>(n: usize, f: F) -> CliResult<Vec<T>>
where
    T: Send,
    F: Fn(usize) -> CliResult<T> + Sync + Send,
{
    (0..n).into_par_iter().map(f).collect()
}

pub(crate) fn medium(cfg: &ExperimentConfig, dim: usize) -> CliResult<LameMedium> {
    let m = &cfg.medium;
    Ok(make_medium(m.lambda, m.mu, m.omega, dim)?)
}

/// Generator for randomly drawn configurations; stream 0 is reserved for it,
/// per-point seeds use the other streams.
pub(crate) fn draw_rng(seed: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(0);
    rng
}

pub(crate) fn validation(msg: String) -> CliError {
    CliError::Validation(msg)
}
