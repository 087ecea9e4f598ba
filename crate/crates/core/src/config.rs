//! Size guards for dense simulation.

use std::sync::atomic::{AtomicUsize, Ordering};

pub const DEFAULT_MAX_N: usize = 14;
pub const MAX_DENSITY_QUBITS: usize = 12;
pub const ENV_MAX_N: &str = "MAGICLAB_MAX_N";

static OVERRIDE: AtomicUsize = AtomicUsize::new(0);

/// Largest qubit count accepted by dense statevector routines.
///
/// Precedence: [`set_max_n`], then the `MAGICLAB_MAX_N` environment variable,
/// then [`DEFAULT_MAX_N`].
pub fn max_n() -> usize {
    match OVERRIDE.load(Ordering::Relaxed) {
        0 => std::env::var(ENV_MAX_N)
            .ok()
            .and_then(|v| v.trim().parse().ok())
            .filter(|&v: &usize| v > 0)
            .unwrap_or(DEFAULT_MAX_N),
        v => v,
    }
}

/// Process-wide override; `0` clears it.
pub fn set_max_n(n: usize) {
    OVERRIDE.store(n, Ordering::Relaxed);
}
