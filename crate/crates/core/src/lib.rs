//! Low-discrepancy point sets and sequences in quadratic irrational bases.
//!
//! The base is the largest root `gamma` of `x^2 - p x - q` with
//! `1 <= q <= p`; `p = q = 1` gives the golden ratio. The crate provides
//!
//! * exact digit arithmetic and admissible-word enumeration ([`numeration`]),
//! * elementary intervals and partitions ([`intervals`]),
//! * van der Corput, Hammersley and weak (1,2)-sequence constructions ([`generators`]),
//! * exact net and sequence verification ([`equidist`]),
//! * exact star and L2 discrepancy ([`discrepancy`]).

pub mod discrepancy;
pub mod equidist;
pub mod error;
pub mod generators;
pub mod intervals;
pub mod numeration;

pub use error::{Error, Result};

/// Caps the global thread pool at `IRRNET_THREADS` when that variable is set.
pub fn init_threads_from_env() -> Result<()> {
    let Ok(raw) = std::env::var("IRRNET_THREADS") else {
        return Ok(());
    };
    let n: usize = raw.trim().parse().ok().filter(|&n| n > 0).ok_or_else(|| {
        Error::Domain(format!(
            "IRRNET_THREADS must be a positive integer, got {raw:?}"
        ))
    })?;
    // a second initialization keeps the existing pool
    let _ = rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global();
    Ok(())
}
