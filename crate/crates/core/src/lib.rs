//! Monte Carlo analysis of DS-CDMA ad hoc networks with exclusion zones and
//! CSMA guard zones.
//!
//! The model is a finite disk of mobiles placed by uniform clustering: each
//! mobile is redrawn until it clears the exclusion zone of every mobile
//! already placed, so the mobile count stays fixed. An optional guard-zone
//! pass then silences mobiles that landed inside the guard zone of an
//! earlier active mobile. Conditioned on one such realization (and on its
//! shadowing), the outage probability of the reference link under Nakagami
//! fading has an exact closed form, which makes spatial averaging a cheap
//! Monte Carlo loop rather than a nested simulation.
//!
//! Modules:
//! - [`spatial`]: placement and guard-zone deactivation
//! - [`channel`]: despreading gains, path loss, shadowing, normalized powers
//! - [`outage`]: the exact conditional outage probability
//! - [`oracle`]: independent SINR-sampling estimator used for validation
//! - [`metrics`]: ensemble averages, transmission capacity, latency, and
//!   constraint searches
//!
//! All randomness flows through per-work-item substreams ([`rng`]), so every
//! result is reproducible from a master seed regardless of thread count.

pub mod channel;
pub mod error;
pub mod metrics;
pub mod oracle;
pub mod outage;
pub mod rng;
pub mod spatial;

pub use error::{Error, Result};
