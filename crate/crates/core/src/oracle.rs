//! Brute-force outage estimation by direct SINR sampling.
//!
//! Draws the fading gains and transmit indicators, forms the SINR, and
//! counts threshold crossings. Deliberately independent of the closed form
//! in [`crate::outage`] so the two can validate each other.

use crate::channel::NormalizedPowers;
use crate::error::{Error, Result};
use crate::outage::OutageParams;
use crate::rng::substream;
use rand_distr::{Bernoulli, Distribution, Gamma};
use rayon::prelude::*;

#[derive(Debug, Clone, Copy)]
pub struct OracleConfig {
    pub samples: u64,
    pub seed: u64,
}

/// Samples per random substream; the chunk layout is part of the
/// determinism contract, not a tuning knob.
const CHUNK: u64 = 1 << 16;

struct InterferenceSource {
    transmits: Bernoulli,
    fading: Gamma<f64>,
    omega: f64,
}

/// Estimate the conditional outage probability by sampling, returning the
/// estimate and its binomial standard error.
///
/// Per sample: a unit-mean gamma gain for the desired signal, a Bernoulli
/// transmit indicator and unit-mean gamma gain per interferer, then a count
/// of SINR values at or below the threshold. Mobiles with zero duty factor
/// or zero power are skipped up front; they cannot contribute interference.
pub fn empirical_outage(
    powers: &NormalizedPowers,
    params: &OutageParams,
    cfg: &OracleConfig,
) -> Result<(f64, f64)> {
    params.validate()?;
    if cfg.samples == 0 {
        return Err(Error::InvalidParameter("sample count must be at least 1".into()));
    }
    if !(powers.omega0 > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "desired-signal power must be positive (got {})",
            powers.omega0
        )));
    }

    let m0 = f64::from(params.m0);
    let desired =
        Gamma::new(m0, 1.0 / m0).map_err(|e| Error::InvalidParameter(format!("fading: {e}")))?;

    let mut sources = Vec::new();
    for ((&omega, &duty), &shape) in powers.omega.iter().zip(&powers.duty).zip(&powers.fading_m) {
        if duty == 0.0 || omega == 0.0 {
            continue;
        }
        sources.push(InterferenceSource {
            transmits: Bernoulli::new(duty)
                .map_err(|_| Error::InvalidParameter(format!("duty factor {duty} outside [0, 1]")))?,
            fading: Gamma::new(shape, 1.0 / shape)
                .map_err(|e| Error::InvalidParameter(format!("fading: {e}")))?,
            omega,
        });
    }

    let z = if params.gamma_snr.is_infinite() { 0.0 } else { 1.0 / params.gamma_snr };
    let chunks = cfg.samples.div_ceil(CHUNK);
    let outages: u64 = (0..chunks)
        .into_par_iter()
        .map(|chunk| {
            let mut rng = substream(cfg.seed, chunk);
            let count = CHUNK.min(cfg.samples - chunk * CHUNK);
            let mut hits = 0u64;
            for _ in 0..count {
                let signal = desired.sample(&mut rng) * powers.omega0;
                let mut interference = 0.0;
                for src in &sources {
                    if src.transmits.sample(&mut rng) {
                        interference += src.fading.sample(&mut rng) * src.omega;
                    }
                }
                // SINR <= beta, written multiplicatively so z = 0 with no
                // interference stays exact
                if signal <= params.beta * (z + interference) {
                    hits += 1;
                }
            }
            hits
        })
        .sum();

    let estimate = outages as f64 / cfg.samples as f64;
    let std_err = (estimate * (1.0 - estimate) / cfg.samples as f64).sqrt();
    Ok((estimate, std_err))
}
