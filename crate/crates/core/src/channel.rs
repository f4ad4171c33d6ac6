//! Despreading gains, path loss, log-normal shadowing, and the normalized
//! power vector consumed by the outage closed form.

use crate::error::{Error, Result};
use crate::spatial::NetworkRealization;
use rand::Rng;
use rand_distr::StandardNormal;

/// How interference is attenuated by despreading.
#[derive(Debug, Clone, Copy)]
pub enum SpreadingMode {
    /// Every interferer is despread by the same constant factor. A factor of
    /// 1 models an unspread network.
    FixedEffectiveGain(f64),
    /// Each interferer gets an independent uniform chip-timing offset and is
    /// attenuated by `processing_gain / h(offset)`.
    RandomChipOffset { processing_gain: f64 },
}

/// A per-interferer parameter that is either shared by all mobiles or listed
/// mobile by mobile.
#[derive(Debug, Clone)]
pub enum PerMobile {
    Uniform(f64),
    Each(Vec<f64>),
}

impl PerMobile {
    pub fn get(&self, i: usize) -> f64 {
        match self {
            PerMobile::Uniform(v) => *v,
            PerMobile::Each(vs) => vs[i],
        }
    }

    fn values(&self) -> &[f64] {
        match self {
            PerMobile::Uniform(v) => std::slice::from_ref(v),
            PerMobile::Each(vs) => vs,
        }
    }

    fn check_len(&self, m: usize, key: &str) -> Result<()> {
        if let PerMobile::Each(vs) = self {
            if vs.len() != m {
                return Err(Error::InvalidParameter(format!(
                    "{key}: expected {m} per-mobile entries, got {}",
                    vs.len()
                )));
            }
        }
        Ok(())
    }
}

/// Propagation and transmission parameters shared by a study.
#[derive(Debug, Clone)]
pub struct ChannelConfig {
    /// Path-loss exponent, at least 2.
    pub alpha: f64,
    /// Shadowing standard deviation in dB; 0 disables shadowing.
    pub sigma_s_db: f64,
    /// Far-field reference distance; power-law attenuation is floored below
    /// it. 0 disables the floor.
    pub d0: f64,
    pub spreading: SpreadingMode,
    /// Interferer transmit power relative to the reference transmitter.
    pub power_ratio: PerMobile,
    /// Probability that a mobile transmits in the slot of interest.
    pub duty_factor: PerMobile,
    /// Nakagami fading parameter of each interferer channel.
    pub nakagami_m: PerMobile,
    /// Nakagami fading parameter of the desired-signal channel (integer).
    pub m0: u32,
}

impl ChannelConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha >= 2.0) {
            return Err(Error::InvalidParameter(format!(
                "path-loss exponent must be at least 2 (got {})",
                self.alpha
            )));
        }
        if !(self.sigma_s_db >= 0.0) || !self.sigma_s_db.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "shadowing standard deviation must be nonnegative (got {})",
                self.sigma_s_db
            )));
        }
        if !(self.d0 >= 0.0) || !self.d0.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "reference distance must be nonnegative (got {})",
                self.d0
            )));
        }
        let gain = match self.spreading {
            SpreadingMode::FixedEffectiveGain(g) => g,
            SpreadingMode::RandomChipOffset { processing_gain } => processing_gain,
        };
        if !(gain > 0.0) || !gain.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "spreading gain must be positive (got {gain})"
            )));
        }
        for &v in self.power_ratio.values() {
            if !(v >= 0.0) || !v.is_finite() {
                return Err(Error::InvalidParameter(format!("power ratio must be nonnegative (got {v})")));
            }
        }
        for &v in self.duty_factor.values() {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::InvalidParameter(format!("duty factor must lie in [0, 1] (got {v})")));
            }
        }
        for &v in self.nakagami_m.values() {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::InvalidParameter(format!("Nakagami parameter must be positive (got {v})")));
            }
        }
        if self.m0 < 1 {
            return Err(Error::InvalidParameter("desired-signal Nakagami parameter must be at least 1".into()));
        }
        Ok(())
    }

    pub fn validate_for(&self, num_interferers: usize) -> Result<()> {
        self.power_ratio.check_len(num_interferers, "power ratio")?;
        self.duty_factor.check_len(num_interferers, "duty factor")?;
        self.nakagami_m.check_len(num_interferers, "Nakagami parameter")?;
        Ok(())
    }
}

/// The normalized power vector: the desired-signal power and one entry per
/// interferer with its duty factor and fading parameter, ready for the
/// outage closed form.
#[derive(Debug, Clone)]
pub struct NormalizedPowers {
    /// Desired-signal power after shadowing and path loss.
    pub omega0: f64,
    /// Per-interferer normalized powers. Deactivated mobiles keep their
    /// entry; their duty factor is zeroed instead.
    pub omega: Vec<f64>,
    /// Transmit probabilities aligned with `omega` (0 for deactivated
    /// mobiles).
    pub duty: Vec<f64>,
    /// Nakagami parameters aligned with `omega`.
    pub fading_m: Vec<f64>,
}

/// Power-law attenuation relative to the reference distance `d0`:
/// `(d/d0)^-alpha` beyond `d0` and 1 inside it (far-field floor).
pub fn path_loss(d: f64, alpha: f64, d0: f64) -> Result<f64> {
    if !(d > 0.0) {
        return Err(Error::NonpositiveDistance);
    }
    if !(d0 > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "reference distance must be positive (got {d0})"
        )));
    }
    if d < d0 {
        Ok(1.0)
    } else {
        Ok((d / d0).powf(-alpha))
    }
}

/// Despreading attenuation of an asynchronous interferer at chip-timing
/// offset `tau`, for a rectangular chip waveform: `(tau^2 + (tc-tau)^2)/tc^2`.
pub fn chip_function(tau: f64, tc: f64) -> Result<f64> {
    if !(tc > 0.0) {
        return Err(Error::InvalidParameter(format!("chip duration must be positive (got {tc})")));
    }
    if !(0.0..tc).contains(&tau) {
        return Err(Error::ChipOffsetOutOfRange { tau, tc });
    }
    let r = tau / tc;
    Ok(r * r + (1.0 - r) * (1.0 - r))
}

/// Despreading gain per interferer. Fixed mode returns the constant for
/// every mobile; random-offset mode draws an i.i.d. uniform chip offset per
/// mobile and returns `processing_gain / h(offset)`.
pub fn effective_gain<R: Rng + ?Sized>(
    config: &ChannelConfig,
    num_interferers: usize,
    rng: &mut R,
) -> Vec<f64> {
    match config.spreading {
        SpreadingMode::FixedEffectiveGain(ge) => vec![ge; num_interferers],
        SpreadingMode::RandomChipOffset { processing_gain } => (0..num_interferers)
            .map(|_| {
                let tau = rng.gen::<f64>(); // offset as a fraction of the chip duration
                processing_gain / chip_function(tau, 1.0).expect("offset in [0, 1)")
            })
            .collect(),
    }
}

/// Power-law attenuation with the distance floored at `d0`. Unlike
/// [`path_loss`] this absorbs the `d0^-alpha` reference scale, which is the
/// form the normalized powers consume.
fn floored_power_law(d: f64, alpha: f64, d0: f64) -> Result<f64> {
    let eff = d.max(d0);
    if !(eff > 0.0) {
        return Err(Error::NonpositiveDistance);
    }
    Ok(eff.powf(-alpha))
}

fn shadowing_linear<R: Rng + ?Sized>(sigma_db: f64, rng: &mut R) -> f64 {
    if sigma_db == 0.0 {
        return 1.0;
    }
    let z: f64 = rng.sample(StandardNormal);
    (sigma_db * z * std::f64::consts::LN_10 / 10.0).exp()
}

/// Compute the normalized power vector for one realization.
///
/// Draw order is fixed: despreading gains first (random-offset mode only),
/// then one shadowing factor per mobile starting with the reference
/// transmitter. Shadowing is drawn for deactivated mobiles too, so the
/// stream consumption does not depend on the thinning outcome. With
/// `sigma_s_db = 0` and a fixed gain the mapping is deterministic.
pub fn normalized_powers<R: Rng + ?Sized>(
    net: &NetworkRealization,
    config: &ChannelConfig,
    rng: &mut R,
) -> Result<NormalizedPowers> {
    config.validate()?;
    let m = net.interferers.len();
    config.validate_for(m)?;

    let gains = effective_gain(config, m, rng);

    let d0 = net.x0.distance(&net.geometry.receiver);
    let omega0 =
        shadowing_linear(config.sigma_s_db, rng) * floored_power_law(d0, config.alpha, config.d0)?;

    let mut omega = Vec::with_capacity(m);
    let mut duty = Vec::with_capacity(m);
    let mut fading_m = Vec::with_capacity(m);
    for i in 0..m {
        let dist = net.interferers[i].distance(&net.geometry.receiver);
        let shadow = shadowing_linear(config.sigma_s_db, rng);
        let attenuation = floored_power_law(dist, config.alpha, config.d0)?;
        omega.push(config.power_ratio.get(i) / gains[i] * shadow * attenuation);
        duty.push(if net.active[i] { config.duty_factor.get(i) } else { 0.0 });
        fading_m.push(config.nakagami_m.get(i));
    }

    Ok(NormalizedPowers { omega0, omega, duty, fading_m })
}
