//! Ensemble averaging over network realizations and the derived
//! network-level figures of merit: average outage, transmission capacity,
//! latency, and the two constraint searches.
//!
//! Realization `i` of an ensemble always draws from substream `i` of the
//! master seed, so a fixed seed gives bit-identical results for any worker
//! count, and two ensembles sharing a seed share their placements and
//! shadowing (common random numbers). Placement never consumes randomness
//! that depends on the guard-zone radius, so a guard-zone sweep thins one
//! fixed set of networks.

use crate::channel::{normalized_powers, ChannelConfig, SpreadingMode};
use crate::error::{Error, Result};
use crate::outage::{conditional_outage, OutageParams};
use crate::rng::substream;
use crate::spatial::{apply_guard_zones, place_network, NetworkGeometry};
use rayon::prelude::*;
use std::f64::consts::PI;

/// Everything needed to evaluate one Monte Carlo ensemble.
#[derive(Debug, Clone)]
pub struct MonteCarloSpec {
    /// Number of network realizations to average over.
    pub num_networks: u64,
    pub geometry: NetworkGeometry,
    pub channel: ChannelConfig,
    pub outage: OutageParams,
    /// Apply guard-zone deactivation after placement.
    pub thinning: bool,
    pub seed: u64,
    /// Slots between a failed transmission and its retransmission; feeds the
    /// latency figure attached to the result.
    pub n_arq: u32,
    /// Retain per-realization records in the result.
    pub keep_records: bool,
}

impl MonteCarloSpec {
    pub fn validate(&self) -> Result<()> {
        if self.num_networks < 1 {
            return Err(Error::InvalidParameter("ensemble size must be at least 1".into()));
        }
        if self.n_arq < 1 {
            return Err(Error::InvalidParameter("retransmission spacing must be at least 1 slot".into()));
        }
        self.geometry.validate()?;
        self.channel.validate()?;
        self.channel.validate_for(self.geometry.num_interferers)?;
        self.outage.validate()?;
        if self.channel.m0 != self.outage.m0 {
            return Err(Error::InvalidParameter(format!(
                "desired-signal Nakagami parameter disagrees between channel ({}) and outage ({}) settings",
                self.channel.m0, self.outage.m0
            )));
        }
        // The far-field floor keeps the power law sane below d0, but a
        // partial exclusion zone inside the floor distance is almost
        // certainly a configuration mistake: either disable the zone
        // entirely or push it past d0.
        if self.channel.d0 > 0.0 && self.geometry.r_ex > 0.0 && self.geometry.r_ex < self.channel.d0 {
            return Err(Error::InvalidParameter(format!(
                "exclusion-zone radius {} must be 0 or at least the reference distance {}",
                self.geometry.r_ex, self.channel.d0
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RealizationRecord {
    /// Conditional outage probability of this realization.
    pub outage: f64,
    /// Active interferers after thinning (transmitter not counted).
    pub active_interferers: u32,
}

/// Ensemble-level summary of one Monte Carlo run.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentResult {
    /// Spatially averaged outage probability.
    pub eps_bar: f64,
    /// Standard error of the average (sample std / sqrt(N)).
    pub eps_std_err: f64,
    /// Normalized transmission capacity tau/b.
    pub tc_over_b: f64,
    /// Average latency in slot units for the spec's retransmission spacing;
    /// infinite if every realization was in outage.
    pub latency_slots: f64,
    /// Mean number of active mobiles, the reference transmitter included.
    pub mean_active: f64,
    /// Per-realization records, retained on request.
    pub records: Option<Vec<RealizationRecord>>,
}

fn realize_one(spec: &MonteCarloSpec, index: u64) -> Result<RealizationRecord> {
    let mut rng = substream(spec.seed, index);
    let mut net = place_network(&spec.geometry, &mut rng)?;
    if spec.thinning {
        net = apply_guard_zones(&net);
    }
    let powers = normalized_powers(&net, &spec.channel, &mut rng)?;
    let outage = conditional_outage(&powers, &spec.outage)?;
    Ok(RealizationRecord { outage, active_interferers: net.active_count() as u32 })
}

/// Average the conditional outage over `num_networks` independent
/// realizations: place, optionally thin, draw shadowing, evaluate the closed
/// form, and reduce in realization order.
pub fn average_outage(spec: &MonteCarloSpec) -> Result<ExperimentResult> {
    spec.validate()?;
    let n = spec.num_networks;
    let per: Vec<Result<RealizationRecord>> =
        (0..n).into_par_iter().map(|i| realize_one(spec, i)).collect();
    let mut records = Vec::with_capacity(per.len());
    for r in per {
        records.push(r?);
    }

    let count = n as f64;
    let eps_bar = records.iter().map(|r| r.outage).sum::<f64>() / count;
    let variance = if n > 1 {
        records.iter().map(|r| (r.outage - eps_bar).powi(2)).sum::<f64>() / (count - 1.0)
    } else {
        0.0
    };
    let eps_std_err = (variance / count).sqrt();
    let mean_active =
        1.0 + records.iter().map(|r| f64::from(r.active_interferers)).sum::<f64>() / count;
    let density = mean_active / (PI * spec.geometry.r_net * spec.geometry.r_net);
    let tc_over_b = (1.0 - eps_bar) * density;
    let latency_slots = if eps_bar < 1.0 {
        latency(eps_bar, 1.0, spec.n_arq)?
    } else {
        f64::INFINITY
    };

    Ok(ExperimentResult {
        eps_bar,
        eps_std_err,
        tc_over_b,
        latency_slots,
        mean_active,
        records: spec.keep_records.then_some(records),
    })
}

/// Transmission capacity: successful throughput per unit network area,
/// `(1 - eps_bar) * density * b`. The density counts active mobiles with
/// the reference transmitter included; duty factors do not discount it.
pub fn transmission_capacity(result: &ExperimentResult, geometry: &NetworkGeometry, b: f64) -> f64 {
    let density = result.mean_active / (PI * geometry.r_net * geometry.r_net);
    (1.0 - result.eps_bar) * density * b
}

/// Average time from the start of a transmission to its first successful
/// decoding, under retransmission every `n_arq` slots with memoryless
/// decoding attempts.
pub fn latency(eps_bar: f64, slot_duration: f64, n_arq: u32) -> Result<f64> {
    if n_arq < 1 {
        return Err(Error::InvalidParameter("retransmission spacing must be at least 1 slot".into()));
    }
    if !(0.0..1.0).contains(&eps_bar) {
        if eps_bar == 1.0 {
            return Err(Error::DivergentLatency);
        }
        return Err(Error::InvalidParameter(format!(
            "average outage probability must lie in [0, 1) (got {eps_bar})"
        )));
    }
    let success = 1.0 - eps_bar;
    let spacing = f64::from(n_arq);
    Ok(slot_duration * (spacing / success - success * (spacing - 1.0)))
}

/// Expected first-success slot count under geometric retransmissions,
/// `1 + n_arq * eps/(1 - eps)` slots. Alternative bookkeeping to
/// [`latency`]; the two disagree for `n_arq > 1`.
pub fn latency_geometric(eps_bar: f64, slot_duration: f64, n_arq: u32) -> Result<f64> {
    if n_arq < 1 {
        return Err(Error::InvalidParameter("retransmission spacing must be at least 1 slot".into()));
    }
    if !(0.0..1.0).contains(&eps_bar) {
        if eps_bar == 1.0 {
            return Err(Error::DivergentLatency);
        }
        return Err(Error::InvalidParameter(format!(
            "average outage probability must lie in [0, 1) (got {eps_bar})"
        )));
    }
    Ok(slot_duration * (1.0 + f64::from(n_arq) * eps_bar / (1.0 - eps_bar)))
}

fn checked_grid(grid: &[f64], name: &str) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::InvalidParameter(format!("{name} grid is empty")));
    }
    if grid.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidParameter(format!("{name} grid contains a non-finite value")));
    }
    if grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidParameter(format!("{name} grid must be strictly increasing")));
    }
    Ok(())
}

/// Smallest index in `candidates` whose evaluation passes `accept`,
/// exploiting the monotone trend of the metric: the first candidate and the
/// last are probed, then the boundary is bisected. Returns the passing index
/// together with the metric value at the last probe.
fn bisect_threshold<E, A>(
    candidates: usize,
    mut eval: E,
    accept: A,
) -> Result<std::result::Result<usize, f64>>
where
    E: FnMut(usize) -> Result<f64>,
    A: Fn(f64) -> bool,
{
    if accept(eval(0)?) {
        return Ok(Ok(0));
    }
    let last = candidates - 1;
    let at_last = eval(last)?;
    if !accept(at_last) {
        return Ok(Err(at_last));
    }
    let mut fail = 0usize;
    let mut pass = last;
    while pass - fail > 1 {
        let mid = fail + (pass - fail) / 2;
        if accept(eval(mid)?) {
            pass = mid;
        } else {
            fail = mid;
        }
    }
    Ok(Ok(pass))
}

/// Smallest guard-zone radius on the grid that pulls the average outage down
/// to `target_eps` (within a relative acceptance slack `rel_tol`), for the
/// template's parameters.
///
/// The exclusion-zone radius is always probed first, so a constraint that is
/// already met without any deactivation returns `r_ex`. Grid points below
/// `r_ex` are dropped: a guard zone inside the exclusion zone deactivates
/// nothing. Every probe reuses the template's master seed, so all candidate
/// radii thin the same set of networks.
pub fn min_guard_radius(
    target_eps: f64,
    rel_tol: f64,
    template: &MonteCarloSpec,
    rg_grid: &[f64],
) -> Result<f64> {
    if !(0.0..=1.0).contains(&target_eps) {
        return Err(Error::InvalidParameter(format!(
            "target outage probability must lie in [0, 1] (got {target_eps})"
        )));
    }
    if !(rel_tol >= 0.0) {
        return Err(Error::InvalidParameter(format!("acceptance slack must be nonnegative (got {rel_tol})")));
    }
    checked_grid(rg_grid, "guard-zone radius")?;

    let r_ex = template.geometry.r_ex;
    let mut candidates = vec![r_ex];
    candidates.extend(rg_grid.iter().copied().filter(|&rg| rg > r_ex));

    let threshold = target_eps * (1.0 + rel_tol);
    let eval = |idx: usize| -> Result<f64> {
        let mut spec = template.clone();
        spec.geometry.r_g = candidates[idx];
        spec.thinning = true;
        spec.keep_records = false;
        Ok(average_outage(&spec)?.eps_bar)
    };
    match bisect_threshold(candidates.len(), eval, |eps| eps <= threshold)? {
        Ok(idx) => Ok(candidates[idx]),
        Err(best) => Err(Error::TargetUnachievable { target: target_eps, best }),
    }
}

/// Smallest effective spreading gain on the grid that lifts the normalized
/// transmission capacity to `target_tc_over_b` (within a relative acceptance
/// slack `rel_tol`), for the template's guard-zone radius.
pub fn min_spreading_gain(
    target_tc_over_b: f64,
    rel_tol: f64,
    template: &MonteCarloSpec,
    ge_grid: &[f64],
) -> Result<f64> {
    if !(target_tc_over_b >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "target transmission capacity must be nonnegative (got {target_tc_over_b})"
        )));
    }
    if !(rel_tol >= 0.0) {
        return Err(Error::InvalidParameter(format!("acceptance slack must be nonnegative (got {rel_tol})")));
    }
    checked_grid(ge_grid, "spreading gain")?;
    if ge_grid[0] <= 0.0 {
        return Err(Error::InvalidParameter("spreading gains must be positive".into()));
    }

    let threshold = target_tc_over_b * (1.0 - rel_tol);
    let eval = |idx: usize| -> Result<f64> {
        let mut spec = template.clone();
        spec.channel.spreading = SpreadingMode::FixedEffectiveGain(ge_grid[idx]);
        spec.keep_records = false;
        Ok(average_outage(&spec)?.tc_over_b)
    };
    match bisect_threshold(ge_grid.len(), eval, |tc| tc >= threshold)? {
        Ok(idx) => Ok(ge_grid[idx]),
        Err(best) => Err(Error::TargetUnachievable { target: target_tc_over_b, best }),
    }
}
