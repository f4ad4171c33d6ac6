//! Exact conditional outage probability for an integer desired-signal
//! Nakagami parameter.
//!
//! Conditioned on the normalized powers, the SINR survival probability of a
//! Nakagami-faded desired signal is a short exponential series whose
//! interference dependence is captured by the coefficients of a truncated
//! product of per-interferer series. Each interferer contributes the factor
//! sequence produced by [`factor_term`]; [`series_coeff`] convolves the
//! sequences degree by degree, and [`conditional_outage`] assembles the
//! final probability. Every term is nonnegative, so the evaluation has no
//! cancellation; the double sum is compensated anyway since it is nearly
//! free at these sizes.

use crate::channel::NormalizedPowers;
use crate::error::{Error, Result};

/// Outage threshold and noise parameters.
#[derive(Debug, Clone, Copy)]
pub struct OutageParams {
    /// SINR threshold (linear).
    pub beta: f64,
    /// Normalized SNR (linear). `f64::INFINITY` models a noiseless network.
    pub gamma_snr: f64,
    /// Nakagami parameter of the desired-signal channel; the closed form
    /// requires it to be a positive integer.
    pub m0: u32,
}

impl OutageParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.beta > 0.0) || !self.beta.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "SINR threshold must be positive and finite (got {})",
                self.beta
            )));
        }
        if !(self.gamma_snr > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "normalized SNR must be positive (got {})",
                self.gamma_snr
            )));
        }
        if self.m0 < 1 {
            return Err(Error::InvalidParameter(
                "desired-signal Nakagami parameter must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

/// One interferer's contribution to the outage series.
#[derive(Debug, Clone, Copy)]
pub struct SeriesFactor {
    /// `(scaled_threshold * omega / shape + 1)^-1`, in (0, 1]. Equals 1
    /// exactly when the interferer radiates no power.
    pub base: f64,
    /// Normalized interferer power.
    pub omega: f64,
    /// Nakagami parameter of the interferer channel.
    pub shape: f64,
    /// Transmit probability; 0 for silenced mobiles.
    pub duty: f64,
}

/// Per-interferer factors plus the truncation degree of the series.
#[derive(Debug, Clone)]
pub struct OutageSeries {
    degree: usize,
    factors: Vec<SeriesFactor>,
}

impl OutageSeries {
    pub fn new(powers: &NormalizedPowers, params: &OutageParams) -> Result<Self> {
        params.validate()?;
        if !(powers.omega0 > 0.0) || !powers.omega0.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "desired-signal power must be positive and finite (got {})",
                powers.omega0
            )));
        }
        let scaled_threshold = params.beta * f64::from(params.m0) / powers.omega0;
        let factors = powers
            .omega
            .iter()
            .zip(&powers.duty)
            .zip(&powers.fading_m)
            .map(|((&omega, &duty), &shape)| SeriesFactor {
                base: 1.0 / (scaled_threshold * omega / shape + 1.0),
                omega,
                shape,
                duty,
            })
            .collect();
        Ok(OutageSeries { degree: params.m0 as usize, factors })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn factors(&self) -> &[SeriesFactor] {
        &self.factors
    }
}

/// Term of order `ell` in a single interferer's series.
///
/// Order 0 is `1 - duty*(1 - base^shape)`; higher orders carry the gamma
/// ratio `prod_{k<ell} (shape+k)/(k+1)`, evaluated as a running product and
/// fused with the bounded factor `omega*base/shape` so that arbitrarily
/// large powers stay in range.
pub fn factor_term(ell: usize, f: &SeriesFactor) -> f64 {
    if ell == 0 {
        return 1.0 - f.duty * (1.0 - f.base.powf(f.shape));
    }
    let scaled = f.omega * f.base / f.shape;
    let mut term = f.base.powf(f.shape);
    for k in 0..ell {
        term *= (f.shape + k as f64) / (k as f64 + 1.0) * scaled;
    }
    f.duty * term
}

/// Coefficient of order `t` of the product of all per-interferer series:
/// the sum over every way of drawing orders summing to `t`, one per
/// interferer. Computed by degree-truncated sequential convolution in
/// O(interferers * degree^2).
pub fn series_coeff(t: usize, series: &OutageSeries) -> Result<f64> {
    if t >= series.degree {
        return Err(Error::DegreeOutOfRange { degree: t, max: series.degree - 1 });
    }
    Ok(series_coeffs(series)[t])
}

fn series_coeffs(series: &OutageSeries) -> Vec<f64> {
    let n = series.degree;
    let mut coeffs = vec![0.0; n];
    coeffs[0] = 1.0;
    let mut terms = vec![0.0; n];
    for f in &series.factors {
        // silent or powerless mobiles contribute the identity sequence
        if f.duty == 0.0 || f.omega == 0.0 {
            continue;
        }
        for (ell, slot) in terms.iter_mut().enumerate() {
            *slot = factor_term(ell, f);
        }
        for t in (0..n).rev() {
            let mut acc = 0.0;
            for ell in 0..=t {
                acc += terms[ell] * coeffs[t - ell];
            }
            coeffs[t] = acc;
        }
    }
    coeffs
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// Exact outage probability conditioned on the normalized powers.
///
/// The noise term enters as `z = 1/gamma_snr`, and powers of `z` are kept
/// fused with the threshold powers so that `z = 0` (infinite SNR) is exact:
/// only the diagonal of the double sum survives. A result outside [0, 1] by
/// more than 1e-12 raises [`Error::NumericalConsistency`].
pub fn conditional_outage(powers: &NormalizedPowers, params: &OutageParams) -> Result<f64> {
    let series = OutageSeries::new(powers, params)?;
    let coeffs = series_coeffs(&series);
    let scaled_threshold = params.beta * f64::from(params.m0) / powers.omega0;
    let z = if params.gamma_snr.is_infinite() { 0.0 } else { 1.0 / params.gamma_snr };

    let mut sum = 0.0;
    let mut compensation = 0.0;
    let mut threshold_pow = 1.0; // scaled_threshold^s
    for s in 0..series.degree() {
        for (t, &coeff) in coeffs.iter().enumerate().take(s + 1) {
            let term = threshold_pow * z.powi((s - t) as i32) * coeff / factorial(s - t);
            let y = term - compensation;
            let fresh = sum + y;
            compensation = (fresh - sum) - y;
            sum = fresh;
        }
        threshold_pow *= scaled_threshold;
    }

    let outage = 1.0 - (-scaled_threshold * z).exp() * sum;
    const SLACK: f64 = 1e-12;
    if outage.is_nan() || outage < -SLACK || outage > 1.0 + SLACK {
        return Err(Error::NumericalConsistency { value: outage });
    }
    Ok(outage.clamp(0.0, 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{empirical_outage, OracleConfig};
    use crate::rng::substream;
    use proptest::prelude::*;
    use rand::Rng;

    fn powers(omega0: f64, entries: &[(f64, f64, f64)]) -> NormalizedPowers {
        NormalizedPowers {
            omega0,
            omega: entries.iter().map(|e| e.0).collect(),
            duty: entries.iter().map(|e| e.1).collect(),
            fading_m: entries.iter().map(|e| e.2).collect(),
        }
    }

    fn params(beta: f64, gamma: f64, m0: u32) -> OutageParams {
        OutageParams { beta, gamma_snr: gamma, m0 }
    }

    /// Brute-force evaluation of the order-t product coefficient by
    /// enumerating every per-interferer order vector summing to t.
    fn enumerated_coeff(t: usize, series: &OutageSeries) -> f64 {
        fn recurse(factors: &[SeriesFactor], remaining: usize, product: f64) -> f64 {
            match factors.split_first() {
                None => {
                    if remaining == 0 {
                        product
                    } else {
                        0.0
                    }
                }
                Some((first, rest)) => (0..=remaining)
                    .map(|ell| recurse(rest, remaining - ell, product * factor_term(ell, first)))
                    .sum(),
            }
        }
        recurse(series.factors(), t, 1.0)
    }

    fn random_powers<R: Rng>(rng: &mut R, max_m: usize) -> NormalizedPowers {
        let m = rng.gen_range(0..=max_m);
        let entries: Vec<(f64, f64, f64)> = (0..m)
            .map(|_| {
                let omega = 10f64.powf(rng.gen_range(-2.0..2.0));
                let duty = [0.0, 0.5, 1.0][rng.gen_range(0..3)];
                let shape = [0.5, 1.0, 2.0][rng.gen_range(0..3)];
                (omega, duty, shape)
            })
            .collect();
        powers(10f64.powf(rng.gen_range(-1.0..2.0)), &entries)
    }

    #[test]
    fn silent_mobile_contributes_identity_terms() {
        let f = SeriesFactor { base: 0.3, omega: 2.0, shape: 1.5, duty: 0.0 };
        assert_eq!(factor_term(0, &f), 1.0);
        for ell in 1..5 {
            assert_eq!(factor_term(ell, &f), 0.0);
        }
    }

    #[test]
    fn powerless_mobile_contributes_identity_terms() {
        let f = SeriesFactor { base: 1.0, omega: 0.0, shape: 2.0, duty: 0.8 };
        assert_eq!(factor_term(0, &f), 1.0);
        for ell in 1..5 {
            assert_eq!(factor_term(ell, &f), 0.0);
        }
    }

    #[test]
    fn rayleigh_first_order_term_matches_hand_evaluation() {
        // shape 1, duty 0.5, threshold*omega = 1 so base = 1/2:
        // order 1 equals duty * omega * base^2
        let p = powers(2.0, &[(0.5, 0.5, 1.0)]);
        let series = OutageSeries::new(&p, &params(1.0, f64::INFINITY, 4)).unwrap();
        let f = series.factors()[0];
        assert!((f.base - 0.5).abs() < 1e-15);
        let expected = 0.5 * 0.5 * 0.25;
        assert!((factor_term(1, &f) - expected).abs() < 1e-15);
    }

    #[test]
    fn coefficient_order_zero_is_product_of_leading_terms() {
        let p = powers(1.0, &[(0.4, 0.5, 1.0), (1.3, 1.0, 2.0), (0.2, 0.3, 0.5)]);
        let series = OutageSeries::new(&p, &params(1.0, 10.0, 3)).unwrap();
        let direct: f64 = series.factors().iter().map(|f| factor_term(0, f)).product();
        assert!((series_coeff(0, &series).unwrap() - direct).abs() < 1e-15);
    }

    #[test]
    fn single_interferer_coefficients_reduce_to_its_terms() {
        let p = powers(1.0, &[(0.7, 0.5, 1.5)]);
        let series = OutageSeries::new(&p, &params(2.0, 10.0, 4)).unwrap();
        for t in 0..4 {
            let expected = factor_term(t, &series.factors()[0]);
            assert!((series_coeff(t, &series).unwrap() - expected).abs() < 1e-15);
        }
    }

    #[test]
    fn convolution_matches_enumeration() {
        let mut rng = substream(101, 0);
        for _ in 0..50 {
            let m = rng.gen_range(1..=5usize);
            let entries: Vec<(f64, f64, f64)> = (0..m)
                .map(|_| (rng.gen_range(0.01..5.0), rng.gen_range(0.0..1.0), rng.gen_range(0.3..3.0)))
                .collect();
            let p = powers(rng.gen_range(0.1..10.0), &entries);
            let series = OutageSeries::new(&p, &params(1.0, 10.0, 4)).unwrap();
            for t in 0..4 {
                let conv = series_coeff(t, &series).unwrap();
                let brute = enumerated_coeff(t, &series);
                assert!(
                    (conv - brute).abs() <= 1e-12 * brute.abs().max(1e-300),
                    "t={t}: {conv} vs {brute}"
                );
            }
        }
    }

    #[test]
    fn coefficient_degree_out_of_range_is_rejected() {
        let p = powers(1.0, &[(0.4, 0.5, 1.0)]);
        let series = OutageSeries::new(&p, &params(1.0, 10.0, 3)).unwrap();
        assert!(matches!(series_coeff(3, &series), Err(Error::DegreeOutOfRange { .. })));
    }

    #[test]
    fn noise_only_rayleigh_closed_form() {
        let eps = conditional_outage(&powers(1.0, &[]), &params(1.0, 10.0, 1)).unwrap();
        let expected = 1.0 - (-0.1f64).exp();
        assert!((eps - expected).abs() < 1e-15, "eps = {eps}");
    }

    #[test]
    fn no_noise_no_interference_never_fails() {
        for m0 in 1..=4 {
            let eps = conditional_outage(&powers(2.0, &[]), &params(1.0, f64::INFINITY, m0)).unwrap();
            assert_eq!(eps, 0.0);
        }
    }

    #[test]
    fn single_rayleigh_interferer_without_noise() {
        for (omega0, omega1, beta) in [(1.0, 1.0, 1.0), (2.0, 0.5, 1.5), (5.0, 3.0, 0.25)] {
            let eps = conditional_outage(
                &powers(omega0, &[(omega1, 1.0, 1.0)]),
                &params(beta, f64::INFINITY, 1),
            )
            .unwrap();
            let expected = 1.0 - 1.0 / (1.0 + beta * omega1 / omega0);
            assert!((eps - expected).abs() / expected < 1e-12, "eps = {eps} vs {expected}");
        }
    }

    #[test]
    fn mixed_fading_agrees_with_sampling_oracle() {
        let mut rng = substream(103, 0);
        let entries: Vec<(f64, f64, f64)> =
            (0..5).map(|_| (10f64.powf(rng.gen_range(-1.5..1.0)), 0.5, 1.0)).collect();
        let p = powers(1.0, &entries);
        let pars = params(1.0, 10.0, 3);
        let eps = conditional_outage(&p, &pars).unwrap();
        let (est, _) =
            empirical_outage(&p, &pars, &OracleConfig { samples: 1_000_000, seed: 9 }).unwrap();
        let sigma = (eps * (1.0 - eps) / 1e6).sqrt();
        assert!((est - eps).abs() <= 3.0 * sigma, "closed form {eps}, oracle {est}");
    }

    #[test]
    fn outage_is_monotone_in_every_parameter() {
        let mut rng = substream(107, 0);
        for _ in 0..50 {
            let p = random_powers(&mut rng, 6);
            let pars = params(
                10f64.powf(rng.gen_range(-0.5..0.5)),
                if rng.gen_bool(0.5) { 10.0 } else { f64::INFINITY },
                rng.gen_range(1..=4),
            );
            let base = conditional_outage(&p, &pars).unwrap();
            let slack = 1e-12;

            let mut up = pars;
            up.beta *= 1.05;
            assert!(conditional_outage(&p, &up).unwrap() >= base - slack);

            if pars.gamma_snr.is_finite() {
                let mut snr = pars;
                snr.gamma_snr *= 1.2;
                assert!(conditional_outage(&p, &snr).unwrap() <= base + slack);
            }

            let mut stronger_signal = p.clone();
            stronger_signal.omega0 *= 1.1;
            assert!(conditional_outage(&stronger_signal, &pars).unwrap() <= base + slack);

            for i in 0..p.omega.len() {
                let mut bump_omega = p.clone();
                bump_omega.omega[i] *= 1.25;
                assert!(conditional_outage(&bump_omega, &pars).unwrap() >= base - slack);

                let mut bump_duty = p.clone();
                bump_duty.duty[i] = (bump_duty.duty[i] + 0.3).min(1.0);
                assert!(conditional_outage(&bump_duty, &pars).unwrap() >= base - slack);
            }
        }
    }

    #[test]
    fn zero_duty_equals_deleting_the_interferer() {
        let mut rng = substream(109, 0);
        for _ in 0..100 {
            let mut p = random_powers(&mut rng, 8);
            if p.omega.is_empty() {
                continue;
            }
            let victim = rng.gen_range(0..p.omega.len());
            p.duty[victim] = 0.0;
            let pars = params(1.0, 10.0, rng.gen_range(1..=4));
            let zeroed = conditional_outage(&p, &pars).unwrap();

            let mut deleted = p.clone();
            deleted.omega.remove(victim);
            deleted.duty.remove(victim);
            deleted.fading_m.remove(victim);
            let removed = conditional_outage(&deleted, &pars).unwrap();
            assert!(
                (zeroed - removed).abs() <= 1e-14 * removed.max(1e-300),
                "{zeroed} vs {removed}"
            );
        }
    }

    #[test]
    fn extreme_inputs_stay_in_range_or_error_cleanly() {
        // huge threshold against a weak signal saturates at 1
        let eps =
            conditional_outage(&powers(1e-12, &[(1e9, 1.0, 1.0)]), &params(1e6, 0.1, 4)).unwrap();
        assert_eq!(eps, 1.0);
        // invalid inputs are parameter errors, not silent results
        assert!(conditional_outage(&powers(0.0, &[]), &params(1.0, 10.0, 1)).is_err());
        assert!(conditional_outage(&powers(1.0, &[]), &params(0.0, 10.0, 1)).is_err());
        assert!(conditional_outage(&powers(1.0, &[]), &params(1.0, 10.0, 0)).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn outage_is_a_probability(seed in any::<u64>()) {
            let mut rng = substream(seed, 0);
            let p = random_powers(&mut rng, 10);
            let pars = params(
                10f64.powf(rng.gen_range(-2.0..2.0)),
                if rng.gen_bool(0.3) { f64::INFINITY } else { 10f64.powf(rng.gen_range(-1.0..2.0)) },
                rng.gen_range(1..=4),
            );
            let eps = conditional_outage(&p, &pars).unwrap();
            prop_assert!((0.0..=1.0).contains(&eps));
        }

        #[test]
        fn outage_is_permutation_invariant(seed in any::<u64>()) {
            let mut rng = substream(seed, 1);
            let p = random_powers(&mut rng, 8);
            let pars = params(1.0, 10.0, rng.gen_range(1..=4));
            let base = conditional_outage(&p, &pars).unwrap();

            let mut indices: Vec<usize> = (0..p.omega.len()).collect();
            for i in (1..indices.len()).rev() {
                indices.swap(i, rng.gen_range(0..=i));
            }
            let shuffled = NormalizedPowers {
                omega0: p.omega0,
                omega: indices.iter().map(|&i| p.omega[i]).collect(),
                duty: indices.iter().map(|&i| p.duty[i]).collect(),
                fading_m: indices.iter().map(|&i| p.fading_m[i]).collect(),
            };
            let permuted = conditional_outage(&shuffled, &pars).unwrap();
            prop_assert!((base - permuted).abs() <= 1e-12 * base.max(1e-300));
        }

        #[test]
        fn outage_is_scale_invariant(seed in any::<u64>(), scale in 0.01f64..100.0) {
            let mut rng = substream(seed, 2);
            let p = random_powers(&mut rng, 8);
            let pars = params(1.0, 10.0, rng.gen_range(1..=4));
            let base = conditional_outage(&p, &pars).unwrap();

            let scaled_powers = NormalizedPowers {
                omega0: p.omega0 * scale,
                omega: p.omega.iter().map(|o| o * scale).collect(),
                duty: p.duty.clone(),
                fading_m: p.fading_m.clone(),
            };
            let scaled_params = OutageParams { gamma_snr: pars.gamma_snr / scale, ..pars };
            let scaled = conditional_outage(&scaled_powers, &scaled_params).unwrap();
            prop_assert!((base - scaled).abs() <= 1e-12 * base.max(1e-12));
        }
    }
}
