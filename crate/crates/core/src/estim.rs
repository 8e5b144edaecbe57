//! Monte Carlo check of the classical and quantum Cramér–Rao bounds.
//!
//! Outcomes are drawn from the trace-rule distribution, `theta` is estimated
//! by maximum likelihood, and the spread of the estimates over independent
//! replications is compared with `1/(n i)` and `1/(n I)`.
//!
//! Replication `k` draws from `ChaCha8Rng::seed_from_u64(seed)` on stream `k`,
//! so replications are reproducible individually and in any order.

use std::f64::consts::FRAC_PI_4;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::measure::{fisher_info, probs, Povm};
use crate::model::{DerivativeMethod, QubitModel};
use crate::sld::model_qfi;

/// Coarse grid size of the likelihood search.
pub const MLE_GRID: usize = 256;

/// Golden-section stopping width.
pub const MLE_XTOL: f64 = 1e-8;

#[derive(Clone, Debug)]
pub struct Experiment {
    pub model: QubitModel,
    pub theta_true: f64,
    pub povm: Povm,
    pub n_samples: u64,
    pub seed: u64,
}

impl Experiment {
    pub fn new(model: QubitModel, theta_true: f64, povm: Povm, n_samples: u64, seed: u64) -> Result<Self> {
        if n_samples == 0 {
            return Err(Error::InvalidExperiment("n_samples must be positive".into()));
        }
        probs(&model.rho(theta_true)?, &povm)?;
        Ok(Self {
            model,
            theta_true,
            povm,
            n_samples,
            seed,
        })
    }

    /// Default MLE search interval `[θ − π/4, θ + π/4]`.
    pub fn default_interval(&self) -> (f64, f64) {
        (self.theta_true - FRAC_PI_4, self.theta_true + FRAC_PI_4)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EstimationSummary {
    pub theta_hat_mean: f64,
    /// Unbiased sample variance across replications.
    pub theta_hat_var: f64,
    /// Standard error of `theta_hat_var`, `var · sqrt(2/(R − 1))`.
    pub theta_hat_var_se: f64,
    /// `1/(n i)`
    pub cr_bound: f64,
    /// `1/(n I)`
    pub qcr_bound: f64,
    pub replications: usize,
}

fn multinomial<R: Rng>(rng: &mut R, n: u64, ps: &[f64]) -> Vec<u64> {
    let mut counts = vec![0u64; ps.len()];
    let mut left = n;
    let mut mass = 1.0;
    for (i, &p) in ps.iter().enumerate() {
        if left == 0 {
            break;
        }
        if i + 1 == ps.len() {
            counts[i] = left;
            break;
        }
        let q = if mass > 0.0 { (p / mass).clamp(0.0, 1.0) } else { 0.0 };
        let draw = Binomial::new(left, q).expect("probability clamped to [0,1]").sample(rng);
        counts[i] = draw;
        left -= draw;
        mass -= p;
    }
    counts
}

fn sample_with<R: Rng>(exp: &Experiment, rng: &mut R) -> Result<Vec<u64>> {
    let ps = probs(&exp.model.rho(exp.theta_true)?, &exp.povm)?;
    Ok(multinomial(rng, exp.n_samples, &ps))
}

/// Multinomial outcome counts, one per POVM element, from the experiment seed.
pub fn sample(exp: &Experiment) -> Result<Vec<u64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(exp.seed);
    sample_with(exp, &mut rng)
}

fn log_likelihood(model: &QubitModel, povm: &Povm, counts: &[f64], theta: f64) -> Result<f64> {
    let ps = probs(&model.rho(theta)?, povm)?;
    let mut ll = 0.0;
    for (&n, &p) in counts.iter().zip(&ps) {
        if n == 0.0 {
            continue;
        }
        if p <= 0.0 {
            return Ok(f64::NEG_INFINITY);
        }
        ll += n * p.ln();
    }
    Ok(ll)
}

/// Maximum-likelihood estimate of `theta` on `[lo, hi]`: a 256-point grid
/// search, then golden-section refinement around the best grid point.
pub fn mle(model: &QubitModel, povm: &Povm, counts: &[f64], interval: (f64, f64)) -> Result<f64> {
    let (lo, hi) = interval;
    if counts.len() != povm.len() {
        return Err(Error::InvalidExperiment(format!(
            "{} counts for {} outcomes",
            counts.len(),
            povm.len()
        )));
    }
    if counts.iter().any(|&n| !n.is_finite() || n < 0.0) || counts.iter().sum::<f64>() < 1.0 {
        return Err(Error::InvalidExperiment("counts must be nonnegative with total >= 1".into()));
    }
    if !lo.is_finite() || !hi.is_finite() || lo >= hi {
        return Err(Error::InvalidExperiment(format!("bad search interval [{lo}, {hi}]")));
    }

    let step = (hi - lo) / (MLE_GRID - 1) as f64;
    let grid: Vec<f64> = (0..MLE_GRID).map(|i| lo + step * i as f64).collect();
    let values = grid
        .iter()
        .map(|&t| log_likelihood(model, povm, counts, t))
        .collect::<Result<Vec<_>>>()?;

    let (mut best, mut best_val) = (0, f64::NEG_INFINITY);
    let (mut min_val, mut max_val) = (f64::INFINITY, f64::NEG_INFINITY);
    for (i, &v) in values.iter().enumerate() {
        if v > best_val {
            best = i;
            best_val = v;
        }
        min_val = min_val.min(v);
        max_val = max_val.max(v);
    }
    if max_val - min_val <= 1e-12 {
        return Err(Error::FlatLikelihood(max_val - min_val));
    }

    let mut a = grid[best.saturating_sub(1)];
    let mut b = grid[(best + 1).min(MLE_GRID - 1)];
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = b - inv_phi * (b - a);
    let mut x2 = a + inv_phi * (b - a);
    let mut f1 = log_likelihood(model, povm, counts, x1)?;
    let mut f2 = log_likelihood(model, povm, counts, x2)?;
    while b - a > MLE_XTOL {
        if f1 < f2 {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = log_likelihood(model, povm, counts, x2)?;
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = log_likelihood(model, povm, counts, x1)?;
        }
    }
    let refined = 0.5 * (a + b);
    let refined_val = log_likelihood(model, povm, counts, refined)?;
    Ok(if refined_val >= best_val { refined } else { grid[best] })
}

/// Runs `replications` independent experiments and summarizes the MLE spread
/// against both bounds at `theta_true`.
pub fn run_replicated(
    exp: &Experiment,
    replications: usize,
    interval: Option<(f64, f64)>,
) -> Result<EstimationSummary> {
    if replications < 100 {
        return Err(Error::InvalidExperiment(format!(
            "need at least 100 replications, got {replications}"
        )));
    }
    let interval = interval.unwrap_or_else(|| exp.default_interval());
    let estimates = (0..replications)
        .map(|k| {
            let mut rng = ChaCha8Rng::seed_from_u64(exp.seed);
            rng.set_stream(k as u64);
            let counts = sample_with(exp, &mut rng)?;
            let counts: Vec<f64> = counts.into_iter().map(|n| n as f64).collect();
            mle(&exp.model, &exp.povm, &counts, interval)
        })
        .collect::<Result<Vec<f64>>>()?;

    let r = replications as f64;
    let mean = estimates.iter().sum::<f64>() / r;
    let var = estimates.iter().map(|t| (t - mean).powi(2)).sum::<f64>() / (r - 1.0);

    let rho = exp.model.rho(exp.theta_true)?;
    let d = exp.model.drho(exp.theta_true, DerivativeMethod::Analytic)?;
    let fisher = fisher_info(&d, &rho, &exp.povm)?;
    let qfi = model_qfi(&exp.model, exp.theta_true)?;
    let n = exp.n_samples as f64;
    Ok(EstimationSummary {
        theta_hat_mean: mean,
        theta_hat_var: var,
        theta_hat_var_se: var * (2.0 / (r - 1.0)).sqrt(),
        cr_bound: 1.0 / (n * fisher),
        qcr_bound: 1.0 / (n * qfi),
        replications,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::projective_from_axis;
    use crate::model::{BlochVector, PureFamily, WeightFamily};
    use std::f64::consts::{FRAC_PI_2, PI};

    fn x_axis() -> Povm {
        projective_from_axis(&BlochVector::new(1.0, 0.0, 0.0)).unwrap()
    }

    fn z_axis() -> Povm {
        projective_from_axis(&BlochVector::new(0.0, 0.0, 1.0)).unwrap()
    }

    fn mixed() -> QubitModel {
        QubitModel::mixed(PureFamily::xz_circle(), WeightFamily::Const { value: 0.75 })
    }

    #[test]
    fn sample_degenerate() {
        let exp = Experiment::new(QubitModel::pure(PureFamily::xz_circle()), 0.0, z_axis(), 100, 7).unwrap();
        assert_eq!(sample(&exp).unwrap(), vec![100, 0]);
    }

    #[test]
    fn sample_fair_coin_concentrates() {
        let half = QubitModel::pure(PureFamily::xz_circle());
        for seed in 0..5 {
            let exp = Experiment::new(half, FRAC_PI_2, z_axis(), 100_000, seed).unwrap();
            let c = sample(&exp).unwrap();
            assert_eq!(c[0] + c[1], 100_000);
            assert!((c[0] as f64 - 50_000.0).abs() <= 3.0 * 158.2);
        }
    }

    #[test]
    fn sample_deterministic() {
        let exp = Experiment::new(mixed(), 0.3, random_povm_for_test(), 5000, 11).unwrap();
        assert_eq!(sample(&exp).unwrap(), sample(&exp).unwrap());
    }

    fn random_povm_for_test() -> Povm {
        crate::measure::random_povm(4, 3).unwrap()
    }

    #[test]
    fn mle_plug_in_consistency() {
        let m = mixed();
        let povm = x_axis();
        let ps = probs(&m.rho(0.3).unwrap(), &povm).unwrap();
        let counts: Vec<f64> = ps.iter().map(|p| p * 10_000.0).collect();
        let t = mle(&m, &povm, &counts, (0.0, FRAC_PI_2)).unwrap();
        assert!((t - 0.3).abs() <= 1e-6, "{t}");
    }

    #[test]
    fn mle_flat_likelihood() {
        let y = projective_from_axis(&BlochVector::new(0.0, 1.0, 0.0)).unwrap();
        let r = mle(&QubitModel::pure(PureFamily::xz_circle()), &y, &[40.0, 60.0], (0.1, 1.0));
        assert!(matches!(r, Err(Error::FlatLikelihood(_))));
    }

    #[test]
    fn mle_boundary_maximizer() {
        // p+ = cos²(θ/2) decreases on the interval, so all-plus counts peak at the left end
        let t = mle(&QubitModel::pure(PureFamily::xz_circle()), &z_axis(), &[50.0, 0.0], (0.1, PI - 0.1)).unwrap();
        assert_eq!(t, 0.1);
    }

    #[test]
    fn mle_rejects_bad_counts() {
        let m = mixed();
        assert!(mle(&m, &x_axis(), &[1.0], (0.0, 1.0)).is_err());
        assert!(mle(&m, &x_axis(), &[0.0, 0.0], (0.0, 1.0)).is_err());
        assert!(mle(&m, &x_axis(), &[1.0, 2.0], (1.0, 0.0)).is_err());
    }

    #[test]
    fn replicated_is_deterministic_and_ordered() {
        let exp = Experiment::new(mixed(), 0.3, x_axis(), 2000, 5).unwrap();
        let a = run_replicated(&exp, 100, None).unwrap();
        let b = run_replicated(&exp, 100, None).unwrap();
        assert_eq!(a, b);
        assert!(a.qcr_bound <= a.cr_bound + 1e-12);
        assert!(matches!(run_replicated(&exp, 50, None), Err(Error::InvalidExperiment(_))));
    }
}
