//! Two-component 1-D Gaussian mixture fitting by EM, component assignment,
//! and Welch's unequal-variance t-test.
//!
//! Initialization splits the data at the median and seeds each component from
//! its half, which is deterministic and works well on the bimodal weight
//! distributions the flow produces. Components are reported in ascending
//! order of mean. A variance floor keeps near-delta clusters from going
//! singular; fits on data with essentially no spread come back flagged
//! `degenerate` so callers can stop pruning instead of inventing structure.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

use statrs::function::beta::beta_reg;

use crate::error::{Error, Result};

/// Result of a two-component 1-D EM fit. Component 0 is the lower-mean
/// ("low") component.
#[derive(Debug, Clone)]
pub struct GmmFit {
    pub mixture_weights: (f64, f64),
    pub means: (f64, f64),
    pub variances: (f64, f64),
    /// Posterior probability pair per datum, same order as the input.
    pub responsibilities: Vec<(f64, f64)>,
    pub log_likelihood_trace: Vec<f64>,
    pub converged: bool,
    pub degenerate: bool,
}

/// Which mixture component a datum belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Component {
    Low,
    High,
}

/// Welch's t-test summary.
#[derive(Debug, Clone, Copy)]
pub struct SeparationTest {
    pub t_statistic: f64,
    pub p_value: f64,
    /// Welch-Satterthwaite degrees of freedom.
    pub dof: f64,
}

fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

/// Unbiased sample variance (ddof = 1).
fn sample_variance(values: &[f64], m: f64) -> f64 {
    values.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (values.len() - 1) as f64
}

/// Population variance (ddof = 0), used inside the M-step.
fn population_variance(values: &[f64], m: f64) -> f64 {
    values.iter().map(|x| (x - m).powi(2)).sum::<f64>() / values.len() as f64
}

/// Per-datum E-step: log responsibilities via log-sum-exp.
/// Returns (r_low, r_high, log p(x)).
fn e_step_one(x: f64, pis: (f64, f64), mus: (f64, f64), vars: (f64, f64)) -> (f64, f64, f64) {
    let log_comp = |pi: f64, mu: f64, var: f64| {
        pi.ln() - 0.5 * (2.0 * std::f64::consts::PI * var).ln() - (x - mu).powi(2) / (2.0 * var)
    };
    let a = log_comp(pis.0, mus.0, vars.0);
    let b = log_comp(pis.1, mus.1, vars.1);
    let m = a.max(b);
    let log_px = m + ((a - m).exp() + (b - m).exp()).ln();
    ((a - log_px).exp(), (b - log_px).exp(), log_px)
}

fn e_step(values: &[f64], pis: (f64, f64), mus: (f64, f64), vars: (f64, f64)) -> Vec<(f64, f64, f64)> {
    #[cfg(feature = "parallel")]
    {
        values.par_iter().map(|&x| e_step_one(x, pis, mus, vars)).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        values.iter().map(|&x| e_step_one(x, pis, mus, vars)).collect()
    }
}

/// Fits a two-component mixture to `values` by EM.
///
/// Convergence: relative log-likelihood change below `tol`, or `max_iter`
/// reached. The `seed` parameter is reserved for an optional random-restart
/// mode; the default median-split initialization ignores it.
pub fn fit_gmm_1d(values: &[f64], tol: f64, max_iter: usize, _seed: u64) -> Result<GmmFit> {
    if values.len() < 4 {
        return Err(Error::InvalidArgument(format!(
            "GMM fit needs at least 4 values, got {}",
            values.len()
        )));
    }
    if tol.is_nan() || tol <= 0.0 || max_iter == 0 {
        return Err(Error::InvalidArgument("tol must be positive and max_iter >= 1".into()));
    }
    let n = values.len();
    let sample_mean = mean(values);
    let sample_var = population_variance(values, sample_mean);
    let sample_std = sample_var.sqrt();
    let var_floor = 1e-10 * (sample_var + 1e-12);

    // No spread at all: report a flagged degenerate fit instead of running EM.
    if sample_std < 1e-9 * sample_mean.abs().max(1.0) {
        return Ok(GmmFit {
            mixture_weights: (0.5, 0.5),
            means: (sample_mean, sample_mean),
            variances: (var_floor, var_floor),
            responsibilities: vec![(0.5, 0.5); n],
            log_likelihood_trace: Vec::new(),
            converged: true,
            degenerate: true,
        });
    }

    // Median-split initialization.
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let (lower, upper) = sorted.split_at(n / 2);
    let init = |half: &[f64]| {
        let m = mean(half);
        (m, population_variance(half, m).max(var_floor))
    };
    let (mut mu_lo, mut var_lo) = init(lower);
    let (mut mu_hi, mut var_hi) = init(upper);
    let mut pis = (0.5, 0.5);

    let mut trace: Vec<f64> = Vec::new();
    let mut converged = false;
    let mut resp: Vec<(f64, f64)> = Vec::new();
    for _ in 0..max_iter {
        let estep = e_step(values, pis, (mu_lo, mu_hi), (var_lo, var_hi));
        let ll: f64 = estep.iter().map(|t| t.2).sum();
        resp = estep.iter().map(|t| (t.0, t.1)).collect();

        if let Some(&prev) = trace.last() {
            if (ll - prev).abs() <= tol * f64::max(prev.abs(), 1.0) {
                trace.push(ll);
                converged = true;
                break;
            }
        }
        trace.push(ll);

        // M-step.
        let n0: f64 = resp.iter().map(|r| r.0).sum();
        let n1: f64 = resp.iter().map(|r| r.1).sum();
        pis = (n0 / n as f64, n1 / n as f64);
        mu_lo = values.iter().zip(&resp).map(|(x, r)| r.0 * x).sum::<f64>() / n0;
        mu_hi = values.iter().zip(&resp).map(|(x, r)| r.1 * x).sum::<f64>() / n1;
        var_lo = (values.iter().zip(&resp).map(|(x, r)| r.0 * (x - mu_lo).powi(2)).sum::<f64>() / n0).max(var_floor);
        var_hi = (values.iter().zip(&resp).map(|(x, r)| r.1 * (x - mu_hi).powi(2)).sum::<f64>() / n1).max(var_floor);
    }

    // Report components in ascending order of mean.
    if mu_lo > mu_hi {
        std::mem::swap(&mut mu_lo, &mut mu_hi);
        std::mem::swap(&mut var_lo, &mut var_hi);
        pis = (pis.1, pis.0);
        for r in &mut resp {
            *r = (r.1, r.0);
        }
    }

    let degenerate = (mu_hi - mu_lo).abs() < 1e-6 * sample_std;
    Ok(GmmFit {
        mixture_weights: pis,
        means: (mu_lo, mu_hi),
        variances: (var_lo, var_hi),
        responsibilities: resp,
        log_likelihood_trace: trace,
        converged,
        degenerate,
    })
}

/// Labels each value by the component with the larger responsibility under
/// `fit`'s parameters; ties break toward `Low`. Refuses degenerate fits.
pub fn assign_components(fit: &GmmFit, values: &[f64]) -> Result<Vec<Component>> {
    if fit.degenerate {
        return Err(Error::InvalidState(
            "cannot assign components from a degenerate fit".into(),
        ));
    }
    Ok(values
        .iter()
        .map(|&x| {
            let (r_lo, r_hi, _) = e_step_one(x, fit.mixture_weights, fit.means, fit.variances);
            if r_hi > r_lo {
                Component::High
            } else {
                Component::Low
            }
        })
        .collect())
}

/// Welch's unequal-variance two-sample t-test with a two-sided p-value.
pub fn welch_t_test(a: &[f64], b: &[f64]) -> Result<SeparationTest> {
    if a.len() < 2 || b.len() < 2 {
        return Err(Error::InvalidArgument("each sample needs at least 2 values".into()));
    }
    let (ma, mb) = (mean(a), mean(b));
    let (va, vb) = (sample_variance(a, ma), sample_variance(b, mb));
    if va <= 0.0 || vb <= 0.0 {
        return Err(Error::InvalidArgument("samples must have positive variance".into()));
    }
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let sa = va / na;
    let sb = vb / nb;
    let t = (ma - mb) / (sa + sb).sqrt();
    let dof = (sa + sb).powi(2) / (sa * sa / (na - 1.0) + sb * sb / (nb - 1.0));
    // Two-sided p-value via the regularized incomplete beta function:
    // P(|T| > t) = I_{dof/(dof+t^2)}(dof/2, 1/2).
    let p = if t == 0.0 { 1.0 } else { beta_reg(dof / 2.0, 0.5, dof / (dof + t * t)) };
    Ok(SeparationTest { t_statistic: t, p_value: p.clamp(0.0, 1.0), dof })
}
