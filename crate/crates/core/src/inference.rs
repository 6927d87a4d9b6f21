//! Posterior summaries computed from recorded sweeps: point estimates,
//! ranked probability intervals, inclusion probabilities, model-averaged
//! correlation matrices, and simulation-based dependence measures with
//! batch-means standard errors.

use crate::corr_param::pair_order;
use crate::dvine_copula::DVineModel;
use crate::error::{CopulaError, Result};
use crate::gaussian_copula::GaussianCopulaModel;
use crate::linalg::Matrix;
use rand::Rng;

/// Sample Kendall rank correlation, computed in O(n log n) by sorting on
/// the first coordinate and counting merge inversions on the second.
/// Assumes continuous data; ties are not corrected for.
pub fn kendall_tau_hat(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len();
    assert_eq!(n, y.len(), "kendall_tau_hat: mismatched lengths");
    assert!(n >= 2, "kendall_tau_hat: need at least two observations");
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&a, &b| {
        x[a].partial_cmp(&x[b])
            .expect("kendall_tau_hat: non-finite value")
            .then(y[a].partial_cmp(&y[b]).expect("kendall_tau_hat: non-finite value"))
    });
    let mut ys: Vec<f64> = idx.iter().map(|&i| y[i]).collect();
    let mut buf = vec![0.0; n];
    let inversions = count_inversions(&mut ys, &mut buf);
    let total = (n as f64) * (n as f64 - 1.0) / 2.0;
    (total - 2.0 * inversions as f64) / total
}

/// Merge-sort inversion count: pairs (a, b) with a < b and v[a] > v[b].
fn count_inversions(v: &mut [f64], buf: &mut [f64]) -> u64 {
    let n = v.len();
    if n < 2 {
        return 0;
    }
    let mid = n / 2;
    let (left, right) = v.split_at_mut(mid);
    let mut count =
        count_inversions(left, &mut buf[..mid]) + count_inversions(right, &mut buf[mid..]);
    let (mut i, mut j, mut k) = (0, 0, 0);
    while i < left.len() && j < right.len() {
        if right[j] < left[i] {
            count += (left.len() - i) as u64;
            buf[k] = right[j];
            j += 1;
        } else {
            buf[k] = left[i];
            i += 1;
        }
        k += 1;
    }
    buf[k..k + left.len() - i].copy_from_slice(&left[i..]);
    buf[k + left.len() - i..n].copy_from_slice(&right[j..]);
    v.copy_from_slice(&buf[..n]);
    count
}

/// Mean of a scalar chain.
pub fn posterior_mean(draws: &[f64]) -> Result<f64> {
    if draws.is_empty() {
        return Err(CopulaError::Insufficient("no retained sweeps to average".into()));
    }
    Ok(draws.iter().sum::<f64>() / draws.len() as f64)
}

/// Equal-tail probability interval by ranking: sorts the retained draws
/// and drops floor(alpha * J / 2) from each end. The counting rule leaves
/// the rounding direction open; floor keeps at least the nominal coverage.
pub fn probability_interval(draws: &[f64], alpha: f64) -> Result<(f64, f64)> {
    if !(0.0..1.0).contains(&alpha) {
        return Err(CopulaError::Config(format!("interval level {alpha} outside [0, 1)")));
    }
    let j = draws.len();
    if j == 0 || (alpha > 0.0 && (j as f64) < 2.0 / alpha) {
        return Err(CopulaError::Insufficient(format!(
            "interval at level {alpha} needs at least {} retained sweeps, got {j}",
            if alpha > 0.0 { (2.0 / alpha).ceil() as usize } else { 1 }
        )));
    }
    let drop = (alpha * j as f64 / 2.0).floor() as usize;
    let mut sorted = draws.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("interval: non-finite draw"));
    Ok((sorted[drop], sorted[j - 1 - drop]))
}

/// Fraction of sweeps with each indicator on. `draws[j]` is the indicator
/// vector of sweep j in pair order.
pub fn inclusion_probabilities(draws: &[Vec<bool>], n_pairs: usize) -> Result<Vec<f64>> {
    if draws.is_empty() {
        return Err(CopulaError::Insufficient("no retained sweeps for inclusion".into()));
    }
    let mut counts = vec![0usize; n_pairs];
    for sweep in draws {
        for (c, &g) in counts.iter_mut().zip(sweep.iter()) {
            if g {
                *c += 1;
            }
        }
    }
    Ok(counts.iter().map(|&c| c as f64 / draws.len() as f64).collect())
}

/// Element-wise mean of per-sweep correlation matrices; with selection on
/// this is the model average. Means of correlation matrices keep symmetry
/// and the unit diagonal exactly.
pub fn averaged_correlation(mats: &[Matrix]) -> Result<Matrix> {
    let first = mats
        .first()
        .ok_or_else(|| CopulaError::Insufficient("no correlation draws to average".into()))?;
    let m = first.dim();
    let mut out = Matrix::zeros(m);
    for mat in mats {
        for i in 0..m {
            for j in 0..m {
                out.set(i, j, out.get(i, j) + mat.get(i, j));
            }
        }
    }
    let n = mats.len() as f64;
    for i in 0..m {
        for j in 0..m {
            out.set(i, j, out.get(i, j) / n);
        }
    }
    Ok(out)
}

/// Batch-means standard error of a chain mean, with 20 batches. Iterates
/// are autocorrelated, so a naive iid standard error would understate.
pub fn batch_means_se(draws: &[f64]) -> Result<f64> {
    const BATCHES: usize = 20;
    let j = draws.len();
    if j < 2 * BATCHES {
        return Err(CopulaError::Insufficient(format!(
            "batch-means needs at least {} sweeps, got {j}",
            2 * BATCHES
        )));
    }
    let size = j / BATCHES;
    let used = size * BATCHES;
    let grand = draws[..used].iter().sum::<f64>() / used as f64;
    let mut ss = 0.0;
    for b in 0..BATCHES {
        let mean = draws[b * size..(b + 1) * size].iter().sum::<f64>() / size as f64;
        ss += (mean - grand).powi(2);
    }
    let var_of_mean = ss / (BATCHES as f64 - 1.0) / BATCHES as f64;
    Ok(var_of_mean.sqrt())
}

/// Dependence summary for one pair, estimated by simulation across sweeps.
pub struct PairDependence {
    pub pair: (usize, usize),
    pub tau: f64,
    pub tau_se: f64,
    pub rho_s: f64,
    pub rho_s_se: f64,
}

/// Accumulates per-sweep Monte Carlo estimates of E[C(U_t, U_s)] and
/// E[U_t U_s] for every pair, then reports tau = 4 E[C] - 1 and
/// rho_S = 12 E[UV] - 3 with batch-means standard errors over sweeps.
pub struct DependenceAccumulator {
    pairs: Vec<(usize, usize)>,
    cb_by_sweep: Vec<Vec<f64>>,
    uv_by_sweep: Vec<Vec<f64>>,
}

impl DependenceAccumulator {
    pub fn new(m: usize) -> Self {
        let pairs = pair_order(m);
        let k = pairs.len();
        DependenceAccumulator {
            pairs,
            cb_by_sweep: vec![Vec::new(); k],
            uv_by_sweep: vec![Vec::new(); k],
        }
    }

    /// One sweep of a Gaussian model: the bivariate margin CDF is exact.
    pub fn add_gaussian_sweep<R: Rng + ?Sized>(
        &mut self,
        model: &GaussianCopulaModel,
        k_draws: usize,
        rng: &mut R,
    ) {
        let mut cb = vec![0.0; self.pairs.len()];
        let mut uv = vec![0.0; self.pairs.len()];
        for _ in 0..k_draws {
            let u = model.sample_u(rng);
            for (p, &(t, s)) in self.pairs.iter().enumerate() {
                cb[p] += model.bivariate_margin_cdf(t, s, u[t], u[s]);
                uv[p] += u[t] * u[s];
            }
        }
        self.push_sweep(&cb, &uv, k_draws);
    }

    /// One sweep of a vine model: the pairwise margin CDF is estimated
    /// from a fresh inner sample of the same sweep's model, so the tau
    /// column is an approximation (unbiased in the estimate of E[C]).
    pub fn add_vine_sweep<R: Rng + ?Sized>(
        &mut self,
        model: &DVineModel,
        k_draws: usize,
        k_inner: usize,
        rng: &mut R,
    ) {
        let inner: Vec<Vec<f64>> = (0..k_inner).map(|_| model.sample_u(rng)).collect();
        let mut cb = vec![0.0; self.pairs.len()];
        let mut uv = vec![0.0; self.pairs.len()];
        for _ in 0..k_draws {
            let u = model.sample_u(rng);
            for (p, &(t, s)) in self.pairs.iter().enumerate() {
                let hits = inner.iter().filter(|row| row[t] <= u[t] && row[s] <= u[s]).count();
                cb[p] += hits as f64 / k_inner as f64;
                uv[p] += u[t] * u[s];
            }
        }
        self.push_sweep(&cb, &uv, k_draws);
    }

    fn push_sweep(&mut self, cb: &[f64], uv: &[f64], k_draws: usize) {
        let scale = 1.0 / k_draws as f64;
        for p in 0..self.pairs.len() {
            self.cb_by_sweep[p].push(cb[p] * scale);
            self.uv_by_sweep[p].push(uv[p] * scale);
        }
    }

    pub fn sweeps(&self) -> usize {
        self.cb_by_sweep.first().map_or(0, Vec::len)
    }

    pub fn finish(&self) -> Result<Vec<PairDependence>> {
        let mut out = Vec::with_capacity(self.pairs.len());
        for (p, &pair) in self.pairs.iter().enumerate() {
            let cb = &self.cb_by_sweep[p];
            let uv = &self.uv_by_sweep[p];
            let mean_cb = posterior_mean(cb)?;
            let mean_uv = posterior_mean(uv)?;
            out.push(PairDependence {
                pair,
                tau: 4.0 * mean_cb - 1.0,
                tau_se: 4.0 * batch_means_se(cb)?,
                rho_s: 12.0 * mean_uv - 3.0,
                rho_s_se: 12.0 * batch_means_se(uv)?,
            });
        }
        Ok(out)
    }
}

/// One row of a tail-dependence curve: the conditional exceedance
/// probabilities at level alpha.
pub struct TailCurvePoint {
    pub alpha: f64,
    pub lambda_up: f64,
    pub lambda_low: f64,
}

/// Empirical tail-dependence curves from pooled copula draws, in one
/// streaming pass: lambda_up(a) = pr(U > a, V > a) / pr(V > a) and
/// lambda_low(a) = pr(U < a, V < a) / pr(V < a). Levels with no marginal
/// exceedances report NaN.
pub fn tail_dependence_curves<I>(draws: I, alphas: &[f64]) -> Vec<TailCurvePoint>
where
    I: IntoIterator<Item = (f64, f64)>,
{
    let k = alphas.len();
    let mut joint_up = vec![0u64; k];
    let mut marg_up = vec![0u64; k];
    let mut joint_low = vec![0u64; k];
    let mut marg_low = vec![0u64; k];
    for (u, v) in draws {
        for (a, &alpha) in alphas.iter().enumerate() {
            if v > alpha {
                marg_up[a] += 1;
                if u > alpha {
                    joint_up[a] += 1;
                }
            }
            if v < alpha {
                marg_low[a] += 1;
                if u < alpha {
                    joint_low[a] += 1;
                }
            }
        }
    }
    let ratio = |num: u64, den: u64| if den == 0 { f64::NAN } else { num as f64 / den as f64 };
    alphas
        .iter()
        .enumerate()
        .map(|(a, &alpha)| TailCurvePoint {
            alpha,
            lambda_up: ratio(joint_up[a], marg_up[a]),
            lambda_low: ratio(joint_low[a], marg_low[a]),
        })
        .collect()
}
