//! Parameterisations of the Gaussian-copula correlation matrix.
//!
//! Two routes produce a valid correlation matrix from unconstrained (or
//! box-constrained) parameters:
//!
//! * `CholeskyParam`: a unit-diagonal upper-triangular factor R defines the
//!   inverse covariance R'R; rescaling the implied covariance to unit
//!   diagonal gives the correlation matrix. Any real off-diagonal values
//!   are admissible.
//! * `PartialCorrSet`: one semi-partial correlation per pair (t, s), each
//!   free in (-1, 1), combined with binary inclusion indicators for
//!   selection. The recursion that rebuilds the matrix runs over
//!   increasing lag t - s, conditioning each pair on the variables
//!   strictly between its endpoints.
//!
//! The indicator prior treats the number of included pairs as uniform:
//! pi(gamma) = 1/((N+1) C(N, w)) for w included out of N, equivalently
//! Beta(N - w + 1, w + 1).

use crate::error::{CopulaError, Result};
use crate::linalg::Matrix;
use statrs::function::gamma::ln_gamma;

/// Canonical ordering of the strictly-lower-triangular pairs (t, s), t > s:
/// row-major, i.e. (1,0), (2,0), (2,1), (3,0), ... All parameter vectors,
/// update sweeps and chain records use this order.
pub fn pair_order(m: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::with_capacity(m * (m - 1) / 2);
    for t in 1..m {
        for s in 0..t {
            out.push((t, s));
        }
    }
    out
}

/// Index of pair (t, s) within `pair_order(m)`.
pub fn pair_index(t: usize, s: usize) -> usize {
    debug_assert!(t > s);
    t * (t - 1) / 2 + s
}

/// A validated correlation matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct CorrelationMatrix {
    m: usize,
    mat: Matrix,
}

impl CorrelationMatrix {
    /// Validates symmetry, unit diagonal and strict positive definiteness
    /// (smallest eigenvalue above 1e-10). Use for externally supplied
    /// matrices; the parameterisations construct theirs directly.
    pub fn new(mat: Matrix) -> Result<Self> {
        let m = mat.dim();
        for i in 0..m {
            if (mat.get(i, i) - 1.0).abs() > 1e-12 {
                return Err(CopulaError::domain(
                    "gamma",
                    format!("diagonal entry {i} is {}", mat.get(i, i)),
                ));
            }
            for j in 0..i {
                if (mat.get(i, j) - mat.get(j, i)).abs() > 1e-12 {
                    return Err(CopulaError::domain(
                        "gamma",
                        format!("asymmetric at ({i},{j})"),
                    ));
                }
            }
        }
        let min_eig = mat.min_eigenvalue();
        if min_eig <= 1e-10 {
            return Err(CopulaError::domain(
                "gamma",
                format!("smallest eigenvalue {min_eig} is not positive"),
            ));
        }
        Ok(CorrelationMatrix { m, mat })
    }

    // Construction from code paths that guarantee the invariants; skips the
    // eigenvalue sweep. Near-singular results are caught later by the
    // Cholesky factorization in the likelihood and turn into rejections.
    pub(crate) fn from_parts(mat: Matrix) -> Self {
        let m = mat.dim();
        CorrelationMatrix { m, mat }
    }

    pub fn identity(m: usize) -> Self {
        CorrelationMatrix { m, mat: Matrix::identity(m) }
    }

    pub fn dim(&self) -> usize {
        self.m
    }

    pub fn get(&self, t: usize, s: usize) -> f64 {
        self.mat.get(t, s)
    }

    pub fn matrix(&self) -> &Matrix {
        &self.mat
    }

    /// Off-diagonal entries in `pair_order`.
    pub fn lower_tri(&self) -> Vec<f64> {
        pair_order(self.m)
            .into_iter()
            .map(|(t, s)| self.mat.get(t, s))
            .collect()
    }
}

/// Unit-diagonal upper-triangular factor of the inverse covariance.
/// Off-diagonals are stored column-packed: {r[k, j]: j = 1..m-1, k < j}.
#[derive(Clone, Debug, PartialEq)]
pub struct CholeskyParam {
    m: usize,
    r: Vec<f64>,
}

impl CholeskyParam {
    pub fn identity(m: usize) -> Self {
        CholeskyParam { m, r: vec![0.0; m * (m - 1) / 2] }
    }

    pub fn dim(&self) -> usize {
        self.m
    }

    pub fn n_params(&self) -> usize {
        self.r.len()
    }

    fn idx(&self, k: usize, j: usize) -> usize {
        debug_assert!(k < j && j < self.m);
        j * (j - 1) / 2 + k
    }

    pub fn get(&self, k: usize, j: usize) -> f64 {
        self.r[self.idx(k, j)]
    }

    pub fn set(&mut self, k: usize, j: usize, v: f64) {
        let i = self.idx(k, j);
        self.r[i] = v;
    }

    pub fn values(&self) -> &[f64] {
        &self.r
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.r
    }

    /// The correlation matrix implied by R: invert R'R, then rescale to
    /// unit diagonal. Always succeeds; R'R is positive definite for any
    /// real off-diagonals because R has a unit diagonal.
    pub fn to_gamma(&self) -> CorrelationMatrix {
        let m = self.m;
        let mut r = Matrix::identity(m);
        for j in 1..m {
            for k in 0..j {
                r.set(k, j, self.get(k, j));
            }
        }
        let rt = r.transpose();
        let sigma_inv = rt.matmul(&r);
        let chol = sigma_inv
            .cholesky()
            .expect("R'R with unit-diagonal R is positive definite");
        let sigma = chol.inverse();
        let mut gamma = Matrix::identity(m);
        for t in 0..m {
            for s in 0..t {
                let v = sigma.get(t, s) / (sigma.get(t, t) * sigma.get(s, s)).sqrt();
                gamma.set(t, s, v);
                gamma.set(s, t, v);
            }
        }
        CorrelationMatrix::from_parts(gamma)
    }

    /// Recovers the unique unit-diagonal factor reproducing `gamma`:
    /// columns of the transposed Cholesky factor of gamma^{-1}, normalized
    /// by their diagonal entries.
    pub fn from_gamma(gamma: &CorrelationMatrix) -> Result<Self> {
        let m = gamma.dim();
        let chol_gamma = gamma.matrix().cholesky()?;
        let gamma_inv = chol_gamma.inverse();
        let l = gamma_inv.cholesky()?;
        let mut out = CholeskyParam::identity(m);
        for j in 1..m {
            let d = l.get(j, j);
            for k in 0..j {
                // U = L' has U[k, j] = L[j, k]; column-normalize by U[j, j].
                out.set(k, j, l.get(j, k) / d);
            }
        }
        Ok(out)
    }
}

/// Semi-partial correlations with selection indicators. The latent value
/// lambda_tilde persists while its indicator is off; the effective
/// correlation is lambda = gamma * lambda_tilde.
#[derive(Clone, Debug, PartialEq)]
pub struct PartialCorrSet {
    m: usize,
    latent: Vec<f64>,
    gamma: Vec<bool>,
}

impl PartialCorrSet {
    /// All latents zero, all indicators on: the identity matrix.
    pub fn independent(m: usize) -> Self {
        let n = m * (m - 1) / 2;
        PartialCorrSet { m, latent: vec![0.0; n], gamma: vec![true; n] }
    }

    pub fn dim(&self) -> usize {
        self.m
    }

    pub fn n_pairs(&self) -> usize {
        self.latent.len()
    }

    pub fn latent(&self, idx: usize) -> f64 {
        self.latent[idx]
    }

    pub fn set_latent(&mut self, idx: usize, v: f64) {
        debug_assert!(v > -1.0 && v < 1.0);
        self.latent[idx] = v;
    }

    pub fn indicator(&self, idx: usize) -> bool {
        self.gamma[idx]
    }

    pub fn set_indicator(&mut self, idx: usize, on: bool) {
        self.gamma[idx] = on;
    }

    /// Effective semi-partial correlation of the pair.
    pub fn lambda(&self, idx: usize) -> f64 {
        if self.gamma[idx] {
            self.latent[idx]
        } else {
            0.0
        }
    }

    pub fn latents(&self) -> &[f64] {
        &self.latent
    }

    pub fn indicators(&self) -> &[bool] {
        &self.gamma
    }

    /// Number of included pairs.
    pub fn included(&self) -> usize {
        self.gamma.iter().filter(|g| **g).count()
    }

    /// Rebuilds the correlation matrix from the effective lambdas by the
    /// increasing-lag recursion. Positive definite for any latents in the
    /// open cube; tiny eigenvalues can still defeat the later Cholesky,
    /// which the samplers treat as a rejection.
    pub fn to_gamma(&self) -> Result<CorrelationMatrix> {
        let m = self.m;
        let mut g = Matrix::identity(m);
        for lag in 1..m {
            for s in 0..m - lag {
                let t = s + lag;
                let lam = self.lambda(pair_index(t, s));
                let v = if lag == 1 {
                    lam
                } else {
                    let (q_s, q_t, cross) = conditional_parts(&g, t, s)?;
                    cross + lam * ((1.0 - q_t) * (1.0 - q_s)).sqrt()
                };
                g.set(t, s, v);
                g.set(s, t, v);
            }
        }
        Ok(CorrelationMatrix::from_parts(g))
    }

    /// Inverse map: reads the semi-partial correlations off a full
    /// correlation matrix, with all indicators on.
    pub fn from_gamma(gamma: &CorrelationMatrix) -> Result<Self> {
        let m = gamma.dim();
        let g = gamma.matrix();
        let mut out = PartialCorrSet::independent(m);
        for lag in 1..m {
            for s in 0..m - lag {
                let t = s + lag;
                let lam = if lag == 1 {
                    g.get(t, s)
                } else {
                    let (q_s, q_t, cross) = conditional_parts(g, t, s)?;
                    (g.get(t, s) - cross) / ((1.0 - q_t) * (1.0 - q_s)).sqrt()
                };
                out.latent[pair_index(t, s)] = lam.clamp(-1.0 + 1e-12, 1.0 - 1e-12);
            }
        }
        Ok(out)
    }
}

// For the pair (t, s) with conditioning block c = s+1..t-1, returns
// (q_s, q_t, cross) with q_x = G_{x,c} G_cc^{-1} G_{c,x} and
// cross = G_{t,c} G_cc^{-1} G_{c,s}. Only entries with lag below t - s are
// read, so the forward recursion can call this while the matrix is still
// being filled.
fn conditional_parts(g: &Matrix, t: usize, s: usize) -> Result<(f64, f64, f64)> {
    let c: Vec<usize> = (s + 1..t).collect();
    let k = c.len();
    let mut gcc = Matrix::zeros(k);
    for (a, &i) in c.iter().enumerate() {
        for (b, &j) in c.iter().enumerate() {
            gcc.set(a, b, g.get(i, j));
        }
    }
    let chol = gcc.cholesky().map_err(|_| {
        CopulaError::numerical(
            "partial-correlation recursion",
            format!("conditioning block of pair ({t},{s}) is singular"),
        )
    })?;
    let v_s: Vec<f64> = c.iter().map(|&i| g.get(i, s)).collect();
    let v_t: Vec<f64> = c.iter().map(|&i| g.get(i, t)).collect();
    let beta_s = chol.solve(&v_s);
    let beta_t = chol.solve(&v_t);
    let q_s: f64 = beta_s.iter().zip(&v_s).map(|(a, b)| a * b).sum();
    let q_t: f64 = beta_t.iter().zip(&v_t).map(|(a, b)| a * b).sum();
    let cross: f64 = beta_t.iter().zip(&v_s).map(|(a, b)| a * b).sum();
    Ok((q_s, q_t, cross))
}

/// log pi(gamma) for w included pairs out of n: uniform over the count w,
/// then uniform over configurations with that count.
pub fn indicator_log_prior(n_pairs: usize, w: usize) -> f64 {
    let n = n_pairs as f64;
    let w = w as f64;
    // ln Beta(n - w + 1, w + 1).
    ln_gamma(n - w + 1.0) + ln_gamma(w + 1.0) - ln_gamma(n + 2.0)
}

/// Conditional prior (delta0, delta1) for one indicator given that
/// `w_others` of the other pairs are included.
pub fn conditional_inclusion_prior(n_pairs: usize, w_others: usize) -> (f64, f64) {
    let l0 = indicator_log_prior(n_pairs, w_others);
    let l1 = indicator_log_prior(n_pairs, w_others + 1);
    let m = l0.max(l1);
    let e0 = (l0 - m).exp();
    let e1 = (l1 - m).exp();
    (e0 / (e0 + e1), e1 / (e0 + e1))
}
