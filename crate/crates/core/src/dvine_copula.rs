//! D-vine pair-copula construction: density, the conditioned-probability
//! recursion that feeds it, and simulation.
//!
//! Variables are laid out in their data-column order; pair (t, s) with
//! s < t couples columns t and s given everything strictly between them.
//! A single pair family is shared by all pairs; per-pair inclusion
//! indicators switch individual pairs to the independence copula while the
//! underlying parameter value stays stored, so selection moves can turn a
//! pair back on without losing its state.

use crate::corr_param::{pair_index, pair_order};
use crate::error::{CopulaError, Result};
use crate::pair_copulas::{PairCopula, PairFamily};
use crate::special::{clamp_unit, normal_cdf, normal_quantile};
use rand::Rng;

/// Triangular array of conditioned probabilities u_{i|j}. For j < i the
/// entry conditions column i on the block j..i-1; for j > i on the block
/// i+1..j; the diagonal holds the inputs themselves.
pub struct VineArguments {
    m: usize,
    grid: Vec<f64>,
}

impl VineArguments {
    fn base(u: &[f64]) -> Self {
        let m = u.len();
        let mut grid = vec![0.0; m * m];
        for (i, &ui) in u.iter().enumerate() {
            grid[i * m + i] = clamp_unit(ui);
        }
        VineArguments { m, grid }
    }

    pub fn dim(&self) -> usize {
        self.m
    }

    /// u_{i|j}, zero-based.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.grid[i * self.m + j]
    }

    fn set(&mut self, i: usize, j: usize, v: f64) {
        self.grid[i * self.m + j] = v;
    }
}

/// D-vine copula with a common pair family, per-pair parameter values, and
/// per-pair inclusion indicators. Pairs are stored in row-major
/// lower-triangle order, matching `corr_param::pair_order`.
pub struct DVineModel {
    m: usize,
    family: PairFamily,
    latent: Vec<f64>,
    gamma: Vec<bool>,
    pairs: Vec<PairCopula>,
}

impl DVineModel {
    /// `phi[k]` is the parameter the k-th pair takes when its indicator is
    /// on; the value persists (and must stay in the family domain) while
    /// the indicator is off.
    pub fn new(m: usize, family: PairFamily, phi: &[f64], gamma: &[bool]) -> Result<Self> {
        if family == PairFamily::Independence {
            return Err(CopulaError::domain(
                "family",
                "d-vine pairs need a dependence family; use indicators for independence",
            ));
        }
        let n_pairs = m * (m - 1) / 2;
        if phi.len() != n_pairs || gamma.len() != n_pairs {
            return Err(CopulaError::Config(format!(
                "d-vine with {m} columns needs {n_pairs} pair parameters, got {} phi / {} gamma",
                phi.len(),
                gamma.len()
            )));
        }
        for (k, &p) in phi.iter().enumerate() {
            family.validate_phi(p).map_err(|e| {
                let (t, s) = pair_order(m)[k];
                CopulaError::domain("phi", format!("pair ({t},{s}): {e}"))
            })?;
        }
        let pairs = phi
            .iter()
            .zip(gamma)
            .map(|(&p, &g)| {
                if g {
                    PairCopula::new(family, p).expect("validated above")
                } else {
                    PairCopula::independence()
                }
            })
            .collect();
        Ok(DVineModel { m, family, latent: phi.to_vec(), gamma: gamma.to_vec(), pairs })
    }

    pub fn dim(&self) -> usize {
        self.m
    }

    pub fn family(&self) -> PairFamily {
        self.family
    }

    pub fn n_pairs(&self) -> usize {
        self.pairs.len()
    }

    /// Stored parameter value for pair k, meaningful whether or not the
    /// pair is currently included.
    pub fn latent(&self, k: usize) -> f64 {
        self.latent[k]
    }

    pub fn indicator(&self, k: usize) -> bool {
        self.gamma[k]
    }

    pub fn indicators(&self) -> &[bool] {
        &self.gamma
    }

    /// Effective copula for pair k: independence when excluded.
    pub fn pair(&self, k: usize) -> &PairCopula {
        &self.pairs[k]
    }

    pub fn set_latent(&mut self, k: usize, phi: f64) -> Result<()> {
        self.family.validate_phi(phi)?;
        self.latent[k] = phi;
        self.rebuild(k);
        Ok(())
    }

    pub fn set_indicator(&mut self, k: usize, on: bool) {
        self.gamma[k] = on;
        self.rebuild(k);
    }

    fn rebuild(&mut self, k: usize) {
        self.pairs[k] = if self.gamma[k] {
            PairCopula::new(self.family, self.latent[k]).expect("latent stays validated")
        } else {
            PairCopula::independence()
        };
    }

    /// One pass of the conditioned-probability recursion, lag by lag. At
    /// lag k the entry u_{i|i-k} comes from u_{i|i-k+1} pushed through the
    /// h-function of pair (i, i-k) given u_{i-k|i-1}, and symmetrically
    /// for the other direction. Excluded pairs copy their inputs instead
    /// of calling h, which is exact because the independence h-function is
    /// the identity in its first argument.
    fn sweep<F: FnMut(usize, f64, f64)>(&self, u: &[f64], mut on_pair: F) -> VineArguments {
        assert_eq!(u.len(), self.m, "input length must match model dimension");
        let mut a = VineArguments::base(u);
        for k in 1..self.m {
            for i in k..self.m {
                let s = i - k;
                let idx = pair_index(i, s);
                let down = a.get(i, s + 1);
                let up = a.get(s, i - 1);
                on_pair(idx, down, up);
                if self.pairs[idx].family() == PairFamily::Independence {
                    a.set(i, s, down);
                    a.set(s, i, up);
                } else {
                    let c = &self.pairs[idx];
                    a.set(i, s, c.h_func(down, up));
                    a.set(s, i, c.h_func(up, down));
                }
            }
        }
        a
    }

    /// Same recursion on the normal-score scale, used when the shared
    /// family is Gaussian: the Gaussian h-function is an exact affine map
    /// of scores, so chaining scores avoids the tail saturation that
    /// repeated probability-to-score round trips suffer when conditional
    /// scores run past the range where the normal CDF is resolvable.
    fn sweep_scores<F: FnMut(usize, f64, f64, f64)>(&self, u: &[f64], mut on_pair: F) -> Vec<f64> {
        assert_eq!(u.len(), self.m, "input length must match model dimension");
        let m = self.m;
        let mut z = vec![0.0; m * m];
        for (i, &ui) in u.iter().enumerate() {
            z[i * m + i] = normal_quantile(clamp_unit(ui));
        }
        for k in 1..m {
            for i in k..m {
                let s = i - k;
                let idx = pair_index(i, s);
                let down = z[i * m + s + 1];
                let up = z[s * m + i - 1];
                let phi = if self.gamma[idx] { self.latent[idx] } else { 0.0 };
                on_pair(idx, down, up, phi);
                if self.gamma[idx] {
                    let root = (1.0 - phi * phi).sqrt();
                    z[i * m + s] = (down - phi * up) / root;
                    z[s * m + i] = (up - phi * down) / root;
                } else {
                    z[i * m + s] = down;
                    z[s * m + i] = up;
                }
            }
        }
        z
    }

    /// Fills the full conditioned-probability array in O(m^2) h-calls.
    /// Inputs are clamped into the open unit interval.
    pub fn evaluate_arguments(&self, u: &[f64]) -> VineArguments {
        if self.family == PairFamily::Gaussian {
            let z = self.sweep_scores(u, |_, _, _, _| {});
            let grid = z.into_iter().map(normal_cdf).collect();
            return VineArguments { m: self.m, grid };
        }
        self.sweep(u, |_, _, _| {})
    }

    /// Log density: the sum over included pairs of the pair log density at
    /// its conditioned arguments. Excluded pairs contribute exactly zero.
    pub fn log_density(&self, u: &[f64]) -> f64 {
        let mut total = 0.0;
        if self.family == PairFamily::Gaussian {
            self.sweep_scores(u, |idx, x1, x2, phi| {
                if self.gamma[idx] {
                    let omp = 1.0 - phi * phi;
                    total += -0.5 * omp.ln()
                        - (phi * phi * (x1 * x1 + x2 * x2) - 2.0 * phi * x1 * x2) / (2.0 * omp);
                }
            });
        } else {
            self.sweep(u, |idx, down, up| {
                let c = &self.pairs[idx];
                if c.family() != PairFamily::Independence {
                    total += c.log_density(down, up);
                }
            });
        }
        total
    }

    /// Sum of `log_density` over rows.
    pub fn log_density_total(&self, rows: &[Vec<f64>]) -> f64 {
        rows.iter().map(|r| self.log_density(r)).sum()
    }

    /// Draws one vector from the vine by inverting the recursion: column i
    /// starts from a fresh uniform taken as its probability conditioned on
    /// all earlier columns, then peels off one conditioning column at a
    /// time with inverse h-functions.
    pub fn sample_u<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        let m = self.m;
        let mut x = vec![0.0; m];
        let mut a = VineArguments { m, grid: vec![0.0; m * m] };
        x[0] = rng.gen::<f64>();
        a.set(0, 0, x[0]);
        for i in 1..m {
            // Condition earlier columns on the block ending at i-1, using
            // the entries of column i-1 produced by its own inversion.
            for j in (0..i.saturating_sub(1)).rev() {
                let idx = pair_index(i - 1, j);
                let v = if self.pairs[idx].family() == PairFamily::Independence {
                    a.get(j, i - 2)
                } else {
                    self.pairs[idx].h_func(a.get(j, i - 2), a.get(i - 1, j + 1))
                };
                a.set(j, i - 1, v);
            }
            let mut v = rng.gen::<f64>();
            a.set(i, 0, v);
            for j in 0..i {
                let idx = pair_index(i, j);
                if self.pairs[idx].family() != PairFamily::Independence {
                    v = self.pairs[idx].h_inverse(v, a.get(j, i - 1));
                }
                a.set(i, j + 1, v);
            }
            x[i] = v;
        }
        x
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corr_param::PartialCorrSet;
    use crate::gaussian_copula::GaussianCopulaModel;
    use crate::inference::kendall_tau_hat;
    use crate::special::{gauss_legendre_20, integrate_panels, normal_cdf, normal_pdf, normal_quantile};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha20Rng;

    fn full(m: usize, family: PairFamily, phi: &[f64]) -> DVineModel {
        DVineModel::new(m, family, phi, &vec![true; phi.len()]).unwrap()
    }

    #[test]
    fn excluded_pairs_copy_arguments_and_contribute_nothing() {
        let phi = [3.0, -2.0, 5.0, 1.5, -4.0, 2.0];
        let model = DVineModel::new(4, PairFamily::Frank, &phi, &[false; 6]).unwrap();
        let u = [0.3, 0.82, 0.11, 0.57];
        let args = model.evaluate_arguments(&u);
        for i in 0..4 {
            for j in 0..4 {
                assert_eq!(args.get(i, j), u[i], "entry ({i},{j})");
            }
        }
        assert_eq!(model.log_density(&u), 0.0);
    }

    #[test]
    fn two_dim_gaussian_argument_closed_form() {
        let phi = 0.6;
        let model = full(2, PairFamily::Gaussian, &[phi]);
        let (u1, u2) = (0.3, 0.7);
        let args = model.evaluate_arguments(&[u1, u2]);
        let x1 = normal_quantile(u1);
        let x2 = normal_quantile(u2);
        let root = (1.0 - phi * phi).sqrt();
        assert!((args.get(1, 0) - normal_cdf((x2 - phi * x1) / root)).abs() < 1e-14);
        assert!((args.get(0, 1) - normal_cdf((x1 - phi * x2) / root)).abs() < 1e-14);
    }

    /// Conditional CDF by quadrature of the three-column joint density,
    /// written out by hand so the index bookkeeping of the recursion is
    /// checked against first principles.
    fn three_dim_conditional_oracle(
        phi: &[f64; 3],
        u: &[f64; 3],
        target: usize,
    ) -> f64 {
        let c21 = PairCopula::new(PairFamily::Clayton, phi[0]).unwrap();
        let c31 = PairCopula::new(PairFamily::Clayton, phi[1]).unwrap();
        let c32 = PairCopula::new(PairFamily::Clayton, phi[2]).unwrap();
        let dens = |v: [f64; 3]| {
            (c21.log_density(v[0], v[1])
                + c32.log_density(v[1], v[2])
                + c31.log_density(c32.h_func(v[2], v[1]), c21.h_func(v[0], v[1])))
            .exp()
        };
        let line = |t: f64| {
            let mut v = *u;
            v[target] = t;
            dens(v)
        };
        let cut = u[target];
        let below = integrate_panels(&line, 0.0, cut, 0.01);
        let above = integrate_panels(&line, cut, 1.0, 0.01);
        below / (below + above)
    }

    #[test]
    fn three_dim_arguments_match_conditional_cdf_oracle() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(41);
        for _ in 0..5 {
            let phi = [
                0.5 + 2.5 * rng.gen::<f64>(),
                0.5 + 2.5 * rng.gen::<f64>(),
                0.5 + 2.5 * rng.gen::<f64>(),
            ];
            let u = [
                0.05 + 0.9 * rng.gen::<f64>(),
                0.05 + 0.9 * rng.gen::<f64>(),
                0.05 + 0.9 * rng.gen::<f64>(),
            ];
            let model = full(3, PairFamily::Clayton, &phi);
            let args = model.evaluate_arguments(&u);
            let last_given_rest = three_dim_conditional_oracle(&phi, &u, 2);
            let first_given_rest = three_dim_conditional_oracle(&phi, &u, 0);
            assert!(
                (args.get(2, 0) - last_given_rest).abs() < 1e-6,
                "u_{{2|0}}: got {} oracle {last_given_rest} (phi {phi:?}, u {u:?})",
                args.get(2, 0)
            );
            assert!(
                (args.get(0, 2) - first_given_rest).abs() < 1e-6,
                "u_{{0|2}}: got {} oracle {first_given_rest} (phi {phi:?}, u {u:?})",
                args.get(0, 2)
            );
        }
    }

    #[test]
    fn gaussian_family_vine_equals_gaussian_copula() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(97);
        for rep in 0..200 {
            let m = 2 + rep % 4;
            let n_pairs = m * (m - 1) / 2;
            let mut parts = PartialCorrSet::independent(m);
            let mut lambda = Vec::with_capacity(n_pairs);
            for k in 0..n_pairs {
                let l = 1.9 * rng.gen::<f64>() - 0.95;
                parts.set_latent(k, l);
                lambda.push(l);
            }
            let gamma = parts.to_gamma().unwrap();
            let gauss = GaussianCopulaModel::new(gamma).unwrap();
            let vine = full(m, PairFamily::Gaussian, &lambda);
            let u: Vec<f64> = (0..m).map(|_| 0.02 + 0.96 * rng.gen::<f64>()).collect();
            let a = gauss.log_copula_density(&u);
            let b = vine.log_density(&u);
            assert!((a - b).abs() < 1e-8, "m={m}: gaussian {a} vine {b}");
        }
    }

    #[test]
    fn two_dim_vine_is_the_pair_density() {
        let cases = [
            (PairFamily::Gaussian, 0.5),
            (PairFamily::Frank, 4.0),
            (PairFamily::Clayton, 2.0),
            (PairFamily::Gumbel, 2.5),
        ];
        for (family, phi) in cases {
            let model = full(2, family, &[phi]);
            let pair = PairCopula::new(family, phi).unwrap();
            for &(u1, u2) in &[(0.2, 0.7), (0.5, 0.5), (0.91, 0.08)] {
                let diff = (model.log_density(&[u1, u2]) - pair.log_density(u1, u2)).abs();
                assert!(diff < 1e-10, "{family:?} at ({u1},{u2}): diff {diff}");
            }
        }
    }

    #[test]
    fn shortcut_matches_literal_independence_h_exactly() {
        let phi = [1.5, 2.0, 3.0, 1.2, 2.5, 1.8];
        let gamma = [true, false, true, false, false, true];
        let model = DVineModel::new(4, PairFamily::Gumbel, &phi, &gamma).unwrap();
        let literal_pairs: Vec<PairCopula> = phi
            .iter()
            .zip(&gamma)
            .map(|(&p, &g)| {
                if g {
                    PairCopula::new(PairFamily::Gumbel, p).unwrap()
                } else {
                    PairCopula::independence()
                }
            })
            .collect();
        let mut rng = rand::rngs::StdRng::seed_from_u64(5);
        for _ in 0..20 {
            let u: Vec<f64> = (0..4).map(|_| rng.gen::<f64>()).collect();
            let fast = model.evaluate_arguments(&u);
            // Literal recursion: every pair goes through its h-function,
            // independence included.
            let m = 4;
            let mut grid = vec![0.0; m * m];
            for i in 0..m {
                grid[i * m + i] = clamp_unit(u[i]);
            }
            for k in 1..m {
                for i in k..m {
                    let s = i - k;
                    let c = &literal_pairs[pair_index(i, s)];
                    let down = grid[i * m + s + 1];
                    let up = grid[s * m + i - 1];
                    grid[i * m + s] = c.h_func(down, up);
                    grid[s * m + i] = c.h_func(up, down);
                }
            }
            for i in 0..m {
                for j in 0..m {
                    assert_eq!(fast.get(i, j), grid[i * m + j], "entry ({i},{j})");
                }
            }
        }
    }

    #[test]
    fn reversing_column_order_preserves_density() {
        // Reversing columns maps pair (t,s) to (m-1-s, m-1-t) with the
        // same lag; exchangeable pair families make this an identity.
        let cases: [(usize, PairFamily, Vec<f64>, Vec<bool>); 2] = [
            (3, PairFamily::Frank, vec![3.0, -2.0, 5.0], vec![true, true, true]),
            (
                4,
                PairFamily::Clayton,
                vec![2.0, 0.7, 1.4, 3.0, 0.9, 1.1],
                vec![true, false, true, true, false, true],
            ),
        ];
        let mut rng = rand::rngs::StdRng::seed_from_u64(13);
        for (m, family, phi, gamma) in cases {
            let n_pairs = phi.len();
            let mut phi_rev = vec![0.0; n_pairs];
            let mut gamma_rev = vec![false; n_pairs];
            for (t, s) in pair_order(m) {
                let from = pair_index(t, s);
                let to = pair_index(m - 1 - s, m - 1 - t);
                phi_rev[to] = phi[from];
                gamma_rev[to] = gamma[from];
            }
            let fwd = DVineModel::new(m, family, &phi, &gamma).unwrap();
            let rev = DVineModel::new(m, family, &phi_rev, &gamma_rev).unwrap();
            for _ in 0..20 {
                let u: Vec<f64> = (0..m).map(|_| 0.02 + 0.96 * rng.gen::<f64>()).collect();
                let mut u_rev = u.clone();
                u_rev.reverse();
                let a = fwd.log_density(&u);
                let b = rev.log_density(&u_rev);
                assert!((a - b).abs() < 1e-9, "{family:?} m={m}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn two_dim_density_normalizes() {
        for (family, phi) in [(PairFamily::Clayton, 3.0), (PairFamily::Gumbel, 2.0)] {
            let model = full(2, family, &[phi]);
            let inner = |z1: f64| {
                let f = |z2: f64| {
                    let u = [normal_cdf(z1), normal_cdf(z2)];
                    model.log_density(&u).exp() * normal_pdf(z2)
                };
                let mut acc = 0.0;
                let mut lo = -8.0;
                while lo < 8.0 - 1e-9 {
                    acc += gauss_legendre_20(&f, lo, lo + 0.5);
                    lo += 0.5;
                }
                acc * normal_pdf(z1)
            };
            let mut total = 0.0;
            let mut lo = -8.0;
            while lo < 8.0 - 1e-9 {
                total += gauss_legendre_20(&inner, lo, lo + 0.5);
                lo += 0.5;
            }
            assert!((total - 1.0).abs() < 1e-3, "{family:?}: integral {total}");
        }
    }

    #[test]
    fn sampling_with_all_pairs_excluded_gives_independent_uniforms() {
        let model =
            DVineModel::new(3, PairFamily::Clayton, &[2.0, 1.0, 3.0], &[false; 3]).unwrap();
        let mut rng = ChaCha20Rng::seed_from_u64(2024);
        let n = 4000;
        let draws: Vec<Vec<f64>> = (0..n).map(|_| model.sample_u(&mut rng)).collect();
        for j in 0..3 {
            let mut col: Vec<f64> = draws.iter().map(|d| d[j]).collect();
            col.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let ks = col
                .iter()
                .enumerate()
                .map(|(i, &v)| {
                    let hi = ((i + 1) as f64 / n as f64 - v).abs();
                    let lo = (v - i as f64 / n as f64).abs();
                    hi.max(lo)
                })
                .fold(0.0f64, f64::max);
            assert!(ks < 1.63 / (n as f64).sqrt(), "column {j}: KS {ks}");
        }
        for (a, b) in [(0usize, 1usize), (1, 2), (0, 2)] {
            let x: Vec<f64> = draws.iter().map(|d| d[a]).collect();
            let y: Vec<f64> = draws.iter().map(|d| d[b]).collect();
            let tau = kendall_tau_hat(&x, &y);
            assert!(tau.abs() < 0.05, "pair ({a},{b}): tau {tau}");
        }
    }

    #[test]
    fn gaussian_vine_sampling_matches_gaussian_copula_sampling() {
        let lambda = [0.6, -0.4, 0.3];
        let mut parts = PartialCorrSet::independent(3);
        for (k, &l) in lambda.iter().enumerate() {
            parts.set_latent(k, l);
        }
        let gauss = GaussianCopulaModel::new(parts.to_gamma().unwrap()).unwrap();
        let vine = full(3, PairFamily::Gaussian, &lambda);
        let n = 100_000;
        let mut rng = ChaCha20Rng::seed_from_u64(8);
        let from_vine: Vec<Vec<f64>> = (0..n).map(|_| vine.sample_u(&mut rng)).collect();
        let from_gauss: Vec<Vec<f64>> = (0..n).map(|_| gauss.sample_u(&mut rng)).collect();
        for (a, b) in [(0usize, 1usize), (1, 2), (0, 2)] {
            let tau_of = |rows: &[Vec<f64>]| {
                let x: Vec<f64> = rows.iter().map(|r| r[a]).collect();
                let y: Vec<f64> = rows.iter().map(|r| r[b]).collect();
                kendall_tau_hat(&x, &y)
            };
            let tv = tau_of(&from_vine);
            let tg = tau_of(&from_gauss);
            assert!((tv - tg).abs() < 0.01, "pair ({a},{b}): vine {tv} gauss {tg}");
        }
    }

    #[test]
    fn clayton_vine_adjacent_margins_match_closed_form_tau() {
        // Adjacent pairs of a d-vine have their pair copula as their
        // bivariate margin, so the sample tau should match the closed form.
        let phi = [2.0, 0.8, 4.0];
        let vine = full(3, PairFamily::Clayton, &phi);
        let n = 100_000;
        let mut rng = ChaCha20Rng::seed_from_u64(55);
        let draws: Vec<Vec<f64>> = (0..n).map(|_| vine.sample_u(&mut rng)).collect();
        for (a, b, idx) in [(0usize, 1usize, 0usize), (1, 2, 2)] {
            let x: Vec<f64> = draws.iter().map(|d| d[a]).collect();
            let y: Vec<f64> = draws.iter().map(|d| d[b]).collect();
            let tau = kendall_tau_hat(&x, &y);
            let expect = PairCopula::new(PairFamily::Clayton, phi[idx])
                .unwrap()
                .dependence()
                .tau
                .unwrap();
            assert!((tau - expect).abs() < 0.01, "pair ({a},{b}): tau {tau} expect {expect}");
        }
    }

    #[test]
    fn two_dim_sampling_matches_pair_sampler() {
        let model = full(2, PairFamily::Gumbel, &[3.0]);
        let pair = PairCopula::new(PairFamily::Gumbel, 3.0).unwrap();
        let n = 40_000;
        let mut rng = ChaCha20Rng::seed_from_u64(91);
        let a: Vec<Vec<f64>> = (0..n).map(|_| model.sample_u(&mut rng)).collect();
        let b: Vec<(f64, f64)> = (0..n).map(|_| pair.sample(&mut rng)).collect();
        let tau_a = kendall_tau_hat(
            &a.iter().map(|r| r[0]).collect::<Vec<_>>(),
            &a.iter().map(|r| r[1]).collect::<Vec<_>>(),
        );
        let tau_b = kendall_tau_hat(
            &b.iter().map(|r| r.0).collect::<Vec<_>>(),
            &b.iter().map(|r| r.1).collect::<Vec<_>>(),
        );
        assert!((tau_a - tau_b).abs() < 0.015, "tau {tau_a} vs {tau_b}");
        assert!((tau_a - 2.0 / 3.0).abs() < 0.01, "tau {tau_a} vs closed form 2/3");
    }

    #[test]
    fn mutators_rebuild_effective_pairs() {
        let mut model =
            DVineModel::new(3, PairFamily::Gumbel, &[2.0, 1.5, 3.0], &[true, true, true])
                .unwrap();
        let u = [0.3, 0.6, 0.8];
        model.set_indicator(1, false);
        let expect = DVineModel::new(
            3,
            PairFamily::Gumbel,
            &[2.0, 1.5, 3.0],
            &[true, false, true],
        )
        .unwrap();
        assert_eq!(model.log_density(&u), expect.log_density(&u));

        model.set_latent(1, 4.0).unwrap();
        model.set_indicator(1, true);
        let expect =
            DVineModel::new(3, PairFamily::Gumbel, &[2.0, 4.0, 3.0], &[true; 3]).unwrap();
        assert_eq!(model.log_density(&u), expect.log_density(&u));

        assert!(model.set_latent(0, 0.5).is_err(), "parameter below the family domain");
        assert!(DVineModel::new(2, PairFamily::Independence, &[0.0], &[true]).is_err());
        assert!(DVineModel::new(3, PairFamily::Frank, &[1.0], &[true]).is_err());
    }
}
