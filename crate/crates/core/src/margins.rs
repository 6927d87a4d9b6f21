//! Univariate margin families.
//!
//! A margin supplies the CDF (and its left limit, which differs on the
//! discrete families), the log density or mass, and the quantile. The
//! samplers additionally need every parametric family exposed through an
//! unconstrained parameterisation: location parameters stay as they are,
//! positive parameters move to the log scale, probabilities to the logit
//! scale. Priors are normal on those working scales with variances 100, 10
//! and 4 respectively, which keeps every family proper but weakly
//! informative.

use crate::error::{CopulaError, Result};
use crate::special::{normal_cdf, normal_pdf, normal_quantile, LN_2PI};
use statrs::distribution::{ContinuousCDF, StudentsT};
use statrs::function::beta::beta_reg;
use statrs::function::gamma::{gamma_ur, ln_gamma};

/// Prior variance for unconstrained location parameters.
const LOCATION_PRIOR_VAR: f64 = 100.0;
/// Prior variance for log-scale (positive) parameters.
const POSITIVE_PRIOR_VAR: f64 = 10.0;
/// Prior variance for logit-probability parameters.
const PROBABILITY_PRIOR_VAR: f64 = 4.0;

/// How a scalar parameter maps to the unconstrained working scale.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ParamKind {
    Location,
    Positive,
    Probability,
}

impl ParamKind {
    pub fn to_unconstrained(self, v: f64) -> f64 {
        match self {
            ParamKind::Location => v,
            ParamKind::Positive => v.ln(),
            ParamKind::Probability => (v / (1.0 - v)).ln(),
        }
    }

    pub fn from_unconstrained(self, z: f64) -> f64 {
        match self {
            ParamKind::Location => z,
            // Clamps keep exp/logistic away from inf and the closed
            // endpoints, so any real z maps to a valid parameter.
            ParamKind::Positive => z.clamp(-700.0, 700.0).exp(),
            ParamKind::Probability => {
                let z = z.clamp(-36.0, 36.0);
                1.0 / (1.0 + (-z).exp())
            }
        }
    }

    fn prior_var(self) -> f64 {
        match self {
            ParamKind::Location => LOCATION_PRIOR_VAR,
            ParamKind::Positive => POSITIVE_PRIOR_VAR,
            ParamKind::Probability => PROBABILITY_PRIOR_VAR,
        }
    }
}

/// A fully specified margin distribution.
#[derive(Clone, Debug, PartialEq)]
pub enum MarginSpec {
    Normal { mu: f64, sigma: f64 },
    StudentT { mu: f64, sigma: f64, nu: f64 },
    NegativeBinomial { r: f64, p: f64 },
    Bernoulli { p: f64 },
    Poisson { rate: f64 },
    /// Nonparametric margin backed by an observed sample; the CDF is the
    /// rescaled empirical distribution function rank/(n+1), which keeps
    /// values inside (0, 1).
    Empirical { sorted: Vec<f64> },
}

impl MarginSpec {
    pub fn normal(mu: f64, sigma: f64) -> Result<Self> {
        require_finite("mu", mu)?;
        require_positive("sigma", sigma)?;
        Ok(MarginSpec::Normal { mu, sigma })
    }

    pub fn student_t(mu: f64, sigma: f64, nu: f64) -> Result<Self> {
        require_finite("mu", mu)?;
        require_positive("sigma", sigma)?;
        require_positive("nu", nu)?;
        Ok(MarginSpec::StudentT { mu, sigma, nu })
    }

    pub fn negative_binomial(r: f64, p: f64) -> Result<Self> {
        require_positive("r", r)?;
        require_prob("p", p)?;
        Ok(MarginSpec::NegativeBinomial { r, p })
    }

    pub fn bernoulli(p: f64) -> Result<Self> {
        require_prob("p", p)?;
        Ok(MarginSpec::Bernoulli { p })
    }

    pub fn poisson(rate: f64) -> Result<Self> {
        require_positive("rate", rate)?;
        Ok(MarginSpec::Poisson { rate })
    }

    pub fn empirical(sample: &[f64]) -> Result<Self> {
        if sample.is_empty() {
            return Err(CopulaError::domain("sample", "empirical margin needs data"));
        }
        if sample.iter().any(|v| !v.is_finite()) {
            return Err(CopulaError::domain("sample", "non-finite value"));
        }
        let mut sorted = sample.to_vec();
        sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
        Ok(MarginSpec::Empirical { sorted })
    }

    /// Family name as used in config files.
    pub fn family_name(&self) -> &'static str {
        match self {
            MarginSpec::Normal { .. } => "normal",
            MarginSpec::StudentT { .. } => "studentt",
            MarginSpec::NegativeBinomial { .. } => "negativebinomial",
            MarginSpec::Bernoulli { .. } => "bernoulli",
            MarginSpec::Poisson { .. } => "poisson",
            MarginSpec::Empirical { .. } => "empirical",
        }
    }

    /// True for integer-valued families, where the CDF has unit-spaced jumps.
    pub fn is_discrete(&self) -> bool {
        matches!(
            self,
            MarginSpec::NegativeBinomial { .. }
                | MarginSpec::Bernoulli { .. }
                | MarginSpec::Poisson { .. }
        )
    }

    /// F(y).
    pub fn cdf(&self, y: f64) -> f64 {
        match self {
            MarginSpec::Normal { mu, sigma } => normal_cdf((y - mu) / sigma),
            MarginSpec::StudentT { mu, sigma, nu } => {
                StudentsT::new(*mu, *sigma, *nu).expect("validated").cdf(y)
            }
            MarginSpec::NegativeBinomial { r, p } => {
                let k = y.floor();
                if k < 0.0 {
                    0.0
                } else {
                    // P(X <= k) for the count of failures before the r-th
                    // success at success probability p.
                    beta_reg(*r, k + 1.0, *p)
                }
            }
            MarginSpec::Bernoulli { p } => {
                if y < 0.0 {
                    0.0
                } else if y < 1.0 {
                    1.0 - p
                } else {
                    1.0
                }
            }
            MarginSpec::Poisson { rate } => {
                let k = y.floor();
                if k < 0.0 {
                    0.0
                } else {
                    gamma_ur(k + 1.0, *rate)
                }
            }
            MarginSpec::Empirical { sorted } => {
                let n = sorted.len();
                let cnt = sorted.partition_point(|&v| v <= y);
                cnt as f64 / (n as f64 + 1.0)
            }
        }
    }

    /// F(y-): the left limit of the CDF at y. Equals `cdf(y)` for the
    /// continuous families; the integer families return `cdf(y - 1)`.
    pub fn cdf_left_limit(&self, y: f64) -> f64 {
        if self.is_discrete() {
            self.cdf(y - 1.0)
        } else {
            self.cdf(y)
        }
    }

    /// Log density (continuous) or log mass (discrete). Discrete families
    /// return -inf off their support. The empirical margin carries no
    /// parameters, so its likelihood contribution is a constant; it reports
    /// zero.
    pub fn log_density(&self, y: f64) -> f64 {
        match self {
            MarginSpec::Normal { mu, sigma } => {
                let z = (y - mu) / sigma;
                -0.5 * LN_2PI - sigma.ln() - 0.5 * z * z
            }
            MarginSpec::StudentT { mu, sigma, nu } => {
                let z = (y - mu) / sigma;
                ln_gamma((nu + 1.0) / 2.0)
                    - ln_gamma(nu / 2.0)
                    - 0.5 * (nu * std::f64::consts::PI).ln()
                    - sigma.ln()
                    - 0.5 * (nu + 1.0) * (z * z / nu).ln_1p()
            }
            MarginSpec::NegativeBinomial { r, p } => {
                let k = match integer_support(y) {
                    Some(k) => k,
                    None => return f64::NEG_INFINITY,
                };
                ln_gamma(k + r) - ln_gamma(*r) - ln_gamma(k + 1.0)
                    + r * p.ln()
                    + k * (1.0 - p).ln()
            }
            MarginSpec::Bernoulli { p } => {
                if y == 1.0 {
                    p.ln()
                } else if y == 0.0 {
                    (1.0 - p).ln()
                } else {
                    f64::NEG_INFINITY
                }
            }
            MarginSpec::Poisson { rate } => {
                let k = match integer_support(y) {
                    Some(k) => k,
                    None => return f64::NEG_INFINITY,
                };
                k * rate.ln() - rate - ln_gamma(k + 1.0)
            }
            MarginSpec::Empirical { .. } => 0.0,
        }
    }

    /// Quantile: for continuous families the inverse CDF; for discrete
    /// families the smallest support point y with F(y) >= u.
    pub fn quantile(&self, u: f64) -> Result<f64> {
        if !(u > 0.0 && u < 1.0) {
            return Err(CopulaError::domain("u", format!("{u} outside (0, 1)")));
        }
        Ok(match self {
            MarginSpec::Normal { mu, sigma } => mu + sigma * normal_quantile(u),
            MarginSpec::StudentT { mu, sigma, nu } => {
                let dist = StudentsT::new(*mu, *sigma, *nu).expect("validated");
                let mut x = dist.inverse_cdf(u);
                // Two Newton polish steps tighten the library inversion to
                // the round-trip tolerance.
                for _ in 0..2 {
                    let pdf = self.log_density(x).exp();
                    if pdf > 1e-300 {
                        x -= (dist.cdf(x) - u) / pdf;
                    }
                }
                x
            }
            MarginSpec::NegativeBinomial { .. } | MarginSpec::Poisson { .. } => {
                let mut k = 0.0;
                loop {
                    if self.cdf(k) >= u {
                        break k;
                    }
                    k += 1.0;
                    if k > 1e8 {
                        return Err(CopulaError::numerical(
                            "discrete quantile",
                            format!("support scan exceeded 1e8 at u = {u}"),
                        ));
                    }
                }
            }
            MarginSpec::Bernoulli { p } => {
                if u <= 1.0 - p {
                    0.0
                } else {
                    1.0
                }
            }
            MarginSpec::Empirical { sorted } => {
                let n = sorted.len();
                let idx = (u * (n as f64 + 1.0)).ceil() as usize;
                sorted[idx.clamp(1, n) - 1]
            }
        })
    }

    /// Natural-scale parameter vector (empty for the empirical margin).
    pub fn params(&self) -> Vec<f64> {
        match self {
            MarginSpec::Normal { mu, sigma } => vec![*mu, *sigma],
            MarginSpec::StudentT { mu, sigma, nu } => vec![*mu, *sigma, *nu],
            MarginSpec::NegativeBinomial { r, p } => vec![*r, *p],
            MarginSpec::Bernoulli { p } => vec![*p],
            MarginSpec::Poisson { rate } => vec![*rate],
            MarginSpec::Empirical { .. } => vec![],
        }
    }

    /// Parameter names, aligned with `params()`.
    pub fn param_names(&self) -> Vec<&'static str> {
        match self {
            MarginSpec::Normal { .. } => vec!["mu", "sigma"],
            MarginSpec::StudentT { .. } => vec!["mu", "sigma", "nu"],
            MarginSpec::NegativeBinomial { .. } => vec!["r", "p"],
            MarginSpec::Bernoulli { .. } => vec!["p"],
            MarginSpec::Poisson { .. } => vec!["rate"],
            MarginSpec::Empirical { .. } => vec![],
        }
    }

    /// Working-scale kinds, aligned with `params()`.
    pub fn param_kinds(&self) -> Vec<ParamKind> {
        match self {
            MarginSpec::Normal { .. } => vec![ParamKind::Location, ParamKind::Positive],
            MarginSpec::StudentT { .. } => {
                vec![ParamKind::Location, ParamKind::Positive, ParamKind::Positive]
            }
            MarginSpec::NegativeBinomial { .. } => {
                vec![ParamKind::Positive, ParamKind::Probability]
            }
            MarginSpec::Bernoulli { .. } => vec![ParamKind::Probability],
            MarginSpec::Poisson { .. } => vec![ParamKind::Positive],
            MarginSpec::Empirical { .. } => vec![],
        }
    }

    /// Rebuilds the margin from a natural-scale parameter vector.
    pub fn with_params(&self, p: &[f64]) -> Result<Self> {
        let expect = self.params().len();
        if p.len() != expect {
            return Err(CopulaError::domain(
                "params",
                format!("expected {expect} values, got {}", p.len()),
            ));
        }
        match self {
            MarginSpec::Normal { .. } => MarginSpec::normal(p[0], p[1]),
            MarginSpec::StudentT { .. } => MarginSpec::student_t(p[0], p[1], p[2]),
            MarginSpec::NegativeBinomial { .. } => MarginSpec::negative_binomial(p[0], p[1]),
            MarginSpec::Bernoulli { .. } => MarginSpec::bernoulli(p[0]),
            MarginSpec::Poisson { .. } => MarginSpec::poisson(p[0]),
            MarginSpec::Empirical { sorted } => Ok(MarginSpec::Empirical { sorted: sorted.clone() }),
        }
    }

    /// Maps the current parameters to the unconstrained working scale.
    pub fn to_unconstrained(&self) -> Vec<f64> {
        self.params()
            .iter()
            .zip(self.param_kinds())
            .map(|(&v, k)| k.to_unconstrained(v))
            .collect()
    }

    /// Rebuilds the margin from unconstrained values; always yields a valid
    /// parameter vector.
    pub fn from_unconstrained(&self, z: &[f64]) -> Self {
        let vals: Vec<f64> = z
            .iter()
            .zip(self.param_kinds())
            .map(|(&zv, k)| k.from_unconstrained(zv))
            .collect();
        self.with_params(&vals).expect("transform yields valid parameters")
    }

    /// Log prior density of the unconstrained vector: independent normals
    /// on the working scales.
    pub fn log_prior_unconstrained(&self, z: &[f64]) -> f64 {
        z.iter()
            .zip(self.param_kinds())
            .map(|(&zv, k)| {
                let var = k.prior_var();
                -0.5 * (LN_2PI + var.ln()) - 0.5 * zv * zv / var
            })
            .sum()
    }

    /// Rough parameter estimates from sample moments, used to start chains.
    pub fn moment_fit(&self, data: &[f64]) -> Result<Self> {
        if data.is_empty() {
            return Err(CopulaError::domain("data", "empty column"));
        }
        let n = data.len() as f64;
        let mean = data.iter().sum::<f64>() / n;
        let var = data.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n.max(2.0);
        let sd = var.sqrt().max(1e-6);
        match self {
            MarginSpec::Normal { .. } => MarginSpec::normal(mean, sd),
            MarginSpec::StudentT { .. } => MarginSpec::student_t(mean, sd, 8.0),
            MarginSpec::NegativeBinomial { .. } => {
                // Method of moments: p = mean/var, r = mean p / (1 - p).
                let p = if var > mean { (mean / var).clamp(0.05, 0.95) } else { 0.5 };
                let r = (mean * p / (1.0 - p)).max(0.1);
                MarginSpec::negative_binomial(r, p)
            }
            MarginSpec::Bernoulli { .. } => {
                let p = mean.clamp(1.0 / (n + 2.0), 1.0 - 1.0 / (n + 2.0));
                MarginSpec::bernoulli(p)
            }
            MarginSpec::Poisson { .. } => MarginSpec::poisson(mean.max(0.01)),
            MarginSpec::Empirical { .. } => MarginSpec::empirical(data),
        }
    }
}

/// Parses a margin family name (lowercase) with default parameters; used by
/// the config layer before data-driven initialisation.
pub fn default_margin(family: &str) -> Result<MarginSpec> {
    match family {
        "normal" => MarginSpec::normal(0.0, 1.0),
        "studentt" => MarginSpec::student_t(0.0, 1.0, 8.0),
        "negativebinomial" => MarginSpec::negative_binomial(1.0, 0.5),
        "bernoulli" => MarginSpec::bernoulli(0.5),
        "poisson" => MarginSpec::poisson(1.0),
        "empirical" => Ok(MarginSpec::Empirical { sorted: vec![0.0] }),
        other => Err(CopulaError::domain(
            "family",
            format!("unknown margin family `{other}`"),
        )),
    }
}

fn integer_support(y: f64) -> Option<f64> {
    if y >= 0.0 && y.fract() == 0.0 && y.is_finite() {
        Some(y)
    } else {
        None
    }
}

fn require_finite(name: &str, v: f64) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(CopulaError::domain(name, format!("{v} is not finite")))
    }
}

fn require_positive(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(CopulaError::domain(name, format!("{v} is not positive")))
    }
}

fn require_prob(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 && v < 1.0 {
        Ok(())
    } else {
        Err(CopulaError::domain(name, format!("{v} outside (0, 1)")))
    }
}

/// Density of the standard normal scaled to (mu, sigma); helper for the
/// latent schemes.
pub fn scaled_normal_pdf(y: f64, mu: f64, sigma: f64) -> f64 {
    normal_pdf((y - mu) / sigma) / sigma
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::integrate_panels;

    #[test]
    fn normal_cdf_values() {
        let m = MarginSpec::normal(0.0, 1.0).unwrap();
        assert!((m.cdf(0.0) - 0.5).abs() < 1e-15);
        assert_eq!(m.cdf_left_limit(0.0), m.cdf(0.0));
        assert!((m.log_density(0.0) + 0.5 * LN_2PI).abs() < 1e-15);
        let q = m.quantile(0.975).unwrap();
        assert!((q - 1.9599639845400545).abs() < 1e-9);
    }

    // pmf-enumeration oracle: the CDF of an integer family must equal the
    // running sum of its masses.
    fn check_cdf_against_pmf_sum(m: &MarginSpec, up_to: usize) {
        let mut acc = 0.0;
        for k in 0..=up_to {
            acc += m.log_density(k as f64).exp();
            let cdf = m.cdf(k as f64);
            assert!(
                (cdf - acc).abs() < 1e-12,
                "{} cdf({k}) = {cdf}, pmf sum {acc}",
                m.family_name()
            );
        }
    }

    #[test]
    fn negative_binomial_cdf_matches_enumeration() {
        let m = MarginSpec::negative_binomial(2.0, 0.5).unwrap();
        // r=2, p=1/2: pmf(0) = 1/4, pmf(1) = 1/4, so cdf(1) = 1/2.
        assert!((m.cdf(1.0) - 0.5).abs() < 1e-12);
        check_cdf_against_pmf_sum(&m, 25);
        check_cdf_against_pmf_sum(&MarginSpec::negative_binomial(3.7, 0.3).unwrap(), 60);
        check_cdf_against_pmf_sum(&MarginSpec::negative_binomial(0.6, 0.8).unwrap(), 20);
    }

    #[test]
    fn poisson_cdf_matches_enumeration() {
        check_cdf_against_pmf_sum(&MarginSpec::poisson(3.2).unwrap(), 30);
        check_cdf_against_pmf_sum(&MarginSpec::poisson(0.4).unwrap(), 12);
    }

    #[test]
    fn discrete_jump_equals_mass() {
        let families = [
            MarginSpec::negative_binomial(2.5, 0.4).unwrap(),
            MarginSpec::poisson(2.0).unwrap(),
            MarginSpec::bernoulli(0.3).unwrap(),
        ];
        for m in &families {
            for k in 0..=1 + 14 * usize::from(m.family_name() != "bernoulli") {
                let jump = m.cdf(k as f64) - m.cdf_left_limit(k as f64);
                let mass = m.log_density(k as f64).exp();
                assert!(
                    (jump - mass).abs() < 1e-12,
                    "{} at {k}: jump {jump} vs mass {mass}",
                    m.family_name()
                );
            }
        }
    }

    #[test]
    fn bernoulli_values() {
        let m = MarginSpec::bernoulli(0.3).unwrap();
        assert!((m.cdf_left_limit(1.0) - 0.7).abs() < 1e-15);
        assert_eq!(m.cdf(1.0), 1.0);
        assert!((m.log_density(1.0) - 0.3f64.ln()).abs() < 1e-15);
        assert_eq!(m.log_density(0.5), f64::NEG_INFINITY);
        assert_eq!(m.quantile(0.69).unwrap(), 0.0);
        assert_eq!(m.quantile(0.71).unwrap(), 1.0);
    }

    #[test]
    fn empirical_rank_scaling() {
        let m = MarginSpec::empirical(&[3.0, 1.0, 2.0]).unwrap();
        assert!((m.cdf(2.0) - 0.5).abs() < 1e-15);
        assert!((m.cdf(0.5) - 0.0).abs() < 1e-15);
        assert!((m.cdf(7.0) - 0.75).abs() < 1e-15);
        assert_eq!(m.quantile(0.5).unwrap(), 2.0);
        assert_eq!(m.quantile(0.01).unwrap(), 1.0);
        assert_eq!(m.quantile(0.99).unwrap(), 3.0);
        // CDF values stay inside (0, 1) so normal scores remain finite.
        assert!(m.cdf(100.0) < 1.0 && m.cdf(-100.0) >= 0.0);
    }

    #[test]
    fn densities_integrate_to_one() {
        // Quadrature oracle over a wide bracket.
        let cases = [
            MarginSpec::normal(0.7, 1.3).unwrap(),
            MarginSpec::student_t(-0.5, 2.0, 4.0).unwrap(),
            MarginSpec::student_t(0.0, 1.0, 30.0).unwrap(),
        ];
        for m in &cases {
            let f = |y: f64| m.log_density(y).exp();
            let b = match m {
                MarginSpec::StudentT { .. } => 400.0,
                _ => 40.0,
            };
            let total = integrate_panels(&f, -b, b, 0.25);
            assert!(
                (total - 1.0).abs() < 1e-6,
                "{} integrates to {total}",
                m.family_name()
            );
        }
    }

    #[test]
    fn discrete_mass_sums_to_one() {
        let m = MarginSpec::negative_binomial(2.0, 0.35).unwrap();
        let total: f64 = (0..400).map(|k| m.log_density(k as f64).exp()).sum();
        assert!((total - 1.0).abs() < 1e-10);
    }

    #[test]
    fn continuous_quantile_round_trip() {
        let cases = [
            MarginSpec::normal(2.0, 0.5).unwrap(),
            MarginSpec::student_t(1.0, 2.0, 5.0).unwrap(),
        ];
        for m in &cases {
            for i in 1..40 {
                let y = -6.0 + 12.0 * i as f64 / 40.0;
                let u = m.cdf(y);
                if u <= 0.0 || u >= 1.0 {
                    continue;
                }
                let back = m.quantile(u).unwrap();
                // Representing u as a double near 0 or 1 already perturbs y
                // by ~ulp/f(y); allow for that on top of the relative term.
                let tol = 1e-8 * (1.0 + y.abs()) + 4e-15 / m.log_density(y).exp();
                assert!(
                    (back - y).abs() < tol,
                    "{} round trip at {y}: {back}",
                    m.family_name()
                );
            }
        }
    }

    #[test]
    fn discrete_quantile_is_smallest_support_point() {
        let m = MarginSpec::poisson(4.0).unwrap();
        for k in 0..12 {
            let c = m.cdf(k as f64);
            assert_eq!(m.quantile(c * 0.999999).unwrap(), k as f64);
            if c < 1.0 - 1e-12 {
                assert_eq!(m.quantile(c + 1e-12).unwrap(), (k + 1) as f64);
            }
        }
    }

    #[test]
    fn unconstrained_round_trip() {
        let cases = [
            MarginSpec::normal(-3.0, 0.4).unwrap(),
            MarginSpec::student_t(0.0, 1.5, 7.0).unwrap(),
            MarginSpec::negative_binomial(2.5, 0.7).unwrap(),
            MarginSpec::bernoulli(0.12).unwrap(),
            MarginSpec::poisson(6.0).unwrap(),
        ];
        for m in &cases {
            let z = m.to_unconstrained();
            let back = m.from_unconstrained(&z);
            for (a, b) in m.params().iter().zip(back.params()) {
                assert!((a - b).abs() < 1e-10 * (1.0 + a.abs()), "{m:?} -> {back:?}");
            }
            assert!(m.log_prior_unconstrained(&z).is_finite());
        }
    }

    #[test]
    fn extreme_unconstrained_values_stay_valid() {
        let m = MarginSpec::bernoulli(0.5).unwrap();
        for z in [-1e6, -40.0, 0.0, 40.0, 1e6] {
            let p = m.from_unconstrained(&[z]).params()[0];
            assert!(p > 0.0 && p < 1.0, "z = {z} gave p = {p}");
        }
        let m = MarginSpec::poisson(1.0).unwrap();
        for z in [-1e4, 0.0, 1e4] {
            let r = m.from_unconstrained(&[z]).params()[0];
            assert!(r > 0.0 && r.is_finite(), "z = {z} gave rate = {r}");
        }
    }

    #[test]
    fn domain_errors_name_parameters() {
        let err = MarginSpec::normal(0.0, -1.0).unwrap_err();
        assert!(err.to_string().contains("sigma"));
        let err = MarginSpec::bernoulli(1.0).unwrap_err();
        assert!(err.to_string().contains('p'));
        let err = MarginSpec::student_t(0.0, 1.0, 0.0).unwrap_err();
        assert!(err.to_string().contains("nu"));
        let err = MarginSpec::poisson(0.0).unwrap_err();
        assert!(err.to_string().contains("rate"));
    }

    #[test]
    fn quantile_rejects_boundary() {
        let m = MarginSpec::normal(0.0, 1.0).unwrap();
        assert!(m.quantile(0.0).is_err());
        assert!(m.quantile(1.0).is_err());
    }

    #[test]
    fn moment_fits_are_sane() {
        let data: Vec<f64> = (0..200).map(|i| (i % 7) as f64).collect();
        let m = MarginSpec::poisson(1.0).unwrap().moment_fit(&data).unwrap();
        assert!((m.params()[0] - 3.0).abs() < 0.2);
        let m = MarginSpec::bernoulli(0.5)
            .unwrap()
            .moment_fit(&[1.0, 1.0, 1.0, 1.0])
            .unwrap();
        let p = m.params()[0];
        assert!(p < 1.0 && p > 0.5, "all-ones column clamps p inside (0,1): {p}");
    }

    #[test]
    fn cdf_monotone_over_grid() {
        let cases = [
            MarginSpec::normal(0.0, 2.0).unwrap(),
            MarginSpec::student_t(0.0, 1.0, 3.0).unwrap(),
            MarginSpec::negative_binomial(1.5, 0.45).unwrap(),
            MarginSpec::poisson(2.5).unwrap(),
            MarginSpec::empirical(&[0.0, 1.0, 1.0, 4.0]).unwrap(),
        ];
        for m in &cases {
            let mut prev = -1.0;
            let mut y = -10.0;
            while y <= 30.0 {
                let c = m.cdf(y);
                assert!((0.0..=1.0).contains(&c));
                assert!(c >= prev, "{} not monotone at {y}", m.family_name());
                assert!(m.cdf_left_limit(y) <= c + 1e-15);
                prev = c;
                y += 0.25;
            }
        }
    }
}
