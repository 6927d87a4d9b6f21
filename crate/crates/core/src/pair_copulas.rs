//! Bivariate copula families: independence, Gaussian, Frank, Clayton and
//! Gumbel.
//!
//! Each family exposes the joint CDF, the log density, the conditional CDF
//! h(u1|u2) with its inverse, closed-form dependence measures where they
//! exist, and exact sampling through the conditional inverse. All evaluation
//! happens in log space so that extreme parameter values stay finite; see
//! the per-family helpers for the factored forms.

use crate::error::{CopulaError, Result};
use crate::special::{
    bivariate_normal_cdf, clamp_unit, debye1, normal_cdf, normal_quantile,
};
use rand::Rng;

// h_inverse results may legitimately sit far below the data clamp (the
// Clayton truncation boundary pushes them toward zero), so they are only
// kept inside the open interval.
#[inline]
fn clamp_open(u: f64) -> f64 {
    u.clamp(f64::MIN_POSITIVE, 1.0 - 1e-16)
}

/// The supported bivariate families.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PairFamily {
    Independence,
    Gaussian,
    Frank,
    Clayton,
    Gumbel,
}

impl PairFamily {
    /// Parses the lowercase family names used in config files.
    pub fn parse(s: &str) -> Result<Self> {
        Ok(match s {
            "independence" => PairFamily::Independence,
            "gaussian" => PairFamily::Gaussian,
            "frank" => PairFamily::Frank,
            "clayton" => PairFamily::Clayton,
            "gumbel" => PairFamily::Gumbel,
            other => {
                return Err(CopulaError::domain(
                    "family",
                    format!("unknown pair family `{other}`"),
                ))
            }
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            PairFamily::Independence => "independence",
            PairFamily::Gaussian => "gaussian",
            PairFamily::Frank => "frank",
            PairFamily::Clayton => "clayton",
            PairFamily::Gumbel => "gumbel",
        }
    }

    /// Checks phi against the family's parameter domain.
    pub fn validate_phi(self, phi: f64) -> Result<()> {
        let ok = match self {
            PairFamily::Independence => true,
            PairFamily::Gaussian => phi.is_finite() && phi.abs() < 1.0,
            PairFamily::Frank => phi.is_finite() && phi != 0.0,
            PairFamily::Clayton => phi.is_finite() && phi > -1.0 && phi != 0.0,
            PairFamily::Gumbel => phi.is_finite() && phi >= 1.0,
        };
        if ok {
            Ok(())
        } else {
            Err(CopulaError::domain(
                "phi",
                format!("{phi} outside the {} domain", self.name()),
            ))
        }
    }

    /// Maps phi to the unconstrained working scale the samplers propose on.
    /// Gumbel uses log(phi - 1), Clayton log(1 + phi), Frank the identity.
    /// The Gaussian pair is driven through its correlation directly by the
    /// bounded random walk, so it keeps the identity here.
    pub fn working_from_phi(self, phi: f64) -> f64 {
        match self {
            PairFamily::Gumbel => (phi - 1.0).ln(),
            PairFamily::Clayton => phi.ln_1p(),
            _ => phi,
        }
    }

    /// Inverse of `working_from_phi`.
    pub fn phi_from_working(self, w: f64) -> f64 {
        match self {
            PairFamily::Gumbel => 1.0 + w.clamp(-700.0, 700.0).exp(),
            PairFamily::Clayton => w.clamp(-700.0, 700.0).exp_m1(),
            _ => w,
        }
    }
}

/// Closed-form dependence summary. `tau` is `None` for the Gaussian family,
/// whose rank correlation is reported through the simulation estimator
/// instead; both tail coefficients are zero there.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Dependence {
    pub tau: Option<f64>,
    pub lambda_low: f64,
    pub lambda_up: f64,
}

/// A bivariate copula with a fixed parameter.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PairCopula {
    family: PairFamily,
    phi: f64,
}

impl PairCopula {
    pub fn new(family: PairFamily, phi: f64) -> Result<Self> {
        family.validate_phi(phi)?;
        let phi = if family == PairFamily::Independence { 0.0 } else { phi };
        Ok(PairCopula { family, phi })
    }

    pub fn independence() -> Self {
        PairCopula { family: PairFamily::Independence, phi: 0.0 }
    }

    pub fn family(&self) -> PairFamily {
        self.family
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    /// C(u1, u2).
    pub fn cdf(&self, u1: f64, u2: f64) -> f64 {
        // Grounding and margin conditions hold exactly at the boundary.
        if u1 <= 0.0 || u2 <= 0.0 {
            return 0.0;
        }
        if u1 >= 1.0 {
            return u2.min(1.0);
        }
        if u2 >= 1.0 {
            return u1;
        }
        let p = self.phi;
        match self.family {
            PairFamily::Independence => u1 * u2,
            PairFamily::Gaussian => {
                bivariate_normal_cdf(normal_quantile(u1), normal_quantile(u2), p)
            }
            PairFamily::Frank => {
                if p > 0.0 {
                    frank_cdf_pos(p, u1, u2)
                } else {
                    // Reflection in the first argument flips the sign of the
                    // dependence: C(u1,u2; -p) = u2 - C(1-u1, u2; p).
                    u2 - frank_cdf_pos(-p, 1.0 - u1, u2)
                }
            }
            PairFamily::Clayton => match clayton_ln_s(p, u1, u2) {
                Some(ln_s) => (-ln_s / p).exp(),
                None => 0.0,
            },
            PairFamily::Gumbel => {
                let (ln_t, _, _) = gumbel_ln_t(p, u1, u2);
                (-(ln_t / p).exp()).exp()
            }
        }
    }

    /// log c(u1, u2). Returns -inf where the density vanishes (the Clayton
    /// truncation region for negative phi).
    pub fn log_density(&self, u1: f64, u2: f64) -> f64 {
        let u1 = clamp_unit(u1);
        let u2 = clamp_unit(u2);
        let p = self.phi;
        match self.family {
            PairFamily::Independence => 0.0,
            PairFamily::Gaussian => {
                let x1 = normal_quantile(u1);
                let x2 = normal_quantile(u2);
                let d = 1.0 - p * p;
                -0.5 * d.ln() - (p * p * (x1 * x1 + x2 * x2) - 2.0 * p * x1 * x2) / (2.0 * d)
            }
            PairFamily::Frank => {
                if p > 0.0 {
                    frank_log_density_pos(p, u1, u2)
                } else {
                    frank_log_density_pos(-p, 1.0 - u1, u2)
                }
            }
            PairFamily::Clayton => match clayton_ln_s(p, u1, u2) {
                Some(ln_s) => {
                    p.ln_1p() - (1.0 + p) * (u1.ln() + u2.ln()) - (1.0 / p + 2.0) * ln_s
                }
                None => f64::NEG_INFINITY,
            },
            PairFamily::Gumbel => {
                let (ln_t, l1, l2) = gumbel_ln_t(p, u1, u2);
                let t_inv_root = (-ln_t / p).exp();
                -(ln_t / p).exp() - u1.ln() - u2.ln()
                    + (2.0 / p - 2.0) * ln_t
                    + (p - 1.0) * (l1 + l2)
                    + ((p - 1.0) * t_inv_root).ln_1p()
            }
        }
    }

    /// Conditional CDF h(u1 | u2) = dC/du2.
    pub fn h_func(&self, u1: f64, u2: f64) -> f64 {
        if u1 <= 0.0 {
            return 0.0;
        }
        if u1 >= 1.0 {
            return 1.0;
        }
        let u2 = clamp_unit(u2);
        let p = self.phi;
        match self.family {
            PairFamily::Independence => u1,
            PairFamily::Gaussian => {
                let x1 = normal_quantile(u1);
                let x2 = normal_quantile(u2);
                normal_cdf((x1 - p * x2) / (1.0 - p * p).sqrt())
            }
            PairFamily::Frank => {
                if p > 0.0 {
                    frank_h_pos(p, u1, u2)
                } else {
                    1.0 - frank_h_pos(-p, 1.0 - u1, u2)
                }
            }
            PairFamily::Clayton => match clayton_ln_s(p, u1, u2) {
                Some(ln_s) => {
                    ((-p - 1.0) * u2.ln() + (-1.0 / p - 1.0) * ln_s).exp().clamp(0.0, 1.0)
                }
                None => 0.0,
            },
            PairFamily::Gumbel => {
                let (ln_t, _, l2) = gumbel_ln_t(p, u1, u2);
                let ln_h =
                    -(ln_t / p).exp() + (1.0 / p - 1.0) * ln_t + (p - 1.0) * l2 - u2.ln();
                ln_h.exp().clamp(0.0, 1.0)
            }
        }
    }

    /// Inverse of `h_func` in its first argument: returns u1 with
    /// h(u1 | u2) = q. Closed forms everywhere except Gumbel, which uses a
    /// bracketed Newton iteration with bisection fallback.
    pub fn h_inverse(&self, q: f64, u2: f64) -> f64 {
        let q = clamp_unit(q);
        let u2 = clamp_unit(u2);
        let p = self.phi;
        match self.family {
            PairFamily::Independence => q,
            PairFamily::Gaussian => {
                let x2 = normal_quantile(u2);
                clamp_open(normal_cdf(normal_quantile(q) * (1.0 - p * p).sqrt() + p * x2))
            }
            PairFamily::Frank => {
                if p > 0.0 {
                    frank_h_inverse_pos(p, q, u2)
                } else {
                    clamp_open(1.0 - frank_h_inverse_pos(-p, 1.0 - q, u2))
                }
            }
            PairFamily::Clayton => clayton_h_inverse(p, q, u2),
            PairFamily::Gumbel => self.invert_h_bracketed(q, u2),
        }
    }

    // Monotone solve of h(u1 | u2) = q: Newton steps using the density as
    // the derivative, falling back to bisection whenever a step leaves the
    // current bracket.
    fn invert_h_bracketed(&self, q: f64, u2: f64) -> f64 {
        let mut lo = 1e-15;
        let mut hi = 1.0 - 1e-15;
        let mut u1 = q;
        for _ in 0..200 {
            let h = self.h_func(u1, u2);
            let resid = h - q;
            if resid.abs() < 1e-12 {
                return u1;
            }
            if resid > 0.0 {
                hi = u1;
            } else {
                lo = u1;
            }
            let deriv = self.log_density(u1, u2).exp();
            let step = if deriv > 1e-280 { resid / deriv } else { f64::NAN };
            let cand = u1 - step;
            u1 = if cand.is_finite() && cand > lo && cand < hi {
                cand
            } else {
                0.5 * (lo + hi)
            };
            if hi - lo < 1e-16 {
                break;
            }
        }
        u1
    }

    /// Kendall's tau and the tail-dependence coefficients, where closed
    /// forms exist.
    pub fn dependence(&self) -> Dependence {
        let p = self.phi;
        match self.family {
            PairFamily::Independence => Dependence { tau: Some(0.0), lambda_low: 0.0, lambda_up: 0.0 },
            PairFamily::Gaussian => Dependence { tau: None, lambda_low: 0.0, lambda_up: 0.0 },
            PairFamily::Frank => Dependence {
                tau: Some(1.0 + 4.0 * (debye1(p) - 1.0) / p),
                lambda_low: 0.0,
                lambda_up: 0.0,
            },
            PairFamily::Clayton => Dependence {
                tau: Some(p / (p + 2.0)),
                lambda_low: if p > 0.0 { (-1.0 / p).exp2() } else { 0.0 },
                lambda_up: 0.0,
            },
            PairFamily::Gumbel => Dependence {
                tau: Some(1.0 - 1.0 / p),
                lambda_low: 0.0,
                lambda_up: 2.0 - (1.0 / p).exp2(),
            },
        }
    }

    /// Draws one pair by conditional inversion: u2 uniform, then
    /// u1 = h_inverse(q, u2) for an independent uniform q.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> (f64, f64) {
        let u2 = clamp_unit(rng.gen::<f64>());
        let q = clamp_unit(rng.gen::<f64>());
        (self.h_inverse(q, u2), u2)
    }
}

// ---- Frank, phi > 0 ----
//
// With a = phi u1, b = phi u2, the density denominator expands exactly to
//   D = e^{-a} + e^{-b} - e^{-(a+b)} - e^{-phi},
// and factoring e^{-min(a,b)} keeps every exponent nonpositive, so nothing
// underflows before the logarithm is taken.

fn frank_parts_pos(phi: f64, u1: f64, u2: f64) -> (f64, f64) {
    let a = phi * u1;
    let b = phi * u2;
    let m = a.min(b);
    let bracket =
        (-(a - m)).exp() + (-(b - m)).exp() - (-(a + b - m)).exp() - (-(phi - m)).exp();
    (m, bracket.max(f64::MIN_POSITIVE))
}

fn frank_log_density_pos(phi: f64, u1: f64, u2: f64) -> f64 {
    let (m, bracket) = frank_parts_pos(phi, u1, u2);
    let ln_d = -m + bracket.ln();
    let ln_g = (-(-phi).exp_m1()).ln();
    phi.ln() + ln_g - phi * (u1 + u2) - 2.0 * ln_d
}

fn frank_cdf_pos(phi: f64, u1: f64, u2: f64) -> f64 {
    let (m, bracket) = frank_parts_pos(phi, u1, u2);
    let ln_d = -m + bracket.ln();
    let ln_g = (-(-phi).exp_m1()).ln();
    // C = -(1/phi) ln((G - xy)/G) and G - xy = D.
    (-(ln_d - ln_g) / phi).max(0.0)
}

fn frank_h_pos(phi: f64, u1: f64, u2: f64) -> f64 {
    let a = phi * u1;
    let b = phi * u2;
    let (m, bracket) = frank_parts_pos(phi, u1, u2);
    let x = -(-a).exp_m1();
    (x * (-(b - m)).exp() / bracket).clamp(0.0, 1.0)
}

fn frank_h_inverse_pos(phi: f64, q: f64, u2: f64) -> f64 {
    let b = phi * u2;
    // u1 = -(1/phi) [ln(w(1-q) + q e^{-phi}) - ln(w(1-q) + q)], w = e^{-b};
    // the numerator is factored by e^{-b} so it survives large phi.
    let ln_num = -b + ((1.0 - q) + q * (-(phi - b)).exp()).ln();
    let ln_den = (q + (-b).exp() * (1.0 - q)).ln();
    clamp_open(-(ln_num - ln_den) / phi)
}

// ---- Clayton ----

// ln S for S = u1^{-phi} + u2^{-phi} - 1, or None where the negative-phi
// truncation sets S <= 0. For phi > 0 the exponents are factored by their
// maximum so large phi cannot overflow.
fn clayton_ln_s(phi: f64, u1: f64, u2: f64) -> Option<f64> {
    let a = -phi * u1.ln();
    let b = -phi * u2.ln();
    if phi > 0.0 {
        let m = a.max(b);
        let bracket = (a - m).exp() + (b - m).exp() - (-m).exp();
        Some(m + bracket.ln())
    } else {
        let s = a.exp() + b.exp() - 1.0;
        if s > 0.0 {
            Some(s.ln())
        } else {
            None
        }
    }
}

fn clayton_h_inverse(phi: f64, q: f64, u2: f64) -> f64 {
    // Inverting q = u2^{-phi-1} S^{-(1+phi)/phi} gives
    //   u1^{-phi} = w (q^{-phi/(1+phi)} - 1) + 1,  w = u2^{-phi},
    // which needs the log of w*r + 1 without forming the huge w directly.
    let ln_w = -phi * u2.ln();
    let r = (-phi / (1.0 + phi) * q.ln()).exp_m1();
    if phi > 0.0 {
        let s = ln_w + r.ln();
        let ln_t = if s > 700.0 { s + (-s).exp().ln_1p() } else { (ln_w.exp() * r).ln_1p() };
        clamp_open((-ln_t / phi).exp())
    } else {
        // Here w in (0,1) and r <= 0, so everything is small and direct.
        let t = (ln_w.exp() * r + 1.0).max(f64::MIN_POSITIVE);
        clamp_open((-t.ln() / phi).exp())
    }
}

// ---- Gumbel ----

// Returns (ln T, ln w1, ln w2) with w_k = -ln u_k and T = w1^phi + w2^phi,
// evaluated by log-sum-exp so large phi stays finite.
fn gumbel_ln_t(phi: f64, u1: f64, u2: f64) -> (f64, f64, f64) {
    let l1 = (-u1.ln()).ln();
    let l2 = (-u2.ln()).ln();
    let e1 = phi * l1;
    let e2 = phi * l2;
    let m = e1.max(e2);
    let ln_t = m + ((e1 - m).exp() + (e2 - m).exp()).ln();
    (ln_t, l1, l2)
}
