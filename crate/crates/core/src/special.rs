//! Scalar special functions.
//!
//! Every piece of copula code routes through the single normal CDF/quantile
//! pair defined here, so the same numbers appear everywhere a margin or a
//! copula touches the normal distribution. The CDF uses the Hart/West
//! rational approximation (absolute error well below 1e-15); the quantile is
//! Acklam's rational approximation polished with one Newton step against this
//! CDF, which leaves it accurate to around 1e-14 in the central region.

use crate::linalg::Matrix;

/// 1/sqrt(2 pi).
pub const INV_SQRT_2PI: f64 = 0.398_942_280_401_432_7;
/// sqrt(2 pi).
pub const SQRT_2PI: f64 = 2.506_628_274_631_000_2;
/// ln(2 pi).
pub const LN_2PI: f64 = 1.837_877_066_409_345_6;

/// Copula data is clamped into [U_EPS, 1 - U_EPS] before any quantile or
/// log call, keeping normal scores within about +/-7.03.
pub const U_EPS: f64 = 1e-12;

/// Clamps a uniform value into the open interval used by the copula code.
#[inline]
pub fn clamp_unit(u: f64) -> f64 {
    u.clamp(U_EPS, 1.0 - U_EPS)
}

/// Standard normal density.
#[inline]
pub fn normal_pdf(x: f64) -> f64 {
    INV_SQRT_2PI * (-0.5 * x * x).exp()
}

/// Standard normal CDF. Hart rational approximation in the body, a short
/// continued fraction in the far tail; both branches are monotone and
/// accurate to full double precision for the absolute error.
pub fn normal_cdf(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    let z = x.abs();
    let p = if z > 38.5 {
        0.0
    } else {
        let e = (-z * z / 2.0).exp();
        if z < 7.071_067_811_865_475 {
            const NUM: [f64; 7] = [
                3.526_249_659_989_109e-2,
                0.700_383_064_443_688,
                6.373_962_203_531_65,
                33.912_866_078_383,
                112.079_291_497_871,
                221.213_596_169_931,
                220.206_867_912_376,
            ];
            const DEN: [f64; 8] = [
                8.838_834_764_831_84e-2,
                1.755_667_163_182_64,
                16.064_177_579_207,
                86.780_732_202_946_1,
                296.564_248_779_674,
                637.333_633_378_831,
                793.826_512_519_948,
                440.413_735_824_752,
            ];
            let n = NUM.iter().skip(1).fold(NUM[0], |acc, c| acc * z + c);
            let d = DEN.iter().skip(1).fold(DEN[0], |acc, c| acc * z + c);
            e * n / d
        } else {
            let f = z + 1.0 / (z + 2.0 / (z + 3.0 / (z + 4.0 / (z + 0.65))));
            e / (SQRT_2PI * f)
        }
    };
    if x > 0.0 {
        1.0 - p
    } else {
        p
    }
}

/// Stable Phi(b) - Phi(a) for a <= b. Both endpoints are evaluated in the
/// half-line where the CDF keeps relative accuracy, so narrow far-tail
/// intervals do not cancel to zero.
pub fn normal_interval_prob(a: f64, b: f64) -> f64 {
    debug_assert!(!(a > b), "interval endpoints out of order");
    let p = if a > 0.0 {
        normal_cdf(-a) - normal_cdf(-b)
    } else {
        normal_cdf(b) - normal_cdf(a)
    };
    p.max(0.0)
}

/// Standard normal quantile. Returns -inf at 0 and +inf at 1; NaN outside
/// [0, 1]. Acklam's rational approximation plus one Newton refinement.
pub fn normal_quantile(p: f64) -> f64 {
    if p.is_nan() || !(0.0..=1.0).contains(&p) {
        return f64::NAN;
    }
    if p == 0.0 {
        return f64::NEG_INFINITY;
    }
    if p == 1.0 {
        return f64::INFINITY;
    }

    const A: [f64; 6] = [
        -3.969_683_028_665_376e1,
        2.209_460_984_245_205e2,
        -2.759_285_104_469_687e2,
        1.383_577_518_672_69e2,
        -3.066_479_806_614_716e1,
        2.506_628_277_459_239,
    ];
    const B: [f64; 5] = [
        -5.447_609_879_822_406e1,
        1.615_858_368_580_409e2,
        -1.556_989_798_598_866e2,
        6.680_131_188_771_972e1,
        -1.328_068_155_288_572e1,
    ];
    const C: [f64; 6] = [
        -7.784_894_002_430_293e-3,
        -3.223_964_580_411_365e-1,
        -2.400_758_277_161_838,
        -2.549_732_539_343_734,
        4.374_664_141_464_968,
        2.938_163_982_698_783,
    ];
    const D: [f64; 4] = [
        7.784_695_709_041_462e-3,
        3.224_671_290_700_398e-1,
        2.445_134_137_142_996,
        3.754_408_661_907_416,
    ];
    const P_LOW: f64 = 0.02425;

    let x = if p < P_LOW {
        let q = (-2.0 * p.ln()).sqrt();
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    } else if p <= 1.0 - P_LOW {
        let q = p - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    } else {
        let q = (-2.0 * (1.0 - p).ln()).sqrt();
        -((((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0))
    };

    // Refinement against the accurate CDF. Centrally a plain Newton step is
    // enough; in the far tails Newton runs on the log-CDF, which stays
    // conditioned all the way to the smallest representable probabilities.
    if (P_LOW..=1.0 - P_LOW).contains(&p) {
        let mut x = x;
        for _ in 0..2 {
            let err = if p < 0.5 {
                normal_cdf(x) - p
            } else {
                (1.0 - p) - normal_cdf(-x)
            };
            x -= err / normal_pdf(x);
        }
        x
    } else {
        // Solve Phi(-z) = q on the side where q is representable; note
        // 1 - p is exact for p >= 0.5.
        let (mut z, q) = if p < 0.5 { (-x, p) } else { (x, 1.0 - p) };
        let ln_q = q.ln();
        for _ in 0..3 {
            let c = normal_cdf(-z);
            if c <= 0.0 {
                break;
            }
            z += (c.ln() - ln_q) * c / normal_pdf(z);
        }
        if p < 0.5 {
            -z
        } else {
            z
        }
    }
}

// Gauss-Legendre nodes on (0, 1] stored as (weight, node) pairs for the
// positive half; the negative half mirrors them. Standard 6/12/20 point
// rules, the same tables Genz's bivariate-normal quadrature uses.
const GL6: [(f64, f64); 3] = [
    (0.171_324_492_379_170_4, 0.932_469_514_203_152_1),
    (0.360_761_573_048_138_6, 0.661_209_386_466_264_5),
    (0.467_913_934_572_691, 0.238_619_186_083_196_9),
];
const GL12: [(f64, f64); 6] = [
    (0.047_175_336_386_511_83, 0.981_560_634_246_719_1),
    (0.106_939_325_995_318_4, 0.904_117_256_370_475),
    (0.160_078_328_543_346_4, 0.769_902_674_194_305),
    (0.203_167_426_723_065_9, 0.587_317_954_286_617_1),
    (0.233_492_536_538_354_7, 0.367_831_498_998_180_2),
    (0.249_147_045_813_402_9, 0.125_233_408_511_468_9),
];
const GL20: [(f64, f64); 10] = [
    (0.017_614_007_139_152_12, 0.993_128_599_185_094_9),
    (0.040_601_429_800_386_94, 0.963_971_927_277_913_8),
    (0.062_672_048_334_109_06, 0.912_234_428_251_325_9),
    (0.083_276_741_576_704_75, 0.839_116_971_822_218_8),
    (0.101_930_119_817_240_4, 0.746_331_906_460_150_8),
    (0.118_194_531_961_518_4, 0.636_053_680_726_515),
    (0.131_688_638_449_176_6, 0.510_867_001_950_827_1),
    (0.142_096_109_318_382_1, 0.373_706_088_715_419_6),
    (0.149_172_986_472_603_7, 0.227_785_851_141_645_1),
    (0.152_753_387_130_725_9, 0.076_526_521_133_497_33),
];

/// 20-point Gauss-Legendre quadrature of `f` over [a, b].
pub fn gauss_legendre_20<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> f64 {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut s = 0.0;
    for &(w, x) in GL20.iter() {
        s += w * (f(c - h * x) + f(c + h * x));
    }
    s * h
}

/// Panelled 20-point Gauss-Legendre quadrature: the interval is split into
/// panels no wider than `max_width`, which is enough to push smooth
/// integrands to full double accuracy.
pub fn integrate_panels<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, max_width: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    let span = (b - a).abs();
    let n = (span / max_width).ceil().max(1.0) as usize;
    let step = (b - a) / n as f64;
    let mut total = 0.0;
    for i in 0..n {
        let lo = a + step * i as f64;
        let hi = if i + 1 == n { b } else { a + step * (i + 1) as f64 };
        total += gauss_legendre_20(f, lo, hi);
    }
    total
}

/// First Debye function D1(x) = (1/x) * integral_0^x t/(e^t - 1) dt, defined
/// by continuity as 1 at x = 0. Valid for negative arguments as well.
pub fn debye1(x: f64) -> f64 {
    if x == 0.0 {
        return 1.0;
    }
    // Beyond |x| = 50 the tail of the integrand is below 1e-20, so the
    // complete integral pi^2/6 (plus the reflection term for negative x)
    // is exact to double precision and saves a long quadrature sweep.
    if x >= 50.0 {
        return std::f64::consts::PI.powi(2) / (6.0 * x);
    }
    if x <= -50.0 {
        return std::f64::consts::PI.powi(2) / (-6.0 * x) - x / 2.0;
    }
    // The integrand t/(e^t - 1) is smooth once written via expm1; a short
    // series takes over where even expm1 loses digits.
    let g = |t: f64| {
        if t.abs() < 1e-8 {
            1.0 - t / 2.0 + t * t / 12.0
        } else {
            t / t.exp_m1()
        }
    };
    integrate_panels(&g, 0.0, x, 1.0) / x
}

/// P(X > dh, Y > dk) for standard bivariate normal with correlation r.
/// Genz's quadrature scheme: direct Gauss-Legendre on the arcsine identity
/// for moderate correlation, and the singularity-subtracted form near
/// |r| = 1. Absolute accuracy around 5e-16.
fn bvnd(dh: f64, dk: f64, r: f64) -> f64 {
    let gl: &[(f64, f64)] = if r.abs() < 0.3 {
        &GL6
    } else if r.abs() < 0.75 {
        &GL12
    } else {
        &GL20
    };

    let h = dh;
    let mut k = dk;
    let mut hk = h * k;
    let mut bvn = 0.0;

    if r.abs() < 0.925 {
        if r.abs() > 0.0 {
            let hs = (h * h + k * k) / 2.0;
            let asr = r.asin();
            for &(w, x) in gl {
                for sign in [-1.0, 1.0] {
                    let sn = (asr * (sign * x + 1.0) / 2.0).sin();
                    bvn += w * ((sn * hk - hs) / (1.0 - sn * sn)).exp();
                }
            }
            bvn = bvn * asr / (4.0 * std::f64::consts::PI);
        }
        bvn + normal_cdf(-h) * normal_cdf(-k)
    } else {
        if r < 0.0 {
            k = -k;
            hk = -hk;
        }
        if r.abs() < 1.0 {
            let a_s = (1.0 - r) * (1.0 + r);
            let a = a_s.sqrt();
            let bs = (h - k) * (h - k);
            let c = (4.0 - hk) / 8.0;
            let d = (12.0 - hk) / 16.0;
            let asr = -(bs / a_s + hk) / 2.0;
            if asr > -100.0 {
                bvn = a * asr.exp() * (1.0 - c * (bs - a_s) * (1.0 - d * bs / 5.0) / 3.0
                    + c * d * a_s * a_s / 5.0);
            }
            if -hk < 100.0 {
                let b = bs.sqrt();
                let sp = SQRT_2PI * normal_cdf(-b / a);
                bvn -= (-hk / 2.0).exp() * sp * b * (1.0 - c * bs * (1.0 - d * bs / 5.0) / 3.0);
            }
            let half_a = a / 2.0;
            for &(w, x) in gl {
                for sign in [-1.0, 1.0] {
                    let xs = (half_a * (sign * x + 1.0)) * (half_a * (sign * x + 1.0));
                    let rs = (1.0 - xs).sqrt();
                    let asr2 = -(bs / xs + hk) / 2.0;
                    if asr2 > -100.0 {
                        let sp = 1.0 + c * xs * (1.0 + d * xs);
                        let ep = (-hk * (1.0 - rs) / (2.0 * (1.0 + rs))).exp() / rs;
                        bvn += half_a * w * asr2.exp() * (ep - sp);
                    }
                }
            }
            bvn = -bvn / (2.0 * std::f64::consts::PI);
        }
        if r > 0.0 {
            bvn + normal_cdf(-h.max(k))
        } else {
            bvn = -bvn;
            if k > h {
                bvn += normal_cdf(k) - normal_cdf(h);
            }
            bvn
        }
    }
}

/// P(X <= x, Y <= y) for standard bivariate normal with correlation rho.
pub fn bivariate_normal_cdf(x: f64, y: f64, rho: f64) -> f64 {
    debug_assert!((-1.0..=1.0).contains(&rho), "correlation out of range");
    if x == f64::NEG_INFINITY || y == f64::NEG_INFINITY {
        return 0.0;
    }
    if x == f64::INFINITY {
        return normal_cdf(y);
    }
    if y == f64::INFINITY {
        return normal_cdf(x);
    }
    if rho >= 1.0 {
        return normal_cdf(x.min(y));
    }
    if rho <= -1.0 {
        // P(X<=x, -X<=y) = max(0, Phi(x) - Phi(-y)).
        return (normal_cdf(x) - normal_cdf(-y)).max(0.0);
    }
    bvnd(-x, -y, rho).clamp(0.0, 1.0)
}

// Integration endpoint beyond which a coordinate is treated as certain:
// Phi(-8.5) is below 1e-17, well under the accuracy target.
const MVN_CUTOFF: f64 = 8.5;

/// P(X_i <= x_i for all i) for a standard multivariate normal with
/// correlation matrix `corr`. Exact closed forms for m <= 2; for larger m the
/// last coordinate is integrated out by panelled quadrature against the
/// conditional (m-1)-dimensional CDF. Cost grows geometrically with m, so
/// this is meant for the small m where discrete-margin likelihoods live.
pub fn multivariate_normal_cdf(x: &[f64], corr: &Matrix) -> f64 {
    let m = x.len();
    assert_eq!(corr.dim(), m, "dimension mismatch");
    match m {
        0 => 1.0,
        1 => normal_cdf(x[0]),
        2 => bivariate_normal_cdf(x[0], x[1], corr.get(0, 1)),
        _ => {
            if let Some(i) = (0..m).find(|&i| x[i] >= MVN_CUTOFF) {
                // The coordinate contributes probability ~1: drop it.
                let (xr, cr) = drop_coordinate(x, corr, i);
                return multivariate_normal_cdf(&xr, &cr);
            }
            let last = m - 1;
            if x[last] <= -MVN_CUTOFF {
                return 0.0;
            }
            // Condition on the last coordinate.
            let mut rho = vec![0.0; last];
            let mut s = vec![0.0; last];
            for i in 0..last {
                rho[i] = corr.get(i, last);
                s[i] = (1.0 - rho[i] * rho[i]).max(0.0).sqrt();
            }
            let mut cond = Matrix::identity(last);
            for i in 0..last {
                for j in 0..i {
                    let denom = s[i] * s[j];
                    let v = if denom < 1e-14 {
                        0.0
                    } else {
                        ((corr.get(i, j) - rho[i] * rho[j]) / denom).clamp(-1.0, 1.0)
                    };
                    cond.set(i, j, v);
                    cond.set(j, i, v);
                }
            }
            let f = |z: f64| {
                let mut args = Vec::with_capacity(last);
                for i in 0..last {
                    let a = if s[i] < 1e-14 {
                        if x[i] - rho[i] * z >= 0.0 { f64::INFINITY } else { f64::NEG_INFINITY }
                    } else {
                        (x[i] - rho[i] * z) / s[i]
                    };
                    args.push(a);
                }
                normal_pdf(z) * multivariate_normal_cdf(&args, &cond)
            };
            integrate_panels(&f, -MVN_CUTOFF, x[last].min(MVN_CUTOFF), 0.5).clamp(0.0, 1.0)
        }
    }
}

fn drop_coordinate(x: &[f64], corr: &Matrix, drop: usize) -> (Vec<f64>, Matrix) {
    let m = x.len();
    let keep: Vec<usize> = (0..m).filter(|&i| i != drop).collect();
    let xr: Vec<f64> = keep.iter().map(|&i| x[i]).collect();
    let mut cr = Matrix::identity(keep.len());
    for (a, &i) in keep.iter().enumerate() {
        for (b, &j) in keep.iter().enumerate() {
            cr.set(a, b, corr.get(i, j));
        }
    }
    (xr, cr)
}

/// ln of the binomial coefficient C(n, k).
pub fn ln_choose(n: u64, k: u64) -> f64 {
    assert!(k <= n, "k exceeds n");
    use statrs::function::gamma::ln_gamma;
    ln_gamma(n as f64 + 1.0) - ln_gamma(k as f64 + 1.0) - ln_gamma((n - k) as f64 + 1.0)
}
