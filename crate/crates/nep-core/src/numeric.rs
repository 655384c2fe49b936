//! Scalar numerics shared by the rate-function and bound machinery:
//! compensated summation, the standard normal upper tail Q and its inverse,
//! log-domain Q for large arguments, and a few stable elementary maps.

use crate::error::{Error, Result};

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_74;

/// Neumaier-compensated accumulator. All moment sums in the crate go
/// through this so that closed-form comparisons hold to ~1e-12.
#[derive(Debug, Clone, Copy, Default)]
pub struct KahanSum {
    sum: f64,
    comp: f64,
}

impl KahanSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Compensated sum of an iterator.
pub fn kahan_sum<I: IntoIterator<Item = f64>>(it: I) -> f64 {
    let mut acc = KahanSum::new();
    for x in it {
        acc.add(x);
    }
    acc.value()
}

/// ln(1 + e^x) without overflow for large |x|.
#[inline]
pub fn softplus(x: f64) -> f64 {
    if x > 0.0 {
        x + (-x).exp().ln_1p()
    } else {
        x.exp().ln_1p()
    }
}

/// Standard normal upper tail Q(t) = (1/sqrt(2 pi)) \int_t^inf e^{-u^2/2} du.
#[inline]
pub fn q_function(t: f64) -> f64 {
    0.5 * libm::erfc(t / std::f64::consts::SQRT_2)
}

/// Standard normal density.
#[inline]
pub fn normal_pdf(t: f64) -> f64 {
    (-0.5 * t * t).exp() * (-LN_SQRT_2PI).exp()
}

/// Mills-ratio continued fraction: Q(t) = phi(t) / cf(t) with
/// cf(t) = t + 1/(t + 2/(t + 3/(...))). Accurate to machine precision
/// for t >= 8 with the fixed depth below.
fn mills_cf(t: f64) -> f64 {
    let mut g = t;
    for k in (1..=64u32).rev() {
        g = t + f64::from(k) / g;
    }
    g
}

/// ln Q(t), valid over the whole real line. erfc underflows near t ~ 37.5,
/// so large arguments switch to the continued fraction.
pub fn ln_q(t: f64) -> f64 {
    if t >= 8.0 {
        -0.5 * t * t - LN_SQRT_2PI - mills_cf(t).ln()
    } else if t <= -1.0 {
        // Q(t) = 1 - Q(-t); keep precision as Q -> 1.
        (-q_function(-t)).ln_1p()
    } else {
        q_function(t).ln()
    }
}

/// e^{a^2/2} Q(a), evaluated in the log domain so it never overflows.
#[inline]
pub fn exp_half_sq_q(a: f64) -> f64 {
    (0.5 * a * a + ln_q(a)).exp()
}

/// e^{a^2/2} [Q(a) - Q(a + c)] for c >= 0. The difference is routed through
/// expm1 of ln Q so that small c does not cancel.
pub fn scaled_q_gap(a: f64, c: f64) -> f64 {
    if c <= 0.0 {
        return 0.0;
    }
    let d = ln_q(a + c) - ln_q(a);
    exp_half_sq_q(a) * (-d.exp_m1())
}

// Acklam's rational approximation to the normal quantile; ~1e-9 relative,
// used only as the Newton starting point.
const ACKLAM_A: [f64; 6] = [
    -3.969_683_028_665_376e1,
    2.209_460_984_245_205e2,
    -2.759_285_104_469_687e2,
    1.383_577_518_672_69e2,
    -3.066_479_806_614_716e1,
    2.506_628_277_459_239,
];
const ACKLAM_B: [f64; 5] = [
    -5.447_609_879_822_406e1,
    1.615_858_368_580_409e2,
    -1.556_989_798_598_866e2,
    6.680_131_188_771_972e1,
    -1.328_068_155_288_572e1,
];
const ACKLAM_C: [f64; 6] = [
    -7.784_894_002_430_293e-3,
    -3.223_964_580_411_365e-1,
    -2.400_758_277_161_838,
    -2.549_732_539_343_734,
    4.374_664_141_464_968,
    2.938_163_982_698_783,
];
const ACKLAM_D: [f64; 4] = [
    7.784_695_709_041_462e-3,
    3.224_671_290_700_398e-1,
    2.445_134_137_142_996,
    3.754_408_661_907_416,
];

fn acklam_quantile(p: f64) -> f64 {
    const P_LOW: f64 = 0.02425;
    if p < P_LOW {
        let q = (-2.0 * p.ln()).sqrt();
        (((((ACKLAM_C[0] * q + ACKLAM_C[1]) * q + ACKLAM_C[2]) * q + ACKLAM_C[3]) * q
            + ACKLAM_C[4])
            * q
            + ACKLAM_C[5])
            / ((((ACKLAM_D[0] * q + ACKLAM_D[1]) * q + ACKLAM_D[2]) * q + ACKLAM_D[3]) * q + 1.0)
    } else if p <= 1.0 - P_LOW {
        let q = p - 0.5;
        let r = q * q;
        (((((ACKLAM_A[0] * r + ACKLAM_A[1]) * r + ACKLAM_A[2]) * r + ACKLAM_A[3]) * r
            + ACKLAM_A[4])
            * r
            + ACKLAM_A[5])
            * q
            / (((((ACKLAM_B[0] * r + ACKLAM_B[1]) * r + ACKLAM_B[2]) * r + ACKLAM_B[3]) * r
                + ACKLAM_B[4])
                * r
                + 1.0)
    } else {
        -acklam_quantile(1.0 - p)
    }
}

/// Inverse of `q_function` on (0, 1): safeguarded Newton on ln Q in the
/// hazard form, so it stays stable out to |t| ~ 38 where phi underflows.
pub fn q_inverse(p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::Domain(format!(
            "q_inverse requires p in (0,1), got {p}"
        )));
    }
    if p == 0.5 {
        return Ok(0.0);
    }
    if p > 0.5 {
        return Ok(-q_inverse(1.0 - p)?);
    }
    // Q is decreasing; Q^{-1}(p) >= 0 for p <= 0.5.
    let ln_p = p.ln();
    let mut t = (-acklam_quantile(p)).max(0.0);
    for _ in 0..6 {
        let g = ln_q(t) - ln_p;
        // hazard phi/Q = exp(ln phi - ln Q); d/dt ln Q = -hazard
        let hazard = (-0.5 * t * t - LN_SQRT_2PI - ln_q(t)).exp();
        let step = g / hazard;
        let next = (t + step).max(0.0);
        if (next - t).abs() <= 1e-15 * (1.0 + t.abs()) {
            t = next;
            break;
        }
        t = next;
    }
    Ok(t)
}

/// Table of ln(k!) for k = 0..=n, built by compensated accumulation of ln k.
pub fn ln_factorial_table(n: usize) -> Vec<f64> {
    let mut table = Vec::with_capacity(n + 1);
    let mut acc = KahanSum::new();
    table.push(0.0);
    for k in 1..=n {
        acc.add((k as f64).ln());
        table.push(acc.value());
    }
    table
}

/// Wilson 95% score interval for a binomial proportion.
pub fn wilson_interval(successes: u64, samples: u64, z: f64) -> (f64, f64) {
    let n = samples as f64;
    let phat = successes as f64 / n;
    let z2 = z * z;
    let den = 1.0 + z2 / n;
    let center = (phat + z2 / (2.0 * n)) / den;
    let half = z * (phat * (1.0 - phat) / n + z2 / (4.0 * n * n)).sqrt() / den;
    (
        (center - half).clamp(0.0, 1.0),
        (center + half).clamp(0.0, 1.0),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn q_basics() {
        assert_eq!(q_function(0.0), 0.5);
        assert!((q_function(1.959964) - 0.024999999096).abs() < 1e-11);
        assert_eq!(q_inverse(0.5).unwrap(), 0.0);
        assert!((q_inverse(0.025).unwrap() - 1.959963984540054).abs() < 1e-11);
    }

    #[test]
    fn q_round_trip() {
        for &p in &[1e-300, 1e-50, 1e-9, 0.025, 0.3, 0.5, 0.7, 0.975, 1.0 - 1e-9] {
            let t = q_inverse(p).unwrap();
            assert!(
                (q_function(t) - p).abs() <= 1e-12,
                "round trip failed at p={p}: q(q_inv)={}",
                q_function(t)
            );
        }
    }

    #[test]
    fn ln_q_matches_direct_and_is_continuous_at_switch() {
        for &t in &[-5.0, -1.0, 0.0, 1.0, 5.0, 7.9] {
            assert!((ln_q(t) - q_function(t).ln()).abs() < 1e-13);
        }
        assert!((ln_q(8.0 - 1e-12) - ln_q(8.0)).abs() < 1e-9);
        // deep tail: compare against the asymptotic leading term
        let t = 40.0;
        let lead = -0.5 * t * t - LN_SQRT_2PI - t.ln();
        assert!((ln_q(t) - lead).abs() < 1e-3);
    }

    #[test]
    fn scaled_gap_small_c_no_cancellation() {
        // reference by direct difference where it is safe
        let a = 2.0;
        let c = 1e-8;
        let direct = (0.5 * a * a as f64).exp() * (q_function(a) - q_function(a + c));
        let got = scaled_q_gap(a, c);
        assert!((got / direct - 1.0).abs() < 1e-6);
        // large a must not overflow
        assert!(scaled_q_gap(60.0, 3.0).is_finite());
        assert!(exp_half_sq_q(200.0).is_finite());
    }

    #[test]
    fn q_inverse_domain_errors() {
        assert!(q_inverse(0.0).is_err());
        assert!(q_inverse(1.0).is_err());
        assert!(q_inverse(-0.1).is_err());
    }

    #[test]
    fn ln_factorials() {
        let t = ln_factorial_table(10);
        assert_eq!(t[0], 0.0);
        assert!((t[10] - (3628800.0f64).ln()).abs() < 1e-10);
    }

    #[test]
    fn softplus_stable() {
        assert!((softplus(0.0) - std::f64::consts::LN_2).abs() < 1e-15);
        assert_eq!(softplus(-800.0), 0.0);
        assert!((softplus(800.0) - 800.0).abs() < 1e-12);
    }
}
