//! Two-sided tail bounds on the information spectrum.
//!
//! For an IID average V-bar of n per-letter values with rate function r and
//! tilt lambda = r'(delta), the tail Pr{ V-bar > mean + delta } is
//! sandwiched as
//!
//! ```text
//! xi_lower(lambda, n) e^{-n r(delta)}  <=  Pr  <=  xi_upper(lambda, n) e^{-n r(delta)}
//! ```
//!
//! with Berry-Esseen prefactors
//!
//! ```text
//! xi_upper = 2 C M / (sqrt(n) s^3)
//!          + e^{n l^2 s^2 / 2} [Q(sqrt(n) l s) - Q(rho* + sqrt(n) l s)]
//! xi_lower = e^{n l^2 s^2 / 2} Q(rho_* + sqrt(n) l s)
//! Q(rho*)  = C M / (sqrt(n) s^3)
//! Q(rho_*) = 1/2 - 2 C M / (sqrt(n) s^3)
//! ```
//!
//! where s^2 and M are the lambda-tilted variance and third absolute central
//! moment. Lower tails go through the negated spectrum. The weak (pure
//! Chernoff) bound, the CLT window around the mean, and a recursive
//! tightening of the prefactor integral complete the set.

use crate::error::{Error, Result};
use crate::numeric::{ln_q, q_function, q_inverse, scaled_q_gap};
use crate::spectrum::{CompositeSpectrum, RatePoint, Side};

/// Default Berry-Esseen constant. The theorems hold for any valid universal
/// constant; 0.56 is a published value covering sums of independent, not
/// necessarily identical, summands. All xi values scale with this choice.
pub const DEFAULT_BERRY_ESSEEN: f64 = 0.56;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Weak,
    Strong,
    CltWindow,
    Tightened,
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Method::Weak => write!(f, "weak"),
            Method::Strong => write!(f, "strong"),
            Method::CltWindow => write!(f, "clt_window"),
            Method::Tightened => write!(f, "tightened"),
        }
    }
}

/// Lower/upper bounds on a tail probability with provenance.
#[derive(Debug, Clone, Copy)]
pub struct TailBoundResult {
    pub lower: f64,
    pub upper: f64,
    /// Exponent of the dominating e^{-n rate} factor (0 for the CLT window).
    pub rate: f64,
    pub method: Method,
    pub n: u64,
    pub side: Side,
    /// For the CLT window only: whether delta lies inside the stated
    /// sigma sqrt(ln n / n) range. The window itself is a direct
    /// Berry-Esseen application and holds for every delta.
    pub clt_range_ok: Option<bool>,
}

/// The xi prefactor pair at one (delta, n) point.
#[derive(Debug, Clone, Copy)]
pub struct Prefactors {
    pub xi_upper: f64,
    pub xi_lower: f64,
    pub rho_star: f64,
    pub rho_sub: f64,
    pub c_berry: f64,
    /// Set when 1/2 - 2CM/(sqrt(n) s^3) <= 0; then xi_lower = 0.
    pub vacuous_lower: bool,
    /// Set when CM/(sqrt(n) s^3) >= 1/2; xi_upper falls back to the
    /// pre-integration bound 1/2 + CM/(sqrt(n) s^3).
    pub clamped_rho_star: bool,
}

fn check_n(n: u64) -> Result<f64> {
    if n == 0 {
        return Err(Error::ParamOutOfRange("n must be >= 1".into()));
    }
    Ok(n as f64)
}

fn check_berry(c: f64) -> Result<()> {
    if !(c > 0.0 && c < 1.0) {
        return Err(Error::ParamOutOfRange(format!(
            "Berry-Esseen constant must lie in (0,1), got {c}"
        )));
    }
    Ok(())
}

/// Weight of the extreme atom reached at delta = delta_star:
/// exp(sum_x t_x ln w_extreme,x). The tail at the boundary equals this mass
/// to the n-th power; strictly beyond it the tail is exactly zero.
fn extreme_log_mass(spec: &CompositeSpectrum, side: Side) -> f64 {
    spec.components()
        .iter()
        .map(|(t, s)| {
            let entries = s.entries();
            let w = match side {
                Side::Right => entries[entries.len() - 1].1,
                Side::Left => entries[0].1,
            };
            t * w.ln()
        })
        .sum()
}

/// Pure Chernoff bound: upper = e^{-n r(delta)}, lower = 0. At
/// delta = delta_star the point-mass value is returned; beyond it, zero.
pub fn weak_tail_bound(
    spec: &CompositeSpectrum,
    side: Side,
    delta: f64,
    n: u64,
) -> Result<TailBoundResult> {
    let nf = check_n(n)?;
    if !(delta >= 0.0) {
        return Err(Error::ParamOutOfRange(format!(
            "delta must be >= 0, got {delta}"
        )));
    }
    let limits = spec.domain_limits(side);
    let boundary_tol = 1e-12 * limits.delta_star.max(1.0);
    let (rate, upper) = if delta < limits.delta_star {
        let rate = spec.rate_at(side, delta)?.rate;
        (rate, (-nf * rate).exp())
    } else if (delta - limits.delta_star).abs() <= boundary_tol {
        let log_mass = extreme_log_mass(spec, side);
        (-log_mass, (nf * log_mass).exp())
    } else {
        (f64::INFINITY, 0.0)
    };
    Ok(TailBoundResult {
        lower: 0.0,
        upper: upper.min(1.0),
        rate,
        method: Method::Weak,
        n,
        side,
        clt_range_ok: None,
    })
}

fn prefactors_at(rp: &RatePoint, nf: f64, c_berry: f64) -> Prefactors {
    let sigma = rp.sigma2.sqrt();
    let be = c_berry * rp.m3 / (nf.sqrt() * sigma.powi(3));
    let a = nf.sqrt() * rp.lambda * sigma;

    let (xi_upper, rho_star, clamped) = if be >= 0.5 {
        (0.5 + be, 0.0, true)
    } else {
        let rho_star = q_inverse(be).expect("be in (0, 0.5)");
        (2.0 * be + scaled_q_gap(a, rho_star), rho_star, false)
    };

    let q_sub = 0.5 - 2.0 * be;
    let (xi_lower, rho_sub, vacuous) = if q_sub <= 0.0 {
        (0.0, f64::INFINITY, true)
    } else {
        let rho_sub = q_inverse(q_sub).expect("q_sub in (0, 0.5)");
        let xi = (0.5 * a * a + ln_q(rho_sub + a)).exp();
        (xi, rho_sub, false)
    };

    Prefactors {
        xi_upper,
        xi_lower,
        rho_star,
        rho_sub,
        c_berry,
        vacuous_lower: vacuous,
        clamped_rho_star: clamped,
    }
}

/// xi prefactors at the tilt solving shift = delta. Requires
/// 0 < delta < delta_star.
pub fn prefactors(
    spec: &CompositeSpectrum,
    side: Side,
    delta: f64,
    n: u64,
    c_berry: f64,
) -> Result<Prefactors> {
    let nf = check_n(n)?;
    check_berry(c_berry)?;
    if !(delta > 0.0) {
        return Err(Error::ParamOutOfRange(format!(
            "prefactors need delta > 0, got {delta}"
        )));
    }
    let rp = spec.rate_at(side, delta)?;
    Ok(prefactors_at(&rp, nf, c_berry))
}

/// The two-sided sandwich xi_lower e^{-nr} <= Pr <= xi_upper e^{-nr};
/// the upper side is additionally capped by the weak bound and by 1.
pub fn strong_tail_bounds(
    spec: &CompositeSpectrum,
    side: Side,
    delta: f64,
    n: u64,
    c_berry: f64,
) -> Result<TailBoundResult> {
    let nf = check_n(n)?;
    check_berry(c_berry)?;
    if !(delta > 0.0) {
        return Err(Error::ParamOutOfRange(format!(
            "strong bounds need delta > 0, got {delta}"
        )));
    }
    let rp = spec.rate_at(side, delta)?;
    let pf = prefactors_at(&rp, nf, c_berry);
    let decay = (-nf * rp.rate).exp();
    let upper = (pf.xi_upper * decay).min(decay).min(1.0);
    let lower = (pf.xi_lower * decay).min(upper);
    Ok(TailBoundResult {
        lower,
        upper,
        rate: rp.rate,
        method: Method::Strong,
        n,
        side,
        clt_range_ok: None,
    })
}

/// CLT window: Q(delta sqrt(n)/sigma) -+ C M / (sqrt(n) sigma^3) using the
/// untilted moments. Valid for every delta >= 0; the result records whether
/// delta falls inside the stated sigma sqrt(ln n / n) range.
pub fn clt_window_bounds(
    spec: &CompositeSpectrum,
    side: Side,
    delta: f64,
    n: u64,
    c_berry: f64,
) -> Result<TailBoundResult> {
    let nf = check_n(n)?;
    check_berry(c_berry)?;
    if !(delta >= 0.0) {
        return Err(Error::ParamOutOfRange(format!(
            "delta must be >= 0, got {delta}"
        )));
    }
    let stats = spec.tilted_stats(0.0)?;
    let sigma = stats.sigma2.sqrt();
    let be = c_berry * stats.m3 / (nf.sqrt() * sigma.powi(3));
    let center = q_function(delta * nf.sqrt() / sigma);
    Ok(TailBoundResult {
        lower: (center - be).max(0.0),
        upper: (center + be).min(1.0),
        rate: 0.0,
        method: Method::CltWindow,
        n,
        side,
        clt_range_ok: Some(delta <= sigma * ((nf.ln() / nf).sqrt())),
    })
}

/// Bounds on the tail of the tilted law Z at shift `delta_z`, used per grid
/// point inside [`recursive_tighten`]. `be_z` is C M(lambda)/(sqrt(n) s^3),
/// i.e. the Berry-Esseen term of Z's own untilted moments.
fn tilted_tail_bounds(
    z: &CompositeSpectrum,
    rho: f64,
    delta_z: f64,
    n: u64,
    be_z: f64,
    depth: u32,
    c_berry: f64,
) -> Result<(f64, f64)> {
    // Lemma-1 window on Z: delta_z sqrt(n) / sigma_z = rho by construction.
    let mut lower = (q_function(rho) - be_z).max(0.0);
    let mut upper = (q_function(rho) + be_z).min(1.0);
    let limits = z.domain_limits(Side::Right);
    if delta_z >= limits.delta_star {
        let weak = weak_tail_bound(z, Side::Right, delta_z, n)?;
        return Ok((0.0, weak.upper.min(upper)));
    }
    if delta_z > 0.0 {
        let deeper = if depth == 0 {
            strong_tail_bounds(z, Side::Right, delta_z, n, c_berry)?
        } else {
            recursive_tighten(z, Side::Right, delta_z, n, depth, c_berry)?
        };
        lower = lower.max(deeper.lower);
        upper = upper.min(deeper.upper);
    }
    Ok((lower, upper))
}

/// Remark-2 style recursive tightening of the strong bound: the prefactor
/// integral
///
/// ```text
/// xi_n = F(0) - int_0^inf a e^{-a rho} F(rho) d rho,    a = sqrt(n) l s
/// ```
///
/// over the tilted tail F(rho) is bracketed by bounding F at grid points
/// (Berry-Esseen window plus, recursively, the strong bound on the tilted
/// spectrum) and integrating piecewise-constant envelopes with exact
/// exponential panel weights, so each side stays a one-sided bound. The
/// result is never looser than [`strong_tail_bounds`].
pub fn recursive_tighten(
    spec: &CompositeSpectrum,
    side: Side,
    delta: f64,
    n: u64,
    depth: u32,
    c_berry: f64,
) -> Result<TailBoundResult> {
    let base = strong_tail_bounds(spec, side, delta, n, c_berry)?;
    if depth == 0 {
        return Ok(base);
    }
    let nf = n as f64;
    let rp = spec.rate_at(side, delta)?;
    let sigma = rp.sigma2.sqrt();
    let a = nf.sqrt() * rp.lambda * sigma;
    let z = spec.tilted(side, rp.lambda)?;
    if z.is_degenerate() || !(a > 0.0) {
        return Ok(base);
    }
    let be_z = c_berry * rp.m3 / (nf.sqrt() * sigma.powi(3));
    let decay = (-nf * rp.rate).exp();

    const RHO_MAX: f64 = 12.0;
    let mut panels = 512usize;
    let mut prev: Option<(f64, f64)> = None;
    let mut xi = (f64::NAN, f64::NAN);
    while panels <= 8192 {
        let step = RHO_MAX / panels as f64;
        let mut lows = Vec::with_capacity(panels + 1);
        let mut ups = Vec::with_capacity(panels + 1);
        for k in 0..=panels {
            let rho = k as f64 * step;
            let delta_z = rho * sigma / nf.sqrt();
            let (lo, up) =
                tilted_tail_bounds(&z, rho, delta_z, n, be_z, depth - 1, c_berry)?;
            lows.push(lo);
            ups.push(up);
        }
        // Monotone envelopes: the true tail F is non-increasing, so an upper
        // bound at rho_k also bounds everything to its right, and a lower
        // bound at rho_{k+1} bounds everything to its left.
        for k in 1..=panels {
            ups[k] = ups[k].min(ups[k - 1]);
        }
        for k in (0..panels).rev() {
            lows[k] = lows[k].max(lows[k + 1]);
        }
        // xi_upper = up(F(0)) - sum_k w_k low(F) on each panel, panel weight
        // w_k = e^{-a rho_k} - e^{-a rho_{k+1}} exactly; dropping the tail
        // of the subtracted integral only loosens upward.
        let mut sub = 0.0;
        let mut gain = 0.0;
        for k in 0..panels {
            let w = (-a * k as f64 * step).exp() - (-a * (k + 1) as f64 * step).exp();
            sub += w * lows[k + 1];
            gain += w * (lows[0] - ups[k]).max(0.0);
        }
        xi = ((ups[0] - sub).max(0.0), gain);
        if let Some((pu, pl)) = prev {
            let du = (xi.0 - pu).abs() <= 1e-6 * pu.abs().max(1e-300);
            let dl = (xi.1 - pl).abs() <= 1e-6 * pl.abs().max(1e-300);
            if du && dl {
                break;
            }
        }
        prev = Some(xi);
        panels *= 2;
    }

    Ok(TailBoundResult {
        lower: base.lower.max(xi.1 * decay),
        upper: base.upper.min(xi.0 * decay),
        rate: rp.rate,
        method: Method::Tightened,
        n,
        side,
        clt_range_ok: None,
    })
}
