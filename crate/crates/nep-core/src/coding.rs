//! Fixed-rate source coding at finite block length.
//!
//! A fixed-rate code for n letters is a subset S_n of the sequence space;
//! its rate is (1/n) ln |S_n| and its error Pr{ X^n not in S_n }. The
//! optimal S_n keeps the |S_n| most probable sequences. This module
//! computes:
//!
//! - the exact optimal error / optimal rate by type-class counting with
//!   arbitrary-precision sequence counts (the oracle);
//! - a computable bracket on the minimum rate R_n(eps): the upper side
//!   solves `eps = xi_upper(delta) e^{-n r(delta)}` for delta-bar, the lower
//!   side solves `(1 + e^{-n}) eps = xi_lower(delta) e^{-n r(delta)}` and
//!   maximizes the free constant d in
//!   `delta - r(delta) + [-d + ln(1/2 - Q(d/(sqrt(n) s)) - 2CM/(sqrt(n) s^3))]/n`;
//! - leading-order gap formulas for the four error-decay regimes
//!   (exponential, sub-exponential, polynomial, constant).

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};

use crate::bounds::{prefactors, Prefactors};
use crate::error::{Error, Result};
use crate::numeric::{q_function, q_inverse, KahanSum};
use crate::sources::{entropy_spectrum, DiscreteDistribution};
use crate::spectrum::{CompositeSpectrum, Side};

const MAX_CLASSES: f64 = 1e7;

/// Bracket on the minimum coding rate, in nats per symbol.
#[derive(Debug, Clone)]
pub struct CodingBracket {
    pub n: u64,
    pub epsilon: f64,
    pub rate_upper: f64,
    pub rate_lower: f64,
    pub delta_bar: f64,
    pub delta_under: f64,
    pub d_used: f64,
    /// Exact R_n(eps) from the optimal-code oracle, when requested.
    pub exact_rate: Option<f64>,
    pub upper_kind: UpperKind,
    pub lower_vacuous: bool,
}

/// How the upper endpoint was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UpperKind {
    /// delta-bar solves eps = xi_upper e^{-n r}.
    Solved,
    /// eps is already covered at delta -> 0+; rate = H.
    AtEntropy,
    /// Prefactor equation unsolvable; delta-bar from eps = e^{-n r}.
    WeakFallback,
    /// Even the weak bound cannot reach eps; rate = max value.
    PointMass,
}

#[derive(Debug, Clone, Copy)]
pub struct RateUpper {
    pub rate: f64,
    pub delta_bar: f64,
    pub kind: UpperKind,
}

#[derive(Debug, Clone, Copy)]
pub struct RateLower {
    pub rate: f64,
    pub delta_under: f64,
    pub d_used: f64,
    /// No solvable delta (or no admissible d): falls back to the trivial
    /// bound R_n >= 0.
    pub vacuous: bool,
}

/// Error-decay regimes of the non-asymptotic coding theorem.
#[derive(Debug, Clone, Copy)]
pub enum Regime {
    /// eps_n decays exponentially; pass its value at this n.
    ExponentialDecay { epsilon_n: f64 },
    /// eps_n = n^{-alpha/2} e^{-n^alpha}, alpha in (0,1).
    SubExponential { alpha: f64 },
    /// eps_n = n^{-alpha} / sqrt(ln n), alpha > 0.
    Polynomial { alpha: f64 },
    /// eps_n = eps constant.
    ConstantError { epsilon: f64 },
}

fn check_epsilon(eps: f64) -> Result<()> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::EpsilonOutOfRange(eps));
    }
    Ok(())
}

// --- arbitrary-precision helpers -------------------------------------------------

fn ln_biguint(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits == 0 {
        return f64::NEG_INFINITY;
    }
    if bits <= 900 {
        x.to_f64().expect("fits in f64 range").ln()
    } else {
        let shift = bits - 64;
        let top = (x >> shift).to_f64().expect("64 bits fit");
        top.ln() + shift as f64 * std::f64::consts::LN_2
    }
}

/// floor(e^x) as an integer. e^{n (ln S)/n} can land one ulp under S, so a
/// relative nudge keeps exact integer targets stable through the round trip.
fn floor_exp(x: f64) -> BigUint {
    if x < 0.0 {
        return BigUint::zero();
    }
    let guarded = x + 5e-14 * x.abs().max(1.0);
    let t = guarded * std::f64::consts::LOG2_E;
    if t < 63.0 {
        BigUint::from(guarded.exp().floor() as u64)
    } else {
        let e = t.floor();
        let mant = (2f64.powf(t - e) * 2f64.powi(52)).floor() as u64;
        BigUint::from(mant) << (e as u64 - 52)
    }
}

// --- type classes ----------------------------------------------------------------

struct TypeClass {
    ln_count: f64,
    count: BigUint,
    ln_pseq: f64,
}

fn class_count_guard(n: u64, m: usize) -> Result<()> {
    let mut c = 1.0f64;
    for i in 1..m {
        c *= (n as f64 + i as f64) / i as f64;
    }
    if c > MAX_CLASSES {
        Err(Error::TooLarge(format!(
            "{c:.0} type classes for n={n}, |X|={m} exceeds {MAX_CLASSES:.0}"
        )))
    } else {
        Ok(())
    }
}

/// All type classes sorted by per-sequence probability, most probable
/// first; ties between distinct classes broken by enumeration index.
fn type_classes(p: &DiscreteDistribution, n: u64) -> Result<Vec<TypeClass>> {
    let probs = p.probs();
    let m = probs.len();
    class_count_guard(n, m)?;
    let ln_p: Vec<f64> = probs.iter().map(|&x| x.ln()).collect();
    let mut classes = Vec::new();
    if m == 1 {
        classes.push(TypeClass {
            ln_count: 0.0,
            count: BigUint::from(1u8),
            ln_pseq: n as f64 * ln_p[0],
        });
    } else if m == 2 {
        // binomial fast path: C(n, k+1) = C(n, k) (n-k)/(k+1)
        let mut count = BigUint::from(1u8);
        for k in 0..=n {
            classes.push(TypeClass {
                ln_count: ln_biguint(&count),
                count: count.clone(),
                ln_pseq: k as f64 * ln_p[1] + (n - k) as f64 * ln_p[0],
            });
            if k < n {
                count = count * (n - k) / (k + 1);
            }
        }
    } else {
        let mut fact = Vec::with_capacity(n as usize + 1);
        fact.push(BigUint::from(1u8));
        for i in 1..=n {
            let next = fact.last().unwrap() * i;
            fact.push(next);
        }
        let mut k = vec![0u64; m];
        enumerate(&mut k, 0, n, &mut |k: &[u64]| {
            let mut den = BigUint::from(1u8);
            let mut ln_pseq = KahanSum::new();
            for (i, &ki) in k.iter().enumerate() {
                den *= &fact[ki as usize];
                ln_pseq.add(ki as f64 * ln_p[i]);
            }
            let count = &fact[n as usize] / den;
            classes.push(TypeClass {
                ln_count: ln_biguint(&count),
                count,
                ln_pseq: ln_pseq.value(),
            });
        });
    }
    let mut order: Vec<usize> = (0..classes.len()).collect();
    order.sort_by(|&a, &b| {
        classes[b]
            .ln_pseq
            .total_cmp(&classes[a].ln_pseq)
            .then(a.cmp(&b))
    });
    let mut sorted = Vec::with_capacity(classes.len());
    let mut taken: Vec<Option<TypeClass>> = classes.into_iter().map(Some).collect();
    for i in order {
        sorted.push(taken[i].take().unwrap());
    }
    Ok(sorted)
}

fn enumerate(k: &mut [u64], idx: usize, remaining: u64, f: &mut impl FnMut(&[u64])) {
    if idx == k.len() - 1 {
        k[idx] = remaining;
        f(k);
        return;
    }
    for v in 0..=remaining {
        k[idx] = v;
        enumerate(k, idx + 1, remaining - v, f);
    }
}

// --- exact oracle ----------------------------------------------------------------

/// Exact error probability of the best code of size floor(e^{n rate}):
/// fill type classes in order of per-sequence probability, allowing a
/// partial class (its sequences are equiprobable, so any subset is optimal).
pub fn optimal_code_error(p: &DiscreteDistribution, rate_nats: f64, n: u64) -> Result<f64> {
    if n == 0 {
        return Err(Error::ParamOutOfRange("n must be >= 1".into()));
    }
    if !rate_nats.is_finite() || rate_nats < 0.0 {
        return Err(Error::ParamOutOfRange(format!(
            "rate must be finite and >= 0, got {rate_nats}"
        )));
    }
    let classes = type_classes(p, n)?;
    let total = BigUint::from(p.len()).pow(
        u32::try_from(n).map_err(|_| Error::TooLarge("n exceeds u32".into()))?,
    );
    if n as f64 * rate_nats >= ln_biguint(&total) - 1e-9 {
        return Ok(0.0);
    }
    let mut remaining = floor_exp(n as f64 * rate_nats).min(total);
    let mut covered = KahanSum::new();
    for class in &classes {
        if remaining.is_zero() {
            break;
        }
        let take = class.count.clone().min(remaining.clone());
        covered.add((ln_biguint(&take) + class.ln_pseq).exp());
        remaining -= take;
    }
    Ok((1.0 - covered.value()).clamp(0.0, 1.0))
}

/// Exact minimum rate R_n(eps) = (1/n) ln (minimal |S_n| with error <= eps).
pub fn optimal_rate(p: &DiscreteDistribution, epsilon: f64, n: u64) -> Result<f64> {
    if n == 0 {
        return Err(Error::ParamOutOfRange("n must be >= 1".into()));
    }
    check_epsilon(epsilon)?;
    let classes = type_classes(p, n)?;
    let target = 1.0 - epsilon;
    let mut cum = KahanSum::new();
    let mut size = BigUint::zero();
    for class in &classes {
        let pc = (class.ln_count + class.ln_pseq).exp();
        if cum.value() + pc < target {
            cum.add(pc);
            size += &class.count;
        } else {
            let need = target - cum.value();
            if need > 0.0 {
                let extra = (floor_exp(need.ln() - class.ln_pseq) + 1u8)
                    .min(class.count.clone());
                size += extra;
            }
            return Ok(ln_biguint(&size).max(0.0) / n as f64);
        }
    }
    Ok(ln_biguint(&size).max(0.0) / n as f64)
}

// --- bracket ---------------------------------------------------------------------

/// Invert the (strictly increasing) rate function: the delta with
/// r(delta) = target, found by bisection within [0, delta_star).
fn rate_inverse(spec: &CompositeSpectrum, side: Side, target: f64) -> Result<f64> {
    if !(target >= 0.0) {
        return Err(Error::ParamOutOfRange(format!(
            "rate target must be >= 0, got {target}"
        )));
    }
    if target == 0.0 {
        return Ok(0.0);
    }
    let delta_star = spec.domain_limits(side).delta_star;
    let mut lo = 0.0f64;
    let mut hi = delta_star * (1.0 - 1e-12);
    if spec.rate_at(side, hi)?.rate < target {
        return Err(Error::ParamOutOfRange(format!(
            "rate target {target} exceeds the reachable maximum"
        )));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if spec.rate_at(side, mid)?.rate < target {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-14 * hi.max(1.0) {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

fn ln_phi_upper(spec: &CompositeSpectrum, delta: f64, n: u64, c: f64) -> Result<f64> {
    let pf = prefactors(spec, Side::Right, delta, n, c)?;
    let r = spec.rate_at(Side::Right, delta)?.rate;
    Ok(pf.xi_upper.ln() - n as f64 * r)
}

/// Upper endpoint of the bracket: H + delta-bar with delta-bar solving
/// eps = xi_upper(delta) e^{-n r(delta)}, falling back to the weak bound or
/// the point-mass rate when the equation has no solution.
pub fn rate_upper(
    p: &DiscreteDistribution,
    epsilon: f64,
    n: u64,
    c_berry: f64,
) -> Result<RateUpper> {
    check_epsilon(epsilon)?;
    if n == 0 {
        return Err(Error::ParamOutOfRange("n must be >= 1".into()));
    }
    let spec: CompositeSpectrum = entropy_spectrum(p)?.into();
    let mean = spec.mean();
    let delta_star = spec.domain_limits(Side::Right).delta_star;
    let ln_eps = epsilon.ln();
    let lo = delta_star * 1e-9;
    let hi = delta_star * (1.0 - 1e-9);

    if ln_phi_upper(&spec, lo, n, c_berry)? <= ln_eps {
        return Ok(RateUpper {
            rate: mean + lo,
            delta_bar: lo,
            kind: UpperKind::AtEntropy,
        });
    }
    if ln_phi_upper(&spec, hi, n, c_berry)? <= ln_eps {
        // walk a coarse grid to the first crossing, then bisect inside it;
        // any delta with phi(delta) <= eps yields a valid upper bound
        let grid = 64;
        let mut a = lo;
        let mut b = hi;
        for i in 1..=grid {
            let d = lo + (hi - lo) * i as f64 / grid as f64;
            if ln_phi_upper(&spec, d, n, c_berry)? <= ln_eps {
                b = d;
                break;
            }
            a = d;
        }
        for _ in 0..100 {
            let mid = 0.5 * (a + b);
            if ln_phi_upper(&spec, mid, n, c_berry)? <= ln_eps {
                b = mid;
            } else {
                a = mid;
            }
            if b - a <= 1e-13 * b.max(1.0) {
                break;
            }
        }
        return Ok(RateUpper {
            rate: mean + b,
            delta_bar: b,
            kind: UpperKind::Solved,
        });
    }
    let r_hi = spec.rate_at(Side::Right, hi)?.rate;
    let weak_target = -ln_eps / n as f64;
    if weak_target <= r_hi {
        let delta_bar = rate_inverse(&spec, Side::Right, weak_target)?;
        return Ok(RateUpper {
            rate: mean + delta_bar,
            delta_bar,
            kind: UpperKind::WeakFallback,
        });
    }
    Ok(RateUpper {
        rate: mean + delta_star,
        delta_bar: delta_star,
        kind: UpperKind::PointMass,
    })
}

fn psi_lower(spec: &CompositeSpectrum, delta: f64, n: u64, c: f64) -> Result<(f64, Prefactors)> {
    let pf = prefactors(spec, Side::Right, delta, n, c)?;
    let r = spec.rate_at(Side::Right, delta)?.rate;
    Ok((pf.xi_lower * (-(n as f64) * r).exp(), pf))
}

/// Lower endpoint of the bracket. Solves
/// (1 + e^{-n}) eps = xi_lower(delta) e^{-n r(delta)} for delta-under, then
/// maximizes the free constant d by golden-section search. Falls back to
/// the trivial bound R_n >= 0 when no delta or no admissible d exists.
pub fn rate_lower(
    p: &DiscreteDistribution,
    epsilon: f64,
    n: u64,
    c_berry: f64,
) -> Result<RateLower> {
    check_epsilon(epsilon)?;
    if n == 0 {
        return Err(Error::ParamOutOfRange("n must be >= 1".into()));
    }
    let spec: CompositeSpectrum = entropy_spectrum(p)?.into();
    let nf = n as f64;
    let eps_prime = (1.0 + (-nf).exp()) * epsilon;
    let delta_star = spec.domain_limits(Side::Right).delta_star;
    let lo = delta_star * 1e-9;
    let hi = delta_star * (1.0 - 1e-9);

    let vacuous = RateLower {
        rate: 0.0,
        delta_under: 0.0,
        d_used: 0.0,
        vacuous: true,
    };
    if psi_lower(&spec, lo, n, c_berry)?.0 < eps_prime {
        return Ok(vacuous);
    }
    // last grid point still >= eps_prime, then bisect the boundary;
    // keeping the inner endpoint preserves psi(delta) >= (1+e^{-n}) eps
    let grid = 128;
    let mut a = lo;
    let mut b = hi;
    for i in 1..=grid {
        let d = lo + (hi - lo) * i as f64 / grid as f64;
        if psi_lower(&spec, d, n, c_berry)?.0 >= eps_prime {
            a = d;
        } else {
            b = d;
            break;
        }
    }
    for _ in 0..100 {
        let mid = 0.5 * (a + b);
        if psi_lower(&spec, mid, n, c_berry)?.0 >= eps_prime {
            a = mid;
        } else {
            b = mid;
        }
        if b - a <= 1e-13 * b.max(1.0) {
            break;
        }
    }
    let delta_under = a;
    let rp = spec.rate_at(Side::Right, delta_under)?;
    let sigma = rp.sigma2.sqrt();
    let be = c_berry * rp.m3 / (nf.sqrt() * sigma.powi(3));
    let head = 0.5 - 2.0 * be;
    if head <= 0.0 {
        return Ok(vacuous);
    }
    let log_arg = |d: f64| 0.5 - q_function(d / (nf.sqrt() * sigma)) - 2.0 * be;
    let objective = |d: f64| -d + log_arg(d).ln();
    let d_min = nf.sqrt() * sigma * q_inverse(head).expect("head in (0, 0.5)");
    let d_max = 10.0 * nf.sqrt() * sigma;
    if !(d_min < d_max) {
        return Ok(vacuous);
    }
    // coarse scan, then golden-section refinement around the best point
    let scan = 64;
    let mut best_i = 1;
    let mut best = f64::NEG_INFINITY;
    for i in 1..scan {
        let d = d_min + (d_max - d_min) * i as f64 / scan as f64;
        let v = objective(d);
        if v > best {
            best = v;
            best_i = i;
        }
    }
    let mut ga = d_min + (d_max - d_min) * (best_i - 1) as f64 / scan as f64;
    let mut gb = d_min + (d_max - d_min) * (best_i + 1) as f64 / scan as f64;
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = gb - inv_phi * (gb - ga);
    let mut x2 = ga + inv_phi * (gb - ga);
    let mut f1 = objective(x1);
    let mut f2 = objective(x2);
    while gb - ga > 1e-10 * gb.max(1.0) {
        if f1 < f2 {
            ga = x1;
            x1 = x2;
            f1 = f2;
            x2 = ga + inv_phi * (gb - ga);
            f2 = objective(x2);
        } else {
            gb = x2;
            x2 = x1;
            f2 = f1;
            x1 = gb - inv_phi * (gb - ga);
            f1 = objective(x1);
        }
    }
    let d_used = 0.5 * (ga + gb);
    if log_arg(d_used) <= 0.0 {
        return Ok(vacuous);
    }
    Ok(RateLower {
        rate: spec.mean() + delta_under - rp.rate + objective(d_used) / nf,
        delta_under,
        d_used,
        vacuous: false,
    })
}

/// Both endpoints plus, optionally, the exact oracle value.
pub fn bracket(
    p: &DiscreteDistribution,
    epsilon: f64,
    n: u64,
    c_berry: f64,
    with_exact: bool,
) -> Result<CodingBracket> {
    let up = rate_upper(p, epsilon, n, c_berry)?;
    let low = rate_lower(p, epsilon, n, c_berry)?;
    let exact_rate = if with_exact {
        Some(optimal_rate(p, epsilon, n)?)
    } else {
        None
    };
    Ok(CodingBracket {
        n,
        epsilon,
        rate_upper: up.rate,
        rate_lower: low.rate,
        delta_bar: up.delta_bar,
        delta_under: low.delta_under,
        d_used: low.d_used,
        exact_rate,
        upper_kind: up.kind,
        lower_vacuous: low.vacuous,
    })
}

/// Leading-order (gap_upper, gap_lower) on R_n(eps_n) - H for each
/// error-decay regime.
pub fn asymptotic_gap(
    regime: Regime,
    p: &DiscreteDistribution,
    n: u64,
) -> Result<(f64, f64)> {
    if n == 0 {
        return Err(Error::ParamOutOfRange("n must be >= 1".into()));
    }
    let nf = n as f64;
    let spec: CompositeSpectrum = entropy_spectrum(p)?.into();
    let sigma = spec.tilted_stats(0.0)?.sigma2.sqrt();
    match regime {
        Regime::ExponentialDecay { epsilon_n } => {
            check_epsilon(epsilon_n)?;
            let x = -epsilon_n.ln() / nf - nf.ln() / (2.0 * nf);
            let gap = rate_inverse(&spec, Side::Right, x)?;
            Ok((gap, gap + epsilon_n.ln() / nf))
        }
        Regime::SubExponential { alpha } => {
            if !(alpha > 0.0 && alpha < 1.0) {
                return Err(Error::ParamOutOfRange(format!(
                    "sub-exponential regime needs alpha in (0,1), got {alpha}"
                )));
            }
            let gap = std::f64::consts::SQRT_2 * sigma * nf.powf(-(1.0 - alpha) / 2.0);
            Ok((gap, gap))
        }
        Regime::Polynomial { alpha } => {
            if !(alpha > 0.0) {
                return Err(Error::ParamOutOfRange(format!(
                    "polynomial regime needs alpha > 0, got {alpha}"
                )));
            }
            let gap = sigma * (2.0 * alpha * nf.ln() / nf).sqrt();
            Ok((gap, gap))
        }
        Regime::ConstantError { epsilon } => {
            check_epsilon(epsilon)?;
            let gap = sigma / nf.sqrt() * q_inverse(epsilon)?;
            Ok((gap, gap))
        }
    }
}
