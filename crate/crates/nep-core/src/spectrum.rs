//! Information-value spectra and the exponential-tilting machinery built on
//! them.
//!
//! A [`ValueSpectrum`] is the distribution of a per-letter information value
//! V (for example -ln p(X), -ln p(X|Y), or ln(p(Y|X)/p(Y))) as a finite
//! weighted set of points. Its cumulant generating function
//! K(theta) = ln E[e^{theta V}] drives everything else:
//!
//! - the tilt-shift map `shift(theta) = K'(theta) - E[V]`, strictly
//!   increasing with `shift(0) = 0` and `shift'(theta) = K''(theta)`;
//! - the large-deviations rate `r(delta) = sup_{l >= 0} [l (mean + delta)
//!   - K(l)]`, recovered parametrically as `r = l (mean + delta(l)) - K(l)`;
//! - the tilted variance and third absolute central moment that feed the
//!   Berry-Esseen prefactors.
//!
//! Lower tails reuse the same code path on the negated spectrum: the left
//! rate of V at shift delta is the right rate of -V at the same shift.
//!
//! A [`CompositeSpectrum`] is a type-weighted list of per-letter spectra for
//! the heterogeneous (conditional-on-type) setting; a single-component
//! composite behaves identically to its underlying `ValueSpectrum`.

use crate::error::{Error, Result};
use crate::numeric::KahanSum;

/// Relative tolerance for treating two spectrum values as the same atom.
const MERGE_REL_TOL: f64 = 1e-13;

/// Which tail of the information spectrum a computation refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    /// Pr{ V-bar > mean + delta }
    Right,
    /// Pr{ V-bar <= mean - delta }
    Left,
}

impl std::fmt::Display for Side {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Side::Right => write!(f, "right"),
            Side::Left => write!(f, "left"),
        }
    }
}

/// Finite weighted set of per-symbol information values, sorted ascending by
/// value, with atoms merged at `1e-13` relative tolerance.
#[derive(Debug, Clone, PartialEq)]
pub struct ValueSpectrum {
    entries: Vec<(f64, f64)>,
    mean: f64,
}

fn values_close(a: f64, b: f64) -> bool {
    let scale = a.abs().max(b.abs());
    (a - b).abs() <= MERGE_REL_TOL * scale || (a - b).abs() <= 1e-300
}

impl ValueSpectrum {
    /// Build a spectrum from `(value, weight)` pairs. Weights must be
    /// positive and sum to 1 within 1e-12; values must be finite.
    pub fn new(mut entries: Vec<(f64, f64)>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::InvalidDistribution(
                "spectrum needs at least one entry".into(),
            ));
        }
        let mut total = KahanSum::new();
        for &(v, w) in &entries {
            if !v.is_finite() {
                return Err(Error::InvalidDistribution(format!(
                    "non-finite value {v}"
                )));
            }
            if !(w > 0.0) || !w.is_finite() {
                return Err(Error::InvalidDistribution(format!(
                    "weight {w} must be positive and finite"
                )));
            }
            total.add(w);
        }
        if (total.value() - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidDistribution(format!(
                "weights sum to {}, expected 1",
                total.value()
            )));
        }
        entries.sort_by(|a, b| a.0.total_cmp(&b.0));

        // Merge runs of equal values. The merged value is written as
        // base + correction so that a run of bitwise-identical values keeps
        // its exact representation.
        let mut merged: Vec<(f64, f64)> = Vec::with_capacity(entries.len());
        let mut i = 0;
        while i < entries.len() {
            let base = entries[i].0;
            let mut w = KahanSum::new();
            let mut corr = KahanSum::new();
            let mut j = i;
            while j < entries.len() && values_close(base, entries[j].0) {
                w.add(entries[j].1);
                corr.add(entries[j].1 * (entries[j].0 - base));
                j += 1;
            }
            let weight = w.value();
            merged.push((base + corr.value() / weight, weight));
            i = j;
        }

        let mut mean = KahanSum::new();
        for &(v, w) in &merged {
            mean.add(w * v);
        }
        Ok(Self {
            entries: merged,
            mean: mean.value(),
        })
    }

    pub fn entries(&self) -> &[(f64, f64)] {
        &self.entries
    }

    /// Cached E[V] in nats (H(X), H(X|Y), I(X;Y), ... depending on source).
    pub fn mean(&self) -> f64 {
        self.mean
    }

    pub fn min_value(&self) -> f64 {
        self.entries[0].0
    }

    pub fn max_value(&self) -> f64 {
        self.entries[self.entries.len() - 1].0
    }

    /// A single atom: V is constant and every tilted variance is zero.
    pub fn is_degenerate(&self) -> bool {
        self.entries.len() == 1
    }

    /// Spectrum of -V. Entry order flips; the cached mean is the exact
    /// negation so left/right code paths agree bitwise.
    pub fn negated(&self) -> ValueSpectrum {
        let entries = self
            .entries
            .iter()
            .rev()
            .map(|&(v, w)| (-v, w))
            .collect();
        ValueSpectrum {
            entries,
            mean: -self.mean,
        }
    }
}

/// Statistics of the theta-tilted law: `shift = K'(theta) - mean`, the
/// tilted variance `sigma2 = K''(theta)` and the tilted third absolute
/// central moment `m3` (per-component centering in the composite case).
#[derive(Debug, Clone, Copy)]
pub struct TiltedStats {
    pub shift: f64,
    pub sigma2: f64,
    pub m3: f64,
}

/// A solved point on a rate curve.
#[derive(Debug, Clone, Copy)]
pub struct RatePoint {
    /// Tilt magnitude lambda >= 0; also dr/d(delta) at this point.
    pub lambda: f64,
    pub side: Side,
    /// Shift away from the mean, in nats. Always >= 0.
    pub delta: f64,
    /// Exponent r(delta) >= 0; zero iff delta = 0.
    pub rate: f64,
    /// Tilted variance sigma^2(lambda) = delta'(lambda).
    pub sigma2: f64,
    /// Tilted third absolute central moment M(lambda).
    pub m3: f64,
}

/// Reachable tilt and shift ranges. Finite spectra always have
/// `lambda_star = +inf`; `delta_star` is the supremum of reachable shifts,
/// beyond which the tail probability is exactly zero.
#[derive(Debug, Clone, Copy)]
pub struct DomainLimits {
    pub lambda_star: f64,
    pub delta_star: f64,
}

/// Type-weighted list of per-letter spectra. Components with bitwise-equal
/// spectra are coalesced at construction, so an all-identical composite
/// takes exactly the single-spectrum code path.
#[derive(Debug, Clone, PartialEq)]
pub struct CompositeSpectrum {
    components: Vec<(f64, ValueSpectrum)>,
    mean: f64,
}

impl From<ValueSpectrum> for CompositeSpectrum {
    fn from(spectrum: ValueSpectrum) -> Self {
        let mean = spectrum.mean;
        CompositeSpectrum {
            components: vec![(1.0, spectrum)],
            mean,
        }
    }
}

impl CompositeSpectrum {
    pub fn new(components: Vec<(f64, ValueSpectrum)>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::InvalidDistribution(
                "composite needs at least one component".into(),
            ));
        }
        let mut total = KahanSum::new();
        for &(t, _) in &components {
            if !(t > 0.0) || !t.is_finite() {
                return Err(Error::InvalidDistribution(format!(
                    "type weight {t} must be positive and finite"
                )));
            }
            total.add(t);
        }
        if (total.value() - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidDistribution(format!(
                "type weights sum to {}, expected 1",
                total.value()
            )));
        }
        // Coalesce bitwise-identical components.
        let mut merged: Vec<(f64, ValueSpectrum)> = Vec::new();
        for (t, s) in components {
            if let Some(slot) = merged.iter_mut().find(|(_, m)| m.entries == s.entries) {
                slot.0 += t;
            } else {
                merged.push((t, s));
            }
        }
        if merged.len() == 1 {
            merged[0].0 = 1.0;
        }
        let mut mean = KahanSum::new();
        for &(t, ref s) in &merged {
            mean.add(t * s.mean);
        }
        Ok(CompositeSpectrum {
            components: merged,
            mean: mean.value(),
        })
    }

    pub fn components(&self) -> &[(f64, ValueSpectrum)] {
        &self.components
    }

    /// I(t;P)-style mean: sum of t_x times the component means.
    pub fn mean(&self) -> f64 {
        self.mean
    }

    pub fn is_degenerate(&self) -> bool {
        self.components.iter().all(|(_, s)| s.is_degenerate())
    }

    fn negated(&self) -> CompositeSpectrum {
        CompositeSpectrum {
            components: self
                .components
                .iter()
                .map(|(t, s)| (*t, s.negated()))
                .collect(),
            mean: -self.mean,
        }
    }

    /// Right-facing view for the requested side.
    fn oriented(&self, side: Side) -> std::borrow::Cow<'_, CompositeSpectrum> {
        match side {
            Side::Right => std::borrow::Cow::Borrowed(self),
            Side::Left => std::borrow::Cow::Owned(self.negated()),
        }
    }

    /// Composite cumulant generating function
    /// K(theta) = sum_x t_x ln sum_i w_{x,i} e^{theta v_{x,i}},
    /// evaluated with a max-shift so |theta v| up to ~700 cannot overflow.
    pub fn cgf(&self, theta: f64) -> f64 {
        let mut acc = KahanSum::new();
        for (t, s) in &self.components {
            acc.add(t * component_cgf(s, theta));
        }
        acc.value()
    }

    /// Tilted moments at signed theta. Errors with [`Error::DegenerateSpectrum`]
    /// when every component is a single atom.
    pub fn tilted_stats(&self, theta: f64) -> Result<TiltedStats> {
        if !theta.is_finite() {
            return Err(Error::ParamOutOfRange(format!(
                "theta must be finite, got {theta}"
            )));
        }
        if self.is_degenerate() {
            return Err(Error::DegenerateSpectrum);
        }
        let mut kprime = KahanSum::new();
        let mut sigma2 = KahanSum::new();
        let mut m3 = KahanSum::new();
        for (t, s) in &self.components {
            let c = component_tilted_moments(s, theta);
            kprime.add(t * c.mean);
            sigma2.add(t * c.var);
            m3.add(t * c.abs3);
        }
        Ok(TiltedStats {
            shift: kprime.value() - self.mean,
            sigma2: sigma2.value(),
            m3: m3.value(),
        })
    }

    /// Reachable tilt/shift limits for the given side.
    pub fn domain_limits(&self, side: Side) -> DomainLimits {
        let mut extreme = KahanSum::new();
        for (t, s) in &self.components {
            extreme.add(match side {
                Side::Right => t * s.max_value(),
                Side::Left => t * s.min_value(),
            });
        }
        let delta_star = match side {
            Side::Right => extreme.value() - self.mean,
            Side::Left => self.mean - extreme.value(),
        };
        DomainLimits {
            lambda_star: f64::INFINITY,
            delta_star,
        }
    }

    /// Solve the Legendre problem at the given shift: finds the tilt with
    /// `shift(lambda) = delta` and returns the rate point there.
    ///
    /// `delta` must lie in `[0, delta_star)`; the tail beyond `delta_star`
    /// is an exact point mass handled at the bound layer, not here.
    pub fn rate_at(&self, side: Side, delta: f64) -> Result<RatePoint> {
        if !(delta >= 0.0) || !delta.is_finite() {
            return Err(Error::ParamOutOfRange(format!(
                "delta must be finite and >= 0, got {delta}"
            )));
        }
        let limits = self.domain_limits(side);
        if self.is_degenerate() {
            return Err(Error::DegenerateSpectrum);
        }
        if delta >= limits.delta_star {
            return Err(Error::DeltaOutOfRange {
                delta,
                delta_star: limits.delta_star,
            });
        }
        let oriented = self.oriented(side);
        if delta == 0.0 {
            let stats = oriented.tilted_stats(0.0)?;
            return Ok(RatePoint {
                lambda: 0.0,
                side,
                delta: 0.0,
                rate: 0.0,
                sigma2: stats.sigma2,
                m3: stats.m3,
            });
        }
        let lambda = solve_shift(&oriented, delta)?;
        let stats = oriented.tilted_stats(lambda)?;
        let rate = (lambda * (oriented.mean + delta) - oriented.cgf(lambda)).max(0.0);
        Ok(RatePoint {
            lambda,
            side,
            delta,
            rate,
            sigma2: stats.sigma2,
            m3: stats.m3,
        })
    }

    /// Parametric sweep of the rate curve: one point per tilt magnitude,
    /// no root finding involved.
    pub fn rate_curve(&self, side: Side, lambdas: &[f64]) -> Result<Vec<RatePoint>> {
        let oriented = self.oriented(side);
        let mut out = Vec::with_capacity(lambdas.len());
        for &lambda in lambdas {
            if !(lambda >= 0.0) || !lambda.is_finite() {
                return Err(Error::ParamOutOfRange(format!(
                    "lambda grid values must be finite and >= 0, got {lambda}"
                )));
            }
            let stats = oriented.tilted_stats(lambda)?;
            let delta = stats.shift;
            let rate = (lambda * (oriented.mean + delta) - oriented.cgf(lambda)).max(0.0);
            out.push(RatePoint {
                lambda,
                side,
                delta,
                rate,
                sigma2: stats.sigma2,
                m3: stats.m3,
            });
        }
        Ok(out)
    }

    /// The tilted composite Z with per-component weights
    /// w_i e^{lambda v_i} / normalizer, in right-facing coordinates for the
    /// given side. Z is the law of a single letter under the change of
    /// measure used in the strong-bound proof; its untilted moments are the
    /// lambda-tilted moments of `self`.
    pub fn tilted(&self, side: Side, lambda: f64) -> Result<CompositeSpectrum> {
        let oriented = self.oriented(side);
        let mut components = Vec::with_capacity(oriented.components.len());
        for (t, s) in &oriented.components {
            let max_exp = s
                .entries
                .iter()
                .map(|&(v, _)| lambda * v)
                .fold(f64::NEG_INFINITY, f64::max);
            let mut total = KahanSum::new();
            let raw: Vec<(f64, f64)> = s
                .entries
                .iter()
                .map(|&(v, w)| {
                    let tw = w * (lambda * v - max_exp).exp();
                    total.add(tw);
                    (v, tw)
                })
                .collect();
            let norm = total.value();
            let entries: Vec<(f64, f64)> = raw
                .into_iter()
                .filter_map(|(v, tw)| {
                    let w = tw / norm;
                    (w > 0.0).then_some((v, w))
                })
                .collect();
            // Renormalize after dropping underflowed atoms so the spectrum
            // invariant holds exactly.
            let kept: f64 = entries.iter().map(|&(_, w)| w).sum();
            let entries = entries
                .into_iter()
                .map(|(v, w)| (v, w / kept))
                .collect::<Vec<_>>();
            components.push((*t, ValueSpectrum::new(entries)?));
        }
        CompositeSpectrum::new(components)
    }
}

struct ComponentMoments {
    mean: f64,
    var: f64,
    abs3: f64,
}

fn component_cgf(s: &ValueSpectrum, theta: f64) -> f64 {
    let max_exp = s
        .entries
        .iter()
        .map(|&(v, _)| theta * v)
        .fold(f64::NEG_INFINITY, f64::max);
    let mut sum = KahanSum::new();
    for &(v, w) in &s.entries {
        sum.add(w * (theta * v - max_exp).exp());
    }
    max_exp + sum.value().ln()
}

fn component_tilted_moments(s: &ValueSpectrum, theta: f64) -> ComponentMoments {
    let max_exp = s
        .entries
        .iter()
        .map(|&(v, _)| theta * v)
        .fold(f64::NEG_INFINITY, f64::max);
    let mut norm = KahanSum::new();
    let weights: Vec<f64> = s
        .entries
        .iter()
        .map(|&(v, w)| {
            let tw = w * (theta * v - max_exp).exp();
            norm.add(tw);
            tw
        })
        .collect();
    let norm = norm.value();
    let mut mean = KahanSum::new();
    for (&(v, _), &tw) in s.entries.iter().zip(&weights) {
        mean.add(tw / norm * v);
    }
    let mean = mean.value();
    let mut var = KahanSum::new();
    let mut abs3 = KahanSum::new();
    for (&(v, _), &tw) in s.entries.iter().zip(&weights) {
        let d = v - mean;
        let p = tw / norm;
        var.add(p * d * d);
        abs3.add(p * d.abs().powi(3));
    }
    ComponentMoments {
        mean,
        var: var.value(),
        abs3: abs3.value(),
    }
}

/// Solve shift(theta) = delta for theta > 0 on a right-facing spectrum.
/// Brackets by doubling, then runs Newton (shift' = sigma^2) safeguarded by
/// bisection; the hybrid stays robust near delta_star where shift flattens.
fn solve_shift(spec: &CompositeSpectrum, delta: f64) -> Result<f64> {
    let tol = 1e-13 * delta.max(1.0);
    let mut lo = 0.0f64;
    let mut hi = 1.0f64;
    let mut found = false;
    for _ in 0..200 {
        if spec.tilted_stats(hi)?.shift >= delta {
            found = true;
            break;
        }
        lo = hi;
        hi *= 2.0;
    }
    if !found {
        return Err(Error::Domain(format!(
            "failed to bracket shift = {delta}"
        )));
    }
    let mut theta = 0.5 * (lo + hi);
    for _ in 0..200 {
        let stats = spec.tilted_stats(theta)?;
        let f = stats.shift - delta;
        if f.abs() <= tol {
            return Ok(theta);
        }
        if f < 0.0 {
            lo = theta;
        } else {
            hi = theta;
        }
        let newton = if stats.sigma2 > 0.0 {
            theta - f / stats.sigma2
        } else {
            f64::NAN
        };
        theta = if newton.is_finite() && newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
        if hi - lo <= f64::EPSILON * hi {
            return Ok(theta);
        }
    }
    Ok(theta)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bern12() -> ValueSpectrum {
        ValueSpectrum::new(vec![(-(0.12f64.ln()), 0.12), (-(0.88f64.ln()), 0.88)]).unwrap()
    }

    #[test]
    fn construction_validates() {
        assert!(ValueSpectrum::new(vec![]).is_err());
        assert!(ValueSpectrum::new(vec![(1.0, 0.5), (2.0, 0.4)]).is_err());
        assert!(ValueSpectrum::new(vec![(f64::NAN, 1.0)]).is_err());
        assert!(ValueSpectrum::new(vec![(1.0, -0.5), (2.0, 1.5)]).is_err());
        assert!(ValueSpectrum::new(vec![(1.0, 0.0), (2.0, 1.0)]).is_err());
    }

    #[test]
    fn merging_and_mean() {
        // uniform over 4 symbols merges to a single ln(4) atom
        let s = ValueSpectrum::new(vec![(4.0f64.ln(), 0.25); 4]).unwrap();
        assert_eq!(s.entries().len(), 1);
        assert!(s.is_degenerate());
        assert!((s.mean() - 4.0f64.ln()).abs() < 1e-15);

        let s = bern12();
        assert_eq!(s.entries().len(), 2);
        assert!((s.mean() - 0.3669249912908889).abs() < 1e-13);
    }

    #[test]
    fn cgf_examples() {
        // degenerate: K(theta) = theta v
        let s: CompositeSpectrum = ValueSpectrum::new(vec![(2.0f64.ln(), 1.0)])
            .unwrap()
            .into();
        assert!((s.cgf(3.0) - 3.0 * 2.0f64.ln()).abs() < 1e-14);
        // Bernoulli(0.12) at theta = 1: ln sum p_i^{-1} p_i ... = ln 2
        let s: CompositeSpectrum = bern12().into();
        assert!((s.cgf(1.0) - 2.0f64.ln()).abs() < 1e-13);
        // no overflow for |theta v| ~ 700
        assert!(s.cgf(300.0).is_finite());
        assert!(s.cgf(-300.0).is_finite());
    }

    #[test]
    fn tilted_stats_at_zero() {
        let s: CompositeSpectrum = bern12().into();
        let st = s.tilted_stats(0.0).unwrap();
        assert!(st.shift.abs() < 1e-14);
        // p(1-p) ln^2((1-p)/p), frozen from the direct moment-sum oracle
        assert!((st.sigma2 - 0.4192085526948199).abs() < 1e-12);
        assert!((st.m3 - 0.6588402823891892).abs() < 1e-12);
    }

    #[test]
    fn degenerate_rejected() {
        let s: CompositeSpectrum = ValueSpectrum::new(vec![(1.0, 1.0)]).unwrap().into();
        assert_eq!(s.tilted_stats(0.5).unwrap_err(), Error::DegenerateSpectrum);
        assert_eq!(s.rate_at(Side::Right, 0.0).unwrap_err(), Error::DegenerateSpectrum);
        assert_eq!(s.domain_limits(Side::Right).delta_star, 0.0);
    }

    #[test]
    fn domain_limits_bern() {
        let s: CompositeSpectrum = bern12().into();
        let right = s.domain_limits(Side::Right);
        assert_eq!(right.lambda_star, f64::INFINITY);
        assert!((right.delta_star - 1.7533385448642944).abs() < 1e-12);
        let left = s.domain_limits(Side::Left);
        assert!((left.delta_star - 0.23909161976282473).abs() < 1e-12);
    }

    #[test]
    fn rate_at_basics() {
        let s: CompositeSpectrum = bern12().into();
        let p0 = s.rate_at(Side::Right, 0.0).unwrap();
        assert_eq!(p0.lambda, 0.0);
        assert_eq!(p0.rate, 0.0);

        // quadratic regime at delta = 1e-3
        let p = s.rate_at(Side::Right, 1e-3).unwrap();
        let quad = 1e-6 / (2.0 * 0.4192085526948199);
        assert!((p.rate / quad - 1.0).abs() < 0.01);

        // out of range
        assert!(matches!(
            s.rate_at(Side::Right, 2.0),
            Err(Error::DeltaOutOfRange { .. })
        ));
        assert!(s.rate_at(Side::Right, -0.1).is_err());
    }

    #[test]
    fn rate_solution_satisfies_parametric_identity() {
        let s: CompositeSpectrum = bern12().into();
        for side in [Side::Right, Side::Left] {
            let dstar = s.domain_limits(side).delta_star;
            for f in [0.05, 0.3, 0.7, 0.95, 0.999] {
                let delta = f * dstar;
                let p = s.rate_at(side, delta).unwrap();
                let stats = s.oriented(side).tilted_stats(p.lambda).unwrap();
                assert!(
                    (stats.shift - delta).abs() <= 1e-12 * delta.max(1.0),
                    "shift mismatch at side={side} delta={delta}"
                );
                assert!(p.rate >= 0.0);
            }
        }
    }

    #[test]
    fn rate_curve_monotone() {
        let s: CompositeSpectrum = bern12().into();
        let lambdas: Vec<f64> = (0..=50).map(|i| i as f64 * 0.1).collect();
        let curve = s.rate_curve(Side::Right, &lambdas).unwrap();
        assert_eq!(curve[0].delta, 0.0);
        assert_eq!(curve[0].rate, 0.0);
        for w in curve.windows(2) {
            assert!(w[1].delta >= w[0].delta);
            assert!(w[1].rate >= w[0].rate);
        }
    }

    #[test]
    fn left_side_is_right_of_negation() {
        let s: CompositeSpectrum = bern12().into();
        let n: CompositeSpectrum = bern12().negated().into();
        let a = s.rate_at(Side::Left, 0.1).unwrap();
        let b = n.rate_at(Side::Right, 0.1).unwrap();
        assert_eq!(a.rate, b.rate);
        assert_eq!(a.lambda, b.lambda);
    }

    #[test]
    fn composite_single_component_matches_value_path() {
        let vs = bern12();
        let direct: CompositeSpectrum = vs.clone().into();
        let tripled = CompositeSpectrum::new(vec![
            (0.25, vs.clone()),
            (0.25, vs.clone()),
            (0.5, vs),
        ])
        .unwrap();
        // identical components coalesce to one with t = 1
        assert_eq!(tripled.components().len(), 1);
        assert_eq!(tripled.components()[0].0, 1.0);
        for theta in [-1.5, 0.0, 0.7, 3.0] {
            assert_eq!(direct.cgf(theta), tripled.cgf(theta));
            let a = direct.tilted_stats(theta).unwrap();
            let b = tripled.tilted_stats(theta).unwrap();
            assert_eq!(a.shift, b.shift);
            assert_eq!(a.sigma2, b.sigma2);
            assert_eq!(a.m3, b.m3);
        }
    }

    #[test]
    fn tilted_spectrum_mean_is_shifted() {
        let s: CompositeSpectrum = bern12().into();
        let p = s.rate_at(Side::Right, 0.4).unwrap();
        let z = s.tilted(Side::Right, p.lambda).unwrap();
        assert!((z.mean() - (s.mean() + 0.4)).abs() < 1e-11);
        let zs = z.tilted_stats(0.0).unwrap();
        assert!((zs.sigma2 - p.sigma2).abs() < 1e-12);
        assert!((zs.m3 - p.m3).abs() < 1e-12);
    }
}
