//! Spectrum constructors for the settings the bound machinery is applied
//! to: entropy of a discrete source, conditional entropy of a joint pair,
//! mutual information, and per-type relative entropy against a channel.
//! Includes the binary-symmetric-channel closed forms and the Gauss-Hermite
//! discretization of the binary-input Gaussian channel.

use crate::error::{Error, Result};
use crate::numeric::{kahan_sum, softplus, KahanSum};
use crate::quadrature::gauss_hermite;
use crate::spectrum::{CompositeSpectrum, ValueSpectrum};

/// Probability mass function over a finite alphabet. Zero-probability
/// symbols are stripped at construction; the downstream integrals assume
/// positive mass everywhere.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteDistribution {
    probs: Vec<f64>,
}

impl DiscreteDistribution {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        for &p in &probs {
            if !p.is_finite() || p < 0.0 {
                return Err(Error::InvalidDistribution(format!(
                    "probability {p} must be finite and >= 0"
                )));
            }
        }
        let kept: Vec<f64> = probs.into_iter().filter(|&p| p > 0.0).collect();
        if kept.is_empty() {
            return Err(Error::InvalidDistribution("all probabilities zero".into()));
        }
        let total = kahan_sum(kept.iter().copied());
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidDistribution(format!(
                "probabilities sum to {total}, expected 1"
            )));
        }
        Ok(Self { probs: kept })
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }
}

/// Joint pmf p(x, y) over finite X x Y, stored row-major with x as the row
/// index.
#[derive(Debug, Clone, PartialEq)]
pub struct JointDistribution {
    probs: Vec<f64>,
    rows: usize,
    cols: usize,
}

impl JointDistribution {
    pub fn new(matrix: Vec<Vec<f64>>) -> Result<Self> {
        let rows = matrix.len();
        if rows == 0 {
            return Err(Error::InvalidDistribution("empty joint matrix".into()));
        }
        let cols = matrix[0].len();
        if cols == 0 || matrix.iter().any(|r| r.len() != cols) {
            return Err(Error::InvalidDistribution(
                "joint matrix rows must be non-empty and equal length".into(),
            ));
        }
        let mut probs = Vec::with_capacity(rows * cols);
        let mut total = KahanSum::new();
        for row in &matrix {
            for &p in row {
                if !p.is_finite() || p < 0.0 {
                    return Err(Error::InvalidDistribution(format!(
                        "joint entry {p} must be finite and >= 0"
                    )));
                }
                total.add(p);
                probs.push(p);
            }
        }
        if (total.value() - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidDistribution(format!(
                "joint mass is {}, expected 1",
                total.value()
            )));
        }
        Ok(Self { probs, rows, cols })
    }

    #[inline]
    pub fn prob(&self, x: usize, y: usize) -> f64 {
        self.probs[x * self.cols + y]
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Marginal over x (column sums).
    pub fn y_marginal(&self) -> Vec<f64> {
        (0..self.cols)
            .map(|y| kahan_sum((0..self.rows).map(|x| self.prob(x, y))))
            .collect()
    }

    /// Marginal over y (row sums).
    pub fn x_marginal(&self) -> Vec<f64> {
        (0..self.rows)
            .map(|x| kahan_sum((0..self.cols).map(|y| self.prob(x, y))))
            .collect()
    }
}

/// Channel description accepted by [`divergence_composite`].
#[derive(Debug, Clone, PartialEq)]
pub enum ChannelModel {
    /// Row-stochastic transition matrix p(y | x).
    Finite(Vec<Vec<f64>>),
    /// Binary-input Gaussian channel with noise deviation `sigma`,
    /// discretized on `nodes` Gauss-Hermite points.
    BinaryInputGaussian { sigma: f64, nodes: usize },
}

impl ChannelModel {
    pub fn finite(matrix: Vec<Vec<f64>>) -> Result<Self> {
        if matrix.is_empty() || matrix[0].is_empty() {
            return Err(Error::InvalidDistribution("empty channel matrix".into()));
        }
        let cols = matrix[0].len();
        for (x, row) in matrix.iter().enumerate() {
            if row.len() != cols {
                return Err(Error::InvalidDistribution(
                    "channel rows must have equal length".into(),
                ));
            }
            for &p in row {
                if !p.is_finite() || p < 0.0 {
                    return Err(Error::InvalidDistribution(format!(
                        "channel entry {p} must be finite and >= 0"
                    )));
                }
            }
            let s = kahan_sum(row.iter().copied());
            if (s - 1.0).abs() > 1e-12 {
                return Err(Error::InvalidDistribution(format!(
                    "channel row {x} sums to {s}, expected 1"
                )));
            }
        }
        Ok(ChannelModel::Finite(matrix))
    }

    pub fn binary_input_gaussian(sigma: f64, nodes: usize) -> Result<Self> {
        if !(sigma > 0.0) || !sigma.is_finite() {
            return Err(Error::Domain(format!("sigma must be positive, got {sigma}")));
        }
        if nodes < 16 {
            return Err(Error::ParamOutOfRange(format!(
                "need at least 16 quadrature nodes, got {nodes}"
            )));
        }
        Ok(ChannelModel::BinaryInputGaussian { sigma, nodes })
    }
}

/// Spectrum of -ln p(X): weights p(x), values -ln p(x), mean H(X).
pub fn entropy_spectrum(p: &DiscreteDistribution) -> Result<ValueSpectrum> {
    ValueSpectrum::new(p.probs.iter().map(|&w| (-w.ln(), w)).collect())
}

/// Spectrum of -ln p(X|Y): weights p(x, y), values -ln p(x|y), mean H(X|Y).
/// Requires every y-marginal to be positive.
pub fn conditional_spectrum(j: &JointDistribution) -> Result<ValueSpectrum> {
    let py = j.y_marginal();
    if let Some(y) = py.iter().position(|&p| p <= 0.0) {
        return Err(Error::ZeroMarginal(y));
    }
    let mut entries = Vec::with_capacity(j.rows * j.cols);
    for x in 0..j.rows {
        for y in 0..j.cols {
            let w = j.prob(x, y);
            if w > 0.0 {
                entries.push((-(w / py[y]).ln(), w));
            }
        }
    }
    ValueSpectrum::new(entries)
}

/// Spectrum of ln(p(Y|X)/p(Y)): weights p(x, y), mean I(X;Y).
pub fn mi_spectrum(j: &JointDistribution) -> Result<ValueSpectrum> {
    let py = j.y_marginal();
    if let Some(y) = py.iter().position(|&p| p <= 0.0) {
        return Err(Error::ZeroMarginal(y));
    }
    let px = j.x_marginal();
    let mut entries = Vec::with_capacity(j.rows * j.cols);
    for x in 0..j.rows {
        for y in 0..j.cols {
            let w = j.prob(x, y);
            if w > 0.0 {
                entries.push(((w / (px[x] * py[y])).ln(), w));
            }
        }
    }
    ValueSpectrum::new(entries)
}

/// Uniform-input BSC joint: p(x, y) = (1-p)/2 on the diagonal, p/2 off it.
pub fn bsc_joint(p: f64) -> Result<JointDistribution> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::Domain(format!(
            "crossover probability must lie in (0,1), got {p}"
        )));
    }
    let good = (1.0 - p) / 2.0;
    let bad = p / 2.0;
    JointDistribution::new(vec![vec![good, bad], vec![bad, good]])
}

/// Closed forms for the uniform-input BSC conditional spectrum.
#[derive(Debug, Clone, Copy)]
pub struct BscClosedForms {
    pub p: f64,
    /// p(1-p) ln^2((1-p)/p)
    pub sigma2: f64,
    /// (1-p) ln((1-p)/p)
    pub delta_star: f64,
    /// -ln p
    pub r_max: f64,
}

impl BscClosedForms {
    /// Binary divergence D(q || p) with the 0 ln 0 = 0 convention.
    fn binary_kl(q: f64, p: f64) -> f64 {
        let a = if q > 0.0 { q * (q / p).ln() } else { 0.0 };
        let b = if q < 1.0 {
            (1.0 - q) * ((1.0 - q) / (1.0 - p)).ln()
        } else {
            0.0
        };
        a + b
    }

    /// Piecewise rate: D(p + delta/ln((1-p)/p) || p) on [0, delta_star),
    /// +infinity beyond.
    pub fn rate(&self, delta: f64) -> f64 {
        if delta >= self.delta_star {
            return f64::INFINITY;
        }
        let ratio_log = ((1.0 - self.p) / self.p).ln();
        Self::binary_kl(self.p + delta / ratio_log, self.p)
    }
}

/// Closed-form sigma^2, delta*, r_max and rate function for the BSC.
/// p = 1/2 has sigma^2 = 0 and is rejected.
pub fn bsc_closed_forms(p: f64) -> Result<BscClosedForms> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::Domain(format!(
            "crossover probability must lie in (0,1), got {p}"
        )));
    }
    if p == 0.5 {
        return Err(Error::Domain(
            "BSC with p = 1/2 has a constant conditional value (sigma^2 = 0)".into(),
        ));
    }
    let ratio_log = ((1.0 - p) / p).ln();
    Ok(BscClosedForms {
        p,
        sigma2: p * (1.0 - p) * ratio_log * ratio_log,
        delta_star: (1.0 - p) * ratio_log,
        r_max: -p.ln(),
    })
}

/// Gauss-Hermite discretization of the binary-input Gaussian channel
/// conditional spectrum. The continuous channel has lambda* = delta* =
/// infinity; a finite node set necessarily truncates that, so the reported
/// domain limit grows with `nodes` and `delta_star_truncated` is always set.
#[derive(Debug, Clone)]
pub struct BigcSpectrum {
    pub spectrum: ValueSpectrum,
    pub nodes: usize,
    pub delta_star_truncated: bool,
}

/// Conditional-entropy spectrum of the binary-input Gaussian channel with
/// noise deviation `sigma`: the value is softplus(-2(sigma u + 1)/sigma^2)
/// under a standard Gaussian u, discretized on `nodes` Gauss-Hermite points.
/// Mean = H(X|Y) < ln 2.
pub fn bigc_spectrum(sigma: f64, nodes: usize) -> Result<BigcSpectrum> {
    if !(sigma > 0.0) || !sigma.is_finite() {
        return Err(Error::Domain(format!("sigma must be positive, got {sigma}")));
    }
    if nodes < 16 {
        return Err(Error::ParamOutOfRange(format!(
            "need at least 16 quadrature nodes, got {nodes}"
        )));
    }
    let rule = gauss_hermite(nodes)?;
    let (x, w) = (&rule.0, &rule.1);
    let inv_sqrt_pi = 1.0 / std::f64::consts::PI.sqrt();
    let mut entries = Vec::with_capacity(nodes);
    for (&xi, &wi) in x.iter().zip(w) {
        let u = std::f64::consts::SQRT_2 * xi;
        let weight = wi * inv_sqrt_pi;
        if weight > 0.0 {
            entries.push((softplus(-2.0 * (sigma * u + 1.0) / (sigma * sigma)), weight));
        }
    }
    // renormalize the kept weights so the spectrum invariant holds exactly
    let total = kahan_sum(entries.iter().map(|&(_, w)| w));
    let entries = entries.into_iter().map(|(v, w)| (v, w / total)).collect();
    Ok(BigcSpectrum {
        spectrum: ValueSpectrum::new(entries)?,
        nodes,
        delta_star_truncated: true,
    })
}

/// Type-weighted composite of the per-input divergence spectra
/// ln(p(Y|x)/q_t(Y)) with Y ~ p(.|x), where q_t(y) = sum_x t(x) p(y|x).
/// Mean = I(t;P). Finite channels only; `t` must cover every input.
pub fn divergence_composite(
    t: &DiscreteDistribution,
    ch: &ChannelModel,
) -> Result<CompositeSpectrum> {
    let matrix = match ch {
        ChannelModel::Finite(m) => m,
        ChannelModel::BinaryInputGaussian { .. } => return Err(Error::FiniteChannelRequired),
    };
    if t.len() != matrix.len() {
        return Err(Error::NotFullSupport);
    }
    let cols = matrix[0].len();
    let q_t: Vec<f64> = (0..cols)
        .map(|y| kahan_sum(t.probs().iter().zip(matrix).map(|(&tx, row)| tx * row[y])))
        .collect();
    let mut components = Vec::with_capacity(t.len());
    for (&tx, row) in t.probs().iter().zip(matrix) {
        let entries: Vec<(f64, f64)> = row
            .iter()
            .zip(&q_t)
            .filter(|&(&pyx, _)| pyx > 0.0)
            .map(|(&pyx, &qy)| ((pyx / qy).ln(), pyx))
            .collect();
        components.push((tx, ValueSpectrum::new(entries)?));
    }
    CompositeSpectrum::new(components)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectrum::Side;

    #[test]
    fn discrete_distribution_strips_zeros() {
        let d = DiscreteDistribution::new(vec![0.5, 0.0, 0.5]).unwrap();
        assert_eq!(d.probs(), &[0.5, 0.5]);
        assert!(DiscreteDistribution::new(vec![0.5, 0.6]).is_err());
        assert!(DiscreteDistribution::new(vec![-0.1, 1.1]).is_err());
        assert!(DiscreteDistribution::new(vec![0.0, 0.0]).is_err());
    }

    #[test]
    fn entropy_spectrum_examples() {
        // uniform source merges to one atom
        let u = DiscreteDistribution::new(vec![0.25; 4]).unwrap();
        let s = entropy_spectrum(&u).unwrap();
        assert!(s.is_degenerate());
        assert!((s.mean() - 4.0f64.ln()).abs() < 1e-15);

        let b = DiscreteDistribution::new(vec![0.12, 0.88]).unwrap();
        let s = entropy_spectrum(&b).unwrap();
        assert_eq!(s.entries().len(), 2);
        assert!((s.mean() - 0.3669249912908889).abs() < 1e-13);

        let half = DiscreteDistribution::new(vec![0.5, 0.5]).unwrap();
        let s = entropy_spectrum(&half).unwrap();
        assert!(s.is_degenerate());
        assert!((s.mean() - std::f64::consts::LN_2).abs() < 1e-15);
    }

    #[test]
    fn conditional_of_product_joint_matches_entropy_bitwise() {
        // p(y) = (0.5, 0.5) keeps p(x)p(y)/p(y) exact in IEEE arithmetic
        let px = [0.12, 0.88];
        let joint = JointDistribution::new(vec![
            vec![px[0] * 0.5, px[0] * 0.5],
            vec![px[1] * 0.5, px[1] * 0.5],
        ])
        .unwrap();
        let cond = conditional_spectrum(&joint).unwrap();
        let ent = entropy_spectrum(&DiscreteDistribution::new(px.to_vec()).unwrap()).unwrap();
        assert_eq!(cond.entries(), ent.entries());
        assert_eq!(cond.mean(), ent.mean());
    }

    #[test]
    fn bsc_conditional_spectrum() {
        let j = bsc_joint(0.1).unwrap();
        let s = conditional_spectrum(&j).unwrap();
        assert_eq!(s.entries().len(), 2);
        assert!((s.mean() - 0.32508297339144845).abs() < 1e-13);
        let cs: CompositeSpectrum = s.into();
        let st = cs.tilted_stats(0.0).unwrap();
        assert!((st.sigma2 - bsc_sigma2_ref()).abs() < 1e-12);
    }

    // frozen from the closed form p(1-p) ln^2((1-p)/p) at p = 0.1
    fn bsc_sigma2_ref() -> f64 {
        0.43450162590742404
    }

    #[test]
    fn deterministic_channel_is_degenerate() {
        let j = JointDistribution::new(vec![vec![0.5, 0.0], vec![0.0, 0.5]]).unwrap();
        let s = conditional_spectrum(&j).unwrap();
        assert!(s.is_degenerate());
        assert_eq!(s.mean(), 0.0);
    }

    #[test]
    fn mi_spectrum_examples() {
        // independent joint: single zero atom
        let j = JointDistribution::new(vec![vec![0.25, 0.25], vec![0.25, 0.25]]).unwrap();
        let s = mi_spectrum(&j).unwrap();
        assert!(s.is_degenerate());
        assert!(s.mean().abs() < 1e-15);

        let j = bsc_joint(0.1).unwrap();
        let s = mi_spectrum(&j).unwrap();
        assert!((s.mean() - 0.3680642071639461).abs() < 1e-13);
        // pointwise identity with the conditional spectrum: v_I = ln2 - v_H
        let c = conditional_spectrum(&j).unwrap();
        let mut flipped: Vec<(f64, f64)> = c
            .entries()
            .iter()
            .map(|&(v, w)| (std::f64::consts::LN_2 - v, w))
            .collect();
        flipped.sort_by(|a, b| a.0.total_cmp(&b.0));
        for (a, b) in s.entries().iter().zip(&flipped) {
            assert!((a.0 - b.0).abs() < 1e-12);
            assert!((a.1 - b.1).abs() < 1e-15);
        }
        // sigma_I^2 = sigma_H^2 for the uniform-input BSC
        let si: CompositeSpectrum = s.into();
        let sc: CompositeSpectrum = c.into();
        let a = si.tilted_stats(0.0).unwrap();
        let b = sc.tilted_stats(0.0).unwrap();
        assert!((a.sigma2 - b.sigma2).abs() < 1e-12);
    }

    #[test]
    fn bsc_closed_forms_values() {
        let cf = bsc_closed_forms(0.1).unwrap();
        assert!((cf.sigma2 - bsc_sigma2_ref()).abs() < 1e-13);
        assert!((cf.delta_star - 1.9775021196025975).abs() < 1e-13);
        assert!((cf.r_max - 2.302585092994046).abs() < 1e-14);
        assert_eq!(cf.rate(0.0), 0.0);
        assert!(cf.rate(cf.delta_star).is_infinite());
        assert!(bsc_closed_forms(0.5).is_err());
    }

    #[test]
    fn bsc_closed_rate_matches_generic_path() {
        let cf = bsc_closed_forms(0.1).unwrap();
        let spec: CompositeSpectrum = conditional_spectrum(&bsc_joint(0.1).unwrap())
            .unwrap()
            .into();
        for i in 1..50 {
            let delta = cf.delta_star * (i as f64) / 50.0;
            let generic = spec.rate_at(Side::Right, delta).unwrap().rate;
            assert!(
                (generic - cf.rate(delta)).abs() <= 1e-10,
                "mismatch at delta={delta}: {generic} vs {}",
                cf.rate(delta)
            );
        }
    }

    #[test]
    fn bigc_basic_properties() {
        assert!(bigc_spectrum(0.0, 128).is_err());
        assert!(bigc_spectrum(1.0, 8).is_err());

        let b = bigc_spectrum(1.0, 128).unwrap();
        assert!(b.delta_star_truncated);
        let mean = b.spectrum.mean();
        assert!(mean > 0.0 && mean < std::f64::consts::LN_2);
        // frozen from an independent 256-node quadrature
        assert!((mean - 0.35631636021311).abs() < 1e-10);

        // nearly noiseless channel
        let tiny = bigc_spectrum(0.1, 128).unwrap();
        assert!(tiny.spectrum.mean() < 1e-8);

        // values are softplus outputs: nonnegative, decreasing in u means
        // increasing along the sorted value axis is automatic; check range
        assert!(b.spectrum.min_value() >= 0.0);
    }

    #[test]
    fn divergence_composite_examples() {
        // uniform input BSC reduces to the MI spectrum (single component)
        let t = DiscreteDistribution::new(vec![0.5, 0.5]).unwrap();
        let ch = ChannelModel::finite(vec![vec![0.9, 0.1], vec![0.1, 0.9]]).unwrap();
        let comp = divergence_composite(&t, &ch).unwrap();
        assert_eq!(comp.components().len(), 1);
        let mi = mi_spectrum(&bsc_joint(0.1).unwrap()).unwrap();
        for (a, b) in comp.components()[0].1.entries().iter().zip(mi.entries()) {
            assert!((a.0 - b.0).abs() < 1e-12);
            assert!((a.1 - b.1).abs() < 1e-15);
        }

        // identical rows: I(t;P) = 0, degenerate
        let ch = ChannelModel::finite(vec![vec![0.3, 0.7], vec![0.3, 0.7]]).unwrap();
        let comp = divergence_composite(&t, &ch).unwrap();
        assert!(comp.is_degenerate());
        assert!(comp.mean().abs() < 1e-15);

        // 2x3 example: mean matches the direct double sum
        let t = DiscreteDistribution::new(vec![0.25, 0.75]).unwrap();
        let rows = vec![vec![0.7, 0.2, 0.1], vec![0.1, 0.2, 0.7]];
        let ch = ChannelModel::finite(rows.clone()).unwrap();
        let comp = divergence_composite(&t, &ch).unwrap();
        let q: Vec<f64> = (0..3)
            .map(|y| 0.25 * rows[0][y] + 0.75 * rows[1][y])
            .collect();
        let direct: f64 = (0..2)
            .map(|x| {
                [0.25, 0.75][x]
                    * (0..3)
                        .map(|y| rows[x][y] * (rows[x][y] / q[y]).ln())
                        .sum::<f64>()
            })
            .sum();
        assert!((comp.mean() - direct).abs() < 1e-12);
        assert!((comp.mean() - 0.195452970639).abs() < 1e-10);

        // BIGC divergence not supported
        let big = ChannelModel::binary_input_gaussian(1.0, 128).unwrap();
        assert_eq!(
            divergence_composite(&t, &big),
            Err(Error::FiniteChannelRequired)
        );

        // support mismatch
        let t3 = DiscreteDistribution::new(vec![0.5, 0.25, 0.25]).unwrap();
        assert_eq!(
            divergence_composite(&t3, &ch),
            Err(Error::NotFullSupport)
        );
    }
}
