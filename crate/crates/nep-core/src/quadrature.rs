//! Gauss-Hermite nodes and weights by Golub-Welsch: eigен-decompose the
//! symmetric tridiagonal Jacobi matrix (zero diagonal, off-diagonal
//! sqrt(k/2)) with the implicit-shift QL iteration, tracking only the first
//! row of the eigenvector matrix. Rules integrate
//! `int e^{-x^2} f(x) dx ~= sum w_i f(x_i)`, so `sum w_i = sqrt(pi)`.

use std::collections::HashMap;
use std::sync::{Arc, OnceLock, RwLock};

use crate::error::{Error, Result};

type Rule = Arc<(Vec<f64>, Vec<f64>)>;

/// Nodes and weights for the given order, computed once per order and
/// cached (single writer, many readers).
pub fn gauss_hermite(n: usize) -> Result<Rule> {
    if n < 1 {
        return Err(Error::ParamOutOfRange("quadrature order must be >= 1".into()));
    }
    static CACHE: OnceLock<RwLock<HashMap<usize, Rule>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| RwLock::new(HashMap::new()));
    if let Some(rule) = cache.read().expect("quadrature cache poisoned").get(&n) {
        return Ok(Arc::clone(rule));
    }
    let rule: Rule = Arc::new(compute_rule(n)?);
    let mut map = cache.write().expect("quadrature cache poisoned");
    Ok(Arc::clone(map.entry(n).or_insert(rule)))
}

fn compute_rule(n: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    let mut diag = vec![0.0f64; n];
    // off-diagonal beta_k = sqrt(k/2); e[i] couples i and i+1
    let mut off: Vec<f64> = (1..n).map(|k| (k as f64 / 2.0).sqrt()).collect();
    off.push(0.0);
    // first row of the eigenvector matrix
    let mut first = vec![0.0f64; n];
    first[0] = 1.0;

    tridiagonal_ql(&mut diag, &mut off, &mut first)?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| diag[a].total_cmp(&diag[b]));
    let sqrt_pi = std::f64::consts::PI.sqrt();
    let nodes: Vec<f64> = order.iter().map(|&i| diag[i]).collect();
    let weights: Vec<f64> = order.iter().map(|&i| sqrt_pi * first[i] * first[i]).collect();
    Ok((nodes, weights))
}

/// Implicit-shift QL for a symmetric tridiagonal matrix (EISPACK tql2),
/// reduced to track one row of the accumulated rotations.
fn tridiagonal_ql(d: &mut [f64], e: &mut [f64], z: &mut [f64]) -> Result<()> {
    let n = d.len();
    if n == 1 {
        return Ok(());
    }
    for l in 0..n {
        let mut iter = 0;
        loop {
            // find a negligible off-diagonal element
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 50 {
                return Err(Error::Domain(
                    "tridiagonal QL failed to converge".into(),
                ));
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c) = (1.0f64, 1.0f64);
            let mut p = 0.0f64;
            for i in (l..m).rev() {
                let mut f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                // accumulate the rotation into the tracked row
                f = z[i + 1];
                z[i + 1] = s * z[i] + c * f;
                z[i] = c * z[i] - s * f;
            }
            if r == 0.0 && m > l + 1 {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_five_reference() {
        let rule = gauss_hermite(5).unwrap();
        let (x, w) = (&rule.0, &rule.1);
        let x_ref = [
            -2.0201828704560856,
            -0.9585724646138185,
            0.0,
            0.9585724646138185,
            2.0201828704560856,
        ];
        let w_ref = [
            0.019953242059045913,
            0.3936193231522412,
            0.9453087204829419,
            0.3936193231522412,
            0.019953242059045913,
        ];
        for i in 0..5 {
            assert!((x[i] - x_ref[i]).abs() < 1e-12, "node {i}");
            assert!((w[i] - w_ref[i]).abs() < 1e-12, "weight {i}");
        }
    }

    #[test]
    fn moments_match_gaussian_integrals() {
        for n in [16usize, 64, 128, 256] {
            let rule = gauss_hermite(n).unwrap();
            let (x, w) = (&rule.0, &rule.1);
            let sqrt_pi = std::f64::consts::PI.sqrt();
            let m0: f64 = w.iter().sum();
            let m2: f64 = x.iter().zip(w).map(|(xi, wi)| wi * xi * xi).sum();
            let m4: f64 = x.iter().zip(w).map(|(xi, wi)| wi * xi.powi(4)).sum();
            assert!((m0 / sqrt_pi - 1.0).abs() < 1e-13, "m0 at n={n}");
            assert!((m2 / (sqrt_pi / 2.0) - 1.0).abs() < 1e-12, "m2 at n={n}");
            assert!((m4 / (0.75 * sqrt_pi) - 1.0).abs() < 1e-12, "m4 at n={n}");
        }
    }

    #[test]
    fn cache_returns_same_rule() {
        let a = gauss_hermite(32).unwrap();
        let b = gauss_hermite(32).unwrap();
        assert!(Arc::ptr_eq(&a, &b));
    }
}
