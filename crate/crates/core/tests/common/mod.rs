//! Independent oracles and random instances shared by the integration tests.
#![allow(dead_code)]

use modecount::Mixture;
use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// A 1-d mixture as plain parameter lists.
#[derive(Debug, Clone)]
pub struct Mix1 {
    pub weights: Vec<f64>,
    pub means: Vec<f64>,
    pub sds: Vec<f64>,
}

impl Mix1 {
    pub fn random(rng: &mut ChaCha8Rng, k: usize) -> Self {
        let raw: Vec<f64> = (0..k).map(|_| rng.gen_range(0.05..1.0)).collect();
        let total: f64 = raw.iter().sum();
        Self {
            weights: raw.iter().map(|w| w / total).collect(),
            means: (0..k).map(|_| rng.gen_range(-5.0..5.0)).collect(),
            sds: (0..k).map(|_| rng.gen_range(0.3..2.0)).collect(),
        }
    }

    pub fn to_mixture(&self) -> Mixture {
        Mixture::new(
            self.weights.clone(),
            self.means.iter().map(|m| DVector::from_element(1, *m)).collect(),
            self.sds.iter().map(|s| DMatrix::from_element(1, 1, s * s)).collect(),
        )
        .unwrap()
    }

    /// A positive multiple of `Φ'(x)`.
    pub fn slope_sign(&self, x: f64) -> f64 {
        let logs: Vec<f64> = (0..self.weights.len())
            .map(|i| {
                let z = (x - self.means[i]) / self.sds[i];
                self.weights[i].ln() - self.sds[i].ln() - 0.5 * z * z
            })
            .collect();
        let top = logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        (0..logs.len())
            .map(|i| (logs[i] - top).exp() * (self.means[i] - x) / (self.sds[i] * self.sds[i]))
            .sum()
    }

    /// Zeros of `Φ'` from sign changes on a uniform grid over the hull of
    /// the means, each refined by bisection.
    pub fn grid_critical_points(&self, cells: usize) -> Vec<f64> {
        let lo = self.means.iter().cloned().fold(f64::INFINITY, f64::min) - 0.5;
        let hi = self.means.iter().cloned().fold(f64::NEG_INFINITY, f64::max) + 0.5;
        let h = (hi - lo) / cells as f64;
        let mut out = Vec::new();
        let mut prev_x = lo;
        let mut prev = self.slope_sign(lo);
        for j in 1..=cells {
            let x = lo + h * j as f64;
            let v = self.slope_sign(x);
            if v == 0.0 {
                out.push(x);
            } else if prev * v < 0.0 {
                let (mut a, mut b) = (prev_x, x);
                for _ in 0..200 {
                    let mid = 0.5 * (a + b);
                    if mid <= a || mid >= b {
                        break;
                    }
                    if self.slope_sign(mid) * prev > 0.0 {
                        a = mid;
                    } else {
                        b = mid;
                    }
                }
                out.push(0.5 * (a + b));
            }
            prev_x = x;
            prev = v;
        }
        out
    }
}

/// `(log Φ, ∇ log Φ, ∇² log Φ)` of a general mixture, written out from the
/// component formulas.
pub fn log_derivatives(m: &Mixture, x: &DVector<f64>) -> (f64, DVector<f64>, DMatrix<f64>) {
    let d = x.len();
    let comps = m.components();
    let mut logs = Vec::with_capacity(comps.len());
    let mut scores = Vec::with_capacity(comps.len());
    let mut precs = Vec::with_capacity(comps.len());
    for c in comps {
        let p = c.covariance().clone().try_inverse().unwrap();
        let diff = x - c.mean();
        let logdet = c.covariance().determinant().ln();
        logs.push(c.weight().ln() - 0.5 * logdet - 0.5 * d as f64 * (2.0 * std::f64::consts::PI).ln() - 0.5 * diff.dot(&(&p * &diff)));
        scores.push(-(&p * &diff));
        precs.push(p);
    }
    let top = logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let total: f64 = logs.iter().map(|l| (l - top).exp()).sum();
    let lse = top + total.ln();
    let mut g = DVector::zeros(d);
    let mut second = DMatrix::zeros(d, d);
    for i in 0..comps.len() {
        let w = (logs[i] - lse).exp();
        g += &scores[i] * w;
        second += (&scores[i] * scores[i].transpose() - &precs[i]) * w;
    }
    let h = second - &g * g.transpose();
    (lse, g, h)
}

/// Critical points of a 2-d mixture: Newton from the center of every grid
/// cell whose corners see both gradient components change sign.
pub fn grid_critical_points_2d(m: &Mixture, lo: f64, hi: f64, cells: usize) -> Vec<DVector<f64>> {
    let h = (hi - lo) / cells as f64;
    let grads: Vec<Vec<DVector<f64>>> = (0..=cells)
        .map(|i| {
            (0..=cells)
                .map(|j| log_derivatives(m, &DVector::from_vec(vec![lo + h * i as f64, lo + h * j as f64])).1)
                .collect()
        })
        .collect();
    let mut found: Vec<DVector<f64>> = Vec::new();
    for i in 0..cells {
        for j in 0..cells {
            let corners = [&grads[i][j], &grads[i + 1][j], &grads[i][j + 1], &grads[i + 1][j + 1]];
            let changes = |c: usize| {
                let pos = corners.iter().any(|g| g[c] >= 0.0);
                let neg = corners.iter().any(|g| g[c] <= 0.0);
                pos && neg
            };
            if !(changes(0) && changes(1)) {
                continue;
            }
            let mut x = DVector::from_vec(vec![lo + h * (i as f64 + 0.5), lo + h * (j as f64 + 0.5)]);
            let mut ok = false;
            for _ in 0..50 {
                let (_, g, hess) = log_derivatives(m, &x);
                if g.norm() < 1e-13 {
                    ok = true;
                    break;
                }
                let Some(step) = hess.lu().solve(&(-&g)) else { break };
                x += step;
            }
            if ok && x.iter().all(|v| *v >= lo - h && *v <= hi + h) && !found.iter().any(|f| (f - &x).norm() < 1e-6) {
                found.push(x);
            }
        }
    }
    found.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
    found
}

pub fn random_spd(rng: &mut ChaCha8Rng, d: usize, floor: f64) -> DMatrix<f64> {
    let a = DMatrix::from_fn(d, d, |_, _| rng.gen_range(-1.0..1.0));
    &a * a.transpose() * 0.5 + DMatrix::identity(d, d) * floor
}

/// Homoscedastic mixture in `R^d` whose means span an affine subspace of
/// dimension `r`.
pub fn random_low_rank_homoscedastic(rng: &mut ChaCha8Rng, d: usize, r: usize, k: usize) -> Mixture {
    let basis = DMatrix::from_fn(d, r, |_, _| rng.gen_range(-1.0..1.0));
    let offset = DVector::from_fn(d, |_, _| rng.gen_range(-1.0..1.0));
    let means = (0..k)
        .map(|_| &offset + &basis * DVector::from_fn(r, |_, _| rng.gen_range(-2.5..2.5)))
        .collect();
    let raw: Vec<f64> = (0..k).map(|_| rng.gen_range(0.2..1.0)).collect();
    Mixture::homoscedastic(raw, means, random_spd(rng, d, 0.3)).unwrap()
}

/// Lexicographic order on locations.
pub fn lex_sorted(mut xs: Vec<DVector<f64>>) -> Vec<DVector<f64>> {
    xs.sort_by(|a, b| {
        a.iter()
            .zip(b.iter())
            .map(|(x, y)| x.total_cmp(y))
            .find(|o| o.is_ne())
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    xs
}

/// Matches two point sets one-to-one by nearest neighbour; returns the
/// largest matched distance, or `None` if the sizes differ or a point is
/// claimed twice.
pub fn match_sets(a: &[DVector<f64>], b: &[DVector<f64>]) -> Option<f64> {
    if a.len() != b.len() {
        return None;
    }
    let mut used = vec![false; b.len()];
    let mut worst: f64 = 0.0;
    for p in a {
        let (j, dist) = b
            .iter()
            .enumerate()
            .filter(|(j, _)| !used[*j])
            .map(|(j, q)| (j, (p - q).norm()))
            .min_by(|x, y| x.1.total_cmp(&y.1))?;
        used[j] = true;
        worst = worst.max(dist);
    }
    Some(worst)
}
