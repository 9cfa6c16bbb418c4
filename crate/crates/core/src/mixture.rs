//! Gaussian mixture densities.
//!
//! Components cache their precision matrix, inverse square root and log
//! determinant at construction, so evaluation never refactors a covariance.
//! All evaluation goes through per-component log densities combined with
//! log-sum-exp; gradients and Hessians are assembled from responsibilities
//! `w_i = α_i φ_i(x) / Φ(x)` so that points far from every mean neither
//! underflow nor lose the direction of the gradient.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};

/// Relative tolerance for the symmetry check on covariances.
pub const SYMMETRY_TOL: f64 = 1e-12;
/// Default relative tolerance of the homoscedastic predicate.
pub const HOMOSCEDASTIC_TOL: f64 = 1e-10;
/// Default relative singular-value cutoff for [`affine_rank`].
pub const AFFINE_RANK_TOL: f64 = 1e-9;

/// One weighted Gaussian component `α φ(x; μ, Σ)`.
#[derive(Debug, Clone)]
pub struct GaussianComponent {
    weight: f64,
    mean: DVector<f64>,
    covariance: DMatrix<f64>,
    precision: DMatrix<f64>,
    inv_sqrt: DMatrix<f64>,
    log_det: f64,
}

impl GaussianComponent {
    fn new(index: usize, weight: f64, mean: DVector<f64>, covariance: DMatrix<f64>) -> Result<Self> {
        if !(weight > 0.0 && weight.is_finite()) {
            return Err(Error::InvalidWeight { index, weight });
        }
        let d = mean.len();
        if covariance.nrows() != d || covariance.ncols() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: covariance.nrows(),
            });
        }
        if mean.iter().chain(covariance.iter()).any(|v| !v.is_finite()) {
            return Err(Error::NonFinite { what: "component parameters" });
        }
        let scale = covariance.amax();
        let asym = (&covariance - covariance.transpose()).amax();
        if asym > SYMMETRY_TOL * scale {
            return Err(Error::NotSymmetric { index });
        }
        let covariance = (&covariance + covariance.transpose()) * 0.5;
        let eig = SymmetricEigen::new(covariance.clone());
        let min_eig = eig.eigenvalues.min();
        if !(min_eig > 0.0) {
            return Err(Error::NotPositiveDefinite {
                index,
                min_eigenvalue: min_eig,
            });
        }
        let v = &eig.eigenvectors;
        let inv = DVector::from_iterator(d, eig.eigenvalues.iter().map(|l| 1.0 / l));
        let inv_sqrt_diag = DVector::from_iterator(d, eig.eigenvalues.iter().map(|l| 1.0 / l.sqrt()));
        let precision = symmetrize(v * DMatrix::from_diagonal(&inv) * v.transpose());
        let inv_sqrt = symmetrize(v * DMatrix::from_diagonal(&inv_sqrt_diag) * v.transpose());
        let log_det = eig.eigenvalues.iter().map(|l| l.ln()).sum();
        Ok(Self {
            weight,
            mean,
            covariance,
            precision,
            inv_sqrt,
            log_det,
        })
    }

    pub fn weight(&self) -> f64 {
        self.weight
    }

    pub fn mean(&self) -> &DVector<f64> {
        &self.mean
    }

    pub fn covariance(&self) -> &DMatrix<f64> {
        &self.covariance
    }

    /// Cached `Σ⁻¹`.
    pub fn precision(&self) -> &DMatrix<f64> {
        &self.precision
    }

    /// Cached `Σ^{-1/2}` (symmetric).
    pub fn inv_sqrt(&self) -> &DMatrix<f64> {
        &self.inv_sqrt
    }

    pub fn log_det(&self) -> f64 {
        self.log_det
    }

    /// `log(α φ(x))`.
    pub fn log_weighted_density(&self, x: &DVector<f64>) -> f64 {
        let d = self.mean.len() as f64;
        let diff = x - &self.mean;
        let quad = diff.dot(&(&self.precision * &diff));
        self.weight.ln() - 0.5 * (d * (2.0 * PI).ln() + self.log_det) - 0.5 * quad
    }

    /// `b(x) = -Σ⁻¹(x - μ)`.
    pub fn score(&self, x: &DVector<f64>) -> DVector<f64> {
        &self.precision * (&self.mean - x)
    }
}

pub(crate) fn symmetrize(m: DMatrix<f64>) -> DMatrix<f64> {
    (&m + m.transpose()) * 0.5
}

/// Density, gradient and Hessian at one point.
#[derive(Debug, Clone)]
pub struct Evaluation {
    pub value: f64,
    pub log_value: f64,
    pub gradient: DVector<f64>,
    pub hessian: DMatrix<f64>,
}

/// A finite Gaussian mixture `Φ(x) = Σ α_i φ_i(x)` with weights summing to 1.
#[derive(Debug, Clone)]
pub struct Mixture {
    components: Vec<GaussianComponent>,
    dim: usize,
}

impl Mixture {
    /// Builds a mixture; weights are normalized to sum to one.
    pub fn new(weights: Vec<f64>, means: Vec<DVector<f64>>, covariances: Vec<DMatrix<f64>>) -> Result<Self> {
        if weights.is_empty() || means.is_empty() {
            return Err(Error::Empty);
        }
        if means.len() != weights.len() {
            return Err(Error::DimensionMismatch {
                expected: weights.len(),
                got: means.len(),
            });
        }
        if covariances.len() != weights.len() {
            return Err(Error::DimensionMismatch {
                expected: weights.len(),
                got: covariances.len(),
            });
        }
        let dim = means[0].len();
        if dim == 0 {
            return Err(Error::InvalidParameter("dimension must be at least 1".into()));
        }
        if let Some(m) = means.iter().find(|m| m.len() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: m.len(),
            });
        }
        let total: f64 = weights.iter().sum();
        let mut components = Vec::with_capacity(weights.len());
        for (i, ((w, m), c)) in weights.into_iter().zip(means).zip(covariances).enumerate() {
            let comp = GaussianComponent::new(i, w, m, c)?;
            components.push(comp);
        }
        if !(total > 0.0 && total.is_finite()) {
            return Err(Error::InvalidWeight { index: 0, weight: total });
        }
        for c in &mut components {
            c.weight /= total;
        }
        Ok(Self { components, dim })
    }

    /// Mixture whose components all share `covariance`.
    pub fn homoscedastic(weights: Vec<f64>, means: Vec<DVector<f64>>, covariance: DMatrix<f64>) -> Result<Self> {
        let covs = vec![covariance; means.len()];
        Self::new(weights, means, covs)
    }

    /// Single Gaussian `N(mean, covariance)`.
    pub fn single(mean: DVector<f64>, covariance: DMatrix<f64>) -> Result<Self> {
        Self::new(vec![1.0], vec![mean], vec![covariance])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn components(&self) -> &[GaussianComponent] {
        &self.components
    }

    pub fn weights(&self) -> Vec<f64> {
        self.components.iter().map(|c| c.weight).collect()
    }

    pub fn means(&self) -> Vec<DVector<f64>> {
        self.components.iter().map(|c| c.mean.clone()).collect()
    }

    pub fn covariances(&self) -> Vec<DMatrix<f64>> {
        self.components.iter().map(|c| c.covariance.clone()).collect()
    }

    /// True iff every covariance equals the first one entrywise within
    /// [`HOMOSCEDASTIC_TOL`] relative to its largest entry.
    pub fn is_homoscedastic(&self) -> bool {
        self.is_homoscedastic_with(HOMOSCEDASTIC_TOL)
    }

    pub fn is_homoscedastic_with(&self, tol: f64) -> bool {
        let first = &self.components[0].covariance;
        let scale = first.amax();
        self.components[1..]
            .iter()
            .all(|c| (&c.covariance - first).amax() <= tol * scale)
    }

    /// Index of the largest weight, ties to the lowest index.
    pub fn heaviest_component(&self) -> usize {
        let mut best = 0;
        for (i, c) in self.components.iter().enumerate() {
            if c.weight > self.components[best].weight {
                best = i;
            }
        }
        best
    }

    fn check_point(&self, x: &DVector<f64>) -> Result<()> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: x.len(),
            });
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite { what: "evaluation point" });
        }
        Ok(())
    }

    /// `log Φ(x)` together with the responsibilities `w_i(x)`.
    pub fn log_density_and_responsibilities(&self, x: &DVector<f64>) -> (f64, Vec<f64>) {
        let logs: Vec<f64> = self.components.iter().map(|c| c.log_weighted_density(x)).collect();
        let lse = log_sum_exp(&logs);
        let resp = logs.iter().map(|l| (l - lse).exp()).collect();
        (lse, resp)
    }

    pub fn log_density(&self, x: &DVector<f64>) -> f64 {
        self.log_density_and_responsibilities(x).0
    }

    pub fn density(&self, x: &DVector<f64>) -> f64 {
        self.log_density(x).exp()
    }

    /// `∇ log Φ(x) = Σ w_i b_i(x)`.
    pub fn log_gradient(&self, x: &DVector<f64>) -> DVector<f64> {
        let (_, resp) = self.log_density_and_responsibilities(x);
        self.weighted_score(x, &resp)
    }

    pub(crate) fn weighted_score(&self, x: &DVector<f64>, resp: &[f64]) -> DVector<f64> {
        let mut g = DVector::zeros(self.dim);
        for (c, w) in self.components.iter().zip(resp) {
            if *w > 0.0 {
                g.axpy(*w, &c.score(x), 1.0);
            }
        }
        g
    }

    /// `D²Φ(x) / Φ(x) = Σ w_i (b_i b_iᵀ - Σ_i⁻¹)`, symmetrized.
    pub fn scaled_hessian(&self, x: &DVector<f64>) -> DMatrix<f64> {
        let (_, resp) = self.log_density_and_responsibilities(x);
        self.scaled_hessian_with(x, &resp)
    }

    pub(crate) fn scaled_hessian_with(&self, x: &DVector<f64>, resp: &[f64]) -> DMatrix<f64> {
        let mut h = DMatrix::zeros(self.dim, self.dim);
        for (c, w) in self.components.iter().zip(resp) {
            if *w > 0.0 {
                let b = c.score(x);
                h += (&b * b.transpose() - &c.precision) * *w;
            }
        }
        symmetrize(h)
    }

    /// Density, gradient and (exactly symmetric) Hessian at `x`.
    pub fn evaluate(&self, x: &DVector<f64>) -> Result<Evaluation> {
        self.check_point(x)?;
        let (log_value, resp) = self.log_density_and_responsibilities(x);
        let value = log_value.exp();
        let gradient = self.weighted_score(x, &resp) * value;
        let hessian = symmetrize(self.scaled_hessian_with(x, &resp) * value);
        Ok(Evaluation {
            value,
            log_value,
            gradient,
            hessian,
        })
    }

    /// The normalized mixture proportional to `e^{c·x} Φ(x)`.
    ///
    /// Component `i` moves to mean `μ_i + Σ_i c` and is reweighted by
    /// `exp(cᵀμ_i + ½ cᵀΣ_i c)`; covariances are unchanged.
    pub fn tilt(&self, c: &DVector<f64>) -> Result<Mixture> {
        self.check_point(c)?;
        let log_w: Vec<f64> = self
            .components
            .iter()
            .map(|comp| comp.weight.ln() + c.dot(&comp.mean) + 0.5 * c.dot(&(&comp.covariance * c)))
            .collect();
        let lse = log_sum_exp(&log_w);
        let weights = log_w.iter().map(|l| (l - lse).exp()).collect();
        let means = self
            .components
            .iter()
            .map(|comp| &comp.mean + &comp.covariance * c)
            .collect();
        Mixture::new(weights, means, self.covariances())
    }

    /// Affine rank of the component means with the default tolerance.
    pub fn affine_rank(&self) -> usize {
        affine_rank(&self.means(), AFFINE_RANK_TOL)
    }

    /// Largest distance between two means.
    pub fn mean_diameter(&self) -> f64 {
        let mut diam: f64 = 0.0;
        for (i, a) in self.components.iter().enumerate() {
            for b in &self.components[i + 1..] {
                diam = diam.max((&a.mean - &b.mean).norm());
            }
        }
        diam
    }

    /// Largest standard deviation over all components and directions.
    pub fn max_std(&self) -> f64 {
        self.components
            .iter()
            .map(|c| SymmetricEigen::new(c.covariance.clone()).eigenvalues.max().sqrt())
            .fold(0.0, f64::max)
    }

    /// Barycenter of the means (unweighted).
    pub fn mean_centroid(&self) -> DVector<f64> {
        let mut s = DVector::zeros(self.dim);
        for c in &self.components {
            s += &c.mean;
        }
        s / self.len() as f64
    }
}

pub(crate) fn log_sum_exp(values: &[f64]) -> f64 {
    let max = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    max + values.iter().map(|v| (v - max).exp()).sum::<f64>().ln()
}

/// Dimension of the affine hull of `means`.
///
/// Counts singular values of the matrix with rows `μ_i - μ_1` that exceed
/// `tol` times the largest one; all-coincident means give 0.
pub fn affine_rank(means: &[DVector<f64>], tol: f64) -> usize {
    if means.len() < 2 {
        return 0;
    }
    let d = means[0].len();
    let rows = means.len() - 1;
    let diffs = DMatrix::from_fn(rows, d, |i, j| means[i + 1][j] - means[0][j]);
    let sv = diffs.singular_values();
    let max = sv.max();
    if max <= 0.0 {
        return 0;
    }
    sv.iter().filter(|s| **s > tol * max).count()
}

/// The affine change of variables `T(x) = O B (x - a)`.
#[derive(Debug, Clone)]
pub struct AffineMap {
    pub orthogonal: DMatrix<f64>,
    pub whiten: DMatrix<f64>,
    pub base: DVector<f64>,
}

impl AffineMap {
    pub fn apply(&self, x: &DVector<f64>) -> DVector<f64> {
        &self.orthogonal * (&self.whiten * (x - &self.base))
    }

    /// `T⁻¹(z) = a + B⁻¹ Oᵀ z`.
    pub fn inverse(&self, z: &DVector<f64>) -> DVector<f64> {
        let w = self.orthogonal.transpose() * z;
        let solved = self
            .whiten
            .clone()
            .cholesky()
            .expect("whitening matrix is SPD")
            .solve(&w);
        &self.base + solved
    }

    /// `|det DT⁻¹| = 1 / det B`.
    pub fn inverse_jacobian_det(&self) -> f64 {
        1.0 / self.whiten.determinant().abs()
    }
}

/// Result of the homoscedastic affine-rank reduction.
#[derive(Debug, Clone)]
pub struct HomoscedasticReduction {
    pub map: AffineMap,
    /// Unit-covariance mixture on `R^r` with the original weights.
    pub reduced: Mixture,
    /// `C = (2π)^{-(d-r)/2}` in `Φ̃(u, v) = C e^{-‖v‖²/2} G(u)`.
    pub constant: f64,
    pub rank: usize,
}

impl HomoscedasticReduction {
    /// Embeds a reduced point `u ∈ R^r` back into the original coordinates as
    /// `T⁻¹(u, 0)`.
    pub fn lift_point(&self, u: &DVector<f64>) -> DVector<f64> {
        let d = self.map.base.len();
        let mut z = DVector::zeros(d);
        z.rows_mut(0, self.rank).copy_from(u);
        self.map.inverse(&z)
    }
}

/// Reduces a homoscedastic mixture to the affine span of its means.
pub fn reduce_homoscedastic(mixture: &Mixture) -> Result<HomoscedasticReduction> {
    reduce_homoscedastic_with(mixture, HOMOSCEDASTIC_TOL, AFFINE_RANK_TOL)
}

pub fn reduce_homoscedastic_with(mixture: &Mixture, homo_tol: f64, rank_tol: f64) -> Result<HomoscedasticReduction> {
    if !mixture.is_homoscedastic_with(homo_tol) {
        return Err(Error::NotHomoscedastic);
    }
    let d = mixture.dim();
    let means = mixture.means();
    let rank = affine_rank(&means, rank_tol);
    if rank == 0 {
        return Err(Error::ZeroRank);
    }
    let whiten = mixture.components()[0].inv_sqrt().clone();
    let base = means[0].clone();
    let whitened: Vec<DVector<f64>> = means.iter().map(|m| &whiten * (m - &base)).collect();
    let mut gram = DMatrix::zeros(d, d);
    for v in &whitened {
        gram += v * v.transpose();
    }
    let eig = SymmetricEigen::new(symmetrize(gram));
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    // Rows of O are the Gram eigenvectors, largest eigenvalue first.
    let orthogonal = DMatrix::from_fn(d, d, |i, j| eig.eigenvectors[(j, order[i])]);
    let map = AffineMap {
        orthogonal,
        whiten,
        base,
    };
    let reduced_means: Vec<DVector<f64>> = means
        .iter()
        .map(|m| map.apply(m).rows(0, rank).into_owned())
        .collect();
    let reduced = Mixture::homoscedastic(mixture.weights(), reduced_means, DMatrix::identity(rank, rank))?;
    let constant = (2.0 * PI).powf(-((d - rank) as f64) / 2.0);
    Ok(HomoscedasticReduction {
        map,
        reduced,
        constant,
        rank,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::dvector;

    fn pair(sep: f64) -> Mixture {
        Mixture::new(
            vec![0.5, 0.5],
            vec![dvector![-sep], dvector![sep]],
            vec![DMatrix::identity(1, 1), DMatrix::identity(1, 1)],
        )
        .unwrap()
    }

    #[test]
    fn standard_gaussian_at_origin() {
        let m = Mixture::single(dvector![0.0], DMatrix::identity(1, 1)).unwrap();
        let e = m.evaluate(&dvector![0.0]).unwrap();
        let peak = 1.0 / (2.0 * PI).sqrt();
        assert!((e.value - peak).abs() < 1e-15);
        assert_eq!(e.gradient[0], 0.0);
        assert!((e.hessian[(0, 0)] + peak).abs() < 1e-15);
    }

    #[test]
    fn symmetric_pair_has_zero_gradient_at_origin() {
        let e = pair(2.0).evaluate(&dvector![0.0]).unwrap();
        assert_eq!(e.gradient[0], 0.0);
    }

    #[test]
    fn finite_differences_at_two() {
        let m = pair(2.0);
        let x = 2.0;
        let h = 1e-5;
        let f = |t: f64| m.density(&dvector![t]);
        let e = m.evaluate(&dvector![x]).unwrap();
        let fd_grad = (f(x + h) - f(x - h)) / (2.0 * h);
        let fd_hess = (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h);
        let scale = e.value;
        assert!((e.gradient[0] - fd_grad).abs() <= 1e-6 * scale, "{} vs {}", e.gradient[0], fd_grad);
        // second difference of the value at step 1e-5 carries ~1e-6 noise
        assert!((e.hessian[(0, 0)] - fd_hess).abs() <= 1e-4 * scale);
    }

    #[test]
    fn normalizes_weights() {
        let m = Mixture::new(
            vec![2.0, 6.0],
            vec![dvector![0.0], dvector![1.0]],
            vec![DMatrix::identity(1, 1); 2],
        )
        .unwrap();
        assert!((m.weights()[0] - 0.25).abs() < 1e-15);
        let s: f64 = m.weights().iter().sum();
        assert!((s - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_covariances() {
        let bad = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 1.0]);
        let err = Mixture::single(dvector![0.0, 0.0], bad).unwrap_err();
        assert!(matches!(err, Error::NotPositiveDefinite { .. }));
        let asym = DMatrix::from_row_slice(2, 2, &[1.0, 0.1, 0.0, 1.0]);
        let err = Mixture::single(dvector![0.0, 0.0], asym).unwrap_err();
        assert!(matches!(err, Error::NotSymmetric { .. }));
        let err = Mixture::new(vec![1.0, 1.0], vec![dvector![0.0], dvector![0.0, 1.0]], vec![DMatrix::identity(1, 1); 2])
            .unwrap_err();
        assert!(matches!(err, Error::DimensionMismatch { .. }));
        let err = Mixture::new(vec![-1.0], vec![dvector![0.0]], vec![DMatrix::identity(1, 1)]).unwrap_err();
        assert!(matches!(err, Error::InvalidWeight { .. }));
    }

    #[test]
    fn evaluate_rejects_wrong_dimension() {
        assert!(pair(1.0).evaluate(&dvector![0.0, 0.0]).is_err());
    }

    #[test]
    fn zero_tilt_is_identity() {
        let m = pair(2.0);
        let t = m.tilt(&dvector![0.0]).unwrap();
        for (a, b) in m.components().iter().zip(t.components()) {
            assert!((a.weight() - b.weight()).abs() < 1e-15);
            assert_eq!(a.mean(), b.mean());
        }
    }

    #[test]
    fn tilted_pair_is_proportional() {
        let m = pair(2.0);
        let c = dvector![0.1];
        let t = m.tilt(&c).unwrap();
        assert!((t.components()[0].mean()[0] + 1.9).abs() < 1e-14);
        assert!((t.components()[1].mean()[0] - 2.1).abs() < 1e-14);
        let w0 = (-0.2f64 + 0.005).exp();
        let w1 = (0.2f64 + 0.005).exp();
        assert!((t.weights()[0] - w0 / (w0 + w1)).abs() < 1e-14);
        let ratio = |x: f64| (0.1 * x + m.log_density(&dvector![x]) - t.log_density(&dvector![x])).exp();
        let r0 = ratio(0.0);
        for i in -50..=50 {
            let x = i as f64 * 0.2;
            assert!((ratio(x) / r0 - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn tilt_preserves_homoscedasticity_and_rank() {
        let cov = DMatrix::from_row_slice(3, 3, &[2.0, 0.3, 0.0, 0.3, 1.0, 0.1, 0.0, 0.1, 0.5]);
        let m = Mixture::homoscedastic(
            vec![0.2, 0.3, 0.5],
            vec![dvector![0.0, 0.0, 0.0], dvector![1.0, 1.0, 0.0], dvector![2.0, 2.0, 0.0]],
            cov.clone(),
        )
        .unwrap();
        let c = dvector![0.3, -0.2, 0.7];
        let t = m.tilt(&c).unwrap();
        assert!(t.is_homoscedastic());
        assert_eq!(t.affine_rank(), m.affine_rank());
        let shift = &cov * &c;
        for (a, b) in m.components().iter().zip(t.components()) {
            assert!((b.mean() - a.mean() - &shift).amax() < 1e-14);
        }
    }

    #[test]
    fn affine_rank_cases() {
        let same = vec![dvector![1.0, 2.0]; 3];
        assert_eq!(affine_rank(&same, AFFINE_RANK_TOL), 0);
        let collinear = vec![dvector![0.0, 0.0, 0.0], dvector![1.0, 2.0, 3.0], dvector![-2.0, -4.0, -6.0]];
        assert_eq!(affine_rank(&collinear, AFFINE_RANK_TOL), 1);
    }

    #[test]
    fn homoscedastic_predicate() {
        let a = DMatrix::identity(2, 2);
        let mut b = a.clone();
        b[(0, 0)] += 1e-12;
        let m = Mixture::new(vec![1.0, 1.0], vec![dvector![0.0, 0.0], dvector![1.0, 0.0]], vec![a.clone(), b]).unwrap();
        assert!(m.is_homoscedastic());
        let mut c = a.clone();
        c[(0, 0)] += 1e-6;
        let m = Mixture::new(vec![1.0, 1.0], vec![dvector![0.0, 0.0], dvector![1.0, 0.0]], vec![a, c]).unwrap();
        assert!(!m.is_homoscedastic());
    }

    #[test]
    fn reduction_of_unit_1d_pair() {
        let m = Mixture::homoscedastic(vec![0.5, 0.5], vec![dvector![0.0], dvector![3.0]], DMatrix::identity(1, 1))
            .unwrap();
        let red = reduce_homoscedastic(&m).unwrap();
        assert_eq!(red.rank, 1);
        let mut ms: Vec<f64> = red.reduced.means().iter().map(|v| v[0]).collect();
        let shift = ms[0];
        for v in &mut ms {
            *v = (*v - shift).abs();
        }
        assert!(ms[0].abs() < 1e-14 && (ms[1] - 3.0).abs() < 1e-14);
        assert!((red.constant - 1.0).abs() < 1e-15);
    }

    #[test]
    fn reduction_rejects_bad_inputs() {
        let m = Mixture::homoscedastic(vec![1.0, 1.0], vec![dvector![1.0, 1.0]; 2], DMatrix::identity(2, 2)).unwrap();
        assert!(matches!(reduce_homoscedastic(&m), Err(Error::ZeroRank)));
        let m = Mixture::new(
            vec![1.0, 1.0],
            vec![dvector![0.0], dvector![1.0]],
            vec![DMatrix::identity(1, 1), DMatrix::identity(1, 1) * 2.0],
        )
        .unwrap();
        assert!(matches!(reduce_homoscedastic(&m), Err(Error::NotHomoscedastic)));
    }

    #[test]
    fn affine_map_is_orthogonal_and_invertible() {
        let cov = DMatrix::from_row_slice(2, 2, &[2.0, 0.5, 0.5, 1.0]);
        let m = Mixture::homoscedastic(vec![1.0, 1.0], vec![dvector![0.0, 1.0], dvector![1.0, -1.0]], cov).unwrap();
        let red = reduce_homoscedastic(&m).unwrap();
        let o = &red.map.orthogonal;
        assert!((o.transpose() * o - DMatrix::identity(2, 2)).amax() < 1e-10);
        let x = dvector![0.3, -0.7];
        assert!((red.map.inverse(&red.map.apply(&x)) - x).amax() < 1e-13);
        for mu in m.means() {
            assert!(red.map.apply(&mu)[1].abs() < 1e-12);
        }
    }
}
