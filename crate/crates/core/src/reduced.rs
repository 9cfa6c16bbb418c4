//! The reduced ratio system of a mixture.
//!
//! Fix a reference component `r` and write `ρ_i(x) = α_i φ_i(x) / (α_r φ_r(x))
//! = β_i e^{q_i(x)}` for the other components. For `y > 0` let
//! `M(y) = A_r + Σ y_i A_i`, `ν(y) = A_r μ_r + Σ y_i A_i μ_i` and
//! `X(y) = M(y)⁻¹ ν(y)` with `A_i = Σ_i⁻¹`. Positive roots of
//! `R_i(y) = y_i - β_i e^{q_i(X(y))}` correspond one-to-one with critical
//! points of the mixture through `X`, with inverse `x ↦ ρ(x)`.
//!
//! The solver works in log coordinates `u = log y`, where the system reads
//! `S(u) = u - log β - q(X(e^u))`. `X` is evaluated from the normalized
//! weights `softmax(0, u)` so that ratios spanning hundreds of orders of
//! magnitude never overflow.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::mixture::Mixture;

/// `q(x) = xᵀ Q x + lᵀ x + c`.
#[derive(Debug, Clone)]
pub struct QuadraticForm {
    pub quad: DMatrix<f64>,
    pub linear: DVector<f64>,
    pub constant: f64,
}

impl QuadraticForm {
    pub fn eval(&self, x: &DVector<f64>) -> f64 {
        x.dot(&(&self.quad * x)) + self.linear.dot(x) + self.constant
    }
}

#[derive(Debug, Clone)]
pub struct ReducedSystem {
    /// Index of the reference component in the mixture.
    pub reference: usize,
    /// Mixture indices of the non-reference components, in order; entry `j`
    /// of every reduced vector refers to component `others[j]`.
    pub others: Vec<usize>,
    pub log_betas: Vec<f64>,
    pub quad_forms: Vec<QuadraticForm>,
    /// `A_i = Σ_i⁻¹` for every component, in mixture order.
    pub precisions: Vec<DMatrix<f64>>,
    means: Vec<DVector<f64>>,
    precision_means: Vec<DVector<f64>>,
}

/// Builds the reduced system with `reference` as the normalizing component.
pub fn build_reduced(mixture: &Mixture, reference: usize) -> Result<ReducedSystem> {
    let k = mixture.len();
    if k < 2 {
        return Err(Error::InvalidParameter(
            "the reduced system needs at least two components".into(),
        ));
    }
    if reference >= k {
        return Err(Error::InvalidParameter(format!(
            "reference index {reference} out of range for {k} components"
        )));
    }
    let comps = mixture.components();
    let refc = &comps[reference];
    let a_r = refc.precision();
    let mu_r = refc.mean();
    let ar_mur = a_r * mu_r;
    let others: Vec<usize> = (0..k).filter(|&i| i != reference).collect();
    let mut log_betas = Vec::with_capacity(k - 1);
    let mut quad_forms = Vec::with_capacity(k - 1);
    for &i in &others {
        let c = &comps[i];
        let a_i = c.precision();
        let mu_i = c.mean();
        let ai_mui = a_i * mu_i;
        log_betas.push(c.weight().ln() - refc.weight().ln() + 0.5 * refc.log_det() - 0.5 * c.log_det());
        quad_forms.push(QuadraticForm {
            quad: (a_r - a_i) * 0.5,
            linear: &ai_mui - &ar_mur,
            constant: -0.5 * mu_i.dot(&ai_mui) + 0.5 * mu_r.dot(&ar_mur),
        });
    }
    Ok(ReducedSystem {
        reference,
        others,
        log_betas,
        quad_forms,
        precisions: comps.iter().map(|c| c.precision().clone()).collect(),
        means: comps.iter().map(|c| c.mean().clone()).collect(),
        precision_means: comps.iter().map(|c| c.precision() * c.mean()).collect(),
    })
}

impl ReducedSystem {
    /// Number of reduced variables, `k - 1`.
    pub fn len(&self) -> usize {
        self.others.len()
    }

    pub fn is_empty(&self) -> bool {
        self.others.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.means[0].len()
    }

    fn centered_half_quad(&self, i: usize, x: &DVector<f64>) -> f64 {
        let diff = x - &self.means[i];
        0.5 * diff.dot(&(&self.precisions[i] * &diff))
    }

    /// `q_j(x)` for reduced index `j`, evaluated in centered form.
    pub fn q(&self, j: usize, x: &DVector<f64>) -> f64 {
        self.centered_half_quad(self.reference, x) - self.centered_half_quad(self.others[j], x)
    }

    /// `∇q_j(x) = A_r(x - μ_r) - A_j(x - μ_j)`.
    pub fn q_gradient(&self, j: usize, x: &DVector<f64>) -> DVector<f64> {
        let i = self.others[j];
        &self.precisions[self.reference] * (x - &self.means[self.reference]) - &self.precisions[i] * (x - &self.means[i])
    }

    /// `log ρ(x)`, the log reduced coordinates of a point.
    pub fn log_ratios(&self, x: &DVector<f64>) -> DVector<f64> {
        DVector::from_iterator(self.len(), (0..self.len()).map(|j| self.log_betas[j] + self.q(j, x)))
    }

    /// `ρ(x)`.
    pub fn ratios(&self, x: &DVector<f64>) -> DVector<f64> {
        self.log_ratios(x).map(f64::exp)
    }

    /// Normalized weights `(w_r, w_{others})` proportional to `(1, e^u)`,
    /// returned in mixture order.
    fn normalized_weights(&self, u: &DVector<f64>) -> Vec<f64> {
        let max = u.iter().cloned().fold(0.0, f64::max);
        let mut w = vec![0.0; self.others.len() + 1];
        w[self.reference] = (-max).exp();
        for (j, &i) in self.others.iter().enumerate() {
            w[i] = (u[j] - max).exp();
        }
        let s: f64 = w.iter().sum();
        w.iter_mut().for_each(|v| *v /= s);
        w
    }

    /// Normalized `M̂ = M(y) / (1 + Σ y)` and `X(y)` at `y = e^u`.
    fn weighted_system(&self, u: &DVector<f64>) -> (DMatrix<f64>, DVector<f64>, Vec<f64>) {
        let w = self.normalized_weights(u);
        let d = self.dim();
        let mut m = DMatrix::zeros(d, d);
        let mut nu = DVector::zeros(d);
        for (i, wi) in w.iter().enumerate() {
            if *wi > 0.0 {
                m += &self.precisions[i] * *wi;
                nu.axpy(*wi, &self.precision_means[i], 1.0);
            }
        }
        let m = crate::mixture::symmetrize(m);
        let x = match m.clone().cholesky() {
            Some(ch) => ch.solve(&nu),
            None => m.clone().lu().solve(&nu).unwrap_or_else(|| DVector::from_element(d, f64::NAN)),
        };
        (m, x, w)
    }

    /// `X(e^u)`.
    pub fn x_of_log_y(&self, u: &DVector<f64>) -> DVector<f64> {
        self.weighted_system(u).1
    }

    /// `X(y) = M(y)⁻¹ ν(y)`; requires every `y_i > 0`.
    pub fn x_of_y(&self, y: &DVector<f64>) -> Result<DVector<f64>> {
        self.check_positive(y)?;
        Ok(self.x_of_log_y(&y.map(f64::ln)))
    }

    fn check_positive(&self, y: &DVector<f64>) -> Result<()> {
        if y.len() != self.len() {
            return Err(Error::DimensionMismatch {
                expected: self.len(),
                got: y.len(),
            });
        }
        if y.iter().any(|v| !(*v > 0.0 && v.is_finite())) {
            return Err(Error::InvalidParameter("reduced coordinates must be positive and finite".into()));
        }
        Ok(())
    }

    /// `R(y)` componentwise.
    pub fn residual_r(&self, y: &DVector<f64>) -> Result<DVector<f64>> {
        let x = self.x_of_y(y)?;
        Ok(DVector::from_iterator(
            self.len(),
            (0..self.len()).map(|j| y[j] - (self.log_betas[j] + self.q(j, &x)).exp()),
        ))
    }

    /// `S(u) = u - log β - q(X(e^u))`.
    pub fn log_residual(&self, u: &DVector<f64>) -> DVector<f64> {
        let x = self.x_of_log_y(u);
        DVector::from_iterator(self.len(), (0..self.len()).map(|j| u[j] - self.log_betas[j] - self.q(j, &x)))
    }

    /// `max_i |R_i(y)| / y_i` at `y = e^u`, computed without forming `y`.
    pub fn relative_residual(&self, u: &DVector<f64>) -> f64 {
        self.log_residual(u).iter().map(|s| (-s).exp_m1().abs()).fold(0.0, f64::max)
    }

    /// Jacobian `DS(u)`, similar to `DR(y)` at every root.
    pub fn log_jacobian(&self, u: &DVector<f64>) -> DMatrix<f64> {
        let (m, x, w) = self.weighted_system(u);
        let n = self.len();
        let chol = m.clone().cholesky();
        // dX/du_j = M̂⁻¹ A_j (μ_j - X) ŵ_j
        let mut dx = DMatrix::zeros(self.dim(), n);
        for (j, &i) in self.others.iter().enumerate() {
            let rhs = &self.precisions[i] * (&self.means[i] - &x) * w[i];
            let col = match &chol {
                Some(ch) => ch.solve(&rhs),
                None => m.clone().lu().solve(&rhs).unwrap_or_else(|| DVector::from_element(self.dim(), f64::NAN)),
            };
            dx.set_column(j, &col);
        }
        let mut jac = DMatrix::identity(n, n);
        for j in 0..n {
            let g = self.q_gradient(j, &x);
            let row = g.transpose() * &dx;
            for c in 0..n {
                jac[(j, c)] -= row[c];
            }
        }
        jac
    }

    /// `(E_0, …, E_{k-1})` of the system augmented by `z` with `z D(y) = 1`,
    /// `D = det M(y)` and `N = adj(M(y)) ν(y)`.
    pub fn augmented_residual(&self, y: &DVector<f64>, z: f64) -> Result<DVector<f64>> {
        self.check_positive(y)?;
        let (m, nu) = self.unnormalized_system(y);
        let det = m.determinant();
        let x = m
            .clone()
            .lu()
            .solve(&nu)
            .ok_or_else(|| Error::InvalidParameter("M(y) is singular".into()))?;
        let n_vec = x * det;
        let point = n_vec * z;
        let mut out = DVector::zeros(self.len() + 1);
        out[0] = z * det - 1.0;
        for j in 0..self.len() {
            out[j + 1] = y[j] - (self.log_betas[j] + self.q(j, &point)).exp();
        }
        Ok(out)
    }

    /// `(M(y), ν(y))` without normalization.
    pub fn unnormalized_system(&self, y: &DVector<f64>) -> (DMatrix<f64>, DVector<f64>) {
        let mut m = self.precisions[self.reference].clone();
        let mut nu = self.precision_means[self.reference].clone();
        for (j, &i) in self.others.iter().enumerate() {
            m += &self.precisions[i] * y[j];
            nu.axpy(y[j], &self.precision_means[i], 1.0);
        }
        (m, nu)
    }
}
