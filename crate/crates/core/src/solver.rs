//! Multistart search for the critical points of a mixture.
//!
//! Every start ends with damped Newton on the log-coordinate reduced system
//! `S(u) = 0`; a converged root is mapped back through `X`, polished by
//! Newton on `∇ log Φ`, deduplicated and classified by the eigenvalues of the
//! Hessian. Starts come from three sources:
//!
//! * a lattice of responsibility vectors `w` on the simplex, used directly as
//!   reduced coordinates `y_i = w_i / w_r`;
//! * x-space Newton from the barycenters `X(w)` of the unsmoothed lattice
//!   and from points on the segments between pairs of means;
//! * mean-shift chains from every component mean.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_bigint::BigUint;
use rayon::prelude::*;
use serde::Serialize;

use crate::bounds::{upper_bound, UpperFamily};
use crate::error::{Error, Result};
use crate::mixture::Mixture;
use crate::reduced::{build_reduced, ReducedSystem};

#[derive(Debug, Clone, Serialize)]
pub struct SolverConfig {
    /// Subdivisions `m` of the responsibility lattice `{n / m : Σ n_i = m}`.
    pub lattice_subdivisions: usize,
    pub max_newton_iter: usize,
    /// Convergence threshold on `‖S(u)‖_∞ / (1 + ‖u‖_∞)`.
    pub newton_tol: f64,
    /// Acceptance threshold on [`gradient_residual`].
    pub grad_tol: f64,
    /// Points closer than `dedup_tol · (1 + ‖x‖)` are merged.
    pub dedup_tol: f64,
    /// A point is degenerate when `|λ|_min / |λ|_max` falls below this.
    pub degeneracy_tol: f64,
    pub max_dim: usize,
    pub max_components: usize,
    /// Solve even when the size limits are exceeded.
    pub force: bool,
    /// Reference component; `None` picks the heaviest.
    pub reference: Option<usize>,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            lattice_subdivisions: 8,
            max_newton_iter: 200,
            newton_tol: 1e-12,
            grad_tol: 1e-9,
            dedup_tol: 1e-6,
            degeneracy_tol: 1e-8,
            max_dim: 6,
            max_components: 6,
            force: false,
            reference: None,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CriticalPoint {
    pub location: Vec<f64>,
    pub density: f64,
    pub log_density: f64,
    pub gradient_residual: f64,
    /// `‖x' - x‖ / (1 + ‖x‖)` for one mean-shift step `x'`.
    pub mean_shift_residual: f64,
    pub morse_index: usize,
    /// Eigenvalues of `D²Φ / Φ`, ascending.
    pub hessian_eigenvalues: Vec<f64>,
    pub eig_ratio: f64,
    pub degenerate: bool,
    pub is_mode: bool,
    /// `y = ρ(x)`; empty for a single component.
    pub reduced_coords: Vec<f64>,
    pub reduced_log_coords: Vec<f64>,
    /// `max_i |R_i(y)| / y_i`.
    pub reduced_residual: f64,
    /// `‖X(ρ(x)) - x‖ / (1 + ‖x‖)`.
    pub roundtrip_residual: f64,
    /// Smallest singular value of the log-coordinate Jacobian at `ρ(x)`.
    pub jacobian_min_singular: Option<f64>,
}

impl CriticalPoint {
    pub fn location_vector(&self) -> DVector<f64> {
        DVector::from_vec(self.location.clone())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct MorseVerdict {
    /// `M ≤ ⌊(N + 1) / 2⌋`.
    pub halving_ok: bool,
    /// `C_{d-1} ≥ M - 1`.
    pub index_ok: bool,
}

impl MorseVerdict {
    pub fn ok(&self) -> bool {
        self.halving_ok && self.index_ok
    }
}

/// Morse counting checks for `n` critical points, `m` modes and
/// `c_dminus1` points of index `d - 1`.
pub fn morse_check(n: usize, m: usize, c_dminus1: usize) -> MorseVerdict {
    MorseVerdict {
        halving_ok: m <= n.div_ceil(2),
        index_ok: c_dminus1 + 1 >= m,
    }
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct Diagnostics {
    pub starts: usize,
    pub converged: usize,
    pub dropped: usize,
    /// Largest distance from each reported point to a start merged into it.
    pub cluster_diameters: Vec<f64>,
    pub max_cluster_diameter: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SolveReport {
    pub dim: usize,
    pub components: usize,
    pub reference: Option<usize>,
    pub homoscedastic: bool,
    pub affine_rank: usize,
    pub points: Vec<CriticalPoint>,
    pub n_critical: usize,
    pub n_modes: usize,
    pub n_index_dminus1: usize,
    pub all_nondegenerate: bool,
    pub morse: MorseVerdict,
    pub morse_inequality_ok: bool,
    /// Upper bound on the critical count used by the sandwich check.
    pub critical_bound: String,
    pub upper_sandwich_ok: bool,
    pub diagnostics: Diagnostics,
}

impl SolveReport {
    pub fn modes(&self) -> impl Iterator<Item = &CriticalPoint> {
        self.points.iter().filter(|p| p.is_mode)
    }

    pub fn mode_locations(&self) -> Vec<DVector<f64>> {
        self.modes().map(CriticalPoint::location_vector).collect()
    }

    /// Whether every verdict holds.
    pub fn checks_ok(&self) -> bool {
        self.morse_inequality_ok && self.upper_sandwich_ok
    }
}

/// One mean-shift step `(Σ w_i A_i)⁻¹ Σ w_i A_i μ_i`.
pub fn mean_shift_step(mixture: &Mixture, x: &DVector<f64>) -> DVector<f64> {
    let (_, resp) = mixture.log_density_and_responsibilities(x);
    let d = mixture.dim();
    let mut m = DMatrix::zeros(d, d);
    let mut nu = DVector::zeros(d);
    for (c, w) in mixture.components().iter().zip(&resp) {
        if *w > 0.0 {
            m += c.precision() * *w;
            nu += c.precision() * c.mean() * *w;
        }
    }
    m.clone()
        .cholesky()
        .map(|ch| ch.solve(&nu))
        .or_else(|| m.lu().solve(&nu))
        .unwrap_or_else(|| x.clone())
}

/// `‖∇Φ(x)‖ / (Φ(x) · (Σ w_i ‖A_i‖₂)^{1/2})`, a dimensionless stationarity
/// measure that stays finite where `Φ` underflows.
pub fn gradient_residual(mixture: &Mixture, x: &DVector<f64>) -> f64 {
    Workspace::new(mixture).gradient_residual(x)
}

struct Workspace<'a> {
    mixture: &'a Mixture,
    precision_norms: Vec<f64>,
    step_cap: f64,
}

impl<'a> Workspace<'a> {
    fn new(mixture: &'a Mixture) -> Self {
        let precision_norms = mixture
            .components()
            .iter()
            .map(|c| SymmetricEigen::new(c.precision().clone()).eigenvalues.amax())
            .collect();
        Self {
            mixture,
            precision_norms,
            step_cap: 2.0 * mixture.max_std(),
        }
    }

    fn residual_with(&self, x: &DVector<f64>, resp: &[f64]) -> f64 {
        let g = self.mixture.weighted_score(x, resp);
        let scale: f64 = resp.iter().zip(&self.precision_norms).map(|(w, a)| w * a).sum();
        g.norm() / scale.sqrt()
    }

    fn gradient_residual(&self, x: &DVector<f64>) -> f64 {
        let (_, resp) = self.mixture.log_density_and_responsibilities(x);
        self.residual_with(x, &resp)
    }

    /// Damped Newton on `∇ log Φ = 0`.
    fn newton_x(&self, x0: DVector<f64>, max_iter: usize) -> (DVector<f64>, f64) {
        let mut x = x0;
        let mut r = self.gradient_residual(&x);
        for _ in 0..max_iter {
            if !r.is_finite() || r <= 1e-15 {
                break;
            }
            let (_, resp) = self.mixture.log_density_and_responsibilities(&x);
            let g = self.mixture.weighted_score(&x, &resp);
            let h = self.mixture.scaled_hessian_with(&x, &resp) - &g * g.transpose();
            let Some(mut step) = h.lu().solve(&(-&g)) else { break };
            let len = step.norm();
            if !len.is_finite() {
                break;
            }
            if len > self.step_cap {
                step *= self.step_cap / len;
            }
            let mut t = 1.0;
            let mut improved = false;
            for _ in 0..40 {
                let xn = &x + &step * t;
                let rn = self.gradient_residual(&xn);
                if rn < r {
                    x = xn;
                    r = rn;
                    improved = true;
                    break;
                }
                t *= 0.5;
            }
            if !improved {
                break;
            }
        }
        (x, r)
    }

    fn mean_shift_chain(&self, x0: DVector<f64>) -> DVector<f64> {
        let mut x = x0;
        for _ in 0..2000 {
            let next = mean_shift_step(self.mixture, &x);
            let done = (&next - &x).norm() <= 1e-13 * (1.0 + x.norm());
            x = next;
            if done {
                break;
            }
        }
        x
    }
}

/// Damped Newton on `S(u) = 0`; `None` if it does not converge.
fn newton_reduced(sys: &ReducedSystem, u0: DVector<f64>, cfg: &SolverConfig) -> Option<DVector<f64>> {
    const MAX_STEP: f64 = 10.0;
    let mut u = u0;
    let mut s = sys.log_residual(&u);
    let mut norm = s.norm();
    for _ in 0..cfg.max_newton_iter {
        if !norm.is_finite() {
            return None;
        }
        let scale = 1.0 + u.amax();
        if s.amax() <= cfg.newton_tol * scale {
            return Some(u);
        }
        let jac = sys.log_jacobian(&u);
        let mut step = jac.lu().solve(&(-&s))?;
        let big = step.amax();
        if !big.is_finite() {
            return None;
        }
        if big > MAX_STEP {
            step *= MAX_STEP / big;
        }
        let mut t = 1.0;
        let mut accepted = false;
        for _ in 0..40 {
            let un = &u + &step * t;
            let sn = sys.log_residual(&un);
            let nn = sn.norm();
            if nn < norm {
                u = un;
                s = sn;
                norm = nn;
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if !accepted {
            // stagnation at roundoff level still counts as a root
            return (s.amax() <= 1e2 * cfg.newton_tol * scale).then_some(u);
        }
    }
    (s.amax() <= cfg.newton_tol * (1.0 + u.amax())).then_some(u)
}

/// Compositions of `m` into `k` nonnegative parts, in lexicographic order.
fn compositions(m: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(left: usize, parts: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if parts == 1 {
            cur.push(left);
            out.push(cur.clone());
            cur.pop();
            return;
        }
        for n in 0..=left {
            cur.push(n);
            rec(left - n, parts - 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(m, k, &mut Vec::with_capacity(k), &mut out);
    out
}

enum Start {
    Reduced(DVector<f64>),
    Spatial(DVector<f64>),
    MeanShift(DVector<f64>),
}

fn lattice_log_coords(sys: &ReducedSystem, m: usize, k: usize) -> Vec<DVector<f64>> {
    // half-count smoothing keeps every cell strictly inside the simplex
    compositions(m, k)
        .into_iter()
        .map(|n| {
            let w = |i: usize| (n[i] as f64 + 0.5).ln();
            DVector::from_iterator(sys.len(), sys.others.iter().map(|&i| w(i) - w(sys.reference)))
        })
        .collect()
}

/// Interior points per segment between two means.
const SEGMENT_STARTS: usize = 7;

/// `X(w)` for every unsmoothed lattice cell; cells may leave components out
/// entirely, which lets narrow components drop from the barycenter.
fn lattice_barycenters(mixture: &Mixture, m: usize) -> Vec<DVector<f64>> {
    let d = mixture.dim();
    compositions(m, mixture.len())
        .into_iter()
        .filter_map(|n| {
            let mut a = DMatrix::zeros(d, d);
            let mut b = DVector::zeros(d);
            for (c, &ni) in mixture.components().iter().zip(&n) {
                if ni > 0 {
                    a += c.precision() * ni as f64;
                    b += c.precision() * c.mean() * ni as f64;
                }
            }
            a.cholesky().map(|ch| ch.solve(&b))
        })
        .collect()
}

/// Evenly spaced interior points on the segment between every pair of means.
fn segment_points(mixture: &Mixture, per_segment: usize) -> Vec<DVector<f64>> {
    let means = mixture.means();
    let mut out = Vec::new();
    for (i, a) in means.iter().enumerate() {
        for b in &means[i + 1..] {
            for j in 1..=per_segment {
                let t = j as f64 / (per_segment + 1) as f64;
                out.push(a + (b - a) * t);
            }
        }
    }
    out
}

fn check_scale(mixture: &Mixture, cfg: &SolverConfig) -> Result<()> {
    if !cfg.force && (mixture.dim() > cfg.max_dim || mixture.len() > cfg.max_components) {
        return Err(Error::TooLarge {
            dim: mixture.dim(),
            components: mixture.len(),
            max_dim: cfg.max_dim,
            max_components: cfg.max_components,
        });
    }
    Ok(())
}

/// Finds, deduplicates and classifies critical points.
pub fn find_critical_points(mixture: &Mixture, cfg: &SolverConfig) -> Result<SolveReport> {
    check_scale(mixture, cfg)?;
    let ws = Workspace::new(mixture);
    let k = mixture.len();
    let sys = if k >= 2 {
        Some(build_reduced(mixture, cfg.reference.unwrap_or_else(|| mixture.heaviest_component()))?)
    } else {
        None
    };

    let mut diagnostics = Diagnostics::default();
    let candidates: Vec<DVector<f64>> = match &sys {
        None => {
            diagnostics.starts = 1;
            diagnostics.converged = 1;
            vec![mixture.components()[0].mean().clone()]
        }
        Some(sys) => {
            let lattice = lattice_log_coords(sys, cfg.lattice_subdivisions.max(1), k);
            let mut starts: Vec<Start> = Vec::with_capacity(2 * lattice.len() + k);
            for u in &lattice {
                starts.push(Start::Reduced(u.clone()));
            }
            for x in lattice_barycenters(mixture, cfg.lattice_subdivisions.max(1)) {
                starts.push(Start::Spatial(x));
            }
            for x in segment_points(mixture, SEGMENT_STARTS) {
                starts.push(Start::Spatial(x));
            }
            for c in mixture.components() {
                starts.push(Start::MeanShift(c.mean().clone()));
            }
            diagnostics.starts = starts.len();
            let results: Vec<Option<DVector<f64>>> = starts
                .par_iter()
                .map(|start| {
                    let u0 = match start {
                        Start::Reduced(u) => u.clone(),
                        Start::Spatial(x) => {
                            let (x, r) = ws.newton_x(x.clone(), 100);
                            if !(r <= cfg.grad_tol) {
                                return None;
                            }
                            sys.log_ratios(&x)
                        }
                        Start::MeanShift(x) => sys.log_ratios(&ws.mean_shift_chain(x.clone())),
                    };
                    let u = newton_reduced(sys, u0, cfg)?;
                    let (x, r) = ws.newton_x(sys.x_of_log_y(&u), 20);
                    (r <= cfg.grad_tol && x.iter().all(|v| v.is_finite())).then_some(x)
                })
                .collect();
            diagnostics.converged = results.iter().filter(|r| r.is_some()).count();
            results.into_iter().flatten().collect()
        }
    };
    diagnostics.dropped = diagnostics.starts - diagnostics.converged;

    let (reps, diameters) = deduplicate(candidates, cfg.dedup_tol);
    diagnostics.max_cluster_diameter = diameters.iter().cloned().fold(0.0, f64::max);
    diagnostics.cluster_diameters = diameters;

    let points = reps
        .iter()
        .map(|x| classify_with(mixture, &ws, sys.as_ref(), x, cfg))
        .collect::<Result<Vec<_>>>()?;
    Ok(assemble_report(mixture, sys.as_ref().map(|s| s.reference), points, diagnostics))
}

fn lex_cmp(a: &DVector<f64>, b: &DVector<f64>) -> std::cmp::Ordering {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| x.total_cmp(y))
        .find(|o| o.is_ne())
        .unwrap_or(std::cmp::Ordering::Equal)
}

/// Sequential merge over lexicographically sorted candidates.
fn deduplicate(mut xs: Vec<DVector<f64>>, tol: f64) -> (Vec<DVector<f64>>, Vec<f64>) {
    xs.sort_by(lex_cmp);
    let mut reps: Vec<DVector<f64>> = Vec::new();
    let mut diam: Vec<f64> = Vec::new();
    for x in xs {
        let hit = reps
            .iter()
            .position(|r| (r - &x).norm() <= tol * (1.0 + r.norm().max(x.norm())));
        match hit {
            Some(i) => diam[i] = diam[i].max((&reps[i] - &x).norm()),
            None => {
                reps.push(x);
                diam.push(0.0);
            }
        }
    }
    (reps, diam)
}

/// Classifies a single point; fails if it is not critical within `grad_tol`.
pub fn classify(mixture: &Mixture, x: &DVector<f64>, cfg: &SolverConfig) -> Result<CriticalPoint> {
    if x.len() != mixture.dim() {
        return Err(Error::DimensionMismatch {
            expected: mixture.dim(),
            got: x.len(),
        });
    }
    let ws = Workspace::new(mixture);
    let sys = if mixture.len() >= 2 {
        Some(build_reduced(mixture, cfg.reference.unwrap_or_else(|| mixture.heaviest_component()))?)
    } else {
        None
    };
    classify_with(mixture, &ws, sys.as_ref(), x, cfg)
}

fn classify_with(
    mixture: &Mixture,
    ws: &Workspace<'_>,
    sys: Option<&ReducedSystem>,
    x: &DVector<f64>,
    cfg: &SolverConfig,
) -> Result<CriticalPoint> {
    let (log_density, resp) = mixture.log_density_and_responsibilities(x);
    let gradient_residual = ws.residual_with(x, &resp);
    if !(gradient_residual <= cfg.grad_tol) {
        return Err(Error::NotCritical {
            residual: gradient_residual,
            tolerance: cfg.grad_tol,
        });
    }
    let hessian = mixture.scaled_hessian_with(x, &resp);
    let mut eig: Vec<f64> = SymmetricEigen::new(hessian).eigenvalues.iter().copied().collect();
    eig.sort_by(f64::total_cmp);
    let abs_max = eig.iter().map(|v| v.abs()).fold(0.0, f64::max);
    let abs_min = eig.iter().map(|v| v.abs()).fold(f64::INFINITY, f64::min);
    let eig_ratio = if abs_max > 0.0 { abs_min / abs_max } else { 0.0 };
    let degenerate = eig_ratio < cfg.degeneracy_tol;
    let morse_index = eig.iter().filter(|v| **v < 0.0).count();
    let xnorm = x.norm();
    let mean_shift_residual = (mean_shift_step(mixture, x) - x).norm() / (1.0 + xnorm);

    let (reduced_coords, reduced_log_coords, reduced_residual, roundtrip_residual, jacobian_min_singular) = match sys
    {
        None => (Vec::new(), Vec::new(), 0.0, 0.0, None),
        Some(sys) => {
            let u = sys.log_ratios(x);
            let back = sys.x_of_log_y(&u);
            let sv = sys.log_jacobian(&u).singular_values();
            (
                u.iter().map(|v| v.exp()).collect(),
                u.iter().copied().collect(),
                sys.relative_residual(&u),
                (back - x).norm() / (1.0 + xnorm),
                Some(sv.min()),
            )
        }
    };

    Ok(CriticalPoint {
        location: x.iter().copied().collect(),
        density: log_density.exp(),
        log_density,
        gradient_residual,
        mean_shift_residual,
        morse_index,
        hessian_eigenvalues: eig,
        eig_ratio,
        degenerate,
        is_mode: morse_index == mixture.dim(),
        reduced_coords,
        reduced_log_coords,
        reduced_residual,
        roundtrip_residual,
        jacobian_min_singular,
    })
}

/// Bound on the number of nondegenerate critical points used by the
/// sandwich check: `BEST`, tightened by `BEST_HOM` at the affine rank for
/// homoscedastic mixtures.
pub fn critical_point_bound(mixture: &Mixture) -> Result<BigUint> {
    let k = mixture.len() as u64;
    let d = mixture.dim() as u64;
    if k == 1 {
        return Ok(BigUint::from(1u8));
    }
    let general = upper_bound(UpperFamily::Best, d, k)?.exact;
    if mixture.is_homoscedastic() {
        let r = mixture.affine_rank() as u64;
        if r == 0 {
            return Ok(BigUint::from(1u8));
        }
        let hom = upper_bound(UpperFamily::BestHom, r, k)?.exact;
        return Ok(general.min(hom));
    }
    Ok(general)
}

fn assemble_report(
    mixture: &Mixture,
    reference: Option<usize>,
    points: Vec<CriticalPoint>,
    diagnostics: Diagnostics,
) -> SolveReport {
    let d = mixture.dim();
    let n = points.len();
    let m = points.iter().filter(|p| p.is_mode).count();
    let c = points.iter().filter(|p| p.morse_index + 1 == d).count();
    let all_nondegenerate = points.iter().all(|p| !p.degenerate);
    let morse = morse_check(n, m, c);
    let morse_inequality_ok = !all_nondegenerate || morse.ok();

    let nd: Vec<&CriticalPoint> = points.iter().filter(|p| !p.degenerate).collect();
    let nd_n = BigUint::from(nd.len());
    let nd_m = BigUint::from(nd.iter().filter(|p| p.is_mode).count());
    let (critical_bound, upper_sandwich_ok) = match critical_point_bound(mixture) {
        Ok(bound) => {
            let mode_bound = (&bound + 1u8) / 2u8;
            let ok = nd_n <= bound && nd_m <= mode_bound;
            (bound.to_string(), ok)
        }
        Err(e) => (format!("unavailable: {e}"), false),
    };

    SolveReport {
        dim: d,
        components: mixture.len(),
        reference,
        homoscedastic: mixture.is_homoscedastic(),
        affine_rank: mixture.affine_rank(),
        n_critical: n,
        n_modes: m,
        n_index_dminus1: c,
        all_nondegenerate,
        morse,
        morse_inequality_ok,
        critical_bound,
        upper_sandwich_ok,
        points,
        diagnostics,
    }
}
