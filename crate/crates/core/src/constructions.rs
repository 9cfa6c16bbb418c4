//! Witness mixtures with many modes: regular-simplex seeds, dimension lifts,
//! Cartesian products and remote padding, plus recipe realization and
//! numerical verification.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::bounds::{SeedRecipe, SeedTriple};
use crate::error::{Error, Result};
use crate::mixture::Mixture;
use crate::solver::{find_critical_points, SolveReport, SolverConfig};

/// Simplex seed width used by the registry; three vertices lose their
/// ray modes near `ε ≈ 0.093`.
pub const DEFAULT_SIMPLEX_EPSILON: f64 = 0.05;

/// Default tilt-polish RNG seed.
pub const DEFAULT_TILT_SEED: u64 = 0x5EED;

/// Equal-weight homoscedastic mixture at the vertices of a unit regular
/// simplex in `R^{K-1}` with covariance `τ I`, `τ = (1 + ε) / (K - 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SimplexSeedSpec {
    pub vertices: usize,
    pub epsilon: f64,
}

impl SimplexSeedSpec {
    pub fn new(vertices: usize, epsilon: f64) -> Result<Self> {
        if vertices < 3 {
            return Err(Error::InvalidParameter(format!(
                "simplex seed needs K >= 3 vertices, got {vertices}"
            )));
        }
        if !(epsilon > 0.0 && epsilon <= 0.2) {
            return Err(Error::InvalidParameter(format!(
                "simplex seed needs 0 < epsilon <= 0.2, got {epsilon}"
            )));
        }
        Ok(Self { vertices, epsilon })
    }

    /// `n = K - 1`.
    pub fn n(&self) -> usize {
        self.vertices - 1
    }

    pub fn tau(&self) -> f64 {
        (1.0 + self.epsilon) / self.n() as f64
    }

    /// Radial parameter `a = K / (n τ)`.
    pub fn radial_a(&self) -> f64 {
        self.vertices as f64 / (self.n() as f64 * self.tau())
    }

    /// `K + 1`: the center and one mode per ray.
    pub fn expected_modes(&self) -> usize {
        self.vertices + 1
    }
}

/// Unit vertices `v_1, …, v_K` of a regular simplex in `R^{K-1}` centered at
/// the origin, so `v_i · v_j = -1/(K-1)` for `i ≠ j`.
pub fn simplex_vertices(k: usize) -> Vec<DVector<f64>> {
    assert!(k >= 2, "a simplex needs at least two vertices");
    let n = k - 1;
    let centered = |i: usize| DVector::from_fn(k, |j, _| if i == j { 1.0 } else { 0.0 } - 1.0 / k as f64);
    let mut basis: Vec<DVector<f64>> = Vec::with_capacity(n);
    for i in 0..n {
        let mut v = centered(i);
        for b in &basis {
            let p = b.dot(&v);
            v.axpy(-p, b, 1.0);
        }
        basis.push(v.normalize());
    }
    (0..k)
        .map(|i| {
            let c = centered(i);
            DVector::from_iterator(n, basis.iter().map(|b| b.dot(&c))).normalize()
        })
        .collect()
}

/// The simplex seed and its expected mode count `K + 1`.
pub fn simplex_seed(k: usize, epsilon: f64) -> Result<(Mixture, usize)> {
    let spec = SimplexSeedSpec::new(k, epsilon)?;
    let n = spec.n();
    let m = Mixture::homoscedastic(vec![1.0 / k as f64; k], simplex_vertices(k), DMatrix::identity(n, n) * spec.tau())?;
    Ok((m, spec.expected_modes()))
}

/// `ℓ_a(t) = log(1 - t) + a t - log(1 + n t)`.
pub fn radial_function(n: usize, a: f64, t: f64) -> f64 {
    (-t).ln_1p() + a * t - (n as f64 * t).ln_1p()
}

/// Sign-change roots of `ℓ_a` on `(0, 1)` from a `10⁴`-cell grid refined by
/// bisection to `1e-12`.
pub fn radial_critical_roots(n: usize, a: f64) -> Vec<f64> {
    const CELLS: usize = 10_000;
    let f = |t: f64| radial_function(n, a, t);
    let mut roots = Vec::new();
    let mut prev_t = 1.0 / CELLS as f64;
    let mut prev = f(prev_t);
    for j in 2..CELLS {
        let t = j as f64 / CELLS as f64;
        let v = f(t);
        if prev == 0.0 {
            roots.push(prev_t);
        } else if prev * v < 0.0 {
            let (mut lo, mut hi, flo) = (prev_t, t, prev);
            while hi - lo > 1e-12 {
                let mid = 0.5 * (lo + hi);
                if f(mid) * flo > 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            roots.push(0.5 * (lo + hi));
        }
        prev_t = t;
        prev = v;
    }
    roots
}

/// Largest root where `ℓ_a` changes sign from positive to negative: the
/// radial distance of a ray mode.
pub fn radial_mode_distance(n: usize, a: f64) -> Option<f64> {
    radial_critical_roots(n, a)
        .into_iter()
        .rev()
        .find(|&t| radial_function(n, a, t - 1e-7) > 0.0 && radial_function(n, a, t + 1e-7) < 0.0)
}

fn block_diag(a: &DMatrix<f64>, b: &DMatrix<f64>) -> DMatrix<f64> {
    let (p, q) = (a.nrows(), b.nrows());
    let mut m = DMatrix::zeros(p + q, p + q);
    m.view_mut((0, 0), (p, p)).copy_from(a);
    m.view_mut((p, p), (q, q)).copy_from(b);
    m
}

fn concat(a: &DVector<f64>, b: &DVector<f64>) -> DVector<f64> {
    DVector::from_iterator(a.len() + b.len(), a.iter().chain(b.iter()).copied())
}

/// `G(u) γ(v)` with `γ = N(0, pad_covariance)` on the extra coordinates.
pub fn lift(mixture: &Mixture, target_dim: usize, pad_covariance: &DMatrix<f64>) -> Result<Mixture> {
    let d = mixture.dim();
    if target_dim <= d {
        return Err(Error::InvalidParameter(format!(
            "lift target dimension {target_dim} must exceed {d}"
        )));
    }
    let extra = target_dim - d;
    if pad_covariance.nrows() != extra || pad_covariance.ncols() != extra {
        return Err(Error::DimensionMismatch {
            expected: extra,
            got: pad_covariance.nrows(),
        });
    }
    let zero = DVector::zeros(extra);
    Mixture::new(
        mixture.weights(),
        mixture.means().iter().map(|m| concat(m, &zero)).collect(),
        mixture.covariances().iter().map(|c| block_diag(c, pad_covariance)).collect(),
    )
}

/// `F(x) G(y)`: components indexed by pairs `(i, j)`, `i` major.
pub fn product(first: &Mixture, second: &Mixture) -> Result<Mixture> {
    let mut weights = Vec::with_capacity(first.len() * second.len());
    let mut means = Vec::with_capacity(weights.capacity());
    let mut covs = Vec::with_capacity(weights.capacity());
    for a in first.components() {
        for b in second.components() {
            weights.push(a.weight() * b.weight());
            means.push(concat(a.mean(), b.mean()));
            covs.push(block_diag(a.covariance(), b.covariance()));
        }
    }
    Mixture::new(weights, means, covs)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PaddingSpec {
    pub count: usize,
    pub separation_factor: f64,
    /// Weight of each new component; the rest is scaled by `1 - θ`.
    pub weight_theta: f64,
}

impl PaddingSpec {
    pub fn new(count: usize) -> Self {
        Self {
            count,
            separation_factor: 1.0,
            weight_theta: 0.5,
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.separation_factor > 0.0 && self.separation_factor.is_finite()) {
            return Err(Error::InvalidParameter("separation factor must be positive".into()));
        }
        if !(self.weight_theta > 0.0 && self.weight_theta <= 0.5) {
            return Err(Error::InvalidParameter(format!(
                "padding weight must lie in (0, 1/2], got {}",
                self.weight_theta
            )));
        }
        Ok(())
    }
}

/// A padded mixture with a ball around every claimed mode.
#[derive(Debug, Clone)]
pub struct Padded {
    pub mixture: Mixture,
    /// Claimed mode locations: the base witnesses followed by one point per
    /// new component.
    pub witnesses: Vec<DVector<f64>>,
    pub radii: Vec<f64>,
    /// Separation doublings used for each new component.
    pub doublings: Vec<u32>,
}

const MAX_DOUBLINGS: u32 = 40;

/// Test directions for the sampled boundary check of a ball.
fn sphere_directions(d: usize) -> Vec<DVector<f64>> {
    let mut dirs = Vec::new();
    for i in 0..d {
        for s in [-1.0, 1.0] {
            let mut v = DVector::zeros(d);
            v[i] = s;
            dirs.push(v);
        }
    }
    for i in 0..d {
        for j in i + 1..d {
            for (si, sj) in [(1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)] {
                let mut v = DVector::zeros(d);
                v[i] = si;
                v[j] = sj;
                dirs.push(v.normalize());
            }
        }
    }
    if d > 1 {
        let mut rng = ChaCha8Rng::seed_from_u64(DEFAULT_TILT_SEED);
        for _ in 0..64 {
            let v = DVector::from_fn(d, |_, _| rng.gen_range(-1.0..1.0));
            if v.norm() > 1e-3 {
                dirs.push(v.normalize());
            }
        }
    }
    dirs
}

/// `log Φ(center) > log Φ` at every sampled point of the sphere of radius `r`.
fn ball_isolates(m: &Mixture, center: &DVector<f64>, r: f64, dirs: &[DVector<f64>]) -> bool {
    let f0 = m.log_density(center);
    dirs.iter().all(|u| m.log_density(&(center + u * r)) < f0)
}

fn min_std(m: &Mixture) -> f64 {
    m.components()
        .iter()
        .map(|c| SymmetricEigen::new(c.covariance().clone()).eigenvalues.min().sqrt())
        .fold(f64::INFINITY, f64::min)
}

fn pad_covariance(m: &Mixture) -> DMatrix<f64> {
    if m.is_homoscedastic() {
        m.components()[0].covariance().clone()
    } else {
        m.covariances().iter().fold(DMatrix::zeros(m.dim(), m.dim()), |acc, c| acc + c) / m.len() as f64
    }
}

/// Witness balls around isolated base modes: radius `min(0.4 · gap, σ_min)`,
/// halved until the sampled boundary test passes.
fn witness_radii(m: &Mixture, witnesses: &[DVector<f64>], dirs: &[DVector<f64>]) -> Result<Vec<f64>> {
    let smin = min_std(m);
    witnesses
        .iter()
        .enumerate()
        .map(|(i, w)| {
            let gap = witnesses
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != i)
                .map(|(_, v)| (v - w).norm())
                .fold(f64::INFINITY, f64::min);
            let mut r = (0.4 * gap).min(smin);
            for _ in 0..30 {
                if ball_isolates(m, w, r, dirs) {
                    return Ok(r);
                }
                r *= 0.5;
            }
            Err(Error::InvalidParameter(format!(
                "witness {i} is not an isolated maximum of the base mixture"
            )))
        })
        .collect()
}

/// Adds `spec.count` remote components one at a time, each of weight `θ`,
/// doubling the separation until every ball passes the boundary test.
/// `witnesses` are isolated modes of `mixture`.
pub fn pad_remote(mixture: &Mixture, spec: &PaddingSpec, witnesses: &[DVector<f64>]) -> Result<Padded> {
    spec.validate()?;
    let d = mixture.dim();
    let dirs = sphere_directions(d);
    let mut current = mixture.clone();
    let mut wits: Vec<DVector<f64>> = witnesses.to_vec();
    let mut radii = witness_radii(mixture, witnesses, &dirs)?;
    let mut doublings = Vec::with_capacity(spec.count);
    let cov = pad_covariance(mixture);
    let new_radius = 2.0 * SymmetricEigen::new(cov.clone()).eigenvalues.max().sqrt();
    let theta = spec.weight_theta;

    for p in 0..spec.count {
        let mut dir = DVector::zeros(d);
        dir[(p / 2) % d] = if p % 2 == 0 { 1.0 } else { -1.0 };
        let base_dist = spec.separation_factor * (current.mean_diameter() + 10.0 * current.max_std());
        let centroid = current.mean_centroid();
        let mut placed = None;
        for t in 0..=MAX_DOUBLINGS {
            let a = &centroid + &dir * (base_dist * 2f64.powi(t as i32));
            let mut weights: Vec<f64> = current.weights().iter().map(|w| w * (1.0 - theta)).collect();
            weights.push(theta);
            let mut means = current.means();
            means.push(a.clone());
            let mut covs = current.covariances();
            covs.push(cov.clone());
            let candidate = Mixture::new(weights, means, covs)?;
            let ok = ball_isolates(&candidate, &a, new_radius, &dirs)
                && wits.iter().zip(&radii).all(|(w, r)| ball_isolates(&candidate, w, *r, &dirs));
            if ok {
                placed = Some((candidate, a, t));
                break;
            }
        }
        let Some((candidate, a, t)) = placed else {
            return Err(Error::PaddingFailed { doublings: MAX_DOUBLINGS as usize });
        };
        current = candidate;
        wits.push(a);
        radii.push(new_radius);
        doublings.push(t);
    }
    Ok(Padded {
        mixture: current,
        witnesses: wits,
        radii,
        doublings,
    })
}

/// Nondegenerate modes found by the solver.
pub fn solved_modes(mixture: &Mixture, cfg: &SolverConfig) -> Result<Vec<DVector<f64>>> {
    let report = find_critical_points(mixture, cfg)?;
    Ok(report
        .points
        .iter()
        .filter(|p| p.is_mode && !p.degenerate)
        .map(|p| p.location_vector())
        .collect())
}

/// Seed mixtures by triple. Two-component one-dimensional pairs and simplex
/// seeds are built in; anything else must be registered.
#[derive(Debug, Clone, Default)]
pub struct SeedRegistry {
    custom: BTreeMap<SeedTriple, Mixture>,
    pub simplex_epsilon: Option<f64>,
}

impl SeedRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    /// Registers a witness for `triple`; its dimension and component count
    /// must match.
    pub fn register(&mut self, triple: SeedTriple, mixture: Mixture) -> Result<()> {
        if mixture.dim() != triple.dim as usize || mixture.len() != triple.comps as usize {
            return Err(Error::InvalidParameter(format!(
                "mixture with d={}, k={} cannot witness seed {triple}",
                mixture.dim(),
                mixture.len()
            )));
        }
        self.custom.insert(triple, mixture);
        Ok(())
    }

    pub fn build(&self, triple: SeedTriple) -> Result<Mixture> {
        if let Some(m) = self.custom.get(&triple) {
            return Ok(m.clone());
        }
        let SeedTriple { dim, comps, modes } = triple;
        if (dim, comps, modes) == (1, 2, 2) {
            return bimodal_pair();
        }
        if comps >= 3 && dim + 1 == comps && modes == comps + 1 {
            return Ok(simplex_seed(comps as usize, self.simplex_epsilon.unwrap_or(DEFAULT_SIMPLEX_EPSILON))?.0);
        }
        Err(Error::UnregisteredSeed { dim, comps, modes })
    }
}

/// Equal-weight unit-variance pair at `±2`, the built-in `(1, 2, 2)` seed.
pub fn bimodal_pair() -> Result<Mixture> {
    Mixture::homoscedastic(
        vec![0.5, 0.5],
        vec![DVector::from_element(1, -2.0), DVector::from_element(1, 2.0)],
        DMatrix::identity(1, 1),
    )
}

/// A recipe from a seed list for dimension `d` and `k` components.
pub fn recipe_from_seeds(seeds: Vec<SeedTriple>, d: u32, k: u32) -> Result<SeedRecipe> {
    let mut seeds = seeds;
    seeds.sort();
    let kk: u64 = seeds.iter().map(|s| u64::from(s.comps)).product();
    let dim: u64 = seeds.iter().map(|s| u64::from(s.dim)).sum();
    if kk > u64::from(k) || dim > u64::from(d) {
        return Err(Error::InvalidParameter(format!(
            "seeds need {dim} dimensions and {kk} components, more than d={d}, k={k}"
        )));
    }
    let modes: u64 = seeds.iter().map(|s| u64::from(s.modes)).product();
    let pad = u32::try_from(u64::from(k) - kk).expect("pad fits in u32");
    Ok(SeedRecipe {
        seeds,
        lift_to: d,
        pad,
        value: u64::from(pad) + modes,
    })
}

/// Product of the seeds, lifted to `lift_to` dimensions with unit pad
/// covariance and padded with `pad` remote components. An empty seed list
/// starts from the standard Gaussian.
pub fn realize_recipe(recipe: &SeedRecipe, registry: &SeedRegistry, cfg: &SolverConfig) -> Result<Padded> {
    if !recipe.is_admissible(recipe.components()) || recipe.lift_to == 0 {
        return Err(Error::InvalidParameter(format!("recipe is not admissible: {recipe:?}")));
    }
    let d = recipe.lift_to as usize;
    let (base, witnesses) = if recipe.seeds.is_empty() {
        (Mixture::single(DVector::zeros(d), DMatrix::identity(d, d))?, vec![DVector::zeros(d)])
    } else {
        let mut mix: Option<Mixture> = None;
        let mut wits: Vec<DVector<f64>> = vec![DVector::zeros(0)];
        for &s in &recipe.seeds {
            let seed = registry.build(s)?;
            let modes = solved_modes(&seed, cfg)?;
            wits = wits.iter().flat_map(|w| modes.iter().map(move |m| concat(w, m))).collect();
            mix = Some(match mix {
                None => seed,
                Some(prev) => product(&prev, &seed)?,
            });
        }
        let mut mix = mix.expect("nonempty seed list");
        let extra = d - mix.dim();
        if extra > 0 {
            mix = lift(&mix, d, &DMatrix::identity(extra, extra))?;
            let zero = DVector::zeros(extra);
            wits = wits.iter().map(|w| concat(w, &zero)).collect();
        }
        (mix, wits)
    };
    pad_remote(&base, &PaddingSpec::new(recipe.pad as usize), &witnesses)
}

#[derive(Debug, Clone, Serialize)]
pub struct Verification {
    pub claim: usize,
    pub verified_modes: usize,
    pub n_critical: usize,
    pub all_nondegenerate: bool,
    pub checks_ok: bool,
    pub passed: bool,
    /// Degenerate points survived every tilt attempt.
    pub inconclusive: bool,
    /// Tilt vector applied before the final solve, if any.
    pub tilt: Option<Vec<f64>>,
    #[serde(skip)]
    pub report: Option<SolveReport>,
}

/// Solves `mixture` and compares the mode count with `claim`. When
/// degenerate points appear, retries on a tilt `e^{c·x} Φ` with a random
/// `‖c‖ = 1e-3` from `seed`, halving `‖c‖` up to four times.
pub fn verify_modes(mixture: &Mixture, claim: usize, cfg: &SolverConfig, seed: u64) -> Result<Verification> {
    let mut report = find_critical_points(mixture, cfg)?;
    let mut tilt = None;
    if !report.all_nondegenerate {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let dir = loop {
            let v = DVector::from_fn(mixture.dim(), |_, _| rng.gen_range(-1.0..1.0));
            if v.norm() > 1e-3 {
                break v.normalize();
            }
        };
        let mut size = 1e-3;
        for _ in 0..5 {
            let c = &dir * size;
            let tilted = find_critical_points(&mixture.tilt(&c)?, cfg)?;
            if tilted.all_nondegenerate {
                report = tilted;
                tilt = Some(c.iter().copied().collect());
                break;
            }
            size *= 0.5;
        }
    }
    let checks_ok = report.checks_ok();
    let inconclusive = !report.all_nondegenerate;
    Ok(Verification {
        claim,
        verified_modes: report.n_modes,
        n_critical: report.n_critical,
        all_nondegenerate: report.all_nondegenerate,
        checks_ok,
        passed: !inconclusive && checks_ok && report.n_modes >= claim,
        inconclusive,
        tilt,
        report: Some(report),
    })
}

/// Sidecar record written next to a constructed witness.
#[derive(Debug, Clone, Serialize)]
pub struct Provenance {
    pub kind: String,
    pub parameters: serde_json::Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub recipe: Option<SeedRecipe>,
    pub dim: usize,
    pub components: usize,
    pub claimed_modes: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verification: Option<Verification>,
    pub solver: SolverConfig,
}
