//! Library results against independent oracles written directly from the
//! defining formulas.

mod common;

use common::{random_low_rank_homoscedastic, random_spd};
use modecount::bounds::{
    aim_conjecture, binomial, lower_bound, seed_closure_bound, upper_bound, LowerFamily, SeedFamily, SeedTriple,
    UpperFamily,
};
use modecount::constructions::{product, simplex_vertices};
use modecount::mixture::reduce_homoscedastic;
use modecount::reduced::build_reduced;
use modecount::solver::{find_critical_points, SolverConfig};
use modecount::Mixture;
use nalgebra::{DMatrix, DVector};
use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn choose(n: u128, r: u128) -> u128 {
    if r > n {
        return 0;
    }
    (0..r).fold(1u128, |acc, i| acc * (n - i) / (i + 1))
}

#[test]
fn upper_bounds_match_machine_integer_formulas() {
    for d in 1..=6u128 {
        for k in 2..=6u128 {
            let c = choose(k - 1, 2) as u32;
            let het = 2u128.pow(d as u32 + c) * (d + 2 * d.min(k - 1) + 1).pow(k as u32 - 1);
            let aug = 2u128.pow(c) * (d + 1) * ((2 * k - 1) * d + 2 * k - 1).pow(k as u32 - 1);
            let aeh = 2u128.pow(d as u32 + choose(k, 2) as u32) * (5 + 3 * d).pow(k as u32);
            let hom = 2u128.pow(d as u32 + c) * (d + d.min(k - 1) + 1).pow(k as u32 - 1);
            let aug_hom = 2u128.pow(c + 1) * (2 * k).pow(k as u32 - 1);
            let crit = 2u128.pow(c + 2) * 5u128.pow(d as u32 - 1) * (6 * d - 2).pow(k as u32 - 1);
            let crit_hom = 2u128.pow(c + 2) * 4u128.pow(d as u32 - 1) * (4 * d - 1).pow(k as u32 - 1);
            let (dd, kk) = (d as u64, k as u64);
            let lib = |f| upper_bound(f, dd, kk).unwrap().exact;
            assert_eq!(lib(UpperFamily::Het), BigUint::from(het));
            assert_eq!(lib(UpperFamily::Aug), BigUint::from(aug));
            assert_eq!(lib(UpperFamily::Aeh), BigUint::from(aeh));
            assert_eq!(lib(UpperFamily::Hom), BigUint::from(hom));
            assert_eq!(lib(UpperFamily::AugHom), BigUint::from(aug_hom));
            assert_eq!(lib(UpperFamily::Crit), BigUint::from(crit));
            assert_eq!(lib(UpperFamily::CritHom), BigUint::from(crit_hom));
            assert_eq!(lib(UpperFamily::Best), BigUint::from(het.min(aug)));
            assert_eq!(lib(UpperFamily::BestHom), BigUint::from(hom.min(aug).min(aug_hom)));
        }
    }
}

#[test]
fn lower_bounds_match_direct_enumeration() {
    for d in 1..=12u128 {
        for k in 2..=9u128 {
            // every split of d into s nearly equal parts, 2^s <= k
            let mut pp = 0;
            for s in 1..=d {
                if 1u128 << s > k {
                    break;
                }
                let mut parts = vec![d / s; s as usize];
                for p in parts.iter_mut().take((d % s) as usize) {
                    *p += 1;
                }
                let prod: u128 = parts.iter().map(|p| p + 1).product();
                pp = pp.max(k - (1 << s) + prod);
            }
            assert_eq!(lower_bound(LowerFamily::Pp, d as u64, k as u64).unwrap().exact, BigUint::from(pp));
            if d >= 2 {
                let bin = k + (2..=d.min(k)).map(|r| choose(k, r)).max().unwrap_or(0);
                let aeh = choose(k, d) + k;
                let lib = |f| lower_bound(f, d as u64, k as u64).unwrap().exact;
                assert_eq!(lib(LowerFamily::Bin), BigUint::from(bin), "({d},{k})");
                assert_eq!(lib(LowerFamily::AehL), BigUint::from(aeh));
                assert_eq!(lib(LowerFamily::BestL), BigUint::from(bin.max(pp)));
            }
            assert_eq!(aim_conjecture(d as u64, k as u64).unwrap().exact, BigUint::from(choose(d + k - 1, d)));
            assert_eq!(binomial(d as u64, k as u64), BigUint::from(choose(d, k)));
        }
    }
}

/// Exhaustive search over all seed multisets, without memoization.
fn brute_closure(seeds: &[SeedTriple], d: u32, k: u64, start: usize, dim: u32, comps: u64, modes: u64, best: &mut u64) {
    if comps <= k {
        *best = (*best).max(k - comps + modes);
    }
    for (j, s) in seeds.iter().enumerate().skip(start) {
        let nc = comps * u64::from(s.comps);
        if dim + s.dim <= d && nc <= k {
            brute_closure(seeds, d, k, j, dim + s.dim, nc, modes * u64::from(s.modes), best);
        }
    }
}

#[test]
fn seed_closure_matches_exhaustive_search() {
    let families = [
        vec![SeedFamily::RayRen],
        vec![SeedFamily::Simplex],
        vec![SeedFamily::RayRen, SeedFamily::Simplex],
        vec![SeedFamily::Custom(vec![SeedTriple::new(2, 3, 7).unwrap(), SeedTriple::new(1, 2, 2).unwrap()])],
    ];
    for fam in &families {
        for d in 1..=9u32 {
            for k in 2..=9u64 {
                let seeds: Vec<SeedTriple> = fam.iter().flat_map(|f| f.seeds_within(d, k as u32)).collect();
                let mut best = 0;
                brute_closure(&seeds, d, k, 0, 0, 1, 1, &mut best);
                let (v, recipe) = seed_closure_bound(u64::from(d), k, fam).unwrap();
                assert_eq!(v.exact, BigUint::from(best), "{fam:?} d={d} k={k}");
                assert!(recipe.is_admissible(k));
            }
        }
    }
}

#[test]
fn ratio_matches_density_quotient_at_random_points() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let d = 3;
    let m = Mixture::new(
        vec![0.35, 0.65],
        vec![
            DVector::from_fn(d, |_, _| rng.gen_range(-2.0..2.0)),
            DVector::from_fn(d, |_, _| rng.gen_range(-2.0..2.0)),
        ],
        vec![random_spd(&mut rng, d, 0.4), random_spd(&mut rng, d, 0.4)],
    )
    .unwrap();
    let sys = build_reduced(&m, 1).unwrap();
    let density = |i: usize, x: &DVector<f64>| {
        let c = &m.components()[i];
        let diff = x - c.mean();
        let q = diff.dot(&(c.covariance().clone().try_inverse().unwrap() * &diff));
        c.weight() * (-0.5 * q).exp() / ((2.0 * std::f64::consts::PI).powi(d as i32) * c.covariance().determinant()).sqrt()
    };
    for _ in 0..100 {
        let x = DVector::from_fn(d, |_, _| rng.gen_range(-3.0..3.0));
        let direct = density(0, &x) / density(1, &x);
        let rho = sys.ratios(&x)[0];
        assert!((rho / direct - 1.0).abs() < 1e-10, "{rho} vs {direct}");
    }
}

fn cofactor_det(m: &DMatrix<f64>) -> f64 {
    let n = m.nrows();
    if n == 1 {
        return m[(0, 0)];
    }
    (0..n)
        .map(|j| {
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            sign * m[(0, j)] * cofactor_det(&m.clone().remove_row(0).remove_column(j))
        })
        .sum()
}

fn adjugate(m: &DMatrix<f64>) -> DMatrix<f64> {
    let n = m.nrows();
    if n == 1 {
        return DMatrix::from_element(1, 1, 1.0);
    }
    DMatrix::from_fn(n, n, |i, j| {
        let sign = if (i + j) % 2 == 0 { 1.0 } else { -1.0 };
        sign * cofactor_det(&m.clone().remove_row(j).remove_column(i))
    })
}

#[test]
fn augmented_residual_matches_cofactor_formula() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for d in 1..=4 {
        let k = 3;
        let m = Mixture::new(
            vec![0.2, 0.3, 0.5],
            (0..k).map(|_| DVector::from_fn(d, |_, _| rng.gen_range(-1.5..1.5))).collect(),
            (0..k).map(|_| random_spd(&mut rng, d, 0.5)).collect(),
        )
        .unwrap();
        let r = 2;
        let sys = build_reduced(&m, r).unwrap();
        let comps = m.components();
        for _ in 0..10 {
            let y = DVector::from_fn(k - 1, |_, _| rng.gen_range(0.1..3.0));
            let prec: Vec<DMatrix<f64>> = comps.iter().map(|c| c.covariance().clone().try_inverse().unwrap()).collect();
            let mut mm = prec[r].clone();
            let mut nu = &prec[r] * comps[r].mean();
            for (j, &i) in [0usize, 1].iter().enumerate() {
                mm += &prec[i] * y[j];
                nu += &prec[i] * comps[i].mean() * y[j];
            }
            let det = cofactor_det(&mm);
            let z = rng.gen_range(0.5..1.5) / det;
            let point = adjugate(&mm) * nu * z;
            let e = sys.augmented_residual(&y, z).unwrap();
            assert!((e[0] - (z * det - 1.0)).abs() < 1e-10 * (1.0 + (z * det).abs()));
            for (j, &i) in [0usize, 1].iter().enumerate() {
                let beta = comps[i].weight() / comps[r].weight()
                    * (comps[r].covariance().determinant() / comps[i].covariance().determinant()).sqrt();
                let di = &point - comps[i].mean();
                let dr = &point - comps[r].mean();
                let q = -0.5 * di.dot(&(&prec[i] * &di)) + 0.5 * dr.dot(&(&prec[r] * &dr));
                let want = y[j] - beta * q.exp();
                assert!((e[j + 1] - want).abs() < 1e-9 * (1.0 + want.abs()), "d={d}: {} vs {want}", e[j + 1]);
            }
        }
    }
}

#[test]
fn augmented_system_vanishes_at_solver_roots() {
    let pair = modecount::constructions::bimodal_pair().unwrap();
    let m = product(&pair, &pair).unwrap();
    let sys = build_reduced(&m, 0).unwrap();
    let report = find_critical_points(&m, &SolverConfig::default()).unwrap();
    assert_eq!(report.n_critical, 9);
    for p in &report.points {
        let y = sys.ratios(&p.location_vector());
        assert!(sys.residual_r(&y).unwrap().amax() <= 1e-9);
        let (mm, _) = sys.unnormalized_system(&y);
        let e = sys.augmented_residual(&y, 1.0 / mm.determinant()).unwrap();
        assert!(e.amax() <= 1e-9, "{e}");
    }
}

#[test]
fn homoscedastic_reduction_factorizes_the_density() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let m = random_low_rank_homoscedastic(&mut rng, 4, 2, 4);
    let red = reduce_homoscedastic(&m).unwrap();
    assert_eq!(red.rank, 2);
    let det_b = red.map.whiten.determinant().abs();
    for _ in 0..100 {
        let x = DVector::from_fn(4, |_, _| rng.gen_range(-3.0..3.0));
        let z = red.map.apply(&x);
        let u = z.rows(0, 2).into_owned();
        let v = z.rows(2, 2).into_owned();
        let rebuilt = det_b * red.constant * (-0.5 * v.norm_squared()).exp() * red.reduced.density(&u);
        let direct = m.density(&x);
        assert!((rebuilt / direct - 1.0).abs() < 1e-9, "{rebuilt} vs {direct}");
        assert!((red.map.inverse(&z) - &x).amax() < 1e-12);
    }
    assert!((red.map.inverse_jacobian_det() * det_b - 1.0).abs() < 1e-12);
}

#[test]
fn one_dimensional_density_integrates_to_one() {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    for _ in 0..10 {
        let inst = common::Mix1::random(&mut rng, 3);
        let m = inst.to_mixture();
        // composite Simpson on [-20, 20], where the tails are below 1e-20
        let n = 20_000;
        let (a, b) = (-20.0, 20.0);
        let h = (b - a) / n as f64;
        let f = |x: f64| m.density(&DVector::from_element(1, x));
        let mut s = f(a) + f(b);
        for i in 1..n {
            s += f(a + h * i as f64) * if i % 2 == 1 { 4.0 } else { 2.0 };
        }
        assert!((s * h / 3.0 - 1.0).abs() < 1e-10);
    }
}

#[test]
fn simplex_vertices_span_full_dimension() {
    for k in 3..=7 {
        let v = simplex_vertices(k);
        let n = k - 1;
        let diffs = DMatrix::from_fn(n, n, |i, j| v[i + 1][j] - v[0][j]);
        let gram = &diffs * diffs.transpose();
        assert!(gram.determinant() > 1e-6, "K={k}");
    }
}
