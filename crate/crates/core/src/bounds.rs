//! Closed-form bounds on critical points and modes, in exact integers.
//!
//! Upper families bound the number of nondegenerate critical points of a
//! `k`-component mixture in `R^d` (or in the affine rank `r` for the
//! homoscedastic families); lower families are mode counts known to be
//! attainable. Everything is evaluated with [`BigUint`]; nothing here touches
//! floating point except the 3-digit rendering.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// An exact bound value plus its 3-significant-digit rendering.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct BoundValue {
    pub exact: BigUint,
    pub rendered: String,
}

impl BoundValue {
    pub fn new(exact: BigUint) -> Self {
        let rendered = render_scientific(&exact);
        Self { exact, rendered }
    }

    pub fn from_u64(v: u64) -> Self {
        Self::new(BigUint::from(v))
    }

    pub fn to_u64(&self) -> Option<u64> {
        self.exact.to_u64()
    }
}

impl From<BigUint> for BoundValue {
    fn from(v: BigUint) -> Self {
        Self::new(v)
    }
}

impl fmt::Display for BoundValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.rendered)
    }
}

/// Values below 1000 print exactly; larger ones as `m.mme<exp>` rounded
/// half-up to three significant digits.
pub fn render_scientific(v: &BigUint) -> String {
    let digits = v.to_str_radix(10);
    if digits.len() <= 3 {
        return digits;
    }
    let bytes = digits.as_bytes();
    let mut exponent = digits.len() - 1;
    let mut mantissa: u32 = bytes[..3].iter().fold(0, |acc, b| acc * 10 + u32::from(b - b'0'));
    if bytes[3] >= b'5' {
        mantissa += 1;
    }
    if mantissa == 1000 {
        mantissa = 100;
        exponent += 1;
    }
    format!("{}.{:02}e{}", mantissa / 100, mantissa % 100, exponent)
}

/// `C(n, r)`, zero when `r > n`.
pub fn binomial(n: u64, r: u64) -> BigUint {
    if r > n {
        return BigUint::zero();
    }
    let r = r.min(n - r);
    let mut acc = BigUint::one();
    for i in 0..r {
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}

fn pow2(e: u64) -> BigUint {
    BigUint::one() << e
}

fn pow(base: u64, e: u64) -> BigUint {
    BigUint::from(base).pow(e as u32)
}

fn choose2(n: u64) -> u64 {
    n * n.saturating_sub(1) / 2
}

/// Upper-bound families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum UpperFamily {
    /// Published fewnomial bound `2^{d + C(k,2)} (5 + 3d)^k`.
    Aeh,
    Het,
    Aug,
    Hom,
    AugHom,
    Best,
    BestHom,
    /// Connected components of the critical set.
    Crit,
    CritHom,
}

impl UpperFamily {
    pub const ALL: [UpperFamily; 9] = [
        Self::Aeh,
        Self::Het,
        Self::Aug,
        Self::Hom,
        Self::AugHom,
        Self::Best,
        Self::BestHom,
        Self::Crit,
        Self::CritHom,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::Aeh => "AEH",
            Self::Het => "HET",
            Self::Aug => "AUG",
            Self::Hom => "HOM",
            Self::AugHom => "AUG_HOM",
            Self::Best => "BEST",
            Self::BestHom => "BEST_HOM",
            Self::Crit => "CRIT",
            Self::CritHom => "CRIT_HOM",
        }
    }
}

/// Lower-bound families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum LowerFamily {
    AehL,
    Bin,
    Pp,
    BestL,
}

impl LowerFamily {
    pub const ALL: [LowerFamily; 4] = [Self::AehL, Self::Bin, Self::Pp, Self::BestL];

    pub fn name(self) -> &'static str {
        match self {
            Self::AehL => "AEH_L",
            Self::Bin => "BIN",
            Self::Pp => "PP",
            Self::BestL => "BEST_L",
        }
    }
}

fn normalize_name(s: &str) -> String {
    s.trim().to_ascii_uppercase().replace('-', "_")
}

impl FromStr for UpperFamily {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let n = normalize_name(s);
        Self::ALL
            .into_iter()
            .find(|f| f.name() == n)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown upper-bound family '{s}'")))
    }
}

impl FromStr for LowerFamily {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let n = normalize_name(s);
        Self::ALL
            .into_iter()
            .find(|f| f.name() == n)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown lower-bound family '{s}'")))
    }
}

fn require(cond: bool, msg: impl FnOnce() -> String) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::InvalidParameter(msg()))
    }
}

fn u_aeh(d: u64, k: u64) -> BigUint {
    pow2(d + choose2(k)) * pow(5 + 3 * d, k)
}

fn u_het(d: u64, k: u64) -> BigUint {
    pow2(d + choose2(k - 1)) * pow(d + 2 * d.min(k - 1) + 1, k - 1)
}

fn u_aug(d: u64, k: u64) -> BigUint {
    pow2(choose2(k - 1)) * BigUint::from(d + 1) * pow((2 * k - 1) * d + 2 * k - 1, k - 1)
}

fn u_hom(r: u64, k: u64) -> BigUint {
    pow2(r + choose2(k - 1)) * pow(r + r.min(k - 1) + 1, k - 1)
}

fn u_aug_hom(k: u64) -> BigUint {
    pow2(choose2(k - 1) + 1) * pow(2 * k, k - 1)
}

fn u_crit(d: u64, k: u64) -> BigUint {
    pow2(choose2(k - 1) + 2) * pow(5, d - 1) * pow(6 * d - 2, k - 1)
}

fn u_crit_hom(r: u64, k: u64) -> BigUint {
    pow2(choose2(k - 1) + 2) * pow(4, r - 1) * pow(4 * r - 1, k - 1)
}

/// Exact upper bound of `family` at `(d, k)`.
///
/// The homoscedastic families read `d` as the affine rank `r ≥ 1`;
/// `AugHom` ignores it.
pub fn upper_bound(family: UpperFamily, d: u64, k: u64) -> Result<BoundValue> {
    require(k >= 2, || format!("{}: need k >= 2, got {k}", family.name()))?;
    require(d >= 1, || format!("{}: need d >= 1, got {d}", family.name()))?;
    let v = match family {
        UpperFamily::Aeh => u_aeh(d, k),
        UpperFamily::Het => u_het(d, k),
        UpperFamily::Aug => u_aug(d, k),
        UpperFamily::Hom => u_hom(d, k),
        UpperFamily::AugHom => u_aug_hom(k),
        UpperFamily::Best => u_het(d, k).min(u_aug(d, k)),
        UpperFamily::BestHom => u_hom(d, k).min(u_aug(d, k)).min(u_aug_hom(k)),
        UpperFamily::Crit => u_crit(d, k),
        UpperFamily::CritHom => u_crit_hom(d, k),
    };
    Ok(BoundValue::new(v))
}

/// `⌊(U + 1) / 2⌋`: the mode bound implied by a critical-point bound `U`.
pub fn mode_bound_from_critical(u: &BoundValue) -> BoundValue {
    BoundValue::new((&u.exact + 1u32) / 2u32)
}

fn l_aeh(d: u64, k: u64) -> BigUint {
    binomial(k, d) + k
}

fn l_bin(d: u64, k: u64) -> BigUint {
    let best = (2..=d.min(k)).map(|r| binomial(k, r)).max().unwrap_or_default();
    best + k
}

fn l_pp(d: u64, k: u64) -> BigUint {
    let log2k = 63 - u64::from(k.leading_zeros());
    (1..=d.min(log2k))
        .map(|s| {
            let q = d / s;
            let r = d % s;
            BigUint::from(k - (1u64 << s)) + pow(q + 1, s - r) * pow(q + 2, r)
        })
        .max()
        .expect("k >= 2 admits s = 1")
}

/// Exact lower bound of `family` at `(d, k)`.
pub fn lower_bound(family: LowerFamily, d: u64, k: u64) -> Result<BoundValue> {
    require(k >= 2, || format!("{}: need k >= 2, got {k}", family.name()))?;
    let min_d = if family == LowerFamily::Pp { 1 } else { 2 };
    require(d >= min_d, || format!("{}: need d >= {min_d}, got {d}", family.name()))?;
    let v = match family {
        LowerFamily::AehL => l_aeh(d, k),
        LowerFamily::Bin => l_bin(d, k),
        LowerFamily::Pp => l_pp(d, k),
        LowerFamily::BestL => l_bin(d, k).max(l_pp(d, k)),
    };
    Ok(BoundValue::new(v))
}

/// Conjectured maximum mode count `C(d + k - 1, d)`.
pub fn aim_conjecture(d: u64, k: u64) -> Result<BoundValue> {
    require(d >= 1 && k >= 1, || format!("AIM: need d, k >= 1, got d={d}, k={k}"))?;
    Ok(BoundValue::new(binomial(d + k - 1, d)))
}

/// Which pair of families a crossover search compares.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum CrossoverKind {
    /// First `d ≥ 1` with `U_aug ≤ U_het`.
    AugVsHet,
    /// First `d ≥ 1` with `U_aug ≤ U_AEH`.
    AugVsAeh,
    /// First `d ≥ 2` with `L_pp > L_bin`.
    PpVsBin,
}

impl CrossoverKind {
    pub fn name(self) -> &'static str {
        match self {
            Self::AugVsHet => "AUG_VS_HET",
            Self::AugVsAeh => "AUG_VS_AEH",
            Self::PpVsBin => "PP_VS_BIN",
        }
    }
}

impl FromStr for CrossoverKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let n = normalize_name(s);
        [Self::AugVsHet, Self::AugVsAeh, Self::PpVsBin]
            .into_iter()
            .find(|c| c.name() == n)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown crossover kind '{s}'")))
    }
}

/// Default search horizon for [`crossover_dimension`].
pub const DEFAULT_DMAX: u64 = 200;

/// Smallest dimension in `[start, d_max]` at which the crossover holds.
pub fn crossover_dimension(kind: CrossoverKind, k: u64, d_max: u64) -> Result<Option<u64>> {
    require(k >= 2, || format!("crossover: need k >= 2, got {k}"))?;
    let start = if kind == CrossoverKind::PpVsBin { 2 } else { 1 };
    Ok((start..=d_max).find(|&d| match kind {
        CrossoverKind::AugVsHet => u_aug(d, k) <= u_het(d, k),
        CrossoverKind::AugVsAeh => u_aug(d, k) <= u_aeh(d, k),
        CrossoverKind::PpVsBin => l_pp(d, k) > l_bin(d, k),
    }))
}

/// `(d₀, k₀, M₀)`: a `k₀`-component mixture on `R^{d₀}` with at least `M₀`
/// isolated modes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct SeedTriple {
    pub dim: u32,
    pub comps: u32,
    pub modes: u32,
}

impl SeedTriple {
    pub fn new(dim: u32, comps: u32, modes: u32) -> Result<Self> {
        require(dim >= 1 && comps >= 1 && modes >= 1, || {
            format!("seed triple ({dim}, {comps}, {modes}) must be all positive")
        })?;
        Ok(Self { dim, comps, modes })
    }
}

impl fmt::Display for SeedTriple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.dim, self.comps, self.modes)
    }
}

impl FromStr for SeedTriple {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.trim().trim_matches(|c| c == '(' || c == ')').split(',').collect();
        let bad = || Error::InvalidParameter(format!("seed triple '{s}' must look like dim,comps,modes"));
        if parts.len() != 3 {
            return Err(bad());
        }
        let nums: Vec<u32> = parts
            .iter()
            .map(|p| p.trim().parse::<u32>().map_err(|_| bad()))
            .collect::<Result<_>>()?;
        SeedTriple::new(nums[0], nums[1], nums[2])
    }
}

/// Generators of seed triples.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SeedFamily {
    /// Two-component witnesses `(s, 2, s + 1)`, `s ≥ 1`.
    RayRen,
    /// Regular-simplex witnesses `(K - 1, K, K + 1)`, `K ≥ 3` (homoscedastic).
    Simplex,
    Custom(Vec<SeedTriple>),
}

impl SeedFamily {
    /// Members with `dim ≤ max_dim` and `comps ≤ max_comps`.
    pub fn seeds_within(&self, max_dim: u32, max_comps: u32) -> Vec<SeedTriple> {
        match self {
            SeedFamily::RayRen => {
                if max_comps < 2 {
                    return Vec::new();
                }
                (1..=max_dim).map(|s| SeedTriple { dim: s, comps: 2, modes: s + 1 }).collect()
            }
            SeedFamily::Simplex => (3..=max_comps.min(max_dim.saturating_add(1)))
                .map(|k| SeedTriple { dim: k - 1, comps: k, modes: k + 1 })
                .collect(),
            SeedFamily::Custom(list) => list
                .iter()
                .filter(|s| s.dim <= max_dim && s.comps <= max_comps)
                .copied()
                .collect(),
        }
    }
}

/// A composition plan: product of `seeds`, lifted to `lift_to` dimensions,
/// then padded with `pad` remote components.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeedRecipe {
    pub seeds: Vec<SeedTriple>,
    pub lift_to: u32,
    pub pad: u32,
    /// Claimed mode count `pad + Π M_j`.
    pub value: u64,
}

impl SeedRecipe {
    pub fn product_comps(&self) -> u64 {
        self.seeds.iter().map(|s| u64::from(s.comps)).product()
    }

    pub fn product_modes(&self) -> u64 {
        self.seeds.iter().map(|s| u64::from(s.modes)).product()
    }

    pub fn total_dim(&self) -> u64 {
        self.seeds.iter().map(|s| u64::from(s.dim)).sum()
    }

    /// Total component count `Π k_j + pad`.
    pub fn components(&self) -> u64 {
        self.product_comps() + u64::from(self.pad)
    }

    /// Checks the recipe invariants against a component budget `k`.
    pub fn is_admissible(&self, k: u64) -> bool {
        self.total_dim() <= u64::from(self.lift_to)
            && self.components() == k
            && self.value == u64::from(self.pad) + self.product_modes()
    }
}

/// Best `Π M_j` over nondecreasing seed lists (indices `≥ start`) with
/// `Σ d_j ≤ dim` and `Π k_j = comps` exactly.
struct Closure<'a> {
    seeds: &'a [SeedTriple],
    memo: HashMap<(u32, u64, usize), Option<(BigUint, Vec<usize>)>>,
}

impl Closure<'_> {
    fn best(&mut self, dim: u32, comps: u64, start: usize) -> Option<(BigUint, Vec<usize>)> {
        if let Some(hit) = self.memo.get(&(dim, comps, start)) {
            return hit.clone();
        }
        let mut best: Option<(BigUint, Vec<usize>)> = if comps == 1 {
            Some((BigUint::one(), Vec::new()))
        } else {
            None
        };
        for j in start..self.seeds.len() {
            let s = self.seeds[j];
            let kj = u64::from(s.comps);
            if s.dim > dim || !comps.is_multiple_of(kj) {
                continue;
            }
            if let Some((v, mut list)) = self.best(dim - s.dim, comps / kj, j) {
                let v = v * s.modes;
                if best.as_ref().is_none_or(|(b, _)| v > *b) {
                    list.insert(0, j);
                    best = Some((v, list));
                }
            }
        }
        self.memo.insert((dim, comps, start), best.clone());
        best
    }
}

/// Maximizes `k - K + Π M_j` over admissible seed lists drawn from
/// `families`, returning the value and an optimal recipe.
///
/// Ties prefer the larger seed product `K` (less padding); seeds are kept in
/// sorted order so the recipe is deterministic.
pub fn seed_closure_bound(d: u64, k: u64, families: &[SeedFamily]) -> Result<(BoundValue, SeedRecipe)> {
    require(d >= 1 && k >= 2, || format!("seed closure: need d >= 1, k >= 2, got d={d}, k={k}"))?;
    let max_dim = u32::try_from(d).map_err(|_| Error::InvalidParameter("d too large".into()))?;
    let max_comps = u32::try_from(k).map_err(|_| Error::InvalidParameter("k too large".into()))?;
    let mut seeds: Vec<SeedTriple> = families
        .iter()
        .flat_map(|f| f.seeds_within(max_dim, max_comps))
        .collect();
    seeds.sort();
    seeds.dedup();
    let mut closure = Closure {
        seeds: &seeds,
        memo: HashMap::new(),
    };
    let mut best: Option<(BigUint, u64, Vec<usize>)> = None;
    for big_k in 1..=k {
        if let Some((modes, list)) = closure.best(max_dim, big_k, 0) {
            let value = modes + (k - big_k);
            if best.as_ref().is_none_or(|(b, _, _)| value >= *b) {
                best = Some((value, big_k, list));
            }
        }
    }
    let (value, big_k, list) = best.expect("the empty list is always admissible");
    let recipe = SeedRecipe {
        seeds: list.iter().map(|&i| seeds[i]).collect(),
        lift_to: max_dim,
        pad: (k - big_k) as u32,
        value: value
            .to_u64()
            .ok_or_else(|| Error::InvalidParameter("seed-closure value exceeds u64".into()))?,
    };
    Ok((BoundValue::new(value), recipe))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn up(f: UpperFamily, d: u64, k: u64) -> u64 {
        upper_bound(f, d, k).unwrap().to_u64().unwrap()
    }

    fn low(f: LowerFamily, d: u64, k: u64) -> u64 {
        lower_bound(f, d, k).unwrap().to_u64().unwrap()
    }

    #[test]
    fn upper_examples() {
        assert_eq!(up(UpperFamily::Het, 2, 2), 20);
        assert_eq!(up(UpperFamily::Aug, 2, 2), 27);
        assert_eq!(up(UpperFamily::Aug, 2, 3), 1350);
        assert_eq!(up(UpperFamily::Aeh, 2, 2), 968);
        assert_eq!(up(UpperFamily::AugHom, 1, 4), 8192);
        assert_eq!(up(UpperFamily::Het, 3, 3), 1024);
        assert_eq!(up(UpperFamily::Het, 10, 4), 40247296);
        assert_eq!(up(UpperFamily::Aug, 10, 4), 40174904);
        assert_eq!(up(UpperFamily::Best, 10, 4), 40174904);
    }

    #[test]
    fn homoscedastic_upper_examples() {
        assert_eq!(up(UpperFamily::Hom, 2, 3), 200);
        assert_eq!(up(UpperFamily::AugHom, 7, 3), 144);
        assert_eq!(up(UpperFamily::BestHom, 2, 3), 144);
        assert_eq!(up(UpperFamily::BestHom, 1, 2), 6);
    }

    #[test]
    fn component_bounds() {
        // 2^{0+2} 5^0 4^1 and 2^{0+2} 4^0 3^1
        assert_eq!(up(UpperFamily::Crit, 1, 2), 16);
        assert_eq!(up(UpperFamily::CritHom, 1, 2), 12);
        // 2^{1+2} 5 10^2
        assert_eq!(up(UpperFamily::Crit, 2, 3), 4000);
    }

    #[test]
    fn upper_rejects_bad_ranges() {
        assert!(upper_bound(UpperFamily::Het, 2, 1).is_err());
        assert!(upper_bound(UpperFamily::Het, 0, 3).is_err());
    }

    #[test]
    fn mode_bound_examples() {
        for (u, m) in [(20u64, 10u64), (1, 1), (27, 14), (0, 0)] {
            assert_eq!(mode_bound_from_critical(&BoundValue::from_u64(u)).to_u64(), Some(m));
        }
    }

    #[test]
    fn lower_examples() {
        assert_eq!(low(LowerFamily::Bin, 2, 3), 6);
        assert_eq!(low(LowerFamily::Pp, 10, 4), 36);
        assert_eq!(low(LowerFamily::Pp, 4, 4), 9);
        assert_eq!(low(LowerFamily::BestL, 5, 5), 15);
        assert_eq!(low(LowerFamily::AehL, 3, 3), 4);
        assert_eq!(low(LowerFamily::AehL, 10, 4), 4);
        assert_eq!(low(LowerFamily::Pp, 1, 2), 2);
        assert!(lower_bound(LowerFamily::Bin, 1, 3).is_err());
        assert!(lower_bound(LowerFamily::Pp, 1, 1).is_err());
    }

    #[test]
    fn aim_examples() {
        assert_eq!(aim_conjecture(3, 3).unwrap().to_u64(), Some(10));
        assert_eq!(aim_conjecture(7, 1).unwrap().to_u64(), Some(1));
        assert_eq!(aim_conjecture(10, 5).unwrap().to_u64(), Some(1001));
    }

    #[test]
    fn crossover_examples() {
        assert_eq!(crossover_dimension(CrossoverKind::AugVsHet, 5, 200).unwrap(), Some(15));
        assert_eq!(crossover_dimension(CrossoverKind::AugVsAeh, 8, 200).unwrap(), Some(7));
        assert_eq!(crossover_dimension(CrossoverKind::PpVsBin, 4, 200).unwrap(), Some(5));
        assert_eq!(crossover_dimension(CrossoverKind::AugVsHet, 5, 14).unwrap(), None);
    }

    #[test]
    fn rendering() {
        let r = |v: u64| render_scientific(&BigUint::from(v));
        assert_eq!(r(968), "968");
        assert_eq!(r(1350), "1.35e3");
        assert_eq!(r(40174904), "4.02e7");
        assert_eq!(r(64000), "6.40e4");
        assert_eq!(r(9995), "1.00e4");
        assert_eq!(r(1000), "1.00e3");
        assert_eq!(r(0), "0");
    }

    #[test]
    fn binomial_convention() {
        assert_eq!(binomial(3, 5), BigUint::zero());
        assert_eq!(binomial(10, 5), BigUint::from(252u32));
        assert_eq!(binomial(0, 0), BigUint::one());
    }

    #[test]
    fn seed_closure_examples() {
        let (v, recipe) = seed_closure_bound(10, 4, &[SeedFamily::RayRen]).unwrap();
        assert_eq!(v.to_u64(), Some(36));
        assert_eq!(recipe.seeds, vec![SeedTriple::new(5, 2, 6).unwrap(); 2]);
        assert_eq!(recipe.pad, 0);
        assert!(recipe.is_admissible(4));

        let (v, recipe) = seed_closure_bound(1, 2, &[SeedFamily::RayRen]).unwrap();
        assert_eq!(v.to_u64(), Some(2));
        assert_eq!(recipe.seeds, vec![SeedTriple::new(1, 2, 2).unwrap()]);

        let (v, recipe) = seed_closure_bound(4, 5, &[SeedFamily::Simplex]).unwrap();
        assert_eq!(v.to_u64(), Some(6));
        assert_eq!(recipe.seeds, vec![SeedTriple::new(4, 5, 6).unwrap()]);
        assert_eq!(recipe.pad, 0);
    }

    #[test]
    fn seed_closure_empty_family_pads() {
        let (v, recipe) = seed_closure_bound(3, 5, &[]).unwrap();
        assert_eq!(v.to_u64(), Some(5));
        assert!(recipe.seeds.is_empty());
        assert_eq!(recipe.pad, 4);
        assert!(recipe.is_admissible(5));
    }

    #[test]
    fn parses_names() {
        assert_eq!("aug-hom".parse::<UpperFamily>().unwrap(), UpperFamily::AugHom);
        assert_eq!("best_l".parse::<LowerFamily>().unwrap(), LowerFamily::BestL);
        assert_eq!("pp-vs-bin".parse::<CrossoverKind>().unwrap(), CrossoverKind::PpVsBin);
        assert_eq!("1,2,2".parse::<SeedTriple>().unwrap(), SeedTriple::new(1, 2, 2).unwrap());
        assert!("1,2".parse::<SeedTriple>().is_err());
    }
}
