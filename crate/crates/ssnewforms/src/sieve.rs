//! Degrees of the irreducible factors of χ_Z above g_max.
//!
//! A degree d is ruled out once some χ_ν has no factor of degree d, or once
//! every lift of every degree-d factor (combined across ν by CRT) breaks the
//! Weil bound on its top coefficients.

use crate::gf::{factor, is_irreducible, DensePoly, GfError, PrimeFieldCtx};
use crate::lift::detect::weil_coeff_bound;
use crate::zpoly::{self, ZPoly};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed};
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SieveError {
    /// Recoverable: skip this ν.
    #[error("ν = {nu}: {count} irreducible factors exceeds the cap")]
    TooManyFactors { nu: u64, count: usize },
    /// Recoverable: equal-degree splitting stalled.
    #[error("ν = {nu}: factorization abandoned ({source})")]
    Abandoned { nu: u64, source: GfError },
    #[error("ν = {nu}: known factor {factor} does not divide χ_ν")]
    KnownFactor { nu: u64, factor: String },
    #[error("ν = {nu}: factor failed the irreducibility test")]
    NotIrreducible { nu: u64 },
}

impl SieveError {
    pub fn is_recoverable(&self) -> bool {
        matches!(self, SieveError::TooManyFactors { .. } | SieveError::Abandoned { .. })
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SieveConfig {
    pub eta: usize,
    /// A ν whose reduced χ_ν has more irreducible factors is skipped.
    pub max_factors: usize,
    /// Coefficient indices j with a Weil test on θ_j.
    pub theta_js: Vec<usize>,
    /// CRT combinations kept per degree before a ν is left out for it.
    pub max_candidates: usize,
}

impl Default for SieveConfig {
    fn default() -> Self {
        Self { eta: 5, max_factors: 120, theta_js: vec![1, 2], max_candidates: 10_000 }
    }
}

/// Irreducible factors of χ_ν with the known factors divided out, by
/// descending degree (ties by coefficients), repeated by multiplicity.
#[derive(Clone, Debug)]
pub struct FactorizationModNu {
    pub field: PrimeFieldCtx,
    pub factors: Vec<DensePoly<u64>>,
    /// P_k = Σ_{κ ≥ k} deg h_κ, with a trailing 0.
    pub partial_sums: Vec<usize>,
}

impl FactorizationModNu {
    pub fn nu(&self) -> u64 {
        self.field.modulus()
    }

    pub fn degrees(&self) -> Vec<usize> {
        self.factors.iter().map(|h| h.degree().unwrap_or(0)).collect()
    }

    fn from_factors(field: PrimeFieldCtx, mut factors: Vec<DensePoly<u64>>) -> Self {
        factors.sort_by(|a, b| b.degree().cmp(&a.degree()).then_with(|| a.coeffs.cmp(&b.coeffs)));
        let mut partial_sums = vec![0; factors.len() + 1];
        for k in (0..factors.len()).rev() {
            partial_sums[k] = partial_sums[k + 1] + factors[k].degree().unwrap_or(0);
        }
        Self { field, factors, partial_sums }
    }
}

/// Factor χ_ν after dividing out `known` (each entry repeated by its
/// multiplicity).
pub fn factor_mod_nu<R: Rng + ?Sized>(
    f: &PrimeFieldCtx,
    chi: &DensePoly<u64>,
    known: &[ZPoly],
    cfg: &SieveConfig,
    rng: &mut R,
) -> Result<FactorizationModNu, SieveError> {
    let nu = f.modulus();
    let mut rest = chi.monic(f);
    for k in known {
        rest = rest
            .div_exact(f, &zpoly::reduce(f, k))
            .ok_or_else(|| SieveError::KnownFactor { nu, factor: zpoly::to_string(k) })?;
    }
    let parts = factor(f, &rest, rng).map_err(|source| SieveError::Abandoned { nu, source })?;
    let count: usize = parts.iter().map(|(_, m)| m).sum();
    if count > cfg.max_factors {
        return Err(SieveError::TooManyFactors { nu, count });
    }
    let mut factors = Vec::with_capacity(count);
    for (h, m) in parts {
        if !is_irreducible(f, &h) {
            return Err(SieveError::NotIrreducible { nu });
        }
        factors.extend(std::iter::repeat(h).take(m));
    }
    Ok(FactorizationModNu::from_factors(*f, factors))
}

/// Value of Δ(d): every index-set with product degree d, or `Null` once
/// there are more than η of them.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Ways {
    Sets(Vec<Vec<usize>>),
    Null,
}

/// The capped subset-sum table Δ over the factors of one χ_ν.
///
/// The window is taken against all of E rather than only the unreached part,
/// so that Δ(d) stays complete for every d ∈ E that is already reachable.
pub fn subset_sum_degrees(fac: &FactorizationModNu, e: &BTreeSet<usize>, eta: usize) -> BTreeMap<usize, Ways> {
    let mut delta: BTreeMap<usize, Ways> = BTreeMap::from([(0, Ways::Sets(vec![Vec::new()]))]);
    let (Some(&emin), Some(&emax)) = (e.first(), e.last()) else {
        return delta;
    };
    for (k, h) in fac.factors.iter().enumerate() {
        let dk = h.degree().unwrap_or(0);
        let lo = emin.saturating_sub(fac.partial_sums[k]);
        let Some(hi) = emax.checked_sub(dk) else {
            continue;
        };
        if lo > hi {
            continue;
        }
        // descending, so nothing written at this k is read again at this k
        let sources: Vec<usize> = delta.range(lo..=hi).map(|(&d, _)| d).rev().collect();
        for d in sources {
            let add = match &delta[&d] {
                Ways::Null => Ways::Null,
                Ways::Sets(sets) => Ways::Sets(
                    sets.iter()
                        .filter(|s| !s.contains(&k))
                        .map(|s| {
                            let mut t = s.clone();
                            t.push(k);
                            t
                        })
                        .collect(),
                ),
            };
            let merged = match (delta.remove(&(d + dk)), add) {
                (None, a) => a,
                (Some(Ways::Null), _) | (_, Ways::Null) => Ways::Null,
                (Some(Ways::Sets(mut a)), Ways::Sets(b)) => {
                    a.extend(b);
                    Ways::Sets(a)
                }
            };
            let merged = match merged {
                Ways::Sets(s) if s.len() > eta => Ways::Null,
                m => m,
            };
            delta.insert(d + dk, merged);
        }
    }
    delta
}

/// A possible degree-d factor of χ_Z known modulo m.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CandidateFactor {
    pub modulus: BigInt,
    /// θ_1..θ_d of t^d + θ_1 t^(d−1) + ... + θ_d, reduced into [0, m).
    pub theta: Vec<BigInt>,
    pub degree: usize,
}

impl CandidateFactor {
    fn from_poly(f: &PrimeFieldCtx, h: &DensePoly<u64>) -> Self {
        let d = h.degree().expect("nonzero");
        let theta = (1..=d).map(|j| BigInt::from(h.coeffs[d - j])).collect();
        Self { modulus: BigInt::from(f.modulus()), theta, degree: d }
    }

    /// CRT with another candidate of the same degree and coprime modulus.
    fn combine(&self, other: &Self) -> Self {
        let (m1, m2) = (&self.modulus, &other.modulus);
        let g = m1.extended_gcd(m2);
        debug_assert!(g.gcd.abs().is_one());
        let m = m1 * m2;
        let theta = self
            .theta
            .iter()
            .zip(&other.theta)
            .map(|(a, b)| (a + m1 * ((b - a) * &g.x).mod_floor(m2)).mod_floor(&m))
            .collect();
        Self { modulus: m, theta, degree: self.degree }
    }

    /// Whether θ_j has an integer lift with |θ_j| ≤ C(d,j)(2√2)^j.
    pub fn admits_lift(&self, j: usize) -> bool {
        let r = self.theta[j - 1].mod_floor(&self.modulus);
        let least = r.clone().min(&self.modulus - &r);
        least <= BigInt::from(weil_coeff_bound(self.degree, j))
    }

    pub fn passes(&self, theta_js: &[usize]) -> bool {
        theta_js.iter().filter(|&&j| j <= self.degree).all(|&j| self.admits_lift(j))
    }
}

/// Combine existing candidates with the degree-d products of a new ν and
/// keep those passing the Weil test. `existing = None` starts afresh.
pub fn weil_crt_eliminate(
    existing: Option<&[CandidateFactor]>,
    f: &PrimeFieldCtx,
    products: &[DensePoly<u64>],
    theta_js: &[usize],
) -> Vec<CandidateFactor> {
    let fresh: Vec<CandidateFactor> = products.iter().map(|h| CandidateFactor::from_poly(f, h)).collect();
    let combined: Vec<CandidateFactor> = match existing {
        None => fresh,
        Some(old) => old.iter().flat_map(|c| fresh.iter().map(move |n| c.combine(n))).collect(),
    };
    combined.into_iter().filter(|c| c.passes(theta_js)).collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EliminationReason {
    /// χ_ν has no factor of this degree.
    NoSubsetSum,
    /// Every CRT candidate breaks the Weil bound.
    WeilBound,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Elimination {
    pub degree: usize,
    pub nu: u64,
    pub reason: EliminationReason,
}

/// Bookkeeping across ν for one Atkin–Lehner block.
#[derive(Clone, Debug)]
pub struct SieveState {
    pub cfg: SieveConfig,
    /// Degree of the part of χ_Z left after removing known factors.
    pub remainder_degree: usize,
    pub lower: usize,
    pub e: BTreeSet<usize>,
    pub candidates: BTreeMap<usize, Vec<CandidateFactor>>,
    pub eliminated: Vec<Elimination>,
    pub nus_used: Vec<u64>,
    pub nus_skipped: Vec<(u64, String)>,
}

impl SieveState {
    /// E = [gmax + 1, ⌊remainder/2⌋].
    pub fn new(remainder_degree: usize, gmax: usize, cfg: SieveConfig) -> Self {
        let lower = gmax + 1;
        let e = (lower..=remainder_degree / 2).collect();
        Self {
            cfg,
            remainder_degree,
            lower,
            e,
            candidates: BTreeMap::new(),
            eliminated: Vec::new(),
            nus_used: Vec::new(),
            nus_skipped: Vec::new(),
        }
    }

    pub fn is_done(&self) -> bool {
        self.e.is_empty()
    }

    /// One sieve round; returns the degrees eliminated by it.
    pub fn absorb(&mut self, fac: &FactorizationModNu) -> Vec<usize> {
        let f = &fac.field;
        let nu = fac.nu();
        self.nus_used.push(nu);
        let delta = subset_sum_degrees(fac, &self.e, self.cfg.eta);
        let mut gone = Vec::new();
        for d in self.e.clone() {
            let reason = match delta.get(&d) {
                None => Some(EliminationReason::NoSubsetSum),
                Some(Ways::Null) => None,
                Some(Ways::Sets(sets)) => {
                    let old = self.candidates.get(&d).map(Vec::as_slice);
                    if old.map_or(0, <[_]>::len) * sets.len() > self.cfg.max_candidates {
                        None
                    } else {
                        let products: Vec<DensePoly<u64>> = sets
                            .iter()
                            .map(|s| s.iter().fold(DensePoly::one(f), |acc, &k| acc.mul(f, &fac.factors[k])))
                            .collect();
                        let kept = weil_crt_eliminate(old, f, &products, &self.cfg.theta_js);
                        let empty = kept.is_empty();
                        self.candidates.insert(d, kept);
                        empty.then_some(EliminationReason::WeilBound)
                    }
                }
            };
            if let Some(reason) = reason {
                self.e.remove(&d);
                self.candidates.remove(&d);
                self.eliminated.push(Elimination { degree: d, nu, reason });
                gone.push(d);
            }
        }
        gone
    }

    pub fn report(&self, budget_hit: bool) -> DegreeReport {
        DegreeReport {
            remainder_degree: self.remainder_degree,
            range: (self.lower, self.remainder_degree / 2),
            eliminated: self.eliminated.clone(),
            surviving: self.e.iter().copied().collect(),
            surviving_candidates: self
                .candidates
                .iter()
                .filter(|(d, _)| self.e.contains(d))
                .map(|(&d, c)| (d, c.len()))
                .collect(),
            nus_used: self.nus_used.clone(),
            nus_skipped: self.nus_skipped.clone(),
            undetermined: budget_hit && !self.e.is_empty(),
            irreducible_remainder: (self.e.is_empty() && self.remainder_degree > 0).then_some(self.remainder_degree),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DegreeReport {
    pub remainder_degree: usize,
    /// The degree window [lo, hi] that was sieved.
    pub range: (usize, usize),
    pub eliminated: Vec<Elimination>,
    pub surviving: Vec<usize>,
    /// Degree → CRT candidates still alive.
    pub surviving_candidates: BTreeMap<usize, usize>,
    pub nus_used: Vec<u64>,
    pub nus_skipped: Vec<(u64, String)>,
    /// The ν budget ran out with degrees left.
    pub undetermined: bool,
    /// Set when no degree survives: the remainder is one irreducible factor.
    pub irreducible_remainder: Option<usize>,
}

/// Run the sieve over a stream of factorizations until E is empty or
/// `budget` ν have been tried. The stream yields `None` when it runs dry.
pub fn certify_degrees(
    mut state: SieveState,
    mut next: impl FnMut() -> Option<Result<FactorizationModNu, SieveError>>,
    budget: usize,
) -> Result<DegreeReport, SieveError> {
    let mut tried = 0;
    while !state.is_done() && tried < budget {
        let Some(item) = next() else {
            break;
        };
        tried += 1;
        match item {
            Ok(fac) => {
                state.absorb(&fac);
            }
            Err(e) if e.is_recoverable() => {
                let nu = match &e {
                    SieveError::TooManyFactors { nu, .. } | SieveError::Abandoned { nu, .. } => *nu,
                    _ => 0,
                };
                state.nus_skipped.push((nu, e.to_string()));
            }
            Err(e) => return Err(e),
        }
    }
    Ok(state.report(!state.is_done()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::nu_primes;
    use proptest::prelude::{prop_assert, prop_assert_eq, proptest, ProptestConfig};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    /// Placeholder factors of the given degrees; the DP only reads degrees.
    fn with_degrees(degs: &[usize]) -> FactorizationModNu {
        let f = PrimeFieldCtx::new(101).unwrap();
        let factors = degs
            .iter()
            .enumerate()
            .map(|(i, &d)| {
                let mut c = vec![i as u64 + 1; d + 1];
                c[d] = 1;
                DensePoly::new(&f, c)
            })
            .collect();
        FactorizationModNu::from_factors(f, factors)
    }

    fn brute(degs: &[usize]) -> BTreeMap<usize, Vec<Vec<usize>>> {
        let mut out: BTreeMap<usize, Vec<Vec<usize>>> = BTreeMap::new();
        for mask in 0u32..(1 << degs.len()) {
            let s: Vec<usize> = (0..degs.len()).filter(|&i| mask >> i & 1 == 1).collect();
            out.entry(s.iter().map(|&i| degs[i]).sum()).or_default().push(s);
        }
        out
    }

    fn reached(delta: &BTreeMap<usize, Ways>, e: &BTreeSet<usize>) -> Vec<usize> {
        e.iter().copied().filter(|d| delta.contains_key(d)).collect()
    }

    #[test]
    fn small_examples() {
        let e: BTreeSet<usize> = (1..=10).collect();
        let fac = with_degrees(&[2, 3, 5]);
        assert_eq!(fac.partial_sums, vec![10, 5, 2, 0]);
        assert_eq!(reached(&subset_sum_degrees(&fac, &e, 5), &e), vec![2, 3, 5, 7, 8, 10]);
        let delta = subset_sum_degrees(&with_degrees(&[]), &e, 5);
        assert_eq!(delta.keys().copied().collect::<Vec<_>>(), vec![0]);
        let fac = with_degrees(&[2, 2, 3]);
        let delta = subset_sum_degrees(&fac, &BTreeSet::from([5]), 5);
        // sorted order is [3, 2, 2]
        assert_eq!(delta[&5], Ways::Sets(vec![vec![0, 1], vec![0, 2]]));
    }

    #[test]
    fn eta_cap() {
        let fac = with_degrees(&[1; 8]);
        let delta = subset_sum_degrees(&fac, &BTreeSet::from([1, 7, 8]), 5);
        assert_eq!(delta[&1], Ways::Null);
        assert_eq!(delta[&7], Ways::Null);
        assert_eq!(delta[&8], Ways::Sets(vec![(0..8).collect()]));
        let delta = subset_sum_degrees(&with_degrees(&[1; 5]), &BTreeSet::from([1]), 5);
        assert!(matches!(&delta[&1], Ways::Sets(s) if s.len() == 5));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]
        #[test]
        fn dp_matches_enumeration(degs in proptest::collection::vec(1usize..8, 0..14),
                                  lo in 1usize..20, width in 0usize..20, eta in 1usize..7) {
            let fac = with_degrees(&degs);
            let sorted = fac.degrees();
            let e: BTreeSet<usize> = (lo..=lo + width).collect();
            let delta = subset_sum_degrees(&fac, &e, eta);
            let all = brute(&sorted);
            for &d in &e {
                match (delta.get(&d), all.get(&d)) {
                    (None, None) => {}
                    (Some(Ways::Sets(s)), Some(b)) => {
                        let mut s = s.clone();
                        s.iter_mut().for_each(|x| x.sort_unstable());
                        s.sort();
                        let mut b = b.clone();
                        b.sort();
                        prop_assert_eq!(s, b);
                    }
                    (Some(Ways::Null), Some(b)) => prop_assert!(b.len() > eta),
                    (got, want) => prop_assert!(false, "d={} got {:?} want {:?}", d, got, want),
                }
            }
        }
    }

    #[test]
    fn weil_lifts() {
        assert_eq!(weil_coeff_bound(7, 1), 19);
        assert_eq!(weil_coeff_bound(7, 2), 168);
        let c = |t1: i64, m: i64| CandidateFactor {
            modulus: BigInt::from(m),
            theta: vec![BigInt::from(t1), BigInt::from(0)],
            degree: 7,
        };
        assert!(!c(25, 53).admits_lift(1));
        assert!(c(0, 53).admits_lift(1));
        assert!(c(19, 53).admits_lift(1));
        assert!(c(34, 53).admits_lift(1)); // −19
        assert!(!c(20, 53).passes(&[1, 2]));
    }

    #[test]
    fn crt_recovers_integers() {
        let f1 = PrimeFieldCtx::new(101).unwrap();
        let f2 = PrimeFieldCtx::new(103).unwrap();
        // t² − 7t − 30 over Z
        let poly = |f: &PrimeFieldCtx| DensePoly::new(f, vec![f.reduce_i64(-30), f.reduce_i64(-7), 1]);
        let first = weil_crt_eliminate(None, &f1, &[poly(&f1)], &[]);
        let both = weil_crt_eliminate(Some(&first), &f2, &[poly(&f2)], &[]);
        assert_eq!(both[0].modulus, BigInt::from(101 * 103));
        let m = BigInt::from(101 * 103);
        assert_eq!(both[0].theta, vec![BigInt::from(-7).mod_floor(&m), BigInt::from(-30).mod_floor(&m)]);
        // |θ_1| = 7 exceeds ⌊2·2√2⌋ = 5
        assert!(weil_crt_eliminate(Some(&first), &f2, &[poly(&f2)], &[1]).is_empty());
    }

    #[test]
    fn factor_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let f = PrimeFieldCtx::new(11).unwrap();
        let chi = DensePoly::new(&f, vec![10, 1, 1]).mul(&f, &DensePoly::new(&f, vec![6, 1]));
        let fac = factor_mod_nu(&f, &chi, &[], &SieveConfig::default(), &mut rng).unwrap();
        let mut got: Vec<Vec<u64>> = fac.factors.iter().map(|h| h.coeffs.clone()).collect();
        got.sort();
        assert_eq!(got, vec![vec![4, 1], vec![6, 1], vec![8, 1]]);
        // known factors are divided out first
        let known = vec![crate::zpoly::from_i64(&[-1, 1, 1])];
        let fac = factor_mod_nu(&f, &chi, &known, &SieveConfig::default(), &mut rng).unwrap();
        assert_eq!(fac.factors.len(), 1);
        let cfg = SieveConfig { max_factors: 2, ..SieveConfig::default() };
        assert!(matches!(factor_mod_nu(&f, &chi, &[], &cfg, &mut rng), Err(SieveError::TooManyFactors { count: 3, .. })));
    }

    #[test]
    fn factor_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let f = PrimeFieldCtx::new(1009).unwrap();
        let mut chosen = Vec::new();
        while chosen.len() < 5 {
            let d = rng.gen_range(1..6);
            let mut c: Vec<u64> = (0..d).map(|_| rng.gen_range(0..1009)).collect();
            c.push(1);
            let h = DensePoly::new(&f, c);
            if is_irreducible(&f, &h) {
                chosen.push(h);
            }
        }
        let chi = chosen.iter().fold(DensePoly::one(&f), |acc, h| acc.mul(&f, h));
        let fac = factor_mod_nu(&f, &chi, &[], &SieveConfig::default(), &mut rng).unwrap();
        let mut got: Vec<_> = fac.factors.iter().map(|h| h.coeffs.clone()).collect();
        let mut want: Vec<_> = chosen.iter().map(|h| h.coeffs.clone()).collect();
        got.sort();
        want.sort();
        assert_eq!(got, want);
    }

    /// Minimal polynomial of 2cos(2π/n), degree φ(n)/2, from its roots.
    fn real_cyclotomic(n: u64) -> ZPoly {
        let mut c = vec![1.0f64];
        for k in (1..n).filter(|&k| 2 * k < n && num_integer::gcd(k, n) == 1) {
            let r = 2.0 * (2.0 * std::f64::consts::PI * k as f64 / n as f64).cos();
            let mut next = vec![0.0; c.len() + 1];
            for (i, &x) in c.iter().enumerate() {
                next[i + 1] += x;
                next[i] -= r * x;
            }
            c = next;
        }
        c.iter().map(|x| BigInt::from(x.round() as i64)).collect()
    }

    fn stream(chi: &ZPoly, nus: &[u64], seed: u64) -> impl FnMut() -> Option<Result<FactorizationModNu, SieveError>> {
        let chi = chi.clone();
        let mut it = nus.to_vec().into_iter();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        move || {
            let nu = it.next()?;
            let f = PrimeFieldCtx::new(nu).unwrap();
            Some(factor_mod_nu(&f, &crate::zpoly::reduce(&f, &chi), &[], &SieveConfig::default(), &mut rng))
        }
    }

    #[test]
    fn synthetic_certification() {
        let (h8, h9, h10) = (real_cyclotomic(17), real_cyclotomic(19), real_cyclotomic(25));
        assert_eq!([8, 9, 10], [&h8, &h9, &h10].map(|h| crate::zpoly::degree(h)));
        let chi = crate::zpoly::mul(&crate::zpoly::mul(&h8, &h9), &h10);
        let state = SieveState::new(27, 6, SieveConfig::default());
        assert_eq!(state.e, (7..=13).collect());
        let rep = certify_degrees(state, stream(&chi, &nu_primes()[..5], 5), 5).unwrap();
        let mut gone: Vec<usize> = rep.eliminated.iter().map(|e| e.degree).collect();
        gone.sort_unstable();
        assert_eq!(gone, vec![7, 11, 12, 13]);
        assert_eq!(rep.surviving, vec![8, 9, 10]);
        assert!(rep.undetermined);
        assert_eq!(rep.irreducible_remainder, None);

        // two degree-10 factors: 10 survives with several products
        let h10b = real_cyclotomic(33);
        let chi = crate::zpoly::mul(&h10, &h10b);
        let mut state = SieveState::new(20, 6, SieveConfig::default());
        let mut next = stream(&chi, &nu_primes()[..3], 6);
        while let Some(fac) = next() {
            state.absorb(&fac.unwrap());
        }
        assert_eq!(state.e, BTreeSet::from([10]));
        assert!(state.candidates[&10].len() >= 2);

        // an irreducible remainder is certified
        let chi = real_cyclotomic(41); // degree 20
        let rep = certify_degrees(SieveState::new(20, 6, SieveConfig::default()), stream(&chi, &nu_primes()[..8], 7), 8)
            .unwrap();
        assert_eq!(rep.surviving, Vec::<usize>::new());
        assert_eq!(rep.irreducible_remainder, Some(20));
        assert!(!rep.undetermined);
    }

    #[test]
    fn empty_window() {
        let rep = certify_degrees(SieveState::new(1, 6, SieveConfig::default()), || None, 3).unwrap();
        assert!(rep.eliminated.is_empty() && !rep.undetermined);
        assert_eq!(rep.irreducible_remainder, Some(1));
    }
}
