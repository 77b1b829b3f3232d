//! Which candidate minimal polynomials divide χ_ν.
//!
//! A candidate ρ divides χ_ν exactly when ρ mod ν is a product of
//! irreducible factors of χ_ν. Candidate coefficients are bounded by
//! C(d,j)·(2√2)^j, far below ν/2, so each such product of total degree ≤ g
//! lifts to at most one candidate. Enumerating products therefore gives the
//! same answer as trial division by the whole candidate list without
//! building it.

use super::candidates::{has_small_factor, MAX_DEGREE};
use crate::gf::{factor, DensePoly, GfError, PrimeFieldCtx};
use crate::zpoly::{self, ZPoly};
use num_bigint::BigInt;
use rand::Rng;

/// The Eisenstein eigenvalue ℓ + 1 of T_2.
pub const EISENSTEIN_A2: i64 = 3;

/// χ_ν / (t − 3) if t − 3 divides it, else χ_ν unchanged.
pub fn strip_eisenstein(f: &PrimeFieldCtx, chi: &DensePoly<u64>) -> DensePoly<u64> {
    let lin = DensePoly::new(f, vec![f.reduce_i64(-EISENSTEIN_A2), 1]);
    chi.div_exact(f, &lin).unwrap_or_else(|| chi.clone())
}

/// Coefficient bound C(d, j)·(2√2)^j for the coefficient of t^(d−j).
pub fn weil_coeff_bound(d: usize, j: usize) -> i64 {
    let binom = (0..j).fold(1.0, |acc, i| acc * (d - i) as f64 / (i + 1) as f64);
    (binom * 8f64.sqrt().powi(j as i32) + 1e-9).floor() as i64
}

fn symmetric_lift(f: &PrimeFieldCtx, p: &DensePoly<u64>) -> ZPoly {
    p.coeffs.iter().map(|&c| BigInt::from(f.signed(c))).collect()
}

/// Whether a monic integer polynomial is a candidate: coefficients within
/// the Weil box, all roots real in [−2√2, 2√2], irreducible over Q.
pub fn is_candidate(rho: &[BigInt]) -> bool {
    let d = zpoly::degree(rho);
    if d == 0 || d > MAX_DEGREE {
        return false;
    }
    let in_box = (1..=d).all(|j| {
        let b = BigInt::from(weil_coeff_bound(d, j));
        rho[d - j] <= b && rho[d - j] >= -b.clone()
    });
    in_box && zpoly::count_roots_in_sqrt_interval(rho, 8) == d && !has_small_factor(rho)
}

/// Candidates ρ of degree ≤ `gmax` dividing χ_ν, with their exact
/// multiplicity in χ_ν, sorted by (degree, coefficients).
pub fn detect_factors<R: Rng + ?Sized>(
    f: &PrimeFieldCtx,
    chi: &DensePoly<u64>,
    gmax: usize,
    rng: &mut R,
) -> Result<Vec<(ZPoly, usize)>, GfError> {
    let gmax = gmax.min(MAX_DEGREE);
    let irr: Vec<(DensePoly<u64>, usize)> =
        factor(f, chi, rng)?.into_iter().filter(|(g, _)| g.degree().unwrap_or(0) <= gmax).collect();
    let mut found: Vec<(ZPoly, usize)> = Vec::new();
    // products with each irreducible factor used at most its multiplicity
    let mut stack: Vec<(usize, DensePoly<u64>, usize)> = vec![(0, DensePoly::one(f), 0)];
    while let Some((start, prod, deg)) = stack.pop() {
        if deg > 0 {
            let rho = symmetric_lift(f, &prod);
            if is_candidate(&rho) && !found.iter().any(|(g, _)| *g == rho) {
                let mult = multiplicity(f, chi, &prod);
                found.push((rho, mult));
            }
        }
        for (i, (g, m)) in irr.iter().enumerate().skip(start) {
            let gd = g.degree().unwrap_or(0);
            if deg + gd > gmax {
                continue;
            }
            // allow g^k up to its multiplicity by re-entering at i
            let used = count_uses(f, &prod, g);
            if used >= *m {
                continue;
            }
            stack.push((i, prod.mul(f, g), deg + gd));
        }
    }
    found.sort_by(|a, b| a.0.len().cmp(&b.0.len()).then_with(|| a.0.cmp(&b.0)));
    Ok(found)
}

fn count_uses(f: &PrimeFieldCtx, prod: &DensePoly<u64>, g: &DensePoly<u64>) -> usize {
    let mut k = 0;
    let mut p = prod.clone();
    while let Some(q) = p.div_exact(f, g) {
        p = q;
        k += 1;
    }
    k
}

/// Largest k with ρ^k | χ.
pub fn multiplicity(f: &PrimeFieldCtx, chi: &DensePoly<u64>, rho: &DensePoly<u64>) -> usize {
    count_uses(f, chi, rho)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lift::enumerate_candidates;
    use crate::zpoly::{from_i64, reduce};
    use proptest::prelude::{prop_assert_eq, proptest, ProptestConfig};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn fp(f: &PrimeFieldCtx, c: &[i64]) -> DensePoly<u64> {
        DensePoly::new(f, c.iter().map(|&x| f.reduce_i64(x)).collect())
    }

    /// Oracle: trial division by every candidate of degree ≤ g.
    fn by_trial_division(f: &PrimeFieldCtx, chi: &DensePoly<u64>, g: usize) -> Vec<(ZPoly, usize)> {
        let mut out = Vec::new();
        for d in 1..=g {
            for c in enumerate_candidates(d) {
                let m = multiplicity(f, chi, &reduce(f, c));
                if m > 0 {
                    out.push((c.clone(), m));
                }
            }
        }
        out.sort_by(|a, b| a.0.len().cmp(&b.0.len()).then_with(|| a.0.cmp(&b.0)));
        out
    }

    #[test]
    fn level_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let f = PrimeFieldCtx::new(101).unwrap();
        let chi = strip_eisenstein(&f, &fp(&f, &[-3, 1]).mul(&f, &fp(&f, &[2, 1])));
        assert_eq!(detect_factors(&f, &chi, 6, &mut rng).unwrap(), vec![(from_i64(&[2, 1]), 1)]);
        let f = PrimeFieldCtx::new(999_983).unwrap();
        let chi = strip_eisenstein(&f, &fp(&f, &[-1, 1, 1]).mul(&f, &fp(&f, &[-3, 1])));
        assert_eq!(detect_factors(&f, &chi, 6, &mut rng).unwrap(), vec![(from_i64(&[-1, 1, 1]), 1)]);
        // (t - 3)^2 t^2 (t^2 - 9): only t survives
        let chi = fp(&f, &[0, 0, 1]).mul(&f, &fp(&f, &[-9, 0, 1])).mul(&f, &fp(&f, &[9, -6, 1]));
        assert_eq!(detect_factors(&f, &chi, 6, &mut rng).unwrap(), vec![(from_i64(&[0, 1]), 2)]);
        // nothing admissible
        let chi = fp(&f, &[-16, 0, 1]).mul(&f, &fp(&f, &[1, 0, 1]));
        assert!(detect_factors(&f, &chi, 6, &mut rng).unwrap().is_empty());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(40))]
        /// Products of random candidates and random junk agree with trial
        /// division up to degree 4.
        #[test]
        fn agrees_with_trial_division(picks in proptest::collection::vec((1usize..=4, 0usize..10_000, 1usize..3), 1..4),
                                      junk in proptest::collection::vec(-50i64..50, 0..6), seed in 0u64..1000) {
            let f = PrimeFieldCtx::new(999_983).unwrap();
            let mut chi = DensePoly::one(&f);
            for (d, i, m) in picks {
                let list = enumerate_candidates(d);
                let g = reduce(&f, &list[i % list.len()]);
                for _ in 0..m {
                    chi = chi.mul(&f, &g);
                }
            }
            let mut j = junk;
            j.push(1);
            chi = chi.mul(&f, &fp(&f, &j));
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            prop_assert_eq!(detect_factors(&f, &chi, 4, &mut rng).unwrap(), by_trial_division(&f, &chi, 4));
        }
    }
}
