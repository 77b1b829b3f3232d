//! Acceptance suite: nine criteria, each printing one PASS/FAIL line.
//!
//! Lines are written straight to stderr so they show up even when the test
//! harness captures output.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use ssnewforms::gf::{is_irreducible, primes_in, DensePoly, PrimeFieldCtx};
use ssnewforms::lift::{eigenvalue_of, enumerate_candidates};
use ssnewforms::linalg::wiedemann::poly_apply;
use ssnewforms::linalg::{charpoly_complete, charpoly_mod_nu, dense, nu_primes, wiedemann_minpoly};
use ssnewforms::linalg::{SparseSignedMatrix, WiedemannParams};
use ssnewforms::nf::{rational_charpoly, Elem, NumberField};
use ssnewforms::pipeline::{run_level, run_level_detailed, LevelOutput, NewformRecord, RunConfig};
use ssnewforms::series::{
    compose_horner, compose_with_reciprocal_j, j_series, j_series_e4, partial_fraction_simple, PowerSeries,
    RationalFunction,
};
use ssnewforms::sieve::{certify_degrees, factor_mod_nu, subset_sum_degrees, SieveConfig, SieveState, Ways};
use ssnewforms::ssgraph::{build_adjacency, build_adjacency_in, modpoly, split_atkin_lehner, SupersingularSet};
use ssnewforms::zpoly::{self, ZPoly};
use std::collections::{BTreeMap, BTreeSet};
use std::io::Write;
use std::str::FromStr;
use std::time::{Duration, Instant};

type Check = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)*) => {
        if !$cond {
            return Err(format!($($msg)*));
        }
    };
}

fn within(t: Instant, limit: Duration) -> Check {
    let secs = t.elapsed().as_secs_f64();
    ensure!(t.elapsed() < limit, "took {secs:.1}s, limit {}s", limit.as_secs());
    Ok(format!("{secs:.1}s"))
}

fn quiet(ncoeffs: usize) -> RunConfig {
    RunConfig { ncoeffs: Some(ncoeffs), sieve: false, ..RunConfig::default() }
}

fn run(p: u64, cfg: &RunConfig) -> Result<LevelOutput, String> {
    let out = run_level(p, cfg).map_err(|e| format!("p={p}: {e}"))?;
    ensure!(!out.report.partial, "p={p}: partial report {:?}", out.report.failures);
    Ok(out)
}

fn big(s: &str) -> BigInt {
    BigInt::from_str(s).expect("integer string")
}

// ---------------------------------------------------------------------------
// 1. small levels against point counts

/// a_ℓ = ℓ + 1 − #E(F_ℓ) for a Weierstrass model [a1, a2, a3, a4, a6].
fn ap_by_counting(c: [i64; 5], l: i64) -> i64 {
    let [a1, a2, a3, a4, a6] = c.map(|x| x.rem_euclid(l));
    let mut count = 1;
    for x in 0..l {
        for y in 0..l {
            let lhs = (y * y + a1 * x * y + a3 * y) % l;
            let rhs = (((x + a2) * x + a4) * x + a6) % l;
            if lhs == rhs {
                count += 1;
            }
        }
    }
    l + 1 - count
}

fn discriminant(c: [i64; 5]) -> i128 {
    let [a1, a2, a3, a4, a6] = c.map(i128::from);
    let b2 = a1 * a1 + 4 * a2;
    let b4 = a1 * a3 + 2 * a4;
    let b6 = a3 * a3 + 4 * a6;
    let b8 = a1 * a1 * a6 + 4 * a2 * a6 - a1 * a3 * a4 + a2 * a3 * a3 - a4 * a4;
    -b2 * b2 * b8 - 8 * b4 * b4 * b4 - 27 * b6 * b6 + 9 * b2 * b4 * b6
}

const CURVES: &[(u64, [i64; 5])] = &[
    (11, [0, -1, 1, -10, -20]),
    (17, [1, -1, 1, -1, -14]),
    (19, [0, 1, 1, -9, -15]),
    (37, [0, 0, 1, -1, 0]),
    (37, [0, 1, 1, -23, -50]),
    (43, [0, 1, 1, 0, 0]),
    (53, [1, -1, 1, 0, 0]),
    (61, [1, 0, 0, -2, 1]),
    (67, [0, 1, 1, -12, -21]),
    (79, [1, 1, 1, -2, 0]),
    (89, [1, 1, 1, -1, 0]),
    (89, [1, 1, 0, 4, 5]),
];

fn golden_small_levels() -> Check {
    let t = Instant::now();
    let cfg = RunConfig { exact_limit: 100, ..quiet(100) };
    let levels: BTreeSet<u64> = CURVES.iter().map(|c| c.0).collect();
    let mut matched = 0;
    for &p in &levels {
        let curves: Vec<[i64; 5]> = CURVES.iter().filter(|c| c.0 == p).map(|c| c.1).collect();
        for c in &curves {
            let mut d = discriminant(*c).abs();
            while d % i128::from(p) == 0 {
                d /= i128::from(p);
            }
            ensure!(d == 1, "curve {c:?} does not have conductor {p}");
        }
        let table: Vec<Vec<i64>> = curves
            .iter()
            .map(|&c| primes_in(2, 100).into_iter().map(|l| ap_by_counting(c, l as i64)).collect())
            .collect();
        let out = run(p, &cfg)?;
        let dim1: Vec<&NewformRecord> = out.records.iter().filter(|r| r.dim == "1").collect();
        ensure!(dim1.len() == curves.len(), "p={p}: {} dim-1 orbits, {} curves", dim1.len(), curves.len());
        let mut used = vec![false; curves.len()];
        for r in dim1 {
            let ap: Vec<i64> = primes_in(2, 100)
                .into_iter()
                .map(|l| r.coeffs[l as usize - 1][0].parse::<i64>().expect("small integer"))
                .collect();
            let hit = table.iter().enumerate().position(|(i, row)| !used[i] && *row == ap);
            ensure!(hit.is_some(), "p={p}: orbit with a_ℓ {ap:?} matches no curve");
            used[hit.expect("checked")] = true;
            matched += 1;
        }
    }
    let time = within(t, Duration::from_secs(10))?;
    Ok(format!("{matched} forms over {} levels, {time}", levels.len()))
}

// ---------------------------------------------------------------------------
// 2. dimensions and discriminants of Hecke fields

fn results_table() -> Check {
    let t = Instant::now();
    let table: &[(u64, &[(usize, i64)])] = &[
        (23, &[(2, 5)]),
        (29, &[(2, 8)]),
        (41, &[(3, 148)]),
        (47, &[(4, 1957)]),
        (71, &[(3, 257)]),
        (97, &[(3, 49)]),
        (113, &[(2, 12), (3, 321)]),
        (137, &[(4, 725)]),
        (193, &[(5, 70601)]),
    ];
    let cfg = quiet(2);
    for &(p, want) in table {
        let out = run(p, &cfg)?;
        let have: Vec<(usize, BigInt)> =
            out.records.iter().map(|r| (r.dim.parse().expect("dim"), big(&r.field_disc))).collect();
        for &(dim, disc) in want {
            ensure!(have.contains(&(dim, BigInt::from(disc))), "p={p}: no orbit (dim {dim}, disc {disc}) in {have:?}");
        }
    }
    let time = within(t, Duration::from_secs(120))?;
    Ok(format!("{} levels, {time}", table.len()))
}

// ---------------------------------------------------------------------------
// 3. orbits against an exact dense characteristic polynomial

/// ρ ↦ multiplicity for every candidate ρ of degree ≤ 6 dividing χ(B)/(t − 3).
/// Nullspace of an integer matrix over Q, one vector per free column.
fn rational_kernel(a: &[Vec<BigInt>]) -> (Vec<usize>, Vec<Vec<BigRational>>) {
    let n = a.first().map_or(0, Vec::len);
    let mut m: Vec<Vec<BigRational>> =
        a.iter().map(|r| r.iter().map(|x| BigRational::from_integer(x.clone())).collect()).collect();
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..n {
        let Some(k) = (row..m.len()).find(|&k| !m[k][col].is_zero()) else {
            continue;
        };
        m.swap(row, k);
        let inv = m[row][col].recip();
        m[row].iter_mut().for_each(|x| *x *= &inv);
        for k in 0..m.len() {
            if k != row && !m[k][col].is_zero() {
                let c = m[k][col].clone();
                for j in 0..n {
                    let y = &c * &m[row][j];
                    m[k][j] -= y;
                }
            }
        }
        pivots.push(col);
        row += 1;
    }
    let free: Vec<usize> = (0..n).filter(|c| !pivots.contains(c)).collect();
    let basis = free
        .iter()
        .map(|&fc| {
            let mut v = vec![BigRational::zero(); n];
            v[fc] = BigRational::from_integer(1.into());
            for (r, &pc) in pivots.iter().enumerate() {
                v[pc] = -m[r][fc].clone();
            }
            v
        })
        .collect();
    (free, basis)
}

/// ρ(B) over Z.
fn poly_of_matrix(rho: &ZPoly, b: &[Vec<i64>]) -> Vec<Vec<BigInt>> {
    let n = b.len();
    let mut acc = vec![vec![BigInt::zero(); n]; n];
    for c in rho.iter().rev() {
        let mut next = vec![vec![BigInt::zero(); n]; n];
        for i in 0..n {
            for k in 0..n {
                if b[i][k] != 0 {
                    for j in 0..n {
                        next[i][j] += &acc[k][j] * b[i][k];
                    }
                }
            }
            next[i][i] += c;
        }
        acc = next;
    }
    acc
}

/// Orbit dimensions inside the ρ-eigenspace of B_2: the irreducible factors
/// of B_ℓ + 2B_ℓ' restricted to ker ρ(B_2) over Q.
fn split_eigenspace(p: u64, set: &SupersingularSet, b2: &[Vec<i64>], rho: &ZPoly, mult: usize) -> Result<Vec<usize>, String> {
    let d = zpoly::degree(rho);
    if mult == 1 {
        return Ok(vec![d]);
    }
    let (free, kernel) = rational_kernel(&poly_of_matrix(rho, b2));
    ensure!(kernel.len() == mult * d, "p={p}: ker ρ(B_2) has dimension {} ≠ {}", kernel.len(), mult * d);
    let ells: Vec<u64> = primes_in(3, 50).into_iter().filter(|&l| l != p).take(2).collect();
    let mut t = vec![vec![0i64; b2.len()]; b2.len()];
    for (w, &ell) in [1i64, 2].iter().zip(&ells) {
        let adj = build_adjacency_in(set, ell, &mut ChaCha8Rng::seed_from_u64(p ^ ell)).map_err(|e| e.to_string())?;
        for (i, r) in adj.rows.iter().enumerate() {
            for &(c, v) in r {
                t[i][c] += w * i64::from(v);
            }
        }
    }
    // the kernel vector of free column f has coordinate δ there, so any w in
    // the kernel is Σ w[f] v_f
    let s: Vec<Vec<BigRational>> = free
        .iter()
        .map(|&fi| {
            kernel
                .iter()
                .map(|v| (0..v.len()).filter(|&k| t[fi][k] != 0).map(|k| &v[k] * BigInt::from(t[fi][k])).sum())
                .collect()
        })
        .collect();
    let chi: Vec<BigInt> = rational_charpoly(&s)
        .iter()
        .map(|c| c.is_integer().then(|| c.to_integer()).ok_or(format!("p={p}: non-integral χ_S")))
        .collect::<Result<_, _>>()?;
    ensure!(zpoly::is_squarefree(&chi), "p={p}: T_3 + 2T_5 does not separate the ρ = {} eigenspace", zpoly::to_string(rho));
    Ok(zpoly::factor_monic_squarefree(&chi).iter().map(|g| zpoly::degree(g)).collect())
}

/// ρ multiplicities of the cuspidal part of χ(B_2) and the orbit dimensions.
fn dense_oracle(
    p: u64,
    screens: &[(PrimeFieldCtx, Vec<Vec<DensePoly<u64>>>)],
) -> Result<(BTreeMap<ZPoly, usize>, Vec<usize>), String> {
    let (set, adj) = build_adjacency(p, 2, &mut ChaCha8Rng::seed_from_u64(p)).map_err(|e| e.to_string())?;
    let b2 = adj.to_dense();
    let chi = dense::charpoly_integer(&b2);
    let mut rest = zpoly::div_exact_monic(&chi, &zpoly::from_i64(&[-3, 1])).ok_or("3 is not an eigenvalue")?;
    let mut found = BTreeMap::new();
    let mut rest_mod: Vec<DensePoly<u64>> = screens.iter().map(|(f, _)| zpoly::reduce(f, &rest)).collect();
    for d in 1..=6 {
        for (i, rho) in enumerate_candidates(d).iter().enumerate() {
            while zpoly::degree(&rest) >= d
                && screens
                    .iter()
                    .zip(&rest_mod)
                    .all(|((f, reduced), r)| r.rem(f, &reduced[d - 1][i]).is_ok_and(|x| x.is_zero()))
            {
                let Some(q) = zpoly::div_exact_monic(&rest, rho) else {
                    break;
                };
                rest = q;
                rest_mod = screens.iter().map(|(f, _)| zpoly::reduce(f, &rest)).collect();
                *found.entry(rho.clone()).or_insert(0) += 1;
            }
        }
    }
    let mut dims = Vec::new();
    for (rho, &mult) in &found {
        dims.extend(split_eigenspace(p, &set, &b2, rho, mult)?);
    }
    Ok((found, dims))
}

fn oracle_equivalence() -> Check {
    let t = Instant::now();
    let screens: Vec<(PrimeFieldCtx, Vec<Vec<DensePoly<u64>>>)> = [1_000_003u64, 998_244_353]
        .into_iter()
        .map(|nu| {
            let f = PrimeFieldCtx::new(nu).expect("prime");
            let reduced =
                (1..=6).map(|d| enumerate_candidates(d).iter().map(|r| zpoly::reduce(&f, r)).collect()).collect();
            (f, reduced)
        })
        .collect();
    let cfg = quiet(2);
    let mut forms = 0;
    let levels = primes_in(5, 500);
    for &p in &levels {
        let (oracle, mut oracle_dims) = dense_oracle(p, &screens)?;
        let out = run(p, &cfg)?;
        let mut per_rho: BTreeMap<ZPoly, usize> = BTreeMap::new();
        let mut dims = Vec::new();
        for b in &out.report.blocks {
            for o in &b.orbits {
                let rho: ZPoly = o.a2_minpoly.iter().map(|s| big(s)).collect();
                let deg = zpoly::degree(&rho);
                ensure!(o.dim % deg == 0, "p={p}: orbit dim {} not a multiple of deg ρ = {deg}", o.dim);
                *per_rho.entry(rho).or_insert(0) += o.dim / deg;
                dims.push(o.dim);
            }
        }
        ensure!(
            per_rho == oracle,
            "p={p}: pipeline ρ {:?} vs oracle {:?}",
            per_rho.iter().map(|(r, m)| (zpoly::to_string(r), m)).collect::<Vec<_>>(),
            oracle.iter().map(|(r, m)| (zpoly::to_string(r), m)).collect::<Vec<_>>()
        );
        dims.sort_unstable();
        oracle_dims.sort_unstable();
        ensure!(dims == oracle_dims, "p={p}: dims {dims:?} vs oracle {oracle_dims:?}");
        forms += dims.len();
    }
    let time = within(t, Duration::from_secs(600))?;
    Ok(format!("{} levels, {forms} orbits, {time}", levels.len()))
}

// ---------------------------------------------------------------------------
// 4. isogeny graph invariants

fn vertex_count(p: u64) -> usize {
    let eps = match p % 12 {
        1 => 0,
        5 | 7 => 1,
        11 => 2,
        _ => unreachable!("p ≥ 5"),
    };
    (p / 12) as usize + eps
}

fn multiplicity_of_root(f: &PrimeFieldCtx, chi: &DensePoly<u64>, r: u64) -> usize {
    let lin = DensePoly::linear(f, &r);
    let mut c = chi.clone();
    let mut m = 0;
    while let Some(q) = c.div_exact(f, &lin) {
        c = q;
        m += 1;
    }
    m
}

fn graph_invariants() -> Check {
    let t = Instant::now();
    let f = PrimeFieldCtx::new(1_000_003).expect("prime");
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let levels = primes_in(5, 2000);
    for &p in &levels {
        for ell in [2u64, 3] {
            let (set, adj) = build_adjacency(p, ell, &mut rng).map_err(|e| format!("p={p} ℓ={ell}: {e}"))?;
            let n = set.len();
            ensure!(n == vertex_count(p), "p={p}: {n} vertices");
            for i in 0..n {
                let s: u64 = adj.rows[i].iter().map(|e| u64::from(e.1)).sum();
                ensure!(s == ell + 1, "p={p} ℓ={ell}: row {i} sums to {s}");
            }
            for i in 0..n {
                for j in 0..n {
                    let b = adj.get(i, j);
                    ensure!(adj.get(set.conj[i], set.conj[j]) == b, "p={p} ℓ={ell}: not Galois equivariant at ({i},{j})");
                    ensure!(
                        u64::from(b) * set.weight(j) == u64::from(adj.get(j, i)) * set.weight(i),
                        "p={p} ℓ={ell}: weighted symmetry fails at ({i},{j})"
                    );
                }
            }
            let full = dense::charpoly(&f, &SparseSignedMatrix::from_dense(&adj.to_dense()).to_dense_mod(&f));
            let split = split_atkin_lehner(&adj, &set);
            let plus = dense::charpoly(&f, &split.plus.to_dense_mod(&f));
            let minus = dense::charpoly(&f, &split.minus.to_dense_mod(&f));
            ensure!(plus.mul(&f, &minus) == full, "p={p} ℓ={ell}: χ⁺χ⁻ ≠ χ(B)");
            let m = multiplicity_of_root(&f, &minus, ell + 1);
            ensure!(m == 1, "p={p} ℓ={ell}: eigenvalue {} has multiplicity {m} in the minus block", ell + 1);
        }
    }
    let time = within(t, Duration::from_secs(1800))?;
    Ok(format!("{} levels x 2 degrees, {time}", levels.len()))
}

// ---------------------------------------------------------------------------
// 5. Wiedemann

fn random_matrix(rng: &mut ChaCha8Rng, case: usize) -> SparseSignedMatrix {
    let n = rng.gen_range(1..=60);
    let entry = |rng: &mut ChaCha8Rng| rng.gen_range(-3i64..=3);
    let dense: Vec<Vec<i64>> = match case % 3 {
        0 => (0..n)
            .map(|_| (0..n).map(|_| if rng.gen_bool(0.15) { entry(rng) } else { 0 }).collect())
            .collect(),
        // A ⊕ A ⊕ ..., so μ is a proper divisor of χ
        1 => {
            let k = rng.gen_range(1..=4.min(n));
            let copies = (n / k).max(1);
            let a: Vec<Vec<i64>> = (0..k).map(|_| (0..k).map(|_| entry(rng)).collect()).collect();
            let m = k * copies;
            (0..m).map(|i| (0..m).map(|j| if i / k == j / k { a[i % k][j % k] } else { 0 }).collect()).collect()
        }
        // many zero rows: a large kernel
        _ => (0..n)
            .map(|_| {
                let live = rng.gen_bool(0.3);
                (0..n).map(|_| if live && rng.gen_bool(0.3) { entry(rng) } else { 0 }).collect()
            })
            .collect(),
    };
    SparseSignedMatrix::from_dense(&dense)
}

fn wiedemann_correctness() -> Check {
    let t = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let params = WiedemannParams::default();
    let mut direct = 0;
    for case in 0..200 {
        let m = random_matrix(&mut rng, case);
        let start = rng.gen_range(0..8);
        let w = wiedemann_minpoly(&m, &params, start, &mut rng).map_err(|e| format!("case {case}: {e}"))?;
        let f = w.field;
        let dense_chi = dense::charpoly(&f, &m.to_dense_mod(&f)).coeffs;
        let rec = charpoly_complete(&w, &m, &params, &mut rng);
        match &rec.charpoly {
            Some(chi) => {
                ensure!(*chi == dense_chi, "case {case}: completed χ differs from the dense χ mod {}", f.modulus());
                direct += 1;
            }
            None => {
                let (w2, rec2) =
                    charpoly_mod_nu(&m, &params, w.nu_index + 1, &mut rng).map_err(|e| format!("case {case}: {e}"))?;
                let chi2 = rec2.charpoly.expect("charpoly_mod_nu completes");
                ensure!(
                    chi2 == dense::charpoly(&w2.field, &m.to_dense_mod(&w2.field)).coeffs,
                    "case {case}: χ differs from the dense χ mod {}",
                    w2.field.modulus()
                );
            }
        }
        for _ in 0..5 {
            let u: Vec<u64> = (0..m.dim()).map(|_| rng.gen_range(0..f.modulus())).collect();
            ensure!(poly_apply(&f, &m, &w.minpoly, &u).iter().all(|&x| x == 0), "case {case}: μ(M)u ≠ 0");
        }
        let at = |k: i64, rng: &mut ChaCha8Rng| {
            let p = WiedemannParams { shift: k, max_nu: 1, budget: 8, ..params.clone() };
            wiedemann_minpoly(&m, &p, w.nu_index, rng).map(|w| w.minpoly)
        };
        let (a, b) = (at(3, &mut rng), at(-11, &mut rng));
        ensure!(
            matches!((&a, &b), (Ok(x), Ok(y)) if *x == w.minpoly && *y == w.minpoly),
            "case {case}: shifts disagree"
        );
    }
    let time = within(t, Duration::from_secs(600))?;
    Ok(format!("200 matrices, {direct} completed on the first ν, {time}"))
}

// ---------------------------------------------------------------------------
// 6. series

/// f(q) ↦ f(q^k).
fn dilate(s: &PowerSeries, k: usize) -> PowerSeries {
    let mut c = vec![0; (s.coeffs.len() - 1) * k + 1];
    for (i, &x) in s.coeffs.iter().enumerate() {
        c[i * k] = x;
    }
    PowerSeries::new(s.valuation * k as i64, c)
}

fn power(f: &PrimeFieldCtx, s: &PowerSeries, e: usize, len: usize) -> PowerSeries {
    let mut one = vec![0; len];
    one[0] = 1;
    (0..e).fold(PowerSeries::new(0, one), |acc, _| acc.mul(f, s))
}

/// Number of coefficients of Φ₂(j(q), j(q²)) checked to vanish.
fn phi2_vanishes(p: u64) -> Result<usize, String> {
    let f = PrimeFieldCtx::new(p).expect("prime");
    let phi = modpoly::bundled(2).map_err(|e| e.to_string())?;
    let j = j_series(&f, 80).map_err(|e| e.to_string())?;
    let j2 = dilate(&j, 2);
    let len = 400;
    let mut total = PowerSeries::new(0, vec![0; len]);
    for x in 0..=3 {
        for y in 0..=3 {
            let c = phi.coeff(x, y).mod_floor(&BigInt::from(p)).to_u64().expect("reduced");
            if c == 0 {
                continue;
            }
            let term = power(&f, &j, x, len).mul(&f, &power(&f, &j2, y, len));
            let scaled = PowerSeries::new(term.valuation, term.coeffs.iter().map(|&a| f.mulm(a, c)).collect());
            total = total.add(&f, &scaled);
        }
    }
    ensure!(total.coeffs.iter().all(|&c| c == 0), "p={p}: Φ₂(j(q), j(q²)) ≠ 0");
    Ok(total.coeffs.len())
}

fn naive_sum(f: &PrimeFieldCtx, terms: &[(u64, u64)]) -> RationalFunction {
    let den = terms.iter().fold(DensePoly::one(f), |acc, &(_, j)| acc.mul(f, &DensePoly::linear(f, &j)));
    let mut num = DensePoly::zero();
    for (i, &(g, _)) in terms.iter().enumerate() {
        let others = terms
            .iter()
            .enumerate()
            .filter(|&(k, _)| k != i)
            .fold(DensePoly::constant(f, g), |acc, (_, &(_, j))| acc.mul(f, &DensePoly::linear(f, &j)));
        num = num.add(f, &others);
    }
    RationalFunction { num, den }
}

fn series_engine() -> Check {
    let t = Instant::now();
    let mut checked = Vec::new();
    for p in [11, 101, 1009] {
        let n = phi2_vanishes(p)?;
        ensure!(n >= 50, "p={p}: only {n} coefficients checked");
        checked.push(n);
        let f = PrimeFieldCtx::new(p).expect("prime");
        let (a, b) = (j_series(&f, 200), j_series_e4(&f, 200));
        ensure!(matches!((&a, &b), (Ok(x), Ok(y)) if x == y), "p={p}: E₁₂ and E₄³ routes disagree");
    }
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for case in 0..50 {
        let p = [101u64, 1009, 10007][case % 3];
        let f = PrimeFieldCtx::new(p).expect("prime");
        let k = rng.gen_range(1..=25);
        let terms: Vec<(u64, u64)> = (0..k).map(|_| (rng.gen_range(0..p), rng.gen_range(0..p))).collect();
        let r = partial_fraction_simple(&f, &terms);
        ensure!(r == naive_sum(&f, &terms), "case {case}: tree and naive partial fractions differ");
        let n = rng.gen_range(1..=150);
        let j = j_series(&f, n + k + 2).map_err(|e| e.to_string())?;
        let bk = compose_with_reciprocal_j(&f, &r, &j, n).map_err(|e| e.to_string())?;
        let ho = compose_horner(&f, &r, &j, n).map_err(|e| e.to_string())?;
        ensure!(bk == ho, "case {case}: Brent–Kung and Horner differ (p={p}, {k} terms, n={n})");
    }
    let time = within(t, Duration::from_secs(600))?;
    Ok(format!("Φ₂ checked to {checked:?} coefficients, 50 compositions, {time}"))
}

// ---------------------------------------------------------------------------
// 7. q-expansions

/// a_1..a_N of a record as elements of its field (power basis).
fn record_coeffs(r: &NewformRecord) -> (NumberField, Vec<Elem>) {
    let k = NumberField::new(r.field_minpoly.iter().map(|s| big(s)).collect());
    let basis: Vec<Elem> = r
        .basis
        .iter()
        .map(|b| b.iter().map(|s| BigRational::from_str(s).expect("rational")).collect())
        .collect();
    let coeffs = r
        .coeffs
        .iter()
        .map(|c| {
            c.iter().zip(&basis).fold(k.zero(), |acc, (x, b)| {
                k.add(&acc, &k.scale(b, &BigRational::from_integer(big(x))))
            })
        })
        .collect();
    (k, coeffs)
}

fn prime_power_split(n: usize) -> (usize, u32, usize) {
    let l = (2..=n).find(|d| n % d == 0).expect("n ≥ 2");
    let (mut m, mut e) = (n, 0);
    while m % l == 0 {
        m /= l;
        e += 1;
    }
    (l, e, m)
}

fn check_expansion(r: &NewformRecord) -> Result<(), String> {
    let p: usize = r.level.parse().expect("level");
    let (k, a) = record_coeffs(r);
    let n = a.len();
    let eq = |x: &Elem, y: &Elem| k.sub(x, y).iter().all(Zero::is_zero);
    let int = |x: i64| k.from_int(&BigInt::from(x));
    ensure!(eq(&a[0], &int(1)), "a_1 ≠ 1");
    let roots = k.embeddings();
    for m in 2..=n {
        let (l, e, rest) = prime_power_split(m);
        let want = if rest > 1 {
            k.mul(&a[l.pow(e) - 1], &a[rest - 1])
        } else if l == p {
            k.mul(&a[p - 1], &a[l.pow(e - 1) - 1])
        } else if e >= 2 {
            let prev = k.mul(&a[l - 1], &a[l.pow(e - 1) - 1]);
            k.sub(&prev, &k.scale(&a[l.pow(e - 2) - 1], &BigRational::from_integer(BigInt::from(l))))
        } else {
            a[m - 1].clone()
        };
        ensure!(eq(&a[m - 1], &want), "a_{m} breaks multiplicativity");
        if rest == 1 && e == 1 && l != p {
            let bound = 2.0 * (l as f64).sqrt();
            ensure!(k.embed(&a[l - 1], &roots).iter().all(|x| x.abs() <= bound + 1e-9), "a_{l} breaks the Weil bound");
        }
    }
    if p <= n {
        let sign: i64 = -r.al_sign.parse::<i64>().expect("sign");
        ensure!(eq(&a[p - 1], &int(sign)), "a_p is not −w_p");
    }
    Ok(())
}

fn expansion_consistency() -> Check {
    let t = Instant::now();
    let cfg = quiet(60);
    let mut count = 0;
    for p in primes_in(5, 250).into_iter().chain([389, 433]) {
        let detail = run_level_detailed(p, &cfg).map_err(|e| format!("p={p}: {e}"))?;
        ensure!(!detail.output.report.partial, "p={p}: partial report {:?}", detail.output.report.blocks.iter().map(|b| &b.failures).collect::<Vec<_>>());
        ensure!(detail.orbits.len() == detail.output.records.len(), "p={p}: orbit/record count mismatch");
        for ((orbit, qe), rec) in detail.orbits.iter().zip(&detail.output.records) {
            check_expansion(rec).map_err(|e| format!("p={p} dim {}: {e}", rec.dim))?;
            let stored: Vec<Vec<BigInt>> = rec.coeffs.iter().map(|c| c.iter().map(|s| big(s)).collect()).collect();
            ensure!(stored == qe.coeffs, "p={p}: record and expansion differ");
            for l in [2u64, 3, 5].into_iter().filter(|&l| l != p) {
                let t_l = detail.hecke.operator(l, orbit.block).map_err(|e| e.to_string())?;
                let ev = eigenvalue_of(&orbit.field, &orbit.eigenvector, &t_l).map_err(|e| e.to_string())?;
                let from_q = orbit.field.from_coords(qe.a(l as usize));
                ensure!(
                    orbit.field.sub(&ev, &from_q).iter().all(Zero::is_zero),
                    "p={p}: a_{l} differs from the T_{l} eigenvalue"
                );
            }
            count += 1;
        }
    }
    let time = within(t, Duration::from_secs(600))?;
    Ok(format!("{count} expansions to 60 coefficients, {time}"))
}

// ---------------------------------------------------------------------------
// 8. degree sieve

fn random_monic(rng: &mut ChaCha8Rng, f: &PrimeFieldCtx, d: usize) -> DensePoly<u64> {
    let mut c: Vec<u64> = (0..d).map(|_| rng.gen_range(0..f.modulus())).collect();
    c.push(1);
    DensePoly::new(f, c)
}

fn random_irreducible(rng: &mut ChaCha8Rng, f: &PrimeFieldCtx, d: usize) -> DensePoly<u64> {
    loop {
        let h = random_monic(rng, f, d);
        if is_irreducible(f, &h) {
            return h;
        }
    }
}

/// Every index set of `degs` with each sum, by brute force.
fn all_subsets(degs: &[usize]) -> BTreeMap<usize, Vec<Vec<usize>>> {
    let mut out: BTreeMap<usize, Vec<Vec<usize>>> = BTreeMap::new();
    for mask in 0u32..(1 << degs.len()) {
        let set: Vec<usize> = (0..degs.len()).filter(|&i| mask >> i & 1 == 1).collect();
        out.entry(set.iter().map(|&i| degs[i]).sum()).or_default().push(set);
    }
    out.values_mut().for_each(|v| v.sort());
    out
}

fn degree_sieve() -> Check {
    let t = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let f = PrimeFieldCtx::new(101).expect("prime");
    let cfg = SieveConfig::default();

    let mut trials = 0;
    while trials < 150 {
        let parts = rng.gen_range(1..=12);
        let chi = (0..parts).fold(DensePoly::one(&f), |acc, _| {
            let d = rng.gen_range(1..=4);
            acc.mul(&f, &random_monic(&mut rng, &f, d))
        });
        let fac = factor_mod_nu(&f, &chi, &[], &cfg, &mut rng).map_err(|e| e.to_string())?;
        if fac.factors.len() > 20 {
            continue;
        }
        trials += 1;
        let degs = fac.degrees();
        let total: usize = degs.iter().sum();
        let lo = rng.gen_range(1..=total);
        let e: BTreeSet<usize> = (lo..=rng.gen_range(lo..=total)).collect();
        let eta = rng.gen_range(1..=6);
        let delta = subset_sum_degrees(&fac, &e, eta);
        let brute = all_subsets(&degs);
        for &d in &e {
            match (delta.get(&d), brute.get(&d)) {
                (None, None) => {}
                (Some(Ways::Null), Some(b)) if b.len() > eta => {}
                (Some(Ways::Sets(s)), Some(b)) => {
                    let mut s = s.clone();
                    s.iter_mut().for_each(|x| x.sort_unstable());
                    s.sort();
                    ensure!(s == *b, "trial {trials}: Δ({d}) = {s:?}, expected {b:?}");
                }
                (got, want) => return Err(format!("trial {trials}: Δ({d}) = {got:?}, expected {want:?}")),
            }
        }
    }

    // x^7 − 2, x^9 − 3, x^13 − 5: the window is [7, 14]
    let xn = |n: usize, c: i64| {
        let mut v = vec![0i64; n + 1];
        v[0] = -c;
        v[n] = 1;
        zpoly::from_i64(&v)
    };
    let chi_z = zpoly::mul(&zpoly::mul(&xn(7, 2), &xn(9, 3)), &xn(13, 5));
    let state = SieveState::new(29, 6, cfg.clone());
    // the five ν where χ splits into the fewest factors; fine splittings
    // leave more than η ways to reach each degree
    let mut srng = ChaCha8Rng::seed_from_u64(9);
    let mut facs = nu_primes()
        .iter()
        .map(|&nu| {
            let g = PrimeFieldCtx::new(nu).expect("prime");
            factor_mod_nu(&g, &zpoly::reduce(&g, &chi_z), &[], &cfg, &mut srng).map_err(|e| e.to_string())
        })
        .collect::<Result<Vec<_>, _>>()?;
    facs.sort_by_key(|fac| fac.factors.len());
    let mut it = facs.into_iter().take(5);
    let rep = certify_degrees(state, || it.next().map(Ok), 5)
    .map_err(|e| e.to_string())?;
    let mut gone: Vec<usize> = rep.eliminated.iter().map(|e| e.degree).collect();
    gone.sort_unstable();
    ensure!(gone == [8, 10, 11, 12, 14], "eliminated {gone:?}, expected [8, 10, 11, 12, 14]");
    ensure!(rep.surviving == [7, 9, 13], "surviving {:?}, expected [7, 9, 13]", rep.surviving);

    // factors of degree 2, 3, 5
    let chi = [2, 3, 5].iter().fold(DensePoly::one(&f), |acc, &d| acc.mul(&f, &random_irreducible(&mut rng, &f, d)));
    let fac = factor_mod_nu(&f, &chi, &[], &cfg, &mut rng).map_err(|e| e.to_string())?;
    let delta = subset_sum_degrees(&fac, &(1..=10).collect(), cfg.eta);
    let reach: Vec<usize> = delta.iter().filter(|(&d, w)| d > 0 && **w != Ways::Sets(vec![])).map(|(&d, _)| d).collect();
    ensure!(reach == [2, 3, 5, 7, 8, 10], "{{2,3,5}} reaches {reach:?}");

    let time = within(t, Duration::from_secs(300))?;
    Ok(format!("{trials} DP trials, synthetic window certified over {} ν, {time}", rep.nus_used.len()))
}

// ---------------------------------------------------------------------------
// 9. scale

fn peak_rss_mb() -> Option<f64> {
    let status = std::fs::read_to_string("/proc/self/status").ok()?;
    let line = status.lines().find(|l| l.starts_with("VmHWM:"))?;
    let kb: f64 = line.split_whitespace().nth(1)?.parse().ok()?;
    Some(kb / 1024.0)
}

fn scale_smoke() -> Check {
    let t = Instant::now();
    let cfg = RunConfig { sieve: false, ..RunConfig::default() };
    let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().map_err(|e| e.to_string())?;
    let out = pool.install(|| run(10007, &cfg))?;
    ensure!(out.report.ncoeffs == 1668, "ncoeffs {}", out.report.ncoeffs);
    ensure!(out.records.iter().all(|r| r.coeffs.len() == 1668), "short expansion");
    let time = within(t, Duration::from_secs(900))?;
    let rss = peak_rss_mb().ok_or("no /proc/self/status")?;
    ensure!(rss < 1024.0, "peak RSS {rss:.0} MB");
    Ok(format!("{} orbits of dim ≤ 6, {time}, peak RSS {rss:.0} MB", out.records.len()))
}

// ---------------------------------------------------------------------------

#[test]
fn acceptance() {
    let criteria: [(&str, fn() -> Check); 9] = [
        ("golden small levels", golden_small_levels),
        ("results table", results_table),
        ("oracle equivalence", oracle_equivalence),
        ("graph invariants", graph_invariants),
        ("wiedemann correctness", wiedemann_correctness),
        ("series engine", series_engine),
        ("q-expansion self-consistency", expansion_consistency),
        ("degree sieve", degree_sieve),
        ("scale smoke", scale_smoke),
    ];
    let mut failed = Vec::new();
    for (i, (name, check)) in criteria.iter().enumerate() {
        let result = std::panic::catch_unwind(check).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let line = match &result {
            Ok(detail) => format!("criterion {} [PASS] {name}: {detail}\n", i + 1),
            Err(why) => {
                failed.push(i + 1);
                format!("criterion {} [FAIL] {name}: {why}\n", i + 1)
            }
        };
        let _ = std::io::stderr().write_all(line.as_bytes());
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
