//! Polynomials over Z and Q (coefficient vectors, lowest degree first).

use crate::gf::{DensePoly, PrimeFieldCtx};
use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type ZPoly = Vec<BigInt>;
pub type QPoly = Vec<BigRational>;

pub fn from_i64(c: &[i64]) -> ZPoly {
    trim(c.iter().map(|&x| BigInt::from(x)).collect())
}

pub fn trim<T: Zero>(mut p: Vec<T>) -> Vec<T> {
    while p.last().is_some_and(Zero::is_zero) {
        p.pop();
    }
    p
}

pub fn degree<T>(p: &[T]) -> usize {
    p.len().saturating_sub(1)
}

pub fn to_q(p: &[BigInt]) -> QPoly {
    p.iter().map(|c| BigRational::from_integer(c.clone())).collect()
}

pub fn reduce(f: &PrimeFieldCtx, p: &[BigInt]) -> DensePoly<u64> {
    let m = BigInt::from(f.modulus());
    DensePoly::new(
        f,
        p.iter()
            .map(|c| {
                let r = c.mod_floor(&m);
                u64::try_from(r).expect("reduced")
            })
            .collect(),
    )
}

pub fn mul<T>(a: &[T], b: &[T]) -> Vec<T>
where
    T: Clone + Zero + for<'x> std::ops::AddAssign<&'x T>,
    for<'x> &'x T: std::ops::Mul<&'x T, Output = T>,
{
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![T::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] += &(x * y);
        }
    }
    trim(out)
}

pub fn sub<T>(a: &[T], b: &[T]) -> Vec<T>
where
    T: Clone + Zero + for<'x> std::ops::SubAssign<&'x T>,
{
    let mut out = a.to_vec();
    if out.len() < b.len() {
        out.resize(b.len(), T::zero());
    }
    for (x, y) in out.iter_mut().zip(b) {
        *x -= y;
    }
    trim(out)
}

pub fn eval(p: &[BigInt], x: &BigInt) -> BigInt {
    p.iter().rev().fold(BigInt::zero(), |acc, c| acc * x + c)
}

pub fn derivative<T>(p: &[T]) -> Vec<T>
where
    T: Clone + Zero + From<BigInt>,
    for<'x> &'x T: std::ops::Mul<&'x T, Output = T>,
{
    trim(p.iter().enumerate().skip(1).map(|(i, c)| c * &T::from(BigInt::from(i))).collect())
}

/// Exact division by a monic integer polynomial; None if not divisible.
pub fn div_exact_monic(a: &[BigInt], m: &[BigInt]) -> Option<ZPoly> {
    let (q, r) = divrem_monic(a, m);
    r.is_empty().then_some(q)
}

pub fn divrem_monic(a: &[BigInt], m: &[BigInt]) -> (ZPoly, ZPoly) {
    assert!(m.last().is_some_and(One::is_one), "monic divisor");
    let dm = degree(m);
    let mut r = a.to_vec();
    if r.len() <= dm {
        return (Vec::new(), trim(r));
    }
    let mut q = vec![BigInt::zero(); r.len() - dm];
    for i in (0..q.len()).rev() {
        let c = r[i + dm].clone();
        if c.is_zero() {
            continue;
        }
        for (k, mk) in m.iter().enumerate() {
            r[i + k] -= &c * mk;
        }
        q[i] = c;
    }
    r.truncate(dm);
    (trim(q), trim(r))
}

pub fn q_divrem(a: &[BigRational], b: &[BigRational]) -> (QPoly, QPoly) {
    let b = trim(b.to_vec());
    let db = degree(&b);
    let lead = b.last().expect("nonzero divisor").clone();
    let mut r = trim(a.to_vec());
    if r.len() <= db {
        return (Vec::new(), r);
    }
    let mut q = vec![BigRational::zero(); r.len() - db];
    for i in (0..q.len()).rev() {
        let c = &r[i + db] / &lead;
        if c.is_zero() {
            continue;
        }
        for (k, bk) in b.iter().enumerate() {
            r[i + k] -= &c * bk;
        }
        q[i] = c;
    }
    r.truncate(db);
    (trim(q), trim(r))
}

pub fn q_gcd(a: &[BigRational], b: &[BigRational]) -> QPoly {
    let mut a = trim(a.to_vec());
    let mut b = trim(b.to_vec());
    while !b.is_empty() {
        let (_, r) = q_divrem(&a, &b);
        a = b;
        b = r;
    }
    if let Some(l) = a.last().cloned() {
        for c in a.iter_mut() {
            *c /= &l;
        }
    }
    a
}

pub fn is_squarefree(p: &[BigInt]) -> bool {
    let q = to_q(p);
    degree(&q_gcd(&q, &derivative(&q))) == 0
}

/// Sign of a + b·√s for rationals a, b and a positive nonsquare integer s.
fn sign_with_root(a: &BigRational, b: &BigRational, s: i64) -> i32 {
    let sa = sgn(a);
    let sb = sgn(b);
    if sb == 0 || sa == sb {
        return if sa != 0 { sa } else { sb };
    }
    if sa == 0 {
        return sb;
    }
    // opposite signs: compare a² with s b²
    let lhs = a * a;
    let rhs = b * b * BigRational::from_integer(BigInt::from(s));
    match lhs.cmp(&rhs) {
        std::cmp::Ordering::Greater => sa,
        std::cmp::Ordering::Less => sb,
        std::cmp::Ordering::Equal => 0,
    }
}

fn sgn(x: &BigRational) -> i32 {
    match x.numer().sign() {
        Sign::Plus => 1,
        Sign::Minus => -1,
        Sign::NoSign => 0,
    }
}

/// Sign of p(±√s).
fn sign_at_root(p: &[BigRational], s: i64, negative: bool) -> i32 {
    let sq = BigRational::from_integer(BigInt::from(s));
    let mut even = BigRational::zero();
    let mut odd = BigRational::zero();
    let mut pow = BigRational::one();
    for (i, c) in p.iter().enumerate() {
        if i % 2 == 0 {
            even += c * &pow;
        } else {
            odd += c * &pow;
            pow *= &sq;
        }
    }
    if negative {
        odd = -odd;
    }
    sign_with_root(&even, &odd, s)
}

fn sturm_sequence(p: &[BigInt]) -> Vec<QPoly> {
    let mut seq = vec![to_q(p)];
    seq.push(derivative(&seq[0]));
    loop {
        let n = seq.len();
        if seq[n - 1].is_empty() {
            seq.pop();
            break;
        }
        let (_, r) = q_divrem(&seq[n - 2], &seq[n - 1]);
        if r.is_empty() {
            break;
        }
        seq.push(r.into_iter().map(|c| -c).collect());
    }
    seq
}

fn variations(signs: impl Iterator<Item = i32>) -> usize {
    let nz: Vec<i32> = signs.filter(|&s| s != 0).collect();
    nz.windows(2).filter(|w| w[0] != w[1]).count()
}

/// Number of distinct real roots in the closed interval [-√s, √s], for a
/// positive nonsquare s.
pub fn count_roots_in_sqrt_interval(p: &[BigInt], s: i64) -> usize {
    let seq = sturm_sequence(p);
    let lo = variations(seq.iter().map(|q| sign_at_root(q, s, true)));
    let hi = variations(seq.iter().map(|q| sign_at_root(q, s, false)));
    let mut n = lo - hi;
    // Sturm counts (a, b]; add a root at a itself
    if sign_at_root(&seq[0], s, true) == 0 {
        n += 1;
    }
    n
}

/// Discriminant of a monic polynomial, via the resultant with its derivative.
pub fn discriminant(p: &[BigInt]) -> BigInt {
    let n = degree(p);
    let q = to_q(p);
    let r = resultant(&q, &derivative(&q));
    let sign = if (n * (n - 1) / 2) % 2 == 1 { -BigInt::one() } else { BigInt::one() };
    let lead = BigRational::from_integer(p[n].clone());
    let d = r / lead * BigRational::from_integer(sign);
    assert!(d.is_integer());
    d.to_integer()
}

/// Resultant over Q by the Euclidean algorithm.
pub fn resultant(a: &[BigRational], b: &[BigRational]) -> BigRational {
    let a = trim(a.to_vec());
    let b = trim(b.to_vec());
    if a.is_empty() || b.is_empty() {
        return BigRational::zero();
    }
    let da = degree(&a);
    let db = degree(&b);
    if db == 0 {
        return num_traits::pow(b[0].clone(), da);
    }
    let (_, r) = q_divrem(&a, &b);
    if r.is_empty() {
        return BigRational::zero();
    }
    let dr = degree(&r);
    let mut res = resultant(&b, &r) * num_traits::pow(b[db].clone(), da - dr);
    if (da * db) % 2 == 1 {
        res = -res;
    }
    res
}

pub fn content(p: &[BigInt]) -> BigInt {
    p.iter().fold(BigInt::zero(), |g, c| g.gcd(c))
}

/// Coefficient bound for monic factors of degree ≤ k of p (Mignotte).
pub fn mignotte_bound(p: &[BigInt], k: usize) -> BigInt {
    let norm2: BigInt = p.iter().map(|c| c * c).sum();
    let norm = norm2.sqrt() + 1u32;
    let binom = |n: usize, r: usize| -> BigInt {
        (0..r).fold(BigInt::one(), |acc, i| acc * BigInt::from(n - i) / BigInt::from(i + 1))
    };
    (0..=k).map(|j| binom(k, j)).max().unwrap_or_else(BigInt::one) * norm
}

pub fn to_string(p: &[BigInt]) -> String {
    p.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(" ")
}

pub fn abs_max(p: &[BigInt]) -> BigInt {
    p.iter().map(|c| c.abs()).max().unwrap_or_default()
}

fn reduce_sym(p: &[BigInt], m: &BigInt) -> ZPoly {
    let half: BigInt = m >> 1u32;
    trim(
        p.iter()
            .map(|c| {
                let r = c.mod_floor(m);
                if r > half {
                    r - m
                } else {
                    r
                }
            })
            .collect(),
    )
}

fn lift_poly(p: &DensePoly<u64>) -> ZPoly {
    p.coeffs.iter().map(|&c| BigInt::from(c)).collect()
}

fn add(a: &[BigInt], b: &[BigInt]) -> ZPoly {
    let mut out = a.to_vec();
    if out.len() < b.len() {
        out.resize(b.len(), BigInt::zero());
    }
    for (x, y) in out.iter_mut().zip(b) {
        *x += y;
    }
    trim(out)
}

/// One quadratic Hensel step: f ≡ g h, s g + t h ≡ 1 (mod m) become the
/// same relations mod m². h stays monic.
fn hensel_step(f: &[BigInt], g: &[BigInt], h: &[BigInt], s: &[BigInt], t: &[BigInt], m: &BigInt) -> [ZPoly; 4] {
    let m2 = m * m;
    let e = reduce_sym(&sub(f, &mul(g, h)), &m2);
    let (q, r) = divrem_monic(&reduce_sym(&mul(s, &e), &m2), h);
    let g2 = reduce_sym(&add(&add(g, &mul(t, &e)), &mul(&q, g)), &m2);
    let h2 = reduce_sym(&add(h, &r), &m2);
    let b = reduce_sym(&sub(&add(&mul(s, &g2), &mul(t, &h2)), &[BigInt::one()]), &m2);
    let (c, d) = divrem_monic(&reduce_sym(&mul(s, &b), &m2), &h2);
    let s2 = reduce_sym(&sub(s, &d), &m2);
    let t2 = reduce_sym(&sub(&sub(t, &mul(t, &b)), &mul(&c, &g2)), &m2);
    [g2, h2, s2, t2]
}

/// Irreducible factors over Z of a monic squarefree polynomial, by
/// factoring modulo a small prime, Hensel lifting and recombining subsets.
pub fn factor_monic_squarefree(f: &[BigInt]) -> Vec<ZPoly> {
    let f = trim(f.to_vec());
    let n = degree(&f);
    assert!(f.last().is_some_and(One::is_one), "monic input");
    if n <= 1 {
        return vec![f];
    }
    let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(n as u64);
    // pick the prime with the fewest modular factors among a few good ones
    let mut best: Option<(PrimeFieldCtx, Vec<DensePoly<u64>>)> = None;
    let mut tried = 0;
    for q in crate::gf::primes_in(3, 2000) {
        let fq = PrimeFieldCtx::new(q).expect("prime");
        let fr = reduce(&fq, &f);
        if fr.gcd(&fq, &fr.derivative(&fq)).degree() != Some(0) {
            continue;
        }
        let fac: Vec<DensePoly<u64>> =
            crate::gf::factor(&fq, &fr, &mut rng).expect("nonzero").into_iter().map(|(g, _)| g).collect();
        if best.as_ref().is_none_or(|b| fac.len() < b.1.len()) {
            best = Some((fq, fac));
        }
        tried += 1;
        if tried == 6 || best.as_ref().is_some_and(|b| b.1.len() == 1) {
            break;
        }
    }
    let (fq, modular) = best.expect("some prime keeps f squarefree");
    if modular.len() == 1 {
        return vec![f];
    }
    let q = BigInt::from(fq.modulus());
    let bound: BigInt = mignotte_bound(&f, n) * 2u32 + 1u32;
    let mut steps = 0u32;
    let mut big = q.clone();
    while big <= bound {
        big = &big * &big;
        steps += 1;
    }
    // lift each factor against the product of the others
    let lifted: Vec<ZPoly> = modular
        .iter()
        .enumerate()
        .map(|(i, g)| {
            let mut h = DensePoly::one(&fq);
            for (k, o) in modular.iter().enumerate() {
                if k != i {
                    h = h.mul(&fq, o);
                }
            }
            let (_, s, t) = g.xgcd(&fq, &h);
            // s g + t h = 1; the step wants s' g' + t' h' with h' = the lifted
            // factor monic, so swap roles
            let (mut gg, mut hh, mut ss, mut tt) = (lift_poly(&h), lift_poly(g), lift_poly(&t), lift_poly(&s));
            let mut m = q.clone();
            for _ in 0..steps {
                [gg, hh, ss, tt] = hensel_step(&f, &gg, &hh, &ss, &tt, &m);
                m = &m * &m;
            }
            let _ = (&gg, &ss, &tt);
            reduce_sym(&hh, &big)
        })
        .collect();
    let mut remaining: Vec<ZPoly> = lifted;
    let mut rest = f.clone();
    let mut out = Vec::new();
    let mut size = 1;
    while 2 * size <= remaining.len() {
        let mut found = None;
        for combo in itertools::Itertools::combinations(0..remaining.len(), size) {
            let mut prod: ZPoly = vec![BigInt::one()];
            for &i in &combo {
                prod = reduce_sym(&mul(&prod, &remaining[i]), &big);
            }
            if let Some(quot) = div_exact_monic(&rest, &prod) {
                found = Some((combo, prod, quot));
                break;
            }
        }
        match found {
            Some((combo, g, quot)) => {
                out.push(g);
                rest = quot;
                for &i in combo.iter().rev() {
                    remaining.remove(i);
                }
            }
            None => size += 1,
        }
    }
    if degree(&rest) > 0 {
        out.push(rest);
    }
    out.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    out
}
