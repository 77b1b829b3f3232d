//! Finite-field arithmetic: F_p for single-word primes, the quadratic
//! extension F_{p^2} with a trace-zero generator, dense polynomials over
//! either, and root finding.

mod ext;
mod factor;
mod ntt;
pub mod poly;
mod quad;
mod roots;

use num_bigint::BigUint;
use rand::Rng;
use std::fmt::Debug;
use thiserror::Error;

pub use ext::{is_irreducible, ExtField};
pub use factor::{factor, factor_degrees};
pub use poly::DensePoly;
pub use quad::{QuadExtCtx, QuadExtElement};
pub use roots::{distinct_roots, frobenius_power, poly_roots, DEFAULT_SPLIT_ATTEMPTS};

/// Largest modulus accepted by [`PrimeFieldCtx`]; products of two residues
/// must fit in a `u64`.
pub const MAX_MODULUS: u64 = 1 << 32;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GfError {
    #[error("modulus {0} is not an odd prime below 2^32")]
    BadModulus(u64),
    #[error("division by the zero polynomial")]
    DivisionByZero,
    #[error("equal-degree splitting did not finish after {0} attempts")]
    SplitExhausted(usize),
}

/// Common interface for the fields the polynomial code runs over.
///
/// Elements are plain values; all arithmetic goes through the context so
/// contexts can carry moduli and precomputed constants.
pub trait Field: Clone + Send + Sync {
    type Elem: Clone + PartialEq + Eq + Debug + Send + Sync;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn from_i64(&self, x: i64) -> Self::Elem;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn inv(&self, a: &Self::Elem) -> Option<Self::Elem>;
    /// Number of elements of the field.
    fn order(&self) -> BigUint;
    fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> Self::Elem;

    fn is_zero(&self, a: &Self::Elem) -> bool {
        *a == self.zero()
    }

    fn square(&self, a: &Self::Elem) -> Self::Elem {
        self.mul(a, a)
    }

    fn pow(&self, a: &Self::Elem, e: &BigUint) -> Self::Elem {
        let mut acc = self.one();
        for i in (0..e.bits()).rev() {
            acc = self.square(&acc);
            if e.bit(i) {
                acc = self.mul(&acc, a);
            }
        }
        acc
    }

    fn pow_u64(&self, a: &Self::Elem, e: u64) -> Self::Elem {
        self.pow(a, &BigUint::from(e))
    }

    /// Product of two coefficient vectors (lowest degree first). Fields with
    /// a fast transform override this.
    fn poly_mul(&self, a: &[Self::Elem], b: &[Self::Elem]) -> Vec<Self::Elem> {
        schoolbook_mul(self, a, b)
    }
}

pub(crate) fn schoolbook_mul<F: Field + ?Sized>(f: &F, a: &[F::Elem], b: &[F::Elem]) -> Vec<F::Elem> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![f.zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if f.is_zero(x) {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] = f.add(&out[i + j], &f.mul(x, y));
        }
    }
    out
}

/// Square root in a field of odd order by Tonelli–Shanks. Returns `None`
/// for nonsquares.
pub fn field_sqrt<F: Field, R: Rng + ?Sized>(f: &F, a: &F::Elem, rng: &mut R) -> Option<F::Elem> {
    if f.is_zero(a) {
        return Some(f.zero());
    }
    let q_minus_1 = f.order() - 1u32;
    let half = &q_minus_1 >> 1;
    if f.pow(a, &half) != f.one() {
        return None;
    }
    let s = q_minus_1.trailing_zeros().unwrap_or(0);
    let t = &q_minus_1 >> s;
    let z = loop {
        let c = f.random(rng);
        if !f.is_zero(&c) && f.pow(&c, &half) != f.one() {
            break c;
        }
    };
    let mut m = s;
    let mut c = f.pow(&z, &t);
    let mut x = f.pow(a, &((&t + 1u32) >> 1));
    let mut b = f.pow(a, &t);
    let one = f.one();
    while b != one {
        let mut i = 0;
        let mut b2 = b.clone();
        while b2 != one {
            b2 = f.square(&b2);
            i += 1;
        }
        let mut g = c.clone();
        for _ in 0..(m - i - 1) {
            g = f.square(&g);
        }
        x = f.mul(&x, &g);
        c = f.square(&g);
        b = f.mul(&b, &c);
        m = i;
    }
    Some(x)
}

/// Prime field F_p with p an odd prime below 2^32.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PrimeFieldCtx {
    p: u64,
}

impl PrimeFieldCtx {
    pub fn new(p: u64) -> Result<Self, GfError> {
        if p < 3 || p >= MAX_MODULUS || !is_prime(p) {
            return Err(GfError::BadModulus(p));
        }
        Ok(Self { p })
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }

    #[inline]
    pub fn reduce_i64(&self, x: i64) -> u64 {
        x.rem_euclid(self.p as i64) as u64
    }

    #[inline]
    pub fn reduce_i128(&self, x: i128) -> u64 {
        x.rem_euclid(self.p as i128) as u64
    }

    /// Representative in (-p/2, p/2].
    #[inline]
    pub fn signed(&self, a: u64) -> i64 {
        if a > self.p / 2 {
            a as i64 - self.p as i64
        } else {
            a as i64
        }
    }

    #[inline]
    pub fn addm(&self, a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }

    #[inline]
    pub fn subm(&self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }

    #[inline]
    pub fn mulm(&self, a: u64, b: u64) -> u64 {
        a * b % self.p
    }

    pub fn powm(&self, mut a: u64, mut e: u64) -> u64 {
        let mut acc = 1 % self.p;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mulm(acc, a);
            }
            a = self.mulm(a, a);
            e >>= 1;
        }
        acc
    }

    pub fn invm(&self, a: u64) -> Option<u64> {
        if a % self.p == 0 {
            None
        } else {
            Some(self.powm(a, self.p - 2))
        }
    }

    /// Euler criterion: 1 for nonzero squares, -1 for nonsquares, 0 for 0.
    pub fn legendre(&self, a: u64) -> i32 {
        let a = a % self.p;
        if a == 0 {
            return 0;
        }
        if self.powm(a, (self.p - 1) / 2) == 1 {
            1
        } else {
            -1
        }
    }
}

impl Field for PrimeFieldCtx {
    type Elem = u64;

    fn zero(&self) -> u64 {
        0
    }
    fn one(&self) -> u64 {
        1
    }
    fn from_i64(&self, x: i64) -> u64 {
        self.reduce_i64(x)
    }
    fn add(&self, a: &u64, b: &u64) -> u64 {
        self.addm(*a, *b)
    }
    fn sub(&self, a: &u64, b: &u64) -> u64 {
        self.subm(*a, *b)
    }
    fn neg(&self, a: &u64) -> u64 {
        if *a == 0 {
            0
        } else {
            self.p - a
        }
    }
    fn mul(&self, a: &u64, b: &u64) -> u64 {
        self.mulm(*a, *b)
    }
    fn inv(&self, a: &u64) -> Option<u64> {
        self.invm(*a)
    }
    fn order(&self) -> BigUint {
        BigUint::from(self.p)
    }
    fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> u64 {
        rng.gen_range(0..self.p)
    }
    fn pow_u64(&self, a: &u64, e: u64) -> u64 {
        self.powm(*a, e)
    }
    fn poly_mul(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        if a.len().min(b.len()) <= ntt::CROSSOVER {
            schoolbook_mul_u64(self.p, a, b)
        } else {
            ntt::mul_mod(a, b, self.p)
        }
    }
}

fn schoolbook_mul_u64(p: u64, a: &[u64], b: &[u64]) -> Vec<u64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    // accumulate in u128 and reduce once per output coefficient
    let mut acc = vec![0u128; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            acc[i + j] += (x * y) as u128;
        }
    }
    acc.into_iter().map(|v| (v % p as u128) as u64).collect()
}

/// Deterministic Miller–Rabin for 64-bit inputs.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for q in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n % q == 0 {
            return n == q;
        }
    }
    let mulmod = |a: u64, b: u64| ((a as u128 * b as u128) % n as u128) as u64;
    let powmod = |mut a: u64, mut e: u64| {
        let mut r = 1u64;
        while e > 0 {
            if e & 1 == 1 {
                r = mulmod(r, a);
            }
            a = mulmod(a, a);
            e >>= 1;
        }
        r
    };
    let d = (n - 1) >> (n - 1).trailing_zeros();
    let s = (n - 1).trailing_zeros();
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = powmod(a, d);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mulmod(x, x);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Primes in `[lo, hi]` by a segmented-free simple sieve (hi is small here).
pub fn primes_in(lo: u64, hi: u64) -> Vec<u64> {
    if hi < 2 {
        return Vec::new();
    }
    let n = hi as usize;
    let mut sieve = vec![true; n + 1];
    sieve[0] = false;
    if n >= 1 {
        sieve[1] = false;
    }
    let mut i = 2;
    while i * i <= n {
        if sieve[i] {
            let mut k = i * i;
            while k <= n {
                sieve[k] = false;
                k += i;
            }
        }
        i += 1;
    }
    (lo as usize..=n).filter(|&k| sieve[k]).map(|k| k as u64).collect()
}

/// Smallest positive quadratic nonresidue modulo the odd prime `p`.
pub fn find_nonresidue(p: u64) -> u64 {
    let f = PrimeFieldCtx { p };
    (2..p).find(|&a| f.legendre(a) == -1).expect("odd prime has a nonresidue")
}
