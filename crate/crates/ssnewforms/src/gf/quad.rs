use super::{find_nonresidue, Field, GfError, PrimeFieldCtx};
use num_bigint::BigUint;
use rand::Rng;
use std::fmt;

/// F_{p^2} = F_p[xi] / (xi^2 - n), n the smallest nonresidue. Conjugation
/// sends xi to -xi.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct QuadExtCtx {
    base: PrimeFieldCtx,
    nonresidue: u64,
}

/// `a + b*xi`. The derived ordering (lexicographic on canonical residues) is
/// the fixed total order used on supersingular j-invariants.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct QuadExtElement {
    pub a: u64,
    pub b: u64,
}

impl QuadExtElement {
    pub fn new(a: u64, b: u64) -> Self {
        Self { a, b }
    }

    pub fn rational(a: u64) -> Self {
        Self { a, b: 0 }
    }

    pub fn is_rational(&self) -> bool {
        self.b == 0
    }
}

impl fmt::Display for QuadExtElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.b == 0 {
            write!(f, "{}", self.a)
        } else {
            write!(f, "{}+{}*xi", self.a, self.b)
        }
    }
}

impl QuadExtCtx {
    pub fn new(p: u64) -> Result<Self, GfError> {
        let base = PrimeFieldCtx::new(p)?;
        Ok(Self { base, nonresidue: find_nonresidue(p) })
    }

    pub fn base(&self) -> &PrimeFieldCtx {
        &self.base
    }

    pub fn p(&self) -> u64 {
        self.base.modulus()
    }

    pub fn nonresidue(&self) -> u64 {
        self.nonresidue
    }

    pub fn xi(&self) -> QuadExtElement {
        QuadExtElement { a: 0, b: 1 }
    }

    pub fn conj(&self, x: &QuadExtElement) -> QuadExtElement {
        QuadExtElement { a: x.a, b: self.base.neg(&x.b) }
    }

    pub fn norm(&self, x: &QuadExtElement) -> u64 {
        let f = &self.base;
        f.subm(f.mulm(x.a, x.a), f.mulm(self.nonresidue, f.mulm(x.b, x.b)))
    }

    pub fn from_int(&self, x: i64) -> QuadExtElement {
        QuadExtElement::rational(self.base.reduce_i64(x))
    }
}

impl Field for QuadExtCtx {
    type Elem = QuadExtElement;

    fn zero(&self) -> QuadExtElement {
        QuadExtElement::default()
    }
    fn one(&self) -> QuadExtElement {
        QuadExtElement { a: 1, b: 0 }
    }
    fn from_i64(&self, x: i64) -> QuadExtElement {
        self.from_int(x)
    }
    fn add(&self, x: &QuadExtElement, y: &QuadExtElement) -> QuadExtElement {
        QuadExtElement { a: self.base.addm(x.a, y.a), b: self.base.addm(x.b, y.b) }
    }
    fn sub(&self, x: &QuadExtElement, y: &QuadExtElement) -> QuadExtElement {
        QuadExtElement { a: self.base.subm(x.a, y.a), b: self.base.subm(x.b, y.b) }
    }
    fn neg(&self, x: &QuadExtElement) -> QuadExtElement {
        QuadExtElement { a: self.base.neg(&x.a), b: self.base.neg(&x.b) }
    }
    fn mul(&self, x: &QuadExtElement, y: &QuadExtElement) -> QuadExtElement {
        let p = self.p() as u128;
        let a = (x.a as u128 * y.a as u128
            + (x.b as u128 * y.b as u128 % p) * self.nonresidue as u128)
            % p;
        let b = (x.a as u128 * y.b as u128 + x.b as u128 * y.a as u128) % p;
        QuadExtElement { a: a as u64, b: b as u64 }
    }
    fn inv(&self, x: &QuadExtElement) -> Option<QuadExtElement> {
        let n_inv = self.base.invm(self.norm(x))?;
        let c = self.conj(x);
        Some(QuadExtElement { a: self.base.mulm(c.a, n_inv), b: self.base.mulm(c.b, n_inv) })
    }
    fn order(&self) -> BigUint {
        BigUint::from(self.p()) * BigUint::from(self.p())
    }
    fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> QuadExtElement {
        QuadExtElement { a: rng.gen_range(0..self.p()), b: rng.gen_range(0..self.p()) }
    }

    /// Schoolbook with one reduction per output coefficient; p < 2^32 keeps
    /// every product inside a u64.
    fn poly_mul(&self, x: &[QuadExtElement], y: &[QuadExtElement]) -> Vec<QuadExtElement> {
        if x.is_empty() || y.is_empty() {
            return Vec::new();
        }
        let p = self.p();
        let terms = x.len().min(y.len()) as u128;
        if 2 * terms * u128::from(p - 1) * u128::from(p - 1) < 1 << 64 {
            convolve::<u64>(x, y, p, self.nonresidue)
        } else {
            convolve::<u128>(x, y, p, self.nonresidue)
        }
    }
}

trait Acc: Copy + Default + std::ops::AddAssign + From<u64> + Into<u128> {}
impl Acc for u64 {}
impl Acc for u128 {}

fn convolve<A: Acc>(x: &[QuadExtElement], y: &[QuadExtElement], p: u64, r: u64) -> Vec<QuadExtElement> {
    let n = x.len() + y.len() - 1;
    let (mut aa, mut bb, mut ab) = (vec![A::default(); n], vec![A::default(); n], vec![A::default(); n]);
    for (i, u) in x.iter().enumerate() {
        if u.a == 0 && u.b == 0 {
            continue;
        }
        for (j, v) in y.iter().enumerate() {
            aa[i + j] += A::from(u.a * v.a);
            bb[i + j] += A::from(u.b * v.b);
            ab[i + j] += A::from(u.a * v.b);
            ab[i + j] += A::from(u.b * v.a);
        }
    }
    let (p, r) = (u128::from(p), u128::from(r));
    (0..n)
        .map(|k| QuadExtElement {
            a: ((aa[k].into() + (bb[k].into() % p) * r) % p) as u64,
            b: (ab[k].into() % p) as u64,
        })
        .collect()
}
