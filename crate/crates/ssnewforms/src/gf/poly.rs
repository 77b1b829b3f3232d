//! Dense univariate polynomials over any [`Field`].

use super::{Field, GfError};
use num_bigint::BigUint;

/// Coefficients lowest degree first, with no trailing zeros (the zero
/// polynomial has no coefficients).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DensePoly<E> {
    pub coeffs: Vec<E>,
}

impl<E: Clone + PartialEq> DensePoly<E> {
    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn lead(&self) -> Option<&E> {
        self.coeffs.last()
    }

    pub fn coeff(&self, i: usize) -> Option<&E> {
        self.coeffs.get(i)
    }
}

impl<E: Clone + PartialEq + Eq + std::fmt::Debug> DensePoly<E> {
    pub fn new<F: Field<Elem = E>>(f: &F, mut coeffs: Vec<E>) -> Self {
        while coeffs.last().is_some_and(|c| f.is_zero(c)) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn constant<F: Field<Elem = E>>(f: &F, c: E) -> Self {
        Self::new(f, vec![c])
    }

    pub fn one<F: Field<Elem = E>>(f: &F) -> Self {
        Self { coeffs: vec![f.one()] }
    }

    /// The polynomial x.
    pub fn x<F: Field<Elem = E>>(f: &F) -> Self {
        Self { coeffs: vec![f.zero(), f.one()] }
    }

    /// x - c
    pub fn linear<F: Field<Elem = E>>(f: &F, c: &E) -> Self {
        Self { coeffs: vec![f.neg(c), f.one()] }
    }

    /// Monic polynomial with the given roots (with repetition).
    pub fn from_roots<F: Field<Elem = E>>(f: &F, roots: &[E]) -> Self {
        roots.iter().fold(Self::one(f), |acc, r| acc.mul(f, &Self::linear(f, r)))
    }

    pub fn add<F: Field<Elem = E>>(&self, f: &F, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let z = f.zero();
        let c = (0..n)
            .map(|i| f.add(self.coeffs.get(i).unwrap_or(&z), other.coeffs.get(i).unwrap_or(&z)))
            .collect();
        Self::new(f, c)
    }

    pub fn sub<F: Field<Elem = E>>(&self, f: &F, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let z = f.zero();
        let c = (0..n)
            .map(|i| f.sub(self.coeffs.get(i).unwrap_or(&z), other.coeffs.get(i).unwrap_or(&z)))
            .collect();
        Self::new(f, c)
    }

    pub fn neg<F: Field<Elem = E>>(&self, f: &F) -> Self {
        Self { coeffs: self.coeffs.iter().map(|c| f.neg(c)).collect() }
    }

    pub fn scale<F: Field<Elem = E>>(&self, f: &F, s: &E) -> Self {
        Self::new(f, self.coeffs.iter().map(|c| f.mul(c, s)).collect())
    }

    pub fn mul<F: Field<Elem = E>>(&self, f: &F, other: &Self) -> Self {
        Self::new(f, f.poly_mul(&self.coeffs, &other.coeffs))
    }

    /// Multiply by x^k.
    pub fn shift(&self, k: usize, zero: E) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let mut c = vec![zero; k];
        c.extend(self.coeffs.iter().cloned());
        Self { coeffs: c }
    }

    pub fn eval<F: Field<Elem = E>>(&self, f: &F, x: &E) -> E {
        self.coeffs.iter().rev().fold(f.zero(), |acc, c| f.add(&f.mul(&acc, x), c))
    }

    pub fn derivative<F: Field<Elem = E>>(&self, f: &F) -> Self {
        let c = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| f.mul(c, &f.from_i64(i as i64)))
            .collect();
        Self::new(f, c)
    }

    pub fn monic<F: Field<Elem = E>>(&self, f: &F) -> Self {
        match self.lead() {
            None => self.clone(),
            Some(l) => {
                let inv = f.inv(l).expect("leading coefficient is nonzero");
                self.scale(f, &inv)
            }
        }
    }

    /// Euclidean division: `self = q * d + r` with `deg r < deg d`.
    pub fn divrem<F: Field<Elem = E>>(&self, f: &F, d: &Self) -> Result<(Self, Self), GfError> {
        let dl = d.lead().ok_or(GfError::DivisionByZero)?;
        let dn = d.coeffs.len();
        if self.coeffs.len() < dn {
            return Ok((Self::zero(), self.clone()));
        }
        let inv = f.inv(dl).ok_or(GfError::DivisionByZero)?;
        let mut r = self.coeffs.clone();
        let mut q = vec![f.zero(); r.len() - dn + 1];
        for i in (0..q.len()).rev() {
            let c = f.mul(&r[i + dn - 1], &inv);
            if f.is_zero(&c) {
                continue;
            }
            for (j, dc) in d.coeffs.iter().enumerate() {
                r[i + j] = f.sub(&r[i + j], &f.mul(&c, dc));
            }
            q[i] = c;
        }
        r.truncate(dn - 1);
        Ok((Self::new(f, q), Self::new(f, r)))
    }

    pub fn rem<F: Field<Elem = E>>(&self, f: &F, d: &Self) -> Result<Self, GfError> {
        Ok(self.divrem(f, d)?.1)
    }

    /// Exact division; `None` if the remainder is nonzero.
    pub fn div_exact<F: Field<Elem = E>>(&self, f: &F, d: &Self) -> Option<Self> {
        let (q, r) = self.divrem(f, d).ok()?;
        r.is_zero().then_some(q)
    }

    /// Monic greatest common divisor (zero if both inputs are zero).
    pub fn gcd<F: Field<Elem = E>>(&self, f: &F, other: &Self) -> Self {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let r = a.rem(f, &b).expect("nonzero divisor");
            a = b;
            b = r;
        }
        a.monic(f)
    }

    /// Extended gcd: returns (g, s, t) with s*self + t*other = g, g monic.
    pub fn xgcd<F: Field<Elem = E>>(&self, f: &F, other: &Self) -> (Self, Self, Self) {
        let (mut r0, mut r1) = (self.clone(), other.clone());
        let (mut s0, mut s1) = (Self::one(f), Self::zero());
        let (mut t0, mut t1) = (Self::zero(), Self::one(f));
        while !r1.is_zero() {
            let (q, r) = r0.divrem(f, &r1).expect("nonzero divisor");
            r0 = std::mem::replace(&mut r1, r);
            let s = s0.sub(f, &q.mul(f, &s1));
            s0 = std::mem::replace(&mut s1, s);
            let t = t0.sub(f, &q.mul(f, &t1));
            t0 = std::mem::replace(&mut t1, t);
        }
        match r0.lead().cloned() {
            None => (r0, s0, t0),
            Some(l) => {
                let inv = f.inv(&l).expect("nonzero");
                (r0.scale(f, &inv), s0.scale(f, &inv), t0.scale(f, &inv))
            }
        }
    }

    pub fn mulmod<F: Field<Elem = E>>(&self, f: &F, other: &Self, m: &Self) -> Self {
        self.mul(f, other).rem(f, m).expect("nonzero modulus")
    }

    pub fn powmod<F: Field<Elem = E>>(&self, f: &F, e: &BigUint, m: &Self) -> Self {
        let base = self.rem(f, m).expect("nonzero modulus");
        let mut acc = Self::one(f).rem(f, m).expect("nonzero modulus");
        for i in (0..e.bits()).rev() {
            acc = acc.mulmod(f, &acc, m);
            if e.bit(i) {
                acc = acc.mulmod(f, &base, m);
            }
        }
        acc
    }

    /// Evaluate `self` at the polynomial `g`, modulo `m` (Horner).
    pub fn compose_mod<F: Field<Elem = E>>(&self, f: &F, g: &Self, m: &Self) -> Self {
        let mut acc = Self::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc.mulmod(f, g, m).add(f, &Self::constant(f, c.clone()));
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf::PrimeFieldCtx;
    use proptest::prelude::*;

    fn p(f: &PrimeFieldCtx, c: &[i64]) -> DensePoly<u64> {
        DensePoly::new(f, c.iter().map(|&x| f.reduce_i64(x)).collect())
    }

    #[test]
    fn textbook_examples() {
        let f = PrimeFieldCtx::new(101).unwrap();
        let g = p(&f, &[-1, 0, 1]).gcd(&f, &p(&f, &[-1, 1]));
        assert_eq!(g, p(&f, &[-1, 1]));
        let (q, r) = p(&f, &[0, 0, 0, 1]).divrem(&f, &p(&f, &[-1, 1])).unwrap();
        assert_eq!(q, p(&f, &[1, 1, 1]));
        assert_eq!(r, p(&f, &[1]));
        let f11 = PrimeFieldCtx::new(11).unwrap();
        assert_eq!(p(&f11, &[-1, 3, -3, 1]).eval(&f11, &1), 0);
        assert!(p(&f, &[1, 2]).divrem(&f, &DensePoly::zero()).is_err());
    }

    fn arb_poly() -> impl Strategy<Value = Vec<i64>> {
        proptest::collection::vec(-50i64..50, 0..12)
    }

    proptest! {
        #[test]
        fn gcd_divides_and_is_greatest(a in arb_poly(), b in arb_poly(), c in arb_poly()) {
            let f = PrimeFieldCtx::new(97).unwrap();
            let (a, b, c) = (p(&f, &a), p(&f, &b), p(&f, &c));
            let ac = a.mul(&f, &c);
            let bc = b.mul(&f, &c);
            let g = ac.gcd(&f, &bc);
            if !g.is_zero() {
                prop_assert!(ac.rem(&f, &g).unwrap().is_zero());
                prop_assert!(bc.rem(&f, &g).unwrap().is_zero());
                // common divisor c divides the gcd
                if !c.is_zero() {
                    prop_assert!(g.rem(&f, &c).unwrap().is_zero());
                }
            }
            let (g2, s, t) = ac.xgcd(&f, &bc);
            prop_assert_eq!(&g2, &g);
            prop_assert_eq!(s.mul(&f, &ac).add(&f, &t.mul(&f, &bc)), g);
        }

        #[test]
        fn divrem_reconstructs(a in arb_poly(), d in arb_poly()) {
            let f = PrimeFieldCtx::new(97).unwrap();
            let (a, d) = (p(&f, &a), p(&f, &d));
            prop_assume!(!d.is_zero());
            let (q, r) = a.divrem(&f, &d).unwrap();
            prop_assert!(r.degree().map_or(true, |rd| rd < d.degree().unwrap()));
            prop_assert_eq!(q.mul(&f, &d).add(&f, &r), a);
        }
    }
}
