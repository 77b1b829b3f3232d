use super::{DensePoly, Field};
use num_bigint::BigUint;
use rand::Rng;

/// F[z] / (h) for an irreducible monic h over the base field F.
#[derive(Clone, Debug)]
pub struct ExtField<F: Field> {
    base: F,
    modulus: DensePoly<F::Elem>,
    /// Nonzero coefficients of h below its leading term.
    tail: Vec<(usize, F::Elem)>,
    d: usize,
    /// Tr(z^i) for i < d, by Newton's identities.
    power_traces: Vec<F::Elem>,
}

impl<F: Field + Clone> ExtField<F> {
    /// `h` must be monic and irreducible (checked).
    pub fn new(base: F, h: DensePoly<F::Elem>) -> Option<Self> {
        if h.lead() != Some(&base.one()) || !is_irreducible(&base, &h) {
            return None;
        }
        let d = h.degree()?;
        let tail = h.coeffs[..d].iter().cloned().enumerate().filter(|(_, c)| !base.is_zero(c)).collect();
        // p_i = -(i c_{d-i} + Σ_{j<i} c_{d-j} p_{i-j})
        let mut power_traces = vec![base.from_i64(d as i64)];
        for i in 1..d {
            let mut acc = base.mul(&base.from_i64(i as i64), &h.coeffs[d - i]);
            for j in 1..i {
                acc = base.add(&acc, &base.mul(&h.coeffs[d - j], &power_traces[i - j]));
            }
            power_traces.push(base.neg(&acc));
        }
        Some(Self { base, modulus: h, tail, d, power_traces })
    }

    /// Degree-`d` extension with a sparse defining polynomial: trinomials
    /// z^d + a z^j + b with random j, then z^d plus a random tail of degree
    /// < 4, then dense. Single trinomial families such as z^d + z + c have no
    /// irreducible member for many (q, d).
    pub fn with_degree<R: Rng + ?Sized>(base: F, d: usize, rng: &mut R) -> Self {
        assert!(d >= 1);
        if d == 1 {
            let h = DensePoly::x(&base);
            return Self::new(base, h).expect("z is irreducible");
        }
        let attempt = |tail: &[(usize, F::Elem)]| {
            let mut coeffs = vec![base.zero(); d + 1];
            for (i, c) in tail {
                coeffs[*i] = c.clone();
            }
            coeffs[d] = base.one();
            Self::new(base.clone(), DensePoly::new(&base, coeffs))
        };
        for _ in 0..16 * d {
            let j = rng.gen_range(1..d);
            if let Some(e) = attempt(&[(0, base.random(rng)), (j, base.random(rng))]) {
                return e;
            }
        }
        for _ in 0..16 * d {
            let tail: Vec<_> = (0..d.min(4)).map(|i| (i, base.random(rng))).collect();
            if let Some(e) = attempt(&tail) {
                return e;
            }
        }
        loop {
            let tail: Vec<_> = (0..d).map(|i| (i, base.random(rng))).collect();
            if let Some(e) = attempt(&tail) {
                return e;
            }
        }
    }

    pub fn base(&self) -> &F {
        &self.base
    }

    pub fn degree(&self) -> usize {
        self.d
    }

    pub fn embed(&self, c: F::Elem) -> Vec<F::Elem> {
        let mut v = vec![self.base.zero(); self.degree()];
        v[0] = c;
        v
    }

    /// Trace down to the base field.
    pub fn trace(&self, x: &[F::Elem]) -> F::Elem {
        x.iter().zip(&self.power_traces).fold(self.base.zero(), |acc, (c, t)| self.base.add(&acc, &self.base.mul(c, t)))
    }

    /// The element as a base-field constant, if it is one.
    pub fn as_base(&self, x: &[F::Elem]) -> Option<F::Elem> {
        x[1..].iter().all(|c| self.base.is_zero(c)).then(|| x[0].clone())
    }

    fn reduce(&self, mut r: Vec<F::Elem>) -> Vec<F::Elem> {
        let d = self.degree();
        for i in (d..r.len()).rev() {
            let c = r[i].clone();
            if self.base.is_zero(&c) {
                continue;
            }
            for (t, g) in &self.tail {
                let k = i - d + t;
                r[k] = self.base.sub(&r[k], &self.base.mul(&c, g));
            }
        }
        r.resize(d, self.base.zero());
        r
    }
}

impl<F: Field + Clone> Field for ExtField<F> {
    type Elem = Vec<F::Elem>;

    fn zero(&self) -> Self::Elem {
        vec![self.base.zero(); self.degree()]
    }
    fn one(&self) -> Self::Elem {
        self.embed(self.base.one())
    }
    fn from_i64(&self, x: i64) -> Self::Elem {
        self.embed(self.base.from_i64(x))
    }
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        a.iter().zip(b).map(|(x, y)| self.base.add(x, y)).collect()
    }
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        a.iter().zip(b).map(|(x, y)| self.base.sub(x, y)).collect()
    }
    fn neg(&self, a: &Self::Elem) -> Self::Elem {
        a.iter().map(|x| self.base.neg(x)).collect()
    }
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        self.reduce(self.base.poly_mul(a, b))
    }
    fn inv(&self, a: &Self::Elem) -> Option<Self::Elem> {
        let p = DensePoly::new(&self.base, a.clone());
        if p.is_zero() {
            return None;
        }
        let (g, s, _) = p.xgcd(&self.base, &self.modulus);
        if g.degree() != Some(0) {
            return None;
        }
        let mut v = s.coeffs;
        v.resize(self.degree(), self.base.zero());
        Some(v)
    }
    fn order(&self) -> BigUint {
        num_traits::pow(self.base.order(), self.degree())
    }
    fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> Self::Elem {
        (0..self.degree()).map(|_| self.base.random(rng)).collect()
    }
    fn is_zero(&self, a: &Self::Elem) -> bool {
        a.iter().all(|c| self.base.is_zero(c))
    }
}

/// Ben-Or: h of degree d is irreducible iff gcd(x^(q^i) - x, h) = 1 for
/// i ≤ d/2. Stops at the first small factor.
pub fn is_irreducible<F: Field>(f: &F, h: &DensePoly<F::Elem>) -> bool {
    let Some(d) = h.degree() else { return false };
    if d <= 1 {
        return d == 1;
    }
    let h = h.monic(f);
    let q = f.order();
    let x = DensePoly::x(f);
    let mut acc = x.clone();
    for _ in 0..d / 2 {
        acc = acc.powmod(f, &q, &h);
        if h.gcd(f, &acc.sub(f, &x)).degree() != Some(0) {
            return false;
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf::{PrimeFieldCtx, QuadExtCtx};
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn irreducibility() {
        let f = PrimeFieldCtx::new(11).unwrap();
        assert!(is_irreducible(&f, &DensePoly::new(&f, vec![9, 0, 1]))); // x² - 2
        assert!(!is_irreducible(&f, &DensePoly::new(&f, vec![7, 0, 1]))); // x² - 4
        // (x² - 2)² has no roots but is reducible
        let g = DensePoly::new(&f, vec![9, 0, 1]);
        assert!(!is_irreducible(&f, &g.mul(&f, &g)));
    }

    #[test]
    fn extension_order_and_frobenius() {
        let k = QuadExtCtx::new(13).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let e = ExtField::with_degree(k, 3, &mut rng);
        assert_eq!(e.degree(), 3);
        let x = e.random(&mut rng);
        // x^(q^3) = x
        assert_eq!(e.pow(&x, &e.order()), x);
        let c = e.embed(k.from_int(5));
        assert_eq!(e.as_base(&e.mul(&c, &c)), Some(k.from_int(25)));
    }

    proptest! {
        #[test]
        fn field_axioms(seed in 0u64..500) {
            let f = PrimeFieldCtx::new(7).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let e = ExtField::with_degree(f, 4, &mut rng);
            let a = e.random(&mut rng);
            let b = e.random(&mut rng);
            let c = e.random(&mut rng);
            prop_assert_eq!(e.mul(&a, &e.add(&b, &c)), e.add(&e.mul(&a, &b), &e.mul(&a, &c)));
            if !e.is_zero(&a) {
                prop_assert_eq!(e.mul(&a, &e.inv(&a).unwrap()), e.one());
            }
        }
    }
}
