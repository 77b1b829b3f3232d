//! Totally real number fields Q[t]/(h): arithmetic in the power basis, the
//! maximal order by round 2, an LLL-reduced integral basis and real
//! embeddings.

use crate::zpoly::{self, QPoly, ZPoly};
use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type Elem = Vec<BigRational>;

fn q(x: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(x))
}

fn qi(x: &BigInt) -> BigRational {
    BigRational::from_integer(x.clone())
}

#[derive(Clone, Debug)]
pub struct NumberField {
    poly: ZPoly,
    d: usize,
    /// Integral basis, one row per element in power-basis coordinates.
    basis: Vec<Elem>,
    /// Inverse of `basis`, for coordinates.
    basis_inv: Vec<Vec<BigRational>>,
    disc: BigInt,
}

impl NumberField {
    /// `poly` must be monic and irreducible.
    pub fn new(poly: ZPoly) -> Self {
        let d = zpoly::degree(&poly);
        assert!(d >= 1 && poly[d].is_one(), "monic defining polynomial");
        let mut k = Self { poly, d, basis: Vec::new(), basis_inv: Vec::new(), disc: BigInt::zero() };
        let basis = k.maximal_order();
        let basis = k.lll(basis);
        k.set_basis(basis);
        k
    }

    fn set_basis(&mut self, basis: Vec<Elem>) {
        self.basis_inv = rational_inverse(&basis).expect("basis is invertible");
        let gram: Vec<Vec<BigRational>> =
            basis.iter().map(|a| basis.iter().map(|b| self.trace(&self.mul(a, b))).collect()).collect();
        let det = rational_det(&gram);
        assert!(det.is_integer());
        self.disc = det.to_integer();
        self.basis = basis;
    }

    pub fn degree(&self) -> usize {
        self.d
    }

    pub fn poly(&self) -> &ZPoly {
        &self.poly
    }

    pub fn disc(&self) -> &BigInt {
        &self.disc
    }

    pub fn integral_basis(&self) -> &[Elem] {
        &self.basis
    }

    pub fn zero(&self) -> Elem {
        vec![BigRational::zero(); self.d]
    }

    pub fn from_int(&self, x: &BigInt) -> Elem {
        let mut v = self.zero();
        v[0] = qi(x);
        v
    }

    /// The class of t.
    pub fn generator(&self) -> Elem {
        let mut v = self.zero();
        if self.d == 1 {
            v[0] = -qi(&self.poly[0]);
        } else {
            v[1] = BigRational::one();
        }
        v
    }

    pub fn is_zero(&self, a: &Elem) -> bool {
        a.iter().all(Zero::is_zero)
    }

    pub fn add(&self, a: &Elem, b: &Elem) -> Elem {
        a.iter().zip(b).map(|(x, y)| x + y).collect()
    }

    pub fn sub(&self, a: &Elem, b: &Elem) -> Elem {
        a.iter().zip(b).map(|(x, y)| x - y).collect()
    }

    pub fn scale(&self, a: &Elem, c: &BigRational) -> Elem {
        a.iter().map(|x| x * c).collect()
    }

    pub fn mul(&self, a: &Elem, b: &Elem) -> Elem {
        let mut prod = vec![BigRational::zero(); 2 * self.d - 1];
        for (i, x) in a.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                prod[i + j] += x * y;
            }
        }
        self.reduce(prod)
    }

    fn reduce(&self, mut p: Vec<BigRational>) -> Elem {
        let d = self.d;
        for i in (d..p.len()).rev() {
            let c = std::mem::take(&mut p[i]);
            if c.is_zero() {
                continue;
            }
            for k in 0..d {
                p[i - d + k] -= &c * qi(&self.poly[k]);
            }
        }
        p.resize(d, BigRational::zero());
        p
    }

    pub fn inv(&self, a: &Elem) -> Option<Elem> {
        if self.is_zero(a) {
            return None;
        }
        let m: Vec<Vec<BigRational>> = (0..self.d)
            .map(|i| {
                let mut e = self.zero();
                e[i] = BigRational::one();
                self.mul(a, &e)
            })
            .collect();
        // rows of m are a·t^i; solve x·m = 1
        let inv = rational_inverse(&m)?;
        Some(inv[0].clone())
    }

    pub fn div(&self, a: &Elem, b: &Elem) -> Option<Elem> {
        Some(self.mul(a, &self.inv(b)?))
    }

    /// Tr(a) via the power sums of the roots of h.
    pub fn trace(&self, a: &Elem) -> BigRational {
        let s = power_sums(&self.poly, self.d);
        a.iter().zip(&s).map(|(x, y)| x * qi(y)).sum()
    }

    /// Coordinates in the integral basis.
    pub fn coords(&self, a: &Elem) -> Vec<BigRational> {
        (0..self.d).map(|j| a.iter().zip(&self.basis_inv).map(|(x, row)| x * &row[j]).sum()).collect()
    }

    pub fn integral_coords(&self, a: &Elem) -> Option<Vec<BigInt>> {
        self.coords(a).into_iter().map(|c| c.is_integer().then(|| c.to_integer())).collect()
    }

    pub fn from_coords(&self, c: &[BigInt]) -> Elem {
        let mut out = self.zero();
        for (ci, w) in c.iter().zip(&self.basis) {
            out = self.add(&out, &self.scale(w, &qi(ci)));
        }
        out
    }

    /// Minimal polynomial of a over Q, via the characteristic polynomial of
    /// multiplication by a.
    pub fn charpoly(&self, a: &Elem) -> QPoly {
        let m: Vec<Vec<BigRational>> = (0..self.d)
            .map(|i| {
                let mut e = self.zero();
                e[i] = BigRational::one();
                self.mul(a, &e)
            })
            .collect();
        rational_charpoly(&m)
    }

    /// Real roots of h, ascending (all roots are real for Hecke fields).
    pub fn embeddings(&self) -> Vec<f64> {
        real_roots(&self.poly)
    }

    /// Images of a under the real embeddings, in the order of `embeddings`.
    pub fn embed(&self, a: &Elem, roots: &[f64]) -> Vec<f64> {
        roots
            .iter()
            .map(|&r| a.iter().rev().fold(0.0, |acc, c| acc * r + c.to_f64().unwrap_or(f64::NAN)))
            .collect()
    }

    fn mult_table(&self, basis: &[Elem], inv: &[Vec<BigRational>]) -> Vec<Vec<Vec<BigInt>>> {
        let d = self.d;
        let to_coords = |x: &Elem| -> Vec<BigInt> {
            (0..d)
                .map(|j| {
                    let c: BigRational = x.iter().zip(inv).map(|(a, row)| a * &row[j]).sum();
                    assert!(c.is_integer(), "order is not closed under multiplication");
                    c.to_integer()
                })
                .collect()
        };
        (0..d).map(|i| (0..d).map(|j| to_coords(&self.mul(&basis[i], &basis[j]))).collect()).collect()
    }

    /// Round 2: enlarge Z[t] at every prime whose square divides disc(h).
    fn maximal_order(&self) -> Vec<Elem> {
        let d = self.d;
        let mut basis: Vec<Elem> = (0..d)
            .map(|i| {
                let mut e = self.zero();
                e[i] = BigRational::one();
                e
            })
            .collect();
        if d == 1 {
            return basis;
        }
        let disc = zpoly::discriminant(&self.poly);
        for (pr, e) in factor_integer(&disc) {
            if e < 2 {
                continue;
            }
            let pr = pr.to_u64().expect("prime factor of a small discriminant");
            loop {
                match self.enlarge_at(&basis, pr) {
                    Some(b) => basis = b,
                    None => break,
                }
            }
        }
        basis
    }

    /// One round-2 step at the prime q, or None if the order is q-maximal.
    fn enlarge_at(&self, basis: &[Elem], qq: u64) -> Option<Vec<Elem>> {
        let d = self.d;
        let inv = rational_inverse(basis).expect("basis");
        let table = self.mult_table(basis, &inv);
        let modq = |x: &BigInt| -> u64 { x.mod_floor(&BigInt::from(qq)).to_u64().expect("small") };
        let mul_mod = |a: &[u64], b: &[u64]| -> Vec<u64> {
            let mut out = vec![0u64; d];
            for i in 0..d {
                if a[i] == 0 {
                    continue;
                }
                for j in 0..d {
                    if b[j] == 0 {
                        continue;
                    }
                    for k in 0..d {
                        let t = modq(&table[i][j][k]);
                        out[k] = (out[k] + a[i] * b[j] % qq * t) % qq;
                    }
                }
            }
            out
        };
        // radical: kernel of x ↦ x^(q^k) on O/qO with q^k ≥ d
        let mut qk = qq;
        while (qk as usize) < d {
            qk *= qq;
        }
        let frob: Vec<Vec<u64>> = (0..d)
            .map(|i| {
                let mut e = vec![0u64; d];
                e[i] = 1;
                let mut acc = one_coords(&inv, d, qq);
                let mut base = e;
                let mut n = qk;
                while n > 0 {
                    if n & 1 == 1 {
                        acc = mul_mod(&acc, &base);
                    }
                    base = mul_mod(&base, &base);
                    n >>= 1;
                }
                acc
            })
            .collect();
        let kernel = left_kernel_mod(&frob, qq);
        let mut gens: Vec<Vec<BigInt>> = kernel.iter().map(|v| v.iter().map(|&x| BigInt::from(x)).collect()).collect();
        for i in 0..d {
            let mut e = vec![BigInt::zero(); d];
            e[i] = BigInt::from(qq);
            gens.push(e);
        }
        let ideal = hnf(&gens, d);
        let ideal_q: Vec<Vec<BigRational>> = ideal.iter().map(|r| r.iter().map(qi).collect()).collect();
        let ideal_inv = rational_inverse(&ideal_q).expect("full-rank ideal");
        // y ∈ O with y·I ⊆ qI: linear conditions mod q on the coordinates of y
        let mut cond: Vec<Vec<u64>> = vec![Vec::new(); d];
        for (i, row) in cond.iter_mut().enumerate() {
            for beta in &ideal {
                // ω_i β in O-coordinates, then in I-coordinates
                let mut prod = vec![BigInt::zero(); d];
                for (j, bj) in beta.iter().enumerate() {
                    for k in 0..d {
                        prod[k] += bj * &table[i][j][k];
                    }
                }
                for k in 0..d {
                    let c: BigRational = prod.iter().zip(&ideal_inv).map(|(x, r)| qi(x) * &r[k]).sum();
                    assert!(c.is_integer());
                    row.push(modq(&c.to_integer()));
                }
            }
        }
        let kernel = left_kernel_mod(&cond, qq);
        if kernel.is_empty() {
            return None;
        }
        let mut gens: Vec<Vec<BigInt>> = kernel.iter().map(|v| v.iter().map(|&x| BigInt::from(x)).collect()).collect();
        for i in 0..d {
            let mut e = vec![BigInt::zero(); d];
            e[i] = BigInt::from(qq);
            gens.push(e);
        }
        let h = hnf(&gens, d);
        let qinv = BigRational::new(BigInt::one(), BigInt::from(qq));
        Some(
            h.iter()
                .map(|row| {
                    let mut e = self.zero();
                    for (c, w) in row.iter().zip(basis) {
                        e = self.add(&e, &self.scale(w, &(qi(c) * &qinv)));
                    }
                    e
                })
                .collect(),
        )
    }

    /// LLL with respect to the trace form Tr(xy) (positive definite for
    /// totally real fields), δ = 3/4.
    fn lll(&self, mut b: Vec<Elem>) -> Vec<Elem> {
        let n = b.len();
        if n <= 1 {
            return b;
        }
        let ip = |x: &Elem, y: &Elem| self.trace(&self.mul(x, y));
        let delta = BigRational::new(BigInt::from(3), BigInt::from(4));
        let mut k = 1;
        let gso = |b: &[Elem]| -> (Vec<Vec<BigRational>>, Vec<BigRational>) {
            let n = b.len();
            let mut mu = vec![vec![BigRational::zero(); n]; n];
            let mut bstar: Vec<Vec<BigRational>> = Vec::with_capacity(n);
            let mut norms: Vec<BigRational> = Vec::with_capacity(n);
            // Gram–Schmidt on coefficient vectors under the Gram matrix
            let gram: Vec<Vec<BigRational>> = b.iter().map(|x| b.iter().map(|y| ip(x, y)).collect()).collect();
            for i in 0..n {
                // b*_i = b_i - Σ μ_ij b*_j, tracked in the b-basis
                let mut v = vec![BigRational::zero(); n];
                v[i] = BigRational::one();
                for j in 0..i {
                    let num: BigRational = (0..n).map(|t| &bstar[j][t] * &gram[i][t]).sum();
                    mu[i][j] = num / &norms[j];
                    for t in 0..n {
                        let s = &mu[i][j] * &bstar[j][t];
                        v[t] -= s;
                    }
                }
                let norm: BigRational =
                    (0..n).map(|s| (0..n).map(|t| &v[s] * &v[t] * &gram[s][t]).sum::<BigRational>()).sum();
                bstar.push(v);
                norms.push(norm);
            }
            (mu, norms)
        };
        let mut guard = 0;
        while k < n && guard < 10_000 {
            guard += 1;
            let (mu, _) = gso(&b);
            for j in (0..k).rev() {
                let r = mu[k][j].round();
                if !r.is_zero() {
                    let bj = b[j].clone();
                    b[k] = self.sub(&b[k], &self.scale(&bj, &r));
                }
            }
            let (mu, norms) = gso(&b);
            let lhs = &norms[k];
            let rhs = (&delta - &mu[k][k - 1] * &mu[k][k - 1]) * &norms[k - 1];
            if *lhs >= rhs {
                k += 1;
            } else {
                b.swap(k, k - 1);
                k = (k - 1).max(1);
            }
        }
        b
    }
}

fn one_coords(inv: &[Vec<BigRational>], d: usize, qq: u64) -> Vec<u64> {
    let mut one = vec![BigRational::zero(); d];
    one[0] = BigRational::one();
    (0..d)
        .map(|j| {
            let c: BigRational = one.iter().zip(inv).map(|(a, row)| a * &row[j]).sum();
            c.to_integer().mod_floor(&BigInt::from(qq)).to_u64().expect("small")
        })
        .collect()
}

/// Left kernel {x : x·M ≡ 0 mod q} of a d×m matrix, for any prime q.
pub(crate) fn left_kernel_mod(m: &[Vec<u64>], qq: u64) -> Vec<Vec<u64>> {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    // row-reduce Mᵀ (cols × rows)
    let mut a: Vec<Vec<u64>> = (0..cols).map(|j| (0..rows).map(|i| m[i][j] % qq).collect()).collect();
    let inv = |x: u64| -> u64 {
        let (mut r, mut b, mut e) = (1u64, x % qq, qq - 2);
        while e > 0 {
            if e & 1 == 1 {
                r = r * b % qq;
            }
            b = b * b % qq;
            e >>= 1;
        }
        r
    };
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..rows {
        let Some(pr) = (r..cols).find(|&i| a[i][c] != 0) else {
            continue;
        };
        a.swap(r, pr);
        let iv = inv(a[r][c]);
        a[r].iter_mut().for_each(|x| *x = *x * iv % qq);
        let prow = a[r].clone();
        for (i, row) in a.iter_mut().enumerate() {
            if i != r && row[c] != 0 {
                let k = row[c];
                for (x, &y) in row.iter_mut().zip(&prow) {
                    *x = (*x + qq - k * y % qq) % qq;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    (0..rows)
        .filter(|c| !pivots.contains(c))
        .map(|fc| {
            let mut v = vec![0u64; rows];
            v[fc] = 1;
            for (i, &pc) in pivots.iter().enumerate() {
                v[pc] = (qq - a[i][fc]) % qq;
            }
            v
        })
        .collect()
}

/// Row Hermite normal form of the lattice generated by `gens` (full rank d).
pub fn hnf(gens: &[Vec<BigInt>], d: usize) -> Vec<Vec<BigInt>> {
    let mut a: Vec<Vec<BigInt>> = gens.to_vec();
    let mut out = Vec::with_capacity(d);
    for col in 0..d {
        // gcd-reduce column `col` among remaining rows
        loop {
            let mut nz: Vec<usize> = (0..a.len()).filter(|&i| !a[i][col].is_zero()).collect();
            if nz.len() <= 1 {
                break;
            }
            nz.sort_by_key(|&i| a[i][col].abs());
            let p = nz[0];
            for &i in &nz[1..] {
                let qt = a[i][col].div_floor(&a[p][col]);
                let prow = a[p].clone();
                for (x, y) in a[i].iter_mut().zip(&prow) {
                    *x -= &qt * y;
                }
            }
        }
        let Some(pi) = (0..a.len()).find(|&i| !a[i][col].is_zero()) else {
            panic!("lattice is not of full rank");
        };
        let mut row = a.remove(pi);
        if row[col].is_negative() {
            row.iter_mut().for_each(|x| *x = -&*x);
        }
        out.push(row);
    }
    // reduce above the diagonal
    for i in 0..d {
        for k in 0..i {
            let qt = out[k][i].div_floor(&out[i][i]);
            if !qt.is_zero() {
                let r = out[i].clone();
                for (x, y) in out[k].iter_mut().zip(&r) {
                    *x -= &qt * y;
                }
            }
        }
    }
    out
}

pub fn rational_inverse(m: &[Vec<BigRational>]) -> Option<Vec<Vec<BigRational>>> {
    let n = m.len();
    let mut a: Vec<Vec<BigRational>> = m
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut row = r.clone();
            row.extend((0..n).map(|j| if i == j { BigRational::one() } else { BigRational::zero() }));
            row
        })
        .collect();
    for c in 0..n {
        let p = (c..n).find(|&r| !a[r][c].is_zero())?;
        a.swap(c, p);
        let inv = BigRational::one() / &a[c][c];
        for x in a[c].iter_mut() {
            *x *= &inv;
        }
        for r in 0..n {
            if r != c && !a[r][c].is_zero() {
                let fct = a[r][c].clone();
                let pr = a[c].clone();
                for (x, y) in a[r].iter_mut().zip(&pr) {
                    *x -= &fct * y;
                }
            }
        }
    }
    Some(a.into_iter().map(|r| r[n..].to_vec()).collect())
}

pub fn rational_det(m: &[Vec<BigRational>]) -> BigRational {
    let n = m.len();
    let mut a = m.to_vec();
    let mut det = BigRational::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&r| !a[r][c].is_zero()) else {
            return BigRational::zero();
        };
        if p != c {
            a.swap(c, p);
            det = -det;
        }
        det *= &a[c][c];
        for r in c + 1..n {
            if !a[r][c].is_zero() {
                let fct = &a[r][c] / &a[c][c];
                let pr = a[c].clone();
                for (x, y) in a[r].iter_mut().zip(&pr) {
                    *x -= &fct * y;
                }
            }
        }
    }
    det
}

/// Characteristic polynomial by Faddeev–LeVerrier over Q (lowest first).
pub fn rational_charpoly(m: &[Vec<BigRational>]) -> QPoly {
    let n = m.len();
    let mut coeffs = vec![BigRational::zero(); n + 1];
    coeffs[n] = BigRational::one();
    let mut mk: Vec<Vec<BigRational>> = vec![vec![BigRational::zero(); n]; n];
    for k in 1..=n {
        // M_k = A M_{k-1} + c_{n-k+1} I
        let mut next = vec![vec![BigRational::zero(); n]; n];
        for i in 0..n {
            for j in 0..n {
                let mut s = BigRational::zero();
                for t in 0..n {
                    s += &m[i][t] * &mk[t][j];
                }
                next[i][j] = s;
            }
            next[i][i] += &coeffs[n - k + 1];
        }
        mk = next;
        let mut tr = BigRational::zero();
        for i in 0..n {
            for t in 0..n {
                tr += &m[i][t] * &mk[t][i];
            }
        }
        coeffs[n - k] = -tr / q(k as i64);
    }
    coeffs
}

/// Σ θ_i^k for k < n over the roots θ_i of a monic h (Newton's identities).
fn power_sums(h: &[BigInt], n: usize) -> Vec<BigInt> {
    let d = zpoly::degree(h);
    // e-coefficients: h = t^d + a_{d-1} t^{d-1} + ...
    let a = |i: usize| -> BigInt { if i <= d { h[d - i].clone() } else { BigInt::zero() } };
    let mut s: Vec<BigInt> = vec![BigInt::from(d)];
    for k in 1..n {
        let mut v = -BigInt::from(k) * a(k);
        for i in 1..k {
            v -= a(i) * &s[k - i];
        }
        s.push(v);
    }
    s
}

/// Real roots of a squarefree integer polynomial with only real roots, by
/// Sturm-free bisection on sign changes of the derivative chain.
pub fn real_roots(h: &[BigInt]) -> Vec<f64> {
    let c: Vec<f64> = h.iter().map(|x| x.to_f64().unwrap_or(f64::NAN)).collect();
    let d = c.len() - 1;
    let bound = 1.0 + c[..d].iter().map(|x| (x / c[d]).abs()).fold(0.0, f64::max);
    roots_in(&c, -bound, bound)
}

fn eval_f(c: &[f64], x: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &a| acc * x + a)
}

fn roots_in(c: &[f64], lo: f64, hi: f64) -> Vec<f64> {
    let d = c.len() - 1;
    if d == 0 {
        return Vec::new();
    }
    if d == 1 {
        return vec![-c[0] / c[1]];
    }
    let dc: Vec<f64> = c.iter().enumerate().skip(1).map(|(i, &a)| a * i as f64).collect();
    let mut cuts = vec![lo];
    cuts.extend(roots_in(&dc, lo, hi));
    cuts.push(hi);
    let mut out = Vec::new();
    for w in cuts.windows(2) {
        let (mut a, mut b) = (w[0], w[1]);
        let (fa, fb) = (eval_f(c, a), eval_f(c, b));
        if fa == 0.0 {
            out.push(a);
            continue;
        }
        if fa.signum() == fb.signum() {
            // double root touching the axis at a critical point
            if fb.abs() < 1e-9 {
                out.push(b);
            }
            continue;
        }
        for _ in 0..64 {
            let m = 0.5 * (a + b);
            let fm = eval_f(c, m);
            if fm.signum() == fa.signum() {
                a = m;
            } else {
                b = m;
            }
        }
        out.push(0.5 * (a + b));
    }
    out.dedup_by(|x, y| (*x - *y).abs() < 1e-12);
    out
}

/// Prime factorization of |n| (n ≠ 0): trial division, then Pollard–Brent.
pub fn factor_integer(n: &BigInt) -> Vec<(BigInt, u32)> {
    let mut n = n.abs();
    let mut out: Vec<(BigInt, u32)> = Vec::new();
    if n.is_zero() {
        return out;
    }
    let push = |p: BigInt, out: &mut Vec<(BigInt, u32)>| match out.iter_mut().find(|e| e.0 == p) {
        Some(e) => e.1 += 1,
        None => out.push((p, 1)),
    };
    let mut p = 2u64;
    while p < 100_000 {
        let bp = BigInt::from(p);
        if &bp * &bp > n {
            break;
        }
        while (&n % &bp).is_zero() {
            n /= &bp;
            push(bp.clone(), &mut out);
        }
        p += if p == 2 { 1 } else { 2 };
    }
    let mut stack = vec![n];
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    while let Some(m) = stack.pop() {
        if m.is_one() {
            continue;
        }
        if is_probable_prime(&m) {
            push(m, &mut out);
            continue;
        }
        let f = pollard_brent(&m, &mut rng);
        stack.push(&m / &f);
        stack.push(f);
    }
    out.sort();
    out
}

fn is_probable_prime(n: &BigInt) -> bool {
    let n = n.to_biguint().expect("positive");
    if n < BigUint::from(2u32) {
        return false;
    }
    for p in [2u32, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == BigUint::from(p) {
            return true;
        }
        if (&n % p).is_zero() {
            return false;
        }
    }
    let one = BigUint::one();
    let nm1 = &n - &one;
    let s = nm1.trailing_zeros().unwrap_or(0);
    let d = &nm1 >> s;
    'witness: for a in [2u32, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = BigUint::from(a).modpow(&d, &n);
        if x == one || x == nm1 {
            continue;
        }
        for _ in 1..s {
            x = x.modpow(&BigUint::from(2u32), &n);
            if x == nm1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn pollard_brent(n: &BigInt, rng: &mut ChaCha8Rng) -> BigInt {
    if n.is_even() {
        return BigInt::from(2);
    }
    loop {
        let c = BigInt::from(rng.gen::<u64>()) % n + 1u32;
        let mut y = BigInt::from(rng.gen::<u64>()) % n;
        let mut g = BigInt::one();
        let mut r = 1u64;
        let mut qq = BigInt::one();
        let mut x = y.clone();
        let mut ys = y.clone();
        while g.is_one() {
            x = y.clone();
            for _ in 0..r {
                y = (&y * &y + &c) % n;
            }
            let mut k = 0;
            while k < r && g.is_one() {
                ys = y.clone();
                for _ in 0..(128.min(r - k)) {
                    y = (&y * &y + &c) % n;
                    qq = (&qq * (&x - &y).abs()) % n;
                }
                g = qq.gcd(n);
                k += 128;
            }
            r *= 2;
        }
        if &g == n {
            loop {
                ys = (&ys * &ys + &c) % n;
                g = (&x - &ys).abs().gcd(n);
                if !g.is_one() {
                    break;
                }
            }
        }
        if &g != n {
            return g;
        }
    }
}
