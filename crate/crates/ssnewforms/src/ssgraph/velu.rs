//! ℓ-isogenous j-invariants by Vélu's formulas on the Kummer line.
//!
//! A supersingular curve over F_{p²} with p²-Frobenius equal to the scalar
//! s = ±p has every ℓ-torsion x-coordinate in F_{p^{2k}}, where k is the order
//! of p in (Z/ℓ)^*/{±1}. All ℓ+1 kernels are then enumerated from one basis.

use super::{curve_with_j, GraphError};
use crate::gf::{field_sqrt, ExtField, Field, QuadExtCtx, QuadExtElement};
use num_bigint::BigUint;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

type Ext = ExtField<QuadExtCtx>;
type El = Vec<QuadExtElement>;

/// Projective point (X : Z) on the Kummer line of y² = x³ + ax + b.
#[derive(Clone, Debug)]
struct XPoint {
    x: El,
    z: El,
}

struct Kummer<'a> {
    f: &'a Ext,
    a: El,
    b: El,
}

impl Kummer<'_> {
    fn affine(&self, x: El) -> XPoint {
        XPoint { x, z: self.f.one() }
    }

    fn is_infinity(&self, p: &XPoint) -> bool {
        self.f.is_zero(&p.z)
    }

    fn double(&self, p: &XPoint) -> XPoint {
        let f = self.f;
        let x2 = f.square(&p.x);
        let z2 = f.square(&p.z);
        let xz = f.mul(&p.x, &p.z);
        // (X² - aZ²)² - 8bXZ³
        let t = f.sub(&x2, &f.mul(&self.a, &z2));
        let bxz3 = f.mul(&f.mul(&self.b, &xz), &z2);
        let nx = f.sub(&f.square(&t), &f.mul(&f.from_i64(8), &bxz3));
        // 4Z(X³ + aXZ² + bZ³)
        let cubic = f.add(
            &f.add(&f.mul(&x2, &p.x), &f.mul(&f.mul(&self.a, &p.x), &z2)),
            &f.mul(&f.mul(&self.b, &z2), &p.z),
        );
        let nz = f.mul(&f.from_i64(4), &f.mul(&p.z, &cubic));
        XPoint { x: nx, z: nz }
    }

    /// x(P + Q) from x(P), x(Q) and x(P - Q).
    fn diff_add(&self, p: &XPoint, q: &XPoint, d: &XPoint) -> XPoint {
        let f = self.f;
        let xpzq = f.mul(&p.x, &q.z);
        let xqzp = f.mul(&q.x, &p.z);
        let zz = f.mul(&p.z, &q.z);
        let s = f.add(&xpzq, &xqzp);
        let m = f.add(&f.mul(&p.x, &q.x), &f.mul(&self.a, &zz));
        let n = f.mul(&f.from_i64(2), &f.add(&f.mul(&s, &m), &f.mul(&f.from_i64(2), &f.mul(&self.b, &f.square(&zz)))));
        let den = f.square(&f.sub(&xpzq, &xqzp));
        XPoint { x: f.sub(&f.mul(&n, &d.z), &f.mul(&d.x, &den)), z: f.mul(&den, &d.z) }
    }

    /// Montgomery ladder.
    fn mul(&self, p: &XPoint, n: &BigUint) -> XPoint {
        if n.is_zero() {
            return XPoint { x: self.f.one(), z: self.f.zero() };
        }
        let mut r0 = p.clone();
        let mut r1 = self.double(p);
        for i in (0..n.bits() - 1).rev() {
            if n.bit(i) {
                r0 = self.diff_add(&r0, &r1, p);
                r1 = self.double(&r1);
            } else {
                r1 = self.diff_add(&r0, &r1, p);
                r0 = self.double(&r0);
            }
        }
        r0
    }

    /// Affine x-coordinates of R, 2R, ..., ((ℓ-1)/2)R.
    fn half_multiples(&self, r: &El, ell: u64) -> Option<Vec<El>> {
        let h = ((ell - 1) / 2) as usize;
        let base = self.affine(r.clone());
        let mut pts = vec![base.clone()];
        if h >= 2 {
            pts.push(self.double(&base));
        }
        for m in 2..h {
            let next = self.diff_add(&pts[m - 1], &base, &pts[m - 2]);
            pts.push(next);
        }
        let zs: Vec<El> = pts.iter().map(|p| p.z.clone()).collect();
        let inv = batch_inverse(self.f, &zs)?;
        Some(pts.iter().zip(inv).map(|(p, zi)| self.f.mul(&p.x, &zi)).collect())
    }

    /// Codomain j-invariant of the isogeny with kernel <R>, from the affine
    /// x(rR) for one r in each Frobenius orbit of the half kernel. The power
    /// sums over an orbit are traces down to F_{p²}.
    fn velu_j(&self, k: &QuadExtCtx, (a, b): (QuadExtElement, QuadExtElement), xs: &[El], half: u64) -> Option<QuadExtElement> {
        let f = self.f;
        let (mut s1, mut s2, mut s3) = (k.zero(), k.zero(), k.zero());
        for x in xs {
            let x2 = f.square(x);
            s1 = k.add(&s1, &f.trace(x));
            s2 = k.add(&s2, &f.trace(&x2));
            s3 = k.add(&s3, &f.trace(&f.mul(&x2, x)));
        }
        let c = |n: u64| k.from_int(n as i64);
        let h = c(half);
        // t = Σ 6x² + 2a, w = Σ 10x³ + 6ax + 4b
        let t = k.add(&k.mul(&c(6), &s2), &k.mul(&k.mul(&c(2), &a), &h));
        let w = k.add(&k.add(&k.mul(&c(10), &s3), &k.mul(&k.mul(&c(6), &a), &s1)), &k.mul(&k.mul(&c(4), &b), &h));
        let aa = k.sub(&a, &k.mul(&c(5), &t));
        let bb = k.sub(&b, &k.mul(&c(7), &w));
        let a3 = k.mul(&c(4), &k.mul(&k.square(&aa), &aa));
        let den = k.add(&a3, &k.mul(&c(27), &k.square(&bb)));
        Some(k.mul(&k.mul(&c(1728), &a3), &k.inv(&den)?))
    }

    /// Affine x(rR) for each r in `reps`.
    fn multiples(&self, r: &El, reps: &[u64]) -> Option<Vec<El>> {
        let base = self.affine(r.clone());
        let pts: Vec<XPoint> = reps.iter().map(|&m| self.mul(&base, &BigUint::from(m))).collect();
        let zs: Vec<El> = pts.iter().map(|p| p.z.clone()).collect();
        let inv = batch_inverse(self.f, &zs)?;
        Some(pts.iter().zip(inv).map(|(p, zi)| self.f.mul(&p.x, &zi)).collect())
    }
}

/// One representative in 1..=(ℓ-1)/2 of each coset of <±p> in (Z/ℓ)^*.
fn frobenius_reps(p: u64, ell: u64) -> Vec<u64> {
    let half = (ell - 1) / 2;
    let fold = |x: u64| x.min(ell - x);
    let mut seen = vec![false; half as usize + 1];
    let mut reps = Vec::new();
    for r in 1..=half {
        if seen[r as usize] {
            continue;
        }
        reps.push(r);
        let mut x = r;
        loop {
            seen[fold(x) as usize] = true;
            x = x * (p % ell) % ell;
            if fold(x) == r {
                break;
            }
        }
    }
    reps
}

fn batch_inverse(f: &Ext, xs: &[El]) -> Option<Vec<El>> {
    let mut prefix = Vec::with_capacity(xs.len());
    let mut acc = f.one();
    for x in xs {
        prefix.push(acc.clone());
        acc = f.mul(&acc, x);
    }
    let mut inv = f.inv(&acc)?;
    let mut out = vec![f.zero(); xs.len()];
    for i in (0..xs.len()).rev() {
        out[i] = f.mul(&inv, &prefix[i]);
        inv = f.mul(&inv, &xs[i]);
    }
    Some(out)
}

/// Smallest k ≥ 1 with p^k ≡ ±1 mod ℓ.
pub fn torsion_degree(p: u64, ell: u64) -> usize {
    let mut x = p % ell;
    let mut k = 1;
    while x != 1 && x != ell - 1 {
        x = x * (p % ell) % ell;
        k += 1;
    }
    k
}

/// F_{p^{2d}} over F_{p²}, shared by every vertex and degree that needs it.
fn extension(k: &QuadExtCtx, d: usize) -> Arc<Ext> {
    static CACHE: OnceLock<Mutex<HashMap<(u64, usize), Arc<Ext>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    let key = (k.p(), d);
    if let Some(f) = cache.lock().expect("extension cache").get(&key) {
        return f.clone();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(k.p() ^ (d as u64) << 40);
    let f = Arc::new(ExtField::with_degree(*k, d, &mut rng));
    cache.lock().expect("extension cache").entry(key).or_insert(f).clone()
}

/// Short Weierstrass model over F_{p²} whose p²-Frobenius is ±p (up to
/// quadratic twist, which the Kummer line does not see).
fn scalar_model(k: &QuadExtCtx, j: &QuadExtElement) -> (QuadExtElement, QuadExtElement) {
    if j.is_rational() {
        let (a, b) = curve_with_j(k.base(), j.a);
        return (QuadExtElement::rational(a), QuadExtElement::rational(b));
    }
    let c = k.mul(j, &k.inv(&k.sub(&k.from_int(1728), j)).expect("j != 1728"));
    (k.mul(&k.from_int(3), &c), k.mul(&k.from_int(2), &c))
}

/// A point of exact order ℓ on the Kummer line, as an affine x-coordinate.
fn order_ell_point<R: Rng + ?Sized>(kum: &Kummer, ell: u64, n: &BigUint, rng: &mut R) -> Option<El> {
    let lb = BigUint::from(ell);
    let mut m = n.clone();
    let mut e = 0;
    while (&m % &lb).is_zero() {
        m /= &lb;
        e += 1;
    }
    for _ in 0..200 {
        let x = kum.f.random(rng);
        let mut r = kum.mul(&kum.affine(x), &m);
        for _ in 0..e {
            if kum.is_infinity(&r) {
                break;
            }
            let t = kum.mul(&r, &lb);
            if kum.is_infinity(&t) {
                let zi = kum.f.inv(&r.z)?;
                return Some(kum.f.mul(&r.x, &zi));
            }
            r = t;
        }
    }
    None
}

/// The ℓ+1 j-invariants ℓ-isogenous to `j` (with multiplicity), ℓ odd.
pub fn isogenous_j_invariants<R: Rng + ?Sized>(
    k: &QuadExtCtx,
    j: &QuadExtElement,
    ell: u64,
    rng: &mut R,
) -> Result<Vec<QuadExtElement>, GraphError> {
    let p = k.p();
    if ell < 3 || ell == p || ell % 2 == 0 {
        return Err(GraphError::BadDegree(ell));
    }
    let deg = torsion_degree(p, ell);
    let f = extension(k, deg);
    let f = &*f;
    let (a, b) = scalar_model(k, j);
    let kum = Kummer { f, a: f.embed(a), b: f.embed(b) };
    let fail = || GraphError::NotSplit(*j, 0, (ell + 1) as usize);

    // group exponent on whichever side of the Kummer line carries E[ℓ]
    let pk = num_traits::pow(BigUint::from(p), deg);
    let n = if ((&pk - 1u32) % ell).is_zero() { &pk - 1u32 } else { &pk + 1u32 };

    let xp = order_ell_point(&kum, ell, &n, rng).ok_or_else(fail)?;
    let mp = kum.half_multiples(&xp, ell).ok_or_else(fail)?;
    let xq = loop {
        let c = order_ell_point(&kum, ell, &n, rng).ok_or_else(fail)?;
        if !mp.contains(&c) {
            break c;
        }
    };

    // x(Q + P) is a root of X² - S X + Π
    let fe = f;
    let (x1, x2) = (&xp, &xq);
    let d2 = fe.square(&fe.sub(x1, x2));
    let d2i = fe.inv(&d2).ok_or_else(fail)?;
    let s = fe.mul(
        &fe.mul(
            &fe.from_i64(2),
            &fe.add(&fe.mul(&fe.add(x1, x2), &fe.add(&fe.mul(x1, x2), &kum.a)), &fe.mul(&fe.from_i64(2), &kum.b)),
        ),
        &d2i,
    );
    let prod = fe.mul(
        &fe.sub(&fe.square(&fe.sub(&fe.mul(x1, x2), &kum.a)), &fe.mul(&fe.from_i64(4), &fe.mul(&kum.b, &fe.add(x1, x2)))),
        &d2i,
    );
    let disc = fe.sub(&fe.square(&s), &fe.mul(&fe.from_i64(4), &prod));
    let root = field_sqrt(fe, &disc, rng).ok_or_else(fail)?;
    let two_inv = fe.inv(&fe.from_i64(2)).expect("odd characteristic");
    let xqp = fe.mul(&fe.add(&s, &root), &two_inv);

    // generators Q + iP for i in 0..ℓ, then P
    let p_pt = kum.affine(xp.clone());
    let mut gens = vec![kum.affine(xq), kum.affine(xqp)];
    while gens.len() < ell as usize {
        let n = gens.len();
        let next = kum.diff_add(&gens[n - 1], &p_pt, &gens[n - 2]);
        gens.push(next);
    }
    let zs: Vec<El> = gens.iter().map(|g| g.z.clone()).collect();
    let zi = batch_inverse(fe, &zs).ok_or_else(fail)?;
    let reps = frobenius_reps(p, ell);
    let mut kernels: Vec<Vec<El>> = Vec::with_capacity(ell as usize + 1);
    for (g, z) in gens.iter().zip(zi) {
        kernels.push(kum.multiples(&fe.mul(&g.x, &z), &reps).ok_or_else(fail)?);
    }
    kernels.push(kum.multiples(&xp, &reps).ok_or_else(fail)?);

    kernels.iter().map(|xs| kum.velu_j(k, (a, b), xs, (ell - 1) / 2).ok_or_else(fail)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ssgraph::{build_adjacency, hecke_row, modpoly, SupersingularSet};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn torsion_degrees() {
        assert_eq!(torsion_degree(11, 3), 1);
        assert_eq!(torsion_degree(11, 5), 1); // 11 ≡ 1
        assert_eq!(torsion_degree(2, 7), 3); // 8 ≡ 1
        assert_eq!(torsion_degree(3, 7), 3); // 27 ≡ -1
        for ell in [3u64, 5, 7, 97] {
            for p in [11u64, 13, 101] {
                assert!(torsion_degree(p, ell) as u64 <= (ell - 1) / 2);
            }
        }
    }

    fn sorted(mut v: Vec<QuadExtElement>) -> Vec<QuadExtElement> {
        v.sort();
        v
    }

    #[test]
    fn velu_matches_modular_polynomial() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for p in [11u64, 13, 37, 61, 103] {
            let k = QuadExtCtx::new(p).unwrap();
            let (set, _) = build_adjacency(p, 2, &mut rng).unwrap();
            for ell in [3u64, 5, 7, 11, 13] {
                if ell == p {
                    continue;
                }
                let phi = modpoly::bundled(ell).unwrap().reduce(p);
                for j in &set.vertices {
                    let want = crate::gf::poly_roots(&k, &phi.specialize(&k, j), &mut rng).unwrap();
                    let got = isogenous_j_invariants(&k, j, ell, &mut rng).unwrap();
                    assert_eq!(sorted(got), sorted(want), "p = {p}, ℓ = {ell}, j = {j}");
                }
            }
        }
    }

    #[test]
    fn large_ell_rows_sum_correctly() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let (set, _): (SupersingularSet, _) = build_adjacency(11, 2, &mut rng).unwrap();
        for ell in [17u64, 97] {
            for i in 0..set.len() {
                let row = hecke_row(&set, ell, i, &mut rng).unwrap();
                assert_eq!(row.iter().map(|e| e.1 as u64).sum::<u64>(), ell + 1);
            }
        }
    }
}
