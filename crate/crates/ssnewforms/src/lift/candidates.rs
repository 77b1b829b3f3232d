//! Monic integer irreducible polynomials whose roots are all real and lie in
//! [-2√2, 2√2]: every possible minimal polynomial of a_2.

use crate::zpoly::{self, ZPoly};
use num_bigint::{BigInt, Sign};
use std::sync::OnceLock;

pub const MAX_DEGREE: usize = 6;
const A: f64 = 2.828_427_124_746_190_3;
const SLACK: f64 = 1e-7;

/// Candidates of degree `d`, in lexicographic order of (c_1, ..., c_d) where
/// f = t^d + c_1 t^(d-1) + ... + c_d.
pub fn enumerate_candidates(d: usize) -> &'static [ZPoly] {
    assert!((1..=MAX_DEGREE).contains(&d), "degree {d} out of range");
    static CACHE: [OnceLock<Vec<ZPoly>>; MAX_DEGREE] = [const { OnceLock::new() }; MAX_DEGREE];
    CACHE[d - 1].get_or_init(|| {
        real_rooted(d)
            .into_iter()
            .map(|c| zpoly::from_i64(&c))
            .filter(|f| certified_in_range(f) || zpoly::count_roots_in_sqrt_interval(f, 8) == d)
            .filter(|f| !has_small_factor(f))
            .collect()
    })
}

/// Whether f (real-rooted in range) has a factor of degree ≤ deg f / 2;
/// such a factor is itself a candidate of lower degree.
pub fn has_small_factor(f: &[BigInt]) -> bool {
    let d = zpoly::degree(f);
    let Some(fi) = f.iter().map(i64::try_from).collect::<Result<Vec<i64>, _>>().ok() else {
        return (1..=d / 2).any(|k| enumerate_candidates(k).iter().any(|g| zpoly::div_exact_monic(f, g).is_some()));
    };
    (1..=d / 2).any(|k| small_candidates(k).iter().any(|g| divides_i64(&fi, g)))
}

fn small_candidates(k: usize) -> &'static [Vec<i64>] {
    static CACHE: [OnceLock<Vec<Vec<i64>>>; MAX_DEGREE / 2] = [const { OnceLock::new() }; MAX_DEGREE / 2];
    CACHE[k - 1].get_or_init(|| {
        enumerate_candidates(k).iter().map(|g| g.iter().map(|c| i64::try_from(c).expect("small")).collect()).collect()
    })
}

/// Whether monic g divides f, in i128 (remainders stay small for the
/// bounded polynomials seen here; overflow falls back to "no").
fn divides_i64(f: &[i64], g: &[i64]) -> bool {
    let dg = g.len() - 1;
    let mut r: Vec<i128> = f.iter().map(|&x| i128::from(x)).collect();
    for i in (dg..r.len()).rev() {
        let c = r[i];
        if c == 0 {
            continue;
        }
        for (k, &gk) in g.iter().enumerate() {
            match r[i - dg + k].checked_sub(c.saturating_mul(i128::from(gk))) {
                Some(v) => r[i - dg + k] = v,
                None => return false,
            }
        }
    }
    r[..dg].iter().all(|&x| x == 0)
}

/// Exact sufficient test: f changes sign at d + 1 dyadic points inside
/// [-2√2, 2√2], placed around float approximations of its roots.
fn certified_in_range(f: &[BigInt]) -> bool {
    const K: u32 = 24;
    let d = zpoly::degree(f);
    let roots = crate::nf::real_roots(f);
    if roots.len() != d {
        return false;
    }
    let scale = f64::from(1u32 << K);
    let limit = (A * scale).floor() as i64; // limit/2^K < 2√2
    let mut pts: Vec<i64> = Vec::with_capacity(d + 1);
    pts.push(((roots[0] - 1e-6) * scale).floor().max(-(limit as f64)) as i64);
    for w in roots.windows(2) {
        pts.push((0.5 * (w[0] + w[1]) * scale).round() as i64);
    }
    pts.push(((roots[d - 1] + 1e-6) * scale).ceil().min(limit as f64) as i64);
    if pts.windows(2).any(|w| w[0] >= w[1]) || pts[0] < -limit || pts[d] > limit {
        return false;
    }
    // sign of 2^(Kd) f(x / 2^K) = Σ c_i x^i 2^(K(d-i))
    let sign = |x: i64| -> Sign {
        let x = BigInt::from(x);
        let mut v = BigInt::from(0);
        for (i, coef) in f.iter().enumerate().rev() {
            v = v * &x + (coef << (K as usize * (d - i)));
        }
        v.sign()
    };
    let signs: Vec<Sign> = pts.iter().map(|&x| sign(x)).collect();
    signs.iter().all(|&s| s != Sign::NoSign) && signs.windows(2).all(|w| w[0] != w[1])
}

/// Integer coefficient vectors (lowest first, monic) of degree-d polynomials
/// with all roots real in [-A, A] (up to a small float slack; the caller
/// re-checks exactly). Built top-down through the derivatives: the roots of
/// f^(k) interlace those of f^(k-1), which pins each new coefficient to an
/// interval.
fn real_rooted(d: usize) -> Vec<Vec<i64>> {
    let mut out = Vec::new();
    let mut top = vec![1i64];
    extend(d, &mut top, &[], &mut out);
    out
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|x| x as f64).product()
}

/// g_m = f^(d-m), degree m, from the top coefficients c_0..c_m.
fn derivative_poly(d: usize, c: &[i64]) -> Vec<f64> {
    let m = c.len() - 1;
    let mut g = vec![0.0; m + 1];
    for (i, &ci) in c.iter().enumerate() {
        g[m - i] = ci as f64 * factorial(d - i) / factorial(m - i);
    }
    g
}

fn eval(g: &[f64], x: f64) -> f64 {
    g.iter().rev().fold(0.0, |acc, &c| acc * x + c)
}

fn extend(d: usize, c: &mut Vec<i64>, roots: &[f64], out: &mut Vec<Vec<i64>>) {
    let m = c.len();
    if m > d {
        let mut v = c.clone();
        v.reverse();
        out.push(v);
        return;
    }
    // g_m = P(t) + K with K = c_m (d - m)!
    c.push(0);
    let p = derivative_poly(d, c);
    c.pop();
    let scale = factorial(d - m);
    let mut lo = f64::NEG_INFINITY;
    let mut hi = f64::INFINITY;
    // sign requirements at the critical points and endpoints
    let mut points: Vec<(f64, f64)> = Vec::with_capacity(roots.len() + 2);
    points.push((-A, if m % 2 == 0 { 1.0 } else { -1.0 }));
    for (i, &r) in roots.iter().enumerate() {
        let k = roots.len() - i; // (−1)^(m−1−i+... ) pattern from the right
        points.push((r, if k % 2 == 1 { -1.0 } else { 1.0 }));
    }
    points.push((A, 1.0));
    for (x, s) in points {
        // s (P(x) + K) ≥ 0
        let px = eval(&p, x);
        if s > 0.0 {
            lo = lo.max(-px);
        } else {
            hi = hi.min(-px);
        }
    }
    let tol = SLACK * (1.0 + lo.abs().max(hi.abs()));
    let cmin = ((lo - tol) / scale).ceil() as i64;
    let cmax = ((hi + tol) / scale).floor() as i64;
    for cm in cmin..=cmax {
        c.push(cm);
        let g = derivative_poly(d, c);
        if m < d {
            let next = bracket_roots(&g, roots);
            extend(d, c, &next, out);
        } else {
            extend(d, c, &[], out);
        }
        c.pop();
    }
}

/// Roots of g (degree = roots.len() + 1), one in each interval cut by the
/// previous roots inside [-A, A], by bisection.
fn bracket_roots(g: &[f64], prev: &[f64]) -> Vec<f64> {
    let mut cuts = vec![-A];
    cuts.extend_from_slice(prev);
    cuts.push(A);
    cuts.windows(2)
        .map(|w| {
            let (mut a, mut b) = (w[0], w[1]);
            let mut fa = eval(g, a);
            for _ in 0..56 {
                let mid = 0.5 * (a + b);
                let fm = eval(g, mid);
                if (fm <= 0.0) == (fa <= 0.0) {
                    a = mid;
                    fa = fm;
                } else {
                    b = mid;
                }
            }
            0.5 * (a + b)
        })
        .collect()
}
