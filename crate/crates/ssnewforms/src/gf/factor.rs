//! Complete factorization over F_ν: squarefree split, distinct-degree
//! factorization, then Cantor–Zassenhaus equal-degree splitting.

use super::{DensePoly, Field, GfError, PrimeFieldCtx};
use num_bigint::BigUint;
use rand::Rng;

type Poly = DensePoly<u64>;

/// Monic irreducible factors with multiplicities, sorted by degree then
/// coefficients.
pub fn factor<R: Rng + ?Sized>(f: &PrimeFieldCtx, poly: &Poly, rng: &mut R) -> Result<Vec<(Poly, usize)>, GfError> {
    if poly.is_zero() {
        return Err(GfError::DivisionByZero);
    }
    let mut out = Vec::new();
    for (g, mult) in squarefree(f, &poly.monic(f)) {
        for (d, part) in distinct_degree(f, &g) {
            for h in equal_degree(f, part, d, rng)? {
                out.push((h, mult));
            }
        }
    }
    out.sort_by(|a, b| a.0.degree().cmp(&b.0.degree()).then_with(|| a.0.coeffs.cmp(&b.0.coeffs)));
    Ok(out)
}

/// Degrees of the irreducible factors, repeated by multiplicity, ascending.
pub fn factor_degrees<R: Rng + ?Sized>(f: &PrimeFieldCtx, poly: &Poly, rng: &mut R) -> Result<Vec<usize>, GfError> {
    let mut d: Vec<usize> = factor(f, poly, rng)?
        .iter()
        .flat_map(|(g, m)| std::iter::repeat(g.degree().unwrap_or(0)).take(*m))
        .collect();
    d.sort_unstable();
    Ok(d)
}

/// Yun's algorithm, with p-th roots when the derivative vanishes.
fn squarefree(f: &PrimeFieldCtx, a: &Poly) -> Vec<(Poly, usize)> {
    if a.degree().unwrap_or(0) == 0 {
        return Vec::new();
    }
    let da = a.derivative(f);
    if da.is_zero() {
        // a(x) = b(x^p), and b(x)^p = b(x^p) over the prime field
        let p = f.modulus() as usize;
        let b = DensePoly::new(f, a.coeffs.iter().step_by(p).copied().collect());
        return squarefree(f, &b).into_iter().map(|(g, m)| (g, m * p)).collect();
    }
    let mut out = Vec::new();
    let mut c = a.gcd(f, &da);
    let mut w = a.div_exact(f, &c).expect("gcd divides");
    let mut i = 1;
    while w.degree().unwrap_or(0) > 0 {
        let y = w.gcd(f, &c);
        let z = w.div_exact(f, &y).expect("gcd divides");
        if z.degree().unwrap_or(0) > 0 {
            out.push((z.monic(f), i));
        }
        i += 1;
        c = c.div_exact(f, &y).expect("gcd divides");
        w = y;
    }
    if c.degree().unwrap_or(0) > 0 {
        // remaining part is a p-th power
        for (g, m) in squarefree(f, &c) {
            out.push((g, m));
        }
    }
    merge(out)
}

fn merge(mut v: Vec<(Poly, usize)>) -> Vec<(Poly, usize)> {
    v.sort_by(|a, b| a.0.coeffs.cmp(&b.0.coeffs));
    let mut out: Vec<(Poly, usize)> = Vec::new();
    for (g, m) in v {
        match out.last_mut() {
            Some(last) if last.0 == g => last.1 += m,
            _ => out.push((g, m)),
        }
    }
    out
}

fn distinct_degree(f: &PrimeFieldCtx, g: &Poly) -> Vec<(usize, Poly)> {
    let q = f.order();
    let x = DensePoly::x(f);
    let mut rest = g.clone();
    let mut h = x.clone();
    let mut out = Vec::new();
    let mut d = 0;
    while let Some(deg) = rest.degree() {
        if deg == 0 {
            break;
        }
        d += 1;
        if 2 * d > deg {
            out.push((deg, rest.monic(f)));
            break;
        }
        h = h.powmod(f, &q, &rest);
        let part = rest.gcd(f, &h.sub(f, &x));
        if part.degree().unwrap_or(0) > 0 {
            rest = rest.div_exact(f, &part).expect("gcd divides");
            h = h.rem(f, &rest).expect("nonzero");
            out.push((d, part.monic(f)));
        }
    }
    out
}

fn equal_degree<R: Rng + ?Sized>(f: &PrimeFieldCtx, g: Poly, d: usize, rng: &mut R) -> Result<Vec<Poly>, GfError> {
    let exp: BigUint = (num_traits::pow(f.order(), d) - 1u32) >> 1;
    let mut stack = vec![g];
    let mut out = Vec::new();
    while let Some(g) = stack.pop() {
        let n = g.degree().unwrap_or(0);
        if n == d {
            out.push(g);
            continue;
        }
        let mut attempts = 0;
        loop {
            attempts += 1;
            if attempts > super::DEFAULT_SPLIT_ATTEMPTS {
                return Err(GfError::SplitExhausted(attempts - 1));
            }
            let a = DensePoly::new(f, (0..n).map(|_| f.random(rng)).collect());
            if a.degree().unwrap_or(0) == 0 {
                continue;
            }
            let s = a.powmod(f, &exp, &g).sub(f, &DensePoly::one(f));
            let h = g.gcd(f, &s);
            let hd = h.degree().unwrap_or(0);
            if hd > 0 && hd < n {
                let other = g.div_exact(f, &h).expect("gcd divides").monic(f);
                stack.push(h.monic(f));
                stack.push(other);
                break;
            }
        }
    }
    Ok(out)
}
