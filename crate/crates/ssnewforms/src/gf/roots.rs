use super::{DensePoly, Field, GfError};
use num_bigint::BigUint;
use rand::Rng;

pub const DEFAULT_SPLIT_ATTEMPTS: usize = 200;

/// x^(q^k) mod `m`, where q is the field order.
pub fn frobenius_power<F: Field>(f: &F, m: &DensePoly<F::Elem>, k: u32) -> DensePoly<F::Elem> {
    let q = f.order();
    let mut acc = DensePoly::x(f).rem(f, m).expect("nonzero modulus");
    for _ in 0..k {
        acc = acc.powmod(f, &q, m);
    }
    acc
}

/// Distinct roots of `poly` in the field, each once, via gcd with x^q - x
/// and Cantor–Zassenhaus splitting.
pub fn distinct_roots<F: Field, R: Rng + ?Sized>(
    f: &F,
    poly: &DensePoly<F::Elem>,
    rng: &mut R,
    max_attempts: usize,
) -> Result<Vec<F::Elem>, GfError> {
    if poly.is_zero() {
        return Err(GfError::DivisionByZero);
    }
    let m = poly.monic(f);
    if m.degree() == Some(0) {
        return Ok(Vec::new());
    }
    let xq = frobenius_power(f, &m, 1);
    let g = m.gcd(f, &xq.sub(f, &DensePoly::x(f)));
    let mut out = Vec::new();
    split_linear(f, g, rng, max_attempts, &mut out)?;
    Ok(out)
}

fn split_linear<F: Field, R: Rng + ?Sized>(
    f: &F,
    g: DensePoly<F::Elem>,
    rng: &mut R,
    max_attempts: usize,
    out: &mut Vec<F::Elem>,
) -> Result<(), GfError> {
    let mut stack = vec![g];
    let half: BigUint = (f.order() - 1u32) >> 1;
    while let Some(g) = stack.pop() {
        match g.degree() {
            None | Some(0) => continue,
            Some(1) => {
                // monic x + c has root -c
                out.push(f.neg(&g.coeffs[0]));
                continue;
            }
            _ => {}
        }
        let mut attempts = 0;
        loop {
            attempts += 1;
            if attempts > max_attempts {
                return Err(GfError::SplitExhausted(max_attempts));
            }
            let delta = f.random(rng);
            let base = DensePoly::new(f, vec![delta, f.one()]);
            let s = base.powmod(f, &half, &g);
            let d = g.gcd(f, &s.sub(f, &DensePoly::one(f)));
            let dd = d.degree().unwrap_or(0);
            if dd > 0 && Some(dd) < g.degree() {
                let (q, _) = g.divrem(f, &d)?;
                stack.push(d);
                stack.push(q.monic(f));
                break;
            }
        }
    }
    Ok(())
}

/// All roots with multiplicity (each root repeated), in the order found.
pub fn poly_roots<F: Field, R: Rng + ?Sized>(
    f: &F,
    poly: &DensePoly<F::Elem>,
    rng: &mut R,
) -> Result<Vec<F::Elem>, GfError> {
    let roots = distinct_roots(f, poly, rng, DEFAULT_SPLIT_ATTEMPTS)?;
    let mut out = Vec::with_capacity(poly.degree().unwrap_or(0));
    for r in roots {
        let lin = DensePoly::linear(f, &r);
        let mut cur = poly.clone();
        while let Some(q) = cur.div_exact(f, &lin) {
            out.push(r.clone());
            cur = q;
        }
    }
    Ok(out)
}
