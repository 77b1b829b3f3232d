//! Three-prime NTT multiplication for polynomials over F_p, p < 2^32.
//!
//! Coefficient products are bounded by n * p^2 < 2^81 for the lengths used
//! here, so three NTT-friendly primes (product about 2^86) reconstruct them
//! exactly before the final reduction mod p.

pub(crate) const CROSSOVER: usize = 32;

const PRIMES: [u64; 3] = [998_244_353, 167_772_161, 469_762_049];
const ROOT: u64 = 3;

fn pow_mod(mut a: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1u64;
    a %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = r * a % m;
        }
        a = a * a % m;
        e >>= 1;
    }
    r
}

fn transform(a: &mut [u64], m: u64, invert: bool) {
    let n = a.len();
    let mut j = 0;
    for i in 1..n {
        let mut bit = n >> 1;
        while j & bit != 0 {
            j ^= bit;
            bit >>= 1;
        }
        j |= bit;
        if i < j {
            a.swap(i, j);
        }
    }
    let mut len = 2;
    while len <= n {
        let mut w = pow_mod(ROOT, (m - 1) / len as u64, m);
        if invert {
            w = pow_mod(w, m - 2, m);
        }
        let half = len / 2;
        // twiddles for this stage
        let mut tw = Vec::with_capacity(half);
        let mut cur = 1u64;
        for _ in 0..half {
            tw.push(cur);
            cur = cur * w % m;
        }
        for start in (0..n).step_by(len) {
            for k in 0..half {
                let u = a[start + k];
                let v = a[start + k + half] * tw[k] % m;
                a[start + k] = if u + v >= m { u + v - m } else { u + v };
                a[start + k + half] = if u >= v { u - v } else { u + m - v };
            }
        }
        len <<= 1;
    }
    if invert {
        let inv_n = pow_mod(n as u64, m - 2, m);
        for x in a.iter_mut() {
            *x = *x * inv_n % m;
        }
    }
}

fn convolve(a: &[u64], b: &[u64], m: u64) -> Vec<u64> {
    let need = a.len() + b.len() - 1;
    let n = need.next_power_of_two();
    let mut fa: Vec<u64> = a.iter().map(|&x| x % m).collect();
    let mut fb: Vec<u64> = b.iter().map(|&x| x % m).collect();
    fa.resize(n, 0);
    fb.resize(n, 0);
    transform(&mut fa, m, false);
    transform(&mut fb, m, false);
    for (x, y) in fa.iter_mut().zip(fb.iter()) {
        *x = *x * y % m;
    }
    transform(&mut fa, m, true);
    fa.truncate(need);
    fa
}

pub(crate) fn mul_mod(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let [m0, m1, m2] = PRIMES;
    let r0 = convolve(a, b, m0);
    let r1 = convolve(a, b, m1);
    let r2 = convolve(a, b, m2);
    // Garner reconstruction
    let m0_inv_m1 = pow_mod(m0, m1 - 2, m1);
    let m01_inv_m2 = pow_mod(m0 * m1 % m2, m2 - 2, m2);
    let m01 = m0 as u128 * m1 as u128;
    let m01_mod_p = (m01 % p as u128) as u64;
    let m0_mod_p = m0 % p;
    r0.iter()
        .zip(r1.iter())
        .zip(r2.iter())
        .map(|((&x0, &x1), &x2)| {
            let t1 = (x1 + m1 - x0 % m1) % m1 * m0_inv_m1 % m1;
            let v01 = x0 as u128 + t1 as u128 * m0 as u128;
            let v01_mod_m2 = (v01 % m2 as u128) as u64;
            let t2 = (x2 + m2 - v01_mod_m2) % m2 * m01_inv_m2 % m2;
            let lo = (x0 % p + (t1 % p) * m0_mod_p % p) % p;
            (lo + (t2 % p) * m01_mod_p % p) % p
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn naive(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
        let mut out = vec![0u64; a.len() + b.len() - 1];
        for (i, &x) in a.iter().enumerate() {
            for (j, &y) in b.iter().enumerate() {
                out[i + j] = (out[i + j] + x * y % p) % p;
            }
        }
        out
    }

    #[test]
    fn matches_schoolbook() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for &p in &[10007u64, 999983, 4294967291] {
            for _ in 0..5 {
                let la = rng.gen_range(1..300);
                let lb = rng.gen_range(1..300);
                let a: Vec<u64> = (0..la).map(|_| rng.gen_range(0..p)).collect();
                let b: Vec<u64> = (0..lb).map(|_| rng.gen_range(0..p)).collect();
                assert_eq!(mul_mod(&a, &b, p), naive(&a, &b, p));
            }
        }
    }
}
