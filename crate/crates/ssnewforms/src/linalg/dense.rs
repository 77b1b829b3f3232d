//! Dense matrices over F_ν and Z. Small sizes only: these back the
//! modular-polynomial generator, the lifting searches and the test oracles.

use crate::gf::{DensePoly, Field, PrimeFieldCtx};
use num_bigint::BigInt;
use num_traits::Zero;

pub type Matrix = Vec<Vec<u64>>;

/// Reduce `m` to reduced row echelon form in place; returns pivot columns.
pub fn rref(f: &PrimeFieldCtx, m: &mut Matrix) -> Vec<usize> {
    let rows = m.len();
    let cols = m.first().map_or(0, |r| r.len());
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(pr) = (r..rows).find(|&i| m[i][c] != 0) else {
            continue;
        };
        m.swap(r, pr);
        let inv = f.invm(m[r][c]).expect("nonzero pivot");
        for x in m[r].iter_mut() {
            *x = f.mulm(*x, inv);
        }
        let pivot_row = m[r].clone();
        for (i, row) in m.iter_mut().enumerate() {
            if i == r || row[c] == 0 {
                continue;
            }
            let k = row[c];
            for (x, &y) in row.iter_mut().zip(&pivot_row).skip(c) {
                *x = f.subm(*x, f.mulm(k, y));
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn rank(f: &PrimeFieldCtx, m: &Matrix) -> usize {
    let mut a = m.clone();
    rref(f, &mut a).len()
}

/// Basis of { x : m x = 0 }.
pub fn nullspace(f: &PrimeFieldCtx, m: &Matrix, cols: usize) -> Vec<Vec<u64>> {
    let mut a = m.clone();
    let pivots = rref(f, &mut a);
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&fc| {
            let mut v = vec![0u64; cols];
            v[fc] = 1;
            for (r, &pc) in pivots.iter().enumerate() {
                v[pc] = f.neg(&a[r][fc]);
            }
            v
        })
        .collect()
}

/// Solve the square system a x = b; `None` if `a` is singular.
pub fn solve(f: &PrimeFieldCtx, a: &Matrix, b: &[u64]) -> Option<Vec<u64>> {
    let n = a.len();
    let mut aug: Matrix = a.iter().zip(b).map(|(r, &bi)| {
        let mut row = r.clone();
        row.push(bi);
        row
    }).collect();
    let piv = rref(f, &mut aug);
    if piv.len() != n || piv.last() == Some(&n) {
        return None;
    }
    Some(aug.iter().map(|r| r[n]).collect())
}

pub fn inverse(f: &PrimeFieldCtx, a: &Matrix) -> Option<Matrix> {
    let n = a.len();
    let mut aug: Matrix = a
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut row = r.clone();
            row.extend((0..n).map(|j| u64::from(i == j)));
            row
        })
        .collect();
    let piv = rref(f, &mut aug);
    if piv.len() < n || piv[n - 1] != n - 1 {
        return None;
    }
    Some(aug.into_iter().map(|r| r[n..].to_vec()).collect())
}

pub fn matmul(f: &PrimeFieldCtx, a: &Matrix, b: &Matrix) -> Matrix {
    let m = b.first().map_or(0, |r| r.len());
    a.iter()
        .map(|row| {
            (0..m)
                .map(|j| row.iter().zip(b).fold(0u64, |acc, (&x, br)| f.addm(acc, f.mulm(x, br[j]))))
                .collect()
        })
        .collect()
}

pub fn matvec(f: &PrimeFieldCtx, a: &Matrix, v: &[u64]) -> Vec<u64> {
    a.iter()
        .map(|row| row.iter().zip(v).fold(0u64, |acc, (&x, &y)| f.addm(acc, f.mulm(x, y))))
        .collect()
}

/// Characteristic polynomial det(tI - a) via Hessenberg reduction.
pub fn charpoly(f: &PrimeFieldCtx, a: &Matrix) -> DensePoly<u64> {
    let n = a.len();
    let mut h = a.clone();
    // similarity transform to upper Hessenberg form
    for c in 0..n.saturating_sub(2) {
        let Some(pr) = (c + 1..n).find(|&i| h[i][c] != 0) else {
            continue;
        };
        if pr != c + 1 {
            h.swap(pr, c + 1);
            for row in h.iter_mut() {
                row.swap(pr, c + 1);
            }
        }
        let inv = f.invm(h[c + 1][c]).expect("nonzero pivot");
        for i in c + 2..n {
            let k = f.mulm(h[i][c], inv);
            if k == 0 {
                continue;
            }
            // row_i -= k row_{c+1}; col_{c+1} += k col_i
            for j in 0..n {
                let t = f.mulm(k, h[c + 1][j]);
                h[i][j] = f.subm(h[i][j], t);
            }
            for row in h.iter_mut() {
                let t = f.mulm(k, row[i]);
                row[c + 1] = f.addm(row[c + 1], t);
            }
        }
    }
    // p_k = charpoly of the leading k x k block
    let mut polys: Vec<Vec<u64>> = vec![vec![1]];
    for k in 0..n {
        let mut next = vec![0u64; k + 2];
        // (t - h[k][k]) p_k
        for (i, &c) in polys[k].iter().enumerate() {
            next[i + 1] = f.addm(next[i + 1], c);
            next[i] = f.subm(next[i], f.mulm(h[k][k], c));
        }
        let mut prod = 1u64;
        for i in (0..k).rev() {
            prod = f.mulm(prod, h[i + 1][i]);
            let coef = f.mulm(prod, h[i][k]);
            if coef == 0 {
                continue;
            }
            for (t, &c) in polys[i].iter().enumerate() {
                next[t] = f.subm(next[t], f.mulm(coef, c));
            }
        }
        polys.push(next);
    }
    DensePoly::new(f, polys.pop().expect("nonempty"))
}

/// Characteristic polynomial over Z by the division-free Berkowitz
/// algorithm; coefficients lowest degree first, monic.
pub fn charpoly_integer(a: &[Vec<i64>]) -> Vec<BigInt> {
    let n = a.len();
    if n == 0 {
        return vec![BigInt::from(1)];
    }
    let m: Vec<Vec<BigInt>> = a.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect();
    // v holds coefficients highest degree first
    let mut v = vec![BigInt::from(1), -m[0][0].clone()];
    for r in 1..n {
        // Toeplitz column for the leading (r+1) x (r+1) block
        let rr: Vec<BigInt> = (0..r).map(|j| m[r][j].clone()).collect();
        let s: Vec<BigInt> = (0..r).map(|i| m[i][r].clone()).collect();
        let arr = &m[r][r];
        let mut col = vec![BigInt::from(1), -arr.clone()];
        let mut x = s.clone();
        for _ in 0..r {
            let rx: BigInt = rr.iter().zip(&x).map(|(a, b)| a * b).sum();
            col.push(-rx);
            let mut nx = vec![BigInt::zero(); r];
            for (i, slot) in nx.iter_mut().enumerate() {
                *slot = (0..r).map(|j| &m[i][j] * &x[j]).sum();
            }
            x = nx;
        }
        let mut nv = vec![BigInt::zero(); r + 2];
        for (i, slot) in nv.iter_mut().enumerate() {
            for (j, vj) in v.iter().enumerate() {
                if i >= j && i - j < col.len() {
                    *slot += &col[i - j] * vj;
                }
            }
        }
        v = nv;
    }
    v.reverse();
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf::Field;
    use proptest::prelude::*;

    fn fp(p: u64) -> PrimeFieldCtx {
        PrimeFieldCtx::new(p).unwrap()
    }

    /// det(tI - a) by cofactor expansion with polynomial entries.
    fn charpoly_laplace(f: &PrimeFieldCtx, a: &Matrix) -> DensePoly<u64> {
        let n = a.len();
        let entries: Vec<Vec<DensePoly<u64>>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        let c = f.neg(&a[i][j]);
                        if i == j {
                            DensePoly::new(f, vec![c, 1])
                        } else {
                            DensePoly::new(f, vec![c])
                        }
                    })
                    .collect()
            })
            .collect();
        fn det(f: &PrimeFieldCtx, m: &[Vec<DensePoly<u64>>], cols: &[usize]) -> DensePoly<u64> {
            if cols.is_empty() {
                return DensePoly::one(f);
            }
            let row = m.len() - cols.len();
            let mut acc = DensePoly::zero();
            for (k, &c) in cols.iter().enumerate() {
                let rest: Vec<usize> = cols.iter().copied().filter(|&x| x != c).collect();
                let t = m[row][c].mul(f, &det(f, m, &rest));
                acc = if k % 2 == 0 { acc.add(f, &t) } else { acc.sub(f, &t) };
            }
            acc
        }
        det(f, &entries, &(0..n).collect::<Vec<_>>())
    }

    #[test]
    fn small_charpolys() {
        let f = fp(101);
        let m = vec![vec![0, 3], vec![2, 1]];
        // (t - 3)(t + 2) = t^2 - t - 6
        assert_eq!(charpoly(&f, &m).coeffs, vec![95, 100, 1]);
        assert_eq!(
            charpoly_integer(&[vec![0, 3], vec![2, 1]]),
            vec![BigInt::from(-6), BigInt::from(-1), BigInt::from(1)]
        );
    }

    #[test]
    fn nullspace_and_solve() {
        let f = fp(7);
        let m = vec![vec![1, 2, 3], vec![2, 4, 6]];
        let ns = nullspace(&f, &m, 3);
        assert_eq!(ns.len(), 2);
        for v in &ns {
            assert!(matvec(&f, &m, v).iter().all(|&x| x == 0));
        }
        let a = vec![vec![1, 1], vec![1, 6]];
        let x = solve(&f, &a, &[3, 0]).unwrap();
        assert_eq!(matvec(&f, &a, &x), vec![3, 0]);
        assert!(solve(&f, &vec![vec![1, 2], vec![2, 4]], &[1, 1]).is_none());
    }

    proptest! {
        #[test]
        fn hessenberg_matches_laplace(n in 1usize..6, seed in proptest::collection::vec(0u64..13, 36)) {
            let f = fp(13);
            let a: Matrix = (0..n).map(|i| (0..n).map(|j| seed[i * 6 + j]).collect()).collect();
            prop_assert_eq!(charpoly(&f, &a), charpoly_laplace(&f, &a));
        }

        #[test]
        fn berkowitz_matches_mod_p(n in 1usize..7, seed in proptest::collection::vec(-4i64..5, 49)) {
            let a: Vec<Vec<i64>> = (0..n).map(|i| (0..n).map(|j| seed[i * 7 + j]).collect()).collect();
            let z = charpoly_integer(&a);
            let f = fp(10007);
            let am: Matrix = a.iter().map(|r| r.iter().map(|&x| f.reduce_i64(x)).collect()).collect();
            let want = charpoly(&f, &am);
            let got: Vec<u64> = z.iter().map(|c| {
                let r = c % BigInt::from(10007);
                let r = if r < BigInt::zero() { r + 10007 } else { r };
                u64::try_from(r).unwrap()
            }).collect();
            prop_assert_eq!(DensePoly::new(&f, got), want);
        }

        #[test]
        fn inverse_roundtrip(seed in proptest::collection::vec(0u64..31, 16)) {
            let f = fp(31);
            let a: Matrix = (0..4).map(|i| seed[i * 4..i * 4 + 4].to_vec()).collect();
            if let Some(inv) = inverse(&f, &a) {
                let id = matmul(&f, &a, &inv);
                for (i, row) in id.iter().enumerate() {
                    for (j, &x) in row.iter().enumerate() {
                        prop_assert_eq!(x, u64::from(i == j));
                    }
                }
            } else {
                prop_assert!(rank(&f, &a) < 4);
            }
            let _ = f.one();
        }
    }
}
