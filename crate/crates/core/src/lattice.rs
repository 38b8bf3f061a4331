//! Integer lattices: Hermite normal form, kernels of congruence systems,
//! LLL reduction and Fincke-Pohst enumeration of short vectors.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::arith::big_to_i128;

/// Row-style Hermite normal form of the lattice spanned by `rows`.
/// Returns only the nonzero rows, upper triangular with positive pivots.
pub fn hnf_big(rows: &[Vec<BigInt>]) -> Vec<Vec<BigInt>> {
    let mut a: Vec<Vec<BigInt>> = rows.iter().filter(|r| r.iter().any(|x| !x.is_zero())).cloned().collect();
    if a.is_empty() {
        return a;
    }
    let ncols = a[0].len();
    let mut r = 0;
    for col in 0..ncols {
        if r == a.len() {
            break;
        }
        loop {
            let mut best: Option<usize> = None;
            for i in r..a.len() {
                if !a[i][col].is_zero() && best.is_none_or(|b| a[i][col].abs() < a[b][col].abs()) {
                    best = Some(i);
                }
            }
            let Some(b) = best else { break };
            a.swap(r, b);
            let mut done = true;
            for i in r + 1..a.len() {
                if !a[i][col].is_zero() {
                    let q = a[i][col].div_floor(&a[r][col]);
                    let (head, tail) = a.split_at_mut(i);
                    for (x, y) in tail[0].iter_mut().zip(&head[r]) {
                        *x -= &q * y;
                    }
                    if !tail[0][col].is_zero() {
                        done = false;
                    }
                }
            }
            if done {
                break;
            }
        }
        if a[r][col].is_zero() {
            continue;
        }
        if a[r][col].is_negative() {
            for x in a[r].iter_mut() {
                *x = -&*x;
            }
        }
        for i in 0..r {
            let q = a[i][col].div_floor(&a[r][col]);
            if !q.is_zero() {
                let (head, tail) = a.split_at_mut(r);
                for (x, y) in head[i].iter_mut().zip(&tail[0]) {
                    *x -= &q * y;
                }
            }
        }
        r += 1;
    }
    a.truncate(r);
    a.retain(|row| row.iter().any(|x| !x.is_zero()));
    a
}

pub fn to_big(rows: &[Vec<i128>]) -> Vec<Vec<BigInt>> {
    rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect()
}

pub fn from_big(rows: &[Vec<BigInt>]) -> Vec<Vec<i128>> {
    rows.iter().map(|r| r.iter().map(big_to_i128).collect()).collect()
}

pub fn hnf(rows: &[Vec<i128>]) -> Vec<Vec<i128>> {
    from_big(&hnf_big(&to_big(rows)))
}

/// Determinant of a square integer matrix (Bareiss).
pub fn det(rows: &[Vec<i128>]) -> BigInt {
    let n = rows.len();
    let mut a = to_big(rows);
    let mut sign = 1;
    let mut prev = BigInt::from(1);
    for k in 0..n {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                Some(i) => {
                    a.swap(i, k);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                a[i][j] = (&a[i][j] * &a[k][k] - &a[i][k] * &a[k][j]) / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    if n == 0 {
        return BigInt::from(1);
    }
    a[n - 1][n - 1].clone() * sign
}

/// Basis of `{c in Z^n : sum_i c_i a[r][i] == 0 mod m[r] for all r}`.
pub fn congruence_kernel(n: usize, conds: &[(Vec<i128>, i128)]) -> Vec<Vec<i128>> {
    let rc = conds.len();
    let mut rows: Vec<Vec<BigInt>> = Vec::with_capacity(n + rc);
    for i in 0..n {
        let mut row = vec![BigInt::zero(); rc + n];
        for (r, (a, _)) in conds.iter().enumerate() {
            row[r] = BigInt::from(a[i]);
        }
        row[rc + i] = BigInt::from(1);
        rows.push(row);
    }
    for (r, (_, m)) in conds.iter().enumerate() {
        let mut row = vec![BigInt::zero(); rc + n];
        row[r] = BigInt::from(*m);
        rows.push(row);
    }
    let h = hnf_big(&rows);
    let ker: Vec<Vec<BigInt>> = h
        .into_iter()
        .filter(|row| row[..rc].iter().all(|x| x.is_zero()))
        .map(|row| row[rc..].to_vec())
        .collect();
    debug_assert_eq!(ker.len(), n);
    from_big(&hnf_big(&ker))
}

fn gram_of(u: &[Vec<i128>], g: &[Vec<i128>]) -> Vec<Vec<i128>> {
    let n = g.len();
    let mut out = vec![vec![0i128; n]; n];
    for i in 0..n {
        for j in 0..n {
            let mut s = 0i128;
            for k in 0..n {
                if u[i][k] == 0 {
                    continue;
                }
                for l in 0..n {
                    s += u[i][k] * g[k][l] * u[j][l];
                }
            }
            out[i][j] = s;
        }
    }
    out
}

/// Gram-Schmidt data (mu, squared norms) from a Gram matrix.
fn gso(g: &[Vec<i128>]) -> (Vec<Vec<f64>>, Vec<f64>) {
    let n = g.len();
    let mut mu = vec![vec![0.0; n]; n];
    let mut bstar = vec![0.0; n];
    let mut r = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..=i {
            let mut s = g[i][j] as f64;
            for k in 0..j {
                s -= mu[j][k] * r[i][k];
            }
            r[i][j] = s;
            if j < i {
                mu[i][j] = s / bstar[j];
            }
        }
        bstar[i] = r[i][i];
    }
    (mu, bstar)
}

/// LLL-reduces the quadratic form `g`; returns unimodular `u` (rows) and the new Gram.
pub fn lll_gram(g: &[Vec<i128>]) -> (Vec<Vec<i128>>, Vec<Vec<i128>>) {
    let n = g.len();
    let mut u: Vec<Vec<i128>> = (0..n).map(|i| (0..n).map(|j| i128::from(i == j)).collect()).collect();
    let mut cur = g.to_vec();
    let mut k = 1;
    let mut guard = 0;
    while k < n {
        guard += 1;
        assert!(guard < 100_000, "LLL failed to terminate");
        for j in (0..k).rev() {
            let (mu, _) = gso(&cur);
            let q = mu[k][j].round() as i128;
            if q != 0 {
                for c in 0..n {
                    u[k][c] -= q * u[j][c];
                }
                cur = gram_of(&u, g);
            }
        }
        let (mu, b) = gso(&cur);
        if b[k] < (0.99 - mu[k][k - 1] * mu[k][k - 1]) * b[k - 1] {
            u.swap(k, k - 1);
            cur = gram_of(&u, g);
            k = k.saturating_sub(1).max(1);
        } else {
            k += 1;
        }
    }
    (u, cur)
}

/// All nonzero `x` with `x^T g x <= bound`, in the coordinates of `g`.
/// Only one of each pair `x, -x` is returned when `halve` is set.
pub fn short_vectors(g: &[Vec<i128>], bound: i128, halve: bool) -> Vec<Vec<i128>> {
    let n = g.len();
    let (u, red) = lll_gram(g);
    let (mu, b) = gso(&red);
    let mut out = Vec::new();
    let mut x = vec![0i128; n];
    let eps = 1e-6 * (1.0 + bound as f64);
    enumerate(n, &mu, &b, bound as f64 + eps, &mut x, n, &mut |y| {
        let mut v = vec![0i128; n];
        for i in 0..n {
            for j in 0..n {
                v[j] += y[i] * u[i][j];
            }
        }
        if quad_form(g, &v) <= bound {
            out.push(v);
        }
    });
    out.retain(|v| v.iter().any(|&c| c != 0));
    if halve {
        out.retain(|v| v.iter().find(|&&c| c != 0).is_some_and(|&c| c > 0));
    }
    out.sort();
    out
}

fn enumerate(
    n: usize,
    mu: &[Vec<f64>],
    b: &[f64],
    remaining: f64,
    x: &mut Vec<i128>,
    level: usize,
    f: &mut dyn FnMut(&[i128]),
) {
    if level == 0 {
        f(x);
        return;
    }
    let i = level - 1;
    let mut c = 0.0;
    for j in i + 1..n {
        c -= mu[j][i] * x[j] as f64;
    }
    let r = (remaining.max(0.0) / b[i]).sqrt();
    let lo = (c - r).ceil() as i128;
    let hi = (c + r).floor() as i128;
    for v in lo..=hi {
        let d = v as f64 - c;
        let used = b[i] * d * d;
        if used <= remaining {
            x[i] = v;
            enumerate(n, mu, b, remaining - used, x, i, f);
        }
    }
    x[i] = 0;
}

pub fn quad_form(g: &[Vec<i128>], v: &[i128]) -> i128 {
    let mut s = 0i128;
    for i in 0..v.len() {
        if v[i] == 0 {
            continue;
        }
        for j in 0..v.len() {
            s += v[i] * g[i][j] * v[j];
        }
    }
    s
}

pub fn det_i128(rows: &[Vec<i128>]) -> i128 {
    det(rows).to_i128().expect("determinant overflow")
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn brute_short(g: &[Vec<i128>], bound: i128, box_r: i128) -> Vec<Vec<i128>> {
        let n = g.len();
        let mut out = Vec::new();
        let total = (2 * box_r + 1).pow(n as u32);
        for idx in 0..total {
            let mut t = idx;
            let v: Vec<i128> = (0..n)
                .map(|_| {
                    let c = t % (2 * box_r + 1) - box_r;
                    t /= 2 * box_r + 1;
                    c
                })
                .collect();
            if v.iter().any(|&c| c != 0) && quad_form(g, &v) <= bound {
                out.push(v);
            }
        }
        out.sort();
        out
    }

    #[test]
    fn hnf_of_known_lattice() {
        let h = hnf(&[vec![2, 4], vec![3, 5], vec![0, 6]]);
        assert_eq!(h, vec![vec![1, 1], vec![0, 2]]);
    }

    #[test]
    fn kernel_of_congruence() {
        // x + 2y == 0 mod 5
        let k = congruence_kernel(2, &[(vec![1, 2], 5)]);
        assert_eq!(det_i128(&k).abs(), 5);
        for row in &k {
            assert_eq!((row[0] + 2 * row[1]).rem_euclid(5), 0);
        }
    }

    #[test]
    fn short_vectors_of_d4() {
        // The D4 root lattice has 24 roots of norm 2.
        let g = vec![vec![2, -1, 0, 0], vec![-1, 2, -1, -1], vec![0, -1, 2, 0], vec![0, -1, 0, 2]];
        let v = short_vectors(&g, 2, false);
        assert_eq!(v.len(), 24);
        assert_eq!(short_vectors(&g, 2, true).len(), 12);
    }

    proptest! {
        #[test]
        fn hnf_preserves_lattice(rows in proptest::collection::vec(proptest::collection::vec(-30i128..30, 3), 3..6)) {
            let h = hnf(&rows);
            // Same lattice: HNF of the union is unchanged, and every row reduces into h.
            let mut both = rows.clone();
            both.extend(h.clone());
            prop_assert_eq!(hnf(&both), h.clone());
            prop_assert_eq!(hnf(&h), h);
        }

        #[test]
        fn enumeration_matches_brute_force(a in 1i128..6, b in 1i128..6, c in 1i128..6, off in -2i128..3, off2 in -2i128..3) {
            // Positive definite by diagonal dominance.
            let g = vec![
                vec![2 * (a + 5), off, 0],
                vec![off, 2 * (b + 5), off2],
                vec![0, off2, 2 * (c + 5)],
            ];
            let bound = 40;
            let fast = short_vectors(&g, bound, false);
            prop_assert_eq!(fast, brute_short(&g, bound, 3));
        }

        #[test]
        fn lll_is_unimodular(rows in proptest::collection::vec(proptest::collection::vec(-9i128..9, 3), 3)) {
            prop_assume!(!det(&rows).is_zero());
            let mut g = vec![vec![0i128; 3]; 3];
            for i in 0..3 { for j in 0..3 { g[i][j] = (0..3).map(|k| rows[i][k] * rows[j][k]).sum(); } }
            let (u, red) = lll_gram(&g);
            prop_assert_eq!(det_i128(&u).abs(), 1);
            prop_assert_eq!(red, gram_of(&u, &g));
        }
    }
}
