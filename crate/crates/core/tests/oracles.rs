// Library results against small independent computations done here.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use ktrunc::linalg::{smith_normal_form, IntMatrix};
use ktrunc::oracle::{auto_r_max, build_band, build_band_mod_p, dp_product_aa, dp_product_ab, modp_cohomology_of, BandSpec};
use ktrunc::padic::{vp_factorial, vp_gamma_ratio};
use ktrunc::witt::{p_typical_count, TruncationSet, WittVector};
use ktrunc::Prime;

fn prime(p: u64) -> Prime {
    Prime::new(p).unwrap()
}

fn fact(n: u64) -> BigUint {
    (1..=n).fold(BigUint::one(), |acc, k| acc * k)
}

fn cdiv(a: u64, b: u64) -> u64 {
    a.div_ceil(b)
}

fn naive_vp(mut n: u64, p: u64) -> u64 {
    let mut v = 0;
    while n.is_multiple_of(p) {
        n /= p;
        v += 1;
    }
    v
}

#[test]
fn legendre_matches_naive_sum() {
    for p in [2, 3, 5, 7, 11] {
        let mut total = 0;
        for n in 1..=1500 {
            total += naive_vp(n, p);
            assert_eq!(vp_factorial(n, prime(p)), total, "p={p}, n={n}");
        }
    }
}

#[test]
fn gamma_ratio_matches_factorials() {
    for p in [2, 3, 5] {
        for d in 1..=40 {
            for e in 1..=40 {
                let lo = cdiv(d, e) - 1;
                let hi = cdiv(p * d, e) - 1;
                let ratio = fact(hi) / fact(lo);
                let mut v = 0;
                let mut r = ratio;
                while (&r % p).is_zero() {
                    r /= p;
                    v += 1;
                }
                assert_eq!(vp_gamma_ratio(d, e, prime(p)).unwrap(), v, "p={p}, d={d}, e={e}");
            }
        }
    }
}

#[test]
fn divided_power_constants_match_factorial_quotients() {
    for e in 1..=6 {
        for d1 in 1..=30 {
            for d2 in 1..=30 {
                let (f1, f2, f3) = (d1 / e, d2 / e, (d1 + d2) / e);
                let want = BigRational::new(fact(f3).into(), (fact(f1) * fact(f2)).into());
                assert!(want.is_integer());
                assert_eq!(BigRational::from(dp_product_aa(d1, d2, e).unwrap()), want);

                let (g2, g3) = (cdiv(d2, e) - 1, cdiv(d1 + d2, e) - 1);
                let want = BigRational::new(fact(g3).into(), (fact(f1) * fact(g2)).into());
                assert_eq!(BigRational::from(dp_product_ab(d1, d2, e).unwrap()), want, "d1={d1}, d2={d2}, e={e}");
            }
        }
    }
}

#[test]
fn p_typical_count_matches_enumeration() {
    for p in [2, 3, 5] {
        for m in 1..=120 {
            let set = TruncationSet::full(m);
            for j in (1..=m).filter(|j| j % p != 0) {
                let want = (0..).map(|r| j * p.pow(r)).take_while(|&n| n <= m).count() as u64;
                assert_eq!(p_typical_count(&set, prime(p), j).unwrap(), want);
            }
        }
    }
}

#[test]
fn ghost_components_match_definition() {
    let set = TruncationSet::full(10);
    let coords = [2, -1, 3, 0, 1, -2, 1, 1, -1, 2];
    let w = WittVector::from_integers(set.clone(), &coords).unwrap().ghost();
    for n in 1..=10u64 {
        let mut want = BigInt::zero();
        for d in (1..=n).filter(|d| n % d == 0) {
            want += BigInt::from(d) * num_traits::pow(BigInt::from(coords[d as usize - 1]), (n / d) as usize);
        }
        assert_eq!(w.components[&n], BigRational::from(want), "w_{n}");
    }
}

fn det(mut m: Vec<Vec<BigInt>>) -> BigInt {
    // Bareiss elimination
    let n = m.len();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n {
        if m[k][k].is_zero() {
            match (k + 1..n).find(|&r| !m[r][k].is_zero()) {
                Some(r) => {
                    m.swap(k, r);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                m[i][j] = (&m[i][j] * &m[k][k] - &m[i][k] * &m[k][j]) / &prev;
            }
        }
        prev = m[k][k].clone();
    }
    sign * &m[n - 1][n - 1]
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    (k - 1..n)
        .flat_map(|last| {
            subsets(last, k - 1).into_iter().map(move |mut s| {
                s.push(last);
                s
            })
        })
        .collect()
}

/// gcd of all k×k minors.
fn determinantal_divisor(m: &[Vec<i64>], k: usize) -> BigInt {
    let (rows, cols) = (m.len(), m[0].len());
    let mut g = BigInt::zero();
    for rs in subsets(rows, k) {
        for cs in subsets(cols, k) {
            let minor = rs.iter().map(|&r| cs.iter().map(|&c| BigInt::from(m[r][c])).collect()).collect();
            g = g.gcd(&det(minor));
        }
    }
    g
}

#[test]
fn smith_form_matches_determinantal_divisors() {
    let mut state = 0x2545_f491_u64;
    let mut next = move || {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        (state % 19) as i64 - 9
    };
    for trial in 0..200 {
        let (rows, cols) = (1 + trial % 4, 1 + (trial / 4) % 4);
        let m: Vec<Vec<i64>> = (0..rows).map(|_| (0..cols).map(|_| next()).collect()).collect();
        let snf = smith_normal_form(&IntMatrix::from_rows(&m));
        let mut prefix = BigInt::one();
        for k in 1..=rows.min(cols) {
            let d = snf.diagonal.get(k - 1).cloned().unwrap_or_default().abs();
            prefix *= d;
            assert_eq!(prefix, determinantal_divisor(&m, k), "{m:?}, k={k}");
        }
    }
}

fn rank_mod_p(mut m: Vec<Vec<u64>>, p: u64) -> usize {
    let cols = m.first().map_or(0, |r| r.len());
    let mut rank = 0;
    for c in 0..cols {
        let Some(pivot) = (rank..m.len()).find(|&r| !m[r][c].is_multiple_of(p)) else { continue };
        m.swap(rank, pivot);
        let inv = (1..p).find(|x| x * m[rank][c] % p == 1).unwrap();
        for r in 0..m.len() {
            if r != rank && !m[r][c].is_multiple_of(p) {
                let f = m[r][c] * inv % p;
                for k in 0..cols {
                    m[r][k] = (m[r][k] + (p - f) * m[rank][k] % p) % p;
                }
            }
        }
        rank += 1;
    }
    rank
}

#[test]
fn modp_cohomology_dims_match_ranks() {
    for p in [2, 3] {
        for e in 1..=4 {
            for i in 1..=5 {
                for j in (1..=12).filter(|j| j % p != 0) {
                    let spec = BandSpec::new(prime(p), e, i, j, auto_r_max(prime(p), e, i, j)).unwrap();
                    let band = build_band(spec).unwrap();
                    let (d0, d1) = (band.delta0(), band.delta1());
                    let (r0, r1) = (rank_mod_p(d0.mod_p(p), p), rank_mod_p(d1.mod_p(p), p));
                    let coh = modp_cohomology_of(&build_band_mod_p(spec).unwrap()).unwrap();
                    let ctx = format!("p={p}, e={e}, i={i}, j={j}");
                    assert_eq!(coh.h0_dim(), d0.cols() - r0, "{ctx}");
                    assert_eq!(coh.h1_dim(), d1.cols() - r1 - r0, "{ctx}");
                }
            }
        }
    }
}
