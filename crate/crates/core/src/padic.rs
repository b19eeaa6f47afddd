//! Exact integer primitives: valuations, factorial valuations, integer
//! logarithms and the small combinatorial gadgets used by the band formulas.

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, violation, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "u64", into = "u64")]
pub struct Prime(u64);

impl Prime {
    pub fn new(p: u64) -> Result<Prime> {
        if p < 2 {
            return invalid(format!("{p} is not prime"));
        }
        let mut d = 2;
        while d * d <= p {
            if p.is_multiple_of(d) {
                return invalid(format!("{p} is not prime"));
            }
            d += 1;
        }
        Ok(Prime(p))
    }

    pub fn get(self) -> u64 {
        self.0
    }

    pub fn divides(self, n: u64) -> bool {
        n.is_multiple_of(self.0)
    }
}

impl TryFrom<u64> for Prime {
    type Error = crate::error::Error;
    fn try_from(p: u64) -> Result<Prime> {
        Prime::new(p)
    }
}

impl From<Prime> for u64 {
    fn from(p: Prime) -> u64 {
        p.0
    }
}

impl std::fmt::Display for Prime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        self.0.fmt(f)
    }
}

/// ⟨x⟩ = max(x, 0).
pub fn clamp(x: i64) -> u64 {
    x.max(0) as u64
}

pub fn ceil_div(a: u64, b: u64) -> u64 {
    a.div_ceil(b)
}

pub fn vp(n: i64, p: Prime) -> Result<u64> {
    if n == 0 {
        return invalid("valuation of 0 is infinite");
    }
    let mut n = n.unsigned_abs();
    let mut v = 0;
    while n.is_multiple_of(p.0) {
        n /= p.0;
        v += 1;
    }
    Ok(v)
}

pub fn vp_big(n: &BigInt, p: Prime) -> Result<u64> {
    if n.is_zero() {
        return invalid("valuation of 0 is infinite");
    }
    let p = BigInt::from(p.0);
    let mut n = n.clone();
    let mut v = 0;
    loop {
        let (q, r) = num_integer::Integer::div_rem(&n, &p);
        if !r.is_zero() {
            return Ok(v);
        }
        n = q;
        v += 1;
    }
}

/// Legendre's formula.
pub fn vp_factorial(n: u64, p: Prime) -> u64 {
    let mut s = 0;
    let mut n = n;
    while n > 0 {
        n /= p.0;
        s += n;
    }
    s
}

/// v_p of Γ⌈d/e⌉ = (⌈d/e⌉ − 1)! = ⌊(d−1)/e⌋!.
pub fn vp_gamma_ceil(d: u64, e: u64, p: Prime) -> u64 {
    debug_assert!(d >= 1 && e >= 1);
    vp_factorial((d - 1) / e, p)
}

/// {d,e}: e when e divides d, otherwise d.
pub fn brace(d: u64, e: u64) -> u64 {
    if d.is_multiple_of(e) {
        e
    } else {
        d
    }
}

/// Largest r with p^r ≤ num/den. May be negative.
pub fn floor_log(p: Prime, num: u64, den: u64) -> i64 {
    assert!(num >= 1 && den >= 1, "floor_log needs positive arguments");
    let p = p.0 as u128;
    let (num, den) = (num as u128, den as u128);
    if num >= den {
        let mut r = 0;
        let mut scaled = den;
        while scaled * p <= num {
            scaled *= p;
            r += 1;
        }
        r
    } else {
        let mut r = -1;
        let mut scaled = num * p;
        while scaled < den {
            scaled *= p;
            r -= 1;
        }
        r
    }
}

/// Smallest r with num/den ≤ p^r.
pub fn ceil_log(p: Prime, num: u64, den: u64) -> i64 {
    -floor_log(p, den, num)
}

/// ε = ⟨i−⌊d/e⌋⟩ − ⟨i−⌈d/e⌉⟩, which is 0 or 1.
pub fn epsilon(i: u64, d: u64, e: u64) -> u64 {
    let f = d / e;
    let c = ceil_div(d, e);
    u64::from(f < c && c <= i)
}

pub fn vp_gamma_ratio(d: u64, e: u64, p: Prime) -> Result<u64> {
    let hi = vp_gamma_ceil(p.0 * d, e, p);
    let lo = vp_gamma_ceil(d, e, p);
    let expected = ceil_div(d, e) - 1;
    if hi < lo || hi - lo != expected {
        return violation(format!(
            "v_p Γ⌈pd/e⌉/Γ⌈d/e⌉ = {} but ⌈d/e⌉−1 = {expected} (d={d}, e={e}, p={p})",
            hi as i64 - lo as i64
        ));
    }
    Ok(hi - lo)
}

pub fn pow(p: Prime, k: u64) -> BigInt {
    num_traits::pow(BigInt::from(p.0), k as usize)
}

pub fn factorial(n: u64) -> BigUint {
    (1..=n).fold(BigUint::one(), |acc, k| acc * k)
}

/// Product lo+1 .. hi, i.e. hi!/lo!.
pub fn rising(lo: u64, hi: u64) -> BigInt {
    assert!(lo <= hi);
    (lo + 1..=hi).fold(BigInt::one(), |acc, k| acc * k)
}

/// n! with every factor of p removed, reduced mod p.
pub fn factorial_unit_mod(n: u64, p: Prime) -> u64 {
    let p = p.0;
    let mut n = n;
    let mut acc = 1u64;
    while n > 0 {
        let q = n / p;
        let mut block = 1u64;
        for k in 1..=(n % p) {
            block = block * k % p;
        }
        // (p−1)! ≡ −1
        if q % 2 == 1 {
            block = (p - block) % p;
        }
        acc = acc * block % p;
        n = q;
    }
    acc
}

pub fn inv_mod(a: u64, p: u64) -> u64 {
    assert!(!a.is_multiple_of(p), "no inverse of {a} mod {p}");
    let mut r = 1u64;
    let mut b = a % p;
    let mut k = p - 2;
    while k > 0 {
        if k & 1 == 1 {
            r = r * b % p;
        }
        b = b * b % p;
        k >>= 1;
    }
    r
}
