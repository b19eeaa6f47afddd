//! The projection π: k[x]/x^m → k[x]/x^n on K-group bands, and the maps ι_f.

use num_bigint::BigInt;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, violation, Result};
use crate::kgroups::band_length;
use crate::linalg::{smith_normal_form_with_transforms, IntMatrix};
use crate::oracle::{build_band, BandSpec};
use crate::padic::{ceil_div, clamp, floor_log, pow, rising, vp, vp_big, vp_gamma_ceil, Prime};
use crate::witt::LengthModule;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TowerMapQuery {
    pub p: Prime,
    pub m: u64,
    pub n: u64,
    pub i: u64,
    pub j: u64,
}

impl TowerMapQuery {
    pub fn new(p: Prime, m: u64, n: u64, i: u64, j: u64) -> Result<TowerMapQuery> {
        if n == 0 || m <= n {
            return invalid(format!("need m > n ≥ 1, got m={m}, n={n}"));
        }
        if i == 0 || j == 0 {
            return invalid("i and j must be positive");
        }
        if p.divides(j) {
            return invalid(format!("band index {j} is divisible by {p}"));
        }
        Ok(TowerMapQuery { p, m, n, i, j })
    }

    /// ⌊log_p(mi/j)⌋.
    pub fn s(&self) -> i64 {
        floor_log(self.p, self.m * self.i, self.j)
    }

    /// ⌊log_p(ni/j)⌋.
    pub fn t(&self) -> i64 {
        floor_log(self.p, self.n * self.i, self.j)
    }

    /// N ≠ 0 in the sense of the slope picture.
    pub fn target_nonzero(&self) -> bool {
        self.j <= self.n * self.i
    }
}

/// Σ_{1≤h<i} (⌊log_p(mh/j)⌋ − ⌊log_p(nh/j)⌋), each floor log counted as the
/// number of levels r ≥ 0 below the ray.
pub fn ell(q: &TowerMapQuery) -> u64 {
    (1..q.i)
        .map(|h| {
            let above = clamp(floor_log(q.p, q.m * h, q.j) + 1);
            let below = clamp(floor_log(q.p, q.n * h, q.j) + 1);
            above - below
        })
        .sum()
}

/// #{(h, r) : h < i, r ≥ 0, nh < p^r j ≤ mh}.
pub fn crossing_count(q: &TowerMapQuery) -> u64 {
    let mut count = 0;
    for h in 1..q.i {
        let mut d = q.j;
        while d <= q.m * h {
            if q.n * h < d {
                count += 1;
            }
            d *= q.p.get();
        }
    }
    count
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct RawSums {
    /// Σ_{r≤s} (i − ⌈p^r j/m⌉)
    pub m_sum: u64,
    /// Σ_{r≤t} (i − ⌈p^r j/n⌉)
    pub n_sum: u64,
    /// v_p Γ⌈j/n⌉ − v_p Γ⌈j/m⌉
    pub gamma_correction: u64,
}

fn column_sum(p: Prime, col: u64, i: u64, j: u64, top: i64) -> u64 {
    (0..=top)
        .map(|r| i - ceil_div(p.get().pow(r as u32) * j, col))
        .sum()
}

pub fn raw_sums(q: &TowerMapQuery) -> Option<RawSums> {
    if !q.target_nonzero() {
        return None;
    }
    Some(RawSums {
        m_sum: column_sum(q.p, q.m, q.i, q.j, q.s()),
        n_sum: column_sum(q.p, q.n, q.i, q.j, q.t()),
        gamma_correction: lemma_gap(q),
    })
}

fn lemma_gap(q: &TowerMapQuery) -> u64 {
    vp_gamma_ceil(q.j, q.n, q.p) - vp_gamma_ceil(q.j, q.m, q.p)
}

/// (m-column sum) − (n-column sum) + Γ-correction, before any sign check; None when j > ni.
pub fn ell_prime_signed(q: &TowerMapQuery) -> Option<i64> {
    let raw = raw_sums(q)?;
    Some(raw.m_sum as i64 - raw.n_sum as i64 + raw.gamma_correction as i64)
}

pub fn ell_prime(q: &TowerMapQuery) -> Option<u64> {
    ell_prime_signed(q).map(|v| u64::try_from(v).expect("the m-column sum dominates the n-column sum"))
}

pub fn lemma_predicate(q: &TowerMapQuery) -> bool {
    vp_gamma_ceil(q.j, q.n, q.p) > vp_gamma_ceil(q.j, q.m, q.p)
}

pub fn reconcile(q: &TowerMapQuery) -> bool {
    let Some(lp) = ell_prime(q) else {
        return true;
    };
    let l = ell(q);
    let cap = q.t() as u64 + 1;
    lp == l + lemma_gap(q) && l.min(cap) == lp.min(cap)
}

/// The slope-picture predicate ℓ′ ≤ t, which treats N as cyclic of length t+1.
pub fn pi_star_nonzero(q: &TowerMapQuery) -> bool {
    q.target_nonzero() && ell_prime(q).is_some_and(|lp| lp <= q.t() as u64)
}

/// π^* on the K-group bands themselves: ℓ′ below the honest length of N.
pub fn pi_star_nonzero_on_k(q: &TowerMapQuery) -> bool {
    let n_len = band_length(q.p, q.n, q.i, q.j);
    ell_prime(q).is_some_and(|lp| lp < n_len)
}

#[derive(Debug, Clone, Serialize)]
pub struct FunctorialReport {
    pub ell: u64,
    pub ell_prime: Option<u64>,
    pub s: i64,
    pub t: i64,
    pub green: bool,
    pub nonzero: bool,
    /// ℓ′ below the honest length of the K-group band N.
    pub nonzero_on_k: bool,
    pub raw: Option<RawSums>,
}

pub fn report(q: &TowerMapQuery) -> FunctorialReport {
    FunctorialReport {
        ell: ell(q),
        ell_prime: ell_prime(q),
        s: q.s(),
        t: q.t(),
        green: lemma_predicate(q),
        nonzero: pi_star_nonzero(q),
        nonzero_on_k: pi_star_nonzero_on_k(q),
        raw: raw_sums(q),
    }
}

/// ι_f^*(x^d/Γ⌈d/e⌉ dlog x) = f·x^{df}/Γ⌈df/ef⌉ dlog x: returns (df, f).
pub fn iota_pullback(d: u64, e: u64, f: u64) -> (u64, u64) {
    assert!(d >= 1 && e >= 1 && f >= 1);
    (d * f, f)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Pullback,
    Pushforward,
}

/// Where a band goes: `target = None` when the band maps to zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct BandMap {
    pub source: u64,
    pub target: Option<u64>,
    /// Level shift along the p-band.
    pub shift: i64,
}

/// V_f (pullback) or F_f (pushforward) on the bands of 𝐖_{ei}(k), with f = p^v f′.
pub fn iota_on_witt(e: u64, i: u64, f: u64, p: Prime, direction: Direction) -> Result<Vec<BandMap>> {
    if f == 0 {
        return invalid("f must be positive");
    }
    let v = vp(f as i64, p)?;
    let f_prime = f / p.get().pow(v as u32);
    let module = crate::witt::big_witt_lengths(e * i, p);
    Ok(module
        .bands
        .keys()
        .map(|&j| match direction {
            Direction::Pullback => BandMap { source: j, target: Some(j * f_prime), shift: v as i64 },
            Direction::Pushforward => BandMap {
                source: j,
                target: (j % f_prime == 0).then(|| j / f_prime),
                shift: -(v as i64),
            },
        })
        .collect())
}

/// Lengths of the module a band map lands in, for display.
pub fn witt_target(e: u64, i: u64, f: u64, p: Prime, direction: Direction) -> LengthModule {
    match direction {
        Direction::Pullback => crate::witt::big_witt_lengths(e * f * i, p),
        Direction::Pushforward => crate::witt::big_witt_lengths(e * i / f.max(1), p),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PiStarImage {
    /// π^* kills the band (or one side is zero).
    Zero,
    /// Image is p^k N.
    Valuation(u64),
}

#[derive(Debug, Clone, Serialize)]
pub struct PiStarOracle {
    pub image: PiStarImage,
    /// Honest band lengths of M and N from the integral complexes.
    pub m_length: u64,
    pub n_length: u64,
}

impl PiStarOracle {
    /// Length of N / π^*(M); equals `n_length` for the zero map.
    pub fn cokernel_length(&self) -> u64 {
        match self.image {
            PiStarImage::Zero => self.n_length,
            PiStarImage::Valuation(k) => k,
        }
    }
}

/// Chain map π on C¹ = N¹ ⊕ W⁰ between the m- and n-band complexes.
fn chain_map_c1(q: &TowerMapQuery, levels: usize) -> Result<IntMatrix> {
    let mut g = IntMatrix::zeros(2 * levels, 2 * levels);
    for r in 0..levels {
        let d = q.p.get().pow(r as u32) * q.j;
        let (cm, cn) = (ceil_div(d, q.m), ceil_div(d, q.n));
        let (fm, fn_) = (d / q.m, d / q.n);
        let em = clamp(q.i as i64 - cm as i64);
        let en = clamp(q.i as i64 - cn as i64);
        if em < en {
            return violation("Nygaard exponent grows under projection");
        }
        g.set(r, r, pow(q.p, em - en) * rising(cm - 1, cn - 1));
        g.set(levels + r, levels + r, rising(fm, fn_));
    }
    Ok(g)
}

/// Image of the M-generator in N, from Smith forms of both complexes.
pub fn pi_star_oracle(q: &TowerMapQuery, r_max: usize) -> Result<PiStarOracle> {
    let bm = build_band(BandSpec::new(q.p, q.m, q.i, q.j, r_max)?)?;
    let bn = build_band(BandSpec::new(q.p, q.n, q.i, q.j, r_max)?)?;
    let sm = smith_normal_form_with_transforms(&bm.delta0());
    let sn = smith_normal_form_with_transforms(&bn.delta0());
    let p_part = |diag: &[BigInt]| -> Result<Vec<(usize, u64)>> {
        let mut out = Vec::new();
        for (k, d) in diag.iter().enumerate() {
            if !d.is_zero() {
                let v = vp_big(d, q.p)?;
                if v > 0 {
                    out.push((k, v));
                }
            }
        }
        Ok(out)
    };
    let pm = p_part(&sm.diagonal)?;
    let pn = p_part(&sn.diagonal)?;
    let m_length: u64 = pm.iter().map(|(_, v)| v).sum();
    let n_length: u64 = pn.iter().map(|(_, v)| v).sum();
    if pm.len() > 1 || pn.len() > 1 {
        return violation("band cohomology is not cyclic");
    }
    let (Some(&(km, _)), Some(_)) = (pm.first(), pn.first()) else {
        return Ok(PiStarOracle { image: PiStarImage::Zero, m_length, n_length });
    };
    let tm = sm.transforms.as_ref().expect("tracked");
    let tn = sn.transforms.as_ref().expect("tracked");
    let generator = tm.u_inv.column(km);
    let image = chain_map_c1(q, bm.spec.levels())?.mul_vec(&generator);
    let coords = tn.u.mul_vec(&image);
    let rank = sn.rank();
    let mut order = 0;
    for (k, z) in coords.iter().enumerate() {
        if k >= rank {
            if !z.is_zero() {
                return violation("torsion class maps to a free class");
            }
            continue;
        }
        let dk = &sn.diagonal[k];
        let vd = vp_big(dk, q.p)?;
        if vd == 0 || z.is_zero() {
            continue;
        }
        let vz = vp_big(z, q.p)?;
        order = order.max(vd - vz.min(vd));
    }
    let image = if order == 0 { PiStarImage::Zero } else { PiStarImage::Valuation(n_length - order) };
    Ok(PiStarOracle { image, m_length, n_length })
}

/// Truncation used for π^* checks: enough levels for the m-band.
pub fn pi_star_r_max(q: &TowerMapQuery) -> usize {
    clamp(q.s()) as usize + 2
}

/// Cokernel length predicted from ℓ′, capped by the honest length of N.
pub fn predicted_cokernel(q: &TowerMapQuery) -> Option<u64> {
    let n_len = band_length(q.p, q.n, q.i, q.j);
    ell_prime(q).map(|lp| lp.min(n_len))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(p: u64, m: u64, n: u64, i: u64, j: u64) -> TowerMapQuery {
        TowerMapQuery::new(Prime::new(p).unwrap(), m, n, i, j).unwrap()
    }

    #[test]
    fn ell_examples() {
        assert_eq!(ell(&q(2, 4, 2, 3, 1)), 2);
        assert_eq!(ell(&q(2, 3, 2, 2, 1)), 0);
        assert_eq!(ell(&q(2, 5, 3, 1, 1)), 0);
        assert_eq!(crossing_count(&q(2, 4, 2, 3, 1)), 2);
        assert_eq!(crossing_count(&q(2, 3, 2, 2, 1)), 0);
        assert_eq!(crossing_count(&q(2, 5, 3, 1, 1)), 0);
    }

    #[test]
    fn ell_prime_examples() {
        let a = q(2, 4, 2, 3, 1);
        let raw = raw_sums(&a).unwrap();
        assert_eq!((raw.m_sum, raw.n_sum, raw.gamma_correction), (7, 5, 0));
        assert_eq!(ell_prime(&a), Some(2));
        let b = q(2, 12, 11, 3, 23);
        assert_eq!(raw_sums(&b).unwrap().gamma_correction, 1);
        assert_eq!(ell_prime(&q(2, 12, 11, 1, 23)), None);
    }

    #[test]
    fn lemma_examples() {
        assert!(lemma_predicate(&q(2, 12, 11, 1, 23)));
        assert!(!lemma_predicate(&q(2, 12, 11, 1, 1)));
        // Γ⌈45/11⌉ = 3! and Γ⌈45/12⌉ = 3!, both with v_3 = 1
        assert!(!lemma_predicate(&q(3, 12, 11, 1, 45 + 1)));
    }

    #[test]
    fn reconcile_examples() {
        assert!(reconcile(&q(2, 4, 2, 3, 1)));
        for i in 1..=100 {
            assert!(reconcile(&q(2, 12, 11, i, 23)));
        }
        assert!(reconcile(&q(2, 2, 1, 1, 3)));
    }

    #[test]
    fn nonzero_examples() {
        assert!(pi_star_nonzero(&q(2, 4, 2, 3, 1)));
        for i in 1..=50 {
            assert!(!pi_star_nonzero(&q(2, 12, 11, i, 23)));
        }
        assert!(!pi_star_nonzero(&q(2, 4, 2, 1, 5)));
    }

    #[test]
    fn iota_examples() {
        assert_eq!(iota_pullback(3, 2, 2), (6, 2));
        assert_eq!(iota_pullback(7, 3, 1), (7, 1));
        assert_eq!(iota_pullback(1, 1, 5), (5, 5));
        let p2 = Prime::new(2).unwrap();
        let maps = iota_on_witt(2, 3, 3, p2, Direction::Pullback).unwrap();
        assert!(maps.iter().all(|m| m.target == Some(3 * m.source) && m.shift == 0));
        let maps = iota_on_witt(2, 3, 2, p2, Direction::Pullback).unwrap();
        assert!(maps.iter().all(|m| m.target == Some(m.source) && m.shift == 1));
        let maps = iota_on_witt(2, 3, 1, p2, Direction::Pushforward).unwrap();
        assert!(maps.iter().all(|m| m.target == Some(m.source) && m.shift == 0));
    }

    #[test]
    fn pi_star_examples() {
        // N has length 1 here, so p^2 kills it
        let a = q(2, 4, 2, 3, 1);
        let o = pi_star_oracle(&a, pi_star_r_max(&a)).unwrap();
        assert_eq!((o.image, o.n_length), (PiStarImage::Zero, 1));
        assert!(pi_star_nonzero(&a) && !pi_star_nonzero_on_k(&a));

        let b = q(3, 4, 2, 3, 1);
        let o = pi_star_oracle(&b, pi_star_r_max(&b)).unwrap();
        assert_eq!(o.cokernel_length(), predicted_cokernel(&b).unwrap());

        let green = q(2, 12, 11, 5, 23);
        assert!(lemma_predicate(&green));
        let o = pi_star_oracle(&green, pi_star_r_max(&green)).unwrap();
        assert_eq!(o.image, PiStarImage::Zero);
    }

    #[test]
    fn pi_star_scan() {
        for p in [2, 3] {
            for m in 2..=5 {
                for n in 1..m {
                    for i in 1..=4 {
                        for j in (1..=9).filter(|j| j % p != 0) {
                            let a = q(p, m, n, i, j);
                            let o = pi_star_oracle(&a, pi_star_r_max(&a) + 1).unwrap();
                            assert_eq!(o.cokernel_length(), predicted_cokernel(&a).unwrap_or(0), "{a:?}");
                            assert_eq!(o.m_length, band_length(a.p, m, i, j));
                        }
                    }
                }
            }
        }
    }
}
