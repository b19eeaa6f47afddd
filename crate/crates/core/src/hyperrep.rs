//! Dimension sequences of p-typical hyper-representations and TR lengths.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde::Serialize;

use crate::error::{invalid, Result};
use crate::kgroups::k_closed_form;
use crate::padic::Prime;
use crate::witt::band_indices;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum HyperRep {
    /// C_n ↦ [⌈nμ⌉]; dimension sequence ⌈p^s μ⌉.
    Slope(BigRational),
    /// d̃_0 copies of the trivial line plus Σ k_i λ̃_i, with `k[0]` = k_1.
    Coeffs { d0: u64, k: Vec<u64> },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum TrLength {
    Finite(u64),
    Infinite,
}

impl HyperRep {
    pub fn slope(num: u64, den: u64) -> Result<HyperRep> {
        if num == 0 || den == 0 {
            return invalid("slopes are positive rationals");
        }
        Ok(HyperRep::Slope(BigRational::new(BigInt::from(num), BigInt::from(den))))
    }

    pub fn lambda(n: usize) -> HyperRep {
        if n == 0 {
            return HyperRep::Coeffs { d0: 1, k: vec![] };
        }
        let mut k = vec![0; n];
        k[n - 1] = 1;
        HyperRep::Coeffs { d0: 0, k }
    }

    pub fn is_fixed_point_free(&self) -> bool {
        match self {
            HyperRep::Slope(_) => true,
            HyperRep::Coeffs { d0, .. } => *d0 == 0,
        }
    }
}

pub fn dims(h: &HyperRep, p: Prime, s: u32) -> u64 {
    match h {
        HyperRep::Slope(mu) => {
            let scaled = mu * BigRational::from_integer(num_traits::pow(BigInt::from(p.get()), s as usize));
            scaled.ceil().to_integer().to_u64().expect("dimension fits in u64")
        }
        HyperRep::Coeffs { d0, k } => d0 + k.iter().take(s as usize).sum::<u64>(),
    }
}

/// Differences of a nondecreasing prefix: (d̃_0, [k_1, k_2, …]).
pub fn irreducible_decomposition(prefix: &[u64]) -> Result<(u64, Vec<u64>)> {
    let Some(&d0) = prefix.first() else {
        return invalid("empty dimension prefix");
    };
    let mut k = Vec::with_capacity(prefix.len().saturating_sub(1));
    for w in prefix.windows(2) {
        if w[1] < w[0] {
            return invalid(format!("dimension sequence decreases from {} to {}", w[0], w[1]));
        }
        k.push(w[1] - w[0]);
    }
    Ok((d0, k))
}

/// Length of TR_{2i−α̃}(k) by the three-way case analysis on d̃_s(α̃).
pub fn tr_length_general(h: &HyperRep, p: Prime, i: i64) -> Result<TrLength> {
    if !h.is_fixed_point_free() {
        return invalid("the hyper-representation has a fixed-point part");
    }
    if i < 0 {
        return Ok(TrLength::Finite(0));
    }
    let i = i as u64;
    match h {
        HyperRep::Coeffs { k, .. } => {
            let stable = k.len() as u32;
            for s in 0..=stable {
                let (lo, hi) = (dims(h, p, s), dims(h, p, s + 1));
                if lo <= i && i < hi {
                    return Ok(TrLength::Finite(s as u64 + 1));
                }
            }
            if dims(h, p, stable) == i {
                Ok(TrLength::Infinite)
            } else {
                Ok(TrLength::Finite(0))
            }
        }
        HyperRep::Slope(_) => {
            // d̃_s grows without bound, so the middle case never occurs.
            let mut s = 0;
            loop {
                let (lo, hi) = (dims(h, p, s), dims(h, p, s + 1));
                if i < lo {
                    return Ok(TrLength::Finite(0));
                }
                if i < hi {
                    return Ok(TrLength::Finite(s as u64 + 1));
                }
                s += 1;
            }
        }
    }
}

/// ⟨⌊log_p(i/μ)⌋ + 1⟩ for μ = num/den, computed exactly.
pub fn tr_length_slope(p: Prime, num: u64, den: u64, i: u64) -> u64 {
    assert!(num > 0 && den > 0);
    // i/μ = i·den/num
    let (a, b) = (i as u128 * den as u128, num as u128);
    if a < b {
        return 0;
    }
    let mut s = 0;
    let mut scaled = b;
    while scaled * p.get() as u128 <= a {
        scaled *= p.get() as u128;
        s += 1;
    }
    s + 1
}

/// Σ_j tr(j/e) − Σ_j tr(j) against the closed-form total i(e−1).
pub fn tc_length_check(p: Prime, e: u64, i: u64) -> bool {
    let over_e: u64 = band_indices(p, e * i).map(|j| tr_length_slope(p, j, e, i)).sum();
    let over_one: u64 = band_indices(p, i).map(|j| tr_length_slope(p, j, 1, i)).sum();
    over_e >= over_one && over_e - over_one == k_closed_form(p, e, i).total
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(n: u64) -> Prime {
        Prime::new(n).unwrap()
    }

    #[test]
    fn dims_examples() {
        assert_eq!(dims(&HyperRep::slope(1, 2).unwrap(), p(3), 2), 5);
        let l2 = HyperRep::lambda(2);
        assert_eq!(dims(&l2, p(3), 1), 0);
        assert_eq!(dims(&l2, p(3), 2), 1);
        let one = HyperRep::slope(1, 1).unwrap();
        for s in 0..6 {
            assert_eq!(dims(&one, p(5), s), 5u64.pow(s));
        }
    }

    #[test]
    fn decomposition_examples() {
        assert_eq!(irreducible_decomposition(&[1, 1, 1]).unwrap(), (1, vec![0, 0]));
        assert_eq!(irreducible_decomposition(&[0, 1, 1]).unwrap(), (0, vec![1, 0]));
        assert_eq!(irreducible_decomposition(&[1, 3, 5]).unwrap(), (1, vec![2, 2]));
        assert!(irreducible_decomposition(&[2, 1]).is_err());
    }

    #[test]
    fn general_examples() {
        let l1 = HyperRep::lambda(1);
        assert_eq!(tr_length_general(&l1, p(2), 0).unwrap(), TrLength::Finite(1));
        assert_eq!(tr_length_general(&l1, p(2), 1).unwrap(), TrLength::Infinite);
        assert_eq!(tr_length_general(&l1, p(2), 2).unwrap(), TrLength::Finite(0));
        let one = HyperRep::slope(1, 1).unwrap();
        assert_eq!(tr_length_general(&one, p(2), 3).unwrap(), TrLength::Finite(2));
        assert_eq!(tr_length_general(&one, p(2), -1).unwrap(), TrLength::Finite(0));
        assert!(tr_length_general(&HyperRep::lambda(0), p(2), 1).is_err());
    }

    #[test]
    fn slope_examples() {
        assert_eq!(tr_length_slope(p(2), 1, 1, 1), 1);
        assert_eq!(tr_length_slope(p(3), 4, 1, 1), 0);
        for e in 1..=6 {
            for i in 1..=10 {
                let total: u64 = band_indices(p(2), e * i).map(|j| tr_length_slope(p(2), j, e, i)).sum();
                assert_eq!(total, e * i);
            }
        }
    }

    #[test]
    fn tc_examples() {
        assert!(tc_length_check(p(2), 2, 5));
        assert!(tc_length_check(p(3), 4, 7));
        assert!(tc_length_check(p(5), 1, 3));
    }
}
