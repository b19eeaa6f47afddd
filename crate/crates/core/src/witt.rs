//! Length bookkeeping for big and p-typical Witt vectors over a perfect field,
//! plus ghost-component Witt arithmetic over the rationals used as an oracle.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::padic::{clamp, floor_log, Prime};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TruncationSet {
    elements: BTreeSet<u64>,
}

impl TruncationSet {
    pub fn new(elements: impl IntoIterator<Item = u64>) -> Result<TruncationSet> {
        let elements: BTreeSet<u64> = elements.into_iter().collect();
        if elements.contains(&0) {
            return invalid("truncation sets hold positive integers");
        }
        for &n in &elements {
            for d in divisors(n) {
                if !elements.contains(&d) {
                    return invalid(format!("{n} is present but its divisor {d} is not"));
                }
            }
        }
        Ok(TruncationSet { elements })
    }

    pub fn full(m: u64) -> TruncationSet {
        TruncationSet { elements: (1..=m).collect() }
    }

    /// J/n = {m : nm ∈ J}.
    pub fn divide(&self, n: u64) -> TruncationSet {
        let elements = self.elements.iter().filter(|&&m| m % n == 0).map(|&m| m / n).collect();
        TruncationSet { elements }
    }

    pub fn contains(&self, n: u64) -> bool {
        self.elements.contains(&n)
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = u64> + '_ {
        self.elements.iter().copied()
    }
}

pub fn divisors(n: u64) -> Vec<u64> {
    (1..=n).filter(|d| n.is_multiple_of(*d)).collect()
}

/// Per-band lengths of a finite-length W(k)-module.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(into = "LengthModuleJson", try_from = "LengthModuleJson")]
pub struct LengthModule {
    pub p: Prime,
    pub bands: BTreeMap<u64, u64>,
}

#[derive(Serialize, Deserialize)]
struct LengthModuleJson {
    p: Prime,
    bands: BTreeMap<u64, u64>,
    total: u64,
}

impl From<LengthModule> for LengthModuleJson {
    fn from(m: LengthModule) -> Self {
        let total = m.total();
        LengthModuleJson { p: m.p, bands: m.bands, total }
    }
}

impl TryFrom<LengthModuleJson> for LengthModule {
    type Error = crate::error::Error;
    fn try_from(j: LengthModuleJson) -> Result<Self> {
        let m = LengthModule::new(j.p, j.bands)?;
        if m.total() != j.total {
            return invalid("total does not match the band lengths");
        }
        Ok(m)
    }
}

impl LengthModule {
    pub fn new(p: Prime, bands: BTreeMap<u64, u64>) -> Result<LengthModule> {
        if let Some(j) = bands.keys().find(|&&j| j == 0 || p.divides(j)) {
            return invalid(format!("band index {j} is not a positive integer prime to {p}"));
        }
        Ok(LengthModule { p, bands })
    }

    pub fn total(&self) -> u64 {
        self.bands.values().sum()
    }

    pub fn band(&self, j: u64) -> u64 {
        self.bands.get(&j).copied().unwrap_or(0)
    }
}

/// Band indices j ≤ bound prime to p.
pub fn band_indices(p: Prime, bound: u64) -> impl Iterator<Item = u64> {
    (1..=bound).filter(move |&j| !p.divides(j))
}

pub fn p_typical_count(set: &TruncationSet, p: Prime, j: u64) -> Result<u64> {
    if p.divides(j) {
        return invalid(format!("band index {j} is divisible by {p}"));
    }
    let max = set.iter().last().unwrap_or(0);
    let mut count = 0;
    let mut n = j;
    while n <= max {
        if set.contains(n) {
            count += 1;
        }
        n *= p.get();
    }
    Ok(count)
}

/// Band j of 𝐖_m(k) has length ⌊log_p(m/j)⌋ + 1.
pub fn big_witt_lengths(m: u64, p: Prime) -> LengthModule {
    let bands = band_indices(p, m).map(|j| (j, clamp(floor_log(p, m, j) + 1))).collect();
    LengthModule { p, bands }
}

/// Lengths of 𝐖_{ei}(k)/V_e𝐖_i(k), band by band.
pub fn verschiebung_quotient(e: u64, i: u64, p: Prime) -> LengthModule {
    let mut e_prime = e;
    while p.divides(e_prime) {
        e_prime /= p.get();
    }
    let bands = band_indices(p, e * i)
        .map(|j| {
            let whole = clamp(floor_log(p, e * i, j) + 1);
            let image = if j % e_prime == 0 && j / e_prime <= i {
                clamp(floor_log(p, i * e_prime, j) + 1)
            } else {
                0
            };
            (j, whole.saturating_sub(image))
        })
        .collect();
    LengthModule { p, bands }
}

/// Ghost components w_n, indexed by the truncation set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GhostVector {
    pub truncation: TruncationSet,
    pub components: BTreeMap<u64, BigRational>,
}

/// A Witt vector with rational coordinates a_n on a truncation set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WittVector {
    pub truncation: TruncationSet,
    pub coords: BTreeMap<u64, BigRational>,
}

fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

impl WittVector {
    pub fn new(truncation: TruncationSet, coords: BTreeMap<u64, BigRational>) -> Result<WittVector> {
        if !coords.keys().copied().eq(truncation.iter()) {
            return invalid("coordinate indices must equal the truncation set");
        }
        Ok(WittVector { truncation, coords })
    }

    pub fn from_integers(truncation: TruncationSet, coords: &[i64]) -> Result<WittVector> {
        if coords.len() != truncation.len() {
            return invalid("one coordinate per element of the truncation set");
        }
        let coords = truncation.iter().zip(coords).map(|(n, &a)| (n, rat(a))).collect();
        WittVector::new(truncation, coords)
    }

    pub fn zero(truncation: TruncationSet) -> WittVector {
        let coords = truncation.iter().map(|n| (n, BigRational::zero())).collect();
        WittVector { truncation, coords }
    }

    /// The Teichmüller lift [x] = (x, 0, 0, …).
    pub fn teichmuller(truncation: TruncationSet, x: BigRational) -> WittVector {
        let coords = truncation
            .iter()
            .map(|n| (n, if n == 1 { x.clone() } else { BigRational::zero() }))
            .collect();
        WittVector { truncation, coords }
    }

    pub fn ghost(&self) -> GhostVector {
        let components = self
            .truncation
            .iter()
            .map(|n| {
                let w = divisors(n).into_iter().fold(BigRational::zero(), |acc, d| {
                    acc + rat(d as i64) * num_traits::pow(self.coords[&d].clone(), (n / d) as usize)
                });
                (n, w)
            })
            .collect();
        GhostVector { truncation: self.truncation.clone(), components }
    }

    pub fn from_ghost(g: &GhostVector) -> WittVector {
        let mut coords: BTreeMap<u64, BigRational> = BTreeMap::new();
        for n in g.truncation.iter() {
            let lower = divisors(n)
                .into_iter()
                .filter(|&d| d < n)
                .fold(BigRational::zero(), |acc, d| {
                    acc + rat(d as i64) * num_traits::pow(coords[&d].clone(), (n / d) as usize)
                });
            coords.insert(n, (g.components[&n].clone() - lower) / rat(n as i64));
        }
        WittVector { truncation: g.truncation.clone(), coords }
    }

    pub fn is_integral(&self) -> bool {
        self.coords.values().all(|a| a.is_integer())
    }

    fn same_truncation(&self, other: &WittVector) -> Result<()> {
        if self.truncation != other.truncation {
            return invalid("Witt vectors live on different truncation sets");
        }
        Ok(())
    }

    fn ghostwise(&self, other: &WittVector, op: impl Fn(&BigRational, &BigRational) -> BigRational) -> Result<WittVector> {
        self.same_truncation(other)?;
        let (a, b) = (self.ghost(), other.ghost());
        let components = a
            .components
            .iter()
            .map(|(n, x)| (*n, op(x, &b.components[n])))
            .collect();
        Ok(WittVector::from_ghost(&GhostVector { truncation: a.truncation, components }))
    }

    pub fn add(&self, other: &WittVector) -> Result<WittVector> {
        self.ghostwise(other, |x, y| x + y)
    }

    pub fn mul(&self, other: &WittVector) -> Result<WittVector> {
        self.ghostwise(other, |x, y| x * y)
    }

    pub fn scale(&self, k: i64) -> WittVector {
        let g = self.ghost();
        let components = g.components.into_iter().map(|(n, w)| (n, w * rat(k))).collect();
        WittVector::from_ghost(&GhostVector { truncation: g.truncation, components })
    }

    /// V_n from J/n to `target` = J: ghost w_m ↦ n·w_{m/n} when n | m, else 0.
    pub fn verschiebung(&self, n: u64, target: &TruncationSet) -> Result<WittVector> {
        if target.divide(n) != self.truncation {
            return invalid(format!("V_{n} needs a source equal to the target divided by {n}"));
        }
        let g = self.ghost();
        let components = target
            .iter()
            .map(|m| {
                let w = if m % n == 0 { rat(n as i64) * g.components[&(m / n)].clone() } else { BigRational::zero() };
                (m, w)
            })
            .collect();
        Ok(WittVector::from_ghost(&GhostVector { truncation: target.clone(), components }))
    }

    /// F_n from J to J/n: ghost w_m ↦ w_{nm}.
    pub fn frobenius(&self, n: u64) -> WittVector {
        let g = self.ghost();
        let target = self.truncation.divide(n);
        let components = target.iter().map(|m| (m, g.components[&(n * m)].clone())).collect();
        WittVector::from_ghost(&GhostVector { truncation: target, components })
    }

    /// V_n computed directly on coordinates: (V_n a)_m = a_{m/n} when n | m.
    pub fn verschiebung_coords(&self, n: u64, target: &TruncationSet) -> Result<WittVector> {
        if target.divide(n) != self.truncation {
            return invalid(format!("V_{n} needs a source equal to the target divided by {n}"));
        }
        let coords = target
            .iter()
            .map(|m| (m, if m % n == 0 { self.coords[&(m / n)].clone() } else { BigRational::zero() }))
            .collect();
        Ok(WittVector { truncation: target.clone(), coords })
    }

    pub fn max_abs_denominator(&self) -> BigInt {
        self.coords.values().map(|a| a.denom().abs()).max().unwrap_or_else(BigInt::one)
    }
}
