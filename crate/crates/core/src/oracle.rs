//! Brute-force syntomic complexes for a single p-band, as exact integer
//! matrices and mod-p matrices, with their cohomology and cochain products.
//!
//! Band (p, e, i, j) with levels r = 0..=r_max has degrees d_r = p^r j and
//! basis symbols
//!
//! ```text
//! N⁰: p^⟨i−⌊d/e⌋⟩ x^d/⌊d/e⌋!        W⁰: x^d/⌊d/e⌋!
//! N¹: p^⟨i−⌈d/e⌉⟩ x^d/Γ⌈d/e⌉ dlog x  W¹: x^d/Γ⌈d/e⌉ dlog x
//! ```
//!
//! The fiber of φ/p^i − can is the total complex
//! `N⁰ → N¹ ⊕ W⁰ → W¹`, with the φ arrow out of the top level dropped.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_traits::Zero;
use serde::Serialize;

use crate::error::{invalid, violation, Result};
use crate::kgroups::band_length;
use crate::linalg::{kernel_mod_p, mat_vec_mod_p, smith_normal_form, transpose, Echelon, IntMatrix};
use crate::mult::{target_indices, GeneratorDescriptor, Parity};
use crate::padic::{
    brace, ceil_div, clamp, epsilon, factorial_unit_mod, floor_log, inv_mod, pow, rising, vp_big,
    vp_factorial, Prime,
};

/// Levels needed for the truncated band to have stable cohomology.
pub fn auto_r_max(p: Prime, e: u64, i: u64, j: u64) -> usize {
    clamp(floor_log(p, e * i, j)) as usize + 2
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct BandSpec {
    pub p: Prime,
    pub e: u64,
    pub i: u64,
    pub j: u64,
    pub r_max: usize,
}

impl BandSpec {
    pub fn new(p: Prime, e: u64, i: u64, j: u64, r_max: usize) -> Result<BandSpec> {
        if e == 0 || j == 0 {
            return invalid("e and j must be positive");
        }
        if p.divides(j) {
            return invalid(format!("band index {j} is divisible by {p}"));
        }
        if r_max < 1 {
            return invalid("at least two levels are needed");
        }
        let top = (p.get() as u128).checked_pow(r_max as u32 + 1).map(|q| q * j as u128);
        if top.is_none_or(|d| d > u64::MAX as u128 / 2) {
            return invalid(format!("r_max = {r_max} overflows the degree range"));
        }
        Ok(BandSpec { p, e, i, j, r_max })
    }

    pub fn auto(p: Prime, e: u64, i: u64, j: u64) -> Result<BandSpec> {
        BandSpec::new(p, e, i, j, auto_r_max(p, e, i, j))
    }

    pub fn levels(&self) -> usize {
        self.r_max + 1
    }

    pub fn degree(&self, r: usize) -> u64 {
        self.p.get().pow(r as u32) * self.j
    }

    fn floor(&self, r: usize) -> u64 {
        self.degree(r) / self.e
    }

    fn ceil(&self, r: usize) -> u64 {
        ceil_div(self.degree(r), self.e)
    }

    /// Nygaard exponent of the degree-0 basis at level r.
    pub fn n0_exponent(&self, r: usize) -> u64 {
        clamp(self.i as i64 - self.floor(r) as i64)
    }

    /// Nygaard exponent of the degree-1 basis at level r.
    pub fn n1_exponent(&self, r: usize) -> u64 {
        clamp(self.i as i64 - self.ceil(r) as i64)
    }
}

/// Per-level maps of one band, as exact integers.
#[derive(Debug, Clone)]
pub struct BandComplex {
    pub spec: BandSpec,
    pub degrees: Vec<u64>,
    /// d(g_r) = d[r]·h_r on the Nygaard side.
    pub d_nygaard: Vec<BigInt>,
    /// d(x^d/⌊d/e⌋!) = d_full[r]·x^d/Γ⌈d/e⌉ dlog x.
    pub d_full: Vec<BigInt>,
    pub can0: Vec<BigInt>,
    pub can1: Vec<BigInt>,
    /// φ/p^i from level r to level r+1, r < r_max.
    pub phi0: Vec<BigInt>,
    pub phi1: Vec<BigInt>,
}

/// p^a · hi!/lo! / p^b as an exact integer.
fn exact_ratio(p: Prime, a: u64, lo: u64, hi: u64, b: u64) -> Result<BigInt> {
    let num = pow(p, a) * rising(lo, hi);
    let den = pow(p, b);
    let (q, r) = num_integer::Integer::div_rem(&num, &den);
    if !r.is_zero() {
        return violation(format!("p^{a}·{hi}!/{lo}! is not divisible by p^{b} (p={p})"));
    }
    Ok(q)
}

/// p^a · hi!/lo! / p^b reduced mod p, via valuations and unit parts.
fn ratio_mod_p(p: Prime, a: u64, lo: u64, hi: u64, b: u64) -> Result<u64> {
    let v = a as i64 + vp_factorial(hi, p) as i64 - vp_factorial(lo, p) as i64 - b as i64;
    if v < 0 {
        return violation(format!("p^{a}·{hi}!/{lo}! is not divisible by p^{b} (p={p})"));
    }
    if v > 0 {
        return Ok(0);
    }
    let q = p.get();
    Ok(factorial_unit_mod(hi, p) * inv_mod(factorial_unit_mod(lo, p), q) % q)
}

pub fn build_band(spec: BandSpec) -> Result<BandComplex> {
    let p = spec.p;
    let levels = spec.levels();
    let mut band = BandComplex {
        spec,
        degrees: (0..levels).map(|r| spec.degree(r)).collect(),
        d_nygaard: Vec::with_capacity(levels),
        d_full: Vec::with_capacity(levels),
        can0: Vec::with_capacity(levels),
        can1: Vec::with_capacity(levels),
        phi0: Vec::with_capacity(levels - 1),
        phi1: Vec::with_capacity(levels - 1),
    };
    for r in 0..levels {
        let d = spec.degree(r);
        let b = BigInt::from(brace(d, spec.e));
        band.d_nygaard.push(pow(p, epsilon(spec.i, d, spec.e)) * &b);
        band.d_full.push(b);
        band.can0.push(pow(p, spec.n0_exponent(r)));
        band.can1.push(pow(p, spec.n1_exponent(r)));
        if r + 1 < levels {
            band.phi0.push(exact_ratio(p, spec.n0_exponent(r), spec.floor(r), spec.floor(r + 1), spec.i)?);
            band.phi1.push(exact_ratio(p, spec.n1_exponent(r) + 1, spec.ceil(r) - 1, spec.ceil(r + 1) - 1, spec.i)?);
        }
    }
    Ok(band)
}

impl BandComplex {
    /// δ⁰: N⁰ → N¹ ⊕ W⁰, rows N¹ levels then W⁰ levels.
    pub fn delta0(&self) -> IntMatrix {
        let l = self.spec.levels();
        let mut m = IntMatrix::zeros(2 * l, l);
        for r in 0..l {
            m.set(r, r, self.d_nygaard[r].clone());
            m.set(l + r, r, -self.can0[r].clone());
            if r + 1 < l {
                m.add_to(l + r + 1, r, &self.phi0[r]);
            }
        }
        m
    }

    /// δ¹: N¹ ⊕ W⁰ → W¹.
    pub fn delta1(&self) -> IntMatrix {
        let l = self.spec.levels();
        let mut m = IntMatrix::zeros(l, 2 * l);
        for r in 0..l {
            m.set(r, r, -self.can1[r].clone());
            if r + 1 < l {
                m.add_to(r + 1, r, &self.phi1[r]);
            }
            m.set(r, l + r, -self.d_full[r].clone());
        }
        m
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct IntegralCohomology {
    pub h0_rank: usize,
    pub h1_length: u64,
    pub elementary_divisors: Vec<String>,
}

pub fn integral_cohomology(band: &BandComplex) -> Result<IntegralCohomology> {
    let snf = smith_normal_form(&band.delta0());
    let p = band.spec.p;
    let mut h1_length = 0;
    for d in snf.diagonal.iter().filter(|d| !d.is_zero()) {
        h1_length += vp_big(d, p)?;
    }
    Ok(IntegralCohomology {
        h0_rank: band.spec.levels() - snf.rank(),
        h1_length,
        elementary_divisors: snf.diagonal.iter().map(|d| d.to_string()).collect(),
    })
}

/// p-length of H¹ of the truncated fiber complex.
pub fn h1_fiber_lengths(p: Prime, e: u64, i: u64, j: u64, r_max: usize) -> Result<u64> {
    let band = build_band(BandSpec::new(p, e, i, j, r_max)?)?;
    let h = integral_cohomology(&band)?;
    if h.h0_rank != 0 {
        return violation(format!("integral H⁰ has rank {} on band (p={p}, e={e}, i={i}, j={j})", h.h0_rank));
    }
    Ok(h.h1_length)
}

/// The band's maps reduced mod p, built from valuations without big factorials.
#[derive(Debug, Clone)]
pub struct ModPBand {
    pub spec: BandSpec,
    /// 2L × L, rows N¹ then W⁰.
    pub delta0: Vec<Vec<u64>>,
    /// L × 2L, columns N¹ then W⁰.
    pub delta1: Vec<Vec<u64>>,
}

pub fn build_band_mod_p(spec: BandSpec) -> Result<ModPBand> {
    let p = spec.p;
    let q = p.get();
    let l = spec.levels();
    let mut delta0 = vec![vec![0; l]; 2 * l];
    let mut delta1 = vec![vec![0; 2 * l]; l];
    let unit_if_zero = |k: u64| u64::from(k == 0);
    for r in 0..l {
        let d = spec.degree(r);
        let dn = if epsilon(spec.i, d, spec.e) > 0 { 0 } else { brace(d, spec.e) % q };
        delta0[r][r] = dn;
        delta0[l + r][r] = (q - unit_if_zero(spec.n0_exponent(r))) % q;
        delta1[r][r] = (q - unit_if_zero(spec.n1_exponent(r))) % q;
        delta1[r][l + r] = (q - brace(d, spec.e) % q) % q;
        if r + 1 < l {
            let phi0 = ratio_mod_p(p, spec.n0_exponent(r), spec.floor(r), spec.floor(r + 1), spec.i)?;
            delta0[l + r + 1][r] = (delta0[l + r + 1][r] + phi0) % q;
            let phi1 = ratio_mod_p(p, spec.n1_exponent(r) + 1, spec.ceil(r) - 1, spec.ceil(r + 1) - 1, spec.i)?;
            delta1[r + 1][r] = (delta1[r + 1][r] + phi1) % q;
        }
    }
    Ok(ModPBand { spec, delta0, delta1 })
}

/// A degree-1 cochain (n¹, w⁰).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Cochain1 {
    pub n1: Vec<u64>,
    pub w0: Vec<u64>,
}

impl Cochain1 {
    fn concat(&self) -> Vec<u64> {
        self.n1.iter().chain(&self.w0).copied().collect()
    }

    /// Coordinates with W⁰ first, the order used for canonical reduction.
    fn w_first(&self) -> Vec<u64> {
        self.w0.iter().chain(&self.n1).copied().collect()
    }

    fn from_w_first(v: &[u64], l: usize) -> Cochain1 {
        Cochain1 { w0: v[..l].to_vec(), n1: v[l..].to_vec() }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ModPCohomology {
    pub spec: BandSpec,
    pub h0_basis: Vec<Vec<u64>>,
    pub h1_basis: Vec<Cochain1>,
    #[serde(skip)]
    coboundaries: Echelon,
}

impl ModPCohomology {
    pub fn h0_dim(&self) -> usize {
        self.h0_basis.len()
    }

    pub fn h1_dim(&self) -> usize {
        self.h1_basis.len()
    }

    /// Canonical form of a degree-1 cochain modulo coboundaries.
    pub fn reduce(&self, c: &Cochain1) -> Cochain1 {
        let v = self.coboundaries.reduce(&c.w_first(), self.spec.p.get());
        Cochain1::from_w_first(&v, self.spec.levels())
    }
}

fn normalize(v: &mut [u64], lead: usize, p: u64) {
    let inv = inv_mod(v[lead], p);
    for x in v.iter_mut() {
        *x = *x * inv % p;
    }
}

fn leading(v: &[u64]) -> Option<usize> {
    v.iter().position(|&x| x != 0)
}

pub fn modp_cohomology(p: Prime, e: u64, i: u64, j: u64, r_max: usize) -> Result<ModPCohomology> {
    modp_cohomology_of(&build_band_mod_p(BandSpec::new(p, e, i, j, r_max)?)?)
}

pub fn modp_cohomology_of(band: &ModPBand) -> Result<ModPCohomology> {
    let q = band.spec.p.get();
    let l = band.spec.levels();
    let mut h0_basis = kernel_mod_p(&band.delta0, q, l);
    for v in h0_basis.iter_mut() {
        let lead = leading(v).expect("kernel vectors are nonzero");
        normalize(v, lead, q);
    }
    let images: Vec<Vec<u64>> = transpose(&band.delta0)
        .into_iter()
        .map(|col| Cochain1 { n1: col[..l].to_vec(), w0: col[l..].to_vec() }.w_first())
        .collect();
    let coboundaries = Echelon::new(&images, q, 2 * l);
    let mut span = coboundaries.clone();
    let mut h1_basis = Vec::new();
    for z in kernel_mod_p(&band.delta1, q, 2 * l) {
        let z = Cochain1 { n1: z[..l].to_vec(), w0: z[l..].to_vec() };
        if span.insert(&z.w_first(), q) {
            let v = coboundaries.reduce(&z.w_first(), q);
            let mut c = Cochain1::from_w_first(&v, l);
            match leading(&c.n1) {
                Some(lead) => {
                    let inv = inv_mod(c.n1[lead], q);
                    c.n1.iter_mut().chain(c.w0.iter_mut()).for_each(|x| *x = *x * inv % q);
                }
                None => {
                    let mut all = c.concat();
                    let lead = leading(&all).expect("nonzero class");
                    normalize(&mut all, lead, q);
                    c = Cochain1 { n1: all[..l].to_vec(), w0: all[l..].to_vec() };
                }
            }
            h1_basis.push(c);
        }
    }
    Ok(ModPCohomology { spec: band.spec, h0_basis, h1_basis, coboundaries })
}

/// Kernel of φ/p^i − can in one cochain degree with the level-0 row dropped.
pub fn window_kernel(band: &ModPBand, parity: Parity) -> Vec<Vec<u64>> {
    let q = band.spec.p.get();
    let l = band.spec.levels();
    let rows: Vec<Vec<u64>> = match parity {
        Parity::A => band.delta0[l + 1..].to_vec(),
        Parity::B => band.delta1[1..].iter().map(|row| row[..l].to_vec()).collect(),
    };
    let mut k = kernel_mod_p(&rows, q, l);
    for v in k.iter_mut() {
        let lead = leading(v).expect("kernel vectors are nonzero");
        normalize(v, lead, q);
    }
    k
}

/// Unique window representative, if the window kernel is a line.
pub fn window_rep(band: &ModPBand, parity: Parity) -> Option<Vec<u64>> {
    let mut k = window_kernel(band, parity);
    (k.len() == 1).then(|| k.remove(0))
}

/// The structure constant of x^{d1}/⌊d1/e⌋! · x^{d2}/⌊d2/e⌋! in the basis x^{d1+d2}/⌊(d1+d2)/e⌋!.
pub fn dp_product_aa(d1: u64, d2: u64, e: u64) -> Result<BigInt> {
    let (f1, f2, f3) = (d1 / e, d2 / e, (d1 + d2) / e);
    exact_quotient(rising(f1, f3), crate::padic::factorial(f2).into())
}

/// The structure constant of x^{d1}/⌊d1/e⌋! · x^{d2}/Γ⌈d2/e⌉ dlog x in the basis x^{d1+d2}/Γ⌈(d1+d2)/e⌉ dlog x.
pub fn dp_product_ab(d1: u64, d2: u64, e: u64) -> Result<BigInt> {
    let (f1, g2, g3) = (d1 / e, ceil_div(d2, e) - 1, ceil_div(d1 + d2, e) - 1);
    if g3 < g2 {
        return violation("divided-power product lowers the Γ index");
    }
    exact_quotient(rising(g2, g3), crate::padic::factorial(f1).into())
}

fn exact_quotient(num: BigInt, den: BigInt) -> Result<BigInt> {
    let (q, r) = num_integer::Integer::div_rem(&num, &den);
    if !r.is_zero() {
        return violation(format!("divided-power product {num}/{den} is not integral"));
    }
    Ok(q)
}

/// Mod-p structure constant between normalized Nygaard bases, from valuations.
fn nygaard_constant(p: Prime, numer: u64, den1: u64, den2: u64, exponent: i64) -> Result<u64> {
    let v = exponent + vp_factorial(numer, p) as i64 - vp_factorial(den1, p) as i64 - vp_factorial(den2, p) as i64;
    if v < 0 {
        return violation("product of normalized cochains is not integral");
    }
    if v > 0 {
        return Ok(0);
    }
    let q = p.get();
    let den = factorial_unit_mod(den1, p) * factorial_unit_mod(den2, p) % q;
    Ok(factorial_unit_mod(numer, p) * inv_mod(den, q) % q)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OracleMode {
    /// True cocycle representatives and the full cup product on the fiber.
    Honest,
    /// Componentwise product of window representatives.
    Window,
}

#[derive(Debug, Clone, Serialize)]
pub struct ProductOutcome {
    pub mode: OracleMode,
    pub i3: u64,
    pub j3: u64,
    pub v: u64,
    /// None when the product is zero.
    pub lambda: Option<u64>,
    pub operands_exist: (bool, bool),
    pub target_exists: bool,
    /// Product components per target level (N part, and W⁰ part for b).
    pub components: Vec<u64>,
}

impl ProductOutcome {
    pub fn is_nonzero(&self) -> bool {
        self.lambda.is_some()
    }
}

/// Caches mod-p cohomology per band so grids of products stay cheap.
#[derive(Default)]
pub struct ProductOracle {
    bands: HashMap<BandSpec, (ModPBand, ModPCohomology)>,
}

impl ProductOracle {
    pub fn new() -> ProductOracle {
        ProductOracle::default()
    }

    fn band(&mut self, spec: BandSpec) -> Result<&(ModPBand, ModPCohomology)> {
        if let std::collections::hash_map::Entry::Vacant(e) = self.bands.entry(spec) {
            let band = build_band_mod_p(spec)?;
            let coh = modp_cohomology_of(&band)?;
            e.insert((band, coh));
        }
        Ok(&self.bands[&spec])
    }

    /// Honest mode when both operands exist, window mode otherwise.
    pub fn product(&mut self, g1: &GeneratorDescriptor, g2: &GeneratorDescriptor) -> Result<ProductOutcome> {
        self.product_in(g1, g2, None)
    }

    /// Forces a mode; honest mode still requires both operands to exist.
    pub fn product_in(
        &mut self,
        g1: &GeneratorDescriptor,
        g2: &GeneratorDescriptor,
        mode: Option<OracleMode>,
    ) -> Result<ProductOutcome> {
        if g1.parity != Parity::A {
            if g2.parity == Parity::A {
                return self.product_in(g2, g1, mode);
            }
            return invalid("products of two b classes are zero and not computed by the oracle");
        }
        if g1.p != g2.p || g1.e != g2.e {
            return invalid("operands come from different rings");
        }
        let (p, e) = (g1.p, g1.e);
        let (i3, j3, v) = target_indices(g1.i, g1.j, g2.i, g2.j, p);
        let r = [(g1.i, g1.j), (g2.i, g2.j), (i3, j3)]
            .iter()
            .map(|&(i, j)| clamp(floor_log(p, e * i, j)))
            .max()
            .unwrap() as usize
            + 3;
        let target = GeneratorDescriptor::new(g2.parity, p, e, i3, j3)?;
        let exists = (g1.exists, g2.exists);
        let mode = mode.unwrap_or(if g1.exists && g2.exists { OracleMode::Honest } else { OracleMode::Window });
        match mode {
            OracleMode::Honest if !(g1.exists && g2.exists) => {
                invalid(format!("honest products need existing operands, got {g1} and {g2}"))
            }
            OracleMode::Honest => self.honest(g1, g2, &target, r, v, exists),
            OracleMode::Window => self.windowed(g1, g2, &target, r, v, exists),
        }
    }

    fn honest(
        &mut self,
        g1: &GeneratorDescriptor,
        g2: &GeneratorDescriptor,
        target: &GeneratorDescriptor,
        r: usize,
        v: u64,
        exists: (bool, bool),
    ) -> Result<ProductOutcome> {
        let (p, e) = (g1.p, g1.e);
        let q = p.get();
        let s1 = BandSpec::new(p, e, g1.i, g1.j, r)?;
        let s2 = BandSpec::new(p, e, g2.i, g2.j, r)?;
        let s3 = BandSpec::new(p, e, target.i, target.j, r + v as usize)?;
        let x = single(&self.band(s1)?.1.h0_basis, g1)?.clone();
        let l3 = s3.levels();
        let outcome = |components: Vec<u64>, lambda: Option<u64>| ProductOutcome {
            mode: OracleMode::Honest,
            i3: target.i,
            j3: target.j,
            v,
            lambda,
            operands_exist: exists,
            target_exists: target.exists,
            components,
        };
        match g2.parity {
            Parity::A => {
                let y = single(&self.band(s2)?.1.h0_basis, g2)?.clone();
                let mut prod = vec![0; l3];
                for lvl in 0..=r {
                    if x[lvl] == 0 || y[lvl] == 0 {
                        continue;
                    }
                    let c = aa_constant(p, &s1, &s2, &s3, lvl, v as usize)?;
                    prod[lvl + v as usize] = (prod[lvl + v as usize] + x[lvl] * y[lvl] % q * c) % q;
                }
                let (band3, coh3) = self.band(s3)?;
                if mat_vec_mod_p(&band3.delta0, &prod, q).iter().any(|&c| c != 0) {
                    return violation(format!("product of H⁰ classes is not a cocycle: {prod:?}"));
                }
                if prod.iter().all(|&c| c == 0) {
                    return Ok(outcome(prod, None));
                }
                let z = coh3.h0_basis.first().ok_or_else(|| no_target(target, &prod))?;
                let lambda = common_ratio(&prod, z, q).ok_or_else(|| inconsistent(&prod, z))?;
                Ok(outcome(prod, Some(lambda)))
            }
            Parity::B => {
                let y = single(&self.band(s2)?.1.h1_basis, g2)?.clone();
                let mut prod = Cochain1 { n1: vec![0; l3], w0: vec![0; l3] };
                for lvl in 0..=r {
                    if x[lvl] == 0 {
                        continue;
                    }
                    let t = lvl + v as usize;
                    if y.n1[lvl] != 0 {
                        let c = ab_constant(p, &s1, &s2, &s3, lvl, v as usize)?;
                        prod.n1[t] = (prod.n1[t] + x[lvl] * y.n1[lvl] % q * c) % q;
                    }
                    // can(a) · w⁰ on the W side
                    if y.w0[lvl] != 0 && s1.n0_exponent(lvl) == 0 {
                        let c = w_constant(p, &s1, &s2, lvl)?;
                        prod.w0[t] = (prod.w0[t] + x[lvl] * y.w0[lvl] % q * c) % q;
                    }
                }
                let (band3, coh3) = self.band(s3)?;
                if mat_vec_mod_p(&band3.delta1, &prod.concat(), q).iter().any(|&c| c != 0) {
                    return violation(format!("a·b product is not a cocycle: {prod:?}"));
                }
                let reduced = coh3.reduce(&prod);
                let flat = reduced.w_first();
                if flat.iter().all(|&c| c == 0) {
                    return Ok(outcome(reduced.concat(), None));
                }
                let z = coh3.h1_basis.first().ok_or_else(|| no_target(target, &flat))?.w_first();
                let lambda = common_ratio(&flat, &z, q).ok_or_else(|| inconsistent(&flat, &z))?;
                Ok(outcome(reduced.concat(), Some(lambda)))
            }
        }
    }

    fn windowed(
        &mut self,
        g1: &GeneratorDescriptor,
        g2: &GeneratorDescriptor,
        target: &GeneratorDescriptor,
        r: usize,
        v: u64,
        exists: (bool, bool),
    ) -> Result<ProductOutcome> {
        let (p, e) = (g1.p, g1.e);
        let q = p.get();
        let s1 = BandSpec::new(p, e, g1.i, g1.j, r)?;
        let s2 = BandSpec::new(p, e, g2.i, g2.j, r)?;
        let s3 = BandSpec::new(p, e, target.i, target.j, r + v as usize)?;
        let x = window_rep(&self.band(s1)?.0, Parity::A)
            .ok_or_else(|| crate::error::Error::InvalidInput(format!("{g1} has no window representative")))?;
        let y = window_rep(&self.band(s2)?.0, g2.parity)
            .ok_or_else(|| crate::error::Error::InvalidInput(format!("{g2} has no window representative")))?;
        let mut prod = vec![0; s3.levels()];
        for lvl in 0..=r {
            if x[lvl] == 0 || y[lvl] == 0 {
                continue;
            }
            let c = match g2.parity {
                Parity::A => aa_constant(p, &s1, &s2, &s3, lvl, v as usize)?,
                Parity::B => ab_constant(p, &s1, &s2, &s3, lvl, v as usize)?,
            };
            let t = lvl + v as usize;
            prod[t] = (prod[t] + x[lvl] * y[lvl] % q * c) % q;
        }
        let mut out = ProductOutcome {
            mode: OracleMode::Window,
            i3: target.i,
            j3: target.j,
            v,
            lambda: None,
            operands_exist: exists,
            target_exists: target.exists,
            components: prod.clone(),
        };
        if prod.iter().all(|&c| c == 0) {
            return Ok(out);
        }
        let z = window_rep(&self.band(s3)?.0, g2.parity).ok_or_else(|| no_target(target, &prod))?;
        out.lambda = Some(common_ratio(&prod, &z, q).ok_or_else(|| inconsistent(&prod, &z))?);
        Ok(out)
    }
}

pub fn product_oracle(g1: &GeneratorDescriptor, g2: &GeneratorDescriptor) -> Result<ProductOutcome> {
    ProductOracle::new().product(g1, g2)
}

fn single<'a, T>(basis: &'a [T], g: &GeneratorDescriptor) -> Result<&'a T> {
    match basis {
        [one] => Ok(one),
        _ => violation(format!("{g} has a {}-dimensional cohomology band, expected a line", basis.len())),
    }
}

fn aa_constant(p: Prime, s1: &BandSpec, s2: &BandSpec, s3: &BandSpec, lvl: usize, v: usize) -> Result<u64> {
    let exp = s1.n0_exponent(lvl) as i64 + s2.n0_exponent(lvl) as i64 - s3.n0_exponent(lvl + v) as i64;
    nygaard_constant(p, s3.floor(lvl + v), s1.floor(lvl), s2.floor(lvl), exp)
}

fn ab_constant(p: Prime, s1: &BandSpec, s2: &BandSpec, s3: &BandSpec, lvl: usize, v: usize) -> Result<u64> {
    let exp = s1.n0_exponent(lvl) as i64 + s2.n1_exponent(lvl) as i64 - s3.n1_exponent(lvl + v) as i64;
    nygaard_constant(p, s3.ceil(lvl + v) - 1, s1.floor(lvl), s2.ceil(lvl) - 1, exp)
}

fn w_constant(p: Prime, s1: &BandSpec, s2: &BandSpec, lvl: usize) -> Result<u64> {
    let d3 = s1.degree(lvl) + s2.degree(lvl);
    nygaard_constant(p, d3 / s1.e, s1.floor(lvl), s2.floor(lvl), 0)
}

/// λ with a = λ·b componentwise, if one exists.
fn common_ratio(a: &[u64], b: &[u64], p: u64) -> Option<u64> {
    let mut lambda = None;
    for (&x, &y) in a.iter().zip(b) {
        match (x, y) {
            (0, 0) => {}
            (_, 0) => return None,
            _ => {
                let l = x * inv_mod(y, p) % p;
                if lambda.is_some_and(|m| m != l) {
                    return None;
                }
                lambda = Some(l);
            }
        }
    }
    lambda
}

fn inconsistent(prod: &[u64], target: &[u64]) -> crate::error::Error {
    crate::error::Error::PropertyViolation(format!(
        "product components {prod:?} are not a multiple of the target {target:?}"
    ))
}

fn no_target(target: &GeneratorDescriptor, prod: &[u64]) -> crate::error::Error {
    crate::error::Error::PropertyViolation(format!("nonzero product {prod:?} but {target} has no representative"))
}

/// Support levels of the canonical representative of a generator, and the
/// normalization exponents on those levels.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BasisSupport {
    pub levels: Vec<usize>,
    pub valuations: Vec<u64>,
}

pub fn honest_support(g: &GeneratorDescriptor) -> Result<Option<BasisSupport>> {
    let spec = BandSpec::new(g.p, g.e, g.i, g.j, auto_r_max(g.p, g.e, g.i, g.j) + 1)?;
    let coh = modp_cohomology_of(&build_band_mod_p(spec)?)?;
    let vec = match g.parity {
        Parity::A => coh.h0_basis.first().cloned(),
        Parity::B => coh.h1_basis.first().map(|c| c.n1.clone()),
    };
    Ok(vec.map(|v| support_of(&spec, g.parity, &v)))
}

pub fn window_support(g: &GeneratorDescriptor) -> Result<Option<BasisSupport>> {
    let spec = BandSpec::new(g.p, g.e, g.i, g.j, auto_r_max(g.p, g.e, g.i, g.j) + 1)?;
    Ok(window_rep(&build_band_mod_p(spec)?, g.parity).map(|v| support_of(&spec, g.parity, &v)))
}

fn support_of(spec: &BandSpec, parity: Parity, v: &[u64]) -> BasisSupport {
    let levels: Vec<usize> = (0..v.len()).filter(|&r| v[r] != 0).collect();
    let valuations = levels
        .iter()
        .map(|&r| match parity {
            Parity::A => spec.n0_exponent(r),
            Parity::B => spec.n1_exponent(r),
        })
        .collect();
    BasisSupport { levels, valuations }
}

/// Whether the closed form says the band is nonzero.
pub fn band_nonzero(p: Prime, e: u64, i: u64, j: u64) -> bool {
    band_length(p, e, i, j) >= 1
}
