//! K̃_{2i−1}(k[x]/x^e; Z_p) from the closed form and from the Witt quotient.

use serde::{Deserialize, Serialize};

use crate::padic::{ceil_div, clamp, floor_log, vp, Prime};
use crate::witt::{band_indices, verschiebung_quotient, LengthModule};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Form {
    Closed,
    Witt,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KGroupResult {
    pub p: Prime,
    pub e: u64,
    pub i: u64,
    pub bands: LengthModule,
    pub total: u64,
    pub form: Form,
}

impl KGroupResult {
    fn new(e: u64, i: u64, bands: LengthModule, form: Form) -> KGroupResult {
        KGroupResult { p: bands.p, e, i, total: bands.total(), bands, form }
    }

    pub fn band(&self, j: u64) -> u64 {
        self.bands.band(j)
    }

    /// JSON with `bands` flattened to the j → length map.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "p": self.p,
            "e": self.e,
            "i": self.i,
            "bands": self.bands.bands,
            "total": self.total,
            "form": self.form,
        })
    }
}

/// Length of band j: v_p{p^{⟨s+1⟩}j, e} with s = ⌊log_p(ei/j)⌋; bands above ei vanish.
pub fn band_length(p: Prime, e: u64, i: u64, j: u64) -> u64 {
    if j > e * i || p.divides(j) {
        return 0;
    }
    let k = clamp(floor_log(p, e * i, j) + 1);
    brace_valuation(p, k, j, e)
}

/// v_p{p^k j, e} for j prime to p, without forming p^k.
pub fn brace_valuation(p: Prime, k: u64, j: u64, e: u64) -> u64 {
    let ve = vp(e as i64, p).expect("e is positive");
    let e_prime = e / p.get().pow(ve as u32);
    if j.is_multiple_of(e_prime) && ve <= k {
        ve
    } else {
        k
    }
}

pub fn k_closed_form(p: Prime, e: u64, i: u64) -> KGroupResult {
    let bands = band_indices(p, e * i).map(|j| (j, band_length(p, e, i, j))).collect();
    KGroupResult::new(e, i, LengthModule { p, bands }, Form::Closed)
}

pub fn k_witt_form(p: Prime, e: u64, i: u64) -> KGroupResult {
    KGroupResult::new(e, i, verschiebung_quotient(e, i, p), Form::Witt)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BandDiff {
    pub j: u64,
    pub closed: u64,
    pub witt: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Equivalence {
    pub agree: bool,
    pub diffs: Vec<BandDiff>,
}

pub fn check_equivalence(p: Prime, e: u64, i: u64) -> Equivalence {
    let closed = k_closed_form(p, e, i);
    let witt = k_witt_form(p, e, i);
    let keys: std::collections::BTreeSet<u64> =
        closed.bands.bands.keys().chain(witt.bands.bands.keys()).copied().collect();
    let diffs: Vec<BandDiff> = keys
        .into_iter()
        .map(|j| BandDiff { j, closed: closed.band(j), witt: witt.band(j) })
        .filter(|d| d.closed != d.witt)
        .collect();
    Equivalence { agree: diffs.is_empty(), diffs }
}

/// (Σ_r ⟨i − ⌈p^r j/e⌉⟩, ⟨⌊log_p(ei/j)⌋ + 1⟩) for the F-crystal spanned by x^{p^r j}/Γ⌈p^r j/e⌉ dlog x.
pub fn fcrystal_lengths(p: Prime, e: u64, i: u64, j: u64) -> (u64, u64) {
    assert!(!p.divides(j), "band index must be prime to p");
    let mut integral = 0;
    let mut d = j;
    loop {
        let c = ceil_div(d, e);
        if c >= i {
            break;
        }
        integral += i - c;
        d *= p.get();
    }
    let modp = if j > e * i { 0 } else { clamp(floor_log(p, e * i, j) + 1) };
    (integral, modp)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(n: u64) -> Prime {
        Prime::new(n).unwrap()
    }

    fn bands(k: &KGroupResult) -> Vec<(u64, u64)> {
        k.bands.bands.iter().map(|(&j, &l)| (j, l)).collect()
    }

    #[test]
    fn closed_examples() {
        let k = k_closed_form(p(2), 2, 1);
        assert_eq!(bands(&k), vec![(1, 1)]);
        assert_eq!(k.total, 1);
        let k = k_closed_form(p(2), 3, 2);
        assert_eq!(bands(&k), vec![(1, 3), (3, 0), (5, 1)]);
        assert_eq!(k.total, 4);
        let k = k_closed_form(p(5), 1, 9);
        assert_eq!(k.total, 0);
        assert!(k.bands.bands.values().all(|&l| l == 0));
    }

    #[test]
    fn witt_examples() {
        assert_eq!(bands(&k_witt_form(p(2), 2, 1)), vec![(1, 1)]);
        assert_eq!(k_witt_form(p(3), 2, 3).total, 3);
        assert_eq!(k_witt_form(p(2), 1, 5).total, 0);
    }

    #[test]
    fn equivalence_examples() {
        assert!(check_equivalence(p(2), 2, 1).agree);
        assert!(check_equivalence(p(3), 6, 7).agree);
        assert!(check_equivalence(p(2), 1, 1).agree);
    }

    #[test]
    fn json_shape() {
        let v = k_closed_form(p(2), 3, 2).to_json();
        assert_eq!(
            v.to_string(),
            r#"{"bands":{"1":3,"3":0,"5":1},"e":3,"form":"closed","i":2,"p":2,"total":4}"#
        );
    }

    #[test]
    fn brace_valuation_matches_brace() {
        for &q in &[2u64, 3, 5] {
            for e in 1..=12 {
                for j in (1..40).filter(|j| j % q != 0) {
                    for k in 0..5 {
                        let d = q.pow(k as u32) * j;
                        let direct = vp(crate::padic::brace(d, e) as i64, p(q)).unwrap();
                        assert_eq!(brace_valuation(p(q), k, j, e), direct);
                    }
                }
            }
        }
    }

    #[test]
    fn fcrystal_examples() {
        assert_eq!(fcrystal_lengths(p(2), 2, 1, 1), (0, 2));
        assert_eq!(fcrystal_lengths(p(3), 2, 3, 1), (3, 2));
        assert_eq!(fcrystal_lengths(p(2), 2, 1, 5), (0, 0));
    }
}
