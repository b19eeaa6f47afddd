//! Mod-p generators a_i^j, b_i^j, their support windows, and the product
//! criteria evaluated directly from window data.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::kgroups::band_length;
use crate::padic::{ceil_div, ceil_log, clamp, floor_log, vp, vp_factorial, Prime};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    A,
    B,
}

/// Raw window ends; `s = None` stands for −∞ (b classes with i = 1).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Window {
    pub s: Option<i64>,
    pub t: i64,
    /// ⟨s⟩, the first supported level.
    pub start: u64,
    /// t, the last supported level.
    pub end: i64,
}

impl Window {
    pub fn is_empty(&self) -> bool {
        self.end < self.start as i64
    }

    pub fn levels(&self) -> Vec<usize> {
        if self.is_empty() {
            return Vec::new();
        }
        (self.start as usize..=self.end as usize).collect()
    }
}

pub fn windows(parity: Parity, p: Prime, e: u64, i: u64, j: u64) -> Window {
    let (s, t) = match parity {
        Parity::A => (Some(ceil_log(p, e * i, j) - 1), ceil_log(p, e * (i + 1), j)),
        Parity::B => {
            let s = (i > 1).then(|| floor_log(p, e * (i - 1), j));
            (s, floor_log(p, e * i, j) + 1)
        }
    };
    Window { s, t, start: s.map_or(0, clamp), end: t }
}

pub fn generator_exists(_parity: Parity, p: Prime, e: u64, i: u64, j: u64) -> bool {
    band_length(p, e, i, j) >= 1
}

/// (i1 + i2, (j1 + j2)/p^v, v) with v = v_p(j1 + j2).
pub fn target_indices(i1: u64, j1: u64, i2: u64, j2: u64, p: Prime) -> (u64, u64, u64) {
    let sum = j1 + j2;
    let v = vp(sum as i64, p).expect("sum is positive");
    (i1 + i2, sum / p.get().pow(v as u32), v)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GeneratorDescriptor {
    pub parity: Parity,
    pub i: u64,
    pub j: u64,
    pub p: Prime,
    pub e: u64,
    pub window: Window,
    /// Nygaard normalization exponent at each window level.
    pub coeff_valuations: Vec<u64>,
    pub exists: bool,
    pub degree: u64,
}

impl GeneratorDescriptor {
    pub fn new(parity: Parity, p: Prime, e: u64, i: u64, j: u64) -> Result<GeneratorDescriptor> {
        if e == 0 || i == 0 || j == 0 {
            return invalid("e, i and j must be positive");
        }
        if p.divides(j) {
            return invalid(format!("band index {j} is divisible by {p}"));
        }
        let window = windows(parity, p, e, i, j);
        let coeff_valuations = window
            .levels()
            .into_iter()
            .map(|r| {
                let d = p.get().pow(r as u32) * j;
                let index = match parity {
                    Parity::A => d / e,
                    Parity::B => ceil_div(d, e),
                };
                clamp(i as i64 - index as i64)
            })
            .collect();
        let degree = match parity {
            Parity::A => 2 * i,
            Parity::B => 2 * i - 1,
        };
        Ok(GeneratorDescriptor {
            parity,
            i,
            j,
            p,
            e,
            window,
            coeff_valuations,
            exists: generator_exists(parity, p, e, i, j),
            degree,
        })
    }
}

impl fmt::Display for GeneratorDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self.parity {
            Parity::A => 'a',
            Parity::B => 'b',
        };
        write!(f, "{name}_{}^{} (p={}, e={})", self.i, self.j, self.p, self.e)
    }
}

/// The three conditions of the product criterion, evaluated separately.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct TheoremEval {
    pub s_equal: bool,
    pub t_equal: bool,
    /// Evaluated only when the t-windows agree.
    pub valuation_equal: Option<bool>,
    pub nonzero: bool,
}

/// Criterion for a_{i1}^{j1}·x_{i2}^{j2} with x of the given parity, using clamped window starts.
pub fn theorem(parity: Parity, p: Prime, e: u64, i1: u64, j1: u64, i2: u64, j2: u64) -> TheoremEval {
    let (i3, j3, v) = target_indices(i1, j1, i2, j2, p);
    let w1 = windows(Parity::A, p, e, i1, j1);
    let w2 = windows(parity, p, e, i2, j2);
    let w3 = windows(parity, p, e, i3, j3);
    let v = v as i64;
    let s_equal = w1.start == w2.start && w2.start as i64 == w3.start as i64 - v;
    let t_equal = w1.t == w2.t && w2.t == w3.t - v;
    let valuation_equal = (t_equal && w1.t >= 0).then(|| {
        let scale = p.get().pow(w1.t as u32);
        let (d1, d2) = (scale * j1, scale * j2);
        match parity {
            Parity::A => vp_factorial(d1 / e, p) + vp_factorial(d2 / e, p) == vp_factorial((d1 + d2) / e, p),
            Parity::B => {
                vp_factorial(d1 / e, p) + vp_factorial(ceil_div(d2, e) - 1, p)
                    == vp_factorial(ceil_div(d1 + d2, e) - 1, p)
            }
        }
    });
    let nonzero = s_equal && t_equal && valuation_equal == Some(true);
    TheoremEval { s_equal, t_equal, valuation_equal, nonzero }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Verdict {
    pub nonzero: bool,
    pub i3: u64,
    pub j3: u64,
    pub conditions: TheoremEval,
}

fn verdict(parity: Parity, p: Prime, e: u64, i1: u64, j1: u64, i2: u64, j2: u64) -> Result<Verdict> {
    let g1 = GeneratorDescriptor::new(Parity::A, p, e, i1, j1)?;
    let g2 = GeneratorDescriptor::new(parity, p, e, i2, j2)?;
    for g in [&g1, &g2] {
        if !g.exists {
            return invalid(format!("{g} does not exist"));
        }
    }
    let (i3, j3, _) = target_indices(i1, j1, i2, j2, p);
    let conditions = theorem(parity, p, e, i1, j1, i2, j2);
    Ok(Verdict { nonzero: conditions.nonzero, i3, j3, conditions })
}

pub fn product_aa(p: Prime, e: u64, i1: u64, j1: u64, i2: u64, j2: u64) -> Result<Verdict> {
    verdict(Parity::A, p, e, i1, j1, i2, j2)
}

pub fn product_ab(p: Prime, e: u64, i1: u64, j1: u64, i2: u64, j2: u64) -> Result<Verdict> {
    verdict(Parity::B, p, e, i1, j1, i2, j2)
}

/// The b classes are square-zero, and b·b lands in zero for every pair.
pub fn bb_product(_b1: &GeneratorDescriptor, _b2: &GeneratorDescriptor) -> bool {
    false
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TableMode {
    Aa,
    Ab,
}

impl TableMode {
    pub fn parity(self) -> Parity {
        match self {
            TableMode::Aa => Parity::A,
            TableMode::Ab => Parity::B,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            TableMode::Aa => "aa",
            TableMode::Ab => "ab",
        }
    }
}

/// Which pair of indices is held fixed; the other pair spans the grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Fixed {
    /// Grid over i1 × i2.
    J { j1: u64, j2: u64 },
    /// Grid over j1 × j2.
    I { i1: u64, i2: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MultTable {
    pub mode: TableMode,
    pub p: Prime,
    pub e: u64,
    pub fixed: Fixed,
    pub x_range: (u64, u64),
    pub y_range: (u64, u64),
    /// grid[x][y] = 1 when the product is nonzero.
    pub grid: Vec<Vec<u8>>,
    /// Cells skipped because an operand does not exist.
    pub missing: Vec<(u64, u64)>,
}

impl MultTable {
    pub fn to_json(&self) -> serde_json::Value {
        let fixed = match self.fixed {
            Fixed::J { j1, j2 } => serde_json::json!({"p": self.p, "e": self.e, "j1": j1, "j2": j2}),
            Fixed::I { i1, i2 } => serde_json::json!({"p": self.p, "e": self.e, "i1": i1, "i2": i2}),
        };
        serde_json::json!({"mode": self.mode, "fixed": fixed, "grid": self.grid})
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("x,y,nonzero\n");
        for (a, row) in self.grid.iter().enumerate() {
            for (b, cell) in row.iter().enumerate() {
                let (x, y) = (self.x_range.0 + a as u64, self.y_range.0 + b as u64);
                out.push_str(&format!("{x},{y},{cell}\n"));
            }
        }
        out
    }
}

/// Theorem verdicts over a grid; cells with a nonexistent operand are 0 and listed in `missing`.
/// Index values divisible by p are not band indices and are also 0.
pub fn mult_table(
    mode: TableMode,
    p: Prime,
    e: u64,
    fixed: Fixed,
    x_range: (u64, u64),
    y_range: (u64, u64),
) -> Result<MultTable> {
    if x_range.0 == 0 || y_range.0 == 0 {
        return invalid("grid indices start at 1");
    }
    let parity = mode.parity();
    let mut grid = Vec::new();
    let mut missing = Vec::new();
    for x in x_range.0..=x_range.1 {
        let mut row = Vec::new();
        for y in y_range.0..=y_range.1 {
            let (i1, j1, i2, j2) = match fixed {
                Fixed::J { j1, j2 } => (x, j1, y, j2),
                Fixed::I { i1, i2 } => (i1, x, i2, y),
            };
            if p.divides(j1) || p.divides(j2) {
                row.push(0);
                continue;
            }
            if !generator_exists(Parity::A, p, e, i1, j1) || !generator_exists(parity, p, e, i2, j2) {
                missing.push((x, y));
                row.push(0);
                continue;
            }
            row.push(u8::from(theorem(parity, p, e, i1, j1, i2, j2).nonzero));
        }
        grid.push(row);
    }
    Ok(MultTable { mode, p, e, fixed, x_range, y_range, grid, missing })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(n: u64) -> Prime {
        Prime::new(n).unwrap()
    }

    #[test]
    fn window_examples() {
        let w = windows(Parity::A, p(3), 2, 2, 1);
        assert_eq!((w.s, w.t, w.levels()), (Some(1), 2, vec![1, 2]));
        let w = windows(Parity::B, p(3), 2, 3, 1);
        assert_eq!((w.s, w.t), (Some(1), 2));
        let w = windows(Parity::A, p(3), 2, 1, 2);
        assert_eq!((w.s, w.t, w.levels()), (Some(-1), 1, vec![0, 1]));
        let w = windows(Parity::B, p(2), 2, 1, 1);
        assert_eq!((w.s, w.start), (None, 0));
    }

    #[test]
    fn existence_examples() {
        assert!(generator_exists(Parity::A, p(2), 2, 1, 1));
        assert!(!generator_exists(Parity::A, p(2), 2, 1, 3));
        for i in 1..6 {
            for j in [1, 2, 5, 7] {
                assert!(!generator_exists(Parity::B, p(5), 1, i, j));
            }
        }
    }

    #[test]
    fn targets() {
        assert_eq!(target_indices(1, 2, 1, 2, p(3)), (2, 4, 0));
        assert_eq!(target_indices(2, 1, 3, 1, p(3)), (5, 2, 0));
        assert_eq!(target_indices(2, 1, 3, 2, p(3)), (5, 1, 1));
        assert_eq!(target_indices(1, 1, 1, 1, p(2)), (2, 1, 1));
    }

    #[test]
    fn worked_criteria() {
        assert!(theorem(Parity::A, p(3), 2, 1, 2, 1, 2).nonzero);
        assert!(theorem(Parity::B, p(3), 2, 2, 1, 3, 1).nonzero);
        assert!(!theorem(Parity::A, p(3), 2, 1, 2, 2, 4).nonzero);
    }

    #[test]
    fn verdicts_need_existing_operands() {
        assert!(product_aa(p(3), 2, 1, 2, 1, 2).is_err());
        assert!(product_ab(p(3), 2, 2, 1, 3, 1).is_ok());
    }

    #[test]
    fn descriptor_valuations() {
        let g = GeneratorDescriptor::new(Parity::A, p(3), 2, 2, 1).unwrap();
        assert_eq!(g.coeff_valuations, vec![1, 0]);
        assert_eq!(g.degree, 4);
        let g = GeneratorDescriptor::new(Parity::B, p(3), 2, 5, 2).unwrap();
        assert_eq!(g.window.levels(), vec![1, 2]);
        assert_eq!(g.coeff_valuations, vec![2, 0]);
        assert_eq!(g.degree, 9);
    }

    #[test]
    fn bb_is_zero() {
        let b = GeneratorDescriptor::new(Parity::B, p(3), 2, 3, 1).unwrap();
        assert!(!bb_product(&b, &b));
    }

    #[test]
    fn empty_range() {
        let t = mult_table(TableMode::Aa, p(3), 2, Fixed::J { j1: 1, j2: 2 }, (1, 0), (1, 0)).unwrap();
        assert!(t.grid.is_empty());
        assert_eq!(t.to_csv(), "x,y,nonzero\n");
    }
}
