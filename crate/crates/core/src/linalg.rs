//! Exact integer matrices, Smith normal form, and row reduction over F_p.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> IntMatrix {
        IntMatrix { rows, cols, data: vec![BigInt::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> IntMatrix {
        let mut m = IntMatrix::zeros(n, n);
        for k in 0..n {
            m.set(k, k, BigInt::one());
        }
        m
    }

    pub fn from_rows(rows: &[Vec<i64>]) -> IntMatrix {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        let mut m = IntMatrix::zeros(r, c);
        for (a, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), c, "ragged rows");
            for (b, &x) in row.iter().enumerate() {
                m.set(a, b, BigInt::from(x));
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &BigInt {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, x: BigInt) {
        self.data[r * self.cols + c] = x;
    }

    pub fn add_to(&mut self, r: usize, c: usize, x: &BigInt) {
        self.data[r * self.cols + c] += x;
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, other.rows);
        let mut out = IntMatrix::zeros(self.rows, other.cols);
        for a in 0..self.rows {
            for k in 0..self.cols {
                let x = self.get(a, k);
                if x.is_zero() {
                    continue;
                }
                for b in 0..other.cols {
                    let y = other.get(k, b);
                    if !y.is_zero() {
                        out.data[a * other.cols + b] += x * y;
                    }
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|a| (0..self.cols).fold(BigInt::zero(), |acc, b| acc + self.get(a, b) * &v[b]))
            .collect()
    }

    pub fn column(&self, c: usize) -> Vec<BigInt> {
        (0..self.rows).map(|r| self.get(r, c).clone()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    /// Entries reduced into [0, p).
    pub fn mod_p(&self, p: u64) -> Vec<Vec<u64>> {
        (0..self.rows)
            .map(|r| (0..self.cols).map(|c| reduce_mod(self.get(r, c), p)).collect())
            .collect()
    }

    /// Row-major CSV with exact decimal entries.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for r in 0..self.rows {
            let line: Vec<String> = (0..self.cols).map(|c| self.get(r, c).to_string()).collect();
            out.push_str(&line.join(","));
            out.push('\n');
        }
        out
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for c in 0..self.cols {
                self.data.swap(a * self.cols + c, b * self.cols + c);
            }
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a != b {
            for r in 0..self.rows {
                self.data.swap(r * self.cols + a, r * self.cols + b);
            }
        }
    }

    /// row[a] += q·row[b]
    fn add_row(&mut self, a: usize, b: usize, q: &BigInt) {
        for c in 0..self.cols {
            let x = self.get(b, c) * q;
            self.data[a * self.cols + c] += x;
        }
    }

    /// col[a] += q·col[b]
    fn add_col(&mut self, a: usize, b: usize, q: &BigInt) {
        for r in 0..self.rows {
            let x = self.get(r, b) * q;
            self.data[r * self.cols + a] += x;
        }
    }

    fn negate_row(&mut self, a: usize) {
        for c in 0..self.cols {
            let x = -self.get(a, c).clone();
            self.set(a, c, x);
        }
    }

    fn negate_col(&mut self, a: usize) {
        for r in 0..self.rows {
            let x = -self.get(r, a).clone();
            self.set(r, a, x);
        }
    }
}

pub fn reduce_mod(x: &BigInt, p: u64) -> u64 {
    let r = x.mod_floor(&BigInt::from(p));
    r.iter_u64_digits().next().unwrap_or(0)
}

#[derive(Debug, Clone)]
pub struct Transforms {
    pub u: IntMatrix,
    pub u_inv: IntMatrix,
    pub v: IntMatrix,
}

#[derive(Debug, Clone)]
pub struct SnfResult {
    /// Elementary divisors, one per min(rows, cols); each divides the next.
    pub diagonal: Vec<BigInt>,
    /// U·M·V = D with U, V unimodular.
    pub transforms: Option<Transforms>,
}

impl SnfResult {
    pub fn rank(&self) -> usize {
        self.diagonal.iter().filter(|d| !d.is_zero()).count()
    }
}

struct Work {
    m: IntMatrix,
    t: Option<Transforms>,
}

impl Work {
    fn swap_rows(&mut self, a: usize, b: usize) {
        self.m.swap_rows(a, b);
        if let Some(t) = &mut self.t {
            t.u.swap_rows(a, b);
            t.u_inv.swap_cols(a, b);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        self.m.swap_cols(a, b);
        if let Some(t) = &mut self.t {
            t.v.swap_cols(a, b);
        }
    }

    fn add_row(&mut self, a: usize, b: usize, q: &BigInt) {
        self.m.add_row(a, b, q);
        if let Some(t) = &mut self.t {
            t.u.add_row(a, b, q);
            t.u_inv.add_col(b, a, &-q);
        }
    }

    fn add_col(&mut self, a: usize, b: usize, q: &BigInt) {
        self.m.add_col(a, b, q);
        if let Some(t) = &mut self.t {
            t.v.add_col(a, b, q);
        }
    }

    fn negate_row(&mut self, a: usize) {
        self.m.negate_row(a);
        if let Some(t) = &mut self.t {
            t.u.negate_row(a);
            t.u_inv.negate_col(a);
        }
    }

    fn negate_col(&mut self, a: usize) {
        self.m.negate_col(a);
        if let Some(t) = &mut self.t {
            t.v.negate_col(a);
        }
    }
}

pub fn smith_normal_form(m: &IntMatrix) -> SnfResult {
    snf(m, false)
}

pub fn smith_normal_form_with_transforms(m: &IntMatrix) -> SnfResult {
    snf(m, true)
}

fn snf(m: &IntMatrix, track: bool) -> SnfResult {
    let (rows, cols) = (m.rows, m.cols);
    let t = track.then(|| Transforms {
        u: IntMatrix::identity(rows),
        u_inv: IntMatrix::identity(rows),
        v: IntMatrix::identity(cols),
    });
    let mut w = Work { m: m.clone(), t };
    let n = rows.min(cols);
    for k in 0..n {
        // smallest nonzero entry of the trailing block as pivot
        let mut best: Option<(usize, usize)> = None;
        for r in k..rows {
            for c in k..cols {
                let x = w.m.get(r, c);
                if !x.is_zero() && best.is_none_or(|(br, bc)| x.abs() < w.m.get(br, bc).abs()) {
                    best = Some((r, c));
                }
            }
        }
        let Some((br, bc)) = best else { break };
        w.swap_rows(k, br);
        w.swap_cols(k, bc);
        loop {
            let mut again = false;
            for r in k + 1..rows {
                if w.m.get(r, k).is_zero() {
                    continue;
                }
                let q = w.m.get(r, k).div_floor(w.m.get(k, k));
                w.add_row(r, k, &-q);
                if !w.m.get(r, k).is_zero() {
                    w.swap_rows(k, r);
                    again = true;
                }
            }
            for c in k + 1..cols {
                if w.m.get(k, c).is_zero() {
                    continue;
                }
                let q = w.m.get(k, c).div_floor(w.m.get(k, k));
                w.add_col(c, k, &-q);
                if !w.m.get(k, c).is_zero() {
                    w.swap_cols(k, c);
                    again = true;
                }
            }
            if again {
                continue;
            }
            // enforce divisibility of the remaining block by the pivot
            let pivot = w.m.get(k, k).clone();
            let bad = (k + 1..rows).find(|&r| (k + 1..cols).any(|c| !w.m.get(r, c).is_multiple_of(&pivot)));
            match bad {
                Some(r) => w.add_row(k, r, &BigInt::one()),
                None => break,
            }
        }
        if w.m.get(k, k).is_negative() {
            w.negate_row(k);
        }
    }
    // make the diagonal nonnegative even where rows < cols left signs untouched
    for k in 0..n {
        if w.m.get(k, k).is_negative() {
            w.negate_col(k);
        }
    }
    let diagonal = (0..n).map(|k| w.m.get(k, k).clone()).collect();
    SnfResult { diagonal, transforms: w.t }
}

/// Reduced row echelon form over F_p: pivot column and normalized row.
#[derive(Debug, Clone, Default)]
pub struct Echelon {
    pub ncols: usize,
    pub pivots: Vec<(usize, Vec<u64>)>,
}

impl Echelon {
    pub fn new(rows: &[Vec<u64>], p: u64, ncols: usize) -> Echelon {
        let mut e = Echelon { ncols, pivots: Vec::new() };
        for row in rows {
            e.insert(row, p);
        }
        e
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    /// Reduce v by the current pivots.
    pub fn reduce(&self, v: &[u64], p: u64) -> Vec<u64> {
        let mut v: Vec<u64> = v.iter().map(|x| x % p).collect();
        for (c, w) in &self.pivots {
            let f = v[*c];
            if f != 0 {
                for (a, b) in v.iter_mut().zip(w) {
                    *a = (*a + p - f * b % p) % p;
                }
            }
        }
        v
    }

    pub fn insert(&mut self, row: &[u64], p: u64) -> bool {
        let mut v = self.reduce(row, p);
        let Some(c) = v.iter().position(|&x| x != 0) else {
            return false;
        };
        let inv = crate::padic::inv_mod(v[c], p);
        for a in v.iter_mut() {
            *a = *a * inv % p;
        }
        for (_, w) in self.pivots.iter_mut() {
            let f = w[c];
            if f != 0 {
                for (a, b) in w.iter_mut().zip(&v) {
                    *a = (*a + p - f * b % p) % p;
                }
            }
        }
        self.pivots.push((c, v));
        self.pivots.sort_by_key(|(c, _)| *c);
        true
    }
}

/// Basis of {x : M x = 0} over F_p for M given by rows of length ncols.
pub fn kernel_mod_p(rows: &[Vec<u64>], p: u64, ncols: usize) -> Vec<Vec<u64>> {
    let e = Echelon::new(rows, p, ncols);
    let pivot_cols: Vec<usize> = e.pivots.iter().map(|(c, _)| *c).collect();
    (0..ncols)
        .filter(|f| !pivot_cols.contains(f))
        .map(|f| {
            let mut v = vec![0; ncols];
            v[f] = 1;
            for (c, w) in &e.pivots {
                v[*c] = (p - w[f]) % p;
            }
            v
        })
        .collect()
}

pub fn mat_vec_mod_p(rows: &[Vec<u64>], v: &[u64], p: u64) -> Vec<u64> {
    rows.iter()
        .map(|row| row.iter().zip(v).fold(0, |acc, (a, b)| (acc + a * b) % p))
        .collect()
}

pub fn transpose(rows: &[Vec<u64>]) -> Vec<Vec<u64>> {
    let ncols = rows.first().map_or(0, |r| r.len());
    (0..ncols).map(|c| rows.iter().map(|r| r[c]).collect()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diag(m: &IntMatrix) -> Vec<i64> {
        smith_normal_form(m).diagonal.iter().map(|d| d.to_string().parse().unwrap()).collect()
    }

    #[test]
    fn snf_examples() {
        assert_eq!(diag(&IntMatrix::from_rows(&[vec![2, 0], vec![0, 3]])), vec![1, 6]);
        assert_eq!(diag(&IntMatrix::zeros(2, 3)), vec![0, 0]);
        assert_eq!(diag(&IntMatrix::from_rows(&[vec![2, 0], vec![0, 2]])), vec![2, 2]);
    }

    #[test]
    fn snf_transforms() {
        let m = IntMatrix::from_rows(&[vec![4, 6, 2], vec![6, 9, 12], vec![2, -3, 8], vec![0, 5, 10]]);
        let r = smith_normal_form_with_transforms(&m);
        let t = r.transforms.unwrap();
        let d = t.u.mul(&m).mul(&t.v);
        for a in 0..d.rows() {
            for b in 0..d.cols() {
                let expect = if a == b { r.diagonal[a].clone() } else { BigInt::zero() };
                assert_eq!(d.get(a, b), &expect);
            }
        }
        assert_eq!(t.u.mul(&t.u_inv), IntMatrix::identity(4));
        for w in r.diagonal.windows(2) {
            assert!(w[0].is_zero() && w[1].is_zero() || !w[0].is_zero() && w[1].is_multiple_of(&w[0]));
        }
    }

    #[test]
    fn kernel() {
        let rows = vec![vec![1, 2, 0], vec![0, 0, 1]];
        let k = kernel_mod_p(&rows, 3, 3);
        assert_eq!(k, vec![vec![1, 1, 0]]);
        assert_eq!(mat_vec_mod_p(&rows, &k[0], 3), vec![0, 0]);
    }
}
