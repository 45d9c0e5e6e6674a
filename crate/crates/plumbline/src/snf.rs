//! Smith normal form over the integers, exactly.
//!
//! The public entry point runs in two phases: a sparse sweep that peels off
//! pivots of value +-1 (these dominate in relation matrices coming from group
//! presentations), then a classical Smith reduction with arbitrary-precision
//! integers on whatever small block remains. Entry growth during the sweep is
//! pre-checked; if a value would leave the machine-word range the whole
//! residual moves to bigints early. No fixed-width arithmetic decides a result.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

/// Sparse integer matrix, rows indexed from zero. Zero entries are not stored.
#[derive(Clone, Debug)]
pub struct IntMatrix {
    nrows: usize,
    ncols: usize,
    rows: Vec<BTreeMap<usize, i64>>,
}

impl IntMatrix {
    #[must_use]
    pub fn zero(nrows: usize, ncols: usize) -> Self {
        IntMatrix {
            nrows,
            ncols,
            rows: vec![BTreeMap::new(); nrows],
        }
    }

    #[must_use]
    pub fn from_dense(rows: &[Vec<i64>]) -> Self {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, Vec::len);
        let mut m = IntMatrix::zero(nrows, ncols);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), ncols, "ragged rows");
            for (j, &v) in row.iter().enumerate() {
                m.set(i, j, v);
            }
        }
        m
    }

    pub fn set(&mut self, r: usize, c: usize, v: i64) {
        assert!(r < self.nrows && c < self.ncols, "index out of range");
        if v == 0 {
            self.rows[r].remove(&c);
        } else {
            self.rows[r].insert(c, v);
        }
    }

    pub fn add_to(&mut self, r: usize, c: usize, delta: i64) {
        let v = self.get(r, c).checked_add(delta).expect("entry overflow");
        self.set(r, c, v);
    }

    #[must_use]
    pub fn get(&self, r: usize, c: usize) -> i64 {
        assert!(r < self.nrows && c < self.ncols, "index out of range");
        self.rows[r].get(&c).copied().unwrap_or(0)
    }

    #[must_use]
    pub fn nrows(&self) -> usize {
        self.nrows
    }

    #[must_use]
    pub fn ncols(&self) -> usize {
        self.ncols
    }

    #[must_use]
    pub fn entry_count(&self) -> usize {
        self.rows.iter().map(BTreeMap::len).sum()
    }
}

/// Diagonal of a Smith normal form: positive entries, each dividing the next,
/// as many as the rank of the matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Snf {
    pub diagonal: Vec<BigUint>,
    pub nrows: usize,
    pub ncols: usize,
}

impl Snf {
    #[must_use]
    pub fn rank(&self) -> usize {
        self.diagonal.len()
    }

    /// Invariants of the cokernel of the matrix acting on column vectors...
    /// rows are relations, columns are generators: free rank plus the
    /// diagonal entries exceeding one.
    #[must_use]
    pub fn cokernel(&self) -> (usize, Vec<BigUint>) {
        let free = self.ncols - self.rank();
        let torsion: Vec<BigUint> = self
            .diagonal
            .iter()
            .filter(|d| **d > BigUint::one())
            .cloned()
            .collect();
        (free, torsion)
    }
}

#[must_use]
pub fn smith_normal_form(m: &IntMatrix) -> Snf {
    let mut sweep = Sweep::new(m);
    let escalated = sweep.run();
    let mut diagonal: Vec<BigUint> = vec![BigUint::one(); sweep.units];
    if escalated || !sweep.live_rows.is_empty() {
        let dense = sweep.residual_dense();
        if !dense.is_empty() {
            let rest = dense_snf(dense, None);
            diagonal.extend(rest);
        }
    }
    Snf {
        diagonal,
        nrows: m.nrows,
        ncols: m.ncols,
    }
}

/// Solve `a * x = b (mod modulus)` for one solution, if any exists.
/// `b` has one entry per row of `a`; the result has one per column.
#[must_use]
pub fn solve_mod(a: &IntMatrix, b: &[i64], modulus: u64) -> Option<Vec<u64>> {
    assert_eq!(b.len(), a.nrows(), "right-hand side length mismatch");
    assert!(modulus >= 1, "modulus must be positive");
    if modulus == 1 {
        return Some(vec![0; a.ncols()]);
    }
    let m_big = BigInt::from(modulus);
    let (nr, nc) = (a.nrows(), a.ncols());
    let dense: Vec<Vec<BigInt>> = (0..nr)
        .map(|i| (0..nc).map(|j| BigInt::from(a.get(i, j))).collect())
        .collect();
    let mut u = identity(nr);
    let mut v = identity(nc);
    let diag = if dense.is_empty() || nc == 0 {
        Vec::new()
    } else {
        dense_snf(dense, Some((&mut u, &mut v)))
    };

    // c = U b, reduced mod modulus
    let c: Vec<BigInt> = (0..nr)
        .map(|i| {
            let mut s = BigInt::zero();
            for (j, bj) in b.iter().enumerate() {
                s += &u[i][j] * BigInt::from(*bj);
            }
            s.mod_floor(&m_big)
        })
        .collect();

    // diagonal system d_i y_i = c_i (mod modulus)
    let mut y = vec![BigInt::zero(); nc];
    for i in 0..nr {
        if i < diag.len() {
            let d = BigInt::from_biguint(Sign::Plus, diag[i].clone());
            let g = d.gcd(&m_big);
            if (&c[i] % &g).is_zero() {
                let m_red = &m_big / &g;
                if !m_red.is_one() {
                    let inv = modinv(&(&d / &g).mod_floor(&m_red), &m_red)?;
                    y[i] = ((&c[i] / &g) * inv).mod_floor(&m_red);
                }
            } else {
                return None;
            }
        } else if !c[i].is_zero() {
            return None;
        }
    }

    // x = V y
    let x: Vec<u64> = (0..nc)
        .map(|i| {
            let mut s = BigInt::zero();
            for (j, yj) in y.iter().enumerate() {
                s += &v[i][j] * yj;
            }
            let r = s.mod_floor(&m_big);
            let (_, digits) = r.to_u64_digits();
            digits.first().copied().unwrap_or(0)
        })
        .collect();
    Some(x)
}

fn modinv(a: &BigInt, m: &BigInt) -> Option<BigInt> {
    let e = a.extended_gcd(m);
    if e.gcd.is_one() {
        Some(e.x.mod_floor(m))
    } else {
        None
    }
}

fn identity(n: usize) -> Vec<Vec<BigInt>> {
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    if i == j {
                        BigInt::one()
                    } else {
                        BigInt::zero()
                    }
                })
                .collect()
        })
        .collect()
}

// ==== phase 1: sparse sweep over unit pivots ====

struct Sweep {
    rows: Vec<BTreeMap<usize, i64>>,
    col_rows: Vec<BTreeSet<usize>>,
    live_rows: BTreeSet<usize>,
    live_cols: BTreeSet<usize>,
    units: usize,
}

impl Sweep {
    fn new(m: &IntMatrix) -> Self {
        let mut col_rows = vec![BTreeSet::new(); m.ncols];
        for (r, row) in m.rows.iter().enumerate() {
            for &c in row.keys() {
                col_rows[c].insert(r);
            }
        }
        Sweep {
            rows: m.rows.clone(),
            col_rows,
            live_rows: (0..m.nrows).collect(),
            live_cols: (0..m.ncols).collect(),
            units: 0,
        }
    }

    /// Runs the sweep; returns true when arithmetic had to stop early to
    /// avoid machine-word overflow (the residual is then still exact).
    fn run(&mut self) -> bool {
        loop {
            let Some((pr, pc)) = self.best_unit_pivot() else {
                return false;
            };
            if !self.eliminate(pr, pc) {
                return true;
            }
            self.units += 1;
        }
    }

    fn best_unit_pivot(&self) -> Option<(usize, usize)> {
        let mut best: Option<(usize, usize, usize)> = None;
        for &r in &self.live_rows {
            let rn = self.rows[r].len();
            if rn == 0 {
                continue;
            }
            for (&c, &v) in &self.rows[r] {
                if v == 1 || v == -1 {
                    let cost = (rn - 1) * (self.col_rows[c].len() - 1);
                    if best.is_none_or(|(bcost, br, bc)| {
                        cost < bcost || (cost == bcost && (r, c) < (br, bc))
                    }) {
                        best = Some((cost, r, c));
                    }
                }
            }
        }
        best.map(|(_, r, c)| (r, c))
    }

    /// Clears column `pc` with the unit pivot at (`pr`, `pc`), then retires
    /// the pivot row and column. Returns false if an update would overflow.
    fn eliminate(&mut self, pr: usize, pc: usize) -> bool {
        let s = self.rows[pr][&pc];
        debug_assert!(s == 1 || s == -1);
        let pivot_row: Vec<(usize, i64)> = self.rows[pr].iter().map(|(&c, &v)| (c, v)).collect();
        let targets: Vec<usize> = self.col_rows[pc]
            .iter()
            .copied()
            .filter(|&r| r != pr)
            .collect();
        for &t in &targets {
            let a = self.rows[t][&pc];
            let mult = a * s; // row_t -= mult * row_pr zeroes column pc
            let mut updates: Vec<(usize, i64)> = Vec::with_capacity(pivot_row.len());
            for &(c, v) in &pivot_row {
                let old = self.rows[t].get(&c).copied().unwrap_or(0);
                let new = i128::from(old) - i128::from(mult) * i128::from(v);
                match i64::try_from(new) {
                    Ok(w) => updates.push((c, w)),
                    Err(_) => return false,
                }
            }
            for (c, w) in updates {
                if w == 0 {
                    if self.rows[t].remove(&c).is_some() {
                        self.col_rows[c].remove(&t);
                    }
                } else {
                    if self.rows[t].insert(c, w).is_none() {
                        self.col_rows[c].insert(t);
                    }
                }
            }
        }
        for &(c, _) in &pivot_row {
            self.col_rows[c].remove(&pr);
        }
        self.rows[pr].clear();
        self.live_rows.remove(&pr);
        self.live_cols.remove(&pc);
        true
    }

    fn residual_dense(&self) -> Vec<Vec<BigInt>> {
        let cols: Vec<usize> = self.live_cols.iter().copied().collect();
        let col_pos: BTreeMap<usize, usize> =
            cols.iter().enumerate().map(|(i, &c)| (c, i)).collect();
        let mut out = Vec::new();
        for &r in &self.live_rows {
            if self.rows[r].is_empty() {
                continue;
            }
            let mut row = vec![BigInt::zero(); cols.len()];
            for (&c, &v) in &self.rows[r] {
                row[col_pos[&c]] = BigInt::from(v);
            }
            out.push(row);
        }
        out
    }
}

// ==== phase 2: classical reduction on a dense bigint block ====

type Track<'a> = Option<(&'a mut Vec<Vec<BigInt>>, &'a mut Vec<Vec<BigInt>>)>;

/// Returns the nonzero diagonal, each entry dividing the next. When transform
/// tracking is requested, the recorded matrices satisfy `diag = U * A * V`.
fn dense_snf(mut a: Vec<Vec<BigInt>>, mut track: Track<'_>) -> Vec<BigUint> {
    let nr = a.len();
    let nc = a.first().map_or(0, Vec::len);
    let n = nr.min(nc);
    let mut k = 0;
    while k < n {
        let Some((pi, pj)) = min_abs_pivot(&a, k) else {
            break;
        };
        swap_rows(&mut a, &mut track, k, pi);
        swap_cols(&mut a, &mut track, k, pj);
        loop {
            let mut changed = false;
            for i in k + 1..nr {
                if a[i][k].is_zero() {
                    continue;
                }
                let q = &a[i][k] / &a[k][k];
                if !q.is_zero() {
                    row_sub(&mut a, &mut track, i, k, &q);
                }
                if !a[i][k].is_zero() {
                    swap_rows(&mut a, &mut track, i, k);
                    changed = true;
                }
            }
            if changed {
                continue;
            }
            for j in k + 1..nc {
                if a[k][j].is_zero() {
                    continue;
                }
                let q = &a[k][j] / &a[k][k];
                if !q.is_zero() {
                    col_sub(&mut a, &mut track, j, k, &q);
                }
                if !a[k][j].is_zero() {
                    swap_cols(&mut a, &mut track, j, k);
                    changed = true;
                }
            }
            if changed {
                continue;
            }
            // pivot row and column are clear; enforce divisibility
            let d = a[k][k].clone();
            let offender = (k + 1..nr).find(|&i| (k + 1..nc).any(|j| !(&a[i][j] % &d).is_zero()));
            match offender {
                Some(i) => {
                    row_add(&mut a, &mut track, k, i);
                }
                None => break,
            }
        }
        if a[k][k].sign() == Sign::Minus {
            negate_row(&mut a, &mut track, k);
        }
        k += 1;
    }
    (0..k).map(|i| a[i][i].magnitude().clone()).collect()
}

fn min_abs_pivot(a: &[Vec<BigInt>], k: usize) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize)> = None;
    for (i, row) in a.iter().enumerate().skip(k) {
        for (j, v) in row.iter().enumerate().skip(k) {
            if v.is_zero() {
                continue;
            }
            if best.is_none_or(|(bi, bj)| v.abs() < a[bi][bj].abs()) {
                best = Some((i, j));
            }
        }
    }
    best
}

fn swap_rows(a: &mut [Vec<BigInt>], track: &mut Track, i: usize, j: usize) {
    if i == j {
        return;
    }
    a.swap(i, j);
    if let Some((u, _)) = track {
        u.swap(i, j);
    }
}

fn swap_cols(a: &mut [Vec<BigInt>], track: &mut Track, i: usize, j: usize) {
    if i == j {
        return;
    }
    for row in a.iter_mut() {
        row.swap(i, j);
    }
    if let Some((_, v)) = track {
        for row in v.iter_mut() {
            row.swap(i, j);
        }
    }
}

/// row_i -= q * row_j
fn row_sub(a: &mut [Vec<BigInt>], track: &mut Track, i: usize, j: usize, q: &BigInt) {
    for c in 0..a[i].len() {
        let t = q * &a[j][c];
        a[i][c] -= t;
    }
    if let Some((u, _)) = track {
        for c in 0..u[i].len() {
            let t = q * &u[j][c];
            u[i][c] -= t;
        }
    }
}

/// row_i += row_j
fn row_add(a: &mut [Vec<BigInt>], track: &mut Track, i: usize, j: usize) {
    for c in 0..a[i].len() {
        let t = a[j][c].clone();
        a[i][c] += t;
    }
    if let Some((u, _)) = track {
        for c in 0..u[i].len() {
            let t = u[j][c].clone();
            u[i][c] += t;
        }
    }
}

/// col_i -= q * col_j
fn col_sub(a: &mut [Vec<BigInt>], track: &mut Track, i: usize, j: usize, q: &BigInt) {
    for row in a.iter_mut() {
        let t = q * &row[j];
        row[i] -= t;
    }
    if let Some((_, v)) = track {
        for row in v.iter_mut() {
            let t = q * &row[j];
            row[i] -= t;
        }
    }
}

fn negate_row(a: &mut [Vec<BigInt>], track: &mut Track, i: usize) {
    for v in a[i].iter_mut() {
        *v = -v.clone();
    }
    if let Some((u, _)) = track {
        for v in u[i].iter_mut() {
            *v = -v.clone();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diag_u64(s: &Snf) -> Vec<u64> {
        s.diagonal
            .iter()
            .map(|d| u64::try_from(d).expect("small"))
            .collect()
    }

    #[test]
    fn two_by_two_with_even_entries() {
        let m = IntMatrix::from_dense(&[vec![2, 4], vec![6, 8]]);
        let s = smith_normal_form(&m);
        assert_eq!(diag_u64(&s), vec![2, 4]);
        assert_eq!(s.rank(), 2);
    }

    #[test]
    fn diagonal_gets_reordered_into_chain() {
        let m = IntMatrix::from_dense(&[vec![4, 0], vec![0, 6]]);
        assert_eq!(diag_u64(&smith_normal_form(&m)), vec![2, 12]);
    }

    #[test]
    fn identity_and_zero() {
        let id = IntMatrix::from_dense(&[vec![1, 0], vec![0, 1]]);
        assert_eq!(diag_u64(&smith_normal_form(&id)), vec![1, 1]);
        let z = IntMatrix::zero(3, 2);
        let s = smith_normal_form(&z);
        assert_eq!(s.rank(), 0);
        assert_eq!(s.cokernel(), (2, vec![]));
    }

    #[test]
    fn rectangular_with_torsion() {
        // relations 2x = 0, 3y = 0, x + y + z = 0 on three generators:
        // quotient is Z_6, since z absorbs the free part... rank 3, torsion (6)
        let m = IntMatrix::from_dense(&[vec![2, 0, 0], vec![0, 3, 0], vec![1, 1, 1]]);
        let s = smith_normal_form(&m);
        assert_eq!(s.rank(), 3);
        let (free, torsion) = s.cokernel();
        assert_eq!(free, 0);
        assert_eq!(torsion, vec![BigUint::from(6u32)]);
    }

    #[test]
    fn sweep_handles_unit_heavy_matrix() {
        // a chain of unit pivots plus one torsion block
        let m = IntMatrix::from_dense(&[
            vec![1, 2, 0, 0],
            vec![0, 1, 3, 0],
            vec![0, 0, 4, 0],
            vec![0, 0, 0, 0],
        ]);
        let s = smith_normal_form(&m);
        assert_eq!(diag_u64(&s), vec![1, 1, 4]);
    }

    #[test]
    fn solve_mod_consistent_system() {
        // 2x = 6 and x = 3 (mod 8): x in {3, 7} works for the first,
        // pin forces 3
        let a = IntMatrix::from_dense(&[vec![2], vec![1]]);
        let x = solve_mod(&a, &[6, 3], 8).expect("solvable");
        assert_eq!(x, vec![3]);
    }

    #[test]
    fn solve_mod_detects_infeasible_pin() {
        // 2x = 0 with x pinned to 1 (mod 4) has no solution
        let a = IntMatrix::from_dense(&[vec![2], vec![1]]);
        assert_eq!(solve_mod(&a, &[0, 1], 4), None);
    }

    #[test]
    fn solve_mod_two_unknowns() {
        // x + y = 5, x - y = 1 (mod 8) -> x = 3, y = 2
        let a = IntMatrix::from_dense(&[vec![1, 1], vec![1, -1]]);
        let x = solve_mod(&a, &[5, 1], 8).expect("solvable");
        assert_eq!((x[0] + x[1]) % 8, 5);
        assert_eq!((8 + x[0] - x[1]) % 8, 1);
    }

    #[test]
    fn negative_entries_normalize() {
        let m = IntMatrix::from_dense(&[vec![-3]]);
        assert_eq!(diag_u64(&smith_normal_form(&m)), vec![3]);
    }
}
