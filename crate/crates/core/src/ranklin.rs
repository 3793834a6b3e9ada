//! Exact rank of sparse rational matrices.
//!
//! Rows are cleared of denominators and eliminated fraction-free (Bareiss).
//! Rows that a pivot step does not touch keep the step index at which they
//! were last current ("stamp"); before their next update they are scaled by
//! `d_{k-1} / d_s`, which is exactly what the dense algorithm would have done
//! to them in the meantime.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::time::{Duration, Instant};

use num::{BigInt, Integer, One, Zero};

use crate::algebra::{parse_rational, Rational};
use crate::error::{Error, Result};

/// Sparse matrix with exact rational entries.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RationalMatrix {
    rows: usize,
    cols: usize,
    entries: BTreeMap<(usize, usize), Rational>,
}

impl RationalMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        RationalMatrix {
            rows,
            cols,
            entries: BTreeMap::new(),
        }
    }

    pub fn from_dense(rows: &[Vec<Rational>]) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        let mut m = Self::zeros(rows.len(), cols);
        for (r, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), cols, "ragged dense matrix");
            for (c, v) in row.iter().enumerate() {
                m.set(r, c, v.clone());
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

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    /// Sets an entry; storing zero removes it.
    pub fn set(&mut self, r: usize, c: usize, v: Rational) {
        assert!(r < self.rows && c < self.cols, "entry ({r}, {c}) out of range");
        if v.is_zero() {
            self.entries.remove(&(r, c));
        } else {
            self.entries.insert((r, c), v);
        }
    }

    pub fn get(&self, r: usize, c: usize) -> Rational {
        self.entries.get(&(r, c)).cloned().unwrap_or_else(Rational::zero)
    }

    /// Nonzero entries sorted by `(row, col)`.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, &Rational)> {
        self.entries.iter().map(|(&(r, c), v)| (r, c, v))
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for (r, c, v) in self.entries() {
            t.entries.insert((c, r), v.clone());
        }
        t
    }

    /// The product `self * rhs`.
    pub fn mul(&self, rhs: &RationalMatrix) -> RationalMatrix {
        assert_eq!(self.cols, rhs.rows, "dimension mismatch in product");
        let mut by_row: Vec<Vec<(usize, &Rational)>> = vec![Vec::new(); rhs.rows];
        for (r, c, v) in rhs.entries() {
            by_row[r].push((c, v));
        }
        let mut acc: BTreeMap<(usize, usize), Rational> = BTreeMap::new();
        for (r, k, a) in self.entries() {
            for &(c, b) in &by_row[k] {
                *acc.entry((r, c)).or_insert_with(Rational::zero) += a * b;
            }
        }
        let mut out = Self::zeros(self.rows, rhs.cols);
        out.entries = acc.into_iter().filter(|(_, v)| !v.is_zero()).collect();
        out
    }

    /// Text dump: a `rows cols` header, then `r c p/q` lines (0-based, sorted).
    pub fn dump(&self) -> String {
        let mut out = format!("{} {}\n", self.rows, self.cols);
        for (r, c, v) in self.entries() {
            let _ = writeln!(out, "{r} {c} {v}");
        }
        out
    }

    pub fn parse_dump(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let bad = |l: &str| Error::Parse(format!("bad matrix line `{l}`"));
        let header = lines.next().ok_or_else(|| Error::Parse("empty matrix dump".into()))?;
        let dims: Vec<usize> = header
            .split_whitespace()
            .map(|t| t.parse().map_err(|_| bad(header)))
            .collect::<Result<_>>()?;
        if dims.len() != 2 {
            return Err(bad(header));
        }
        let mut m = Self::zeros(dims[0], dims[1]);
        for line in lines {
            let parts: Vec<&str> = line.split_whitespace().collect();
            if parts.len() != 3 {
                return Err(bad(line));
            }
            let r: usize = parts[0].parse().map_err(|_| bad(line))?;
            let c: usize = parts[1].parse().map_err(|_| bad(line))?;
            if r >= m.rows || c >= m.cols {
                return Err(Error::IndexOutOfRange(format!("matrix entry ({r}, {c})")));
            }
            m.set(r, c, parse_rational(parts[2])?);
        }
        Ok(m)
    }
}

/// Outcome of one elimination.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EliminationReport {
    pub rank: usize,
    /// Pivot positions `(row, col)` in the original matrix, in elimination order.
    pub pivots: Vec<(usize, usize)>,
    /// Entries created where the row previously had none.
    pub fill_in: usize,
    pub elapsed: Duration,
}

impl EliminationReport {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "rank": self.rank,
            "pivots": self.pivots.iter().map(|&(r, c)| [r, c]).collect::<Vec<_>>(),
            "fill_in": self.fill_in,
            "elapsed_ms": self.elapsed.as_secs_f64() * 1000.0,
        })
    }
}

pub fn rank(m: &RationalMatrix) -> usize {
    eliminate(m).rank
}

pub fn kernel_dim(m: &RationalMatrix) -> usize {
    m.cols - rank(m)
}

type Row = Vec<(usize, BigInt)>;

/// Clears denominators: multiplies the row by the lcm of its denominators.
fn integer_row(entries: &[(usize, &Rational)]) -> Row {
    let lcm = entries
        .iter()
        .fold(BigInt::one(), |acc, (_, v)| acc.lcm(v.denom()));
    entries
        .iter()
        .map(|(c, v)| (*c, v.numer() * (&lcm / v.denom())))
        .collect()
}

/// Runs the elimination and records pivots and fill-in.
pub fn eliminate(m: &RationalMatrix) -> EliminationReport {
    let start = Instant::now();
    let mut rows: Vec<Vec<(usize, &Rational)>> = vec![Vec::new(); m.rows];
    for (r, c, v) in m.entries() {
        rows[r].push((c, v));
    }
    let mut report = EliminationReport {
        rank: 0,
        pivots: Vec::new(),
        fill_in: 0,
        elapsed: Duration::ZERO,
    };
    for component in components(m.rows, m.cols, &rows) {
        let block: Vec<(usize, Row)> = component
            .into_iter()
            .map(|r| (r, integer_row(&rows[r])))
            .collect();
        bareiss(block, m.cols, &mut report);
    }
    report.rank = report.pivots.len();
    report.elapsed = start.elapsed();
    report
}

/// Groups nonzero rows into blocks that share no column.
fn components(nrows: usize, ncols: usize, rows: &[Vec<(usize, &Rational)>]) -> Vec<Vec<usize>> {
    let mut parent: Vec<usize> = (0..nrows).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    let mut owner = vec![usize::MAX; ncols];
    for (r, row) in rows.iter().enumerate() {
        for &(c, _) in row {
            if owner[c] == usize::MAX {
                owner[c] = r;
            } else {
                let (a, b) = (find(&mut parent, owner[c]), find(&mut parent, r));
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
    }
    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for r in 0..nrows {
        if !rows[r].is_empty() {
            let root = find(&mut parent, r);
            groups.entry(root).or_default().push(r);
        }
    }
    groups.into_values().collect()
}

fn entry(row: &Row, col: usize) -> Option<&BigInt> {
    row.binary_search_by_key(&col, |(c, _)| *c).ok().map(|i| &row[i].1)
}

/// Scales `row` from stamp `s` to the current divisor: `row * d_now / d_s`.
fn bring_current(row: &mut Row, d_now: &BigInt, d_s: &BigInt) {
    if d_now == d_s {
        return;
    }
    for (_, v) in row.iter_mut() {
        *v = &*v * d_now / d_s;
    }
}

fn bareiss(mut block: Vec<(usize, Row)>, ncols: usize, report: &mut EliminationReport) {
    // divisors d_0 = 1, d_k = k-th pivot
    let mut divisors: Vec<BigInt> = vec![BigInt::one()];
    let mut stamps: Vec<usize> = vec![0; block.len()];
    let mut col_count = vec![0usize; ncols];
    for (_, row) in &block {
        for (c, _) in row {
            col_count[*c] += 1;
        }
    }
    let mut alive: Vec<usize> = (0..block.len()).filter(|&i| !block[i].1.is_empty()).collect();

    while !alive.is_empty() {
        // pivot: fewest row entries, then fewest column entries, then column, then row
        let mut best: Option<(usize, usize, usize, usize, usize)> = None;
        for (pos, &i) in alive.iter().enumerate() {
            let (orig, row) = &block[i];
            if let Some(b) = best {
                if row.len() > b.0 {
                    continue;
                }
            }
            for (c, _) in row {
                let key = (row.len(), col_count[*c], *c, *orig, pos);
                if best.map_or(true, |b| key < b) {
                    best = Some(key);
                }
            }
        }
        let (_, _, pcol, porig, ppos) = best.expect("alive rows are nonempty");
        let pi = alive.swap_remove(ppos);
        let k = divisors.len();
        let d_prev = divisors[k - 1].clone();
        let mut prow = std::mem::take(&mut block[pi].1);
        bring_current(&mut prow, &d_prev, &divisors[stamps[pi]]);
        for (c, _) in &prow {
            col_count[*c] -= 1;
        }
        let p = entry(&prow, pcol).cloned().expect("pivot entry present");
        report.pivots.push((porig, pcol));

        let mut next_alive = Vec::with_capacity(alive.len());
        for &i in &alive {
            if entry(&block[i].1, pcol).is_none() {
                next_alive.push(i);
                continue;
            }
            let mut row = std::mem::take(&mut block[i].1);
            bring_current(&mut row, &d_prev, &divisors[stamps[i]]);
            let a = entry(&row, pcol).cloned().expect("checked above");
            let before = row.len();
            for (c, _) in &row {
                col_count[*c] -= 1;
            }
            let updated = combine(&row, &p, &prow, &a, &d_prev);
            let after = updated.len();
            report.fill_in += after.saturating_sub(before.saturating_sub(1));
            for (c, _) in &updated {
                col_count[*c] += 1;
            }
            stamps[i] = k;
            block[i].1 = updated;
            if !block[i].1.is_empty() {
                next_alive.push(i);
            }
        }
        alive = next_alive;
        divisors.push(p);
    }
}

/// `(p * row - a * pivot) / d`, exact.
fn combine(row: &Row, p: &BigInt, pivot: &Row, a: &BigInt, d: &BigInt) -> Row {
    let mut out = Vec::with_capacity(row.len() + pivot.len());
    let (mut i, mut j) = (0, 0);
    let unit = d.is_one();
    let finish = |v: BigInt| if unit { v } else { v / d };
    while i < row.len() || j < pivot.len() {
        let ci = row.get(i).map_or(usize::MAX, |e| e.0);
        let cj = pivot.get(j).map_or(usize::MAX, |e| e.0);
        let (c, v) = if ci < cj {
            i += 1;
            (ci, p * &row[i - 1].1)
        } else if cj < ci {
            j += 1;
            (cj, -(a * &pivot[j - 1].1))
        } else {
            i += 1;
            j += 1;
            (ci, p * &row[i - 1].1 - a * &pivot[j - 1].1)
        };
        if !v.is_zero() {
            debug_assert!(unit || (&v % d).is_zero(), "Bareiss division not exact");
            out.push((c, finish(v)));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{frac, int};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Dense Gauss-Jordan over the rationals.
    fn naive_rank(m: &RationalMatrix) -> usize {
        let mut a: Vec<Vec<Rational>> = (0..m.rows()).map(|r| (0..m.cols()).map(|c| m.get(r, c)).collect()).collect();
        let mut rank = 0;
        for col in 0..m.cols() {
            let Some(p) = (rank..m.rows()).find(|&r| !a[r][col].is_zero()) else {
                continue;
            };
            a.swap(rank, p);
            for r in 0..m.rows() {
                if r != rank && !a[r][col].is_zero() {
                    let f = &a[r][col] / &a[rank][col];
                    for c in col..m.cols() {
                        let d = &f * &a[rank][c];
                        a[r][c] -= d;
                    }
                }
            }
            rank += 1;
        }
        rank
    }

    fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize, density: f64) -> RationalMatrix {
        let mut m = RationalMatrix::zeros(rows, cols);
        for r in 0..rows {
            for c in 0..cols {
                if rng.gen_bool(density) {
                    m.set(r, c, frac(rng.gen_range(-9..=9), rng.gen_range(1..=4)));
                }
            }
        }
        m
    }

    #[test]
    fn trivial_ranks() {
        let zero = RationalMatrix::zeros(5, 7);
        assert_eq!(rank(&zero), 0);
        assert_eq!(kernel_dim(&zero), 7);
        let m = RationalMatrix::from_dense(&[vec![int(1), int(2)], vec![int(2), int(4)]]);
        assert_eq!(rank(&m), 1);
        let id = RationalMatrix::from_dense(&[vec![frac(1, 3), int(0)], vec![int(0), frac(-2, 7)]]);
        assert_eq!(rank(&id), 2);
    }

    #[test]
    fn report_is_consistent() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let m = random_matrix(&mut rng, 12, 9, 0.3);
        let rep = eliminate(&m);
        assert_eq!(rep.rank, rep.pivots.len());
        let mut rows: Vec<usize> = rep.pivots.iter().map(|p| p.0).collect();
        let mut cols: Vec<usize> = rep.pivots.iter().map(|p| p.1).collect();
        rows.sort();
        rows.dedup();
        cols.sort();
        cols.dedup();
        assert_eq!(rows.len(), rep.rank);
        assert_eq!(cols.len(), rep.rank);
        assert!(rep.to_json()["rank"].as_u64() == Some(rep.rank as u64));
    }

    #[test]
    fn dump_round_trip() {
        let m = RationalMatrix::from_dense(&[vec![int(0), frac(-1, 2)], vec![int(3), int(0)], vec![int(0), int(0)]]);
        let text = m.dump();
        assert_eq!(text, "3 2\n0 1 -1/2\n1 0 3\n");
        assert_eq!(RationalMatrix::parse_dump(&text).unwrap(), m);
        assert!(RationalMatrix::parse_dump("2 2\n5 0 1\n").is_err());
        assert!(RationalMatrix::parse_dump("").is_err());
    }

    #[test]
    fn product_and_transpose() {
        let a = RationalMatrix::from_dense(&[vec![int(1), int(2)], vec![int(0), int(1)]]);
        let b = RationalMatrix::from_dense(&[vec![int(1), int(0)], vec![int(-2), int(1)]]);
        let ab = a.mul(&b);
        assert_eq!(ab, RationalMatrix::from_dense(&[vec![int(-3), int(2)], vec![int(-2), int(1)]]));
        assert_eq!(a.transpose().transpose(), a);
        assert_eq!(a.transpose().get(1, 0), int(2));
    }

    #[test]
    fn oracle_agreement_on_seeded_matrices() {
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        for _ in 0..60 {
            let (r, c) = (rng.gen_range(1..=25), rng.gen_range(1..=25));
            let density = rng.gen_range(0.05..0.6);
            let mut m = random_matrix(&mut rng, r, c, density);
            // plant dependent rows
            if r > 2 {
                for col in 0..c {
                    let v = m.get(0, col) * int(3) - m.get(1, col);
                    m.set(r - 1, col, v);
                }
            }
            assert_eq!(rank(&m), naive_rank(&m));
        }
    }

    fn arb_matrix() -> impl Strategy<Value = RationalMatrix> {
        (1usize..14, 1usize..14).prop_flat_map(|(r, c)| {
            proptest::collection::vec((-3i64..=3, 1i64..=3), r * c).prop_map(move |vals| {
                let mut m = RationalMatrix::zeros(r, c);
                for (i, (n, d)) in vals.into_iter().enumerate() {
                    m.set(i / c, i % c, frac(n, d));
                }
                m
            })
        })
    }

    proptest! {
        #[test]
        fn rank_of_transpose(m in arb_matrix()) {
            prop_assert_eq!(rank(&m), rank(&m.transpose()));
        }

        #[test]
        fn matches_oracle(m in arb_matrix()) {
            prop_assert_eq!(rank(&m), naive_rank(&m));
        }

        #[test]
        fn invariant_under_row_scaling_and_swaps(m in arb_matrix(), s in 1i64..50, t in 1usize..1000) {
            let mut scaled = RationalMatrix::zeros(m.rows(), m.cols());
            let shift = t % m.rows();
            for (r, c, v) in m.entries() {
                let factor = if r % 2 == 0 { frac(s, 7) } else { frac(-7, s) };
                scaled.set((r + shift) % m.rows(), c, v * factor);
            }
            prop_assert_eq!(rank(&m), rank(&scaled));
        }

        #[test]
        fn product_rank_bound(a in arb_matrix(), extra in 1usize..10) {
            let b = RationalMatrix::from_dense(
                &(0..a.cols()).map(|i| (0..extra).map(|j| int(((i * 3 + j * 5) % 4) as i64 - 1)).collect()).collect::<Vec<_>>(),
            );
            let ab = a.mul(&b);
            prop_assert!(rank(&ab) <= rank(&a).min(rank(&b)));
        }
    }
}
