//! The cell structure of the closure `D̄_n` of the diagonal orthogonal groups
//! in the space of subgroups of `GL(n; R)`.
//!
//! A cell is an ordered set partition of the coordinates (dominant block
//! first) together with a sign for each coordinate, taken modulo a global
//! flip in each block. A partition into `k` blocks gives cells of dimension
//! `n − k`.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::limits::{classify_limit_group_3d, flag_signature, FlagSignature, LimitGroup3, OrderedPartition};

fn binomial(n: usize, k: usize) -> u64 {
    if k > n {
        return 0;
    }
    (0..k).fold(1u64, |acc, i| acc * (n - i) as u64 / (i + 1) as u64)
}

/// Number of open `k`-simplices, `2^k·C(n, k+1)`, in the complement of the
/// coordinate hyperplanes in `RP^{n−1}`, for `k = 0, …, n−1`.
pub fn simplex_cell_counts(n: usize) -> Vec<u64> {
    (0..n).map(|k| (1u64 << k) * binomial(n, k + 1)).collect()
}

/// Cell counts of `D̄_n` by dimension, from the fibration over the simplices:
/// over an open `k`-simplex the fibre is `D̄_{n−k−1}`.
pub fn closure_cell_counts(n: usize) -> Vec<u64> {
    let mut memo: HashMap<usize, Vec<u64>> = HashMap::new();
    closure_counts_memo(n, &mut memo)
}

fn closure_counts_memo(n: usize, memo: &mut HashMap<usize, Vec<u64>>) -> Vec<u64> {
    if n <= 1 {
        return vec![1];
    }
    if let Some(c) = memo.get(&n) {
        return c.clone();
    }
    let mut out = vec![0u64; n];
    for (k, &s) in simplex_cell_counts(n).iter().enumerate() {
        let fibre = closure_counts_memo(n - k - 1, memo);
        for (d, &f) in fibre.iter().enumerate() {
            out[k + d] += s * f;
        }
    }
    memo.insert(n, out.clone());
    out
}

/// Alternating sum of the cell counts.
pub fn euler_characteristic(n: usize) -> i64 {
    closure_cell_counts(n)
        .iter()
        .enumerate()
        .map(|(d, &c)| if d % 2 == 0 { c as i64 } else { -(c as i64) })
        .sum()
}

/// A cell of `D̄_n`. Indices are 0-based; within a block they are sorted,
/// and the sign of the smallest index of every block is `+1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Cell {
    blocks: Vec<Vec<usize>>,
    signs: Vec<i8>,
}

impl Cell {
    pub fn new(mut blocks: Vec<Vec<usize>>, mut signs: Vec<i8>) -> Result<Self> {
        let n = signs.len();
        let mut seen = vec![false; n];
        for b in &mut blocks {
            if b.is_empty() {
                return Err(Error::Parse("empty block".into()));
            }
            b.sort_unstable();
            for &i in b.iter() {
                if i >= n || seen[i] {
                    return Err(Error::Parse(format!("index {i} is out of range or repeated")));
                }
                seen[i] = true;
            }
        }
        if seen.iter().any(|s| !s) {
            return Err(Error::Parse("blocks do not cover every index".into()));
        }
        if signs.iter().any(|&s| s != 1 && s != -1) {
            return Err(Error::Parse("signs must be +1 or -1".into()));
        }
        for b in &blocks {
            if signs[b[0]] < 0 {
                b.iter().for_each(|&i| signs[i] = -signs[i]);
            }
        }
        Ok(Self { blocks, signs })
    }

    pub fn n(&self) -> usize {
        self.signs.len()
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn signs(&self) -> &[i8] {
        &self.signs
    }

    pub fn dim(&self) -> usize {
        self.n() - self.blocks.len()
    }

    /// The limit data of a point of the cell, with block points `±1`.
    pub fn partition(&self) -> OrderedPartition {
        let points = self
            .blocks
            .iter()
            .map(|b| b.iter().map(|&i| self.signs[i] as f64).collect())
            .collect();
        OrderedPartition::new(self.blocks.clone(), points).expect("cells are valid partitions")
    }

    pub fn flag_signature(&self) -> FlagSignature {
        flag_signature(&self.partition())
    }

    /// Limit group type for `n = 3`.
    pub fn class_3d(&self) -> Option<LimitGroup3> {
        (self.n() == 3).then(|| classify_limit_group_3d(&self.flag_signature()).ok())?
    }
}

/// Every ordered set partition of `items`, as lists of blocks.
fn ordered_partitions(items: &[usize]) -> Vec<Vec<Vec<usize>>> {
    if items.is_empty() {
        return vec![Vec::new()];
    }
    let m = items.len();
    let mut out = Vec::new();
    for mask in 1u32..(1 << m) {
        let (first, rest): (Vec<usize>, Vec<usize>) = {
            let mut f = Vec::new();
            let mut r = Vec::new();
            for (k, &x) in items.iter().enumerate() {
                if mask & (1 << k) != 0 {
                    f.push(x);
                } else {
                    r.push(x);
                }
            }
            (f, r)
        };
        for mut tail in ordered_partitions(&rest) {
            tail.insert(0, first.clone());
            out.push(tail);
        }
    }
    out
}

fn sign_classes(blocks: &[Vec<usize>], n: usize) -> Vec<Vec<i8>> {
    let free: Vec<usize> = blocks.iter().flat_map(|b| b[1..].iter().copied()).collect();
    (0u32..(1 << free.len()))
        .map(|mask| {
            let mut s = vec![1i8; n];
            for (k, &i) in free.iter().enumerate() {
                if mask & (1 << k) != 0 {
                    s[i] = -1;
                }
            }
            s
        })
        .collect()
}

/// All cells of `D̄_n`, grouped by partition in enumeration order.
pub fn enumerate_cells(n: usize) -> Vec<Cell> {
    let items: Vec<usize> = (0..n).collect();
    ordered_partitions(&items)
        .into_iter()
        .flat_map(|blocks| {
            sign_classes(&blocks, n)
                .into_iter()
                .map(move |signs| Cell { blocks: blocks.clone(), signs })
        })
        .collect()
}

/// Cell counts by dimension from an explicit enumeration.
pub fn enumerated_counts(n: usize) -> Vec<u64> {
    let mut out = vec![0u64; n.max(1)];
    for c in enumerate_cells(n) {
        out[c.dim()] += 1;
    }
    out
}

/// Whether `b` is a degeneration of `a`: each block of `a` is split into
/// consecutive blocks of `b`, in order, and the signs of `b` are those of
/// `a` up to a flip per block. A cell is not a degeneration of itself.
pub fn degeneration_relation(a: &Cell, b: &Cell) -> bool {
    if a.n() != b.n() || b.blocks.len() <= a.blocks.len() {
        return false;
    }
    let mut k = 0;
    for ab in &a.blocks {
        let mut covered: Vec<usize> = Vec::new();
        while covered.len() < ab.len() {
            let Some(bb) = b.blocks.get(k) else { return false };
            if !bb.iter().all(|i| ab.binary_search(i).is_ok()) {
                return false;
            }
            let flip = a.signs[bb[0]] * b.signs[bb[0]];
            if bb.iter().any(|&i| a.signs[i] * b.signs[i] != flip) {
                return false;
            }
            covered.extend(bb);
            k += 1;
        }
    }
    k == b.blocks.len()
}

/// Graphviz rendering of the degeneration order on the cells of `D̄_n`,
/// restricted to cover relations (dimension drop one).
pub fn cells_to_dot(n: usize) -> String {
    let cells = enumerate_cells(n);
    let mut s = format!("digraph \"D{n}\" {{\n  rankdir=TB;\n");
    for (k, c) in cells.iter().enumerate() {
        s.push_str(&format!("  c{k} [label=\"{}\"];\n", cell_label(c)));
    }
    for (i, a) in cells.iter().enumerate() {
        for (j, b) in cells.iter().enumerate() {
            if b.dim() + 1 == a.dim() && degeneration_relation(a, b) {
                s.push_str(&format!("  c{i} -> c{j};\n"));
            }
        }
    }
    s.push_str("}\n");
    s
}

/// Compact label such as `{1+,2-}{3+}`, with 1-based indices.
pub fn cell_label(c: &Cell) -> String {
    c.blocks
        .iter()
        .map(|b| {
            let inner: Vec<String> = b
                .iter()
                .map(|&i| format!("{}{}", i + 1, if c.signs[i] > 0 { '+' } else { '-' }))
                .collect();
            format!("{{{}}}", inner.join(","))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simplex_counts() {
        assert_eq!(simplex_cell_counts(2), vec![2, 2]);
        assert_eq!(simplex_cell_counts(3), vec![3, 6, 4]);
        assert_eq!(simplex_cell_counts(4), vec![4, 12, 16, 8]);
    }

    #[test]
    fn closure_counts() {
        assert_eq!(closure_cell_counts(2), vec![2, 2]);
        assert_eq!(closure_cell_counts(3), vec![6, 12, 4]);
        assert_eq!(*closure_cell_counts(4).last().unwrap(), 8);
        assert_eq!(euler_characteristic(2), 0);
        assert_eq!(euler_characteristic(3), -2);
    }

    #[test]
    fn enumeration_matches_recursion() {
        for n in 2..=7 {
            assert_eq!(enumerated_counts(n), closure_cell_counts(n), "n = {n}");
        }
    }

    #[test]
    fn small_enumerations() {
        let cells = enumerate_cells(2);
        assert_eq!(cells.len(), 4);
        assert_eq!(cells.iter().filter(|c| c.dim() == 1).count(), 2);
        let vertices: Vec<_> = cells.iter().filter(|c| c.dim() == 0).map(|c| c.blocks.clone()).collect();
        assert!(vertices.contains(&vec![vec![0], vec![1]]));
        assert!(vertices.contains(&vec![vec![1], vec![0]]));
    }

    #[test]
    fn canonical_signs() {
        let c = Cell::new(vec![vec![2, 0], vec![1]], vec![-1, -1, 1]).unwrap();
        assert_eq!(c.signs(), &[1, 1, -1]);
        assert_eq!(c.blocks(), &[vec![0, 2], vec![1]]);
        assert!(Cell::new(vec![vec![0]], vec![1, 1]).is_err());
    }

    fn top() -> Cell {
        Cell::new(vec![vec![0, 1, 2]], vec![1, 1, 1]).unwrap()
    }

    #[test]
    fn hexagon_boundary() {
        let cells = enumerate_cells(3);
        let below: Vec<&Cell> = cells.iter().filter(|c| degeneration_relation(&top(), c)).collect();
        assert_eq!(below.len(), 12);
        let count = |g: LimitGroup3| below.iter().filter(|c| c.class_3d() == Some(g)).count();
        assert_eq!(count(LimitGroup3::EucInvT), 3);
        assert_eq!(count(LimitGroup3::Euc), 3);
        assert_eq!(count(LimitGroup3::Heis), 6);
        assert_eq!(top().class_3d(), Some(LimitGroup3::O3));
    }

    #[test]
    fn order_properties_on_d3() {
        let cells = enumerate_cells(3);
        for a in &cells {
            for b in &cells {
                if a.dim() == b.dim() {
                    assert!(!degeneration_relation(a, b));
                }
                for c in &cells {
                    if degeneration_relation(a, b) && degeneration_relation(b, c) {
                        assert!(degeneration_relation(a, c));
                    }
                }
            }
        }
        // every maximal chain runs through all three dimensions
        for a in cells.iter().filter(|c| c.dim() == 2) {
            for b in cells.iter().filter(|b| degeneration_relation(a, b)) {
                if b.dim() == 1 {
                    assert!(cells.iter().any(|c| degeneration_relation(b, c)));
                }
            }
        }
        for b in cells.iter().filter(|c| c.dim() == 1) {
            assert!(cells.iter().any(|a| degeneration_relation(a, b)));
        }
    }

    #[test]
    fn signs_must_restrict() {
        let a = top();
        let b = Cell::new(vec![vec![0, 1], vec![2]], vec![1, -1, 1]).unwrap();
        assert!(!degeneration_relation(&a, &b));
        let a = Cell::new(vec![vec![0, 1, 2]], vec![1, -1, 1]).unwrap();
        assert!(degeneration_relation(&a, &b));
        assert_eq!(b.class_3d(), Some(LimitGroup3::MinkInvT));
    }

    #[test]
    fn dot_output() {
        let dot = cells_to_dot(2);
        assert_eq!(dot.matches("label=").count(), 4);
        assert_eq!(dot.matches("->").count(), 4);
        assert_eq!(cell_label(&top()), "{1+,2+,3+}");
    }
}
