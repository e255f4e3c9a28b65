use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use super::monomial::MonomialDiagonal;
use super::rp1::Rp1Point;
use crate::error::{Error, Result};

/// Relative tolerance for agreement of block ratios during decoding.
const RATIO_TOL: f64 = 1e-9;

/// Index of the pair `(i, j)`, `i < j`, in lexicographic order.
pub(crate) fn pair_index(n: usize, i: usize, j: usize) -> usize {
    debug_assert!(i < j && j < n);
    i * n - i * (i + 1) / 2 + (j - i - 1)
}

pub(crate) fn pairs(n: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..n).flat_map(move |i| (i + 1..n).map(move |j| (i, j)))
}

/// A point of `(RP¹)^{C(n,2)}`: one projective point `[λᵢ : λⱼ]` for each
/// pair of coordinates `i < j`, stored in lexicographic pair order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LimitPoint {
    n: usize,
    components: Vec<Rp1Point>,
}

/// JSON-friendly view of one component, with 1-based indices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Component {
    pub pair: [usize; 2],
    pub point: Rp1Point,
}

impl LimitPoint {
    pub fn new(n: usize, components: Vec<Rp1Point>) -> Result<Self> {
        if n < 2 || components.len() != n * (n - 1) / 2 {
            return Err(Error::DimensionMismatch(format!(
                "{} components for n = {n}",
                components.len()
            )));
        }
        Ok(Self { n, components })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Component for the 0-based pair `i < j`.
    pub fn get(&self, i: usize, j: usize) -> Rp1Point {
        self.components[pair_index(self.n, i, j)]
    }

    pub fn components(&self) -> &[Rp1Point] {
        &self.components
    }

    pub fn labelled(&self) -> Vec<Component> {
        pairs(self.n)
            .map(|(i, j)| Component {
                pair: [i + 1, j + 1],
                point: self.get(i, j),
            })
            .collect()
    }
}

/// The limit as `t → +∞` of `Ψ(P(t)) = ([pᵢ(t) : pⱼ(t)])`. Computed exactly
/// by comparing the rational exponents.
pub fn psi_limit(path: &MonomialDiagonal) -> LimitPoint {
    let e = path.entries();
    let n = e.len();
    let components = pairs(n)
        .map(|(i, j)| match e[i].exponent.cmp(&e[j].exponent) {
            Ordering::Greater => Rp1Point::first(),
            Ordering::Less => Rp1Point::second(),
            Ordering::Equal => Rp1Point::new(e[i].coeff, e[j].coeff).expect("nonzero coefficients"),
        })
        .collect();
    LimitPoint { n, components }
}

/// Ordered partition of the coordinates into blocks of equal growth, from
/// dominant to most vanishing, each with the projective point of surviving
/// ratios. Block points are scaled so that their largest-magnitude entry is
/// `+1`; indices are 0-based and sorted within a block.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrderedPartition {
    blocks: Vec<Vec<usize>>,
    points: Vec<Vec<f64>>,
}

pub(crate) fn scale_block_point(point: &mut [f64]) {
    let m = point
        .iter()
        .copied()
        .fold(0.0f64, |m, x| if x.abs() > m.abs() { x } else { m });
    for x in point.iter_mut() {
        *x = *x / m + 0.0;
    }
}

impl OrderedPartition {
    pub fn new(blocks: Vec<Vec<usize>>, points: Vec<Vec<f64>>) -> Result<Self> {
        if blocks.len() != points.len() || blocks.is_empty() {
            return Err(Error::DimensionMismatch("one point per block is required".into()));
        }
        let n: usize = blocks.iter().map(Vec::len).sum();
        let mut seen = vec![false; n];
        let mut blocks_sorted = Vec::with_capacity(blocks.len());
        let mut points_sorted = Vec::with_capacity(points.len());
        for (block, point) in blocks.into_iter().zip(points) {
            if block.is_empty() || block.len() != point.len() {
                return Err(Error::DimensionMismatch("block and point sizes differ".into()));
            }
            if point.iter().any(|x| *x == 0.0 || !x.is_finite()) {
                return Err(Error::Inconsistent("block points must have nonzero entries".into()));
            }
            let mut pairs: Vec<(usize, f64)> = block.into_iter().zip(point).collect();
            pairs.sort_by_key(|p| p.0);
            for &(i, _) in &pairs {
                if i >= n || seen[i] {
                    return Err(Error::Inconsistent(format!("index {} repeated or out of range", i + 1)));
                }
                seen[i] = true;
            }
            let (b, mut p): (Vec<usize>, Vec<f64>) = pairs.into_iter().unzip();
            scale_block_point(&mut p);
            blocks_sorted.push(b);
            points_sorted.push(p);
        }
        Ok(Self {
            blocks: blocks_sorted,
            points: points_sorted,
        })
    }

    pub fn n(&self) -> usize {
        self.blocks.iter().map(Vec::len).sum()
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    /// Position of the block holding each coordinate, and the coordinate's
    /// entry in that block's point.
    fn locate(&self) -> Vec<(usize, f64)> {
        let mut out = vec![(0, 0.0); self.n()];
        for (b, (block, point)) in self.blocks.iter().zip(&self.points).enumerate() {
            for (&i, &x) in block.iter().zip(point) {
                out[i] = (b, x);
            }
        }
        out
    }
}

/// Inverse of [`decode_partition`].
pub fn encode_partition(p: &OrderedPartition) -> LimitPoint {
    let n = p.n();
    let loc = p.locate();
    let components = pairs(n)
        .map(|(i, j)| {
            let (bi, xi) = loc[i];
            let (bj, xj) = loc[j];
            match bi.cmp(&bj) {
                Ordering::Less => Rp1Point::first(),
                Ordering::Greater => Rp1Point::second(),
                Ordering::Equal => Rp1Point::new(xi, xj).expect("nonzero entries"),
            }
        })
        .collect();
    LimitPoint { n, components }
}

/// Recovers the ordered partition encoded by a limit point: coordinates
/// whose pairwise components are finite and nonzero share a block, the
/// blocks are ordered by dominance, and each block point is rebuilt from
/// the ratios to an anchor coordinate.
pub fn decode_partition(l: &LimitPoint) -> Result<OrderedPartition> {
    let n = l.n;
    // union of the "same growth" relation
    let mut class: Vec<usize> = (0..n).collect();
    fn root(class: &mut [usize], mut i: usize) -> usize {
        while class[i] != i {
            class[i] = class[class[i]];
            i = class[i];
        }
        i
    }
    for (i, j) in pairs(n) {
        if l.get(i, j).is_finite_nonzero() {
            let (a, b) = (root(&mut class, i), root(&mut class, j));
            class[a.max(b)] = a.min(b);
        }
    }
    let roots: Vec<usize> = (0..n).map(|i| root(&mut class, i)).collect();
    let mut blocks: Vec<Vec<usize>> = Vec::new();
    let mut block_of = vec![usize::MAX; n];
    for i in 0..n {
        let r = roots[i];
        if block_of[r] == usize::MAX {
            block_of[r] = blocks.len();
            blocks.push(Vec::new());
        }
        block_of[i] = block_of[r];
        blocks[block_of[r]].push(i);
    }

    // dominance between blocks must be decided the same way by every pair
    let k = blocks.len();
    let mut dominates = vec![vec![None::<bool>; k]; k];
    for (i, j) in pairs(n) {
        let c = l.get(i, j);
        let (bi, bj) = (block_of[i], block_of[j]);
        if bi == bj {
            if !c.is_finite_nonzero() {
                return Err(Error::Inconsistent(format!(
                    "coordinates {} and {} share a block but component ({},{}) is {c}",
                    i + 1,
                    j + 1,
                    i + 1,
                    j + 1
                )));
            }
            continue;
        }
        let i_wins = c.v() == 0.0;
        for (a, b, w) in [(bi, bj, i_wins), (bj, bi, !i_wins)] {
            match dominates[a][b] {
                Some(prev) if prev != w => {
                    return Err(Error::Inconsistent(format!(
                        "dominance between blocks of {} and {} is contradictory",
                        i + 1,
                        j + 1
                    )))
                }
                _ => dominates[a][b] = Some(w),
            }
        }
    }
    // a strict total order: the number of blocks beaten must be a permutation
    let wins: Vec<usize> = (0..k)
        .map(|a| (0..k).filter(|&b| dominates[a][b] == Some(true)).count())
        .collect();
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by_key(|&a| std::cmp::Reverse(wins[a]));
    if order.iter().enumerate().any(|(pos, &a)| wins[a] != k - 1 - pos) {
        return Err(Error::Inconsistent("dominance is not a total order".into()));
    }

    let mut out_blocks = Vec::with_capacity(k);
    let mut out_points = Vec::with_capacity(k);
    for &b in &order {
        let block = &blocks[b];
        let anchor = block[0];
        let point: Vec<f64> = block
            .iter()
            .map(|&j| if j == anchor { 1.0 } else { l.get(anchor, j).ratio().expect("same block") })
            .collect();
        // the remaining pairs must agree with the anchor ratios
        for (x, &i) in block.iter().enumerate() {
            for (y, &j) in block.iter().enumerate().skip(x + 1) {
                if x == 0 {
                    continue;
                }
                let expect = point[y] / point[x];
                let got = l.get(i, j).ratio().expect("same block");
                if (got - expect).abs() > RATIO_TOL * expect.abs().max(1.0) {
                    return Err(Error::Inconsistent(format!(
                        "ratio of {} and {} is {got}, expected {expect}",
                        i + 1,
                        j + 1
                    )));
                }
            }
        }
        out_blocks.push(block.clone());
        out_points.push(point);
    }
    OrderedPartition::new(out_blocks, out_points)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(u: f64, v: f64) -> Rp1Point {
        Rp1Point::new(u, v).unwrap()
    }

    #[test]
    fn pair_indices_are_lexicographic() {
        let all: Vec<_> = pairs(4).collect();
        for (k, &(i, j)) in all.iter().enumerate() {
            assert_eq!(pair_index(4, i, j), k);
        }
        assert_eq!(all.len(), 6);
    }

    #[test]
    fn psi_of_paths() {
        let l = psi_limit(&"1,1,t^-1".parse().unwrap());
        assert_eq!(l.components(), &[pt(1.0, 1.0), Rp1Point::first(), Rp1Point::first()]);

        let l = psi_limit(&MonomialDiagonal::constant(&[2.0, -1.0, 4.0]).unwrap());
        assert_eq!(l.components(), &[pt(2.0, -1.0), pt(2.0, 4.0), pt(-1.0, 4.0)]);

        let (x, y) = (3.0, -2.0);
        let p: MonomialDiagonal = format!("{x}*t,{y}*t,t^2,1").parse().unwrap();
        let l = psi_limit(&p);
        let s = Rp1Point::second();
        let f = Rp1Point::first();
        assert_eq!(l.components(), &[pt(x, y), s, f, s, f, f]);
    }

    #[test]
    fn decoding() {
        let l = LimitPoint::new(3, vec![pt(1.0, 1.0), Rp1Point::first(), Rp1Point::first()]).unwrap();
        let p = decode_partition(&l).unwrap();
        assert_eq!(p.blocks(), &[vec![0, 1], vec![2]]);
        assert_eq!(p.points(), &[vec![1.0, 1.0], vec![1.0]]);

        let s = Rp1Point::second();
        let l = LimitPoint::new(3, vec![s, s, s]).unwrap();
        let p = decode_partition(&l).unwrap();
        assert_eq!(p.blocks(), &[vec![2], vec![1], vec![0]]);
        assert_eq!(encode_partition(&p), l);

        let l = LimitPoint::new(3, vec![pt(2.0, 1.0), pt(2.0, -4.0), pt(1.0, -4.0)]).unwrap();
        let p = decode_partition(&l).unwrap();
        assert_eq!(p.blocks(), &[vec![0, 1, 2]]);
        assert_eq!(p.points(), &[vec![-0.5, -0.25, 1.0]]);
    }

    #[test]
    fn inconsistent_data_is_rejected() {
        let one = pt(1.0, 1.0);
        let l = LimitPoint::new(3, vec![one, Rp1Point::first(), one]).unwrap();
        assert!(matches!(decode_partition(&l), Err(Error::Inconsistent(_))));

        // a dominance cycle 1 > 2 > 3 > 1
        let (f, s) = (Rp1Point::first(), Rp1Point::second());
        let l = LimitPoint::new(3, vec![f, s, f]).unwrap();
        assert!(matches!(decode_partition(&l), Err(Error::Inconsistent(_))));

        // ratios that do not multiply
        let l = LimitPoint::new(3, vec![pt(1.0, 2.0), pt(1.0, 2.0), pt(1.0, 2.0)]).unwrap();
        assert!(matches!(decode_partition(&l), Err(Error::Inconsistent(_))));
    }

    #[test]
    fn encoding() {
        let p = OrderedPartition::new(vec![vec![0, 1, 2]], vec![vec![1.0, -2.0, 0.5]]).unwrap();
        let l = encode_partition(&p);
        assert_eq!(l.components(), &[pt(1.0, -2.0), pt(1.0, 0.5), pt(-2.0, 0.5)]);

        let p = OrderedPartition::new(vec![vec![2], vec![0, 1]], vec![vec![1.0], vec![1.0, 1.0]]).unwrap();
        let s = Rp1Point::second();
        assert_eq!(encode_partition(&p).components(), &[pt(1.0, 1.0), s, s]);

        let p = OrderedPartition::new(
            vec![vec![1], vec![0], vec![2]],
            vec![vec![1.0], vec![1.0], vec![1.0]],
        )
        .unwrap();
        let f = Rp1Point::first();
        assert_eq!(encode_partition(&p).components(), &[s, f, f]);
    }

    #[test]
    fn partitions_are_validated() {
        assert!(OrderedPartition::new(vec![vec![0], vec![0]], vec![vec![1.0], vec![1.0]]).is_err());
        assert!(OrderedPartition::new(vec![vec![0, 2]], vec![vec![1.0, 1.0]]).is_err());
        assert!(OrderedPartition::new(vec![vec![0, 1]], vec![vec![1.0, 0.0]]).is_err());
        let p = OrderedPartition::new(vec![vec![1, 0]], vec![vec![-4.0, 2.0]]).unwrap();
        assert_eq!(p.blocks(), &[vec![0, 1]]);
        assert_eq!(p.points(), &[vec![-0.5, 1.0]]);
    }
}
