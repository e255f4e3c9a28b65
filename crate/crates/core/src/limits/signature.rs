use std::collections::{BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use super::partition::OrderedPartition;
use crate::error::{Error, Result};

/// Signatures `((p₀,q₀),(p₁,q₁),…)` of the blocks of a partial flag of
/// quadratic forms. The first block is kept as an ordered pair; the others
/// are only defined up to swapping and are stored with `p ≥ q`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FlagSignature {
    pub first: (usize, usize),
    pub rest: Vec<(usize, usize)>,
}

fn normalized((p, q): (usize, usize)) -> (usize, usize) {
    (p.max(q), p.min(q))
}

impl FlagSignature {
    pub fn new(first: (usize, usize), rest: Vec<(usize, usize)>) -> Self {
        Self {
            first,
            rest: rest.into_iter().map(normalized).collect(),
        }
    }

    /// The unflagged signature `((p, q))`.
    pub fn root(p: usize, q: usize) -> Self {
        Self::new((p, q), Vec::new())
    }

    pub fn dim(&self) -> usize {
        self.first.0 + self.first.1 + self.rest.iter().map(|(p, q)| p + q).sum::<usize>()
    }

    pub fn num_blocks(&self) -> usize {
        1 + self.rest.len()
    }

    fn block(&self, m: usize) -> (usize, usize) {
        if m == 0 {
            self.first
        } else {
            self.rest[m - 1]
        }
    }

    fn from_blocks(blocks: &[(usize, usize)]) -> Self {
        Self::new(blocks[0], blocks[1..].to_vec())
    }

    /// All signatures obtained by splitting one block into two consecutive
    /// blocks.
    pub fn refinements(&self) -> BTreeSet<FlagSignature> {
        let blocks: Vec<_> = (0..self.num_blocks()).map(|m| self.block(m)).collect();
        let mut out = BTreeSet::new();
        for (m, &(p, q)) in blocks.iter().enumerate() {
            for a in 0..=p {
                for b in 0..=q {
                    let (c, d) = (p - a, q - b);
                    if a + b == 0 || c + d == 0 {
                        continue;
                    }
                    let mut next = blocks[..m].to_vec();
                    next.push((a, b));
                    next.push((c, d));
                    next.extend_from_slice(&blocks[m + 1..]);
                    out.insert(Self::from_blocks(&next));
                }
            }
        }
        out
    }
}

impl fmt::Display for FlagSignature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(({},{})", self.first.0, self.first.1)?;
        for (p, q) in &self.rest {
            write!(f, ",({p},{q})")?;
        }
        write!(f, ")")
    }
}

/// Block signatures of a partition, counted from the signs of the block
/// points.
pub fn flag_signature(p: &OrderedPartition) -> FlagSignature {
    let counts: Vec<(usize, usize)> = p
        .points()
        .iter()
        .map(|pt| {
            let pos = pt.iter().filter(|&&x| x > 0.0).count();
            (pos, pt.len() - pos)
        })
        .collect();
    FlagSignature::from_blocks(&counts)
}

/// Isomorphism types of the limits of `O(3)` and `O(2,1)` in `GL(3; R)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum LimitGroup3 {
    #[serde(rename = "O(3)")]
    O3,
    #[serde(rename = "O(2,1)")]
    O21,
    /// The contragredient representation of the Euclidean group.
    #[serde(rename = "Euc(2)^-T")]
    EucInvT,
    #[serde(rename = "Mink^-T")]
    MinkInvT,
    #[serde(rename = "Euc(2)")]
    Euc,
    #[serde(rename = "Mink")]
    Mink,
    #[serde(rename = "Heis")]
    Heis,
}

impl LimitGroup3 {
    pub fn name(&self) -> &'static str {
        match self {
            LimitGroup3::O3 => "O(3)",
            LimitGroup3::O21 => "O(2,1)",
            LimitGroup3::EucInvT => "Euc(2)^-T",
            LimitGroup3::MinkInvT => "Mink^-T",
            LimitGroup3::Euc => "Euc(2)",
            LimitGroup3::Mink => "Mink",
            LimitGroup3::Heis => "Heis",
        }
    }
}

impl fmt::Display for LimitGroup3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

pub fn classify_limit_group_3d(f: &FlagSignature) -> Result<LimitGroup3> {
    use LimitGroup3::*;
    let unknown = || Error::UnknownSignature(f.to_string());
    if f.dim() != 3 {
        return Err(unknown());
    }
    let group = match (f.first, f.rest.as_slice()) {
        ((3, 0), []) => O3,
        ((2, 1), []) | ((1, 2), []) => O21,
        ((2, 0), [(1, 0)]) => EucInvT,
        ((1, 1), [(1, 0)]) => MinkInvT,
        ((1, 0), [(2, 0)]) => Euc,
        ((1, 0), [(1, 1)]) => Mink,
        ((1, 0), [(1, 0), (1, 0)]) => Heis,
        _ => return Err(unknown()),
    };
    Ok(group)
}

/// Whether the isometry group of a flag with signature `f` is a conjugacy
/// limit of `O(p, q)`: the first block must carry a positive direction, and
/// the later blocks, each possibly swapped, must partition the rest of the
/// signature.
pub fn is_limit_of(f: &FlagSignature, p: usize, q: usize) -> Result<bool> {
    if f.dim() != p + q {
        return Err(Error::DimensionMismatch(format!(
            "signature {f} has dimension {}, expected {}",
            f.dim(),
            p + q
        )));
    }
    let (p0, q0) = f.first;
    if p0 == 0 || p0 > p || q0 > q {
        return Ok(false);
    }
    // subset-sum over the swap choices
    let target = p - p0;
    let mut reachable = vec![false; target + 1];
    reachable[0] = true;
    for &(a, b) in &f.rest {
        let mut next = vec![false; target + 1];
        for s in 0..=target {
            if reachable[s] {
                for add in [a, b] {
                    if s + add <= target {
                        next[s + add] = true;
                    }
                }
            }
        }
        reachable = next;
    }
    Ok(reachable[target])
}

/// Flag signatures of total dimension `n` (every composition of `n` with
/// every block signature).
pub fn all_signatures(n: usize) -> Vec<FlagSignature> {
    fn compositions(n: usize) -> Vec<Vec<usize>> {
        if n == 0 {
            return vec![Vec::new()];
        }
        let mut out = Vec::new();
        for first in 1..=n {
            for mut rest in compositions(n - first) {
                rest.insert(0, first);
                out.push(rest);
            }
        }
        out
    }
    let mut out = BTreeSet::new();
    for comp in compositions(n) {
        let mut partial: Vec<Vec<(usize, usize)>> = (0..=comp[0]).map(|p| vec![(p, comp[0] - p)]).collect();
        for &size in &comp[1..] {
            partial = partial
                .into_iter()
                .flat_map(|prefix| {
                    (size.div_ceil(2)..=size).map(move |p| {
                        let mut v = prefix.clone();
                        v.push((p, size - p));
                        v
                    })
                })
                .collect();
        }
        out.extend(partial.iter().map(|b| FlagSignature::from_blocks(b)));
    }
    out.into_iter().collect()
}

/// The poset of conjugacy limits of `O(p, q)`, ordered by degeneration.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LimitPoset {
    pub nodes: Vec<FlagSignature>,
    /// Cover relations `(from, to)`, with `to` a degeneration of `from`.
    pub edges: Vec<(usize, usize)>,
}

impl LimitPoset {
    pub fn root(&self) -> usize {
        0
    }

    pub fn out_degree(&self, node: usize) -> usize {
        self.edges.iter().filter(|e| e.0 == node).count()
    }

    pub fn in_degree(&self, node: usize) -> usize {
        self.edges.iter().filter(|e| e.1 == node).count()
    }

    pub fn to_dot(&self, name: &str) -> String {
        let mut s = format!("digraph \"{name}\" {{\n  rankdir=TB;\n");
        for (k, node) in self.nodes.iter().enumerate() {
            s.push_str(&format!("  n{k} [label=\"{node}\"];\n"));
        }
        for (a, b) in &self.edges {
            s.push_str(&format!("  n{a} -> n{b};\n"));
        }
        s.push_str("}\n");
        s
    }
}

pub fn limit_poset(p: usize, q: usize) -> LimitPoset {
    let root = FlagSignature::root(p, q);
    let mut nodes = vec![root.clone()];
    nodes.extend(
        all_signatures(p + q)
            .into_iter()
            .filter(|f| *f != root && is_limit_of(f, p, q).unwrap_or(false)),
    );
    let index: HashMap<&FlagSignature, usize> = nodes.iter().enumerate().map(|(k, f)| (f, k)).collect();
    let mut adj: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); nodes.len()];
    for (k, f) in nodes.iter().enumerate() {
        for g in f.refinements() {
            if let Some(&j) = index.get(&g) {
                adj[k].insert(j);
            }
        }
    }
    let edges = transitive_reduction(&adj);
    LimitPoset { nodes, edges }
}

/// Removes every edge `a → c` for which a longer path `a → … → c` exists.
fn transitive_reduction(adj: &[BTreeSet<usize>]) -> Vec<(usize, usize)> {
    let n = adj.len();
    let reach_from = |start: usize, skip: usize| {
        let mut seen = vec![false; n];
        let mut stack: Vec<usize> = adj[start].iter().copied().filter(|&v| v != skip).collect();
        while let Some(v) = stack.pop() {
            if !seen[v] {
                seen[v] = true;
                stack.extend(adj[v].iter().copied());
            }
        }
        seen
    };
    let mut edges = Vec::new();
    for (a, targets) in adj.iter().enumerate() {
        for &c in targets {
            if !reach_from(a, c)[c] {
                edges.push((a, c));
            }
        }
    }
    edges
}
