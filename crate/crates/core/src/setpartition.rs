//! Set partitions of `{1, ..., n}`: construction from blocks or arcs, the
//! arc statistics (`d`, `dim`, `crs`, `nst`), regular/singular pairs, and
//! exhaustive enumeration in restricted-growth-string order.

use std::cmp::Ordering;
use std::fmt;
use std::sync::OnceLock;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// Validation failures when building a [`SetPartition`].
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PartitionError {
    #[error("ground set must be nonempty (n >= 1)")]
    EmptyGroundSet,
    #[error("block contains element {element} outside 1..={n}")]
    ElementOutOfRange { element: usize, n: usize },
    #[error("element {element} appears in more than one block")]
    DuplicateElement { element: usize },
    #[error("element {element} is not covered by any block")]
    MissingElement { element: usize },
    #[error("blocks must be nonempty")]
    EmptyBlock,
    #[error("arc ({i},{j}) is not increasing")]
    ArcNotIncreasing { i: usize, j: usize },
    #[error("index {index} is the left endpoint of two arcs")]
    LeftEndpointReused { index: usize },
    #[error("index {index} is the right endpoint of two arcs")]
    RightEndpointReused { index: usize },
}

/// How two distinct arcs relate to each other.
///
/// With arcs ordered so the first has the smaller left endpoint, every
/// unordered pair of distinct arcs falls in exactly one class: left
/// endpoints are distinct and right endpoints are distinct, so the only
/// possible shared vertex is the right end of one arc being the left end
/// of the other.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArcPairClass {
    /// `i < k < j < l`: the arcs interleave.
    Crossing,
    /// `i < k < l < j`: the second arc sits strictly inside the first.
    Nesting,
    /// `j == k`: the first arc ends where the second starts.
    Adjacent,
    /// `j < k`: the arcs occupy disjoint intervals.
    Separated,
}

/// Classify an unordered pair of distinct arcs.
pub fn classify_arc_pair(a: (usize, usize), b: (usize, usize)) -> ArcPairClass {
    let ((i, j), (k, l)) = if a.0 < b.0 { (a, b) } else { (b, a) };
    debug_assert!(i < j && k < l && i < k);
    if j == k {
        ArcPairClass::Adjacent
    } else if j < k {
        ArcPairClass::Separated
    } else if l < j {
        ArcPairClass::Nesting
    } else {
        debug_assert!(j != l, "distinct arcs cannot share a right endpoint");
        ArcPairClass::Crossing
    }
}

/// Arc-based statistics of a set partition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArcStatistics {
    /// Number of arcs; equals `n` minus the number of blocks.
    pub d: usize,
    /// Sum of arc lengths `j - i`.
    pub dim: usize,
    /// Unordered arc pairs with `i < k < j < l`.
    pub crs: usize,
    /// Unordered arc pairs with `i < k < l < j`.
    pub nst: usize,
    /// Unordered arc pairs sharing a middle vertex (`j == k`).
    pub adjacent: usize,
    /// Number of singular pairs, `2 (dim - d) - crs`.
    pub sing_count: usize,
}

/// A set partition of `{1, ..., n}` in canonical form: blocks ordered by
/// their smallest element, elements ascending within each block. The arc
/// set (consecutive pairs within blocks) is derived at construction and
/// determines the partition uniquely.
pub struct SetPartition {
    n: usize,
    blocks: Vec<Vec<usize>>,
    arcs: Vec<(usize, usize)>,
    stats: OnceLock<ArcStatistics>,
}

impl SetPartition {
    /// Build from explicit blocks, validating that they partition `1..=n`.
    pub fn from_blocks(n: usize, blocks: &[Vec<usize>]) -> Result<Self, PartitionError> {
        if n == 0 {
            return Err(PartitionError::EmptyGroundSet);
        }
        let mut seen = vec![false; n + 1];
        let mut canonical: Vec<Vec<usize>> = Vec::with_capacity(blocks.len());
        for block in blocks {
            if block.is_empty() {
                return Err(PartitionError::EmptyBlock);
            }
            let mut b = block.clone();
            b.sort_unstable();
            for &e in &b {
                if e == 0 || e > n {
                    return Err(PartitionError::ElementOutOfRange { element: e, n });
                }
                if seen[e] {
                    return Err(PartitionError::DuplicateElement { element: e });
                }
                seen[e] = true;
            }
            canonical.push(b);
        }
        if let Some(missing) = (1..=n).find(|&e| !seen[e]) {
            return Err(PartitionError::MissingElement { element: missing });
        }
        canonical.sort_unstable_by_key(|b| b[0]);
        Ok(Self::from_canonical_blocks(n, canonical))
    }

    /// Build from an arc set, chaining arcs into blocks. Each index may be
    /// the left endpoint of at most one arc and the right endpoint of at
    /// most one arc.
    #[allow(clippy::needless_range_loop)]
    pub fn from_arcs(n: usize, arcs: &[(usize, usize)]) -> Result<Self, PartitionError> {
        if n == 0 {
            return Err(PartitionError::EmptyGroundSet);
        }
        let mut next = vec![0usize; n + 1];
        let mut has_prev = vec![false; n + 1];
        for &(i, j) in arcs {
            if i >= j {
                return Err(PartitionError::ArcNotIncreasing { i, j });
            }
            if j > n {
                return Err(PartitionError::ElementOutOfRange { element: j, n });
            }
            if next[i] != 0 {
                return Err(PartitionError::LeftEndpointReused { index: i });
            }
            if has_prev[j] {
                return Err(PartitionError::RightEndpointReused { index: j });
            }
            next[i] = j;
            has_prev[j] = true;
        }
        let mut blocks = Vec::new();
        for start in 1..=n {
            if has_prev[start] {
                continue;
            }
            let mut block = vec![start];
            let mut cur = start;
            while next[cur] != 0 {
                cur = next[cur];
                block.push(cur);
            }
            blocks.push(block);
        }
        Ok(Self::from_canonical_blocks(n, blocks))
    }

    /// Blocks are assumed disjoint, covering, sorted by minimum, each sorted.
    pub(crate) fn from_canonical_blocks(n: usize, blocks: Vec<Vec<usize>>) -> Self {
        let mut arcs = Vec::with_capacity(n.saturating_sub(blocks.len()));
        for block in &blocks {
            for w in block.windows(2) {
                arcs.push((w[0], w[1]));
            }
        }
        arcs.sort_unstable();
        SetPartition {
            n,
            blocks,
            arcs,
            stats: OnceLock::new(),
        }
    }

    /// The partition of `1..=n` into singleton blocks.
    pub fn singletons(n: usize) -> Self {
        assert!(n >= 1);
        Self::from_canonical_blocks(n, (1..=n).map(|e| vec![e]).collect())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    /// The arc set `D`, sorted by left endpoint.
    pub fn arcs(&self) -> &[(usize, usize)] {
        &self.arcs
    }

    pub fn block_count(&self) -> usize {
        self.blocks.len()
    }

    /// Arc statistics, computed once by an `O(d^2)` scan over arc pairs.
    pub fn statistics(&self) -> &ArcStatistics {
        self.stats.get_or_init(|| {
            let d = self.arcs.len();
            let dim: usize = self.arcs.iter().map(|&(i, j)| j - i).sum();
            let mut crs = 0usize;
            let mut nst = 0usize;
            let mut adjacent = 0usize;
            for (idx, &a) in self.arcs.iter().enumerate() {
                for &b in &self.arcs[idx + 1..] {
                    match classify_arc_pair(a, b) {
                        ArcPairClass::Crossing => crs += 1,
                        ArcPairClass::Nesting => nst += 1,
                        ArcPairClass::Adjacent => adjacent += 1,
                        ArcPairClass::Separated => {}
                    }
                }
            }
            let sing_count = 2 * (dim - d) - crs;
            ArcStatistics {
                d,
                dim,
                crs,
                nst,
                adjacent,
                sing_count,
            }
        })
    }

    /// Is the pair `(i, j)` regular: no arc `(k, j)` with `k < i` and no
    /// arc `(i, l)` with `l > j`.
    pub fn is_regular(&self, i: usize, j: usize) -> bool {
        debug_assert!(i < j && j <= self.n);
        !self
            .arcs
            .iter()
            .any(|&(k, l)| (l == j && k < i) || (k == i && l > j))
    }

    /// All regular pairs `(i, j)`, `i < j <= n`, in lexicographic order.
    pub fn regular_pairs(&self) -> Vec<(usize, usize)> {
        self.pairs_by_regularity(true)
    }

    /// The singular pairs: the complement of the regular ones.
    pub fn singular_pairs(&self) -> Vec<(usize, usize)> {
        self.pairs_by_regularity(false)
    }

    #[allow(clippy::needless_range_loop)]
    fn pairs_by_regularity(&self, want_regular: bool) -> Vec<(usize, usize)> {
        // O(1) lookups: at most one arc ends at j, at most one starts at i.
        let mut ends_at = vec![0usize; self.n + 1];
        let mut starts_at = vec![0usize; self.n + 1];
        for &(i, j) in &self.arcs {
            ends_at[j] = i;
            starts_at[i] = j;
        }
        let mut out = Vec::new();
        for i in 1..=self.n {
            for j in i + 1..=self.n {
                let singular = (ends_at[j] != 0 && ends_at[j] < i) || starts_at[i] > j;
                if singular != want_regular {
                    out.push((i, j));
                }
            }
        }
        out
    }

    /// Total nesting weight of `sigma` inside `self`: for each arc `(k, l)`
    /// of `sigma`, count the arcs `(i, j)` of `self` with `i < k < l < j`.
    pub fn nst_weight(&self, sigma: &SetPartition) -> usize {
        assert!(
            sigma.n <= self.n,
            "nst weight requires sigma over a ground set no larger than self"
        );
        sigma
            .arcs
            .iter()
            .map(|&(k, l)| {
                self.arcs
                    .iter()
                    .filter(|&&(i, j)| i < k && l < j)
                    .count()
            })
            .sum()
    }

    /// Blocks rendered as `"1.5.7|2|3.4.9|6.8"`.
    pub fn block_string(&self) -> String {
        self.blocks
            .iter()
            .map(|b| {
                b.iter()
                    .map(|e| e.to_string())
                    .collect::<Vec<_>>()
                    .join(".")
            })
            .collect::<Vec<_>>()
            .join("|")
    }
}

impl Clone for SetPartition {
    fn clone(&self) -> Self {
        let stats = OnceLock::new();
        if let Some(s) = self.stats.get() {
            let _ = stats.set(*s);
        }
        SetPartition {
            n: self.n,
            blocks: self.blocks.clone(),
            arcs: self.arcs.clone(),
            stats,
        }
    }
}

impl PartialEq for SetPartition {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.blocks == other.blocks
    }
}

impl Eq for SetPartition {}

impl PartialOrd for SetPartition {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for SetPartition {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.n, &self.blocks).cmp(&(other.n, &other.blocks))
    }
}

impl std::hash::Hash for SetPartition {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.n.hash(state);
        self.blocks.hash(state);
    }
}

impl fmt::Debug for SetPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SetPartition({}; {})", self.n, self.block_string())
    }
}

impl fmt::Display for SetPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.block_string())
    }
}

#[derive(Serialize, Deserialize)]
struct PartitionWire {
    n: usize,
    blocks: Vec<Vec<usize>>,
}

impl Serialize for SetPartition {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        PartitionWire {
            n: self.n,
            blocks: self.blocks.clone(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for SetPartition {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let wire = PartitionWire::deserialize(deserializer)?;
        SetPartition::from_blocks(wire.n, &wire.blocks).map_err(D::Error::custom)
    }
}

/// Iterator over all set partitions of `1..=n` in restricted-growth-string
/// lexicographic order. Yields `Bell(n)` partitions.
pub struct PartitionIter {
    rgs: Vec<usize>,
    prefix_max: Vec<usize>,
    started: bool,
    done: bool,
}

impl PartitionIter {
    fn new(n: usize) -> Self {
        PartitionIter {
            rgs: vec![0; n],
            prefix_max: vec![0; n],
            started: false,
            done: n == 0,
        }
    }

    fn emit(&self) -> SetPartition {
        let n = self.rgs.len();
        let nblocks = self.rgs.iter().copied().max().unwrap_or(0) + 1;
        let mut blocks = vec![Vec::new(); nblocks];
        for (idx, &b) in self.rgs.iter().enumerate() {
            blocks[b].push(idx + 1);
        }
        SetPartition::from_canonical_blocks(n, blocks)
    }

    fn advance(&mut self) -> bool {
        let n = self.rgs.len();
        // prefix_max[i] = max(rgs[0..=i]); rgs[i] may grow up to prefix_max[i-1] + 1.
        for i in (1..n).rev() {
            if self.rgs[i] <= self.prefix_max[i - 1] {
                self.rgs[i] += 1;
                self.prefix_max[i] = self.prefix_max[i - 1].max(self.rgs[i]);
                for k in i + 1..n {
                    self.rgs[k] = 0;
                    self.prefix_max[k] = self.prefix_max[i];
                }
                return true;
            }
        }
        false
    }
}

impl Iterator for PartitionIter {
    type Item = SetPartition;

    fn next(&mut self) -> Option<SetPartition> {
        if self.done {
            return None;
        }
        if !self.started {
            self.started = true;
            return Some(self.emit());
        }
        if self.advance() {
            Some(self.emit())
        } else {
            self.done = true;
            None
        }
    }
}

/// Enumerate every set partition of `1..=n` exactly once. Practical for
/// `n <= 12` or so (`Bell(12)` is a little over 4.2 million).
pub fn enumerate_all(n: usize) -> PartitionIter {
    PartitionIter::new(n)
}

/// Bell number `B(n)` via the Bell-triangle recurrence.
pub fn bell(n: usize) -> u128 {
    assert!(n <= 25, "bell({n}) exceeds the u128 budget used here");
    let mut row = vec![1u128];
    for _ in 1..=n {
        let mut next = Vec::with_capacity(row.len() + 1);
        next.push(*row.last().unwrap());
        for &v in &row {
            let last = *next.last().unwrap();
            next.push(last + v);
        }
        row = next;
    }
    row[0]
}
