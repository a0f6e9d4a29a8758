//! Direct products of symmetric, alternating and trivial groups acting on
//! disjoint coordinate blocks.
//!
//! The fixed space of such a group is spanned by the block indicator vectors.
//! Points of the projected integer lattice are named by their integer block
//! sums ([`FiberIndex`]), so the lattice is simply `Z^d`.

use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arith::{ArithError, RatVector, Rational};

/// Default bound on the number of points an orbit computation may visit.
pub const DEFAULT_ORBIT_CAP: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GroupError {
    #[error("coordinate {coord} is out of range for dimension {n}")]
    OutOfRange { coord: usize, n: usize },
    #[error("coordinate {0} appears in more than one block")]
    Overlap(usize),
    #[error("coordinate {0} is not covered by any block")]
    Uncovered(usize),
    #[error("block {0} is empty")]
    EmptyBlock(usize),
    #[error("generator {index} is not a permutation of 0..{n}")]
    BadGenerator { index: usize, n: usize },
    #[error("orbit exceeds the cap of {cap} points")]
    OrbitCap { cap: usize },
    #[error("objective is not constant on block {block}")]
    NotBlockwiseConstant { block: usize },
    #[error(transparent)]
    Arith(#[from] ArithError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BlockKind {
    #[serde(rename = "S")]
    Sym,
    #[serde(rename = "A")]
    Alt,
    #[serde(rename = "Id")]
    Id,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Block {
    pub kind: BlockKind,
    pub coords: Vec<usize>,
}

impl Block {
    pub fn size(&self) -> usize {
        self.coords.len()
    }
}

/// Serialized form of a group: the `group` object of an instance file.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct GroupSpec {
    pub blocks: Vec<Block>,
    #[serde(default)]
    pub extra_generators: Vec<Vec<usize>>,
}

/// A permutation of `0..n` in one-line notation: `i` maps to `self[i]`.
///
/// Acting on a vector moves the entry at position `i` to position `self[i]`.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Permutation(Vec<usize>);

impl Permutation {
    pub fn new(images: Vec<usize>) -> Option<Self> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &i in &images {
            if i >= n || std::mem::replace(&mut seen[i], true) {
                return None;
            }
        }
        Some(Permutation(images))
    }

    pub fn identity(n: usize) -> Self {
        Permutation((0..n).collect())
    }

    /// The cycle `c[0] -> c[1] -> ... -> c[last] -> c[0]` on `0..n`.
    pub fn cycle(n: usize, c: &[usize]) -> Self {
        let mut p: Vec<usize> = (0..n).collect();
        for (i, &from) in c.iter().enumerate() {
            p[from] = c[(i + 1) % c.len()];
        }
        Permutation(p)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn images(&self) -> &[usize] {
        &self.0
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &p)| i == p)
    }

    pub fn apply<T: Clone>(&self, v: &[T]) -> Vec<T> {
        let mut out = v.to_vec();
        for (i, x) in v.iter().enumerate() {
            out[self.0[i]] = x.clone();
        }
        out
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

/// Integer block sums naming one fiber of the projection onto the fixed space.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FiberIndex(pub Vec<i64>);

impl FiberIndex {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// A normalized block-product group on `0..n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockGroup {
    n: usize,
    blocks: Vec<Block>,
    block_of: Vec<usize>,
    extra_generators: Vec<Permutation>,
}

/// Validates `spec` and normalizes it: alternating blocks of size at most 2,
/// symmetric blocks of size 1 and multi-coordinate `Id` blocks all become
/// singleton `Id` blocks.
///
/// With `n = None` the dimension is the number of listed coordinates.
pub fn parse_group(spec: &GroupSpec, n: Option<usize>) -> Result<BlockGroup, GroupError> {
    let n = n.unwrap_or_else(|| spec.blocks.iter().map(Block::size).sum());
    let mut blocks = Vec::with_capacity(spec.blocks.len());
    let mut block_of = vec![usize::MAX; n];
    for (bi, block) in spec.blocks.iter().enumerate() {
        if block.coords.is_empty() {
            return Err(GroupError::EmptyBlock(bi));
        }
        for &c in &block.coords {
            if c >= n {
                return Err(GroupError::OutOfRange { coord: c, n });
            }
            if block_of[c] != usize::MAX {
                return Err(GroupError::Overlap(c));
            }
            block_of[c] = 0;
        }
        let trivial = match block.kind {
            BlockKind::Id => true,
            BlockKind::Sym => block.size() == 1,
            BlockKind::Alt => block.size() <= 2,
        };
        if trivial {
            blocks.extend(block.coords.iter().map(|&c| Block { kind: BlockKind::Id, coords: vec![c] }));
        } else {
            blocks.push(block.clone());
        }
    }
    if let Some(c) = block_of.iter().position(|&b| b == usize::MAX) {
        return Err(GroupError::Uncovered(c));
    }
    for (bi, block) in blocks.iter().enumerate() {
        for &c in &block.coords {
            block_of[c] = bi;
        }
    }
    let extra_generators = spec
        .extra_generators
        .iter()
        .enumerate()
        .map(|(index, g)| {
            if g.len() != n {
                return Err(GroupError::BadGenerator { index, n });
            }
            Permutation::new(g.clone()).ok_or(GroupError::BadGenerator { index, n })
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(BlockGroup { n, blocks, block_of, extra_generators })
}

impl BlockGroup {
    /// The product of symmetric groups on consecutive blocks of the given sizes.
    pub fn symmetric_blocks(sizes: &[usize]) -> Self {
        let mut next = 0;
        let blocks = sizes
            .iter()
            .map(|&k| {
                let coords: Vec<usize> = (next..next + k).collect();
                next += k;
                Block { kind: BlockKind::Sym, coords }
            })
            .collect();
        parse_group(&GroupSpec { blocks, extra_generators: vec![] }, None).expect("consecutive blocks partition 0..n")
    }

    pub fn trivial(n: usize) -> Self {
        Self::symmetric_blocks(&vec![1; n])
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of blocks, i.e. the dimension of the fixed space.
    pub fn d(&self) -> usize {
        self.blocks.len()
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    pub fn block_sizes(&self) -> Vec<usize> {
        self.blocks.iter().map(Block::size).collect()
    }

    pub fn block_of(&self, coord: usize) -> usize {
        self.block_of[coord]
    }

    pub fn extra_generators(&self) -> &[Permutation] {
        &self.extra_generators
    }

    pub fn to_spec(&self) -> GroupSpec {
        GroupSpec {
            blocks: self.blocks.clone(),
            extra_generators: self.extra_generators.iter().map(|p| p.images().to_vec()).collect(),
        }
    }

    /// Generators of the block product: a transposition and a full cycle per
    /// symmetric block, the 3-cycles `(c0 c1 ci)` per alternating block.
    pub fn generators(&self) -> Vec<Permutation> {
        let mut gens = Vec::new();
        for block in &self.blocks {
            gens.extend(block_generators(self.n, block));
        }
        gens
    }

    /// Block generators followed by the extra generators.
    pub fn oracle_generators(&self) -> Vec<Permutation> {
        let mut gens = self.generators();
        gens.extend(self.extra_generators.iter().cloned());
        gens
    }

    fn check_len(&self, len: usize) -> Result<(), GroupError> {
        if len == self.n {
            Ok(())
        } else {
            Err(ArithError::LengthMismatch { expected: self.n, found: len }.into())
        }
    }

    /// Orthogonal projection onto the fixed space: every block is replaced by
    /// its average. Also returns the block sums.
    pub fn project_to_fixed(&self, x: &RatVector) -> Result<(RatVector, Vec<Rational>), GroupError> {
        self.check_len(x.len())?;
        let sums: Vec<Rational> =
            self.blocks.iter().map(|b| b.coords.iter().map(|&c| &x[c]).sum()).collect();
        let mut fixed = vec![Rational::zero(); self.n];
        for (block, sum) in self.blocks.iter().zip(&sums) {
            let avg = sum / &Rational::from_integer(block.size() as i64);
            for &c in &block.coords {
                fixed[c] = avg.clone();
            }
        }
        Ok((RatVector::from(fixed), sums))
    }

    /// Integer block sums of an integer point.
    pub fn block_sums(&self, z: &[i64]) -> FiberIndex {
        FiberIndex(self.blocks.iter().map(|b| b.coords.iter().map(|&c| z[c]).sum()).collect())
    }

    /// The common coefficient of `c` on each block.
    pub fn block_coefficients(&self, c: &RatVector) -> Result<Vec<Rational>, GroupError> {
        self.check_len(c.len())?;
        self.blocks
            .iter()
            .enumerate()
            .map(|(bi, b)| {
                let first = &c[b.coords[0]];
                if b.coords.iter().all(|&j| &c[j] == first) {
                    Ok(first.clone())
                } else {
                    Err(GroupError::NotBlockwiseConstant { block: bi })
                }
            })
            .collect()
    }

    /// Objective value shared by every point of the fiber `s`.
    pub fn fiber_objective(&self, c: &RatVector, s: &FiberIndex) -> Result<Rational, GroupError> {
        let coeffs = self.block_coefficients(c)?;
        if s.len() != coeffs.len() {
            return Err(ArithError::LengthMismatch { expected: coeffs.len(), found: s.len() }.into());
        }
        Ok(coeffs.iter().zip(&s.0).map(|(ci, &si)| ci * &Rational::from_integer(si)).sum())
    }

    /// Block-local orbit of `values` (indexed like `block.coords`) under block
    /// `bi` of this group.
    pub fn block_orbit<T: Clone + Ord + std::hash::Hash>(&self, bi: usize, values: &[T]) -> Vec<Vec<T>> {
        let block = &self.blocks[bi];
        match block.kind {
            BlockKind::Id => vec![values.to_vec()],
            BlockKind::Sym => distinct_permutations(values),
            BlockKind::Alt => {
                let has_repeat = values.iter().collect::<HashSet<_>>().len() < values.len();
                let all = distinct_permutations(values);
                if has_repeat {
                    all
                } else {
                    let parity = inversion_parity(values);
                    all.into_iter().filter(|p| inversion_parity(p) == parity).collect()
                }
            }
        }
    }
}

fn block_generators(n: usize, block: &Block) -> Vec<Permutation> {
    let c = &block.coords;
    match block.kind {
        BlockKind::Id => vec![],
        BlockKind::Sym if c.len() == 2 => vec![Permutation::cycle(n, c)],
        BlockKind::Sym => vec![Permutation::cycle(n, &c[..2]), Permutation::cycle(n, c)],
        BlockKind::Alt => (2..c.len()).map(|i| Permutation::cycle(n, &[c[0], c[1], c[i]])).collect(),
    }
}

/// All distinct rearrangements of `values`, in lexicographic order.
pub fn distinct_permutations<T: Clone + Ord>(values: &[T]) -> Vec<Vec<T>> {
    let mut cur = values.to_vec();
    cur.sort();
    let mut out = vec![cur.clone()];
    while next_permutation(&mut cur) {
        out.push(cur.clone());
    }
    out
}

fn next_permutation<T: Ord>(v: &mut [T]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let mut i = v.len() - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = v.len() - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

fn inversion_parity<T: Ord>(v: &[T]) -> bool {
    let mut odd = false;
    for i in 0..v.len() {
        for j in i + 1..v.len() {
            if v[i] > v[j] {
                odd = !odd;
            }
        }
    }
    odd
}

/// Breadth-first closure of `{z}` under `generators`, in discovery order.
pub fn orbit_of_vector(generators: &[Permutation], z: &[i64], cap: usize) -> Result<Vec<Vec<i64>>, GroupError> {
    for (index, g) in generators.iter().enumerate() {
        if g.len() != z.len() {
            return Err(GroupError::BadGenerator { index, n: z.len() });
        }
    }
    let mut seen: HashSet<Vec<i64>> = HashSet::new();
    seen.insert(z.to_vec());
    let mut orbit = vec![z.to_vec()];
    let mut head = 0;
    while head < orbit.len() {
        let current = orbit[head].clone();
        head += 1;
        for g in generators {
            let image = g.apply(&current);
            if !seen.contains(&image) {
                if orbit.len() >= cap {
                    return Err(GroupError::OrbitCap { cap });
                }
                seen.insert(image.clone());
                orbit.push(image);
            }
        }
    }
    Ok(orbit)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn spec(blocks: &[(BlockKind, &[usize])]) -> GroupSpec {
        GroupSpec {
            blocks: blocks.iter().map(|(k, c)| Block { kind: *k, coords: c.to_vec() }).collect(),
            extra_generators: vec![],
        }
    }

    fn ints(v: &[i64]) -> RatVector {
        RatVector::from_ints(v)
    }

    #[test]
    fn parse_examples() {
        let g = parse_group(&spec(&[(BlockKind::Sym, &[0, 1, 2, 3, 4]), (BlockKind::Sym, &[5, 6, 7, 8, 9])]), None)
            .unwrap();
        assert_eq!((g.d(), g.n()), (2, 10));

        let g = parse_group(&spec(&[(BlockKind::Alt, &[0, 1])]), None).unwrap();
        assert_eq!(g.d(), 2);
        assert!(g.blocks().iter().all(|b| b.kind == BlockKind::Id && b.size() == 1));

        assert_eq!(
            parse_group(&spec(&[(BlockKind::Sym, &[0, 1]), (BlockKind::Sym, &[0, 2])]), None),
            Err(GroupError::Overlap(0))
        );
        assert_eq!(
            parse_group(&spec(&[(BlockKind::Sym, &[0, 3])]), Some(3)),
            Err(GroupError::OutOfRange { coord: 3, n: 3 })
        );
        assert_eq!(parse_group(&spec(&[(BlockKind::Sym, &[0, 2])]), Some(3)), Err(GroupError::Uncovered(1)));
        let mut bad = spec(&[(BlockKind::Id, &[0]), (BlockKind::Id, &[1])]);
        bad.extra_generators = vec![vec![0, 0]];
        assert!(matches!(parse_group(&bad, None), Err(GroupError::BadGenerator { .. })));
    }

    #[test]
    fn projection_examples() {
        let g = BlockGroup::symmetric_blocks(&[2, 2]);
        let (fixed, s) = g.project_to_fixed(&ints(&[1, 3, 2, 2])).unwrap();
        assert_eq!(fixed, ints(&[2, 2, 2, 2]));
        assert_eq!(s, vec![Rational::from(4), Rational::from(4)]);

        let (fixed, s) = g.project_to_fixed(&ints(&[0, 0, 0, 0])).unwrap();
        assert!(fixed.is_zero() && s.iter().all(Rational::is_zero));

        let g = BlockGroup::symmetric_blocks(&[3, 1]);
        let (fixed, s) = g.project_to_fixed(&ints(&[1, 0, 0, 5])).unwrap();
        let third = Rational::new(1, 3).unwrap();
        assert_eq!(fixed, RatVector::from(vec![third.clone(), third.clone(), third, Rational::from(5)]));
        assert_eq!(s, vec![Rational::from(1), Rational::from(5)]);
        assert!(g.project_to_fixed(&ints(&[1, 2])).is_err());
    }

    #[test]
    fn orbit_examples() {
        let s3 = BlockGroup::symmetric_blocks(&[3]).generators();
        let mut orbit = orbit_of_vector(&s3, &[1, 0, 0], DEFAULT_ORBIT_CAP).unwrap();
        orbit.sort();
        assert_eq!(orbit, vec![vec![0, 0, 1], vec![0, 1, 0], vec![1, 0, 0]]);

        assert_eq!(orbit_of_vector(&[], &[4, 5], DEFAULT_ORBIT_CAP).unwrap(), vec![vec![4, 5]]);

        let c4 = Permutation::new(vec![3, 0, 1, 2]).unwrap();
        let orbit = orbit_of_vector(&[c4], &[1, 7, 0, -7], DEFAULT_ORBIT_CAP).unwrap();
        assert_eq!(orbit.len(), 4);
        for shift in 0..4 {
            let rotated: Vec<i64> = (0..4).map(|i| [1, 7, 0, -7][(i + shift) % 4]).collect();
            assert!(orbit.contains(&rotated));
        }

        let s5 = BlockGroup::symmetric_blocks(&[5]).generators();
        assert_eq!(orbit_of_vector(&s5, &[0, 1, 2, 3, 4], 10), Err(GroupError::OrbitCap { cap: 10 }));
    }

    #[test]
    fn fiber_objective_examples() {
        let g = BlockGroup::symmetric_blocks(&[2]);
        assert_eq!(g.fiber_objective(&ints(&[1, 1]), &FiberIndex(vec![3])).unwrap(), Rational::from(3));
        let g = BlockGroup::symmetric_blocks(&[3, 1]);
        assert_eq!(g.fiber_objective(&ints(&[2, 2, 2, 5]), &FiberIndex(vec![4, 1])).unwrap(), Rational::from(13));
        assert!(g.fiber_objective(&ints(&[0, 0, 0, 0]), &FiberIndex(vec![7, -2])).unwrap().is_zero());
        assert_eq!(
            g.fiber_objective(&ints(&[1, 2, 2, 5]), &FiberIndex(vec![4, 1])),
            Err(GroupError::NotBlockwiseConstant { block: 0 })
        );
    }

    #[test]
    fn generators_generate_full_blocks() {
        let g = parse_group(
            &spec(&[(BlockKind::Sym, &[0, 2, 4, 6]), (BlockKind::Alt, &[1, 3, 5]), (BlockKind::Id, &[7])]),
            None,
        )
        .unwrap();
        // |S4| * |A3| distinct images of a vector with distinct entries.
        let orbit = orbit_of_vector(&g.generators(), &[0, 1, 2, 3, 4, 5, 6, 7], DEFAULT_ORBIT_CAP).unwrap();
        assert_eq!(orbit.len(), 24 * 3);
        assert_eq!(g.block_orbit(1, &[1, 3, 5]).len(), 3);
        assert_eq!(g.block_orbit(1, &[1, 1, 5]).len(), 3);
        assert_eq!(g.block_orbit(0, &[0, 0, 1, 1]).len(), 6);
    }

    fn group_and_point() -> impl Strategy<Value = (Vec<usize>, Vec<i64>)> {
        prop::collection::vec(1usize..4, 1..4).prop_flat_map(|sizes| {
            let n: usize = sizes.iter().sum();
            (Just(sizes), prop::collection::vec(-9i64..10, n))
        })
    }

    proptest! {
        #[test]
        fn projection_is_idempotent((sizes, x) in group_and_point()) {
            let g = BlockGroup::symmetric_blocks(&sizes);
            let (fixed, _) = g.project_to_fixed(&ints(&x)).unwrap();
            let (again, _) = g.project_to_fixed(&fixed).unwrap();
            prop_assert_eq!(fixed, again);
        }

        #[test]
        fn projected_lattice_is_scaled_zd((sizes, x) in group_and_point()) {
            let g = BlockGroup::symmetric_blocks(&sizes);
            let (fixed, s) = g.project_to_fixed(&ints(&x)).unwrap();
            let norm = fixed.dot(&fixed).unwrap();
            let expected: Rational = s.iter().zip(&sizes)
                .map(|(si, &k)| si * si / Rational::from(k as i64))
                .sum();
            prop_assert_eq!(norm, expected);
        }

        #[test]
        fn projection_is_orbit_invariant((sizes, x) in group_and_point(), pick in 0usize..64) {
            let g = BlockGroup::symmetric_blocks(&sizes);
            let orbit = orbit_of_vector(&g.generators(), &x, DEFAULT_ORBIT_CAP).unwrap();
            let y = &orbit[pick % orbit.len()];
            prop_assert_eq!(
                g.project_to_fixed(&ints(&x)).unwrap(),
                g.project_to_fixed(&ints(y)).unwrap()
            );
        }
    }
}
