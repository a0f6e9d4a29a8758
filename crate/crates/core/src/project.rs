//! The projected polyhedron in block-sum coordinates and enumeration of its
//! integer points.
//!
//! For a symmetric polyhedron `P`, the projection onto the fixed space equals
//! `P` intersected with the fixed space. Substituting the block average
//! `s_i / k_i` for every coordinate of block `i` turns a row `<a, x> <= b` into
//! `sum_i avg_i(a) * s_i <= b`, where `s` ranges over `Z^d`.

use thiserror::Error;

use crate::arith::{RatVector, Rational, Row};
use crate::group::FiberIndex;
use crate::lp::{lp_solve, Direction, LpError, LpResult};
use crate::model::{dedup_rows, validate_symmetry, Instance};

/// Default bound on the number of enumerated fibers.
pub const DEFAULT_FIBER_CAP: usize = 10_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProjectError {
    #[error("instance is not symmetric under its group ({violations} violations)")]
    NotSymmetric { violations: usize },
    #[error("projected polyhedron is unbounded")]
    Unbounded,
    #[error("more than {cap} fibers")]
    FiberCap { cap: usize },
    #[error(transparent)]
    Lp(#[from] LpError),
}

/// `{ s in R^d : sum_i a_i s_i <= b for every row }`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProjectedPolyhedron {
    pub d: usize,
    pub rows: Vec<Row>,
}

pub fn project_polyhedron(inst: &Instance) -> Result<ProjectedPolyhedron, ProjectError> {
    let report = validate_symmetry(inst);
    if !report.is_symmetric {
        return Err(ProjectError::NotSymmetric { violations: report.witnesses.len() });
    }
    Ok(project_rows_unchecked(inst))
}

/// Block-averages every row without checking symmetry first.
pub(crate) fn project_rows_unchecked(inst: &Instance) -> ProjectedPolyhedron {
    let group = inst.group();
    let sizes: Vec<Rational> = group.blocks().iter().map(|b| Rational::from(b.size() as i64)).collect();
    let rows = inst
        .rows()
        .iter()
        .map(|row| {
            let a: RatVector = group
                .blocks()
                .iter()
                .zip(&sizes)
                .map(|(block, k)| block.coords.iter().map(|&c| &row.a[c]).sum::<Rational>() / k)
                .collect();
            Row::new(a, row.b.clone())
        })
        .collect();
    ProjectedPolyhedron { d: group.d(), rows: dedup_rows(rows) }
}

impl ProjectedPolyhedron {
    /// Rows restricted to the coordinates after `prefix`, with the prefix
    /// values moved to the right-hand side.
    fn restrict(&self, prefix: &[i64]) -> Vec<Row> {
        let j = prefix.len();
        self.rows
            .iter()
            .map(|row| {
                let fixed: Rational =
                    row.a.as_slice()[..j].iter().zip(prefix).map(|(a, &s)| a * &Rational::from_integer(s)).sum();
                Row::new(RatVector::from(row.a.as_slice()[j..].to_vec()), &row.b - &fixed)
            })
            .collect()
    }

    pub fn contains(&self, s: &FiberIndex) -> bool {
        self.rows.iter().all(|r| r.is_satisfied_by_int(&s.0).expect("fiber has dimension d"))
    }

    /// Integer range of the next coordinate given `prefix`, or `None` when
    /// the restricted polyhedron is empty.
    fn next_range(&self, prefix: &[i64], lp_calls: &mut usize) -> Result<Option<(i64, i64)>, ProjectError> {
        let rows = self.restrict(prefix);
        let width = self.d - prefix.len();
        if width == 1 {
            return Ok(interval(&rows));
        }
        let mut objective = vec![Rational::zero(); width];
        objective[0] = Rational::one();
        let objective = RatVector::from(objective);
        *lp_calls += 1;
        let lo = match lp_solve(&rows, &objective, Direction::Minimize)? {
            LpResult::Optimal { value, .. } => value.ceil(),
            LpResult::Infeasible => return Ok(None),
            LpResult::Unbounded { .. } => return Err(ProjectError::Unbounded),
        };
        *lp_calls += 1;
        let hi = match lp_solve(&rows, &objective, Direction::Maximize)? {
            LpResult::Optimal { value, .. } => value.floor(),
            LpResult::Infeasible => return Ok(None),
            LpResult::Unbounded { .. } => return Err(ProjectError::Unbounded),
        };
        Ok(Some((to_i64(&lo), to_i64(&hi))))
    }
}

fn to_i64(v: &Rational) -> i64 {
    v.to_i64().expect("fiber coordinates fit into i64")
}

/// Integer points of the one-dimensional polyhedron `{ s : a s <= b }`.
fn interval(rows: &[Row]) -> Option<(i64, i64)> {
    let mut lo: Option<Rational> = None;
    let mut hi: Option<Rational> = None;
    for row in rows {
        let a = &row.a[0];
        if a.is_zero() {
            if row.b.is_negative() {
                return None;
            }
        } else if a.is_positive() {
            let bound = &row.b / a;
            if hi.as_ref().is_none_or(|h| bound < *h) {
                hi = Some(bound);
            }
        } else {
            let bound = &row.b / a;
            if lo.as_ref().is_none_or(|l| bound > *l) {
                lo = Some(bound);
            }
        }
    }
    // Boundedness was established before enumeration started.
    let lo = to_i64(&lo.expect("bounded below").ceil());
    let hi = to_i64(&hi.expect("bounded above").floor());
    Some((lo, hi))
}

/// Depth-first, lexicographically ordered stream of the integer points of a
/// bounded projected polyhedron.
pub struct FiberStream<'a> {
    proj: &'a ProjectedPolyhedron,
    prefix: Vec<i64>,
    /// Remaining upper bound of each fixed prefix coordinate.
    upper: Vec<i64>,
    started: bool,
    empty: bool,
    lp_calls: usize,
    error: Option<ProjectError>,
}

impl<'a> FiberStream<'a> {
    /// Checks boundedness by minimizing and maximizing every coordinate.
    pub fn new(proj: &'a ProjectedPolyhedron) -> Result<Self, ProjectError> {
        let mut lp_calls = 0;
        let mut empty = false;
        for j in 0..proj.d {
            let mut objective = vec![Rational::zero(); proj.d];
            objective[j] = Rational::one();
            let objective = RatVector::from(objective);
            for dir in [Direction::Minimize, Direction::Maximize] {
                lp_calls += 1;
                match lp_solve(&proj.rows, &objective, dir)? {
                    LpResult::Optimal { .. } => {}
                    LpResult::Infeasible => empty = true,
                    LpResult::Unbounded { .. } => return Err(ProjectError::Unbounded),
                }
                if empty {
                    break;
                }
            }
            if empty {
                break;
            }
        }
        if proj.d == 0 {
            empty = proj.rows.iter().any(|r| r.b.is_negative());
        }
        Ok(FiberStream { proj, prefix: vec![], upper: vec![], started: false, empty, lp_calls, error: None })
    }

    /// Number of LP solves spent on bounds so far.
    pub fn lp_calls(&self) -> usize {
        self.lp_calls
    }

    /// Error that ended the stream early, if any.
    pub fn take_error(&mut self) -> Option<ProjectError> {
        self.error.take()
    }

    /// Extends the prefix with the lowest feasible values down to a leaf.
    /// Returns false when the subtree below the current prefix is empty.
    fn descend(&mut self) -> Result<bool, ProjectError> {
        while self.prefix.len() < self.proj.d {
            match self.proj.next_range(&self.prefix, &mut self.lp_calls)? {
                Some((lo, hi)) if lo <= hi => {
                    self.prefix.push(lo);
                    self.upper.push(hi);
                }
                _ => return Ok(false),
            }
        }
        Ok(true)
    }

    /// Moves to the next sibling of the deepest coordinate that has one.
    fn advance(&mut self) -> bool {
        while let Some(last) = self.prefix.last_mut() {
            if *last < *self.upper.last().expect("parallel stacks") {
                *last += 1;
                return true;
            }
            self.prefix.pop();
            self.upper.pop();
        }
        false
    }

    fn step(&mut self) -> Result<Option<FiberIndex>, ProjectError> {
        if self.empty {
            return Ok(None);
        }
        if !self.started {
            self.started = true;
            if self.proj.d == 0 {
                self.empty = true;
                return Ok(Some(FiberIndex(vec![])));
            }
            if self.descend()? {
                return Ok(Some(FiberIndex(self.prefix.clone())));
            }
        }
        loop {
            if !self.advance() {
                self.empty = true;
                return Ok(None);
            }
            if self.descend()? {
                return Ok(Some(FiberIndex(self.prefix.clone())));
            }
        }
    }
}

impl Iterator for FiberStream<'_> {
    type Item = FiberIndex;

    fn next(&mut self) -> Option<FiberIndex> {
        match self.step() {
            Ok(item) => item,
            Err(e) => {
                self.error = Some(e);
                self.empty = true;
                None
            }
        }
    }
}

/// Summary of a complete enumeration.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Enumeration {
    pub fibers: Vec<FiberIndex>,
    pub lp_calls: usize,
}

/// All integer points of `proj` in lexicographic order.
pub fn enumerate_lattice_points(proj: &ProjectedPolyhedron, cap: usize) -> Result<Enumeration, ProjectError> {
    let mut stream = FiberStream::new(proj)?;
    let mut fibers = Vec::new();
    for s in stream.by_ref() {
        if fibers.len() >= cap {
            return Err(ProjectError::FiberCap { cap });
        }
        fibers.push(s);
    }
    if let Some(e) = stream.take_error() {
        return Err(e);
    }
    Ok(Enumeration { fibers, lp_calls: stream.lp_calls() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::BlockGroup;
    use proptest::prelude::*;

    fn r(p: i64, q: i64) -> Rational {
        Rational::new(p, q).unwrap()
    }

    fn running() -> Instance {
        Instance::new(
            2,
            vec![Row::from_ints(&[-1, -1], -3), Row::from_ints(&[1, 2], 5), Row::from_ints(&[2, 1], 5)],
            RatVector::from_ints(&[1, 1]),
            BlockGroup::symmetric_blocks(&[2]),
        )
        .unwrap()
    }

    fn fibers(proj: &ProjectedPolyhedron) -> Vec<Vec<i64>> {
        enumerate_lattice_points(proj, DEFAULT_FIBER_CAP).unwrap().fibers.into_iter().map(|f| f.0).collect()
    }

    #[test]
    fn running_example_projection() {
        let proj = project_polyhedron(&running()).unwrap();
        assert_eq!(proj.d, 1);
        assert_eq!(
            proj.rows,
            vec![Row::new(RatVector::from(vec![r(-1, 1)]), r(-3, 1)), Row::new(RatVector::from(vec![r(3, 2)]), r(5, 1))]
        );
        assert_eq!(fibers(&proj), vec![vec![3]]);
    }

    #[test]
    fn projection_special_cases() {
        let g = BlockGroup::symmetric_blocks(&[2, 3]);
        let inst = Instance::new(5, vec![Row::from_ints(&[4, 4, -1, -1, -1], 9)], RatVector::zeros(5), g).unwrap();
        assert_eq!(project_polyhedron(&inst).unwrap().rows, vec![Row::from_ints(&[4, -1], 9)]);

        let rows = vec![Row::from_ints(&[1, 2, 3], 4), Row::from_ints(&[-1, 0, 5], 0)];
        let inst = Instance::new(3, rows.clone(), RatVector::zeros(3), BlockGroup::trivial(3)).unwrap();
        assert_eq!(project_polyhedron(&inst).unwrap(), ProjectedPolyhedron { d: 3, rows });

        let asym = running().with_rows(vec![Row::from_ints(&[1, 2], 5)]).unwrap();
        assert!(matches!(project_polyhedron(&asym), Err(ProjectError::NotSymmetric { violations: 1 })));
    }

    #[test]
    fn enumeration_examples() {
        let empty = ProjectedPolyhedron { d: 1, rows: vec![Row::from_ints(&[1], 0), Row::from_ints(&[-1], -1)] };
        assert!(fibers(&empty).is_empty());

        let boxed = ProjectedPolyhedron {
            d: 2,
            rows: vec![
                Row::from_ints(&[1, 0], 2),
                Row::from_ints(&[-1, 0], 0),
                Row::from_ints(&[0, 1], 2),
                Row::from_ints(&[0, -1], 0),
            ],
        };
        let mut expected = Vec::new();
        for a in 0..=2 {
            for b in 0..=2 {
                expected.push(vec![a, b]);
            }
        }
        assert_eq!(fibers(&boxed), expected);
        assert_eq!(enumerate_lattice_points(&boxed, 5), Err(ProjectError::FiberCap { cap: 5 }));

        let open = ProjectedPolyhedron { d: 2, rows: vec![Row::from_ints(&[1, 0], 2), Row::from_ints(&[-1, 0], 0)] };
        assert_eq!(enumerate_lattice_points(&open, 10), Err(ProjectError::Unbounded));
    }

    fn random_polytope() -> impl Strategy<Value = ProjectedPolyhedron> {
        (1usize..4).prop_flat_map(|d| {
            let row = (prop::collection::vec(-4i64..5, d), -3i64..10, 1i64..4)
                .prop_map(|(a, b, q)| Row::new(a.iter().map(|&v| r(v, q)).collect(), Rational::from(b)));
            prop::collection::vec(row, 0..5).prop_map(move |mut rows| {
                for j in 0..d {
                    let mut e = vec![0; d];
                    e[j] = 1;
                    rows.push(Row::from_ints(&e, 3));
                    e[j] = -1;
                    rows.push(Row::from_ints(&e, 3));
                }
                ProjectedPolyhedron { d, rows }
            })
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        /// Stream agrees with a scan of the whole bounding box [-3, 3]^d.
        #[test]
        fn matches_box_scan(proj in random_polytope()) {
            let mut brute = Vec::new();
            for code in 0..7usize.pow(proj.d as u32) {
                // Mixed-radix digits, most significant first, give lexicographic order.
                let point: Vec<i64> = (0..proj.d)
                    .map(|j| (code / 7usize.pow((proj.d - 1 - j) as u32) % 7) as i64 - 3)
                    .collect();
                if proj.contains(&FiberIndex(point.clone())) {
                    brute.push(point);
                }
            }
            prop_assert_eq!(fibers(&proj), brute);
        }
    }
}
