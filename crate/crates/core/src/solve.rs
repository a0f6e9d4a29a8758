//! Solvers: fiber enumeration with core-point feasibility tests, and an exact
//! branch-and-bound used as an oracle and as the engine for transformed
//! models.

use std::cmp::{Ordering, Reverse};
use std::collections::BinaryHeap;
use std::time::{Duration, Instant};

use log::{debug, info};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::arith::{lcm_of_denominators, RatVector, Rational, Row};
use crate::core_points::fiber_feasible;
use crate::group::{FiberIndex, GroupError};
use crate::lp::{fits_i64, lp_maximize_prepared, LpError, LpResult, LpRows, WarmStart};
use crate::model::Instance;
use crate::project::{enumerate_lattice_points, project_polyhedron, ProjectError, DEFAULT_FIBER_CAP};
use crate::transform::{lift_solution, transform_instance, TransformError};

#[derive(Debug, Error)]
pub enum SolveError {
    #[error(transparent)]
    Project(#[from] ProjectError),
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Lp(#[from] LpError),
    #[error(transparent)]
    Transform(#[from] TransformError),
    #[error("LP relaxation is unbounded")]
    Unbounded,
    #[error("row, objective and integrality lengths disagree")]
    Dimension,
    #[error("cannot build a thread pool: {0}")]
    ThreadPool(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveStatus {
    Optimal,
    Infeasible,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Certificate {
    /// Block sums of the fiber holding the optimum.
    Fiber(FiberIndex),
    /// Number of branch-and-bound nodes explored.
    Nodes(usize),
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct SolveStats {
    /// Integer points of the projected polyhedron.
    pub fibers_enumerated: usize,
    /// Representative containment tests performed.
    pub fibers_tested: usize,
    /// LP solves spent on enumeration bounds.
    pub enumeration_lp_calls: usize,
    pub bb_nodes: usize,
    pub lp_solves: usize,
    /// Rows the lazy relaxation had to load.
    pub rows_activated: usize,
    /// Wall time; kept out of serialized reports so they stay reproducible.
    #[serde(skip)]
    pub elapsed: Duration,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Solution {
    pub status: SolveStatus,
    pub point: Option<RatVector>,
    pub objective: Option<Rational>,
    pub certificate: Option<Certificate>,
    pub stats: SolveStats,
}

impl Solution {
    fn infeasible(certificate: Option<Certificate>, stats: SolveStats) -> Self {
        Solution { status: SolveStatus::Infeasible, point: None, objective: None, certificate, stats }
    }

    pub fn is_optimal(&self) -> bool {
        self.status == SolveStatus::Optimal
    }

    pub fn int_point(&self) -> Option<Vec<i64>> {
        self.point.as_ref().and_then(RatVector::to_ints)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SolveOptions {
    pub threads: usize,
    pub fiber_cap: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions { threads: 1, fiber_cap: DEFAULT_FIBER_CAP }
    }
}

/// Fibers in testing order: objective value descending, then block sums
/// ascending.
pub fn order_fibers(inst: &Instance, fibers: Vec<FiberIndex>) -> Result<Vec<(Rational, FiberIndex)>, GroupError> {
    let group = inst.group();
    let mut keyed = fibers
        .into_iter()
        .map(|s| Ok((group.fiber_objective(inst.objective(), &s)?, s)))
        .collect::<Result<Vec<_>, GroupError>>()?;
    keyed.sort_by(|(va, sa), (vb, sb)| vb.cmp(va).then_with(|| sa.cmp(sb)));
    Ok(keyed)
}

/// Enumerates all fibers of the projected polyhedron and tests their core
/// representatives in order of decreasing objective value; the first feasible
/// representative is optimal.
pub fn solve_fiber(inst: &Instance, opts: &SolveOptions) -> Result<Solution, SolveError> {
    let start = Instant::now();
    let proj = project_polyhedron(inst)?;
    inst.group().block_coefficients(inst.objective())?;
    let enumeration = enumerate_lattice_points(&proj, opts.fiber_cap)?;
    let mut stats = SolveStats {
        fibers_enumerated: enumeration.fibers.len(),
        enumeration_lp_calls: enumeration.lp_calls,
        ..SolveStats::default()
    };
    debug!("{} fibers enumerated with {} LP solves", stats.fibers_enumerated, stats.enumeration_lp_calls);
    let ordered = order_fibers(inst, enumeration.fibers)?;

    let hit = if opts.threads <= 1 {
        let mut hit = None;
        for (i, (_, s)) in ordered.iter().enumerate() {
            stats.fibers_tested += 1;
            if let Some(z) = fiber_feasible(inst, s) {
                hit = Some((i, z));
                break;
            }
        }
        hit
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(opts.threads)
            .build()
            .map_err(|e| SolveError::ThreadPool(e.to_string()))?;
        // Batches keep the answer equal to the sequential one: the earliest
        // feasible fiber of the first batch containing any wins.
        let batch = opts.threads * 4;
        pool.install(|| {
            let mut hit = None;
            let mut speculative = 0;
            for (b, chunk) in ordered.chunks(batch).enumerate() {
                speculative += chunk.len();
                let found = chunk.par_iter().enumerate().find_map_first(|(i, (_, s))| {
                    fiber_feasible(inst, s).map(|z| (b * batch + i, z))
                });
                if found.is_some() {
                    hit = found;
                    break;
                }
            }
            debug!("{speculative} fibers tested across {} threads", opts.threads);
            hit
        })
    };
    if opts.threads > 1 {
        // Same count as the sequential scan.
        stats.fibers_tested = hit.as_ref().map_or(ordered.len(), |(i, _)| i + 1);
    }
    stats.elapsed = start.elapsed();
    info!("fiber solve: {} fibers, {} tested, {:?}", stats.fibers_enumerated, stats.fibers_tested, stats.elapsed);
    Ok(match hit {
        Some((i, z)) => {
            let (value, s) = ordered[i].clone();
            Solution {
                status: SolveStatus::Optimal,
                point: Some(RatVector::from_ints(&z)),
                objective: Some(value),
                certificate: Some(Certificate::Fiber(s)),
                stats,
            }
        }
        None => Solution::infeasible(None, stats),
    })
}

/// Rows with integer data that fit into machine words, for fast scoring.
struct RowPool<'a> {
    rows: &'a [Row],
    n: usize,
    ints: Option<IntPool>,
}

/// Row-major coefficients in the narrowest integer type holding them.
enum Coeffs {
    I16(Vec<i16>),
    I32(Vec<i32>),
    I64(Vec<i64>),
}

struct IntPool {
    coeffs: Coeffs,
    rhs: Vec<i64>,
    /// Largest magnitude among coefficients and right-hand sides.
    bound: i64,
}

impl IntPool {
    fn new(rows: &[Row]) -> Option<Self> {
        let mut coeffs: Vec<i64> = Vec::new();
        let mut rhs = Vec::with_capacity(rows.len());
        for row in rows {
            coeffs.extend(row.a.to_ints()?);
            rhs.push(row.b.to_i64()?);
        }
        let bound = coeffs.iter().chain(&rhs).map(|v| v.checked_abs()).collect::<Option<Vec<_>>>()?;
        let bound = bound.into_iter().max().unwrap_or(0);
        let coeffs = if bound <= i16::MAX as i64 {
            Coeffs::I16(coeffs.into_iter().map(|v| v as i16).collect())
        } else if bound <= i32::MAX as i64 {
            Coeffs::I32(coeffs.into_iter().map(|v| v as i32).collect())
        } else {
            Coeffs::I64(coeffs)
        };
        Some(IntPool { coeffs, rhs, bound })
    }
}

/// `(<a_i, x> - b_i * scale, i)` for the inactive rows where this is
/// positive. The caller guarantees that no sum overflows `W`.
fn scores<T, W>(coeffs: &[T], rhs: &[i64], x: &[W], scale: W, active: &[bool]) -> Vec<(W, usize)>
where
    T: Copy + Into<i64>,
    W: Copy + Ord + From<i64> + std::ops::Mul<Output = W> + std::ops::Sub<Output = W> + std::iter::Sum,
{
    let n = x.len();
    let zero = W::from(0);
    let mut scored = Vec::new();
    for (i, (row, &b)) in coeffs.chunks_exact(n).zip(rhs).enumerate() {
        if active[i] {
            continue;
        }
        let score = row.iter().zip(x).map(|(&a, &v)| W::from(a.into()) * v).sum::<W>() - W::from(b) * scale;
        if score > zero {
            scored.push((score, i));
        }
    }
    scored
}

impl<'a> RowPool<'a> {
    fn new(rows: &'a [Row], n: usize) -> Self {
        let ints = if n == 0 { None } else { IntPool::new(rows) };
        RowPool { rows, n, ints }
    }

    /// Indices of up to `k` inactive rows with the largest positive value of
    /// `<a, v> - b` (or `<a, v>` when `with_rhs` is false).
    fn most_positive(&self, v: &RatVector, with_rhs: bool, active: &[bool], k: usize) -> Vec<usize> {
        if let Some(picked) = self.most_positive_int(v, with_rhs, active, k) {
            return picked;
        }
        let mut scored: Vec<(Rational, usize)> = self
            .rows
            .iter()
            .enumerate()
            .filter(|(i, _)| !active[*i])
            .filter_map(|(i, row)| {
                let mut score = row.a.dot(v).expect("dimension checked");
                if with_rhs {
                    score -= &row.b;
                }
                score.is_positive().then_some((score, i))
            })
            .collect();
        top_k(&mut scored, k)
    }

    fn most_positive_int(&self, v: &RatVector, with_rhs: bool, active: &[bool], k: usize) -> Option<Vec<usize>> {
        let pool = self.ints.as_ref()?;
        let scale = lcm_of_denominators(v.iter());
        let x: Vec<i128> = v.iter().map(|x| (x.numer() * (&scale / x.denom())).to_i128()).collect::<Option<_>>()?;
        let scale = if with_rhs { scale.to_i128()? } else { 0 };
        let largest = x.iter().map(|v| v.unsigned_abs()).max().unwrap_or(0).max(scale.unsigned_abs());
        if fits_i64(pool.bound, largest as i128, self.n + 1) {
            let x: Vec<i64> = x.iter().map(|&v| v as i64).collect();
            let scale = scale as i64;
            let mut scored = match &pool.coeffs {
                Coeffs::I16(c) => scores(c, &pool.rhs, &x, scale, active),
                Coeffs::I32(c) => scores(c, &pool.rhs, &x, scale, active),
                Coeffs::I64(c) => scores(c, &pool.rhs, &x, scale, active),
            };
            return Some(top_k(&mut scored, k));
        }
        let within_i128 = (pool.bound as u128)
            .checked_mul(largest)
            .and_then(|p| p.checked_mul(self.n as u128 + 1))
            .is_some_and(|total| total < i128::MAX as u128);
        if within_i128 {
            let mut scored = match &pool.coeffs {
                Coeffs::I16(c) => scores(c, &pool.rhs, &x, scale, active),
                Coeffs::I32(c) => scores(c, &pool.rhs, &x, scale, active),
                Coeffs::I64(c) => scores(c, &pool.rhs, &x, scale, active),
            };
            return Some(top_k(&mut scored, k));
        }
        let mut scored = match &pool.coeffs {
            Coeffs::I16(c) => checked_scores(c, &pool.rhs, &x, scale, active)?,
            Coeffs::I32(c) => checked_scores(c, &pool.rhs, &x, scale, active)?,
            Coeffs::I64(c) => checked_scores(c, &pool.rhs, &x, scale, active)?,
        };
        Some(top_k(&mut scored, k))
    }
}

/// [`scores`] in `i128` with overflow checks; `None` on overflow.
fn checked_scores<T: Copy + Into<i64>>(
    coeffs: &[T],
    rhs: &[i64],
    x: &[i128],
    scale: i128,
    active: &[bool],
) -> Option<Vec<(i128, usize)>> {
    let n = x.len();
    let mut scored = Vec::new();
    for (i, (row, &b)) in coeffs.chunks_exact(n).zip(rhs).enumerate() {
        if active[i] {
            continue;
        }
        let mut acc = (b as i128).checked_mul(scale)?.checked_neg()?;
        for (&a, &v) in row.iter().zip(x) {
            let a: i64 = a.into();
            if a != 0 {
                acc = acc.checked_add((a as i128).checked_mul(v)?)?;
            }
        }
        if acc > 0 {
            scored.push((acc, i));
        }
    }
    Some(scored)
}

fn top_k<T: Ord>(scored: &mut Vec<(T, usize)>, k: usize) -> Vec<usize> {
    scored.sort_by(|(sa, ia), (sb, ib)| sb.cmp(sa).then(ia.cmp(ib)));
    scored.iter().take(k).map(|(_, i)| *i).collect()
}

/// Exact LP relaxation over all rows, loading rows on demand: solve over the
/// active rows, then activate the most violated (or, for an unbounded
/// relaxation, the most blocking) rows until the solution is feasible.
///
/// Every LP is posed over the active rows followed by the branching rows of
/// a node, and each solve resumes from the optimal basis of the previous one
/// whenever its rows are a subset of the current ones.
struct LazyRelaxation<'a> {
    pool: RowPool<'a>,
    objective: &'a RatVector,
    active: Vec<bool>,
    active_rows: LpRows,
    batch: usize,
    lp_solves: usize,
}

enum Relaxation {
    Optimal { value: Rational, point: RatVector },
    Infeasible,
}

/// An optimal basis together with the number of active rows it was found
/// with, which is where the branching rows started.
#[derive(Clone)]
struct Basis {
    start: WarmStart,
    active: usize,
}

impl<'a> LazyRelaxation<'a> {
    fn new(rows: &'a [Row], objective: &'a RatVector) -> Self {
        let n = objective.len();
        let eager = rows.len() <= 4 * n + 64;
        let mut lazy = LazyRelaxation {
            pool: RowPool::new(rows, n),
            objective,
            active: vec![eager; rows.len()],
            active_rows: LpRows::new(n),
            batch: 2 * n + 2,
            lp_solves: 0,
        };
        if eager {
            lazy.activate(&(0..rows.len()).collect::<Vec<_>>());
        } else {
            // Seed with the rows that block the objective direction most.
            let seed = lazy.pool.most_positive(objective, false, &lazy.active, lazy.batch);
            lazy.activate(&seed);
        }
        lazy
    }

    fn activate(&mut self, picked: &[usize]) {
        for &i in picked {
            self.active[i] = true;
            self.active_rows.push(&self.pool.rows[i]).expect("rows have the objective's length");
        }
    }

    fn rows_activated(&self) -> usize {
        self.active_rows.len()
    }

    /// `basis` renumbered for the current active rows.
    fn renumber(&self, basis: &Basis) -> WarmStart {
        let shift = self.active_rows.len() - basis.active;
        basis.start.remap(|i| if i < basis.active { i } else { i + shift })
    }

    /// Solves the relaxation with the extra rows `bounds`, starting from the
    /// basis of a node whose branching rows are a prefix of `bounds`.
    fn solve(&mut self, bounds: &[Row], start: Option<&Basis>) -> Result<(Relaxation, Option<Basis>), SolveError> {
        let mut warm = start.map(|b| self.renumber(b));
        loop {
            let mut rows = self.active_rows.clone();
            for row in bounds {
                rows.push(row)?;
            }
            self.lp_solves += 1;
            let (result, basis) = lp_maximize_prepared(rows, self.objective, warm.as_ref())?;
            let basis = basis.map(|start| Basis { start, active: self.active_rows.len() });
            match result {
                LpResult::Infeasible => return Ok((Relaxation::Infeasible, None)),
                LpResult::Unbounded { ray } => {
                    let picked = self.pool.most_positive(&ray, false, &self.active, self.batch);
                    if picked.is_empty() {
                        return Err(SolveError::Unbounded);
                    }
                    self.activate(&picked);
                    warm = None;
                }
                LpResult::Optimal { value, point } => {
                    let picked = self.pool.most_positive(&point, true, &self.active, self.batch);
                    if picked.is_empty() {
                        return Ok((Relaxation::Optimal { value, point }, basis));
                    }
                    self.activate(&picked);
                    warm = basis.map(|b| self.renumber(&b));
                }
            }
        }
    }
}

struct Node {
    bound: Rational,
    seq: usize,
    point: RatVector,
    /// Branching rows along the path from the root.
    bounds: Vec<Row>,
    basis: Option<Basis>,
}

impl PartialEq for Node {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Node {}

impl PartialOrd for Node {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Node {
    /// Max-heap order: larger bound first, then earlier creation.
    fn cmp(&self, other: &Self) -> Ordering {
        self.bound.cmp(&other.bound).then_with(|| Reverse(self.seq).cmp(&Reverse(other.seq)))
    }
}

struct Frontier<'a> {
    relax: LazyRelaxation<'a>,
    heap: BinaryHeap<Node>,
    seq: usize,
    nodes: usize,
}

impl Frontier<'_> {
    /// Solves the relaxation of a new node and queues it unless infeasible.
    fn open(&mut self, bounds: Vec<Row>, start: Option<&Basis>) -> Result<(), SolveError> {
        self.nodes += 1;
        if let (Relaxation::Optimal { value, point }, basis) = self.relax.solve(&bounds, start)? {
            self.heap.push(Node { bound: value, seq: self.seq, point, bounds, basis });
            self.seq += 1;
        }
        Ok(())
    }
}

/// `x_j <= v` when `upper`, otherwise `x_j >= v`.
fn bound_row(n: usize, j: usize, v: Rational, upper: bool) -> Row {
    let mut e = vec![Rational::zero(); n];
    if upper {
        e[j] = Rational::one();
        Row::new(RatVector::from(e), v)
    } else {
        e[j] = -Rational::one();
        Row::new(RatVector::from(e), -v)
    }
}

/// Spacing of attainable objective values when every variable with a nonzero
/// objective coefficient is integral: `<c, x>` lies in `step * Z`.
fn objective_step(objective: &RatVector, integer_vars: &[bool]) -> Option<Rational> {
    if objective.iter().zip(integer_vars).any(|(c, &int)| !int && !c.is_zero()) {
        return None;
    }
    let scale = lcm_of_denominators(objective.iter());
    let g = objective.iter().fold(BigInt::zero(), |g, c| g.gcd(&(c.numer() * (&scale / c.denom()))));
    if g.is_zero() {
        return None;
    }
    Some(Rational::from_big(num_rational::BigRational::new(g, scale)))
}

/// Exact branch-and-bound for `max <c, x>  s.t.  rows, x_j integer where
/// integer_vars[j]`.
///
/// Best-first on the LP bound (ties first-in first-out), branching on the
/// most fractional integer variable (ties to the lowest index).
pub fn solve_bb(rows: &[Row], objective: &RatVector, integer_vars: &[bool]) -> Result<Solution, SolveError> {
    let start = Instant::now();
    let n = objective.len();
    if integer_vars.len() != n || rows.iter().any(|r| r.len() != n) {
        return Err(SolveError::Dimension);
    }
    let step = objective_step(objective, integer_vars);
    // Largest attainable objective value not exceeding `bound`.
    let attainable = |bound: &Rational| match &step {
        Some(step) => (bound / step).floor() * step,
        None => bound.clone(),
    };

    let mut frontier = Frontier { relax: LazyRelaxation::new(rows, objective), heap: BinaryHeap::new(), seq: 0, nodes: 0 };
    let mut incumbent: Option<(Rational, RatVector)> = None;
    frontier.open(Vec::new(), None)?;

    while let Some(node) = frontier.heap.pop() {
        if let Some((best, _)) = &incumbent {
            if attainable(&node.bound) <= *best {
                continue;
            }
        }
        let half = Rational::new(1, 2).expect("nonzero denominator");
        let branch = (0..n)
            .filter(|&j| integer_vars[j] && !node.point[j].is_integer())
            .map(|j| {
                let frac = &node.point[j] - &node.point[j].floor();
                ((&frac - &half).abs(), j)
            })
            .min();
        match branch {
            None => {
                debug!("incumbent {} after {} nodes", node.bound, frontier.nodes);
                incumbent = Some((node.bound, node.point));
            }
            Some((_, j)) => {
                let floor = node.point[j].floor();
                let mut down = node.bounds.clone();
                down.push(bound_row(n, j, floor.clone(), true));
                frontier.open(down, node.basis.as_ref())?;
                let mut up = node.bounds;
                up.push(bound_row(n, j, floor + Rational::one(), false));
                frontier.open(up, node.basis.as_ref())?;
            }
        }
    }

    let Frontier { relax, nodes, .. } = frontier;
    let stats = SolveStats {
        bb_nodes: nodes,
        lp_solves: relax.lp_solves,
        rows_activated: relax.rows_activated(),
        elapsed: start.elapsed(),
        ..SolveStats::default()
    };
    info!("branch and bound: {} nodes, {} LP solves, {:?}", stats.bb_nodes, stats.lp_solves, stats.elapsed);
    Ok(match incumbent {
        Some((value, point)) => Solution {
            status: SolveStatus::Optimal,
            point: Some(point),
            objective: Some(value),
            certificate: Some(Certificate::Nodes(nodes)),
            stats,
        },
        None => Solution::infeasible(Some(Certificate::Nodes(nodes)), stats),
    })
}

/// Branch-and-bound on the instance as given, all variables integer.
pub fn solve_bb_instance(inst: &Instance) -> Result<Solution, SolveError> {
    solve_bb(inst.rows(), inst.objective(), &vec![true; inst.n()])
}

/// Rewrites the instance over core representatives, solves the result with
/// branch-and-bound and maps the optimum back to the original variables.
pub fn solve_transformed(inst: &Instance) -> Result<Solution, SolveError> {
    let start = Instant::now();
    let transformed = transform_instance(inst)?;
    let mut sol = solve_bb(&transformed.rows, &transformed.objective, &vec![true; transformed.num_vars()])?;
    if let Some(point) = &sol.point {
        let assignment = point.to_ints().expect("all transformed variables are integer");
        let z = lift_solution(&transformed, &assignment)?;
        let value = inst.objective_value_int(&z);
        debug_assert_eq!(Some(&value), sol.objective.as_ref());
        sol.point = Some(RatVector::from_ints(&z));
        sol.objective = Some(value);
    }
    sol.stats.elapsed = start.elapsed();
    Ok(sol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::BlockGroup;

    fn running(rhs0: i64) -> Instance {
        Instance::new(
            2,
            vec![Row::from_ints(&[-1, -1], rhs0), Row::from_ints(&[1, 2], 5), Row::from_ints(&[2, 1], 5)],
            RatVector::from_ints(&[1, 1]),
            BlockGroup::symmetric_blocks(&[2]),
        )
        .unwrap()
    }

    /// All integer points of [lo, hi]^n.
    fn brute_force(inst: &Instance, lo: i64, hi: i64) -> Option<Rational> {
        let n = inst.n();
        let width = (hi - lo + 1) as usize;
        let mut best: Option<Rational> = None;
        for code in 0..width.pow(n as u32) {
            let z: Vec<i64> = (0..n).map(|j| (code / width.pow(j as u32) % width) as i64 + lo).collect();
            if inst.contains_int(&z) {
                let v = inst.objective_value_int(&z);
                if best.as_ref().is_none_or(|b| v > *b) {
                    best = Some(v);
                }
            }
        }
        best
    }

    #[test]
    fn running_example_fiber() {
        let inst = running(-3);
        assert_eq!(brute_force(&inst, 0, 5), Some(Rational::from(3)));
        let sol = solve_fiber(&inst, &SolveOptions::default()).unwrap();
        assert_eq!(sol.status, SolveStatus::Optimal);
        assert_eq!(sol.objective, Some(Rational::from(3)));
        assert_eq!(sol.int_point(), Some(vec![2, 1]));
        assert_eq!(sol.certificate, Some(Certificate::Fiber(FiberIndex(vec![3]))));
        assert_eq!((sol.stats.fibers_enumerated, sol.stats.fibers_tested), (1, 1));
    }

    #[test]
    fn running_example_infeasible() {
        let inst = running(-4);
        assert_eq!(brute_force(&inst, -2, 6), None);
        let sol = solve_fiber(&inst, &SolveOptions::default()).unwrap();
        assert_eq!(sol.status, SolveStatus::Infeasible);
        assert_eq!(sol.stats.fibers_enumerated, 0);
        assert_eq!(solve_bb_instance(&inst).unwrap().status, SolveStatus::Infeasible);
    }

    #[test]
    fn zero_box() {
        let g = BlockGroup::symmetric_blocks(&[2, 1]);
        let mut rows = Vec::new();
        for j in 0..3 {
            let mut e = vec![0; 3];
            e[j] = 1;
            rows.push(Row::from_ints(&e, 0));
            e[j] = -1;
            rows.push(Row::from_ints(&e, 0));
        }
        let inst = Instance::new(3, rows, RatVector::from_ints(&[4, 4, -1]), g).unwrap();
        let sol = solve_fiber(&inst, &SolveOptions::default()).unwrap();
        assert_eq!(sol.int_point(), Some(vec![0, 0, 0]));
        assert_eq!(sol.objective, Some(Rational::zero()));
    }

    #[test]
    fn bb_examples() {
        let inst = running(-3);
        let sol = solve_bb_instance(&inst).unwrap();
        assert_eq!(sol.objective, Some(Rational::from(3)));
        assert!(inst.contains_int(&sol.int_point().unwrap()));

        let sol = solve_bb(&[Row::from_ints(&[1], 0), Row::from_ints(&[-1], -1)], &RatVector::from_ints(&[1]), &[true])
            .unwrap();
        assert_eq!(sol.status, SolveStatus::Infeasible);

        let err = solve_bb(&[Row::from_ints(&[-1], 0)], &RatVector::from_ints(&[1]), &[true]).unwrap_err();
        assert!(matches!(err, SolveError::Unbounded));
    }

    #[test]
    fn bb_mixed_integer() {
        // max x + y, 2x + 2y <= 3, x integer, y continuous, x, y >= 0.
        let rows = [Row::from_ints(&[2, 2], 3), Row::from_ints(&[-1, 0], 0), Row::from_ints(&[0, -1], 0)];
        let sol = solve_bb(&rows, &RatVector::from_ints(&[1, 1]), &[true, false]).unwrap();
        assert_eq!(sol.objective, Some(Rational::new(3, 2).unwrap()));
        assert!(sol.point.unwrap()[0].is_integer());
    }

    #[test]
    fn lazy_rows_match_eager() {
        // Many rows so the relaxation starts lazily: a discretized disc.
        let mut rows = Vec::new();
        for a in -12i64..=12 {
            for b in -12i64..=12 {
                if a * a + b * b > 100 && a * a + b * b <= 144 {
                    rows.push(Row::from_ints(&[a, b], 60));
                }
            }
        }
        assert!(rows.len() > 72);
        let c = RatVector::from_ints(&[3, 2]);
        let lazy = solve_bb(&rows, &c, &[true, true]).unwrap();
        let inst = Instance::new(2, rows, c, BlockGroup::trivial(2)).unwrap();
        assert_eq!(lazy.objective, brute_force(&inst, -12, 12));
        assert!(lazy.stats.rows_activated < inst.rows().len());
    }

    #[test]
    fn threads_do_not_change_the_answer() {
        let g = BlockGroup::symmetric_blocks(&[3, 2]);
        let mut rows = vec![Row::from_ints(&[-1, -1, -1, -1, -1], -1)];
        for j in 0..5 {
            let mut e = vec![0; 5];
            e[j] = -1;
            rows.push(Row::from_ints(&e, 0));
            e[j] = 1;
            rows.push(Row::from_ints(&e, 3));
        }
        let inst = Instance::new(5, rows, RatVector::from_ints(&[1, 1, 1, 1, 1]), g).unwrap();
        let one = solve_fiber(&inst, &SolveOptions { threads: 1, ..SolveOptions::default() }).unwrap();
        let four = solve_fiber(&inst, &SolveOptions { threads: 4, ..SolveOptions::default() }).unwrap();
        assert_eq!(one.point, four.point);
        assert_eq!(one.certificate, four.certificate);
        assert_eq!(one.objective, Some(Rational::from(15)));
    }
}
