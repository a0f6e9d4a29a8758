//! Exact linear programming over rational polyhedra.
//!
//! Two exact simplex codes share the work. Short systems `Ax <= b` go to a
//! dense two-phase tableau over the standard form with nonnegative variables
//! `x+`, a single shift `w` (so that `x = x+ - w * 1`) and one slack per row.
//! Tall systems, with many more rows than variables, are solved through their
//! dual `min <b, y>  s.t.  A^T y = c, y >= 0` by a revised simplex that keeps
//! only an `n x n` basis inverse; the primal point is the dual's multiplier
//! vector. Both codes use the most negative reduced cost (the revised code
//! looks at one section of columns at a time) and fall back to Bland's rule
//! during runs of degenerate pivots, so neither can cycle.

use std::cell::Cell;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::arith::{lcm_of_denominators, ArithError, RatVector, Rational, Row};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LpError {
    #[error(transparent)]
    Dimension(#[from] ArithError),
    #[error("hull membership needs at least one generator")]
    NoGenerators,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Maximize,
    Minimize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LpResult {
    Optimal { value: Rational, point: RatVector },
    Infeasible,
    /// The objective improves without bound along `ray`, a recession
    /// direction of the feasible region.
    Unbounded { ray: RatVector },
}

impl LpResult {
    pub fn is_optimal(&self) -> bool {
        matches!(self, LpResult::Optimal { .. })
    }

    pub fn value(&self) -> Option<&Rational> {
        match self {
            LpResult::Optimal { value, .. } => Some(value),
            _ => None,
        }
    }
}

/// Consecutive degenerate pivots after which Bland's rule takes over.
const DEGENERATE_RUN_LIMIT: usize = 16;

/// Optimizes `objective` over `{x : <a, x> <= b for every row}`.
pub fn lp_solve(rows: &[Row], objective: &RatVector, direction: Direction) -> Result<LpResult, LpError> {
    let n = objective.len();
    for row in rows {
        if row.len() != n {
            return Err(ArithError::LengthMismatch { expected: n, found: row.len() }.into());
        }
    }
    if rows.len() > 2 * (n + 1) {
        solve_dual(rows, objective, direction)
    } else {
        solve_primal(rows, objective, direction)
    }
}

fn solve_primal(rows: &[Row], objective: &RatVector, direction: Direction) -> Result<LpResult, LpError> {
    let n = objective.len();
    let m = rows.len();
    // Columns: x+ (n), shift w (1), slacks (m).
    let ncols = n + 1 + m;
    let mut matrix = Vec::with_capacity(m);
    let mut rhs = Vec::with_capacity(m);
    for (i, row) in rows.iter().enumerate() {
        let mut line = Vec::with_capacity(ncols);
        line.extend(row.a.iter().cloned());
        line.push(-row.a.iter().sum::<Rational>());
        line.extend((0..m).map(|j| if i == j { Rational::one() } else { Rational::zero() }));
        matrix.push(line);
        rhs.push(row.b.clone());
    }
    let sign = match direction {
        Direction::Maximize => -Rational::one(),
        Direction::Minimize => Rational::one(),
    };
    let mut cost: Vec<Rational> = objective.iter().map(|c| c * &sign).collect();
    cost.push(-cost.iter().sum::<Rational>());
    cost.extend((0..m).map(|_| Rational::zero()));

    let to_x = |y: &[Rational]| -> RatVector { (0..n).map(|j| &y[j] - &y[n]).collect() };
    Ok(match (StandardForm { matrix, rhs, cost }).solve() {
        StandardOutcome::Optimal(y) => {
            let point = to_x(&y);
            let value = objective.dot(&point)?;
            LpResult::Optimal { value, point }
        }
        StandardOutcome::Infeasible => LpResult::Infeasible,
        StandardOutcome::Unbounded(ray) => LpResult::Unbounded { ray: to_x(&ray) },
    })
}

/// Whether `candidate` is a convex combination of `generators`.
pub fn hull_membership(candidate: &RatVector, generators: &[RatVector]) -> Result<bool, LpError> {
    if generators.is_empty() {
        return Err(LpError::NoGenerators);
    }
    let n = candidate.len();
    for g in generators {
        if g.len() != n {
            return Err(ArithError::LengthMismatch { expected: n, found: g.len() }.into());
        }
    }
    let mut matrix: Vec<Vec<Rational>> = (0..n).map(|j| generators.iter().map(|g| g[j].clone()).collect()).collect();
    matrix.push(vec![Rational::one(); generators.len()]);
    let mut rhs: Vec<Rational> = candidate.iter().cloned().collect();
    rhs.push(Rational::one());
    let cost = vec![Rational::zero(); generators.len()];
    Ok(!matches!((StandardForm { matrix, rhs, cost }).solve(), StandardOutcome::Infeasible))
}

/// Solves `max <c, x>  s.t.  Ax <= b` (with `c` negated for minimization)
/// through its dual. An infeasible dual yields a Farkas vector `d` with
/// `Ad <= 0` and `<c, d> > 0`, which is a primal ray whenever the primal is
/// feasible; feasibility is then settled by a second solve with `c = 0`.
fn solve_dual(rows: &[Row], objective: &RatVector, direction: Direction) -> Result<LpResult, LpError> {
    let c: Vec<Rational> = match direction {
        Direction::Maximize => objective.to_vec(),
        Direction::Minimize => objective.iter().map(|v| -v).collect(),
    };
    let mut dual = RevisedDual::new(IntRows::new(rows, c.len()), &c);
    let outcome = dual.solve();
    finish_dual(&dual.rows, objective, outcome)
}

fn finish_dual(rows: &IntRows, objective: &RatVector, outcome: DualOutcome) -> Result<LpResult, LpError> {
    Ok(match outcome {
        DualOutcome::Optimal(x) => {
            let point = RatVector::from(x);
            let value = objective.dot(&point)?;
            LpResult::Optimal { value, point }
        }
        DualOutcome::Unbounded => LpResult::Infeasible,
        DualOutcome::Infeasible(ray) => {
            let zero = vec![Rational::zero(); objective.len()];
            match RevisedDual::new(rows.clone(), &zero).solve() {
                DualOutcome::Optimal(_) => LpResult::Unbounded { ray: RatVector::from(ray) },
                _ => LpResult::Infeasible,
            }
        }
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum BasisVar {
    Row(usize),
    Artificial(usize),
}

/// An optimal basis of [`lp_maximize_from`], valid as a starting point for
/// the same objective over any superset of the rows.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WarmStart {
    basis: Vec<BasisVar>,
    adj: Vec<Vec<BigInt>>,
    det: BigInt,
    xb: Vec<BigInt>,
}

impl WarmStart {
    /// The same basis after row `i` of the earlier solve became row `f(i)`.
    pub fn remap(&self, f: impl Fn(usize) -> usize) -> Self {
        let basis = self
            .basis
            .iter()
            .map(|v| match *v {
                BasisVar::Row(i) => BasisVar::Row(f(i)),
                other => other,
            })
            .collect();
        WarmStart { basis, ..self.clone() }
    }
}

/// Rows of `Ax <= b` converted once for repeated solves with
/// [`lp_maximize_prepared`].
#[derive(Clone)]
pub struct LpRows(IntRows);

impl LpRows {
    pub fn new(n: usize) -> Self {
        LpRows(IntRows::new(&[], n))
    }

    pub fn push(&mut self, row: &Row) -> Result<(), LpError> {
        if row.len() != self.0.n() {
            return Err(ArithError::LengthMismatch { expected: self.0.n(), found: row.len() }.into());
        }
        self.0.push(row);
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.len() == 0
    }
}

/// Maximizes `objective` over the rows by the dual simplex. When `start` is
/// the basis returned by an earlier call with the same objective over rows
/// that all reappear here (renumbered with [`WarmStart::remap`]), the solve
/// resumes from it. A basis is returned with every optimal result.
pub fn lp_maximize_from(
    rows: &[Row],
    objective: &RatVector,
    start: Option<&WarmStart>,
) -> Result<(LpResult, Option<WarmStart>), LpError> {
    let mut prepared = LpRows::new(objective.len());
    for row in rows {
        prepared.push(row)?;
    }
    lp_maximize_prepared(prepared, objective, start)
}

/// [`lp_maximize_from`] over prepared rows.
pub fn lp_maximize_prepared(
    rows: LpRows,
    objective: &RatVector,
    start: Option<&WarmStart>,
) -> Result<(LpResult, Option<WarmStart>), LpError> {
    if rows.0.n() != objective.len() {
        return Err(ArithError::LengthMismatch { expected: rows.0.n(), found: objective.len() }.into());
    }
    let mut dual = RevisedDual::new(rows.0, objective);
    let outcome = match start {
        Some(start) => {
            dual.restore(start);
            dual.resume()
        }
        None => dual.solve(),
    };
    let warm = matches!(outcome, DualOutcome::Optimal(_)).then(|| dual.warm_start());
    Ok((finish_dual(&dual.rows, objective, outcome)?, warm))
}

enum DualOutcome {
    /// Primal optimum (the dual's multipliers).
    Optimal(Vec<Rational>),
    /// Farkas vector of the infeasible dual.
    Infeasible(Vec<Rational>),
    Unbounded,
}

/// Integer multiple `lcm * v` of a rational vector, with `lcm > 0`.
fn integral(v: &[&Rational]) -> Vec<BigInt> {
    let scale = lcm_of_denominators(v.iter().copied());
    v.iter().map(|x| x.numer() * (&scale / x.denom())).collect()
}

/// Row data scaled to integers, kept as machine words when they fit.
#[derive(Clone)]
enum IntRows {
    /// `bound` is the largest absolute value among `a` and `b`.
    Small { n: usize, a: Vec<i64>, b: Vec<i64>, bound: i64 },
    Big { n: usize, a: Vec<BigInt>, b: Vec<BigInt> },
}

impl IntRows {
    fn new(rows: &[Row], n: usize) -> Self {
        let mut out = IntRows::Small { n, a: Vec::with_capacity(rows.len() * n), b: Vec::with_capacity(rows.len()), bound: 0 };
        for row in rows {
            out.push(row);
        }
        out
    }

    /// Appends `row` scaled by the least common multiple of its denominators.
    fn push(&mut self, row: &Row) {
        if let IntRows::Small { a, b, bound, .. } = self {
            let small = match (row.a.to_ints(), row.b.to_i64()) {
                (Some(ra), Some(rb)) => Some((ra, rb)),
                _ => {
                    let mut values: Vec<&Rational> = row.a.iter().collect();
                    values.push(&row.b);
                    let ints = integral(&values);
                    ints.iter().map(ToPrimitive::to_i64).collect::<Option<Vec<_>>>().map(|mut v| {
                        let rb = v.pop().expect("row has a right-hand side");
                        (v, rb)
                    })
                }
            };
            let small = small.and_then(|(ra, rb)| {
                let largest = ra.iter().chain([&rb]).map(|v| v.checked_abs()).collect::<Option<Vec<_>>>()?;
                Some((ra, rb, largest.into_iter().max().unwrap_or(0)))
            });
            match small {
                Some((ra, rb, largest)) => {
                    a.extend(ra);
                    b.push(rb);
                    *bound = (*bound).max(largest);
                    return;
                }
                None => {
                    let n = self.n();
                    let (a, b) = match std::mem::replace(self, IntRows::Big { n, a: Vec::new(), b: Vec::new() }) {
                        IntRows::Small { a, b, .. } => (a, b),
                        IntRows::Big { .. } => unreachable!(),
                    };
                    *self = IntRows::Big {
                        n,
                        a: a.into_iter().map(BigInt::from).collect(),
                        b: b.into_iter().map(BigInt::from).collect(),
                    };
                }
            }
        }
        if let IntRows::Big { a, b, .. } = self {
            let mut values: Vec<&Rational> = row.a.iter().collect();
            values.push(&row.b);
            let mut ints = integral(&values);
            b.push(ints.pop().expect("row has a right-hand side"));
            a.extend(ints);
        }
    }

    fn n(&self) -> usize {
        match self {
            IntRows::Small { n, .. } | IntRows::Big { n, .. } => *n,
        }
    }

    fn len(&self) -> usize {
        match self {
            IntRows::Small { b, .. } => b.len(),
            IntRows::Big { b, .. } => b.len(),
        }
    }

    fn entry(&self, j: usize, k: usize) -> BigInt {
        match self {
            IntRows::Small { n, a, .. } => BigInt::from(a[j * n + k]),
            IntRows::Big { n, a, .. } => a[j * n + k].clone(),
        }
    }

    fn rhs(&self, j: usize) -> BigInt {
        match self {
            IntRows::Small { b, .. } => BigInt::from(b[j]),
            IntRows::Big { b, .. } => b[j].clone(),
        }
    }
}

/// Whether a sum of `terms` products of values bounded by `a` and `b` in
/// absolute value stays within `i64`.
pub(crate) fn fits_i64(a: i64, b: i128, terms: usize) -> bool {
    (a as i128)
        .checked_mul(b)
        .and_then(|p| p.checked_mul(terms as i128))
        .is_some_and(|total| total < i64::MAX as i128)
}

pub(crate) fn dot_i64(a: &[i64], x: &[i64]) -> i64 {
    a.iter().zip(x).map(|(u, v)| u * v).sum()
}

/// `min <b, y>  s.t.  A^T y = c, y >= 0` with one column per row of
/// `Ax <= b`, every row scaled to integers.
///
/// Equations with negative `c_k` are negated so that the artificial basis is
/// feasible; `flip` records them. Column `j < m` is row `j`; column `m + k` is
/// the artificial of equation `k`, which never re-enters once it has left.
///
/// The basis inverse is kept fraction-free as `adj / det` with an integer
/// matrix `adj`, and the basic solution as `xb / det`; pivots update both
/// with exact integer division.
struct RevisedDual {
    rows: IntRows,
    flip: Vec<bool>,
    basis: Vec<usize>,
    adj: Vec<Vec<BigInt>>,
    det: BigInt,
    xb: Vec<BigInt>,
    /// Where partial pricing resumes.
    cursor: Cell<usize>,
}

impl RevisedDual {
    fn new(rows: IntRows, c: &[Rational]) -> Self {
        let n = c.len();
        let m = rows.len();
        let c = integral(&c.iter().collect::<Vec<_>>());
        let adj = (0..n)
            .map(|i| (0..n).map(|k| if i == k { BigInt::one() } else { BigInt::zero() }).collect())
            .collect();
        RevisedDual {
            rows,
            flip: c.iter().map(Signed::is_negative).collect(),
            basis: (m..m + n).collect(),
            adj,
            det: BigInt::one(),
            xb: c.iter().map(Signed::abs).collect(),
            cursor: Cell::new(m.saturating_sub(PRICING_SECTION)),
        }
    }

    fn n(&self) -> usize {
        self.rows.n()
    }

    fn m(&self) -> usize {
        self.rows.len()
    }

    /// Column `j` of the (sign-adjusted) equation system.
    fn column(&self, j: usize) -> Vec<BigInt> {
        let m = self.m();
        if j >= m {
            return (0..self.n()).map(|k| if j - m == k { BigInt::one() } else { BigInt::zero() }).collect();
        }
        (0..self.n()).map(|k| if self.flip[k] { -self.rows.entry(j, k) } else { self.rows.entry(j, k) }).collect()
    }

    fn cost(&self, j: usize, phase_one: bool) -> BigInt {
        match (phase_one, j >= self.m()) {
            (true, true) => BigInt::one(),
            (true, false) | (false, true) => BigInt::zero(),
            (false, false) => self.rows.rhs(j),
        }
    }

    /// `det * c_B B^{-1}` in the coordinates of the unflipped equations.
    fn scaled_multipliers(&self, phase_one: bool) -> Vec<BigInt> {
        let mut pi = vec![BigInt::zero(); self.n()];
        for (i, &j) in self.basis.iter().enumerate() {
            let cb = self.cost(j, phase_one);
            if cb.is_zero() {
                continue;
            }
            for (p, v) in pi.iter_mut().zip(&self.adj[i]) {
                *p += &cb * v;
            }
        }
        for (p, &f) in pi.iter_mut().zip(&self.flip) {
            if f {
                *p = -&*p;
            }
        }
        pi
    }

    fn multipliers(&self, phase_one: bool) -> Vec<Rational> {
        let det = self.det.clone();
        self.scaled_multipliers(phase_one)
            .into_iter()
            .map(|p| Rational::from_big(num_rational::BigRational::new(p, det.clone())))
            .collect()
    }

    /// Entering row: the most negative reduced cost `cost_j - <a_j, x>` over
    /// the scaled rows, or the first negative one under Bland's rule.
    fn price(&self, phase_one: bool, bland: bool) -> Option<usize> {
        // Reduced costs times |det|: |det| cost_j - <a_j, sign(det) pi>.
        let sign = if self.det.is_negative() { -BigInt::one() } else { BigInt::one() };
        let mut pi: Vec<BigInt> = self.scaled_multipliers(phase_one).into_iter().map(|p| p * &sign).collect();
        let mut det = self.det.abs();
        let g = pi.iter().fold(det.clone(), |g, p| g.gcd(p));
        if !g.is_one() {
            det /= &g;
            for p in &mut pi {
                *p /= &g;
            }
        }
        if let IntRows::Small { a, b, bound, .. } = &self.rows {
            let small = det.to_i128().zip(pi.iter().map(ToPrimitive::to_i128).collect::<Option<Vec<_>>>());
            if let Some((det, pi)) = small {
                let n = self.n();
                let largest = pi.iter().map(|p| p.abs()).max().unwrap_or(0).max(det);
                if fits_i64(*bound, largest, n + 1) {
                    let det = det as i64;
                    let pi: Vec<i64> = pi.iter().map(|&p| p as i64).collect();
                    let reduced = |j: usize| -> Option<i64> {
                        let start = if phase_one { 0 } else { det * b[j] };
                        Some(start - dot_i64(&a[j * n..(j + 1) * n], &pi))
                    };
                    return select_entering(self.m(), bland, &self.cursor, reduced).expect("no overflow by the size check");
                }
                let within_i128 = (*bound as u128)
                    .checked_mul(largest as u128)
                    .and_then(|p| p.checked_mul(n as u128 + 1))
                    .is_some_and(|total| total < i128::MAX as u128);
                if within_i128 {
                    let reduced = |j: usize| -> Option<i128> {
                        let start = if phase_one { 0 } else { det * b[j] as i128 };
                        let dot: i128 = a[j * n..(j + 1) * n].iter().zip(&pi).map(|(&u, &v)| u as i128 * v).sum();
                        Some(start - dot)
                    };
                    return select_entering(self.m(), bland, &self.cursor, reduced).expect("no overflow by the size check");
                }
                let reduced = |j: usize| -> Option<i128> {
                    let mut d = if phase_one { 0 } else { det.checked_mul(b[j] as i128)? };
                    for (&ajk, pk) in a[j * self.n()..(j + 1) * self.n()].iter().zip(&pi) {
                        if ajk != 0 {
                            d = d.checked_sub((ajk as i128).checked_mul(*pk)?)?;
                        }
                    }
                    Some(d)
                };
                if let Some(pick) = select_entering(self.m(), bland, &self.cursor, reduced) {
                    return pick;
                }
            }
        }
        let reduced = |j: usize| -> Option<BigInt> {
            let mut d = if phase_one { BigInt::zero() } else { &det * self.rows.rhs(j) };
            for (k, pk) in pi.iter().enumerate() {
                let ajk = self.rows.entry(j, k);
                if !ajk.is_zero() {
                    d -= ajk * pk;
                }
            }
            Some(d)
        };
        select_entering(self.m(), bland, &self.cursor, reduced).expect("big integers do not overflow")
    }

    /// `adj` times column `j`; the pivot column is this divided by `det`.
    fn direction(&self, j: usize) -> Vec<BigInt> {
        let col = self.column(j);
        self.adj
            .iter()
            .map(|line| line.iter().zip(&col).filter(|(_, c)| !c.is_zero()).map(|(l, c)| l * c).sum())
            .collect()
    }

    fn pivot(&mut self, r: usize, e: usize, u: &[BigInt]) {
        let ur = u[r].clone();
        for i in 0..self.n() {
            if i == r {
                continue;
            }
            let (head, tail) = self.adj.split_at_mut(i.max(r));
            let (line, pivot_line) = if i < r { (&mut head[i], &tail[0]) } else { (&mut tail[0], &head[r]) };
            for (v, p) in line.iter_mut().zip(pivot_line) {
                *v = (&ur * &*v - &u[i] * p) / &self.det;
            }
            self.xb[i] = (&ur * &self.xb[i] - &u[i] * &self.xb[r]) / &self.det;
        }
        self.det = ur;
        self.basis[r] = e;
    }

    /// Runs one phase to optimality. Returns false if the objective is
    /// unbounded below.
    fn optimize(&mut self, phase_one: bool) -> bool {
        let mut degenerate_run = 0;
        loop {
            let Some(e) = self.price(phase_one, degenerate_run >= DEGENERATE_RUN_LIMIT) else {
                return true;
            };
            let u = self.direction(e);
            let positive = |v: &BigInt| !v.is_zero() && v.is_negative() == self.det.is_negative();
            // Ratios xb_i / u_i; numerator and denominator share the sign of det.
            let mut best: Option<usize> = None;
            for i in 0..self.n() {
                if !positive(&u[i]) {
                    continue;
                }
                let better = match best {
                    None => true,
                    Some(k) => {
                        let lhs = &self.xb[i] * &u[k];
                        let rhs = &self.xb[k] * &u[i];
                        lhs < rhs || (lhs == rhs && self.basis[i] < self.basis[k])
                    }
                };
                if better {
                    best = Some(i);
                }
            }
            let Some(r) = best else {
                return false;
            };
            degenerate_run = if self.xb[r].is_zero() { degenerate_run + 1 } else { 0 };
            self.pivot(r, e, &u);
        }
    }

    fn solve(&mut self) -> DualOutcome {
        let m = self.m();
        self.optimize(true);
        if self.basis.iter().zip(&self.xb).any(|(&j, v)| j >= m && !v.is_zero()) {
            return DualOutcome::Infeasible(self.multipliers(true));
        }
        // Replace artificials left in the basis at level zero where some row
        // column can take their place; the others sit on redundant equations.
        for r in 0..self.n() {
            if self.basis[r] < m {
                continue;
            }
            let pick = (0..m).find(|&j| {
                let col = self.column(j);
                !self.adj[r].iter().zip(&col).map(|(l, c)| l * c).sum::<BigInt>().is_zero()
            });
            if let Some(j) = pick {
                let u = self.direction(j);
                self.pivot(r, j, &u);
            }
        }
        self.resume()
    }

    /// Phase two from the current (feasible) basis.
    fn resume(&mut self) -> DualOutcome {
        if !self.optimize(false) {
            return DualOutcome::Unbounded;
        }
        DualOutcome::Optimal(self.multipliers(false))
    }

    fn warm_start(&self) -> WarmStart {
        let m = self.m();
        let basis =
            self.basis.iter().map(|&j| if j < m { BasisVar::Row(j) } else { BasisVar::Artificial(j - m) }).collect();
        WarmStart { basis, adj: self.adj.clone(), det: self.det.clone(), xb: self.xb.clone() }
    }

    fn restore(&mut self, start: &WarmStart) {
        let m = self.m();
        self.basis = start
            .basis
            .iter()
            .map(|v| match *v {
                BasisVar::Row(i) => i,
                BasisVar::Artificial(k) => m + k,
            })
            .collect();
        self.adj = start.adj.clone();
        self.det = start.det.clone();
        self.xb = start.xb.clone();
    }
}

/// Columns priced together before an entering candidate is accepted.
const PRICING_SECTION: usize = 1024;

/// Entering column by partial Dantzig pricing: sections of
/// [`PRICING_SECTION`] consecutive columns are scanned cyclically from
/// `cursor`, and the most negative value of `reduced` in the first section
/// that has a negative one wins (lowest index on ties when everything fits in
/// one section). Under Bland's rule the first negative index wins. Returns
/// `None` if `reduced` overflows.
fn select_entering<T: Ord + Zero>(
    m: usize,
    bland: bool,
    cursor: &Cell<usize>,
    reduced: impl Fn(usize) -> Option<T>,
) -> Option<Option<usize>> {
    let mut best: Option<(T, usize)> = None;
    if bland || m <= PRICING_SECTION {
        for j in 0..m {
            let d = reduced(j)?;
            if d < T::zero() {
                if bland {
                    return Some(Some(j));
                }
                if best.as_ref().is_none_or(|(bd, _)| d < *bd) {
                    best = Some((d, j));
                }
            }
        }
        return Some(best.map(|(_, j)| j));
    }
    let start = cursor.get() % m;
    for k in 0..m {
        let j = (start + k) % m;
        let d = reduced(j)?;
        if d < T::zero() && best.as_ref().is_none_or(|(bd, _)| d < *bd) {
            best = Some((d, j));
        }
        if (k + 1) % PRICING_SECTION == 0 && best.is_some() {
            cursor.set(j + 1);
            break;
        }
    }
    Some(best.map(|(_, j)| j))
}

/// `min <cost, y>` subject to `matrix * y = rhs`, `y >= 0`.
struct StandardForm {
    matrix: Vec<Vec<Rational>>,
    rhs: Vec<Rational>,
    cost: Vec<Rational>,
}

enum StandardOutcome {
    Optimal(Vec<Rational>),
    Infeasible,
    Unbounded(Vec<Rational>),
}

struct Tableau {
    /// Constraint rows; the last entry of each row is its right-hand side.
    rows: Vec<Vec<Rational>>,
    /// Reduced costs; the last entry is minus the current objective value.
    reduced: Vec<Rational>,
    basis: Vec<usize>,
    /// Columns at or beyond this index may not enter the basis.
    active_cols: usize,
}

impl Tableau {
    fn width(&self) -> usize {
        self.reduced.len() - 1
    }

    fn pivot(&mut self, r: usize, e: usize) {
        let inv = self.rows[r][e].recip().expect("pivot element is nonzero");
        let width = self.reduced.len();
        for j in 0..width {
            if !self.rows[r][j].is_zero() {
                self.rows[r][j] *= &inv;
            }
        }
        let support: Vec<usize> = (0..width).filter(|&j| !self.rows[r][j].is_zero()).collect();
        let pivot_row = std::mem::take(&mut self.rows[r]);
        let eliminate = |line: &mut Vec<Rational>| {
            let factor = line[e].clone();
            if factor.is_zero() {
                return;
            }
            for &j in &support {
                let delta = &factor * &pivot_row[j];
                line[j] -= &delta;
            }
        };
        for (i, line) in self.rows.iter_mut().enumerate() {
            if i != r {
                eliminate(line);
            }
        }
        eliminate(&mut self.reduced);
        self.rows[r] = pivot_row;
        self.basis[r] = e;
    }

    /// Pivots to optimality. Returns the entering column when the objective
    /// is unbounded.
    fn optimize(&mut self) -> Option<usize> {
        let rhs = self.width();
        let mut degenerate_run = 0;
        loop {
            let e = if degenerate_run >= DEGENERATE_RUN_LIMIT {
                (0..self.active_cols).find(|&j| self.reduced[j].is_negative())
            } else {
                (0..self.active_cols)
                    .filter(|&j| self.reduced[j].is_negative())
                    .min_by(|&a, &b| self.reduced[a].cmp(&self.reduced[b]).then(a.cmp(&b)))
            };
            let e = e?;
            let mut best: Option<(usize, Rational)> = None;
            for (i, line) in self.rows.iter().enumerate() {
                if !line[e].is_positive() {
                    continue;
                }
                let ratio = &line[rhs] / &line[e];
                let better = match &best {
                    None => true,
                    Some((bi, br)) => ratio < *br || (ratio == *br && self.basis[i] < self.basis[*bi]),
                };
                if better {
                    best = Some((i, ratio));
                }
            }
            match best {
                Some((r, ratio)) => {
                    degenerate_run = if ratio.is_zero() { degenerate_run + 1 } else { 0 };
                    self.pivot(r, e);
                }
                None => return Some(e),
            }
        }
    }

    fn primal(&self, ncols: usize) -> Vec<Rational> {
        let mut y = vec![Rational::zero(); ncols];
        let rhs = self.width();
        for (i, &b) in self.basis.iter().enumerate() {
            if b < ncols {
                y[b] = self.rows[i][rhs].clone();
            }
        }
        y
    }
}

impl StandardForm {
    fn solve(self) -> StandardOutcome {
        let StandardForm { mut matrix, mut rhs, cost } = self;
        let ncols = cost.len();
        let m = matrix.len();
        for (line, b) in matrix.iter_mut().zip(rhs.iter_mut()) {
            if b.is_negative() {
                for v in line.iter_mut() {
                    *v = -&*v;
                }
                *b = -&*b;
            }
        }

        // Reuse unit columns as the starting basis where possible; the
        // remaining rows get artificial variables.
        let mut basis: Vec<Option<usize>> = vec![None; m];
        let mut used = vec![false; ncols];
        for j in 0..ncols {
            let mut unit_row = None;
            let mut is_unit = true;
            for (i, line) in matrix.iter().enumerate() {
                if line[j].is_zero() {
                    continue;
                }
                if line[j] == Rational::one() && unit_row.is_none() {
                    unit_row = Some(i);
                } else {
                    is_unit = false;
                    break;
                }
            }
            if let (true, Some(i)) = (is_unit, unit_row) {
                if basis[i].is_none() && !used[j] {
                    basis[i] = Some(j);
                    used[j] = true;
                }
            }
        }
        let artificial_rows: Vec<usize> = (0..m).filter(|&i| basis[i].is_none()).collect();
        let total = ncols + artificial_rows.len();
        let mut rows = Vec::with_capacity(m);
        for (i, (line, b)) in matrix.into_iter().zip(rhs).enumerate() {
            let mut full = line;
            full.extend((0..artificial_rows.len()).map(|k| {
                if artificial_rows[k] == i {
                    Rational::one()
                } else {
                    Rational::zero()
                }
            }));
            full.push(b);
            rows.push(full);
        }
        for (k, &i) in artificial_rows.iter().enumerate() {
            basis[i] = Some(ncols + k);
        }
        let basis: Vec<usize> = basis.into_iter().map(|b| b.expect("every row has a basic column")).collect();

        let mut reduced = vec![Rational::zero(); total + 1];
        for &i in &artificial_rows {
            for j in 0..ncols {
                reduced[j] -= &rows[i][j];
            }
            reduced[total] -= &rows[i][total];
        }
        let mut tab = Tableau { rows, reduced, basis, active_cols: total };
        if !artificial_rows.is_empty() {
            tab.optimize();
            if !tab.reduced[total].is_zero() {
                return StandardOutcome::Infeasible;
            }
            // Drive remaining (zero-valued) artificials out of the basis.
            let mut i = 0;
            while i < tab.rows.len() {
                if tab.basis[i] >= ncols {
                    match (0..ncols).find(|&j| !tab.rows[i][j].is_zero()) {
                        Some(j) => tab.pivot(i, j),
                        None => {
                            tab.rows.remove(i);
                            tab.basis.remove(i);
                            continue;
                        }
                    }
                }
                i += 1;
            }
            for line in tab.rows.iter_mut() {
                let b = line.pop().expect("row has a right-hand side");
                line.truncate(ncols);
                line.push(b);
            }
        }

        // Phase two: reduced costs of the real objective.
        let mut reduced: Vec<Rational> = cost.clone();
        reduced.push(Rational::zero());
        for (i, &b) in tab.basis.iter().enumerate() {
            let cb = &cost[b];
            if cb.is_zero() {
                continue;
            }
            for j in 0..=ncols {
                if !tab.rows[i][j].is_zero() {
                    let delta = cb * &tab.rows[i][j];
                    reduced[j] -= &delta;
                }
            }
        }
        tab.reduced = reduced;
        tab.active_cols = ncols;
        match tab.optimize() {
            None => StandardOutcome::Optimal(tab.primal(ncols)),
            Some(e) => {
                let mut ray = vec![Rational::zero(); ncols];
                ray[e] = Rational::one();
                for (i, &b) in tab.basis.iter().enumerate() {
                    ray[b] = -&tab.rows[i][e];
                }
                StandardOutcome::Unbounded(ray)
            }
        }
    }
}
