//! Core points: integer points whose orbit polytope contains no integer
//! points other than the orbit itself.
//!
//! For products of symmetric, alternating and trivial blocks every fiber has
//! exactly one core point up to symmetry, built per block as `q * 1` plus
//! ones on the first `r` positions where `s_i = q * k_i + r`. For arbitrary
//! permutation groups the brute-force oracle [`is_core_point`] decides the
//! property by scanning the bounding box of the orbit.

use std::collections::HashSet;

use rayon::prelude::*;
use thiserror::Error;

use crate::arith::{ArithError, RatVector};
use crate::group::{orbit_of_vector, BlockGroup, FiberIndex, GroupError, Permutation, DEFAULT_ORBIT_CAP};
use crate::lp::{hull_membership, LpError};
use crate::model::Instance;

/// Default bound on the number of integer points in a scanned box.
pub const DEFAULT_BOX_CAP: u128 = 100_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CoreError {
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Lp(#[from] LpError),
    #[error(transparent)]
    Arith(#[from] ArithError),
    #[error("box holds more than {cap} integer points")]
    BoxCap { cap: u128 },
    #[error("empty point set")]
    Empty,
    #[error("cyclic construction needs an even n >= 4 and n/2 - 1 parameters (got n = {n}, {params} parameters)")]
    CyclicParams { n: usize, params: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleCaps {
    pub orbit: usize,
    pub box_points: u128,
}

impl Default for OracleCaps {
    fn default() -> Self {
        OracleCaps { orbit: DEFAULT_ORBIT_CAP, box_points: DEFAULT_BOX_CAP }
    }
}

/// The canonical core point of a fiber.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoreRep {
    pub z: Vec<i64>,
    pub fiber: FiberIndex,
}

pub fn fiber_rep(g: &BlockGroup, s: &FiberIndex) -> CoreRep {
    assert_eq!(s.len(), g.d(), "fiber index has one entry per block");
    let mut z = vec![0i64; g.n()];
    for (block, &sum) in g.blocks().iter().zip(&s.0) {
        let k = block.size() as i64;
        let (q, r) = (sum.div_euclid(k), sum.rem_euclid(k));
        for (pos, &c) in block.coords.iter().enumerate() {
            z[c] = if (pos as i64) < r { q + 1 } else { q };
        }
    }
    CoreRep { z, fiber: s.clone() }
}

/// The representative of fiber `s` if it satisfies every row of `inst`.
///
/// For block-product groups the fiber meets the integer hull of the feasible
/// region exactly when this single point is feasible. Extra generators are
/// ignored.
pub fn fiber_feasible(inst: &Instance, s: &FiberIndex) -> Option<Vec<i64>> {
    let rep = fiber_rep(inst.group(), s);
    inst.contains_int(&rep.z).then_some(rep.z)
}

fn box_volume(lo: &[i64], hi: &[i64]) -> u128 {
    lo.iter().zip(hi).fold(1u128, |acc, (&l, &h)| acc.saturating_mul((h - l + 1).max(0) as u128))
}

/// First integer point (closest to the centroid, then lexicographically) of
/// `conv(points)` that is not one of `points`.
pub fn hull_integer_witness(points: &[Vec<i64>], caps: &OracleCaps) -> Result<Option<Vec<i64>>, CoreError> {
    let first = points.first().ok_or(CoreError::Empty)?;
    let n = first.len();
    if let Some(p) = points.iter().find(|p| p.len() != n) {
        return Err(ArithError::LengthMismatch { expected: n, found: p.len() }.into());
    }
    let m = points.len() as i128;
    let lo: Vec<i64> = (0..n).map(|i| points.iter().map(|p| p[i]).min().unwrap()).collect();
    let hi: Vec<i64> = (0..n).map(|i| points.iter().map(|p| p[i]).max().unwrap()).collect();
    if box_volume(&lo, &hi) > caps.box_points {
        return Err(CoreError::BoxCap { cap: caps.box_points });
    }
    // Work with m * x - sum(points) so the centroid becomes the origin.
    let centroid: Vec<i128> = (0..n).map(|i| points.iter().map(|p| p[i] as i128).sum()).collect();
    let scaled_sq = |x: &[i64]| -> i128 { x.iter().zip(&centroid).map(|(&v, c)| (m * v as i128 - c).pow(2)).sum() };
    // The hull lies in the ball through its farthest point; a point on that
    // sphere is in the hull only if it is one of the points.
    let radius_sq = points.iter().map(|p| scaled_sq(p)).max().unwrap();
    let sums: Vec<i64> = points.iter().map(|p| p.iter().sum()).collect();
    let (sum_lo, sum_hi) = (*sums.iter().min().unwrap(), *sums.iter().max().unwrap());

    let min_sq: Vec<i128> = (0..n)
        .map(|i| {
            let (l, h, c) = (m * lo[i] as i128, m * hi[i] as i128, centroid[i]);
            if c < l {
                (l - c).pow(2)
            } else if c > h {
                (c - h).pow(2)
            } else {
                // Nearest multiple of m to c within the box.
                let below = c.div_euclid(m) * m;
                (c - below).pow(2).min((below + m - c).pow(2))
            }
        })
        .collect();
    let mut rest_sq = vec![0i128; n + 1];
    let mut rest_lo = vec![0i64; n + 1];
    let mut rest_hi = vec![0i64; n + 1];
    for i in (0..n).rev() {
        rest_sq[i] = rest_sq[i + 1] + min_sq[i];
        rest_lo[i] = rest_lo[i + 1] + lo[i];
        rest_hi[i] = rest_hi[i + 1] + hi[i];
    }

    let members: HashSet<&[i64]> = points.iter().map(Vec::as_slice).collect();
    let mut candidates: Vec<(i128, Vec<i64>)> = Vec::new();
    let mut x = vec![0i64; n];
    let ctx = Scan { lo: &lo, hi: &hi, centroid: &centroid, m, radius_sq, sum_lo, sum_hi, rest_sq, rest_lo, rest_hi };
    ctx.scan(0, 0, 0, &mut x, &mut |x, dist| {
        if !members.contains(x) {
            candidates.push((dist, x.to_vec()));
        }
    });
    candidates.sort();
    let generators: Vec<RatVector> = points.iter().map(|p| RatVector::from_ints(p)).collect();
    let found = candidates
        .par_iter()
        .map(|(_, x)| hull_membership(&RatVector::from_ints(x), &generators).map(|inside| inside.then(|| x.clone())))
        .find_first(|res| !matches!(res, Ok(None)));
    match found {
        None => Ok(None),
        Some(res) => Ok(res?),
    }
}

struct Scan<'a> {
    lo: &'a [i64],
    hi: &'a [i64],
    centroid: &'a [i128],
    m: i128,
    radius_sq: i128,
    sum_lo: i64,
    sum_hi: i64,
    rest_sq: Vec<i128>,
    rest_lo: Vec<i64>,
    rest_hi: Vec<i64>,
}

impl Scan<'_> {
    /// Visits box points strictly inside the ball whose coordinate sum lies
    /// in the range spanned by the points.
    fn scan(&self, i: usize, sq: i128, sum: i64, x: &mut Vec<i64>, visit: &mut impl FnMut(&[i64], i128)) {
        if i == x.len() {
            if sq < self.radius_sq && (self.sum_lo..=self.sum_hi).contains(&sum) {
                visit(x, sq);
            }
            return;
        }
        for v in self.lo[i]..=self.hi[i] {
            let here = sq + (self.m * v as i128 - self.centroid[i]).pow(2);
            if here + self.rest_sq[i + 1] >= self.radius_sq {
                continue;
            }
            let s = sum + v;
            if s + self.rest_lo[i + 1] > self.sum_hi || s + self.rest_hi[i + 1] < self.sum_lo {
                continue;
            }
            x[i] = v;
            self.scan(i + 1, here, s, x, visit);
        }
    }
}

/// Whether `conv(orbit of z)` contains no integer points besides the orbit.
pub fn is_core_point(generators: &[Permutation], z: &[i64], caps: &OracleCaps) -> Result<bool, CoreError> {
    let orbit = orbit_of_vector(generators, z, caps.orbit)?;
    Ok(hull_integer_witness(&orbit, caps)?.is_none())
}

/// Core points in the box `[lo, hi]`, optionally on the hyperplane
/// `sum(z) = k`, in lexicographic order.
pub fn enumerate_core_points_in_box(
    generators: &[Permutation],
    lo: &[i64],
    hi: &[i64],
    hyperplane_k: Option<i64>,
    caps: &OracleCaps,
) -> Result<Vec<Vec<i64>>, CoreError> {
    if lo.len() != hi.len() {
        return Err(ArithError::LengthMismatch { expected: lo.len(), found: hi.len() }.into());
    }
    if box_volume(lo, hi) > caps.box_points {
        return Err(CoreError::BoxCap { cap: caps.box_points });
    }
    let n = lo.len();
    let mut points = Vec::new();
    let mut x = lo.to_vec();
    if lo.iter().zip(hi).all(|(l, h)| l <= h) {
        loop {
            if hyperplane_k.is_none_or(|k| x.iter().sum::<i64>() == k) {
                points.push(x.clone());
            }
            let mut j = n;
            while j > 0 && x[j - 1] == hi[j - 1] {
                x[j - 1] = lo[j - 1];
                j -= 1;
            }
            if j == 0 {
                break;
            }
            x[j - 1] += 1;
        }
    }
    let verdicts: Vec<bool> =
        points.par_iter().map(|z| is_core_point(generators, z, caps)).collect::<Result<_, _>>()?;
    Ok(points.into_iter().zip(verdicts).filter_map(|(z, core)| core.then_some(z)).collect())
}

/// `(1, a_2, ..., a_m, 0, -a_2, ..., -a_m)` for `n = 2m`.
pub fn cyclic_example_point(n: usize, a: &[i64]) -> Result<Vec<i64>, CoreError> {
    if n < 4 || n % 2 != 0 || a.len() != n / 2 - 1 {
        return Err(CoreError::CyclicParams { n, params: a.len() });
    }
    let mut z = Vec::with_capacity(n);
    z.push(1);
    z.extend_from_slice(a);
    z.push(0);
    z.extend(a.iter().map(|v| -v));
    Ok(z)
}

/// The cyclic shift generating `Z/n` on `0..n`.
pub fn cyclic_generator(n: usize) -> Permutation {
    Permutation::new((0..n).map(|i| (i + 1) % n).collect()).expect("shift is a permutation")
}
