//! Brute-force oracles shared by the integration tests. They only use the
//! instance rows and plain integer enumeration.

#![allow(dead_code)]

use symcore::{Instance, Rational};

/// Upper bounds `x_i <= u_i` implied by rows whose coefficients are all
/// nonnegative, provided the instance also has every row `x_i >= 0`.
pub fn nonneg_upper(inst: &Instance) -> Option<Vec<Rational>> {
    let n = inst.n();
    let mut upper: Vec<Option<Rational>> = vec![None; n];
    for row in inst.rows() {
        if row.a.iter().any(|v| v.is_negative()) {
            continue;
        }
        for (i, a) in row.a.iter().enumerate() {
            if a.is_positive() {
                let u = &row.b / a;
                if upper[i].as_ref().is_none_or(|old| u < *old) {
                    upper[i] = Some(u);
                }
            }
        }
    }
    let nonneg = (0..n).all(|i| {
        inst.rows().iter().any(|row| {
            row.b.is_zero() && row.a.iter().enumerate().all(|(j, v)| if j == i { v.is_negative() } else { v.is_zero() })
        })
    });
    if !nonneg {
        return None;
    }
    upper.into_iter().collect()
}

/// Integer box `0 <= x <= u` holding every feasible integer point.
pub fn nonneg_box(inst: &Instance) -> Option<Vec<i64>> {
    nonneg_upper(inst)?.iter().map(|u| u.floor().to_i64()).collect()
}

/// Calls `visit` on every integer point of `[lo, hi]` in lexicographic order.
pub fn for_each_in_box(lo: &[i64], hi: &[i64], mut visit: impl FnMut(&[i64])) {
    let n = lo.len();
    if lo.iter().zip(hi).any(|(l, h)| l > h) {
        return;
    }
    let mut x = lo.to_vec();
    loop {
        visit(&x);
        let mut j = n;
        while j > 0 && x[j - 1] == hi[j - 1] {
            x[j - 1] = lo[j - 1];
            j -= 1;
        }
        if j == 0 {
            return;
        }
        x[j - 1] += 1;
    }
}

/// Optimal value of the instance by scanning its bounding box, or `None` if
/// no integer point is feasible.
pub fn brute_force_optimum(inst: &Instance) -> Option<Rational> {
    let hi = nonneg_box(inst).expect("instance has a nonnegative bounding box");
    let lo = vec![0; inst.n()];
    let mut best: Option<Rational> = None;
    for_each_in_box(&lo, &hi, |z| {
        if inst.contains_int(z) {
            let v = inst.objective_value_int(z);
            if best.as_ref().is_none_or(|b| v > *b) {
                best = Some(v);
            }
        }
    });
    best
}

/// Block sums `s` whose fixed-space point `(s_i / k_i, ...)` satisfies every
/// row of the instance, in lexicographic order.
pub fn fixed_space_lattice_points(inst: &Instance) -> Vec<Vec<i64>> {
    let group = inst.group();
    let upper = nonneg_upper(inst).expect("instance has a nonnegative bounding box");
    let sizes: Vec<i64> = group.blocks().iter().map(|b| b.size() as i64).collect();
    let hi: Vec<i64> = group
        .blocks()
        .iter()
        .zip(&sizes)
        .map(|(b, &k)| {
            let u = b.coords.iter().map(|&c| upper[c].clone()).min().unwrap();
            (u * Rational::from_integer(k)).floor().to_i64().unwrap()
        })
        .collect();
    let lo = vec![0; hi.len()];
    let mut out = Vec::new();
    for_each_in_box(&lo, &hi, |s| {
        let mut x = vec![Rational::zero(); inst.n()];
        for ((block, &si), &k) in group.blocks().iter().zip(s).zip(&sizes) {
            for &c in &block.coords {
                x[c] = Rational::new(si, k).unwrap();
            }
        }
        let x = symcore::RatVector::from(x);
        if inst.rows().iter().all(|row| row.is_satisfied_by(&x).unwrap()) {
            out.push(s.to_vec());
        }
    });
    out
}
