//! Core-set parametrization of block-symmetric programs.
//!
//! Every fiber representative of a block `B` with values in `{q, q+1}` and the
//! larger values first can be written as `t * 1 + sum_j s_j * c(j)`, where
//! `c(j)` is the indicator of the first `j` positions of the block, `t` is an
//! integer and the `s_j` are binaries with `sum_j s_j <= 1`. Substituting this
//! into a row and taking the block-descending rearrangement of its
//! coefficients yields a single row that dominates the whole row orbit, so
//! one row per orbit remains.

use std::cmp::Ordering;
use std::collections::HashSet;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use num_bigint::BigInt;
use num_traits::{One, Signed};
use serde::Serialize;
use thiserror::Error;

use crate::arith::{lcm_of_denominators, RatVector, Rational, Row};
use crate::group::BlockGroup;
use crate::model::{validate_symmetry, Instance};

#[derive(Debug, Error)]
pub enum TransformError {
    #[error("instance is not symmetric under its group ({violations} violations)")]
    NotSymmetric { violations: usize },
    #[error("assignment has {found} values, expected {expected}")]
    Length { expected: usize, found: usize },
    #[error("assignment violates the structural rows of block {block}")]
    Structural { block: usize },
    #[error("cannot write {path}: {source}")]
    Io { path: String, source: std::io::Error },
}

/// `a` with the coefficients of every block rearranged in non-increasing
/// order along the block's coordinate list.
pub fn sort_block_descending(a: &RatVector, g: &BlockGroup) -> RatVector {
    let mut out = a.to_vec();
    for block in g.blocks() {
        let mut values: Vec<Rational> = block.coords.iter().map(|&c| a[c].clone()).collect();
        values.sort_by(|x, y| y.cmp(x));
        for (&c, v) in block.coords.iter().zip(values) {
            out[c] = v;
        }
    }
    RatVector::from(out)
}

/// A program over the variables `t_i, s_{i,1}, ..., s_{i,k_i - 1}` of every
/// block `i`, laid out block by block.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TransformedInstance {
    /// Substituted original rows, sorted lexicographically.
    pub model_rows: Vec<Row>,
    /// `sum_j s_{i,j} <= 1` and `-s_{i,j} <= 0` for every block with `k_i >= 2`.
    pub structural_rows: Vec<Row>,
    /// Model rows followed by structural rows.
    pub rows: Vec<Row>,
    pub objective: RatVector,
    /// Coordinates of each original block, in the order the parametrization
    /// fills them.
    pub blocks: Vec<Vec<usize>>,
    /// Index of `t_i`; `s_{i,j}` sits at `offsets[i] + j`.
    pub offsets: Vec<usize>,
}

impl TransformedInstance {
    pub fn num_vars(&self) -> usize {
        self.blocks.iter().map(Vec::len).sum()
    }

    pub fn t_index(&self, block: usize) -> usize {
        self.offsets[block]
    }

    pub fn s_index(&self, block: usize, j: usize) -> usize {
        assert!(j >= 1 && j < self.blocks[block].len(), "s index out of range");
        self.offsets[block] + j
    }

    pub fn is_binary(&self, var: usize) -> bool {
        !self.offsets.contains(&var)
    }

    pub fn var_names(&self) -> Vec<String> {
        let mut names = Vec::with_capacity(self.num_vars());
        for (i, block) in self.blocks.iter().enumerate() {
            names.push(format!("t{i}"));
            for j in 1..block.len() {
                names.push(format!("s{i}_{j}"));
            }
        }
        names
    }
}

/// Substitutes the parametrization into a block-sorted vector: the
/// coefficient of `t_i` is the block sum and that of `s_{i,j}` the sum of the
/// first `j` block entries.
fn substitute(sorted: &RatVector, blocks: &[Vec<usize>]) -> RatVector {
    let mut out = Vec::with_capacity(sorted.len());
    for coords in blocks {
        out.push(coords.iter().map(|&c| &sorted[c]).sum());
        let mut prefix = Rational::zero();
        for &c in &coords[..coords.len() - 1] {
            prefix += &sorted[c];
            out.push(prefix.clone());
        }
    }
    RatVector::from(out)
}

fn row_order(x: &Row, y: &Row) -> Ordering {
    x.a.as_slice().cmp(y.a.as_slice()).then_with(|| x.b.cmp(&y.b))
}

pub fn transform_instance(inst: &Instance) -> Result<TransformedInstance, TransformError> {
    let report = validate_symmetry(inst);
    if !report.is_symmetric {
        return Err(TransformError::NotSymmetric { violations: report.witnesses.len() });
    }
    let group = inst.group();
    let blocks: Vec<Vec<usize>> = group.blocks().iter().map(|b| b.coords.clone()).collect();
    let mut offsets = Vec::with_capacity(blocks.len());
    let mut next = 0;
    for coords in &blocks {
        offsets.push(next);
        next += coords.len();
    }
    let n = next;

    let mut seen = HashSet::new();
    let mut model_rows = Vec::new();
    for row in inst.rows() {
        let sorted = sort_block_descending(&row.a, group);
        let key = Row::new(sorted, row.b.clone());
        if seen.insert(key.clone()) {
            model_rows.push(Row::new(substitute(&key.a, &blocks), key.b));
        }
    }
    model_rows.sort_by(row_order);

    let mut structural_rows = Vec::new();
    for (coords, &offset) in blocks.iter().zip(&offsets) {
        let k = coords.len();
        if k < 2 {
            continue;
        }
        let mut sum = vec![Rational::zero(); n];
        for v in &mut sum[offset + 1..offset + k] {
            *v = Rational::one();
        }
        structural_rows.push(Row::new(RatVector::from(sum), Rational::one()));
        for j in 1..k {
            let mut e = vec![Rational::zero(); n];
            e[offset + j] = -Rational::one();
            structural_rows.push(Row::new(RatVector::from(e), Rational::zero()));
        }
    }

    let objective = substitute(&sort_block_descending(inst.objective(), group), &blocks);
    let mut rows = model_rows.clone();
    rows.extend(structural_rows.iter().cloned());
    Ok(TransformedInstance { model_rows, structural_rows, rows, objective, blocks, offsets })
}

/// Maps an assignment of the transformed variables to the original point:
/// position `l` of block `i` receives `t_i + sum_{j >= l} s_{i,j}`.
pub fn lift_solution(ti: &TransformedInstance, assignment: &[i64]) -> Result<Vec<i64>, TransformError> {
    if assignment.len() != ti.num_vars() {
        return Err(TransformError::Length { expected: ti.num_vars(), found: assignment.len() });
    }
    let mut z = vec![0; ti.num_vars()];
    for (i, (coords, &offset)) in ti.blocks.iter().zip(&ti.offsets).enumerate() {
        let t = assignment[offset];
        let s = &assignment[offset + 1..offset + coords.len()];
        if s.iter().any(|&v| v != 0 && v != 1) || s.iter().sum::<i64>() > 1 {
            return Err(TransformError::Structural { block: i });
        }
        for (l, &c) in coords.iter().enumerate() {
            z[c] = t + s[l.min(s.len())..].iter().sum::<i64>();
        }
    }
    Ok(z)
}

/// A pure or mixed integer program ready to be written in LP text format.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExportModel {
    pub var_names: Vec<String>,
    pub rows: Vec<Row>,
    pub objective: RatVector,
    pub binary: Vec<bool>,
}

impl From<&TransformedInstance> for ExportModel {
    fn from(ti: &TransformedInstance) -> Self {
        ExportModel {
            var_names: ti.var_names(),
            rows: ti.rows.clone(),
            objective: ti.objective.clone(),
            binary: (0..ti.num_vars()).map(|v| ti.is_binary(v)).collect(),
        }
    }
}

impl From<&Instance> for ExportModel {
    fn from(inst: &Instance) -> Self {
        ExportModel {
            var_names: (0..inst.n()).map(|i| format!("x{i}")).collect(),
            rows: inst.rows().to_vec(),
            objective: inst.objective().clone(),
            binary: vec![false; inst.n()],
        }
    }
}

/// Integer multiples of `values` by the LCM of their denominators.
fn scaled(values: &[&Rational]) -> (BigInt, Vec<BigInt>) {
    let scale = lcm_of_denominators(values.iter().copied());
    let ints = values.iter().map(|v| v.numer() * (&scale / v.denom())).collect();
    (scale, ints)
}

fn write_terms(out: &mut String, coeffs: &[BigInt], names: &[String]) {
    let mut first = true;
    for (c, name) in coeffs.iter().zip(names) {
        if c.sign() == num_bigint::Sign::NoSign {
            continue;
        }
        let sign = match (first, c.is_negative()) {
            (true, false) => "",
            (true, true) => "-",
            (false, false) => "+ ",
            (false, true) => "- ",
        };
        let magnitude = c.abs();
        if magnitude.is_one() {
            let _ = write!(out, " {sign}{name}");
        } else {
            let _ = write!(out, " {sign}{magnitude} {name}");
        }
        first = false;
    }
    if first {
        if let Some(name) = names.first() {
            let _ = write!(out, " 0 {name}");
        }
    }
}

/// Renders the model in LP text format. Rows and the objective are scaled by
/// the LCM of their denominators so every coefficient is an integer.
pub fn write_lp_string(model: &ExportModel) -> String {
    let mut out = String::new();
    let (obj_scale, obj) = scaled(&model.objective.iter().collect::<Vec<_>>());
    if !obj_scale.is_one() {
        let _ = writeln!(out, "\\ objective multiplied by {obj_scale}");
    }
    out.push_str("Maximize\n obj:");
    write_terms(&mut out, &obj, &model.var_names);
    out.push_str("\nSubject To\n");
    for (i, row) in model.rows.iter().enumerate() {
        let mut values: Vec<&Rational> = row.a.iter().collect();
        values.push(&row.b);
        let (_, ints) = scaled(&values);
        let _ = write!(out, " c{i}:");
        write_terms(&mut out, &ints[..ints.len() - 1], &model.var_names);
        let _ = writeln!(out, " <= {}", ints[ints.len() - 1]);
    }
    out.push_str("Bounds\n");
    for (name, _) in model.var_names.iter().zip(&model.binary).filter(|(_, &b)| !b) {
        let _ = writeln!(out, " {name} free");
    }
    let generals: Vec<&str> =
        model.var_names.iter().zip(&model.binary).filter(|(_, &b)| !b).map(|(n, _)| n.as_str()).collect();
    let binaries: Vec<&str> =
        model.var_names.iter().zip(&model.binary).filter(|(_, &b)| b).map(|(n, _)| n.as_str()).collect();
    if !generals.is_empty() {
        let _ = writeln!(out, "Generals\n {}", generals.join(" "));
    }
    if !binaries.is_empty() {
        let _ = writeln!(out, "Binaries\n {}", binaries.join(" "));
    }
    out.push_str("End\n");
    out
}

pub fn export_model(model: &ExportModel, path: impl AsRef<Path>) -> Result<(), TransformError> {
    let path = path.as_ref();
    fs::write(path, write_lp_string(model))
        .map_err(|source| TransformError::Io { path: path.display().to_string(), source })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat;

    fn running() -> Instance {
        Instance::new(
            2,
            vec![Row::from_ints(&[-1, -1], -3), Row::from_ints(&[1, 2], 5), Row::from_ints(&[2, 1], 5)],
            RatVector::from_ints(&[1, 1]),
            BlockGroup::symmetric_blocks(&[2]),
        )
        .unwrap()
    }

    #[test]
    fn sorting_examples() {
        let g3 = BlockGroup::symmetric_blocks(&[3]);
        assert_eq!(sort_block_descending(&RatVector::from_ints(&[2, 5, 3]), &g3), RatVector::from_ints(&[5, 3, 2]));
        assert_eq!(sort_block_descending(&RatVector::from_ints(&[0, 0, -1]), &g3), RatVector::from_ints(&[0, 0, -1]));
        let g22 = BlockGroup::symmetric_blocks(&[2, 2]);
        assert_eq!(
            sort_block_descending(&RatVector::from_ints(&[1, 4, 2, 9]), &g22),
            RatVector::from_ints(&[4, 1, 9, 2])
        );
    }

    #[test]
    fn running_example() {
        let ti = transform_instance(&running()).unwrap();
        assert_eq!(ti.model_rows, vec![Row::from_ints(&[-2, -1], -3), Row::from_ints(&[3, 2], 5)]);
        assert_eq!(ti.structural_rows, vec![Row::from_ints(&[0, 1], 1), Row::from_ints(&[0, -1], 0)]);
        assert_eq!(ti.objective, RatVector::from_ints(&[2, 1]));
        assert_eq!(ti.var_names(), vec!["t0", "s0_1"]);
    }

    #[test]
    fn bound_and_constant_rows() {
        let g = BlockGroup::symmetric_blocks(&[3]);
        let mut rows = Vec::new();
        for j in 0..3 {
            let mut e = vec![0; 3];
            e[j] = -1;
            rows.push(Row::from_ints(&e, 0));
        }
        rows.push(Row::from_ints(&[2, 2, 2], 7));
        let inst = Instance::new(3, rows, RatVector::from_ints(&[1, 1, 1]), g).unwrap();
        let ti = transform_instance(&inst).unwrap();
        // -t <= 0, and 2 * (3t + s1 + 2 s2) <= 7.
        assert_eq!(ti.model_rows, vec![Row::from_ints(&[-1, 0, 0], 0), Row::from_ints(&[6, 2, 4], 7)]);
        assert_eq!(ti.structural_rows.len(), 3);
    }

    #[test]
    fn asymmetric_is_rejected() {
        let inst = Instance::new(
            2,
            vec![Row::from_ints(&[1, 2], 5)],
            RatVector::from_ints(&[1, 1]),
            BlockGroup::symmetric_blocks(&[2]),
        )
        .unwrap();
        assert!(matches!(transform_instance(&inst), Err(TransformError::NotSymmetric { .. })));
    }

    #[test]
    fn lift_examples() {
        let ti2 = transform_instance(&running()).unwrap();
        assert_eq!(lift_solution(&ti2, &[1, 1]).unwrap(), vec![2, 1]);
        assert_eq!(lift_solution(&ti2, &[0, 0]).unwrap(), vec![0, 0]);
        assert!(matches!(lift_solution(&ti2, &[0, 2]), Err(TransformError::Structural { block: 0 })));

        let g3 = BlockGroup::symmetric_blocks(&[3]);
        let inst = Instance::new(3, vec![], RatVector::from_ints(&[1, 1, 1]), g3).unwrap();
        let ti3 = transform_instance(&inst).unwrap();
        assert_eq!(lift_solution(&ti3, &[0, 0, 1]).unwrap(), vec![1, 1, 0]);
        assert!(lift_solution(&ti3, &[0, 1, 1]).is_err());
        assert!(lift_solution(&ti3, &[0, 1]).is_err());
    }

    #[test]
    fn lift_matches_substitution() {
        // <a, lift(t, s)> equals <substitute(a), (t, s)> for sorted rows.
        let g = BlockGroup::symmetric_blocks(&[3, 1, 2]);
        let inst = Instance::new(6, vec![], RatVector::from_ints(&[1; 6]), g.clone()).unwrap();
        let ti = transform_instance(&inst).unwrap();
        let a = sort_block_descending(&RatVector::from_ints(&[4, -2, 7, 3, 0, 5]), &g);
        let sub = substitute(&a, &ti.blocks);
        for assignment in [[2, 0, 1, -1, 5, 0], [-3, 1, 0, 4, 2, 1], [0, 0, 0, 0, 0, 0]] {
            let z = lift_solution(&ti, &assignment).unwrap();
            assert_eq!(a.dot_int(&z).unwrap(), sub.dot_int(&assignment).unwrap());
        }
    }

    #[test]
    fn lp_export_running() {
        let ti = transform_instance(&running()).unwrap();
        let text = write_lp_string(&ExportModel::from(&ti));
        assert_eq!(
            text,
            "Maximize\n obj: 2 t0 + s0_1\nSubject To\n c0: -2 t0 - s0_1 <= -3\n c1: 3 t0 + 2 s0_1 <= 5\n \
             c2: s0_1 <= 1\n c3: -s0_1 <= 0\nBounds\n t0 free\nGenerals\n t0\nBinaries\n s0_1\nEnd\n"
        );
    }

    #[test]
    fn lp_export_scaling_and_empty() {
        let row = Row::new(RatVector::from(vec![rat(1, 2).unwrap(), Rational::one()]), rat(3, 2).unwrap());
        let inst = Instance::new(2, vec![row], RatVector::from_ints(&[0, 0]), BlockGroup::trivial(2)).unwrap();
        let text = write_lp_string(&ExportModel::from(&inst));
        assert!(text.contains(" c0: x0 + 2 x1 <= 3\n"), "{text}");
        assert!(text.contains(" obj: 0 x0\n"));

        let empty = Instance::new(1, vec![], RatVector::from_ints(&[3]), BlockGroup::trivial(1)).unwrap();
        let text = write_lp_string(&ExportModel::from(&empty));
        assert_eq!(text, "Maximize\n obj: 3 x0\nSubject To\nBounds\n x0 free\nGenerals\n x0\nEnd\n");
    }

    #[test]
    fn export_writes_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("model.lp");
        let ti = transform_instance(&running()).unwrap();
        export_model(&ExportModel::from(&ti), &path).unwrap();
        assert!(fs::read_to_string(&path).unwrap().ends_with("End\n"));
    }
}
