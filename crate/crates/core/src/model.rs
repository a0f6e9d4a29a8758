//! Integer linear programs `max <c, x>  s.t.  Ax <= b, x in Z^n` together with
//! a block-product symmetry group, plus the JSON instance file format.

use std::collections::HashSet;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arith::{RatVector, Rational, Row};
use crate::group::{parse_group, BlockGroup, GroupError, GroupSpec, Permutation};

/// Default bound on the number of rows produced by orbit closure.
pub const DEFAULT_ROW_CAP: usize = 5_000_000;

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("row {row} has {found} coefficients, expected {n}")]
    RowLength { row: usize, found: usize, n: usize },
    #[error("objective has {found} coefficients, expected {n}")]
    ObjectiveLength { found: usize, n: usize },
    #[error("unsupported sense {0:?}, only \"max\" is supported")]
    Sense(String),
    #[error("invalid group: {0}")]
    Group(#[from] GroupError),
    #[error("orbit closure exceeds the cap of {cap} rows")]
    RowCap { cap: usize },
}

/// On-disk layout of an instance.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InstanceFile {
    pub n: usize,
    pub rows: Vec<Row>,
    pub objective: RatVector,
    #[serde(default = "default_sense")]
    pub sense: String,
    pub group: GroupSpec,
}

fn default_sense() -> String {
    "max".to_string()
}

/// A validated, deduplicated pure integer program (maximization).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    n: usize,
    rows: Vec<Row>,
    objective: RatVector,
    group: BlockGroup,
}

impl Instance {
    /// Checks dimensions and drops repeated rows, keeping first occurrences.
    pub fn new(n: usize, rows: Vec<Row>, objective: RatVector, group: BlockGroup) -> Result<Self, ModelError> {
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(ModelError::RowLength { row: i, found: row.len(), n });
            }
        }
        if objective.len() != n {
            return Err(ModelError::ObjectiveLength { found: objective.len(), n });
        }
        if group.n() != n {
            return Err(GroupError::Uncovered(group.n().min(n)).into());
        }
        Ok(Instance { n, rows: dedup_rows(rows), objective, group })
    }

    pub fn from_file_data(file: InstanceFile) -> Result<Self, ModelError> {
        if file.sense != "max" {
            return Err(ModelError::Sense(file.sense));
        }
        let group = parse_group(&file.group, Some(file.n))?;
        Instance::new(file.n, file.rows, file.objective, group)
    }

    pub fn from_json(text: &str) -> Result<Self, ModelError> {
        let file: InstanceFile = serde_json::from_str(text).map_err(|e| ModelError::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
        Instance::from_file_data(file)
    }

    pub fn to_file_data(&self) -> InstanceFile {
        InstanceFile {
            n: self.n,
            rows: self.rows.clone(),
            objective: self.objective.clone(),
            sense: default_sense(),
            group: self.group.to_spec(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_file_data()).expect("instance serializes")
    }

    pub fn store(&self, path: impl AsRef<Path>) -> Result<(), ModelError> {
        let path = path.as_ref();
        fs::write(path, self.to_json() + "\n")
            .map_err(|source| ModelError::Io { path: path.display().to_string(), source })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn rows(&self) -> &[Row] {
        &self.rows
    }

    pub fn objective(&self) -> &RatVector {
        &self.objective
    }

    pub fn group(&self) -> &BlockGroup {
        &self.group
    }

    pub fn with_rows(&self, rows: Vec<Row>) -> Result<Self, ModelError> {
        Instance::new(self.n, rows, self.objective.clone(), self.group.clone())
    }

    /// Whether the integer point satisfies every row.
    pub fn contains_int(&self, z: &[i64]) -> bool {
        self.rows.iter().all(|r| r.is_satisfied_by_int(z).expect("dimension checked on construction"))
    }

    pub fn objective_value_int(&self, z: &[i64]) -> Rational {
        self.objective.dot_int(z).expect("dimension checked on construction")
    }
}

pub fn load_instance(path: impl AsRef<Path>) -> Result<Instance, ModelError> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|source| ModelError::Io { path: path.display().to_string(), source })?;
    Instance::from_json(&text)
}

pub(crate) fn dedup_rows(rows: Vec<Row>) -> Vec<Row> {
    let mut seen = HashSet::with_capacity(rows.len());
    let mut out = Vec::with_capacity(rows.len());
    for row in rows {
        if !seen.contains(&row) {
            seen.insert(row.clone());
            out.push(row);
        }
    }
    out
}

/// `row` with its coefficients moved by `g`; the image constraint of `g`.
pub fn permute_row(row: &Row, g: &Permutation) -> Row {
    Row::new(RatVector::from(g.apply(&row.a)), row.b.clone())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SymmetryViolation {
    MissingRow { generator: Permutation, row: usize, image: Row },
    Objective { generator: Permutation },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SymmetryReport {
    pub is_symmetric: bool,
    pub witnesses: Vec<SymmetryViolation>,
}

/// Checks that every block generator maps the row set onto itself and leaves
/// the objective vector unchanged.
pub fn validate_symmetry(inst: &Instance) -> SymmetryReport {
    let rows: HashSet<&Row> = inst.rows.iter().collect();
    let mut witnesses = Vec::new();
    for g in inst.group.generators() {
        for (i, row) in inst.rows.iter().enumerate() {
            let image = permute_row(row, &g);
            if !rows.contains(&image) {
                witnesses.push(SymmetryViolation::MissingRow { generator: g.clone(), row: i, image });
            }
        }
        if RatVector::from(g.apply(&inst.objective)) != inst.objective {
            witnesses.push(SymmetryViolation::Objective { generator: g });
        }
    }
    SymmetryReport { is_symmetric: witnesses.is_empty(), witnesses }
}

/// Orbit of a single row under the block product, without duplicates.
pub fn row_orbit(group: &BlockGroup, row: &Row) -> Vec<Row> {
    let mut images: Vec<Vec<Rational>> = vec![row.a.to_vec()];
    for (bi, block) in group.blocks().iter().enumerate() {
        if block.size() == 1 {
            continue;
        }
        let local: Vec<Rational> = block.coords.iter().map(|&c| row.a[c].clone()).collect();
        let arrangements = group.block_orbit(bi, &local);
        if arrangements.len() == 1 {
            continue;
        }
        let mut next = Vec::with_capacity(images.len() * arrangements.len());
        for image in &images {
            for arrangement in &arrangements {
                let mut v = image.clone();
                for (&c, value) in block.coords.iter().zip(arrangement) {
                    v[c] = value.clone();
                }
                next.push(v);
            }
        }
        images = next;
    }
    images.into_iter().map(|a| Row::new(RatVector::from(a), row.b.clone())).collect()
}

/// Closes the row set under all block permutations.
pub fn orbit_closure_rows(inst: &Instance, cap: usize) -> Result<Instance, ModelError> {
    let mut seen: HashSet<Row> = HashSet::new();
    let mut rows = Vec::new();
    for row in &inst.rows {
        if seen.contains(row) {
            continue;
        }
        for image in std::iter::once(row.clone()).chain(row_orbit(&inst.group, row)) {
            if !seen.contains(&image) {
                if rows.len() >= cap {
                    return Err(ModelError::RowCap { cap });
                }
                seen.insert(image.clone());
                rows.push(image);
            }
        }
    }
    Ok(Instance { n: inst.n, rows, objective: inst.objective.clone(), group: inst.group.clone() })
}
