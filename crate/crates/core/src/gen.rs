//! Seeded random block-symmetric instances.
//!
//! The stream is a ChaCha8 generator seeded with `seed_from_u64(seed)`. Each
//! of the `3n` base rows draws one scale factor `f_i` in `1..=20` per block,
//! then one entry per coordinate in coordinate order: zero with probability
//! 0.1, otherwise uniform in `5..=15`. The row coefficient is `f_i` times the
//! entry and the right-hand side is `floor(0.95 * sum of coefficients)`.
//! The rows are closed under the block group, duplicates are dropped, the
//! rows `-x_i <= 0` and `-sum x_i <= -1` are appended and finally one
//! objective coefficient in `1..=10` is drawn per block.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arith::{RatVector, Row};
use crate::group::BlockGroup;
use crate::model::{orbit_closure_rows, Instance, ModelError, DEFAULT_ROW_CAP};

#[derive(Debug, Error)]
pub enum GenError {
    #[error("block sizes must be positive and non-empty")]
    BlockSizes,
    #[error(transparent)]
    Model(#[from] ModelError),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenParams {
    pub block_sizes: Vec<usize>,
    pub seed: u64,
    pub row_cap: usize,
}

impl GenParams {
    pub fn new(block_sizes: &[usize], seed: u64) -> Self {
        GenParams { block_sizes: block_sizes.to_vec(), seed, row_cap: DEFAULT_ROW_CAP }
    }
}

pub fn generate_instance(p: &GenParams) -> Result<Instance, GenError> {
    if p.block_sizes.is_empty() || p.block_sizes.contains(&0) {
        return Err(GenError::BlockSizes);
    }
    let group = BlockGroup::symmetric_blocks(&p.block_sizes);
    let n = group.n();
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);

    let mut base = Vec::with_capacity(3 * n);
    for _ in 0..3 * n {
        let factors: Vec<i64> = p.block_sizes.iter().map(|_| rng.gen_range(1..=20)).collect();
        let a: Vec<i64> = (0..n)
            .map(|j| {
                let entry = if rng.gen_bool(0.1) { 0 } else { rng.gen_range(5..=15) };
                factors[group.block_of(j)] * entry
            })
            .collect();
        let b = (19 * a.iter().sum::<i64>()).div_euclid(20);
        base.push(Row::from_ints(&a, b));
    }

    let coefficients: Vec<i64> = p.block_sizes.iter().map(|_| rng.gen_range(1..=10)).collect();
    let objective: Vec<i64> = (0..n).map(|j| coefficients[group.block_of(j)]).collect();
    let inst = Instance::new(n, base, RatVector::from_ints(&objective), group)?;
    let closed = orbit_closure_rows(&inst, p.row_cap)?;

    let mut rows = closed.rows().to_vec();
    for j in 0..n {
        let mut e = vec![0; n];
        e[j] = -1;
        rows.push(Row::from_ints(&e, 0));
    }
    rows.push(Row::from_ints(&vec![-1; n], -1));
    Ok(closed.with_rows(rows)?)
}
