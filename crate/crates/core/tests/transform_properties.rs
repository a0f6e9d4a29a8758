mod common;

use std::collections::{BTreeSet, HashSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::{for_each_in_box, nonneg_box};
use symcore::gen::{generate_instance, GenParams};
use symcore::solve::{solve_bb, solve_fiber, SolveOptions};
use symcore::transform::{lift_solution, sort_block_descending, transform_instance, write_lp_string, ExportModel};
use symcore::{BlockGroup, Instance, RatVector, Rational, Row};

/// Representative of block sums `s`: in each block the first `s mod k`
/// coordinates get `floor(s / k) + 1`, the others `floor(s / k)`.
fn representative(group: &BlockGroup, s: &[i64]) -> Vec<i64> {
    let mut z = vec![0; group.n()];
    for (block, &sum) in group.blocks().iter().zip(s) {
        let k = block.size() as i64;
        for (pos, &c) in block.coords.iter().enumerate() {
            z[c] = sum.div_euclid(k) + i64::from((pos as i64) < sum.rem_euclid(k));
        }
    }
    z
}

/// Row with the coefficients of every block sorted in decreasing order.
fn canonical(group: &BlockGroup, row: &Row) -> Row {
    let mut a = row.a.to_vec();
    for block in group.blocks() {
        let mut values: Vec<Rational> = block.coords.iter().map(|&c| row.a[c].clone()).collect();
        values.sort_by(|x, y| y.cmp(x));
        for (&c, v) in block.coords.iter().zip(values) {
            a[c] = v;
        }
    }
    Row::new(RatVector::from(a), row.b.clone())
}

fn random_assignment(rng: &mut ChaCha8Rng, sizes: &[usize]) -> Vec<i64> {
    let mut out = Vec::new();
    for &k in sizes {
        out.push(rng.gen_range(-3..=3));
        let hot = rng.gen_range(0..k);
        out.extend((1..k).map(|j| i64::from(j == hot)));
    }
    out
}

#[test]
fn sorted_rows_dominate_on_lifted_points() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for _ in 0..2000 {
        let sizes: Vec<usize> = (0..rng.gen_range(1..=3)).map(|_| rng.gen_range(1..=4)).collect();
        let group = BlockGroup::symmetric_blocks(&sizes);
        let n = group.n();
        let inst = Instance::new(n, Vec::new(), RatVector::zeros(n), group.clone()).unwrap();
        let ti = transform_instance(&inst).unwrap();
        let a = RatVector::from_ints(&(0..n).map(|_| rng.gen_range(-6..=6)).collect::<Vec<_>>());
        let z = lift_solution(&ti, &random_assignment(&mut rng, &sizes)).unwrap();
        let sorted = sort_block_descending(&a, &group);
        assert!(a.dot_int(&z).unwrap() <= sorted.dot_int(&z).unwrap(), "{a:?} at {z:?}");
    }
}

#[test]
fn lifted_points_are_fiber_representatives() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..500 {
        let sizes: Vec<usize> = (0..rng.gen_range(1..=3)).map(|_| rng.gen_range(1..=5)).collect();
        let group = BlockGroup::symmetric_blocks(&sizes);
        let inst = Instance::new(group.n(), Vec::new(), RatVector::zeros(group.n()), group.clone()).unwrap();
        let ti = transform_instance(&inst).unwrap();
        let z = lift_solution(&ti, &random_assignment(&mut rng, &sizes)).unwrap();
        let sums = group.block_sums(&z);
        assert_eq!(representative(&group, &sums.0), z);
    }
}

/// Every integral feasible point of the transformed model, lifted.
fn lifted_feasible_set(inst: &Instance, upper: &[i64]) -> BTreeSet<Vec<i64>> {
    let ti = transform_instance(inst).unwrap();
    let sizes = inst.group().block_sizes();
    // One t range and one choice of hot s variable (or none) per block.
    let lo: Vec<i64> = sizes.iter().flat_map(|_| [-1, 0]).collect();
    let hi: Vec<i64> = inst
        .group()
        .blocks()
        .iter()
        .flat_map(|b| [b.coords.iter().map(|&c| upper[c]).max().unwrap() + 1, b.size() as i64 - 1])
        .collect();
    let mut out = BTreeSet::new();
    for_each_in_box(&lo, &hi, |choice| {
        let mut assignment = Vec::new();
        for (i, &k) in sizes.iter().enumerate() {
            assignment.push(choice[2 * i]);
            assignment.extend((1..k as i64).map(|j| i64::from(j == choice[2 * i + 1])));
        }
        let x = RatVector::from_ints(&assignment);
        if ti.rows.iter().all(|row| row.is_satisfied_by(&x).unwrap()) {
            out.insert(lift_solution(&ti, &assignment).unwrap());
        }
    });
    out
}

#[test]
fn transformed_model_has_exactly_the_feasible_representatives() {
    for shape in [&[2, 2][..], &[3, 2], &[4, 2], &[3, 3], &[2, 2, 2], &[4, 3, 1], &[5, 3]] {
        for seed in 0..3 {
            let inst = generate_instance(&GenParams::new(shape, seed)).unwrap();
            let upper = nonneg_box(&inst).unwrap();
            let group = inst.group();
            let lo = vec![0; group.d()];
            let hi: Vec<i64> = group.blocks().iter().map(|b| b.coords.iter().map(|&c| upper[c]).sum()).collect();
            let mut expected = BTreeSet::new();
            for_each_in_box(&lo, &hi, |s| {
                let z = representative(group, s);
                if inst.contains_int(&z) {
                    expected.insert(z);
                }
            });
            assert_eq!(lifted_feasible_set(&inst, &upper), expected, "{shape:?} seed {seed}");
        }
    }
}

#[test]
fn one_model_row_per_row_orbit() {
    for shape in [&[2, 2][..], &[3, 2], &[4], &[2, 2, 1], &[3, 3, 2]] {
        for seed in 0..4 {
            let inst = generate_instance(&GenParams::new(shape, seed)).unwrap();
            let orbits: HashSet<Row> = inst.rows().iter().map(|row| canonical(inst.group(), row)).collect();
            let ti = transform_instance(&inst).unwrap();
            assert_eq!(ti.model_rows.len(), orbits.len(), "{shape:?} seed {seed}");
            let n = inst.n();
            assert!(ti.model_rows.len() <= 3 * n + inst.group().d() + 1);
            let nontrivial: usize = shape.iter().filter(|&&k| k >= 2).map(|&k| k).sum();
            assert_eq!(ti.structural_rows.len(), nontrivial, "one sum row and k - 1 sign rows per block");
        }
    }
}

#[test]
fn transformed_optimum_equals_fiber_optimum() {
    for shape in [&[2, 2][..], &[3, 2], &[4, 1], &[2, 2, 2], &[3, 3]] {
        for seed in 10..14 {
            let inst = generate_instance(&GenParams::new(shape, seed)).unwrap();
            let ti = transform_instance(&inst).unwrap();
            let bb = solve_bb(&ti.rows, &ti.objective, &vec![true; ti.num_vars()]).unwrap();
            let fiber = solve_fiber(&inst, &SolveOptions::default()).unwrap();
            assert_eq!(bb.status, fiber.status);
            assert_eq!(bb.objective, fiber.objective, "{shape:?} seed {seed}");
        }
    }
}

#[test]
fn lp_export_of_generated_models() {
    let inst = generate_instance(&GenParams::new(&[3, 2, 1], 5)).unwrap();
    let ti = transform_instance(&inst).unwrap();
    let text = write_lp_string(&ExportModel::from(&ti));
    let rows = text.lines().filter(|l| l.starts_with(" c")).count();
    assert_eq!(rows, ti.rows.len());
    let generals = text.split("Generals\n").nth(1).unwrap().split("Binaries\n").next().unwrap();
    assert_eq!(generals.split_whitespace().collect::<Vec<_>>(), ["t0", "t1", "t2"]);
    let binaries = text.split("Binaries\n").nth(1).unwrap().split("End").next().unwrap();
    assert_eq!(binaries.split_whitespace().collect::<Vec<_>>(), ["s0_1", "s0_2", "s1_1"]);
    assert!(text.ends_with("End\n"));

    let original = write_lp_string(&ExportModel::from(&inst));
    assert_eq!(original.lines().filter(|l| l.starts_with(" c")).count(), inst.rows().len());
    assert!(!original.contains("Binaries"));
}
