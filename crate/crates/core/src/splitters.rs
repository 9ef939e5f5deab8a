//! Splitting strategies: random, stratified, adversarial, cluster-based and
//! the deterministic max-min subsampling pair (Kennard-Stone / DUPLEX).
//!
//! Every splitter returns a true partition (disjoint, exhaustive, both sides
//! non-empty). Seeded strategies are deterministic given their seed;
//! adversarial and the max-min strategies are fully deterministic.
//!
//! Fractions are converted to counts with round-half-up, once, here.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dataset::{ColumnData, Dataset};
use crate::error::{Error, Result};
use crate::selection::{view, ColumnSelection};
use crate::split::SplitIndices;

/// Maximum distinct values for a numeric column used as a stratum/group key.
const MAX_KEY_LEVELS: usize = 50;

/// Round-half-up of `x` (0.5 rounds towards +inf).
pub(crate) fn round_half_up(x: f64) -> usize {
    (x + 0.5).floor() as usize
}

/// Train size for a fraction, requiring both sides non-empty.
fn train_size(n: usize, fraction: f64) -> Result<usize> {
    if !(fraction > 0.0 && fraction < 1.0) {
        return Err(Error::EmptyPartition(fraction));
    }
    let k = round_half_up(fraction * n as f64);
    if k == 0 || k >= n {
        return Err(Error::EmptyPartition(fraction));
    }
    Ok(k)
}

/// Splitting strategy selector with its per-strategy parameters.
#[derive(Debug, Clone)]
pub enum SplitStrategy {
    Random { seed: u64 },
    Stratified { key_column: String, seed: u64 },
    Adversarial { key_column: String },
    Cluster { key_column: String, seed: u64 },
    Cadex { columns: ColumnSelection },
    Duplex { columns: ColumnSelection },
}

impl SplitStrategy {
    pub fn name(&self) -> &'static str {
        match self {
            SplitStrategy::Random { .. } => "random",
            SplitStrategy::Stratified { .. } => "stratified",
            SplitStrategy::Adversarial { .. } => "adversarial",
            SplitStrategy::Cluster { .. } => "cluster",
            SplitStrategy::Cadex { .. } => "cadex",
            SplitStrategy::Duplex { .. } => "duplex",
        }
    }
}

/// A strategy plus the split fraction; dispatches to the free functions.
#[derive(Debug, Clone)]
pub struct SplitSpec {
    pub strategy: SplitStrategy,
    pub fraction: f64,
}

impl SplitSpec {
    pub fn build(&self, ds: &Dataset) -> Result<SplitIndices> {
        match &self.strategy {
            SplitStrategy::Random { seed } => random_split(ds.n_rows(), self.fraction, *seed),
            SplitStrategy::Stratified { key_column, seed } => {
                stratified_split(ds, key_column, self.fraction, *seed)
            }
            SplitStrategy::Adversarial { key_column } => {
                adversarial_split(ds, key_column, self.fraction)
            }
            SplitStrategy::Cluster { key_column, seed } => {
                cluster_split(ds, key_column, self.fraction, *seed)
            }
            SplitStrategy::Cadex { columns } => cadex_split(ds, columns, self.fraction),
            SplitStrategy::Duplex { columns } => duplex_split(ds, columns, self.fraction),
        }
    }
}

/// Uniform random split without replacement via a seeded partial
/// Fisher-Yates shuffle. Deterministic given `(n, fraction, seed)`.
pub fn random_split(n: usize, fraction: f64, seed: u64) -> Result<SplitIndices> {
    if n < 2 {
        return Err(Error::TooFewRows { needed: 2, got: n });
    }
    let k = train_size(n, fraction)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (train, test) = partial_shuffle(n, k, &mut rng);
    SplitIndices::new(train, test)
}

/// First k positions of a partial Fisher-Yates shuffle of `0..n`.
fn partial_shuffle(n: usize, k: usize, rng: &mut ChaCha8Rng) -> (Vec<usize>, Vec<usize>) {
    let mut idx: Vec<usize> = (0..n).collect();
    for i in 0..k {
        let j = rng.random_range(i..n);
        idx.swap(i, j);
    }
    let test = idx.split_off(k);
    (idx, test)
}

/// Distinct key values of a column in order of first appearance, with the
/// row list of each value.
fn group_rows(ds: &Dataset, key_column: &str) -> Result<Vec<(String, Vec<usize>)>> {
    let col = ds.column(key_column)?;
    let mut order: Vec<String> = Vec::new();
    let mut map: std::collections::HashMap<String, Vec<usize>> = std::collections::HashMap::new();
    match &col.data {
        ColumnData::Categorical { levels, codes } => {
            for (i, &c) in codes.iter().enumerate() {
                let key = levels[c as usize].clone();
                map.entry(key.clone()).or_insert_with(|| {
                    order.push(key);
                    Vec::new()
                });
                map.get_mut(&levels[c as usize]).unwrap().push(i);
            }
        }
        ColumnData::Numeric(values) => {
            for (i, v) in values.iter().enumerate() {
                let key = format!("{v}");
                map.entry(key.clone()).or_insert_with(|| {
                    order.push(key.clone());
                    Vec::new()
                });
                map.get_mut(&key).unwrap().push(i);
                if order.len() > MAX_KEY_LEVELS {
                    return Err(Error::TooManyLevels(key_column.to_string(), MAX_KEY_LEVELS));
                }
            }
        }
    }
    Ok(order
        .into_iter()
        .map(|k| {
            let rows = map.remove(&k).unwrap();
            (k, rows)
        })
        .collect())
}

/// Stratified split: within each stratum, round-half-up(fraction * size)
/// rows are chosen uniformly at random. A stratum that cannot give at least
/// one row to each side contributes all rows to the larger side.
pub fn stratified_split(
    ds: &Dataset,
    stratum_column: &str,
    fraction: f64,
    seed: u64,
) -> Result<SplitIndices> {
    if !(fraction > 0.0 && fraction < 1.0) {
        return Err(Error::EmptyPartition(fraction));
    }
    let groups = group_rows(ds, stratum_column)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut train = Vec::new();
    let mut test = Vec::new();
    for (level, rows) in &groups {
        let ns = rows.len();
        let ks = round_half_up(fraction * ns as f64);
        if ks == 0 || ks >= ns {
            log::warn!(
                "stratum `{level}` ({ns} row(s)) cannot give a row to each side; \
                 assigning all rows to the larger side"
            );
            if fraction >= 0.5 {
                train.extend_from_slice(rows);
            } else {
                test.extend_from_slice(rows);
            }
            continue;
        }
        let (local_train, local_test) = partial_shuffle(ns, ks, &mut rng);
        train.extend(local_train.into_iter().map(|i| rows[i]));
        test.extend(local_test.into_iter().map(|i| rows[i]));
    }
    SplitIndices::new(train, test)
}

/// Deterministic adversarial split: rows sorted ascending by the key column
/// (stable on ties); the first round-half-up(fraction * n) go to train.
pub fn adversarial_split(ds: &Dataset, sort_column: &str, fraction: f64) -> Result<SplitIndices> {
    let values = ds.numeric_column(sort_column)?;
    let k = train_size(ds.n_rows(), fraction)?;
    let mut order: Vec<usize> = (0..ds.n_rows()).collect();
    order.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).unwrap());
    let test = order.split_off(k);
    SplitIndices::new(order, test)
}

/// Cluster split: whole groups are assigned to train in seeded random order
/// until the train size first reaches fraction * n; at least one group is
/// always left for the test side.
pub fn cluster_split(
    ds: &Dataset,
    group_column: &str,
    fraction: f64,
    seed: u64,
) -> Result<SplitIndices> {
    if !(fraction > 0.0 && fraction < 1.0) {
        return Err(Error::EmptyPartition(fraction));
    }
    let mut groups = group_rows(ds, group_column)?;
    if groups.len() < 2 {
        return Err(Error::SingleGroup);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // seeded permutation of group order
    for i in (1..groups.len()).rev() {
        let j = rng.random_range(0..=i);
        groups.swap(i, j);
    }
    let n = ds.n_rows();
    let threshold = fraction * n as f64;
    let mut train = Vec::new();
    let mut test = Vec::new();
    for (pos, (_, rows)) in groups.iter().enumerate() {
        let remaining = groups.len() - pos;
        if (train.len() as f64) < threshold && remaining > 1 {
            train.extend_from_slice(rows);
        } else {
            test.extend_from_slice(rows);
        }
    }
    SplitIndices::new(train, test)
}

/// Rows of the selected columns standardized to zero mean / unit variance.
/// Constant columns are zeroed out (they carry no distance information).
fn standardized(ds: &Dataset, sel: &ColumnSelection) -> Result<DMatrix<f64>> {
    let all: Vec<usize> = (0..ds.n_rows()).collect();
    let mut m = view(ds, sel, &all)?;
    let (n, d) = m.shape();
    for j in 0..d {
        let mean = m.column(j).sum() / n as f64;
        let var = m.column(j).iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        let sd = var.sqrt();
        for i in 0..n {
            m[(i, j)] = if sd > 0.0 { (m[(i, j)] - mean) / sd } else { 0.0 };
        }
    }
    Ok(m)
}

fn dist_sq(m: &DMatrix<f64>, a: usize, b: usize) -> f64 {
    let d = m.ncols();
    let mut s = 0.0;
    for j in 0..d {
        let diff = m[(a, j)] - m[(b, j)];
        s += diff * diff;
    }
    s
}

/// Index pair (i < j) with maximal squared distance; ties resolved towards
/// the lexicographically smallest pair.
fn max_distance_pair(m: &DMatrix<f64>, candidates: &[usize]) -> Result<(usize, usize)> {
    let mut best = (0usize, 0usize);
    let mut best_d = -1.0f64;
    for (p, &a) in candidates.iter().enumerate() {
        for &b in &candidates[p + 1..] {
            let d = dist_sq(m, a, b);
            if d > best_d {
                best_d = d;
                best = (a, b);
            }
        }
    }
    if best_d <= 0.0 {
        return Err(Error::DegenerateDistances);
    }
    Ok(best)
}

/// Incrementally maintained max-min selection state.
struct MaxMin {
    /// Min squared distance from each row to the growing set; assigned rows
    /// are marked with -1.
    min_d: Vec<f64>,
}

impl MaxMin {
    fn new(n: usize) -> Self {
        MaxMin {
            min_d: vec![f64::INFINITY; n],
        }
    }

    fn add(&mut self, m: &DMatrix<f64>, row: usize) {
        for i in 0..self.min_d.len() {
            if self.min_d[i] >= 0.0 {
                let d = dist_sq(m, i, row);
                if d < self.min_d[i] {
                    self.min_d[i] = d;
                }
            }
        }
        self.min_d[row] = -1.0;
    }

    fn mark_assigned(&mut self, row: usize) {
        self.min_d[row] = -1.0;
    }

    /// Unassigned row with maximal min-distance among `open` rows;
    /// ties break to the lowest row index.
    fn argmax(&self, open: &[bool]) -> Option<usize> {
        let mut best: Option<(usize, f64)> = None;
        for (i, &d) in self.min_d.iter().enumerate() {
            if d >= 0.0 && open[i] {
                match best {
                    Some((_, bd)) if d <= bd => {}
                    _ => best = Some((i, d)),
                }
            }
        }
        best.map(|(i, _)| i)
    }
}

/// Kennard-Stone (CADEX) split.
///
/// The max-min procedure selects the evaluation (test) subset: seed with the
/// two mutually farthest points, then repeatedly add the point whose minimum
/// distance to the selected set is maximal, until `n − round(fraction·n)`
/// points are selected. The remainder forms the train side. Distances are
/// standardized Euclidean over the given columns; ties break to the lowest
/// row index. Fully deterministic.
pub fn cadex_split(ds: &Dataset, sel: &ColumnSelection, fraction: f64) -> Result<SplitIndices> {
    let n = ds.n_rows();
    let k_train = train_size(n, fraction)?;
    let target = n - k_train;
    if target < 2 {
        return Err(Error::InvalidConfig(format!(
            "cadex needs at least 2 rows on the selected (test) side; fraction {fraction} \
             leaves {target}"
        )));
    }
    let m = standardized(ds, sel)?;
    let all: Vec<usize> = (0..n).collect();
    let (a, b) = max_distance_pair(&m, &all)?;
    let mut state = MaxMin::new(n);
    state.add(&m, a);
    state.add(&m, b);
    let mut selected = vec![a, b];
    let open = vec![true; n];
    while selected.len() < target {
        let next = state.argmax(&open).expect("unassigned rows remain");
        state.add(&m, next);
        selected.push(next);
    }
    let chosen: std::collections::HashSet<usize> = selected.iter().copied().collect();
    let train: Vec<usize> = (0..n).filter(|i| !chosen.contains(i)).collect();
    SplitIndices::new(train, selected)
}

/// DUPLEX split.
///
/// The remaining pair with maximal distance seeds the train side; the next
/// maximal remaining pair seeds the test side; thereafter the point farthest
/// (max-min) from each side is assigned to it in alternation until the test
/// side reaches `n − round(fraction·n)` rows. Remaining rows go to train.
/// Standardization and tie-breaking as in [`cadex_split`].
pub fn duplex_split(ds: &Dataset, sel: &ColumnSelection, fraction: f64) -> Result<SplitIndices> {
    let n = ds.n_rows();
    let train_target = train_size(n, fraction)?;
    let test_target = n - train_target;
    let m = standardized(ds, sel)?;
    let mut open = vec![true; n];
    let mut train_state = MaxMin::new(n);
    let mut test_state = MaxMin::new(n);
    let mut train = Vec::with_capacity(train_target);
    let mut test = Vec::with_capacity(test_target);

    let seed_side = |state: &mut MaxMin,
                         other: &mut MaxMin,
                         side: &mut Vec<usize>,
                         open: &mut Vec<usize>,
                         capacity: usize|
     -> Result<()> {
        let candidates: Vec<usize> = open.clone();
        if candidates.len() < 2 || capacity == 0 {
            return Ok(());
        }
        let (a, b) = max_distance_pair(&m, &candidates)?;
        let picks: Vec<usize> = if capacity >= 2 { vec![a, b] } else { vec![a] };
        for p in picks {
            state.add(&m, p);
            other.mark_assigned(p);
            side.push(p);
            open.retain(|&i| i != p);
        }
        Ok(())
    };

    let mut open_rows: Vec<usize> = (0..n).collect();
    seed_side(
        &mut train_state,
        &mut test_state,
        &mut train,
        &mut open_rows,
        train_target,
    )?;
    seed_side(
        &mut test_state,
        &mut train_state,
        &mut test,
        &mut open_rows,
        test_target,
    )?;
    for &i in &train {
        open[i] = false;
    }
    for &i in &test {
        open[i] = false;
    }

    // Alternate train/test, skipping a side once full, until test is full.
    let mut to_train = true;
    while test.len() < test_target && train.len() + test.len() < n {
        let take_train = (to_train && train.len() < train_target) || test.len() >= test_target;
        if take_train && train.len() < train_target {
            if let Some(next) = train_state.argmax(&open) {
                train_state.add(&m, next);
                test_state.mark_assigned(next);
                open[next] = false;
                train.push(next);
            }
        } else if let Some(next) = test_state.argmax(&open) {
            test_state.add(&m, next);
            train_state.mark_assigned(next);
            open[next] = false;
            test.push(next);
        }
        to_train = !to_train;
    }
    // test side is full; everything else belongs to train
    for (i, o) in open.iter().enumerate() {
        if *o {
            train.push(i);
        }
    }
    SplitIndices::new(train, test)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{Column, ColumnData};
    use crate::selection::select_columns;

    fn one_col(values: Vec<f64>) -> Dataset {
        Dataset::from_numeric("t", &["v"], vec![values]).unwrap()
    }

    #[test]
    fn random_split_sizes_and_determinism() {
        let s = random_split(10, 0.6, 42).unwrap();
        assert_eq!(s.train().len(), 6);
        assert_eq!(s.test().len(), 4);
        assert_eq!(s, random_split(10, 0.6, 42).unwrap());
        assert_ne!(s, random_split(10, 0.6, 43).unwrap());
        assert!(random_split(10, 0.01, 1).is_err());
        assert!(random_split(10, 0.99, 1).is_err());
    }

    #[test]
    fn random_split_membership_frequency() {
        // each row should land in train with empirical frequency near 0.8
        let n = 10_000;
        let seeds = 100u64;
        let mut counts = vec![0u32; n];
        for seed in 0..seeds {
            let s = random_split(n, 0.8, seed).unwrap();
            for &i in s.train() {
                counts[i] += 1;
            }
        }
        let mean = counts.iter().map(|&c| c as f64).sum::<f64>() / n as f64 / seeds as f64;
        assert!((mean - 0.8).abs() < 1e-9, "exact by construction: {mean}");
        let worst = counts
            .iter()
            .map(|&c| (c as f64 / seeds as f64 - 0.8).abs())
            .fold(0.0f64, f64::max);
        // 100 Bernoulli(0.8) trials: sd = 0.04; allow a generous band since
        // we take the max over 10k rows.
        assert!(worst < 0.2, "worst row deviation {worst}");
    }

    #[test]
    fn round_half_up_rule() {
        assert_eq!(round_half_up(1.5), 2);
        assert_eq!(round_half_up(3.5), 4);
        assert_eq!(round_half_up(2.4), 2);
        assert_eq!(round_half_up(0.8 * 4177.0), 3342);
    }

    fn stratified_ds(sizes: &[usize]) -> Dataset {
        let mut codes = Vec::new();
        let mut vals = Vec::new();
        for (g, &s) in sizes.iter().enumerate() {
            for i in 0..s {
                codes.push(g as u32);
                vals.push(i as f64);
            }
        }
        Dataset::from_columns(
            "s",
            vec![
                Column {
                    name: "g".into(),
                    data: ColumnData::Categorical {
                        levels: (0..sizes.len()).map(|i| format!("g{i}")).collect(),
                        codes,
                    },
                },
                Column {
                    name: "v".into(),
                    data: ColumnData::Numeric(vals),
                },
            ],
        )
        .unwrap()
    }

    #[test]
    fn stratified_exact_per_stratum_counts() {
        let ds = stratified_ds(&[10, 10, 10, 10]);
        let s = stratified_split(&ds, "g", 0.6, 7).unwrap();
        let col = ds.column("g").unwrap();
        for g in 0..4 {
            let level = format!("g{g}");
            let in_train = s
                .train()
                .iter()
                .filter(|&&i| col.level_of(i) == Some(level.as_str()))
                .count();
            assert_eq!(in_train, 6, "stratum {level}");
        }
    }

    #[test]
    fn stratified_round_half_up_sizes() {
        let ds = stratified_ds(&[3, 7]);
        let s = stratified_split(&ds, "g", 0.5, 1).unwrap();
        let col = ds.column("g").unwrap();
        let count = |lvl: &str| {
            s.train()
                .iter()
                .filter(|&&i| col.level_of(i) == Some(lvl))
                .count()
        };
        // round-half-up: 1.5 -> 2 and 3.5 -> 4 (hand enumeration)
        assert_eq!(count("g0"), 2);
        assert_eq!(count("g1"), 4);
    }

    #[test]
    fn stratified_tiny_stratum_goes_to_larger_side() {
        let ds = stratified_ds(&[1, 8]);
        let s = stratified_split(&ds, "g", 0.6, 3).unwrap();
        let col = ds.column("g").unwrap();
        let row0_in_train = s.train().iter().any(|&i| col.level_of(i) == Some("g0"));
        assert!(row0_in_train);
    }

    #[test]
    fn stratified_single_stratum_still_partitions() {
        let ds = stratified_ds(&[10]);
        let s = stratified_split(&ds, "g", 0.6, 9).unwrap();
        assert_eq!(s.train().len(), 6);
        assert_eq!(s.test().len(), 4);
    }

    #[test]
    fn adversarial_sort_semantics() {
        let ds = one_col(vec![5.0, 1.0, 3.0]);
        let s = adversarial_split(&ds, "v", 2.0 / 3.0).unwrap();
        assert_eq!(s.train(), &[1, 2]); // values 1 and 3
        assert_eq!(s.test(), &[0]); // value 5
    }

    #[test]
    fn adversarial_sorted_column_gives_prefix() {
        let ds = one_col((0..10).map(|i| i as f64).collect());
        let s = adversarial_split(&ds, "v", 0.7).unwrap();
        assert_eq!(s.train(), &[0, 1, 2, 3, 4, 5, 6]);
    }

    #[test]
    fn adversarial_ties_are_stable() {
        let ds = one_col(vec![1.0, 0.0, 1.0, 0.0]);
        let s = adversarial_split(&ds, "v", 0.5).unwrap();
        assert_eq!(s.train(), &[1, 3]); // both zeros, original order
    }

    #[test]
    fn cluster_equal_groups() {
        let ds = stratified_ds(&[5, 5, 5, 5]);
        let s = cluster_split(&ds, "g", 0.5, 21).unwrap();
        assert_eq!(s.train().len(), 10);
        assert_eq!(s.test().len(), 10);
    }

    #[test]
    fn cluster_unbalanced_groups_one_each_side() {
        let ds = stratified_ds(&[9, 1]);
        for seed in 0..20 {
            let s = cluster_split(&ds, "g", 0.5, seed).unwrap();
            // regardless of assignment order, each side gets one whole group
            assert!(
                (s.train().len() == 9 && s.test().len() == 1)
                    || (s.train().len() == 1 && s.test().len() == 9)
            );
        }
    }

    #[test]
    fn cluster_single_group_errors() {
        let ds = stratified_ds(&[10]);
        assert!(matches!(
            cluster_split(&ds, "g", 0.5, 1),
            Err(Error::SingleGroup)
        ));
    }

    #[test]
    fn cadex_selects_test_side_max_min() {
        // mirrored 1-D trace: the max-distance pair {0, 10} seeds the
        // selected (test) side
        let ds = one_col(vec![0.0, 1.0, 10.0]);
        let sel = select_columns(&ds, None).unwrap();
        let s = cadex_split(&ds, &sel, 1.0 / 3.0).unwrap();
        assert_eq!(s.test(), &[0, 2]);
        assert_eq!(s.train(), &[1]);
    }

    #[test]
    fn cadex_hand_traced_iteration() {
        // values {0, 2, 3, 10}: seed pair {0, 10}; among {2, 3} the min
        // distances to the selected set are 2 and 3, so 3 joins next.
        let ds = one_col(vec![0.0, 2.0, 3.0, 10.0]);
        let sel = select_columns(&ds, None).unwrap();
        let s = cadex_split(&ds, &sel, 0.25).unwrap();
        assert_eq!(s.test(), &[0, 2, 3]);
        assert_eq!(s.train(), &[1]);
    }

    #[test]
    fn cadex_deterministic_and_contains_far_pair() {
        let mut vals = Vec::new();
        let mut state = 1u64;
        for _ in 0..40 {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1);
            vals.push((state >> 33) as f64 / 1e9);
        }
        let ds = one_col(vals.clone());
        let sel = select_columns(&ds, None).unwrap();
        let a = cadex_split(&ds, &sel, 0.7).unwrap();
        let b = cadex_split(&ds, &sel, 0.7).unwrap();
        assert_eq!(a, b);
        let lo = (0..40).min_by(|&i, &j| vals[i].partial_cmp(&vals[j]).unwrap()).unwrap();
        let hi = (0..40).max_by(|&i, &j| vals[i].partial_cmp(&vals[j]).unwrap()).unwrap();
        assert!(a.test().contains(&lo) && a.test().contains(&hi));
    }

    /// Naive Kennard-Stone selection: full O(n^2) rescan every step.
    fn oracle_ks(values: &[Vec<f64>], target: usize) -> Vec<usize> {
        let n = values.len();
        let dist = |a: usize, b: usize| -> f64 {
            values[a]
                .iter()
                .zip(&values[b])
                .map(|(x, y)| (x - y) * (x - y))
                .sum()
        };
        let mut best = (0, 1);
        let mut best_d = -1.0;
        for i in 0..n {
            for j in i + 1..n {
                if dist(i, j) > best_d {
                    best_d = dist(i, j);
                    best = (i, j);
                }
            }
        }
        let mut sel = vec![best.0, best.1];
        while sel.len() < target {
            let mut cand = None;
            let mut cand_d = -1.0;
            for i in 0..n {
                if sel.contains(&i) {
                    continue;
                }
                let md = sel.iter().map(|&s| dist(i, s)).fold(f64::INFINITY, f64::min);
                if md > cand_d {
                    cand_d = md;
                    cand = Some(i);
                }
            }
            sel.push(cand.unwrap());
        }
        sel.sort_unstable();
        sel
    }

    #[test]
    fn cadex_matches_naive_kennard_stone() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(33);
        for _ in 0..10 {
            let n = rng.random_range(6..25);
            let cols: Vec<Vec<f64>> = (0..2)
                .map(|_| (0..n).map(|_| rng.random::<f64>()).collect())
                .collect();
            let ds = Dataset::from_numeric("o", &["a", "b"], cols.clone()).unwrap();
            let sel = select_columns(&ds, None).unwrap();
            let fraction = 0.4;
            let s = cadex_split(&ds, &sel, fraction).unwrap();
            // standardize the oracle input the same way
            let rows: Vec<Vec<f64>> = (0..n)
                .map(|i| {
                    cols.iter()
                        .map(|c| {
                            let mean = c.iter().sum::<f64>() / n as f64;
                            let var = c.iter().map(|v| (v - mean).powi(2)).sum::<f64>()
                                / (n - 1) as f64;
                            (c[i] - mean) / var.sqrt()
                        })
                        .collect()
                })
                .collect();
            let want = oracle_ks(&rows, s.test().len());
            assert_eq!(s.test(), &want[..]);
        }
    }

    #[test]
    fn cadex_duplicate_rows_error() {
        let ds = one_col(vec![1.0, 1.0, 1.0, 1.0]);
        let sel = select_columns(&ds, None).unwrap();
        assert!(matches!(
            cadex_split(&ds, &sel, 0.5),
            Err(Error::DegenerateDistances)
        ));
    }

    #[test]
    fn duplex_unit_square_diagonals() {
        let ds = Dataset::from_numeric(
            "sq",
            &["x", "y"],
            vec![vec![0.0, 1.0, 0.0, 1.0], vec![0.0, 0.0, 1.0, 1.0]],
        )
        .unwrap();
        let sel = select_columns(&ds, None).unwrap();
        let s = duplex_split(&ds, &sel, 0.5).unwrap();
        // each side receives one diagonal pair
        assert_eq!(s.train(), &[0, 3]);
        assert_eq!(s.test(), &[1, 2]);
    }

    #[test]
    fn duplex_two_rows() {
        let ds = one_col(vec![0.0, 1.0]);
        let sel = select_columns(&ds, None).unwrap();
        let s = duplex_split(&ds, &sel, 0.5).unwrap();
        assert_eq!(s.train().len(), 1);
        assert_eq!(s.test().len(), 1);
    }

    #[test]
    fn duplex_deterministic_with_exact_test_size() {
        let vals: Vec<f64> = (0..30).map(|i| ((i * 37) % 17) as f64 + i as f64 * 0.01).collect();
        let ds = one_col(vals);
        let sel = select_columns(&ds, None).unwrap();
        let a = duplex_split(&ds, &sel, 0.8).unwrap();
        assert_eq!(a, duplex_split(&ds, &sel, 0.8).unwrap());
        assert_eq!(a.test().len(), 30 - round_half_up(0.8 * 30.0));
    }

    #[test]
    fn every_strategy_returns_a_partition() {
        let ds = stratified_ds(&[6, 9, 5]);
        let sel = select_columns(&ds, Some(&["v".to_string()])).unwrap();
        let splits = vec![
            random_split(ds.n_rows(), 0.5, 3).unwrap(),
            stratified_split(&ds, "g", 0.5, 3).unwrap(),
            adversarial_split(&ds, "v", 0.5).unwrap(),
            cluster_split(&ds, "g", 0.5, 3).unwrap(),
            duplex_split(&ds, &sel, 0.5).unwrap(),
        ];
        for s in splits {
            assert_eq!(s.train().len() + s.test().len(), ds.n_rows());
            assert!(!s.train().is_empty() && !s.test().is_empty());
        }
    }
}
