use alloc::format;
use alloc::vec::Vec;

use rand::seq::SliceRandom;

use super::dataset::Dataset;
use crate::rng::seeded;
use crate::{Error, Result};

/// Deterministic three-way split.
///
/// Row positions are shuffled with a generator seeded by `seed`, then cut
/// into pieces of `floor(n * fraction)` rows; leftover rows go to the first
/// piece. Each piece keeps the input's row order.
pub fn split(data: &Dataset, fractions: [f64; 3], seed: u64) -> Result<[Dataset; 3]> {
    if data.is_empty() {
        return Err(Error::EmptyDataset);
    }
    if fractions.iter().any(|f| !f.is_finite() || *f < 0.0) {
        return Err(Error::InvalidFractions(format!(
            "fractions must be finite and nonnegative: {fractions:?}"
        )));
    }
    let total: f64 = fractions.iter().sum();
    if (total - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidFractions(format!(
            "fractions sum to {total}, expected 1"
        )));
    }
    let n = data.len();
    // The epsilon absorbs products such as 0.29 * 100 = 28.999999999999996.
    let mut sizes: Vec<usize> = fractions
        .iter()
        .map(|f| libm::floor(f * n as f64 + 1e-9) as usize)
        .collect();
    let assigned: usize = sizes.iter().sum();
    sizes[0] += n.saturating_sub(assigned);
    for (i, (&f, &size)) in fractions.iter().zip(&sizes).enumerate() {
        if f > 0.0 && size == 0 {
            return Err(Error::InvalidFractions(format!(
                "split {} has fraction {f} but receives no rows out of {n}",
                i + 1
            )));
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut seeded(seed));
    let mut out = Vec::with_capacity(3);
    let mut start = 0;
    for size in sizes {
        let mut part = order[start..start + size].to_vec();
        part.sort_unstable();
        out.push(data.select(&part));
        start += size;
    }
    let [a, b, c]: [Dataset; 3] = out.try_into().ok().unwrap();
    Ok([a, b, c])
}

/// Seeded subsample of at most `max_rows` rows (input order kept).
pub fn subsample(data: &Dataset, max_rows: usize, seed: u64) -> Dataset {
    if data.len() <= max_rows {
        return data.clone();
    }
    let mut order: Vec<usize> = (0..data.len()).collect();
    order.shuffle(&mut seeded(seed));
    let mut keep = order[..max_rows].to_vec();
    keep.sort_unstable();
    data.select(&keep)
}
