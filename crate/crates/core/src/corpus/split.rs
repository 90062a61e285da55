//! Deterministic train/dev/test split at game granularity.

use std::collections::{BTreeSet, HashMap};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{CgifRecord, CorpusError};

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Split {
    pub train: Vec<CgifRecord>,
    pub dev: Vec<CgifRecord>,
    pub test: Vec<CgifRecord>,
}

impl Split {
    pub fn buckets(&self) -> [&[CgifRecord]; 3] {
        [&self.train, &self.dev, &self.test]
    }
}

/// Allocates `n` items to buckets by largest remainder, then moves items so
/// that no bucket is empty.
fn allocate(n: usize, ratios: &[f64; 3]) -> [usize; 3] {
    let exact: Vec<f64> = ratios.iter().map(|r| r * n as f64).collect();
    let mut counts = [0usize; 3];
    for (c, e) in counts.iter_mut().zip(&exact) {
        *c = e.floor() as usize;
    }
    let mut order: Vec<usize> = (0..3).collect();
    order.sort_by(|&a, &b| (exact[b] - exact[b].floor()).total_cmp(&(exact[a] - exact[a].floor())).then(a.cmp(&b)));
    let mut left = n - counts.iter().sum::<usize>();
    for &i in order.iter().cycle() {
        if left == 0 {
            break;
        }
        counts[i] += 1;
        left -= 1;
    }
    while let Some(empty) = counts.iter().position(|&c| c == 0) {
        let donor = (0..3).max_by_key(|&i| (counts[i], std::cmp::Reverse(i))).expect("three buckets");
        counts[donor] -= 1;
        counts[empty] += 1;
    }
    counts
}

/// Shuffles the distinct games with `seed` and deals them into train, dev and
/// test. Every record of a game lands in the same bucket; records keep their
/// input order within a bucket.
pub fn split_corpus(records: &[CgifRecord], ratios: [f64; 3], seed: u64) -> Result<Split, CorpusError> {
    if ratios.iter().any(|r| !r.is_finite() || *r <= 0.0) {
        return Err(CorpusError::InvalidRatios("every ratio must be positive".into()));
    }
    let total: f64 = ratios.iter().sum();
    if (total - 1.0).abs() > 1e-9 {
        return Err(CorpusError::InvalidRatios(format!("ratios sum to {total}, not 1")));
    }
    let mut games: Vec<&str> = records.iter().map(|r| r.game_id.as_str()).collect::<BTreeSet<_>>().into_iter().collect();
    if games.len() < 3 {
        return Err(CorpusError::TooFewGames { games: games.len(), buckets: 3 });
    }
    games.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let counts = allocate(games.len(), &ratios);
    let mut bucket_of: HashMap<&str, usize> = HashMap::new();
    let mut next = 0;
    for (bucket, &count) in counts.iter().enumerate() {
        for game in &games[next..next + count] {
            bucket_of.insert(game, bucket);
        }
        next += count;
    }
    let mut split = Split::default();
    for r in records {
        let target = match bucket_of[r.game_id.as_str()] {
            0 => &mut split.train,
            1 => &mut split.dev,
            _ => &mut split.test,
        };
        target.push(r.clone());
    }
    Ok(split)
}
