//! Generate-and-test reference solvers. Nothing here uses domains, spaces,
//! or propagators; candidates are enumerated in full and checked by plain
//! arithmetic.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::models::JarrellSpec;

/// Largest all-interval length the oracle will enumerate (11! candidates).
pub const MAX_ALL_INTERVAL_N: usize = 12;

/// Candidate budget for the motive-melody oracle.
pub const JARRELL_BUDGET: u64 = 10_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("oracle refused: {0}")]
    Refused(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OracleResult {
    /// Lexicographically sorted, no duplicates.
    pub solutions: Vec<Vec<i64>>,
    /// Candidates examined.
    pub enumerated: u64,
}

/// Rearranges `xs` into the next lexicographic permutation; false once the
/// last one has been passed.
fn next_permutation(xs: &mut [i64]) -> bool {
    if xs.len() < 2 {
        return false;
    }
    let Some(i) = (0..xs.len() - 1).rev().find(|&i| xs[i] < xs[i + 1]) else {
        return false;
    };
    let j = (i + 1..xs.len()).rev().find(|&j| xs[j] > xs[i]).expect("pivot has a successor");
    xs.swap(i, j);
    xs[i + 1..].reverse();
    true
}

fn all_interval_ok(v: &[i64], n: i64) -> bool {
    let len = v.len();
    // all pitches distinct
    let mut seen = vec![false; len];
    for &x in v {
        if x < 0 || x >= n || seen[x as usize] {
            return false;
        }
        seen[x as usize] = true;
    }
    // all intervals mod n distinct
    let mut seen = vec![false; len];
    for w in v.windows(2) {
        let d = (w[1] - w[0]).rem_euclid(n) as usize;
        if seen[d] {
            return false;
        }
        seen[d] = true;
    }
    v[0] == 0 && v[0] < v[len - 1]
}

/// Every all-interval series of length `n` starting on 0 and ending above
/// its first note, by scanning all permutations of `0..n` that begin with 0.
pub fn oracle_all_interval(n: usize) -> Result<OracleResult, OracleError> {
    if n > MAX_ALL_INTERVAL_N {
        return Err(OracleError::Refused(format!(
            "all-interval oracle is limited to n <= {MAX_ALL_INTERVAL_N} ({}! candidates), got n = {n}",
            MAX_ALL_INTERVAL_N - 1
        )));
    }
    if n < 2 {
        return Err(OracleError::Refused(format!("all-interval series need n >= 2, got n = {n}")));
    }
    let modulus = n as i64;
    let mut perm: Vec<i64> = (0..modulus).collect();
    let mut solutions = Vec::new();
    let mut enumerated = 0u64;
    loop {
        enumerated += 1;
        if all_interval_ok(&perm, modulus) {
            solutions.push(perm.clone());
        }
        if !next_permutation(&mut perm[1..]) {
            break;
        }
    }
    solutions.sort();
    Ok(OracleResult { solutions, enumerated })
}

fn occurrences_in(word: &[i64], motive: &[i64]) -> usize {
    let mut count = 0;
    let mut start = 0;
    while start + motive.len() <= word.len() {
        if (0..motive.len()).all(|k| word[start + k] == motive[k]) {
            count += 1;
        }
        start += 1;
    }
    count
}

/// Every melody satisfying `spec`, by enumerating all chord-tone fillings of
/// the inner notes.
pub fn oracle_jarrell(spec: &JarrellSpec) -> Result<OracleResult, OracleError> {
    spec.validate().map_err(|e| OracleError::Refused(e.to_string()))?;
    let chord: Vec<i64> = spec.chord.iter().copied().collect::<BTreeSet<_>>().into_iter().collect();
    let inner = spec.n - 2;
    let total = (chord.len() as u64).checked_pow(inner as u32).filter(|&t| t <= JARRELL_BUDGET).ok_or_else(|| {
        OracleError::Refused(format!(
            "{} chord tones over {inner} inner notes exceeds the {JARRELL_BUDGET}-candidate budget",
            chord.len()
        ))
    })?;
    let mut solutions = Vec::new();
    let mut enumerated = 0u64;
    if total == 0 {
        return Ok(OracleResult { solutions, enumerated });
    }
    let mut digits = vec![0usize; inner];
    let mut melody = vec![0i64; spec.n];
    loop {
        enumerated += 1;
        melody[0] = spec.first;
        melody[spec.n - 1] = spec.last;
        for (k, &d) in digits.iter().enumerate() {
            melody[k + 1] = chord[d];
        }
        let intervals: Vec<i64> = melody.windows(2).map(|w| w[1] - w[0]).collect();
        let counts_ok =
            spec.motives.iter().zip(&spec.occurrences).all(|(m, &occ)| occurrences_in(&intervals, m) == occ);
        let pitches_ok = melody.iter().all(|p| (0..=127).contains(p));
        if counts_ok && pitches_ok {
            solutions.push(melody.clone());
        }
        // odometer increment
        let mut pos = inner;
        loop {
            if pos == 0 {
                solutions.sort();
                return Ok(OracleResult { solutions, enumerated });
            }
            pos -= 1;
            digits[pos] += 1;
            if digits[pos] < chord.len() {
                break;
            }
            digits[pos] = 0;
        }
    }
}
