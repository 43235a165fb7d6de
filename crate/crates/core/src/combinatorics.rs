//! Exact ground truth for the word statistics.
//!
//! Everything here is exact: probabilities are `BigRational`, tableaux counts
//! are `BigUint`. The other routes are validated against this module.

use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::exact::factorial;

/// Default cap on k^N for full word enumeration.
pub const DEFAULT_ENUMERATION_BUDGET: u128 = 10_000_000;
/// Default cap on the word length N for the tableaux route.
pub const DEFAULT_PARTITION_BUDGET: u32 = 500;

/// Which monotone statistic a distribution refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Which {
    /// Longest weakly increasing subsequence, ℓ^I.
    Increasing,
    /// Longest strictly decreasing subsequence, ℓ^D.
    Decreasing,
}

impl Which {
    pub fn tag(self) -> &'static str {
        match self {
            Which::Increasing => "I",
            Which::Decreasing => "D",
        }
    }
}

impl fmt::Display for Which {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

/// A word of length N over the alphabet {1, ..., k}.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Word {
    letters: Vec<u32>,
    k: u32,
}

impl Word {
    pub fn new(letters: Vec<u32>, k: u32) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidParameter(
                "alphabet size must be positive".into(),
            ));
        }
        if let Some(bad) = letters.iter().find(|&&l| l == 0 || l > k) {
            return Err(Error::InvalidParameter(format!(
                "letter {bad} outside the alphabet 1..={k}"
            )));
        }
        Ok(Self { letters, k })
    }

    pub fn letters(&self) -> &[u32] {
        &self.letters
    }

    pub fn alphabet_size(&self) -> u32 {
        self.k
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }
}

/// Length of the longest weakly increasing subsequence (0 for the empty word).
pub fn longest_weakly_increasing(w: &Word) -> usize {
    weakly_increasing_len(w.letters())
}

/// Length of the longest strictly decreasing subsequence (0 for the empty word).
pub fn longest_strictly_decreasing(w: &Word) -> usize {
    strictly_decreasing_len(w.letters())
}

// Patience sorting: `tails[i]` is the smallest possible last letter of a
// monotone subsequence of length i + 1.
fn weakly_increasing_len(letters: &[u32]) -> usize {
    let mut tails: Vec<u32> = Vec::new();
    for &x in letters {
        let pos = tails.partition_point(|&t| t <= x);
        if pos == tails.len() {
            tails.push(x);
        } else {
            tails[pos] = x;
        }
    }
    tails.len()
}

fn strictly_decreasing_len(letters: &[u32]) -> usize {
    // Strictly decreasing in x is strictly increasing in -x; keep the piles in
    // increasing order of -x, i.e. decreasing order of x.
    let mut tails: Vec<u32> = Vec::new();
    for &x in letters {
        let pos = tails.partition_point(|&t| t > x);
        if pos == tails.len() {
            tails.push(x);
        } else {
            tails[pos] = x;
        }
    }
    tails.len()
}

fn statistic(which: Which, letters: &[u32]) -> usize {
    match which {
        Which::Increasing => weakly_increasing_len(letters),
        Which::Decreasing => strictly_decreasing_len(letters),
    }
}

/// An integer partition, stored as its strictly positive parts in weakly
/// decreasing order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Partition {
    parts: Vec<u32>,
}

impl Partition {
    /// Accepts trailing zeros and drops them.
    pub fn new(mut parts: Vec<u32>) -> Result<Self> {
        while parts.last() == Some(&0) {
            parts.pop();
        }
        if parts.windows(2).any(|w| w[0] < w[1]) || parts.contains(&0) {
            return Err(Error::InvalidParameter(format!(
                "{parts:?} is not weakly decreasing and positive"
            )));
        }
        Ok(Self { parts })
    }

    pub fn empty() -> Self {
        Self { parts: Vec::new() }
    }

    pub fn parts(&self) -> &[u32] {
        &self.parts
    }

    pub fn weight(&self) -> u32 {
        self.parts.iter().sum()
    }

    /// Number of rows ℓ(λ).
    pub fn length(&self) -> usize {
        self.parts.len()
    }

    /// λ₁, or 0 for the empty partition.
    pub fn first_row(&self) -> u32 {
        self.parts.first().copied().unwrap_or(0)
    }

    pub fn conjugate(&self) -> Partition {
        let cols = self.first_row();
        let parts = (0..cols)
            .map(|j| self.parts.iter().filter(|&&p| p > j).count() as u32)
            .collect();
        Partition { parts }
    }

    /// Iterator over (row, column) cells of the Young diagram, zero-based.
    pub fn cells(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        self.parts
            .iter()
            .enumerate()
            .flat_map(|(i, &p)| (0..p).map(move |j| (i as u32, j)))
    }

    pub fn hook_lengths(&self) -> Vec<u32> {
        let conj = self.conjugate();
        self.cells()
            .map(|(i, j)| self.parts[i as usize] - j + conj.parts[j as usize] - i - 1)
            .collect()
    }
}

fn product_of(values: impl Iterator<Item = u64>) -> BigUint {
    let mut acc = BigUint::one();
    let mut chunk: u64 = 1;
    for v in values {
        match chunk.checked_mul(v) {
            Some(c) => chunk = c,
            None => {
                acc *= chunk;
                chunk = v;
            }
        }
    }
    acc * chunk
}

/// f^λ, the number of standard Young tableaux, by the hook length formula.
pub fn standard_tableaux_count(lambda: &Partition) -> BigUint {
    let hooks = product_of(lambda.hook_lengths().into_iter().map(u64::from));
    factorial(lambda.weight()) / hooks
}

/// d_λ(k), the number of semistandard tableaux with entries ≤ k, by the
/// hook-content formula. Zero when ℓ(λ) > k.
pub fn semistandard_tableaux_count(lambda: &Partition, k: u32) -> BigUint {
    if lambda.length() > k as usize {
        return BigUint::zero();
    }
    let contents = product_of(lambda.cells().map(|(i, j)| (k + j - i) as u64));
    let hooks = product_of(lambda.hook_lengths().into_iter().map(u64::from));
    contents / hooks
}

/// d_λ(k) f^λ in one pass: N! Π(k + c) / Π h².
fn word_count_for_shape(lambda: &Partition, k: u32, n_factorial: &BigUint) -> BigUint {
    if lambda.length() > k as usize {
        return BigUint::zero();
    }
    let contents = product_of(lambda.cells().map(|(i, j)| (k + j - i) as u64));
    let hooks = product_of(lambda.hook_lengths().into_iter().map(u64::from));
    n_factorial * contents / (&hooks * &hooks)
}

/// All partitions of `weight` with at most `max_parts` parts and largest part
/// at most `max_first`, in reverse lexicographic order.
pub fn partitions(weight: u32, max_parts: usize, max_first: u32) -> Vec<Partition> {
    fn rec(
        remaining: u32,
        max_part: u32,
        slots: usize,
        current: &mut Vec<u32>,
        out: &mut Vec<Partition>,
    ) {
        if remaining == 0 {
            out.push(Partition {
                parts: current.clone(),
            });
            return;
        }
        if slots == 0 {
            return;
        }
        // Remaining weight must fit into the slots left.
        let hi = remaining.min(max_part);
        for p in (1..=hi).rev() {
            if (p as u64) * (slots as u64) < remaining as u64 {
                break;
            }
            current.push(p);
            rec(remaining - p, p, slots - 1, current, out);
            current.pop();
        }
    }
    let mut out = Vec::new();
    rec(weight, max_first, max_parts, &mut Vec::new(), &mut out);
    out
}

/// A pair of same-shape tableaux produced by RSK row insertion.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TableauPair {
    /// Insertion tableau: semistandard, entries from the word.
    pub p: Vec<Vec<u32>>,
    /// Recording tableau: standard, entries 1..=N.
    pub q: Vec<Vec<u32>>,
}

impl TableauPair {
    pub fn shape(&self) -> Partition {
        Partition {
            parts: self.p.iter().map(|r| r.len() as u32).collect(),
        }
    }

    pub fn p_is_semistandard(&self) -> bool {
        rows_and_columns_ok(&self.p, |a, b| a <= b)
    }

    pub fn q_is_standard(&self) -> bool {
        let mut seen: Vec<u32> = self.q.iter().flatten().copied().collect();
        seen.sort_unstable();
        let n = seen.len() as u32;
        rows_and_columns_ok(&self.q, |a, b| a < b) && seen == (1..=n).collect::<Vec<_>>()
    }
}

fn rows_and_columns_ok(t: &[Vec<u32>], row_ok: impl Fn(u32, u32) -> bool) -> bool {
    let rows = t.iter().all(|r| r.windows(2).all(|w| row_ok(w[0], w[1])));
    let cols = t.windows(2).all(|pair| {
        pair[1].len() <= pair[0].len() && pair[1].iter().zip(&pair[0]).all(|(lo, hi)| hi < lo)
    });
    rows && cols
}

/// Robinson–Schensted–Knuth row insertion.
pub fn rsk(w: &Word) -> TableauPair {
    let mut p: Vec<Vec<u32>> = Vec::new();
    let mut q: Vec<Vec<u32>> = Vec::new();
    for (step, &letter) in w.letters().iter().enumerate() {
        let mut x = letter;
        let mut row = 0;
        loop {
            if row == p.len() {
                p.push(vec![x]);
                q.push(vec![step as u32 + 1]);
                break;
            }
            let pos = p[row].partition_point(|&y| y <= x);
            if pos == p[row].len() {
                p[row].push(x);
                q[row].push(step as u32 + 1);
                break;
            }
            x = std::mem::replace(&mut p[row][pos], x);
            row += 1;
        }
    }
    TableauPair { p, q }
}

/// Which computation produced a distribution.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Route {
    Enumeration,
    Tableaux,
    Series,
}

impl Route {
    pub fn tag(self) -> &'static str {
        match self {
            Route::Enumeration => "enum",
            Route::Tableaux => "tableaux",
            Route::Series => "series",
        }
    }
}

/// Exact distribution function n ↦ F(n; k, N) for one (k, N, statistic).
#[derive(Debug, Clone, PartialEq)]
pub struct DistributionTable {
    pub route: Route,
    pub which: Which,
    pub k: u32,
    pub length: u32,
    /// `cdf[n]` for n = 0..=N.
    cdf: Vec<BigRational>,
}

impl DistributionTable {
    fn from_counts(route: Route, which: Which, k: u32, length: u32, counts: &[BigUint]) -> Self {
        let total = BigInt::from(k).pow(length);
        let mut running = BigUint::zero();
        let cdf = counts
            .iter()
            .map(|c| {
                running += c;
                BigRational::new(BigInt::from(running.clone()), total.clone())
            })
            .collect();
        Self {
            route,
            which,
            k,
            length,
            cdf,
        }
    }

    pub(crate) fn from_cdf(
        route: Route,
        which: Which,
        k: u32,
        length: u32,
        cdf: Vec<BigRational>,
    ) -> Self {
        Self {
            route,
            which,
            k,
            length,
            cdf,
        }
    }

    /// F(n; k, N); equals 1 for n ≥ N.
    pub fn get(&self, n: u32) -> BigRational {
        self.cdf
            .get(n as usize)
            .cloned()
            .unwrap_or_else(BigRational::one)
    }

    pub fn values(&self) -> &[BigRational] {
        &self.cdf
    }
}

/// Distribution of ℓ^I or ℓ^D by visiting all k^N words.
pub fn exact_distribution_enumeration(
    k: u32,
    length: u32,
    which: Which,
    budget: u128,
) -> Result<DistributionTable> {
    if k == 0 {
        return Err(Error::InvalidParameter(
            "alphabet size must be positive".into(),
        ));
    }
    let words = (k as u128)
        .checked_pow(length)
        .filter(|&w| w <= budget)
        .ok_or(Error::BudgetExceeded {
            what: "word enumeration k^N",
            requested: (k as u128).checked_pow(length).unwrap_or(u128::MAX),
            budget,
        })?;
    let _ = words;
    let n = length as usize;
    if n == 0 {
        return Ok(DistributionTable::from_counts(
            Route::Enumeration,
            which,
            k,
            0,
            &[BigUint::one()],
        ));
    }
    // Split on the first letter; each task runs an odometer over the rest.
    let counts: Vec<u64> = (1..=k)
        .into_par_iter()
        .map(|first| {
            let mut counts = vec![0u64; n + 1];
            let mut word = vec![1u32; n];
            word[0] = first;
            loop {
                counts[statistic(which, &word)] += 1;
                let mut pos = n - 1;
                loop {
                    if pos == 0 {
                        return counts;
                    }
                    if word[pos] < k {
                        word[pos] += 1;
                        break;
                    }
                    word[pos] = 1;
                    pos -= 1;
                }
            }
        })
        .reduce(
            || vec![0u64; n + 1],
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                a
            },
        );
    let counts: Vec<BigUint> = counts.into_iter().map(BigUint::from).collect();
    Ok(DistributionTable::from_counts(
        Route::Enumeration,
        which,
        k,
        length,
        &counts,
    ))
}

/// Distribution of ℓ^I or ℓ^D from Σ d_λ(k) f^λ, grouping shapes by λ₁
/// (increasing) or ℓ(λ) (decreasing).
pub fn tableaux_distribution(
    k: u32,
    length: u32,
    which: Which,
    budget: u32,
) -> Result<DistributionTable> {
    if k == 0 {
        return Err(Error::InvalidParameter(
            "alphabet size must be positive".into(),
        ));
    }
    if length > budget {
        return Err(Error::BudgetExceeded {
            what: "partition enumeration N",
            requested: length as u128,
            budget: budget as u128,
        });
    }
    let n_fact = factorial(length);
    let shapes = partitions(length, k as usize, length);
    let weighted: Vec<(usize, BigUint)> = shapes
        .par_iter()
        .map(|lambda| {
            let key = match which {
                Which::Increasing => lambda.first_row() as usize,
                Which::Decreasing => lambda.length(),
            };
            (key, word_count_for_shape(lambda, k, &n_fact))
        })
        .collect();
    let mut counts = vec![BigUint::zero(); length as usize + 1];
    for (key, c) in weighted {
        counts[key] += c;
    }
    Ok(DistributionTable::from_counts(
        Route::Tableaux,
        which,
        k,
        length,
        &counts,
    ))
}

/// F_I(n; k, N) or F_D(n; k, N) by the tableaux sum.
pub fn distribution_via_tableaux(n: u32, k: u32, length: u32, which: Which) -> Result<BigRational> {
    if n >= length {
        return Ok(BigRational::one());
    }
    Ok(tableaux_distribution(k, length, which, DEFAULT_PARTITION_BUDGET)?.get(n))
}
