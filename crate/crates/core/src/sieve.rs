//! Segmented sieving: exact counts and ascending enumeration of the sets
//! `I_m(A)` (optionally ∩ square-free) up to 10⁹, plus lattice-point counting
//! for the degenerate regime where members are products of a fixed prime set.
//!
//! A number is excluded either by a forbidden prime factor or, in square-free
//! mode, by a square divisor. Forbidden primes up to √limit are marked with
//! plain strides. A composite can also carry a single forbidden prime factor
//! `p > √limit`; those are marked as `k·p` with the cofactor `k < √limit`
//! running over each segment, against a pre-collected sorted list of the
//! forbidden primes in `(√limit, limit/2]`. Forbidden primes above `limit/2`
//! only exclude themselves and are caught by the primality scan.

use std::io;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arith::{self, CongruenceSelector};

/// Hard cap on sieve ranges; beyond this the memory story changes.
pub const MAX_LIMIT: u64 = 1_000_000_000;

/// Cache-resident segment: 2²⁰ integers per worker pass.
const SEGMENT_SIZE: u64 = 1 << 20;

#[derive(Debug, Error)]
pub enum SieveError {
    #[error("limit {0} outside [1, {MAX_LIMIT}]")]
    LimitOutOfRange(u64),
    #[error("checkpoint {checkpoint} outside [1, {limit}]")]
    CheckpointOutOfRange { checkpoint: u64, limit: u64 },
    #[error("prime set must be non-empty")]
    EmptyPrimeSet,
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("asymptotic formula requires n > 1")]
    AsymptoticDomain,
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

fn isqrt(n: u64) -> u64 {
    let mut r = (n as f64).sqrt() as u64;
    while r > 0 && r.checked_mul(r).map_or(true, |v| v > n) {
        r -= 1;
    }
    while (r + 1).checked_mul(r + 1).map_or(false, |v| v <= n) {
        r += 1;
    }
    r
}

/// All primes `≤ limit` by a flat sieve of Eratosthenes. Meant for base
/// primes (√limit scale); use [`for_each_prime`] for large ranges.
pub fn primes_up_to(limit: u64) -> Vec<u64> {
    if limit < 2 {
        return Vec::new();
    }
    let n = limit as usize;
    let mut composite = vec![false; n + 1];
    let mut primes = Vec::new();
    for i in 2..=n {
        if !composite[i] {
            primes.push(i as u64);
            for j in (i * i..=n).step_by(i) {
                composite[j] = true;
            }
        }
    }
    primes
}

/// Visits every prime `≤ limit` in increasing order with a fixed-size
/// segmented sieve, so memory stays at one segment regardless of the range.
pub fn for_each_prime<F: FnMut(u64)>(limit: u64, mut f: F) {
    if limit < 2 {
        return;
    }
    let base = primes_up_to(isqrt(limit));
    let mut composite = vec![false; SEGMENT_SIZE as usize];
    let mut lo = 2u64;
    while lo <= limit {
        let hi = (lo + SEGMENT_SIZE).min(limit + 1);
        let size = (hi - lo) as usize;
        composite[..size].fill(false);
        for &p in &base {
            let mut at = (p * p).max(lo.div_ceil(p) * p);
            while at < hi {
                composite[(at - lo) as usize] = true;
                at += p;
            }
        }
        for (i, &c) in composite[..size].iter().enumerate() {
            if !c {
                f(lo + i as u64);
            }
        }
        lo = hi;
    }
}

/// A finite set of distinct primes (the allowed primes of the degenerate case).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrimeSet {
    primes: Vec<u64>,
}

impl PrimeSet {
    pub fn new(primes: impl IntoIterator<Item = u64>) -> Result<Self, SieveError> {
        let mut primes: Vec<u64> = primes.into_iter().collect();
        primes.sort_unstable();
        primes.dedup();
        for &p in &primes {
            if !arith::is_prime(p) {
                return Err(SieveError::NotPrime(p));
            }
        }
        Ok(PrimeSet { primes })
    }

    pub fn primes(&self) -> &[u64] {
        &self.primes
    }

    pub fn len(&self) -> usize {
        self.primes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.primes.is_empty()
    }
}

/// One checkpoint row of a [`CountTable`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub n: u64,
    pub count: u64,
    pub predicted: Option<f64>,
    pub ratio: Option<f64>,
}

/// Exact member counts at increasing checkpoints, optionally annotated with
/// predicted asymptotics. Serializes to CSV with header `n,count,predicted,ratio`.
#[derive(Debug, Clone, PartialEq)]
pub struct CountTable {
    pub selector: CongruenceSelector,
    pub rows: Vec<Checkpoint>,
}

impl CountTable {
    /// Attach a prediction column; `ratio` is `count / predicted`.
    pub fn attach_predictions<F: Fn(u64) -> Option<f64>>(&mut self, predict: F) {
        for row in &mut self.rows {
            row.predicted = predict(row.n);
            row.ratio = row.predicted.map(|p| row.count as f64 / p);
        }
    }

    /// UTF-8, LF line endings, shortest round-trip decimal for reals.
    pub fn to_csv<W: io::Write>(&self, writer: W) -> Result<(), SieveError> {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(writer);
        for row in &self.rows {
            w.serialize(row)?;
        }
        w.flush().map_err(csv::Error::from)?;
        Ok(())
    }

    pub fn from_csv<R: io::Read>(
        reader: R,
        selector: CongruenceSelector,
    ) -> Result<Self, SieveError> {
        let mut rows = Vec::new();
        for record in csv::Reader::from_reader(reader).deserialize() {
            rows.push(record?);
        }
        Ok(CountTable { selector, rows })
    }
}

/// Shared, read-only state for sieving one selector up to `limit`.
struct SieveContext {
    sel: CongruenceSelector,
    limit: u64,
    /// all primes ≤ √limit
    base: Vec<u64>,
    /// the forbidden ones among `base`
    base_bad: Vec<u64>,
    /// forbidden primes in (√limit, limit/2], ascending
    large_bad: Vec<u32>,
}

impl SieveContext {
    fn new(sel: &CongruenceSelector, limit: u64) -> Self {
        let sqrt_limit = isqrt(limit);
        let base = primes_up_to(sqrt_limit);
        let base_bad: Vec<u64> = base
            .iter()
            .copied()
            .filter(|&p| sel.forbids_prime(p))
            .collect();
        let mut large_bad = Vec::new();
        if !sel.forbidden().is_empty() {
            for_each_prime(limit / 2, |p| {
                if p > sqrt_limit && sel.forbids_prime(p) {
                    large_bad.push(p as u32);
                }
            });
        }
        SieveContext {
            sel: sel.clone(),
            limit,
            base,
            base_bad,
            large_bad,
        }
    }

    fn needs_primality(&self) -> bool {
        !self.sel.forbidden().is_empty()
    }

    /// Scan the segment starting at `lo`, invoking `on_member` for each member
    /// in increasing order. `composite` and `excluded` are caller-owned scratch.
    fn scan_segment<F: FnMut(u64)>(
        &self,
        lo: u64,
        composite: &mut Vec<bool>,
        excluded: &mut Vec<bool>,
        mut on_member: F,
    ) {
        let hi = (lo + SEGMENT_SIZE).min(self.limit + 1);
        let size = (hi - lo) as usize;
        composite.resize(size, false);
        excluded.resize(size, false);
        excluded[..size].fill(false);

        if self.needs_primality() {
            composite[..size].fill(false);
            for &p in &self.base {
                let mut at = (p * p).max(lo.div_ceil(p) * p);
                while at < hi {
                    composite[(at - lo) as usize] = true;
                    at += p;
                }
            }
            // strides of forbidden base primes, from the prime itself
            for &p in &self.base_bad {
                let mut at = p.max(lo.div_ceil(p) * p);
                while at < hi {
                    excluded[(at - lo) as usize] = true;
                    at += p;
                }
            }
            // composites with one forbidden prime factor above √limit:
            // n = k·p with k ≥ 2 and p in the pre-collected list
            if let Some(&first) = self.large_bad.first() {
                let first = first as u64;
                for k in 2.. {
                    let p_max = (hi - 1) / k;
                    if p_max < first {
                        break;
                    }
                    let p_min = first.max(lo.div_ceil(k));
                    if p_min > p_max {
                        continue;
                    }
                    let mut idx = self.large_bad.partition_point(|&q| (q as u64) < p_min);
                    while let Some(&q) = self.large_bad.get(idx) {
                        let p = q as u64;
                        if p > p_max {
                            break;
                        }
                        excluded[(k * p - lo) as usize] = true;
                        idx += 1;
                    }
                }
            }
        }

        if self.sel.squarefree_only() {
            for &p in &self.base {
                let sq = p * p;
                let mut at = sq.max(lo.div_ceil(sq) * sq);
                while at < hi {
                    excluded[(at - lo) as usize] = true;
                    at += sq;
                }
            }
        }

        let check_primes = self.needs_primality();
        for i in 0..size {
            let n = lo + i as u64;
            let member = if n == 1 {
                true
            } else if check_primes && !composite[i] {
                // n is prime; primes are square-free, only the class matters
                !self.sel.forbids_prime(n)
            } else {
                !excluded[i]
            };
            if member {
                on_member(n);
            }
        }
    }
}

struct SegmentOutcome {
    /// (checkpoint index, members in this segment up to and including it)
    partials: Vec<(usize, u64)>,
    total: u64,
}

fn validated_checkpoints(limit: u64, checkpoints: &[u64]) -> Result<Vec<u64>, SieveError> {
    let mut cps = checkpoints.to_vec();
    cps.sort_unstable();
    cps.dedup();
    for &cp in &cps {
        if cp == 0 || cp > limit {
            return Err(SieveError::CheckpointOutOfRange {
                checkpoint: cp,
                limit,
            });
        }
    }
    Ok(cps)
}

fn count_with_segments(sel: &CongruenceSelector, limit: u64, checkpoints: &[u64]) -> CountTable {
    let ctx = SieveContext::new(sel, limit);
    let n_segments = ((limit - 1) / SEGMENT_SIZE + 1) as usize;

    let outcomes: Vec<SegmentOutcome> = (0..n_segments)
        .into_par_iter()
        .map_init(
            || (Vec::new(), Vec::new()),
            |(composite, excluded), i| {
                let lo = 1 + i as u64 * SEGMENT_SIZE;
                let hi = (lo + SEGMENT_SIZE).min(limit + 1);
                let from = checkpoints.partition_point(|&cp| cp < lo);
                let to = checkpoints.partition_point(|&cp| cp < hi);
                let segment_cps = &checkpoints[from..to];
                let mut partials = Vec::with_capacity(segment_cps.len());
                let mut next_cp = 0usize;
                let mut total = 0u64;
                ctx.scan_segment(lo, composite, excluded, |n| {
                    while next_cp < segment_cps.len() && segment_cps[next_cp] < n {
                        partials.push((from + next_cp, total));
                        next_cp += 1;
                    }
                    total += 1;
                });
                while next_cp < segment_cps.len() {
                    partials.push((from + next_cp, total));
                    next_cp += 1;
                }
                SegmentOutcome { partials, total }
            },
        )
        .collect();

    let mut rows: Vec<Checkpoint> = checkpoints
        .iter()
        .map(|&n| Checkpoint {
            n,
            count: 0,
            predicted: None,
            ratio: None,
        })
        .collect();
    let mut before_segment = 0u64;
    for outcome in outcomes {
        for (idx, partial) in outcome.partials {
            rows[idx].count = before_segment + partial;
        }
        before_segment += outcome.total;
    }
    CountTable {
        selector: sel.clone(),
        rows,
    }
}

/// Counts all integers whose prime factors lie in `primes`, with the running
/// product bounded by `limit`; pure exponent-vector recursion, no sieve array.
fn smooth_count_rec(primes: &[u64], limit: u64, acc: u64) -> u64 {
    match primes.split_first() {
        None => 1,
        Some((&p, rest)) => {
            let mut total = 0;
            let mut x = acc;
            loop {
                total += smooth_count_rec(rest, limit, x);
                if x > limit / p {
                    break;
                }
                x *= p;
            }
            total
        }
    }
}

fn smooth_members_rec(primes: &[u64], limit: u64, acc: u64, out: &mut Vec<u64>) {
    match primes.split_first() {
        None => out.push(acc),
        Some((&p, rest)) => {
            let mut x = acc;
            loop {
                smooth_members_rec(rest, limit, x, out);
                if x > limit / p {
                    break;
                }
                x *= p;
            }
        }
    }
}

/// Square-free variant: each prime appears with exponent 0 or 1.
fn subset_product_members(primes: &[u64], limit: u64, acc: u64, out: &mut Vec<u64>) {
    match primes.split_first() {
        None => out.push(acc),
        Some((&p, rest)) => {
            subset_product_members(rest, limit, acc, out);
            if acc <= limit / p {
                subset_product_members(rest, limit, acc * p, out);
            }
        }
    }
}

fn degenerate_members(sel: &CongruenceSelector, limit: u64) -> Vec<u64> {
    let primes = sel.degenerate_primes();
    let mut out = Vec::new();
    if sel.squarefree_only() {
        subset_product_members(&primes, limit, 1, &mut out);
    } else {
        smooth_members_rec(&primes, limit, 1, &mut out);
    }
    out.sort_unstable();
    out
}

/// Exact `|{members ≤ n}|` at each checkpoint.
///
/// Degenerate selectors (ℓ = φ(m)) are detected up front and counted by
/// exponent-vector enumeration; everything else goes through the segmented
/// sieve. Segments are processed by independent workers; the checkpoint
/// reduction is order-independent, so results are identical for any number
/// of threads.
pub fn count_members(
    sel: &CongruenceSelector,
    limit: u64,
    checkpoints: &[u64],
) -> Result<CountTable, SieveError> {
    if limit == 0 || limit > MAX_LIMIT {
        return Err(SieveError::LimitOutOfRange(limit));
    }
    let checkpoints = validated_checkpoints(limit, checkpoints)?;

    if sel.is_degenerate() {
        let members = degenerate_members(sel, limit);
        let rows = checkpoints
            .iter()
            .map(|&n| Checkpoint {
                n,
                count: members.partition_point(|&x| x <= n) as u64,
                predicted: None,
                ratio: None,
            })
            .collect();
        return Ok(CountTable {
            selector: sel.clone(),
            rows,
        });
    }

    // trivial selector: nothing is ever excluded
    if sel.forbidden().is_empty() && !sel.squarefree_only() {
        let rows = checkpoints
            .iter()
            .map(|&n| Checkpoint {
                n,
                count: n,
                predicted: None,
                ratio: None,
            })
            .collect();
        return Ok(CountTable {
            selector: sel.clone(),
            rows,
        });
    }

    Ok(count_with_segments(sel, limit, &checkpoints))
}

/// Ascending stream of members `≤ limit`; one segment is buffered at a time.
pub fn enumerate_members(sel: &CongruenceSelector, limit: u64) -> Result<Members, SieveError> {
    if limit == 0 || limit > MAX_LIMIT {
        return Err(SieveError::LimitOutOfRange(limit));
    }
    if sel.is_degenerate() {
        return Ok(Members::Listed(degenerate_members(sel, limit).into_iter()));
    }
    Ok(Members::Sieved(SievedMembers {
        ctx: SieveContext::new(sel, limit),
        next_lo: 1,
        composite: Vec::new(),
        excluded: Vec::new(),
        buffer: Vec::new().into_iter(),
    }))
}

pub enum Members {
    Listed(std::vec::IntoIter<u64>),
    Sieved(SievedMembers),
}

pub struct SievedMembers {
    ctx: SieveContext,
    next_lo: u64,
    composite: Vec<bool>,
    excluded: Vec<bool>,
    buffer: std::vec::IntoIter<u64>,
}

impl Iterator for Members {
    type Item = u64;

    fn next(&mut self) -> Option<u64> {
        match self {
            Members::Listed(it) => it.next(),
            Members::Sieved(s) => loop {
                if let Some(n) = s.buffer.next() {
                    return Some(n);
                }
                if s.next_lo > s.ctx.limit {
                    return None;
                }
                let mut buf = Vec::new();
                let lo = s.next_lo;
                s.ctx
                    .scan_segment(lo, &mut s.composite, &mut s.excluded, |n| buf.push(n));
                s.next_lo = lo + SEGMENT_SIZE;
                s.buffer = buf.into_iter();
            },
        }
    }
}

/// `|{∏ pᵢ^xᵢ ≤ limit : xᵢ ≥ 0}|` over the primes of `b`, by depth-first
/// enumeration of exponent vectors.
pub fn count_smooth(b: &PrimeSet, limit: u64) -> Result<u64, SieveError> {
    if b.is_empty() {
        return Err(SieveError::EmptyPrimeSet);
    }
    if limit == 0 {
        return Err(SieveError::LimitOutOfRange(limit));
    }
    Ok(smooth_count_rec(b.primes(), limit, 1))
}

/// Leading-order lattice-point asymptotic `(log n)^|B| / (|B|!·∏ log p)`.
pub fn degenerate_asymptotic(b: &PrimeSet, n: f64) -> Result<f64, SieveError> {
    if b.is_empty() {
        return Err(SieveError::EmptyPrimeSet);
    }
    if !(n > 1.0) {
        return Err(SieveError::AsymptoticDomain);
    }
    let k = b.len();
    let factorial: f64 = (1..=k).map(|i| i as f64).product();
    let log_product: f64 = b.primes().iter().map(|&p| (p as f64).ln()).product();
    Ok(n.ln().powi(k as i32) / (factorial * log_product))
}
