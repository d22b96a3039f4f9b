//! Exhaustive scans over principal minors.
//!
//! Subsets of a fixed size are enumerated in colexicographic order, which the
//! combinatorial number system ranks and unranks directly: worker `i` of `w`
//! takes the contiguous rank range `[total·i/w, total·(i+1)/w)`, unranks its
//! first subset once and then steps with [`next_colex`]. Partial results are
//! merged in worker order, and ties on `T` or `V` go to the colex-smallest
//! subset, so the statistics and arg-sets do not depend on the worker count.
//!
//! In [`ScanMode::Pruned`] a subset skips its eigensolve when its Gershgorin
//! discs can neither beat the best `T` nor the best `V` seen so far by any
//! worker. The shared bests only ever move outward, and a stale read just
//! prunes less.

use std::cmp::Ordering;
use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering as AtomicOrdering};
use std::thread;

use crate::eigen_small::jacobi_in_place;
use crate::error::{Error, Result};
use crate::matgen::SymMatrix;

/// Relative slack added to Gershgorin bounds before pruning; covers the
/// rounding error of the computed eigenvalues.
const PRUNE_SLACK: f64 = 1e-9;

/// `C(n, k)` if it fits in 64 bits.
pub fn binomial(n: usize, k: usize) -> Option<u64> {
    binomial_u128(n, k).and_then(|c| u64::try_from(c).ok())
}

fn binomial_u128(n: usize, k: usize) -> Option<u128> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut r: u128 = 1;
    for i in 0..k {
        r = r.checked_mul((n - i) as u128)? / (i as u128 + 1);
    }
    Some(r)
}

fn subset_count(p: usize, m: usize) -> Result<u64> {
    binomial(p, m).ok_or_else(|| Error::CombinatorialExplosion {
        p,
        m,
        count: match binomial_u128(p, m) {
            Some(c) => c.to_string(),
            None => format!("{:.6e}", approx_binomial(p, m)),
        },
    })
}

fn approx_binomial(n: usize, k: usize) -> f64 {
    let k = k.min(n - k);
    (0..k)
        .map(|i| ((n - i) as f64 / (i + 1) as f64).ln())
        .sum::<f64>()
        .exp()
}

/// A sorted set of distinct column indices selecting a principal minor.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct IndexSet(Vec<usize>);

impl IndexSet {
    /// Validates that `indices` is non-empty, strictly increasing and below `p`.
    pub fn new(indices: Vec<usize>, p: usize) -> Result<Self> {
        if indices.is_empty() {
            return Err(Error::Range("index set must not be empty".into()));
        }
        if indices.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Range(format!("indices {indices:?} are not strictly increasing")));
        }
        if let Some(&last) = indices.last() {
            if last >= p {
                return Err(Error::Range(format!("index {last} out of range for dimension {p}")));
            }
        }
        Ok(IndexSet(indices))
    }

    pub fn indices(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Indices joined by `sep`, e.g. `0;2` for `sep = ";"`.
    pub fn join(&self, sep: &str) -> String {
        self.0.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(sep)
    }
}

impl fmt::Display for IndexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}}}", self.join(", "))
    }
}

/// Colex order on subsets of any sizes: compares the sets as bitmasks, i.e.
/// by their largest differing element.
pub fn colex_cmp(a: &[usize], b: &[usize]) -> Ordering {
    let mut ia = a.iter().rev();
    let mut ib = b.iter().rev();
    loop {
        match (ia.next(), ib.next()) {
            (Some(x), Some(y)) if x != y => return x.cmp(y),
            (Some(_), Some(_)) => continue,
            (Some(_), None) => return Ordering::Greater,
            (None, Some(_)) => return Ordering::Less,
            (None, None) => return Ordering::Equal,
        }
    }
}

/// The `rank`-th `m`-subset of `{0, …, p−1}` in colex order.
pub fn unrank_combination(rank: u64, p: usize, m: usize) -> Result<IndexSet> {
    if m == 0 || m > p {
        return Err(Error::Range(format!("subset size {m} not in 1..={p}")));
    }
    let total = subset_count(p, m)?;
    if rank >= total {
        return Err(Error::Range(format!("rank {rank} not below C({p}, {m}) = {total}")));
    }
    let mut set = vec![0; m];
    unrank_into(rank, p, &mut set);
    Ok(IndexSet(set))
}

fn unrank_into(mut rank: u64, p: usize, set: &mut [usize]) {
    let mut upper = p;
    for k in (1..=set.len()).rev() {
        // Largest x < upper with C(x, k) <= rank.
        let mut x = upper - 1;
        while binomial(x, k).unwrap_or(u64::MAX) > rank {
            x -= 1;
        }
        set[k - 1] = x;
        rank -= binomial(x, k).unwrap();
        upper = x;
    }
}

/// Inverse of [`unrank_combination`].
pub fn rank_combination(set: &IndexSet) -> u64 {
    set.0
        .iter()
        .enumerate()
        .map(|(i, &c)| binomial(c, i + 1).expect("rank of a valid subset fits in u64"))
        .sum()
}

/// Advances `set` to its colex successor among subsets of `{0, …, p−1}`.
/// Returns `false` (leaving `set` untouched) at the last subset.
pub fn next_colex(set: &mut [usize], p: usize) -> bool {
    let m = set.len();
    for i in 0..m {
        let limit = if i + 1 < m { set[i + 1] } else { p };
        if set[i] + 1 < limit {
            set[i] += 1;
            for (j, s) in set[..i].iter_mut().enumerate() {
                *s = j;
            }
            return true;
        }
    }
    false
}

/// The `|S| × |S|` principal submatrix `(w_ij)_{i,j ∈ S}`.
pub fn extract_minor(w: &SymMatrix, s: &IndexSet) -> Result<SymMatrix> {
    if let Some(&bad) = s.indices().iter().find(|&&i| i >= w.dim()) {
        return Err(Error::Range(format!(
            "index {bad} out of range for dimension {}",
            w.dim()
        )));
    }
    let k = s.len();
    let mut buf = vec![0.0; k * k];
    extract_into(w, s.indices(), &mut buf);
    SymMatrix::from_full(k, buf, w.tag())
}

#[inline]
fn extract_into(w: &SymMatrix, idx: &[usize], buf: &mut [f64]) {
    let k = idx.len();
    for (a, &i) in idx.iter().enumerate() {
        for (b, &j) in idx.iter().enumerate() {
            buf[a * k + b] = w.get(i, j);
        }
    }
}

/// `max_{i∈S} Σ_{j∈S} |w_ij|`, an upper bound on `λ_1(W_S)`.
///
/// Panics if an index is out of range for `w`.
pub fn gershgorin_upper(w: &SymMatrix, s: &IndexSet) -> f64 {
    let idx = s.indices();
    idx.iter()
        .map(|&i| idx.iter().map(|&j| w.get(i, j).abs()).sum::<f64>())
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Gershgorin disc enclosure `(min_i (a_ii − r_i), max_i (a_ii + r_i))` of a
/// `k × k` buffer.
#[inline]
fn disc_bounds(buf: &[f64], k: usize) -> (f64, f64) {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..k {
        let row = &buf[i * k..(i + 1) * k];
        let radius: f64 = row
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .map(|(_, v)| v.abs())
            .sum();
        lo = lo.min(row[i] - radius);
        hi = hi.max(row[i] + radius);
    }
    (lo, hi)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ScanMode {
    #[default]
    Exhaustive,
    Pruned,
}

impl std::str::FromStr for ScanMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "exact" | "exhaustive" => Ok(ScanMode::Exhaustive),
            "pruned" => Ok(ScanMode::Pruned),
            other => Err(Error::param(format!(
                "unknown scan mode {other:?} (expected exact or pruned)"
            ))),
        }
    }
}

impl fmt::Display for ScanMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ScanMode::Exhaustive => "exhaustive",
            ScanMode::Pruned => "pruned",
        })
    }
}

/// Which subsets a scan covers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SizeMode {
    /// `|S| = m`.
    ExactM,
    /// `1 ≤ |S| ≤ m`.
    UpToM,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ScanOptions {
    pub mode: ScanMode,
    pub workers: usize,
    /// Refuse scans that would visit more subsets than this.
    pub budget: Option<u64>,
}

impl Default for ScanOptions {
    fn default() -> Self {
        ScanOptions {
            mode: ScanMode::Exhaustive,
            workers: 1,
            budget: None,
        }
    }
}

impl ScanOptions {
    pub fn new(mode: ScanMode, workers: usize) -> Self {
        ScanOptions {
            mode,
            workers,
            budget: None,
        }
    }

    pub fn with_budget(mut self, budget: Option<u64>) -> Self {
        self.budget = budget;
        self
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanResult {
    /// Largest `λ_1(W_S)` over the scanned subsets.
    pub t: f64,
    /// Smallest `λ_min(W_S)` over the scanned subsets.
    pub v: f64,
    pub argmax_set: IndexSet,
    pub argmin_set: IndexSet,
    pub size_mode: SizeMode,
    pub m: usize,
    /// Subsets whose eigenvalues were computed.
    pub subsets_visited: u64,
    /// Subsets skipped by the Gershgorin test.
    pub subsets_pruned: u64,
}

impl ScanResult {
    /// The fields that must agree across scan modes and worker counts.
    pub fn statistics(&self) -> (u64, u64, &IndexSet, &IndexSet) {
        (self.t.to_bits(), self.v.to_bits(), &self.argmax_set, &self.argmin_set)
    }
}

struct SharedBounds {
    t: AtomicU64,
    v: AtomicU64,
}

impl SharedBounds {
    fn new() -> Self {
        SharedBounds {
            t: AtomicU64::new(f64::NEG_INFINITY.to_bits()),
            v: AtomicU64::new(f64::INFINITY.to_bits()),
        }
    }

    fn t(&self) -> f64 {
        f64::from_bits(self.t.load(AtomicOrdering::Relaxed))
    }

    fn v(&self) -> f64 {
        f64::from_bits(self.v.load(AtomicOrdering::Relaxed))
    }

    fn raise_t(&self, value: f64) {
        let _ = self
            .t
            .fetch_update(AtomicOrdering::Relaxed, AtomicOrdering::Relaxed, |bits| {
                (value > f64::from_bits(bits)).then_some(value.to_bits())
            });
    }

    fn lower_v(&self, value: f64) {
        let _ = self
            .v
            .fetch_update(AtomicOrdering::Relaxed, AtomicOrdering::Relaxed, |bits| {
                (value < f64::from_bits(bits)).then_some(value.to_bits())
            });
    }
}

#[derive(Debug, Clone)]
struct Partial {
    t: f64,
    t_set: Vec<usize>,
    v: f64,
    v_set: Vec<usize>,
    visited: u64,
    pruned: u64,
}

impl Partial {
    fn empty() -> Self {
        Partial {
            t: f64::NEG_INFINITY,
            t_set: Vec::new(),
            v: f64::INFINITY,
            v_set: Vec::new(),
            visited: 0,
            pruned: 0,
        }
    }

    #[inline]
    fn offer_t(&mut self, value: f64, set: &[usize]) {
        if self.t_set.is_empty() || value > self.t || (value == self.t && colex_cmp(set, &self.t_set) == Ordering::Less)
        {
            self.t = value;
            self.t_set.clear();
            self.t_set.extend_from_slice(set);
        }
    }

    #[inline]
    fn offer_v(&mut self, value: f64, set: &[usize]) {
        if self.v_set.is_empty() || value < self.v || (value == self.v && colex_cmp(set, &self.v_set) == Ordering::Less)
        {
            self.v = value;
            self.v_set.clear();
            self.v_set.extend_from_slice(set);
        }
    }

    fn merge(&mut self, other: Partial) {
        self.visited += other.visited;
        self.pruned += other.pruned;
        if !other.t_set.is_empty() {
            self.offer_t(other.t, &other.t_set);
        }
        if !other.v_set.is_empty() {
            self.offer_v(other.v, &other.v_set);
        }
    }
}

fn scan_range(w: &SymMatrix, k: usize, start: u64, end: u64, mode: ScanMode, shared: &SharedBounds) -> Result<Partial> {
    let p = w.dim();
    let mut out = Partial::empty();
    if start >= end {
        return Ok(out);
    }
    let mut set = vec![0; k];
    unrank_into(start, p, &mut set);
    let mut buf = vec![0.0; k * k];
    for rank in start..end {
        extract_into(w, &set, &mut buf);
        let mut skip = false;
        if mode == ScanMode::Pruned {
            let (lo, hi) = disc_bounds(&buf, k);
            let slack = PRUNE_SLACK * (1.0 + lo.abs().max(hi.abs()));
            skip = hi + slack < shared.t() && lo - slack > shared.v();
        }
        if skip {
            out.pruned += 1;
        } else {
            jacobi_in_place(&mut buf, k)?;
            let (mut top, mut bottom) = (f64::NEG_INFINITY, f64::INFINITY);
            for i in 0..k {
                let d = buf[i * k + i];
                top = top.max(d);
                bottom = bottom.min(d);
            }
            out.visited += 1;
            out.offer_t(top, &set);
            out.offer_v(bottom, &set);
            if mode == ScanMode::Pruned {
                shared.raise_t(top);
                shared.lower_v(bottom);
            }
        }
        if rank + 1 < end {
            next_colex(&mut set, p);
        }
    }
    Ok(out)
}

fn scan_size(w: &SymMatrix, k: usize, total: u64, opts: &ScanOptions, shared: &SharedBounds) -> Result<Partial> {
    let workers = opts
        .workers
        .max(1)
        .min(usize::try_from(total).unwrap_or(usize::MAX))
        .max(1);
    let bound = |i: usize| ((total as u128 * i as u128) / workers as u128) as u64;
    if workers == 1 {
        return scan_range(w, k, 0, total, opts.mode, shared);
    }
    let partials: Vec<Result<Partial>> = thread::scope(|scope| {
        let handles: Vec<_> = (0..workers)
            .map(|i| {
                let (start, end) = (bound(i), bound(i + 1));
                scope.spawn(move || scan_range(w, k, start, end, opts.mode, shared))
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("scan worker panicked"))
            .collect()
    });
    let mut merged = Partial::empty();
    for part in partials {
        merged.merge(part?);
    }
    Ok(merged)
}

fn check_size(w: &SymMatrix, m: usize) -> Result<()> {
    if m == 0 || m > w.dim() {
        return Err(Error::param(format!("m = {m} must lie in 1..={}", w.dim())));
    }
    Ok(())
}

fn check_budget(required: u64, opts: &ScanOptions) -> Result<()> {
    match opts.budget {
        Some(budget) if required > budget => Err(Error::Budget { required, budget }),
        _ => Ok(()),
    }
}

fn finish(partial: Partial, size_mode: SizeMode, m: usize) -> ScanResult {
    ScanResult {
        t: partial.t,
        v: partial.v,
        argmax_set: IndexSet(partial.t_set),
        argmin_set: IndexSet(partial.v_set),
        size_mode,
        m,
        subsets_visited: partial.visited,
        subsets_pruned: partial.pruned,
    }
}

/// `T = max_{|S|=m} λ_1(W_S)` and `V = min_{|S|=m} λ_min(W_S)`.
pub fn scan_exact_m(w: &SymMatrix, m: usize, opts: &ScanOptions) -> Result<ScanResult> {
    check_size(w, m)?;
    let total = subset_count(w.dim(), m)?;
    check_budget(total, opts)?;
    let shared = SharedBounds::new();
    let partial = scan_size(w, m, total, opts, &shared)?;
    Ok(finish(partial, SizeMode::ExactM, m))
}

/// The same extrema over all `1 ≤ |S| ≤ m`.
pub fn scan_le_m(w: &SymMatrix, m: usize, opts: &ScanOptions) -> Result<ScanResult> {
    check_size(w, m)?;
    let p = w.dim();
    let mut totals = Vec::with_capacity(m);
    let mut required: u64 = 0;
    for k in 1..=m {
        let c = subset_count(p, k)?;
        required = required.checked_add(c).ok_or_else(|| Error::CombinatorialExplosion {
            p,
            m,
            count: format!("sum over k <= {m} of C({p}, k) > {}", u64::MAX),
        })?;
        totals.push(c);
    }
    check_budget(required, opts)?;
    let shared = SharedBounds::new();
    let mut merged = Partial::empty();
    for (k, &total) in (1..=m).zip(&totals) {
        merged.merge(scan_size(w, k, total, opts, &shared)?);
    }
    Ok(finish(merged, SizeMode::UpToM, m))
}
