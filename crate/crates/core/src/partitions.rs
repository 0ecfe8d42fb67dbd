//! Partition classes: overpartition representation, membership validation,
//! exhaustive enumeration and statistic tables.
//!
//! The enumeration here is the brute-force side of every identity check:
//! it generates class members directly (depth-first, largest part first,
//! with residue and overline filters applied during generation) and packs
//! the resulting statistics into a [`TruncatedSeries`].
//!
//! Parts are ordered by the chain `1 < 1~ < 2 < 2~ < ...`: an overlined copy
//! is greater than the plain copy of the same value. Display sequences are
//! non-increasing in that order, with one exception: in the k-th-occurrence
//! flavor the single optional overlined copy of a value sits at the k-th
//! occurrence of that value.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::series::{Aux, TruncatedSeries};

/// Default cap on generated members per enumeration call.
pub const DEFAULT_CAPACITY: u64 = 10_000_000;

/// One part of an overpartition: a positive value plus an overline flag.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct OverPart {
    #[serde(rename = "v")]
    pub value: u32,
    #[serde(rename = "o")]
    pub overlined: bool,
}

impl OverPart {
    pub fn plain(value: u32) -> Self {
        OverPart {
            value,
            overlined: false,
        }
    }

    pub fn overlined(value: u32) -> Self {
        OverPart {
            value,
            overlined: true,
        }
    }

    /// Position in the part order `1 < 1~ < 2 < 2~ < ...`.
    fn chain_key(self) -> (u32, bool) {
        (self.value, self.overlined)
    }
}

/// A sequence of parts. Structural invariants (enforced on construction):
/// all values positive, at most one overlined copy per value. Ordering
/// conventions are class-specific and checked by [`ClassSpec::validate`].
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Overpartition {
    parts: Vec<OverPart>,
}

impl Overpartition {
    /// The empty partition (the unique member of weight 0 in every class).
    pub fn empty() -> Self {
        Overpartition { parts: Vec::new() }
    }

    /// Wraps a part sequence, checking the structural invariants only.
    pub fn new(parts: Vec<OverPart>) -> Result<Self> {
        let mut overlined: Vec<u32> = Vec::new();
        for p in &parts {
            if p.value == 0 {
                return Err(Error::Parse("part values must be positive".into()));
            }
            if p.overlined {
                if overlined.contains(&p.value) {
                    return Err(Error::Parse(format!(
                        "value {} is overlined more than once",
                        p.value
                    )));
                }
                overlined.push(p.value);
            }
        }
        Ok(Overpartition { parts })
    }

    /// Canonical display of a multiset of parts: non-increasing, overlined
    /// copies before equal plain copies.
    pub fn from_multiset_standard(mut parts: Vec<OverPart>) -> Result<Self> {
        parts.sort_by(|x, y| y.chain_key().cmp(&x.chain_key()));
        Self::new(parts)
    }

    /// Canonical display for the k-th-occurrence flavor: values
    /// non-increasing, and the overlined copy of a value placed as its k-th
    /// occurrence. An overlined value needs multiplicity at least `k`.
    pub fn from_multiset_kth_occurrence(parts: Vec<OverPart>, k: u32) -> Result<Self> {
        let mut by_value: BTreeMap<u32, (usize, bool)> = BTreeMap::new();
        for p in &parts {
            let entry = by_value.entry(p.value).or_insert((0, false));
            entry.0 += 1;
            entry.1 |= p.overlined;
        }
        let mut out = Vec::with_capacity(parts.len());
        for (&value, &(count, has_overline)) in by_value.iter().rev() {
            if has_overline && (count as u64) < k as u64 {
                return Err(Error::Internal(format!(
                    "overlined value {value} has multiplicity {count} < {k}"
                )));
            }
            for i in 0..count {
                let overlined = has_overline && (i + 1) as u32 == k;
                out.push(OverPart { value, overlined });
            }
        }
        Self::new(out)
    }

    pub fn parts(&self) -> &[OverPart] {
        &self.parts
    }

    /// Number of parts.
    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    /// Sum of part values.
    pub fn weight(&self) -> u64 {
        self.parts.iter().map(|p| p.value as u64).sum()
    }

    /// Number of overlined parts.
    pub fn overlined_count(&self) -> u32 {
        self.parts.iter().filter(|p| p.overlined).count() as u32
    }

    /// Counts of parts congruent to `a` and to `b` modulo `k`.
    pub fn residue_counts(&self, a: u32, b: u32, k: u32) -> (u32, u32) {
        let mut count_a = 0;
        let mut count_b = 0;
        for p in &self.parts {
            let res = p.value % k;
            if res == a % k {
                count_a += 1;
            } else if res == b % k {
                count_b += 1;
            }
        }
        (count_a, count_b)
    }
}

impl fmt::Display for Overpartition {
    /// Tilde notation: comma-separated values, overline as a trailing `~`;
    /// the empty partition prints as `()`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.parts.is_empty() {
            return write!(f, "()");
        }
        for (i, p) in self.parts.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}", p.value)?;
            if p.overlined {
                write!(f, "~")?;
            }
        }
        Ok(())
    }
}

impl FromStr for Overpartition {
    type Err = Error;

    /// Parses the tilde notation, with or without surrounding parentheses.
    fn from_str(s: &str) -> Result<Self> {
        let body = s.trim();
        let body = body
            .strip_prefix('(')
            .and_then(|rest| rest.strip_suffix(')'))
            .unwrap_or(body)
            .trim();
        if body.is_empty() {
            return Ok(Overpartition::empty());
        }
        let mut parts = Vec::new();
        for token in body.split(',') {
            let token = token.trim();
            let (digits, overlined) = match token.strip_suffix('~') {
                Some(d) => (d, true),
                None => (token, false),
            };
            let value: u32 = digits
                .parse()
                .map_err(|_| Error::Parse(format!("bad part token {token:?}")))?;
            parts.push(OverPart { value, overlined });
        }
        Overpartition::new(parts)
    }
}

/// Parameters identifying a partition class.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ClassSpec {
    /// Partitions with all parts congruent to `a` or `b` modulo `k`,
    /// `1 <= a < b <= k`. Statistics: (parts ≡ a, parts ≡ b).
    Abk { a: u32, b: u32, k: u32 },
    /// Overpartitions where only parts congruent to `r` modulo `k` may be
    /// overlined, `1 <= r <= k`. Statistics: (overlined parts, parts).
    Okr { k: u32, r: u32 },
    /// Partitions where the k-th occurrence of a value may be overlined.
    /// Statistics: (overlined parts, parts).
    KPart { k: u32 },
    /// Members of [`ClassSpec::Okr`] whose smallest part is congruent to
    /// 1..r modulo k and where a rise of the window residue between
    /// consecutive parts forces the later part to be overlined.
    /// Statistics: (overlined parts, parts).
    Mkr { k: u32, r: u32 },
}

impl ClassSpec {
    pub fn abk(a: u32, b: u32, k: u32) -> Result<Self> {
        if !(1 <= a && a < b && b <= k) {
            return Err(Error::Domain(format!(
                "need 1 <= a < b <= k, got a={a} b={b} k={k}"
            )));
        }
        Ok(ClassSpec::Abk { a, b, k })
    }

    pub fn okr(k: u32, r: u32) -> Result<Self> {
        if !(1 <= r && r <= k) {
            return Err(Error::Domain(format!("need 1 <= r <= k, got k={k} r={r}")));
        }
        Ok(ClassSpec::Okr { k, r })
    }

    pub fn kpart(k: u32) -> Result<Self> {
        if k < 1 {
            return Err(Error::Domain("need k >= 1".into()));
        }
        Ok(ClassSpec::KPart { k })
    }

    pub fn mkr(k: u32, r: u32) -> Result<Self> {
        if !(1 <= r && r <= k) {
            return Err(Error::Domain(format!("need 1 <= r <= k, got k={k} r={r}")));
        }
        Ok(ClassSpec::Mkr { k, r })
    }

    /// Modulus of the class.
    pub fn modulus(&self) -> u32 {
        match *self {
            ClassSpec::Abk { k, .. }
            | ClassSpec::Okr { k, .. }
            | ClassSpec::KPart { k }
            | ClassSpec::Mkr { k, .. } => k,
        }
    }

    /// True iff `p` is a member of the class, including the class-specific
    /// display convention.
    pub fn validate(&self, p: &Overpartition) -> bool {
        match *self {
            ClassSpec::Abk { a, b, k } => validate_abk(p, a, b, k),
            ClassSpec::Okr { k, r } => validate_okr(p, k, r),
            ClassSpec::KPart { k } => validate_kpart(p, k),
            ClassSpec::Mkr { k, r } => validate_okr(p, k, r) && validate_mkr_extra(p, k, r),
        }
    }

    /// Statistic key of a member: (parts ≡ a, parts ≡ b) for the
    /// residue-pair class, (overlined parts, parts) for the others.
    pub fn stat_key(&self, p: &Overpartition) -> StatKey {
        match *self {
            ClassSpec::Abk { a, b, k } => p.residue_counts(a, b, k),
            _ => (p.overlined_count(), p.len() as u32),
        }
    }
}

impl fmt::Display for ClassSpec {
    /// Class string syntax used by the command line: `abk:a,b,k`,
    /// `okr:k,r`, `kpart:k`, `mkr:k,r`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            ClassSpec::Abk { a, b, k } => write!(f, "abk:{a},{b},{k}"),
            ClassSpec::Okr { k, r } => write!(f, "okr:{k},{r}"),
            ClassSpec::KPart { k } => write!(f, "kpart:{k}"),
            ClassSpec::Mkr { k, r } => write!(f, "mkr:{k},{r}"),
        }
    }
}

impl FromStr for ClassSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (name, rest) = s
            .split_once(':')
            .ok_or_else(|| Error::Parse(format!("bad class string {s:?}")))?;
        let nums: Vec<u32> = rest
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<u32>()
                    .map_err(|_| Error::Parse(format!("bad class parameter {t:?}")))
            })
            .collect::<Result<_>>()?;
        match (name.trim(), nums.as_slice()) {
            ("abk", [a, b, k]) => ClassSpec::abk(*a, *b, *k),
            ("okr", [k, r]) => ClassSpec::okr(*k, *r),
            ("kpart", [k]) => ClassSpec::kpart(*k),
            ("mkr", [k, r]) => ClassSpec::mkr(*k, *r),
            _ => Err(Error::Parse(format!("bad class string {s:?}"))),
        }
    }
}

/// Statistic key: meaning depends on the class (see [`ClassSpec::stat_key`]).
pub type StatKey = (u32, u32);

/// The unique representative `s` of `v` modulo `k` in the window
/// `[-k+r+1, r]`.
pub fn window_residue(v: u32, k: u32, r: u32) -> i64 {
    let t = (v as i64 - r as i64).rem_euclid(k as i64);
    if t == 0 {
        r as i64
    } else {
        r as i64 + t - k as i64
    }
}

fn validate_abk(p: &Overpartition, a: u32, b: u32, k: u32) -> bool {
    let parts = p.parts();
    for w in parts.windows(2) {
        if w[0].value < w[1].value {
            return false;
        }
    }
    parts.iter().all(|part| {
        !part.overlined && (part.value % k == a % k || part.value % k == b % k)
    })
}

fn validate_okr(p: &Overpartition, k: u32, r: u32) -> bool {
    let parts = p.parts();
    for part in parts {
        if part.overlined && part.value % k != r % k {
            return false;
        }
    }
    // non-increasing in the chain order; equal overlined copies are already
    // excluded structurally
    parts
        .windows(2)
        .all(|w| w[0].chain_key() >= w[1].chain_key())
}

fn validate_kpart(p: &Overpartition, k: u32) -> bool {
    let parts = p.parts();
    for w in parts.windows(2) {
        if w[0].value < w[1].value {
            return false;
        }
    }
    // within each run of equal values the overlined copy, if present, must
    // be the k-th occurrence
    let mut i = 0;
    while i < parts.len() {
        let value = parts[i].value;
        let mut j = i;
        while j < parts.len() && parts[j].value == value {
            j += 1;
        }
        for (offset, part) in parts[i..j].iter().enumerate() {
            if part.overlined && (offset + 1) as u32 != k {
                return false;
            }
        }
        i = j;
    }
    true
}

fn validate_mkr_extra(p: &Overpartition, k: u32, r: u32) -> bool {
    let parts = p.parts();
    if let Some(last) = parts.last() {
        let rep = ((last.value - 1) % k) + 1;
        if rep > r {
            return false;
        }
    }
    for w in parts.windows(2) {
        let lhs = window_residue(w[0].value, k, r);
        let rhs = window_residue(w[1].value, k, r);
        if lhs < rhs && !w[1].overlined {
            return false;
        }
    }
    true
}

/// Streams every member of weight `n` in `class` to `visit`, in an
/// unspecified generation order, stopping with [`Error::Capacity`] once
/// more than `capacity` members have been produced.
pub fn for_each_member<F>(n: u64, class: &ClassSpec, capacity: u64, mut visit: F) -> Result<()>
where
    F: FnMut(&Overpartition),
{
    let mut produced: u64 = 0;
    let mut emit = |p: &Overpartition| -> Result<()> {
        produced += 1;
        if produced > capacity {
            return Err(Error::Capacity { limit: capacity });
        }
        visit(p);
        Ok(())
    };
    match *class {
        ClassSpec::Abk { a, b, k } => {
            let mut stack = Vec::new();
            enum_abk(n, u32::MAX, a, b, k, &mut stack, &mut emit)
        }
        ClassSpec::Okr { k, r } => {
            let mut stack = Vec::new();
            enum_okr(n, None, k, r, false, &mut stack, &mut emit)
        }
        ClassSpec::Mkr { k, r } => {
            let mut stack = Vec::new();
            enum_okr(n, None, k, r, true, &mut stack, &mut emit)
        }
        ClassSpec::KPart { k } => enum_kpart(n, k, &mut emit),
    }
}

fn enum_abk<F>(
    remaining: u64,
    max_part: u32,
    a: u32,
    b: u32,
    k: u32,
    stack: &mut Vec<OverPart>,
    emit: &mut F,
) -> Result<()>
where
    F: FnMut(&Overpartition) -> Result<()>,
{
    if remaining == 0 {
        return emit(&Overpartition {
            parts: stack.clone(),
        });
    }
    let top = remaining.min(max_part as u64) as u32;
    for v in (1..=top).rev() {
        let res = v % k;
        if res != a % k && res != b % k {
            continue;
        }
        stack.push(OverPart::plain(v));
        enum_abk(remaining - v as u64, v, a, b, k, stack, emit)?;
        stack.pop();
    }
    Ok(())
}

/// Depth-first generation of (k,r)-overpartitions in chain-descending
/// display order. With `modulo` set, the rise condition and the smallest
/// part residue of the modulo flavor are enforced during generation.
fn enum_okr<F>(
    remaining: u64,
    prev: Option<OverPart>,
    k: u32,
    r: u32,
    modulo: bool,
    stack: &mut Vec<OverPart>,
    emit: &mut F,
) -> Result<()>
where
    F: FnMut(&Overpartition) -> Result<()>,
{
    if remaining == 0 {
        if modulo {
            if let Some(last) = stack.last() {
                let rep = ((last.value - 1) % k) + 1;
                if rep > r {
                    return Ok(());
                }
            }
        }
        return emit(&Overpartition {
            parts: stack.clone(),
        });
    }
    let top = match prev {
        Some(p) => remaining.min(p.value as u64) as u32,
        None => remaining as u32,
    };
    for v in (1..=top).rev() {
        // descending chain order: overlined copy first
        let choices = [OverPart::overlined(v), OverPart::plain(v)];
        for part in &choices {
            if part.overlined && v % k != r % k {
                continue;
            }
            if let Some(p) = prev {
                if part.chain_key() > p.chain_key() {
                    continue;
                }
                if part.overlined && p.overlined && p.value == v {
                    continue;
                }
                if modulo {
                    let rise = window_residue(p.value, k, r) < window_residue(v, k, r);
                    if rise && !part.overlined {
                        continue;
                    }
                }
            }
            stack.push(*part);
            enum_okr(remaining - v as u64, Some(*part), k, r, modulo, stack, emit)?;
            stack.pop();
        }
    }
    Ok(())
}

/// Members of the k-th-occurrence flavor: plain partitions of `n` together
/// with an overlined subset of the values of multiplicity at least `k`.
fn enum_kpart<F>(n: u64, k: u32, emit: &mut F) -> Result<()>
where
    F: FnMut(&Overpartition) -> Result<()>,
{
    fn rec<F>(
        remaining: u64,
        max_part: u32,
        k: u32,
        runs: &mut Vec<(u32, u32)>,
        emit: &mut F,
    ) -> Result<()>
    where
        F: FnMut(&Overpartition) -> Result<()>,
    {
        if remaining == 0 {
            return decorate(runs, 0, k, &mut Vec::new(), emit);
        }
        let top = remaining.min(max_part as u64) as u32;
        for v in (1..=top).rev() {
            let mut count = 0;
            let mut used = 0u64;
            // each value forms one run with a known multiplicity; descend
            // with strictly smaller parts
            while used + v as u64 <= remaining {
                count += 1;
                used += v as u64;
                runs.push((v, count));
                rec(remaining - used, v - 1, k, runs, emit)?;
                runs.pop();
            }
        }
        Ok(())
    }

    /// Expands value runs into display sequences over all overline choices.
    fn decorate<F>(
        runs: &[(u32, u32)],
        idx: usize,
        k: u32,
        parts: &mut Vec<OverPart>,
        emit: &mut F,
    ) -> Result<()>
    where
        F: FnMut(&Overpartition) -> Result<()>,
    {
        if idx == runs.len() {
            return emit(&Overpartition {
                parts: parts.clone(),
            });
        }
        let (value, count) = runs[idx];
        let before = parts.len();
        for _ in 0..count {
            parts.push(OverPart::plain(value));
        }
        decorate(runs, idx + 1, k, parts, emit)?;
        if count >= k {
            parts[before + k as usize - 1].overlined = true;
            decorate(runs, idx + 1, k, parts, emit)?;
            parts[before + k as usize - 1].overlined = false;
        }
        parts.truncate(before);
        Ok(())
    }

    let mut runs = Vec::new();
    rec(n, n.min(u32::MAX as u64) as u32, k, &mut runs, emit)
}

/// All members of weight `n`, duplicate-free, sorted descending by display
/// sequence (lexicographic on the part chain order).
pub fn enumerate(n: u64, class: &ClassSpec, capacity: u64) -> Result<Vec<Overpartition>> {
    let mut out = Vec::new();
    for_each_member(n, class, capacity, |p| out.push(p.clone()))?;
    out.sort_by(|x, y| {
        let kx: Vec<_> = x.parts().iter().map(|p| p.chain_key()).collect();
        let ky: Vec<_> = y.parts().iter().map(|p| p.chain_key()).collect();
        ky.cmp(&kx)
    });
    Ok(out)
}

/// Members of weight `n` grouped by statistic key.
pub fn count_by_stats(n: u64, class: &ClassSpec, capacity: u64) -> Result<BTreeMap<StatKey, u64>> {
    let mut table = BTreeMap::new();
    for_each_member(n, class, capacity, |p| {
        *table.entry(class.stat_key(p)).or_insert(0) += 1;
    })?;
    Ok(table)
}

/// Packs the statistic tables for all weights `0..=order` into a series:
/// the coefficient of `(q^n, aux)` is the number of weight-`n` members with
/// statistics `aux`. The capacity limit applies to the whole call.
pub fn class_series_enumerated(
    class: &ClassSpec,
    order: usize,
    capacity: u64,
) -> Result<TruncatedSeries> {
    let mut entries: Vec<(usize, Aux, i128)> = Vec::new();
    let mut budget = capacity;
    for n in 0..=order {
        let mut table: BTreeMap<StatKey, u64> = BTreeMap::new();
        for_each_member(n as u64, class, budget, |p| {
            *table.entry(class.stat_key(p)).or_insert(0) += 1;
        })?;
        let used: u64 = table.values().sum();
        budget -= used;
        for ((e0, e1), count) in table {
            entries.push((n, Aux::new(e0, e1), count as i128));
        }
    }
    Ok(TruncatedSeries::from_entries(order, 2, entries))
}
