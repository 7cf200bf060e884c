//! Equidistribution, net and sequence verification by exact counting.
//!
//! A point lies in a level-`k` axis cell exactly when its first `k` digits
//! spell the cell's numerator. Every check therefore hashes digit prefixes
//! and compares bucket sizes with the required counts `G_{m-|I|}`.

use std::collections::HashMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::generators::PointSet;
use crate::intervals::{partition, prime_intervals, ElemInterval};
use crate::numeration::{encode, fib, g_count, index_of, shift, BaseSpec, DigitWord};

/// `sum k_j` plus the number of nonzero entries.
pub fn rho(kvec: &[usize]) -> usize {
    kvec.iter().sum::<usize>() + kvec.iter().filter(|&&k| k > 0).count()
}

/// `G_{m-|I|}`, continued below zero by `G_{-1} = 1`, `G_{-2} = 0` and, for
/// the golden ratio, `F^{-3} = 1`.
pub fn required_count(base: &BaseSpec, m: usize, logvol: usize) -> Result<u64> {
    let idx = m as i64 - logvol as i64;
    match idx {
        i if i >= 0 => g_count(base, i as usize),
        -1 => Ok(1),
        -2 => Ok(0),
        -3 if base.is_phi() => Ok(1),
        _ => Err(Error::Domain(format!(
            "partition too fine: required count index {idx} for m={m}, |I|={logvol}"
        ))),
    }
}

/// A cell in a report.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IntervalLabel {
    pub levels: Vec<usize>,
    pub numerators: Vec<String>,
    pub types: Vec<u8>,
    pub logvol: usize,
}

impl From<&ElemInterval> for IntervalLabel {
    fn from(iv: &ElemInterval) -> Self {
        IntervalLabel {
            levels: iv.levels(),
            numerators: iv.label(),
            types: iv.axes.iter().map(|a| a.itype).collect(),
            logvol: iv.logvol,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Failure {
    pub interval: IntervalLabel,
    pub expected: u64,
    pub actual: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EquidReport {
    pub kvec: Vec<usize>,
    pub passed: bool,
    pub failures: Vec<Failure>,
}

fn cell_key(point: &[DigitWord], kvec: &[usize]) -> Vec<u8> {
    let mut key = Vec::with_capacity(kvec.iter().sum());
    for (w, &k) in point.iter().zip(kvec) {
        key.extend(w.prefix(k));
    }
    key
}

fn interval_key(iv: &ElemInterval) -> Vec<u8> {
    let mut key = Vec::new();
    for a in &iv.axes {
        key.extend(a.numerator.prefix(a.level));
    }
    key
}

fn quadratic_base(set: &PointSet, kvec: &[usize]) -> Result<BaseSpec> {
    let base = set.base()?;
    if kvec.len() != set.s {
        return Err(Error::Dimension {
            expected: set.s,
            got: kvec.len(),
        });
    }
    Ok(base)
}

/// `sum_I G_{m-|I|}` over the full `kvec`-partition, or `None` when some
/// index falls outside the convention.
fn expected_total(base: &BaseSpec, m: usize, kvec: &[usize]) -> Result<Option<u64>> {
    // histogram of |I| over the product partition
    let mut hist: HashMap<usize, u64> = HashMap::from([(0, 1)]);
    for &k in kvec {
        let cells = crate::intervals::partition_1d(base, k)?;
        let mut axis: HashMap<usize, u64> = HashMap::new();
        for c in &cells {
            *axis.entry(c.log_length(base)).or_default() += 1;
        }
        let mut next: HashMap<usize, u64> = HashMap::new();
        for (&a, &na) in &hist {
            for (&b, &nb) in &axis {
                *next.entry(a + b).or_default() += na * nb;
            }
        }
        hist = next;
    }
    let mut total = 0u64;
    for (&logvol, &n) in &hist {
        match required_count(base, m, logvol) {
            Ok(c) => total += c * n,
            Err(_) => return Ok(None),
        }
    }
    Ok(Some(total))
}

fn run_check(set: &PointSet, kvec: &[usize], strong: bool) -> Result<EquidReport> {
    let base = quadratic_base(set, kvec)?;
    let m = set.m;
    let n = g_count(&base, m)?;
    if set.len() as u64 != n {
        return Err(Error::Precondition(format!(
            "set has {} points, G_{m} = {n}",
            set.len()
        )));
    }
    if let Some(total) = expected_total(&base, m, kvec)? {
        if total != n {
            return Err(Error::Invariant(format!(
                "required counts over the {kvec:?}-partition sum to {total}, not G_{m} = {n}"
            )));
        }
    }
    let mut counts: HashMap<Vec<u8>, u64> = HashMap::new();
    for p in &set.points {
        *counts.entry(cell_key(p, kvec)).or_default() += 1;
    }
    let cells = if strong {
        partition(&base, kvec)?
    } else {
        prime_intervals(&base, kvec)?
    };
    let mut failures = Vec::new();
    for iv in &cells {
        let expected = required_count(&base, m, iv.logvol)?;
        let actual = counts.get(&interval_key(iv)).copied().unwrap_or(0);
        if actual != expected {
            failures.push(Failure {
                interval: iv.into(),
                expected,
                actual,
            });
        }
    }
    Ok(EquidReport {
        kvec: kvec.to_vec(),
        passed: failures.is_empty(),
        failures,
    })
}

/// Checks every prime elementary `kvec`-interval for exactly `G_{m-|I|}` points.
pub fn check_equidist(set: &PointSet, kvec: &[usize]) -> Result<EquidReport> {
    run_check(set, kvec, false)
}

/// Checks every cell of the `mvec`-partition, prime or not.
pub fn check_strong(set: &PointSet, mvec: &[usize]) -> Result<EquidReport> {
    run_check(set, mvec, true)
}

/// Which level vectors a net must handle at parameter `t`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Threshold {
    /// `rho(k) <= m + 2 - t` in the golden ratio, `rho(k) <= m - t` otherwise.
    #[default]
    Rho,
    /// Plain level sum `k_1 + ... + k_s` against the same bound.
    LevelSum,
}

fn bound_at(base: &BaseSpec, m: usize, t: usize) -> Option<usize> {
    let top = if base.is_phi() { m + 2 } else { m };
    top.checked_sub(t)
}

fn measure(kvec: &[usize], threshold: Threshold) -> usize {
    match threshold {
        Threshold::Rho => rho(kvec),
        Threshold::LevelSum => kvec.iter().sum(),
    }
}

/// All level vectors of length `s` whose measure is at most `bound`.
pub fn level_vectors(s: usize, bound: usize, threshold: Threshold) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = vec![0usize; s];
    fn rec(
        j: usize,
        cur: &mut Vec<usize>,
        bound: usize,
        threshold: Threshold,
        out: &mut Vec<Vec<usize>>,
    ) {
        if j == cur.len() {
            if measure(cur, threshold) <= bound {
                out.push(cur.clone());
            }
            return;
        }
        for k in 0..=bound {
            cur[j] = k;
            if measure(&cur[..=j], threshold) > bound {
                break;
            }
            rec(j + 1, cur, bound, threshold, out);
        }
        cur[j] = 0;
    }
    rec(0, &mut cur, bound, threshold, &mut out);
    out
}

pub fn is_net(set: &PointSet, t: usize) -> Result<bool> {
    is_net_with(set, t, Threshold::Rho)
}

pub fn is_net_with(set: &PointSet, t: usize, threshold: Threshold) -> Result<bool> {
    Ok(first_failure(set, t, threshold)?.is_none())
}

fn first_failure(set: &PointSet, t: usize, threshold: Threshold) -> Result<Option<EquidReport>> {
    let base = set.base()?;
    let Some(bound) = bound_at(&base, set.m, t) else {
        return Ok(None);
    };
    // a real failure outranks a cell whose count lies outside the convention
    let mut deferred = None;
    for kvec in level_vectors(set.s, bound, threshold) {
        match check_equidist(set, &kvec) {
            Ok(rep) if !rep.passed => return Ok(Some(rep)),
            Ok(_) => {}
            Err(e) => {
                deferred.get_or_insert(e);
            }
        }
    }
    deferred.map_or(Ok(None), Err)
}

#[derive(Clone, Debug, Serialize)]
pub struct NetReport {
    pub m: usize,
    pub s: usize,
    pub t_min: usize,
    pub checks: Vec<EquidReport>,
    /// A failing check at `t_min - 1`, absent when `t_min = 0`.
    #[serde(skip)]
    pub worst: Option<EquidReport>,
}

impl NetReport {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// Smallest `t` for which the set is a `(t, m, s)`-net.
pub fn net_t(set: &PointSet) -> Result<NetReport> {
    net_t_with(set, Threshold::Rho)
}

pub fn net_t_with(set: &PointSet, threshold: Threshold) -> Result<NetReport> {
    let base = set.base()?;
    let top = bound_at(&base, set.m, 0).unwrap_or(0);
    // Coarse levels first: the first failing measure fixes t_min, and finer
    // levels, which may fall outside the count convention, are never needed.
    let mut by_measure: Vec<Vec<Vec<usize>>> = vec![Vec::new(); top + 1];
    for k in level_vectors(set.s, top, threshold) {
        by_measure[measure(&k, threshold)].push(k);
    }
    let mut checks = Vec::new();
    let mut worst = None;
    let mut t_min = 0;
    for (level, kvecs) in by_measure.iter().enumerate() {
        let results: Vec<Result<EquidReport>> =
            kvecs.par_iter().map(|k| check_equidist(set, k)).collect();
        worst = results.iter().flatten().find(|c| !c.passed).cloned();
        if worst.is_none() {
            checks.extend(results.into_iter().collect::<Result<Vec<_>>>()?);
        } else {
            checks.extend(results.into_iter().flatten());
        }
        if worst.is_some() {
            t_min = top + 1 - level;
            break;
        }
    }
    Ok(NetReport {
        m: set.m,
        s: set.s,
        t_min,
        checks,
        worst,
    })
}

/// Where the `k`-th window of level `m` starts.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum WindowStart {
    /// `k (.) phi^(m+1)`.
    #[default]
    Verbatim,
    /// `k (.) phi^m`, offered for experiments only.
    Shifted,
}

#[derive(Clone, Debug, Serialize)]
pub struct WindowCheck {
    pub m: usize,
    pub k: Option<u64>,
    pub start: u64,
    pub passed: bool,
    pub witness: Option<EquidReport>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SequenceReport {
    pub t: usize,
    pub passed: bool,
    pub windows: Vec<WindowCheck>,
}

/// A sequence given by its terms, one `s`-dimensional point per index.
pub trait Sequence {
    fn dim(&self) -> usize;
    fn term(&self, i: u64) -> Result<Vec<DigitWord>>;
}

impl<F> Sequence for (usize, F)
where
    F: Fn(u64) -> Result<Vec<DigitWord>>,
{
    fn dim(&self) -> usize {
        self.0
    }

    fn term(&self, i: u64) -> Result<Vec<DigitWord>> {
        (self.1)(i)
    }
}

impl Sequence for PointSet {
    fn dim(&self) -> usize {
        self.s
    }

    fn term(&self, i: u64) -> Result<Vec<DigitWord>> {
        self.points.get(i as usize).cloned().ok_or_else(|| {
            Error::Range(format!("term {i} beyond the {} stored points", self.len()))
        })
    }
}

fn window(
    base: &BaseSpec,
    seq: &dyn Sequence,
    start: u64,
    m: usize,
    t: usize,
) -> Result<(bool, Option<EquidReport>)> {
    let n = fib(m as i64)?;
    let points = (start..start + n)
        .map(|i| seq.term(i))
        .collect::<Result<Vec<_>>>()?;
    let set = PointSet::new(*base, seq.dim(), m, points);
    let fail = first_failure(&set, t, Threshold::Rho)?;
    Ok((fail.is_none(), fail))
}

/// Checks the `(t, s)`-sequence property: for `t <= m <= m_max` and
/// `0 <= k <= k_max`, the `F^m` terms from `k (.) phi^(m+1)` form a `(t, m, s)`-net.
pub fn verify_sequence(
    seq: &dyn Sequence,
    t: usize,
    m_max: usize,
    k_max: u64,
    start: WindowStart,
) -> Result<SequenceReport> {
    let phi = BaseSpec::phi();
    let mut windows = Vec::new();
    for m in t..=m_max {
        let offset = match start {
            WindowStart::Verbatim => m as i64 + 1,
            WindowStart::Shifted => m as i64,
        };
        for k in 0..=k_max {
            let first = index_of(&phi, &shift(&encode(&phi, k)?, offset)?)?;
            let (passed, witness) = window(&phi, seq, first, m, t)?;
            windows.push(WindowCheck {
                m,
                k: Some(k),
                start: first,
                passed,
                witness,
            });
        }
    }
    Ok(SequenceReport {
        t,
        passed: windows.iter().all(|w| w.passed),
        windows,
    })
}

/// Checks the weak `(t, s)`-sequence property: every prefix of `F^m` terms,
/// `t <= m <= m_max`, is a `(t, m, s)`-net.
pub fn verify_weak(seq: &dyn Sequence, t: usize, m_max: usize) -> Result<SequenceReport> {
    let phi = BaseSpec::phi();
    let mut windows = Vec::new();
    for m in t..=m_max {
        let (passed, witness) = window(&phi, seq, 0, m, t)?;
        windows.push(WindowCheck {
            m,
            k: None,
            start: 0,
            passed,
            witness,
        });
    }
    Ok(SequenceReport {
        t,
        passed: windows.iter().all(|w| w.passed),
        windows,
    })
}

/// Occupancy of one group of four prime cells `I_{i,j}(a, b; m-k, k)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Quad {
    pub k: usize,
    pub x_anchor: String,
    pub y_anchor: String,
    /// Counts in `I_{0,0}`, `I_{1,0}`, `I_{0,1}`, `I_{1,1}`.
    pub counts: [u64; 4],
}

impl Quad {
    /// Three points, either `2 + 1` on the diagonal or one in each of the
    /// three cells other than `I_{1,1}`.
    pub fn is_valid(&self) -> bool {
        self.counts == [2, 0, 0, 1] || self.counts == [1, 1, 1, 0]
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct QuadReport {
    pub groups: usize,
    pub violations: Vec<Quad>,
}

/// Occupancy of every group of four for `1 <= k < m`, golden ratio only.
pub fn quad_structure(set: &PointSet) -> Result<QuadReport> {
    let base = set.base()?;
    if !base.is_phi() || set.s != 2 {
        return Err(Error::UnsupportedBase(
            "groups of four are defined for two-dimensional golden-ratio sets".into(),
        ));
    }
    let m = set.m;
    let anchors = |level: usize| -> Result<Vec<Vec<u8>>> {
        Ok(crate::intervals::partition_1d(&base, level)?
            .into_iter()
            .filter(|c| c.itype == 0)
            .map(|c| c.numerator.prefix(level))
            .collect())
    };
    let mut groups = 0;
    let mut violations = Vec::new();
    for k in 1..m {
        let kvec = [m - k, k];
        let mut counts: HashMap<Vec<u8>, u64> = HashMap::new();
        for p in &set.points {
            *counts.entry(cell_key(p, &kvec)).or_default() += 1;
        }
        for a in anchors(m - k)? {
            for b in anchors(k)? {
                let mut quad = [0u64; 4];
                for (slot, (i, j)) in [(0u8, 0u8), (1, 0), (0, 1), (1, 1)].into_iter().enumerate() {
                    let mut key = a.clone();
                    *key.last_mut().unwrap() = i;
                    let mut yb = b.clone();
                    *yb.last_mut().unwrap() = j;
                    key.extend(yb);
                    quad[slot] = counts.get(&key).copied().unwrap_or(0);
                }
                groups += 1;
                let q = Quad {
                    k,
                    x_anchor: DigitWord::fractional(a.clone()).digit_string(),
                    y_anchor: DigitWord::fractional(b.clone()).digit_string(),
                    counts: quad,
                };
                if !q.is_valid() {
                    violations.push(q);
                }
            }
        }
    }
    Ok(QuadReport { groups, violations })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{hammersley, vdc_set, weak12};

    #[test]
    fn rho_examples() {
        assert_eq!(rho(&[0, 0]), 0);
        assert_eq!(rho(&[2, 0, 1]), 5);
        assert_eq!(rho(&[4, 0]), 5);
    }

    #[test]
    fn h3_counts() {
        let h = hammersley(&BaseSpec::phi(), 3).unwrap();
        let rep = check_equidist(&h, &[1, 1]).unwrap();
        assert!(rep.passed);
        assert!(check_equidist(&h, &[0, 0]).unwrap().passed);
        assert!(check_equidist(&h, &[1]).is_err());
    }

    #[test]
    fn hammersley_nets() {
        let phi = BaseSpec::phi();
        for m in 0..=8 {
            let h = hammersley(&phi, m).unwrap();
            assert_eq!(net_t(&h).unwrap().t_min, 0, "m={m}");
        }
        let h5 = hammersley(&phi, 5).unwrap();
        assert!(check_strong(&h5, &[5, 0]).unwrap().passed);
    }

    #[test]
    fn origin_alone() {
        let s = weak12(0, None).unwrap();
        assert_eq!(net_t(&s).unwrap().t_min, 0);
    }

    #[test]
    fn level_vectors_respect_threshold() {
        let v = level_vectors(2, 3, Threshold::Rho);
        assert!(v.contains(&vec![2, 0]) && v.contains(&vec![1, 0]) && !v.contains(&vec![1, 1]));
        let v = level_vectors(2, 2, Threshold::LevelSum);
        assert!(v.contains(&vec![1, 1]) && v.contains(&vec![2, 0]));
    }

    #[test]
    fn vdc_windows() {
        let phi = BaseSpec::phi();
        let seq = vdc_set(&phi, 12).unwrap();
        assert!(
            verify_sequence(&seq, 0, 5, 4, WindowStart::Verbatim)
                .unwrap()
                .passed
        );
        assert!(verify_weak(&seq, 0, 9).unwrap().passed);
    }

    #[test]
    fn negative_indices() {
        let phi = BaseSpec::phi();
        assert_eq!(required_count(&phi, 3, 4).unwrap(), 1);
        assert_eq!(required_count(&phi, 3, 5).unwrap(), 0);
        assert_eq!(required_count(&phi, 3, 6).unwrap(), 1);
        assert!(required_count(&phi, 3, 7).is_err());
        let b = BaseSpec::new(2, 1).unwrap();
        assert!(required_count(&b, 3, 6).is_err());
    }
}
