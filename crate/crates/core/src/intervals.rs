//! Elementary intervals and partitions of the unit cube.
//!
//! A level-`m` axis interval is `[n/gamma^m, n'/gamma^m)` for consecutive
//! `n < n'` in `Gamma^R_m`. Its left endpoint is the `m`-digit R-admissible
//! word of `n` read as a fraction (the *numerator*). A point lies in it exactly
//! when the first `m` digits of the point's expansion spell the numerator, which
//! is how the verification code counts.

use std::io::Write;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::numeration::{
    compare_unchecked, enumerate_words, g_count, index_of, is_admissible, value, word_at_index,
    BaseSpec, DigitWord, Side,
};

/// One factor `I_i(a; m)` of an elementary interval.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AxisInterval {
    pub level: usize,
    /// Index in `Gamma^R_level` of the numerator with its trailing block zeroed.
    pub anchor: u64,
    pub itype: u8,
    /// Left endpoint: `level` fractional digits.
    pub numerator: DigitWord,
    /// Right endpoint, or `None` for the interval ending at 1.
    pub right: Option<DigitWord>,
}

impl AxisInterval {
    fn at(base: &BaseSpec, level: usize, index: u64) -> Result<Self> {
        let word = word_at_index(base, level, Side::R, index)?;
        let next = if index + 1 < g_count(base, level)? {
            Some(word_at_index(base, level, Side::R, index + 1)?.scaled_fraction())
        } else {
            None
        };
        Self::from_words(base, level, index, word.scaled_fraction(), next)
    }

    fn from_words(
        base: &BaseSpec,
        level: usize,
        index: u64,
        numerator: DigitWord,
        right: Option<DigitWord>,
    ) -> Result<Self> {
        let (itype, _) = classify_digits(base, numerator.digits());
        let anchor = index.checked_sub(itype as u64).ok_or_else(|| {
            Error::Invariant(format!(
                "anchor of {numerator} at level {level} is negative"
            ))
        })?;
        Ok(AxisInterval {
            level,
            anchor,
            itype,
            numerator,
            right,
        })
    }

    pub fn left(&self) -> &DigitWord {
        &self.numerator
    }

    pub fn is_prime(&self, base: &BaseSpec) -> bool {
        classify_digits(base, self.numerator.digits()).1
    }

    /// Exponent of the length: `level`, plus one when the numerator ends in `p`.
    pub fn log_length(&self, base: &BaseSpec) -> usize {
        self.level + (self.level > 0 && self.numerator.last_digit() as u32 == base.p()) as usize
    }

    pub fn left_value(&self, base: &BaseSpec) -> f64 {
        value(base, &self.numerator)
    }

    pub fn right_value(&self, base: &BaseSpec) -> f64 {
        self.right.as_ref().map_or(1.0, |w| value(base, w))
    }

    /// Exact half-open membership of a fractional word.
    pub fn contains(&self, x: &DigitWord) -> bool {
        compare_unchecked(&self.numerator, x).is_le()
            && self
                .right
                .as_ref()
                .is_none_or(|r| compare_unchecked(x, r).is_lt())
    }
}

/// A product of axis intervals.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ElemInterval {
    pub axes: Vec<AxisInterval>,
    /// `|I|`: the volume is `gamma^-|I|`.
    pub logvol: usize,
}

impl ElemInterval {
    pub fn new(base: &BaseSpec, axes: Vec<AxisInterval>) -> Self {
        let logvol = axes.iter().map(|a| a.log_length(base)).sum();
        ElemInterval { axes, logvol }
    }

    pub fn is_prime(&self, base: &BaseSpec) -> bool {
        self.axes.iter().all(|a| a.is_prime(base))
    }

    pub fn levels(&self) -> Vec<usize> {
        self.axes.iter().map(|a| a.level).collect()
    }

    /// Per-axis numerator strings, handy for reports.
    pub fn label(&self) -> Vec<String> {
        self.axes
            .iter()
            .map(|a| a.numerator.digit_string())
            .collect()
    }
}

fn require_q1(base: &BaseSpec) -> Result<()> {
    if base.q() != 1 {
        return Err(Error::UnsupportedBase(format!(
            "elementary intervals need q = 1, got ({base})"
        )));
    }
    Ok(())
}

/// Type and primality read from the last two digits of a numerator.
///
/// A word ending in `p 0` has type `p + 1` and is not prime; otherwise the
/// type is the last digit. Levels 0 and 1 are always prime.
pub fn classify_digits(base: &BaseSpec, digits: &[u8]) -> (u8, bool) {
    let p = base.p() as u8;
    match digits {
        [] => (0, true),
        [.., a, b] if *a == p => {
            debug_assert_eq!(*b, 0);
            (p + 1, false)
        }
        [.., b] => (*b, true),
    }
}

pub fn classify(base: &BaseSpec, axis: &AxisInterval) -> (u8, bool) {
    classify_digits(base, axis.numerator.digits())
}

/// The `m`-partition of `[0, 1)`, left to right.
pub fn partition_1d(base: &BaseSpec, m: usize) -> Result<Vec<AxisInterval>> {
    require_q1(base)?;
    let words = enumerate_words(base, m, Side::R)?;
    let mut out = Vec::with_capacity(words.len());
    for (i, w) in words.iter().enumerate() {
        let right = words.get(i + 1).map(|r| r.scaled_fraction());
        out.push(AxisInterval::from_words(
            base,
            m,
            i as u64,
            w.scaled_fraction(),
            right,
        )?);
    }
    Ok(out)
}

/// Splits a level-`m` interval of the golden-ratio partition into its level-`m+1` pieces.
pub fn refine(base: &BaseSpec, axis: &AxisInterval) -> Result<Vec<AxisInterval>> {
    if !base.is_phi() {
        return Err(Error::UnsupportedBase(format!(
            "refinement table exists for the golden ratio only, got ({base})"
        )));
    }
    let level = axis.level + 1;
    let mut out = Vec::new();
    for d in 0..=1u8 {
        let mut digits = axis.numerator.prefix(axis.level);
        digits.push(d);
        if !is_admissible(base, &digits, Side::R) {
            continue;
        }
        let int = DigitWord::integer(digits, Side::R);
        out.push(AxisInterval::at(base, level, index_of(base, &int)?)?);
    }
    Ok(out)
}

fn axis_cells(base: &BaseSpec, k: usize, prime_only: bool) -> Result<Vec<AxisInterval>> {
    let mut cells = partition_1d(base, k)?;
    if prime_only {
        cells.retain(|c| c.is_prime(base));
    }
    Ok(cells)
}

fn product(base: &BaseSpec, per_axis: Vec<Vec<AxisInterval>>) -> Vec<ElemInterval> {
    let mut acc: Vec<Vec<AxisInterval>> = vec![Vec::new()];
    for cells in per_axis {
        let mut next = Vec::with_capacity(acc.len() * cells.len());
        for prefix in &acc {
            for c in &cells {
                let mut v = prefix.clone();
                v.push(c.clone());
                next.push(v);
            }
        }
        acc = next;
    }
    acc.into_iter()
        .map(|axes| ElemInterval::new(base, axes))
        .collect()
}

/// Every elementary `kvec`-interval whose axes are all prime.
pub fn prime_intervals(base: &BaseSpec, kvec: &[usize]) -> Result<Vec<ElemInterval>> {
    require_q1(base)?;
    let per_axis = kvec
        .iter()
        .map(|&k| axis_cells(base, k, true))
        .collect::<Result<Vec<_>>>()?;
    Ok(product(base, per_axis))
}

/// The full `kvec`-partition, prime or not.
pub fn partition(base: &BaseSpec, kvec: &[usize]) -> Result<Vec<ElemInterval>> {
    require_q1(base)?;
    let per_axis = kvec
        .iter()
        .map(|&k| axis_cells(base, k, false))
        .collect::<Result<Vec<_>>>()?;
    Ok(product(base, per_axis))
}

pub fn log_volume(interval: &ElemInterval) -> usize {
    interval.logvol
}

/// Exact membership of a point given by fractional digit words.
pub fn contains(interval: &ElemInterval, point: &[DigitWord]) -> Result<bool> {
    if point.len() != interval.axes.len() {
        return Err(Error::Dimension {
            expected: interval.axes.len(),
            got: point.len(),
        });
    }
    Ok(interval.axes.iter().zip(point).all(|(a, x)| a.contains(x)))
}

/// Primality by the least-level definition: a level-`m` interval is prime
/// unless the same set is already an interval of level `m - 1`.
pub fn is_prime_by_least_level(base: &BaseSpec, axis: &AxisInterval) -> Result<bool> {
    if axis.level <= 1 || axis.numerator.last_digit() != 0 {
        return Ok(true);
    }
    let coarse_digits = axis.numerator.prefix(axis.level - 1);
    if !is_admissible(base, &coarse_digits, Side::R) {
        return Ok(true);
    }
    let coarse = DigitWord::integer(coarse_digits, Side::R);
    let coarse = AxisInterval::at(base, axis.level - 1, index_of(base, &coarse)?)?;
    let same_right = match (&coarse.right, &axis.right) {
        (None, None) => true,
        (Some(a), Some(b)) => compare_unchecked(a, b).is_eq(),
        _ => false,
    };
    Ok(!same_right)
}

/// Writes `level,anchor_index,type,left_float,right_float,prime` rows.
pub fn write_intervals_csv<W: Write>(
    base: &BaseSpec,
    intervals: &[AxisInterval],
    out: W,
) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "level",
        "anchor_index",
        "type",
        "left_float",
        "right_float",
        "prime",
    ])?;
    for iv in intervals {
        w.write_record([
            iv.level.to_string(),
            iv.anchor.to_string(),
            iv.itype.to_string(),
            format!("{:.16e}", iv.left_value(base)),
            format!("{:.16e}", iv.right_value(base)),
            iv.is_prime(base).to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
