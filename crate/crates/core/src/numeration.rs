//! Digit arithmetic in the Fibonacci base and in the generalized `(p, q)`
//! numeration systems attached to the largest root of `x^2 - p x - q`.
//!
//! Whole numbers are words over `0..=p` (read as base-`p+1` integers) that
//! satisfy one of two admissibility conditions:
//!
//! * **R**: every digit `p` is immediately followed by a digit `< q`, or is last;
//! * **L**: every digit `p` is immediately preceded by a digit `< q`, or is first.
//!
//! R-admissible fractional words are greedy expansions, so their value order
//! equals the lexicographic order of the right-padded digit strings. All exact
//! comparisons in the crate go through [`compare`].

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The base `gamma`, the largest root of `x^2 - p x - q` with `1 <= q <= p`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BaseSpec {
    p: u32,
    q: u32,
    gamma: f64,
    conj: f64,
}

impl BaseSpec {
    /// Largest digit supported by the CLI and the CSV formats.
    pub const MAX_P: u32 = 9;

    pub fn new(p: u32, q: u32) -> Result<Self> {
        if q < 1 || q > p || p > Self::MAX_P {
            return Err(Error::InvalidBase { p, q });
        }
        let (pf, qf) = (p as f64, q as f64);
        let gamma = (pf + (pf * pf + 4.0 * qf).sqrt()) / 2.0;
        Ok(BaseSpec {
            p,
            q,
            gamma,
            conj: pf - gamma,
        })
    }

    /// The golden ratio base, `p = q = 1`.
    pub fn phi() -> Self {
        Self::new(1, 1).expect("phi is a valid base")
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// The conjugate root `p - gamma`, which lies in `(-1, 0)`.
    pub fn conj(&self) -> f64 {
        self.conj
    }

    pub fn is_phi(&self) -> bool {
        self.p == 1 && self.q == 1
    }

    /// Radix used to read whole-number words as ordinary integers.
    pub fn radix(&self) -> u64 {
        self.p as u64 + 1
    }
}

impl fmt::Display for BaseSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{}", self.p, self.q)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Role {
    /// `d_{m-1} ... d_0`, most significant digit first.
    Integer,
    /// `.d_1 d_2 ...`, the digit of weight `gamma^-1` first.
    Fractional,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Side {
    L,
    R,
}

/// A finite digit string. Digits are stored most-significant first in both roles.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DigitWord {
    digits: Vec<u8>,
    role: Role,
    side: Side,
}

impl DigitWord {
    pub fn integer(digits: Vec<u8>, side: Side) -> Self {
        DigitWord {
            digits,
            role: Role::Integer,
            side,
        }
    }

    /// Fractional words are always R-admissible expansions.
    pub fn fractional(digits: Vec<u8>) -> Self {
        DigitWord {
            digits,
            role: Role::Fractional,
            side: Side::R,
        }
    }

    pub fn zero() -> Self {
        Self::fractional(Vec::new())
    }

    /// Parses a fractional digit string such as `"0101"`, `".0101"` or `"0.0101"`.
    pub fn parse_fractional(s: &str) -> Result<Self> {
        let t = s.trim();
        let t = t
            .strip_prefix("0.")
            .or_else(|| t.strip_prefix('.'))
            .unwrap_or(t);
        let digits = t
            .chars()
            .map(|c| {
                c.to_digit(10)
                    .map(|d| d as u8)
                    .ok_or_else(|| Error::Domain(format!("bad digit {c:?} in {s:?}")))
            })
            .collect::<Result<Vec<u8>>>()?;
        Ok(Self::fractional(digits))
    }

    pub fn digits(&self) -> &[u8] {
        &self.digits
    }

    pub fn len(&self) -> usize {
        self.digits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.digits.is_empty()
    }

    pub fn role(&self) -> Role {
        self.role
    }

    pub fn side(&self) -> Side {
        self.side
    }

    /// Digit at position `i`, reading zeros past the end.
    pub fn digit(&self, i: usize) -> u8 {
        self.digits.get(i).copied().unwrap_or(0)
    }

    pub fn last_digit(&self) -> u8 {
        self.digits.last().copied().unwrap_or(0)
    }

    /// The first `k` digits, right-padded with zeros when the word is shorter.
    pub fn prefix(&self, k: usize) -> Vec<u8> {
        (0..k).map(|i| self.digit(i)).collect()
    }

    /// Drops redundant zeros: trailing for fractional words, leading for integers.
    pub fn canonical(&self) -> Self {
        let mut digits = self.digits.clone();
        match self.role {
            Role::Fractional => {
                while digits.last() == Some(&0) {
                    digits.pop();
                }
            }
            Role::Integer => {
                let nz = digits.iter().position(|&d| d != 0).unwrap_or(digits.len());
                digits.drain(..nz);
            }
        }
        DigitWord { digits, ..*self }
    }

    /// `n -> g_n`: the fractional word `.d_0 d_1 ... d_{m-1}` of the integer word `d_{m-1} ... d_0`.
    pub fn reversed_fraction(&self) -> Self {
        let mut digits = self.digits.clone();
        digits.reverse();
        Self::fractional(digits)
    }

    /// `n -> n / gamma^m` for an `m`-digit integer word: the same digits behind the point.
    pub fn scaled_fraction(&self) -> Self {
        Self::fractional(self.digits.clone())
    }

    /// Digit string without separators; the zero word prints as `"0"`.
    pub fn digit_string(&self) -> String {
        if self.digits.is_empty() {
            return "0".to_string();
        }
        self.digits.iter().map(|d| char::from(b'0' + d)).collect()
    }
}

impl Serialize for DigitWord {
    fn serialize<S: serde::Serializer>(
        &self,
        serializer: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.digit_string())
    }
}

impl fmt::Display for DigitWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.role {
            Role::Integer => write!(f, "({})", self.digit_string()),
            Role::Fractional => write!(f, "(.{})", self.digit_string()),
        }
    }
}

/// Checks a digit string against condition L or R for the given base.
pub fn is_admissible(base: &BaseSpec, digits: &[u8], side: Side) -> bool {
    let (p, q) = (base.p as u8, base.q as u8);
    if digits.iter().any(|&d| d > p) {
        return false;
    }
    digits.iter().enumerate().all(|(i, &d)| {
        if d != p {
            return true;
        }
        match side {
            Side::R => i + 1 == digits.len() || digits[i + 1] < q,
            Side::L => i == 0 || digits[i - 1] < q,
        }
    })
}

/// `F^m = F_{m+2}` for `m >= -2`, with `F^{-2} = 0` and `F^{-1} = 1`.
pub fn fib(m: i64) -> Result<u64> {
    if m < -2 {
        return Err(Error::Domain(format!("fib index {m} < -2")));
    }
    let (mut a, mut b) = (0u64, 1u64);
    for _ in 0..(m + 2) {
        let c = a
            .checked_add(b)
            .ok_or_else(|| Error::Overflow(format!("F^{m}")))?;
        a = b;
        b = c;
    }
    Ok(a)
}

/// Word counts `G_m` with the auxiliary sequences of both recurrences.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GCounts {
    /// `G_m`, from the L-side recurrence.
    pub g: Vec<u64>,
    /// L-side auxiliary `A_m`.
    pub a: Vec<u64>,
    /// R-side auxiliary `B_m = q G_{m-1}`.
    pub b: Vec<u64>,
    /// `G_m` recomputed from the R-side recurrence.
    pub g_r: Vec<u64>,
}

impl GCounts {
    pub fn g(&self, m: usize) -> u64 {
        self.g[m]
    }
}

fn mul_add(x: u64, y: u64, z: u64, w: u64, what: &str) -> Result<u64> {
    x.checked_mul(y)
        .and_then(|xy| z.checked_mul(w).and_then(|zw| xy.checked_add(zw)))
        .ok_or_else(|| Error::Overflow(what.to_string()))
}

/// Runs both counting recurrences through index `m_max`.
///
/// Fails with [`Error::Invariant`] if the two sides ever disagree and with
/// [`Error::Overflow`] once a count no longer fits in 64 bits.
pub fn g_counts(base: &BaseSpec, m_max: usize) -> Result<GCounts> {
    let (p, q) = (base.p as u64, base.q as u64);
    let mut g = vec![1u64];
    let mut a = vec![1u64];
    let mut b = vec![1u64];
    let mut g_r = vec![1u64];
    for m in 1..=m_max {
        let what = format!("G_{m}");
        if m == 1 {
            g.push(p + 1);
            a.push(p);
            b.push(q);
            g_r.push(p + 1);
        } else {
            g.push(mul_add(q, g[m - 1], p - q + 1, a[m - 1], &what)?);
            a.push(mul_add(q, g[m - 1], p - q, a[m - 1], &what)?);
            g_r.push(mul_add(p, g_r[m - 1], 1, b[m - 1], &what)?);
            b.push(mul_add(q, g_r[m - 1], 0, 0, &what)?);
        }
        if g[m] != g_r[m] {
            return Err(Error::Invariant(format!(
                "L-side G_{m} = {} but R-side G_{m} = {}",
                g[m], g_r[m]
            )));
        }
    }
    Ok(GCounts { g, a, b, g_r })
}

/// `G_m` alone.
pub fn g_count(base: &BaseSpec, m: usize) -> Result<u64> {
    Ok(g_counts(base, m)?.g[m])
}

/// Largest `m` for which `G_m` fits in 64 bits.
pub fn max_level(base: &BaseSpec) -> usize {
    let mut m = 0;
    while g_count(base, m + 1).is_ok() {
        m += 1;
    }
    m
}

/// `((g+1) g^m + (g-p-1)(p-g)^m) / (2g - p)`.
pub fn closed_form_g(base: &BaseSpec, m: u32) -> f64 {
    let g = base.gamma;
    let p = base.p as f64;
    ((g + 1.0) * g.powi(m as i32) + (g - p - 1.0) * (p - g).powi(m as i32)) / (2.0 * g - p)
}

/// All admissible words with exactly `m` digits (leading zeros kept), in
/// increasing numeric order. Built level by level from the `m-1` list.
pub fn enumerate_words(base: &BaseSpec, m: usize, side: Side) -> Result<Vec<DigitWord>> {
    let total = g_count(base, m)?;
    if total > (1 << 28) {
        return Err(Error::Range(format!(
            "G_{m} = {total} words is too many to list"
        )));
    }
    let (p, q) = (base.p as u8, base.q as u8);
    let mut level: Vec<Vec<u8>> = vec![Vec::new()];
    for _ in 0..m {
        let mut next = Vec::new();
        for d in 0..=p {
            for w in &level {
                let head = w.first().copied();
                let ok = match side {
                    Side::R => d != p || head.is_none_or(|h| h < q),
                    Side::L => head != Some(p) || d < q,
                };
                if ok {
                    let mut v = Vec::with_capacity(w.len() + 1);
                    v.push(d);
                    v.extend_from_slice(w);
                    next.push(v);
                }
            }
        }
        level = next;
    }
    if level.len() as u64 != total {
        return Err(Error::Invariant(format!(
            "enumerated {} words but G_{m} = {total}",
            level.len()
        )));
    }
    Ok(level
        .into_iter()
        .map(|d| DigitWord::integer(d, side))
        .collect())
}

/// Completion counts for unranking: `table[r][flag]` is the number of
/// admissible length-`r` continuations under the given boundary flag.
fn completion_table(base: &BaseSpec, m: usize, side: Side) -> Result<Vec<[u64; 2]>> {
    let (p, q) = (base.p as u8, base.q as u8);
    let mut table = vec![[1u64, 1u64]];
    for r in 1..=m {
        let mut row = [0u64; 2];
        for (flag, slot) in row.iter_mut().enumerate() {
            let mut total = 0u64;
            for d in 0..=p {
                let next = match side {
                    // flag: previous digit < q (a p may follow)
                    Side::L => {
                        if d == p && flag == 0 {
                            continue;
                        }
                        (d < q) as usize
                    }
                    // flag: this digit is unrestricted (previous digit was not p)
                    Side::R => {
                        if flag == 0 && d >= q {
                            continue;
                        }
                        (d != p) as usize
                    }
                };
                total = total
                    .checked_add(table[r - 1][next])
                    .ok_or_else(|| Error::Overflow(format!("completion count at length {r}")))?;
            }
            *slot = total;
        }
        table.push(row);
    }
    Ok(table)
}

/// The `i`-th admissible `m`-digit word in increasing order, without listing the others.
pub fn word_at_index(base: &BaseSpec, m: usize, side: Side, i: u64) -> Result<DigitWord> {
    let table = completion_table(base, m, side)?;
    if i >= table[m][1] {
        return Err(Error::Range(format!(
            "index {i} >= {} words of length {m}",
            table[m][1]
        )));
    }
    let (p, q) = (base.p as u8, base.q as u8);
    let mut rest = i;
    let mut flag = 1usize;
    let mut digits = Vec::with_capacity(m);
    for r in (0..m).rev() {
        for d in 0..=p {
            let next = match side {
                Side::L => {
                    if d == p && flag == 0 {
                        continue;
                    }
                    (d < q) as usize
                }
                Side::R => {
                    if flag == 0 && d >= q {
                        continue;
                    }
                    (d != p) as usize
                }
            };
            let c = table[r][next];
            if rest < c {
                digits.push(d);
                flag = next;
                break;
            }
            rest -= c;
        }
    }
    Ok(DigitWord::integer(digits, side))
}

/// Position of an R-admissible integer word within `Gamma^R_m`: `sum d_j G_j`.
pub fn index_of(base: &BaseSpec, word: &DigitWord) -> Result<u64> {
    if !is_admissible(base, word.digits(), Side::R) {
        return Err(Error::Domain(format!("{word} is not R-admissible")));
    }
    let counts = g_counts(base, word.len())?;
    let mut n = 0u64;
    for (j, &d) in word.digits().iter().rev().enumerate() {
        n = mul_add(d as u64, counts.g[j], 1, n, "word index")?;
    }
    Ok(n)
}

/// Reads an integer word as an ordinary base-`p+1` number.
pub fn radix_value(base: &BaseSpec, word: &DigitWord) -> Result<u64> {
    word.digits().iter().try_fold(0u64, |acc, &d| {
        mul_add(acc, base.radix(), 1, d as u64, "radix value")
    })
}

/// Representation of a whole number.
///
/// In the Fibonacci base this is the greedy Zeckendorf word of `n`. In other
/// bases the base-`p+1` digits of `n` are read off directly and must satisfy
/// condition R.
pub fn encode(base: &BaseSpec, n: u64) -> Result<DigitWord> {
    if base.is_phi() {
        if n == 0 {
            return Ok(DigitWord::integer(vec![0], Side::R));
        }
        let mut fibs = vec![1u64, 2];
        while *fibs.last().unwrap() <= n {
            let k = fibs.len();
            match fibs[k - 1].checked_add(fibs[k - 2]) {
                Some(v) => fibs.push(v),
                None => break,
            }
        }
        let mut rest = n;
        let mut digits = Vec::new();
        for &f in fibs.iter().rev() {
            if f <= rest {
                digits.push(1);
                rest -= f;
            } else {
                digits.push(0);
            }
        }
        let w = DigitWord::integer(digits, Side::R).canonical();
        return Ok(w);
    }
    let radix = base.radix();
    let mut digits = Vec::new();
    let mut rest = n;
    while rest > 0 {
        digits.push((rest % radix) as u8);
        rest /= radix;
    }
    if digits.is_empty() {
        digits.push(0);
    }
    digits.reverse();
    if !is_admissible(base, &digits, Side::R) {
        return Err(Error::NotRepresentable {
            n,
            radix: radix as u32,
        });
    }
    Ok(DigitWord::integer(digits, Side::R))
}

/// `n -> n (.) gamma^k`: moves every digit `k` places toward the most significant end.
pub fn shift(word: &DigitWord, k: i64) -> Result<DigitWord> {
    let mut digits = word.digits().to_vec();
    if k >= 0 {
        digits.extend(std::iter::repeat_n(0, k as usize));
    } else {
        let drop = k.unsigned_abs() as usize;
        if drop > digits.len() || digits[digits.len() - drop..].iter().any(|&d| d != 0) {
            return Err(Error::Domain(format!(
                "shifting {word} by {k} would give a digit a negative index"
            )));
        }
        digits.truncate(digits.len() - drop);
    }
    Ok(DigitWord {
        digits,
        ..word.clone()
    })
}

/// The exact gap `coefficient * gamma^exponent`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Gap {
    pub coefficient: u32,
    pub exponent: i32,
}

impl Gap {
    pub fn value(&self, base: &BaseSpec) -> f64 {
        self.coefficient as f64 * base.gamma.powi(self.exponent)
    }
}

/// Distance from `n` to the next element of `Gamma^R_m`, where `m` is the word length.
///
/// It is `1` when the last digit is below `p` and `q / gamma` when it equals `p`.
pub fn succ_gap(base: &BaseSpec, word: &DigitWord) -> Result<Gap> {
    let m = word.len();
    let n = index_of(base, word)?;
    if n + 1 >= g_count(base, m)? {
        return Err(Error::Range(format!("{word} is the last {m}-digit word")));
    }
    Ok(if word.last_digit() as u32 == base.p {
        Gap {
            coefficient: base.q,
            exponent: -1,
        }
    } else {
        Gap {
            coefficient: 1,
            exponent: 0,
        }
    })
}

/// Exact order of two fractional R-admissible words.
pub fn compare(base: &BaseSpec, x: &DigitWord, y: &DigitWord) -> Result<Ordering> {
    for w in [x, y] {
        if w.role != Role::Fractional || !is_admissible(base, w.digits(), Side::R) {
            return Err(Error::Domain(format!(
                "{w} is not an R-admissible fractional word in base ({base})"
            )));
        }
    }
    Ok(compare_unchecked(x, y))
}

/// Lexicographic order of right-padded digit strings, without validation.
pub(crate) fn compare_unchecked(x: &DigitWord, y: &DigitWord) -> Ordering {
    let n = x.len().max(y.len());
    (0..n)
        .map(|i| x.digit(i).cmp(&y.digit(i)))
        .find(|o| o.is_ne())
        .unwrap_or(Ordering::Equal)
}

/// Floating-point value by Horner's rule.
pub fn value(base: &BaseSpec, word: &DigitWord) -> f64 {
    let g = base.gamma;
    match word.role {
        Role::Integer => word.digits().iter().fold(0.0, |acc, &d| acc * g + d as f64),
        Role::Fractional => word
            .digits()
            .iter()
            .rev()
            .fold(0.0, |acc, &d| (acc + d as f64) / g),
    }
}

/// Greedy expansion of `x` in `[0, 1)`, stopping once the remainder is below `tol`.
///
/// The input is nudged up by `tol / 2`, so a float sitting just below a finite
/// expansion snaps onto it.
pub fn expand(base: &BaseSpec, x: f64, tol: f64) -> Result<DigitWord> {
    if !(0.0..1.0).contains(&x) {
        return Err(Error::OutOfUnit(x));
    }
    let (p, q) = (base.p as u8, base.q as u8);
    let g = base.gamma;
    let mut r = x + tol / 2.0;
    let mut scale = 1.0;
    let mut digits: Vec<u8> = Vec::new();
    while r * scale >= tol && digits.len() < 64 {
        r *= g;
        scale /= g;
        let mut d = r.floor().clamp(0.0, p as f64) as u8;
        if digits.last() == Some(&p) && d >= q {
            d = q - 1;
        }
        r -= d as f64;
        digits.push(d);
    }
    Ok(DigitWord::fractional(digits).canonical())
}
