//! Point-set and sequence constructions, plus the point-set CSV format.
//!
//! Coordinates are kept as fractional digit words. Floats are derived on demand.

use std::collections::{BTreeMap, HashSet};
use std::io::{BufRead, Write};

use crate::equidist::{check_strong, is_net, required_count};
use crate::error::{Error, Result};
use crate::intervals::classify_digits;
use crate::numeration::{
    enumerate_words, expand, fib, g_count, is_admissible, value, word_at_index, BaseSpec,
    DigitWord, Side,
};

/// Numeration behind a point set's digit words.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Radix {
    Quadratic(BaseSpec),
    /// Plain binary digits, used only by the dyadic comparator.
    Dyadic,
}

impl Radix {
    pub fn value(&self, w: &DigitWord) -> f64 {
        match self {
            Radix::Quadratic(b) => value(b, w),
            Radix::Dyadic => w
                .digits()
                .iter()
                .rev()
                .fold(0.0, |acc, &d| (acc + d as f64) / 2.0),
        }
    }

    fn header(&self) -> String {
        match self {
            Radix::Quadratic(b) => format!("{},{}", b.p(), b.q()),
            Radix::Dyadic => "2".to_string(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PointSet {
    pub radix: Radix,
    pub s: usize,
    /// Size index: the set is meant to hold `G_m` points.
    pub m: usize,
    pub points: Vec<Vec<DigitWord>>,
}

impl PointSet {
    pub fn new(base: BaseSpec, s: usize, m: usize, points: Vec<Vec<DigitWord>>) -> Self {
        PointSet {
            radix: Radix::Quadratic(base),
            s,
            m,
            points,
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// The quadratic base, or an error for dyadic sets.
    pub fn base(&self) -> Result<BaseSpec> {
        match self.radix {
            Radix::Quadratic(b) => Ok(b),
            Radix::Dyadic => Err(Error::UnsupportedBase(
                "operation needs a quadratic irrational base, got a dyadic set".into(),
            )),
        }
    }

    pub fn floats(&self) -> Vec<Vec<f64>> {
        self.points
            .iter()
            .map(|p| p.iter().map(|w| self.radix.value(w)).collect())
            .collect()
    }

    /// Two-dimensional points as `[x, y]` pairs.
    pub fn pairs(&self) -> Result<Vec<[f64; 2]>> {
        if self.s != 2 {
            return Err(Error::Dimension {
                expected: 2,
                got: self.s,
            });
        }
        Ok(self
            .points
            .iter()
            .map(|p| [self.radix.value(&p[0]), self.radix.value(&p[1])])
            .collect())
    }

    /// The first `n` points as a set of size index `m`.
    pub fn prefix(&self, n: usize, m: usize) -> PointSet {
        PointSet {
            points: self.points[..n.min(self.len())].to_vec(),
            m,
            ..self.clone()
        }
    }

    /// True when no two points coincide exactly.
    pub fn is_distinct(&self) -> bool {
        let mut seen = HashSet::new();
        self.points
            .iter()
            .all(|p| seen.insert(p.iter().map(|w| w.canonical()).collect::<Vec<_>>()))
    }
}

fn level_for_count(base: &BaseSpec, n: u64) -> Result<usize> {
    let mut m = 0;
    while g_count(base, m)? < n {
        m += 1;
    }
    Ok(m)
}

/// The `i`-th van der Corput term: the reversed digits of the `i`-th L-admissible integer.
pub fn vdc(base: &BaseSpec, i: u64) -> Result<DigitWord> {
    let m = level_for_count(base, i + 1)?;
    Ok(word_at_index(base, m, Side::L, i)?
        .reversed_fraction()
        .canonical())
}

/// The first `n` van der Corput terms.
pub fn vdc_sequence(base: &BaseSpec, n: usize) -> Result<Vec<DigitWord>> {
    let m = level_for_count(base, n as u64)?;
    Ok(enumerate_words(base, m, Side::L)?
        .iter()
        .take(n)
        .map(|w| w.reversed_fraction().canonical())
        .collect())
}

/// The first `G_m` van der Corput terms as a one-dimensional set.
pub fn vdc_set(base: &BaseSpec, m: usize) -> Result<PointSet> {
    let words = enumerate_words(base, m, Side::L)?;
    let points = words
        .iter()
        .map(|w| vec![w.reversed_fraction().canonical()])
        .collect();
    Ok(PointSet::new(*base, 1, m, points))
}

/// The `m`-digit Hammersley set: `(g_{n_i}, r_i / gamma^m)` with `r_i` the
/// `i`-th element of `Gamma^R_m`.
pub fn hammersley(base: &BaseSpec, m: usize) -> Result<PointSet> {
    let left = enumerate_words(base, m, Side::L)?;
    let right = enumerate_words(base, m, Side::R)?;
    let points = left
        .iter()
        .zip(&right)
        .map(|(l, r)| {
            vec![
                l.reversed_fraction().canonical(),
                r.scaled_fraction().canonical(),
            ]
        })
        .collect();
    Ok(PointSet::new(*base, 2, m, points))
}

/// `2^m` points `(i / 2^m, bitrev(i) / 2^m)`.
pub fn hammersley_dyadic(m: usize) -> PointSet {
    let n = 1usize << m;
    let points = (0..n)
        .map(|i| {
            let bits: Vec<u8> = (0..m).map(|j| ((i >> (m - 1 - j)) & 1) as u8).collect();
            let x = DigitWord::fractional(bits.clone()).canonical();
            let mut rev = bits;
            rev.reverse();
            vec![x, DigitWord::fractional(rev).canonical()]
        })
        .collect();
    PointSet {
        radix: Radix::Dyadic,
        s: 2,
        m,
        points,
    }
}

fn require_phi(base: &BaseSpec, what: &str) -> Result<()> {
    if !base.is_phi() {
        return Err(Error::UnsupportedBase(format!(
            "{what} is defined for the golden ratio only, got ({base})"
        )));
    }
    Ok(())
}

/// Prepends `n / phi^m` to the first `F^m` terms of an `s`-dimensional sequence.
pub fn lift_to_net(base: &BaseSpec, seq: &[Vec<DigitWord>], m: usize) -> Result<PointSet> {
    require_phi(base, "the sequence-to-net lift")?;
    let n = fib(m as i64)? as usize;
    if seq.len() < n {
        return Err(Error::Precondition(format!(
            "need {n} sequence terms, got {}",
            seq.len()
        )));
    }
    let s = seq.first().map_or(0, |p| p.len());
    let words = enumerate_words(base, m, Side::R)?;
    let points = words
        .iter()
        .zip(seq)
        .map(|(w, x)| {
            let mut p = vec![w.scaled_fraction().canonical()];
            p.extend(x.iter().cloned());
            p
        })
        .collect();
    Ok(PointSet::new(*base, s + 1, m, points))
}

fn extension_hypotheses(s: &PointSet) -> Result<()> {
    let m = s.m;
    let n = fib(m as i64)? as usize;
    if s.len() != n {
        return Err(Error::Precondition(format!(
            "extension needs F^{m} = {n} points, got {}",
            s.len()
        )));
    }
    if !is_net(s, 1)? {
        return Err(Error::Precondition(format!("input is not a (1,{m},2)-net")));
    }
    for mvec in [[m + 1, 0], [0, m + 1]] {
        let rep = check_strong(s, &mvec)?;
        if !rep.passed {
            return Err(Error::Precondition(format!(
                "input is not strongly {mvec:?}-equidistributed: {} failing cells, first {:?}",
                rep.failures.len(),
                rep.failures[0].interval.numerators
            )));
        }
    }
    Ok(())
}

fn is_prime_word(base: &BaseSpec, digits: &[u8]) -> bool {
    classify_digits(base, digits).1
}

/// Adds `F^{m-1}` points to a weak (1,2)-sequence prefix of `F^m` points.
///
/// The new first coordinates are the left endpoints of the prime
/// level-`(m+1)` cells that hold no existing point. Second coordinates are
/// fixed one digit at a time: within each block of new points sharing an
/// x-cell and a y-row, the leftmost ones receive digit 1 until the
/// corresponding cell holds its required count. Each step is checked and the
/// union is re-verified as a (1,m+1,2)-net before returning.
pub fn extend_weak12(s: &PointSet) -> Result<Vec<Vec<DigitWord>>> {
    let base = s.base()?;
    require_phi(&base, "the weak (1,2) extension")?;
    if s.s != 2 {
        return Err(Error::Dimension {
            expected: 2,
            got: s.s,
        });
    }
    extension_hypotheses(s)?;
    let m = s.m;
    let len = m + 1;

    let occupied: HashSet<Vec<u8>> = s.points.iter().map(|p| p[0].prefix(len)).collect();
    let xs: Vec<Vec<u8>> = enumerate_words(&base, len, Side::R)?
        .into_iter()
        .map(|w| w.digits().to_vec())
        .filter(|d| is_prime_word(&base, d) && !occupied.contains(d))
        .collect();
    let expected = fib(m as i64 - 1)? as usize;
    if xs.len() != expected {
        return Err(Error::Invariant(format!(
            "found {} empty prime x-cells at level {len}, expected F^{} = {expected}",
            xs.len(),
            m as i64 - 1
        )));
    }

    let mut ys: Vec<Vec<u8>> = vec![vec![0; len]; xs.len()];
    for k in 1..=len {
        let depth = m.saturating_sub(k);
        let leaf = |x: &[u8]| -> Vec<u8> {
            if is_prime_word(&base, &x[..depth]) {
                x[..depth].to_vec()
            } else {
                x[..depth - 1].to_vec()
            }
        };
        let mut groups: BTreeMap<(Vec<u8>, Vec<u8>), Vec<usize>> = BTreeMap::new();
        for (i, y) in ys.iter().enumerate() {
            if k >= 2 && y[k - 2] == 1 {
                continue;
            }
            groups
                .entry((leaf(&xs[i]), y[..k - 1].to_vec()))
                .or_default()
                .push(i);
        }
        for ((cell, row), members) in groups {
            let logvol = cell.len() + cell.last().copied().unwrap_or(0) as usize + k + 1;
            let need = required_count(&base, m + 1, logvol)?;
            let mut target = row.clone();
            target.push(1);
            let have = s
                .points
                .iter()
                .filter(|p| p[0].prefix(cell.len()) == cell && p[1].prefix(k) == target)
                .count() as u64;
            if have > need || (need - have) as usize > members.len() {
                return Err(Error::Invariant(format!(
                    "digit {k}: cell x={:?} y={:?} needs {need} points, holds {have}, \
                     {} candidates",
                    cell,
                    target,
                    members.len()
                )));
            }
            // members are already in increasing x order
            for &i in members.iter().take((need - have) as usize) {
                ys[i][k - 1] = 1;
            }
        }
    }

    let fresh: Vec<Vec<DigitWord>> = xs
        .into_iter()
        .zip(ys)
        .map(|(x, y)| {
            vec![
                DigitWord::fractional(x).canonical(),
                DigitWord::fractional(y).canonical(),
            ]
        })
        .collect();
    let mut union = s.clone();
    union.m = m + 1;
    union.points.extend(fresh.iter().cloned());
    if !is_net(&union, 1)? {
        return Err(Error::Invariant(format!(
            "extended set is not a (1,{},2)-net",
            m + 1
        )));
    }
    Ok(fresh)
}

/// Lower-left cell every weak (1,2)-sequence seed must lie in.
pub fn is_valid_seed(seed: &[DigitWord; 2]) -> bool {
    let phi = BaseSpec::phi();
    seed.iter()
        .all(|w| w.digit(0) == 0 && is_admissible(&phi, w.digits(), Side::R))
}

/// Seed given as floats, snapped to digit words.
pub fn seed_from_floats(x: f64, y: f64) -> Result<[DigitWord; 2]> {
    let phi = BaseSpec::phi();
    Ok([expand(&phi, x, 1e-12)?, expand(&phi, y, 1e-12)?])
}

/// The first `F^m` terms of the weak (1,2)-sequence grown from `seed`
/// (the origin by default).
pub fn weak12(m: usize, seed: Option<[DigitWord; 2]>) -> Result<PointSet> {
    let seed = seed.unwrap_or_else(|| [DigitWord::zero(), DigitWord::zero()]);
    if !is_valid_seed(&seed) {
        return Err(Error::Precondition(format!(
            "seed ({}, {}) is not in [0, 1/phi)^2",
            seed[0], seed[1]
        )));
    }
    let mut set = PointSet::new(BaseSpec::phi(), 2, 0, vec![seed.to_vec()]);
    for _ in 0..m {
        let fresh = extend_weak12(&set)?;
        set.points.extend(fresh);
        set.m += 1;
    }
    Ok(set)
}

fn axis_name(j: usize, s: usize) -> String {
    match (j, s) {
        (0, _) => "x".into(),
        (1, _) => "y".into(),
        (2, 3) => "z".into(),
        _ => format!("x{}", j + 1),
    }
}

/// Writes the point-set CSV: a `# base=p,q;m=<m>;s=<s>` line, a column
/// header, then one row per point with 17 significant digits and, when
/// `with_digits` is set, the digit strings.
pub fn write_pointset_csv<W: Write>(set: &PointSet, mut out: W, with_digits: bool) -> Result<()> {
    writeln!(out, "# base={};m={};s={}", set.radix.header(), set.m, set.s)?;
    let mut w = csv::Writer::from_writer(out);
    let mut header: Vec<String> = (0..set.s).map(|j| axis_name(j, set.s)).collect();
    if with_digits {
        header.extend((0..set.s).map(|j| format!("{}_digits", axis_name(j, set.s))));
    }
    w.write_record(&header)?;
    for p in &set.points {
        let mut row: Vec<String> = p
            .iter()
            .map(|c| format!("{:.16e}", set.radix.value(c)))
            .collect();
        if with_digits {
            row.extend(p.iter().map(|c| c.digit_string()));
        }
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

/// A parsed point-set file and any warnings raised while reading it.
#[derive(Clone, Debug)]
pub struct LoadedPointSet {
    pub set: PointSet,
    pub warnings: Vec<String>,
}

fn parse_header(line: &str) -> Result<(Radix, usize, usize)> {
    let bad = |msg: &str| Error::Parse {
        line: 1,
        msg: msg.to_string(),
    };
    let body = line
        .trim()
        .strip_prefix('#')
        .ok_or_else(|| bad("missing '# base=...;m=...;s=...' header"))?;
    let (mut radix, mut m, mut s) = (None, None, None);
    for part in body.split(';') {
        let (key, val) = part
            .trim()
            .split_once('=')
            .ok_or_else(|| bad(&format!("expected key=value, got {part:?}")))?;
        match key.trim() {
            "base" => {
                let val = val.trim();
                radix = Some(if val == "2" {
                    Radix::Dyadic
                } else {
                    let (p, q) = val
                        .split_once(',')
                        .ok_or_else(|| bad(&format!("base must be p,q, got {val:?}")))?;
                    let p = p.trim().parse().map_err(|_| bad("bad p"))?;
                    let q = q.trim().parse().map_err(|_| bad("bad q"))?;
                    Radix::Quadratic(BaseSpec::new(p, q).map_err(|e| bad(&e.to_string()))?)
                });
            }
            "m" => m = Some(val.trim().parse().map_err(|_| bad("bad m"))?),
            "s" => s = Some(val.trim().parse().map_err(|_| bad("bad s"))?),
            other => return Err(bad(&format!("unknown header key {other:?}"))),
        }
    }
    match (radix, m, s) {
        (Some(r), Some(m), Some(s)) if s >= 1 => Ok((r, m, s)),
        _ => Err(bad("header needs base, m and s >= 1")),
    }
}

/// Reads a point-set CSV. Digit columns win over floats; rows without them
/// are snapped to digit words at tolerance `1e-12`, with a warning.
pub fn read_pointset_csv<R: BufRead>(mut input: R) -> Result<LoadedPointSet> {
    let mut first = String::new();
    input.read_line(&mut first)?;
    let (radix, m, s) = parse_header(&first)?;
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(input);
    let headers = rdr.headers().map_err(|e| Error::Parse {
        line: 2,
        msg: e.to_string(),
    })?;
    let col = |name: &str| headers.iter().position(|h| h == name);
    let float_cols: Vec<usize> = (0..s)
        .map(|j| {
            col(&axis_name(j, s)).ok_or_else(|| Error::Parse {
                line: 2,
                msg: format!("missing column {:?}", axis_name(j, s)),
            })
        })
        .collect::<Result<_>>()?;
    let digit_cols: Vec<Option<usize>> = (0..s)
        .map(|j| col(&format!("{}_digits", axis_name(j, s))))
        .collect();

    let mut points = Vec::new();
    let mut snapped = 0usize;
    for (i, rec) in rdr.records().enumerate() {
        let line = i + 3;
        let bad = |msg: String| Error::Parse { line, msg };
        let rec = rec.map_err(|e| bad(e.to_string()))?;
        let mut point = Vec::with_capacity(s);
        for j in 0..s {
            let digits = digit_cols[j]
                .and_then(|c| rec.get(c))
                .filter(|t| !t.is_empty());
            let word = match digits {
                Some(t) => {
                    let w = DigitWord::parse_fractional(t).map_err(|e| bad(e.to_string()))?;
                    let ok = match radix {
                        Radix::Quadratic(b) => is_admissible(&b, w.digits(), Side::R),
                        Radix::Dyadic => w.digits().iter().all(|&d| d <= 1),
                    };
                    if !ok {
                        return Err(bad(format!("digit string {t:?} is not admissible")));
                    }
                    w.canonical()
                }
                None => {
                    let raw = rec
                        .get(float_cols[j])
                        .ok_or_else(|| bad("missing coordinate".into()))?;
                    let x: f64 = raw
                        .parse()
                        .map_err(|_| bad(format!("bad coordinate {raw:?}")))?;
                    snapped += 1;
                    match radix {
                        Radix::Quadratic(b) => {
                            expand(&b, x, 1e-12).map_err(|e| bad(e.to_string()))?
                        }
                        Radix::Dyadic => {
                            expand_binary(x).ok_or_else(|| bad(format!("{x} outside [0,1)")))?
                        }
                    }
                }
            };
            point.push(word);
        }
        points.push(point);
    }
    let mut warnings = Vec::new();
    if snapped > 0 {
        warnings.push(format!(
            "{snapped} coordinates had no digit column and were snapped from floats at tolerance 1e-12"
        ));
    }
    Ok(LoadedPointSet {
        set: PointSet {
            radix,
            s,
            m,
            points,
        },
        warnings,
    })
}

fn expand_binary(x: f64) -> Option<DigitWord> {
    if !(0.0..1.0).contains(&x) {
        return None;
    }
    let mut r = x + 5e-13;
    let mut digits = Vec::new();
    let mut scale = 1.0;
    while r * scale >= 1e-12 && digits.len() < 60 {
        r *= 2.0;
        scale /= 2.0;
        let d = r.floor().min(1.0);
        r -= d;
        digits.push(d as u8);
    }
    Some(DigitWord::fractional(digits).canonical())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> DigitWord {
        DigitWord::parse_fractional(s).unwrap().canonical()
    }

    #[test]
    fn vdc_terms() {
        let phi = BaseSpec::phi();
        assert_eq!(vdc(&phi, 4).unwrap(), w("101"));
        assert_eq!(vdc(&phi, 0).unwrap(), DigitWord::zero());
        let b = BaseSpec::new(2, 1).unwrap();
        assert_eq!(vdc(&b, 6).unwrap(), w("12"));
        assert_eq!(vdc_sequence(&b, 7).unwrap()[6], w("12"));
        let seq = vdc_sequence(&phi, 40).unwrap();
        for (i, x) in seq.iter().enumerate() {
            assert_eq!(&vdc(&phi, i as u64).unwrap(), x);
        }
    }

    #[test]
    fn hammersley_small() {
        let phi = BaseSpec::phi();
        assert_eq!(
            hammersley(&phi, 0).unwrap().points,
            vec![vec![DigitWord::zero(); 2]]
        );
        let b = BaseSpec::new(2, 1).unwrap();
        let h = hammersley(&b, 1).unwrap().pairs().unwrap();
        let want = [[0.0, 0.0], [0.4142, 0.4142], [0.8284, 0.8284]];
        for (p, q) in h.iter().zip(want) {
            assert!((p[0] - q[0]).abs() < 1e-4 && (p[1] - q[1]).abs() < 1e-4);
        }
    }

    #[test]
    fn dyadic_small() {
        let d = hammersley_dyadic(1).pairs().unwrap();
        assert_eq!(d, vec![[0.0, 0.0], [0.5, 0.5]]);
        let d = hammersley_dyadic(2).pairs().unwrap();
        assert_eq!(d, vec![[0.0, 0.0], [0.25, 0.5], [0.5, 0.25], [0.75, 0.75]]);
    }

    #[test]
    fn lift_of_vdc_is_swapped_hammersley() {
        let phi = BaseSpec::phi();
        let seq: Vec<Vec<DigitWord>> = vdc_sequence(&phi, 5)
            .unwrap()
            .into_iter()
            .map(|x| vec![x])
            .collect();
        let lifted = lift_to_net(&phi, &seq, 3).unwrap();
        let mut a: Vec<Vec<DigitWord>> = lifted
            .points
            .iter()
            .map(|p| vec![p[1].clone(), p[0].clone()])
            .collect();
        let mut b = hammersley(&phi, 3).unwrap().points;
        a.sort();
        b.sort();
        assert_eq!(a, b);
        let single = lift_to_net(&phi, &seq, 0).unwrap();
        assert_eq!(
            single.points,
            vec![vec![DigitWord::zero(), DigitWord::zero()]]
        );
    }

    #[test]
    fn weak12_first_steps() {
        let s = weak12(0, None).unwrap();
        assert_eq!(s.points, vec![vec![DigitWord::zero(); 2]]);
        let s = weak12(4, None).unwrap();
        let got: Vec<(String, String)> = s
            .points
            .iter()
            .map(|p| (p[0].digit_string(), p[1].digit_string()))
            .collect();
        let want = [
            ("0", "0"),
            ("1", "1"),
            ("01", "01"),
            ("001", "101"),
            ("101", "001"),
            ("0001", "0001"),
            ("0101", "1001"),
            ("1001", "0101"),
        ];
        let want: Vec<(String, String)> = want
            .iter()
            .map(|(a, b)| (a.to_string(), b.to_string()))
            .collect();
        assert_eq!(got, want);
    }

    #[test]
    fn seed_must_sit_in_corner() {
        assert!(weak12(2, Some([w("1"), w("0")])).is_err());
        let seed = seed_from_floats(0.2, 0.3).unwrap();
        assert_eq!(weak12(2, Some(seed.clone())).unwrap().len(), 3);
        // y = 0.3 starts (.001...), inside a cell that must stay empty from m = 2 on
        assert!(matches!(weak12(3, Some(seed)), Err(Error::Precondition(_))));
    }

    #[test]
    fn csv_round_trip() {
        let phi = BaseSpec::phi();
        let h = hammersley(&phi, 6).unwrap();
        for digits in [true, false] {
            let mut buf = Vec::new();
            write_pointset_csv(&h, &mut buf, digits).unwrap();
            let back = read_pointset_csv(&buf[..]).unwrap();
            assert_eq!(back.set, h);
            assert_eq!(back.warnings.is_empty(), digits);
        }
        let d = hammersley_dyadic(4);
        let mut buf = Vec::new();
        write_pointset_csv(&d, &mut buf, false).unwrap();
        assert_eq!(read_pointset_csv(&buf[..]).unwrap().set, d);
    }

    #[test]
    fn csv_errors_carry_lines() {
        let text = "# base=1,1;m=1;s=2\nx,y\n0,0\n0.5,abc\n";
        match read_pointset_csv(text.as_bytes()) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 4),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(
            read_pointset_csv("x,y\n".as_bytes()),
            Err(Error::Parse { line: 1, .. })
        ));
        let text = "# base=1,1;m=1;s=2\nx,y,x_digits,y_digits\n0,0,11,0\n";
        assert!(matches!(
            read_pointset_csv(text.as_bytes()),
            Err(Error::Parse { line: 3, .. })
        ));
    }
}
