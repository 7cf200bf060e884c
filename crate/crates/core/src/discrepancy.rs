//! Star discrepancy and L2 star discrepancy of point sets in the unit square.
//!
//! The star discrepancy is exact up to a size limit and a labelled lower bound
//! beyond it. Normalized values are `D* N / log10(N)`.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::generators::hammersley;
use crate::numeration::{g_count, BaseSpec};

/// Above this many points the 2-D star discrepancy falls back to a lower bound.
pub const EXACT_LIMIT: usize = 30_000;

/// Coordinates closer than this are treated as equal.
pub const SNAP_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BoxKind {
    /// `[0, x] x [0, y]`: count minus volume.
    Closed,
    /// `[0, x) x [0, y)`: volume minus count.
    Open,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Witness {
    pub x: f64,
    pub y: Option<f64>,
    pub kind: BoxKind,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DiscResult {
    pub n: usize,
    pub value: f64,
    /// `value * N / log10(N)`, absent for `N < 2`.
    pub normalized: Option<f64>,
    pub witness: Option<Witness>,
    /// Set when `value` is only a guaranteed lower bound.
    pub bound: bool,
}

impl DiscResult {
    fn new(n: usize, value: f64, witness: Option<Witness>, bound: bool) -> Self {
        DiscResult {
            n,
            value,
            normalized: normalize(value, n).ok(),
            witness,
            bound,
        }
    }
}

/// `value * N / log10(N)`.
pub fn normalize(value: f64, n: usize) -> Result<f64> {
    if n < 2 {
        return Err(Error::Domain(format!(
            "normalization needs N >= 2, got {n}"
        )));
    }
    Ok(value * n as f64 / (n as f64).log10())
}

fn check_unit(v: f64) -> Result<()> {
    if (0.0..1.0).contains(&v) {
        Ok(())
    } else {
        Err(Error::OutOfUnit(v))
    }
}

/// One-dimensional star discrepancy from the sorted-order formula.
pub fn star_1d(xs: &[f64]) -> Result<DiscResult> {
    if xs.is_empty() {
        return Err(Error::EmptyInput);
    }
    for &x in xs {
        check_unit(x)?;
    }
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len() as f64;
    let mut best = (f64::NEG_INFINITY, 0.0, BoxKind::Closed);
    for (i, &x) in v.iter().enumerate() {
        let closed = (i + 1) as f64 / n - x;
        let open = x - i as f64 / n;
        if closed > best.0 {
            best = (closed, x, BoxKind::Closed);
        }
        if open > best.0 {
            best = (open, x, BoxKind::Open);
        }
    }
    Ok(DiscResult::new(
        xs.len(),
        best.0,
        Some(Witness {
            x: best.1,
            y: None,
            kind: best.2,
        }),
        false,
    ))
}

/// Replaces coordinates within `SNAP_TOL` of a larger neighbour by that neighbour.
fn snap(values: &mut [f64]) {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut run_end = values.len();
    for w in (0..order.len()).rev() {
        let cur = values[order[w]];
        if run_end < values.len() && values[order[run_end]] - cur <= SNAP_TOL {
            values[order[w]] = values[order[run_end]];
        } else {
            run_end = w;
        }
    }
}

fn grid(values: &[f64]) -> Vec<f64> {
    let mut g: Vec<f64> = values.to_vec();
    g.push(1.0);
    g.sort_by(f64::total_cmp);
    g.dedup();
    g
}

#[derive(Clone, Copy, Debug)]
struct Best {
    value: f64,
    x: f64,
    y: f64,
    kind: BoxKind,
}

impl Best {
    const NONE: Best = Best {
        value: f64::NEG_INFINITY,
        x: 0.0,
        y: 0.0,
        kind: BoxKind::Closed,
    };

    fn key(&self) -> (f64, f64, f64, u8) {
        let kind = match self.kind {
            BoxKind::Closed => 1,
            BoxKind::Open => 0,
        };
        (self.value, -self.x, -self.y, kind)
    }

    fn max(self, other: Best) -> Best {
        let (a, b) = (self.key(), other.key());
        let ord =
            a.0.total_cmp(&b.0)
                .then(a.1.total_cmp(&b.1))
                .then(a.2.total_cmp(&b.2))
                .then(a.3.cmp(&b.3));
        if ord.is_ge() {
            self
        } else {
            other
        }
    }
}

fn validate_2d(points: &[[f64; 2]]) -> Result<()> {
    if points.is_empty() {
        return Err(Error::EmptyInput);
    }
    for p in points {
        check_unit(p[0])?;
        check_unit(p[1])?;
    }
    Ok(())
}

/// Exact two-dimensional star discrepancy.
///
/// Every grid node `(x, y)` with `x` and `y` drawn from the coordinates
/// together with 1 is evaluated for both the closed and the open box. Columns
/// are swept left to right with a running histogram of y-ranks, giving
/// `O(N^2)` work, split into independent chunks across threads.
pub fn star_2d(points: &[[f64; 2]]) -> Result<DiscResult> {
    validate_2d(points)?;
    let n = points.len();
    let mut xs: Vec<f64> = points.iter().map(|p| p[0]).collect();
    let mut ys: Vec<f64> = points.iter().map(|p| p[1]).collect();
    snap(&mut xs);
    snap(&mut ys);
    let gx = grid(&xs);
    let gy = grid(&ys);
    let rank = |y: f64| gy.partition_point(|&v| v < y);

    // points sorted by x, carrying their y-rank
    let mut pts: Vec<(f64, usize)> = xs.iter().zip(&ys).map(|(&x, &y)| (x, rank(y))).collect();
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    let nf = n as f64;

    let threads = rayon::current_num_threads().max(1);
    let chunk = gx.len().div_ceil(threads * 4).max(16);
    let best = gx
        .par_chunks(chunk)
        .map(|cols| {
            let first = cols[0];
            let mut hist = vec![0u32; gy.len()];
            let mut next = pts.partition_point(|p| p.0 < first);
            for p in &pts[..next] {
                hist[p.1] += 1;
            }
            let mut best = Best::NONE;
            for &x in cols {
                let before = hist.clone();
                while next < pts.len() && pts[next].0 <= x {
                    hist[pts[next].1] += 1;
                    next += 1;
                }
                let (mut open, mut closed) = (0u32, 0u32);
                for (r, &y) in gy.iter().enumerate() {
                    let area = x * y;
                    let o = area - open as f64 / nf;
                    closed += hist[r];
                    let cl = closed as f64 / nf - area;
                    open += before[r];
                    if cl > best.value {
                        best = best.max(Best {
                            value: cl,
                            x,
                            y,
                            kind: BoxKind::Closed,
                        });
                    }
                    if o > best.value {
                        best = best.max(Best {
                            value: o,
                            x,
                            y,
                            kind: BoxKind::Open,
                        });
                    }
                }
            }
            best
        })
        .reduce(|| Best::NONE, Best::max);
    Ok(DiscResult::new(
        n,
        best.value,
        Some(Witness {
            x: best.x,
            y: Some(best.y),
            kind: best.kind,
        }),
        false,
    ))
}

struct Fenwick(Vec<u32>);

impl Fenwick {
    fn add(&mut self, mut i: usize) {
        i += 1;
        while i < self.0.len() {
            self.0[i] += 1;
            i += i & i.wrapping_neg();
        }
    }

    fn prefix(&self, mut i: usize) -> u32 {
        i += 1;
        let mut s = 0;
        while i > 0 {
            s += self.0[i];
            i -= i & i.wrapping_neg();
        }
        s
    }
}

/// A guaranteed lower bound on the 2-D star discrepancy in `O(N log N)`.
///
/// Only closed boxes cornered at the points themselves and the two
/// one-dimensional projections are evaluated.
pub fn star_2d_lower_bound(points: &[[f64; 2]]) -> Result<DiscResult> {
    validate_2d(points)?;
    let n = points.len();
    let nf = n as f64;
    let mut xs: Vec<f64> = points.iter().map(|p| p[0]).collect();
    let mut ys: Vec<f64> = points.iter().map(|p| p[1]).collect();
    snap(&mut xs);
    snap(&mut ys);
    let gy = grid(&ys);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| xs[a].total_cmp(&xs[b]).then(ys[a].total_cmp(&ys[b])));

    let mut best = Best::NONE;
    let mut tree = Fenwick(vec![0; gy.len() + 1]);
    let mut i = 0;
    while i < n {
        let x = xs[order[i]];
        let mut j = i;
        while j < n && xs[order[j]] == x {
            tree.add(gy.partition_point(|&v| v < ys[order[j]]));
            j += 1;
        }
        for &k in &order[i..j] {
            let y = ys[k];
            let count = tree.prefix(gy.partition_point(|&v| v < y));
            best = best.max(Best {
                value: count as f64 / nf - x * y,
                x,
                y,
                kind: BoxKind::Closed,
            });
        }
        i = j;
    }
    for (coords, on_x) in [(&xs, true), (&ys, false)] {
        let r = star_1d(coords)?;
        if let Some(w) = r.witness {
            let (x, y) = if on_x { (w.x, 1.0) } else { (1.0, w.x) };
            best = best.max(Best {
                value: r.value,
                x,
                y,
                kind: w.kind,
            });
        }
    }
    Ok(DiscResult::new(
        n,
        best.value,
        Some(Witness {
            x: best.x,
            y: Some(best.y),
            kind: best.kind,
        }),
        true,
    ))
}

/// Exact up to [`EXACT_LIMIT`] points, a labelled lower bound beyond.
pub fn star_2d_auto(points: &[[f64; 2]]) -> Result<DiscResult> {
    if points.len() > EXACT_LIMIT {
        star_2d_lower_bound(points)
    } else {
        star_2d(points)
    }
}

/// L2 star discrepancy via Warnock's double sum.
pub fn l2(points: &[Vec<f64>]) -> Result<DiscResult> {
    if points.is_empty() {
        return Err(Error::EmptyInput);
    }
    let s = points[0].len();
    for p in points {
        if p.len() != s {
            return Err(Error::Dimension {
                expected: s,
                got: p.len(),
            });
        }
        for &v in p {
            check_unit(v)?;
        }
    }
    let n = points.len() as f64;
    let single: f64 = points
        .iter()
        .map(|p| p.iter().map(|x| 1.0 - x * x).product::<f64>())
        .sum();
    let double: f64 = points
        .par_iter()
        .map(|p| {
            points
                .iter()
                .map(|q| {
                    p.iter()
                        .zip(q)
                        .map(|(a, b)| 1.0 - a.max(*b))
                        .product::<f64>()
                })
                .sum::<f64>()
        })
        .sum();
    let sq = 3f64.powi(-(s as i32)) - 2f64.powi(1 - s as i32) / n * single + double / (n * n);
    Ok(DiscResult::new(
        points.len(),
        sq.max(0.0).sqrt(),
        None,
        false,
    ))
}

pub fn to_json(r: &DiscResult) -> Result<String> {
    Ok(serde_json::to_string_pretty(r)?)
}

/// One row of a Hammersley discrepancy table.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TableRow {
    pub m: usize,
    pub n: usize,
    pub value: f64,
    pub normalized: f64,
    pub bound: bool,
}

/// Normalized star discrepancy of the base-`gamma` Hammersley sets for `m = 1..=m_max`.
pub fn hammersley_table(base: &BaseSpec, m_max: usize) -> Result<Vec<TableRow>> {
    let mut rows = Vec::new();
    for m in 1..=m_max {
        g_count(base, m)?;
        let pts = hammersley(base, m)?.pairs()?;
        let r = star_2d_auto(&pts)?;
        rows.push(TableRow {
            m,
            n: r.n,
            value: r.value,
            normalized: r.normalized.unwrap_or(f64::NAN),
            bound: r.bound,
        });
    }
    Ok(rows)
}
