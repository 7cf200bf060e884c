use irrnet_core::equidist::required_count;
use irrnet_core::intervals::{
    contains, is_prime_by_least_level, partition, partition_1d, prime_intervals, refine,
    write_intervals_csv, AxisInterval,
};
use irrnet_core::numeration::{fib, g_count, BaseSpec, DigitWord};

fn q1_bases() -> Vec<BaseSpec> {
    (1..=4).map(|p| BaseSpec::new(p, 1).unwrap()).collect()
}

fn ends(base: &BaseSpec, a: &AxisInterval) -> (f64, f64) {
    (a.left_value(base), a.right_value(base))
}

fn same(x: (f64, f64), y: (f64, f64)) -> bool {
    (x.0 - y.0).abs() < 1e-12 && (x.1 - y.1).abs() < 1e-12
}

#[test]
fn partitions_tile_the_unit_interval() {
    let mut cases = vec![(BaseSpec::phi(), 14)];
    cases.extend(q1_bases().into_iter().skip(1).map(|b| (b, 10)));
    for (base, m_max) in cases {
        for m in 0..=m_max {
            let cells = partition_1d(&base, m).unwrap();
            assert_eq!(cells.len() as u64, g_count(&base, m).unwrap());
            assert!(cells[0].left_value(&base).abs() < 1e-15);
            assert!(cells.last().unwrap().right.is_none());
            let mut total = 0.0;
            for (i, c) in cells.iter().enumerate() {
                let (l, r) = ends(&base, c);
                assert!(l < r, "{base:?} m={m} cell {i} empty");
                if let Some(next) = cells.get(i + 1) {
                    assert!((next.left_value(&base) - r).abs() < 1e-12);
                }
                total += r - l;
            }
            assert!((total - 1.0).abs() < 1e-12, "{base:?} m={m}: {total}");
        }
    }
}

#[test]
fn lengths_follow_log_length() {
    for base in q1_bases() {
        for m in 0..=8 {
            for c in partition_1d(&base, m).unwrap() {
                let (l, r) = ends(&base, &c);
                let want = base.gamma().powi(-(c.log_length(&base) as i32));
                assert!((r - l - want).abs() < 1e-12, "{base:?} {:?}", c.numerator);
            }
        }
    }
}

#[test]
fn refinement_reproduces_next_level() {
    let phi = BaseSpec::phi();
    for m in 0..=12 {
        let refined: Vec<AxisInterval> = partition_1d(&phi, m)
            .unwrap()
            .iter()
            .flat_map(|c| refine(&phi, c).unwrap())
            .collect();
        assert_eq!(refined, partition_1d(&phi, m + 1).unwrap(), "m={m}");
    }
    assert!(refine(
        &BaseSpec::new(2, 1).unwrap(),
        &partition_1d(&phi, 1).unwrap()[0]
    )
    .is_err());
}

#[test]
fn refinement_of_first_cells() {
    let phi = BaseSpec::phi();
    let level1 = partition_1d(&phi, 1).unwrap();
    let kids = refine(&phi, &level1[0]).unwrap();
    assert_eq!(kids.iter().map(|c| c.itype).collect::<Vec<_>>(), vec![0, 1]);
    let kid = refine(&phi, &level1[1]).unwrap();
    assert_eq!(kid.len(), 1);
    assert_eq!(kid[0].itype, 2);
    assert!(same(ends(&phi, &kid[0]), ends(&phi, &level1[1])));
}

#[test]
fn golden_type_counts() {
    let phi = BaseSpec::phi();
    for m in 1..=14i64 {
        let mut counts = [0u64; 3];
        for c in partition_1d(&phi, m as usize).unwrap() {
            counts[c.itype as usize] += 1;
        }
        assert_eq!(
            counts,
            [
                fib(m - 2).unwrap(),
                fib(m - 2).unwrap(),
                fib(m - 3).unwrap()
            ],
            "m={m}"
        );
    }
}

#[test]
fn level_five_listing() {
    let phi = BaseSpec::phi();
    let cells = partition_1d(&phi, 5).unwrap();
    assert_eq!(cells.len(), 13);
    let prime = cells.iter().filter(|c| c.is_prime(&phi)).count();
    assert_eq!(prime, 10);
    assert_eq!(prime_intervals(&phi, &[3]).unwrap().len(), 4);
    assert_eq!(partition_1d(&phi, 3).unwrap().len(), 5);
}

fn occurs(base: &BaseSpec, level: &[AxisInterval], e: (f64, f64)) -> bool {
    let i = level.partition_point(|d| d.left_value(base) < e.0 - 1e-12);
    level.get(i).is_some_and(|d| same(ends(base, d), e))
}

// A cell is prime at the least level where it occurs as a set.
#[test]
fn primality_is_least_level() {
    for base in q1_bases() {
        let levels: Vec<Vec<AxisInterval>> =
            (0..=8).map(|m| partition_1d(&base, m).unwrap()).collect();
        for m in 0..=8 {
            for c in &levels[m] {
                let e = ends(&base, c);
                let earlier = (0..m).any(|k| occurs(&base, &levels[k], e));
                assert_eq!(
                    c.is_prime(&base),
                    !earlier,
                    "{base:?} m={m} {}",
                    c.numerator
                );
                assert_eq!(is_prime_by_least_level(&base, c).unwrap(), !earlier);
                if !earlier {
                    let later = (m + 1..=8)
                        .filter(|&k| occurs(&base, &levels[k], e))
                        .count();
                    assert!(later <= 1);
                }
            }
        }
    }
}

#[test]
fn type_two_equals_coarser_type_one() {
    let phi = BaseSpec::phi();
    for m in 2..=10 {
        let coarse = partition_1d(&phi, m - 1).unwrap();
        for c in partition_1d(&phi, m)
            .unwrap()
            .iter()
            .filter(|c| c.itype == 2)
        {
            let twin = coarse
                .iter()
                .find(|d| same(ends(&phi, d), ends(&phi, c)))
                .expect("coarser twin");
            assert_eq!(twin.itype, 1);
        }
    }
}

fn kvecs(dim: usize, cap: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for _ in 0..dim {
        out = out
            .into_iter()
            .flat_map(|v| {
                (0..=cap).map(move |k| {
                    let mut w = v.clone();
                    w.push(k);
                    w
                })
            })
            .collect();
    }
    out
}

#[test]
fn required_counts_sum_to_set_size() {
    let phi = BaseSpec::phi();
    let log_phi = |x: f64| -x.ln() / phi.gamma().ln();
    for m in 0..=8usize {
        for dim in 1..=3 {
            for kvec in kvecs(dim, m + 2) {
                let rho: usize = kvec.iter().map(|&k| k + (k > 0) as usize).sum();
                if rho > m + 2 {
                    continue;
                }
                let mut total = 0u64;
                for cell in partition(&phi, &kvec).unwrap() {
                    let vol: f64 = cell
                        .axes
                        .iter()
                        .map(|a| a.right_value(&phi) - a.left_value(&phi))
                        .product();
                    let logvol = log_phi(vol).round() as usize;
                    assert_eq!(logvol, cell.logvol);
                    let need = match m as i64 - logvol as i64 {
                        i if i >= -2 => fib(i).unwrap(),
                        i => panic!("index {i}"),
                    };
                    assert_eq!(required_count(&phi, m, logvol).unwrap(), need);
                    total += need;
                }
                assert_eq!(total, fib(m as i64).unwrap(), "m={m} {kvec:?}");
            }
        }
    }
}

#[test]
fn membership_is_half_open() {
    let phi = BaseSpec::phi();
    let w = |s: &str| DigitWord::parse_fractional(s).unwrap();
    let cell = &partition(&phi, &[1, 1]).unwrap()[0];
    assert!(contains(cell, &[DigitWord::zero(), DigitWord::zero()]).unwrap());
    let i0 = &partition(&phi, &[1]).unwrap()[0];
    assert!(!contains(i0, &[w(".10")]).unwrap());
    let i1 = &partition(&phi, &[2]).unwrap()[1];
    assert_eq!(i1.axes[0].itype, 1);
    assert!(!contains(i1, &[w(".0010")]).unwrap());
    assert!(contains(i1, &[w(".01")]).unwrap());
    assert!(contains(cell, &[DigitWord::zero()]).is_err());
}

#[test]
fn membership_matches_floats() {
    let phi = BaseSpec::phi();
    let cells = partition(&phi, &[4, 3]).unwrap();
    let points: Vec<DigitWord> = partition_1d(&phi, 9)
        .unwrap()
        .into_iter()
        .map(|c| c.numerator)
        .collect();
    for c in &cells {
        for x in points.iter().step_by(3) {
            for y in points.iter().step_by(5) {
                let (xv, yv) = (
                    irrnet_core::numeration::value(&phi, x),
                    irrnet_core::numeration::value(&phi, y),
                );
                let inside = |a: &AxisInterval, v: f64| {
                    a.left_value(&phi) - 1e-12 <= v && v < a.right_value(&phi) - 1e-12
                };
                assert_eq!(
                    contains(c, &[x.clone(), y.clone()]).unwrap(),
                    inside(&c.axes[0], xv) && inside(&c.axes[1], yv)
                );
            }
        }
    }
}

#[test]
fn general_base_needs_q_one() {
    let b = BaseSpec::new(2, 2).unwrap();
    assert!(partition_1d(&b, 2).is_err());
    assert!(partition(&b, &[1, 1]).is_err());
}

#[test]
fn interval_csv_rows() {
    let phi = BaseSpec::phi();
    let mut buf = Vec::new();
    write_intervals_csv(&phi, &partition_1d(&phi, 2).unwrap(), &mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(
        lines[0],
        "level,anchor_index,type,left_float,right_float,prime"
    );
    assert_eq!(lines.len(), 4);
    assert!(lines[3].starts_with("2,0,2,"));
    assert!(lines[3].ends_with(",false"));
}
