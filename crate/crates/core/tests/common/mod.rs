#![allow(dead_code)]

// Every box anchored at the origin with corners on the coordinate grid (plus 1).
pub fn brute_star(points: &[[f64; 2]]) -> f64 {
    let n = points.len() as f64;
    let mut xs: Vec<f64> = points.iter().map(|p| p[0]).collect();
    let mut ys: Vec<f64> = points.iter().map(|p| p[1]).collect();
    xs.push(1.0);
    ys.push(1.0);
    let mut best: f64 = 0.0;
    for &x in &xs {
        for &y in &ys {
            let closed = points.iter().filter(|p| p[0] <= x && p[1] <= y).count() as f64;
            let open = points.iter().filter(|p| p[0] < x && p[1] < y).count() as f64;
            best = best.max(closed / n - x * y).max(x * y - open / n);
        }
    }
    best
}

// Integrates the squared local discrepancy exactly over the cells cut by the coordinates.
pub fn cellwise_l2(points: &[[f64; 2]]) -> f64 {
    let n = points.len() as f64;
    let grid = |j: usize| {
        let mut v: Vec<f64> = points.iter().map(|p| p[j]).collect();
        v.push(0.0);
        v.push(1.0);
        v.sort_by(f64::total_cmp);
        v.dedup();
        v
    };
    let (gx, gy) = (grid(0), grid(1));
    let mut total = 0.0;
    for a in gx.windows(2) {
        for b in gy.windows(2) {
            let c = points
                .iter()
                .filter(|p| p[0] <= a[0] && p[1] <= b[0])
                .count() as f64
                / n;
            let ix = (
                a[1] - a[0],
                (a[1] * a[1] - a[0] * a[0]) / 2.0,
                (a[1].powi(3) - a[0].powi(3)) / 3.0,
            );
            let iy = (
                b[1] - b[0],
                (b[1] * b[1] - b[0] * b[0]) / 2.0,
                (b[1].powi(3) - b[0].powi(3)) / 3.0,
            );
            total += c * c * ix.0 * iy.0 - 2.0 * c * ix.1 * iy.1 + ix.2 * iy.2;
        }
    }
    total.sqrt()
}
