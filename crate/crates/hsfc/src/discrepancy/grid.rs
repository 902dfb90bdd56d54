//! Corner-grid maximization engine.
//!
//! The local star discrepancy of an anchored box family is maximized over a
//! product grid of per-axis values (each axis ending at 1.0). Both closed
//! counts (`p <= y` on every axis, attaining `count/N - vol`) and open counts
//! (`p < y`, attaining `vol - count/N` in the half-open limit) are evaluated,
//! so the supremum over boxes with faces at or just below the grid is
//! attained exactly.
//!
//! Two dimensions get an incremental sweep with per-rank histograms; other
//! dimensions use subset-filtering recursion. Both paths are exact; the
//! cross-checks live in the tests.

use crate::sampler::Point;

/// `max` over grid corners of `max(closed/N - vol, vol - open/N)`.
///
/// `axes[j]` must be strictly increasing and end at 1.0; every point
/// coordinate must be `<= 1.0`.
pub(crate) fn corner_max(points: &[Point], axes: &[Vec<f64>]) -> f64 {
    debug_assert!(!points.is_empty());
    debug_assert!(axes.iter().all(|a| a.last() == Some(&1.0)));
    match axes.len() {
        1 => corner_max_1d(points, &axes[0]),
        2 => corner_max_2d(points, &axes[0], &axes[1]),
        _ => {
            let idx: Vec<usize> = (0..points.len()).collect();
            let mut best = f64::MIN;
            corner_max_rec(points, axes, 0, 1.0, &idx, &idx, &mut best);
            best
        }
    }
}

fn corner_max_1d(points: &[Point], ax: &[f64]) -> f64 {
    let n = points.len() as f64;
    let mut xs: Vec<f64> = points.iter().map(|p| p.coords()[0]).collect();
    xs.sort_by(f64::total_cmp);
    let mut best = f64::MIN;
    let (mut closed, mut open) = (0usize, 0usize);
    for &g in ax {
        while open < xs.len() && xs[open] < g {
            open += 1;
        }
        while closed < xs.len() && xs[closed] <= g {
            closed += 1;
        }
        best = best.max(closed as f64 / n - g).max(g - open as f64 / n);
    }
    best
}

fn corner_max_2d(points: &[Point], ax: &[f64], ay: &[f64]) -> f64 {
    let n = points.len() as f64;
    let ny = ay.len();
    // Bucket each point by the first y-grid rank where it starts counting.
    struct Entry {
        x: f64,
        closed_rank: usize,
        open_rank: usize,
    }
    let mut entries: Vec<Entry> = points
        .iter()
        .map(|p| {
            let y = p.coords()[1];
            Entry {
                x: p.coords()[0],
                closed_rank: ay.partition_point(|&g| g < y),
                open_rank: ay.partition_point(|&g| g <= y),
            }
        })
        .collect();
    entries.sort_by(|a, b| a.x.total_cmp(&b.x));

    let mut hist_closed = vec![0u32; ny + 1];
    let mut hist_open = vec![0u32; ny + 1];
    let (mut pc, mut po) = (0usize, 0usize);
    let mut best = f64::MIN;
    for &gx in ax {
        while po < entries.len() && entries[po].x < gx {
            hist_open[entries[po].open_rank] += 1;
            po += 1;
        }
        while pc < entries.len() && entries[pc].x <= gx {
            hist_closed[entries[pc].closed_rank] += 1;
            pc += 1;
        }
        let mut closed = 0u32;
        let mut open = 0u32;
        for (j, &gy) in ay.iter().enumerate() {
            closed += hist_closed[j];
            open += hist_open[j];
            let vol = gx * gy;
            best = best.max(closed as f64 / n - vol).max(vol - open as f64 / n);
        }
    }
    best
}

/// Recursive path for d >= 3. `closed_set` holds indices of points satisfying
/// `p <= v` on every processed axis, `open_set` those satisfying `p < v`.
fn corner_max_rec(
    points: &[Point],
    axes: &[Vec<f64>],
    axis: usize,
    vol: f64,
    closed_set: &[usize],
    open_set: &[usize],
    best: &mut f64,
) {
    let d = axes.len();
    let n = points.len() as f64;
    if axis == d - 1 {
        let ax = &axes[axis];
        let mut cs: Vec<f64> = closed_set.iter().map(|&i| points[i].coords()[axis]).collect();
        let mut os: Vec<f64> = open_set.iter().map(|&i| points[i].coords()[axis]).collect();
        cs.sort_by(f64::total_cmp);
        os.sort_by(f64::total_cmp);
        let (mut closed, mut open) = (0usize, 0usize);
        for &g in ax {
            while open < os.len() && os[open] < g {
                open += 1;
            }
            while closed < cs.len() && cs[closed] <= g {
                closed += 1;
            }
            let v = vol * g;
            *best = (*best).max(closed as f64 / n - v).max(v - open as f64 / n);
        }
        return;
    }

    // Process grid values ascending so the filtered subsets only grow.
    let mut closed_sorted: Vec<usize> = closed_set.to_vec();
    let mut open_sorted: Vec<usize> = open_set.to_vec();
    closed_sorted.sort_by(|&a, &b| points[a].coords()[axis].total_cmp(&points[b].coords()[axis]));
    open_sorted.sort_by(|&a, &b| points[a].coords()[axis].total_cmp(&points[b].coords()[axis]));
    let mut closed_acc: Vec<usize> = Vec::with_capacity(closed_sorted.len());
    let mut open_acc: Vec<usize> = Vec::with_capacity(open_sorted.len());
    let (mut pc, mut po) = (0usize, 0usize);
    for &g in &axes[axis] {
        while po < open_sorted.len() && points[open_sorted[po]].coords()[axis] < g {
            open_acc.push(open_sorted[po]);
            po += 1;
        }
        while pc < closed_sorted.len() && points[closed_sorted[pc]].coords()[axis] <= g {
            closed_acc.push(closed_sorted[pc]);
            pc += 1;
        }
        corner_max_rec(points, axes, axis + 1, vol * g, &closed_acc, &open_acc, best);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::RngState;
    use rand::Rng;

    fn pts(raw: &[&[f64]]) -> Vec<Point> {
        raw.iter().map(|c| Point::new(c.to_vec()).unwrap()).collect()
    }

    fn critical_axes(points: &[Point]) -> Vec<Vec<f64>> {
        let d = points[0].dim();
        (0..d)
            .map(|j| {
                let mut v: Vec<f64> = points.iter().map(|p| p.coords()[j]).collect();
                v.push(1.0);
                v.sort_by(f64::total_cmp);
                v.dedup();
                v
            })
            .collect()
    }

    /// Definition-level oracle: direct double loop over grid corners.
    fn brute(points: &[Point], axes: &[Vec<f64>]) -> f64 {
        let d = axes.len();
        let n = points.len() as f64;
        let mut idx = vec![0usize; d];
        let mut best = f64::MIN;
        loop {
            let corner: Vec<f64> = (0..d).map(|j| axes[j][idx[j]]).collect();
            let vol: f64 = corner.iter().product();
            let closed = points
                .iter()
                .filter(|p| p.coords().iter().zip(&corner) .all(|(x, g)| x <= g))
                .count() as f64;
            let open = points
                .iter()
                .filter(|p| p.coords().iter().zip(&corner).all(|(x, g)| x < g))
                .count() as f64;
            best = best.max(closed / n - vol).max(vol - open / n);
            let mut j = 0;
            loop {
                idx[j] += 1;
                if idx[j] < axes[j].len() {
                    break;
                }
                idx[j] = 0;
                j += 1;
                if j == d {
                    return best;
                }
            }
        }
    }

    #[test]
    fn sweep_matches_brute_force_2d() {
        let mut stream = RngState::new(2024).stream();
        for trial in 0..40 {
            let n = 1 + (trial % 12);
            let points: Vec<Point> = (0..n)
                .map(|_| Point::new(vec![stream.gen(), stream.gen()]).unwrap())
                .collect();
            let axes = critical_axes(&points);
            let fast = corner_max(&points, &axes);
            let slow = brute(&points, &axes);
            assert!((fast - slow).abs() < 1e-12, "trial {trial}: {fast} vs {slow}");
        }
    }

    #[test]
    fn recursion_matches_brute_force_3d() {
        let mut stream = RngState::new(4048).stream();
        for trial in 0..20 {
            let n = 1 + (trial % 8);
            let points: Vec<Point> = (0..n)
                .map(|_| Point::new(vec![stream.gen(), stream.gen(), stream.gen()]).unwrap())
                .collect();
            let axes = critical_axes(&points);
            let fast = corner_max(&points, &axes);
            let slow = brute(&points, &axes);
            assert!((fast - slow).abs() < 1e-12, "trial {trial}: {fast} vs {slow}");
        }
    }

    #[test]
    fn duplicate_points_count_with_multiplicity() {
        let points = pts(&[&[0.5, 0.5], &[0.5, 0.5]]);
        let axes = critical_axes(&points);
        // Both points sit in [0,(0.5,0.5)]: count/N - vol = 1 - 0.25.
        assert!((corner_max(&points, &axes) - 0.75).abs() < 1e-15);
    }
}
