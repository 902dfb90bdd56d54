//! Small statistics helpers shared by the estimators and the experiment
//! driver: compensated summation, normal-approximation intervals, a
//! two-sample Kolmogorov–Smirnov statistic, and ordinary least squares.

/// Compensated sum (Kahan–Babuška–Neumaier).
pub fn kahan_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let mut sum = 0.0;
    let mut c = 0.0;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            c += (sum - t) + v;
        } else {
            c += (v - t) + sum;
        }
        sum = t;
    }
    sum + c
}

/// Sample mean and (n-1)-normalized standard deviation. Empty input is the
/// caller's bug; a single value has std 0.
pub fn mean_std(values: &[f64]) -> (f64, f64) {
    assert!(!values.is_empty(), "mean_std on empty slice");
    let n = values.len() as f64;
    let mean = kahan_sum(values.iter().copied()) / n;
    if values.len() == 1 {
        return (mean, 0.0);
    }
    let ss = kahan_sum(values.iter().map(|v| (v - mean) * (v - mean)));
    (mean, (ss / (n - 1.0)).sqrt())
}

/// Normal-approximation 95% confidence interval for the mean of `n` values.
pub fn ci95(mean: f64, std: f64, n: usize) -> (f64, f64) {
    let half = 1.959963984540054 * std / (n as f64).sqrt();
    (mean - half, mean + half)
}

/// Two-sample Kolmogorov–Smirnov statistic `sup |F_a - F_b|`.
pub fn ks_statistic(a: &[f64], b: &[f64]) -> f64 {
    assert!(!a.is_empty() && !b.is_empty());
    let mut xs = a.to_vec();
    let mut ys = b.to_vec();
    xs.sort_by(f64::total_cmp);
    ys.sort_by(f64::total_cmp);
    let (n, m) = (xs.len(), ys.len());
    let (mut i, mut j) = (0usize, 0usize);
    let mut sup: f64 = 0.0;
    while i < n && j < m {
        let t = xs[i].min(ys[j]);
        while i < n && xs[i] <= t {
            i += 1;
        }
        while j < m && ys[j] <= t {
            j += 1;
        }
        sup = sup.max((i as f64 / n as f64 - j as f64 / m as f64).abs());
    }
    sup
}

/// Asymptotic two-sample KS rejection threshold at significance `alpha`:
/// `c(alpha) * sqrt((n+m)/(n m))` with `c = sqrt(ln(2/alpha)/2)`.
pub fn ks_threshold(n: usize, m: usize, alpha: f64) -> f64 {
    assert!(alpha > 0.0 && alpha < 1.0);
    let c = ((2.0 / alpha).ln() / 2.0).sqrt();
    c * (((n + m) as f64) / ((n * m) as f64)).sqrt()
}

/// Ordinary least squares fit y = intercept + slope * x.
#[derive(Clone, Copy, Debug)]
pub struct OlsFit {
    pub slope: f64,
    pub intercept: f64,
    /// Standard error of the slope (residual-based; 0 for a perfect 2-point fit).
    pub slope_stderr: f64,
}

pub fn ols(xs: &[f64], ys: &[f64]) -> OlsFit {
    assert_eq!(xs.len(), ys.len());
    assert!(xs.len() >= 2, "OLS needs at least two points");
    let n = xs.len() as f64;
    let xbar = kahan_sum(xs.iter().copied()) / n;
    let ybar = kahan_sum(ys.iter().copied()) / n;
    let sxx = kahan_sum(xs.iter().map(|x| (x - xbar) * (x - xbar)));
    assert!(sxx > 0.0, "OLS needs at least two distinct x values");
    let sxy = kahan_sum(xs.iter().zip(ys).map(|(x, y)| (x - xbar) * (y - ybar)));
    let slope = sxy / sxx;
    let intercept = ybar - slope * xbar;
    let slope_stderr = if xs.len() > 2 {
        let rss = kahan_sum(xs.iter().zip(ys).map(|(x, y)| {
            let r = y - (intercept + slope * x);
            r * r
        }));
        (rss / (n - 2.0) / sxx).sqrt()
    } else {
        0.0
    };
    OlsFit { slope, intercept, slope_stderr }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kahan_handles_small_terms() {
        let xs = vec![1e16, 1.0, -1e16];
        assert_eq!(kahan_sum(xs), 1.0);
    }

    #[test]
    fn mean_std_basics() {
        let (m, s) = mean_std(&[1.0, 2.0, 3.0, 4.0]);
        assert!((m - 2.5).abs() < 1e-15);
        assert!((s - (5.0f64 / 3.0).sqrt()).abs() < 1e-12);
        let (m1, s1) = mean_std(&[7.0]);
        assert_eq!((m1, s1), (7.0, 0.0));
    }

    #[test]
    fn ks_statistic_extremes() {
        let a = [0.1, 0.2, 0.3];
        let b = [0.7, 0.8, 0.9];
        assert!((ks_statistic(&a, &b) - 1.0).abs() < 1e-15);
        assert_eq!(ks_statistic(&a, &a), 0.0);
    }

    #[test]
    fn ks_threshold_value() {
        // alpha = 0.01, n = m = 10^4: c = 1.6276..., threshold = 0.023018...
        let t = ks_threshold(10_000, 10_000, 0.01);
        assert!((t - 0.023018).abs() < 1e-5);
    }

    #[test]
    fn ols_exact_line() {
        let xs: Vec<f64> = (1..=5).map(|i| i as f64).collect();
        let ys: Vec<f64> = xs.iter().map(|x| 3.0 - 0.5 * x).collect();
        let fit = ols(&xs, &ys);
        assert!((fit.slope + 0.5).abs() < 1e-14);
        assert!((fit.intercept - 3.0).abs() < 1e-14);
        assert!(fit.slope_stderr < 1e-12);
    }
}
