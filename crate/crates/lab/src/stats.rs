/// Mean, standard error of the mean and sample skewness.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Summary {
    pub mean: f64,
    pub se: f64,
    pub skewness: f64,
}

pub fn summarize(xs: &[f64]) -> Summary {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return Summary { mean, se: 0.0, skewness: 0.0 };
    }
    let m2 = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
    let m3 = xs.iter().map(|x| (x - mean).powi(3)).sum::<f64>() / n;
    let var = m2 * n / (n - 1.0);
    Summary {
        mean,
        se: (var / n).sqrt(),
        skewness: if m2 > 0.0 { m3 / m2.powf(1.5) } else { 0.0 },
    }
}

/// Linear-interpolation quantile of sorted data.
pub fn quantile(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (pos - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Normal-approximation standard error of the sample median.
pub fn median_se(xs: &[f64]) -> f64 {
    1.2533 * summarize(xs).se
}

/// Steps `i -> i+1` where the value rises by more than `k` combined
/// standard errors.
pub fn trend_violations(values: &[f64], ses: &[f64], k: f64) -> Vec<usize> {
    (1..values.len())
        .filter(|&i| values[i] - values[i - 1] > k * (ses[i].powi(2) + ses[i - 1].powi(2)).sqrt())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn summary_values() {
        let s = summarize(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(s.mean, 2.5);
        assert!((s.se - (5.0f64 / 3.0 / 4.0).sqrt()).abs() < 1e-15);
        assert_eq!(s.skewness, 0.0);
        assert!(summarize(&[0.0, 0.0, 0.0, 10.0]).skewness > 1.0);
        assert_eq!(quantile(&[1.0, 2.0, 3.0], 0.5), 2.0);
        assert_eq!(quantile(&[1.0, 2.0, 3.0, 4.0], 0.5), 2.5);
    }

    #[test]
    fn violations() {
        let v = [1.0, 0.9, 1.5, 1.4, 1.41];
        let se = [0.1; 5];
        assert_eq!(trend_violations(&v, &se, 2.0), vec![2]);
        assert!(trend_violations(&v, &[1.0; 5], 2.0).is_empty());
    }
}
