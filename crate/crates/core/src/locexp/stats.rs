//! Order statistics and the two-sample Kolmogorov-Smirnov test used to
//! compare error distributions.

fn sorted(xs: &[f64]) -> Vec<f64> {
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    v
}

pub fn median(xs: &[f64]) -> f64 {
    quantile(xs, 0.5)
}

/// Linear-interpolated quantile, p in [0, 1].
pub fn quantile(xs: &[f64], p: f64) -> f64 {
    assert!(!xs.is_empty() && (0.0..=1.0).contains(&p));
    let v = sorted(xs);
    let pos = p * (v.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    let frac = pos - lo as f64;
    v[lo] * (1.0 - frac) + v[hi] * frac
}

#[derive(Debug, Clone, Copy)]
pub struct KsTest {
    pub statistic: f64,
    pub threshold: f64,
}

impl KsTest {
    /// True when the samples cannot be distinguished at the test's level.
    pub fn indistinguishable(&self) -> bool {
        self.statistic <= self.threshold
    }
}

/// Two-sample KS test with the asymptotic threshold
/// c(α)·√((n+m)/(n·m)), c(α) = √(−ln(α/2)/2).
pub fn ks_two_sample(a: &[f64], b: &[f64], alpha: f64) -> KsTest {
    assert!(!a.is_empty() && !b.is_empty());
    assert!(alpha > 0.0 && alpha < 1.0);
    let a = sorted(a);
    let b = sorted(b);
    let (n, m) = (a.len(), b.len());
    let mut i = 0;
    let mut j = 0;
    let mut d: f64 = 0.0;
    while i < n && j < m {
        let x = a[i].min(b[j]);
        while i < n && a[i] <= x {
            i += 1;
        }
        while j < m && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / n as f64 - j as f64 / m as f64).abs());
    }
    let c = (-(alpha / 2.0).ln() / 2.0).sqrt();
    KsTest { statistic: d, threshold: c * ((n + m) as f64 / (n as f64 * m as f64)).sqrt() }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn median_and_quantiles() {
        let xs = [5.0, 1.0, 3.0, 2.0, 4.0];
        assert_eq!(median(&xs), 3.0);
        assert_eq!(quantile(&xs, 0.0), 1.0);
        assert_eq!(quantile(&xs, 1.0), 5.0);
        assert_eq!(quantile(&xs, 0.25), 2.0);
    }

    #[test]
    fn identical_samples_are_indistinguishable() {
        let xs: Vec<f64> = (0..100).map(|i| i as f64 * 0.37).collect();
        let t = ks_two_sample(&xs, &xs, 0.01);
        assert_eq!(t.statistic, 0.0);
        assert!(t.indistinguishable());
    }

    #[test]
    fn shifted_samples_are_distinguished() {
        let a: Vec<f64> = (0..200).map(|i| i as f64 / 200.0).collect();
        let b: Vec<f64> = a.iter().map(|x| x + 0.5).collect();
        let t = ks_two_sample(&a, &b, 0.01);
        assert!(!t.indistinguishable(), "D = {}", t.statistic);
    }

    #[test]
    fn same_distribution_draws_pass_at_one_percent() {
        use crate::airlink::rng::seeded_rng;
        use rand::Rng;
        let mut rng = seeded_rng(17, "ks", 0);
        let a: Vec<f64> = (0..150).map(|_| rng.gen::<f64>()).collect();
        let b: Vec<f64> = (0..150).map(|_| rng.gen::<f64>()).collect();
        assert!(ks_two_sample(&a, &b, 0.01).indistinguishable());
    }
}
