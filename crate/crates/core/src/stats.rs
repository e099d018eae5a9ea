//! Running moments with deterministic merging.

/// Welford accumulator for mean and variance.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Welford {
    n: u64,
    mean: f64,
    m2: f64,
}

impl Welford {
    pub fn new() -> Self {
        Self::default()
    }

    /// `n` copies of `value`.
    pub fn constant(n: u64, value: f64) -> Self {
        Self { n, mean: if n == 0 { 0.0 } else { value }, m2: 0.0 }
    }

    #[inline]
    pub fn push(&mut self, x: f64) {
        self.n += 1;
        let d = x - self.mean;
        self.mean += d / self.n as f64;
        self.m2 += d * (x - self.mean);
    }

    /// Chan et al. pairwise combination. The result depends on the order of
    /// merges, so callers combine chunks in a fixed order.
    pub fn merge(&mut self, o: &Self) {
        if o.n == 0 {
            return;
        }
        if self.n == 0 {
            *self = *o;
            return;
        }
        let n = self.n + o.n;
        let d = o.mean - self.mean;
        let nf = n as f64;
        self.mean += d * o.n as f64 / nf;
        self.m2 += o.m2 + d * d * self.n as f64 * o.n as f64 / nf;
        self.n = n;
    }

    pub fn count(&self) -> u64 {
        self.n
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    /// Unbiased sample variance (0 with fewer than two points).
    pub fn variance(&self) -> f64 {
        if self.n < 2 {
            0.0
        } else {
            (self.m2 / (self.n - 1) as f64).max(0.0)
        }
    }

    /// Standard error of the mean.
    pub fn stderr(&self) -> f64 {
        if self.n == 0 {
            0.0
        } else {
            (self.variance() / self.n as f64).sqrt()
        }
    }
}

impl FromIterator<f64> for Welford {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut w = Self::new();
        for x in iter {
            w.push(x);
        }
        w
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn merge_matches_single_pass() {
        let xs: Vec<f64> = (0..1000).map(|i| ((i * 37) % 101) as f64 * 0.1 - 3.0).collect();
        let all: Welford = xs.iter().copied().collect();
        let mut a: Welford = xs[..333].iter().copied().collect();
        let b: Welford = xs[333..].iter().copied().collect();
        a.merge(&b);
        assert_eq!(a.count(), all.count());
        assert_relative_eq!(a.mean(), all.mean(), max_relative = 1e-13);
        assert_relative_eq!(a.variance(), all.variance(), max_relative = 1e-12);
    }

    #[test]
    fn constant_has_zero_spread() {
        let w: Welford = std::iter::repeat_n(2.5, 10).collect();
        assert_eq!(w.mean(), 2.5);
        assert_eq!(w.variance(), 0.0);
        assert_eq!(w.stderr(), 0.0);
    }
}
