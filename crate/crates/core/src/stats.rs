//! Exact ratios, report rounding, and Pearson correlation.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use statrs::function::beta::beta_reg;

use crate::error::{Error, Result};

pub const DEFAULT_PERMUTATIONS: usize = 10_000;

/// A count over a count. Percentages and averages are derived from the exact
/// integers and rounded once.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Ratio {
    pub num: u64,
    pub den: u64,
}

impl Ratio {
    pub fn new(num: u64, den: u64) -> Self {
        Self { num, den }
    }

    pub fn value(self) -> Option<f64> {
        (self.den > 0).then(|| self.num as f64 / self.den as f64)
    }

    pub fn percent(self) -> Option<f64> {
        self.value().map(|v| 100.0 * v)
    }

    /// `num/den` rounded half-to-even at `places` decimals, in exact integer
    /// arithmetic.
    pub fn rounded(self, places: u32) -> Option<f64> {
        round_rational(self.num as u128, self.den as u128, places)
    }

    pub fn percent_rounded(self, places: u32) -> Option<f64> {
        round_rational(100 * self.num as u128, self.den as u128, places)
    }
}

fn round_rational(num: u128, den: u128, places: u32) -> Option<f64> {
    if den == 0 {
        return None;
    }
    let scale = 10u128.pow(places);
    let scaled = num * scale;
    let mut q = scaled / den;
    let r = scaled % den;
    if 2 * r > den || (2 * r == den && q % 2 == 1) {
        q += 1;
    }
    Some(q as f64 / scale as f64)
}

/// Round half-to-even at `places` decimals.
pub fn round_half_even(x: f64, places: i32) -> f64 {
    let scale = 10f64.powi(places);
    (x * scale).round_ties_even() / scale
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Correlation {
    pub n: usize,
    pub r: f64,
    /// Two-sided p-value from the t distribution with n-2 degrees of freedom.
    pub p: f64,
}

fn centered(v: &[f64]) -> (Vec<f64>, f64) {
    let mean = v.iter().sum::<f64>() / v.len() as f64;
    let c: Vec<f64> = v.iter().map(|x| x - mean).collect();
    let ss = c.iter().map(|x| x * x).sum();
    (c, ss)
}

fn check(x: &[f64], y: &[f64]) -> Result<()> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch(x.len(), y.len()));
    }
    if x.len() < 3 {
        return Err(Error::TooFewPoints(x.len()));
    }
    Ok(())
}

pub fn pearson_r(x: &[f64], y: &[f64]) -> Result<Correlation> {
    check(x, y)?;
    let (xc, sxx) = centered(x);
    let (yc, syy) = centered(y);
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::DegenerateVector);
    }
    let sxy: f64 = xc.iter().zip(&yc).map(|(a, b)| a * b).sum();
    let r = (sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0);
    let n = x.len();
    Ok(Correlation {
        n,
        r,
        p: analytic_p(r, n),
    })
}

fn analytic_p(r: f64, n: usize) -> f64 {
    let df = (n - 2) as f64;
    let one_minus = 1.0 - r * r;
    if one_minus <= 0.0 {
        return 0.0;
    }
    let t2 = r * r * df / one_minus;
    beta_reg(df / 2.0, 0.5, df / (df + t2))
}

/// Two-sided permutation p-value for Pearson r: `(b + 1) / (m + 1)` where `b`
/// counts shuffles of `y` with `|r| >= |r_obs|`.
pub fn permutation_p(x: &[f64], y: &[f64], permutations: usize, seed: u64) -> Result<f64> {
    check(x, y)?;
    let (xc, sxx) = centered(x);
    let (mut yc, syy) = centered(y);
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::DegenerateVector);
    }
    let dot = |y: &[f64]| xc.iter().zip(y).map(|(a, b)| a * b).sum::<f64>();
    let observed = dot(&yc).abs() * (1.0 - 1e-12);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut hits = 0usize;
    for _ in 0..permutations {
        yc.shuffle(&mut rng);
        if dot(&yc).abs() >= observed {
            hits += 1;
        }
    }
    Ok((hits + 1) as f64 / (permutations + 1) as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ratio_rounding_is_half_even() {
        assert_eq!(Ratio::new(1, 8).rounded(2), Some(0.12));
        assert_eq!(Ratio::new(3, 8).rounded(2), Some(0.38));
        assert_eq!(Ratio::new(1, 3).percent_rounded(2), Some(33.33));
        assert_eq!(Ratio::new(2, 3).percent_rounded(2), Some(66.67));
        assert_eq!(Ratio::new(1, 0).percent(), None);
        assert_eq!(round_half_even(0.125, 2), 0.12);
        assert_eq!(round_half_even(76.305, 2), 76.31);
    }

    #[test]
    fn perfect_correlation() {
        let x = [1.0, 2.0, 3.0, 4.0];
        let c = pearson_r(&x, &[2.0, 4.0, 6.0, 8.0]).unwrap();
        assert!((c.r - 1.0).abs() < 1e-12);
        assert_eq!(c.p, 0.0);
    }

    #[test]
    fn known_value() {
        // scipy.stats.pearsonr([1,2,3,4,5],[2,1,4,3,5]) -> (0.8, 0.10408803866182788)
        let c = pearson_r(&[1.0, 2.0, 3.0, 4.0, 5.0], &[2.0, 1.0, 4.0, 3.0, 5.0]).unwrap();
        assert!((c.r - 0.8).abs() < 1e-12);
        assert!((c.p - 0.10408803866182788).abs() < 1e-9);
    }

    #[test]
    fn degenerate_inputs() {
        assert!(matches!(
            pearson_r(&[1.0; 4], &[1.0, 2.0, 3.0, 4.0]),
            Err(Error::DegenerateVector)
        ));
        assert!(matches!(
            pearson_r(&[1.0, 2.0], &[1.0, 2.0]),
            Err(Error::TooFewPoints(2))
        ));
        assert!(matches!(
            pearson_r(&[1.0, 2.0, 3.0], &[1.0]),
            Err(Error::LengthMismatch(3, 1))
        ));
    }

    #[test]
    fn permutation_is_seeded() {
        let x = [0.0, 1.0, 0.0, 1.0, 1.0, 0.0, 1.0, 0.0];
        let y = [0.2, 0.9, 0.1, 0.7, 0.8, 0.3, 0.4, 0.5];
        let a = permutation_p(&x, &y, 2000, 7).unwrap();
        assert_eq!(a, permutation_p(&x, &y, 2000, 7).unwrap());
        let analytic = pearson_r(&x, &y).unwrap().p;
        assert!((a - analytic).abs() < 0.05, "{a} vs {analytic}");
    }
}
