use serde::{Deserialize, Serialize};

use super::special::inc_beta_xy;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TTestResult {
    pub t: f64,
    /// Welch–Satterthwaite degrees of freedom.
    pub df: f64,
    pub p_two_sided: f64,
    pub mean_a: f64,
    pub mean_b: f64,
    pub n_a: usize,
    pub n_b: usize,
    /// Both samples had zero variance; t and p follow the fixed convention.
    pub degenerate: bool,
}

/// Two-sided tail mass P(|T| > |t|) for Student's t with `df` degrees of freedom.
fn two_sided_tail(t: f64, df: f64) -> f64 {
    if t.is_infinite() {
        return 0.0;
    }
    let t2 = t * t;
    // x = df / (df + t²) and 1 − x, each formed without cancellation
    let x = df / (df + t2);
    let y = t2 / (df + t2);
    inc_beta_xy(x, y, 0.5 * df, 0.5)
}

/// Student's t CDF through the incomplete-beta identity.
pub fn student_t_cdf(x: f64, df: f64) -> Result<f64> {
    if df.is_nan() || df <= 0.0 {
        return Err(Error::InvalidInput(format!(
            "degrees of freedom must be positive, got {df}"
        )));
    }
    if x.is_nan() {
        return Err(Error::InvalidInput("t statistic is NaN".into()));
    }
    if x == 0.0 {
        return Ok(0.5);
    }
    let half_tail = 0.5 * two_sided_tail(x, df);
    Ok(if x > 0.0 { 1.0 - half_tail } else { half_tail })
}

fn mean_var(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let ss: f64 = xs.iter().map(|x| (x - mean).powi(2)).sum();
    (mean, ss / (n - 1.0))
}

/// Welch's unequal-variance two-sample t-test.
pub fn welch_t(a: &[f64], b: &[f64]) -> Result<TTestResult> {
    if a.len() < 2 || b.len() < 2 {
        return Err(Error::InsufficientData(format!(
            "Welch test needs at least 2 values per sample, got {} and {}",
            a.len(),
            b.len()
        )));
    }
    if a.iter().chain(b).any(|v| !v.is_finite()) {
        return Err(Error::InvalidInput(
            "Welch test input contains non-finite values".into(),
        ));
    }
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mean_a, var_a) = mean_var(a);
    let (mean_b, var_b) = mean_var(b);
    let (se_a, se_b) = (var_a / na, var_b / nb);
    let se2 = se_a + se_b;

    let base = TTestResult {
        t: 0.0,
        df: na + nb - 2.0,
        p_two_sided: 1.0,
        mean_a,
        mean_b,
        n_a: a.len(),
        n_b: b.len(),
        degenerate: false,
    };

    if se2 == 0.0 {
        let diff = mean_a - mean_b;
        return Ok(if diff == 0.0 {
            TTestResult {
                degenerate: true,
                ..base
            }
        } else {
            TTestResult {
                t: diff.signum() * f64::INFINITY,
                p_two_sided: 0.0,
                degenerate: true,
                ..base
            }
        });
    }

    let t = (mean_a - mean_b) / se2.sqrt();
    let df = se2 * se2 / (se_a * se_a / (na - 1.0) + se_b * se_b / (nb - 1.0));
    Ok(TTestResult {
        t,
        df,
        p_two_sided: two_sided_tail(t, df).clamp(0.0, 1.0),
        ..base
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn hand_example() {
        let r = welch_t(&[1.0, 2.0, 3.0, 4.0, 5.0], &[2.0, 4.0, 6.0, 8.0, 10.0]).unwrap();
        // t = −3 / √2.5, df = 6.25² / (0.25/4 + 4/4) = 100/17
        assert!((r.t - (-3.0 / 2.5f64.sqrt())).abs() < 1e-14);
        assert!((r.t + 1.8974).abs() < 1e-4);
        assert!((r.df - 100.0 / 17.0).abs() < 1e-12);
        assert!((r.df - 5.8824).abs() < 1e-4);
        assert!(r.p_two_sided > 0.1 && r.p_two_sided < 0.11);
    }

    #[test]
    fn identical_samples() {
        let a = [1.0, 3.0, 4.0, 8.0];
        let r = welch_t(&a, &a).unwrap();
        assert_eq!(r.t, 0.0);
        assert_eq!(r.p_two_sided, 1.0);
    }

    #[test]
    fn degenerate_cases() {
        let r = welch_t(&[0.0, 0.0], &[0.0, 0.0]).unwrap();
        assert!(r.degenerate);
        assert_eq!((r.t, r.p_two_sided), (0.0, 1.0));
        let r = welch_t(&[1.0, 1.0], &[0.0, 0.0]).unwrap();
        assert!(r.degenerate);
        assert_eq!(r.p_two_sided, 0.0);
        assert!(r.t > 0.0);
    }

    #[test]
    fn too_small() {
        assert!(matches!(
            welch_t(&[1.0], &[1.0, 2.0]),
            Err(Error::InsufficientData(_))
        ));
    }

    #[test]
    fn cdf_basics() {
        assert_eq!(student_t_cdf(0.0, 3.0).unwrap(), 0.5);
        assert_eq!(student_t_cdf(f64::INFINITY, 3.0).unwrap(), 1.0);
        assert_eq!(student_t_cdf(f64::NEG_INFINITY, 3.0).unwrap(), 0.0);
        assert!(student_t_cdf(1.0, 0.0).is_err());
        assert!(student_t_cdf(1.0, -2.0).is_err());
        // Cauchy: F(1) = 3/4
        assert!((student_t_cdf(1.0, 1.0).unwrap() - 0.75).abs() < 1e-14);
        // df = 2 has the closed form ½ + x / (2√(2 + x²))
        for &x in &[-7.0, -1.3, 0.4, 2.0, 40.0] {
            let exact = 0.5 + x / (2.0 * (2.0f64 + x * x).sqrt());
            assert!(
                (student_t_cdf(x, 2.0).unwrap() - exact).abs() < 1e-14,
                "x={x}"
            );
        }
    }

    fn sample() -> impl Strategy<Value = Vec<f64>> {
        proptest::collection::vec(-50.0f64..50.0, 2..40).prop_filter("needs spread", |v| {
            v.iter().any(|x| (x - v[0]).abs() > 1e-3)
        })
    }

    proptest! {
        #[test]
        fn antisymmetric(a in sample(), b in sample()) {
            let ab = welch_t(&a, &b).unwrap();
            let ba = welch_t(&b, &a).unwrap();
            prop_assert_eq!(ab.t, -ba.t);
            prop_assert_eq!(ab.p_two_sided, ba.p_two_sided);
            prop_assert!(ab.df <= (a.len() + b.len() - 2) as f64 + 1e-9);
            prop_assert!((0.0..=1.0).contains(&ab.p_two_sided));
            prop_assert_eq!(ab.t.signum(), (ab.mean_a - ab.mean_b).signum());
        }

        #[test]
        fn shift_and_scale_invariant(a in sample(), b in sample(), shift in -100.0f64..100.0, scale in 0.1f64..10.0) {
            let r = welch_t(&a, &b).unwrap();
            let tr = |v: &[f64]| v.iter().map(|x| x * scale + shift).collect::<Vec<_>>();
            let s = welch_t(&tr(&a), &tr(&b)).unwrap();
            prop_assert!((r.t - s.t).abs() < 1e-8 * (1.0 + r.t.abs()));
            prop_assert!((r.df - s.df).abs() < 1e-8 * r.df);
            prop_assert!((r.p_two_sided - s.p_two_sided).abs() < 1e-8);
        }

        #[test]
        fn cdf_symmetric(x in -100.0f64..100.0, df in 1.0f64..1e6) {
            let s = student_t_cdf(x, df).unwrap() + student_t_cdf(-x, df).unwrap();
            prop_assert!((s - 1.0).abs() <= 1e-10);
        }
    }
}
