//! Pearson chi-square on r×k tables and Cramér's V.

use super::special::chi2_sf;
use super::TestResult;
use crate::{Error, Result};

/// Pearson χ² test of independence with `(r−1)(k−1)` degrees of freedom.
///
/// Errors when a row or column sums to zero (an expected count would be 0)
/// or when the table has fewer than two rows or columns.
pub fn chi_square(table: &[Vec<u64>]) -> Result<TestResult> {
    let r = table.len();
    let k = table.first().map_or(0, Vec::len);
    if r < 2 || k < 2 {
        return Err(Error::DegenerateDimensions(format!("{r}x{k} table")));
    }
    if table.iter().any(|row| row.len() != k) {
        return Err(Error::Invalid("ragged contingency table".into()));
    }
    let rows: Vec<u64> = table.iter().map(|row| row.iter().sum()).collect();
    let cols: Vec<u64> = (0..k)
        .map(|j| table.iter().map(|row| row[j]).sum())
        .collect();
    if rows.contains(&0) || cols.contains(&0) {
        return Err(Error::ZeroMarginal);
    }
    let n: u64 = rows.iter().sum();
    let nf = n as f64;
    let mut chi2 = 0.0;
    for (i, row) in table.iter().enumerate() {
        for (j, &obs) in row.iter().enumerate() {
            let expected = rows[i] as f64 * cols[j] as f64 / nf;
            let d = obs as f64 - expected;
            chi2 += d * d / expected;
        }
    }
    let df = ((r - 1) * (k - 1)) as f64;
    Ok(TestResult {
        method: "chi-square".into(),
        statistic: chi2,
        p_value: chi2_sf(chi2, df),
        n_a: rows[0] as usize,
        n_b: rows[1..].iter().sum::<u64>() as usize,
        exact: false,
    })
}

/// `V = sqrt(χ² / (n · min(k−1, r−1)))`.
pub fn cramers_v(chi2: f64, n: u64, r: usize, k: usize) -> Result<f64> {
    let m = r.min(k).saturating_sub(1);
    if n == 0 || m == 0 {
        return Err(Error::DegenerateDimensions(format!("n={n}, {r}x{k}")));
    }
    Ok((chi2 / (n as f64 * m as f64)).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use statrs::distribution::{ChiSquared, ContinuousCDF};

    #[test]
    fn hand_tables() {
        let r = chi_square(&[vec![20, 0], vec![0, 20]]).unwrap();
        assert_eq!(r.statistic, 40.0);
        assert_eq!(cramers_v(r.statistic, 40, 2, 2).unwrap(), 1.0);

        let r = chi_square(&[vec![10, 10], vec![10, 10]]).unwrap();
        assert_eq!(r.statistic, 0.0);
        assert_eq!(r.p_value, 1.0);
        assert_eq!(cramers_v(0.0, 40, 2, 2).unwrap(), 0.0);

        let r = chi_square(&[vec![12, 8], vec![8, 12]]).unwrap();
        assert_abs_diff_eq!(r.statistic, 1.6, epsilon = 1e-12);
        let oracle = 1.0 - ChiSquared::new(1.0).unwrap().cdf(1.6);
        assert_abs_diff_eq!(r.p_value, oracle, epsilon = 1e-10);
    }

    #[test]
    fn rejects_bad_tables() {
        assert!(matches!(
            chi_square(&[vec![0, 0], vec![1, 2]]),
            Err(Error::ZeroMarginal)
        ));
        assert!(matches!(
            chi_square(&[vec![3, 0], vec![1, 0]]),
            Err(Error::ZeroMarginal)
        ));
        assert!(matches!(
            chi_square(&[vec![1, 2]]),
            Err(Error::DegenerateDimensions(_))
        ));
        assert!(matches!(
            chi_square(&[vec![1, 2], vec![1]]),
            Err(Error::Invalid(_))
        ));
        assert!(cramers_v(1.0, 0, 2, 2).is_err());
        assert!(cramers_v(1.0, 10, 1, 5).is_err());
    }

    #[test]
    fn wider_table_against_oracle() {
        let t = vec![vec![30, 12, 5, 9], vec![14, 20, 11, 2], vec![3, 8, 17, 6]];
        let r = chi_square(&t).unwrap();
        let oracle = 1.0 - ChiSquared::new(6.0).unwrap().cdf(r.statistic);
        assert_abs_diff_eq!(r.p_value, oracle, epsilon = 1e-10);
    }

    proptest! {
        #[test]
        fn v_in_unit_interval(t in prop::collection::vec(prop::collection::vec(1u64..50, 3), 2..5)) {
            let r = chi_square(&t).unwrap();
            let n: u64 = t.iter().flatten().sum();
            let v = cramers_v(r.statistic, n, t.len(), 3).unwrap();
            prop_assert!((0.0..=1.0 + 1e-12).contains(&v));
            prop_assert!((0.0..=1.0).contains(&r.p_value));
            let transposed: Vec<Vec<u64>> = (0..3).map(|j| t.iter().map(|row| row[j]).collect()).collect();
            let rt = chi_square(&transposed).unwrap();
            prop_assert!((rt.statistic - r.statistic).abs() < 1e-9);
        }
    }
}
