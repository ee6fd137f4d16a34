use super::BoundsReport;
use crate::error::{Error, Result};

/// Gaps at or below this are treated as numerically closed.
pub const EXACT_GAP: f64 = 1e-13;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RateFit {
    /// `gap ≈ c n^{-r_hat}` with coefficient of determination `r_squared`.
    Power { r_hat: f64, r_squared: f64 },
    /// Some tail gap is numerically zero, so there is nothing to fit.
    ExactConvergence,
}

/// Least-squares line through `(x, y)`: returns (slope, intercept, r²).
pub fn linear_fit(x: &[f64], y: &[f64]) -> (f64, f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let syy: f64 = y.iter().map(|b| (b - my) * (b - my)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let intercept = my - slope * mx;
    let r2 = if syy > 0.0 { (sxy * sxy) / (sxx * syy) } else { 1.0 };
    (slope, intercept, r2)
}

/// Fits `log gap` against `log n` over the last `tail_fraction` of rows.
pub fn fit_rate(report: &BoundsReport, tail_fraction: f64) -> Result<RateFit> {
    fit_gaps(
        &report.rows.iter().map(|r| (r.n, r.gap)).collect::<Vec<_>>(),
        tail_fraction,
    )
}

/// Same as [`fit_rate`] on bare `(n, gap)` pairs.
pub fn fit_gaps(rows: &[(usize, f64)], tail_fraction: f64) -> Result<RateFit> {
    if !(tail_fraction > 0.0 && tail_fraction < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "tail fraction {tail_fraction} outside (0, 1)"
        )));
    }
    if rows.len() < 6 {
        return Err(Error::InvalidArgument(format!(
            "need at least 6 rows to fit a rate, got {}",
            rows.len()
        )));
    }
    let take = ((rows.len() as f64 * tail_fraction).ceil() as usize).clamp(2, rows.len());
    let tail = &rows[rows.len() - take..];
    if tail.iter().any(|&(_, g)| g <= EXACT_GAP) {
        return Ok(RateFit::ExactConvergence);
    }
    let x: Vec<f64> = tail.iter().map(|&(n, _)| (n as f64).ln()).collect();
    let y: Vec<f64> = tail.iter().map(|&(_, g)| g.ln()).collect();
    let (slope, _, r_squared) = linear_fit(&x, &y);
    Ok(RateFit::Power {
        r_hat: -slope,
        r_squared,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn synthetic(f: impl Fn(f64) -> f64) -> Vec<(usize, f64)> {
        (1..=20).map(|n| (n, f(n as f64))).collect()
    }

    #[test]
    fn recovers_exponents() {
        match fit_gaps(&synthetic(|n| n.powi(-2)), 0.5).unwrap() {
            RateFit::Power { r_hat, r_squared } => {
                assert!((r_hat - 2.0).abs() < 1e-6);
                assert!(r_squared > 0.999_999);
            }
            other => panic!("{other:?}"),
        }
        match fit_gaps(&synthetic(|n| 3.0 / n), 0.5).unwrap() {
            RateFit::Power { r_hat, .. } => assert!((r_hat - 1.0).abs() < 1e-6),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn zero_gap_is_exact() {
        let rows = synthetic(|n| if n > 15.0 { 0.0 } else { 1.0 / n });
        assert_eq!(fit_gaps(&rows, 0.5).unwrap(), RateFit::ExactConvergence);
    }

    #[test]
    fn too_few_rows() {
        assert!(fit_gaps(&[(1, 1.0), (2, 0.5)], 0.5).is_err());
        assert!(fit_gaps(&synthetic(|n| 1.0 / n), 1.5).is_err());
    }
}
