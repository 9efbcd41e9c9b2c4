use crate::{Error, Result};

/// Least-squares line through `(log n, log bound)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RateFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

pub fn fit_rate(points: &[(f64, f64)]) -> Result<RateFit> {
    if points.len() < 3 {
        return Err(Error::Validation(format!(
            "a rate fit needs at least 3 points, got {}",
            points.len()
        )));
    }
    if let Some((n, b)) = points.iter().find(|(n, b)| !(*n > 0.0 && *b > 0.0)) {
        return Err(Error::Validation(format!(
            "rate fit needs positive values, got ({n}, {b})"
        )));
    }
    let xs: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let k = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / k;
    let my = ys.iter().sum::<f64>() / k;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::Validation("rate fit needs at least two distinct n".into()));
    }
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_tot: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let ss_res: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - intercept - slope * x).powi(2))
        .sum();
    let r_squared = if ss_tot == 0.0 { 1.0 } else { 1.0 - ss_res / ss_tot };
    Ok(RateFit {
        slope,
        intercept,
        r_squared,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn series(f: impl Fn(f64) -> f64) -> Vec<(f64, f64)> {
        [16.0, 32.0, 64.0, 128.0].iter().map(|&n| (n, f(n))).collect()
    }

    #[test]
    fn exact_power_laws() {
        let fit = fit_rate(&series(|n| 3.0 / n)).unwrap();
        assert!((fit.slope + 1.0).abs() < 1e-12);
        assert!((fit.intercept - 3f64.ln()).abs() < 1e-12);
        assert!((fit.r_squared - 1.0).abs() < 1e-12);
        assert!((fit_rate(&series(|n| n.powf(-0.5))).unwrap().slope + 0.5).abs() < 1e-12);
        assert!(fit_rate(&series(|_| 2.0)).unwrap().slope.abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(fit_rate(&[(1.0, 1.0), (2.0, 0.5)]).is_err());
        assert!(fit_rate(&[(1.0, 1.0), (2.0, 0.0), (4.0, 1.0)]).is_err());
    }
}
