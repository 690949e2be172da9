//! Trapezoid quadrature on uniform grids.

use num_complex::Complex64;

pub fn trapezoid(values: &[f64], h: f64) -> f64 {
    match values.len() {
        0 | 1 => 0.0,
        n => h * (values[1..n - 1].iter().sum::<f64>() + 0.5 * (values[0] + values[n - 1])),
    }
}

pub fn trapezoid_complex(values: &[Complex64], h: f64) -> Complex64 {
    match values.len() {
        0 | 1 => Complex64::new(0.0, 0.0),
        n => (values[1..n - 1].iter().sum::<Complex64>() + 0.5 * (values[0] + values[n - 1])) * h,
    }
}

/// Trapezoid on every other sample; `None` unless the sample count is odd.
pub fn trapezoid_coarse(values: &[f64], h: f64) -> Option<f64> {
    if values.len() < 3 || values.len() % 2 == 0 {
        return None;
    }
    let coarse: Vec<f64> = values.iter().step_by(2).copied().collect();
    Some(trapezoid(&coarse, 2.0 * h))
}

pub fn trapezoid_coarse_complex(values: &[Complex64], h: f64) -> Option<Complex64> {
    if values.len() < 3 || values.len() % 2 == 0 {
        return None;
    }
    let coarse: Vec<Complex64> = values.iter().step_by(2).copied().collect();
    Some(trapezoid_complex(&coarse, 2.0 * h))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trapezoid_is_exact_for_linear_functions() {
        let h = 0.1;
        let v: Vec<f64> = (0..11).map(|i| 2.0 * i as f64 * h + 1.0).collect();
        assert!((trapezoid(&v, h) - 2.0).abs() < 1e-12);
        assert!((trapezoid_coarse(&v, h).unwrap() - 2.0).abs() < 1e-12);
        assert!(trapezoid_coarse(&v[..10], h).is_none());
    }
}
