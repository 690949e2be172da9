//! Frequency-domain propagation oracle for `Γ(ω)`.
//!
//! With `z ∈ [0, 1]` and `α = d`, the probe obeys
//! `∂_z A_p = −(d/2)(1 − i r) A_p` with `A_p(0) = 1`, and the retrieved field
//! obeys `−∂_z A_r = −(d/2)(1 − i r) A_r + d A_p` with `A_r(1) = 0`.
//! Both are integrated with classical RK4; `Γ = A_r(0)`.

use num_complex::Complex64;

use crate::response::MediumResponse;

/// Default number of z steps.
pub const ZODE_STEPS: usize = 2000;

/// RK4 solution for a single `(d, r)` pair with `steps ≥ 1` steps.
///
/// `d` must be finite; `d = 0` gives zero.
pub fn zode_gamma_closed(d: f64, r: f64, steps: usize) -> Complex64 {
    if d == 0.0 || !r.is_finite() {
        return Complex64::new(0.0, 0.0);
    }
    if !d.is_finite() {
        return Complex64::new(f64::NAN, f64::NAN);
    }
    let steps = steps.max(1);
    let h = 1.0 / steps as f64;
    let k = -0.5 * d * Complex64::new(1.0, -r);

    // probe at every half step, forward
    let mut probe = Vec::with_capacity(2 * steps + 1);
    let mut a = Complex64::new(1.0, 0.0);
    probe.push(a);
    let hh = 0.5 * h;
    for _ in 0..2 * steps {
        let f = |y: Complex64| k * y;
        let k1 = f(a);
        let k2 = f(a + 0.5 * hh * k1);
        let k3 = f(a + 0.5 * hh * k2);
        let k4 = f(a + hh * k3);
        a += hh / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        probe.push(a);
    }

    // retrieved field, stepped in u = 1 − z: dA_r/du = k A_r + d A_p
    let mut ar = Complex64::new(0.0, 0.0);
    for j in (0..steps).rev() {
        let (p_hi, p_mid, p_lo) = (probe[2 * j + 2], probe[2 * j + 1], probe[2 * j]);
        let g = |y: Complex64, p: Complex64| k * y + d * p;
        let k1 = g(ar, p_hi);
        let k2 = g(ar + 0.5 * h * k1, p_mid);
        let k3 = g(ar + 0.5 * h * k2, p_mid);
        let k4 = g(ar + h * k3, p_lo);
        ar += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    ar
}

/// `Γ(ω)` of `response` by z integration.
pub fn zode_gamma(response: &MediumResponse, omega: f64) -> Complex64 {
    let (a, r) = response.sample(omega);
    let d = if a == 0.0 { 0.0 } else { response.d0 * a };
    zode_gamma_closed(d, r, ZODE_STEPS)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pure_absorber() {
        let g = zode_gamma_closed(2.0, 0.0, ZODE_STEPS);
        assert!((g.re - (1.0 - (-2f64).exp())).abs() < 1e-6);
        assert!(g.im.abs() < 1e-12);
        assert!((g.re - 0.8647).abs() < 1e-4);
    }

    #[test]
    fn empty_medium() {
        assert_eq!(zode_gamma_closed(0.0, 1.0, ZODE_STEPS), Complex64::new(0.0, 0.0));
    }
}
