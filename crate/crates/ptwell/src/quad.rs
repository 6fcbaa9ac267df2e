//! Adaptive Simpson quadrature for smooth complex integrands.

use num_complex::Complex64 as C64;

fn simpson_rule<F: Fn(f64) -> C64>(f: &F, a: f64, fa: C64, b: f64, fb: C64) -> (C64, f64, C64) {
    let m = 0.5 * (a + b);
    let fm = f(m);
    ((fa + 4.0 * fm + fb) * ((b - a) / 6.0), m, fm)
}

fn adapt<F: Fn(f64) -> C64>(
    f: &F,
    a: f64,
    fa: C64,
    b: f64,
    fb: C64,
    whole: C64,
    m: f64,
    fm: C64,
    tol: f64,
    depth: u32,
) -> C64 {
    let (left, lm, flm) = simpson_rule(f, a, fa, m, fm);
    let (right, rm, frm) = simpson_rule(f, m, fm, b, fb);
    let delta = left + right - whole;
    if depth >= 48 || delta.norm() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    adapt(f, a, fa, m, fm, left, lm, flm, 0.5 * tol, depth + 1)
        + adapt(f, m, fm, b, fb, right, rm, frm, 0.5 * tol, depth + 1)
}

/// Integrate a complex-valued function over [a, b] to absolute tolerance
/// `tol` (Richardson-corrected adaptive Simpson).
pub fn integrate_complex<F: Fn(f64) -> C64>(f: F, a: f64, b: f64, tol: f64) -> C64 {
    let fa = f(a);
    let fb = f(b);
    let (whole, m, fm) = simpson_rule(&f, a, fa, b, fb);
    adapt(&f, a, fa, b, fb, whole, m, fm, tol, 0)
}

/// Real-valued convenience wrapper.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> f64 {
    integrate_complex(|x| C64::new(f(x), 0.0), a, b, tol).re
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn polynomial_exact() {
        let v = integrate(|x| 3.0 * x * x, 0.0, 2.0, 1e-12);
        assert!((v - 8.0).abs() < 1e-12);
    }

    #[test]
    fn oscillatory() {
        let v = integrate(|x| (10.0 * x).sin(), 0.0, PI, 1e-12);
        let exact = (1.0 - (10.0 * PI).cos()) / 10.0;
        assert!((v - exact).abs() < 1e-10);
    }

    #[test]
    fn complex_exponential() {
        let v = integrate_complex(|x| (C64::i() * x).exp(), 0.0, 1.0, 1e-13);
        let exact = (C64::i() * 1.0).exp() - 1.0;
        assert!((v - exact / C64::i()).norm() < 1e-11);
    }
}
