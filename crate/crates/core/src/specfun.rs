//! Special functions needed by the closed-form overlaps: complex log-gamma,
//! the confluent hypergeometric M(a,b,z), the terminating Gauss sum
//! ₂F₁(-n,a;c;z) for nonnegative integer n, associated Laguerre polynomials,
//! and a principal-branch complex arctangent.

use crate::dd::Cdd;
use crate::error::{Error, Result};
use num_complex::Complex64 as C64;

/// Lanczos coefficients for g = 607/128 (Godfrey's 15-term set).
const LANCZOS_G: f64 = 607.0 / 128.0;
const LANCZOS: [f64; 15] = [
    0.999_999_999_999_997_091_82,
    57.156_235_665_862_923_517,
    -59.597_960_355_475_491_248,
    14.136_097_974_741_747_174,
    -0.491_913_816_097_620_199_78,
    0.339_946_499_848_118_886_99e-4,
    0.465_236_289_270_485_756_65e-4,
    -0.983_744_753_048_795_646_77e-4,
    0.158_088_703_224_912_488_84e-3,
    -0.210_264_441_724_104_883_19e-3,
    0.217_439_618_115_212_643_20e-3,
    -0.164_318_106_536_763_890_22e-3,
    0.844_182_239_838_527_432_93e-4,
    -0.261_908_384_015_814_086_70e-4,
    0.368_991_826_595_316_227_04e-5,
];

/// Complex log-gamma. For Re z < 1/2 the reflection formula is applied with
/// principal logarithms, so the imaginary part may differ from the
/// analytically continued branch by a multiple of 2π; `exp(log_gamma(z))`
/// is always Γ(z). Poles (nonpositive integers) are rejected.
pub fn log_gamma(z: C64) -> Result<C64> {
    if z.im == 0.0 && z.re <= 0.0 && z.re.fract() == 0.0 {
        return Err(Error::InvalidParameter(format!(
            "log_gamma pole at nonpositive integer {z}"
        )));
    }
    if z.re < 0.5 {
        // ln Γ(z) = ln π - ln sin(πz) - ln Γ(1-z)
        let pi = std::f64::consts::PI;
        let sin_term = (C64::new(pi, 0.0) * z).sin();
        return Ok(C64::new(pi.ln(), 0.0) - sin_term.ln() - log_gamma(C64::ONE - z)?);
    }
    let x = z - C64::ONE;
    let mut acc = C64::new(LANCZOS[0], 0.0);
    for (k, &d) in LANCZOS.iter().enumerate().skip(1) {
        acc += C64::new(d, 0.0) / (x + C64::new(k as f64, 0.0));
    }
    let t = x + C64::new(LANCZOS_G + 0.5, 0.0);
    let half_log_2pi = 0.5 * (2.0 * std::f64::consts::PI).ln();
    Ok((x + C64::new(0.5, 0.0)) * t.ln() - t + C64::new(half_log_2pi, 0.0) + acc.ln())
}

const KUMMER_MAX_TERMS: usize = 10_000;

/// Confluent hypergeometric M(a, b, z) by Taylor series, stopping when two
/// consecutive terms fall below 1e-16 relative. A nonpositive-integer b is a
/// pole of the series. On failure to converge within 10⁴ terms the error
/// carries the partial sum.
pub fn kummer_m(a: C64, b: C64, z: C64) -> Result<C64> {
    if b.im == 0.0 && b.re <= 0.0 && b.re.fract() == 0.0 {
        return Err(Error::InvalidParameter(format!(
            "kummer_m parameter b = {b} is a nonpositive integer"
        )));
    }
    let mut term = C64::ONE;
    let mut sum = C64::ONE;
    let mut small_streak = 0;
    for k in 0..KUMMER_MAX_TERMS {
        let kf = k as f64;
        term *= (a + C64::new(kf, 0.0)) * z
            / ((b + C64::new(kf, 0.0)) * C64::new(kf + 1.0, 0.0));
        sum += term;
        if !(term.re.is_finite() && term.im.is_finite()) {
            return Err(Error::SeriesNoConverge {
                partial: sum,
                terms: k + 1,
            });
        }
        if term.norm() <= 1e-16 * sum.norm() {
            small_streak += 1;
            if small_streak >= 2 || term == C64::ZERO {
                return Ok(sum);
            }
        } else {
            small_streak = 0;
        }
    }
    Err(Error::SeriesNoConverge {
        partial: sum,
        terms: KUMMER_MAX_TERMS,
    })
}

pub(crate) fn gauss_2f1_terminating_dd(n: usize, a: Cdd, c: Cdd, z: Cdd) -> Cdd {
    let mut term = Cdd::one();
    let mut sum = Cdd::one();
    for l in 0..n {
        let lf = l as f64;
        let num = Cdd::new(lf - n as f64, 0.0).mul(a.add(Cdd::new(lf, 0.0)));
        let den = c.add(Cdd::new(lf, 0.0)).scale(lf + 1.0);
        term = term.mul(num).div(den).mul(z);
        sum = sum.add(term);
    }
    sum
}

/// Terminating Gauss sum ₂F₁(-n, a; c; z) = Σ_{l=0}^{n} (-n)_l (a)_l / ((c)_l l!) z^l.
///
/// At z = 2 the terms exceed the result by ~19 orders of magnitude near
/// n = 40, so the summation runs internally in double-double arithmetic;
/// plain f64 would lose every significant digit there.
pub fn gauss_2f1_terminating(n: usize, a: C64, c: C64, z: C64) -> Result<C64> {
    if c.im == 0.0 && c.re.fract() == 0.0 && c.re <= 0.0 && (-c.re) < n as f64 {
        return Err(Error::InvalidParameter(format!(
            "gauss_2f1_terminating parameter c = {c} hits a pole before the series terminates"
        )));
    }
    Ok(gauss_2f1_terminating_dd(n, Cdd::from_c64(a), Cdd::from_c64(c), Cdd::from_c64(z)).to_c64())
}

/// Associated Laguerre polynomial L_m^{(α)}(x) by the stable three-term
/// recurrence.
pub fn laguerre_assoc(m: usize, alpha: f64, x: f64) -> f64 {
    if m == 0 {
        return 1.0;
    }
    let mut prev = 1.0;
    let mut cur = 1.0 + alpha - x;
    for k in 1..m {
        let kf = k as f64;
        let next = ((2.0 * kf + 1.0 + alpha - x) * cur - (kf + alpha) * prev) / (kf + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}

/// Principal-branch complex arctangent via
/// atan(z) = (1/2i) ln((1+iz)/(1-iz)).
pub fn atan_c(z: C64) -> C64 {
    let iz = C64::I * z;
    ((C64::ONE + iz) / (C64::ONE - iz)).ln() / C64::new(0.0, 2.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: C64, b: C64, tol: f64) -> bool {
        (a - b).norm() <= tol * b.norm().max(1.0)
    }

    #[test]
    fn log_gamma_known_values() {
        let half = log_gamma(C64::new(0.5, 0.0)).unwrap();
        assert!(close(half, C64::new(0.57236494292470009, 0.0), 1e-14));
        let z1 = log_gamma(C64::new(3.0, 4.0)).unwrap();
        assert!(close(
            z1,
            C64::new(-1.7566267846037841, 4.7426644380346579),
            1e-13
        ));
        let z2 = log_gamma(C64::new(12.0, -7.0)).unwrap();
        assert!(close(
            z2,
            C64::new(15.488067340143566, -17.489250400736752),
            1e-13
        ));
        assert!(close(
            log_gamma(C64::new(5.0, 0.0)).unwrap(),
            C64::new(24.0_f64.ln(), 0.0),
            1e-14
        ));
    }

    #[test]
    fn log_gamma_reflection_region() {
        let g = log_gamma(C64::new(-2.5, 1.5)).unwrap().exp();
        assert!(close(
            g,
            C64::new(0.0034121395642391490, -0.024053490434664736),
            1e-12
        ));
    }

    #[test]
    fn log_gamma_functional_equation() {
        for &z in &[C64::new(0.3, -2.0), C64::new(4.2, 1.1), C64::new(-1.3, 0.7)] {
            let ratio = (log_gamma(z + C64::ONE).unwrap() - log_gamma(z).unwrap()).exp();
            assert!(close(ratio, z, 1e-12), "Γ(z+1)/Γ(z) != z at {z}");
        }
    }

    #[test]
    fn log_gamma_rejects_poles() {
        assert!(log_gamma(C64::ZERO).is_err());
        assert!(log_gamma(C64::new(-3.0, 0.0)).is_err());
    }

    #[test]
    fn kummer_reduces_to_exp() {
        let z = C64::new(0.3, 0.2);
        let m = kummer_m(C64::ONE, C64::ONE, z).unwrap();
        assert!(close(m, C64::new(1.3229515021098724, 0.26817554596894386), 1e-14));
    }

    #[test]
    fn kummer_reference_values() {
        let m1 = kummer_m(C64::new(0.25, 0.0), C64::new(0.5, 0.0), C64::new(0.0, 0.1)).unwrap();
        assert!(close(
            m1,
            C64::new(0.99791811712359554, 0.049937527399765732),
            1e-14
        ));
        let m2 = kummer_m(
            C64::new(0.25, -0.35),
            C64::new(1.5, 0.0),
            C64::new(2.2, 1.1),
        )
        .unwrap();
        assert!(close(
            m2,
            C64::new(2.4292821375203918, -0.37415623641648395),
            1e-13
        ));
    }

    #[test]
    fn kummer_contiguous_identity() {
        // M(a,b,z) = M(a+1,b,z) - (z/b) M(a+1,b+1,z)
        let a = C64::new(0.25, -0.6);
        let b = C64::new(1.5, 0.0);
        let z = C64::new(1.3, 0.8);
        let lhs = kummer_m(a, b, z).unwrap();
        let rhs = kummer_m(a + C64::ONE, b, z).unwrap()
            - z / b * kummer_m(a + C64::ONE, b + C64::ONE, z).unwrap();
        assert!(close(lhs, rhs, 1e-13));
    }

    #[test]
    fn kummer_rejects_nonpositive_integer_b() {
        assert!(kummer_m(C64::ONE, C64::ZERO, C64::ONE).is_err());
        assert!(kummer_m(C64::ONE, C64::new(-2.0, 0.0), C64::ONE).is_err());
    }

    #[test]
    fn kummer_reports_non_convergence_with_partial() {
        match kummer_m(C64::new(0.25, 0.0), C64::new(0.5, 0.0), C64::new(1e6, 0.0)) {
            Err(Error::SeriesNoConverge { .. }) => {}
            other => panic!("expected non-convergence, got {other:?}"),
        }
    }

    #[test]
    fn gauss_terminating_exact_zero() {
        // F(-3, 1/4; 1/2; 2): the rational terms sum to 1 - 3 + 5 - 3 = 0.
        let v = gauss_2f1_terminating(
            3,
            C64::new(0.25, 0.0),
            C64::new(0.5, 0.0),
            C64::new(2.0, 0.0),
        )
        .unwrap();
        assert!(v.norm() < 1e-30);
    }

    #[test]
    fn gauss_terminating_exact_rational() {
        // F(-3, 1/4 - i/2; 1/2; 2) = 4i/3 exactly.
        let v = gauss_2f1_terminating(
            3,
            C64::new(0.25, -0.5),
            C64::new(0.5, 0.0),
            C64::new(2.0, 0.0),
        )
        .unwrap();
        assert!(close(v, C64::new(0.0, 4.0 / 3.0), 1e-15));
    }

    #[test]
    fn gauss_terminating_rejects_pole_in_c() {
        assert!(gauss_2f1_terminating(4, C64::ONE, C64::new(-2.0, 0.0), C64::new(2.0, 0.0)).is_err());
        // c = -5 only poles at l = 5 >= n, series stops first
        assert!(gauss_2f1_terminating(4, C64::ONE, C64::new(-5.0, 0.0), C64::new(2.0, 0.0)).is_ok());
    }

    #[test]
    fn laguerre_low_order_values() {
        assert_eq!(laguerre_assoc(0, -0.5, 1.3), 1.0);
        assert!((laguerre_assoc(2, -0.5, 1.0) - (-0.625)).abs() < 1e-15);
    }

    #[test]
    fn laguerre_generating_function() {
        // Σ u^m L_m^{-1/2}(y) = (1-u)^{-1/2} exp(-y u/(1-u))
        let u = C64::new(0.2, 0.1);
        let y = 1.3;
        let mut sum = C64::ZERO;
        let mut up = C64::ONE;
        for m in 0..60 {
            sum += up * C64::new(laguerre_assoc(m, -0.5, y), 0.0);
            up *= u;
        }
        let closed = (C64::ONE - u).powf(-0.5) * (-C64::new(y, 0.0) * u / (C64::ONE - u)).exp();
        assert!(close(sum, closed, 1e-12));
    }

    #[test]
    fn atan_matches_real_axis() {
        let v = atan_c(C64::new(0.37, 0.0));
        assert!((v.re - 0.37_f64.atan()).abs() < 1e-15 && v.im.abs() < 1e-15);
    }

    #[test]
    fn atan_is_odd_and_matches_library() {
        for &z in &[C64::new(0.3, -0.2), C64::new(-0.1, 0.4), C64::new(0.9, 0.9)] {
            assert!((atan_c(z) + atan_c(-z)).norm() < 1e-15);
            assert!((atan_c(z) - z.atan()).norm() < 1e-14);
        }
    }
}
