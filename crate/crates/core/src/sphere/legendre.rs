//! Legendre polynomials and associated Legendre functions.
//!
//! Raw functions follow the Condon–Shortley convention
//! P_n^m(μ) = (−1)^m (1−μ²)^{m/2} d^m P_n/dμ^m. The normalized family used by
//! the spectral transform is scaled so that ∫_{−1}^{1} (P̄_n^m)² dμ = 1 and
//! keeps the same sign convention.

use crate::error::{Error, Result};
use crate::jet::Scalar;

fn check_mu(mu: f64) -> Result<()> {
    if !(mu.abs() <= 1.0) {
        return Err(Error::Domain(format!("|mu| must not exceed 1, got {mu}")));
    }
    Ok(())
}

/// P_n(μ) and dP_n/dμ.
pub fn legendre_poly(n: usize, mu: f64) -> Result<(f64, f64)> {
    check_mu(mu)?;
    Ok(legendre_poly_unchecked(n, mu))
}

pub(crate) fn legendre_poly_unchecked(n: usize, x: f64) -> (f64, f64) {
    if n == 0 {
        return (1.0, 0.0);
    }
    let mut p0 = 1.0;
    let mut p1 = x;
    for j in 1..n {
        let jf = j as f64;
        let p2 = ((2.0 * jf + 1.0) * x * p1 - jf * p0) / (jf + 1.0);
        p0 = p1;
        p1 = p2;
    }
    let nf = n as f64;
    let d = if x.abs() == 1.0 {
        let s = if x > 0.0 || n % 2 == 1 { 1.0 } else { -1.0 };
        s * nf * (nf + 1.0) / 2.0
    } else {
        nf * (x * p1 - p0) / (x * x - 1.0)
    };
    (p1, d)
}

/// d^k P_n/dx^k at `x` for k = 0..=kmax.
pub fn legendre_derivatives(n: usize, x: f64, kmax: usize) -> Vec<f64> {
    // rows[k] holds P_j^{(k)} for the two most recent degrees.
    let mut prev = vec![0.0; kmax + 1];
    let mut cur = vec![0.0; kmax + 1];
    cur[0] = 1.0;
    for j in 0..n {
        let jf = j as f64;
        let mut next = vec![0.0; kmax + 1];
        for k in 0..=kmax {
            let lower = if k > 0 { k as f64 * cur[k - 1] } else { 0.0 };
            next[k] = ((2.0 * jf + 1.0) * (x * cur[k] + lower) - jf * prev[k]) / (jf + 1.0);
        }
        prev = cur;
        cur = next;
    }
    cur
}

/// P_n^m(μ) and its μ-derivative, Condon–Shortley phase.
pub fn assoc_legendre(n: usize, m: usize, mu: f64) -> Result<(f64, f64)> {
    if m > n {
        return Err(Error::Domain(format!("order m={m} exceeds degree n={n}")));
    }
    check_mu(mu)?;
    if m == 0 {
        return Ok(legendre_poly_unchecked(n, mu));
    }
    let nf = n as f64;
    if mu.abs() == 1.0 {
        let d = match m {
            1 => {
                let sign = if mu > 0.0 || n % 2 == 0 { 1.0 } else { -1.0 };
                sign * f64::INFINITY
            }
            2 => {
                let second = mu.powi(n as i32) * (nf - 1.0) * nf * (nf + 1.0) * (nf + 2.0) / 8.0;
                -2.0 * mu * second
            }
            _ => 0.0,
        };
        return Ok((0.0, d));
    }
    let (p, p_prev) = assoc_pair(n, m, mu);
    let d = (-nf * mu * p + (n + m) as f64 * p_prev) / (1.0 - mu * mu);
    Ok((p, d))
}

/// (P_n^m, P_{n−1}^m) by the diagonal seed and the upward degree recurrence.
fn assoc_pair(n: usize, m: usize, mu: f64) -> (f64, f64) {
    let s = (1.0 - mu * mu).sqrt();
    let mut pmm = 1.0;
    for k in 1..=m {
        pmm *= -((2 * k - 1) as f64) * s;
    }
    if n == m {
        return (pmm, 0.0);
    }
    let mut p0 = pmm;
    let mut p1 = mu * (2 * m + 1) as f64 * pmm;
    for j in (m + 2)..=n {
        let p2 = ((2 * j - 1) as f64 * mu * p1 - (j + m - 1) as f64 * p0) / (j - m) as f64;
        p0 = p1;
        p1 = p2;
    }
    (p1, p0)
}

/// P_n^m evaluated on a generic scalar, so the same code yields plain values
/// or Taylor jets. Requires |y| < 1 when m is odd.
pub fn assoc_legendre_scalar<S: Scalar>(n: usize, m: usize, y: S) -> S {
    if m > n {
        return S::cst(0.0);
    }
    let d = legendre_derivatives(n, y.value(), m + 3);
    let poly = y.lift([d[m], d[m + 1], d[m + 2], d[m + 3]]);
    let one_minus = (y * y) * -1.0 + 1.0;
    let factor = if m % 2 == 0 {
        one_minus.powi((m / 2) as i32)
    } else {
        one_minus.powf(m as f64 / 2.0)
    };
    let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
    factor * poly * sign
}

const RESCALE_EXP: i32 = 500;

/// Normalized P̄_n^m(μ) and H̄_n^m(μ) = (1−μ²) dP̄_n^m/dμ for n = m..=t,
/// written into `p[0..=t-m]` and `h[0..=t-m]`.
///
/// The diagonal seed is carried with an extra power-of-two exponent so that
/// high orders near the poles do not underflow before the degree recurrence
/// brings them back into range.
pub fn normalized_column(m: usize, t: usize, mu: f64, p: &mut [f64], h: &mut [f64]) {
    assert!(m <= t);
    let len = t - m + 1;
    assert!(p.len() >= len && h.len() >= len);
    let s = (1.0 - mu * mu).sqrt();
    let big = 2f64.powi(RESCALE_EXP);
    let small = 2f64.powi(-RESCALE_EXP);
    let mut exp: i32 = 0;
    let mut pmm = std::f64::consts::FRAC_1_SQRT_2;
    for k in 1..=m {
        let kf = k as f64;
        pmm *= -((2.0 * kf + 1.0) / (2.0 * kf)).sqrt() * s;
        if pmm != 0.0 && pmm.abs() < small {
            pmm *= big;
            exp -= RESCALE_EXP;
        }
    }
    let unscale = |v: f64, e: i32| -> f64 {
        if e == 0 {
            v
        } else {
            // Split to avoid overflow of the power itself.
            let half = e / 2;
            v * 2f64.powi(half) * 2f64.powi(e - half)
        }
    };
    let mf = m as f64;
    let mut p_prev = 0.0;
    let mut p_cur = pmm;
    for (i, n) in (m..=t).enumerate() {
        if n > m {
            let nf = n as f64;
            let next = if n == m + 1 {
                (2.0 * mf + 3.0).sqrt() * mu * p_cur
            } else {
                let a = ((4.0 * nf * nf - 1.0) / (nf * nf - mf * mf)).sqrt();
                let n1 = nf - 1.0;
                let a_prev = ((4.0 * n1 * n1 - 1.0) / (n1 * n1 - mf * mf)).sqrt();
                a * (mu * p_cur - p_prev / a_prev)
            };
            p_prev = p_cur;
            p_cur = next;
            if exp < 0 && p_cur.abs() > 1.0 {
                p_cur *= small;
                p_prev *= small;
                exp += RESCALE_EXP;
            }
        }
        let nf = n as f64;
        let pv = unscale(p_cur, exp);
        let pp = if n > m { unscale(p_prev, exp) } else { 0.0 };
        p[i] = pv;
        let b = if n > m {
            ((2.0 * nf + 1.0) * (nf * nf - mf * mf) / (2.0 * nf - 1.0)).sqrt()
        } else {
            0.0
        };
        h[i] = -nf * mu * pv + b * pp;
    }
}

/// Ratio P̄_n^m / P_n^m, i.e. √((2n+1)/2 · (n−m)!/(n+m)!).
pub fn normalization(n: usize, m: usize) -> f64 {
    let mut r = (2 * n + 1) as f64 / 2.0;
    for k in (n - m + 1)..=(n + m) {
        r /= k as f64;
    }
    r.sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jet::Jet;

    #[test]
    fn legendre_examples() {
        assert_eq!(legendre_poly(0, 0.3).unwrap(), (1.0, 0.0));
        let (p, d) = legendre_poly(2, 0.5).unwrap();
        assert!((p + 0.125).abs() < 1e-15 && (d - 1.5).abs() < 1e-15);
        assert_eq!(legendre_poly(5, 1.0).unwrap(), (1.0, 15.0));
        let (p, d) = legendre_poly(5, -1.0).unwrap();
        assert_eq!((p, d), (-1.0, 15.0));
        assert!(legendre_poly(3, 1.5).is_err());
    }

    #[test]
    fn assoc_examples() {
        assert!((assoc_legendre(1, 1, 0.0).unwrap().0 + 1.0).abs() < 1e-15);
        assert!((assoc_legendre(2, 1, 0.6).unwrap().0 + 1.44).abs() < 1e-14);
        for n in 0..8 {
            let a = assoc_legendre(n, 0, 0.37).unwrap();
            let b = legendre_poly(n, 0.37).unwrap();
            assert_eq!(a, b);
        }
        assert!(assoc_legendre(2, 3, 0.1).is_err());
        assert!(assoc_legendre(2, 1, -1.01).is_err());
    }

    #[test]
    fn assoc_derivative_matches_closed_form() {
        // P_3^2 = 15 μ (1 − μ²), derivative 15 − 45 μ².
        let (p, d) = assoc_legendre(3, 2, 0.4).unwrap();
        assert!((p - 15.0 * 0.4 * 0.84).abs() < 1e-13);
        assert!((d - (15.0 - 45.0 * 0.16)).abs() < 1e-13);
        // Pole limit for m = 2: −2μ P_n''(μ).
        let (_, d) = assoc_legendre(3, 2, 1.0).unwrap();
        assert!((d + 30.0).abs() < 1e-13);
    }

    #[test]
    fn scalar_form_agrees_with_recurrence() {
        for (n, m, mu) in [(5, 3, 0.3), (20, 18, -0.7), (7, 0, 0.9), (4, 4, 0.1)] {
            let y = Jet::variable(2, mu);
            let j = assoc_legendre_scalar(n, m, y);
            let (p, d) = assoc_legendre(n, m, mu).unwrap();
            assert!((j.value() - p).abs() <= 1e-12 * p.abs().max(1.0));
            assert!((j.d1(2) - d).abs() <= 1e-11 * d.abs().max(1.0));
            assert_eq!(assoc_legendre_scalar(n, m, mu), j.value());
        }
    }

    #[test]
    fn normalized_matches_raw_scaling() {
        let t = 12;
        for m in 0..=t {
            let mut p = vec![0.0; t - m + 1];
            let mut h = vec![0.0; t - m + 1];
            normalized_column(m, t, 0.35, &mut p, &mut h);
            for n in m..=t {
                let (raw, draw) = assoc_legendre(n, m, 0.35).unwrap();
                let c = normalization(n, m);
                assert!((p[n - m] - c * raw).abs() < 1e-12 * (1.0 + p[n - m].abs()));
                let hv = (1.0 - 0.35 * 0.35) * c * draw;
                assert!((h[n - m] - hv).abs() < 1e-11 * (1.0 + hv.abs()));
            }
        }
    }

    #[test]
    fn addition_theorem_at_high_degree() {
        // Σ_m of squared normalized functions is (2n+1)/2 for every μ.
        let t = 400;
        for mu in [0.0, 0.5, 0.99, 0.99999] {
            let mut total = vec![0.0; t + 1];
            for m in 0..=t {
                let mut p = vec![0.0; t - m + 1];
                let mut h = vec![0.0; t - m + 1];
                normalized_column(m, t, mu, &mut p, &mut h);
                for n in m..=t {
                    let w = if m == 0 { 1.0 } else { 2.0 };
                    total[n] += w * p[n - m] * p[n - m];
                }
            }
            for n in [0, 1, 50, 399, 400] {
                let expect = (2 * n + 1) as f64 / 2.0;
                assert!((total[n] - expect).abs() < 1e-10 * expect, "n={n} mu={mu}");
            }
        }
    }
}
