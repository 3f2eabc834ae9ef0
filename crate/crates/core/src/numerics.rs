//! Small numerical helpers: adaptive Simpson quadrature and Halton points.

const MAX_DEPTH: usize = 50;

/// ∫_a^b f by adaptive Simpson with absolute tolerance `tol`.
pub fn adaptive_simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    let g = |x: f64| [f(x)];
    adaptive_simpson_vec::<1>(g, a, b, tol)[0]
}

/// Component-wise adaptive Simpson for an integrand with `N` outputs; a
/// panel is accepted when every component meets the tolerance.
pub fn adaptive_simpson_vec<const N: usize>(
    f: impl Fn(f64) -> [f64; N],
    a: f64,
    b: f64,
    tol: f64,
) -> [f64; N] {
    if a == b {
        return [0.0; N];
    }
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = simpson(a, b, &fa, &fm, &fb);
    recurse(&f, a, b, &fa, &fm, &fb, &whole, tol, MAX_DEPTH)
}

fn simpson<const N: usize>(a: f64, b: f64, fa: &[f64; N], fm: &[f64; N], fb: &[f64; N]) -> [f64; N] {
    let h = (b - a) / 6.0;
    let mut out = [0.0; N];
    for i in 0..N {
        out[i] = h * (fa[i] + 4.0 * fm[i] + fb[i]);
    }
    out
}

#[allow(clippy::too_many_arguments)]
fn recurse<const N: usize>(
    f: &impl Fn(f64) -> [f64; N],
    a: f64,
    b: f64,
    fa: &[f64; N],
    fm: &[f64; N],
    fb: &[f64; N],
    whole: &[f64; N],
    tol: f64,
    depth: usize,
) -> [f64; N] {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = simpson(a, m, fa, &flm, fm);
    let right = simpson(m, b, fm, &frm, fb);
    let mut ok = depth == 0;
    if !ok {
        ok = (0..N).all(|i| (left[i] + right[i] - whole[i]).abs() <= 15.0 * tol);
    }
    if ok {
        let mut out = [0.0; N];
        for i in 0..N {
            let delta = left[i] + right[i] - whole[i];
            out[i] = left[i] + right[i] + delta / 15.0;
        }
        return out;
    }
    let l = recurse(f, a, m, fa, &flm, fm, &left, tol / 2.0, depth - 1);
    let r = recurse(f, m, b, fm, &frm, fb, &right, tol / 2.0, depth - 1);
    let mut out = [0.0; N];
    for i in 0..N {
        out[i] = l[i] + r[i];
    }
    out
}

/// Radical inverse of `i` in base `b` (van der Corput sequence).
pub fn radical_inverse(mut i: u64, b: u64) -> f64 {
    let inv = 1.0 / b as f64;
    let mut f = inv;
    let mut r = 0.0;
    while i > 0 {
        r += f * (i % b) as f64;
        i /= b;
        f *= inv;
    }
    r
}

/// Point `i` of the Halton sequence in `D` dimensions (bases 2, 3, 5, 7, 11),
/// skipping the origin.
pub fn halton<const D: usize>(i: usize) -> [f64; D] {
    const BASES: [u64; 5] = [2, 3, 5, 7, 11];
    assert!(D <= BASES.len());
    let mut out = [0.0; D];
    for (d, o) in out.iter_mut().enumerate() {
        *o = radical_inverse(i as u64 + 1, BASES[d]);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simpson_integrates_smooth_functions() {
        let v = adaptive_simpson(|x| x.sin(), 0.0, std::f64::consts::PI, 1e-12);
        assert!((v - 2.0).abs() < 1e-11);
        let v = adaptive_simpson(|s| s * s / (2.0 * (1.0 - s * s)), 0.0, 0.9, 1e-12);
        let exact = (0.9f64.atanh() - 0.9) / 2.0;
        assert!((v - exact).abs() < 1e-11);
        let w = adaptive_simpson_vec(|x| [x, x * x], 1.0, 0.0, 1e-12);
        assert!((w[0] + 0.5).abs() < 1e-14 && (w[1] + 1.0 / 3.0).abs() < 1e-14);
    }

    #[test]
    fn halton_points_fill_the_cube() {
        let p = halton::<2>(0);
        assert_eq!(p, [0.5, 1.0 / 3.0]);
        let pts: Vec<[f64; 3]> = (0..1000).map(halton::<3>).collect();
        let mean: f64 = pts.iter().map(|p| p[2]).sum::<f64>() / 1000.0;
        assert!((mean - 0.5).abs() < 0.01);
        assert!(pts.iter().all(|p| p.iter().all(|&x| x > 0.0 && x < 1.0)));
    }
}
