//! Spherical-harmonic coefficients and the grid ↔ spectral transforms.
//!
//! The basis is Y_n^m(λ, μ) = P̄_n^m(μ) e^{imλ} / √(2π), orthonormal on the
//! unit sphere. A real field is f = Σ_n c_n^0 Y_n^0 + 2 Re Σ_{m>0} c_n^m Y_n^m.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::frame::Frame;
use crate::sphere::field::ScalarField;
use crate::sphere::grid::SphereGrid;
use crate::sphere::legendre::normalized_column;

const PARALLEL_THRESHOLD: usize = 64;

/// Triangularly truncated coefficients, stored order-major.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralCoeffs {
    truncation: usize,
    data: Vec<Complex64>,
}

/// Index of the first coefficient of order `m` in the order-major layout.
pub(crate) fn order_offset(t: usize, m: usize) -> usize {
    m * (t + 1) - m * m.saturating_sub(1) / 2
}

impl SpectralCoeffs {
    pub fn zeros(truncation: usize) -> Self {
        let len = (truncation + 1) * (truncation + 2) / 2;
        SpectralCoeffs {
            truncation,
            data: vec![Complex64::new(0.0, 0.0); len],
        }
    }

    pub fn truncation(&self) -> usize {
        self.truncation
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn index(&self, n: usize, m: usize) -> Option<usize> {
        if m <= n && n <= self.truncation {
            Some(order_offset(self.truncation, m) + n - m)
        } else {
            None
        }
    }

    /// Coefficient (n, m); zero outside the truncation.
    pub fn get(&self, n: usize, m: usize) -> Complex64 {
        self.index(n, m)
            .map(|i| self.data[i])
            .unwrap_or(Complex64::new(0.0, 0.0))
    }

    pub fn set(&mut self, n: usize, m: usize, value: Complex64) {
        let i = self
            .index(n, m)
            .unwrap_or_else(|| panic!("coefficient ({n},{m}) outside truncation {}", self.truncation));
        self.data[i] = value;
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [Complex64] {
        &mut self.data
    }

    /// `(n, m, coefficient)` in storage order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, Complex64)> + '_ {
        let t = self.truncation;
        (0..=t)
            .flat_map(move |m| (m..=t).map(move |n| (n, m)))
            .zip(self.data.iter())
            .map(|((n, m), c)| (n, m, *c))
    }

    /// Multiplies each coefficient by `f(n, m)`.
    pub fn map_modes(&self, f: impl Fn(usize, usize) -> Complex64) -> SpectralCoeffs {
        let mut out = self.clone();
        let t = self.truncation;
        let mut i = 0;
        for m in 0..=t {
            for n in m..=t {
                out.data[i] *= f(n, m);
                i += 1;
            }
        }
        out
    }

    pub fn scale(&self, s: f64) -> SpectralCoeffs {
        SpectralCoeffs {
            truncation: self.truncation,
            data: self.data.iter().map(|c| c * s).collect(),
        }
    }

    /// `self + s * other`.
    pub fn axpy(&self, s: f64, other: &SpectralCoeffs) -> SpectralCoeffs {
        assert_eq!(self.truncation, other.truncation);
        SpectralCoeffs {
            truncation: self.truncation,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a + b * s)
                .collect(),
        }
    }

    pub fn max_abs_diff(&self, other: &SpectralCoeffs) -> f64 {
        assert_eq!(self.truncation, other.truncation);
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|c| c.re.is_finite() && c.im.is_finite())
    }
}

/// Applies the unit-sphere Laplacian: each (n, m) coefficient times −n(n+1).
pub fn laplacian_spectral(coeffs: &SpectralCoeffs) -> SpectralCoeffs {
    coeffs.map_modes(|n, _| Complex64::new(-((n * (n + 1)) as f64), 0.0))
}

/// Precomputed Legendre tables and FFT plans for one grid and truncation.
pub struct TransformPlan {
    grid: SphereGrid,
    t: usize,
    /// Number of latitude rows in the northern half (μ ≥ 0), including the
    /// equator row when nlat is odd.
    nhalf: usize,
    /// P̄ and H̄ tables: block for order m starts at `order_offset(m) * nhalf`,
    /// then one contiguous run of degrees n = m..=t per northern row.
    pbar: Vec<f64>,
    hbar: Vec<f64>,
    fft_forward: Arc<dyn Fft<f64>>,
    fft_inverse: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for TransformPlan {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("TransformPlan")
            .field("truncation", &self.t)
            .field("nlat", &self.grid.nlat)
            .field("nlon", &self.grid.nlon)
            .finish()
    }
}

impl TransformPlan {
    pub fn new(grid: SphereGrid, t: usize) -> Result<Self> {
        grid.check_truncation(t)?;
        let nlat = grid.nlat;
        let nhalf = nlat.div_ceil(2);
        let ncoef = (t + 1) * (t + 2) / 2;
        let mut pbar = vec![0.0; ncoef * nhalf];
        let mut hbar = vec![0.0; ncoef * nhalf];
        for m in 0..=t {
            let base = order_offset(t, m) * nhalf;
            let len = t - m + 1;
            for k in 0..nhalf {
                let mu = grid.mu_nodes[nlat - 1 - k];
                let at = base + k * len;
                normalized_column(m, t, mu, &mut pbar[at..at + len], &mut hbar[at..at + len]);
            }
        }
        let mut planner = FftPlanner::new();
        let fft_forward = planner.plan_fft_forward(grid.nlon);
        let fft_inverse = planner.plan_fft_inverse(grid.nlon);
        Ok(TransformPlan {
            grid,
            t,
            nhalf,
            pbar,
            hbar,
            fft_forward,
            fft_inverse,
        })
    }

    pub fn for_truncation(t: usize) -> Result<Self> {
        TransformPlan::new(SphereGrid::for_truncation(t)?, t)
    }

    pub fn grid(&self) -> &SphereGrid {
        &self.grid
    }

    pub fn truncation(&self) -> usize {
        self.t
    }

    fn check(&self, c: &SpectralCoeffs) {
        assert_eq!(c.truncation(), self.t, "coefficient truncation does not match the plan");
    }

    /// Legendre sums G_m(μ_j) = Σ_n c_n^m P̄_n^m(μ_j)/√(2π) and, optionally, the
    /// same with H̄. Output layout: `g[m * nlat + j]`.
    pub fn legendre_sums(
        &self,
        c: &SpectralCoeffs,
        gp: Option<&mut [Complex64]>,
        gh: Option<&mut [Complex64]>,
    ) {
        self.check(c);
        let nlat = self.grid.nlat;
        let t = self.t;
        let norm = 1.0 / (2.0 * PI).sqrt();
        let work = |m: usize, outp: Option<&mut [Complex64]>, outh: Option<&mut [Complex64]>| {
            let len = t - m + 1;
            let coef = &c.as_slice()[order_offset(t, m)..order_offset(t, m) + len];
            let base = order_offset(t, m) * self.nhalf;
            let mut outp = outp;
            let mut outh = outh;
            for k in 0..self.nhalf {
                let north = nlat - 1 - k;
                let south = k;
                let at = base + k * len;
                if let Some(out) = outp.as_deref_mut() {
                    let (e, o) = parity_sums(coef, &self.pbar[at..at + len]);
                    out[north] = (e + o) * norm;
                    out[south] = (e - o) * norm;
                }
                if let Some(out) = outh.as_deref_mut() {
                    // H̄ has the opposite equatorial parity to P̄.
                    let (e, o) = parity_sums(coef, &self.hbar[at..at + len]);
                    out[north] = (e + o) * norm;
                    out[south] = (o - e) * norm;
                }
            }
        };
        let parallel = t >= PARALLEL_THRESHOLD;
        match (gp, gh) {
            (Some(p), Some(h)) => {
                if parallel {
                    p.par_chunks_mut(nlat)
                        .zip(h.par_chunks_mut(nlat))
                        .take(t + 1)
                        .enumerate()
                        .for_each(|(m, (p, h))| work(m, Some(p), Some(h)));
                } else {
                    for (m, (p, h)) in p.chunks_mut(nlat).zip(h.chunks_mut(nlat)).take(t + 1).enumerate() {
                        work(m, Some(p), Some(h));
                    }
                }
            }
            (Some(p), None) => {
                if parallel {
                    p.par_chunks_mut(nlat)
                        .take(t + 1)
                        .enumerate()
                        .for_each(|(m, p)| work(m, Some(p), None));
                } else {
                    for (m, p) in p.chunks_mut(nlat).take(t + 1).enumerate() {
                        work(m, Some(p), None);
                    }
                }
            }
            (None, Some(h)) => {
                if parallel {
                    h.par_chunks_mut(nlat)
                        .take(t + 1)
                        .enumerate()
                        .for_each(|(m, h)| work(m, None, Some(h)));
                } else {
                    for (m, h) in h.chunks_mut(nlat).take(t + 1).enumerate() {
                        work(m, None, Some(h));
                    }
                }
            }
            (None, None) => {}
        }
    }

    /// Buffer sized for [`legendre_sums`](Self::legendre_sums).
    pub fn sum_buffer(&self) -> Vec<Complex64> {
        vec![Complex64::new(0.0, 0.0); (self.t + 1) * self.grid.nlat]
    }

    /// Grid values f(λ_k, μ_j) = G_0 + 2 Re Σ_{m≥1} G_m e^{imλ_k}, optionally
    /// differentiated in λ (G_m → i m G_m). Output is latitude-major.
    pub fn fourier_synthesis(&self, g: &[Complex64], d_lambda: bool, out: &mut [f64]) {
        let nlat = self.grid.nlat;
        let nlon = self.grid.nlon;
        assert_eq!(out.len(), nlat * nlon);
        let zero = Complex64::new(0.0, 0.0);
        let mut buf = vec![zero; nlon];
        let mut scratch = vec![zero; self.fft_inverse.get_inplace_scratch_len()];
        let coef = |m: usize, j: usize| -> Complex64 {
            let v = g[m * nlat + j];
            if d_lambda {
                v * Complex64::new(0.0, m as f64)
            } else if m == 0 {
                Complex64::new(v.re, 0.0)
            } else {
                v
            }
        };
        let i = Complex64::new(0.0, 1.0);
        let mut j = 0;
        while j < nlat {
            let pair = j + 1 < nlat;
            buf.iter_mut().for_each(|b| *b = zero);
            for m in 0..=self.t {
                let a = coef(m, j);
                let b = if pair { coef(m, j + 1) } else { zero };
                if m == 0 {
                    buf[0] = Complex64::new(a.re, b.re);
                } else {
                    buf[m] += a + i * b;
                    buf[nlon - m] += a.conj() + i * b.conj();
                }
            }
            self.fft_inverse.process_with_scratch(&mut buf, &mut scratch);
            for k in 0..nlon {
                out[j * nlon + k] = buf[k].re;
                if pair {
                    out[(j + 1) * nlon + k] = buf[k].im;
                }
            }
            j += if pair { 2 } else { 1 };
        }
    }

    /// Fourier coefficients F_m(μ_j) = (1/nlon) Σ_k f e^{−imλ_k}, m = 0..=t,
    /// layout `f[m * nlat + j]`.
    pub fn fourier_analysis(&self, values: &[f64], out: &mut [Complex64]) {
        let nlat = self.grid.nlat;
        let nlon = self.grid.nlon;
        assert_eq!(values.len(), nlat * nlon);
        let zero = Complex64::new(0.0, 0.0);
        let mut buf = vec![zero; nlon];
        let mut scratch = vec![zero; self.fft_forward.get_inplace_scratch_len()];
        let inv = 1.0 / nlon as f64;
        let mut j = 0;
        while j < nlat {
            let pair = j + 1 < nlat;
            for k in 0..nlon {
                let b = if pair { values[(j + 1) * nlon + k] } else { 0.0 };
                buf[k] = Complex64::new(values[j * nlon + k], b);
            }
            self.fft_forward.process_with_scratch(&mut buf, &mut scratch);
            for m in 0..=self.t {
                let z = buf[m];
                let zc = buf[(nlon - m) % nlon].conj();
                let a = (z + zc) * 0.5;
                out[m * nlat + j] = a * inv;
                if pair {
                    let b = (z - zc) * Complex64::new(0.0, -0.5);
                    out[m * nlat + j + 1] = b * inv;
                }
            }
            j += if pair { 2 } else { 1 };
        }
    }

    /// Gaussian-quadrature projection of Fourier coefficients onto P̄_n^m.
    pub fn legendre_analysis(&self, f: &[Complex64]) -> SpectralCoeffs {
        let nlat = self.grid.nlat;
        let t = self.t;
        let scale = (2.0 * PI).sqrt();
        let work = |m: usize| -> Vec<Complex64> {
            let len = t - m + 1;
            let base = order_offset(t, m) * self.nhalf;
            let mut acc = vec![Complex64::new(0.0, 0.0); len];
            for k in 0..self.nhalf {
                let north = nlat - 1 - k;
                let south = k;
                let w = self.grid.mu_weights[north] * scale;
                let p = &self.pbar[base + k * len..base + (k + 1) * len];
                let (sum, diff) = if north == south {
                    (f[m * nlat + north], f[m * nlat + north])
                } else {
                    let a = f[m * nlat + north];
                    let b = f[m * nlat + south];
                    (a + b, a - b)
                };
                let (sum, diff) = (sum * w, diff * w);
                for (i, (a, pv)) in acc.iter_mut().zip(p).enumerate() {
                    *a += if i % 2 == 0 { sum } else { diff } * *pv;
                }
            }
            acc
        };
        let blocks: Vec<Vec<Complex64>> = if t >= PARALLEL_THRESHOLD {
            (0..=t).into_par_iter().map(work).collect()
        } else {
            (0..=t).map(work).collect()
        };
        let mut out = SpectralCoeffs::zeros(t);
        let mut at = 0;
        for b in blocks {
            out.as_mut_slice()[at..at + b.len()].copy_from_slice(&b);
            at += b.len();
        }
        out
    }

    /// Grid values (latitude-major) to coefficients.
    pub fn analyze(&self, values: &[f64]) -> SpectralCoeffs {
        let mut f = self.sum_buffer();
        self.fourier_analysis(values, &mut f);
        self.legendre_analysis(&f)
    }

    /// Coefficients to grid values (latitude-major).
    pub fn synthesize(&self, c: &SpectralCoeffs) -> Vec<f64> {
        let mut g = self.sum_buffer();
        self.legendre_sums(c, Some(&mut g), None);
        let mut out = vec![0.0; self.grid.len()];
        self.fourier_synthesis(&g, false, &mut out);
        out
    }

    /// ∂f/∂λ on the grid.
    pub fn synthesize_dlambda(&self, c: &SpectralCoeffs) -> Vec<f64> {
        let mut g = self.sum_buffer();
        self.legendre_sums(c, Some(&mut g), None);
        let mut out = vec![0.0; self.grid.len()];
        self.fourier_synthesis(&g, true, &mut out);
        out
    }

    /// (1 − μ²) ∂f/∂μ on the grid.
    pub fn synthesize_cos_dmu(&self, c: &SpectralCoeffs) -> Vec<f64> {
        let mut g = self.sum_buffer();
        self.legendre_sums(c, None, Some(&mut g));
        let mut out = vec![0.0; self.grid.len()];
        self.fourier_synthesis(&g, false, &mut out);
        out
    }
}

/// Σ c_n p_n split by the parity of n − m (even, odd).
#[inline]
fn parity_sums(coef: &[Complex64], p: &[f64]) -> (Complex64, Complex64) {
    let (mut er, mut ei, mut or, mut oi) = (0.0, 0.0, 0.0, 0.0);
    let mut pairs_c = coef.chunks_exact(2);
    let mut pairs_p = p.chunks_exact(2);
    for (c, p) in (&mut pairs_c).zip(&mut pairs_p) {
        er += c[0].re * p[0];
        ei += c[0].im * p[0];
        or += c[1].re * p[1];
        oi += c[1].im * p[1];
    }
    if let (Some(c), Some(p)) = (pairs_c.remainder().first(), pairs_p.remainder().first()) {
        er += c.re * p;
        ei += c.im * p;
    }
    (Complex64::new(er, ei), Complex64::new(or, oi))
}

/// Forward transform of a grid field at truncation `t`.
pub fn sh_analysis(field: &ScalarField, t: usize) -> Result<SpectralCoeffs> {
    let plan = TransformPlan::new(field.grid.clone(), t)?;
    Ok(plan.analyze(&field.values))
}

/// Evaluates the truncated expansion on `grid`. The result carries time 0 in
/// the rest frame; callers stamp their own.
pub fn sh_synthesis(coeffs: &SpectralCoeffs, grid: &SphereGrid) -> Result<ScalarField> {
    let plan = TransformPlan::new(grid.clone(), coeffs.truncation())?;
    let values = plan.synthesize(coeffs);
    ScalarField::new(grid.clone(), values, 0.0, Frame::Rest)
}

/// Fails unless the (0,0) coefficient vanishes to within `tol`.
pub(crate) fn check_zero_mean(c: &SpectralCoeffs, tol: f64) -> Result<()> {
    let c00 = c.get(0, 0);
    if c00.norm() > tol {
        return Err(Error::InvalidState(format!(
            "mean vorticity coefficient is {c00}, expected 0"
        )));
    }
    Ok(())
}
