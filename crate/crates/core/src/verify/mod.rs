//! Residual certification against the vorticity equation, its disturbance
//! form and the reduced equations, and pointwise equivalence of solutions
//! under point transformations.

use std::f64::consts::PI;
use std::fmt;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::jet::Jet;
use crate::numerics::halton;
use crate::solutions::{AnalyticSolution, Domain, Profile, ReducedSolution, VerticalCoord};
use crate::sphere::spectral::{laplacian_spectral, TransformPlan};
use crate::symmetry::{transform_solution, PointTransformation};

/// Default step of the finite-difference mode (per unit coordinate range).
pub const FD_STEP: f64 = 1e-2;
/// Time step of the 4th-order time difference in spectral mode.
pub const SPECTRAL_DT: f64 = 1e-3;
/// Most points a report may skip (domain failures) before it errors.
pub const MAX_SKIPPED_FRACTION: f64 = 0.1;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ResidualMode {
    /// Exact partials from the solution's Taylor jets.
    Analytic,
    /// 4th-order central differences of ψ values with the given step.
    FiniteDifference { step: f64 },
    /// Spectral differentiation on the Gauss grid of the given truncation,
    /// at the distinct sample times.
    Spectral { truncation: usize },
}

impl ResidualMode {
    /// Finite differences with the default step.
    pub fn finite_difference() -> Self {
        ResidualMode::FiniteDifference { step: FD_STEP }
    }
}

impl fmt::Display for ResidualMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ResidualMode::Analytic => "analytic",
            ResidualMode::FiniteDifference { .. } => "finite_difference",
            ResidualMode::Spectral { .. } => "spectral",
        })
    }
}

/// One evaluated point: coordinates (t, λ, μ) and the residual there.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ResidualSample {
    pub t: f64,
    pub lambda: f64,
    pub mu: f64,
    pub residual: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ResidualReport {
    pub n_points: usize,
    pub max_abs: f64,
    pub rms: f64,
    /// max |ζ| (or |w| for reduced equations) over the sample.
    pub scale: f64,
    /// max_abs / (1 + scale).
    pub relative_max: f64,
    pub mode: ResidualMode,
    /// Largest single term of the equation over the sample.
    pub term_scale: f64,
    /// Points dropped because the solution is undefined there.
    pub skipped: usize,
    /// For the traveling-wave reduction: max |u_q w_p − u_p w_q| / (|∇u||∇w|),
    /// u = v + aq, i.e. how far the gradients are from parallel.
    pub dependence: Option<f64>,
    pub samples: Vec<ResidualSample>,
}

impl ResidualReport {
    fn build(mode: ResidualMode, samples: Vec<ResidualSample>, scale: f64, term_scale: f64, skipped: usize) -> Result<Self> {
        let total = samples.len() + skipped;
        if samples.is_empty() || skipped as f64 > MAX_SKIPPED_FRACTION * total as f64 {
            return Err(Error::Domain(format!(
                "{skipped} of {total} sample points are outside the solution's domain"
            )));
        }
        let n = samples.len();
        let max_abs = samples.iter().fold(0.0f64, |m, s| m.max(s.residual.abs()));
        let rms = (samples.iter().map(|s| s.residual * s.residual).sum::<f64>() / n as f64).sqrt();
        let max_abs = if samples.iter().any(|s| s.residual.is_nan()) { f64::INFINITY } else { max_abs };
        Ok(ResidualReport {
            n_points: n,
            max_abs,
            rms: rms.min(max_abs),
            scale,
            relative_max: max_abs / (1.0 + scale),
            mode,
            term_scale,
            skipped,
            dependence: None,
            samples,
        })
    }

    pub fn passes(&self, tol: f64) -> bool {
        self.relative_max <= tol
    }

    /// max_abs relative to the largest term, for information.
    pub fn term_relative(&self) -> f64 {
        if self.term_scale > 0.0 {
            self.max_abs / self.term_scale
        } else {
            self.max_abs
        }
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("point_index,t,lambda,mu,residual\n");
        for (i, p) in self.samples.iter().enumerate() {
            let _ = writeln!(s, "{i},{:.16e},{:.16e},{:.16e},{:.16e}", p.t, p.lambda, p.mu, p.residual);
        }
        s
    }
}

impl fmt::Display for ResidualReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "mode          {}", self.mode)?;
        writeln!(f, "n_points      {}", self.n_points)?;
        writeln!(f, "skipped       {}", self.skipped)?;
        writeln!(f, "max_abs       {:.16e}", self.max_abs)?;
        writeln!(f, "rms           {:.16e}", self.rms)?;
        writeln!(f, "scale         {:.16e}", self.scale)?;
        writeln!(f, "relative_max  {:.16e}", self.relative_max)?;
        write!(f, "term_relative {:.16e}", self.term_relative())?;
        if let Some(d) = self.dependence {
            write!(f, "\ndependence    {d:.16e}")?;
        }
        Ok(())
    }
}

/// Quasi-random points (t, λ, μ) with t ∈ [0.1, 10], λ ∈ [0, 2π),
/// |μ| ≤ `mu_max`.
pub fn sample_points_mu(count: usize, mu_max: f64) -> Vec<[f64; 3]> {
    (1..=count)
        .map(|i| {
            let [a, b, c] = halton::<3>(i);
            [0.1 + 9.9 * a, 2.0 * PI * b, mu_max * (2.0 * c - 1.0)]
        })
        .collect()
}

/// Default interior sample for a solution: 200-style quasi-random points in
/// its validity band (|μ| ≤ 0.999), with y converted to θ for solutions in
/// polar-angle form.
pub fn interior_points(sol: &AnalyticSolution, count: usize) -> Vec<[f64; 3]> {
    let mu_max = match sol.domain {
        Domain::Band { delta } | Domain::Chart { delta } => (1.0 - delta).min(0.999) * 0.999,
        _ => 0.999,
    };
    let pts = sample_points_mu(count, mu_max);
    match sol.coord {
        VerticalCoord::Mu => pts,
        VerticalCoord::Theta => pts.into_iter().map(|[t, l, m]| [t, l, m.acos()]).collect(),
    }
}

fn to_mu(coord: VerticalCoord, y: f64) -> f64 {
    match coord {
        VerticalCoord::Mu => y,
        VerticalCoord::Theta => y.cos(),
    }
}

/// Terms of the vorticity equation (ζ_t, ψ_λζ_μ, −ψ_μζ_λ, 2Ωψ_λ) from first
/// partials of ψ and ζ in (t, λ, y).
fn vorticity_terms(coord: VerticalCoord, y: f64, omega: f64, psi: [f64; 3], zeta: [f64; 3]) -> [f64; 4] {
    match coord {
        VerticalCoord::Mu => [zeta[0], psi[1] * zeta[2], -psi[2] * zeta[1], 2.0 * omega * psi[1]],
        VerticalCoord::Theta => {
            // ∂_μ = −(1/sin θ) ∂_θ
            let s = y.sin();
            [zeta[0], -psi[1] * zeta[2] / s, psi[2] * zeta[1] / s, 2.0 * omega * psi[1]]
        }
    }
}

fn is_domain(e: &Error) -> bool {
    matches!(e, Error::Domain(_) | Error::SingularTime)
}

struct Accumulator {
    samples: Vec<ResidualSample>,
    scale: f64,
    term_scale: f64,
    skipped: usize,
}

impl Accumulator {
    fn new() -> Self {
        Accumulator {
            samples: Vec::new(),
            scale: 0.0,
            term_scale: 0.0,
            skipped: 0,
        }
    }

    fn push(&mut self, x: [f64; 3], mu: f64, zeta: f64, terms: &[f64]) {
        self.scale = self.scale.max(zeta.abs());
        for t in terms {
            self.term_scale = self.term_scale.max(t.abs());
        }
        self.samples.push(ResidualSample {
            t: x[0],
            lambda: x[1],
            mu,
            residual: terms.iter().sum(),
        });
    }

    /// Records a point, or skips it when the solution is undefined there.
    fn eval(&mut self, r: Result<([f64; 3], f64, f64, Vec<f64>)>) -> Result<()> {
        match r {
            Ok((x, mu, zeta, terms)) => {
                self.push(x, mu, zeta, &terms);
                Ok(())
            }
            Err(e) if is_domain(&e) => {
                self.skipped += 1;
                Ok(())
            }
            Err(e) => Err(e),
        }
    }

    fn finish(self, mode: ResidualMode) -> Result<ResidualReport> {
        ResidualReport::build(mode, self.samples, self.scale, self.term_scale, self.skipped)
    }
}

/// 4th-order central first difference of `f` along coordinate `i`.
fn d1(f: &dyn Fn([f64; 3]) -> Result<f64>, x: [f64; 3], i: usize, h: f64) -> Result<f64> {
    let at = |k: f64| {
        let mut y = x;
        y[i] += k * h;
        f(y)
    };
    Ok((at(-2.0)? - 8.0 * at(-1.0)? + 8.0 * at(1.0)? - at(2.0)?) / (12.0 * h))
}

/// 4th-order central second difference.
fn d2(f: &dyn Fn([f64; 3]) -> Result<f64>, x: [f64; 3], i: usize, h: f64) -> Result<f64> {
    let at = |k: f64| {
        let mut y = x;
        y[i] += k * h;
        f(y)
    };
    Ok((-at(-2.0)? + 16.0 * at(-1.0)? - 30.0 * f(x)? + 16.0 * at(1.0)? - at(2.0)?) / (12.0 * h * h))
}

/// Steps per coordinate, shrunk near the poles so stencils stay in range.
fn fd_steps(coord: VerticalCoord, y: f64, h: f64) -> [f64; 3] {
    let hy = match coord {
        VerticalCoord::Mu => h.min((1.0 - y.abs()) / 5.0),
        VerticalCoord::Theta => h.min(y.min(PI - y) / 5.0),
    };
    [h, h, hy]
}

/// Vorticity of a ψ oracle by finite differences.
fn zeta_fd(psi: &dyn Fn([f64; 3]) -> Result<f64>, coord: VerticalCoord, x: [f64; 3], h: [f64; 3]) -> Result<f64> {
    let y = x[2];
    let ll = d2(psi, x, 1, h[1])?;
    let py = d1(psi, x, 2, h[2])?;
    let yy = d2(psi, x, 2, h[2])?;
    Ok(match coord {
        VerticalCoord::Mu => {
            let c = 1.0 - y * y;
            ll / c + c * yy - 2.0 * y * py
        }
        VerticalCoord::Theta => {
            let s = y.sin();
            yy + y.cos() / s * py + ll / (s * s)
        }
    })
}

/// Residual of ζ_t + ψ_λζ_μ − ψ_μζ_λ + 2Ωψ_λ = 0 with Ω from the solution's
/// frame.
pub fn vorticity_residual(sol: &AnalyticSolution, points: &[[f64; 3]], mode: ResidualMode) -> Result<ResidualReport> {
    let omega = sol.omega();
    let coord = sol.coord;
    let mut acc = Accumulator::new();
    match mode {
        ResidualMode::Analytic => {
            for &x in points {
                acc.eval((|| {
                    let psi = sol.jet(x[0], x[1], x[2])?;
                    let zeta = sol.vorticity_jet(x[0], x[1], x[2])?;
                    let terms = vorticity_terms(coord, x[2], omega, psi.gradient(), zeta.gradient());
                    Ok((x, to_mu(coord, x[2]), zeta.value(), terms.to_vec()))
                })())?;
            }
        }
        ResidualMode::FiniteDifference { step } => {
            let psi = |y: [f64; 3]| sol.psi(y[0], y[1], y[2]);
            for &x in points {
                acc.eval((|| {
                    let h = fd_steps(coord, x[2], step);
                    let zeta = |y: [f64; 3]| zeta_fd(&psi, coord, y, h);
                    let pg = [0.0, d1(&psi, x, 1, h[1])?, d1(&psi, x, 2, h[2])?];
                    let zg = [d1(&zeta, x, 0, h[0])?, d1(&zeta, x, 1, h[1])?, d1(&zeta, x, 2, h[2])?];
                    let terms = vorticity_terms(coord, x[2], omega, pg, zg);
                    Ok((x, to_mu(coord, x[2]), zeta(x)?, terms.to_vec()))
                })())?;
            }
        }
        ResidualMode::Spectral { truncation } => spectral_residual(sol, points, truncation, &mut acc)?,
    }
    acc.finish(mode)
}

/// Grid-wide residual at each distinct time of `points`.
fn spectral_residual(sol: &AnalyticSolution, points: &[[f64; 3]], truncation: usize, acc: &mut Accumulator) -> Result<()> {
    if !sol.domain.is_global() || sol.coord != VerticalCoord::Mu {
        return Err(Error::Capability(
            "spectral residuals need a globally valid solution in (t, λ, μ)".into(),
        ));
    }
    let plan = TransformPlan::for_truncation(truncation)?;
    let grid = plan.grid().clone();
    let omega = sol.omega();
    let sample = |t: f64| -> Result<Vec<f64>> {
        let mut v = Vec::with_capacity(grid.len());
        for &mu in &grid.mu_nodes {
            for &lam in &grid.lambda_nodes {
                v.push(sol.psi(t, lam, mu)?);
            }
        }
        Ok(v)
    };
    let mut times: Vec<f64> = Vec::new();
    for p in points {
        if !times.contains(&p[0]) {
            times.push(p[0]);
        }
    }
    for t in times {
        let c = plan.analyze(&sample(t)?);
        let zc = laplacian_spectral(&c);
        let zeta = plan.synthesize(&zc);
        let zeta_at = |s: f64| -> Result<Vec<f64>> { Ok(plan.synthesize(&laplacian_spectral(&plan.analyze(&sample(t + s)?)))) };
        let h = SPECTRAL_DT;
        let (zm2, zm1, zp1, zp2) = (zeta_at(-2.0 * h)?, zeta_at(-h)?, zeta_at(h)?, zeta_at(2.0 * h)?);
        let psi_l = plan.synthesize_dlambda(&c);
        let psi_m = plan.synthesize_cos_dmu(&c);
        let zeta_l = plan.synthesize_dlambda(&zc);
        let zeta_m = plan.synthesize_cos_dmu(&zc);
        for (j, &mu) in grid.mu_nodes.iter().enumerate() {
            let cos2 = 1.0 - mu * mu;
            for (k, &lam) in grid.lambda_nodes.iter().enumerate() {
                let i = j * grid.nlon + k;
                let zt = (zm2[i] - 8.0 * zm1[i] + 8.0 * zp1[i] - zp2[i]) / (12.0 * h);
                let terms = [
                    zt,
                    psi_l[i] * zeta_m[i] / cos2,
                    -psi_m[i] * zeta_l[i] / cos2,
                    2.0 * omega * psi_l[i],
                ];
                acc.push([t, lam, mu], mu, zeta[i], &terms);
            }
        }
    }
    Ok(())
}

/// Residual of the disturbance form in (t, λ, θ):
/// ζ̂_t + (ν/sin θ)(ψ̂_θζ̂_λ − ψ̂_λζ̂_θ) + (F/sin θ)ζ̂_λ − (1/sin θ)ψ̂_λ L₁F + ψ̂_λ/R₀,
/// with F = H′ and L₁F = F″ + cot θ F′ − F/sin²θ. `big_h` is H, so its
/// first three derivatives supply F, F′, F″.
pub fn ibragimov_residual(
    sol: &AnalyticSolution,
    big_h: &Profile,
    nu: f64,
    r0: f64,
    points: &[[f64; 3]],
) -> Result<ResidualReport> {
    if sol.coord != VerticalCoord::Theta {
        return Err(Error::InvalidArgument(format!(
            "{} is not written in polar-angle form",
            sol.name
        )));
    }
    if !(r0 > 0.0) {
        return Err(Error::InvalidArgument(format!("R0 must be positive, got {r0}")));
    }
    let mut acc = Accumulator::new();
    for &x in points {
        let theta = x[2];
        let s = theta.sin();
        if s.abs() < 1e-8 || !(0.0..=PI).contains(&theta) {
            return Err(Error::Domain(format!("theta = {theta} is at a pole")));
        }
        acc.eval((|| {
            let psi = sol.jet(x[0], x[1], theta)?;
            let zeta: Jet = sol.vorticity_jet(x[0], x[1], theta)?;
            let [_, f, fp, fpp] = big_h.derivs(theta);
            let l1f = fpp + theta.cos() / s * fp - f / (s * s);
            let (p, z) = (psi.gradient(), zeta.gradient());
            let terms = vec![
                z[0],
                nu / s * p[2] * z[1],
                -nu / s * p[1] * z[2],
                f / s * z[1],
                -p[1] * l1f / s,
                p[1] / r0,
            ];
            Ok((x, theta.cos(), zeta.value(), terms))
        })())?;
    }
    acc.finish(ResidualMode::Analytic)
}

fn reduced_eval(
    v: &ReducedSolution,
    points: &[[f64; 2]],
    terms: impl Fn(f64, &Jet, &Jet) -> Vec<f64>,
) -> Result<ResidualReport> {
    let mut acc = Accumulator::new();
    for &[p, q] in points {
        acc.eval((|| {
            let vj = v.jet(p, q)?;
            let wj = v.w_jet(p, q)?;
            Ok(([0.0, p, q], q, wj.value(), terms(q, &vj, &wj)))
        })())?;
    }
    acc.finish(ResidualMode::Analytic)
}

/// Quasi-random reduced-equation points (p, q) with p ∈ [0, 2π), |q| ≤ 0.999.
pub fn reduced_points(count: usize) -> Vec<[f64; 2]> {
    (1..=count)
        .map(|i| {
            let [a, b] = halton::<2>(i);
            [2.0 * PI * a, 0.999 * (2.0 * b - 1.0)]
        })
        .collect()
}

/// Residual of w + a w_p − v_p w_q + v_q w_p = 0, w = Δv in (p, q): the
/// reduction by ψ = t⁻¹ v(λ − a ln t, μ).
pub fn reduced_residual_scale(v: &ReducedSolution, a: f64, points: &[[f64; 2]]) -> Result<ResidualReport> {
    reduced_eval(v, points, |_, vj, wj| {
        let (vg, wg) = (vj.gradient(), wj.gradient());
        vec![wj.value(), a * wg[1], -vg[1] * wg[2], vg[2] * wg[1]]
    })
}

/// Residual of −(v + aq)_q w_p + (v + aq)_p w_q = 0 (traveling waves
/// ψ = v(λ − at, μ)), with the gradient-parallelism diagnostic.
pub fn reduced_residual_wave(v: &ReducedSolution, a: f64, points: &[[f64; 2]]) -> Result<ResidualReport> {
    let mut report = reduced_eval(v, points, |_, vj, wj| {
        let (vg, wg) = (vj.gradient(), wj.gradient());
        vec![-(vg[2] + a) * wg[1], vg[1] * wg[2]]
    })?;
    let mut dep = 0.0f64;
    for &[p, q] in points {
        let (Ok(vj), Ok(wj)) = (v.jet(p, q), v.w_jet(p, q)) else {
            continue;
        };
        let (vg, wg) = (vj.gradient(), wj.gradient());
        let (up, uq) = (vg[1], vg[2] + a);
        let norm = (up.hypot(uq) * wg[1].hypot(wg[2])).max(f64::MIN_POSITIVE);
        let cross = uq * wg[1] - up * wg[2];
        if cross != 0.0 {
            dep = dep.max(cross.abs() / norm);
        }
    }
    report.dependence = Some(dep);
    Ok(report)
}

/// Residual of v_pp/(1−q²) + ((1−q²)v_q)_q − cv − caq − b = 0.
pub fn linear_reduced_residual(v: &ReducedSolution, a: f64, b: f64, c: f64, points: &[[f64; 2]]) -> Result<ResidualReport> {
    reduced_eval(v, points, |q, vj, wj| vec![wj.value(), -c * vj.value(), -c * a * q, -b])
}

#[derive(Clone, Debug, PartialEq)]
pub struct EquivalenceReport {
    pub pass: bool,
    pub max_deviation: f64,
    pub checked: usize,
    pub skipped: usize,
    pub tol: f64,
}

impl fmt::Display for EquivalenceReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} max_deviation {:.16e} (tol {:e}), {} points checked, {} skipped",
            if self.pass { "PASS" } else { "FAIL" },
            self.max_deviation,
            self.tol,
            self.checked,
            self.skipped
        )
    }
}

/// Checks solB(x) = (T · solA)(x) at each point. Points where either side is
/// undefined are skipped; more than 10% skipped fails the check.
pub fn equivalence_check(
    sol_a: &AnalyticSolution,
    sol_b: &AnalyticSolution,
    t: &PointTransformation,
    points: &[[f64; 3]],
    tol: f64,
) -> Result<EquivalenceReport> {
    let image = transform_solution(sol_a, t)?;
    if image.coord != sol_b.coord {
        return Err(Error::InvalidArgument(format!(
            "the image of {} and {} use different vertical coordinates",
            sol_a.name, sol_b.name
        )));
    }
    let (mut max_dev, mut checked, mut skipped) = (0.0f64, 0usize, 0usize);
    for &x in points {
        match (image.psi(x[0], x[1], x[2]), sol_b.psi(x[0], x[1], x[2])) {
            (Ok(a), Ok(b)) => {
                checked += 1;
                let d = (a - b).abs();
                max_dev = if d.is_nan() { f64::INFINITY } else { max_dev.max(d) };
            }
            (Err(e), _) | (_, Err(e)) if is_domain(&e) => skipped += 1,
            (Err(e), _) | (_, Err(e)) => return Err(e),
        }
    }
    let total = checked + skipped;
    let pass = checked > 0 && skipped as f64 <= MAX_SKIPPED_FRACTION * total as f64 && max_dev <= tol;
    Ok(EquivalenceReport {
        pass,
        max_deviation: max_dev,
        checked,
        skipped,
        tol,
    })
}
