//! Pseudo-spectral integration of the vorticity equation with classical RK4,
//! and benchmark runs against exact solutions.

use std::f64::consts::PI;
use std::fmt;
use std::fmt::Write as _;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::frame::Frame;
use crate::solutions::{AnalyticSolution, VerticalCoord};
use crate::sphere::spectral::{check_zero_mean, laplacian_spectral, SpectralCoeffs, TransformPlan};
use crate::sphere::SphereGrid;
use crate::symmetry::{platzman, transform_solution, PlatzmanDirection};

/// Mean-vorticity coefficients larger than this are rejected.
pub const MEAN_TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq)]
pub struct SolverConfig {
    pub truncation: usize,
    pub dt: f64,
    pub nsteps: usize,
    /// Frame of integration; Ω of the Coriolis term comes from it.
    pub frame: Frame,
    /// Coefficient ν_h of ν_h(−1)^{p+1}Δ^p ζ; 0 disables it.
    pub hyperdiffusion: f64,
    pub hyper_order: u32,
    /// Steps between report rows.
    pub output_stride: usize,
    /// Coefficient (n, m) whose phase is tracked.
    pub track: (usize, usize),
}

impl SolverConfig {
    pub fn new(truncation: usize, dt: f64, nsteps: usize, frame: Frame) -> Self {
        SolverConfig {
            truncation,
            dt,
            nsteps,
            frame,
            hyperdiffusion: 0.0,
            hyper_order: 2,
            output_stride: 1,
            track: (1, 1),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::InvalidArgument(format!("dt must be positive, got {}", self.dt)));
        }
        if self.output_stride == 0 {
            return Err(Error::InvalidArgument("output stride must be at least 1".into()));
        }
        if self.hyperdiffusion < 0.0 {
            return Err(Error::InvalidArgument("hyperdiffusion must be non-negative".into()));
        }
        let (n, m) = self.track;
        if m > n || n > self.truncation {
            return Err(Error::InvalidArgument(format!(
                "tracked mode ({n},{m}) is outside truncation T={}",
                self.truncation
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SpectralState {
    pub zeta: SpectralCoeffs,
    pub time: f64,
}

impl SpectralState {
    pub fn new(zeta: SpectralCoeffs, time: f64) -> Result<Self> {
        check_zero_mean(&zeta, MEAN_TOL)?;
        let mut zeta = zeta;
        zeta.set(0, 0, Complex64::new(0.0, 0.0));
        Ok(SpectralState { zeta, time })
    }

    /// State with ζ = Δψ for grid values of ψ.
    pub fn from_psi(plan: &TransformPlan, psi: &[f64], time: f64) -> Result<Self> {
        let mut zeta = laplacian_spectral(&plan.analyze(psi));
        zeta.set(0, 0, Complex64::new(0.0, 0.0));
        Ok(SpectralState { zeta, time })
    }
}

/// ψ with Δψ = ζ: ψ_n^m = −ζ_n^m/(n(n+1)), ψ_0^0 = 0.
pub fn invert_laplacian(zeta: &SpectralCoeffs) -> Result<SpectralCoeffs> {
    check_zero_mean(zeta, MEAN_TOL)?;
    Ok(zeta.map_modes(|n, _| {
        if n == 0 {
            Complex64::new(0.0, 0.0)
        } else {
            Complex64::new(-1.0 / (n * (n + 1)) as f64, 0.0)
        }
    }))
}

/// Spectral model: transform plan plus configuration.
pub struct Solver {
    plan: TransformPlan,
    cfg: SolverConfig,
}

impl fmt::Debug for Solver {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Solver").field("cfg", &self.cfg).finish()
    }
}

impl Solver {
    pub fn new(cfg: SolverConfig) -> Result<Self> {
        cfg.validate()?;
        let plan = TransformPlan::for_truncation(cfg.truncation)?;
        Ok(Solver { plan, cfg })
    }

    pub fn plan(&self) -> &TransformPlan {
        &self.plan
    }

    pub fn grid(&self) -> &SphereGrid {
        self.plan.grid()
    }

    pub fn config(&self) -> &SolverConfig {
        &self.cfg
    }

    /// −(ψ_λζ_μ − ψ_μζ_λ) − 2Ωψ_λ (plus optional hyperdiffusion) in spectral
    /// space. The Jacobian is formed on the grid; the Coriolis term is
    /// diagonal, −2Ω·im·ψ_n^m.
    pub fn tendency(&self, state: &SpectralState) -> Result<SpectralCoeffs> {
        let plan = &self.plan;
        let grid = plan.grid();
        let psi = invert_laplacian(&state.zeta)?;
        let (mut gp, mut gh) = (plan.sum_buffer(), plan.sum_buffer());
        let n = grid.len();
        let (mut psi_l, mut psi_m, mut zeta_l, mut zeta_m) = (vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n]);
        plan.legendre_sums(&psi, Some(&mut gp), Some(&mut gh));
        plan.fourier_synthesis(&gp, true, &mut psi_l);
        plan.fourier_synthesis(&gh, false, &mut psi_m);
        plan.legendre_sums(&state.zeta, Some(&mut gp), Some(&mut gh));
        plan.fourier_synthesis(&gp, true, &mut zeta_l);
        plan.fourier_synthesis(&gh, false, &mut zeta_m);
        let nlon = grid.nlon;
        let mut jac = vec![0.0; n];
        for (j, mu) in grid.mu_nodes.iter().enumerate() {
            let inv = 1.0 / (1.0 - mu * mu);
            for i in j * nlon..(j + 1) * nlon {
                jac[i] = (psi_l[i] * zeta_m[i] - psi_m[i] * zeta_l[i]) * inv;
            }
        }
        let jc = self.plan.analyze(&jac);
        let omega = self.cfg.frame.omega();
        let (nu_h, p) = (self.cfg.hyperdiffusion, self.cfg.hyper_order as i32);
        let mut out = SpectralCoeffs::zeros(self.cfg.truncation);
        for (nn, m, j) in jc.iter() {
            if nn == 0 {
                continue;
            }
            let mut v = -j - Complex64::new(0.0, 2.0 * omega * m as f64) * psi.get(nn, m);
            if nu_h != 0.0 {
                v -= state.zeta.get(nn, m) * (nu_h * ((nn * (nn + 1)) as f64).powi(p));
            }
            out.set(nn, m, v);
        }
        Ok(out)
    }

    /// One classical RK4 step; `step` labels a blow-up.
    pub fn step_rk4(&self, state: &SpectralState, step: usize) -> Result<SpectralState> {
        let dt = self.cfg.dt;
        let stage = |s: &SpectralState, k: &SpectralCoeffs, h: f64| SpectralState {
            zeta: s.zeta.axpy(h, k),
            time: s.time + h,
        };
        let k1 = self.tendency(state)?;
        let k2 = self.tendency(&stage(state, &k1, 0.5 * dt))?;
        let k3 = self.tendency(&stage(state, &k2, 0.5 * dt))?;
        let k4 = self.tendency(&stage(state, &k3, dt))?;
        let mut zeta = state.zeta.clone();
        for (i, z) in zeta.as_mut_slice().iter_mut().enumerate() {
            let (a, b, c, d) = (k1.as_slice()[i], k2.as_slice()[i], k3.as_slice()[i], k4.as_slice()[i]);
            *z += (a + (b + c) * 2.0 + d) * (dt / 6.0);
        }
        zeta.set(0, 0, Complex64::new(0.0, 0.0));
        if !zeta.is_finite() {
            return Err(Error::BlowUp { step });
        }
        Ok(SpectralState {
            zeta,
            time: state.time + dt,
        })
    }

    /// Energy ½Σ n(n+1)|ψ_n^m|² (orders m > 0 counted twice) and absolute
    /// enstrophy ½∮(ζ + 2Ωμ)² dA by quadrature.
    pub fn diagnostics(&self, state: &SpectralState) -> Result<(f64, f64)> {
        let psi = invert_laplacian(&state.zeta)?;
        let energy = 0.5
            * psi
                .iter()
                .map(|(n, m, c)| (n * (n + 1)) as f64 * c.norm_sqr() * if m > 0 { 2.0 } else { 1.0 })
                .sum::<f64>();
        let grid = self.plan.grid();
        let omega = self.cfg.frame.omega();
        let zeta = self.plan.synthesize(&state.zeta);
        let nlon = grid.nlon;
        let abs2: Vec<f64> = zeta
            .iter()
            .enumerate()
            .map(|(i, z)| {
                let a = z + 2.0 * omega * grid.mu_nodes[i / nlon];
                a * a
            })
            .collect();
        Ok((energy, 0.5 * grid.integrate(&abs2)))
    }
}

/// Moves a state between the rotating frame (angular velocity Ω) and the
/// rest frame: λ_rest = λ_rot + Ωt, ζ_rest = ζ_rot + 2Ωμ.
pub fn platzman_state(state: &SpectralState, omega: f64, direction: PlatzmanDirection) -> SpectralState {
    let s = match direction {
        PlatzmanDirection::ToRest => -1.0,
        PlatzmanDirection::ToRotating => 1.0,
    };
    let mut zeta = state.zeta.map_modes(|_, m| Complex64::from_polar(1.0, s * m as f64 * omega * state.time));
    if zeta.truncation() >= 1 {
        // μ = √(4π/3) Y_1^0
        let c = zeta.get(1, 0) - s * 2.0 * omega * (4.0 * PI / 3.0).sqrt();
        zeta.set(1, 0, c);
    }
    SpectralState { zeta, time: state.time }
}

/// Least-squares angular velocity of the pattern carrying a tracked
/// coefficient: the slope of the unwrapped arg c_n^m(t), divided by −m
/// (a pattern f(λ − ct) has c_n^m ∝ e^{−imct}).
pub fn measure_phase_speed(history: &[(f64, Complex64)], n: usize, m: usize) -> Result<f64> {
    if m == 0 {
        return Err(Error::UndefinedPhase { n, m });
    }
    let peak = history.iter().fold(0.0f64, |a, (_, c)| a.max(c.norm()));
    if history.len() < 2 || !(peak > 0.0) || history.iter().any(|(_, c)| c.norm() <= 1e-12 * peak) {
        return Err(Error::UndefinedPhase { n, m });
    }
    let mut phases = Vec::with_capacity(history.len());
    let mut prev: Option<f64> = None;
    for (_, c) in history {
        let mut a = c.arg();
        if let Some(p) = prev {
            a += 2.0 * PI * ((p - a) / (2.0 * PI)).round();
        }
        phases.push(a);
        prev = Some(a);
    }
    let k = history.len() as f64;
    let tm = history.iter().map(|(t, _)| t).sum::<f64>() / k;
    let pm = phases.iter().sum::<f64>() / k;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for ((t, _), p) in history.iter().zip(&phases) {
        sxy += (t - tm) * (p - pm);
        sxx += (t - tm) * (t - tm);
    }
    if sxx == 0.0 {
        return Err(Error::UndefinedPhase { n, m });
    }
    Ok(-(sxy / sxx) / m as f64)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BenchRow {
    pub step: usize,
    pub t: f64,
    pub l2_psi_err: f64,
    pub linf_psi_err: f64,
    pub energy: f64,
    pub enstrophy: f64,
    /// Running phase-speed estimate in the frame of the exact solution
    /// (NaN on the first row).
    pub phase_estimate: f64,
}

#[derive(Clone, Debug)]
pub struct BenchReport {
    pub config: Vec<(String, String)>,
    pub rows: Vec<BenchRow>,
    /// (t, ψ_n^m) of the tracked coefficient at every step, in the
    /// integration frame.
    pub history: Vec<(f64, Complex64)>,
    /// Set when the run stopped early; rows hold the partial record.
    pub failure: Option<Error>,
}

impl BenchReport {
    pub fn last(&self) -> Option<&BenchRow> {
        self.rows.last()
    }

    pub fn final_linf(&self) -> f64 {
        self.last().map_or(f64::NAN, |r| r.linf_psi_err)
    }

    pub fn phase_speed(&self) -> f64 {
        self.last().map_or(f64::NAN, |r| r.phase_estimate)
    }

    /// Largest |x − x₀|/|x₀| over the rows for energy and enstrophy.
    pub fn conservation_drift(&self) -> (f64, f64) {
        let Some(first) = self.rows.first() else {
            return (0.0, 0.0);
        };
        let rel = |a: f64, b: f64| if b == 0.0 { (a - b).abs() } else { ((a - b) / b).abs() };
        self.rows.iter().fold((0.0f64, 0.0f64), |(e, z), r| {
            (e.max(rel(r.energy, first.energy)), z.max(rel(r.enstrophy, first.enstrophy)))
        })
    }

    pub fn into_result(self) -> Result<BenchReport> {
        match self.failure.clone() {
            Some(e) => Err(e),
            None => Ok(self),
        }
    }

    /// CSV with the configuration echoed as `#` comments.
    pub fn to_csv(&self) -> String {
        let mut s = String::new();
        for (k, v) in &self.config {
            let _ = writeln!(s, "# {k} = {v}");
        }
        if let Some(e) = &self.failure {
            let _ = writeln!(s, "# failure = {e}");
        }
        s.push_str("step,t,l2_psi_err,linf_psi_err,energy,enstrophy,phase_estimate\n");
        for r in &self.rows {
            let _ = writeln!(
                s,
                "{},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
                r.step, r.t, r.l2_psi_err, r.linf_psi_err, r.energy, r.enstrophy, r.phase_estimate
            );
        }
        s
    }
}

/// The exact solution expressed in the integration frame.
fn in_frame(exact: &AnalyticSolution, frame: Frame) -> Result<AnalyticSolution> {
    match (exact.frame, frame) {
        (a, b) if a == b => Ok(exact.clone()),
        (Frame::Rotating { omega }, Frame::Rest) => {
            transform_solution(exact, &platzman(PlatzmanDirection::ToRest, omega))
        }
        (Frame::Rest, Frame::Rotating { omega }) => {
            transform_solution(exact, &platzman(PlatzmanDirection::ToRotating, omega))
        }
        (a, b) => Err(Error::InvalidArgument(format!(
            "cannot run a solution given in the {a} frame in the {b} frame"
        ))),
    }
}

/// Initializes ζ from `exact` at t = 0, advances `cfg.nsteps` RK4 steps and
/// records ψ errors against the exact evolution (means removed), energy,
/// absolute enstrophy and the running phase speed of `cfg.track`. Runs in
/// the rest frame report the phase speed converted to the exact solution's
/// frame.
pub fn run_benchmark(exact: &AnalyticSolution, cfg: &SolverConfig) -> Result<BenchReport> {
    if !exact.domain.is_global() || exact.coord != VerticalCoord::Mu {
        return Err(Error::Validity(format!(
            "{} is not a global solution in (t, λ, μ)",
            exact.name
        )));
    }
    let solver = Solver::new(cfg.clone())?;
    let target = in_frame(exact, cfg.frame)?;
    let grid = solver.grid().clone();
    let exact_grid = |t: f64| -> Result<Vec<f64>> {
        let mut v = Vec::with_capacity(grid.len());
        for &mu in &grid.mu_nodes {
            for &lam in &grid.lambda_nodes {
                v.push(target.psi(t, lam, mu)?);
            }
        }
        Ok(v)
    };
    let area = 4.0 * PI;
    let demean = |v: &mut [f64]| {
        let mean = grid.integrate(v) / area;
        v.iter_mut().for_each(|x| *x -= mean);
    };
    let frame_shift = exact.omega() - cfg.frame.omega();
    let (tn, tm) = cfg.track;

    let mut config = vec![
        ("solution".to_string(), exact.name.clone()),
        ("exact_frame".into(), exact.frame.to_string()),
        ("frame".into(), cfg.frame.to_string()),
        ("truncation".into(), cfg.truncation.to_string()),
        ("nlat".into(), grid.nlat.to_string()),
        ("nlon".into(), grid.nlon.to_string()),
        ("dt".into(), format!("{:.16e}", cfg.dt)),
        ("nsteps".into(), cfg.nsteps.to_string()),
        ("output_stride".into(), cfg.output_stride.to_string()),
        ("hyperdiffusion".into(), format!("{:.16e}", cfg.hyperdiffusion)),
        ("track".into(), format!("{tn}:{tm}")),
    ];
    if cfg.hyperdiffusion != 0.0 {
        config.push(("hyper_order".into(), cfg.hyper_order.to_string()));
    }

    let mut state = SpectralState::from_psi(solver.plan(), &exact_grid(0.0)?, 0.0)?;
    let mut report = BenchReport {
        config,
        rows: Vec::new(),
        history: Vec::new(),
        failure: None,
    };
    let record = |state: &SpectralState, step: usize, report: &mut BenchReport| -> Result<()> {
        let psi = invert_laplacian(&state.zeta)?;
        report.history.push((state.time, psi.get(tn, tm)));
        if step % cfg.output_stride != 0 && step != cfg.nsteps {
            return Ok(());
        }
        let mut num = solver.plan().synthesize(&psi);
        let mut ex = exact_grid(state.time)?;
        demean(&mut num);
        demean(&mut ex);
        let diff: Vec<f64> = num.iter().zip(&ex).map(|(a, b)| a - b).collect();
        let linf = diff.iter().fold(0.0f64, |a, d| a.max(d.abs()));
        let sq: Vec<f64> = diff.iter().map(|d| d * d).collect();
        let l2 = (grid.integrate(&sq) / area).sqrt();
        let (energy, enstrophy) = solver.diagnostics(state)?;
        let phase = if report.history.len() >= 2 {
            measure_phase_speed(&report.history, tn, tm).map_or(f64::NAN, |c| c - frame_shift)
        } else {
            f64::NAN
        };
        report.rows.push(BenchRow {
            step,
            t: state.time,
            l2_psi_err: l2,
            linf_psi_err: linf,
            energy,
            enstrophy,
            phase_estimate: phase,
        });
        Ok(())
    };
    record(&state, 0, &mut report)?;
    for step in 1..=cfg.nsteps {
        match solver.step_rk4(&state, step) {
            Ok(next) => {
                // Recompute the time from the step count so long runs land on n·dt.
                state = SpectralState {
                    time: step as f64 * cfg.dt,
                    ..next
                };
            }
            Err(e) => {
                report.failure = Some(e);
                return Ok(report);
            }
        }
        record(&state, step, &mut report)?;
    }
    Ok(report)
}
