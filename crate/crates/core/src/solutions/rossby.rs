//! Generalized Rossby–Haurwitz waves: single-degree spherical harmonics
//! travelling zonally on top of a solid-body mean flow.

use std::sync::Arc;

use super::{AnalyticSolution, Domain, GenericField, VerticalCoord};
use crate::error::{Error, Result};
use crate::frame::Frame;
use crate::jet::Scalar;
use crate::sphere::legendre::assoc_legendre_scalar;

/// One term A cos(mω + δ) P_n^m(μ).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WaveMode {
    pub m: usize,
    pub amplitude: f64,
    pub phase: f64,
}

impl WaveMode {
    pub fn new(m: usize, amplitude: f64, phase: f64) -> Self {
        WaveMode {
            m,
            amplitude,
            phase,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RHWaveParams {
    pub n: usize,
    pub modes: Vec<WaveMode>,
    /// Angular speed of the pattern in the rest frame.
    pub a: f64,
    pub omega: f64,
}

impl RHWaveParams {
    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::Degenerate(format!(
                "degree n={} makes n(n+1)-2 vanish or negative; the zonal term is undefined",
                self.n
            )));
        }
        for (i, md) in self.modes.iter().enumerate() {
            if md.m > self.n {
                return Err(Error::InvalidArgument(format!(
                    "mode order m={} exceeds degree n={}",
                    md.m, self.n
                )));
            }
            if self.modes[..i].iter().any(|o| o.m == md.m) {
                return Err(Error::InvalidArgument(format!(
                    "mode order m={} listed twice",
                    md.m
                )));
            }
        }
        Ok(())
    }
}

struct RHField {
    params: RHWaveParams,
}

impl RHField {
    fn wave<S: Scalar>(&self, x: [S; 3]) -> S {
        let p = &self.params;
        let omega_arg = x[1] - x[0] * (p.a - p.omega);
        let mut acc = S::cst(0.0);
        for md in &p.modes {
            if md.amplitude == 0.0 {
                continue;
            }
            let c = (omega_arg * md.m as f64 + md.phase).cos();
            acc = acc + c * assoc_legendre_scalar(p.n, md.m, x[2]) * md.amplitude;
        }
        acc
    }

    fn zonal_factor(&self) -> f64 {
        let nn = (self.params.n * (self.params.n + 1)) as f64;
        nn / (nn - 2.0)
    }
}

impl GenericField for RHField {
    const HAS_VORTICITY: bool = true;

    fn eval<S: Scalar>(&self, x: [S; 3]) -> Result<S> {
        let p = &self.params;
        Ok(self.wave(x) + x[2] * (p.omega - p.a * self.zonal_factor()))
    }

    fn vorticity<S: Scalar>(&self, x: [S; 3]) -> Result<S> {
        // Δ P_n^m e^{imλ} = −n(n+1) P_n^m e^{imλ} and Δμ = −2μ.
        let p = &self.params;
        let nn = (p.n * (p.n + 1)) as f64;
        Ok(self.wave(x) * -nn + x[2] * (2.0 * p.a * self.zonal_factor() - 2.0 * p.omega))
    }
}

/// ψ = Σ A_m cos(mω + δ_m) P_n^m(μ) − a n(n+1) μ/(n(n+1) − 2) + Ωμ with
/// ω = λ − (a − Ω)t, in the frame rotating with Ω.
pub fn rh_generalized(params: RHWaveParams) -> Result<AnalyticSolution> {
    params.validate()?;
    let frame = Frame::Rotating {
        omega: params.omega,
    };
    Ok(AnalyticSolution::new(
        "rh",
        frame,
        Domain::Global,
        VerticalCoord::Mu,
        Arc::new(RHField { params }),
    ))
}

/// Single-mode wave with vanishing mean flow, a = (n(n+1) − 2)/(n(n+1)) Ω.
pub fn rh_classic(n: usize, m: usize, amplitude: f64, omega: f64) -> Result<AnalyticSolution> {
    if n < 2 {
        return Err(Error::Degenerate(format!(
            "degree n={n} makes n(n+1)-2 vanish or negative"
        )));
    }
    let nn = (n * (n + 1)) as f64;
    let params = RHWaveParams {
        n,
        modes: vec![WaveMode::new(m, amplitude, 0.0)],
        a: (nn - 2.0) / nn * omega,
        omega,
    };
    let mut s = rh_generalized(params)?;
    s.name = "rh-classic".into();
    Ok(s)
}

/// Westward phase speed −2Ω/(n(n+1)) of a degree-n wave.
pub fn phase_speed(n: usize, omega: f64) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidArgument("degree must be at least 1".into()));
    }
    Ok(-2.0 * omega / (n * (n + 1)) as f64)
}

/// ψ = Ωμ in the frame rotating with Ω.
pub fn solid_body(omega: f64) -> AnalyticSolution {
    let params = RHWaveParams {
        n: 2,
        modes: Vec::new(),
        a: 0.0,
        omega,
    };
    let mut s = rh_generalized(params).expect("solid body parameters are valid");
    s.name = "solid-body".into();
    s
}

struct MuLambda;

impl GenericField for MuLambda {
    fn eval<S: Scalar>(&self, x: [S; 3]) -> Result<S> {
        Ok(x[2] * x[1])
    }
}

/// ψ = μλ in the frame rotating with Ω: not a solution when Ω ≠ 0 (the
/// Jacobian terms cancel, 2Ωψ_λ = 2Ωμ survives). Used as a negative control.
pub fn test_nonsolution(omega: f64) -> AnalyticSolution {
    AnalyticSolution::new(
        "test-nonsolution",
        Frame::Rotating { omega },
        Domain::Chart { delta: 0.0 },
        VerticalCoord::Mu,
        Arc::new(MuLambda),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_mode_value() {
        let s = rh_generalized(RHWaveParams {
            n: 2,
            modes: vec![WaveMode::new(1, 1.0, 0.0)],
            a: 0.0,
            omega: 0.0,
        })
        .unwrap();
        assert!((s.psi(0.0, 0.0, 0.6).unwrap() + 1.44).abs() < 1e-14);
    }

    #[test]
    fn classic_relation_and_phase_speed() {
        let s = rh_classic(2, 1, 1.0, 1.0).unwrap();
        // a = 2/3, zonal term vanishes: ψ = wave only.
        let z = s.psi(0.0, 0.0, 0.3).unwrap() - (-3.0 * 0.3 * (1.0f64 - 0.09).sqrt());
        assert!(z.abs() < 1e-14);
        assert_eq!(phase_speed(4, 1.0).unwrap(), -0.1);
        assert_eq!(phase_speed(1, 2.5).unwrap(), -2.5);
        assert_eq!(phase_speed(7, 0.0).unwrap(), 0.0);
        assert!(phase_speed(0, 1.0).is_err());
    }

    #[test]
    fn degree_below_two_is_degenerate() {
        let p = RHWaveParams {
            n: 1,
            modes: vec![],
            a: 0.0,
            omega: 1.0,
        };
        assert!(matches!(rh_generalized(p), Err(Error::Degenerate(_))));
        assert!(matches!(rh_classic(1, 1, 1.0, 1.0), Err(Error::Degenerate(_))));
    }

    #[test]
    fn repeated_or_oversized_orders_rejected() {
        let p = RHWaveParams {
            n: 3,
            modes: vec![WaveMode::new(1, 1.0, 0.0), WaveMode::new(1, 2.0, 0.0)],
            a: 0.0,
            omega: 0.0,
        };
        assert!(rh_generalized(p).is_err());
        let p = RHWaveParams {
            n: 3,
            modes: vec![WaveMode::new(4, 1.0, 0.0)],
            a: 0.0,
            omega: 0.0,
        };
        assert!(rh_generalized(p).is_err());
    }

    #[test]
    fn analytic_vorticity_matches_laplacian() {
        let s = rh_generalized(RHWaveParams {
            n: 5,
            modes: vec![WaveMode::new(2, 1.5, 0.3), WaveMode::new(5, -0.7, 1.0)],
            a: 0.4,
            omega: 1.3,
        })
        .unwrap();
        for (t, l, mu) in [(0.3, 1.0, 0.2), (2.0, -0.5, -0.8), (5.0, 3.0, 0.95)] {
            let a = s.zeta(t, l, mu).unwrap();
            let b = s.zeta_from_psi(t, l, mu).unwrap();
            assert!((a - b).abs() < 1e-11 * (1.0 + a.abs()));
        }
    }

    #[test]
    fn solid_body_is_omega_mu() {
        let s = solid_body(2.0);
        assert!((s.psi(3.0, 1.0, 0.25).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn classic_wave_translates_rigidly() {
        let s = rh_classic(4, 4, 1.0, 1.0).unwrap();
        let speed = -0.1;
        for (t, shift) in [(0.0, 1.0), (0.7, 2.5)] {
            let a = s.psi(t + shift, 0.4, 0.3).unwrap();
            let b = s.psi(t, 0.4 - speed * shift, 0.3).unwrap();
            assert!((a - b).abs() < 1e-12);
        }
    }
}
