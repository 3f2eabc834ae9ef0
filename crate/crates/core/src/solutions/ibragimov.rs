//! Closed-form disturbance stream functions ψ̂ in polar-angle coordinates
//! (t, λ, θ), solving the disturbance form of the vorticity equation with
//! mean zonal flow F(θ) = H′(θ).

use std::sync::Arc;

use super::profile::Profile;
use super::{AnalyticSolution, Domain, GenericField, VerticalCoord};
use crate::error::{Error, Result};
use crate::frame::Frame;
use crate::jet::Scalar;

#[derive(Clone, Debug)]
pub struct IbragimovParams {
    pub c1: f64,
    pub c2: f64,
    pub nu: f64,
    /// Rossby number; the matching frame rotates with Ω = 1/(2 R0).
    pub r0: f64,
    /// Antiderivative H of the mean flow F.
    pub big_h: Profile,
    /// Polar caps excluded from evaluation, |cos θ| ≤ 1 − δ.
    pub delta: f64,
}

impl IbragimovParams {
    pub fn new(c1: f64, c2: f64, nu: f64, r0: f64, big_h: Profile) -> Self {
        IbragimovParams {
            c1,
            c2,
            nu,
            r0,
            big_h,
            delta: 1e-3,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.nu == 0.0 {
            return Err(Error::SingularRelation);
        }
        if !(self.r0 > 0.0) {
            return Err(Error::InvalidArgument(format!("R0 must be positive, got {}", self.r0)));
        }
        Ok(())
    }

    pub fn omega(&self) -> f64 {
        1.0 / (2.0 * self.r0)
    }
}

struct Field {
    p: IbragimovParams,
    /// ψ² (true) or ψ¹ (false).
    rotated: bool,
}

impl GenericField for Field {
    fn eval<S: Scalar>(&self, x: [S; 3]) -> Result<S> {
        let [t, l, th] = x;
        if t.value() == 0.0 {
            return Err(Error::SingularTime);
        }
        let p = &self.p;
        let inv_t = t.powi(-1);
        let log_term = if self.rotated {
            let kappa = th.sin() * (l + t / (2.0 * p.r0)).cos();
            (kappa * -1.0 + 1.0).ln_abs() - (kappa + 1.0).ln_abs()
        } else {
            let half = th * 0.5;
            half.sin().ln_abs() - half.cos().ln_abs()
        };
        Ok(th.cos() / (2.0 * p.nu * p.r0) - p.big_h.apply(th)? / p.nu
            + inv_t * p.c1
            + inv_t * log_term * p.c2)
    }
}

fn build(name: &str, p: IbragimovParams, rotated: bool) -> Result<AnalyticSolution> {
    p.validate()?;
    let frame = Frame::Rotating { omega: p.omega() };
    let domain = Domain::Band { delta: p.delta };
    Ok(AnalyticSolution::new(
        name,
        frame,
        domain,
        VerticalCoord::Theta,
        Arc::new(Field { p, rotated }),
    ))
}

/// ψ̂¹ = cos θ/(2νR0) − H(θ)/ν + C1/t + (C2/t) ln|tan(θ/2)|.
pub fn ibragimov_psi1(p: IbragimovParams) -> Result<AnalyticSolution> {
    build("ibragimov1", p, false)
}

/// ψ̂² = cos θ/(2νR0) − H(θ)/ν + C1/t + (C2/t) ln|(1−κ)/(1+κ)|,
/// κ = sin θ cos(λ + t/(2R0)).
pub fn ibragimov_psi2(p: IbragimovParams) -> Result<AnalyticSolution> {
    build("ibragimov2", p, true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn log_tan_half_angle_is_minus_atanh_cos() {
        let p = IbragimovParams::new(0.0, 1.0, 1.0, 1e12, Profile::zero());
        let s = ibragimov_psi1(p).unwrap();
        let v = s.psi(1.0, 0.0, PI / 3.0).unwrap();
        assert!((v + 0.5f64.atanh()).abs() < 1e-11);
        assert!((v + 0.549_306_144_334_054_8).abs() < 1e-11);
    }

    #[test]
    fn log_ratio_is_minus_twice_atanh() {
        // κ = sin θ cos λ = 0.5 at θ = π/2, λ = π/3, t → with R0 huge.
        let p = IbragimovParams::new(0.0, 1.0, 1.0, 1e15, Profile::zero());
        let s = ibragimov_psi2(p).unwrap();
        let v = s.psi(1.0, PI / 3.0, PI / 2.0).unwrap();
        assert!((v + 1.098_612_288_668_109_8).abs() < 1e-10);
    }

    #[test]
    fn forms_agree_without_log_term() {
        let h = Profile::power(2.0, 1.0);
        let a = ibragimov_psi1(IbragimovParams::new(1.5, 0.0, 0.5, 0.5, h.clone())).unwrap();
        let b = ibragimov_psi2(IbragimovParams::new(1.5, 0.0, 0.5, 0.5, h)).unwrap();
        for (t, l, th) in [(0.5, 0.1, 0.7), (3.0, 2.0, 2.5)] {
            assert_eq!(a.psi(t, l, th).unwrap(), b.psi(t, l, th).unwrap());
        }
    }

    #[test]
    fn errors() {
        let s = ibragimov_psi1(IbragimovParams::new(1.0, 1.0, 1.0, 0.5, Profile::zero())).unwrap();
        assert!(matches!(s.psi(0.0, 0.0, 1.0), Err(Error::SingularTime)));
        assert!(matches!(
            ibragimov_psi1(IbragimovParams::new(1.0, 1.0, 0.0, 0.5, Profile::zero())),
            Err(Error::SingularRelation)
        ));
    }

    #[test]
    fn nu_scaling() {
        // ν (ψ̂ − cos θ/(2νR0) + H/ν) does not depend on ν apart from the C terms scaling.
        let h = Profile::power(2.0, 1.0);
        let (t, l, th) = (1.2, 0.3, 1.1);
        let base = |nu: f64| {
            let s = ibragimov_psi1(IbragimovParams::new(2.0 / nu, 3.0 / nu, nu, 0.5, h.clone())).unwrap();
            nu * (s.psi(t, l, th).unwrap() - th.cos() / (2.0 * nu * 0.5) + h.value(th) / nu)
        };
        assert!((base(1.0) - base(0.25)).abs() < 1e-12);
        assert!((base(1.0) - base(-3.0)).abs() < 1e-12);
    }
}
