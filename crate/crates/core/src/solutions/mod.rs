//! Closed-form solutions of the vorticity equation and of its reductions.
//!
//! An [`AnalyticSolution`] wraps a stream function of (t, λ, y), where y is
//! μ = sin φ or, for solutions written in polar-angle form, θ with μ = cos θ.
//! Every solution evaluates to plain values and to third-order Taylor jets,
//! so residuals can be formed from exact partial derivatives.

mod arctanh;
mod ibragimov;
pub mod profile;
mod reduced;
mod rossby;
pub mod spec;

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::frame::Frame;
use crate::jet::{Jet, Scalar};

pub use arctanh::{arctanh_family, rotated_arctanh, ArctanhParams};
pub use ibragimov::{ibragimov_psi1, ibragimov_psi2, IbragimovParams};
pub use profile::Profile;
pub use reduced::{
    legendre_mode_solution, linear_reduced_particular, LegendreDegree, ReducedField,
    ReducedSolution,
};
pub use rossby::{
    phase_speed, rh_classic, rh_generalized, solid_body, test_nonsolution, RHWaveParams,
    WaveMode,
};
pub use spec::{parse_mode, SolutionSpec, FAMILIES};

/// Which vertical coordinate the third argument of a solution is.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VerticalCoord {
    /// μ = sin φ ∈ [−1, 1].
    Mu,
    /// Polar angle θ ∈ [0, π], μ = cos θ.
    Theta,
}

/// Where a solution is valid.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Domain {
    /// The whole sphere.
    Global,
    /// The band |μ| ≤ 1 − δ.
    Band { delta: f64 },
    /// The band |μ| ≤ 1 − δ, and the formula is not periodic in λ.
    Chart { delta: f64 },
    /// Image of another solution under a point transformation; validity is
    /// checked at the preimage.
    Transformed,
}

impl Domain {
    pub fn is_global(&self) -> bool {
        matches!(self, Domain::Global)
    }

    pub fn check(&self, coord: VerticalCoord, y: f64) -> Result<()> {
        let mu = match coord {
            VerticalCoord::Mu => y,
            VerticalCoord::Theta => {
                if !(0.0..=std::f64::consts::PI).contains(&y) {
                    return Err(Error::Domain(format!("theta = {y} outside [0, pi]")));
                }
                y.cos()
            }
        };
        let limit = match self {
            Domain::Global => 1.0,
            Domain::Band { delta } | Domain::Chart { delta } => 1.0 - delta,
            Domain::Transformed => return Ok(()),
        };
        if !(mu.abs() <= limit) {
            return Err(Error::Domain(format!(
                "|mu| = {} outside the validity band |mu| <= {limit}",
                mu.abs()
            )));
        }
        Ok(())
    }
}

/// A stream function that evaluates on plain values and on jets.
pub trait StreamFunction: Send + Sync {
    fn value(&self, x: [f64; 3]) -> Result<f64>;
    /// Third-order expansion around `x` in the variables (t, λ, y).
    fn jet(&self, x: [f64; 3]) -> Result<Jet>;
    fn has_vorticity(&self) -> bool {
        false
    }
    /// Analytic vorticity, expanded to first order at least.
    fn vorticity_jet(&self, _x: [f64; 3]) -> Result<Jet> {
        Err(Error::Capability("no analytic vorticity".into()))
    }
}

/// Stream functions written once over [`Scalar`].
pub trait GenericField: Send + Sync {
    const HAS_VORTICITY: bool = false;
    fn eval<S: Scalar>(&self, x: [S; 3]) -> Result<S>;
    fn vorticity<S: Scalar>(&self, _x: [S; 3]) -> Result<S> {
        Err(Error::Capability("no analytic vorticity".into()))
    }
}

impl<T: GenericField> StreamFunction for T {
    fn value(&self, x: [f64; 3]) -> Result<f64> {
        finite(self.eval(x)?)
    }
    fn jet(&self, x: [f64; 3]) -> Result<Jet> {
        finite_jet(self.eval(Jet::variables(x))?)
    }
    fn has_vorticity(&self) -> bool {
        T::HAS_VORTICITY
    }
    fn vorticity_jet(&self, x: [f64; 3]) -> Result<Jet> {
        finite_jet(self.vorticity(Jet::variables(x))?)
    }
}

pub(crate) fn finite(v: f64) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Domain(format!("stream function is not finite ({v})")))
    }
}

pub(crate) fn finite_jet(j: Jet) -> Result<Jet> {
    if j.coefficients().iter().all(|c| c.is_finite()) {
        Ok(j)
    } else {
        Err(Error::Domain("stream function derivatives are not finite".into()))
    }
}

/// Spherical Laplacian of a stream-function jet. The result is exact through
/// first order (third-order input loses two orders).
pub fn laplacian_jet(psi: &Jet, coord: VerticalCoord, y0: f64) -> Jet {
    let y = Jet::variable(2, y0);
    let d_y = psi.derivative(2);
    let d_yy = d_y.derivative(2);
    let d_ll = psi.derivative(1).derivative(1);
    match coord {
        VerticalCoord::Mu => {
            let c = (y * y) * -1.0 + 1.0;
            d_ll / c + c * d_yy - y * d_y * 2.0
        }
        VerticalCoord::Theta => {
            let s = y.sin();
            let cot = y.cos() / s;
            d_yy + cot * d_y + d_ll / (s * s)
        }
    }
}

/// A solution of the vorticity equation (or, in θ form, of the disturbance
/// equation) with its frame and validity region.
#[derive(Clone)]
pub struct AnalyticSolution {
    pub name: String,
    pub frame: Frame,
    pub domain: Domain,
    pub coord: VerticalCoord,
    field: Arc<dyn StreamFunction>,
}

impl fmt::Debug for AnalyticSolution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("AnalyticSolution")
            .field("name", &self.name)
            .field("frame", &self.frame)
            .field("domain", &self.domain)
            .field("coord", &self.coord)
            .finish()
    }
}

impl AnalyticSolution {
    pub fn new(
        name: impl Into<String>,
        frame: Frame,
        domain: Domain,
        coord: VerticalCoord,
        field: Arc<dyn StreamFunction>,
    ) -> Self {
        AnalyticSolution {
            name: name.into(),
            frame,
            domain,
            coord,
            field,
        }
    }

    pub fn field(&self) -> &Arc<dyn StreamFunction> {
        &self.field
    }

    pub fn omega(&self) -> f64 {
        self.frame.omega()
    }

    pub fn psi(&self, t: f64, lambda: f64, y: f64) -> Result<f64> {
        self.domain.check(self.coord, y)?;
        self.field.value([t, lambda, y])
    }

    /// Taylor jet of ψ around (t, λ, y): all partials through third order.
    pub fn jet(&self, t: f64, lambda: f64, y: f64) -> Result<Jet> {
        self.domain.check(self.coord, y)?;
        self.field.jet([t, lambda, y])
    }

    pub fn has_analytic_vorticity(&self) -> bool {
        self.field.has_vorticity()
    }

    /// Vorticity jet, exact through first order: the analytic oracle when the
    /// solution has one, else the Laplacian of the ψ jet.
    pub fn vorticity_jet(&self, t: f64, lambda: f64, y: f64) -> Result<Jet> {
        self.domain.check(self.coord, y)?;
        if self.field.has_vorticity() {
            self.field.vorticity_jet([t, lambda, y])
        } else {
            let j = self.field.jet([t, lambda, y])?;
            Ok(laplacian_jet(&j, self.coord, y))
        }
    }

    pub fn zeta(&self, t: f64, lambda: f64, y: f64) -> Result<f64> {
        Ok(self.vorticity_jet(t, lambda, y)?.value())
    }

    /// Vorticity from the Laplacian of the ψ jet, ignoring any analytic oracle.
    pub fn zeta_from_psi(&self, t: f64, lambda: f64, y: f64) -> Result<f64> {
        let j = self.jet(t, lambda, y)?;
        Ok(laplacian_jet(&j, self.coord, y).value())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    struct Mu;
    impl GenericField for Mu {
        fn eval<S: Scalar>(&self, x: [S; 3]) -> Result<S> {
            Ok(x[2])
        }
    }

    #[test]
    fn laplacian_of_mu_is_minus_two_mu() {
        let s = AnalyticSolution::new("mu", Frame::Rest, Domain::Global, VerticalCoord::Mu, Arc::new(Mu));
        let z = s.vorticity_jet(0.0, 0.3, 0.4).unwrap();
        assert!((z.value() + 0.8).abs() < 1e-15);
        assert!((z.d1(2) + 2.0).abs() < 1e-14);
        assert!(!s.has_analytic_vorticity());
    }

    #[test]
    fn theta_laplacian_of_cos_theta() {
        let s = AnalyticSolution::new("cos", Frame::Rest, Domain::Global, VerticalCoord::Theta, Arc::new(CosTheta));
        let th = 1.1;
        let z = s.vorticity_jet(0.0, 0.0, th).unwrap();
        assert!((z.value() + 2.0 * th.cos()).abs() < 1e-14);
    }

    struct CosTheta;
    impl GenericField for CosTheta {
        fn eval<S: Scalar>(&self, x: [S; 3]) -> Result<S> {
            Ok(x[2].cos())
        }
    }

    #[test]
    fn band_domain_rejects_polar_points() {
        let d = Domain::Band { delta: 1e-3 };
        assert!(d.check(VerticalCoord::Mu, 0.998).is_ok());
        assert!(matches!(d.check(VerticalCoord::Mu, 0.9995), Err(Error::Domain(_))));
        assert!(d.check(VerticalCoord::Theta, 0.01).is_err());
        assert!(Domain::Global.check(VerticalCoord::Mu, 1.0).is_ok());
    }
}
