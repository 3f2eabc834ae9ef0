//! The family integrated by quadratures,
//! ψ = g(t)λ + f(t) + h(t) atanh μ + ∫_0^μ W(s − G(t))/(1 − s²) ds,
//! with W(γ) = ∫_0^γ w and G = ∫ g dt, and its image under a quarter turn
//! about the J2 axis.

use std::sync::Arc;

use super::profile::Profile;
use super::{AnalyticSolution, Domain, GenericField, VerticalCoord};
use crate::error::{Error, Result};
use crate::frame::Frame;
use crate::jet::{Jet, Scalar, MONOMIALS, NCOEF};
use crate::numerics::adaptive_simpson_vec;
use crate::symmetry::transform::{platzman, transform_solution, PlatzmanDirection};

const QUAD_TOL: f64 = 1e-12;

#[derive(Clone, Debug)]
pub struct ArctanhParams {
    pub g: Profile,
    pub f: Profile,
    pub h: Profile,
    pub w: Profile,
    /// Half-width of the excluded polar caps, |μ| ≤ 1 − δ.
    pub delta: f64,
    /// Frame of the returned solution; the family itself lives in the rest
    /// frame and is carried over by the Platzman map.
    pub frame: Frame,
    /// Request a globally valid solution (fails unless g ≡ 0).
    pub global: bool,
}

impl Default for ArctanhParams {
    fn default() -> Self {
        ArctanhParams {
            g: Profile::zero(),
            f: Profile::zero(),
            h: Profile::zero(),
            w: Profile::zero(),
            delta: 1e-3,
            frame: Frame::Rest,
            global: false,
        }
    }
}

struct ArctanhField {
    g: Profile,
    f: Profile,
    h: Profile,
    w: Profile,
}

impl ArctanhField {
    /// G(t) = ∫ g dt as a jet in t.
    fn big_g<S: Scalar>(&self, t: S) -> Result<S> {
        self.g.apply_antiderivative(t)
    }

    /// ∫_0^μ w^{(k)}(s − G)/(1 − s²) ds for k = −1 (W itself), 0, 1, 2.
    fn integrals(&self, mu: f64, g0: f64, need_t: bool) -> [f64; 4] {
        if self.w.is_zero() {
            return [0.0; 4];
        }
        let w = &self.w;
        if need_t {
            adaptive_simpson_vec(
                |s| {
                    let d = w.derivs(s - g0);
                    let r = 1.0 / (1.0 - s * s);
                    [w.antiderivative(s - g0) * r, d[0] * r, d[1] * r, d[2] * r]
                },
                0.0,
                mu,
                QUAD_TOL,
            )
        } else {
            let v = adaptive_simpson_vec(
                |s| [w.antiderivative(s - g0) / (1.0 - s * s)],
                0.0,
                mu,
                QUAD_TOL,
            );
            [v[0], 0.0, 0.0, 0.0]
        }
    }

    fn quadrature_value(&self, t: f64, mu: f64) -> Result<f64> {
        let g0 = self.g.antiderivative(t);
        Ok(self.integrals(mu, g0, false)[0])
    }

    /// Jet of the double-quadrature term in (t, λ, μ).
    fn quadrature_jet(&self, t0: f64, mu0: f64) -> Result<Jet> {
        if self.w.is_zero() {
            return Ok(Jet::constant(0.0));
        }
        let [t, _, mu] = Jet::variables([t0, 0.0, mu0]);
        let big_g = self.big_g(t)?;
        // ∂_μ of the term: W(μ − G(t))/(1 − μ²), exact in closed form.
        let arg = mu - big_g;
        let w_outer = self.w.apply_antiderivative(arg)?;
        let q_mu = w_outer / ((mu * mu) * -1.0 + 1.0);

        let gd = self.g.derivs(t0);
        let need_t = !self.g.is_zero();
        let i = self.integrals(mu0, big_g.value(), need_t);
        let (g, g1, g2) = (gd[0], gd[1], gd[2]);
        let pure_t = [
            i[0],
            -g * i[1],
            -g1 * i[1] + g * g * i[2],
            -g2 * i[1] + 3.0 * g * g1 * i[2] - g * g * g * i[3],
        ];
        let factorial = [1.0, 1.0, 2.0, 6.0];
        let mut c = [0.0; NCOEF];
        for (k, e) in MONOMIALS.iter().enumerate() {
            if e[1] != 0 {
                continue;
            }
            if e[2] == 0 {
                c[k] = pure_t[e[0] as usize] / factorial[e[0] as usize];
            } else {
                c[k] = q_mu.coeff([e[0], 0, e[2] - 1]) / e[2] as f64;
            }
        }
        Ok(Jet::from_coefficients(c))
    }

    fn explicit<S: Scalar>(&self, x: [S; 3]) -> Result<S> {
        let [t, l, mu] = x;
        let mut acc = self.f.apply(t)? + self.h.apply(t)? * mu.atanh();
        if !self.g.is_zero() {
            acc = acc + self.g.apply(t)? * l;
        }
        Ok(acc)
    }
}

impl ArctanhField {
    /// ζ = w(μ − G(t)).
    fn vorticity<S: Scalar>(&self, x: [S; 3]) -> Result<S> {
        let gamma = x[2] - self.big_g(x[0])?;
        self.w.apply(gamma)
    }
}

// The quadrature term is not expressible through `Scalar`, so the field
// implements the object trait by hand.
struct ArctanhSolution(ArctanhField);

impl super::StreamFunction for ArctanhSolution {
    fn value(&self, x: [f64; 3]) -> Result<f64> {
        let v = self.0.explicit(x)? + self.0.quadrature_value(x[0], x[2])?;
        super::finite(v)
    }

    fn jet(&self, x: [f64; 3]) -> Result<Jet> {
        let j = self.0.explicit(Jet::variables(x))? + self.0.quadrature_jet(x[0], x[2])?;
        super::finite_jet(j)
    }

    fn has_vorticity(&self) -> bool {
        true
    }

    fn vorticity_jet(&self, x: [f64; 3]) -> Result<Jet> {
        super::finite_jet(self.0.vorticity(Jet::variables(x))?)
    }
}

/// Builds the family member for the given profiles.
pub fn arctanh_family(params: ArctanhParams) -> Result<AnalyticSolution> {
    if !(params.delta > 0.0 && params.delta < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "band half-width delta must lie in (0, 1), got {}",
            params.delta
        )));
    }
    let g_zero = params.g.is_zero();
    if params.global && !g_zero {
        return Err(Error::Topology(
            "g(t)λ is multivalued on the sphere; a nonzero g needs a single longitude chart".into(),
        ));
    }
    let domain = if g_zero {
        Domain::Band {
            delta: params.delta,
        }
    } else {
        Domain::Chart {
            delta: params.delta,
        }
    };
    let field = ArctanhField {
        g: params.g,
        f: params.f,
        h: params.h,
        w: params.w,
    };
    let rest = AnalyticSolution::new(
        "arctanh",
        Frame::Rest,
        domain,
        VerticalCoord::Mu,
        Arc::new(ArctanhSolution(field)),
    );
    match params.frame {
        Frame::Rest => Ok(rest),
        Frame::Rotating { omega } => {
            let mut s = transform_solution(&rest, &platzman(PlatzmanDirection::ToRotating, omega))?;
            s.name = "arctanh".into();
            s.domain = domain;
            Ok(s)
        }
    }
}

struct RotatedField {
    f: Profile,
    h: Profile,
    big_w: Profile,
    limit: f64,
}

impl RotatedField {
    fn kappa<S: Scalar>(&self, x: [S; 3]) -> Result<S> {
        let k = ((x[2] * x[2]) * -1.0 + 1.0).sqrt() * x[1].cos();
        if !(k.value().abs() <= self.limit) {
            return Err(Error::Domain(format!(
                "|sqrt(1-mu^2) cos(lambda)| = {} too close to the singular circle",
                k.value().abs()
            )));
        }
        Ok(k)
    }
}

impl GenericField for RotatedField {
    const HAS_VORTICITY: bool = true;

    fn eval<S: Scalar>(&self, x: [S; 3]) -> Result<S> {
        let k = self.kappa(x)?;
        Ok(self.f.apply(x[0])? - self.h.apply(x[0])? * k.atanh() + self.big_w.apply(k)?)
    }

    fn vorticity<S: Scalar>(&self, x: [S; 3]) -> Result<S> {
        // The Laplacian is rotation invariant: Δ F(κ) = ((1 − κ²) F′)′.
        let k = self.kappa(x)?;
        let d = self.big_w.derivs(k.value());
        let w1 = k.lift([d[1], d[2], d[3], 0.0]);
        let w2 = k.lift([d[2], d[3], 0.0, 0.0]);
        Ok(((k * k) * -1.0 + 1.0) * w2 - k * w1 * 2.0)
    }
}

/// ψ = f(t) − h(t) atanh(√(1−μ²) cos λ) + W(√(1−μ²) cos λ), rest frame,
/// valid away from the circle where the argument reaches ±1.
pub fn rotated_arctanh(f: Profile, h: Profile, big_w: Profile, delta: f64) -> Result<AnalyticSolution> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "delta must lie in (0, 1), got {delta}"
        )));
    }
    Ok(AnalyticSolution::new(
        "rotated-arctanh",
        Frame::Rest,
        Domain::Transformed,
        VerticalCoord::Mu,
        Arc::new(RotatedField {
            f,
            h,
            big_w,
            limit: 1.0 - delta,
        }),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(g: &str, f: &str, h: &str, w: &str) -> ArctanhParams {
        ArctanhParams {
            g: Profile::parse(g).unwrap(),
            f: Profile::parse(f).unwrap(),
            h: Profile::parse(h).unwrap(),
            w: Profile::parse(w).unwrap(),
            ..Default::default()
        }
    }

    #[test]
    fn pure_arctanh() {
        let s = arctanh_family(params("zero", "zero", "const:1", "zero")).unwrap();
        assert!((s.psi(1.0, 0.0, 0.5).unwrap() - 0.5f64.atanh()).abs() < 1e-15);
        assert_eq!(s.zeta(1.0, 0.0, 0.5).unwrap(), 0.0);
        assert!(s.zeta_from_psi(1.0, 0.0, 0.5).unwrap().abs() < 1e-13);
    }

    #[test]
    fn linear_vorticity_closed_form() {
        let s = arctanh_family(params("zero", "zero", "zero", "identity")).unwrap();
        for mu in [-0.9, -0.3, 0.2, 0.7] {
            let expect = (f64::atanh(mu) - mu) / 2.0;
            assert!((s.psi(0.5, 1.0, mu).unwrap() - expect).abs() < 1e-11);
            assert!((s.zeta(0.5, 1.0, mu).unwrap() - mu).abs() < 1e-15);
            assert!((s.zeta_from_psi(0.5, 1.0, mu).unwrap() - mu).abs() < 1e-9);
        }
    }

    #[test]
    fn drifting_vorticity() {
        let s = arctanh_family(params("const:1", "zero", "zero", "identity")).unwrap();
        assert_eq!(s.domain, Domain::Chart { delta: 1e-3 });
        let j = s.jet(0.8, 0.3, 0.4).unwrap();
        // ζ = μ − t
        let z = s.zeta(0.8, 0.3, 0.4).unwrap();
        assert!((z - (0.4 - 0.8)).abs() < 1e-15);
        let zp = s.zeta_from_psi(0.8, 0.3, 0.4).unwrap();
        assert!((zp - z).abs() < 1e-9);
        // ψ_λ = g = 1
        assert!((j.d1(1) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn quadrature_jet_matches_differences() {
        let s = arctanh_family(params("power:1:0.5", "const:0.2", "power:-1", "sin:2:1")).unwrap();
        let (t, l, mu) = (1.3, 0.4, 0.35);
        let j = s.jet(t, l, mu).unwrap();
        let h = 1e-3;
        let f = |dt: f64, dm: f64| s.psi(t + dt, l, mu + dm).unwrap();
        let dt = (f(h, 0.0) - f(-h, 0.0)) / (2.0 * h);
        let dtt = (f(h, 0.0) - 2.0 * f(0.0, 0.0) + f(-h, 0.0)) / (h * h);
        let dtm = (f(h, h) - f(h, -h) - f(-h, h) + f(-h, -h)) / (4.0 * h * h);
        assert!((j.d1(0) - dt).abs() < 1e-6, "{} {}", j.d1(0), dt);
        assert!((j.d2(0, 0) - dtt).abs() < 1e-5, "{} {}", j.d2(0, 0), dtt);
        assert!((j.d2(0, 2) - dtm).abs() < 1e-5);
        let dttt = (f(2.0 * h, 0.0) - 2.0 * f(h, 0.0) + 2.0 * f(-h, 0.0) - f(-2.0 * h, 0.0))
            / (2.0 * h * h * h);
        assert!((j.d3(0, 0, 0) - dttt).abs() < 1e-3, "{} {}", j.d3(0, 0, 0), dttt);
    }

    #[test]
    fn domain_and_topology_errors() {
        let s = arctanh_family(params("zero", "zero", "const:1", "zero")).unwrap();
        assert!(matches!(s.psi(0.0, 0.0, 0.9995), Err(Error::Domain(_))));
        let mut p = params("const:1", "zero", "zero", "zero");
        p.global = true;
        assert!(matches!(arctanh_family(p), Err(Error::Topology(_))));
    }

    #[test]
    fn rotated_examples() {
        let s = rotated_arctanh(Profile::power(-1.0, 2.0), Profile::zero(), Profile::zero(), 1e-3).unwrap();
        assert!((s.psi(4.0, 0.3, 0.2).unwrap() - 0.5).abs() < 1e-15);
        let s = rotated_arctanh(Profile::zero(), Profile::constant(1.0), Profile::zero(), 1e-3).unwrap();
        assert!(s.psi(1.0, std::f64::consts::FRAC_PI_2, 0.3).unwrap().abs() < 1e-15);
        assert!(matches!(s.psi(1.0, 0.0, 0.0), Err(Error::Domain(_))));
        let s = rotated_arctanh(Profile::zero(), Profile::zero(), Profile::power(3.0, 1.0), 1e-3).unwrap();
        let a = s.zeta(0.0, 0.7, 0.1).unwrap();
        let b = s.zeta_from_psi(0.0, 0.7, 0.1).unwrap();
        assert!((a - b).abs() < 1e-12);
    }
}
