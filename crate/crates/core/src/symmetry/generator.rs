//! Vector fields ξ^t∂t + ξ^λ∂λ + ξ^μ∂μ + η∂ψ on (t, λ, μ, ψ).

use std::fmt;
use std::sync::Arc;

use super::quasipoly::QuasiPoly;
use crate::error::Result;
use crate::jet::Scalar;
use crate::solutions::Profile;

/// A point (t, λ, μ, ψ).
pub type Point = [f64; 4];

/// Step of the central differences used for partials of generators that
/// are only known pointwise.
pub const FD_STEP: f64 = 1e-4;

/// The function g of Z(g) = g(t)∂ψ.
#[derive(Clone)]
pub enum ZFunction {
    /// g(e^{ε1} t + ε0) for a quasi-polynomial g; `derivs` caches g, g′, g″, g‴.
    Quasi {
        poly: QuasiPoly,
        derivs: Arc<[QuasiPoly; 4]>,
        scale: f64,
        shift: f64,
    },
    Profile(Profile),
}

impl ZFunction {
    pub fn quasi(poly: QuasiPoly) -> Self {
        ZFunction::quasi_affine(poly, 0.0, 0.0)
    }

    /// g(e^{ε1} t + ε0).
    pub fn quasi_affine(poly: QuasiPoly, eps0: f64, eps1: f64) -> Self {
        let d1 = poly.derivative();
        let d2 = d1.derivative();
        let d3 = d2.derivative();
        ZFunction::Quasi {
            derivs: Arc::new([poly.clone(), d1, d2, d3]),
            poly,
            scale: eps1.exp(),
            shift: eps0,
        }
    }

    pub fn poly(&self) -> Option<&QuasiPoly> {
        match self {
            ZFunction::Quasi { poly, .. } => Some(poly),
            ZFunction::Profile(_) => None,
        }
    }

    /// g, g′, g″, g‴ at t.
    pub fn derivs(&self, t: f64) -> [f64; 4] {
        match self {
            ZFunction::Quasi {
                derivs,
                scale,
                shift,
                ..
            } => {
                let s = scale * t + shift;
                [
                    derivs[0].value(s),
                    scale * derivs[1].value(s),
                    scale * scale * derivs[2].value(s),
                    scale * scale * scale * derivs[3].value(s),
                ]
            }
            ZFunction::Profile(p) => p.derivs(t),
        }
    }

    pub fn apply<S: Scalar>(&self, t: S) -> S {
        t.lift(self.derivs(t.value()))
    }

    /// The same function with t replaced by e^{ε1} t + ε0.
    pub fn reparametrized(&self, eps0: f64, eps1: f64) -> Option<ZFunction> {
        match self {
            ZFunction::Quasi {
                poly,
                derivs,
                scale,
                shift,
            } => Some(ZFunction::Quasi {
                poly: poly.clone(),
                derivs: derivs.clone(),
                scale: scale * eps1.exp(),
                shift: scale * eps0 + shift,
            }),
            ZFunction::Profile(_) => None,
        }
    }

    fn label(&self) -> String {
        match self {
            ZFunction::Quasi {
                poly, scale, shift, ..
            } => {
                if *scale == 1.0 && *shift == 0.0 {
                    format!("{poly}")
                } else {
                    format!("({poly})∘({scale}t+{shift})")
                }
            }
            ZFunction::Profile(p) => p.name().to_string(),
        }
    }
}

type PointFn = Arc<dyn Fn(Point) -> [f64; 4] + Send + Sync>;

#[derive(Clone)]
enum Kind {
    D,
    Dt,
    J1,
    J2,
    J3,
    Z(ZFunction),
    Sum(Vec<(f64, SymmetryGenerator)>),
    /// Known pointwise only; partials by central differences.
    Oracle(PointFn),
}

/// The closed-form flows available for a generator.
#[derive(Clone)]
pub enum Named {
    D,
    Dt,
    J1,
    J2,
    J3,
    Z(ZFunction),
}

#[derive(Clone)]
pub struct SymmetryGenerator {
    pub label: String,
    kind: Kind,
}

impl fmt::Debug for SymmetryGenerator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SymmetryGenerator({})", self.label)
    }
}

impl fmt::Display for SymmetryGenerator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label)
    }
}

/// One coefficient of a generator with its partials in (t, λ, μ, ψ).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Coefficient {
    pub value: f64,
    pub grad: [f64; 4],
}

impl SymmetryGenerator {
    fn new(label: impl Into<String>, kind: Kind) -> Self {
        SymmetryGenerator {
            label: label.into(),
            kind,
        }
    }

    /// D = t∂t − ψ∂ψ.
    pub fn d() -> Self {
        Self::new("D", Kind::D)
    }
    pub fn dt() -> Self {
        Self::new("∂t", Kind::Dt)
    }
    /// J1 = ∂λ.
    pub fn j1() -> Self {
        Self::new("J1", Kind::J1)
    }
    /// J2 = μ sin λ/√(1−μ²) ∂λ + √(1−μ²) cos λ ∂μ.
    pub fn j2() -> Self {
        Self::new("J2", Kind::J2)
    }
    /// J3 = μ cos λ/√(1−μ²) ∂λ − √(1−μ²) sin λ ∂μ.
    pub fn j3() -> Self {
        Self::new("J3", Kind::J3)
    }

    pub fn z(g: ZFunction) -> Self {
        Self::new(format!("Z({})", g.label()), Kind::Z(g))
    }

    pub fn z_poly(g: QuasiPoly) -> Self {
        Self::z(ZFunction::quasi(g))
    }

    /// Z(t^k).
    pub fn z_power(k: i32) -> Self {
        let mut g = Self::z_poly(QuasiPoly::monomial(1.0, k));
        g.label = match k {
            0 => "Z(1)".into(),
            1 => "Z(t)".into(),
            _ => format!("Z(t^{k})"),
        };
        g
    }

    pub fn z_profile(g: Profile) -> Self {
        Self::z(ZFunction::Profile(g))
    }

    /// A generator known only through its coefficient values.
    pub fn from_oracle(
        label: impl Into<String>,
        f: impl Fn(Point) -> [f64; 4] + Send + Sync + 'static,
    ) -> Self {
        Self::new(label, Kind::Oracle(Arc::new(f)))
    }

    /// Σ c_k X_k.
    pub fn linear_combination(terms: &[(f64, &SymmetryGenerator)]) -> Self {
        let mut label = String::new();
        for (i, (c, g)) in terms.iter().enumerate() {
            if i > 0 {
                label.push_str(if *c < 0.0 { " - " } else { " + " });
            } else if *c < 0.0 {
                label.push('-');
            }
            let a = c.abs();
            if a != 1.0 {
                label.push_str(&format!("{a}·"));
            }
            label.push_str(&g.label);
        }
        let terms = terms.iter().map(|(c, g)| (*c, (*g).clone())).collect();
        Self::new(label, Kind::Sum(terms))
    }

    pub fn plus(&self, other: &SymmetryGenerator) -> Self {
        Self::linear_combination(&[(1.0, self), (1.0, other)])
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self::linear_combination(&[(c, self)])
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    /// The generator if it has a closed-form flow.
    pub fn named(&self) -> Option<Named> {
        Some(match &self.kind {
            Kind::D => Named::D,
            Kind::Dt => Named::Dt,
            Kind::J1 => Named::J1,
            Kind::J2 => Named::J2,
            Kind::J3 => Named::J3,
            Kind::Z(g) => Named::Z(g.clone()),
            Kind::Sum(terms) if terms.len() == 1 => {
                let (c, g) = &terms[0];
                if *c == 1.0 {
                    return g.named();
                }
                return None;
            }
            _ => return None,
        })
    }

    /// The function g when this generator is Z(g).
    pub fn z_function(&self) -> Option<&ZFunction> {
        match &self.kind {
            Kind::Z(g) => Some(g),
            _ => None,
        }
    }

    /// (ξ^t, ξ^λ, ξ^μ, η) at x.
    pub fn values(&self, x: Point) -> [f64; 4] {
        let [t, l, mu, psi] = x;
        match &self.kind {
            Kind::D => [t, 0.0, 0.0, -psi],
            Kind::Dt => [1.0, 0.0, 0.0, 0.0],
            Kind::J1 => [0.0, 1.0, 0.0, 0.0],
            Kind::J2 => {
                let s = (1.0 - mu * mu).sqrt();
                [0.0, mu * l.sin() / s, s * l.cos(), 0.0]
            }
            Kind::J3 => {
                let s = (1.0 - mu * mu).sqrt();
                [0.0, mu * l.cos() / s, -s * l.sin(), 0.0]
            }
            Kind::Z(g) => [0.0, 0.0, 0.0, g.derivs(t)[0]],
            Kind::Sum(terms) => {
                let mut out = [0.0; 4];
                for (c, g) in terms {
                    let v = g.values(x);
                    for i in 0..4 {
                        out[i] += c * v[i];
                    }
                }
                out
            }
            Kind::Oracle(f) => f(x),
        }
    }

    /// J[i][j] = ∂_j of coefficient i; exact except for pointwise oracles.
    pub fn jacobian(&self, x: Point) -> [[f64; 4]; 4] {
        let [t, l, mu, _] = x;
        let mut jac = [[0.0; 4]; 4];
        match &self.kind {
            Kind::D => {
                jac[0][0] = 1.0;
                jac[3][3] = -1.0;
            }
            Kind::Dt | Kind::J1 => {}
            Kind::J2 => {
                let s = (1.0 - mu * mu).sqrt();
                let (sn, cs) = l.sin_cos();
                jac[1][1] = mu * cs / s;
                jac[1][2] = sn / (s * s * s);
                jac[2][1] = -s * sn;
                jac[2][2] = -mu * cs / s;
            }
            Kind::J3 => {
                let s = (1.0 - mu * mu).sqrt();
                let (sn, cs) = l.sin_cos();
                jac[1][1] = -mu * sn / s;
                jac[1][2] = cs / (s * s * s);
                jac[2][1] = -s * cs;
                jac[2][2] = mu * sn / s;
            }
            Kind::Z(g) => jac[3][0] = g.derivs(t)[1],
            Kind::Sum(terms) => {
                for (c, g) in terms {
                    let m = g.jacobian(x);
                    for i in 0..4 {
                        for j in 0..4 {
                            jac[i][j] += c * m[i][j];
                        }
                    }
                }
            }
            Kind::Oracle(f) => {
                for j in 0..4 {
                    let mut xp = x;
                    let mut xm = x;
                    xp[j] += FD_STEP;
                    xm[j] -= FD_STEP;
                    let (vp, vm) = (f(xp), f(xm));
                    for i in 0..4 {
                        jac[i][j] = (vp[i] - vm[i]) / (2.0 * FD_STEP);
                    }
                }
            }
        }
        jac
    }

    /// Coefficient `i` (0 = ξ^t, 1 = ξ^λ, 2 = ξ^μ, 3 = η) with its partials.
    pub fn coefficient(&self, i: usize, x: Point) -> Coefficient {
        Coefficient {
            value: self.values(x)[i],
            grad: self.jacobian(x)[i],
        }
    }

    /// True when the coefficients are exact closed forms (no differences).
    pub fn is_exact(&self) -> bool {
        match &self.kind {
            Kind::Oracle(_) => false,
            Kind::Sum(terms) => terms.iter().all(|(_, g)| g.is_exact()),
            _ => true,
        }
    }

    pub fn applies_at(&self, x: Point) -> Result<()> {
        if self.values(x).iter().all(|v| v.is_finite()) {
            Ok(())
        } else {
            Err(crate::error::Error::Domain(format!(
                "{} is not defined at {x:?}",
                self.label
            )))
        }
    }
}

/// D, ∂t, J1, J2, J3.
pub fn standard_generators() -> Vec<SymmetryGenerator> {
    vec![
        SymmetryGenerator::d(),
        SymmetryGenerator::dt(),
        SymmetryGenerator::j1(),
        SymmetryGenerator::j2(),
        SymmetryGenerator::j3(),
    ]
}
