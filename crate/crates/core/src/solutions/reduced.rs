//! Solutions v(p, q) of the equations obtained by reducing the vorticity
//! equation with one-dimensional subalgebras: p plays the role of a
//! longitude-like invariant and q = μ.
//!
//! Jets of reduced solutions use variable 1 for p and variable 2 for q, so
//! [`laplacian_jet`] with [`VerticalCoord::Mu`] gives
//! w = v_pp/(1−q²) + ((1−q²)v_q)_q.

use std::sync::Arc;

use num_complex::Complex64;

use super::{finite, finite_jet, laplacian_jet, Domain, VerticalCoord};
use crate::error::{Error, Result};
use crate::jet::{Jet, Scalar};
use crate::sphere::legendre::assoc_legendre_scalar;

/// A function of (p, q) evaluated on plain values and on jets.
pub trait ReducedField: Send + Sync {
    fn eval<S: Scalar>(&self, p: S, q: S) -> Result<S>;
}

trait DynReduced: Send + Sync {
    fn value(&self, p: f64, q: f64) -> Result<f64>;
    fn jet(&self, p: f64, q: f64) -> Result<Jet>;
}

impl<T: ReducedField> DynReduced for T {
    fn value(&self, p: f64, q: f64) -> Result<f64> {
        finite(self.eval(p, q)?)
    }
    fn jet(&self, p: f64, q: f64) -> Result<Jet> {
        let [_, jp, jq] = Jet::variables([0.0, p, q]);
        finite_jet(self.eval(jp, jq)?)
    }
}

#[derive(Clone)]
pub struct ReducedSolution {
    pub name: String,
    pub domain: Domain,
    field: Arc<dyn DynReduced>,
}

impl std::fmt::Debug for ReducedSolution {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ReducedSolution")
            .field("name", &self.name)
            .field("domain", &self.domain)
            .finish()
    }
}

impl ReducedSolution {
    pub fn new(name: impl Into<String>, domain: Domain, field: impl ReducedField + 'static) -> Self {
        ReducedSolution {
            name: name.into(),
            domain,
            field: Arc::new(field),
        }
    }

    pub fn v(&self, p: f64, q: f64) -> Result<f64> {
        self.domain.check(VerticalCoord::Mu, q)?;
        self.field.value(p, q)
    }

    /// Third-order jet in (·, p, q).
    pub fn jet(&self, p: f64, q: f64) -> Result<Jet> {
        self.domain.check(VerticalCoord::Mu, q)?;
        self.field.jet(p, q)
    }

    /// w = Δv as a first-order-exact jet.
    pub fn w_jet(&self, p: f64, q: f64) -> Result<Jet> {
        Ok(laplacian_jet(&self.jet(p, q)?, VerticalCoord::Mu, q))
    }
}

#[derive(Clone, Copy, Debug)]
enum ParticularCase {
    /// −b/c − caq/(c+2)
    Generic,
    /// −(b/2) ln|1−q²|
    Zero,
    /// b/2 + (a/3) q ln|1−q²|
    MinusTwo,
}

#[derive(Clone, Copy, Debug)]
struct Particular {
    a: f64,
    b: f64,
    c: f64,
    case: ParticularCase,
}

impl Particular {
    fn new(a: f64, b: f64, c: f64) -> Self {
        let case = if c == 0.0 {
            ParticularCase::Zero
        } else if c == -2.0 {
            ParticularCase::MinusTwo
        } else {
            ParticularCase::Generic
        };
        Particular { a, b, c, case }
    }

    fn eval<S: Scalar>(&self, q: S) -> S {
        let Particular { a, b, c, case } = *self;
        match case {
            ParticularCase::Generic => q * (-c * a / (c + 2.0)) + (-b / c),
            ParticularCase::Zero => ((q * q) * -1.0 + 1.0).ln_abs() * (-b / 2.0),
            ParticularCase::MinusTwo => q * ((q * q) * -1.0 + 1.0).ln_abs() * (a / 3.0) + b / 2.0,
        }
    }
}

impl ReducedField for Particular {
    fn eval<S: Scalar>(&self, _p: S, q: S) -> Result<S> {
        Ok(Particular::eval(self, q))
    }
}

/// Zonal particular solution of the linear equation
/// v_pp/(1−q²) + ((1−q²)v_q)_q = cv + caq + b.
pub fn linear_reduced_particular(a: f64, b: f64, c: f64) -> ReducedSolution {
    ReducedSolution::new(
        format!("linear-particular(a={a}, b={b}, c={c})"),
        Domain::Band { delta: 0.0 },
        Particular::new(a, b, c),
    )
}

/// Degree ν of a Legendre function; only degrees with real ν(ν+1) are
/// admitted (real ν, or ν = −1/2 + iτ).
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum LegendreDegree {
    Integer(usize),
    Real(f64),
    Complex { re: f64, im: f64 },
}

impl LegendreDegree {
    /// c = −ν(ν+1).
    pub fn separation_constant(&self) -> Result<f64> {
        match *self {
            LegendreDegree::Integer(n) => Ok(-((n * (n + 1)) as f64)),
            LegendreDegree::Real(nu) => Ok(-nu * (nu + 1.0)),
            LegendreDegree::Complex { re, im } => {
                if im == 0.0 {
                    Ok(-re * (re + 1.0))
                } else if (re + 0.5).abs() < 1e-14 {
                    Ok(0.25 + im * im)
                } else {
                    Err(Error::InvalidArgument(format!(
                        "degree {re}{im:+}i gives a complex separation constant"
                    )))
                }
            }
        }
    }

    fn integer(&self) -> Option<usize> {
        match *self {
            LegendreDegree::Integer(n) => Some(n),
            LegendreDegree::Real(nu) | LegendreDegree::Complex { re: nu, im: 0.0 }
                if nu >= 0.0 && nu.fract() == 0.0 =>
            {
                Some(nu as usize)
            }
            _ => None,
        }
    }
}

/// Ferrers function P_ν^m(x) on (−1, 1] (Condon–Shortley phase) from the
/// hypergeometric series in z = (1 − x)/2, written in terms of c = −ν(ν+1)
/// so that (−ν)_k (ν+1)_k = Π (j² + j + c) stays real.
fn ferrers<S: Scalar>(c: f64, m: usize, x: S) -> Result<S> {
    if x.value() <= -1.0 {
        return Err(Error::Domain(format!(
            "non-integer Legendre function is singular at q = {}",
            x.value()
        )));
    }
    let z = (x * -1.0 + 1.0) * 0.5;
    let zv = z.value().abs();
    let mut prefactor = 1.0;
    for j in 0..m {
        let jf = j as f64;
        prefactor *= (jf * jf + jf + c) / (jf + 1.0) * 0.5;
    }
    let mut term = S::cst(1.0);
    let mut sum = S::cst(1.0);
    let mut scale = 1.0f64;
    let mut k = 0usize;
    loop {
        let s = (m + k) as f64;
        let ratio = (s * s + s + c) / ((s + 1.0) * (k as f64 + 1.0));
        term = term * z * ratio;
        sum = sum + term;
        scale *= ratio.abs() * zv;
        k += 1;
        if ratio == 0.0 || (scale < 1e-18 && k > 3) {
            break;
        }
        if k > 200_000 {
            return Err(Error::IllConditioned(format!(
                "Legendre series did not converge at q = {}",
                x.value()
            )));
        }
    }
    let one_minus = (x * x) * -1.0 + 1.0;
    let factor = if m == 0 {
        S::cst(1.0)
    } else {
        one_minus.powf(m as f64 / 2.0)
    };
    // (−1)^m from the phase times (−1/2)^m from d/dx = −½ d/dz.
    Ok(factor * sum * prefactor)
}

struct LegendreMode {
    degree: Option<usize>,
    c: f64,
    m: usize,
    amp: Complex64,
    particular: Particular,
}

impl ReducedField for LegendreMode {
    fn eval<S: Scalar>(&self, p: S, q: S) -> Result<S> {
        let radial = match self.degree {
            Some(n) => assoc_legendre_scalar(n, self.m, q),
            None => ferrers(self.c, self.m, q)?,
        };
        let arg = p * self.m as f64;
        let phase = arg.cos() * self.amp.re - arg.sin() * self.amp.im;
        Ok(phase * radial + self.particular.eval(q))
    }
}

/// v(p, q) = Re(A e^{imp} P_ν^m(q)) plus the zonal particular term of the
/// linear equation with b = 0. Requires c = −ν(ν+1). A non-integer degree
/// is singular at q = −1, so requesting a global solution fails.
pub fn legendre_mode_solution(
    degree: LegendreDegree,
    m: usize,
    amplitude: Complex64,
    a: f64,
    c: f64,
    global: bool,
) -> Result<ReducedSolution> {
    let c_deg = degree.separation_constant()?;
    if (c_deg - c).abs() > 1e-9 * (1.0 + c.abs()) {
        return Err(Error::InvalidArgument(format!(
            "c = {c} does not match -nu(nu+1) = {c_deg}"
        )));
    }
    let n = degree.integer();
    if global && n.is_none() {
        return Err(Error::Validity(format!(
            "degree {degree:?} is not an integer; the Legendre function is singular at a pole"
        )));
    }
    if let Some(n) = n {
        if m > n {
            return Err(Error::InvalidArgument(format!("order m={m} exceeds degree n={n}")));
        }
    }
    let domain = if global {
        Domain::Global
    } else {
        Domain::Band { delta: 1e-3 }
    };
    Ok(ReducedSolution::new(
        format!("legendre-mode({degree:?}, m={m})"),
        domain,
        LegendreMode {
            degree: n,
            c,
            m,
            amp: amplitude,
            particular: Particular::new(a, 0.0, c),
        },
    ))
}
