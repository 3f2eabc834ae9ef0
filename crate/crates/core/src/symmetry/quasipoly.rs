//! Quasi-polynomials in t: finite sums of
//! c · t^k · |t|^α · (ln|t|)^j · e^{βt} · {1, cos νt, sin νt, cos(ν ln|t|), sin(ν ln|t|)},
//! closed under d/dt and multiplication by t.

use std::fmt;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Oscillation {
    None,
    Cos(f64),
    Sin(f64),
    CosLog(f64),
    SinLog(f64),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Term {
    pub c: f64,
    pub k: i32,
    pub alpha: f64,
    pub j: u32,
    pub beta: f64,
    pub osc: Oscillation,
}

impl Term {
    pub fn monomial(c: f64, k: i32) -> Self {
        Term {
            c,
            k,
            alpha: 0.0,
            j: 0,
            beta: 0.0,
            osc: Oscillation::None,
        }
    }

    fn with(self, c: f64) -> Self {
        Term { c, ..self }
    }

    pub fn value(&self, t: f64) -> f64 {
        if self.c == 0.0 {
            return 0.0;
        }
        let at = t.abs();
        let tau = at.ln();
        let mut v = self.c * t.powi(self.k);
        if self.alpha != 0.0 {
            v *= at.powf(self.alpha);
        }
        if self.j > 0 {
            v *= tau.powi(self.j as i32);
        }
        if self.beta != 0.0 {
            v *= (self.beta * t).exp();
        }
        v * match self.osc {
            Oscillation::None => 1.0,
            Oscillation::Cos(nu) => (nu * t).cos(),
            Oscillation::Sin(nu) => (nu * t).sin(),
            Oscillation::CosLog(nu) => (nu * tau).cos(),
            Oscillation::SinLog(nu) => (nu * tau).sin(),
        }
    }

    /// Uses t′ = 1, (|t|^α)′ = α t⁻¹|t|^α, (ln|t|)′ = t⁻¹.
    fn derivative(&self, out: &mut Vec<Term>) {
        let c = self.c;
        let shifted = Term {
            k: self.k - 1,
            ..*self
        };
        if self.k != 0 {
            out.push(shifted.with(c * self.k as f64));
        }
        if self.alpha != 0.0 {
            out.push(shifted.with(c * self.alpha));
        }
        if self.j > 0 {
            out.push(Term {
                j: self.j - 1,
                ..shifted.with(c * self.j as f64)
            });
        }
        if self.beta != 0.0 {
            out.push(self.with(c * self.beta));
        }
        match self.osc {
            Oscillation::None => {}
            Oscillation::Cos(nu) => out.push(Term {
                osc: Oscillation::Sin(nu),
                ..self.with(-c * nu)
            }),
            Oscillation::Sin(nu) => out.push(Term {
                osc: Oscillation::Cos(nu),
                ..self.with(c * nu)
            }),
            Oscillation::CosLog(nu) => out.push(Term {
                osc: Oscillation::SinLog(nu),
                ..shifted.with(-c * nu)
            }),
            Oscillation::SinLog(nu) => out.push(Term {
                osc: Oscillation::CosLog(nu),
                ..shifted.with(c * nu)
            }),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct QuasiPoly {
    pub terms: Vec<Term>,
}

impl QuasiPoly {
    pub fn new(terms: Vec<Term>) -> Self {
        QuasiPoly { terms }.simplified()
    }

    pub fn zero() -> Self {
        QuasiPoly::default()
    }

    pub fn constant(c: f64) -> Self {
        QuasiPoly::new(vec![Term::monomial(c, 0)])
    }

    /// c · t^k.
    pub fn monomial(c: f64, k: i32) -> Self {
        QuasiPoly::new(vec![Term::monomial(c, k)])
    }

    /// t^k e^{λt}.
    pub fn exp_poly(k: i32, lambda: f64) -> Self {
        QuasiPoly::new(vec![Term {
            beta: lambda,
            ..Term::monomial(1.0, k)
        }])
    }

    /// t^l e^{μt} cos νt (or sin νt).
    pub fn exp_trig(l: i32, mu: f64, nu: f64, sine: bool) -> Self {
        let osc = if sine {
            Oscillation::Sin(nu)
        } else {
            Oscillation::Cos(nu)
        };
        QuasiPoly::new(vec![Term {
            beta: mu,
            osc,
            ..Term::monomial(1.0, l)
        }])
    }

    /// (ln|t|)^k |t|^λ.
    pub fn log_power(k: u32, lambda: f64) -> Self {
        QuasiPoly::new(vec![Term {
            alpha: lambda,
            j: k,
            ..Term::monomial(1.0, 0)
        }])
    }

    /// (ln|t|)^l |t|^μ cos(ν ln|t|) (or sin).
    pub fn log_trig(l: u32, mu: f64, nu: f64, sine: bool) -> Self {
        let osc = if sine {
            Oscillation::SinLog(nu)
        } else {
            Oscillation::CosLog(nu)
        };
        QuasiPoly::new(vec![Term {
            alpha: mu,
            j: l,
            osc,
            ..Term::monomial(1.0, 0)
        }])
    }

    /// Merges terms that differ only in the coefficient and drops zeros.
    fn simplified(self) -> Self {
        let mut out: Vec<Term> = Vec::with_capacity(self.terms.len());
        for t in self.terms {
            match out.iter_mut().find(|o| o.with(0.0) == t.with(0.0)) {
                Some(o) => o.c += t.c,
                None => out.push(t),
            }
        }
        out.retain(|t| t.c != 0.0);
        QuasiPoly { terms: out }
    }

    pub fn value(&self, t: f64) -> f64 {
        self.terms.iter().map(|term| term.value(t)).sum()
    }

    pub fn derivative(&self) -> Self {
        let mut out = Vec::new();
        for t in &self.terms {
            t.derivative(&mut out);
        }
        QuasiPoly::new(out)
    }

    pub fn times_t(&self) -> Self {
        QuasiPoly::new(
            self.terms
                .iter()
                .map(|t| Term { k: t.k + 1, ..*t })
                .collect(),
        )
    }

    pub fn scale(&self, s: f64) -> Self {
        QuasiPoly::new(self.terms.iter().map(|t| t.with(t.c * s)).collect())
    }

    pub fn add(&self, other: &QuasiPoly) -> Self {
        let mut terms = self.terms.clone();
        terms.extend_from_slice(&other.terms);
        QuasiPoly::new(terms)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// True when the function is singular or undefined at t = 0.
    pub fn needs_nonzero_t(&self) -> bool {
        self.terms.iter().any(|t| {
            t.k < 0
                || t.alpha != 0.0
                || t.j > 0
                || matches!(t.osc, Oscillation::CosLog(_) | Oscillation::SinLog(_))
        })
    }
}

impl fmt::Display for QuasiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, t) in self.terms.iter().enumerate() {
            if i > 0 {
                f.write_str(" + ")?;
            }
            write!(f, "{}", t.c)?;
            if t.k != 0 {
                write!(f, "·t^{}", t.k)?;
            }
            if t.alpha != 0.0 {
                write!(f, "·|t|^{}", t.alpha)?;
            }
            if t.j > 0 {
                write!(f, "·ln|t|^{}", t.j)?;
            }
            if t.beta != 0.0 {
                write!(f, "·e^({}t)", t.beta)?;
            }
            match t.osc {
                Oscillation::None => {}
                Oscillation::Cos(nu) => write!(f, "·cos({nu}t)")?,
                Oscillation::Sin(nu) => write!(f, "·sin({nu}t)")?,
                Oscillation::CosLog(nu) => write!(f, "·cos({nu}ln|t|)")?,
                Oscillation::SinLog(nu) => write!(f, "·sin({nu}ln|t|)")?,
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn samples() -> Vec<QuasiPoly> {
        vec![
            QuasiPoly::monomial(2.0, 3),
            QuasiPoly::exp_poly(2, -0.7),
            QuasiPoly::exp_trig(1, 0.3, 2.0, false),
            QuasiPoly::exp_trig(0, -0.2, 1.5, true),
            QuasiPoly::log_power(2, 0.5),
            QuasiPoly::log_trig(1, -1.0, 0.8, false),
            QuasiPoly::log_trig(0, 0.4, 1.1, true),
            QuasiPoly::monomial(1.0, -1).add(&QuasiPoly::log_power(1, -1.0)),
        ]
    }

    #[test]
    fn derivative_matches_differences() {
        let h = 1e-5;
        for q in samples() {
            let d = q.derivative();
            for t in [0.6, 1.3, 1.9] {
                let fd = (q.value(t + h) - q.value(t - h)) / (2.0 * h);
                assert!((fd - d.value(t)).abs() < 1e-7 * (1.0 + fd.abs()), "{q} at {t}");
            }
        }
    }

    #[test]
    fn negative_t_uses_absolute_value() {
        let q = QuasiPoly::log_power(1, 0.5);
        let t: f64 = -2.0;
        assert!((q.value(t) - 2f64.ln() * 2f64.sqrt()).abs() < 1e-15);
        let h = 1e-5;
        let fd = (q.value(t + h) - q.value(t - h)) / (2.0 * h);
        assert!((fd - q.derivative().value(t)).abs() < 1e-8);
    }

    #[test]
    fn algebra() {
        let a = QuasiPoly::monomial(1.0, 2);
        assert_eq!(a.times_t(), QuasiPoly::monomial(1.0, 3));
        assert!(a.add(&a.scale(-1.0)).is_zero());
        assert_eq!(a.derivative(), QuasiPoly::monomial(2.0, 1));
        assert!(QuasiPoly::constant(3.0).derivative().is_zero());
        assert!(!a.needs_nonzero_t());
        assert!(QuasiPoly::log_power(0, 0.5).needs_nonzero_t());
    }
}
