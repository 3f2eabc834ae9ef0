//! Named one-variable functions used as free data in the solution families
//! (g, f, h of time; w, W of γ; H of θ).

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::jet::Scalar;
use crate::numerics::adaptive_simpson;

type DerivFn = Arc<dyn Fn(f64) -> [f64; 4] + Send + Sync>;
type ValueFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

#[derive(Clone)]
enum Kind {
    Zero,
    Const(f64),
    /// c · x^k
    Power { k: f64, c: f64 },
    /// c · e^{r x}
    Exp { r: f64, c: f64 },
    /// c · sin(ω x)
    Sin { w: f64, c: f64 },
    /// c · cos(ω x)
    Cos { w: f64, c: f64 },
    Custom {
        derivs: DerivFn,
        antiderivative: Option<ValueFn>,
    },
}

/// A scalar function of one variable with its first three derivatives and an
/// antiderivative.
#[derive(Clone)]
pub struct Profile {
    name: String,
    kind: Kind,
}

impl fmt::Debug for Profile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Profile({})", self.name)
    }
}

impl fmt::Display for Profile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

fn fmt_num(v: f64) -> String {
    format!("{v}")
}

impl Profile {
    pub fn zero() -> Self {
        Profile {
            name: "zero".into(),
            kind: Kind::Zero,
        }
    }

    pub fn constant(v: f64) -> Self {
        Profile {
            name: format!("const:{}", fmt_num(v)),
            kind: Kind::Const(v),
        }
    }

    /// c · x^k.
    pub fn power(k: f64, c: f64) -> Self {
        let name = if c == 1.0 {
            format!("power:{}", fmt_num(k))
        } else {
            format!("power:{}:{}", fmt_num(k), fmt_num(c))
        };
        Profile {
            name,
            kind: Kind::Power { k, c },
        }
    }

    pub fn identity() -> Self {
        Profile {
            name: "identity".into(),
            kind: Kind::Power { k: 1.0, c: 1.0 },
        }
    }

    pub fn exp(r: f64, c: f64) -> Self {
        Profile {
            name: format!("exp:{}:{}", fmt_num(r), fmt_num(c)),
            kind: Kind::Exp { r, c },
        }
    }

    pub fn sin(w: f64, c: f64) -> Self {
        Profile {
            name: format!("sin:{}:{}", fmt_num(w), fmt_num(c)),
            kind: Kind::Sin { w, c },
        }
    }

    pub fn cos(w: f64, c: f64) -> Self {
        Profile {
            name: format!("cos:{}:{}", fmt_num(w), fmt_num(c)),
            kind: Kind::Cos { w, c },
        }
    }

    /// A caller-supplied function. `derivs(x)` returns the value and first
    /// three derivatives; without an antiderivative, ∫_0^x is computed by
    /// adaptive quadrature when needed.
    pub fn custom(
        name: impl Into<String>,
        derivs: impl Fn(f64) -> [f64; 4] + Send + Sync + 'static,
        antiderivative: Option<ValueFn>,
    ) -> Self {
        Profile {
            name: name.into(),
            kind: Kind::Custom {
                derivs: Arc::new(derivs),
                antiderivative,
            },
        }
    }

    /// Parses `zero`, `const:v`, `power:k[:c]`, `identity`, `exp:r[:c]`,
    /// `sin:w[:c]`, `cos:w[:c]`.
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        let mut parts = s.split(':');
        let head = parts.next().unwrap_or_default();
        let args: Vec<f64> = parts
            .map(|p| {
                p.trim()
                    .parse::<f64>()
                    .map_err(|e| Error::Parse(format!("profile `{s}`: {e}")))
            })
            .collect::<Result<_>>()?;
        let arity = |lo: usize, hi: usize| -> Result<()> {
            if args.len() < lo || args.len() > hi {
                Err(Error::Parse(format!(
                    "profile `{s}` expects {lo}..={hi} numeric arguments"
                )))
            } else {
                Ok(())
            }
        };
        let opt_c = |i: usize| args.get(i).copied().unwrap_or(1.0);
        match head {
            "zero" => arity(0, 0).map(|_| Profile::zero()),
            "identity" => arity(0, 0).map(|_| Profile::identity()),
            "const" => arity(1, 1).map(|_| Profile::constant(args[0])),
            "power" => arity(1, 2).map(|_| Profile::power(args[0], opt_c(1))),
            "exp" => arity(1, 2).map(|_| Profile::exp(args[0], opt_c(1))),
            "sin" => arity(1, 2).map(|_| Profile::sin(args[0], opt_c(1))),
            "cos" => arity(1, 2).map(|_| Profile::cos(args[0], opt_c(1))),
            _ => Err(Error::Parse(format!("unknown profile `{s}`"))),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// True when the function vanishes identically.
    pub fn is_zero(&self) -> bool {
        match self.kind {
            Kind::Zero => true,
            Kind::Const(v) => v == 0.0,
            Kind::Power { c, .. } | Kind::Exp { c, .. } | Kind::Sin { c, .. } | Kind::Cos { c, .. } => {
                c == 0.0
            }
            Kind::Custom { .. } => false,
        }
    }

    /// Value and first three derivatives at `x`.
    pub fn derivs(&self, x: f64) -> [f64; 4] {
        match &self.kind {
            Kind::Zero => [0.0; 4],
            Kind::Const(v) => [*v, 0.0, 0.0, 0.0],
            Kind::Power { k, c } => {
                let k = *k;
                let integer = k.fract() == 0.0 && k.abs() < 1e9;
                let pw = |e: f64| -> f64 {
                    if integer {
                        x.powi(e as i32)
                    } else {
                        x.powf(e)
                    }
                };
                let term = |coef: f64, e: f64| if coef == 0.0 { 0.0 } else { coef * pw(e) };
                [
                    c * pw(k),
                    c * term(k, k - 1.0),
                    c * term(k * (k - 1.0), k - 2.0),
                    c * term(k * (k - 1.0) * (k - 2.0), k - 3.0),
                ]
            }
            Kind::Exp { r, c } => {
                let e = c * (r * x).exp();
                [e, r * e, r * r * e, r * r * r * e]
            }
            Kind::Sin { w, c } => {
                let (s, co) = (w * x).sin_cos();
                [c * s, c * w * co, -c * w * w * s, -c * w * w * w * co]
            }
            Kind::Cos { w, c } => {
                let (s, co) = (w * x).sin_cos();
                [c * co, -c * w * s, -c * w * w * co, c * w * w * w * s]
            }
            Kind::Custom { derivs, .. } => derivs(x),
        }
    }

    pub fn value(&self, x: f64) -> f64 {
        self.derivs(x)[0]
    }

    /// An antiderivative. It vanishes at 0 whenever ∫_0^x converges; for
    /// c·x^k with k ≤ −1 it is c·ln|x| (k = −1) or c·x^{k+1}/(k+1).
    pub fn antiderivative(&self, x: f64) -> f64 {
        match &self.kind {
            Kind::Zero => 0.0,
            Kind::Const(v) => v * x,
            Kind::Power { k, c } => {
                if *k == -1.0 {
                    c * x.abs().ln()
                } else {
                    let e = k + 1.0;
                    let integer = e.fract() == 0.0;
                    let p = if integer { x.powi(e as i32) } else { x.powf(e) };
                    c * p / e
                }
            }
            Kind::Exp { r, c } => {
                if *r == 0.0 {
                    c * x
                } else {
                    c * ((r * x).exp() - 1.0) / r
                }
            }
            Kind::Sin { w, c } => {
                if *w == 0.0 {
                    0.0
                } else {
                    c * (1.0 - (w * x).cos()) / w
                }
            }
            Kind::Cos { w, c } => {
                if *w == 0.0 {
                    c * x
                } else {
                    c * (w * x).sin() / w
                }
            }
            Kind::Custom {
                derivs,
                antiderivative,
            } => match antiderivative {
                Some(a) => a(x),
                None => adaptive_simpson(|s| derivs(s)[0], 0.0, x, 1e-12),
            },
        }
    }

    /// Applies the function to a scalar or jet.
    pub fn apply<S: Scalar>(&self, x: S) -> Result<S> {
        let d = self.derivs(x.value());
        if !d[0].is_finite() {
            return Err(Error::Domain(format!(
                "profile {} is not finite at {}",
                self.name,
                x.value()
            )));
        }
        Ok(x.lift(d))
    }

    /// Applies the antiderivative to a scalar or jet (its derivatives are
    /// the function's value and first two derivatives).
    pub fn apply_antiderivative<S: Scalar>(&self, x: S) -> Result<S> {
        let v = self.antiderivative(x.value());
        let d = self.derivs(x.value());
        if !v.is_finite() || !d[0].is_finite() {
            return Err(Error::Domain(format!(
                "antiderivative of {} is not finite at {}",
                self.name,
                x.value()
            )));
        }
        Ok(x.lift([v, d[0], d[1], d[2]]))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_named_profiles() {
        assert!(Profile::parse("zero").unwrap().is_zero());
        assert_eq!(Profile::parse("const:2.5").unwrap().value(7.0), 2.5);
        let p = Profile::parse("power:2").unwrap();
        assert_eq!(p.derivs(3.0), [9.0, 6.0, 2.0, 0.0]);
        assert_eq!(p.name(), "power:2");
        let p = Profile::parse("power:-1:3").unwrap();
        assert_eq!(p.value(2.0), 1.5);
        assert_eq!(Profile::parse("identity").unwrap().derivs(4.0), [4.0, 1.0, 0.0, 0.0]);
        assert!(Profile::parse("bogus").is_err());
        assert!(Profile::parse("const").is_err());
        assert!(Profile::parse("power:x").is_err());
    }

    #[test]
    fn antiderivatives_differentiate_back() {
        let h = 1e-5;
        for p in [
            Profile::constant(2.0),
            Profile::power(3.0, 0.5),
            Profile::power(-1.0, 2.0),
            Profile::power(-2.0, 1.0),
            Profile::power(0.5, 1.0),
            Profile::exp(0.7, 2.0),
            Profile::sin(1.3, 1.0),
            Profile::cos(0.4, -2.0),
            Profile::custom("sq", |x| [x * x, 2.0 * x, 2.0, 0.0], None),
        ] {
            let x = 0.8;
            let d = (p.antiderivative(x + h) - p.antiderivative(x - h)) / (2.0 * h);
            assert!((d - p.value(x)).abs() < 1e-8, "{p}");
        }
    }

    #[test]
    fn derivatives_match_differences() {
        let h = 1e-4;
        for p in [Profile::power(2.5, 1.5), Profile::sin(2.0, 1.0), Profile::exp(-1.0, 3.0)] {
            let x = 1.1;
            for k in 0..3 {
                let fd = (p.derivs(x + h)[k] - p.derivs(x - h)[k]) / (2.0 * h);
                assert!((fd - p.derivs(x)[k + 1]).abs() < 1e-6, "{p} k={k}");
            }
        }
    }
}
