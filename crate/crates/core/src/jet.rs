//! Truncated Taylor arithmetic in three variables.
//!
//! A [`Jet`] carries the Taylor coefficients of a function of three
//! variables around a base point, up to total degree three. Every closed-form
//! solution and point transformation in this crate is written once against
//! the [`Scalar`] trait and evaluated either on plain `f64` (values only) or
//! on jets (values plus exact partials through third order).

use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

/// Number of independent variables carried by a jet.
pub const NVARS: usize = 3;
/// Highest total degree kept.
pub const ORDER: usize = 3;
/// Number of monomials of total degree <= 3 in three variables.
pub const NCOEF: usize = 20;

/// Exponent vectors, ordered by total degree.
pub const MONOMIALS: [[u8; 3]; NCOEF] = [
    [0, 0, 0],
    [1, 0, 0],
    [0, 1, 0],
    [0, 0, 1],
    [2, 0, 0],
    [1, 1, 0],
    [1, 0, 1],
    [0, 2, 0],
    [0, 1, 1],
    [0, 0, 2],
    [3, 0, 0],
    [2, 1, 0],
    [2, 0, 1],
    [1, 2, 0],
    [1, 1, 1],
    [1, 0, 2],
    [0, 3, 0],
    [0, 2, 1],
    [0, 1, 2],
    [0, 0, 3],
];

const fn degree(e: [u8; 3]) -> usize {
    (e[0] + e[1] + e[2]) as usize
}

const fn monomial_index(e: [u8; 3]) -> usize {
    let mut i = 0;
    while i < NCOEF {
        let m = MONOMIALS[i];
        if m[0] == e[0] && m[1] == e[1] && m[2] == e[2] {
            return i;
        }
        i += 1;
    }
    usize::MAX
}

const NPRODUCTS: usize = 84;

const fn build_products() -> [(u8, u8, u8); NPRODUCTS] {
    let mut out = [(0u8, 0u8, 0u8); NPRODUCTS];
    let mut count = 0;
    let mut i = 0;
    while i < NCOEF {
        let mut j = 0;
        while j < NCOEF {
            let a = MONOMIALS[i];
            let b = MONOMIALS[j];
            if degree(a) + degree(b) <= ORDER {
                let k = monomial_index([a[0] + b[0], a[1] + b[1], a[2] + b[2]]);
                out[count] = (i as u8, j as u8, k as u8);
                count += 1;
            }
            j += 1;
        }
        i += 1;
    }
    out
}

const PRODUCTS: [(u8, u8, u8); NPRODUCTS] = build_products();

const fn build_derivative_map() -> [[(u8, u8); NCOEF]; NVARS] {
    // For variable v and target monomial a (degree <= 2): source index of a + e_v
    // and the factor (a_v + 1). Entries with factor 0 are dropped.
    let mut out = [[(0u8, 0u8); NCOEF]; NVARS];
    let mut v = 0;
    while v < NVARS {
        let mut i = 0;
        while i < NCOEF {
            let a = MONOMIALS[i];
            if degree(a) < ORDER {
                let mut b = a;
                b[v] += 1;
                out[v][i] = (monomial_index(b) as u8, a[v] + 1);
            }
            i += 1;
        }
        v += 1;
    }
    out
}

const DERIVATIVE_MAP: [[(u8, u8); NCOEF]; NVARS] = build_derivative_map();

fn factorial(k: u8) -> f64 {
    match k {
        0 | 1 => 1.0,
        2 => 2.0,
        3 => 6.0,
        _ => unreachable!("jets are truncated at order 3"),
    }
}

/// Truncated Taylor polynomial in three variables.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Jet {
    c: [f64; NCOEF],
}

impl Default for Jet {
    fn default() -> Self {
        Jet::constant(0.0)
    }
}

impl Jet {
    pub const fn constant(v: f64) -> Self {
        let mut c = [0.0; NCOEF];
        c[0] = v;
        Jet { c }
    }

    /// The coordinate function `x_var` expanded around `x_var = at`.
    pub fn variable(var: usize, at: f64) -> Self {
        assert!(var < NVARS, "jet variable index out of range");
        let mut j = Jet::constant(at);
        j.c[1 + var] = 1.0;
        j
    }

    /// Seeds all three variables at a base point.
    pub fn variables(at: [f64; 3]) -> [Jet; 3] {
        [
            Jet::variable(0, at[0]),
            Jet::variable(1, at[1]),
            Jet::variable(2, at[2]),
        ]
    }

    pub fn from_coefficients(c: [f64; NCOEF]) -> Self {
        Jet { c }
    }

    pub fn coefficients(&self) -> &[f64; NCOEF] {
        &self.c
    }

    pub fn value(&self) -> f64 {
        self.c[0]
    }

    /// Taylor coefficient of the monomial with exponents `e`.
    pub fn coeff(&self, e: [u8; 3]) -> f64 {
        let i = monomial_index(e);
        if i == usize::MAX {
            0.0
        } else {
            self.c[i]
        }
    }

    /// Partial derivative with multi-index `e` (total order <= 3).
    pub fn partial(&self, e: [u8; 3]) -> f64 {
        self.coeff(e) * factorial(e[0]) * factorial(e[1]) * factorial(e[2])
    }

    pub fn d1(&self, i: usize) -> f64 {
        let mut e = [0u8; 3];
        e[i] += 1;
        self.partial(e)
    }

    pub fn d2(&self, i: usize, j: usize) -> f64 {
        let mut e = [0u8; 3];
        e[i] += 1;
        e[j] += 1;
        self.partial(e)
    }

    pub fn d3(&self, i: usize, j: usize, k: usize) -> f64 {
        let mut e = [0u8; 3];
        e[i] += 1;
        e[j] += 1;
        e[k] += 1;
        self.partial(e)
    }

    pub fn gradient(&self) -> [f64; 3] {
        [self.c[1], self.c[2], self.c[3]]
    }

    /// Partial derivative with respect to `var`, as a jet one order shorter.
    /// Third-order coefficients of the result are zero and must not be read.
    pub fn derivative(&self, var: usize) -> Jet {
        let mut out = [0.0; NCOEF];
        for (i, o) in out.iter_mut().enumerate() {
            let (src, factor) = DERIVATIVE_MAP[var][i];
            if factor > 0 {
                *o = self.c[src as usize] * factor as f64;
            }
        }
        Jet { c: out }
    }

    /// Keeps only the coefficients of total degree <= `order`.
    pub fn truncate(&self, order: usize) -> Jet {
        let mut out = *self;
        for (i, e) in MONOMIALS.iter().enumerate() {
            if degree(*e) > order {
                out.c[i] = 0.0;
            }
        }
        out
    }

    /// Applies a univariate function given its value and first three
    /// derivatives at `self.value()`.
    pub fn compose(&self, derivs: [f64; 4]) -> Jet {
        let h = *self - self.value();
        let h2 = h * h;
        let h3 = h2 * h;
        let mut out = h * derivs[1] + h2 * (derivs[2] / 2.0) + h3 * (derivs[3] / 6.0);
        out.c[0] = derivs[0];
        out
    }

    /// Treats `self` as a Taylor polynomial in displacements and substitutes
    /// the given displacement jets (which must have zero constant part).
    pub fn substitute(&self, disp: &[Jet; 3]) -> Jet {
        let mut powers = [[Jet::constant(1.0); 4]; 3];
        for v in 0..3 {
            debug_assert!(disp[v].value() == 0.0);
            for k in 1..4 {
                powers[v][k] = powers[v][k - 1] * disp[v];
            }
        }
        let mut out = Jet::constant(self.c[0]);
        for (i, e) in MONOMIALS.iter().enumerate().skip(1) {
            if self.c[i] == 0.0 {
                continue;
            }
            let term = powers[0][e[0] as usize] * powers[1][e[1] as usize] * powers[2][e[2] as usize];
            out += term * self.c[i];
        }
        out
    }

    /// Chain rule: `self` is the expansion of some function `f` around the
    /// base point `inner[k].value()`; the result is `f(inner)`.
    pub fn chain(&self, inner: &[Jet; 3]) -> Jet {
        let disp = [
            inner[0] - inner[0].value(),
            inner[1] - inner[1].value(),
            inner[2] - inner[2].value(),
        ];
        self.substitute(&disp)
    }

    pub fn recip(&self) -> Jet {
        let a = self.value();
        let r = 1.0 / a;
        self.compose([r, -r * r, 2.0 * r * r * r, -6.0 * r * r * r * r])
    }
}

impl Add for Jet {
    type Output = Jet;
    fn add(mut self, rhs: Jet) -> Jet {
        for i in 0..NCOEF {
            self.c[i] += rhs.c[i];
        }
        self
    }
}

impl Sub for Jet {
    type Output = Jet;
    fn sub(mut self, rhs: Jet) -> Jet {
        for i in 0..NCOEF {
            self.c[i] -= rhs.c[i];
        }
        self
    }
}

impl Mul for Jet {
    type Output = Jet;
    fn mul(self, rhs: Jet) -> Jet {
        let mut out = [0.0; NCOEF];
        for &(i, j, k) in PRODUCTS.iter() {
            out[k as usize] += self.c[i as usize] * rhs.c[j as usize];
        }
        Jet { c: out }
    }
}

impl Div for Jet {
    type Output = Jet;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, rhs: Jet) -> Jet {
        self * rhs.recip()
    }
}

impl Neg for Jet {
    type Output = Jet;
    fn neg(mut self) -> Jet {
        for v in self.c.iter_mut() {
            *v = -*v;
        }
        self
    }
}

impl Add<f64> for Jet {
    type Output = Jet;
    fn add(mut self, rhs: f64) -> Jet {
        self.c[0] += rhs;
        self
    }
}

impl Sub<f64> for Jet {
    type Output = Jet;
    fn sub(mut self, rhs: f64) -> Jet {
        self.c[0] -= rhs;
        self
    }
}

impl Mul<f64> for Jet {
    type Output = Jet;
    fn mul(mut self, rhs: f64) -> Jet {
        for v in self.c.iter_mut() {
            *v *= rhs;
        }
        self
    }
}

impl Div<f64> for Jet {
    type Output = Jet;
    fn div(mut self, rhs: f64) -> Jet {
        for v in self.c.iter_mut() {
            *v /= rhs;
        }
        self
    }
}

impl AddAssign for Jet {
    fn add_assign(&mut self, rhs: Jet) {
        *self = *self + rhs;
    }
}

impl SubAssign for Jet {
    fn sub_assign(&mut self, rhs: Jet) {
        *self = *self - rhs;
    }
}

impl MulAssign for Jet {
    fn mul_assign(&mut self, rhs: Jet) {
        *self = *self * rhs;
    }
}

/// Numbers the closed-form formulas are generic over: `f64` or [`Jet`].
pub trait Scalar:
    Copy
    + std::fmt::Debug
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + Add<f64, Output = Self>
    + Sub<f64, Output = Self>
    + Mul<f64, Output = Self>
    + Div<f64, Output = Self>
{
    fn cst(v: f64) -> Self;
    fn value(&self) -> f64;
    /// Applies a univariate function through its value and first three
    /// derivatives at the base value.
    fn lift(self, derivs: [f64; 4]) -> Self;

    fn sin(self) -> Self {
        let (s, c) = self.value().sin_cos();
        self.lift([s, c, -s, -c])
    }

    fn cos(self) -> Self {
        let (s, c) = self.value().sin_cos();
        self.lift([c, -s, -c, s])
    }

    fn exp(self) -> Self {
        let e = self.value().exp();
        self.lift([e, e, e, e])
    }

    fn ln(self) -> Self {
        let x = self.value();
        self.lift([x.ln(), 1.0 / x, -1.0 / (x * x), 2.0 / (x * x * x)])
    }

    fn sqrt(self) -> Self {
        let x = self.value();
        let s = x.sqrt();
        self.lift([s, 0.5 / s, -0.25 / (s * x), 0.375 / (s * x * x)])
    }

    fn powf(self, p: f64) -> Self {
        let x = self.value();
        self.lift([
            x.powf(p),
            p * x.powf(p - 1.0),
            p * (p - 1.0) * x.powf(p - 2.0),
            p * (p - 1.0) * (p - 2.0) * x.powf(p - 3.0),
        ])
    }

    fn powi(self, k: i32) -> Self {
        let x = self.value();
        let p = k as f64;
        let pw = |e: i32| if e == 0 { 1.0 } else { x.powi(e) };
        let d1 = if k == 0 { 0.0 } else { p * pw(k - 1) };
        let d2 = if k == 0 || k == 1 { 0.0 } else { p * (p - 1.0) * pw(k - 2) };
        let d3 = if (0..=2).contains(&k) {
            0.0
        } else {
            p * (p - 1.0) * (p - 2.0) * pw(k - 3)
        };
        self.lift([pw(k), d1, d2, d3])
    }

    fn atanh(self) -> Self {
        let x = self.value();
        let q = 1.0 / (1.0 - x * x);
        self.lift([
            x.atanh(),
            q,
            2.0 * x * q * q,
            (2.0 + 6.0 * x * x) * q * q * q,
        ])
    }

    fn atan(self) -> Self {
        let x = self.value();
        let q = 1.0 / (1.0 + x * x);
        self.lift([x.atan(), q, -2.0 * x * q * q, (6.0 * x * x - 2.0) * q * q * q])
    }

    fn acos(self) -> Self {
        let x = self.value();
        let s = 1.0 - x * x;
        let r = s.sqrt();
        self.lift([
            x.acos(),
            -1.0 / r,
            -x / (s * r),
            -(1.0 + 2.0 * x * x) / (s * s * r),
        ])
    }

    /// `ln|x|`.
    fn ln_abs(self) -> Self {
        let x = self.value();
        self.lift([x.abs().ln(), 1.0 / x, -1.0 / (x * x), 2.0 / (x * x * x)])
    }

    fn abs(self) -> Self {
        if self.value() < 0.0 {
            -self
        } else {
            self
        }
    }

    /// Two-argument arctangent `atan2(self, x)`, continuous around the base
    /// point.
    fn atan2(self, x: Self) -> Self {
        let y0 = self.value();
        let x0 = x.value();
        let base = y0.atan2(x0);
        // atan2(y, x) - atan2(y0, x0) = atan((x0 y - y0 x) / (x0 x + y0 y))
        let num = self * x0 - x * y0;
        let den = x * x0 + self * y0;
        let u = num / den;
        u.atan() + base
    }
}

impl Scalar for f64 {
    fn cst(v: f64) -> Self {
        v
    }
    fn value(&self) -> f64 {
        *self
    }
    fn lift(self, derivs: [f64; 4]) -> Self {
        derivs[0]
    }
    fn sin(self) -> Self {
        f64::sin(self)
    }
    fn cos(self) -> Self {
        f64::cos(self)
    }
    fn exp(self) -> Self {
        f64::exp(self)
    }
    fn ln(self) -> Self {
        f64::ln(self)
    }
    fn sqrt(self) -> Self {
        f64::sqrt(self)
    }
    fn powf(self, p: f64) -> Self {
        f64::powf(self, p)
    }
    fn powi(self, k: i32) -> Self {
        f64::powi(self, k)
    }
    fn atanh(self) -> Self {
        f64::atanh(self)
    }
    fn atan(self) -> Self {
        f64::atan(self)
    }
    fn acos(self) -> Self {
        f64::acos(self)
    }
    fn ln_abs(self) -> Self {
        self.abs().ln()
    }
    fn abs(self) -> Self {
        f64::abs(self)
    }
    fn atan2(self, x: Self) -> Self {
        f64::atan2(self, x)
    }
}

impl Scalar for Jet {
    fn cst(v: f64) -> Self {
        Jet::constant(v)
    }
    fn value(&self) -> f64 {
        self.c[0]
    }
    fn lift(self, derivs: [f64; 4]) -> Self {
        self.compose(derivs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * (1.0 + b.abs())
    }

    #[test]
    fn product_table_size() {
        assert_eq!(PRODUCTS.len(), 84);
        assert!(PRODUCTS.iter().all(|&(_, _, k)| (k as usize) < NCOEF));
    }

    #[test]
    fn polynomial_partials_are_exact() {
        // f = x^2 y + 3 y z^2 - z at (1, 2, -1)
        let [x, y, z] = Jet::variables([1.0, 2.0, -1.0]);
        let f = x * x * y + y * z * z * 3.0 - z;
        assert_eq!(f.value(), 2.0 + 6.0 + 1.0);
        assert_eq!(f.d1(0), 2.0 * 1.0 * 2.0);
        assert_eq!(f.d1(1), 1.0 + 3.0);
        assert_eq!(f.d1(2), 6.0 * 2.0 * -1.0 - 1.0);
        assert_eq!(f.d2(0, 1), 2.0);
        assert_eq!(f.d2(2, 2), 12.0);
        assert_eq!(f.d3(0, 0, 1), 2.0);
        assert_eq!(f.d3(1, 2, 2), 6.0);
        assert_eq!(f.d3(2, 2, 2), 0.0);
    }

    #[test]
    fn elementary_functions_match_closed_form_derivatives() {
        let x = Jet::variable(0, 0.3);
        let s = x.sin();
        assert!(close(s.d3(0, 0, 0), -0.3f64.cos(), 1e-15));
        let a = x.atanh();
        let q = 1.0 / (1.0 - 0.09);
        assert!(close(a.d1(0), q, 1e-15));
        assert!(close(a.d2(0, 0), 2.0 * 0.3 * q * q, 1e-14));
        let r = (x * x + 1.0).sqrt();
        // d/dx sqrt(x^2+1) = x / sqrt(x^2+1)
        assert!(close(r.d1(0), 0.3 / 1.09f64.sqrt(), 1e-15));
        let e = (x * 2.0).exp();
        assert!(close(e.d3(0, 0, 0), 8.0 * 0.6f64.exp(), 1e-14));
    }

    #[test]
    fn atan2_matches_polar_angle_derivatives() {
        let [x, y, _] = Jet::variables([-0.4, 0.7, 0.0]);
        let th = y.atan2(x);
        assert!(close(th.value(), 0.7f64.atan2(-0.4), 1e-15));
        let r2 = 0.16 + 0.49;
        assert!(close(th.d1(0), -0.7 / r2, 1e-14));
        assert!(close(th.d1(1), -0.4 / r2, 1e-14));
        // atan2 is harmonic.
        assert!((th.d2(0, 0) + th.d2(1, 1)).abs() < 1e-13);
    }

    #[test]
    fn derivative_lowers_order() {
        let [x, y, _] = Jet::variables([0.5, -1.0, 0.0]);
        let f = x * x * x * y;
        let fx = f.derivative(0);
        assert_eq!(fx.value(), 3.0 * 0.25 * -1.0);
        assert_eq!(fx.d1(0), 6.0 * 0.5 * -1.0);
        assert_eq!(fx.d1(1), 3.0 * 0.25);
        assert_eq!(fx.d2(0, 1), 6.0 * 0.5);
    }

    #[test]
    fn chain_rule_composes_maps() {
        // g(u, v, w) = u v + w^2, composed with u = sin x, v = x y, w = z.
        let base = [0.2, 0.7, -0.3];
        let [x, y, z] = Jet::variables(base);
        let inner = [x.sin(), x * y, z];
        let direct = inner[0] * inner[1] + inner[2] * inner[2];
        let g = {
            let [u, v, w] = Jet::variables([inner[0].value(), inner[1].value(), inner[2].value()]);
            u * v + w * w
        };
        let composed = g.chain(&inner);
        for i in 0..NCOEF {
            assert!((composed.coefficients()[i] - direct.coefficients()[i]).abs() < 1e-14);
        }
    }

    #[test]
    fn powi_handles_small_exponents() {
        let x = Jet::variable(0, 2.0);
        let p = x.powi(2);
        assert_eq!(p.value(), 4.0);
        assert_eq!(p.d1(0), 4.0);
        assert_eq!(p.d2(0, 0), 2.0);
        assert_eq!(p.d3(0, 0, 0), 0.0);
        let q = x.powi(-1);
        assert!(close(q.d3(0, 0, 0), -6.0 / 16.0, 1e-15));
    }
}
