//! Parameterized classes of finite-dimensional subalgebras, the optimal
//! lists of one- and two-dimensional subalgebras, and closure certification.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;

use super::algebra::{decompose_in_span, sample_points, structure_constants, StructureTable};
use super::generator::{standard_generators, Point, SymmetryGenerator, ZFunction};
use super::quasipoly::{Oscillation, QuasiPoly, Term};
use crate::error::{Error, Result};

/// Residual bound for a bracket to count as lying in the span.
pub const CLOSURE_TOL: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ClassId {
    /// Classes 1–12 of the finite-dimensional classification.
    Class(u8),
    /// Items 1–4 of the one-dimensional optimal list.
    Opt1D(u8),
    /// Items 1–7 of the two-dimensional optimal list.
    Opt2D(u8),
}

impl ClassId {
    pub fn all() -> Vec<ClassId> {
        let mut v: Vec<ClassId> = (1..=12).map(ClassId::Class).collect();
        v.extend((1..=4).map(ClassId::Opt1D));
        v.extend((1..=7).map(ClassId::Opt2D));
        v
    }
}

impl fmt::Display for ClassId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ClassId::Class(i) => write!(f, "{i}"),
            ClassId::Opt1D(i) => write!(f, "opt1d-{i}"),
            ClassId::Opt2D(i) => write!(f, "opt2d-{i}"),
        }
    }
}

impl FromStr for ClassId {
    type Err = Error;

    /// Accepts `1`..`12`, `opt1d-1`..`opt1d-4`, `opt2d-1`..`opt2d-7`
    /// (case-insensitive, `_` or no separator also allowed).
    fn from_str(s: &str) -> Result<Self> {
        let lower = s.trim().to_ascii_lowercase().replace(['_', '-'], "");
        let bad = || Error::Parse(format!("unknown subalgebra class `{s}`"));
        let (ctor, rest, max): (fn(u8) -> ClassId, &str, u8) = if let Some(r) = lower.strip_prefix("opt1d") {
            (ClassId::Opt1D, r, 4)
        } else if let Some(r) = lower.strip_prefix("opt2d") {
            (ClassId::Opt2D, r, 7)
        } else {
            (ClassId::Class, lower.as_str(), 12)
        };
        let i: u8 = rest.parse().map_err(|_| bad())?;
        if i == 0 || i > max {
            return Err(bad());
        }
        Ok(ctor(i))
    }
}

/// Class parameters. Lists use the paper-independent names of their roles:
/// `lambda`/`m` index the real-exponent part of the ideal, `mu`/`nu`/`mp`
/// the oscillating part, `g` the free functions of I^n(ḡ).
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ClassParams {
    pub sigma: f64,
    pub kappa: f64,
    /// Dimension of Ĩ^n = ⟨Z(1), …, Z(t^{n−1})⟩ and exponent of κtⁿ.
    pub n: usize,
    pub lambda: Vec<f64>,
    pub m: Vec<usize>,
    pub mu: Vec<f64>,
    pub nu: Vec<f64>,
    pub mp: Vec<usize>,
    pub g: Vec<QuasiPoly>,
    pub f: Option<QuasiPoly>,
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub c_tilde: f64,
    pub g_check: Option<QuasiPoly>,
    pub g_hat: Option<QuasiPoly>,
}

fn parse_f64(k: &str, v: &str) -> Result<f64> {
    v.trim()
        .parse()
        .map_err(|_| Error::Parse(format!("parameter `{k}`: `{v}` is not a number")))
}

fn parse_list<T: FromStr>(k: &str, v: &str) -> Result<Vec<T>> {
    if v.trim().is_empty() {
        return Ok(vec![]);
    }
    v.split(';')
        .map(|x| {
            x.trim()
                .parse()
                .map_err(|_| Error::Parse(format!("parameter `{k}`: bad list entry `{x}`")))
        })
        .collect()
}

impl ClassParams {
    /// Parses `key=value` pairs separated by commas; lists use `;`.
    /// Keys: sigma, kappa, n, lambda, m, mu, nu, mp, g, f, a, b, c, ctilde,
    /// gcheck, ghat. Functions use [`parse_quasi`] syntax.
    pub fn parse(s: &str) -> Result<Self> {
        let mut p = ClassParams::default();
        for item in s.split(',').map(str::trim).filter(|x| !x.is_empty()) {
            let (k, v) = item
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("parameter `{item}`: expected key=value")))?;
            let (k, v) = (k.trim(), v.trim());
            match k {
                "sigma" => p.sigma = parse_f64(k, v)?,
                "kappa" => p.kappa = parse_f64(k, v)?,
                "a" => p.a = parse_f64(k, v)?,
                "b" => p.b = parse_f64(k, v)?,
                "c" => p.c = parse_f64(k, v)?,
                "ctilde" => p.c_tilde = parse_f64(k, v)?,
                "n" => {
                    p.n = v
                        .parse()
                        .map_err(|_| Error::Parse(format!("parameter `n`: `{v}` is not a count")))?
                }
                "lambda" => p.lambda = parse_list(k, v)?,
                "m" => p.m = parse_list(k, v)?,
                "mu" => p.mu = parse_list(k, v)?,
                "nu" => p.nu = parse_list(k, v)?,
                "mp" => p.mp = parse_list(k, v)?,
                "g" => p.g = v.split(';').map(parse_quasi).collect::<Result<_>>()?,
                "f" => p.f = Some(parse_quasi(v)?),
                "gcheck" => p.g_check = Some(parse_quasi(v)?),
                "ghat" => p.g_hat = Some(parse_quasi(v)?),
                _ => return Err(Error::Parse(format!("unknown parameter `{k}`"))),
            }
        }
        Ok(p)
    }
}

/// Parses a quasi-polynomial: terms joined by `+`, factors by `*`. Factors
/// are a number, `t`, `t^k`, `|t|^a`, `ln^j` (= ln|t|^j), `exp:b` (= e^{bt}),
/// `cos:ν`, `sin:ν`, `coslog:ν`, `sinlog:ν`. A term may start with `-`.
pub fn parse_quasi(s: &str) -> Result<QuasiPoly> {
    let bad = |m: &str| Error::Parse(format!("function `{s}`: {m}"));
    let mut terms = Vec::new();
    let norm = s.replace(' ', "");
    for raw in norm.split('+').filter(|x| !x.is_empty()) {
        let (sign, body) = match raw.strip_prefix('-') {
            Some(b) => (-1.0, b),
            None => (1.0, raw),
        };
        let mut term = Term::monomial(sign, 0);
        for fac in body.split('*').filter(|x| !x.is_empty()) {
            let num = |x: &str| x.parse::<f64>().map_err(|_| bad(&format!("bad number in `{fac}`")));
            if let Ok(c) = fac.parse::<f64>() {
                term.c *= c;
            } else if fac == "t" {
                term.k += 1;
            } else if let Some(e) = fac.strip_prefix("|t|^") {
                term.alpha += num(e)?;
            } else if let Some(e) = fac.strip_prefix("t^") {
                term.k += e.parse::<i32>().map_err(|_| bad("integer exponent expected after t^"))?;
            } else if let Some(e) = fac.strip_prefix("ln^") {
                term.j += e.parse::<u32>().map_err(|_| bad("count expected after ln^"))?;
            } else if fac == "ln" {
                term.j += 1;
            } else if let Some(e) = fac.strip_prefix("exp:") {
                term.beta += num(e)?;
            } else if let Some((kind, e)) = fac.split_once(':') {
                if term.osc != Oscillation::None {
                    return Err(bad("at most one oscillating factor per term"));
                }
                let nu = num(e)?;
                term.osc = match kind {
                    "cos" => Oscillation::Cos(nu),
                    "sin" => Oscillation::Sin(nu),
                    "coslog" => Oscillation::CosLog(nu),
                    "sinlog" => Oscillation::SinLog(nu),
                    _ => return Err(bad(&format!("unknown factor `{fac}`"))),
                };
            } else {
                return Err(bad(&format!("unknown factor `{fac}`")));
            }
        }
        terms.push(term);
    }
    if terms.is_empty() {
        return Err(bad("empty"));
    }
    Ok(QuasiPoly::new(terms))
}

/// A subalgebra given by an explicit list of generators.
#[derive(Clone, Debug)]
pub struct Subalgebra {
    pub class_id: Option<ClassId>,
    pub params: ClassParams,
    pub generators: Vec<SymmetryGenerator>,
}

impl Subalgebra {
    pub fn from_generators(generators: Vec<SymmetryGenerator>) -> Self {
        Subalgebra {
            class_id: None,
            params: ClassParams::default(),
            generators,
        }
    }

    pub fn dim(&self) -> usize {
        self.generators.len()
    }

    pub fn labels(&self) -> Vec<String> {
        self.generators.iter().map(|g| g.label.clone()).collect()
    }

    /// Checks by sampling that the generators are linearly independent.
    pub fn check_independent(&self, points: &[Point]) -> Result<()> {
        let k = self.generators.len();
        if k == 0 {
            return Ok(());
        }
        let mut a = DMatrix::<f64>::zeros(4 * points.len(), k);
        for (pi, p) in points.iter().enumerate() {
            for (c, g) in self.generators.iter().enumerate() {
                let v = g.values(*p);
                for i in 0..4 {
                    a[(4 * pi + i, c)] = v[i];
                }
            }
        }
        for c in 0..k {
            let n = a.column(c).norm();
            if !(n > 0.0 && n.is_finite()) {
                return Err(Error::InvalidParams(format!(
                    "generator {} must not vanish",
                    self.generators[c].label
                )));
            }
            a.column_mut(c).scale_mut(1.0 / n);
        }
        let sv = a.singular_values();
        if !(sv.min() > 1e-9 * sv.max()) {
            return Err(Error::InvalidParams(
                "generators must be linearly independent".into(),
            ));
        }
        Ok(())
    }
}

fn zq(poly: QuasiPoly, label: String) -> SymmetryGenerator {
    SymmetryGenerator::z(ZFunction::quasi(poly)).with_label(label)
}

fn fmt_num(x: f64) -> String {
    format!("{x}")
}

/// Ĩ^n = ⟨Z(1), …, Z(t^{n−1})⟩.
fn ideal_tilde(n: usize) -> Vec<SymmetryGenerator> {
    (0..n as i32).map(SymmetryGenerator::z_power).collect()
}

fn check_exp_params(p: &ClassParams) -> Result<()> {
    if p.lambda.len() != p.m.len() {
        return Err(Error::InvalidParams("lambda and m have the same length".into()));
    }
    if p.mu.len() != p.nu.len() || p.mu.len() != p.mp.len() {
        return Err(Error::InvalidParams("mu, nu and mp have the same length".into()));
    }
    for i in 0..p.lambda.len() {
        if p.lambda[..i].contains(&p.lambda[i]) {
            return Err(Error::InvalidParams("lambda entries are pairwise different".into()));
        }
    }
    for j in 0..p.mu.len() {
        if (0..j).any(|i| p.mu[i] == p.mu[j] && p.nu[i] == p.nu[j]) {
            return Err(Error::InvalidParams("pairs (mu_j, nu_j) are pairwise different".into()));
        }
    }
    Ok(())
}

/// Î: Z(t^k e^{λ_i t}), Z(t^l e^{μ_j t} cos ν_j t), Z(t^l e^{μ_j t} sin ν_j t).
fn ideal_hat(p: &ClassParams) -> Vec<SymmetryGenerator> {
    let mut out = Vec::new();
    for (lam, m) in p.lambda.iter().zip(&p.m) {
        for k in 0..=*m as i32 {
            out.push(zq(QuasiPoly::exp_poly(k, *lam), format!("Z(t^{k}·e^({}t))", fmt_num(*lam))));
        }
    }
    for ((mu, nu), mp) in p.mu.iter().zip(&p.nu).zip(&p.mp) {
        for l in 0..=*mp as i32 {
            for sine in [false, true] {
                let trig = if sine { "sin" } else { "cos" };
                out.push(zq(
                    QuasiPoly::exp_trig(l, *mu, *nu, sine),
                    format!("Z(t^{l}·e^({}t)·{trig}({}t))", fmt_num(*mu), fmt_num(*nu)),
                ));
            }
        }
    }
    out
}

/// Ǐ: Z(τ^k |t|^{λ_i}), Z(τ^l |t|^{μ_j} cos ν_j τ), Z(τ^l |t|^{μ_j} sin ν_j τ), τ = ln|t|.
fn ideal_check(p: &ClassParams) -> Vec<SymmetryGenerator> {
    let mut out = Vec::new();
    for (lam, m) in p.lambda.iter().zip(&p.m) {
        for k in 0..=*m as u32 {
            out.push(zq(QuasiPoly::log_power(k, *lam), format!("Z(τ^{k}·|t|^{})", fmt_num(*lam))));
        }
    }
    for ((mu, nu), mp) in p.mu.iter().zip(&p.nu).zip(&p.mp) {
        for l in 0..=*mp as u32 {
            for sine in [false, true] {
                let trig = if sine { "sin" } else { "cos" };
                out.push(zq(
                    QuasiPoly::log_trig(l, *mu, *nu, sine),
                    format!("Z(τ^{l}·|t|^{}·{trig}({}τ))", fmt_num(*mu), fmt_num(*nu)),
                ));
            }
        }
    }
    out
}

/// I^n(ḡ) = ⟨Z(g¹), …, Z(gⁿ)⟩.
fn ideal_free(p: &ClassParams) -> Vec<SymmetryGenerator> {
    p.g.iter().map(|g| SymmetryGenerator::z_poly(g.clone())).collect()
}

/// The exponent k in J1 + Z(κ t^k) (class 5) or J1 + Z(κ t⁻¹ τ^k) (class 8):
/// one past the top power of the ideal block with λ_i = `target`, else 0.
fn kappa_exponent(p: &ClassParams, target: f64) -> usize {
    p.lambda
        .iter()
        .zip(&p.m)
        .find(|(l, _)| **l == target)
        .map_or(0, |(_, m)| m + 1)
}

fn sum(terms: &[(f64, &SymmetryGenerator)]) -> SymmetryGenerator {
    let kept: Vec<(f64, &SymmetryGenerator)> = terms.iter().filter(|(c, _)| *c != 0.0).copied().collect();
    if kept.len() == 1 && kept[0].0 == 1.0 {
        kept[0].1.clone()
    } else {
        SymmetryGenerator::linear_combination(&kept)
    }
}

fn require_unit(name: &str, v: f64) -> Result<()> {
    if [-1.0, 0.0, 1.0].contains(&v) {
        Ok(())
    } else {
        Err(Error::InvalidParams(format!("{name} in {{-1, 0, 1}}")))
    }
}

fn nonzero(name: &str, g: &Option<QuasiPoly>) -> Result<QuasiPoly> {
    match g {
        Some(g) if !g.is_zero() => Ok(g.clone()),
        _ => Err(Error::InvalidParams(format!("{name} does not vanish"))),
    }
}

/// Explicit generators of a class for the given parameters.
pub fn subalgebra_catalog(class_id: ClassId, params: &ClassParams) -> Result<Subalgebra> {
    let p = params;
    let d = SymmetryGenerator::d();
    let dt = SymmetryGenerator::dt();
    let j1 = SymmetryGenerator::j1();
    let j2 = SymmetryGenerator::j2();
    let j3 = SymmetryGenerator::j3();
    let z = |g: &QuasiPoly| SymmetryGenerator::z_poly(g.clone());
    let mut gens: Vec<SymmetryGenerator> = Vec::new();
    match class_id {
        ClassId::Class(i) => {
            if (4..=9).contains(&i) {
                check_exp_params(p)?;
            }
            match i {
                1 => {}
                2 => {
                    let f = p.f.clone().unwrap_or_default();
                    gens.push(if f.is_zero() { j1.clone() } else { j1.plus(&z(&f)) });
                }
                3 => gens.extend([j1.clone(), j2.clone(), j3.clone()]),
                4 => gens.push(sum(&[(1.0, &dt), (p.sigma, &j1)])),
                5 => {
                    let k = kappa_exponent(p, 0.0) as i32;
                    let zk = z(&QuasiPoly::monomial(p.kappa, k));
                    gens.push(dt.clone());
                    gens.push(sum(&[(1.0, &j1), (1.0, &zk)]));
                }
                6 => gens.extend([dt.clone(), j1.clone(), j2.clone(), j3.clone()]),
                7 => gens.push(sum(&[(1.0, &d), (p.sigma, &j1)])),
                8 => {
                    let k = kappa_exponent(p, -1.0) as u32;
                    let poly = QuasiPoly::new(vec![Term {
                        j: k,
                        ..Term::monomial(p.kappa, -1)
                    }]);
                    gens.push(d.clone());
                    gens.push(sum(&[(1.0, &j1), (1.0, &z(&poly))]));
                }
                9 => gens.extend([d.clone(), j1.clone(), j2.clone(), j3.clone()]),
                10 => {
                    let zk = z(&QuasiPoly::monomial(p.kappa, p.n as i32));
                    gens.push(sum(&[(1.0, &d), (p.sigma, &j1), (1.0, &zk)]));
                    gens.push(dt.clone());
                }
                11 => {
                    let zk = z(&QuasiPoly::monomial(p.kappa, p.n as i32));
                    gens.extend([d.clone(), dt.clone(), sum(&[(1.0, &j1), (1.0, &zk)])]);
                }
                12 => gens.extend([d.clone(), dt.clone(), j1.clone(), j2.clone(), j3.clone()]),
                _ => return Err(Error::InvalidArgument(format!("class {i} does not exist"))),
            }
            match i {
                1..=3 => gens.extend(ideal_free(p)),
                4..=6 => gens.extend(ideal_hat(p)),
                7..=9 => gens.extend(ideal_check(p)),
                _ => gens.extend(ideal_tilde(p.n)),
            }
        }
        ClassId::Opt1D(i) => match i {
            1 => gens.push(sum(&[(1.0, &d), (p.a, &j1)])),
            2 => {
                require_unit("a", p.a)?;
                gens.push(sum(&[(1.0, &dt), (p.a, &j1)]));
            }
            3 => {
                let g = p.g.first().cloned().unwrap_or_default();
                gens.push(if g.is_zero() { j1.clone() } else { j1.plus(&z(&g)) });
            }
            4 => {
                let g = nonzero("g", &p.g.first().cloned())?;
                gens.push(z(&g));
            }
            _ => return Err(Error::InvalidArgument(format!("opt1d-{i} does not exist"))),
        },
        ClassId::Opt2D(i) => match i {
            1 => gens.extend([sum(&[(1.0, &d), (p.b, &j1)]), dt.clone()]),
            2 => {
                let g = QuasiPoly::monomial(p.a, -1);
                gens.extend([d.clone(), if g.is_zero() { j1.clone() } else { j1.plus(&z(&g)) }]);
            }
            3 => gens.extend([sum(&[(1.0, &d), (p.a, &j1)]), z(&QuasiPoly::log_power(0, p.b))]),
            4 => {
                require_unit("c", p.c)?;
                let g = QuasiPoly::constant(p.c);
                gens.extend([dt.clone(), if g.is_zero() { j1.clone() } else { j1.plus(&z(&g)) }]);
            }
            5 => {
                require_unit("c", p.c)?;
                if p.c == 0.0 {
                    require_unit("ctilde", p.c_tilde)?;
                }
                gens.extend([sum(&[(1.0, &dt), (p.c, &j1)]), z(&QuasiPoly::exp_poly(0, p.c_tilde))]);
            }
            6 => {
                let gh = nonzero("ghat", &p.g_hat)?;
                let gc = p.g_check.clone().unwrap_or_default();
                gens.extend([if gc.is_zero() { j1.clone() } else { j1.plus(&z(&gc)) }, z(&gh)]);
            }
            7 => {
                if p.g.len() != 2 {
                    return Err(Error::InvalidParams("exactly two functions g1, g2".into()));
                }
                gens.extend([z(&p.g[0]), z(&p.g[1])]);
            }
            _ => return Err(Error::InvalidArgument(format!("opt2d-{i} does not exist"))),
        },
    }
    let sub = Subalgebra {
        class_id: Some(class_id),
        params: p.clone(),
        generators: gens,
    };
    sub.check_independent(&sample_points(32))?;
    Ok(sub)
}

/// Replaces t by e^{ε1} t + ε0 in the free functions ḡ and f (classes 1–3
/// and the Z(g) items of the optimal lists).
pub fn normalize_time(sub: &Subalgebra, eps0: f64, eps1: f64) -> Result<Subalgebra> {
    let generators = sub
        .generators
        .iter()
        .map(|g| match g.z_function() {
            Some(zf) => zf
                .reparametrized(eps0, eps1)
                .map(SymmetryGenerator::z)
                .ok_or_else(|| Error::Capability("profile-valued Z(g) cannot be reparametrized".into())),
            None => Ok(g.clone()),
        })
        .collect::<Result<_>>()?;
    Ok(Subalgebra {
        generators,
        ..sub.clone()
    })
}

/// Parameter normalizations allowed by time scalings: in classes 4–6 the
/// first nonzero of σ, λ_i, μ_j, ν_j (else κ) becomes ±1; in classes 10 and
/// 11 a nonzero κ becomes ±1.
pub fn normalize_params(class_id: ClassId, params: &ClassParams) -> ClassParams {
    let mut p = params.clone();
    match class_id {
        ClassId::Class(4..=6) => {
            // Conjugating by exp(εD): σ ↦ σe^ε, rates ↦ rate·e^{−ε}, κt^k ↦ κe^{−ε(k+1)}t^k.
            let k = kappa_exponent(&p, 0.0) as f64;
            let first_rate = p.lambda.iter().chain(&p.mu).chain(&p.nu).copied().find(|v| *v != 0.0);
            let eps = if p.sigma != 0.0 {
                Some(-p.sigma.abs().ln())
            } else if let Some(r) = first_rate {
                Some(r.abs().ln())
            } else if p.kappa != 0.0 {
                Some(p.kappa.abs().ln() / (k + 1.0))
            } else {
                None
            };
            if let Some(eps) = eps {
                let down = (-eps).exp();
                p.sigma *= eps.exp();
                for v in p.lambda.iter_mut().chain(p.mu.iter_mut()).chain(p.nu.iter_mut()) {
                    *v *= down;
                }
                p.kappa *= (-eps * (k + 1.0)).exp();
            }
        }
        ClassId::Class(10 | 11) if p.kappa != 0.0 => p.kappa = p.kappa.signum(),
        _ => {}
    }
    p
}

#[derive(Clone, Debug)]
pub struct ClosureReport {
    pub table: StructureTable,
    pub max_residual: f64,
    pub pass: bool,
    /// First bracket outside the span, with its decomposition over the
    /// standard generators when it has one.
    pub witness: Option<(String, String)>,
}

/// Decomposes every pairwise bracket in the span of the subalgebra.
pub fn closure_check(sub: &Subalgebra, points: &[Point]) -> Result<ClosureReport> {
    let table = structure_constants(&sub.generators, points, CLOSURE_TOL)?;
    let max_residual = table.max_residual();
    let pass = table.closed();
    let witness = table.pairs.iter().find(|p| !p.pass).map(|p| {
        let (a, b) = (&sub.generators[p.i], &sub.generators[p.j]);
        let br = super::algebra::commutator(a, b);
        let std = standard_generators();
        let named = decompose_in_span(&br, &std, points)
            .ok()
            .filter(|d| d.residual < 1e-8)
            .map(|d| describe_combination(&d.coefficients, &std))
            .unwrap_or_else(|| "outside the span of D, ∂t, J1, J2, J3".into());
        (format!("[{}, {}]", a.label, b.label), named)
    });
    Ok(ClosureReport {
        table,
        max_residual,
        pass,
        witness,
    })
}

/// Writes Σ c_k B_k with coefficients rounded to 8 decimals, e.g. `J3 - 2·D`.
pub fn describe_combination(coeffs: &[f64], basis: &[SymmetryGenerator]) -> String {
    let mut s = String::new();
    for (c, b) in coeffs.iter().zip(basis) {
        let c = (c * 1e8).round() / 1e8;
        if c == 0.0 {
            continue;
        }
        if !s.is_empty() {
            s.push_str(if c < 0.0 { " - " } else { " + " });
        } else if c < 0.0 {
            s.push('-');
        }
        if c.abs() != 1.0 {
            s.push_str(&format!("{}·", c.abs()));
        }
        s.push_str(&b.label);
    }
    if s.is_empty() {
        s.push('0');
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(s: &str) -> ClassParams {
        ClassParams::parse(s).unwrap()
    }

    #[test]
    fn class_ids_parse() {
        assert_eq!("7".parse::<ClassId>().unwrap(), ClassId::Class(7));
        assert_eq!("opt1D_3".parse::<ClassId>().unwrap(), ClassId::Opt1D(3));
        assert_eq!("Opt2D7".parse::<ClassId>().unwrap(), ClassId::Opt2D(7));
        assert!("13".parse::<ClassId>().is_err());
        assert!("opt1d-5".parse::<ClassId>().is_err());
        for c in ClassId::all() {
            assert_eq!(c.to_string().parse::<ClassId>().unwrap(), c);
        }
    }

    #[test]
    fn quasi_syntax() {
        let q = parse_quasi("2*t^2*exp:1 + -t*cos:3 + ln^2*|t|^0.5").unwrap();
        let t: f64 = 1.3;
        let want = 2.0 * t * t * t.exp() - t * (3.0 * t).cos() + t.ln().powi(2) * t.sqrt();
        assert!((q.value(t) - want).abs() < 1e-13);
        assert!(parse_quasi("t^x").is_err());
        assert!(parse_quasi("cos:1*sin:2").is_err());
    }

    #[test]
    fn catalog_examples() {
        let s = subalgebra_catalog(ClassId::Class(3), &params("n=0")).unwrap();
        assert_eq!(s.labels(), ["J1", "J2", "J3"]);
        let s = subalgebra_catalog(ClassId::Opt1D(3), &params("g=2")).unwrap();
        assert_eq!(s.dim(), 1);
        assert_eq!(s.generators[0].values([1.0, 0.0, 0.0, 0.0]), [0.0, 1.0, 0.0, 2.0]);
        let s = subalgebra_catalog(ClassId::Class(12), &params("n=2")).unwrap();
        assert_eq!(s.labels(), ["D", "∂t", "J1", "J2", "J3", "Z(1)", "Z(t)"]);
    }

    #[test]
    fn constraint_violations() {
        let e = subalgebra_catalog(ClassId::Class(4), &params("lambda=1;1,m=0;0")).unwrap_err();
        assert!(matches!(e, Error::InvalidParams(ref s) if s.contains("lambda")));
        assert!(subalgebra_catalog(ClassId::Class(4), &params("mu=1;1,nu=2;2,mp=0;0")).is_err());
        assert!(subalgebra_catalog(ClassId::Opt1D(2), &params("a=0.5")).is_err());
        assert!(subalgebra_catalog(ClassId::Opt1D(4), &params("")).is_err());
        assert!(subalgebra_catalog(ClassId::Opt2D(5), &params("c=0,ctilde=2")).is_err());
        assert!(subalgebra_catalog(ClassId::Class(1), &params("g=t;2*t")).is_err());
    }

    #[test]
    fn closure_examples() {
        let pts = sample_points(40);
        let s = subalgebra_catalog(ClassId::Class(6), &params("lambda=1,m=1")).unwrap();
        assert!(closure_check(&s, &pts).unwrap().pass);
        let s = subalgebra_catalog(ClassId::Class(10), &params("sigma=1,kappa=1,n=2")).unwrap();
        assert!(closure_check(&s, &pts).unwrap().pass);
        let s = Subalgebra::from_generators(vec![SymmetryGenerator::j1(), SymmetryGenerator::j2()]);
        let r = closure_check(&s, &pts).unwrap();
        assert!(!r.pass);
        assert_eq!(r.witness.unwrap().1, "J3");
    }

    #[test]
    fn class_11_needs_zero_kappa() {
        let pts = sample_points(40);
        let s = subalgebra_catalog(ClassId::Class(11), &params("kappa=1,n=2")).unwrap();
        let r = closure_check(&s, &pts).unwrap();
        assert!(!r.pass);
        let s = subalgebra_catalog(ClassId::Class(11), &params("kappa=0,n=2")).unwrap();
        assert!(closure_check(&s, &pts).unwrap().pass);
    }

    #[test]
    fn normalizers() {
        let p = normalize_params(ClassId::Class(4), &params("sigma=-3,lambda=2;0.5,m=0;1"));
        assert_eq!(p.sigma, -1.0);
        assert!((p.lambda[0] - 6.0).abs() < 1e-14);
        let p = normalize_params(ClassId::Class(10), &params("kappa=-2.5,n=1"));
        assert_eq!(p.kappa, -1.0);
        let s = subalgebra_catalog(ClassId::Class(1), &params("g=t^2")).unwrap();
        let s2 = normalize_time(&s, 1.0, 0.0).unwrap();
        assert_eq!(s2.generators[0].values([2.0, 0.0, 0.0, 0.0])[3], 9.0);
    }
}
