//! Brackets, span membership, structure constants and the adjoint action.

use nalgebra::{DMatrix, DVector};

use super::generator::{Point, SymmetryGenerator};
use super::transform::flow;
use crate::error::{Error, Result};
use crate::numerics::halton;

/// [X, Y]^i = X^j ∂_j Y^i − Y^j ∂_j X^i. Values use the operands' partials;
/// partials of the result are central differences.
pub fn commutator(x: &SymmetryGenerator, y: &SymmetryGenerator) -> SymmetryGenerator {
    let (a, b) = (x.clone(), y.clone());
    SymmetryGenerator::from_oracle(format!("[{}, {}]", x.label, y.label), move |p| {
        bracket_at(&a, &b, p)
    })
}

fn bracket_at(x: &SymmetryGenerator, y: &SymmetryGenerator, p: Point) -> [f64; 4] {
    let (vx, vy) = (x.values(p), y.values(p));
    let (jx, jy) = (x.jacobian(p), y.jacobian(p));
    let mut out = [0.0; 4];
    for i in 0..4 {
        for j in 0..4 {
            out[i] += vx[j] * jy[i][j] - vy[j] * jx[i][j];
        }
    }
    out
}

/// Deterministic sample points in general position: t ∈ [t_lo, t_hi],
/// λ ∈ [−π, π], μ ∈ [−0.9, 0.9], ψ ∈ [−2, 2].
pub fn sample_points_in(count: usize, t_lo: f64, t_hi: f64) -> Vec<Point> {
    (0..count)
        .map(|i| {
            let h = halton::<4>(i);
            [
                t_lo + (t_hi - t_lo) * h[0],
                std::f64::consts::PI * (2.0 * h[1] - 1.0),
                0.9 * (2.0 * h[2] - 1.0),
                2.0 * (2.0 * h[3] - 1.0),
            ]
        })
        .collect()
}

/// Sample points with t ∈ [0.5, 2], away from t = 0 where ln|t| and |t|^λ
/// factors are singular.
pub fn sample_points(count: usize) -> Vec<Point> {
    sample_points_in(count, 0.5, 2.0)
}

#[derive(Clone, Debug, PartialEq)]
pub struct Decomposition {
    pub coefficients: Vec<f64>,
    /// Max over sample points of the Euclidean norm of X − Σ c_k B_k.
    pub residual: f64,
}

/// Least-squares coefficients of X in span(basis) over the sample points.
pub fn decompose_in_span(
    x: &SymmetryGenerator,
    basis: &[SymmetryGenerator],
    points: &[Point],
) -> Result<Decomposition> {
    let k = basis.len();
    if k == 0 {
        let residual = points.iter().map(|p| norm(&x.values(*p))).fold(0.0, f64::max);
        return Ok(Decomposition {
            coefficients: vec![],
            residual,
        });
    }
    if points.len() < 2 * k {
        return Err(Error::InvalidArgument(format!(
            "{} sample points for {k} basis elements; need at least {}",
            points.len(),
            2 * k
        )));
    }
    let rows = 4 * points.len();
    let mut a = DMatrix::<f64>::zeros(rows, k);
    let mut rhs = DVector::<f64>::zeros(rows);
    for (pi, p) in points.iter().enumerate() {
        for (c, b) in basis.iter().enumerate() {
            let v = b.values(*p);
            for i in 0..4 {
                a[(4 * pi + i, c)] = v[i];
            }
        }
        let v = x.values(*p);
        for i in 0..4 {
            rhs[4 * pi + i] = v[i];
        }
    }
    if a.iter().chain(rhs.iter()).any(|v| !v.is_finite()) {
        return Err(Error::Domain("generator not finite at a sample point".into()));
    }
    let mut scales = vec![1.0; k];
    for (c, s) in scales.iter_mut().enumerate() {
        let n = a.column(c).norm();
        if n == 0.0 {
            return Err(Error::IllConditioned(format!("basis element {} vanishes on the sample", basis[c].label)));
        }
        *s = n;
        a.column_mut(c).scale_mut(1.0 / n);
    }
    let svd = a.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    if !(smin > 1e-10 * smax) {
        return Err(Error::IllConditioned(format!(
            "sample matrix is rank deficient (singular value ratio {:.3e})",
            smin / smax
        )));
    }
    let sol = svd
        .solve(&rhs, 0.0)
        .map_err(|e| Error::IllConditioned(e.to_string()))?;
    let coefficients: Vec<f64> = (0..k).map(|c| sol[c] / scales[c]).collect();
    let fit = &a * &sol;
    let mut residual: f64 = 0.0;
    for pi in 0..points.len() {
        let r: f64 = (0..4)
            .map(|i| (rhs[4 * pi + i] - fit[4 * pi + i]).powi(2))
            .sum::<f64>()
            .sqrt();
        residual = residual.max(r);
    }
    Ok(Decomposition {
        coefficients,
        residual,
    })
}

fn norm(v: &[f64; 4]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

#[derive(Clone, Debug, PartialEq)]
pub struct PairResult {
    pub i: usize,
    pub j: usize,
    pub coefficients: Vec<f64>,
    pub residual: f64,
    pub pass: bool,
}

/// Structure constants c_{ij}^k with [B_i, B_j] = Σ_k c_{ij}^k B_k.
#[derive(Clone, Debug)]
pub struct StructureTable {
    pub labels: Vec<String>,
    /// `c[i][j][k]`.
    pub c: Vec<Vec<Vec<f64>>>,
    pub pairs: Vec<PairResult>,
    /// Max |Σ_l c_ij^l c_lk^m + cyclic| over all triples.
    pub jacobi_residual: f64,
    pub tolerance: f64,
}

impl StructureTable {
    pub fn max_residual(&self) -> f64 {
        self.pairs.iter().map(|p| p.residual).fold(0.0, f64::max)
    }

    pub fn closed(&self) -> bool {
        self.pairs.iter().all(|p| p.pass)
    }

    /// `pair_i,pair_j,residual,pass` rows.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("pair_i,pair_j,residual,pass\n");
        for p in &self.pairs {
            s.push_str(&format!(
                "{},{},{:.16e},{}\n",
                self.labels[p.i], self.labels[p.j], p.residual, p.pass
            ));
        }
        s
    }

    /// Aligned text table of the nonzero brackets.
    pub fn to_text(&self) -> String {
        let w = self.labels.iter().map(|l| l.chars().count()).max().unwrap_or(1);
        let mut s = String::new();
        for p in &self.pairs {
            let mut rhs = String::new();
            for (k, c) in p.coefficients.iter().enumerate() {
                let c = round_coeff(*c);
                if c == 0.0 {
                    continue;
                }
                if !rhs.is_empty() {
                    rhs.push_str(if c < 0.0 { " - " } else { " + " });
                } else if c < 0.0 {
                    rhs.push('-');
                }
                if c.abs() != 1.0 {
                    rhs.push_str(&format!("{}·", c.abs()));
                }
                rhs.push_str(&self.labels[k]);
            }
            if rhs.is_empty() {
                rhs.push('0');
            }
            s.push_str(&format!(
                "[{:>w$}, {:>w$}] = {:<30} residual {:.3e} {}\n",
                self.labels[p.i],
                self.labels[p.j],
                rhs,
                p.residual,
                if p.pass { "ok" } else { "NOT CLOSED" },
                w = w
            ));
        }
        s.push_str(&format!("Jacobi residual {:.3e}\n", self.jacobi_residual));
        s
    }
}

fn round_coeff(c: f64) -> f64 {
    let r = (c * 1e8).round() / 1e8;
    if r == 0.0 {
        0.0
    } else {
        r
    }
}

/// Brackets of all pairs i < j decomposed in the span of the basis.
pub fn structure_constants(basis: &[SymmetryGenerator], points: &[Point], tol: f64) -> Result<StructureTable> {
    let n = basis.len();
    let mut c = vec![vec![vec![0.0; n]; n]; n];
    let mut pairs = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let br = commutator(&basis[i], &basis[j]);
            let d = decompose_in_span(&br, basis, points)?;
            for k in 0..n {
                c[i][j][k] = d.coefficients[k];
                c[j][i][k] = -d.coefficients[k];
            }
            pairs.push(PairResult {
                i,
                j,
                pass: d.residual <= tol,
                coefficients: d.coefficients,
                residual: d.residual,
            });
        }
    }
    let mut jacobi: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for m in 0..n {
                    let mut s = 0.0;
                    for l in 0..n {
                        s += c[i][j][l] * c[l][k][m] + c[j][k][l] * c[l][i][m] + c[k][i][l] * c[l][j][m];
                    }
                    jacobi = jacobi.max(s.abs());
                }
            }
        }
    }
    Ok(StructureTable {
        labels: basis.iter().map(|b| b.label.clone()).collect(),
        c,
        pairs,
        jacobi_residual: jacobi,
        tolerance: tol,
    })
}

/// Ad(e^{εX})Y: the pushforward of Y along the flow of X,
/// (Ad Y)(q) = DΦ_{−ε}(Φ_ε(q)) · Y(Φ_ε(q)).
pub fn adjoint(x: &SymmetryGenerator, eps: f64, y: &SymmetryGenerator) -> SymmetryGenerator {
    let fwd = flow(x, eps);
    let back = fwd.inverse();
    let y2 = y.clone();
    SymmetryGenerator::from_oracle(format!("Ad(exp({eps}·{})){}", x.label, y.label), move |q| {
        let (p, jac) = match fwd.apply(q).and_then(|p| back.jacobian(p).map(|j| (p, j))) {
            Ok(v) => v,
            Err(_) => return [f64::NAN; 4],
        };
        let v = y2.values(p);
        let mut out = [0.0; 4];
        for i in 0..4 {
            for j in 0..4 {
                out[i] += jac[i][j] * v[j];
            }
        }
        out
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symmetry::quasipoly::QuasiPoly;
    use std::f64::consts::PI;

    fn pts() -> Vec<Point> {
        sample_points(50)
    }

    fn assert_equal(a: &SymmetryGenerator, b: &SymmetryGenerator, tol: f64) {
        for p in pts() {
            let (va, vb) = (a.values(p), b.values(p));
            for i in 0..4 {
                assert!((va[i] - vb[i]).abs() < tol, "{a} vs {b} at {p:?}: {va:?} {vb:?}");
            }
        }
    }

    #[test]
    fn so3_brackets() {
        let (j1, j2, j3) = (SymmetryGenerator::j1(), SymmetryGenerator::j2(), SymmetryGenerator::j3());
        assert_equal(&commutator(&j1, &j2), &j3, 1e-8);
        assert_equal(&commutator(&j2, &j3), &j1, 1e-8);
        assert_equal(&commutator(&j3, &j1), &j2, 1e-8);
    }

    #[test]
    fn g2_and_ideal_brackets() {
        let (d, dt) = (SymmetryGenerator::d(), SymmetryGenerator::dt());
        assert_equal(&commutator(&d, &dt), &dt.scaled(-1.0), 1e-12);
        let g = QuasiPoly::exp_poly(1, 0.3);
        let z = SymmetryGenerator::z_poly(g.clone());
        let expected = SymmetryGenerator::z_poly(g.derivative().times_t().add(&g));
        assert_equal(&commutator(&d, &z), &expected, 1e-12);
        assert_equal(&commutator(&d, &SymmetryGenerator::z_power(0)), &SymmetryGenerator::z_power(0), 1e-15);
    }

    #[test]
    fn antisymmetry_and_jacobi() {
        let gens = [
            SymmetryGenerator::d(),
            SymmetryGenerator::dt(),
            SymmetryGenerator::j1(),
            SymmetryGenerator::j2(),
            SymmetryGenerator::j3(),
            SymmetryGenerator::z_power(2),
        ];
        let p = pts();
        for a in &gens {
            for b in &gens {
                let s = commutator(a, b).plus(&commutator(b, a));
                for q in &p {
                    assert!(s.values(*q).iter().all(|v| v.abs() < 1e-10));
                }
            }
        }
        for a in &gens {
            for b in &gens {
                for c in &gens {
                    let cyc = commutator(a, &commutator(b, c))
                        .plus(&commutator(b, &commutator(c, a)))
                        .plus(&commutator(c, &commutator(a, b)));
                    for q in p.iter().take(10) {
                        let v = cyc.values(*q);
                        assert!(v.iter().all(|x| x.abs() < 1e-7), "{a},{b},{c}: {v:?}");
                    }
                }
            }
        }
    }

    #[test]
    fn span_decomposition() {
        let basis = [SymmetryGenerator::j1(), SymmetryGenerator::j2(), SymmetryGenerator::j3()];
        let d = decompose_in_span(&SymmetryGenerator::j3(), &basis, &pts()).unwrap();
        assert!(d.residual < 1e-10);
        assert!((d.coefficients[2] - 1.0).abs() < 1e-10 && d.coefficients[0].abs() < 1e-10);
        let br = commutator(&basis[0], &basis[1]);
        let d = decompose_in_span(&br, &basis[..2], &pts()).unwrap();
        assert!(d.residual > 0.1);
        let five: Vec<_> = super::super::generator::standard_generators();
        let x = SymmetryGenerator::linear_combination(&[(2.0, &five[2]), (0.5, &five[0])]);
        let d = decompose_in_span(&x, &five, &pts()).unwrap();
        let want = [0.5, 0.0, 2.0, 0.0, 0.0];
        for k in 0..5 {
            assert!((d.coefficients[k] - want[k]).abs() < 1e-10);
        }
        let dup = [SymmetryGenerator::j1(), SymmetryGenerator::j1().scaled(2.0)];
        assert!(matches!(decompose_in_span(&br, &dup, &pts()), Err(Error::IllConditioned(_))));
    }

    #[test]
    fn small_tables() {
        let so3 = [SymmetryGenerator::j1(), SymmetryGenerator::j2(), SymmetryGenerator::j3()];
        let t = structure_constants(&so3, &pts(), 1e-8).unwrap();
        assert!(t.closed() && t.jacobi_residual < 1e-8);
        assert!((t.c[0][1][2] - 1.0).abs() < 1e-9);
        let g2 = [SymmetryGenerator::d(), SymmetryGenerator::dt()];
        let t = structure_constants(&g2, &pts(), 1e-8).unwrap();
        assert!((t.c[0][1][1] + 1.0).abs() < 1e-12);
        let ab = [SymmetryGenerator::j1(), SymmetryGenerator::z_power(0)];
        let t = structure_constants(&ab, &pts(), 1e-8).unwrap();
        assert!(t.c[0][1].iter().all(|c| c.abs() < 1e-14));
        assert!(t.to_csv().starts_with("pair_i,pair_j,residual,pass\nJ1,Z(1),"));
    }

    #[test]
    fn adjoint_rotations() {
        let (j1, j2, j3) = (SymmetryGenerator::j1(), SymmetryGenerator::j2(), SymmetryGenerator::j3());
        assert_equal(&adjoint(&j2, -PI / 2.0, &j1), &j3, 1e-9);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let want = SymmetryGenerator::linear_combination(&[(s, &j1), (-s, &j3)]);
        assert_equal(&adjoint(&j2, PI / 4.0, &j1), &want, 1e-9);
        assert_equal(&adjoint(&SymmetryGenerator::d(), 0.0, &j2), &j2, 1e-12);
    }

    #[test]
    fn adjoint_matches_bracket_series() {
        let x = SymmetryGenerator::j3();
        let y = SymmetryGenerator::j1().plus(&SymmetryGenerator::d());
        let eps = 0.05;
        let mut terms = vec![y.clone()];
        for k in 1..=4 {
            let next = commutator(&x, &terms[k - 1]);
            terms.push(next);
        }
        let mut coef = 1.0;
        let mut weighted = Vec::new();
        for (k, t) in terms.iter().enumerate() {
            if k > 0 {
                coef *= eps / k as f64;
            }
            weighted.push((coef, t));
        }
        let series = SymmetryGenerator::linear_combination(&weighted);
        // Remainder ε⁵/5! · |ad⁵Y| ≈ 3e-9.
        let a = adjoint(&x, eps, &y);
        for p in pts().into_iter().take(10) {
            let (u, v) = (a.values(p), series.values(p));
            for i in 0..4 {
                assert!((u[i] - v[i]).abs() < 1e-7, "{u:?} vs {v:?}");
            }
        }
    }
}
