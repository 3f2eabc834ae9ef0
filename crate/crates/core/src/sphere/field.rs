use std::io::{BufRead, Write};

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::frame::Frame;
use crate::sphere::grid::SphereGrid;

/// Grid values of a scalar at one time instant. `values` is latitude-major:
/// `values[j * nlon + k]` sits at (λ_k, μ_j).
#[derive(Clone, Debug, PartialEq)]
pub struct ScalarField {
    pub grid: SphereGrid,
    pub values: Vec<f64>,
    pub time: f64,
    pub frame: Frame,
}

impl ScalarField {
    pub fn new(grid: SphereGrid, values: Vec<f64>, time: f64, frame: Frame) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::InvalidArgument(format!(
                "field has {} values, grid has {} nodes",
                values.len(),
                grid.len()
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "non-finite value at node {i}"
            )));
        }
        Ok(ScalarField {
            grid,
            values,
            time,
            frame,
        })
    }

    /// Samples `f(λ, μ)` at every node.
    pub fn from_fn(
        grid: SphereGrid,
        time: f64,
        frame: Frame,
        mut f: impl FnMut(f64, f64) -> Result<f64>,
    ) -> Result<Self> {
        let mut values = Vec::with_capacity(grid.len());
        for &mu in &grid.mu_nodes {
            for &lam in &grid.lambda_nodes {
                values.push(f(lam, mu)?);
            }
        }
        ScalarField::new(grid, values, time, frame)
    }

    pub fn at(&self, j: usize, k: usize) -> f64 {
        self.values[j * self.grid.nlon + k]
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |a, v| a.max(v.abs()))
    }

    /// The field translated east by `delta`: new(λ, μ) = old(λ − δ, μ),
    /// exact for the trigonometric interpolant of each latitude row.
    pub fn shift_longitude(&self, delta: f64) -> ScalarField {
        let nlon = self.grid.nlon;
        let mut planner = FftPlanner::<f64>::new();
        let fwd = planner.plan_fft_forward(nlon);
        let inv = planner.plan_fft_inverse(nlon);
        let mut values = Vec::with_capacity(self.values.len());
        let mut row = vec![Complex64::new(0.0, 0.0); nlon];
        for j in 0..self.grid.nlat {
            for (k, r) in row.iter_mut().enumerate() {
                *r = Complex64::new(self.at(j, k), 0.0);
            }
            fwd.process(&mut row);
            for (k, r) in row.iter_mut().enumerate() {
                if 2 * k == nlon {
                    // Nyquist mode: keep the real cos(Nλ) interpolant.
                    *r *= (k as f64 * delta).cos();
                } else {
                    let m = if 2 * k < nlon { k as f64 } else { k as f64 - nlon as f64 };
                    *r *= Complex64::from_polar(1.0, -m * delta);
                }
            }
            inv.process(&mut row);
            values.extend(row.iter().map(|c| c.re / nlon as f64));
        }
        ScalarField {
            grid: self.grid.clone(),
            values,
            time: self.time,
            frame: self.frame,
        }
    }

    /// Adds `f(μ)` at every node.
    pub fn add_zonal(&self, f: impl Fn(f64) -> f64) -> ScalarField {
        let mut out = self.clone();
        let nlon = self.grid.nlon;
        for (j, &mu) in self.grid.mu_nodes.iter().enumerate() {
            let v = f(mu);
            for x in &mut out.values[j * nlon..(j + 1) * nlon] {
                *x += v;
            }
        }
        out
    }
}

/// Formats a float with 17 significant digits.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// Writes ψ (and optionally ζ on the same grid) in the CSV field format:
/// `#`-prefixed metadata, header `lambda,mu,psi[,zeta]`, then one row per
/// node with longitude as the outer loop.
pub fn write_field_csv<W: Write>(
    out: &mut W,
    psi: &ScalarField,
    zeta: Option<&ScalarField>,
) -> Result<()> {
    if let Some(z) = zeta {
        if z.grid != psi.grid {
            return Err(Error::InvalidArgument(
                "psi and zeta live on different grids".into(),
            ));
        }
    }
    let g = &psi.grid;
    writeln!(out, "# schema=1")?;
    writeln!(out, "# frame={}", psi.frame.name())?;
    writeln!(out, "# omega={}", fmt_f64(psi.frame.omega()))?;
    writeln!(out, "# t={}", fmt_f64(psi.time))?;
    writeln!(out, "# nlat={}", g.nlat)?;
    writeln!(out, "# nlon={}", g.nlon)?;
    if zeta.is_some() {
        writeln!(out, "lambda,mu,psi,zeta")?;
    } else {
        writeln!(out, "lambda,mu,psi")?;
    }
    for k in 0..g.nlon {
        for j in 0..g.nlat {
            write!(
                out,
                "{},{},{}",
                fmt_f64(g.lambda_nodes[k]),
                fmt_f64(g.mu_nodes[j]),
                fmt_f64(psi.at(j, k))
            )?;
            if let Some(z) = zeta {
                write!(out, ",{}", fmt_f64(z.at(j, k)))?;
            }
            writeln!(out)?;
        }
    }
    Ok(())
}

/// Reads a file written by [`write_field_csv`].
pub fn read_field_csv<R: BufRead>(input: R) -> Result<(ScalarField, Option<ScalarField>)> {
    let mut frame_name = None;
    let mut omega = 0.0;
    let mut time = 0.0;
    let mut nlat = None;
    let mut nlon = None;
    let mut header: Option<Vec<String>> = None;
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (lineno, line) in input.lines().enumerate() {
        let line = line?;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let perr = |msg: String| Error::Parse(format!("line {}: {msg}", lineno + 1));
        if let Some(meta) = line.strip_prefix('#') {
            let Some((k, v)) = meta.trim().split_once('=') else {
                continue;
            };
            let (k, v) = (k.trim(), v.trim());
            let num = |v: &str| v.parse::<f64>().map_err(|e| perr(format!("{k}: {e}")));
            match k {
                "schema" if v != "1" => return Err(perr(format!("unsupported schema {v}"))),
                "frame" => frame_name = Some(v.to_string()),
                "omega" => omega = num(v)?,
                "t" => time = num(v)?,
                "nlat" => nlat = Some(v.parse::<usize>().map_err(|e| perr(e.to_string()))?),
                "nlon" => nlon = Some(v.parse::<usize>().map_err(|e| perr(e.to_string()))?),
                _ => {}
            }
            continue;
        }
        if header.is_none() {
            let cols: Vec<String> = line.split(',').map(|s| s.trim().to_string()).collect();
            if cols.len() < 3 || cols[0] != "lambda" || cols[1] != "mu" || cols[2] != "psi" {
                return Err(perr(format!("unexpected header `{line}`")));
            }
            header = Some(cols);
            continue;
        }
        let vals = line
            .split(',')
            .map(|s| s.trim().parse::<f64>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|e| perr(e.to_string()))?;
        if vals.len() != header.as_ref().map_or(0, |h| h.len()) {
            return Err(perr("column count does not match header".into()));
        }
        rows.push(vals);
    }
    let header = header.ok_or_else(|| Error::Parse("missing header row".into()))?;
    let (nlat, nlon) = match (nlat, nlon) {
        (Some(a), Some(b)) => (a, b),
        _ => return Err(Error::Parse("missing nlat/nlon metadata".into())),
    };
    let frame = match frame_name.as_deref() {
        Some("rotating") => Frame::Rotating { omega },
        Some("rest") => Frame::Rest,
        other => return Err(Error::Parse(format!("unknown frame {other:?}"))),
    };
    let grid = SphereGrid::new(nlat, nlon)?;
    if rows.len() != grid.len() {
        return Err(Error::Parse(format!(
            "expected {} rows, found {}",
            grid.len(),
            rows.len()
        )));
    }
    let has_zeta = header.len() > 3;
    let mut psi = vec![0.0; grid.len()];
    let mut zeta = vec![0.0; grid.len()];
    for (i, row) in rows.iter().enumerate() {
        let k = i / nlat;
        let j = i % nlat;
        psi[j * nlon + k] = row[2];
        if has_zeta {
            zeta[j * nlon + k] = row[3];
        }
    }
    let psi = ScalarField::new(grid.clone(), psi, time, frame)?;
    let zeta = if has_zeta {
        Some(ScalarField::new(grid, zeta, time, frame)?)
    } else {
        None
    };
    Ok((psi, zeta))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_round_trip_is_exact() {
        let grid = SphereGrid::new(4, 6).unwrap();
        let psi = ScalarField::from_fn(grid.clone(), 0.25, Frame::Rotating { omega: 1.5 }, |l, m| {
            Ok(l.sin() * m + 1.0 / 3.0)
        })
        .unwrap();
        let zeta = ScalarField::from_fn(grid, 0.25, Frame::Rotating { omega: 1.5 }, |l, m| {
            Ok(l * m)
        })
        .unwrap();
        let mut buf = Vec::new();
        write_field_csv(&mut buf, &psi, Some(&zeta)).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("# schema=1\n# frame=rotating\n"));
        assert!(text.contains("lambda,mu,psi,zeta\n"));
        let (p2, z2) = read_field_csv(&buf[..]).unwrap();
        assert_eq!(p2, psi);
        assert_eq!(z2.unwrap(), zeta);
    }

    #[test]
    fn longitude_shift_is_exact_for_band_limited_rows() {
        let grid = SphereGrid::new(3, 16).unwrap();
        let f = |l: f64, m: f64| (3.0 * l).cos() * m + (5.0 * l - 0.3).sin() + 0.5;
        let psi = ScalarField::from_fn(grid.clone(), 0.0, Frame::Rest, |l, m| Ok(f(l, m))).unwrap();
        let shifted = psi.shift_longitude(0.7);
        let want = ScalarField::from_fn(grid, 0.0, Frame::Rest, |l, m| Ok(f(l - 0.7, m))).unwrap();
        for (a, b) in shifted.values.iter().zip(&want.values) {
            assert!((a - b).abs() < 1e-14);
        }
        let back = shifted.shift_longitude(-0.7);
        for (a, b) in back.values.iter().zip(&psi.values) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn rejects_non_finite_values() {
        let grid = SphereGrid::new(2, 2).unwrap();
        assert!(ScalarField::new(grid, vec![0.0, 1.0, f64::NAN, 2.0], 0.0, Frame::Rest).is_err());
    }

    #[test]
    fn rejects_bad_header() {
        let text = "# schema=1\n# frame=rest\n# nlat=1\n# nlon=1\nx,y,z\n";
        assert!(matches!(read_field_csv(text.as_bytes()), Err(Error::Parse(_))));
    }
}
