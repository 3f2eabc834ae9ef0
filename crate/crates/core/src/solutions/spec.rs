//! Flat `key = value` text description of a solution, used by the CLI.
//!
//! ```text
//! family = rh
//! n = 20
//! mode = 3:100:0
//! mode = 8:150:1.5
//! a = rh-classic
//! omega = 1
//! ```
//!
//! Families and their keys (defaults in brackets):
//! - `rh`: n, mode (repeated `m:A:delta`), a (number or `rh-classic`), omega [1]
//! - `rh-classic`: n, m, amplitude [1], omega [1]
//! - `solid-body`: omega [1]
//! - `arctanh`: g, f, h, w [zero], delta [1e-3], omega (absent: rest frame), global [false]
//! - `rotated-arctanh`: f, h, W [zero], delta [1e-3]
//! - `ibragimov1`, `ibragimov2`: c1, c2 [0], nu [1], r0 [0.5], H [zero], delta [1e-3]
//! - `test-nonsolution`: omega [1]

use std::collections::BTreeSet;
use std::fmt;

use super::{
    arctanh_family, ibragimov_psi1, ibragimov_psi2, rh_classic, rh_generalized, rotated_arctanh,
    solid_body, test_nonsolution, AnalyticSolution, ArctanhParams, IbragimovParams, Profile,
    RHWaveParams, WaveMode,
};
use crate::error::{Error, Result};
use crate::frame::Frame;

pub const FAMILIES: &[&str] = &[
    "rh",
    "rh-classic",
    "solid-body",
    "arctanh",
    "rotated-arctanh",
    "ibragimov1",
    "ibragimov2",
    "test-nonsolution",
];

fn allowed_keys(family: &str) -> Option<&'static [&'static str]> {
    Some(match family {
        "rh" => &["n", "mode", "a", "omega"],
        "rh-classic" => &["n", "m", "amplitude", "omega"],
        "solid-body" | "test-nonsolution" => &["omega"],
        "arctanh" => &["g", "f", "h", "w", "delta", "omega", "global"],
        "rotated-arctanh" => &["f", "h", "W", "delta"],
        "ibragimov1" | "ibragimov2" => &["c1", "c2", "nu", "r0", "H", "delta"],
        _ => return None,
    })
}

/// A family name plus its parameters, in insertion order.
#[derive(Clone, Debug, PartialEq)]
pub struct SolutionSpec {
    pub family: String,
    pub params: Vec<(String, String)>,
}

impl SolutionSpec {
    /// Builds a spec from key/value pairs; one of them must be `family`.
    pub fn from_pairs<K, V>(pairs: impl IntoIterator<Item = (K, V)>) -> Result<Self>
    where
        K: AsRef<str>,
        V: AsRef<str>,
    {
        let mut family = None;
        let mut params = Vec::new();
        for (k, v) in pairs {
            let (k, v) = (k.as_ref().trim(), v.as_ref().trim());
            if k == "family" {
                if family.replace(v.to_string()).is_some() {
                    return Err(Error::Parse("family given twice".into()));
                }
            } else {
                params.push((k.to_string(), v.to_string()));
            }
        }
        let family = family.ok_or_else(|| Error::Parse("missing `family`".into()))?;
        let keys = allowed_keys(&family).ok_or_else(|| {
            Error::Parse(format!(
                "unknown family `{family}` (expected one of {})",
                FAMILIES.join(", ")
            ))
        })?;
        let mut seen = BTreeSet::new();
        for (k, _) in &params {
            if !keys.contains(&k.as_str()) {
                return Err(Error::Parse(format!(
                    "key `{k}` does not apply to family `{family}`"
                )));
            }
            if k != "mode" && !seen.insert(k.clone()) {
                return Err(Error::Parse(format!("key `{k}` given twice")));
            }
        }
        Ok(SolutionSpec { family, params })
    }

    /// Parses `key = value` lines; blank lines and `#` comments are skipped.
    pub fn parse(text: &str) -> Result<Self> {
        let mut pairs = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or_default().trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("line {}: expected `key = value`", i + 1)))?;
            pairs.push((k.trim().to_string(), v.trim().to_string()));
        }
        Self::from_pairs(pairs)
    }

    pub fn to_text(&self) -> String {
        self.to_string()
    }

    fn get(&self, key: &str) -> Option<&str> {
        self.params.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    fn num(&self, key: &str, default: Option<f64>) -> Result<f64> {
        match self.get(key) {
            Some(v) => v
                .parse::<f64>()
                .map_err(|e| Error::Parse(format!("`{key} = {v}`: {e}"))),
            None => default.ok_or_else(|| Error::Parse(format!("missing `{key}`"))),
        }
    }

    fn int(&self, key: &str, default: Option<usize>) -> Result<usize> {
        match self.get(key) {
            Some(v) => v
                .parse::<usize>()
                .map_err(|e| Error::Parse(format!("`{key} = {v}`: {e}"))),
            None => default.ok_or_else(|| Error::Parse(format!("missing `{key}`"))),
        }
    }

    fn profile(&self, key: &str) -> Result<Profile> {
        self.get(key).map_or(Ok(Profile::zero()), Profile::parse)
    }

    fn modes(&self) -> Result<Vec<WaveMode>> {
        self.params
            .iter()
            .filter(|(k, _)| k == "mode")
            .map(|(_, v)| parse_mode(v))
            .collect()
    }

    pub fn build(&self) -> Result<AnalyticSolution> {
        match self.family.as_str() {
            "rh" => {
                let n = self.int("n", None)?;
                let omega = self.num("omega", Some(1.0))?;
                let a = match self.get("a") {
                    Some("rh-classic") => {
                        let nn = (n * (n + 1)) as f64;
                        (nn - 2.0) / nn * omega
                    }
                    _ => self.num("a", None)?,
                };
                rh_generalized(RHWaveParams {
                    n,
                    modes: self.modes()?,
                    a,
                    omega,
                })
            }
            "rh-classic" => rh_classic(
                self.int("n", None)?,
                self.int("m", None)?,
                self.num("amplitude", Some(1.0))?,
                self.num("omega", Some(1.0))?,
            ),
            "solid-body" => Ok(solid_body(self.num("omega", Some(1.0))?)),
            "test-nonsolution" => Ok(test_nonsolution(self.num("omega", Some(1.0))?)),
            "arctanh" => {
                let frame = match self.get("omega") {
                    None => Frame::Rest,
                    Some(_) => Frame::Rotating {
                        omega: self.num("omega", None)?,
                    },
                };
                let global = match self.get("global") {
                    None | Some("false") => false,
                    Some("true") => true,
                    Some(v) => return Err(Error::Parse(format!("`global = {v}`: expected true or false"))),
                };
                arctanh_family(ArctanhParams {
                    g: self.profile("g")?,
                    f: self.profile("f")?,
                    h: self.profile("h")?,
                    w: self.profile("w")?,
                    delta: self.num("delta", Some(1e-3))?,
                    frame,
                    global,
                })
            }
            "rotated-arctanh" => rotated_arctanh(
                self.profile("f")?,
                self.profile("h")?,
                self.profile("W")?,
                self.num("delta", Some(1e-3))?,
            ),
            "ibragimov1" | "ibragimov2" => {
                let mut p = IbragimovParams::new(
                    self.num("c1", Some(0.0))?,
                    self.num("c2", Some(0.0))?,
                    self.num("nu", Some(1.0))?,
                    self.num("r0", Some(0.5))?,
                    self.profile("H")?,
                );
                p.delta = self.num("delta", Some(1e-3))?;
                if self.family == "ibragimov1" {
                    ibragimov_psi1(p)
                } else {
                    ibragimov_psi2(p)
                }
            }
            other => Err(Error::Parse(format!("unknown family `{other}`"))),
        }
    }
}

impl fmt::Display for SolutionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "family = {}", self.family)?;
        for (k, v) in &self.params {
            writeln!(f, "{k} = {v}")?;
        }
        Ok(())
    }
}

/// Parses `m:A:delta` (delta optional).
pub fn parse_mode(s: &str) -> Result<WaveMode> {
    let parts: Vec<&str> = s.split(':').map(str::trim).collect();
    if parts.len() < 2 || parts.len() > 3 {
        return Err(Error::Parse(format!("mode `{s}`: expected m:A[:delta]")));
    }
    let m = parts[0]
        .parse::<usize>()
        .map_err(|e| Error::Parse(format!("mode `{s}`: {e}")))?;
    let num = |p: &str| {
        p.parse::<f64>()
            .map_err(|e| Error::Parse(format!("mode `{s}`: {e}")))
    };
    let amplitude = num(parts[1])?;
    let phase = parts.get(2).map_or(Ok(0.0), |p| num(p))?;
    Ok(WaveMode::new(m, amplitude, phase))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_build_and_round_trip() {
        let text = "# wave\nfamily = rh\nn = 20\nmode = 3:100:0\nmode = 8:150:1.5\na = rh-classic\nomega = 1\n";
        let spec = SolutionSpec::parse(text).unwrap();
        assert_eq!(spec.family, "rh");
        assert_eq!(SolutionSpec::parse(&spec.to_text()).unwrap(), spec);
        let s = spec.build().unwrap();
        assert_eq!(s.omega(), 1.0);
        assert!(s.psi(0.0, 0.1, 0.3).unwrap().is_finite());
    }

    #[test]
    fn families_build_with_defaults() {
        for (fam, extra) in [
            ("solid-body", vec![]),
            ("rh-classic", vec![("n", "4"), ("m", "4")]),
            ("arctanh", vec![("h", "const:1")]),
            ("arctanh", vec![("h", "const:1"), ("omega", "1")]),
            ("rotated-arctanh", vec![("h", "identity")]),
            ("ibragimov1", vec![("c1", "1"), ("H", "power:2")]),
            ("ibragimov2", vec![("c2", "1")]),
            ("test-nonsolution", vec![]),
        ] {
            let mut pairs = vec![("family", fam)];
            pairs.extend(extra);
            let spec = SolutionSpec::from_pairs(pairs).unwrap();
            spec.build().unwrap_or_else(|e| panic!("{fam}: {e}"));
        }
    }

    #[test]
    fn solid_body_value() {
        let s = SolutionSpec::from_pairs([("family", "solid-body"), ("omega", "2")])
            .unwrap()
            .build()
            .unwrap();
        assert_eq!(s.psi(0.0, 0.0, 0.5).unwrap(), 1.0);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(SolutionSpec::parse("family = nope").is_err());
        assert!(SolutionSpec::parse("n = 3").is_err());
        assert!(SolutionSpec::parse("family = rh\nbogus = 1").is_err());
        assert!(SolutionSpec::parse("family = rh\nn = 2\nn = 3").is_err());
        assert!(SolutionSpec::parse("family = rh\nn").is_err());
        let s = SolutionSpec::parse("family = rh\nn = x\na = 0").unwrap();
        assert!(matches!(s.build(), Err(Error::Parse(_))));
        assert!(parse_mode("3").is_err());
        assert_eq!(parse_mode("3:2").unwrap(), WaveMode::new(3, 2.0, 0.0));
    }
}
