//! Run configuration and the divisor syntax used on the command line.

use serde::{Deserialize, Serialize};

use crate::curve::{ClosedPoint, Curve, CurveConfig, XDivisor};
use crate::{Error, Result};

fn default_bound() -> i64 {
    3
}
fn default_hecke_degree() -> u32 {
    2
}
fn default_eis_degree() -> u32 {
    2
}
fn default_r_values() -> Vec<u32> {
    vec![0, 2]
}
fn default_tolerance() -> f64 {
    1e-9
}
fn default_census_fields() -> Vec<u32> {
    vec![3, 5, 7]
}
fn default_reps_max_d() -> u32 {
    3
}
fn default_nonconstant_pairs() -> usize {
    20
}
fn default_orbital_degree() -> u32 {
    2
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub curve: CurveConfig,
    /// Divisor for `orbital`, in the syntax of [`parse_divisor`]. When absent,
    /// every effective divisor up to `orbital_degree` is used.
    #[serde(default)]
    pub divisor: Option<String>,
    #[serde(default = "default_orbital_degree")]
    pub orbital_degree: u32,
    /// Largest instability gap kept in the truncated class space.
    #[serde(default = "default_bound")]
    pub truncation_bound: i64,
    /// Hecke operators are built at every closed point up to this degree.
    #[serde(default = "default_hecke_degree")]
    pub hecke_degree: u32,
    /// Degree bound of the span searched for Eisenstein elements.
    #[serde(default = "default_eis_degree")]
    pub eis_degree: u32,
    #[serde(default = "default_r_values")]
    pub r_values: Vec<u32>,
    #[serde(default = "default_tolerance")]
    pub tolerance: f64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_census_fields")]
    pub census_fields: Vec<u32>,
    #[serde(default = "default_reps_max_d")]
    pub reps_max_d: u32,
    #[serde(default = "default_nonconstant_pairs")]
    pub nonconstant_pairs: usize,
}

impl RunConfig {
    pub fn new(curve: CurveConfig) -> Self {
        RunConfig {
            curve,
            divisor: None,
            orbital_degree: default_orbital_degree(),
            truncation_bound: default_bound(),
            hecke_degree: default_hecke_degree(),
            eis_degree: default_eis_degree(),
            r_values: default_r_values(),
            tolerance: default_tolerance(),
            seed: 0,
            census_fields: default_census_fields(),
            reps_max_d: default_reps_max_d(),
            nonconstant_pairs: default_nonconstant_pairs(),
        }
    }

    /// Reads either a full run configuration (with a `"curve"` key) or a bare
    /// curve configuration, then validates it.
    pub fn from_json(text: &str) -> Result<Self> {
        let value: serde_json::Value = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        let cfg = if value.get("curve").is_some() {
            serde_json::from_value(value).map_err(|e| Error::Config(e.to_string()))?
        } else {
            let curve: CurveConfig = serde_json::from_value(value).map_err(|e| Error::Config(e.to_string()))?;
            RunConfig::new(curve)
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if !(self.tolerance.is_finite() && self.tolerance > 0.0) {
            return bad(format!("tolerance must be positive, got {}", self.tolerance));
        }
        if !(1..=8).contains(&self.truncation_bound) {
            return bad(format!("truncation_bound must lie in 1..=8, got {}", self.truncation_bound));
        }
        if !(1..=3).contains(&self.hecke_degree) || self.hecke_degree > self.curve.degree_bound {
            return bad(format!("hecke_degree must lie in 1..=3 and not exceed degree_bound, got {}", self.hecke_degree));
        }
        if self.eis_degree > self.hecke_degree {
            return bad(format!("eis_degree {} exceeds hecke_degree {}", self.eis_degree, self.hecke_degree));
        }
        if self.orbital_degree > 3 {
            return bad(format!("orbital_degree must be at most 3, got {}", self.orbital_degree));
        }
        if self.r_values.iter().any(|r| r % 2 == 1) {
            return bad("r_values must be even".into());
        }
        if !(1..=4).contains(&self.reps_max_d) {
            return bad(format!("reps_max_d must lie in 1..=4, got {}", self.reps_max_d));
        }
        if self.census_fields.iter().any(|&q| q % 2 == 0 || q < 3) {
            return bad("census_fields must be odd primes".into());
        }
        Curve::new(&self.curve).map(|_| ())
    }
}

/// Parses `n*(P) + (P′) − …` where a point is `(d,i)`, the `i`-th closed
/// point of degree `d` in canonical order, `(Pi)` for `(1,i)`, or `(inf)`.
/// Index `0` of degree 1 is the point at infinity.
pub fn parse_divisor(curve: &Curve, text: &str) -> Result<XDivisor> {
    let err = |m: &str| Error::Config(format!("bad divisor {text:?}: {m}"));
    let mut d = XDivisor::zero();
    let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    if s.is_empty() || s == "0" {
        return Ok(d);
    }
    let mut rest = s.as_str();
    let mut first = true;
    while !rest.is_empty() {
        let mut sign = 1;
        if let Some(r) = rest.strip_prefix('+') {
            rest = r;
        } else if let Some(r) = rest.strip_prefix('-') {
            sign = -1;
            rest = r;
        } else if !first {
            return Err(err("expected + or -"));
        }
        first = false;
        let digits = rest.chars().take_while(|c| c.is_ascii_digit()).count();
        let mut coef = 1;
        if digits > 0 {
            coef = rest[..digits].parse::<i64>().map_err(|_| err("bad coefficient"))?;
            rest = rest[digits..].strip_prefix('*').ok_or_else(|| err("expected * after coefficient"))?;
        }
        let body = rest.strip_prefix('(').ok_or_else(|| err("expected ("))?;
        let close = body.find(')').ok_or_else(|| err("unclosed ("))?;
        let name = &body[..close];
        rest = &body[close + 1..];
        d.add_term(named_point(curve, name).map_err(|m| err(&m))?, sign * coef);
    }
    Ok(d)
}

fn named_point(curve: &Curve, name: &str) -> std::result::Result<ClosedPoint, String> {
    let (deg, idx) = if name.eq_ignore_ascii_case("inf") || name == "O" {
        return Ok(ClosedPoint::Infinity);
    } else if let Some(i) = name.strip_prefix('P') {
        (1u32, i.parse::<usize>().map_err(|_| format!("bad point name {name:?}"))?)
    } else {
        let (a, b) = name.split_once(',').ok_or_else(|| format!("bad point name {name:?}"))?;
        (
            a.parse::<u32>().map_err(|_| format!("bad degree {a:?}"))?,
            b.parse::<usize>().map_err(|_| format!("bad index {b:?}"))?,
        )
    };
    if deg == 0 || deg > curve.degree_bound {
        return Err(format!("degree {deg} outside 1..={}", curve.degree_bound));
    }
    let pts = curve.points_of_degree(deg).map_err(|e| e.to_string())?;
    pts.get(idx).copied().ok_or_else(|| format!("only {} points of degree {deg}", pts.len()))
}

/// Inverse of [`parse_divisor`].
pub fn format_divisor(curve: &Curve, d: &XDivisor) -> String {
    use crate::divisor::Place;
    let mut parts = vec![];
    for (p, &n) in d.iter() {
        let deg = p.degree();
        let idx = curve.points_of_degree(deg).ok().and_then(|v| v.iter().position(|x| x == p)).unwrap_or(usize::MAX);
        let name = if deg == 1 { format!("(P{idx})") } else { format!("({deg},{idx})") };
        parts.push(if n == 1 { name } else { format!("{n}*{name}") });
    }
    if parts.is_empty() {
        "0".into()
    } else {
        parts.join(" + ").replace("+ -", "- ")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn divisor_syntax_round_trips() {
        let c = Curve::new(&CurveConfig::prime(3, 2, 0, 1, 4)).unwrap();
        let d = parse_divisor(&c, "2*(P1) + (inf) - (2,0)").unwrap();
        assert_eq!(d.degree(), 1);
        assert_eq!(d.get(&ClosedPoint::Infinity), 1);
        assert_eq!(parse_divisor(&c, &format_divisor(&c, &d)).unwrap(), d);
        assert!(parse_divisor(&c, "(P99)").is_err());
        assert!(parse_divisor(&c, "2(P1)").is_err());
        assert!(parse_divisor(&c, "(9,0)").is_err());
    }

    #[test]
    fn bare_curve_configs_are_accepted() {
        let cfg = RunConfig::from_json(r#"{"q": 5, "lambda": 3, "e1": 0, "e2": 1, "degree_bound": 4}"#).unwrap();
        assert_eq!(cfg.truncation_bound, 3);
        let full = r#"{"curve": {"q": 5, "lambda": 3, "e1": 0, "e2": 1, "degree_bound": 4}, "tolerance": 1e-10}"#;
        assert_eq!(RunConfig::from_json(full).unwrap().tolerance, 1e-10);
        assert!(RunConfig::from_json(r#"{"curve": {"q": 5, "lambda": 3, "e1": 0, "e2": 1, "degree_bound": 4}, "typo": 1}"#).is_err());
        assert!(RunConfig::from_json(r#"{"q": 4, "lambda": 3, "e1": 0, "e2": 1, "degree_bound": 4}"#).is_err());
    }
}
