//! Curve configuration files.
//!
//! ```toml
//! N = 3
//! R = [1, 1, 2, 2]
//! lambda = [[0, 0], [1, 0], [0, 1], 3]   # [re, im] or a bare real
//! base_x = [0.5, -1.0]                   # optional
//!
//! [deformation]                          # optional, used by `verify`
//! index = 2
//! target = [0, 1.4]
//! steps = 10
//! ```

use std::path::Path;

use cyclic_thomae::Curve;
use num_complex::Complex64;
use serde::Deserialize;

#[derive(Debug)]
pub struct InputError(pub String);

impl std::fmt::Display for InputError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(untagged)]
pub enum Number {
    Real(f64),
    Pair([f64; 2]),
}

impl From<Number> for Complex64 {
    fn from(n: Number) -> Self {
        match n {
            Number::Real(x) => Complex64::new(x, 0.0),
            Number::Pair([re, im]) => Complex64::new(re, im),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Deformation {
    pub index: usize,
    pub target: Number,
    pub steps: usize,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurveConfig {
    #[serde(rename = "N")]
    pub n: u32,
    #[serde(rename = "R")]
    pub r: Vec<u32>,
    pub lambda: Vec<Number>,
    pub base_x: Option<Number>,
    pub deformation: Option<Deformation>,
}

impl CurveConfig {
    pub fn load(path: &Path) -> Result<Self, InputError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| InputError(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, InputError> {
        let cfg: Self = toml::from_str(text).map_err(|e| InputError(format!("config: {}", e.message())))?;
        if cfg.lambda.len() != cfg.r.len() {
            return Err(InputError(format!(
                "config: `lambda` has {} entries but `R` has {}",
                cfg.lambda.len(),
                cfg.r.len()
            )));
        }
        if let Some(d) = &cfg.deformation {
            if d.steps == 0 {
                return Err(InputError("config: `deformation.steps` must be at least 1".into()));
            }
            if d.index >= cfg.r.len() {
                return Err(InputError(format!("config: `deformation.index` = {} is out of range", d.index)));
            }
        }
        Ok(cfg)
    }

    pub fn curve(&self) -> Result<Curve, InputError> {
        let lambda: Vec<Complex64> = self.lambda.iter().map(|&l| l.into()).collect();
        let base = match self.base_x {
            Some(b) => b.into(),
            None => default_base(&lambda),
        };
        let spec = Curve::new(self.n, self.r.clone(), lambda, base);
        spec.validate().map_err(|e| InputError(format!("config (`N`, `R`, `lambda`, `base_x`): {e}")))?;
        Ok(spec)
    }

    pub fn deformation_path(&self, spec: &Curve) -> Option<Vec<Vec<Complex64>>> {
        self.deformation.as_ref().map(|d| {
            cyclic_thomae::thomae::linear_deformation(spec, d.index, d.target.into(), d.steps)
        })
    }
}

/// A point below every branch point, off the vertical lines through them.
fn default_base(lambda: &[Complex64]) -> Complex64 {
    let lo = lambda.iter().map(|l| l.im).fold(f64::INFINITY, f64::min);
    let (re_lo, re_hi) = lambda.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), l| (a.min(l.re), b.max(l.re)));
    let spread = (re_hi - re_lo).max(1.0);
    Complex64::new(0.5 * (re_lo + re_hi) + 0.137 * spread, lo - 0.5 * spread)
}
