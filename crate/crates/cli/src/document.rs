//! JSON description of a Lizorkin distribution. Sampled terms name a `.fld`
//! file, resolved relative to the document's directory.
//!
//! ```json
//! {
//!   "atoms": [{ "coeff": [1, 0], "location": [0, 0], "deriv": [1, 0] }],
//!   "terms": [{ "deriv": [2, 0], "g": { "kind": "ramp" } },
//!             { "g": { "kind": "sampled", "path": "f.fld" } }],
//!   "poly": [{ "power": [1, 1], "coeff": [0.5, 0] }]
//! }
//! ```

use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use shearkit_core::distributions::{LizorkinDistribution, Polynomial, Registry};
use shearkit_core::lizorkin::MultiIndex;

use crate::error::{CliError, Result};
use crate::formats::load_field;

fn one() -> [f64; 2] {
    [1.0, 0.0]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AtomDoc {
    #[serde(default = "one")]
    pub coeff: [f64; 2],
    #[serde(default)]
    pub location: [f64; 2],
    #[serde(default)]
    pub deriv: [usize; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum RegistryDoc {
    Gaussian { width: f64 },
    Ramp,
    Sinusoid { freq: [f64; 2], phase: f64 },
    Abs,
    PolyGaussian { power: [usize; 2], width: f64 },
    Sampled { path: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermDoc {
    #[serde(default = "one")]
    pub coeff: [f64; 2],
    #[serde(default)]
    pub deriv: [usize; 2],
    pub g: RegistryDoc,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MonomialDoc {
    pub power: [usize; 2],
    #[serde(default = "one")]
    pub coeff: [f64; 2],
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DistributionDoc {
    pub atoms: Vec<AtomDoc>,
    pub terms: Vec<TermDoc>,
    pub poly: Vec<MonomialDoc>,
}

fn c(v: [f64; 2]) -> Complex64 {
    Complex64::new(v[0], v[1])
}

fn mi(v: [usize; 2]) -> MultiIndex {
    MultiIndex::new(v[0], v[1])
}

impl DistributionDoc {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| CliError::DistributionInvalid(e.to_string()))
    }

    /// Builds the distribution, loading sampled terms relative to `base`.
    pub fn build(&self, base: &Path) -> Result<LizorkinDistribution> {
        let mut d = LizorkinDistribution::new();
        for a in &self.atoms {
            d = d.with_atom(c(a.coeff), a.location, mi(a.deriv));
        }
        for t in &self.terms {
            let g = match &t.g {
                RegistryDoc::Gaussian { width } => Registry::Gaussian { width: *width },
                RegistryDoc::Ramp => Registry::Ramp,
                RegistryDoc::Sinusoid { freq, phase } => Registry::Sinusoid { freq: *freq, phase: *phase },
                RegistryDoc::Abs => Registry::Abs,
                RegistryDoc::PolyGaussian { power, width } => Registry::PolyGaussian { power: mi(*power), width: *width },
                RegistryDoc::Sampled { path } => Registry::Sampled(load_field(&base.join(path))?),
            };
            d = d.with_term(c(t.coeff), mi(t.deriv), g);
        }
        if !self.poly.is_empty() {
            d = d.with_poly(Polynomial { terms: self.poly.iter().map(|m| (mi(m.power), c(m.coeff))).collect() });
        }
        d.validate()?;
        Ok(d)
    }

    pub fn load(path: &Path) -> Result<LizorkinDistribution> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::from_json(&text)?.build(path.parent().unwrap_or(Path::new(".")))
    }
}
