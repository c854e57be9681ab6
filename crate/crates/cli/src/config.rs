//! Run configuration. Precedence, lowest first: built-in defaults, the file
//! named by `SHEARKIT_CONFIG` (only when `--config` is absent), the
//! `--config` file, then command-line flags. Missing JSON fields keep their
//! defaults; unknown fields are rejected.

use std::path::Path;

use serde::{Deserialize, Serialize};
use shearkit_core::coeffspace::{ParamGrid, ParamSpec};
use shearkit_core::field::Grid2D;
use shearkit_core::generator::{gaussian_control, make_meyer_shearlet, ShearletGenerator};

use crate::error::{CliError, Result};

pub const CONFIG_ENV: &str = "SHEARKIT_CONFIG";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProfileKind {
    Meyer,
    /// Non-admissible Gaussian profile, kept as a negative control.
    GaussianControl,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GeneratorConfig {
    pub profile: ProfileKind,
    pub band: [f64; 4],
    pub cone: f64,
}

impl Default for GeneratorConfig {
    fn default() -> Self {
        Self { profile: ProfileKind::Meyer, band: [0.5, 0.75, 1.5, 2.0], cone: 1.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridConfig {
    pub n1: usize,
    pub n2: usize,
    pub half_width: f64,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self { n1: 64, n2: 64, half_width: 10.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ParamConfig {
    /// `J`: octaves of `|a|` on each side of 1.
    pub octaves: u32,
    pub per_octave: u32,
    /// `S`: shear range `|s| ≤ S`.
    pub s_max: f64,
    pub ds: f64,
}

impl Default for ParamConfig {
    fn default() -> Self {
        let p = ParamSpec::default();
        Self { octaves: p.octaves, per_octave: p.per_octave, s_max: p.s_max, ds: p.ds }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// Largest edge magnitude, relative to the sup, for a field to count as
    /// contained in its grid.
    pub boundary_tol: f64,
    /// Guard for the spectral division near the axes.
    pub guard_tol: f64,
    /// Largest uncovered spectral energy fraction accepted by `roundtrip`.
    pub coverage: f64,
    /// Largest relative L² reconstruction error accepted by `roundtrip`.
    pub reconstruction: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { boundary_tol: 1e-10, guard_tol: 1e-10, coverage: 0.01, reconstruction: 1e-3 }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub generator: GeneratorConfig,
    pub grid: GridConfig,
    pub params: ParamConfig,
    pub tolerances: Tolerances,
    pub seed: u64,
    /// Worker threads; 0 picks the machine default. Outputs never depend on it.
    pub threads: usize,
}

/// Values given on the command line.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub threads: Option<usize>,
}

impl Config {
    pub fn from_json(text: &str) -> Result<Self> {
        let c: Config = serde_json::from_str(text).map_err(|e| CliError::ConfigInvalid(e.to_string()))?;
        c.validate()?;
        Ok(c)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::from_json(&text).map_err(|e| match e {
            CliError::ConfigInvalid(m) => CliError::ConfigInvalid(format!("{}: {m}", path.display())),
            e => e,
        })
    }

    /// Applies the documented precedence. `env` is the value of
    /// `SHEARKIT_CONFIG`, passed in so callers control the environment.
    pub fn resolve(explicit: Option<&Path>, env: Option<&Path>, overrides: &Overrides) -> Result<Self> {
        let mut c = match explicit.or(env) {
            Some(p) => Self::from_file(p)?,
            None => Self::default(),
        };
        if let Some(s) = overrides.seed {
            c.seed = s;
        }
        if let Some(t) = overrides.threads {
            c.threads = t;
        }
        c.validate()?;
        Ok(c)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(CliError::ConfigInvalid(m));
        let t = &self.tolerances;
        for (name, v) in [("boundary_tol", t.boundary_tol), ("guard_tol", t.guard_tol), ("coverage", t.coverage), ("reconstruction", t.reconstruction)] {
            if !(v.is_finite() && v > 0.0) {
                return bad(format!("tolerance {name} must be positive, got {v}"));
            }
        }
        let p = &self.params;
        if p.octaves < 1 || p.per_octave < 1 {
            return bad(format!("octaves and per_octave must be at least 1, got {} and {}", p.octaves, p.per_octave));
        }
        if !(p.s_max.is_finite() && p.s_max >= 0.0 && p.ds.is_finite() && p.ds > 0.0) {
            return bad(format!("need s_max ≥ 0 and ds > 0, got {} and {}", p.s_max, p.ds));
        }
        let g = &self.grid;
        if g.n1 < 8 || g.n2 < 8 || !(g.half_width.is_finite() && g.half_width > 0.0) {
            return bad(format!("grid needs n1, n2 ≥ 8 and half_width > 0, got {g:?}"));
        }
        if !(self.generator.cone.is_finite() && self.generator.band.iter().all(|b| b.is_finite())) {
            return bad("generator band and cone must be finite".into());
        }
        Ok(())
    }

    pub fn generator(&self) -> Result<ShearletGenerator> {
        Ok(match self.generator.profile {
            ProfileKind::Meyer => make_meyer_shearlet(self.generator.band, self.generator.cone)?,
            ProfileKind::GaussianControl => gaussian_control(),
        })
    }

    pub fn grid(&self) -> Result<Grid2D> {
        Ok(Grid2D::centered_rect(self.grid.n1, self.grid.n2, [self.grid.half_width; 2])?)
    }

    pub fn param_spec(&self) -> ParamSpec {
        let p = &self.params;
        ParamSpec { octaves: p.octaves, per_octave: p.per_octave, s_max: p.s_max, ds: p.ds }
    }

    pub fn param_grid(&self, b_grid: Grid2D) -> Result<ParamGrid> {
        Ok(ParamGrid::new(b_grid, self.param_spec())?)
    }
}
