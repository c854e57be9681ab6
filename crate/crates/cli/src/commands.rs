//! The subcommands, as functions returning their outputs and a text report.

use std::fmt::Write as _;
use std::path::Path;

use shearkit_core::analysis::{isometry_defect, transform_spectral, CoverageReport};
use shearkit_core::coeffspace::{seminorm, CoefficientVolume, SeminormIndex, SEMINORM_CAP};
use shearkit_core::distributions::{desingularized_pairing, pair_with_test, LizorkinDistribution};
use shearkit_core::field::{spectral_field, SampledField2D};
use shearkit_core::generator::{admissibility, decay_table};
use shearkit_core::lizorkin::{antiderivative_with, moments, MultiIndex};
use shearkit_core::synthesis::{reconstruct_unchecked, synthesize};
use shearkit_core::ShearError;

use crate::acceptance::{self, Outcome, PROBES};
use crate::config::Config;
use crate::error::{CliError, Result};
use crate::formats::save_field;
use crate::table::{field_rows, render, DecayRow, SeminormRow};

/// Largest coefficient volume `analyze` will hold in memory (512 MiB).
pub const MAX_VOLUME_VALUES: usize = 1 << 25;

pub const DECAY_RADII: [f64; 5] = [2.0, 5.0, 10.0, 20.0, 40.0];

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum FieldFormat {
    Fld,
    Csv,
}

impl FieldFormat {
    /// Explicit choice, else `.csv` outputs get CSV and everything else `.fld`.
    pub fn for_path(explicit: Option<FieldFormat>, path: &Path) -> Self {
        explicit.unwrap_or_else(|| if path.extension().is_some_and(|e| e == "csv") { FieldFormat::Csv } else { FieldFormat::Fld })
    }
}

pub fn write_field(path: &Path, f: &SampledField2D, format: FieldFormat) -> Result<()> {
    match format {
        FieldFormat::Fld => save_field(path, f),
        FieldFormat::Csv => std::fs::write(path, render(&field_rows(f))).map_err(|e| CliError::io(path, e)),
    }
}

pub struct GenReport {
    pub text: String,
    pub decay: Vec<DecayRow>,
}

/// Admissibility, sampled moments and spatial decay of the configured generator.
pub fn gen(cfg: &Config) -> Result<GenReport> {
    let g = cfg.generator()?;
    let mut t = String::new();
    writeln!(t, "generator: {:?} band {:?} cone {}", cfg.generator.profile, cfg.generator.band, cfg.generator.cone).unwrap();

    let adm = admissibility(&g, &g, &PROBES)?;
    writeln!(t, "admissibility constant C = {:.12e}", adm.method_a.re).unwrap();
    for (xi, v) in adm.probes.iter().zip(&adm.method_b) {
        writeln!(t, "  probe ({:+.2}, {:+.2}): {:.12e}", xi[0], xi[1], v.re).unwrap();
    }
    writeln!(t, "  largest discrepancy {:.3e}, probe spread {:.3e}", adm.max_discrepancy, adm.probe_spread).unwrap();

    let grid = cfg.grid()?;
    let sampled = spectral_field(grid, |xi| g.value(xi));
    let m = moments(&sampled, 6)?;
    writeln!(t, "moments up to order 6 on {}x{}: max |m| = {:.3e}", grid.n1, grid.n2, m.max_abs).unwrap();
    let edge = sampled.boundary_max() / sampled.sup();
    let fits = if edge <= cfg.tolerances.boundary_tol { "within" } else { "above" };
    writeln!(t, "edge magnitude {edge:.3e} of the sup, {fits} boundary_tol {:.1e}", cfg.tolerances.boundary_tol).unwrap();
    match antiderivative_with(&sampled, MultiIndex::new(1, 0), cfg.tolerances.guard_tol, true) {
        Ok(a) => writeln!(t, "first antiderivative: seminorm ratio {:.3e}, {} guarded bins", a.seminorm_ratio, a.guarded_bins).unwrap(),
        Err(e) => writeln!(t, "first antiderivative: {e}").unwrap(),
    }

    let decay: Vec<DecayRow> = decay_table(&g, &DECAY_RADII)?.into_iter().map(|(radius, max_abs)| DecayRow { radius, max_abs }).collect();
    writeln!(t, "spatial decay, max |psi| on |x| = r:").unwrap();
    for d in &decay {
        writeln!(t, "  r = {:>4}: {:.3e}", d.radius, d.max_abs).unwrap();
    }
    Ok(GenReport { text: t, decay })
}

pub struct Analysis {
    pub volume: CoefficientVolume,
    pub seminorms: Vec<SeminormRow>,
}

/// Coefficients over the configured window and the seminorm table for all
/// weight orders up to `max_order`.
pub fn analyze(cfg: &Config, f: &SampledField2D, max_order: u32) -> Result<Analysis> {
    if max_order > SEMINORM_CAP {
        return Err(ShearError::OrderTooHigh { order: max_order as usize, max: SEMINORM_CAP as usize }.into());
    }
    let pgrid = cfg.param_grid(f.grid)?;
    if pgrid.len() > MAX_VOLUME_VALUES {
        return Err(ShearError::InvalidArgument(format!(
            "the volume would hold {} coefficients (limit {MAX_VOLUME_VALUES}); use a coarser parameter grid",
            pgrid.len()
        ))
        .into());
    }
    let g = cfg.generator()?;
    let volume = transform_spectral(f, &g, &pgrid)?;
    let mut seminorms = Vec::new();
    for k1 in 0..=max_order {
        for k2 in 0..=max_order {
            for l in 0..=max_order {
                for m in 0..=max_order {
                    let idx = SeminormIndex::weights(k1, k2, l, m);
                    let v = seminorm(&volume, &idx)?;
                    let (ib, is, ia) = v.argmax;
                    let at = pgrid.element(ib, is, ia);
                    seminorms.push(SeminormRow {
                        index: [idx.k1, idx.k2, idx.l, idx.m, idx.a1, idx.a2, idx.beta, idx.gamma],
                        value: v.value,
                        b: at.b,
                        s: at.s,
                        a: at.a,
                        interior: v.interior,
                    });
                }
            }
        }
    }
    Ok(Analysis { volume, seminorms })
}

pub fn synthesize_volume(cfg: &Config, v: &CoefficientVolume) -> Result<SampledField2D> {
    Ok(synthesize(v, &cfg.generator()?)?)
}

#[derive(Debug, Clone)]
pub struct RoundtripReport {
    pub rel_error: f64,
    pub isometry_defect: f64,
    pub coverage: CoverageReport,
    /// `|ξ1|` range reached by the window.
    pub xi1_range: [f64; 2],
    /// Largest `|ξ2/ξ1|` reached by the window.
    pub slope_max: Option<f64>,
    pub tolerance: f64,
}

impl RoundtripReport {
    pub fn text(&self) -> String {
        let mut t = String::new();
        writeln!(t, "reconstruction relative L2 error: {:.6e}", self.rel_error).unwrap();
        writeln!(t, "isometry defect: {:.6e}", self.isometry_defect).unwrap();
        writeln!(t, "uncovered spectral energy: {:.6e}", self.coverage.uncovered_fraction).unwrap();
        writeln!(t, "multiplier defect: {:.6e}", self.coverage.multiplier_defect).unwrap();
        match self.slope_max {
            Some(u) => writeln!(t, "covered frequencies: {:.4} < |xi1| < {:.4}, |xi2/xi1| < {:.4}", self.xi1_range[0], self.xi1_range[1], u).unwrap(),
            None => writeln!(t, "covered frequencies: not compactly supported").unwrap(),
        }
        t
    }

    /// Fails when the reconstruction error exceeds the configured tolerance.
    pub fn check(&self) -> Result<()> {
        if self.rel_error > self.tolerance {
            return Err(CliError::ToleranceExceeded { what: "reconstruction error", value: self.rel_error, tol: self.tolerance });
        }
        Ok(())
    }
}

/// Analysis followed by synthesis with the same generator.
pub fn roundtrip(cfg: &Config, f: &SampledField2D) -> Result<(SampledField2D, RoundtripReport)> {
    let g = cfg.generator()?;
    let pgrid = cfg.param_grid(f.grid)?;
    let r = reconstruct_unchecked(f, &g, &g, &pgrid)?;
    if r.coverage.uncovered_fraction > cfg.tolerances.coverage {
        return Err(ShearError::CoverageGap { uncovered_fraction: r.coverage.uncovered_fraction }.into());
    }
    let iso = isometry_defect(f, &g, &pgrid)?;
    let p = cfg.param_spec();
    let j = p.octaves as f64;
    let (xi1_range, slope_max) = match g.support() {
        // ψ̂(Mξ) ≠ 0 needs |aξ1| in the band and |ξ2/ξ1 − s| < cone·√|a|
        Some((band, cone, _)) => ([band[0] * (-j).exp2(), band[3] * j.exp2()], Some(p.s_max + cone * (j / 2.0).exp2())),
        None => ([0.0, f64::INFINITY], None),
    };
    let report = RoundtripReport { rel_error: r.rel_error, isometry_defect: iso, coverage: r.coverage, xi1_range, slope_max, tolerance: cfg.tolerances.reconstruction };
    Ok((r.field, report))
}

/// The desingularized pairing of `d` with `test`, next to the direct pairing.
pub fn desingularize(cfg: &Config, d: &LizorkinDistribution, test: &SampledField2D) -> Result<String> {
    let g = cfg.generator()?;
    let pgrid = cfg.param_grid(test.grid)?;
    let v = desingularized_pairing(d, &g, &g, test, &pgrid)?;
    let mut t = String::new();
    writeln!(t, "desingularized pairing: {:.12e} {:+.12e}i", v.re, v.im).unwrap();
    match pair_with_test(d, test) {
        Ok(w) => {
            writeln!(t, "direct pairing:         {:.12e} {:+.12e}i", w.re, w.im).unwrap();
            writeln!(t, "difference: {:.3e} ({:.3e} of sup |test|)", (v - w).norm(), (v - w).norm() / test.sup()).unwrap();
        }
        Err(e) => writeln!(t, "direct pairing unavailable: {e}").unwrap(),
    }
    Ok(t)
}

/// Runs the acceptance suite, printing one line per criterion.
pub fn selftest(cfg: &Config, mut out: impl FnMut(&str)) -> Result<Vec<Outcome>> {
    let outcomes = acceptance::run_all(cfg.seed, |o| out(&o.to_string()));
    let failed = outcomes.iter().filter(|o| !o.pass).count();
    if failed > 0 {
        return Err(CliError::SelftestFailed(failed));
    }
    Ok(outcomes)
}
