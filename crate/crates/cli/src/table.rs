//! CSV tables. Floats use Rust's shortest round-trip scientific form, so a
//! parsed row formats back to the identical text.

use std::fmt::Write as _;
use std::str::FromStr;

use shearkit_core::field::SampledField2D;

use crate::error::{CliError, Result};

pub trait CsvRow: Sized {
    const HEADER: &'static str;
    fn format(&self) -> String;
    fn parse(line: &str) -> Result<Self>;
}

fn cells<const N: usize>(line: &str) -> Result<[&str; N]> {
    let parts: Vec<&str> = line.split(',').collect();
    parts.try_into().map_err(|p: Vec<&str>| CliError::CsvParse(format!("expected {N} cells, got {}: {line:?}", p.len())))
}

fn num<T: FromStr>(cell: &str) -> Result<T> {
    cell.parse().map_err(|_| CliError::CsvParse(format!("not a number: {cell:?}")))
}

/// One seminorm: index tuple, value, location of the supremum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeminormRow {
    /// `(k1, k2, l, m, α1, α2, β, γ)`
    pub index: [u32; 8],
    pub value: f64,
    pub b: [f64; 2],
    pub s: f64,
    pub a: f64,
    pub interior: bool,
}

impl CsvRow for SeminormRow {
    const HEADER: &'static str = "k1,k2,l,m,alpha1,alpha2,beta,gamma,value,b1,b2,s,a,interior";

    fn format(&self) -> String {
        let mut out = String::new();
        for k in self.index {
            write!(out, "{k},").unwrap();
        }
        write!(out, "{:e},{:e},{:e},{:e},{:e},{}", self.value, self.b[0], self.b[1], self.s, self.a, self.interior).unwrap();
        out
    }

    fn parse(line: &str) -> Result<Self> {
        let c: [&str; 14] = cells(line)?;
        let mut index = [0u32; 8];
        for (k, cell) in index.iter_mut().zip(&c[..8]) {
            *k = num(cell)?;
        }
        let interior = match c[13] {
            "true" => true,
            "false" => false,
            other => return Err(CliError::CsvParse(format!("not a boolean: {other:?}"))),
        };
        Ok(Self { index, value: num(c[8])?, b: [num(c[9])?, num(c[10])?], s: num(c[11])?, a: num(c[12])?, interior })
    }
}

/// `max |ψ|` on the circle of radius `r`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayRow {
    pub radius: f64,
    pub max_abs: f64,
}

impl CsvRow for DecayRow {
    const HEADER: &'static str = "radius,max_abs";

    fn format(&self) -> String {
        format!("{:e},{:e}", self.radius, self.max_abs)
    }

    fn parse(line: &str) -> Result<Self> {
        let [r, m] = cells(line)?;
        Ok(Self { radius: num(r)?, max_abs: num(m)? })
    }
}

/// One field sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldRow {
    pub i1: usize,
    pub i2: usize,
    pub x: [f64; 2],
    pub re: f64,
    pub im: f64,
}

impl CsvRow for FieldRow {
    const HEADER: &'static str = "i1,i2,x1,x2,re,im";

    fn format(&self) -> String {
        format!("{},{},{:e},{:e},{:e},{:e}", self.i1, self.i2, self.x[0], self.x[1], self.re, self.im)
    }

    fn parse(line: &str) -> Result<Self> {
        let [i1, i2, x1, x2, re, im] = cells(line)?;
        Ok(Self { i1: num(i1)?, i2: num(i2)?, x: [num(x1)?, num(x2)?], re: num(re)?, im: num(im)? })
    }
}

pub fn field_rows(f: &SampledField2D) -> Vec<FieldRow> {
    let g = &f.grid;
    (0..g.len())
        .map(|k| {
            let v = f.values[k];
            FieldRow { i1: k % g.n1, i2: k / g.n1, x: g.point(k), re: v.re, im: v.im }
        })
        .collect()
}

pub fn render<R: CsvRow>(rows: &[R]) -> String {
    let mut out = String::with_capacity(64 * (rows.len() + 1));
    out.push_str(R::HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&r.format());
        out.push('\n');
    }
    out
}

pub fn parse_table<R: CsvRow>(text: &str) -> Result<Vec<R>> {
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h == R::HEADER => {}
        h => return Err(CliError::CsvParse(format!("expected header {:?}, got {h:?}", R::HEADER))),
    }
    lines.map(R::parse).collect()
}
