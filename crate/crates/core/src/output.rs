//! CSV, PPM and manifest writers.
//!
//! Floats are written as `{:.16e}` (17 significant digits), which reads back
//! to the same `f64`. Non-finite values are refused.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use crate::aura::RayProfile;
use crate::error::{Error, Result};
use crate::probe::PointRecord;
use crate::scanner::{LabelField, MembranePoint};
use crate::signature::Signature;
use crate::trajectory::CrossingEvent;

pub const LABEL_HEADER: &str = "x,y,z,signature,omega,neg_ln_omega,cycles,degenerate";
pub const MEMBRANE_HEADER: &str = "x,y,z,sig_a,sig_b,width";
pub const PROFILE_HEADER: &str = "distance,omega,neg_ln_omega,signature";
pub const CROSSING_HEADER: &str = "t,x,y,z,before,after,width";

fn num(v: f64, what: &str) -> Result<String> {
    if v.is_finite() {
        Ok(format!("{v:.16e}"))
    } else {
        Err(Error::Numeric(format!("refusing to write non-finite {what}: {v}")))
    }
}

/// Coordinate columns: `x,y,z` in three dimensions, `x0,x1,...` otherwise.
fn coord_columns(dim: usize) -> Vec<String> {
    if dim == 3 {
        ["x", "y", "z"].map(String::from).to_vec()
    } else {
        (0..dim).map(|i| format!("x{i}")).collect()
    }
}

fn header(template: &str, dim: usize) -> Vec<String> {
    let mut out = Vec::new();
    for col in template.split(',') {
        match col {
            "x" => out.extend(coord_columns(dim)),
            "y" | "z" => {}
            c => out.push(c.to_string()),
        }
    }
    out
}

fn coords(pos: &[f64]) -> Result<Vec<String>> {
    pos.iter().map(|v| num(*v, "coordinate")).collect()
}

fn csv_text(header: Vec<String>, rows: impl IntoIterator<Item = Result<Vec<String>>>) -> Result<String> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    let io = |e: csv::Error| Error::Numeric(format!("CSV encoding failed: {e}"));
    w.write_record(&header).map_err(io)?;
    for row in rows {
        w.write_record(&row?).map_err(io)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("CSV fields are UTF-8"))
}

pub fn label_csv(field: &LabelField) -> Result<String> {
    let dim = field.grid.dimension();
    csv_text(
        header(LABEL_HEADER, dim),
        field.records.iter().enumerate().map(|(idx, r)| {
            let mut row = coords(&field.position(idx))?;
            row.extend([
                r.signature.to_string(),
                num(r.omega, "omega")?,
                num(r.neg_ln_omega, "-ln omega")?,
                r.cycles.to_string(),
                r.degenerate.to_string(),
            ]);
            Ok(row)
        }),
    )
}

pub fn membrane_csv(points: &[MembranePoint]) -> Result<String> {
    let dim = points.first().map_or(3, |p| p.position.len());
    csv_text(
        header(MEMBRANE_HEADER, dim),
        points.iter().map(|p| {
            let mut row = coords(&p.position)?;
            row.extend([p.sig_a.to_string(), p.sig_b.to_string(), num(p.width, "width")?]);
            Ok(row)
        }),
    )
}

pub fn profile_csv(profile: &RayProfile) -> Result<String> {
    csv_text(
        header(PROFILE_HEADER, 0),
        (0..profile.distances.len()).map(|i| {
            Ok(vec![
                num(profile.distances[i], "distance")?,
                num(profile.omega[i], "omega")?,
                num(profile.neg_ln_omega[i], "-ln omega")?,
                profile.signatures[i].to_string(),
            ])
        }),
    )
}

pub fn crossing_csv(events: &[CrossingEvent], dim: usize) -> Result<String> {
    csv_text(
        header(CROSSING_HEADER, dim),
        events.iter().map(|e| {
            let mut row = vec![num(e.t, "t")?];
            row.extend(coords(&e.position)?);
            row.extend([e.before.to_string(), e.after.to_string(), num(e.width, "width")?]);
            Ok(row)
        }),
    )
}

pub fn write_label_csv(field: &LabelField, path: impl AsRef<Path>) -> Result<()> {
    Ok(std::fs::write(path, label_csv(field)?)?)
}

pub fn write_membrane_csv(points: &[MembranePoint], path: impl AsRef<Path>) -> Result<()> {
    Ok(std::fs::write(path, membrane_csv(points)?)?)
}

pub fn write_profile_csv(profile: &RayProfile, path: impl AsRef<Path>) -> Result<()> {
    Ok(std::fs::write(path, profile_csv(profile)?)?)
}

/// Reads CSV rows after checking the header. Rows come with their line number.
fn rows(text: &str, expected: &[String]) -> Result<Vec<(usize, csv::StringRecord)>> {
    let mut r = csv::ReaderBuilder::new().has_headers(true).from_reader(text.as_bytes());
    let parse = |e: csv::Error| {
        let line = e.position().map_or(0, |p| p.line() as usize);
        Error::Parse { line, message: e.to_string() }
    };
    let got = r.headers().map_err(parse)?.clone();
    if got.iter().ne(expected.iter().map(String::as_str)) {
        return Err(Error::Parse { line: 1, message: format!("expected header {:?}, got {:?}", expected.join(","), got.iter().collect::<Vec<_>>().join(",")) });
    }
    r.records()
        .map(|rec| {
            let rec = rec.map_err(parse)?;
            let line = rec.position().map_or(0, |p| p.line() as usize);
            Ok((line, rec))
        })
        .collect()
}

fn cell<T: std::str::FromStr>(line: usize, s: &str) -> Result<T> {
    s.parse().map_err(|_| Error::Parse { line, message: format!("bad field {s:?}") })
}

fn position(line: usize, rec: &csv::StringRecord, from: usize, dim: usize) -> Result<Vec<f64>> {
    (from..from + dim).map(|i| cell(line, &rec[i])).collect()
}

/// One row of a label CSV.
#[derive(Clone, Debug, PartialEq)]
pub struct LabelRow {
    pub position: Vec<f64>,
    pub record: PointRecord,
}

pub fn read_label_csv(text: &str, dim: usize) -> Result<Vec<LabelRow>> {
    rows(text, &header(LABEL_HEADER, dim))?
        .into_iter()
        .map(|(line, c)| {
            Ok(LabelRow {
                position: position(line, &c, 0, dim)?,
                record: PointRecord {
                    signature: Signature::from_raw(&c[dim]),
                    omega: cell(line, &c[dim + 1])?,
                    neg_ln_omega: cell(line, &c[dim + 2])?,
                    cycles: cell(line, &c[dim + 3])?,
                    degenerate: cell(line, &c[dim + 4])?,
                },
            })
        })
        .collect()
}

pub fn read_membrane_csv(text: &str, dim: usize) -> Result<Vec<MembranePoint>> {
    rows(text, &header(MEMBRANE_HEADER, dim))?
        .into_iter()
        .map(|(line, c)| {
            Ok(MembranePoint {
                position: position(line, &c, 0, dim)?,
                sig_a: Signature::from_raw(&c[dim]),
                sig_b: Signature::from_raw(&c[dim + 1]),
                width: cell(line, &c[dim + 2])?,
            })
        })
        .collect()
}

/// `(distance, omega, neg_ln_omega, signature)` rows of a profile CSV.
pub fn read_profile_csv(text: &str) -> Result<Vec<(f64, f64, f64, Signature)>> {
    rows(text, &header(PROFILE_HEADER, 0))?
        .into_iter()
        .map(|(line, c)| Ok((cell(line, &c[0])?, cell(line, &c[1])?, cell(line, &c[2])?, Signature::from_raw(&c[3]))))
        .collect()
}

pub fn read_crossing_csv(text: &str, dim: usize) -> Result<Vec<CrossingEvent>> {
    rows(text, &header(CROSSING_HEADER, dim))?
        .into_iter()
        .map(|(line, c)| {
            Ok(CrossingEvent {
                t: cell(line, &c[0])?,
                position: position(line, &c, 1, dim)?,
                before: Signature::from_raw(&c[dim + 1]),
                after: Signature::from_raw(&c[dim + 2]),
                width: cell(line, &c[dim + 3])?,
            })
        })
        .collect()
}

/// 32-bit FNV-1a.
pub fn fnv1a32(bytes: &[u8]) -> u32 {
    bytes.iter().fold(2166136261u32, |h, &b| (h ^ b as u32).wrapping_mul(16777619))
}

pub const DEGENERATE_COLOR: [u8; 3] = [255, 255, 255];

pub fn signature_color(sig: &Signature) -> [u8; 3] {
    let h = fnv1a32(sig.as_str().as_bytes());
    [(h >> 16) as u8, (h >> 8) as u8, h as u8]
}

/// Distinct signatures in a field that share a color with another one.
pub fn color_collisions(field: &LabelField) -> Vec<Vec<Signature>> {
    let mut by_color: BTreeMap<[u8; 3], Vec<Signature>> = BTreeMap::new();
    for r in &field.records {
        if r.degenerate {
            continue;
        }
        let list = by_color.entry(signature_color(&r.signature)).or_default();
        if !list.contains(&r.signature) {
            list.push(r.signature.clone());
        }
    }
    let white = by_color.remove(&DEGENERATE_COLOR);
    let mut out: Vec<Vec<Signature>> = by_color.into_values().filter(|v| v.len() > 1).collect();
    if let Some(mut w) = white {
        // Anything hashing to white is indistinguishable from degenerate points.
        w.insert(0, Signature::from_raw("<degenerate>"));
        out.push(w);
    }
    for v in &mut out {
        v.sort();
    }
    out
}

/// Binary P6 image of a plane scan. The first free axis runs left to right,
/// the second bottom to top.
pub fn ppm_bytes(field: &LabelField) -> Result<Vec<u8>> {
    let grid = &field.grid;
    if !grid.is_plane() {
        return Err(Error::Unsupported(format!("images need a plane scan, this one has {} free axes", grid.free.len())));
    }
    let (w, h) = (grid.free[0].steps, grid.free[1].steps);
    let mut out = format!("P6\n{w} {h}\n255\n").into_bytes();
    out.reserve(w * h * 3);
    for row in 0..h {
        let j = h - 1 - row;
        for i in 0..w {
            let r = &field.records[grid.flatten(&[i, j])];
            let c = if r.degenerate { DEGENERATE_COLOR } else { signature_color(&r.signature) };
            out.extend_from_slice(&c);
        }
    }
    Ok(out)
}

pub fn write_ppm(field: &LabelField, path: impl AsRef<Path>) -> Result<()> {
    Ok(std::fs::write(path, ppm_bytes(field)?)?)
}

/// Ordered key-value text written next to every run's outputs.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Manifest {
    entries: Vec<(String, String)>,
}

impl Manifest {
    pub fn new() -> Self {
        Manifest::default()
    }

    pub fn push(&mut self, key: impl Into<String>, value: impl ToString) {
        self.entries.push((key.into(), value.to_string()));
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    /// `key = value` lines; multi-line values continue on lines starting
    /// with `| `.
    pub fn render(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.entries {
            let mut lines = v.lines();
            let _ = writeln!(out, "{k} = {}", lines.next().unwrap_or(""));
            for l in lines {
                let _ = writeln!(out, "| {l}");
            }
        }
        out
    }
}
