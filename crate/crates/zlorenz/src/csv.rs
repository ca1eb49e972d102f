//! Trajectory CSV files.
//!
//! Layout: `#` comment lines carrying metadata, a header `t,x,y,z` (plus
//! `,color` when the trajectory is colored), then one row per sample. Numbers
//! are written with 17 significant digits so a write/read cycle reproduces the
//! samples bit for bit. Polar trajectories are written in their Cartesian
//! view and tagged `source_coordinates: polar`.
//!
//! Recognized metadata keys: `system` and `integrator` (JSON), `coordinates`,
//! `color_convention`. Any other `# key: value` line becomes a note.

use std::fmt::Write as _;
use std::io::{self, BufRead, Write};
use std::path::Path;

use thiserror::Error;
use zlorenz_core::covering::ColorConvention;
use zlorenz_core::state::CoordinateKind;
use zlorenz_core::trajectory::{Trajectory, TrajectoryError, TrajectoryMeta};

const MAGIC: &str = "zlorenz trajectory";
const RESERVED: [&str; 4] = ["system", "integrator", "coordinates", "color_convention"];

#[derive(Debug, Error)]
pub enum CsvError {
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error("line {line}: {message}")]
    Meta { line: usize, message: String },
    #[error("line {line}: expected header t,x,y,z or t,x,y,z,color, found {found:?}")]
    Header { line: usize, found: String },
    #[error("missing header line t,x,y,z")]
    MissingHeader,
    #[error("row {row} (line {line}): {message}")]
    Row { row: usize, line: usize, message: String },
    #[error("{0}")]
    Trajectory(#[from] TrajectoryError),
}

fn num(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn to_csv_string(traj: &Trajectory) -> String {
    let mut out = String::new();
    let view = traj.cartesian_view();
    let meta = &traj.meta;
    let _ = writeln!(out, "# {MAGIC}");
    let _ = writeln!(out, "# coordinates: cartesian");
    if let Some(system) = &meta.system {
        let _ = writeln!(out, "# system: {}", serde_json::to_string(system).expect("system serializes"));
    }
    if let Some(cfg) = &meta.integrator {
        let _ = writeln!(out, "# integrator: {}", serde_json::to_string(cfg).expect("integrator serializes"));
    }
    if let Some(c) = &meta.coloring {
        let _ = writeln!(out, "# color_convention: {}", c.describe());
    }
    if traj.kind() == CoordinateKind::Polar {
        let _ = writeln!(out, "# source_coordinates: polar");
    }
    for (k, v) in &meta.notes {
        if RESERVED.contains(&k.as_str()) || (traj.kind() == CoordinateKind::Polar && k == "source_coordinates") {
            continue;
        }
        let _ = writeln!(out, "# {}: {}", k, v.replace('\n', " "));
    }
    let colors = view.colors();
    out.push_str(if colors.is_some() { "t,x,y,z,color\n" } else { "t,x,y,z\n" });
    for (i, (t, s)) in view.times().iter().zip(view.states()).enumerate() {
        let _ = write!(out, "{},{},{},{}", num(*t), num(s[0]), num(s[1]), num(s[2]));
        if let Some(c) = colors {
            let _ = write!(out, ",{}", c[i]);
        }
        out.push('\n');
    }
    out
}

pub fn write_csv<W: Write>(mut w: W, traj: &Trajectory) -> io::Result<()> {
    w.write_all(to_csv_string(traj).as_bytes())
}

pub fn save_csv(path: &Path, traj: &Trajectory) -> io::Result<()> {
    std::fs::write(path, to_csv_string(traj))
}

fn parse_convention(line: usize, v: &str) -> Result<ColorConvention, CsvError> {
    let bad = || CsvError::Meta { line, message: format!("unrecognized color convention {v:?}") };
    let rest = v.strip_prefix(ColorConvention::RULE).ok_or_else(bad)?;
    let n = rest.strip_prefix("; n=").ok_or_else(bad)?.trim().parse::<u32>().map_err(|_| bad())?;
    if n == 0 {
        return Err(bad());
    }
    Ok(ColorConvention { n })
}

pub fn read_csv<R: BufRead>(r: R) -> Result<Trajectory, CsvError> {
    let mut meta = TrajectoryMeta::default();
    let mut colored = None;
    let mut times = Vec::new();
    let mut states = Vec::new();
    let mut colors = Vec::new();
    for (i, line) in r.lines().enumerate() {
        let line_no = i + 1;
        let line = line?;
        let line = line.trim_end_matches('\r');
        if colored.is_none() {
            if let Some(c) = line.strip_prefix('#') {
                let c = c.trim();
                if c == MAGIC || c.is_empty() {
                    continue;
                }
                let Some((k, v)) = c.split_once(':') else {
                    return Err(CsvError::Meta {
                        line: line_no,
                        message: format!("expected `# key: value`, found {line:?}"),
                    });
                };
                let (k, v) = (k.trim(), v.trim());
                let json_err = |e: serde_json::Error| CsvError::Meta { line: line_no, message: format!("{k}: {e}") };
                match k {
                    "coordinates" if v != "cartesian" => {
                        return Err(CsvError::Meta { line: line_no, message: format!("unsupported coordinates {v:?}") })
                    }
                    "coordinates" => {}
                    "system" => meta.system = Some(serde_json::from_str(v).map_err(json_err)?),
                    "integrator" => meta.integrator = Some(serde_json::from_str(v).map_err(json_err)?),
                    "color_convention" => meta.coloring = Some(parse_convention(line_no, v)?),
                    _ => meta.note(k, v),
                }
                continue;
            }
            colored = Some(match line.trim() {
                "t,x,y,z" => false,
                "t,x,y,z,color" => true,
                other => return Err(CsvError::Header { line: line_no, found: other.to_string() }),
            });
            continue;
        }
        if line.trim().is_empty() {
            continue;
        }
        let row = times.len() + 1;
        let bad = |message: String| CsvError::Row { row, line: line_no, message };
        let fields: Vec<&str> = line.split(',').collect();
        let want = if colored == Some(true) { 5 } else { 4 };
        if fields.len() != want {
            return Err(bad(format!("expected {want} fields, found {}", fields.len())));
        }
        let mut v = [0.0; 4];
        for (j, f) in fields[..4].iter().enumerate() {
            let x: f64 = f.trim().parse().map_err(|_| bad(format!("column {}: {f:?} is not a number", j + 1)))?;
            if !x.is_finite() {
                return Err(bad(format!("column {}: value must be finite", j + 1)));
            }
            v[j] = x;
        }
        if let Some(&prev) = times.last() {
            if v[0] <= prev {
                return Err(bad(format!("time {} does not exceed previous time {prev}", v[0])));
            }
        }
        if want == 5 {
            let c = fields[4].trim();
            colors.push(c.parse::<u32>().map_err(|_| bad(format!("color {c:?} is not a non-negative integer")))?);
        }
        times.push(v[0]);
        states.push([v[1], v[2], v[3]]);
    }
    let colored = colored.ok_or(CsvError::MissingHeader)?;
    let mut traj = Trajectory::new(times, states, CoordinateKind::Cartesian)?;
    if colored {
        if let Some(c) = &meta.coloring {
            if let Some((row, bad)) = colors.iter().enumerate().find(|(_, &k)| k >= c.n) {
                return Err(CsvError::Row {
                    row: row + 1,
                    line: 0,
                    message: format!("color {bad} is not below n={}", c.n),
                });
            }
        }
        traj = traj.with_colors(colors)?;
    }
    Ok(traj.with_meta(meta))
}

pub fn read_csv_str(text: &str) -> Result<Trajectory, CsvError> {
    read_csv(text.as_bytes())
}

pub fn load_csv(path: &Path) -> Result<Trajectory, CsvError> {
    let f = std::fs::File::open(path)?;
    read_csv(io::BufReader::new(f))
}
