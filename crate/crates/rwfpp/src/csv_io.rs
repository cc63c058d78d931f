//! CSV layouts shared with the plotting scripts.
//!
//! Floats are written in Rust's shortest round-trip form; `∞` is `inf`.

use rwfpp_core::{Curve, Distance, DistanceFrontier, DistanceSample, Path, ReflectionBundle};

use crate::error::{AppError, Result};
use crate::harness::report::finish;

fn writer() -> csv::Writer<Vec<u8>> {
    csv::WriterBuilder::new().flexible(true).from_writer(Vec::new())
}

/// Path layout: `start_time,dt` header and row, then a `value` column.
pub fn path_csv(path: &Path) -> Result<String> {
    let mut w = writer();
    w.write_record(["start_time", "dt"])?;
    w.write_record([path.start_time().to_string(), path.dt().to_string()])?;
    w.write_record(["value"])?;
    for v in path.values() {
        w.write_record([v.to_string()])?;
    }
    finish(w)
}

fn bad(msg: impl Into<String>) -> AppError {
    AppError::Usage(msg.into())
}

fn parse_f64(s: &str) -> Result<f64> {
    s.trim().parse().map_err(|_| bad(format!("not a number: `{s}`")))
}

pub fn read_path_csv(text: &str) -> Result<Path> {
    let mut r = csv::ReaderBuilder::new().has_headers(false).flexible(true).from_reader(text.as_bytes());
    let rows: Vec<csv::StringRecord> = r.records().collect::<std::result::Result<_, _>>()?;
    if rows.len() < 4 || &rows[0][0] != "start_time" || &rows[2][0] != "value" || rows[1].len() != 2 {
        return Err(bad("path csv: expected `start_time,dt` header, one data row, then `value` column"));
    }
    let start = parse_f64(&rows[1][0])?;
    let dt = parse_f64(&rows[1][1])?;
    let values = rows[3..].iter().map(|row| parse_f64(&row[0])).collect::<Result<Vec<f64>>>()?;
    Ok(Path::new(start, dt, values)?)
}

/// `t,position,distance` for every recorded frontier entry, lattice units.
pub fn frontier_csv(frontier: &DistanceFrontier) -> Result<String> {
    let mut w = writer();
    w.write_record(["t", "position", "distance"])?;
    for (t, x, d) in frontier.entries() {
        w.write_record([t.to_string(), x.to_string(), d.to_string()])?;
    }
    finish(w)
}

/// `t,G,S,R,Rext,I,E,base_walk` on the rescaled grid; curves that start at
/// the switch time leave earlier cells empty.
pub fn bundle_csv(bundle: &ReflectionBundle) -> Result<String> {
    let mut w = writer();
    let mut header = vec!["t"];
    header.extend(Curve::ALL.iter().map(|c| c.column()));
    w.write_record(&header)?;
    let scale = bundle.scale();
    let g = bundle.lattice(Curve::Journey);
    let root = scale.sqrt_n();
    for t in g.start..=g.end() {
        let mut row = vec![scale.time_of(t).to_string()];
        for c in Curve::ALL {
            let cell = bundle.lattice(c).at(t).map(|v| (v as f64 / root).to_string());
            row.push(cell.unwrap_or_default());
        }
        w.write_record(&row)?;
    }
    finish(w)
}

fn distance_cell(d: Distance) -> String {
    d.to_string()
}

pub fn distance_sample_csv(sample: &DistanceSample) -> Result<String> {
    let mut w = writer();
    w.write_record(["u1", "u2", "v1", "v2", "value"])?;
    for (u, v, d) in sample.points() {
        w.write_record([u.0.to_string(), u.1.to_string(), v.0.to_string(), v.1.to_string(), distance_cell(d)])?;
    }
    finish(w)
}

pub fn read_distance_sample_csv(text: &str) -> Result<DistanceSample> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let mut points = Vec::new();
    for row in r.records() {
        let row = row?;
        if row.len() != 5 {
            return Err(bad("distance sample csv: expected 5 columns"));
        }
        let value = match row[4].trim() {
            "inf" => Distance::Infinite,
            s => Distance::Finite(s.parse().map_err(|_| bad(format!("bad distance `{s}`")))?),
        };
        points.push(((parse_f64(&row[0])?, parse_f64(&row[1])?), (parse_f64(&row[2])?, parse_f64(&row[3])?), value));
    }
    Ok(DistanceSample::new(points)?)
}
