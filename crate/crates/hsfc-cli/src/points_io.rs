//! Point-set CSV: a `# schema=1` comment line, a `x1,..,xd` header, one row
//! per point. Floats are written in shortest round-trip form so output is a
//! pure function of the data.

use crate::{CliError, CliResult};
use hsfc::sampler::Point;
use std::io::Write;

pub const SCHEMA_LINE: &str = "# schema=1";

pub fn write_points<W: Write>(mut w: W, points: &[Point]) -> CliResult<()> {
    let d = points.first().map(|p| p.dim()).unwrap_or(0);
    writeln!(w, "{SCHEMA_LINE}")?;
    let header: Vec<String> = (1..=d).map(|j| format!("x{j}")).collect();
    writeln!(w, "{}", header.join(","))?;
    for p in points {
        let row: Vec<String> = p.coords().iter().map(|c| c.to_string()).collect();
        writeln!(w, "{}", row.join(","))?;
    }
    Ok(())
}

pub fn read_points(raw: &str) -> CliResult<Vec<Point>> {
    let mut points = Vec::new();
    let mut d: Option<usize> = None;
    for (lineno, line) in raw.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if line.starts_with('x') && d.is_none() {
            d = Some(line.split(',').count());
            continue;
        }
        let coords: Vec<f64> = line
            .split(',')
            .map(|tok| tok.trim().parse::<f64>())
            .collect::<Result<_, _>>()
            .map_err(|e| CliError::Config(format!("line {}: {e}", lineno + 1)))?;
        if let Some(d) = d {
            if coords.len() != d {
                return Err(CliError::Config(format!(
                    "line {}: expected {d} columns, got {}",
                    lineno + 1,
                    coords.len()
                )));
            }
        } else {
            d = Some(coords.len());
        }
        points
            .push(Point::new(coords).map_err(|e| CliError::Config(format!("line {}: {e}", lineno + 1)))?);
    }
    if points.is_empty() {
        return Err(CliError::Config("no points in input".into()));
    }
    Ok(points)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let points = vec![
            Point::new(vec![0.5, 0.25]).unwrap(),
            Point::new(vec![0.125, 1.0]).unwrap(),
        ];
        let mut buf = Vec::new();
        write_points(&mut buf, &points).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("# schema=1\nx1,x2\n"));
        assert_eq!(read_points(&text).unwrap(), points);
    }

    #[test]
    fn rejects_out_of_range_and_ragged_rows() {
        assert!(read_points("x1,x2\n0.5,2.0\n").is_err());
        assert!(read_points("x1,x2\n0.5\n").is_err());
        assert!(read_points("# schema=1\n").is_err());
    }
}
