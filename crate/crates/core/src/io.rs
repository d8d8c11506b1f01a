//! Rod files and CSV exports.
//!
//! Plain-text rods hold one `x y z` row per point, then an optional `#angles`
//! line followed by one angle per row. Other lines starting with `#` are
//! comments. The JSON form is `{"points": [[x, y, z], ...], "angles": [...]}`.
//! Floats are written in shortest round-trip form, so reading back a written
//! rod reproduces it bit for bit.

use std::fs;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frames::FrameField;
use crate::rod::{DiscreteRod, FramedDiscreteRod};
use crate::spline::SplineCurve;
use crate::Vec3;

pub const ANGLES_MARKER: &str = "#angles";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RodFormat {
    Text,
    Json,
}

impl RodFormat {
    /// `.json` paths are JSON, everything else plain text.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("json") => RodFormat::Json,
            _ => RodFormat::Text,
        }
    }

    /// Sniffs the content: a leading `{` means JSON.
    pub fn detect(contents: &str) -> Self {
        if contents.trim_start().starts_with('{') {
            RodFormat::Json
        } else {
            RodFormat::Text
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct RodJson {
    points: Vec<[f64; 3]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    angles: Option<Vec<f64>>,
}

fn assemble(points: Vec<Vec3>, angles: Option<Vec<f64>>) -> Result<FramedDiscreteRod> {
    let rod = DiscreteRod::new(points)?;
    match angles {
        Some(a) => FramedDiscreteRod::new(rod, a),
        None => Ok(FramedDiscreteRod::untwisted(rod)),
    }
}

fn parse_float(token: &str, line: usize) -> Result<f64> {
    token
        .parse::<f64>()
        .map_err(|_| Error::Parse(format!("line {line}: cannot parse '{token}' as a number")))
}

pub fn rod_to_text(framed: &FramedDiscreteRod) -> String {
    let mut out = String::new();
    for p in framed.rod().points() {
        out.push_str(&format!("{} {} {}\n", p.x, p.y, p.z));
    }
    out.push_str(ANGLES_MARKER);
    out.push('\n');
    for a in framed.angles() {
        out.push_str(&format!("{a}\n"));
    }
    out
}

/// Parses the plain-text format; a missing angles block means zero angles.
pub fn rod_from_text(contents: &str) -> Result<FramedDiscreteRod> {
    let mut points = Vec::new();
    let mut angles: Option<Vec<f64>> = None;
    for (k, raw) in contents.lines().enumerate() {
        let line = raw.trim();
        let lineno = k + 1;
        if line.is_empty() {
            continue;
        }
        if line.eq_ignore_ascii_case(ANGLES_MARKER) {
            if angles.is_some() {
                return Err(Error::Parse(format!("line {lineno}: repeated {ANGLES_MARKER} block")));
            }
            angles = Some(Vec::new());
            continue;
        }
        if line.starts_with('#') {
            continue;
        }
        let tokens: Vec<&str> = line.split(|c: char| c.is_whitespace() || c == ',').filter(|t| !t.is_empty()).collect();
        match angles.as_mut() {
            Some(a) => {
                if tokens.len() != 1 {
                    return Err(Error::Parse(format!("line {lineno}: expected one angle per row")));
                }
                a.push(parse_float(tokens[0], lineno)?);
            }
            None => {
                if tokens.len() != 3 {
                    return Err(Error::Parse(format!("line {lineno}: expected 'x y z', got {} values", tokens.len())));
                }
                points.push(Vec3::new(
                    parse_float(tokens[0], lineno)?,
                    parse_float(tokens[1], lineno)?,
                    parse_float(tokens[2], lineno)?,
                ));
            }
        }
    }
    assemble(points, angles)
}

pub fn rod_to_json(framed: &FramedDiscreteRod) -> Result<String> {
    let doc = RodJson {
        points: framed.rod().points().iter().map(|p| [p.x, p.y, p.z]).collect(),
        angles: Some(framed.angles().to_vec()),
    };
    Ok(serde_json::to_string_pretty(&doc)?)
}

pub fn rod_from_json(contents: &str) -> Result<FramedDiscreteRod> {
    let doc: RodJson = serde_json::from_str(contents)?;
    assemble(doc.points.into_iter().map(Vec3::from).collect(), doc.angles)
}

pub fn parse_rod(contents: &str, format: RodFormat) -> Result<FramedDiscreteRod> {
    match format {
        RodFormat::Json => rod_from_json(contents),
        RodFormat::Text => rod_from_text(contents),
    }
}

/// Reads a rod, detecting the format from the content.
pub fn read_rod(path: &Path) -> Result<FramedDiscreteRod> {
    let contents = fs::read_to_string(path)?;
    parse_rod(&contents, RodFormat::detect(&contents))
}

/// Writes a rod in the format implied by the file extension.
pub fn write_rod(path: &Path, framed: &FramedDiscreteRod) -> Result<()> {
    let contents = match RodFormat::from_path(path) {
        RodFormat::Json => rod_to_json(framed)? + "\n",
        RodFormat::Text => rod_to_text(framed),
    };
    fs::write(path, contents)?;
    Ok(())
}

pub const SPLINE_CSV_HEADER: &str = "t,x,y,z,dx,dy,dz,ddx,ddy,ddz";

/// `count` uniform samples of (y, y', y'') as CSV.
pub fn write_spline_csv<W: Write>(spline: &SplineCurve, count: usize, mut out: W) -> Result<()> {
    writeln!(out, "{SPLINE_CSV_HEADER}")?;
    for s in spline.sample(count) {
        let (p, d, dd) = (s.point, s.deriv1, s.deriv2);
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{}",
            s.t, p.x, p.y, p.z, d.x, d.y, d.z, dd.x, dd.y, dd.z
        )?;
    }
    Ok(())
}

pub const FRAMES_CSV_HEADER: &str = "t,b1x,b1y,b1z,b2x,b2y,b2z,b3x,b3y,b3z";

pub fn write_frames_csv<W: Write>(field: &FrameField, out: W) -> Result<()> {
    field.write_csv(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spline::build_spline;
    use proptest::prelude::*;

    fn sample() -> FramedDiscreteRod {
        let rod = DiscreteRod::from_arrays(&[[0.0, 0.0, 0.0], [0.1, 0.2, 1.0 / 3.0], [1e-17, -2.5, 7.0]]).unwrap();
        FramedDiscreteRod::new(rod, vec![0.1 + 0.2, -1e300]).unwrap()
    }

    #[test]
    fn text_round_trip_is_exact() {
        let r = sample();
        let back = rod_from_text(&rod_to_text(&r)).unwrap();
        assert_eq!(back, r);
    }

    #[test]
    fn json_round_trip_is_exact() {
        let r = sample();
        let back = rod_from_json(&rod_to_json(&r).unwrap()).unwrap();
        assert_eq!(back, r);
    }

    #[test]
    fn text_parsing_details() {
        let r = rod_from_text("# a comment\n0 0 0\n\n1 0 0\n2,0,0\n").unwrap();
        assert_eq!(r.angles(), &[0.0, 0.0]);
        assert!(matches!(rod_from_text("0 0\n1 0 0\n"), Err(Error::Parse(_))));
        assert!(matches!(rod_from_text("0 0 0\n1 0 x\n"), Err(Error::Parse(_))));
        assert!(matches!(
            rod_from_text("0 0 0\n1 0 0\n#angles\n1\n2\n"),
            Err(Error::AngleCountMismatch { .. })
        ));
        assert!(matches!(rod_from_text("0 0 0\n0 0 0\n"), Err(Error::DegenerateEdge { .. })));
    }

    #[test]
    fn json_without_angles_is_untwisted() {
        let r = rod_from_json(r#"{"points": [[0,0,0],[0,0,1],[0,1,1]]}"#).unwrap();
        assert_eq!(r.angles(), &[0.0, 0.0]);
        assert!(rod_from_json("{").is_err());
    }

    #[test]
    fn format_detection() {
        assert_eq!(RodFormat::from_path(Path::new("a/rod.JSON")), RodFormat::Json);
        assert_eq!(RodFormat::from_path(Path::new("rod.txt")), RodFormat::Text);
        assert_eq!(RodFormat::detect("  {\"points\": []}"), RodFormat::Json);
        assert_eq!(RodFormat::detect("0 0 0"), RodFormat::Text);
    }

    #[test]
    fn spline_csv_shape() {
        let rod = DiscreteRod::from_arrays(&[[0.0; 3], [1.0, 0.0, 0.0], [1.0, 1.0, 0.0]]).unwrap();
        let y = build_spline(&rod, 2.0).unwrap();
        let mut buf = Vec::new();
        write_spline_csv(&y, 5, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], SPLINE_CSV_HEADER);
        assert_eq!(lines.len(), 6);
        assert!(lines[1..].iter().all(|l| l.split(',').count() == 10));
    }

    #[test]
    fn frames_csv_shape() {
        let field = FrameField { ts: vec![0.0, 1.0], frames: vec![crate::frames::Frame::identity(); 2] };
        let mut buf = Vec::new();
        write_frames_csv(&field, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], FRAMES_CSV_HEADER);
        assert_eq!(lines[1], "0,1,0,0,0,1,0,0,0,1");
    }

    proptest! {
        #[test]
        fn round_trip_random_rods(
            pts in prop::collection::vec(prop::array::uniform3(-1e6f64..1e6), 2..12),
            seed in any::<u64>(),
        ) {
            let Ok(rod) = DiscreteRod::from_arrays(&pts) else { return Ok(()) };
            let n = rod.edge_count();
            let angles: Vec<f64> = (0..n).map(|k| ((seed.wrapping_mul(k as u64 + 1)) as f64).sin() * 1e3).collect();
            let r = FramedDiscreteRod::new(rod, angles).unwrap();
            prop_assert_eq!(&rod_from_text(&rod_to_text(&r)).unwrap(), &r);
            prop_assert_eq!(&rod_from_json(&rod_to_json(&r).unwrap()).unwrap(), &r);
        }
    }
}
