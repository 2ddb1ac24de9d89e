use std::fmt::Write;

use crate::asset::MeshAsset;
use crate::error::{Error, Result};
use crate::geom::Vec3;

/// Parse an ASCII OBJ file, keeping only `v` and `f` records.
///
/// Faces with more than three vertices are fan-triangulated around their
/// first vertex. `v/vt/vn` index forms and negative (relative) indices are
/// accepted; texture and normal indices are discarded.
pub fn parse_mesh_obj(bytes: &[u8]) -> Result<MeshAsset> {
    let text = std::str::from_utf8(bytes).map_err(|e| {
        let line = bytes[..e.valid_up_to()].iter().filter(|&&b| b == b'\n').count() + 1;
        Error::Parse {
            line,
            message: "input is not valid UTF-8".into(),
        }
    })?;

    let mut vertices = Vec::new();
    let mut faces = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        let mut fields = line.split_whitespace();
        match fields.next() {
            Some("v") => {
                let coords: Vec<&str> = fields.collect();
                if coords.len() < 3 || coords.len() > 4 {
                    return Err(parse_err(line_no, "vertex needs 3 coordinates"));
                }
                let mut p = [0.0; 3];
                for (slot, s) in p.iter_mut().zip(&coords) {
                    *slot = s
                        .parse::<f64>()
                        .ok()
                        .filter(|v| v.is_finite())
                        .ok_or_else(|| parse_err(line_no, &format!("bad coordinate {s:?}")))?;
                }
                vertices.push(Vec3::new(p[0], p[1], p[2]));
            }
            Some("f") => {
                let refs = fields
                    .map(|f| face_index(f, vertices.len(), line_no))
                    .collect::<Result<Vec<_>>>()?;
                if refs.len() < 3 {
                    return Err(parse_err(line_no, "face needs at least 3 vertices"));
                }
                for k in 1..refs.len() - 1 {
                    faces.push([refs[0], refs[k], refs[k + 1]]);
                }
            }
            _ => {}
        }
    }
    MeshAsset::new(vertices, faces)
}

/// Resolve one face vertex reference to a 0-based index. Range is checked
/// by mesh validation, except for relative indices that point before the start.
fn face_index(field: &str, seen: usize, line: usize) -> Result<usize> {
    let head = field.split('/').next().unwrap_or("");
    let i: i64 = head
        .parse()
        .map_err(|_| parse_err(line, &format!("bad face index {field:?}")))?;
    match i {
        0 => Err(parse_err(line, "face index 0 is invalid (OBJ is 1-based)")),
        i if i > 0 => Ok((i - 1) as usize),
        i => {
            let back = i.unsigned_abs() as usize;
            if back > seen {
                Err(Error::InvalidMesh(format!(
                    "line {line}: relative face index {i} precedes the first vertex"
                )))
            } else {
                Ok(seen - back)
            }
        }
    }
}

fn parse_err(line: usize, message: &str) -> Error {
    Error::Parse {
        line,
        message: message.to_string(),
    }
}

/// Serialize vertices and faces as OBJ with shortest round-trip float formatting.
pub fn write_mesh_obj(vertices: &[Vec3], faces: &[[usize; 3]]) -> String {
    let mut out = String::with_capacity(vertices.len() * 32 + faces.len() * 16);
    for v in vertices {
        writeln!(out, "v {:?} {:?} {:?}", v.x, v.y, v.z).unwrap();
    }
    for f in faces {
        writeln!(out, "f {} {} {}", f[0] + 1, f[1] + 1, f[2] + 1).unwrap();
    }
    out
}
