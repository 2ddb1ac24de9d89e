use std::path::{Path, PathBuf};

use crate::error::{Error, Result};

/// One asset listed in a manifest.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ManifestEntry {
    /// The line as written, used to identify the asset in reports.
    pub source: String,
    pub mesh: PathBuf,
    pub rig: PathBuf,
}

/// Each non-blank line not starting with `#` is either a stem `P`
/// (meaning `P.obj` and `P.rig.json`) or two whitespace-separated paths,
/// mesh then rig. Relative paths resolve against `base`.
pub fn parse_manifest(text: &str, base: &Path) -> Result<Vec<ManifestEntry>> {
    let mut out = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        let (mesh, rig) = match fields.as_slice() {
            [stem] => (format!("{stem}.obj"), format!("{stem}.rig.json")),
            [mesh, rig] => (mesh.to_string(), rig.to_string()),
            _ => {
                return Err(Error::Parse {
                    line: n + 1,
                    message: "expected a path stem or a mesh and rig path".into(),
                })
            }
        };
        out.push(ManifestEntry {
            source: line.to_string(),
            mesh: base.join(mesh),
            rig: base.join(rig),
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stems_pairs_and_comments() {
        let text = "# corpus\nchars/fox\n\n  a.obj  rigs/a.json \n";
        let e = parse_manifest(text, Path::new("/data")).unwrap();
        assert_eq!(e.len(), 2);
        assert_eq!(e[0].mesh, PathBuf::from("/data/chars/fox.obj"));
        assert_eq!(e[0].rig, PathBuf::from("/data/chars/fox.rig.json"));
        assert_eq!(e[1].source, "a.obj  rigs/a.json");
        assert_eq!(e[1].rig, PathBuf::from("/data/rigs/a.json"));
    }

    #[test]
    fn absolute_paths_kept_and_extra_fields_rejected() {
        let e = parse_manifest("/abs/x", Path::new("/data")).unwrap();
        assert_eq!(e[0].mesh, PathBuf::from("/abs/x.obj"));
        assert!(matches!(parse_manifest("a b c", Path::new(".")), Err(Error::Parse { line: 1, .. })));
        assert!(parse_manifest("", Path::new(".")).unwrap().is_empty());
    }
}
