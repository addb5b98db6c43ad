//! Number formatting, JSON/CSV writers, config fingerprints and the manifest.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

/// Version string recorded in every summary.
pub const BUILD_VERSION: &str = concat!(env!("CARGO_PKG_VERSION"), "+", env!("TRIDAC_GIT_DESCRIBE"));

/// Decimal with 17 significant digits. Positional notation for magnitudes in
/// `[1e-5, 1e17)`, scientific otherwise; non-finite values as `nan`, `inf`,
/// `-inf`.
pub fn fmt17(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0.0000000000000000".into();
    }
    let sci = format!("{x:.16e}");
    let exp: i32 = sci[sci.find('e').unwrap() + 1..].parse().unwrap();
    if (-5..17).contains(&exp) {
        format!("{:.*}", (16 - exp) as usize, x)
    } else {
        sci
    }
}

/// `serde_json` formatter writing floats through [`fmt17`].
struct Fmt17(serde_json::ser::PrettyFormatter<'static>);

impl serde_json::ser::Formatter for Fmt17 {
    fn write_f64<W: ?Sized + Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        w.write_all(fmt17(value).as_bytes())
    }
    fn write_f32<W: ?Sized + Write>(&mut self, w: &mut W, value: f32) -> io::Result<()> {
        w.write_all(fmt17(value as f64).as_bytes())
    }
    fn begin_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_array(w)
    }
    fn end_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array(w)
    }
    fn begin_array_value<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_array_value(w, first)
    }
    fn end_array_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array_value(w)
    }
    fn begin_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object(w)
    }
    fn end_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object(w)
    }
    fn begin_object_key<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_object_key(w, first)
    }
    fn begin_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object_value(w)
    }
    fn end_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object_value(w)
    }
}

/// Pretty JSON with 17-digit floats; non-finite floats become `null`.
pub fn to_json<T: Serialize + ?Sized>(value: &T) -> Result<String> {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, Fmt17(serde_json::ser::PrettyFormatter::new()));
    value.serialize(&mut ser)?;
    buf.push(b'\n');
    Ok(String::from_utf8(buf).expect("serde_json writes UTF-8"))
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Short hash of a serialisable configuration, used in file names.
pub fn fingerprint<T: Serialize>(config: &T) -> Result<String> {
    let canonical = serde_json::to_vec(config)?;
    Ok(sha256_hex(&canonical)[..16].to_string())
}

/// Collects the files of one run; [`OutputDir::finish`] writes the manifest
/// last, listing only files that exist with their content hash.
pub struct OutputDir {
    root: PathBuf,
    files: Vec<PathBuf>,
}

#[derive(Serialize)]
struct ManifestEntry {
    file: String,
    bytes: u64,
    sha256: String,
}

#[derive(Serialize)]
struct Manifest<'a> {
    version: &'a str,
    fingerprint: &'a str,
    files: Vec<ManifestEntry>,
}

pub const MANIFEST: &str = "manifest.json";

impl OutputDir {
    pub fn create(root: impl Into<PathBuf>) -> Result<Self> {
        let root = root.into();
        fs::create_dir_all(&root).map_err(|e| Error::io(&root, e))?;
        Ok(OutputDir { root, files: Vec::new() })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn write(&mut self, name: &str, contents: &str) -> Result<PathBuf> {
        let path = self.root.join(name);
        fs::write(&path, contents).map_err(|e| Error::io(&path, e))?;
        if !self.files.contains(&path) {
            self.files.push(path.clone());
        }
        Ok(path)
    }

    pub fn finish(self, fingerprint: &str) -> Result<PathBuf> {
        let mut files = Vec::new();
        for path in &self.files {
            let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
            files.push(ManifestEntry {
                file: path.file_name().unwrap().to_string_lossy().into_owned(),
                bytes: bytes.len() as u64,
                sha256: sha256_hex(&bytes),
            });
        }
        let manifest = Manifest { version: BUILD_VERSION, fingerprint, files };
        let path = self.root.join(MANIFEST);
        fs::write(&path, to_json(&manifest)?).map_err(|e| Error::io(&path, e))?;
        Ok(path)
    }
}

/// Re-hash every manifest entry; returns the names that do not match.
pub fn verify_manifest(dir: &Path) -> Result<Vec<String>> {
    let path = dir.join(MANIFEST);
    let text = fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
    let v: serde_json::Value = serde_json::from_str(&text)?;
    let mut bad = Vec::new();
    for entry in v["files"].as_array().into_iter().flatten() {
        let name = entry["file"].as_str().unwrap_or_default();
        let ok = fs::read(dir.join(name)).map(|b| sha256_hex(&b) == entry["sha256"].as_str().unwrap_or_default());
        if !ok.unwrap_or(false) {
            bad.push(name.to_string());
        }
    }
    Ok(bad)
}

/// Comma-separated line of already formatted fields.
pub fn csv_line(fields: &[String]) -> String {
    let mut s = fields.join(",");
    s.push('\n');
    s
}

/// Plot-ready `x,y,yerr` CSV.
pub fn plot_csv(points: &[(f64, f64, f64)]) -> String {
    let mut s = String::from("x,y,yerr\n");
    for &(x, y, e) in points {
        s.push_str(&csv_line(&[fmt17(x), fmt17(y), fmt17(e)]));
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_significant_digits() {
        assert_eq!(fmt17(0.5), "0.50000000000000000");
        assert_eq!(fmt17(1.0), "1.0000000000000000");
        assert_eq!(fmt17(-123.25), "-123.25000000000000");
        assert_eq!(fmt17(0.1), "0.10000000000000001");
        assert_eq!(fmt17(1e-7), "9.9999999999999995e-8");
        assert_eq!(fmt17(9.999999999999999e16), "99999999999999984");
        assert_eq!(fmt17(f64::NAN), "nan");
        for x in [0.1, 1.0 / 3.0, 12345.678, 2.5e-3, 6.02e23, -7.0e-9] {
            let s = fmt17(x);
            let digits = s.split('e').next().unwrap().chars().filter(|c| c.is_ascii_digit()).collect::<String>();
            assert_eq!(digits.trim_start_matches('0').len(), 17, "{s}");
            assert_eq!(s.parse::<f64>().unwrap(), x);
        }
    }

    #[test]
    fn json_uses_fmt17() {
        #[derive(Serialize)]
        struct T {
            a: f64,
            b: Vec<f64>,
            c: f64,
        }
        let s = to_json(&T { a: 0.25, b: vec![1.0], c: f64::NAN }).unwrap();
        assert!(s.contains("\"a\": 0.25000000000000000"));
        assert!(s.contains("1.0000000000000000"));
        assert!(s.contains("\"c\": null"));
        let v: serde_json::Value = serde_json::from_str(&s).unwrap();
        assert_eq!(v["a"].as_f64(), Some(0.25));
    }

    #[test]
    fn manifest_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let mut out = OutputDir::create(dir.path()).unwrap();
        out.write("a.csv", "x\n1\n").unwrap();
        out.write("b.json", "{}\n").unwrap();
        out.finish("abc").unwrap();
        assert!(verify_manifest(dir.path()).unwrap().is_empty());
        fs::write(dir.path().join("a.csv"), "x\n2\n").unwrap();
        assert_eq!(verify_manifest(dir.path()).unwrap(), vec!["a.csv".to_string()]);
    }
}
