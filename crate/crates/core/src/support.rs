//! Support functions sampled on the uniform circle grid, and their on-disk forms.
//!
//! Two serializations are provided:
//!
//! * binary: `b"SUPF"`, `format_version: u32 LE`, `n: u64 LE`, then `n`
//!   little-endian `f64` samples. Round-trips bit-exactly.
//! * JSON: `{"format_version": 1, "n": N, "samples": [...]}`.

use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::{self, check_finite, check_grid_size};

pub const FORMAT_VERSION: u32 = 1;
const MAGIC: &[u8; 4] = b"SUPF";

/// Samples `s(θ_j)`, `θ_j = 2πj/N`, with `N` a power of two `>= 64`.
///
/// Only the grid shape and finiteness are enforced here; convexity and the
/// interior-origin condition are the job of [`crate::ConvexBody`].
#[derive(Debug, Clone, PartialEq)]
pub struct SupportFunction {
    samples: Vec<f64>,
}

impl SupportFunction {
    pub fn new(samples: Vec<f64>) -> Result<Self> {
        check_grid_size(samples.len())?;
        check_finite(&samples)?;
        Ok(Self { samples })
    }

    pub fn from_fn(n: usize, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::new(spectral::angles(n).into_iter().map(f).collect())
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<f64> {
        self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Periodic indexing.
    pub fn at(&self, j: isize) -> f64 {
        let n = self.samples.len() as isize;
        self.samples[j.rem_euclid(n) as usize]
    }

    pub fn write_binary<W: Write>(&self, mut w: W) -> Result<()> {
        w.write_all(MAGIC)?;
        w.write_all(&FORMAT_VERSION.to_le_bytes())?;
        w.write_all(&(self.samples.len() as u64).to_le_bytes())?;
        for x in &self.samples {
            w.write_all(&x.to_le_bytes())?;
        }
        Ok(())
    }

    pub fn read_binary<R: Read>(mut r: R) -> Result<Self> {
        let mut magic = [0u8; 4];
        r.read_exact(&mut magic)?;
        if &magic != MAGIC {
            return Err(Error::Format("bad magic in support-function file".into()));
        }
        let mut word = [0u8; 4];
        r.read_exact(&mut word)?;
        let version = u32::from_le_bytes(word);
        if version != FORMAT_VERSION {
            return Err(Error::Format(format!("format_version {version}")));
        }
        let mut long = [0u8; 8];
        r.read_exact(&mut long)?;
        let n = u64::from_le_bytes(long) as usize;
        check_grid_size(n)?;
        let mut samples = Vec::with_capacity(n);
        for _ in 0..n {
            r.read_exact(&mut long)?;
            samples.push(f64::from_le_bytes(long));
        }
        Self::new(samples)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(&SupportFile {
            format_version: FORMAT_VERSION,
            n: self.samples.len(),
            samples: self.samples.clone(),
        })?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: SupportFile = serde_json::from_str(text)?;
        if file.format_version != FORMAT_VERSION {
            return Err(Error::Format(format!(
                "format_version {}",
                file.format_version
            )));
        }
        if file.n != file.samples.len() {
            return Err(Error::LengthMismatch {
                expected: file.n,
                got: file.samples.len(),
            });
        }
        Self::new(file.samples)
    }

    /// Load by extension: `.json` is text, anything else is binary.
    pub fn load(path: &Path) -> Result<Self> {
        if path.extension().is_some_and(|e| e == "json") {
            Self::from_json(&std::fs::read_to_string(path)?)
        } else {
            Self::read_binary(std::io::BufReader::new(std::fs::File::open(path)?))
        }
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        if path.extension().is_some_and(|e| e == "json") {
            std::fs::write(path, self.to_json()?)?;
        } else {
            self.write_binary(std::io::BufWriter::new(std::fs::File::create(path)?))?;
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct SupportFile {
    format_version: u32,
    n: usize,
    samples: Vec<f64>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn rejects_bad_grids() {
        assert!(matches!(
            SupportFunction::new(vec![1.0; 32]),
            Err(Error::GridSize(32))
        ));
        assert!(matches!(
            SupportFunction::new(vec![1.0; 96]),
            Err(Error::GridSize(96))
        ));
        let mut v = vec![1.0; 64];
        v[3] = f64::INFINITY;
        assert!(matches!(
            SupportFunction::new(v),
            Err(Error::NonFinite { index: 3 })
        ));
    }

    #[test]
    fn periodic_indexing() {
        let s = SupportFunction::from_fn(64, |t| t).unwrap();
        assert_eq!(s.at(-1), s.samples()[63]);
        assert_eq!(s.at(64), s.samples()[0]);
    }

    #[test]
    fn binary_header_layout() {
        let s = SupportFunction::new(vec![1.5; 64]).unwrap();
        let mut buf = Vec::new();
        s.write_binary(&mut buf).unwrap();
        assert_eq!(buf.len(), 4 + 4 + 8 + 64 * 8);
        assert_eq!(&buf[..4], b"SUPF");
        assert_eq!(u32::from_le_bytes(buf[4..8].try_into().unwrap()), 1);
        assert_eq!(u64::from_le_bytes(buf[8..16].try_into().unwrap()), 64);
        buf[0] = b'X';
        assert!(SupportFunction::read_binary(&buf[..]).is_err());
    }

    #[test]
    fn json_length_mismatch() {
        let text = r#"{"format_version":1,"n":128,"samples":[1.0]}"#;
        assert!(matches!(
            SupportFunction::from_json(text),
            Err(Error::LengthMismatch { .. })
        ));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn binary_and_json_round_trip(v in proptest::collection::vec(-1e6f64..1e6, 64)) {
            let s = SupportFunction::new(v).unwrap();
            let mut buf = Vec::new();
            s.write_binary(&mut buf).unwrap();
            let back = SupportFunction::read_binary(&buf[..]).unwrap();
            let bits = |f: &SupportFunction| f.samples().iter().map(|x| x.to_bits()).collect::<Vec<_>>();
            prop_assert_eq!(bits(&back), bits(&s));
            let back = SupportFunction::from_json(&s.to_json().unwrap()).unwrap();
            prop_assert_eq!(bits(&back), bits(&s));
        }
    }
}
