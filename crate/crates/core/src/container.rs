//! STSM: a small little-endian container of named f64 arrays.
//!
//! ```text
//! "STSM" u32:version
//! repeat { u32:name_len name u32:rank u64[rank]:dims f64[prod(dims)]:data }
//! ```
//! Complex arrays carry a trailing dimension of 2 (re, im).

use std::io::{Read, Write};
use std::path::Path;

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

pub const MAGIC: &[u8; 4] = b"STSM";
pub const VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq)]
pub struct Record {
    pub name: String,
    pub dims: Vec<u64>,
    pub data: Vec<f64>,
}

impl Record {
    pub fn real(name: impl Into<String>, dims: &[usize], data: Vec<f64>) -> Result<Self> {
        let dims: Vec<u64> = dims.iter().map(|&d| d as u64).collect();
        let r = Record { name: name.into(), dims, data };
        r.check()?;
        Ok(r)
    }

    pub fn complex(name: impl Into<String>, dims: &[usize], data: &[C64]) -> Result<Self> {
        let mut d = dims.to_vec();
        d.push(2);
        let flat = data.iter().flat_map(|z| [z.re, z.im]).collect();
        Self::real(name, &d, flat)
    }

    /// Empty record used to carry a `key=value` string in its name.
    pub fn meta(key: &str, value: &str) -> Self {
        Record { name: format!("meta:{key}={value}"), dims: vec![0], data: Vec::new() }
    }

    pub fn meta_value(&self, key: &str) -> Option<&str> {
        self.name.strip_prefix("meta:")?.strip_prefix(key)?.strip_prefix('=')
    }

    pub fn is_complex(&self) -> bool {
        self.dims.len() >= 2 && self.dims.last() == Some(&2)
    }

    pub fn complex_data(&self) -> Result<Vec<C64>> {
        if !self.is_complex() {
            return Err(Error::Lookup(format!("record '{}' is not complex", self.name)));
        }
        Ok(self.data.chunks_exact(2).map(|c| C64::new(c[0], c[1])).collect())
    }

    fn check(&self) -> Result<()> {
        let n: u64 = self.dims.iter().product();
        if n != self.data.len() as u64 {
            return Err(Error::Config(format!(
                "record '{}' has {} values for dims {:?}",
                self.name,
                self.data.len(),
                self.dims
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Container {
    pub records: Vec<Record>,
}

fn corrupt(msg: impl Into<String>) -> Error {
    Error::Io(std::io::Error::new(std::io::ErrorKind::InvalidData, format!("malformed STSM data: {}", msg.into())))
}

fn read_exact<const N: usize>(r: &mut impl Read) -> Result<[u8; N]> {
    let mut b = [0u8; N];
    r.read_exact(&mut b).map_err(|e| corrupt(e.to_string()))?;
    Ok(b)
}

fn at(path: &Path, e: std::io::Error) -> Error {
    Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display())))
}

impl Container {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, r: Record) {
        self.records.push(r);
    }

    pub fn get(&self, name: &str) -> Result<&Record> {
        self.records
            .iter()
            .find(|r| r.name == name)
            .ok_or_else(|| Error::Lookup(format!("no record named '{name}'")))
    }

    pub fn meta(&self, key: &str) -> Option<&str> {
        self.records.iter().find_map(|r| r.meta_value(key))
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        out.extend_from_slice(MAGIC);
        out.extend_from_slice(&VERSION.to_le_bytes());
        for r in &self.records {
            out.extend_from_slice(&(r.name.len() as u32).to_le_bytes());
            out.extend_from_slice(r.name.as_bytes());
            out.extend_from_slice(&(r.dims.len() as u32).to_le_bytes());
            for d in &r.dims {
                out.extend_from_slice(&d.to_le_bytes());
            }
            for x in &r.data {
                out.extend_from_slice(&x.to_le_bytes());
            }
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let mut r = bytes;
        if &read_exact::<4>(&mut r)? != MAGIC {
            return Err(corrupt("bad magic"));
        }
        let version = u32::from_le_bytes(read_exact(&mut r)?);
        if version != VERSION {
            return Err(corrupt(format!("unsupported version {version}")));
        }
        let mut records = Vec::new();
        while !r.is_empty() {
            let len = u32::from_le_bytes(read_exact(&mut r)?) as usize;
            if len > r.len() {
                return Err(corrupt("name runs past end"));
            }
            let name = String::from_utf8(r[..len].to_vec()).map_err(|_| corrupt("name is not UTF-8"))?;
            r = &r[len..];
            let rank = u32::from_le_bytes(read_exact(&mut r)?) as usize;
            let mut dims = Vec::with_capacity(rank.min(16));
            for _ in 0..rank {
                dims.push(u64::from_le_bytes(read_exact(&mut r)?));
            }
            let n = dims
                .iter()
                .try_fold(1u64, |a, &d| a.checked_mul(d))
                .filter(|&n| n.saturating_mul(8) <= r.len() as u64)
                .ok_or_else(|| corrupt(format!("record '{name}' runs past end")))? as usize;
            let data = r[..8 * n].chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().unwrap())).collect();
            r = &r[8 * n..];
            records.push(Record { name, dims, data });
        }
        Ok(Container { records })
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let mut f = std::fs::File::create(path).map_err(|e| at(path, e))?;
        f.write_all(&self.to_bytes()).map_err(|e| at(path, e))
    }

    pub fn read(path: &Path) -> Result<Self> {
        let bytes = std::fs::read(path).map_err(|e| at(path, e))?;
        Self::from_bytes(&bytes)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Container {
        let mut c = Container::new();
        c.push(Record::meta("config_sha256", "abc123"));
        c.push(Record::real("q", &[3], vec![1.0, 2.0, 3.0]).unwrap());
        c.push(Record::complex("mode:l=1,m=0", &[2, 1], &[C64::new(1.0, -2.0), C64::new(0.5, 0.25)]).unwrap());
        c
    }

    #[test]
    fn byte_layout() {
        let b = Container { records: vec![Record::real("x", &[1], vec![1.5]).unwrap()] }.to_bytes();
        let mut expect = b"STSM".to_vec();
        expect.extend(1u32.to_le_bytes());
        expect.extend(1u32.to_le_bytes());
        expect.push(b'x');
        expect.extend(1u32.to_le_bytes());
        expect.extend(1u64.to_le_bytes());
        expect.extend(1.5f64.to_le_bytes());
        assert_eq!(b, expect);
    }

    #[test]
    fn round_trip() {
        let c = sample();
        let back = Container::from_bytes(&c.to_bytes()).unwrap();
        assert_eq!(back, c);
        assert_eq!(back.meta("config_sha256"), Some("abc123"));
        let z = back.get("mode:l=1,m=0").unwrap().complex_data().unwrap();
        assert_eq!(z[0], C64::new(1.0, -2.0));
        assert!(back.get("q").unwrap().complex_data().is_err());
        assert!(matches!(back.get("nope"), Err(Error::Lookup(_))));
    }

    #[test]
    fn truncated_input_is_rejected() {
        let b = sample().to_bytes();
        for cut in [0, 3, 7, 12, b.len() - 1] {
            assert!(Container::from_bytes(&b[..cut]).is_err(), "cut at {cut}");
        }
        let mut bad = b.clone();
        bad[0] = b'X';
        assert!(Container::from_bytes(&bad).is_err());
    }

    #[test]
    fn shape_mismatch() {
        assert!(Record::real("x", &[2, 2], vec![0.0; 3]).is_err());
    }
}
