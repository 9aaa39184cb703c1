//! Observed input/response pairs, grown across sampling iterations.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The dataset available at a sampling iteration: locations and the scalar
/// responses observed at them, in insertion order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    dims: usize,
    xs: Vec<Vec<f64>>,
    ys: Vec<f64>,
}

impl Dataset {
    pub fn new(dims: usize) -> Self {
        Dataset {
            dims,
            xs: Vec::new(),
            ys: Vec::new(),
        }
    }

    pub fn from_pairs(xs: Vec<Vec<f64>>, ys: Vec<f64>) -> Result<Self> {
        if xs.len() != ys.len() {
            return Err(Error::Shape {
                expected: format!("{} responses", xs.len()),
                got: format!("{}", ys.len()),
            });
        }
        let dims = xs.first().map_or(1, Vec::len);
        let mut d = Dataset::new(dims);
        for (x, y) in xs.into_iter().zip(ys) {
            d.push(x, y)?;
        }
        Ok(d)
    }

    pub fn push(&mut self, x: Vec<f64>, y: f64) -> Result<()> {
        if x.len() != self.dims {
            return Err(Error::Shape {
                expected: format!("location of dimension {}", self.dims),
                got: format!("{}", x.len()),
            });
        }
        self.xs.push(x);
        self.ys.push(y);
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.xs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xs.is_empty()
    }

    pub fn dims(&self) -> usize {
        self.dims
    }

    pub fn xs(&self) -> &[Vec<f64>] {
        &self.xs
    }

    pub fn ys(&self) -> &[f64] {
        &self.ys
    }

    /// Order-sensitive content hash (FNV-1a over the raw float bits), used to
    /// verify that compared methods start from identical data.
    pub fn content_hash(&self) -> u64 {
        let mut h = Fnv::new();
        h.write_u64(self.dims as u64);
        for (x, y) in self.xs.iter().zip(&self.ys) {
            for v in x {
                h.write_u64(v.to_bits());
            }
            h.write_u64(y.to_bits());
        }
        h.finish()
    }

    /// Writes `x1,...,xd,y` rows in insertion order.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path).map_err(Error::from)?;
        let mut header: Vec<String> = (1..=self.dims).map(|i| format!("x{i}")).collect();
        header.push("y".to_string());
        w.write_record(&header)?;
        for (x, y) in self.xs.iter().zip(&self.ys) {
            let mut rec: Vec<String> = x.iter().map(|v| format_f64(*v)).collect();
            rec.push(format_f64(*y));
            w.write_record(&rec)?;
        }
        w.flush().map_err(|e| Error::io(path, e))?;
        Ok(())
    }

    pub fn read_csv(path: &Path) -> Result<Self> {
        let mut r = csv::Reader::from_path(path).map_err(Error::from)?;
        let headers = r.headers()?.clone();
        if headers.len() < 2 || headers.iter().last() != Some("y") {
            return Err(Error::Shape {
                expected: "header x1,...,xd,y".to_string(),
                got: headers.iter().collect::<Vec<_>>().join(","),
            });
        }
        let dims = headers.len() - 1;
        let mut data = Dataset::new(dims);
        for rec in r.records() {
            let rec = rec?;
            let mut vals = Vec::with_capacity(dims);
            for field in rec.iter() {
                vals.push(field.parse::<f64>().map_err(|_| Error::Domain(format!(
                    "non-numeric value {field:?} in {}",
                    path.display()
                )))?);
            }
            let y = vals.pop().ok_or_else(|| Error::Domain("empty row".into()))?;
            data.push(vals, y)?;
        }
        Ok(data)
    }
}

/// Shortest round-trip decimal form of a 64-bit float.
fn format_f64(v: f64) -> String {
    let mut buf = ryu_style(v);
    if !buf.contains('.') && !buf.contains('e') && !buf.contains("inf") && !buf.contains("NaN") {
        buf.push_str(".0");
    }
    buf
}

fn ryu_style(v: f64) -> String {
    // `{}` on f64 is the shortest representation that round-trips.
    format!("{v}")
}

struct Fnv(u64);

impl Fnv {
    fn new() -> Self {
        Fnv(0xcbf2_9ce4_8422_2325)
    }

    fn write_u64(&mut self, v: u64) {
        for b in v.to_le_bytes() {
            self.0 ^= b as u64;
            self.0 = self.0.wrapping_mul(0x1000_0000_01b3);
        }
    }

    fn finish(&self) -> u64 {
        self.0
    }
}

/// FNV-1a over a byte slice; stable across platforms and Rust versions.
pub fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x1000_0000_01b3);
    }
    h
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn push_checks_dimension() {
        let mut d = Dataset::new(2);
        d.push(vec![1.0, 2.0], 3.0).unwrap();
        assert!(d.push(vec![1.0], 3.0).is_err());
        assert_eq!(d.len(), 1);
    }

    #[test]
    fn csv_round_trip_preserves_values_and_order() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("data.csv");
        let d = Dataset::from_pairs(
            vec![vec![0.5, -1.25], vec![3.0, 4.5e-10]],
            vec![1.0 / 3.0, -2.0],
        )
        .unwrap();
        d.write_csv(&path).unwrap();
        let back = Dataset::read_csv(&path).unwrap();
        assert_eq!(d, back);
    }

    #[test]
    fn content_hash_tracks_order_and_values() {
        let a = Dataset::from_pairs(vec![vec![1.0], vec![2.0]], vec![3.0, 4.0]).unwrap();
        let b = Dataset::from_pairs(vec![vec![2.0], vec![1.0]], vec![4.0, 3.0]).unwrap();
        assert_ne!(a.content_hash(), b.content_hash());
        assert_eq!(a.content_hash(), a.clone().content_hash());
    }
}
