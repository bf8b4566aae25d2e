//! Binary grid cache: `ZML1`, a version byte, then little-endian `f64`
//! records `(t, Z, Z', theta, theta')`.

use super::CriticalPointSample;
use crate::error::{Error, Result};
use std::io::{Read, Write};
use std::path::Path;

pub const CACHE_MAGIC: &[u8; 4] = b"ZML1";
pub const CACHE_VERSION: u8 = 1;
const RECORD_BYTES: usize = 5 * 8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridRecord {
    pub t: f64,
    pub z: f64,
    pub z_prime: f64,
    pub theta: f64,
    pub theta_prime: f64,
}

impl GridRecord {
    pub fn to_sample(&self) -> CriticalPointSample {
        CriticalPointSample::from_hardy(self.t, self.theta, self.theta_prime, self.z, self.z_prime, f64::NAN)
    }
}

impl From<&CriticalPointSample> for GridRecord {
    fn from(s: &CriticalPointSample) -> Self {
        Self { t: s.t, z: s.z, z_prime: s.z_prime, theta: s.theta, theta_prime: s.theta_prime }
    }
}

pub fn encode_records(records: &[GridRecord]) -> Vec<u8> {
    let mut buf = Vec::with_capacity(5 + records.len() * RECORD_BYTES);
    buf.extend_from_slice(CACHE_MAGIC);
    buf.push(CACHE_VERSION);
    for r in records {
        for v in [r.t, r.z, r.z_prime, r.theta, r.theta_prime] {
            buf.extend_from_slice(&v.to_le_bytes());
        }
    }
    buf
}

pub fn decode_records(bytes: &[u8]) -> Result<Vec<GridRecord>> {
    if bytes.len() < 5 || &bytes[..4] != CACHE_MAGIC {
        return Err(Error::Format("missing ZML1 header".into()));
    }
    if bytes[4] != CACHE_VERSION {
        return Err(Error::Format(format!("unsupported cache version {}", bytes[4])));
    }
    let body = &bytes[5..];
    if !body.len().is_multiple_of(RECORD_BYTES) {
        return Err(Error::Format(format!("truncated cache body of {} bytes", body.len())));
    }
    Ok(body
        .chunks_exact(RECORD_BYTES)
        .map(|rec| {
            let f = |i: usize| f64::from_le_bytes(rec[8 * i..8 * i + 8].try_into().unwrap());
            GridRecord { t: f(0), z: f(1), z_prime: f(2), theta: f(3), theta_prime: f(4) }
        })
        .collect())
}

pub fn write_grid_cache(path: &Path, records: &[GridRecord]) -> Result<()> {
    let mut f = std::fs::File::create(path)?;
    f.write_all(&encode_records(records))?;
    Ok(())
}

pub fn read_grid_cache(path: &Path) -> Result<Vec<GridRecord>> {
    let mut bytes = Vec::new();
    std::fs::File::open(path)?.read_to_end(&mut bytes)?;
    decode_records(&bytes)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #[test]
        fn round_trip_is_bit_exact(vals in proptest::collection::vec(any::<f64>(), 0..50)) {
            let recs: Vec<GridRecord> = vals
                .chunks(5)
                .filter(|c| c.len() == 5)
                .map(|c| GridRecord { t: c[0], z: c[1], z_prime: c[2], theta: c[3], theta_prime: c[4] })
                .collect();
            let back = decode_records(&encode_records(&recs)).unwrap();
            prop_assert_eq!(back.len(), recs.len());
            for (a, b) in back.iter().zip(&recs) {
                prop_assert_eq!(a.t.to_bits(), b.t.to_bits());
                prop_assert_eq!(a.z.to_bits(), b.z.to_bits());
                prop_assert_eq!(a.theta_prime.to_bits(), b.theta_prime.to_bits());
            }
        }
    }

    #[test]
    fn header_layout() {
        let bytes = encode_records(&[GridRecord { t: 1.0, z: 2.0, z_prime: 3.0, theta: 4.0, theta_prime: 5.0 }]);
        assert_eq!(&bytes[..5], b"ZML1\x01");
        assert_eq!(bytes.len(), 45);
        assert_eq!(&bytes[5..13], &1.0f64.to_le_bytes());
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(decode_records(b"ZML2\x01"), Err(Error::Format(_))));
        assert!(matches!(decode_records(b"ZML1\x02"), Err(Error::Format(_))));
        assert!(matches!(decode_records(b"ZML1\x01abc"), Err(Error::Format(_))));
    }
}
