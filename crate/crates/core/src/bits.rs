//! Sequential bit streams.
//!
//! Bits are read most-significant-bit first within each byte; an `n`-bit
//! integer is the next `n` bits read big-endian. Every read advances the
//! cursor, so no bit is ever used twice.

use std::fs;
use std::path::{Path, PathBuf};

use num_bigint::BigUint;
use num_traits::Zero;
use rand::RngCore;

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BitOrigin {
    File(PathBuf),
    Bytes,
    /// Operating-system entropy, optionally dumped to a file for replay.
    OsEntropy { dump: Option<PathBuf> },
    /// Fetched over HTTP and cached; downstream reads only the cache.
    Http { url: String, cache: PathBuf },
}

#[derive(Clone, Debug)]
pub struct BitSource {
    data: Vec<u8>,
    cursor: u64,
    /// Stream length in bits when it does not end on a byte boundary.
    limit: Option<u64>,
    origin: BitOrigin,
}

impl BitSource {
    pub fn from_bytes(data: Vec<u8>) -> Self {
        BitSource {
            data,
            cursor: 0,
            limit: None,
            origin: BitOrigin::Bytes,
        }
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let data = fs::read(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Ok(BitSource {
            data,
            cursor: 0,
            limit: None,
            origin: BitOrigin::File(path.to_path_buf()),
        })
    }

    /// Parses a string of `0`/`1` characters; whitespace is ignored.
    pub fn from_bit_string(s: &str) -> Result<Self> {
        let bits: Vec<bool> = s
            .chars()
            .filter(|c| !c.is_whitespace())
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::Malformed(format!("not a bit: {other:?}"))),
            })
            .collect::<Result<_>>()?;
        let mut data = vec![0u8; bits.len().div_ceil(8)];
        for (i, b) in bits.iter().enumerate() {
            if *b {
                data[i / 8] |= 0x80 >> (i % 8);
            }
        }
        let mut src = Self::from_bytes(data);
        src.limit = Some(bits.len() as u64);
        Ok(src)
    }

    /// `nbytes` of OS entropy. When `dump` is given the bytes are written
    /// there first so the run can be replayed with [`BitSource::from_file`].
    pub fn os_entropy(nbytes: usize, dump: Option<&Path>) -> Result<Self> {
        let mut data = vec![0u8; nbytes];
        rand::rngs::OsRng.fill_bytes(&mut data);
        if let Some(p) = dump {
            fs::write(p, &data)?;
        }
        Ok(BitSource {
            data,
            cursor: 0,
            limit: None,
            origin: BitOrigin::OsEntropy {
                dump: dump.map(Path::to_path_buf),
            },
        })
    }

    /// Downloads raw bytes from `url` into `cache` (unless the cache already
    /// exists) and reads the stream from the cache.
    #[cfg(feature = "fetch")]
    pub fn fetch_http(url: &str, cache: impl AsRef<Path>) -> Result<Self> {
        let cache = cache.as_ref();
        if !cache.exists() {
            let resp = ureq::get(url)
                .call()
                .map_err(|e| Error::Io(format!("fetch {url}: {e}")))?;
            let mut body = Vec::new();
            std::io::Read::read_to_end(&mut resp.into_reader(), &mut body)?;
            fs::write(cache, &body)?;
        }
        let mut src = Self::from_file(cache)?;
        src.origin = BitOrigin::Http {
            url: url.to_string(),
            cache: cache.to_path_buf(),
        };
        Ok(src)
    }

    pub fn origin(&self) -> &BitOrigin {
        &self.origin
    }

    pub fn bytes(&self) -> &[u8] {
        &self.data
    }

    pub fn len_bits(&self) -> u64 {
        self.limit.unwrap_or(self.data.len() as u64 * 8)
    }

    /// Bits consumed so far.
    pub fn cursor(&self) -> u64 {
        self.cursor
    }

    pub fn remaining(&self) -> u64 {
        self.len_bits() - self.cursor
    }

    pub fn is_exhausted(&self) -> bool {
        self.remaining() == 0
    }

    fn ensure(&self, n: u64) -> Result<()> {
        if self.remaining() < n {
            return Err(Error::BitsExhausted {
                needed: n,
                available: self.remaining(),
            });
        }
        Ok(())
    }

    pub fn read_bit(&mut self) -> Result<bool> {
        self.ensure(1)?;
        let i = self.cursor;
        self.cursor += 1;
        Ok(self.data[(i / 8) as usize] & (0x80 >> (i % 8)) != 0)
    }

    /// The next `n` bits as a big-endian unsigned integer. Consumes nothing on failure.
    pub fn read_uint(&mut self, n: u64) -> Result<BigUint> {
        self.ensure(n)?;
        let mut x = BigUint::zero();
        for _ in 0..n {
            x <<= 1u32;
            if self.read_bit()? {
                x |= BigUint::from(1u32);
            }
        }
        Ok(x)
    }

    pub fn read_u64(&mut self, n: u32) -> Result<u64> {
        assert!(n <= 64);
        self.ensure(n as u64)?;
        let mut x = 0u64;
        for _ in 0..n {
            x = (x << 1) | self.read_bit()? as u64;
        }
        Ok(x)
    }

    /// Uniform integer in `[0, bound)` by rejection sampling on the
    /// smallest sufficient bit width.
    pub fn uniform_below(&mut self, bound: u64) -> Result<u64> {
        if bound == 0 {
            return Err(Error::InvalidArgument("uniform_below(0)".into()));
        }
        if bound == 1 {
            return Ok(0);
        }
        let width = 64 - (bound - 1).leading_zeros();
        loop {
            let x = self.read_u64(width)?;
            if x < bound {
                return Ok(x);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn msb_first_big_endian() {
        let mut s = BitSource::from_bytes(vec![0b1011_0001, 0xff]);
        assert_eq!(s.read_u64(3).unwrap(), 0b101);
        assert_eq!(s.read_u64(5).unwrap(), 0b10001);
        assert_eq!(s.cursor(), 8);
        assert_eq!(s.read_uint(8).unwrap(), BigUint::from(255u32));
        assert!(s.is_exhausted());
        assert!(matches!(
            s.read_bit(),
            Err(Error::BitsExhausted { needed: 1, available: 0 })
        ));
    }

    #[test]
    fn failed_read_consumes_nothing() {
        let mut s = BitSource::from_bytes(vec![0xaa]);
        s.read_u64(4).unwrap();
        assert!(s.read_u64(5).is_err());
        assert_eq!(s.cursor(), 4);
        assert_eq!(s.read_u64(4).unwrap(), 0b1010);
    }

    #[test]
    fn bit_strings() {
        let mut s = BitSource::from_bit_string("01 10 1").unwrap();
        assert_eq!(s.len_bits(), 5);
        assert_eq!(s.read_u64(2).unwrap(), 1);
        assert_eq!(s.read_u64(2).unwrap(), 2);
        assert_eq!(s.remaining(), 1);
        assert!(BitSource::from_bit_string("012").is_err());
    }

    #[test]
    fn rejection_sampling_stays_in_range() {
        let mut s = BitSource::from_bytes((0..=255u8).collect());
        for _ in 0..100 {
            assert!(s.uniform_below(5).unwrap() < 5);
        }
        assert_eq!(s.uniform_below(1).unwrap(), 0);
    }
}
