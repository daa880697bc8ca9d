//! Big-endian, length-prefixed byte encoding shared by every wire structure.
//!
//! Variable-length fields are a 4-byte big-endian length followed by the
//! bytes. Integers are big-endian and fixed width.

use num_bigint::BigUint;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CodecError {
    #[error("truncated input: needed {needed} more bytes at offset {offset}")]
    Truncated { offset: usize, needed: usize },
    #[error("unknown message tag 0x{0:02x}")]
    UnknownTag(u8),
    #[error("{0} trailing bytes after message")]
    TrailingBytes(usize),
    #[error("malformed field `{field}`: {reason}")]
    Malformed { field: &'static str, reason: String },
}

/// Append-only encoder.
#[derive(Debug, Default, Clone)]
pub struct Writer {
    buf: Vec<u8>,
}

impl Writer {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn u8(&mut self, v: u8) -> &mut Self {
        self.buf.push(v);
        self
    }

    pub fn u32(&mut self, v: u32) -> &mut Self {
        self.buf.extend_from_slice(&v.to_be_bytes());
        self
    }

    pub fn u64(&mut self, v: u64) -> &mut Self {
        self.buf.extend_from_slice(&v.to_be_bytes());
        self
    }

    /// Raw bytes with no length prefix; the reader must know the width.
    pub fn fixed(&mut self, bytes: &[u8]) -> &mut Self {
        self.buf.extend_from_slice(bytes);
        self
    }

    pub fn var(&mut self, bytes: &[u8]) -> &mut Self {
        let len = u32::try_from(bytes.len()).expect("field longer than 4 GiB");
        self.u32(len);
        self.buf.extend_from_slice(bytes);
        self
    }

    /// Unsigned big integer as minimal big-endian bytes, length-prefixed.
    /// Zero encodes as an empty field.
    pub fn biguint(&mut self, v: &BigUint) -> &mut Self {
        if v.bits() == 0 {
            self.var(&[])
        } else {
            self.var(&v.to_bytes_be())
        }
    }

    pub fn len(&self) -> usize {
        self.buf.len()
    }

    pub fn is_empty(&self) -> bool {
        self.buf.is_empty()
    }

    pub fn into_bytes(self) -> Vec<u8> {
        self.buf
    }
}

/// Cursor-based decoder over a borrowed buffer.
#[derive(Debug, Clone)]
pub struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    pub fn new(buf: &'a [u8]) -> Self {
        Self { buf, pos: 0 }
    }

    pub fn position(&self) -> usize {
        self.pos
    }

    pub fn remaining(&self) -> usize {
        self.buf.len() - self.pos
    }

    fn take(&mut self, n: usize) -> Result<&'a [u8], CodecError> {
        if self.remaining() < n {
            return Err(CodecError::Truncated {
                offset: self.pos,
                needed: n - self.remaining(),
            });
        }
        let out = &self.buf[self.pos..self.pos + n];
        self.pos += n;
        Ok(out)
    }

    pub fn u8(&mut self) -> Result<u8, CodecError> {
        Ok(self.take(1)?[0])
    }

    pub fn u32(&mut self) -> Result<u32, CodecError> {
        let b = self.take(4)?;
        Ok(u32::from_be_bytes(b.try_into().unwrap()))
    }

    pub fn u64(&mut self) -> Result<u64, CodecError> {
        let b = self.take(8)?;
        Ok(u64::from_be_bytes(b.try_into().unwrap()))
    }

    pub fn fixed<const N: usize>(&mut self) -> Result<[u8; N], CodecError> {
        Ok(self.take(N)?.try_into().unwrap())
    }

    pub fn var(&mut self) -> Result<&'a [u8], CodecError> {
        let len = self.u32()? as usize;
        self.take(len)
    }

    /// Inverse of [`Writer::biguint`]. Rejects leading zero bytes so that the
    /// encoding stays canonical.
    pub fn biguint(&mut self, field: &'static str) -> Result<BigUint, CodecError> {
        let bytes = self.var()?;
        if bytes.first() == Some(&0) {
            return Err(CodecError::Malformed {
                field,
                reason: "non-minimal integer encoding".into(),
            });
        }
        Ok(BigUint::from_bytes_be(bytes))
    }

    pub fn finish(self) -> Result<(), CodecError> {
        match self.remaining() {
            0 => Ok(()),
            n => Err(CodecError::TrailingBytes(n)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn var_field_layout() {
        let mut w = Writer::new();
        w.var(b"abc").u8(7);
        assert_eq!(w.into_bytes(), vec![0, 0, 0, 3, b'a', b'b', b'c', 7]);
    }

    #[test]
    fn biguint_zero_is_empty_field() {
        let mut w = Writer::new();
        w.biguint(&BigUint::from(0u8));
        let bytes = w.into_bytes();
        assert_eq!(bytes, vec![0, 0, 0, 0]);
        let mut r = Reader::new(&bytes);
        assert_eq!(r.biguint("x").unwrap(), BigUint::from(0u8));
        r.finish().unwrap();
    }

    #[test]
    fn truncated_read_reports_shortfall() {
        let mut r = Reader::new(&[0, 0, 0, 5, 1, 2]);
        assert_eq!(
            r.var().unwrap_err(),
            CodecError::Truncated { offset: 4, needed: 3 }
        );
    }

    #[test]
    fn non_minimal_biguint_rejected() {
        let mut r = Reader::new(&[0, 0, 0, 2, 0, 1]);
        assert!(matches!(r.biguint("c"), Err(CodecError::Malformed { .. })));
    }
}
