//! Length-prefixed, checksummed binary frames used for on-disk state.
//!
//! Layout (little endian):
//!
//! ```text
//! magic [4] | version u16 | payload_len u64 | payload | crc32 u32
//! ```
//!
//! The checksum covers every byte before it.

use thiserror::Error;

pub const FORMAT_VERSION: u16 = 1;
const HEADER_LEN: usize = 4 + 2 + 8;
const TRAILER_LEN: usize = 4;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("corrupt snapshot: {0}")]
pub struct CorruptSnapshot(pub &'static str);

pub fn encode(magic: [u8; 4], payload: &[u8]) -> Vec<u8> {
    let mut out = Vec::with_capacity(HEADER_LEN + payload.len() + TRAILER_LEN);
    out.extend_from_slice(&magic);
    out.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
    out.extend_from_slice(&(payload.len() as u64).to_le_bytes());
    out.extend_from_slice(payload);
    let crc = crc32fast::hash(&out);
    out.extend_from_slice(&crc.to_le_bytes());
    out
}

pub fn decode(magic: [u8; 4], bytes: &[u8]) -> Result<&[u8], CorruptSnapshot> {
    if bytes.len() < HEADER_LEN + TRAILER_LEN {
        return Err(CorruptSnapshot("truncated header"));
    }
    if bytes[..4] != magic {
        return Err(CorruptSnapshot("bad magic"));
    }
    let version = u16::from_le_bytes([bytes[4], bytes[5]]);
    if version != FORMAT_VERSION {
        return Err(CorruptSnapshot("unsupported version"));
    }
    let len = u64::from_le_bytes(bytes[6..14].try_into().unwrap());
    let expected = (HEADER_LEN + TRAILER_LEN) as u64;
    if len.checked_add(expected) != Some(bytes.len() as u64) {
        return Err(CorruptSnapshot("length field disagrees with size"));
    }
    let body_end = bytes.len() - TRAILER_LEN;
    let stored = u32::from_le_bytes(bytes[body_end..].try_into().unwrap());
    if crc32fast::hash(&bytes[..body_end]) != stored {
        return Err(CorruptSnapshot("checksum mismatch"));
    }
    Ok(&bytes[HEADER_LEN..body_end])
}

/// Cursor over a decoded payload.
pub struct Reader<'a> {
    buf: &'a [u8],
}

impl<'a> Reader<'a> {
    pub fn new(buf: &'a [u8]) -> Self {
        Reader { buf }
    }

    pub fn take(&mut self, n: usize) -> Result<&'a [u8], CorruptSnapshot> {
        if self.buf.len() < n {
            return Err(CorruptSnapshot("payload truncated"));
        }
        let (head, tail) = self.buf.split_at(n);
        self.buf = tail;
        Ok(head)
    }

    pub fn u8(&mut self) -> Result<u8, CorruptSnapshot> {
        Ok(self.take(1)?[0])
    }

    pub fn u32(&mut self) -> Result<u32, CorruptSnapshot> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    pub fn i32(&mut self) -> Result<i32, CorruptSnapshot> {
        Ok(i32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    pub fn u64(&mut self) -> Result<u64, CorruptSnapshot> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    pub fn i64(&mut self) -> Result<i64, CorruptSnapshot> {
        Ok(i64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    pub fn finish(self) -> Result<(), CorruptSnapshot> {
        if self.buf.is_empty() {
            Ok(())
        } else {
            Err(CorruptSnapshot("trailing bytes in payload"))
        }
    }
}
