use std::collections::{HashSet, VecDeque};
use std::sync::Arc;

use parking_lot::Mutex;

use crate::frame::{self, CorruptSnapshot, Reader};

pub const DEFAULT_DEDUP_CAPACITY: usize = 10_000_000;

const MAGIC: [u8; 4] = *b"EAPD";

#[derive(Debug, Default)]
struct Inner {
    seen: HashSet<Arc<str>>,
    order: VecDeque<Arc<str>>,
}

/// Bounded set of recently seen tweet ids. When full, the id inserted
/// longest ago is forgotten.
#[derive(Debug)]
pub struct DedupStore {
    capacity: usize,
    inner: Mutex<Inner>,
}

impl Default for DedupStore {
    fn default() -> Self {
        DedupStore::with_capacity(DEFAULT_DEDUP_CAPACITY)
    }
}

impl DedupStore {
    /// # Panics
    ///
    /// Panics if `capacity` is 0.
    pub fn with_capacity(capacity: usize) -> Self {
        assert!(capacity > 0, "dedup capacity must be positive");
        DedupStore {
            capacity,
            inner: Mutex::new(Inner::default()),
        }
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn len(&self) -> usize {
        self.inner.lock().order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Records `id` and returns true if it was not already present.
    pub fn check(&self, id: &str) -> bool {
        let mut inner = self.inner.lock();
        if inner.seen.contains(id) {
            return false;
        }
        if inner.order.len() == self.capacity {
            if let Some(oldest) = inner.order.pop_front() {
                inner.seen.remove(&oldest);
            }
        }
        let id: Arc<str> = Arc::from(id);
        inner.seen.insert(id.clone());
        inner.order.push_back(id);
        true
    }

    /// Ids in insertion order, oldest first.
    ///
    /// Payload: `n u64 | n x (len u32 | utf8 bytes)`.
    pub fn snapshot(&self) -> Vec<u8> {
        let inner = self.inner.lock();
        let mut payload = Vec::new();
        payload.extend_from_slice(&(inner.order.len() as u64).to_le_bytes());
        for id in &inner.order {
            payload.extend_from_slice(&(id.len() as u32).to_le_bytes());
            payload.extend_from_slice(id.as_bytes());
        }
        frame::encode(MAGIC, &payload)
    }

    /// Restores ids from [`DedupStore::snapshot`]; if the snapshot holds more
    /// ids than `capacity`, only the most recent are kept.
    pub fn restore(bytes: &[u8], capacity: usize) -> Result<Self, CorruptSnapshot> {
        let mut r = Reader::new(frame::decode(MAGIC, bytes)?);
        let n = r.u64()?;
        let store = DedupStore::with_capacity(capacity);
        for _ in 0..n {
            let len = r.u32()? as usize;
            let id = std::str::from_utf8(r.take(len)?)
                .map_err(|_| CorruptSnapshot("id is not UTF-8"))?;
            if !store.check(id) {
                return Err(CorruptSnapshot("duplicate id"));
            }
        }
        r.finish()?;
        Ok(store)
    }
}
