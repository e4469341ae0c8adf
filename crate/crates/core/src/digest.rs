//! Content digests stamped into artifacts.

use sha2::{Digest, Sha256};
use std::fmt::Write as _;

pub fn sha256_hex(bytes: impl AsRef<[u8]>) -> String {
    let out = Sha256::digest(bytes.as_ref());
    let mut s = String::with_capacity(64);
    for b in out.iter() {
        let _ = write!(s, "{b:02x}");
    }
    s
}

/// Digest of a value's canonical JSON form.
pub fn of_json<T: serde::Serialize>(value: &T) -> String {
    sha256_hex(serde_json::to_vec(value).expect("value serializes"))
}
