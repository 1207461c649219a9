//! Content hashing for provenance records (FNV-1a, 64-bit).

pub fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut h = 0xcbf2_9ce4_8422_2325u64;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

pub fn hex64(h: u64) -> String {
    format!("{h:016x}")
}

/// Hash a file's raw bytes; used to pin inputs in run records.
pub fn hash_file(path: &std::path::Path) -> std::io::Result<String> {
    Ok(hex64(fnv1a64(&std::fs::read(path)?)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn known_vector() {
        // FNV-1a test vectors
        assert_eq!(fnv1a64(b""), 0xcbf29ce484222325);
        assert_eq!(fnv1a64(b"a"), 0xaf63dc4c8601ec8c);
    }
}
