//! Canonical JSON encoding: minimal separators, object keys sorted
//! bytewise, UTF-8. Every signed or hashed payload and every persisted
//! record goes through here so that re-encoding is byte-stable.

use serde::Serialize;

/// Encodes `value` canonically. Round-tripping through `serde_json::Value`
/// re-sorts object keys regardless of struct field order.
pub fn to_canonical_json<T: Serialize>(value: &T) -> serde_json::Result<String> {
    let tree = serde_json::to_value(value)?;
    serde_json::to_string(&tree)
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde::Serialize;

    #[derive(Serialize)]
    struct Shuffled {
        zulu: u64,
        alpha: &'static str,
        mike: Vec<u8>,
    }

    /// Guards the assumption that `serde_json::Value` objects iterate in
    /// sorted key order (i.e. the `preserve_order` feature is off).
    #[test]
    fn keys_come_out_sorted_and_compact() {
        let s = Shuffled {
            zulu: 3,
            alpha: "a",
            mike: vec![1, 2],
        };
        assert_eq!(
            to_canonical_json(&s).unwrap(),
            r#"{"alpha":"a","mike":[1,2],"zulu":3}"#
        );
    }

    #[test]
    fn encoding_is_stable_across_calls() {
        let s = Shuffled {
            zulu: u64::MAX,
            alpha: "κ",
            mike: vec![],
        };
        assert_eq!(to_canonical_json(&s).unwrap(), to_canonical_json(&s).unwrap());
    }
}
