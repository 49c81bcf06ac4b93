//! `u128` counts as JSON numbers when they fit in `u64`, decimal strings
//! otherwise.

use serde::de::{self, Deserializer, Visitor};
use serde::Serializer;

pub fn serialize<S: Serializer>(v: &u128, s: S) -> Result<S::Ok, S::Error> {
    match u64::try_from(*v) {
        Ok(small) => s.serialize_u64(small),
        Err(_) => s.serialize_str(&v.to_string()),
    }
}

struct CountVisitor;

impl Visitor<'_> for CountVisitor {
    type Value = u128;

    fn expecting(&self, f: &mut std::fmt::Formatter) -> std::fmt::Result {
        f.write_str("a non-negative integer or a decimal string")
    }

    fn visit_u64<E: de::Error>(self, v: u64) -> Result<u128, E> {
        Ok(v.into())
    }

    fn visit_u128<E: de::Error>(self, v: u128) -> Result<u128, E> {
        Ok(v)
    }

    fn visit_str<E: de::Error>(self, v: &str) -> Result<u128, E> {
        v.parse().map_err(E::custom)
    }
}

pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<u128, D::Error> {
    d.deserialize_any(CountVisitor)
}

pub mod option {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &Option<u128>, s: S) -> Result<S::Ok, S::Error> {
        match v {
            Some(x) => super::serialize(x, s),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<u128>, D::Error> {
        #[derive(Deserialize)]
        struct Wrap(#[serde(with = "super")] u128);
        Ok(Option::<Wrap>::deserialize(d)?.map(|w| w.0))
    }
}

#[cfg(test)]
mod tests {
    use serde::{Deserialize, Serialize};

    #[derive(Debug, PartialEq, Serialize, Deserialize)]
    struct Holder {
        #[serde(with = "super")]
        n: u128,
        #[serde(with = "super::option")]
        m: Option<u128>,
    }

    #[test]
    fn round_trip() {
        for (n, m, text) in [
            (5, None, r#"{"n":5,"m":null}"#),
            (1 << 64, Some(3), r#"{"n":"18446744073709551616","m":3}"#),
            (
                u64::MAX as u128,
                Some(1 << 70),
                r#"{"n":18446744073709551615,"m":"1180591620717411303424"}"#,
            ),
        ] {
            let h = Holder { n, m };
            assert_eq!(serde_json::to_string(&h).unwrap(), text);
            assert_eq!(serde_json::from_str::<Holder>(text).unwrap(), h);
        }
        assert!(serde_json::from_str::<Holder>(r#"{"n":"x","m":null}"#).is_err());
    }
}
