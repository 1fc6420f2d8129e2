//! JSON helpers for integers that may not survive a round trip through an
//! IEEE double. Values with magnitude at least 2^53 are written as strings;
//! both forms are accepted on input.

use serde::de::{self, Deserializer, Visitor};
use serde::ser::Serializer;
use std::fmt;

pub(crate) const SAFE_JSON_INT: u128 = 1 << 53;

pub(crate) fn ser_i64<S: Serializer>(v: i64, s: S) -> Result<S::Ok, S::Error> {
    if (v.unsigned_abs() as u128) < SAFE_JSON_INT {
        s.serialize_i64(v)
    } else {
        s.serialize_str(&v.to_string())
    }
}

pub(crate) fn ser_u128<S: Serializer>(v: u128, s: S) -> Result<S::Ok, S::Error> {
    if v < SAFE_JSON_INT {
        s.serialize_u64(v as u64)
    } else {
        s.serialize_str(&v.to_string())
    }
}

struct IntVisitor;

impl<'de> Visitor<'de> for IntVisitor {
    type Value = i128;

    fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
        f.write_str("an integer or a decimal string")
    }

    fn visit_i64<E: de::Error>(self, v: i64) -> Result<i128, E> {
        Ok(v as i128)
    }

    fn visit_u64<E: de::Error>(self, v: u64) -> Result<i128, E> {
        Ok(v as i128)
    }

    fn visit_i128<E: de::Error>(self, v: i128) -> Result<i128, E> {
        Ok(v)
    }

    fn visit_u128<E: de::Error>(self, v: u128) -> Result<i128, E> {
        i128::try_from(v).map_err(|_| E::custom("integer out of range"))
    }

    fn visit_f64<E: de::Error>(self, v: f64) -> Result<i128, E> {
        if v.fract() == 0.0 && v.abs() < 1e38 {
            Ok(v as i128)
        } else {
            Err(E::custom(format!("{v} is not an integer")))
        }
    }

    fn visit_str<E: de::Error>(self, v: &str) -> Result<i128, E> {
        v.trim().parse().map_err(E::custom)
    }
}

/// Newtype used to deserialize one wide integer in either representation.
pub(crate) struct WideInt(pub i128);

impl<'de> serde::Deserialize<'de> for WideInt {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        d.deserialize_any(IntVisitor).map(WideInt)
    }
}

pub(crate) mod wide_u128 {
    use super::*;

    pub fn serialize<S: Serializer>(v: &u128, s: S) -> Result<S::Ok, S::Error> {
        ser_u128(*v, s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<u128, D::Error> {
        let WideInt(v) = serde::Deserialize::deserialize(d)?;
        u128::try_from(v).map_err(de::Error::custom)
    }
}

pub(crate) mod wide_u128_opt {
    use super::*;

    pub fn serialize<S: Serializer>(v: &Option<u128>, s: S) -> Result<S::Ok, S::Error> {
        match v {
            Some(v) => ser_u128(*v, s),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<u128>, D::Error> {
        let v: Option<WideInt> = serde::Deserialize::deserialize(d)?;
        v.map(|WideInt(v)| u128::try_from(v).map_err(de::Error::custom))
            .transpose()
    }
}
