//! Serde adapter writing exact rationals as canonical strings (`"-1/2"`).

use serde::{Deserialize, Deserializer, Serializer};

use crate::rational::{parse_q, q_display, Q};

pub fn serialize<S: Serializer>(value: &Q, ser: S) -> Result<S::Ok, S::Error> {
    ser.serialize_str(&q_display(value))
}

pub fn deserialize<'de, D: Deserializer<'de>>(de: D) -> Result<Q, D::Error> {
    let text = String::deserialize(de)?;
    parse_q(&text).map_err(serde::de::Error::custom)
}
