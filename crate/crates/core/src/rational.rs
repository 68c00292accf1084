//! JSON encoding for exact rationals: an integer, or a string `"p/q"`.

use std::str::FromStr;

use num_rational::Rational64;
use serde::de::{self, Deserializer, Visitor};
use serde::ser::Serializer;
use serde::{Deserialize, Serialize};

/// A `Rational64` that reads and writes as `3`, `"-7/2"` or `"5"`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Q(pub Rational64);

impl From<Rational64> for Q {
    fn from(r: Rational64) -> Self {
        Q(r)
    }
}

impl From<i64> for Q {
    fn from(v: i64) -> Self {
        Q(Rational64::from_integer(v))
    }
}

impl From<Q> for Rational64 {
    fn from(q: Q) -> Self {
        q.0
    }
}

pub fn parse(text: &str) -> Result<Rational64, String> {
    let t = text.trim();
    let parsed = match t.split_once('/') {
        Some((n, d)) => {
            let n = i64::from_str(n.trim()).map_err(|e| format!("bad numerator in {t:?}: {e}"))?;
            let d = i64::from_str(d.trim()).map_err(|e| format!("bad denominator in {t:?}: {e}"))?;
            if d == 0 {
                return Err(format!("zero denominator in {t:?}"));
            }
            Rational64::new(n, d)
        }
        None => Rational64::from_integer(
            i64::from_str(t).map_err(|e| format!("bad rational {t:?}: {e}"))?,
        ),
    };
    Ok(parsed)
}

pub fn format(r: &Rational64) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

impl Serialize for Q {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        if self.0.is_integer() {
            s.serialize_i64(*self.0.numer())
        } else {
            s.serialize_str(&format(&self.0))
        }
    }
}

impl<'de> Deserialize<'de> for Q {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct V;
        impl Visitor<'_> for V {
            type Value = Q;
            fn expecting(&self, f: &mut std::fmt::Formatter) -> std::fmt::Result {
                f.write_str("an integer or a string \"p/q\"")
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Q, E> {
                Ok(Q::from(v))
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Q, E> {
                i64::try_from(v).map(Q::from).map_err(E::custom)
            }
            fn visit_str<E: de::Error>(self, v: &str) -> Result<Q, E> {
                parse(v).map(Q).map_err(E::custom)
            }
        }
        d.deserialize_any(V)
    }
}

/// `#[serde(with = "crate::rational::single")]`
pub mod single {
    use super::*;

    pub fn serialize<S: Serializer>(r: &Rational64, s: S) -> Result<S::Ok, S::Error> {
        Q(*r).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational64, D::Error> {
        Q::deserialize(d).map(|q| q.0)
    }
}

/// `#[serde(with = "crate::rational::list")]`
pub mod list {
    use super::*;

    pub fn serialize<S: Serializer>(v: &[Rational64], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(v.iter().map(|r| Q(*r)))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Rational64>, D::Error> {
        Ok(Vec::<Q>::deserialize(d)?.into_iter().map(|q| q.0).collect())
    }
}
