//! Serde helpers that write `f64` values with 17 significant digits.
//!
//! Shortest round-trip formatting depends on the formatter; a fixed
//! 17-digit exponent form makes exported fixtures byte-stable. Non-finite
//! values are written as `null`.

use serde::de::Deserialize;
use serde::ser::{Serialize, SerializeSeq, Serializer};
use serde::Deserializer;
use serde_json::value::RawValue;

/// Format one value as a JSON number token.
pub fn format(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        "null".to_owned()
    }
}

struct Num(f64);

impl Serialize for Num {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let raw = RawValue::from_string(format(self.0)).map_err(serde::ser::Error::custom)?;
        raw.serialize(s)
    }
}

fn read(v: Option<f64>) -> f64 {
    v.unwrap_or(f64::NAN)
}

pub fn serialize<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
    Num(*x).serialize(s)
}

pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
    Option::<f64>::deserialize(d).map(read)
}

pub mod vec {
    use super::*;

    pub fn serialize<S: Serializer>(xs: &[f64], s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(xs.len()))?;
        for &x in xs {
            seq.serialize_element(&Num(x))?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<f64>, D::Error> {
        Vec::<Option<f64>>::deserialize(d).map(|v| v.into_iter().map(read).collect())
    }
}

pub mod mat4 {
    use super::*;

    pub fn serialize<S: Serializer>(m: &[[f64; 4]; 4], s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(4))?;
        for row in m {
            seq.serialize_element(&row.iter().map(|&x| Num(x)).collect::<Vec<_>>())?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<[[f64; 4]; 4], D::Error> {
        let rows = <[[Option<f64>; 4]; 4]>::deserialize(d)?;
        Ok(rows.map(|r| r.map(read)))
    }
}

pub mod option {
    use super::*;

    pub fn serialize<S: Serializer>(x: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
        match x {
            Some(v) => Num(*v).serialize(s),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<f64>, D::Error> {
        Option::<f64>::deserialize(d)
    }
}

#[cfg(test)]
mod tests {
    use serde::{Deserialize, Serialize};

    #[derive(Serialize, Deserialize, PartialEq, Debug)]
    struct Sample {
        #[serde(with = "super")]
        x: f64,
        #[serde(with = "super::vec")]
        xs: Vec<f64>,
    }

    #[test]
    fn seventeen_digits() {
        assert_eq!(super::format(1.0), "1.0000000000000000e0");
        assert_eq!(super::format(f64::NAN), "null");
        let s = Sample {
            x: std::f64::consts::PI,
            xs: vec![0.1, -2.5e-300],
        };
        let text = serde_json::to_string(&s).unwrap();
        assert!(text.contains("3.1415926535897931e0"), "{text}");
        let back: Sample = serde_json::from_str(&text).unwrap();
        assert_eq!(back, s);
        assert_eq!(serde_json::to_string(&back).unwrap(), text);
    }
}
