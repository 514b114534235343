//! JSON exchange formats.
//!
//! Integers are written as decimal strings; readers accept strings or plain
//! JSON numbers. Rationals are written as `"p/q"` (or `"p"` when integral).

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::point::{LatticePoint, RationalPoint};
use crate::polytope::LatticePolytope;

#[derive(Deserialize)]
#[serde(untagged)]
enum IntRepr {
    Str(String),
    Signed(i64),
    Unsigned(u64),
}

impl IntRepr {
    fn into_bigint<E: serde::de::Error>(self) -> Result<BigInt, E> {
        match self {
            IntRepr::Str(s) => s.trim().parse().map_err(|_| E::custom(format!("not an integer: {s:?}"))),
            IntRepr::Signed(i) => Ok(i.into()),
            IntRepr::Unsigned(u) => Ok(u.into()),
        }
    }
}

pub(crate) mod int_str {
    use super::*;

    pub fn serialize<S: Serializer>(x: &BigInt, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&x.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigInt, D::Error> {
        IntRepr::deserialize(d)?.into_bigint()
    }
}

pub(crate) mod int_vec {
    use super::*;

    pub fn serialize<S: Serializer>(v: &[BigInt], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(v.iter().map(|x| x.to_string()))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<BigInt>, D::Error> {
        Vec::<IntRepr>::deserialize(d)?
            .into_iter()
            .map(IntRepr::into_bigint)
            .collect()
    }
}

pub(crate) mod int_matrix {
    use super::*;

    pub fn serialize<S: Serializer>(m: &[Vec<BigInt>], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(
            m.iter()
                .map(|row| row.iter().map(|x| x.to_string()).collect::<Vec<_>>()),
        )
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Vec<BigInt>>, D::Error> {
        Vec::<Vec<IntRepr>>::deserialize(d)?
            .into_iter()
            .map(|row| row.into_iter().map(IntRepr::into_bigint).collect())
            .collect()
    }
}

/// `"p/q"` or `"p"`.
pub fn format_rational(x: &BigRational) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

pub fn parse_rational(s: &str) -> Result<BigRational> {
    let bad = || Error::Malformed(format!("not a rational: {s:?}"));
    let s = s.trim();
    match s.split_once('/') {
        Some((p, q)) => {
            let p: BigInt = p.trim().parse().map_err(|_| bad())?;
            let q: BigInt = q.trim().parse().map_err(|_| bad())?;
            if q == BigInt::from(0) {
                return Err(bad());
            }
            Ok(BigRational::new(p, q))
        }
        None => Ok(BigRational::from_integer(s.parse().map_err(|_| bad())?)),
    }
}

pub(crate) mod rational_matrix {
    use super::*;

    pub fn serialize<S: Serializer>(m: &[Vec<BigRational>], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(
            m.iter()
                .map(|row| row.iter().map(format_rational).collect::<Vec<_>>()),
        )
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Vec<BigRational>>, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Str(String),
            Signed(i64),
        }
        Vec::<Vec<Repr>>::deserialize(d)?
            .into_iter()
            .map(|row| {
                row.into_iter()
                    .map(|x| match x {
                        Repr::Str(s) => parse_rational(&s).map_err(serde::de::Error::custom),
                        Repr::Signed(i) => Ok(BigRational::from_integer(i.into())),
                    })
                    .collect()
            })
            .collect()
    }
}

/// `{"dim": d, "vertices": [[...], ...]}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolytopeJson {
    pub dim: usize,
    #[serde(with = "int_matrix")]
    pub vertices: Vec<Vec<BigInt>>,
}

impl PolytopeJson {
    pub fn from_polytope(p: &LatticePolytope) -> Self {
        PolytopeJson {
            dim: p.ambient_dim(),
            vertices: p.vertices().iter().map(|v| v.coords().to_vec()).collect(),
        }
    }

    pub fn to_polytope(&self) -> Result<LatticePolytope> {
        if let Some(bad) = self.vertices.iter().find(|v| v.len() != self.dim) {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: bad.len(),
            });
        }
        LatticePolytope::convex_hull(self.vertices.iter().cloned().map(LatticePoint::new))
    }
}

/// `{"generators": [[...], ...]}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConeJson {
    #[serde(with = "int_matrix")]
    pub generators: Vec<Vec<BigInt>>,
}

/// `{"dim": d, "vertices": [["p/q", ...], ...]}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RationalPolytopeJson {
    pub dim: usize,
    #[serde(with = "rational_matrix")]
    pub vertices: Vec<Vec<BigRational>>,
}

impl RationalPolytopeJson {
    pub fn points(&self) -> Result<Vec<RationalPoint>> {
        if let Some(bad) = self.vertices.iter().find(|v| v.len() != self.dim) {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: bad.len(),
            });
        }
        Ok(self.vertices.iter().cloned().map(RationalPoint::new).collect())
    }
}

pub fn read_polytope(text: &str) -> Result<LatticePolytope> {
    let j: PolytopeJson = serde_json::from_str(text).map_err(|e| Error::Malformed(e.to_string()))?;
    j.to_polytope()
}

pub fn write_polytope(p: &LatticePolytope) -> String {
    serde_json::to_string(&PolytopeJson::from_polytope(p)).expect("serializable")
}

pub fn lattice_point_strings(p: &LatticePoint) -> Vec<String> {
    p.coords().iter().map(|x| x.to_string()).collect()
}

pub fn rational_point_strings(p: &RationalPoint) -> Vec<String> {
    p.coords().iter().map(format_rational).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polytope_round_trip_is_exact() {
        let p = LatticePolytope::from_i64s(&[&[0, 0, 0], &[1, 0, 0], &[0, 1, 0], &[1, 1, 2]]).unwrap();
        let s = write_polytope(&p);
        assert_eq!(
            s,
            r#"{"dim":3,"vertices":[["0","0","0"],["0","1","0"],["1","0","0"],["1","1","2"]]}"#
        );
        let q = read_polytope(&s).unwrap();
        assert_eq!(q, p);
        assert_eq!(write_polytope(&q), s);
    }

    #[test]
    fn reader_accepts_numbers_and_big_strings() {
        let p = read_polytope(r#"{"dim":1,"vertices":[[0],["123456789012345678901234567890"]]}"#).unwrap();
        assert_eq!(p.vertices().len(), 2);
        assert!(matches!(
            read_polytope(r#"{"dim":2,"vertices":[[0]]}"#),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(matches!(read_polytope("{"), Err(Error::Malformed(_))));
    }

    #[test]
    fn rationals() {
        let x = parse_rational("-6/4").unwrap();
        assert_eq!(format_rational(&x), "-3/2");
        assert_eq!(format_rational(&parse_rational("7").unwrap()), "7");
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("a").is_err());
    }

    #[test]
    fn h_representation_schema() {
        let sq = LatticePolytope::unit_cube(2);
        let v = serde_json::to_value(sq.h_representation()).unwrap();
        assert_eq!(v["normals"].as_array().unwrap().len(), 4);
        assert!(v["offsets"][0].is_string());
        assert_eq!(v["equations"].as_array().unwrap().len(), 0);
    }
}
