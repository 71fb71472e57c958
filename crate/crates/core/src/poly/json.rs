use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::PolyQ;
use crate::rational::RatStr;

#[derive(Serialize, Deserialize)]
struct TermJson {
    exp: Vec<u32>,
    coeff: RatStr,
}

#[derive(Serialize, Deserialize)]
struct PolyJson {
    d: usize,
    terms: Vec<TermJson>,
}

impl Serialize for PolyQ {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        PolyJson {
            d: self.d,
            terms: self
                .terms
                .iter()
                .map(|(e, c)| TermJson {
                    exp: e.clone(),
                    coeff: RatStr(c.clone()),
                })
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for PolyQ {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let j = PolyJson::deserialize(d)?;
        PolyQ::from_terms(j.d, j.terms.into_iter().map(|t| (t.exp, t.coeff.0)))
            .map_err(serde::de::Error::custom)
    }
}
