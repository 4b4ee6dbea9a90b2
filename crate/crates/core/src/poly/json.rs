//! Polynomial interchange format:
//! `{"m": 3, "n": 2, "terms": [{"alpha": {"0": 2, "1": 1}, "re": 1.0, "im": 0.0}]}`.

use std::collections::{BTreeMap, BTreeSet};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::{HomogeneousPolynomial, MultiIndex};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolynomialFile {
    pub m: u32,
    pub n: usize,
    pub terms: Vec<TermRecord>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermRecord {
    pub alpha: BTreeMap<String, u32>,
    pub re: f64,
    pub im: f64,
}

impl From<&HomogeneousPolynomial> for PolynomialFile {
    fn from(p: &HomogeneousPolynomial) -> Self {
        let terms = p
            .terms()
            .map(|(alpha, c)| TermRecord {
                alpha: alpha.iter().map(|(v, e)| (v.to_string(), e)).collect(),
                re: c.re,
                im: c.im,
            })
            .collect();
        Self {
            m: p.degree(),
            n: p.num_vars(),
            terms,
        }
    }
}

impl TryFrom<PolynomialFile> for HomogeneousPolynomial {
    type Error = Error;

    fn try_from(file: PolynomialFile) -> Result<Self> {
        let mut seen = BTreeSet::new();
        let mut terms = Vec::with_capacity(file.terms.len());
        for (t, term) in file.terms.into_iter().enumerate() {
            let mut pairs = Vec::with_capacity(term.alpha.len());
            for (key, exp) in &term.alpha {
                let var: usize = key
                    .parse()
                    .map_err(|_| Error::Malformed(format!("term {t}: variable key {key:?} is not an index")))?;
                if *exp == 0 {
                    return Err(Error::Malformed(format!("term {t}: zero exponent for variable {var}")));
                }
                pairs.push((var, *exp));
            }
            let alpha = MultiIndex::from_pairs(pairs);
            if alpha.vars() != term.alpha.len() {
                return Err(Error::Malformed(format!("term {t}: repeated variable key")));
            }
            if !seen.insert(alpha.clone()) {
                return Err(Error::Malformed(format!("term {t}: duplicate monomial {alpha}")));
            }
            terms.push((alpha, Complex64::new(term.re, term.im)));
        }
        HomogeneousPolynomial::new(file.m, file.n, terms)
    }
}

impl Serialize for HomogeneousPolynomial {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        PolynomialFile::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for HomogeneousPolynomial {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        PolynomialFile::deserialize(d)?
            .try_into()
            .map_err(serde::de::Error::custom)
    }
}

impl HomogeneousPolynomial {
    pub fn to_json(&self) -> String {
        serde_json::to_string(&PolynomialFile::from(self)).expect("polynomial serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: PolynomialFile = serde_json::from_str(text)?;
        file.try_into()
    }
}
