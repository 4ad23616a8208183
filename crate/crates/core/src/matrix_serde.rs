//! JSON shape of matrices: row-major nested arrays, real entries as plain
//! numbers and complex entries as `[re, im]` pairs.
//!
//! On input each entry may be either a number or a pair, and a flat array of
//! numbers is read as a column vector. An inner array is always a row, so a
//! complex column vector has to be written as `[[[re, im]], ...]`. On output
//! a matrix with no imaginary part anywhere is written with plain numbers.

use alloc::vec::Vec;
use alloc::format;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::linalg::{CMat, C64};

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum Entry {
    Real(f64),
    Complex([f64; 2]),
}

#[derive(Deserialize)]
#[serde(untagged)]
enum Row {
    Entries(Vec<Entry>),
    Single(Entry),
}

impl Entry {
    fn value(&self) -> C64 {
        match *self {
            Entry::Real(x) => C64::new(x, 0.0),
            Entry::Complex([re, im]) => C64::new(re, im),
        }
    }
}

pub fn serialize<S: Serializer>(m: &CMat, s: S) -> Result<S::Ok, S::Error> {
    rows_of(m).serialize(s)
}

pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<CMat, D::Error> {
    let rows = Vec::<Row>::deserialize(d)?;
    from_rows(rows).map_err(D::Error::custom)
}

fn rows_of(m: &CMat) -> Vec<Vec<Entry>> {
    let all_real = m.iter().all(|z| z.im == 0.0);
    (0..m.nrows())
        .map(|i| {
            (0..m.ncols())
                .map(|j| {
                    let z = m[(i, j)];
                    if all_real {
                        Entry::Real(z.re)
                    } else {
                        Entry::Complex([z.re, z.im])
                    }
                })
                .collect()
        })
        .collect()
}

fn from_rows(rows: Vec<Row>) -> Result<CMat, alloc::string::String> {
    let rows: Vec<Vec<C64>> = rows
        .into_iter()
        .map(|r| match r {
            Row::Entries(es) => es.iter().map(Entry::value).collect(),
            Row::Single(e) => alloc::vec![e.value()],
        })
        .collect();
    let ncols = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|r| r.len() != ncols) {
        return Err(format!("ragged matrix: rows of unequal length"));
    }
    Ok(CMat::from_fn(rows.len(), ncols, |i, j| rows[i][j]))
}

/// Same encoding for `Option<CMat>`.
pub mod option {
    use super::*;

    pub fn serialize<S: Serializer>(m: &Option<CMat>, s: S) -> Result<S::Ok, S::Error> {
        m.as_ref().map(rows_of).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<CMat>, D::Error> {
        Option::<Vec<Row>>::deserialize(d)?
            .map(from_rows)
            .transpose()
            .map_err(D::Error::custom)
    }
}

/// Same encoding for `Vec<CMat>`.
pub mod list {
    use super::*;

    pub fn serialize<S: Serializer>(ms: &[CMat], s: S) -> Result<S::Ok, S::Error> {
        ms.iter().map(rows_of).collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<CMat>, D::Error> {
        Vec::<Vec<Row>>::deserialize(d)?
            .into_iter()
            .map(from_rows)
            .collect::<Result<_, _>>()
            .map_err(D::Error::custom)
    }
}

/// A matrix with the JSON encoding above, for use as a standalone value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct JsonMatrix(#[serde(with = "self")] pub CMat);
