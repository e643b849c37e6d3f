use std::collections::BTreeSet;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{MultiSeries, Result, SeriesError, UniSeries};

/// Wire form `{"nvars": d, "trunc": N, "coeffs": [[[e1,...,ed], re, im], ...]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeriesJson {
    pub nvars: usize,
    pub trunc: usize,
    pub coeffs: Vec<(Vec<u32>, f64, f64)>,
}

impl SeriesJson {
    /// Validates and converts; duplicate exponents are an error here.
    pub fn to_series(&self) -> Result<MultiSeries> {
        let mut seen = BTreeSet::new();
        for (e, _, _) in &self.coeffs {
            if !seen.insert(e.clone()) {
                return Err(SeriesError::DuplicateIndex(e.clone()));
            }
        }
        MultiSeries::from_terms(
            self.nvars,
            self.trunc,
            self.coeffs
                .iter()
                .map(|(e, re, im)| (e.clone(), Complex64::new(*re, *im))),
        )
    }

    pub fn to_uni(&self) -> Result<UniSeries> {
        UniSeries::from_multi(&self.to_series()?)
    }
}

impl From<&MultiSeries> for SeriesJson {
    fn from(s: &MultiSeries) -> Self {
        SeriesJson {
            nvars: s.nvars(),
            trunc: s.trunc(),
            coeffs: s.terms().map(|(e, c)| (e.to_vec(), c.re, c.im)).collect(),
        }
    }
}

impl From<&UniSeries> for SeriesJson {
    fn from(s: &UniSeries) -> Self {
        SeriesJson::from(&s.to_multi())
    }
}
