//! Log-normalized TF-IDF over token sequences.
//!
//! For a token `t` occurring `c` times in a document of `L` tokens:
//!
//! ```text
//! weight(t) = (c / L) * ln(1 + n_docs / df(t))
//! ```
//!
//! `L` counts every token, out-of-vocabulary ones included. Weights are left
//! unnormalized unless [`TfIdfModel::l2_normalize`] is set.

use std::collections::HashMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::{Error, Execution, Result};

pub const FORMULA_ID: &str = "paper-lognorm-v1";
const FORMAT_VERSION: u32 = 1;

/// Sparse row: strictly increasing indices, no explicit zeros.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct SparseVector {
    pub dim: usize,
    pub indices: Vec<u32>,
    pub values: Vec<f64>,
}

impl SparseVector {
    pub fn zeros(dim: usize) -> Self {
        SparseVector {
            dim,
            indices: Vec::new(),
            values: Vec::new(),
        }
    }

    /// Build from `(index, value)` pairs; pairs are sorted and zeros dropped.
    ///
    /// Panics on duplicate or out-of-range indices.
    pub fn from_pairs(dim: usize, mut pairs: Vec<(u32, f64)>) -> Self {
        pairs.sort_unstable_by_key(|&(i, _)| i);
        let mut indices = Vec::with_capacity(pairs.len());
        let mut values = Vec::with_capacity(pairs.len());
        for (i, v) in pairs {
            assert!((i as usize) < dim, "index {i} out of range for dim {dim}");
            assert!(indices.last() != Some(&i), "duplicate index {i}");
            if v != 0.0 {
                indices.push(i);
                values.push(v);
            }
        }
        SparseVector {
            dim,
            indices,
            values,
        }
    }

    pub fn nnz(&self) -> usize {
        self.indices.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.indices
            .iter()
            .map(|&i| i as usize)
            .zip(self.values.iter().copied())
    }

    pub fn get(&self, index: usize) -> f64 {
        match self.indices.binary_search(&(index as u32)) {
            Ok(k) => self.values[k],
            Err(_) => 0.0,
        }
    }

    pub fn dot(&self, dense: &[f64]) -> f64 {
        self.iter().map(|(i, v)| v * dense[i]).sum()
    }

    pub fn l2_norm(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn l2_normalized(mut self) -> Self {
        let norm = self.l2_norm();
        if norm > 0.0 {
            self.values.iter_mut().for_each(|v| *v /= norm);
        }
        self
    }

    pub fn to_dense(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.dim];
        for (i, v) in self.iter() {
            out[i] = v;
        }
        out
    }
}

/// Vocabulary plus document frequencies.
#[derive(Debug, Clone, PartialEq)]
pub struct TfIdfModel {
    terms: Vec<String>,
    index: HashMap<String, u32>,
    df: Vec<u64>,
    n_docs: u64,
    pub l2_normalize: bool,
}

#[derive(Serialize, Deserialize)]
struct ModelFile {
    format_version: u32,
    formula_id: String,
    n_docs: u64,
    l2_normalize: bool,
    vocab: Vec<String>,
    df: Vec<u64>,
}

impl TfIdfModel {
    /// Fit vocabulary and document frequencies. Terms are indexed in
    /// first-seen order.
    pub fn fit<S: AsRef<str>>(docs: &[Vec<S>]) -> Result<Self> {
        if docs.is_empty() || docs.iter().all(|d| d.is_empty()) {
            return Err(Error::EmptyDocuments);
        }
        let mut terms: Vec<String> = Vec::new();
        let mut index: HashMap<String, u32> = HashMap::new();
        let mut df: Vec<u64> = Vec::new();
        let mut last_doc: Vec<usize> = Vec::new();
        for (d, doc) in docs.iter().enumerate() {
            for tok in doc {
                let tok = tok.as_ref();
                let id = match index.get(tok) {
                    Some(&id) => id as usize,
                    None => {
                        let id = terms.len();
                        terms.push(tok.to_string());
                        index.insert(tok.to_string(), id as u32);
                        df.push(0);
                        last_doc.push(usize::MAX);
                        id
                    }
                };
                if last_doc[id] != d {
                    last_doc[id] = d;
                    df[id] += 1;
                }
            }
        }
        Ok(TfIdfModel {
            terms,
            index,
            df,
            n_docs: docs.len() as u64,
            l2_normalize: false,
        })
    }

    pub fn dim(&self) -> usize {
        self.terms.len()
    }

    pub fn n_docs(&self) -> u64 {
        self.n_docs
    }

    pub fn terms(&self) -> &[String] {
        &self.terms
    }

    pub fn term_index(&self, term: &str) -> Option<usize> {
        self.index.get(term).map(|&i| i as usize)
    }

    pub fn df(&self, term: &str) -> Option<u64> {
        self.term_index(term).map(|i| self.df[i])
    }

    /// `ln(1 + n_docs / df)` for column `i`.
    pub fn idf(&self, i: usize) -> f64 {
        (1.0 + self.n_docs as f64 / self.df[i] as f64).ln()
    }

    /// In-vocabulary term counts and the full document length.
    fn counts<S: AsRef<str>>(&self, doc: &[S]) -> (Vec<(u32, f64)>, usize) {
        let mut counts: HashMap<u32, f64> = HashMap::new();
        for tok in doc {
            if let Some(&i) = self.index.get(tok.as_ref()) {
                *counts.entry(i).or_insert(0.0) += 1.0;
            }
        }
        (counts.into_iter().collect(), doc.len())
    }

    pub fn transform<S: AsRef<str>>(&self, doc: &[S]) -> SparseVector {
        let (counts, len) = self.counts(doc);
        if len == 0 {
            return SparseVector::zeros(self.dim());
        }
        let len = len as f64;
        let pairs = counts
            .into_iter()
            .map(|(i, c)| (i, c / len * self.idf(i as usize)))
            .collect();
        let v = SparseVector::from_pairs(self.dim(), pairs);
        if self.l2_normalize {
            v.l2_normalized()
        } else {
            v
        }
    }

    /// Raw in-vocabulary term counts, the input for multinomial Naive Bayes.
    pub fn count_vector<S: AsRef<str>>(&self, doc: &[S]) -> SparseVector {
        SparseVector::from_pairs(self.dim(), self.counts(doc).0)
    }

    pub fn transform_batch<S: AsRef<str> + Sync>(
        &self,
        docs: &[Vec<S>],
        exec: Execution,
    ) -> Vec<SparseVector> {
        exec.map(docs, |d| self.transform(d))
    }

    pub fn count_batch<S: AsRef<str> + Sync>(
        &self,
        docs: &[Vec<S>],
        exec: Execution,
    ) -> Vec<SparseVector> {
        exec.map(docs, |d| self.count_vector(d))
    }

    pub fn to_json(&self) -> Result<String> {
        let file = ModelFile {
            format_version: FORMAT_VERSION,
            formula_id: FORMULA_ID.to_string(),
            n_docs: self.n_docs,
            l2_normalize: self.l2_normalize,
            vocab: self.terms.clone(),
            df: self.df.clone(),
        };
        Ok(serde_json::to_string(&file)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: ModelFile = serde_json::from_str(text)?;
        if file.format_version != FORMAT_VERSION {
            return Err(Error::FormatVersion(file.format_version));
        }
        if file.formula_id != FORMULA_ID {
            return Err(Error::VectorizerMismatch {
                expected: FORMULA_ID.to_string(),
                found: file.formula_id,
            });
        }
        if file.vocab.len() != file.df.len() {
            return Err(Error::DimensionMismatch {
                expected: file.vocab.len(),
                found: file.df.len(),
            });
        }
        if file.df.iter().any(|&d| d == 0 || d > file.n_docs) {
            return Err(Error::Invalid("document frequency out of range".into()));
        }
        let mut index = HashMap::with_capacity(file.vocab.len());
        for (i, t) in file.vocab.iter().enumerate() {
            if index.insert(t.clone(), i as u32).is_some() {
                return Err(Error::Invalid(format!("duplicate vocabulary term {t:?}")));
            }
        }
        Ok(TfIdfModel {
            terms: file.vocab,
            index,
            df: file.df,
            n_docs: file.n_docs,
            l2_normalize: file.l2_normalize,
        })
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_json()?).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }
}
