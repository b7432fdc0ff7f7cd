//! Loader for the plain-text word vector format: a `<count> <dim>` header
//! line followed by `word v1 .. vdim` lines.

use std::collections::HashMap;
use std::path::Path;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingTable {
    dim: usize,
    vectors: HashMap<String, Vec<f64>>,
}

impl EmbeddingTable {
    pub fn load(path: impl AsRef<Path>) -> Result<EmbeddingTable> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_text(&text, &path.display().to_string())
    }

    pub fn from_text(text: &str, source: &str) -> Result<EmbeddingTable> {
        let mut lines = text.lines().enumerate();
        let (_, header) = lines
            .next()
            .ok_or_else(|| Error::parse(source, 1, "empty embedding file"))?;
        let mut parts = header.split_whitespace();
        let _count: usize = parts
            .next()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::parse(source, 1, "expected '<count> <dim>' header"))?;
        let dim: usize = parts
            .next()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::parse(source, 1, "expected '<count> <dim>' header"))?;
        if dim == 0 {
            return Err(Error::parse(source, 1, "dimension must be positive"));
        }

        let mut vectors: HashMap<String, Vec<f64>> = HashMap::new();
        for (idx, line) in lines {
            if line.trim().is_empty() {
                continue;
            }
            let mut parts = line.split_whitespace();
            let word = parts.next().unwrap();
            let components: Vec<f64> = parts
                .map(|s| {
                    s.parse::<f64>().map_err(|_| {
                        Error::parse(source, idx + 1, format!("non-numeric component '{s}'"))
                    })
                })
                .collect::<Result<_>>()?;
            if components.len() != dim {
                return Err(Error::parse(
                    source,
                    idx + 1,
                    format!("expected {dim} components, found {}", components.len()),
                ));
            }
            if components.iter().any(|v| !v.is_finite()) {
                return Err(Error::parse(source, idx + 1, "non-finite component"));
            }
            // duplicate words keep the first occurrence
            vectors.entry(word.to_string()).or_insert(components);
        }
        Ok(EmbeddingTable { dim, vectors })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn get(&self, word: &str) -> Option<&[f64]> {
        self.vectors.get(word).map(Vec::as_slice)
    }
}
