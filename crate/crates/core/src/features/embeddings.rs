use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};

/// Precomputed per-tweet embedding vectors of a fixed dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingTable {
    dim: usize,
    ids: Vec<String>,
    vectors: HashMap<String, Vec<f64>>,
}

impl EmbeddingTable {
    pub fn new(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Validation("embedding dimension must be positive".into()));
        }
        Ok(EmbeddingTable {
            dim,
            ids: Vec::new(),
            vectors: HashMap::new(),
        })
    }

    pub fn insert(&mut self, id: impl Into<String>, vector: Vec<f64>) -> Result<()> {
        let id = id.into();
        if vector.len() != self.dim {
            return Err(Error::Data(format!(
                "embedding {id:?} has length {}, expected {}",
                vector.len(),
                self.dim
            )));
        }
        if vector.iter().any(|v| !v.is_finite()) {
            return Err(Error::Data(format!("embedding {id:?} has a non-finite value")));
        }
        if self.vectors.contains_key(&id) {
            return Err(Error::DuplicateId(id));
        }
        self.ids.push(id.clone());
        self.vectors.insert(id, vector);
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn get(&self, id: &str) -> Option<&[f64]> {
        self.vectors.get(id).map(Vec::as_slice)
    }

    pub fn require(&self, id: &str) -> Result<&[f64]> {
        self.get(id).ok_or_else(|| Error::MissingId(id.to_owned()))
    }

    /// Ids in file order.
    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    /// Text format: header `N D`, then `N` lines `id v_1 ... v_D`.
    pub fn parse(input: &str) -> Result<Self> {
        let mut lines = input.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let (_, header) = lines.next().ok_or_else(|| Error::parse(1, "missing header"))?;
        let mut head = header.split_ascii_whitespace();
        let (Some(n), Some(d), None) = (head.next(), head.next(), head.next()) else {
            return Err(Error::parse(1, "header must be `N D`"));
        };
        let n: usize = n
            .parse()
            .map_err(|_| Error::parse(1, format!("bad record count {n:?}")))?;
        let d: usize = d.parse().map_err(|_| Error::parse(1, format!("bad dimension {d:?}")))?;
        let mut table = Self::new(d).map_err(|e| Error::parse(1, e.to_string()))?;
        for (i, line) in lines {
            let line_no = i + 1;
            let mut fields = line.split_ascii_whitespace();
            let id = fields.next().expect("non-blank line has a field");
            let values = fields
                .map(|f| {
                    f.parse::<f64>()
                        .map_err(|_| Error::parse(line_no, format!("bad value {f:?} for {id:?}")))
                })
                .collect::<Result<Vec<f64>>>()?;
            table
                .insert(id, values)
                .map_err(|e| Error::parse(line_no, e.to_string()))?;
        }
        if table.len() != n {
            return Err(Error::Data(format!(
                "header declares {n} records, found {}",
                table.len()
            )));
        }
        Ok(table)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text)
    }

    pub fn format(&self) -> String {
        let mut out = format!("{} {}\n", self.len(), self.dim);
        for id in &self.ids {
            out.push_str(id);
            for v in &self.vectors[id] {
                let _ = write!(out, " {v}");
            }
            out.push('\n');
        }
        out
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.format()).map_err(|e| Error::io(path, e))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_table() {
        let t = EmbeddingTable::parse("2 3\nt1 0.1 0.2 0.3\nt2 1 0 -1\n").unwrap();
        assert_eq!(t.dim(), 3);
        assert_eq!(t.len(), 2);
        assert_eq!(t.get("t2").unwrap(), &[1.0, 0.0, -1.0]);
        assert_eq!(EmbeddingTable::parse(&t.format()).unwrap(), t);
    }

    #[test]
    fn rejects_bad_rows() {
        let short = EmbeddingTable::parse("1 3\nt3 0.1 0.2\n").unwrap_err();
        assert!(short.to_string().contains("t3"), "{short}");
        let dup = EmbeddingTable::parse("2 1\nt1 0\nt1 1\n").unwrap_err();
        assert!(dup.to_string().contains("duplicate"), "{dup}");
        assert!(EmbeddingTable::parse("1 1\nt1 NaN\n").is_err());
        assert!(EmbeddingTable::parse("1 1\nt1 inf\n").is_err());
        assert!(EmbeddingTable::parse("2 1\nt1 0\n").is_err());
        assert!(EmbeddingTable::parse("1 0\n").is_err());
        assert!(EmbeddingTable::parse("").is_err());
    }
}
